//! Request outcomes per cluster and the expected numbers of cooperative,
//! non-cooperative and cellular users.
//!
//! A request configuration gives, for every cluster, how many of its `K` users
//! ask for each file group. Only the first `K` groups are cached; a cached
//! group requested in every cluster is a hit group and all of its requesters
//! are cooperative users.

use rayon::prelude::*;

use crate::catalog::PopularityModel;
use crate::error::{ensure, Error, Result};
use crate::sampling::{mean_and_se, trial_rng, GroupSampler, Stream};
use crate::scalar::{powi, Scalar};

pub const DEFAULT_ENUMERATION_BUDGET: u128 = 10_000_000;

/// `counts[i][k]`: users of cluster `i` requesting group `k`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RequestConfiguration {
    counts: Vec<Vec<usize>>,
    users_per_cluster: usize,
}

impl RequestConfiguration {
    pub fn new(counts: Vec<Vec<usize>>, users_per_cluster: usize) -> Result<Self> {
        ensure!(!counts.is_empty(), Argument, "configuration needs at least one cluster");
        let width = counts[0].len();
        for (i, row) in counts.iter().enumerate() {
            ensure!(row.len() == width, Argument, "cluster {i} has {} groups, expected {width}", row.len());
            let total: usize = row.iter().sum();
            ensure!(
                total == users_per_cluster,
                Argument,
                "cluster {i} holds {total} requests, expected {users_per_cluster}"
            );
        }
        Ok(Self { counts, users_per_cluster })
    }

    pub fn counts(&self) -> &[Vec<usize>] {
        &self.counts
    }

    pub fn n_clusters(&self) -> usize {
        self.counts.len()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    Exact,
    MonteCarlo,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PopulationSummary<T> {
    pub coop_mean: T,
    pub cellular_mean: T,
    pub noncoop_mean: T,
    pub method: Method,
    /// Standard error of `coop_mean`; zero for exact results.
    pub std_error: f64,
}

/// Multinomial mass of one cluster's request counts.
fn composition_probability<T: Scalar>(counts: &[usize], probs: &[T]) -> T {
    let mut coef = T::one();
    let mut placed = 0u64;
    for (&n, p) in counts.iter().zip(probs) {
        // builds K! / prod n_k! as a product of binomial ratios
        for j in 1..=n as u64 {
            placed += 1;
            coef = coef * T::from_count(placed) / T::from_count(j);
        }
        coef = coef * powi(p, n);
    }
    coef
}

/// Probability of a full configuration when users request independently.
pub fn configuration_probability<T: Scalar>(config: &RequestConfiguration, model: &PopularityModel<T>) -> Result<T> {
    ensure!(
        config.counts[0].len() == model.group_count(),
        Argument,
        "configuration covers {} groups, model has {}",
        config.counts[0].len(),
        model.group_count()
    );
    Ok(config
        .counts
        .iter()
        .fold(T::one(), |acc, row| acc * composition_probability(row, model.group_probs())))
}

/// Number of cooperative users: requesters of the cached groups `0..cached`
/// that every cluster requests.
pub fn coop_count(config: &RequestConfiguration, cached: usize) -> usize {
    (0..cached.min(config.counts[0].len()))
        .filter(|&k| config.counts.iter().all(|row| row[k] > 0))
        .map(|k| config.counts.iter().map(|row| row[k]).sum::<usize>())
        .sum()
}

/// Number of ways to split `total` requests over `groups` groups.
pub fn composition_count(total: usize, groups: usize) -> u128 {
    if groups == 0 {
        return u128::from(total == 0);
    }
    // C(total + groups - 1, groups - 1), saturating
    let k = (groups - 1).min(total) as u128;
    let n = (total + groups - 1) as u128;
    let mut c: u128 = 1;
    for i in 0..k {
        c = match c.checked_mul(n - i) {
            Some(v) => v / (i + 1),
            None => return u128::MAX,
        };
    }
    c
}

/// Calls `visit` with every vector of `groups` non-negative counts summing to
/// `total`, in lexicographic order.
pub fn for_each_composition(total: usize, groups: usize, mut visit: impl FnMut(&[usize])) {
    fn recurse(slot: usize, left: usize, buf: &mut [usize], visit: &mut impl FnMut(&[usize])) {
        if slot + 1 == buf.len() {
            buf[slot] = left;
            visit(buf);
            return;
        }
        for n in (0..=left).rev() {
            buf[slot] = n;
            recurse(slot + 1, left - n, buf, visit);
        }
    }
    if groups == 0 {
        return;
    }
    let mut buf = vec![0; groups];
    recurse(0, total, &mut buf, &mut visit);
}

/// Exact expected user counts.
///
/// Clusters are independent and exchangeable, so per-cluster compositions are
/// enumerated once: for each cached group `k` this yields the hit probability
/// `h_k` and the mean request count `a_k`, and the expected coop count is
/// `sum_k B a_k h_k^(B-1)`. `budget` caps the number of compositions visited.
pub fn expected_coop_users_exact<T: Scalar>(
    model: &PopularityModel<T>,
    users_per_cluster: usize,
    n_clusters: usize,
    budget: u128,
) -> Result<PopulationSummary<T>> {
    ensure!(n_clusters >= 1, Argument, "need at least one cluster");
    ensure!(
        (1..=model.group_count()).contains(&users_per_cluster),
        Argument,
        "cluster size {users_per_cluster} outside 1..={}",
        model.group_count()
    );
    let groups = model.group_count();
    let required = composition_count(users_per_cluster, groups);
    if required > budget {
        return Err(Error::BudgetExceeded { required, budget });
    }

    let cached = users_per_cluster;
    let mut hit = vec![T::zero(); cached];
    let mut mean_count = vec![T::zero(); cached];
    for_each_composition(users_per_cluster, groups, |counts| {
        let p = composition_probability(counts, model.group_probs());
        for k in 0..cached {
            if counts[k] > 0 {
                hit[k] = hit[k].clone() + p.clone();
                mean_count[k] = mean_count[k].clone() + p.clone() * T::from_count(counts[k] as u64);
            }
        }
    });

    let b = T::from_count(n_clusters as u64);
    let coop_mean = hit
        .iter()
        .zip(&mean_count)
        .fold(T::zero(), |acc, (h, a)| acc + b.clone() * a.clone() * powi(h, n_clusters - 1));

    let n_users = users_per_cluster * n_clusters;
    // rounding can push a certain outcome just past M
    let m = T::from_count(n_users as u64);
    let coop_mean = if coop_mean > m { m } else { coop_mean };
    let (cellular_mean, noncoop_mean) = expected_cellular_and_noncoop(model, n_users, cached, coop_mean.clone())?;
    Ok(PopulationSummary { coop_mean, cellular_mean, noncoop_mean, method: Method::Exact, std_error: 0.0 })
}

/// Largest cluster size accepted by [`exact_coop_probability`].
pub const MAX_EXACT_SUBSET_GROUPS: usize = 24;

/// Exact probability that some cached group is requested in every cluster,
/// by inclusion-exclusion over subsets of the cached groups.
///
/// Unlike the product form in [`crate::cluster::coop_probability`] this keeps
/// the dependence between groups within a cluster. Cost is `O(K 2^K)`.
pub fn exact_coop_probability<T: Scalar>(model: &PopularityModel<T>, users_per_cluster: usize, n_clusters: usize) -> Result<T> {
    ensure!(n_clusters >= 1, Argument, "need at least one cluster");
    ensure!(
        (1..=model.group_count()).contains(&users_per_cluster),
        Argument,
        "cluster size {users_per_cluster} outside 1..={}",
        model.group_count()
    );
    let k = users_per_cluster;
    ensure!(k <= MAX_EXACT_SUBSET_GROUPS, Argument, "cluster size {k} too large for subset enumeration");
    let probs = &model.group_probs()[..k];

    // g(T) = (-1)^|T| (1 - P(T))^K; its subset sums give, for every S, the
    // probability that one cluster requests every group in S
    let full = 1usize << k;
    let mut all_hit: Vec<T> = (0..full)
        .map(|mask: usize| {
            let mass = (0..k).filter(|i| mask >> i & 1 == 1).fold(T::zero(), |acc, i| acc + probs[i].clone());
            let term = powi(&(T::one() - mass), users_per_cluster);
            if mask.count_ones() % 2 == 1 { -term } else { term }
        })
        .collect();
    for bit in 0..k {
        for mask in 0..full {
            if mask >> bit & 1 == 1 {
                let lower = all_hit[mask ^ (1 << bit)].clone();
                all_hit[mask] = all_hit[mask].clone() + lower;
            }
        }
    }

    Ok((1..full).fold(T::zero(), |acc, mask| {
        let term = powi(&all_hit[mask], n_clusters);
        if mask.count_ones() % 2 == 1 { acc + term } else { acc - term }
    }))
}

/// Monte Carlo estimate of the expected user counts. Requests are drawn over
/// the whole catalog, including uncached groups. Deterministic in `seed`
/// regardless of the number of worker threads.
pub fn expected_coop_users_mc(
    model: &PopularityModel<f64>,
    users_per_cluster: usize,
    n_clusters: usize,
    trials: usize,
    seed: u64,
) -> Result<PopulationSummary<f64>> {
    ensure!(trials >= 1, Argument, "need at least one trial");
    ensure!(n_clusters >= 1, Argument, "need at least one cluster");
    ensure!(
        (1..=model.group_count()).contains(&users_per_cluster),
        Argument,
        "cluster size {users_per_cluster} outside 1..={}",
        model.group_count()
    );
    let sampler = GroupSampler::new(model.group_probs());
    let cached = users_per_cluster;

    let draws: Vec<[u32; 3]> = (0..trials as u64)
        .into_par_iter()
        .map(|trial| {
            let mut rng = trial_rng(seed, trial, Stream::Requests);
            let mut counts = vec![vec![0u32; cached]; n_clusters];
            let mut cellular = 0u32;
            for row in counts.iter_mut() {
                for _ in 0..users_per_cluster {
                    let g = sampler.sample(&mut rng);
                    if g < cached {
                        row[g] += 1;
                    } else {
                        cellular += 1;
                    }
                }
            }
            let coop: u32 = (0..cached)
                .filter(|&k| counts.iter().all(|row| row[k] > 0))
                .map(|k| counts.iter().map(|row| row[k]).sum::<u32>())
                .sum();
            let n_users = (users_per_cluster * n_clusters) as u32;
            [coop, cellular, n_users - coop - cellular]
        })
        .collect();

    let column = |c: usize| draws.iter().map(move |d| f64::from(d[c]));
    let (coop_mean, std_error) = mean_and_se(column(0));
    let n = trials as f64;
    Ok(PopulationSummary {
        coop_mean,
        cellular_mean: column(1).sum::<f64>() / n,
        noncoop_mean: column(2).sum::<f64>() / n,
        method: Method::MonteCarlo,
        std_error,
    })
}

/// Expected cellular users `M (1 - sum_{k<K} P_k)` and the non-cooperative
/// remainder `M - coop - cellular`.
pub fn expected_cellular_and_noncoop<T: Scalar>(
    model: &PopularityModel<T>,
    n_users: usize,
    cached: usize,
    coop_mean: T,
) -> Result<(T, T)> {
    let m = T::from_count(n_users as u64);
    let slack = T::sum_tolerance() * m.clone();
    ensure!(
        coop_mean >= T::zero() && coop_mean <= m.clone() + slack.clone(),
        Argument,
        "mean coop count {coop_mean:?} outside [0, {n_users}]"
    );
    let cellular = m.clone() * (T::one() - model.cumulative_cached_prob(cached)?);
    let noncoop = m.clone() - coop_mean - cellular.clone();
    if noncoop < T::zero() {
        if -noncoop.clone() > slack {
            return Err(Error::Consistency(format!("mean non-coop count is negative ({noncoop:?})")));
        }
        return Ok((cellular, T::zero()));
    }
    Ok((cellular, noncoop))
}
