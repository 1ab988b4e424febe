//! Hit and cooperation probabilities, and the cluster-size search.
//!
//! The analytic search treats the number of clusters `B = M / K` as a real
//! number for every integer `K`. The simulator needs `B` to be a perfect
//! square so clusters tile the hotspot as a grid; [`ClusterPlan::grid_side`]
//! reports whether a plan qualifies.

use crate::catalog::PopularityModel;
use crate::error::{ensure, Result};
use crate::scalar::{powi, Real, Scalar};

/// Hotspot layout: `n_clusters` square cells of `users_per_cluster` users.
#[derive(Debug, Clone, PartialEq)]
pub struct ClusterPlan<F> {
    pub hotspot_side: F,
    pub n_clusters: usize,
    pub users_per_cluster: usize,
    pub cluster_side: F,
    pub n_users: usize,
}

impl<F: Real> ClusterPlan<F> {
    pub fn new(hotspot_side: F, n_users: usize, users_per_cluster: usize) -> Result<Self> {
        ensure!(hotspot_side > F::zero(), Config, "hotspot side must be positive");
        ensure!(users_per_cluster >= 1, Config, "clusters need at least one user");
        ensure!(
            n_users >= users_per_cluster && n_users.is_multiple_of(users_per_cluster),
            Config,
            "{n_users} users cannot be split into clusters of {users_per_cluster}"
        );
        let n_clusters = n_users / users_per_cluster;
        Ok(Self {
            hotspot_side,
            n_clusters,
            users_per_cluster,
            cluster_side: hotspot_side / F::from_count(n_clusters as u64).sqrt(),
            n_users,
        })
    }

    /// Cells per grid row when `n_clusters` is a perfect square.
    pub fn grid_side(&self) -> Option<usize> {
        perfect_square_root(self.n_clusters)
    }
}

pub fn perfect_square_root(n: usize) -> Option<usize> {
    let root = (n as f64).sqrt().round() as usize;
    (root * root == n).then_some(root)
}

/// Probability that a cluster of `users_per_cluster` users hits each of the
/// cached groups `0..users_per_cluster`.
pub fn hit_probability<T: Scalar>(model: &PopularityModel<T>, users_per_cluster: usize) -> Result<Vec<T>> {
    check_cluster_size(model, users_per_cluster)?;
    Ok(model.group_probs()[..users_per_cluster]
        .iter()
        .map(|p| T::one() - powi(&(T::one() - p.clone()), users_per_cluster))
        .collect())
}

/// Probability that at least one cached group is hit by all `n_clusters`
/// clusters, i.e. that the network can operate cooperatively.
pub fn coop_probability<F: Real>(model: &PopularityModel<F>, users_per_cluster: usize, n_clusters: F) -> Result<F> {
    ensure!(n_clusters >= F::one(), Argument, "need at least one cluster, got {n_clusters:?}");
    let hits = hit_probability(model, users_per_cluster)?;
    // 1 - h^B, evaluated through exp(B ln h) so large B cannot underflow h^B
    let miss_all: Vec<F> = hits
        .iter()
        .map(|&h| if h >= F::one() { F::zero() } else { -(n_clusters * h.ln()).exp_m1() })
        .collect();

    let tiny = F::lit(1e-300);
    let none_hit = if miss_all.iter().any(|&m| m < tiny) {
        if miss_all.iter().any(|&m| m <= F::zero()) {
            F::zero()
        } else {
            miss_all.iter().fold(F::zero(), |acc, m| acc + m.ln()).exp()
        }
    } else {
        miss_all.iter().fold(F::one(), |acc, &m| acc * m)
    };
    Ok(F::one() - none_hit)
}

/// Expected number of simultaneously active cooperative links, `B * P^c`,
/// with `B = n_users / users_per_cluster` taken as a real number.
pub fn expected_active_coop<F: Real>(model: &PopularityModel<F>, n_users: usize, users_per_cluster: usize) -> Result<F> {
    ensure!(users_per_cluster >= 1, Argument, "cluster size must be positive");
    let b = F::from_count(n_users as u64) / F::from_count(users_per_cluster as u64);
    Ok(b * coop_probability(model, users_per_cluster, b)?)
}

#[derive(Debug, Clone, PartialEq)]
pub struct ClusterSearch<F> {
    pub k_star: usize,
    pub objective: F,
    /// `(K, B * P^c)` for every candidate cluster size.
    pub profile: Vec<(usize, F)>,
}

/// Exhaustive search over `K in 1..=min(K0, M)` for the cluster size that
/// maximises the expected number of active cooperative links. Ties go to the
/// smaller cluster size.
pub fn optimize_cluster_size<F: Real>(model: &PopularityModel<F>, n_users: usize) -> Result<ClusterSearch<F>> {
    ensure!(n_users >= 1, Argument, "need at least one user");
    let k_max = model.group_count().min(n_users);
    let profile = (1..=k_max)
        .map(|k| Ok((k, expected_active_coop(model, n_users, k)?)))
        .collect::<Result<Vec<_>>>()?;

    let (k_star, objective) = profile
        .iter()
        .fold((0, F::neg_infinity()), |best, &(k, v)| if v > best.1 { (k, v) } else { best });
    Ok(ClusterSearch { k_star, objective, profile })
}

fn check_cluster_size<T: Scalar>(model: &PopularityModel<T>, users_per_cluster: usize) -> Result<()> {
    ensure!(
        (1..=model.group_count()).contains(&users_per_cluster),
        Argument,
        "cluster size {users_per_cluster} outside 1..={}",
        model.group_count()
    );
    Ok(())
}
