//! Zipf content popularity and file-group request probabilities.
//!
//! Files are ranked by popularity and split into `K0 = n_files / cache_size`
//! consecutive groups of `cache_size` files each. Group `k` (0-based here) is
//! the unit of cache placement: in every cluster exactly one user caches it.

use crate::error::{ensure, Result};
use crate::scalar::{Real, Scalar};

/// Catalog parameters together with the per-group request probabilities.
#[derive(Debug, Clone, PartialEq)]
pub struct PopularityModel<T> {
    n_files: usize,
    cache_size: usize,
    beta: Option<T>,
    group_probs: Vec<T>,
}

impl<T: Scalar> PopularityModel<T> {
    /// Builds a model from explicit group probabilities.
    ///
    /// Used for hypothetical catalogs and for exact rational arithmetic, where
    /// the Zipf weights themselves are irrational.
    pub fn from_group_probs(n_files: usize, cache_size: usize, group_probs: Vec<T>) -> Result<Self> {
        check_layout(n_files, cache_size)?;
        let groups = n_files / cache_size;
        ensure!(
            group_probs.len() == groups,
            Config,
            "expected {groups} group probabilities, got {}",
            group_probs.len()
        );
        ensure!(
            group_probs.iter().all(|p| *p > T::zero() && *p <= T::one()),
            Config,
            "group probabilities must lie in (0, 1]"
        );
        let total = group_probs.iter().fold(T::zero(), |acc, p| acc + p.clone());
        ensure!(
            (total.clone() - T::one()).abs() <= T::sum_tolerance(),
            Config,
            "group probabilities sum to {:?}, not 1",
            total
        );
        Ok(Self { n_files, cache_size, beta: None, group_probs })
    }

    pub fn n_files(&self) -> usize {
        self.n_files
    }

    pub fn cache_size(&self) -> usize {
        self.cache_size
    }

    /// Zipf exponent, when the model was built from one.
    pub fn beta(&self) -> Option<&T> {
        self.beta.as_ref()
    }

    /// Number of file groups, `K0`.
    pub fn group_count(&self) -> usize {
        self.group_probs.len()
    }

    /// Request probability of each file group, most popular first.
    pub fn group_probs(&self) -> &[T] {
        &self.group_probs
    }

    /// Probability that a single request falls in one of the first `cached`
    /// groups, i.e. can be served from some cache in the cluster.
    pub fn cumulative_cached_prob(&self, cached: usize) -> Result<T> {
        ensure!(
            (1..=self.group_count()).contains(&cached),
            Argument,
            "cached group count {cached} outside 1..={}",
            self.group_count()
        );
        if cached == self.group_count() {
            return Ok(T::one());
        }
        Ok(self.group_probs[..cached].iter().fold(T::zero(), |acc, p| acc + p.clone()))
    }

    pub fn map<U: Scalar>(&self, f: impl Fn(&T) -> U) -> PopularityModel<U> {
        PopularityModel {
            n_files: self.n_files,
            cache_size: self.cache_size,
            beta: self.beta.as_ref().map(&f),
            group_probs: self.group_probs.iter().map(f).collect(),
        }
    }
}

impl<F: Real> PopularityModel<F> {
    /// Zipf popularity with exponent `beta` over `n_files` ranked files.
    ///
    /// Harmonic-type sums are accumulated from the least popular file upward
    /// so the small terms are not swamped.
    pub fn zipf(n_files: usize, cache_size: usize, beta: F) -> Result<Self> {
        check_layout(n_files, cache_size)?;
        ensure!(beta >= F::zero() && beta.is_finite(), Config, "Zipf exponent must be finite and >= 0, got {beta:?}");
        let groups = n_files / cache_size;

        let weight = |rank: usize| F::from_count(rank as u64).powf(-beta);
        let group_sums: Vec<F> = (0..groups)
            .map(|k| {
                let first = k * cache_size + 1;
                (first..first + cache_size).rev().fold(F::zero(), |acc, j| acc + weight(j))
            })
            .collect();
        let total = group_sums.iter().rev().fold(F::zero(), |acc, &s| acc + s);
        let group_probs = group_sums.into_iter().map(|s| s / total).collect();

        Ok(Self { n_files, cache_size, beta: Some(beta), group_probs })
    }
}

fn check_layout(n_files: usize, cache_size: usize) -> Result<()> {
    ensure!(cache_size >= 1, Config, "cache size must be at least one file");
    ensure!(
        n_files >= cache_size,
        Config,
        "catalog of {n_files} files is smaller than the cache size {cache_size}"
    );
    ensure!(
        n_files.is_multiple_of(cache_size),
        Config,
        "catalog size {n_files} is not a multiple of the cache size {cache_size}"
    );
    Ok(())
}
