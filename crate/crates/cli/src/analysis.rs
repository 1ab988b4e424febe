//! Analytic quantities shared by the commands.

use log::info;

use d2d_coop::bandwidth::{grid_search_eta, optimize_eta, BandwidthProblem, BandwidthSolution};
use d2d_coop::catalog::PopularityModel;
use d2d_coop::cluster::{coop_probability, optimize_cluster_size, perfect_square_root, ClusterSearch};
use d2d_coop::geometry::{path_gain_moments, GeometryTable};
use d2d_coop::population::{
    composition_count, expected_coop_users_exact, expected_coop_users_mc, Method, PopulationSummary,
};
use d2d_coop::rates::{coop_link_rate, noncoop_link_rate, LinkRate};

use crate::config::ExperimentSpec;
use crate::error::{CliError, CliResult};

/// Cluster sizes the simulator accepts: `K <= K0` with `M / K` a perfect
/// square.
pub fn grid_cluster_sizes(n_users: usize, group_count: usize) -> Vec<usize> {
    (1..=group_count.min(n_users))
        .filter(|k| n_users.is_multiple_of(*k) && perfect_square_root(n_users / k).is_some())
        .collect()
}

/// The analytic optimum `K*` and the cluster size used for simulation: the
/// configured one if set, else the grid-compatible size with the largest
/// analytic objective.
pub fn cluster_sizes(spec: &ExperimentSpec, model: &PopularityModel<f64>) -> CliResult<(ClusterSearch<f64>, usize)> {
    let n_users = spec.network.n_users;
    let search = optimize_cluster_size(model, n_users)?;
    if let Some(k) = spec.network.users_per_cluster {
        return Ok((search, k));
    }
    let candidates = grid_cluster_sizes(n_users, model.group_count());
    let k_sim = candidates
        .iter()
        .copied()
        .max_by(|&a, &b| search.profile[a - 1].1.total_cmp(&search.profile[b - 1].1).then(b.cmp(&a)))
        .ok_or_else(|| CliError::Config(format!("no cluster size splits {n_users} users into a square grid")))?;
    if k_sim != search.k_star {
        info!("K* = {} does not tile the hotspot; simulating K = {k_sim}", search.k_star);
    }
    Ok((search, k_sim))
}

/// Everything the bandwidth problem needs for one `(beta, K)`.
#[derive(Debug, Clone)]
pub struct Analysis {
    pub beta: f64,
    pub users_per_cluster: usize,
    pub n_clusters: usize,
    pub cluster_side_m: f64,
    pub geometry: GeometryTable<f64>,
    pub pc: f64,
    pub rate_noncoop: LinkRate<f64>,
    pub rate_coop: f64,
    pub population: PopulationSummary<f64>,
}

pub fn analyze(spec: &ExperimentSpec, beta: f64, users_per_cluster: usize) -> CliResult<Analysis> {
    let model = spec.popularity(beta)?;
    let radio = spec.radio()?;
    let plan = spec.plan(users_per_cluster)?;
    let b = plan.n_clusters as f64;
    let geometry = path_gain_moments(radio.alpha, spec.geometry.near_field_m / plan.cluster_side)?;
    let population = mean_users(spec, &model, users_per_cluster, plan.n_clusters)?;
    Ok(Analysis {
        beta,
        users_per_cluster,
        n_clusters: plan.n_clusters,
        cluster_side_m: plan.cluster_side,
        pc: coop_probability(&model, users_per_cluster, b)?,
        rate_noncoop: noncoop_link_rate(&geometry)?,
        rate_coop: coop_link_rate(&geometry, &radio, plan.cluster_side, b)?,
        geometry,
        population,
    })
}

/// Exact mean user counts when the per-cluster enumeration fits the budget,
/// Monte Carlo otherwise.
pub fn mean_users(
    spec: &ExperimentSpec,
    model: &PopularityModel<f64>,
    users_per_cluster: usize,
    n_clusters: usize,
) -> CliResult<PopulationSummary<f64>> {
    let budget = u128::from(spec.sim.enumeration_budget);
    if composition_count(users_per_cluster, model.group_count()) <= budget {
        return Ok(expected_coop_users_exact(model, users_per_cluster, n_clusters, budget)?);
    }
    Ok(expected_coop_users_mc(model, users_per_cluster, n_clusters, spec.sim.population_trials, spec.seed)?)
}

impl Analysis {
    pub fn problem(&self, spec: &ExperimentSpec, mu: f64) -> BandwidthProblem<f64> {
        BandwidthProblem {
            pc: self.pc,
            rc: self.rate_coop,
            rn: self.rate_noncoop.value,
            bandwidth_hz: spec.radio.bandwidth_hz,
            n_clusters: self.n_clusters as f64,
            coop_users: self.population.coop_mean,
            noncoop_users: self.population.noncoop_mean,
            mu,
        }
    }

    pub fn solve(&self, spec: &ExperimentSpec, mu: f64) -> BandwidthSolution<f64> {
        optimize_eta(&self.problem(spec, mu))
    }

    pub fn grid_eta(&self, spec: &ExperimentSpec, mu: f64) -> Option<(f64, f64)> {
        grid_search_eta(&self.problem(spec, mu), spec.bandwidth.grid_points)
    }
}

pub fn method_label(method: Method) -> &'static str {
    match method {
        Method::Exact => "exact",
        Method::MonteCarlo => "monte-carlo",
    }
}
