//! The experiment commands. Each writes one CSV table and returns a short
//! human-readable summary.

use std::io::Write;

use log::warn;

use d2d_coop::netsim::{run_campaign, SimResult, Strategy};

use crate::analysis::{analyze, cluster_sizes, grid_cluster_sizes, method_label};
use crate::config::ExperimentSpec;
use crate::error::CliResult;

pub const SCHEMA_VERSION: u32 = 1;

/// Starts a CSV table with a comment line naming the command and schema.
pub fn table<W: Write>(mut out: W, command: &str, header: &[&str]) -> CliResult<csv::Writer<W>> {
    writeln!(out, "# d2d-coop {command} schema={SCHEMA_VERSION}")?;
    let mut writer = csv::Writer::from_writer(out);
    writer.write_record(header)?;
    Ok(writer)
}

fn opt(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

pub fn optimize_cluster<W: Write>(spec: &ExperimentSpec, out: W) -> CliResult<String> {
    let mut csv = table(out, "optimize-cluster", &["beta", "n_users", "K", "B", "active_coop", "optimal"])?;
    let mut summary = String::new();
    for beta in spec.betas() {
        let model = spec.popularity(beta)?;
        for n_users in spec.user_counts() {
            let search = d2d_coop::cluster::optimize_cluster_size(&model, n_users)?;
            for &(k, value) in &search.profile {
                csv.write_record([
                    beta.to_string(),
                    n_users.to_string(),
                    k.to_string(),
                    (n_users as f64 / k as f64).to_string(),
                    value.to_string(),
                    u8::from(k == search.k_star).to_string(),
                ])?;
            }
            summary += &format!("beta={beta} M={n_users}: K*={} active={:.4}\n", search.k_star, search.objective);
        }
    }
    csv.flush()?;
    Ok(summary)
}

pub fn optimize_bandwidth<W: Write>(spec: &ExperimentSpec, out: W) -> CliResult<String> {
    let header = [
        "beta",
        "mu_bps",
        "k_star",
        "K",
        "B",
        "pc",
        "rate_coop",
        "rate_noncoop",
        "rate_noncoop_raw",
        "coop_users",
        "noncoop_users",
        "population_method",
        "eta_star",
        "eta_grid",
        "throughput_bps",
        "binding",
        "feasible",
        "mu_limit_bps",
    ];
    let mut csv = table(out, "optimize-bandwidth", &header)?;
    let mut summary = String::new();
    for beta in spec.betas() {
        let model = spec.popularity(beta)?;
        let (search, k) = cluster_sizes(spec, &model)?;
        let a = analyze(spec, beta, k)?;
        for mu in spec.mus() {
            let s = a.solve(spec, mu);
            let grid = a.grid_eta(spec, mu);
            csv.write_record([
                beta.to_string(),
                mu.to_string(),
                search.k_star.to_string(),
                k.to_string(),
                a.n_clusters.to_string(),
                a.pc.to_string(),
                a.rate_coop.to_string(),
                a.rate_noncoop.value.to_string(),
                a.rate_noncoop.raw.to_string(),
                a.population.coop_mean.to_string(),
                a.population.noncoop_mean.to_string(),
                method_label(a.population.method).to_string(),
                s.eta_star.to_string(),
                opt(grid.map(|g| g.0)),
                s.objective.to_string(),
                format!("{:?}", s.binding),
                s.feasible.to_string(),
                s.mu_limit.to_string(),
            ])?;
            summary += &format!(
                "beta={beta} mu={mu}: eta*={:.4} throughput={:.4e} bit/s{}\n",
                s.eta_star,
                s.objective,
                if s.feasible { "" } else { " (infeasible)" }
            );
        }
    }
    csv.flush()?;
    Ok(summary)
}

/// One simulated strategy in a throughput comparison.
#[derive(Debug, Clone)]
pub struct CompareRow {
    pub label: &'static str,
    pub beta: f64,
    pub mu: Option<f64>,
    pub users_per_cluster: usize,
    pub n_clusters: usize,
    pub result: SimResult,
}

/// Runs the optimized cooperative strategy, its fixed-`eta = 0.5` and
/// fixed-`K = 15` variants, and the two baselines for every `beta`.
pub fn compare_results(spec: &ExperimentSpec) -> CliResult<Vec<CompareRow>> {
    let mut rows = Vec::new();
    for beta in spec.betas() {
        let model = spec.popularity(beta)?;
        let (_, k) = cluster_sizes(spec, &model)?;
        let a = analyze(spec, beta, k)?;
        let fixed_k = 15;
        let fixed = (k != fixed_k && grid_cluster_sizes(spec.network.n_users, model.group_count()).contains(&fixed_k))
            .then(|| analyze(spec, beta, fixed_k))
            .transpose()?;
        let run = |label, mu, k: usize, strategy| -> CliResult<CompareRow> {
            let config = spec.sim_config(beta, k, strategy)?;
            let result = run_campaign(&config)?;
            Ok(CompareRow { label, beta, mu, users_per_cluster: k, n_clusters: config.plan.n_clusters, result })
        };

        for mu in spec.mus() {
            let s = a.solve(spec, mu);
            if !s.feasible {
                warn!("beta={beta} mu={mu}: throughput constraints infeasible, using eta={}", s.eta_star);
            }
            let optimized = run("optimized", Some(mu), k, Strategy::Coop { eta: s.eta_star })?;
            let at_fixed_k = match &fixed {
                Some(f) => Some(run("eta-star-k15", Some(mu), fixed_k, Strategy::Coop { eta: f.solve(spec, mu).eta_star })?),
                None if k == fixed_k => Some(CompareRow { label: "eta-star-k15", ..optimized.clone() }),
                None => None,
            };
            rows.push(optimized);
            rows.extend(at_fixed_k);
        }
        rows.push(run("eta-0.5", None, k, Strategy::Coop { eta: 0.5 })?);
        rows.push(run("nocoop", None, k, Strategy::NoCoop)?);
        rows.push(run("tdma", None, k, Strategy::Tdma { reuse: spec.sim.tdma_reuse })?);
    }
    Ok(rows)
}

pub fn compare<W: Write>(spec: &ExperimentSpec, out: W) -> CliResult<String> {
    let rows = compare_results(spec)?;
    let header = [
        "label",
        "strategy",
        "beta",
        "mu_bps",
        "K",
        "B",
        "trials",
        "discarded",
        "throughput_mean_bps",
        "throughput_ci95_bps",
        "mode1_frequency",
        "mean_coop_users",
        "mean_noncoop_users",
        "mean_cellular_users",
        "user_throughput_coop_bps",
        "user_throughput_noncoop_bps",
        "mean_coop_rate",
        "mean_noncoop_rate",
        "mean_silent_clusters",
    ];
    let mut csv = table(out, "compare", &header)?;
    for row in &rows {
        let r = &row.result;
        csv.write_record([
            row.label.to_string(),
            r.strategy.to_string(),
            row.beta.to_string(),
            opt(row.mu),
            row.users_per_cluster.to_string(),
            row.n_clusters.to_string(),
            r.trials.to_string(),
            r.discarded_trials.to_string(),
            r.throughput_mean.to_string(),
            r.throughput_ci95.to_string(),
            r.mode1_frequency.to_string(),
            r.mean_counts[0].to_string(),
            r.mean_counts[1].to_string(),
            r.mean_counts[2].to_string(),
            opt(r.user_throughput_coop),
            opt(r.user_throughput_noncoop),
            opt(r.mean_coop_rate),
            opt(r.mean_noncoop_rate),
            r.mean_silent_clusters.to_string(),
        ])?;
    }
    csv.flush()?;

    let mut summary = String::new();
    for beta in spec.betas() {
        let baseline = rows.iter().find(|r| r.beta == beta && r.label == "nocoop").map(|r| r.result.throughput_mean);
        for row in rows.iter().filter(|r| r.beta == beta && r.label == "optimized") {
            if let Some(base) = baseline {
                summary += &format!(
                    "beta={beta} mu={}: optimized/nocoop = {:.3}\n",
                    opt(row.mu),
                    row.result.throughput_mean / base
                );
            }
        }
    }
    Ok(summary)
}

/// Which strategy `simulate` runs; `eta` defaults to the optimum.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SimulateStrategy {
    Coop(Option<f64>),
    NoCoop,
    Tdma,
}

pub fn simulate<W: Write>(spec: &ExperimentSpec, strategy: SimulateStrategy, k: Option<usize>, out: W) -> CliResult<String> {
    let header = ["strategy", "beta", "K", "B", "eta", "trial", "mode", "throughput_bps", "n_coop", "n_noncoop", "n_cellular"];
    let mut csv = table(out, "simulate", &header)?;
    let mut summary = String::new();
    for beta in spec.betas() {
        let model = spec.popularity(beta)?;
        let k = match k {
            Some(k) => k,
            None => cluster_sizes(spec, &model)?.1,
        };
        let strategy = match strategy {
            SimulateStrategy::Coop(Some(eta)) => Strategy::Coop { eta },
            SimulateStrategy::Coop(None) => {
                let mu = spec.mus()[0];
                Strategy::Coop { eta: analyze(spec, beta, k)?.solve(spec, mu).eta_star }
            }
            SimulateStrategy::NoCoop => Strategy::NoCoop,
            SimulateStrategy::Tdma => Strategy::Tdma { reuse: spec.sim.tdma_reuse },
        };
        let config = spec.sim_config(beta, k, strategy)?;
        let result = run_campaign(&config)?;
        let label = strategy.to_string();
        for r in &result.records {
            csv.write_record([
                label.clone(),
                beta.to_string(),
                k.to_string(),
                config.plan.n_clusters.to_string(),
                strategy.eta().to_string(),
                r.trial.to_string(),
                r.mode.to_string(),
                if r.discarded { String::new() } else { r.throughput_bps.to_string() },
                r.n_coop.to_string(),
                r.n_noncoop.to_string(),
                r.n_cellular.to_string(),
            ])?;
        }
        summary += &format!(
            "{label} beta={beta} K={k}: throughput {:.4e} +/- {:.2e} bit/s, mode-1 frequency {:.4}, discarded {}\n",
            result.throughput_mean, result.throughput_ci95, result.mode1_frequency, result.discarded_trials
        );
    }
    csv.flush()?;
    Ok(summary)
}

pub fn pdf_table<W: Write>(points: usize, out: W) -> CliResult<()> {
    let mut csv = table(out, "pdf-table", &["r", "signal_pdf", "interference_pdf"])?;
    for [r, g, f] in d2d_coop::geometry::pdf_table::<f64>(points) {
        csv.write_record([r.to_string(), g.to_string(), f.to_string()])?;
    }
    csv.flush()?;
    Ok(())
}
