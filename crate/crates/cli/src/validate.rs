//! Self-checks of the analytic model and the simulator against each other.

use std::fmt::Write as _;

use d2d_coop::cluster::coop_probability;
use d2d_coop::geometry::{interference_pdf, path_gain_moments, signal_pdf};
use d2d_coop::netsim::{run_campaign, Strategy};
use d2d_coop::population::{
    exact_coop_probability, expected_coop_users_exact, expected_coop_users_mc, MAX_EXACT_SUBSET_GROUPS,
};
use d2d_coop::quadrature::{integrate, Tolerance};

use crate::analysis::{analyze, cluster_sizes};
use crate::config::ExperimentSpec;
use crate::error::{CliError, CliResult};

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: String,
    /// `None` for informational lines that cannot fail.
    pub passed: Option<bool>,
    pub detail: String,
}

impl Check {
    fn new(name: impl Into<String>, passed: bool, detail: String) -> Self {
        Self { name: name.into(), passed: Some(passed), detail }
    }

    fn info(name: impl Into<String>, detail: String) -> Self {
        Self { name: name.into(), passed: None, detail }
    }
}

pub fn run_checks(spec: &ExperimentSpec) -> CliResult<Vec<Check>> {
    let mut checks = Vec::new();

    for beta in spec.betas() {
        let model = spec.popularity(beta)?;
        let total: f64 = model.group_probs().iter().sum();
        checks.push(Check::new(
            format!("catalog normalisation beta={beta}"),
            (total - 1.0).abs() < 1e-12,
            format!("sum = {total}"),
        ));
    }

    let breaks = [1.0, 2f64.sqrt(), 2.0];
    for (name, pdf, upper) in [
        ("signal density", signal_pdf::<f64> as fn(f64) -> d2d_coop::Result<f64>, 2f64.sqrt()),
        ("interference density", interference_pdf::<f64>, 5f64.sqrt()),
    ] {
        let mass = integrate(|r| pdf(r).unwrap_or(f64::NAN), 0.0, upper, &breaks, Tolerance::default())?.value;
        checks.push(Check::new(format!("{name} integrates to 1"), (mass - 1.0).abs() < 1e-6, format!("{mass}")));
    }
    let zeroth = path_gain_moments(0.0f64, 0.0)?;
    checks.push(Check::new(
        "zeroth moments Q1(0) = 9, Q2(0) = 1",
        (zeroth.q1 - 9.0).abs() < 1e-6 && (zeroth.q2 - 1.0).abs() < 1e-6,
        format!("Q1 = {}, Q2 = {}", zeroth.q1, zeroth.q2),
    ));

    // small exchangeable instance: enumeration, Monte Carlo and subset sums
    let small = d2d_coop::catalog::PopularityModel::<f64>::zipf(60, 20, 0.8)?;
    let exact = expected_coop_users_exact(&small, 3, 3, u128::MAX)?;
    let mc = expected_coop_users_mc(&small, 3, 3, 100_000, spec.seed)?;
    checks.push(Check::new(
        "coop users: Monte Carlo vs enumeration",
        (mc.coop_mean - exact.coop_mean).abs() < 3.0 * mc.std_error,
        format!("{} vs {} (se {:.3e})", mc.coop_mean, exact.coop_mean, mc.std_error),
    ));

    for beta in spec.betas() {
        let model = spec.popularity(beta)?;
        let (search, k) = cluster_sizes(spec, &model)?;
        let argmax = search.profile.iter().map(|p| p.1).fold(f64::MIN, f64::max);
        checks.push(Check::new(
            format!("K* is the profile argmax beta={beta}"),
            search.objective == argmax && search.profile[search.k_star - 1].1 == argmax,
            format!("K* = {}, simulated K = {k}", search.k_star),
        ));

        let a = analyze(spec, beta, k)?;
        for mu in spec.mus() {
            let s = a.solve(spec, mu);
            let grid = a.grid_eta(spec, mu);
            let agree = match grid {
                Some((eta, value)) => {
                    let flat = a.rate_coop == a.rate_noncoop.value;
                    (flat || (eta - s.eta_star).abs() < 1e-4) && value <= s.objective * (1.0 + 1e-12)
                }
                None => !s.feasible,
            };
            checks.push(Check::new(
                format!("eta* matches grid search beta={beta} mu={mu}"),
                agree,
                format!("closed form {}, grid {:?}", s.eta_star, grid.map(|g| g.0)),
            ));
        }

        let config = spec.sim_config(beta, k, Strategy::Coop { eta: 0.5 })?;
        let result = run_campaign(&config)?;
        let n = (result.trials - result.discarded_trials) as f64;
        let b = config.plan.n_clusters;
        let conserved = result.records.iter().all(|r| r.n_coop + r.n_noncoop + r.n_cellular == spec.network.n_users);
        checks.push(Check::new(format!("user counts conserved beta={beta}"), conserved, String::new()));

        let pc = coop_probability(&model, k, b as f64)?;
        let binomial_se = |p: f64| (p * (1.0 - p) / n).sqrt();
        let mut detail = format!("simulated {} vs product form {pc}", result.mode1_frequency);
        if k <= MAX_EXACT_SUBSET_GROUPS {
            let p = exact_coop_probability(&model, k, b)?;
            let _ = write!(detail, ", exact {p}");
        }
        checks.push(Check::new(
            format!("mode-1 frequency matches P^c beta={beta}"),
            (result.mode1_frequency - pc).abs() <= 3.0 * binomial_se(pc),
            detail,
        ));
        checks.push(Check::new(
            format!("mean coop users match beta={beta}"),
            (result.mean_counts[0] - a.population.coop_mean).abs()
                <= 3.0 * result.coop_count_se.hypot(a.population.std_error),
            format!("simulated {} vs {}", result.mean_counts[0], a.population.coop_mean),
        ));
        let full_sets = result.records.iter().filter(|r| r.mode == 1 && r.coop_links + r.dropped_coop_links == b).count();
        let mode1 = result.records.iter().filter(|r| r.mode == 1).count();
        checks.push(Check::info(
            format!("cooperative receivers beta={beta}"),
            format!("{full_sets} of {mode1} mode-1 trials serve all {b} clusters"),
        ));

        let nocoop = run_campaign(&spec.sim_config(beta, k, Strategy::NoCoop)?)?;
        let tdma = run_campaign(&spec.sim_config(beta, k, Strategy::Tdma { reuse: spec.sim.tdma_reuse })?)?;
        checks.push(Check::new(
            format!("baselines run and differ beta={beta}"),
            nocoop.throughput_mean > 0.0 && tdma.throughput_mean > 0.0 && nocoop.throughput_mean != tdma.throughput_mean,
            format!("nocoop {:.4e}, tdma {:.4e}", nocoop.throughput_mean, tdma.throughput_mean),
        ));
        checks.push(Check::info(
            format!("link rates beta={beta}"),
            format!(
                "non-coop simulated {:?} vs first order {:.4}; coop simulated {:?} vs first order {:.4}",
                nocoop.mean_noncoop_rate, a.rate_noncoop.value, result.mean_coop_rate, a.rate_coop
            ),
        ));

        let single = rayon::ThreadPoolBuilder::new()
            .num_threads(1)
            .build()
            .map_err(|e| CliError::Config(e.to_string()))?
            .install(|| run_campaign(&config))?;
        checks.push(Check::new(format!("thread-count independence beta={beta}"), single == result, String::new()));
    }
    Ok(checks)
}

/// Formats the checks and fails when any of them did.
pub fn report(checks: &[Check]) -> (String, usize) {
    let mut out = String::new();
    let mut failed = 0;
    for c in checks {
        let tag = match c.passed {
            Some(true) => "PASS",
            Some(false) => {
                failed += 1;
                "FAIL"
            }
            None => "INFO",
        };
        let _ = writeln!(out, "[{tag}] {}{}", c.name, if c.detail.is_empty() { String::new() } else { format!(": {}", c.detail) });
    }
    (out, failed)
}
