//! Acceptance criteria 1-6. Prints one `[PASS]`/`[FAIL]` line per criterion
//! followed by the measured values, and exits non-zero if any criterion fails.

use std::path::Path;
use std::process::{Command, Stdio};

use d2d_coop::bandwidth::{grid_search_eta, optimize_eta, BandwidthProblem};
use d2d_coop::catalog::PopularityModel;
use d2d_coop::cluster::{coop_probability, optimize_cluster_size};
use d2d_coop::geometry::{interference_pdf, path_gain_moments, signal_pdf};
use d2d_coop::netsim::{run_campaign, Strategy};
use d2d_coop::population::{exact_coop_probability, expected_coop_users_exact, expected_coop_users_mc};
use d2d_coop::quadrature::{integrate, Tolerance};
use d2d_coop::sampling::{trial_rng, Stream};
use d2d_coop::{BigRational, Scalar};
use d2d_coop_cli::analysis::analyze;
use d2d_coop_cli::commands::compare_results;
use d2d_coop_cli::config::ExperimentSpec;
use rand::Rng;

const NORMALISATION_TOL: f64 = 1e-12;
const PDF_MASS_TOL: f64 = 1e-6;
const HISTOGRAM_SAMPLES: usize = 10_000_000;
const SIGNAL_BINS: usize = 16;
const SIGNAL_HIST_TOL: f64 = 5e-3;
const INTERFERENCE_BINS: usize = 40;
const INTERFERENCE_HIST_TOL: f64 = 1e-2;
const ZEROTH_MOMENT_TOL: f64 = 1e-6;

const MC_TRIALS: usize = 100_000;
const SE_MULTIPLE: f64 = 3.0;

const ETA_INSTANCES: usize = 1000;
const ETA_GRID_POINTS: usize = 100_000;
const ETA_TOL: f64 = 1e-4;
const LARGE_M: usize = 1_000_000;

const SNAPSHOTS: usize = 100_000;
const NONCOOP_RATE_TOL: f64 = 0.15;
const COOP_RATE_TOL: f64 = 0.20;

const GAIN_TRIALS: usize = 10_000;
const GAIN_HIGH_BETA: f64 = 4.0;
const GAIN_LOW_BETA: f64 = 1.3;

struct Outcome {
    passed: bool,
    lines: Vec<String>,
}

impl Outcome {
    fn new() -> Self {
        Self { passed: true, lines: Vec::new() }
    }

    fn check(&mut self, ok: bool, line: String) {
        self.passed &= ok;
        self.lines.push(format!("    {} {line}", if ok { "ok  " } else { "FAIL" }));
    }
}

fn mass(pdf: fn(f64) -> d2d_coop::Result<f64>, a: f64, b: f64) -> f64 {
    integrate(|r| pdf(r).unwrap(), a, b, &[1.0, 2f64.sqrt(), 2.0], Tolerance::default()).unwrap().value
}

/// Largest gap between the sampled and the bin-averaged density.
fn histogram_gap(pdf: fn(f64) -> d2d_coop::Result<f64>, dx: f64, upper: f64, bins: usize, seed: u64) -> f64 {
    let mut rng = trial_rng(seed, 0, Stream::Placement);
    let width = upper / bins as f64;
    let mut counts = vec![0usize; bins];
    for _ in 0..HISTOGRAM_SAMPLES {
        let (x0, y0, x1, y1): (f64, f64, f64, f64) = (rng.random(), rng.random(), rng.random(), rng.random());
        let r = (x1 + dx - x0).hypot(y1 - y0);
        counts[((r / width) as usize).min(bins - 1)] += 1;
    }
    counts
        .iter()
        .enumerate()
        .map(|(i, &c)| {
            let m = mass(pdf, i as f64 * width, (i + 1) as f64 * width);
            ((c as f64 / HISTOGRAM_SAMPLES as f64 - m) / width).abs()
        })
        .fold(0.0, f64::max)
}

fn criterion_1() -> Outcome {
    let mut o = Outcome::new();
    let worst = [0.0, 0.3, 0.6, 1.0, 1.5, 2.0]
        .iter()
        .map(|&beta| {
            let m = PopularityModel::<f64>::zipf(300, 20, beta).unwrap();
            (m.group_probs().iter().sum::<f64>() - 1.0).abs()
        })
        .fold(0.0, f64::max);
    o.check(worst <= NORMALISATION_TOL, format!("group probabilities sum to 1: worst error {worst:.2e}"));

    let g = mass(signal_pdf, 0.0, 2f64.sqrt());
    let f = mass(interference_pdf, 0.0, 5f64.sqrt());
    o.check(
        (g - 1.0).abs() <= PDF_MASS_TOL && (f - 1.0).abs() <= PDF_MASS_TOL,
        format!("density masses: signal {g:.12}, interference {f:.12}"),
    );

    let gap_g = histogram_gap(signal_pdf, 0.0, 2f64.sqrt(), SIGNAL_BINS, 101);
    o.check(gap_g <= SIGNAL_HIST_TOL, format!("signal histogram sup gap {gap_g:.2e} (tol {SIGNAL_HIST_TOL:.0e})"));
    let gap_f = histogram_gap(interference_pdf, 1.0, 5f64.sqrt(), INTERFERENCE_BINS, 102);
    o.check(
        gap_f <= INTERFERENCE_HIST_TOL,
        format!("interference histogram sup gap {gap_f:.2e} (tol {INTERFERENCE_HIST_TOL:.0e})"),
    );

    let zeroth = path_gain_moments(0.0f64, 0.0).unwrap();
    o.check(
        (zeroth.q1 - 9.0).abs() <= ZEROTH_MOMENT_TOL && (zeroth.q2 - 1.0).abs() <= ZEROTH_MOMENT_TOL,
        format!("Q1(0) = {:.9}, Q2(0) = {:.9}", zeroth.q1, zeroth.q2),
    );
    o
}

fn ratio(n: u64, d: u64) -> BigRational {
    BigRational::from_count(n) / BigRational::from_count(d)
}

fn rational_probs(groups: usize) -> Vec<BigRational> {
    match groups {
        1 => vec![ratio(1, 1)],
        2 => vec![ratio(3, 5), ratio(2, 5)],
        3 => vec![ratio(1, 2), ratio(1, 3), ratio(1, 6)],
        _ => unreachable!(),
    }
}

/// Enumerates every user's request and returns the exact mean coop count and
/// the probability that some cached group is requested in every cluster.
fn brute_force(probs: &[BigRational], k: usize, b: usize) -> (BigRational, BigRational) {
    let groups = probs.len();
    let users = k * b;
    let mut requests = vec![0usize; users];
    let mut mean = BigRational::from_count(0);
    let mut coop = BigRational::from_count(0);
    loop {
        let p = requests.iter().fold(BigRational::from_count(1), |acc, &g| acc * probs[g].clone());
        let mut count = 0u64;
        let mut any = false;
        for g in 0..k {
            let per_cluster: Vec<u64> =
                (0..b).map(|c| requests[c * k..(c + 1) * k].iter().filter(|&&r| r == g).count() as u64).collect();
            if per_cluster.iter().all(|&n| n > 0) {
                any = true;
                count += per_cluster.iter().sum::<u64>();
            }
        }
        mean += p.clone() * BigRational::from_count(count);
        if any {
            coop += p;
        }
        let mut i = 0;
        loop {
            if i == users {
                return (mean, coop);
            }
            requests[i] += 1;
            if requests[i] < groups {
                break;
            }
            requests[i] = 0;
            i += 1;
        }
    }
}

fn criterion_2() -> Outcome {
    let mut o = Outcome::new();
    let mut exact_cases = 0;
    let mut mismatches = Vec::new();
    let mut worst_z: f64 = 0.0;
    for groups in 1..=3 {
        let probs = rational_probs(groups);
        let model = PopularityModel::from_group_probs(groups * 20, 20, probs.clone()).unwrap();
        let float_model = model.map(|p| {
            let (n, d) = (p.numer().to_string().parse::<f64>().unwrap(), p.denom().to_string().parse::<f64>().unwrap());
            n / d
        });
        for k in 1..=groups {
            for b in 1..=3 {
                let (mean, any) = brute_force(&probs, k, b);
                let exact = expected_coop_users_exact(&model, k, b, u128::MAX).unwrap();
                let pc = exact_coop_probability(&model, k, b).unwrap();
                exact_cases += 1;
                if exact.coop_mean != mean || pc != any {
                    mismatches.push(format!("(K0={groups}, K={k}, B={b})"));
                }
                let mc = expected_coop_users_mc(&float_model, k, b, MC_TRIALS, 7 + exact_cases).unwrap();
                let exact_f = expected_coop_users_exact(&float_model, k, b, u128::MAX).unwrap().coop_mean;
                let diff = (mc.coop_mean - exact_f).abs();
                if diff > 0.0 {
                    worst_z = worst_z.max(diff / mc.std_error);
                }
                if diff > SE_MULTIPLE * mc.std_error {
                    mismatches.push(format!("MC (K0={groups}, K={k}, B={b}): {} vs {exact_f}", mc.coop_mean));
                }
            }
        }
    }
    o.check(
        mismatches.iter().all(|m| m.starts_with("MC")),
        format!("rational enumeration equals user-level brute force in {exact_cases} instances"),
    );
    o.check(
        !mismatches.iter().any(|m| m.starts_with("MC")),
        format!("Monte Carlo ({MC_TRIALS} trials) within {SE_MULTIPLE} SE: worst |z| = {worst_z:.2}"),
    );
    for m in mismatches {
        o.lines.push(format!("      mismatch {m}"));
    }
    o
}

fn criterion_3() -> Outcome {
    let mut o = Outcome::new();
    let mut rng = trial_rng(2024, 0, Stream::Scheduling);
    let mut worst: f64 = 0.0;
    let mut failures = 0;
    let mut infeasible = 0;
    for _ in 0..ETA_INSTANCES {
        let problem = BandwidthProblem {
            pc: rng.random_range(0.02..1.0),
            rc: rng.random_range(0.5..20.0),
            rn: rng.random_range(0.5..20.0),
            bandwidth_hz: 20e6,
            n_clusters: rng.random_range(1..=25) as f64,
            coop_users: rng.random_range(0.0..60.0),
            noncoop_users: rng.random_range(0.0..120.0),
            mu: 10f64.powf(rng.random_range(4.0..7.0)),
        };
        let s = optimize_eta(&problem);
        let ok = match grid_search_eta(&problem, ETA_GRID_POINTS) {
            Some((eta, value)) => {
                worst = worst.max((eta - s.eta_star).abs());
                let slope = problem.bandwidth_hz * problem.n_clusters * problem.pc * (problem.rc - problem.rn);
                let identified = slope.abs() * ETA_TOL > 1e-9 * s.objective;
                s.feasible && value <= s.objective * (1.0 + 1e-12) && (!identified || (eta - s.eta_star).abs() <= ETA_TOL)
            }
            None => {
                infeasible += 1;
                let (lo, hi) = problem.eta_bounds();
                !s.feasible || hi - lo < 1.0 / ETA_GRID_POINTS as f64
            }
        };
        failures += usize::from(!ok);
    }
    o.check(
        failures == 0,
        format!(
            "{ETA_INSTANCES} random instances: closed form vs {ETA_GRID_POINTS}-point grid, worst |d eta| = {worst:.2e}, {failures} failures, {infeasible} infeasible"
        ),
    );

    let mut argmax_ok = true;
    for beta in [0.0, 0.5, 1.0, 1.5] {
        let model = PopularityModel::<f64>::zipf(300, 20, beta).unwrap();
        for n_users in [30, 135, 300] {
            let s = optimize_cluster_size(&model, n_users).unwrap();
            let best = s.profile.iter().map(|p| p.1).fold(f64::MIN, f64::max);
            let first = s.profile.iter().find(|p| p.1 == best).unwrap().0;
            argmax_ok &= s.k_star == first && s.objective == best;
        }
    }
    o.check(argmax_ok, "K* is the first argmax of B P^c for every beta and M tried".into());

    let model = PopularityModel::<f64>::zipf(300, 20, 1.0).unwrap();
    let k_large = optimize_cluster_size(&model, LARGE_M).unwrap().k_star;
    let k_ref = optimize_cluster_size(&model, 135).unwrap().k_star;
    o.check(k_large == 15, format!("K* = {k_large} at M = {LARGE_M} (K* = {k_ref} at M = 135)"));
    o
}

fn criterion_4() -> Outcome {
    let mut o = Outcome::new();
    let spec = ExperimentSpec { trials: SNAPSHOTS, ..Default::default() };
    let k = 15;
    for beta in [0.0, 1.0] {
        let model = spec.popularity(beta).unwrap();
        let b = spec.plan(k).unwrap().n_clusters;
        let config = spec.sim_config(beta, k, Strategy::Coop { eta: 0.5 }).unwrap();
        let result = run_campaign(&config).unwrap();
        let n = (result.trials - result.discarded_trials) as f64;

        let pc = coop_probability(&model, k, b as f64).unwrap();
        let exact = exact_coop_probability(&model, k, b).unwrap();
        let se = (pc * (1.0 - pc) / n).sqrt();
        let se_exact = (exact * (1.0 - exact) / n).sqrt();
        let f = result.mode1_frequency;
        o.check(
            (f - pc).abs() <= SE_MULTIPLE * se,
            format!("beta={beta}: mode-1 frequency {f:.5} vs product form {pc:.5} (se {se:.1e}, z = {:.2})", (f - pc) / se.max(f64::MIN_POSITIVE)),
        );
        o.lines.push(format!(
            "         exact inclusion-exclusion probability {exact:.5}, z = {:.2}",
            (f - exact) / se_exact.max(f64::MIN_POSITIVE)
        ));

        let nc = expected_coop_users_exact(&model, k, b, u128::MAX).unwrap().coop_mean;
        let sim = result.mean_counts[0];
        let se = result.coop_count_se;
        o.check(
            (sim - nc).abs() <= SE_MULTIPLE * se,
            format!("beta={beta}: mean coop users {sim:.4} vs exact {nc:.4} (se {se:.2e})"),
        );
    }

    let beta = 1.0;
    let a = analyze(&spec, beta, k).unwrap();
    let nocoop = run_campaign(&spec.sim_config(beta, k, Strategy::NoCoop).unwrap()).unwrap();
    let coop = run_campaign(&spec.sim_config(beta, k, Strategy::Coop { eta: 1.0 }).unwrap()).unwrap();
    let rn = nocoop.mean_noncoop_rate.unwrap_or(f64::NAN);
    let rc = coop.mean_coop_rate.unwrap_or(f64::NAN);
    let rel_n = rn / a.rate_noncoop.value - 1.0;
    let rel_c = rc / a.rate_coop - 1.0;
    o.check(
        rel_n.abs() <= NONCOOP_RATE_TOL,
        format!("non-coop link rate {rn:.4} vs {:.4} ({:+.1}%, tol {:.0}%)", a.rate_noncoop.value, rel_n * 100.0, NONCOOP_RATE_TOL * 100.0),
    );
    o.check(
        rel_c.abs() <= COOP_RATE_TOL,
        format!("coop link rate {rc:.4} vs {:.4} ({:+.1}%, tol {:.0}%)", a.rate_coop, rel_c * 100.0, COOP_RATE_TOL * 100.0),
    );
    o
}

fn criterion_5() -> Outcome {
    let mut o = Outcome::new();
    let mut spec = ExperimentSpec { trials: GAIN_TRIALS, ..Default::default() };
    spec.sweep.beta = Some(vec![0.0, 0.6, 0.8, 1.0]);
    let rows = compare_results(&spec).unwrap();
    let get = |beta: f64, label: &str| &rows.iter().find(|r| r.beta == beta && r.label == label).unwrap().result;

    for (beta, target) in [(1.0, GAIN_HIGH_BETA), (0.0, GAIN_LOW_BETA)] {
        let gain = get(beta, "optimized").throughput_mean / get(beta, "nocoop").throughput_mean;
        o.check(gain >= target, format!("beta={beta}: optimized / no-coop = {gain:.3} (target >= {target})"));
    }
    for beta in [0.6, 0.8, 1.0] {
        let (opt, half, nocoop, tdma) = (get(beta, "optimized"), get(beta, "eta-0.5"), get(beta, "nocoop"), get(beta, "tdma"));
        let above = |hi: &d2d_coop::netsim::SimResult, lo: &d2d_coop::netsim::SimResult| {
            hi.throughput_mean - hi.throughput_ci95 > lo.throughput_mean + lo.throughput_ci95
        };
        o.check(
            above(opt, half) && above(half, nocoop) && above(half, tdma),
            format!(
                "beta={beta}: optimized {:.3e} > eta=0.5 {:.3e} > no-coop {:.3e}, tdma {:.3e} with disjoint 95% intervals",
                opt.throughput_mean, half.throughput_mean, nocoop.throughput_mean, tdma.throughput_mean
            ),
        );
    }
    o
}

fn run_cli(dir: &Path, name: &str, threads: usize, args: &[&str]) -> Vec<u8> {
    let out = dir.join(format!("{name}-{threads}.csv"));
    let status = Command::new(env!("CARGO_BIN_EXE_d2d-coop"))
        .args(args)
        .arg("--out")
        .arg(&out)
        .env("RAYON_NUM_THREADS", threads.to_string())
        .stderr(Stdio::null())
        .status()
        .expect("spawn d2d-coop");
    assert!(status.success(), "d2d-coop {args:?} failed");
    std::fs::read(out).unwrap()
}

fn criterion_6() -> Outcome {
    let mut o = Outcome::new();
    let dir = tempfile::tempdir().unwrap();
    let runs: [(&str, &[&str]); 4] = [
        ("compare", &["compare", "--trials", "400", "--beta", "0,1"]),
        ("simulate", &["simulate", "--trials", "300", "--beta", "0.5", "--strategy", "coop"]),
        ("tdma", &["simulate", "--trials", "300", "--beta", "1", "--strategy", "tdma"]),
        ("bandwidth", &["optimize-bandwidth", "--beta", "0,0.5,1"]),
    ];
    for (name, args) in runs {
        let one = run_cli(dir.path(), name, 1, args);
        let four = run_cli(dir.path(), name, 4, args);
        let again = run_cli(dir.path(), &format!("{name}-again"), 4, args);
        o.check(
            !one.is_empty() && one == four && four == again,
            format!("{name}: {} bytes identical across 1 and 4 threads and a rerun", one.len()),
        );
    }
    o
}

type Criterion = (usize, &'static str, fn() -> Outcome);

fn main() {
    let criteria: [Criterion; 6] = [
        (1, "catalog, distance densities and moments", criterion_1),
        (2, "exact and Monte Carlo user counts", criterion_2),
        (3, "bandwidth split and cluster size optimisation", criterion_3),
        (4, "simulator against the analytic model", criterion_4),
        (5, "throughput gains and strategy ordering", criterion_5),
        (6, "deterministic output", criterion_6),
    ];
    let mut failed = Vec::new();
    for (n, title, run) in criteria {
        let outcome = run();
        println!("[{}] criterion {n}: {title}", if outcome.passed { "PASS" } else { "FAIL" });
        for line in &outcome.lines {
            println!("{line}");
        }
        if !outcome.passed {
            failed.push(n);
        }
    }
    if !failed.is_empty() {
        println!("failed criteria: {failed:?}");
        std::process::exit(1);
    }
}
