//! Monte Carlo simulation of the clustered hotspot.
//!
//! Each trial drops users, draws requests, schedules links and evaluates
//! rates under Rayleigh fading. Trials are independent and draw from
//! per-trial random streams, so a campaign gives the same records on any
//! number of threads.

pub mod channel;
pub mod schedule;
pub mod snapshot;

use std::fmt;

use log::debug;
use rayon::prelude::*;

use crate::catalog::PopularityModel;
use crate::cluster::ClusterPlan;
use crate::error::{ensure, Result};
use crate::rates::RadioParams;
use crate::sampling::{trial_rng, Stream};

pub use channel::PowerConstraint;
pub use schedule::{BandUse, CoopTransmission, Link, Schedule};
pub use snapshot::{drop_snapshot, Role, Snapshot};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Strategy {
    /// Cooperative transmission on a fraction `eta` of the band whenever a
    /// group is hit by every cluster. `eta = 0` is the same as `NoCoop`.
    Coop { eta: f64 },
    /// One interference-limited D2D link per cluster on the whole band.
    NoCoop,
    /// Clusters colored on a `sqrt(reuse)`-periodic grid take turns on the
    /// whole band, one color per slot.
    Tdma { reuse: usize },
}

impl Strategy {
    pub fn eta(&self) -> f64 {
        match self {
            Strategy::Coop { eta } => *eta,
            _ => 0.0,
        }
    }
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Strategy::Coop { eta } => write!(f, "coop(eta={eta})"),
            Strategy::NoCoop => write!(f, "nocoop"),
            Strategy::Tdma { reuse } => write!(f, "tdma({reuse})"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Placement {
    /// `K` users uniform in each cluster cell.
    #[default]
    PerCell,
    /// All users uniform over the hotspot, split into equal-sized clusters by
    /// position.
    Uniform,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimConfig {
    pub plan: ClusterPlan<f64>,
    pub radio: RadioParams<f64>,
    pub popularity: PopularityModel<f64>,
    pub strategy: Strategy,
    pub trials: usize,
    pub seed: u64,
    /// Floor on every link distance, metres.
    pub min_pairing_distance_m: f64,
    pub placement: Placement,
    pub power: PowerConstraint,
}

impl SimConfig {
    pub fn new(
        plan: ClusterPlan<f64>,
        radio: RadioParams<f64>,
        popularity: PopularityModel<f64>,
        strategy: Strategy,
        trials: usize,
        seed: u64,
    ) -> Result<Self> {
        let config = Self {
            plan,
            radio,
            popularity,
            strategy,
            trials,
            seed,
            min_pairing_distance_m: 1.0,
            placement: Placement::default(),
            power: PowerConstraint::default(),
        };
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<()> {
        ensure!(
            self.plan.grid_side().is_some(),
            Config,
            "{} clusters do not form a square grid",
            self.plan.n_clusters
        );
        ensure!(
            (1..=self.popularity.group_count()).contains(&self.plan.users_per_cluster),
            Config,
            "cluster size {} outside 1..={}",
            self.plan.users_per_cluster,
            self.popularity.group_count()
        );
        ensure!(self.trials >= 1, Config, "need at least one trial");
        ensure!(
            self.min_pairing_distance_m > 0.0 && self.min_pairing_distance_m.is_finite(),
            Config,
            "minimum pairing distance must be positive"
        );
        match self.strategy {
            Strategy::Coop { eta } => ensure!((0.0..=1.0).contains(&eta), Config, "eta = {eta} outside [0, 1]"),
            Strategy::Tdma { reuse } => ensure!(
                reuse >= 1 && crate::cluster::perfect_square_root(reuse).is_some(),
                Config,
                "reuse factor {reuse} is not a perfect square"
            ),
            Strategy::NoCoop => {}
        }
        Ok(())
    }
}

/// Outcome of one trial. Throughputs are in bit/s, rate sums in bit/s/Hz.
#[derive(Debug, Clone, PartialEq)]
pub struct TrialRecord {
    pub trial: u64,
    pub mode: u8,
    pub throughput_bps: f64,
    pub n_coop: usize,
    pub n_noncoop: usize,
    pub n_cellular: usize,
    pub coop_band_bps: f64,
    pub noncoop_band_bps: f64,
    /// Users whose requests the non-cooperative band serves.
    pub noncoop_band_users: usize,
    pub coop_rate_sum: f64,
    pub coop_links: usize,
    pub noncoop_rate_sum: f64,
    pub noncoop_links: usize,
    pub silent_clusters: usize,
    /// Cooperative receivers dropped by the conditioning fallback.
    pub dropped_coop_links: usize,
    /// Zero-forcing failed outright; the trial is left out of every average.
    pub discarded: bool,
}

pub fn run_trial(config: &SimConfig, trial: u64) -> TrialRecord {
    let snap = drop_snapshot(config, trial);
    let mut sched_rng = trial_rng(config.seed, trial, Stream::Scheduling);
    let mut fading = trial_rng(config.seed, trial, Stream::Fading);
    let w = config.radio.bandwidth_hz;
    let floor = config.min_pairing_distance_m;
    let n_coop = snap.count(Role::Coop);
    let n_noncoop = snap.count(Role::Noncoop);

    let mut record = TrialRecord {
        trial,
        mode: snap.mode(),
        throughput_bps: 0.0,
        n_coop,
        n_noncoop,
        n_cellular: snap.count(Role::Cellular),
        coop_band_bps: 0.0,
        noncoop_band_bps: 0.0,
        noncoop_band_users: n_coop + n_noncoop,
        coop_rate_sum: 0.0,
        coop_links: 0,
        noncoop_rate_sum: 0.0,
        noncoop_links: 0,
        silent_clusters: 0,
        dropped_coop_links: 0,
        discarded: false,
    };

    let split = matches!(config.strategy, Strategy::Coop { eta } if eta > 0.0);
    let band = if split { BandUse::Split } else { BandUse::Shared };
    let plan = schedule::schedule(&snap, band, &mut sched_rng);
    record.silent_clusters = plan.silent_clusters(snap.n_clusters);

    let mut noncoop_share = 1.0;
    if let Some(coop) = &plan.coop {
        let eta = config.strategy.eta();
        record.noncoop_band_users = n_noncoop;
        match channel::zf_rates(coop, &snap.positions, &config.radio, floor, config.power, &mut fading) {
            Some(out) => {
                record.coop_rate_sum = out.snr.iter().sum();
                record.coop_links = out.served.len();
                record.dropped_coop_links = coop.links.len() - out.served.len();
                record.coop_band_bps = eta * w * record.coop_rate_sum;
            }
            None => {
                debug!("trial {trial}: zero-forcing failed, discarding");
                record.discarded = true;
                record.dropped_coop_links = coop.links.len();
                return record;
            }
        }
        noncoop_share = 1.0 - eta;
    }

    let (rate_sum, links, bps) = match config.strategy {
        Strategy::Tdma { reuse } => {
            let r = crate::cluster::perfect_square_root(reuse).expect("validated");
            let side = snap.n_clusters.isqrt();
            let color = |c: usize| (c / side % r) * r + c % side % r;
            let mut sum = 0.0;
            for slot in 0..reuse {
                let active: Vec<Link> = plan.noncoop.iter().copied().filter(|l| color(l.cluster) == slot).collect();
                sum += channel::noncoop_rates(&active, &snap.positions, &config.radio, floor, &mut fading).iter().sum::<f64>();
            }
            (sum, plan.noncoop.len(), w * sum / reuse as f64)
        }
        _ => {
            let rates = channel::noncoop_rates(&plan.noncoop, &snap.positions, &config.radio, floor, &mut fading);
            let sum: f64 = rates.iter().sum();
            (sum, rates.len(), noncoop_share * w * sum)
        }
    };
    record.noncoop_rate_sum = rate_sum;
    record.noncoop_links = links;
    record.noncoop_band_bps = bps;
    record.throughput_bps = record.coop_band_bps + record.noncoop_band_bps;
    record
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimResult {
    pub strategy: Strategy,
    pub trials: usize,
    pub discarded_trials: usize,
    pub throughput_mean: f64,
    /// Half-width of the normal 95% interval on the mean.
    pub throughput_ci95: f64,
    pub user_throughput_coop: Option<f64>,
    pub user_throughput_noncoop: Option<f64>,
    pub mode1_frequency: f64,
    /// Mean (coop, noncoop, cellular) user counts.
    pub mean_counts: [f64; 3],
    pub coop_count_se: f64,
    /// Mean rate per cooperative link, bit/s/Hz.
    pub mean_coop_rate: Option<f64>,
    pub mean_noncoop_rate: Option<f64>,
    pub mean_silent_clusters: f64,
    pub mean_dropped_coop_links: f64,
    pub records: Vec<TrialRecord>,
}

pub fn run_campaign(config: &SimConfig) -> Result<SimResult> {
    config.validate()?;
    let records: Vec<TrialRecord> = (0..config.trials as u64).into_par_iter().map(|t| run_trial(config, t)).collect();
    Ok(summarize(config.strategy, records))
}

fn summarize(strategy: Strategy, records: Vec<TrialRecord>) -> SimResult {
    let kept: Vec<&TrialRecord> = records.iter().filter(|r| !r.discarded).collect();
    let n = kept.len() as f64;
    let mean = |f: &dyn Fn(&TrialRecord) -> f64| kept.iter().map(|r| f(r)).sum::<f64>() / n;
    let ratio = |num: f64, den: f64| (den > 0.0).then(|| num / den);

    let (throughput_mean, throughput_se) = crate::sampling::mean_and_se(kept.iter().map(|r| r.throughput_bps));
    let (coop_mean, coop_count_se) = crate::sampling::mean_and_se(kept.iter().map(|r| r.n_coop as f64));
    let coop_links: usize = kept.iter().map(|r| r.coop_links).sum();
    let noncoop_links: usize = kept.iter().map(|r| r.noncoop_links).sum();

    SimResult {
        strategy,
        trials: records.len(),
        discarded_trials: records.len() - kept.len(),
        throughput_mean,
        throughput_ci95: if throughput_se.is_finite() { 1.96 * throughput_se } else { f64::INFINITY },
        user_throughput_coop: ratio(mean(&|r| r.coop_band_bps), coop_mean).filter(|_| strategy.eta() > 0.0),
        user_throughput_noncoop: ratio(mean(&|r| r.noncoop_band_bps), mean(&|r| r.noncoop_band_users as f64)),
        mode1_frequency: mean(&|r| f64::from(r.mode)),
        mean_counts: [coop_mean, mean(&|r| r.n_noncoop as f64), mean(&|r| r.n_cellular as f64)],
        coop_count_se,
        mean_coop_rate: ratio(kept.iter().map(|r| r.coop_rate_sum).sum(), coop_links as f64),
        mean_noncoop_rate: ratio(kept.iter().map(|r| r.noncoop_rate_sum).sum(), noncoop_links as f64),
        mean_silent_clusters: mean(&|r| r.silent_clusters as f64),
        mean_dropped_coop_links: mean(&|r| r.dropped_coop_links as f64),
        records,
    }
}
