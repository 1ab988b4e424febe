//! Experiment configuration: a TOML file whose every field defaults to the
//! reference scenario, plus command-line overrides.

use std::path::Path;

use serde::Deserialize;

use d2d_coop::catalog::PopularityModel;
use d2d_coop::cluster::ClusterPlan;
use d2d_coop::netsim::{Placement, PowerConstraint, SimConfig, Strategy};
use d2d_coop::rates::RadioParams;

use crate::error::{CliError, CliResult};

pub const DEFAULT_SEED: u64 = 20_160_314;

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ExperimentSpec {
    pub seed: u64,
    /// Snapshots per simulated campaign.
    pub trials: usize,
    pub catalog: CatalogSection,
    pub network: NetworkSection,
    pub radio: RadioSection,
    pub geometry: GeometrySection,
    pub bandwidth: BandwidthSection,
    pub sim: SimSection,
    pub sweep: SweepSection,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct CatalogSection {
    pub n_files: usize,
    pub cache_size: usize,
    pub beta: f64,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct NetworkSection {
    pub hotspot_side_m: f64,
    pub n_users: usize,
    /// Fixed cluster size for simulation; chosen automatically when absent.
    pub users_per_cluster: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RadioSection {
    pub tx_power_dbm: f64,
    pub noise_dbm: f64,
    pub path_loss_intercept_db: f64,
    /// Coefficient of `log10(d)` in the path-loss law.
    pub path_loss_slope_db: f64,
    pub bandwidth_hz: f64,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GeometrySection {
    /// Distances below this are excluded from the analytic moments and
    /// floored in the simulator.
    pub near_field_m: f64,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct BandwidthSection {
    pub mu_bps: f64,
    pub grid_points: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PlacementChoice {
    PerCell,
    Uniform,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PowerChoice {
    Sum,
    PerTransmitter,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SimSection {
    pub placement: PlacementChoice,
    pub power: PowerChoice,
    pub tdma_reuse: usize,
    /// Monte Carlo draws for the mean user counts when exact enumeration is
    /// over budget.
    pub population_trials: usize,
    pub enumeration_budget: u64,
}

/// Values swept by the commands; an absent axis means the base value.
#[derive(Debug, Clone, PartialEq, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSection {
    pub beta: Option<Vec<f64>>,
    pub mu_bps: Option<Vec<f64>>,
    pub n_users: Option<Vec<usize>>,
}

impl Default for ExperimentSpec {
    fn default() -> Self {
        Self {
            seed: DEFAULT_SEED,
            trials: 10_000,
            catalog: CatalogSection::default(),
            network: NetworkSection::default(),
            radio: RadioSection::default(),
            geometry: GeometrySection::default(),
            bandwidth: BandwidthSection::default(),
            sim: SimSection::default(),
            sweep: SweepSection::default(),
        }
    }
}

impl Default for CatalogSection {
    fn default() -> Self {
        Self { n_files: 300, cache_size: 20, beta: 1.0 }
    }
}

impl Default for NetworkSection {
    fn default() -> Self {
        Self { hotspot_side_m: 75.0, n_users: 135, users_per_cluster: None }
    }
}

impl Default for RadioSection {
    fn default() -> Self {
        Self { tx_power_dbm: 20.0, noise_dbm: -95.0, path_loss_intercept_db: 37.6, path_loss_slope_db: 36.8, bandwidth_hz: 20e6 }
    }
}

impl Default for GeometrySection {
    fn default() -> Self {
        Self { near_field_m: 1.0 }
    }
}

impl Default for BandwidthSection {
    fn default() -> Self {
        Self { mu_bps: 1e6, grid_points: 100_000 }
    }
}

impl Default for SimSection {
    fn default() -> Self {
        Self {
            placement: PlacementChoice::PerCell,
            power: PowerChoice::Sum,
            tdma_reuse: 4,
            population_trials: 100_000,
            enumeration_budget: d2d_coop::population::DEFAULT_ENUMERATION_BUDGET as u64,
        }
    }
}

impl ExperimentSpec {
    pub fn load(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> CliResult<Self> {
        let spec: Self = toml::from_str(text)?;
        spec.validate()?;
        Ok(spec)
    }

    /// Checks the fields the model constructors do not.
    pub fn validate(&self) -> CliResult<()> {
        let bad = |msg: String| Err(CliError::Config(msg));
        if self.trials == 0 {
            return bad("trials must be at least 1".into());
        }
        if !(self.geometry.near_field_m >= 0.0) {
            return bad("near_field_m must be non-negative".into());
        }
        if !(self.bandwidth.mu_bps >= 0.0) {
            return bad("mu_bps must be non-negative".into());
        }
        if self.bandwidth.grid_points == 0 || self.sim.population_trials == 0 {
            return bad("grid_points and population_trials must be positive".into());
        }
        for (name, empty) in [
            ("beta", self.sweep.beta.as_ref().is_some_and(Vec::is_empty)),
            ("mu_bps", self.sweep.mu_bps.as_ref().is_some_and(Vec::is_empty)),
            ("n_users", self.sweep.n_users.as_ref().is_some_and(Vec::is_empty)),
        ] {
            if empty {
                return bad(format!("sweep axis {name} has no values"));
            }
        }
        if self.betas().iter().any(|b| !(*b >= 0.0)) || self.mus().iter().any(|m| !(*m >= 0.0)) {
            return bad("beta and mu values must be non-negative".into());
        }
        self.popularity(self.catalog.beta)?;
        self.radio()?;
        Ok(())
    }

    pub fn betas(&self) -> Vec<f64> {
        self.sweep.beta.clone().unwrap_or_else(|| vec![self.catalog.beta])
    }

    pub fn mus(&self) -> Vec<f64> {
        self.sweep.mu_bps.clone().unwrap_or_else(|| vec![self.bandwidth.mu_bps])
    }

    pub fn user_counts(&self) -> Vec<usize> {
        self.sweep.n_users.clone().unwrap_or_else(|| vec![self.network.n_users])
    }

    pub fn popularity(&self, beta: f64) -> CliResult<PopularityModel<f64>> {
        Ok(PopularityModel::zipf(self.catalog.n_files, self.catalog.cache_size, beta)?)
    }

    pub fn radio(&self) -> CliResult<RadioParams<f64>> {
        let r = &self.radio;
        Ok(RadioParams::new(r.tx_power_dbm, r.noise_dbm, r.path_loss_intercept_db, r.path_loss_slope_db, r.bandwidth_hz)?)
    }

    pub fn plan(&self, users_per_cluster: usize) -> CliResult<ClusterPlan<f64>> {
        Ok(ClusterPlan::new(self.network.hotspot_side_m, self.network.n_users, users_per_cluster)?)
    }

    pub fn sim_config(&self, beta: f64, users_per_cluster: usize, strategy: Strategy) -> CliResult<SimConfig> {
        let mut config =
            SimConfig::new(self.plan(users_per_cluster)?, self.radio()?, self.popularity(beta)?, strategy, self.trials, self.seed)?;
        config.min_pairing_distance_m = self.geometry.near_field_m.max(f64::MIN_POSITIVE);
        config.placement = match self.sim.placement {
            PlacementChoice::PerCell => Placement::PerCell,
            PlacementChoice::Uniform => Placement::Uniform,
        };
        config.power = match self.sim.power {
            PowerChoice::Sum => PowerConstraint::SumPower,
            PowerChoice::PerTransmitter => PowerConstraint::PerTransmitter,
        };
        config.validate()?;
        Ok(config)
    }
}
