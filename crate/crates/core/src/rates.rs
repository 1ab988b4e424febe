//! Closed-form average link rates and throughputs.
//!
//! Path gain at `d` metres is `10^(-intercept/10) * d^-alpha`, so the default
//! law `37.6 + 36.8 log10(d)` gives `alpha = 3.68`.

use log::warn;

use crate::error::{ensure, Error, Result};
use crate::geometry::GeometryTable;
use crate::scalar::Real;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RadioParams<F> {
    pub tx_power_dbm: F,
    pub noise_dbm: F,
    /// Path loss at 1 m, in dB.
    pub path_loss_intercept_db: F,
    pub alpha: F,
    pub bandwidth_hz: F,
}

impl<F: Real> RadioParams<F> {
    /// `slope_db_per_decade` is the coefficient of `log10(d)` in the path-loss
    /// law; the exponent is a tenth of it.
    pub fn new(tx_power_dbm: F, noise_dbm: F, intercept_db: F, slope_db_per_decade: F, bandwidth_hz: F) -> Result<Self> {
        ensure!(slope_db_per_decade >= F::zero(), Config, "path-loss slope must be non-negative");
        ensure!(bandwidth_hz > F::zero(), Config, "bandwidth must be positive");
        Ok(Self {
            tx_power_dbm,
            noise_dbm,
            path_loss_intercept_db: intercept_db,
            alpha: slope_db_per_decade / F::lit(10.0),
            bandwidth_hz,
        })
    }

    /// 20 dBm transmitters, -95 dBm noise, `37.6 + 36.8 log10(d)` and 20 MHz.
    pub fn reference() -> Self {
        Self {
            tx_power_dbm: F::lit(20.0),
            noise_dbm: F::lit(-95.0),
            path_loss_intercept_db: F::lit(37.6),
            alpha: F::lit(3.68),
            bandwidth_hz: F::lit(20e6),
        }
    }

    pub fn tx_power_w(&self) -> F {
        dbm_to_watts(self.tx_power_dbm)
    }

    pub fn noise_w(&self) -> F {
        dbm_to_watts(self.noise_dbm)
    }

    /// Linear attenuation at 1 m.
    pub fn intercept_linear(&self) -> F {
        F::lit(10.0).powf(self.path_loss_intercept_db / F::lit(10.0))
    }

    pub fn path_gain(&self, distance_m: F) -> F {
        distance_m.powf(-self.alpha) / self.intercept_linear()
    }
}

pub fn dbm_to_watts<F: Real>(dbm: F) -> F {
    F::lit(10.0).powf((dbm - F::lit(30.0)) / F::lit(10.0))
}

/// A first-order approximate rate. `value` is clamped at zero for throughput
/// composition; `raw` keeps the formula's own output.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinkRate<F> {
    pub raw: F,
    pub value: F,
}

/// Average rate of an interference-limited link per unit bandwidth:
/// `log2 Q1 - log2 Q2 - 3`.
pub fn noncoop_link_rate<F: Real>(geom: &GeometryTable<F>) -> Result<LinkRate<F>> {
    ensure!(
        geom.q1.is_finite() && geom.q2.is_finite() && geom.q2 > F::zero(),
        Argument,
        "path-gain moments must be finite with q2 > 0"
    );
    let raw = geom.q1.log2() - geom.q2.log2() - F::lit(3.0);
    if raw < F::zero() {
        warn!("non-cooperative rate approximation is negative ({raw:?}); clamping to zero");
    }
    Ok(LinkRate { raw, value: raw.max(F::zero()) })
}

/// Average rate of a zero-forced cooperative link per unit bandwidth:
/// `log2(1 + P D^-alpha Q1 / (L B sigma^2))`.
pub fn coop_link_rate<F: Real>(geom: &GeometryTable<F>, radio: &RadioParams<F>, cluster_side_m: F, n_clusters: F) -> Result<F> {
    ensure!(n_clusters >= F::one(), Argument, "need at least one cluster");
    ensure!(cluster_side_m > F::zero(), Argument, "cluster side must be positive");
    let snr = radio.tx_power_w() * radio.path_gain(cluster_side_m) * geom.q1 / (n_clusters * radio.noise_w());
    Ok(snr.ln_1p() / F::LN_2())
}

/// Whether the mean aggregate interference from the eight neighbours exceeds
/// `B * sigma^2`, which is sufficient for the cooperative rate to beat the
/// non-cooperative one.
pub fn interference_dominates<F: Real>(geom: &GeometryTable<F>, radio: &RadioParams<F>, cluster_side_m: F, n_clusters: F) -> bool {
    let mean_interference = radio.tx_power_w() * radio.path_gain(cluster_side_m) * F::lit(8.0) * geom.q2;
    mean_interference >= n_clusters * radio.noise_w()
}

/// Average network throughput `W B (pc eta rc + (1 - pc eta) rn)`.
pub fn network_throughput<F: Real>(pc: F, eta: F, rc: F, rn: F, bandwidth_hz: F, n_clusters: F) -> F {
    let coop_share = pc * eta;
    bandwidth_hz * n_clusters * (coop_share * rc + (F::one() - coop_share) * rn)
}

/// Average per-user throughputs `(coop, noncoop)` under round-robin service.
pub fn user_throughputs<F: Real>(eta: F, rc: F, rn: F, bandwidth_hz: F, n_clusters: F, coop_users: F, noncoop_users: F) -> Result<(F, F)> {
    if coop_users <= F::zero() || noncoop_users <= F::zero() {
        return Err(Error::DegeneratePopulation(format!(
            "mean user counts must be positive (coop {coop_users:?}, non-coop {noncoop_users:?})"
        )));
    }
    let band = bandwidth_hz * n_clusters;
    Ok((band * eta * rc / coop_users, band * (F::one() - eta) * rn / noncoop_users))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RateSummary<F> {
    pub rate_noncoop: LinkRate<F>,
    pub rate_coop: F,
    pub network_throughput: F,
    pub user_coop: Option<F>,
    pub user_noncoop: Option<F>,
    pub eta: F,
}

impl<F: Real> RateSummary<F> {
    #[allow(clippy::too_many_arguments)]
    pub fn evaluate(
        geom: &GeometryTable<F>,
        radio: &RadioParams<F>,
        cluster_side_m: F,
        n_clusters: F,
        pc: F,
        eta: F,
        coop_users: F,
        noncoop_users: F,
    ) -> Result<Self> {
        let rate_noncoop = noncoop_link_rate(geom)?;
        let rate_coop = coop_link_rate(geom, radio, cluster_side_m, n_clusters)?;
        let rn = rate_noncoop.value;
        let users = user_throughputs(eta, rate_coop, rn, radio.bandwidth_hz, n_clusters, coop_users, noncoop_users).ok();
        Ok(Self {
            rate_noncoop,
            rate_coop,
            network_throughput: network_throughput(pc, eta, rate_coop, rn, radio.bandwidth_hz, n_clusters),
            user_coop: users.map(|u| u.0),
            user_noncoop: users.map(|u| u.1),
            eta,
        })
    }
}
