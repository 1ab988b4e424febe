//! Small-scale fading, zero-forcing precoding and SINR evaluation.

use nalgebra::{Complex, DMatrix};
use rand::Rng;
use rand_distr::StandardNormal;

use super::schedule::{CoopTransmission, Link};
use crate::rates::RadioParams;

/// Condition number above which the weakest receiver is dropped.
pub const MAX_CONDITION: f64 = 1e8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum PowerConstraint {
    /// Each stream gets power `P`; total `n P` over the `n` transmitters.
    #[default]
    SumPower,
    /// Additionally no transmitter may exceed `P`; streams are scaled down
    /// together until the busiest one complies.
    PerTransmitter,
}

/// Unit-variance circularly symmetric complex Gaussian.
pub fn complex_gaussian<R: Rng + ?Sized>(rng: &mut R) -> Complex<f64> {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

pub fn distance(a: [f64; 2], b: [f64; 2], floor: f64) -> f64 {
    (a[0] - b[0]).hypot(a[1] - b[1]).max(floor)
}

#[derive(Debug, Clone, PartialEq)]
pub struct ZfOutcome {
    /// Receivers (row indices of the channel) that kept a stream.
    pub served: Vec<usize>,
    pub snr: Vec<f64>,
}

/// Zero-forcing over channel `h` (receivers by transmitters). The precoder is
/// the pseudo-inverse with unit-norm columns, so stream `i` reaches its
/// receiver with gain `1 / |w_i|^2` and no leakage elsewhere. Receivers are
/// dropped, weakest row first, while the condition number exceeds
/// [`MAX_CONDITION`]; `None` when nothing survives.
pub fn zf_snr(h: &DMatrix<Complex<f64>>, tx_power: f64, noise: f64, power: PowerConstraint) -> Option<ZfOutcome> {
    let mut served: Vec<usize> = (0..h.nrows()).collect();
    while !served.is_empty() && served.len() <= h.ncols() {
        let sub = h.select_rows(&served);
        let svd = sub.clone().svd(true, true);
        let sv = &svd.singular_values;
        let (lo, hi) = (sv.min(), sv.max());
        if lo > 0.0 && hi / lo <= MAX_CONDITION {
            let pinv = svd.pseudo_inverse(0.0).ok()?;
            let col_norms: Vec<f64> = pinv.column_iter().map(|c| c.norm_squared()).collect();
            let scale = match power {
                PowerConstraint::SumPower => 1.0,
                PowerConstraint::PerTransmitter => {
                    let busiest = pinv
                        .row_iter()
                        .map(|row| row.iter().zip(&col_norms).map(|(w, n)| w.norm_sqr() / n).sum::<f64>())
                        .fold(0.0, f64::max);
                    (1.0 / busiest).min(1.0)
                }
            };
            let snr = col_norms.iter().map(|n| scale * tx_power / (noise * n)).collect();
            return Some(ZfOutcome { served, snr });
        }
        let weakest = (0..served.len())
            .min_by(|&a, &b| sub.row(a).norm_squared().total_cmp(&sub.row(b).norm_squared()))
            .expect("non-empty");
        served.remove(weakest);
    }
    None
}

/// Per-receiver SINR for `gains[(i, j)]`, the received-power gain from
/// transmitter `j` to receiver `i` (fading included); receiver `i` listens to
/// transmitter `i`.
pub fn interference_sinr(gains: &DMatrix<f64>, tx_power: f64, noise: f64) -> Vec<f64> {
    (0..gains.nrows())
        .map(|i| {
            let total: f64 = gains.row(i).iter().sum();
            let signal = gains[(i, i)];
            tx_power * signal / (tx_power * (total - signal) + noise)
        })
        .collect()
}

/// Rates of the cooperative links in bits/s/Hz, with the indices of the
/// links that were served. `None` when zero-forcing fails entirely; a
/// transmission without receivers yields no rates.
pub fn zf_rates<R: Rng + ?Sized>(
    coop: &CoopTransmission,
    positions: &[[f64; 2]],
    radio: &RadioParams<f64>,
    min_distance: f64,
    power: PowerConstraint,
    rng: &mut R,
) -> Option<ZfOutcome> {
    if coop.links.is_empty() {
        return Some(ZfOutcome { served: Vec::new(), snr: Vec::new() });
    }
    let h = DMatrix::from_fn(coop.links.len(), coop.transmitters.len(), |i, j| {
        let d = distance(positions[coop.links[i].rx], positions[coop.transmitters[j]], min_distance);
        complex_gaussian(rng) * radio.path_gain(d).sqrt()
    });
    let mut out = zf_snr(&h, radio.tx_power_w(), radio.noise_w(), power)?;
    out.snr.iter_mut().for_each(|s| *s = s.ln_1p() / std::f64::consts::LN_2);
    Some(out)
}

/// Rates in bits/s/Hz of links sharing one band under Rayleigh fading, with
/// every other link interfering.
pub fn noncoop_rates<R: Rng + ?Sized>(
    links: &[Link],
    positions: &[[f64; 2]],
    radio: &RadioParams<f64>,
    min_distance: f64,
    rng: &mut R,
) -> Vec<f64> {
    let gains = DMatrix::from_fn(links.len(), links.len(), |i, j| {
        let d = distance(positions[links[i].rx], positions[links[j].tx], min_distance);
        radio.path_gain(d) * complex_gaussian(rng).norm_sqr()
    });
    interference_sinr(&gains, radio.tx_power_w(), radio.noise_w()).into_iter().map(|s| s.ln_1p() / std::f64::consts::LN_2).collect()
}
