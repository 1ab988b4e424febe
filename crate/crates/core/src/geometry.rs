//! Link-distance densities and the path-gain moments built from them.
//!
//! Distances are normalised by the cluster side `D`. The signal link joins two
//! uniform points of the same unit square (square line picking); an
//! interference link joins a uniform point of the unit square to a uniform
//! point of an edge-adjacent unit square. All eight neighbouring clusters are
//! modelled with the edge-adjacent density.

use crate::error::{ensure, Error, MomentKind, Result};
use crate::quadrature::{integrate, Tolerance};
use crate::scalar::Real;

/// Density of the distance between two uniform points in a unit square.
pub fn signal_pdf<F: Real>(r: F) -> Result<F> {
    ensure!(r >= F::zero(), Argument, "distance must be non-negative, got {r:?}");
    let two = F::lit(2.0);
    let pi = F::PI();
    let v = if r < F::one() {
        two * r * (r * r - F::lit(4.0) * r + pi)
    } else if r < F::SQRT_2() {
        let eps = (r * r - F::one()).max(F::zero()).sqrt();
        two * r * (F::lit(4.0) * eps - (r * r + two) + pi - F::lit(4.0) * r.recip().acos())
    } else {
        F::zero()
    };
    Ok(v.max(F::zero()))
}

/// Density of the distance between a uniform point of `[0,1]^2` and a uniform
/// point of `[1,2] x [0,1]`.
pub fn interference_pdf<F: Real>(r: F) -> Result<F> {
    ensure!(r >= F::zero(), Argument, "distance must be non-negative, got {r:?}");
    let four = F::lit(4.0);
    let r2 = r * r;
    let eps = || (r2 - F::one()).max(F::zero()).sqrt();
    let v = if r < F::one() {
        F::lit(2.0) * r2 - r2 * r
    } else if r < F::SQRT_2() {
        F::lit(2.0) * r2 * r - four * r2 + F::lit(3.0) * r - four * r * eps() + four * r * r.recip().acos()
    } else if r < F::lit(2.0) {
        four * r * eps() + four * r * r.recip().asin() - r - four * r2
    } else if r < F::lit(5.0).sqrt() {
        let xi = (r2 - four).max(F::zero()).sqrt();
        -F::lit(5.0) * r - r2 * r + four * r * eps() + F::lit(2.0) * r * xi
            - four * r * ((F::lit(2.0) / r).acos() - r.recip().asin())
    } else {
        F::zero()
    };
    Ok(v.max(F::zero()))
}

/// Truncated moments of `r^-alpha` under the two densities.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GeometryTable<F> {
    pub alpha: F,
    /// Truncation radius in units of the cluster side.
    pub r_min: F,
    /// `E[r^-alpha]` over the signal density restricted to `r >= r_min`.
    pub signal_moment: F,
    /// `signal_moment + 8 * q2`.
    pub q1: F,
    /// `E[r^-alpha]` over the interference density restricted to `r >= r_min`.
    pub q2: F,
}

/// `integral_a^1 r^p dr`; `None` when it diverges at `a = 0`.
fn monomial_moment<F: Real>(p: F, a: F) -> Option<F> {
    let q = p + F::one();
    if a == F::zero() {
        return (q > F::zero()).then(|| q.recip());
    }
    if q.abs() < F::lit(1e-12) {
        Some(-a.ln())
    } else {
        Some((F::one() - a.powf(q)) / q)
    }
}

/// Evaluates `Q1(alpha)` and `Q2(alpha)`.
///
/// On `[r_min, 1)` both densities are polynomials, so that part is integrated
/// in closed form. The remaining pieces are smooth and go through adaptive
/// quadrature split at `1`, `sqrt(2)` and `2`.
pub fn path_gain_moments<F: Real>(alpha: F, r_min: F) -> Result<GeometryTable<F>> {
    ensure!(alpha >= F::zero() && alpha.is_finite(), Argument, "path-loss exponent must be finite and >= 0");
    ensure!(
        r_min >= F::zero() && r_min < F::SQRT_2(),
        Argument,
        "truncation radius must lie in [0, sqrt 2), got {r_min:?}"
    );
    let divergence = |kind| Error::Divergence { kind, alpha: alpha.to_f64_lossy() };

    let tol = Tolerance::default();
    let two = F::lit(2.0);
    let inner = r_min < F::one();

    let mut signal = F::zero();
    let mut interference = F::zero();
    if inner {
        let m = |p: F, kind| monomial_moment(p - alpha, r_min).ok_or_else(|| divergence(kind));
        signal = two * m(F::lit(3.0), MomentKind::Signal)? - F::lit(8.0) * m(two, MomentKind::Signal)?
            + two * F::PI() * m(F::one(), MomentKind::Signal)?;
        interference = two * m(two, MomentKind::Interference)? - m(F::lit(3.0), MomentKind::Interference)?;
    }

    let start = if inner { F::one() } else { r_min };
    let weighted = |pdf: fn(F) -> Result<F>| move |r: F| pdf(r).unwrap_or(F::zero()) * r.powf(-alpha);
    signal = signal + integrate(weighted(signal_pdf), start, F::SQRT_2(), &[], tol)?.value;
    interference = interference
        + integrate(weighted(interference_pdf), start, F::lit(5.0).sqrt(), &[F::SQRT_2(), two], tol)?.value;

    Ok(GeometryTable {
        alpha,
        r_min,
        signal_moment: signal,
        q1: signal + F::lit(8.0) * interference,
        q2: interference,
    })
}

/// `(r, g(r), f(r))` on an even grid over `[0, sqrt 5]`.
pub fn pdf_table<F: Real>(points: usize) -> Vec<[F; 3]> {
    let top = F::lit(5.0).sqrt();
    let last = F::from_count(points.saturating_sub(1).max(1) as u64);
    (0..points)
        .map(|i| {
            let r = top * F::from_count(i as u64) / last;
            [r, signal_pdf(r).unwrap_or(F::zero()), interference_pdf(r).unwrap_or(F::zero())]
        })
        .collect()
}
