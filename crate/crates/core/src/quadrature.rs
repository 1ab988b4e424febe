//! Globally adaptive 7/15-point Gauss-Kronrod quadrature.
//!
//! Integration ranges can be pre-split at known breakpoints so that piecewise
//! integrands are smooth on every initial panel.

use crate::error::{Error, Result};
use crate::scalar::Real;

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_5,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_48,
    0.0,
];

const WGK: [f64; 8] = [
    0.022_935_322_010_529_224,
    0.063_092_092_629_978_56,
    0.104_790_010_322_250_19,
    0.140_653_259_715_525_92,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_42,
    0.204_432_940_075_298_89,
    0.209_482_141_084_727_82,
];

// Gauss weights for the odd-indexed Kronrod nodes (the last one is the centre).
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_64,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

#[derive(Debug, Clone, Copy)]
pub struct Tolerance<F> {
    pub abs: F,
    pub rel: F,
    pub max_panels: usize,
}

impl<F: Real> Default for Tolerance<F> {
    fn default() -> Self {
        // loosened for single precision, where 1e-9 is below rounding noise
        let eps = F::epsilon();
        Self { abs: F::lit(1e-9).max(eps * F::lit(1e3)), rel: F::lit(1e-12).max(eps * F::lit(1e2)), max_panels: 20_000 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Integral<F> {
    pub value: F,
    pub error: F,
    pub panels: usize,
}

#[derive(Debug, Clone, Copy)]
struct Panel<F> {
    a: F,
    b: F,
    value: F,
    error: F,
}

fn kronrod<F: Real>(f: &impl Fn(F) -> F, a: F, b: F) -> Panel<F> {
    let half = F::lit(0.5);
    let centre = half * (a + b);
    let radius = half * (b - a);
    let fc = f(centre);
    let mut kron = fc * F::lit(WGK[7]);
    let mut gauss = fc * F::lit(WG[3]);
    for j in 0..7 {
        let dx = radius * F::lit(XGK[j]);
        let pair = f(centre - dx) + f(centre + dx);
        kron = kron + F::lit(WGK[j]) * pair;
        if j % 2 == 1 {
            gauss = gauss + F::lit(WG[j / 2]) * pair;
        }
    }
    Panel { a, b, value: kron * radius, error: ((kron - gauss) * radius).abs() }
}

/// Integrates `f` over `[a, b]`, splitting first at every breakpoint that falls
/// strictly inside the range.
pub fn integrate<F: Real>(f: impl Fn(F) -> F, a: F, b: F, breakpoints: &[F], tol: Tolerance<F>) -> Result<Integral<F>> {
    if b <= a {
        return Ok(Integral { value: F::zero(), error: F::zero(), panels: 0 });
    }
    let mut edges = vec![a];
    edges.extend(breakpoints.iter().copied().filter(|&x| x > a && x < b));
    edges.push(b);
    let mut panels: Vec<Panel<F>> = edges.windows(2).map(|w| kronrod(&f, w[0], w[1])).collect();

    loop {
        let value = panels.iter().fold(F::zero(), |s, p| s + p.value);
        let error = panels.iter().fold(F::zero(), |s, p| s + p.error);
        let target = tol.abs.max(tol.rel * value.abs());
        if error <= target {
            return Ok(Integral { value, error, panels: panels.len() });
        }
        let (worst, _) = panels
            .iter()
            .enumerate()
            .fold((0, F::neg_infinity()), |best, (i, p)| if p.error > best.1 { (i, p.error) } else { best });
        let p = panels.swap_remove(worst);
        let mid = F::lit(0.5) * (p.a + p.b);
        if panels.len() + 2 > tol.max_panels || !(mid > p.a && mid < p.b) {
            return Err(Error::Quadrature { a: a.to_f64_lossy(), b: b.to_f64_lossy(), error: error.to_f64_lossy() });
        }
        panels.push(kronrod(&f, p.a, mid));
        panels.push(kronrod(&f, mid, p.b));
    }
}
