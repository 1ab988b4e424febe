//! Bandwidth split between the cooperative and non-cooperative bands.
//!
//! The network throughput `W B (pc eta rc + (1 - pc eta) rn)` is affine in
//! `eta`, so the optimum sits on a boundary of the feasible interval
//!
//! ```text
//! mu Nc / (W B rc) <= eta <= 1 - mu Nn / (W B rn),   0 < eta <= 1
//! ```
//!
//! set by the two average user-throughput constraints.

use crate::rates::network_throughput;
use crate::scalar::Real;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BandwidthProblem<F> {
    pub pc: F,
    pub rc: F,
    pub rn: F,
    pub bandwidth_hz: F,
    pub n_clusters: F,
    /// Mean number of cooperative users; zero makes their constraint vacuous.
    pub coop_users: F,
    /// Mean number of non-cooperative users; zero makes their constraint vacuous.
    pub noncoop_users: F,
    /// Minimum average user throughput, bit/s.
    pub mu: F,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Binding {
    CoopConstraint,
    NoncoopConstraint,
    UpperBound,
    Interior,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Violation {
    /// Cooperative users need more than the whole band.
    Coop,
    /// Non-cooperative users need the whole band.
    Noncoop,
    /// Each constraint is satisfiable alone but not together.
    Crossed,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BandwidthSolution<F> {
    pub eta_star: F,
    pub objective: F,
    pub binding: Binding,
    pub feasible: bool,
    pub violation: Option<Violation>,
    /// Largest `mu` for which the constraint set is non-empty.
    pub mu_limit: F,
}

impl<F: Real> BandwidthProblem<F> {
    /// Per-unit-`mu` coefficients `(a, b)` with bounds `eta >= mu a` and
    /// `eta <= 1 - mu b`.
    fn coefficients(&self) -> (F, F) {
        let band = self.bandwidth_hz * self.n_clusters;
        let per = |users: F, rate: F| {
            if users <= F::zero() {
                F::zero()
            } else if rate <= F::zero() {
                F::infinity()
            } else {
                users / (band * rate)
            }
        };
        (per(self.coop_users, self.rc), per(self.noncoop_users, self.rn))
    }

    fn bound(&self, coef: F) -> F {
        if coef == F::zero() || self.mu == F::zero() {
            F::zero()
        } else {
            self.mu * coef
        }
    }

    /// Lower and upper limits on `eta` from the two user constraints.
    pub fn eta_bounds(&self) -> (F, F) {
        let (a, b) = self.coefficients();
        (self.bound(a), F::one() - self.bound(b))
    }

    pub fn throughput(&self, eta: F) -> F {
        network_throughput(self.pc, eta, self.rc, self.rn, self.bandwidth_hz, self.n_clusters)
    }

    /// Average `(coop, noncoop)` user throughputs at `eta`; `None` for a
    /// vacuous constraint.
    pub fn user_rates(&self, eta: F) -> (Option<F>, Option<F>) {
        let band = self.bandwidth_hz * self.n_clusters;
        let coop = (self.coop_users > F::zero()).then(|| band * eta * self.rc / self.coop_users);
        let noncoop = (self.noncoop_users > F::zero()).then(|| band * (F::one() - eta) * self.rn / self.noncoop_users);
        (coop, noncoop)
    }
}

/// Closed-form optimal bandwidth split. When the throughput does not depend
/// on `eta` the largest feasible value is returned. Infeasible problems report
/// the violated constraint, the largest admissible `mu`, and the upper limit
/// clamped to `[0, 1]` as `eta_star`.
pub fn optimize_eta<F: Real>(problem: &BandwidthProblem<F>) -> BandwidthSolution<F> {
    let (lower, upper_raw) = problem.eta_bounds();
    let upper = upper_raw.min(F::one());
    let (a, b) = problem.coefficients();
    let mu_limit = (a + b).recip();

    let violation = if lower > F::one() {
        Some(Violation::Coop)
    } else if upper <= F::zero() {
        Some(Violation::Noncoop)
    } else if lower > upper {
        Some(Violation::Crossed)
    } else {
        None
    };

    let slope = problem.pc * (problem.rc - problem.rn);
    let (eta_star, binding) = match violation {
        Some(_) => (upper.max(F::zero()).min(F::one()), Binding::Interior),
        None if slope >= F::zero() => {
            let binding = if upper_raw < F::one() { Binding::NoncoopConstraint } else { Binding::UpperBound };
            (upper, binding)
        }
        None => (lower.max(F::zero()), Binding::CoopConstraint),
    };

    BandwidthSolution {
        eta_star,
        objective: problem.throughput(eta_star),
        binding,
        feasible: violation.is_none(),
        violation,
        mu_limit,
    }
}

/// Brute-force maximiser over `eta = i / points`, `i = 1..=points`. Ties go to
/// the larger `eta`. Returns `None` when no grid point is feasible.
pub fn grid_search_eta<F: Real>(problem: &BandwidthProblem<F>, points: usize) -> Option<(F, F)> {
    let slack = F::one() - F::lit(1e-12);
    let ok = |rate: Option<F>| rate.is_none_or(|r| r >= problem.mu * slack);
    let n = F::from_count(points as u64);
    let mut best: Option<(F, F)> = None;
    for i in 1..=points {
        let eta = F::from_count(i as u64) / n;
        let (coop, noncoop) = problem.user_rates(eta);
        if !(ok(coop) && ok(noncoop)) {
            continue;
        }
        let value = problem.throughput(eta);
        if best.is_none_or(|(_, v)| value >= v) {
            best = Some((eta, value));
        }
    }
    best
}
