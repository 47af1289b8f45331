//! Named data constants, the quantity `X(t)`, and numerical checks of the
//! a priori estimates and functional inequalities.
//!
//! Where an estimate holds only up to an unspecified absolute constant the
//! check is an empirical ratio `lhs / rhs`, which must stay bounded under one
//! grid doubling (growth at most 1.5×).

mod constants;
mod elliptic_checks;
mod flow;
mod inequalities;
pub mod suites;

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

pub use constants::{
    assumption3_ratio, compute_constants, compute_constants_at, compute_x, constants_series, Constants, ForcingNorms,
};
pub use elliptic_checks::{check_elliptic_h2, check_elliptic_h3, check_weighted_estimate, h2_ratio, h3_ratios, weighted_ratio};
pub use flow::{
    check_budget, check_divergence, check_energy_velocity, check_mean_theta, check_swirl_max, check_swirl_monotone,
    check_theta_bounds, check_theta_energy, check_vphi_sup, flow_ratios,
};
pub use inequalities::{
    check_hardy, check_hardy_interp, check_sobolev_interp, hardy_interp_exponents, hardy_interp_ratio, hardy_sides,
    sobolev_ratio, sobolev_theta, HardySample, HardySides, SobolevParams,
};

use crate::error::{Error, Result};

/// Default slack for energy identities inherited from the scheme.
pub const ENERGY_SLACK: f64 = 0.05;
/// Default slack for estimate chains.
pub const CHAIN_SLACK: f64 = 0.10;
/// Allowed growth of an empirical ratio under one grid doubling.
pub const REFINEMENT_GROWTH: f64 = 1.5;

/// One checked inequality `lhs ≤ rhs (1 + slack) + floor`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EstimateReport {
    pub id: String,
    pub lhs: f64,
    pub rhs: f64,
    pub margin: f64,
    pub slack: f64,
    pub floor: f64,
    pub pass: bool,
    /// Constants entering the right-hand side.
    #[serde(skip_serializing_if = "BTreeMap::is_empty")]
    pub constants: BTreeMap<String, f64>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

impl EstimateReport {
    pub fn new(id: impl Into<String>, lhs: f64, rhs: f64, slack: f64, floor: f64) -> Self {
        let pass = lhs.is_finite() && rhs.is_finite() && lhs <= rhs * (1.0 + slack) + floor;
        EstimateReport {
            id: id.into(),
            lhs,
            rhs,
            margin: rhs - lhs,
            slack,
            floor,
            pass,
            constants: BTreeMap::new(),
            notes: Vec::new(),
        }
    }

    /// Refinement protocol: the fine-grid ratio may exceed the coarse one by at most 1.5×.
    pub fn refinement(id: impl Into<String>, coarse: f64, fine: f64) -> Self {
        let mut r = Self::new(id, fine, coarse, REFINEMENT_GROWTH - 1.0, 1e-12);
        r.notes.push("lhs: fine-grid ratio, rhs: coarse-grid ratio".into());
        r
    }

    /// Combines reports: the result fails if any part fails and shows the
    /// part that comes closest to failing.
    pub fn worst(id: impl Into<String>, parts: Vec<EstimateReport>) -> Self {
        let score = |r: &EstimateReport| {
            if !r.pass {
                f64::INFINITY
            } else {
                r.lhs - r.rhs * (1.0 + r.slack) - r.floor
            }
        };
        let all_pass = parts.iter().all(|r| r.pass);
        let n = parts.len();
        let mut best = parts
            .into_iter()
            .max_by(|a, b| score(a).partial_cmp(&score(b)).unwrap_or(std::cmp::Ordering::Equal))
            .unwrap_or_else(|| EstimateReport::new("", 0.0, 0.0, 0.0, 0.0));
        best.notes.push(format!("worst of {n} samples ({})", best.id));
        best.id = id.into();
        best.pass = all_pass;
        best
    }

    pub fn with_constant(mut self, name: &str, value: f64) -> Self {
        self.constants.insert(name.to_string(), value);
        self
    }

    pub fn with_note(mut self, note: impl Into<String>) -> Self {
        self.notes.push(note.into());
        self
    }
}

/// `lhs / rhs` of an inequality with an unspecified constant.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EmpiricalRatio {
    pub lhs: f64,
    pub rhs: f64,
}

impl EmpiricalRatio {
    pub fn value(&self) -> f64 {
        if self.lhs == 0.0 {
            0.0
        } else {
            self.lhs / self.rhs
        }
    }

    /// Single-grid report: passes when the ratio is finite.
    pub fn report(&self, id: impl Into<String>) -> EstimateReport {
        let v = self.value();
        let mut r = EstimateReport::new(id, v, if v.is_finite() { v } else { f64::INFINITY }, 0.0, 0.0);
        r.pass = v.is_finite();
        r.notes.push(format!("lhs {:e}, rhs {:e}", self.lhs, self.rhs));
        r
    }
}

/// Parameters of the conditional regularity theorem.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TheoremParams {
    pub epsilon0: f64,
    pub epsilon1: f64,
    pub epsilon2: f64,
    pub d: f64,
    pub c0: f64,
    /// Accepted and logged; it enters no check.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub c_star: Option<f64>,
}

impl Default for TheoremParams {
    fn default() -> Self {
        TheoremParams { epsilon0: 0.01, epsilon1: 0.3, epsilon2: 0.1, d: 6.0, c0: 0.5, c_star: None }
    }
}

impl TheoremParams {
    /// `θ₀ = (1 - 3/d) ε₁ - (3/d) ε₂`
    pub fn theta0(&self) -> f64 {
        (1.0 - 3.0 / self.d) * self.epsilon1 - (3.0 / self.d) * self.epsilon2
    }

    /// `3ε₀ + 2 - θ₀/2`
    pub fn closing_exponent(&self) -> f64 {
        3.0 * self.epsilon0 + 2.0 - self.theta0() / 2.0
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Config(m));
        let (e0, e1, e2, d) = (self.epsilon0, self.epsilon1, self.epsilon2, self.d);
        if !(d > 3.0) || !d.is_finite() {
            return bad(format!("d must exceed 3 (got {d})"));
        }
        if !(e0 > 0.0 && e1 > 0.0 && e2 > 0.0) {
            return bad(format!("epsilon0, epsilon1, epsilon2 must be positive (got {e0}, {e1}, {e2})"));
        }
        if !(self.c0 > 0.0) {
            return bad(format!("c0 must be positive (got {})", self.c0));
        }
        if let Some(c) = self.c_star {
            if !(c > 0.0) {
                return bad(format!("c_star must be positive (got {c})"));
            }
        }
        let t0 = self.theta0();
        if !(t0 > 0.0) {
            return bad(format!("theta0 = (1-3/d)*epsilon1 - (3/d)*epsilon2 must be positive, i.e. epsilon1 > 3*epsilon2/(d-3) (theta0 = {t0})"));
        }
        if !(1.0 + e2 / e1 < d / 3.0) {
            return bad(format!("1 + epsilon2/epsilon1 < d/3 is violated ({} >= {})", 1.0 + e2 / e1, d / 3.0));
        }
        if !(e1 * (1.0 - 3.0 / d) < 1.0 + 3.0 * e2 / d) {
            return bad("epsilon1*(1-3/d) < 1 + 3*epsilon2/d is violated".into());
        }
        Ok(())
    }
}
