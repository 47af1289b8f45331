//! Built-in initial data, forcing and coefficient profiles.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::sync::Arc;

use crate::dynamics::convergence::manufactured_omega;
use crate::dynamics::{AlphaProfile, Forcing, SimState};
use crate::error::{Error, Result};
use crate::estimates::TheoremParams;
use crate::field::{Parity, ScalarField};
use crate::grid::Grid;

pub const SCENARIO_NAMES: [&str; 5] = ["zero", "decaying_swirl", "heated_swirl", "buoyant_cell", "manufactured_elliptic"];

#[derive(Debug, Clone)]
pub struct Scenario {
    pub name: String,
    pub u0: ScalarField,
    pub omega0: ScalarField,
    pub theta0: ScalarField,
    pub forcing: Forcing,
    pub nu: f64,
    pub kappa: f64,
    pub theorem: TheoremParams,
    /// Resolved scenario parameters, overrides applied.
    pub parameters: BTreeMap<String, f64>,
}

impl Scenario {
    pub fn initial_state(&self, tol: f64) -> Result<SimState> {
        SimState::new(self.u0.clone(), self.omega0.clone(), self.theta0.clone(), tol)
    }

    /// Hypotheses on the data: `g ≥ 0`, `θ(0) > 0`, and the boundary/parity rules.
    pub fn validate(&self, tol: f64) -> Result<()> {
        if let Some(v) = self.forcing.g.values().iter().find(|v| **v < 0.0) {
            return Err(Error::InvalidParameter(format!("scenario {}: heat source g must be nonnegative (found {v})", self.name)));
        }
        if !(self.theta0.min() > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "scenario {}: initial temperature must be positive (min {})",
                self.name,
                self.theta0.min()
            )));
        }
        self.initial_state(tol)?
            .validate()
            .map_err(|m| Error::InvalidParameter(format!("scenario {}: {m}", self.name)))
    }
}

fn defaults(name: &str) -> Option<&'static [(&'static str, f64)]> {
    Some(match name {
        "zero" => &[("theta0", 1.0)],
        "decaying_swirl" => &[("amplitude", 1.0), ("theta0", 1.0)],
        "heated_swirl" => &[("amplitude", 1.0), ("theta0", 1.0), ("g0", 1.0), ("alpha0", 1.0), ("fr", 0.5), ("fphi", 1.0)],
        "buoyant_cell" => &[("amplitude", 1.0), ("theta0", 1.0), ("dtheta", 0.5), ("buoyancy", 1.0)],
        "manufactured_elliptic" => &[("theta0", 1.0)],
        _ => return None,
    })
}

/// Builds a named scenario on `grid`. `overrides` may only name the
/// scenario's own parameters.
pub fn make_scenario(name: &str, grid: &Arc<Grid>, overrides: &BTreeMap<String, f64>) -> Result<Scenario> {
    let defs = defaults(name)
        .ok_or_else(|| Error::Config(format!("unknown scenario `{name}` (expected one of {})", SCENARIO_NAMES.join(", "))))?;
    let mut p: BTreeMap<String, f64> = defs.iter().map(|(k, v)| (k.to_string(), *v)).collect();
    for (k, v) in overrides {
        if !p.contains_key(k) {
            let known: Vec<&str> = defs.iter().map(|(k, _)| *k).collect();
            return Err(Error::Config(format!("scenario `{name}` has no parameter `{k}` (known: {})", known.join(", "))));
        }
        if !v.is_finite() {
            return Err(Error::Config(format!("scenario parameter `{k}` must be finite")));
        }
        p.insert(k.clone(), *v);
    }
    let get = |k: &str| p[k];
    if !(get("theta0") > 0.0) {
        return Err(Error::InvalidParameter(format!("theta0 must be positive, got {}", get("theta0"))));
    }
    if let Some(&g0) = p.get("g0") {
        if g0 < 0.0 {
            return Err(Error::InvalidParameter(format!("g0 = {g0} makes the heat source negative; g >= 0 is required")));
        }
    }

    let (radius, a) = (grid.radius(), grid.half_height());
    let zeros_even = ScalarField::zeros(grid, Parity::Even);
    let zeros_odd = ScalarField::zeros(grid, Parity::Odd);
    let theta_const = ScalarField::constant(grid, Parity::Even, get("theta0"));
    // r²(R - r) peaks at r = 2R/3 with value 4R³/27.
    let swirl = |amp: f64| {
        let norm = amp * 27.0 / (4.0 * radius.powi(3));
        ScalarField::from_fn(grid, Parity::Even, move |r, z| norm * r * r * (radius - r) * (PI * z / a).cos())
    };
    let half_cos = move |z: f64| (PI * z / (2.0 * a)).cos();
    let half_sin = move |z: f64| (PI * z / (2.0 * a)).sin();
    let k = PI / (2.0 * a);
    let r2 = radius * radius;

    let (u0, omega0, theta0, forcing) = match name {
        "zero" => (zeros_even, zeros_odd, theta_const, Forcing::zero(grid)),
        "decaying_swirl" => (swirl(get("amplitude")), zeros_odd, theta_const, Forcing::zero(grid)),
        "heated_swirl" => {
            let (g0, fr, fphi) = (get("g0"), get("fr"), get("fphi"));
            let sigma2 = 0.09 * radius.min(a).powi(2);
            let forcing = Forcing::analytic(
                grid,
                move |r, z| [fr * r * (r2 - r * r) * half_cos(z), fphi * r.powi(3) * (r2 - r * r) * half_cos(z), 0.0],
                move |r, z| {
                    [
                        fphi * r.powi(3) * (r2 - r * r) * k * half_sin(z),
                        -fr * r * (r2 - r * r) * k * half_sin(z),
                        fphi * (4.0 * r2 * r * r - 6.0 * r.powi(4)) * half_cos(z),
                    ]
                },
                move |r, z| g0 * (-(r * r + z * z) / sigma2).exp(),
                AlphaProfile::Linear { slope: get("alpha0") },
            )?;
            (swirl(get("amplitude")), zeros_odd, theta_const, forcing)
        }
        "buoyant_cell" => {
            let (amp, b, th, dth) = (get("amplitude"), get("buoyancy"), get("theta0"), get("dtheta"));
            // r(R² - r²) peaks at r = R/√3 with value 2R³/(3√3).
            let norm = amp * 3.0 * 3f64.sqrt() / (2.0 * radius.powi(3));
            let omega0 = ScalarField::from_fn(grid, Parity::Odd, |r, z| norm * r * (r2 - r * r) * half_cos(z));
            let theta0 = ScalarField::from_fn(grid, Parity::Even, |_, z| th + dth.max(0.0) * 0.5 * (1.0 - z / a));
            if th + dth.min(0.0) <= 0.0 {
                return Err(Error::InvalidParameter("theta0 + dtheta must stay positive".into()));
            }
            let forcing = Forcing::analytic(
                grid,
                move |r, z| [0.0, 0.0, b * r * r * (r2 - r * r) * half_cos(z)],
                move |r, z| [0.0, -b * (2.0 * r * r2 - 4.0 * r.powi(3)) * half_cos(z), 0.0],
                |_, _| 0.0,
                AlphaProfile::Linear { slope: 1.0 },
            )?;
            (zeros_even, omega0, theta0, forcing)
        }
        "manufactured_elliptic" => {
            let omega0 = ScalarField::from_fn(grid, Parity::Odd, |r, z| manufactured_omega(r, z, radius, a));
            (zeros_even, omega0, theta_const, Forcing::zero(grid))
        }
        _ => unreachable!(),
    };
    Ok(Scenario {
        name: name.to_string(),
        u0,
        omega0,
        theta0,
        forcing,
        nu: 0.1,
        kappa: 0.1,
        theorem: TheoremParams::default(),
        parameters: p,
    })
}

/// `1.001 · sup (|α| + |α'|)` over 1024 samples of `[θ_*, θ^*]`.
pub fn alpha_phi_bound(alpha: &AlphaProfile, theta_star: f64, theta_upper: f64) -> f64 {
    let n = 1024;
    let (lo, hi) = (theta_star.min(theta_upper), theta_star.max(theta_upper));
    let sup = (0..n)
        .map(|k| {
            let th = lo + (hi - lo) * k as f64 / (n - 1) as f64;
            alpha.value(th).abs() + alpha.derivative(th).abs()
        })
        .fold(0.0, f64::max);
    1.001 * sup
}
