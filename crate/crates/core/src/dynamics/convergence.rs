//! Grid-convergence harnesses: the manufactured elliptic pair and a smooth
//! frozen-velocity advection–diffusion problem for `θ`.

use std::f64::consts::PI;
use std::sync::Arc;

use serde::Serialize;

use super::{rhs_theta, stable_dt, Forcing, Params, SimState};
use crate::elliptic::solve_psi;
use crate::error::{Error, Result};
use crate::field::{Parity, ScalarField};
use crate::flux::FaceFluxes;
use crate::grid::Grid;
use crate::ops::{velocity_from_psi, AdvectionScheme};

#[derive(Debug, Clone, Serialize)]
pub struct ConvergenceLadder {
    pub levels: Vec<usize>,
    pub errors: Vec<f64>,
    /// `log2(e_k / e_{k+1})` for consecutive levels.
    pub orders: Vec<f64>,
    /// Max-norm errors, when the ladder's primary norm is a different one.
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub max_errors: Vec<f64>,
}

impl ConvergenceLadder {
    fn from_errors(levels: Vec<usize>, errors: Vec<f64>) -> Self {
        let orders = errors.windows(2).map(|w| (w[0] / w[1]).log2()).collect();
        ConvergenceLadder { levels, errors, orders, max_errors: Vec::new() }
    }

    pub fn min_order(&self) -> f64 {
        self.orders.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn min_ratio(&self) -> f64 {
        self.errors.windows(2).map(|w| w[0] / w[1]).fold(f64::INFINITY, f64::min)
    }
}

fn check_levels(levels: &[usize]) -> Result<()> {
    if levels.len() < 2 {
        return Err(Error::Config("a convergence study needs at least 2 grids".into()));
    }
    if levels.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::Config("convergence levels must be strictly increasing".into()));
    }
    Ok(())
}

/// Manufactured pair on `R = a = 1`: `ψ = r(1-r²)(1-z²)`.
pub fn manufactured_omega(r: f64, z: f64, radius: f64, a: f64) -> f64 {
    8.0 * r * (a * a - z * z) + 2.0 * r * (radius * radius - r * r)
}

pub fn manufactured_psi(r: f64, z: f64, radius: f64, a: f64) -> f64 {
    r * (radius * radius - r * r) * (a * a - z * z)
}

/// Max-norm error of `solve_psi` against the manufactured solution on `n × n` grids.
pub fn elliptic_ladder(levels: &[usize], tol: f64) -> Result<ConvergenceLadder> {
    check_levels(levels)?;
    let mut errors = Vec::new();
    for &n in levels {
        let g = Arc::new(Grid::new(1.0, 1.0, n, n)?);
        let omega = ScalarField::from_fn(&g, Parity::Odd, |r, z| manufactured_omega(r, z, 1.0, 1.0));
        let exact = ScalarField::from_fn(&g, Parity::Odd, |r, z| manufactured_psi(r, z, 1.0, 1.0));
        errors.push(solve_psi(&omega, tol)?.field.max_abs_diff(&exact));
    }
    Ok(ConvergenceLadder::from_errors(levels.to_vec(), errors))
}

/// Frozen flow `ψ = c r(1-r²)(1-z²)` and exact
/// `θ = 1 + e^{-t} cos(πr) cos(πz)` on `R = a = 1`.
struct FrozenCase {
    c: f64,
    kappa: f64,
}

impl FrozenCase {
    fn theta(&self, r: f64, z: f64, t: f64) -> f64 {
        1.0 + (-t).exp() * (PI * r).cos() * (PI * z).cos()
    }

    fn source(&self, r: f64, z: f64, t: f64) -> f64 {
        let e = (-t).exp();
        let (cr, sr, cz, sz) = ((PI * r).cos(), (PI * r).sin(), (PI * z).cos(), (PI * z).sin());
        let v_r = 2.0 * self.c * r * (1.0 - r * r) * z;
        let v_z = self.c * (1.0 - z * z) * (2.0 - 4.0 * r * r);
        let th_r = -PI * e * sr * cz;
        let th_z = -PI * e * cr * sz;
        let sr_over_r = if r == 0.0 { PI } else { sr / r };
        let lap = e * cz * (-PI * PI * cr - PI * sr_over_r) - PI * PI * e * cr * cz;
        -e * cr * cz + v_r * th_r + v_z * th_z - self.kappa * lap
    }
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct EvolutionError {
    /// Quadrature-weighted L² error.
    pub l2: f64,
    pub max: f64,
}

/// Error at `t_end` for the frozen-velocity temperature problem.
///
/// The first ring's control volume has no inner face, so the nodal error
/// there converges more slowly than elsewhere; orders are therefore measured
/// in the weighted L² norm and the max-norm errors are reported alongside.
pub fn evolution_error(n: usize, scheme: AdvectionScheme, kappa: f64, t_end: f64) -> Result<EvolutionError> {
    let case = FrozenCase { c: 0.5, kappa };
    let g = Arc::new(Grid::new(1.0, 1.0, n, n)?);
    let psi = ScalarField::from_fn(&g, Parity::Odd, |r, z| case.c * r * (1.0 - r * r) * (1.0 - z * z));
    let theta0 = ScalarField::from_fn(&g, Parity::Even, |r, z| case.theta(r, z, 0.0));
    let zero_u = ScalarField::zeros(&g, Parity::Even);
    let zero_w = ScalarField::zeros(&g, Parity::Odd);
    let mut state = SimState::new(zero_u, zero_w, theta0, 1e-10)?;
    let (v_r, v_z) = velocity_from_psi(&psi);
    state.derived.fluxes = FaceFluxes::from_psi(&psi);
    state.derived.v_r = v_r;
    state.derived.v_z = v_z;
    state.derived.psi = psi;

    let params = Params { kappa, nu: kappa, theta_scheme: scheme, ..Params::default() };
    let dt_max = stable_dt(&state, kappa, kappa, params.cfl_adv, params.cfl_diff);
    let steps = (t_end / dt_max).ceil().max(1.0) as usize;
    let dt = t_end / steps as f64;
    let mut forcing = Forcing::zero(&g);
    let mut source_at = |t: f64| {
        forcing.g = ScalarField::from_fn(&g, Parity::Even, |r, z| case.source(r, z, t));
        forcing.clone()
    };
    for k in 0..steps {
        let t = k as f64 * dt;
        let k1 = rhs_theta(&state, &source_at(t), &params);
        let mut mid = state.clone();
        mid.theta.add_scaled(dt, &k1);
        let k2 = rhs_theta(&mid, &source_at(t + dt), &params);
        let mut next = state.theta.clone();
        next.add_scaled(0.5 * dt, &k1);
        next.add_scaled(0.5 * dt, &k2);
        state.theta = next;
    }
    let exact = ScalarField::from_fn(&g, Parity::Even, |r, z| case.theta(r, z, t_end));
    let l2 = state.theta.zip_map(&exact, Parity::Even, |a, b| (a - b) * (a - b)).integral().sqrt();
    Ok(EvolutionError { l2, max: state.theta.max_abs_diff(&exact) })
}

/// Weighted-L² ladder; the max-norm errors go into `max_errors`.
pub fn evolution_ladder(levels: &[usize], scheme: AdvectionScheme, kappa: f64, t_end: f64) -> Result<ConvergenceLadder> {
    check_levels(levels)?;
    let errs = levels.iter().map(|&n| evolution_error(n, scheme, kappa, t_end)).collect::<Result<Vec<_>>>()?;
    let mut ladder = ConvergenceLadder::from_errors(levels.to_vec(), errs.iter().map(|e| e.l2).collect());
    ladder.max_errors = errs.iter().map(|e| e.max).collect();
    Ok(ladder)
}
