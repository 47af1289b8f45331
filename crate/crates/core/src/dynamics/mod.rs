//! Time integration of the swirl `u`, angular vorticity `ω_φ` and temperature `θ`.
//!
//! The swirl is stored as an even field pinned to zero on the axis
//! (`u ~ b₁ r²`). `ψ`, the velocities and the scaled vorticities are refreshed
//! from `(u, ω_φ)` after every stage.

pub mod convergence;
pub mod forcing;

use std::sync::Arc;

use serde::{Deserialize, Serialize};

pub use forcing::{AlphaProfile, Forcing};

use crate::elliptic::{self, EllipticProblem, ProblemKind};
use crate::error::{Error, Result};
use crate::field::{Parity, ScalarField};
use crate::flux::{advect_flux_form, neumann_laplacian, FaceFluxes};
use crate::grid::Grid;
use crate::ops::{advect, d2z_at, ddr, ddz, div_by_r, radial_lap_at, velocity_from_psi, AdvectionScheme};

/// Values this large are treated as blow-up even while still finite.
pub const BLOWUP_THRESHOLD: f64 = 1e150;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Params {
    pub nu: f64,
    pub kappa: f64,
    pub swirl_scheme: AdvectionScheme,
    pub theta_scheme: AdvectionScheme,
    pub omega_scheme: AdvectionScheme,
    pub cfl_adv: f64,
    pub cfl_diff: f64,
    /// Fixed time step; bypasses the stability bound.
    pub dt: Option<f64>,
    pub elliptic_tol: f64,
    /// Keep `ω_φ` (and hence the meridional flow) frozen at its initial value.
    pub freeze_flow: bool,
}

impl Default for Params {
    fn default() -> Self {
        Params {
            nu: 0.1,
            kappa: 0.1,
            swirl_scheme: AdvectionScheme::Upwind1,
            theta_scheme: AdvectionScheme::Upwind1,
            omega_scheme: AdvectionScheme::Central2,
            cfl_adv: 0.4,
            cfl_diff: 0.25,
            dt: None,
            elliptic_tol: elliptic::DEFAULT_TOLERANCE,
            freeze_flow: false,
        }
    }
}

/// Fields recovered from `(u, ω_φ)`.
#[derive(Debug, Clone)]
pub struct Derived {
    pub psi: ScalarField,
    pub psi1: ScalarField,
    pub v_r: ScalarField,
    pub v_z: ScalarField,
    pub v_phi: ScalarField,
    /// `Φ = ω_r / r`
    pub phi: ScalarField,
    /// `Γ = ω_φ / r`
    pub gamma: ScalarField,
    pub omega_r: ScalarField,
    pub omega_z: ScalarField,
    pub fluxes: FaceFluxes,
    pub elliptic_iterations: usize,
}

#[derive(Debug, Clone)]
pub struct SimState {
    pub t: f64,
    pub u: ScalarField,
    pub omega_phi: ScalarField,
    pub theta: ScalarField,
    pub derived: Derived,
}

impl SimState {
    /// Builds a state at `t = 0` and computes the derived fields.
    pub fn new(u: ScalarField, omega_phi: ScalarField, theta: ScalarField, tol: f64) -> Result<Self> {
        let g = u.grid_arc().clone();
        let derived = empty_derived(&g);
        let mut s = SimState { t: 0.0, u, omega_phi, theta, derived };
        apply_boundary_conditions(&mut s);
        s.refresh_derived(tol, false)?;
        Ok(s)
    }

    pub fn grid(&self) -> &Grid {
        self.u.grid()
    }

    /// Recomputes `ψ`, velocities and scaled vorticities. With `warm`, the
    /// elliptic solve starts from the current `ψ`.
    pub fn refresh_derived(&mut self, tol: f64, warm: bool) -> Result<()> {
        let problem = EllipticProblem::new(ProblemKind::PsiForm, self.omega_phi.clone()).with_tolerance(tol);
        let sol = elliptic::solve(&problem, warm.then_some(&self.derived.psi))?;
        let psi = sol.field;
        let (v_r, v_z) = velocity_from_psi(&psi);
        let u_z = ddz(&self.u);
        let omega_r = div_by_r(&u_z).scaled(-1.0).with_parity(Parity::Odd);
        let omega_z = div_by_r(&ddr(&self.u));
        self.derived = Derived {
            psi1: div_by_r(&psi),
            fluxes: FaceFluxes::from_psi(&psi),
            psi,
            v_r,
            v_z,
            v_phi: div_by_r(&self.u),
            phi: div_by_r(&omega_r),
            gamma: div_by_r(&self.omega_phi),
            omega_r,
            omega_z,
            elliptic_iterations: sol.iterations,
        };
        Ok(())
    }

    /// Checks parity and boundary data; returns a description of the first violation.
    pub fn validate(&self) -> std::result::Result<(), String> {
        let g = self.grid();
        let (nr, nz) = (g.nr(), g.nz());
        if self.u.parity() != Parity::Even || self.omega_phi.parity() != Parity::Odd || self.theta.parity() != Parity::Even {
            return Err("field parities must be u: even (zero on axis), ω_φ: odd, θ: even".into());
        }
        for j in 0..=nz {
            for (name, v) in [("u(0,z)", self.u.get(0, j)), ("u(R,z)", self.u.get(nr, j))] {
                if v != 0.0 {
                    return Err(format!("{name} = {v} at z = {}", g.z(j)));
                }
            }
            if self.omega_phi.get(0, j) != 0.0 || self.omega_phi.get(nr, j) != 0.0 {
                return Err(format!("ω_φ must vanish on r = 0 and r = R (z = {})", g.z(j)));
            }
        }
        for i in 0..=nr {
            if self.omega_phi.get(i, 0) != 0.0 || self.omega_phi.get(i, nz) != 0.0 {
                return Err(format!("ω_φ must vanish on z = ±a (r = {})", g.r(i)));
            }
        }
        let uz = ddz(&self.u);
        let h = g.h();
        let tol = 50.0 * h * h * (1.0 + self.u.max_abs()) / g.half_height().powi(2).min(1.0);
        for i in 0..=nr {
            for j in [0, nz] {
                if uz.get(i, j).abs() > tol {
                    return Err(format!("u_z = {} on z = {} (r = {}) exceeds {tol:.2e}", uz.get(i, j), g.z(j), g.r(i)));
                }
            }
        }
        if self.theta.min() <= 0.0 {
            return Err(format!("θ must be positive, min θ = {}", self.theta.min()));
        }
        Ok(())
    }
}

fn empty_derived(g: &Arc<Grid>) -> Derived {
    let odd = ScalarField::zeros(g, Parity::Odd);
    let even = ScalarField::zeros(g, Parity::Even);
    Derived {
        fluxes: FaceFluxes::from_psi(&odd),
        psi: odd.clone(),
        psi1: even.clone(),
        v_r: odd.clone(),
        v_z: even.clone(),
        v_phi: odd.clone(),
        phi: even.clone(),
        gamma: even.clone(),
        omega_r: odd,
        omega_z: even,
        elliptic_iterations: 0,
    }
}

/// Re-imposes `u = 0` on the axis and `S₁`, and `ω_φ = 0` on `S` and the axis.
pub fn apply_boundary_conditions(s: &mut SimState) {
    let g = s.u.grid_arc().clone();
    let (nr, nz) = (g.nr(), g.nz());
    for j in 0..=nz {
        s.u.set(0, j, 0.0);
        s.u.set(nr, j, 0.0);
        s.omega_phi.set(0, j, 0.0);
        s.omega_phi.set(nr, j, 0.0);
    }
    for i in 0..=nr {
        s.omega_phi.set(i, 0, 0.0);
        s.omega_phi.set(i, nz, 0.0);
    }
}

/// `u_zz` with the mirror ghost `u(z = ±a ± dz) = u(±a ∓ dz)` on `S₂`.
fn d2z_mirror(f: &ScalarField, i: usize, j: usize) -> f64 {
    let g = f.grid();
    let (nz, dz2) = (g.nz(), g.dz() * g.dz());
    if j == 0 {
        2.0 * (f.get(i, 1) - f.get(i, 0)) / dz2
    } else if j == nz {
        2.0 * (f.get(i, nz - 1) - f.get(i, nz)) / dz2
    } else {
        (f.get(i, j + 1) - 2.0 * f.get(i, j) + f.get(i, j - 1)) / dz2
    }
}

/// `-v·∇u + ν(Δu - (2/r)u_r) + α(θ) f₀`; zero where `u` is prescribed.
pub fn rhs_swirl(state: &SimState, forcing: &Forcing, params: &Params) -> ScalarField {
    let u = &state.u;
    let g = u.grid();
    let (nr, nz, dr) = (g.nr(), g.nz(), g.dr());
    let adv = advect_flux_form(&state.derived.fluxes, u, params.swirl_scheme);
    let mut out = ScalarField::zeros(u.grid_arc(), Parity::Even);
    for i in 1..nr {
        let (rp, rm, ri) = ((i as f64 + 0.5) * dr, (i as f64 - 0.5) * dr, g.r(i));
        for j in 0..=nz {
            let c = u.get(i, j);
            // Δu - (2/r)u_r = r (u_r / r)_r + u_zz
            let radial = ri * ((u.get(i + 1, j) - c) / rp - (c - u.get(i - 1, j)) / rm) / (dr * dr);
            let diff = params.nu * (radial + d2z_mirror(u, i, j));
            let src = forcing.alpha.value(state.theta.get(i, j)) * forcing.f0.get(i, j);
            out.set(i, j, -adv.get(i, j) + diff + src);
        }
    }
    out
}

/// Right-hand side of the angular vorticity equation at interior nodes.
pub fn rhs_omega_phi(state: &SimState, forcing: &Forcing, params: &Params) -> ScalarField {
    let w = &state.omega_phi;
    let g = w.grid();
    let (nr, nz) = (g.nr(), g.nz());
    let d = &state.derived;
    let adv = advect(&d.v_r, &d.v_z, w, params.omega_scheme);
    let u_z = ddz(&state.u);
    let th_r = ddr(&state.theta);
    let th_z = ddz(&state.theta);
    let mut out = ScalarField::zeros(w.grid_arc(), Parity::Odd);
    for i in 1..nr {
        let r = g.r(i);
        for j in 1..nz {
            let wc = w.get(i, j);
            let stretch = d.v_r.get(i, j) / r * wc;
            let visc = params.nu * (radial_lap_at(w, i, j) + d2z_at(w, i, j) - wc / (r * r));
            // (2/r) v_φ v_φ,z = 2 u u_z / r³
            let swirl = 2.0 * (state.u.get(i, j) / r) * (u_z.get(i, j) / r) / r;
            let th = state.theta.get(i, j);
            let buoy = forcing.alpha.derivative(th)
                * (th_z.get(i, j) * forcing.f.r.get(i, j) - th_r.get(i, j) * forcing.f.z.get(i, j));
            let curl = forcing.alpha.value(th) * forcing.curl_f.phi.get(i, j);
            out.set(i, j, -adv.get(i, j) + stretch + visc + swirl + buoy + curl);
        }
    }
    out
}

/// `-v·∇θ + κΔθ + g` with `∂θ/∂n = 0` on `S`.
pub fn rhs_theta(state: &SimState, forcing: &Forcing, params: &Params) -> ScalarField {
    let adv = advect_flux_form(&state.derived.fluxes, &state.theta, params.theta_scheme);
    let lap = neumann_laplacian(&state.theta);
    let mut out = lap.scaled(params.kappa);
    out.add_scaled(-1.0, &adv);
    out.add_scaled(1.0, &forcing.g);
    out
}

/// Stability bound `min(cfl_diff·h²/(4 max(ν,κ)), cfl_adv·min(dr/|v_r|, dz/|v_z|))`.
pub fn stable_dt(state: &SimState, nu: f64, kappa: f64, cfl_adv: f64, cfl_diff: f64) -> f64 {
    let g = state.grid();
    let h = g.dr().min(g.dz());
    let diff_coef = nu.max(kappa);
    let mut dt = if diff_coef > 0.0 { cfl_diff * h * h / (4.0 * diff_coef) } else { f64::INFINITY };
    let (vr, vz) = (state.derived.v_r.max_abs(), state.derived.v_z.max_abs());
    if vr > 0.0 {
        dt = dt.min(cfl_adv * g.dr() / vr);
    }
    if vz > 0.0 {
        dt = dt.min(cfl_adv * g.dz() / vz);
    }
    dt
}

/// Largest forward-Euler step for which the upwind transport–diffusion
/// updates of `u` and `θ` are convex combinations of neighbouring values.
pub fn monotone_dt(state: &SimState, params: &Params) -> f64 {
    let g = state.grid();
    let (dr, dz) = (g.dr(), g.dz());
    // Largest diagonal of either diffusion stencil (attained on the axis).
    let diff = params.nu.max(params.kappa) * (4.0 / (dr * dr) + 2.0 / (dz * dz));
    let adv = state.derived.fluxes.max_outflow_rate(g).max(state.derived.v_z.max_abs() / dz);
    1.0 / (diff + adv)
}

fn check_finite(s: &SimState) -> Result<()> {
    for (name, f) in [("u", &s.u), ("omega_phi", &s.omega_phi), ("theta", &s.theta)] {
        let bad = f.first_non_finite().or_else(|| {
            let nzp = f.grid().nz() + 1;
            f.values().iter().position(|v| v.abs() > BLOWUP_THRESHOLD).map(|k| (k / nzp, k % nzp, f.values()[k]))
        });
        if let Some((i, j, value)) = bad {
            return Err(Error::BlowUp { field: name, i, j, t: s.t, value });
        }
    }
    Ok(())
}

fn stage(
    base: &SimState,
    from: &SimState,
    forcing: &Forcing,
    params: &Params,
    dt: f64,
    blend: f64,
) -> Result<SimState> {
    // next = blend·base + (1 - blend)·(from + dt·k(from))
    let ku = rhs_swirl(from, forcing, params);
    let kw = if params.freeze_flow { None } else { Some(rhs_omega_phi(from, forcing, params)) };
    let kt = rhs_theta(from, forcing, params);
    let combine = |b: &ScalarField, f: &ScalarField, k: Option<&ScalarField>| -> ScalarField {
        let mut out = f.clone();
        if let Some(k) = k {
            out.add_scaled(dt, k);
        }
        if blend != 0.0 {
            out = out.scaled(1.0 - blend);
            out.add_scaled(blend, b);
        }
        out
    };
    let mut next = SimState {
        t: from.t,
        u: combine(&base.u, &from.u, Some(&ku)),
        omega_phi: combine(&base.omega_phi, &from.omega_phi, kw.as_ref()),
        theta: combine(&base.theta, &from.theta, Some(&kt)),
        derived: from.derived.clone(),
    };
    apply_boundary_conditions(&mut next);
    next.t = base.t + dt;
    check_finite(&next)?;
    if !params.freeze_flow {
        next.refresh_derived(params.elliptic_tol, true)?;
    } else {
        next.refresh_swirl_only();
    }
    Ok(next)
}

impl SimState {
    fn refresh_swirl_only(&mut self) {
        let u_z = ddz(&self.u);
        let omega_r = div_by_r(&u_z).scaled(-1.0).with_parity(Parity::Odd);
        self.derived.omega_z = div_by_r(&ddr(&self.u));
        self.derived.v_phi = div_by_r(&self.u);
        self.derived.phi = div_by_r(&omega_r);
        self.derived.omega_r = omega_r;
    }
}

/// One Heun step in the strong-stability-preserving form
/// `y* = y + dt k(y)`, `y⁺ = ½ y + ½ (y* + dt k(y*))`.
pub fn step(state: &SimState, forcing: &Forcing, params: &Params, dt: f64) -> Result<SimState> {
    let mid = stage(state, state, forcing, params, dt, 0.0)?;
    let mut next = stage(state, &mid, forcing, params, dt, 0.5)?;
    next.t = state.t + dt;
    Ok(next)
}

/// Time step for the next step: the fixed override, else the stability bound
/// tightened (by a factor 2) to the monotone limit.
pub fn choose_dt(state: &SimState, params: &Params) -> f64 {
    if let Some(dt) = params.dt {
        return dt;
    }
    let cfl = stable_dt(state, params.nu, params.kappa, params.cfl_adv, params.cfl_diff);
    cfl.min(0.5 * monotone_dt(state, params))
}

/// Outcome of [`run`]. On failure the state is the last good one.
#[derive(Debug)]
pub struct RunOutcome {
    pub state: SimState,
    pub steps: usize,
    pub error: Option<Error>,
}

/// Integrates to `t_end`, calling `observe` on the initial state and then
/// after every `cadence`-th step (and always after the final step).
pub fn run(
    initial: SimState,
    forcing: &Forcing,
    params: &Params,
    t_end: f64,
    cadence: usize,
    mut observe: impl FnMut(&SimState, usize),
) -> RunOutcome {
    let cadence = cadence.max(1);
    let mut state = initial;
    observe(&state, 0);
    let mut steps = 0;
    while state.t < t_end * (1.0 - 1e-14) {
        let mut dt = choose_dt(&state, params);
        if state.t + dt > t_end {
            dt = t_end - state.t;
        }
        match step(&state, forcing, params, dt) {
            Ok(mut next) => {
                steps += 1;
                if (next.t - t_end).abs() <= 1e-14 * t_end.max(1.0) {
                    next.t = t_end;
                }
                let last = next.t >= t_end;
                state = next;
                if steps % cadence == 0 || last {
                    observe(&state, steps);
                }
            }
            Err(e) => return RunOutcome { state, steps, error: Some(e) },
        }
    }
    RunOutcome { state, steps, error: None }
}
