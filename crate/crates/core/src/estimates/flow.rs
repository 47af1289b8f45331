//! Checks on a recorded run.

use std::collections::BTreeMap;

use super::{compute_x, Constants, EmpiricalRatio, EstimateReport, TheoremParams};
use crate::error::{Error, Result};
use crate::norms::DiagnosticHistory;

/// Running trapezoid integral `∫₀^{t_k} v dt`.
fn cumulative(times: &[f64], values: &[f64]) -> Vec<f64> {
    let mut out = Vec::with_capacity(values.len());
    let mut acc = 0.0;
    for k in 0..values.len() {
        if k > 0 {
            acc += 0.5 * (times[k] - times[k - 1]) * (values[k] + values[k - 1]);
        }
        out.push(acc);
    }
    out
}

fn sq(v: &[f64]) -> Vec<f64> {
    v.iter().map(|x| x * x).collect()
}

fn same_len(h: &DiagnosticHistory, c: &[Constants]) -> Result<()> {
    if h.len() != c.len() || h.is_empty() {
        return Err(Error::InvalidParameter(format!("{} records but {} constant sets", h.len(), c.len())));
    }
    Ok(())
}

/// `θ_* ≤ θ(t) ≤ θ^*` at every record, tolerance `10⁻¹⁰ (1 + θ^*)`.
pub fn check_theta_bounds(h: &DiagnosticHistory, c: &[Constants]) -> Result<EstimateReport> {
    same_len(h, c)?;
    let (lo, hi) = (h.series("theta.min")?, h.series("theta.max")?);
    let mut parts = Vec::new();
    for (k, ck) in c.iter().enumerate() {
        let tol = 1e-10 * (1.0 + ck.theta_upper);
        parts.push(EstimateReport::new(format!("lower t={}", ck.t), ck.theta_star, lo[k], 0.0, tol));
        parts.push(EstimateReport::new(format!("upper t={}", ck.t), hi[k], ck.theta_upper, 0.0, tol));
    }
    let last = c.last().unwrap();
    Ok(EstimateReport::worst("theta_bounds", parts)
        .with_constant("theta_star", last.theta_star)
        .with_constant("theta_upper", last.theta_upper))
}

/// Velocity energy inequality with right side `3φ²|f|²_{2,1} + 2|v(0)|²`.
pub fn check_energy_velocity(h: &DiagnosticHistory, c: &[Constants], nu: f64, slack: f64) -> Result<EstimateReport> {
    same_len(h, c)?;
    let v = h.series("v.sq")?;
    let dis: Vec<f64> = h.series("grad_v.sq")?.iter().zip(h.series("v_metric.sq")?).map(|(a, b)| a + b).collect();
    let int = cumulative(h.times(), &dis);
    let parts = c
        .iter()
        .enumerate()
        .map(|(k, ck)| EstimateReport::new(format!("t={}", ck.t), v[k] + nu * int[k], ck.d1_energy_sq, slack, 0.0))
        .collect();
    Ok(EstimateReport::worst("energy_velocity", parts).with_constant("D1_energy_sq", c.last().unwrap().d1_energy_sq))
}

/// `|u(t)|_∞ ≤ D₂(t)`. With the monotone scheme the tolerance is
/// `10⁻¹⁰ (1 + D₂)`; otherwise a 2 % relative slack.
pub fn check_swirl_max(h: &DiagnosticHistory, c: &[Constants], monotone: bool) -> Result<EstimateReport> {
    same_len(h, c)?;
    let u = h.series("u.Linf")?;
    let parts = c
        .iter()
        .enumerate()
        .map(|(k, ck)| {
            let (slack, floor) = if monotone { (0.0, 1e-10 * (1.0 + ck.d2)) } else { (0.02, 0.0) };
            EstimateReport::new(format!("t={}", ck.t), u[k], ck.d2, slack, floor)
        })
        .collect();
    Ok(EstimateReport::worst("swirl_max", parts).with_constant("D2", c.last().unwrap().d2))
}

/// `|u|_∞` non-increasing between consecutive records (no swirl source).
pub fn check_swirl_monotone(h: &DiagnosticHistory) -> Result<EstimateReport> {
    let u = h.series("u.Linf")?;
    let tol = 1e-10 * (1.0 + u.first().copied().unwrap_or(0.0));
    let mut parts: Vec<EstimateReport> =
        u.windows(2).enumerate().map(|(k, w)| EstimateReport::new(format!("record {}", k + 1), w[1], w[0], 0.0, tol)).collect();
    if parts.is_empty() {
        parts.push(EstimateReport::new("single record", 0.0, 0.0, 0.0, tol));
    }
    Ok(EstimateReport::worst("swirl_monotone", parts))
}

/// Drift of `∫θ` against `t ∫g` between consecutive records, relative to `∫θ`.
pub fn check_mean_theta(h: &DiagnosticHistory, g_integral: f64) -> Result<EstimateReport> {
    let th = h.series("theta.integral")?;
    let ts = h.times();
    let mut parts = Vec::new();
    for k in 1..th.len() {
        let drift = (th[k] - th[k - 1]) - (ts[k] - ts[k - 1]) * g_integral;
        let scale = th[k - 1].abs().max(f64::MIN_POSITIVE);
        parts.push(EstimateReport::new(format!("record {k}"), drift.abs() / scale, 0.0, 0.0, 1e-10));
    }
    if parts.is_empty() {
        parts.push(EstimateReport::new("single record", 0.0, 0.0, 0.0, 1e-10));
    }
    Ok(EstimateReport::worst("mean_theta", parts))
}

/// `‖θ‖_V ≤ D₀`.
pub fn check_theta_energy(h: &DiagnosticHistory, c: &[Constants], slack: f64) -> Result<EstimateReport> {
    same_len(h, c)?;
    let (l2, g2) = (h.series("theta.L2")?, h.series("theta.grad2")?);
    let mut acc = crate::norms::VNormAccumulator::new();
    let mut parts = Vec::new();
    for (k, ck) in c.iter().enumerate() {
        acc.update(ck.t, l2[k], g2[k])?;
        parts.push(EstimateReport::new(format!("t={}", ck.t), acc.value(), ck.d0, slack, 1e-14));
    }
    let last = c.last().unwrap();
    Ok(EstimateReport::worst("theta_energy", parts)
        .with_constant("D0", last.d0)
        .with_constant("D0_squared_variant", last.d0_squared_variant))
}

/// `|v_φ(t)|_∞ ≤ (D₂/√ν) D₁^{1/4} X^{3/4} + D₁₁`.
pub fn check_vphi_sup(h: &DiagnosticHistory, c: &[Constants], nu: f64, slack: f64) -> Result<EstimateReport> {
    same_len(h, c)?;
    let x = compute_x(h)?;
    let v = h.series("v_phi.Linf")?;
    let parts = c
        .iter()
        .enumerate()
        .map(|(k, ck)| {
            let rhs = ck.d2 / nu.sqrt() * ck.d1.powf(0.25) * x[k].powf(0.75) + ck.d11;
            EstimateReport::new(format!("t={}", ck.t), v[k], rhs, slack, 1e-14)
        })
        .collect();
    let last = c.last().unwrap();
    Ok(EstimateReport::worst("vphi_sup", parts).with_constant("D11", last.d11).with_constant("X_end", *x.last().unwrap()))
}

/// Closing inequality `X² ≤ Φ̂ (X^e + 1)`, `e = 3ε₀ + 2 - θ₀/2`.
///
/// `Φ̂ = max_k X_k² / (X_k^e + 1)` is measured from the run; `X_max` is the
/// root of `x² = Φ̂ (x^e + 1)`.
pub fn check_budget(h: &DiagnosticHistory, theorem: &TheoremParams) -> Result<EstimateReport> {
    theorem.validate()?;
    let e = theorem.closing_exponent();
    let x = compute_x(h)?;
    let x_end = *x.last().ok_or_else(|| Error::MissingSeries("history is empty".into()))?;
    let phi_hat = x.iter().map(|&v| v * v / (v.powf(e) + 1.0)).fold(0.0, f64::max);
    let x_max = if e < 2.0 { budget_root(phi_hat, e) } else { f64::INFINITY };
    let mut r = EstimateReport::new("budget", x_end, x_max, 1e-9, 0.0)
        .with_constant("exponent", e)
        .with_constant("theta0", theorem.theta0())
        .with_constant("phi_hat", phi_hat);
    if e >= 2.0 {
        r.pass = false;
        r.notes.push(format!("closing exponent {e} is not below 2 (needs epsilon0 < theta0/6)"));
    }
    if x.iter().any(|v| !v.is_finite()) {
        r.pass = false;
        r.notes.push("X(t) is not finite".into());
    }
    Ok(r)
}

/// Largest root of `x² = a (x^e + 1)` for `e < 2`; the left minus right side
/// is increasing in `x²/(x^e + 1)`, so bisection on that quotient suffices.
fn budget_root(a: f64, e: f64) -> f64 {
    if a == 0.0 {
        return 0.0;
    }
    let q = |x: f64| x * x / (x.powf(e) + 1.0);
    let mut hi = 1.0;
    while q(hi) < a {
        hi *= 2.0;
    }
    let mut lo = 0.0;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if q(mid) < a {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    hi
}

/// `max |div v|` must drop at least 3× per doubling unless already at round-off.
pub fn check_divergence(coarse: f64, fine: f64, h_fine: f64, floor: f64) -> EstimateReport {
    EstimateReport::new("divergence", fine, coarse / 3.0, 0.0, floor)
        .with_constant("C", fine / (h_fine * h_fine))
        .with_note(format!("coarse {coarse:e}, fine {fine:e}"))
}

/// Empirical ratios for the estimates with unspecified constants.
pub fn flow_ratios(h: &DiagnosticHistory, c: &Constants, nu: f64) -> Result<BTreeMap<String, EmpiricalRatio>> {
    let ts = h.times();
    let max_of = |v: Vec<f64>| v.into_iter().fold(0.0, f64::max);
    let mut m = BTreeMap::new();

    let psi = h.series("psi.H1")?;
    let psi1 = h.series("psi1.L2")?;
    let lhs = max_of(psi.iter().zip(psi1).map(|(a, b)| a * a + b * b).collect());
    m.insert("psi_energy".into(), EmpiricalRatio { lhs, rhs: c.d1 * c.d1 });

    let dz: Vec<f64> = h.series("psi_z.H1")?.iter().zip(h.series("psi1_z.L2")?).map(|(a, b)| a * a + b * b).collect();
    let lhs = *cumulative(ts, &dz).last().unwrap_or(&0.0);
    m.insert("psi_z_energy".into(), EmpiricalRatio { lhs, rhs: c.d1 * c.d1 });

    let uz = h.series("u_z.L2")?;
    let int = cumulative(ts, &sq(h.series("u_z.grad2")?));
    let lhs = max_of(uz.iter().zip(&int).map(|(a, i)| a * a + nu * i).collect());
    m.insert("grad_swirl_z".into(), EmpiricalRatio { lhs, rhs: c.d4 * c.d4 });

    let ur = h.series("u_r.L2")?;
    let second: Vec<f64> = h.series("u_rr.L2")?.iter().zip(h.series("u_rz.L2")?).map(|(a, b)| a * a + b * b).collect();
    let int = cumulative(ts, &second);
    let lhs = max_of(ur.iter().zip(&int).map(|(a, i)| a * a + nu * i).collect());
    m.insert("grad_swirl_r".into(), EmpiricalRatio { lhs, rhs: c.d5 * c.d5 });
    Ok(m)
}
