//! Ratio checks for the `H²`, `H³` and weighted estimates of `ψ₁` in terms of `Γ`.

use std::f64::consts::PI;

use super::{EmpiricalRatio, EstimateReport};
use crate::error::{Error, Result};
use crate::field::ScalarField;
use crate::ops::{ddr, ddz, div_by_r};

/// `∫ f² r^k dx`, skipping the axis when `k < 0`.
fn weighted_sq(f: &ScalarField, k: f64) -> f64 {
    let g = f.grid();
    let start = if k < 0.0 { 1 } else { 0 };
    let mut s = 0.0;
    for i in start..=g.nr() {
        let w = if k == 0.0 { 1.0 } else { g.r(i).powf(k) };
        for j in 0..=g.nz() {
            s += g.weight(i, j) * f.get(i, j).powi(2) * w;
        }
    }
    s
}

fn sq(f: &ScalarField) -> f64 {
    weighted_sq(f, 0.0)
}

/// `∫_{-a}^{a} f(0, z)² dz`.
fn axis_line(f: &ScalarField) -> f64 {
    let g = f.grid();
    g.z_line_weights().iter().enumerate().map(|(j, w)| w * f.get(0, j).powi(2)).sum()
}

/// `2πR ∫_{-a}^{a} f(R, z)² dz`.
fn wall_line(f: &ScalarField) -> f64 {
    let g = f.grid();
    let nr = g.nr();
    2.0 * PI * g.radius() * g.z_line_weights().iter().enumerate().map(|(j, w)| w * f.get(nr, j).powi(2)).sum::<f64>()
}

struct Derivs {
    r: ScalarField,
    z: ScalarField,
    rr: ScalarField,
    rz: ScalarField,
    zz: ScalarField,
}

fn derivs(f: &ScalarField) -> Derivs {
    let r = ddr(f);
    let z = ddz(f);
    Derivs { rr: ddr(&r), rz: ddz(&r), zz: ddz(&z), r, z }
}

/// `∫(ψ₁,rr² + ψ₁,rz² + ψ₁,zz² + ψ₁,r²/r²) + ∫(ψ₁,z²|_{r=0} + ψ₁,r²|_{r=R}) dz` against `|Γ|₂²`.
pub fn h2_ratio(psi1: &ScalarField, gamma: &ScalarField) -> EmpiricalRatio {
    let d = derivs(psi1);
    let lhs = sq(&d.rr) + sq(&d.rz) + sq(&d.zz) + sq(&div_by_r(&d.r)) + axis_line(&d.z) + wall_line(&d.r);
    EmpiricalRatio { lhs, rhs: sq(gamma) }
}

/// The three third-order estimates against `|Γ_z|₂²`, keyed by a short name.
pub fn h3_ratios(psi1: &ScalarField, gamma: &ScalarField) -> [(&'static str, EmpiricalRatio); 3] {
    let d = derivs(psi1);
    let zzz = ddz(&d.zz);
    let zzr = ddr(&d.zz);
    let rrz = ddz(&d.rr);
    let rzz = ddz(&d.rz);
    let rhs = sq(&ddz(gamma));
    let zz_axis = axis_line(&d.zz);
    [
        ("h3_zz", EmpiricalRatio { lhs: sq(&zzr) + sq(&zzz) + zz_axis, rhs }),
        ("h3_full", EmpiricalRatio { lhs: sq(&rrz) + sq(&rzz) + sq(&zzz) + zz_axis + wall_line(&d.rz), rhs }),
        ("h3_rz_over_r", EmpiricalRatio { lhs: sq(&div_by_r(&d.rz)), rhs }),
    ]
}

/// `∫(ψ₁,zzz² + ψ₁,rzz²) r^{2μ} + 2μ(1-μ) ∫ψ₁,zz² r^{2μ-2}` against `∫Γ_z² r^{2μ}`.
pub fn weighted_ratio(psi1: &ScalarField, gamma: &ScalarField, mu: f64) -> Result<EmpiricalRatio> {
    if !(mu > 0.0 && mu < 1.0) {
        return Err(Error::InvalidParameter(format!("mu must lie in (0, 1), got {mu}")));
    }
    let d = derivs(psi1);
    let zzz = ddz(&d.zz);
    let rzz = ddz(&d.rz);
    let k = 2.0 * mu;
    let lhs = weighted_sq(&zzz, k) + weighted_sq(&rzz, k) + 2.0 * mu * (1.0 - mu) * weighted_sq(&d.zz, k - 2.0);
    Ok(EmpiricalRatio { lhs, rhs: weighted_sq(&ddz(gamma), k) })
}

pub fn check_elliptic_h2(psi1: &ScalarField, gamma: &ScalarField) -> EstimateReport {
    h2_ratio(psi1, gamma).report("elliptic_h2")
}

pub fn check_elliptic_h3(psi1: &ScalarField, gamma: &ScalarField) -> EstimateReport {
    let parts = h3_ratios(psi1, gamma).iter().map(|(n, r)| r.report(*n)).collect();
    EstimateReport::worst("elliptic_h3", parts)
}

pub fn check_weighted_estimate(psi1: &ScalarField, gamma: &ScalarField, mu: f64) -> Result<EstimateReport> {
    Ok(weighted_ratio(psi1, gamma, mu)?.report(format!("elliptic_weighted mu={mu}")))
}
