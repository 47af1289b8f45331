use std::collections::BTreeMap;

use serde::Serialize;

use super::TheoremParams;
use crate::dynamics::Forcing;
use crate::error::{Error, Result};
use crate::field::CylVectorField;
use crate::norms::{lateral_lp, lp_norm, DiagnosticHistory, Exponent, VNormAccumulator};
use crate::ops::div_by_r;
use crate::scenarios::alpha_phi_bound;

fn ex(p: f64) -> Exponent {
    Exponent::new(p).expect("exponent ≥ 1")
}

fn vec_lp(v: &CylVectorField, p: Exponent) -> f64 {
    lp_norm(&v.magnitude(), p)
}

/// Spatial norms of the (time-independent) forcing.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ForcingNorms {
    pub f_l2: f64,
    pub f0_inf: f64,
    pub f0_l2: f64,
    pub g_inf: f64,
    pub g_l2: f64,
    pub g_integral: f64,
    /// `|f/r|_3`
    pub fbar_l3: f64,
    /// `|F_r/r|_{6/5}`, `|F_φ/r|_{6/5}`
    pub fbar_r_l65: f64,
    pub fbar_phi_l65: f64,
    pub f_phi_l3: f64,
    pub f_phi_lateral_l3: f64,
    pub curl_r_l65: f64,
    pub curl_z_l65: f64,
    pub f_phi_over_r_inf: f64,
    pub f_phi_l107: f64,
}

impl ForcingNorms {
    pub fn compute(forcing: &Forcing) -> Result<Self> {
        let (fbar, cbar) = forcing.over_r()?;
        let p65 = ex(1.2);
        Ok(ForcingNorms {
            f_l2: vec_lp(&forcing.f, ex(2.0)),
            f0_inf: forcing.f0.max_abs(),
            f0_l2: lp_norm(&forcing.f0, ex(2.0)),
            g_inf: forcing.g.max_abs(),
            g_l2: lp_norm(&forcing.g, ex(2.0)),
            g_integral: forcing.g.integral(),
            fbar_l3: vec_lp(&fbar, ex(3.0)),
            fbar_r_l65: lp_norm(&cbar.r, p65),
            fbar_phi_l65: lp_norm(&cbar.phi, p65),
            f_phi_l3: lp_norm(&forcing.f.phi, ex(3.0)),
            f_phi_lateral_l3: lateral_lp(&forcing.f.phi, ex(3.0)),
            curl_r_l65: lp_norm(&forcing.curl_f.r, p65),
            curl_z_l65: lp_norm(&forcing.curl_f.z, p65),
            f_phi_over_r_inf: div_by_r(&forcing.f.phi).max_abs(),
            f_phi_l107: lp_norm(&forcing.f.phi, ex(10.0 / 7.0)),
        })
    }
}

/// Data constants at time `t`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Constants {
    pub t: f64,
    pub theta_star: f64,
    pub theta_upper: f64,
    /// Bound on `|α| + |α'|` over `[θ_*, θ^*]`.
    pub phi: f64,
    pub d0: f64,
    /// Variant with `|∫g|²` and `|θ(0)|²`.
    pub d0_squared_variant: f64,
    pub d1: f64,
    /// `3φ²|f|²_{2,1} + 2|v(0)|²`, the right side of the velocity energy bound.
    pub d1_energy_sq: f64,
    pub d2: f64,
    pub b1: f64,
    pub d3: f64,
    pub d4: f64,
    /// `D₄² = (D₁² + D₂² + |u_z(0)|² + φ|f₀|²)/ν`.
    pub d4_alt: f64,
    pub d5: f64,
    /// `D₅² = D₁² + D₁²D₂ + D₁²D₂²`.
    pub d5_alt: f64,
    pub d6: f64,
    pub d7: f64,
    pub d8: f64,
    pub d9: f64,
    pub d10: f64,
    pub d11: f64,
    pub d12: f64,
    pub epsilon0: f64,
    pub epsilon1: f64,
    pub epsilon2: f64,
    pub d: f64,
    pub c0: f64,
    pub theta0: f64,
    pub forcing: ForcingNorms,
}

impl Constants {
    pub fn named(&self) -> BTreeMap<String, f64> {
        let pairs = [
            ("theta_star", self.theta_star),
            ("theta_upper", self.theta_upper),
            ("phi", self.phi),
            ("D0", self.d0),
            ("D1", self.d1),
            ("D2", self.d2),
            ("B1", self.b1),
            ("D3", self.d3),
            ("D4", self.d4),
            ("D5", self.d5),
            ("D6", self.d6),
            ("D7", self.d7),
            ("D8", self.d8),
            ("D9", self.d9),
            ("D10", self.d10),
            ("D11", self.d11),
            ("D12", self.d12),
        ];
        pairs.iter().map(|(k, v)| (k.to_string(), *v)).collect()
    }
}

struct InitialData {
    theta_l2: f64,
    theta_inf: f64,
    theta_min: f64,
    v_l2: f64,
    u_inf: f64,
    u_z_l2: f64,
    u_r_l2: f64,
    gamma_l2: f64,
    phi_l2: f64,
    omega_r_l2: f64,
    omega_z_l2: f64,
    v_phi_inf: f64,
    v_phi_ld: f64,
}

fn initial_data(h: &DiagnosticHistory, d: f64) -> Result<InitialData> {
    let i = |n: &str| h.initial(n);
    Ok(InitialData {
        theta_l2: i("theta.L2")?,
        theta_inf: i("theta.max")?.abs().max(i("theta.min")?.abs()),
        theta_min: i("theta.min")?,
        v_l2: i("v.sq")?.sqrt(),
        u_inf: i("u.Linf")?,
        u_z_l2: i("u_z.L2")?,
        u_r_l2: i("u_r.L2")?,
        gamma_l2: i("Gamma.L2")?,
        phi_l2: i("Phi.L2")?,
        omega_r_l2: i("omega_r.L2")?,
        omega_z_l2: i("omega_z.L2")?,
        v_phi_inf: i("v_phi.Linf")?,
        v_phi_ld: i(&format!("v_phi.L{}", ex(d)))?,
    })
}

/// Constants at the final record.
pub fn compute_constants(h: &DiagnosticHistory, forcing: &Forcing, theorem: &TheoremParams, nu: f64) -> Result<Constants> {
    let t = *h.times().last().ok_or_else(|| Error::MissingSeries("history is empty".into()))?;
    compute_constants_at(h, forcing, theorem, nu, t)
}

/// Constants over `[0, t]`.
pub fn compute_constants_at(
    h: &DiagnosticHistory,
    forcing: &Forcing,
    theorem: &TheoremParams,
    nu: f64,
    t: f64,
) -> Result<Constants> {
    Ok(ConstantsBuilder::new(h, forcing, theorem, nu)?.at(t))
}

/// Constants at every record time.
pub fn constants_series(h: &DiagnosticHistory, forcing: &Forcing, theorem: &TheoremParams, nu: f64) -> Result<Vec<Constants>> {
    let b = ConstantsBuilder::new(h, forcing, theorem, nu)?;
    Ok(h.times().iter().map(|&t| b.at(t)).collect())
}

struct ConstantsBuilder {
    fnm: ForcingNorms,
    init: InitialData,
    alpha: crate::dynamics::AlphaProfile,
    radius: f64,
    theorem: TheoremParams,
    nu: f64,
}

impl ConstantsBuilder {
    fn new(h: &DiagnosticHistory, forcing: &Forcing, theorem: &TheoremParams, nu: f64) -> Result<Self> {
        Ok(ConstantsBuilder {
            fnm: ForcingNorms::compute(forcing)?,
            init: initial_data(h, theorem.d)?,
            alpha: forcing.alpha,
            radius: h_radius(forcing),
            theorem: *theorem,
            nu,
        })
    }

    fn at(&self, t: f64) -> Constants {
        let (fnm, init, theorem, nu) = (self.fnm, &self.init, &self.theorem, self.nu);
        let sqrt_t = t.sqrt();
        let theta_star = init.theta_min;
        let theta_upper = fnm.g_inf * t + init.theta_inf;
        let phi = alpha_phi_bound(&self.alpha, theta_star, theta_upper);

        let g_2t = fnm.g_l2 * sqrt_t;
        let g_int_t = (fnm.g_integral * t).abs();
        let d0 = g_2t + g_int_t + init.theta_l2;
        let d0_squared_variant = g_2t + g_int_t.powi(2) + init.theta_l2.powi(2);

        let f_21 = fnm.f_l2 * t;
        let d1 = phi * f_21 + init.v_l2;
        let d1_energy_sq = 3.0 * phi * phi * f_21 * f_21 + 2.0 * init.v_l2 * init.v_l2;
        let d2 = phi * fnm.f0_inf * t + init.u_inf;
        let b1 = phi * fnm.fbar_l3 / nu.sqrt();
        let d3 = phi * fnm.fbar_r_l65 * sqrt_t / nu.sqrt() + fnm.fbar_phi_l65 * sqrt_t + d2 * init.gamma_l2 + init.phi_l2;

        let f0_sq_t = fnm.f0_l2.powi(2) * t;
        let (d1s, d2s) = (d1 * d1, d2 * d2);
        let d4 = (d1s * d2s + init.u_z_l2.powi(2) + phi * f0_sq_t).sqrt();
        let d4_alt = ((d1s + d2s + init.u_z_l2.powi(2) + phi * f0_sq_t) / nu).sqrt();
        let d5 = (d1s * (1.0 + d2) + d1s * d2s + phi * f0_sq_t + init.u_r_l2.powi(2)).sqrt();
        let d5_alt = (d1s + d1s * d2 + d1s * d2s).sqrt();

        // D₂²/min{1, D₂²}, taken as 1 when D₂ = 0.
        let factor = if d2 == 0.0 { 1.0 } else { d2s / d2s.min(1.0) };
        let eps = theorem.epsilon1 + theorem.epsilon2;
        let radius = self.radius;
        let d6 = (factor * d2.powf(1.0 - eps) * radius.powf(theorem.epsilon2) / theorem.epsilon2).sqrt();
        let d7 = factor.sqrt() * b1;
        let d8 = factor.sqrt() * d3;
        let d9 = (phi / nu).sqrt() * fnm.f_phi_l3;
        let d10 = ((d4 + d5) * fnm.f_phi_lateral_l3 * sqrt_t
            + (fnm.curl_r_l65.powi(2) * t + fnm.curl_z_l65.powi(2) * t) / nu
            + init.omega_r_l2.powi(2)
            + init.omega_z_l2.powi(2))
        .sqrt();
        let d11 = d2.sqrt() * phi * (fnm.f_phi_over_r_inf * t).sqrt() + init.v_phi_inf;
        let c0s = theorem.c0.powf(theorem.d - 2.0);
        let d12 = d2s * d1s / c0s + fnm.f_phi_l107 * t.powf(0.7) * d1 / c0s + 0.5 * init.v_phi_ld;

        Constants {
            t,
            theta_star,
            theta_upper,
            phi,
            d0,
            d0_squared_variant,
            d1,
            d1_energy_sq,
            d2,
            b1,
            d3,
            d4,
            d4_alt,
            d5,
            d5_alt,
            d6,
            d7,
            d8,
            d9,
            d10,
            d11,
            d12,
            epsilon0: theorem.epsilon0,
            epsilon1: theorem.epsilon1,
            epsilon2: theorem.epsilon2,
            d: theorem.d,
            c0: theorem.c0,
            theta0: theorem.theta0(),
            forcing: fnm,
        }
    }
}

fn h_radius(forcing: &Forcing) -> f64 {
    forcing.g.grid().radius()
}

/// `X(t_k) = ‖Φ‖_V + ‖Γ‖_V` at every record.
pub fn compute_x(h: &DiagnosticHistory) -> Result<Vec<f64>> {
    let (pl, pg) = (h.series("Phi.L2")?, h.series("Phi.grad2")?);
    let (gl, gg) = (h.series("Gamma.L2")?, h.series("Gamma.grad2")?);
    let (mut a, mut b) = (VNormAccumulator::new(), VNormAccumulator::new());
    let mut out = Vec::with_capacity(h.len());
    for (k, &t) in h.times().iter().enumerate() {
        a.update(t, pl[k], pg[k])?;
        b.update(t, gl[k], gg[k])?;
        out.push(a.value() + b.value());
    }
    Ok(out)
}

/// `|v_φ|_{d,∞,Ω^t} / |v_φ|_{∞,Ω^t}`; `None` when `v_φ ≡ 0`.
pub fn assumption3_ratio(h: &DiagnosticHistory, d: f64) -> Result<Option<f64>> {
    let num = h.max_of(&format!("v_phi.L{}", Exponent::new(d)?))?;
    let den = h.max_of("v_phi.Linf")?;
    Ok(if den > 0.0 { Some(num / den) } else { None })
}

