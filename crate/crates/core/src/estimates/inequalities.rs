//! Hardy, Sobolev-interpolation and Hardy-interpolation inequalities.

use quadrature::integrate;
use serde::Serialize;

use super::{EmpiricalRatio, EstimateReport};
use crate::error::{Error, Result};
use crate::field::ScalarField;
use crate::norms::{grad_lp, lp_norm, weighted_lq, Exponent};
use crate::ops::{ddr, ddz, div_by_r};

const QUAD_TOL: f64 = 1e-13;
/// Outer end of the integration range on `ℝ₊`.
const X_CUT: f64 = 1048576.0;

/// Nonnegative sample functions on `ℝ₊`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum HardySample {
    Zero,
    /// `e^{-k y}`
    Exp { rate: f64 },
    /// `y^m e^{-y}`
    PolyExp { power: i32 },
    /// `e^{-y²}`
    Gaussian,
    /// Indicator of `[a, b]`.
    Indicator { a: f64, b: f64 },
    /// `(1 + y)^{-m}`
    Rational { power: f64 },
}

impl HardySample {
    pub fn eval(&self, y: f64) -> f64 {
        match *self {
            HardySample::Zero => 0.0,
            HardySample::Exp { rate } => (-rate * y).exp(),
            HardySample::PolyExp { power } => y.powi(power) * (-y).exp(),
            HardySample::Gaussian => (-y * y).exp(),
            HardySample::Indicator { a, b } => {
                if (a..=b).contains(&y) {
                    1.0
                } else {
                    0.0
                }
            }
            HardySample::Rational { power } => (1.0 + y).powf(-power),
        }
    }

    fn breakpoints(&self) -> Vec<f64> {
        match *self {
            HardySample::Indicator { a, b } => vec![a, b],
            _ => vec![],
        }
    }
}

/// Both sides of the Hardy inequality and the bound on the truncated tail of the left side.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HardySides {
    pub lhs: f64,
    pub rhs: f64,
    pub tail: f64,
}

fn panels(sample: &HardySample) -> Vec<f64> {
    let mut pts = vec![0.0];
    let mut x = 1.0 / 64.0;
    while x <= X_CUT {
        pts.push(x);
        x *= 2.0;
    }
    pts.extend(sample.breakpoints().into_iter().filter(|&b| b > 0.0 && b < X_CUT));
    pts.sort_by(|a, b| a.partial_cmp(b).unwrap());
    pts.dedup();
    pts
}

fn quad(f: impl Fn(f64) -> f64, a: f64, b: f64) -> f64 {
    if b <= a {
        return 0.0;
    }
    integrate(f, a, b, QUAD_TOL).integral
}

/// `|x^{-β} F|_p` and `|x^{1-β} f|_p / |β - 1/p|` on `ℝ₊`, with `F = ∫₀^x f`
/// for `β > 1/p` and `F = ∫_x^∞ f` for `β < 1/p`.
pub fn hardy_sides(beta: f64, p: Exponent, sample: &HardySample) -> Result<HardySides> {
    let inv_p = if p.is_inf() { 0.0 } else { 1.0 / p.value() };
    if (beta - inv_p).abs() < 1e-12 {
        return Err(Error::InvalidParameter(format!("Hardy inequality needs beta != 1/p (beta = {beta})")));
    }
    let outward = beta > inv_p;
    let f = |y: f64| sample.eval(y);
    let pts = panels(sample);
    let n = pts.len();
    // F at the panel ends.
    let pieces: Vec<f64> = pts.windows(2).map(|w| quad(f, w[0], w[1])).collect();
    let mut at = vec![0.0; n];
    if outward {
        for k in 1..n {
            at[k] = at[k - 1] + pieces[k - 1];
        }
    } else {
        for k in (0..n - 1).rev() {
            at[k] = at[k + 1] + pieces[k];
        }
        if at[0] > 0.0 && at[n - 1] > 1e-12 * at[0] {
            return Err(Error::InvalidParameter("sample does not decay fast enough for beta < 1/p".into()));
        }
    }
    let big_f = |k: usize, x: f64| {
        if outward {
            at[k] + quad(f, pts[k], x)
        } else {
            at[k + 1] + quad(f, x, pts[k + 1])
        }
    };
    let coef = 1.0 / (beta - inv_p).abs();

    if p.is_inf() {
        let mut lhs: f64 = 0.0;
        let mut rhs: f64 = 0.0;
        for k in 0..n - 1 {
            for s in 0..=64 {
                let x = pts[k] + (pts[k + 1] - pts[k]) * s as f64 / 64.0;
                if x > 0.0 {
                    lhs = lhs.max(x.powf(-beta) * big_f(k, x).abs());
                }
                rhs = rhs.max(x.powf(1.0 - beta) * f(x).abs());
            }
        }
        return Ok(HardySides { lhs, rhs: coef * rhs, tail: 0.0 });
    }

    let pv = p.value();
    let mut l = 0.0;
    let mut r = 0.0;
    for k in 0..n - 1 {
        l += quad(|x| x.powf(-beta * pv) * big_f(k, x).abs().powf(pv), pts[k], pts[k + 1]);
        r += quad(|x| x.powf((1.0 - beta) * pv) * f(x).abs().powf(pv), pts[k], pts[k + 1]);
    }
    let tail = if outward { at[n - 1].powf(pv) * X_CUT.powf(1.0 - beta * pv) / (beta * pv - 1.0) } else { 0.0 };
    Ok(HardySides { lhs: (l + tail).powf(1.0 / pv), rhs: coef * r.powf(1.0 / pv), tail })
}

/// Passes when `lhs ≤ rhs (1 + 10⁻⁶)`; the left side includes its tail bound.
pub fn check_hardy(beta: f64, p: Exponent, sample: &HardySample) -> Result<EstimateReport> {
    let s = hardy_sides(beta, p, sample)?;
    Ok(EstimateReport::new(format!("hardy beta={beta} p={p}"), s.lhs, s.rhs, 1e-6, 0.0)
        .with_note(format!("sample {sample:?}, tail {:e}", s.tail)))
}

/// Exponents of the Sobolev interpolation inequality.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SobolevParams {
    pub p: f64,
    pub p1: f64,
    pub p2: f64,
    pub l: u32,
    pub r: u32,
}

/// `θ` from `3/p - r = (1-θ) 3/p₁ + θ (3/p₂ - l)`; must lie in `[r/l, 1]`.
pub fn sobolev_theta(sp: &SobolevParams) -> Result<f64> {
    for v in [sp.p, sp.p1, sp.p2] {
        Exponent::new(v)?;
    }
    if sp.l == 0 || sp.l > 2 || sp.r > sp.l {
        return Err(Error::InvalidParameter(format!("need 0 <= r <= l <= 2 (r = {}, l = {})", sp.r, sp.l)));
    }
    let n = 3.0;
    let (a, a1, a2) = (n / sp.p, n / sp.p1, n / sp.p2);
    let theta = (a1 - a + sp.r as f64) / (a1 - a2 + sp.l as f64);
    let lo = sp.r as f64 / sp.l as f64;
    if !(theta >= lo - 1e-12 && theta <= 1.0 + 1e-12) {
        return Err(Error::InvalidParameter(format!("interpolation exponent theta = {theta} is outside [r/l, 1] = [{lo}, 1]")));
    }
    Ok(theta)
}

/// Derivatives of order `k` in the cylindrical frame.
fn derivatives(f: &ScalarField, k: u32) -> Vec<ScalarField> {
    match k {
        0 => vec![f.clone()],
        1 => vec![ddr(f), ddz(f)],
        _ => {
            let (fr, fz) = (ddr(f), ddz(f));
            vec![ddr(&fr), ddz(&fr), ddz(&fz), div_by_r(&fr)]
        }
    }
}

fn sum_lp(fields: &[ScalarField], p: f64) -> f64 {
    let e = Exponent::new(p).expect("validated exponent");
    fields.iter().map(|d| lp_norm(d, e)).sum()
}

/// `Σ_{|α|=r} |D^α f|_p` against `|f|_{p₁}^{1-θ} ‖f‖_{W^l_{p₂}}^θ`.
pub fn sobolev_ratio(f: &ScalarField, sp: &SobolevParams) -> Result<EmpiricalRatio> {
    let theta = sobolev_theta(sp)?;
    let lhs = sum_lp(&derivatives(f, sp.r), sp.p);
    let w: f64 = (0..=sp.l).map(|k| sum_lp(&derivatives(f, k), sp.p2)).sum();
    let low = lp_norm(f, Exponent::new(sp.p1)?);
    Ok(EmpiricalRatio { lhs, rhs: low.powf(1.0 - theta) * w.powf(theta) })
}

pub fn check_sobolev_interp(f: &ScalarField, sp: &SobolevParams) -> Result<EstimateReport> {
    Ok(sobolev_ratio(f, sp)?.report("sobolev_interp"))
}

/// Exponents `((3-s)/q - 3/p + 1, 3/p - (3-s)/q)` after checking the admissible window.
pub fn hardy_interp_exponents(p: f64, s: f64, q: f64) -> Result<(f64, f64)> {
    Exponent::new(p)?;
    if !(s >= 0.0 && s <= p) {
        return Err(Error::InvalidParameter(format!("need 0 <= s <= p (s = {s}, p = {p})")));
    }
    if !(s < 2.0) {
        return Err(Error::InvalidParameter(format!("need s < 2 (s = {s})")));
    }
    let upper = if p < 3.0 { p * (3.0 - s) / (3.0 - p) } else { f64::INFINITY };
    if !(q >= p && q <= upper * (1.0 + 1e-12)) {
        return Err(Error::InvalidParameter(format!("need p <= q <= p(3-s)/(3-p) = {upper} (q = {q})")));
    }
    let a = (3.0 - s) / q - 3.0 / p + 1.0;
    Ok((a, 1.0 - a))
}

/// `(∫|f|^q r^{-s})^{1/q}` against `|f|_p^a |∇f|_p^b`. Values on `r = R` are zeroed first.
pub fn hardy_interp_ratio(f: &ScalarField, p: f64, s: f64, q: f64) -> Result<EmpiricalRatio> {
    let (a, b) = hardy_interp_exponents(p, s, q)?;
    let g = f.grid();
    let mut f = f.clone();
    for j in 0..=g.nz() {
        f.set(g.nr(), j, 0.0);
    }
    let pe = Exponent::new(p)?;
    let lhs = weighted_lq(&f, q, s)?;
    let rhs = lp_norm(&f, pe).powf(a) * grad_lp(&f, pe).powf(b);
    Ok(EmpiricalRatio { lhs, rhs })
}

pub fn check_hardy_interp(f: &ScalarField, p: f64, s: f64, q: f64) -> Result<EstimateReport> {
    Ok(hardy_interp_ratio(f, p, s, q)?.report(format!("hardy_interp p={p} s={s} q={q}")))
}

