//! Lebesgue, weighted, gradient and mixed space–time norms with the
//! cylindrical measure `2π r dr dz`.

mod history;

pub use history::{DiagnosticHistory, Recorder, TrackedField};

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::field::ScalarField;
use crate::ops::{ddr, ddz};

/// Integrability exponent in `[1, ∞]`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct Exponent(f64);

impl Exponent {
    pub const INF: Exponent = Exponent(f64::INFINITY);

    pub fn new(p: f64) -> Result<Self> {
        if p.is_nan() || p < 1.0 {
            return Err(Error::InvalidParameter(format!("norm exponent must lie in [1, ∞], got {p}")));
        }
        Ok(Exponent(p))
    }

    pub fn value(self) -> f64 {
        self.0
    }

    pub fn is_inf(self) -> bool {
        self.0.is_infinite()
    }
}

impl fmt::Display for Exponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_inf() {
            write!(f, "inf")
        } else {
            write!(f, "{}", self.0)
        }
    }
}

impl FromStr for Exponent {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim();
        if matches!(t, "inf" | "infinity" | "∞") {
            return Ok(Exponent::INF);
        }
        let v = match t.split_once('/') {
            Some((n, d)) => {
                let n: f64 = n.trim().parse().map_err(|_| Error::Config(format!("bad exponent `{s}`")))?;
                let d: f64 = d.trim().parse().map_err(|_| Error::Config(format!("bad exponent `{s}`")))?;
                n / d
            }
            None => t.parse().map_err(|_| Error::Config(format!("bad exponent `{s}`")))?,
        };
        Exponent::new(v)
    }
}

impl Serialize for Exponent {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        if self.is_inf() {
            s.serialize_str("inf")
        } else {
            s.serialize_f64(self.0)
        }
    }
}

impl<'de> Deserialize<'de> for Exponent {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Num(f64),
            Text(String),
        }
        match Raw::deserialize(d)? {
            Raw::Num(v) => Exponent::new(v).map_err(serde::de::Error::custom),
            Raw::Text(t) => t.parse().map_err(serde::de::Error::custom),
        }
    }
}

/// `|f|_{p,Ω}`; the `∞` case is the max over every node.
pub fn lp_norm(f: &ScalarField, p: Exponent) -> f64 {
    if p.is_inf() {
        return f.max_abs();
    }
    let p = p.value();
    let w = f.grid().quad_weights();
    let s: f64 = if p == 1.0 {
        f.values().iter().zip(w).map(|(v, w)| w * v.abs()).sum()
    } else if p == 2.0 {
        f.values().iter().zip(w).map(|(v, w)| w * v * v).sum()
    } else {
        f.values().iter().zip(w).map(|(v, w)| w * v.abs().powf(p)).sum()
    };
    s.powf(1.0 / p)
}

/// `(∫ |f|^q r^{-s} dx)^{1/q}`, `0 ≤ s < 2`. The axis node has zero weight.
pub fn weighted_lq(f: &ScalarField, q: f64, s: f64) -> Result<f64> {
    if !(q >= 1.0) {
        return Err(Error::InvalidParameter(format!("weighted norm needs q ≥ 1, got {q}")));
    }
    if !(0.0..2.0).contains(&s) {
        return Err(Error::InvalidParameter(format!("weight exponent s must satisfy 0 ≤ s < 2, got {s}")));
    }
    if s == 0.0 {
        return Ok(lp_norm(f, Exponent(q)));
    }
    let g = f.grid();
    let mut sum = 0.0;
    for i in 1..=g.nr() {
        let rs = g.r(i).powf(-s);
        for j in 0..=g.nz() {
            sum += g.weight(i, j) * f.get(i, j).abs().powf(q) * rs;
        }
    }
    Ok(sum.powf(1.0 / q))
}

/// `∫ (f_r² + f_z²) dx`.
pub fn grad_sq(f: &ScalarField) -> f64 {
    let (fr, fz) = (ddr(f), ddz(f));
    fr.values()
        .iter()
        .zip(fz.values())
        .zip(f.grid().quad_weights())
        .map(|((a, b), w)| w * (a * a + b * b))
        .sum()
}

/// `|∇f|_{2,Ω}`.
pub fn grad_l2(f: &ScalarField) -> f64 {
    grad_sq(f).sqrt()
}

/// `|∇f|_{p,Ω}` with `|∇f| = sqrt(f_r² + f_z²)` pointwise.
pub fn grad_lp(f: &ScalarField, p: Exponent) -> f64 {
    let (fr, fz) = (ddr(f), ddz(f));
    lp_norm(&fr.zip_map(&fz, crate::field::Parity::Even, |a, b| a.hypot(b)), p)
}

/// `(∫_{S₁} |f|^p dS)^{1/p}` on the lateral wall `r = R`.
pub fn lateral_lp(f: &ScalarField, p: Exponent) -> f64 {
    let g = f.grid();
    let nr = g.nr();
    if p.is_inf() {
        return (0..=g.nz()).map(|j| f.get(nr, j).abs()).fold(0.0, f64::max);
    }
    let scale = 2.0 * std::f64::consts::PI * g.radius();
    let s: f64 = g.z_line_weights().iter().enumerate().map(|(j, w)| scale * w * f.get(nr, j).abs().powf(p.value())).sum();
    s.powf(1.0 / p.value())
}

/// `L_q` in time (trapezoid) of sampled values; `q = ∞` is the max.
pub fn time_norm(times: &[f64], values: &[f64], q: Exponent) -> f64 {
    if q.is_inf() {
        return values.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
    }
    let q = q.value();
    let mut s = 0.0;
    for k in 1..times.len() {
        let dt = times[k] - times[k - 1];
        s += 0.5 * dt * (values[k].abs().powf(q) + values[k - 1].abs().powf(q));
    }
    s.powf(1.0 / q)
}

/// `|w|_{p,q,Ω^t}` from the recorded spatial `L_p` series of `field`.
pub fn mixed_norm(history: &DiagnosticHistory, field: &str, p: Exponent, q: Exponent) -> Result<f64> {
    let name = history::lp_column(field, p);
    mixed_norm_series(history, &name, q)
}

/// `L_q` in time of a recorded series.
pub fn mixed_norm_series(history: &DiagnosticHistory, series: &str, q: Exponent) -> Result<f64> {
    if history.is_empty() {
        return Err(Error::MissingSeries("history is empty".into()));
    }
    Ok(time_norm(history.times(), history.series(series)?, q))
}

/// Running pieces of `‖w‖_V = sup_t |w|₂ + (∫₀ᵗ |∇w|₂² dt')^{1/2}`.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize)]
pub struct VNormAccumulator {
    pub sup_so_far: f64,
    pub grad_sq_integral: f64,
    last: Option<(f64, f64)>,
}

impl VNormAccumulator {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn update(&mut self, t: f64, l2: f64, grad_l2: f64) -> Result<()> {
        let g2 = grad_l2 * grad_l2;
        if let Some((t0, g0)) = self.last {
            if !(t > t0) {
                return Err(Error::InvalidParameter(format!("V-norm update at t = {t} does not follow t = {t0}")));
            }
            self.grad_sq_integral += 0.5 * (t - t0) * (g0 + g2);
        }
        self.sup_so_far = self.sup_so_far.max(l2);
        self.last = Some((t, g2));
        Ok(())
    }

    pub fn value(&self) -> f64 {
        self.sup_so_far + self.grad_sq_integral.sqrt()
    }
}
