//! Momentum/heat sources and the buoyancy coefficient profile α(θ).

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{CylVectorField, Parity, ScalarField};
use crate::grid::Grid;
use crate::ops::curl_cyl;

/// Named analytic coefficient `α(θ)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum AlphaProfile {
    /// `α = c`
    Constant { value: f64 },
    /// `α = k θ`
    Linear { slope: f64 },
    /// `α = A sin θ`
    Sine { amplitude: f64 },
}

impl Default for AlphaProfile {
    fn default() -> Self {
        AlphaProfile::Constant { value: 1.0 }
    }
}

impl AlphaProfile {
    pub fn value(&self, theta: f64) -> f64 {
        match *self {
            AlphaProfile::Constant { value } => value,
            AlphaProfile::Linear { slope } => slope * theta,
            AlphaProfile::Sine { amplitude } => amplitude * theta.sin(),
        }
    }

    pub fn derivative(&self, theta: f64) -> f64 {
        match *self {
            AlphaProfile::Constant { .. } => 0.0,
            AlphaProfile::Linear { slope } => slope,
            AlphaProfile::Sine { amplitude } => amplitude * theta.cos(),
        }
    }
}

/// Time-independent forcing sampled on the grid.
#[derive(Debug, Clone)]
pub struct Forcing {
    /// Momentum source `f`.
    pub f: CylVectorField,
    /// `F = curl f`.
    pub curl_f: CylVectorField,
    /// `f₀ = r f_φ` (even, zero on the axis).
    pub f0: ScalarField,
    /// Heat source, `g ≥ 0`.
    pub g: ScalarField,
    pub alpha: AlphaProfile,
}

impl Forcing {
    pub fn zero(grid: &Arc<Grid>) -> Self {
        Forcing {
            f: CylVectorField::zeros(grid),
            curl_f: CylVectorField::zeros(grid),
            f0: ScalarField::zeros(grid, Parity::Even),
            g: ScalarField::zeros(grid, Parity::Even),
            alpha: AlphaProfile::default(),
        }
    }

    /// Forcing with a closed-form curl.
    pub fn analytic(
        grid: &Arc<Grid>,
        f: impl Fn(f64, f64) -> [f64; 3],
        curl: impl Fn(f64, f64) -> [f64; 3],
        g: impl Fn(f64, f64) -> f64,
        alpha: AlphaProfile,
    ) -> Result<Self> {
        let f = CylVectorField::from_fn(grid, f);
        let curl_f = CylVectorField::from_fn(grid, curl);
        Self::assemble(grid, f, curl_f, ScalarField::from_fn(grid, Parity::Even, g), alpha)
    }

    /// Forcing given only on the grid; the curl is taken discretely.
    pub fn sampled(grid: &Arc<Grid>, f: CylVectorField, g: ScalarField, alpha: AlphaProfile) -> Result<Self> {
        let curl_f = curl_cyl(&f);
        Self::assemble(grid, f, curl_f, g, alpha)
    }

    fn assemble(
        grid: &Arc<Grid>,
        f: CylVectorField,
        curl_f: CylVectorField,
        g: ScalarField,
        alpha: AlphaProfile,
    ) -> Result<Self> {
        if let Some(v) = g.values().iter().find(|v| **v < 0.0 || !v.is_finite()) {
            return Err(Error::InvalidParameter(format!("heat source g must be nonnegative, found {v}")));
        }
        let f0 = ScalarField::from_values(
            grid,
            Parity::Even,
            f.phi.values().iter().enumerate().map(|(k, &v)| grid.r(k / (grid.nz() + 1)) * v).collect(),
        );
        Ok(Forcing { f, curl_f, f0, g, alpha })
    }

    pub fn is_zero(&self) -> bool {
        [&self.f.r, &self.f.phi, &self.f.z, &self.g].iter().all(|c| c.max_abs() == 0.0)
    }

    /// `f̄ = f/r` and `F̄ = F/r`; fails unless every component vanishes on the axis.
    pub fn over_r(&self) -> Result<(CylVectorField, CylVectorField)> {
        let check = |name: &str, c: &ScalarField| -> Result<()> {
            let g = c.grid();
            let scale = 1e-12 * (1.0 + c.max_abs());
            for j in 0..=g.nz() {
                if c.get(0, j).abs() > scale {
                    return Err(Error::SingularForcing(format!(
                        "{name} = {} at (r=0, z={}) so {name}/r is unbounded",
                        c.get(0, j),
                        g.z(j)
                    )));
                }
            }
            Ok(())
        };
        check("f_z", &self.f.z)?;
        check("F_z", &self.curl_f.z)?;
        Ok((over_r_vec(&self.f), over_r_vec(&self.curl_f)))
    }
}

/// Component-wise division by `r`. The quotient has flipped parity, so this
/// is not a `CylVectorField` in the regularity sense, only a container.
fn over_r_vec(v: &CylVectorField) -> CylVectorField {
    use crate::ops::div_by_r;
    CylVectorField { r: div_by_r(&v.r), phi: div_by_r(&v.phi), z: div_by_r(&v.z) }
}
