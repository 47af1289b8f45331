//! Seeded randomized suites for the flow-free checks. Every draw is a closed
//! form, so the same field is sampled on both grids of a refinement pair.

use std::f64::consts::PI;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::{
    check_hardy, h2_ratio, h3_ratios, hardy_interp_ratio, sobolev_ratio, weighted_ratio, EmpiricalRatio, EstimateReport,
    HardySample, SobolevParams,
};
use crate::elliptic::solve_psi1;
use crate::error::Result;
use crate::field::{Parity, ScalarField};
use crate::grid::Grid;
use crate::norms::Exponent;

/// Where a random field is forced to vanish.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Support {
    Free,
    /// Zero on `r = R`.
    Wall,
    /// Zero on `r = R` and `z = ±a`.
    Boundary,
}

/// Smooth field `Σ c_jk cos(jπr/R) cos(kπz/(2a) + φ_jk)`, times `R² - r²`
/// and `a² - z²` as the support requires.
#[derive(Debug, Clone, Serialize)]
pub struct RandomField {
    terms: Vec<(f64, f64, f64, f64)>,
    support: Support,
}

impl RandomField {
    pub fn draw(rng: &mut impl Rng, support: Support) -> Self {
        let mut terms = Vec::new();
        for j in 0..4 {
            for k in 0..4 {
                let c = rng.gen_range(-1.0..1.0) / (1.0 + (j + k) as f64).powi(2);
                terms.push((j as f64, k as f64, c, rng.gen_range(0.0..2.0 * PI)));
            }
        }
        RandomField { terms, support }
    }

    pub fn eval(&self, r: f64, z: f64, radius: f64, a: f64) -> f64 {
        let s: f64 = self.terms.iter().map(|&(j, k, c, ph)| c * (j * PI * r / radius).cos() * (k * PI * z / (2.0 * a) + ph).cos()).sum();
        match self.support {
            Support::Free => s,
            Support::Wall => s * (radius * radius - r * r),
            Support::Boundary => s * (radius * radius - r * r) * (a * a - z * z),
        }
    }

    pub fn sample(&self, g: &Arc<Grid>) -> ScalarField {
        let (radius, a) = (g.radius(), g.half_height());
        ScalarField::from_fn(g, Parity::Even, |r, z| self.eval(r, z, radius, a))
    }
}

fn pair(n: usize) -> Result<(Arc<Grid>, Arc<Grid>)> {
    Ok((Arc::new(Grid::new(1.0, 1.0, n, n)?), Arc::new(Grid::new(1.0, 1.0, 2 * n, 2 * n)?)))
}

fn refine_report(id: &str, draw: usize, coarse: EmpiricalRatio, fine: EmpiricalRatio) -> EstimateReport {
    EstimateReport::refinement(format!("{id} draw {draw}"), coarse.value(), fine.value())
}

/// Sample functions and `(β, p)` pairs for the Hardy inequality.
pub fn hardy_cases() -> Vec<(f64, Exponent, HardySample)> {
    use HardySample::*;
    let e = |p: f64| Exponent::new(p).unwrap();
    vec![
        (1.0, e(2.0), Exp { rate: 1.0 }),
        (0.75, e(2.0), Exp { rate: 1.0 }),
        (1.2, e(2.0), Exp { rate: 2.0 }),
        (1.0, e(2.0), Indicator { a: 0.0, b: 1.0 }),
        (1.0, e(2.0), Indicator { a: 1.0, b: 2.0 }),
        (1.0, e(3.0), Gaussian),
        (1.5, e(2.0), PolyExp { power: 1 }),
        (2.0, e(2.0), PolyExp { power: 2 }),
        (1.0, e(1.5), Exp { rate: 1.0 }),
        (1.0, Exponent::INF, Exp { rate: 1.0 }),
        (1.0, e(2.0), Rational { power: 3.0 }),
        (0.8, e(2.0), Gaussian),
        (1.2, e(2.0), Indicator { a: 0.0, b: 1.0 }),
        (0.0, e(2.0), Exp { rate: 1.0 }),
        (0.25, e(2.0), Exp { rate: 1.0 }),
        (0.0, e(2.0), Indicator { a: 0.0, b: 1.0 }),
        (0.2, e(3.0), Gaussian),
        (0.0, e(1.5), PolyExp { power: 1 }),
        (0.25, e(2.0), Indicator { a: 1.0, b: 2.0 }),
        (0.1, e(1.2), Exp { rate: 3.0 }),
        (1.0, e(2.0), Zero),
    ]
}

pub fn hardy_suite() -> Result<Vec<EstimateReport>> {
    hardy_cases().iter().map(|(b, p, s)| check_hardy(*b, *p, s)).collect()
}

pub fn sobolev_params() -> Vec<SobolevParams> {
    vec![
        SobolevParams { p: 2.0, p1: 2.0, p2: 2.0, l: 2, r: 1 },
        SobolevParams { p: 3.0, p1: 2.0, p2: 2.0, l: 2, r: 1 },
    ]
}

/// Sobolev interpolation ratios on `draws` random fields, grids `n` and `2n`.
pub fn sobolev_suite(seed: u64, draws: usize, n: usize) -> Result<Vec<EstimateReport>> {
    let (gc, gf) = pair(n)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let fields: Vec<RandomField> = (0..draws).map(|_| RandomField::draw(&mut rng, Support::Free)).collect();
    let mut out = Vec::new();
    for sp in sobolev_params() {
        let mut parts = Vec::new();
        for (k, f) in fields.iter().enumerate() {
            let c = sobolev_ratio(&f.sample(&gc), &sp)?;
            let fi = sobolev_ratio(&f.sample(&gf), &sp)?;
            parts.push(refine_report("sobolev_interp", k, c, fi));
        }
        let id = format!("sobolev_interp p={} p1={} p2={} l={} r={}", sp.p, sp.p1, sp.p2, sp.l, sp.r);
        out.push(EstimateReport::worst(id, parts));
    }
    Ok(out)
}

pub fn hardy_interp_params() -> Vec<(f64, f64, f64)> {
    vec![(2.0, 1.0, 2.0), (2.0, 1.0, 4.0), (2.0, 0.5, 3.0), (1.5, 1.0, 2.0)]
}

/// Hardy interpolation ratios on random fields vanishing on `r = R`.
pub fn hardy_interp_suite(seed: u64, draws: usize, n: usize, params: &[(f64, f64, f64)]) -> Result<Vec<EstimateReport>> {
    let (gc, gf) = pair(n)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x9e37_79b9);
    let fields: Vec<RandomField> = (0..draws).map(|_| RandomField::draw(&mut rng, Support::Wall)).collect();
    let mut out = Vec::new();
    for &(p, s, q) in params {
        let mut parts = Vec::new();
        for (k, f) in fields.iter().enumerate() {
            let c = hardy_interp_ratio(&f.sample(&gc), p, s, q)?;
            let fi = hardy_interp_ratio(&f.sample(&gf), p, s, q)?;
            parts.push(refine_report("hardy_interp", k, c, fi));
        }
        out.push(EstimateReport::worst(format!("hardy_interp p={p} s={s} q={q}"), parts));
    }
    Ok(out)
}

/// `H²`, `H³` and weighted estimates of `ψ₁` for random even `Γ` vanishing on
/// the boundary, as the vorticity boundary condition requires.
pub fn elliptic_suite(seed: u64, draws: usize, n: usize, mus: &[f64], tol: f64) -> Result<Vec<EstimateReport>> {
    let (gc, gf) = pair(n)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5851_f42d);
    let fields: Vec<RandomField> = (0..draws).map(|_| RandomField::draw(&mut rng, Support::Boundary)).collect();
    let mut h2 = Vec::new();
    let mut h3: Vec<Vec<EstimateReport>> = vec![Vec::new(); 3];
    let mut names = [""; 3];
    let mut weighted: Vec<Vec<EstimateReport>> = vec![Vec::new(); mus.len()];
    for (k, f) in fields.iter().enumerate() {
        let (gam_c, gam_f) = (f.sample(&gc), f.sample(&gf));
        let (psi_c, psi_f) = (solve_psi1(&gam_c, tol)?.field, solve_psi1(&gam_f, tol)?.field);
        h2.push(refine_report("elliptic_h2", k, h2_ratio(&psi_c, &gam_c), h2_ratio(&psi_f, &gam_f)));
        let (a, b) = (h3_ratios(&psi_c, &gam_c), h3_ratios(&psi_f, &gam_f));
        for m in 0..3 {
            names[m] = a[m].0;
            h3[m].push(refine_report(a[m].0, k, a[m].1, b[m].1));
        }
        for (m, &mu) in mus.iter().enumerate() {
            let c = weighted_ratio(&psi_c, &gam_c, mu)?;
            let fi = weighted_ratio(&psi_f, &gam_f, mu)?;
            weighted[m].push(refine_report("elliptic_weighted", k, c, fi));
        }
    }
    let mut out = vec![EstimateReport::worst("elliptic_h2", h2)];
    for (m, parts) in h3.into_iter().enumerate() {
        out.push(EstimateReport::worst(format!("elliptic_{}", names[m]), parts));
    }
    for (m, parts) in weighted.into_iter().enumerate() {
        out.push(EstimateReport::worst(format!("elliptic_weighted mu={}", mus[m]), parts));
    }
    Ok(out)
}
