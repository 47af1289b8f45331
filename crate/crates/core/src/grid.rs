//! Node-centered (r, z) discretization of the cylinder `{r < R, |z| < a}`.
//!
//! Nodes sit at `r_i = i·dr` (the axis node `i = 0` included) and
//! `z_j = -a + j·dz`. Quadrature weights approximate `∫ · 2π r dr dz` with the
//! trapezoid rule in both directions; the axis node carries zero weight.

use std::f64::consts::PI;

use crate::error::{Error, Result};

/// Smallest admissible cell count in either direction.
pub const MIN_CELLS: usize = 8;

#[derive(Debug, Clone, PartialEq)]
pub struct Grid {
    radius: f64,
    half_height: f64,
    nr: usize,
    nz: usize,
    dr: f64,
    dz: f64,
    r: Vec<f64>,
    z: Vec<f64>,
    weights: Vec<f64>,
}

impl Grid {
    pub fn new(radius: f64, half_height: f64, nr: usize, nz: usize) -> Result<Self> {
        if !(radius > 0.0 && radius.is_finite()) {
            return Err(Error::Config(format!("cylinder radius R must be positive, got {radius}")));
        }
        if !(half_height > 0.0 && half_height.is_finite()) {
            return Err(Error::Config(format!("half-height a must be positive, got {half_height}")));
        }
        if nr < MIN_CELLS || nz < MIN_CELLS {
            return Err(Error::Config(format!(
                "grid too coarse: nr = {nr}, nz = {nz} (both must be at least {MIN_CELLS})"
            )));
        }
        Ok(Self::build(radius, half_height, nr, nz))
    }

    /// Builds without the minimum-resolution rule. Used by stencil tests on tiny grids.
    pub fn new_unchecked(radius: f64, half_height: f64, nr: usize, nz: usize) -> Self {
        assert!(nr >= 3 && nz >= 3, "stencils need at least 3 cells per direction");
        Self::build(radius, half_height, nr, nz)
    }

    fn build(radius: f64, half_height: f64, nr: usize, nz: usize) -> Self {
        let dr = radius / nr as f64;
        let dz = 2.0 * half_height / nz as f64;
        let mut r: Vec<f64> = (0..=nr).map(|i| i as f64 * dr).collect();
        r[nr] = radius;
        let mut z: Vec<f64> = (0..=nz).map(|j| -half_height + j as f64 * dz).collect();
        z[0] = -half_height;
        z[nz] = half_height;

        let radial_weight = |i: usize| {
            let end = if i == 0 || i == nr { 0.5 } else { 1.0 };
            end * r[i] * dr
        };
        let axial_weight = |j: usize| if j == 0 || j == nz { 0.5 * dz } else { dz };

        let mut weights = Vec::with_capacity((nr + 1) * (nz + 1));
        for i in 0..=nr {
            let wr = 2.0 * PI * radial_weight(i);
            for j in 0..=nz {
                weights.push(wr * axial_weight(j));
            }
        }
        Grid { radius, half_height, nr, nz, dr, dz, r, z, weights }
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }
    pub fn half_height(&self) -> f64 {
        self.half_height
    }
    pub fn nr(&self) -> usize {
        self.nr
    }
    pub fn nz(&self) -> usize {
        self.nz
    }
    pub fn dr(&self) -> f64 {
        self.dr
    }
    pub fn dz(&self) -> f64 {
        self.dz
    }
    /// Characteristic mesh size `max(dr, dz)`.
    pub fn h(&self) -> f64 {
        self.dr.max(self.dz)
    }
    pub fn r_coords(&self) -> &[f64] {
        &self.r
    }
    pub fn z_coords(&self) -> &[f64] {
        &self.z
    }
    pub fn r(&self, i: usize) -> f64 {
        self.r[i]
    }
    pub fn z(&self, j: usize) -> f64 {
        self.z[j]
    }
    pub fn quad_weights(&self) -> &[f64] {
        &self.weights
    }
    pub fn weight(&self, i: usize, j: usize) -> f64 {
        self.weights[self.idx(i, j)]
    }

    /// Total node count `(nr + 1)(nz + 1)`.
    pub fn len(&self) -> usize {
        (self.nr + 1) * (self.nz + 1)
    }
    pub fn is_empty(&self) -> bool {
        false
    }

    /// Row-major index with `j` (axial) varying fastest.
    #[inline]
    pub fn idx(&self, i: usize, j: usize) -> usize {
        i * (self.nz + 1) + j
    }

    /// `|Ω| = π R² · 2a`, exact.
    pub fn volume(&self) -> f64 {
        PI * self.radius * self.radius * 2.0 * self.half_height
    }

    /// Sum of the quadrature weights (the discrete measure of Ω).
    pub fn measure(&self) -> f64 {
        self.weights.iter().sum()
    }

    /// 1-D trapezoid weights in z (no 2π, no r factor), for line integrals over `dz`.
    pub fn z_line_weights(&self) -> Vec<f64> {
        (0..=self.nz)
            .map(|j| if j == 0 || j == self.nz { 0.5 * self.dz } else { self.dz })
            .collect()
    }

    pub fn is_boundary(&self, i: usize, j: usize) -> bool {
        i == self.nr || j == 0 || j == self.nz
    }

    /// Same geometry with both cell counts doubled.
    pub fn refined(&self) -> Grid {
        Self::build(self.radius, self.half_height, 2 * self.nr, 2 * self.nz)
    }

    pub fn same_shape(&self, other: &Grid) -> bool {
        self.nr == other.nr && self.nz == other.nz && self.radius == other.radius && self.half_height == other.half_height
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn weighted_sum(g: &Grid, f: impl Fn(f64, f64) -> f64) -> f64 {
        let mut s = 0.0;
        for i in 0..=g.nr() {
            for j in 0..=g.nz() {
                s += g.weight(i, j) * f(g.r(i), g.z(j));
            }
        }
        s
    }

    #[test]
    fn spacing_on_small_grid() {
        let g = Grid::new_unchecked(1.0, 1.0, 4, 4);
        assert_eq!(g.dr(), 0.25);
        assert_eq!(g.dz(), 0.5);
    }

    #[test]
    fn endpoints_are_exact() {
        let g = Grid::new(1.3, 0.7, 13, 17).unwrap();
        assert_eq!(g.r(0), 0.0);
        assert_eq!(g.r(g.nr()), 1.3);
        assert_eq!(g.z(0), -0.7);
        assert_eq!(g.z(g.nz()), 0.7);
    }

    #[test]
    fn measure_matches_cylinder_volume() {
        for &(r, a, nr, nz) in &[(1.0, 1.0, 8, 8), (1.0, 1.0, 33, 20), (2.0, 0.5, 16, 64)] {
            let g = Grid::new(r, a, nr, nz).unwrap();
            let rel = (g.measure() - g.volume()).abs() / g.volume();
            assert!(rel < 1e-12, "rel err {rel}");
        }
        let g = Grid::new(1.0, 1.0, 10, 10).unwrap();
        assert!((g.measure() - 2.0 * PI).abs() < 1e-12);
        let g = Grid::new(2.0, 0.5, 10, 12).unwrap();
        assert!((g.measure() - 4.0 * PI).abs() < 1e-11);
    }

    #[test]
    fn odd_in_z_integrates_to_zero() {
        let g = Grid::new(1.0, 1.0, 12, 18).unwrap();
        assert!(weighted_sum(&g, |_, z| z).abs() < 1e-12);
    }

    #[test]
    fn refinement_preserves_affine_in_z_integrals() {
        let g = Grid::new(1.5, 0.8, 10, 14).unwrap();
        let f = |_: f64, z: f64| 2.0 - 3.0 * z;
        let a = weighted_sum(&g, f);
        let b = weighted_sum(&g.refined(), f);
        assert!((a - b).abs() < 1e-12 * a.abs());
    }

    #[test]
    fn weights_nonnegative_and_axis_zero() {
        let g = Grid::new(1.0, 1.0, 8, 8).unwrap();
        assert!(g.quad_weights().iter().all(|&w| w >= 0.0));
        for j in 0..=g.nz() {
            assert_eq!(g.weight(0, j), 0.0);
        }
    }

    #[test]
    fn rejects_bad_configuration() {
        assert!(Grid::new(0.0, 1.0, 8, 8).is_err());
        assert!(Grid::new(1.0, -1.0, 8, 8).is_err());
        assert!(Grid::new(1.0, 1.0, 4, 8).is_err());
        assert!(Grid::new(1.0, 1.0, 8, 7).is_err());
    }
}
