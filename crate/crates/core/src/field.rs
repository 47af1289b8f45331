//! Scalar and axisymmetric vector fields on the node grid.

use std::sync::Arc;

use crate::grid::Grid;

/// Behaviour of a field under `r → -r`. Governs the ghost value used by
/// radial stencils at the axis node.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
pub enum Parity {
    Even,
    Odd,
}

impl Parity {
    pub fn flip(self) -> Parity {
        match self {
            Parity::Even => Parity::Odd,
            Parity::Odd => Parity::Even,
        }
    }

    /// Value of the ghost node at `r = -dr` given the value at `r = dr`.
    #[inline]
    pub fn ghost(self, inner: f64) -> f64 {
        match self {
            Parity::Even => inner,
            Parity::Odd => -inner,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScalarField {
    grid: Arc<Grid>,
    values: Vec<f64>,
    parity: Parity,
}

impl ScalarField {
    pub fn zeros(grid: &Arc<Grid>, parity: Parity) -> Self {
        ScalarField { grid: Arc::clone(grid), values: vec![0.0; grid.len()], parity }
    }

    pub fn constant(grid: &Arc<Grid>, parity: Parity, c: f64) -> Self {
        ScalarField { grid: Arc::clone(grid), values: vec![c; grid.len()], parity }
    }

    /// Samples `f(r, z)` at every node. Odd fields get their axis value pinned to 0.
    pub fn from_fn(grid: &Arc<Grid>, parity: Parity, f: impl Fn(f64, f64) -> f64) -> Self {
        let mut values = Vec::with_capacity(grid.len());
        for i in 0..=grid.nr() {
            for j in 0..=grid.nz() {
                values.push(f(grid.r(i), grid.z(j)));
            }
        }
        let mut out = ScalarField { grid: Arc::clone(grid), values, parity };
        out.enforce_parity();
        out
    }

    pub fn from_values(grid: &Arc<Grid>, parity: Parity, values: Vec<f64>) -> Self {
        assert_eq!(values.len(), grid.len(), "value count does not match grid");
        ScalarField { grid: Arc::clone(grid), values, parity }
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }
    pub fn grid_arc(&self) -> &Arc<Grid> {
        &self.grid
    }
    pub fn parity(&self) -> Parity {
        self.parity
    }
    pub fn values(&self) -> &[f64] {
        &self.values
    }
    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }
    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[self.grid.idx(i, j)]
    }
    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        let k = self.grid.idx(i, j);
        self.values[k] = v;
    }

    /// Radial neighbour with the parity ghost at `i = -1`.
    #[inline]
    pub(crate) fn radial(&self, i: isize, j: usize) -> f64 {
        if i < 0 {
            self.parity.ghost(self.get((-i) as usize, j))
        } else {
            self.get(i as usize, j)
        }
    }

    /// Odd fields vanish on the axis.
    pub fn enforce_parity(&mut self) {
        if self.parity == Parity::Odd {
            for j in 0..=self.grid.nz() {
                self.set(0, j, 0.0);
            }
        }
    }

    pub fn with_parity(mut self, parity: Parity) -> Self {
        self.parity = parity;
        self
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> ScalarField {
        ScalarField {
            grid: Arc::clone(&self.grid),
            values: self.values.iter().map(|&v| f(v)).collect(),
            parity: self.parity,
        }
    }

    /// Pointwise combination; the result takes `parity`.
    pub fn zip_map(&self, other: &ScalarField, parity: Parity, f: impl Fn(f64, f64) -> f64) -> ScalarField {
        debug_assert!(self.grid.same_shape(&other.grid));
        ScalarField {
            grid: Arc::clone(&self.grid),
            values: self.values.iter().zip(&other.values).map(|(&a, &b)| f(a, b)).collect(),
            parity,
        }
    }

    pub fn scaled(&self, c: f64) -> ScalarField {
        self.map(|v| c * v)
    }

    /// `self += c · other`
    pub fn add_scaled(&mut self, c: f64, other: &ScalarField) {
        for (a, b) in self.values.iter_mut().zip(&other.values) {
            *a += c * b;
        }
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0_f64, |m, v| m.max(v.abs()))
    }
    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }
    pub fn max(&self) -> f64 {
        self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    /// Max of `|self - other|` over all nodes.
    pub fn max_abs_diff(&self, other: &ScalarField) -> f64 {
        self.values.iter().zip(&other.values).fold(0.0_f64, |m, (a, b)| m.max((a - b).abs()))
    }

    /// Quadrature-weighted integral `∫_Ω f dx`.
    pub fn integral(&self) -> f64 {
        self.values.iter().zip(self.grid.quad_weights()).map(|(v, w)| v * w).sum()
    }

    /// First node holding a NaN or infinite value.
    pub fn first_non_finite(&self) -> Option<(usize, usize, f64)> {
        let nzp = self.grid.nz() + 1;
        self.values.iter().position(|v| !v.is_finite()).map(|k| (k / nzp, k % nzp, self.values[k]))
    }
}

/// Axisymmetric vector field in the cylindrical frame `(e_r, e_φ, e_z)`.
#[derive(Debug, Clone, PartialEq)]
pub struct CylVectorField {
    pub r: ScalarField,
    pub phi: ScalarField,
    pub z: ScalarField,
}

impl CylVectorField {
    pub fn new(r: ScalarField, phi: ScalarField, z: ScalarField) -> Self {
        debug_assert_eq!(r.parity(), Parity::Odd);
        debug_assert_eq!(phi.parity(), Parity::Odd);
        debug_assert_eq!(z.parity(), Parity::Even);
        CylVectorField { r, phi, z }
    }

    pub fn zeros(grid: &Arc<Grid>) -> Self {
        CylVectorField {
            r: ScalarField::zeros(grid, Parity::Odd),
            phi: ScalarField::zeros(grid, Parity::Odd),
            z: ScalarField::zeros(grid, Parity::Even),
        }
    }

    pub fn from_fn(grid: &Arc<Grid>, f: impl Fn(f64, f64) -> [f64; 3]) -> Self {
        CylVectorField {
            r: ScalarField::from_fn(grid, Parity::Odd, |r, z| f(r, z)[0]),
            phi: ScalarField::from_fn(grid, Parity::Odd, |r, z| f(r, z)[1]),
            z: ScalarField::from_fn(grid, Parity::Even, |r, z| f(r, z)[2]),
        }
    }

    /// Pointwise Euclidean magnitude (even).
    pub fn magnitude(&self) -> ScalarField {
        let sq = self.r.zip_map(&self.phi, Parity::Even, |a, b| a * a + b * b);
        sq.zip_map(&self.z, Parity::Even, |s, c| (s + c * c).sqrt())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn odd_fields_vanish_on_axis() {
        let g = Arc::new(Grid::new(1.0, 1.0, 8, 8).unwrap());
        let f = ScalarField::from_fn(&g, Parity::Odd, |_, _| 3.0);
        for j in 0..=g.nz() {
            assert_eq!(f.get(0, j), 0.0);
        }
        assert_eq!(f.get(1, 3), 3.0);
    }

    #[test]
    fn ghost_follows_parity() {
        assert_eq!(Parity::Even.ghost(2.0), 2.0);
        assert_eq!(Parity::Odd.ghost(2.0), -2.0);
        assert_eq!(Parity::Odd.flip().flip(), Parity::Odd);
    }

    #[test]
    fn first_non_finite_reports_node() {
        let g = Arc::new(Grid::new(1.0, 1.0, 8, 8).unwrap());
        let mut f = ScalarField::zeros(&g, Parity::Even);
        assert!(f.first_non_finite().is_none());
        f.set(3, 5, f64::NAN);
        let (i, j, _) = f.first_non_finite().unwrap();
        assert_eq!((i, j), (3, 5));
    }
}
