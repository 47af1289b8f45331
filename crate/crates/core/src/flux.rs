//! Conservative face-flux transport on the node grid.
//!
//! Each node `(i, j)` with `i ≥ 1` owns the control volume whose measure is
//! its quadrature weight. Volumetric face fluxes come from the Stokes stream
//! function `S = rψ` sampled at cell corners, so every control volume has
//! exactly zero net flux and `Σ_ij w_ij (∇·(v f))_ij = 0` holds to round-off.
//!
//! The axis node has zero quadrature weight. The inner face of the first
//! ring (`r = dr/2`) carries no advective or diffusive flux, and the axis
//! node itself is advanced with a nodal stencil that reads its neighbours
//! but never feeds back into the weighted sum.

use std::f64::consts::PI;

use crate::field::{Parity, ScalarField};
use crate::grid::Grid;
use crate::ops::AdvectionScheme;

#[derive(Debug, Clone)]
pub struct FaceFluxes {
    nr: usize,
    nz: usize,
    /// `Q` through face `(i + 1/2, j)`, `i = 0..nr`, `j = 0..=nz`. Positive outward in `r`.
    radial: Vec<f64>,
    /// `Q` through face `(i, j + 1/2)`, `i = 0..=nr`, `j = 0..nz`. Positive toward `+z`.
    axial: Vec<f64>,
    /// Nodal `v_z` on the axis, `2 ψ(dr, z)/dr`.
    axis_vz: Vec<f64>,
}

impl FaceFluxes {
    pub fn from_psi(psi: &ScalarField) -> Self {
        debug_assert_eq!(psi.parity(), Parity::Odd);
        let g = psi.grid();
        let (nr, nz) = (g.nr(), g.nz());
        let stokes = |i: usize, j: usize| g.r(i) * psi.get(i, j);
        // Corner k ∈ 0..=nr at r_{k+1/2} (k = nr is the wall r = R);
        // corner l ∈ 0..=nz+1 at z_{l-1/2} (l = 0 and l = nz+1 are the walls).
        let corner = |k: usize, l: usize| -> f64 {
            if k == 0 || k == nr || l == 0 || l == nz + 1 {
                0.0
            } else {
                0.25 * (stokes(k, l - 1) + stokes(k + 1, l - 1) + stokes(k, l) + stokes(k + 1, l))
            }
        };
        let two_pi = 2.0 * PI;
        let mut radial = vec![0.0; nr * (nz + 1)];
        for i in 0..nr {
            for j in 0..=nz {
                radial[i * (nz + 1) + j] = -two_pi * (corner(i, j + 1) - corner(i, j));
            }
        }
        let mut axial = vec![0.0; (nr + 1) * nz];
        for i in 1..=nr {
            for j in 0..nz {
                axial[i * nz + j] = two_pi * (corner(i, j + 1) - corner(i - 1, j + 1));
            }
        }
        let axis_vz = (0..=nz).map(|j| 2.0 * psi.get(1, j) / g.dr()).collect();
        FaceFluxes { nr, nz, radial, axial, axis_vz }
    }

    #[inline]
    fn q_r(&self, i: usize, j: usize) -> f64 {
        self.radial[i * (self.nz + 1) + j]
    }
    #[inline]
    fn q_z(&self, i: usize, j: usize) -> f64 {
        self.axial[i * self.nz + j]
    }

    /// Largest `|Σ_faces Q|` over control volumes; round-off sized by construction.
    pub fn max_net_flux(&self) -> f64 {
        let mut worst = 0.0_f64;
        for i in 1..=self.nr {
            for j in 0..=self.nz {
                let mut net = -self.q_r(i - 1, j);
                if i < self.nr {
                    net += self.q_r(i, j);
                }
                if j < self.nz {
                    net += self.q_z(i, j);
                }
                if j > 0 {
                    net -= self.q_z(i, j - 1);
                }
                worst = worst.max(net.abs());
            }
        }
        worst
    }

    /// Largest `Σ_outflow Q / w` over control volumes.
    pub fn max_outflow_rate(&self, g: &Grid) -> f64 {
        let mut worst = 0.0_f64;
        for i in 1..=self.nr {
            for j in 0..=self.nz {
                let mut out = (-self.q_r(i - 1, j)).max(0.0);
                if i < self.nr {
                    out += self.q_r(i, j).max(0.0);
                }
                if j < self.nz {
                    out += self.q_z(i, j).max(0.0);
                }
                if j > 0 {
                    out += (-self.q_z(i, j - 1)).max(0.0);
                }
                worst = worst.max(out / g.weight(i, j));
            }
        }
        worst
    }
}

fn face_value(scheme: AdvectionScheme, q: f64, from: f64, to: f64) -> f64 {
    match scheme {
        AdvectionScheme::Upwind1 => {
            if q >= 0.0 {
                from
            } else {
                to
            }
        }
        AdvectionScheme::Central2 => 0.5 * (from + to),
    }
}

/// `v·∇f` in divergence form `∇·(v f)` using face fluxes.
pub fn advect_flux_form(fluxes: &FaceFluxes, f: &ScalarField, scheme: AdvectionScheme) -> ScalarField {
    let g = f.grid();
    let (nr, nz) = (g.nr(), g.nz());
    assert!(fluxes.nr == nr && fluxes.nz == nz, "flux/field grid mismatch");
    let mut acc = vec![0.0; g.len()];
    for i in 1..nr {
        for j in 0..=nz {
            let q = fluxes.q_r(i, j);
            let t = q * face_value(scheme, q, f.get(i, j), f.get(i + 1, j));
            acc[g.idx(i, j)] += t;
            acc[g.idx(i + 1, j)] -= t;
        }
    }
    for i in 1..=nr {
        for j in 0..nz {
            let q = fluxes.q_z(i, j);
            let t = q * face_value(scheme, q, f.get(i, j), f.get(i, j + 1));
            acc[g.idx(i, j)] += t;
            acc[g.idx(i, j + 1)] -= t;
        }
    }
    let mut out = ScalarField::zeros(f.grid_arc(), f.parity());
    for i in 1..=nr {
        for j in 0..=nz {
            let k = g.idx(i, j);
            out.values_mut()[k] = acc[k] / g.quad_weights()[k];
        }
    }
    for j in 0..=nz {
        out.set(0, j, axis_advection(g, fluxes.axis_vz[j], f, j, scheme));
    }
    out
}

fn axis_advection(g: &Grid, vz: f64, f: &ScalarField, j: usize, scheme: AdvectionScheme) -> f64 {
    let (nz, dz) = (g.nz(), g.dz());
    let fz = match scheme {
        AdvectionScheme::Central2 => {
            if j == 0 {
                (f.get(0, 1) - f.get(0, 0)) / dz
            } else if j == nz {
                (f.get(0, nz) - f.get(0, nz - 1)) / dz
            } else {
                (f.get(0, j + 1) - f.get(0, j - 1)) / (2.0 * dz)
            }
        }
        AdvectionScheme::Upwind1 => {
            if (vz > 0.0 && j > 0) || j == nz {
                (f.get(0, j) - f.get(0, j - 1)) / dz
            } else {
                (f.get(0, j + 1) - f.get(0, j)) / dz
            }
        }
    };
    vz * fz
}

/// `Δf` with homogeneous Neumann data on every wall, in finite-volume form
/// over the quadrature control volumes (conservative: `Σ w Δf = 0`).
pub fn neumann_laplacian(f: &ScalarField) -> ScalarField {
    let g = f.grid();
    let (nr, nz, dr, dz) = (g.nr(), g.nz(), g.dr(), g.dz());
    let mut out = ScalarField::zeros(f.grid_arc(), f.parity());
    let zpart = |i: usize, j: usize| -> f64 {
        if j == 0 {
            2.0 * (f.get(i, 1) - f.get(i, 0)) / (dz * dz)
        } else if j == nz {
            2.0 * (f.get(i, nz - 1) - f.get(i, nz)) / (dz * dz)
        } else {
            (f.get(i, j + 1) - 2.0 * f.get(i, j) + f.get(i, j - 1)) / (dz * dz)
        }
    };
    // F_{k+1/2} = r_{k+1/2} (f_{k+1} - f_k)/dr; zero at the inner ring face and the wall.
    let flux = |k: usize, j: usize| -> f64 {
        if k == 0 || k >= nr {
            0.0
        } else {
            (k as f64 + 0.5) * dr * (f.get(k + 1, j) - f.get(k, j)) / dr
        }
    };
    for j in 0..=nz {
        out.set(0, j, 4.0 * (f.get(1, j) - f.get(0, j)) / (dr * dr) + zpart(0, j));
        for i in 1..=nr {
            let vol = if i == nr { 0.5 * g.radius() * dr } else { g.r(i) * dr };
            out.set(i, j, (flux(i, j) - flux(i - 1, j)) / vol + zpart(i, j));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::sync::Arc;

    fn setup() -> (Arc<Grid>, ScalarField) {
        let g = Arc::new(Grid::new(1.0, 1.0, 12, 16).unwrap());
        let psi = ScalarField::from_fn(&g, Parity::Odd, |r, z| r * (1.0 - r * r) * (1.0 - z * z) * (1.0 + 0.3 * z));
        (g, psi)
    }

    #[test]
    fn control_volumes_have_zero_net_flux() {
        let (_, psi) = setup();
        let fl = FaceFluxes::from_psi(&psi);
        assert!(fl.max_net_flux() < 1e-15);
    }

    #[test]
    fn advection_is_conservative_for_both_schemes() {
        let (g, psi) = setup();
        let fl = FaceFluxes::from_psi(&psi);
        let f = ScalarField::from_fn(&g, Parity::Even, |r, z| (2.0 * r).cos() + z * z * z);
        for s in [AdvectionScheme::Upwind1, AdvectionScheme::Central2] {
            let a = advect_flux_form(&fl, &f, s);
            assert!(a.integral().abs() < 1e-13, "{s:?}: {}", a.integral());
        }
    }

    #[test]
    fn advection_of_constant_vanishes() {
        let (g, psi) = setup();
        let fl = FaceFluxes::from_psi(&psi);
        let c = ScalarField::constant(&g, Parity::Even, 3.0);
        for s in [AdvectionScheme::Upwind1, AdvectionScheme::Central2] {
            assert!(advect_flux_form(&fl, &c, s).max_abs() < 1e-12);
        }
    }

    #[test]
    fn neumann_laplacian_is_conservative() {
        let g = Arc::new(Grid::new(1.3, 0.6, 10, 14).unwrap());
        let f = ScalarField::from_fn(&g, Parity::Even, |r, z| (r * z).sin() + r * r);
        assert!(neumann_laplacian(&f).integral().abs() < 1e-12);
    }

    #[test]
    fn neumann_laplacian_consistent_away_from_axis() {
        use std::f64::consts::PI;
        let g = Arc::new(Grid::new(1.0, 1.0, 64, 64).unwrap());
        // ∂_r and ∂_z vanish on the walls.
        let f = ScalarField::from_fn(&g, Parity::Even, |r, z| (PI * r).cos() * (PI * z).cos());
        let lap = neumann_laplacian(&f);
        let exact = |r: f64, z: f64| {
            let rad = if r == 0.0 { -PI * PI } else { -PI * PI * (PI * r).cos() - PI * (PI * r).sin() / r };
            (rad - PI * PI * (PI * r).cos()) * (PI * z).cos()
        };
        for i in 4..g.nr() {
            for j in 1..g.nz() {
                let e = exact(g.r(i), g.z(j));
                assert!((lap.get(i, j) - e).abs() < 0.05, "({i},{j}) {} vs {e}", lap.get(i, j));
            }
        }
    }
}
