//! Finite-difference operators in cylindrical coordinates.
//!
//! All stencils are second order. Radial derivatives at the axis use the
//! parity ghost `f(-dr) = ±f(dr)`; the `1/r` singular factors use explicit
//! L'Hôpital limits at `i = 0` through [`div_by_r`].

use serde::{Deserialize, Serialize};

use crate::field::{CylVectorField, Parity, ScalarField};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum AdvectionScheme {
    /// First-order donor cell; monotone under the advective CFL bound.
    #[default]
    Upwind1,
    /// Second-order central differences.
    Central2,
}

/// `∂f/∂r`. Output parity is flipped.
pub fn ddr(f: &ScalarField) -> ScalarField {
    let g = f.grid();
    let (nr, nz, dr) = (g.nr(), g.nz(), g.dr());
    let mut out = ScalarField::zeros(f.grid_arc(), f.parity().flip());
    for j in 0..=nz {
        for i in 0..nr {
            let ii = i as isize;
            let d = (f.radial(ii + 1, j) - f.radial(ii - 1, j)) / (2.0 * dr);
            out.set(i, j, d);
        }
        let d = (3.0 * f.get(nr, j) - 4.0 * f.get(nr - 1, j) + f.get(nr - 2, j)) / (2.0 * dr);
        out.set(nr, j, d);
    }
    out
}

/// `∂f/∂z`. Parity is preserved.
pub fn ddz(f: &ScalarField) -> ScalarField {
    let g = f.grid();
    let (nr, nz, dz) = (g.nr(), g.nz(), g.dz());
    let mut out = ScalarField::zeros(f.grid_arc(), f.parity());
    for i in 0..=nr {
        out.set(i, 0, (-3.0 * f.get(i, 0) + 4.0 * f.get(i, 1) - f.get(i, 2)) / (2.0 * dz));
        for j in 1..nz {
            out.set(i, j, (f.get(i, j + 1) - f.get(i, j - 1)) / (2.0 * dz));
        }
        out.set(i, nz, (3.0 * f.get(i, nz) - 4.0 * f.get(i, nz - 1) + f.get(i, nz - 2)) / (2.0 * dz));
    }
    out
}

/// `f / r` with the axis value replaced by the limit `∂f/∂r(0, z)`.
///
/// For odd `f` the limit is `f(dr)/dr`. For even `f` the limit exists only
/// when `f` vanishes on the axis, in which case it is 0.
pub fn div_by_r(f: &ScalarField) -> ScalarField {
    let g = f.grid();
    let mut out = ScalarField::zeros(f.grid_arc(), f.parity().flip());
    for j in 0..=g.nz() {
        let axis = match f.parity() {
            Parity::Odd => f.get(1, j) / g.dr(),
            Parity::Even => 0.0,
        };
        out.set(0, j, axis);
        for i in 1..=g.nr() {
            out.set(i, j, f.get(i, j) / g.r(i));
        }
    }
    out
}

#[inline]
pub(crate) fn d2z_at(f: &ScalarField, i: usize, j: usize) -> f64 {
    let g = f.grid();
    let (nz, dz2) = (g.nz(), g.dz() * g.dz());
    if j == 0 {
        (2.0 * f.get(i, 0) - 5.0 * f.get(i, 1) + 4.0 * f.get(i, 2) - f.get(i, 3)) / dz2
    } else if j == nz {
        (2.0 * f.get(i, nz) - 5.0 * f.get(i, nz - 1) + 4.0 * f.get(i, nz - 2) - f.get(i, nz - 3)) / dz2
    } else {
        (f.get(i, j + 1) - 2.0 * f.get(i, j) + f.get(i, j - 1)) / dz2
    }
}

/// Conservative `(1/r)(r f_r)_r` at an interior radial node `1 ≤ i < nr`.
#[inline]
pub(crate) fn radial_lap_at(f: &ScalarField, i: usize, j: usize) -> f64 {
    let g = f.grid();
    let dr = g.dr();
    let (rp, rm, ri) = ((i as f64 + 0.5) * dr, (i as f64 - 0.5) * dr, g.r(i));
    let fi = f.get(i, j);
    (rp * (f.get(i + 1, j) - fi) - rm * (fi - f.get(i - 1, j))) / (ri * dr * dr)
}

/// `Δf = (1/r)(r f_r)_r + f_zz`.
///
/// Interior radial nodes use the conservative flux form. On the axis, even
/// fields use the limit `2 f_rr + f_zz` with `f_rr ≈ 2(f(dr) - f(0))/dr²`;
/// odd fields are pinned to 0 there and the operator returns 0. Boundary
/// nodes use one-sided second-order stencils.
pub fn laplacian_cyl(f: &ScalarField) -> ScalarField {
    let g = f.grid();
    let (nr, nz, dr) = (g.nr(), g.nz(), g.dr());
    let mut out = ScalarField::zeros(f.grid_arc(), f.parity());
    let fr = ddr(f);
    for j in 0..=nz {
        if f.parity() == Parity::Even {
            let v = 4.0 * (f.get(1, j) - f.get(0, j)) / (dr * dr) + d2z_at(f, 0, j);
            out.set(0, j, v);
        }
        for i in 1..nr {
            out.set(i, j, radial_lap_at(f, i, j) + d2z_at(f, i, j));
        }
        let frr = (2.0 * f.get(nr, j) - 5.0 * f.get(nr - 1, j) + 4.0 * f.get(nr - 2, j) - f.get(nr - 3, j)) / (dr * dr);
        out.set(nr, j, frr + fr.get(nr, j) / g.radius() + d2z_at(f, nr, j));
    }
    out
}

/// `v_r f_r + v_z f_z` with node velocities.
pub fn advect(v_r: &ScalarField, v_z: &ScalarField, f: &ScalarField, scheme: AdvectionScheme) -> ScalarField {
    match scheme {
        AdvectionScheme::Central2 => {
            let fr = ddr(f);
            let fz = ddz(f);
            let mut out = ScalarField::zeros(f.grid_arc(), f.parity());
            for (k, o) in out.values_mut().iter_mut().enumerate() {
                *o = v_r.values()[k] * fr.values()[k] + v_z.values()[k] * fz.values()[k];
            }
            out
        }
        AdvectionScheme::Upwind1 => {
            let g = f.grid();
            let (nr, nz, dr, dz) = (g.nr(), g.nz(), g.dr(), g.dz());
            let mut out = ScalarField::zeros(f.grid_arc(), f.parity());
            for i in 0..=nr {
                for j in 0..=nz {
                    let (vr, vz) = (v_r.get(i, j), v_z.get(i, j));
                    let ii = i as isize;
                    let fc = f.get(i, j);
                    let fr = if (vr > 0.0 && i > 0) || i == nr {
                        (fc - f.radial(ii - 1, j)) / dr
                    } else if vr > 0.0 {
                        (fc - f.radial(-1, j)) / dr
                    } else {
                        (f.get(i + 1, j) - fc) / dr
                    };
                    let fz = if (vz > 0.0 && j > 0) || j == nz {
                        (fc - f.get(i, j - 1)) / dz
                    } else {
                        (f.get(i, j + 1) - fc) / dz
                    };
                    out.set(i, j, vr * fr + vz * fz);
                }
            }
            out
        }
    }
}

/// Velocity from the stream function: `v_r = -ψ_z`, `v_z = ψ_r + ψ/r`.
pub fn velocity_from_psi(psi: &ScalarField) -> (ScalarField, ScalarField) {
    debug_assert_eq!(psi.parity(), Parity::Odd);
    let v_r = ddz(psi).scaled(-1.0);
    let mut v_z = ddr(psi);
    v_z.add_scaled(1.0, &div_by_r(psi));
    (v_r, v_z.with_parity(Parity::Even))
}

/// `curl F` for an axisymmetric field.
pub fn curl_cyl(f: &CylVectorField) -> CylVectorField {
    let c_r = ddz(&f.phi).scaled(-1.0);
    let mut c_phi = ddz(&f.r);
    c_phi.add_scaled(-1.0, &ddr(&f.z));
    let mut c_z = ddr(&f.phi);
    c_z.add_scaled(1.0, &div_by_r(&f.phi));
    CylVectorField::new(c_r, c_phi.with_parity(Parity::Odd), c_z.with_parity(Parity::Even))
}

/// `(1/r)(r v_r)_r + (v_z)_z`, with axis limit `2 (v_r)_r + (v_z)_z`.
pub fn divergence_cyl(v_r: &ScalarField, v_z: &ScalarField) -> ScalarField {
    let mut out = ddr(v_r);
    out.add_scaled(1.0, &div_by_r(v_r));
    out.add_scaled(1.0, &ddz(v_z));
    out.with_parity(Parity::Even)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::Grid;
    use std::sync::Arc;

    fn grid() -> Arc<Grid> {
        Arc::new(Grid::new(1.0, 1.0, 10, 12).unwrap())
    }

    fn assert_interior(f: &ScalarField, expect: impl Fn(f64, f64) -> f64, tol: f64) {
        let g = f.grid();
        for i in 1..g.nr() {
            for j in 1..g.nz() {
                let e = expect(g.r(i), g.z(j));
                assert!((f.get(i, j) - e).abs() < tol, "({i},{j}): {} vs {e}", f.get(i, j));
            }
        }
    }

    fn assert_all(f: &ScalarField, expect: impl Fn(f64, f64) -> f64, tol: f64) {
        let g = f.grid();
        for i in 0..=g.nr() {
            for j in 0..=g.nz() {
                let e = expect(g.r(i), g.z(j));
                assert!((f.get(i, j) - e).abs() < tol, "({i},{j}): {} vs {e}", f.get(i, j));
            }
        }
    }

    #[test]
    fn ddr_exact_on_low_degree() {
        let g = grid();
        let f = ScalarField::from_fn(&g, Parity::Odd, |r, _| r);
        let d = ddr(&f);
        assert_eq!(d.parity(), Parity::Even);
        assert_all(&d, |_, _| 1.0, 1e-12);

        let f = ScalarField::from_fn(&g, Parity::Even, |r, _| r * r);
        let d = ddr(&f);
        assert_eq!(d.parity(), Parity::Odd);
        assert_all(&d, |r, _| 2.0 * r, 1e-12);

        let d = ddr(&ScalarField::constant(&g, Parity::Even, 4.2));
        assert_all(&d, |_, _| 0.0, 1e-12);
    }

    #[test]
    fn ddz_exact_on_low_degree() {
        let g = grid();
        assert_all(&ddz(&ScalarField::from_fn(&g, Parity::Even, |_, z| z)), |_, _| 1.0, 1e-12);
        assert_all(&ddz(&ScalarField::from_fn(&g, Parity::Even, |_, z| z * z)), |_, z| 2.0 * z, 1e-12);
        let d = ddz(&ScalarField::from_fn(&g, Parity::Odd, |r, _| r));
        assert_eq!(d.parity(), Parity::Odd);
        assert_all(&d, |_, _| 0.0, 1e-12);
    }

    #[test]
    fn parity_discipline() {
        let g = grid();
        let f = ScalarField::from_fn(&g, Parity::Odd, |r, z| r * z);
        assert_eq!(ddr(&ddr(&f)).parity(), Parity::Odd);
        assert_eq!(ddz(&f).parity(), Parity::Odd);
    }

    #[test]
    fn laplacian_exact_cases() {
        let g = grid();
        let lap = laplacian_cyl(&ScalarField::from_fn(&g, Parity::Even, |r, _| r * r));
        assert_all(&lap, |_, _| 4.0, 1e-10);
        let lap = laplacian_cyl(&ScalarField::from_fn(&g, Parity::Even, |_, z| z * z));
        assert_all(&lap, |_, _| 2.0, 1e-10);
        let lap = laplacian_cyl(&ScalarField::from_fn(&g, Parity::Even, |r, z| r * r * z));
        assert_interior(&lap, |_, z| 4.0 * z, 1e-10);
    }

    #[test]
    fn advection_examples() {
        let g = grid();
        let zero_odd = ScalarField::zeros(&g, Parity::Odd);
        let one = ScalarField::constant(&g, Parity::Even, 1.0);
        let fz = ScalarField::from_fn(&g, Parity::Even, |_, z| z);
        assert_all(&advect(&zero_odd, &one, &fz, AdvectionScheme::Central2), |_, _| 1.0, 1e-12);
        assert_all(&advect(&zero_odd, &one, &fz, AdvectionScheme::Upwind1), |_, _| 1.0, 1e-12);

        let vr = ScalarField::from_fn(&g, Parity::Odd, |r, _| r);
        let zero_even = ScalarField::zeros(&g, Parity::Even);
        let r2 = ScalarField::from_fn(&g, Parity::Even, |r, _| r * r);
        assert_interior(&advect(&vr, &zero_even, &r2, AdvectionScheme::Central2), |r, _| 2.0 * r * r, 1e-12);

        let c = ScalarField::constant(&g, Parity::Even, 7.0);
        let vz = ScalarField::from_fn(&g, Parity::Even, |r, z| 1.0 - r * z);
        for s in [AdvectionScheme::Central2, AdvectionScheme::Upwind1] {
            assert_all(&advect(&vr, &vz, &c, s), |_, _| 0.0, 1e-12);
        }
    }

    #[test]
    fn velocity_from_psi_examples() {
        let g = grid();
        let psi = ScalarField::from_fn(&g, Parity::Odd, |r, _| 0.7 * r);
        let (vr, vz) = velocity_from_psi(&psi);
        assert_all(&vr, |_, _| 0.0, 1e-12);
        assert_all(&vz, |_, _| 1.4, 1e-12);

        let psi = ScalarField::from_fn(&g, Parity::Odd, |r, z| r * z);
        let (vr, vz) = velocity_from_psi(&psi);
        assert_all(&vr, |r, _| -r, 1e-12);
        assert_all(&vz, |_, z| 2.0 * z, 1e-12);
        assert_all(&divergence_cyl(&vr, &vz), |_, _| 0.0, 1e-11);

        let (vr, vz) = velocity_from_psi(&ScalarField::zeros(&g, Parity::Odd));
        assert_eq!(vr.max_abs(), 0.0);
        assert_eq!(vz.max_abs(), 0.0);
    }

    #[test]
    fn curl_examples() {
        let g = grid();
        let f = CylVectorField::from_fn(&g, |r, _| [0.0, r, 0.0]);
        let c = curl_cyl(&f);
        assert_all(&c.r, |_, _| 0.0, 1e-12);
        assert_all(&c.phi, |_, _| 0.0, 1e-12);
        assert_all(&c.z, |_, _| 2.0, 1e-12);

        let f = CylVectorField::from_fn(&g, |r, z| [if r == 0.0 { 0.0 } else { z }, 0.0, 0.0]);
        // The radial component of an axisymmetric field vanishes on the axis; check off-axis.
        let c = curl_cyl(&f);
        assert_interior(&c.phi, |_, _| 1.0, 1e-12);

        let f = CylVectorField::from_fn(&g, |_, z| [0.0, 0.0, (2.0 * z).sin()]);
        let c = curl_cyl(&f);
        for comp in [&c.r, &c.phi, &c.z] {
            assert_all(comp, |_, _| 0.0, 1e-12);
        }
    }

    #[test]
    fn divergence_examples() {
        let g = grid();
        let vr = ScalarField::from_fn(&g, Parity::Odd, |r, _| -r);
        let vz = ScalarField::from_fn(&g, Parity::Even, |_, z| 2.0 * z);
        assert_all(&divergence_cyl(&vr, &vz), |_, _| 0.0, 1e-12);

        let vr = ScalarField::zeros(&g, Parity::Odd);
        let vz = ScalarField::from_fn(&g, Parity::Even, |_, z| z);
        assert_all(&divergence_cyl(&vr, &vz), |_, _| 1.0, 1e-12);
    }

    #[test]
    fn swirl_identity_closure() {
        // v_φ = u/r; curl reproduces ω_r = -(1/r)u_z and ω_z = (1/r)u_r.
        let g = Arc::new(Grid::new(1.0, 1.0, 32, 32).unwrap());
        let u = ScalarField::from_fn(&g, Parity::Even, |r, z| r * r * (1.0 - r) * (std::f64::consts::PI * z).cos());
        let v_phi = div_by_r(&u);
        let v = CylVectorField::new(
            ScalarField::zeros(&g, Parity::Odd),
            v_phi,
            ScalarField::zeros(&g, Parity::Even),
        );
        let w = curl_cyl(&v);
        let omega_r = div_by_r(&ddz(&u)).scaled(-1.0);
        let omega_z = div_by_r(&ddr(&u));
        assert!(w.r.max_abs_diff(&omega_r) < 1e-10);
        let g2 = g.h() * g.h();
        for i in 1..g.nr() {
            for j in 1..g.nz() {
                assert!((w.z.get(i, j) - omega_z.get(i, j)).abs() < 40.0 * g2);
            }
        }
    }
}
