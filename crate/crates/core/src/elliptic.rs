//! Stream-function boundary-value problems.
//!
//! * `PsiForm`:  `-Δψ + ψ/r² = ω_φ`, `ψ|_S = 0`, ψ odd.
//! * `Psi1Form`: `-Δψ₁ - (2/r)ψ₁,r = Γ`, `ψ₁|_S = 0`, ψ₁ even.
//!
//! Both discrete operators are symmetric positive definite in a weighted
//! inner product (weight `r` for `PsiForm`, `r³` for `Psi1Form`, the latter
//! being the 5-D radial Laplacian). Rows are pre-multiplied by the weight so
//! that a plain Jacobi-preconditioned conjugate-gradient iteration applies.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{Parity, ScalarField};
use crate::grid::Grid;
use crate::ops::div_by_r;

pub const DEFAULT_TOLERANCE: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ProblemKind {
    PsiForm,
    Psi1Form,
}

/// How `Psi1Form` problems are solved.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Psi1Route {
    /// Solve `PsiForm` with `ω_φ = rΓ`, then divide by `r`.
    #[default]
    Substitution,
    /// Conjugate gradients on the `r³`-weighted `Psi1Form` operator itself.
    Direct,
}

#[derive(Debug, Clone)]
pub struct EllipticProblem {
    pub kind: ProblemKind,
    pub rhs: ScalarField,
    pub tolerance: f64,
    pub max_iterations: usize,
}

impl EllipticProblem {
    pub fn new(kind: ProblemKind, rhs: ScalarField) -> Self {
        let g = rhs.grid();
        let max_iterations = default_max_iterations(g);
        EllipticProblem { kind, rhs, tolerance: DEFAULT_TOLERANCE, max_iterations }
    }

    pub fn with_tolerance(mut self, tol: f64) -> Self {
        self.tolerance = tol;
        self
    }
}

pub fn default_max_iterations(g: &Grid) -> usize {
    50 * (g.nr() + g.nz())
}

#[derive(Debug, Clone)]
pub struct EllipticSolution {
    pub field: ScalarField,
    pub iterations: usize,
    pub final_residual: f64,
}

/// Row-scaled symmetric operator on a rectangular block of unknowns.
trait WeightedOperator {
    fn grid(&self) -> &Grid;
    /// First radial index carrying an unknown.
    fn i_first(&self) -> usize;
    fn weight(&self, i: usize) -> f64;
    /// `(W A x)_{ij}` for an unknown node; `x` vanishes off the unknown block.
    fn apply_at(&self, x: &[f64], i: usize, j: usize) -> f64;
    fn diag(&self, i: usize) -> f64;
}

struct PsiOperator<'a> {
    g: &'a Grid,
}

impl WeightedOperator for PsiOperator<'_> {
    fn grid(&self) -> &Grid {
        self.g
    }
    fn i_first(&self) -> usize {
        1
    }
    fn weight(&self, i: usize) -> f64 {
        self.g.r(i)
    }
    fn apply_at(&self, x: &[f64], i: usize, j: usize) -> f64 {
        let g = self.g;
        let (dr, dz) = (g.dr(), g.dz());
        let (rp, rm, ri) = ((i as f64 + 0.5) * dr, (i as f64 - 0.5) * dr, g.r(i));
        let c = x[g.idx(i, j)];
        let radial = -(rp * (x[g.idx(i + 1, j)] - c) - rm * (c - x[g.idx(i - 1, j)])) / (dr * dr);
        let axial = -ri * (x[g.idx(i, j + 1)] - 2.0 * c + x[g.idx(i, j - 1)]) / (dz * dz);
        radial + axial + c / ri
    }
    fn diag(&self, i: usize) -> f64 {
        let g = self.g;
        let (dr, dz) = (g.dr(), g.dz());
        2.0 * g.r(i) / (dr * dr) + 2.0 * g.r(i) / (dz * dz) + 1.0 / g.r(i)
    }
}

struct Psi1Operator<'a> {
    g: &'a Grid,
}

impl WeightedOperator for Psi1Operator<'_> {
    fn grid(&self) -> &Grid {
        self.g
    }
    fn i_first(&self) -> usize {
        0
    }
    fn weight(&self, i: usize) -> f64 {
        if i == 0 {
            self.g.dr().powi(3) / 64.0
        } else {
            self.g.r(i).powi(3)
        }
    }
    fn apply_at(&self, x: &[f64], i: usize, j: usize) -> f64 {
        let g = self.g;
        let (dr, dz) = (g.dr(), g.dz());
        let c = x[g.idx(i, j)];
        let axial = -self.weight(i) * (x[g.idx(i, j + 1)] - 2.0 * c + x[g.idx(i, j - 1)]) / (dz * dz);
        let rp3 = ((i as f64 + 0.5) * dr).powi(3);
        let outer = rp3 * (x[g.idx(i + 1, j)] - c);
        let inner = if i == 0 {
            0.0
        } else {
            ((i as f64 - 0.5) * dr).powi(3) * (c - x[g.idx(i - 1, j)])
        };
        -(outer - inner) / (dr * dr) + axial
    }
    fn diag(&self, i: usize) -> f64 {
        let g = self.g;
        let (dr, dz) = (g.dr(), g.dz());
        let rp3 = ((i as f64 + 0.5) * dr).powi(3);
        let rm3 = if i == 0 { 0.0 } else { ((i as f64 - 0.5) * dr).powi(3) };
        (rp3 + rm3) / (dr * dr) + 2.0 * self.weight(i) / (dz * dz)
    }
}

fn unknowns(op: &dyn WeightedOperator) -> impl Iterator<Item = (usize, usize)> + '_ {
    let g = op.grid();
    (op.i_first()..g.nr()).flat_map(move |i| (1..g.nz()).map(move |j| (i, j)))
}

/// Jacobi-preconditioned CG on `W A x = W b`.
fn pcg(
    op: &dyn WeightedOperator,
    rhs: &[f64],
    guess: Option<&[f64]>,
    tol: f64,
    max_iter: usize,
) -> Result<(Vec<f64>, usize, f64)> {
    let g = op.grid();
    let n = g.len();
    let nodes: Vec<(usize, usize)> = unknowns(op).collect();
    let mut x = vec![0.0; n];
    if let Some(x0) = guess {
        for &(i, j) in &nodes {
            x[g.idx(i, j)] = x0[g.idx(i, j)];
        }
    }
    let rhs_norm = nodes.iter().map(|&(i, j)| rhs[g.idx(i, j)].powi(2)).sum::<f64>().sqrt();
    if rhs_norm == 0.0 {
        return Ok((vec![0.0; n], 0, 0.0));
    }
    // Residual of the unscaled equation, relative discrete L².
    let rel_residual = |res: &[f64]| -> f64 {
        nodes
            .iter()
            .map(|&(i, j)| (res[g.idx(i, j)] / op.weight(i)).powi(2))
            .sum::<f64>()
            .sqrt()
            / rhs_norm
    };

    let mut res = vec![0.0; n];
    for &(i, j) in &nodes {
        let k = g.idx(i, j);
        res[k] = op.weight(i) * rhs[k] - op.apply_at(&x, i, j);
    }
    let mut history = Vec::new();
    let mut rel = rel_residual(&res);
    history.push(rel);
    if rel <= tol {
        return Ok((x, 0, rel));
    }
    let mut z = vec![0.0; n];
    for &(i, j) in &nodes {
        let k = g.idx(i, j);
        z[k] = res[k] / op.diag(i);
    }
    let mut p = z.clone();
    let mut rz: f64 = nodes.iter().map(|&(i, j)| res[g.idx(i, j)] * z[g.idx(i, j)]).sum();
    let mut ap = vec![0.0; n];
    for it in 1..=max_iter {
        let mut pap = 0.0;
        for &(i, j) in &nodes {
            let k = g.idx(i, j);
            ap[k] = op.apply_at(&p, i, j);
            pap += p[k] * ap[k];
        }
        let alpha = rz / pap;
        for &(i, j) in &nodes {
            let k = g.idx(i, j);
            x[k] += alpha * p[k];
            res[k] -= alpha * ap[k];
        }
        rel = rel_residual(&res);
        history.push(rel);
        if rel <= tol {
            // Report the true residual rather than the recursively updated one.
            for &(i, j) in &nodes {
                let k = g.idx(i, j);
                res[k] = op.weight(i) * rhs[k] - op.apply_at(&x, i, j);
            }
            return Ok((x, it, rel_residual(&res)));
        }
        let mut rz_new = 0.0;
        for &(i, j) in &nodes {
            let k = g.idx(i, j);
            z[k] = res[k] / op.diag(i);
            rz_new += res[k] * z[k];
        }
        let beta = rz_new / rz;
        rz = rz_new;
        for &(i, j) in &nodes {
            let k = g.idx(i, j);
            p[k] = z[k] + beta * p[k];
        }
    }
    Err(Error::EllipticNonConvergence {
        iterations: max_iter,
        final_residual: rel,
        tolerance: tol,
        residual_history: history,
    })
}

/// Solves `-Δψ + ψ/r² = ω_φ` with `ψ|_S = 0`.
pub fn solve_psi(omega_phi: &ScalarField, tol: f64) -> Result<EllipticSolution> {
    solve(&EllipticProblem::new(ProblemKind::PsiForm, omega_phi.clone()).with_tolerance(tol), None)
}

/// Solves `-Δψ₁ - (2/r)ψ₁,r = Γ` with `ψ₁|_S = 0` by the default route.
pub fn solve_psi1(gamma: &ScalarField, tol: f64) -> Result<EllipticSolution> {
    solve_psi1_via(gamma, tol, Psi1Route::Substitution)
}

pub fn solve_psi1_via(gamma: &ScalarField, tol: f64, route: Psi1Route) -> Result<EllipticSolution> {
    let problem = EllipticProblem::new(ProblemKind::Psi1Form, gamma.clone()).with_tolerance(tol);
    match route {
        Psi1Route::Direct => solve(&problem, None),
        Psi1Route::Substitution => {
            let g = gamma.grid_arc();
            let omega = ScalarField::from_values(
                g,
                Parity::Odd,
                gamma.values().iter().enumerate().map(|(k, &v)| g.r(k / (g.nz() + 1)) * v).collect(),
            );
            let mut sub = EllipticProblem::new(ProblemKind::PsiForm, omega);
            sub.tolerance = problem.tolerance;
            sub.max_iterations = problem.max_iterations;
            let psi = solve(&sub, None)?;
            Ok(EllipticSolution {
                field: div_by_r(&psi.field),
                iterations: psi.iterations,
                final_residual: psi.final_residual,
            })
        }
    }
}

/// Solves a problem, optionally warm-started from `guess`.
pub fn solve(problem: &EllipticProblem, guess: Option<&ScalarField>) -> Result<EllipticSolution> {
    let g = problem.rhs.grid();
    let expected = match problem.kind {
        ProblemKind::PsiForm => Parity::Odd,
        ProblemKind::Psi1Form => Parity::Even,
    };
    if problem.rhs.parity() != expected {
        return Err(Error::InvalidParameter(format!(
            "{:?} right-hand side must be {:?}, got {:?}",
            problem.kind,
            expected,
            problem.rhs.parity()
        )));
    }
    let (values, iterations, final_residual) = match problem.kind {
        ProblemKind::PsiForm => pcg(
            &PsiOperator { g },
            problem.rhs.values(),
            guess.map(|f| f.values()),
            problem.tolerance,
            problem.max_iterations,
        )?,
        ProblemKind::Psi1Form => pcg(
            &Psi1Operator { g },
            problem.rhs.values(),
            guess.map(|f| f.values()),
            problem.tolerance,
            problem.max_iterations,
        )?,
    };
    Ok(EllipticSolution {
        field: ScalarField::from_values(problem.rhs.grid_arc(), expected, values),
        iterations,
        final_residual,
    })
}

/// Applies the discrete `PsiForm` operator `-Δψ + ψ/r²` at interior nodes (zero elsewhere).
pub fn apply_psi_operator(psi: &ScalarField) -> ScalarField {
    let g = psi.grid();
    let op = PsiOperator { g };
    let mut out = ScalarField::zeros(psi.grid_arc(), Parity::Odd);
    for i in 1..g.nr() {
        for j in 1..g.nz() {
            out.set(i, j, op.apply_at(psi.values(), i, j) / op.weight(i));
        }
    }
    out
}

/// Applies the discrete `Psi1Form` operator `-Δψ₁ - (2/r)ψ₁,r` at unknown nodes (zero elsewhere).
pub fn apply_psi1_operator(psi1: &ScalarField) -> ScalarField {
    let g = psi1.grid();
    let op = Psi1Operator { g };
    let mut out = ScalarField::zeros(psi1.grid_arc(), Parity::Even);
    for i in 0..g.nr() {
        for j in 1..g.nz() {
            out.set(i, j, op.apply_at(psi1.values(), i, j) / op.weight(i));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::sync::Arc;

    fn manufactured(g: &Arc<Grid>) -> (ScalarField, ScalarField) {
        let (rr, a) = (g.radius(), g.half_height());
        let omega = ScalarField::from_fn(g, Parity::Odd, |r, z| {
            8.0 * r * (a * a - z * z) + 2.0 * r * (rr * rr - r * r)
        });
        let psi = ScalarField::from_fn(g, Parity::Odd, |r, z| r * (rr * rr - r * r) * (a * a - z * z));
        (omega, psi)
    }

    #[test]
    fn zero_rhs_gives_zero() {
        let g = Arc::new(Grid::new(1.0, 1.0, 16, 16).unwrap());
        let s = solve_psi(&ScalarField::zeros(&g, Parity::Odd), 1e-10).unwrap();
        assert_eq!(s.field.max_abs(), 0.0);
        let s = solve_psi1(&ScalarField::zeros(&g, Parity::Even), 1e-10).unwrap();
        assert_eq!(s.field.max_abs(), 0.0);
    }

    #[test]
    fn manufactured_spot_values() {
        // ψ = r(1-r²)(1-z²): ψ(0.5,0) = 0.375 and ω_φ(0.5,0) = 4.75.
        let g = Arc::new(Grid::new(1.0, 1.0, 32, 32).unwrap());
        let (omega, exact) = manufactured(&g);
        assert!((omega.get(16, 16) - 4.75).abs() < 1e-12);
        assert!((exact.get(16, 16) - 0.375).abs() < 1e-12);
        let s = solve_psi(&omega, 1e-10).unwrap();
        assert!(s.final_residual <= 1e-10);
        assert!((s.field.get(16, 16) - 0.375).abs() < 2e-3);
    }

    #[test]
    fn residual_of_discrete_operator_meets_tolerance() {
        let g = Arc::new(Grid::new(1.0, 1.0, 24, 20).unwrap());
        let (omega, _) = manufactured(&g);
        let s = solve_psi(&omega, 1e-10).unwrap();
        let applied = apply_psi_operator(&s.field);
        let mut num = 0.0;
        let mut den = 0.0;
        for i in 1..g.nr() {
            for j in 1..g.nz() {
                num += (applied.get(i, j) - omega.get(i, j)).powi(2);
                den += omega.get(i, j).powi(2);
            }
        }
        assert!((num / den).sqrt() <= 1e-9);
        // Dirichlet data and axis parity.
        for j in 0..=g.nz() {
            assert_eq!(s.field.get(0, j), 0.0);
            assert_eq!(s.field.get(g.nr(), j), 0.0);
        }
        for i in 0..=g.nr() {
            assert_eq!(s.field.get(i, 0), 0.0);
            assert_eq!(s.field.get(i, g.nz()), 0.0);
        }
    }

    #[test]
    fn linear_in_rhs() {
        let g = Arc::new(Grid::new(1.0, 1.0, 16, 24).unwrap());
        let (omega, _) = manufactured(&g);
        let a = solve_psi(&omega, 1e-12).unwrap().field;
        let b = solve_psi(&omega.scaled(2.0), 1e-12).unwrap().field;
        assert!(b.max_abs_diff(&a.scaled(2.0)) < 1e-9 * b.max_abs());
    }

    #[test]
    fn psi_converges_at_second_order() {
        let mut errs = Vec::new();
        for n in [16, 32] {
            let g = Arc::new(Grid::new(1.0, 1.0, n, n).unwrap());
            let (omega, exact) = manufactured(&g);
            errs.push(solve_psi(&omega, 1e-12).unwrap().field.max_abs_diff(&exact));
        }
        assert!(errs[0] / errs[1] >= 3.5, "ratio {}", errs[0] / errs[1]);
    }

    #[test]
    fn psi1_routes_agree() {
        let g = Arc::new(Grid::new(1.0, 1.0, 32, 32).unwrap());
        let (omega, _) = manufactured(&g);
        let gamma = div_by_r(&omega);
        let sub = solve_psi1_via(&gamma, 1e-11, Psi1Route::Substitution).unwrap().field;
        let direct = solve_psi1_via(&gamma, 1e-11, Psi1Route::Direct).unwrap();
        assert!(direct.final_residual <= 1e-11);
        let exact = ScalarField::from_fn(&g, Parity::Even, |r, z| (1.0 - r * r) * (1.0 - z * z));
        let h2 = g.h() * g.h();
        assert!(sub.max_abs_diff(&direct.field) < 5.0 * h2);
        assert!(direct.field.max_abs_diff(&exact) < 5.0 * h2);
        assert!((direct.field.get(0, 16) - 1.0).abs() < 5.0 * h2);
    }

    #[test]
    fn psi1_nonnegative_for_nonnegative_gamma() {
        let g = Arc::new(Grid::new(1.0, 0.5, 20, 16).unwrap());
        let gamma = ScalarField::from_fn(&g, Parity::Even, |r, z| (1.0 + r * z).abs() * (-(r * r)).exp());
        for route in [Psi1Route::Direct, Psi1Route::Substitution] {
            let s = solve_psi1_via(&gamma, 1e-11, route).unwrap();
            assert!(s.field.min() >= -1e-12, "{route:?}: {}", s.field.min());
        }
    }

    #[test]
    fn wrong_parity_rejected() {
        let g = Arc::new(Grid::new(1.0, 1.0, 8, 8).unwrap());
        let p = EllipticProblem::new(ProblemKind::PsiForm, ScalarField::zeros(&g, Parity::Even));
        assert!(solve(&p, None).is_err());
    }

    #[test]
    fn non_convergence_carries_history() {
        let g = Arc::new(Grid::new(1.0, 1.0, 32, 32).unwrap());
        let (omega, _) = manufactured(&g);
        let mut p = EllipticProblem::new(ProblemKind::PsiForm, omega);
        p.max_iterations = 3;
        match solve(&p, None) {
            Err(Error::EllipticNonConvergence { residual_history, iterations, .. }) => {
                assert_eq!(iterations, 3);
                assert_eq!(residual_history.len(), 4);
            }
            other => panic!("expected non-convergence, got {other:?}"),
        }
    }
}
