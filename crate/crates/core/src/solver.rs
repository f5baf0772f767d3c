//! Newton shooting on the free Taylor coefficients: the unknowns θ are
//! tuned until the series solution meets every off-origin condition.

use thiserror::Error;

use crate::engine::{iterate, EngineError, Theta};
use crate::problem::{ProblemError, ProblemSpec};
use crate::series::Series;

pub const RESIDUAL_TOLERANCE: f64 = 1e-12;
pub const MAX_NEWTON_ITERATIONS: usize = 25;
pub const FD_RELATIVE_STEP: f64 = 1e-6;
pub const PIVOT_FLOOR: f64 = 1e-300;

#[derive(Debug, Clone, PartialEq)]
pub struct SolveResult {
    pub theta: Theta,
    pub solution: Series,
    pub newton_iterations: usize,
    /// `‖r‖_∞` over the off-origin conditions at `theta`.
    pub bc_residual_norm: f64,
    pub converged: bool,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SolveError {
    #[error(transparent)]
    Problem(#[from] ProblemError),
    #[error(transparent)]
    Engine(#[from] EngineError),
    #[error("singular Jacobian at Newton iteration {iteration}")]
    SingularJacobian { iteration: usize },
    #[error("no convergence after {} Newton iterations, last residual {:e}", .last.newton_iterations, .last.bc_residual_norm)]
    NotConverged { last: Box<SolveResult> },
}

/// `u^{(d)}(x_b) − value` for each off-origin condition, in declaration
/// order, where `u` is the final iterate at `theta`.
pub fn bc_residuals(spec: &ProblemSpec, theta: &Theta) -> Result<Vec<f64>, EngineError> {
    let state = iterate(spec, theta, spec.iterations)?;
    Ok(residuals_of(spec, state.solution()))
}

fn residuals_of(spec: &ProblemSpec, solution: &Series) -> Vec<f64> {
    spec.off_origin_conditions()
        .map(|bc| solution.eval_derivative(bc.derivative_order, bc.point) - bc.value)
        .collect()
}

fn sup_norm(values: &[f64]) -> f64 {
    values.iter().fold(0.0, |acc: f64, v| {
        if v.is_nan() || acc.is_nan() {
            f64::NAN
        } else {
            acc.max(v.abs())
        }
    })
}

/// Central-difference Jacobian of [`bc_residuals`] with step
/// `1e-6 · max(1, |θ_j|)` scaled by `step_scale`. Row `i` is residual
/// `i`, column `j` is `θ_j`.
pub fn fd_jacobian(
    spec: &ProblemSpec,
    theta: &Theta,
    step_scale: f64,
) -> Result<Vec<Vec<f64>>, EngineError> {
    let n = theta.len();
    let rows = spec.off_origin_conditions().count();
    let mut jac = vec![vec![0.0; n]; rows];
    for j in 0..n {
        let h = step_scale * FD_RELATIVE_STEP * theta.0[j].abs().max(1.0);
        let mut plus = theta.clone();
        plus.0[j] += h;
        let mut minus = theta.clone();
        minus.0[j] -= h;
        let rp = bc_residuals(spec, &plus)?;
        let rm = bc_residuals(spec, &minus)?;
        let width = plus.0[j] - minus.0[j];
        for (row, (p, m)) in jac.iter_mut().zip(rp.iter().zip(&rm)) {
            row[j] = (p - m) / width;
        }
    }
    Ok(jac)
}

/// Solves `a x = b` by Gaussian elimination with partial pivoting.
/// Returns `None` when a pivot falls below [`PIVOT_FLOOR`].
pub fn solve_dense(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Option<Vec<f64>> {
    let n = b.len();
    for col in 0..n {
        let pivot_row = (col..n).max_by(|&i, &k| a[i][col].abs().total_cmp(&a[k][col].abs()))?;
        let pivot = a[pivot_row][col].abs();
        if pivot.is_nan() || pivot < PIVOT_FLOOR {
            return None;
        }
        a.swap(col, pivot_row);
        b.swap(col, pivot_row);
        let (upper, lower) = a.split_at_mut(col + 1);
        let pivot_row = &upper[col];
        for (offset, row) in lower.iter_mut().enumerate() {
            let factor = row[col] / pivot_row[col];
            if factor == 0.0 {
                continue;
            }
            for (target, source) in row[col..].iter_mut().zip(&pivot_row[col..]) {
                *target -= factor * source;
            }
            b[col + 1 + offset] -= factor * b[col];
        }
    }
    let mut x = vec![0.0; n];
    for row in (0..n).rev() {
        let tail: f64 = (row + 1..n).map(|k| a[row][k] * x[k]).sum();
        x[row] = (b[row] - tail) / a[row][row];
    }
    Some(x)
}

/// Newton iteration from θ = 0 until `‖r‖_∞ ≤ 1e-12`, at most 25 steps.
pub fn solve(spec: &ProblemSpec) -> Result<SolveResult, SolveError> {
    spec.validate()?;
    let mut theta = Theta::zeros(spec.unknown_count());
    let mut iteration = 0;
    loop {
        let state = iterate(spec, &theta, spec.iterations)?;
        let residual = residuals_of(spec, state.solution());
        let norm = sup_norm(&residual);
        let result = SolveResult {
            theta: theta.clone(),
            solution: state.solution().clone(),
            newton_iterations: iteration,
            bc_residual_norm: norm,
            converged: norm <= RESIDUAL_TOLERANCE,
        };
        if result.converged {
            return Ok(result);
        }
        if iteration == MAX_NEWTON_ITERATIONS || !norm.is_finite() {
            return Err(SolveError::NotConverged {
                last: Box::new(result),
            });
        }
        let jac = fd_jacobian(spec, &theta, 1.0)?;
        let rhs: Vec<f64> = residual.iter().map(|r| -r).collect();
        let step = solve_dense(jac, rhs).ok_or(SolveError::SingularJacobian { iteration })?;
        for (t, s) in theta.0.iter_mut().zip(step) {
            *t += s;
        }
        iteration += 1;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problem::{builtin, BoundaryCondition, RhsTerm};
    use crate::series::ExpPoly;

    #[test]
    fn dense_solver() {
        let a = vec![vec![0.0, 2.0], vec![3.0, 1.0]];
        let x = solve_dense(a, vec![4.0, 5.0]).unwrap();
        assert!((x[0] - 1.0).abs() < 1e-15 && (x[1] - 2.0).abs() < 1e-15);
        assert!(solve_dense(vec![vec![1.0, 2.0], vec![2.0, 4.0]], vec![1.0, 2.0]).is_none());
        assert_eq!(solve_dense(vec![], vec![]), Some(vec![]));
    }

    #[test]
    fn no_unknowns_means_no_newton_steps() {
        let spec = ProblemSpec {
            order: 2,
            right: 1.0,
            terms: vec![RhsTerm::forcing(ExpPoly::constant(2.0))],
            bcs: vec![
                BoundaryCondition::new(0.0, 0, 1.0),
                BoundaryCondition::new(0.0, 1, 0.0),
            ],
            exact: Some(ExpPoly::single(0.0, vec![1.0, 0.0, 1.0])),
            truncation: 4,
            iterations: 1,
        };
        assert!(bc_residuals(&spec, &Theta::default()).unwrap().is_empty());
        let result = solve(&spec).unwrap();
        assert!(result.converged);
        assert!(result.theta.is_empty());
        assert_eq!(result.newton_iterations, 0);
        assert!((result.solution.eval(0.5) - 1.25).abs() < 1e-15);
    }

    #[test]
    fn residuals_at_zero_theta_match_direct_evaluation() {
        let spec = builtin(1).unwrap();
        let r = bc_residuals(&spec, &Theta::zeros(3)).unwrap();
        let s = iterate(&spec, &Theta::zeros(3), 1)
            .unwrap()
            .solution()
            .clone();
        let e = std::f64::consts::E;
        assert_eq!(r.len(), 3);
        assert_eq!(r[0], s.eval(1.0));
        assert_eq!(r[1], s.eval_derivative(1, 1.0) + e);
        assert_eq!(r[2], s.eval_derivative(2, 1.0) + 4.0 * e);
    }

    #[test]
    fn invalid_spec_is_passed_through() {
        let mut spec = builtin(1).unwrap();
        spec.bcs.pop();
        assert!(matches!(solve(&spec), Err(SolveError::Problem(_))));
    }

    #[test]
    fn singular_system_is_reported() {
        // u'' = 0: the free constant term never reaches u'(1)
        let spec = ProblemSpec {
            order: 2,
            right: 1.0,
            terms: vec![],
            bcs: vec![
                BoundaryCondition::new(0.0, 1, 1.0),
                BoundaryCondition::new(1.0, 1, 2.0),
            ],
            exact: None,
            truncation: 4,
            iterations: 1,
        };
        assert!(matches!(
            solve(&spec),
            Err(SolveError::SingularJacobian { iteration: 0 })
        ));
    }

    #[test]
    fn rootless_residual_does_not_converge() {
        // u' = u² + 1, one correction from u_0 = θ gives u(1) = θ² + θ + 1,
        // which never vanishes; Newton cycles between 0 and -1
        let spec = ProblemSpec {
            order: 1,
            right: 1.0,
            terms: vec![
                RhsTerm::new(ExpPoly::constant(1.0), vec![0, 0]),
                RhsTerm::forcing(ExpPoly::constant(1.0)),
            ],
            bcs: vec![BoundaryCondition::new(1.0, 0, 0.0)],
            exact: None,
            truncation: 4,
            iterations: 1,
        };
        let r = bc_residuals(&spec, &Theta(vec![2.0])).unwrap();
        assert!((r[0] - 7.0).abs() < 1e-14);
        match solve(&spec) {
            Err(SolveError::NotConverged { last }) => {
                assert_eq!(last.newton_iterations, MAX_NEWTON_ITERATIONS);
                assert!(!last.converged);
                assert!(last.bc_residual_norm >= 0.75);
            }
            other => panic!("unexpected {other:?}"),
        }
    }
}
