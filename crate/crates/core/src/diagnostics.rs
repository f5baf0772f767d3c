//! Empirical contraction checks for the correction map.
//!
//! The Lipschitz constant γ of the map is never available in closed form,
//! so it is estimated from grid sup-norms of successive corrections:
//! `δ_k = ‖v_{k+1} − v_k‖` and `γ̂_k = δ_{k+1} / δ_k`. The report then
//! checks the fixed-point bound
//! `‖v_k − v_l‖ ≤ Σ_{j=l−1}^{k−2} γ̂^j · δ_0` for `1 ≤ l < k ≤ n`.

use thiserror::Error;

use crate::engine::{iterate, residual, EngineError, Theta};
use crate::problem::ProblemSpec;
use crate::series::{Series, SeriesError};

/// Relative slack on the fixed-point bound.
pub const BOUND_SLACK: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DiagnosticsError {
    #[error("convergence analysis needs at least 2 iterations, got {0}")]
    TooFewIterations(usize),
    #[error(transparent)]
    Engine(#[from] EngineError),
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceReport {
    /// `δ_k = ‖v_{k+1} − v_k‖` on the grid, `k = 0..n`.
    pub deltas: Vec<f64>,
    /// `(k, δ_{k+1}/δ_k)` for every `k` with `δ_k > 0`.
    pub gamma_estimates: Vec<(usize, f64)>,
    pub gamma_max: f64,
    pub contraction_ok: bool,
    pub banach_bound_ok: bool,
    /// Some correction vanished exactly on the grid.
    pub fixed_point_reached: bool,
}

/// Builds the report from iterates `v_0..=v_n` already computed.
pub fn report_from_iterates(
    iterates: &[Series],
    grid: &[f64],
) -> Result<ConvergenceReport, SeriesError> {
    let deltas = iterates
        .windows(2)
        .map(|w| Ok(w[1].sub(&w[0])?.sup_norm_on(grid)))
        .collect::<Result<Vec<f64>, SeriesError>>()?;
    let gamma_estimates: Vec<(usize, f64)> = deltas
        .windows(2)
        .enumerate()
        .filter(|(_, w)| w[0] > 0.0)
        .map(|(k, w)| (k, w[1] / w[0]))
        .collect();
    let gamma_max = gamma_estimates.iter().map(|&(_, g)| g).fold(0.0, f64::max);
    let contraction_ok = gamma_max < 1.0;

    let n = iterates.len() - 1;
    let delta0 = deltas.first().copied().unwrap_or(0.0);
    let mut banach_bound_ok = true;
    for l in 1..n {
        for k in l + 1..=n {
            let gap = iterates[k].sub(&iterates[l])?.sup_norm_on(grid);
            let bound: f64 = (l - 1..=k - 2)
                .map(|j| gamma_max.powi(j as i32))
                .sum::<f64>()
                * delta0;
            if gap > bound * (1.0 + BOUND_SLACK) {
                banach_bound_ok = false;
            }
        }
    }
    Ok(ConvergenceReport {
        fixed_point_reached: deltas.contains(&0.0),
        deltas,
        gamma_estimates,
        gamma_max,
        contraction_ok,
        banach_bound_ok,
    })
}

/// Runs `n` corrections from the initial approximation at `theta` and
/// reports on them.
pub fn analyze_convergence(
    spec: &ProblemSpec,
    theta: &Theta,
    n: usize,
    grid: &[f64],
) -> Result<ConvergenceReport, DiagnosticsError> {
    if n < 2 {
        return Err(DiagnosticsError::TooFewIterations(n));
    }
    let state = iterate(spec, theta, n)?;
    Ok(report_from_iterates(&state.iterates, grid).map_err(EngineError::from)?)
}

/// `|S^{(m)}(x) − F(x, S, …)|` at each grid point. Informational only.
pub fn ode_residual_report(
    spec: &ProblemSpec,
    solution: &Series,
    grid: &[f64],
) -> Result<Vec<f64>, SeriesError> {
    let r = residual(solution, spec)?;
    Ok(grid.iter().map(|&x| r.eval(x).abs()).collect())
}
