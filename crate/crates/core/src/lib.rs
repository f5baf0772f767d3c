//! Series solutions of order-`m` ODE boundary value problems by variational
//! iteration with homotopy perturbation.
//!
//! A problem `u^{(m)} = F(x, u, u', …)` on `[0, b]` is solved by
//!
//! 1. fixing the Taylor coefficients pinned by conditions at the origin and
//!    leaving the rest as unknowns θ ([`engine::initial_approx`]),
//! 2. applying the correction `v ↦ v + ∫₀ˣ λ(t) {v^{(m)} − F(v)} dt` with
//!    `λ = (−1)^m (t − x)^{m−1} / (m−1)!` ([`kernel`], [`engine`]),
//! 3. choosing θ by Newton iteration so the remaining conditions hold
//!    ([`solver`]).
//!
//! ```
//! use vihpm::{problem::builtin, solver::solve};
//!
//! let result = solve(&builtin(1).unwrap()).unwrap();
//! assert!((result.theta.values()[0] + 1.0 / 3.0).abs() < 1e-7);
//! ```

pub mod diagnostics;
pub mod engine;
pub mod kernel;
pub mod problem;
pub mod report;
pub mod series;
pub mod solver;

pub use engine::Theta;
pub use problem::{builtin, parse_problem, ProblemSpec};
pub use series::{ExpPoly, ExpTerm, Series};
pub use solver::{solve, SolveResult};
