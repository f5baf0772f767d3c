//! Parameterized initial approximation and the correction map
//! `B[v] = v + ∫₀ˣ λ(t) { v^{(m)}(t) − F(t, v, v', …) } dt`.
//!
//! Iterates are carried at the problem's working degree `W + m`. The
//! kernel drops every residual coefficient above `W`, so each correction
//! integrates a degree-`W` residual exactly.

use thiserror::Error;

use crate::kernel::{CorrectionKernel, KernelError};
use crate::problem::{ProblemSpec, RhsTerm};
use crate::series::{Series, SeriesError};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EngineError {
    #[error("expected {expected} free parameters, got {found}")]
    ThetaLength { expected: usize, found: usize },
    #[error("series has degree {found}, the problem works at degree {expected}")]
    WorkingDegree { expected: usize, found: usize },
    #[error("He expansion needs at least one component")]
    NoComponents,
    #[error(transparent)]
    Series(#[from] SeriesError),
    #[error(transparent)]
    Kernel(#[from] KernelError),
}

/// Free Taylor coefficients of the initial approximation, ordered by
/// increasing degree (the A, B, C, … of the worked examples).
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Theta(pub Vec<f64>);

impl Theta {
    pub fn zeros(n: usize) -> Self {
        Self(vec![0.0; n])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }
}

impl From<Vec<f64>> for Theta {
    fn from(values: Vec<f64>) -> Self {
        Self(values)
    }
}

/// Polynomial in the embedding parameter `p` whose coefficients are
/// series in `x`: `Σ_k p^k h_k`.
#[derive(Debug, Clone, PartialEq)]
pub struct PSeries {
    pub orders: Vec<Series>,
}

impl PSeries {
    /// `Σ_k p^k h_k` at a numeric `p`.
    pub fn at(&self, p: f64) -> Series {
        let degree = self.orders[0].degree();
        let mut acc = Series::zero(degree);
        for h in self.orders.iter().rev() {
            acc = acc
                .scale(p)
                .add(h)
                .expect("PSeries components share a degree");
        }
        acc
    }
}

/// Successive approximations `v_0, v_1, …` and their differences.
#[derive(Debug, Clone, PartialEq)]
pub struct IterationState {
    pub iterates: Vec<Series>,
    pub corrections: Vec<Series>,
}

impl IterationState {
    /// The last iterate, i.e. the approximate solution.
    pub fn solution(&self) -> &Series {
        self.iterates
            .last()
            .expect("at least the initial approximation")
    }
}

fn check_degree(spec: &ProblemSpec, v: &Series) -> Result<(), EngineError> {
    if v.degree() != spec.working_degree() {
        return Err(EngineError::WorkingDegree {
            expected: spec.working_degree(),
            found: v.degree(),
        });
    }
    Ok(())
}

/// Degree-`(m−1)` polynomial whose Taylor coefficient `c_j` is `value/j!`
/// for every origin condition of order `j`; the remaining coefficients are
/// taken from `theta` in increasing degree.
pub fn initial_approx(spec: &ProblemSpec, theta: &Theta) -> Result<Series, EngineError> {
    let free = spec.free_orders();
    if theta.len() != free.len() {
        return Err(EngineError::ThetaLength {
            expected: free.len(),
            found: theta.len(),
        });
    }
    let mut coeffs = vec![0.0; spec.working_degree() + 1];
    for bc in spec.origin_conditions() {
        let j = bc.derivative_order;
        let factorial: f64 = (1..=j).map(|i| i as f64).product();
        coeffs[j] = bc.value / factorial;
    }
    for (&j, &value) in free.iter().zip(theta.values()) {
        coeffs[j] = value;
    }
    Ok(Series::from_vec(coeffs))
}

fn apply_term(term: &RhsTerm, v: &Series) -> Result<Series, SeriesError> {
    let mut acc = term.coeff.expand(v.degree());
    for &d in &term.factors {
        acc = acc.mul(&v.differentiate(d))?;
    }
    Ok(acc)
}

/// `F(x, v, v', …)` as a series at `v`'s degree.
pub fn rhs(spec: &ProblemSpec, v: &Series) -> Result<Series, SeriesError> {
    spec.terms
        .iter()
        .try_fold(Series::zero(v.degree()), |acc, term| {
            acc.add(&apply_term(term, v)?)
        })
}

/// `v^{(m)} − F(v)`.
pub fn residual(v: &Series, spec: &ProblemSpec) -> Result<Series, SeriesError> {
    v.differentiate(spec.order).sub(&rhs(spec, v)?)
}

pub fn kernel_for(spec: &ProblemSpec) -> Result<CorrectionKernel, KernelError> {
    CorrectionKernel::new(spec.order, spec.working_degree())
}

/// One application of the correction map. The added term vanishes to
/// order `m` at the origin, so origin conditions are kept exactly.
pub fn correct_once(v: &Series, spec: &ProblemSpec) -> Result<Series, EngineError> {
    check_degree(spec, v)?;
    let correction = kernel_for(spec)?.integrate(&residual(v, spec)?)?;
    Ok(v.add(&correction)?)
}

fn mul_p(a: &[Series], b: &[Series], max_order: usize) -> Result<Vec<Series>, SeriesError> {
    let degree = a[0].degree();
    let mut out = vec![Series::zero(degree); max_order + 1];
    for (i, ai) in a.iter().enumerate() {
        for (j, bj) in b.iter().enumerate().take(max_order + 1 - i) {
            if ai.is_zero() || bj.is_zero() {
                continue;
            }
            out[i + j] = out[i + j].add(&ai.mul(bj)?)?;
        }
    }
    Ok(out)
}

/// He coefficients of `F(Σ_k p^k u_k)`: the expansion is a polynomial in
/// `p`, truncated here at `p^K` with `K = parts.len() − 1`. Forcing terms
/// only reach `h_0`.
pub fn he_coefficients(spec: &ProblemSpec, parts: &[Series]) -> Result<PSeries, EngineError> {
    let first = parts.first().ok_or(EngineError::NoComponents)?;
    let degree = first.degree();
    let max_order = parts.len() - 1;
    let mut orders = vec![Series::zero(degree); max_order + 1];
    for term in &spec.terms {
        let mut prod = vec![Series::zero(degree); max_order + 1];
        prod[0] = term.coeff.expand(degree);
        for &d in &term.factors {
            let factor: Vec<Series> = parts.iter().map(|u| u.differentiate(d)).collect();
            prod = mul_p(&prod, &factor, max_order)?;
        }
        for (acc, h) in orders.iter_mut().zip(&prod) {
            *acc = acc.add(h)?;
        }
    }
    Ok(PSeries { orders })
}

/// `v_0 = initial_approx(θ)`, `v_{k+1} = B[v_k]`, `count` times.
pub fn iterate(
    spec: &ProblemSpec,
    theta: &Theta,
    count: usize,
) -> Result<IterationState, EngineError> {
    let mut iterates = vec![initial_approx(spec, theta)?];
    let mut corrections = Vec::with_capacity(count);
    for _ in 0..count {
        let v = iterates.last().unwrap();
        let next = correct_once(v, spec)?;
        corrections.push(next.sub(v)?);
        iterates.push(next);
    }
    Ok(IterationState {
        iterates,
        corrections,
    })
}
