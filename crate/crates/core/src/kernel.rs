//! Lagrange multiplier of the variational correction for `L = d^m/dx^m` and
//! the correction integral `K[f](x) = ∫₀ˣ λ(t) f(t) dt` on series.

use thiserror::Error;

use crate::series::{Series, SeriesError};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum KernelError {
    #[error("ODE order must be at least 1")]
    ZeroOrder,
    #[error("truncation degree {degree} is below the ODE order {order}")]
    DegreeBelowOrder { order: usize, degree: usize },
    #[error(transparent)]
    Series(#[from] SeriesError),
}

/// `λ(t) = (−1)^m (t − x)^{m−1} / (m−1)!` together with the working
/// degree of the series it acts on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CorrectionKernel {
    order: usize,
    degree: usize,
}

impl CorrectionKernel {
    pub fn new(order: usize, degree: usize) -> Result<Self, KernelError> {
        if order == 0 {
            return Err(KernelError::ZeroOrder);
        }
        if degree < order {
            return Err(KernelError::DegreeBelowOrder { order, degree });
        }
        Ok(Self { order, degree })
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn lambda(&self, t: f64, x: f64) -> f64 {
        self.lambda_derivative(0, t, x)
    }

    /// `∂^k λ / ∂t^k` from the closed form; identically zero for `k ≥ m`.
    pub fn lambda_derivative(&self, k: usize, t: f64, x: f64) -> f64 {
        let m = self.order;
        if k >= m {
            return 0.0;
        }
        let p = m - 1 - k;
        let sign = if m.is_multiple_of(2) { 1.0 } else { -1.0 };
        let mut value = sign;
        for i in 1..=p {
            value *= (t - x) / i as f64;
        }
        value
    }

    /// Closed-form `∫₀ˣ λ(t) t^j dt = −j!/(j+m)! · x^{j+m}`, applied
    /// coefficient-wise. Degrees above the working degree are dropped and
    /// the first `m` coefficients of the result are zero.
    pub fn integrate(&self, f: &Series) -> Result<Series, KernelError> {
        if f.degree() != self.degree {
            return Err(SeriesError::DegreeMismatch {
                left: self.degree,
                right: f.degree(),
            }
            .into());
        }
        let m = self.order;
        let mut out = vec![0.0; self.degree + 1];
        for (j, &c) in f.coeffs()[..=self.degree - m].iter().enumerate() {
            let ratio: f64 = (1..=m).map(|i| 1.0 / (j + i) as f64).product();
            out[j + m] = -c * ratio;
        }
        Ok(Series::from_vec(out))
    }
}
