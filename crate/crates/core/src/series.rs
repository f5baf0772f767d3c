//! Truncated power series about the origin and exponential-polynomial
//! expressions.
//!
//! A [`Series`] holds the coefficients `c_0..=c_W` of a polynomial in `x`
//! where every product is cut off at the fixed degree `W`. Series of
//! different degrees never mix; the binary operations return
//! [`SeriesError::DegreeMismatch`] instead.

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SeriesError {
    #[error("series degree mismatch: {left} vs {right}")]
    DegreeMismatch { left: usize, right: usize },
    #[error("{len} coefficients do not fit in a degree-{degree} series")]
    TooManyCoefficients { len: usize, degree: usize },
    #[error("a series needs at least one coefficient")]
    Empty,
    #[error("coefficient {index} is not finite ({value})")]
    NonFinite { index: usize, value: f64 },
}

/// Power series `Σ c_k x^k` truncated at degree `W`.
#[derive(Debug, Clone, PartialEq)]
pub struct Series {
    coeffs: Vec<f64>,
}

impl Series {
    /// Builds a degree-`degree` series from leading coefficients, padding
    /// the tail with zeros. Input longer than `degree + 1` is rejected
    /// rather than truncated.
    pub fn new(coeffs: &[f64], degree: usize) -> Result<Self, SeriesError> {
        if coeffs.is_empty() {
            return Err(SeriesError::Empty);
        }
        if coeffs.len() > degree + 1 {
            return Err(SeriesError::TooManyCoefficients {
                len: coeffs.len(),
                degree,
            });
        }
        if let Some((index, &value)) = coeffs.iter().enumerate().find(|(_, c)| !c.is_finite()) {
            return Err(SeriesError::NonFinite { index, value });
        }
        let mut padded = vec![0.0; degree + 1];
        padded[..coeffs.len()].copy_from_slice(coeffs);
        Ok(Self { coeffs: padded })
    }

    pub fn zero(degree: usize) -> Self {
        Self {
            coeffs: vec![0.0; degree + 1],
        }
    }

    pub fn constant(value: f64, degree: usize) -> Self {
        let mut s = Self::zero(degree);
        s.coeffs[0] = value;
        s
    }

    /// `scale · x^power`; zero when `power` exceeds the truncation degree.
    pub fn monomial(scale: f64, power: usize, degree: usize) -> Self {
        let mut s = Self::zero(degree);
        if power <= degree {
            s.coeffs[power] = scale;
        }
        s
    }

    /// Wraps an already sized coefficient vector (crate-internal fast path).
    pub(crate) fn from_vec(coeffs: Vec<f64>) -> Self {
        debug_assert!(!coeffs.is_empty());
        Self { coeffs }
    }

    /// Truncation degree `W`.
    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    /// Coefficient of `x^k`, zero beyond the truncation degree.
    pub fn coeff(&self, k: usize) -> f64 {
        self.coeffs.get(k).copied().unwrap_or(0.0)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|&c| c == 0.0)
    }

    fn check_degree(&self, other: &Series) -> Result<(), SeriesError> {
        if self.degree() != other.degree() {
            return Err(SeriesError::DegreeMismatch {
                left: self.degree(),
                right: other.degree(),
            });
        }
        Ok(())
    }

    pub fn add(&self, other: &Series) -> Result<Series, SeriesError> {
        self.check_degree(other)?;
        Ok(Self::from_vec(
            self.coeffs
                .iter()
                .zip(&other.coeffs)
                .map(|(a, b)| a + b)
                .collect(),
        ))
    }

    pub fn sub(&self, other: &Series) -> Result<Series, SeriesError> {
        self.check_degree(other)?;
        Ok(Self::from_vec(
            self.coeffs
                .iter()
                .zip(&other.coeffs)
                .map(|(a, b)| a - b)
                .collect(),
        ))
    }

    pub fn scale(&self, factor: f64) -> Series {
        Self::from_vec(self.coeffs.iter().map(|c| c * factor).collect())
    }

    /// Cauchy product, discarding every degree above `W`.
    pub fn mul(&self, other: &Series) -> Result<Series, SeriesError> {
        self.check_degree(other)?;
        let w = self.degree();
        let mut out = vec![0.0; w + 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            if a == 0.0 {
                continue;
            }
            for (j, &b) in other.coeffs[..=w - i].iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Ok(Self::from_vec(out))
    }

    /// `order`-fold formal derivative. The top `order` coefficients of the
    /// result are zero: whatever the true series had there was lost to
    /// truncation.
    pub fn differentiate(&self, order: usize) -> Series {
        let w = self.degree();
        let mut out = vec![0.0; w + 1];
        for (k, slot) in out
            .iter_mut()
            .take((w + 1).saturating_sub(order))
            .enumerate()
        {
            // (k+1)(k+2)...(k+order)
            let falling: f64 = (k + 1..=k + order).map(|i| i as f64).product();
            *slot = self.coeffs[k + order] * falling;
        }
        Self::from_vec(out)
    }

    /// Horner evaluation.
    pub fn eval(&self, x: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, &c| acc * x + c)
    }

    pub fn eval_derivative(&self, order: usize, x: f64) -> f64 {
        self.differentiate(order).eval(x)
    }

    /// Largest `|f(x)|` over the given points.
    pub fn sup_norm_on(&self, grid: &[f64]) -> f64 {
        grid.iter().map(|&x| self.eval(x).abs()).fold(0.0, f64::max)
    }
}

/// One `e^{rate·x} · Σ p_j x^j` summand of an [`ExpPoly`].
#[derive(Debug, Clone, PartialEq)]
pub struct ExpTerm {
    pub rate: f64,
    pub poly: Vec<f64>,
}

impl ExpTerm {
    pub fn new(rate: f64, poly: Vec<f64>) -> Self {
        Self { rate, poly }
    }

    pub fn eval(&self, x: f64) -> f64 {
        let p = self.poly.iter().rev().fold(0.0, |acc, &c| acc * x + c);
        (self.rate * x).exp() * p
    }
}

/// Finite sum of exponential-polynomial terms. Used for forcing functions
/// and for closed-form reference solutions.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ExpPoly {
    pub terms: Vec<ExpTerm>,
}

impl ExpPoly {
    pub fn new(terms: Vec<ExpTerm>) -> Self {
        Self { terms }
    }

    pub fn constant(value: f64) -> Self {
        Self::single(0.0, vec![value])
    }

    pub fn single(rate: f64, poly: Vec<f64>) -> Self {
        Self {
            terms: vec![ExpTerm::new(rate, poly)],
        }
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.terms.iter().map(|t| t.eval(x)).sum()
    }

    /// Taylor expansion about 0 to degree `degree`:
    /// `c_n = Σ_terms Σ_{j ≤ min(n, d)} p_j · rate^{n−j} / (n−j)!`.
    pub fn expand(&self, degree: usize) -> Series {
        let mut out = vec![0.0; degree + 1];
        for term in &self.terms {
            // rate^k / k! for k = 0..=degree
            let mut exp_coeffs = Vec::with_capacity(degree + 1);
            let mut e = 1.0;
            for k in 0..=degree {
                if k > 0 {
                    e *= term.rate / k as f64;
                }
                exp_coeffs.push(e);
            }
            for (j, &p) in term.poly.iter().enumerate().take(degree + 1) {
                for n in j..=degree {
                    out[n] += p * exp_coeffs[n - j];
                }
            }
        }
        Series::from_vec(out)
    }

    pub fn is_finite(&self) -> bool {
        self.terms
            .iter()
            .all(|t| t.rate.is_finite() && t.poly.iter().all(|p| p.is_finite()))
    }
}
