//! Order-`m` boundary value problems `u^{(m)} = F(x, u, u', …)` on `[0, b]`.
//!
//! The right-hand side is a sum of [`RhsTerm`]s, each an exp-poly
//! coefficient times a product of solution derivatives. A term with no
//! factors is plain forcing. Problems can be built in code, loaded from
//! the line-oriented text format handled by [`parse_problem`] and
//! [`render_problem`], or taken from [`builtin`].

use std::collections::HashSet;
use std::fmt::Write as _;
use std::str::FromStr;

use thiserror::Error;

use crate::series::{ExpPoly, ExpTerm};

pub const DEFAULT_TRUNCATION: usize = 12;
pub const DEFAULT_ITERATIONS: usize = 1;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ProblemError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("invalid problem: {}", .0.join("; "))]
    Invalid(Vec<String>),
    #[error("no built-in example {0} (expected 1..=4)")]
    UnknownBuiltin(usize),
}

/// `u^{(derivative_order)}(point) = value`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundaryCondition {
    pub point: f64,
    pub derivative_order: usize,
    pub value: f64,
}

impl BoundaryCondition {
    pub fn new(point: f64, derivative_order: usize, value: f64) -> Self {
        Self {
            point,
            derivative_order,
            value,
        }
    }

    pub fn at_origin(&self) -> bool {
        self.point == 0.0
    }
}

/// `coeff(x) · Π_i u^{(factors[i])}(x)`.
#[derive(Debug, Clone, PartialEq)]
pub struct RhsTerm {
    pub coeff: ExpPoly,
    pub factors: Vec<usize>,
}

impl RhsTerm {
    pub fn new(coeff: ExpPoly, factors: Vec<usize>) -> Self {
        Self { coeff, factors }
    }

    pub fn forcing(coeff: ExpPoly) -> Self {
        Self::new(coeff, Vec::new())
    }

    pub fn is_forcing(&self) -> bool {
        self.factors.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProblemSpec {
    /// ODE order `m`.
    pub order: usize,
    /// Right end of the interval `[0, b]`.
    pub right: f64,
    pub terms: Vec<RhsTerm>,
    pub bcs: Vec<BoundaryCondition>,
    pub exact: Option<ExpPoly>,
    /// Degree at which the residual is truncated before each correction.
    pub truncation: usize,
    pub iterations: usize,
}

impl ProblemSpec {
    /// Degree of the iterates: a residual truncated at `W` integrates
    /// exactly into degree `W + m`.
    pub fn working_degree(&self) -> usize {
        self.truncation + self.order
    }

    pub fn origin_conditions(&self) -> impl Iterator<Item = &BoundaryCondition> {
        self.bcs.iter().filter(|bc| bc.at_origin())
    }

    pub fn off_origin_conditions(&self) -> impl Iterator<Item = &BoundaryCondition> {
        self.bcs.iter().filter(|bc| !bc.at_origin())
    }

    /// Taylor orders below `m` not pinned by an origin condition, in
    /// increasing order. These carry the free parameters θ.
    pub fn free_orders(&self) -> Vec<usize> {
        let pinned: HashSet<usize> = self
            .origin_conditions()
            .map(|bc| bc.derivative_order)
            .collect();
        (0..self.order).filter(|j| !pinned.contains(j)).collect()
    }

    pub fn unknown_count(&self) -> usize {
        self.order - self.origin_conditions().count()
    }

    pub fn validate(&self) -> Result<(), ProblemError> {
        let issues = self.issues();
        if issues.is_empty() {
            Ok(())
        } else {
            Err(ProblemError::Invalid(issues))
        }
    }

    /// Every violated invariant, one message each.
    pub fn issues(&self) -> Vec<String> {
        let mut issues = Vec::new();
        let m = self.order;
        if m == 0 {
            issues.push("order must be at least 1".to_string());
        }
        if !(self.right.is_finite() && self.right > 0.0) {
            issues.push(format!(
                "domain end {} must be a positive number",
                self.right
            ));
        }
        if self.truncation < m {
            issues.push(format!(
                "truncation {} must be at least the order {m}",
                self.truncation
            ));
        }
        if self.iterations < 1 {
            issues.push("iterations must be at least 1".to_string());
        }
        if self.bcs.len() != m {
            issues.push(format!(
                "expected {m} boundary conditions, found {}",
                self.bcs.len()
            ));
        }
        let mut seen = HashSet::new();
        for (i, bc) in self.bcs.iter().enumerate() {
            let n = i + 1;
            if bc.derivative_order >= m {
                issues.push(format!(
                    "boundary condition {n}: derivative order {} must be below {m}",
                    bc.derivative_order
                ));
            }
            if !(bc.point.is_finite() && bc.point >= 0.0 && bc.point <= self.right) {
                issues.push(format!(
                    "boundary condition {n}: point {} lies outside [0, {}]",
                    bc.point, self.right
                ));
            }
            if !bc.value.is_finite() {
                issues.push(format!("boundary condition {n}: value is not finite"));
            }
            if !seen.insert((bc.point.to_bits(), bc.derivative_order)) {
                issues.push(format!(
                    "boundary condition {n}: duplicate condition on u^({}) at {}",
                    bc.derivative_order, bc.point
                ));
            }
        }
        for (i, term) in self.terms.iter().enumerate() {
            let n = i + 1;
            if term.coeff.terms.is_empty() {
                issues.push(format!("term {n}: coefficient has no exp-poly parts"));
            }
            if term.coeff.terms.iter().any(|t| t.poly.is_empty()) {
                issues.push(format!("term {n}: empty polynomial"));
            }
            if !term.coeff.is_finite() {
                issues.push(format!("term {n}: non-finite coefficient"));
            }
            if let Some(&d) = term.factors.iter().find(|&&d| d >= m) {
                issues.push(format!("term {n}: factor order {d} must be below {m}"));
            }
        }
        if let Some(exact) = &self.exact {
            if exact.terms.iter().any(|t| t.poly.is_empty()) || !exact.is_finite() {
                issues.push("exact solution must have finite, non-empty terms".to_string());
            }
        }
        issues
    }
}

fn parse_number<T: FromStr>(token: &str, line: usize, what: &str) -> Result<T, ProblemError> {
    token.parse().map_err(|_| ProblemError::Syntax {
        line,
        message: format!("cannot read {what} from {token:?}"),
    })
}

fn parse_exp_term(tokens: &[&str], line: usize) -> Result<ExpTerm, ProblemError> {
    let (rate, poly) = tokens.split_first().ok_or_else(|| ProblemError::Syntax {
        line,
        message: "missing exponential rate".to_string(),
    })?;
    if poly.is_empty() {
        return Err(ProblemError::Syntax {
            line,
            message: "missing polynomial coefficients".to_string(),
        });
    }
    Ok(ExpTerm::new(
        parse_number(rate, line, "rate")?,
        poly.iter()
            .map(|t| parse_number(t, line, "coefficient"))
            .collect::<Result<_, _>>()?,
    ))
}

/// Parses the problem file format:
///
/// ```text
/// order <m>
/// domain 0 <b>
/// truncation <W>          # optional, default 12
/// iterations <n>          # optional, default 1
/// term <rate> <c0> <c1> … [ ; <d1> <d2> … ]
/// bc <point> <derivative_order> <value>
/// exact <rate> <c0> <c1> …   # optional, repeatable (summed)
/// ```
pub fn parse_problem(text: &str) -> Result<ProblemSpec, ProblemError> {
    let mut order = None;
    let mut right = None;
    let mut truncation = DEFAULT_TRUNCATION;
    let mut iterations = DEFAULT_ITERATIONS;
    let mut terms = Vec::new();
    let mut bcs = Vec::new();
    let mut exact: Option<ExpPoly> = None;

    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = raw.split('#').next().unwrap_or("");
        let tokens: Vec<&str> = content.split_whitespace().collect();
        let Some((&keyword, args)) = tokens.split_first() else {
            continue;
        };
        let arity = |n: usize| -> Result<(), ProblemError> {
            if args.len() == n {
                Ok(())
            } else {
                Err(ProblemError::Syntax {
                    line,
                    message: format!("`{keyword}` takes {n} values, found {}", args.len()),
                })
            }
        };
        match keyword {
            "order" => {
                arity(1)?;
                order = Some(parse_number(args[0], line, "order")?);
            }
            "domain" => {
                arity(2)?;
                let left: f64 = parse_number(args[0], line, "domain start")?;
                if left != 0.0 {
                    return Err(ProblemError::Syntax {
                        line,
                        message: format!("domain must start at 0, found {}", args[0]),
                    });
                }
                right = Some(parse_number(args[1], line, "domain end")?);
            }
            "truncation" => {
                arity(1)?;
                truncation = parse_number(args[0], line, "truncation")?;
            }
            "iterations" => {
                arity(1)?;
                iterations = parse_number(args[0], line, "iterations")?;
            }
            "term" => {
                let mut parts = args.split(|t| *t == ";");
                let coeff_tokens = parts.next().unwrap_or(&[]);
                let factor_tokens = parts.next().unwrap_or(&[]);
                if parts.next().is_some() {
                    return Err(ProblemError::Syntax {
                        line,
                        message: "more than one `;` in term".to_string(),
                    });
                }
                let coeff = ExpPoly::new(vec![parse_exp_term(coeff_tokens, line)?]);
                let factors = factor_tokens
                    .iter()
                    .map(|t| parse_number(t, line, "derivative order"))
                    .collect::<Result<_, _>>()?;
                terms.push(RhsTerm::new(coeff, factors));
            }
            "bc" => {
                arity(3)?;
                bcs.push(BoundaryCondition::new(
                    parse_number(args[0], line, "point")?,
                    parse_number(args[1], line, "derivative order")?,
                    parse_number(args[2], line, "value")?,
                ));
            }
            "exact" => {
                let term = parse_exp_term(args, line)?;
                exact.get_or_insert_with(ExpPoly::default).terms.push(term);
            }
            other => {
                return Err(ProblemError::Syntax {
                    line,
                    message: format!("unknown keyword `{other}`"),
                })
            }
        }
    }

    let missing = |what: &str| ProblemError::Syntax {
        line: text.lines().count().max(1),
        message: format!("missing `{what}` line"),
    };
    let spec = ProblemSpec {
        order: order.ok_or_else(|| missing("order"))?,
        right: right.ok_or_else(|| missing("domain"))?,
        terms,
        bcs,
        exact,
        truncation,
        iterations,
    };
    spec.validate()?;
    Ok(spec)
}

fn join(values: &[f64]) -> String {
    values
        .iter()
        .map(|v| v.to_string())
        .collect::<Vec<_>>()
        .join(" ")
}

/// Serializes a spec into the text format. Terms whose coefficient has
/// several exp-poly parts are split into one line per part.
pub fn render_problem(spec: &ProblemSpec) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "order {}", spec.order);
    let _ = writeln!(out, "domain 0 {}", spec.right);
    let _ = writeln!(out, "truncation {}", spec.truncation);
    let _ = writeln!(out, "iterations {}", spec.iterations);
    for term in &spec.terms {
        for part in &term.coeff.terms {
            let _ = write!(out, "term {} {}", part.rate, join(&part.poly));
            if !term.factors.is_empty() {
                let factors: Vec<String> = term.factors.iter().map(|d| d.to_string()).collect();
                let _ = write!(out, " ; {}", factors.join(" "));
            }
            out.push('\n');
        }
    }
    for bc in &spec.bcs {
        let _ = writeln!(out, "bc {} {} {}", bc.point, bc.derivative_order, bc.value);
    }
    if let Some(exact) = &spec.exact {
        for part in &exact.terms {
            let _ = writeln!(out, "exact {} {}", part.rate, join(&part.poly));
        }
    }
    out
}

/// The four seventh-order examples on `[0, 1]`.
///
/// 1. `u⁽⁷⁾ = −u − eˣ(35 + 12x + 2x²)`, exact `x(1−x)eˣ`.
/// 2. `u⁽⁷⁾ = e⁻ˣ u²`, exact `eˣ`.
/// 3. `u⁽⁷⁾ = −u u' + g(x)` with `g` split into `e^x` and `e^{2x}` parts,
///    exact `x(1−x)eˣ`.
/// 4. `u⁽⁷⁾ = u u' − eˣ(6 + x − eˣx + eˣx²)` with conditions at 0, ½ and 1,
///    exact `(1−x)eˣ`.
pub fn builtin(n: usize) -> Result<ProblemSpec, ProblemError> {
    let e = std::f64::consts::E;
    let sqrt_e = 0.5f64.exp();
    let bc = BoundaryCondition::new;
    let spec = |terms, bcs, exact| ProblemSpec {
        order: 7,
        right: 1.0,
        terms,
        bcs,
        exact: Some(exact),
        truncation: DEFAULT_TRUNCATION,
        iterations: DEFAULT_ITERATIONS,
    };
    // shared by examples 1 and 3
    let conditions_1 = || {
        vec![
            bc(0.0, 0, 0.0),
            bc(1.0, 0, 0.0),
            bc(0.0, 1, 1.0),
            bc(1.0, 1, -e),
            bc(0.0, 2, 0.0),
            bc(1.0, 2, -4.0 * e),
            bc(0.0, 3, -3.0),
        ]
    };
    let x_one_minus_x = ExpPoly::single(1.0, vec![0.0, 1.0, -1.0]);
    match n {
        1 => Ok(spec(
            vec![
                RhsTerm::forcing(ExpPoly::single(1.0, vec![-35.0, -12.0, -2.0])),
                RhsTerm::new(ExpPoly::constant(-1.0), vec![0]),
            ],
            conditions_1(),
            x_one_minus_x,
        )),
        2 => Ok(spec(
            vec![RhsTerm::new(ExpPoly::single(-1.0, vec![1.0]), vec![0, 0])],
            vec![
                bc(0.0, 0, 1.0),
                bc(0.0, 1, 1.0),
                bc(0.0, 2, 1.0),
                bc(0.0, 3, 1.0),
                bc(1.0, 0, e),
                bc(1.0, 1, e),
                bc(1.0, 2, e),
            ],
            ExpPoly::single(1.0, vec![1.0]),
        )),
        3 => Ok(spec(
            vec![
                RhsTerm::new(ExpPoly::constant(-1.0), vec![0, 1]),
                RhsTerm::forcing(ExpPoly::single(1.0, vec![-35.0, -13.0, -1.0])),
                RhsTerm::forcing(ExpPoly::single(2.0, vec![0.0, 1.0, -2.0, 0.0, 1.0])),
            ],
            conditions_1(),
            x_one_minus_x,
        )),
        4 => Ok(spec(
            vec![
                RhsTerm::new(ExpPoly::constant(1.0), vec![0, 1]),
                RhsTerm::forcing(ExpPoly::single(1.0, vec![-6.0, -1.0])),
                RhsTerm::forcing(ExpPoly::single(2.0, vec![0.0, 1.0, -1.0])),
            ],
            vec![
                bc(0.0, 0, 1.0),
                bc(0.5, 0, sqrt_e / 2.0),
                bc(0.0, 1, 0.0),
                bc(0.5, 1, -sqrt_e / 2.0),
                bc(0.0, 2, -1.0),
                bc(1.0, 2, -2.0 * e),
                bc(1.0, 0, 0.0),
            ],
            ExpPoly::single(1.0, vec![1.0, -1.0]),
        )),
        other => Err(ProblemError::UnknownBuiltin(other)),
    }
}
