//! Error tables against a closed-form reference, CSV output and grids.

use std::fmt::Write as _;
use std::io::{Read, Write};

use thiserror::Error;

use crate::problem::ProblemSpec;
use crate::series::Series;
use crate::solver::SolveResult;

#[derive(Debug, Error)]
pub enum ReportError {
    #[error("grid step must be positive and finite, got {0}")]
    BadStep(f64),
    #[error("grid points must be finite and strictly increasing")]
    UnorderedGrid,
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error("bad number {0:?} in CSV")]
    Number(String),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ErrorRow {
    pub x: f64,
    pub exact: Option<f64>,
    pub approx: f64,
    pub abs_error: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct ErrorTable {
    pub rows: Vec<ErrorRow>,
    pub max_abs_error: Option<f64>,
}

impl ErrorTable {
    fn from_rows(rows: Vec<ErrorRow>) -> Self {
        let max_abs_error = rows
            .iter()
            .map(|r| r.abs_error)
            .collect::<Option<Vec<f64>>>()
            .filter(|errs| !errs.is_empty())
            .map(|errs| errs.into_iter().fold(0.0, f64::max));
        Self {
            rows,
            max_abs_error,
        }
    }

    pub fn row_at(&self, x: f64) -> Option<&ErrorRow> {
        self.rows.iter().find(|r| (r.x - x).abs() < 1e-12)
    }

    /// Fixed-width rendering for terminal output.
    pub fn render(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(
            out,
            "{:>6}  {:>22}  {:>22}  {:>12}",
            "x", "exact", "approx", "abs error"
        );
        let opt = |v: Option<f64>, prec: usize| match v {
            Some(v) => format!("{v:.prec$e}"),
            None => "-".to_string(),
        };
        for row in &self.rows {
            let _ = writeln!(
                out,
                "{:>6.3}  {:>22}  {:>22.15e}  {:>12}",
                row.x,
                opt(row.exact, 15),
                row.approx,
                opt(row.abs_error, 5)
            );
        }
        out
    }
}

/// `0, h, 2h, …` up to `right`. When `right` is an integer multiple of `h`
/// the points are computed as `i·right/n` so the end point is hit exactly.
pub fn uniform_grid(right: f64, step: f64) -> Result<Vec<f64>, ReportError> {
    if !(step.is_finite() && step > 0.0) {
        return Err(ReportError::BadStep(step));
    }
    let n = (right / step).round();
    if n >= 1.0 && ((n * step - right).abs() <= 1e-9 * right) {
        let n = n as usize;
        return Ok((0..=n).map(|i| i as f64 * right / n as f64).collect());
    }
    let count = (right / step).floor() as usize;
    Ok((0..=count).map(|i| i as f64 * step).collect())
}

fn check_grid(grid: &[f64]) -> Result<(), ReportError> {
    let finite = grid.iter().all(|x| x.is_finite());
    if !finite || grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(ReportError::UnorderedGrid);
    }
    Ok(())
}

pub fn error_table(
    spec: &ProblemSpec,
    result: &SolveResult,
    grid: &[f64],
) -> Result<ErrorTable, ReportError> {
    table_for(
        &result.solution,
        spec.exact.as_ref().map(|e| move |x| e.eval(x)),
        grid,
    )
}

/// Tabulates `approx` against an optional reference on the grid.
pub fn table_for<F: Fn(f64) -> f64>(
    approx: &Series,
    exact: Option<F>,
    grid: &[f64],
) -> Result<ErrorTable, ReportError> {
    check_grid(grid)?;
    let rows = grid
        .iter()
        .map(|&x| {
            let a = approx.eval(x);
            let e = exact.as_ref().map(|f| f(x));
            ErrorRow {
                x,
                exact: e,
                approx: a,
                abs_error: e.map(|e| (a - e).abs()),
            }
        })
        .collect();
    Ok(ErrorTable::from_rows(rows))
}

pub fn max_abs_error(table: &ErrorTable) -> Option<f64> {
    table.max_abs_error
}

fn fmt17(v: f64) -> String {
    format!("{v:.16e}")
}

fn opt17(v: Option<f64>) -> String {
    v.map(fmt17).unwrap_or_default()
}

/// Writes `x,exact,approx,abs_error` with 17 significant digits; absent
/// values are empty fields.
pub fn emit_csv<W: Write>(table: &ErrorTable, dest: W) -> Result<(), ReportError> {
    let mut writer = csv::Writer::from_writer(dest);
    writer.write_record(["x", "exact", "approx", "abs_error"])?;
    for row in &table.rows {
        writer.write_record([
            fmt17(row.x),
            opt17(row.exact),
            fmt17(row.approx),
            opt17(row.abs_error),
        ])?;
    }
    writer.flush()?;
    Ok(())
}

/// Reads back what [`emit_csv`] wrote.
pub fn read_csv<R: Read>(source: R) -> Result<ErrorTable, ReportError> {
    let mut reader = csv::Reader::from_reader(source);
    let parse = |s: &str| {
        s.parse::<f64>()
            .map_err(|_| ReportError::Number(s.to_string()))
    };
    let parse_opt = |s: &str| {
        if s.is_empty() {
            Ok(None)
        } else {
            parse(s).map(Some)
        }
    };
    let mut rows = Vec::new();
    for record in reader.records() {
        let record = record?;
        rows.push(ErrorRow {
            x: parse(&record[0])?,
            exact: parse_opt(&record[1])?,
            approx: parse(&record[2])?,
            abs_error: parse_opt(&record[3])?,
        });
    }
    Ok(ErrorTable::from_rows(rows))
}

/// `degree,coefficient` rows for every coefficient of the series.
pub fn emit_series_csv<W: Write>(series: &Series, dest: W) -> Result<(), ReportError> {
    let mut writer = csv::Writer::from_writer(dest);
    writer.write_record(["degree", "coefficient"])?;
    for (k, &c) in series.coeffs().iter().enumerate() {
        writer.write_record([k.to_string(), fmt17(c)])?;
    }
    writer.flush()?;
    Ok(())
}
