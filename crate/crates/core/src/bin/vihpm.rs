use std::fs::File;
use std::io::BufWriter;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use vihpm::diagnostics::analyze_convergence;
use vihpm::problem::{builtin, parse_problem, ProblemSpec};
use vihpm::report::{emit_csv, emit_series_csv, error_table, uniform_grid};
use vihpm::solver::{solve, SolveError, SolveResult};

const INPUT_ERROR: u8 = 1;
const SOLVER_ERROR: u8 = 2;

#[derive(Parser)]
#[command(
    name = "vihpm",
    version,
    about = "Series solutions of high-order ODE boundary value problems"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Source {
    /// Problem file in the line-oriented text format
    #[arg(required_unless_present = "builtin", conflicts_with = "builtin")]
    problem_file: Option<PathBuf>,
    /// Use built-in example N (1-4)
    #[arg(long = "builtin", value_name = "N")]
    builtin: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// Solve for the free constants and tabulate the series solution
    Solve {
        #[command(flatten)]
        source: Source,
        /// Residual truncation degree
        #[arg(long, value_name = "W")]
        truncation: Option<usize>,
        /// Number of corrections applied to the initial approximation
        #[arg(long, value_name = "K")]
        iterations: Option<usize>,
        #[arg(long, value_name = "H", default_value_t = 0.1)]
        grid_step: f64,
        /// Write the error table as CSV
        #[arg(long, value_name = "PATH")]
        emit_csv: Option<PathBuf>,
        /// Write the series coefficients as degree,coefficient CSV
        #[arg(long, value_name = "PATH")]
        emit_series: Option<PathBuf>,
    },
    /// Estimate the contraction constant from successive corrections
    Convergence {
        #[command(flatten)]
        source: Source,
        #[arg(long, value_name = "n", default_value_t = 3)]
        depth: usize,
    },
}

enum Failure {
    Input(String),
    Solver(String),
}

impl From<SolveError> for Failure {
    fn from(err: SolveError) -> Self {
        match err {
            SolveError::Problem(e) => Failure::Input(e.to_string()),
            other => Failure::Solver(other.to_string()),
        }
    }
}

fn load(source: &Source) -> Result<ProblemSpec, Failure> {
    if let Some(n) = source.builtin {
        return builtin(n).map_err(|e| Failure::Input(e.to_string()));
    }
    let path = source
        .problem_file
        .as_ref()
        .expect("clap enforces a source");
    let text = std::fs::read_to_string(path)
        .map_err(|e| Failure::Input(format!("{}: {e}", path.display())))?;
    parse_problem(&text).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

fn create(path: &Path) -> Result<BufWriter<File>, Failure> {
    File::create(path)
        .map(BufWriter::new)
        .map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

fn print_solution(result: &SolveResult, spec: &ProblemSpec) {
    println!(
        "converged after {} Newton iteration(s), boundary residual {:.3e}",
        result.newton_iterations, result.bc_residual_norm
    );
    for (order, value) in spec.free_orders().iter().zip(result.theta.values()) {
        println!("  c{order:<2} = {value:.17}");
    }
    println!("series coefficients:");
    for (k, c) in result.solution.coeffs().iter().enumerate() {
        println!("  x^{k:<2} {c:+.12e}");
    }
}

fn run_solve(
    source: &Source,
    truncation: Option<usize>,
    iterations: Option<usize>,
    grid_step: f64,
    emit_csv_path: Option<&Path>,
    emit_series_path: Option<&Path>,
) -> Result<(), Failure> {
    let mut spec = load(source)?;
    if let Some(w) = truncation {
        spec.truncation = w;
    }
    if let Some(k) = iterations {
        spec.iterations = k;
    }
    let grid = uniform_grid(spec.right, grid_step).map_err(|e| Failure::Input(e.to_string()))?;
    let result = solve(&spec)?;
    print_solution(&result, &spec);

    let table = error_table(&spec, &result, &grid).map_err(|e| Failure::Input(e.to_string()))?;
    println!();
    print!("{}", table.render());
    match table.max_abs_error {
        Some(max) => println!("max abs error: {max:.6e}"),
        None => println!("max abs error: n/a (no exact solution given)"),
    }

    if let Some(path) = emit_csv_path {
        emit_csv(&table, create(path)?).map_err(|e| Failure::Input(e.to_string()))?;
    }
    if let Some(path) = emit_series_path {
        emit_series_csv(&result.solution, create(path)?)
            .map_err(|e| Failure::Input(e.to_string()))?;
    }
    Ok(())
}

fn run_convergence(source: &Source, depth: usize) -> Result<(), Failure> {
    let spec = load(source)?;
    if depth < 2 {
        return Err(Failure::Input(format!(
            "--depth must be at least 2, got {depth}"
        )));
    }
    let grid = uniform_grid(spec.right, 0.1).map_err(|e| Failure::Input(e.to_string()))?;
    let result = solve(&spec)?;
    let report = analyze_convergence(&spec, &result.theta, depth, &grid)
        .map_err(|e| Failure::Solver(e.to_string()))?;
    println!("deltas:");
    for (k, d) in report.deltas.iter().enumerate() {
        println!("  {k}: {d:.6e}");
    }
    println!("gamma estimates:");
    for (k, g) in &report.gamma_estimates {
        println!("  {k}: {g:.6e}");
    }
    println!("gamma_max: {:.6e}", report.gamma_max);
    println!("contraction_ok: {}", report.contraction_ok);
    println!("banach_bound_ok: {}", report.banach_bound_ok);
    println!("fixed_point_reached: {}", report.fixed_point_reached);
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            let _ = err.print();
            return if err.use_stderr() {
                ExitCode::from(INPUT_ERROR)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    let outcome = match &cli.command {
        Command::Solve {
            source,
            truncation,
            iterations,
            grid_step,
            emit_csv,
            emit_series,
        } => run_solve(
            source,
            *truncation,
            *iterations,
            *grid_step,
            emit_csv.as_deref(),
            emit_series.as_deref(),
        ),
        Command::Convergence { source, depth } => run_convergence(source, *depth),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Input(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(INPUT_ERROR)
        }
        Err(Failure::Solver(msg)) => {
            eprintln!("solver failed: {msg}");
            ExitCode::from(SOLVER_ERROR)
        }
    }
}
