//! Command-line front end.
//!
//! Exit codes: 0 on success, 1 when a file cannot be read or written, 2 for
//! usage errors, invalid problems and solver failures.

use std::error::Error as StdError;
use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use crate::problem_file::{read_problem_file as read_problem_file_at, ProblemFile, ProblemFileError};
use crate::report::{build_table, write_outputs};
use crate::scenario::Scenario;
use crate::solver::solve_spline;
use crate::state::same_orbit;

pub const EXIT_OK: i32 = 0;
pub const EXIT_IO: i32 = 1;
pub const EXIT_FAILURE: i32 = 2;

/// Output directory used when neither `--out` nor `QSPLINE_OUT` is set.
pub const DEFAULT_OUT_DIR: &str = "qspline-out";

#[derive(Debug, Parser)]
#[command(
    name = "qspline",
    version,
    about = "Quantum spline interpolation of density matrices"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Solve a problem file and write report.json, table.csv, trajectory.csv (and bloch.csv for qubits).
    Solve {
        problem: PathBuf,
        #[command(flatten)]
        overrides: Overrides,
    },
    /// Solve a built-in problem: qubit, qutrit or qutrit-off-orbit.
    Scenario {
        name: String,
        #[command(flatten)]
        overrides: Overrides,
    },
    /// Parse and check a problem file without solving it.
    Validate { problem: PathBuf },
    /// Print the problem file of a built-in scenario.
    Problem { name: String },
}

#[derive(Debug, Args)]
struct Overrides {
    /// Output directory [default: $QSPLINE_OUT, else qspline-out]
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    epsilon: Option<f64>,
    #[arg(long)]
    iterations: Option<usize>,
    #[arg(long)]
    steps: Option<usize>,
}

impl Overrides {
    fn apply(&self, file: &mut ProblemFile) {
        if let Some(e) = self.epsilon {
            file.epsilon = e;
        }
        if let Some(i) = self.iterations {
            file.iterations = i;
        }
        if let Some(s) = self.steps {
            file.steps = s;
        }
    }

    fn out_dir(&self) -> PathBuf {
        self.out
            .clone()
            .or_else(|| std::env::var_os("QSPLINE_OUT").map(PathBuf::from))
            .unwrap_or_else(|| PathBuf::from(DEFAULT_OUT_DIR))
    }
}

/// Runs the CLI on `args` (including the program name) and returns the exit code.
pub fn cli_main<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_FAILURE } else { EXIT_OK };
        }
    };
    match cli.command {
        Command::Solve { problem, overrides } => match read_problem_file(&problem) {
            Ok(file) => run(file, &overrides),
            Err(code) => code,
        },
        Command::Scenario { name, overrides } => match name.parse::<Scenario>() {
            Ok(sc) => run(sc.problem(), &overrides),
            Err(e) => usage_error(&e.to_string()),
        },
        Command::Validate { problem } => match read_problem_file(&problem) {
            Ok(file) => validate(&file),
            Err(code) => code,
        },
        Command::Problem { name } => match name.parse::<Scenario>() {
            Ok(sc) => {
                println!("{}", sc.problem().to_json());
                EXIT_OK
            }
            Err(e) => usage_error(&e.to_string()),
        },
    }
}

fn usage_error(message: &str) -> i32 {
    eprintln!(
        "error: {message}\n\nUsage: qspline <solve|scenario|validate|problem> ...\nRun `qspline --help` for details."
    );
    EXIT_FAILURE
}

fn print_chain(err: &dyn StdError) {
    eprintln!("error: {err}");
    let mut shown = err.to_string();
    let mut source = err.source();
    while let Some(s) = source {
        let text = s.to_string();
        if !shown.ends_with(&text) {
            eprintln!("  caused by: {text}");
        }
        shown = text;
        source = s.source();
    }
}

fn read_problem_file(path: &Path) -> Result<ProblemFile, i32> {
    read_problem_file_at(path).map_err(|e| {
        print_chain(&e);
        match e {
            ProblemFileError::Io { .. } => EXIT_IO,
            _ => EXIT_FAILURE,
        }
    })
}

fn validate(file: &ProblemFile) -> i32 {
    let spec = match file.to_spec() {
        Ok(spec) => spec,
        Err(e) => {
            print_chain(&e);
            return EXIT_FAILURE;
        }
    };
    let mut all_same = true;
    for t in &spec.targets {
        match same_orbit(&spec.rho0, &t.rho) {
            Ok(same) => all_same &= same,
            Err(e) => {
                print_chain(&e);
                return EXIT_FAILURE;
            }
        }
    }
    println!(
        "{} targets, n={}, same-orbit: {}",
        spec.targets.len(),
        spec.n(),
        if all_same { "yes" } else { "no" }
    );
    EXIT_OK
}

fn run(mut file: ProblemFile, overrides: &Overrides) -> i32 {
    overrides.apply(&mut file);
    let spec = match file.to_spec() {
        Ok(spec) => spec,
        Err(e) => {
            print_chain(&e);
            return EXIT_FAILURE;
        }
    };
    let report = match solve_spline(&spec) {
        Ok(r) => r,
        Err(e) => {
            print_chain(&e);
            return EXIT_FAILURE;
        }
    };
    let dir = overrides.out_dir();
    let written = match write_outputs(&report, &dir) {
        Ok(w) => w,
        Err(e) => {
            eprintln!("error: cannot write outputs to {}: {e}", dir.display());
            return EXIT_IO;
        }
    };

    let mut out = std::io::stdout().lock();
    let _ = write!(out, "{}", build_table(&report).to_text());
    let _ = writeln!(
        out,
        "J = {:.2} (control {:.2}, penalty {:.2})",
        report.cost.j_total, report.cost.j_cont, report.cost.penalty
    );
    for check in report.orbit_checks.iter().filter(|c| !c.same_orbit) {
        let _ = writeln!(
            out,
            "warning: target {} is off the initial orbit (orbit distance {:.3e})",
            check.target, check.orbit_distance
        );
    }
    for path in written {
        let _ = writeln!(out, "wrote {}", path.display());
    }
    EXIT_OK
}
