use clap::{Args, Parser, Subcommand};
use rigidity_lab::app::{execute, render_report, AppError, Request, EXIT_MALFORMED, EXIT_OK};
use serde_json::Value;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "rigidity-lab", version, about = "Hyperbolic toral automorphisms, cones, semiconjugacies and lifting obstructions")]
struct Cli {
    /// Seed for every randomized check.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Print a table instead of JSON.
    #[arg(long, global = true)]
    table: bool,
    /// Full float precision in tables.
    #[arg(long, global = true)]
    verbose: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct MatrixArg {
    /// JSON file: {"d": n, "entries": [[...]]} or a bare array of rows.
    #[arg(long)]
    matrix: PathBuf,
}

#[derive(Subcommand)]
enum Command {
    /// Check that no eigenvalue lies on the unit circle.
    Hyperbolic {
        #[command(flatten)]
        m: MatrixArg,
        #[arg(long, default_value_t = rigidity_lab::matrix_core::DEFAULT_TOL)]
        tol: f64,
    },
    /// Stable/unstable splitting and an adapted norm.
    Splitting {
        #[command(flatten)]
        m: MatrixArg,
        #[arg(long, default_value_t = rigidity_lab::matrix_core::DEFAULT_TOL)]
        tol: f64,
        #[arg(long, default_value_t = rigidity_lab::semiconj::ADAPTED_MARGIN)]
        margin: f64,
    },
    /// Regularity profile of the induced action.
    Regularity {
        #[command(flatten)]
        m: MatrixArg,
    },
    /// Rank-one factor test for a list of vectors.
    Rank1 {
        #[arg(long)]
        vectors: PathBuf,
    },
    /// Resonant and non-resonant roots of a representation.
    Nonres {
        #[arg(long)]
        family: String,
        #[arg(long)]
        rank: usize,
        /// Dynkin labels, comma separated.
        #[arg(long)]
        highest_weight: String,
        #[arg(long, default_value_t = rigidity_lab::rootdata::DEFAULT_WEIGHT_LIMIT)]
        limit: usize,
    },
    /// Row gcds of the Cartan matrix.
    GcdRows {
        #[arg(long)]
        family: String,
        #[arg(long)]
        rank: usize,
    },
    /// Central series and, with an automorphism, layer hyperbolicity.
    Nilpotent {
        #[arg(long)]
        algebra: PathBuf,
        #[arg(long)]
        automorphism: Option<PathBuf>,
        #[arg(long)]
        level: Option<usize>,
    },
    /// Solve for the semiconjugacy h = id + w.
    Semiconj {
        #[command(flatten)]
        m: MatrixArg,
        #[arg(long)]
        field: PathBuf,
        #[arg(long, default_value_t = 1e-8)]
        tol: f64,
        #[arg(long, default_value_t = 64)]
        grid: usize,
        #[arg(long, default_value_t = 200)]
        max_terms: usize,
        /// Random points for the independent residual check.
        #[arg(long, default_value_t = 1000)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        holder_samples: usize,
        /// Write the corrector grid here.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Find N with g f^N g^-1 mapping cones into cones.
    ConeCert {
        #[arg(long)]
        f: PathBuf,
        #[arg(long)]
        g: PathBuf,
        #[arg(long, default_value_t = 1.0)]
        eps: f64,
        #[arg(long)]
        delta0: Option<f64>,
        #[arg(long)]
        verify: bool,
        #[arg(long, default_value_t = 10_000)]
        samples: usize,
    },
    /// Lift a projective action to the group by solving relator equations.
    Lift {
        #[arg(long)]
        presentation: PathBuf,
        #[arg(long)]
        rho: PathBuf,
        #[arg(long)]
        defects: PathBuf,
    },
}

fn read_json(p: &Path) -> Result<Value, AppError> {
    let s = std::fs::read_to_string(p).map_err(|e| AppError::malformed(format!("{}: {e}", p.display())))?;
    serde_json::from_str(&s).map_err(|e| AppError::malformed(format!("{}: {e}", p.display())))
}

fn request(cli: &Cli) -> Result<(Request, Option<PathBuf>), AppError> {
    let seed = cli.seed;
    let req = match &cli.command {
        Command::Hyperbolic { m, tol } => Request::Hyperbolic {
            matrix: read_json(&m.matrix)?,
            tol: *tol,
        },
        Command::Splitting { m, tol, margin } => Request::Splitting {
            matrix: read_json(&m.matrix)?,
            tol: *tol,
            margin: *margin,
        },
        Command::Regularity { m } => Request::Regularity {
            matrix: read_json(&m.matrix)?,
        },
        Command::Rank1 { vectors } => Request::Rank1 {
            vectors: read_json(vectors)?,
        },
        Command::Nonres {
            family,
            rank,
            highest_weight,
            limit,
        } => Request::Nonres {
            family: family.clone(),
            rank: *rank,
            highest_weight: highest_weight
                .split(',')
                .map(|s| Value::String(s.trim().to_string()))
                .collect(),
            limit: *limit,
        },
        Command::GcdRows { family, rank } => Request::GcdRows {
            family: family.clone(),
            rank: *rank,
        },
        Command::Nilpotent {
            algebra,
            automorphism,
            level,
        } => Request::Nilpotent {
            algebra: read_json(algebra)?,
            automorphism: automorphism.as_deref().map(read_json).transpose()?,
            level: *level,
        },
        Command::Semiconj {
            m,
            field,
            tol,
            grid,
            max_terms,
            samples,
            holder_samples,
            out,
        } => {
            return Ok((
                Request::Semiconj {
                    matrix: read_json(&m.matrix)?,
                    field: read_json(field)?,
                    tol: *tol,
                    grid: *grid,
                    max_terms: *max_terms,
                    samples: *samples,
                    holder_samples: *holder_samples,
                    seed,
                    include_w: out.is_some(),
                },
                out.clone(),
            ))
        }
        Command::ConeCert {
            f,
            g,
            eps,
            delta0,
            verify,
            samples,
        } => Request::ConeCert {
            f: read_json(f)?,
            g: read_json(g)?,
            eps: *eps,
            delta0: *delta0,
            verify: *verify,
            samples: *samples,
            seed,
        },
        Command::Lift {
            presentation,
            rho,
            defects,
        } => Request::Lift {
            presentation: read_json(presentation)?,
            rho: read_json(rho)?,
            defects: read_json(defects)?,
        },
    };
    Ok((req, None))
}

fn configure_threads() -> Result<(), AppError> {
    let Ok(raw) = std::env::var("RIGIDITY_LAB_THREADS") else {
        return Ok(());
    };
    let n: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| AppError::malformed(format!("RIGIDITY_LAB_THREADS must be a positive integer, got {raw:?}")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| AppError::malformed(e.to_string()))
}

fn run(cli: &Cli) -> Result<Value, AppError> {
    configure_threads()?;
    let (req, out) = request(cli)?;
    let mut report = execute(&req)?;
    if let Some(path) = out {
        let w = report.as_object_mut().and_then(|m| m.remove("w")).unwrap_or(Value::Null);
        let body = serde_json::to_string_pretty(&w).map_err(|e| AppError::domain("Internal", e.to_string()))?;
        std::fs::write(&path, body + "\n").map_err(|e| AppError::domain("Io", format!("{}: {e}", path.display())))?;
        report["w_path"] = Value::String(path.display().to_string());
    }
    Ok(report)
}

fn print(v: &Value, cli: &Cli) {
    let body = if cli.table {
        render_report(v, cli.verbose)
    } else {
        serde_json::to_string_pretty(v).unwrap_or_else(|_| v.to_string()) + "\n"
    };
    // a closed pipe is not worth a panic
    let _ = std::io::stdout().lock().write_all(body.as_bytes());
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) if !e.use_stderr() => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(EXIT_MALFORMED as u8);
        }
    };
    match run(&cli) {
        Ok(v) => {
            print(&v, &cli);
            ExitCode::from(EXIT_OK as u8)
        }
        Err(e) => {
            print(&e.to_json(), &cli);
            ExitCode::from(e.exit_code().clamp(EXIT_MALFORMED, 255) as u8)
        }
    }
}
