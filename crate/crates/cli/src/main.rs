use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};

use hiconn::report::Report;
use hiconn::spec_model::{build, render_with_connection, PlanOverrides, SpecFile};
use hiconn::suites::run_suite;
use hiconn_core::bilinear::construct_parallel;
use hiconn_core::Error;

#[derive(Parser)]
#[command(
    name = "hiconn",
    version,
    about = "Verify exterior-calculus identities on coordinate charts"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a named verification suite against a manifold spec.
    Run {
        /// Path to the spec file (TOML).
        spec: PathBuf,
        #[arg(long, value_enum)]
        suite: SuiteName,
        /// Override the plan seed.
        #[arg(long)]
        seed: Option<u64>,
        /// Override the number of sample points.
        #[arg(long)]
        points: Option<usize>,
        /// Override the absolute tolerance.
        #[arg(long)]
        tol: Option<f64>,
        /// Also write the report to this path.
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Build an almost torsion-free connection making the spec's bilinear
    /// form parallel, and write the spec back with the connection filled in.
    Construct {
        spec: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(ValueEnum, Clone, Copy)]
enum SuiteName {
    Axioms,
    Snb,
    Torsion,
    Forms,
    Eta,
    ConstructParallel,
    All,
}

impl SuiteName {
    fn as_str(self) -> &'static str {
        match self {
            SuiteName::Axioms => "axioms",
            SuiteName::Snb => "snb",
            SuiteName::Torsion => "torsion",
            SuiteName::Forms => "forms",
            SuiteName::Eta => "eta",
            SuiteName::ConstructParallel => "construct-parallel",
            SuiteName::All => "all",
        }
    }
}

const EXIT_CHECK_FAILED: u8 = 1;
const EXIT_SPEC_ERROR: u8 = 2;
const EXIT_EVAL_ERROR: u8 = 3;

fn exit_for(err: &Error) -> u8 {
    match err {
        Error::Eval(_) => EXIT_EVAL_ERROR,
        Error::NotInBCircle(_) | Error::VanishingNorm { .. } | Error::BaseNotTorsionFree(_) => {
            EXIT_CHECK_FAILED
        }
        _ => EXIT_SPEC_ERROR,
    }
}

fn load(
    spec_path: &PathBuf,
    overrides: &PlanOverrides,
) -> Result<(SpecFile, hiconn::spec_model::Context), u8> {
    let text = std::fs::read_to_string(spec_path).map_err(|e| {
        eprintln!("error: cannot read {}: {e}", spec_path.display());
        EXIT_SPEC_ERROR
    })?;
    let spec = SpecFile::parse(&text).map_err(|e| {
        eprintln!("error: {e}");
        EXIT_SPEC_ERROR
    })?;
    let ctx = build(&spec, overrides).map_err(|e| {
        eprintln!("error: {e}");
        EXIT_SPEC_ERROR
    })?;
    Ok((spec, ctx))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::Run {
            spec,
            suite,
            seed,
            points,
            tol,
            report,
        } => {
            let overrides = PlanOverrides { seed, points, tol };
            let (_, ctx) = match load(&spec, &overrides) {
                Ok(v) => v,
                Err(code) => return ExitCode::from(code),
            };
            let started = Instant::now();
            let checks = match run_suite(suite.as_str(), &ctx) {
                Ok(checks) => checks,
                Err(e) => {
                    eprintln!("error: {e}");
                    return ExitCode::from(exit_for(&e));
                }
            };
            let mut rep = Report::new(
                suite.as_str(),
                ctx.seed,
                ctx.plan.points().len(),
                ctx.plan.abs_tol(),
                checks,
            );
            rep.elapsed_ms = started.elapsed().as_millis();
            print!("{}", rep.render());
            if let Some(path) = report {
                if let Err(e) = std::fs::write(&path, rep.render()) {
                    eprintln!("error: cannot write {}: {e}", path.display());
                    return ExitCode::from(EXIT_SPEC_ERROR);
                }
            }
            if rep.passed() {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(EXIT_CHECK_FAILED)
            }
        }
        Command::Construct { spec, out } => {
            let (spec_file, ctx) = match load(&spec, &PlanOverrides::default()) {
                Ok(v) => v,
                Err(code) => return ExitCode::from(code),
            };
            let (Some(eta), Some(metric)) = (&ctx.eta, &ctx.metric) else {
                eprintln!("error: construct needs [eta] and [metric] sections");
                return ExitCode::from(EXIT_SPEC_ERROR);
            };
            let conn = match construct_parallel(eta, metric, ctx.base.clone(), &ctx.plan) {
                Ok(conn) => conn,
                Err(e) => {
                    eprintln!("error: {e}");
                    return ExitCode::from(exit_for(&e));
                }
            };
            match hiconn_core::bilinear::is_parallel(&conn, eta, &ctx.plan) {
                Ok(rep) if rep.parallel => {}
                Ok(rep) => {
                    eprintln!(
                        "error: constructed connection is not parallel (residual {:.3e})",
                        rep.max_residual
                    );
                    return ExitCode::from(EXIT_CHECK_FAILED);
                }
                Err(e) => {
                    eprintln!("error: {e}");
                    return ExitCode::from(exit_for(&e));
                }
            }
            let rendered = render_with_connection(&spec_file, &ctx, &conn);
            if let Err(e) = std::fs::write(&out, rendered) {
                eprintln!("error: cannot write {}: {e}", out.display());
                return ExitCode::from(EXIT_SPEC_ERROR);
            }
            println!("wrote {}", out.display());
            ExitCode::SUCCESS
        }
    }
}
