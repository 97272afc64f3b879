//! `dcnc`: equilibrium sets versus complementarity solutions for
//! discretely-constrained Nash-Cournot games.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use dcnc_core::io::{self, FlatMultipliers, IoError, OutputFile, ReportFile};
use dcnc_core::scalar::parse_list;
use dcnc_core::{
    inclusion_report, sweep_with, validate_game_with, Case, Error, Game, Limits, Profile, Rational,
    Relation, Report, Scalar, Valid,
};

const EXIT_USAGE: u8 = 2;
const EXIT_INVALID: u8 = 3;
const EXIT_LIMIT: u8 = 4;
const EXIT_VERIFY: u8 = 5;

#[derive(Parser, Debug)]
#[command(
    name = "dcnc",
    version,
    about = "Compare pure Nash equilibria with integral KKT solutions"
)]
struct Cli {
    /// Worker threads (0 = all cores).
    #[arg(long, global = true, env = "DCNC_THREADS", default_value_t = 0)]
    threads: usize,
    /// Largest number of complementarity patterns tried per player and profile.
    #[arg(long, global = true, default_value_t = dcnc_core::model::DEFAULT_PATTERN_BUDGET)]
    pattern_budget: u64,
    /// Largest lattice (per player box or joint) that may be enumerated.
    #[arg(long, global = true, default_value_t = dcnc_core::model::DEFAULT_LATTICE_CAP)]
    lattice_cap: u64,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct Output {
    /// Write the JSON report to this path.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Print the JSON report instead of the text summary.
    #[arg(long)]
    json: bool,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Analyse a game file.
    Solve {
        game: PathBuf,
        #[command(flatten)]
        output: Output,
    },
    /// Analyse a built-in case: example1, example2-l2 (alias example2), example2-l1.
    Builtin {
        case: Case,
        /// Case parameter (epsilon or delta), as p/q.
        #[arg(long, allow_hyphen_values = true)]
        param: Option<String>,
        /// Also write the generated game file here.
        #[arg(long)]
        emit_game: Option<PathBuf>,
        #[command(flatten)]
        output: Output,
    },
    /// Analyse a built-in case over a parameter grid.
    Sweep {
        case: Case,
        /// `start:stop:step` (inclusive) or a comma-separated list.
        #[arg(long, allow_hyphen_values = true)]
        grid: String,
        /// CSV destination (stdout when absent).
        #[arg(long)]
        out: Option<PathBuf>,
        /// Also write the full JSON sweep report here.
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Check a single profile, optionally with supplied multipliers.
    Check {
        game: PathBuf,
        /// Profile as a comma-separated list, e.g. `0,1`.
        #[arg(long, allow_hyphen_values = true)]
        profile: String,
        /// Inequality multipliers, all players concatenated.
        #[arg(long, allow_hyphen_values = true)]
        lambda: Option<String>,
        /// Equality multipliers, all players concatenated.
        #[arg(long, allow_hyphen_values = true)]
        gamma: Option<String>,
        /// Epigraph variables of absolute-value terms.
        #[arg(long, allow_hyphen_values = true)]
        epi_t: Option<String>,
        #[arg(long, allow_hyphen_values = true)]
        mu_plus: Option<String>,
        #[arg(long, allow_hyphen_values = true)]
        mu_minus: Option<String>,
        #[command(flatten)]
        output: Output,
    },
    /// Re-verify every certificate in a report, sweep or check file.
    VerifyReport {
        report: PathBuf,
        /// Verify against this game file instead of the embedded one.
        #[arg(long)]
        game: Option<PathBuf>,
    },
}

struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Self {
        Failure {
            code: EXIT_USAGE,
            message: message.into(),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match &e {
            Error::Validation(_)
            | Error::NonConvexOwnBlock { .. }
            | Error::EmptyFeasibleSet { .. } => EXIT_INVALID,
            Error::LatticeTooLarge { .. } | Error::PatternBudgetExceeded { .. } => EXIT_LIMIT,
            Error::InclusionViolated(_) => EXIT_VERIFY,
            _ => EXIT_USAGE,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

impl From<IoError> for Failure {
    fn from(e: IoError) -> Self {
        match e {
            IoError::Model(e) => e.into(),
            other => Failure::usage(other.to_string()),
        }
    }
}

fn relation_code(r: Relation) -> u8 {
    match r {
        Relation::Equal => 0,
        Relation::StrictSubset => 10,
        Relation::EmptyMcpNonemptyNash => 11,
        Relation::BothEmpty => 12,
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::usage(format!("{}: {e}", path.display())))
}

fn write(path: &Path, text: &str) -> Result<(), Failure> {
    fs::write(path, text).map_err(|e| Failure::usage(format!("{}: {e}", path.display())))
}

fn load_game(path: &Path) -> Result<Game, Failure> {
    let text = read(path)?;
    io::parse_game(&text).map_err(|e| match e {
        IoError::Model(e) => e.into(),
        other => Failure::usage(format!("{}: {other}", path.display())),
    })
}

fn parse_scalars(what: &str, text: &str) -> Result<Vec<Rational>, Failure> {
    parse_list(text).map_err(|e| Failure::usage(format!("--{what}: {e}")))
}

fn parse_grid(text: &str) -> Result<Vec<Rational>, Failure> {
    let parts: Vec<&str> = text.split(':').collect();
    match parts.as_slice() {
        [start, stop, step] => {
            let p = |s: &str| {
                Rational::parse(s.trim()).map_err(|e| Failure::usage(format!("--grid: {e}")))
            };
            let (start, stop, step) = (p(start)?, p(stop)?, p(step)?);
            if step <= Rational::from_int(0) {
                return Err(Failure::usage("--grid: step must be positive"));
            }
            let mut grid = Vec::new();
            let mut v = start;
            while v <= stop {
                grid.push(v.clone());
                v += &step;
            }
            Ok(grid)
        }
        [list] => parse_scalars("grid", list),
        _ => Err(Failure::usage(
            "--grid: expected start:stop:step or a comma-separated list",
        )),
    }
}

fn emit_report(game: &Valid, report: Report, output: &Output) -> Result<u8, Failure> {
    let code = relation_code(report.relation);
    let text = io::render_report_text(game, &report);
    let json = io::to_json(&ReportFile::new(game.spec(), report));
    if let Some(path) = &output.out {
        write(path, &json)?;
    }
    print!("{}", if output.json { json } else { text });
    Ok(code)
}

fn run(cli: Cli) -> Result<u8, Failure> {
    let limits = Limits {
        lattice_cap: cli.lattice_cap,
        pattern_budget: cli.pattern_budget,
    };
    match cli.command {
        Command::Solve { game, output } => {
            let game = validate_game_with(load_game(&game)?, limits)?;
            let report = inclusion_report(&game)?;
            emit_report(&game, report, &output)
        }
        Command::Builtin {
            case,
            param,
            emit_game,
            output,
        } => {
            let param = match param {
                Some(p) => {
                    Rational::parse(&p).map_err(|e| Failure::usage(format!("--param: {e}")))?
                }
                None => case.default_param(),
            };
            let spec = case.game(param)?;
            if let Some(path) = &emit_game {
                write(path, &io::render_game(&spec))?;
            }
            let game = validate_game_with(spec, limits)?;
            let report = inclusion_report(&game)?;
            emit_report(&game, report, &output)
        }
        Command::Sweep {
            case,
            grid,
            out,
            report,
        } => {
            let grid = parse_grid(&grid)?;
            let rows = sweep_with(case, &grid, limits)?;
            let mut csv = Vec::new();
            io::write_sweep_csv(&rows, &mut csv)?;
            let csv = String::from_utf8(csv).expect("csv is UTF-8");
            if let Some(path) = &report {
                write(path, &io::to_json(&io::sweep_file(case, rows)?))?;
            }
            match &out {
                Some(path) => write(path, &csv)?,
                None => print!("{csv}"),
            }
            Ok(0)
        }
        Command::Check {
            game,
            profile,
            lambda,
            gamma,
            epi_t,
            mu_plus,
            mu_minus,
            output,
        } => {
            let game = validate_game_with(load_game(&game)?, limits)?;
            let profile = Profile::new(parse_scalars("profile", &profile)?);
            let given = [&lambda, &gamma, &epi_t, &mu_plus, &mu_minus];
            let supplied = if given.iter().any(|g| g.is_some()) {
                let get = |what: &str, v: &Option<String>| match v {
                    Some(s) => parse_scalars(what, s),
                    None => Ok(Vec::new()),
                };
                Some(FlatMultipliers {
                    lambda: get("lambda", &lambda)?,
                    gamma: get("gamma", &gamma)?,
                    t: get("epi-t", &epi_t)?,
                    mu_plus: get("mu-plus", &mu_plus)?,
                    mu_minus: get("mu-minus", &mu_minus)?,
                })
            } else {
                None
            };
            let check = io::check_profile(&game, profile, supplied)?;
            let code = match &check.supplied {
                Some(s) if !s.verified => EXIT_VERIFY,
                _ => 0,
            };
            let json = io::to_json(&check);
            if let Some(path) = &output.out {
                write(path, &json)?;
            }
            print!(
                "{}",
                if output.json {
                    json
                } else {
                    io::render_check_text(&check)
                }
            );
            Ok(code)
        }
        Command::VerifyReport { report, game } => {
            let text = read(&report)?;
            let file: OutputFile<Rational> = io::parse_output_file(&text)
                .map_err(|e| Failure::usage(format!("{}: {e}", report.display())))?;
            let game = game.as_deref().map(load_game).transpose()?;
            let audit = io::audit_output_file(&file, game)?;
            println!(
                "checked {} equilibria, {} certificates, {} refutations",
                audit.equilibria_checked, audit.certificates_checked, audit.refutations_checked
            );
            if audit.passed() {
                println!("all evidence verifies");
                Ok(0)
            } else {
                for f in &audit.failures {
                    println!("FAILED: {f}");
                }
                Ok(EXIT_VERIFY)
            }
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let pool = match rayon::ThreadPoolBuilder::new()
        .num_threads(cli.threads)
        .build()
    {
        Ok(pool) => pool,
        Err(e) => {
            eprintln!("error: thread pool: {e}");
            return ExitCode::from(EXIT_USAGE);
        }
    };
    match pool.install(|| run(cli)) {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
