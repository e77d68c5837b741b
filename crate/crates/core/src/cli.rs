//! Command-line front end: `check`, `validate` and `gen`.
//!
//! Exit status: 0 when every queried verdict holds, 1 when some verdict
//! fails, 2 when none fails but some is unknown, 3 on usage, input or
//! semantics errors.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;

use crate::checker::{evaluate_at, CheckOptions, Engine, InfoMode, MemoryMode, Outcome, SemanticsSpec};
use crate::fixtures;
use crate::logic::parse_formula;
use crate::model::{parse_model, GameModel};

pub const EXIT_HOLDS: i32 = 0;
pub const EXIT_FAILS: i32 = 1;
pub const EXIT_UNKNOWN: i32 = 2;
pub const EXIT_ERROR: i32 = 3;

/// Memory cap for `F` and `R` when `--max-k` is absent.
pub const DEFAULT_CAP: usize = 4;

#[derive(Parser, Debug)]
#[command(name = "atlcheck", version, about = "ATL/ATL* model checking over concurrent game models")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Evaluate a state formula.
    Check(CheckArgs),
    /// Check a model file against the model invariants.
    Validate { path: PathBuf },
    /// Print a generated model.
    Gen(GenArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum MemoryArg {
    #[value(name = "r")]
    R,
    #[value(name = "Fk")]
    Fk,
    #[value(name = "F")]
    F,
    #[value(name = "R")]
    PerfectRecall,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum InfoArg {
    Auto,
    Complete,
    Incomplete,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum EngineArg {
    Lazy,
    Exhaustive,
}

#[derive(clap::Args, Debug)]
struct CheckArgs {
    #[arg(long)]
    model: PathBuf,
    #[arg(long)]
    formula: String,
    #[arg(long, value_enum)]
    semantics: MemoryArg,
    /// Memory bound for `Fk`.
    #[arg(long)]
    k: Option<usize>,
    /// Memory cap for `F` and `R`: a number, or `none` for no cap.
    #[arg(long = "max-k")]
    max_k: Option<String>,
    #[arg(long, value_enum, default_value = "auto")]
    info: InfoArg,
    /// Query state (repeatable); all states by default.
    #[arg(long)]
    state: Vec<String>,
    /// Print the witness profile for holding quantified formulas.
    #[arg(long)]
    witness: bool,
    /// One JSON record per queried state.
    #[arg(long)]
    json: bool,
    #[arg(long)]
    jobs: Option<usize>,
    #[arg(long, value_enum, default_value = "lazy")]
    engine: EngineArg,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum GenKind {
    Fig1,
    Fig2,
    Fig3,
    Tm,
}

#[derive(clap::Args, Debug)]
struct GenArgs {
    #[arg(value_enum)]
    kind: GenKind,
    /// Index of the fig3 family member.
    #[arg(long)]
    k: Option<usize>,
    /// Turing machine file for `tm`.
    #[arg(long)]
    tm: Option<PathBuf>,
}

struct Failure(String);

impl<E: std::fmt::Display> From<E> for Failure {
    fn from(e: E) -> Self {
        Failure(e.to_string())
    }
}

/// Runs the command line `args` (including the program name).
pub fn run(args: impl IntoIterator<Item = OsString>, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_ERROR } else { EXIT_HOLDS };
            let target: &mut dyn Write = if e.use_stderr() { err } else { out };
            let _ = write!(target, "{}", e.render());
            return code;
        }
    };
    let result = match cli.command {
        Command::Check(a) => cmd_check(&a, out),
        Command::Validate { path } => cmd_validate(&path, out),
        Command::Gen(a) => cmd_gen(&a, out),
    };
    match result {
        Ok(code) => code,
        Err(Failure(message)) => {
            let _ = writeln!(err, "error: {message}");
            EXIT_ERROR
        }
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| Failure(format!("{}: {e}", path.display())))
}

fn load_model(path: &Path) -> Result<GameModel, Failure> {
    parse_model(&read(path)?).map_err(|e| Failure(format!("{}: {e}", path.display())))
}

fn semantics(a: &CheckArgs) -> Result<SemanticsSpec, Failure> {
    let info = match a.info {
        InfoArg::Auto => InfoMode::Auto,
        InfoArg::Complete => InfoMode::Complete,
        InfoArg::Incomplete => InfoMode::Incomplete,
    };
    if a.k.is_some() && a.semantics != MemoryArg::Fk {
        return Err(Failure("--k is only allowed with --semantics Fk".into()));
    }
    if a.max_k.is_some() && !matches!(a.semantics, MemoryArg::F | MemoryArg::PerfectRecall) {
        return Err(Failure("--max-k is only allowed with --semantics F or R".into()));
    }
    let cap = match a.max_k.as_deref() {
        None => Some(DEFAULT_CAP),
        Some("none") => None,
        Some(v) => Some(
            v.parse::<usize>()
                .map_err(|_| Failure(format!("--max-k expects a number or `none`, got `{v}`")))?,
        ),
    };
    let memory = match a.semantics {
        MemoryArg::R => MemoryMode::Memoryless,
        MemoryArg::Fk => MemoryMode::Bounded(a.k.ok_or_else(|| Failure("--semantics Fk needs --k".into()))?),
        MemoryArg::F => MemoryMode::Finite { cap },
        MemoryArg::PerfectRecall => MemoryMode::PerfectRecall { cap },
    };
    Ok(SemanticsSpec::new(info, memory))
}

fn cmd_check(a: &CheckArgs, out: &mut dyn Write) -> Result<i32, Failure> {
    let started = Instant::now();
    let model = load_model(&a.model)?;
    let formula = parse_formula(&a.formula).map_err(|e| Failure(format!("formula: {e}")))?;
    let sem = semantics(a)?;
    let query: Vec<usize> = if a.state.is_empty() {
        (0..model.state_count()).collect()
    } else {
        a.state
            .iter()
            .map(|s| model.state_id(s).ok_or_else(|| Failure(format!("unknown state {s}"))))
            .collect::<Result<_, _>>()?
    };
    let opts = CheckOptions {
        engine: match a.engine {
            EngineArg::Lazy => Engine::Lazy,
            EngineArg::Exhaustive => Engine::Exhaustive,
        },
        jobs: a.jobs,
        ..CheckOptions::default()
    };
    let verdicts = evaluate_at(&model, &formula, &sem, &opts, &query)?;
    let elapsed = started.elapsed().as_secs_f64();
    for v in &verdicts {
        let name = model.state_name(v.state);
        let witness = match &v.outcome {
            Outcome::Holds { witness: Some(w) } if a.witness => Some(w),
            _ => None,
        };
        if a.json {
            let record = json!({
                "state": name,
                "formula": formula.to_string(),
                "semantics": sem.to_string(),
                "verdict": v.outcome.name(),
                "bound": match v.outcome { Outcome::Unknown { bound } => Some(bound), _ => None },
                "memory": match &v.outcome { Outcome::Holds { witness: Some(w) } => Some(w.memory), _ => None },
                "witness": witness.map(|w| w.profile.to_text(&model)),
                "profiles_examined": v.profiles_examined,
                "wall_time_s": elapsed,
            });
            writeln!(out, "{record}")?;
            continue;
        }
        let detail = match &v.outcome {
            Outcome::Holds { witness: Some(w) } => format!(" (memory {})", w.memory),
            Outcome::Unknown { bound } => format!(" (no strategy up to memory {bound})"),
            _ => String::new(),
        };
        writeln!(
            out,
            "{name}: {}{detail}, {} profiles examined",
            v.outcome.name(),
            v.profiles_examined
        )?;
        if let Some(w) = witness {
            write!(out, "{}", w.profile.to_text(&model))?;
        }
    }
    if !a.json {
        writeln!(out, "semantics {sem}, {elapsed:.3}s")?;
    }
    let any = |f: fn(&Outcome) -> bool| verdicts.iter().any(|v| f(&v.outcome));
    Ok(if any(|o| matches!(o, Outcome::Fails)) {
        EXIT_FAILS
    } else if any(|o| matches!(o, Outcome::Unknown { .. })) {
        EXIT_UNKNOWN
    } else {
        EXIT_HOLDS
    })
}

fn cmd_validate(path: &Path, out: &mut dyn Write) -> Result<i32, Failure> {
    let text = read(path)?;
    match parse_model(&text) {
        Ok(model) => {
            let violations = model.validate();
            if violations.is_empty() {
                writeln!(out, "ok")?;
                return Ok(EXIT_HOLDS);
            }
            for v in violations {
                writeln!(out, "{v}")?;
            }
            Ok(EXIT_ERROR)
        }
        Err(e) => {
            writeln!(out, "{}: {e}", path.display())?;
            Ok(EXIT_ERROR)
        }
    }
}

fn cmd_gen(a: &GenArgs, out: &mut dyn Write) -> Result<i32, Failure> {
    if a.k.is_some() && a.kind != GenKind::Fig3 {
        return Err(Failure("--k is only used by fig3".into()));
    }
    if a.tm.is_some() && a.kind != GenKind::Tm {
        return Err(Failure("--tm is only used by tm".into()));
    }
    let model = match a.kind {
        GenKind::Fig1 => fixtures::fig1_model(),
        GenKind::Fig2 => fixtures::fig2_model(),
        GenKind::Fig3 => fixtures::fig3_family(a.k.ok_or_else(|| Failure("fig3 needs --k".into()))?)?,
        GenKind::Tm => {
            let path = a.tm.as_ref().ok_or_else(|| Failure("tm needs --tm <file>".into()))?;
            let tm = fixtures::tm_parse(&read(path)?).map_err(|e| Failure(format!("{}: {e}", path.display())))?;
            fixtures::tm_to_icgm(&tm)?
        }
    };
    write!(out, "{}", model.serialize())?;
    Ok(EXIT_HOLDS)
}
