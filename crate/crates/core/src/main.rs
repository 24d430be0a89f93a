use std::fs;
use std::io::{self, Write};
use std::ops::RangeInclusive;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use maxclass::graded::{annihilator, center, jacobi_check, JacobiReport};
use maxclass::local::DEFAULT_FAMILY_BOUND;
use maxclass::report::{write_report, Format};
use maxclass::verify::{self, Kind, Source};
use maxclass::{parse_algebra_file, Builtin, Error};

const EXIT_MISMATCH: u8 = 1;
const EXIT_USAGE: u8 = 2;

#[derive(Parser)]
#[command(
    name = "maxclass",
    version,
    about = "Exact derivation, biderivation, commuting-map and local-derivation solves for m0, L1 and m2"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Graded derivations Der_k
    Der(RunArgs),
    /// Skew biderivations BDer_k
    Bider(RunArgs),
    /// Commuting linear maps of weight k
    Commuting(RunArgs),
    /// Over-approximation of local derivations of weight k
    Local(RunArgs),
    /// Over-approximation of linear 2-local derivations of weight k
    TwoLocal(RunArgs),
    /// Jacobi identity on every triple inside the horizon
    Jacobi(RunArgs),
    /// Center (base algebras, files) or annihilator of the ideal (extensions)
    Center(RunArgs),
    /// The full verification suite
    VerifyPaper(RunArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum OutputFormat {
    Text,
    Machine,
}

#[derive(Args)]
struct RunArgs {
    /// Built-in algebra: m0, l1, m2, m0ext, m2ext, l1ext
    #[arg(long, conflicts_with = "file")]
    algebra: Option<String>,
    /// Algebra file
    #[arg(long)]
    file: Option<PathBuf>,
    /// Inclusive weight range `a..b`
    #[arg(long, allow_hyphen_values = true, value_parser = parse_weights)]
    weights: Option<RangeInclusive<i32>>,
    /// Truncation degree N (files: at most the file's horizon)
    #[arg(long)]
    horizon: Option<i32>,
    /// Largest degree used in local test families
    #[arg(long, default_value_t = DEFAULT_FAMILY_BOUND)]
    family_bound: i32,
    #[arg(long, value_enum, default_value = "text")]
    format: OutputFormat,
    /// Write output here instead of stdout
    #[arg(long)]
    out: Option<PathBuf>,
}

const DEFAULT_HORIZON: i32 = 32;
const MIN_SOLVE_HORIZON: i32 = 8;

fn parse_weights(s: &str) -> Result<RangeInclusive<i32>, String> {
    let (a, b) = s
        .split_once("..")
        .ok_or_else(|| format!("expected `a..b`, found `{s}`"))?;
    let a: i32 = a.trim().parse().map_err(|_| format!("bad weight `{a}`"))?;
    let b: i32 = b.trim().parse().map_err(|_| format!("bad weight `{b}`"))?;
    if a > b {
        return Err(format!("empty weight range {a}..{b}"));
    }
    Ok(a..=b)
}

enum Failure {
    Usage(String),
    Mismatch(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e.root() {
            Error::Unrealizable(_) | Error::Precondition(_) => Failure::Mismatch(e.to_string()),
            _ => Failure::Usage(e.to_string()),
        }
    }
}

fn usage(msg: impl Into<String>) -> Failure {
    Failure::Usage(msg.into())
}

impl RunArgs {
    fn source(&self) -> Result<Source, Failure> {
        match (&self.algebra, &self.file) {
            (Some(name), None) => Ok(Source::Builtin(name.parse()?)),
            (None, Some(path)) => {
                let text = fs::read_to_string(path)
                    .map_err(|e| usage(format!("cannot read {}: {e}", path.display())))?;
                let spec = parse_algebra_file(&text)
                    .map_err(|e| usage(format!("{}: {e}", path.display())))?;
                Ok(Source::Spec(spec))
            }
            (None, None) => Err(usage("one of --algebra or --file is required")),
            (Some(_), Some(_)) => Err(usage("--algebra and --file are exclusive")),
        }
    }

    fn horizon(&self, source: &Source, min: i32) -> Result<i32, Failure> {
        let n = match (source, self.horizon) {
            (Source::Spec(s), None) => s.horizon(),
            (Source::Spec(s), Some(n)) if n > s.horizon() => {
                return Err(usage(format!(
                    "--horizon {n} exceeds the file's horizon {}",
                    s.horizon()
                )))
            }
            (_, Some(n)) => n,
            (Source::Builtin(_), None) => DEFAULT_HORIZON,
        };
        if n < min {
            return Err(usage(format!("horizon must be at least {min}, got {n}")));
        }
        Ok(n)
    }

    fn format(&self) -> Format {
        match self.format {
            OutputFormat::Text => Format::Text,
            OutputFormat::Machine => Format::Machine,
        }
    }
}

fn solve(kind: Kind, args: &RunArgs, out: &mut String) -> Result<bool, Failure> {
    let source = args.source()?;
    let n = args.horizon(&source, MIN_SOLVE_HORIZON)?;
    let weights = args.weights.clone().unwrap_or(0..=0);
    let needed = 4 + weights.start().abs().max(weights.end().abs()) + 2 * (kind == Kind::Bider) as i32;
    if n < needed {
        return Err(usage(format!(
            "horizon {n} is too small for weights {}..{} (need {needed})",
            weights.start(),
            weights.end()
        )));
    }
    let reports = verify::sweep(&source, kind, weights, n, args.family_bound)?;
    let format = args.format();
    let mut ok = true;
    for r in &reports {
        ok &= r.ok();
        out.push_str(&write_report(r, format));
        if format == Format::Machine {
            out.push('\n');
        }
    }
    Ok(ok)
}

fn jacobi(args: &RunArgs, out: &mut String) -> Result<bool, Failure> {
    let source = args.source()?;
    let n = args.horizon(&source, 1)?;
    let spec = source.at(n).ok_or_else(|| usage("horizon out of range"))?;
    let (passed, line) = match jacobi_check(&spec) {
        JacobiReport::Pass { triples } => (true, format!("PASS jacobi {} N={n}: {triples} triples", spec.name())),
        JacobiReport::Fail { triple, defect } => (
            false,
            format!(
                "FAIL jacobi {} N={n}: triple ({}, {}, {}) has defect {}",
                spec.name(),
                spec.label(triple.0),
                spec.label(triple.1),
                spec.label(triple.2),
                spec.render(&defect)
            ),
        ),
    };
    match args.format() {
        Format::Text => out.push_str(&line),
        Format::Machine => out.push_str(
            &serde_json::json!({
                "check": "jacobi",
                "algebra": spec.name(),
                "horizon": n,
                "passed": passed,
                "detail": line,
            })
            .to_string(),
        ),
    }
    out.push('\n');
    Ok(passed)
}

fn center_cmd(args: &RunArgs, out: &mut String) -> Result<bool, Failure> {
    let source = args.source()?;
    let n = args.horizon(&source, 1)?;
    let spec = source.at(n).ok_or_else(|| usage("horizon out of range"))?;
    let builtin = source.builtin();
    let (what, sub) = match builtin {
        Some(b) if !b.is_base() => ("annihilator", annihilator(&spec, |i| i.degree >= 1 && i.slot == 0)),
        _ => ("center", center(&spec)),
    };
    // Built-ins are centerless with trivial annihilators; files are reported as is.
    let passed = builtin.is_none() || sub.dimension == 0;
    let basis: Vec<String> = sub.basis.iter().map(|x| spec.render(x)).collect();
    match args.format() {
        Format::Text => out.push_str(&format!(
            "{} {what} {} N={n} degrees {}..{}: dimension {}{}\n",
            if passed { "PASS" } else { "FAIL" },
            spec.name(),
            sub.window.0,
            sub.window.1,
            sub.dimension,
            if basis.is_empty() { String::new() } else { format!(" [{}]", basis.join(", ")) }
        )),
        Format::Machine => {
            out.push_str(
                &serde_json::json!({
                    "check": what,
                    "algebra": spec.name(),
                    "horizon": n,
                    "window": [sub.window.0, sub.window.1],
                    "dimension": sub.dimension,
                    "basis": basis,
                    "passed": passed,
                })
                .to_string(),
            );
            out.push('\n');
        }
    }
    Ok(passed)
}

fn verify_paper(args: &RunArgs, out: &mut String) -> Result<bool, Failure> {
    if args.file.is_some() {
        return Err(usage("verify-paper runs on the built-in algebras only"));
    }
    let bases: Vec<Builtin> = match &args.algebra {
        None => Builtin::BASE.to_vec(),
        Some(name) => {
            let b: Builtin = name.parse()?;
            if !b.is_base() {
                return Err(usage(format!("{b} is not one of m0, l1, m2")));
            }
            vec![b]
        }
    };
    let n = args.horizon.unwrap_or(48);
    let weights = args.weights.clone().unwrap_or(-8..=12);
    let needed = 6 + weights.start().abs().max(weights.end().abs());
    if n < needed {
        return Err(usage(format!("horizon {n} is too small for these weights (need {needed})")));
    }
    let v = verify::verify_paper(&bases, weights, n, args.family_bound)?;
    for c in &v.checks {
        match args.format() {
            Format::Text => out.push_str(&format!(
                "{} {}{}\n",
                if c.passed { "PASS" } else { "FAIL" },
                c.name,
                if c.detail.is_empty() { String::new() } else { format!(" — {}", c.detail) }
            )),
            Format::Machine => {
                out.push_str(
                    &serde_json::json!({"check": c.name, "passed": c.passed, "detail": c.detail}).to_string(),
                );
                out.push('\n');
            }
        }
    }
    if args.format() == Format::Text {
        let failed = v.checks.iter().filter(|c| !c.passed).count();
        out.push_str(&format!("{} checks, {failed} failed\n", v.checks.len()));
    }
    Ok(v.passed())
}

fn init_threads() -> Result<(), Failure> {
    let Ok(value) = std::env::var("MAXCLASS_THREADS") else {
        return Ok(());
    };
    let n: usize = value
        .trim()
        .parse()
        .map_err(|_| usage(format!("MAXCLASS_THREADS must be a number, got `{value}`")))?;
    if n > 0 {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| usage(e.to_string()))?;
    }
    Ok(())
}

fn run(cli: Cli) -> Result<bool, Failure> {
    init_threads()?;
    let mut out = String::new();
    let args = match &cli.command {
        Command::Der(a)
        | Command::Bider(a)
        | Command::Commuting(a)
        | Command::Local(a)
        | Command::TwoLocal(a)
        | Command::Jacobi(a)
        | Command::Center(a)
        | Command::VerifyPaper(a) => a,
    };
    let passed = match &cli.command {
        Command::Der(a) => solve(Kind::Der, a, &mut out)?,
        Command::Bider(a) => solve(Kind::Bider, a, &mut out)?,
        Command::Commuting(a) => solve(Kind::Commuting, a, &mut out)?,
        Command::Local(a) => solve(Kind::Local, a, &mut out)?,
        Command::TwoLocal(a) => solve(Kind::TwoLocal, a, &mut out)?,
        Command::Jacobi(a) => jacobi(a, &mut out)?,
        Command::Center(a) => center_cmd(a, &mut out)?,
        Command::VerifyPaper(a) => verify_paper(a, &mut out)?,
    };
    match &args.out {
        Some(path) => fs::write(path, &out).map_err(|e| usage(format!("cannot write {}: {e}", path.display())))?,
        None => io::stdout()
            .write_all(out.as_bytes())
            .map_err(|e| usage(e.to_string()))?,
    }
    Ok(passed)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(EXIT_MISMATCH),
        Err(Failure::Mismatch(msg)) => {
            eprintln!("mismatch: {msg}");
            ExitCode::from(EXIT_MISMATCH)
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_USAGE)
        }
    }
}
