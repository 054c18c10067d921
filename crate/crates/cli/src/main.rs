mod store;

use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, Context};
use clap::{Args, Parser, Subcommand};
use dioph_core::corpus;
use dioph_core::{
    verify, CurvePoint, Error, IntegerSolution, MultipleOutcome, Pipeline, Problem, QuarticPoint, Rational,
};
use serde::Deserialize;
use serde_json::json;

use store::SolutionStore;

const DEFAULT_STORE: &str = "solutions.jsonl";

#[derive(Parser)]
#[command(name = "dioph", version, about = "Sums of cubes through elliptic curves, with exact arithmetic")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print the curve a problem reduces to, as JSON.
    Construct(ProblemArgs),
    /// Turn multiples of a generator into verified integer identities (JSONL).
    Solve(SolveArgs),
    /// List curve points with small x.
    Search(SearchArgs),
    /// Check every identity in a JSONL file.
    Verify(VerifyArgs),
    /// Replay the worked-example corpus.
    Corpus(CorpusArgs),
}

#[derive(Args)]
struct ProblemArgs {
    /// Problem JSON, or a corpus fixture (its problem and base point are used).
    #[arg(long, value_name = "FILE")]
    problem: PathBuf,
    /// Known point U,V on the quartic, used to recentre it when its constant
    /// term is not a square.
    #[arg(long, value_name = "U,V")]
    base: Option<String>,
}

#[derive(Args)]
struct SolveArgs {
    #[command(flatten)]
    problem: ProblemArgs,
    /// Generator X,Y on the constructed curve.
    #[arg(long = "gen", value_name = "X,Y")]
    generator: String,
    #[arg(long, default_value_t = 1, value_name = "N")]
    multiples: u32,
    /// Append new solutions to this JSONL store. Given without a value, or
    /// not given at all while DIOPH_STORE is set, the store is DIOPH_STORE or
    /// solutions.jsonl.
    #[arg(long, value_name = "FILE", num_args = 0..=1, default_missing_value = "")]
    store: Option<String>,
}

#[derive(Args)]
struct SearchArgs {
    #[command(flatten)]
    problem: ProblemArgs,
    /// Largest |x| searched.
    #[arg(long, value_name = "N")]
    num_bound: u64,
    /// Largest denominator of x searched.
    #[arg(long, value_name = "N")]
    den_bound: u64,
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct VerifyArgs {
    /// JSONL file of identities with `lhs` and `rhs` term lists.
    #[arg(value_name = "FILE")]
    file: PathBuf,
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct CorpusArgs {
    /// Directory of fixture files; defaults to the built-in corpus.
    #[arg(long, value_name = "DIR")]
    dir: Option<PathBuf>,
    #[arg(long)]
    json: bool,
}

/// Failure with the process exit code it maps to.
struct Failure {
    code: u8,
    error: anyhow::Error,
}

impl From<anyhow::Error> for Failure {
    fn from(error: anyhow::Error) -> Self {
        let code = match error.downcast_ref::<Error>() {
            Some(Error::NotSquare(_)) => 2,
            _ => 1,
        };
        Failure { code, error }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        anyhow::Error::from(e).into()
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        anyhow::Error::from(e).into()
    }
}

fn verification_failure(msg: String) -> Failure {
    Failure { code: 3, error: anyhow!(msg) }
}

type CmdResult = Result<(), Failure>;

/// Writes a line to stdout; a closed pipe ends output quietly.
fn emit(text: impl std::fmt::Display) -> io::Result<()> {
    match writeln!(io::stdout().lock(), "{text}") {
        Err(e) if e.kind() == io::ErrorKind::BrokenPipe => Ok(()),
        r => r,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Construct(a) => construct(&a),
        Command::Solve(a) => solve(&a),
        Command::Search(a) => search(&a),
        Command::Verify(a) => verify_file(&a),
        Command::Corpus(a) => run_corpus(&a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {:#}", f.error);
            ExitCode::from(f.code)
        }
    }
}

#[derive(Deserialize)]
struct FixtureProblem {
    problem: Problem,
    #[serde(default)]
    base_point: Option<QuarticPoint>,
}

fn parse_pair(s: &str, what: &str) -> anyhow::Result<(Rational, Rational)> {
    let (a, b) = s.split_once(',').ok_or_else(|| anyhow!("{what} must look like A,B, got {s:?}"))?;
    let a = a.trim().parse().with_context(|| format!("bad {what} {s:?}"))?;
    let b = b.trim().parse().with_context(|| format!("bad {what} {s:?}"))?;
    Ok((a, b))
}

fn load_pipeline(args: &ProblemArgs) -> Result<Pipeline, Failure> {
    let text = std::fs::read_to_string(&args.problem).with_context(|| format!("reading {}", args.problem.display()))?;
    let (problem, mut base) = match serde_json::from_str::<Problem>(&text) {
        Ok(p) => (p, None),
        Err(direct) => match serde_json::from_str::<FixtureProblem>(&text) {
            Ok(f) => (f.problem, f.base_point),
            Err(_) => return Err(anyhow!(direct).context(format!("parsing {}", args.problem.display())).into()),
        },
    };
    if let Some(b) = &args.base {
        let (u, v) = parse_pair(b, "base point")?;
        base = Some(QuarticPoint::new(u, v));
    }
    Ok(Pipeline::new(problem, base.as_ref())?)
}

fn construct(args: &ProblemArgs) -> CmdResult {
    let pipeline = load_pipeline(args)?;
    let mut out = json!({
        "problem": pipeline.problem.label(),
        "curve": pipeline.curve(),
        "equation": pipeline.curve().to_string(),
    });
    if let Some(q) = pipeline.root() {
        out["q"] = json!(q);
    }
    if let Some(route) = pipeline.quartic_route() {
        out["quartic"] = json!(route.quartic);
        out["shift"] = json!(route.shift);
        out["shifted_quartic"] = json!(route.cubic_map.quartic);
        out["long_curve"] = json!(route.cubic_map.curve);
    }
    emit(serde_json::to_string_pretty(&out).expect("json"))?;
    Ok(())
}

fn store_path(flag: &Option<String>) -> Option<PathBuf> {
    let env = std::env::var("DIOPH_STORE").ok().filter(|s| !s.is_empty());
    match flag.as_deref() {
        Some("") => Some(PathBuf::from(env.as_deref().unwrap_or(DEFAULT_STORE))),
        Some(path) => Some(PathBuf::from(path)),
        None => env.map(PathBuf::from),
    }
}

fn solve(args: &SolveArgs) -> CmdResult {
    let pipeline = load_pipeline(&args.problem)?;
    let (x, y) = parse_pair(&args.generator, "generator")?;
    let gen = CurvePoint::affine(x, y);
    let outcomes = pipeline.multiples(&gen, args.multiples, "gen")?;
    let mut store = store_path(&args.store).map(|p| SolutionStore::open(&p)).transpose()?;
    let mut added = 0;
    for outcome in outcomes {
        match outcome {
            MultipleOutcome::Solved { solution, .. } => {
                if !solution.verified || !verify(&solution) {
                    return Err(verification_failure(format!("{} failed to verify", solution.provenance)));
                }
                emit(serde_json::to_string(&solution).expect("json"))?;
                if let Some(store) = store.as_mut() {
                    added += usize::from(store.insert(&solution)?);
                }
            }
            MultipleOutcome::Skipped { m, reason } => eprintln!("skip m={m}: {reason}"),
        }
    }
    if let Some(store) = &store {
        eprintln!("stored {added} new solution(s), {} in store", store.len());
    }
    Ok(())
}

fn search(args: &SearchArgs) -> CmdResult {
    if args.num_bound == 0 || args.den_bound == 0 {
        return Err(anyhow!("bounds must be at least 1").into());
    }
    let pipeline = load_pipeline(&args.problem)?;
    let curve = pipeline.curve();
    let found = curve.naive_search(args.num_bound, args.den_bound);
    let rows: Vec<_> =
        found.iter().filter_map(|p| p.coords()).map(|(x, y)| (x, y, curve.lhs_at(x, y), curve.rhs_at(x))).collect();
    if args.json {
        let list: Vec<_> = rows.iter().map(|(x, y, l, r)| json!({"x": x, "y": y, "lhs": l, "rhs": r})).collect();
        emit(serde_json::to_string_pretty(&json!({"curve": curve.to_string(), "points": list})).expect("json"))?;
    } else {
        emit(curve)?;
        for (x, y, l, r) in &rows {
            emit(format!("({x}, {y})  lhs = {l}  rhs = {r}"))?;
        }
        emit(format!("{} point(s)", rows.len()))?;
    }
    Ok(())
}

fn verify_file(args: &VerifyArgs) -> CmdResult {
    let text = std::fs::read_to_string(&args.file).with_context(|| format!("reading {}", args.file.display()))?;
    let mut records = Vec::new();
    let mut malformed = Vec::new();
    for (i, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        match serde_json::from_str::<IntegerSolution>(line) {
            Ok(rec) => records.push((i + 1, rec)),
            Err(e) => malformed.push(format!("line {}: {e}", i + 1)),
        }
    }
    if !malformed.is_empty() {
        return Err(anyhow!("malformed records in {}:\n  {}", args.file.display(), malformed.join("\n  ")).into());
    }
    let verdicts: Vec<(usize, bool, String)> =
        records.iter().map(|(line, rec)| (*line, verify(rec), rec.to_string())).collect();
    if args.json {
        let list: Vec<_> = verdicts
            .iter()
            .map(|(line, ok, identity)| json!({"line": line, "verified": ok, "identity": identity}))
            .collect();
        emit(serde_json::to_string_pretty(&list).expect("json"))?;
    } else {
        for (line, ok, identity) in &verdicts {
            emit(format!("line {line}: {}  {identity}", if *ok { "verified" } else { "NOT VERIFIED" }))?;
        }
    }
    let bad = verdicts.iter().filter(|v| !v.1).count();
    if bad > 0 {
        return Err(verification_failure(format!("{bad} of {} record(s) failed to verify", verdicts.len())));
    }
    Ok(())
}

fn run_corpus(args: &CorpusArgs) -> CmdResult {
    let fixtures = match &args.dir {
        Some(dir) => corpus::load_dir(Path::new(dir))?,
        None => corpus::builtin()?,
    };
    if fixtures.is_empty() {
        return Err(anyhow!("no fixtures found").into());
    }
    let report = corpus::run_all(&fixtures);
    if args.json {
        emit(report.to_json())?;
    } else {
        emit(report.to_table().trim_end())?;
    }
    if !report.all_passed() {
        return Err(verification_failure(format!(
            "{} of {} corpus entries failed",
            report.failed,
            report.entries.len()
        )));
    }
    Ok(())
}
