//! The `colorbal` command line.
//!
//! Exit codes: 0 success, 2 infeasible instance or invalid solution,
//! 1 runtime error (I/O, parse, solver refusal), 64 usage error.

use std::ffi::OsString;
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use crate::bds::{canonicalize_bds, run_fbds_brute};
use crate::bench::{run_bench, SuiteSpec};
use crate::dp::run_fbis_dp;
use crate::gen::{generate, GenSpec, Model};
use crate::mcis::{greedy_mcis, run_local_search, LocalSearchConfig};
use crate::model::{
    parse_instance, parse_solution, verify_solution, Instance, ProblemKind, SolutionSet,
};
use crate::oracle::{oracle_fbds, oracle_fbis, oracle_mcis, oracle_sat, OracleBudget};
use crate::reductions::{
    decode_domset, decode_indset, encode_domset_solution, encode_indset_solution, implied_edges,
    parse_assignment, parse_dimacs, reduce_domset, reduce_indset, GadgetMetadata, ReductionKind,
};
use crate::vc::run_fbis_vc;

pub const EXIT_OK: i32 = 0;
pub const EXIT_ERROR: i32 = 1;
pub const EXIT_NEGATIVE: i32 = 2;
pub const EXIT_USAGE: i32 = 64;

#[derive(Debug, Parser)]
#[command(
    name = "colorbal",
    version,
    about = "Color-balanced independent and dominating sets on interval graphs"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Solve an instance.
    Solve(SolveArgs),
    /// Exhaustive reference solvers (requires --dev).
    #[command(hide = true)]
    Oracle(OracleArgs),
    /// Build an instance from a CNF formula.
    Reduce(ReduceArgs),
    /// Read a satisfying assignment off a solution of a reduced instance.
    Decode(CodecArgs),
    /// Turn a satisfying assignment into a solution of a reduced instance.
    Encode(CodecArgs),
    /// Rewrite a 1-BDS of a domset instance into canonical form.
    Canonicalize(CodecArgs),
    /// Generate a random instance.
    Gen(GenArgs),
    /// Run the benchmark suite and write CSV.
    Bench(BenchArgs),
    /// Check a solution file against an instance.
    Verify(VerifyArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Problem {
    Bis,
    Mcis,
    Bds,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum SolveMethod {
    Dp,
    Vc,
    Greedy,
    Local,
    Brute,
}

#[derive(Debug, Args)]
struct SolveArgs {
    problem: Problem,
    instance: PathBuf,
    #[arg(long, default_value_t = 1)]
    f: usize,
    /// dp|vc for bis, greedy|local for mcis, brute for bds.
    #[arg(long)]
    method: Option<SolveMethod>,
    #[arg(long, default_value_t = 2)]
    b: usize,
    /// Write the solution here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Print JSON stats on stdout.
    #[arg(long)]
    json: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum OracleProblem {
    Bis,
    Mcis,
    Bds,
    Sat,
}

#[derive(Debug, Args)]
struct OracleArgs {
    problem: OracleProblem,
    /// Instance file, or DIMACS CNF for `sat`.
    input: PathBuf,
    #[arg(long)]
    dev: bool,
    #[arg(long, default_value_t = 1)]
    f: usize,
    #[arg(long)]
    json: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Reduction {
    Indset,
    Domset,
}

#[derive(Debug, Args)]
struct ReduceArgs {
    reduction: Reduction,
    #[arg(long)]
    cnf: PathBuf,
    #[arg(long)]
    out: PathBuf,
    #[arg(long)]
    meta: PathBuf,
    #[arg(long)]
    json: bool,
}

#[derive(Debug, Args)]
struct CodecArgs {
    #[arg(long)]
    meta: PathBuf,
    instance: PathBuf,
    /// Solution file (decode, canonicalize) or assignment file (encode).
    input: PathBuf,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct GenArgs {
    #[arg(long, value_parser = parse_model)]
    model: Model,
    #[arg(long)]
    n: usize,
    #[arg(long)]
    k: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 0)]
    f_target: usize,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn parse_model(s: &str) -> Result<Model, String> {
    s.parse()
}

#[derive(Debug, Args)]
struct BenchArgs {
    /// `standard`, `quick`, or a JSON suite file.
    #[arg(long, default_value = "standard")]
    suite: String,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, default_value_t = 1)]
    jobs: usize,
}

#[derive(Debug, Args)]
struct VerifyArgs {
    instance: PathBuf,
    solution: PathBuf,
    /// Override the `f` from the solution header.
    #[arg(long)]
    f: Option<usize>,
    #[arg(long)]
    json: bool,
}

enum Failure {
    Usage(String),
    Error(String),
}

type CmdResult = Result<i32, Failure>;

fn err(e: impl std::fmt::Display) -> Failure {
    Failure::Error(e.to_string())
}

/// Parses `argv` (including the program name) and runs the command.
pub fn run_cli<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    let result = match cli.command {
        Command::Solve(a) => solve(a),
        Command::Oracle(a) => oracle(a),
        Command::Reduce(a) => reduce(a),
        Command::Decode(a) => decode(a),
        Command::Encode(a) => encode(a),
        Command::Canonicalize(a) => canonicalize(a),
        Command::Gen(a) => gen(a),
        Command::Bench(a) => bench(a),
        Command::Verify(a) => verify(a),
    };
    match result {
        Ok(code) => code,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            EXIT_USAGE
        }
        Err(Failure::Error(msg)) => {
            eprintln!("error: {msg}");
            EXIT_ERROR
        }
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::Error(format!("{}: {e}", path.display())))
}

fn load_instance(path: &Path) -> Result<Instance, Failure> {
    parse_instance(&read(path)?).map_err(|e| Failure::Error(format!("{}: {e}", path.display())))
}

fn load_meta(path: &Path) -> Result<GadgetMetadata, Failure> {
    GadgetMetadata::from_json(&read(path)?)
        .map_err(|e| Failure::Error(format!("{}: {e}", path.display())))
}

fn load_solution(path: &Path, inst: &Instance) -> Result<(SolutionSet, usize), Failure> {
    let file = parse_solution(&read(path)?)
        .map_err(|e| Failure::Error(format!("{}: {e}", path.display())))?;
    let sol = file.bind(inst).map_err(err)?;
    Ok((sol, file.f))
}

fn write_out(out: Option<&Path>, text: &str) -> Result<(), Failure> {
    match out {
        Some(p) => fs::write(p, text).map_err(|e| Failure::Error(format!("{}: {e}", p.display()))),
        None => io::stdout().write_all(text.as_bytes()).map_err(err),
    }
}

fn print_json(value: &Value) {
    println!(
        "{}",
        serde_json::to_string_pretty(value).expect("json values serialize")
    );
}

/// Re-verifies `sol` and writes it, or fails if the solver produced an
/// invalid set.
fn emit_solution(
    inst: &Instance,
    sol: &SolutionSet,
    f: usize,
    out: Option<&Path>,
    json: bool,
) -> Result<(), Failure> {
    let verdict = verify_solution(inst, sol, f).map_err(err)?;
    if !verdict.valid {
        return Err(Failure::Error(format!(
            "internal error: produced solution fails verification: {}",
            verdict.violations[0]
        )));
    }
    if out.is_some() || !json {
        write_out(out, &sol.to_text(f))?;
    }
    Ok(())
}

fn solve(a: SolveArgs) -> CmdResult {
    let inst = load_instance(&a.instance)?;
    let method = match (a.problem, a.method) {
        (Problem::Bis, None) => SolveMethod::Dp,
        (Problem::Mcis, None) => SolveMethod::Greedy,
        (Problem::Bds, None) => SolveMethod::Brute,
        (Problem::Bis, Some(m @ (SolveMethod::Dp | SolveMethod::Vc)))
        | (Problem::Mcis, Some(m @ (SolveMethod::Greedy | SolveMethod::Local)))
        | (Problem::Bds, Some(m @ SolveMethod::Brute)) => m,
        (p, Some(m)) => {
            return Err(Failure::Usage(format!(
                "method {} does not apply to {}",
                m.to_possible_value().expect("not skipped").get_name(),
                p.to_possible_value().expect("not skipped").get_name()
            )))
        }
    };
    let start = Instant::now();
    let (solution, stats, f) = match method {
        SolveMethod::Dp => {
            let o = run_fbis_dp(&inst, a.f).map_err(err)?;
            (o.solution, serde_json::to_value(o.stats), a.f)
        }
        SolveMethod::Vc => {
            let o = run_fbis_vc(&inst, a.f).map_err(err)?;
            (o.solution, serde_json::to_value(o.stats), a.f)
        }
        SolveMethod::Brute => {
            let o = run_fbds_brute(&inst, a.f).map_err(err)?;
            (o.solution, serde_json::to_value(o.stats), a.f)
        }
        SolveMethod::Greedy => {
            let sol = greedy_mcis(&inst);
            let stats = json!({"n": inst.n(), "k": inst.k(), "colors": sol.distinct_colors()});
            (Some(sol), Ok(stats), 1)
        }
        SolveMethod::Local => {
            let o = run_local_search(&inst, &LocalSearchConfig::with_b(a.b)).map_err(err)?;
            (Some(o.solution), serde_json::to_value(o.stats), 1)
        }
    };
    let wall_time = start.elapsed().as_secs_f64();
    let mut stats = stats.map_err(err)?;
    stats["wall_time"] = json!(wall_time);
    if let Some(sol) = &solution {
        emit_solution(&inst, sol, f, a.out.as_deref(), a.json)?;
    } else if !a.json {
        eprintln!("infeasible");
    }
    if a.json {
        print_json(&json!({
            "problem": ProblemKind::from(a.problem).to_string(),
            "method": method.to_possible_value().expect("not skipped").get_name(),
            "feasible": solution.is_some(),
            "solution": solution.as_ref().map(|s| s.ids().iter().copied().collect::<Vec<_>>()),
            "stats": stats,
        }));
    }
    Ok(if solution.is_some() {
        EXIT_OK
    } else {
        EXIT_NEGATIVE
    })
}

impl From<Problem> for ProblemKind {
    fn from(p: Problem) -> Self {
        match p {
            Problem::Bis => ProblemKind::Bis,
            Problem::Mcis => ProblemKind::Mcis,
            Problem::Bds => ProblemKind::Bds,
        }
    }
}

fn oracle(a: OracleArgs) -> CmdResult {
    if !a.dev {
        return Err(Failure::Usage("the oracle command requires --dev".into()));
    }
    let budget = OracleBudget::default();
    let text = read(&a.input)?;
    if a.problem == OracleProblem::Sat {
        let phi = parse_dimacs(&text).map_err(err)?;
        let found = oracle_sat(&phi, &budget).map_err(err)?;
        if a.json {
            print_json(&json!({"satisfiable": found.is_some()}));
        } else if let Some(asg) = &found {
            print!("{}", asg.to_text());
        } else {
            eprintln!("unsatisfiable");
        }
        return Ok(if found.is_some() {
            EXIT_OK
        } else {
            EXIT_NEGATIVE
        });
    }
    let inst = parse_instance(&text).map_err(err)?;
    let (found, f) = match a.problem {
        OracleProblem::Bis => (oracle_fbis(&inst, a.f, &budget).map_err(err)?, a.f),
        OracleProblem::Bds => (oracle_fbds(&inst, a.f, &budget).map_err(err)?, a.f),
        OracleProblem::Mcis => (Some(oracle_mcis(&inst, &budget).map_err(err)?.1), 1),
        OracleProblem::Sat => unreachable!(),
    };
    if a.json {
        print_json(&json!({
            "feasible": found.is_some(),
            "solution": found.as_ref().map(|s| s.ids().iter().copied().collect::<Vec<_>>()),
            "colors": found.as_ref().map(SolutionSet::distinct_colors),
        }));
    } else if let Some(sol) = &found {
        print!("{}", sol.to_text(f));
    } else {
        eprintln!("infeasible");
    }
    Ok(if found.is_some() {
        EXIT_OK
    } else {
        EXIT_NEGATIVE
    })
}

fn reduce(a: ReduceArgs) -> CmdResult {
    let phi = parse_dimacs(&read(&a.cnf)?)
        .map_err(|e| Failure::Error(format!("{}: {e}", a.cnf.display())))?;
    let (inst, meta) = match a.reduction {
        Reduction::Indset => reduce_indset(&phi),
        Reduction::Domset => reduce_domset(&phi),
    }
    .map_err(err)?;
    write_out(Some(&a.out), &inst.to_text())?;
    write_out(Some(&a.meta), &meta.to_json())?;
    if a.json {
        print_json(&json!({
            "flavor": phi.flavor().to_string(),
            "num_vars": phi.num_vars(),
            "num_clauses": phi.num_clauses(),
            "n": inst.n(),
            "k": inst.k(),
            "edges": implied_edges(&inst).len(),
        }));
    }
    Ok(EXIT_OK)
}

fn decode(a: CodecArgs) -> CmdResult {
    let inst = load_instance(&a.instance)?;
    let meta = load_meta(&a.meta)?;
    let (sol, _) = load_solution(&a.input, &inst)?;
    let decoded = match meta.reduction {
        ReductionKind::Indset => decode_indset(&inst, &meta, &sol),
        ReductionKind::Domset => decode_domset(&inst, &meta, &sol),
    };
    match decoded {
        Ok(asg) => {
            write_out(a.out.as_deref(), &asg.to_text())?;
            Ok(EXIT_OK)
        }
        Err(e) => {
            eprintln!("rejected: {e}");
            Ok(EXIT_NEGATIVE)
        }
    }
}

fn encode(a: CodecArgs) -> CmdResult {
    let inst = load_instance(&a.instance)?;
    let meta = load_meta(&a.meta)?;
    let asg = parse_assignment(&read(&a.input)?, meta.num_vars).map_err(err)?;
    let encoded = match meta.reduction {
        ReductionKind::Indset => encode_indset_solution(&inst, &meta, &asg),
        ReductionKind::Domset => encode_domset_solution(&inst, &meta, &asg),
    };
    match encoded {
        Ok(sol) => {
            emit_solution(&inst, &sol, 1, a.out.as_deref(), false)?;
            Ok(EXIT_OK)
        }
        Err(e) => {
            eprintln!("rejected: {e}");
            Ok(EXIT_NEGATIVE)
        }
    }
}

fn canonicalize(a: CodecArgs) -> CmdResult {
    let inst = load_instance(&a.instance)?;
    let meta = load_meta(&a.meta)?;
    let (sol, _) = load_solution(&a.input, &inst)?;
    match canonicalize_bds(&inst, &meta, &sol) {
        Ok(canonical) => {
            emit_solution(&inst, &canonical, 1, a.out.as_deref(), false)?;
            Ok(EXIT_OK)
        }
        Err(e) => {
            eprintln!("rejected: {e}");
            Ok(EXIT_NEGATIVE)
        }
    }
}

fn gen(a: GenArgs) -> CmdResult {
    if a.n == 0 || a.k == 0 {
        return Err(Failure::Usage("--n and --k must be at least 1".into()));
    }
    let spec = GenSpec::new(a.model, a.n, a.k, a.seed).with_f_target(a.f_target);
    write_out(a.out.as_deref(), &generate(&spec).to_text())?;
    Ok(EXIT_OK)
}

fn bench(a: BenchArgs) -> CmdResult {
    let suite = match a.suite.as_str() {
        "standard" => SuiteSpec::standard(),
        "quick" => SuiteSpec::quick(),
        path => serde_json::from_str(&read(Path::new(path))?)
            .map_err(|e| Failure::Error(format!("{path}: {e}")))?,
    };
    match &a.out {
        Some(p) => {
            let file =
                fs::File::create(p).map_err(|e| Failure::Error(format!("{}: {e}", p.display())))?;
            run_bench(&suite, a.jobs, file).map_err(err)?;
        }
        None => {
            run_bench(&suite, a.jobs, io::stdout()).map_err(err)?;
        }
    }
    Ok(EXIT_OK)
}

fn verify(a: VerifyArgs) -> CmdResult {
    let inst = load_instance(&a.instance)?;
    let (sol, file_f) = load_solution(&a.solution, &inst)?;
    let verdict = verify_solution(&inst, &sol, a.f.unwrap_or(file_f)).map_err(err)?;
    if a.json {
        print_json(&serde_json::to_value(&verdict).map_err(err)?);
    } else if verdict.valid {
        println!("valid ({} colors)", verdict.distinct_colors);
    } else {
        for v in &verdict.violations {
            println!("invalid: {v}");
        }
    }
    Ok(if verdict.valid {
        EXIT_OK
    } else {
        EXIT_NEGATIVE
    })
}
