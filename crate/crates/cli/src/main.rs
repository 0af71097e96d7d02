use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use modsat::beta::{beta_eval, count_model};
use modsat::cnf::{eval_reference, parse_dimacs, Assignment, Formula};
use modsat::harness::{
    bench_eval, bench_pipeline, default_ratio_sweep, diff_run, gen_corpus, load_corpus,
    write_corpus, CorpusParams, DiffOptions,
};
use modsat::lp::{build_relaxation, solve_feasibility, BoundMode, NegationMode};
use modsat::mvlogic::{
    classify_binary2, classify_unary2, dump_binary, dump_unary, enumerate_binary,
    enumerate_unary, ksat_mu, Arity, DEFAULT_ENUMERATION_BUDGET,
};
use modsat::oracle::{brute_force_sat, dpll_sat, DEFAULT_NODE_BUDGET};
use modsat::pipeline::{solve_relaxed, Objective, PipelineConfig, RoundingBase};

#[derive(Parser)]
#[command(name = "modsat", version, about = "Modular many-valued logic and k-SAT relaxation tools")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Enumerate the unary and binary operator tables of an arity.
    Tables(TablesArgs),
    /// Generate a random uniform k-CNF corpus.
    Gen(GenArgs),
    /// Evaluate a formula with the nested table fold and with plain CNF semantics.
    Eval(EvalArgs),
    /// Build and solve the clause-sum relaxation system.
    Lp(LpArgs),
    /// Run the relax-solve-round pipeline on one formula.
    Solve(SolveArgs),
    /// Decide satisfiability exactly.
    Oracle(OracleArgs),
    /// Compare the pipeline with the exact oracle over a corpus.
    Diff(DiffArgs),
    /// Measure evaluator or pipeline scaling.
    Bench(BenchArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Csv,
    Text,
}

#[derive(Clone, Copy, ValueEnum)]
enum NegationArg {
    Faithful,
    Affine,
}

#[derive(Clone, Copy, ValueEnum)]
enum BoundArg {
    K,
    #[value(name = "k-1")]
    KMinus1,
}

#[derive(Clone, Copy, ValueEnum)]
enum RoundArg {
    #[value(name = "2")]
    Two,
    K,
}

#[derive(Clone, Copy, ValueEnum)]
enum ObjectiveArg {
    None,
    MaxSum,
}

#[derive(Args)]
struct RelaxArgs {
    #[arg(long, value_enum, default_value = "faithful")]
    negation: NegationArg,
    #[arg(long, value_enum, default_value = "k")]
    bound: BoundArg,
}

impl RelaxArgs {
    fn modes(&self) -> (NegationMode, BoundMode) {
        let n = match self.negation {
            NegationArg::Faithful => NegationMode::Faithful,
            NegationArg::Affine => NegationMode::Affine,
        };
        let b = match self.bound {
            BoundArg::K => BoundMode::K,
            BoundArg::KMinus1 => BoundMode::KMinus1,
        };
        (n, b)
    }
}

#[derive(Args)]
struct PipelineArgs {
    #[command(flatten)]
    relax: RelaxArgs,
    #[arg(long, value_enum, default_value = "2")]
    round_base: RoundArg,
    #[arg(long, value_enum, default_value = "none")]
    objective: ObjectiveArg,
}

impl PipelineArgs {
    fn config(&self) -> PipelineConfig {
        let (negation, bound) = self.relax.modes();
        PipelineConfig {
            negation,
            bound,
            rounding_base: match self.round_base {
                RoundArg::Two => RoundingBase::Two,
                RoundArg::K => RoundingBase::K,
            },
            objective: match self.objective {
                ObjectiveArg::None => Objective::None,
                ObjectiveArg::MaxSum => Objective::MaximizeSum,
            },
        }
    }
}

#[derive(Args)]
struct TablesArgs {
    #[arg(long, default_value_t = 2)]
    arity: u32,
    /// Refuse to enumerate more tables than this.
    #[arg(long, default_value_t = DEFAULT_ENUMERATION_BUDGET)]
    budget: u64,
    /// Print the clause-sum table for width K instead.
    #[arg(long)]
    mu: Option<usize>,
    #[arg(long, value_enum, default_value = "text")]
    format: Format,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct GenArgs {
    #[arg(long)]
    vars: usize,
    /// Clause count; ignored with --sweep or --ratios.
    #[arg(long, default_value_t = 0)]
    clauses: usize,
    #[arg(long, default_value_t = 3)]
    k: usize,
    #[arg(long, default_value_t = 10)]
    count: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Cycle through clause/variable ratios around the threshold for k.
    #[arg(long)]
    sweep: bool,
    /// Explicit comma-separated clause/variable ratios.
    #[arg(long, value_delimiter = ',')]
    ratios: Vec<f64>,
    /// Output directory.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct EvalArgs {
    #[arg(long)]
    cnf: PathBuf,
    /// Bits for x1..xn, `1` meaning true.
    #[arg(long)]
    assignment: String,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct LpArgs {
    #[arg(long)]
    cnf: PathBuf,
    #[command(flatten)]
    relax: RelaxArgs,
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SolveArgs {
    #[arg(long)]
    cnf: PathBuf,
    #[command(flatten)]
    pipeline: PipelineArgs,
    /// Check the rounded candidate against the formula.
    #[arg(long)]
    verify: bool,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Method {
    Dpll,
    Brute,
}

#[derive(Args)]
struct OracleArgs {
    #[arg(long)]
    cnf: PathBuf,
    #[arg(long, value_enum, default_value = "dpll")]
    method: Method,
    #[arg(long, default_value_t = DEFAULT_NODE_BUDGET)]
    budget: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct DiffArgs {
    /// Directory of `.cnf` files.
    #[arg(long)]
    corpus: PathBuf,
    #[command(flatten)]
    pipeline: PipelineArgs,
    #[arg(long, default_value_t = DEFAULT_NODE_BUDGET)]
    budget: u64,
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
    /// Include wall-clock timings (JSON only); output is then not reproducible.
    #[arg(long)]
    timing: bool,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum BenchTarget {
    Eval,
    Pipeline,
}

#[derive(Args)]
struct BenchArgs {
    #[arg(long, value_enum, default_value = "eval")]
    target: BenchTarget,
    #[arg(long, default_value_t = 3)]
    k: usize,
    /// Clause counts (eval) or variable counts (pipeline), ascending.
    #[arg(long, value_delimiter = ',', default_value = "1000,2000,4000,8000,16000")]
    sizes: Vec<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Clause/variable ratio for pipeline runs.
    #[arg(long, default_value_t = 4.27)]
    ratio: f64,
    /// Formulas per size for pipeline runs.
    #[arg(long, default_value_t = 5)]
    per_size: usize,
    #[command(flatten)]
    pipeline: PipelineArgs,
    /// Include wall-clock measurements.
    #[arg(long)]
    timing: bool,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn emit(out: Option<&Path>, text: &str) -> Result<()> {
    let mut text = text.to_string();
    if !text.ends_with('\n') {
        text.push('\n');
    }
    match out {
        Some(p) => fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn read_cnf(path: &Path) -> Result<Formula> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    parse_dimacs(&text).with_context(|| format!("parsing {}", path.display()))
}

fn pretty(v: &impl serde::Serialize) -> Result<String> {
    Ok(serde_json::to_string_pretty(v)?)
}

fn tables(a: TablesArgs) -> Result<()> {
    if let Some(k) = a.mu {
        let t = ksat_mu(k)?;
        let text = match a.format {
            Format::Json => pretty(&json!({ "k": k, "indices": t.indices(), "table": t.truth_table() }))?,
            _ => dump_binary(&t),
        };
        return emit(a.out.as_deref(), &text);
    }
    let n = Arity::new(a.arity)?;
    let unary: Vec<_> = enumerate_unary(n, a.budget)?.collect();
    let binary: Vec<_> = enumerate_binary(n, a.budget)?.collect();
    let text = match a.format {
        Format::Json => {
            let u: Vec<_> = unary
                .iter()
                .map(|t| {
                    let label = classify_unary2(t).ok().map(|c| c.name());
                    json!({ "indices": t.indices(), "table": t.truth_table(), "label": label })
                })
                .collect();
            let b: Vec<_> = binary
                .iter()
                .map(|t| {
                    let c = classify_binary2(t).ok();
                    json!({
                        "indices": t.indices(),
                        "table": t.truth_table(),
                        "label": c.map(|c| c.name()),
                        "legacy_label": c.map(|c| c.legacy_label()),
                    })
                })
                .collect();
            pretty(&json!({ "arity": a.arity, "unary": u, "binary": b }))?
        }
        Format::Csv => bail!("tables support json and text output"),
        Format::Text => {
            let mut s = String::new();
            for t in &unary {
                if let Ok(c) = classify_unary2(t) {
                    s.push_str(&format!("# {}\n", c.name()));
                }
                s.push_str(&dump_unary(t));
            }
            for t in &binary {
                if let Ok(c) = classify_binary2(t) {
                    s.push_str(&format!("# {} idx={:?}\n", c.name(), t.indices()));
                }
                s.push_str(&dump_binary(t));
            }
            s
        }
    };
    emit(a.out.as_deref(), &text)
}

fn gen(a: GenArgs) -> Result<()> {
    let ratios = if !a.ratios.is_empty() {
        Some(a.ratios.clone())
    } else if a.sweep {
        Some(default_ratio_sweep(a.k))
    } else {
        if a.clauses == 0 {
            bail!("give --clauses, --ratios or --sweep");
        }
        None
    };
    let p = CorpusParams { vars: a.vars, clauses: a.clauses, k: a.k, count: a.count, seed: a.seed, ratios };
    let corpus = gen_corpus(&p)?;
    write_corpus(&a.out, &corpus)?;
    eprintln!("wrote {} formulas to {}", corpus.len(), a.out.display());
    Ok(())
}

fn eval(a: EvalArgs) -> Result<()> {
    let f = read_cnf(&a.cnf)?;
    let asg = Assignment::parse_bits(&a.assignment)?;
    let r = beta_eval(&f, &asg)?;
    let reference = eval_reference(&f, &asg)?;
    let v = json!({
        "beta_value": r.value.value(),
        "beta_holds": r.holds(),
        "reference": reference,
        "agrees": r.holds() == reference,
        "ops": r.ops,
        "predicted_ops": count_model(&f)?,
    });
    emit(a.out.as_deref(), &pretty(&v)?)
}

fn lp(a: LpArgs) -> Result<()> {
    let f = read_cnf(&a.cnf)?;
    let (negation, bound) = a.relax.modes();
    let system = build_relaxation(&f, negation, bound)?;
    let solution = solve_feasibility(&system)?;
    let text = match a.format {
        Format::Json => pretty(&json!({
            "system": system,
            "text": system.to_text(),
            "solution": solution,
        }))?,
        Format::Text => {
            let point = solution.point.as_ref().map(|p| {
                p.iter().map(ToString::to_string).collect::<Vec<_>>().join(" ")
            });
            format!(
                "{}# status {}\n# point {}\n",
                system.to_text(),
                format!("{:?}", solution.status).to_lowercase(),
                point.unwrap_or_else(|| "-".into())
            )
        }
        Format::Csv => bail!("lp supports json and text output"),
    };
    emit(a.out.as_deref(), &text)
}

fn solve(a: SolveArgs) -> Result<()> {
    let f = read_cnf(&a.cnf)?;
    let mut r = solve_relaxed(&f, &a.pipeline.config())?;
    if a.verify {
        r.verified = Some(match &r.rounded {
            Some(x) => eval_reference(&f, x)?,
            None => false,
        });
    }
    emit(a.out.as_deref(), &pretty(&r)?)
}

fn oracle(a: OracleArgs) -> Result<()> {
    let f = read_cnf(&a.cnf)?;
    let v = match a.method {
        Method::Dpll => dpll_sat(&f, a.budget)?,
        Method::Brute => brute_force_sat(&f)?,
    };
    emit(a.out.as_deref(), &pretty(&v)?)
}

fn diff(a: DiffArgs) -> Result<()> {
    let corpus = load_corpus(&a.corpus)?;
    let report = diff_run(&corpus, &a.pipeline.config(), &DiffOptions { oracle_budget: a.budget });
    let text = match a.format {
        Format::Json if a.timing => report.full_json(),
        Format::Json => report.canonical_json(),
        Format::Csv => report.to_csv(),
        Format::Text => bail!("diff supports json and csv output"),
    };
    emit(a.out.as_deref(), &text)
}

fn bench(a: BenchArgs) -> Result<()> {
    let text = match a.target {
        BenchTarget::Eval => {
            let r = bench_eval(a.k, &a.sizes, a.seed)?;
            if a.timing {
                r.full_json()
            } else {
                r.canonical_json()
            }
        }
        BenchTarget::Pipeline => {
            let cfg = a.pipeline.config();
            pretty(&bench_pipeline(a.k, &a.sizes, a.ratio, a.per_size, a.seed, &cfg)?)?
        }
    };
    emit(a.out.as_deref(), &text)
}

fn main() -> Result<()> {
    match Cli::parse().command {
        Command::Tables(a) => tables(a),
        Command::Gen(a) => gen(a),
        Command::Eval(a) => eval(a),
        Command::Lp(a) => lp(a),
        Command::Solve(a) => solve(a),
        Command::Oracle(a) => oracle(a),
        Command::Diff(a) => diff(a),
        Command::Bench(a) => bench(a),
    }
}
