//! Differential runs of the relaxation pipeline against the exact oracle,
//! scaling measurements and corpus generation.
//!
//! Reports serialize to JSON with a fixed key order. Wall-clock fields live in
//! optional `timing` members that [`DiffReport::canonical_json`] strips, so
//! the canonical form is byte-identical across reruns.

use std::collections::BTreeMap;
use std::fs;
use std::io;
use std::path::Path;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::beta::{beta_eval, count_model, OpCount};
use crate::cnf::{
    eval_reference, parse_dimacs, random_assignment, random_kcnf, write_dimacs, Assignment,
    CnfError, Formula,
};
use crate::oracle::{dpll_sat, OracleError, SatStatus, DEFAULT_NODE_BUDGET};
use crate::pipeline::{solve_relaxed, Claim, PipelineConfig, PipelineSteps};

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("sizes must be nonempty, positive and strictly ascending")]
    BadSizes,
    #[error("clause width {0} is below 2")]
    BadWidth(usize),
    #[error("{path}: {source}")]
    Parse { path: String, source: CnfError },
    #[error(transparent)]
    Cnf(#[from] CnfError),
    #[error(transparent)]
    Io(#[from] io::Error),
}

/// A named formula.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Instance {
    pub id: String,
    pub formula: Formula,
}

impl Instance {
    pub fn new(id: impl Into<String>, formula: Formula) -> Self {
        Instance { id: id.into(), formula }
    }
}

/// Two variables, all four polarity combinations: unsatisfiable.
pub fn canonical_unsat_2cnf() -> Formula {
    Formula::from_dimacs_clauses(2, &[&[1, 2], &[1, -2], &[-1, 2], &[-1, -2]])
        .expect("valid formula")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum OracleOutcome {
    Sat,
    Unsat,
    BudgetExceeded,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Category {
    /// Sat claim whose candidate verifies.
    SoundSat,
    /// Sat claim on an unsatisfiable formula.
    UnsoundSatClaim,
    /// Sat claim on a satisfiable formula, but the candidate fails.
    InvalidWitness,
    SoundUnsat,
    MissedSat,
    OracleBudgetExceeded,
    /// The pipeline rejected or failed on the instance.
    PipelineError,
}

impl Category {
    pub const ALL: [Category; 7] = [
        Category::SoundSat,
        Category::UnsoundSatClaim,
        Category::InvalidWitness,
        Category::SoundUnsat,
        Category::MissedSat,
        Category::OracleBudgetExceeded,
        Category::PipelineError,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Category::SoundSat => "sound_sat",
            Category::UnsoundSatClaim => "unsound_sat_claim",
            Category::InvalidWitness => "invalid_witness",
            Category::SoundUnsat => "sound_unsat",
            Category::MissedSat => "missed_sat",
            Category::OracleBudgetExceeded => "oracle_budget_exceeded",
            Category::PipelineError => "pipeline_error",
        }
    }
}

/// Category of a record from its claim, candidate check and oracle outcome.
pub fn classify(claim: Option<Claim>, verified: bool, oracle: OracleOutcome) -> Category {
    match (claim, oracle) {
        (None, _) => Category::PipelineError,
        (_, OracleOutcome::BudgetExceeded) => Category::OracleBudgetExceeded,
        (Some(Claim::SatClaim), _) if verified => Category::SoundSat,
        (Some(Claim::SatClaim), OracleOutcome::Unsat) => Category::UnsoundSatClaim,
        (Some(Claim::SatClaim), OracleOutcome::Sat) => Category::InvalidWitness,
        (Some(Claim::UnsatClaim), OracleOutcome::Unsat) => Category::SoundUnsat,
        (Some(Claim::UnsatClaim), OracleOutcome::Sat) => Category::MissedSat,
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Timing {
    pub pipeline_ns: u64,
    pub oracle_ns: u64,
}

/// Nested-fold evaluation of the candidate next to reference semantics.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BetaCheck {
    pub beta_value: u32,
    pub reference: bool,
    pub ops: OpCount,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DiffRecord {
    pub id: String,
    pub num_vars: usize,
    pub num_clauses: usize,
    pub k: Option<usize>,
    pub claim: Option<Claim>,
    pub candidate: Option<String>,
    pub candidate_verified: bool,
    pub anomalies: usize,
    pub oracle: OracleOutcome,
    pub category: Category,
    pub pipeline_steps: Option<PipelineSteps>,
    pub oracle_nodes: Option<u64>,
    pub beta: Option<BetaCheck>,
    pub error: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub timing: Option<Timing>,
}

impl DiffRecord {
    /// Re-derives the category from the stored fields.
    pub fn recomputed_category(&self) -> Category {
        classify(self.claim, self.candidate_verified, self.oracle)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CategoryStat {
    pub count: usize,
    pub rate: f64,
}

/// Claimed status against oracle status, over records where both exist.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Agreement {
    pub compared: usize,
    pub status_agrees: usize,
    pub status_rate: f64,
    /// Records whose candidate actually satisfies the formula.
    pub certified: usize,
    pub certified_rate: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Aggregates {
    pub total: usize,
    pub categories: BTreeMap<&'static str, CategoryStat>,
    pub agreement: Agreement,
}

fn rate(n: usize, d: usize) -> f64 {
    if d == 0 {
        0.0
    } else {
        n as f64 / d as f64
    }
}

impl Aggregates {
    pub fn from_records(records: &[DiffRecord]) -> Self {
        let total = records.len();
        let categories = Category::ALL
            .iter()
            .map(|&c| {
                let count = records.iter().filter(|r| r.category == c).count();
                (c.as_str(), CategoryStat { count, rate: rate(count, total) })
            })
            .collect();
        let compared: Vec<&DiffRecord> = records
            .iter()
            .filter(|r| r.claim.is_some() && r.oracle != OracleOutcome::BudgetExceeded)
            .collect();
        let status_agrees = compared
            .iter()
            .filter(|r| {
                matches!(
                    (r.claim, r.oracle),
                    (Some(Claim::SatClaim), OracleOutcome::Sat)
                        | (Some(Claim::UnsatClaim), OracleOutcome::Unsat)
                )
            })
            .count();
        let certified = compared.iter().filter(|r| r.candidate_verified).count();
        Aggregates {
            total,
            categories,
            agreement: Agreement {
                compared: compared.len(),
                status_agrees,
                status_rate: rate(status_agrees, compared.len()),
                certified,
                certified_rate: rate(certified, compared.len()),
            },
        }
    }

    pub fn count(&self, c: Category) -> usize {
        self.categories.get(c.as_str()).map_or(0, |s| s.count)
    }
}

/// Least-squares fit of `y = coefficient * x^exponent` in log-log space.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PowerFit {
    pub exponent: f64,
    pub coefficient: f64,
    pub points: usize,
}

pub fn fit_power_law(points: &[(f64, f64)]) -> Option<PowerFit> {
    let logs: Vec<(f64, f64)> = points
        .iter()
        .filter(|(x, y)| *x > 0.0 && *y > 0.0)
        .map(|(x, y)| (x.ln(), y.ln()))
        .collect();
    let n = logs.len() as f64;
    if logs.len() < 2 {
        return None;
    }
    let mx = logs.iter().map(|p| p.0).sum::<f64>() / n;
    let my = logs.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = logs.iter().map(|p| (p.0 - mx).powi(2)).sum();
    if sxx == 0.0 {
        return None;
    }
    let sxy: f64 = logs.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let exponent = sxy / sxx;
    Some(PowerFit { exponent, coefficient: (my - exponent * mx).exp(), points: logs.len() })
}

/// Ordinary least squares `y = slope * x + intercept`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LinearFit {
    pub slope: f64,
    pub intercept: f64,
    pub max_residual: f64,
}

pub fn fit_linear(points: &[(f64, f64)]) -> Option<LinearFit> {
    let n = points.len() as f64;
    if points.len() < 2 {
        return None;
    }
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = points.iter().map(|p| (p.0 - mx).powi(2)).sum();
    if sxx == 0.0 {
        return None;
    }
    let slope = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum::<f64>() / sxx;
    let intercept = my - slope * mx;
    let max_residual =
        points.iter().map(|p| (p.1 - slope * p.0 - intercept).abs()).fold(0.0, f64::max);
    Some(LinearFit { slope, intercept, max_residual })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScalingFits {
    pub evaluator_additions_vs_m: Option<PowerFit>,
    pub pipeline_steps_vs_n: Option<PowerFit>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DiffReport {
    pub config: PipelineConfig,
    pub oracle_budget: u64,
    pub records: Vec<DiffRecord>,
    pub aggregates: Aggregates,
    pub scaling: ScalingFits,
}

impl DiffReport {
    /// JSON without wall-clock fields.
    pub fn canonical_json(&self) -> String {
        let mut stripped = self.clone();
        for r in &mut stripped.records {
            r.timing = None;
        }
        serde_json::to_string_pretty(&stripped).expect("report serializes")
    }

    /// JSON including wall-clock fields.
    pub fn full_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    /// One row per record.
    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record([
            "id",
            "num_vars",
            "num_clauses",
            "k",
            "claim",
            "candidate_verified",
            "oracle",
            "category",
            "anomalies",
            "pipeline_steps",
            "pivots",
            "oracle_nodes",
            "beta_additions",
            "error",
        ])
        .expect("in-memory write");
        let opt = |v: Option<String>| v.unwrap_or_default();
        for r in &self.records {
            let claim = r.claim.map(|c| match c {
                Claim::SatClaim => "sat_claim".to_string(),
                Claim::UnsatClaim => "unsat_claim".to_string(),
            });
            let oracle = match r.oracle {
                OracleOutcome::Sat => "sat",
                OracleOutcome::Unsat => "unsat",
                OracleOutcome::BudgetExceeded => "budget_exceeded",
            };
            w.write_record([
                r.id.clone(),
                r.num_vars.to_string(),
                r.num_clauses.to_string(),
                opt(r.k.map(|k| k.to_string())),
                opt(claim),
                r.candidate_verified.to_string(),
                oracle.to_string(),
                r.category.as_str().to_string(),
                r.anomalies.to_string(),
                opt(r.pipeline_steps.map(|s| s.total().to_string())),
                opt(r.pipeline_steps.map(|s| s.pivots.to_string())),
                opt(r.oracle_nodes.map(|n| n.to_string())),
                opt(r.beta.as_ref().map(|b| b.ops.additions.to_string())),
                opt(r.error.clone()),
            ])
            .expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("flush to memory")).expect("utf-8 fields")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DiffOptions {
    pub oracle_budget: u64,
}

impl Default for DiffOptions {
    fn default() -> Self {
        DiffOptions { oracle_budget: DEFAULT_NODE_BUDGET }
    }
}

fn elapsed_ns(start: Instant) -> u64 {
    u64::try_from(start.elapsed().as_nanos()).unwrap_or(u64::MAX)
}

fn run_one(inst: &Instance, cfg: &PipelineConfig, opts: &DiffOptions) -> DiffRecord {
    let f = &inst.formula;
    let t0 = Instant::now();
    let pipeline = solve_relaxed(f, cfg);
    let pipeline_ns = elapsed_ns(t0);

    let t1 = Instant::now();
    let verdict = dpll_sat(f, opts.oracle_budget);
    let oracle_ns = elapsed_ns(t1);
    let (oracle, oracle_nodes, oracle_error) = match verdict {
        Ok(v) => {
            let outcome = match v.status {
                SatStatus::Sat => OracleOutcome::Sat,
                SatStatus::Unsat => OracleOutcome::Unsat,
            };
            (outcome, Some(v.nodes_explored), None)
        }
        Err(OracleError::BudgetExceeded { budget }) => {
            (OracleOutcome::BudgetExceeded, Some(budget), None)
        }
        Err(e) => (OracleOutcome::BudgetExceeded, None, Some(e.to_string())),
    };

    let (claim, candidate, verified, anomalies, steps, error) = match &pipeline {
        Ok(r) => {
            let verified = r
                .rounded
                .as_ref()
                .map(|a| eval_reference(f, a).unwrap_or(false))
                .unwrap_or(false);
            (
                Some(r.claimed_status),
                r.rounded.as_ref().map(Assignment::to_bits),
                verified,
                r.anomalies.len(),
                Some(r.steps),
                oracle_error,
            )
        }
        Err(e) => (None, None, false, 0, None, Some(e.to_string())),
    };

    let beta = pipeline.as_ref().ok().and_then(|r| {
        let a = r.rounded.clone().unwrap_or_else(|| Assignment::all(f.num_vars(), false));
        let b = beta_eval(f, &a).ok()?;
        Some(BetaCheck {
            beta_value: b.value.value(),
            reference: eval_reference(f, &a).ok()?,
            ops: b.ops,
        })
    });

    DiffRecord {
        id: inst.id.clone(),
        num_vars: f.num_vars(),
        num_clauses: f.num_clauses(),
        k: f.uniform_k(),
        claim,
        candidate,
        candidate_verified: verified,
        anomalies,
        oracle,
        category: classify(claim, verified, oracle),
        pipeline_steps: steps,
        oracle_nodes,
        beta,
        error,
        timing: Some(Timing { pipeline_ns, oracle_ns }),
    }
}

/// Runs pipeline, candidate verification and oracle on every instance.
/// Instances run in parallel; records keep corpus order.
pub fn diff_run(corpus: &[Instance], cfg: &PipelineConfig, opts: &DiffOptions) -> DiffReport {
    let records: Vec<DiffRecord> = corpus.par_iter().map(|inst| run_one(inst, cfg, opts)).collect();
    let aggregates = Aggregates::from_records(&records);
    let additions: Vec<(f64, f64)> = records
        .iter()
        .filter_map(|r| Some((r.num_clauses as f64, r.beta.as_ref()?.ops.additions as f64)))
        .collect();
    let steps: Vec<(f64, f64)> = records
        .iter()
        .filter_map(|r| Some((r.num_vars as f64, r.pipeline_steps?.total() as f64)))
        .collect();
    DiffReport {
        config: *cfg,
        oracle_budget: opts.oracle_budget,
        records,
        aggregates,
        scaling: ScalingFits {
            evaluator_additions_vs_m: fit_power_law(&additions),
            pipeline_steps_vs_n: fit_power_law(&steps),
        },
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EvalBenchRow {
    pub m: usize,
    pub num_vars: usize,
    pub measured: OpCount,
    pub predicted: OpCount,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub wall_ns: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EvalBenchReport {
    pub k: usize,
    pub seed: u64,
    pub sizes: Vec<usize>,
    pub rows: Vec<EvalBenchRow>,
    pub additions_fit: Option<PowerFit>,
    pub additions_linear: Option<LinearFit>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub wall_fit: Option<PowerFit>,
}

impl EvalBenchReport {
    pub fn canonical_json(&self) -> String {
        let mut stripped = self.clone();
        stripped.wall_fit = None;
        for r in &mut stripped.rows {
            r.wall_ns = None;
        }
        serde_json::to_string_pretty(&stripped).expect("report serializes")
    }

    pub fn full_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

fn check_sizes(sizes: &[usize]) -> Result<(), HarnessError> {
    if sizes.is_empty() || sizes[0] == 0 || sizes.windows(2).any(|w| w[0] >= w[1]) {
        return Err(HarnessError::BadSizes);
    }
    Ok(())
}

/// Evaluator work and wall time across clause counts `sizes` at width `k`.
pub fn bench_eval(k: usize, sizes: &[usize], seed: u64) -> Result<EvalBenchReport, HarnessError> {
    if k < 2 {
        return Err(HarnessError::BadWidth(k));
    }
    check_sizes(sizes)?;
    let mut rows = Vec::with_capacity(sizes.len());
    for &m in sizes {
        let n = m.max(k);
        let f = random_kcnf(n, m, k, seed.wrapping_add(m as u64))?;
        let a = random_assignment(n, seed ^ m as u64);
        let predicted = count_model(&f).expect("uniform width k >= 2");
        let measured = beta_eval(&f, &a).expect("uniform width k >= 2").ops;
        let reps = (200_000 / m).max(1);
        let start = Instant::now();
        for _ in 0..reps {
            std::hint::black_box(beta_eval(std::hint::black_box(&f), &a).ok());
        }
        let wall = start.elapsed().as_nanos() as f64 / reps as f64;
        rows.push(EvalBenchRow { m, num_vars: n, measured, predicted, wall_ns: Some(wall) });
    }
    let adds: Vec<(f64, f64)> =
        rows.iter().map(|r| (r.m as f64, r.measured.additions as f64)).collect();
    let walls: Vec<(f64, f64)> =
        rows.iter().filter_map(|r| Some((r.m as f64, r.wall_ns?))).collect();
    Ok(EvalBenchReport {
        k,
        seed,
        sizes: sizes.to_vec(),
        additions_fit: fit_power_law(&adds),
        additions_linear: fit_linear(&adds),
        wall_fit: fit_power_law(&walls),
        rows,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PipelineBenchRow {
    pub n: usize,
    pub m: usize,
    pub instances: usize,
    pub mean_steps: f64,
    pub mean_pivots: f64,
    pub max_steps: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PipelineBenchReport {
    pub k: usize,
    pub ratio: f64,
    pub seed: u64,
    pub config: PipelineConfig,
    pub rows: Vec<PipelineBenchRow>,
    pub steps_fit: Option<PowerFit>,
}

/// Pipeline step counts over variable counts `sizes` at a fixed clause ratio.
pub fn bench_pipeline(
    k: usize,
    sizes: &[usize],
    ratio: f64,
    per_size: usize,
    seed: u64,
    cfg: &PipelineConfig,
) -> Result<PipelineBenchReport, HarnessError> {
    if k < 2 {
        return Err(HarnessError::BadWidth(k));
    }
    check_sizes(sizes)?;
    let mut rows = Vec::with_capacity(sizes.len());
    for &n in sizes {
        let m = ((n as f64) * ratio).round().max(1.0) as usize;
        let formulas = (0..per_size.max(1))
            .map(|i| random_kcnf(n, m, k, seed.wrapping_add((n * 1000 + i) as u64)))
            .collect::<Result<Vec<_>, _>>()?;
        let steps: Vec<PipelineSteps> = formulas
            .par_iter()
            .map(|f| solve_relaxed(f, cfg).map(|r| r.steps))
            .collect::<Result<_, _>>()
            .expect("uniform width k >= 2");
        let count = steps.len() as f64;
        rows.push(PipelineBenchRow {
            n,
            m,
            instances: steps.len(),
            mean_steps: steps.iter().map(|s| s.total() as f64).sum::<f64>() / count,
            mean_pivots: steps.iter().map(|s| s.pivots as f64).sum::<f64>() / count,
            max_steps: steps.iter().map(PipelineSteps::total).max().unwrap_or(0),
        });
    }
    let pts: Vec<(f64, f64)> = rows.iter().map(|r| (r.n as f64, r.mean_steps)).collect();
    Ok(PipelineBenchReport { k, ratio, seed, config: *cfg, steps_fit: fit_power_law(&pts), rows })
}

/// Generator parameters. With `ratios` set, instance `i` uses clause count
/// `round(ratios[i % len] * vars)` instead of `clauses`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CorpusParams {
    pub vars: usize,
    pub clauses: usize,
    pub k: usize,
    pub count: usize,
    pub seed: u64,
    pub ratios: Option<Vec<f64>>,
}

/// Clause/variable ratios around the satisfiability threshold of random k-SAT.
pub fn default_ratio_sweep(k: usize) -> Vec<f64> {
    match k {
        2 => vec![0.6, 0.8, 1.0, 1.2, 1.4],
        3 => vec![3.5, 4.0, 4.27, 4.5, 5.0],
        _ => {
            let t = match k {
                4 => 9.931,
                5 => 21.117,
                6 => 43.37,
                _ => 2f64.powi(k as i32) * std::f64::consts::LN_2,
            };
            [0.8, 0.9, 1.0, 1.1, 1.2].iter().map(|s| (s * t * 100.0).round() / 100.0).collect()
        }
    }
}

/// Deterministic corpus; ids sort in generation order.
pub fn gen_corpus(p: &CorpusParams) -> Result<Vec<Instance>, HarnessError> {
    let mut rng = ChaCha8Rng::seed_from_u64(p.seed);
    (0..p.count)
        .map(|i| {
            let instance_seed: u64 = rng.random();
            let (m, tag) = match &p.ratios {
                Some(rs) if !rs.is_empty() => {
                    let r = rs[i % rs.len()];
                    (((p.vars as f64) * r).round() as usize, format!("-r{r}"))
                }
                _ => (p.clauses, String::new()),
            };
            let f = random_kcnf(p.vars, m, p.k, instance_seed)?;
            let id = format!("k{}-n{}-{:05}-m{}{}", p.k, p.vars, i, m, tag);
            Ok(Instance::new(id, f))
        })
        .collect()
}

/// Writes `<id>.cnf` files in canonical DIMACS.
pub fn write_corpus(dir: &Path, corpus: &[Instance]) -> Result<(), HarnessError> {
    fs::create_dir_all(dir)?;
    for inst in corpus {
        fs::write(dir.join(format!("{}.cnf", inst.id)), write_dimacs(&inst.formula))?;
    }
    Ok(())
}

/// Reads every `*.cnf` file of `dir`, sorted by file name.
pub fn load_corpus(dir: &Path) -> Result<Vec<Instance>, HarnessError> {
    let mut paths: Vec<_> = fs::read_dir(dir)?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "cnf"))
        .collect();
    paths.sort();
    paths
        .into_iter()
        .map(|path| {
            let text = fs::read_to_string(&path)?;
            let formula = parse_dimacs(&text).map_err(|source| HarnessError::Parse {
                path: path.display().to_string(),
                source,
            })?;
            let id = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
            Ok(Instance::new(id, formula))
        })
        .collect()
}
