//! Acceptance gate. Prints one `[PASS]`/`[FAIL]` line per criterion and exits
//! nonzero if any criterion fails.

use std::collections::{BTreeMap, HashSet};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use num_rational::BigRational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use modsat::beta::{beta_closed_form, beta_eval, count_model, published_addition_estimate};
use modsat::cnf::{eval_reference, parse_dimacs, random_kcnf, write_dimacs, Assignment, Formula};
use modsat::harness::{
    bench_eval, bench_pipeline, canonical_unsat_2cnf, classify, default_ratio_sweep, diff_run,
    gen_corpus, load_corpus, write_corpus, Category, CorpusParams, DiffOptions, Instance,
};
use modsat::lp::{
    build_relaxation, solve_feasibility, BoundMode, LpStatus, NegationMode, RowOrigin,
};
use modsat::mvlogic::{
    classify_binary2, classify_unary2, enumerate_binary, enumerate_unary, Arity, Connective,
    DEFAULT_ENUMERATION_BUDGET,
};
use modsat::oracle::{brute_force_sat, dpll_sat, verify, SatStatus, DEFAULT_NODE_BUDGET};
use modsat::pipeline::{Objective, PipelineConfig};

const AC1_LIMIT: Duration = Duration::from_secs(1);
const AC2_LIMIT: Duration = Duration::from_secs(10);
const AC3_MIN_FORMULAS: usize = 1000;
const AC4_EXPONENT_TOL: f64 = 1e-3;
const AC6_INSTANCES: usize = 500;
const AC7_SIZES: [usize; 4] = [20, 40, 80, 160];
const AC7_MAX_EXPONENT: f64 = 4.0;
const AC7_LIMIT: Duration = Duration::from_secs(300);
const AC8_INSTANCES: u64 = 500;

type Outcome = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn two() -> Arity {
    Arity::new(2).unwrap()
}

/// Published two-valued tables: index pair, outputs for floor(a) = 0, 1.
const UNARY_2: [([u32; 2], [u32; 2], &str); 4] = [
    ([0, 0], [0, 1], "self projection"),
    ([0, 1], [0, 0], "antilogy"),
    ([1, 0], [1, 1], "tautology"),
    ([1, 1], [1, 0], "complementation"),
];

/// Published two-valued binary tables: index matrix `(i00, i01, i10, i11)`,
/// row-major outputs, label.
const BINARY_2: [([u32; 4], [u32; 4], &str); 16] = [
    ([0, 0, 0, 0], [0, 0, 0, 1], "nand"),
    ([0, 0, 0, 1], [0, 0, 0, 0], "antilogy"),
    ([0, 0, 1, 0], [0, 0, 1, 1], "left complementation"),
    ([0, 0, 1, 1], [0, 0, 1, 0], "if ... then"),
    ([0, 1, 0, 0], [0, 1, 0, 1], "right projection"),
    ([0, 1, 0, 1], [0, 1, 0, 0], "if"),
    ([0, 1, 1, 0], [0, 1, 1, 1], "neither ... nor"),
    ([0, 1, 1, 1], [0, 1, 1, 0], "if and only if (iff)"),
    ([1, 0, 0, 0], [1, 0, 0, 1], "xor"),
    ([1, 0, 0, 1], [1, 0, 0, 0], "or"),
    ([1, 0, 1, 0], [1, 0, 1, 1], "not ... but"),
    ([1, 0, 1, 1], [1, 0, 1, 0], "right projection"),
    ([1, 1, 0, 0], [1, 1, 0, 1], "but not"),
    ([1, 1, 0, 1], [1, 1, 0, 0], "left projection"),
    ([1, 1, 1, 0], [1, 1, 1, 1], "tautology"),
    ([1, 1, 1, 1], [1, 1, 1, 0], "and"),
];

fn ac1() -> Outcome {
    let start = Instant::now();
    let unary: Vec<_> = enumerate_unary(two(), DEFAULT_ENUMERATION_BUDGET).unwrap().collect();
    let binary: Vec<_> = enumerate_binary(two(), DEFAULT_ENUMERATION_BUDGET).unwrap().collect();
    ensure(unary.len() == 4 && binary.len() == 16, || {
        format!("got {} unary / {} binary tables", unary.len(), binary.len())
    })?;
    for (t, (idx, table, label)) in unary.iter().zip(UNARY_2) {
        ensure(t.indices() == idx && t.truth_table() == table, || {
            format!("unary {:?}: {:?} != {table:?}", t.indices(), t.truth_table())
        })?;
        let got = classify_unary2(t).unwrap().name();
        ensure(got == label, || format!("unary {idx:?} labelled {got:?}, expected {label:?}"))?;
    }
    for (t, (idx, table, label)) in binary.iter().zip(BINARY_2) {
        ensure(t.indices() == idx && t.truth_table() == table, || {
            format!("binary {:?}: {:?} != {table:?}", t.indices(), t.truth_table())
        })?;
        let got = classify_binary2(t).unwrap().legacy_label();
        ensure(got == label, || format!("binary {idx:?} labelled {got:?}, expected {label:?}"))?;
    }
    let names: HashSet<&str> = Connective::ALL.iter().map(|c| c.name()).collect();
    ensure(names.len() == 16, || "connective names are not unique".into())?;
    let elapsed = start.elapsed();
    ensure(elapsed < AC1_LIMIT, || format!("took {elapsed:?}"))?;
    Ok(format!("4 unary + 16 binary tables and labels exact ({elapsed:?})"))
}

fn ac2() -> Outcome {
    let start = Instant::now();
    let b = DEFAULT_ENUMERATION_BUDGET;
    let n3 = Arity::new(3).unwrap();
    let n4 = Arity::new(4).unwrap();
    let u3: HashSet<Vec<u32>> = enumerate_unary(n3, b).unwrap().map(|t| t.truth_table()).collect();
    let b3: HashSet<Vec<u32>> = enumerate_binary(n3, b).unwrap().map(|t| t.truth_table()).collect();
    let u4: HashSet<Vec<u32>> = enumerate_unary(n4, b).unwrap().map(|t| t.truth_table()).collect();
    let counts = (u3.len(), b3.len(), u4.len());
    ensure(counts == (27, 19683, 256), || format!("distinct counts {counts:?}"))?;
    let elapsed = start.elapsed();
    ensure(elapsed < AC2_LIMIT, || format!("took {elapsed:?}"))?;
    Ok(format!("27 / 19683 / 256 distinct tables ({elapsed:?})"))
}

/// Seeded uniform formulas with 2 <= n <= 12 and k in {2, 3, 4}.
fn small_corpus() -> Vec<Formula> {
    let mut rng = ChaCha8Rng::seed_from_u64(0xac3);
    let mut out = Vec::new();
    while out.len() < 1200 {
        let k = rng.random_range(2..=4usize);
        let n = rng.random_range(k..=12usize);
        let m = rng.random_range(1..=3 * n);
        out.push(random_kcnf(n, m, k, rng.random()).unwrap());
    }
    out
}

fn all_assignments(n: usize) -> impl Iterator<Item = Assignment> {
    (0u32..1 << n).map(move |mask| Assignment::new((0..n).map(|i| mask >> i & 1 == 1).collect()))
}

fn ac3(corpus: &[Formula]) -> Outcome {
    let checked: usize = corpus
        .par_iter()
        .map(|f| {
            let mut count = 0usize;
            for a in all_assignments(f.num_vars()) {
                let fold = beta_eval(f, &a).unwrap().value;
                if fold != beta_closed_form(f, &a).unwrap() {
                    return Err(format!("mismatch on {} at {}", write_dimacs(f), a.to_bits()));
                }
                count += 1;
            }
            Ok(count)
        })
        .collect::<Result<Vec<_>, _>>()?
        .into_iter()
        .sum();
    ensure(corpus.len() >= AC3_MIN_FORMULAS, || format!("only {} formulas", corpus.len()))?;
    // the fold is not CNF satisfaction; count how often they differ
    let differ = corpus
        .iter()
        .filter(|f| all_assignments(f.num_vars()).any(|a| {
            beta_eval(f, &a).unwrap().holds() != eval_reference(f, &a).unwrap()
        }))
        .count();
    Ok(format!(
        "{} formulas, {checked} assignments, 0 mismatches ({differ} formulas where the fold differs from CNF semantics)",
        corpus.len()
    ))
}

fn ac4(corpus: &[Formula], extra: &[Instance]) -> Outcome {
    let mut seen = 0;
    for f in corpus.iter().chain(extra.iter().map(|i| &i.formula)) {
        let (k, m, p) = (f.uniform_k().unwrap() as u64, f.num_clauses() as u64, f.negations() as u64);
        let a = modsat::cnf::random_assignment(f.num_vars(), m);
        let ops = beta_eval(f, &a).unwrap().ops;
        let expected = ((k - 1) * m + 2 * (m - 1), m - 1, p);
        ensure((ops.additions, ops.mu_calls, ops.negations) == expected, || {
            format!("ops {ops:?} expected {expected:?} on {}", write_dimacs(f))
        })?;
        ensure(ops == count_model(f).unwrap(), || "count model disagrees".into())?;
        seen += 1;
    }
    let sizes: Vec<usize> = (0..7).map(|i| 1000 << i).collect();
    let bench = bench_eval(3, &sizes, 4).map_err(|e| e.to_string())?;
    let fit = bench.additions_fit.clone().ok_or("no fit")?;
    ensure((fit.exponent - 1.0).abs() <= AC4_EXPONENT_TOL, || {
        format!("additions exponent {}", fit.exponent)
    })?;
    let m = *sizes.last().unwrap();
    let measured = bench.rows.last().unwrap().measured.additions;
    Ok(format!(
        "{seen} instances exact; additions ~ m^{:.6} over m in 1000..{m}; published count at k=3, m={m}: {:.0} vs measured {measured}",
        fit.exponent,
        published_addition_estimate(3, m)
    ))
}

fn lp_corpus() -> Vec<Instance> {
    let mut out = Vec::new();
    for (k, vars, count, seed) in [(2, 20, 100, 21), (3, 20, 100, 31), (4, 12, 50, 41)] {
        let p = CorpusParams { vars, clauses: 0, k, count, seed, ratios: Some(default_ratio_sweep(k)) };
        out.extend(gen_corpus(&p).unwrap());
    }
    out
}

fn ac5(corpus: &[Instance]) -> Outcome {
    let results: Vec<Result<(), String>> = corpus
        .par_iter()
        .map(|inst| {
            let f = &inst.formula;
            let k = f.uniform_k().unwrap() as i64;
            let s = build_relaxation(f, NegationMode::Faithful, BoundMode::K).unwrap();
            ensure(s.constraints.len() == f.num_clauses(), || {
                format!("{}: {} rows for {} clauses", inst.id, s.constraints.len(), f.num_clauses())
            })?;
            for (j, (row, clause)) in s.constraints.iter().zip(f.clauses()).enumerate() {
                let mut expected: BTreeMap<usize, BigRational> = BTreeMap::new();
                for l in clause.literals() {
                    *expected.entry(l.index()).or_insert_with(|| BigRational::from_integer(0.into())) +=
                        BigRational::from_integer(1.into());
                }
                ensure(
                    row.coefficients == expected
                        && row.bound == BigRational::from_integer(k.into())
                        && row.origin == RowOrigin::Clause(j),
                    || format!("{}: row {j} is {row}", inst.id),
                )?;
            }
            let sol = solve_feasibility(&s).unwrap();
            ensure(sol.status == LpStatus::Feasible, || format!("{}: {:?}", inst.id, sol.status))?;
            let point = sol.point.ok_or_else(|| format!("{}: no point", inst.id))?;
            ensure(s.satisfied_by(&point), || format!("{}: point violates system", inst.id))
        })
        .collect();
    let failures: Vec<String> = results.into_iter().filter_map(Result::err).collect();
    ensure(failures.is_empty(), || format!("{} failures, first: {}", failures.len(), failures[0]))?;
    Ok(format!("{} instances: one row per clause, all feasible, all points re-verified exactly", corpus.len()))
}

fn phase_transition_corpus() -> Vec<Instance> {
    let p = CorpusParams { vars: 20, clauses: 0, k: 3, count: AC6_INSTANCES, seed: 2024, ratios: Some(vec![4.27]) };
    let mut corpus = gen_corpus(&p).unwrap();
    corpus.push(Instance::new("canonical-unsat-2cnf", canonical_unsat_2cnf()));
    corpus
}

fn ac6(corpus: &[Instance]) -> Result<(String, String), String> {
    let cfg = PipelineConfig::faithful();
    let opts = DiffOptions { oracle_budget: DEFAULT_NODE_BUDGET };
    let report = diff_run(corpus, &cfg, &opts);
    ensure(report.records.len() == corpus.len(), || "record count".into())?;
    for r in &report.records {
        ensure(r.category == classify(r.claim, r.candidate_verified, r.oracle), || {
            format!("{} misclassified", r.id)
        })?;
        ensure(r.category != Category::PipelineError, || format!("{}: {:?}", r.id, r.error))?;
    }
    let canonical = report.records.last().unwrap();
    ensure(canonical.category == Category::UnsoundSatClaim, || {
        format!("canonical instance classified {:?}", canonical.category)
    })?;
    let agg = &report.aggregates;
    let unsound = agg.count(Category::UnsoundSatClaim);
    ensure(unsound >= 1, || format!("{unsound} unsound sat claims"))?;
    let sat = report.records.iter().filter(|r| r.oracle == modsat::harness::OracleOutcome::Sat).count();
    ensure(sat > 0 && sat < corpus.len(), || format!("corpus not mixed: {sat} sat"))?;
    let json = report.canonical_json();
    let again = diff_run(corpus, &cfg, &opts).canonical_json();
    ensure(json == again, || "reports differ between reruns".into())?;
    let cats: Vec<String> = agg
        .categories
        .iter()
        .filter(|(_, s)| s.count > 0)
        .map(|(name, s)| format!("{name}={}", s.count))
        .collect();
    Ok((
        format!(
            "{} records classified [{}]; status agreement {:.3}, certified {:.3}; byte-identical rerun",
            report.records.len(),
            cats.join(", "),
            agg.agreement.status_rate,
            agg.agreement.certified_rate
        ),
        json,
    ))
}

fn ac7() -> Outcome {
    let start = Instant::now();
    let cfg = PipelineConfig::faithful();
    let r = bench_pipeline(3, &AC7_SIZES, 4.27, 5, 77, &cfg).map_err(|e| e.to_string())?;
    let fit = r.steps_fit.ok_or("no fit")?;
    ensure(fit.exponent <= AC7_MAX_EXPONENT, || format!("steps exponent {}", fit.exponent))?;
    let steps: Vec<String> = r.rows.iter().map(|row| format!("{}", row.mean_steps)).collect();
    let pivots: f64 = r.rows.iter().map(|row| row.mean_pivots).sum();
    // ungated: the affine relaxation needs phase-one pivots
    let affine = PipelineConfig { negation: NegationMode::Affine, bound: BoundMode::KMinus1, ..cfg };
    let ra = bench_pipeline(3, &[10, 20, 40], 4.27, 3, 77, &affine).map_err(|e| e.to_string())?;
    let apiv: Vec<String> = ra.rows.iter().map(|row| format!("{}", row.mean_pivots)).collect();
    let elapsed = start.elapsed();
    ensure(elapsed < AC7_LIMIT, || format!("took {elapsed:?}"))?;
    Ok(format!(
        "faithful steps over n={AC7_SIZES:?}: [{}] (pivots {pivots}), exponent {:.3}; affine k-1 pivots at n=[10,20,40]: [{}], steps exponent {:.2} ({elapsed:?})",
        steps.join(", "),
        fit.exponent,
        apiv.join(", "),
        ra.steps_fit.map_or(f64::NAN, |f| f.exponent),
    ))
}

fn ac8() -> Outcome {
    let results: Vec<Result<SatStatus, String>> = (0..AC8_INSTANCES)
        .into_par_iter()
        .map(|seed| {
            let n = 5 + (seed % 16) as usize;
            let (k, ratio) = if seed % 2 == 0 { (2, 1.0) } else { (3, 4.27) };
            let m = ((n as f64) * ratio).round() as usize;
            let f = random_kcnf(n, m, k, 0xac8 + seed).unwrap();
            let a = brute_force_sat(&f).map_err(|e| e.to_string())?;
            let b = dpll_sat(&f, DEFAULT_NODE_BUDGET).map_err(|e| e.to_string())?;
            ensure(a.status == b.status, || format!("seed {seed}: brute {:?} dpll {:?}", a.status, b.status))?;
            for w in [&a.witness, &b.witness].into_iter().flatten() {
                ensure(verify(&f, w).unwrap(), || format!("seed {seed}: witness fails"))?;
            }
            Ok(a.status)
        })
        .collect();
    let statuses = results.into_iter().collect::<Result<Vec<_>, _>>()?;
    let sat = statuses.iter().filter(|&&s| s == SatStatus::Sat).count();
    Ok(format!("{AC8_INSTANCES} instances (n 5..=20, {sat} sat), 0 disagreements, all witnesses verify"))
}

fn ac9(corpora: &[&[Instance]], report_json: &str) -> Outcome {
    let mut count = 0;
    for inst in corpora.iter().flat_map(|c| c.iter()) {
        let text = write_dimacs(&inst.formula);
        let back = parse_dimacs(&text).map_err(|e| format!("{}: {e}", inst.id))?;
        ensure(back == inst.formula && write_dimacs(&back) == text, || {
            format!("{}: round trip changed the formula", inst.id)
        })?;
        count += 1;
    }
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let files: Vec<Instance> = corpora[0].to_vec();
    write_corpus(dir.path(), &files).map_err(|e| e.to_string())?;
    let loaded = load_corpus(dir.path()).map_err(|e| e.to_string())?;
    ensure(loaded == files, || "corpus changed through files".into())?;

    let p = CorpusParams { vars: 20, clauses: 0, k: 3, count: AC6_INSTANCES, seed: 2024, ratios: Some(vec![4.27]) };
    ensure(gen_corpus(&p).unwrap() == corpora[1][..AC6_INSTANCES], || "generator not deterministic".into())?;
    let rerun = diff_run(corpora[1], &PipelineConfig::faithful(), &DiffOptions::default()).canonical_json();
    ensure(rerun == report_json, || "diff report differs".into())?;
    let b1 = bench_eval(3, &[100, 200, 400], 9).unwrap().canonical_json();
    let b2 = bench_eval(3, &[100, 200, 400], 9).unwrap().canonical_json();
    ensure(b1 == b2, || "bench report differs".into())?;
    let max = PipelineConfig { objective: Objective::MaximizeSum, ..PipelineConfig::faithful() };
    let small = &corpora[1][..20];
    ensure(
        diff_run(small, &max, &DiffOptions::default()).canonical_json()
            == diff_run(small, &max, &DiffOptions::default()).canonical_json(),
        || "objective run differs".into(),
    )?;
    Ok(format!("{count} formulas round-trip; corpus files, diff and bench reports byte-identical on rerun"))
}

fn main() -> ExitCode {
    let mut failed = 0;
    let mut line = |id: &str, title: &str, r: Outcome| {
        match r {
            Ok(detail) => println!("[PASS] {id} {title}: {detail}"),
            Err(detail) => {
                failed += 1;
                println!("[FAIL] {id} {title}: {detail}");
            }
        }
    };

    line("AC1", "truth-table fidelity", ac1());
    line("AC2", "table cardinality", ac2());
    let small = small_corpus();
    line("AC3", "evaluator equivalence", ac3(&small));
    let lp = lp_corpus();
    let pt = phase_transition_corpus();
    line("AC4", "operation accounting", ac4(&small, &pt[..AC6_INSTANCES]));
    line("AC5", "LP faithfulness", ac5(&lp));
    let (r6, json) = match ac6(&pt) {
        Ok((detail, json)) => (Ok(detail), json),
        Err(e) => (Err(e), String::new()),
    };
    line("AC6", "pipeline refutation", r6);
    line("AC7", "polynomial step counts", ac7());
    line("AC8", "oracle integrity", ac8());
    line("AC9", "round trip and determinism", ac9(&[&lp, &pt], &json));

    println!("acceptance: {} of 9 criteria passed", 9 - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
