//! Clause-sum evaluation of uniform k-CNF through right-nested applications of
//! the [`ksat_mu`] table, with exact operation accounting.
//!
//! Literals are encoded with `true -> 0`. A clause sum of `0` therefore means
//! every literal in the clause holds, and the fold yields `0` iff some clause
//! sum is `0`. That is *not* CNF satisfaction, and [`beta_eval`] disagrees with
//! [`eval_reference`](crate::cnf::eval_reference) on ordinary satisfiable
//! instances.

use serde::Serialize;
use thiserror::Error;

use crate::cnf::{Assignment, Clause, Formula, TruthConvention};
use crate::mvlogic::{gen_g_int, ksat_mu, Arity, BinaryTable, LogicError, LogicValue};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EvalError {
    #[error("formula has mixed clause widths")]
    NonUniform,
    #[error("formula has no clauses")]
    NoClauses,
    #[error("clause width {0} is below 2")]
    WidthTooSmall(usize),
    #[error("assignment does not cover variable {0}")]
    Uncovered(u32),
    #[error("assignment has {got} values, formula has {expected} variables")]
    LengthMismatch { expected: usize, got: usize },
    #[error(transparent)]
    Logic(#[from] LogicError),
}

/// Work performed by one evaluation.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize)]
pub struct OpCount {
    pub additions: u64,
    pub mu_calls: u64,
    pub negations: u64,
}

impl std::ops::AddAssign for OpCount {
    fn add_assign(&mut self, rhs: OpCount) {
        self.additions += rhs.additions;
        self.mu_calls += rhs.mu_calls;
        self.negations += rhs.negations;
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct BetaResult {
    /// `0` is true, `1` is false.
    pub value: LogicValue,
    pub ops: OpCount,
}

impl BetaResult {
    /// Value under conventional booleans.
    pub fn holds(&self) -> bool {
        self.value.value() == 0
    }
}

/// Sum of the encoded literal values of `c`. Negated literals go through the
/// two-valued complement first, one negation each.
pub fn clause_sum(c: &Clause, a: &Assignment) -> Result<(u32, OpCount), EvalError> {
    let mut ops = OpCount::default();
    let mut sum: Option<u32> = None;
    for lit in c.literals() {
        let x = a.get(lit.var()).ok_or(EvalError::Uncovered(lit.var()))?;
        let mut v = TruthConvention::ZeroTrue.encode_bool(x);
        if lit.is_negated() {
            v = gen_g_int(Arity::BINARY, 1, i64::from(v)).value();
            ops.negations += 1;
        }
        sum = Some(match sum {
            None => v,
            Some(s) => {
                ops.additions += 1;
                s + v
            }
        });
    }
    Ok((sum.unwrap_or(0), ops))
}

fn uniform_width(f: &Formula) -> Result<usize, EvalError> {
    if f.num_clauses() == 0 {
        return Err(EvalError::NoClauses);
    }
    let k = f.uniform_k().ok_or(EvalError::NonUniform)?;
    if k < 2 {
        return Err(EvalError::WidthTooSmall(k));
    }
    Ok(k)
}

fn check_len(f: &Formula, a: &Assignment) -> Result<(), EvalError> {
    if a.len() != f.num_vars() {
        return Err(EvalError::LengthMismatch { expected: f.num_vars(), got: a.len() });
    }
    Ok(())
}

/// A table lookup costs two additions (row offset and column offset).
const ADDITIONS_PER_LOOKUP: u64 = 2;

fn apply_mu(mu: &BinaryTable, a: u32, b: u32, ops: &mut OpCount) -> Result<u32, EvalError> {
    ops.mu_calls += 1;
    ops.additions += ADDITIONS_PER_LOOKUP;
    Ok(mu.apply_int(a, b)?.value())
}

/// `mu(s_1, mu(s_2, .. mu(s_{m-1}, s_m)))` over the clause sums of `f`.
pub fn beta_eval(f: &Formula, a: &Assignment) -> Result<BetaResult, EvalError> {
    let k = uniform_width(f)?;
    check_len(f, a)?;
    let mu = ksat_mu(k)?;
    let mut ops = OpCount::default();
    let mut sums = Vec::with_capacity(f.num_clauses());
    for c in f.clauses() {
        let (s, o) = clause_sum(c, a)?;
        ops += o;
        sums.push(s);
    }
    let (&last, rest) = sums.split_last().expect("at least one clause");
    let value = if rest.is_empty() {
        u32::from(last != 0)
    } else {
        let mut acc = last;
        for &s in rest.iter().rev() {
            acc = apply_mu(&mu, s, acc, &mut ops)?;
        }
        acc
    };
    Ok(BetaResult { value: LogicValue::new(value, Arity::BINARY)?, ops })
}

/// `0` iff some clause has every literal satisfied, else `1`. Computed directly
/// from conventional literal semantics, without sums or tables.
pub fn beta_closed_form(f: &Formula, a: &Assignment) -> Result<LogicValue, EvalError> {
    uniform_width(f)?;
    check_len(f, a)?;
    let values = a.values();
    let some_clause_all_true =
        f.clauses().iter().any(|c| c.literals().iter().all(|l| l.satisfied_by(values[l.index()])));
    Ok(LogicValue::new(u32::from(!some_clause_all_true), Arity::BINARY)?)
}

/// Predicted work of [`beta_eval`] on `f`: `(k-1)m` additions for clause sums,
/// `2(m-1)` for table lookups, `m-1` table applications and one negation per
/// negated literal occurrence.
pub fn count_model(f: &Formula) -> Result<OpCount, EvalError> {
    let k = uniform_width(f)? as u64;
    let m = f.num_clauses() as u64;
    Ok(OpCount {
        additions: (k - 1) * m + ADDITIONS_PER_LOOKUP * (m - 1),
        mu_calls: m - 1,
        negations: f.negations() as u64,
    })
}

/// Summation count as tabulated in the original linear-time argument,
/// `t+ (k-1)m/k + 2 t+ (m/k - 1)`, for comparison with [`count_model`].
pub fn published_addition_estimate(k: usize, m: usize) -> f64 {
    let (k, m) = (k as f64, m as f64);
    (k - 1.0) * m / k + 2.0 * (m / k - 1.0)
}
