//! CNF instance model, DIMACS reading and writing, truth-value encodings and a
//! seeded random k-CNF generator.

use std::collections::HashSet;
use std::fmt;

use rand::seq::index;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

use crate::mvlogic::{Arity, LogicValue};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CnfError {
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("variable index must be at least 1")]
    ZeroVariable,
    #[error("clause has no literals")]
    EmptyClause,
    #[error("literal {0} appears twice in one clause")]
    DuplicateLiteral(Literal),
    #[error("literal {lit} exceeds variable count {num_vars}")]
    VariableOutOfRange { lit: Literal, num_vars: usize },
    #[error("assignment has {got} values, formula has {expected} variables")]
    LengthMismatch { expected: usize, got: usize },
    #[error("clause width {k} exceeds variable count {num_vars}")]
    WidthTooLarge { k: usize, num_vars: usize },
    #[error("invalid assignment string: {0}")]
    BadAssignment(String),
}

fn parse_err(line: usize, msg: impl Into<String>) -> CnfError {
    CnfError::Parse { line, msg: msg.into() }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Literal {
    var: u32,
    negated: bool,
}

impl Literal {
    pub fn new(var: u32, negated: bool) -> Result<Self, CnfError> {
        if var == 0 {
            return Err(CnfError::ZeroVariable);
        }
        Ok(Literal { var, negated })
    }

    pub fn positive(var: u32) -> Result<Self, CnfError> {
        Self::new(var, false)
    }

    pub fn negative(var: u32) -> Result<Self, CnfError> {
        Self::new(var, true)
    }

    /// From a signed DIMACS integer.
    pub fn from_dimacs(lit: i64) -> Result<Self, CnfError> {
        let var = u32::try_from(lit.unsigned_abs()).map_err(|_| CnfError::ZeroVariable)?;
        Self::new(var, lit < 0)
    }

    pub fn to_dimacs(self) -> i64 {
        if self.negated {
            -i64::from(self.var)
        } else {
            i64::from(self.var)
        }
    }

    /// 1-based variable id.
    #[inline]
    pub fn var(self) -> u32 {
        self.var
    }

    /// 0-based variable index.
    #[inline]
    pub fn index(self) -> usize {
        self.var as usize - 1
    }

    #[inline]
    pub fn is_negated(self) -> bool {
        self.negated
    }

    /// Whether the literal is satisfied when its variable takes `value`.
    #[inline]
    pub fn satisfied_by(self, value: bool) -> bool {
        value != self.negated
    }
}

impl fmt::Display for Literal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_dimacs())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
#[serde(transparent)]
pub struct Clause {
    literals: Vec<Literal>,
}

impl Clause {
    pub fn new(literals: Vec<Literal>) -> Result<Self, CnfError> {
        if literals.is_empty() {
            return Err(CnfError::EmptyClause);
        }
        let mut seen = HashSet::with_capacity(literals.len());
        for &l in &literals {
            if !seen.insert(l) {
                return Err(CnfError::DuplicateLiteral(l));
            }
        }
        Ok(Clause { literals })
    }

    pub fn from_dimacs(lits: &[i64]) -> Result<Self, CnfError> {
        let lits = lits.iter().map(|&l| Literal::from_dimacs(l)).collect::<Result<_, _>>()?;
        Self::new(lits)
    }

    pub fn literals(&self) -> &[Literal] {
        &self.literals
    }

    pub fn width(&self) -> usize {
        self.literals.len()
    }

    pub fn negations(&self) -> usize {
        self.literals.iter().filter(|l| l.negated).count()
    }

    /// True iff some literal is satisfied. Panics if a variable is out of range.
    pub fn satisfied_by(&self, values: &[bool]) -> bool {
        self.literals.iter().any(|l| l.satisfied_by(values[l.index()]))
    }
}

/// A CNF formula over variables `1..=num_vars`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct Formula {
    num_vars: usize,
    clauses: Vec<Clause>,
    uniform_k: Option<usize>,
}

impl Formula {
    pub fn new(num_vars: usize, clauses: Vec<Clause>) -> Result<Self, CnfError> {
        for c in &clauses {
            for &lit in c.literals() {
                if lit.var as usize > num_vars {
                    return Err(CnfError::VariableOutOfRange { lit, num_vars });
                }
            }
        }
        let uniform_k = match clauses.split_first() {
            Some((first, rest)) if rest.iter().all(|c| c.width() == first.width()) => {
                Some(first.width())
            }
            _ => None,
        };
        Ok(Formula { num_vars, clauses, uniform_k })
    }

    /// Convenience constructor from signed DIMACS literals.
    pub fn from_dimacs_clauses(num_vars: usize, clauses: &[&[i64]]) -> Result<Self, CnfError> {
        let clauses = clauses.iter().map(|c| Clause::from_dimacs(c)).collect::<Result<_, _>>()?;
        Self::new(num_vars, clauses)
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    pub fn num_clauses(&self) -> usize {
        self.clauses.len()
    }

    pub fn clauses(&self) -> &[Clause] {
        &self.clauses
    }

    /// Shared clause width, or `None` for mixed widths and the empty formula.
    pub fn uniform_k(&self) -> Option<usize> {
        self.uniform_k
    }

    /// Number of negated literal occurrences.
    pub fn negations(&self) -> usize {
        self.clauses.iter().map(Clause::negations).sum()
    }

    pub fn literal_occurrences(&self) -> usize {
        self.clauses.iter().map(Clause::width).sum()
    }

    /// Copy without the clause at `idx`.
    pub fn without_clause(&self, idx: usize) -> Formula {
        let mut clauses = self.clauses.clone();
        clauses.remove(idx);
        Formula::new(self.num_vars, clauses).expect("subset of a valid formula")
    }
}

/// Truth values of variables `1..=n`, conventional booleans.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
#[serde(transparent)]
pub struct Assignment {
    values: Vec<bool>,
}

impl Assignment {
    pub fn new(values: Vec<bool>) -> Self {
        Assignment { values }
    }

    pub fn all(num_vars: usize, value: bool) -> Self {
        Assignment { values: vec![value; num_vars] }
    }

    /// Parses strings like `"1011"`, one character per variable (`1` = true).
    pub fn parse_bits(s: &str) -> Result<Self, CnfError> {
        s.trim()
            .chars()
            .map(|c| match c {
                '1' | 'T' | 't' => Ok(true),
                '0' | 'F' | 'f' => Ok(false),
                other => Err(CnfError::BadAssignment(format!("unexpected character {other:?}"))),
            })
            .collect::<Result<Vec<_>, _>>()
            .map(Assignment::new)
    }

    pub fn to_bits(&self) -> String {
        self.values.iter().map(|&b| if b { '1' } else { '0' }).collect()
    }

    pub fn values(&self) -> &[bool] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Value of 1-based variable `var`.
    pub fn get(&self, var: u32) -> Option<bool> {
        self.values.get((var as usize).checked_sub(1)?).copied()
    }
}

/// How booleans map to two-valued logic values.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum TruthConvention {
    /// `true -> 0`, `false -> 1`.
    ZeroTrue,
    /// `true -> 1`, `false -> 0`.
    Conventional,
}

impl TruthConvention {
    #[inline]
    pub fn encode_bool(self, b: bool) -> u32 {
        match self {
            TruthConvention::ZeroTrue => u32::from(!b),
            TruthConvention::Conventional => u32::from(b),
        }
    }

    #[inline]
    pub fn decode_value(self, v: u32) -> bool {
        match self {
            TruthConvention::ZeroTrue => v == 0,
            TruthConvention::Conventional => v == 1,
        }
    }
}

pub fn encode(a: &Assignment, c: TruthConvention) -> Vec<LogicValue> {
    a.values
        .iter()
        .map(|&b| LogicValue::new(c.encode_bool(b), Arity::BINARY).expect("0 or 1"))
        .collect()
}

pub fn decode(values: &[LogicValue], c: TruthConvention) -> Assignment {
    Assignment::new(values.iter().map(|v| c.decode_value(v.value())).collect())
}

/// Standard CNF semantics: every clause has a satisfied literal.
pub fn eval_reference(f: &Formula, a: &Assignment) -> Result<bool, CnfError> {
    if a.len() != f.num_vars {
        return Err(CnfError::LengthMismatch { expected: f.num_vars, got: a.len() });
    }
    Ok(f.clauses.iter().all(|c| c.satisfied_by(&a.values)))
}

/// Parses DIMACS CNF. Clauses may span lines; a `%` line ends the input.
pub fn parse_dimacs(text: &str) -> Result<Formula, CnfError> {
    let mut header: Option<(usize, usize, usize)> = None;
    let mut clauses = Vec::new();
    let mut current: Vec<Literal> = Vec::new();
    let mut clause_line = 0;
    let mut last_line = 0;

    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        last_line = line_no;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('c') {
            continue;
        }
        if line.starts_with('%') {
            break;
        }
        if line.starts_with('p') {
            if header.is_some() {
                return Err(parse_err(line_no, "duplicate problem line"));
            }
            let parts: Vec<&str> = line.split_whitespace().collect();
            if parts.len() != 4 || parts[0] != "p" || parts[1] != "cnf" {
                return Err(parse_err(line_no, format!("malformed problem line {line:?}")));
            }
            let vars = parts[2]
                .parse()
                .map_err(|_| parse_err(line_no, format!("bad variable count {:?}", parts[2])))?;
            let count = parts[3]
                .parse()
                .map_err(|_| parse_err(line_no, format!("bad clause count {:?}", parts[3])))?;
            header = Some((vars, count, line_no));
            continue;
        }
        let Some((num_vars, _, _)) = header else {
            return Err(parse_err(line_no, "clause data before problem line"));
        };
        for tok in line.split_whitespace() {
            let v: i64 = tok
                .parse()
                .map_err(|_| parse_err(line_no, format!("bad literal {tok:?}")))?;
            if v == 0 {
                if current.is_empty() {
                    return Err(parse_err(line_no, "empty clause"));
                }
                let clause = Clause::new(std::mem::take(&mut current))
                    .map_err(|e| parse_err(clause_line, e.to_string()))?;
                clauses.push(clause);
                continue;
            }
            if v.unsigned_abs() > num_vars as u64 {
                return Err(parse_err(
                    line_no,
                    format!("variable {} exceeds declared count {num_vars}", v.unsigned_abs()),
                ));
            }
            if current.is_empty() {
                clause_line = line_no;
            }
            current.push(Literal::from_dimacs(v).map_err(|e| parse_err(line_no, e.to_string()))?);
        }
    }

    let Some((num_vars, declared, header_line)) = header else {
        return Err(parse_err(last_line.max(1), "missing problem line"));
    };
    if !current.is_empty() {
        // unterminated final clause, common in the wild
        let clause = Clause::new(current).map_err(|e| parse_err(clause_line, e.to_string()))?;
        clauses.push(clause);
    }
    if clauses.len() != declared {
        return Err(parse_err(
            header_line,
            format!("declared {declared} clauses, found {}", clauses.len()),
        ));
    }
    Formula::new(num_vars, clauses).map_err(|e| parse_err(header_line, e.to_string()))
}

/// Canonical DIMACS: problem line, then one zero-terminated clause per line.
pub fn write_dimacs(f: &Formula) -> String {
    use std::fmt::Write;
    let mut out = format!("p cnf {} {}\n", f.num_vars, f.clauses.len());
    for c in &f.clauses {
        for l in c.literals() {
            write!(out, "{l} ").unwrap();
        }
        out.push_str("0\n");
    }
    out
}

/// Uniform random k-CNF: each clause draws `k` distinct variables and a fair
/// polarity for each. Deterministic in `seed`.
pub fn random_kcnf(
    num_vars: usize,
    num_clauses: usize,
    k: usize,
    seed: u64,
) -> Result<Formula, CnfError> {
    if k > num_vars {
        return Err(CnfError::WidthTooLarge { k, num_vars });
    }
    if k == 0 && num_clauses > 0 {
        return Err(CnfError::EmptyClause);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut clauses = Vec::with_capacity(num_clauses);
    for _ in 0..num_clauses {
        let mut vars = index::sample(&mut rng, num_vars, k).into_vec();
        vars.sort_unstable();
        let lits = vars
            .into_iter()
            .map(|v| Literal::new(v as u32 + 1, rng.random_bool(0.5)))
            .collect::<Result<Vec<_>, _>>()?;
        clauses.push(Clause::new(lits)?);
    }
    Formula::new(num_vars, clauses)
}

/// Uniform random assignment, deterministic in `seed`.
pub fn random_assignment(num_vars: usize, seed: u64) -> Assignment {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Assignment::new((0..num_vars).map(|_| rng.random_bool(0.5)).collect())
}
