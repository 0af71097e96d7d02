//! Clause-sum relaxation systems and a dense two-phase simplex.
//!
//! Systems are always of the form `A x <= b, x >= 0` with an optional objective
//! to maximize. The solver runs over exact rationals by default; an `f64`
//! instantiation exists for cross-checking.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::ToPrimitive;
use serde::{Serialize, Serializer};
use thiserror::Error;

use crate::cnf::Formula;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LpError {
    #[error("formula has mixed clause widths")]
    NonUniform,
    #[error("formula has no clauses")]
    NoClauses,
    #[error("constraint {row} references variable {var}, system has {num_vars}")]
    VariableOutOfRange { row: usize, var: usize, num_vars: usize },
    #[error("objective has {got} coefficients, system has {num_vars} variables")]
    ObjectiveLength { got: usize, num_vars: usize },
    #[error("system has {got} clause rows, formula has {expected} clauses")]
    ClauseRows { expected: usize, got: usize },
}

/// Number type the simplex runs over.
pub trait LpScalar:
    Clone
    + fmt::Debug
    + fmt::Display
    + PartialEq
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
{
    fn zero() -> Self;
    fn one() -> Self;
    fn from_rational(r: &BigRational) -> Self;
    fn is_zero(&self) -> bool;
    fn is_positive(&self) -> bool;
    fn is_negative(&self) -> bool;
    fn to_f64(&self) -> f64;
    /// Snap values that are zero up to tolerance to exact zero.
    fn clean(self) -> Self {
        self
    }
}

impl LpScalar for BigRational {
    fn zero() -> Self {
        num_traits::Zero::zero()
    }
    fn one() -> Self {
        num_traits::One::one()
    }
    fn from_rational(r: &BigRational) -> Self {
        r.clone()
    }
    fn is_zero(&self) -> bool {
        num_traits::Zero::is_zero(self)
    }
    fn is_positive(&self) -> bool {
        num_traits::Signed::is_positive(self)
    }
    fn is_negative(&self) -> bool {
        num_traits::Signed::is_negative(self)
    }
    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }
}

/// Tolerance of the floating-point instantiation.
pub const FLOAT_EPS: f64 = 1e-9;

impl LpScalar for f64 {
    fn zero() -> Self {
        0.0
    }
    fn one() -> Self {
        1.0
    }
    fn from_rational(r: &BigRational) -> Self {
        ToPrimitive::to_f64(r).unwrap_or(f64::NAN)
    }
    fn is_zero(&self) -> bool {
        self.abs() <= FLOAT_EPS
    }
    fn is_positive(&self) -> bool {
        *self > FLOAT_EPS
    }
    fn is_negative(&self) -> bool {
        *self < -FLOAT_EPS
    }
    fn to_f64(&self) -> f64 {
        *self
    }
    fn clean(self) -> Self {
        if self.abs() <= FLOAT_EPS {
            0.0
        } else {
            self
        }
    }
}

pub fn rational(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

fn ser_rational<S: Serializer>(r: &BigRational, s: S) -> Result<S::Ok, S::Error> {
    s.collect_str(r)
}

fn ser_coefficients<S: Serializer>(
    m: &BTreeMap<usize, BigRational>,
    s: S,
) -> Result<S::Ok, S::Error> {
    s.collect_map(m.iter().map(|(k, v)| (k.to_string(), v.to_string())))
}

fn ser_opt_vec<T: fmt::Display, S: Serializer>(v: &Option<Vec<T>>, s: S) -> Result<S::Ok, S::Error> {
    match v {
        None => s.serialize_none(),
        Some(v) => s.collect_seq(v.iter().map(ToString::to_string)),
    }
}

fn ser_opt<T: fmt::Display, S: Serializer>(v: &Option<T>, s: S) -> Result<S::Ok, S::Error> {
    match v {
        None => s.serialize_none(),
        Some(v) => s.collect_str(v),
    }
}

/// Where a row of a relaxation came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case", tag = "kind", content = "index")]
pub enum RowOrigin {
    Clause(usize),
    UpperBound(usize),
    Other,
}

/// `sum coefficients[v] * x_v <= bound`. For clause rows, `offset` is the
/// constant that was moved into the bound, so the clause expression reads
/// `offset + sum coefficients[v] * x_v`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LinearConstraint {
    #[serde(serialize_with = "ser_coefficients")]
    pub coefficients: BTreeMap<usize, BigRational>,
    #[serde(serialize_with = "ser_rational")]
    pub bound: BigRational,
    #[serde(serialize_with = "ser_rational")]
    pub offset: BigRational,
    pub origin: RowOrigin,
}

impl LinearConstraint {
    pub fn new(coefficients: BTreeMap<usize, BigRational>, bound: BigRational) -> Self {
        LinearConstraint { coefficients, bound, offset: BigRational::zero(), origin: RowOrigin::Other }
    }

    /// Builds from `(var, coefficient)` integer pairs.
    pub fn from_ints(terms: &[(usize, i64)], bound: i64) -> Self {
        let mut coefficients = BTreeMap::new();
        for &(v, c) in terms {
            *coefficients.entry(v).or_insert_with(BigRational::zero) += rational(c);
        }
        coefficients.retain(|_, c: &mut BigRational| !c.is_zero());
        Self::new(coefficients, rational(bound))
    }

    pub fn lhs(&self, point: &[BigRational]) -> BigRational {
        self.coefficients.iter().map(|(&v, c)| c * &point[v]).sum()
    }
}

impl fmt::Display for LinearConstraint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coefficients.is_empty() {
            f.write_str("0")?;
        }
        for (i, (v, c)) in self.coefficients.iter().enumerate() {
            let neg = c.is_negative();
            let mag = num_traits::Signed::abs(c);
            match (i, neg) {
                (0, true) => f.write_str("-")?,
                (0, false) => {}
                (_, true) => f.write_str(" - ")?,
                (_, false) => f.write_str(" + ")?,
            }
            if mag != <BigRational as LpScalar>::one() {
                write!(f, "{mag} ")?;
            }
            write!(f, "X{}", v + 1)?;
        }
        write!(f, " <= {}", self.bound)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LpSystem {
    pub num_vars: usize,
    pub constraints: Vec<LinearConstraint>,
    /// Coefficients to maximize, one per variable.
    #[serde(serialize_with = "ser_opt_vec")]
    pub objective: Option<Vec<BigRational>>,
}

impl LpSystem {
    pub fn new(num_vars: usize, constraints: Vec<LinearConstraint>) -> Self {
        LpSystem { num_vars, constraints, objective: None }
    }

    pub fn with_objective(mut self, objective: Vec<BigRational>) -> Self {
        self.objective = Some(objective);
        self
    }

    pub fn validate(&self) -> Result<(), LpError> {
        for (row, c) in self.constraints.iter().enumerate() {
            if let Some((&var, _)) = c.coefficients.iter().find(|(&v, _)| v >= self.num_vars) {
                return Err(LpError::VariableOutOfRange { row, var, num_vars: self.num_vars });
            }
        }
        if let Some(obj) = &self.objective {
            if obj.len() != self.num_vars {
                return Err(LpError::ObjectiveLength { got: obj.len(), num_vars: self.num_vars });
            }
        }
        Ok(())
    }

    pub fn clause_rows(&self) -> impl Iterator<Item = (usize, &LinearConstraint)> {
        self.constraints.iter().filter_map(|c| match c.origin {
            RowOrigin::Clause(j) => Some((j, c)),
            _ => None,
        })
    }

    /// Exact check of every row and of nonnegativity.
    pub fn satisfied_by(&self, point: &[BigRational]) -> bool {
        point.len() == self.num_vars
            && point.iter().all(|x| !x.is_negative())
            && self.constraints.iter().all(|c| c.lhs(point) <= c.bound)
    }

    /// Largest violation of any row or nonnegativity bound; `0` when feasible.
    pub fn max_violation_f64(&self, point: &[f64]) -> f64 {
        let neg = point.iter().map(|&x| (-x).max(0.0)).fold(0.0, f64::max);
        self.constraints
            .iter()
            .map(|c| {
                let lhs: f64 =
                    c.coefficients.iter().map(|(&v, a)| LpScalar::to_f64(a) * point[v]).sum();
                (lhs - LpScalar::to_f64(&c.bound)).max(0.0)
            })
            .fold(neg, f64::max)
    }

    /// One constraint per line.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        if let Some(obj) = &self.objective {
            let terms: Vec<String> = obj
                .iter()
                .enumerate()
                .filter(|(_, c)| !c.is_zero())
                .map(|(v, c)| format!("{c} X{}", v + 1))
                .collect();
            out.push_str(&format!("maximize {}\n", terms.join(" + ")));
        }
        for c in &self.constraints {
            out.push_str(&c.to_string());
            out.push('\n');
        }
        if self.num_vars > 0 {
            out.push_str(&format!("X1..X{} >= 0\n", self.num_vars));
        }
        out
    }
}

/// How negated literals enter a clause row.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum NegationMode {
    /// Polarity is dropped: every literal contributes `X_v`.
    #[default]
    Faithful,
    /// A negated literal contributes `1 - X_v`; variables get `X_v <= 1`.
    Affine,
}

/// Right-hand side of each clause row.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundMode {
    #[default]
    K,
    KMinus1,
}

/// One row per clause bounding its literal sum, plus unit boxes in affine mode.
pub fn build_relaxation(
    f: &Formula,
    negation: NegationMode,
    bound_mode: BoundMode,
) -> Result<LpSystem, LpError> {
    if f.num_clauses() == 0 {
        return Err(LpError::NoClauses);
    }
    let k = f.uniform_k().ok_or(LpError::NonUniform)? as i64;
    let bound = match bound_mode {
        BoundMode::K => k,
        BoundMode::KMinus1 => k - 1,
    };
    let mut constraints = Vec::with_capacity(f.num_clauses() + f.num_vars());
    for (j, clause) in f.clauses().iter().enumerate() {
        let mut terms = Vec::with_capacity(clause.width());
        let mut offset = 0i64;
        for lit in clause.literals() {
            match (negation, lit.is_negated()) {
                (NegationMode::Affine, true) => {
                    offset += 1;
                    terms.push((lit.index(), -1));
                }
                _ => terms.push((lit.index(), 1)),
            }
        }
        let mut row = LinearConstraint::from_ints(&terms, bound - offset);
        row.offset = rational(offset);
        row.origin = RowOrigin::Clause(j);
        constraints.push(row);
    }
    if negation == NegationMode::Affine {
        for v in 0..f.num_vars() {
            let mut row = LinearConstraint::from_ints(&[(v, 1)], 1);
            row.origin = RowOrigin::UpperBound(v);
            constraints.push(row);
        }
    }
    Ok(LpSystem::new(f.num_vars(), constraints))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum LpStatus {
    Feasible,
    Infeasible,
    Unbounded,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(bound = "")]
pub struct LpSolution<T: LpScalar = BigRational> {
    pub status: LpStatus,
    /// Basic feasible point (optimal vertex when an objective is present).
    #[serde(serialize_with = "ser_opt_vec")]
    pub point: Option<Vec<T>>,
    #[serde(serialize_with = "ser_opt")]
    pub objective_value: Option<T>,
    /// Optimum of the auxiliary problem when infeasible; always positive.
    #[serde(serialize_with = "ser_opt")]
    pub infeasibility: Option<T>,
    pub pivot_steps: u64,
}

struct Tableau<T> {
    rows: Vec<Vec<T>>,
    basis: Vec<usize>,
    /// reduced costs of a maximization, rhs slot holds minus the objective
    obj: Vec<T>,
    ncols: usize,
    blocked_from: usize,
    pivots: u64,
}

enum Outcome {
    Optimal,
    Unbounded,
}

impl<T: LpScalar> Tableau<T> {
    fn rhs(&self, i: usize) -> &T {
        &self.rows[i][self.ncols]
    }

    fn set_objective(&mut self, costs: &[T]) {
        let mut obj = vec![T::zero(); self.ncols + 1];
        obj[..costs.len()].clone_from_slice(costs);
        for (i, &b) in self.basis.iter().enumerate() {
            if b < costs.len() && !costs[b].is_zero() {
                let cb = costs[b].clone();
                for (o, r) in obj.iter_mut().zip(&self.rows[i]) {
                    if !r.is_zero() {
                        *o = (o.clone() - cb.clone() * r.clone()).clean();
                    }
                }
            }
        }
        self.obj = obj;
    }

    fn pivot(&mut self, r: usize, c: usize) {
        self.pivots += 1;
        let p = self.rows[r][c].clone();
        let nz: Vec<usize> = (0..=self.ncols).filter(|&j| !self.rows[r][j].is_zero()).collect();
        for &j in &nz {
            self.rows[r][j] = (self.rows[r][j].clone() / p.clone()).clean();
        }
        self.rows[r][c] = T::one();
        let pivot_row = std::mem::take(&mut self.rows[r]);
        let eliminate = |row: &mut Vec<T>| {
            let factor = row[c].clone();
            if factor.is_zero() {
                return;
            }
            for &j in &nz {
                row[j] = (row[j].clone() - factor.clone() * pivot_row[j].clone()).clean();
            }
            row[c] = T::zero();
        };
        for (i, row) in self.rows.iter_mut().enumerate() {
            if i != r {
                eliminate(row);
            }
        }
        eliminate(&mut self.obj);
        self.rows[r] = pivot_row;
        self.basis[r] = c;
    }

    /// Bland's rule: lowest-index improving column, ratio ties to lowest basic index.
    fn run(&mut self) -> Outcome {
        loop {
            let Some(col) = (0..self.blocked_from).find(|&j| self.obj[j].is_positive()) else {
                return Outcome::Optimal;
            };
            let mut best: Option<(usize, T)> = None;
            for i in 0..self.rows.len() {
                let a = &self.rows[i][col];
                if !a.is_positive() {
                    continue;
                }
                let ratio = self.rhs(i).clone() / a.clone();
                let better = match &best {
                    None => true,
                    Some((bi, br)) => {
                        let d = ratio.clone() - br.clone();
                        d.is_negative() || (d.is_zero() && self.basis[i] < self.basis[*bi])
                    }
                };
                if better {
                    best = Some((i, ratio));
                }
            }
            match best {
                Some((row, _)) => self.pivot(row, col),
                None => return Outcome::Unbounded,
            }
        }
    }

    fn point(&self, n: usize) -> Vec<T> {
        let mut x = vec![T::zero(); n];
        for (i, &b) in self.basis.iter().enumerate() {
            if b < n {
                x[b] = self.rhs(i).clone();
            }
        }
        x
    }
}

/// Two-phase simplex over `T`. Without an objective the phase-one basic
/// feasible point is returned.
pub fn solve_with<T: LpScalar>(s: &LpSystem) -> Result<LpSolution<T>, LpError> {
    s.validate()?;
    let n = s.num_vars;
    let m = s.constraints.len();
    let negative: Vec<bool> =
        s.constraints.iter().map(|c| T::from_rational(&c.bound).is_negative()).collect();
    let n_art = negative.iter().filter(|&&b| b).count();
    let art_start = n + m;
    let ncols = n + m + n_art;

    let mut rows = Vec::with_capacity(m);
    let mut basis = Vec::with_capacity(m);
    let mut next_art = art_start;
    for (i, c) in s.constraints.iter().enumerate() {
        let mut row = vec![T::zero(); ncols + 1];
        let sign = if negative[i] { -T::one() } else { T::one() };
        for (&v, a) in &c.coefficients {
            row[v] = (sign.clone() * T::from_rational(a)).clean();
        }
        row[n + i] = sign.clone();
        row[ncols] = (sign * T::from_rational(&c.bound)).clean();
        if negative[i] {
            row[next_art] = T::one();
            basis.push(next_art);
            next_art += 1;
        } else {
            basis.push(n + i);
        }
        rows.push(row);
    }

    let mut t = Tableau { rows, basis, obj: Vec::new(), ncols, blocked_from: ncols, pivots: 0 };

    if n_art > 0 {
        let mut costs = vec![T::zero(); ncols];
        for c in costs.iter_mut().skip(art_start) {
            *c = -T::one();
        }
        t.set_objective(&costs);
        // phase one is bounded above by zero
        let _ = t.run();
        let optimum = -t.obj[ncols].clone();
        if optimum.is_negative() {
            return Ok(LpSolution {
                status: LpStatus::Infeasible,
                point: None,
                objective_value: None,
                infeasibility: Some(-optimum),
                pivot_steps: t.pivots,
            });
        }
        // drive zero-valued artificials out of the basis, dropping redundant rows
        let mut i = 0;
        while i < t.rows.len() {
            if t.basis[i] >= art_start {
                match (0..art_start).find(|&j| !t.rows[i][j].is_zero()) {
                    Some(j) => t.pivot(i, j),
                    None => {
                        t.rows.remove(i);
                        t.basis.remove(i);
                        continue;
                    }
                }
            }
            i += 1;
        }
        t.blocked_from = art_start;
    }

    let Some(objective) = &s.objective else {
        return Ok(LpSolution {
            status: LpStatus::Feasible,
            point: Some(t.point(n)),
            objective_value: None,
            infeasibility: None,
            pivot_steps: t.pivots,
        });
    };

    let costs: Vec<T> = objective.iter().map(T::from_rational).collect();
    t.set_objective(&costs);
    match t.run() {
        Outcome::Optimal => Ok(LpSolution {
            status: LpStatus::Feasible,
            point: Some(t.point(n)),
            objective_value: Some(-t.obj[ncols].clone()),
            infeasibility: None,
            pivot_steps: t.pivots,
        }),
        Outcome::Unbounded => Ok(LpSolution {
            status: LpStatus::Unbounded,
            point: None,
            objective_value: None,
            infeasibility: None,
            pivot_steps: t.pivots,
        }),
    }
}

/// Exact rational solve.
pub fn solve_feasibility(s: &LpSystem) -> Result<LpSolution, LpError> {
    solve_with::<BigRational>(s)
}

/// Floating-point solve with tolerance [`FLOAT_EPS`].
pub fn solve_feasibility_f64(s: &LpSystem) -> Result<LpSolution<f64>, LpError> {
    solve_with::<f64>(s)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClauseMax {
    pub clause: usize,
    pub status: LpStatus,
    /// Maximum of the full clause expression, constants included.
    #[serde(serialize_with = "ser_opt")]
    pub maximum: Option<BigRational>,
    pub pivot_steps: u64,
}

/// Maximizes each clause expression separately over the whole system.
pub fn max_clause_decomposition(f: &Formula, s: &LpSystem) -> Result<Vec<ClauseMax>, LpError> {
    let rows: Vec<(usize, &LinearConstraint)> = s.clause_rows().collect();
    if rows.len() != f.num_clauses() {
        return Err(LpError::ClauseRows { expected: f.num_clauses(), got: rows.len() });
    }
    let mut base = s.clone();
    rows.into_iter()
        .map(|(j, row)| {
            let mut obj = vec![BigRational::zero(); s.num_vars];
            for (&v, c) in &row.coefficients {
                obj[v] = c.clone();
            }
            base.objective = Some(obj);
            let sol = solve_feasibility(&base)?;
            Ok(ClauseMax {
                clause: j,
                status: sol.status,
                maximum: sol.objective_value.map(|v| v + &row.offset),
                pivot_steps: sol.pivot_steps,
            })
        })
        .collect()
}
