//! Modular generation function and the unary / binary n-valued logic families
//! built from it.
//!
//! Every table is described by an index set of shifts. A unary table with
//! indices `(i_0, .., i_{n-1})` maps `x` to `(x + i_x) mod n`; a binary table
//! with an `n x n` index matrix maps `(a, b)` to `(a*b + i_{a,b}) mod n`.
//! Value `0` stands for *true* and `1` for *false* when `n = 2`.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::ToPrimitive;
use serde::Serialize;
use thiserror::Error;

/// Default cap on the number of tables an enumeration may yield.
pub const DEFAULT_ENUMERATION_BUDGET: u64 = 1_000_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LogicError {
    #[error("arity must be at least 2, got {0}")]
    InvalidArity(u32),
    #[error("argument {0} is not finite")]
    NonFinite(String),
    #[error("floor of argument ({floor}) outside [0, {n})")]
    OutOfRange { floor: i64, n: u32 },
    #[error("index {index} outside [0, {n})")]
    BadIndex { index: u32, n: u32 },
    #[error("expected {expected} indices, got {got}")]
    BadShape { expected: usize, got: usize },
    #[error("enumeration of {requested} tables exceeds budget {budget}")]
    BudgetExceeded { requested: String, budget: u64 },
    #[error("operation requires arity 2, got {0}")]
    NotBinaryLogic(u32),
    #[error("clause width must be at least 2, got {0}")]
    ClauseWidth(usize),
}

/// Modulo base of a logic system.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(transparent)]
pub struct Arity(u32);

impl Arity {
    pub const BINARY: Arity = Arity(2);

    pub fn new(n: u32) -> Result<Self, LogicError> {
        if n < 2 {
            return Err(LogicError::InvalidArity(n));
        }
        Ok(Arity(n))
    }

    #[inline]
    pub fn get(self) -> u32 {
        self.0
    }
}

impl fmt::Display for Arity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

/// An element of `{0, .., n-1}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct LogicValue {
    v: u32,
    #[serde(skip)]
    arity: Arity,
}

impl LogicValue {
    pub fn new(v: u32, arity: Arity) -> Result<Self, LogicError> {
        if v >= arity.get() {
            return Err(LogicError::BadIndex { index: v, n: arity.get() });
        }
        Ok(LogicValue { v, arity })
    }

    #[inline]
    pub fn value(self) -> u32 {
        self.v
    }

    #[inline]
    pub fn arity(self) -> Arity {
        self.arity
    }
}

impl fmt::Display for LogicValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.v.fmt(f)
    }
}

/// `(floor(a) + k) mod n`.
pub fn gen_g(n: Arity, k: u64, a: f64) -> Result<LogicValue, LogicError> {
    if !a.is_finite() {
        return Err(LogicError::NonFinite(a.to_string()));
    }
    let modulus = n.get();
    // fmod on floats is exact, so huge magnitudes reduce without overflow
    let base = a.floor().rem_euclid(f64::from(modulus)) as u32;
    Ok(shifted(n, base, k))
}

/// [`gen_g`] for an exact rational argument.
pub fn gen_g_exact(n: Arity, k: u64, a: &BigRational) -> LogicValue {
    let base = a.floor().to_integer().mod_floor(&BigInt::from(n.get()));
    shifted(n, base.to_u32().expect("residue fits in u32"), k)
}

/// [`gen_g`] for an integer argument.
pub fn gen_g_int(n: Arity, k: u64, a: i64) -> LogicValue {
    let base = a.rem_euclid(i64::from(n.get())) as u32;
    shifted(n, base, k)
}

fn shifted(n: Arity, base: u32, k: u64) -> LogicValue {
    let modulus = u64::from(n.get());
    let v = (u64::from(base) + k % modulus) % modulus;
    LogicValue { v: v as u32, arity: n }
}

fn floor_in_range(n: Arity, a: f64) -> Result<usize, LogicError> {
    if !a.is_finite() {
        return Err(LogicError::NonFinite(a.to_string()));
    }
    let fl = a.floor();
    if fl < 0.0 || fl >= f64::from(n.get()) {
        let floor = if fl < i64::MIN as f64 {
            i64::MIN
        } else if fl > i64::MAX as f64 {
            i64::MAX
        } else {
            fl as i64
        };
        return Err(LogicError::OutOfRange { floor, n: n.get() });
    }
    Ok(fl as usize)
}

fn check_indices(n: Arity, indices: &[u32], expected: usize) -> Result<(), LogicError> {
    if indices.len() != expected {
        return Err(LogicError::BadShape { expected, got: indices.len() });
    }
    if let Some(&bad) = indices.iter().find(|&&i| i >= n.get()) {
        return Err(LogicError::BadIndex { index: bad, n: n.get() });
    }
    Ok(())
}

/// One-variable function given by a shift per input value.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct UnaryTable {
    arity: Arity,
    indices: Vec<u32>,
}

impl UnaryTable {
    pub fn new(arity: Arity, indices: Vec<u32>) -> Result<Self, LogicError> {
        check_indices(arity, &indices, arity.get() as usize)?;
        Ok(UnaryTable { arity, indices })
    }

    pub fn arity(&self) -> Arity {
        self.arity
    }

    pub fn indices(&self) -> &[u32] {
        &self.indices
    }

    pub fn apply(&self, a: f64) -> Result<LogicValue, LogicError> {
        let row = floor_in_range(self.arity, a)?;
        gen_g(self.arity, u64::from(self.indices[row]), a)
    }

    /// Output for each input value `0..n`.
    pub fn truth_table(&self) -> Vec<u32> {
        (0..self.arity.get())
            .zip(&self.indices)
            .map(|(x, &i)| (x + i) % self.arity.get())
            .collect()
    }
}

/// Two-variable function given by an `n x n` matrix of shifts, stored row-major.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct BinaryTable {
    arity: Arity,
    indices: Vec<u32>,
}

impl BinaryTable {
    /// `indices` is the row-major flattening of the index matrix.
    pub fn new(arity: Arity, indices: Vec<u32>) -> Result<Self, LogicError> {
        let n = arity.get() as usize;
        check_indices(arity, &indices, n * n)?;
        Ok(BinaryTable { arity, indices })
    }

    pub fn from_rows(arity: Arity, rows: &[Vec<u32>]) -> Result<Self, LogicError> {
        let n = arity.get() as usize;
        if rows.len() != n {
            return Err(LogicError::BadShape { expected: n, got: rows.len() });
        }
        if let Some(r) = rows.iter().find(|r| r.len() != n) {
            return Err(LogicError::BadShape { expected: n, got: r.len() });
        }
        Self::new(arity, rows.concat())
    }

    pub fn arity(&self) -> Arity {
        self.arity
    }

    pub fn indices(&self) -> &[u32] {
        &self.indices
    }

    #[inline]
    pub fn index(&self, row: usize, col: usize) -> u32 {
        self.indices[row * self.arity.get() as usize + col]
    }

    pub fn apply(&self, a: f64, b: f64) -> Result<LogicValue, LogicError> {
        let row = floor_in_range(self.arity, a)?;
        let col = floor_in_range(self.arity, b)?;
        gen_g(self.arity, u64::from(self.index(row, col)), a * b)
    }

    /// Integer fast path of [`BinaryTable::apply`].
    pub fn apply_int(&self, a: u32, b: u32) -> Result<LogicValue, LogicError> {
        let n = self.arity.get();
        for x in [a, b] {
            if x >= n {
                return Err(LogicError::OutOfRange { floor: i64::from(x), n });
            }
        }
        let prod = i64::from(a) * i64::from(b);
        Ok(gen_g_int(self.arity, u64::from(self.index(a as usize, b as usize)), prod))
    }

    /// Row-major outputs over all pairs of input values.
    pub fn truth_table(&self) -> Vec<u32> {
        let n = self.arity.get();
        (0..n)
            .flat_map(|a| (0..n).map(move |b| (a, b)))
            .map(|(a, b)| (a * b + self.index(a as usize, b as usize)) % n)
            .collect()
    }
}

/// Pure apply, mirroring [`UnaryTable::apply`].
pub fn apply_unary(t: &UnaryTable, a: f64) -> Result<LogicValue, LogicError> {
    t.apply(a)
}

/// Pure apply, mirroring [`BinaryTable::apply`].
pub fn apply_binary(t: &BinaryTable, a: f64, b: f64) -> Result<LogicValue, LogicError> {
    t.apply(a, b)
}

/// Base-`n` odometer over index sets of fixed length; the last position varies
/// fastest, so sets come out in lexicographic order.
#[derive(Debug, Clone)]
struct Odometer {
    n: u32,
    digits: Vec<u32>,
    done: bool,
}

impl Odometer {
    fn new(n: u32, len: usize) -> Self {
        Odometer { n, digits: vec![0; len], done: false }
    }
}

impl Iterator for Odometer {
    type Item = Vec<u32>;

    fn next(&mut self) -> Option<Vec<u32>> {
        if self.done {
            return None;
        }
        let current = self.digits.clone();
        let mut pos = self.digits.len();
        loop {
            if pos == 0 {
                self.done = true;
                break;
            }
            pos -= 1;
            self.digits[pos] += 1;
            if self.digits[pos] < self.n {
                break;
            }
            self.digits[pos] = 0;
        }
        Some(current)
    }
}

fn family_size(n: u32, len: usize, budget: u64) -> Result<u64, LogicError> {
    let mut total: u64 = 1;
    for _ in 0..len {
        match total.checked_mul(u64::from(n)) {
            Some(t) if t <= budget => total = t,
            _ => {
                return Err(LogicError::BudgetExceeded {
                    requested: format!("{n}^{len}"),
                    budget,
                })
            }
        }
    }
    Ok(total)
}

pub struct UnaryFamily {
    arity: Arity,
    inner: Odometer,
    len: u64,
}

impl Iterator for UnaryFamily {
    type Item = UnaryTable;

    fn next(&mut self) -> Option<UnaryTable> {
        let indices = self.inner.next()?;
        Some(UnaryTable { arity: self.arity, indices })
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        let n = self.len as usize;
        (0, Some(n))
    }
}

impl UnaryFamily {
    /// Total number of tables in the family, `n^n`.
    pub fn total(&self) -> u64 {
        self.len
    }
}

pub struct BinaryFamily {
    arity: Arity,
    inner: Odometer,
    len: u64,
}

impl Iterator for BinaryFamily {
    type Item = BinaryTable;

    fn next(&mut self) -> Option<BinaryTable> {
        let indices = self.inner.next()?;
        Some(BinaryTable { arity: self.arity, indices })
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        (0, Some(self.len as usize))
    }
}

impl BinaryFamily {
    /// Total number of tables in the family, `n^(n^2)`.
    pub fn total(&self) -> u64 {
        self.len
    }
}

/// All `n^n` unary tables in lexicographic index order, starting from all zeros.
pub fn enumerate_unary(n: Arity, budget: u64) -> Result<UnaryFamily, LogicError> {
    let width = n.get() as usize;
    let len = family_size(n.get(), width, budget)?;
    Ok(UnaryFamily { arity: n, inner: Odometer::new(n.get(), width), len })
}

/// All `n^(n^2)` binary tables in lexicographic (row-major) index order.
pub fn enumerate_binary(n: Arity, budget: u64) -> Result<BinaryFamily, LogicError> {
    let width = (n.get() as usize).pow(2);
    let len = family_size(n.get(), width, budget)?;
    Ok(BinaryFamily { arity: n, inner: Odometer::new(n.get(), width), len })
}

/// The four one-variable two-valued functions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum UnaryConnective {
    SelfProjection,
    Antilogy,
    Tautology,
    Complementation,
}

impl UnaryConnective {
    pub const ALL: [UnaryConnective; 4] = [
        UnaryConnective::SelfProjection,
        UnaryConnective::Antilogy,
        UnaryConnective::Tautology,
        UnaryConnective::Complementation,
    ];

    pub fn name(self) -> &'static str {
        match self {
            UnaryConnective::SelfProjection => "self projection",
            UnaryConnective::Antilogy => "antilogy",
            UnaryConnective::Tautology => "tautology",
            UnaryConnective::Complementation => "complementation",
        }
    }
}

pub fn classify_unary2(t: &UnaryTable) -> Result<UnaryConnective, LogicError> {
    if t.arity.get() != 2 {
        return Err(LogicError::NotBinaryLogic(t.arity.get()));
    }
    Ok(UnaryConnective::ALL[(t.indices[0] * 2 + t.indices[1]) as usize])
}

/// The sixteen two-variable two-valued connectives, in index-matrix order
/// `(i00, i01, i10, i11)` from `0000` to `1111`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Connective {
    Nand,
    Antilogy,
    LeftComplementation,
    IfThen,
    RightProjection,
    If,
    NeitherNor,
    Iff,
    Xor,
    Or,
    NotBut,
    RightComplementation,
    ButNot,
    LeftProjection,
    Tautology,
    And,
}

impl Connective {
    pub const ALL: [Connective; 16] = [
        Connective::Nand,
        Connective::Antilogy,
        Connective::LeftComplementation,
        Connective::IfThen,
        Connective::RightProjection,
        Connective::If,
        Connective::NeitherNor,
        Connective::Iff,
        Connective::Xor,
        Connective::Or,
        Connective::NotBut,
        Connective::RightComplementation,
        Connective::ButNot,
        Connective::LeftProjection,
        Connective::Tautology,
        Connective::And,
    ];

    /// Unique name of the connective.
    pub fn name(self) -> &'static str {
        match self {
            Connective::RightComplementation => "right complementation",
            other => other.legacy_label(),
        }
    }

    /// Historical label of the index matrix. Not injective: the `1011` matrix
    /// carries the label `right projection` as well, although its outputs are
    /// the complement of the right argument.
    pub fn legacy_label(self) -> &'static str {
        match self {
            Connective::Nand => "nand",
            Connective::Antilogy => "antilogy",
            Connective::LeftComplementation => "left complementation",
            Connective::IfThen => "if ... then",
            Connective::RightProjection => "right projection",
            Connective::If => "if",
            Connective::NeitherNor => "neither ... nor",
            Connective::Iff => "if and only if (iff)",
            Connective::Xor => "xor",
            Connective::Or => "or",
            Connective::NotBut => "not ... but",
            Connective::RightComplementation => "right projection",
            Connective::ButNot => "but not",
            Connective::LeftProjection => "left projection",
            Connective::Tautology => "tautology",
            Connective::And => "and",
        }
    }

    /// Row-major index matrix of the connective.
    pub fn indices(self) -> [u32; 4] {
        let code = Connective::ALL.iter().position(|&c| c == self).unwrap() as u32;
        [(code >> 3) & 1, (code >> 2) & 1, (code >> 1) & 1, code & 1]
    }
}

impl fmt::Display for Connective {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

pub fn classify_binary2(t: &BinaryTable) -> Result<Connective, LogicError> {
    if t.arity.get() != 2 {
        return Err(LogicError::NotBinaryLogic(t.arity.get()));
    }
    let code = t.indices.iter().fold(0usize, |acc, &i| acc * 2 + i as usize);
    Ok(Connective::ALL[code])
}

/// Clause-combination table over clause sums `0..=k`: `0` whenever either
/// argument is `0`, `1` otherwise. Expressed as shifts over arity `k + 1`.
pub fn ksat_mu(k: usize) -> Result<BinaryTable, LogicError> {
    if k < 2 {
        return Err(LogicError::ClauseWidth(k));
    }
    let n = u32::try_from(k + 1).map_err(|_| LogicError::ClauseWidth(k))?;
    let arity = Arity::new(n)?;
    let mut indices = Vec::with_capacity((k + 1) * (k + 1));
    for a in 0..n {
        for b in 0..n {
            let target = u32::from(a != 0 && b != 0);
            let prod = u64::from(a) * u64::from(b);
            let shift = (u64::from(target) + u64::from(n) - prod % u64::from(n)) % u64::from(n);
            indices.push(shift as u32);
        }
    }
    BinaryTable::new(arity, indices)
}

/// Plain-text block for a unary table: header plus one row of outputs.
pub fn dump_unary(t: &UnaryTable) -> String {
    let idx: Vec<String> = t.indices.iter().map(u32::to_string).collect();
    let row: Vec<String> = t.truth_table().iter().map(u32::to_string).collect();
    format!("unary n={} idx={}\n{}\n", t.arity, idx.join(","), row.join(" "))
}

/// Plain-text block for a binary table: header plus `n` rows of outputs.
pub fn dump_binary(t: &BinaryTable) -> String {
    let n = t.arity.get() as usize;
    let mut out = format!("binary n={}\n", t.arity);
    for row in t.truth_table().chunks(n) {
        let cells: Vec<String> = row.iter().map(u32::to_string).collect();
        out.push_str(&cells.join(" "));
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::collections::HashSet;

    fn two() -> Arity {
        Arity::BINARY
    }

    #[test]
    fn gen_g_examples() {
        assert_eq!(gen_g(two(), 1, 1.0).unwrap().value(), 0);
        assert_eq!(gen_g(two(), 0, 0.9).unwrap().value(), 0);
        assert_eq!(gen_g(Arity::new(3).unwrap(), 2, 4.0).unwrap().value(), 0);
    }

    #[test]
    fn gen_g_negative_and_nonfinite() {
        assert_eq!(gen_g(Arity::new(3).unwrap(), 0, -0.5).unwrap().value(), 2);
        assert!(matches!(gen_g(two(), 0, f64::NAN), Err(LogicError::NonFinite(_))));
        assert!(gen_g(two(), 0, f64::INFINITY).is_err());
    }

    #[test]
    fn arity_below_two_rejected() {
        assert_eq!(Arity::new(1), Err(LogicError::InvalidArity(1)));
        assert!(Arity::new(0).is_err());
    }

    #[test]
    fn apply_unary_examples() {
        let id = UnaryTable::new(two(), vec![0, 0]).unwrap();
        assert_eq!(apply_unary(&id, 1.0).unwrap().value(), 1);
        let not = UnaryTable::new(two(), vec![1, 1]).unwrap();
        assert_eq!(apply_unary(&not, 0.0).unwrap().value(), 1);
        let id3 = UnaryTable::new(Arity::new(3).unwrap(), vec![0, 0, 0]).unwrap();
        assert_eq!(apply_unary(&id3, 2.0).unwrap().value(), 2);
    }

    #[test]
    fn apply_out_of_range() {
        let id = UnaryTable::new(two(), vec![0, 0]).unwrap();
        assert!(matches!(id.apply(2.0), Err(LogicError::OutOfRange { floor: 2, n: 2 })));
        assert!(id.apply(-0.1).is_err());
        let t = BinaryTable::new(two(), vec![0; 4]).unwrap();
        assert!(t.apply(0.0, 5.0).is_err());
        assert!(t.apply_int(2, 0).is_err());
    }

    #[test]
    fn table_shape_checked() {
        assert!(matches!(
            UnaryTable::new(two(), vec![0]),
            Err(LogicError::BadShape { expected: 2, got: 1 })
        ));
        assert!(matches!(
            BinaryTable::new(two(), vec![0, 0, 2, 0]),
            Err(LogicError::BadIndex { index: 2, n: 2 })
        ));
        assert!(BinaryTable::from_rows(two(), &[vec![0, 0], vec![0]]).is_err());
    }

    #[test]
    fn apply_binary_examples() {
        let and = BinaryTable::from_rows(two(), &[vec![1, 1], vec![1, 1]]).unwrap();
        assert_eq!(apply_binary(&and, 1.0, 1.0).unwrap().value(), 0);
        let or = BinaryTable::from_rows(two(), &[vec![1, 0], vec![0, 1]]).unwrap();
        assert_eq!(apply_binary(&or, 0.0, 1.0).unwrap().value(), 0);
        let zero = BinaryTable::new(two(), vec![0; 4]).unwrap();
        assert_eq!(apply_binary(&zero, 1.0, 1.0).unwrap().value(), 1);
    }

    #[test]
    fn first_tables_are_all_zero() {
        let u = enumerate_unary(Arity::new(3).unwrap(), DEFAULT_ENUMERATION_BUDGET)
            .unwrap()
            .next()
            .unwrap();
        assert_eq!(u.indices(), &[0, 0, 0]);
        let b = enumerate_binary(two(), DEFAULT_ENUMERATION_BUDGET).unwrap().next().unwrap();
        assert_eq!(b.indices(), &[0, 0, 0, 0]);
    }

    #[test]
    fn enumeration_is_lexicographic() {
        let all: Vec<Vec<u32>> = enumerate_unary(Arity::new(3).unwrap(), 100)
            .unwrap()
            .map(|t| t.indices().to_vec())
            .collect();
        assert_eq!(all.len(), 27);
        assert!(all.windows(2).all(|w| w[0] < w[1]));
        assert_eq!(all[1], vec![0, 0, 1]);
        assert_eq!(all[26], vec![2, 2, 2]);
    }

    #[test]
    fn enumeration_counts_and_distinctness() {
        for n in 2..=4u32 {
            let fam = enumerate_unary(Arity::new(n).unwrap(), DEFAULT_ENUMERATION_BUDGET).unwrap();
            let seen: HashSet<Vec<u32>> = fam.map(|t| t.truth_table()).collect();
            assert_eq!(seen.len() as u64, u64::from(n).pow(n));
        }
        for n in 2..=3u32 {
            let fam = enumerate_binary(Arity::new(n).unwrap(), DEFAULT_ENUMERATION_BUDGET).unwrap();
            let seen: HashSet<Vec<u32>> = fam.map(|t| t.truth_table()).collect();
            assert_eq!(seen.len() as u64, u64::from(n).pow(n * n));
        }
    }

    #[test]
    fn enumeration_budget() {
        assert!(matches!(
            enumerate_binary(Arity::new(4).unwrap(), DEFAULT_ENUMERATION_BUDGET),
            Err(LogicError::BudgetExceeded { .. })
        ));
        assert!(enumerate_unary(Arity::new(3).unwrap(), 26).is_err());
        assert_eq!(enumerate_unary(Arity::new(3).unwrap(), 27).unwrap().total(), 27);
    }

    #[test]
    fn classify_examples() {
        let t = |i: [u32; 4]| BinaryTable::new(two(), i.to_vec()).unwrap();
        assert_eq!(classify_binary2(&t([0, 0, 0, 1])).unwrap().name(), "antilogy");
        assert_eq!(classify_binary2(&t([1, 1, 1, 0])).unwrap().name(), "tautology");
        assert_eq!(classify_binary2(&t([1, 0, 0, 0])).unwrap().name(), "xor");
        let three = BinaryTable::new(Arity::new(3).unwrap(), vec![0; 9]).unwrap();
        assert_eq!(classify_binary2(&three), Err(LogicError::NotBinaryLogic(3)));
    }

    #[test]
    fn classify_is_bijective() {
        let names: HashSet<&str> = enumerate_binary(two(), 16)
            .unwrap()
            .map(|t| classify_binary2(&t).unwrap().name())
            .collect();
        assert_eq!(names.len(), 16);
        for c in Connective::ALL {
            let t = BinaryTable::new(two(), c.indices().to_vec()).unwrap();
            assert_eq!(classify_binary2(&t).unwrap(), c);
        }
    }

    #[test]
    fn right_complementation_negates_right_argument() {
        let t = BinaryTable::new(two(), Connective::RightComplementation.indices().to_vec()).unwrap();
        assert_eq!(t.truth_table(), vec![1, 0, 1, 0]);
        assert_eq!(Connective::RightComplementation.legacy_label(), "right projection");
    }

    #[test]
    fn ksat_mu_tables() {
        let mu2 = ksat_mu(2).unwrap();
        assert_eq!(mu2.truth_table(), vec![0, 0, 0, 0, 1, 1, 0, 1, 1]);
        let mu3 = ksat_mu(3).unwrap();
        let tt = mu3.truth_table();
        for a in 0..4 {
            for b in 0..4 {
                assert_eq!(tt[a * 4 + b], u32::from(a != 0 && b != 0));
            }
        }
        assert!(matches!(ksat_mu(1), Err(LogicError::ClauseWidth(1))));
    }

    #[test]
    fn ksat_mu_zero_iff_some_argument_zero() {
        for k in 2..=8usize {
            let mu = ksat_mu(k).unwrap();
            assert_eq!(mu.apply(0.0, k as f64).unwrap().value(), 0);
            for a in 0..=k {
                for b in 0..=k {
                    let v = mu.apply(a as f64, b as f64).unwrap().value();
                    assert_eq!(v == 0, a == 0 || b == 0, "k={k} a={a} b={b}");
                    assert_eq!(mu.apply_int(a as u32, b as u32).unwrap().value(), v);
                }
            }
        }
    }

    #[test]
    fn dump_format() {
        let t = UnaryTable::new(two(), vec![1, 1]).unwrap();
        assert_eq!(dump_unary(&t), "unary n=2 idx=1,1\n1 0\n");
        let and = BinaryTable::new(two(), vec![1, 1, 1, 1]).unwrap();
        assert_eq!(dump_binary(&and), "binary n=2\n1 1\n1 0\n");
    }

    #[test]
    fn exact_and_float_variants_agree() {
        let n = Arity::new(5).unwrap();
        let r = BigRational::new(BigInt::from(-7), BigInt::from(2));
        assert_eq!(gen_g_exact(n, 3, &r).value(), gen_g(n, 3, -3.5).unwrap().value());
        assert_eq!(gen_g_int(n, 3, -4).value(), gen_g(n, 3, -3.5).unwrap().value());
    }

    proptest! {
        #[test]
        fn gen_g_range_and_reduction(n in 2u32..50, k in 0u64..1_000_000, a in -1e12f64..1e12) {
            let ar = Arity::new(n).unwrap();
            let v = gen_g(ar, k, a).unwrap().value();
            prop_assert!(v < n);
            prop_assert_eq!(v, gen_g(ar, k % u64::from(n), a.floor()).unwrap().value());
        }
    }
}
