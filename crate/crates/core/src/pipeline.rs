//! Relaxation-and-rounding solver: build the clause-sum system, solve it, and
//! map each coordinate through `floor(X) mod base` to a candidate assignment.
//!
//! The solver never looks at the formula's polarity beyond what the relaxation
//! encodes, and it never consults a SAT oracle. Its claims are checked
//! elsewhere.

use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Serialize, Serializer};
use thiserror::Error;

use crate::cnf::{Assignment, Formula, TruthConvention};
use crate::lp::{
    build_relaxation, solve_feasibility, BoundMode, LpError, LpSolution, LpStatus, LpSystem,
    NegationMode,
};
use crate::mvlogic::{gen_g_exact, Arity, LogicError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PipelineError {
    #[error("cannot round a solution with status {0:?}")]
    NotFeasible(LpStatus),
    #[error("formula has mixed clause widths")]
    NonUniform,
    #[error("clause width {0} is below 2")]
    WidthTooSmall(usize),
    #[error(transparent)]
    Lp(#[from] LpError),
    #[error(transparent)]
    Logic(#[from] LogicError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum RoundingBase {
    #[default]
    Two,
    /// The clause width of the instance.
    K,
}

impl RoundingBase {
    pub fn resolve(self, k: usize) -> u32 {
        match self {
            RoundingBase::Two => 2,
            RoundingBase::K => k.max(2) as u32,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Objective {
    /// Round the phase-one basic feasible point.
    #[default]
    None,
    /// Round the vertex maximizing the sum of all variables that occur in
    /// some clause.
    MaximizeSum,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize)]
pub struct PipelineConfig {
    pub negation: NegationMode,
    pub bound: BoundMode,
    pub rounding_base: RoundingBase,
    pub objective: Objective,
}

impl PipelineConfig {
    /// Polarity-free rows bounded by `k`, phase-one point, base-2 rounding.
    pub fn faithful() -> Self {
        PipelineConfig::default()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Claim {
    SatClaim,
    UnsatClaim,
}

/// A coordinate whose rounded value is neither `0` nor `1`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Anomaly {
    /// 1-based variable id.
    pub var: u32,
    #[serde(serialize_with = "ser_rational")]
    pub raw: BigRational,
    pub rounded: u32,
}

fn ser_rational<S: Serializer>(r: &BigRational, s: S) -> Result<S::Ok, S::Error> {
    s.collect_str(r)
}

fn ser_bits<S: Serializer>(a: &Option<Assignment>, s: S) -> Result<S::Ok, S::Error> {
    match a {
        None => s.serialize_none(),
        Some(a) => s.serialize_str(&a.to_bits()),
    }
}

/// Elementary steps spent by one pipeline run.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize)]
pub struct PipelineSteps {
    /// Coefficient terms and rows written while building the system.
    pub constraint_build: u64,
    pub pivots: u64,
    /// One per rounded coordinate.
    pub rounding: u64,
}

impl PipelineSteps {
    pub fn total(&self) -> u64 {
        self.constraint_build + self.pivots + self.rounding
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PipelineResult {
    pub claimed_status: Claim,
    #[serde(serialize_with = "ser_bits")]
    pub rounded: Option<Assignment>,
    pub lp: LpSolution,
    pub anomalies: Vec<Anomaly>,
    /// Filled by a later verification step.
    pub verified: Option<bool>,
    pub rounding_base: u32,
    pub objective_unbounded: bool,
    pub steps: PipelineSteps,
}

/// `floor(X_i) mod base` per coordinate; `0` decodes to true, `1` to false and
/// anything else is recorded as an anomaly and decoded as false.
pub fn round_assignment(
    sol: &LpSolution,
    base: u32,
) -> Result<(Assignment, Vec<Anomaly>), PipelineError> {
    let point = match (&sol.status, &sol.point) {
        (LpStatus::Feasible, Some(p)) => p,
        (status, _) => return Err(PipelineError::NotFeasible(*status)),
    };
    let arity = Arity::new(base)?;
    let mut values = Vec::with_capacity(point.len());
    let mut anomalies = Vec::new();
    for (i, x) in point.iter().enumerate() {
        let v = gen_g_exact(arity, 0, x).value();
        if v > 1 {
            anomalies.push(Anomaly { var: i as u32 + 1, raw: x.clone(), rounded: v });
        }
        values.push(TruthConvention::ZeroTrue.decode_value(v));
    }
    Ok((Assignment::new(values), anomalies))
}

fn sum_objective(f: &Formula) -> Vec<BigRational> {
    let mut obj = vec![BigRational::zero(); f.num_vars()];
    for c in f.clauses() {
        for l in c.literals() {
            obj[l.index()] = BigRational::one();
        }
    }
    obj
}

/// Runs relaxation, solve and rounding on `f`.
pub fn solve_relaxed(f: &Formula, cfg: &PipelineConfig) -> Result<PipelineResult, PipelineError> {
    let (system, k) = if f.num_clauses() == 0 {
        (LpSystem::new(f.num_vars(), Vec::new()), 2)
    } else {
        let k = f.uniform_k().ok_or(PipelineError::NonUniform)?;
        if k < 2 {
            return Err(PipelineError::WidthTooSmall(k));
        }
        (build_relaxation(f, cfg.negation, cfg.bound)?, k)
    };
    let mut steps = PipelineSteps {
        constraint_build: system.constraints.iter().map(|c| c.coefficients.len() as u64 + 1).sum(),
        ..PipelineSteps::default()
    };

    let system = match cfg.objective {
        Objective::None => system,
        Objective::MaximizeSum => system.with_objective(sum_objective(f)),
    };
    let mut lp = solve_feasibility(&system)?;
    let mut objective_unbounded = false;
    if lp.status == LpStatus::Unbounded {
        objective_unbounded = true;
        let spent = lp.pivot_steps;
        let plain = LpSystem { objective: None, ..system };
        lp = solve_feasibility(&plain)?;
        lp.pivot_steps += spent;
    }
    steps.pivots = lp.pivot_steps;

    let base = RoundingBase::resolve(cfg.rounding_base, k);
    let (claimed_status, rounded, anomalies) = match lp.status {
        LpStatus::Feasible => {
            let (a, anomalies) = round_assignment(&lp, base)?;
            steps.rounding = a.len() as u64;
            (Claim::SatClaim, Some(a), anomalies)
        }
        _ => (Claim::UnsatClaim, None, Vec::new()),
    };
    Ok(PipelineResult {
        claimed_status,
        rounded,
        lp,
        anomalies,
        verified: None,
        rounding_base: base,
        objective_unbounded,
        steps,
    })
}
