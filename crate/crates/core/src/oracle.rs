//! Ground-truth satisfiability: exhaustive enumeration and a plain DPLL.

use serde::Serialize;
use thiserror::Error;

use crate::cnf::{eval_reference, Assignment, CnfError, Formula};

/// Largest variable count [`brute_force_sat`] will enumerate.
pub const BRUTE_FORCE_MAX_VARS: usize = 26;
pub const DEFAULT_NODE_BUDGET: u64 = 10_000_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OracleError {
    #[error("{num_vars} variables exceeds the enumeration limit of {limit}")]
    TooManyVariables { num_vars: usize, limit: usize },
    #[error("search budget of {budget} nodes exceeded")]
    BudgetExceeded { budget: u64 },
    #[error(transparent)]
    Cnf(#[from] CnfError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SatStatus {
    Sat,
    Unsat,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct OracleVerdict {
    pub status: SatStatus,
    pub witness: Option<Assignment>,
    pub nodes_explored: u64,
}

impl OracleVerdict {
    fn sat(witness: Assignment, nodes_explored: u64) -> Self {
        OracleVerdict { status: SatStatus::Sat, witness: Some(witness), nodes_explored }
    }

    fn unsat(nodes_explored: u64) -> Self {
        OracleVerdict { status: SatStatus::Unsat, witness: None, nodes_explored }
    }
}

/// Tries assignments in counting order, bit `i` of the counter giving
/// variable `i + 1`. Each tried assignment counts as one node.
pub fn brute_force_sat(f: &Formula) -> Result<OracleVerdict, OracleError> {
    let n = f.num_vars();
    if n > BRUTE_FORCE_MAX_VARS {
        return Err(OracleError::TooManyVariables { num_vars: n, limit: BRUTE_FORCE_MAX_VARS });
    }
    let mut values = vec![false; n];
    for mask in 0u64..(1u64 << n) {
        for (i, v) in values.iter_mut().enumerate() {
            *v = (mask >> i) & 1 == 1;
        }
        if f.clauses().iter().all(|c| c.satisfied_by(&values)) {
            return Ok(OracleVerdict::sat(Assignment::new(values), mask + 1));
        }
    }
    Ok(OracleVerdict::unsat(1u64 << n))
}

pub fn verify(f: &Formula, a: &Assignment) -> Result<bool, OracleError> {
    Ok(eval_reference(f, a)?)
}

struct Dpll<'a> {
    f: &'a Formula,
    nodes: u64,
    budget: u64,
}

type Partial = Vec<Option<bool>>;

enum ClauseState {
    Satisfied,
    Conflict,
    Unit(usize, bool),
    Open,
}

impl Dpll<'_> {
    fn clause_state(c: &crate::cnf::Clause, vals: &Partial) -> ClauseState {
        let mut unassigned = None;
        let mut open = 0;
        for l in c.literals() {
            match vals[l.index()] {
                Some(v) if l.satisfied_by(v) => return ClauseState::Satisfied,
                Some(_) => {}
                None => {
                    open += 1;
                    unassigned = Some((l.index(), !l.is_negated()));
                }
            }
        }
        match (open, unassigned) {
            (0, _) => ClauseState::Conflict,
            (1, Some((v, b))) => ClauseState::Unit(v, b),
            _ => ClauseState::Open,
        }
    }

    /// Unit propagation to fixpoint; `false` on conflict.
    fn propagate(&self, vals: &mut Partial) -> bool {
        loop {
            let mut changed = false;
            for c in self.f.clauses() {
                match Self::clause_state(c, vals) {
                    ClauseState::Conflict => return false,
                    ClauseState::Unit(v, b) => {
                        vals[v] = Some(b);
                        changed = true;
                    }
                    _ => {}
                }
            }
            if !changed {
                return true;
            }
        }
    }

    /// Assigns every pure literal among open clauses; returns whether any was set.
    fn eliminate_pure(&self, vals: &mut Partial) -> bool {
        let n = vals.len();
        let mut pos = vec![false; n];
        let mut neg = vec![false; n];
        for c in self.f.clauses() {
            if matches!(Self::clause_state(c, vals), ClauseState::Satisfied) {
                continue;
            }
            for l in c.literals() {
                if vals[l.index()].is_none() {
                    if l.is_negated() {
                        neg[l.index()] = true;
                    } else {
                        pos[l.index()] = true;
                    }
                }
            }
        }
        let mut any = false;
        for v in 0..n {
            if vals[v].is_none() && pos[v] != neg[v] {
                vals[v] = Some(pos[v]);
                any = true;
            }
        }
        any
    }

    fn search(&mut self, mut vals: Partial) -> Result<Option<Partial>, OracleError> {
        self.nodes += 1;
        if self.nodes > self.budget {
            return Err(OracleError::BudgetExceeded { budget: self.budget });
        }
        loop {
            if !self.propagate(&mut vals) {
                return Ok(None);
            }
            if !self.eliminate_pure(&mut vals) {
                break;
            }
        }
        let open = self
            .f
            .clauses()
            .iter()
            .any(|c| !matches!(Self::clause_state(c, &vals), ClauseState::Satisfied));
        if !open {
            return Ok(Some(vals));
        }
        let var = vals.iter().position(Option::is_none).expect("open clause has a free variable");
        for value in [false, true] {
            let mut next = vals.clone();
            next[var] = Some(value);
            if let Some(model) = self.search(next)? {
                return Ok(Some(model));
            }
        }
        Ok(None)
    }
}

/// DPLL with unit propagation and pure-literal elimination, branching on the
/// lowest free variable with `false` first. Variables left free in a model
/// are set to false.
pub fn dpll_sat(f: &Formula, budget: u64) -> Result<OracleVerdict, OracleError> {
    let mut solver = Dpll { f, nodes: 0, budget };
    let model = solver.search(vec![None; f.num_vars()])?;
    Ok(match model {
        Some(vals) => {
            let witness = Assignment::new(vals.into_iter().map(|v| v.unwrap_or(false)).collect());
            debug_assert!(eval_reference(f, &witness).unwrap());
            OracleVerdict::sat(witness, solver.nodes)
        }
        None => OracleVerdict::unsat(solver.nodes),
    })
}
