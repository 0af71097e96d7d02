//! Modular many-valued logic, nested-table CNF evaluation, an LP relaxation
//! pipeline for k-SAT, exact satisfiability oracles and a differential harness
//! comparing them.

pub mod beta;
pub mod cnf;
pub mod harness;
pub mod lp;
pub mod mvlogic;
pub mod oracle;
pub mod pipeline;

pub use beta::{beta_closed_form, beta_eval, count_model, BetaResult, EvalError, OpCount};
pub use cnf::{
    eval_reference, parse_dimacs, random_kcnf, write_dimacs, Assignment, Clause, CnfError,
    Formula, Literal, TruthConvention,
};
pub use harness::{diff_run, Category, DiffOptions, DiffReport, Instance};
pub use lp::{build_relaxation, solve_feasibility, BoundMode, LpError, LpSystem, NegationMode};
pub use mvlogic::{gen_g, Arity, BinaryTable, LogicError, LogicValue, UnaryTable};
pub use oracle::{brute_force_sat, dpll_sat, OracleError, SatStatus};
pub use pipeline::{solve_relaxed, Claim, PipelineConfig, PipelineError, PipelineResult};
