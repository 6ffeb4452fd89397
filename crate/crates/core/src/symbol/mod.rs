//! The multiplier `μ` of the mollified-energy increment, its case bounds on
//! dyadic shells, and the increment itself as a commutator integral.

mod breakdown;
mod cases;
mod commutator;
mod verify;

pub use breakdown::{increment_shell_breakdown, BreakdownRow, BreakdownTable, DEFAULT_QUADRUPLE_LIMIT};
pub use cases::{case_bound, classify_case, mu, CaseConstants, CaseLabel, FrequencyTriple, ShellQuadruple};
pub use commutator::{
    commutator_rate, energy_increment_commutator, IncrementCheck, RateQuadrature, SplittingIncrement,
    StepSample, Substates,
};
pub use verify::{
    case1b_ratio_by_decade, low_region_violations, verify_symbol_bounds, CaseStats, ExecChoice,
    SymbolReport, VerifyOptions, Witness, MIN_SAMPLES,
};
