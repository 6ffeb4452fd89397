//! The I-method pipeline: scaling, the choice of `λ`, `N` and `ε`,
//! almost-conservation ledgers and the end-to-end growth-bound experiment.
//!
//! Conventions: `0±` exponent adjustments are 0; `ε = N^{1/2}` clamped below
//! at 1; the bootstrap argument is replaced by the observable gate
//! `sup E(Iu) ≤ 1` on a single monitored run.

mod config;
mod gwp;
mod ledger;
mod params;
mod scaling;

pub use config::{apply_override, ExperimentConfig, GridConfig, Setting};
pub use gwp::{run_almost_conservation, run_gwp_experiment, GwpConclusion, GwpReport, Verdict};
pub use ledger::{
    measure_increments, AlmostConservation, AlmostConservationRun, BootstrapGate, BoundaryReport,
    IntervalRecord, RunSpec, DEFAULT_GATE,
};
pub use params::{
    choose_n, growth_exponent, lambda_exponent, lambda_of, optimal_epsilon, partition,
    predicted_increment, ParameterChoice, CONVENTION_NOTE, MAX_DYADIC_EXPONENT, S_THRESHOLD,
};
pub use scaling::{
    calibrate_c0, scale_profile, scaled_grid, scaled_mollified_energy, Calibration,
    CALIBRATION_TOLERANCE, TARGET_ENERGY,
};
