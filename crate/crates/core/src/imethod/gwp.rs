//! The end-to-end experiment: calibrate `C₀`, choose `N`, scale, evolve,
//! measure the increments, undo the scaling and compare the final Sobolev
//! norm with the growth envelope.

use std::fmt;

use serde::{Deserialize, Serialize};

use super::config::{ExperimentConfig, Setting};
use super::ledger::{
    measure_increments, AlmostConservation, AlmostConservationRun, BoundaryReport, RunSpec,
};
use super::params::{
    choose_n, growth_exponent, lambda_exponent, ParameterChoice, CONVENTION_NOTE,
};
use super::scaling::{calibrate_c0, scale_profile, scaled_grid, Calibration, TARGET_ENERGY};
use crate::dynamics::WaveState;
use crate::functionals::{sobolev_norm, CsvHeader};
use crate::spectral::{synthesize_initial_data, Grid3};
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    /// Measured norm below the envelope with every premise satisfied.
    Consistent,
    /// Measured norm above the envelope with the configured constants.
    BoundViolated,
    /// A premise failed (initial energy, bootstrap gate) or the run stopped.
    Inconclusive,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Consistent => "consistent",
            Verdict::BoundViolated => "bound-violated",
            Verdict::Inconclusive => "inconclusive",
        })
    }
}

/// Unscaled comparison at the horizon.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GwpConclusion {
    /// `‖(u(T), ∂ₜu(T))‖²_{H^s×H^{s−1}}`.
    pub measured_norm_sq: f64,
    /// `‖(u₀, u₁)‖²_{H^s×H^{s−1}}`.
    pub initial_norm_sq: f64,
    /// `sup_{[0,T]} E(I_{λN}u) = λ·sup_{[0,λT]} E(I_N u_λ)`.
    pub sup_e_iu_unscaled: f64,
    /// `K·(‖(u₀,u₁)‖² + (T²+1)·λ·sup E(Iu_λ))`.
    pub envelope: f64,
    /// `K·T^{growth exponent}`, for reference.
    pub growth_bound: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GwpReport {
    pub config_hash: String,
    pub choice: ParameterChoice,
    pub conventions: Vec<String>,
    /// Unscaled horizon `T`.
    pub horizon: f64,
    /// `λT`, the span of the scaled run.
    pub scaled_span: f64,
    /// Scaled time step.
    pub dt: f64,
    pub steps: usize,
    pub box_length: f64,
    pub n: usize,
    pub calibration: Option<Calibration>,
    /// `E(Iu_λ(0))`.
    pub initial_energy: f64,
    pub growth_exponent: Option<f64>,
    pub ledger: AlmostConservation,
    pub boundary: Option<BoundaryReport>,
    pub failure: Option<String>,
    pub conclusion: Option<GwpConclusion>,
    pub verdict: Option<Verdict>,
}

impl GwpReport {
    pub fn increments(&self) -> Vec<f64> {
        self.ledger.increments()
    }

    pub fn csv_header(&self) -> CsvHeader {
        CsvHeader {
            config_hash: self.config_hash.clone(),
            s: self.choice.s,
            cutoff: self.choice.cutoff,
            box_length: self.box_length,
            n: self.n,
            dt: self.dt,
        }
    }

    /// Structured-text form.
    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Format(format!("report serialization: {e}")))
    }

    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Format(format!("report: {}", e.message())))
    }

    /// `time,E_u,E_Iu,Hs_norm,Hs1_norm` at the snapshot stride.
    pub fn energy_csv(&self) -> String {
        self.ledger.energy.to_csv(&self.csv_header())
    }

    pub fn interval_csv(&self) -> String {
        self.ledger.to_interval_csv(&self.csv_header())
    }
}

fn conventions(choice: &ParameterChoice) -> Vec<String> {
    let mut out = vec![CONVENTION_NOTE.to_string()];
    if choice.epsilon_clamped {
        out.push(format!("epsilon clamped to 1 from N^(1/2) = {}", choice.cutoff.sqrt()));
    }
    out
}

fn initial_state(cfg: &ExperimentConfig, grid: &Grid3, recipe: &crate::spectral::Recipe) -> Result<WaveState> {
    let (u, ut) = synthesize_initial_data(grid, recipe, cfg.seed)?;
    WaveState::new(0.0, u, ut)
}

fn center_of(cfg: &ExperimentConfig, recipe: &crate::spectral::Recipe, grid: &Grid3) -> Option<[f64; 3]> {
    cfg.recipe
        .support_radius()
        .map(|_| recipe.center().unwrap_or([0.5 * grid.box_length(); 3]))
}

fn assemble(
    cfg: &ExperimentConfig,
    hash: &str,
    choice: ParameterChoice,
    calibration: Option<Calibration>,
    grid: &Grid3,
    span: f64,
    initial_energy: f64,
    mut run: AlmostConservationRun,
    ledger_index: usize,
) -> GwpReport {
    let ledger = run.ledgers.swap_remove(ledger_index);
    GwpReport {
        config_hash: hash.to_string(),
        choice,
        conventions: conventions(&choice),
        horizon: cfg.horizon,
        scaled_span: span,
        dt: run.dt,
        steps: run.steps,
        box_length: grid.box_length(),
        n: grid.n(),
        calibration,
        initial_energy,
        growth_exponent: growth_exponent(cfg.s).ok(),
        ledger,
        boundary: run.boundary,
        failure: run.failure,
        conclusion: None,
        verdict: None,
    }
}

/// Almost-conservation ledgers of the configured datum (unscaled) for each
/// cutoff, over `[0, T]`. With `epsilon = "auto"` every cutoff uses its own
/// `N^{1/2}`; cutoffs sharing a subinterval length share one evolution.
pub fn run_almost_conservation(cfg: &ExperimentConfig, cutoffs: &[f64]) -> Result<Vec<GwpReport>> {
    let hash = cfg.hash()?;
    let grid = cfg.grid()?;
    let initial = initial_state(cfg, &grid, &cfg.recipe)?;
    let mut groups: Vec<(f64, Vec<ParameterChoice>)> = Vec::new();
    for &n in cutoffs {
        let c0 = 1.0 / n.powf(lambda_exponent(cfg.s));
        let choice = ParameterChoice::new(cfg.s, n, c0, cfg.epsilon.value())?;
        match groups.iter_mut().find(|(e, _)| *e == choice.epsilon) {
            Some((_, g)) => g.push(choice),
            None => groups.push((choice.epsilon, vec![choice])),
        }
    }
    let mut reports = Vec::new();
    for (epsilon, choices) in groups {
        let mut spec = RunSpec::new(cfg.s, epsilon, cfg.horizon, cfg.time_step()?, cfg.stride);
        spec.nonlinearity = cfg.nonlinearity;
        spec.check_commutator = cfg.check_commutator;
        spec.center = center_of(cfg, &cfg.recipe, &grid);
        let ns: Vec<f64> = choices.iter().map(|c| c.cutoff).collect();
        let run = measure_increments(&initial, &spec, &ns)?;
        for (i, choice) in choices.into_iter().enumerate() {
            let e0 = run.ledgers[i].energy.e_iu.first().copied().unwrap_or(0.0);
            let mut partial = run.clone();
            partial.ledgers = vec![run.ledgers[i].clone()];
            reports.push(assemble(cfg, &hash, choice, None, &grid, cfg.horizon, e0, partial, 0));
        }
    }
    reports.sort_by(|a, b| a.choice.cutoff.total_cmp(&b.choice.cutoff));
    Ok(reports)
}

fn squared_norm(state: &WaveState, s: f64) -> Result<f64> {
    Ok(sobolev_norm(state, s, false)?.total().powi(2))
}

/// `u(T, x) = λu_λ(λT, λx)`, `∂ₜu(T, x) = λ²∂ₜu_λ(λT, λx)` on the unscaled box.
fn unscale(state: &WaveState, lambda: f64) -> Result<WaveState> {
    WaveState::new(
        state.t / lambda,
        state.u.rescaled(1.0 / lambda, lambda)?,
        state.ut.rescaled(1.0 / lambda, lambda * lambda)?,
    )
}

/// Full pipeline for the configured datum and horizon.
pub fn run_gwp_experiment(cfg: &ExperimentConfig) -> Result<GwpReport> {
    let hash = cfg.hash()?;
    let grid = cfg.grid()?;
    let initial = initial_state(cfg, &grid, &cfg.recipe)?;
    let mut calibrations: Vec<(f64, Calibration)> = Vec::new();
    let mut c0_at = |n: f64| -> Result<f64> {
        match cfg.c0 {
            Setting::Value(c) => Ok(c),
            Setting::Auto => {
                let c = calibrate_c0(&initial, cfg.s, n)?;
                calibrations.push((n, c));
                Ok(c.c0)
            }
        }
    };
    let mut choice = match cfg.cutoff {
        Setting::Auto => choose_n(cfg.s, cfg.horizon, cfg.safety, &mut c0_at)?,
        Setting::Value(n) => {
            let c0 = c0_at(n)?;
            ParameterChoice::new(cfg.s, n, c0, None)?
        }
    };
    if let Setting::Value(e) = cfg.epsilon {
        choice = ParameterChoice::new(cfg.s, choice.cutoff, choice.c0, Some(e))?;
    }
    let calibration = calibrations
        .iter()
        .rev()
        .find(|(n, _)| *n == choice.cutoff)
        .map(|(_, c)| *c);
    let lambda = choice.lambda;
    let recipe = scale_profile(&cfg.recipe, lambda)?;
    let sgrid = scaled_grid(&grid, lambda)?;
    let scaled = initial_state(cfg, &sgrid, &recipe)?;
    let span = lambda * cfg.horizon;
    let mut spec = RunSpec::new(cfg.s, choice.epsilon.min(span), span, lambda * cfg.time_step()?, cfg.stride);
    spec.nonlinearity = cfg.nonlinearity;
    spec.check_commutator = cfg.check_commutator;
    spec.require_initial_bound = false;
    spec.center = center_of(cfg, &recipe, &sgrid);
    let mut run = measure_increments(&scaled, &spec, &[choice.cutoff])?;
    let final_state = run.final_state.take();
    let initial_energy = run.ledgers[0].energy.e_iu.first().copied().unwrap_or(0.0);
    let mut report = assemble(cfg, &hash, choice, calibration, &sgrid, span, initial_energy, run, 0);

    let premises = initial_energy <= TARGET_ENERGY && report.ledger.gate.passed;
    let finished = report.failure.is_none();
    if let (true, Some(last)) = (finished, final_state) {
        let measured = squared_norm(&unscale(&last, lambda)?, cfg.s)?;
        let initial_norm_sq = squared_norm(&initial, cfg.s)?;
        let sup = report.ledger.sup_e_iu.last().copied().unwrap_or(initial_energy);
        let k = cfg.envelope_constant;
        let envelope = k * (initial_norm_sq + (cfg.horizon * cfg.horizon + 1.0) * lambda * sup);
        report.conclusion = Some(GwpConclusion {
            measured_norm_sq: measured,
            initial_norm_sq,
            sup_e_iu_unscaled: lambda * sup,
            envelope,
            growth_bound: report.growth_exponent.map(|g| k * cfg.horizon.powf(g)),
        });
        report.verdict = Some(if !premises {
            Verdict::Inconclusive
        } else if measured <= envelope {
            Verdict::Consistent
        } else {
            Verdict::BoundViolated
        });
    } else {
        report.verdict = Some(Verdict::Inconclusive);
    }
    Ok(report)
}
