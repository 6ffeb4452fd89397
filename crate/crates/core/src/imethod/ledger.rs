//! Almost-conservation measurement: one streamed run, partitioned into
//! subintervals of length `ε`, with per-interval increments of `E(Iu)`
//! and the commutator identity checked step by step.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use super::params::{partition, predicted_increment};
use super::scaling::TARGET_ENERGY;
use crate::dynamics::{evolve_observed, step_plan, BoundaryMonitor, Nonlinearity, WaveState};
use crate::functionals::{mollified_flow_energy, CsvHeader, EnergyTrajectory};
use crate::spectral::{Grid3, MultiplierProfile};
use crate::symbol::{SplittingIncrement, StepSample};
use crate::{Error, Result};

/// Bootstrap threshold on `sup E(Iu)`.
pub const DEFAULT_GATE: f64 = 1.0;

/// Everything about a run except the cutoff(s).
#[derive(Clone, Debug, PartialEq)]
pub struct RunSpec {
    pub s: f64,
    /// Requested subinterval length; snapped to the snapshot lattice.
    pub epsilon: f64,
    pub t_span: f64,
    pub dt: f64,
    /// Snapshot stride for the energy trajectory and the partition.
    pub stride: usize,
    pub nonlinearity: Nonlinearity,
    /// Integrate the commutator along every step and compare with `ΔE(Iu)`.
    pub check_commutator: bool,
    pub gate: f64,
    /// Reject data with `E(Iu(0)) > 1/2`.
    pub require_initial_bound: bool,
    /// Center for the boundary-shell monitor of localized data.
    pub center: Option<[f64; 3]>,
}

impl RunSpec {
    pub fn new(s: f64, epsilon: f64, t_span: f64, dt: f64, stride: usize) -> Self {
        Self {
            s,
            epsilon,
            t_span,
            dt,
            stride,
            nonlinearity: Nonlinearity::Defocusing,
            check_commutator: true,
            gate: DEFAULT_GATE,
            require_initial_bound: true,
            center: None,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct IntervalRecord {
    pub a: f64,
    pub b: f64,
    /// `E(Iu(a))`.
    pub e_start: f64,
    /// `sup_{t∈J} E(Iu(t))` over every time step in `J`.
    pub sup: f64,
    /// `sup_J E(Iu) − E(Iu(a))`, nonnegative.
    pub increment: f64,
    /// `E(Iu(b)) − E(Iu(a))`.
    pub delta_e: f64,
    /// `∫_J dE(Iu)/dt`, when checked.
    pub commutator: Option<f64>,
}

impl IntervalRecord {
    /// `|commutator − ΔE| / max(|ΔE|, 10⁻¹²)`.
    pub fn mismatch(&self) -> Option<f64> {
        self.commutator
            .map(|c| (c - self.delta_e).abs() / self.delta_e.abs().max(1e-12))
    }
}

/// Outcome of the bootstrap gate `sup E(Iu) ≤ gate`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BootstrapGate {
    pub threshold: f64,
    pub passed: bool,
    pub first_violation: Option<f64>,
}

/// Increments of `E(I_N u)` for one cutoff.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AlmostConservation {
    pub cutoff: f64,
    /// Snapped subinterval length.
    pub epsilon: f64,
    pub intervals: Vec<IntervalRecord>,
    /// Running `sup E(Iu)` at the end of each interval.
    pub sup_e_iu: Vec<f64>,
    pub predicted_per_interval: f64,
    /// `(number of intervals)·predicted_per_interval`.
    pub predicted_total: f64,
    pub gate: BootstrapGate,
    pub energy: EnergyTrajectory,
}

impl AlmostConservation {
    pub fn increments(&self) -> Vec<f64> {
        self.intervals.iter().map(|r| r.increment).collect()
    }

    pub fn max_increment(&self) -> f64 {
        self.intervals.iter().map(|r| r.increment).fold(0.0, f64::max)
    }

    /// Largest relative commutator mismatch over the intervals.
    pub fn max_mismatch(&self) -> Option<f64> {
        self.intervals
            .iter()
            .filter_map(|r| r.mismatch())
            .fold(None, |m, v| Some(m.map_or(v, |m: f64| m.max(v))))
    }

    /// `a,b,E_start,sup,increment,running_sup,predicted,delta_E,commutator`.
    pub fn to_interval_csv(&self, header: &CsvHeader) -> String {
        let mut out = String::new();
        let _ = writeln!(
            out,
            "# config_hash={} s={} N={} L={} n={} dt={}",
            header.config_hash, header.s, header.cutoff, header.box_length, header.n, header.dt
        );
        out.push_str("a,b,E_start,sup_E,increment,running_sup,predicted,delta_E,commutator\n");
        for (r, sup) in self.intervals.iter().zip(&self.sup_e_iu) {
            let comm = r.commutator.map_or(String::from("nan"), |c| format!("{c:.17e}"));
            let _ = writeln!(
                out,
                "{:.17e},{:.17e},{:.17e},{:.17e},{:.17e},{:.17e},{:.17e},{:.17e},{}",
                r.a, r.b, r.e_start, r.sup, r.increment, sup, self.predicted_per_interval, r.delta_e, comm
            );
        }
        out
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundaryReport {
    pub center: [f64; 3],
    /// First time the boundary-shell energy share reached the threshold.
    pub first_reach: Option<f64>,
    pub max_fraction: f64,
}

/// One run measured against several cutoffs.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AlmostConservationRun {
    pub dt: f64,
    pub steps: usize,
    pub ledgers: Vec<AlmostConservation>,
    pub boundary: Option<BoundaryReport>,
    /// Set when the run stopped early; the ledgers then cover the completed
    /// intervals only.
    pub failure: Option<String>,
    /// Last state reached.
    #[serde(skip)]
    pub final_state: Option<WaveState>,
}

struct Tracker {
    prof: MultiplierProfile,
    /// `E(Iu)` at the current step.
    energy: f64,
    carry: Option<f64>,
    /// Per-interval state.
    e_start: f64,
    sup: f64,
    commutator: f64,
    running_sup: f64,
    first_violation: Option<f64>,
    out: AlmostConservation,
}

/// Measures increments of `E(I_N u)` for each cutoff along one evolution
/// of `initial` (the solution does not depend on `N`).
pub fn measure_increments(
    initial: &WaveState,
    spec: &RunSpec,
    cutoffs: &[f64],
) -> Result<AlmostConservationRun> {
    if cutoffs.is_empty() {
        return Err(Error::InvalidParameter("no cutoff given".into()));
    }
    let grid: Grid3 = *initial.grid();
    let profiles = cutoffs
        .iter()
        .map(|&n| MultiplierProfile::new(spec.s, n))
        .collect::<Result<Vec<_>>>()?;
    let (steps, dt) = step_plan(spec.t_span, spec.dt, spec.stride)?;
    let spacing = dt * spec.stride as f64;
    let intervals = partition(spec.t_span, spec.epsilon, spacing)?;
    // interval ends as step indices
    let ends: Vec<usize> = intervals
        .iter()
        .map(|j| ((j.b / dt).round() as usize).min(steps))
        .collect();
    let epsilon = intervals[0].length();
    let predicted = |n: f64| predicted_increment(epsilon, n);

    let t0 = initial.t;
    let mut trackers: Vec<Tracker> = profiles
        .iter()
        .map(|p| {
            let e0 = mollified_flow_energy(initial, p, spec.nonlinearity);
            Tracker {
                prof: *p,
                energy: e0,
                carry: None,
                e_start: e0,
                sup: e0,
                commutator: 0.0,
                running_sup: e0,
                first_violation: (e0 > spec.gate).then_some(t0),
                out: AlmostConservation {
                    cutoff: p.cutoff(),
                    epsilon,
                    intervals: Vec::new(),
                    sup_e_iu: Vec::new(),
                    predicted_per_interval: predicted(p.cutoff()),
                    predicted_total: intervals.len() as f64 * predicted(p.cutoff()),
                    gate: BootstrapGate {
                        threshold: spec.gate,
                        passed: true,
                        first_violation: None,
                    },
                    energy: EnergyTrajectory::new(),
                },
            }
        })
        .collect();
    if spec.require_initial_bound {
        if let Some(t) = trackers.iter().find(|t| t.energy > TARGET_ENERGY) {
            return Err(Error::InvalidParameter(format!(
                "E(Iu(0)) = {:.6e} exceeds 1/2 at N = {}; rescale the datum or lower its amplitude",
                t.energy,
                t.prof.cutoff()
            )));
        }
    }

    let inc = SplittingIncrement::new(&grid, dt, spec.nonlinearity);
    let mut monitor = spec.center.map(BoundaryMonitor::new);
    let mut prev: Option<WaveState> = None;
    let mut next_interval = 0;
    let result = evolve_observed(initial, spec.t_span, dt, 1, spec.nonlinearity, |k, state| {
        if let Some(before) = &prev {
            let samples: Vec<Option<StepSample>> = if spec.check_commutator {
                let carry: Vec<Option<f64>> = trackers.iter().map(|t| t.carry).collect();
                inc.step(before, state, &profiles, &carry)?
                    .into_iter()
                    .map(Some)
                    .collect()
            } else {
                vec![None; trackers.len()]
            };
            for (t, sample) in trackers.iter_mut().zip(samples) {
                match sample {
                    Some(s) => {
                        t.energy = s.energy_after;
                        t.carry = Some(s.free_rate_after);
                        t.commutator += s.increment;
                    }
                    None => t.energy = mollified_flow_energy(state, &t.prof, spec.nonlinearity),
                }
                t.sup = t.sup.max(t.energy);
                t.running_sup = t.running_sup.max(t.energy);
                if t.first_violation.is_none() && t.energy > spec.gate {
                    t.first_violation = Some(state.t);
                }
            }
        }
        if k % spec.stride == 0 {
            for t in trackers.iter_mut() {
                t.out.energy.push(state, &t.prof)?;
            }
            if let Some(m) = monitor.as_mut() {
                m.observe(state);
            }
        }
        if next_interval < ends.len() && k == ends[next_interval] {
            let j = &intervals[next_interval];
            for t in trackers.iter_mut() {
                t.out.intervals.push(IntervalRecord {
                    a: j.a + t0,
                    b: j.b + t0,
                    e_start: t.e_start,
                    sup: t.sup,
                    increment: (t.sup - t.e_start).max(0.0),
                    delta_e: t.energy - t.e_start,
                    commutator: spec.check_commutator.then_some(t.commutator),
                });
                t.out.sup_e_iu.push(t.running_sup);
                t.e_start = t.energy;
                t.sup = t.energy;
                t.commutator = 0.0;
            }
            next_interval += 1;
        }
        prev = Some(state.clone());
        Ok(())
    });
    let failure = match result {
        Ok(_) => None,
        Err(e @ Error::BlowUp { .. }) => Some(e.to_string()),
        Err(e) => return Err(e),
    };
    let ledgers = trackers
        .into_iter()
        .map(|t| {
            let mut out = t.out;
            out.gate = BootstrapGate {
                threshold: spec.gate,
                passed: t.first_violation.is_none(),
                first_violation: t.first_violation,
            };
            out
        })
        .collect();
    Ok(AlmostConservationRun {
        dt,
        steps,
        ledgers,
        boundary: monitor.map(|m| BoundaryReport {
            center: m.center,
            first_reach: m.first_reach,
            max_fraction: m.max_fraction,
        }),
        failure,
        final_state: prev,
    })
}
