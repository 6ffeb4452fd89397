use serde::{Deserialize, Serialize};

use super::propagate::{Nonlinearity, StrangStepper};
use super::state::WaveState;
use crate::{Error, Result};

/// Snapshots of a run at uniform spacing `dt·stride`.
#[derive(Clone, Debug)]
pub struct Trajectory {
    pub dt: f64,
    pub stride: usize,
    pub nonlinearity: Nonlinearity,
    pub states: Vec<WaveState>,
}

/// Closed time interval `J = [a, b]`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SubInterval {
    pub a: f64,
    pub b: f64,
}

impl SubInterval {
    pub fn new(a: f64, b: f64) -> Result<Self> {
        if !(a.is_finite() && b.is_finite() && a < b) {
            return Err(Error::InvalidParameter(format!(
                "sub-interval needs a < b, got [{a}, {b}]"
            )));
        }
        Ok(Self { a, b })
    }

    pub fn length(&self) -> f64 {
        self.b - self.a
    }
}

/// Counts returned by a streamed evolution.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EvolveSummary {
    /// Step actually used (never larger than the requested one).
    pub dt: f64,
    pub stride: usize,
    pub steps: usize,
    pub snapshots: usize,
}

/// Splits `horizon` into a whole number of strides with a step no larger
/// than `dt`, so the final state lands on the snapshot lattice.
pub fn step_plan(horizon: f64, dt: f64, stride: usize) -> Result<(usize, f64)> {
    if !(horizon > 0.0 && horizon.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "horizon {horizon} must be positive"
        )));
    }
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "time step {dt} must be positive"
        )));
    }
    if stride == 0 {
        return Err(Error::InvalidParameter("stride must be at least 1".into()));
    }
    let chunk = dt * stride as f64;
    let blocks = ((horizon / chunk) * (1.0 - 1e-12)).ceil().max(1.0) as usize;
    let steps = blocks * stride;
    Ok((steps, horizon / steps as f64))
}

/// Streams the initial state and every `stride`-th state to `observer`,
/// which receives the snapshot index. Nothing is retained.
pub fn evolve_observed<F>(
    initial: &WaveState,
    horizon: f64,
    dt: f64,
    stride: usize,
    nonlinearity: Nonlinearity,
    mut observer: F,
) -> Result<EvolveSummary>
where
    F: FnMut(usize, &WaveState) -> Result<()>,
{
    let (steps, dt_eff) = step_plan(horizon, dt, stride)?;
    let stepper = StrangStepper::new(initial.grid(), dt_eff, nonlinearity)?;
    let mut state = initial.clone();
    let t0 = state.t;
    observer(0, &state)?;
    let blocks = steps / stride;
    for b in 1..=blocks {
        let blow_up = Error::BlowUp {
            step: b * stride,
            last_good: b - 1,
        };
        match stepper.advance(&mut state, stride) {
            Ok(()) => {}
            Err(Error::Overflow { .. }) => return Err(blow_up),
            Err(e) => return Err(e),
        }
        if !state.is_finite() {
            return Err(blow_up);
        }
        state.t = t0 + (b * stride) as f64 * dt_eff;
        observer(b, &state)?;
    }
    Ok(EvolveSummary {
        dt: dt_eff,
        stride,
        steps,
        snapshots: blocks + 1,
    })
}

/// Runs Strang steps up to `t₀ + horizon`, retaining snapshots.
pub fn evolve(
    initial: &WaveState,
    horizon: f64,
    dt: f64,
    stride: usize,
    nonlinearity: Nonlinearity,
) -> Result<Trajectory> {
    let mut states = Vec::new();
    let summary = evolve_observed(initial, horizon, dt, stride, nonlinearity, |_, s| {
        states.push(s.clone());
        Ok(())
    })?;
    Ok(Trajectory {
        dt: summary.dt,
        stride,
        nonlinearity,
        states,
    })
}

impl Trajectory {
    pub fn spacing(&self) -> f64 {
        self.dt * self.stride as f64
    }

    pub fn times(&self) -> Vec<f64> {
        self.states.iter().map(|s| s.t).collect()
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn start(&self) -> f64 {
        self.states.first().map_or(0.0, |s| s.t)
    }

    pub fn end(&self) -> f64 {
        self.states.last().map_or(0.0, |s| s.t)
    }

    /// Snapshot index nearest to `t`; `t` may overhang the span by half a
    /// spacing.
    pub fn nearest_index(&self, t: f64) -> Result<usize> {
        if self.states.is_empty() {
            return Err(Error::Trajectory("empty trajectory".into()));
        }
        let h = self.spacing();
        let slack = 0.5 * h;
        if !(t >= self.start() - slack && t <= self.end() + slack) {
            return Err(Error::OutsideInterval {
                t,
                a: self.start(),
                b: self.end(),
            });
        }
        let i = ((t - self.start()) / h).round().max(0.0) as usize;
        Ok(i.min(self.states.len() - 1))
    }

    /// Endpoints of `J` snapped to snapshot indices.
    pub fn snap(&self, j: &SubInterval) -> Result<(usize, usize)> {
        let ia = self.nearest_index(j.a)?;
        let ib = self.nearest_index(j.b)?;
        if ib <= ia {
            return Err(Error::Trajectory(format!(
                "interval [{}, {}] is shorter than one snapshot spacing",
                j.a, j.b
            )));
        }
        Ok((ia, ib))
    }

    /// Checks strictly increasing, uniformly spaced times.
    pub fn validate(&self) -> Result<()> {
        let h = self.spacing();
        for (i, w) in self.states.windows(2).enumerate() {
            let gap = w[1].t - w[0].t;
            if !(gap > 0.0) || (gap - h).abs() > 1e-9 * h.max(1.0) {
                return Err(Error::Trajectory(format!(
                    "snapshot {} breaks uniform spacing {h} (gap {gap})",
                    i + 1
                )));
            }
        }
        Ok(())
    }
}
