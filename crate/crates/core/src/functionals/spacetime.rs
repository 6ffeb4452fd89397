//! Mixed `L_t^q L_x^r` norms over snapshot lattices, wave-admissible
//! exponents and the `Z` diagnostics built from them.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::dynamics::{duhamel_series, SubInterval, Trajectory, WaveState};
use crate::par::{self, Exec};
use crate::spectral::{self, fractional_derivative, smoothing_i, MultiplierProfile, SpectralField, ZeroModeRule};
use crate::{Error, Result};

const EXPONENT_SLACK: f64 = 1e-12;

/// Which member of the state a norm looks at.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Component {
    U,
    Ut,
}

/// Spatial weight `D^σ` or `D^σ I` applied before taking norms.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Weight {
    pub sigma: f64,
    pub smoothing: Option<MultiplierProfile>,
    pub zero_mode: ZeroModeRule,
}

impl Weight {
    pub fn none() -> Self {
        Self::d(0.0)
    }

    pub fn d(sigma: f64) -> Self {
        Self {
            sigma,
            smoothing: None,
            zero_mode: ZeroModeRule::Reject,
        }
    }

    pub fn d_i(sigma: f64, prof: MultiplierProfile) -> Self {
        Self {
            sigma,
            smoothing: Some(prof),
            zero_mode: ZeroModeRule::Reject,
        }
    }

    /// Drops the mean instead of rejecting it for `σ < 0`.
    pub fn dropping_mean(mut self) -> Self {
        self.zero_mode = ZeroModeRule::Zero;
        self
    }

    pub fn apply(&self, f: &SpectralField) -> Result<SpectralField> {
        let g = match &self.smoothing {
            Some(p) => smoothing_i(f, p),
            None => f.clone(),
        };
        fractional_derivative(&g, self.sigma, self.zero_mode)
    }
}

/// `(vol·Σ|f(x)|^r)^{1/r}` on the sample lattice.
pub fn lebesgue_norm(f: &SpectralField, r: f64) -> Result<f64> {
    if !(r >= 1.0) || r.is_infinite() {
        return Err(Error::Admissibility(format!(
            "spatial exponent r = {r} must be finite and at least 1"
        )));
    }
    let x = spectral::physical(f);
    let sum = par::sum_ranges(Exec::default(), x.len(), |rg| {
        x[rg].iter().map(|v| v.abs().powf(r)).sum()
    });
    Ok((f.grid().cell_volume() * sum).powf(1.0 / r))
}

/// Trapezoid `L^q` norm of uniformly spaced samples; `q = ∞` is the max.
pub fn temporal_norm(values: &[f64], spacing: f64, q: f64) -> f64 {
    match values.len() {
        0 => 0.0,
        _ if q.is_infinite() => values.iter().fold(0.0, |m, v| m.max(v.abs())),
        1 => 0.0,
        len => {
            let inner: f64 = values[1..len - 1].iter().map(|v| v.abs().powf(q)).sum();
            let ends = 0.5 * (values[0].abs().powf(q) + values[len - 1].abs().powf(q));
            (spacing * (inner + ends)).powf(1.0 / q)
        }
    }
}

fn check_exponents(q: f64, r: f64) -> Result<()> {
    if r.is_infinite() {
        return Err(Error::Admissibility(
            "r = ∞ is outside the admissible range [2, ∞)".into(),
        ));
    }
    if !(q >= 1.0) {
        return Err(Error::Admissibility(format!("time exponent q = {q} must be at least 1")));
    }
    Ok(())
}

/// `‖w(component)‖_{L_t^q L_x^r}` over uniformly spaced states.
pub fn mixed_norm_of_states(
    states: &[WaveState],
    spacing: f64,
    q: f64,
    r: f64,
    component: Component,
    weight: &Weight,
) -> Result<f64> {
    check_exponents(q, r)?;
    let per_time = states
        .iter()
        .map(|s| {
            let f = match component {
                Component::U => &s.u,
                Component::Ut => &s.ut,
            };
            lebesgue_norm(&weight.apply(f)?, r)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(temporal_norm(&per_time, spacing, q))
}

/// `‖w(component)‖_{L_t^q(J) L_x^r}` on the snapshots of `traj` inside
/// `J` (endpoints snapped).
pub fn mixed_spacetime_norm(
    traj: &Trajectory,
    j: &SubInterval,
    q: f64,
    r: f64,
    component: Component,
    weight: &Weight,
) -> Result<f64> {
    check_exponents(q, r)?;
    let (ia, ib) = traj.snap(j)?;
    mixed_norm_of_states(&traj.states[ia..=ib], traj.spacing(), q, r, component, weight)
}

/// Reason an exponent pair is not `m`-wave admissible.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Rejection {
    TimeExponent { q: f64 },
    SpaceExponent { r: f64 },
    WaveCondition { sum: f64 },
    DerivativeIndex { m: f64 },
}

impl fmt::Display for Rejection {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Rejection::TimeExponent { q } => write!(f, "q = {q} is not in (2, ∞]"),
            Rejection::SpaceExponent { r } => write!(f, "r = {r} is not in [2, ∞)"),
            Rejection::WaveCondition { sum } => {
                write!(f, "1/q + 1/r = {sum} exceeds 1/2")
            }
            Rejection::DerivativeIndex { m } => {
                write!(f, "m = 3/2 − 1/q − 3/r = {m} is not in [0, 1]")
            }
        }
    }
}

/// `m = 3/2 − 1/q − 3/r` when `(q, r)` is wave admissible with `m ∈ [0, 1]`.
pub fn admissible_check(q: f64, r: f64) -> std::result::Result<f64, Rejection> {
    if !(q > 2.0) || q.is_nan() {
        return Err(Rejection::TimeExponent { q });
    }
    if !(r >= 2.0) || r.is_infinite() {
        return Err(Rejection::SpaceExponent { r });
    }
    let sum = 1.0 / q + 1.0 / r;
    if sum > 0.5 + EXPONENT_SLACK {
        return Err(Rejection::WaveCondition { sum });
    }
    let m = 1.5 - 1.0 / q - 3.0 / r;
    if m < -EXPONENT_SLACK || m > 1.0 + EXPONENT_SLACK {
        return Err(Rejection::DerivativeIndex { m });
    }
    Ok(m.clamp(0.0, 1.0))
}

/// Wave-admissible `(q, r)` with its derivative index `m`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AdmissiblePair {
    pub q: f64,
    pub r: f64,
    pub m: f64,
}

impl AdmissiblePair {
    pub fn new(q: f64, r: f64) -> Result<Self> {
        admissible_check(q, r)
            .map(|m| Self { q, r, m })
            .map_err(|e| Error::Admissibility(format!("({q}, {r}): {e}")))
    }
}

impl fmt::Display for AdmissiblePair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let q = if self.q.is_infinite() {
            "inf".to_string()
        } else {
            format!("{}", self.q)
        };
        write!(f, "(q={q}, r={}, m={})", self.r, self.m)
    }
}

/// `(∞,2)`, `(8,8/3)`, `(6,6)`, `(4,4)` and `(6,3)`.
pub fn default_pairs() -> Vec<AdmissiblePair> {
    [
        (f64::INFINITY, 2.0),
        (8.0, 8.0 / 3.0),
        (6.0, 6.0),
        (4.0, 4.0),
        (6.0, 3.0),
    ]
    .into_iter()
    .map(|(q, r)| AdmissiblePair::new(q, r).expect("default pairs are admissible"))
    .collect()
}

/// `(16/7, 16)`: a finite stand-in for the `L_t^{2+}L_x^{∞−}` endpoint.
pub fn endpoint_proxy_pair() -> AdmissiblePair {
    AdmissiblePair::new(16.0 / 7.0, 16.0).expect("proxy pair is admissible")
}

/// `Z`-value with the pair that attains it.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ZNorm {
    pub value: f64,
    pub argmax: AdmissiblePair,
    pub per_pair: Vec<(AdmissiblePair, f64)>,
}

/// `max_{pairs} ‖D^{1−m} Iu‖_{L^q L^r} + ‖D^{−m} ∂ₜIu‖_{L^q L^r}` over
/// uniformly spaced states. The mean of `∂ₜIu` is dropped where `D^{−m}`
/// would be singular.
pub fn z_norm_of_states(
    states: &[WaveState],
    spacing: f64,
    prof: &MultiplierProfile,
    pairs: &[AdmissiblePair],
) -> Result<ZNorm> {
    if pairs.is_empty() {
        return Err(Error::Admissibility("empty pair list".into()));
    }
    let mut per_pair = Vec::with_capacity(pairs.len());
    for p in pairs {
        let a = mixed_norm_of_states(
            states,
            spacing,
            p.q,
            p.r,
            Component::U,
            &Weight::d_i(1.0 - p.m, *prof),
        )?;
        let b = mixed_norm_of_states(
            states,
            spacing,
            p.q,
            p.r,
            Component::Ut,
            &Weight::d_i(-p.m, *prof).dropping_mean(),
        )?;
        per_pair.push((*p, a + b));
    }
    let (argmax, value) = per_pair
        .iter()
        .copied()
        .fold(None::<(AdmissiblePair, f64)>, |best, (p, v)| match best {
            Some((_, bv)) if bv >= v => best,
            _ => Some((p, v)),
        })
        .expect("nonempty");
    Ok(ZNorm {
        value,
        argmax,
        per_pair,
    })
}

pub fn z_norm(
    traj: &Trajectory,
    j: &SubInterval,
    prof: &MultiplierProfile,
    pairs: &[AdmissiblePair],
) -> Result<ZNorm> {
    if pairs.is_empty() {
        return Err(Error::Admissibility("empty pair list".into()));
    }
    let (ia, ib) = traj.snap(j)?;
    z_norm_of_states(&traj.states[ia..=ib], traj.spacing(), prof, pairs)
}

/// Measured `‖∂ₜIu^{nl,J}‖_{L⁶L³} + ‖DIu^{nl,J}‖_{L⁶L³}` and the reference
/// growth `max(1,|J|)^{2/3}`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GainReport {
    pub value: f64,
    pub predicted: f64,
    pub length: f64,
}

pub fn nonlinear_gain_norm(
    traj: &Trajectory,
    j: &SubInterval,
    prof: &MultiplierProfile,
) -> Result<GainReport> {
    let series = duhamel_series(traj, j)?;
    let h = traj.spacing();
    let a = mixed_norm_of_states(&series, h, 6.0, 3.0, Component::Ut, &Weight::d_i(0.0, *prof))?;
    let b = mixed_norm_of_states(&series, h, 6.0, 3.0, Component::U, &Weight::d_i(1.0, *prof))?;
    let (ia, ib) = traj.snap(j)?;
    let length = traj.states[ib].t - traj.states[ia].t;
    Ok(GainReport {
        value: a + b,
        predicted: length.max(1.0).powf(2.0 / 3.0),
        length,
    })
}
