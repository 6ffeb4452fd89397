//! `dE(Iu)/dt` as a physical-space commutator and its time integral.
//!
//! With the dealiased flow `u_tt = Δu − σP((Pu)³)` and its energy evaluated
//! on `Iu`, `E_σ(Iu) = ½∫(∂ₜIu)² + ½∫|DIu|² + (σ/4)∫(PIu)⁴`,
//!
//! `dE_σ(Iu)/dt = σ(⟨PI u_t, (PIu)³⟩ − ⟨PI² u_t, (Pu)³⟩)`,
//!
//! which for `σ = 1` is `∫ ∂ₜIu·((Iu)³ − I(u³))` with every product
//! dealiased: the Fourier side of this pairing is the quadrilinear integral
//! with symbol `μ`. The free flow (`σ = 0`) conserves `E_0(Iu)` exactly.

use serde::{Deserialize, Serialize};

use crate::dynamics::{cubic_forcing, Nonlinearity, Propagator, SubInterval, Trajectory, WaveState};
use crate::functionals::{gradient_integral, mollified_flow_energy, smooth_state};
use crate::par::{self, Exec};
use crate::spectral::{self, smoothing_i, Grid3, MultiplierProfile, SpectralField};
use crate::Result;

/// `P f` in physical space.
pub(crate) fn dealiased_samples(f: &SpectralField) -> Vec<f64> {
    spectral::physical(&spectral::dealias(f))
}

/// `Σ a·b³ − w·Σ c·d³`, times the cell volume.
pub(crate) fn pair_difference(a: &[f64], b: &[f64], c: &[f64], d: &[f64], w: f64, vol: f64) -> f64 {
    vol * par::sum_ranges(Exec::default(), a.len(), |r| {
        r.map(|i| a[i] * b[i] * b[i] * b[i] - w * c[i] * d[i] * d[i] * d[i])
            .sum()
    })
}

/// Instantaneous `dE(Iu)/dt` along the flow with the given nonlinearity.
pub fn commutator_rate(state: &WaveState, prof: &MultiplierProfile, nl: Nonlinearity) -> f64 {
    let iut = smoothing_i(&state.ut, prof);
    let a = dealiased_samples(&iut);
    let b = dealiased_samples(&smoothing_i(&state.u, prof));
    let c = dealiased_samples(&smoothing_i(&iut, prof));
    let d = dealiased_samples(&state.u);
    nl.sign() * pair_difference(&a, &b, &c, &d, 1.0, state.grid().cell_volume())
}

/// Time quadrature used for the rate.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RateQuadrature {
    /// Trapezoid rule on the snapshot lattice.
    Trapezoid,
    /// Nodes aligned with the Strang substeps of a stride-1 trajectory: the
    /// `⟨PIu_t,(PIu)³⟩` term by Simpson's rule on each free half step (the
    /// free flow is exact, so midpoints are available), the
    /// `⟨PI²u_t, P((Pu)³)⟩` term at the kick with the mean of the velocities
    /// on either side. Along the discrete trajectory this tracks `ΔE(Iu)` to
    /// fourth order in the step, whereas the trapezoid rule on the rate of
    /// the continuous flow carries the second-order splitting defect.
    Splitting,
}

/// Integrated commutator against the direct energy difference on `J`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct IncrementCheck {
    pub a: f64,
    pub b: f64,
    /// `∫_J dE_σ(Iu)/dt dt`.
    pub commutator: f64,
    /// `E_σ(Iu(b)) − E_σ(Iu(a))`.
    pub delta_e: f64,
    pub quadrature: RateQuadrature,
}

impl IncrementCheck {
    /// `|commutator − ΔE| / max(|ΔE|, 10⁻¹²)`.
    pub fn relative_mismatch(&self) -> f64 {
        (self.commutator - self.delta_e).abs() / self.delta_e.abs().max(1e-12)
    }
}

/// Trapezoid integral of uniformly spaced samples.
pub(crate) fn trapezoid(values: &[f64], h: f64) -> f64 {
    match values.len() {
        0 | 1 => 0.0,
        n => h * (values[1..n - 1].iter().sum::<f64>() + 0.5 * (values[0] + values[n - 1])),
    }
}

/// `PIf` in physical space.
fn smoothed_samples(f: &SpectralField, prof: &MultiplierProfile) -> Vec<f64> {
    dealiased_samples(&smoothing_i(f, prof))
}

fn cube_pairing(a: &[f64], b: &[f64], vol: f64) -> f64 {
    pair_difference(a, b, a, b, 0.0, vol)
}

/// What one Strang step contributes for one profile.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StepSample {
    /// `∫ dE_σ(Iu)/dt` over the step.
    pub increment: f64,
    /// `E_σ(Iu)` at the end of the step.
    pub energy_after: f64,
    /// `⟨PIu_t,(PIu)³⟩` at the end of the step; pass it back as the carry.
    pub free_rate_after: f64,
}

/// States inside one Strang step `S(h) = L(h/2)·K(h)·L(h/2)`: `s1` after the
/// first free half step, `s2` after the kick, `q1`/`q2` the midpoints of the
/// two free half steps, `ut_mid` the mean velocity across the kick.
pub struct Substates {
    pub s1: WaveState,
    pub s2: WaveState,
    pub q1: WaveState,
    pub q2: WaveState,
    pub ut_mid: SpectralField,
}

/// Simpson weights (in units of `h`) of the free-flow nodes
/// `before, q1, s1, s2, q2, after`.
pub(crate) const SPLIT_WEIGHTS: [f64; 6] = [1.0 / 12.0, 4.0 / 12.0, 1.0 / 12.0, 1.0 / 12.0, 4.0 / 12.0, 1.0 / 12.0];

/// Commutator integral over single Strang steps of size `h`, for several
/// profiles at once so the Strang sub-states are built only once.
pub struct SplittingIncrement {
    nonlinearity: Nonlinearity,
    h: f64,
    forward: Propagator,
    backward: Propagator,
    quarter: Propagator,
}

impl SplittingIncrement {
    pub fn new(grid: &Grid3, h: f64, nonlinearity: Nonlinearity) -> Self {
        Self {
            nonlinearity,
            h,
            forward: Propagator::new(grid, 0.5 * h),
            backward: Propagator::new(grid, -0.5 * h),
            quarter: Propagator::new(grid, 0.25 * h),
        }
    }

    /// `⟨PIu_t,(PIu)³⟩` at a single state.
    pub fn free_rate(state: &WaveState, prof: &MultiplierProfile) -> f64 {
        cube_pairing(
            &smoothed_samples(&state.ut, prof),
            &smoothed_samples(&state.u, prof),
            state.grid().cell_volume(),
        )
    }

    pub fn h(&self) -> f64 {
        self.h
    }

    /// Intermediate states of the step from `before` to `after`.
    pub fn substates(&self, before: &WaveState, after: &WaveState) -> Substates {
        let mut s1 = before.clone();
        self.forward.apply(&mut s1);
        let mut back = after.clone();
        self.backward.apply(&mut back);
        let s2 = WaveState { t: s1.t, u: s1.u.clone(), ut: back.ut };
        let mut q1 = before.clone();
        self.quarter.apply(&mut q1);
        let mut q2 = s2.clone();
        self.quarter.apply(&mut q2);
        let mut ut_mid = s1.ut.clone();
        ut_mid.add_scaled(&s2.ut, 1.0);
        let ut_mid = ut_mid.scaled(0.5);
        Substates { s1, s2, q1, q2, ut_mid }
    }

    /// Integrates the rate from `before` to `after = S(h)·before` for every
    /// profile. `carry[i]` may hold the free rate of profile `i` at
    /// `before` (from the previous step's [`StepSample::free_rate_after`]).
    pub fn step(
        &self,
        before: &WaveState,
        after: &WaveState,
        profiles: &[MultiplierProfile],
        carry: &[Option<f64>],
    ) -> Result<Vec<StepSample>> {
        assert_eq!(profiles.len(), carry.len());
        let vol = before.grid().cell_volume();
        let Substates { s1, s2, q1, q2, ut_mid } = self.substates(before, after);
        let sign = self.nonlinearity.sign();
        let forcing = if sign == 0.0 { None } else { Some(cubic_forcing(&s1.u)?) };
        let mut out = Vec::with_capacity(profiles.len());
        for (p, c) in profiles.iter().zip(carry) {
            let r0 = c.unwrap_or_else(|| Self::free_rate(before, p));
            let iu1 = smoothed_samples(&s1.u, p);
            let r1 = cube_pairing(&smoothed_samples(&s1.ut, p), &iu1, vol);
            let r2 = cube_pairing(&smoothed_samples(&s2.ut, p), &iu1, vol);
            let rq1 = Self::free_rate(&q1, p);
            let rq2 = Self::free_rate(&q2, p);
            let iu3 = smoothed_samples(&after.u, p);
            let r3 = cube_pairing(&smoothed_samples(&after.ut, p), &iu3, vol);
            let kick = match &forcing {
                Some(f) => sign * self.h * vol * smoothing_i(&smoothing_i(&ut_mid, p), p).dot(f),
                None => 0.0,
            };
            let quartic = vol * par::sum_ranges(Exec::default(), iu3.len(), |r| {
                iu3[r].iter().map(|v| (v * v) * (v * v)).sum()
            });
            let smooth = smooth_state(after, p);
            let energy_after = 0.5 * smooth.ut.integral_of_square()
                + 0.5 * gradient_integral(&smooth.u)
                + 0.25 * sign * quartic;
            out.push(StepSample {
                increment: sign
                    * self.h
                    * [r0, rq1, r1, r2, rq2, r3]
                        .iter()
                        .zip(SPLIT_WEIGHTS)
                        .map(|(r, w)| r * w)
                        .sum::<f64>()
                    - kick,
                energy_after,
                free_rate_after: r3,
            });
        }
        Ok(out)
    }
}

pub fn energy_increment_commutator(
    traj: &Trajectory,
    j: &SubInterval,
    prof: &MultiplierProfile,
) -> Result<IncrementCheck> {
    let (ia, ib) = traj.snap(j)?;
    let states = &traj.states[ia..=ib];
    let (commutator, quadrature) = if traj.stride == 1 {
        let inc = SplittingIncrement::new(states[0].grid(), traj.dt, traj.nonlinearity);
        let profiles = [*prof];
        let mut total = 0.0;
        let mut carry = [None];
        for w in states.windows(2) {
            let [sample] = inc.step(&w[0], &w[1], &profiles, &carry)?[..] else {
                unreachable!()
            };
            total += sample.increment;
            carry = [Some(sample.free_rate_after)];
        }
        (total, RateQuadrature::Splitting)
    } else {
        let rates: Vec<f64> = states
            .iter()
            .map(|s| commutator_rate(s, prof, traj.nonlinearity))
            .collect();
        (trapezoid(&rates, traj.spacing()), RateQuadrature::Trapezoid)
    };
    Ok(IncrementCheck {
        a: states[0].t,
        b: states[states.len() - 1].t,
        commutator,
        delta_e: mollified_flow_energy(&states[states.len() - 1], prof, traj.nonlinearity)
            - mollified_flow_energy(&states[0], prof, traj.nonlinearity),
        quadrature,
    })
}
