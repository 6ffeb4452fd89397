//! The scaling `u_λ(t,x) = λ⁻¹u(t/λ, x/λ)` on analytic recipes and the
//! calibration of `C₀`.
//!
//! On the box `λL` with the same `n`, the lattice of `u_λ` is the lattice of
//! `u` with every frequency divided by `λ`. Every term of the energy then
//! scales the same way, `E(I_N u_λ) = E(I_{λN} u)/λ`, exactly on the
//! lattice, so the search for `λ` never resynthesizes data.

use serde::{Deserialize, Serialize};

use super::params::{lambda_exponent, MAX_DYADIC_EXPONENT};
use crate::dynamics::WaveState;
use crate::functionals::mollified_energy;
use crate::spectral::{Grid3, MultiplierProfile, Recipe};
use crate::{Error, Result};

/// Initial mollified energy the scaling has to reach.
pub const TARGET_ENERGY: f64 = 0.5;

/// Relative width of the final bisection bracket.
pub const CALIBRATION_TOLERANCE: f64 = 1e-3;

/// Rescales an analytic recipe by `λ ≥ 1`. Pair with
/// [`scaled_grid`] so the data keeps its size relative to the box.
pub fn scale_profile(recipe: &Recipe, lambda: f64) -> Result<Recipe> {
    if !(lambda >= 1.0 && lambda.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "scaling factor λ = {lambda} must be finite and >= 1"
        )));
    }
    let scale_center = |c: &Option<[f64; 3]>| c.map(|v| v.map(|x| x * lambda));
    Ok(match recipe {
        Recipe::GaussianBump {
            amplitude,
            width,
            center,
            velocity,
        } => Recipe::GaussianBump {
            amplitude: amplitude / lambda,
            width: width * lambda,
            center: scale_center(center),
            velocity: velocity / (lambda * lambda),
        },
        Recipe::PlaneWavePacket {
            amplitude,
            width,
            wavevector,
            center,
        } => Recipe::PlaneWavePacket {
            amplitude: amplitude / lambda,
            width: width * lambda,
            wavevector: wavevector.map(|k| k / lambda),
            center: scale_center(center),
        },
        Recipe::RandomSobolev {
            s,
            roughness,
            amplitude,
            length_scale,
        } => Recipe::RandomSobolev {
            s: *s,
            roughness: *roughness,
            amplitude: *amplitude,
            length_scale: length_scale * lambda,
        },
        Recipe::Snapshot { path } => {
            return Err(Error::InvalidParameter(format!(
                "snapshot '{path}' is raw grid data and cannot be rescaled without resampling; use an analytic recipe (gaussian-bump, plane-wave-packet, random-sobolev)"
            )))
        }
    })
}

/// Box of side `λL` with the same number of points.
pub fn scaled_grid(grid: &Grid3, lambda: f64) -> Result<Grid3> {
    grid.scaled(lambda)
}

/// `E(I_N u_λ(0))` evaluated on the unscaled data.
pub fn scaled_mollified_energy(initial: &WaveState, s: f64, cutoff: f64, lambda: f64) -> f64 {
    let prof = MultiplierProfile::with_any_cutoff(s, lambda * cutoff);
    mollified_energy(initial, &prof) / lambda
}

/// Outcome of the `C₀` search.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Calibration {
    pub c0: f64,
    pub lambda: f64,
    /// `E(I_N u_λ(0))` at the returned `λ`.
    pub energy: f64,
    /// Largest `λ` known to miss the target (`None` when `λ = 1` suffices).
    pub rejected_lambda: Option<f64>,
    pub evaluations: usize,
}

/// Smallest `λ = C₀N^{2(1−s)/(2s−1)} ≥ 1` with `E(I_N u_λ(0)) ≤ 1/2`, by
/// doubling from `λ = 1` and then bisecting to [`CALIBRATION_TOLERANCE`].
pub fn calibrate_c0(initial: &WaveState, s: f64, cutoff: f64) -> Result<Calibration> {
    MultiplierProfile::new(s, cutoff)?;
    let mut evaluations = 0;
    let mut energy_at = |lambda: f64| {
        evaluations += 1;
        scaled_mollified_energy(initial, s, cutoff, lambda)
    };
    let norm = cutoff.powf(lambda_exponent(s));
    let e1 = energy_at(1.0);
    if !e1.is_finite() {
        return Err(Error::Search(format!("initial mollified energy is not finite ({e1})")));
    }
    if e1 <= TARGET_ENERGY {
        return Ok(Calibration {
            c0: 1.0 / norm,
            lambda: 1.0,
            energy: e1,
            rejected_lambda: None,
            evaluations,
        });
    }
    let mut lo = 1.0;
    let mut hi = 2.0;
    let mut e_hi = energy_at(hi);
    while e_hi > TARGET_ENERGY {
        lo = hi;
        hi *= 2.0;
        if hi > (MAX_DYADIC_EXPONENT as f64 + 1.0).exp2() {
            return Err(Error::Search(format!(
                "no scaling λ below 2^64 brings E(Iu_λ(0)) to 1/2 (datum too rough for the grid); last value {e_hi:.3e}"
            )));
        }
        e_hi = energy_at(hi);
    }
    while (hi - lo) > CALIBRATION_TOLERANCE * hi {
        let mid = 0.5 * (lo + hi);
        let e = energy_at(mid);
        if e <= TARGET_ENERGY {
            hi = mid;
            e_hi = e;
        } else {
            lo = mid;
        }
    }
    Ok(Calibration {
        c0: hi / norm,
        lambda: hi,
        energy: e_hi,
        rejected_lambda: Some(lo),
        evaluations,
    })
}
