use serde::{Deserialize, Serialize};

use crate::dynamics::{Nonlinearity, WaveState};
use crate::par::{self, Exec};
use crate::spectral::{self, smoothing_i, MultiplierProfile, SpectralField};

/// The three terms of `E(u) = ½∫u_t² + ½∫|Du|² + ¼∫u⁴`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct EnergyParts {
    pub kinetic: f64,
    pub gradient: f64,
    pub potential: f64,
}

impl EnergyParts {
    pub fn total(&self) -> f64 {
        self.kinetic + self.gradient + self.potential
    }

    /// Quadratic (free-wave) part.
    pub fn free(&self) -> f64 {
        self.kinetic + self.gradient
    }
}

/// `∫|Df|²` by Plancherel.
pub(crate) fn gradient_integral(f: &SpectralField) -> f64 {
    let omega = crate::dynamics::frequencies(f.grid());
    let c = f.coefficients();
    f.grid().cell_volume()
        * par::sum_ranges(Exec::default(), c.len(), |r| {
            r.map(|i| omega[i] * omega[i] * c[i].norm_sqr()).sum()
        })
}

/// `∫ (Pf)⁴` on the sample lattice, `P` the dealiasing projection.
pub(crate) fn quartic_integral(f: &SpectralField) -> f64 {
    let x = spectral::physical(&spectral::dealias(f));
    f.grid().cell_volume()
        * par::sum_ranges(Exec::default(), x.len(), |r| {
            x[r].iter().map(|v| (v * v) * (v * v)).sum()
        })
}

/// Energy terms. Quadratic parts are exact Plancherel sums; the quartic
/// term is the lattice Riemann sum of the dealiased field, which makes the
/// total an exact invariant of the dealiased semi-discrete flow.
pub fn energy_parts(state: &WaveState) -> EnergyParts {
    EnergyParts {
        kinetic: 0.5 * state.ut.integral_of_square(),
        gradient: 0.5 * gradient_integral(&state.u),
        potential: 0.25 * quartic_integral(&state.u),
    }
}

pub fn energy(state: &WaveState) -> f64 {
    energy_parts(state).total()
}

/// `I` applied to both components.
pub fn smooth_state(state: &WaveState, prof: &MultiplierProfile) -> WaveState {
    WaveState {
        t: state.t,
        u: smoothing_i(&state.u, prof),
        ut: smoothing_i(&state.ut, prof),
    }
}

/// `E(Iu)`.
pub fn mollified_energy(state: &WaveState, prof: &MultiplierProfile) -> f64 {
    energy(&smooth_state(state, prof))
}

/// Conserved energy of the flow `u_tt = Δu − σu³`: the quartic term enters
/// with weight `σ` (so it is absent for the free flow).
pub fn flow_energy(state: &WaveState, nonlinearity: Nonlinearity) -> f64 {
    let p = energy_parts(state);
    p.free() + nonlinearity.sign() * p.potential
}

/// `flow_energy` of `Iu`; equals [`mollified_energy`] for the defocusing flow.
pub fn mollified_flow_energy(state: &WaveState, prof: &MultiplierProfile, nonlinearity: Nonlinearity) -> f64 {
    flow_energy(&smooth_state(state, prof), nonlinearity)
}

/// Quadratic energy, conserved exactly by the free flow.
pub fn free_energy(state: &WaveState) -> f64 {
    energy_parts(state).free()
}
