//! Exact free-wave flow, the dealiased cubic kick and their Strang
//! composition.

use std::collections::VecDeque;
use std::sync::{Arc, Mutex, OnceLock};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::state::WaveState;
use crate::par::{self, Exec};
use crate::spectral::{self, Grid3, SpectralField};
use crate::{Error, Result};

/// Sign convention of the cubic term in `∂ₜₜu − Δu = −σu³`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Nonlinearity {
    /// `σ = +1`, the coercive case.
    #[default]
    Defocusing,
    /// `σ = −1`.
    Focusing,
    /// `σ = 0`: the free wave equation.
    Off,
}

impl Nonlinearity {
    pub fn sign(self) -> f64 {
        match self {
            Nonlinearity::Defocusing => 1.0,
            Nonlinearity::Focusing => -1.0,
            Nonlinearity::Off => 0.0,
        }
    }
}

/// `|ξ|` tables are reused across calls on the same grid.
pub(crate) fn frequencies(grid: &Grid3) -> Arc<Vec<f64>> {
    type Cache = Mutex<VecDeque<((usize, u64), Arc<Vec<f64>>)>>;
    static CACHE: OnceLock<Cache> = OnceLock::new();
    let key = (grid.n(), grid.box_length().to_bits());
    let cache = CACHE.get_or_init(|| Mutex::new(VecDeque::new()));
    let mut guard = cache.lock().expect("frequency cache poisoned");
    if let Some((_, t)) = guard.iter().find(|(k, _)| *k == key) {
        return t.clone();
    }
    let table = Arc::new(spectral::radial_table(grid));
    if guard.len() >= 4 {
        guard.pop_front();
    }
    guard.push_back((key, table.clone()));
    table
}

/// Precomputed free-wave flow over a fixed time `tau`.
///
/// Per mode with `ω = |ξ|`:
/// `û ← cos(ωτ)û + sin(ωτ)/ω·ût`, `ût ← −ω sin(ωτ)û + cos(ωτ)ût`,
/// with `sin(ωτ)/ω → τ` at `ω = 0`.
pub struct Propagator {
    tau: f64,
    grid: Grid3,
    cos: Vec<f64>,
    sinc: Vec<f64>,
    wsin: Vec<f64>,
}

impl Propagator {
    pub fn new(grid: &Grid3, tau: f64) -> Self {
        let omega = frequencies(grid);
        let mut cos = vec![0.0; grid.len()];
        let mut sinc = vec![0.0; grid.len()];
        let mut wsin = vec![0.0; grid.len()];
        par::for_each_chunk_mut(Exec::default(), &mut cos, par::REDUCE_CHUNK, |ci, c| {
            let base = ci * par::REDUCE_CHUNK;
            for (j, v) in c.iter_mut().enumerate() {
                *v = (omega[base + j] * tau).cos();
            }
        });
        par::for_each_chunk_mut(Exec::default(), &mut sinc, par::REDUCE_CHUNK, |ci, c| {
            let base = ci * par::REDUCE_CHUNK;
            for (j, v) in c.iter_mut().enumerate() {
                let w = omega[base + j];
                *v = if w == 0.0 { tau } else { (w * tau).sin() / w };
            }
        });
        par::for_each_chunk_mut(Exec::default(), &mut wsin, par::REDUCE_CHUNK, |ci, c| {
            let base = ci * par::REDUCE_CHUNK;
            for (j, v) in c.iter_mut().enumerate() {
                let w = omega[base + j];
                *v = w * (w * tau).sin();
            }
        });
        Self {
            tau,
            grid: *grid,
            cos,
            sinc,
            wsin,
        }
    }

    pub fn tau(&self) -> f64 {
        self.tau
    }

    /// `(sin(ωτ)/ω, cos(ωτ))` per lattice index.
    pub(crate) fn tables(&self) -> (&[f64], &[f64]) {
        (&self.sinc, &self.cos)
    }

    pub fn apply(&self, state: &mut WaveState) {
        debug_assert_eq!(*state.grid(), self.grid);
        let (u, ut) = (&mut state.u, &mut state.ut);
        let ut_c = ut.coefficients_mut();
        let u_c = u.coefficients_mut();
        let chunk = par::REDUCE_CHUNK;
        // pair up u and ut chunks
        let pairs: Vec<(&mut [Complex64], &mut [Complex64])> =
            u_c.chunks_mut(chunk).zip(ut_c.chunks_mut(chunk)).collect();
        apply_pairs(pairs, |ci, a, b| {
            let base = ci * chunk;
            for j in 0..a.len() {
                let (c, s, ws) = (self.cos[base + j], self.sinc[base + j], self.wsin[base + j]);
                let (x, v) = (a[j], b[j]);
                a[j] = x * c + v * s;
                b[j] = v * c - x * ws;
            }
        });
        state.t += self.tau;
    }

    /// Flow of the pure-velocity state `(0, g)`, i.e. the Duhamel kernel
    /// `(sin(ωτ)/ω·g, cos(ωτ)·g)`.
    pub fn kernel(&self, g: &SpectralField) -> (SpectralField, SpectralField) {
        let mut u = g.clone();
        let mut ut = g.clone();
        par::zip_apply(Exec::default(), u.coefficients_mut(), &self.sinc, |_, c, &s| {
            *c *= s
        });
        par::zip_apply(Exec::default(), ut.coefficients_mut(), &self.cos, |_, c, &s| {
            *c *= s
        });
        (u, ut)
    }
}

#[cfg(feature = "parallel")]
pub(crate) fn apply_pairs<F>(pairs: Vec<(&mut [Complex64], &mut [Complex64])>, f: F)
where
    F: Fn(usize, &mut [Complex64], &mut [Complex64]) + Sync + Send,
{
    use rayon::prelude::*;
    pairs
        .into_par_iter()
        .enumerate()
        .for_each(|(i, (a, b))| f(i, a, b));
}

#[cfg(not(feature = "parallel"))]
pub(crate) fn apply_pairs<F>(pairs: Vec<(&mut [Complex64], &mut [Complex64])>, f: F)
where
    F: Fn(usize, &mut [Complex64], &mut [Complex64]),
{
    for (i, (a, b)) in pairs.into_iter().enumerate() {
        f(i, a, b);
    }
}

/// Exact solution of the free wave equation over `dt` (any sign).
pub fn linear_propagate(state: &WaveState, dt: f64) -> WaveState {
    let mut out = state.clone();
    if dt != 0.0 {
        Propagator::new(state.grid(), dt).apply(&mut out);
    }
    out
}

/// Dealiased cube `P((Pu)³)` where `P` keeps `|k_i| < n/4`.
pub fn cubic_forcing(u: &SpectralField) -> Result<SpectralField> {
    let mut low = u.clone();
    spectral::dealias_in_place(&mut low);
    let mut x = spectral::physical(&low);
    let max_abs = par::max_ranges(Exec::default(), x.len(), |r| {
        x[r].iter().fold(0.0f64, |m, v| m.max(v.abs()))
    });
    if !(max_abs.powi(3)).is_finite() {
        return Err(Error::Overflow { max_abs });
    }
    par::for_each_chunk_mut(Exec::default(), &mut x, par::REDUCE_CHUNK, |_, c| {
        for v in c {
            *v = *v * *v * *v;
        }
    });
    let mut cube = spectral::spectral(&x, *u.grid());
    spectral::dealias_in_place(&mut cube);
    Ok(cube)
}

/// `ût ← ût − σ·dt·P((Pu)³)`; `u` is unchanged.
pub fn nonlinear_kick(state: &WaveState, dt: f64, nonlinearity: Nonlinearity) -> Result<WaveState> {
    let mut out = state.clone();
    kick_in_place(&mut out, dt, nonlinearity)?;
    Ok(out)
}

pub(crate) fn kick_in_place(state: &mut WaveState, dt: f64, nl: Nonlinearity) -> Result<()> {
    let sign = nl.sign();
    if sign == 0.0 {
        return Ok(());
    }
    let force = cubic_forcing(&state.u)?;
    state.ut.add_scaled(&force, -sign * dt);
    Ok(())
}

fn check_step(grid: &Grid3, dt: f64) -> Result<()> {
    let bound = grid.stability_bound();
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "time step {dt} must be positive"
        )));
    }
    if dt > bound * (1.0 + 1e-12) {
        return Err(Error::UnstableStep { dt, bound });
    }
    Ok(())
}

/// Default step: a quarter of [`Grid3::stability_bound`].
pub fn default_dt(grid: &Grid3) -> f64 {
    0.25 * grid.stability_bound()
}

/// `L(dt/2) ∘ K(dt) ∘ L(dt/2)`.
pub fn step_strang(state: &WaveState, dt: f64, nonlinearity: Nonlinearity) -> Result<WaveState> {
    check_step(state.grid(), dt)?;
    let half = Propagator::new(state.grid(), 0.5 * dt);
    let mut out = state.clone();
    half.apply(&mut out);
    kick_in_place(&mut out, dt, nonlinearity)?;
    half.apply(&mut out);
    Ok(out)
}

/// Reusable stepper for repeated Strang steps of one size. Consecutive half
/// flows between recorded states are fused into one full flow.
pub struct StrangStepper {
    dt: f64,
    nonlinearity: Nonlinearity,
    half: Propagator,
    full: Propagator,
}

impl StrangStepper {
    pub fn new(grid: &Grid3, dt: f64, nonlinearity: Nonlinearity) -> Result<Self> {
        check_step(grid, dt)?;
        Ok(Self {
            dt,
            nonlinearity,
            half: Propagator::new(grid, 0.5 * dt),
            full: Propagator::new(grid, dt),
        })
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    /// Advances `steps` Strang steps in place. `t` is set exactly to
    /// `t₀ + steps·dt`.
    pub fn advance(&self, state: &mut WaveState, steps: usize) -> Result<()> {
        if steps == 0 {
            return Ok(());
        }
        let t0 = state.t;
        self.half.apply(state);
        for i in 0..steps {
            kick_in_place(state, self.dt, self.nonlinearity)?;
            if i + 1 < steps {
                self.full.apply(state);
            }
        }
        self.half.apply(state);
        state.t = t0 + steps as f64 * self.dt;
        Ok(())
    }
}
