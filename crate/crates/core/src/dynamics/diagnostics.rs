use num_complex::Complex64;

use super::state::WaveState;
use crate::par::{self, Exec};
use crate::spectral::{self, Grid3, SpectralField};

/// Fraction of energy that must reach the boundary shell before it is
/// reported.
pub const BOUNDARY_THRESHOLD: f64 = 1e-6;

/// `∫ ∂ₜu ∇u dx`.
pub fn momentum(state: &WaveState) -> [f64; 3] {
    let grid = state.grid();
    let vol = grid.cell_volume();
    let (u, ut) = (state.u.coefficients(), state.ut.coefficients());
    let mut out = [0.0; 3];
    for (axis, slot) in out.iter_mut().enumerate() {
        *slot = vol
            * par::sum_ranges(Exec::default(), u.len(), |r| {
                r.map(|i| {
                    let xi = grid.frequency(i)[axis];
                    // Re(ût · conj(iξ û))
                    (ut[i] * (Complex64::i() * xi * u[i]).conj()).re
                })
                .sum()
            });
    }
    out
}

/// Physical `∂ⱼu` samples for the three axes.
pub(crate) fn gradient(u: &SpectralField) -> [Vec<f64>; 3] {
    let grid = *u.grid();
    let n = grid.n() as i64;
    std::array::from_fn(|axis| {
        let mut d = u.clone();
        for (i, c) in d.coefficients_mut().iter_mut().enumerate() {
            let k = grid.wavenumber(i);
            // the Nyquist plane has no real derivative
            *c = if k[axis] == -n / 2 {
                Complex64::new(0.0, 0.0)
            } else {
                *c * Complex64::new(0.0, grid.frequency(i)[axis])
            };
        }
        spectral::physical(&d)
    })
}

/// Pointwise energy density `½u_t² + ½|∇u|² + ¼(Pu)⁴` in physical space.
pub fn energy_density(state: &WaveState) -> Vec<f64> {
    let ut = spectral::physical(&state.ut);
    let pu = spectral::physical(&spectral::dealias(&state.u));
    let grad = gradient(&state.u);
    (0..ut.len())
        .map(|i| {
            let g2 = grad[0][i].powi(2) + grad[1][i].powi(2) + grad[2][i].powi(2);
            0.5 * ut[i] * ut[i] + 0.5 * g2 + 0.25 * pu[i].powi(4)
        })
        .collect()
}

/// Points within `L/16` of the faces of the periodic cell centered at
/// `center` (periodic ∞-distance at least `7L/16`).
pub fn in_boundary_shell(grid: &Grid3, index: usize, center: [f64; 3]) -> bool {
    let l = grid.box_length();
    let x = grid.position(index);
    (0..3).any(|a| {
        let d = (x[a] - center[a]).rem_euclid(l);
        d.min(l - d) >= 7.0 * l / 16.0
    })
}

/// Share of the total energy located in the boundary shell.
pub fn boundary_energy_fraction(state: &WaveState, center: [f64; 3]) -> f64 {
    let grid = *state.grid();
    let e = energy_density(state);
    let total: f64 = e.iter().sum();
    if total <= 0.0 {
        return 0.0;
    }
    let shell: f64 = e
        .iter()
        .enumerate()
        .filter(|(i, _)| in_boundary_shell(&grid, *i, center))
        .map(|(_, v)| v)
        .sum();
    shell / total
}

/// Records the first time the boundary fraction reaches
/// [`BOUNDARY_THRESHOLD`].
#[derive(Clone, Debug, Default)]
pub struct BoundaryMonitor {
    pub center: [f64; 3],
    pub first_reach: Option<f64>,
    pub max_fraction: f64,
}

impl BoundaryMonitor {
    pub fn new(center: [f64; 3]) -> Self {
        Self {
            center,
            first_reach: None,
            max_fraction: 0.0,
        }
    }

    pub fn observe(&mut self, state: &WaveState) {
        let f = boundary_energy_fraction(state, self.center);
        self.max_fraction = self.max_fraction.max(f);
        if self.first_reach.is_none() && f >= BOUNDARY_THRESHOLD {
            self.first_reach = Some(state.t);
        }
    }
}
