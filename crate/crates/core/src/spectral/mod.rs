//! Periodic-box Fourier infrastructure.
//!
//! Transforms are unitary: `c_k = n^{-3/2} Σ_x f(x) e^{-iξ_k·x}`, so the
//! ℓ² norm of the samples equals the ℓ² norm of the coefficients (the
//! Plancherel constant is 1). Continuous integrals are lattice sums weighted
//! by the cell volume `(L/n)³`.

mod data;
mod fft;
mod field;
mod grid;
mod littlewood_paley;
mod multiplier;
pub mod snapshot;

pub use data::{synthesize_initial_data, Recipe, RECIPE_NAMES};
pub use fft::{Direction, Fft3};
pub use field::{SpectralField, HERMITIAN_TOLERANCE};
pub use grid::Grid3;
pub use littlewood_paley::{
    lattice_bands, lp_decompose, lp_project, phi, psi, Band, DyadicShell, LpMode,
};
pub use multiplier::{
    apply_radial_multiplier, dealias, fractional_derivative, smoothing_i, MultiplierProfile,
    ZeroModeRule,
};

pub(crate) use multiplier::{dealias_in_place, radial_table};

/// Physical samples of `field` (no symmetry check).
pub(crate) fn physical(field: &SpectralField) -> Vec<f64> {
    field.to_physical(crate::par::Exec::default())
}

/// Forward transform of trusted samples, symmetrized.
pub(crate) fn spectral(samples: &[f64], grid: Grid3) -> SpectralField {
    SpectralField::from_physical_unchecked(samples, grid, crate::par::Exec::default())
}
