use crate::spectral::{Grid3, SpectralField};
use crate::{Error, Result};

/// `(u, ∂ₜu)` at time `t`.
#[derive(Clone, Debug, PartialEq)]
pub struct WaveState {
    pub t: f64,
    pub u: SpectralField,
    pub ut: SpectralField,
}

impl WaveState {
    pub fn new(t: f64, u: SpectralField, ut: SpectralField) -> Result<Self> {
        if u.grid() != ut.grid() {
            return Err(Error::InvalidParameter(
                "u and ∂ₜu live on different grids".into(),
            ));
        }
        Ok(Self { t, u, ut })
    }

    pub fn zero(grid: Grid3) -> Self {
        Self {
            t: 0.0,
            u: SpectralField::zeros(grid),
            ut: SpectralField::zeros(grid),
        }
    }

    pub fn grid(&self) -> &Grid3 {
        self.u.grid()
    }

    pub fn is_finite(&self) -> bool {
        self.t.is_finite() && self.u.is_finite() && self.ut.is_finite()
    }

    /// Componentwise difference (time taken from `self`).
    pub fn sub(&self, other: &WaveState) -> WaveState {
        WaveState {
            t: self.t,
            u: self.u.sub(&other.u),
            ut: self.ut.sub(&other.ut),
        }
    }

    pub fn add_assign(&mut self, other: &WaveState) {
        self.u.add_scaled(&other.u, 1.0);
        self.ut.add_scaled(&other.ut, 1.0);
    }
}
