use serde::{Deserialize, Serialize};

use crate::dynamics::WaveState;
use crate::par::{self, Exec};
use crate::spectral::SpectralField;
use crate::{Error, Result};

/// `‖u‖_{H^s}`, `‖u_t‖_{H^{s−1}}` and their sum.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SobolevNorm {
    pub u: f64,
    pub ut: f64,
}

impl SobolevNorm {
    /// `‖(u, u_t)‖_{H^s×H^{s−1}} = ‖u‖_{H^s} + ‖u_t‖_{H^{s−1}}`.
    pub fn total(&self) -> f64 {
        self.u + self.ut
    }
}

const MEAN_ZERO_TOLERANCE: f64 = 1e-12;

/// `‖(1+D)^s f‖_{L²}` or, if `homogeneous`, `‖D^s f‖_{L²}`.
pub fn field_norm(f: &SpectralField, s: f64, homogeneous: bool) -> Result<f64> {
    if !s.is_finite() {
        return Err(Error::InvalidParameter(format!("Sobolev index {s}")));
    }
    let c = f.coefficients();
    if homogeneous && s < 0.0 {
        let scale = f.l2_norm_squared().sqrt();
        if c[0].norm() > MEAN_ZERO_TOLERANCE * scale.max(f64::MIN_POSITIVE) {
            return Err(Error::NonzeroMean {
                sigma: s,
                mean: f.mean(),
            });
        }
    }
    let omega = crate::dynamics::frequencies(f.grid());
    let weight = |r: f64| -> f64 {
        if homogeneous {
            if r == 0.0 {
                if s == 0.0 {
                    1.0
                } else {
                    0.0
                }
            } else {
                r.powf(2.0 * s)
            }
        } else {
            (1.0 + r).powf(2.0 * s)
        }
    };
    let sum = par::sum_ranges(Exec::default(), c.len(), |r| {
        r.map(|i| weight(omega[i]) * c[i].norm_sqr()).sum()
    });
    Ok((f.grid().cell_volume() * sum).sqrt())
}

/// Norms of `u` in `H^s` and `u_t` in `H^{s−1}` (homogeneous variants on
/// request; a negative homogeneous index needs a mean-zero component).
pub fn sobolev_norm(state: &WaveState, s: f64, homogeneous: bool) -> Result<SobolevNorm> {
    Ok(SobolevNorm {
        u: field_norm(&state.u, s, homogeneous)?,
        ut: field_norm(&state.ut, s - 1.0, homogeneous)?,
    })
}
