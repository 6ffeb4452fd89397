//! Analytic initial-data recipes and their synthesis on a grid.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::field::SpectralField;
use super::grid::Grid3;
use crate::par::{self, Exec};
use crate::{Error, Result};

pub const RECIPE_NAMES: [&str; 3] = ["gaussian-bump", "plane-wave-packet", "random-sobolev"];

/// Initial-data descriptor. Every analytic recipe is closed under the
/// scaling `u₀ ↦ λ⁻¹u₀(·/λ)`, `u₁ ↦ λ⁻²u₁(·/λ)`; `Snapshot` is raw data and
/// cannot be rescaled.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum Recipe {
    /// `u₀ = A·exp(−|x−c|²/(2w²))`, `u₁ = B·exp(−|x−c|²/(2w²))`.
    /// `center` defaults to the middle of the box.
    GaussianBump {
        amplitude: f64,
        width: f64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        center: Option<[f64; 3]>,
        #[serde(default)]
        velocity: f64,
    },
    /// Gaussian envelope times `cos(k₀·(x−c))`, with `u₁ = −k̂·∇u₀` so the
    /// packet leaves in the direction of `k₀`.
    PlaneWavePacket {
        amplitude: f64,
        width: f64,
        wavevector: [f64; 3],
        #[serde(default, skip_serializing_if = "Option::is_none")]
        center: Option<[f64; 3]>,
    },
    /// Random phases with `|û₀(ξ)| ∝ (1+ℓ|ξ|)^{−(s+3/2)−δ}` and
    /// `|û₁(ξ)| ∝ (1+ℓ|ξ|)^{−(s+1/2)−δ}`, mean zero, restricted to the
    /// dealiased band. `length_scale` ℓ records accumulated rescaling.
    RandomSobolev {
        s: f64,
        roughness: f64,
        amplitude: f64,
        #[serde(default = "one")]
        length_scale: f64,
    },
    /// Raw snapshot file.
    Snapshot { path: String },
}

fn one() -> f64 {
    1.0
}

impl Recipe {
    /// Parses a recipe table, reporting unknown kinds by name.
    pub fn from_toml(value: &toml::Value) -> Result<Self> {
        let kind = value
            .get("kind")
            .and_then(|k| k.as_str())
            .ok_or_else(|| Error::Config("recipe needs a string 'kind'".into()))?;
        if !RECIPE_NAMES.contains(&kind) && kind != "snapshot" {
            return Err(Error::UnknownRecipe {
                name: kind.to_string(),
                valid: RECIPE_NAMES.join(", "),
            });
        }
        value
            .clone()
            .try_into()
            .map_err(|e: toml::de::Error| Error::Config(format!("recipe: {}", e.message())))
    }

    pub fn name(&self) -> &'static str {
        match self {
            Recipe::GaussianBump { .. } => "gaussian-bump",
            Recipe::PlaneWavePacket { .. } => "plane-wave-packet",
            Recipe::RandomSobolev { .. } => "random-sobolev",
            Recipe::Snapshot { .. } => "snapshot",
        }
    }

    /// Radius outside which the data is negligible, if it is localized.
    pub fn support_radius(&self) -> Option<f64> {
        match self {
            Recipe::GaussianBump { width, .. } | Recipe::PlaneWavePacket { width, .. } => {
                Some(3.0 * width)
            }
            _ => None,
        }
    }

    /// Default box side: sixteen support radii.
    pub fn default_box_length(&self) -> Option<f64> {
        self.support_radius().map(|r| 16.0 * r)
    }

    pub fn center(&self) -> Option<[f64; 3]> {
        match self {
            Recipe::GaussianBump { center, .. } | Recipe::PlaneWavePacket { center, .. } => *center,
            _ => None,
        }
    }

    pub(crate) fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidParameter(m));
        match self {
            Recipe::GaussianBump {
                amplitude,
                width,
                velocity,
                ..
            } => {
                if !(width.is_finite() && *width > 0.0) {
                    return bad(format!("gaussian-bump width {width} must be positive"));
                }
                if !amplitude.is_finite() || !velocity.is_finite() {
                    return bad("gaussian-bump amplitudes must be finite".into());
                }
            }
            Recipe::PlaneWavePacket {
                amplitude, width, ..
            } => {
                if !(width.is_finite() && *width > 0.0) || !amplitude.is_finite() {
                    return bad(format!("plane-wave-packet width {width} must be positive"));
                }
            }
            Recipe::RandomSobolev {
                s,
                roughness,
                amplitude,
                length_scale,
            } => {
                if !(*roughness > 0.0) || !s.is_finite() || !amplitude.is_finite() {
                    return bad(format!("random-sobolev needs roughness > 0 (got {roughness})"));
                }
                if !(*length_scale > 0.0) {
                    return bad(format!("random-sobolev length scale {length_scale}"));
                }
            }
            Recipe::Snapshot { .. } => {}
        }
        Ok(())
    }
}

/// Minimum-image displacement `x − c` on the periodic box.
fn displacement(x: [f64; 3], c: [f64; 3], length: f64) -> [f64; 3] {
    let mut d = [0.0; 3];
    for i in 0..3 {
        let mut v = x[i] - c[i];
        v -= length * (v / length).round();
        d[i] = v;
    }
    d
}

fn sample_physical<F>(grid: &Grid3, f: F) -> Vec<f64>
where
    F: Fn([f64; 3]) -> f64 + Sync + Send,
{
    let mut out = vec![0.0; grid.len()];
    let n = grid.n();
    par::for_each_chunk_mut(Exec::default(), &mut out, n * n, |a, plane| {
        for (j, v) in plane.iter_mut().enumerate() {
            *v = f(grid.position(a * n * n + j));
        }
    });
    out
}

/// Builds `(û₀, û₁)` for `recipe` on `grid`. Deterministic in `seed`.
pub fn synthesize_initial_data(
    grid: &Grid3,
    recipe: &Recipe,
    seed: u64,
) -> Result<(SpectralField, SpectralField)> {
    recipe.validate()?;
    let mid = [0.5 * grid.box_length(); 3];
    match recipe {
        Recipe::GaussianBump {
            amplitude,
            width,
            center,
            velocity,
        } => {
            let c = center.unwrap_or(mid);
            let envelope = |x: [f64; 3]| {
                let d = displacement(x, c, grid.box_length());
                (-(d[0] * d[0] + d[1] * d[1] + d[2] * d[2]) / (2.0 * width * width)).exp()
            };
            let u0 = sample_physical(grid, |x| amplitude * envelope(x));
            let u1 = sample_physical(grid, |x| velocity * envelope(x));
            Ok((
                SpectralField::forward_transform(&u0, *grid)?,
                SpectralField::forward_transform(&u1, *grid)?,
            ))
        }
        Recipe::PlaneWavePacket {
            amplitude,
            width,
            wavevector,
            center,
        } => {
            let c = center.unwrap_or(mid);
            let k = *wavevector;
            let kn = (k[0] * k[0] + k[1] * k[1] + k[2] * k[2]).sqrt();
            let khat = if kn > 0.0 {
                [k[0] / kn, k[1] / kn, k[2] / kn]
            } else {
                [0.0; 3]
            };
            let parts = |x: [f64; 3]| {
                let d = displacement(x, c, grid.box_length());
                let g = (-(d[0] * d[0] + d[1] * d[1] + d[2] * d[2]) / (2.0 * width * width)).exp();
                let phase = k[0] * d[0] + k[1] * d[1] + k[2] * d[2];
                let along = khat[0] * d[0] + khat[1] * d[1] + khat[2] * d[2];
                (g, phase, along)
            };
            let u0 = sample_physical(grid, |x| {
                let (g, phase, _) = parts(x);
                amplitude * g * phase.cos()
            });
            let u1 = sample_physical(grid, |x| {
                let (g, phase, along) = parts(x);
                if kn == 0.0 {
                    0.0
                } else {
                    amplitude * g * (along / (width * width) * phase.cos() + kn * phase.sin())
                }
            });
            Ok((
                SpectralField::forward_transform(&u0, *grid)?,
                SpectralField::forward_transform(&u1, *grid)?,
            ))
        }
        Recipe::RandomSobolev {
            s,
            roughness,
            amplitude,
            length_scale,
        } => Ok(random_sobolev(grid, *s, *roughness, *amplitude, *length_scale, seed)),
        Recipe::Snapshot { path } => {
            let snap = super::snapshot::read_snapshot(std::path::Path::new(path))?;
            if snap.header.n as usize != grid.n() {
                return Err(Error::InvalidParameter(format!(
                    "snapshot {path} has n = {}, grid has n = {}",
                    snap.header.n,
                    grid.n()
                )));
            }
            let u = SpectralField::from_coefficients(*grid, snap.u.into_coefficients())?;
            let ut = SpectralField::from_coefficients(*grid, snap.ut.into_coefficients())?;
            Ok((u, ut))
        }
    }
}

/// True for exactly one member of each `{k, −k}` pair with `k ≠ −k`.
fn is_representative(k: [i64; 3]) -> bool {
    k[0] > 0 || (k[0] == 0 && (k[1] > 0 || (k[1] == 0 && k[2] > 0)))
}

fn random_sobolev(
    grid: &Grid3,
    s: f64,
    roughness: f64,
    amplitude: f64,
    ell: f64,
    seed: u64,
) -> (SpectralField, SpectralField) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut u = SpectralField::zeros(*grid);
    let mut ut = SpectralField::zeros(*grid);
    // physical Fourier-series amplitude a_k = A ℓ^{-1} (2πℓ/L)^{3/2} (1+ℓ|ξ|)^{-(s+3/2)-δ};
    // unitary coefficients are n^{3/2} a_k.
    let density = (2.0 * PI * ell / grid.box_length()).powf(1.5);
    let unitary = (grid.len() as f64).sqrt();
    let base_u = amplitude / ell * density * unitary;
    let base_ut = amplitude / (ell * ell) * density * unitary;
    for idx in 0..grid.len() {
        let k = grid.wavenumber(idx);
        if !is_representative(k) || !grid.in_dealiased_band(idx) {
            continue;
        }
        let r = 1.0 + ell * grid.radial(idx);
        let theta_u: f64 = rng.gen_range(0.0..2.0 * PI);
        let theta_ut: f64 = rng.gen_range(0.0..2.0 * PI);
        let cu = Complex64::from_polar(base_u * r.powf(-(s + 1.5) - roughness), theta_u);
        let cut = Complex64::from_polar(base_ut * r.powf(-(s + 0.5) - roughness), theta_ut);
        let neg = grid.conjugate_index(idx);
        u.coefficients_mut()[idx] = cu;
        u.coefficients_mut()[neg] = cu.conj();
        ut.coefficients_mut()[idx] = cut;
        ut.coefficients_mut()[neg] = cut.conj();
    }
    (u, ut)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_amplitude_bump_is_zero() {
        let g = Grid3::new(16, 8.0).unwrap();
        let r = Recipe::GaussianBump {
            amplitude: 0.0,
            width: 0.5,
            center: None,
            velocity: 0.0,
        };
        let (u, ut) = synthesize_initial_data(&g, &r, 1).unwrap();
        assert_eq!(u.l2_norm_squared(), 0.0);
        assert_eq!(ut.l2_norm_squared(), 0.0);
    }

    #[test]
    fn same_seed_same_bits() {
        let g = Grid3::new(16, 8.0).unwrap();
        let r = Recipe::RandomSobolev {
            s: 0.75,
            roughness: 0.05,
            amplitude: 1.0,
            length_scale: 1.0,
        };
        let a = synthesize_initial_data(&g, &r, 42).unwrap();
        let b = synthesize_initial_data(&g, &r, 42).unwrap();
        assert_eq!(a, b);
        let c = synthesize_initial_data(&g, &r, 43).unwrap();
        assert_ne!(a, c);
        assert!(a.0.hermitian_defect().0 == 0.0);
        assert_eq!(a.0.coefficients()[0], Complex64::new(0.0, 0.0));
    }

    #[test]
    fn unknown_recipe_lists_valid_names() {
        let v: toml::Value = toml::from_str("kind = 'top-hat'\namplitude = 1.0").unwrap();
        match Recipe::from_toml(&v) {
            Err(Error::UnknownRecipe { name, valid }) => {
                assert_eq!(name, "top-hat");
                assert!(valid.contains("gaussian-bump") && valid.contains("random-sobolev"));
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn packet_moves_along_wavevector() {
        // u₁ = −k̂·∇u₀ is the velocity of a rigid translation along k̂.
        let g = Grid3::new(32, 16.0).unwrap();
        let r = Recipe::PlaneWavePacket {
            amplitude: 1.0,
            width: 1.5,
            wavevector: [2.0, 0.0, 0.0],
            center: None,
        };
        let (u, ut) = synthesize_initial_data(&g, &r, 0).unwrap();
        let mut grad = u.clone();
        let dk = g.frequency_step();
        for (i, c) in grad.coefficients_mut().iter_mut().enumerate() {
            let k = g.wavenumber(i)[0];
            *c *= if k == -(g.n() as i64) / 2 {
                Complex64::new(0.0, 0.0)
            } else {
                Complex64::new(0.0, dk * k as f64)
            };
        }
        let diff = ut.sub(&grad.scaled(-1.0));
        assert!(diff.l2_norm_squared() / ut.l2_norm_squared() < 1e-12);
    }
}
