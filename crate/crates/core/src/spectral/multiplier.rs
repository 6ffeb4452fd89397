//! Radial Fourier multipliers: the shared kernel, `D^σ`, the smoothing
//! operator `I` and the dealiasing projection.

use serde::{Deserialize, Serialize};

use super::field::SpectralField;
use super::grid::Grid3;
use crate::par::{self, Exec};
use crate::{Error, Result};

/// Radial magnitudes `|ξ_k|` in storage order.
pub(crate) fn radial_table(grid: &Grid3) -> Vec<f64> {
    let sq = grid.axis_squares();
    let n = grid.n();
    let mut out = vec![0.0; grid.len()];
    par::for_each_chunk_mut(Exec::default(), &mut out, n * n, |a, plane| {
        for b in 0..n {
            for c in 0..n {
                plane[b * n + c] = (sq[a] + sq[b] + sq[c]).sqrt();
            }
        }
    });
    out
}

/// Multiplies coefficient `k` by `symbol(|ξ_k|)` with no validation.
pub(crate) fn scale_radial_in_place<F>(field: &mut SpectralField, symbol: F)
where
    F: Fn(f64) -> f64 + Sync + Send,
{
    let radii = radial_table(field.grid());
    par::zip_apply(Exec::default(), field.coefficients_mut(), &radii, |_, c, &r| {
        *c *= symbol(r)
    });
}

/// Applies `symbol(|ξ|)` to every coefficient.
///
/// `at_zero` overrides the value at `ξ = 0` (for symbols with a removable
/// singularity there). Any non-finite symbol value on the lattice is an
/// error.
pub fn apply_radial_multiplier<F>(
    field: &SpectralField,
    symbol: F,
    at_zero: Option<f64>,
) -> Result<SpectralField>
where
    F: Fn(f64) -> f64 + Sync + Send,
{
    let radii = radial_table(field.grid());
    let values: Vec<f64> = radii
        .iter()
        .enumerate()
        .map(|(i, &r)| match (i, at_zero) {
            (0, Some(v)) => v,
            _ => symbol(r),
        })
        .collect();
    if let Some((i, _)) = values.iter().enumerate().find(|(_, v)| !v.is_finite()) {
        return Err(Error::NanSymbol {
            magnitude: radii[i],
        });
    }
    let mut out = field.clone();
    par::zip_apply(Exec::default(), out.coefficients_mut(), &values, |_, c, &v| {
        *c *= v
    });
    Ok(out)
}

/// How `D^σ` with `σ < 0` treats the `ξ = 0` coefficient.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum ZeroModeRule {
    /// Refuse fields with a nonzero mean.
    #[default]
    Reject,
    /// Drop the mean.
    Zero,
}

/// Relative size below which the mean coefficient counts as zero.
const MEAN_ZERO_TOLERANCE: f64 = 1e-12;

/// `D^σ`, the multiplier `|ξ|^σ`. For `σ > 0` the mean is annihilated.
pub fn fractional_derivative(
    field: &SpectralField,
    sigma: f64,
    rule: ZeroModeRule,
) -> Result<SpectralField> {
    if !sigma.is_finite() {
        return Err(Error::InvalidParameter(format!("derivative order {sigma}")));
    }
    if sigma == 0.0 {
        return Ok(field.clone());
    }
    if sigma < 0.0 && rule == ZeroModeRule::Reject {
        let c0 = field.coefficients()[0].norm();
        let scale = field.l2_norm_squared().sqrt();
        if c0 > MEAN_ZERO_TOLERANCE * scale.max(f64::MIN_POSITIVE) {
            return Err(Error::NonzeroMean {
                sigma,
                mean: field.mean(),
            });
        }
    }
    apply_radial_multiplier(field, |r| r.powf(sigma), Some(0.0))
}

/// Parameters of the smoothing multiplier `m(ξ) = η(ξ/N)`:
///
/// * `m = 1` for `|ξ| ≤ N`,
/// * `m = (N/|ξ|)^{1−s}` for `|ξ| ≥ 2N`,
/// * on `N < |ξ| < 2N`, `ln m` is the quintic in `ln(|ξ|/N)` matching value,
///   slope and curvature of both neighbours, which keeps `m` C², radial and
///   nonincreasing.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MultiplierProfile {
    s: f64,
    cutoff: f64,
}

impl MultiplierProfile {
    /// `s ∈ (1/2, 1)`, `cutoff` a power of two `≥ 1`.
    pub fn new(s: f64, cutoff: f64) -> Result<Self> {
        if !(s > 0.5 && s < 1.0) {
            return Err(Error::InvalidParameter(format!(
                "regularity s = {s} must lie in the open interval (1/2, 1)"
            )));
        }
        if !(cutoff >= 1.0 && cutoff.is_finite() && cutoff.log2().fract() == 0.0) {
            return Err(Error::InvalidParameter(format!(
                "cutoff N = {cutoff} must be a dyadic number >= 1"
            )));
        }
        Ok(Self { s, cutoff })
    }

    /// Profile with an arbitrary positive cutoff; used where scaling moves
    /// the cutoff off the dyadic lattice.
    pub(crate) fn with_any_cutoff(s: f64, cutoff: f64) -> Self {
        debug_assert!(cutoff > 0.0);
        Self { s, cutoff }
    }

    #[inline]
    pub fn s(&self) -> f64 {
        self.s
    }

    #[inline]
    pub fn cutoff(&self) -> f64 {
        self.cutoff
    }

    /// `m(|ξ|)`.
    #[inline]
    pub fn m(&self, radius: f64) -> f64 {
        let n = self.cutoff;
        if radius <= n {
            return 1.0;
        }
        let decay = 1.0 - self.s;
        if radius >= 2.0 * n {
            return (n / radius).powf(decay);
        }
        let h = std::f64::consts::LN_2;
        let t = (radius / n).ln() / h;
        // ln m = −(1−s)·h·(6t³ − 8t⁴ + 3t⁵)
        let poly = t * t * t * (6.0 - 8.0 * t + 3.0 * t * t);
        (-decay * h * poly).exp()
    }

    /// `d m / d|ξ|`, used by the mean-value bound checks.
    pub fn dm(&self, radius: f64) -> f64 {
        let n = self.cutoff;
        if radius <= n {
            return 0.0;
        }
        let decay = 1.0 - self.s;
        if radius >= 2.0 * n {
            return -decay * self.m(radius) / radius;
        }
        let h = std::f64::consts::LN_2;
        let t = (radius / n).ln() / h;
        let dpoly = t * t * (18.0 - 32.0 * t + 15.0 * t * t);
        // d(ln m)/dr = −(1−s)·h·poly'(t)·dt/dr, dt/dr = 1/(h r)
        -decay * dpoly / radius * self.m(radius)
    }
}

/// `I f`, the smoothing operator with symbol `m`.
pub fn smoothing_i(field: &SpectralField, profile: &MultiplierProfile) -> SpectralField {
    let mut out = field.clone();
    scale_radial_in_place(&mut out, |r| profile.m(r));
    out
}

/// Keeps only `|k_i| < n/4` on every axis. For a cubic product of fields in
/// this band no aliased mode lands back inside the band.
pub fn dealias(field: &SpectralField) -> SpectralField {
    let mut out = field.clone();
    dealias_in_place(&mut out);
    out
}

pub(crate) fn dealias_in_place(field: &mut SpectralField) {
    let grid = *field.grid();
    let q = grid.n() / 4;
    let n = grid.n();
    let keep = |i: usize| i < q || i > n - q;
    par::for_each_chunk_mut(Exec::default(), field.coefficients_mut(), n * n, |a, plane| {
        for b in 0..n {
            for c in 0..n {
                if !(keep(a) && keep(b) && keep(c)) {
                    plane[b * n + c] = num_complex::Complex64::new(0.0, 0.0);
                }
            }
        }
    });
}
