//! Littlewood-Paley projections on the lattice.
//!
//! The bump `φ` is radial, equal to 1 on `|ξ| ≤ 1`, vanishes for `|ξ| ≥ 2`,
//! and decreases through the quintic smoothstep in between. `ψ(ξ) = φ(ξ) −
//! φ(2ξ)` is supported in `1/2 < |ξ| < 2`, and the dyadic sum of `ψ(ξ/M)`
//! telescopes to 1 away from the origin.

use super::field::SpectralField;
use super::grid::Grid3;
use super::multiplier::scale_radial_in_place;

/// Dyadic frequency scale `M = 2^exponent`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct DyadicShell {
    exponent: i32,
}

impl DyadicShell {
    pub fn new(exponent: i32) -> Self {
        Self { exponent }
    }

    /// The dyadic shell `M ≤ radius < 2M` containing `radius > 0`.
    pub fn containing(radius: f64) -> Self {
        Self::new(radius.log2().floor() as i32)
    }

    pub fn exponent(&self) -> i32 {
        self.exponent
    }

    pub fn magnitude(&self) -> f64 {
        (self.exponent as f64).exp2()
    }

    pub fn next(&self) -> Self {
        Self::new(self.exponent + 1)
    }
}

/// Which part of the spectrum [`lp_project`] keeps.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LpMode {
    /// `P_M`, symbol `ψ(ξ/M)`.
    At,
    /// `P_{≤M}`, symbol `φ(ξ/M)`.
    Below,
    /// `P_{>M}`, symbol `1 − φ(ξ/M)`.
    Above,
}

#[inline]
pub fn phi(radius: f64) -> f64 {
    if radius <= 1.0 {
        1.0
    } else if radius >= 2.0 {
        0.0
    } else {
        let t = radius - 1.0;
        1.0 - t * t * t * (10.0 - 15.0 * t + 6.0 * t * t)
    }
}

#[inline]
pub fn psi(radius: f64) -> f64 {
    phi(radius) - phi(2.0 * radius)
}

pub fn lp_project(field: &SpectralField, shell: DyadicShell, mode: LpMode) -> SpectralField {
    let m = shell.magnitude();
    let mut out = field.clone();
    match mode {
        LpMode::At => scale_radial_in_place(&mut out, |r| psi(r / m)),
        LpMode::Below => scale_radial_in_place(&mut out, |r| phi(r / m)),
        LpMode::Above => scale_radial_in_place(&mut out, |r| 1.0 - phi(r / m)),
    }
    out
}

/// One piece of a lattice Littlewood-Paley decomposition.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Band {
    /// `P_{≤M}` below the first annulus; on the lattice it holds only the mean.
    Low(DyadicShell),
    /// `P_M`.
    Annulus(DyadicShell),
}

impl Band {
    /// Representative frequency scale of the band.
    pub fn scale(&self) -> f64 {
        match self {
            Band::Low(s) | Band::Annulus(s) => s.magnitude(),
        }
    }

    pub fn label(&self) -> String {
        match self {
            Band::Low(s) => format!("low{}", s.exponent()),
            Band::Annulus(s) => format!("{}", s.exponent()),
        }
    }

    pub fn project(&self, field: &SpectralField) -> SpectralField {
        match *self {
            Band::Low(s) => lp_project(field, s, LpMode::Below),
            Band::Annulus(s) => lp_project(field, s, LpMode::At),
        }
    }
}

/// Bands whose projections sum to the identity on the lattice.
///
/// The first annulus is the largest `M ≤ 2π/L` (so `φ(2ξ/M)` vanishes on
/// every nonzero lattice point), the last the smallest `M ≥ max |ξ|`. Shells
/// below the smallest nonzero `|ξ|` are skipped; the `Low` band before the
/// first annulus carries the mean.
pub fn lattice_bands(grid: &Grid3) -> Vec<Band> {
    let first = DyadicShell::containing(grid.frequency_step());
    let last = DyadicShell::new(grid.max_radial().log2().ceil() as i32);
    let mut bands = vec![Band::Low(DyadicShell::new(first.exponent() - 1))];
    let mut s = first;
    while s <= last {
        bands.push(Band::Annulus(s));
        s = s.next();
    }
    bands
}

/// `(band, projection)` for every band of [`lattice_bands`].
pub fn lp_decompose(field: &SpectralField) -> Vec<(Band, SpectralField)> {
    lattice_bands(field.grid())
        .into_iter()
        .map(|b| (b, b.project(field)))
        .collect()
}
