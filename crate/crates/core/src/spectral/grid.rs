use std::f64::consts::PI;

use crate::{Error, Result};

/// Periodic box `[0, L)³` sampled with `n` points per axis.
///
/// Storage is row-major over `(i0, i1, i2)` with `i2` fastest. In Fourier
/// space index `i` along an axis carries the signed wavenumber
/// `k = i` for `i < n/2` and `k = i − n` otherwise, so
/// `k ∈ {−n/2, …, n/2 − 1}` and `ξ = (2π/L)·k`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Grid3 {
    n: usize,
    box_length: f64,
}

impl Grid3 {
    pub fn new(n: usize, box_length: f64) -> Result<Self> {
        if n < 8 || !n.is_power_of_two() {
            return Err(Error::InvalidGrid(format!(
                "n = {n} must be a power of two and at least 8"
            )));
        }
        if !(box_length.is_finite() && box_length > 0.0) {
            return Err(Error::InvalidGrid(format!(
                "box length {box_length} must be finite and positive"
            )));
        }
        Ok(Self { n, box_length })
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn box_length(&self) -> f64 {
        self.box_length
    }

    /// Total number of lattice points, `n³`.
    #[inline]
    pub fn len(&self) -> usize {
        self.n * self.n * self.n
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    #[inline]
    pub fn spacing(&self) -> f64 {
        self.box_length / self.n as f64
    }

    /// Volume of one lattice cell, `(L/n)³`; the Riemann-sum weight.
    #[inline]
    pub fn cell_volume(&self) -> f64 {
        self.spacing().powi(3)
    }

    /// Lattice spacing in frequency, `2π/L`.
    #[inline]
    pub fn frequency_step(&self) -> f64 {
        2.0 * PI / self.box_length
    }

    /// Nyquist magnitude `(2π/L)·(n/2)`.
    pub fn nyquist(&self) -> f64 {
        self.frequency_step() * (self.n / 2) as f64
    }

    /// Largest `|ξ|` on the lattice (the corner `k = (−n/2, −n/2, −n/2)`).
    pub fn max_radial(&self) -> f64 {
        self.nyquist() * 3f64.sqrt()
    }

    /// Conservative step bound `0.5·L/n` for the split-step integrator.
    pub fn stability_bound(&self) -> f64 {
        0.5 * self.spacing()
    }

    /// Same lattice on a box `factor` times larger.
    pub fn scaled(&self, factor: f64) -> Result<Self> {
        Self::new(self.n, self.box_length * factor)
    }

    #[inline]
    pub fn signed(&self, i: usize) -> i64 {
        let n = self.n as i64;
        let i = i as i64;
        if i < n / 2 {
            i
        } else {
            i - n
        }
    }

    #[inline]
    pub fn unsigned(&self, k: i64) -> usize {
        k.rem_euclid(self.n as i64) as usize
    }

    #[inline]
    pub fn split(&self, index: usize) -> [usize; 3] {
        let n = self.n;
        [index / (n * n), (index / n) % n, index % n]
    }

    #[inline]
    pub fn join(&self, i: [usize; 3]) -> usize {
        (i[0] * self.n + i[1]) * self.n + i[2]
    }

    /// Signed wavenumber triple of a storage index.
    #[inline]
    pub fn wavenumber(&self, index: usize) -> [i64; 3] {
        let [a, b, c] = self.split(index);
        [self.signed(a), self.signed(b), self.signed(c)]
    }

    pub fn index_of(&self, k: [i64; 3]) -> usize {
        self.join([self.unsigned(k[0]), self.unsigned(k[1]), self.unsigned(k[2])])
    }

    /// Storage index of `−k` (modulo the lattice).
    #[inline]
    pub fn conjugate_index(&self, index: usize) -> usize {
        let n = self.n;
        let [a, b, c] = self.split(index);
        self.join([(n - a) % n, (n - b) % n, (n - c) % n])
    }

    pub fn frequency(&self, index: usize) -> [f64; 3] {
        let dk = self.frequency_step();
        let k = self.wavenumber(index);
        [dk * k[0] as f64, dk * k[1] as f64, dk * k[2] as f64]
    }

    #[inline]
    pub fn radial(&self, index: usize) -> f64 {
        let [a, b, c] = self.frequency(index);
        (a * a + b * b + c * c).sqrt()
    }

    /// `|ξ|²` per axis index, used to build radial tables quickly.
    pub(crate) fn axis_squares(&self) -> Vec<f64> {
        let dk = self.frequency_step();
        (0..self.n)
            .map(|i| {
                let k = self.signed(i) as f64 * dk;
                k * k
            })
            .collect()
    }

    /// Physical coordinate of a sample index.
    pub fn position(&self, index: usize) -> [f64; 3] {
        let h = self.spacing();
        let [a, b, c] = self.split(index);
        [a as f64 * h, b as f64 * h, c as f64 * h]
    }

    /// True when every component satisfies `|k_i| < n/4`, the band kept by
    /// the cubic dealiasing rule.
    #[inline]
    pub fn in_dealiased_band(&self, index: usize) -> bool {
        let q = (self.n / 4) as i64;
        self.wavenumber(index).iter().all(|k| k.abs() < q)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_sizes() {
        assert!(Grid3::new(4, 1.0).is_err());
        assert!(Grid3::new(12, 1.0).is_err());
        assert!(Grid3::new(16, 0.0).is_err());
        assert!(Grid3::new(16, f64::NAN).is_err());
        assert!(Grid3::new(16, 1.0).is_ok());
    }

    #[test]
    fn enumeration_is_a_bijection() {
        let g = Grid3::new(8, 2.0).unwrap();
        let mut seen = vec![false; g.len()];
        for idx in 0..g.len() {
            let k = g.wavenumber(idx);
            assert!(k.iter().all(|&c| (-4..4).contains(&c)));
            let back = g.index_of(k);
            assert_eq!(back, idx);
            assert!(!seen[back]);
            seen[back] = true;
            let neg = g.conjugate_index(idx);
            assert_eq!(g.conjugate_index(neg), idx);
        }
        assert!(seen.into_iter().all(|s| s));
    }

    #[test]
    fn nyquist_and_spacing() {
        let g = Grid3::new(16, 2.0 * PI).unwrap();
        assert_eq!(g.frequency_step(), 1.0);
        assert_eq!(g.nyquist(), 8.0);
        assert!(g.nyquist() > 0.0);
        assert!((g.stability_bound() - 0.5 * 2.0 * PI / 16.0).abs() < 1e-15);
    }
}
