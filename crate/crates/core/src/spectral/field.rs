use num_complex::Complex64;

use super::fft::{Direction, Fft3};
use super::grid::Grid3;
use crate::par::{self, Exec};
use crate::{Error, Result};

/// Relative tolerance on `c(−k) = conj(c(k))` accepted by
/// [`SpectralField::inverse_transform`].
pub const HERMITIAN_TOLERANCE: f64 = 1e-9;

/// A real scalar field stored as unitary Fourier coefficients
/// `c_k = n^{-3/2} Σ_x f(x) e^{-iξ_k·x}`.
///
/// With this normalization the sample ℓ² norm equals the coefficient ℓ²
/// norm, and `∫ f² dx ≈ (L/n)³ Σ_k |c_k|²`.
#[derive(Clone, Debug, PartialEq)]
pub struct SpectralField {
    grid: Grid3,
    coeffs: Vec<Complex64>,
}

impl SpectralField {
    pub fn zeros(grid: Grid3) -> Self {
        Self {
            grid,
            coeffs: vec![Complex64::new(0.0, 0.0); grid.len()],
        }
    }

    pub fn from_coefficients(grid: Grid3, coeffs: Vec<Complex64>) -> Result<Self> {
        if coeffs.len() != grid.len() {
            return Err(Error::InvalidParameter(format!(
                "expected {} coefficients, got {}",
                grid.len(),
                coeffs.len()
            )));
        }
        Ok(Self { grid, coeffs })
    }

    /// Forward transform of physical samples (row-major, length `n³`).
    pub fn forward_transform(samples: &[f64], grid: Grid3) -> Result<Self> {
        if samples.len() != grid.len() {
            return Err(Error::InvalidParameter(format!(
                "expected {} samples, got {}",
                grid.len(),
                samples.len()
            )));
        }
        if let Some((index, &value)) = samples.iter().enumerate().find(|(_, v)| !v.is_finite()) {
            return Err(Error::NonFiniteInput { index, value });
        }
        Ok(Self::from_physical_unchecked(samples, grid, Exec::default()))
    }

    pub(crate) fn from_physical_unchecked(samples: &[f64], grid: Grid3, exec: Exec) -> Self {
        let mut coeffs: Vec<Complex64> = samples.iter().map(|&x| Complex64::new(x, 0.0)).collect();
        Fft3::plan(grid.n()).process(&mut coeffs, Direction::Forward, exec);
        let mut field = Self { grid, coeffs };
        field.symmetrize();
        field
    }

    /// Physical samples. Fails when the coefficients are not Hermitian
    /// within [`HERMITIAN_TOLERANCE`]; the imaginary residue is discarded.
    pub fn inverse_transform(&self) -> Result<Vec<f64>> {
        let (defect, k) = self.hermitian_defect();
        if defect > HERMITIAN_TOLERANCE {
            return Err(Error::HermitianViolation {
                k,
                defect,
                tolerance: HERMITIAN_TOLERANCE,
            });
        }
        Ok(self.to_physical(Exec::default()))
    }

    /// Physical samples without the symmetry check.
    pub(crate) fn to_physical(&self, exec: Exec) -> Vec<f64> {
        let mut work = self.coeffs.clone();
        Fft3::plan(self.grid.n()).process(&mut work, Direction::Inverse, exec);
        work.into_iter().map(|z| z.re).collect()
    }

    #[inline]
    pub fn grid(&self) -> &Grid3 {
        &self.grid
    }

    #[inline]
    pub fn coefficients(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub(crate) fn coefficients_mut(&mut self) -> &mut Vec<Complex64> {
        &mut self.coeffs
    }

    pub fn coefficient(&self, k: [i64; 3]) -> Complex64 {
        self.coeffs[self.grid.index_of(k)]
    }

    pub fn into_coefficients(self) -> Vec<Complex64> {
        self.coeffs
    }

    /// Worst relative Hermitian defect `max_k |c(k) − conj c(−k)| / ‖c‖₂`
    /// and the wavenumber where it occurs.
    pub fn hermitian_defect(&self) -> (f64, [i64; 3]) {
        let norm = self.l2_norm_squared().sqrt();
        if norm == 0.0 {
            return (0.0, [0, 0, 0]);
        }
        let mut worst = (0.0, 0usize);
        for (i, c) in self.coeffs.iter().enumerate() {
            let d = (c - self.coeffs[self.grid.conjugate_index(i)].conj()).norm();
            if d > worst.0 {
                worst = (d, i);
            }
        }
        (worst.0 / norm, self.grid.wavenumber(worst.1))
    }

    /// Projects onto Hermitian-symmetric coefficients.
    pub fn symmetrize(&mut self) {
        let g = self.grid;
        for i in 0..self.coeffs.len() {
            let j = g.conjugate_index(i);
            if j < i {
                continue;
            }
            if j == i {
                self.coeffs[i].im = 0.0;
            } else {
                let avg = 0.5 * (self.coeffs[i] + self.coeffs[j].conj());
                self.coeffs[i] = avg;
                self.coeffs[j] = avg.conj();
            }
        }
    }

    /// Lattice `Σ_k |c_k|²` (equal to the sample sum of squares).
    pub fn l2_norm_squared(&self) -> f64 {
        par::sum_ranges(Exec::default(), self.coeffs.len(), |r| {
            self.coeffs[r].iter().map(|c| c.norm_sqr()).sum()
        })
    }

    /// `∫ f² dx` on the box.
    pub fn integral_of_square(&self) -> f64 {
        self.grid.cell_volume() * self.l2_norm_squared()
    }

    /// Spatial mean of the physical field.
    pub fn mean(&self) -> f64 {
        self.coeffs[0].re / (self.grid.len() as f64).sqrt()
    }

    pub fn is_finite(&self) -> bool {
        self.coeffs.iter().all(|c| c.re.is_finite() && c.im.is_finite())
    }

    pub fn scaled(&self, factor: f64) -> Self {
        let mut out = self.clone();
        out.coeffs.iter_mut().for_each(|c| *c *= factor);
        out
    }

    pub fn add_scaled(&mut self, other: &SpectralField, factor: f64) {
        debug_assert_eq!(self.grid, other.grid);
        par::zip_apply(Exec::default(), &mut self.coeffs, &other.coeffs, |_, a, b| {
            *a += b * factor
        });
    }

    pub fn sub(&self, other: &SpectralField) -> SpectralField {
        let mut out = self.clone();
        out.add_scaled(other, -1.0);
        out
    }

    /// Real inner product `Σ_k Re(c_k conj d_k)` (the sample dot product).
    pub fn dot(&self, other: &SpectralField) -> f64 {
        par::sum_ranges(Exec::default(), self.coeffs.len(), |r| {
            self.coeffs[r.clone()]
                .iter()
                .zip(&other.coeffs[r])
                .map(|(a, b)| a.re * b.re + a.im * b.im)
                .sum()
        })
    }

    /// Same field with its grid reinterpreted on a box `factor` times
    /// larger and coefficients multiplied by `amplitude`.
    pub fn rescaled(&self, factor: f64, amplitude: f64) -> Result<Self> {
        Ok(Self {
            grid: self.grid.scaled(factor)?,
            coeffs: self.coeffs.iter().map(|c| c * amplitude).collect(),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::PI;

    fn grid() -> Grid3 {
        Grid3::new(16, 3.0).unwrap()
    }

    fn random_samples(g: &Grid3, seed: u64) -> Vec<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..g.len()).map(|_| rng.gen_range(-1.0..1.0)).collect()
    }

    #[test]
    fn constant_field_has_only_zero_mode() {
        let g = grid();
        let f = SpectralField::forward_transform(&vec![1.0; g.len()], g).unwrap();
        let c0 = f.coefficient([0, 0, 0]);
        assert!((c0.re - (g.len() as f64).sqrt()).abs() < 1e-10);
        for (i, c) in f.coefficients().iter().enumerate().skip(1) {
            assert!(c.norm() < 1e-12, "index {i}");
        }
        assert!((f.mean() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn cosine_is_a_conjugate_pair() {
        let g = grid();
        let samples: Vec<f64> = (0..g.len())
            .map(|i| (g.frequency_step() * g.position(i)[0]).cos())
            .collect();
        let f = SpectralField::forward_transform(&samples, g).unwrap();
        let plus = f.coefficient([1, 0, 0]);
        let minus = f.coefficient([-1, 0, 0]);
        let expected = 0.5 * (g.len() as f64).sqrt();
        assert!((plus.re - expected).abs() < 1e-10 && plus.im.abs() < 1e-10);
        assert!((plus - minus.conj()).norm() < 1e-12);
        let rest: f64 = f
            .coefficients()
            .iter()
            .enumerate()
            .filter(|(i, _)| *i != g.index_of([1, 0, 0]) && *i != g.index_of([-1, 0, 0]))
            .map(|(_, c)| c.norm())
            .fold(0.0, f64::max);
        assert!(rest < 1e-10);
    }

    #[test]
    fn single_pair_inverts_to_cosine() {
        let g = grid();
        let mut f = SpectralField::zeros(g);
        let amp = 0.5 * (g.len() as f64).sqrt();
        f.coefficients_mut()[g.index_of([1, 0, 0])] = Complex64::new(amp, 0.0);
        f.coefficients_mut()[g.index_of([-1, 0, 0])] = Complex64::new(amp, 0.0);
        let x = f.inverse_transform().unwrap();
        for (i, v) in x.iter().enumerate() {
            let want = (2.0 * PI / g.box_length() * g.position(i)[0]).cos();
            assert!((v - want).abs() < 1e-12);
        }
    }

    #[test]
    fn zero_coefficients_give_zero_field() {
        let g = grid();
        let x = SpectralField::zeros(g).inverse_transform().unwrap();
        assert!(x.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn round_trip_and_plancherel() {
        let g = grid();
        for seed in 0..5 {
            let x = random_samples(&g, seed);
            let f = SpectralField::forward_transform(&x, g).unwrap();
            let back = f.inverse_transform().unwrap();
            let norm: f64 = x.iter().map(|v| v * v).sum::<f64>();
            let err: f64 = x.iter().zip(&back).map(|(a, b)| (a - b).powi(2)).sum::<f64>();
            assert!((err / norm).sqrt() < 1e-12);
            assert!(((f.l2_norm_squared() - norm) / norm).abs() < 1e-12);
        }
    }

    #[test]
    fn non_finite_input_names_index() {
        let g = grid();
        let mut x = vec![0.0; g.len()];
        x[17] = f64::NAN;
        match SpectralField::forward_transform(&x, g) {
            Err(Error::NonFiniteInput { index, .. }) => assert_eq!(index, 17),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn asymmetric_coefficients_are_rejected() {
        let g = grid();
        let mut f = SpectralField::zeros(g);
        f.coefficients_mut()[g.index_of([2, 1, 0])] = Complex64::new(1.0, 0.0);
        match f.inverse_transform() {
            Err(Error::HermitianViolation { k, .. }) => {
                assert!(k == [2, 1, 0] || k == [-2, -1, 0]);
            }
            other => panic!("unexpected {other:?}"),
        }
    }
}
