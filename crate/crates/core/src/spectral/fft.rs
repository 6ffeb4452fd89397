//! Unitary 3-D FFT built from 1-D rustfft plans.
//!
//! A transform is three passes of "1-D transforms along the contiguous axis,
//! then a cyclic axis rotation `(a, b, c) → (b, c, a)`". After the third
//! rotation the data is back in its original layout.

use std::cell::RefCell;
use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::par::{self, Exec};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Direction {
    Forward,
    Inverse,
}

pub struct Fft3 {
    n: usize,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

impl std::fmt::Debug for Fft3 {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Fft3").field("n", &self.n).finish()
    }
}

impl Fft3 {
    /// Shared plan for `n³` transforms.
    pub fn plan(n: usize) -> Arc<Fft3> {
        static CACHE: OnceLock<Mutex<HashMap<usize, Arc<Fft3>>>> = OnceLock::new();
        let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
        let mut guard = cache.lock().expect("fft plan cache poisoned");
        guard
            .entry(n)
            .or_insert_with(|| {
                let mut planner = FftPlanner::new();
                Arc::new(Fft3 {
                    n,
                    forward: planner.plan_fft_forward(n),
                    inverse: planner.plan_fft_inverse(n),
                })
            })
            .clone()
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// In-place unitary transform (scaled by `n^{-3/2}`).
    pub fn process(&self, data: &mut Vec<Complex64>, dir: Direction, exec: Exec) {
        let n = self.n;
        assert_eq!(data.len(), n * n * n);
        let plan = match dir {
            Direction::Forward => &self.forward,
            Direction::Inverse => &self.inverse,
        };
        // every element of the rotation target is overwritten, so a stale
        // buffer is fine; reusing it avoids faulting in n³ fresh pages per call
        let mut rotated = ROTATION.with(|b| std::mem::take(&mut *b.borrow_mut()));
        rotated.resize(data.len(), Complex64::new(0.0, 0.0));
        for _ in 0..3 {
            par::for_each_chunk_mut(exec, data, n * n, |_, plane| {
                let mut scratch = vec![Complex64::new(0.0, 0.0); plan.get_inplace_scratch_len()];
                plan.process_with_scratch(plane, &mut scratch);
            });
            rotate(exec, n, data, &mut rotated);
            std::mem::swap(data, &mut rotated);
        }
        ROTATION.with(|b| *b.borrow_mut() = rotated);
        let scale = (n as f64).powf(-1.5);
        par::for_each_chunk_mut(exec, data, par::REDUCE_CHUNK, |_, c| {
            for z in c {
                *z *= scale;
            }
        });
    }
}

thread_local! {
    static ROTATION: RefCell<Vec<Complex64>> = const { RefCell::new(Vec::new()) };
}

/// `out[b][c][a] = input[a][b][c]`.
fn rotate(exec: Exec, n: usize, input: &[Complex64], out: &mut [Complex64]) {
    const TILE: usize = 16;
    par::for_each_chunk_mut(exec, out, n * n, |b, block| {
        // block is indexed [c][a]; read input[a][b][c] = input[(a*n + b)*n + c]
        for a0 in (0..n).step_by(TILE) {
            for c0 in (0..n).step_by(TILE) {
                for a in a0..(a0 + TILE).min(n) {
                    let row = &input[(a * n + b) * n..(a * n + b) * n + n];
                    for c in c0..(c0 + TILE).min(n) {
                        block[c * n + a] = row[c];
                    }
                }
            }
        }
    });
}
