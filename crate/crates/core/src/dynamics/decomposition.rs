//! Splitting of a trajectory on `J = [a, b]` into the free evolution of the
//! data at `a` and the Duhamel integral of the cubic forcing.

use std::collections::VecDeque;

use num_complex::Complex64;

use super::propagate::{apply_pairs, cubic_forcing, Propagator};
use super::state::WaveState;
use super::trajectory::{SubInterval, Trajectory};
use crate::par;
use crate::spectral::SpectralField;
use crate::{Error, Result};

/// Duhamel integral at one time together with quadrature bookkeeping.
#[derive(Clone, Debug)]
pub struct DuhamelPart {
    pub state: WaveState,
    /// Quadrature nodes in `[a, t]`.
    pub nodes: usize,
    /// Fewer than four nodes: trapezoid or a single Simpson panel was used.
    pub reduced_order: bool,
}

fn check_inside(traj: &Trajectory, ia: usize, ib: usize, t: f64) -> Result<()> {
    let (a, b) = (traj.states[ia].t, traj.states[ib].t);
    let tol = 1e-9 * traj.spacing();
    if t < a - tol || t > b + tol {
        return Err(Error::OutsideInterval { t, a, b });
    }
    Ok(())
}

/// `u^{l,J}(t) = cos((t−a)D)u(a) + D⁻¹sin((t−a)D)∂ₜu(a)` with `a` snapped
/// to the nearest snapshot.
pub fn adapted_linear_part(traj: &Trajectory, j: &SubInterval, t: f64) -> Result<WaveState> {
    let (ia, ib) = traj.snap(j)?;
    check_inside(traj, ia, ib, t)?;
    let start = &traj.states[ia];
    let elapsed = t - start.t;
    let mut out = start.clone();
    if elapsed != 0.0 {
        Propagator::new(start.grid(), elapsed).apply(&mut out);
    }
    out.t = t;
    Ok(out)
}

/// `u^{nl,J}(t) = −σ∫ₐᵗ D⁻¹sin((t−t')D) P((Pu)³)(t') dt'` and its time
/// derivative, by composite Simpson over the snapshots (3/8 rule on the
/// last three intervals when their count is odd). `t` snaps to the nearest
/// snapshot.
pub fn duhamel_nonlinear_part(traj: &Trajectory, j: &SubInterval, t: f64) -> Result<DuhamelPart> {
    let (ia, ib) = traj.snap(j)?;
    check_inside(traj, ia, ib, t)?;
    let ik = traj.nearest_index(t)?.clamp(ia, ib);
    let mut last = None;
    duhamel_walk(traj, ia, ik, |_, w| {
        last = Some(w.clone());
        Ok(())
    })?;
    let nodes = ik - ia + 1;
    Ok(DuhamelPart {
        state: last.expect("walk visits at least one node"),
        nodes,
        reduced_order: nodes < 4,
    })
}

/// The Duhamel part at every snapshot of `J` (index `0` is `a`).
pub fn duhamel_series(traj: &Trajectory, j: &SubInterval) -> Result<Vec<WaveState>> {
    let (ia, ib) = traj.snap(j)?;
    let mut out = Vec::with_capacity(ib - ia + 1);
    duhamel_walk(traj, ia, ib, |_, w| {
        out.push(w.clone());
        Ok(())
    })?;
    Ok(out)
}

/// `acc += Σ wᵢ·K(τᵢ)gᵢ` with `K(τ)g = (D⁻¹sin(τD)g, cos(τD)g)`; a `None`
/// propagator stands for `τ = 0`.
fn accumulate(acc: &mut WaveState, terms: &[(Option<&Propagator>, f64, &SpectralField)]) {
    let chunk = par::REDUCE_CHUNK;
    let pairs: Vec<(&mut [Complex64], &mut [Complex64])> = acc
        .u
        .coefficients_mut()
        .chunks_mut(chunk)
        .zip(acc.ut.coefficients_mut().chunks_mut(chunk))
        .collect();
    apply_pairs(pairs, |ci, a, b| {
        let base = ci * chunk;
        for &(prop, w, g) in terms {
            let gc = &g.coefficients()[base..base + a.len()];
            match prop {
                Some(p) => {
                    let (sinc, cos) = p.tables();
                    for i in 0..a.len() {
                        a[i] += gc[i] * (w * sinc[base + i]);
                        b[i] += gc[i] * (w * cos[base + i]);
                    }
                }
                None => {
                    for i in 0..a.len() {
                        b[i] += gc[i] * w;
                    }
                }
            }
        }
    });
}

/// Visits `(k, W_k)` for `k = 0..=ik−ia`, where `W_k` is the composite
/// quadrature on `[t_ia, t_{ia+k}]`. Uses `W_k = S(2h)W_{k−2} + panel` for
/// even `k` and `W_k = S(3h)W_{k−3} + 3/8-panel` for odd `k ≥ 3`, which is
/// algebraically the composite rule.
fn duhamel_walk<F>(traj: &Trajectory, ia: usize, ik: usize, mut visit: F) -> Result<()>
where
    F: FnMut(usize, &WaveState) -> Result<()>,
{
    let start = &traj.states[ia];
    let grid = *start.grid();
    let sign = traj.nonlinearity.sign();
    let h = traj.spacing();
    let mut zero = WaveState::zero(grid);
    zero.t = start.t;
    visit(0, &zero)?;
    if ik == ia {
        return Ok(());
    }
    let props = [
        Propagator::new(&grid, h),
        Propagator::new(&grid, 2.0 * h),
        Propagator::new(&grid, 3.0 * h),
    ];
    let forcing = |idx: usize| -> Result<SpectralField> {
        if sign == 0.0 {
            Ok(SpectralField::zeros(grid))
        } else {
            Ok(cubic_forcing(&traj.states[idx].u)?.scaled(-sign))
        }
    };
    // g[k] for the last four nodes, w[k] for the last three partial sums.
    let mut g: VecDeque<SpectralField> = VecDeque::with_capacity(4);
    let mut w: VecDeque<WaveState> = VecDeque::with_capacity(4);
    g.push_back(forcing(ia)?);
    w.push_back(zero);
    for k in 1..=(ik - ia) {
        g.push_back(forcing(ia + k)?);
        if g.len() > 4 {
            g.pop_front();
        }
        let gl = g.len();
        let back = |i: usize| &g[gl - 1 - i];
        let wl = w.len();
        let mut next = match k {
            1 => {
                let mut s = WaveState::zero(grid);
                accumulate(
                    &mut s,
                    &[(Some(&props[0]), 0.5 * h, back(1)), (None, 0.5 * h, back(0))],
                );
                s
            }
            _ if k % 2 == 0 => {
                let mut s = w[wl - 2].clone();
                props[1].apply(&mut s);
                accumulate(
                    &mut s,
                    &[
                        (Some(&props[1]), h / 3.0, back(2)),
                        (Some(&props[0]), 4.0 * h / 3.0, back(1)),
                        (None, h / 3.0, back(0)),
                    ],
                );
                s
            }
            _ => {
                let mut s = w[wl - 3].clone();
                props[2].apply(&mut s);
                let c = 3.0 * h / 8.0;
                accumulate(
                    &mut s,
                    &[
                        (Some(&props[2]), c, back(3)),
                        (Some(&props[1]), 3.0 * c, back(2)),
                        (Some(&props[0]), 3.0 * c, back(1)),
                        (None, c, back(0)),
                    ],
                );
                s
            }
        };
        next.t = traj.states[ia + k].t;
        visit(k, &next)?;
        w.push_back(next);
        if w.len() > 3 {
            w.pop_front();
        }
    }
    Ok(())
}
