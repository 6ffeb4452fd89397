//! The integrated commutator split over Littlewood-Paley band quadruples.
//!
//! The rate is linear in `u_t` and symmetric trilinear in `u`, so inserting
//! the partition of unity in each slot and grouping `N₂ ≥ N₃ ≥ N₄` (with
//! their permutation count) recovers the total exactly.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use super::cases::{classify_case, CaseConstants, CaseLabel, ShellQuadruple};
use super::commutator::{dealiased_samples, SplittingIncrement, SPLIT_WEIGHTS};
use crate::dynamics::{SubInterval, Trajectory};
use crate::par;
use crate::spectral::{lattice_bands, smoothing_i, Band, MultiplierProfile, SpectralField};
use crate::{Error, Result};

pub const DEFAULT_QUADRUPLE_LIMIT: usize = 10_000;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BreakdownRow {
    /// Band labels for `(u_t; u, u, u)`.
    pub bands: [String; 4],
    pub shells: ShellQuadruple,
    pub case: CaseLabel,
    pub multiplicity: usize,
    /// Time-integrated contribution, multiplicity included.
    pub contribution: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BreakdownTable {
    pub a: f64,
    pub b: f64,
    pub rows: Vec<BreakdownRow>,
    pub total: f64,
}

impl BreakdownTable {
    pub fn sum(&self) -> f64 {
        self.rows.iter().map(|r| r.contribution).sum()
    }

    /// Rows by decreasing `|contribution|` with the running share of the
    /// total: `quadruple, case, contribution, cumulative_fraction`.
    pub fn to_csv(&self) -> String {
        let mut order: Vec<usize> = (0..self.rows.len()).collect();
        order.sort_by(|&i, &j| {
            self.rows[j]
                .contribution
                .abs()
                .total_cmp(&self.rows[i].contribution.abs())
                .then(i.cmp(&j))
        });
        let mut out = String::from("quadruple,case,contribution,cumulative_fraction\n");
        let mut running = 0.0;
        let scale = if self.total != 0.0 { self.total } else { 1.0 };
        for i in order {
            let r = &self.rows[i];
            running += r.contribution;
            let _ = writeln!(
                out,
                "{}|{}|{}|{},{},{:.17e},{:.17e}",
                r.bands[0],
                r.bands[1],
                r.bands[2],
                r.bands[3],
                r.case,
                r.contribution,
                running / scale
            );
        }
        out
    }
}

fn multiplicity(b: [usize; 3]) -> usize {
    match (b[0] == b[1], b[1] == b[2]) {
        (true, true) => 1,
        (false, false) => 6,
        _ => 3,
    }
}

/// Band-resolved pieces of the rate at one quadrature node.
///
/// `free = (u_t, u, w)` contributes `w·⟨P_{b₁}PIu_t, Π P_{bᵢ}PIu⟩`,
/// `kick = (v, u, w)` contributes `−w·⟨P_{b₁}PI²v, Π P_{bᵢ}Pu⟩`.
struct NodeTerms<'a> {
    free: Option<(&'a SpectralField, &'a SpectralField, f64)>,
    kick: Option<(&'a SpectralField, &'a SpectralField, f64)>,
}

struct Layout<'a> {
    bands: &'a [Band],
    triples: &'a [[usize; 3]],
    prof: &'a MultiplierProfile,
    len: usize,
}

impl Layout<'_> {
    fn banded(&self, f: &SpectralField) -> Vec<Vec<f64>> {
        self.bands.iter().map(|b| dealiased_samples(&b.project(f))).collect()
    }

    /// Adds the node's values, indexed `b1 * triples + t`, into `acc`.
    fn accumulate(&self, node: NodeTerms<'_>, acc: &mut [f64]) {
        let nb = self.bands.len();
        let nt = self.triples.len();
        let free = node.free.map(|(ut, u, w)| {
            let iut = smoothing_i(ut, self.prof);
            (self.banded(&iut), self.banded(&smoothing_i(u, self.prof)), w)
        });
        let kick = node.kick.map(|(v, u, w)| {
            let i2v = smoothing_i(&smoothing_i(v, self.prof), self.prof);
            (self.banded(&i2v), self.banded(u), w)
        });
        let len = self.len;
        let per_triple = par::map_indices(par::Exec::default(), nt, |ti| {
            let [b2, b3, b4] = self.triples[ti];
            let cube = |f: &[Vec<f64>]| -> Vec<f64> {
                (0..len).map(|x| f[b2][x] * f[b3][x] * f[b4][x]).collect()
            };
            let fc = free.as_ref().map(|(_, b, _)| cube(b));
            let kc = kick.as_ref().map(|(_, d, _)| cube(d));
            (0..nb)
                .map(|b1| {
                    let mut v = 0.0;
                    if let (Some((a, _, w)), Some(p)) = (&free, &fc) {
                        v += w * a[b1].iter().zip(p).map(|(x, y)| x * y).sum::<f64>();
                    }
                    if let (Some((c, _, w)), Some(p)) = (&kick, &kc) {
                        v -= w * c[b1].iter().zip(p).map(|(x, y)| x * y).sum::<f64>();
                    }
                    v
                })
                .collect::<Vec<f64>>()
        });
        for (ti, row) in per_triple.iter().enumerate() {
            for (b1, v) in row.iter().enumerate() {
                acc[b1 * nt + ti] += v;
            }
        }
    }
}

/// Contribution of every band quadruple to `∫_J dE(Iu)/dt`, with the same
/// time quadrature as [`energy_increment_commutator`](super::energy_increment_commutator).
pub fn increment_shell_breakdown(
    traj: &Trajectory,
    j: &SubInterval,
    prof: &MultiplierProfile,
    consts: &CaseConstants,
    quadruple_limit: usize,
) -> Result<BreakdownTable> {
    let (ia, ib) = traj.snap(j)?;
    let grid = *traj.states[ia].grid();
    let bands = lattice_bands(&grid);
    let nb = bands.len();
    let mut triples = Vec::new();
    for b2 in 0..nb {
        for b3 in 0..=b2 {
            for b4 in 0..=b3 {
                triples.push([b2, b3, b4]);
            }
        }
    }
    let count = nb * triples.len();
    if count > quadruple_limit {
        return Err(Error::TooManyQuadruples {
            count,
            limit: quadruple_limit,
        });
    }
    let sign = traj.nonlinearity.sign();
    let layout = Layout {
        bands: &bands,
        triples: &triples,
        prof,
        len: grid.len(),
    };
    let states = &traj.states[ia..=ib];
    let mut acc = vec![0.0; count];
    if sign != 0.0 {
        if traj.stride == 1 {
            let inc = SplittingIncrement::new(&grid, traj.dt, traj.nonlinearity);
            let h = traj.dt;
            let w = SPLIT_WEIGHTS.map(|v| v * h);
            for (k, pair) in states.windows(2).enumerate() {
                let (before, after) = (&pair[0], &pair[1]);
                let sub = inc.substates(before, after);
                // boundary states are shared by neighbouring steps
                let w_before = if k == 0 { w[0] } else { 0.0 };
                let w_after = w[5] + if k + 2 < states.len() { w[0] } else { 0.0 };
                let free_nodes = [
                    (before, w_before),
                    (&sub.q1, w[1]),
                    (&sub.s1, w[2]),
                    (&sub.s2, w[3]),
                    (&sub.q2, w[4]),
                    (after, w_after),
                ];
                for (st, wt) in free_nodes {
                    if wt != 0.0 {
                        layout.accumulate(NodeTerms { free: Some((&st.ut, &st.u, wt)), kick: None }, &mut acc);
                    }
                }
                layout.accumulate(
                    NodeTerms { free: None, kick: Some((&sub.ut_mid, &sub.s1.u, h)) },
                    &mut acc,
                );
            }
        } else {
            let h = traj.spacing();
            let last = states.len() - 1;
            for (i, st) in states.iter().enumerate() {
                let w = if i == 0 || i == last { 0.5 * h } else { h };
                if last == 0 {
                    break;
                }
                layout.accumulate(
                    NodeTerms {
                        free: Some((&st.ut, &st.u, w)),
                        kick: Some((&st.ut, &st.u, w)),
                    },
                    &mut acc,
                );
            }
        }
    }
    let scale = sign * grid.cell_volume();
    let mut rows = Vec::with_capacity(count);
    let mut total = 0.0;
    for b1 in 0..nb {
        for (ti, t) in triples.iter().enumerate() {
            let mult = multiplicity(*t);
            let contribution = mult as f64 * scale * acc[b1 * triples.len() + ti];
            total += contribution;
            let shells = ShellQuadruple::new(
                bands[b1].scale(),
                bands[t[0]].scale(),
                bands[t[1]].scale(),
                bands[t[2]].scale(),
            )?;
            rows.push(BreakdownRow {
                bands: [
                    bands[b1].label(),
                    bands[t[0]].label(),
                    bands[t[1]].label(),
                    bands[t[2]].label(),
                ],
                shells,
                case: classify_case(&shells, prof, consts)?,
                multiplicity: mult,
                contribution,
            });
        }
    }
    Ok(BreakdownTable {
        a: states[0].t,
        b: states[states.len() - 1].t,
        rows,
        total,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::{evolve, Nonlinearity, WaveState};
    use crate::spectral::{synthesize_initial_data, Grid3, Recipe};
    use crate::symbol::energy_increment_commutator;

    fn run(amp: f64) -> Trajectory {
        let g = Grid3::new(16, 8.0).unwrap();
        let r = Recipe::RandomSobolev {
            s: 0.75,
            roughness: 0.05,
            amplitude: amp,
            length_scale: 1.0,
        };
        let (u, ut) = synthesize_initial_data(&g, &r, 4).unwrap();
        evolve(&WaveState::new(0.0, u, ut).unwrap(), 0.1, 0.005, 2, Nonlinearity::Defocusing).unwrap()
    }

    #[test]
    fn rows_sum_to_the_commutator() {
        let tr = run(2.0);
        let prof = MultiplierProfile::new(0.75, 2.0).unwrap();
        let j = SubInterval::new(0.0, 0.1).unwrap();
        let t = increment_shell_breakdown(&tr, &j, &prof, &CaseConstants::default(), DEFAULT_QUADRUPLE_LIMIT).unwrap();
        let c = energy_increment_commutator(&tr, &j, &prof).unwrap().commutator;
        assert!((t.sum() - c).abs() <= 1e-10 * c.abs(), "{} vs {c}", t.sum());
        // every row whose shells all sit at or below N/4 is zero
        let n = prof.cutoff();
        for r in &t.rows {
            if r.shells.ordered()[0] <= n / 4.0 {
                assert!(r.contribution.abs() <= 1e-10 * c.abs().max(1e-300), "{r:?}");
            }
        }
        let csv = t.to_csv();
        assert_eq!(csv.lines().count(), t.rows.len() + 1);
    }

    #[test]
    fn splitting_rows_sum_to_the_increment() {
        let g = Grid3::new(16, 8.0).unwrap();
        let r = Recipe::RandomSobolev {
            s: 0.75,
            roughness: 0.05,
            amplitude: 1.0,
            length_scale: 1.0,
        };
        let (u, ut) = synthesize_initial_data(&g, &r, 4).unwrap();
        let tr = evolve(&WaveState::new(0.0, u, ut).unwrap(), 0.02, 0.005, 1, Nonlinearity::Defocusing).unwrap();
        let prof = MultiplierProfile::new(0.75, 2.0).unwrap();
        let j = SubInterval::new(0.0, 0.02).unwrap();
        let t = increment_shell_breakdown(&tr, &j, &prof, &CaseConstants::default(), DEFAULT_QUADRUPLE_LIMIT).unwrap();
        let c = energy_increment_commutator(&tr, &j, &prof).unwrap();
        assert!((t.sum() - c.commutator).abs() <= 1e-10 * c.commutator.abs(), "{} vs {c:?}", t.sum());
        assert!((t.total - c.delta_e).abs() <= 1e-6 * c.delta_e.abs());
    }

    #[test]
    fn guard_trips() {
        let tr = run(1.0);
        let prof = MultiplierProfile::new(0.75, 2.0).unwrap();
        let j = SubInterval::new(0.0, 0.1).unwrap();
        assert!(matches!(
            increment_shell_breakdown(&tr, &j, &prof, &CaseConstants::default(), 10),
            Err(Error::TooManyQuadruples { .. })
        ));
    }
}
