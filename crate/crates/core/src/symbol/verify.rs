//! Monte-Carlo check of `|μ| ≤ K·B` on each case of the shell analysis.

use std::fmt::Write as _;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::cases::{case_bound, classify_case, mu, CaseConstants, CaseLabel, FrequencyTriple, ShellQuadruple};
use crate::par::{self, Exec};
use crate::spectral::MultiplierProfile;
use crate::{Error, Result};

/// Smallest sample count accepted by [`verify_symbol_bounds`].
pub const MIN_SAMPLES: usize = 1000;
const CHUNK: usize = 1024;
const DRAWS_PER_SHELL: usize = 64;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerifyOptions {
    pub constants: CaseConstants,
    /// Fail when any `|μ|/B` exceeds this.
    pub ceiling: f64,
    /// Shell exponents are drawn from `log₂N + [min_offset, max_offset]`.
    pub min_offset: i32,
    pub max_offset: i32,
    pub exec: ExecChoice,
}

/// Serializable mirror of [`Exec`].
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExecChoice {
    #[default]
    Auto,
    Sequential,
}

impl ExecChoice {
    pub fn exec(self) -> Exec {
        match self {
            ExecChoice::Auto => Exec::default(),
            ExecChoice::Sequential => Exec::Sequential,
        }
    }
}

impl Default for VerifyOptions {
    fn default() -> Self {
        Self {
            constants: CaseConstants::default(),
            ceiling: 100.0,
            min_offset: -4,
            max_offset: 10,
            exec: ExecChoice::Auto,
        }
    }
}

/// One sample: shells, frequencies and `|μ|/B`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Witness {
    pub shells: ShellQuadruple,
    pub triple: FrequencyTriple,
    pub mu: f64,
    pub bound: f64,
    pub ratio: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CaseStats {
    pub case: CaseLabel,
    pub samples: usize,
    /// Fitted constant `K = max |μ|/B`.
    pub max_ratio: f64,
    pub argmax: Option<Witness>,
    pub nonzero: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SymbolReport {
    pub s: f64,
    pub cutoff: f64,
    pub seed: u64,
    pub ceiling: f64,
    pub constants: CaseConstants,
    pub cases: Vec<CaseStats>,
    pub passed: bool,
}

impl SymbolReport {
    pub fn case(&self, label: CaseLabel) -> Option<&CaseStats> {
        self.cases.iter().find(|c| c.case == label)
    }

    /// Columns: case, N1..N4, max_ratio, the nine argmax `ξ` components,
    /// samples.
    pub fn to_csv(&self) -> String {
        let mut out = String::from(
            "case,N1,N2,N3,N4,max_ratio,xi2_x,xi2_y,xi2_z,xi3_x,xi3_y,xi3_z,xi4_x,xi4_y,xi4_z,samples\n",
        );
        for c in &self.cases {
            let _ = write!(out, "{}", c.case);
            match &c.argmax {
                Some(w) => {
                    for v in w.shells.as_array() {
                        let _ = write!(out, ",{v}");
                    }
                    let _ = write!(out, ",{:.17e}", c.max_ratio);
                    for v in w.triple.xi2.iter().chain(&w.triple.xi3).chain(&w.triple.xi4) {
                        let _ = write!(out, ",{v:.17e}");
                    }
                }
                None => {
                    out.push_str(",,,,,0");
                    out.push_str(&",".repeat(9));
                }
            }
            let _ = writeln!(out, ",{}", c.samples);
        }
        out
    }
}

/// Uniform radius in `[M, 2M)` and uniform direction.
pub(crate) fn sample_in_shell<R: Rng>(rng: &mut R, shell: f64) -> [f64; 3] {
    let r = shell * (1.0 + rng.gen::<f64>());
    let z: f64 = rng.gen_range(-1.0..1.0);
    let phi = rng.gen_range(0.0..std::f64::consts::TAU);
    let rho = (1.0 - z * z).max(0.0).sqrt();
    [r * rho * phi.cos(), r * rho * phi.sin(), r * z]
}

fn in_shell(v: f64, shell: f64) -> bool {
    v >= shell && v < 2.0 * shell
}

/// Draws shells classified as `target`, then frequencies with every `|ξᵢ|`
/// in its shell. The member with the largest shell is solved from the
/// constraint; draws that leave it outside its shell are rejected.
fn draw<R: Rng>(
    rng: &mut R,
    target: CaseLabel,
    prof: &MultiplierProfile,
    opts: &VerifyOptions,
) -> Result<(ShellQuadruple, FrequencyTriple)> {
    let base = prof.cutoff().log2() as i32;
    let (lo, hi) = (base + opts.min_offset, base + opts.max_offset);
    for _ in 0..1_000_000 {
        let mut e: [i32; 4] = std::array::from_fn(|_| rng.gen_range(lo..=hi));
        e[1..].sort_by(|a, b| b.cmp(a));
        let shells = ShellQuadruple::new(
            (e[0] as f64).exp2(),
            (e[1] as f64).exp2(),
            (e[2] as f64).exp2(),
            (e[3] as f64).exp2(),
        )?;
        if classify_case(&shells, prof, &opts.constants)? != target {
            continue;
        }
        let sizes = shells.as_array();
        let dep = (0..4)
            .max_by(|&a, &b| sizes[a].total_cmp(&sizes[b]).then(b.cmp(&a)))
            .expect("four shells");
        for _ in 0..DRAWS_PER_SHELL {
            // ξ₁..ξ₄ with Σ = 0
            let mut xi = [[0.0; 3]; 4];
            for i in (0..4).filter(|&i| i != dep) {
                xi[i] = sample_in_shell(rng, sizes[i]);
            }
            let others: [f64; 3] = std::array::from_fn(|c| {
                (0..4).filter(|&i| i != dep).map(|i| xi[i][c]).sum::<f64>()
            });
            xi[dep] = others.map(|v| -v);
            let r = xi[dep].iter().map(|v| v * v).sum::<f64>().sqrt();
            if in_shell(r, sizes[dep]) {
                let triple = FrequencyTriple {
                    xi2: xi[1],
                    xi3: xi[2],
                    xi4: xi[3],
                };
                return Ok((shells, triple));
            }
        }
    }
    Err(Error::Search(format!(
        "no frequency configuration found for {target} in the sampled shell range"
    )))
}

fn witness(
    shells: ShellQuadruple,
    triple: FrequencyTriple,
    label: CaseLabel,
    prof: &MultiplierProfile,
    consts: &CaseConstants,
) -> Result<Witness> {
    let m = mu(&triple, prof);
    let bound = case_bound(&shells, label, prof, consts)?;
    Ok(Witness {
        shells,
        triple,
        mu: m,
        bound,
        ratio: m.abs() / bound,
    })
}

/// RNG for chunk `chunk` of case `case`: independent of thread scheduling.
fn chunk_rng(seed: u64, case: usize, chunk: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(((case as u64) << 40) | chunk as u64);
    rng
}

/// Collapses chunk results in chunk order: the first strict maximum wins.
fn merge(case: CaseLabel, parts: Vec<Result<(usize, usize, Option<Witness>)>>) -> Result<CaseStats> {
    let mut stats = CaseStats {
        case,
        samples: 0,
        max_ratio: 0.0,
        argmax: None,
        nonzero: 0,
    };
    for p in parts {
        let (count, nonzero, best) = p?;
        stats.samples += count;
        stats.nonzero += nonzero;
        if let Some(w) = best {
            if stats.argmax.is_none() || w.ratio > stats.max_ratio {
                stats.max_ratio = w.ratio;
                stats.argmax = Some(w);
            }
        }
    }
    Ok(stats)
}

fn run_case<F>(
    label: CaseLabel,
    case_id: usize,
    samples: usize,
    seed: u64,
    opts: &VerifyOptions,
    prof: &MultiplierProfile,
    sampler: F,
) -> Result<CaseStats>
where
    F: Fn(&mut ChaCha8Rng) -> Result<(ShellQuadruple, FrequencyTriple)> + Sync + Send,
{
    let chunks = samples.div_ceil(CHUNK);
    let parts = par::map_indices(opts.exec.exec(), chunks, |ci| {
        let mut rng = chunk_rng(seed, case_id, ci);
        let count = CHUNK.min(samples - ci * CHUNK);
        let mut best: Option<Witness> = None;
        let mut nonzero = 0;
        for _ in 0..count {
            let (shells, triple) = sampler(&mut rng)?;
            let w = witness(shells, triple, label, prof, &opts.constants)?;
            if !w.ratio.is_finite() {
                return Err(Error::NanSymbol {
                    magnitude: triple.magnitudes()[0],
                });
            }
            if w.mu != 0.0 {
                nonzero += 1;
            }
            if best.map_or(true, |b| w.ratio > b.ratio) {
                best = Some(w);
            }
        }
        Ok((count, nonzero, best))
    });
    merge(label, parts)
}

/// Samples `samples` configurations per bounded case and reports the fitted
/// constants. Deterministic for a fixed seed, independent of threading.
pub fn verify_symbol_bounds(
    prof: &MultiplierProfile,
    samples: usize,
    seed: u64,
    opts: &VerifyOptions,
) -> Result<SymbolReport> {
    if samples < MIN_SAMPLES {
        return Err(Error::InvalidParameter(format!(
            "at least {MIN_SAMPLES} samples are required, got {samples}"
        )));
    }
    if opts.min_offset > opts.max_offset {
        return Err(Error::InvalidParameter("empty shell exponent range".into()));
    }
    let mut cases = Vec::new();
    for (id, label) in CaseLabel::BOUNDED.into_iter().enumerate() {
        cases.push(run_case(label, id, samples, seed, opts, prof, |rng| {
            draw(rng, label, prof, opts)
        })?);
    }
    let passed = cases.iter().all(|c| c.max_ratio <= opts.ceiling);
    Ok(SymbolReport {
        s: prof.s(),
        cutoff: prof.cutoff(),
        seed,
        ceiling: opts.ceiling,
        constants: opts.constants,
        cases,
        passed,
    })
}

/// Case-1b maximum ratio restricted to `N₃/N₂ = 2^{−d}`, `d = 1..=decades`.
pub fn case1b_ratio_by_decade(
    prof: &MultiplierProfile,
    decades: u32,
    samples: usize,
    seed: u64,
    opts: &VerifyOptions,
) -> Result<Vec<(u32, f64)>> {
    let n = prof.cutoff();
    let low = opts.constants.low_fraction * n;
    let mut out = Vec::new();
    for d in 1..=decades {
        let label = CaseLabel::Case1b;
        let stats = run_case(label, 16 + d as usize, samples, seed, opts, prof, |rng| {
            // N₃ ≤ c·N < N₂ = 2^d·N₃, N₁ = N₂, N₄ ≤ N₃
            let top = low.log2().floor() as i32;
            let bottom = (n.log2() as i32 + opts.min_offset).max(top - d as i32 + 1);
            let n3 = (rng.gen_range(bottom.min(top)..=top) as f64).exp2();
            let n2 = n3 * (d as f64).exp2();
            let n4 = n3 / (rng.gen_range(0..=2) as f64).exp2();
            let shells = ShellQuadruple::new(n2, n2, n3, n4)?;
            for _ in 0..1_000_000 {
                let xi2 = sample_in_shell(rng, n2);
                let xi3 = sample_in_shell(rng, n3);
                let xi4 = sample_in_shell(rng, n4);
                let t = FrequencyTriple { xi2, xi3, xi4 };
                if in_shell(t.magnitudes()[0], n2) {
                    return Ok((shells, t));
                }
            }
            Err(Error::Search("case-1b configuration not found".into()))
        })?;
        out.push((d, stats.max_ratio));
    }
    Ok(out)
}

/// Number of triples with all of `|ξ₂|, |ξ₃|, |ξ₄| ≤ N/3` (hence also
/// `|ξ₂+ξ₃+ξ₄| ≤ N`) where `μ` is not exactly zero.
pub fn low_region_violations(prof: &MultiplierProfile, samples: usize, seed: u64) -> usize {
    let n = prof.cutoff();
    let chunks = samples.div_ceil(CHUNK);
    par::map_indices(Exec::default(), chunks, |ci| {
        let mut rng = chunk_rng(seed, 63, ci);
        let count = CHUNK.min(samples - ci * CHUNK);
        (0..count)
            .filter(|_| {
                let mut ball = || loop {
                    let v: [f64; 3] = std::array::from_fn(|_| rng.gen_range(-1.0..1.0));
                    let r2 = v.iter().map(|x| x * x).sum::<f64>();
                    if r2 <= 1.0 {
                        break v.map(|x| x * n / 3.0);
                    }
                };
                let t = FrequencyTriple {
                    xi2: ball(),
                    xi3: ball(),
                    xi4: ball(),
                };
                mu(&t, prof) != 0.0
            })
            .count()
    })
    .into_iter()
    .sum()
}
