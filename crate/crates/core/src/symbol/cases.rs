use std::fmt;

use serde::{Deserialize, Serialize};

use crate::spectral::MultiplierProfile;
use crate::{Error, Result};

/// `(ξ₂, ξ₃, ξ₄)`; `ξ₁ = −(ξ₂+ξ₃+ξ₄)` is implied.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FrequencyTriple {
    pub xi2: [f64; 3],
    pub xi3: [f64; 3],
    pub xi4: [f64; 3],
}

fn norm(v: [f64; 3]) -> f64 {
    (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt()
}

impl FrequencyTriple {
    pub fn sum(&self) -> [f64; 3] {
        std::array::from_fn(|i| self.xi2[i] + self.xi3[i] + self.xi4[i])
    }

    pub fn xi1(&self) -> [f64; 3] {
        self.sum().map(|v| -v)
    }

    /// `(|ξ₁|, |ξ₂|, |ξ₃|, |ξ₄|)`.
    pub fn magnitudes(&self) -> [f64; 4] {
        [norm(self.sum()), norm(self.xi2), norm(self.xi3), norm(self.xi4)]
    }

    pub fn is_finite(&self) -> bool {
        self.xi2
            .iter()
            .chain(&self.xi3)
            .chain(&self.xi4)
            .all(|v| v.is_finite())
    }
}

/// `μ = 1 − m(ξ₂+ξ₃+ξ₄) / (m(ξ₂)m(ξ₃)m(ξ₄))`.
pub fn mu(triple: &FrequencyTriple, prof: &MultiplierProfile) -> f64 {
    let [a, b, c, d] = triple.magnitudes();
    1.0 - prof.m(a) / (prof.m(b) * prof.m(c) * prof.m(d))
}

/// Dyadic shell sizes `(N₁, N₂, N₃, N₄)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ShellQuadruple {
    pub n1: f64,
    pub n2: f64,
    pub n3: f64,
    pub n4: f64,
}

fn is_dyadic(v: f64) -> bool {
    v > 0.0 && v.is_finite() && v.log2().fract() == 0.0
}

impl ShellQuadruple {
    pub fn new(n1: f64, n2: f64, n3: f64, n4: f64) -> Result<Self> {
        let q = Self { n1, n2, n3, n4 };
        if let Some(bad) = q.as_array().into_iter().find(|v| !is_dyadic(*v)) {
            return Err(Error::InvalidParameter(format!(
                "shell size {bad} is not a power of two"
            )));
        }
        Ok(q)
    }

    pub fn as_array(&self) -> [f64; 4] {
        [self.n1, self.n2, self.n3, self.n4]
    }

    /// `N₁* ≥ N₂* ≥ N₃* ≥ N₄*`.
    pub fn ordered(&self) -> [f64; 4] {
        let mut v = self.as_array();
        v.sort_by(|a, b| b.total_cmp(a));
        v
    }
}

impl fmt::Display for ShellQuadruple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}, {}, {})", self.n1, self.n2, self.n3, self.n4)
    }
}

/// Region of the case analysis a shell quadruple belongs to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CaseLabel {
    Vanishing,
    Case1a,
    Case1b,
    Case2,
    Case3,
}

impl CaseLabel {
    pub const BOUNDED: [CaseLabel; 4] = [
        CaseLabel::Case1a,
        CaseLabel::Case1b,
        CaseLabel::Case2,
        CaseLabel::Case3,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            CaseLabel::Vanishing => "vanishing",
            CaseLabel::Case1a => "case1a",
            CaseLabel::Case1b => "case1b",
            CaseLabel::Case2 => "case2",
            CaseLabel::Case3 => "case3",
        }
    }
}

impl fmt::Display for CaseLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Constants behind "comparable" and "at least of order N".
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CaseConstants {
    /// `N₁*` and `N₂*` are comparable when `N₁* ≤ comparability·N₂*`.
    pub comparability: f64,
    /// Shells at most `low_fraction·N` count as low frequency.
    pub low_fraction: f64,
}

impl Default for CaseConstants {
    fn default() -> Self {
        Self {
            comparability: 4.0,
            low_fraction: 0.25,
        }
    }
}

/// Classifies shells given with `N₂ ≥ N₃ ≥ N₄`.
///
/// Vanishing when `N₁* ≤ c·N` (every frequency sits where `m = 1`) or when
/// `N₁* > K·N₂*` (the constraint `ξ₁+…+ξ₄ = 0` cannot be met). Otherwise:
/// case 2 when `N₁ > N₂`; case 1 when `N₂` and `N₁` are the two largest
/// (`N₁ ≥ N₃`), split by whether `N₃ > c·N`; case 3 when `N₃ > N₁`.
pub fn classify_case(
    shells: &ShellQuadruple,
    prof: &MultiplierProfile,
    consts: &CaseConstants,
) -> Result<CaseLabel> {
    if !(shells.n2 >= shells.n3 && shells.n3 >= shells.n4) {
        return Err(Error::InvalidParameter(format!(
            "shells {shells} must satisfy N2 >= N3 >= N4"
        )));
    }
    let [top, second, ..] = shells.ordered();
    let low = consts.low_fraction * prof.cutoff();
    if top <= low || top > consts.comparability * second {
        return Ok(CaseLabel::Vanishing);
    }
    let label = if shells.n1 > shells.n2 {
        CaseLabel::Case2
    } else if shells.n1 >= shells.n3 {
        if shells.n3 > low {
            CaseLabel::Case1a
        } else {
            CaseLabel::Case1b
        }
    } else {
        CaseLabel::Case3
    };
    Ok(label)
}

/// Pointwise bound `B` of the case, with the exact `m` at the shell sizes:
/// `1/(m(N₃)m(N₄))` (1a), `N₃/N₂` (1b), `m(N₁)/(m(N₂)m(N₃)m(N₄))` (3). Case 2
/// uses the case-1 bound selected by the same `N₃` test.
pub fn case_bound(
    shells: &ShellQuadruple,
    label: CaseLabel,
    prof: &MultiplierProfile,
    consts: &CaseConstants,
) -> Result<f64> {
    let m = |v: f64| prof.m(v);
    let low = consts.low_fraction * prof.cutoff();
    let one_a = || 1.0 / (m(shells.n3) * m(shells.n4));
    let one_b = || shells.n3 / shells.n2;
    match label {
        CaseLabel::Vanishing => Err(Error::InvalidParameter(
            "the vanishing region has no case bound; evaluate mu directly".into(),
        )),
        CaseLabel::Case1a => Ok(one_a()),
        CaseLabel::Case1b => Ok(one_b()),
        CaseLabel::Case2 => Ok(if shells.n3 > low { one_a() } else { one_b() }),
        CaseLabel::Case3 => Ok(m(shells.n1) / (m(shells.n2) * m(shells.n3) * m(shells.n4))),
    }
}
