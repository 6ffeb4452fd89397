use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use super::energy::{energy, mollified_energy, smooth_state};
use super::sobolev::sobolev_norm;
use crate::dynamics::WaveState;
use crate::spectral::MultiplierProfile;
use crate::Result;

/// Per-snapshot energy diagnostics. `hs_norm` is
/// `‖(u, u_t)‖_{H^s×H^{s−1}}`, `hs1_norm` is `‖(Iu, ∂ₜIu)‖_{H¹×L²}`.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct EnergyTrajectory {
    pub times: Vec<f64>,
    pub e_u: Vec<f64>,
    pub e_iu: Vec<f64>,
    pub hs_norm: Vec<f64>,
    pub hs1_norm: Vec<f64>,
}

/// Run parameters echoed in the CSV header.
#[derive(Clone, Debug, PartialEq)]
pub struct CsvHeader {
    pub config_hash: String,
    pub s: f64,
    pub cutoff: f64,
    pub box_length: f64,
    pub n: usize,
    pub dt: f64,
}

impl EnergyTrajectory {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, state: &WaveState, prof: &MultiplierProfile) -> Result<()> {
        self.times.push(state.t);
        self.e_u.push(energy(state));
        self.e_iu.push(mollified_energy(state, prof));
        self.hs_norm.push(sobolev_norm(state, prof.s(), false)?.total());
        self.hs1_norm
            .push(sobolev_norm(&smooth_state(state, prof), 1.0, false)?.total());
        Ok(())
    }

    pub fn from_states(states: &[WaveState], prof: &MultiplierProfile) -> Result<Self> {
        let mut out = Self::new();
        for s in states {
            out.push(s, prof)?;
        }
        Ok(out)
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    /// `max_t |E(u(t)) − E(u(0))| / E(u(0))` (absolute when `E(u(0)) = 0`).
    pub fn relative_energy_drift(&self) -> f64 {
        let Some(&e0) = self.e_u.first() else {
            return 0.0;
        };
        let scale = if e0 > 0.0 { e0 } else { 1.0 };
        self.e_u
            .iter()
            .map(|e| (e - e0).abs() / scale)
            .fold(0.0, f64::max)
    }

    pub fn to_csv(&self, header: &CsvHeader) -> String {
        let mut out = String::new();
        let _ = writeln!(
            out,
            "# config_hash={} s={} N={} L={} n={} dt={}",
            header.config_hash, header.s, header.cutoff, header.box_length, header.n, header.dt
        );
        out.push_str("time,E_u,E_Iu,Hs_norm,Hs1_norm\n");
        for i in 0..self.len() {
            let _ = writeln!(
                out,
                "{:.17e},{:.17e},{:.17e},{:.17e},{:.17e}",
                self.times[i], self.e_u[i], self.e_iu[i], self.hs_norm[i], self.hs1_norm[i]
            );
        }
        out
    }
}
