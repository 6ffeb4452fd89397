//! Trajectory directories: one binary snapshot per recorded state plus a
//! `manifest.toml`.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::propagate::Nonlinearity;
use super::state::WaveState;
use super::trajectory::Trajectory;
use crate::spectral::snapshot::{read_snapshot, write_snapshot, SnapshotHeader};
use crate::spectral::MultiplierProfile;
use crate::{Error, Result};

pub const MANIFEST_NAME: &str = "manifest.toml";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryManifest {
    pub dt: f64,
    pub stride: usize,
    pub nonlinearity: Nonlinearity,
    pub n: usize,
    pub box_length: f64,
    pub config_hash: String,
    pub times: Vec<f64>,
    pub files: Vec<String>,
}

fn snapshot_name(i: usize) -> String {
    format!("snap_{i:06}.cwi")
}

/// Writes `traj` under `dir` (created if needed). The profile, when given,
/// is recorded in every snapshot header.
pub fn save_trajectory(
    dir: &Path,
    traj: &Trajectory,
    profile: Option<&MultiplierProfile>,
    config_hash: &str,
) -> Result<PathBuf> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let (s, cutoff) = profile.map_or((0.0, 0.0), |p| (p.s(), p.cutoff()));
    let mut files = Vec::with_capacity(traj.len());
    for (i, st) in traj.states.iter().enumerate() {
        let grid = st.grid();
        let header = SnapshotHeader {
            n: grid.n() as u32,
            box_length: grid.box_length(),
            time: st.t,
            s,
            cutoff,
        };
        let name = snapshot_name(i);
        write_snapshot(&dir.join(&name), &header, &st.u, &st.ut)?;
        files.push(name);
    }
    let grid = traj
        .states
        .first()
        .map(|s| *s.grid())
        .ok_or_else(|| Error::Trajectory("cannot save an empty trajectory".into()))?;
    let manifest = TrajectoryManifest {
        dt: traj.dt,
        stride: traj.stride,
        nonlinearity: traj.nonlinearity,
        n: grid.n(),
        box_length: grid.box_length(),
        config_hash: config_hash.to_string(),
        times: traj.times(),
        files,
    };
    let path = dir.join(MANIFEST_NAME);
    let text = toml::to_string(&manifest).map_err(|e| Error::Format(e.to_string()))?;
    fs::write(&path, text).map_err(|e| Error::io(&path, e))?;
    Ok(path)
}

pub fn load_manifest(dir: &Path) -> Result<TrajectoryManifest> {
    let path = dir.join(MANIFEST_NAME);
    let text = fs::read_to_string(&path).map_err(|e| Error::io(&path, e))?;
    toml::from_str(&text).map_err(|e| Error::Format(format!("{}: {e}", path.display())))
}

pub fn load_trajectory(dir: &Path) -> Result<Trajectory> {
    let m = load_manifest(dir)?;
    if m.files.len() != m.times.len() {
        return Err(Error::Format("manifest lists mismatched times and files".into()));
    }
    let mut states = Vec::with_capacity(m.files.len());
    for (name, &t) in m.files.iter().zip(&m.times) {
        let snap = read_snapshot(&dir.join(name))?;
        if snap.header.time != t {
            return Err(Error::Format(format!(
                "{name}: header time {} differs from manifest time {t}",
                snap.header.time
            )));
        }
        states.push(WaveState::new(t, snap.u, snap.ut)?);
    }
    let traj = Trajectory {
        dt: m.dt,
        stride: m.stride,
        nonlinearity: m.nonlinearity,
        states,
    };
    traj.validate()?;
    Ok(traj)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::evolve;
    use crate::spectral::{synthesize_initial_data, Grid3, Recipe};

    #[test]
    fn round_trip() {
        let g = Grid3::new(8, 4.0).unwrap();
        let r = Recipe::GaussianBump {
            amplitude: 1.0,
            width: 0.5,
            center: None,
            velocity: 0.0,
        };
        let (u, ut) = synthesize_initial_data(&g, &r, 0).unwrap();
        let s = WaveState::new(0.0, u, ut).unwrap();
        let tr = evolve(&s, 0.5, 0.1, 1, Nonlinearity::Defocusing).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let prof = MultiplierProfile::new(0.75, 4.0).unwrap();
        save_trajectory(dir.path(), &tr, Some(&prof), "abc").unwrap();
        let back = load_trajectory(dir.path()).unwrap();
        assert_eq!(back.times(), tr.times());
        assert_eq!(back.states, tr.states);
        assert_eq!(load_manifest(dir.path()).unwrap().config_hash, "abc");
    }
}
