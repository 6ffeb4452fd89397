//! One driver per subcommand. Each validates its inputs before computing,
//! echoes the resolved configuration and writes its artifacts through
//! [`OutputDir`].

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use serde::Serialize;
use sha2::{Digest, Sha256};

use cwave::dynamics::{
    boundary_energy_fraction, evolve_observed, load_manifest, load_trajectory, momentum,
    save_trajectory, step_plan, SubInterval, Trajectory, WaveState,
};
use cwave::functionals::{default_pairs, nonlinear_gain_norm, z_norm, CsvHeader, EnergyTrajectory};
use cwave::imethod::{run_almost_conservation, run_gwp_experiment, ExperimentConfig, GwpReport, Setting};
use cwave::spectral::{synthesize_initial_data, Grid3, MultiplierProfile};
use cwave::symbol::{
    energy_increment_commutator, increment_shell_breakdown, verify_symbol_bounds, CaseConstants,
    VerifyOptions, MIN_SAMPLES,
};

use crate::output::OutputDir;
use crate::Failure;

fn usage(e: impl ToString) -> Failure {
    Failure::Usage(e.to_string())
}

fn compute(e: impl ToString) -> Failure {
    Failure::Compute(e.to_string())
}

fn sha256_hex(text: &str) -> String {
    Sha256::digest(text.as_bytes()).iter().map(|b| format!("{b:02x}")).collect()
}

pub fn load_config(path: &Path, overrides: &[String], seed: Option<u64>) -> Result<ExperimentConfig, Failure> {
    let text = fs::read_to_string(path).map_err(|e| usage(format!("cannot read {}: {e}", path.display())))?;
    let mut all = overrides.to_vec();
    if let Some(k) = seed {
        all.push(format!("seed={k}"));
    }
    ExperimentConfig::parse(&text, &all).map_err(usage)
}

fn open(out: &Path, name: &str, cfg: &ExperimentConfig) -> Result<(OutputDir, String), Failure> {
    let hash = cfg.hash().map_err(usage)?;
    let mut dir = OutputDir::create(out, name).map_err(usage)?;
    dir.echo_config(&cfg.to_toml().map_err(usage)?, &hash).map_err(usage)?;
    Ok((dir, hash))
}

/// Echo for subcommands driven by flags rather than a configuration file.
fn open_flags<T: Serialize>(out: &Path, name: &str, args: &T) -> Result<(OutputDir, String), Failure> {
    let text = toml::to_string(args).map_err(usage)?;
    let hash = sha256_hex(&text);
    let mut dir = OutputDir::create(out, name).map_err(usage)?;
    dir.echo_config(&text, &hash).map_err(usage)?;
    Ok((dir, hash))
}

/// Largest dyadic `N ≤ ξ_max/4`, at least 1: the cutoff used for `E(Iu)`
/// columns when the configuration leaves `N` on auto.
fn display_cutoff(cfg: &ExperimentConfig, grid: &Grid3) -> f64 {
    match cfg.cutoff {
        Setting::Value(n) => n,
        Setting::Auto => {
            let xi_max = std::f64::consts::PI * grid.n() as f64 / grid.box_length();
            (xi_max / 4.0).log2().floor().exp2().max(1.0)
        }
    }
}

fn header(hash: &str, s: f64, cutoff: f64, grid: &Grid3, dt: f64) -> CsvHeader {
    CsvHeader {
        config_hash: hash.to_string(),
        s,
        cutoff,
        box_length: grid.box_length(),
        n: grid.n(),
        dt,
    }
}

pub fn simulate(cfg: &ExperimentConfig, out: &Path) -> Result<(), Failure> {
    let grid = cfg.grid().map_err(usage)?;
    let prof = MultiplierProfile::new(cfg.s, display_cutoff(cfg, &grid)).map_err(usage)?;
    let dt = cfg.time_step().map_err(usage)?;
    let (_, dt_eff) = step_plan(cfg.horizon, dt, cfg.stride).map_err(usage)?;
    let (mut dir, hash) = open(out, "simulate", cfg)?;

    let (u, ut) = synthesize_initial_data(&grid, &cfg.recipe, cfg.seed).map_err(compute)?;
    let initial = WaveState::new(0.0, u, ut).map_err(compute)?;
    let mut states = Vec::new();
    let result = evolve_observed(&initial, cfg.horizon, dt, cfg.stride, cfg.nonlinearity, |_, s| {
        states.push(s.clone());
        Ok(())
    });
    let failure = result.err().map(|e| e.to_string());
    let partial = failure.is_some();
    if let Some(msg) = &failure {
        dir.log(msg);
    }
    let energies = EnergyTrajectory::from_states(&states, &prof).map_err(compute)?;
    let csv = energies.to_csv(&header(&hash, cfg.s, prof.cutoff(), &grid, dt_eff));
    dir.write("energy.csv", csv.as_bytes(), partial).map_err(compute)?;
    let traj = Trajectory {
        dt: dt_eff,
        stride: cfg.stride,
        nonlinearity: cfg.nonlinearity,
        states,
    };
    let name = if partial { "trajectory.partial" } else { "trajectory" };
    save_trajectory(&dir.root().join(name), &traj, Some(&prof), &hash).map_err(compute)?;
    dir.adopt_tree(name).map_err(compute)?;
    dir.finish(!partial).map_err(compute)?;
    match failure {
        Some(msg) => Err(Failure::Compute(msg)),
        None => {
            println!("simulated {} snapshots to t = {}", traj.len(), traj.end());
            Ok(())
        }
    }
}

#[derive(Serialize)]
struct DiagnoseArgs<'a> {
    traj: &'a str,
    trajectory_hash: &'a str,
    s: f64,
    #[serde(rename = "N")]
    cutoff: f64,
    interval: f64,
}

/// Consecutive pieces of length `len` covering `[a, b]`, the last one shorter.
fn pieces(a: f64, b: f64, len: f64) -> Vec<(f64, f64)> {
    let mut out = Vec::new();
    let mut t = a;
    while b - t > 1e-9 * len {
        let e = (t + len).min(b);
        out.push((t, e));
        t = e;
    }
    out
}

pub fn diagnose(traj_dir: &Path, s: f64, cutoff: f64, interval: f64, out: &Path) -> Result<(), Failure> {
    let prof = MultiplierProfile::new(s, cutoff).map_err(usage)?;
    if !(interval > 0.0 && interval.is_finite()) {
        return Err(usage(format!("--interval {interval} must be positive")));
    }
    let manifest = load_manifest(traj_dir).map_err(usage)?;
    let traj = load_trajectory(traj_dir).map_err(usage)?;
    let path = traj_dir.display().to_string();
    let args = DiagnoseArgs {
        traj: &path,
        trajectory_hash: &manifest.config_hash,
        s,
        cutoff,
        interval,
    };
    let (mut dir, hash) = open_flags(out, "diagnose", &args)?;
    let grid = *traj.states[0].grid();

    let energies = EnergyTrajectory::from_states(&traj.states, &prof).map_err(compute)?;
    let csv = energies.to_csv(&header(&hash, s, cutoff, &grid, traj.dt));
    dir.write("energy.csv", csv.as_bytes(), false).map_err(compute)?;

    let center = [0.5 * grid.box_length(); 3];
    let mut mom = String::from("time,P_x,P_y,P_z,boundary_fraction\n");
    for st in &traj.states {
        let p = momentum(st);
        let _ = writeln!(
            mom,
            "{:.17e},{:.17e},{:.17e},{:.17e},{:.17e}",
            st.t,
            p[0],
            p[1],
            p[2],
            boundary_energy_fraction(st, center)
        );
    }
    dir.write("momentum.csv", mom.as_bytes(), false).map_err(compute)?;

    let pairs = default_pairs();
    let mut rows = String::from("a,b,Z,q,r,gain,gain_reference\n");
    let mut failure = None;
    for (a, b) in pieces(traj.start(), traj.end(), interval) {
        let row = SubInterval::new(a, b).and_then(|j| {
            let z = z_norm(&traj, &j, &prof, &pairs)?;
            let g = nonlinear_gain_norm(&traj, &j, &prof)?;
            Ok(format!(
                "{a:.17e},{b:.17e},{:.17e},{},{},{:.17e},{:.17e}",
                z.value, z.argmax.q, z.argmax.r, g.value, g.predicted
            ))
        });
        match row {
            Ok(line) => {
                rows.push_str(&line);
                rows.push('\n');
            }
            Err(e) => {
                failure = Some(format!("interval [{a}, {b}]: {e}"));
                break;
            }
        }
    }
    let partial = failure.is_some();
    dir.write("intervals.csv", rows.as_bytes(), partial).map_err(compute)?;
    dir.finish(!partial).map_err(compute)?;
    failure.map_or(Ok(()), |m| Err(Failure::Compute(m)))
}

fn write_report(dir: &mut OutputDir, prefix: &str, r: &GwpReport) -> Result<(), Failure> {
    let partial = r.failure.is_some();
    dir.write(&format!("{prefix}report.toml"), r.to_toml().map_err(compute)?.as_bytes(), partial)
        .map_err(compute)?;
    dir.write(&format!("{prefix}energy.csv"), r.energy_csv().as_bytes(), partial)
        .map_err(compute)?;
    dir.write(&format!("{prefix}intervals.csv"), r.interval_csv().as_bytes(), partial)
        .map_err(compute)
}

fn parse_cutoffs(list: &str) -> Result<Vec<f64>, Failure> {
    let mut out = Vec::new();
    for item in list.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        let v: f64 = item
            .parse()
            .map_err(|_| usage(format!("--sweep-N: '{item}' is not a number")))?;
        if !(v >= 1.0 && v.is_finite() && v.log2().fract() == 0.0) {
            return Err(usage(format!("--sweep-N: N = {v} must be a dyadic number >= 1")));
        }
        out.push(v);
    }
    if out.is_empty() {
        return Err(usage("--sweep-N is empty"));
    }
    Ok(out)
}

pub fn almost_conservation(cfg: &ExperimentConfig, sweep: Option<&str>, out: &Path) -> Result<(), Failure> {
    let cutoffs = match (sweep, cfg.cutoff) {
        (Some(list), _) => parse_cutoffs(list)?,
        (None, Setting::Value(n)) => vec![n],
        (None, Setting::Auto) => return Err(usage("N = \"auto\" needs --sweep-N or a fixed N")),
    };
    let (mut dir, _) = open(out, "almost-conservation", cfg)?;
    let reports = match run_almost_conservation(cfg, &cutoffs) {
        Ok(r) => r,
        Err(e) => {
            dir.log(&e.to_string());
            dir.finish(false).map_err(compute)?;
            return Err(compute(e));
        }
    };
    let mut summary =
        String::from("N,epsilon,intervals,max_increment,predicted_per_interval,max_mismatch,gate_passed\n");
    let mut failure = None;
    for r in &reports {
        write_report(&mut dir, &format!("N{}/", r.choice.cutoff), r)?;
        let l = &r.ledger;
        let _ = writeln!(
            summary,
            "{},{:.17e},{},{:.17e},{:.17e},{},{}",
            r.choice.cutoff,
            r.choice.epsilon,
            l.intervals.len(),
            l.max_increment(),
            l.predicted_per_interval,
            l.max_mismatch().map_or(String::new(), |m| format!("{m:.6e}")),
            l.gate.passed
        );
        println!(
            "N = {}: max increment {:.6e} over {} intervals",
            r.choice.cutoff,
            l.max_increment(),
            l.intervals.len()
        );
        if failure.is_none() {
            failure = r.failure.clone();
        }
    }
    let partial = failure.is_some();
    dir.write("summary.csv", summary.as_bytes(), partial).map_err(compute)?;
    dir.finish(!partial).map_err(compute)?;
    failure.map_or(Ok(()), |m| Err(Failure::Compute(m)))
}

pub fn gwp(cfg: &ExperimentConfig, out: &Path) -> Result<(), Failure> {
    let (mut dir, _) = open(out, "gwp", cfg)?;
    let report = match run_gwp_experiment(cfg) {
        Ok(r) => r,
        Err(e) => {
            dir.log(&e.to_string());
            dir.finish(false).map_err(compute)?;
            return Err(compute(e));
        }
    };
    write_report(&mut dir, "", &report)?;
    dir.finish(report.failure.is_none()).map_err(compute)?;
    let verdict = report.verdict.map_or("none".to_string(), |v| v.to_string());
    println!(
        "N = {}, lambda = {:.6e}, epsilon = {}: verdict {verdict}",
        report.choice.cutoff, report.choice.lambda, report.choice.epsilon
    );
    match report.failure {
        Some(m) => Err(Failure::Compute(m)),
        None => Ok(()),
    }
}

#[derive(Serialize)]
struct SymbolArgs {
    s: f64,
    #[serde(rename = "N")]
    cutoff: f64,
    samples: usize,
    seed: u64,
}

pub fn verify_symbol(s: f64, cutoff: f64, samples: usize, seed: u64, out: &Path) -> Result<(), Failure> {
    let prof = MultiplierProfile::new(s, cutoff).map_err(usage)?;
    if samples < MIN_SAMPLES {
        return Err(usage(format!("--samples must be at least {MIN_SAMPLES}, got {samples}")));
    }
    let args = SymbolArgs {
        s,
        cutoff,
        samples,
        seed,
    };
    let (mut dir, _) = open_flags(out, "verify-symbol", &args)?;
    let report = verify_symbol_bounds(&prof, samples, seed, &VerifyOptions::default()).map_err(compute)?;
    dir.write("symbol.csv", report.to_csv().as_bytes(), false).map_err(compute)?;
    let text = toml::to_string(&report).map_err(compute)?;
    dir.write("report.toml", text.as_bytes(), false).map_err(compute)?;
    dir.finish(true).map_err(compute)?;
    for c in &report.cases {
        println!("{}: K = {:.6e} over {} samples", c.case, c.max_ratio, c.samples);
    }
    Ok(())
}

#[derive(Serialize)]
struct BreakdownArgs<'a> {
    traj: &'a str,
    trajectory_hash: &'a str,
    a: f64,
    b: f64,
    s: f64,
    #[serde(rename = "N")]
    cutoff: f64,
    limit: usize,
}

#[derive(Serialize)]
struct BreakdownSummary {
    a: f64,
    b: f64,
    rows: usize,
    row_sum: f64,
    total: f64,
    delta_e: f64,
}

pub fn breakdown(
    traj_dir: &Path,
    interval: &str,
    s: f64,
    cutoff: f64,
    limit: usize,
    out: &Path,
) -> Result<(), Failure> {
    let (a, b) = interval
        .split_once(',')
        .and_then(|(a, b)| Some((a.trim().parse::<f64>().ok()?, b.trim().parse::<f64>().ok()?)))
        .ok_or_else(|| usage(format!("--interval '{interval}' is not of the form a,b")))?;
    let j = SubInterval::new(a, b).map_err(usage)?;
    let prof = MultiplierProfile::new(s, cutoff).map_err(usage)?;
    let manifest = load_manifest(traj_dir).map_err(usage)?;
    let traj = load_trajectory(traj_dir).map_err(usage)?;
    traj.snap(&j).map_err(usage)?;
    let path = traj_dir.display().to_string();
    let args = BreakdownArgs {
        traj: &path,
        trajectory_hash: &manifest.config_hash,
        a,
        b,
        s,
        cutoff,
        limit,
    };
    let (mut dir, _) = open_flags(out, "breakdown", &args)?;
    let result = increment_shell_breakdown(&traj, &j, &prof, &CaseConstants::default(), limit)
        .and_then(|t| Ok((energy_increment_commutator(&traj, &j, &prof)?, t)));
    let (check, table) = match result {
        Ok(v) => v,
        Err(e) => {
            dir.log(&e.to_string());
            dir.finish(false).map_err(compute)?;
            return Err(compute(e));
        }
    };
    dir.write("breakdown.csv", table.to_csv().as_bytes(), false).map_err(compute)?;
    let summary = BreakdownSummary {
        a: table.a,
        b: table.b,
        rows: table.rows.len(),
        row_sum: table.sum(),
        total: table.total,
        delta_e: check.delta_e,
    };
    let text = toml::to_string(&summary).map_err(compute)?;
    dir.write("summary.toml", text.as_bytes(), false).map_err(compute)?;
    dir.finish(true).map_err(compute)?;
    println!("{} rows, total {:.6e}, delta E {:.6e}", summary.rows, summary.total, summary.delta_e);
    Ok(())
}
