use cwave::dynamics::{default_dt, evolve, Nonlinearity, SubInterval, WaveState};
use cwave::functionals::{
    default_pairs, endpoint_proxy_pair, energy, mixed_spacetime_norm, mollified_energy,
    nonlinear_gain_norm, z_norm, Component, EnergyTrajectory, Weight,
};
use cwave::spectral::{synthesize_initial_data, Grid3, MultiplierProfile, Recipe, SpectralField};
use proptest::prelude::*;

fn bump(grid: &Grid3, amplitude: f64, width: f64) -> WaveState {
    bump_with(grid, amplitude, width, 0.3)
}

fn bump_with(grid: &Grid3, amplitude: f64, width: f64, velocity: f64) -> WaveState {
    let r = Recipe::GaussianBump {
        amplitude,
        width,
        center: None,
        velocity,
    };
    let (u, ut) = synthesize_initial_data(grid, &r, 0).unwrap();
    WaveState::new(0.0, u, ut).unwrap()
}

fn drift(s0: &WaveState, dt: f64) -> f64 {
    let traj = evolve(s0, 10.0, dt, 16, Nonlinearity::Defocusing).unwrap();
    let prof = MultiplierProfile::new(0.75, 1.0).unwrap();
    let e = EnergyTrajectory::from_states(&traj.states, &prof).unwrap();
    assert_eq!(e.times.last().copied(), Some(traj.end()));
    e.relative_energy_drift()
}

#[test]
fn energy_drift_is_second_order_in_dt() {
    let g = Grid3::new(16, 12.0).unwrap();
    let s0 = bump(&g, 2.0, 1.2);
    let dt = default_dt(&g);
    let (d1, d2) = (drift(&s0, dt), drift(&s0, dt / 2.0));
    assert!(d1 / d2 >= 3.5, "{d1} / {d2}");
}

#[test]
fn weakly_nonlinear_energy_drift_is_tiny() {
    // the splitting error grows with the potential share of the energy
    let g = Grid3::new(16, 16.0).unwrap();
    let d = drift(&bump_with(&g, 0.04, 1.5, 0.0), default_dt(&g));
    assert!(d <= 1e-6, "drift {d}");
}

#[test]
fn mollified_energy_is_exact_on_band_limited_states() {
    let g = Grid3::new(16, 8.0).unwrap();
    let s0 = bump(&g, 1.0, 1.5);
    let prof = MultiplierProfile::new(0.7, 8.0).unwrap();
    // keep only |ξ| ≤ N
    let cut = |f: &SpectralField| {
        let c = f
            .coefficients()
            .iter()
            .enumerate()
            .map(|(i, &v)| if g.radial(i) <= 8.0 { v } else { Default::default() })
            .collect();
        SpectralField::from_coefficients(g, c).unwrap()
    };
    let st = WaveState::new(0.0, cut(&s0.u), cut(&s0.ut)).unwrap();
    assert_eq!(mollified_energy(&st, &prof), energy(&st));
}

#[test]
fn z_norm_grows_with_the_pair_set() {
    let g = Grid3::new(16, 8.0).unwrap();
    let traj = evolve(&bump(&g, 1.0, 1.0), 1.0, 0.0625, 1, Nonlinearity::Defocusing).unwrap();
    let j = SubInterval::new(0.0, 1.0).unwrap();
    let prof = MultiplierProfile::new(0.75, 2.0).unwrap();
    let pairs = default_pairs();
    let mut prev = 0.0;
    for k in 1..=pairs.len() {
        let z = z_norm(&traj, &j, &prof, &pairs[..k]).unwrap().value;
        assert!(z >= prev);
        prev = z;
    }
    let mut extended = pairs.clone();
    extended.push(endpoint_proxy_pair());
    assert!(z_norm(&traj, &j, &prof, &extended).unwrap().value >= prev);
}

#[test]
fn gain_norm_grows_sublinearly() {
    let g = Grid3::new(16, 16.0).unwrap();
    let mut s0 = bump(&g, 1.0, 1.5);
    let e = energy(&s0);
    s0.u = s0.u.scaled(e.powf(-0.5));
    s0.ut = s0.ut.scaled(e.powf(-0.5));
    let traj = evolve(&s0, 8.0, 0.125, 1, Nonlinearity::Defocusing).unwrap();
    let prof = MultiplierProfile::new(0.75, 1.0).unwrap();
    let pts: Vec<(f64, f64)> = [1.0, 2.0, 4.0, 8.0]
        .iter()
        .map(|&l| {
            let r = nonlinear_gain_norm(&traj, &SubInterval::new(0.0, l).unwrap(), &prof).unwrap();
            (l.ln(), r.value.ln())
        })
        .collect();
    let n = pts.len() as f64;
    let (mx, my) = (pts.iter().map(|p| p.0).sum::<f64>() / n, pts.iter().map(|p| p.1).sum::<f64>() / n);
    let slope = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum::<f64>()
        / pts.iter().map(|p| (p.0 - mx).powi(2)).sum::<f64>();
    assert!(slope <= 0.85, "slope {slope}");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn mixed_norm_is_homogeneous(c in -5.0f64..5.0, qi in 0usize..5) {
        let g = Grid3::new(8, 6.0).unwrap();
        let s0 = bump(&g, 1.0, 1.0);
        let traj = evolve(&s0, 0.5, 0.125, 1, Nonlinearity::Off).unwrap();
        let mut scaled = traj.clone();
        for st in &mut scaled.states {
            st.u = st.u.scaled(c);
            st.ut = st.ut.scaled(c);
        }
        let j = SubInterval::new(0.0, 0.5).unwrap();
        let p = default_pairs()[qi];
        let w = Weight::d(0.5);
        let a = mixed_spacetime_norm(&traj, &j, p.q, p.r, Component::U, &w).unwrap();
        let b = mixed_spacetime_norm(&scaled, &j, p.q, p.r, Component::U, &w).unwrap();
        prop_assert!((b - c.abs() * a).abs() <= 1e-12 * a.max(1e-300));
    }
}
