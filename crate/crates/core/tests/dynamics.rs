use cwave::dynamics::{
    adapted_linear_part, default_dt, duhamel_nonlinear_part, evolve, linear_propagate, momentum,
    step_strang, Nonlinearity, SubInterval, WaveState,
};
use cwave::spectral::{synthesize_initial_data, Grid3, Recipe, SpectralField};

fn bump(grid: &Grid3, amplitude: f64, velocity: f64) -> WaveState {
    let r = Recipe::GaussianBump {
        amplitude,
        width: 1.0,
        center: None,
        velocity,
    };
    let (u, ut) = synthesize_initial_data(grid, &r, 0).unwrap();
    WaveState::new(0.0, u, ut).unwrap()
}

fn norm(f: &SpectralField) -> f64 {
    f.l2_norm_squared().sqrt()
}

fn distance(a: &WaveState, b: &WaveState) -> f64 {
    norm(&a.u.sub(&b.u)) + norm(&a.ut.sub(&b.ut))
}

fn run(state: &WaveState, dt: f64, steps: usize, nl: Nonlinearity) -> WaveState {
    let mut s = state.clone();
    for _ in 0..steps {
        s = step_strang(&s, dt, nl).unwrap();
    }
    s
}

#[test]
fn linear_flow_is_reversible() {
    let g = Grid3::new(16, 8.0).unwrap();
    let s0 = bump(&g, 1.0, 0.5);
    let dt = default_dt(&g);
    let mut s = s0.clone();
    for _ in 0..1000 {
        s = linear_propagate(&linear_propagate(&s, dt), -dt);
    }
    assert!(distance(&s, &s0) <= 1e-12 * (norm(&s0.u) + norm(&s0.ut)));
}

#[test]
fn strang_self_convergence_is_second_order() {
    let g = Grid3::new(16, 8.0).unwrap();
    let s0 = bump(&g, 2.0, 0.0);
    let base = 0.1;
    let states: Vec<WaveState> = (0..3)
        .map(|k| {
            let m = 1usize << k;
            run(&s0, base / m as f64, 10 * m, Nonlinearity::Defocusing)
        })
        .collect();
    let e1 = distance(&states[0], &states[1]);
    let e2 = distance(&states[1], &states[2]);
    let order = (e1 / e2).log2();
    assert!(order >= 1.9, "order {order}");
}

#[test]
fn momentum_is_conserved() {
    let g = Grid3::new(16, 12.0).unwrap();
    let r = Recipe::PlaneWavePacket {
        amplitude: 1.0,
        width: 1.5,
        wavevector: [1.0, 0.5, 0.0],
        center: None,
    };
    let (u, ut) = synthesize_initial_data(&g, &r, 0).unwrap();
    let s0 = WaveState::new(0.0, u, ut).unwrap();
    let traj = evolve(&s0, 10.0, default_dt(&g), 8, Nonlinearity::Defocusing).unwrap();
    let p0 = momentum(&s0);
    let scale = p0.iter().map(|v| v * v).sum::<f64>().sqrt();
    for st in &traj.states {
        let p = momentum(st);
        let d = (0..3).map(|i| (p[i] - p0[i]).powi(2)).sum::<f64>().sqrt();
        assert!(d <= 1e-6 * scale, "t = {}: drift {}", st.t, d / scale);
    }
}

#[test]
fn focusing_flips_the_cubic_correction() {
    // u_± = u_lin ∓ a³w + O(a⁵), so the half-difference scales as a³ and
    // the half-sum tracks the free evolution to O(a⁵).
    let g = Grid3::new(16, 8.0).unwrap();
    let dt = 0.05;
    let half_diff = |a: f64| {
        let s0 = bump(&g, a, 0.0);
        let d = run(&s0, dt, 10, Nonlinearity::Defocusing);
        let f = run(&s0, dt, 10, Nonlinearity::Focusing);
        let l = run(&s0, dt, 10, Nonlinearity::Off);
        let diff = norm(&d.u.sub(&f.u)) / 2.0;
        let mut mid = d.u.clone();
        mid.add_scaled(&f.u, 1.0);
        let sum_dev = norm(&mid.scaled(0.5).sub(&l.u));
        (diff, sum_dev)
    };
    let (d1, m1) = half_diff(1e-2);
    let (d2, m2) = half_diff(2e-2);
    assert!(((d2 / d1) - 8.0).abs() < 0.05 * 8.0, "ratio {}", d2 / d1);
    assert!(m1 < 1e-3 * d1 && m2 < 1e-3 * d2);
    // defocusing decelerates the positive bump relative to the free wave
    let s0 = bump(&g, 1e-2, 0.0);
    let d = run(&s0, dt, 10, Nonlinearity::Defocusing);
    let l = run(&s0, dt, 10, Nonlinearity::Off);
    assert!(d.u.dot(&s0.u) < l.u.dot(&s0.u));
}

#[test]
fn duhamel_decomposition_reconstructs_the_solution() {
    let g = Grid3::new(16, 8.0).unwrap();
    let s0 = bump(&g, 3.0, 1.0);
    // the splitting error of the trajectory floors the comparison at O(dt²),
    // so dt is kept well below the snapshot spacing
    let mut errors = Vec::new();
    for stride in [128usize, 64] {
        let traj = evolve(&s0, 1.0, 1.0 / 2048.0, stride, Nonlinearity::Defocusing).unwrap();
        let j = SubInterval::new(0.25, 1.0).unwrap();
        let t = 0.75;
        let lin = adapted_linear_part(&traj, &j, t).unwrap();
        let nl = duhamel_nonlinear_part(&traj, &j, t).unwrap();
        let mut sum = lin.clone();
        sum.add_assign(&nl.state);
        let exact = &traj.states[traj.nearest_index(t).unwrap()];
        errors.push(distance(&sum, exact) / (norm(&exact.u) + norm(&exact.ut)));
    }
    assert!(errors[1] < 1e-4, "{errors:?}");
    assert!(errors[0] / errors[1] > 12.0, "{errors:?}");
}
