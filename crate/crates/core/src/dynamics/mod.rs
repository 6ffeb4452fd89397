//! Time evolution of `∂ₜₜu − Δu = −σu³` on the periodic box.
//!
//! The free flow is applied exactly, mode by mode, so the linear part of a
//! solution adapted to a subinterval is representable without error. The
//! cubic term enters through a dealiased kick, composed with the free flow
//! by Strang splitting. Splitting a trajectory on `J = [a, b]` into the free
//! evolution of the data at `a` and the Duhamel integral of the forcing is
//! done by quadrature over stored snapshots.

mod decomposition;
mod diagnostics;
mod persist;
mod propagate;
mod state;
mod trajectory;

pub use decomposition::{adapted_linear_part, duhamel_nonlinear_part, duhamel_series, DuhamelPart};
pub use diagnostics::{
    boundary_energy_fraction, energy_density, in_boundary_shell, momentum, BoundaryMonitor,
    BOUNDARY_THRESHOLD,
};
pub use persist::{load_manifest, load_trajectory, save_trajectory, TrajectoryManifest, MANIFEST_NAME};
pub use propagate::{
    cubic_forcing, default_dt, linear_propagate, nonlinear_kick, step_strang, Nonlinearity,
    Propagator, StrangStepper,
};
pub use state::WaveState;
pub use trajectory::{evolve, evolve_observed, step_plan, EvolveSummary, SubInterval, Trajectory};

pub(crate) use propagate::frequencies;
