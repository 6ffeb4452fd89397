//! Energies, Sobolev norms, mixed space-time norms and the `Z` diagnostics.
//!
//! Integrals over the box are lattice sums weighted by the cell volume, so
//! quadratic quantities agree exactly between physical and Fourier space.

mod energy;
mod report;
mod sobolev;
mod spacetime;

pub(crate) use energy::gradient_integral;
pub use energy::{
    energy, energy_parts, flow_energy, free_energy, mollified_energy, mollified_flow_energy, smooth_state,
    EnergyParts,
};
pub use report::{CsvHeader, EnergyTrajectory};
pub use sobolev::{field_norm, sobolev_norm, SobolevNorm};
pub use spacetime::{
    admissible_check, default_pairs, endpoint_proxy_pair, lebesgue_norm, mixed_norm_of_states,
    mixed_spacetime_norm, nonlinear_gain_norm, temporal_norm, z_norm, z_norm_of_states,
    AdmissiblePair, Component, GainReport, Rejection, Weight, ZNorm,
};
