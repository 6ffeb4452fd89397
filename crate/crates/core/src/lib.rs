//! Pseudo-spectral laboratory for the defocusing cubic wave equation
//! `∂ₜₜu − Δu = −u³` on a periodic box standing in for ℝ³.
//!
//! The crate is organised bottom-up:
//!
//! * [`spectral`] – grids, unitary 3-D transforms, radial Fourier multipliers
//!   (`D^σ`, the smoothing operator `I`), Littlewood-Paley projections and
//!   initial-data synthesis.
//! * [`dynamics`] – the exact free-wave propagator, the Strang-split cubic
//!   integrator, trajectories and the linear/nonlinear decomposition adapted to
//!   a subinterval.
//! * [`functionals`] – energies, Sobolev norms, mixed space-time norms and the
//!   Strichartz-type `Z` diagnostics.
//! * [`symbol`] – the quadrilinear multiplier `μ`, its case bounds and the
//!   commutator form of the mollified-energy increment.
//! * [`imethod`] – scaling, parameter selection, almost-conservation ledgers
//!   and the end-to-end growth-bound experiment.
//!
//! Work that is data-parallel (transforms, lattice reductions, Monte Carlo
//! sampling) goes through [`par`], which uses rayon when the `parallel`
//! feature is enabled and falls back to plain loops otherwise. Results are
//! bit-identical in both modes.

pub mod dynamics;
pub mod error;
pub mod functionals;
pub mod imethod;
pub mod par;
pub mod spectral;
pub mod symbol;

pub use error::{Error, Result};
