//! Simulation laboratory for Poissonian last passage percolation.
//!
//! The crate is organized in three layers:
//!
//! - [`field`]: reproducible Poisson point fields and the exact
//!   combinatorial core — chain energies, extremal geodesics, constrained
//!   energies and the exhaustive oracle that checks them.
//! - [`scaled`]: the KPZ-scaled picture — polymers as functions of time,
//!   weights, transversal fluctuation functionals and the diagonal weight
//!   profile.
//! - [`lab`]: deterministic Monte Carlo campaigns that probe the scaled
//!   model's statistics at desk scale — exponent fits, tail fits,
//!   curvature and distributional-convergence checks.

pub mod error;
pub mod field;
pub mod lab;
pub mod scaled;

pub use error::{Error, Result};
pub use field::chain::Chain;
pub use field::{sample_field, PlanePoint, PointField, Region};
pub use scaled::profile::{weight_profile, WeightProfile};
pub use scaled::{
    compatible, mtf_estimate, polymer, polymer_pair, tf_between, to_scaled, to_unscaled, weight,
    AdmissiblePair, Polymer, ScaledPoint, Side,
};
