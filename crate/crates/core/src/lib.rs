//! Interaction energies of periodic charge distributions on Bravais lattices.
//!
//! Energies can be computed by direct summation, a convergence factor with
//! Richardson extrapolation, a spectral (theta-integral) form, Ewald
//! summation, or the Epstein zeta function. The `optimize` module finds the
//! charge distribution of least energy through the minimizers of translated
//! theta functions and checks it against a dense eigen-decomposition.
//!
//! Everything is generic over [`Real`] (`f32` or `f64`); the aliases below fix
//! the scalar for the common cases.

pub mod charges;
pub mod energy;
pub mod error;
pub mod lattice;
pub mod optimize;
pub mod potentials;
pub mod quadrature;
pub mod scalar;
pub mod special_functions;

pub use charges::ChargeConfiguration;
pub use energy::{EnergyReport, Route};
pub use error::{Error, Result};
pub use lattice::{BravaisLattice, SublatticeIndex};
pub use optimize::{ThetaMinimum, VerificationReport};
pub use potentials::{Potential, PotentialSpec};
pub use scalar::Real;

pub type Lattice = BravaisLattice<f64>;
pub type Charges = ChargeConfiguration<f64>;
pub type Interaction = Potential<f64>;
pub type Energy = EnergyReport<f64>;
pub type Verification = VerificationReport<f64>;

pub type Lattice32 = BravaisLattice<f32>;
pub type Charges32 = ChargeConfiguration<f32>;
pub type Interaction32 = Potential<f32>;
pub type Energy32 = EnergyReport<f32>;
