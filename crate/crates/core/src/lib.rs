//! Giant atoms coupled to a mirror-terminated one-dimensional waveguide.
//!
//! The crate computes Markovian master-equation coefficients for arbitrary
//! layouts of multi-point atoms in front of a mirror, evolves two-atom states
//! with the full Lindblad equation or the single-excitation effective
//! Hamiltonian, measures concurrence, and locates decoherence-free interaction
//! points. An independent SLH cascade re-derives the coefficients from the
//! series product so the two routes can be checked against each other.
//!
//! All rates and times are dimensionless, in units of a reference decay rate.
//! Positions are stored as phases `k0 * x` measured from the mirror.

pub mod analytic;
pub mod cli;
pub mod coefficients;
pub mod dfi;
pub mod dynamics;
pub mod error;
pub mod model;
pub mod slh;

pub use coefficients::MasterEqCoefficients;
pub use error::{Error, Result};
pub use model::{CanonicalConfig, ConnectionPoint, GiantAtomSpec, Topology, WaveguideLayout};

/// Complex scalar used throughout.
pub type C64 = num_complex::Complex64;

/// Largest atom count accepted by paths that build dense `2^M` operators.
pub const MAX_DENSE_ATOMS: usize = 6;

/// Largest atom count accepted by single-excitation paths.
pub const MAX_SINGLE_EXCITATION_ATOMS: usize = 64;
