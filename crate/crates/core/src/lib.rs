//! Quantum mechanics of one and two spin-1/2 systems.
//!
//! The crate covers the full arc from single-spin superposition to the Bell
//! inequality:
//!
//! - [`qcore`]: complex amplitudes, pure states, density matrices, purity.
//! - [`spin`]: directions on the sphere and spin states along them.
//! - [`measure`]: seeded Born-rule sampling, frequency estimation, and
//!   superposition-vs-mixture discrimination.
//! - [`entangle`]: two-spin states, factorizability, the singlet and its
//!   joint measurement law.
//! - [`bell`]: the Bell combination on quantum and classical models, with an
//!   explicit local-hidden-variable feasibility search.
//! - [`jsonfmt`]: JSON output with bit-exact float round-trips.
//!
//! Every random process takes an explicit seeded stream, so all results
//! reproduce bit-exactly.
//!
//! ```
//! use spinhalf::bell::{quantum_bell_lhs, DirectionTriple};
//! use std::f64::consts::FRAC_PI_3;
//!
//! let triple = DirectionTriple::coplanar(FRAC_PI_3, FRAC_PI_3).unwrap();
//! let lhs = quantum_bell_lhs(&triple).unwrap();
//! assert!((lhs - (-0.125)).abs() < 1e-12);
//! ```

pub mod bell;
pub mod entangle;
pub mod error;
pub mod jsonfmt;
pub mod measure;
pub mod qcore;
pub mod spin;

pub use bell::{BellResult, DirectionTriple, JointDistribution};
pub use entangle::{Sign, TwoSpinState};
pub use error::{QmError, Result};
pub use measure::{FrequencyEstimate, RngStream};
pub use qcore::{ComplexAmp, DensityMatrix, PureState};
pub use spin::Direction;
