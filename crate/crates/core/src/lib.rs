//! Construction and verification of locally stable sets of multipartite
//! orthogonal quantum states.
//!
//! A set of pairwise orthogonal pure states is *locally stable* when, for
//! every party, the only local measurement element preserving all pairwise
//! orthogonalities is a multiple of the identity. This crate provides:
//!
//! - [`state`]: sparse unnormalized states with exact rational/phase
//!   coefficients, inner products, and constraint-row contractions;
//! - [`families`]: the minimum-cardinality constructions (`max(dims)+1`
//!   states) for bipartite and multipartite systems, including the
//!   genuinely entangled variant;
//! - [`solver`]: the numeric oracle — per-party constraint systems, SVD
//!   (or RREF) nullspaces, stability verdicts, deletion tests;
//! - [`prover`]: a symbolic deduction engine producing replayable proof
//!   traces per party, cross-checkable against the oracle;
//! - [`setio`]: versioned JSON interchange for sets, verdicts, traces.
//!
//! Numeric paths are generic over the real scalar via [`scalar::Real`];
//! the aliases below pin `f64`, which is what the CLI and the default
//! tolerances assume.
//!
//! ```
//! use locstab::{families, prover, solver, DEFAULT_RANK_TOL};
//!
//! let set = families::tripartite_general(3, 4, 5)?;
//! assert_eq!(set.len(), 6); // max(dims) + 1 states
//!
//! let verdict = solver::verify_local_stability(&set, DEFAULT_RANK_TOL)?;
//! assert!(verdict.locally_stable);
//! assert!(verdict.reports.iter().all(|r| r.dimension == 1));
//!
//! for party in 0..3 {
//!     let trace = prover::prove_trivial(&set, party)?;
//!     assert_eq!(trace.outcome, prover::Outcome::Trivial);
//! }
//! # Ok::<(), locstab::Error>(())
//! ```

pub mod coeff;
pub mod entangle;
pub mod error;
pub mod families;
pub mod linalg;
pub mod prover;
pub mod scalar;
pub mod setio;
pub mod solver;
pub mod state;

pub use coeff::{Coefficient, MonomialSum};
pub use error::{Error, Result};
pub use scalar::Real;
pub use state::{is_orthogonal_set, is_stopper, BasisTerm, PureState, StateSet, SystemShape};

/// Relative rank tolerance for nullspace dimension decisions.
pub const DEFAULT_RANK_TOL: f64 = 1e-8;

/// Absolute tolerance for orthogonality validation and zero tests on
/// quantities of order one.
pub const DEFAULT_ORTHO_TOL: f64 = 1e-9;

/// Complex double, the default numeric scalar.
pub type C64 = num_complex::Complex<f64>;

pub type ConstraintSystem64 = solver::ConstraintSystem<f64>;
pub type NullspaceReport64 = solver::NullspaceReport<f64>;
pub type StabilityVerdict64 = solver::StabilityVerdict<f64>;

/// Numeric value of an exact coefficient in double precision.
pub fn coeff_value(c: &Coefficient) -> C64 {
    c.value()
}
