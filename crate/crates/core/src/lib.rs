//! Polynomial local-SL entanglement invariants of few-qubit states.
//!
//! The crate evaluates invariants such as the concurrence and the 3-tangle in
//! two equivalent ways: as antilinear expectation values on copies of a state
//! ([`antilinear`]), and as contractions of ordinary Pauli correlation
//! functions obtained by lifting each antilinear comb to a linear operator on
//! doubled copies ([`lift`]). The correlator form is what an experiment can
//! measure, so [`correlator`] simulates finite-shot Pauli measurements and
//! propagates their statistical error into the invariant estimates.
//! [`noise`] evaluates white-noise error formulas against a finite-difference
//! oracle and [`roof`] bounds the convex-roof extension of the 3-tangle for
//! mixed states.
//!
//! ```
//! use slocc::antilinear::three_tangle;
//! use slocc::correlator::{exact_correlators, invariant_from_table, InvariantKind};
//! use slocc::qubit::{PauliString, PureState};
//!
//! let ghz = PureState::ghz(3);
//! assert!((three_tangle(&ghz).unwrap() - 1.0).abs() < 1e-12);
//!
//! let table = exact_correlators(&ghz, &PauliString::all(3)).unwrap();
//! let est = invariant_from_table(&table, InvariantKind::Tau3Sq).unwrap();
//! assert!((est.value - 1.0).abs() < 1e-10);
//! ```

pub mod antilinear;
pub mod cli;
pub mod correlator;
pub mod error;
pub mod io;
pub mod lift;
pub mod noise;
pub mod qubit;
pub mod roof;
pub mod selftest;

pub use error::{Error, Result};

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/states.md")]
    mod states {}
    #[doc = include_str!("../../../book/src/antilinear.md")]
    mod antilinear {}
    #[doc = include_str!("../../../book/src/lift.md")]
    mod lift {}
    #[doc = include_str!("../../../book/src/measurement.md")]
    mod measurement {}
    #[doc = include_str!("../../../book/src/noise.md")]
    mod noise {}
    #[doc = include_str!("../../../book/src/roof.md")]
    mod roof {}
    #[doc = include_str!("../../../README.md")]
    mod readme {}
}
