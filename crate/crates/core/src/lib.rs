//! Behavioural distances and bisimulation quotients for nondeterministic
//! fuzzy transition systems.
//!
//! A fuzzy transition system (FTS) maps a state and a label to a finite set
//! of possibility distributions over states. This crate computes
//!
//! * the non-discounted behavioural pseudo-ultrametric (an exact least
//!   fixpoint, [`metric::fixpoint_undiscounted`]),
//! * discounted variants, both approximated to a chosen tolerance and
//!   recovered exactly by smallest-denominator rounding
//!   ([`metric::fixpoint_discounted_approx`],
//!   [`metric::fixpoint_discounted_exact`]),
//! * the distribution lifting of a state distance via max-min mathematical
//!   programming ([`lifting::lift`]), and
//! * the bisimulation quotient by signature-based partition refinement
//!   ([`bisim::quotient`]).
//!
//! All arithmetic is exact: every degree of membership, every distance and
//! every intermediate value is a rational number confined to the unit
//! interval ([`UnitRational`]). There is no floating point anywhere in the
//! computation path.
//!
//! The `testing` feature (on by default) additionally ships brute-force
//! reference implementations ([`oracle`]) and random instance generators
//! ([`testgen`]) so results can be cross-checked on small models.

pub mod bisim;
pub mod lifting;
pub mod metric;
pub mod model;
#[cfg(feature = "testing")]
pub mod oracle;
pub mod rational;
#[cfg(feature = "testing")]
pub mod testgen;

pub use bisim::{Partition, StateSignature};
pub use lifting::{EquationSystem, SupConstraint, Valuation};
pub use metric::{DistanceMatrix, FixpointReport};
pub use model::{Fts, FuzzySubset, LabelId, StateId};
pub use rational::{Literal, UnitRational};
