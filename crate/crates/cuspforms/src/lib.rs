//! Exact invariants of rational quadratic forms and the classification of
//! flat manifolds as cusp cross-sections of arithmetic hyperbolic manifolds.
//!
//! The crate works entirely in exact rational arithmetic. It computes the
//! complete equivalence datum of a nondegenerate form over `Q` (signature,
//! discriminant square class, Hasse-Witt invariants), decides rational and
//! projective equivalence, constructs forms and scalars with prescribed
//! local invariants, solves for the invariant bilinear forms of finite-group
//! representations, and evaluates the cusp cross-section criteria for the
//! flat 3- and 4-manifold tables and for several parametric families.
//!
//! Start with the runnable programs under `examples/`, one per capability,
//! or with the `cuspforms` command-line binary.

pub mod builder;
pub mod classify;
pub mod error;
pub mod form;
pub mod matrix;
pub mod rational;
pub mod reps;
pub mod symbols;

pub use error::Error;
pub use form::{DiagonalForm, FormInvariants, GramMatrix};
pub use rational::{Rational, SquareClass};
pub use symbols::Place;
