//! Exact falsifiability and capacity measures for finite hypothesis classes,
//! in three prediction settings: statistical learning over i.i.d. samples,
//! sequential prediction against an adaptive adversary, and induction over
//! the outputs of a small prefix-free program machine.
//!
//! Everything that can be exact is exact: probabilities, risks, game values,
//! and measure values are arbitrary-precision rationals. Base-2 logarithms
//! are the one inexact quantity; inequalities involving them carry 1e-9
//! slack.

pub mod error;
pub mod info;
pub mod numerics;
pub mod seq;
pub mod slt;
pub mod uni;

pub use error::{Error, Result};
pub use numerics::{rat, rat_int, Rational};
