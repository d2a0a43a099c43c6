//! Meromorphic structure of the constant term of degenerate Eisenstein series
//! attached to the Heisenberg and Siegel maximal parabolics of `Sp(4)`.
//!
//! The crate is layered bottom-up:
//!
//! - [`root_system`]: type `C_n` roots, coroots and the Weyl group as signed
//!   permutations, with Kostant coset representatives.
//! - [`characters`]: inducing torus characters, pairing with coroots, Weyl action.
//! - [`normfactor`]: inverse normalizing factors as canonical formal products of
//!   completed `L`- and `ε`-symbols.
//! - [`lgerms`]: exact order-of-vanishing and truncated Laurent germ arithmetic
//!   over a small knowledge base of completed `L`-function facts.
//! - [`local_ops`]: rule tables for poles and actions of local normalized
//!   intertwining operators, loaded from a line-oriented data file.
//! - [`constant_term`]: assembly of the constant term, same-target cancellation,
//!   Eisenstein pole orders, images, and theorem clause grids.
//! - [`numerics`]: double-precision completed `ζ` and Dirichlet `L`-functions used
//!   as an independent oracle for the symbolic orders.
//! - [`cli`]: scenario files and report serialization behind the `eisen-sp4` binary.

pub mod characters;
pub mod cli;
pub mod constant_term;
pub mod error;
pub mod lgerms;
pub mod local_ops;
pub mod normfactor;
pub mod numerics;
pub mod rational;
pub mod root_system;

pub use error::{Error, Result};
pub use num_rational::Rational64 as Q;
