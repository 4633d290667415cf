//! Integral cohomology lattices of quotients X/G by automorphisms of prime order.
//!
//! Everything is exact: Gram matrices are `BigInt`, rational steps use `BigRational`.

pub mod error;
pub mod matrix;
pub mod snf;
pub mod lattice;
pub mod expr;
pub mod gmodule;
pub mod normality;
pub mod toric;
pub mod quotient;
pub mod scenario;
pub mod hilb2;
pub mod catalog;

pub use error::*;
pub use expr::parse_lattice_expr;
pub use lattice::{DiscriminantGroup, GramLattice, InvariantSummary, SublatticeEmbedding};
pub use matrix::Matrix;
pub use snf::{smith_normal_form, Snf};
