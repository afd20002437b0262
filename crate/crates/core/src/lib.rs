//! Generalized Young functions, Sobolev conjugates, Musielak-Orlicz norms and
//! Riesz potentials, with sampled verification of the inequalities that tie
//! them together.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analysis;
pub mod cli;
pub mod conditions;
pub mod error;
pub mod expr;
pub mod ext;
pub mod field;
pub mod geom;
pub mod gyf;
pub mod normalize;
pub mod quad;
pub mod report;
pub mod sobolev;
pub mod verify;
pub mod sample;
pub mod tab;

pub use error::{Error, Result};
pub use ext::ExtReal;
pub use gyf::{Gyf, YoungFn};
