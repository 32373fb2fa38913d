//! Squeezing-function lower bounds, automorphisms, tangential-approach
//! classification and boundary scaling for generalized complex ellipsoids
//! `D_P = { |z_n|^2 + P(z') < 1 }`.

pub mod autmb;
pub mod domain;
pub mod domconv;
pub mod error;
pub mod linalg;
pub mod optimize;
pub mod roots;
pub mod scalemethod;
pub mod sampling;
pub mod scalar;
pub mod seqclass;
pub mod squeeze;
pub mod table;
pub mod wpoly;

pub use error::{Error, Result};
pub use scalar::{Dd, C64};
pub use wpoly::{MultiWeight, Term, WeightedPolynomial};
