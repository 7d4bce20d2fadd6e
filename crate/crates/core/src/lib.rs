//! Analysis and construction of S-boxes over GF(2^n).
//!
//! - [`gf2n`]: field arithmetic with log/antilog tables
//! - [`boolfn`]: truth tables, vectorial functions, ANF, counting
//! - [`metrics`]: DDT, Walsh spectrum, differential uniformity, nonlinearity, fibres
//! - [`powermap`]: power maps x^d, cyclotomic cosets, exponent surveys
//! - [`construct`]: binomial lifts, bijective repair, coefficient search

pub mod boolfn;
pub mod construct;
pub mod error;
pub mod gf2n;
pub mod metrics;
pub mod powermap;

pub use boolfn::{AnfForm, TruthTable, VectorialFunction};
pub use error::{Error, Result};
pub use gf2n::{FieldElement, FieldSpec};
