//! Combinatorics of admissible sets in extended affine Weyl groups.
//!
//! The crate builds root data and Weyl groups, enumerates admissible sets
//! `Adm(μ)^K`, labels their Hasse diagrams with a reflection order extended
//! by symbols for the maximal elements, and checks the dual EL-property and
//! Cohen–Macaulayness of the resulting posets by exhaustive enumeration.

#![allow(clippy::needless_range_loop)]

pub mod admissible;
pub mod affine;
pub mod cli;
pub mod error;
pub mod export;
pub mod labeling;
pub mod qbg;
pub mod rootdata;
pub mod shellcheck;
pub mod weyl;

pub use error::{Error, Result};
