//! Pattern statistics in random multiset permutations and random set partitions.
//!
//! The crate pairs exact rational machinery (enumeration, joint moments and
//! cumulants, weighted dependency graph parameters, conditional expectations
//! under Stam's urn model) with seeded Monte Carlo pipelines for checking
//! normality and scaling at sizes beyond enumeration.

pub mod cli;
pub mod combi;
pub mod cond;
pub mod error;
pub mod limits;
pub mod mc;
pub mod moments;
pub mod patterns;
pub mod rational;
pub mod samplers;
pub mod stats;
pub mod wdg;

pub use combi::{ArcPattern, Multiset, PermPattern, SetPartition, Word};
pub use error::{Error, Result};
pub use limits::Limits;
pub use rational::Rational;
