//! Bounded gaps between primes in arithmetic progressions: admissible
//! tuples, `M_k` bounds, exact sieve weights and numerical experiments.
//!
//! The guide in `book/` walks through each module.

pub mod arith;
pub mod cli;
pub mod error;
pub mod experiments;
pub mod primes;
pub mod sieveweights;
pub mod tuples;
pub mod variational;

pub use error::{Error, Result};

#[cfg(doctest)]
mod guide {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/tuples.md")]
    mod tuples {}
    #[doc = include_str!("../../../book/src/variational.md")]
    mod variational {}
    #[doc = include_str!("../../../book/src/sieve.md")]
    mod sieve {}
    #[doc = include_str!("../../../book/src/experiments.md")]
    mod experiments {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
