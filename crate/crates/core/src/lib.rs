// SPDX-License-Identifier: Apache-2.0

//! Approximate logic synthesis by Boolean matrix factorization.
//!
//! A circuit is cut into small subcircuits, each subcircuit's truth table
//! `M` is factorized as `M ~ B C`, and the factors are turned back into
//! logic: a compressor realizing `B` followed by an OR or XOR decompressor
//! realizing `C`. A greedy search then lowers the factorization degree of
//! one subcircuit at a time while the measured error stays under a
//! threshold.

pub mod bmf;
pub mod boolmat;
pub mod cli;
pub mod error;
pub mod explore;
pub mod fixtures;
pub mod netlist;
pub mod partition;
pub mod qor;
pub mod resynth;

pub use error::{Error, ErrorKind, Result};

// The guide's snippets run as doc-tests through these empty modules.
#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/matrices.md")]
    mod matrices {}
    #[doc = include_str!("../../../book/src/factorization.md")]
    mod factorization {}
    #[doc = include_str!("../../../book/src/netlists.md")]
    mod netlists {}
    #[doc = include_str!("../../../book/src/partitioning.md")]
    mod partitioning {}
    #[doc = include_str!("../../../book/src/resynthesis.md")]
    mod resynthesis {}
    #[doc = include_str!("../../../book/src/quality.md")]
    mod quality {}
    #[doc = include_str!("../../../book/src/exploration.md")]
    mod exploration {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
