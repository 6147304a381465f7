//! Split a multigraph into `k` spanning trees (or forests) plus one more
//! forest whose components have at most `d` edges, or return a vertex set
//! showing the graph is too dense for that.
//!
//! ```
//! use forestsplit::engine::{run, EngineConfig, OutcomeStatus};
//! use forestsplit::{certify::verify, instances};
//!
//! let g = instances::dodecahedron();
//! let out = run(&g, 1, 4, &EngineConfig::default()).unwrap();
//! assert_eq!(out.status, OutcomeStatus::ValidDecomposition);
//! assert!(verify(&g, 1, 4, &out.forests).passed);
//! ```
//!
//! The guide in `book/` walks through each module.

mod flow;
pub mod graph;
pub mod instances;
pub mod sparsity;
pub mod base;
pub mod oracle;
pub mod engine;
pub mod certify;

// Every code block in the guide runs as a doctest.
#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../README.md")]
    mod readme {}
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/graphs.md")]
    mod graphs {}
    #[doc = include_str!("../../../book/src/density.md")]
    mod density {}
    #[doc = include_str!("../../../book/src/base-split.md")]
    mod base_split {}
    #[doc = include_str!("../../../book/src/engine.md")]
    mod engine {}
    #[doc = include_str!("../../../book/src/certificates.md")]
    mod certificates {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
