//! Realizability of rooted k-ary trees from attribute multisets.
//!
//! Given a multiset of node attributes — subtree sizes, heights, depths,
//! inorder ranks, or synchronized combinations — decide whether some
//! rooted tree of arity at most k realizes it, and produce a witness
//! tree when one exists. Polynomial checkers cover the tractable
//! attribute kinds and tree subclasses; an exact branch-and-bound solver
//! covers subtree sizes in general; a reduction pipeline generates hard
//! size instances from numerical matching problems; a small exhaustive
//! oracle grounds everything for testing.
//!
//! ```
//! use treereal::checkers::{check_depths, Subclass};
//! assert!(check_depths(&[0, 1, 1, 2], 2, Subclass::Any));
//! assert!(!check_depths(&[0, 1, 1, 1], 2, Subclass::Any));
//! ```

use thiserror::Error as ThisError;

pub mod checkers;
pub mod formats;
pub mod oracle;
pub mod reductions;
pub mod solver;
pub mod tree;

/// Unified error type across the library.
#[derive(Debug, ThisError)]
pub enum Error {
    /// The input violates a precondition (bad multiset, bad arity, ...).
    #[error("invalid input: {0}")]
    InvalidInput(String),
    /// The question is well-formed but outside what any implemented
    /// decision procedure answers.
    #[error("unsupported query: {0}")]
    UnsupportedQuery(String),
    /// The instance exceeds a hard size ceiling (oracle, brute force).
    #[error("instance too large: {0}")]
    TooLarge(String),
    /// A certificate does not have the shape it claims.
    #[error("malformed witness: {0}")]
    MalformedWitness(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub use checkers::{check_depths, check_height_depth_synced, check_heights, realize_sizes_itr, Subclass};
pub use oracle::Oracle;
pub use reductions::{EisInstance, KPwTInstance, NmtsInstance, NmtsKInstance};
pub use solver::{solve_sizes, verify_witness, SizeInstance, SolveOptions, SolveOutcome, Witness};
pub use tree::{AttributeKind, AttributeRecord, RootedTree, Slot};
