//! Tree compression with minimal dags, binary and hybrid dags, and
//! grammar-compressed dags.

pub mod census;
pub mod dag;
pub mod encode;
pub mod enumerate;
pub mod equality;
pub mod error;
pub mod hybrid;
pub mod ingest;
pub mod label;
pub mod random;
pub mod slstring;
pub mod slt;
mod syntax;
pub mod tree;

pub use dag::{minimize, minimize_binary, BinaryDag, Dag, ReducedGrammar, Symbol};
pub use encode::{fcns, fcns_inverse, lcps, lcps_inverse};
pub use error::{Error, Result};
pub use label::Label;
pub use tree::{parse_term, BinaryTree, UnrankedTree};
