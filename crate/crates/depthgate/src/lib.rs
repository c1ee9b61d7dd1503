//! depthgate proves lower and upper bounds on the minimal depth of sorting
//! networks. It enumerates second-layer candidates modulo symmetry, encodes
//! network existence as CNF, drives SAT solvers over the instances, and
//! independently verifies every extracted network.

pub mod bits;
pub mod campaign;
pub mod cnf;
pub mod dimacs;
pub mod error;
pub mod layers;
pub mod network;
pub mod oracle;
pub mod perm;
pub mod solver;
pub mod text;

pub use bits::{BitVector, OutputSet};
pub use error::{Error, Result};
pub use network::{Comparator, Layer, Network};
pub use perm::Permutation;
