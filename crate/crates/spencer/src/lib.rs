//! Exact linear algebra for the symbol of the projective metrizability
//! operator: symbol kernels, the obstruction map τ, Spencer cohomology and
//! Cartan's test, with a table comparing closed forms against brute force.

pub mod cartan;
pub mod claims;
pub mod cohomology;
pub mod ratmat;
pub mod tableau;
pub mod tau;

pub use cartan::{cartan_test, CartanResult};
pub use claims::{run_claims, Claim, ClaimTable, SpencerConfig};

pub use cohomology::{spencer_h, SpencerCohomology};
pub use ratmat::{RatMat, SparseVec, Q};
pub use tableau::{Frame, MultisetIndex, SymbolTableau};
pub use tau::{tau1_check, tau_nullity, Tau1Report, TauReport};

/// Default cap on matrix rows and columns.
pub const DEFAULT_LIMIT: usize = 20_000;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SpencerError {
    #[error("matrix of {rows}x{cols} exceeds the limit {limit}")]
    ResourceLimit { rows: usize, cols: usize, limit: usize },
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error("eliminations disagree: {0}")]
    Inconsistent(String),
}
