//! Rank-distance space-time codes for multi-antenna channels with
//! inter-symbol interference.
//!
//! The crate builds binary code sets from linearized polynomials over GF(2^T),
//! checks their rank guarantees exhaustively at small sizes, maps them onto
//! PSK/QAM multi-level codes and estimates diversity order by Monte Carlo
//! simulation with maximum-likelihood decoding.

pub mod bitmat;
pub mod channel;
pub mod constellation;
pub mod fmat;
pub mod gf2m;
pub mod minimal_basis;
pub mod multilevel;
pub mod par;
pub mod rank_codes;
pub mod trellis;

pub use bitmat::BinaryMatrix;
pub use gf2m::{FieldContext, FieldElement, FieldError};
pub use par::Execution;
pub use rank_codes::{CodeError, CodeParams, CodeSet, EvalMode, LinearizedPolynomial};
pub use channel::{Codebook, SimConfig, SimResult};
pub use constellation::MapperConfig;
pub use trellis::TrellisGenerator;
