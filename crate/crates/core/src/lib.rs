//! Exact-repairable MDS vector codes with sub-packetization ℓ = (n − k)^t.
//!
//! The code is defined by a parity-check matrix `P = H + E^ρ`: `H` stacks ℓ
//! interleaved Vandermonde-type MDS codes and `E^ρ` couples them so that any
//! single block can be rebuilt from the other n − 1 by plain symbol transfer,
//! downloading at most (1 + 1/t) times the cut-set bound.
//!
//! ```
//! use epmd_core::{codec, field::Field, mds, repair};
//!
//! let field = Field::with_bits(16).unwrap();
//! let template = mds::CodeTemplate::new(field, 6, 3, 1).unwrap();
//! let params = mds::sample_code(&template, 7, 5).unwrap().params;
//!
//! let message: Vec<_> = (0..9).map(epmd_core::field::FieldElement).collect();
//! let codeword = codec::encode(&params, &message).unwrap();
//!
//! let failed = params.layout().block(2).unwrap();
//! let plan = repair::plan_repair(params.layout(), failed).unwrap();
//! let rebuilt = repair::execute_repair(&params, &codeword.erase(&[2]), &plan).unwrap();
//! assert_eq!(rebuilt, codeword.block(2));
//! assert_eq!(plan.report().downloaded_symbols, 7);
//! ```

#![no_std]

extern crate alloc;

pub mod codec;
pub mod construction;
pub mod error;
pub mod field;
pub mod linalg;
pub mod mds;
pub mod repair;

pub use codec::{Codec, Codeword, PartialCodeword};
pub use construction::{BlockId, CodeParams, Layout, ParityCheckMatrix, SymbolId};
pub use error::{Error, Result};
pub use field::{Field, FieldElement};
pub use repair::{RepairPlan, RepairReport};
