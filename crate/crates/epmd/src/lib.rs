//! File formats, command-line driver and a storage-cluster simulator for
//! the codes in [`epmd_core`].

pub mod bench;
pub mod cli;
pub mod error;
pub mod format;
pub mod sim;
pub mod specfile;

pub use error::{Error, Result};
