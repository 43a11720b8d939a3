use alloc::string::String;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum Error {
    #[error("invalid field: {0}")]
    InvalidField(&'static str),
    #[error("zero has no multiplicative inverse")]
    ZeroInverse,
    #[error("matrix dimensions do not match: {0}")]
    DimensionMismatch(&'static str),
    #[error("matrix is singular")]
    SingularMatrix,
    #[error("invalid code parameters: {0}")]
    InvalidParams(String),
    #[error("no MDS code found after {attempts} sampled values of rho")]
    RetriesExhausted { attempts: usize },
    #[error("{erased} erasures exceed the correctable maximum of {max}")]
    TooManyErasures { erased: usize, max: usize },
    #[error("surviving blocks are not consistent with any codeword")]
    InconsistentInput,
    #[error("block index {0} is out of range")]
    InvalidBlock(usize),
    #[error("block (u={u}, v={v}) is out of range")]
    InvalidBlockId { u: usize, v: usize },
    #[error("repair plan does not match the available symbols (block {block}, symbol {symbol})")]
    PlanMismatch { block: usize, symbol: usize },
}
