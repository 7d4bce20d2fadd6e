use thiserror::Error;

/// Errors raised by constructors and operations that validate their inputs.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("field dimension {0} outside supported range 2..=16")]
    DimensionOutOfRange(u32),
    #[error("polynomial {poly:#x} does not have degree {n}")]
    DegreeMismatch { n: u32, poly: u32 },
    #[error("polynomial {0:#x} is reducible over GF(2)")]
    Reducible(u32),
    #[error("value {value:#x} out of range for {bits}-bit output")]
    ValueOutOfRange { value: u32, bits: u32 },
    #[error("table length {len} is not 2^{n}")]
    TableLength { len: usize, n: u32 },
    #[error("component mask must be nonzero")]
    ZeroComponentMask,
    #[error("operation requires n = m, got n = {n}, m = {m}")]
    NotSquare { n: u32, m: u32 },
    #[error("balanced nonlinearity bound needs n >= 3, got {0}")]
    BoundUndefined(u32),
    #[error("function is already bijective, nothing to repair")]
    AlreadyBijective,
    #[error("dimension {0} too large for this operation (max {1})")]
    TooLarge(u32, u32),
    #[error("invalid binomial parameters: {0}")]
    InvalidBinomial(String),
    #[error("field dimension {field} does not match requested n = {n}")]
    FieldMismatch { field: u32, n: u32 },
    #[error("exponent {d} outside 1..=2^{n}-2")]
    ExponentOutOfRange { d: u64, n: u32 },
}

pub type Result<T> = std::result::Result<T, Error>;
