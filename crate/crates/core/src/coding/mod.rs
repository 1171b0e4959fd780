//! Finite-field linear algebra for intra-flow network coding.

pub mod gf;
pub mod knowledge;
pub mod mds;
pub mod xor;

pub use gf::{FieldElement, FieldOps, Gf, Gf16};
pub use knowledge::{
    exists_uncovered_vector, innovative_combination, CoefficientVector, Combination, KnowledgeSpace, UncoveredVerdict,
    EXHAUSTIVE_LIMIT,
};
pub use mds::{
    mds_decode, mds_encode, pack_frame, unpack_frame, MdsCode, FRAME_HEADER_BYTES, NARROW_LIMIT, WIDE_LIMIT,
};
pub use xor::{replay_xor_schedule, xor_broadcast_schedule, XorSlot};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum CodingError {
    #[error("vector length {got} does not match ambient dimension {expected}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("{0} is not an element of the field")]
    NotAFieldElement(u8),
    #[error("no receivers given")]
    NoReceivers,
    #[error("spaces live over different fields or ambient dimensions")]
    Incompatible,
    #[error("receiver {receiver} already knows everything the input knows")]
    NothingInnovative { receiver: usize },
    #[error("field of size {q} is too small for {receivers} receivers")]
    FieldTooSmall { q: usize, receivers: usize },
    #[error("need {need} coded symbols, got {got}")]
    TooFewSymbols { need: usize, got: usize },
    #[error("coded symbol position {0} appears twice")]
    RepeatedPosition(usize),
    #[error("coded symbol position {pos} is outside 0..{n}")]
    PositionOutOfRange { pos: usize, n: usize },
    #[error("packets must all have the same length")]
    UnequalPackets,
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}
