use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("group must have at least one cyclic factor")]
    NoFactors,

    #[error("cyclic factor order must be at least 1, got {0}")]
    InvalidModulus(u64),

    #[error("group order {order} exceeds the configured ceiling {ceiling}")]
    OrderTooLarge { order: u128, ceiling: usize },

    #[error("element index {index} out of range for group of order {order}")]
    IndexOutOfRange { index: usize, order: usize },

    #[error("coordinate tuple {coords:?} does not match factors {moduli:?}")]
    InvalidCoordinates { coords: Vec<usize>, moduli: Vec<usize> },

    #[error("operands belong to different groups ({left} vs {right})")]
    SpecMismatch { left: String, right: String },

    #[error("R must be nonempty")]
    EmptyR,

    #[error("union closure needs at least one generator")]
    NoGenerators,

    #[error("operation needs a nonempty family")]
    EmptyFamily,

    #[error("family is not union-closed")]
    NotUnionClosed,

    #[error("group of order {order} exceeds the limit {limit} for this operation")]
    GroupTooLarge { order: usize, limit: usize },

    #[error("family exceeds {limit} members")]
    FamilyTooLarge { limit: usize },

    #[error("parse error: {0}")]
    Parse(String),
}

impl Error {
    /// True for errors raised by a size guard rather than bad input.
    pub fn is_resource_guard(&self) -> bool {
        matches!(
            self,
            Error::OrderTooLarge { .. } | Error::GroupTooLarge { .. } | Error::FamilyTooLarge { .. }
        )
    }
}
