use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// Malformed call: wrong shape, index, or parameter outside the admissible range.
    #[error("argument error: {0}")]
    Argument(String),
    /// Input violates a mathematical precondition (zero vector, non-unit norm, bad spectrum).
    #[error("domain error: {0}")]
    Domain(String),
    /// Requested size exceeds a guard on enumeration or memory.
    #[error("resource error: {0}")]
    Resource(String),
    /// A threshold root was requested outside the region where it exists.
    #[error("not in region: {0}")]
    NotInRegion(String),
}

pub type Result<T> = std::result::Result<T, Error>;

macro_rules! ensure {
    ($cond:expr, $kind:ident, $($fmt:tt)+) => {
        // negated so that NaN fails the check
        #[allow(clippy::neg_cmp_op_on_partial_ord)]
        if !$cond {
            return Err($crate::error::Error::$kind(format!($($fmt)+)));
        }
    };
}
pub(crate) use ensure;
