//! Error type shared by every layer of the crate.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Cat0Error {
    /// A point, boundary point, geodesic or isometry was handed to a space
    /// it does not belong to.
    #[error("model mismatch: {0}")]
    ModelMismatch(String),

    /// Coordinates violate a model constraint (e.g. non-positive imaginary
    /// part in the half-plane, non-unit direction vector, unreduced word).
    #[error("invalid point: {0}")]
    InvalidPoint(String),

    /// A parameter lies outside a geodesic's domain, or two domains do not
    /// overlap where they must.
    #[error("domain error: {0}")]
    DomainError(String),

    /// An operation's precondition does not hold for the given input.
    #[error("precondition failed: {0}")]
    Precondition(String),

    /// A probe ran into its iteration or horizon budget without reaching a
    /// decision; the payload says which probe and where.
    #[error("inconclusive: {0}")]
    Inconclusive(String),

    /// Text that should denote a point/isometry/geodesic did not parse.
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Cat0Error>;
