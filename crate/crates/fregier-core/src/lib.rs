//! Frégier points and Frégier loci of conics in the four Cayley–Klein planes
//! (Euclidean, pseudo-Euclidean, elliptic, hyperbolic), plus classification of
//! the pencil spanned by a conic and the absolute.
//!
//! The geometric core: fix a point `p` on a regular conic and inscribe right
//! angles at `p` (right angles in the sense of the selected plane geometry).
//! Every hypotenuse chord passes through one common point, the Frégier point
//! of `p`. As `p` sweeps the conic, these points trace the Frégier locus,
//! which is generically again a conic and degenerates to a line segment or a
//! single point for special shapes. This crate computes Frégier points by two
//! independent constructions, fits and classifies the locus numerically,
//! evaluates closed-form locus equations for the canonical conic families,
//! scans family parameters for singular loci, and classifies conic/absolute
//! pencils by their base-point contact pattern.

pub mod conic;
pub mod fregier;
pub mod metric;
pub mod pencil;
pub mod projective;

use std::fmt;

/// Crate-wide error type. Variants describe the geometric or numerical
/// condition that prevented an operation from producing a result.
#[derive(Clone, Debug, PartialEq)]
pub enum Error {
    /// Two points expected to be distinct coincide up to scale.
    CoincidentPoints,
    /// Two lines expected to be distinct coincide up to scale.
    CoincidentLines,
    /// A coordinate vector was zero or contained NaN/infinity.
    InvalidCoordinates,
    /// A tolerance was not strictly positive.
    InvalidTolerance,
    /// No real representative exists for a complex homogeneous vector.
    NotReal,
    /// A regular (rank-3) conic was required.
    SingularConic,
    /// The line lies entirely on the (degenerate) conic.
    LineOnConic,
    /// A degenerate (rank ≤ 2) conic was required.
    NotDegenerate,
    /// The conic has no real points.
    NoRealPoints,
    /// Point sampling could not produce enough distinct points.
    SamplingExhausted,
    /// The point lies on the absolute; the isotropic lines coincide.
    OnAbsolute,
    /// The tangent at the point is self-perpendicular; the normal degenerates.
    IsotropicTangent,
    /// A chord of the construction is tangent or otherwise degenerate.
    DegenerateChord,
    /// The singular-value ratio test of a fit was inconclusive.
    FitUnstable,
    /// A family parameter lies outside its admissible domain.
    DomainViolation(String),
    /// The two conics of a pencil are proportional.
    ProportionalConics,
    /// Contact-pattern signals disagree; classification refused to guess.
    ClassificationAmbiguous(String),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::CoincidentPoints => write!(f, "points coincide up to scale"),
            Error::CoincidentLines => write!(f, "lines coincide up to scale"),
            Error::InvalidCoordinates => write!(f, "coordinates are zero or not finite"),
            Error::InvalidTolerance => write!(f, "tolerances must be strictly positive"),
            Error::NotReal => write!(f, "no real representative up to scale"),
            Error::SingularConic => write!(f, "conic is singular (rank < 3)"),
            Error::LineOnConic => write!(f, "line lies on the conic"),
            Error::NotDegenerate => write!(f, "conic is regular (rank 3)"),
            Error::NoRealPoints => write!(f, "conic has no real points"),
            Error::SamplingExhausted => write!(f, "could not sample enough distinct points"),
            Error::OnAbsolute => write!(f, "point lies on the absolute"),
            Error::IsotropicTangent => write!(f, "tangent line is isotropic"),
            Error::DegenerateChord => write!(f, "chord construction degenerates at this point"),
            Error::FitUnstable => write!(f, "singular-value ratio test inconclusive"),
            Error::DomainViolation(msg) => write!(f, "parameter outside family domain: {msg}"),
            Error::ProportionalConics => write!(f, "conics are proportional"),
            Error::ClassificationAmbiguous(msg) => write!(f, "classification ambiguous: {msg}"),
        }
    }
}

impl std::error::Error for Error {}

/// Convenience alias used throughout the crate.
pub type Result<T> = std::result::Result<T, Error>;
