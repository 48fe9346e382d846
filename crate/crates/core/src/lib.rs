//! Exact arithmetic on sums of squares of middle-1/alpha Cantor sets.
//!
//! For `alpha >= 3` every `x` in `[0, 4]` is a sum of four squares of points
//! of `C_alpha`. This crate builds such decompositions as re-checkable
//! [`Certificate`]s and verifies, at finite approximation levels, the interval
//! images and overlap conditions the construction relies on.
//!
//! All geometry is generic over [`Scalar`]; the exact instantiation used for
//! every soundness claim is [`Rational`], and the `Q*` aliases below name it.

pub mod cantor;
pub mod certificate;
pub mod decompose;
pub mod error;
pub mod image;
pub mod inequalities;
pub mod interval;
pub mod lemma;
pub mod rational;
pub mod scalar;
pub mod sweep;
pub mod union;

pub use cantor::{BasicInterval, CantorParams, CantorPoint, Digit, Tail, Word};
pub use certificate::{verify_certificate, Certificate, Verdict};
pub use decompose::decompose_four;
pub use error::{Error, Result};
pub use image::{gap_check, ImageEngine, ImageMap, ImageRequest, ImageResult};
pub use interval::{box_sum_of_squares_image, Interval};
pub use lemma::{BaseFamily, ChildIndex, TripleBox};
pub use scalar::Scalar;
pub use union::IntervalUnion;

/// Arbitrary-precision rational, the exact scalar.
pub type Rational = num_rational::BigRational;

pub type QInterval = Interval<Rational>;
pub type QUnion = IntervalUnion<Rational>;
pub type QParams = CantorParams<Rational>;
pub type QBasicInterval = BasicInterval<Rational>;

pub type F64Interval = Interval<f64>;
pub type F64Union = IntervalUnion<f64>;
pub type F64Params = CantorParams<f64>;
