//! Exact toolkit for the unique binary-network non-local box.
//!
//! Everything numeric lives in the subring of `Q[sqrt(2)]` with rational
//! components ([`QuadExt`]), so correlator identities, distribution
//! positivity and the Lemma-1 style certificate are all checked exactly
//! rather than in floating point. The floating-point side (closed-form
//! correlators, Monte-Carlo estimates, float LP mode) exists only as a
//! cross-check of the exact path.
//!
//! Module map:
//! * [`quad`] — the scalar type `a + b*sqrt(2)` with exact sign decisions;
//! * [`correlators`] — line correlators `E_n` and loop correlators `E_n^o`;
//! * [`dist`] — exact joint output distributions on lines and loops;
//! * [`verify`] — positivity / structural sweeps over those distributions;
//! * [`poly`] — sparse polynomials in formal correlator symbols;
//! * [`certificate`] — the seven-box certificate for `E_3^2 >= (3-2*sqrt2)^2`;
//! * [`lp`] — dense two-phase simplex, generic over the scalar field;
//! * [`optimize`] — hexagon bound `E_2 <= sqrt(2)-1` and certificate search;
//! * [`sampler`] — seeded Monte-Carlo sampling of the exact distributions;
//! * [`oracle`] — brute-force subset enumeration used as an independent
//!   reference for the dynamic-programming engines.

pub mod certificate;
pub mod correlators;
pub mod dist;
pub mod lp;
pub mod optimize;
pub mod oracle;
pub mod poly;
pub mod quad;
pub mod sampler;
pub mod scalar;
pub mod verify;

/// Arbitrary-precision rational, the component type of [`QuadExt`].
pub type Rational = num_rational::BigRational;
/// Arbitrary-precision integer.
pub type Int = num_bigint::BigInt;

pub use correlators::CorrelatorTable;
pub use dist::{ExactDistribution, Outcome, Topology};
pub use quad::QuadExt;
pub use scalar::{Coeff, LpScalar};

/// Outcome enumeration limit used when no explicit override is given.
pub const DEFAULT_ENUM_LIMIT: usize = 16;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("parse error: {0}")]
    Parse(String),
    #[error("value outside f64 range")]
    FloatRange,
    #[error("correlator table too small: need n <= {needed}, have {have}")]
    TableTooSmall { needed: usize, have: usize },
    #[error("enumeration limit exceeded: n = {n}, limit = {limit}")]
    EnumerationLimit { n: usize, limit: usize },
    #[error("invalid certificate: {0}")]
    Certificate(String),
    #[error("linear program error: {0}")]
    Lp(String),
}

pub type Result<T> = std::result::Result<T, Error>;
