//! Scalar traits the engines are generic over.
//!
//! The distribution and polynomial engines only need a commutative ring
//! ([`Coeff`]); the simplex needs an ordered field ([`LpScalar`]). Both are
//! satisfied by the exact types (`BigRational`, [`QuadExt`],
//! `CorrPolynomial`) and by `f64` for the float lanes.

use std::ops::{Div, Neg, Sub};

use num_traits::{One, ToPrimitive, Zero};

use crate::quad::QuadExt;
use crate::Rational;

/// Commutative ring scalar: enough structure for subset weights and
/// q-value recursions.
pub trait Coeff: Clone + PartialEq + Zero + One + Neg<Output = Self> + Sub<Output = Self> {}

impl<T> Coeff for T where T: Clone + PartialEq + Zero + One + Neg<Output = T> + Sub<Output = T> {}

/// Ordered field scalar for the simplex.
///
/// `tolerance` is the pivot threshold: zero for exact scalars, a small
/// positive value for floats.
pub trait LpScalar: Coeff + PartialOrd + Div<Output = Self> {
    fn tolerance() -> Self;

    /// Embed a rational constant (used when instantiating one program at
    /// several scalar types).
    fn from_rational(r: &Rational) -> Self;

    fn is_pos(&self) -> bool {
        *self > Self::tolerance()
    }

    fn is_neg(&self) -> bool {
        *self < -Self::tolerance()
    }
}

impl LpScalar for Rational {
    fn tolerance() -> Self {
        Self::zero()
    }

    fn from_rational(r: &Rational) -> Self {
        r.clone()
    }
}

impl LpScalar for QuadExt {
    fn tolerance() -> Self {
        Self::zero()
    }

    fn from_rational(r: &Rational) -> Self {
        QuadExt::from_rational(r.clone())
    }
}

impl LpScalar for f64 {
    fn tolerance() -> Self {
        1e-9
    }

    fn from_rational(r: &Rational) -> Self {
        r.to_f64().unwrap_or(f64::NAN)
    }
}
