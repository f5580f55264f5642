//! Exact arithmetic in `Q[sqrt(2)]`.
//!
//! [`QuadExt`] stores `a + b*sqrt(2)` with reduced rational components, so
//! equality is componentwise and the sign of any value is decided exactly
//! by integer comparisons, never through floating point.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::de::{self, MapAccess, Visitor};
use serde::ser::SerializeStruct;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::{Error, Rational, Result};

/// An element `a + b*sqrt(2)` of `Q[sqrt(2)]`.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct QuadExt {
    a: Rational,
    b: Rational,
}

impl QuadExt {
    pub fn new(a: Rational, b: Rational) -> Self {
        QuadExt { a, b }
    }

    /// `a + b*sqrt(2)` with integer components.
    pub fn from_ints(a: i64, b: i64) -> Self {
        QuadExt::new(Rational::from_integer(a.into()), Rational::from_integer(b.into()))
    }

    pub fn from_rational(a: Rational) -> Self {
        QuadExt::new(a, Rational::zero())
    }

    /// `(na + nb*sqrt(2)) / den`.
    pub fn from_fraction(na: i64, nb: i64, den: i64) -> Self {
        let d = BigInt::from(den);
        QuadExt::new(
            Rational::new(na.into(), d.clone()),
            Rational::new(nb.into(), d),
        )
    }

    pub fn sqrt2() -> Self {
        QuadExt::from_ints(0, 1)
    }

    /// Exact `sqrt(2)^k`.
    pub fn sqrt2_pow(k: u32) -> Self {
        let half = BigInt::one() << (k / 2);
        if k % 2 == 0 {
            QuadExt::new(Rational::from_integer(half), Rational::zero())
        } else {
            QuadExt::new(Rational::zero(), Rational::from_integer(half))
        }
    }

    /// Rational part `a`.
    pub fn rational_part(&self) -> &Rational {
        &self.a
    }

    /// Coefficient `b` of `sqrt(2)`.
    pub fn sqrt2_part(&self) -> &Rational {
        &self.b
    }

    pub fn is_rational(&self) -> bool {
        self.b.is_zero()
    }

    /// Field conjugate `a - b*sqrt(2)`.
    pub fn conjugate(&self) -> Self {
        QuadExt::new(self.a.clone(), -self.b.clone())
    }

    /// Field norm `a^2 - 2 b^2`; zero only for the zero element.
    pub fn norm(&self) -> Rational {
        &self.a * &self.a - Rational::from_integer(2.into()) * &self.b * &self.b
    }

    /// Multiplicative inverse via the conjugate; `None` for zero.
    pub fn inverse(&self) -> Option<Self> {
        if self.is_zero() {
            return None;
        }
        let n = self.norm();
        Some(QuadExt::new(&self.a / &n, -&self.b / &n))
    }

    /// Exact sign in `{-1, 0, +1}`, decided without floating point.
    ///
    /// When the components disagree in sign, `a + b*sqrt(2)` is compared
    /// with zero through the sign of the norm `a^2 - 2 b^2` combined with
    /// the sign of the conjugate.
    pub fn sign(&self) -> i32 {
        let sa = rational_sign(&self.a);
        let sb = rational_sign(&self.b);
        if sa == 0 && sb == 0 {
            return 0;
        }
        if sa >= 0 && sb >= 0 {
            return 1;
        }
        if sa <= 0 && sb <= 0 {
            return -1;
        }
        // opposite component signs: conjugate a - b*sqrt(2) has a definite
        // sign (that of a), and norm = value * conjugate
        let sn = rational_sign(&self.norm());
        if sa > 0 {
            sn
        } else {
            -sn
        }
    }

    pub fn is_positive(&self) -> bool {
        self.sign() > 0
    }

    pub fn is_negative(&self) -> bool {
        self.sign() < 0
    }

    /// Nearest `f64`.
    ///
    /// For components of opposite signs the direct sum cancels, so the
    /// value is evaluated as `norm / conjugate` instead; both factors are
    /// then cancellation-free and the result stays within a few ulp.
    pub fn to_f64(&self) -> Result<f64> {
        let fa = rational_to_f64(&self.a)?;
        let fb = rational_to_f64(&self.b)?;
        let v = if rational_sign(&self.a) * rational_sign(&self.b) < 0 {
            let conj = fa - fb * std::f64::consts::SQRT_2;
            rational_to_f64(&self.norm())? / conj
        } else {
            fa + fb * std::f64::consts::SQRT_2
        };
        if v.is_finite() {
            Ok(v)
        } else {
            Err(Error::FloatRange)
        }
    }

    /// Scale by a rational factor.
    pub fn scale(&self, r: &Rational) -> Self {
        QuadExt::new(&self.a * r, &self.b * r)
    }

    /// Multiply by an integer.
    pub fn scale_int(&self, k: i64) -> Self {
        self.scale(&Rational::from_integer(k.into()))
    }
}

fn rational_sign(r: &Rational) -> i32 {
    if r.is_zero() {
        0
    } else if r.is_positive() {
        1
    } else {
        -1
    }
}

fn rational_to_f64(r: &Rational) -> Result<f64> {
    match r.to_f64() {
        Some(v) if v.is_finite() => Ok(v),
        _ => Err(Error::FloatRange),
    }
}

impl Zero for QuadExt {
    fn zero() -> Self {
        QuadExt::default()
    }

    fn is_zero(&self) -> bool {
        self.a.is_zero() && self.b.is_zero()
    }
}

impl One for QuadExt {
    fn one() -> Self {
        QuadExt::from_ints(1, 0)
    }
}

impl Neg for QuadExt {
    type Output = QuadExt;

    fn neg(self) -> QuadExt {
        QuadExt::new(-self.a, -self.b)
    }
}

impl Neg for &QuadExt {
    type Output = QuadExt;

    fn neg(self) -> QuadExt {
        QuadExt::new(-&self.a, -&self.b)
    }
}

impl<'b> Add<&'b QuadExt> for &QuadExt {
    type Output = QuadExt;

    fn add(self, rhs: &'b QuadExt) -> QuadExt {
        QuadExt::new(&self.a + &rhs.a, &self.b + &rhs.b)
    }
}

impl<'b> Sub<&'b QuadExt> for &QuadExt {
    type Output = QuadExt;

    fn sub(self, rhs: &'b QuadExt) -> QuadExt {
        QuadExt::new(&self.a - &rhs.a, &self.b - &rhs.b)
    }
}

impl<'b> Mul<&'b QuadExt> for &QuadExt {
    type Output = QuadExt;

    fn mul(self, rhs: &'b QuadExt) -> QuadExt {
        // (a1 + b1 r)(a2 + b2 r) = (a1 a2 + 2 b1 b2) + (a1 b2 + a2 b1) r
        let two = Rational::from_integer(2.into());
        QuadExt::new(
            &self.a * &rhs.a + two * &self.b * &rhs.b,
            &self.a * &rhs.b + &self.b * &rhs.a,
        )
    }
}

impl<'b> Div<&'b QuadExt> for &QuadExt {
    type Output = QuadExt;

    fn div(self, rhs: &'b QuadExt) -> QuadExt {
        let inv = rhs.inverse().expect("division by zero in Q[sqrt(2)]");
        self * &inv
    }
}

macro_rules! forward_binop {
    ($trait:ident, $method:ident) => {
        impl $trait<QuadExt> for QuadExt {
            type Output = QuadExt;
            fn $method(self, rhs: QuadExt) -> QuadExt {
                (&self).$method(&rhs)
            }
        }
        impl<'a> $trait<&'a QuadExt> for QuadExt {
            type Output = QuadExt;
            fn $method(self, rhs: &'a QuadExt) -> QuadExt {
                (&self).$method(rhs)
            }
        }
        impl $trait<QuadExt> for &QuadExt {
            type Output = QuadExt;
            fn $method(self, rhs: QuadExt) -> QuadExt {
                self.$method(&rhs)
            }
        }
    };
}

forward_binop!(Add, add);
forward_binop!(Sub, sub);
forward_binop!(Mul, mul);
forward_binop!(Div, div);

impl PartialOrd for QuadExt {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for QuadExt {
    fn cmp(&self, other: &Self) -> Ordering {
        (self - other).sign().cmp(&0)
    }
}

impl fmt::Debug for QuadExt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "QuadExt({self})")
    }
}

/// Canonical text form: `a+b*sqrt2` with unit coefficients and zero parts
/// omitted, e.g. `3-2*sqrt2`, `-1+sqrt2`, `1/2`, `0`.
impl fmt::Display for QuadExt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        if !self.a.is_zero() {
            write!(f, "{}", self.a)?;
        }
        if !self.b.is_zero() {
            if self.b.is_positive() && !self.a.is_zero() {
                write!(f, "+")?;
            }
            let abs_b = self.b.abs();
            if self.b.is_negative() {
                write!(f, "-")?;
            }
            if abs_b.is_one() {
                write!(f, "sqrt2")?;
            } else {
                write!(f, "{abs_b}*sqrt2")?;
            }
        }
        Ok(())
    }
}

impl FromStr for QuadExt {
    type Err = Error;

    /// Parses sums of terms `p/q`, `p/q*sqrt2` and `sqrt2`, each with an
    /// optional sign, e.g. `3-2*sqrt2`, `-1/2+3/4*sqrt2`, `sqrt2`.
    fn from_str(s: &str) -> Result<Self> {
        let text: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        if text.is_empty() {
            return Err(Error::Parse("empty input".into()));
        }
        let bytes = text.as_bytes();
        let mut pos = 0usize;
        let mut value = QuadExt::zero();

        let parse_rational = |pos: &mut usize| -> Result<Rational> {
            let start = *pos;
            while *pos < bytes.len() && bytes[*pos].is_ascii_digit() {
                *pos += 1;
            }
            if *pos == start {
                return Err(Error::Parse(format!("expected digits at offset {start} in {text:?}")));
            }
            let numerator = BigInt::from_str(&text[start..*pos])
                .map_err(|e| Error::Parse(e.to_string()))?;
            if *pos < bytes.len() && bytes[*pos] == b'/' {
                *pos += 1;
                let dstart = *pos;
                while *pos < bytes.len() && bytes[*pos].is_ascii_digit() {
                    *pos += 1;
                }
                if *pos == dstart {
                    return Err(Error::Parse(format!(
                        "expected denominator at offset {dstart} in {text:?}"
                    )));
                }
                let denominator = BigInt::from_str(&text[dstart..*pos])
                    .map_err(|e| Error::Parse(e.to_string()))?;
                if denominator.is_zero() {
                    return Err(Error::Parse("zero denominator".into()));
                }
                Ok(Rational::new(numerator, denominator))
            } else {
                Ok(Rational::from_integer(numerator))
            }
        };

        let mut first = true;
        while pos < bytes.len() {
            let mut negative = false;
            match bytes[pos] {
                b'+' => pos += 1,
                b'-' => {
                    negative = true;
                    pos += 1;
                }
                _ if first => {}
                other => {
                    return Err(Error::Parse(format!(
                        "expected '+' or '-' before term, found {:?} in {text:?}",
                        other as char
                    )));
                }
            }
            first = false;

            let term = if text[pos..].starts_with("sqrt2") {
                pos += 5;
                QuadExt::sqrt2()
            } else {
                let r = parse_rational(&mut pos)?;
                if text[pos..].starts_with("*sqrt2") {
                    pos += 6;
                    QuadExt::new(Rational::zero(), r)
                } else {
                    QuadExt::from_rational(r)
                }
            };
            value = if negative { value - term } else { value + term };
        }
        Ok(value)
    }
}

/// JSON form `{"a": "p/q", "b": "r/s"}` with rational components rendered
/// as strings (denominator 1 omitted).
impl Serialize for QuadExt {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut st = serializer.serialize_struct("QuadExt", 2)?;
        st.serialize_field("a", &self.a.to_string())?;
        st.serialize_field("b", &self.b.to_string())?;
        st.end()
    }
}

impl<'de> Deserialize<'de> for QuadExt {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        struct QuadVisitor;

        impl<'de> Visitor<'de> for QuadVisitor {
            type Value = QuadExt;

            fn expecting(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str("a map {\"a\": rational, \"b\": rational}")
            }

            fn visit_map<A: MapAccess<'de>>(
                self,
                mut map: A,
            ) -> std::result::Result<QuadExt, A::Error> {
                let mut a: Option<String> = None;
                let mut b: Option<String> = None;
                while let Some(key) = map.next_key::<String>()? {
                    match key.as_str() {
                        "a" => a = Some(map.next_value()?),
                        "b" => b = Some(map.next_value()?),
                        other => return Err(de::Error::unknown_field(other, &["a", "b"])),
                    }
                }
                let a = a.ok_or_else(|| de::Error::missing_field("a"))?;
                let b = b.ok_or_else(|| de::Error::missing_field("b"))?;
                let parse = |s: &str| {
                    Rational::from_str(s).map_err(|e| de::Error::custom(format!("{e}")))
                };
                Ok(QuadExt::new(parse(&a)?, parse(&b)?))
            }
        }

        deserializer.deserialize_struct("QuadExt", &["a", "b"], QuadVisitor)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(a: i64, b: i64) -> QuadExt {
        QuadExt::from_ints(a, b)
    }

    #[test]
    fn multiplication_rule() {
        // (sqrt2 - 1)^2 = 3 - 2*sqrt2
        assert_eq!(&q(-1, 1) * &q(-1, 1), q(3, -2));
        // (2 - sqrt2)(3 - 2*sqrt2) = 10 - 7*sqrt2
        let prod = &q(2, -1) * &q(3, -2);
        assert_eq!(prod, q(10, -7));
        let float = prod.to_f64().unwrap();
        assert!((float - (2.0 - 2f64.sqrt()) * (3.0 - 2.0 * 2f64.sqrt())).abs() < 1e-12);
    }

    #[test]
    fn additive_identity() {
        let x = q(7, -5);
        assert_eq!(&x + &QuadExt::zero(), x);
    }

    #[test]
    fn exact_sign() {
        assert_eq!(q(3, -2).sign(), 1); // 9 > 8
        assert_eq!(q(-62, 44).sign(), 1); // 2*44^2 = 3872 > 62^2 = 3844
        assert_eq!(QuadExt::zero().sign(), 0);
        assert_eq!(q(-3, 2).sign(), -1);
        assert_eq!(q(62, -44).sign(), -1);
        assert_eq!(q(0, -1).sign(), -1);
    }

    #[test]
    fn sqrt2_powers() {
        assert_eq!(QuadExt::sqrt2_pow(0), q(1, 0));
        assert_eq!(QuadExt::sqrt2_pow(2), q(2, 0));
        assert_eq!(QuadExt::sqrt2_pow(5), q(0, 4));
    }

    #[test]
    fn float_conversion() {
        assert!((q(-1, 1).to_f64().unwrap() - 0.41421356237309515).abs() < 1e-15);
        assert_eq!(QuadExt::zero().to_f64().unwrap(), 0.0);
        assert!((q(-4, 3).to_f64().unwrap() - 0.24264068711928521).abs() < 1e-15);
    }

    #[test]
    fn inverse_by_conjugate() {
        let x = q(3, -2);
        let inv = x.inverse().unwrap();
        assert_eq!(&x * &inv, QuadExt::one());
        assert!(QuadExt::zero().inverse().is_none());
        assert_eq!(&q(1, 0) / &q(0, 1), QuadExt::new(Rational::zero(), Rational::new(1.into(), 2.into())));
    }

    #[test]
    fn parse_and_format() {
        let x: QuadExt = "3-2*sqrt2".parse().unwrap();
        assert_eq!(x, q(3, -2));
        assert_eq!("0".parse::<QuadExt>().unwrap(), QuadExt::zero());
        assert_eq!(q(-147, 104).to_string(), "-147+104*sqrt2");
        assert_eq!(q(-1, 1).to_string(), "-1+sqrt2");
        assert_eq!(q(0, -1).to_string(), "-sqrt2");
        assert_eq!("sqrt2".parse::<QuadExt>().unwrap(), q(0, 1));
        assert_eq!("-1/2+3/4*sqrt2".parse::<QuadExt>().unwrap().to_string(), "-1/2+3/4*sqrt2");
        assert!("3 - 2*sqrt2".parse::<QuadExt>().unwrap() == q(3, -2));
        assert!("".parse::<QuadExt>().is_err());
        assert!("2sqrt2".parse::<QuadExt>().is_err());
        assert!("1/0".parse::<QuadExt>().is_err());
    }

    #[test]
    fn json_shape() {
        let x = QuadExt::new(
            Rational::new((-147).into(), 1.into()),
            Rational::new(104.into(), 3.into()),
        );
        let js = serde_json::to_string(&x).unwrap();
        assert_eq!(js, r#"{"a":"-147","b":"104/3"}"#);
        let back: QuadExt = serde_json::from_str(&js).unwrap();
        assert_eq!(back, x);
    }

    #[test]
    fn ordering_is_exact() {
        assert!(q(-1, 1) > QuadExt::zero());
        assert!(q(1, -1) < QuadExt::zero());
        assert!(q(0, 5) > q(7, 0)); // 5*sqrt2 > 7
    }

    #[test]
    fn float_conversion_range_error() {
        let huge = Rational::from_integer(BigInt::from(10).pow(400));
        let x = QuadExt::new(huge, Rational::zero());
        assert!(matches!(x.to_f64(), Err(Error::FloatRange)));
    }

    #[test]
    fn values_are_shareable_across_threads() {
        fn assert_send_sync<T: Send + Sync>() {}
        assert_send_sync::<QuadExt>();
    }
}
