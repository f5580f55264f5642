//! Sparse polynomials in formal correlator symbols over `Q[sqrt(2)]`.
//!
//! Five indeterminates cover every use here: the seven-box certificate
//! labels them `E3..E7`, the hexagon program `E3, E4, E5, E6o`. Monomials
//! are ordered graded-lexicographically so term listings and residual
//! reports are deterministic.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::{One, Zero};

use crate::quad::QuadExt;

pub const NUM_SYMBOLS: usize = 5;

/// Default symbol names; contexts with other variables pass their own
/// names to [`CorrPolynomial::render`].
pub const DEFAULT_NAMES: [&str; NUM_SYMBOLS] = ["E3", "E4", "E5", "E6", "E7"];

/// Exponent vector over the five symbols.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub struct Monomial {
    exp: [u8; NUM_SYMBOLS],
}

impl Monomial {
    pub fn one() -> Self {
        Monomial { exp: [0; NUM_SYMBOLS] }
    }

    pub fn var(i: usize) -> Self {
        let mut exp = [0; NUM_SYMBOLS];
        exp[i] = 1;
        Monomial { exp }
    }

    pub fn from_exponents(exp: [u8; NUM_SYMBOLS]) -> Self {
        Monomial { exp }
    }

    pub fn exponent(&self, i: usize) -> u8 {
        self.exp[i]
    }

    pub fn degree(&self) -> u32 {
        self.exp.iter().map(|&e| u32::from(e)).sum()
    }

    pub fn is_one(&self) -> bool {
        self.exp.iter().all(|&e| e == 0)
    }

    pub fn involves(&self, i: usize) -> bool {
        self.exp[i] > 0
    }

    pub fn product(&self, other: &Self) -> Self {
        let mut exp = [0; NUM_SYMBOLS];
        for i in 0..NUM_SYMBOLS {
            exp[i] = self.exp[i] + other.exp[i];
        }
        Monomial { exp }
    }

    pub fn render(&self, names: &[&str; NUM_SYMBOLS]) -> String {
        if self.is_one() {
            return "1".into();
        }
        let mut s = String::new();
        for i in 0..NUM_SYMBOLS {
            match self.exp[i] {
                0 => {}
                1 => {
                    if !s.is_empty() {
                        s.push('*');
                    }
                    s.push_str(names[i]);
                }
                e => {
                    if !s.is_empty() {
                        s.push('*');
                    }
                    s.push_str(&format!("{}^{}", names[i], e));
                }
            }
        }
        s
    }
}

/// Graded lexicographic: total degree first, then exponents by symbol
/// index.
impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.degree().cmp(&other.degree()).then_with(|| self.exp.cmp(&other.exp))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

/// Polynomial with `QuadExt` coefficients; zero coefficients are never
/// stored.
#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct CorrPolynomial {
    terms: BTreeMap<Monomial, QuadExt>,
}

impl CorrPolynomial {
    pub fn constant(c: QuadExt) -> Self {
        let mut p = CorrPolynomial::default();
        if !c.is_zero() {
            p.terms.insert(Monomial::one(), c);
        }
        p
    }

    pub fn variable(i: usize) -> Self {
        let mut p = CorrPolynomial::default();
        p.terms.insert(Monomial::var(i), QuadExt::one());
        p
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &QuadExt)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn coefficient(&self, m: &Monomial) -> QuadExt {
        self.terms.get(m).cloned().unwrap_or_else(QuadExt::zero)
    }

    pub fn constant_term(&self) -> QuadExt {
        self.coefficient(&Monomial::one())
    }

    pub fn degree(&self) -> u32 {
        self.terms.keys().map(Monomial::degree).max().unwrap_or(0)
    }

    /// Whether any monomial involves symbol `i`.
    pub fn involves(&self, i: usize) -> bool {
        self.terms.keys().any(|m| m.involves(i))
    }

    pub fn scale(&self, c: &QuadExt) -> Self {
        if c.is_zero() {
            return CorrPolynomial::default();
        }
        let terms = self.terms.iter().map(|(m, v)| (*m, v * c)).collect();
        CorrPolynomial { terms }
    }

    /// Exact evaluation at a point.
    pub fn eval(&self, point: &[QuadExt; NUM_SYMBOLS]) -> QuadExt {
        let mut total = QuadExt::zero();
        for (m, c) in &self.terms {
            let mut v = c.clone();
            for i in 0..NUM_SYMBOLS {
                for _ in 0..m.exponent(i) {
                    v = v * &point[i];
                }
            }
            total = total + v;
        }
        total
    }

    fn add_term(&mut self, m: Monomial, c: QuadExt) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                let v = e.get() + &c;
                if v.is_zero() {
                    e.remove();
                } else {
                    *e.get_mut() = v;
                }
            }
        }
    }

    pub fn render(&self, names: &[&str; NUM_SYMBOLS]) -> String {
        if self.terms.is_empty() {
            return "0".into();
        }
        let mut s = String::new();
        for (m, c) in &self.terms {
            if !s.is_empty() {
                s.push_str(" + ");
            }
            if m.is_one() {
                s.push_str(&format!("({c})"));
            } else {
                s.push_str(&format!("({c})*{}", m.render(names)));
            }
        }
        s
    }
}

impl fmt::Display for CorrPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render(&DEFAULT_NAMES))
    }
}

impl Zero for CorrPolynomial {
    fn zero() -> Self {
        CorrPolynomial::default()
    }

    fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }
}

impl One for CorrPolynomial {
    fn one() -> Self {
        CorrPolynomial::constant(QuadExt::one())
    }
}

impl Add for CorrPolynomial {
    type Output = CorrPolynomial;

    fn add(mut self, rhs: CorrPolynomial) -> CorrPolynomial {
        for (m, c) in rhs.terms {
            self.add_term(m, c);
        }
        self
    }
}

impl Sub for CorrPolynomial {
    type Output = CorrPolynomial;

    fn sub(mut self, rhs: CorrPolynomial) -> CorrPolynomial {
        for (m, c) in rhs.terms {
            self.add_term(m, -c);
        }
        self
    }
}

impl Neg for CorrPolynomial {
    type Output = CorrPolynomial;

    fn neg(self) -> CorrPolynomial {
        let terms = self.terms.into_iter().map(|(m, c)| (m, -c)).collect();
        CorrPolynomial { terms }
    }
}

impl Mul for CorrPolynomial {
    type Output = CorrPolynomial;

    fn mul(self, rhs: CorrPolynomial) -> CorrPolynomial {
        let mut out = CorrPolynomial::default();
        for (m1, c1) in &self.terms {
            for (m2, c2) in &rhs.terms {
                out.add_term(m1.product(m2), c1 * c2);
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(a: i64, b: i64) -> QuadExt {
        QuadExt::from_ints(a, b)
    }

    #[test]
    fn ring_identities() {
        let x = CorrPolynomial::variable(0);
        let c = CorrPolynomial::constant(q(3, -2));
        let p = x.clone() + c.clone();
        assert_eq!(p.clone() * CorrPolynomial::one(), p);
        assert_eq!(p.clone() - p.clone(), CorrPolynomial::zero());
        // (x + c)^2 = x^2 + 2cx + c^2
        let sq = p.clone() * p.clone();
        let mut expect = CorrPolynomial::default();
        expect.add_term(Monomial::from_exponents([2, 0, 0, 0, 0]), QuadExt::one());
        expect.add_term(Monomial::var(0), q(6, -4));
        expect.add_term(Monomial::one(), &q(3, -2) * &q(3, -2));
        assert_eq!(sq, expect);
    }

    #[test]
    fn evaluation() {
        let p = CorrPolynomial::variable(0) * CorrPolynomial::variable(1)
            + CorrPolynomial::constant(q(1, 0));
        let mut point = [
            q(2, 0),
            q(0, 1),
            QuadExt::zero(),
            QuadExt::zero(),
            QuadExt::zero(),
        ];
        assert_eq!(p.eval(&point), q(1, 2)); // 2*sqrt2 + 1
        point[0] = QuadExt::zero();
        assert_eq!(p.eval(&point), q(1, 0));
    }

    #[test]
    fn deterministic_rendering() {
        let p = CorrPolynomial::variable(4)
            + CorrPolynomial::variable(0) * CorrPolynomial::variable(0)
            + CorrPolynomial::constant(q(-17, 12));
        assert_eq!(p.to_string(), "(-17+12*sqrt2) + (1)*E7 + (1)*E3^2");
    }

    #[test]
    fn grading_orders_by_total_degree_first() {
        let e3sq = Monomial::from_exponents([2, 0, 0, 0, 0]);
        let e7 = Monomial::var(4);
        assert!(e7 < e3sq);
        assert!(Monomial::one() < e7);
        // within a degree, earlier symbols with higher exponents sort later
        let e3e4 = Monomial::from_exponents([1, 1, 0, 0, 0]);
        assert!(e3e4 < e3sq);
    }
}
