//! Seven-box positivity certificate for the three-box correlator.
//!
//! With `E_1 = 0` and `E_2 = sqrt2 - 1` fixed and `E_3..E_7` formal, every
//! seven-box line q-value is a [`CorrPolynomial`]. A fixed positive
//! combination of 24 products of such probabilities collapses, exactly, to
//! `12*sqrt2 - 17 + E_3^2`; since probabilities and weights are
//! non-negative this forces `E_3^2 >= 17 - 12*sqrt2 = (3 - 2*sqrt2)^2`.
//!
//! The 17 outcome strings, the index vectors `u`, `v` and the 24 exact
//! weights are checked-in data; [`certificate_verify`] doubles as the
//! transcription test, since a single wrong digit leaves a nonzero
//! residual.

use num_traits::Zero;

use crate::dist::{line_q, LineWeights, Outcome};
use crate::poly::{CorrPolynomial, Monomial, NUM_SYMBOLS};
use crate::quad::QuadExt;
use crate::{Error, Result};

/// The nine `P` outcome strings.
pub const P_OUTCOMES: [&str; 9] = [
    "-------", "---+---", "--+-+--", "+-+-+-+", "++-+-++", "+++-+++", "+++++++", "-++-+-+",
    "-+-+--+",
];

/// The eight `Q` outcome strings.
pub const Q_OUTCOMES: [&str; 8] = [
    "----+-+", "----+++", "---+-++", "---++++", "--+-+++", "--++-+-", "-+-++++", "+-+--++",
];

/// 1-based indices into [`P_OUTCOMES`] for the 24 products.
pub const PAIR_U: [usize; 24] = [
    8, 9, 6, 1, 9, 4, 5, 3, 7, 1, 6, 2, 7, 1, 7, 5, 3, 7, 1, 6, 2, 6, 7, 1,
];

/// 1-based indices into [`Q_OUTCOMES`] for the 24 products.
pub const PAIR_V: [usize; 24] = [
    4, 2, 7, 6, 4, 2, 2, 4, 1, 7, 6, 8, 6, 3, 5, 4, 2, 7, 1, 1, 3, 5, 3, 5,
];

/// The 24 weights as `(a, b, den)` for `(a + b*sqrt2)/den`.
const WEIGHTS: [(i64, i64, i64); 24] = [
    (11146, 16545, 1160712),
    (2581, 4686, 773808),
    (3, 34, 18424),
    (109, 2003, 515872),
    (10253, 16404, 1160712),
    (9529, 14340, 1547616),
    (29063, 10799, 3095232),
    (50719, -4773, 9285696),
    (1517, 304, 147392),
    (1251, 360, 147392),    // 9 (139 + 40 sqrt2)
    (-114, 1011, 257936),   // 3 (-38 + 337 sqrt2)
    (6, 19, 5488),
    (227, 1805, 515872),
    (16154, 2677, 3095232),
    (8560, 14873, 3095232), // 107 (80 + 139 sqrt2)
    (127277, -41427, 9285696),
    (41879, 4049, 3095232),
    (1387, 366, 147392),
    (1381, 298, 147392),
    (3, 34, 18424),
    (44, 25, 5488),
    (1908, 897, 257936),    // 3 (636 + 299 sqrt2)
    (2066, -383, 442176),
    (8536, 9995, 3095232),
];

/// A weighted selection of `P_u * Q_v` products.
#[derive(Clone, Debug)]
pub struct Certificate {
    pub u: Vec<usize>,
    pub v: Vec<usize>,
    pub c: Vec<QuadExt>,
}

impl Certificate {
    /// The published 24-term certificate.
    pub fn paper() -> Self {
        Certificate {
            u: PAIR_U.to_vec(),
            v: PAIR_V.to_vec(),
            c: WEIGHTS.iter().map(|&(a, b, d)| QuadExt::from_fraction(a, b, d)).collect(),
        }
    }

    /// Index vectors of equal length, in range, with strictly positive
    /// weights.
    pub fn validate(&self) -> Result<()> {
        if self.u.len() != self.v.len() || self.u.len() != self.c.len() {
            return Err(Error::Certificate(format!(
                "length mismatch: u {}, v {}, c {}",
                self.u.len(),
                self.v.len(),
                self.c.len()
            )));
        }
        if let Some(i) = self.u.iter().position(|&i| i == 0 || i > P_OUTCOMES.len()) {
            return Err(Error::Certificate(format!("u[{i}] out of range")));
        }
        if let Some(i) = self.v.iter().position(|&i| i == 0 || i > Q_OUTCOMES.len()) {
            return Err(Error::Certificate(format!("v[{i}] out of range")));
        }
        if let Some(i) = self.c.iter().position(|c| c.sign() != 1) {
            return Err(Error::Certificate(format!("c[{}] = {} is not positive", i, self.c[i])));
        }
        Ok(())
    }
}

/// Correlator source with `E_2` folded to `sqrt2 - 1` and `E_3..E_7`
/// formal.
pub struct SymbolicWeights;

impl LineWeights<CorrPolynomial> for SymbolicWeights {
    fn line_weight(&self, len: usize) -> CorrPolynomial {
        match len {
            1 => CorrPolynomial::zero(),
            2 => CorrPolynomial::constant(QuadExt::from_ints(-1, 1)),
            3..=7 => CorrPolynomial::variable(len - 3),
            other => panic!("symbolic correlators stop at seven boxes, got {other}"),
        }
    }

    fn max_line_len(&self) -> usize {
        7
    }
}

/// Symbolic `q(x)` of a line outcome with up to seven boxes.
pub fn symbolic_q(outcome: &Outcome) -> CorrPolynomial {
    assert!(outcome.n() <= 7, "symbolic engine covers lines up to seven boxes");
    line_q(outcome.mask(), outcome.n(), &SymbolicWeights)
}

/// The 17 named seven-box outcomes, as (`P_1..P_9`, `Q_1..Q_8`).
pub fn appendix_outcomes() -> (Vec<Outcome>, Vec<Outcome>) {
    let parse = |s: &&str| s.parse::<Outcome>().expect("checked-in outcome string");
    (P_OUTCOMES.iter().map(parse).collect(), Q_OUTCOMES.iter().map(parse).collect())
}

const E3: usize = 0;

/// Target of the identity: `12*sqrt2 - 17 + E3^2`. Probabilities enter as
/// `q/2^7`, so the `2^14`-scaled combination of probability products is
/// exactly the q-product combination computed here.
pub fn certificate_target() -> CorrPolynomial {
    CorrPolynomial::constant(QuadExt::from_ints(-17, 12))
        + CorrPolynomial::variable(E3) * CorrPolynomial::variable(E3)
}

#[derive(Clone, Debug)]
pub struct CertificateReport {
    /// `sum_i c_i q(P_{u_i}) q(Q_{v_i})`, expanded.
    pub weighted_sum: CorrPolynomial,
    /// Weighted sum minus the target; zero for a valid certificate.
    pub residual: CorrPolynomial,
    /// Monomials of the weighted sum involving any of `E_4..E_7`; must be
    /// empty (no correlator of more than three boxes survives).
    pub high_arity: Vec<Monomial>,
    /// Per-term expanded polynomials, in certificate order.
    pub terms: Vec<CorrPolynomial>,
}

impl CertificateReport {
    pub fn is_valid(&self) -> bool {
        self.residual.is_zero() && self.high_arity.is_empty()
    }
}

/// Expands the certificate combination exactly and reports the residual
/// against `12*sqrt2 - 17 + E3^2`.
pub fn certificate_verify(cert: &Certificate) -> Result<CertificateReport> {
    cert.validate()?;
    let (p, q) = appendix_outcomes();
    let p_polys: Vec<CorrPolynomial> = p.iter().map(symbolic_q).collect();
    let q_polys: Vec<CorrPolynomial> = q.iter().map(symbolic_q).collect();

    let mut weighted_sum = CorrPolynomial::zero();
    let mut terms = Vec::with_capacity(cert.c.len());
    for i in 0..cert.c.len() {
        let term =
            (p_polys[cert.u[i] - 1].clone() * q_polys[cert.v[i] - 1].clone()).scale(&cert.c[i]);
        weighted_sum = weighted_sum + term.clone();
        terms.push(term);
    }
    let residual = weighted_sum.clone() - certificate_target();
    let high_arity = weighted_sum
        .terms()
        .map(|(m, _)| *m)
        .filter(|m| (1..NUM_SYMBOLS).any(|i| m.involves(i)))
        .collect();
    Ok(CertificateReport { weighted_sum, residual, high_arity, terms })
}

/// What the zero residual implies about the three-box correlator.
#[derive(Clone, Debug)]
pub struct Lemma1Conclusion {
    /// `17 - 12*sqrt2`: the forced lower bound on `E_3^2`.
    pub bound: QuadExt,
    /// `17 - 12*sqrt2 = (3 - 2*sqrt2)^2`, exactly.
    pub bound_is_square: bool,
    /// `12*sqrt2 - 17 + E_3^2` at `E_3 = 3 - 2*sqrt2`; zero means the
    /// bound is tight there.
    pub at_tight_point: QuadExt,
    /// The same expression at `E_3 = 0` is negative, so `E_3 = 0` is
    /// impossible.
    pub zero_excluded: bool,
}

pub fn lemma1_conclusion() -> Lemma1Conclusion {
    let bound = QuadExt::from_ints(17, -12);
    let square = &QuadExt::from_ints(3, -2) * &QuadExt::from_ints(3, -2);
    let expr_at = |e3: QuadExt| {
        let mut point: [QuadExt; NUM_SYMBOLS] = Default::default();
        point[E3] = e3;
        certificate_target().eval(&point)
    };
    Lemma1Conclusion {
        bound_is_square: bound == square,
        at_tight_point: expr_at(QuadExt::from_ints(3, -2)),
        zero_excluded: expr_at(QuadExt::zero()).sign() < 0,
        bound,
    }
}

/// Canonical rendering of the checked-in data, frozen by a test so any
/// edit to the transcription is caught independently of the identity
/// check.
pub fn transcription_digest() -> String {
    let cert = Certificate::paper();
    let mut s = String::new();
    for o in P_OUTCOMES {
        s.push_str(o);
        s.push('|');
    }
    for o in Q_OUTCOMES {
        s.push_str(o);
        s.push('|');
    }
    for i in 0..24 {
        s.push_str(&format!("{},{},{};", PAIR_U[i], PAIR_V[i], cert.c[i]));
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::One;

    #[test]
    fn appendix_strings_spot_checks() {
        let (p, q) = appendix_outcomes();
        assert_eq!(p[3].to_string(), "+-+-+-+"); // P_4
        assert_eq!(q[5].to_string(), "--++-+-"); // Q_6
        assert_eq!(p[6].to_string(), "+++++++"); // P_7
        assert_eq!(p.len(), 9);
        assert_eq!(q.len(), 8);
    }

    #[test]
    fn symbolic_three_box_example() {
        // q(+-+) = (3 - 2*sqrt2) - E3
        let p = symbolic_q(&"+-+".parse().unwrap());
        assert_eq!(p.constant_term(), QuadExt::from_ints(3, -2));
        assert_eq!(p.coefficient(&Monomial::var(E3)), QuadExt::from_ints(-1, 0));
        assert_eq!(p.num_terms(), 2);
    }

    fn table_point() -> [QuadExt; NUM_SYMBOLS] {
        let table = crate::CorrelatorTable::standard(7);
        [
            table.line(3).clone(),
            table.line(4).clone(),
            table.line(5).clone(),
            table.line(6).clone(),
            table.line(7).clone(),
        ]
    }

    #[test]
    fn symbolic_all_plus_evaluates_to_eight() {
        let p = symbolic_q(&Outcome::all_plus(7));
        assert_eq!(p.eval(&table_point()), QuadExt::from_ints(8, 0));
    }

    #[test]
    fn disjoint_runs_make_squares() {
        // (-,+,-,+,-,-,+) carries two disjoint length-3 runs, so an E3^2
        // monomial must appear, and the evaluation matches the numeric
        // engine
        let outcome: Outcome = "-+-+--+".parse().unwrap();
        let p = symbolic_q(&outcome);
        let e3sq = Monomial::from_exponents([2, 0, 0, 0, 0]);
        assert!(!p.coefficient(&e3sq).is_zero());
        let table = crate::CorrelatorTable::standard(7);
        let direct = crate::dist::line_q(outcome.mask(), 7, &table);
        assert_eq!(p.eval(&table_point()), direct);
    }

    #[test]
    fn paper_weights_are_positive() {
        let cert = Certificate::paper();
        cert.validate().unwrap();
        assert_eq!(cert.c.len(), 24);
    }

    #[test]
    fn empty_certificate_residual_is_minus_target() {
        let report = certificate_verify(&Certificate { u: vec![], v: vec![], c: vec![] }).unwrap();
        assert_eq!(report.residual, -certificate_target());
        assert!(report.weighted_sum.is_zero());
    }

    #[test]
    fn single_term_certificate_reconstructs_its_residual() {
        let cert = Certificate { u: vec![1], v: vec![1], c: vec![QuadExt::one()] };
        let report = certificate_verify(&cert).unwrap();
        // subtracting the lone term back out leaves exactly -target
        let without_term = report.residual - report.terms[0].clone();
        assert_eq!(without_term, -certificate_target());
    }

    #[test]
    fn lemma1_numbers() {
        let c = lemma1_conclusion();
        assert!(c.bound_is_square);
        assert_eq!(c.bound, QuadExt::from_ints(17, -12));
        assert!(c.at_tight_point.is_zero());
        assert!(c.zero_excluded);
    }
}
