//! Linear-programming reproductions: the hexagon bound on the two-box
//! correlator and the search for seven-box positivity certificates.
//!
//! The hexagon program has purely rational data (the two-box correlator
//! enters squared but as a fixed constant), so feasibility verdicts come
//! from the exact rational simplex and bisection brackets the supremum
//! with certainty. The certificate program lives in `Q[sqrt(2)]` and runs
//! on the same simplex instantiated at [`QuadExt`], whose exact sign
//! comparisons make "positive weights" a field-native notion.

use std::collections::BTreeSet;

use num_traits::{One, Zero};

use crate::certificate::{
    appendix_outcomes, certificate_verify, symbolic_q, Certificate, CertificateReport, PAIR_U,
    PAIR_V,
};
use crate::correlators::CorrelatorTable;
use crate::dist::{dense_loop, LineWeights, LoopWeights, Topology};
use crate::lp::{LinearProgram, LpResult, Relation};
use crate::poly::{CorrPolynomial, Monomial};
use crate::quad::QuadExt;
use crate::verify::verify_nonnegativity;
use crate::{Error, Rational, Result};

/// Hexagon correlator source: `E_2` fixed, `E_3, E_4, E_5` and the
/// full-cycle `E_6^o` formal (symbols 0..3).
struct HexagonWeights {
    e2: QuadExt,
}

impl LineWeights<CorrPolynomial> for HexagonWeights {
    fn line_weight(&self, len: usize) -> CorrPolynomial {
        match len {
            1 => CorrPolynomial::zero(),
            2 => CorrPolynomial::constant(self.e2.clone()),
            3..=5 => CorrPolynomial::variable(len - 3),
            other => panic!("hexagon arcs stop at five boxes, got {other}"),
        }
    }

    fn max_line_len(&self) -> usize {
        5
    }
}

impl LoopWeights<CorrPolynomial> for HexagonWeights {
    fn loop_weight(&self, n: usize) -> CorrPolynomial {
        assert_eq!(n, 6);
        CorrPolynomial::variable(3)
    }
}

/// Variable names of the hexagon program, in index order.
pub const HEXAGON_VARS: [&str; 4] = ["E3", "E4", "E5", "E6o"];

/// The 64 affine forms `q^o_6(x)` as `(constant, coefficients)` over
/// `[E3, E4, E5, E6o]`, with `E_2` fixed to `e2`. Fixing `E_2` leaves
/// every multi-arc product constant, so the forms really are affine.
pub fn hexagon_rows(e2: &Rational) -> Vec<(Rational, [Rational; 4])> {
    let weights = HexagonWeights { e2: QuadExt::from_rational(e2.clone()) };
    let as_rational = |v: &QuadExt| -> Rational {
        assert!(v.sqrt2_part().is_zero(), "hexagon coefficients must be rational, got {v}");
        v.rational_part().clone()
    };
    dense_loop(6, &weights)
        .into_iter()
        .map(|poly| {
            let mut coefs: [Rational; 4] = Default::default();
            let mut constant = Rational::zero();
            for (m, c) in poly.terms() {
                if m.is_one() {
                    constant = as_rational(c);
                } else {
                    let var = (0..4)
                        .find(|&i| *m == Monomial::var(i))
                        .unwrap_or_else(|| panic!("non-affine monomial in hexagon row: {m:?}"));
                    coefs[var] = as_rational(c);
                }
            }
            (constant, coefs)
        })
        .collect()
}

/// Feasibility program: all 64 `q^o_6(x) >= 0` with the free correlators
/// boxed in `[-1, 1]`.
pub fn hexagon_lp(e2: &Rational) -> LinearProgram<Rational> {
    let mut lp = LinearProgram::new();
    let vars: Vec<usize> = HEXAGON_VARS.iter().map(|name| lp.add_var(*name, false)).collect();
    let one = Rational::one();
    for &v in &vars {
        lp.constrain(vec![(v, one.clone())], Relation::Le, one.clone());
        lp.constrain(vec![(v, one.clone())], Relation::Ge, -one.clone());
    }
    for (constant, coefs) in hexagon_rows(e2) {
        let coeffs: Vec<(usize, Rational)> = coefs
            .into_iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(i, c)| (vars[i], c))
            .collect();
        lp.constrain(coeffs, Relation::Ge, -constant);
    }
    lp
}

/// Exact verdict: is some loop-6 distribution with this two-box
/// correlator non-negative?
pub fn hexagon_feasible(e2: &Rational) -> Result<bool> {
    Ok(hexagon_lp(e2).solve()?.is_feasible())
}

/// Float-simplex verdict on the same program.
pub fn hexagon_feasible_f64(e2: f64) -> Result<bool> {
    let e2 = Rational::from_float(e2).ok_or(Error::FloatRange)?;
    Ok(hexagon_lp(&e2).to_f64().solve()?.is_feasible())
}

/// A feasible point of the hexagon program at a given `e2`.
#[derive(Clone, Debug)]
pub struct HexagonWitness {
    pub e2: Rational,
    /// Values of `[E3, E4, E5, E6o]`.
    pub correlators: [Rational; 4],
}

impl HexagonWitness {
    /// Correlator table carrying the witness: line `E_1..E_5` as
    /// witnessed plus the full-cycle `E_6^o`. Entries the loop-6 engine
    /// never reads are zero; the table only serves the positivity
    /// re-check.
    pub fn table(&self) -> CorrelatorTable {
        let r = |x: &Rational| QuadExt::from_rational(x.clone());
        let line = vec![
            QuadExt::zero(),
            r(&self.e2),
            r(&self.correlators[0]),
            r(&self.correlators[1]),
            r(&self.correlators[2]),
            QuadExt::zero(),
        ];
        let mut loops = vec![QuadExt::zero(); 6];
        loops[5] = r(&self.correlators[3]);
        CorrelatorTable::from_parts(line, loops)
    }

    /// Exact non-negativity of the induced loop-6 distribution.
    pub fn verify(&self) -> Result<bool> {
        let dist = crate::dist::ExactDistribution::build(Topology::Loop(6), &self.table())?;
        Ok(verify_nonnegativity(&dist, 1).passed)
    }
}

/// Bisection bracket for the largest feasible two-box correlator.
#[derive(Clone, Debug)]
pub struct BoundBracket {
    pub lo: Rational,
    pub hi: Rational,
    pub iterations: u32,
    pub witness: HexagonWitness,
    /// Exact loop-6 positivity of the witness distribution.
    pub witness_verified: bool,
}

const BISECTION_CAP: u32 = 60;

/// Brackets `sup { e2 : hexagon feasible }` to width `<= tol` by exact
/// bisection on `[0, 1]`, then re-verifies the witness at the feasible
/// endpoint through the distribution engine.
pub fn hexagon_max_e2(tol: &Rational) -> Result<BoundBracket> {
    assert!(tol > &Rational::zero(), "tolerance must be positive");
    let mut lo = Rational::zero();
    let mut hi = Rational::one();
    let witness_at = |e2: &Rational| -> Result<Option<[Rational; 4]>> {
        match hexagon_lp(e2).solve()? {
            LpResult::Feasible { assignment, .. } => Ok(Some([
                assignment[0].clone(),
                assignment[1].clone(),
                assignment[2].clone(),
                assignment[3].clone(),
            ])),
            _ => Ok(None),
        }
    };
    let mut best = match witness_at(&lo)? {
        Some(w) => w,
        None => return Err(Error::Lp("hexagon program must be feasible at e2 = 0".into())),
    };
    if witness_at(&hi)?.is_some() {
        return Err(Error::Lp("hexagon program must be infeasible at e2 = 1".into()));
    }
    let mut iterations = 0;
    let two = Rational::from_integer(2.into());
    while &hi - &lo > *tol && iterations < BISECTION_CAP {
        let mid = (&lo + &hi) / &two;
        match witness_at(&mid)? {
            Some(w) => {
                best = w;
                lo = mid;
            }
            None => hi = mid,
        }
        iterations += 1;
    }
    let witness = HexagonWitness { e2: lo.clone(), correlators: best };
    let witness_verified = witness.verify()?;
    Ok(BoundBracket { lo, hi, iterations, witness, witness_verified })
}

/// Result of the certificate linear program.
#[derive(Clone, Debug)]
pub struct CertificateSearch {
    /// All product columns offered, as 1-based `(u, v)` pairs.
    pub pairs: Vec<(usize, usize)>,
    /// Solved weight per column (non-negative, in `Q[sqrt(2)]`).
    pub weights: Vec<QuadExt>,
    /// The nonzero-weight terms as a certificate.
    pub certificate: Certificate,
    pub report: CertificateReport,
    /// Zero residual, no high-arity monomials, all weights positive.
    pub exact_verified: bool,
    /// In restricted mode: whether the solved weights equal the published
    /// ones entry for entry.
    pub matches_paper: Option<bool>,
}

/// Finds non-negative weights on products `P_u * Q_v` that cancel every
/// non-constant monomial except `E3^2` (normalized to coefficient 1 in
/// q-form, equivalently `2^{-14}` on probability products). The simplex
/// runs directly over `Q[sqrt(2)]`, so recovered weights are exact field
/// elements, checked back through [`certificate_verify`].
pub fn certificate_search(restrict_to_paper_pairs: bool) -> Result<CertificateSearch> {
    let (p_outcomes, q_outcomes) = appendix_outcomes();
    let p_polys: Vec<CorrPolynomial> = p_outcomes.iter().map(symbolic_q).collect();
    let q_polys: Vec<CorrPolynomial> = q_outcomes.iter().map(symbolic_q).collect();

    let pairs: Vec<(usize, usize)> = if restrict_to_paper_pairs {
        PAIR_U.iter().copied().zip(PAIR_V.iter().copied()).collect()
    } else {
        (1..=p_polys.len()).flat_map(|u| (1..=q_polys.len()).map(move |v| (u, v))).collect()
    };
    let products: Vec<CorrPolynomial> = pairs
        .iter()
        .map(|&(u, v)| p_polys[u - 1].clone() * q_polys[v - 1].clone())
        .collect();

    let mut monomials: BTreeSet<Monomial> = BTreeSet::new();
    for poly in &products {
        monomials.extend(poly.terms().map(|(m, _)| *m).filter(|m| !m.is_one()));
    }

    // include the constant row: across feasible weightings the constant is
    // bounded below by 12*sqrt2 - 17 (evaluate the combination at the
    // actual box, where the target forces it), and only the extremal value
    // yields the published identity, so pin it
    monomials.insert(Monomial::one());

    let mut lp = LinearProgram::<QuadExt>::new();
    let vars: Vec<usize> =
        pairs.iter().map(|&(u, v)| lp.add_var(format!("c[{u},{v}]"), true)).collect();
    let e3_squared = Monomial::from_exponents([2, 0, 0, 0, 0]);
    for m in &monomials {
        let coeffs: Vec<(usize, QuadExt)> = products
            .iter()
            .enumerate()
            .filter_map(|(i, poly)| {
                let c = poly.coefficient(m);
                if c.is_zero() {
                    None
                } else {
                    Some((vars[i], c))
                }
            })
            .collect();
        let target = if *m == e3_squared {
            QuadExt::one()
        } else if m.is_one() {
            QuadExt::from_ints(-17, 12)
        } else {
            QuadExt::zero()
        };
        lp.constrain(coeffs, Relation::Eq, target);
    }

    let assignment = match lp.solve()? {
        LpResult::Feasible { assignment, .. } => assignment,
        LpResult::Infeasible { .. } => {
            return Err(Error::Lp(
                "certificate program is infeasible, which contradicts the known certificate".into(),
            ));
        }
        LpResult::Unbounded => {
            return Err(Error::Lp("feasibility program cannot be unbounded".into()))
        }
    };

    let mut u = Vec::new();
    let mut v = Vec::new();
    let mut c = Vec::new();
    for (i, weight) in assignment.iter().enumerate() {
        if weight.sign() > 0 {
            u.push(pairs[i].0);
            v.push(pairs[i].1);
            c.push(weight.clone());
        }
    }
    let certificate = Certificate { u, v, c };
    let report = certificate_verify(&certificate)?;
    let exact_verified = report.is_valid();
    let matches_paper = restrict_to_paper_pairs.then(|| assignment == Certificate::paper().c);

    Ok(CertificateSearch {
        pairs,
        weights: assignment,
        certificate,
        report,
        exact_verified,
        matches_paper,
    })
}

/// Probe for a degree-zero certificate: force every non-constant
/// monomial, `E3^2` included, to vanish, and maximize the total weight
/// with each weight boxed in `[0, 1]`. A zero optimum means the all-zero
/// weighting is the only such combination, so no constant-only
/// certificate hides in this product family.
pub fn degenerate_search_probe() -> Result<QuadExt> {
    let (p_outcomes, q_outcomes) = appendix_outcomes();
    let p_polys: Vec<CorrPolynomial> = p_outcomes.iter().map(symbolic_q).collect();
    let q_polys: Vec<CorrPolynomial> = q_outcomes.iter().map(symbolic_q).collect();
    let products: Vec<CorrPolynomial> = (0..p_polys.len())
        .flat_map(|u| (0..q_polys.len()).map(move |v| (u, v)))
        .map(|(u, v)| p_polys[u].clone() * q_polys[v].clone())
        .collect();
    let mut monomials: BTreeSet<Monomial> = BTreeSet::new();
    for poly in &products {
        monomials.extend(poly.terms().map(|(m, _)| *m).filter(|m| !m.is_one()));
    }
    let mut lp = LinearProgram::<QuadExt>::new();
    let vars: Vec<usize> =
        (0..products.len()).map(|i| lp.add_var(format!("w{i}"), true)).collect();
    for &v in &vars {
        lp.constrain(vec![(v, QuadExt::one())], Relation::Le, QuadExt::one());
    }
    for m in &monomials {
        let coeffs: Vec<(usize, QuadExt)> = products
            .iter()
            .enumerate()
            .filter_map(|(i, poly)| {
                let c = poly.coefficient(m);
                if c.is_zero() {
                    None
                } else {
                    Some((vars[i], c))
                }
            })
            .collect();
        lp.constrain(coeffs, Relation::Eq, QuadExt::zero());
    }
    lp.set_objective(
        vars.iter().map(|&v| (v, QuadExt::one())).collect(),
        crate::lp::Direction::Maximize,
    );
    match lp.solve()? {
        LpResult::Feasible { objective, .. } => {
            Ok(objective.expect("objective was set"))
        }
        other => Err(Error::Lp(format!("degenerate probe did not solve: {other:?}"))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::LpScalar;

    fn rat(n: i64, d: i64) -> Rational {
        Rational::new(n.into(), d.into())
    }

    #[test]
    fn hexagon_rows_are_affine_and_rational() {
        let rows = hexagon_rows(&rat(41, 100));
        assert_eq!(rows.len(), 64);
        // all-plus outcome: 1 + 6 e2 + 3 e2^2 + 6 E3 + 6 E4 + 6 E5 + E6o
        let (constant, coefs) = &rows[0];
        assert_eq!(constant, &(rat(1, 1) + rat(6 * 41, 100) + rat(3 * 41 * 41, 10000)));
        assert_eq!(coefs[0], rat(6, 1));
        assert_eq!(coefs[1], rat(6, 1));
        assert_eq!(coefs[2], rat(6, 1));
        assert_eq!(coefs[3], rat(1, 1));
    }

    #[test]
    fn feasibility_flips_at_the_bound() {
        assert!(hexagon_feasible(&Rational::zero()).unwrap());
        assert!(hexagon_feasible(&rat(41, 100)).unwrap());
        assert!(!hexagon_feasible(&rat(42, 100)).unwrap());
        assert!(!hexagon_feasible(&Rational::one()).unwrap());
    }

    #[test]
    fn float_mode_agrees_on_clear_margins() {
        for (e2, expect) in [(0.0, true), (0.3, true), (0.41, true), (0.42, false), (0.5, false)] {
            assert_eq!(hexagon_feasible_f64(e2).unwrap(), expect, "float, e2 = {e2}");
            assert_eq!(
                hexagon_feasible(&Rational::from_float(e2).unwrap()).unwrap(),
                expect,
                "exact, e2 = {e2}"
            );
        }
    }

    #[test]
    fn coarse_bisection_brackets_the_bound() {
        let b = hexagon_max_e2(&rat(1, 2)).unwrap();
        let sqrt2m1 = 2f64.sqrt() - 1.0;
        let lo = f64::from_rational(&b.lo);
        let hi = f64::from_rational(&b.hi);
        assert!(lo <= sqrt2m1 && sqrt2m1 <= hi, "[{lo}, {hi}]");
        assert!(b.witness_verified);
    }
}
