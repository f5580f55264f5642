//! Slow LP reproductions: fine-tolerance bisection, the unrestricted
//! certificate search, and the degenerate probe.

use nlbox_core::optimize::{certificate_search, degenerate_search_probe, hexagon_max_e2};
use nlbox_core::scalar::LpScalar;
use nlbox_core::{QuadExt, Rational};

#[test]
fn bisection_brackets_the_bound_at_one_in_ten_million() {
    let tol = Rational::new(1.into(), 10_000_000.into());
    let bracket = hexagon_max_e2(&tol).unwrap();
    let lo = <f64 as LpScalar>::from_rational(&bracket.lo);
    let hi = <f64 as LpScalar>::from_rational(&bracket.hi);
    let target = std::f64::consts::SQRT_2 - 1.0;
    assert!(&bracket.hi - &bracket.lo <= tol);
    assert!(lo <= target && target <= hi, "[{lo}, {hi}]");
    assert!(bracket.witness_verified);
    assert!(bracket.iterations <= 60);
}

#[test]
fn unrestricted_search_finds_a_new_exact_certificate() {
    let search = certificate_search(false).unwrap();
    assert_eq!(search.pairs.len(), 72);
    assert!(search.exact_verified, "residual: {}", search.report.residual);
    assert!(search.certificate.c.iter().all(|c| c.sign() == 1));
    assert!(search.matches_paper.is_none());
}

#[test]
fn degenerate_probe_admits_vacuous_positive_combinations() {
    // forcing E3^2 to vanish as well does NOT collapse the cone to zero:
    // the maximal total weight over [0,1]^72 is -25/2 + (81/4) sqrt2
    // (~ 16.1378). Such combinations equal a positive constant, so they
    // carry no bound; recorded as the factual outcome of the probe.
    let optimum = degenerate_search_probe().unwrap();
    assert_eq!(
        optimum,
        QuadExt::new(Rational::new((-25).into(), 2.into()), Rational::new(81.into(), 4.into()))
    );
}
