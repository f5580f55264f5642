//! Structural properties of the engines that hold for any correlator
//! table, plus polynomial ring axioms on random operands.

use num_traits::Zero;
use proptest::prelude::*;

use nlbox_core::dist::{dense_line, dense_loop, low_bits, parity_plus};
use nlbox_core::poly::CorrPolynomial;
use nlbox_core::{CorrelatorTable, QuadExt, Rational};

fn small_quad() -> impl Strategy<Value = QuadExt> {
    (-8i64..=8, -8i64..=8, 1i64..=4).prop_map(|(a, b, d)| {
        QuadExt::new(Rational::new(a.into(), d.into()), Rational::new(b.into(), d.into()))
    })
}

/// Random table of size 6 with the single-box correlators pinned to zero
/// (the one assumption the engine structure relies on).
fn random_table() -> impl Strategy<Value = CorrelatorTable> {
    (
        proptest::collection::vec(small_quad(), 5),
        proptest::collection::vec(small_quad(), 5),
    )
        .prop_map(|(mut line, mut loops)| {
            line.insert(0, QuadExt::zero());
            loops.insert(0, QuadExt::zero());
            CorrelatorTable::from_parts(line, loops)
        })
}

fn window_sum(q: &[QuadExt], window: u32) -> QuadExt {
    let mut total = QuadExt::zero();
    for (mask, v) in q.iter().enumerate() {
        total = if parity_plus(mask as u32 & window) { total + v } else { total - v };
    }
    total
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    /// Normalization and vanishing marginals are structural: they hold
    /// whatever the higher correlators are, as long as E_1 = 0.
    #[test]
    fn any_table_normalizes_and_has_random_marginals(table in random_table()) {
        for n in 1..=6usize {
            let line = dense_line(n, &table);
            let cycle = dense_loop(n, &table);
            for q in [&line, &cycle] {
                let mut total = QuadExt::zero();
                for v in q.iter() {
                    total = total + v;
                }
                prop_assert_eq!(total, QuadExt::from_ints(1i64 << n, 0));
                for pos in 0..n {
                    prop_assert!(window_sum(q, 1 << pos).is_zero());
                }
            }
        }
    }

    /// Every contiguous window recovers exactly the correlator the table
    /// prescribes for its length.
    #[test]
    fn windows_recover_table_entries(table in random_table()) {
        let n = 6usize;
        let pow = QuadExt::from_ints(1i64 << n, 0);
        let line = dense_line(n, &table);
        for k in 1..=n {
            for start in 0..=n - k {
                let expected = table.line(k) * &pow;
                prop_assert_eq!(window_sum(&line, low_bits(k) << start), expected);
            }
        }
        let cycle = dense_loop(n, &table);
        for k in 1..n {
            for start in 0..n {
                let mut w = 0u32;
                for i in 0..k {
                    w |= 1 << ((start + i) % n);
                }
                let expected = table.line(k) * &pow;
                prop_assert_eq!(window_sum(&cycle, w), expected);
            }
        }
        prop_assert_eq!(window_sum(&cycle, low_bits(n)), table.loop_corr(n) * &pow);
    }
}

fn small_poly() -> impl Strategy<Value = CorrPolynomial> {
    proptest::collection::vec((0usize..5, small_quad()), 0..5).prop_map(|terms| {
        let mut p = CorrPolynomial::zero();
        for (var, coef) in terms {
            p = p + CorrPolynomial::variable(var).scale(&coef);
        }
        p
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn polynomial_ring_axioms(x in small_poly(), y in small_poly(), z in small_poly()) {
        prop_assert_eq!(x.clone() + y.clone(), y.clone() + x.clone());
        prop_assert_eq!(x.clone() * y.clone(), y.clone() * x.clone());
        prop_assert_eq!(
            (x.clone() + y.clone()) + z.clone(),
            x.clone() + (y.clone() + z.clone())
        );
        prop_assert_eq!(
            (x.clone() * y.clone()) * z.clone(),
            x.clone() * (y.clone() * z.clone())
        );
        prop_assert_eq!(
            x.clone() * (y.clone() + z.clone()),
            x.clone() * y.clone() + x.clone() * z.clone()
        );
        prop_assert_eq!(x.clone() - x.clone(), CorrPolynomial::zero());
    }
}
