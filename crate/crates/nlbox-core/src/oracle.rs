//! Brute-force reference evaluation by subset enumeration.
//!
//! `q(x) = sum_{S subset of positions} (prod_{j in S} x_j) * weight(S)`
//! computed literally, with weights from [`crate::dist::subset_weight`].
//! Exponential in `n`; exists purely as an independent check of the
//! dynamic-programming engines and is what the equivalence tests run
//! against.

use num_traits::Zero;

use crate::correlators::CorrelatorTable;
use crate::dist::{low_bits, parity_plus, subset_weight, Outcome, Topology};
use crate::quad::QuadExt;
use crate::Result;

/// q-value of one outcome by explicit enumeration of all `2^n` subsets.
pub fn q_value_enumerated(
    topology: Topology,
    outcome: &Outcome,
    table: &CorrelatorTable,
) -> Result<QuadExt> {
    let n = topology.n();
    assert_eq!(outcome.n(), n);
    let mut total = QuadExt::zero();
    for subset in 0..=low_bits(n) {
        let w = subset_weight(topology, subset, table)?;
        if w.is_zero() {
            continue;
        }
        total = if parity_plus(subset & outcome.mask()) { total + w } else { total - w };
    }
    Ok(total)
}
