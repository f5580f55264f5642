//! Dynamic-programming engines against brute-force subset enumeration.

use nlbox_core::dist::{q_value, Outcome, Topology};
use nlbox_core::oracle::q_value_enumerated;
use nlbox_core::verify::loop_recursion_value;
use nlbox_core::CorrelatorTable;

#[test]
fn line_engine_equals_subset_enumeration_up_to_ten_boxes() {
    let table = CorrelatorTable::standard(10);
    for n in 1..=10 {
        let topology = Topology::Line(n);
        for mask in 0u32..(1 << n) {
            let outcome = Outcome::from_mask(mask, n);
            assert_eq!(
                q_value(topology, &outcome, &table).unwrap(),
                q_value_enumerated(topology, &outcome, &table).unwrap(),
                "line n = {n}, outcome {outcome}"
            );
        }
    }
}

#[test]
fn loop_engine_equals_subset_enumeration_up_to_ten_boxes() {
    let table = CorrelatorTable::standard(10);
    for n in 1..=10 {
        let topology = Topology::Loop(n);
        for mask in 0u32..(1 << n) {
            let outcome = Outcome::from_mask(mask, n);
            assert_eq!(
                q_value(topology, &outcome, &table).unwrap(),
                q_value_enumerated(topology, &outcome, &table).unwrap(),
                "loop n = {n}, outcome {outcome}"
            );
        }
    }
}

#[test]
fn loop_reduction_recursion_agrees_with_both_routes() {
    let table = CorrelatorTable::standard(9);
    for n in 2..=9 {
        for mask in 0u32..(1 << n) {
            let outcome = Outcome::from_mask(mask, n);
            assert_eq!(
                loop_recursion_value(mask, n, &table),
                q_value(Topology::Loop(n), &outcome, &table).unwrap(),
                "loop recursion n = {n}, outcome {outcome}"
            );
        }
    }
}
