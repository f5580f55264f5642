//! Statistical coverage of the sampler across many seeds.

use nlbox_core::dist::Topology;
use nlbox_core::sampler::{estimate_correlators, sample};
use nlbox_core::CorrelatorTable;

#[test]
fn full_cycle_estimate_on_a_seven_loop() {
    let table = CorrelatorTable::standard(7);
    let run = sample(Topology::Loop(7), &table, 1_000_000, 3).unwrap();
    let est = estimate_correlators(&run, &table).unwrap();
    let full = est.full_loop.expect("loop runs estimate the full cycle");
    let target = std::f64::consts::SQRT_2 - 1.0; // the seventh loop correlator
    assert!((full.exact - target).abs() < 1e-12);
    assert!((full.estimate - target).abs() <= 4e-3, "estimate {}", full.estimate);
    let e1 = est.windows[0].estimate;
    assert!(e1.abs() <= 4e-3, "single-box estimate {e1}");
}

#[test]
fn four_sigma_coverage_over_one_hundred_seeds() {
    let table = CorrelatorTable::standard(7);
    let count = 100_000;
    let tolerance = 4.0 / (count as f64).sqrt();
    let mut failures = 0;
    for seed in 0..100u64 {
        let run = sample(Topology::Line(7), &table, count, seed).unwrap();
        let est = estimate_correlators(&run, &table).unwrap();
        let run_ok = est.windows.iter().all(|w| (w.estimate - w.exact).abs() <= tolerance);
        if !run_ok {
            failures += 1;
        }
    }
    assert!(failures <= 1, "{failures} of 100 seeded runs outside four sigma");
}
