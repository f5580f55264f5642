//! Seeded Monte-Carlo sampling of the exact distributions.
//!
//! Draws are inverse-CDF over the float image of an exact distribution:
//! an independent statistical route to the correlators that never touches
//! the recursions. Runs are reproducible bit for bit from (topology,
//! count, seed); the generator is ChaCha8 seeded with the 64-bit seed.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::correlators::CorrelatorTable;
use crate::dist::{low_bits, parity_plus, ExactDistribution, Topology};
use crate::{Error, Result, DEFAULT_ENUM_LIMIT};

/// Generator identifier recorded with every run.
pub const RNG_ALGORITHM: &str = "chacha8";

/// Maximum tolerated drift of the float probability sum from 1.
pub const RENORMALIZATION_DRIFT: f64 = 1e-12;

/// A reproducible batch of sampled outcomes (stored as masks).
#[derive(Clone, Debug)]
pub struct SampleRun {
    pub topology: Topology,
    pub count: usize,
    pub seed: u64,
    pub outcomes: Vec<u32>,
}

/// Draws `count` i.i.d. outcomes by inverse CDF over the renormalized
/// float probabilities.
pub fn sample(
    topology: Topology,
    table: &CorrelatorTable,
    count: usize,
    seed: u64,
) -> Result<SampleRun> {
    sample_with_limit(topology, table, count, seed, DEFAULT_ENUM_LIMIT)
}

pub fn sample_with_limit(
    topology: Topology,
    table: &CorrelatorTable,
    count: usize,
    seed: u64,
    limit: usize,
) -> Result<SampleRun> {
    let dist = ExactDistribution::build_with_limit(topology, table, limit)?;
    let mut probs = Vec::with_capacity(dist.len());
    for mask in 0..dist.len() as u32 {
        probs.push(dist.p_float(mask)?);
    }
    let total: f64 = probs.iter().sum();
    if (total - 1.0).abs() > RENORMALIZATION_DRIFT {
        return Err(Error::FloatRange);
    }
    let mut cdf = Vec::with_capacity(probs.len());
    let mut acc = 0.0;
    for p in &probs {
        acc += p / total;
        cdf.push(acc);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let outcomes = (0..count)
        .map(|_| {
            let u: f64 = rng.gen();
            let idx = cdf.partition_point(|c| *c <= u);
            idx.min(cdf.len() - 1) as u32
        })
        .collect();
    Ok(SampleRun { topology, count, seed, outcomes })
}

/// One estimated correlator.
#[derive(Clone, Copy, Debug)]
pub struct WindowEstimate {
    /// Window length `k` (for loops, `k = n` means the full cycle).
    pub len: usize,
    /// Window-averaged empirical product.
    pub estimate: f64,
    /// Reported as `count^{-1/2}`.
    pub std_error: f64,
    /// Float image of the exact target correlator.
    pub exact: f64,
}

/// Empirical correlators of one run.
#[derive(Clone, Debug)]
pub struct Estimates {
    pub topology: Topology,
    pub count: usize,
    /// Estimates for window lengths `1..=n` on a line, `1..n` on a loop.
    pub windows: Vec<WindowEstimate>,
    /// Full-cycle estimate on loops.
    pub full_loop: Option<WindowEstimate>,
    /// Sampled outcomes containing the `+,-,+` pattern (cyclic on loops).
    pub forbidden_count: usize,
}

/// Window-averaged correlator estimates, via a per-outcome histogram so
/// the cost is `O(2^n)` rather than `O(count)` per window.
pub fn estimate_correlators(run: &SampleRun, table: &CorrelatorTable) -> Result<Estimates> {
    assert!(run.count > 0, "estimates need a non-empty run");
    let n = run.topology.n();
    let is_loop = run.topology.is_loop();
    let mut histogram = vec![0u64; 1 << n];
    let mut forbidden_count = 0usize;
    for &mask in &run.outcomes {
        histogram[mask as usize] += 1;
        if crate::dist::mask_contains_forbidden(mask, n, is_loop) {
            forbidden_count += 1;
        }
    }

    let std_error = 1.0 / (run.count as f64).sqrt();
    let window_masks = |k: usize| -> Vec<u32> {
        if is_loop {
            (0..n)
                .map(|start| {
                    let mut w = 0u32;
                    for i in 0..k {
                        w |= 1 << ((start + i) % n);
                    }
                    w
                })
                .collect()
        } else {
            (0..=n - k).map(|start| low_bits(k) << start).collect()
        }
    };
    let averaged = |masks: &[u32]| -> f64 {
        let mut total = 0i64;
        for (mask, &count) in histogram.iter().enumerate() {
            if count == 0 {
                continue;
            }
            for w in masks {
                let signed = if parity_plus(mask as u32 & w) { count as i64 } else { -(count as i64) };
                total += signed;
            }
        }
        total as f64 / (run.count as f64 * masks.len() as f64)
    };

    let mut windows = Vec::new();
    let max_line_k = if is_loop { n - 1 } else { n };
    for k in 1..=max_line_k {
        windows.push(WindowEstimate {
            len: k,
            estimate: averaged(&window_masks(k)),
            std_error,
            exact: table.line(k).to_f64()?,
        });
    }
    let full_loop = if is_loop {
        Some(WindowEstimate {
            len: n,
            estimate: averaged(&[low_bits(n)]),
            std_error,
            exact: table.loop_corr(n).to_f64()?,
        })
    } else {
        None
    };
    Ok(Estimates { topology: run.topology, count: run.count, windows, full_loop, forbidden_count })
}
