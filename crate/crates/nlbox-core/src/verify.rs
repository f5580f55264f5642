//! Verification sweeps over exact distributions.
//!
//! Each check is an exact computation that either passes or names its
//! violating outcomes. Informational checks compare the engine against
//! alternative published expressions whose reading is ambiguous; they are
//! reported but never fail a suite.

use std::fmt::Write as _;
use std::ops::Range;

use num_traits::{One, Zero};

use crate::correlators::CorrelatorTable;
use crate::dist::{
    line_q, low_bits, mask_contains_forbidden, parity_plus, ExactDistribution, Outcome, Topology,
};
use crate::quad::QuadExt;
use crate::{Rational, Result};

/// One verification result.
#[derive(Clone, Debug)]
pub struct Check {
    pub name: String,
    pub topology: Topology,
    pub passed: bool,
    /// Reported for information only; never fails a suite.
    pub informational: bool,
    pub detail: String,
}

impl Check {
    fn outcome(name: &str, topology: Topology, passed: bool, detail: String) -> Self {
        Check { name: name.into(), topology, passed, informational: false, detail }
    }

    fn info(name: &str, topology: Topology, agreed: bool, detail: String) -> Self {
        Check { name: name.into(), topology, passed: agreed, informational: true, detail }
    }
}

#[derive(Clone, Debug, Default)]
pub struct VerifyReport {
    pub checks: Vec<Check>,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed || c.informational)
    }
}

fn par_chunks<T, F>(total: usize, workers: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(Range<usize>) -> T + Sync,
{
    let workers = workers.max(1).min(total.max(1));
    if workers <= 1 {
        return vec![f(0..total)];
    }
    let chunk = total.div_ceil(workers);
    std::thread::scope(|scope| {
        let f = &f;
        let handles: Vec<_> = (0..workers)
            .map(|w| {
                let lo = w * chunk;
                let hi = ((w + 1) * chunk).min(total);
                scope.spawn(move || f(lo..hi))
            })
            .collect();
        handles.into_iter().map(|h| h.join().expect("verify worker panicked")).collect()
    })
}

fn describe_violations(dist: &ExactDistribution, violations: &[u32]) -> String {
    let mut s = String::new();
    for &mask in violations.iter().take(8) {
        let _ = write!(s, " {}", Outcome::from_mask(mask, dist.n()));
    }
    if violations.len() > 8 {
        let _ = write!(s, " (+{} more)", violations.len() - 8);
    }
    s
}

/// Exact sign check of every `q(x)`; lists any violating outcome.
pub fn verify_nonnegativity(dist: &ExactDistribution, workers: usize) -> Check {
    let parts = par_chunks(dist.len(), workers, |range| {
        let mut bad = Vec::new();
        for mask in range {
            if dist.q(mask as u32).sign() < 0 {
                bad.push(mask as u32);
            }
        }
        bad
    });
    let violations: Vec<u32> = parts.into_iter().flatten().collect();
    let detail = if violations.is_empty() {
        format!("{} outcomes checked", dist.len())
    } else {
        format!("negative q at{}", describe_violations(dist, &violations))
    };
    Check::outcome("non-negativity", dist.topology(), violations.is_empty(), detail)
}

/// `sum_x q(x) = 2^n`, exactly.
pub fn verify_normalization(dist: &ExactDistribution, workers: usize) -> Check {
    let parts = par_chunks(dist.len(), workers, |range| {
        let mut t = QuadExt::zero();
        for mask in range {
            t = t + dist.q(mask as u32);
        }
        t
    });
    let mut total = QuadExt::zero();
    for p in parts {
        total = total + p;
    }
    let expected = QuadExt::from_ints(1i64 << dist.n(), 0);
    let ok = total == expected;
    Check::outcome(
        "normalization",
        dist.topology(),
        ok,
        format!("sum q = {total}, expected {expected}"),
    )
}

/// `sum_x x_j q(x) = 0` for every position `j`.
pub fn verify_marginals(dist: &ExactDistribution) -> Check {
    let mut bad = Vec::new();
    for pos in 1..=dist.n() {
        if !dist.marginal(pos).is_zero() {
            bad.push(pos);
        }
    }
    Check::outcome(
        "single-box marginals",
        dist.topology(),
        bad.is_empty(),
        if bad.is_empty() {
            format!("{} positions random", dist.n())
        } else {
            format!("biased positions {bad:?}")
        },
    )
}

/// Every contiguous window of length `k` recovers `E_k` (and the full
/// loop window recovers `E_n^o`), exactly.
pub fn verify_window_correlators(
    dist: &ExactDistribution,
    table: &CorrelatorTable,
    workers: usize,
) -> Check {
    let n = dist.n();
    let mut windows: Vec<(u32, QuadExt)> = Vec::new();
    let pow = QuadExt::from_ints(1i64 << n, 0);
    match dist.topology() {
        Topology::Line(_) => {
            for k in 1..=n {
                for start in 0..=n - k {
                    windows.push((low_bits(k) << start, table.line(k) * &pow));
                }
            }
        }
        Topology::Loop(_) => {
            for k in 1..n {
                for start in 0..n {
                    let mut w = 0u32;
                    for i in 0..k {
                        w |= 1 << ((start + i) % n);
                    }
                    windows.push((w, table.line(k) * &pow));
                }
            }
            windows.push((low_bits(n), table.loop_corr(n) * &pow));
        }
    }
    let parts = par_chunks(dist.len(), workers, |range| {
        let mut sums = vec![QuadExt::zero(); windows.len()];
        for mask in range {
            let v = dist.q(mask as u32);
            if v.is_zero() {
                continue;
            }
            for (i, (w, _)) in windows.iter().enumerate() {
                sums[i] = if parity_plus(mask as u32 & w) { &sums[i] + v } else { &sums[i] - v };
            }
        }
        sums
    });
    let mut sums = vec![QuadExt::zero(); windows.len()];
    for part in parts {
        for (acc, s) in sums.iter_mut().zip(part) {
            *acc = &*acc + &s;
        }
    }
    let bad: Vec<usize> =
        (0..windows.len()).filter(|&i| sums[i] != windows[i].1).collect();
    Check::outcome(
        "window correlators",
        dist.topology(),
        bad.is_empty(),
        if bad.is_empty() {
            format!("{} windows recover their correlator", windows.len())
        } else {
            format!("{} of {} windows disagree", bad.len(), windows.len())
        },
    )
}

/// `q = 0` exactly on every outcome containing consecutive `+,-,+`
/// (cyclically on a loop).
pub fn verify_forbidden_pattern(dist: &ExactDistribution, workers: usize) -> Check {
    let n = dist.n();
    let cyclic = dist.topology().is_loop();
    let parts = par_chunks(dist.len(), workers, |range| {
        let mut bad = Vec::new();
        let mut hits = 0usize;
        for mask in range {
            if mask_contains_forbidden(mask as u32, n, cyclic) {
                hits += 1;
                if !dist.q(mask as u32).is_zero() {
                    bad.push(mask as u32);
                }
            }
        }
        (hits, bad)
    });
    let mut hits = 0;
    let mut violations = Vec::new();
    for (h, b) in parts {
        hits += h;
        violations.extend(b);
    }
    Check::outcome(
        "forbidden pattern +-+",
        dist.topology(),
        violations.is_empty(),
        if violations.is_empty() {
            format!("{hits} outcomes carry the pattern, all with q = 0")
        } else {
            format!("nonzero q at{}", describe_violations(dist, &violations))
        },
    )
}

/// Splitting identity for lines: when the outputs start with `+...+-` and
/// the box after the first `-1` also outputs `-1`, the probability
/// factorizes across the removed box:
/// `q_n(x) = 2 q_{j0}(+..+-) q_{n-j0-1}(x_{j0+2}..x_n)`.
pub fn verify_factorization(dist: &ExactDistribution, table: &CorrelatorTable) -> Check {
    assert!(!dist.topology().is_loop(), "factorization is a line identity");
    let n = dist.n();
    let two = QuadExt::from_ints(2, 0);
    let mut applicable = 0usize;
    let mut bad = Vec::new();
    for mask in 0..dist.len() as u32 {
        if mask & 1 == 1 {
            continue; // x_1 = -1
        }
        let j0 = (mask.trailing_zeros() as usize) + 1; // first -1, 1-based
        if j0 > n || j0 + 1 > n || mask >> j0 & 1 == 0 {
            continue; // all plus, -1 at the end, or x_{j0+1} = +1
        }
        applicable += 1;
        let prefix = line_q(1u32 << (j0 - 1), j0, table);
        let suffix = line_q(mask >> (j0 + 1), n - j0 - 1, table);
        if dist.q(mask) != &(&two * &prefix * &suffix) {
            bad.push(mask);
        }
    }
    Check::outcome(
        "factorization at the first sign change",
        dist.topology(),
        bad.is_empty(),
        if bad.is_empty() {
            format!("{applicable} applicable outcomes factorize exactly")
        } else {
            format!("identity fails at{}", describe_violations(dist, &bad))
        },
    )
}

/// The four probabilities every line outcome factors into, with their
/// closed forms.
#[derive(Clone, Debug)]
pub struct BoundaryProbabilities {
    pub n: usize,
    /// `p_n(1..1)`
    pub all_plus: QuadExt,
    /// `p_{n+1}(1..1, -)`
    pub plus_minus: QuadExt,
    /// `p_{n+1}(-, 1..1)`
    pub minus_plus: QuadExt,
    /// `p_{n+2}(-, 1..1, -)`
    pub minus_plus_minus: QuadExt,
    /// Engine values match the closed forms and the left-right symmetry.
    pub closed_forms_match: bool,
}

/// Evaluates the boundary probabilities at `n >= 2` and checks them
/// against `q_n(1) = sqrt2^{n-1}`, `q_{n+1}(1,-) = sqrt2^{n+1} - sqrt2^n`
/// and `q_{n+2}(-,1,-) = (3/2) sqrt2^{n+3} - sqrt2^{n+4}`.
pub fn boundary_probabilities(n: usize, table: &CorrelatorTable) -> Result<BoundaryProbabilities> {
    assert!(n >= 2);
    table.check_len(n + 2)?;
    let nu = n as u32;
    let q_all = line_q(0u32, n, table);
    let q_pm = line_q(1u32 << n, n + 1, table);
    let q_mp = line_q(1u32, n + 1, table);
    let q_mpm = line_q(1u32 | (1u32 << (n + 1)), n + 2, table);

    let want_all = QuadExt::sqrt2_pow(nu - 1);
    let want_pm = QuadExt::sqrt2_pow(nu + 1) - QuadExt::sqrt2_pow(nu);
    let want_mpm = QuadExt::sqrt2_pow(nu + 3).scale(&Rational::new(3.into(), 2.into()))
        - QuadExt::sqrt2_pow(nu + 4);
    let ok = q_all == want_all && q_pm == want_pm && q_mp == q_pm && q_mpm == want_mpm;

    let scale = |q: &QuadExt, boxes: usize| q.scale(&Rational::new(1.into(), crate::Int::one() << boxes));
    Ok(BoundaryProbabilities {
        n,
        all_plus: scale(&q_all, n),
        plus_minus: scale(&q_pm, n + 1),
        minus_plus: scale(&q_mp, n + 1),
        minus_plus_minus: scale(&q_mpm, n + 2),
        closed_forms_match: ok,
    })
}

/// Engine vs published expression for the all-minus loop outcome.
#[derive(Clone, Debug)]
pub struct AllMinusReport {
    pub n: usize,
    /// `q^o_n(-1..-1)` from the arc engine.
    pub engine: QuadExt,
    /// `1 + n sum_{k=2}^{n-1} (-1)^k E_k + (-1)^n E_n^o`: the single-arc
    /// expression, which misses multi-arc products from `n = 6` on.
    pub formula: QuadExt,
    pub difference: QuadExt,
    pub engine_nonnegative: bool,
}

pub fn loop_all_minus(n: usize, table: &CorrelatorTable) -> Result<AllMinusReport> {
    assert!(n >= 3);
    table.check_len(n)?;
    let engine = crate::dist::loop_q(low_bits(n), n, table);
    let mut formula = QuadExt::one();
    for k in 2..n {
        let term = table.line(k).scale_int(n as i64);
        formula = if k % 2 == 0 { formula + term } else { formula - term };
    }
    formula = if n % 2 == 0 { formula + table.loop_corr(n) } else { formula - table.loop_corr(n) };
    let difference = &engine - &formula;
    Ok(AllMinusReport {
        n,
        engine_nonnegative: engine.sign() >= 0,
        engine,
        formula,
        difference,
    })
}

/// Literal evaluation of the loop reduction recursion, conditioning on
/// the arc that covers the last box:
/// `q^o_m(x) = q_{m-1}(x_1..x_{m-1}) + X_m E^o_m
///  + sum_{k=1}^{m-1} E_k sum_{l=1}^{k} sign(arc_{k,l}) q_{m-2-k}(interior)`
/// with `q_{-1} = q_0 = 1`, arc indices modulo `m` and the interior read
/// forward from two positions past the arc end. Used as a cross-check of
/// the arc engine; agreement is reported, not assumed.
pub fn loop_recursion_value(mask: u32, m: usize, table: &CorrelatorTable) -> QuadExt {
    assert!(m >= 2);
    let mut total = line_q(mask & low_bits(m - 1), m - 1, table);
    let full = table.loop_corr(m);
    total = if parity_plus(mask) { total + full } else { total - full };
    for k in 1..m {
        let e = table.line(k);
        if e.is_zero() {
            continue;
        }
        for l in 1..=k {
            let start = (m - k + l - 1) % m;
            let mut arc_mask = 0u32;
            for i in 0..k {
                arc_mask |= 1 << ((start + i) % m);
            }
            debug_assert!(arc_mask >> (m - 1) & 1 == 1, "arc must cover the last box");
            let interior_len = m as isize - 2 - k as isize;
            let inner = if interior_len <= 0 {
                QuadExt::one()
            } else {
                let istart = (start + k + 1) % m;
                let mut seg = 0u32;
                for i in 0..interior_len as usize {
                    if mask >> ((istart + i) % m) & 1 == 1 {
                        seg |= 1 << i;
                    }
                }
                line_q(seg, interior_len as usize, table)
            };
            let term = inner * e;
            total = if parity_plus(mask & arc_mask) { total + term } else { total - term };
        }
    }
    total
}

/// Compares [`loop_recursion_value`] with the arc engine over all `2^n`
/// loop outcomes.
pub fn loop_recursion_check(dist: &ExactDistribution, table: &CorrelatorTable) -> Check {
    assert!(dist.topology().is_loop());
    let n = dist.n();
    if n < 2 {
        return Check::info("loop reduction recursion", dist.topology(), true, "n < 2, vacuous".into());
    }
    let mut disagreements = Vec::new();
    for mask in 0..dist.len() as u32 {
        if &loop_recursion_value(mask, n, table) != dist.q(mask) {
            disagreements.push(mask);
        }
    }
    Check::info(
        "loop reduction recursion",
        dist.topology(),
        disagreements.is_empty(),
        if disagreements.is_empty() {
            format!("chosen reading agrees with the arc engine on all {} outcomes", dist.len())
        } else {
            format!("reading disagrees at{}", describe_violations(dist, &disagreements))
        },
    )
}

/// Runs every applicable check for one topology size.
pub fn full_suite(
    topology: Topology,
    table: &CorrelatorTable,
    workers: usize,
    limit: usize,
) -> Result<VerifyReport> {
    let dist = ExactDistribution::build_with_limit(topology, table, limit)?;
    let mut report = VerifyReport::default();
    report.checks.push(verify_nonnegativity(&dist, workers));
    report.checks.push(verify_normalization(&dist, workers));
    report.checks.push(verify_marginals(&dist));
    report.checks.push(verify_window_correlators(&dist, table, workers));
    report.checks.push(verify_forbidden_pattern(&dist, workers));
    match topology {
        Topology::Line(n) => {
            report.checks.push(verify_factorization(&dist, table));
            if n >= 2 && table.n_max() >= n + 2 {
                let b = boundary_probabilities(n, table)?;
                report.checks.push(Check::outcome(
                    "boundary probability closed forms",
                    topology,
                    b.closed_forms_match,
                    format!(
                        "p(1..1) = {}, p(1..1,-) = p(-,1..1) = {}, p(-,1..1,-) = {}",
                        b.all_plus, b.plus_minus, b.minus_plus_minus
                    ),
                ));
            }
        }
        Topology::Loop(n) => {
            if n >= 3 {
                let am = loop_all_minus(n, table)?;
                report.checks.push(Check::outcome(
                    "all-minus outcome non-negative",
                    topology,
                    am.engine_nonnegative,
                    format!("q^o({}) = {}", "-".repeat(n), am.engine),
                ));
                report.checks.push(Check::info(
                    "all-minus single-arc expression",
                    topology,
                    am.difference.is_zero(),
                    if am.difference.is_zero() {
                        "matches the engine exactly".into()
                    } else {
                        format!(
                            "differs from the engine by {} (multi-arc products appear from n = 6)",
                            am.difference
                        )
                    },
                ));
            }
            report.checks.push(loop_recursion_check(&dist, table));
        }
    }
    Ok(report)
}
