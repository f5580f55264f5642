//! Exact joint output distributions for boxes on a line or a loop.
//!
//! Outcomes are bit masks (bit `j-1` set means `x_j = -1`) and
//! distributions store `q(x) = 2^n p(x)`, so every structural claim about
//! the box reduces to exact sign checks on `QuadExt` values.
//!
//! Two independent evaluation routes exist: the dynamic-programming
//! engines in this module (a prefix recursion over runs for lines, arc
//! conditioning for loops) and the brute-force subset enumeration in
//! [`crate::oracle`] built from [`run_decompose`] and [`subset_weight`].

use std::fmt;
use std::str::FromStr;

use num_traits::{One, Zero};

use crate::correlators::CorrelatorTable;
use crate::quad::QuadExt;
use crate::scalar::Coeff;
use crate::{Error, Result, DEFAULT_ENUM_LIMIT};

/// Network shape: `n >= 1` boxes chained by `n+1` sources (line) or `n`
/// boxes on a cycle of `n` sources (loop).
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Topology {
    Line(usize),
    Loop(usize),
}

impl Topology {
    pub fn n(self) -> usize {
        match self {
            Topology::Line(n) | Topology::Loop(n) => n,
        }
    }

    pub fn is_loop(self) -> bool {
        matches!(self, Topology::Loop(_))
    }

    pub fn label(self) -> &'static str {
        match self {
            Topology::Line(_) => "line",
            Topology::Loop(_) => "loop",
        }
    }
}

impl fmt::Display for Topology {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}-{}", self.label(), self.n())
    }
}

/// Output string of `n` boxes, each `+1` or `-1`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub struct Outcome {
    mask: u32,
    n: usize,
}

impl Outcome {
    pub fn from_mask(mask: u32, n: usize) -> Self {
        assert!(n >= 1 && n <= 32, "outcome length out of range");
        assert!(u64::from(mask) < (1u64 << n), "mask wider than outcome");
        Outcome { mask, n }
    }

    pub fn all_plus(n: usize) -> Self {
        Outcome::from_mask(0, n)
    }

    pub fn from_signs(signs: &[i8]) -> Self {
        let mut mask = 0u32;
        for (i, s) in signs.iter().enumerate() {
            match s {
                1 => {}
                -1 => mask |= 1 << i,
                other => panic!("outcome sign must be +1 or -1, got {other}"),
            }
        }
        Outcome::from_mask(mask, signs.len())
    }

    pub fn mask(&self) -> u32 {
        self.mask
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Sign of box `pos` (1-based).
    pub fn sign(&self, pos: usize) -> i8 {
        assert!(pos >= 1 && pos <= self.n);
        if self.mask >> (pos - 1) & 1 == 1 {
            -1
        } else {
            1
        }
    }

    /// All outputs flipped.
    pub fn flipped(&self) -> Self {
        Outcome::from_mask(!self.mask & low_bits(self.n), self.n)
    }

    /// Whether the string contains consecutive `+,-,+` (cyclically when
    /// `cyclic` is set).
    pub fn contains_forbidden(&self, cyclic: bool) -> bool {
        mask_contains_forbidden(self.mask, self.n, cyclic)
    }
}

impl fmt::Display for Outcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for j in 0..self.n {
            write!(f, "{}", if self.mask >> j & 1 == 1 { '-' } else { '+' })?;
        }
        Ok(())
    }
}

impl FromStr for Outcome {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s.is_empty() || s.len() > 32 {
            return Err(Error::Parse(format!("bad outcome length {}", s.len())));
        }
        let mut mask = 0u32;
        for (i, c) in s.chars().enumerate() {
            match c {
                '+' => {}
                '-' => mask |= 1 << i,
                other => return Err(Error::Parse(format!("bad outcome character {other:?}"))),
            }
        }
        Ok(Outcome::from_mask(mask, s.len()))
    }
}

/// Mask with the lowest `k` bits set.
pub fn low_bits(k: usize) -> u32 {
    if k >= 32 {
        u32::MAX
    } else {
        (1u32 << k) - 1
    }
}

/// Sign of the product of outputs selected by a mask: true for `+1`.
pub fn parity_plus(mask: u32) -> bool {
    mask.count_ones() % 2 == 0
}

pub(crate) fn mask_contains_forbidden(mask: u32, n: usize, cyclic: bool) -> bool {
    if n < 3 {
        return false;
    }
    let window_count = if cyclic { n } else { n - 2 };
    for j in 0..window_count {
        let a = mask >> (j % n) & 1;
        let b = mask >> ((j + 1) % n) & 1;
        let c = mask >> ((j + 2) % n) & 1;
        if a == 0 && b == 1 && c == 0 {
            return true;
        }
    }
    false
}

/// Maximal blocks of consecutive positions in a subset, or the full cycle.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum RunDecomposition {
    /// Run lengths in position order (wrap-around runs merged on a loop).
    Runs(Vec<usize>),
    /// The whole loop: its weight is the loop correlator, not a product.
    FullCycle,
}

/// Splits a subset of box positions into maximal consecutive runs;
/// consecutive means modulo `n` on a loop.
pub fn run_decompose(topology: Topology, subset: u32) -> RunDecomposition {
    let n = topology.n();
    debug_assert!(u64::from(subset) < (1u64 << n));
    match topology {
        Topology::Line(_) => RunDecomposition::Runs(linear_runs(subset, n)),
        Topology::Loop(_) => {
            if subset == low_bits(n) {
                return RunDecomposition::FullCycle;
            }
            if subset == 0 {
                return RunDecomposition::Runs(Vec::new());
            }
            // rotate so position 0 is a gap, then scan linearly
            let mut r = 0;
            while subset >> r & 1 == 1 {
                r += 1;
            }
            let rotated = ((subset >> r) | (subset << (n - r))) & low_bits(n);
            RunDecomposition::Runs(linear_runs(rotated, n))
        }
    }
}

fn linear_runs(subset: u32, n: usize) -> Vec<usize> {
    let mut runs = Vec::new();
    let mut i = 0;
    while i < n {
        if subset >> i & 1 == 1 {
            let start = i;
            while i < n && subset >> i & 1 == 1 {
                i += 1;
            }
            runs.push(i - start);
        } else {
            i += 1;
        }
    }
    runs
}

/// Exact weight of a subset: product of `E_len` over its runs (zero as
/// soon as a run has length 1), or `E_n^o` for the full cycle. The empty
/// subset has weight 1.
pub fn subset_weight(topology: Topology, subset: u32, table: &CorrelatorTable) -> Result<QuadExt> {
    table.check_len(topology.n())?;
    Ok(match run_decompose(topology, subset) {
        RunDecomposition::FullCycle => table.loop_corr(topology.n()).clone(),
        RunDecomposition::Runs(runs) => {
            let mut w = QuadExt::one();
            for len in runs {
                if table.line(len).is_zero() {
                    return Ok(QuadExt::zero());
                }
                w = w * table.line(len);
            }
            w
        }
    })
}

/// Correlator source for the weight engines: `E_len` per run length.
pub trait LineWeights<C> {
    fn line_weight(&self, len: usize) -> C;
    fn max_line_len(&self) -> usize;
}

/// Adds the full-cycle correlator `E_n^o`.
pub trait LoopWeights<C>: LineWeights<C> {
    fn loop_weight(&self, n: usize) -> C;
}

/// q-values of all prefixes `x_1..x_m`, `0 <= m <= n`, by the recursion
/// over the run ending at the last position:
/// `q_m = q_{m-1} + X_m (E_m + sum_{k=0}^{m-2} X_{k+1} q_k E_{m-1-k})`
/// where `X_j` is the product of the first `j` signs.
pub fn line_q_prefixes<C: Coeff, W: LineWeights<C>>(mask: u32, n: usize, weights: &W) -> Vec<C> {
    debug_assert!(n <= weights.max_line_len());
    let e: Vec<C> = std::iter::once(C::one())
        .chain((1..=n).map(|k| weights.line_weight(k)))
        .collect();
    let mut q: Vec<C> = Vec::with_capacity(n + 1);
    q.push(C::one());
    for m in 1..=n {
        let mut acc = e[m].clone();
        for k in 0..m.saturating_sub(1) {
            let len = m - 1 - k;
            if e[len].is_zero() {
                continue;
            }
            let prod = q[k].clone() * e[len].clone();
            acc = if parity_plus(mask & low_bits(k + 1)) { acc + prod } else { acc - prod };
        }
        let prev = q[m - 1].clone();
        q.push(if parity_plus(mask & low_bits(m)) { prev + acc } else { prev - acc });
    }
    q
}

/// q-value of one line outcome, `O(n^2)`.
pub fn line_q<C: Coeff, W: LineWeights<C>>(mask: u32, n: usize, weights: &W) -> C {
    line_q_prefixes(mask, n, weights).pop().expect("prefix list is never empty")
}

/// Arc through a fixed position: mask, arc length, interior segment.
struct LoopArc {
    arc_mask: u32,
    len: usize,
    interior_start: usize,
    interior_len: usize,
}

fn loop_arcs(n: usize) -> Vec<LoopArc> {
    let mut arcs = Vec::new();
    for len in 2..n {
        // the arc covers positions start..start+len (mod n) and contains 0
        for t in 0..len {
            let start = (n - t) % n;
            let mut arc_mask = 0u32;
            for i in 0..len {
                arc_mask |= 1 << ((start + i) % n);
            }
            let interior_len = n.saturating_sub(len + 2);
            arcs.push(LoopArc {
                arc_mask,
                len,
                interior_start: (start + len + 1) % n,
                interior_len,
            });
        }
    }
    arcs
}

fn extract_cyclic(mask: u32, n: usize, start: usize, len: usize) -> u32 {
    let mut seg = 0u32;
    for i in 0..len {
        if mask >> ((start + i) % n) & 1 == 1 {
            seg |= 1 << i;
        }
    }
    seg
}

/// q-value of one loop outcome by conditioning on the arc that covers
/// position 1 (or its absence), plus the full-cycle term.
pub fn loop_q<C: Coeff, W: LoopWeights<C>>(mask: u32, n: usize, weights: &W) -> C {
    assert!(n >= 1);
    // subsets avoiding position 1 live on the open line 2..n
    let mut acc = line_q(mask >> 1, n - 1, weights);
    for arc in loop_arcs(n) {
        let e = weights.line_weight(arc.len);
        if e.is_zero() {
            continue;
        }
        let inner = if arc.interior_len == 0 {
            C::one()
        } else {
            let seg = extract_cyclic(mask, n, arc.interior_start, arc.interior_len);
            line_q(seg, arc.interior_len, weights)
        };
        let prod = inner * e;
        acc = if parity_plus(mask & arc.arc_mask) { acc + prod } else { acc - prod };
    }
    let full = weights.loop_weight(n);
    if parity_plus(mask) {
        acc + full
    } else {
        acc - full
    }
}

const DENSE_MAX_N: usize = 26;

/// Dense q-tables for all line sizes `0..=n`, sharing prefix values
/// across outcomes (each table indexed by outcome mask).
pub fn dense_line_tables<C: Coeff, W: LineWeights<C>>(n: usize, weights: &W) -> Vec<Vec<C>> {
    assert!(n <= DENSE_MAX_N, "dense enumeration supports n <= {DENSE_MAX_N}");
    let e: Vec<C> = std::iter::once(C::one())
        .chain((1..=n).map(|k| weights.line_weight(k)))
        .collect();
    let mut tables: Vec<Vec<C>> = Vec::with_capacity(n + 1);
    tables.push(vec![C::one()]);
    for m in 1..=n {
        let mut table = Vec::with_capacity(1 << m);
        for mask in 0..(1u32 << m) {
            let mut acc = e[m].clone();
            for k in 0..m.saturating_sub(1) {
                let len = m - 1 - k;
                if e[len].is_zero() {
                    continue;
                }
                let q_k = &tables[k][(mask & low_bits(k)) as usize];
                if q_k.is_zero() {
                    continue;
                }
                let prod = q_k.clone() * e[len].clone();
                acc = if parity_plus(mask & low_bits(k + 1)) { acc + prod } else { acc - prod };
            }
            let prev = tables[m - 1][(mask & low_bits(m - 1)) as usize].clone();
            table.push(if parity_plus(mask) { prev + acc } else { prev - acc });
        }
        tables.push(table);
    }
    tables
}

/// Dense q-table over all `2^n` line outcomes.
pub fn dense_line<C: Coeff, W: LineWeights<C>>(n: usize, weights: &W) -> Vec<C> {
    dense_line_tables(n, weights).pop().expect("tables are never empty")
}

/// Dense q-table over all `2^n` loop outcomes, reusing dense line tables
/// for the arc interiors.
pub fn dense_loop<C: Coeff, W: LoopWeights<C>>(n: usize, weights: &W) -> Vec<C> {
    assert!(n >= 1 && n <= DENSE_MAX_N);
    let tables = dense_line_tables(n - 1, weights);
    let arcs = loop_arcs(n);
    let arc_weights: Vec<Option<C>> = arcs
        .iter()
        .map(|arc| {
            let e = weights.line_weight(arc.len);
            if e.is_zero() {
                None
            } else {
                Some(e)
            }
        })
        .collect();
    let full = weights.loop_weight(n);
    let mut out = Vec::with_capacity(1 << n);
    for mask in 0..(1u32 << n) {
        let mut acc = tables[n - 1][(mask >> 1) as usize].clone();
        for (arc, e) in arcs.iter().zip(&arc_weights) {
            let Some(e) = e else { continue };
            let inner = if arc.interior_len == 0 {
                C::one()
            } else {
                let seg = extract_cyclic(mask, n, arc.interior_start, arc.interior_len);
                tables[arc.interior_len][seg as usize].clone()
            };
            if inner.is_zero() {
                continue;
            }
            let prod = inner * e.clone();
            acc = if parity_plus(mask & arc.arc_mask) { acc + prod } else { acc - prod };
        }
        out.push(if parity_plus(mask) { acc + full.clone() } else { acc - full.clone() });
    }
    out
}

/// Exact q-value of a single outcome (no enumeration limit applies).
pub fn q_value(topology: Topology, outcome: &Outcome, table: &CorrelatorTable) -> Result<QuadExt> {
    assert_eq!(outcome.n(), topology.n(), "outcome length must match the topology");
    table.check_len(topology.n())?;
    Ok(match topology {
        Topology::Line(n) => line_q(outcome.mask(), n, table),
        Topology::Loop(n) => loop_q(outcome.mask(), n, table),
    })
}

/// Dense exact distribution: `q(x) = 2^n p(x)` for every outcome mask.
#[derive(Clone, Debug)]
pub struct ExactDistribution {
    topology: Topology,
    q: Vec<QuadExt>,
}

impl ExactDistribution {
    pub fn build(topology: Topology, table: &CorrelatorTable) -> Result<Self> {
        Self::build_with_limit(topology, table, DEFAULT_ENUM_LIMIT)
    }

    pub fn build_with_limit(
        topology: Topology,
        table: &CorrelatorTable,
        limit: usize,
    ) -> Result<Self> {
        let n = topology.n();
        assert!(n >= 1);
        if n > limit.min(DENSE_MAX_N) {
            return Err(Error::EnumerationLimit { n, limit: limit.min(DENSE_MAX_N) });
        }
        table.check_len(n)?;
        let q = match topology {
            Topology::Line(n) => dense_line(n, table),
            Topology::Loop(n) => dense_loop(n, table),
        };
        Ok(ExactDistribution { topology, q })
    }

    pub fn topology(&self) -> Topology {
        self.topology
    }

    pub fn n(&self) -> usize {
        self.topology.n()
    }

    pub fn q(&self, mask: u32) -> &QuadExt {
        &self.q[mask as usize]
    }

    pub fn len(&self) -> usize {
        self.q.len()
    }

    pub fn is_empty(&self) -> bool {
        self.q.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (Outcome, &QuadExt)> {
        let n = self.n();
        self.q.iter().enumerate().map(move |(mask, q)| (Outcome::from_mask(mask as u32, n), q))
    }

    /// Probability `p(x) = q(x) / 2^n` as the exact rational-coefficient
    /// element.
    pub fn p_exact(&self, mask: u32) -> QuadExt {
        let scale = crate::Rational::new(1.into(), crate::Int::from(1u8) << self.n());
        self.q(mask).scale(&scale)
    }

    pub fn p_float(&self, mask: u32) -> Result<f64> {
        Ok(self.q(mask).to_f64()? / (1u64 << self.n()) as f64)
    }

    /// `q'(x) = q(-x)`: the distribution under flipping all outputs.
    pub fn flip_outputs(&self) -> Self {
        let n = self.n();
        let q = (0..self.q.len())
            .map(|mask| self.q[(!(mask as u32)) as usize & low_bits(n) as usize].clone())
            .collect();
        ExactDistribution { topology: self.topology, q }
    }

    /// Exact `sum_x q(x)`; equals `2^n` for any weight table.
    pub fn total(&self) -> QuadExt {
        let mut t = QuadExt::zero();
        for v in &self.q {
            t = t + v;
        }
        t
    }

    /// Exact `sum_x x_pos q(x)` (1-based position).
    pub fn marginal(&self, pos: usize) -> QuadExt {
        self.window_sum(1 << (pos - 1))
    }

    /// Exact `sum_x (prod_{j in W} x_j) q(x)` for a window mask.
    pub fn window_sum(&self, window: u32) -> QuadExt {
        let mut t = QuadExt::zero();
        for (mask, v) in self.q.iter().enumerate() {
            t = if parity_plus(mask as u32 & window) { t + v } else { t - v };
        }
        t
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::correlators::FlippedWeights;

    fn table(n: usize) -> CorrelatorTable {
        CorrelatorTable::standard(n)
    }

    fn q(a: i64, b: i64) -> QuadExt {
        QuadExt::from_ints(a, b)
    }

    fn mask_of(s: &str) -> u32 {
        s.parse::<Outcome>().unwrap().mask()
    }

    #[test]
    fn run_decomposition() {
        // positions {1,2,4,5} on a 5-line -> runs [2,2]
        assert_eq!(
            run_decompose(Topology::Line(5), 0b11011),
            RunDecomposition::Runs(vec![2, 2])
        );
        // positions {1,3} on a 3-line -> runs [1,1]
        assert_eq!(run_decompose(Topology::Line(3), 0b101), RunDecomposition::Runs(vec![1, 1]));
        // full 4-loop
        assert_eq!(run_decompose(Topology::Loop(4), 0b1111), RunDecomposition::FullCycle);
        // positions {4,1} on a 4-loop wrap into one run of 2
        assert_eq!(run_decompose(Topology::Loop(4), 0b1001), RunDecomposition::Runs(vec![2]));
        assert_eq!(run_decompose(Topology::Loop(4), 0), RunDecomposition::Runs(vec![]));
    }

    #[test]
    fn subset_weights() {
        let t = table(5);
        assert_eq!(subset_weight(Topology::Line(5), 0b11011, &t).unwrap(), q(3, -2));
        assert_eq!(subset_weight(Topology::Line(3), 0b101, &t).unwrap(), QuadExt::zero());
        assert_eq!(subset_weight(Topology::Loop(4), 0b1111, &t).unwrap(), q(-5, 4));
        assert_eq!(subset_weight(Topology::Line(4), 0, &t).unwrap(), QuadExt::one());
        assert!(matches!(
            subset_weight(Topology::Line(7), 0b1111111, &table(5)),
            Err(Error::TableTooSmall { .. })
        ));
    }

    #[test]
    fn line_q_examples() {
        let t = table(3);
        assert_eq!(line_q(mask_of("+-+"), 3, &t), QuadExt::zero());
        assert_eq!(line_q(mask_of("+++"), 3, &t), q(2, 0));
        assert_eq!(line_q(mask_of("++-"), 3, &t), q(-2, 2)); // 2*sqrt2 - 2
    }

    #[test]
    fn loop_q_examples() {
        let t = table(4);
        assert_eq!(loop_q(mask_of("+-"), 2, &t), QuadExt::zero());
        assert_eq!(loop_q(mask_of("++"), 2, &t), q(2, 0));
        assert_eq!(loop_q(mask_of("--"), 2, &t), q(2, 0));
    }

    #[test]
    fn one_box_distributions() {
        let t = table(1);
        let line = ExactDistribution::build(Topology::Line(1), &t).unwrap();
        assert_eq!(line.q(0), &QuadExt::one());
        assert_eq!(line.q(1), &QuadExt::one());
        let lp = ExactDistribution::build(Topology::Loop(1), &t).unwrap();
        assert_eq!(lp.q(0), &QuadExt::one());
        assert_eq!(lp.q(1), &QuadExt::one());
    }

    #[test]
    fn two_box_loop_is_deterministic_parity() {
        let d = ExactDistribution::build(Topology::Loop(2), &table(2)).unwrap();
        assert_eq!(d.q(mask_of("++")), &q(2, 0));
        assert_eq!(d.q(mask_of("--")), &q(2, 0));
        assert_eq!(d.q(mask_of("+-")), &QuadExt::zero());
        assert_eq!(d.q(mask_of("-+")), &QuadExt::zero());
    }

    #[test]
    fn four_box_line_normalizes() {
        let d = ExactDistribution::build(Topology::Line(4), &table(4)).unwrap();
        assert_eq!(d.len(), 16);
        assert_eq!(d.total(), q(16, 0));
    }

    #[test]
    fn enumeration_limit_is_enforced() {
        let t = table(20);
        assert!(matches!(
            ExactDistribution::build_with_limit(Topology::Line(18), &t, 16),
            Err(Error::EnumerationLimit { n: 18, limit: 16 })
        ));
        // per-outcome values stay available beyond the limit
        let v = q_value(Topology::Line(20), &Outcome::all_plus(20), &t).unwrap();
        assert_eq!(v, QuadExt::sqrt2_pow(19));
    }

    #[test]
    fn flip_outputs_matches_negated_table() {
        let t = table(5);
        let d = ExactDistribution::build(Topology::Line(5), &t).unwrap();
        let flipped = d.flip_outputs();
        assert_eq!(flipped.q(mask_of("-+-+-")), d.q(mask_of("+-+-+")));
        assert_eq!(flipped.q(mask_of("+-+-+")), &QuadExt::zero());
        let rebuilt = dense_line(5, &FlippedWeights(&t));
        for mask in 0..32u32 {
            assert_eq!(flipped.q(mask), &rebuilt[mask as usize]);
        }
        // with two boxes only even correlators appear, so nothing changes
        let d2 = ExactDistribution::build(Topology::Line(2), &t).unwrap();
        let f2 = d2.flip_outputs();
        for mask in 0..4u32 {
            assert_eq!(d2.q(mask), f2.q(mask));
        }
        // loops flip the full-cycle correlator at odd n as well
        let d5 = ExactDistribution::build(Topology::Loop(5), &t).unwrap();
        let rebuilt5 = dense_loop(5, &FlippedWeights(&t));
        let f5 = d5.flip_outputs();
        for mask in 0..32u32 {
            assert_eq!(f5.q(mask), &rebuilt5[mask as usize]);
        }
    }

    #[test]
    fn outcome_text_round_trip() {
        let o: Outcome = "+-+".parse().unwrap();
        assert_eq!(o.to_string(), "+-+");
        assert_eq!(o.sign(1), 1);
        assert_eq!(o.sign(2), -1);
        assert!(o.contains_forbidden(false));
        assert!(!"++--".parse::<Outcome>().unwrap().contains_forbidden(false));
        // the pattern sits across the wrap: (x4, x1, x2) = (+, -, +)
        assert!(!"-+++".parse::<Outcome>().unwrap().contains_forbidden(false));
        assert!("-+++".parse::<Outcome>().unwrap().contains_forbidden(true));
        assert!("x".parse::<Outcome>().is_err());
    }
}
