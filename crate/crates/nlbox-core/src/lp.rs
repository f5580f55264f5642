//! Dense two-phase simplex over an ordered-field scalar.
//!
//! One implementation serves three scalar types: `BigRational` for exact
//! rational programs (the hexagon bound), [`QuadExt`](crate::QuadExt) for
//! programs whose data lives in `Q[sqrt(2)]` (the certificate search), and
//! `f64` for tolerance-qualified float verdicts. Bland's rule keeps
//! degenerate pivoting finite, which exact arithmetic then turns into
//! exact verdicts.

use crate::scalar::LpScalar;
use crate::{Error, Rational, Result};

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Relation {
    Le,
    Eq,
    Ge,
}

impl Relation {
    fn flipped(self) -> Self {
        match self {
            Relation::Le => Relation::Ge,
            Relation::Eq => Relation::Eq,
            Relation::Ge => Relation::Le,
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Direction {
    Maximize,
    Minimize,
}

#[derive(Clone, Debug)]
struct Constraint<S> {
    coeffs: Vec<(usize, S)>,
    relation: Relation,
    rhs: S,
}

/// A linear program over named variables; free unless declared
/// non-negative.
#[derive(Clone, Debug, Default)]
pub struct LinearProgram<S> {
    names: Vec<String>,
    nonneg: Vec<bool>,
    constraints: Vec<Constraint<S>>,
    objective: Option<(Vec<(usize, S)>, Direction)>,
}

/// Solver verdict. In exact modes (`BigRational`, `QuadExt`) the verdict
/// is exact; in `f64` mode it is qualified by the pivot tolerance.
#[derive(Clone, Debug)]
pub enum LpResult<S> {
    Feasible {
        assignment: Vec<S>,
        objective: Option<S>,
    },
    Infeasible {
        /// Row multipliers combining the constraints into a contradiction,
        /// in constraint order (for rows whose right-hand side was negated
        /// during normalization the multiplier applies to the negated row).
        farkas: Vec<S>,
        /// Exact (or tolerance-checked) validation of the ray against the
        /// normalized constraint matrix.
        farkas_valid: bool,
    },
    Unbounded,
}

impl<S> LpResult<S> {
    pub fn is_feasible(&self) -> bool {
        matches!(self, LpResult::Feasible { .. })
    }
}

impl<S: LpScalar> LinearProgram<S> {
    pub fn new() -> Self {
        LinearProgram {
            names: Vec::new(),
            nonneg: Vec::new(),
            constraints: Vec::new(),
            objective: None,
        }
    }

    pub fn add_var(&mut self, name: impl Into<String>, nonneg: bool) -> usize {
        self.names.push(name.into());
        self.nonneg.push(nonneg);
        self.names.len() - 1
    }

    pub fn num_vars(&self) -> usize {
        self.names.len()
    }

    pub fn var_name(&self, i: usize) -> &str {
        &self.names[i]
    }

    pub fn constrain(&mut self, coeffs: Vec<(usize, S)>, relation: Relation, rhs: S) {
        for &(v, _) in &coeffs {
            assert!(v < self.names.len(), "constraint references undeclared variable {v}");
        }
        self.constraints.push(Constraint { coeffs, relation, rhs });
    }

    pub fn set_objective(&mut self, coeffs: Vec<(usize, S)>, direction: Direction) {
        for &(v, _) in &coeffs {
            assert!(v < self.names.len(), "objective references undeclared variable {v}");
        }
        self.objective = Some((coeffs, direction));
    }

    /// Re-instantiate the same program at another scalar type.
    pub fn map_scalar<T: LpScalar>(&self, f: impl Fn(&S) -> T) -> LinearProgram<T> {
        LinearProgram {
            names: self.names.clone(),
            nonneg: self.nonneg.clone(),
            constraints: self
                .constraints
                .iter()
                .map(|c| Constraint {
                    coeffs: c.coeffs.iter().map(|(v, s)| (*v, f(s))).collect(),
                    relation: c.relation,
                    rhs: f(&c.rhs),
                })
                .collect(),
            objective: self
                .objective
                .as_ref()
                .map(|(coeffs, d)| (coeffs.iter().map(|(v, s)| (*v, f(s))).collect(), *d)),
        }
    }

    pub fn solve(&self) -> Result<LpResult<S>> {
        Simplex::build(self).run(self)
    }
}

impl LinearProgram<Rational> {
    /// Float instance of an exact rational program.
    pub fn to_f64(&self) -> LinearProgram<f64> {
        self.map_scalar(f64::from_rational)
    }
}

const MAX_PIVOTS: usize = 200_000;

struct Simplex<S> {
    rows: Vec<Vec<S>>,
    rhs: Vec<S>,
    basis: Vec<usize>,
    cost: Vec<S>,
    /// Structural column(s) per variable: (positive part, negative part).
    var_cols: Vec<(usize, Option<usize>)>,
    n_real: usize,
    n_total: usize,
    /// Initial normalized matrix, kept for Farkas validation.
    a0: Vec<Vec<S>>,
    b0: Vec<S>,
}

impl<S: LpScalar> Simplex<S> {
    fn build(lp: &LinearProgram<S>) -> Self {
        let mut var_cols = Vec::with_capacity(lp.names.len());
        let mut n_struct = 0usize;
        for &nn in &lp.nonneg {
            if nn {
                var_cols.push((n_struct, None));
                n_struct += 1;
            } else {
                var_cols.push((n_struct, Some(n_struct + 1)));
                n_struct += 2;
            }
        }
        let m = lp.constraints.len();
        let n_slack = lp.constraints.iter().filter(|c| c.relation != Relation::Eq).count();
        let n_real = n_struct + n_slack;
        let n_total = n_real + m;

        let mut rows = vec![vec![S::zero(); n_total]; m];
        let mut rhs = Vec::with_capacity(m);
        let mut slack_at = n_struct;
        for (i, c) in lp.constraints.iter().enumerate() {
            for (v, coef) in &c.coeffs {
                let (pos, neg) = var_cols[*v];
                rows[i][pos] = rows[i][pos].clone() + coef.clone();
                if let Some(neg) = neg {
                    rows[i][neg] = rows[i][neg].clone() - coef.clone();
                }
            }
            let mut relation = c.relation;
            let mut b = c.rhs.clone();
            if b < S::zero() {
                for e in rows[i].iter_mut().take(n_struct) {
                    *e = -e.clone();
                }
                b = -b;
                relation = relation.flipped();
            }
            match relation {
                Relation::Le => {
                    rows[i][slack_at] = S::one();
                    slack_at += 1;
                }
                Relation::Ge => {
                    rows[i][slack_at] = -S::one();
                    slack_at += 1;
                }
                Relation::Eq => {}
            }
            rows[i][n_real + i] = S::one();
            rhs.push(b);
        }

        let a0 = rows.iter().map(|r| r[..n_real].to_vec()).collect();
        let b0 = rhs.clone();
        Simplex {
            basis: (0..m).map(|i| n_real + i).collect(),
            cost: vec![S::zero(); n_total],
            rows,
            rhs,
            var_cols,
            n_real,
            n_total,
            a0,
            b0,
        }
    }

    fn pivot(&mut self, row: usize, col: usize) {
        let p = self.rows[row][col].clone();
        for e in self.rows[row].iter_mut() {
            *e = e.clone() / p.clone();
        }
        self.rhs[row] = self.rhs[row].clone() / p;
        for i in 0..self.rows.len() {
            if i == row {
                continue;
            }
            let factor = self.rows[i][col].clone();
            if factor.is_zero() {
                continue;
            }
            for j in 0..self.n_total {
                if !self.rows[row][j].is_zero() {
                    self.rows[i][j] =
                        self.rows[i][j].clone() - factor.clone() * self.rows[row][j].clone();
                }
            }
            self.rhs[i] = self.rhs[i].clone() - factor * self.rhs[row].clone();
        }
        let factor = self.cost[col].clone();
        if !factor.is_zero() {
            for j in 0..self.n_total {
                if !self.rows[row][j].is_zero() {
                    self.cost[j] = self.cost[j].clone() - factor.clone() * self.rows[row][j].clone();
                }
            }
        }
        self.basis[row] = col;
    }

    /// Bland's rule iteration over the allowed column range; returns false
    /// on unboundedness.
    fn iterate(&mut self, allowed_cols: usize) -> Result<bool> {
        for _ in 0..MAX_PIVOTS {
            let entering = (0..allowed_cols).find(|&j| self.cost[j].is_neg());
            let Some(col) = entering else { return Ok(true) };
            let mut leave: Option<usize> = None;
            for i in 0..self.rows.len() {
                if !self.rows[i][col].is_pos() {
                    continue;
                }
                let better = match leave {
                    None => true,
                    Some(r) => {
                        let lhs = self.rhs[i].clone() * self.rows[r][col].clone();
                        let rhs = self.rhs[r].clone() * self.rows[i][col].clone();
                        if lhs < rhs {
                            true
                        } else if lhs == rhs {
                            self.basis[i] < self.basis[r]
                        } else {
                            false
                        }
                    }
                };
                if better {
                    leave = Some(i);
                }
            }
            let Some(row) = leave else { return Ok(false) };
            self.pivot(row, col);
        }
        Err(Error::Lp("pivot limit exceeded".into()))
    }

    fn price_out(&mut self, costs: Vec<S>) {
        self.cost = costs;
        for i in 0..self.rows.len() {
            let cb = self.cost[self.basis[i]].clone();
            if cb.is_zero() {
                continue;
            }
            for j in 0..self.n_total {
                if !self.rows[i][j].is_zero() {
                    self.cost[j] = self.cost[j].clone() - cb.clone() * self.rows[i][j].clone();
                }
            }
        }
    }

    fn run(mut self, lp: &LinearProgram<S>) -> Result<LpResult<S>> {
        // phase 1: minimize the artificial sum
        let mut phase1 = vec![S::zero(); self.n_total];
        for c in phase1.iter_mut().skip(self.n_real) {
            *c = S::one();
        }
        self.price_out(phase1);
        if !self.iterate(self.n_total)? {
            return Err(Error::Lp("phase 1 cannot be unbounded".into()));
        }
        let mut infeasibility = S::zero();
        for i in 0..self.rows.len() {
            if self.basis[i] >= self.n_real {
                infeasibility = infeasibility + self.rhs[i].clone();
            }
        }
        if infeasibility.is_pos() {
            // Farkas ray from the artificial reduced costs: y_i = 1 - cbar_i
            let y: Vec<S> = (0..self.rows.len())
                .map(|i| S::one() - self.cost[self.n_real + i].clone())
                .collect();
            let mut valid = true;
            for j in 0..self.n_real {
                let mut dot = S::zero();
                for (i, yi) in y.iter().enumerate() {
                    dot = dot + yi.clone() * self.a0[i][j].clone();
                }
                if dot.is_pos() {
                    valid = false;
                }
            }
            let mut payoff = S::zero();
            for (i, yi) in y.iter().enumerate() {
                payoff = payoff + yi.clone() * self.b0[i].clone();
            }
            if !payoff.is_pos() {
                valid = false;
            }
            return Ok(LpResult::Infeasible { farkas: y, farkas_valid: valid });
        }

        // drive basic artificials out; drop rows that turn out redundant
        let mut row = 0;
        while row < self.rows.len() {
            if self.basis[row] >= self.n_real {
                let col = (0..self.n_real)
                    .find(|&j| self.rows[row][j].is_pos() || self.rows[row][j].is_neg());
                match col {
                    Some(col) => self.pivot(row, col),
                    None => {
                        self.rows.remove(row);
                        self.rhs.remove(row);
                        self.basis.remove(row);
                        self.a0.remove(row);
                        self.b0.remove(row);
                        continue;
                    }
                }
            }
            row += 1;
        }

        // phase 2
        if let Some((coeffs, direction)) = &lp.objective {
            let mut costs = vec![S::zero(); self.n_total];
            for (v, coef) in coeffs {
                let signed = match direction {
                    Direction::Maximize => -coef.clone(),
                    Direction::Minimize => coef.clone(),
                };
                let (pos, neg) = self.var_cols[*v];
                costs[pos] = costs[pos].clone() + signed.clone();
                if let Some(neg) = neg {
                    costs[neg] = costs[neg].clone() - signed;
                }
            }
            self.price_out(costs);
            if !self.iterate(self.n_real)? {
                return Ok(LpResult::Unbounded);
            }
        }

        // read the solution
        let mut col_values = vec![S::zero(); self.n_total];
        for i in 0..self.rows.len() {
            col_values[self.basis[i]] = self.rhs[i].clone();
        }
        let assignment: Vec<S> = self
            .var_cols
            .iter()
            .map(|&(pos, neg)| match neg {
                Some(neg) => col_values[pos].clone() - col_values[neg].clone(),
                None => col_values[pos].clone(),
            })
            .collect();
        let objective = lp.objective.as_ref().map(|(coeffs, _)| {
            let mut v = S::zero();
            for (var, coef) in coeffs {
                v = v + coef.clone() * assignment[*var].clone();
            }
            v
        });
        Ok(LpResult::Feasible { assignment, objective })
    }
}
