//! Dense two-phase simplex with Bland's anti-cycling rule.
//!
//! Problems are stated as `maximize c·x subject to rows, x >= 0`, where each
//! row is `a·x (<= | = | >=) b`. Every row gets one identity column in the
//! initial tableau (its slack for `<=` rows, an artificial otherwise); the
//! reduced costs of those columns at the optimum are the row duals.

use crate::error::{Error, Result};

/// Pivot tolerance: entries and reduced costs smaller than this are zero.
pub const PIVOT_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Relation {
    Le,
    Eq,
    Ge,
}

#[derive(Debug, Clone)]
pub struct Constraint {
    pub coeffs: Vec<f64>,
    pub relation: Relation,
    pub rhs: f64,
}

#[derive(Debug, Clone, Default)]
pub struct LinearProgram {
    pub objective: Vec<f64>,
    pub constraints: Vec<Constraint>,
}

impl LinearProgram {
    pub fn new(objective: Vec<f64>) -> Self {
        LinearProgram {
            objective,
            constraints: Vec::new(),
        }
    }

    pub fn add(&mut self, coeffs: Vec<f64>, relation: Relation, rhs: f64) -> &mut Self {
        self.constraints.push(Constraint {
            coeffs,
            relation,
            rhs,
        });
        self
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LpSolution {
    pub x: Vec<f64>,
    pub objective: f64,
    /// One dual per constraint, in the orientation the constraint was given.
    pub duals: Vec<f64>,
    pub pivots: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub enum LpOutcome {
    Optimal(LpSolution),
    Infeasible,
    Unbounded,
}

struct Tableau {
    rows: usize,
    cols: usize,
    // rows x (cols + 1); last column is the right-hand side.
    a: Vec<f64>,
    basis: Vec<usize>,
    // Columns that may never enter (artificials once phase 1 is over).
    blocked: Vec<bool>,
    pivots: usize,
    max_pivots: usize,
}

impl Tableau {
    #[inline]
    fn at(&self, r: usize, c: usize) -> f64 {
        self.a[r * (self.cols + 1) + c]
    }

    #[inline]
    fn rhs(&self, r: usize) -> f64 {
        self.a[r * (self.cols + 1) + self.cols]
    }

    fn pivot(&mut self, pr: usize, pc: usize) {
        let w = self.cols + 1;
        let piv = self.at(pr, pc);
        for c in 0..w {
            self.a[pr * w + c] /= piv;
        }
        self.a[pr * w + pc] = 1.0;
        for r in 0..self.rows {
            if r == pr {
                continue;
            }
            let f = self.a[r * w + pc];
            if f == 0.0 {
                continue;
            }
            for c in 0..w {
                let v = self.a[pr * w + c];
                if v != 0.0 {
                    self.a[r * w + c] -= f * v;
                }
            }
            self.a[r * w + pc] = 0.0;
        }
        self.basis[pr] = pc;
        self.pivots += 1;
    }

    /// Reduced profits `c_j - c_B B^{-1} A_j` for every column.
    fn reduced(&self, cost: &[f64]) -> Vec<f64> {
        let mut r = cost.to_vec();
        for (row, &b) in self.basis.iter().enumerate() {
            let cb = cost[b];
            if cb == 0.0 {
                continue;
            }
            for (c, rc) in r.iter_mut().enumerate() {
                *rc -= cb * self.at(row, c);
            }
        }
        r
    }

    /// Runs primal simplex on `cost` (maximization). Returns `false` when
    /// the objective is unbounded.
    fn optimize(&mut self, cost: &[f64]) -> Result<bool> {
        loop {
            if self.pivots > self.max_pivots {
                return Err(Error::Numerical(format!(
                    "simplex exceeded {} pivots on a {}x{} tableau",
                    self.max_pivots, self.rows, self.cols
                )));
            }
            let reduced = self.reduced(cost);
            // Bland: lowest-index improving column.
            let Some(enter) = (0..self.cols).find(|&c| !self.blocked[c] && reduced[c] > PIVOT_TOL) else {
                return Ok(true);
            };
            // Bland: among minimum ratios, the row whose basic variable has
            // the lowest index.
            let mut leave: Option<(usize, f64)> = None;
            for r in 0..self.rows {
                let a = self.at(r, enter);
                if a <= PIVOT_TOL {
                    continue;
                }
                let ratio = self.rhs(r).max(0.0) / a;
                leave = match leave {
                    None => Some((r, ratio)),
                    Some((lr, lratio)) => {
                        let tie = (ratio - lratio).abs() <= PIVOT_TOL * (1.0 + lratio.abs());
                        if (tie && self.basis[r] < self.basis[lr]) || (!tie && ratio < lratio) {
                            Some((r, ratio))
                        } else {
                            Some((lr, lratio))
                        }
                    }
                };
            }
            match leave {
                None => return Ok(false),
                Some((r, _)) => self.pivot(r, enter),
            }
        }
    }
}

/// Solves `lp` to optimality, detecting infeasibility and unboundedness.
pub fn solve_lp(lp: &LinearProgram) -> Result<LpOutcome> {
    let n = lp.objective.len();
    let rows = lp.constraints.len();
    for (k, c) in lp.constraints.iter().enumerate() {
        if c.coeffs.len() != n {
            return Err(Error::Dimension {
                what: "constraint coefficients",
                expected: n,
                got: c.coeffs.len(),
            });
        }
        if !c.rhs.is_finite() || c.coeffs.iter().any(|x| !x.is_finite()) {
            return Err(Error::Numerical(format!("constraint {k} has non-finite data")));
        }
    }
    if lp.objective.iter().any(|x| !x.is_finite()) {
        return Err(Error::Numerical("objective has non-finite data".into()));
    }

    // Normalize to non-negative right-hand sides.
    let mut flipped = vec![false; rows];
    let mut rel = Vec::with_capacity(rows);
    for (k, c) in lp.constraints.iter().enumerate() {
        let mut r = c.relation;
        if c.rhs < 0.0 {
            flipped[k] = true;
            r = match r {
                Relation::Le => Relation::Ge,
                Relation::Ge => Relation::Le,
                Relation::Eq => Relation::Eq,
            };
        }
        rel.push(r);
    }

    // Column layout: structural | surplus (one per >= row) | identity (one per row).
    let n_surplus = rel.iter().filter(|r| **r == Relation::Ge).count();
    let ident0 = n + n_surplus;
    let cols = ident0 + rows;
    let w = cols + 1;
    let mut a = vec![0.0; rows * w];
    let mut surplus_col = n;
    let mut artificial = vec![false; cols];
    for (k, c) in lp.constraints.iter().enumerate() {
        let sign = if flipped[k] { -1.0 } else { 1.0 };
        for j in 0..n {
            a[k * w + j] = sign * c.coeffs[j];
        }
        if rel[k] == Relation::Ge {
            a[k * w + surplus_col] = -1.0;
            surplus_col += 1;
        }
        a[k * w + ident0 + k] = 1.0;
        if rel[k] != Relation::Le {
            artificial[ident0 + k] = true;
        }
        a[k * w + cols] = sign * c.rhs;
    }
    let mut t = Tableau {
        rows,
        cols,
        a,
        basis: (ident0..ident0 + rows).collect(),
        blocked: vec![false; cols],
        pivots: 0,
        max_pivots: 1000 + 50 * (rows + cols),
    };

    if artificial.iter().any(|&x| x) {
        let phase1: Vec<f64> = artificial.iter().map(|&x| if x { -1.0 } else { 0.0 }).collect();
        t.optimize(&phase1)?;
        let infeas: f64 = t
            .basis
            .iter()
            .enumerate()
            .filter(|(_, &b)| artificial[b])
            .map(|(r, _)| t.rhs(r))
            .sum();
        let scale = 1.0 + lp.constraints.iter().map(|c| c.rhs.abs()).fold(0.0, f64::max);
        if infeas > 1e-9 * scale {
            return Ok(LpOutcome::Infeasible);
        }
        // Drive zero-level artificials out of the basis where possible.
        for r in 0..rows {
            if !artificial[t.basis[r]] {
                continue;
            }
            if let Some(c) = (0..cols).find(|&c| !artificial[c] && t.at(r, c).abs() > PIVOT_TOL) {
                t.pivot(r, c);
            }
        }
        for (c, art) in artificial.iter().enumerate() {
            t.blocked[c] = *art;
        }
    }

    let mut cost = vec![0.0; cols];
    cost[..n].copy_from_slice(&lp.objective);
    if !t.optimize(&cost)? {
        return Ok(LpOutcome::Unbounded);
    }

    let mut x = vec![0.0; n];
    for (r, &b) in t.basis.iter().enumerate() {
        if b < n {
            x[b] = t.rhs(r).max(0.0);
        }
    }
    let reduced = t.reduced(&cost);
    let duals = (0..rows)
        .map(|k| {
            let y = -reduced[ident0 + k];
            if flipped[k] {
                -y
            } else {
                y
            }
        })
        .collect();
    let objective = lp.objective.iter().zip(&x).map(|(c, v)| c * v).sum();
    Ok(LpOutcome::Optimal(LpSolution {
        x,
        objective,
        duals,
        pivots: t.pivots,
    }))
}
