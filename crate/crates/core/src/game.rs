//! Finite-action games with vector payoffs and the transformations used to
//! reason about them: bilinear extension to mixed actions, scalarization
//! along a direction, and translation of the payoff function.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Sum-to-one slack below which weights are silently renormalized.
pub const RENORMALIZE_TOL: f64 = 1e-9;

/// A probability vector over one player's actions.
///
/// Cheap to clone: the weights live behind an `Arc`, so strategies can hand
/// the same action to the engine block after block without allocating.
#[derive(Clone, PartialEq)]
pub struct MixedAction(Arc<[f64]>);

impl MixedAction {
    /// Validates and (if the sum is off by at most `RENORMALIZE_TOL`)
    /// renormalizes the weights. Tiny negative entries down to `-1e-12` are
    /// clamped to zero first; they show up routinely in LP output.
    pub fn new(weights: Vec<f64>) -> Result<Self> {
        if weights.is_empty() {
            return Err(Error::MixedAction("empty weight vector".into()));
        }
        let mut w = weights;
        for (i, x) in w.iter_mut().enumerate() {
            if !x.is_finite() {
                return Err(Error::MixedAction(format!("weight {i} is not finite")));
            }
            if *x < 0.0 {
                if *x < -1e-12 {
                    return Err(Error::MixedAction(format!("weight {i} is negative: {x}")));
                }
                *x = 0.0;
            }
        }
        let sum: f64 = w.iter().sum();
        if (sum - 1.0).abs() > RENORMALIZE_TOL {
            return Err(Error::MixedAction(format!("weights sum to {sum}")));
        }
        if sum != 1.0 {
            w.iter_mut().for_each(|x| *x /= sum);
        }
        Ok(MixedAction(w.into()))
    }

    pub fn pure(n: usize, index: usize) -> Self {
        assert!(index < n, "pure action {index} out of range for {n} actions");
        let mut w = vec![0.0; n];
        w[index] = 1.0;
        MixedAction(w.into())
    }

    pub fn uniform(n: usize) -> Self {
        assert!(n > 0);
        MixedAction(vec![1.0 / n as f64; n].into())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn weights(&self) -> &[f64] {
        &self.0
    }

    /// True if both handles point at the same weights, which implies
    /// equality without comparing them.
    #[inline]
    pub fn shares(&self, other: &MixedAction) -> bool {
        Arc::ptr_eq(&self.0, &other.0)
    }

    /// Index of the action if this is a point mass.
    pub fn as_pure(&self) -> Option<usize> {
        let mut hit = None;
        for (i, &w) in self.0.iter().enumerate() {
            if w == 1.0 {
                hit = Some(i);
            } else if w != 0.0 {
                return None;
            }
        }
        hit
    }

    /// Convex combination `(1 - t) * self + t * other`.
    pub fn mix(&self, other: &MixedAction, t: f64) -> Result<Self> {
        if self.len() != other.len() {
            return Err(Error::Dimension {
                what: "mixed action",
                expected: self.len(),
                got: other.len(),
            });
        }
        let w = self
            .0
            .iter()
            .zip(other.0.iter())
            .map(|(a, b)| (1.0 - t) * a + t * b)
            .collect();
        MixedAction::new(w)
    }
}

impl fmt::Debug for MixedAction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.0.iter()).finish()
    }
}

impl Serialize for MixedAction {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.0.as_ref().serialize(s)
    }
}

impl<'de> Deserialize<'de> for MixedAction {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let w = Vec::<f64>::deserialize(d)?;
        MixedAction::new(w).map_err(serde::de::Error::custom)
    }
}

/// How a direction has been normalized, if at all.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Norm {
    Raw,
    Euclidean,
    L1,
}

/// A direction `λ` in payoff space.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Direction {
    pub lambda: Vec<f64>,
    pub norm: Norm,
}

impl Direction {
    pub fn raw(lambda: Vec<f64>) -> Self {
        Direction {
            lambda,
            norm: Norm::Raw,
        }
    }

    /// Euclidean-normalized direction; `None` for the zero vector.
    pub fn unit(lambda: &[f64]) -> Option<Self> {
        let n = norm2(lambda);
        if n == 0.0 || !n.is_finite() {
            return None;
        }
        Some(Direction {
            lambda: lambda.iter().map(|x| x / n).collect(),
            norm: Norm::Euclidean,
        })
    }

    pub fn l1_unit(lambda: &[f64]) -> Option<Self> {
        let n: f64 = lambda.iter().map(|x| x.abs()).sum();
        if n == 0.0 || !n.is_finite() {
            return None;
        }
        Some(Direction {
            lambda: lambda.iter().map(|x| x / n).collect(),
            norm: Norm::L1,
        })
    }

    pub fn dim(&self) -> usize {
        self.lambda.len()
    }

    pub fn is_zero(&self) -> bool {
        self.lambda.iter().all(|&x| x == 0.0)
    }
}

/// A scalar zero-sum game; Player 1 (rows) maximizes.
#[derive(Clone, PartialEq)]
pub struct MatrixGame {
    n1: usize,
    n2: usize,
    entries: Vec<f64>,
}

impl MatrixGame {
    pub fn new(n1: usize, n2: usize, entries: Vec<f64>) -> Result<Self> {
        if n1 == 0 || n2 == 0 {
            return Err(Error::InvalidGame("matrix game needs at least one action per player".into()));
        }
        if entries.len() != n1 * n2 {
            return Err(Error::Dimension {
                what: "matrix entries",
                expected: n1 * n2,
                got: entries.len(),
            });
        }
        if entries.iter().any(|x| !x.is_finite()) {
            return Err(Error::InvalidGame("non-finite matrix entry".into()));
        }
        Ok(MatrixGame { n1, n2, entries })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let n1 = rows.len();
        let n2 = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != n2) {
            return Err(Error::InvalidGame("ragged matrix rows".into()));
        }
        MatrixGame::new(n1, n2, rows.concat())
    }

    pub fn n1(&self) -> usize {
        self.n1
    }

    pub fn n2(&self) -> usize {
        self.n2
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.entries[i * self.n2 + j]
    }

    pub fn entries(&self) -> &[f64] {
        &self.entries
    }

    pub fn max_abs(&self) -> f64 {
        self.entries.iter().fold(0.0, |m, x| m.max(x.abs()))
    }

    /// Row player's payoff against each pure column.
    pub fn row_payoffs(&self, p: &[f64]) -> Vec<f64> {
        (0..self.n2)
            .map(|j| (0..self.n1).map(|i| p[i] * self.get(i, j)).sum())
            .collect()
    }

    /// Each pure row's payoff against the column mix `q`.
    pub fn column_payoffs(&self, q: &[f64]) -> Vec<f64> {
        (0..self.n1)
            .map(|i| (0..self.n2).map(|j| q[j] * self.get(i, j)).sum())
            .collect()
    }

    pub fn mixed_value(&self, p: &MixedAction, q: &MixedAction) -> Result<f64> {
        check_len("row mixed action", self.n1, p.len())?;
        check_len("column mixed action", self.n2, q.len())?;
        let (p, q) = (p.weights(), q.weights());
        let mut acc = 0.0;
        for i in 0..self.n1 {
            if p[i] == 0.0 {
                continue;
            }
            let mut row = 0.0;
            for j in 0..self.n2 {
                row += q[j] * self.get(i, j);
            }
            acc += p[i] * row;
        }
        Ok(acc)
    }

    /// `c * M + d`, entrywise.
    pub fn affine(&self, c: f64, d: f64) -> MatrixGame {
        MatrixGame {
            n1: self.n1,
            n2: self.n2,
            entries: self.entries.iter().map(|x| c * x + d).collect(),
        }
    }
}

impl fmt::Debug for MatrixGame {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "MatrixGame {}x{} [", self.n1, self.n2)?;
        for i in 0..self.n1 {
            let row: Vec<String> = (0..self.n2).map(|j| format!("{:e}", self.get(i, j))).collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        write!(f, "]")
    }
}

/// A finite two-player game with payoffs in `R^m`.
///
/// Payoffs are stored row-major: entry `(i, j)` occupies
/// `payoffs[(i * n2 + j) * m .. + m]`. Payoffs are not normalized; bounds
/// that assume unit payoffs are scaled by [`Game::payoff_bound`].
#[derive(Clone, PartialEq)]
pub struct Game {
    m: usize,
    n1: usize,
    n2: usize,
    payoffs: Vec<f64>,
    labels1: Option<Vec<String>>,
    labels2: Option<Vec<String>>,
}

impl Game {
    pub fn new(m: usize, n1: usize, n2: usize, payoffs: Vec<f64>) -> Result<Self> {
        if m == 0 || n1 == 0 || n2 == 0 {
            return Err(Error::InvalidGame(format!(
                "dimensions must be positive (m={m}, n1={n1}, n2={n2})"
            )));
        }
        let expected = m
            .checked_mul(n1)
            .and_then(|x| x.checked_mul(n2))
            .ok_or_else(|| Error::InvalidGame("dimensions overflow".into()))?;
        if payoffs.len() != expected {
            return Err(Error::Dimension {
                what: "payoff entries",
                expected,
                got: payoffs.len(),
            });
        }
        if let Some(k) = payoffs.iter().position(|x| !x.is_finite()) {
            return Err(Error::InvalidGame(format!("payoff component {k} is not finite")));
        }
        Ok(Game {
            m,
            n1,
            n2,
            payoffs,
            labels1: None,
            labels2: None,
        })
    }

    /// Builds a game from a function of pure action indices.
    pub fn from_fn(
        m: usize,
        n1: usize,
        n2: usize,
        mut f: impl FnMut(usize, usize) -> Vec<f64>,
    ) -> Result<Self> {
        let mut payoffs = Vec::with_capacity(m * n1 * n2);
        for i in 0..n1 {
            for j in 0..n2 {
                let v = f(i, j);
                check_len("payoff vector", m, v.len())?;
                payoffs.extend_from_slice(&v);
            }
        }
        Game::new(m, n1, n2, payoffs)
    }

    pub fn with_labels(mut self, labels1: Vec<String>, labels2: Vec<String>) -> Result<Self> {
        check_len("row labels", self.n1, labels1.len())?;
        check_len("column labels", self.n2, labels2.len())?;
        self.labels1 = Some(labels1);
        self.labels2 = Some(labels2);
        Ok(self)
    }

    pub(crate) fn set_labels(&mut self, labels1: Option<Vec<String>>, labels2: Option<Vec<String>>) {
        self.labels1 = labels1;
        self.labels2 = labels2;
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn n1(&self) -> usize {
        self.n1
    }

    pub fn n2(&self) -> usize {
        self.n2
    }

    pub fn labels1(&self) -> Option<&[String]> {
        self.labels1.as_deref()
    }

    pub fn labels2(&self) -> Option<&[String]> {
        self.labels2.as_deref()
    }

    #[inline]
    pub fn payoff(&self, i: usize, j: usize) -> &[f64] {
        let at = (i * self.n2 + j) * self.m;
        &self.payoffs[at..at + self.m]
    }

    pub fn raw_payoffs(&self) -> &[f64] {
        &self.payoffs
    }

    pub fn row_label(&self, i: usize) -> String {
        self.labels1
            .as_ref()
            .map_or_else(|| i.to_string(), |l| l[i].clone())
    }

    pub fn col_label(&self, j: usize) -> String {
        self.labels2
            .as_ref()
            .map_or_else(|| j.to_string(), |l| l[j].clone())
    }

    /// Bilinear extension `Σ_i Σ_j p_i q_j u(i, j)`.
    pub fn mixed_payoff(&self, p: &MixedAction, q: &MixedAction) -> Result<Vec<f64>> {
        check_len("player 1 mixed action", self.n1, p.len())?;
        check_len("player 2 mixed action", self.n2, q.len())?;
        let mut out = vec![0.0; self.m];
        self.mixed_payoff_into(p.weights(), q.weights(), &mut out);
        Ok(out)
    }

    /// Unchecked hot-path variant of [`Game::mixed_payoff`].
    #[inline]
    pub fn mixed_payoff_into(&self, p: &[f64], q: &[f64], out: &mut [f64]) {
        out.iter_mut().for_each(|x| *x = 0.0);
        for (i, &pi) in p.iter().enumerate() {
            if pi == 0.0 {
                continue;
            }
            for (j, &qj) in q.iter().enumerate() {
                let w = pi * qj;
                if w == 0.0 {
                    continue;
                }
                let u = self.payoff(i, j);
                for (o, x) in out.iter_mut().zip(u) {
                    *o += w * x;
                }
            }
        }
    }

    /// The zero-sum game `⟨λ, G⟩`.
    pub fn scalarize(&self, d: &Direction) -> Result<MatrixGame> {
        self.scalarize_slice(&d.lambda)
    }

    pub fn scalarize_slice(&self, lambda: &[f64]) -> Result<MatrixGame> {
        check_len("direction", self.m, lambda.len())?;
        let entries = self
            .payoffs
            .chunks_exact(self.m)
            .map(|u| dot(lambda, u))
            .collect();
        MatrixGame::new(self.n1, self.n2, entries)
    }

    /// The game `G - y`.
    pub fn translate(&self, y: &[f64]) -> Result<Game> {
        check_len("translation", self.m, y.len())?;
        let payoffs = self
            .payoffs
            .chunks_exact(self.m)
            .flat_map(|u| u.iter().zip(y).map(|(a, b)| a - b))
            .collect();
        let mut g = Game::new(self.m, self.n1, self.n2, payoffs)?;
        g.set_labels(self.labels1.clone(), self.labels2.clone());
        Ok(g)
    }

    /// Largest Euclidean norm over pure payoff vectors.
    pub fn payoff_bound(&self) -> f64 {
        self.payoffs
            .chunks_exact(self.m)
            .map(norm2)
            .fold(0.0, f64::max)
    }

    /// Coordinate `c` of the payoff as a scalar matrix.
    pub fn coordinate(&self, c: usize) -> MatrixGame {
        assert!(c < self.m);
        let entries = self.payoffs.chunks_exact(self.m).map(|u| u[c]).collect();
        MatrixGame::new(self.n1, self.n2, entries).expect("valid coordinate matrix")
    }
}

impl fmt::Debug for Game {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", crate::format::print_game(self))
    }
}

pub(crate) fn check_len(what: &'static str, expected: usize, got: usize) -> Result<()> {
    if expected != got {
        return Err(Error::Dimension { what, expected, got });
    }
    Ok(())
}

#[inline]
pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

#[inline]
pub fn norm2(a: &[f64]) -> f64 {
    a.iter().map(|x| x * x).sum::<f64>().sqrt()
}

pub fn dist2(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}
