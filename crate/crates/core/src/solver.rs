//! Values and optimal strategies of zero-sum matrix games.
//!
//! The game is shifted so every entry is at least one, after which the
//! column player's problem `max 1·y s.t. M'y <= 1, y >= 0` starts from the
//! slack basis and needs no phase 1. Its duals are the row player's
//! strategy. The returned certificate is always recomputed from the
//! original matrix, never read off the tableau.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::game::{MatrixGame, MixedAction};
use crate::lp::{solve_lp, LinearProgram, LpOutcome, Relation};

/// Largest duality gap accepted from [`solve`].
pub const CERTIFICATE_TOL: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GameSolution {
    pub value: f64,
    /// Maximizer (rows).
    pub p_star: MixedAction,
    /// Minimizer (columns).
    pub q_star: MixedAction,
    /// `max_i (M q*)_i - min_j (p*ᵀ M)_j`.
    pub gap: f64,
    /// `min_j (p*ᵀ M)_j`: what `p_star` guarantees.
    pub lower: f64,
    /// `max_i (M q*)_i`: what `q_star` concedes.
    pub upper: f64,
}

pub fn solve(mg: &MatrixGame) -> Result<GameSolution> {
    let (n1, n2) = (mg.n1(), mg.n2());
    let min = mg.entries().iter().copied().fold(f64::INFINITY, f64::min);
    let shift = 1.0 - min;
    let shifted = mg.affine(1.0, shift);

    let mut lp = LinearProgram::new(vec![1.0; n2]);
    for i in 0..n1 {
        lp.add((0..n2).map(|j| shifted.get(i, j)).collect(), Relation::Le, 1.0);
    }
    let sol = match solve_lp(&lp)? {
        LpOutcome::Optimal(s) => s,
        other => {
            return Err(Error::Numerical(format!(
                "matrix game LP reported {other:?}; entries span [{min:e}, {:e}]",
                mg.max_abs()
            )))
        }
    };

    let q_star = normalize(&sol.x, "column")?;
    let p_star = normalize(&sol.duals, "row")?;
    let certificate = certify(mg, &p_star, &q_star);
    if certificate.gap.abs() > CERTIFICATE_TOL * (1.0 + mg.max_abs()) {
        return Err(Error::Numerical(format!(
            "duality gap {:e} exceeds tolerance (shift {shift:e}, {} pivots){mg:?}",
            certificate.gap, sol.pivots
        )));
    }
    Ok(GameSolution {
        p_star,
        q_star,
        ..certificate
    })
}

fn normalize(w: &[f64], who: &str) -> Result<MixedAction> {
    let clipped: Vec<f64> = w.iter().map(|x| x.max(0.0)).collect();
    let sum: f64 = clipped.iter().sum();
    if !(sum > 0.0) || !sum.is_finite() {
        return Err(Error::Numerical(format!("{who} strategy has zero mass")));
    }
    MixedAction::new(clipped.into_iter().map(|x| x / sum).collect())
}

/// Duality certificate for an arbitrary strategy pair.
pub fn certify(mg: &MatrixGame, p: &MixedAction, q: &MixedAction) -> GameSolution {
    let lower = mg
        .row_payoffs(p.weights())
        .into_iter()
        .fold(f64::INFINITY, f64::min);
    let upper = mg
        .column_payoffs(q.weights())
        .into_iter()
        .fold(f64::NEG_INFINITY, f64::max);
    GameSolution {
        value: 0.5 * (lower + upper),
        p_star: p.clone(),
        q_star: q.clone(),
        gap: upper - lower,
        lower,
        upper,
    }
}

/// Brute-force lower approximation of the value: the best row mix on the
/// simplex grid with denominator `grid_k`, scored by its worst pure column.
/// Independent of [`solve`]; meant for tests and cross-checks.
pub fn value_oracle(mg: &MatrixGame, grid_k: usize) -> Result<f64> {
    if mg.n1() > 4 || mg.n2() > 4 {
        return Err(Error::Precondition(format!(
            "value oracle limited to 4x4 games, got {}x{}",
            mg.n1(),
            mg.n2()
        )));
    }
    if grid_k < 100 {
        return Err(Error::Precondition(format!("grid_k must be >= 100, got {grid_k}")));
    }
    let n1 = mg.n1();
    let mut best = f64::NEG_INFINITY;
    let mut counts = vec![0usize; n1];
    let mut p = vec![0.0; n1];
    enumerate(&mut counts, 0, grid_k, &mut |c| {
        for (pi, &ci) in p.iter_mut().zip(c) {
            *pi = ci as f64 / grid_k as f64;
        }
        let worst = mg.row_payoffs(&p).into_iter().fold(f64::INFINITY, f64::min);
        best = best.max(worst);
    });
    Ok(best)
}

fn enumerate(counts: &mut [usize], at: usize, left: usize, f: &mut impl FnMut(&[usize])) {
    if at + 1 == counts.len() {
        counts[at] = left;
        f(counts);
        return;
    }
    for c in 0..=left {
        counts[at] = c;
        enumerate(counts, at + 1, left - c, f);
    }
}
