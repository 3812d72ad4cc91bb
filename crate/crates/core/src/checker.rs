//! Decisions about which payoff vectors Player 1 can attain.
//!
//! Zero is attainable exactly when `v_λ >= 0` for every direction `λ`, and
//! every vector is attainable when `v_λ > 0` for every `λ != 0`. A vector
//! `x != 0` is attainable when zero is, and in addition zero is attainable
//! in `G - δx` for some `δ > 0` (or, equivalently, some `δ_0 > 0` bounds the
//! largest multiple of `x` that Player 1 can produce against each `q`).
//!
//! Conditions over all directions are decided in two ways:
//!
//! * a sweep over a [`SphereGrid`], certified by the Lipschitz bound
//!   `|v_λ - v_μ| <= U_max ‖λ - μ‖`;
//! * for `m <= 2`, an exact route that finds every angle at which `v_λ` can
//!   change sign and evaluates between them.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::game::{Direction, Game, MixedAction};
use crate::lp::{solve_lp, LinearProgram, LpOutcome, Relation};
use crate::poly::{self, Poly};
use crate::solver::{solve, GameSolution};
use crate::sphere::SphereGrid;

/// Sampled values below `-DECISION_MARGIN` are reported as violations.
pub const DECISION_MARGIN: f64 = 1e-6;
/// Noise floor of the exact route, relative to `1 + U_max`.
pub const EXACT_TOL: f64 = 1e-12;
/// Re-evaluating a witness must reproduce its value to this accuracy.
pub const RECHECK_TOL: f64 = 1e-8;
/// Size guard for the exact route.
pub const EXACT_MAX_SIDE: usize = 6;
/// Largest number of `q` grid points [`check_b3`] evaluates per level.
pub const B3_MAX_POINTS: usize = 200_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Holds,
    Fails,
    Undecided,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CertificateKind {
    /// Lipschitz-certified sweep over a sphere grid.
    Sweep,
    /// Exhaustive evaluation between candidate sign-change angles.
    Exact,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Certificate {
    pub kind: CertificateKind,
    /// Grid resolution `h` (sweeps only).
    pub resolution: Option<f64>,
    /// Proven distance bound from any unit direction to the grid; `0` when
    /// the evaluated set is exhaustive.
    pub covering_radius: f64,
    /// Lipschitz constant `L = U_max`.
    pub lipschitz: f64,
    pub min_value: f64,
    pub argmin: Vec<f64>,
    pub evaluations: usize,
}

impl Certificate {
    /// `min_value - L·covering_radius`: a lower bound on `v_λ` over all
    /// unit `λ` (for exact certificates, the minimum itself).
    pub fn lower_bound(&self) -> f64 {
        self.min_value - self.lipschitz * self.covering_radius
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DeltaWitness {
    pub delta: f64,
    pub lambda: Vec<f64>,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Witness {
    /// `v_λ = value < 0`; `q` is an optimal minimizer of `⟨λ, G⟩`.
    Direction {
        lambda: Vec<f64>,
        value: f64,
        q: MixedAction,
    },
    /// A mixed action of Player 2 at which the largest realizable multiple
    /// of `x` is `delta_star` (`None`: not even `δ = 0` is realizable).
    Column {
        q: MixedAction,
        delta_star: Option<f64>,
    },
    /// The translation at which zero was found attainable.
    Delta { delta: f64 },
    /// One violating direction per translation tried.
    DeltaSweep { deltas: Vec<DeltaWitness> },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Verdict {
    pub status: Status,
    /// Which condition decided the outcome.
    pub route: String,
    pub certificate: Option<Certificate>,
    pub witness: Option<Witness>,
    /// Slack of the decision (positive is safe on the Holds side).
    pub margin: f64,
    /// True when a Fails status rests on sampled evidence, not a proof.
    pub evidence_only: bool,
    pub notes: Vec<String>,
    pub evidence: Vec<Verdict>,
}

impl Verdict {
    fn new(status: Status, route: impl Into<String>, margin: f64) -> Self {
        Verdict {
            status,
            route: route.into(),
            certificate: None,
            witness: None,
            margin,
            evidence_only: false,
            notes: Vec::new(),
            evidence: Vec::new(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("verdicts serialize")
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CheckParams {
    pub resolution: f64,
    pub delta_schedule: Vec<f64>,
    /// Coarsest `q` grid denominator for the B3 evidence; `None` skips it.
    pub b3_grid_k: Option<usize>,
}

impl Default for CheckParams {
    fn default() -> Self {
        CheckParams {
            resolution: 0.01,
            delta_schedule: default_delta_schedule(),
            b3_grid_k: Some(4),
        }
    }
}

/// `1, 1/2, ..., 2^-15`.
pub fn default_delta_schedule() -> Vec<f64> {
    (0..16).map(|i| 0.5f64.powi(i)).collect()
}

/// `v_λ`, the value of `⟨λ, G⟩`.
pub fn value_direction(g: &Game, d: &Direction) -> Result<f64> {
    Ok(solve(&g.scalarize(d)?)?.value)
}

fn solve_direction(g: &Game, lambda: &[f64]) -> Result<GameSolution> {
    solve(&g.scalarize_slice(lambda)?)
}

/// Re-evaluates a direction witness: the value must reproduce within
/// [`RECHECK_TOL`] and be negative.
pub fn recheck_direction(g: &Game, lambda: &[f64], value: f64) -> Result<bool> {
    let again = solve_direction(g, lambda)?.value;
    Ok(again < 0.0 && (again - value).abs() <= RECHECK_TOL)
}

/// Values at every grid point, in grid order.
fn sweep_values(g: &Game, grid: &SphereGrid) -> Result<Vec<f64>> {
    let points = grid.points();
    let workers = std::thread::available_parallelism()
        .map(|n| n.get())
        .unwrap_or(1)
        .min(points.len().div_ceil(64).max(1));
    if workers <= 1 {
        return points
            .iter()
            .map(|p| solve_direction(g, p).map(|s| s.value))
            .collect();
    }
    let chunk = points.len().div_ceil(workers);
    std::thread::scope(|scope| {
        let handles: Vec<_> = points
            .chunks(chunk)
            .map(|part| {
                scope.spawn(move || {
                    part.iter()
                        .map(|p| solve_direction(g, p).map(|s| s.value))
                        .collect::<Result<Vec<f64>>>()
                })
            })
            .collect();
        let mut out = Vec::with_capacity(points.len());
        for h in handles {
            out.extend(h.join().expect("sweep worker panicked")?);
        }
        Ok(out)
    })
}

/// Sweep decision of `v_λ >= 0` (weak) or `v_λ > 0` (strict) over all
/// unit directions.
pub fn check_zero_attainable(g: &Game, h: f64, strict: bool) -> Result<Verdict> {
    let grid = SphereGrid::new(g.m(), h)?;
    let values = sweep_values(g, &grid)?;
    // Deterministic fold: smallest value, ties to the lowest index.
    let (idx, min) = values
        .iter()
        .copied()
        .enumerate()
        .fold((0, f64::INFINITY), |best, (i, v)| if v < best.1 { (i, v) } else { best });
    let cert = Certificate {
        kind: CertificateKind::Sweep,
        resolution: Some(h),
        covering_radius: grid.covering_radius(),
        lipschitz: g.payoff_bound(),
        min_value: min,
        argmin: grid.points()[idx].clone(),
        evaluations: values.len(),
    };
    let lower = cert.lower_bound();
    let route = if strict {
        "every direction strictly positive"
    } else {
        "every direction nonnegative"
    };
    let holds = if strict { lower > 0.0 } else { lower >= 0.0 };
    let mut v = if holds {
        Verdict::new(Status::Holds, route, lower)
    } else if min < -DECISION_MARGIN {
        let lambda = grid.points()[idx].clone();
        let q = solve_direction(g, &lambda)?.q_star;
        let mut v = Verdict::new(Status::Fails, route, min);
        v.witness = Some(Witness::Direction {
            lambda,
            value: min,
            q,
        });
        v
    } else {
        let mut v = Verdict::new(Status::Undecided, route, lower);
        v.notes.push(format!(
            "sampled minimum {min:e} is within the certification slack {:e}; refine the grid",
            cert.lipschitz * cert.covering_radius
        ));
        v
    };
    v.certificate = Some(cert);
    Ok(v)
}

/// Exact decision of `v_λ >= 0` for payoff dimension 1 or 2.
///
/// For `m = 2`, `v` is continuous on the circle and, at any zero, some
/// square submatrix of `cos θ·A + sin θ·B` is singular (a kernel of the
/// game with zero value). Every such angle is a root of one of the
/// determinant polynomials in `t = tan θ`, so `v` has constant sign between
/// consecutive candidates and one evaluation per arc decides it.
pub fn check_zero_exact_small(g: &Game) -> Result<Verdict> {
    let tol = EXACT_TOL * (1.0 + g.payoff_bound());
    let (angles, lambdas) = match g.m() {
        1 => (None, vec![vec![1.0], vec![-1.0]]),
        2 => {
            let a = candidate_angles(g)?;
            let mut lambdas = Vec::with_capacity(2 * a.len());
            for (i, &th) in a.iter().enumerate() {
                let next = if i + 1 < a.len() {
                    a[i + 1]
                } else {
                    a[0] + std::f64::consts::TAU
                };
                lambdas.push(vec![th.cos(), th.sin()]);
                let mid = 0.5 * (th + next);
                lambdas.push(vec![mid.cos(), mid.sin()]);
            }
            (Some(a), lambdas)
        }
        m => {
            return Err(Error::Precondition(format!(
                "exact route needs payoff dimension 1 or 2, got {m}"
            )))
        }
    };
    let mut best = (f64::INFINITY, 0usize);
    for (i, l) in lambdas.iter().enumerate() {
        let v = solve_direction(g, l)?.value;
        if v < best.0 {
            best = (v, i);
        }
    }
    let (mut min, idx) = best;
    let mut argmin = lambdas[idx].clone();
    if let (Some(a), true) = (&angles, min < -tol) {
        // Deepen the witness inside its arc.
        let k = idx / 2;
        let lo = a[k];
        let hi = if k + 1 < a.len() { a[k + 1] } else { a[0] + std::f64::consts::TAU };
        for s in 1..32 {
            let th = lo + (hi - lo) * s as f64 / 32.0;
            let l = vec![th.cos(), th.sin()];
            let v = solve_direction(g, &l)?.value;
            if v < min {
                min = v;
                argmin = l;
            }
        }
    }
    let cert = Certificate {
        kind: CertificateKind::Exact,
        resolution: None,
        covering_radius: 0.0,
        lipschitz: g.payoff_bound(),
        min_value: min,
        argmin: argmin.clone(),
        evaluations: lambdas.len(),
    };
    let route = "every direction nonnegative (exact)";
    let mut v = if min < -tol {
        let q = solve_direction(g, &argmin)?.q_star;
        let mut v = Verdict::new(Status::Fails, route, min);
        v.witness = Some(Witness::Direction {
            lambda: argmin,
            value: min,
            q,
        });
        v
    } else {
        Verdict::new(Status::Holds, route, min)
    };
    if g.m() == 1 {
        let plus = solve_direction(g, &[1.0])?.value;
        let minus = solve_direction(g, &[-1.0])?.value;
        v.notes.push(format!("v(+1) = {plus:?}, v(-1) = {minus:?}"));
    }
    v.certificate = Some(cert);
    Ok(v)
}

/// Candidate angles in `[0, 2π)`, sorted and deduplicated.
fn candidate_angles(g: &Game) -> Result<Vec<f64>> {
    let (n1, n2) = (g.n1(), g.n2());
    if n1.min(n2) > EXACT_MAX_SIDE {
        return Err(Error::Precondition(format!(
            "exact route limited to games with min(n1, n2) <= {EXACT_MAX_SIDE}, got {n1}x{n2}"
        )));
    }
    let a = g.coordinate(0);
    let b = g.coordinate(1);
    let mut ts: Vec<f64> = Vec::new();
    for k in 1..=n1.min(n2) {
        for rows in subsets(n1, k) {
            for cols in subsets(n2, k) {
                let m: Vec<Vec<Poly>> = rows
                    .iter()
                    .map(|&i| cols.iter().map(|&j| vec![a.get(i, j), b.get(i, j)]).collect())
                    .collect();
                ts.extend(poly::real_roots(&poly::det(&m)));
            }
        }
    }
    use std::f64::consts::{PI, TAU};
    // Axes plus a coarse uniform set, so no arc is longer than π/8.
    let mut angles: Vec<f64> = (0..16).map(|i| i as f64 * TAU / 16.0).collect();
    for t in ts.into_iter().filter(|t| t.is_finite()) {
        let th = t.atan();
        angles.push(th.rem_euclid(TAU));
        angles.push((th + PI).rem_euclid(TAU));
    }
    angles.retain(|x| x.is_finite() && *x < TAU);
    angles.sort_by(f64::total_cmp);
    angles.dedup_by(|x, y| (*x - *y).abs() < 1e-13);
    Ok(angles)
}

fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(k);
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            if n - i < k - cur.len() {
                break;
            }
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    rec(0, n, k, &mut cur, &mut out);
    out
}

/// Weak decision for zero: the sweep, falling back to the exact route when
/// the sweep is inconclusive and the dimension allows it.
pub fn decide_zero(g: &Game, h: f64) -> Result<Verdict> {
    let sweep = check_zero_attainable(g, h, false)?;
    if sweep.status != Status::Undecided || g.m() > 2 {
        return Ok(sweep);
    }
    match check_zero_exact_small(g) {
        Ok(mut exact) => {
            exact.evidence.push(sweep);
            Ok(exact)
        }
        Err(Error::Precondition(msg)) => {
            let mut v = sweep;
            v.notes.push(format!("exact route unavailable: {msg}"));
            Ok(v)
        }
        Err(e) => Err(e),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DeltaStar {
    pub delta: f64,
    pub p: MixedAction,
}

/// Largest `δ >= 0` with `u(p, q) = δx` for some `p`; `None` when no such
/// `p` exists even for `δ = 0`.
pub fn delta_star(g: &Game, x: &[f64], q: &MixedAction) -> Result<Option<DeltaStar>> {
    crate::game::check_len("target", g.m(), x.len())?;
    crate::game::check_len("player 2 mixed action", g.n2(), q.len())?;
    if x.iter().all(|&c| c == 0.0) {
        return Err(Error::Precondition("delta_star needs x != 0".into()));
    }
    let (m, n1) = (g.m(), g.n1());
    // Columns: p_1..p_n1, δ.
    let rows: Vec<Vec<f64>> = (0..n1)
        .map(|i| {
            let mut u = vec![0.0; m];
            g.mixed_payoff_into(MixedAction::pure(n1, i).weights(), q.weights(), &mut u);
            u
        })
        .collect();
    let mut objective = vec![0.0; n1 + 1];
    objective[n1] = 1.0;
    let mut lp = LinearProgram::new(objective);
    for c in 0..m {
        let mut coeffs: Vec<f64> = rows.iter().map(|u| u[c]).collect();
        coeffs.push(-x[c]);
        lp.add(coeffs, Relation::Eq, 0.0);
    }
    let mut simplex = vec![1.0; n1];
    simplex.push(0.0);
    lp.add(simplex, Relation::Eq, 1.0);
    match solve_lp(&lp)? {
        LpOutcome::Optimal(s) => {
            let p = MixedAction::new(s.x[..n1].iter().map(|v| v.max(0.0)).collect())?;
            Ok(Some(DeltaStar {
                delta: s.x[n1].max(0.0),
                p,
            }))
        }
        LpOutcome::Infeasible => Ok(None),
        LpOutcome::Unbounded => Err(Error::Numerical(
            "delta_star LP reported unbounded over a simplex".into(),
        )),
    }
}

/// All mixed actions on `n` points with weights in `{0, 1/k, ..., 1}`.
pub fn simplex_grid(n: usize, k: usize) -> Vec<MixedAction> {
    let mut out = Vec::new();
    let mut counts = vec![0usize; n];
    fn rec(at: usize, left: usize, k: usize, counts: &mut [usize], out: &mut Vec<MixedAction>) {
        if at + 1 == counts.len() {
            counts[at] = left;
            let w = counts.iter().map(|&c| c as f64 / k as f64).collect();
            out.push(MixedAction::new(w).expect("grid points are distributions"));
            return;
        }
        for c in (0..=left).rev() {
            counts[at] = c;
            rec(at + 1, left - c, k, counts, out);
        }
    }
    rec(0, k, k, &mut counts, &mut out);
    out
}

fn binomial(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// Sampled evidence about a uniform lower bound on `δ*(q)`.
///
/// Evaluates `δ*` on the `q` grids with denominators `grid_k`, `2·grid_k`
/// and `4·grid_k` (all pure `q` included). A `q` with `δ*(q) = 0` or no
/// feasible `p` at all is a proof that no uniform bound exists. A sampled
/// infimum that halves at both refinements is reported as Fails-evidence.
/// Otherwise the result is Undecided, with the sampled infimum as margin.
pub fn check_b3(g: &Game, x: &[f64], grid_k: usize) -> Result<Verdict> {
    if grid_k == 0 {
        return Err(Error::Precondition("grid_k must be >= 1".into()));
    }
    let n2 = g.n2();
    let mut infima = Vec::new();
    let mut last_argmin = None;
    for level in [grid_k, 2 * grid_k, 4 * grid_k] {
        let count = binomial(level + n2 - 1, n2 - 1);
        if count > B3_MAX_POINTS as f64 {
            return Err(Error::Precondition(format!(
                "B3 grid with denominator {level} has {count:.0} points"
            )));
        }
        let mut inf = (f64::INFINITY, None);
        for q in simplex_grid(n2, level) {
            match delta_star(g, x, &q)? {
                None => return Ok(b3_refuted(q, None)),
                Some(d) if d.delta <= 0.0 => return Ok(b3_refuted(q, Some(d.delta))),
                Some(d) => {
                    if d.delta < inf.0 {
                        inf = (d.delta, Some(q));
                    }
                }
            }
        }
        infima.push(inf.0);
        last_argmin = inf.1;
    }
    let halves = |a: f64, b: f64| b <= 0.5 * a * (1.0 + 1e-9);
    let decays = halves(infima[0], infima[1]) && halves(infima[1], infima[2]);
    let q = last_argmin.expect("grids are nonempty");
    let route = "uniform lower bound on the realizable multiple of x";
    let mut v = if decays {
        let mut v = Verdict::new(Status::Fails, route, infima[2]);
        v.evidence_only = true;
        v
    } else {
        Verdict::new(Status::Undecided, route, infima[2])
    };
    v.witness = Some(Witness::Column {
        q,
        delta_star: Some(infima[2]),
    });
    v.notes.push(format!(
        "sampled infima at denominators {grid_k}, {}, {}: {:?}",
        2 * grid_k,
        4 * grid_k,
        infima
    ));
    Ok(v)
}

fn b3_refuted(q: MixedAction, delta_star: Option<f64>) -> Verdict {
    let mut v = Verdict::new(
        Status::Fails,
        "uniform lower bound on the realizable multiple of x",
        delta_star.unwrap_or(f64::NEG_INFINITY),
    );
    v.notes.push(match delta_star {
        None => "no mixed action of Player 1 realizes a nonnegative multiple of x".into(),
        Some(_) => "only the zero multiple of x is realizable".into(),
    });
    v.witness = Some(Witness::Column { q, delta_star });
    v
}

/// Whether zero is attainable in `G - δx` for some `δ` in the schedule.
pub fn check_b4(g: &Game, x: &[f64], schedule: &[f64], h: f64) -> Result<Verdict> {
    crate::game::check_len("target", g.m(), x.len())?;
    if x.iter().all(|&c| c == 0.0) {
        return Err(Error::Precondition("check_b4 needs x != 0".into()));
    }
    if schedule.is_empty()
        || schedule.iter().any(|d| !(*d > 0.0) || !d.is_finite())
        || schedule.windows(2).any(|w| w[1] >= w[0])
    {
        return Err(Error::Precondition(
            "delta schedule must be nonempty, positive and decreasing".into(),
        ));
    }
    let route = "zero attainable after translating by a multiple of x";
    let mut witnesses = Vec::new();
    let mut undecided = Vec::new();
    for &delta in schedule {
        let shift: Vec<f64> = x.iter().map(|c| delta * c).collect();
        let inner = decide_zero(&g.translate(&shift)?, h)?;
        match inner.status {
            Status::Holds => {
                let mut v = Verdict::new(Status::Holds, route, inner.margin);
                v.certificate = inner.certificate.clone();
                v.witness = Some(Witness::Delta { delta });
                v.evidence.push(inner);
                return Ok(v);
            }
            Status::Fails => {
                if let Some(Witness::Direction { lambda, value, .. }) = &inner.witness {
                    witnesses.push(DeltaWitness {
                        delta,
                        lambda: lambda.clone(),
                        value: *value,
                    });
                }
            }
            Status::Undecided => undecided.push(delta),
        }
    }
    if undecided.is_empty() {
        let worst = witnesses.iter().map(|w| w.value).fold(f64::NEG_INFINITY, f64::max);
        let mut v = Verdict::new(Status::Fails, route, worst);
        v.evidence_only = true;
        v.notes.push(format!(
            "every translation in the schedule (down to {:e}) has a violating direction",
            schedule[schedule.len() - 1]
        ));
        v.witness = Some(Witness::DeltaSweep { deltas: witnesses });
        Ok(v)
    } else {
        let mut v = Verdict::new(Status::Undecided, route, 0.0);
        v.notes.push(format!("inconclusive at delta in {undecided:?}"));
        v.witness = Some(Witness::DeltaSweep { deltas: witnesses });
        Ok(v)
    }
}

/// Combined decision for target `x`.
pub fn attainability_verdict(g: &Game, x: &[f64], params: &CheckParams) -> Result<Verdict> {
    crate::game::check_len("target", g.m(), x.len())?;
    if x.iter().all(|&c| c == 0.0) {
        return decide_zero(g, params.resolution);
    }
    let c2 = check_zero_attainable(g, params.resolution, true)?;
    if c2.status == Status::Holds {
        let mut v = c2;
        v.route = "every vector attainable: every direction strictly positive".into();
        return Ok(v);
    }
    let b1 = decide_zero(g, params.resolution)?;
    if b1.status == Status::Fails {
        let mut v = b1;
        v.route = "zero not attainable, hence no vector is".into();
        return Ok(v);
    }
    let b4 = check_b4(g, x, &params.delta_schedule, params.resolution)?;
    let mut v = match (b1.status, b4.status) {
        (Status::Holds, Status::Holds) | (_, Status::Fails) => b4,
        _ => {
            let mut v = Verdict::new(Status::Undecided, "inconclusive", b4.margin.min(b1.margin));
            v.witness = b4.witness.clone();
            v.evidence.push(b4);
            v
        }
    };
    v.evidence.push(b1);
    if let Some(k) = params.b3_grid_k {
        match check_b3(g, x, k) {
            Ok(b3) => v.evidence.push(b3),
            Err(Error::Precondition(msg)) => v.notes.push(format!("B3 evidence skipped: {msg}")),
            Err(e) => return Err(e),
        }
    }
    Ok(v)
}
