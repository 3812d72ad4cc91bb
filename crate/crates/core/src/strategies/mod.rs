//! Strategies with delay.
//!
//! A strategy commits in advance to updating times `0 = τ⁰ < τ¹ < ...` and
//! plays one mixed action on each block `[τᵏ, τᵏ⁺¹)`. The action for block
//! `k` may depend only on play observed before `τᵏ`. The engine enforces
//! this by construction: [`DelayStrategy::observe`] delivers play only after
//! it has happened, and [`DelayStrategy::block_action`] is called exactly at
//! the strategy's own updating times.
//!
//! Every strategy works in its own clock. Wrappers such as [`Accelerate`]
//! and [`Interleave`] translate times before delegating.

mod parse;
mod transform;

use std::sync::Arc;

use crate::catalog;
use crate::error::{Error, Result};
use crate::game::{dist2, norm2, Game, MixedAction};
use crate::solver::solve;

pub use parse::{build_strategy, parse_strategy, StrategyExpr, Value};
pub use transform::{accelerate, interleave, x_attainer, Accelerate, Interleave, Sequence, XAttainerParams};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize)]
pub enum Side {
    P1,
    P2,
}

impl Side {
    pub fn name(self) -> &'static str {
        match self {
            Side::P1 => "player 1",
            Side::P2 => "player 2",
        }
    }
}

/// Play on `[start, end)`: `p` is Player 1's action and `q` Player 2's.
#[derive(Debug, Clone, Copy)]
pub struct Segment<'a> {
    pub start: f64,
    pub end: f64,
    pub p: &'a MixedAction,
    pub q: &'a MixedAction,
}

pub trait DelayStrategy: Send {
    fn name(&self) -> String;

    /// The side this strategy can play, if it is tied to one.
    fn side(&self) -> Option<Side> {
        None
    }

    /// Action for the block starting at `at`. `at` is 0 for the first call
    /// and afterwards the value most recently returned by
    /// [`DelayStrategy::next_update`].
    fn block_action(&mut self, at: f64) -> Result<MixedAction>;

    /// End of the block just started (`f64::INFINITY` if it never ends).
    /// Called once per block, right after [`DelayStrategy::block_action`].
    fn next_update(&mut self) -> f64;

    /// Play on a finished interval, delivered in time order.
    fn observe(&mut self, seg: &Segment);

    /// `τᵏ`, when it is cheap to compute. Used to reject unreachable
    /// horizons before a run starts.
    fn updating_time(&self, _k: u64) -> Option<f64> {
        None
    }
}

/// `H_k = 1 + 1/2 + ... + 1/k`.
pub fn harmonic(k: u64) -> f64 {
    if k < 64 {
        // Smallest terms first.
        return (1..=k).rev().map(|l| 1.0 / l as f64).sum();
    }
    let x = k as f64;
    let x2 = x * x;
    x.ln() + 0.577_215_664_901_532_9 + 1.0 / (2.0 * x) - 1.0 / (12.0 * x2) + 1.0 / (120.0 * x2 * x2)
        - 1.0 / (252.0 * x2 * x2 * x2)
}

/// Neumaier-compensated running sum.
#[derive(Debug, Clone, Copy, Default)]
struct Compensated {
    sum: f64,
    c: f64,
}

impl Compensated {
    fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.c += (self.sum - t) + x;
        } else {
            self.c += (x - t) + self.sum;
        }
        self.sum = t;
    }

    fn value(&self) -> f64 {
        self.sum + self.c
    }
}

/// Remembers the optimal row strategy for recently seen directions.
#[derive(Debug, Clone, Default)]
struct DirectionCache {
    entries: Vec<(Vec<f64>, MixedAction)>,
    next: usize,
}

const CACHE_SLOTS: usize = 16;

impl DirectionCache {
    fn get(&self, dir: &[f64]) -> Option<&MixedAction> {
        self.entries.iter().find(|(d, _)| d[..] == *dir).map(|(_, p)| p)
    }

    fn put(&mut self, dir: Vec<f64>, p: MixedAction) {
        if self.entries.len() < CACHE_SLOTS {
            self.entries.push((dir, p));
        } else {
            self.entries[self.next] = (dir, p);
            self.next = (self.next + 1) % CACHE_SLOTS;
        }
    }
}

/// Player 1's strategy that keeps the cumulative payoff near zero when
/// every direction has nonnegative value.
///
/// Updating times are `τᵏ = η·H_k`; on block `k` it plays an optimal
/// strategy of the scalar game `⟨-S_k, G⟩`, where `S_k` is the payoff up to
/// `τᵏ`. This keeps `⟨S_k, u⟩ <= 0` during the block, so
/// `‖S_{k+1}‖² <= ‖S_k‖² + (η U_max / (k+1))²`.
#[derive(Debug, Clone)]
pub struct ZeroAttainer {
    game: Arc<Game>,
    eta: f64,
    k: u64,
    tau: Compensated,
    s: Vec<f64>,
    scratch: Vec<f64>,
    dir: Vec<f64>,
    last: Option<(MixedAction, MixedAction)>,
    cache: DirectionCache,
}

pub fn zero_attainer(g: &Game, eta: f64) -> Result<ZeroAttainer> {
    if !(eta > 0.0) || !eta.is_finite() {
        return Err(Error::Precondition(format!("eta must be positive, got {eta}")));
    }
    Ok(ZeroAttainer {
        game: Arc::new(g.clone()),
        eta,
        k: 0,
        tau: Compensated::default(),
        s: vec![0.0; g.m()],
        scratch: vec![0.0; g.m()],
        dir: vec![0.0; g.m()],
        last: None,
        cache: DirectionCache::default(),
    })
}

impl ZeroAttainer {
    /// Payoff observed so far (`S_k` at an updating time).
    pub fn observed_payoff(&self) -> &[f64] {
        &self.s
    }

    pub fn eta(&self) -> f64 {
        self.eta
    }

    /// Optimal action of `⟨-s, G⟩`. For `s = 0` every action is optimal
    /// and the lexicographically smallest weight vector, the pure last
    /// action, is used.
    fn steer(&mut self, s: &[f64]) -> Result<MixedAction> {
        let n = norm2(s);
        if n == 0.0 {
            return Ok(MixedAction::pure(self.game.n1(), self.game.n1() - 1));
        }
        for (d, x) in self.dir.iter_mut().zip(s) {
            *d = -x / n;
        }
        if let Some(p) = self.cache.get(&self.dir) {
            return Ok(p.clone());
        }
        let dir = self.dir.clone();
        let mg = self.game.scalarize_slice(&dir)?;
        let p = solve(&mg)
            .map_err(|e| Error::Strategy(format!("zero attainer block {}: {e}", self.k)))?
            .p_star;
        self.cache.put(dir, p.clone());
        Ok(p)
    }
}

impl DelayStrategy for ZeroAttainer {
    fn name(&self) -> String {
        format!("zero_attainer(eta={})", self.eta)
    }

    fn side(&self) -> Option<Side> {
        Some(Side::P1)
    }

    fn block_action(&mut self, _at: f64) -> Result<MixedAction> {
        let s = std::mem::take(&mut self.s);
        let p = self.steer(&s);
        self.s = s;
        p
    }

    fn next_update(&mut self) -> f64 {
        self.k += 1;
        self.tau.add(self.eta / self.k as f64);
        self.tau.value()
    }

    fn observe(&mut self, seg: &Segment) {
        let len = seg.end - seg.start;
        // `scratch` still holds the payoff of the previous segment.
        let same = matches!(&self.last, Some((p, q)) if p.shares(seg.p) && q.shares(seg.q));
        if !same {
            self.game
                .mixed_payoff_into(seg.p.weights(), seg.q.weights(), &mut self.scratch);
            self.last = Some((seg.p.clone(), seg.q.clone()));
        }
        for (s, u) in self.s.iter_mut().zip(&self.scratch) {
            *s += len * u;
        }
    }

    fn updating_time(&self, k: u64) -> Option<f64> {
        Some(self.eta * harmonic(k))
    }
}

/// One action forever.
#[derive(Debug, Clone)]
pub struct Stationary {
    action: MixedAction,
}

pub fn stationary(action: MixedAction) -> Stationary {
    Stationary { action }
}

impl DelayStrategy for Stationary {
    fn name(&self) -> String {
        format!("stationary({:?})", self.action)
    }

    fn block_action(&mut self, _at: f64) -> Result<MixedAction> {
        Ok(self.action.clone())
    }

    fn next_update(&mut self) -> f64 {
        f64::INFINITY
    }

    fn observe(&mut self, _seg: &Segment) {}

    fn updating_time(&self, k: u64) -> Option<f64> {
        Some(if k == 0 { 0.0 } else { f64::INFINITY })
    }
}

/// Cycles through a fixed list of actions, switching every `period`.
#[derive(Debug, Clone)]
pub struct Cycle {
    actions: Vec<MixedAction>,
    period: f64,
    k: u64,
}

pub fn cycle(actions: Vec<MixedAction>, period: f64) -> Result<Cycle> {
    if actions.is_empty() {
        return Err(Error::Precondition("cycle needs at least one action".into()));
    }
    if !(period > 0.0) || !period.is_finite() {
        return Err(Error::Precondition(format!("period must be positive, got {period}")));
    }
    Ok(Cycle {
        actions,
        period,
        k: 0,
    })
}

/// Cycles through the pure actions `0, 1, ..., n-1`.
pub fn cycle_pure(n: usize, period: f64) -> Result<Cycle> {
    cycle((0..n).map(|j| MixedAction::pure(n, j)).collect(), period)
}

impl DelayStrategy for Cycle {
    fn name(&self) -> String {
        format!("cycle(period={}, actions={:?})", self.period, self.actions)
    }

    fn block_action(&mut self, _at: f64) -> Result<MixedAction> {
        Ok(self.actions[(self.k % self.actions.len() as u64) as usize].clone())
    }

    fn next_update(&mut self) -> f64 {
        self.k += 1;
        self.k as f64 * self.period
    }

    fn observe(&mut self, _seg: &Segment) {}

    fn updating_time(&self, k: u64) -> Option<f64> {
        Some(k as f64 * self.period)
    }
}

/// Cycles through the pure actions `0, 1, ..., n-1`, switching at the
/// harmonic times `η·H_k` of a zero attainer with the same `η`. The times
/// are accumulated exactly as the zero attainer does, so both players'
/// blocks coincide bit for bit.
#[derive(Debug, Clone)]
pub struct HarmonicCycle {
    n: usize,
    eta: f64,
    k: u64,
    tau: Compensated,
}

pub fn block_switching(n: usize, eta: f64) -> Result<HarmonicCycle> {
    if n == 0 {
        return Err(Error::Precondition("block switching needs an action".into()));
    }
    if !(eta > 0.0) || !eta.is_finite() {
        return Err(Error::Precondition(format!("eta must be positive, got {eta}")));
    }
    Ok(HarmonicCycle {
        n,
        eta,
        k: 0,
        tau: Compensated::default(),
    })
}

impl DelayStrategy for HarmonicCycle {
    fn name(&self) -> String {
        format!("switch(eta={})", self.eta)
    }

    fn block_action(&mut self, _at: f64) -> Result<MixedAction> {
        Ok(MixedAction::pure(self.n, (self.k % self.n as u64) as usize))
    }

    fn next_update(&mut self) -> f64 {
        self.k += 1;
        self.tau.add(self.eta / self.k as f64);
        self.tau.value()
    }

    fn observe(&mut self, _seg: &Segment) {}

    fn updating_time(&self, k: u64) -> Option<f64> {
        Some(self.eta * harmonic(k))
    }
}

/// Open-loop schedule: `actions[i]` on `[times[i], times[i+1])`, the last
/// action forever.
#[derive(Debug, Clone)]
pub struct Scripted {
    times: Vec<f64>,
    actions: Vec<MixedAction>,
    k: usize,
}

pub fn scripted(times: Vec<f64>, actions: Vec<MixedAction>) -> Result<Scripted> {
    if times.len() != actions.len() || times.is_empty() || times[0] != 0.0 {
        return Err(Error::Precondition(
            "scripted play needs matching times and actions, starting at 0".into(),
        ));
    }
    if times.windows(2).any(|w| !(w[1] > w[0])) || times.iter().any(|t| !t.is_finite()) {
        return Err(Error::Precondition("scripted times must increase".into()));
    }
    Ok(Scripted {
        times,
        actions,
        k: 0,
    })
}

impl DelayStrategy for Scripted {
    fn name(&self) -> String {
        format!("scripted({} blocks)", self.times.len())
    }

    fn block_action(&mut self, _at: f64) -> Result<MixedAction> {
        Ok(self.actions[self.k].clone())
    }

    fn next_update(&mut self) -> f64 {
        self.k += 1;
        self.times.get(self.k).copied().unwrap_or(f64::INFINITY)
    }

    fn observe(&mut self, _seg: &Segment) {}
}

/// Player 2's strategy that plays a fixed column until `observe_at`, then
/// locks forever onto the column that pushes hardest along the payoff
/// accumulated so far: `argmax_j min_i ⟨γ, u(i, j)⟩`.
///
/// With the initial column chosen so that Player 1's first block yields a
/// nonzero payoff, the cumulative payoff never returns to zero in games
/// where some column keeps `⟨γ, u(·, j)⟩ >= 0`.
#[derive(Debug, Clone)]
pub struct LockAfter {
    game: Arc<Game>,
    initial: usize,
    observe_at: f64,
    gamma: Vec<f64>,
    scratch: Vec<f64>,
    locked: Option<usize>,
    k: u64,
}

pub fn lock_after(g: &Game, initial: usize, observe_at: f64) -> Result<LockAfter> {
    if initial >= g.n2() {
        return Err(Error::Precondition(format!(
            "initial column {initial} out of range for {} columns",
            g.n2()
        )));
    }
    if !(observe_at > 0.0) || !observe_at.is_finite() {
        return Err(Error::Precondition(format!(
            "observation time must be positive, got {observe_at}"
        )));
    }
    Ok(LockAfter {
        game: Arc::new(g.clone()),
        initial,
        observe_at,
        gamma: vec![0.0; g.m()],
        scratch: vec![0.0; g.m()],
        locked: None,
        k: 0,
    })
}

impl LockAfter {
    pub fn locked_column(&self) -> Option<usize> {
        self.locked
    }
}

impl DelayStrategy for LockAfter {
    fn name(&self) -> String {
        format!("lock(initial={}, observe={})", self.initial, self.observe_at)
    }

    fn side(&self) -> Option<Side> {
        Some(Side::P2)
    }

    fn block_action(&mut self, _at: f64) -> Result<MixedAction> {
        let n2 = self.game.n2();
        if self.k == 0 {
            return Ok(MixedAction::pure(n2, self.initial));
        }
        let g = &self.game;
        let gamma = &self.gamma;
        let score = |j: usize| {
            (0..g.n1())
                .map(|i| crate::game::dot(gamma, g.payoff(i, j)))
                .fold(f64::INFINITY, f64::min)
        };
        let best = (0..n2)
            .map(|j| (j, score(j)))
            .fold((0, f64::NEG_INFINITY), |b, (j, s)| if s > b.1 { (j, s) } else { b })
            .0;
        self.locked = Some(best);
        Ok(MixedAction::pure(n2, best))
    }

    fn next_update(&mut self) -> f64 {
        self.k += 1;
        if self.k == 1 {
            self.observe_at
        } else {
            f64::INFINITY
        }
    }

    fn observe(&mut self, seg: &Segment) {
        let len = seg.end - seg.start;
        self.game
            .mixed_payoff_into(seg.p.weights(), seg.q.weights(), &mut self.scratch);
        for (g, u) in self.gamma.iter_mut().zip(&self.scratch) {
            *g += len * u;
        }
    }

    fn updating_time(&self, k: u64) -> Option<f64> {
        Some(match k {
            0 => 0.0,
            1 => self.observe_at,
            _ => f64::INFINITY,
        })
    }
}

/// Player 1's strategy in the three-row example where `(1, 1)` is only
/// weakly attainable: blocks of length `ε`; inside the open ball of radius
/// `ε` around `(1, 1)` play the zero row, otherwise the mix
/// `ε·U + (1-ε)·M`.
#[derive(Debug, Clone)]
pub struct WeakAttainer {
    game: Game,
    eps: f64,
    k: u64,
    gamma: Vec<f64>,
    scratch: Vec<f64>,
}

pub fn weak_attainer_ex4(eps: f64) -> Result<WeakAttainer> {
    if !(eps > 0.0 && eps < 1.0) {
        return Err(Error::Precondition(format!("eps must lie in (0, 1), got {eps}")));
    }
    Ok(WeakAttainer {
        game: catalog::example4(),
        eps,
        k: 0,
        gamma: vec![0.0; 2],
        scratch: vec![0.0; 2],
    })
}

const TARGET_EX4: [f64; 2] = [1.0, 1.0];

impl DelayStrategy for WeakAttainer {
    fn name(&self) -> String {
        format!("weak_ex4(eps={})", self.eps)
    }

    fn side(&self) -> Option<Side> {
        Some(Side::P1)
    }

    fn block_action(&mut self, _at: f64) -> Result<MixedAction> {
        if dist2(&self.gamma, &TARGET_EX4) < self.eps {
            Ok(MixedAction::pure(3, 2))
        } else {
            MixedAction::new(vec![self.eps, 1.0 - self.eps, 0.0])
        }
    }

    fn next_update(&mut self) -> f64 {
        self.k += 1;
        self.k as f64 * self.eps
    }

    fn observe(&mut self, seg: &Segment) {
        let len = seg.end - seg.start;
        self.game
            .mixed_payoff_into(seg.p.weights(), seg.q.weights(), &mut self.scratch);
        for (g, u) in self.gamma.iter_mut().zip(&self.scratch) {
            *g += len * u;
        }
    }

    fn updating_time(&self, k: u64) -> Option<f64> {
        Some(k as f64 * self.eps)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn harmonic_matches_direct_sum() {
        let mut direct = Compensated::default();
        for k in 1..=100_000u64 {
            direct.add(1.0 / k as f64);
            if k >= 60 && (k < 70 || k % 9973 == 0) {
                let h = harmonic(k);
                assert!((h - direct.value()).abs() < 1e-13, "k={k}");
            }
        }
        assert_eq!(harmonic(0), 0.0);
        assert_eq!(harmonic(1), 1.0);
        assert_eq!(harmonic(2), 1.5);
    }

    #[test]
    fn zero_attainer_times_are_harmonic() {
        let g = catalog::example1();
        let mut s = zero_attainer(&g, 0.1).unwrap();
        let _ = s.block_action(0.0).unwrap();
        let t1 = s.next_update();
        let _ = s.block_action(t1).unwrap();
        let t2 = s.next_update();
        assert_eq!(t1, 0.1);
        assert!((t2 - 0.15).abs() < 1e-16);
        assert!((s.updating_time(2).unwrap() - 0.15).abs() < 1e-16);
        assert!(zero_attainer(&g, 0.0).is_err());
    }

    #[test]
    fn zero_attainer_plays_last_action_at_zero() {
        let g = catalog::example4();
        let mut s = zero_attainer(&g, 0.5).unwrap();
        assert_eq!(s.block_action(0.0).unwrap().as_pure(), Some(2));
    }

    #[test]
    fn zero_attainer_steers_against_observed_payoff() {
        let g = catalog::example1();
        let mut s = zero_attainer(&g, 0.1).unwrap();
        let _ = s.block_action(0.0).unwrap();
        let t = s.next_update();
        let (u, l) = (MixedAction::pure(2, 0), MixedAction::pure(2, 0));
        s.observe(&Segment {
            start: 0.0,
            end: t,
            p: &u,
            q: &l,
        });
        // S < 0, so the block must push the payoff up: row B.
        assert!(s.observed_payoff()[0] < 0.0);
        assert_eq!(s.block_action(t).unwrap().as_pure(), Some(1));
    }

    #[test]
    fn weak_attainer_rejects_bad_eps() {
        assert!(weak_attainer_ex4(1.0).is_err());
        assert!(weak_attainer_ex4(0.0).is_err());
        assert!(weak_attainer_ex4(0.1).is_ok());
    }

    #[test]
    fn lock_after_picks_sign_preserving_column() {
        let g = catalog::example2();
        let mut s = lock_after(&g, 1, 0.05).unwrap();
        assert_eq!(s.block_action(0.0).unwrap().as_pure(), Some(1));
        let t = s.next_update();
        let (b, r) = (MixedAction::pure(2, 1), MixedAction::pure(2, 1));
        s.observe(&Segment {
            start: 0.0,
            end: t,
            p: &b,
            q: &r,
        });
        assert_eq!(s.block_action(t).unwrap().as_pure(), Some(1));
        assert_eq!(s.next_update(), f64::INFINITY);
    }
}
