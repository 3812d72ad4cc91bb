//! Continuous-time matches between strategies with delay.
//!
//! Both players' controls are piecewise constant, so the cumulative payoff
//! is piecewise linear and is integrated exactly: each interval between
//! consecutive updating times (of either player) adds its length times the
//! bilinear payoff of the two actions in force.

use std::fmt::Write as _;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::game::{check_len, dist2, Game, MixedAction};
use crate::strategies::{DelayStrategy, Segment, Side};

pub const DEFAULT_BLOCK_CAP: u64 = 100_000;
pub const MAX_TRAJECTORY_POINTS: usize = 1_000_000;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MatchConfig {
    pub horizon: f64,
    /// Largest number of blocks either player may use.
    pub block_cap: u64,
}

impl MatchConfig {
    pub fn new(horizon: f64) -> Self {
        MatchConfig {
            horizon,
            block_cap: DEFAULT_BLOCK_CAP,
        }
    }

    pub fn with_block_cap(mut self, cap: u64) -> Self {
        self.block_cap = cap;
        self
    }
}

/// One interval of play with the payoff at both ends.
#[derive(Debug, Clone, Copy)]
pub struct SegmentRecord<'a> {
    pub start: f64,
    pub end: f64,
    pub gamma_start: &'a [f64],
    pub gamma_end: &'a [f64],
    pub p: &'a MixedAction,
    pub q: &'a MixedAction,
}

/// Receives a match as it is played.
pub trait MatchObserver {
    fn on_segment(&mut self, seg: &SegmentRecord) -> Result<()>;

    /// `side` started block `k` at time `t` with cumulative payoff `gamma`.
    fn on_update(&mut self, _side: Side, _k: u64, _t: f64, _gamma: &[f64]) {}
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MatchSummary {
    pub horizon: f64,
    pub final_gamma: Vec<f64>,
    pub blocks: [u64; 2],
    pub segments: u64,
}

struct Player<'a> {
    side: Side,
    s: &'a mut dyn DelayStrategy,
    action: MixedAction,
    next: f64,
    k: u64,
}

impl<'a> Player<'a> {
    fn start(side: Side, s: &'a mut dyn DelayStrategy, n: usize, cfg: &MatchConfig) -> Result<Self> {
        if let Some(own) = s.side() {
            if own != side {
                return Err(Error::Precondition(format!(
                    "{} cannot play as {}",
                    s.name(),
                    side.name()
                )));
            }
        }
        if let Some(reached) = s.updating_time(cfg.block_cap) {
            if reached < cfg.horizon {
                return Err(Error::HorizonUnreachable {
                    player: side.name(),
                    horizon: cfg.horizon,
                    cap: cfg.block_cap,
                    reached,
                });
            }
        }
        let action = s.block_action(0.0)?;
        check_len("block action", n, action.len())?;
        let next = s.next_update();
        if !(next > 0.0) {
            return Err(Error::Strategy(format!("{}: first block has no length", s.name())));
        }
        Ok(Player {
            side,
            s,
            action,
            next,
            k: 0,
        })
    }

    fn advance(&mut self, t: f64, n: usize, cfg: &MatchConfig) -> Result<()> {
        self.k += 1;
        if self.k > cfg.block_cap {
            return Err(Error::HorizonUnreachable {
                player: self.side.name(),
                horizon: cfg.horizon,
                cap: cfg.block_cap,
                reached: t,
            });
        }
        self.action = self.s.block_action(t)?;
        check_len("block action", n, self.action.len())?;
        let next = self.s.next_update();
        if !(next > t) {
            return Err(Error::Strategy(format!(
                "{}: updating times must increase (block {} at {t:e}, next {next:e})",
                self.s.name(),
                self.k
            )));
        }
        self.next = next;
        Ok(())
    }
}

/// Plays `s1` against `s2` up to `cfg.horizon`, streaming every interval
/// to `obs`. At a common updating time Player 1's block policy runs first;
/// neither sees the other's new action.
pub fn run_match_observed(
    g: &Game,
    s1: &mut dyn DelayStrategy,
    s2: &mut dyn DelayStrategy,
    cfg: &MatchConfig,
    obs: &mut dyn MatchObserver,
) -> Result<MatchSummary> {
    if !(cfg.horizon > 0.0) || !cfg.horizon.is_finite() {
        return Err(Error::Precondition(format!(
            "horizon must be positive and finite, got {}",
            cfg.horizon
        )));
    }
    let m = g.m();
    let mut gamma = vec![0.0; m];
    let mut prev = vec![0.0; m];
    let mut u = vec![0.0; m];
    let mut p1 = Player::start(Side::P1, s1, g.n1(), cfg)?;
    obs.on_update(Side::P1, 0, 0.0, &gamma);
    let mut p2 = Player::start(Side::P2, s2, g.n2(), cfg)?;
    obs.on_update(Side::P2, 0, 0.0, &gamma);
    g.mixed_payoff_into(p1.action.weights(), p2.action.weights(), &mut u);

    let mut t = 0.0;
    let mut segments = 0u64;
    loop {
        let end = p1.next.min(p2.next).min(cfg.horizon);
        let len = end - t;
        std::mem::swap(&mut prev, &mut gamma);
        for ((x, a), v) in gamma.iter_mut().zip(&prev).zip(&u) {
            *x = a + len * v;
        }
        segments += 1;
        obs.on_segment(&SegmentRecord {
            start: t,
            end,
            gamma_start: &prev,
            gamma_end: &gamma,
            p: &p1.action,
            q: &p2.action,
        })?;
        let seg = Segment {
            start: t,
            end,
            p: &p1.action,
            q: &p2.action,
        };
        p1.s.observe(&seg);
        p2.s.observe(&seg);
        t = end;
        if t >= cfg.horizon {
            break;
        }
        let mut changed = false;
        if t == p1.next {
            p1.advance(t, g.n1(), cfg)?;
            obs.on_update(Side::P1, p1.k, t, &gamma);
            changed = true;
        }
        if t == p2.next {
            p2.advance(t, g.n2(), cfg)?;
            obs.on_update(Side::P2, p2.k, t, &gamma);
            changed = true;
        }
        if changed {
            g.mixed_payoff_into(p1.action.weights(), p2.action.weights(), &mut u);
        }
    }
    Ok(MatchSummary {
        horizon: cfg.horizon,
        final_gamma: gamma,
        blocks: [p1.k + 1, p2.k + 1],
        segments,
    })
}

/// Breakpoints, payoffs and controls of a finished match.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Trajectory {
    pub m: usize,
    /// Merged breakpoints `0 = t_0 < t_1 < ... = horizon`.
    pub times: Vec<f64>,
    /// `gamma[i]` is the cumulative payoff at `times[i]`.
    pub gamma: Vec<Vec<f64>>,
    /// Actions in force on `[times[i], times[i+1])`.
    pub p: Vec<MixedAction>,
    pub q: Vec<MixedAction>,
    pub blocks: [u64; 2],
}

struct Recorder {
    traj: Trajectory,
    limit: usize,
}

impl MatchObserver for Recorder {
    fn on_segment(&mut self, seg: &SegmentRecord) -> Result<()> {
        if self.traj.times.len() >= self.limit {
            return Err(Error::TrajectoryTooLong(self.limit));
        }
        self.traj.times.push(seg.end);
        self.traj.gamma.push(seg.gamma_end.to_vec());
        self.traj.p.push(seg.p.clone());
        self.traj.q.push(seg.q.clone());
        Ok(())
    }
}

pub fn run_match_with(
    g: &Game,
    s1: &mut dyn DelayStrategy,
    s2: &mut dyn DelayStrategy,
    cfg: &MatchConfig,
) -> Result<Trajectory> {
    let mut rec = Recorder {
        traj: Trajectory {
            m: g.m(),
            times: vec![0.0],
            gamma: vec![vec![0.0; g.m()]],
            p: Vec::new(),
            q: Vec::new(),
            blocks: [0, 0],
        },
        limit: MAX_TRAJECTORY_POINTS,
    };
    let summary = run_match_observed(g, s1, s2, cfg, &mut rec)?;
    rec.traj.blocks = summary.blocks;
    Ok(rec.traj)
}

/// [`run_match_with`] under the default block cap.
pub fn run_match(
    g: &Game,
    s1: &mut dyn DelayStrategy,
    s2: &mut dyn DelayStrategy,
    horizon: f64,
) -> Result<Trajectory> {
    run_match_with(g, s1, s2, &MatchConfig::new(horizon))
}

/// A target set for distance measurements.
#[derive(Debug, Clone, PartialEq)]
pub enum Target {
    Point(Vec<f64>),
    /// Axis-aligned box `[lo, hi]`.
    Box { lo: Vec<f64>, hi: Vec<f64> },
}

impl Target {
    pub fn distance(&self, x: &[f64]) -> f64 {
        match self {
            Target::Point(y) => dist2(x, y),
            Target::Box { lo, hi } => x
                .iter()
                .zip(lo.iter().zip(hi))
                .map(|(v, (a, b))| {
                    let d = if v < a { a - v } else if v > b { v - b } else { 0.0 };
                    d * d
                })
                .sum::<f64>()
                .sqrt(),
        }
    }

    fn dim(&self) -> usize {
        match self {
            Target::Point(y) => y.len(),
            Target::Box { lo, .. } => lo.len(),
        }
    }
}

impl Trajectory {
    pub fn horizon(&self) -> f64 {
        *self.times.last().expect("trajectories start at 0")
    }

    pub fn final_gamma(&self) -> &[f64] {
        self.gamma.last().expect("trajectories start at 0")
    }

    /// Cumulative payoff at time `t`, interpolated linearly.
    pub fn gamma_at(&self, t: f64) -> Vec<f64> {
        let i = self.times.partition_point(|&s| s <= t);
        if i == 0 {
            return self.gamma[0].clone();
        }
        if i >= self.times.len() {
            return self.final_gamma().to_vec();
        }
        let (t0, t1) = (self.times[i - 1], self.times[i]);
        let w = (t - t0) / (t1 - t0);
        self.gamma[i - 1]
            .iter()
            .zip(&self.gamma[i])
            .map(|(a, b)| a + w * (b - a))
            .collect()
    }

    /// CSV with header `t,gamma_1..,p_1..,q_1..`: one row per breakpoint,
    /// with the actions in force from that breakpoint on (the last row
    /// repeats the final actions).
    pub fn to_csv(&self) -> String {
        let mut out = String::from("t");
        for c in 1..=self.m {
            let _ = write!(out, ",gamma_{c}");
        }
        let n1 = self.p.first().map_or(0, |a| a.len());
        let n2 = self.q.first().map_or(0, |a| a.len());
        for i in 1..=n1 {
            let _ = write!(out, ",p_{i}");
        }
        for j in 1..=n2 {
            let _ = write!(out, ",q_{j}");
        }
        out.push('\n');
        for (i, t) in self.times.iter().enumerate() {
            let _ = write!(out, "{t:?}");
            for v in &self.gamma[i] {
                let _ = write!(out, ",{v:?}");
            }
            let k = i.min(self.p.len().saturating_sub(1));
            if let (Some(p), Some(q)) = (self.p.get(k), self.q.get(k)) {
                for v in p.weights().iter().chain(q.weights()) {
                    let _ = write!(out, ",{v:?}");
                }
            }
            out.push('\n');
        }
        out
    }
}

/// `sup` over `t` in `[from_time, horizon]` of the distance from the
/// payoff to `target`. The distance to a convex set is convex along each
/// linear piece, so breakpoints (and the interpolated start) suffice.
pub fn distance_to_target(traj: &Trajectory, target: &Target, from_time: f64) -> Result<f64> {
    check_len("target", traj.m, target.dim())?;
    if from_time > traj.horizon() {
        return Err(Error::Precondition(format!(
            "from_time {from_time} beyond horizon {}",
            traj.horizon()
        )));
    }
    let mut sup = target.distance(&traj.gamma_at(from_time));
    for (t, g) in traj.times.iter().zip(&traj.gamma) {
        if *t >= from_time {
            sup = sup.max(target.distance(g));
        }
    }
    Ok(sup)
}

/// Streaming variant of [`distance_to_target`] for runs too long to record.
#[derive(Debug, Clone)]
pub struct SupDistance {
    pub target: Target,
    pub from_time: f64,
    pub sup: f64,
    pub argsup: f64,
}

impl SupDistance {
    pub fn new(target: Target, from_time: f64) -> Self {
        SupDistance {
            target,
            from_time,
            sup: 0.0,
            argsup: f64::NAN,
        }
    }
}

impl MatchObserver for SupDistance {
    fn on_segment(&mut self, seg: &SegmentRecord) -> Result<()> {
        if seg.end < self.from_time {
            return Ok(());
        }
        let start_point: Vec<f64>;
        let (t0, g0) = if seg.start >= self.from_time {
            (seg.start, seg.gamma_start)
        } else {
            let w = (self.from_time - seg.start) / (seg.end - seg.start);
            start_point = seg
                .gamma_start
                .iter()
                .zip(seg.gamma_end)
                .map(|(a, b)| a + w * (b - a))
                .collect();
            (self.from_time, &start_point[..])
        };
        for (t, g) in [(t0, g0), (seg.end, seg.gamma_end)] {
            let d = self.target.distance(g);
            if d > self.sup || self.argsup.is_nan() {
                self.sup = d;
                self.argsup = t;
            }
        }
        Ok(())
    }
}

/// Observers can be chained.
impl<A: MatchObserver, B: MatchObserver> MatchObserver for (A, B) {
    fn on_segment(&mut self, seg: &SegmentRecord) -> Result<()> {
        self.0.on_segment(seg)?;
        self.1.on_segment(seg)
    }

    fn on_update(&mut self, side: Side, k: u64, t: f64, gamma: &[f64]) {
        self.0.on_update(side, k, t, gamma);
        self.1.on_update(side, k, t, gamma);
    }
}

/// Ignores everything.
pub struct NoObserver;

impl MatchObserver for NoObserver {
    fn on_segment(&mut self, _seg: &SegmentRecord) -> Result<()> {
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::{example1, example4};
    use crate::strategies::{cycle_pure, scripted, stationary, zero_attainer};

    #[test]
    fn always_b_stays_at_zero() {
        let g = example4();
        let mut b = stationary(MixedAction::pure(3, 2));
        let mut l = stationary(MixedAction::pure(2, 0));
        let tr = run_match(&g, &mut b, &mut l, 10.0).unwrap();
        assert!(tr.gamma.iter().all(|x| x == &[0.0, 0.0]));
        assert_eq!(tr.horizon(), 10.0);
    }

    #[test]
    fn stationary_pair_is_linear() {
        let g = example1();
        let p = MixedAction::new(vec![0.25, 0.75]).unwrap();
        let q = MixedAction::new(vec![0.6, 0.4]).unwrap();
        let mut a = stationary(p.clone());
        let mut b = stationary(q.clone());
        let tr = run_match(&g, &mut a, &mut b, 3.5).unwrap();
        let u = g.mixed_payoff(&p, &q).unwrap();
        assert_eq!(tr.times, vec![0.0, 3.5]);
        assert!((tr.final_gamma()[0] - 3.5 * u[0]).abs() < 1e-15);
    }

    #[test]
    fn unreachable_horizon_is_rejected_up_front() {
        let g = example1();
        let mut s = zero_attainer(&g, 0.05).unwrap();
        let mut l = stationary(MixedAction::pure(2, 0));
        match run_match(&g, &mut s, &mut l, 2.0) {
            Err(Error::HorizonUnreachable { cap, .. }) => assert_eq!(cap, DEFAULT_BLOCK_CAP),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn refining_the_partition_keeps_gamma() {
        let g = example1();
        let a = MixedAction::pure(2, 0);
        let b = MixedAction::new(vec![0.3, 0.7]).unwrap();
        let mut coarse = scripted(vec![0.0, 1.0], vec![a.clone(), b.clone()]).unwrap();
        let mut fine = scripted(
            vec![0.0, 0.25, 0.5, 1.0, 1.5],
            vec![a.clone(), a.clone(), a.clone(), b.clone(), b.clone()],
        )
        .unwrap();
        let mut c1 = cycle_pure(2, 0.3).unwrap();
        let mut c2 = cycle_pure(2, 0.3).unwrap();
        let x = run_match(&g, &mut coarse, &mut c1, 2.0).unwrap();
        let y = run_match(&g, &mut fine, &mut c2, 2.0).unwrap();
        assert!((x.final_gamma()[0] - y.final_gamma()[0]).abs() < 1e-12);
    }

    #[test]
    fn distance_examples() {
        let tr = Trajectory {
            m: 2,
            times: vec![0.0, 1.0],
            gamma: vec![vec![0.0, 0.0], vec![2.0, 0.0]],
            p: vec![MixedAction::pure(1, 0)],
            q: vec![MixedAction::pure(1, 0)],
            blocks: [1, 1],
        };
        let d = distance_to_target(&tr, &Target::Point(vec![1.0, 1.0]), 0.0).unwrap();
        assert!((d - 2f64.sqrt()).abs() < 1e-15);
        let d = distance_to_target(&tr, &Target::Point(vec![2.0, 0.0]), 0.5).unwrap();
        assert!((d - 1.0).abs() < 1e-15);
        let boxed = Target::Box {
            lo: vec![-1.0, -1.0],
            hi: vec![1.0, 1.0],
        };
        assert_eq!(distance_to_target(&tr, &boxed, 0.0).unwrap(), 1.0);
        assert!(distance_to_target(&tr, &boxed, 2.0).is_err());
    }

    #[test]
    fn csv_has_header_and_rows() {
        let g = example1();
        let mut a = stationary(MixedAction::pure(2, 1));
        let mut b = cycle_pure(2, 0.5).unwrap();
        let tr = run_match(&g, &mut a, &mut b, 1.0).unwrap();
        let csv = tr.to_csv();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "t,gamma_1,p_1,p_2,q_1,q_2");
        assert_eq!(lines.len(), 1 + tr.times.len());
        assert_eq!(lines[1], "0.0,0.0,0.0,1.0,1.0,0.0");
    }
}
