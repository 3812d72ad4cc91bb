//! Time changes and compositions of strategies.

use super::{zero_attainer, DelayStrategy, Segment, Side};
use crate::error::{Error, Result};
use crate::game::{Game, MixedAction};

/// `s` run `beta` times faster: whatever `s` does at its time `βt`, the
/// accelerated strategy does at time `t`, against the opponent's play
/// slowed down by the same factor.
pub struct Accelerate {
    inner: Box<dyn DelayStrategy>,
    beta: f64,
    /// Start of the current block in the inner clock.
    inner_at: f64,
}

pub fn accelerate(inner: Box<dyn DelayStrategy>, beta: f64) -> Result<Accelerate> {
    if !(beta > 0.0) || !beta.is_finite() {
        return Err(Error::Precondition(format!("beta must be positive, got {beta}")));
    }
    Ok(Accelerate {
        inner,
        beta,
        inner_at: 0.0,
    })
}

impl DelayStrategy for Accelerate {
    fn name(&self) -> String {
        format!("accelerate(beta={}, inner={})", self.beta, self.inner.name())
    }

    fn side(&self) -> Option<Side> {
        self.inner.side()
    }

    fn block_action(&mut self, _at: f64) -> Result<MixedAction> {
        self.inner.block_action(self.inner_at)
    }

    fn next_update(&mut self) -> f64 {
        self.inner_at = self.inner.next_update();
        self.inner_at / self.beta
    }

    fn observe(&mut self, seg: &Segment) {
        self.inner.observe(&Segment {
            start: seg.start * self.beta,
            end: seg.end * self.beta,
            ..*seg
        });
    }

    fn updating_time(&self, k: u64) -> Option<f64> {
        self.inner.updating_time(k).map(|t| t / self.beta)
    }
}

struct Lane {
    s: Box<dyn DelayStrategy>,
    action: Option<MixedAction>,
    /// Inner-clock start of the lane's next block.
    next_inner: f64,
    /// The same instant in real time.
    next_real: f64,
}

/// Plays `x` on `T₁ = ∪ [ℓ, ℓ+β)` and `y` on `T₂ = ∪ [ℓ+β, ℓ+1)`. Each lane
/// lives in its own clock `φ_j(t) = |[0, t) ∩ T_j|` and sees only the play
/// that happened during its own time set.
pub struct Interleave {
    x: Lane,
    y: Lane,
    beta: f64,
    /// Index `ℓ` of the current unit interval.
    piece: u64,
    in_first: bool,
    piece_end: f64,
}

pub fn interleave(
    x: Box<dyn DelayStrategy>,
    y: Box<dyn DelayStrategy>,
    beta: f64,
) -> Result<Interleave> {
    if !(beta > 0.0 && beta < 1.0) {
        return Err(Error::Precondition(format!("beta must lie in (0, 1), got {beta}")));
    }
    if let (Some(a), Some(b)) = (x.side(), y.side()) {
        if a != b {
            return Err(Error::Precondition("interleaved strategies play different sides".into()));
        }
    }
    let mut out = Interleave {
        x: Lane {
            s: x,
            action: None,
            next_inner: 0.0,
            next_real: 0.0,
        },
        y: Lane {
            s: y,
            action: None,
            next_inner: 0.0,
            next_real: 0.0,
        },
        beta,
        piece: 0,
        in_first: true,
        piece_end: beta,
    };
    out.y.next_real = out.real_of_second(0.0);
    Ok(out)
}

impl Interleave {
    fn real_of_first(&self, s: f64) -> f64 {
        if s.is_infinite() {
            return s;
        }
        let b = self.beta;
        let mut l = (s / b).floor();
        if l * b > s {
            l -= 1.0;
        } else if (l + 1.0) * b <= s {
            l += 1.0;
        }
        l + (s - l * b)
    }

    fn real_of_second(&self, s: f64) -> f64 {
        if s.is_infinite() {
            return s;
        }
        let w = 1.0 - self.beta;
        let mut l = (s / w).floor();
        if l * w > s {
            l -= 1.0;
        } else if (l + 1.0) * w <= s {
            l += 1.0;
        }
        l + self.beta + (s - l * w)
    }
}

impl DelayStrategy for Interleave {
    fn name(&self) -> String {
        format!(
            "interleave(beta={}, x={}, y={})",
            self.beta,
            self.x.s.name(),
            self.y.s.name()
        )
    }

    fn side(&self) -> Option<Side> {
        self.x.s.side().or(self.y.s.side())
    }

    fn block_action(&mut self, at: f64) -> Result<MixedAction> {
        if at == self.x.next_real {
            self.x.action = Some(self.x.s.block_action(self.x.next_inner)?);
            self.x.next_inner = self.x.s.next_update();
            self.x.next_real = self.real_of_first(self.x.next_inner);
        }
        if at == self.y.next_real {
            self.y.action = Some(self.y.s.block_action(self.y.next_inner)?);
            self.y.next_inner = self.y.s.next_update();
            self.y.next_real = self.real_of_second(self.y.next_inner);
        }
        if at == self.piece_end {
            if self.in_first {
                self.in_first = false;
                self.piece_end = (self.piece + 1) as f64;
            } else {
                self.in_first = true;
                self.piece += 1;
                self.piece_end = self.piece as f64 + self.beta;
            }
        }
        let lane = if self.in_first { &self.x } else { &self.y };
        lane.action
            .clone()
            .ok_or_else(|| Error::Strategy("interleaved lane has not started".into()))
    }

    fn next_update(&mut self) -> f64 {
        self.x.next_real.min(self.y.next_real).min(self.piece_end)
    }

    fn observe(&mut self, seg: &Segment) {
        let l = self.piece as f64;
        if self.in_first {
            let base = l * self.beta;
            self.x.s.observe(&Segment {
                start: base + (seg.start - l),
                end: base + (seg.end - l),
                ..*seg
            });
        } else {
            let base = l * (1.0 - self.beta);
            let origin = l + self.beta;
            self.y.s.observe(&Segment {
                start: base + (seg.start - origin),
                end: base + (seg.end - origin),
                ..*seg
            });
        }
    }
}

/// Follows `first` until `switch_at`, then `second` started afresh with its
/// clock shifted to begin at `switch_at`.
pub struct Sequence {
    first: Box<dyn DelayStrategy>,
    second: Box<dyn DelayStrategy>,
    switch_at: f64,
    in_second: bool,
}

impl Sequence {
    pub fn new(
        first: Box<dyn DelayStrategy>,
        second: Box<dyn DelayStrategy>,
        switch_at: f64,
    ) -> Result<Self> {
        if !(switch_at > 0.0) || !switch_at.is_finite() {
            return Err(Error::Precondition(format!(
                "switch time must be positive, got {switch_at}"
            )));
        }
        Ok(Sequence {
            first,
            second,
            switch_at,
            in_second: false,
        })
    }
}

impl DelayStrategy for Sequence {
    fn name(&self) -> String {
        format!(
            "sequence({} until {}, then {})",
            self.first.name(),
            self.switch_at,
            self.second.name()
        )
    }

    fn side(&self) -> Option<Side> {
        self.first.side().or(self.second.side())
    }

    fn block_action(&mut self, at: f64) -> Result<MixedAction> {
        if !self.in_second && at >= self.switch_at {
            self.in_second = true;
            return self.second.block_action(0.0);
        }
        if self.in_second {
            // The inner strategy tracks its own block starts.
            self.second.block_action(at - self.switch_at)
        } else {
            self.first.block_action(at)
        }
    }

    fn next_update(&mut self) -> f64 {
        if self.in_second {
            self.switch_at + self.second.next_update()
        } else {
            self.first.next_update().min(self.switch_at)
        }
    }

    fn observe(&mut self, seg: &Segment) {
        if self.in_second {
            self.second.observe(&Segment {
                start: seg.start - self.switch_at,
                end: seg.end - self.switch_at,
                ..*seg
            });
        } else {
            self.first.observe(seg);
        }
    }
}

/// Parameters of [`x_attainer`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct XAttainerParams {
    /// Translation `δ`: zero must be attainable in `G - δx`.
    pub delta: f64,
    /// Horizon `T` by which the zero attainer of `G - δx` has settled.
    pub t_zero: f64,
    /// Block scale of the zero attainer in `G - δx`.
    pub eta_first: f64,
    /// Block scale of the zero attainer that holds the payoff afterwards.
    pub eta_second: f64,
}

impl XAttainerParams {
    /// Block scales for which the worst-case bounds guarantee accuracy
    /// `eps`: `2η₁U'/(δT) <= eps/2` and `2η₂U <= eps/2`. These are usually
    /// far smaller than needed against concrete opponents and make long
    /// horizons unreachable.
    pub fn for_accuracy(g: &Game, x: &[f64], delta: f64, t_zero: f64, eps: f64) -> Result<Self> {
        let shift: Vec<f64> = x.iter().map(|c| delta * c).collect();
        let u_first = g.translate(&shift)?.payoff_bound();
        let u = g.payoff_bound();
        let safe = |v: f64| if v > 0.0 { v } else { 1.0 };
        Ok(XAttainerParams {
            delta,
            t_zero,
            eta_first: eps * delta * t_zero / (4.0 * safe(u_first)),
            eta_second: eps / (4.0 * safe(u)),
        })
    }
}

/// Player 1's strategy for a target `x` such that zero is attainable in
/// `G - δx`. Up to time `1/δ` it runs the zero attainer of `G - δx`
/// accelerated by `δT`, which brings the payoff close to `x`; afterwards a
/// fresh zero attainer of `G` holds the payoff at the point reached.
/// For `x = 0` it is the plain zero attainer of `G`.
pub fn x_attainer(g: &Game, x: &[f64], params: XAttainerParams) -> Result<Box<dyn DelayStrategy>> {
    crate::game::check_len("target", g.m(), x.len())?;
    let XAttainerParams {
        delta,
        t_zero,
        eta_first,
        eta_second,
    } = params;
    if x.iter().all(|&c| c == 0.0) {
        return Ok(Box::new(zero_attainer(g, eta_second)?));
    }
    if !(delta > 0.0) || !(t_zero > 0.0) || !delta.is_finite() || !t_zero.is_finite() {
        return Err(Error::Precondition(format!(
            "x attainer needs positive delta and T, got {delta} and {t_zero}"
        )));
    }
    let shift: Vec<f64> = x.iter().map(|c| delta * c).collect();
    let first = accelerate(
        Box::new(zero_attainer(&g.translate(&shift)?, eta_first)?),
        delta * t_zero,
    )?;
    let second = zero_attainer(g, eta_second)?;
    Ok(Box::new(Sequence::new(
        Box::new(first),
        Box::new(second),
        1.0 / delta,
    )?))
}
