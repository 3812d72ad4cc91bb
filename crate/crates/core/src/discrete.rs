//! Repeated play in discrete stages, used to contrast with continuous time.
//!
//! Stage payoffs are the bilinear payoff of the two mixed actions, so a
//! run is deterministic. The sign-counting adversary reads Player 1's
//! current mixed action before moving, which is more information than a
//! delay strategy ever has; runs record this in
//! [`DiscreteTrajectory::adversary_saw_current`].

use serde::Serialize;

use crate::error::{Error, Result};
use crate::game::{check_len, Game, MixedAction};
use crate::strategies::{parse_strategy, StrategyExpr, Value};

/// What a player knows before stage `stage` (0-based): the cumulative
/// payoff and both players' past actions.
pub struct History<'a> {
    pub stage: usize,
    pub sum: &'a [f64],
    pub p: &'a [MixedAction],
    pub q: &'a [MixedAction],
}

pub trait DiscreteStrategy {
    fn name(&self) -> String;
    fn action(&mut self, h: &History) -> MixedAction;
}

pub trait DiscreteAdversary {
    fn name(&self) -> String;

    /// Whether [`DiscreteAdversary::action`] reads Player 1's current
    /// mixed action.
    fn sees_current_action(&self) -> bool {
        false
    }

    /// `current` is `Some` only when the adversary sees it.
    fn action(&mut self, h: &History, current: Option<&MixedAction>) -> MixedAction;
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DiscreteTrajectory {
    /// `sums[l]` is the payoff after `l` stages; `sums[0] = 0`.
    pub sums: Vec<Vec<f64>>,
    pub p: Vec<MixedAction>,
    pub q: Vec<MixedAction>,
    pub adversary_saw_current: bool,
}

pub fn run_discrete(
    g: &Game,
    s1: &mut dyn DiscreteStrategy,
    s2: &mut dyn DiscreteAdversary,
    n_stages: usize,
) -> Result<DiscreteTrajectory> {
    if n_stages == 0 {
        return Err(Error::Precondition("at least one stage is needed".into()));
    }
    let sees = s2.sees_current_action();
    let mut sums = vec![vec![0.0; g.m()]];
    let mut ps: Vec<MixedAction> = Vec::with_capacity(n_stages);
    let mut qs: Vec<MixedAction> = Vec::with_capacity(n_stages);
    let mut u = vec![0.0; g.m()];
    for stage in 0..n_stages {
        let h = History {
            stage,
            sum: &sums[stage],
            p: &ps,
            q: &qs,
        };
        let p = s1.action(&h);
        check_len("player 1 action", g.n1(), p.len())?;
        let q = s2.action(&h, sees.then_some(&p));
        check_len("player 2 action", g.n2(), q.len())?;
        g.mixed_payoff_into(p.weights(), q.weights(), &mut u);
        let next: Vec<f64> = sums[stage].iter().zip(&u).map(|(s, x)| s + x).collect();
        sums.push(next);
        ps.push(p);
        qs.push(q);
    }
    Ok(DiscreteTrajectory {
        sums,
        p: ps,
        q: qs,
        adversary_saw_current: sees,
    })
}

/// Always the same mixed action; with a uniform action this is the
/// i.i.d. uniform player.
pub struct Constant(pub MixedAction);

impl DiscreteStrategy for Constant {
    fn name(&self) -> String {
        format!("constant({:?})", self.0.weights())
    }

    fn action(&mut self, _h: &History) -> MixedAction {
        self.0.clone()
    }
}

/// Cycles through the pure actions `0, 1, ..., n-1`.
pub struct Alternating {
    pub n: usize,
}

impl DiscreteStrategy for Alternating {
    fn name(&self) -> String {
        "alternating".into()
    }

    fn action(&mut self, h: &History) -> MixedAction {
        MixedAction::pure(self.n, h.stage % self.n)
    }
}

/// Plays `positive` while the first payoff coordinate is positive and
/// `otherwise` else: the discrete analogue of the block strategy that
/// attains zero in continuous time.
pub struct SignBased {
    pub n: usize,
    pub positive: usize,
    pub otherwise: usize,
}

impl DiscreteStrategy for SignBased {
    fn name(&self) -> String {
        "sign".into()
    }

    fn action(&mut self, h: &History) -> MixedAction {
        let i = if h.sum[0] > 0.0 { self.positive } else { self.otherwise };
        MixedAction::pure(self.n, i)
    }
}

/// Plays column 0 when Player 1's current weight on row 0 is at least one
/// half, and column 1 otherwise.
pub struct SignCounter {
    pub n2: usize,
}

pub fn sign_counter_discrete(g: &Game) -> Result<SignCounter> {
    if g.n1() < 1 || g.n2() < 2 {
        return Err(Error::Precondition(
            "sign counter needs at least two columns".into(),
        ));
    }
    Ok(SignCounter { n2: g.n2() })
}

impl DiscreteAdversary for SignCounter {
    fn name(&self) -> String {
        "sign_counter".into()
    }

    fn sees_current_action(&self) -> bool {
        true
    }

    fn action(&mut self, _h: &History, current: Option<&MixedAction>) -> MixedAction {
        let up = current.map_or(0.0, |p| p.weights()[0]);
        MixedAction::pure(self.n2, if up >= 0.5 { 0 } else { 1 })
    }
}

/// An adversary that ignores everything.
pub struct ConstantAdversary(pub MixedAction);

impl DiscreteAdversary for ConstantAdversary {
    fn name(&self) -> String {
        format!("constant({:?})", self.0.weights())
    }

    fn action(&mut self, _h: &History, _current: Option<&MixedAction>) -> MixedAction {
        self.0.clone()
    }
}

/// The five scripted Player 1 strategies for a two-row game, by name.
pub fn scripted_player1(name: &str, g: &Game) -> Result<Box<dyn DiscreteStrategy>> {
    let n = g.n1();
    let last = n - 1;
    Ok(match name {
        "pure_u" => Box::new(Constant(MixedAction::pure(n, 0))),
        "pure_b" => Box::new(Constant(MixedAction::pure(n, last))),
        "uniform" => Box::new(Constant(MixedAction::uniform(n))),
        "alternating" => Box::new(Alternating { n }),
        "sign" => Box::new(SignBased {
            n,
            positive: 0,
            otherwise: last,
        }),
        _ => return Err(Error::Precondition(format!("unknown discrete strategy `{name}`"))),
    })
}

pub const SCRIPTED_PLAYER1: [&str; 5] = ["pure_u", "pure_b", "uniform", "alternating", "sign"];

fn no_args(e: &StrategyExpr) -> Result<()> {
    match e.args.keys().next() {
        Some(k) => Err(Error::Precondition(format!("`{}` takes no argument `{k}`", e.name))),
        None => Ok(()),
    }
}

fn pure_index(e: &StrategyExpr, n: usize) -> Result<MixedAction> {
    match (e.args.get("i"), e.args.len()) {
        (Some(Value::Number(i)), 1) if i.fract() == 0.0 && *i >= 0.0 && (*i as usize) < n => {
            Ok(MixedAction::pure(n, *i as usize))
        }
        _ => Err(Error::Precondition(format!("`pure` needs i in 0..{n}"))),
    }
}

fn weights(e: &StrategyExpr, key: &str) -> Result<MixedAction> {
    match (e.args.get(key), e.args.len()) {
        (Some(Value::List(w)), 1) => MixedAction::new(w.clone()),
        _ => Err(Error::Precondition(format!("`{}` needs {key}=[...]", e.name))),
    }
}

/// Player 1 discrete strategies: `pure(i=..)`, `uniform()`,
/// `alternating()`, `sign()`, `stationary(p=[..])`, or one of the
/// scripted names such as `pure_b()`.
pub fn parse_discrete_player1(text: &str, g: &Game) -> Result<Box<dyn DiscreteStrategy>> {
    let e = parse_strategy(text)?;
    match e.name.as_str() {
        "pure" => Ok(Box::new(Constant(pure_index(&e, g.n1())?))),
        "stationary" => {
            let p = weights(&e, "p")?;
            check_len("player 1 action", g.n1(), p.len())?;
            Ok(Box::new(Constant(p)))
        }
        name => {
            no_args(&e)?;
            scripted_player1(name, g)
        }
    }
}

/// Player 2 discrete strategies: `sign_counter()`, `pure(i=..)` or
/// `stationary(q=[..])`.
pub fn parse_discrete_player2(text: &str, g: &Game) -> Result<Box<dyn DiscreteAdversary>> {
    let e = parse_strategy(text)?;
    match e.name.as_str() {
        "sign_counter" => {
            no_args(&e)?;
            Ok(Box::new(sign_counter_discrete(g)?))
        }
        "pure" => Ok(Box::new(ConstantAdversary(pure_index(&e, g.n2())?))),
        "stationary" => {
            let q = weights(&e, "q")?;
            check_len("player 2 action", g.n2(), q.len())?;
            Ok(Box::new(ConstantAdversary(q)))
        }
        other => Err(Error::Precondition(format!("unknown discrete adversary `{other}`"))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::example1;

    fn run(name: &str, n: usize) -> DiscreteTrajectory {
        let g = example1();
        let mut s1 = scripted_player1(name, &g).unwrap();
        let mut s2 = sign_counter_discrete(&g).unwrap();
        run_discrete(&g, s1.as_mut(), &mut s2, n).unwrap()
    }

    #[test]
    fn pure_u_is_met_by_left() {
        let tr = run("pure_u", 20);
        assert!(tr.adversary_saw_current);
        for (l, s) in tr.sums.iter().enumerate() {
            assert_eq!(s[0], -3.0 * l as f64);
        }
        assert!(tr.q.iter().all(|q| q.as_pure() == Some(0)));
    }

    #[test]
    fn pure_b_is_met_by_right() {
        let tr = run("pure_b", 20);
        for (l, s) in tr.sums.iter().enumerate() {
            assert_eq!(s[0], 3.0 * l as f64);
        }
    }

    #[test]
    fn uniform_is_met_by_left() {
        let tr = run("uniform", 10);
        assert!(tr.q.iter().all(|q| q.as_pure() == Some(0)));
        assert_eq!(tr.sums[10][0], -10.0);
    }

    #[test]
    fn zero_game_stays_at_zero() {
        let g = Game::new(1, 2, 2, vec![0.0; 4]).unwrap();
        let mut s1 = scripted_player1("sign", &g).unwrap();
        let mut s2 = sign_counter_discrete(&g).unwrap();
        let tr = run_discrete(&g, s1.as_mut(), &mut s2, 50).unwrap();
        assert!(tr.sums.iter().all(|s| s[0] == 0.0));
    }

    #[test]
    fn half_of_the_stages_are_far_from_zero() {
        for name in SCRIPTED_PLAYER1 {
            let tr = run(name, 100);
            let far = tr.sums[1..].iter().filter(|s| s[0].abs() > 0.5).count();
            assert!(far >= 50, "{name}: {far}");
        }
    }

    #[test]
    fn parses_discrete_players() {
        let g = example1();
        assert!(parse_discrete_player1("pure(i=1)", &g).is_ok());
        assert!(parse_discrete_player1("stationary(p=[0.2,0.8])", &g).is_ok());
        assert!(parse_discrete_player1("uniform()", &g).is_ok());
        assert!(parse_discrete_player1("uniform(x=1)", &g).is_err());
        assert!(parse_discrete_player1("pure(i=2)", &g).is_err());
        assert!(parse_discrete_player2("sign_counter()", &g).is_ok());
        assert!(parse_discrete_player2("magic()", &g).is_err());
    }

    #[test]
    fn zero_stages_are_rejected() {
        let g = example1();
        let mut s1 = Constant(MixedAction::pure(2, 0));
        let mut s2 = ConstantAdversary(MixedAction::pure(2, 0));
        assert!(run_discrete(&g, &mut s1, &mut s2, 0).is_err());
    }
}
