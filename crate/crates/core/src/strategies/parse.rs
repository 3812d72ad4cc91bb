//! Strategy expressions such as `zero_attainer(eta=0.1)` or
//! `accelerate(beta=2, inner=stationary(q=[0.3,0.7]))`.
//!
//! ```text
//! expr  := name '(' [arg (',' arg)*] ')'
//! arg   := name '=' value
//! value := number | '[' [number (',' number)*] ']' | expr
//! ```

use std::collections::BTreeMap;

use super::transform::{accelerate, interleave, x_attainer, XAttainerParams};
use super::{block_switching, cycle, cycle_pure, lock_after, stationary, weak_attainer_ex4, zero_attainer, DelayStrategy, Side};
use crate::error::{Error, Result};
use crate::game::{Game, MixedAction};

const MAX_DEPTH: usize = 16;
const MAX_LEN: usize = 4096;

#[derive(Debug, Clone, PartialEq)]
pub enum Value {
    Number(f64),
    List(Vec<f64>),
    Expr(StrategyExpr),
}

#[derive(Debug, Clone, PartialEq)]
pub struct StrategyExpr {
    pub name: String,
    pub args: BTreeMap<String, Value>,
}

fn err(pos: usize, msg: impl Into<String>) -> Error {
    Error::Parse {
        line: 1,
        msg: format!("column {}: {}", pos + 1, msg.into()),
    }
}

struct Parser<'a> {
    s: &'a [u8],
    pos: usize,
}

impl<'a> Parser<'a> {
    fn skip_ws(&mut self) {
        while self.pos < self.s.len() && self.s[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.s.get(self.pos).copied()
    }

    fn expect(&mut self, c: u8) -> Result<()> {
        if self.peek() == Some(c) {
            self.pos += 1;
            Ok(())
        } else {
            Err(err(self.pos, format!("expected `{}`", c as char)))
        }
    }

    fn ident(&mut self) -> Result<String> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.s.len()
            && (self.s[self.pos].is_ascii_alphanumeric() || self.s[self.pos] == b'_')
        {
            self.pos += 1;
        }
        if start == self.pos || self.s[start].is_ascii_digit() {
            return Err(err(start, "expected a name"));
        }
        Ok(String::from_utf8_lossy(&self.s[start..self.pos]).into_owned())
    }

    fn number(&mut self) -> Result<f64> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.s.len()
            && matches!(self.s[self.pos], b'0'..=b'9' | b'.' | b'-' | b'+' | b'e' | b'E')
        {
            self.pos += 1;
        }
        let text = std::str::from_utf8(&self.s[start..self.pos]).map_err(|_| err(start, "bad number"))?;
        let v: f64 = text
            .parse()
            .map_err(|_| err(start, format!("bad number `{text}`")))?;
        if !v.is_finite() {
            return Err(err(start, "number is not finite"));
        }
        Ok(v)
    }

    fn value(&mut self, depth: usize) -> Result<Value> {
        match self.peek() {
            Some(b'[') => {
                self.pos += 1;
                let mut items = Vec::new();
                if self.peek() == Some(b']') {
                    self.pos += 1;
                    return Ok(Value::List(items));
                }
                loop {
                    items.push(self.number()?);
                    match self.peek() {
                        Some(b',') => self.pos += 1,
                        Some(b']') => {
                            self.pos += 1;
                            return Ok(Value::List(items));
                        }
                        _ => return Err(err(self.pos, "expected `,` or `]`")),
                    }
                }
            }
            Some(c) if c.is_ascii_alphabetic() || c == b'_' => Ok(Value::Expr(self.expr(depth + 1)?)),
            Some(_) => Ok(Value::Number(self.number()?)),
            None => Err(err(self.pos, "expected a value")),
        }
    }

    fn expr(&mut self, depth: usize) -> Result<StrategyExpr> {
        if depth > MAX_DEPTH {
            return Err(err(self.pos, "expression nested too deeply"));
        }
        let name = self.ident()?;
        self.expect(b'(')?;
        let mut args = BTreeMap::new();
        if self.peek() == Some(b')') {
            self.pos += 1;
            return Ok(StrategyExpr { name, args });
        }
        loop {
            let at = self.pos;
            let key = self.ident()?;
            self.expect(b'=')?;
            let v = self.value(depth)?;
            if args.insert(key.clone(), v).is_some() {
                return Err(err(at, format!("duplicate argument `{key}`")));
            }
            match self.peek() {
                Some(b',') => self.pos += 1,
                Some(b')') => {
                    self.pos += 1;
                    return Ok(StrategyExpr { name, args });
                }
                _ => return Err(err(self.pos, "expected `,` or `)`")),
            }
        }
    }
}

pub fn parse_strategy(text: &str) -> Result<StrategyExpr> {
    if text.len() > MAX_LEN {
        return Err(err(0, "strategy expression too long"));
    }
    let mut p = Parser {
        s: text.as_bytes(),
        pos: 0,
    };
    let e = p.expr(0)?;
    p.skip_ws();
    if p.pos != p.s.len() {
        return Err(err(p.pos, "trailing input"));
    }
    Ok(e)
}

impl StrategyExpr {
    fn take(&self, key: &str) -> Result<&Value> {
        self.args
            .get(key)
            .ok_or_else(|| Error::Precondition(format!("{}: missing argument `{key}`", self.name)))
    }

    fn number(&self, key: &str) -> Result<f64> {
        match self.take(key)? {
            Value::Number(v) => Ok(*v),
            _ => Err(Error::Precondition(format!("{}: `{key}` must be a number", self.name))),
        }
    }

    fn number_or(&self, key: &str, default: f64) -> Result<f64> {
        if self.args.contains_key(key) {
            self.number(key)
        } else {
            Ok(default)
        }
    }

    fn index(&self, key: &str, n: usize) -> Result<usize> {
        let v = self.number(key)?;
        if v < 0.0 || v.fract() != 0.0 || v >= n as f64 {
            return Err(Error::Precondition(format!(
                "{}: `{key}` must be an action index below {n}",
                self.name
            )));
        }
        Ok(v as usize)
    }

    fn list(&self, key: &str) -> Result<&[f64]> {
        match self.take(key)? {
            Value::List(v) => Ok(v),
            _ => Err(Error::Precondition(format!("{}: `{key}` must be a list", self.name))),
        }
    }

    fn expr(&self, key: &str) -> Result<&StrategyExpr> {
        match self.take(key)? {
            Value::Expr(e) => Ok(e),
            _ => Err(Error::Precondition(format!("{}: `{key}` must be a strategy", self.name))),
        }
    }

    fn only(&self, allowed: &[&str]) -> Result<()> {
        match self.args.keys().find(|k| !allowed.contains(&k.as_str())) {
            Some(k) => Err(Error::Precondition(format!("{}: unknown argument `{k}`", self.name))),
            None => Ok(()),
        }
    }
}

/// Instantiates a parsed expression for one side of `g`.
pub fn build_strategy(e: &StrategyExpr, g: &Game, side: Side) -> Result<Box<dyn DelayStrategy>> {
    let n = match side {
        Side::P1 => g.n1(),
        Side::P2 => g.n2(),
    };
    let s: Box<dyn DelayStrategy> = match e.name.as_str() {
        "zero_attainer" => {
            e.only(&["eta"])?;
            Box::new(zero_attainer(g, e.number("eta")?)?)
        }
        "stationary" => {
            e.only(&["q", "p"])?;
            let w = e.list("q").or_else(|_| e.list("p"))?;
            crate::game::check_len("stationary action", n, w.len())?;
            Box::new(stationary(MixedAction::new(w.to_vec())?))
        }
        "pure" => {
            e.only(&["i"])?;
            Box::new(stationary(MixedAction::pure(n, e.index("i", n)?)))
        }
        "cycle" => {
            e.only(&["period", "actions"])?;
            let period = e.number("period")?;
            if e.args.contains_key("actions") {
                let acts = e
                    .list("actions")?
                    .iter()
                    .map(|&v| {
                        if v < 0.0 || v.fract() != 0.0 || v >= n as f64 {
                            Err(Error::Precondition(format!("cycle: bad action index {v}")))
                        } else {
                            Ok(MixedAction::pure(n, v as usize))
                        }
                    })
                    .collect::<Result<Vec<_>>>()?;
                Box::new(cycle(acts, period)?)
            } else {
                Box::new(cycle_pure(n, period)?)
            }
        }
        "switch" => {
            e.only(&["eta"])?;
            Box::new(block_switching(n, e.number("eta")?)?)
        }
        "lock" => {
            e.only(&["initial", "observe"])?;
            Box::new(lock_after(g, e.index("initial", g.n2())?, e.number("observe")?)?)
        }
        "weak_ex4" => {
            e.only(&["eps"])?;
            if g != &crate::catalog::example4() {
                return Err(Error::Precondition("weak_ex4 is bound to the example4 game".into()));
            }
            Box::new(weak_attainer_ex4(e.number("eps")?)?)
        }
        "accelerate" => {
            e.only(&["beta", "inner"])?;
            let inner = build_strategy(e.expr("inner")?, g, side)?;
            Box::new(accelerate(inner, e.number("beta")?)?)
        }
        "interleave" => {
            e.only(&["beta", "x", "y"])?;
            let x = build_strategy(e.expr("x")?, g, side)?;
            let y = build_strategy(e.expr("y")?, g, side)?;
            Box::new(interleave(x, y, e.number("beta")?)?)
        }
        "x_attainer" => {
            e.only(&["x", "delta", "T", "eta1", "eta2", "eps"])?;
            let x = e.list("x")?;
            let delta = e.number("delta")?;
            let t_zero = e.number_or("T", 2.0)?;
            let params = if e.args.contains_key("eps") {
                XAttainerParams::for_accuracy(g, x, delta, t_zero, e.number("eps")?)?
            } else {
                XAttainerParams {
                    delta,
                    t_zero,
                    eta_first: e.number("eta1")?,
                    eta_second: e.number("eta2")?,
                }
            };
            x_attainer(g, x, params)?
        }
        other => return Err(Error::Precondition(format!("unknown strategy `{other}`"))),
    };
    if let Some(s_side) = s.side() {
        if s_side != side {
            return Err(Error::Precondition(format!(
                "{} plays for {}, not {}",
                e.name,
                s_side.name(),
                side.name()
            )));
        }
    }
    Ok(s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;

    #[test]
    fn parses_nested_expressions() {
        let e = parse_strategy("accelerate(beta=2, inner=stationary(q=[0.3, 0.7]))").unwrap();
        assert_eq!(e.name, "accelerate");
        assert_eq!(e.args["beta"], Value::Number(2.0));
        match &e.args["inner"] {
            Value::Expr(inner) => assert_eq!(inner.args["q"], Value::List(vec![0.3, 0.7])),
            v => panic!("unexpected {v:?}"),
        }
        assert!(parse_strategy("zero_attainer()").unwrap().args.is_empty());
    }

    #[test]
    fn rejects_malformed_text() {
        for bad in [
            "",
            "zero_attainer",
            "zero_attainer(eta=)",
            "zero_attainer(eta=0.1",
            "zero_attainer(eta=0.1) x",
            "zero_attainer(eta=0.1, eta=0.2)",
            "stationary(q=[0.3,,0.7])",
            "1x(a=1)",
            "f(a=inf)",
        ] {
            assert!(parse_strategy(bad).is_err(), "accepted {bad:?}");
        }
        let deep = "a(x=".repeat(40) + "b()" + &")".repeat(40);
        assert!(parse_strategy(&deep).is_err());
    }

    #[test]
    fn builds_for_the_right_side() {
        let g = catalog::example1();
        let e = parse_strategy("zero_attainer(eta=0.1)").unwrap();
        assert!(build_strategy(&e, &g, Side::P1).is_ok());
        assert!(build_strategy(&e, &g, Side::P2).is_err());
        let e = parse_strategy("stationary(q=[0.5,0.5])").unwrap();
        assert!(build_strategy(&e, &g, Side::P2).is_ok());
        let e = parse_strategy("stationary(q=[1])").unwrap();
        assert!(build_strategy(&e, &g, Side::P2).is_err());
        let e = parse_strategy("weak_ex4(eps=0.1)").unwrap();
        assert!(build_strategy(&e, &g, Side::P1).is_err());
        assert!(build_strategy(&e, &catalog::example4(), Side::P1).is_ok());
        let e = parse_strategy("zero_attainer(eta=0.1, bogus=1)").unwrap();
        assert!(build_strategy(&e, &g, Side::P1).is_err());
    }
}
