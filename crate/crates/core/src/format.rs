//! Line-oriented text format for games.
//!
//! ```text
//! # comments and blank lines are ignored
//! game m=1 n1=2 n2=2
//! labels1: U B
//! labels2: L R
//! 0 0 -3
//! 0 1 -1
//! 1 0 1
//! 1 1 3
//! ```
//!
//! Entry lines are `<i> <j> v_1 ... v_m`. Every pair `(i, j)` must appear
//! exactly once. The printer emits entries in row-major order using the
//! shortest representation that round-trips each `f64`.

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::game::Game;

/// Upper bound on `n1 * n2 * m` accepted from text input.
pub const MAX_ENTRIES: usize = 1 << 22;

fn perr(line: usize, msg: impl Into<String>) -> Error {
    Error::Parse {
        line,
        msg: msg.into(),
    }
}

fn parse_header(line_no: usize, line: &str) -> Result<(usize, usize, usize)> {
    let mut tokens = line.split_whitespace();
    if tokens.next() != Some("game") {
        return Err(perr(line_no, "expected header `game m=<int> n1=<int> n2=<int>`"));
    }
    let (mut m, mut n1, mut n2) = (None, None, None);
    for tok in tokens {
        let (key, val) = tok
            .split_once('=')
            .ok_or_else(|| perr(line_no, format!("malformed header field `{tok}`")))?;
        let v: usize = val
            .parse()
            .map_err(|_| perr(line_no, format!("`{key}` is not a non-negative integer")))?;
        let slot = match key {
            "m" => &mut m,
            "n1" => &mut n1,
            "n2" => &mut n2,
            _ => return Err(perr(line_no, format!("unknown header field `{key}`"))),
        };
        if slot.replace(v).is_some() {
            return Err(perr(line_no, format!("duplicate header field `{key}`")));
        }
    }
    match (m, n1, n2) {
        (Some(m), Some(n1), Some(n2)) => {
            if m == 0 || n1 == 0 || n2 == 0 {
                return Err(perr(line_no, "dimensions must be positive"));
            }
            m.checked_mul(n1)
                .and_then(|x| x.checked_mul(n2))
                .filter(|&t| t <= MAX_ENTRIES)
                .map(|_| (m, n1, n2))
                .ok_or_else(|| perr(line_no, "game too large"))
        }
        _ => Err(perr(line_no, "header must define m, n1 and n2")),
    }
}

pub fn parse_game(text: &str) -> Result<Game> {
    let mut header = None;
    let mut labels1: Option<Vec<String>> = None;
    let mut labels2: Option<Vec<String>> = None;
    let mut seen: Vec<bool> = Vec::new();
    let mut payoffs: Vec<f64> = Vec::new();
    let mut last_line = 0;

    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        last_line = line_no;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let Some((m, n1, n2)) = header else {
            let h = parse_header(line_no, line)?;
            seen = vec![false; h.1 * h.2];
            payoffs = vec![0.0; h.0 * h.1 * h.2];
            header = Some(h);
            continue;
        };
        if let Some(rest) = line.strip_prefix("labels1:") {
            let names: Vec<String> = rest.split_whitespace().map(str::to_owned).collect();
            if names.len() != n1 {
                return Err(perr(line_no, format!("expected {n1} row labels, got {}", names.len())));
            }
            if labels1.replace(names).is_some() {
                return Err(perr(line_no, "duplicate labels1 line"));
            }
            continue;
        }
        if let Some(rest) = line.strip_prefix("labels2:") {
            let names: Vec<String> = rest.split_whitespace().map(str::to_owned).collect();
            if names.len() != n2 {
                return Err(perr(line_no, format!("expected {n2} column labels, got {}", names.len())));
            }
            if labels2.replace(names).is_some() {
                return Err(perr(line_no, "duplicate labels2 line"));
            }
            continue;
        }
        let tokens: Vec<&str> = line.split_whitespace().collect();
        if tokens.len() != 2 + m {
            return Err(perr(
                line_no,
                format!("entry line needs 2 indices and {m} payoff values, got {} tokens", tokens.len()),
            ));
        }
        let i: usize = tokens[0]
            .parse()
            .map_err(|_| perr(line_no, format!("bad row index `{}`", tokens[0])))?;
        let j: usize = tokens[1]
            .parse()
            .map_err(|_| perr(line_no, format!("bad column index `{}`", tokens[1])))?;
        if i >= n1 || j >= n2 {
            return Err(perr(line_no, format!("entry ({i}, {j}) out of range for {n1}x{n2}")));
        }
        let cell = i * n2 + j;
        if seen[cell] {
            return Err(perr(line_no, format!("duplicate entry ({i}, {j})")));
        }
        seen[cell] = true;
        for (c, tok) in tokens[2..].iter().enumerate() {
            let v: f64 = tok
                .parse()
                .map_err(|_| perr(line_no, format!("bad payoff value `{tok}`")))?;
            if !v.is_finite() {
                return Err(perr(line_no, format!("payoff value `{tok}` is not finite")));
            }
            payoffs[cell * m + c] = v;
        }
    }

    let Some((m, n1, n2)) = header else {
        return Err(perr(last_line.max(1), "missing `game` header"));
    };
    if let Some(cell) = seen.iter().position(|s| !s) {
        return Err(perr(
            last_line.max(1),
            format!("missing entry ({}, {})", cell / n2, cell % n2),
        ));
    }
    let mut g = Game::new(m, n1, n2, payoffs)?;
    g.set_labels(labels1, labels2);
    Ok(g)
}

pub fn print_game(g: &Game) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "game m={} n1={} n2={}", g.m(), g.n1(), g.n2());
    if let Some(l) = g.labels1() {
        let _ = writeln!(out, "labels1: {}", l.join(" "));
    }
    if let Some(l) = g.labels2() {
        let _ = writeln!(out, "labels2: {}", l.join(" "));
    }
    for i in 0..g.n1() {
        for j in 0..g.n2() {
            let _ = write!(out, "{i} {j}");
            for v in g.payoff(i, j) {
                let _ = write!(out, " {v:?}");
            }
            out.push('\n');
        }
    }
    out
}

/// Parses a vector such as `1,-2.5` or `[1, -2.5]` or `1 -2.5`.
pub fn parse_vector(text: &str) -> Result<Vec<f64>> {
    let inner = text.trim();
    let inner = inner
        .strip_prefix('[')
        .and_then(|s| s.strip_suffix(']'))
        .unwrap_or(inner);
    let parts: Vec<&str> = inner
        .split(|c: char| c == ',' || c.is_whitespace())
        .filter(|s| !s.is_empty())
        .collect();
    if parts.is_empty() {
        return Err(perr(1, "empty vector"));
    }
    parts
        .iter()
        .map(|p| {
            let v: f64 = p.parse().map_err(|_| perr(1, format!("bad number `{p}`")))?;
            if v.is_finite() {
                Ok(v)
            } else {
                Err(perr(1, format!("`{p}` is not finite")))
            }
        })
        .collect()
}
