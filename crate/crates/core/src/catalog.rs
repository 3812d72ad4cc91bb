//! The bundled games.

use crate::error::{Error, Result};
use crate::game::Game;

/// Stock-change matrix of the two-warehouse network: columns are the
/// factory-to-A, A-to-B and factory-to-B flows.
pub const FLOW_MATRIX: [[f64; 3]; 2] = [[1.0, -1.0, 0.0], [0.0, 1.0, 1.0]];

/// Distributor actions, in the order the game uses.
pub const NETWORK_ROWS: [[f64; 3]; 8] = [
    [5.0, 5.0, 5.0],
    [5.0, 5.0, -5.0],
    [5.0, -5.0, 5.0],
    [5.0, -5.0, -5.0],
    [-5.0, 5.0, 5.0],
    [-5.0, 5.0, -5.0],
    [-5.0, -5.0, 5.0],
    [-5.0, -5.0, -5.0],
];

/// Market demand actions.
pub const NETWORK_COLS: [[f64; 2]; 4] = [[-3.0, -3.0], [-3.0, 2.0], [2.0, -3.0], [2.0, 2.0]];

/// The payoff table as printed in the source, row by row in
/// [`NETWORK_ROWS`] order.
pub const NETWORK_TABLE: [[[f64; 2]; 4]; 8] = [
    [[3.0, 13.0], [3.0, 8.0], [-2.0, 13.0], [-2.0, 8.0]],
    [[3.0, 3.0], [3.0, -2.0], [-2.0, 3.0], [-2.0, -2.0]],
    [[13.0, 3.0], [13.0, -2.0], [8.0, 3.0], [8.0, -2.0]],
    [[13.0, -7.0], [13.0, -12.0], [8.0, -7.0], [8.0, -12.0]],
    [[-7.0, 13.0], [-7.0, 8.0], [-12.0, -13.0], [-12.0, 8.0]],
    [[-7.0, 3.0], [-7.0, -2.0], [-12.0, 3.0], [-12.0, -2.0]],
    [[3.0, 3.0], [3.0, -2.0], [-2.0, 3.0], [-2.0, -2.0]],
    [[3.0, -7.0], [3.0, -12.0], [-2.0, -7.0], [-2.0, -12.0]],
];

/// Printed entries known to disagree with the flow formula:
/// `(row, col, printed, formula)`. The printed `-13` is a sign slip.
pub const NETWORK_ERRATA: [(usize, usize, [f64; 2], [f64; 2]); 1] =
    [(4, 2, [-12.0, -13.0], [-12.0, 13.0])];

fn flow(a1: &[f64; 3], a2: &[f64; 2]) -> [f64; 2] {
    let f = FLOW_MATRIX;
    [
        f[0][0] * a1[0] + f[0][1] * a1[1] + f[0][2] * a1[2] - a2[0],
        f[1][0] * a1[0] + f[1][1] * a1[1] + f[1][2] * a1[2] - a2[1],
    ]
}

/// Entries where the printed table and `F·a₁ - a₂` differ:
/// `(row, col, printed, formula)`.
pub fn network_table_discrepancies() -> Vec<(usize, usize, [f64; 2], [f64; 2])> {
    let mut out = Vec::new();
    for (i, a1) in NETWORK_ROWS.iter().enumerate() {
        for (j, a2) in NETWORK_COLS.iter().enumerate() {
            let want = flow(a1, a2);
            if NETWORK_TABLE[i][j] != want {
                out.push((i, j, NETWORK_TABLE[i][j], want));
            }
        }
    }
    out
}

fn fmt_action(a: &[f64]) -> String {
    let parts: Vec<String> = a.iter().map(|v| format!("{v}")).collect();
    format!("({})", parts.join(","))
}

/// Two-warehouse distribution network: 8 distributor actions, 4 demand
/// actions, stock change `F·a₁ - a₂`. Payoffs come from the formula; the
/// printed table is cross-checked and any mismatch beyond the documented
/// errata is an error.
pub fn build_network_game() -> Result<Game> {
    let found = network_table_discrepancies();
    if found[..] != NETWORK_ERRATA[..] {
        return Err(Error::InvalidGame(format!(
            "network table disagrees with the flow formula at {found:?}"
        )));
    }
    let g = Game::from_fn(2, 8, 4, |i, j| flow(&NETWORK_ROWS[i], &NETWORK_COLS[j]).to_vec())?;
    g.with_labels(
        NETWORK_ROWS.iter().map(|a| fmt_action(a)).collect(),
        NETWORK_COLS.iter().map(|a| fmt_action(a)).collect(),
    )
}

fn labels(names: &[&str]) -> Vec<String> {
    names.iter().map(|s| s.to_string()).collect()
}

/// Scalar game in which no discrete-time strategy keeps the running sum
/// near zero, while the continuous-time game attains zero.
pub fn example1() -> Game {
    Game::new(1, 2, 2, vec![-3.0, -1.0, 1.0, 3.0])
        .and_then(|g| g.with_labels(labels(&["U", "B"]), labels(&["L", "R"])))
        .expect("static game")
}

/// Scalar game where every direction has value zero: zero is attainable
/// but not asymptotically attainable. The source describes the payoffs as
/// both two-dimensional and scalar; the printed table is scalar, so this
/// game uses `m = 1`.
pub fn example2() -> Game {
    Game::new(1, 2, 2, vec![1.0, 0.0, 0.0, -1.0])
        .and_then(|g| g.with_labels(labels(&["U", "B"]), labels(&["L", "R"])))
        .expect("static game")
}

/// Game where `(1, 1)` is weakly asymptotically attainable but not
/// attainable, and `(0, 0)` is attainable by always playing `B`.
pub fn example4() -> Game {
    #[rustfmt::skip]
    let payoffs = vec![
        1.0, 1.0,   0.0, 1.0,
        0.0, 0.0,   1.0, 1.0,
        0.0, 0.0,   0.0, 0.0,
    ];
    Game::new(2, 3, 2, payoffs)
        .and_then(|g| g.with_labels(labels(&["U", "M", "B"]), labels(&["L", "R"])))
        .expect("static game")
}

/// Three-node variant of the network where the factory also sells
/// directly: `m = 3`, with a third demand stream at the factory.
pub fn factory_network() -> Result<Game> {
    let f = [[1.0, -1.0, 0.0], [0.0, 1.0, 1.0], [-1.0, 0.0, -1.0]];
    let cols: Vec<[f64; 3]> = {
        let mut v = Vec::new();
        for a in [-3.0, 2.0] {
            for b in [-3.0, 2.0] {
                for c in [-3.0, 2.0] {
                    v.push([a, b, c]);
                }
            }
        }
        v
    };
    let g = Game::from_fn(3, 8, 8, |i, j| {
        let a1 = NETWORK_ROWS[i];
        (0..3)
            .map(|r| f[r][0] * a1[0] + f[r][1] * a1[1] + f[r][2] * a1[2] - cols[j][r])
            .collect()
    })?;
    g.with_labels(
        NETWORK_ROWS.iter().map(|a| fmt_action(a)).collect(),
        cols.iter().map(|a| fmt_action(a)).collect(),
    )
}

pub fn by_name(name: &str) -> Option<Game> {
    match name {
        "network" => build_network_game().ok(),
        "example1" => Some(example1()),
        "example2" => Some(example2()),
        "example4" => Some(example4()),
        "factory" => factory_network().ok(),
        _ => None,
    }
}

pub const NAMES: [&str; 5] = ["network", "example1", "example2", "example4", "factory"];

#[cfg(test)]
mod tests {
    use super::*;
    use crate::format::{parse_game, print_game};

    #[test]
    fn network_entries_match_formula() {
        let g = build_network_game().unwrap();
        assert_eq!(g.payoff(0, 0), &[3.0, 13.0]);
        assert_eq!(g.payoff(7, 3), &[-2.0, -12.0]);
        assert_eq!(g.payoff(4, 2), &[-12.0, 13.0]);
        assert_eq!(flow(&[5.0, 5.0, 5.0], &[0.0, 0.0]), [0.0, 10.0]);
    }

    #[test]
    fn only_the_documented_erratum_differs() {
        assert_eq!(network_table_discrepancies(), NETWORK_ERRATA.to_vec());
    }

    #[test]
    fn bundled_games_round_trip() {
        for name in NAMES {
            let g = by_name(name).unwrap();
            assert_eq!(parse_game(&print_game(&g)).unwrap(), g, "{name}");
        }
    }

    #[test]
    fn example_payoff_bounds() {
        assert_eq!(example1().payoff_bound(), 3.0);
        assert!((example4().payoff_bound() - 2f64.sqrt()).abs() < 1e-15);
        assert!((build_network_game().unwrap().payoff_bound() - 313f64.sqrt()).abs() < 1e-12);
    }
}
