//! Acceptance run: one PASS/FAIL line per criterion.
//!
//! Every criterion is evaluated through the scenario claims (the same code
//! `attain scenario run` uses) and, where a derived value is involved,
//! cross-checked against an oracle written here.
//!
//! Some criteria cannot hold as stated; they are listed in
//! `EXPECTED_FAILURES` with the reason. The run exits nonzero if any other
//! criterion fails.

use std::collections::BTreeMap;
use std::process::ExitCode;
use std::time::Instant;

use attain::catalog::{build_network_game, FLOW_MATRIX, NETWORK_COLS, NETWORK_ROWS};
use attain::checker::{check_zero_attainable, value_direction};
use attain::scenarios::{run_scenario, scenarios, RunOptions};
use attain::solver::solve;
use attain::{Direction, Game, MatrixGame};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const EXPECTED_FAILURES: [(u8, &str); 3] = [
    (1, "η = 0.05 needs about 1e17 harmonic blocks to pass t = 2"),
    (5, "the ε-mix crosses the ball around (1,1) against R only on a null set, and B4 witnesses shrink like δ²"),
    (6, "one printed table entry has a sign slip"),
];

struct Line {
    pass: bool,
    detail: Vec<String>,
}

/// Support function of the network's payoff image minus that of the
/// demand box, from the corners of both sets.
fn network_gap(l: [f64; 2]) -> f64 {
    let mut image = f64::NEG_INFINITY;
    for a in NETWORK_ROWS {
        let fa: Vec<f64> = FLOW_MATRIX
            .iter()
            .map(|row| row.iter().zip(&a).map(|(f, x)| f * x).sum())
            .collect();
        image = image.max(l[0] * fa[0] + l[1] * fa[1]);
    }
    let demand = NETWORK_COLS
        .iter()
        .map(|d| l[0] * d[0] + l[1] * d[1])
        .fold(f64::NEG_INFINITY, f64::max);
    image - demand
}

fn oracle_6b() -> (bool, String) {
    let g = build_network_game().expect("network game");
    let v = check_zero_attainable(&g, 0.01, true).expect("sweep");
    let min = v.certificate.as_ref().map_or(f64::NAN, |c| c.min_value);
    // The gap is piecewise linear in (cos θ, sin θ); a dense circle is
    // within 1e-9 of its minimum.
    let n = 400_000;
    let oracle = (0..n)
        .map(|k| {
            let th = k as f64 * std::f64::consts::TAU / n as f64;
            network_gap([th.cos(), th.sin()])
        })
        .fold(f64::INFINITY, f64::min);
    let ok = (min - oracle).abs() <= 1e-3;
    (ok, format!("test-side oracle min {oracle:.6} vs certified {min:.6}"))
}

/// Best row mix on the grid with denominator `k`, scored by its worst
/// column: a lower estimate within `max|a|·(n1-1)/k` of the value.
fn grid_value(mg: &MatrixGame, k: usize) -> f64 {
    fn rec(mg: &MatrixGame, k: usize, at: usize, left: usize, w: &mut Vec<usize>, best: &mut f64) {
        if at + 1 == mg.n1() {
            w[at] = left;
            let worst = (0..mg.n2())
                .map(|j| (0..mg.n1()).map(|i| w[i] as f64 / k as f64 * mg.get(i, j)).sum::<f64>())
                .fold(f64::INFINITY, f64::min);
            *best = best.max(worst);
            return;
        }
        for c in 0..=left {
            w[at] = c;
            rec(mg, k, at + 1, left - c, w, best);
        }
    }
    let mut best = f64::NEG_INFINITY;
    rec(mg, k, 0, k, &mut vec![0; mg.n1()], &mut best);
    best
}

fn oracle_7(seed: u64) -> (bool, String) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(7));
    let k = 60;
    let mut bad = 0;
    let mut compared = 0;
    for _ in 0..500 {
        let n1 = rng.gen_range(1..=12);
        let n2 = rng.gen_range(1..=12);
        let entries: Vec<f64> = (0..n1 * n2).map(|_| rng.gen_range(-10.0..=10.0)).collect();
        let mg = MatrixGame::new(n1, n2, entries).expect("matrix");
        let sol = solve(&mg).expect("solve");
        let mut ok = sol.gap <= 1e-8;
        if n1 <= 3 {
            let tol = mg.max_abs() * 5.0 / k as f64;
            ok &= (sol.value - grid_value(&mg, k)).abs() <= tol;
            compared += 1;
        }
        if !ok {
            bad += 1;
        }
    }
    (bad == 0, format!("test-side: {compared} grid comparisons, {bad} failures"))
}

fn oracle_8(seed: u64) -> (bool, String) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(8));
    let mut worst = 0.0f64;
    for _ in 0..200 {
        let m = rng.gen_range(1..=3);
        let n1 = rng.gen_range(1..=5);
        let n2 = rng.gen_range(1..=5);
        let g = Game::new(m, n1, n2, (0..m * n1 * n2).map(|_| rng.gen_range(-10.0..=10.0)).collect())
            .expect("game");
        let l: Vec<f64> = (0..m).map(|_| rng.gen_range(-1.0..=1.0)).collect();
        let mu: Vec<f64> = (0..m).map(|_| rng.gen_range(-1.0..=1.0)).collect();
        let y: Vec<f64> = (0..m).map(|_| rng.gen_range(-5.0..=5.0)).collect();
        let v = |g: &Game, l: &[f64]| value_direction(g, &Direction::raw(l.to_vec())).expect("value");
        let dist = l.iter().zip(&mu).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt();
        let u_max = (0..n1)
            .flat_map(|i| (0..n2).map(move |j| (i, j)))
            .map(|(i, j)| g.payoff(i, j).iter().map(|x| x * x).sum::<f64>().sqrt())
            .fold(0.0, f64::max);
        worst = worst.max((v(&g, &l) - v(&g, &mu)).abs() - dist * u_max);
        let shifted = v(&g.translate(&y).expect("translate"), &l);
        let ly: f64 = l.iter().zip(&y).map(|(a, b)| a * b).sum();
        worst = worst.max((shifted - (v(&g, &l) - ly)).abs());
    }
    (worst <= 1e-8, format!("test-side: worst excess {worst:.2e}"))
}

fn main() -> ExitCode {
    let opts = match RunOptions::from_env() {
        Ok(o) => o,
        Err(e) => {
            eprintln!("{e}");
            return ExitCode::FAILURE;
        }
    };
    let started = Instant::now();
    let mut lines: BTreeMap<u8, Line> = (1..=9)
        .map(|c| {
            (
                c,
                Line {
                    pass: true,
                    detail: Vec::new(),
                },
            )
        })
        .collect();
    for s in scenarios() {
        for r in run_scenario(&s, &opts) {
            let line = lines.get_mut(&r.criterion).expect("criteria 1..=9");
            line.pass &= r.pass;
            line.detail.push(format!(
                "[{}/{} {}] {}",
                r.scenario,
                r.id,
                if r.pass { "ok" } else { "FAILED" },
                r.detail
            ));
        }
    }
    for (c, (ok, detail)) in [(6, oracle_6b()), (7, oracle_7(opts.seed)), (8, oracle_8(opts.seed))] {
        let line = lines.get_mut(&c).expect("criterion");
        line.pass &= ok;
        line.detail.push(detail);
    }

    let mut unexpected = 0;
    for (c, line) in &lines {
        println!("criterion {c}: {}", if line.pass { "PASS" } else { "FAIL" });
        for d in &line.detail {
            println!("    {d}");
        }
        let expected = EXPECTED_FAILURES.iter().find(|(e, _)| e == c);
        match (line.pass, expected) {
            (false, Some((_, why))) => println!("    expected failure: {why}"),
            (false, None) => unexpected += 1,
            (true, Some(_)) => println!("    note: listed as an expected failure but passed"),
            (true, None) => {}
        }
    }
    println!(
        "seed {:#x}, {:.1}s, {} unexpected failures",
        opts.seed,
        started.elapsed().as_secs_f64(),
        unexpected
    );
    if unexpected == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
