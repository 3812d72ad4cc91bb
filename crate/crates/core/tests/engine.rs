use attain::catalog::{build_network_game, example1, example4};
use attain::checker::value_direction;
use attain::engine::{
    distance_to_target, run_match, run_match_observed, run_match_with, MatchConfig, MatchObserver,
    SegmentRecord, Target, Trajectory,
};
use attain::game::dot;
use attain::strategies::{
    accelerate, cycle_pure, interleave, scripted, stationary, weak_attainer_ex4, x_attainer,
    zero_attainer, DelayStrategy, Side, XAttainerParams,
};
use attain::{Direction, Error, Game, MixedAction};

fn bits(tr: &Trajectory) -> Vec<u64> {
    tr.times
        .iter()
        .chain(tr.gamma.iter().flatten())
        .map(|x| x.to_bits())
        .collect()
}

fn pure(n: usize, i: usize) -> MixedAction {
    MixedAction::pure(n, i)
}

#[test]
fn identical_inputs_give_identical_trajectories() {
    let g = build_network_game().unwrap();
    let run = || {
        let mut a = zero_attainer(&g, 0.5).unwrap();
        let mut b = cycle_pure(4, 0.37).unwrap();
        run_match(&g, &mut a, &mut b, 3.0).unwrap()
    };
    let (x, y) = (run(), run());
    assert_eq!(bits(&x), bits(&y));
    assert_eq!(x.p, y.p);
}

/// Changing Player 2's play strictly inside one of Player 1's blocks must
/// not change Player 1's action on that block.
#[test]
fn player_one_cannot_react_inside_a_block() {
    let g = example1();
    let eta = 0.3;
    let s1 = zero_attainer(&g, eta).unwrap();
    let (t3, t4) = (s1.updating_time(3).unwrap(), s1.updating_time(4).unwrap());
    let mid = 0.5 * (t3 + t4);
    let base = scripted(vec![0.0, 0.1], vec![pure(2, 1), pure(2, 0)]).unwrap();
    let changed = scripted(vec![0.0, 0.1, mid], vec![pure(2, 1), pure(2, 0), pure(2, 1)]).unwrap();
    let mut runs = Vec::new();
    for mut adv in [base, changed] {
        let mut s1 = zero_attainer(&g, eta).unwrap();
        runs.push(run_match(&g, &mut s1, &mut adv, t4 + 0.01).unwrap());
    }
    let action_at = |tr: &Trajectory, t: f64| {
        let i = tr.times.partition_point(|&s| s <= t) - 1;
        tr.p[i].clone()
    };
    for t in [0.0, t3, mid, 0.5 * (mid + t4)] {
        assert_eq!(action_at(&runs[0], t), action_at(&runs[1], t), "t = {t}");
    }
    // After t4 the change is visible and Player 1 does react.
    assert_ne!(runs[0].final_gamma(), runs[1].final_gamma());
}

/// `γ(t2) - γ(t1)` against a closed-form integral: Player 1 fixed, Player 2
/// alternating L and R every `c`.
#[test]
fn increments_match_the_closed_form_integral() {
    let g = example1();
    let p = MixedAction::new(vec![0.2, 0.8]).unwrap();
    let c = 0.3;
    let mut a = stationary(p.clone());
    let mut b = cycle_pure(2, c).unwrap();
    let tr = run_match(&g, &mut a, &mut b, 5.0).unwrap();
    let ul = g.mixed_payoff(&p, &pure(2, 0)).unwrap()[0];
    let ur = g.mixed_payoff(&p, &pure(2, 1)).unwrap()[0];
    let integral = |t: f64| {
        let periods = (t / (2.0 * c)).floor();
        let rest = t - periods * 2.0 * c;
        periods * c * (ul + ur) + rest.min(c) * ul + (rest - c).max(0.0) * ur
    };
    for (t1, t2) in [(0.0, 5.0), (0.45, 2.2), (1.0, 1.05), (3.3, 4.9)] {
        let got = tr.gamma_at(t2)[0] - tr.gamma_at(t1)[0];
        let want = integral(t2) - integral(t1);
        assert!((got - want).abs() < 1e-12, "[{t1}, {t2}]: {got} vs {want}");
    }
}

#[test]
fn zero_attainer_two_and_a_half_units() {
    // η = 0.2 reaches t = 2.5 in about 1.5e5 blocks.
    let g = example1();
    let eta = 0.2;
    let mut a = zero_attainer(&g, eta).unwrap();
    let mut b = stationary(pure(2, 0));
    let tr = run_match_with(&g, &mut a, &mut b, &MatchConfig::new(2.5).with_block_cap(1_000_000)).unwrap();
    let d = distance_to_target(&tr, &Target::Point(vec![0.0]), 2.0).unwrap();
    assert!(d <= 6.0 * eta + 3.0 * eta, "{d}");
}

/// `⟨S_k, u(p_k, j)⟩ <= 0` for every column and the Blackwell recursion,
/// in a two-dimensional game where every direction is positive.
#[test]
fn zero_attainer_steers_every_block() {
    struct Check {
        g: Game,
        eta: f64,
        s: Vec<f64>,
        prev_sq: f64,
        worst_steer: f64,
        worst_step: f64,
        k: u64,
    }
    impl MatchObserver for Check {
        fn on_segment(&mut self, seg: &SegmentRecord) -> attain::Result<()> {
            if self.k > 0 {
                for j in 0..self.g.n2() {
                    let u = self.g.mixed_payoff(seg.p, &MixedAction::pure(self.g.n2(), j))?;
                    self.worst_steer = self.worst_steer.max(dot(&self.s, &u));
                }
            }
            Ok(())
        }
        fn on_update(&mut self, side: Side, k: u64, _t: f64, gamma: &[f64]) {
            if side == Side::P1 {
                self.s = gamma.to_vec();
                self.k = k;
                let sq = dot(gamma, gamma);
                let step = self.eta * self.g.payoff_bound() / k.max(1) as f64;
                self.worst_step = self.worst_step.max(sq - self.prev_sq - step * step);
                self.prev_sq = sq;
            }
        }
    }
    let g = build_network_game().unwrap();
    let eta = 0.5;
    let mut obs = Check {
        g: g.clone(),
        eta,
        s: vec![0.0; 2],
        prev_sq: 0.0,
        worst_steer: f64::NEG_INFINITY,
        worst_step: f64::NEG_INFINITY,
        k: 0,
    };
    let mut a = zero_attainer(&g, eta).unwrap();
    let mut b = cycle_pure(4, 0.113).unwrap();
    run_match_observed(&g, &mut a, &mut b, &MatchConfig::new(4.0), &mut obs).unwrap();
    assert!(obs.worst_steer <= 1e-8, "{}", obs.worst_steer);
    assert!(obs.worst_step <= 1e-8, "{}", obs.worst_step);
}

#[test]
fn zero_game_keeps_zero() {
    let g = Game::new(2, 2, 3, vec![0.0; 12]).unwrap();
    let mut a = zero_attainer(&g, 1.0).unwrap();
    let mut b = cycle_pure(3, 0.2).unwrap();
    let tr = run_match(&g, &mut a, &mut b, 3.0).unwrap();
    assert!(tr.gamma.iter().flatten().all(|&x| x == 0.0));
}

#[test]
fn accelerating_by_one_changes_nothing() {
    let g = example1();
    let mut plain = zero_attainer(&g, 0.3).unwrap();
    let mut fast = accelerate(Box::new(zero_attainer(&g, 0.3).unwrap()), 1.0).unwrap();
    let a = run_match(&g, &mut plain, &mut cycle_pure(2, 0.21).unwrap(), 2.0).unwrap();
    let b = run_match(&g, &mut fast, &mut cycle_pure(2, 0.21).unwrap(), 2.0).unwrap();
    assert_eq!(bits(&a), bits(&b));
}

#[test]
fn accelerations_by_inverse_factors_cancel() {
    let g = example1();
    let mut plain = zero_attainer(&g, 0.3).unwrap();
    let inner = accelerate(Box::new(zero_attainer(&g, 0.3).unwrap()), 2.0).unwrap();
    let mut both = accelerate(Box::new(inner), 0.5).unwrap();
    let a = run_match(&g, &mut plain, &mut cycle_pure(2, 0.21).unwrap(), 2.0).unwrap();
    let b = run_match(&g, &mut both, &mut cycle_pure(2, 0.21).unwrap(), 2.0).unwrap();
    assert_eq!(bits(&a), bits(&b));
}

#[test]
fn interleaving_a_strategy_with_itself_splits_its_clock() {
    let g = example1();
    let q = MixedAction::new(vec![0.6, 0.4]).unwrap();
    let mk = || Box::new(zero_attainer(&g, 0.9).unwrap());
    let alone = run_match(&g, mk().as_mut(), &mut stationary(q.clone()), 8.0).unwrap();
    for beta in [0.25, 0.5, 0.7] {
        let mut twice = interleave(mk(), mk(), beta).unwrap();
        let a = run_match(&g, &mut twice, &mut stationary(q.clone()), 8.0).unwrap();
        for n in 1..=8 {
            let n = n as f64;
            let x = a.gamma_at(n);
            let (lo, hi) = (alone.gamma_at(beta * n), alone.gamma_at((1.0 - beta) * n));
            for c in 0..g.m() {
                let want = lo[c] + hi[c];
                assert!((x[c] - want).abs() < 1e-11, "β={beta}, N={n}: {} vs {want}", x[c]);
            }
        }
    }
}

#[test]
fn interleaved_zero_attainers_stay_within_the_summed_bounds() {
    let g = example1();
    let u = g.payoff_bound();
    let eta = 2.5;
    let bound = 2.0 * (2.0 * eta * u + eta * u);
    let mk = || Box::new(zero_attainer(&g, eta).unwrap());
    let adversaries: Vec<Box<dyn DelayStrategy>> = vec![
        Box::new(stationary(pure(2, 0))),
        Box::new(stationary(pure(2, 1))),
        Box::new(cycle_pure(2, 0.35).unwrap()),
    ];
    for mut adv in adversaries {
        let mut s = interleave(mk(), mk(), 0.5).unwrap();
        let tr = run_match(&g, &mut s, adv.as_mut(), 50.0).unwrap();
        for n in 1..=50 {
            assert!(tr.gamma_at(n as f64)[0].abs() <= bound, "N = {n}");
        }
    }
}

#[test]
fn weak_attainer_enters_the_ball_late_against_left() {
    let g = example4();
    let eps = 0.1;
    let mut s = weak_attainer_ex4(eps).unwrap();
    let tr = run_match(&g, &mut s, &mut stationary(pure(2, 0)), 20.0).unwrap();
    let first = tr
        .times
        .iter()
        .zip(&tr.gamma)
        .find(|(_, x)| Target::Point(vec![1.0, 1.0]).distance(x) < eps)
        .map(|(t, _)| *t)
        .unwrap();
    assert!(first >= (1.0 - eps) / eps, "{first}");
    assert!(distance_to_target(&tr, &Target::Point(vec![1.0, 1.0]), 1.0 / eps).unwrap() < eps);
    assert!(weak_attainer_ex4(1.0).is_err());
}

#[test]
fn x_attainer_reaches_a_network_target() {
    let g = build_network_game().unwrap();
    let x = [1.0, 1.0];
    let params = XAttainerParams {
        delta: 1.0,
        t_zero: 2.0,
        eta_first: 0.2,
        eta_second: 0.1,
    };
    let horizon = 2.6;
    let adversaries: Vec<Box<dyn DelayStrategy>> = vec![
        Box::new(stationary(pure(4, 0))),
        Box::new(stationary(pure(4, 3))),
        Box::new(stationary(MixedAction::uniform(4))),
        Box::new(cycle_pure(4, 0.05).unwrap()),
    ];
    for mut adv in adversaries {
        let mut s = x_attainer(&g, &x, params).unwrap();
        let cfg = MatchConfig::new(horizon).with_block_cap(10_000_000);
        let mut sup = attain::engine::SupDistance::new(Target::Point(x.to_vec()), 2.0);
        run_match_observed(&g, s.as_mut(), adv.as_mut(), &cfg, &mut sup).unwrap();
        assert!(sup.sup <= 0.05, "{}: {} at {}", adv.name(), sup.sup, sup.argsup);
    }
}

#[test]
fn x_attainer_for_zero_is_always_b_in_example4() {
    let g = example4();
    let params = XAttainerParams {
        delta: 0.5,
        t_zero: 1.0,
        eta_first: 1.0,
        eta_second: 1.0,
    };
    for j in 0..2 {
        let mut s = x_attainer(&g, &[0.0, 0.0], params).unwrap();
        let tr = run_match(&g, s.as_mut(), &mut stationary(pure(2, j)), 5.0).unwrap();
        assert!(tr.gamma.iter().flatten().all(|&x| x == 0.0));
        assert!(tr.p.iter().all(|p| p.as_pure() == Some(2)));
    }
}

#[test]
fn cap_errors_are_reported() {
    let g = example1();
    let mut a = zero_attainer(&g, 0.1).unwrap();
    let mut b = stationary(pure(2, 0));
    let err = run_match(&g, &mut a, &mut b, 2.0).unwrap_err();
    assert!(matches!(err, Error::HorizonUnreachable { .. }), "{err}");
    // A strategy without a closed form for its times hits the cap lazily.
    let inner = Box::new(zero_attainer(&g, 0.1).unwrap());
    let mut y = interleave(inner, Box::new(stationary(pure(2, 0))), 0.5).unwrap();
    let cfg = MatchConfig::new(3.0).with_block_cap(1000);
    let err = run_match_with(&g, &mut y, &mut stationary(pure(2, 0)), &cfg).unwrap_err();
    assert!(matches!(err, Error::HorizonUnreachable { .. }), "{err}");
}

#[test]
fn strategies_are_checked_for_their_side() {
    let g = example1();
    let mut a = zero_attainer(&g, 0.5).unwrap();
    let mut b = zero_attainer(&g, 0.5).unwrap();
    assert!(run_match(&g, &mut a, &mut b, 1.0).is_err());
}

#[test]
fn value_direction_agrees_with_the_engine_against_best_replies() {
    // Against the column that is worst for Player 1 in ⟨λ, G⟩, playing
    // p* yields at least v_λ per unit of time along λ.
    let g = build_network_game().unwrap();
    let l = [0.6, -0.8];
    let v = value_direction(&g, &Direction::raw(l.to_vec())).unwrap();
    let p = attain::solver::solve(&g.scalarize_slice(&l).unwrap()).unwrap().p_star;
    for j in 0..g.n2() {
        let tr = run_match(&g, &mut stationary(p.clone()), &mut stationary(pure(4, j)), 2.0).unwrap();
        assert!(dot(&l, tr.final_gamma()) >= 2.0 * v - 1e-9);
    }
}
