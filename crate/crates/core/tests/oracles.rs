use altreg_core::adversary::*;
use altreg_core::dynamics::{cce_gap, ne_gap, run_alternating, Game};
use altreg_core::geometry::{Domain, Regularizer};
use altreg_core::learners::{ContinuousHedge, Ftrl, Hedge, Learner, Oogd, PrmPlus};
use altreg_core::losses::LossFn;
use altreg_core::math::{distance, norm};
use altreg_core::regret::{hedge_identity_gap, RegretLedger};
use altreg_core::rng::SplitMix64;
use altreg_core::Error;

/// Plays `learner` against `env` and returns the ledger and all decisions.
fn play(learner: &mut dyn Learner, env: &Environment) -> (RegretLedger, Vec<Vec<f64>>) {
    let mut ledger = RegretLedger::new(env.dim());
    let mut xs = vec![learner.act().unwrap()];
    for t in 1..=env.horizon() {
        let f = env.loss(t).unwrap();
        learner.observe(&f).unwrap();
        xs.push(learner.act().unwrap());
        ledger.record(t, &xs[t - 1], &f, &xs[t]).unwrap();
    }
    (ledger, xs)
}

#[test]
fn hedge_cycle_matches_closed_form() {
    let env = Environment::new(EnvironmentKind::HedgeCycle, 300).unwrap();
    let (ledger, _) = play(&mut Hedge::new(3, 1.0).unwrap(), &env);
    let (u, r) = ledger.against_best(&Domain::simplex(3).unwrap()).unwrap();
    assert_eq!(u, vec![1.0, 0.0, 0.0]);
    assert_eq!(ledger.comparator_loss(&u).unwrap(), 100.0);
    let oracle = hedge_cycle_regret_oracle(1.0, 100);
    assert!((r.alternating - oracle).abs() <= 1e-9 * oracle);
}

#[test]
fn hedge_constant_matches_closed_form() {
    for (eta, horizon) in [(0.4, 1), (5.0, 100), (0.1, 500)] {
        let env = Environment::new(EnvironmentKind::HedgeConstant, horizon).unwrap();
        let (ledger, _) = play(&mut Hedge::new(3, eta).unwrap(), &env);
        let (_, r) = ledger.against_best(&Domain::simplex(3).unwrap()).unwrap();
        let oracle = hedge_constant_regret_oracle(eta, horizon);
        assert!((r.alternating - oracle).abs() <= 1e-9 * oracle, "eta {eta}");
        // Hedge's iterate is p_{t,1} = q_{t-1}, not the constant e^{-ηT}/(2+e^{-ηT})
        if horizon > 1 && 2.0 / horizon as f64 <= eta && eta <= 1.0 {
            assert!(r.alternating >= hedge_constant_lower_bound(eta));
        }
    }
}

#[test]
fn hedge_kl_identity() {
    let eta = 0.3;
    let mut rng = SplitMix64::new(3);
    let losses: Vec<Vec<f64>> = (0..1000).map(|_| (0..5).map(|_| rng.uniform(0.0, 1.0)).collect()).collect();
    let mut h = Hedge::new(5, eta).unwrap();
    let mut trace = vec![h.act().unwrap()];
    for l in &losses {
        h.observe(&LossFn::linear(l.clone())).unwrap();
        trace.push(h.act().unwrap());
    }
    let gap = hedge_identity_gap(&trace, &losses, eta, &[0.2; 5]).unwrap();
    assert!(gap <= 1e-8, "{gap}");

    // vertex comparator on the cycling environment, as a 0 ln 0 limit
    let env = Environment::new(EnvironmentKind::HedgeCycle, 300).unwrap();
    let (_, xs) = play(&mut Hedge::new(3, 1.0).unwrap(), &env);
    let ls: Vec<Vec<f64>> = env.losses().unwrap().iter().map(|f| f.as_linear().unwrap().to_vec()).collect();
    let gap = hedge_identity_gap(&xs, &ls, 1.0, &[1.0, 0.0, 0.0]).unwrap();
    assert!(gap <= 1e-8, "{gap}");
}

#[test]
fn identity_needs_a_complete_trace() {
    let err = hedge_identity_gap(&[vec![0.5, 0.5]], &[vec![1.0, 0.0]], 0.1, &[0.5, 0.5]).unwrap_err();
    assert!(matches!(err, Error::IncompleteTrace(_)));
}

#[test]
fn oogd_iterates_match_both_regimes() {
    for inv in [50usize, 100, 200] {
        let eta = 1.0 / inv as f64;
        let env = Environment::new(EnvironmentKind::PmAlternating, 4 * inv).unwrap();
        let (_, xs) = play(&mut Oogd::new(2, eta).unwrap(), &env);
        let mut checked = 0;
        for t in 1..=env.horizon() {
            match oogd_iterate_oracle(eta, t) {
                Ok(p) => {
                    assert!(distance(&p, &xs[t - 1]) <= 1e-12, "eta {eta} t {t}");
                    checked += 1;
                }
                Err(Error::TransitionWindow { .. }) => {}
                Err(e) => panic!("{e}"),
            }
        }
        assert_eq!(checked, 4 * inv - 8);
    }
}

#[test]
fn prm_plus_closed_form_state() {
    let alpha5 = prm_alpha5().unwrap();
    let env = Environment::new(EnvironmentKind::PmAlternating, 2004).unwrap();
    let mut p = PrmPlus::new(2).unwrap();
    // states[t] = (p_t, R_t, R̂_t) before round t is played
    let mut states = vec![(vec![], vec![], vec![])];
    for t in 1..=env.horizon() {
        let d = p.act().unwrap();
        states.push((d, p.regrets().to_vec(), p.predicted()));
        p.observe(&env.loss(t).unwrap()).unwrap();
    }
    let close = |a: &[f64], b: [f64; 2]| (a[0] - b[0]).abs() <= 1e-9 && (a[1] - b[1]).abs() <= 1e-9;
    for k in 5..=1000 {
        let alpha = prm_alpha_oracle(alpha5, k).unwrap();
        let c = prm_closed_form(alpha);
        assert!(close(&states[2 * k + 1].0, c.p_odd), "k {k}");
        assert!(close(&states[2 * k + 2].0, c.p_even), "k {k}");
        assert!(close(&states[2 * k + 2].1, c.r_even), "k {k}");
        assert!(close(&states[2 * k + 3].1, c.r_next_odd), "k {k}");
        assert!(close(&states[2 * k + 2].2, c.rhat_even), "k {k}");
        assert!(close(&states[2 * k + 3].2, c.rhat_next_odd), "k {k}");
        assert!(alpha <= prm_alpha_bound(k));
    }
}

#[test]
fn instantaneous_regret_from_pure_play() {
    // p = (0, 1) against ℓ = (-2, 0) gives r = (2, 0)
    let p = [0.0, 1.0];
    let l = [-2.0, 0.0];
    let played = p[0] * l[0] + p[1] * l[1];
    assert_eq!([played - l[0], played - l[1]], [2.0, 0.0]);
}

fn langevin_mean(a: f64) -> f64 {
    1.0 / a - 1.0 / a.tanh()
}

fn bessel_i(n: u32, x: f64) -> f64 {
    let mut term = (x / 2.0).powi(n as i32) / (1..=n).map(f64::from).product::<f64>();
    let mut sum = term;
    for k in 1..200 {
        term *= (x / 2.0) * (x / 2.0) / (k as f64 * (k + n) as f64);
        sum += term;
        if term < 1e-18 * sum {
            break;
        }
    }
    sum
}

#[test]
fn continuous_hedge_one_dimensional_gibbs_mean() {
    let mut rng = SplitMix64::new(11);
    for _ in 0..50 {
        let a = rng.uniform(-30.0, 30.0);
        let mut c = ContinuousHedge::new(Domain::interval(-1.0, 1.0).unwrap(), 0.5).unwrap();
        c.observe(&LossFn::linear(vec![2.0 * a])).unwrap();
        let x = c.act().unwrap()[0];
        assert!((x - langevin_mean(a)).abs() <= 1e-6, "a {a}: {x}");
    }
}

#[test]
fn continuous_hedge_disk_gibbs_mean() {
    // density ∝ e^{⟨θ, x⟩} on the unit disk has mean θ/‖θ‖ · I₂(‖θ‖)/I₁(‖θ‖)
    for theta in [[0.5, 0.0], [3.0, -4.0], [-12.0, 9.0]] {
        let mut c = ContinuousHedge::new(Domain::unit_ball(2).unwrap(), 1.0).unwrap();
        c.observe(&LossFn::linear(vec![-theta[0], -theta[1]])).unwrap();
        let x = c.act().unwrap();
        let r = norm(&theta);
        let m = bessel_i(2, r) / bessel_i(1, r);
        assert!((x[0] - theta[0] / r * m).abs() <= 1e-7, "{x:?}");
        assert!((x[1] - theta[1] / r * m).abs() <= 1e-7, "{x:?}");
        assert!(norm(&x) < 1.0);
    }
}

#[test]
fn ftrl_per_round_bounds_on_the_ball() {
    let eta = 0.2;
    let mut f = Ftrl::new(Regularizer::ball_barrier(2).unwrap(), eta).unwrap();
    let env = Environment::new(
        EnvironmentKind::RandomQuadratic {
            seed: 4,
            curvature: 1.0,
            center: vec![0.7, 0.0],
            spread: 0.5,
        },
        300,
    )
    .unwrap();
    let reg = *f.regularizer();
    let mut x = f.act().unwrap();
    for t in 1..=env.horizon() {
        let loss = env.loss(t).unwrap();
        f.observe(&loss).unwrap();
        let next = f.act().unwrap();
        let g_now = norm(&loss.grad(&x).unwrap());
        assert!(distance(&x, &next) <= eta / reg.sigma() * g_now + 1e-8);
        let g_next = norm(&loss.grad(&next).unwrap());
        let comm = f.commutator(&x, &next).unwrap();
        assert!(comm <= reg.m() * eta * eta / 6.0 * g_next.powi(3) + 1e-8);
        x = next;
    }
}

#[test]
fn matching_pennies_certificate() {
    let game = Game::matrix(vec![vec![1.0, -1.0], vec![-1.0, 1.0]]).unwrap();
    let horizon = 1 << 12;
    let eta = altreg_core::learners::rates::hedge(horizon, 2).unwrap();
    let mut hx = Hedge::new(2, eta).unwrap();
    let mut hy = Hedge::new(2, eta).unwrap();
    let trace = run_alternating(&game, &mut hx, &mut hy, horizon).unwrap();
    let (rx, ry) = trace.regrets(&game).unwrap();
    let gap = ne_gap(&game, &trace.average_x(), &trace.average_y()).unwrap();
    assert!(gap <= (rx.alternating + ry.alternating + 2.0) / (2.0 * horizon as f64) + 1e-9);
}

#[test]
fn general_sum_cce_certificate() {
    let mut rng = SplitMix64::new(21);
    let mut m = || (0..3).map(|_| (0..3).map(|_| rng.uniform(-1.0, 1.0)).collect()).collect::<Vec<Vec<f64>>>();
    let game = Game::bimatrix(m(), m()).unwrap();
    let horizon = 1 << 12;
    let eta = altreg_core::learners::rates::hedge(horizon, 3).unwrap();
    let mut hx = Hedge::new(3, eta).unwrap();
    let mut hy = Hedge::new(3, eta).unwrap();
    let trace = run_alternating(&game, &mut hx, &mut hy, horizon).unwrap();
    let (rx, ry) = trace.regrets(&game).unwrap();
    let gap = cce_gap(&game, &trace).unwrap();
    assert!(gap <= (rx.alternating.max(ry.alternating) + 4.0) / (2.0 * horizon as f64) + 1e-9);
}
