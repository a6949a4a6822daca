use persuade_core::envelope::cav_grid_at;
use persuade_core::harness::suites::random_piecewise;
use persuade_core::harness::{
    brute_force_cav, check_divisibility, simulate, SimConfig, SimStrategy,
};
use persuade_core::twostep::{interim_value, second_stage_utility, transform_distortion};
use persuade_core::{
    induced_posterior_distribution, solve_oneshot, solve_twostep, Belief, PersuasionEnvironment,
    PiecewiseUtility, SolverOptions, UpdatingRule,
};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn jp(p: f64) -> PersuasionEnvironment {
    PersuasionEnvironment::judge_prosecutor(p).unwrap()
}

fn b(q: f64) -> Belief {
    Belief::binary(q).unwrap()
}

fn monotone_rule() -> impl Strategy<Value = UpdatingRule> {
    prop_oneof![
        (0.2..2.0f64).prop_map(|a| UpdatingRule::linear(a).unwrap()),
        (0.2..3.0f64).prop_map(|a| UpdatingRule::geometric(a).unwrap()),
        (0.2..3.0f64).prop_map(|a| UpdatingRule::base_rate(a).unwrap()),
        (0.2..3.0f64, 0.2..3.0f64).prop_map(|(a, c)| UpdatingRule::grether(a, c).unwrap()),
    ]
}

const RES: usize = 2001;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn envelope_dominates_and_is_concave(seed in any::<u64>()) {
        let u = random_piecewise(&mut ChaCha8Rng::seed_from_u64(seed));
        let xs: Vec<f64> = (0..=20).map(|i| i as f64 / 20.0).collect();
        let cav: Vec<f64> = xs.iter().map(|&x| cav_grid_at(&u, x, RES).unwrap().value).collect();
        for (x, c) in xs.iter().zip(&cav) {
            prop_assert!(*c >= u.eval(*x) - 1e-12);
        }
        for i in 1..xs.len() - 1 {
            prop_assert!(cav[i] >= 0.5 * (cav[i - 1] + cav[i + 1]) - 1e-9);
        }
    }

    #[test]
    fn envelope_matches_exhaustive_pairs(seed in any::<u64>(), x in 0.0..=1.0f64) {
        let u = random_piecewise(&mut ChaCha8Rng::seed_from_u64(seed));
        let fast = cav_grid_at(&u, x, RES).unwrap().value;
        let extra: Vec<f64> = u
            .breakpoints()
            .iter()
            .flat_map(|&c| [c - 1e-9, c, c + 1e-9])
            .collect();
        let slow = brute_force_cav(|q| u.eval(q), &extra, &b(x), RES).unwrap();
        prop_assert!((fast - slow).abs() < 1e-6, "grid {fast} exhaustive {slow}");
    }

    #[test]
    fn envelope_is_monotone_in_the_utility(seed in any::<u64>(), shift in 0.0..0.5f64, x in 0.0..=1.0f64) {
        let u = random_piecewise(&mut ChaCha8Rng::seed_from_u64(seed));
        let bps = u.breakpoints().to_vec();
        let inner = u.clone();
        let raised = PiecewiseUtility::new(move |q| inner.eval(q) + shift * q * q)
            .with_breakpoints(bps)
            .unwrap();
        prop_assert!(cav_grid_at(&raised, x, RES).unwrap().value >= cav_grid_at(&u, x, RES).unwrap().value - 1e-12);
    }

    #[test]
    fn bayesian_benchmark(p in 0.001..0.999f64) {
        let sol = solve_oneshot(&jp(p), &UpdatingRule::Bayesian, &SolverOptions::default()).unwrap();
        prop_assert!((sol.value - (2.0 * p).min(1.0)).abs() < 1e-9);
    }

    #[test]
    fn oneshot_solution_is_realized_by_its_experiment(p in 0.02..0.98f64, rule in monotone_rule()) {
        let env = jp(p);
        let sol = solve_oneshot(&env, &rule, &SolverOptions::default()).unwrap();
        prop_assert!(sol.distribution.is_bayes_plausible(env.prior()));
        let induced = induced_posterior_distribution(&sol.experiment, env.prior(), &UpdatingRule::Bayesian).unwrap();
        prop_assert!(induced.max_abs_diff(&sol.distribution) < 1e-9);
        prop_assert!(sol.value >= 0.0 && sol.value <= 1.0);
    }

    #[test]
    fn interim_value_beats_no_information(
        p in 0.02..0.98f64,
        q in 0.01..0.99f64,
        rule in monotone_rule(),
    ) {
        let env = jp(p);
        let opts = SolverOptions { inner_resolution: 1001, ..SolverOptions::default() };
        let v = interim_value(&env, &rule, env.prior(), &b(q), &opts).unwrap().value;
        let null = second_stage_utility(&env, &rule, env.prior(), &b(q), &b(q)).unwrap();
        prop_assert!(v >= null - 1e-12, "v^II {v} < no-information payoff {null}");
    }

    #[test]
    fn divisible_rules_transform_to_themselves(
        a in 0.2..3.0f64,
        p in 0.05..0.95f64,
        q in 0.01..0.99f64,
        r in 0.0..=1.0f64,
    ) {
        for rule in [UpdatingRule::geometric(a).unwrap(), UpdatingRule::divisible(vec![a, 1.0 / a]).unwrap()] {
            let two = transform_distortion(&rule, &b(p), &b(q), &b(r)).unwrap();
            let one = rule.distort(&b(p), &b(r)).unwrap();
            prop_assert!(two.max_abs_diff(&one) < 1e-10);
        }
    }

    #[test]
    fn simulation_is_reproducible(seed in any::<u64>(), p in 0.05..0.6f64) {
        let env = jp(p);
        let rule = UpdatingRule::linear(0.8).unwrap();
        let sol = solve_oneshot(&env, &rule, &SolverOptions::default()).unwrap();
        let config = SimConfig {
            replications: 20_000,
            seed,
            env,
            rule,
            strategy: SimStrategy::OneShot(sol.experiment),
            log_paths: 5,
        };
        prop_assert_eq!(simulate(&config).unwrap(), simulate(&config).unwrap());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn geometric_two_step_equals_one_shot(a in 0.3..2.5f64, p in 0.05..0.48f64) {
        let env = jp(p);
        let rule = UpdatingRule::geometric(a).unwrap();
        let sol = solve_twostep(&env, &rule, &SolverOptions::default()).unwrap();
        prop_assert!((sol.two_step_value - sol.oneshot.value).abs() < 1e-6);
    }
}

#[test]
fn bayesian_divisibility_is_exact() {
    for p in [0.1, 0.3, 0.7] {
        let r = check_divisibility(&UpdatingRule::Bayesian, &b(p), 30).unwrap();
        assert_eq!(r.max_deviation, 0.0);
        assert!(r.divisible);
    }
}
