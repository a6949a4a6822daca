//! Named verification suites. Each returns one [`Check`] per property with the
//! measured deviation and the tolerance it was held to.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::belief::Belief;
use crate::envelope::{cav_grid_at, PiecewiseUtility};
use crate::environment::PersuasionEnvironment;
use crate::error::{PersuasionError, Result};
use crate::experiment::{bayes_update, Experiment};
use crate::grether::{
    closed_form_gap_sign, closed_form_values, comparison_report, interim_threshold, outer_threshold,
};
use crate::harness::oracle::{brute_force_cav, check_divisibility, receiver_coordinate_interim};
use crate::harness::sim::{simulate, SimConfig, SimStrategy};
use crate::oneshot::solve_oneshot;
use crate::options::SolverOptions;
use crate::rules::{random_experiment, UpdatingRule};
use crate::twostep::{
    evaluate_strategy, gradual_persuasion, interim_value, solve_twostep, transform_distortion,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Suite {
    Transform,
    Divisibility,
    Grether,
    Envelope,
    Simulation,
}

impl Suite {
    pub const ALL: [Suite; 5] = [
        Suite::Transform,
        Suite::Divisibility,
        Suite::Grether,
        Suite::Envelope,
        Suite::Simulation,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Transform => "transform",
            Suite::Divisibility => "divisibility",
            Suite::Grether => "grether",
            Suite::Envelope => "envelope",
            Suite::Simulation => "simulation",
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = PersuasionError;

    fn from_str(s: &str) -> Result<Self> {
        Suite::ALL
            .into_iter()
            .find(|x| x.name() == s)
            .ok_or_else(|| PersuasionError::DomainError(format!("unknown suite {s:?}")))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    /// Measured deviation, or the measured margin for "greater than" checks.
    pub value: f64,
    pub tolerance: f64,
    pub passed: bool,
}

impl Check {
    /// Passes when `deviation < tolerance`.
    pub fn below(name: impl Into<String>, deviation: f64, tolerance: f64) -> Self {
        Self {
            name: name.into(),
            value: deviation,
            tolerance,
            passed: deviation < tolerance,
        }
    }

    /// Passes when `margin > tolerance`.
    pub fn above(name: impl Into<String>, margin: f64, tolerance: f64) -> Self {
        Self {
            name: name.into(),
            value: margin,
            tolerance,
            passed: margin > tolerance,
        }
    }

    pub fn flag(name: impl Into<String>, ok: bool) -> Self {
        Self {
            name: name.into(),
            value: if ok { 1.0 } else { 0.0 },
            tolerance: 0.0,
            passed: ok,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SuiteReport {
    pub suite: Suite,
    pub seed: u64,
    pub checks: Vec<Check>,
    pub passed: bool,
}

impl SuiteReport {
    fn new(suite: Suite, seed: u64, checks: Vec<Check>) -> Self {
        let passed = checks.iter().all(|c| c.passed);
        Self {
            suite,
            seed,
            checks,
            passed,
        }
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.passed)
    }
}

pub fn run_suite(suite: Suite, seed: u64, opts: &SolverOptions) -> Result<SuiteReport> {
    let checks = match suite {
        Suite::Transform => transform(seed, 1000)?,
        Suite::Divisibility => divisibility(opts)?,
        Suite::Grether => grether(opts)?,
        Suite::Envelope => envelope(seed, 50)?,
        Suite::Simulation => simulation(seed, opts)?,
    };
    Ok(SuiteReport::new(suite, seed, checks))
}

/// A rule from one of the five non-Bayesian families with random parameters.
pub fn random_rule<R: Rng>(rng: &mut R, family: usize, states: usize) -> UpdatingRule {
    let mut pos = || rng.gen_range(0.2..3.0);
    match family % 5 {
        0 => UpdatingRule::Linear { alpha: pos() },
        1 => UpdatingRule::Geometric { alpha: pos() },
        2 => UpdatingRule::Divisible(crate::rules::ParamHomeomorphism {
            gamma: (0..states).map(|_| pos()).collect(),
        }),
        3 => UpdatingRule::BaseRate { alpha: pos() },
        _ => UpdatingRule::Grether {
            alpha: pos(),
            beta: pos(),
        },
    }
}

fn random_prior<R: Rng>(rng: &mut R, states: usize) -> Belief {
    let w: Vec<f64> = (0..states).map(|_| rng.gen_range(0.05..1.0)).collect();
    Belief::from_weights(w).expect("positive weights")
}

fn pick_signal<R: Rng>(rng: &mut R, exp: &Experiment, belief: &Belief) -> Option<usize> {
    let live: Vec<usize> = (0..exp.signal_count())
        .filter(|&s| exp.marginal(belief, s) > 0.0)
        .collect();
    (!live.is_empty()).then(|| live[rng.gen_range(0..live.len())])
}

/// Worst gap between the receiver's actual second update (rule applied with
/// the interim belief as prior) and the transformed distortion of the
/// sender's second posterior, over `instances` random protocols.
pub fn transform_max_deviation(seed: u64, instances: usize) -> Result<(f64, usize)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst: f64 = 0.0;
    let mut done = 0;
    while done < instances {
        let family = done % 5;
        let states = if family == 0 { 2 } else { rng.gen_range(2..=4) };
        let rule = random_rule(&mut rng, family, states);
        let p = random_prior(&mut rng, states);
        let (n_sigma, n_tau) = (rng.gen_range(2..=4), rng.gen_range(2..=4));
        let sigma = random_experiment(&mut rng, states, n_sigma);
        let tau = random_experiment(&mut rng, states, n_tau);
        let Some(s) = pick_signal(&mut rng, &sigma, &p) else {
            continue;
        };
        let q = bayes_update(&sigma, &p, s)?;
        let d = rule.update(&sigma, &p, s)?;
        if !q.full_support() || !d.full_support() {
            continue;
        }
        let Some(t) = pick_signal(&mut rng, &tau, &q) else {
            continue;
        };
        let r = bayes_update(&tau, &q, t)?;
        let actual = rule.update(&tau, &d, t)?;
        let predicted = transform_distortion(&rule, &p, &q, &r)?;
        worst = worst.max(actual.max_abs_diff(&predicted));
        done += 1;
    }
    Ok((worst, done))
}

fn transform(seed: u64, instances: usize) -> Result<Vec<Check>> {
    let (worst, n) = transform_max_deviation(seed, instances)?;
    Ok(vec![
        Check::below(
            format!("second update equals transformed distortion ({n} instances)"),
            worst,
            1e-10,
        ),
        Check::flag("at least 1000 instances", n >= 1000),
    ])
}

/// Rules that must come out divisible, with a short name.
pub fn divisible_rules() -> Vec<UpdatingRule> {
    let mut out: Vec<UpdatingRule> = [0.3, 0.7, 1.5, 2.5]
        .into_iter()
        .map(|a| UpdatingRule::Geometric { alpha: a })
        .collect();
    out.push(UpdatingRule::Divisible(crate::rules::ParamHomeomorphism {
        gamma: vec![0.5, 2.0],
    }));
    out.push(UpdatingRule::Divisible(crate::rules::ParamHomeomorphism {
        gamma: vec![1.7, 0.4],
    }));
    out.push(UpdatingRule::Grether {
        alpha: 1.0,
        beta: 0.4,
    });
    out
}

fn divisibility(opts: &SolverOptions) -> Result<Vec<Check>> {
    let prior = Belief::binary(0.3)?;
    let mut checks = Vec::new();
    let bayes = check_divisibility(&UpdatingRule::Bayesian, &prior, 200)?;
    checks.push(Check::below(
        "bayesian: deviation",
        bayes.max_deviation,
        f64::MIN_POSITIVE,
    ));
    for rule in divisible_rules() {
        let r = check_divisibility(&rule, &prior, 200)?;
        checks.push(Check::below(
            format!("{}: divisible", rule.label()),
            r.max_deviation,
            1e-8,
        ));
    }
    let g = check_divisibility(
        &UpdatingRule::Grether {
            alpha: 2.0,
            beta: 1.0,
        },
        &prior,
        200,
    )?;
    checks.push(Check::above(
        "grether(2,1): not divisible",
        g.max_deviation,
        1e-3,
    ));
    for rule in divisible_rules() {
        for p in [0.1, 0.3, 0.45] {
            let env = PersuasionEnvironment::judge_prosecutor(p)?;
            let sol = solve_twostep(&env, &rule, opts)?;
            checks.push(Check::below(
                format!("{} p={p}: two-step equals one-shot", rule.label()),
                (sol.two_step_value - sol.oneshot.value).abs(),
                1e-6,
            ));
        }
    }
    Ok(checks)
}

pub const GRETHER_GRID: [f64; 6] = [0.25, 0.5, 1.0, 1.5, 2.0, 3.0];
pub const GRETHER_PRIORS: [f64; 4] = [0.05, 0.1, 0.3, 0.45];

fn grether(opts: &SolverOptions) -> Result<Vec<Check>> {
    let mut dev_values: f64 = 0.0;
    let mut dev_threshold: f64 = 0.0;
    let mut dev_interim_threshold: f64 = 0.0;
    let mut dev_fixed_point: f64 = 0.0;
    let mut signs_ok = true;
    for &a in &GRETHER_GRID {
        for &p in &GRETHER_PRIORS {
            let mut seen = None;
            for &b in &GRETHER_GRID {
                let env = PersuasionEnvironment::judge_prosecutor(p)?;
                let rule = UpdatingRule::grether(a, b)?;
                let (two, one) = closed_form_values(a, b, p)?;
                let interim = interim_value(&env, &rule, env.prior(), env.prior(), opts)?;
                let oneshot = solve_oneshot(&env, &rule, opts)?;
                dev_values = dev_values
                    .max((two - interim.value).abs())
                    .max((one - oneshot.value).abs());
                let q_star = outer_threshold(a, b, p)?;
                dev_threshold = dev_threshold.max((oneshot.thresholds[0] - q_star).abs());
                if let Some(t) = interim.threshold {
                    dev_interim_threshold =
                        dev_interim_threshold.max((t - interim_threshold(a, b, p, p)?).abs());
                }
                // bisection for the fixed point of q ↦ r(p, q)
                let (mut lo, mut hi) = (1e-12, 1.0 - 1e-12);
                let g = |q: f64| interim_threshold(a, b, p, q).map(|r| r - q);
                let glo = g(lo)?;
                for _ in 0..200 {
                    let mid = 0.5 * (lo + hi);
                    if (g(mid)? > 0.0) == (glo > 0.0) {
                        lo = mid;
                    } else {
                        hi = mid;
                    }
                }
                dev_fixed_point = dev_fixed_point.max((0.5 * (lo + hi) - q_star).abs());
                let s = closed_form_gap_sign(a, b, p)?;
                signs_ok &= *seen.get_or_insert(s) == s;
                let want = if a < 1.0 {
                    1
                } else if a > 1.0 {
                    -1
                } else {
                    0
                };
                signs_ok &= s == want;
            }
        }
    }
    let mut checks = vec![
        Check::below("closed-form values vs pipeline", dev_values, 1e-6),
        Check::below(
            "one-shot threshold vs outer threshold",
            dev_threshold,
            1e-10,
        ),
        Check::below(
            "interim threshold vs pipeline",
            dev_interim_threshold,
            1e-10,
        ),
        Check::below("outer threshold is the fixed point", dev_fixed_point, 1e-10),
        Check::flag("sign pattern by alpha, independent of beta", signs_ok),
    ];
    for (a, b) in [(0.5, 1.0), (1.0, 2.7), (2.0, 1.0)] {
        let r = comparison_report(a, b, 0.3, opts)?;
        checks.push(Check::below(
            format!("grether({a},{b}) report: closed forms vs pipeline"),
            r.max_pipeline_deviation,
            1e-6,
        ));
    }
    Ok(checks)
}

/// Random upper-semicontinuous piecewise-linear utility on `[0, 1]`.
pub fn random_piecewise<R: Rng>(rng: &mut R) -> PiecewiseUtility {
    let k = rng.gen_range(1..=5);
    let mut cuts: Vec<f64> = (0..k).map(|_| rng.gen_range(0.02..0.98)).collect();
    cuts.sort_by(f64::total_cmp);
    cuts.dedup();
    let pieces: Vec<(f64, f64)> = (0..=cuts.len())
        .map(|_| (rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
        .collect();
    let cuts2 = cuts.clone();
    let eval = move |x: f64| {
        let i = cuts2.partition_point(|c| *c <= x);
        let (a, b) = pieces[i];
        let here = a + b * x;
        // at a cut, attain the larger one-sided value
        if i > 0 && cuts2[i - 1] == x {
            let (a0, b0) = pieces[i - 1];
            here.max(a0 + b0 * x)
        } else {
            here
        }
    };
    PiecewiseUtility::new(eval)
        .with_breakpoints(cuts)
        .expect("sorted cuts in (0, 1)")
}

fn envelope(seed: u64, count: usize) -> Result<Vec<Check>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let resolution = 2001;
    let (mut dominance, mut concavity, mut monotone, mut brute, mut certificate): (
        f64,
        f64,
        f64,
        f64,
        f64,
    ) = (0.0, 0.0, 0.0, 0.0, 0.0);
    for _ in 0..count {
        let u = random_piecewise(&mut rng);
        let bump_at = rng.gen_range(0.0..1.0);
        let u2 = u.clone();
        let bumped = PiecewiseUtility::new(move |x| {
            u2.eval(x) + 0.3 * (1.0 - 4.0 * (x - bump_at).abs()).max(0.0)
        })
        .with_breakpoints(u.breakpoints().to_vec())?;
        let xs: Vec<f64> = (0..=40).map(|i| i as f64 / 40.0).collect();
        let mut cav = Vec::with_capacity(xs.len());
        for &x in &xs {
            let r = cav_grid_at(&u, x, resolution)?;
            dominance = dominance.max(u.eval(x) - r.value);
            certificate = certificate.max(r.certificate_gap(|q| u.eval(q)));
            monotone = monotone.max(r.value - cav_grid_at(&bumped, x, resolution)?.value);
            cav.push(r.value);
        }
        for i in 0..xs.len() {
            for j in i + 2..xs.len() {
                for k in i + 1..j {
                    let lambda = (xs[j] - xs[k]) / (xs[j] - xs[i]);
                    concavity = concavity.max(lambda * cav[i] + (1.0 - lambda) * cav[j] - cav[k]);
                }
            }
        }
        for _ in 0..3 {
            let x = rng.gen_range(0.0..1.0);
            let grid = cav_grid_at(&u, x, resolution)?.value;
            let oracle = brute_force_cav(
                |q| u.eval(q),
                u.breakpoints(),
                &Belief::binary(x)?,
                resolution,
            )?;
            brute = brute.max((grid - oracle).abs());
        }
    }
    Ok(vec![
        Check::below("envelope dominates utility", dominance, 1e-9),
        Check::below("envelope is concave", concavity, 1e-9),
        Check::below("envelope is monotone in utility", monotone, 1e-9),
        Check::below("support atoms certify value", certificate, 1e-9),
        Check::below("hull vs brute-force two-point search", brute, 1e-6),
    ])
}

fn simulation(seed: u64, opts: &SolverOptions) -> Result<Vec<Check>> {
    let mut checks = Vec::new();
    let reps = 1_000_000;
    let env = PersuasionEnvironment::judge_prosecutor(0.3)?;
    for alpha in [0.5, 1.0, 1.5] {
        let rule = UpdatingRule::linear(alpha)?;
        let sol = solve_oneshot(&env, &rule, opts)?;
        let config = SimConfig {
            replications: reps,
            seed,
            env: env.clone(),
            rule: rule.clone(),
            strategy: SimStrategy::OneShot(sol.experiment.clone()),
            log_paths: 0,
        };
        let r = simulate(&config)?;
        checks.push(Check::below(
            format!("{}: one-shot simulation within 3 SE", rule.label()),
            (r.mean - sol.value).abs() / r.standard_error.max(f64::MIN_POSITIVE),
            3.0,
        ));
        let strategy = gradual_persuasion(&env, &rule, &sol, opts)?;
        let exact = evaluate_strategy(&env, &rule, &strategy)?;
        let config = SimConfig {
            strategy: SimStrategy::from_two_step(env.prior(), &strategy)?,
            ..config
        };
        let r = simulate(&config)?;
        checks.push(Check::below(
            format!("{}: gradual two-step simulation within 3 SE", rule.label()),
            (r.mean - exact).abs() / r.standard_error.max(f64::MIN_POSITIVE),
            3.0,
        ));
        checks.push(Check::flag(
            format!("{}: replay is bit-identical", rule.label()),
            simulate(&config)? == r,
        ));
    }
    let null = SimConfig {
        replications: 10_000,
        seed,
        env: env.clone(),
        rule: UpdatingRule::Bayesian,
        strategy: SimStrategy::TwoStep {
            first: Experiment::null(2),
            second: vec![Experiment::null(2)],
        },
        log_paths: 0,
    };
    let r = simulate(&null)?;
    checks.push(Check::below(
        "null experiments pay v̂(p) exactly",
        r.mean.abs() + r.standard_error,
        f64::MIN_POSITIVE,
    ));
    for q in [0.15, 0.3, 0.5] {
        let rule = UpdatingRule::linear(0.5)?;
        let direct = interim_value(&env, &rule, env.prior(), &Belief::binary(q)?, opts)?.value;
        let dual = receiver_coordinate_interim(&env, &rule, q, 20_001)?;
        checks.push(Check::below(
            format!("linear(0.5) q={q}: interim value in receiver coordinates"),
            (direct - dual).abs(),
            1e-6,
        ));
    }
    Ok(checks)
}
