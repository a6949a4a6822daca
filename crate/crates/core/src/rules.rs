//! Receiver updating rules that systematically distort the Bayesian posterior.
//!
//! Every rule exposes two routes to the receiver's updated belief: the direct
//! update formula in terms of prior and signal likelihoods ([`UpdatingRule::update`])
//! and the distortion of the Bayesian posterior ([`UpdatingRule::distort`]).
//! [`verify_systematic`] checks that the two agree.
//!
//! Power-form rules (geometric, base-rate, Grether, divisible power maps) are
//! evaluated in log space. At boundary posteriors (some `q(θ) = 0`) the zero
//! coordinates stay zero and the remaining mass renormalizes.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::belief::Belief;
use crate::error::{Counterexample, PersuasionError, Result};
use crate::experiment::{bayes_update, Experiment};

/// Deviation above which [`verify_systematic`] reports a violation.
pub const SYSTEMATIC_TOLERANCE: f64 = 1e-10;

/// Componentwise power map `F_θ(p) ∝ p(θ)^{γ_θ}` on the simplex.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParamHomeomorphism {
    pub gamma: Vec<f64>,
}

impl ParamHomeomorphism {
    pub fn new(gamma: Vec<f64>) -> Result<Self> {
        let map = Self { gamma };
        map.validate()?;
        Ok(map)
    }

    /// `F_θ(p) = p^{1/α}`, the map under which divisible updating is geometric.
    pub fn geometric(alpha: f64, states: usize) -> Result<Self> {
        Self::new(vec![1.0 / alpha; states])
    }

    pub fn validate(&self) -> Result<()> {
        if self.gamma.is_empty() {
            return Err(PersuasionError::InvalidParameter("gamma is empty".into()));
        }
        if let Some(g) = self.gamma.iter().find(|g| !(g.is_finite() && **g > 0.0)) {
            return Err(PersuasionError::InvalidParameter(format!(
                "gamma entries must be positive, got {g}"
            )));
        }
        Ok(())
    }

    fn uniform_exponent(&self) -> Option<f64> {
        let g0 = self.gamma[0];
        self.gamma.iter().all(|g| *g == g0).then_some(g0)
    }

    pub fn forward(&self, x: &Belief) -> Result<Belief> {
        x.expect_dim(self.gamma.len())?;
        let logs: Vec<f64> = x
            .probs()
            .iter()
            .zip(&self.gamma)
            .map(|(p, g)| g * p.ln())
            .collect();
        Belief::from_log_weights(&logs)
    }

    /// Exact inverse: `x_θ = (c·y_θ)^{1/γ_θ}` with `c` chosen so that `Σ x = 1`.
    pub fn inverse(&self, y: &Belief) -> Result<Belief> {
        y.expect_dim(self.gamma.len())?;
        let log_y: Vec<f64> = y.probs().iter().map(|v| v.ln()).collect();
        if let Some(g) = self.uniform_exponent() {
            let logs: Vec<f64> = log_y.iter().map(|l| l / g).collect();
            return Belief::from_log_weights(&logs);
        }
        // Solve Σ_θ exp((t + ln y_θ)/γ_θ) = 1 for t = ln c; the sum is increasing in t.
        let total = |t: f64| -> (f64, f64) {
            let mut s = 0.0;
            let mut ds = 0.0;
            for (ly, g) in log_y.iter().zip(&self.gamma) {
                if *ly == f64::NEG_INFINITY {
                    continue;
                }
                let term = ((t + ly) / g).exp();
                s += term;
                ds += term / g;
            }
            (s, ds)
        };
        let (mut lo, mut hi) = (-1.0, 1.0);
        while total(lo).0 > 1.0 {
            lo *= 2.0;
        }
        while total(hi).0 < 1.0 {
            hi *= 2.0;
        }
        let mut t = 0.5 * (lo + hi);
        for _ in 0..200 {
            let (s, ds) = total(t);
            let f = s - 1.0;
            if f.abs() < 1e-15 {
                break;
            }
            if f > 0.0 {
                hi = t;
            } else {
                lo = t;
            }
            let newton = t - f / ds;
            t = if newton > lo && newton < hi {
                newton
            } else {
                0.5 * (lo + hi)
            };
            if hi - lo < 1e-15 * (1.0 + t.abs()) {
                break;
            }
        }
        let logs: Vec<f64> = log_y
            .iter()
            .zip(&self.gamma)
            .map(|(ly, g)| (t + ly) / g)
            .collect();
        Belief::from_log_weights(&logs)
    }
}

/// The receiver's updating rule.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum UpdatingRule {
    Bayesian,
    /// `α q + (1 − α) p` on the probability of state 1, clamped to `[0, 1]`; binary states only.
    Linear {
        alpha: f64,
    },
    /// Posterior `∝ p(θ) σ_θ(s)^α`.
    Geometric {
        alpha: f64,
    },
    /// Divisible updating with a componentwise power homeomorphism.
    Divisible(ParamHomeomorphism),
    /// Posterior `∝ p(θ)^α σ_θ(s)`.
    BaseRate {
        alpha: f64,
    },
    /// Posterior `∝ p(θ)^α σ_θ(s)^β`.
    Grether {
        alpha: f64,
        beta: f64,
    },
}

fn positive(name: &str, x: f64) -> Result<()> {
    if x.is_finite() && x > 0.0 {
        Ok(())
    } else {
        Err(PersuasionError::InvalidParameter(format!(
            "{name} must be positive, got {x}"
        )))
    }
}

impl UpdatingRule {
    pub fn linear(alpha: f64) -> Result<Self> {
        Self::checked(Self::Linear { alpha })
    }

    pub fn geometric(alpha: f64) -> Result<Self> {
        Self::checked(Self::Geometric { alpha })
    }

    pub fn base_rate(alpha: f64) -> Result<Self> {
        Self::checked(Self::BaseRate { alpha })
    }

    pub fn grether(alpha: f64, beta: f64) -> Result<Self> {
        Self::checked(Self::Grether { alpha, beta })
    }

    pub fn divisible(gamma: Vec<f64>) -> Result<Self> {
        Ok(Self::Divisible(ParamHomeomorphism::new(gamma)?))
    }

    fn checked(rule: Self) -> Result<Self> {
        rule.validate()?;
        Ok(rule)
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            Self::Bayesian => Ok(()),
            Self::Linear { alpha } | Self::Geometric { alpha } | Self::BaseRate { alpha } => {
                positive("alpha", *alpha)
            }
            Self::Grether { alpha, beta } => {
                positive("alpha", *alpha)?;
                positive("beta", *beta)
            }
            Self::Divisible(map) => map.validate(),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Self::Bayesian => "bayesian",
            Self::Linear { .. } => "linear",
            Self::Geometric { .. } => "geometric",
            Self::Divisible(_) => "divisible",
            Self::BaseRate { .. } => "base_rate",
            Self::Grether { .. } => "grether",
        }
    }

    /// Short human-readable label, e.g. `grether(0.5,1)`.
    pub fn label(&self) -> String {
        match self {
            Self::Bayesian => "bayesian".into(),
            Self::Linear { alpha } => format!("linear({alpha})"),
            Self::Geometric { alpha } => format!("geometric({alpha})"),
            Self::BaseRate { alpha } => format!("base_rate({alpha})"),
            Self::Grether { alpha, beta } => format!("grether({alpha},{beta})"),
            Self::Divisible(map) => {
                let gs: Vec<String> = map.gamma.iter().map(|g| g.to_string()).collect();
                format!("divisible([{}])", gs.join(","))
            }
        }
    }

    /// Whether the distortion is nondecreasing in the probability of state 1
    /// on binary beliefs. True for every rule implemented here.
    pub fn monotone_binary(&self) -> bool {
        true
    }

    fn check_states(&self, states: usize) -> Result<()> {
        match self {
            Self::Linear { .. } if states != 2 => Err(PersuasionError::UnsupportedStateCount {
                rule: "linear",
                supported: 2,
                states,
            }),
            Self::Divisible(map) if map.gamma.len() != states => {
                Err(PersuasionError::DimensionMismatch {
                    expected: map.gamma.len(),
                    actual: states,
                })
            }
            _ => Ok(()),
        }
    }

    /// The distortion `D_p(q)`.
    pub fn distort(&self, prior: &Belief, bayes_posterior: &Belief) -> Result<Belief> {
        let n = prior.dim();
        bayes_posterior.expect_dim(n)?;
        self.check_states(n)?;
        prior.require_full_support()?;
        let p = prior.probs();
        let q = bayes_posterior.probs();
        match self {
            Self::Bayesian => Ok(bayes_posterior.clone()),
            Self::Linear { alpha } => Belief::binary(linear_distortion(*alpha, p[1], q[1])),
            Self::Geometric { alpha } => power_form(p, q, 1.0 - alpha, *alpha),
            Self::BaseRate { alpha } => power_form(p, q, alpha - 1.0, 1.0),
            Self::Grether { alpha, beta } => power_form(p, q, alpha - beta, *beta),
            Self::Divisible(map) => {
                let fp = map.forward(prior)?;
                let weights = fp
                    .probs()
                    .iter()
                    .zip(p)
                    .zip(q)
                    .map(|((f, p), q)| f / p * q)
                    .collect();
                map.inverse(&Belief::from_weights(weights)?)
            }
        }
    }

    /// The receiver's updated belief `μ(σ, p)(·|s)` from the rule's own update formula.
    pub fn update(&self, exp: &Experiment, prior: &Belief, signal: usize) -> Result<Belief> {
        exp.check_signal(prior, signal)?;
        self.check_states(prior.dim())?;
        prior.require_full_support()?;
        let p = prior.probs();
        let lik = exp.likelihoods(signal);
        match self {
            Self::Bayesian => bayes_update(exp, prior, signal),
            Self::Linear { alpha } => {
                let bayes = p[1] * lik[1] / (p[0] * lik[0] + p[1] * lik[1]);
                Belief::binary(linear_distortion(*alpha, p[1], bayes))
            }
            Self::Geometric { alpha } => power_form(p, &lik, 1.0, *alpha),
            Self::BaseRate { alpha } => power_form(p, &lik, *alpha, 1.0),
            Self::Grether { alpha, beta } => power_form(p, &lik, *alpha, *beta),
            Self::Divisible(map) => {
                let fp = map.forward(prior)?;
                let weights = fp.probs().iter().zip(&lik).map(|(f, l)| f * l).collect();
                map.inverse(&Belief::from_weights(weights)?)
            }
        }
    }
}

/// Clamped linear distortion of the probability of state 1.
pub fn linear_distortion(alpha: f64, prior_high: f64, q_high: f64) -> f64 {
    (alpha * q_high + (1.0 - alpha) * prior_high).clamp(0.0, 1.0)
}

/// Threshold `q_α = 1/(2α) − (1−α)p/α` at which a linearly distorting receiver
/// with prior `p` reaches belief ½.
pub fn linear_threshold(alpha: f64, prior_high: f64) -> f64 {
    1.0 / (2.0 * alpha) - (1.0 - alpha) / alpha * prior_high
}

/// Normalized `a(θ)^{ea} b(θ)^{eb}`; zero entries of `b` stay zero.
fn power_form(a: &[f64], b: &[f64], ea: f64, eb: f64) -> Result<Belief> {
    let logs: Vec<f64> = a
        .iter()
        .zip(b)
        .map(|(x, y)| {
            if *y <= 0.0 {
                f64::NEG_INFINITY
            } else {
                ea * x.ln() + eb * y.ln()
            }
        })
        .collect();
    Belief::from_log_weights(&logs)
}

/// Outcome of [`verify_systematic`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SystematicReport {
    pub rule: String,
    pub trials: usize,
    pub max_deviation: f64,
}

/// Random experiment with `signals` signals; some entries are zeroed so that
/// boundary posteriors and clamping are exercised.
pub fn random_experiment<R: Rng>(rng: &mut R, states: usize, signals: usize) -> Experiment {
    let rows = (0..states)
        .map(|_| loop {
            let raw: Vec<f64> = (0..signals)
                .map(|_| {
                    if signals > 1 && rng.gen_bool(0.1) {
                        0.0
                    } else {
                        rng.gen_range(0.01..1.0)
                    }
                })
                .collect();
            let sum: f64 = raw.iter().sum();
            if sum > 0.0 {
                break raw.into_iter().map(|x| x / sum).collect::<Vec<_>>();
            }
        })
        .collect();
    Experiment::new(rows).expect("normalized rows")
}

/// Checks `update(σ, p, s) = distort(p, bayes(σ, p, s))` over random experiments.
pub fn verify_systematic(
    rule: &UpdatingRule,
    prior: &Belief,
    trials: usize,
    seed: u64,
) -> Result<SystematicReport> {
    if trials == 0 {
        return Err(PersuasionError::InvalidParameter(
            "trials must be at least 1".into(),
        ));
    }
    rule.validate()?;
    prior.require_full_support()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let states = prior.dim();
    let mut max_deviation: f64 = 0.0;
    let mut done = 0;
    while done < trials {
        let signals = rng.gen_range(1..=5);
        let exp = random_experiment(&mut rng, states, signals);
        let live: Vec<usize> = (0..signals)
            .filter(|&s| exp.marginal(prior, s) > 0.0)
            .collect();
        let signal = live[rng.gen_range(0..live.len())];
        let updated = rule.update(&exp, prior, signal)?;
        let distorted = rule.distort(prior, &bayes_update(&exp, prior, signal)?)?;
        let deviation = updated.max_abs_diff(&distorted);
        if deviation > SYSTEMATIC_TOLERANCE {
            return Err(PersuasionError::NotSystematic(Box::new(Counterexample {
                experiment: exp,
                signal,
                updated,
                distorted,
                deviation,
            })));
        }
        max_deviation = max_deviation.max(deviation);
        done += 1;
    }
    Ok(SystematicReport {
        rule: rule.label(),
        trials,
        max_deviation,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn b(p: f64) -> Belief {
        Belief::binary(p).unwrap()
    }

    /// Experiment whose single "good" signal moves prior `p` to Bayesian posterior `q`.
    fn signal_to(p: f64, q: f64) -> Experiment {
        // likelihood ratio σ1/σ0 = odds(q)/odds(p), with σ1(g) = 1
        let ratio = (q / (1.0 - q)) / (p / (1.0 - p));
        let s0 = (1.0 / ratio).min(1.0);
        let s1 = (ratio * s0).min(1.0);
        Experiment::new(vec![vec![s0, 1.0 - s0], vec![s1, 1.0 - s1]]).unwrap()
    }

    #[test]
    fn linear_examples() {
        let rule = UpdatingRule::linear(0.5).unwrap();
        let got = rule.update(&signal_to(0.3, 0.5), &b(0.3), 0).unwrap();
        assert!((got.high() - 0.4).abs() < 1e-12);
        let over = UpdatingRule::linear(2.0).unwrap();
        let got = over.update(&signal_to(0.3, 0.9), &b(0.3), 0).unwrap();
        assert_eq!(got.high(), 1.0);
    }

    #[test]
    fn linear_rejects_three_states() {
        let rule = UpdatingRule::linear(0.5).unwrap();
        let p = Belief::uniform(3);
        assert!(matches!(
            rule.distort(&p, &p),
            Err(PersuasionError::UnsupportedStateCount { states: 3, .. })
        ));
        assert!(matches!(
            rule.update(&Experiment::null(3), &p, 0),
            Err(PersuasionError::UnsupportedStateCount { .. })
        ));
    }

    #[test]
    fn grether_examples() {
        let exp = signal_to(0.3, 0.5);
        let bayes = UpdatingRule::Bayesian.update(&exp, &b(0.3), 0).unwrap();
        let g11 = UpdatingRule::grether(1.0, 1.0)
            .unwrap()
            .update(&exp, &b(0.3), 0)
            .unwrap();
        assert!(g11.approx_eq(&bayes, 1e-15));

        let g = UpdatingRule::grether(0.5, 1.0)
            .unwrap()
            .update(&exp, &b(0.3), 0)
            .unwrap();
        let want = 0.7f64.sqrt() / (0.7f64.sqrt() + 0.3f64.sqrt());
        assert!((g.high() - want).abs() < 1e-12, "{} vs {want}", g.high());
        assert!((want - 0.604356).abs() < 1e-6);
    }

    #[test]
    fn grether_distortion_example() {
        let rule = UpdatingRule::grether(2.0, 1.0).unwrap();
        let d = rule.distort(&b(0.3), &b(0.5)).unwrap();
        assert!((d.high() - 0.3).abs() < 1e-15);
    }

    #[test]
    fn uniform_prior_beta_one_is_identity() {
        for alpha in [0.3, 1.0, 2.5] {
            let rule = UpdatingRule::grether(alpha, 1.0).unwrap();
            for i in 0..=20 {
                let q = b(i as f64 / 20.0);
                let d = rule.distort(&b(0.5), &q).unwrap();
                assert!(d.approx_eq(&q, 1e-15));
            }
        }
    }

    #[test]
    fn rejects_bad_parameters_and_priors() {
        assert!(UpdatingRule::grether(0.0, 1.0).is_err());
        assert!(UpdatingRule::linear(-1.0).is_err());
        assert!(UpdatingRule::divisible(vec![1.0, f64::NAN]).is_err());
        let rule = UpdatingRule::geometric(2.0).unwrap();
        assert_eq!(
            rule.distort(&b(0.0), &b(0.3)),
            Err(PersuasionError::PriorNotFullSupport)
        );
    }

    #[test]
    fn boundary_posteriors_stay_on_boundary() {
        for rule in [
            UpdatingRule::grether(0.5, 2.0).unwrap(),
            UpdatingRule::geometric(0.4).unwrap(),
            UpdatingRule::base_rate(3.0).unwrap(),
            UpdatingRule::divisible(vec![0.5, 2.0]).unwrap(),
        ] {
            assert_eq!(rule.distort(&b(0.3), &b(0.0)).unwrap().high(), 0.0);
            assert_eq!(rule.distort(&b(0.3), &b(1.0)).unwrap().high(), 1.0);
        }
    }

    #[test]
    fn reduction_identities() {
        let p = b(0.3);
        for i in 0..=50 {
            let q = b(i as f64 / 50.0);
            let bayes = UpdatingRule::Bayesian.distort(&p, &q).unwrap();
            for beta in [0.4, 1.0, 2.2] {
                let g = UpdatingRule::grether(1.0, beta)
                    .unwrap()
                    .distort(&p, &q)
                    .unwrap();
                let geo = UpdatingRule::geometric(beta)
                    .unwrap()
                    .distort(&p, &q)
                    .unwrap();
                assert!(g.approx_eq(&geo, 1e-12));
            }
            for alpha in [0.4, 1.0, 2.2] {
                let g = UpdatingRule::grether(alpha, 1.0)
                    .unwrap()
                    .distort(&p, &q)
                    .unwrap();
                let br = UpdatingRule::base_rate(alpha)
                    .unwrap()
                    .distort(&p, &q)
                    .unwrap();
                assert!(g.approx_eq(&br, 1e-12));
            }
            for rule in [
                UpdatingRule::grether(1.0, 1.0).unwrap(),
                UpdatingRule::geometric(1.0).unwrap(),
                UpdatingRule::base_rate(1.0).unwrap(),
                UpdatingRule::linear(1.0).unwrap(),
            ] {
                assert!(rule.distort(&p, &q).unwrap().approx_eq(&bayes, 1e-12));
            }
        }
    }

    #[test]
    fn geometric_is_divisible_power_map() {
        let p = Belief::new(vec![0.2, 0.5, 0.3]).unwrap();
        let geo = UpdatingRule::geometric(1.7).unwrap();
        let div = UpdatingRule::Divisible(ParamHomeomorphism::geometric(1.7, 3).unwrap());
        let q = Belief::new(vec![0.6, 0.1, 0.3]).unwrap();
        let a = geo.distort(&p, &q).unwrap();
        let c = div.distort(&p, &q).unwrap();
        assert!(a.approx_eq(&c, 1e-12));
    }

    /// Divisible distortion against the direct definition on a 100-point grid:
    /// pick σ with Bayesian posterior q and compare to the μ_F update.
    #[test]
    fn divisible_distortion_matches_update_formula() {
        let rule = UpdatingRule::divisible(vec![0.6, 2.3]).unwrap();
        let p = b(0.35);
        for i in 1..100 {
            let q = i as f64 / 100.0;
            let exp = signal_to(0.35, q);
            let direct = rule.update(&exp, &p, 0).unwrap();
            let via = rule.distort(&p, &b(q)).unwrap();
            assert!(direct.approx_eq(&via, 1e-10), "q={q}");
        }
    }

    #[test]
    fn power_map_inverse_round_trip() {
        let map = ParamHomeomorphism::new(vec![0.4, 1.0, 3.5]).unwrap();
        for i in 0..=10 {
            for j in 0..=(10 - i) {
                let x =
                    Belief::from_weights(vec![i as f64, j as f64, (10 - i - j) as f64]).unwrap();
                let y = map.forward(&x).unwrap();
                assert!(y.full_support() == x.full_support());
                let back = map.inverse(&y).unwrap();
                assert!(back.approx_eq(&x, 1e-10), "{x:?} -> {back:?}");
                let fwd = map.forward(&map.inverse(&x).unwrap()).unwrap();
                assert!(fwd.approx_eq(&x, 1e-10));
            }
        }
    }

    #[test]
    fn systematic_examples() {
        let p = Belief::new(vec![0.7, 0.3]).unwrap();
        let report =
            verify_systematic(&UpdatingRule::grether(1.7, 0.4).unwrap(), &p, 1000, 7).unwrap();
        assert!(report.max_deviation < 1e-10);
        let report = verify_systematic(&UpdatingRule::Bayesian, &p, 200, 7).unwrap();
        assert_eq!(report.max_deviation, 0.0);
        let report =
            verify_systematic(&UpdatingRule::linear(3.0).unwrap(), &b(0.3), 1000, 9).unwrap();
        assert!(report.max_deviation < 1e-10);
    }

    #[test]
    fn systematic_multistate() {
        let p = Belief::new(vec![0.2, 0.5, 0.3]).unwrap();
        for rule in [
            UpdatingRule::geometric(0.6).unwrap(),
            UpdatingRule::base_rate(2.0).unwrap(),
            UpdatingRule::grether(0.3, 1.9).unwrap(),
            UpdatingRule::divisible(vec![0.5, 1.0, 2.0]).unwrap(),
        ] {
            let report = verify_systematic(&rule, &p, 300, 3).unwrap();
            assert!(report.max_deviation < 1e-10, "{}", report.rule);
        }
    }

    #[test]
    fn serde_grammar() {
        let r: UpdatingRule =
            serde_json::from_str(r#"{"type":"grether","alpha":0.5,"beta":1.0}"#).unwrap();
        assert_eq!(
            r,
            UpdatingRule::Grether {
                alpha: 0.5,
                beta: 1.0
            }
        );
        let r: UpdatingRule = serde_json::from_str(r#"{"type":"linear","alpha":1.5}"#).unwrap();
        assert_eq!(r, UpdatingRule::Linear { alpha: 1.5 });
        let r: UpdatingRule =
            serde_json::from_str(r#"{"type":"divisible","gamma":[1.0,2.0]}"#).unwrap();
        assert_eq!(r, UpdatingRule::divisible(vec![1.0, 2.0]).unwrap());
        assert!(
            serde_json::from_str::<UpdatingRule>(r#"{"type":"linear","alpha":1.5,"beta":2}"#)
                .is_err()
        );
        assert!(serde_json::from_str::<UpdatingRule>(
            r#"{"type":"divisible","gamma":[1.0],"x":0}"#
        )
        .is_err());
        let r: UpdatingRule = serde_json::from_str(r#"{"type":"base_rate","alpha":2}"#).unwrap();
        assert_eq!(r.label(), "base_rate(2)");
        let r: UpdatingRule = serde_json::from_str(r#"{"type":"bayesian"}"#).unwrap();
        assert_eq!(r, UpdatingRule::Bayesian);
    }

    proptest! {
        #[test]
        fn bayesian_distortion_is_identity(p in 0.01f64..0.99, q in 0.0f64..=1.0) {
            let d = UpdatingRule::Bayesian.distort(&b(p), &b(q)).unwrap();
            prop_assert_eq!(d.high(), q);
        }

        #[test]
        fn linear_monotone(alpha in 0.05f64..4.0, p in 0.01f64..0.99, q1 in 0.0f64..=1.0, q2 in 0.0f64..=1.0) {
            let rule = UpdatingRule::linear(alpha).unwrap();
            let (lo, hi) = if q1 <= q2 { (q1, q2) } else { (q2, q1) };
            let dlo = rule.distort(&b(p), &b(lo)).unwrap().high();
            let dhi = rule.distort(&b(p), &b(hi)).unwrap().high();
            prop_assert!(dlo <= dhi);
        }

        #[test]
        fn grether_preserves_full_support(alpha in 0.05f64..5.0, beta in 0.05f64..5.0, p in 0.01f64..0.99, q in 0.001f64..0.999) {
            let rule = UpdatingRule::grether(alpha, beta).unwrap();
            let d = rule.distort(&b(p), &b(q)).unwrap();
            prop_assert!(d.full_support());
        }
    }
}
