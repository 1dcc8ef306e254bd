//! From matching estimators to detection statistics, and an empirical harness
//! for one-sided tests.

use std::collections::BTreeMap;
use std::str::FromStr;

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, Normal};

use crate::error::{invalid, Error, Result};
use crate::exact::Number;
use crate::graph::LabeledGraph;
use crate::models::{random_permutation, sample_correlated_er, sample_er, trial_rng, ModelParams};

/// `OV(π, π') = (1/n)·#{i : π(i) = π'(i)}`.
pub fn overlap(pi: &[usize], pi_prime: &[usize]) -> Result<Number> {
    if pi.len() != pi_prime.len() {
        return Err(Error::AmbientMismatch(pi.len(), pi_prime.len()));
    }
    if pi.is_empty() {
        return Err(invalid("pi", "empty permutation"));
    }
    let hits = pi.iter().zip(pi_prime).filter(|(a, b)| a == b).count();
    Ok(Number::ratio(hits as i64, pi.len() as i64))
}

/// Statistics `f_{i,j}` for `i, j ∈ [n]`, stored row by row.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct IndicatorFamily {
    pub n: usize,
    pub values: Vec<f64>,
}

impl IndicatorFamily {
    pub fn new(n: usize, values: Vec<f64>) -> Result<Self> {
        if values.len() != n * n {
            return Err(invalid(
                "values",
                format!("expected {} entries, got {}", n * n, values.len()),
            ));
        }
        Ok(IndicatorFamily { n, values })
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.n + j]
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.values[i * self.n..(i + 1) * self.n]
    }

    pub fn row_sum(&self, i: usize) -> f64 {
        self.row(i).iter().sum()
    }

    /// Entries in `{0,1}` and every row summing to exactly one.
    pub fn is_indicator(&self) -> bool {
        self.values.iter().all(|&v| v == 0.0 || v == 1.0) && (0..self.n).all(|i| self.row_sum(i) == 1.0)
    }

    /// Entries in `{0,1}` and every row sum in `{0,1}`.
    pub fn is_regularized(&self) -> bool {
        self.values.iter().all(|&v| v == 0.0 || v == 1.0)
            && (0..self.n).all(|i| {
                let s = self.row_sum(i);
                s == 0.0 || s == 1.0
            })
    }

    /// `Σ_i f_{i,π(i)}`.
    pub fn hits(&self, pi: &[usize]) -> f64 {
        pi.iter().enumerate().map(|(i, &j)| self.get(i, j)).sum()
    }
}

/// `h_{i,j} = 1{π̂(i) = j}`.
pub fn estimator_to_indicators(pi_hat: &[usize]) -> IndicatorFamily {
    let n = pi_hat.len();
    let mut values = vec![0.0; n * n];
    for (i, &j) in pi_hat.iter().enumerate() {
        values[i * n + j] = 1.0;
    }
    IndicatorFamily { n, values }
}

/// `f'_{i,j} = f_{i,j}·1_𝒜`, where `𝒜` asks every entry to lie in `{0,1}` and
/// every row to sum to one.
pub fn truncate_family(f: &IndicatorFamily) -> IndicatorFamily {
    if f.is_indicator() {
        f.clone()
    } else {
        IndicatorFamily {
            n: f.n,
            values: vec![0.0; f.values.len()],
        }
    }
}

/// `g_j = (1−λ)/n + λ·f_j`.
pub fn mix_statistic(f_row: &[f64], lambda: f64) -> Result<Vec<f64>> {
    if !(0.0..=1.0).contains(&lambda) {
        return Err(invalid("lambda_mix", format!("{lambda} is not in [0,1]")));
    }
    if f_row.is_empty() {
        return Err(invalid("f_row", "empty row"));
    }
    let n = f_row.len() as f64;
    Ok(f_row.iter().map(|&f| (1.0 - lambda) / n + lambda * f).collect())
}

/// `Σ_j (1{π*(i) = j} − g_j)²` for one sample.
pub fn mixed_square_error(g: &[f64], target: usize) -> f64 {
    g.iter()
        .enumerate()
        .map(|(j, &x)| {
            let e = if j == target { 1.0 } else { 0.0 };
            (e - x) * (e - x)
        })
        .sum()
}

/// `1 + λ² − 2cλ`, the leading part of the bound on the mixed square error.
pub fn mixed_error_bound(lambda: f64, c: f64) -> f64 {
    1.0 + lambda * lambda - 2.0 * c * lambda
}

/// `g = Σ_j g_j`.
pub fn aggregate_statistic(g: &[f64]) -> f64 {
    g.iter().sum()
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LambdaSet {
    pub members: Vec<usize>,
    /// `cn/2`.
    pub bound: f64,
    /// Whether the errors sum to at most `1 − c`, the hypothesis of the bound.
    pub hypothesis: bool,
    pub holds: bool,
}

/// `Λ = {j : mse_j ≤ (1 − c/2)/n}`; when `Σ mse ≤ 1 − c`, Markov gives `|Λ| ≥ cn/2`.
pub fn lambda_set(mse: &[f64], c: f64) -> Result<LambdaSet> {
    if !(c > 0.0 && c <= 1.0) {
        return Err(invalid("c", format!("{c} is not in (0,1]")));
    }
    let n = mse.len() as f64;
    let cut = (1.0 - c / 2.0) / n;
    let members: Vec<usize> = (0..mse.len()).filter(|&j| mse[j] <= cut).collect();
    let hypothesis = mse.iter().sum::<f64>() <= 1.0 - c + 1e-12;
    let bound = c * n / 2.0;
    let holds = !hypothesis || members.len() as f64 >= bound;
    Ok(LambdaSet {
        members,
        bound,
        hypothesis,
        holds,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EstimatorKind {
    Identity,
    Random,
    /// Matches vertices by rank of degree.
    Greedy,
}

impl FromStr for EstimatorKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "identity" => Ok(EstimatorKind::Identity),
            "random" => Ok(EstimatorKind::Random),
            "greedy" => Ok(EstimatorKind::Greedy),
            other => Err(Error::Parse(format!("unknown estimator {other}"))),
        }
    }
}

fn degree_order(g: &LabeledGraph) -> Vec<usize> {
    let mut vs: Vec<usize> = (0..g.n()).collect();
    vs.sort_by_key(|&v| (std::cmp::Reverse(g.degree(v)), v));
    vs
}

impl EstimatorKind {
    /// An estimate `π̂` of the map from vertices of `A` to vertices of `B`.
    pub fn estimate<R: Rng + ?Sized>(&self, a: &LabeledGraph, b: &LabeledGraph, rng: &mut R) -> Vec<usize> {
        let n = a.n();
        match self {
            EstimatorKind::Identity => (0..n).collect(),
            EstimatorKind::Random => random_permutation(n, rng),
            EstimatorKind::Greedy => {
                let oa = degree_order(a);
                let ob = degree_order(b);
                let mut pi = vec![0; n];
                for (x, y) in oa.into_iter().zip(ob) {
                    pi[x] = y;
                }
                pi
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Rate {
    pub rate: f64,
    pub successes: u64,
    pub trials: u64,
    /// Wilson 95% interval.
    pub ci_low: f64,
    pub ci_high: f64,
}

impl Rate {
    pub fn new(successes: u64, trials: u64) -> Result<Self> {
        if trials == 0 {
            return Err(invalid("trials", "must be positive"));
        }
        let z = Normal::new(0.0, 1.0).expect("standard normal").inverse_cdf(0.975);
        let n = trials as f64;
        let p = successes as f64 / n;
        let den = 1.0 + z * z / n;
        let centre = (p + z * z / (2.0 * n)) / den;
        let half = z * (p * (1.0 - p) / n + z * z / (4.0 * n * n)).sqrt() / den;
        Ok(Rate {
            rate: p,
            successes,
            trials,
            ci_low: (centre - half).max(0.0),
            ci_high: (centre + half).min(1.0),
        })
    }

    pub fn std_error(&self) -> f64 {
        (self.rate * (1.0 - self.rate) / self.trials as f64).sqrt()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DetectionThresholds {
    /// A rate at least this large counts as `1 − o(1)`.
    pub near_one: f64,
    /// A rate at least this large counts as `Ω(1)`.
    pub bounded_below: f64,
}

impl Default for DetectionThresholds {
    fn default() -> Self {
        DetectionThresholds {
            near_one: 0.95,
            bounded_below: 0.1,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TestClass {
    StrongDetectCandidate,
    OneSidedCandidate,
    Powerless,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OneSidedTestReport {
    /// Empirical `Q(𝒜 = 0)`.
    pub q_accept: Rate,
    /// Empirical `P(𝒜 = 1)`.
    pub p_reject: Rate,
    pub q_accept_rate: f64,
    pub p_reject_rate: f64,
    pub threshold: f64,
    pub trials: u64,
    pub seed: u64,
    pub classification: TestClass,
}

pub type Sampler<'a, T> = dyn Fn(&mut ChaCha8Rng) -> Result<T> + Sync + 'a;

/// Runs `𝒜 = 1{statistic > threshold}` on `trials` draws from each sampler.
/// Trial `t` of the alternative uses stream `2t`, of the null stream `2t+1`.
pub fn one_sided_test<T>(
    statistic: &(dyn Fn(&T) -> f64 + Sync),
    threshold: f64,
    p_sampler: &Sampler<'_, T>,
    q_sampler: &Sampler<'_, T>,
    trials: u64,
    seed: u64,
    thresholds: DetectionThresholds,
) -> Result<OneSidedTestReport> {
    if trials == 0 {
        return Err(invalid("trials", "must be positive"));
    }
    let count = |sampler: &Sampler<'_, T>, offset: u64, reject: bool| -> Result<u64> {
        let flags: Vec<bool> = (0..trials)
            .into_par_iter()
            .map(|t| {
                let mut rng = trial_rng(seed, 2 * t + offset);
                let x = sampler(&mut rng)?;
                Ok((statistic(&x) > threshold) == reject)
            })
            .collect::<Result<_>>()?;
        Ok(flags.into_iter().filter(|&f| f).count() as u64)
    };
    let p_reject = Rate::new(count(p_sampler, 0, true)?, trials)?;
    let q_accept = Rate::new(count(q_sampler, 1, false)?, trials)?;
    let classification = if q_accept.rate >= thresholds.near_one && p_reject.rate >= thresholds.near_one {
        TestClass::StrongDetectCandidate
    } else if q_accept.rate >= thresholds.near_one && p_reject.rate >= thresholds.bounded_below {
        TestClass::OneSidedCandidate
    } else {
        TestClass::Powerless
    };
    Ok(OneSidedTestReport {
        q_accept_rate: q_accept.rate,
        p_reject_rate: p_reject.rate,
        q_accept,
        p_reject,
        threshold,
        trials,
        seed,
        classification,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Summary {
    pub mean: f64,
    pub std_dev: f64,
    pub min: f64,
    pub max: f64,
    /// Value (printed with six decimals) to frequency.
    pub histogram: BTreeMap<String, u64>,
}

pub fn summarize(xs: &[f64]) -> Summary {
    let n = xs.len().max(1) as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let var = xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / n;
    let mut histogram = BTreeMap::new();
    for x in xs {
        *histogram.entry(format!("{x:.6}")).or_insert(0) += 1;
    }
    Summary {
        mean,
        std_dev: var.sqrt(),
        min: xs.iter().copied().fold(f64::INFINITY, f64::min),
        max: xs.iter().copied().fold(f64::NEG_INFINITY, f64::max),
        histogram,
    }
}

/// A correlated pair with its hidden permutation (absent under the null).
#[derive(Clone, Debug)]
pub struct PairSample {
    pub a: LabeledGraph,
    pub b: LabeledGraph,
    pub pi_star: Option<Vec<usize>>,
}

/// Correlated Erdős–Rényi pair conditioned on `π*(0) = 0`: the right graph is
/// relabeled by the transposition sending `π*(0)` to `0`.
pub fn sample_pinned_pair(params: &ModelParams, rng: &mut ChaCha8Rng) -> Result<PairSample> {
    let x = sample_correlated_er(params, rng)?;
    let n = params.n;
    let j = x.pi_star[0];
    let swap: Vec<usize> = (0..n)
        .map(|v| {
            if v == j {
                0
            } else if v == 0 {
                j
            } else {
                v
            }
        })
        .collect();
    let pi: Vec<usize> = x.pi_star.iter().map(|&v| swap[v]).collect();
    Ok(PairSample {
        a: x.left,
        b: x.right.relabel(&swap),
        pi_star: Some(pi),
    })
}

pub fn sample_null_pair(params: &ModelParams, rng: &mut ChaCha8Rng) -> Result<PairSample> {
    let q = params.q()?.value();
    Ok(PairSample {
        a: sample_er(params.n, q, rng)?,
        b: sample_er(params.n, q, rng)?,
        pi_star: None,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReductionConfig {
    pub estimator: EstimatorKind,
    pub lambda_mix: f64,
    pub trials: u64,
    pub seed: u64,
    /// The test rejects when `g_0 > c/2`.
    pub c: f64,
    #[serde(default)]
    pub thresholds: DetectionThresholds,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ReductionReport {
    pub overlap: Summary,
    pub g_alternative: Summary,
    pub g_null: Summary,
    pub mixed_square_error: f64,
    pub mixed_error_bound: f64,
    pub test: OneSidedTestReport,
}

fn mixed_first_row(est: EstimatorKind, x: &PairSample, lambda: f64, rng: &mut ChaCha8Rng) -> Result<Vec<f64>> {
    let pi_hat = est.estimate(&x.a, &x.b, rng);
    let f = truncate_family(&estimator_to_indicators(&pi_hat));
    mix_statistic(f.row(0), lambda)
}

/// Overlaps of the estimator, the mixed statistic `g_0 = (1−λ)/n + λ f_{0,0}`
/// under the pinned alternative and the null, and the test `g_0 > c/2`.
pub fn run_reduction(params: &ModelParams, cfg: &ReductionConfig) -> Result<ReductionReport> {
    if cfg.trials == 0 {
        return Err(invalid("trials", "must be positive"));
    }
    let est = cfg.estimator;
    let lambda = cfg.lambda_mix;
    mix_statistic(&[0.0], lambda)?;
    let per_trial: Vec<(f64, f64, f64, f64)> = (0..cfg.trials)
        .into_par_iter()
        .map(|t| {
            let mut rng = trial_rng(cfg.seed, 2 * t);
            let x = sample_pinned_pair(params, &mut rng)?;
            let pi_star = x.pi_star.clone().expect("alternative carries π*");
            let pi_hat = est.estimate(&x.a, &x.b, &mut rng);
            let ov = overlap(&pi_hat, &pi_star)?.value();
            let g = mix_statistic(truncate_family(&estimator_to_indicators(&pi_hat)).row(0), lambda)?;
            let err = mixed_square_error(&g, pi_star[0]);
            let mut qrng = trial_rng(cfg.seed, 2 * t + 1);
            let y = sample_null_pair(params, &mut qrng)?;
            let gq = mixed_first_row(est, &y, lambda, &mut qrng)?;
            Ok((ov, g[0], gq[0], err))
        })
        .collect::<Result<_>>()?;
    let ovs: Vec<f64> = per_trial.iter().map(|r| r.0).collect();
    let gp: Vec<f64> = per_trial.iter().map(|r| r.1).collect();
    let gq: Vec<f64> = per_trial.iter().map(|r| r.2).collect();
    let mse = per_trial.iter().map(|r| r.3).sum::<f64>() / cfg.trials as f64;
    // Empirical c: mean of f_{0,π*(0)} under the alternative.
    let c_hat = if lambda > 0.0 {
        let n = params.n as f64;
        gp.iter().map(|g| (g - (1.0 - lambda) / n) / lambda).sum::<f64>() / cfg.trials as f64
    } else {
        0.0
    };
    let stat = |x: &PairSample| -> f64 {
        // The statistic is deterministic given the sample for all but the random estimator;
        // its stream is derived from the graphs so the test is reproducible.
        let mut rng = trial_rng(
            cfg.seed ^ 0x5eed,
            x.a.num_edges() as u64 * 65_537 + x.b.num_edges() as u64,
        );
        mixed_first_row(est, x, lambda, &mut rng).map(|g| g[0]).unwrap_or(0.0)
    };
    let p_sampler = |rng: &mut ChaCha8Rng| sample_pinned_pair(params, rng);
    let q_sampler = |rng: &mut ChaCha8Rng| sample_null_pair(params, rng);
    let test = one_sided_test(
        &stat,
        cfg.c / 2.0,
        &p_sampler,
        &q_sampler,
        cfg.trials,
        cfg.seed,
        cfg.thresholds,
    )?;
    Ok(ReductionReport {
        overlap: summarize(&ovs),
        g_alternative: summarize(&gp),
        g_null: summarize(&gq),
        mixed_square_error: mse,
        mixed_error_bound: mixed_error_bound(lambda, c_hat),
        test,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn overlap_examples() {
        assert_eq!(overlap(&[0, 1, 2, 3], &[0, 1, 2, 3]).unwrap(), Number::int(1));
        assert_eq!(overlap(&[0, 1, 2, 3], &[1, 0, 2, 3]).unwrap(), Number::ratio(1, 2));
        assert!(overlap(&[0, 1], &[0, 1, 2]).is_err());
    }

    #[test]
    fn indicators_match_overlap() {
        let pi_hat = vec![2, 0, 1, 3];
        let pi_star = vec![2, 1, 0, 3];
        let h = estimator_to_indicators(&pi_hat);
        assert!(h.is_indicator());
        assert_eq!(h.hits(&pi_star), 4.0 * overlap(&pi_hat, &pi_star).unwrap().value());
    }

    #[test]
    fn truncation_zeroes_bad_samples() {
        let good = estimator_to_indicators(&[1, 0, 2]);
        assert_eq!(truncate_family(&good), good);
        let mut bad = good.clone();
        bad.values[0] = 1.0;
        let t = truncate_family(&bad);
        assert!(t.values.iter().all(|&v| v == 0.0));
        assert!(t.is_regularized());
    }

    #[test]
    fn mixing_examples() {
        assert_eq!(
            mix_statistic(&[0.0, 1.0, 0.0, 0.0], 0.5).unwrap(),
            vec![0.125, 0.625, 0.125, 0.125]
        );
        assert_eq!(mix_statistic(&[1.0, 0.0, 0.0], 0.0).unwrap(), vec![1.0 / 3.0; 3]);
        assert_eq!(mix_statistic(&[1.0, 0.0], 1.0).unwrap(), vec![1.0, 0.0]);
        assert!(mix_statistic(&[1.0], 1.5).is_err());
    }

    #[test]
    fn lambda_set_bound() {
        let mse = vec![0.01, 0.01, 0.5, 0.01, 0.01, 0.01, 0.01, 0.01, 0.01, 0.01];
        let l = lambda_set(&mse, 0.3).unwrap();
        assert!(l.hypothesis && l.holds);
        assert_eq!(l.members.len(), 9);
    }

    #[test]
    fn zero_statistic_never_rejects() {
        let sampler = |_: &mut ChaCha8Rng| Ok(0u8);
        let r = one_sided_test(
            &|_: &u8| 0.0,
            0.5,
            &sampler,
            &sampler,
            50,
            1,
            DetectionThresholds::default(),
        )
        .unwrap();
        assert_eq!(r.q_accept_rate, 1.0);
        assert_eq!(r.p_reject_rate, 0.0);
        assert_eq!(r.classification, TestClass::Powerless);
    }
}
