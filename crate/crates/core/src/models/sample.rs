use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{invalid, Result};
use crate::graph::LabeledGraph;

use super::ModelParams;

/// Generator for trial `trial` of an experiment seeded with `seed`. Each trial
/// gets its own ChaCha stream, so trials can run in any order or in parallel.
pub fn trial_rng(seed: u64, trial: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial);
    rng
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CorrelatedSample {
    pub pi_star: Vec<usize>,
    pub sigma_star: Option<Vec<usize>>,
    pub parent: LabeledGraph,
    /// Parent after the removals of the modified model.
    pub pruned: Option<LabeledGraph>,
    pub left: LabeledGraph,
    pub right: LabeledGraph,
}

impl CorrelatedSample {
    /// `B` pulled back through `π*`, so that its edges line up with those of `A`.
    pub fn right_aligned(&self) -> LabeledGraph {
        let mut inv = vec![0; self.pi_star.len()];
        for (i, &p) in self.pi_star.iter().enumerate() {
            inv[p] = i;
        }
        self.right.relabel(&inv)
    }
}

pub fn random_permutation<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Vec<usize> {
    let mut pi: Vec<usize> = (0..n).collect();
    pi.shuffle(rng);
    pi
}

fn bernoulli_graph<R: Rng + ?Sized>(n: usize, prob: impl Fn(usize, usize) -> f64, rng: &mut R) -> LabeledGraph {
    let mut g = LabeledGraph::edgeless(n);
    for u in 0..n {
        for v in u + 1..n {
            if rng.gen::<f64>() < prob(u, v) {
                g.add_edge(u, v).expect("vertices in range");
            }
        }
    }
    g
}

/// Keeps each edge of `g` independently with probability `s` for `A`, and
/// independently again for `B`, whose vertices are relabeled by `pi`.
pub fn subsample<R: Rng + ?Sized>(g: &LabeledGraph, s: f64, pi: &[usize], rng: &mut R) -> (LabeledGraph, LabeledGraph) {
    let n = g.n();
    let mut a = LabeledGraph::edgeless(n);
    let mut b = LabeledGraph::edgeless(n);
    for &(u, v) in g.edges() {
        if rng.gen::<f64>() < s {
            a.add_edge(u, v).expect("in range");
        }
        if rng.gen::<f64>() < s {
            b.add_edge(pi[u], pi[v]).expect("in range");
        }
    }
    (a, b)
}

pub fn sample_er<R: Rng + ?Sized>(n: usize, p: f64, rng: &mut R) -> Result<LabeledGraph> {
    if !(0.0..=1.0).contains(&p) {
        return Err(invalid("p", format!("{p} is not a probability")));
    }
    Ok(bernoulli_graph(n, |_, _| p, rng))
}

pub fn sample_correlated_er<R: Rng + ?Sized>(params: &ModelParams, rng: &mut R) -> Result<CorrelatedSample> {
    params.validate()?;
    let p = params.p()?.value();
    let s = params.s()?.value();
    let n = params.n;
    let pi = random_permutation(n, rng);
    let g = bernoulli_graph(n, |_, _| p, rng);
    let (a, b) = subsample(&g, s, &pi, rng);
    Ok(CorrelatedSample {
        pi_star: pi,
        sigma_star: None,
        parent: g,
        pruned: None,
        left: a,
        right: b,
    })
}

pub fn sample_sbm<R: Rng + ?Sized>(params: &ModelParams, rng: &mut R) -> Result<(Vec<usize>, LabeledGraph)> {
    params.validate()?;
    let k = params.k()?;
    let (same, diff) = params.sbm_probabilities()?;
    let (same, diff) = (same.value(), diff.value());
    let labels: Vec<usize> = (0..params.n).map(|_| rng.gen_range(0..k)).collect();
    let g = bernoulli_graph(params.n, |u, v| if labels[u] == labels[v] { same } else { diff }, rng);
    Ok((labels, g))
}

pub fn sample_correlated_sbm<R: Rng + ?Sized>(params: &ModelParams, rng: &mut R) -> Result<CorrelatedSample> {
    let s = params
        .s
        .as_ref()
        .ok_or_else(|| invalid("s", "required but not set"))?
        .value();
    let pi = random_permutation(params.n, rng);
    let (labels, g) = sample_sbm(params, rng)?;
    let (a, b) = subsample(&g, s, &pi, rng);
    Ok(CorrelatedSample {
        pi_star: pi,
        sigma_star: Some(labels),
        parent: g,
        pruned: None,
        left: a,
        right: b,
    })
}
