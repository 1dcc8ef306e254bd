//! The modified block model: after sampling the parent graph, every listed
//! subgraph (self-bad, or a short cycle) present in it loses one uniformly
//! chosen edge.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{Edge, LabeledGraph};

use super::potential::{self_bad_subgraphs, Potential};
use super::sample::{random_permutation, sample_sbm, subsample, CorrelatedSample};
use super::ModelParams;

pub const MODIFIED_MAX_N: usize = 30;
pub const MODIFIED_MAX_CYCLE_LEN: usize = 6;
pub const MODIFIED_MAX_DEGREE: usize = 3;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RemovalPolicy {
    /// Every listed subgraph present in the parent draws an edge; removing an
    /// edge twice has no further effect.
    #[default]
    Independent,
    /// A listed subgraph already broken by an earlier removal draws nothing.
    SkipBroken,
}

fn check_size(params: &ModelParams) -> Result<(usize, usize)> {
    let d = params.degree()?;
    let big_n = params.cycle_len()?;
    if params.n > MODIFIED_MAX_N || big_n > MODIFIED_MAX_CYCLE_LEN || d > MODIFIED_MAX_DEGREE {
        return Err(Error::TooLarge(format!(
            "modified model needs n ≤ {MODIFIED_MAX_N}, N ≤ {MODIFIED_MAX_CYCLE_LEN}, D ≤ {MODIFIED_MAX_DEGREE} (got n={}, N={big_n}, D={d})",
            params.n
        )));
    }
    Ok((d, big_n))
}

/// Self-bad subgraphs on at most `D³` vertices and cycles of length at most `N`
/// contained in `g`, without repeats, ordered by their sorted edge lists.
pub fn listed_subgraphs(g: &LabeledGraph, params: &ModelParams) -> Result<Vec<LabeledGraph>> {
    let d = params.degree()?;
    let big_n = params.cycle_len()?;
    let form = Potential::sbm(params)?;
    let mut all = self_bad_subgraphs(g, &form, d * d * d)?;
    all.extend(g.cycles_up_to(big_n));
    let mut keyed: Vec<(Vec<Edge>, LabeledGraph)> = all
        .into_iter()
        .map(|h| (h.edges().iter().copied().collect(), h))
        .collect();
    keyed.sort_by(|a, b| a.0.cmp(&b.0));
    keyed.dedup_by(|a, b| a.0 == b.0);
    Ok(keyed.into_iter().map(|(_, h)| h).collect())
}

/// Applies the removals to `g`; returns the pruned graph and the removed edges
/// in draw order.
pub fn prune<R: Rng + ?Sized>(
    g: &LabeledGraph,
    params: &ModelParams,
    policy: RemovalPolicy,
    rng: &mut R,
) -> Result<(LabeledGraph, Vec<Edge>)> {
    let listed = listed_subgraphs(g, params)?;
    let mut pruned = g.clone();
    let mut removed = Vec::new();
    for h in &listed {
        if policy == RemovalPolicy::SkipBroken && !h.edges().is_subset(pruned.edges()) {
            continue;
        }
        let edges: Vec<Edge> = h.edges().iter().copied().collect();
        let (u, v) = edges[rng.gen_range(0..edges.len())];
        pruned.remove_edge(u, v);
        removed.push((u, v));
    }
    Ok((pruned, removed))
}

pub fn sample_modified_sbm<R: Rng + ?Sized>(
    params: &ModelParams,
    policy: RemovalPolicy,
    rng: &mut R,
) -> Result<CorrelatedSample> {
    check_size(params)?;
    let s = params
        .s
        .as_ref()
        .ok_or_else(|| crate::error::invalid("s", "required but not set"))?
        .value();
    let pi = random_permutation(params.n, rng);
    let (labels, g) = sample_sbm(params, rng)?;
    let (pruned, _) = prune(&g, params, policy, rng)?;
    let (a, b) = subsample(&pruned, s, &pi, rng);
    Ok(CorrelatedSample {
        pi_star: pi,
        sigma_star: Some(labels),
        parent: g,
        pruned: Some(pruned),
        left: a,
        right: b,
    })
}
