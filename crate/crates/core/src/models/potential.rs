//! The admissibility potentials Φ (Erdős–Rényi) and Υ (block model), bad and
//! self-bad subgraphs, and the conditioning events.
//!
//! Both potentials have the form `c_V^{|V(H)|} c_E^{|E(H)|}` and are handled in
//! log space. Candidate subgraphs are edge-induced: a subgraph is identified
//! with its edge set and the endpoints of those edges.

use std::collections::BTreeSet;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{Edge, LabeledGraph};

use super::sample::{sample_er, sample_sbm, trial_rng};
use super::ModelParams;

/// Exhaustive subset searches are limited to graphs with this many edges.
pub const EXHAUSTIVE_EDGE_LIMIT: usize = 20;
/// Self-bad classification of a single graph is limited to this many edges.
pub const SELF_BAD_EDGE_LIMIT: usize = 12;
const CANDIDATE_BUDGET: usize = 200_000;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Potential {
    pub log_vertex: f64,
    pub log_edge: f64,
    /// `ln(1/ln n)`; a graph is bad when its log potential is below this.
    pub log_threshold: f64,
}

impl Potential {
    /// `Φ(H) = (n^{1+4/D} D^{20})^{|V|} (q D^6)^{|E|}`.
    pub fn er(params: &ModelParams) -> Result<Self> {
        let n = params.n as f64;
        let d = params.degree()? as f64;
        let q = params.q()?.value();
        Ok(Potential {
            log_vertex: (1.0 + 4.0 / d) * n.ln() + 20.0 * d.ln(),
            log_edge: q.ln() + 6.0 * d.ln(),
            log_threshold: -(n.ln().ln()),
        })
    }

    /// `Υ(H) = (2λ̃²k²n/D^{50})^{|V|} (1000 λ̃^{20} k^{20} D^{50}/n)^{|E|}` with `λ̃ = max(λ, 1)`.
    pub fn sbm(params: &ModelParams) -> Result<Self> {
        let n = params.n as f64;
        let d = params.degree()? as f64;
        let k = params.k()? as f64;
        let lt = params.lambda_tilde()?;
        Ok(Potential {
            log_vertex: 2f64.ln() + 2.0 * lt.ln() + 2.0 * k.ln() + n.ln() - 50.0 * d.ln(),
            log_edge: 1000f64.ln() + 20.0 * lt.ln() + 20.0 * k.ln() + 50.0 * d.ln() - n.ln(),
            log_threshold: -(n.ln().ln()),
        })
    }

    pub fn log_value(&self, vertices: usize, edges: usize) -> f64 {
        self.log_vertex * vertices as f64 + self.log_edge * edges as f64
    }

    pub fn log_of(&self, h: &LabeledGraph) -> f64 {
        self.log_value(h.num_vertices(), h.num_edges())
    }

    pub fn value_of(&self, h: &LabeledGraph) -> f64 {
        self.log_of(h).exp()
    }

    pub fn is_bad(&self, h: &LabeledGraph) -> bool {
        self.log_of(h) < self.log_threshold
    }

    /// True when the form alone rules out any bad nonempty edge-induced graph.
    pub fn nothing_bad(&self) -> bool {
        let single_edge = 2.0 * self.log_vertex + self.log_edge;
        if self.log_vertex >= 0.0 && self.log_edge >= 0.0 {
            // The potential increases with both counts; a single edge is minimal.
            return single_edge >= self.log_threshold;
        }
        // With |V| ≤ 2|E| the log potential is at least |E|·(2 log c_V + log c_E).
        self.log_vertex < 0.0 && self.log_edge >= 0.0 && single_edge >= 0.0 && self.log_threshold <= 0.0
    }
}

pub fn phi_potential(h: &LabeledGraph, params: &ModelParams) -> Result<f64> {
    Ok(Potential::er(params)?.value_of(h))
}

pub fn upsilon_potential(h: &LabeledGraph, params: &ModelParams) -> Result<f64> {
    Ok(Potential::sbm(params)?.value_of(h))
}

fn vertex_count(edges: &[Edge], mask: u64) -> usize {
    let mut vs = BTreeSet::new();
    let mut m = mask;
    while m != 0 {
        let i = m.trailing_zeros() as usize;
        vs.insert(edges[i].0);
        vs.insert(edges[i].1);
        m &= m - 1;
    }
    vs.len()
}

fn graph_of(n: usize, edges: &[Edge], mask: u64) -> LabeledGraph {
    let sel = (0..edges.len()).filter(|i| mask >> i & 1 == 1).map(|i| edges[i]);
    LabeledGraph::from_edges(n, sel).expect("edges come from a valid graph")
}

/// Log potentials of all edge subsets, indexed by mask.
fn subset_values(edges: &[Edge], form: &Potential) -> Vec<(f64, usize)> {
    (0..1u64 << edges.len())
        .map(|m| {
            let v = vertex_count(edges, m);
            (form.log_value(v, m.count_ones() as usize), v)
        })
        .collect()
}

fn exhaustive_bad(g: &LabeledGraph, form: &Potential, max_vertices: usize) -> Result<Option<LabeledGraph>> {
    let edges: Vec<Edge> = g.edges().iter().copied().collect();
    if edges.len() > EXHAUSTIVE_EDGE_LIMIT {
        return Err(Error::BudgetExceeded(format!(
            "bad-subgraph search over {} edges exceeds the exhaustive limit of {EXHAUSTIVE_EDGE_LIMIT}",
            edges.len()
        )));
    }
    let vals = subset_values(&edges, form);
    let hit = (1..vals.len()).find(|&m| vals[m].1 <= max_vertices && vals[m].0 < form.log_threshold);
    Ok(hit.map(|m| graph_of(g.n(), &edges, m as u64)))
}

/// Connected vertex sets of size at most `max_size` (each listed once).
fn connected_sets(g: &LabeledGraph, max_size: usize, budget: usize) -> Result<Vec<Vec<usize>>> {
    let adj = g.adjacency();
    let mut out = Vec::new();
    for &v in g.support().iter() {
        // Extension-set enumeration rooted at the smallest vertex of each set.
        let mut stack: Vec<(Vec<usize>, Vec<usize>)> =
            vec![(vec![v], adj[&v].iter().copied().filter(|&w| w > v).collect())];
        while let Some((set, ext)) = stack.pop() {
            out.push(set.clone());
            if out.len() > budget {
                return Err(Error::BudgetExceeded(format!(
                    "more than {budget} connected vertex sets"
                )));
            }
            if set.len() == max_size {
                continue;
            }
            let mut ext = ext;
            while let Some(w) = ext.pop() {
                let mut next_ext = ext.clone();
                for &x in &adj[&w] {
                    if x > v
                        && !set.contains(&x)
                        && !next_ext.contains(&x)
                        && !set.iter().any(|&y| adj[&y].contains(&x))
                        && x != w
                    {
                        next_ext.push(x);
                    }
                }
                let mut next = set.clone();
                next.push(w);
                stack.push((next, next_ext));
            }
        }
    }
    Ok(out)
}

fn induced(g: &LabeledGraph, vs: &[usize]) -> LabeledGraph {
    let set: BTreeSet<usize> = vs.iter().copied().collect();
    let edges = g
        .edges()
        .iter()
        .filter(|(u, v)| set.contains(u) && set.contains(v))
        .copied();
    LabeledGraph::from_edges(g.n(), edges).expect("valid")
}

/// A dense-regime search: with `c_V ≥ 1 > c_E` the best graph on a vertex set is
/// the induced one, and graphs combine additively over vertex-disjoint pieces.
fn dense_bad(g: &LabeledGraph, form: &Potential, max_vertices: usize) -> Result<Option<LabeledGraph>> {
    let mut pieces: Vec<(f64, BTreeSet<usize>, LabeledGraph)> = Vec::new();
    for vs in connected_sets(g, max_vertices, CANDIDATE_BUDGET)? {
        if vs.len() < 2 {
            continue;
        }
        let h = induced(g, &vs);
        let val = form.log_of(&h);
        if val < form.log_threshold {
            return Ok(Some(h));
        }
        if val < 0.0 {
            pieces.push((val, vs.into_iter().collect(), h));
        }
    }
    pieces.sort_by(|a, b| a.0.total_cmp(&b.0));
    fn dfs(
        pieces: &[(f64, BTreeSet<usize>, LabeledGraph)],
        start: usize,
        used: &BTreeSet<usize>,
        val: f64,
        chosen: &mut Vec<usize>,
        form: &Potential,
        max_vertices: usize,
    ) -> Option<Vec<usize>> {
        if val < form.log_threshold {
            return Some(chosen.clone());
        }
        for i in start..pieces.len() {
            let (pv, vs, _) = &pieces[i];
            if used.len() + vs.len() > max_vertices || !used.is_disjoint(vs) {
                continue;
            }
            let next: BTreeSet<usize> = used.union(vs).copied().collect();
            chosen.push(i);
            if let Some(found) = dfs(pieces, i + 1, &next, val + pv, chosen, form, max_vertices) {
                return Some(found);
            }
            chosen.pop();
        }
        None
    }
    let found = dfs(&pieces, 0, &BTreeSet::new(), 0.0, &mut Vec::new(), form, max_vertices);
    Ok(found.map(|idx| {
        idx.iter().fold(LabeledGraph::empty(g.n()), |acc, &i| {
            acc.union(&pieces[i].2).expect("same n")
        })
    }))
}

/// Some nonempty edge-induced subgraph of `g` on at most `max_vertices`
/// vertices whose potential is below the threshold, if one exists.
pub fn find_bad_subgraph(g: &LabeledGraph, form: &Potential, max_vertices: usize) -> Result<Option<LabeledGraph>> {
    if g.num_edges() == 0 || form.nothing_bad() || max_vertices < 2 {
        return Ok(None);
    }
    if form.log_vertex >= 0.0 && form.log_edge >= 0.0 {
        let &(u, v) = g.edges().iter().next().unwrap();
        return Ok(Some(LabeledGraph::from_edges(g.n(), [(u, v)])?));
    }
    if form.log_vertex >= 0.0 && form.log_edge < 0.0 {
        return dense_bad(g, form, max_vertices);
    }
    exhaustive_bad(g, form, max_vertices)
}

/// No subgraph of `h` is bad under Φ.
pub fn is_admissible_er(h: &LabeledGraph, params: &ModelParams) -> Result<bool> {
    let form = Potential::er(params)?;
    Ok(find_bad_subgraph(h, &form, usize::MAX)?.is_none())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BadClass {
    Good,
    Bad,
    SelfBad,
}

/// Self-bad: bad, and strictly below every proper (edge-induced) subgraph.
pub fn classify_self_bad(h: &LabeledGraph, params: &ModelParams) -> Result<BadClass> {
    let form = Potential::sbm(params)?;
    let h = h.edge_induced();
    if h.num_edges() > SELF_BAD_EDGE_LIMIT {
        return Err(Error::BudgetExceeded(format!(
            "self-bad check over {} edges exceeds {SELF_BAD_EDGE_LIMIT}",
            h.num_edges()
        )));
    }
    if !form.is_bad(&h) {
        return Ok(BadClass::Good);
    }
    let edges: Vec<Edge> = h.edges().iter().copied().collect();
    let vals = subset_values(&edges, &form);
    let full = vals.len() - 1;
    let own = vals[full].0;
    let minimal = (0..full).all(|m| vals[m].0 > own);
    Ok(if minimal { BadClass::SelfBad } else { BadClass::Bad })
}

/// All self-bad edge-induced subgraphs of `g` with at most `max_vertices` vertices.
pub fn self_bad_subgraphs(g: &LabeledGraph, form: &Potential, max_vertices: usize) -> Result<Vec<LabeledGraph>> {
    if g.num_edges() == 0 || form.nothing_bad() {
        return Ok(Vec::new());
    }
    let edges: Vec<Edge> = g.edges().iter().copied().collect();
    let e = edges.len();
    if e > EXHAUSTIVE_EDGE_LIMIT {
        return Err(Error::BudgetExceeded(format!(
            "self-bad enumeration over {e} edges exceeds the exhaustive limit of {EXHAUSTIVE_EDGE_LIMIT}"
        )));
    }
    let vals = subset_values(&edges, form);
    // best[m] = minimum log potential over all subsets of m (sum-over-subsets minimum).
    let mut best: Vec<f64> = vals.iter().map(|v| v.0).collect();
    for i in 0..e {
        for m in 0..best.len() {
            if m >> i & 1 == 1 {
                let sub = best[m ^ (1 << i)];
                if sub < best[m] {
                    best[m] = sub;
                }
            }
        }
    }
    let mut out = Vec::new();
    for m in 1..vals.len() {
        let (val, nv) = vals[m];
        if nv > max_vertices || val >= form.log_threshold {
            continue;
        }
        let proper_min = (0..e)
            .filter(|i| m >> i & 1 == 1)
            .map(|i| best[m ^ (1 << i)])
            .fold(f64::INFINITY, f64::min);
        if val < proper_min {
            out.push(graph_of(g.n(), &edges, m as u64));
        }
    }
    Ok(out)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EventModel {
    Er,
    Sbm,
}

/// The conditioning event: no bad subgraph on at most `D²` vertices (ER), or no
/// bad subgraph on at most `D³` vertices and no cycle of length at most `N` (SBM).
pub fn event_e_indicator(g: &LabeledGraph, params: &ModelParams, model: EventModel) -> Result<bool> {
    let d = params.degree()?;
    match model {
        EventModel::Er => {
            let form = Potential::er(params)?;
            Ok(find_bad_subgraph(g, &form, d * d)?.is_none())
        }
        EventModel::Sbm => {
            let big_n = params.cycle_len()?;
            if !g.cycles_up_to(big_n).is_empty() {
                return Ok(false);
            }
            let form = Potential::sbm(params)?;
            Ok(find_bad_subgraph(g, &form, d * d * d)?.is_none())
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EventRate {
    pub rate: f64,
    pub trials: usize,
    pub std_error: f64,
}

/// Monte Carlo estimate of the probability of the conditioning event for the
/// parent graph of the model.
pub fn event_e_rate(params: &ModelParams, model: EventModel, trials: usize, seed: u64) -> Result<EventRate> {
    if trials == 0 {
        return Err(Error::Invalid("trials must be positive".into()));
    }
    let hits: Result<Vec<bool>> = (0..trials as u64)
        .into_par_iter()
        .map(|t| {
            let mut rng = trial_rng(seed, t);
            let g = match model {
                EventModel::Er => {
                    let p = params.p().or_else(|_| params.q())?.value();
                    sample_er(params.n, p, &mut rng)?
                }
                EventModel::Sbm => sample_sbm(params, &mut rng)?.1,
            };
            event_e_indicator(&g, params, model)
        })
        .collect();
    let hits = hits?.into_iter().filter(|&b| b).count();
    let rate = hits as f64 / trials as f64;
    Ok(EventRate {
        rate,
        trials,
        std_error: (rate * (1.0 - rate) / trials as f64).sqrt(),
    })
}
