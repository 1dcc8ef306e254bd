//! Expectations over uniform labelings `σ ~ Unif([k]^V)` of products of
//! edge weights of the form `a + b·ω(σ_u, σ_v)`.
//!
//! The closed form contracts every thread of degree-2 vertices: since
//! `E_σ[ω(x,σ)ω(σ,y)] = ω(x,y)` and `E_σ[ω(x,σ)] = 0`, a thread with weights
//! `(aᵢ, bᵢ)` collapses to `∏aᵢ + ∏bᵢ·ω(x,y)`, and a cycle to `∏aᵢ + (k−1)∏bᵢ`.
//! Only labels of branch vertices are then enumerated.

use std::collections::{BTreeMap, BTreeSet};

use crate::error::{Error, Result};
use crate::exact::Scalar;
use crate::graph::{Edge, LabeledGraph};

pub const LABEL_ENUMERATION_LIMIT: u64 = 1 << 22;

pub fn omega_value<S: Scalar>(k: usize, x: usize, y: usize) -> S {
    if x == y {
        S::from_i64(k as i64 - 1)
    } else {
        S::from_i64(-1)
    }
}

fn labelings(count: usize, k: usize) -> Result<u64> {
    match (k as u64).checked_pow(count as u32) {
        Some(v) if v <= LABEL_ENUMERATION_LIMIT => Ok(v),
        _ => Err(Error::BudgetExceeded(format!("{k}^{count} labelings"))),
    }
}

/// Calls `f` with every labeling of `vs` (as a map) in base-`k` counting order.
fn for_each_labeling(vs: &[usize], k: usize, mut f: impl FnMut(&BTreeMap<usize, usize>)) -> Result<()> {
    let total = labelings(vs.len(), k)?;
    let mut lab: BTreeMap<usize, usize> = vs.iter().map(|&v| (v, 0)).collect();
    for code in 0..total {
        let mut c = code;
        for &v in vs {
            lab.insert(v, (c % k as u64) as usize);
            c /= k as u64;
        }
        f(&lab);
    }
    Ok(())
}

/// Direct enumeration over all `k^{|V(g)|}` labelings.
pub fn label_expectation_exhaustive<S: Scalar>(
    g: &LabeledGraph,
    weight: &dyn Fn(Edge) -> (S, S),
    k: usize,
) -> Result<S> {
    let vs: Vec<usize> = g.support().into_iter().collect();
    let total = labelings(vs.len(), k)?;
    let ws: Vec<(Edge, S, S)> = g
        .edges()
        .iter()
        .map(|&e| {
            let (a, b) = weight(e);
            (e, a, b)
        })
        .collect();
    let mut sum = S::zero();
    for_each_labeling(&vs, k, |lab| {
        let mut prod = S::one();
        for ((u, v), a, b) in &ws {
            prod = prod * (a.clone() + b.clone() * omega_value::<S>(k, lab[u], lab[v]));
        }
        sum = sum.clone() + prod;
    })?;
    Ok(sum / S::from_i64(total as i64))
}

struct Thread<S> {
    ends: (usize, usize),
    a: S,
    b: S,
}

/// Closed-form evaluation through thread contraction.
pub fn label_expectation<S: Scalar>(g: &LabeledGraph, weight: &dyn Fn(Edge) -> (S, S), k: usize) -> Result<S> {
    let mut out = S::one();
    for comp in g.components() {
        out = out * component_expectation(&comp, weight, k)?;
        if out.near_zero(0.0) {
            return Ok(out);
        }
    }
    Ok(out)
}

fn component_expectation<S: Scalar>(c: &LabeledGraph, weight: &dyn Fn(Edge) -> (S, S), k: usize) -> Result<S> {
    if c.is_cycle() {
        let (mut pa, mut pb) = (S::one(), S::one());
        for &e in c.edges() {
            let (a, b) = weight(e);
            pa = pa * a;
            pb = pb * b;
        }
        return Ok(pa + S::from_i64(k as i64 - 1) * pb);
    }
    let adj = c.adjacency();
    let branch: BTreeSet<usize> = adj.iter().filter(|(_, n)| n.len() != 2).map(|(v, _)| *v).collect();
    let mut used: BTreeSet<Edge> = BTreeSet::new();
    let mut threads = Vec::new();
    for &u in &branch {
        for &first in &adj[&u] {
            let e0 = crate::graph::norm(u, first);
            if used.contains(&e0) {
                continue;
            }
            used.insert(e0);
            let (mut a, mut b) = weight(e0);
            let (mut prev, mut cur) = (u, first);
            while !branch.contains(&cur) {
                let next = adj[&cur].iter().copied().find(|&x| x != prev).expect("degree two");
                let e = crate::graph::norm(cur, next);
                used.insert(e);
                let (wa, wb) = weight(e);
                a = a * wa;
                b = b * wb;
                prev = cur;
                cur = next;
            }
            threads.push(Thread { ends: (u, cur), a, b });
        }
    }
    let vs: Vec<usize> = branch.into_iter().collect();
    let total = labelings(vs.len(), k)?;
    let mut sum = S::zero();
    for_each_labeling(&vs, k, |lab| {
        let mut prod = S::one();
        for t in &threads {
            prod = prod * (t.a.clone() + t.b.clone() * omega_value::<S>(k, lab[&t.ends.0], lab[&t.ends.1]));
        }
        sum = sum.clone() + prod;
    })?;
    Ok(sum / S::from_i64(total as i64))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn check(g: &LabeledGraph, k: usize) {
        let w = |(u, v): Edge| (0.3 + 0.1 * u as f64, 0.2 - 0.05 * v as f64);
        let a = label_expectation::<f64>(g, &w, k).unwrap();
        let b = label_expectation_exhaustive::<f64>(g, &w, k).unwrap();
        assert!((a - b).abs() < 1e-12, "{a} vs {b}");
    }

    #[test]
    fn closed_form_matches_enumeration() {
        let graphs = [
            LabeledGraph::cycle(6, &[0, 1, 2]).unwrap(),
            LabeledGraph::path(6, &[0, 1, 2, 3]).unwrap(),
            LabeledGraph::from_edges(6, [(0, 1), (1, 2), (0, 2), (2, 3), (3, 4), (4, 2)]).unwrap(),
            LabeledGraph::from_edges(6, [(0, 1), (1, 2), (2, 3), (3, 0), (0, 2), (4, 5)]).unwrap(),
            LabeledGraph::from_edges(5, [(0, 1), (0, 2), (0, 3), (0, 4)]).unwrap(),
        ];
        for g in &graphs {
            for k in 2..=3 {
                check(g, k);
            }
        }
    }

    #[test]
    fn omega_cycle_is_k_minus_one() {
        let c3 = LabeledGraph::cycle(3, &[0, 1, 2]).unwrap();
        let w = |_: Edge| (0i64 as f64, 1.0);
        for k in 2..5 {
            assert!((label_expectation::<f64>(&c3, &w, k).unwrap() - (k as f64 - 1.0)).abs() < 1e-12);
        }
    }
}
