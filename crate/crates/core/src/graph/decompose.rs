//! Splitting `E(S) \ E(H)` into vertex-disjoint cycles and attached paths.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

use super::{norm, Edge, LabeledGraph};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum DecompositionVariant {
    /// Cycles avoid `V(H)`; each path has its ends in `V(H)`, the cycles, earlier
    /// paths or the leaves of `S`, and its interior avoids all of those.
    Sequential,
    /// Cycles are independent cycles of `S`; paths meet everything else only at
    /// their ends.
    Independent,
}

/// Cycles and paths as vertex sequences. A cycle lists each vertex once; a path
/// lists its ends first and last (they coincide for a closed path).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Decomposition {
    pub cycles: Vec<Vec<usize>>,
    pub paths: Vec<Vec<usize>>,
}

impl Decomposition {
    pub fn num_cycles(&self) -> usize {
        self.cycles.len()
    }

    pub fn num_paths(&self) -> usize {
        self.paths.len()
    }

    pub fn edges(&self) -> BTreeSet<Edge> {
        let mut out = BTreeSet::new();
        for c in &self.cycles {
            for i in 0..c.len() {
                out.insert(norm(c[i], c[(i + 1) % c.len()]));
            }
        }
        for p in &self.paths {
            for w in p.windows(2) {
                out.insert(norm(w[0], w[1]));
            }
        }
        out
    }
}

fn check_pair(s: &LabeledGraph, h: &LabeledGraph) -> Result<()> {
    if s.n() != h.n() {
        return Err(Error::AmbientMismatch(s.n(), h.n()));
    }
    if !h.is_subgraph_of(s) {
        return Err(Error::NotSubgraph("H is not contained in S".into()));
    }
    if !s.isolated().is_subset(h.vertices()) {
        return Err(Error::Invalid("S has isolated vertices outside H".into()));
    }
    Ok(())
}

struct Remaining {
    adj: BTreeMap<usize, BTreeSet<usize>>,
}

impl Remaining {
    fn new(edges: impl Iterator<Item = Edge>) -> Self {
        let mut adj: BTreeMap<usize, BTreeSet<usize>> = BTreeMap::new();
        for (u, v) in edges {
            adj.entry(u).or_default().insert(v);
            adj.entry(v).or_default().insert(u);
        }
        Remaining { adj }
    }

    fn nbrs(&self, v: usize) -> Vec<usize> {
        self.adj
            .get(&v)
            .map(|s| s.iter().copied().collect())
            .unwrap_or_default()
    }

    fn has_any(&self, v: usize) -> bool {
        self.adj.get(&v).is_some_and(|s| !s.is_empty())
    }

    fn remove(&mut self, u: usize, v: usize) {
        self.adj.get_mut(&u).map(|s| s.remove(&v));
        self.adj.get_mut(&v).map(|s| s.remove(&u));
    }

    fn insert(&mut self, u: usize, v: usize) {
        self.adj.entry(u).or_default().insert(v);
        self.adj.entry(v).or_default().insert(u);
    }

    fn first_vertex(&self) -> Option<usize> {
        self.adj.iter().find(|(_, s)| !s.is_empty()).map(|(v, _)| *v)
    }
}

pub fn decompose_difference(
    s: &LabeledGraph,
    h: &LabeledGraph,
    variant: DecompositionVariant,
) -> Result<Decomposition> {
    check_pair(s, h)?;
    match variant {
        DecompositionVariant::Sequential => Ok(sequential(s, h)),
        DecompositionVariant::Independent => Ok(independent(s, h)),
    }
}

fn sequential(s: &LabeledGraph, h: &LabeledGraph) -> Decomposition {
    let mut rem = Remaining::new(s.edges().difference(h.edges()).copied());
    let mut anchor: BTreeSet<usize> = h.vertices().union(&s.leaves()).copied().collect();
    let mut out = Decomposition {
        cycles: Vec::new(),
        paths: Vec::new(),
    };
    while let Some(first) = rem.first_vertex() {
        let start = anchor.iter().copied().find(|&v| rem.has_any(v));
        match start {
            Some(u) => {
                let mut walk = vec![u];
                let mut cur = u;
                loop {
                    let nbrs = rem.nbrs(cur);
                    if let Some(&w) = nbrs.iter().find(|w| anchor.contains(w)) {
                        rem.remove(cur, w);
                        walk.push(w);
                        break;
                    }
                    if let Some(&w) = nbrs.iter().find(|w| !walk.contains(w)) {
                        rem.remove(cur, w);
                        walk.push(w);
                        cur = w;
                        continue;
                    }
                    // Every remaining neighbour is an interior vertex of this walk.
                    let w = nbrs[0];
                    rem.remove(cur, w);
                    let idx = walk.iter().position(|&x| x == w).unwrap();
                    let cycle = walk[idx..].to_vec();
                    walk.truncate(idx + 1);
                    anchor.extend(cycle.iter().copied());
                    out.cycles.push(cycle);
                    break;
                }
                anchor.extend(walk.iter().copied());
                out.paths.push(walk);
            }
            None => {
                let mut walk = vec![first];
                let mut cur = first;
                loop {
                    let nbrs = rem.nbrs(cur);
                    if let Some(&w) = nbrs.iter().find(|w| !walk.contains(w)) {
                        rem.remove(cur, w);
                        walk.push(w);
                        cur = w;
                        continue;
                    }
                    let w = nbrs[0];
                    rem.remove(cur, w);
                    let idx = walk.iter().position(|&x| x == w).unwrap();
                    for p in walk[..=idx].windows(2) {
                        rem.insert(p[0], p[1]);
                    }
                    let cycle = walk[idx..].to_vec();
                    anchor.extend(cycle.iter().copied());
                    out.cycles.push(cycle);
                    break;
                }
            }
        }
    }
    out
}

fn independent(s: &LabeledGraph, h: &LabeledGraph) -> Decomposition {
    let deg = s.degrees();
    let mut branch: BTreeSet<usize> = h.vertices().union(&s.leaves()).copied().collect();
    branch.extend(deg.iter().filter(|(_, &d)| d != 2 && d != 0).map(|(v, _)| *v));
    let mut rem = Remaining::new(s.edges().difference(h.edges()).copied());
    let mut out = Decomposition {
        cycles: Vec::new(),
        paths: Vec::new(),
    };
    for &u in &branch {
        while let Some(&first) = rem.nbrs(u).first() {
            let mut walk = vec![u, first];
            rem.remove(u, first);
            let mut cur = first;
            while !branch.contains(&cur) {
                let next = rem.nbrs(cur)[0];
                rem.remove(cur, next);
                walk.push(next);
                cur = next;
            }
            out.paths.push(walk);
        }
    }
    while let Some(first) = rem.first_vertex() {
        let mut cycle = vec![first];
        let mut cur = first;
        loop {
            let next = rem.nbrs(cur)[0];
            rem.remove(cur, next);
            if next == first {
                break;
            }
            cycle.push(next);
            cur = next;
        }
        out.cycles.push(cycle);
    }
    out
}

/// Counts, by length, the independent cycles of `S` (components of `S` that
/// are cycles) that avoid `V(H)`.
pub fn independent_cycle_census(s: &LabeledGraph, h: &LabeledGraph) -> Result<BTreeMap<usize, usize>> {
    if s.n() != h.n() {
        return Err(Error::AmbientMismatch(s.n(), h.n()));
    }
    let mut out = BTreeMap::new();
    for c in s.components() {
        if c.is_cycle() && c.vertices().is_disjoint(h.vertices()) {
            *out.entry(c.num_edges()).or_insert(0) += 1;
        }
    }
    Ok(out)
}
