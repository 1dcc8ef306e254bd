//! Labeled graphs with an explicit vertex set, so that isolated vertices are
//! representable, plus the edge-induced set operations used throughout.

mod canon;
mod decompose;
mod io;
mod mask;
mod trees;

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use canon::{automorphism_count, canonicalize, count_embeddings, count_isomorphisms, CanonicalForm};
pub use decompose::{decompose_difference, independent_cycle_census, Decomposition, DecompositionVariant};
pub use io::{parse_edge_list, write_edge_list};
pub use mask::{submasks, EdgeSpace};
pub use trees::{otter_constant_estimate, rooted_tree_counts, OtterEstimate};

pub type Edge = (usize, usize);

pub(crate) fn norm(u: usize, v: usize) -> Edge {
    if u < v {
        (u, v)
    } else {
        (v, u)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct LabeledGraph {
    n: usize,
    vertices: BTreeSet<usize>,
    edges: BTreeSet<Edge>,
}

impl LabeledGraph {
    /// Graph on ambient `[n]` with no vertices and no edges.
    pub fn empty(n: usize) -> Self {
        LabeledGraph {
            n,
            vertices: BTreeSet::new(),
            edges: BTreeSet::new(),
        }
    }

    /// Edgeless graph whose vertex set is all of `[n]`.
    pub fn edgeless(n: usize) -> Self {
        LabeledGraph {
            n,
            vertices: (0..n).collect(),
            edges: BTreeSet::new(),
        }
    }

    /// Edge-induced graph: the vertex set is the set of edge endpoints.
    pub fn from_edges(n: usize, edges: impl IntoIterator<Item = Edge>) -> Result<Self> {
        let mut g = LabeledGraph::empty(n);
        for (u, v) in edges {
            g.add_edge(u, v)?;
        }
        Ok(g)
    }

    pub fn with_vertices(
        n: usize,
        vertices: impl IntoIterator<Item = usize>,
        edges: impl IntoIterator<Item = Edge>,
    ) -> Result<Self> {
        let mut g = LabeledGraph::empty(n);
        for v in vertices {
            g.add_vertex(v)?;
        }
        let declared = g.vertices.clone();
        for (u, v) in edges {
            if !declared.contains(&u) || !declared.contains(&v) {
                return Err(Error::Invalid(format!("edge ({u},{v}) leaves the declared vertex set")));
            }
            g.add_edge(u, v)?;
        }
        Ok(g)
    }

    /// Graph on all of `[n]` with the given edges.
    pub fn spanning(n: usize, edges: impl IntoIterator<Item = Edge>) -> Result<Self> {
        let mut g = LabeledGraph::edgeless(n);
        for (u, v) in edges {
            g.add_edge(u, v)?;
        }
        Ok(g)
    }

    pub fn complete(n: usize) -> Self {
        let mut g = LabeledGraph::edgeless(n);
        for u in 0..n {
            for v in u + 1..n {
                g.edges.insert((u, v));
            }
        }
        g
    }

    pub fn cycle(n: usize, vs: &[usize]) -> Result<Self> {
        let l = vs.len();
        LabeledGraph::from_edges(n, (0..l).map(|i| (vs[i], vs[(i + 1) % l])))
    }

    pub fn path(n: usize, vs: &[usize]) -> Result<Self> {
        LabeledGraph::from_edges(n, vs.windows(2).map(|w| (w[0], w[1])))
    }

    pub fn add_vertex(&mut self, v: usize) -> Result<()> {
        if v >= self.n {
            return Err(Error::VertexOutOfRange { vertex: v, n: self.n });
        }
        self.vertices.insert(v);
        Ok(())
    }

    pub fn add_edge(&mut self, u: usize, v: usize) -> Result<()> {
        if u == v {
            return Err(Error::SelfLoop(u));
        }
        for w in [u, v] {
            if w >= self.n {
                return Err(Error::VertexOutOfRange { vertex: w, n: self.n });
            }
        }
        self.vertices.insert(u);
        self.vertices.insert(v);
        self.edges.insert(norm(u, v));
        Ok(())
    }

    /// Removes an edge, keeping its endpoints as declared vertices.
    pub fn remove_edge(&mut self, u: usize, v: usize) -> bool {
        self.edges.remove(&norm(u, v))
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn vertices(&self) -> &BTreeSet<usize> {
        &self.vertices
    }

    pub fn edges(&self) -> &BTreeSet<Edge> {
        &self.edges
    }

    pub fn num_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.edges.contains(&norm(u, v))
    }

    pub fn has_vertex(&self, v: usize) -> bool {
        self.vertices.contains(&v)
    }

    /// `|E| - |V|`, counting declared isolated vertices.
    pub fn excess(&self) -> i64 {
        self.edges.len() as i64 - self.vertices.len() as i64
    }

    pub fn degrees(&self) -> BTreeMap<usize, usize> {
        let mut d: BTreeMap<usize, usize> = self.vertices.iter().map(|&v| (v, 0)).collect();
        for &(u, v) in &self.edges {
            *d.entry(u).or_default() += 1;
            *d.entry(v).or_default() += 1;
        }
        d
    }

    pub fn degree(&self, v: usize) -> usize {
        self.edges.iter().filter(|&&(a, b)| a == v || b == v).count()
    }

    pub fn adjacency(&self) -> BTreeMap<usize, Vec<usize>> {
        let mut adj: BTreeMap<usize, Vec<usize>> = self.vertices.iter().map(|&v| (v, Vec::new())).collect();
        for &(u, v) in &self.edges {
            adj.entry(u).or_default().push(v);
            adj.entry(v).or_default().push(u);
        }
        adj
    }

    /// Vertices of degree one.
    pub fn leaves(&self) -> BTreeSet<usize> {
        self.degrees()
            .into_iter()
            .filter(|&(_, d)| d == 1)
            .map(|(v, _)| v)
            .collect()
    }

    pub fn isolated(&self) -> BTreeSet<usize> {
        self.degrees()
            .into_iter()
            .filter(|&(_, d)| d == 0)
            .map(|(v, _)| v)
            .collect()
    }

    /// Leaflessness is judged on the edge support, so isolated vertices are allowed.
    pub fn is_leafless(&self) -> bool {
        self.leaves().is_empty()
    }

    pub fn support(&self) -> BTreeSet<usize> {
        self.edges.iter().flat_map(|&(u, v)| [u, v]).collect()
    }

    /// Drops isolated vertices.
    pub fn edge_induced(&self) -> LabeledGraph {
        LabeledGraph {
            n: self.n,
            vertices: self.support(),
            edges: self.edges.clone(),
        }
    }

    pub fn is_edge_induced(&self) -> bool {
        self.isolated().is_empty()
    }

    pub fn is_subgraph_of(&self, other: &LabeledGraph) -> bool {
        self.n == other.n && self.vertices.is_subset(&other.vertices) && self.edges.is_subset(&other.edges)
    }

    /// `H ⋉ S`: `H ⊂ S` and every isolated vertex of `S` is an isolated vertex of `H`.
    pub fn is_core_subgraph_of(&self, other: &LabeledGraph) -> bool {
        self.is_subgraph_of(other) && other.isolated().is_subset(&self.isolated())
    }

    fn check_same_n(&self, other: &LabeledGraph) -> Result<()> {
        if self.n != other.n {
            return Err(Error::AmbientMismatch(self.n, other.n));
        }
        Ok(())
    }

    /// Union of vertex and edge sets.
    pub fn union(&self, other: &LabeledGraph) -> Result<LabeledGraph> {
        self.check_same_n(other)?;
        Ok(LabeledGraph {
            n: self.n,
            vertices: self.vertices.union(&other.vertices).copied().collect(),
            edges: self.edges.union(&other.edges).copied().collect(),
        })
    }

    fn induced_by_edges(&self, edges: BTreeSet<Edge>) -> LabeledGraph {
        let vertices = edges.iter().flat_map(|&(u, v)| [u, v]).collect();
        LabeledGraph {
            n: self.n,
            vertices,
            edges,
        }
    }

    /// `S ⋒ T`: graph induced by the common edges.
    pub fn cap(&self, other: &LabeledGraph) -> Result<LabeledGraph> {
        self.check_same_n(other)?;
        Ok(self.induced_by_edges(self.edges.intersection(&other.edges).copied().collect()))
    }

    /// `S ⋓ T`: graph induced by the union of edges.
    pub fn cup(&self, other: &LabeledGraph) -> Result<LabeledGraph> {
        self.check_same_n(other)?;
        Ok(self.induced_by_edges(self.edges.union(&other.edges).copied().collect()))
    }

    /// `S ⧉ T`: graph induced by the symmetric difference of edges.
    pub fn symdiff(&self, other: &LabeledGraph) -> Result<LabeledGraph> {
        self.check_same_n(other)?;
        Ok(self.induced_by_edges(self.edges.symmetric_difference(&other.edges).copied().collect()))
    }

    /// Edges of `self` not in `other`, with the vertex set those edges induce.
    pub fn edge_difference(&self, other: &LabeledGraph) -> Result<LabeledGraph> {
        self.check_same_n(other)?;
        Ok(self.induced_by_edges(self.edges.difference(&other.edges).copied().collect()))
    }

    /// Image under the vertex map `v -> perm[v]`.
    pub fn relabel(&self, perm: &[usize]) -> LabeledGraph {
        LabeledGraph {
            n: self.n,
            vertices: self.vertices.iter().map(|&v| perm[v]).collect(),
            edges: self.edges.iter().map(|&(u, v)| norm(perm[u], perm[v])).collect(),
        }
    }

    /// Connected components of the edge support, each as an edge-induced graph,
    /// ordered by smallest vertex.
    pub fn components(&self) -> Vec<LabeledGraph> {
        let adj = self.adjacency();
        let mut seen = BTreeSet::new();
        let mut out = Vec::new();
        for &start in self.support().iter() {
            if seen.contains(&start) {
                continue;
            }
            let mut stack = vec![start];
            let mut comp = BTreeSet::new();
            seen.insert(start);
            while let Some(v) = stack.pop() {
                comp.insert(v);
                for &w in &adj[&v] {
                    if seen.insert(w) {
                        stack.push(w);
                    }
                }
            }
            let edges = self.edges.iter().filter(|(u, _)| comp.contains(u)).copied().collect();
            out.push(LabeledGraph {
                n: self.n,
                vertices: comp,
                edges,
            });
        }
        out
    }

    pub fn is_connected(&self) -> bool {
        self.components().len() <= 1 && self.isolated().is_empty()
    }

    /// Whether the edge support is a single cycle.
    pub fn is_cycle(&self) -> bool {
        let e = self.edges.len();
        e >= 3 && self.components().len() == 1 && self.support().len() == e && {
            let d = self.degrees();
            self.support().iter().all(|v| d[v] == 2)
        }
    }

    /// All cycles of length at most `max_len`, each as an edge-induced graph,
    /// sorted by their sorted edge lists.
    pub fn cycles_up_to(&self, max_len: usize) -> Vec<LabeledGraph> {
        let adj = self.adjacency();
        let mut found: BTreeSet<Vec<Edge>> = BTreeSet::new();
        for &start in self.support().iter() {
            let mut path = vec![start];
            cycle_dfs(&adj, start, &mut path, max_len, &mut found);
        }
        found
            .into_iter()
            .map(|edges| self.induced_by_edges(edges.into_iter().collect()))
            .collect()
    }
}

// Cycles are rooted at their smallest vertex and traversed with the second
// vertex smaller than the last to avoid duplicates.
fn cycle_dfs(
    adj: &BTreeMap<usize, Vec<usize>>,
    start: usize,
    path: &mut Vec<usize>,
    max_len: usize,
    found: &mut BTreeSet<Vec<Edge>>,
) {
    let last = *path.last().unwrap();
    for &w in &adj[&last] {
        if w == start && path.len() >= 3 {
            if path[1] < path[path.len() - 1] {
                let mut edges: Vec<Edge> = path.windows(2).map(|p| norm(p[0], p[1])).collect();
                edges.push(norm(last, start));
                edges.sort_unstable();
                found.insert(edges);
            }
            continue;
        }
        if w <= start || path.contains(&w) || path.len() >= max_len {
            continue;
        }
        path.push(w);
        cycle_dfs(adj, start, path, max_len, found);
        path.pop();
    }
}
