use crate::error::{Error, Result};

use super::{Edge, LabeledGraph};

/// Indexes the edges of `K_n` (n ≤ 11) so that edge sets fit in a `u64`.
#[derive(Clone, Debug)]
pub struct EdgeSpace {
    n: usize,
    pairs: Vec<Edge>,
    index: Vec<Vec<usize>>,
    incident: Vec<u64>,
}

impl EdgeSpace {
    pub fn new(n: usize) -> Result<Self> {
        if n > 11 {
            return Err(Error::TooLarge(format!("edge masks need n <= 11, got {n}")));
        }
        let mut pairs = Vec::new();
        let mut index = vec![vec![usize::MAX; n]; n];
        let mut incident = vec![0u64; n];
        for u in 0..n {
            for v in u + 1..n {
                let i = pairs.len();
                index[u][v] = i;
                index[v][u] = i;
                incident[u] |= 1 << i;
                incident[v] |= 1 << i;
                pairs.push((u, v));
            }
        }
        Ok(EdgeSpace {
            n,
            pairs,
            index,
            incident,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn num_edges(&self) -> usize {
        self.pairs.len()
    }

    pub fn pairs(&self) -> &[Edge] {
        &self.pairs
    }

    pub fn pair(&self, i: usize) -> Edge {
        self.pairs[i]
    }

    pub fn index(&self, u: usize, v: usize) -> usize {
        self.index[u][v]
    }

    pub fn full_mask(&self) -> u64 {
        if self.pairs.len() == 64 {
            u64::MAX
        } else {
            (1u64 << self.pairs.len()) - 1
        }
    }

    /// Edges incident to `v`.
    pub fn incident(&self, v: usize) -> u64 {
        self.incident[v]
    }

    pub fn mask(&self, g: &LabeledGraph) -> Result<u64> {
        if g.n() != self.n {
            return Err(Error::AmbientMismatch(g.n(), self.n));
        }
        Ok(g.edges().iter().fold(0u64, |m, &(u, v)| m | 1 << self.index[u][v]))
    }

    /// Bitmask of endpoints of the edges in `mask`.
    pub fn vertex_mask(&self, mask: u64) -> u32 {
        let mut vm = 0u32;
        let mut m = mask;
        while m != 0 {
            let i = m.trailing_zeros() as usize;
            let (u, v) = self.pairs[i];
            vm |= 1 << u | 1 << v;
            m &= m - 1;
        }
        vm
    }

    pub fn graph(&self, mask: u64) -> LabeledGraph {
        let edges = self.edges_of(mask);
        LabeledGraph::from_edges(self.n, edges).expect("edge space pairs are valid")
    }

    pub fn edges_of(&self, mask: u64) -> Vec<Edge> {
        let mut out = Vec::new();
        let mut m = mask;
        while m != 0 {
            let i = m.trailing_zeros() as usize;
            out.push(self.pairs[i]);
            m &= m - 1;
        }
        out
    }

    pub fn degree(&self, mask: u64, v: usize) -> u32 {
        (mask & self.incident[v]).count_ones()
    }

    /// Whether no vertex has degree exactly one.
    pub fn is_leafless(&self, mask: u64) -> bool {
        (0..self.n).all(|v| self.degree(mask, v) != 1)
    }

    /// Relabels an edge mask by a vertex permutation.
    pub fn permute(&self, mask: u64, perm: &[usize]) -> u64 {
        let mut out = 0u64;
        let mut m = mask;
        while m != 0 {
            let i = m.trailing_zeros() as usize;
            let (u, v) = self.pairs[i];
            out |= 1 << self.index[perm[u]][perm[v]];
            m &= m - 1;
        }
        out
    }

    /// All masks with at most `max_edges` edges, in increasing numeric order.
    pub fn masks_up_to(&self, max_edges: usize) -> Vec<u64> {
        let mut out = Vec::new();
        let e = self.pairs.len();
        let mut stack: Vec<(u64, usize)> = vec![(0, 0)];
        while let Some((m, start)) = stack.pop() {
            out.push(m);
            if (m.count_ones() as usize) < max_edges {
                for i in start..e {
                    stack.push((m | 1 << i, i + 1));
                }
            }
        }
        out.sort_unstable();
        out
    }
}

/// Iterates over all submasks of `mask`, including `0` and `mask` itself.
pub fn submasks(mask: u64) -> impl Iterator<Item = u64> {
    let mut cur = Some(mask);
    std::iter::from_fn(move || {
        let s = cur?;
        cur = if s == 0 { None } else { Some((s - 1) & mask) };
        Some(s)
    })
}
