//! Canonical forms and automorphism counts by individualization–refinement.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

use super::LabeledGraph;

const MAX_CANON_VERTICES: usize = 16;

/// Isomorphism-class key. Layout: total vertex count, isolated vertex count,
/// non-isolated vertex count, then the upper triangle of the canonically
/// ordered adjacency matrix, packed most significant bit first.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CanonicalForm {
    bytes: Vec<u8>,
}

impl CanonicalForm {
    pub fn to_hex(&self) -> String {
        hex::encode(&self.bytes)
    }

    pub fn from_hex(s: &str) -> Result<Self> {
        let bytes = hex::decode(s).map_err(|e| Error::Parse(format!("canonical form: {e}")))?;
        if bytes.len() < 3 {
            return Err(Error::Parse("canonical form too short".into()));
        }
        let m = bytes[2] as usize;
        let need = 3 + (m * m.saturating_sub(1) / 2).div_ceil(8);
        if bytes.len() != need || bytes[0] as usize != bytes[1] as usize + m {
            return Err(Error::Parse("malformed canonical form".into()));
        }
        Ok(CanonicalForm { bytes })
    }

    pub fn num_vertices(&self) -> usize {
        self.bytes[0] as usize
    }

    pub fn num_isolated(&self) -> usize {
        self.bytes[1] as usize
    }

    pub fn num_edges(&self) -> usize {
        self.bytes[3..].iter().map(|b| b.count_ones() as usize).sum()
    }

    /// Representative on `[num_vertices]`; isolated vertices come last.
    pub fn to_graph(&self) -> LabeledGraph {
        let total = self.num_vertices();
        let m = self.bytes[2] as usize;
        let mut g = LabeledGraph::edgeless(total);
        let mut bit = 0usize;
        for i in 0..m {
            for j in i + 1..m {
                let byte = self.bytes[3 + bit / 8];
                if byte >> (7 - bit % 8) & 1 == 1 {
                    g.add_edge(i, j).expect("valid canonical edge");
                }
                bit += 1;
            }
        }
        g
    }
}

impl fmt::Debug for CanonicalForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "CanonicalForm({})", self.to_hex())
    }
}

impl fmt::Display for CanonicalForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_hex())
    }
}

impl Serialize for CanonicalForm {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_hex())
    }
}

impl<'de> Deserialize<'de> for CanonicalForm {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        CanonicalForm::from_hex(&s).map_err(serde::de::Error::custom)
    }
}

/// Support of `g` relabeled to `0..m` as adjacency bitsets.
fn local_adjacency(g: &LabeledGraph) -> (Vec<usize>, Vec<u32>) {
    let support: Vec<usize> = g.support().into_iter().collect();
    let pos: BTreeMap<usize, usize> = support.iter().enumerate().map(|(i, &v)| (v, i)).collect();
    let mut adj = vec![0u32; support.len()];
    for &(u, v) in g.edges() {
        adj[pos[&u]] |= 1 << pos[&v];
        adj[pos[&v]] |= 1 << pos[&u];
    }
    (support, adj)
}

fn refine(adj: &[u32], colors: &mut Vec<usize>) {
    let m = adj.len();
    let mut ncol = colors.iter().max().map_or(0, |c| c + 1);
    loop {
        let sigs: Vec<(usize, Vec<usize>)> = (0..m)
            .map(|v| {
                let mut nb: Vec<usize> = (0..m).filter(|&w| adj[v] >> w & 1 == 1).map(|w| colors[w]).collect();
                nb.sort_unstable();
                (colors[v], nb)
            })
            .collect();
        let mut uniq = sigs.clone();
        uniq.sort();
        uniq.dedup();
        *colors = sigs.iter().map(|s| uniq.binary_search(s).unwrap()).collect();
        if uniq.len() == ncol {
            return;
        }
        ncol = uniq.len();
    }
}

fn individualize(adj: &[u32], colors: &[usize], v: usize) -> Vec<usize> {
    let keys: Vec<(usize, usize)> = (0..colors.len()).map(|u| (colors[u], usize::from(u != v))).collect();
    let mut uniq = keys.clone();
    uniq.sort_unstable();
    uniq.dedup();
    let mut out = keys.iter().map(|k| uniq.binary_search(k).unwrap()).collect();
    refine(adj, &mut out);
    out
}

/// Smallest non-singleton color class, ties broken by color.
fn target_cell(colors: &[usize]) -> Option<Vec<usize>> {
    let mut cells: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for (v, &c) in colors.iter().enumerate() {
        cells.entry(c).or_default().push(v);
    }
    cells.into_values().filter(|c| c.len() > 1).min_by_key(|c| c.len())
}

fn code_of(adj: &[u32], order: &[usize]) -> u128 {
    let mut code = 0u128;
    for i in 0..order.len() {
        for j in i + 1..order.len() {
            code = code << 1 | u128::from(adj[order[i]] >> order[j] & 1);
        }
    }
    code
}

fn order_of(colors: &[usize]) -> Vec<usize> {
    let mut order = vec![0; colors.len()];
    for (v, &c) in colors.iter().enumerate() {
        order[c] = v;
    }
    order
}

struct CanonSearch<'a> {
    adj: &'a [u32],
    best: Option<(u128, Vec<usize>)>,
    autos: Vec<Vec<usize>>,
}

impl CanonSearch<'_> {
    fn run(&mut self, colors: Vec<usize>, path: &mut Vec<usize>) {
        let Some(cell) = target_cell(&colors) else {
            let order = order_of(&colors);
            let code = code_of(self.adj, &order);
            match &self.best {
                Some((b, border)) if *b == code => {
                    let mut gamma = vec![0; order.len()];
                    for i in 0..order.len() {
                        gamma[order[i]] = border[i];
                    }
                    self.autos.push(gamma);
                }
                Some((b, _)) if *b > code => {}
                _ => self.best = Some((code, order)),
            }
            return;
        };
        let mut explored: Vec<usize> = Vec::new();
        for &w in &cell {
            if !explored.is_empty() && self.same_orbit(path, &explored, w) {
                continue;
            }
            explored.push(w);
            path.push(w);
            let next = individualize(self.adj, &colors, w);
            self.run(next, path);
            path.pop();
        }
    }

    /// Whether `w` is in the orbit of an explored vertex under the found
    /// automorphisms that fix `path` pointwise.
    fn same_orbit(&self, path: &[usize], explored: &[usize], w: usize) -> bool {
        let m = self.adj.len();
        let mut parent: Vec<usize> = (0..m).collect();
        fn find(p: &mut [usize], x: usize) -> usize {
            let mut r = x;
            while p[r] != r {
                r = p[r];
            }
            let mut y = x;
            while p[y] != r {
                let next = p[y];
                p[y] = r;
                y = next;
            }
            r
        }
        for g in &self.autos {
            if path.iter().all(|&v| g[v] == v) {
                for v in 0..m {
                    let a = find(&mut parent, v);
                    let b = find(&mut parent, g[v]);
                    if a != b {
                        parent[a] = b;
                    }
                }
            }
        }
        let rw = find(&mut parent, w);
        explored.iter().any(|&x| find(&mut parent, x) == rw)
    }
}

fn canon_connected(adj: &[u32]) -> (u128, Vec<usize>) {
    let mut colors = vec![0; adj.len()];
    refine(adj, &mut colors);
    let mut search = CanonSearch {
        adj,
        best: None,
        autos: Vec::new(),
    };
    search.run(colors, &mut Vec::new());
    search.best.expect("search visits at least one leaf")
}

fn sub_adjacency(adj: &[u32], vs: &[usize]) -> Vec<u32> {
    vs.iter()
        .map(|&v| {
            vs.iter()
                .enumerate()
                .filter(|(_, &w)| adj[v] >> w & 1 == 1)
                .fold(0u32, |acc, (j, _)| acc | 1 << j)
        })
        .collect()
}

fn local_components(adj: &[u32]) -> Vec<Vec<usize>> {
    let m = adj.len();
    let mut seen = 0u32;
    let mut out = Vec::new();
    for s in 0..m {
        if seen >> s & 1 == 1 {
            continue;
        }
        let mut comp = 1u32 << s;
        let mut frontier = 1u32 << s;
        while frontier != 0 {
            let v = frontier.trailing_zeros() as usize;
            frontier &= frontier - 1;
            let new = adj[v] & !comp;
            comp |= new;
            frontier |= new;
        }
        seen |= comp;
        out.push((0..m).filter(|&v| comp >> v & 1 == 1).collect());
    }
    out
}

/// Canonical form together with the canonical position of each support vertex.
pub(crate) fn canonical_labeling(g: &LabeledGraph) -> Result<(CanonicalForm, BTreeMap<usize, usize>)> {
    let (support, adj) = local_adjacency(g);
    let m = support.len();
    if m > MAX_CANON_VERTICES {
        return Err(Error::TooLarge(format!(
            "canonicalization supports at most {MAX_CANON_VERTICES} non-isolated vertices, got {m}"
        )));
    }
    let total = g.num_vertices();
    if total > 255 {
        return Err(Error::TooLarge(format!("{total} vertices")));
    }
    let mut comps: Vec<(usize, u128, Vec<usize>)> = local_components(&adj)
        .into_iter()
        .map(|vs| {
            let sub = sub_adjacency(&adj, &vs);
            let (code, order) = canon_connected(&sub);
            (vs.len(), code, order.into_iter().map(|i| vs[i]).collect())
        })
        .collect();
    comps.sort_by(|a, b| (a.0, a.1).cmp(&(b.0, b.1)));
    let order: Vec<usize> = comps.into_iter().flat_map(|c| c.2).collect();
    let mut bytes = vec![total as u8, (total - m) as u8, m as u8];
    let nbits = m * m.saturating_sub(1) / 2;
    let mut packed = vec![0u8; nbits.div_ceil(8)];
    let mut bit = 0;
    for i in 0..m {
        for j in i + 1..m {
            if adj[order[i]] >> order[j] & 1 == 1 {
                packed[bit / 8] |= 1 << (7 - bit % 8);
            }
            bit += 1;
        }
    }
    bytes.extend(packed);
    let labeling = order.iter().enumerate().map(|(pos, &i)| (support[i], pos)).collect();
    Ok((CanonicalForm { bytes }, labeling))
}

pub fn canonicalize(g: &LabeledGraph) -> Result<CanonicalForm> {
    canonical_labeling(g).map(|(c, _)| c)
}

/// Whether some automorphism of the colored graph `(adj, left)` maps it onto `(adj, right)`.
fn colored_iso_exists(adj: &[u32], left: &[usize], right: &[usize]) -> bool {
    let hist = |c: &[usize]| {
        let mut h = vec![0usize; c.len()];
        for &x in c {
            h[x] += 1;
        }
        h
    };
    if hist(left) != hist(right) {
        return false;
    }
    match target_cell(left) {
        None => {
            let lo = order_of(left);
            let ro = order_of(right);
            code_of(adj, &lo) == code_of(adj, &ro)
        }
        Some(cell) => {
            let x = cell[0];
            let c = left[x];
            let l2 = individualize(adj, left, x);
            (0..right.len())
                .filter(|&y| right[y] == c)
                .any(|y| colored_iso_exists(adj, &l2, &individualize(adj, right, y)))
        }
    }
}

/// Orbit–stabilizer product along a base chosen by refinement.
fn aut_connected(adj: &[u32]) -> u128 {
    let mut colors = vec![0; adj.len()];
    refine(adj, &mut colors);
    let mut total: u128 = 1;
    while let Some(cell) = target_cell(&colors) {
        let v = cell[0];
        let left = individualize(adj, &colors, v);
        let orbit = cell
            .iter()
            .filter(|&&w| w == v || colored_iso_exists(adj, &left, &individualize(adj, &colors, w)))
            .count();
        total *= orbit as u128;
        colors = left;
    }
    total
}

fn factorial(k: usize) -> Result<u128> {
    (1..=k as u128)
        .try_fold(1u128, |acc, x| acc.checked_mul(x))
        .ok_or_else(|| Error::TooLarge(format!("{k}!")))
}

pub fn automorphism_count(g: &LabeledGraph) -> Result<u128> {
    let (_, adj) = local_adjacency(g);
    if adj.len() > MAX_CANON_VERTICES {
        return Err(Error::TooLarge(format!("{} non-isolated vertices", adj.len())));
    }
    let mut classes: BTreeMap<(usize, u128), (usize, u128)> = BTreeMap::new();
    for vs in local_components(&adj) {
        let sub = sub_adjacency(&adj, &vs);
        let (code, _) = canon_connected(&sub);
        let entry = classes.entry((vs.len(), code)).or_insert((0, 0));
        if entry.0 == 0 {
            entry.1 = aut_connected(&sub);
        }
        entry.0 += 1;
    }
    let overflow = || Error::TooLarge("automorphism count overflows".into());
    let mut total = factorial(g.isolated().len())?;
    for (mult, aut) in classes.into_values() {
        total = total.checked_mul(factorial(mult)?).ok_or_else(overflow)?;
        for _ in 0..mult {
            total = total.checked_mul(aut).ok_or_else(overflow)?;
        }
    }
    Ok(total)
}

/// Number of isomorphisms from `g` to `h` (zero when not isomorphic).
pub fn count_isomorphisms(g: &LabeledGraph, h: &LabeledGraph) -> Result<u128> {
    if canonicalize(g)? != canonicalize(h)? {
        return Ok(0);
    }
    automorphism_count(g)
}

fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let mut r: u128 = 1;
    for i in 0..k {
        r = r * (n - i) as u128 / (i + 1) as u128;
    }
    r
}

/// Number of subgraphs of `s` isomorphic to `h`. Isolated vertices of `h` are
/// matched by any unused vertex of `s`.
pub fn count_embeddings(h: &LabeledGraph, s: &LabeledGraph) -> Result<u128> {
    let hs = h.edge_induced();
    let (hv, hadj) = local_adjacency(&hs);
    let m = hv.len();
    let sadj = s.adjacency();
    let svs: Vec<usize> = s.vertices().iter().copied().collect();
    if m > svs.len() {
        return Ok(0);
    }
    let mut order: Vec<usize> = Vec::new();
    let mut placed = 0u32;
    while order.len() < m {
        let next = (0..m)
            .filter(|&v| placed >> v & 1 == 0)
            .max_by_key(|&v| {
                (
                    (hadj[v] & placed).count_ones(),
                    hadj[v].count_ones(),
                    std::cmp::Reverse(v),
                )
            })
            .unwrap();
        order.push(next);
        placed |= 1 << next;
    }
    let mut image = vec![usize::MAX; m];
    let mut used = std::collections::BTreeSet::new();
    let monos = count_monos(&hadj, &order, 0, &mut image, &mut used, s, &sadj, &svs);
    let copies = monos / automorphism_count(&hs)?;
    let iso = h.isolated().len();
    Ok(copies * binomial(svs.len() - m, iso))
}

#[allow(clippy::too_many_arguments)]
fn count_monos(
    hadj: &[u32],
    order: &[usize],
    depth: usize,
    image: &mut Vec<usize>,
    used: &mut std::collections::BTreeSet<usize>,
    s: &LabeledGraph,
    sadj: &BTreeMap<usize, Vec<usize>>,
    svs: &[usize],
) -> u128 {
    if depth == order.len() {
        return 1;
    }
    let v = order[depth];
    let anchor = order[..depth].iter().copied().find(|&u| hadj[v] >> u & 1 == 1);
    let candidates: Vec<usize> = match anchor {
        Some(u) => sadj[&image[u]].clone(),
        None => svs.to_vec(),
    };
    let mut total = 0;
    for w in candidates {
        if used.contains(&w) {
            continue;
        }
        let ok = order[..depth]
            .iter()
            .all(|&u| hadj[v] >> u & 1 == 0 || s.has_edge(image[u], w));
        if !ok {
            continue;
        }
        image[v] = w;
        used.insert(w);
        total += count_monos(hadj, order, depth + 1, image, used, s, sadj, svs);
        used.remove(&w);
    }
    total
}
