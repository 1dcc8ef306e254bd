//! Counting and moment bounds used by the dual certificate, with numeric
//! audits of the inequalities between them.

use std::collections::{BTreeMap, BTreeSet};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{
    automorphism_count, canonicalize, independent_cycle_census, submasks, CanonicalForm, EdgeSpace, LabeledGraph,
};
use crate::measure::{correlated_er_joint, DiscreteMeasure, PermCondition};
use crate::models::{event_e_indicator, EventModel, ModelParams, Potential};

/// Factor standing in for `[1+o(1)]` in the audited inequalities.
pub const DESK_SLACK: f64 = 2.0;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundAudit {
    pub instance: String,
    pub lhs: f64,
    pub rhs: f64,
    pub holds: bool,
    pub slack: f64,
    /// Multiplier already applied to `rhs`.
    pub factor: f64,
}

impl BoundAudit {
    pub fn new(instance: impl Into<String>, lhs: f64, rhs: f64) -> Self {
        Self::with_factor(instance, lhs, rhs, 1.0)
    }

    /// Audit of `lhs ≤ factor·rhs`.
    pub fn with_factor(instance: impl Into<String>, lhs: f64, rhs: f64, factor: f64) -> Self {
        let rhs = rhs * factor;
        let tol = 1e-12 * lhs.abs().max(rhs.abs());
        BoundAudit {
            instance: instance.into(),
            lhs,
            rhs,
            holds: lhs <= rhs + tol,
            slack: rhs - lhs,
            factor,
        }
    }

    /// The same audit with the desk-scale factor replaced by `slack`; audits
    /// without that factor are returned unchanged.
    pub fn rescaled(&self, slack: f64) -> Self {
        if self.factor != DESK_SLACK || slack == DESK_SLACK {
            return self.clone();
        }
        Self::with_factor(self.instance.clone(), self.lhs, self.rhs / self.factor, slack)
    }
}

fn need(params: &ModelParams) -> Result<(f64, f64)> {
    Ok((params.n as f64, params.degree()? as f64))
}

fn edges_of(g: &LabeledGraph) -> i64 {
    g.num_edges() as i64
}

fn verts(g: &LabeledGraph) -> i64 {
    g.num_vertices() as i64
}

/// `|𝓛(S) ∖ V(H)| + τ(S) − τ(H)`, with `τ` over declared vertex sets.
pub fn excess_gap(s: &LabeledGraph, h: &LabeledGraph) -> i64 {
    let leaves = s.leaves().iter().filter(|v| !h.has_vertex(**v)).count() as i64;
    leaves + s.excess() - h.excess()
}

fn check_sub(s: &LabeledGraph, h: &LabeledGraph) -> Result<()> {
    if s.n() != h.n() {
        return Err(Error::AmbientMismatch(s.n(), h.n()));
    }
    if !h.is_subgraph_of(s) {
        return Err(Error::NotSubgraph("H ⊄ S".into()));
    }
    Ok(())
}

/// Edge-induced subgraph classes of `g`, including the empty graph.
fn subgraph_classes(g: &LabeledGraph) -> Result<BTreeSet<CanonicalForm>> {
    let es = g.edges().iter().copied().collect::<Vec<_>>();
    if es.len() > 20 {
        return Err(Error::BudgetExceeded(format!("{} edges", es.len())));
    }
    let mut out = BTreeSet::new();
    for mask in 0u64..1 << es.len() {
        let h = LabeledGraph::from_edges(g.n(), (0..es.len()).filter(|i| mask >> i & 1 == 1).map(|i| es[i]))?;
        out.insert(canonicalize(&h)?);
    }
    Ok(out)
}

/// `𝙵(S₁,S₂) = Σ_{𝐇₀ ↪ S₁,S₂} n^{−(|V(S₁)|+|V(S₂)|)/2}·ρ^{|E(𝐇₀)|}·D^{−6(|E(S₁)|+|E(S₂)|−2|E(𝐇₀)|)}·Aut(𝐇₀)`,
/// over classes without isolated vertices.
pub fn f_bound(s1: &LabeledGraph, s2: &LabeledGraph, params: &ModelParams) -> Result<f64> {
    let (n, d) = need(params)?;
    let rho = params.rho()?.value();
    let (e1, e2) = (edges_of(s1), edges_of(s2));
    let pre = n.powf(-((verts(s1) + verts(s2)) as f64) / 2.0);
    let common: Vec<CanonicalForm> = subgraph_classes(s1)?
        .intersection(&subgraph_classes(s2)?)
        .cloned()
        .collect();
    let mut total = 0.0;
    for h0 in common {
        let e0 = h0.num_edges() as i64;
        let aut = automorphism_count(&h0.to_graph())? as f64;
        total += pre * rho.powi(e0 as i32) * d.powi(-6 * (e1 + e2 - 2 * e0) as i32) * aut;
    }
    Ok(total)
}

/// `M(S₀,S₁,S₂) = ρ^{|E(S₀)|}·n^{−(|V(S₁)|+|V(S₂)|)/2+|V(S₀)|}·D^{−7(|E(S₁)|+|E(S₂)|−2|E(S₀)|)}`.
pub fn m_triple(s0: &LabeledGraph, s1: &LabeledGraph, s2: &LabeledGraph, params: &ModelParams) -> Result<f64> {
    let (n, d) = need(params)?;
    let rho = params.rho()?.value();
    let e0 = edges_of(s0);
    let nexp = -((verts(s1) + verts(s2)) as f64) / 2.0 + verts(s0) as f64;
    Ok(rho.powi(e0 as i32) * n.powf(nexp) * d.powi(-7 * (edges_of(s1) + edges_of(s2) - 2 * e0) as i32))
}

fn pair_form(s: &LabeledGraph, h: &LabeledGraph, params: &ModelParams, power: i32, log10_n: f64) -> Result<f64> {
    check_sub(s, h)?;
    let d = params.degree()? as f64;
    let delta = params.delta()?.value();
    let log_base = power as f64 * d.log10() - 0.1 * log10_n;
    let gap = excess_gap(s, h) as f64;
    Ok(10f64.powf(log_base * gap / 2.0) * (1.0 - delta / 2.0).powi((edges_of(s) - edges_of(h)) as i32))
}

fn log10_n(params: &ModelParams) -> f64 {
    (params.n as f64).log10()
}

/// `𝙼(S,H) = (D⁸/n^{0.1})^{½(|𝓛(S)∖V(H)|+τ(S)−τ(H))}·(1−δ/2)^{|E(S)|−|E(H)|}`.
pub fn m_pair(s: &LabeledGraph, h: &LabeledGraph, params: &ModelParams) -> Result<f64> {
    pair_form(s, h, params, 8, log10_n(params))
}

/// `𝙽(S,H)`: as [`m_pair`] with `D²⁸` in place of `D⁸`.
pub fn n_pair(s: &LabeledGraph, h: &LabeledGraph, params: &ModelParams) -> Result<f64> {
    pair_form(s, h, params, 28, log10_n(params))
}

pub const P_SUM_MAX_EDGES: usize = 8;

/// The graphs `K` with `H ⋉ K ⊂ S`. Such a `K` is fixed by its edges: its
/// vertices are `V(H)` together with the ends of its edges.
pub fn between(s: &LabeledGraph, h: &LabeledGraph) -> Result<Vec<LabeledGraph>> {
    check_sub(s, h)?;
    let extra: Vec<_> = s.edges().difference(h.edges()).copied().collect();
    if s.num_edges() > P_SUM_MAX_EDGES {
        return Err(Error::BudgetExceeded(format!(
            "{} edges exceed {P_SUM_MAX_EDGES}",
            s.num_edges()
        )));
    }
    let mut out = Vec::new();
    for mask in 0u64..1 << extra.len() {
        let mut k = h.clone();
        for (i, &(u, v)) in extra.iter().enumerate() {
            if mask >> i & 1 == 1 {
                k.add_edge(u, v)?;
            }
        }
        out.push(k);
    }
    Ok(out)
}

fn p_sum_log(s: &LabeledGraph, h: &LabeledGraph, params: &ModelParams, log10_n: f64) -> Result<f64> {
    let mut total = 0.0;
    for k in between(s, h)? {
        total += pair_form(s, &k, params, 8, log10_n)? * pair_form(&k, h, params, 8, log10_n)?;
    }
    Ok(total)
}

/// `𝙿(S,H) = Σ_{H ⋉ K ⊂ S} 𝙼(S,K)·𝙼(K,H)`.
pub fn p_sum(s: &LabeledGraph, h: &LabeledGraph, params: &ModelParams) -> Result<f64> {
    p_sum_log(s, h, params, log10_n(params))
}

/// `log₁₀ n` at which `D²⁸/n^{0.1} = 10⁻³`; only there do the `𝙼` and `𝙽`
/// factors shrink with the excess gap.
pub fn decay_log10_n(d: usize) -> f64 {
    10.0 * (28.0 * (d as f64).log10() + 3.0)
}

/// `|𝔉C(S,H)|`: independent cycles of `S` avoiding `V(H)`.
pub fn free_cycles(s: &LabeledGraph, h: &LabeledGraph) -> Result<usize> {
    Ok(independent_cycle_census(s, h)?.values().sum())
}

fn p_sum_audit(
    s: &LabeledGraph,
    h: &LabeledGraph,
    params: &ModelParams,
    log10_n: f64,
    label: &str,
) -> Result<BoundAudit> {
    let lhs = p_sum_log(s, h, params, log10_n)?;
    let c = free_cycles(s, h)?;
    let rhs = 2f64.powi(c as i32) * pair_form(s, h, params, 28, log10_n)?;
    Ok(BoundAudit::with_factor(
        format!("P-sum S={:?} H={:?} |FC|={c} {label}", s.edges(), h.vertices()),
        lhs,
        rhs,
        DESK_SLACK,
    ))
}

/// `𝙿(S,H) ≤ 2·2^{|𝔉C(S,H)|}·𝙽(S,H)` at the ambient `n`.
pub fn audit_p_sum(s: &LabeledGraph, h: &LabeledGraph, params: &ModelParams) -> Result<BoundAudit> {
    p_sum_audit(s, h, params, log10_n(params), &format!("n={}", params.n))
}

/// The same audit with the formulas evaluated at `n = 10^{decay_log10_n(D)}`.
pub fn audit_p_sum_large_n(s: &LabeledGraph, h: &LabeledGraph, params: &ModelParams) -> Result<BoundAudit> {
    let l = decay_log10_n(params.degree()?);
    p_sum_audit(s, h, params, l, &format!("n=10^{l:.1}"))
}

/// Exact conditional law `P̄(· | π*(0) = 0)` of the correlated Erdős–Rényi pair,
/// with `P̄` the law restricted to parents in the conditioning event.
pub struct PropB1Context {
    params: ModelParams,
    es: EdgeSpace,
    law: DiscreteMeasure<u64, f64>,
    /// Whether every parent graph lies in the event.
    pub vacuous: bool,
}

impl PropB1Context {
    pub fn new(params: &ModelParams) -> Result<Self> {
        let es = EdgeSpace::new(params.n)?;
        let e = es.num_edges();
        let mut inside = BTreeSet::new();
        for g in 0u64..1 << e {
            if event_e_indicator(&es.graph(g), params, EventModel::Er)? {
                inside.insert(g);
            }
        }
        let vacuous = inside.len() == 1 << e;
        let event = |g: u64| inside.contains(&g);
        let joint = correlated_er_joint::<f64>(params, Some(PermCondition { i: 0, j: 0 }), Some(&event))?;
        Ok(PropB1Context {
            params: params.clone(),
            es,
            law: joint.map(|(_, m)| *m),
            vacuous,
        })
    }

    /// `|E_P̄[φ_{S₁,S₂} | π*(0) = 0]|`.
    pub fn lhs(&self, s1: &LabeledGraph, s2: &LabeledGraph) -> Result<f64> {
        let q = self.params.q()?.value();
        let e = self.es.num_edges();
        let a = self.es.mask(s1)?;
        let b = self.es.mask(s2)?;
        let var = (q * (1.0 - q)).powf((a.count_ones() + b.count_ones()) as f64 / 2.0);
        let v = self.law.expectation(|m| {
            let mut prod = 1.0;
            for i in 0..e {
                if a >> i & 1 == 1 {
                    prod *= (m >> i & 1) as f64 - q;
                }
                if b >> i & 1 == 1 {
                    prod *= (m >> (e + i) & 1) as f64 - q;
                }
            }
            prod
        });
        Ok((v / var).abs())
    }

    pub fn audit(&self, s1: &LabeledGraph, s2: &LabeledGraph) -> Result<BoundAudit> {
        let lhs = self.lhs(s1, s2)?;
        let shared = s1.has_vertex(0) && s2.has_vertex(0);
        let ind = if shared { self.params.n as f64 } else { 1.0 };
        let rhs = ind * f_bound(s1, s2, &self.params)?;
        let regime = if self.vacuous { "event vacuous" } else { "event binding" };
        Ok(BoundAudit::with_factor(
            format!("B1 S1={:?} S2={:?} ({regime})", s1.edges(), s2.edges()),
            lhs,
            rhs,
            DESK_SLACK,
        ))
    }
}

pub fn audit_prop_b1(s1: &LabeledGraph, s2: &LabeledGraph, params: &ModelParams) -> Result<BoundAudit> {
    PropB1Context::new(params)?.audit(s1, s2)
}

/// Counts of `T' ⋐ 𝒦_n` with `S ⋐ T'`, keyed by `(|V(T')|−|V(S)|, |E(T')|−|E(S)|)`,
/// for `|E(T')| − |E(S)| ≤ max_extra`.
pub fn supergraph_counts(s: &LabeledGraph, max_extra: usize) -> Result<BTreeMap<(usize, usize), u64>> {
    let es = EdgeSpace::new(s.n())?;
    let base = es.mask(&s.edge_induced())?;
    let rest = !base & ((1u64 << es.num_edges()) - 1);
    let v0 = es.vertex_mask(base).count_ones() as usize;
    let mut out = BTreeMap::new();
    for add in submasks(rest) {
        let l = add.count_ones() as usize;
        if l > max_extra {
            continue;
        }
        let k = es.vertex_mask(base | add).count_ones() as usize - v0;
        *out.entry((k, l)).or_insert(0) += 1;
    }
    Ok(out)
}

/// `#{T' ⋐ 𝒦_n : S ⋐ T', Δ|V| = k, Δ|E| = l} ≤ n^k·(|V(S)|+k)^{2l}`.
pub fn audit_supergraph_counts(s: &LabeledGraph, max_extra: usize) -> Result<Vec<BoundAudit>> {
    let n = s.n() as f64;
    let v = s.support().len() as f64;
    Ok(supergraph_counts(s, max_extra)?
        .into_iter()
        .map(|((k, l), c)| {
            let rhs = n.powi(k as i32) * (v + k as f64).powi(2 * l as i32);
            BoundAudit::new(format!("A1(iv) S={:?} k={k} l={l}", s.edges()), c as f64, rhs)
        })
        .collect())
}

fn census_beyond(s: &LabeledGraph, h: &LabeledGraph, big_n: usize, d: usize) -> Result<Vec<usize>> {
    let census = independent_cycle_census(s, h)?;
    Ok((big_n + 1..=d).map(|j| census.get(&j).copied().unwrap_or(0)).collect())
}

/// `Σ_{p_{N+1}+…+p_D ≤ p} ∏ 1/p_j!`.
fn partition_weight(slots: usize, p: usize) -> f64 {
    fn go(slots: usize, left: usize) -> f64 {
        if slots == 0 {
            return 1.0;
        }
        let mut f = 1.0;
        let mut total = 0.0;
        for x in 0..=left {
            if x > 0 {
                f *= x as f64;
            }
            total += go(slots - 1, left - x) / f;
        }
        total
    }
    go(slots, p)
}

/// Graphs `S` with `H ⋉ S`, at most `D` edges, and no independent cycle of
/// length above `N` avoiding `V(H)`, counted by `(m, p, q)` with
/// `m = |𝓛(S)∖V(H)|+τ(S)−τ(H)`, `p = Δ|E|`, `q = Δ|V|`. Admissibility is not
/// imposed, so the counts bound the admissible ones from above.
pub fn extension_counts(h: &LabeledGraph, d: usize, big_n: usize) -> Result<BTreeMap<(i64, usize, usize), u64>> {
    let es = EdgeSpace::new(h.n())?;
    let base = es.mask(h)?;
    if base.count_ones() as usize > d {
        return Ok(BTreeMap::new());
    }
    let rest = !base & ((1u64 << es.num_edges()) - 1);
    let mut out = BTreeMap::new();
    let budget = d - base.count_ones() as usize;
    for add in EdgeSpace::new(h.n())?.masks_up_to(budget) {
        if add & rest != add {
            continue;
        }
        let mut s = h.clone();
        for (u, v) in es.edges_of(add) {
            s.add_edge(u, v)?;
        }
        if census_beyond(&s, h, big_n, d)?.iter().any(|&c| c > 0) {
            continue;
        }
        let m = excess_gap(&s, h);
        let p = add.count_ones() as usize;
        let q = s.num_vertices() - h.num_vertices();
        *out.entry((m, p, q)).or_insert(0) += 1;
    }
    Ok(out)
}

/// Audit of the extension count against `(2D)^{3m}·n^q·Σ_𝔓 ∏ 1/p_j!`.
pub fn audit_extension_counts(h: &LabeledGraph, d: usize, big_n: usize) -> Result<Vec<BoundAudit>> {
    let n = h.n() as f64;
    let slots = d.saturating_sub(big_n);
    Ok(extension_counts(h, d, big_n)?
        .into_iter()
        .map(|((m, p, q), c)| {
            let rhs = (2.0 * d as f64).powi(3 * m as i32) * n.powi(q as i32) * partition_weight(slots, p);
            BoundAudit::new(
                format!(
                    "A4 H={:?} D={d} N={big_n} m={m} p={p} q={q} (admissibility not imposed)",
                    h.edges()
                ),
                c as f64,
                rhs,
            )
        })
        .collect())
}

/// Graphs `H` with `H ⋉ S`, counted by `m` and the census of independent
/// `j`-cycles of `S` avoiding `V(H)` for `N < j ≤ D`.
pub fn restriction_counts(s: &LabeledGraph, d: usize, big_n: usize) -> Result<BTreeMap<(i64, Vec<usize>), u64>> {
    let s = s.clone();
    let edges: Vec<_> = s.edges().iter().copied().collect();
    let verts: Vec<usize> = s.vertices().iter().copied().collect();
    if edges.len() > 12 || verts.len() > 14 {
        return Err(Error::BudgetExceeded("restriction enumeration".into()));
    }
    let isolated = s.isolated();
    let mut out = BTreeMap::new();
    for em in 0u64..1 << edges.len() {
        let chosen: Vec<_> = (0..edges.len())
            .filter(|i| em >> i & 1 == 1)
            .map(|i| edges[i])
            .collect();
        let core = LabeledGraph::from_edges(s.n(), chosen.iter().copied())?;
        let forced: BTreeSet<usize> = core.vertices().union(&isolated).copied().collect();
        let free: Vec<usize> = verts.iter().copied().filter(|v| !forced.contains(v)).collect();
        for vm in 0u64..1 << free.len() {
            let mut h = core.clone();
            for &v in &forced {
                h.add_vertex(v)?;
            }
            for (i, &v) in free.iter().enumerate() {
                if vm >> i & 1 == 1 {
                    h.add_vertex(v)?;
                }
            }
            let key = (excess_gap(&s, &h), census_beyond(&s, &h, big_n, d)?);
            *out.entry(key).or_insert(0) += 1;
        }
    }
    Ok(out)
}

fn binomial(n: usize, k: usize) -> f64 {
    if k > n {
        return 0.0;
    }
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// Audit of the restriction count against `D^{15m}·∏ C(|𝒞_j(S)|, m_j)`.
pub fn audit_restriction_counts(s: &LabeledGraph, d: usize, big_n: usize) -> Result<Vec<BoundAudit>> {
    let all = census_beyond(s, &LabeledGraph::empty(s.n()), big_n, d)?;
    Ok(restriction_counts(s, d, big_n)?
        .into_iter()
        .map(|((m, cen), c)| {
            let prod: f64 = cen.iter().zip(&all).map(|(&mj, &cj)| binomial(cj, mj)).product();
            let rhs = (d as f64).powi(15 * m as i32) * prod;
            BoundAudit::new(
                format!("A5 S={:?} D={d} N={big_n} m={m} census={cen:?}", s.edges()),
                c as f64,
                rhs,
            )
        })
        .collect())
}

/// Exhaustive checks of the union, potential and automorphism facts over
/// pairs of graphs on `n` vertices: one summary audit per fact.
pub fn graph_fact_audits(n: usize, params: &ModelParams, max_aut_edges: usize) -> Result<Vec<BoundAudit>> {
    let es = EdgeSpace::new(n)?;
    let all = es.masks_up_to(es.num_edges());
    let mut reps: BTreeMap<CanonicalForm, u64> = BTreeMap::new();
    for &m in &all {
        reps.entry(canonicalize(&es.graph(m))?).or_insert(m);
    }
    let form = Potential::er(params)?;
    let vc = |m: u64| es.vertex_mask(m).count_ones() as i64;
    // Over representatives S and all T.
    let (dv, de, dphi) = reps
        .values()
        .par_bridge()
        .map(|&s| {
            let mut worst = (i64::MIN, 0i64, f64::NEG_INFINITY);
            for &t in &all {
                let vu = (es.vertex_mask(s) | es.vertex_mask(t)).count_ones() as i64;
                let eu = (s | t).count_ones() as i64;
                let vi = vc(s & t);
                let ei = (s & t).count_ones() as i64;
                let dv = vu + vi - vc(s) - vc(t);
                let de = eu + ei - s.count_ones() as i64 - t.count_ones() as i64;
                let dphi = form.log_vertex * dv as f64 + form.log_edge * de as f64;
                worst = (worst.0.max(dv), worst.1.max(de.abs()), worst.2.max(dphi));
            }
            worst
        })
        .reduce(
            || (i64::MIN, 0, f64::NEG_INFINITY),
            |a, b| (a.0.max(b.0), a.1.max(b.1), a.2.max(b.2)),
        );
    let pairs = reps.len() * all.len();
    let mut out = vec![
        BoundAudit::new(format!("A1(i) vertices, {pairs} pairs on K_{n}"), dv as f64, 0.0),
        BoundAudit::new(
            format!("A1(i) edges |deviation|, {pairs} pairs on K_{n}"),
            de as f64,
            0.0,
        ),
        BoundAudit::new(format!("A1(ii) log potential, {pairs} pairs on K_{n}"), dphi, 0.0),
    ];
    // Automorphism monotonicity and the sub-count bound.
    let mut worst_aut: f64 = 0.0;
    let mut worst_sub: f64 = 0.0;
    let mut checked = 0usize;
    for &t in reps.values() {
        let et = t.count_ones() as usize;
        if et > max_aut_edges {
            continue;
        }
        let tg = es.graph(t);
        let at = automorphism_count(&tg)? as f64;
        let vt = es.vertex_mask(t).count_ones() as f64;
        let mut by_removed = vec![0u64; et + 1];
        for s in submasks(t) {
            let removed = et - s.count_ones() as usize;
            by_removed[removed] += 1;
            let as_ = automorphism_count(&es.graph(s))? as f64;
            worst_aut = worst_aut.max(as_ / (at * vt.powi(2 * removed as i32)));
            checked += 1;
        }
        for (k, &c) in by_removed.iter().enumerate() {
            worst_sub = worst_sub.max(c as f64 / (et as f64).powi(k as i32));
        }
    }
    out.push(BoundAudit::new(
        format!("A1(iii) max Aut ratio over {checked} nested pairs on K_{n}"),
        worst_aut,
        1.0,
    ));
    out.push(BoundAudit::new(
        format!("A1(v) max count ratio on K_{n}"),
        worst_sub,
        1.0,
    ));
    Ok(out)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum AuditSuite {
    A1,
    A4,
    A5,
    B1,
    B3,
    #[serde(rename = "P-sum")]
    PSum,
}

impl std::str::FromStr for AuditSuite {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_uppercase().as_str() {
            "A1" => Ok(AuditSuite::A1),
            "A4" => Ok(AuditSuite::A4),
            "A5" => Ok(AuditSuite::A5),
            "B1" => Ok(AuditSuite::B1),
            "B3" => Ok(AuditSuite::B3),
            "P-SUM" | "PSUM" => Ok(AuditSuite::PSum),
            other => Err(Error::Parse(format!("unknown audit suite {other}"))),
        }
    }
}

/// Small fixture graphs on `n` vertices.
pub fn fixture_graphs(n: usize) -> Result<Vec<LabeledGraph>> {
    let mut out = vec![LabeledGraph::empty(n)];
    let lists: &[&[(usize, usize)]] = &[
        &[(0, 1)],
        &[(0, 1), (1, 2)],
        &[(0, 1), (1, 2), (0, 2)],
        &[(0, 1), (1, 2), (2, 3), (0, 3)],
        &[(0, 1), (1, 2), (0, 2), (2, 3)],
        &[(0, 1), (1, 2), (0, 2), (3, 4), (4, 5), (3, 5)],
        &[(0, 1), (1, 2), (2, 3), (3, 0), (0, 2)],
    ];
    for l in lists {
        if l.iter().all(|&(u, v)| u < n && v < n) {
            out.push(LabeledGraph::from_edges(n, l.iter().copied())?);
        }
    }
    Ok(out)
}

/// Runs a suite on its default fixtures; parallel, in a fixed order.
pub fn run_suite(suite: AuditSuite, params: &ModelParams) -> Result<Vec<BoundAudit>> {
    let d = params.degree()?;
    let n = params.n;
    let nested: Vec<Result<Vec<BoundAudit>>> = match suite {
        AuditSuite::A1 => {
            let mut v = vec![graph_fact_audits(n.min(6), params, 8)];
            v.extend(
                fixture_graphs(n)?
                    .into_par_iter()
                    .filter(|s| s.num_edges() <= d)
                    .map(|s| audit_supergraph_counts(&s, 2))
                    .collect::<Vec<_>>(),
            );
            v
        }
        AuditSuite::A4 => {
            let big_n = params.cycle_len().unwrap_or(3);
            fixture_graphs(n)?
                .into_par_iter()
                .map(|h| audit_extension_counts(&h, d, big_n))
                .collect()
        }
        AuditSuite::A5 => {
            let big_n = params.cycle_len().unwrap_or(3);
            fixture_graphs(n)?
                .into_par_iter()
                .filter(|s| s.num_edges() <= d)
                .map(|s| audit_restriction_counts(&s, d, big_n))
                .collect()
        }
        AuditSuite::PSum => {
            let fixtures = fixture_graphs(n)?;
            let pairs: Vec<(LabeledGraph, LabeledGraph)> = fixtures
                .iter()
                .flat_map(|s| {
                    let es = s.edges().iter().copied().collect::<Vec<_>>();
                    (0u64..1 << es.len()).map(move |m| {
                        let h =
                            LabeledGraph::from_edges(s.n(), (0..es.len()).filter(|i| m >> i & 1 == 1).map(|i| es[i]))
                                .expect("subgraph of a valid graph");
                        (s.clone(), h)
                    })
                })
                .collect();
            vec![
                pairs.par_iter().map(|(s, h)| audit_p_sum(s, h, params)).collect(),
                pairs
                    .par_iter()
                    .map(|(s, h)| audit_p_sum_large_n(s, h, params))
                    .collect(),
            ]
        }
        AuditSuite::B1 => {
            let ctx = PropB1Context::new(params)?;
            let es = EdgeSpace::new(n)?;
            let masks = es.masks_up_to(d);
            let pairs: Vec<(u64, u64)> = masks
                .iter()
                .flat_map(|&a| masks.iter().map(move |&b| (a, b)))
                .filter(|(a, b)| (a.count_ones() + b.count_ones()) as usize <= d)
                .collect();
            vec![pairs
                .into_par_iter()
                .map(|(a, b)| ctx.audit(&es.graph(a), &es.graph(b)))
                .collect()]
        }
        AuditSuite::B3 => {
            let table = crate::certificate::XiTable::<f64>::build(
                params,
                d.min(crate::certificate::DUAL_MAX_DEGREE),
                crate::basis::SignalScale::Exact,
            )?;
            vec![crate::certificate::xi_bound_audits(&table, params)]
        }
    };
    let mut out = Vec::new();
    for r in nested {
        out.extend(r?);
    }
    Ok(out)
}
