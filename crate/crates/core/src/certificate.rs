//! Dual certificate for the reversed block-model advantage.
//!
//! With `φ_S` orthonormal under the null and `ψ_{σ,H}` orthonormal under the
//! planted joint law, any `u` solving `Mu = e_∅` bounds
//! `sup_f E_ER[f]/√E_SBM[f²]` by `‖u‖`. The coefficients are
//! `u_{σ,H} = k^{−n/2}·Ξ(H)`, where `Ξ` is built by recursion over leafless
//! subgraphs.

use std::collections::{BTreeMap, HashMap};

use num_rational::BigRational;
use rayon::prelude::*;
use serde::Serialize;

use crate::advantage::{advantage_gram_schmidt, AdvantageReport, Weight};
use crate::basis::{
    h_weights, label_expectation, label_expectation_exhaustive, signal, CrossMoment, HWeights, SignalScale,
};
use crate::bounds::BoundAudit;
use crate::error::{Error, Result};
use crate::exact::{Number, Scalar, Surd};
use crate::graph::{automorphism_count, canonicalize, submasks, CanonicalForm, Edge, EdgeSpace, LabeledGraph};
use crate::measure::{decode_labels, er_measure, sbm_graph_measure};
use crate::models::ModelParams;

pub const DUAL_MAX_DEGREE: usize = 6;
pub const LINEAR_SYSTEM_MAX_N: usize = 6;
pub const LINEAR_SYSTEM_MAX_DEGREE: usize = 3;
pub const REVERSED_MAX_N: usize = 4;

/// `P(S) = E_σ[∏_{E(S)} 𝚑]`.
pub fn p_of<S: Scalar>(s: &LabeledGraph, hw: &HWeights<S>, k: usize) -> Result<S> {
    label_expectation(s, &|_| (hw.a.clone(), hw.b.clone()), k)
}

/// `Q(S, H) = E_σ[∏_{E(H)} 𝚑·∏_{E(S)∖E(H)} ω]`.
pub fn q_of<S: Scalar>(s: &LabeledGraph, h: &LabeledGraph, hw: &HWeights<S>, k: usize) -> Result<S> {
    if !h.edges().is_subset(s.edges()) {
        return Err(Error::NotSubgraph("H is not contained in S".into()));
    }
    label_expectation(
        s,
        &|(u, v)| {
            if h.has_edge(u, v) {
                (hw.a.clone(), hw.b.clone())
            } else {
                (S::zero(), S::one())
            }
        },
        k,
    )
}

/// `Q(S, H)` by direct enumeration of `[k]^{V(S)}`.
pub fn q_of_exhaustive<S: Scalar>(s: &LabeledGraph, h: &LabeledGraph, hw: &HWeights<S>, k: usize) -> Result<S> {
    label_expectation_exhaustive(
        s,
        &|(u, v)| {
            if h.has_edge(u, v) {
                (hw.a.clone(), hw.b.clone())
            } else {
                (S::zero(), S::one())
            }
        },
        k,
    )
}

/// `Ξ` on every leafless class with at most `D` edges that fits in `𝒦_n`.
#[derive(Clone, Debug)]
pub struct XiTable<S> {
    n: usize,
    k: usize,
    d: usize,
    scale: SignalScale,
    hw: HWeights<S>,
    t: S,
    entries: BTreeMap<CanonicalForm, S>,
}

impl<S: Scalar> XiTable<S> {
    pub fn build(params: &ModelParams, d: usize, scale: SignalScale) -> Result<Self> {
        params.validate()?;
        if d > DUAL_MAX_DEGREE {
            return Err(Error::TooLarge(format!("D = {d} exceeds {DUAL_MAX_DEGREE}")));
        }
        let n = params.n;
        let k = params.k()?;
        let hw = h_weights::<S>(params)?;
        let t = signal::<S>(params, scale)?;
        let mut table = XiTable {
            n,
            k,
            d,
            scale,
            hw,
            t,
            entries: BTreeMap::new(),
        };
        // A leafless graph has at least as many edges as vertices.
        let m = n.min(d);
        let es = EdgeSpace::new(m)?;
        let mut levels: Vec<BTreeMap<CanonicalForm, u64>> = vec![BTreeMap::new(); d + 1];
        for mask in es.masks_up_to(d) {
            if !es.is_leafless(mask) {
                continue;
            }
            let form = canonicalize(&es.graph(mask))?;
            levels[mask.count_ones() as usize].entry(form).or_insert(mask);
        }
        for level in levels {
            let computed: Vec<(CanonicalForm, S)> = level
                .into_par_iter()
                .map(|(form, mask)| table.recurse(&es, mask).map(|v| (form, v)))
                .collect::<Result<_>>()?;
            table.entries.extend(computed);
        }
        Ok(table)
    }

    fn recurse(&self, es: &EdgeSpace, mask: u64) -> Result<S> {
        if mask == 0 {
            return Ok(S::one());
        }
        let s = es.graph(mask);
        let size = mask.count_ones();
        let mut sum = S::zero();
        for h in submasks(mask) {
            if h == mask || !es.is_leafless(h) {
                continue;
            }
            let hg = es.graph(h);
            let xi_h = self.lookup(&hg)?;
            if xi_h.near_zero(0.0) {
                continue;
            }
            let q = q_of(&s, &hg, &self.hw, self.k)?;
            sum = sum + self.t.powi(size - h.count_ones()) * xi_h * q;
        }
        let p = p_of(&s, &self.hw, self.k)?;
        if p.near_zero(1e-300) {
            return Err(Error::Degenerate(format!("P(S) = 0 for S = {:?}", s.edges())));
        }
        Ok(-(sum / p))
    }

    fn lookup(&self, g: &LabeledGraph) -> Result<S> {
        let form = canonicalize(&g.edge_induced())?;
        self.entries
            .get(&form)
            .cloned()
            .ok_or_else(|| Error::Invalid(format!("no table entry for {form}")))
    }

    /// `Ξ(S)`; zero when `S` has a leaf.
    pub fn xi(&self, s: &LabeledGraph) -> Result<S> {
        if s.num_edges() > self.d {
            return Err(invalid_size(s.num_edges(), self.d));
        }
        if !s.is_leafless() {
            return Ok(S::zero());
        }
        if s.support().len() > self.n {
            return Err(Error::AmbientMismatch(s.support().len(), self.n));
        }
        self.lookup(s)
    }

    pub fn entries(&self) -> &BTreeMap<CanonicalForm, S> {
        &self.entries
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn degree(&self) -> usize {
        self.d
    }

    pub fn scale(&self) -> SignalScale {
        self.scale
    }

    pub fn weights(&self) -> &HWeights<S> {
        &self.hw
    }

    pub fn signal(&self) -> &S {
        &self.t
    }
}

fn invalid_size(edges: usize, d: usize) -> Error {
    Error::InvalidParameter {
        name: "S",
        reason: format!("{edges} edges exceed D = {d}"),
    }
}

/// `−(k−1)·t^l/(a^l + (k−1)·b^l)`, the value of `Ξ` on an `l`-cycle.
pub fn xi_cycle_closed_form<S: Scalar>(params: &ModelParams, l: u32, scale: SignalScale) -> Result<S> {
    let k = S::from_i64(params.k()? as i64);
    let hw = h_weights::<S>(params)?;
    let t = signal::<S>(params, scale)?;
    let km1 = k - S::one();
    Ok(-(km1.clone() * t.powi(l)) / (hw.a.powi(l) + km1 * hw.b.powi(l)))
}

#[derive(Clone, Debug, Serialize)]
pub struct DualClass<S> {
    pub form: CanonicalForm,
    pub edges: usize,
    pub vertices: usize,
    /// Copies of the class in `𝒦_n`.
    pub copies: u128,
    pub xi: S,
}

/// `u_{σ,H} = k^{−n/2}·Ξ(H)`, stored once per class.
#[derive(Clone, Debug, Serialize)]
pub struct DualVector<S> {
    pub n: usize,
    pub k: usize,
    pub degree: usize,
    pub classes: Vec<DualClass<S>>,
    pub norm_squared: S,
    pub norm: f64,
}

pub fn copies_in_complete(form: &CanonicalForm, n: usize) -> Result<u128> {
    let g = form.to_graph();
    let v = g.support().len();
    if v > n {
        return Ok(0);
    }
    let falling: u128 = (0..v).map(|i| (n - i) as u128).product();
    Ok(falling / automorphism_count(&g.edge_induced())?)
}

pub fn build_dual<S: Scalar>(table: &XiTable<S>) -> Result<DualVector<S>> {
    let mut classes = Vec::new();
    let mut total = S::zero();
    for (form, xi) in table.entries() {
        let copies = copies_in_complete(form, table.n)?;
        let c = i64::try_from(copies).map_err(|_| Error::TooLarge(format!("{copies} copies")))?;
        total = total + S::from_i64(c) * xi.clone() * xi.clone();
        classes.push(DualClass {
            form: form.clone(),
            edges: form.num_edges(),
            vertices: form.num_vertices() - form.num_isolated(),
            copies,
            xi: xi.clone(),
        });
    }
    Ok(DualVector {
        n: table.n,
        k: table.k,
        degree: table.d,
        norm: total.to_f64().max(0.0).sqrt(),
        norm_squared: total,
        classes,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct RowResidual {
    pub row: Vec<Edge>,
    pub residual: f64,
    pub exact_zero: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct LinearSystemReport {
    pub n: usize,
    pub k: usize,
    pub degree: usize,
    pub rows: usize,
    pub max_residual: f64,
    /// Every residual vanishes identically (exact backends only).
    pub all_exact_zero: bool,
    pub residuals: Vec<RowResidual>,
}

fn check_system_size(n: usize, d: usize) -> Result<()> {
    if n > LINEAR_SYSTEM_MAX_N || d > LINEAR_SYSTEM_MAX_DEGREE {
        return Err(Error::TooLarge(format!(
            "row sweep needs n ≤ {LINEAR_SYSTEM_MAX_N}, D ≤ {LINEAR_SYSTEM_MAX_DEGREE} (got n = {n}, D = {d})"
        )));
    }
    Ok(())
}

/// `Ξ` of every leafless mask of `𝒦_n` with at most `D` edges.
fn xi_by_mask<S: Scalar>(table: &XiTable<S>, es: &EdgeSpace) -> Result<HashMap<u64, S>> {
    let mut out = HashMap::new();
    for mask in es.masks_up_to(table.d) {
        if es.is_leafless(mask) {
            let v = table.xi(&es.graph(mask))?;
            if !v.near_zero(0.0) {
                out.insert(mask, v);
            }
        }
    }
    Ok(out)
}

fn finish_report<S: Scalar>(table: &XiTable<S>, es: &EdgeSpace, rows: Vec<(u64, S)>) -> LinearSystemReport {
    let residuals: Vec<RowResidual> = rows
        .into_iter()
        .map(|(mask, r)| RowResidual {
            row: es.graph(mask).edges().iter().copied().collect(),
            residual: r.to_f64().abs(),
            exact_zero: S::EXACT && r.near_zero(0.0),
        })
        .collect();
    LinearSystemReport {
        n: table.n,
        k: table.k,
        degree: table.d,
        rows: residuals.len(),
        max_residual: residuals.iter().map(|r| r.residual).fold(0.0, f64::max),
        all_exact_zero: S::EXACT && residuals.iter().all(|r| r.exact_zero),
        residuals,
    }
}

/// `Σ_σ Σ_{H ⊆ S} u_{σ,H}·M_{S;(σ,H)} − 1{S = ∅}` for every row `S ⋐ 𝒦_n`
/// with at most `D` edges, summing over all `k^n` labelings.
pub fn verify_linear_system<S: Scalar>(table: &XiTable<S>, params: &ModelParams) -> Result<LinearSystemReport> {
    check_system_size(params.n, table.d)?;
    if params.n != table.n {
        return Err(Error::AmbientMismatch(params.n, table.n));
    }
    let n = table.n;
    let k = table.k;
    let es = EdgeSpace::new(n)?;
    let xi = xi_by_mask(table, &es)?;
    let cm = CrossMoment::<S>::new(params, table.scale)?;
    // u carries one more factor k^{−n/2}.
    let kk = S::from_i64(k as i64);
    let mut root = kk.powi(n as u32 / 2);
    if n % 2 == 1 {
        root = root * kk.sqrt()?;
    }
    let inv_kn = S::one() / root;
    let labelings = (k as u64).pow(n as u32);
    let rows: Vec<(u64, S)> = es
        .masks_up_to(table.d)
        .into_par_iter()
        .map(|s| {
            let edges: Vec<Edge> = es.graph(s).edges().iter().copied().collect();
            let mut total = S::zero();
            for h in submasks(s) {
                let Some(x) = xi.get(&h) else { continue };
                let inside = |(u, v): Edge| h >> es.index(u, v) & 1 == 1;
                let mut acc = S::zero();
                for code in 0..labelings {
                    let sigma = decode_labels(code, n, k);
                    acc = acc + cm.eval(&edges, &sigma, &inside);
                }
                total = total + inv_kn.clone() * x.clone() * acc;
            }
            let target = if s == 0 { S::one() } else { S::zero() };
            (s, total - target)
        })
        .collect();
    Ok(finish_report(table, &es, rows))
}

/// The same rows after the labeling sum collapses:
/// `Σ_{H ⊆ S leafless} t^{|S|−|H|}·Ξ(H)·Q(S, H) − 1{S = ∅}`.
pub fn verify_linear_system_simplified<S: Scalar>(table: &XiTable<S>) -> Result<LinearSystemReport> {
    check_system_size(table.n, table.d)?;
    let es = EdgeSpace::new(table.n)?;
    let xi = xi_by_mask(table, &es)?;
    let rows: Vec<(u64, S)> = es
        .masks_up_to(table.d)
        .into_par_iter()
        .map(|s| -> Result<(u64, S)> {
            let sg = es.graph(s);
            let mut total = S::zero();
            for h in submasks(s) {
                let Some(x) = xi.get(&h) else { continue };
                let q = q_of(&sg, &es.graph(h), &table.hw, table.k)?;
                total = total + table.t.powi(s.count_ones() - h.count_ones()) * x.clone() * q;
            }
            let target = if s == 0 { S::one() } else { S::zero() };
            Ok((s, total - target))
        })
        .collect::<Result<_>>()?;
    Ok(finish_report(table, &es, rows))
}

fn check_reversed_size(params: &ModelParams, d: usize) -> Result<()> {
    if params.n > REVERSED_MAX_N || params.k()? != 2 || d > LINEAR_SYSTEM_MAX_DEGREE {
        return Err(Error::TooLarge(format!(
            "reversed advantage needs n ≤ {REVERSED_MAX_N}, k = 2, D ≤ {LINEAR_SYSTEM_MAX_DEGREE}"
        )));
    }
    Ok(())
}

/// `sup_{deg f ≤ D} E_ER[f]/√E_SBM[f²]` with the null at density `λ/n`.
pub fn reversed_advantage_exact<W: Weight>(params: &ModelParams, d: usize) -> Result<AdvantageReport> {
    check_reversed_size(params, d)?;
    let e = EdgeSpace::new(params.n)?.num_edges();
    let er = er_measure::<W>(params.n, &W::from_number(&params.mean_edge_probability()?)?)?;
    let sbm = sbm_graph_measure::<W>(params)?;
    advantage_gram_schmidt(&er, &sbm, e, d)
}

#[derive(Clone, Debug, Serialize)]
pub struct DualityGap {
    pub degree: usize,
    pub exact: f64,
    pub exact_squared: Number,
    pub dual_norm: f64,
    pub dual_norm_squared: f64,
    pub holds: bool,
}

/// Compares the reversed advantage with `‖u‖`; both in rational arithmetic
/// when every parameter is rational, in floating point otherwise.
pub fn duality_gap(params: &ModelParams, d: usize) -> Result<DualityGap> {
    let exact_params = [params.eps()?, params.lambda()?].iter().all(Number::is_exact);
    let (adv, norm_sq) = if exact_params {
        let adv = reversed_advantage_exact::<BigRational>(params, d)?;
        let table = XiTable::<Surd>::build(params, d, SignalScale::Exact)?;
        (adv, build_dual(&table)?.norm_squared.to_f64())
    } else {
        let adv = reversed_advantage_exact::<f64>(params, d)?;
        let table = XiTable::<f64>::build(params, d, SignalScale::Exact)?;
        (adv, build_dual(&table)?.norm_squared)
    };
    let dual_norm = norm_sq.max(0.0).sqrt();
    Ok(DualityGap {
        degree: d,
        exact: adv.value,
        exact_squared: adv.value_squared,
        dual_norm,
        dual_norm_squared: norm_sq,
        holds: adv.value <= dual_norm + 1e-9,
    })
}

/// `E_SBM[f²]` and `‖f̂M‖²` for `f = Σ f̂_S φ_S`; Parseval requires the first
/// to dominate. Both exact.
pub fn parseval_sides(params: &ModelParams, coeffs: &[(u64, BigRational)]) -> Result<(Surd, Surd)> {
    let n = params.n;
    let k = params.k()?;
    let es = EdgeSpace::new(n)?;
    let e = es.num_edges();
    let q = params
        .mean_edge_probability()?
        .exact()
        .cloned()
        .ok_or_else(|| Error::Inexact("λ/n".into()))?;
    let one = BigRational::from_integer(1.into());
    let var = q.clone() * (one.clone() - q.clone());
    let inv_sd = Surd::one() / Surd::sqrt_rational(&var)?;
    let sbm = sbm_graph_measure::<BigRational>(params)?;
    let phi = |s: u64, g: u64| -> Surd {
        let mut r = one.clone();
        for i in 0..e {
            if s >> i & 1 == 1 {
                r *= if g >> i & 1 == 1 {
                    one.clone() - q.clone()
                } else {
                    -q.clone()
                };
            }
        }
        Surd::rational(r) * inv_sd.powi(s.count_ones())
    };
    let mut lhs = Surd::zero();
    for (g, w) in sbm.atoms() {
        let f: Surd = coeffs.iter().map(|(s, c)| phi(*s, *g).scale(c)).sum();
        lhs = lhs + (f.clone() * f).scale(w);
    }
    let cm = CrossMoment::<Surd>::new(params, SignalScale::Exact)?;
    let union = coeffs.iter().fold(0u64, |a, (s, _)| a | s);
    let labelings = (k as u64).pow(n as u32);
    let mut rhs = Surd::zero();
    for h in submasks(union) {
        let inside = |(u, v): Edge| h >> es.index(u, v) & 1 == 1;
        for code in 0..labelings {
            let sigma = decode_labels(code, n, k);
            let mut entry = Surd::zero();
            for (s, c) in coeffs {
                if s & h != h {
                    continue;
                }
                let edges: Vec<Edge> = es.graph(*s).edges().iter().copied().collect();
                entry = entry + cm.eval(&edges, &sigma, &inside).scale(c);
            }
            rhs = rhs + entry.clone() * entry;
        }
    }
    Ok((lhs, rhs))
}

fn choice_condition(params: &ModelParams, delta: f64) -> Result<bool> {
    let k = params.k()? as f64;
    let eps = params.eps()?.value();
    let lhs = ((k - 1.0) * (1.0 - eps).sqrt() + (1.0 + eps * (k - 1.0)).sqrt()) / k / (1.0 - delta);
    Ok(lhs >= 1.0 / (1.0 - delta / 2.0))
}

fn factorial(m: u64) -> f64 {
    (1..=m).map(|i| i as f64).product()
}

/// Audits of the cycle-union bound `|Ξ(S)| ≤ k^m·(1−δ/2)^{|E|/2}·n^{−|E|/2}`
/// and the excess bound `|Ξ(S)| ≤ (10τ)!·(2kD)^{10τ}·(1−δ/2)^{|E|/2}·n^{−|E|/2}`
/// over every class of the table. Cycle-union instances record whether the
/// parameters satisfy the choice of `λ₀` the bound assumes.
pub fn xi_bound_audits<S: Scalar>(table: &XiTable<S>, params: &ModelParams) -> Result<Vec<BoundAudit>> {
    let delta = params.delta()?.value();
    let cond = choice_condition(params, delta)?;
    let n = table.n as f64;
    let k = table.k as f64;
    let d = table.d as f64;
    let mut out = Vec::new();
    for (form, xi) in table.entries() {
        if form.num_edges() == 0 {
            continue;
        }
        let g = form.to_graph().edge_induced();
        let e = g.num_edges() as f64;
        let base = (1.0 - delta / 2.0).powf(e / 2.0) * n.powf(-e / 2.0);
        let comps = g.components();
        let tau = g.excess();
        let lhs = xi.to_f64().abs();
        if comps.iter().all(LabeledGraph::is_cycle) {
            let rhs = k.powi(comps.len() as i32) * base;
            out.push(BoundAudit::new(
                format!(
                    "cycle-union {form} (choice condition {})",
                    if cond { "met" } else { "unmet" }
                ),
                lhs,
                rhs,
            ));
        }
        if tau > 0 {
            let t10 = 10 * tau as u64;
            let rhs = factorial(t10) * (2.0 * k * d).powi(t10 as i32) * base;
            out.push(BoundAudit::new(format!("excess {form} (τ = {tau})"), lhs, rhs));
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(n: usize, k: usize, lambda: (i64, i64), eps: (i64, i64)) -> ModelParams {
        ModelParams::sbm(n, k, Number::ratio(lambda.0, lambda.1), Number::ratio(eps.0, eps.1)).unwrap()
    }

    fn triangle(n: usize) -> LabeledGraph {
        LabeledGraph::cycle(n, &[0, 1, 2]).unwrap()
    }

    #[test]
    fn cycles_match_label_enumeration() {
        for k in 2..=3 {
            let p = params(6, k, (1, 1), (3, 10));
            let hw = h_weights::<f64>(&p).unwrap();
            for l in 3..=4 {
                let vs: Vec<usize> = (0..l).collect();
                let c = LabeledGraph::cycle(6, &vs).unwrap();
                let exact = hw.a.powi(l as i32) + (k as f64 - 1.0) * hw.b.powi(l as i32);
                let brute = label_expectation_exhaustive::<f64>(&c, &|_| (hw.a, hw.b), k).unwrap();
                assert!((p_of(&c, &hw, k).unwrap() - exact).abs() < 1e-12);
                assert!((brute - exact).abs() < 1e-12);
            }
            let e = LabeledGraph::edgeless(6);
            assert_eq!(q_of(&triangle(6), &e, &hw, k).unwrap(), k as f64 - 1.0);
        }
    }

    #[test]
    fn table_holds_empty_and_triangle() {
        let p = params(6, 2, (1, 1), (3, 10));
        let t = XiTable::<Surd>::build(&p, 3, SignalScale::Exact).unwrap();
        assert_eq!(t.entries().len(), 2);
        assert_eq!(t.xi(&LabeledGraph::edgeless(6)).unwrap(), Surd::one());
        assert!(t.xi(&LabeledGraph::path(6, &[0, 1, 2]).unwrap()).unwrap().is_zero());
        let closed = xi_cycle_closed_form::<Surd>(&p, 3, SignalScale::Exact).unwrap();
        assert_eq!(t.xi(&triangle(6)).unwrap(), closed);
    }

    #[test]
    fn norm_counts_triangles() {
        let p = params(6, 2, (1, 1), (3, 10));
        let t = XiTable::<Surd>::build(&p, 3, SignalScale::Exact).unwrap();
        let u = build_dual(&t).unwrap();
        let x = t.xi(&triangle(6)).unwrap();
        assert_eq!(u.norm_squared, Surd::one() + Surd::integer(20) * x.clone() * x);
    }

    #[test]
    fn small_degree_and_zero_signal_give_unit_norm() {
        let p = params(6, 2, (1, 1), (3, 10));
        let u = build_dual(&XiTable::<Surd>::build(&p, 2, SignalScale::Exact).unwrap()).unwrap();
        assert_eq!(u.norm_squared, Surd::one());
        let p0 = params(6, 3, (1, 1), (0, 1));
        let u0 = build_dual(&XiTable::<Surd>::build(&p0, 6, SignalScale::Exact).unwrap()).unwrap();
        assert_eq!(u0.norm_squared, Surd::one());
    }

    #[test]
    fn multiplicative_over_disjoint_unions() {
        let p = params(8, 2, (1, 1), (2, 5));
        let t = XiTable::<Surd>::build(&p, 6, SignalScale::Exact).unwrap();
        let two = LabeledGraph::from_edges(8, [(0, 1), (1, 2), (0, 2), (3, 4), (4, 5), (3, 5)]).unwrap();
        let x = t.xi(&triangle(8)).unwrap();
        assert_eq!(t.xi(&two).unwrap(), x.clone() * x);
    }

    #[test]
    fn linear_system_small_exact() {
        let p = params(4, 2, (1, 1), (2, 5));
        let t = XiTable::<Surd>::build(&p, 3, SignalScale::Exact).unwrap();
        let r = verify_linear_system(&t, &p).unwrap();
        assert!(
            r.all_exact_zero,
            "{:?}",
            r.residuals.iter().filter(|x| !x.exact_zero).collect::<Vec<_>>()
        );
        let s = verify_linear_system_simplified(&t).unwrap();
        assert!(s.all_exact_zero);
    }

    #[test]
    fn duality_trivial_cases() {
        let p0 = params(4, 2, (1, 1), (0, 1));
        let g = duality_gap(&p0, 3).unwrap();
        assert!((g.exact - 1.0).abs() < 1e-12 && (g.dual_norm - 1.0).abs() < 1e-12);
        let p = params(4, 2, (1, 1), (2, 5));
        let r = reversed_advantage_exact::<BigRational>(&p, 0).unwrap();
        assert_eq!(r.value, 1.0);
        let g = duality_gap(&p, 3).unwrap();
        assert!(g.holds, "{g:?}");
    }

    #[test]
    fn parseval_direction() {
        let p = params(3, 2, (1, 1), (1, 2));
        let r = |a: i64, b: i64| BigRational::new(a.into(), b.into());
        let coeffs = vec![(0b000, r(1, 1)), (0b001, r(-2, 3)), (0b011, r(1, 5)), (0b111, r(3, 2))];
        let (lhs, rhs) = parseval_sides(&p, &coeffs).unwrap();
        assert!((lhs - rhs).to_f64() >= -1e-12);
    }
}
