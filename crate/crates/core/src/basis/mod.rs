//! Subgraph-indexed orthonormal bases and their moments.
//!
//! `φ_S(G) = ∏_{e∈S} (G_e − q)/√(q(1−q))` is orthonormal under `G(n, q)`;
//! `φ_{S₁,S₂}` is the same on the pair `(A, B)`. The planted basis
//! `ψ_{σ,S}(σ*, G) = k^{n/2}·1{σ* = σ}·∏_{e∈S} (G_e − p_e)/√(p_e(1−p_e))` with
//! `p_e = (1 + ε·ω(σ_u, σ_v))λ/n` is orthonormal under the block model.

mod labels;

use num_rational::BigRational;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::exact::{rational_to_f64, Scalar, Surd};
use crate::graph::{CanonicalForm, Edge, EdgeSpace, LabeledGraph};
use crate::measure::{decode_labels, DiscreteMeasure};
use crate::models::ModelParams;

pub use labels::{label_expectation, label_expectation_exhaustive, omega_value, LABEL_ENUMERATION_LIMIT};

pub fn omega(k: usize, a: usize, b: usize) -> Result<i64> {
    if a >= k || b >= k {
        return Err(invalid("label", format!("labels ({a}, {b}) not in [{k}]")));
    }
    Ok(if a == b { k as i64 - 1 } else { -1 })
}

/// `𝚑(a, b) = √((1 − (1+εω)λ/n)(1+εω)/(1 − λ/n))`.
pub fn h_weight(k: usize, eps: f64, lambda: f64, n: usize, a: usize, b: usize) -> Result<f64> {
    let w = omega(k, a, b)? as f64;
    let p = (1.0 + eps * w) * lambda / n as f64;
    let base = lambda / n as f64;
    if !(0.0..=1.0).contains(&p) || !(0.0..1.0).contains(&base) {
        return Err(invalid("h", format!("edge probability {p} (base {base}) out of range")));
    }
    Ok(((1.0 - p) * (1.0 + eps * w) / (1.0 - base)).sqrt())
}

/// The two values of `𝚑` and its decomposition `𝚑 = a + b·ω`.
#[derive(Clone, Debug, PartialEq)]
pub struct HWeights<S> {
    pub same: S,
    pub diff: S,
    pub a: S,
    pub b: S,
}

pub fn h_weights<S: Scalar>(params: &ModelParams) -> Result<HWeights<S>> {
    let k = params.k()?;
    let ks = S::from_i64(k as i64);
    let (ps, pd) = params.sbm_probabilities()?;
    let base = S::from_number(&params.mean_edge_probability()?)?;
    let eps = S::from_number(&params.eps()?)?;
    let one = S::one();
    let sq = |p: S, w: S| -> Result<S> {
        let v = (one.clone() - p) * (one.clone() + eps.clone() * w) / (one.clone() - base.clone());
        v.sqrt()
    };
    let same = sq(S::from_number(&ps)?, ks.clone() - one.clone())?;
    let diff = sq(S::from_number(&pd)?, S::from_i64(-1))?;
    let b = (same.clone() - diff.clone()) / ks.clone();
    let a = (same.clone() + (ks - one) * diff.clone()) / S::from_i64(k as i64);
    Ok(HWeights { same, diff, a, b })
}

impl<S: Scalar> HWeights<S> {
    pub fn at(&self, x: usize, y: usize) -> S {
        if x == y {
            self.same.clone()
        } else {
            self.diff.clone()
        }
    }
}

/// Per-edge signal factor in the cross moments.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SignalScale {
    /// `t = √(ε²λ/(n−λ))`, the value that makes the cross moments exact.
    #[default]
    Exact,
    /// `t = √(ε²λ/n)`, its large-`n` form.
    Asymptotic,
}

pub fn signal<S: Scalar>(params: &ModelParams, scale: SignalScale) -> Result<S> {
    let eps = S::from_number(&params.eps()?)?;
    let lambda = S::from_number(&params.lambda()?)?;
    let n = S::from_i64(params.n as i64);
    let den = match scale {
        SignalScale::Exact => n - lambda.clone(),
        SignalScale::Asymptotic => n,
    };
    (eps.clone() * eps * lambda / den).sqrt()
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BasisIndex {
    Single(LabeledGraph),
    Pair(LabeledGraph, LabeledGraph),
    Planted(Vec<usize>, LabeledGraph),
}

impl BasisIndex {
    pub fn degree(&self) -> usize {
        match self {
            BasisIndex::Single(s) | BasisIndex::Planted(_, s) => s.num_edges(),
            BasisIndex::Pair(a, b) => a.num_edges() + b.num_edges(),
        }
    }

    fn graphs(&self) -> Vec<&LabeledGraph> {
        match self {
            BasisIndex::Single(s) | BasisIndex::Planted(_, s) => vec![s],
            BasisIndex::Pair(a, b) => vec![a, b],
        }
    }

    pub fn validate(&self, params: &ModelParams) -> Result<()> {
        for g in self.graphs() {
            if g.n() != params.n {
                return Err(Error::AmbientMismatch(g.n(), params.n));
            }
            if !g.isolated().is_empty() {
                return Err(invalid("index", "indexed graphs must not have isolated vertices"));
            }
        }
        if let Some(d) = params.degree {
            if self.degree() > d {
                return Err(invalid("index", format!("degree {} exceeds D = {d}", self.degree())));
            }
        }
        if let BasisIndex::Planted(sigma, _) = self {
            let k = params.k()?;
            if sigma.len() != params.n || sigma.iter().any(|&l| l >= k) {
                return Err(invalid("sigma", format!("labeling must be in [{k}]^{}", params.n)));
            }
        }
        Ok(())
    }
}

pub enum BasisPoint<'a> {
    Graph(&'a LabeledGraph),
    Pair(&'a LabeledGraph, &'a LabeledGraph),
    Planted(&'a [usize], &'a LabeledGraph),
}

/// The null edge density used by `φ`: `q` when set, else `λ/n`.
pub fn null_density(params: &ModelParams) -> Result<crate::exact::Number> {
    params.q().or_else(|_| params.mean_edge_probability())
}

fn phi_factor(present: bool, q: f64) -> f64 {
    let g = if present { 1.0 } else { 0.0 };
    (g - q) / (q * (1.0 - q)).sqrt()
}

pub fn evaluate_basis(idx: &BasisIndex, point: BasisPoint<'_>, params: &ModelParams) -> Result<f64> {
    idx.validate(params)?;
    match (idx, point) {
        (BasisIndex::Single(s), BasisPoint::Graph(g)) => {
            let q = null_density(params)?.value();
            Ok(s.edges()
                .iter()
                .map(|&(u, v)| phi_factor(g.has_edge(u, v), q))
                .product())
        }
        (BasisIndex::Pair(s1, s2), BasisPoint::Pair(a, b)) => {
            let q = null_density(params)?.value();
            let fa: f64 = s1
                .edges()
                .iter()
                .map(|&(u, v)| phi_factor(a.has_edge(u, v), q))
                .product();
            let fb: f64 = s2
                .edges()
                .iter()
                .map(|&(u, v)| phi_factor(b.has_edge(u, v), q))
                .product();
            Ok(fa * fb)
        }
        (BasisIndex::Planted(sigma, s), BasisPoint::Planted(star, g)) => {
            if star.len() != params.n {
                return Err(invalid("sigma_star", "wrong length"));
            }
            if sigma.as_slice() != star {
                return Ok(0.0);
            }
            let (ps, pd) = params.sbm_probabilities()?;
            let (ps, pd) = (ps.value(), pd.value());
            let k = params.k()? as f64;
            let mut out = k.powf(params.n as f64 / 2.0);
            for &(u, v) in s.edges() {
                let p = if sigma[u] == sigma[v] { ps } else { pd };
                let x = if g.has_edge(u, v) { 1.0 } else { 0.0 };
                out *= (x - p) / (p * (1.0 - p)).sqrt();
            }
            Ok(out)
        }
        _ => Err(Error::Invalid("basis index and point kinds differ".into())),
    }
}

/// `E[∏_{i∈idx}(xᵢ − q)]` under a measure on bit vectors.
pub fn centered_moment<W: Scalar>(m: &DiscreteMeasure<u64, W>, idx: u64, q: &W) -> W {
    let d = idx.count_ones();
    let one_minus = W::one() - q.clone();
    let neg_q = W::zero() - q.clone();
    let pos: Vec<W> = (0..=d).map(|i| one_minus.powi(i)).collect();
    let neg: Vec<W> = (0..=d).map(|i| neg_q.powi(i)).collect();
    m.expectation(|x| {
        let hit = (x & idx).count_ones();
        pos[hit as usize].clone() * neg[(d - hit) as usize].clone()
    })
}

/// `(q(1−q))^{−d/2}` in the exact backend.
pub fn phi_normalization(q: &BigRational, d: u32) -> Result<Surd> {
    let var = q * (BigRational::from_integer(1.into()) - q);
    let root = Surd::sqrt_rational(&var)?;
    Ok(Surd::one() / root.powi(d))
}

/// `E_m[φ_idx]` exactly, for a measure on bit vectors with null density `q`.
pub fn phi_expectation_exact(m: &DiscreteMeasure<u64, BigRational>, idx: u64, q: &BigRational) -> Result<Surd> {
    let c = centered_moment(m, idx, q);
    Ok(phi_normalization(q, idx.count_ones())? * Surd::rational(c))
}

pub fn phi_expectation_float(m: &DiscreteMeasure<u64, f64>, idx: u64, q: f64) -> f64 {
    centered_moment(m, idx, &q) / (q * (1.0 - q)).powf(idx.count_ones() as f64 / 2.0)
}

/// `E_m[φ_a φ_b]` exactly. For bit vectors `(x−q)² = (1−2q)(x−q) + q(1−q)`,
/// but the product is evaluated directly to stay independent of that identity.
pub fn phi_pair_moment_exact(m: &DiscreteMeasure<u64, BigRational>, a: u64, b: u64, q: &BigRational) -> Result<Surd> {
    let one = BigRational::from_integer(1.into());
    let c = m.expectation(|x| {
        let mut prod = one.clone();
        for idx in [a, b] {
            let mut bits = idx;
            while bits != 0 {
                let i = bits.trailing_zeros();
                let xi = if x >> i & 1 == 1 {
                    one.clone()
                } else {
                    BigRational::from_integer(0.into())
                };
                prod *= xi - q;
                bits &= bits - 1;
            }
        }
        prod
    });
    Ok(phi_normalization(q, a.count_ones() + b.count_ones())? * Surd::rational(c))
}

/// `E[ψ_{σ,S} ψ_{σ',S'}]` under the block-model joint law, exactly.
pub fn psi_pair_moment_exact(
    joint: &DiscreteMeasure<(u64, u64), BigRational>,
    params: &ModelParams,
    first: (u64, u64),
    second: (u64, u64),
) -> Result<Surd> {
    let n = params.n;
    let k = params.k()?;
    let es = EdgeSpace::new(n)?;
    let ((c1, s1), (c2, s2)) = (first, second);
    if c1 != c2 {
        return Ok(Surd::zero());
    }
    let (ps, pd) = params.sbm_probabilities()?;
    let ps = ps
        .exact()
        .cloned()
        .ok_or_else(|| Error::Inexact("edge probability".into()))?;
    let pd = pd
        .exact()
        .cloned()
        .ok_or_else(|| Error::Inexact("edge probability".into()))?;
    let sigma = decode_labels(c1, n, k);
    let prob = |i: usize| {
        let (u, v) = es.pair(i);
        if sigma[u] == sigma[v] {
            ps.clone()
        } else {
            pd.clone()
        }
    };
    let one = BigRational::from_integer(1.into());
    let zero = BigRational::from_integer(0.into());
    let kn = BigRational::from_integer(num_bigint::BigInt::from(k).pow(n as u32));
    let num = joint.expectation(|(code, g)| {
        if *code != c1 {
            return zero.clone();
        }
        let mut prod = kn.clone();
        for idx in [s1, s2] {
            let mut bits = idx;
            while bits != 0 {
                let i = bits.trailing_zeros() as usize;
                let x = if g >> i & 1 == 1 { one.clone() } else { zero.clone() };
                prod *= x - prob(i);
                bits &= bits - 1;
            }
        }
        prod
    });
    let mut var = one.clone();
    for idx in [s1, s2] {
        let mut bits = idx;
        while bits != 0 {
            let i = bits.trailing_zeros() as usize;
            let p = prob(i);
            var *= p.clone() * (one.clone() - p);
            bits &= bits - 1;
        }
    }
    Ok(Surd::rational(num) / Surd::sqrt_rational(&var)?)
}

/// Precomputed constants of the closed-form cross moment.
#[derive(Clone, Debug)]
pub struct CrossMoment<S> {
    k: usize,
    n: usize,
    inv_sqrt_kn: S,
    hw: HWeights<S>,
    t: S,
}

impl<S: Scalar> CrossMoment<S> {
    pub fn new(params: &ModelParams, scale: SignalScale) -> Result<Self> {
        let k = params.k()?;
        let n = params.n;
        let kk = S::from_i64(k as i64);
        // k^{n/2} = k^{⌊n/2⌋}·√k for odd n.
        let mut root = kk.powi(n as u32 / 2);
        if n % 2 == 1 {
            root = root * kk.sqrt()?;
        }
        Ok(CrossMoment {
            k,
            n,
            inv_sqrt_kn: S::one() / root,
            hw: h_weights(params)?,
            t: signal(params, scale)?,
        })
    }

    pub fn weights(&self) -> &HWeights<S> {
        &self.hw
    }

    pub fn signal(&self) -> &S {
        &self.t
    }

    /// `1{H ⊆ S}·k^{−n/2}·∏_{E(H)} 𝚑·∏_{E(S)∖E(H)} t·ω`.
    pub fn eval(&self, s: &[Edge], sigma: &[usize], h: &dyn Fn(Edge) -> bool) -> S {
        let mut out = self.inv_sqrt_kn.clone();
        for &(u, v) in s {
            out = out
                * if h((u, v)) {
                    self.hw.at(sigma[u], sigma[v])
                } else {
                    self.t.clone() * omega_value::<S>(self.k, sigma[u], sigma[v])
                };
        }
        out
    }

    pub fn n(&self) -> usize {
        self.n
    }
}

/// Closed form of `E[φ_S ψ_{σ,H}]` under the block model:
/// `1{H ⊆ S}·k^{−n/2}·∏_{E(H)} 𝚑·∏_{E(S)∖E(H)} t·ω`.
pub fn cross_moment_planted<S: Scalar>(
    params: &ModelParams,
    s: &LabeledGraph,
    sigma: &[usize],
    h: &LabeledGraph,
    scale: SignalScale,
) -> Result<S> {
    let k = params.k()?;
    if sigma.len() != params.n || sigma.iter().any(|&l| l >= k) {
        return Err(invalid("sigma", "labeling out of range"));
    }
    if !h.edges().is_subset(s.edges()) {
        return Ok(S::zero());
    }
    let cm = CrossMoment::<S>::new(params, scale)?;
    let edges: Vec<Edge> = s.edges().iter().copied().collect();
    Ok(cm.eval(&edges, sigma, &|(u, v)| h.has_edge(u, v)))
}

/// `E[φ_S ψ_{σ,H}]` by summation over the enumerated joint law (exact).
pub fn cross_moment_enumerated(
    joint: &DiscreteMeasure<(u64, u64), BigRational>,
    params: &ModelParams,
    s: u64,
    sigma_code: u64,
    h: u64,
) -> Result<Surd> {
    let n = params.n;
    let k = params.k()?;
    let es = EdgeSpace::new(n)?;
    let q = null_density(params)?
        .exact()
        .cloned()
        .ok_or_else(|| Error::Inexact("null density".into()))?;
    let (ps, pd) = params.sbm_probabilities()?;
    let ps = ps
        .exact()
        .cloned()
        .ok_or_else(|| Error::Inexact("edge probability".into()))?;
    let pd = pd
        .exact()
        .cloned()
        .ok_or_else(|| Error::Inexact("edge probability".into()))?;
    let sigma = decode_labels(sigma_code, n, k);
    let prob = |i: usize| {
        let (u, v) = es.pair(i);
        if sigma[u] == sigma[v] {
            ps.clone()
        } else {
            pd.clone()
        }
    };
    let one = BigRational::from_integer(1.into());
    let zero = BigRational::from_integer(0.into());
    let bits = |m: u64| (0..es.num_edges()).filter(move |i| m >> i & 1 == 1);
    let num = joint.expectation(|(code, g)| {
        if *code != sigma_code {
            return zero.clone();
        }
        let x = |i: usize| if g >> i & 1 == 1 { one.clone() } else { zero.clone() };
        let mut prod = one.clone();
        for i in bits(s) {
            prod *= x(i) - q.clone();
        }
        for i in bits(h) {
            prod *= x(i) - prob(i);
        }
        prod
    });
    let mut var = one.clone();
    for i in bits(h) {
        let p = prob(i);
        var *= p.clone() * (one.clone() - p);
    }
    let kn = BigRational::from_integer(num_bigint::BigInt::from(k).pow(n as u32));
    let scale = Surd::sqrt_rational(&kn)? / Surd::sqrt_rational(&var)?;
    Ok(phi_normalization(&q, s.count_ones())? * scale * Surd::rational(num))
}

/// `E_ν[∏ (a + bω)]` along a path of length `l` given its end labels:
/// `a^l + b^l·ω(σ₀, σ_l)`.
pub fn path_expectation(k: usize, a: f64, b: f64, l: u32, start: usize, end: usize) -> Result<f64> {
    if l == 0 {
        return Err(invalid("l", "path length must be positive"));
    }
    Ok(a.powi(l as i32) + b.powi(l as i32) * omega(k, start, end)? as f64)
}

/// Largest `|E_ν[∏_{E(S)∖E(H)} ω | σ on V(H)]|` over all labelings of `V(H)`,
/// computed by full enumeration.
pub fn leaf_cancellation_check(s: &LabeledGraph, h: &LabeledGraph, k: usize) -> Result<BigRational> {
    if s.n() != h.n() {
        return Err(Error::AmbientMismatch(s.n(), h.n()));
    }
    if !h.is_subgraph_of(s) {
        return Err(Error::NotSubgraph("H is not contained in S".into()));
    }
    if s.leaves().is_subset(h.vertices()) {
        return Err(invalid("S", "every leaf of S lies in V(H)"));
    }
    let vs: Vec<usize> = s.support().union(h.vertices()).copied().collect();
    if vs.len() > 8 {
        return Err(Error::TooLarge(format!("{} vertices (limit 8)", vs.len())));
    }
    let fixed: Vec<usize> = vs.iter().copied().filter(|v| h.has_vertex(*v)).collect();
    let free: Vec<usize> = vs.iter().copied().filter(|v| !h.has_vertex(*v)).collect();
    let diff: Vec<Edge> = s.edges().difference(h.edges()).copied().collect();
    let kk = k as u64;
    let mut worst = BigRational::from_integer(0.into());
    let mut lab = vec![0usize; s.n()];
    for fc in 0..kk.pow(fixed.len() as u32) {
        let mut c = fc;
        for &v in &fixed {
            lab[v] = (c % kk) as usize;
            c /= kk;
        }
        let mut sum: i128 = 0;
        for rc in 0..kk.pow(free.len() as u32) {
            let mut c = rc;
            for &v in &free {
                lab[v] = (c % kk) as usize;
                c /= kk;
            }
            let mut prod: i128 = 1;
            for &(u, v) in &diff {
                prod *= if lab[u] == lab[v] { k as i128 - 1 } else { -1 };
            }
            sum += prod;
        }
        let mean = BigRational::new(sum.into(), (kk.pow(free.len() as u32) as i128).into());
        let abs = if mean < BigRational::from_integer(0.into()) {
            -mean
        } else {
            mean
        };
        if abs > worst {
            worst = abs;
        }
    }
    Ok(worst)
}

/// One row of an exported moment table.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MomentEntry {
    pub canonical_form: String,
    pub kind: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub expectation_numerator: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub expectation_denominator: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub float: Option<f64>,
}

impl MomentEntry {
    pub fn rational(form: &CanonicalForm, kind: &str, value: &BigRational) -> Self {
        MomentEntry {
            canonical_form: form.to_hex(),
            kind: kind.to_string(),
            expectation_numerator: Some(value.numer().to_string()),
            expectation_denominator: Some(value.denom().to_string()),
            float: Some(rational_to_f64(value)),
        }
    }

    pub fn float(form: &CanonicalForm, kind: &str, value: f64) -> Self {
        MomentEntry {
            canonical_form: form.to_hex(),
            kind: kind.to_string(),
            expectation_numerator: None,
            expectation_denominator: None,
            float: Some(value),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::Number;
    use crate::measure::{encode_labels, er_measure, sbm_joint};

    fn r(a: i64, b: i64) -> BigRational {
        BigRational::new(a.into(), b.into())
    }

    #[test]
    fn omega_values() {
        assert_eq!(omega(3, 1, 1).unwrap(), 2);
        assert_eq!(omega(2, 0, 1).unwrap(), -1);
        assert!(omega(2, 0, 2).is_err());
        for k in 2..6 {
            let mean: i64 = (0..k).map(|b| omega(k, 0, b).unwrap()).sum();
            assert_eq!(mean, 0);
        }
    }

    #[test]
    fn h_weight_examples() {
        for (a, b) in [(0, 0), (0, 1)] {
            assert!((h_weight(3, 0.0, 2.0, 50, a, b).unwrap() - 1.0).abs() < 1e-15);
        }
        let v = h_weight(2, 0.5, 2.0, 100, 1, 1).unwrap();
        assert!((v - ((1.0f64 - 0.03) * 1.5 / 0.98).sqrt()).abs() < 1e-15);
        let params = ModelParams::sbm(100, 2, Number::int(2), Number::parse("1/2").unwrap()).unwrap();
        let hw = h_weights::<Surd>(&params).unwrap();
        assert_eq!(hw.a.clone() + hw.b.clone(), hw.same);
        assert_eq!(hw.a.clone() - hw.b.clone(), hw.diff);
        assert!((hw.same.to_f64() - v).abs() < 1e-15);
    }

    #[test]
    fn phi_on_edge() {
        let params =
            ModelParams::correlated_er_q_rho(4, Number::parse("1/3").unwrap(), Number::parse("1/2").unwrap()).unwrap();
        let e = LabeledGraph::from_edges(4, [(0, 1)]).unwrap();
        let g = LabeledGraph::from_edges(4, [(0, 1), (2, 3)]).unwrap();
        let v = evaluate_basis(&BasisIndex::Single(e), BasisPoint::Graph(&g), &params).unwrap();
        let q: f64 = 1.0 / 3.0;
        assert!((v - (1.0 - q) / (q * (1.0 - q)).sqrt()).abs() < 1e-12);
        let empty = LabeledGraph::empty(4);
        assert_eq!(
            evaluate_basis(&BasisIndex::Single(empty), BasisPoint::Graph(&g), &params).unwrap(),
            1.0
        );
    }

    #[test]
    fn null_moments_vanish() {
        let m = er_measure(3, &r(1, 3)).unwrap();
        assert_eq!(phi_expectation_exact(&m, 0, &r(1, 3)).unwrap(), Surd::one());
        for idx in 1..8u64 {
            assert!(phi_expectation_exact(&m, idx, &r(1, 3)).unwrap().is_zero());
        }
    }

    #[test]
    fn cross_moment_closed_form_matches_enumeration() {
        let params = ModelParams::sbm(3, 2, Number::int(1), Number::parse("2/5").unwrap()).unwrap();
        let joint = sbm_joint::<BigRational>(&params).unwrap();
        let es = EdgeSpace::new(3).unwrap();
        for s in 0..8u64 {
            for h in 0..8u64 {
                for code in 0..8u64 {
                    let sigma = decode_labels(code, 3, 2);
                    let brute = cross_moment_enumerated(&joint, &params, s, code, h).unwrap();
                    let closed =
                        cross_moment_planted::<Surd>(&params, &es.graph(s), &sigma, &es.graph(h), SignalScale::Exact)
                            .unwrap();
                    assert_eq!(brute, closed, "s={s:b} h={h:b} sigma={sigma:?}");
                    assert_eq!(encode_labels(&sigma, 2), code);
                }
            }
        }
    }

    #[test]
    fn path_expectation_examples() {
        assert_eq!(path_expectation(3, 0.7, 0.0, 3, 0, 1).unwrap(), 0.7f64.powi(3));
        assert_eq!(path_expectation(2, 1.0, 1.0, 2, 1, 1).unwrap(), 2.0);
    }

    #[test]
    fn exposed_leaf_cancels() {
        let s = LabeledGraph::from_edges(3, [(0, 1)]).unwrap();
        assert_eq!(
            leaf_cancellation_check(&s, &LabeledGraph::empty(3), 2).unwrap(),
            r(0, 1)
        );
        let p = LabeledGraph::path(4, &[0, 1, 2, 3]).unwrap();
        let h = LabeledGraph::from_edges(4, [(0, 1)]).unwrap();
        assert_eq!(leaf_cancellation_check(&p, &h, 3).unwrap(), r(0, 1));
        let c3 = LabeledGraph::cycle(3, &[0, 1, 2]).unwrap();
        assert!(leaf_cancellation_check(&c3, &LabeledGraph::empty(3), 2).is_err());
    }
}
