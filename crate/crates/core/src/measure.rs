//! Finite probability measures with exact or floating-point weights, and the
//! enumerated model measures used by the exact computations.

use std::collections::BTreeMap;

use itertools::Itertools;

use crate::error::{invalid, Error, Result};
use crate::exact::Scalar;
use crate::graph::EdgeSpace;
use crate::models::ModelParams;

/// Outcome spaces larger than this are refused.
pub const MAX_OUTCOMES: usize = 1 << 22;

#[derive(Clone, Debug, PartialEq)]
pub struct DiscreteMeasure<T, W> {
    atoms: Vec<(T, W)>,
}

fn weight_sum<W: Scalar>(atoms: impl Iterator<Item = W>) -> W {
    atoms.fold(W::zero(), |acc, w| acc + w)
}

impl<T: Ord + Clone, W: Scalar> DiscreteMeasure<T, W> {
    /// Builds a measure, merging repeated outcomes. Weights must be
    /// non-negative and sum to one (exactly for exact weights).
    pub fn new(atoms: impl IntoIterator<Item = (T, W)>) -> Result<Self> {
        let m = Self::merged(atoms);
        for (_, w) in &m.atoms {
            if w.to_f64() < 0.0 {
                return Err(Error::Invalid(format!("negative weight {w:?}")));
            }
        }
        let total = m.total();
        if !(total.clone() - W::one()).near_zero(1e-12) {
            return Err(Error::Invalid(format!("weights sum to {total:?}, not 1")));
        }
        Ok(m)
    }

    fn merged(atoms: impl IntoIterator<Item = (T, W)>) -> Self {
        let mut map: BTreeMap<T, W> = BTreeMap::new();
        for (t, w) in atoms {
            if w.near_zero(0.0) {
                continue;
            }
            match map.get_mut(&t) {
                Some(x) => *x = x.clone() + w,
                None => {
                    map.insert(t, w);
                }
            }
        }
        DiscreteMeasure {
            atoms: map.into_iter().collect(),
        }
    }

    pub fn point_mass(t: T) -> Self {
        DiscreteMeasure {
            atoms: vec![(t, W::one())],
        }
    }

    pub fn uniform(points: impl IntoIterator<Item = T>) -> Result<Self> {
        let pts: Vec<T> = points.into_iter().collect();
        if pts.is_empty() {
            return Err(Error::Invalid("uniform measure on an empty set".into()));
        }
        let w = W::ratio(1, pts.len() as i64);
        Self::new(pts.into_iter().map(|t| (t, w.clone())))
    }

    pub fn atoms(&self) -> &[(T, W)] {
        &self.atoms
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn total(&self) -> W {
        weight_sum(self.atoms.iter().map(|(_, w)| w.clone()))
    }

    pub fn mass_of(&self, t: &T) -> W {
        match self.atoms.binary_search_by(|(x, _)| x.cmp(t)) {
            Ok(i) => self.atoms[i].1.clone(),
            Err(_) => W::zero(),
        }
    }

    pub fn mass(&self, pred: impl Fn(&T) -> bool) -> W {
        weight_sum(self.atoms.iter().filter(|(t, _)| pred(t)).map(|(_, w)| w.clone()))
    }

    pub fn expectation(&self, f: impl Fn(&T) -> W) -> W {
        weight_sum(self.atoms.iter().map(|(t, w)| w.clone() * f(t)))
    }

    /// The measure conditioned on `pred`; an error when the event has no mass.
    pub fn condition(&self, pred: impl Fn(&T) -> bool) -> Result<Self> {
        let z = self.mass(&pred);
        if z.near_zero(0.0) {
            return Err(Error::Degenerate("conditioning on an event of probability zero".into()));
        }
        Ok(DiscreteMeasure {
            atoms: self
                .atoms
                .iter()
                .filter(|(t, _)| pred(t))
                .map(|(t, w)| (t.clone(), w.clone() / z.clone()))
                .collect(),
        })
    }

    /// Push-forward under `f`.
    pub fn map<U: Ord + Clone>(&self, f: impl Fn(&T) -> U) -> DiscreteMeasure<U, W> {
        DiscreteMeasure::merged(self.atoms.iter().map(|(t, w)| (f(t), w.clone())))
    }

    pub fn product<U: Ord + Clone>(&self, other: &DiscreteMeasure<U, W>) -> DiscreteMeasure<(T, U), W> {
        let atoms = self
            .atoms
            .iter()
            .flat_map(|(t, w)| {
                other
                    .atoms
                    .iter()
                    .map(move |(u, v)| ((t.clone(), u.clone()), w.clone() * v.clone()))
            })
            .collect();
        DiscreteMeasure { atoms }
    }

    /// `Σ wᵢ μᵢ` for weights summing to one.
    pub fn mixture(parts: &[(W, DiscreteMeasure<T, W>)]) -> Result<Self> {
        Self::new(
            parts
                .iter()
                .flat_map(|(c, m)| m.atoms.iter().map(move |(t, w)| (t.clone(), c.clone() * w.clone()))),
        )
    }

    pub fn to_f64(&self) -> DiscreteMeasure<T, f64> {
        DiscreteMeasure {
            atoms: self.atoms.iter().map(|(t, w)| (t.clone(), w.to_f64())).collect(),
        }
    }

    /// `E_self[(dself/dother)²]`, i.e. one plus the chi-square divergence.
    pub fn second_moment_ratio(&self, other: &DiscreteMeasure<T, W>) -> Result<W> {
        let mut out = W::zero();
        for (t, w) in &self.atoms {
            let v = other.mass_of(t);
            if v.near_zero(0.0) {
                return Err(Error::Degenerate(format!(
                    "outcome with null mass {v:?} but alternative mass {w:?}"
                )));
            }
            out = out + w.clone() * w.clone() / v;
        }
        Ok(out)
    }
}

/// `E[∏_{i ∈ S} xᵢ]` for every coordinate set `S ⊆ [dim]`, indexed by the mask of `S`.
pub fn monomial_moments<W: Scalar>(m: &DiscreteMeasure<u64, W>, dim: usize) -> Result<Vec<W>> {
    if dim > 22 {
        return Err(Error::TooLarge(format!("moment table over {dim} coordinates")));
    }
    let mut f = vec![W::zero(); 1 << dim];
    for (x, w) in m.atoms() {
        if *x >> dim != 0 {
            return Err(Error::Invalid(format!(
                "outcome {x:#x} has bits beyond {dim} coordinates"
            )));
        }
        f[*x as usize] = f[*x as usize].clone() + w.clone();
    }
    // Superset sums: f[S] becomes the mass of all outcomes containing S.
    for i in 0..dim {
        for s in 0..f.len() {
            if s >> i & 1 == 0 {
                let add = f[s | 1 << i].clone();
                f[s] = f[s].clone() + add;
            }
        }
    }
    Ok(f)
}

/// Independent Bernoulli(`q`) coordinates.
pub fn bernoulli_product<W: Scalar>(dim: usize, q: &W) -> Result<DiscreteMeasure<u64, W>> {
    if dim > 22 {
        return Err(Error::TooLarge(format!("product measure over {dim} coordinates")));
    }
    let qc = W::one() - q.clone();
    let qp: Vec<W> = (0..=dim as u32).map(|i| q.powi(i)).collect();
    let qcp: Vec<W> = (0..=dim as u32).map(|i| qc.powi(i)).collect();
    let atoms = (0..1u64 << dim).map(|x| {
        let ones = x.count_ones() as usize;
        (x, qp[ones].clone() * qcp[dim - ones].clone())
    });
    Ok(DiscreteMeasure::merged(atoms))
}

/// Expands a product of independent per-item distributions over small states.
fn expand<W: Scalar, K: Ord + Clone>(
    start: K,
    items: usize,
    states: impl Fn(usize) -> Vec<(W, Box<dyn Fn(&K) -> K>)>,
) -> Vec<(K, W)> {
    let mut cur = vec![(start, W::one())];
    for i in 0..items {
        let st = states(i);
        let mut next = Vec::with_capacity(cur.len() * st.len());
        for (k, w) in &cur {
            for (p, f) in &st {
                if !p.near_zero(0.0) {
                    next.push((f(k), w.clone() * p.clone()));
                }
            }
        }
        cur = next;
    }
    cur
}

/// `G(n, q)` over edge masks of the complete graph on `n` vertices.
pub fn er_measure<W: Scalar>(n: usize, q: &W) -> Result<DiscreteMeasure<u64, W>> {
    let es = EdgeSpace::new(n)?;
    bernoulli_product(es.num_edges(), q)
}

/// All permutations of `[n]` in lexicographic order.
pub fn permutations(n: usize) -> Vec<Vec<usize>> {
    (0..n).permutations(n).collect()
}

pub const PAIR_MAX_N: usize = 4;

/// A condition `π*(i) = j` on the hidden permutation.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PermCondition {
    pub i: usize,
    pub j: usize,
}

/// Joint law of (π*, A, B) for the correlated Erdős–Rényi model. Outcomes are
/// `(permutation index, mask)` with `mask = A | B << E`, `E = n(n−1)/2`;
/// permutation indices follow [`permutations`]. Optionally restricted to
/// permutations satisfying a condition and to parent graphs in an event.
pub fn correlated_er_joint<W: Scalar>(
    params: &ModelParams,
    condition: Option<PermCondition>,
    parent_event: Option<&dyn Fn(u64) -> bool>,
) -> Result<DiscreteMeasure<(usize, u64), W>> {
    let n = params.n;
    if n > PAIR_MAX_N {
        return Err(Error::TooLarge(format!(
            "pair enumeration needs n ≤ {PAIR_MAX_N}, got {n}"
        )));
    }
    if let Some(c) = condition {
        if c.i >= n || c.j >= n {
            return Err(invalid(
                "condition",
                format!("π({})={} out of range for n={n}", c.i, c.j),
            ));
        }
    }
    let p = W::from_number(&params.p()?)?;
    let s = W::from_number(&params.s()?)?;
    let es = EdgeSpace::new(n)?;
    let e = es.num_edges();
    let perms = permutations(n);
    let chosen: Vec<usize> = (0..perms.len())
        .filter(|&i| condition.map_or(true, |c| perms[i][c.i] == c.j))
        .collect();
    let pw = W::ratio(1, chosen.len() as i64);
    let sc = W::one() - s.clone();
    let mut atoms = Vec::new();
    for &pi_idx in &chosen {
        let pi = &perms[pi_idx];
        let bidx: Vec<usize> = (0..e)
            .map(|i| {
                let (u, v) = es.pair(i);
                es.index(pi[u], pi[v])
            })
            .collect();
        // Keys carry (G mask, pair mask).
        let states = |i: usize| -> Vec<(W, Box<dyn Fn(&(u64, u64)) -> (u64, u64)>)> {
            let a = 1u64 << i;
            let b = 1u64 << (e + bidx[i]);
            let g = 1u64 << i;
            vec![
                (W::one() - p.clone(), Box::new(|k: &(u64, u64)| *k)),
                (
                    p.clone() * sc.clone() * sc.clone(),
                    Box::new(move |k: &(u64, u64)| (k.0 | g, k.1)),
                ),
                (
                    p.clone() * s.clone() * sc.clone(),
                    Box::new(move |k: &(u64, u64)| (k.0 | g, k.1 | a)),
                ),
                (
                    p.clone() * sc.clone() * s.clone(),
                    Box::new(move |k: &(u64, u64)| (k.0 | g, k.1 | b)),
                ),
                (
                    p.clone() * s.clone() * s.clone(),
                    Box::new(move |k: &(u64, u64)| (k.0 | g, k.1 | a | b)),
                ),
            ]
        };
        for ((gm, pm), w) in expand((0u64, 0u64), e, states) {
            if parent_event.map_or(true, |f| f(gm)) {
                atoms.push(((pi_idx, pm), w * pw.clone()));
            }
        }
    }
    let m = DiscreteMeasure::merged(atoms);
    let z = m.total();
    if z.near_zero(0.0) {
        return Err(Error::Degenerate("the parent event has probability zero".into()));
    }
    Ok(DiscreteMeasure {
        atoms: m.atoms.into_iter().map(|(t, w)| (t, w / z.clone())).collect(),
    })
}

/// Law of the pair `(A, B)` (as `A | B << E`) with π* averaged out.
pub fn correlated_er_pairs<W: Scalar>(
    params: &ModelParams,
    condition: Option<PermCondition>,
) -> Result<DiscreteMeasure<u64, W>> {
    Ok(correlated_er_joint::<W>(params, condition, None)?.map(|(_, m)| *m))
}

/// The labeling encoded by `code` in base `k`, vertex 0 least significant.
pub fn decode_labels(code: u64, n: usize, k: usize) -> Vec<usize> {
    let mut c = code;
    (0..n)
        .map(|_| {
            let l = (c % k as u64) as usize;
            c /= k as u64;
            l
        })
        .collect()
}

pub fn encode_labels(labels: &[usize], k: usize) -> u64 {
    labels.iter().rev().fold(0u64, |acc, &l| acc * k as u64 + l as u64)
}

pub const SBM_MAX_OUTCOMES: usize = 1 << 20;

/// Joint law of (σ*, G) for the block model, outcomes `(label code, edge mask)`.
pub fn sbm_joint<W: Scalar>(params: &ModelParams) -> Result<DiscreteMeasure<(u64, u64), W>> {
    params.validate()?;
    let n = params.n;
    let k = params.k()?;
    let es = EdgeSpace::new(n)?;
    let e = es.num_edges();
    let labelings = (k as u64).checked_pow(n as u32).unwrap_or(u64::MAX);
    if labelings.saturating_mul(1 << e) > SBM_MAX_OUTCOMES as u64 {
        return Err(Error::TooLarge(format!("{labelings} labelings × 2^{e} graphs")));
    }
    let (same, diff) = params.sbm_probabilities()?;
    let same = W::from_number(&same)?;
    let diff = W::from_number(&diff)?;
    let lw = W::ratio(1, labelings as i64);
    let mut atoms = Vec::new();
    for code in 0..labelings {
        let sigma = decode_labels(code, n, k);
        let probs: Vec<W> = (0..e)
            .map(|i| {
                let (u, v) = es.pair(i);
                if sigma[u] == sigma[v] {
                    same.clone()
                } else {
                    diff.clone()
                }
            })
            .collect();
        let graphs = expand(0u64, e, |i| -> Vec<(W, Box<dyn Fn(&u64) -> u64>)> {
            vec![
                (W::one() - probs[i].clone(), Box::new(|m: &u64| *m)),
                (probs[i].clone(), Box::new(move |m: &u64| *m | 1 << i)),
            ]
        });
        for (m, w) in graphs {
            atoms.push(((code, m), w * lw.clone()));
        }
    }
    DiscreteMeasure::new(atoms)
}

/// Graph marginal of the block model.
pub fn sbm_graph_measure<W: Scalar>(params: &ModelParams) -> Result<DiscreteMeasure<u64, W>> {
    Ok(sbm_joint::<W>(params)?.map(|(_, m)| *m))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::Number;
    use num_rational::BigRational;

    type Q = BigRational;

    fn r(a: i64, b: i64) -> Q {
        Q::new(a.into(), b.into())
    }

    #[test]
    fn product_measure_moments() {
        let m = bernoulli_product(3, &r(1, 3)).unwrap();
        assert_eq!(m.total(), r(1, 1));
        let mom = monomial_moments(&m, 3).unwrap();
        assert_eq!(mom[0b101], r(1, 9));
        assert_eq!(mom[0], r(1, 1));
    }

    #[test]
    fn pair_marginals_and_correlation() {
        let params =
            ModelParams::correlated_er_q_rho(3, Number::parse("1/3").unwrap(), Number::parse("1/2").unwrap()).unwrap();
        let m = correlated_er_pairs::<Q>(&params, None).unwrap();
        assert_eq!(m.total(), r(1, 1));
        let mom = monomial_moments(&m, 6).unwrap();
        // Each observed edge is present with probability q = ps.
        for i in 0..6 {
            assert_eq!(mom[1 << i], r(1, 3));
        }
        // Under the identity-averaged coupling, A_e and B_f agree on e with probability 1/3.
        let joint = correlated_er_joint::<Q>(&params, None, None).unwrap();
        assert_eq!(joint.len() > m.len(), true);
        let p11 = r(1, 2) * r(2, 3) * r(2, 3);
        let direct = joint.expectation(|(pi, mask)| {
            let perms = permutations(3);
            let es = EdgeSpace::new(3).unwrap();
            let b = es.index(perms[*pi][0], perms[*pi][1]);
            if mask & 1 == 1 && mask >> (3 + b) & 1 == 1 {
                r(1, 1)
            } else {
                r(0, 1)
            }
        });
        assert_eq!(direct, p11);
    }

    #[test]
    fn conditioning_renormalizes() {
        let params =
            ModelParams::correlated_er(3, Number::parse("1/2").unwrap(), Number::parse("2/3").unwrap()).unwrap();
        let c = correlated_er_pairs::<Q>(&params, Some(PermCondition { i: 0, j: 1 })).unwrap();
        assert_eq!(c.total(), r(1, 1));
        let none = correlated_er_joint::<Q>(&params, None, Some(&|_| false));
        assert!(matches!(none, Err(Error::Degenerate(_))));
    }

    #[test]
    fn labels_round_trip() {
        for code in 0..81 {
            let l = decode_labels(code, 4, 3);
            assert_eq!(encode_labels(&l, 3), code);
        }
    }

    #[test]
    fn sbm_with_no_signal_is_er() {
        let params = ModelParams::sbm(3, 2, Number::int(1), Number::int(0)).unwrap();
        let g = sbm_graph_measure::<Q>(&params).unwrap();
        let er = er_measure(3, &r(1, 3)).unwrap();
        assert_eq!(g, er);
    }

    #[test]
    fn chi_square_of_identical_measures_is_one() {
        let er = er_measure(3, &r(1, 4)).unwrap();
        assert_eq!(er.second_moment_ratio(&er).unwrap(), r(1, 1));
    }
}
