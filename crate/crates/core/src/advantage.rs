//! Low-degree advantages on enumerable measures.
//!
//! Outcomes are bit vectors (`u64` masks over `dim` coordinates) and the
//! polynomial class is spanned by the monomials of degree at most `D`. The
//! advantage is `‖projection of dp/dq‖`, computed either in the orthonormal
//! product basis (when `q` is a product Bernoulli measure), by Gram–Schmidt on
//! the monomials, or as the Rayleigh quotient `√(cᵀA⁺c)`.

use nalgebra::{DMatrix, DVector};
use num_rational::BigRational;
use num_traits::Zero;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::basis::centered_moment;
use crate::error::{invalid, Error, Result};
use crate::exact::{Number, Scalar};
use crate::graph::EdgeSpace;
use crate::measure::{
    bernoulli_product, correlated_er_joint, monomial_moments, permutations, DiscreteMeasure, PermCondition,
};
use crate::models::ModelParams;

/// Scalars that can appear in a report.
pub trait Weight: Scalar {
    fn to_number(&self) -> Number;
}

impl Weight for f64 {
    fn to_number(&self) -> Number {
        Number::float(*self)
    }
}

impl Weight for BigRational {
    fn to_number(&self) -> Number {
        Number::from_rational(self.clone())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AdvantageMethod {
    ProductBasis,
    GramSchmidt,
    Rayleigh,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Contribution {
    /// Coordinate mask of the basis element (product basis) or monomial.
    pub index: u64,
    pub value: Number,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AdvantageReport {
    pub degree: usize,
    pub value: f64,
    pub value_squared: Number,
    pub method: AdvantageMethod,
    /// Squared projections, nonzero ones only.
    pub contributions: Vec<Contribution>,
}

impl AdvantageReport {
    fn new<W: Weight>(degree: usize, method: AdvantageMethod, sq: W, contributions: Vec<(u64, W)>) -> Self {
        AdvantageReport {
            degree,
            value: sq.to_f64().max(0.0).sqrt(),
            value_squared: sq.to_number(),
            method,
            contributions: contributions
                .into_iter()
                .filter(|(_, w)| !w.near_zero(0.0))
                .map(|(index, w)| Contribution {
                    index,
                    value: w.to_number(),
                })
                .collect(),
        }
    }

    pub fn exact_squared(&self) -> Option<&BigRational> {
        self.value_squared.exact()
    }
}

/// Masks over `dim` coordinates with at most `d` bits, by degree then value.
pub fn monomials(dim: usize, d: usize) -> Vec<u64> {
    let mut out: Vec<u64> = (0..1u64 << dim).filter(|m| m.count_ones() as usize <= d).collect();
    out.sort_by_key(|m| (m.count_ones(), *m));
    out
}

fn check_dim(dim: usize) -> Result<()> {
    if dim > 22 {
        return Err(Error::TooLarge(format!("{dim} coordinates (limit 22)")));
    }
    Ok(())
}

/// The density of `q` if it is the product of identical Bernoulli coordinates.
pub fn product_density<W: Scalar>(q: &DiscreteMeasure<u64, W>, dim: usize) -> Result<W> {
    check_dim(dim)?;
    let q0 = q.mass(|x| x & 1 == 1);
    if q0.near_zero(0.0) || (W::one() - q0.clone()).near_zero(0.0) {
        return Err(Error::Degenerate("null coordinate is constant".into()));
    }
    let prod = bernoulli_product(dim, &q0)?;
    if prod.len() != q.len() {
        return Err(invalid("q", "not a product Bernoulli measure; use gram_schmidt"));
    }
    for ((x, w), (y, v)) in q.atoms().iter().zip(prod.atoms()) {
        if x != y || !(w.clone() - v.clone()).near_zero(1e-12) {
            return Err(invalid("q", "not a product Bernoulli measure; use gram_schmidt"));
        }
    }
    Ok(q0)
}

/// `Adv² = Σ_{|S| ≤ D} E_p[φ_S]²` in the orthonormal basis of the product null.
pub fn advantage_product_basis<W: Weight>(
    p: &DiscreteMeasure<u64, W>,
    q: &DiscreteMeasure<u64, W>,
    dim: usize,
    d: usize,
) -> Result<AdvantageReport> {
    let q0 = product_density(q, dim)?;
    let var = q0.clone() * (W::one() - q0.clone());
    let idx = monomials(dim, d);
    let contributions: Vec<(u64, W)> = idx
        .par_iter()
        .map(|&s| {
            let c = centered_moment(p, s, &q0);
            (s, c.clone() * c / var.powi(s.count_ones()))
        })
        .collect();
    let total = contributions.iter().fold(W::zero(), |acc, (_, w)| acc + w.clone());
    Ok(AdvantageReport::new(
        d,
        AdvantageMethod::ProductBasis,
        total,
        contributions,
    ))
}

/// Gram–Schmidt on the features in order, given their Gram matrix under `q`
/// and their means under `p`. Returns `(Σ E_p[f_α]², per-feature terms)`.
/// Null directions (zero norm under `q`) are dropped; one with nonzero mean
/// under `p` makes the advantage unbounded.
pub fn gram_schmidt_projection<W: Scalar>(mut gram: Vec<Vec<W>>, mut target: Vec<W>) -> Result<(W, Vec<W>)> {
    let f = target.len();
    if gram.len() != f || gram.iter().any(|r| r.len() != f) {
        return Err(Error::Invalid("Gram matrix and target sizes differ".into()));
    }
    let scale = gram
        .iter()
        .enumerate()
        .map(|(i, r)| r[i].to_f64().abs())
        .fold(1.0, f64::max);
    let mut terms = vec![W::zero(); f];
    let mut total = W::zero();
    for i in 0..f {
        let piv = gram[i][i].clone();
        let null = if W::EXACT {
            piv.near_zero(0.0)
        } else {
            piv.to_f64() <= 1e-10 * scale
        };
        if null {
            let residual_mean = target[i].to_f64().abs();
            if (W::EXACT && !target[i].near_zero(0.0)) || (!W::EXACT && residual_mean > 1e-8) {
                return Err(Error::Unbounded(format!(
                    "feature {i} vanishes under the null but has mean {residual_mean} under the alternative"
                )));
            }
            continue;
        }
        let ti = target[i].clone();
        terms[i] = ti.clone() * ti.clone() / piv.clone();
        total = total + terms[i].clone();
        let row: Vec<W> = gram[i].clone();
        for j in i + 1..f {
            if row[j].near_zero(0.0) {
                continue;
            }
            let factor = row[j].clone() / piv.clone();
            target[j] = target[j].clone() - factor.clone() * ti.clone();
            for l in i + 1..f {
                if !row[l].near_zero(0.0) {
                    gram[j][l] = gram[j][l].clone() - factor.clone() * row[l].clone();
                }
            }
        }
    }
    Ok((total, terms))
}

fn monomial_system<W: Scalar>(
    p: &DiscreteMeasure<u64, W>,
    q: &DiscreteMeasure<u64, W>,
    dim: usize,
    feats: &[u64],
) -> Result<(Vec<Vec<W>>, Vec<W>)> {
    let mp = monomial_moments(p, dim)?;
    let mq = monomial_moments(q, dim)?;
    let gram = feats
        .iter()
        .map(|&a| feats.iter().map(|&b| mq[(a | b) as usize].clone()).collect())
        .collect();
    let target = feats.iter().map(|&a| mp[a as usize].clone()).collect();
    Ok((gram, target))
}

/// Gram–Schmidt on the monomials of degree at most `d`, starting from 1.
pub fn advantage_gram_schmidt<W: Weight>(
    p: &DiscreteMeasure<u64, W>,
    q: &DiscreteMeasure<u64, W>,
    dim: usize,
    d: usize,
) -> Result<AdvantageReport> {
    check_dim(dim)?;
    let feats = monomials(dim, d);
    let (gram, target) = monomial_system(p, q, dim, &feats)?;
    let (total, terms) = gram_schmidt_projection(gram, target)?;
    Ok(AdvantageReport::new(
        d,
        AdvantageMethod::GramSchmidt,
        total,
        feats.into_iter().zip(terms).collect(),
    ))
}

/// Gram–Schmidt for measures on arbitrary outcomes with explicit features.
pub fn advantage_gram_schmidt_features<T: Ord + Clone, W: Weight>(
    p: &DiscreteMeasure<T, W>,
    q: &DiscreteMeasure<T, W>,
    features: &[&(dyn Fn(&T) -> W + Sync)],
    degree: usize,
) -> Result<AdvantageReport> {
    let gram = features
        .iter()
        .map(|fa| features.iter().map(|fb| q.expectation(|t| fa(t) * fb(t))).collect())
        .collect();
    let target = features.iter().map(|fa| p.expectation(|t| fa(t))).collect();
    let (total, terms) = gram_schmidt_projection(gram, target)?;
    Ok(AdvantageReport::new(
        degree,
        AdvantageMethod::GramSchmidt,
        total,
        terms.into_iter().enumerate().map(|(i, w)| (i as u64, w)).collect(),
    ))
}

/// `√(cᵀA⁺c)` with `A` the monomial Gram matrix under `q` and `c` the means under `p`.
pub fn advantage_rayleigh(
    p: &DiscreteMeasure<u64, f64>,
    q: &DiscreteMeasure<u64, f64>,
    dim: usize,
    d: usize,
) -> Result<AdvantageReport> {
    check_dim(dim)?;
    let feats = monomials(dim, d);
    let (gram, target) = monomial_system(p, q, dim, &feats)?;
    let f = feats.len();
    let a = DMatrix::from_fn(f, f, |i, j| gram[i][j]);
    let c = DVector::from_vec(target);
    let eig = a.symmetric_eigen();
    let top = eig.eigenvalues.iter().copied().fold(0.0, f64::max);
    let mut total = 0.0;
    for (i, &lam) in eig.eigenvalues.iter().enumerate() {
        let proj = eig.eigenvectors.column(i).dot(&c);
        if lam <= 1e-10 * top.max(1.0) {
            if proj.abs() > 1e-8 {
                return Err(Error::Unbounded("target has a component in the null space".into()));
            }
            continue;
        }
        total += proj * proj / lam;
    }
    Ok(AdvantageReport::new(d, AdvantageMethod::Rayleigh, total, Vec::new()))
}

/// Closed form `E_{P_π}[φ_{S₁,S₂}] = ρ^{|S₁|}·1{π(S₁) = S₂}` on pair masks.
fn planted_pair_moment<W: Scalar>(es: &EdgeSpace, pi: &[usize], idx: u64, rho: &W) -> W {
    let e = es.num_edges();
    let s1 = idx & ((1u64 << e) - 1);
    let s2 = idx >> e;
    if es.permute(s1, pi) == s2 {
        rho.powi(s1.count_ones())
    } else {
        W::zero()
    }
}

/// Advantage of the correlated Erdős–Rényi pair law, optionally conditioned on
/// `π*(i) = j`, against `G(n, q) ⊗ G(n, q)`, in the product basis.
pub fn conditional_advantage<W: Weight>(
    params: &ModelParams,
    d: usize,
    condition: Option<PermCondition>,
) -> Result<AdvantageReport> {
    let e = EdgeSpace::new(params.n)?.num_edges();
    let p = crate::measure::correlated_er_pairs::<W>(params, condition)?;
    let q = bernoulli_product(2 * e, &W::from_number(&params.q()?)?)?;
    advantage_product_basis(&p, &q, 2 * e, d)
}

/// Compares, for every index of degree at most `d`, the conditional moment
/// computed from the conditioned pair law with the average of the closed-form
/// per-permutation moments over the permutations meeting the condition.
pub fn grouped_permutation_check(params: &ModelParams, d: usize, condition: Option<PermCondition>) -> Result<bool> {
    let es = EdgeSpace::new(params.n)?;
    let e = es.num_edges();
    let q = BigRational::from_number(&params.q()?)?;
    let rho = BigRational::from_number(&params.rho()?)?;
    let var = q.clone() * (BigRational::from_integer(1.into()) - q.clone());
    let joint = correlated_er_joint::<BigRational>(params, condition, None)?;
    let pairs = joint.map(|(_, m)| *m);
    let perms = permutations(params.n);
    let chosen: Vec<&Vec<usize>> = perms
        .iter()
        .filter(|pi| condition.map_or(true, |c| pi[c.i] == c.j))
        .collect();
    for idx in monomials(2 * e, d) {
        let direct = centered_moment(&pairs, idx, &q);
        let mut grouped = <BigRational as Zero>::zero();
        for pi in &chosen {
            grouped += planted_pair_moment(&es, pi, idx, &rho);
        }
        grouped /= BigRational::from_integer((chosen.len() as i64).into());
        // φ carries (q(1−q))^{−deg/2}; a nonzero closed form has degree 2|S₁|.
        let half = idx.count_ones() / 2;
        let scaled = if idx.count_ones() % 2 == 0 {
            grouped * var.powi(half)
        } else {
            grouped
        };
        if direct != scaled {
            return Ok(false);
        }
    }
    Ok(true)
}

#[derive(Clone, Debug, PartialEq)]
pub struct HiddenSampleProblem<W> {
    pub base_null: DiscreteMeasure<u64, W>,
    pub base_alt: DiscreteMeasure<u64, W>,
    /// Bits per coordinate sample.
    pub dim: usize,
    pub m: usize,
}

/// `M = min(n, ⌈ε^{−1/2}⌉)`.
pub fn hidden_sample_size(n: usize, error_rate: f64) -> Result<usize> {
    if !(error_rate > 0.0 && error_rate <= 1.0) {
        return Err(invalid("error_rate", format!("{error_rate} not in (0, 1]")));
    }
    Ok(n.min(error_rate.powf(-0.5).ceil() as usize).max(1))
}

pub fn build_hidden_sample<W: Scalar>(
    base_null: DiscreteMeasure<u64, W>,
    base_alt: DiscreteMeasure<u64, W>,
    dim: usize,
    m: usize,
) -> Result<HiddenSampleProblem<W>> {
    if m == 0 {
        return Err(invalid("M", "must be at least 1"));
    }
    if dim * m > 22 {
        return Err(Error::TooLarge(format!("{m} samples of {dim} bits")));
    }
    for x in base_null.atoms().iter().chain(base_alt.atoms()).map(|(x, _)| *x) {
        if x >> dim != 0 {
            return Err(invalid("base", format!("outcome {x:#x} exceeds {dim} bits")));
        }
    }
    Ok(HiddenSampleProblem {
        base_null,
        base_alt,
        dim,
        m,
    })
}

impl<W: Scalar> HiddenSampleProblem<W> {
    fn block(&self, y: u64, i: usize) -> u64 {
        (y >> (i * self.dim)) & ((1u64 << self.dim) - 1)
    }

    fn product(&self, plant: Option<usize>) -> DiscreteMeasure<u64, W> {
        let mut cur = DiscreteMeasure::point_mass(0u64);
        for i in 0..self.m {
            let base = if plant == Some(i) {
                &self.base_alt
            } else {
                &self.base_null
            };
            cur = cur.product(base).map(|(y, x)| y | x << (i * self.dim));
        }
        cur
    }

    pub fn composite_null(&self) -> DiscreteMeasure<u64, W> {
        self.product(None)
    }

    /// Uniform position `κ`, alternative at `κ`, null elsewhere.
    pub fn composite_alt(&self) -> Result<DiscreteMeasure<u64, W>> {
        let w = W::ratio(1, self.m as i64);
        let parts: Vec<(W, DiscreteMeasure<u64, W>)> =
            (0..self.m).map(|i| (w.clone(), self.product(Some(i)))).collect();
        DiscreteMeasure::mixture(&parts)
    }

    /// `(1/M) Σᵢ dP′/dQ′(yᵢ)`.
    pub fn likelihood_ratio(&self, y: u64) -> Result<W> {
        let mut sum = W::zero();
        for i in 0..self.m {
            let x = self.block(y, i);
            let qv = self.base_null.mass_of(&x);
            let pv = self.base_alt.mass_of(&x);
            if qv.near_zero(0.0) {
                return Err(Error::Degenerate(format!("outcome {x:#x} has null mass zero")));
            }
            sum = sum + pv / qv;
        }
        Ok(sum / W::from_i64(self.m as i64))
    }
}

/// Gram–Schmidt advantage of the composite problem over monomials in the
/// `M·dim` composite bits.
pub fn hidden_sample_advantage<W: Weight>(problem: &HiddenSampleProblem<W>, d: usize) -> Result<AdvantageReport> {
    let q = problem.composite_null();
    let p = problem.composite_alt()?;
    advantage_gram_schmidt(&p, &q, problem.dim * problem.m, d)
}

#[cfg(test)]
mod tests {
    use super::*;

    type Q = BigRational;

    fn r(a: i64, b: i64) -> Q {
        Q::new(a.into(), b.into())
    }

    fn two_point(p1: Q) -> DiscreteMeasure<u64, Q> {
        DiscreteMeasure::new([(0u64, r(1, 1) - p1.clone()), (1u64, p1)]).unwrap()
    }

    #[test]
    fn identical_measures_have_unit_advantage() {
        let q = bernoulli_product(4, &r(1, 3)).unwrap();
        for d in 0..=4 {
            let a = advantage_product_basis(&q, &q, 4, d).unwrap();
            assert_eq!(a.exact_squared().unwrap(), &r(1, 1));
            let g = advantage_gram_schmidt(&q, &q, 4, d).unwrap();
            assert_eq!(g.exact_squared().unwrap(), &r(1, 1));
        }
    }

    #[test]
    fn two_point_gram_schmidt() {
        let q = two_point(r(1, 2));
        let p = two_point(r(4, 5));
        let a = advantage_gram_schmidt(&p, &q, 1, 1).unwrap();
        assert_eq!(a.exact_squared().unwrap(), &r(34, 25));
        let d0 = advantage_gram_schmidt(&p, &q, 1, 0).unwrap();
        assert_eq!(d0.exact_squared().unwrap(), &r(1, 1));
    }

    #[test]
    fn null_direction_detection() {
        // q never sets bit 1; p does.
        let q = DiscreteMeasure::new([(0u64, r(1, 2)), (1, r(1, 2))]).unwrap();
        let p = DiscreteMeasure::new([(0u64, r(1, 2)), (2, r(1, 2))]).unwrap();
        assert!(matches!(advantage_gram_schmidt(&p, &q, 2, 1), Err(Error::Unbounded(_))));
        // The same null direction is harmless when p does not use it.
        let p = DiscreteMeasure::new([(0u64, r(1, 4)), (1, r(3, 4))]).unwrap();
        let a = advantage_gram_schmidt(&p, &q, 2, 1).unwrap();
        assert_eq!(a.exact_squared().unwrap(), &r(5, 4));
    }

    #[test]
    fn methods_agree_in_float() {
        let q = bernoulli_product(3, &0.3).unwrap();
        let p = DiscreteMeasure::new((0..8u64).map(|x| (x, (1.0 + x as f64) / 36.0))).unwrap();
        for d in 0..=3 {
            let a = advantage_product_basis(&p, &q, 3, d).unwrap().value;
            let b = advantage_gram_schmidt(&p, &q, 3, d).unwrap().value;
            let c = advantage_rayleigh(&p, &q, 3, d).unwrap().value;
            assert!((a - b).abs() < 1e-9 && (a - c).abs() < 1e-9, "{a} {b} {c}");
        }
    }

    #[test]
    fn non_product_null_is_rejected() {
        let q = DiscreteMeasure::new([(0u64, r(1, 2)), (3, r(1, 2))]).unwrap();
        assert!(advantage_product_basis(&q, &q, 2, 1).is_err());
    }

    #[test]
    fn hidden_sample_dilution() {
        let base = two_point(r(1, 2));
        let alt = two_point(r(4, 5));
        for m in [1usize, 2, 4] {
            let prob = build_hidden_sample(base.clone(), alt.clone(), 1, m).unwrap();
            let a = hidden_sample_advantage(&prob, 1).unwrap();
            let expect = r(1, 1) + r(9, 25) / r(m as i64, 1);
            assert_eq!(a.exact_squared().unwrap(), &expect);
            let pm = prob.composite_alt().unwrap();
            let qm = prob.composite_null();
            for (y, w) in pm.atoms() {
                assert_eq!(prob.likelihood_ratio(*y).unwrap(), w.clone() / qm.mass_of(y));
            }
        }
        assert_eq!(hidden_sample_size(100, 0.01).unwrap(), 10);
        assert_eq!(hidden_sample_size(5, 0.01).unwrap(), 5);
    }

    #[test]
    fn grouped_permutations_agree() {
        let params =
            ModelParams::correlated_er_q_rho(3, Number::parse("1/3").unwrap(), Number::parse("1/2").unwrap()).unwrap();
        assert!(grouped_permutation_check(&params, 3, None).unwrap());
        assert!(grouped_permutation_check(&params, 2, Some(PermCondition { i: 0, j: 1 })).unwrap());
    }
}
