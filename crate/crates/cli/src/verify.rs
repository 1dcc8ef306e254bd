//! Fast invariant checks bundled with the binary.

use lowdeg::advantage::{build_hidden_sample, conditional_advantage, hidden_sample_advantage};
use lowdeg::basis::{phi_pair_moment_exact, SignalScale};
use lowdeg::bounds::graph_fact_audits;
use lowdeg::certificate::{build_dual, duality_gap, verify_linear_system, xi_cycle_closed_form, XiTable};
use lowdeg::exact::{Number, Surd};
use lowdeg::graph::{rooted_tree_counts, LabeledGraph};
use lowdeg::measure::{bernoulli_product, correlated_er_pairs, er_measure, DiscreteMeasure};
use lowdeg::models::{random_permutation, trial_rng, ModelParams};
use lowdeg::reduction::{estimator_to_indicators, overlap, truncate_family, IndicatorFamily};
use lowdeg::Result;
use num_rational::BigRational;
use rand::Rng;
use serde::Serialize;

#[derive(Serialize)]
pub struct Check {
    pub name: &'static str,
    pub pass: bool,
    pub detail: String,
}

fn r(a: i64, b: i64) -> BigRational {
    BigRational::new(a.into(), b.into())
}

fn phi_orthonormal() -> Result<(bool, String)> {
    let q = r(1, 3);
    let m = er_measure(3, &q)?;
    let mut pairs = 0;
    for a in 0..8u64 {
        for b in 0..8u64 {
            let v = phi_pair_moment_exact(&m, a, b, &q)?;
            let want = if a == b { Surd::integer(1) } else { Surd::integer(0) };
            if v != want {
                return Ok((false, format!("E[φ_{a} φ_{b}] = {v}")));
            }
            pairs += 1;
        }
    }
    Ok((true, format!("{pairs} pairs on 3 vertices")))
}

fn parseval() -> Result<(bool, String)> {
    let params = ModelParams::correlated_er_q_rho(3, Number::ratio(1, 3), Number::ratio(1, 2))?;
    let adv = conditional_advantage::<BigRational>(&params, 6, None)?;
    let p = correlated_er_pairs::<BigRational>(&params, None)?;
    let q = bernoulli_product(6, &r(1, 3))?;
    let chi = p.second_moment_ratio(&q)?;
    let got = adv.exact_squared().cloned().unwrap_or_default();
    Ok((got == chi, format!("Adv² = {got}, 1 + χ² = {chi}")))
}

fn hidden_identity() -> Result<(bool, String)> {
    let null = DiscreteMeasure::new([(0u64, r(1, 2)), (1, r(1, 2))])?;
    let alt = DiscreteMeasure::new([(0u64, r(1, 5)), (1, r(4, 5))])?;
    for m in [1usize, 2, 4] {
        let prob = build_hidden_sample(null.clone(), alt.clone(), 1, m)?;
        let a = hidden_sample_advantage(&prob, 1)?;
        let lhs = (a.exact_squared().cloned().unwrap_or_default() - r(1, 1)) * r(m as i64, 1);
        if lhs != r(9, 25) {
            return Ok((false, format!("M = {m}: (Adv² − 1)·M = {lhs}")));
        }
    }
    Ok((true, "M ∈ {1,2,4}".into()))
}

fn sbm(n: usize) -> Result<ModelParams> {
    ModelParams::sbm(n, 2, Number::int(1), Number::ratio(3, 10))
}

fn triangle_xi() -> Result<(bool, String)> {
    let params = sbm(6)?;
    let table = XiTable::<f64>::build(&params, 3, SignalScale::Exact)?;
    let c3 = LabeledGraph::cycle(6, &[0, 1, 2])?;
    let got = table.xi(&c3)?;
    let want = xi_cycle_closed_form::<f64>(&params, 3, SignalScale::Exact)?;
    let empty = table.xi(&LabeledGraph::empty(6))?;
    let leafy = table.xi(&LabeledGraph::path(6, &[0, 1, 2])?)?;
    let ok = (got - want).abs() <= 1e-12 && empty == 1.0 && leafy == 0.0 && table.entries().len() == 2;
    Ok((ok, format!("Ξ(C3) = {got:e}, closed form {want:e}")))
}

fn linear_system() -> Result<(bool, String)> {
    let params = sbm(4)?;
    let table = XiTable::<Surd>::build(&params, 3, SignalScale::Exact)?;
    let rep = verify_linear_system(&table, &params)?;
    Ok((
        rep.all_exact_zero,
        format!("{} rows, max residual {:e}", rep.rows, rep.max_residual),
    ))
}

fn duality() -> Result<(bool, String)> {
    let params = ModelParams::sbm(4, 2, Number::ratio(1, 2), Number::ratio(2, 5))?;
    let g = duality_gap(&params, 3)?;
    let norm = build_dual(&XiTable::<f64>::build(&params, 3, SignalScale::Exact)?)?.norm;
    Ok((g.holds, format!("advantage {} ≤ ‖u‖ {norm}", g.exact)))
}

fn trees() -> Result<(bool, String)> {
    let got = rooted_tree_counts(9)?;
    Ok((got == [1, 1, 2, 4, 9, 20, 48, 115, 286], format!("{got:?}")))
}

fn reduction_identities() -> Result<(bool, String)> {
    let mut rng = trial_rng(11, 0);
    for _ in 0..500 {
        let n = rng.gen_range(2..9);
        let pi_hat = random_permutation(n, &mut rng);
        let pi_star = random_permutation(n, &mut rng);
        let h = estimator_to_indicators(&pi_hat);
        if h.hits(&pi_star) != n as f64 * overlap(&pi_hat, &pi_star)?.value() {
            return Ok((false, format!("{pi_hat:?} vs {pi_star:?}")));
        }
        let values = (0..n * n).map(|_| rng.gen_range(0..3) as f64 / 2.0).collect();
        let t = truncate_family(&IndicatorFamily::new(n, values)?);
        if !t.is_regularized() {
            return Ok((false, "truncated family is not regularized".into()));
        }
    }
    Ok((true, "500 random instances".into()))
}

fn graph_facts() -> Result<(bool, String)> {
    let params = ModelParams::correlated_er_q_rho(5, Number::ratio(1, 4), Number::ratio(1, 3))?
        .with_degree(3)?
        .with_delta(Number::ratio(1, 200))?;
    let audits = graph_fact_audits(5, &params, 6)?;
    let bad = audits.iter().filter(|a| !a.holds).count();
    Ok((bad == 0, format!("{} audits, {bad} failures", audits.len())))
}

pub fn run_checks() -> Vec<Check> {
    let checks: [(&'static str, fn() -> Result<(bool, String)>); 9] = [
        ("phi_orthonormality", phi_orthonormal),
        ("parseval_completeness", parseval),
        ("hidden_sample_identity", hidden_identity),
        ("xi_triangle", triangle_xi),
        ("dual_linear_system", linear_system),
        ("duality", duality),
        ("rooted_tree_counts", trees),
        ("reduction_identities", reduction_identities),
        ("graph_facts", graph_facts),
    ];
    checks
        .iter()
        .map(|(name, f)| match f() {
            Ok((pass, detail)) => Check { name, pass, detail },
            Err(e) => Check {
                name,
                pass: false,
                detail: e.to_string(),
            },
        })
        .collect()
}
