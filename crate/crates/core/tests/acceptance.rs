//! End-to-end acceptance checks. Prints one PASS/FAIL line per criterion and
//! exits nonzero if any fails.

use std::process::ExitCode;
use std::time::Instant;

use lowdeg::advantage::{
    advantage_gram_schmidt, advantage_product_basis, build_hidden_sample, conditional_advantage,
    hidden_sample_advantage,
};
use lowdeg::basis::{
    cross_moment_enumerated, cross_moment_planted, leaf_cancellation_check, path_expectation, phi_pair_moment_exact,
    psi_pair_moment_exact, SignalScale,
};
use lowdeg::bounds::{
    audit_extension_counts, audit_restriction_counts, audit_supergraph_counts, fixture_graphs, graph_fact_audits,
    BoundAudit,
};
use lowdeg::certificate::{duality_gap, verify_linear_system, XiTable};
use lowdeg::exact::{Number, Surd};
use lowdeg::graph::{
    decompose_difference, independent_cycle_census, otter_constant_estimate, rooted_tree_counts, DecompositionVariant,
    EdgeSpace, LabeledGraph,
};
use lowdeg::measure::{
    bernoulli_product, correlated_er_pairs, decode_labels, er_measure, sbm_graph_measure, sbm_joint, DiscreteMeasure,
    PermCondition,
};
use lowdeg::models::{random_permutation, sample_correlated_er, sample_er, sample_sbm, trial_rng, ModelParams};
use lowdeg::reduction::{
    estimator_to_indicators, one_sided_test, overlap, sample_null_pair, truncate_family, DetectionThresholds,
    IndicatorFamily, PairSample,
};
use lowdeg::Result;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::Rng;
use rayon::prelude::*;

type Outcome = Result<(bool, String)>;

fn r(a: i64, b: i64) -> BigRational {
    BigRational::new(a.into(), b.into())
}

fn num(a: i64, b: i64) -> Number {
    Number::ratio(a, b)
}

fn sbm(n: usize, k: usize, lambda: Number, eps: Number) -> Result<ModelParams> {
    ModelParams::sbm(n, k, lambda, eps)
}

fn phi_orthonormality() -> Outcome {
    let q = r(1, 3);
    let m = er_measure(4, &q)?;
    let idx = EdgeSpace::new(4)?.masks_up_to(3);
    let bad: Vec<(u64, u64)> = idx
        .par_iter()
        .flat_map_iter(|&a| idx.iter().map(move |&b| (a, b)))
        .filter(|&(a, b)| {
            let want = if a == b { Surd::integer(1) } else { Surd::integer(0) };
            phi_pair_moment_exact(&m, a, b, &q).map_or(true, |v| v != want)
        })
        .collect();
    Ok((
        bad.is_empty(),
        format!("{} pairs, {} off", idx.len() * idx.len(), bad.len()),
    ))
}

fn psi_orthonormality() -> Outcome {
    let params = sbm(3, 2, Number::int(1), num(2, 5))?;
    let joint = sbm_joint::<BigRational>(&params)?;
    let idx: Vec<(u64, u64)> = (0..8u64)
        .flat_map(|c| {
            EdgeSpace::new(3)
                .unwrap()
                .masks_up_to(2)
                .into_iter()
                .map(move |s| (c, s))
        })
        .collect();
    let mut off = 0;
    for &a in &idx {
        for &b in &idx {
            let want = if a == b { Surd::integer(1) } else { Surd::integer(0) };
            if psi_pair_moment_exact(&joint, &params, a, b)? != want {
                off += 1;
            }
        }
    }
    Ok((off == 0, format!("{} pairs, {off} off", idx.len() * idx.len())))
}

fn cross_moment() -> Outcome {
    let grid = [(1, 2), (1, 1), (3, 2)]
        .iter()
        .flat_map(|&l| [(0, 1), (1, 5), (2, 5), (3, 5)].into_iter().map(move |e| (l, e)));
    let es = EdgeSpace::new(3)?;
    let mut rng = trial_rng(3, 0);
    let (mut count, mut worst) = (0usize, 0.0f64);
    for ((la, lb), (ea, eb)) in grid {
        let params = sbm(3, 2, num(la, lb), num(ea, eb))?;
        let joint = sbm_joint::<BigRational>(&params)?;
        for _ in 0..20 {
            let s = rng.gen_range(0..8u64);
            let h = if rng.gen_bool(0.7) {
                s & rng.gen_range(0..8u64)
            } else {
                rng.gen_range(0..8u64)
            };
            let code = rng.gen_range(0..8u64);
            let sigma = decode_labels(code, 3, 2);
            let brute = cross_moment_enumerated(&joint, &params, s, code, h)?.to_f64();
            let closed = cross_moment_planted::<f64>(&params, &es.graph(s), &sigma, &es.graph(h), SignalScale::Exact)?;
            worst = worst.max((brute - closed).abs());
            count += 1;
        }
    }
    Ok((
        count >= 200 && worst <= 1e-12,
        format!("{count} instances, max error {worst:e}"),
    ))
}

/// `E_Q[(dP/dQ)²]` for correlated Erdős–Rényi on three vertices, listing
/// every pair of graphs and every relabelling.
fn triangle_second_moment(q: &BigRational, rho: &BigRational) -> BigRational {
    let one = BigRational::one();
    let edges = [(0, 1), (0, 2), (1, 2)];
    let p11 = q * q + rho * q * (&one - q);
    let p10 = q - &p11;
    let p00 = &one - q - q + &p11;
    let joint = |a: bool, b: bool| match (a, b) {
        (true, true) => p11.clone(),
        (false, false) => p00.clone(),
        _ => p10.clone(),
    };
    let perms = [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]];
    let index = |u: usize, v: usize| edges.iter().position(|&e| e == (u.min(v), u.max(v))).unwrap();
    let mut total = BigRational::zero();
    for a in 0..8u32 {
        for b in 0..8u32 {
            let mut p = BigRational::zero();
            for pi in &perms {
                let mut t = one.clone();
                for (i, &(u, v)) in edges.iter().enumerate() {
                    t *= joint(a >> i & 1 == 1, b >> index(pi[u], pi[v]) & 1 == 1);
                }
                p += t / r(6, 1);
            }
            let mut null = one.clone();
            for bit in 0..6 {
                null *= if (a | b << 3) >> bit & 1 == 1 {
                    q.clone()
                } else {
                    &one - q
                };
            }
            total += &p * &p / null;
        }
    }
    total
}

fn parseval() -> Outcome {
    let mut notes = Vec::new();
    let mut ok = true;
    for (q, rho) in [((1, 3), (1, 2)), ((1, 4), (1, 3)), ((1, 2), (3, 5))] {
        let params = ModelParams::correlated_er_q_rho(3, num(q.0, q.1), num(rho.0, rho.1))?;
        let adv = conditional_advantage::<BigRational>(&params, 6, None)?;
        let got = adv.exact_squared().cloned().unwrap_or_default();
        let oracle = triangle_second_moment(&r(q.0, q.1), &r(rho.0, rho.1));
        let p = correlated_er_pairs::<BigRational>(&params, None)?;
        let direct = p.second_moment_ratio(&bernoulli_product(6, &r(q.0, q.1))?)?;
        ok &= got == oracle && got == direct;
        notes.push(format!("corr-er {got}"));
    }
    for (eps, lambda) in [((2, 5), (1, 1)), ((3, 5), (3, 2))] {
        let params = sbm(3, 2, num(lambda.0, lambda.1), num(eps.0, eps.1))?;
        let p = sbm_graph_measure::<BigRational>(&params)?;
        let q = er_measure(3, &r(lambda.0, 3 * lambda.1))?;
        let adv = advantage_product_basis(&p, &q, 3, 3)?;
        let got = adv.exact_squared().cloned().unwrap_or_default();
        ok &= got == p.second_moment_ratio(&q)?;
        notes.push(format!("sbm {got}"));
    }
    Ok((ok, notes.join(", ")))
}

fn hidden_sample() -> Outcome {
    let bases = [((1, 2), (1, 5)), ((2, 3), (1, 2)), ((9, 10), (3, 5))];
    let mut ok = true;
    let mut notes = Vec::new();
    for (q1, p1) in bases {
        let null = DiscreteMeasure::new([(0u64, r(1, 1) - r(q1.0, q1.1)), (1, r(q1.0, q1.1))])?;
        let alt = DiscreteMeasure::new([(0u64, r(1, 1) - r(p1.0, p1.1)), (1, r(p1.0, p1.1))])?;
        // χ² of the two-point pair, summed directly.
        let chi = null
            .atoms()
            .iter()
            .zip(alt.atoms())
            .fold(BigRational::zero(), |acc, ((_, qw), (_, pw))| acc + pw * pw / qw)
            - BigRational::one();
        let mut previous = None;
        for m in [1usize, 2, 4, 8] {
            let problem = build_hidden_sample(null.clone(), alt.clone(), 1, m)?;
            let degrees = if m == 1 { vec![1] } else { vec![1, m] };
            for d in degrees {
                let a = hidden_sample_advantage(&problem, d)?;
                let excess = a.exact_squared().cloned().unwrap_or_default() - BigRational::one();
                ok &= &excess * r(m as i64, 1) == chi;
                // Adv² ≤ 1 + C/M with C the base excess, and it decreases in M.
                ok &= excess <= &chi / r(m as i64, 1);
                if d == 1 {
                    if let Some(prev) = &previous {
                        ok &= excess < *prev;
                    }
                    previous = Some(excess);
                }
            }
        }
        notes.push(format!("χ²={chi}"));
    }
    Ok((ok, format!("M ∈ {{1,2,4,8}}, {}", notes.join(", "))))
}

/// `h = a + b·ω` recovered from its two values, and `t`, all from the model
/// probabilities.
fn literal_cycle_value(n: usize, k: usize, lambda: f64, eps: f64, l: i32) -> f64 {
    let h = |w: f64| {
        let p = (1.0 + eps * w) * lambda / n as f64;
        ((1.0 - p) * (1.0 + eps * w) / (1.0 - lambda / n as f64)).sqrt()
    };
    let kf = k as f64;
    let (same, diff) = (h(kf - 1.0), h(-1.0));
    let b = (same - diff) / kf;
    let a = diff + b;
    let t = (eps * eps * lambda / n as f64).sqrt();
    -(kf - 1.0) * t.powi(l) / (a.powi(l) + (kf - 1.0) * b.powi(l))
}

fn xi_recursion() -> Outcome {
    let mut ok = true;
    let mut notes = Vec::new();
    for (k, lambda, eps) in [(2usize, (1, 1), (2, 5)), (3, (3, 2), (1, 5))] {
        let params = sbm(6, k, num(lambda.0, lambda.1), num(eps.0, eps.1))?;
        let table = XiTable::<f64>::build(&params, 4, SignalScale::Asymptotic)?;
        let c3 = LabeledGraph::cycle(6, &[0, 1, 2])?;
        let got = table.xi(&c3)?;
        let want = literal_cycle_value(6, k, lambda.0 as f64 / lambda.1 as f64, eps.0 as f64 / eps.1 as f64, 3);
        ok &= (got - want).abs() <= 1e-12;
        ok &= table.xi(&LabeledGraph::empty(6))? == 1.0;
        for leafy in [
            LabeledGraph::path(6, &[0, 1, 2])?,
            LabeledGraph::from_edges(6, [(0, 1), (1, 2), (0, 2), (2, 3)])?,
            LabeledGraph::from_edges(6, [(0, 1)])?,
        ] {
            ok &= table.xi(&leafy)? == 0.0;
        }
        notes.push(format!("Ξ(C3)={got:e} vs {want:e}"));
    }
    // Multiplicativity over every disconnected graph with at most 6 edges.
    let params = sbm(6, 2, Number::int(1), num(2, 5))?;
    let table = XiTable::<Surd>::build(&params, 6, SignalScale::Exact)?;
    let es = EdgeSpace::new(6)?;
    let mut unions = 0;
    let mut failures = 0;
    for mask in es.masks_up_to(6) {
        let g = es.graph(mask);
        let parts = g.components();
        if parts.len() < 2 {
            continue;
        }
        unions += 1;
        let mut prod = Surd::integer(1);
        for p in &parts {
            prod = prod * table.xi(p)?;
        }
        if table.xi(&g)? != prod {
            failures += 1;
        }
    }
    ok &= failures == 0 && unions > 0;
    notes.push(format!("{unions} disjoint unions, {failures} non-multiplicative"));
    Ok((ok, notes.join("; ")))
}

fn linear_system() -> Outcome {
    let mut ok = true;
    let mut notes = Vec::new();
    for (lambda, eps) in [((1, 1), (2, 5)), ((1, 2), (1, 5))] {
        let params = sbm(5, 2, num(lambda.0, lambda.1), num(eps.0, eps.1))?;
        let table = XiTable::<Surd>::build(&params, 3, SignalScale::Exact)?;
        let rep = verify_linear_system(&table, &params)?;
        ok &= rep.all_exact_zero;
        notes.push(format!("{} rows", rep.rows));
    }
    Ok((ok, notes.join(", ")))
}

fn duality() -> Outcome {
    let cases: Vec<((i64, i64), (i64, i64), usize)> = [(0, 1), (1, 5), (2, 5)]
        .into_iter()
        .flat_map(|e| {
            [(1, 2), (1, 1)]
                .into_iter()
                .flat_map(move |l| (1..=3).map(move |d| (e, l, d)))
        })
        .collect();
    let results: Vec<Result<(bool, f64)>> = cases
        .par_iter()
        .map(|&(e, l, d)| {
            let params = sbm(4, 2, num(l.0, l.1), num(e.0, e.1))?;
            let g = duality_gap(&params, d)?;
            Ok((g.exact <= g.dual_norm + 1e-9, g.dual_norm - g.exact))
        })
        .collect();
    let mut holds = 0;
    let mut min_gap = f64::INFINITY;
    for res in results {
        let (h, gap) = res?;
        holds += h as usize;
        min_gap = min_gap.min(gap);
    }
    Ok((
        holds == cases.len(),
        format!("{holds}/{} fixtures, min ‖u‖ − Adv = {min_gap:e}", cases.len()),
    ))
}

fn random_pair(rng: &mut impl Rng, n: usize) -> Result<(LabeledGraph, LabeledGraph)> {
    let es = EdgeSpace::new(n)?;
    let s = rng.gen_range(1..1u64 << es.num_edges());
    let h = s & rng.gen::<u64>();
    Ok((es.graph(s), es.graph(h)))
}

fn graph_facts_and_paths() -> Outcome {
    let mut ok = true;
    let mut notes = Vec::new();
    let params = ModelParams::correlated_er_q_rho(6, num(1, 4), num(1, 3))?
        .with_degree(3)?
        .with_delta(num(1, 200))?;
    let facts = graph_fact_audits(6, &params, 8)?;
    let bad = facts.iter().filter(|a| !a.holds).count();
    ok &= bad == 0;
    notes.push(format!("A1 {} audits {bad} failed", facts.len()));

    let mut rng = trial_rng(9, 0);
    let (mut exact_t, mut bounded_t, mut reassembled) = (0, 0, 0);
    let trials = 600;
    for _ in 0..trials {
        let n = rng.gen_range(3..8);
        let (s, h) = random_pair(&mut rng, n)?;
        let gap = s.leaves().difference(h.vertices()).count() as i64 + s.excess() - h.excess();
        let diff: std::collections::BTreeSet<_> = s.edges().difference(h.edges()).copied().collect();
        let seq = decompose_difference(&s, &h, DecompositionVariant::Sequential)?;
        let ind = decompose_difference(&s, &h, DecompositionVariant::Independent)?;
        exact_t += (seq.num_paths() as i64 == gap) as usize;
        bounded_t += (ind.num_paths() as i64 <= 5 * gap) as usize;
        reassembled += (seq.edges() == diff && ind.edges() == diff) as usize;
        // Every independent cycle avoids V(H).
        let census = independent_cycle_census(&s, &h)?;
        ok &= census.values().sum::<usize>() <= ind.num_cycles();
    }
    ok &= exact_t == trials && bounded_t == trials && reassembled == trials;
    notes.push(format!(
        "decompositions {exact_t}/{bounded_t}/{reassembled} of {trials}"
    ));

    // a^l + b^l·ω(σ₀, σ_l) against the sum over interior labels.
    let mut worst: f64 = 0.0;
    for k in 2..=4usize {
        for l in 1..=5u32 {
            for &(a, b) in &[(0.9, 0.1), (1.2, -0.3), (0.5, 0.5), (1.0, 0.0)] {
                for s0 in 0..k {
                    for sl in 0..k {
                        let interior = (k as u64).pow(l - 1);
                        let mut sum = 0.0;
                        for code in 0..interior {
                            let mut labels = vec![s0];
                            let mut c = code;
                            for _ in 1..l {
                                labels.push((c % k as u64) as usize);
                                c /= k as u64;
                            }
                            labels.push(sl);
                            let mut prod = 1.0;
                            for w in labels.windows(2) {
                                let om = if w[0] == w[1] { k as f64 - 1.0 } else { -1.0 };
                                prod *= a + b * om;
                            }
                            sum += prod;
                        }
                        let brute = sum / interior as f64;
                        worst = worst.max((brute - path_expectation(k, a, b, l, s0, sl)?).abs());
                    }
                }
            }
        }
    }
    ok &= worst <= 1e-12;
    notes.push(format!("path expectation error {worst:e}"));

    let mut zeros = 0;
    let mut exposed = 0;
    while exposed < 250 {
        let n = rng.gen_range(3..7);
        let (s, h) = random_pair(&mut rng, n)?;
        if s.leaves().is_subset(h.vertices()) {
            continue;
        }
        exposed += 1;
        let k = rng.gen_range(2..5);
        zeros += leaf_cancellation_check(&s, &h, k)?.is_zero() as usize;
    }
    ok &= zeros == exposed;
    notes.push(format!("leaf cancellation {zeros}/{exposed}"));
    Ok((ok, notes.join("; ")))
}

fn tally(audits: &[BoundAudit]) -> (usize, usize) {
    (audits.len(), audits.iter().filter(|a| !a.holds).count())
}

fn enumeration_bounds() -> Outcome {
    let mut jobs: Vec<(&'static str, LabeledGraph, usize, usize)> = Vec::new();
    for n in 4..=7 {
        for g in fixture_graphs(n)? {
            for d in [3usize, 4, 6] {
                if g.num_edges() <= d {
                    jobs.push(("A1(iv)", g.clone(), d, 0));
                    jobs.push(("A5", g.clone(), d, 2));
                }
                jobs.push(("A4", g.clone(), d, 2));
                jobs.push(("A4", g.clone(), d, 3));
            }
        }
    }
    let results: Vec<Result<(&str, Vec<BoundAudit>)>> = jobs
        .par_iter()
        .map(|(kind, g, d, big_n)| {
            let audits = match *kind {
                "A1(iv)" => audit_supergraph_counts(g, 2)?,
                "A4" => audit_extension_counts(g, *d, *big_n)?,
                _ => audit_restriction_counts(g, *d, *big_n)?,
            };
            Ok((*kind, audits))
        })
        .collect();
    let mut counts = std::collections::BTreeMap::new();
    for res in results {
        let (kind, audits) = res?;
        let (n, f) = tally(&audits);
        let e = counts.entry(kind).or_insert((0, 0));
        e.0 += n;
        e.1 += f;
    }
    let ok = counts.values().all(|&(n, f)| n > 0 && f == 0);
    let notes: Vec<String> = counts
        .iter()
        .map(|(k, (n, f))| format!("{k} {n} audits {f} failed"))
        .collect();
    Ok((ok, notes.join(", ")))
}

fn binomial_z(successes: f64, trials: f64, p: f64) -> f64 {
    (successes / trials - p) / (p * (1.0 - p) / trials).sqrt()
}

/// Two-sample Kolmogorov–Smirnov statistic and its asymptotic p-value.
fn ks_test(mut x: Vec<f64>, mut y: Vec<f64>) -> (f64, f64) {
    x.sort_by(f64::total_cmp);
    y.sort_by(f64::total_cmp);
    let (n1, n2) = (x.len() as f64, y.len() as f64);
    let (mut i, mut j, mut d) = (0, 0, 0.0f64);
    while i < x.len() && j < y.len() {
        let v = x[i].min(y[j]);
        while i < x.len() && x[i] <= v {
            i += 1;
        }
        while j < y.len() && y[j] <= v {
            j += 1;
        }
        d = d.max((i as f64 / n1 - j as f64 / n2).abs());
    }
    let ne = n1 * n2 / (n1 + n2);
    let lam = (ne.sqrt() + 0.12 + 0.11 / ne.sqrt()) * d;
    let p: f64 = (1..=100)
        .map(|k| {
            let k = k as f64;
            2.0 * (-1f64).powf(k - 1.0) * (-2.0 * k * k * lam * lam).exp()
        })
        .sum();
    (d, p.clamp(0.0, 1.0))
}

fn model_statistics() -> Outcome {
    let n = 1000usize;
    let trials = 200u64;
    let pairs = (n * (n - 1) / 2) as f64;
    let mut notes = Vec::new();

    let (q, rho) = (0.05, 0.5);
    let cer = ModelParams::correlated_er_q_rho(n, num(1, 20), num(1, 2))?;
    let counts: Vec<(usize, usize, usize)> = (0..trials)
        .into_par_iter()
        .map(|t| {
            let s = sample_correlated_er(&cer, &mut trial_rng(21, t))?;
            let b = s.right_aligned();
            let both = s.left.edges().intersection(b.edges()).count();
            Ok((s.left.num_edges(), s.right.num_edges(), both))
        })
        .collect::<Result<_>>()?;
    let total = pairs * trials as f64;
    let a: f64 = counts.iter().map(|c| c.0 as f64).sum();
    let b: f64 = counts.iter().map(|c| c.1 as f64).sum();
    let both: f64 = counts.iter().map(|c| c.2 as f64).sum();
    let p11 = q * q + rho * q * (1.0 - q);
    let za = binomial_z(a, total, q);
    let zb = binomial_z(b, total, q);
    let z11 = binomial_z(both, total, p11);
    let qa = a / total;
    let rho_hat = (both / total - qa * qa) / (qa * (1.0 - qa));
    let mut ok = za.abs() <= 3.0 && zb.abs() <= 3.0 && z11.abs() <= 3.0;
    notes.push(format!(
        "corr-er density z={za:.2},{zb:.2}, ρ̂={rho_hat:.4} (z={z11:.2})"
    ));

    let block = sbm(n, 2, Number::int(20), num(1, 2))?;
    let (same, diff) = block.sbm_probabilities()?;
    let (same, diff) = (same.value(), diff.value());
    let tallies: Vec<[f64; 4]> = (0..trials)
        .into_par_iter()
        .map(|t| {
            let (labels, g) = sample_sbm(&block, &mut trial_rng(22, t))?;
            let ones = labels.iter().filter(|&&l| l == 1).count() as f64;
            let zeros = n as f64 - ones;
            let intra_pairs = ones * (ones - 1.0) / 2.0 + zeros * (zeros - 1.0) / 2.0;
            let intra = g.edges().iter().filter(|&&(u, v)| labels[u] == labels[v]).count() as f64;
            Ok([intra, g.num_edges() as f64 - intra, intra_pairs, pairs - intra_pairs])
        })
        .collect::<Result<_>>()?;
    let sum = |i: usize| tallies.iter().map(|t| t[i]).sum::<f64>();
    let zi = binomial_z(sum(0), sum(2), same);
    let zo = binomial_z(sum(1), sum(3), diff);
    ok &= zi.abs() <= 3.0 && zo.abs() <= 3.0;
    notes.push(format!("sbm intra z={zi:.2} inter z={zo:.2}"));

    let flat = sbm(n, 2, Number::int(20), Number::int(0))?;
    let p = 20.0 / n as f64;
    let sbm_counts: Vec<f64> = (0..trials)
        .into_par_iter()
        .map(|t| Ok(sample_sbm(&flat, &mut trial_rng(23, t))?.1.num_edges() as f64))
        .collect::<Result<_>>()?;
    let er_counts: Vec<f64> = (0..trials)
        .into_par_iter()
        .map(|t| Ok(sample_er(n, p, &mut trial_rng(24, t))?.num_edges() as f64))
        .collect::<Result<_>>()?;
    let (d, pval) = ks_test(sbm_counts, er_counts);
    ok &= pval > 0.01;
    notes.push(format!("ε=0 KS D={d:.3} p={pval:.3}"));
    Ok((ok, notes.join("; ")))
}

fn otter() -> Outcome {
    let counts = rooted_tree_counts(9)?;
    let est = otter_constant_estimate(30)?;
    let ok = counts == [1, 1, 2, 4, 9, 20, 48, 115, 286] && (0.337..=0.340).contains(&est.estimate);
    Ok((ok, format!("{counts:?}, α ≈ {:.5}", est.estimate)))
}

fn conditional() -> Outcome {
    let cond = PermCondition { i: 0, j: 0 };
    let mut ok = true;
    let mut notes = Vec::new();
    for (a, b) in [(0, 1), (1, 5), (7, 20)] {
        let params = ModelParams::correlated_er_q_rho(4, num(1, 4), num(a, b))?;
        let adv = conditional_advantage::<BigRational>(&params, 2, Some(cond))?;
        let p = correlated_er_pairs::<BigRational>(&params, Some(cond))?;
        let q = bernoulli_product(12, &r(1, 4))?;
        let gs = advantage_gram_schmidt(&p, &q, 12, 2)?;
        ok &= adv.value.is_finite() && adv.value >= 1.0 - 1e-12 && (adv.value - gs.value).abs() <= 1e-9;
        if a == 0 {
            ok &= adv.exact_squared() == Some(&BigRational::one());
        }
        notes.push(format!("ρ={a}/{b}: {:.9}", adv.value));
    }
    Ok((ok, notes.join(", ")))
}

fn reduction() -> Outcome {
    let mut rng = trial_rng(14, 0);
    let mut ok = true;
    let palette = [0.0, 1.0, 0.5, -1.0, 2.0];
    for _ in 0..10_000 {
        let n = rng.gen_range(1..7);
        let values: Vec<f64> = (0..n * n)
            .map(|_| {
                if rng.gen_bool(0.9) {
                    palette[rng.gen_range(0..2)]
                } else {
                    palette[rng.gen_range(2..5)]
                }
            })
            .collect();
        let rows_ok = (0..n).all(|i| {
            let row = &values[i * n..(i + 1) * n];
            row.iter().all(|&x| x == 0.0 || x == 1.0) && row.iter().sum::<f64>() == 1.0
        });
        let f = IndicatorFamily::new(n, values.clone())?;
        let t = truncate_family(&f);
        ok &= t.is_regularized();
        ok &= if rows_ok {
            t == f
        } else {
            (0..n * n).all(|i| t.get(i / n, i % n) == 0.0)
        };
    }
    let fuzz_ok = ok;
    for _ in 0..2000 {
        let n = rng.gen_range(1..13);
        let pi_hat = random_permutation(n, &mut rng);
        let pi_star = random_permutation(n, &mut rng);
        let agree = pi_hat.iter().zip(&pi_star).filter(|(a, b)| a == b).count();
        let h = estimator_to_indicators(&pi_hat);
        ok &= h.hits(&pi_star) == agree as f64;
        ok &= overlap(&pi_hat, &pi_star)?.exact() == Some(&r(agree as i64, n as i64));
    }
    let identity_ok = ok;
    let params = ModelParams::correlated_er_q_rho(8, num(1, 2), num(1, 2))?;
    let sampler = |rng: &mut rand_chacha::ChaCha8Rng| sample_null_pair(&params, rng);
    let stat = |s: &PairSample| s.a.num_edges() as f64;
    let trials = 4000;
    let rep = one_sided_test(
        &stat,
        14.0,
        &sampler,
        &sampler,
        trials,
        5,
        DetectionThresholds::default(),
    )?;
    let (qa, pr) = (rep.q_accept.rate, rep.p_reject.rate);
    let sigma = (rep.q_accept.std_error().powi(2) + rep.p_reject.std_error().powi(2)).sqrt();
    let comp_ok = (qa + pr - 1.0).abs() <= 3.0 * sigma;
    Ok((
        fuzz_ok && identity_ok && comp_ok,
        format!(
            "fuzz {fuzz_ok}, identity {identity_ok}, accept {qa:.4} + reject {pr:.4} (3σ = {:.4})",
            3.0 * sigma
        ),
    ))
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 14] = [
        ("phi basis orthonormality", phi_orthonormality),
        ("psi basis orthonormality", psi_orthonormality),
        ("cross moment closed form", cross_moment),
        ("Parseval completeness", parseval),
        ("hidden-sample identity", hidden_sample),
        ("Xi recursion", xi_recursion),
        ("dual linear system", linear_system),
        ("duality sandwich", duality),
        ("graph facts, decompositions, paths, leaves", graph_facts_and_paths),
        ("enumeration bounds", enumeration_bounds),
        ("model statistics", model_statistics),
        ("rooted trees and Otter constant", otter),
        ("conditional advantage", conditional),
        ("reduction harness", reduction),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let (pass, detail) = match f() {
            Ok(x) => x,
            Err(e) => (false, format!("error: {e}")),
        };
        let secs = start.elapsed().as_secs_f64();
        println!(
            "{} {:>2} {name}: {detail} [{secs:.1}s]",
            if pass { "PASS" } else { "FAIL" },
            i + 1
        );
        failed += !pass as usize;
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
