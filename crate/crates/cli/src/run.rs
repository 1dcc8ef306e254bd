use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use lowdeg::advantage::{
    advantage_gram_schmidt, advantage_product_basis, advantage_rayleigh, build_hidden_sample, conditional_advantage,
    hidden_sample_advantage, AdvantageMethod, AdvantageReport, Weight,
};
use lowdeg::bounds::{run_suite, BoundAudit};
use lowdeg::certificate::{build_dual, duality_gap, verify_linear_system, XiTable};
use lowdeg::config::{Command, ExperimentConfig, ModelKind, SCHEMA_VERSION};
use lowdeg::exact::{Number, Scalar, Surd};
use lowdeg::graph::{
    canonicalize, otter_constant_estimate, rooted_tree_counts, write_edge_list, EdgeSpace, LabeledGraph,
};
use lowdeg::measure::{
    bernoulli_product, correlated_er_pairs, er_measure, sbm_graph_measure, DiscreteMeasure, PermCondition,
};
use lowdeg::models::{
    sample_correlated_er, sample_correlated_sbm, sample_er, sample_modified_sbm, sample_sbm, trial_rng, ModelParams,
};
use lowdeg::reduction::{run_reduction, EstimatorKind, ReductionConfig};
use lowdeg::Error;
use num_rational::BigRational;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

/// A machine-readable failure with its exit code.
#[derive(Debug)]
pub struct Failure {
    pub kind: &'static str,
    pub message: String,
    pub code: u8,
}

impl Failure {
    pub fn usage(message: String) -> Self {
        Failure {
            kind: "usage",
            message,
            code: 2,
        }
    }

    fn io(path: &Path, e: std::io::Error) -> Self {
        Failure {
            kind: "io",
            message: format!("{}: {e}", path.display()),
            code: 1,
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let (kind, code) = match &e {
            Error::InvalidParameter { .. } | Error::Parse(_) | Error::Invalid(_) => ("invalid_input", 2),
            Error::TooLarge(_) => ("too_large", 3),
            Error::BudgetExceeded(_) => ("budget_exceeded", 3),
            Error::AmbientMismatch(..)
            | Error::VertexOutOfRange { .. }
            | Error::SelfLoop(_)
            | Error::NotSubgraph(_) => ("graph", 1),
            Error::Inexact(_) => ("inexact", 1),
            Error::Degenerate(_) => ("degenerate", 1),
            Error::Unbounded(_) => ("unbounded", 1),
        };
        Failure {
            kind,
            message: e.to_string(),
            code,
        }
    }
}

type Outcome<T> = Result<T, Failure>;

fn write(path: &Path, text: &str) -> Outcome<()> {
    fs::write(path, text).map_err(|e| Failure::io(path, e))
}

/// Runs one experiment, prints its JSON report and writes any artifacts.
/// Returns whether every check the command performs passed.
pub fn run(cfg: &ExperimentConfig) -> Outcome<bool> {
    let (result, passed) = match cfg.command {
        Command::Sample => (sample(cfg)?, true),
        Command::Adv => (adv(cfg)?, true),
        Command::Hidden => (hidden(cfg)?, true),
        Command::Xi => (xi(cfg)?, true),
        Command::DualCheck => dual_check(cfg)?,
        Command::BoundsAudit => (bounds_audit(cfg)?, true),
        Command::Reduce => (reduce(cfg)?, true),
        Command::Otter => (otter(cfg)?, true),
        Command::Verify => {
            let checks = crate::verify::run_checks();
            let ok = checks.iter().all(|c| c.pass);
            (serde_json::to_value(checks).expect("serializable"), ok)
        }
    };
    let report = json!({
        "schema_version": SCHEMA_VERSION,
        "command": cfg.command,
        "config": cfg,
        "passed": passed,
        "result": result,
    });
    let text = serde_json::to_string_pretty(&report).expect("serializable") + "\n";
    print!("{text}");
    if let Some(out) = &cfg.output {
        if !matches!(cfg.command, Command::Sample | Command::BoundsAudit) {
            write(out, &text)?;
        }
    }
    Ok(passed)
}

fn edges(g: &LabeledGraph) -> Vec<[usize; 2]> {
    g.edges().iter().map(|&(u, v)| [u, v]).collect()
}

fn sample(cfg: &ExperimentConfig) -> Outcome<Value> {
    let params = cfg.params()?;
    let model = cfg.model.expect("validated");
    if let Some(dir) = &cfg.output {
        fs::create_dir_all(dir).map_err(|e| Failure::io(dir, e))?;
    }
    let mut trials = Vec::new();
    for t in 0..cfg.trials {
        let mut rng = trial_rng(cfg.seed, t);
        let mut graphs: Vec<(&str, LabeledGraph)> = Vec::new();
        let mut pi_star = None;
        let mut sigma_star = None;
        match model {
            ModelKind::Er => {
                let p = params
                    .q
                    .clone()
                    .or_else(|| params.p.clone())
                    .or_else(|| params.mean_edge_probability().ok())
                    .ok_or_else(|| Failure::usage("er needs --q, --p or --lambda".into()))?;
                graphs.push(("G", sample_er(params.n, p.value(), &mut rng)?));
            }
            ModelKind::Sbm => {
                let (labels, g) = sample_sbm(params, &mut rng)?;
                sigma_star = Some(labels);
                graphs.push(("G", g));
            }
            ModelKind::CorrEr | ModelKind::CorrSbm | ModelKind::ModSbm => {
                let x = match model {
                    ModelKind::CorrEr => sample_correlated_er(params, &mut rng)?,
                    ModelKind::CorrSbm => sample_correlated_sbm(params, &mut rng)?,
                    _ => sample_modified_sbm(params, cfg.flags.removal, &mut rng)?,
                };
                pi_star = Some(x.pi_star);
                sigma_star = x.sigma_star;
                graphs.push(("parent", x.parent));
                if let Some(p) = x.pruned {
                    graphs.push(("pruned", p));
                }
                graphs.push(("A", x.left));
                graphs.push(("B", x.right));
            }
        }
        let mut entry = json!({
            "trial": t,
            "pi_star": pi_star,
            "sigma_star": sigma_star,
        });
        if let Some(dir) = &cfg.output {
            let mut files = BTreeMap::new();
            for (name, g) in &graphs {
                let file = format!("sample_{t:04}_{name}.edges");
                write(&dir.join(&file), &write_edge_list(g))?;
                files.insert(name.to_string(), file);
            }
            let sidecar = json!({
                "schema_version": SCHEMA_VERSION,
                "model": model,
                "params": params,
                "seed": cfg.seed,
                "trial": t,
                "pi_star": entry["pi_star"],
                "sigma_star": entry["sigma_star"],
                "files": files,
            });
            let side = dir.join(format!("sample_{t:04}.json"));
            write(
                &side,
                &(serde_json::to_string_pretty(&sidecar).expect("serializable") + "\n"),
            )?;
            entry["files"] = json!(files);
            entry["sidecar"] = json!(side.file_name().and_then(|s| s.to_str()));
        } else {
            let inline: BTreeMap<&str, Value> = graphs
                .iter()
                .map(|(name, g)| (*name, json!({ "n": g.n(), "edges": edges(g) })))
                .collect();
            entry["graphs"] = json!(inline);
        }
        for (name, g) in &graphs {
            entry["edge_counts"][*name] = json!(g.num_edges());
        }
        trials.push(entry);
    }
    Ok(json!({ "model": model, "trials": trials }))
}

/// Parses `pi(i)=j` with 1-based `i`, `j`.
pub fn parse_condition(s: &str) -> Outcome<PermCondition> {
    let compact: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    let bad = || Failure::usage(format!("condition must look like pi(i)=j, got {s:?}"));
    let rest = compact
        .strip_prefix("pi(")
        .or_else(|| compact.strip_prefix("π("))
        .ok_or_else(bad)?;
    let (i, j) = rest.split_once(")=").ok_or_else(bad)?;
    let i: usize = i.parse().map_err(|_| bad())?;
    let j: usize = j.parse().map_err(|_| bad())?;
    if i == 0 || j == 0 {
        return Err(bad());
    }
    Ok(PermCondition { i: i - 1, j: j - 1 })
}

/// Product-basis contributions summed per class of index. Single graphs are
/// grouped by isomorphism class; pairs by the classes of both sides.
fn grouped_contributions(report: &AdvantageReport, es: &EdgeSpace, pair: bool) -> Outcome<Value> {
    let e = es.num_edges();
    let mut groups: BTreeMap<String, (u64, Number)> = BTreeMap::new();
    for c in &report.contributions {
        let key = if pair {
            let a = canonicalize(&es.graph(c.index & ((1u64 << e) - 1)).edge_induced())?;
            let b = canonicalize(&es.graph(c.index >> e).edge_induced())?;
            format!("{}|{}", a.to_hex(), b.to_hex())
        } else {
            canonicalize(&es.graph(c.index).edge_induced())?.to_hex()
        };
        let slot = groups.entry(key).or_insert((0, Number::int(0)));
        slot.0 += 1;
        slot.1 = slot.1.add(&c.value);
    }
    Ok(Value::Array(
        groups
            .into_iter()
            .map(|(class, (count, total))| json!({ "class": class, "indices": count, "total": total }))
            .collect(),
    ))
}

fn adv_with<W: Weight>(cfg: &ExperimentConfig, params: &ModelParams) -> Outcome<(AdvantageReport, bool)> {
    let d = params.degree()?;
    let method = cfg.flags.method.unwrap_or(AdvantageMethod::ProductBasis);
    let condition = cfg.flags.condition.as_deref().map(parse_condition).transpose()?;
    let model = cfg.model.expect("validated");
    if condition.is_some() && model != ModelKind::CorrEr {
        return Err(Failure::usage("--condition applies to corr-er only".into()));
    }
    let es = EdgeSpace::new(params.n)?;
    let e = es.num_edges();
    let (p, q, dim, pair): (DiscreteMeasure<u64, W>, DiscreteMeasure<u64, W>, usize, bool) = match model {
        ModelKind::CorrEr => {
            if condition.is_some() || method != AdvantageMethod::ProductBasis {
                let q = W::from_number(&params.q()?)?;
                (
                    correlated_er_pairs::<W>(params, condition)?,
                    bernoulli_product(2 * e, &q)?,
                    2 * e,
                    true,
                )
            } else {
                return Ok((conditional_advantage::<W>(params, d, None)?, true));
            }
        }
        ModelKind::Sbm => {
            let q = W::from_number(&params.mean_edge_probability()?)?;
            (sbm_graph_measure::<W>(params)?, er_measure(params.n, &q)?, e, false)
        }
        ModelKind::Er => {
            let q = W::from_number(
                &params
                    .q
                    .clone()
                    .or_else(|| params.p.clone())
                    .ok_or_else(|| Failure::usage("er needs --q or --p".into()))?,
            )?;
            let m = er_measure(params.n, &q)?;
            (m.clone(), m, e, false)
        }
        ModelKind::CorrSbm | ModelKind::ModSbm => {
            return Err(Failure::usage(format!(
                "adv supports er, sbm and corr-er; {model:?} has no enumerable null"
            )))
        }
    };
    let report = match method {
        AdvantageMethod::ProductBasis => advantage_product_basis(&p, &q, dim, d)?,
        AdvantageMethod::GramSchmidt => advantage_gram_schmidt(&p, &q, dim, d)?,
        AdvantageMethod::Rayleigh => {
            if W::EXACT {
                return Err(Failure::usage(
                    "rayleigh runs in floating point only; drop --exact".into(),
                ));
            }
            advantage_rayleigh(&p.to_f64(), &q.to_f64(), dim, d)?
        }
    };
    Ok((report, pair))
}

fn adv(cfg: &ExperimentConfig) -> Outcome<Value> {
    let params = cfg.params()?;
    let (report, pair) = if cfg.flags.exact {
        adv_with::<BigRational>(cfg, params)?
    } else {
        adv_with::<f64>(cfg, params)?
    };
    let es = EdgeSpace::new(params.n)?;
    let classes = if report.method == AdvantageMethod::ProductBasis {
        grouped_contributions(&report, &es, pair)?
    } else {
        Value::Null
    };
    Ok(json!({
        "model": cfg.model,
        "degree": report.degree,
        "method": report.method,
        "value": report.value,
        "value_squared": report.value_squared,
        "class_contributions": classes,
    }))
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct BaseSpec {
    /// Bits per coordinate.
    dim: usize,
    null: Vec<(u64, Number)>,
    alt: Vec<(u64, Number)>,
}

fn measure<W: Scalar>(atoms: &[(u64, Number)]) -> Outcome<DiscreteMeasure<u64, W>> {
    let parsed: Vec<(u64, W)> = atoms
        .iter()
        .map(|(x, w)| Ok((*x, W::from_number(w)?)))
        .collect::<Result<_, Error>>()?;
    Ok(DiscreteMeasure::new(parsed)?)
}

fn hidden_with<W: Weight>(spec: &BaseSpec, m: usize, d: usize) -> Outcome<Value> {
    let null = measure::<W>(&spec.null)?;
    let alt = measure::<W>(&spec.alt)?;
    let base = advantage_gram_schmidt(&alt, &null, spec.dim, spec.dim.min(d))?;
    let problem = build_hidden_sample(null, alt, spec.dim, m)?;
    let composite = hidden_sample_advantage(&problem, d)?;
    let one = Number::int(1);
    let lhs = composite.value_squared.sub(&one).mul(&Number::int(m as i64));
    let rhs = base.value_squared.sub(&one);
    let identity = match (lhs.exact(), rhs.exact()) {
        (Some(a), Some(b)) => json!(a == b),
        _ => json!((lhs.value() - rhs.value()).abs() <= 1e-9 * rhs.value().abs().max(1.0)),
    };
    Ok(json!({
        "m": m,
        "degree": d,
        "base_value_squared": base.value_squared,
        "value": composite.value,
        "value_squared": composite.value_squared,
        "scaled_excess": lhs,
        "base_excess": rhs,
        "identity_holds": identity,
    }))
}

fn hidden(cfg: &ExperimentConfig) -> Outcome<Value> {
    let m = cfg.flags.m.ok_or_else(|| Failure::usage("hidden needs --M".into()))?;
    let path = cfg
        .flags
        .base_spec
        .as_ref()
        .ok_or_else(|| Failure::usage("hidden needs --base-spec".into()))?;
    let text = fs::read_to_string(path).map_err(|e| Failure::io(path, e))?;
    let spec: BaseSpec = serde_json::from_str(&text).map_err(|e| Failure::usage(format!("base spec: {e}")))?;
    let d = cfg.flags.degree.unwrap_or(spec.dim);
    if cfg.flags.exact {
        hidden_with::<BigRational>(&spec, m, d)
    } else {
        hidden_with::<f64>(&spec, m, d)
    }
}

fn xi_json<S: Scalar + std::fmt::Display>(table: &XiTable<S>) -> Outcome<Value> {
    let dual = build_dual(table)?;
    let entries: Vec<Value> = dual
        .classes
        .iter()
        .map(|c| {
            json!({
                "class": c.form.to_hex(),
                "edges": c.edges,
                "vertices": c.vertices,
                "copies": c.copies.to_string(),
                "xi": c.xi.to_f64(),
                "xi_exact": if S::EXACT { json!(c.xi.to_string()) } else { Value::Null },
            })
        })
        .collect();
    Ok(json!({
        "n": dual.n,
        "k": dual.k,
        "degree": dual.degree,
        "scale": table.scale(),
        "entries": entries,
        "norm_squared": dual.norm_squared.to_f64(),
        "norm_squared_exact": if S::EXACT { json!(dual.norm_squared.to_string()) } else { Value::Null },
        "norm": dual.norm,
    }))
}

fn xi(cfg: &ExperimentConfig) -> Outcome<Value> {
    let params = cfg.params()?;
    let d = params.degree()?;
    if cfg.flags.exact {
        xi_json(&XiTable::<Surd>::build(params, d, cfg.flags.scale)?)
    } else {
        xi_json(&XiTable::<f64>::build(params, d, cfg.flags.scale)?)
    }
}

fn skipped(e: Error) -> Outcome<Value> {
    match e {
        Error::TooLarge(msg) => Ok(json!({ "skipped": msg })),
        other => Err(other.into()),
    }
}

fn dual_check(cfg: &ExperimentConfig) -> Outcome<(Value, bool)> {
    let params = cfg.params()?;
    let d = params.degree()?;
    let system = if cfg.flags.exact {
        XiTable::<Surd>::build(params, d, cfg.flags.scale).and_then(|t| verify_linear_system(&t, params))
    } else {
        XiTable::<f64>::build(params, d, cfg.flags.scale).and_then(|t| verify_linear_system(&t, params))
    };
    let mut ok = true;
    let system = match system {
        Ok(r) => {
            ok &= if cfg.flags.exact {
                r.all_exact_zero
            } else {
                r.max_residual <= 1e-9
            };
            serde_json::to_value(r).expect("serializable")
        }
        Err(e) => skipped(e)?,
    };
    let gap = match duality_gap(params, d) {
        Ok(g) => {
            ok &= g.holds;
            serde_json::to_value(g).expect("serializable")
        }
        Err(e) => skipped(e)?,
    };
    Ok((json!({ "linear_system": system, "duality": gap }), ok))
}

#[derive(Serialize)]
struct AuditRow<'a> {
    instance: &'a str,
    lhs: f64,
    rhs: f64,
    slack: f64,
    holds: bool,
}

fn bounds_audit(cfg: &ExperimentConfig) -> Outcome<Value> {
    let params = cfg.params()?;
    let suite = cfg
        .flags
        .suite
        .ok_or_else(|| Failure::usage("bounds-audit needs a suite".into()))?;
    let audits: Vec<BoundAudit> = run_suite(suite, params)?
        .iter()
        .map(|a| a.rescaled(cfg.slack))
        .collect();
    if let Some(out) = &cfg.output {
        let mut w = csv::Writer::from_path(out).map_err(|e| Failure::usage(e.to_string()))?;
        for a in &audits {
            w.serialize(AuditRow {
                instance: &a.instance,
                lhs: a.lhs,
                rhs: a.rhs,
                slack: a.slack,
                holds: a.holds,
            })
            .map_err(|e| Failure::usage(e.to_string()))?;
        }
        w.flush().map_err(|e| Failure::io(out, e))?;
    }
    let failures: Vec<&BoundAudit> = audits.iter().filter(|a| !a.holds).collect();
    Ok(json!({
        "suite": suite,
        "audits": audits.len(),
        "failures": failures.len(),
        "failed": failures,
        "results": audits,
    }))
}

fn reduce(cfg: &ExperimentConfig) -> Outcome<Value> {
    let params = cfg.params()?;
    let rc = ReductionConfig {
        estimator: cfg.flags.estimator.unwrap_or(EstimatorKind::Greedy),
        lambda_mix: cfg.flags.lambda_mix.unwrap_or(0.5),
        trials: cfg.trials,
        seed: cfg.seed,
        c: cfg.flags.c.unwrap_or(0.5),
        thresholds: cfg.thresholds,
    };
    let report = run_reduction(params, &rc)?;
    Ok(serde_json::to_value(report).expect("serializable"))
}

fn otter(cfg: &ExperimentConfig) -> Outcome<Value> {
    let max_n = cfg.flags.max_n.unwrap_or(30);
    let counts: Vec<String> = rooted_tree_counts(max_n)?.iter().map(u128::to_string).collect();
    let est = otter_constant_estimate(max_n)?;
    Ok(json!({ "rooted_tree_counts": counts, "estimate": est }))
}
