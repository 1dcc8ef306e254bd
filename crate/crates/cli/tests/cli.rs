use std::path::Path;
use std::process::{Command, Output};

use num_rational::BigRational;
use serde_json::Value;

fn lowdeg(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_lowdeg"))
        .args(args)
        .env_remove("LOWDEG_THREADS")
        .output()
        .expect("binary runs")
}

fn ok_json(args: &[&str]) -> Value {
    let out = lowdeg(args);
    assert!(
        out.status.success(),
        "{args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn error_of(out: &Output) -> Value {
    let v: Value = serde_json::from_slice(&out.stderr).expect("stderr is a JSON error");
    assert_eq!(v["schema_version"], 1);
    v["error"].clone()
}

fn ratio(a: i64, b: i64) -> BigRational {
    BigRational::new(a.into(), b.into())
}

/// E_Q[(dP/dQ)²] for correlated Erdős–Rényi on three vertices, by listing
/// every pair of graphs and every relabelling.
fn triangle_second_moment(q: BigRational, rho: BigRational) -> BigRational {
    let one = ratio(1, 1);
    let edges = [(0, 1), (0, 2), (1, 2)];
    let p11 = &q * &q + &rho * &q * (&one - &q);
    let p10 = &q - &p11;
    let p00 = &one - &q - &q + &p11;
    let joint = |a: bool, b: bool| match (a, b) {
        (true, true) => p11.clone(),
        (false, false) => p00.clone(),
        _ => p10.clone(),
    };
    let perms = [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]];
    let index = |u: usize, v: usize| edges.iter().position(|&e| e == (u.min(v), u.max(v))).unwrap();
    let mut total = ratio(0, 1);
    for a in 0..8u32 {
        for b in 0..8u32 {
            let mut p = ratio(0, 1);
            for pi in &perms {
                let mut t = ratio(1, 1);
                for (i, &(u, v)) in edges.iter().enumerate() {
                    let j = index(pi[u], pi[v]);
                    t *= joint(a >> i & 1 == 1, b >> j & 1 == 1);
                }
                p += t / ratio(6, 1);
            }
            let mut null = ratio(1, 1);
            for bit in 0..6 {
                let x = (a | b << 3) >> bit & 1 == 1;
                null *= if x { q.clone() } else { &one - &q };
            }
            total += &p * &p / null;
        }
    }
    total
}

#[test]
fn adv_full_degree_matches_chi_square() {
    let want = triangle_second_moment(ratio(1, 3), ratio(1, 2));
    assert_eq!(want, ratio(85, 64));
    let v = ok_json(&[
        "adv", "--model", "corr-er", "--n", "3", "--q", "1/3", "--rho", "1/2", "--D", "6", "--exact",
    ]);
    assert_eq!(v["result"]["value_squared"], "85/64");
    assert_eq!(v["schema_version"], 1);
}

#[test]
fn adv_degree_three_is_five_quarters() {
    let v = ok_json(&[
        "adv", "--model", "corr-er", "--n", "3", "--q", "1/3", "--rho", "1/2", "--D", "3", "--exact",
    ]);
    assert_eq!(v["result"]["value_squared"], "5/4");
    let value = v["result"]["value"].as_f64().unwrap();
    assert!((value - 1.25f64.sqrt()).abs() < 1e-12);
}

#[test]
fn xi_lists_empty_and_triangle() {
    let v = ok_json(&[
        "xi", "--n", "6", "--k", "2", "--lambda", "1", "--eps", "3/10", "--D", "3",
    ]);
    let entries = v["result"]["entries"].as_array().unwrap();
    assert_eq!(entries.len(), 2);
    assert_eq!(entries[0]["xi"], 1.0);
    assert_eq!(entries[1]["edges"], 3);
    assert_eq!(entries[1]["copies"], "20");
}

#[test]
fn empty_config_is_a_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("empty.json");
    std::fs::write(&path, "").unwrap();
    let out = lowdeg(&["run", "--config", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(error_of(&out)["kind"], "usage");
}

#[test]
fn unknown_config_field_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("c.json");
    std::fs::write(&path, r#"{"command":"otter","colour":"red"}"#).unwrap();
    let out = lowdeg(&["run", "--config", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let msg = error_of(&out)["message"].as_str().unwrap().to_string();
    assert!(msg.contains("colour"), "{msg}");
}

#[test]
fn bad_flag_is_a_usage_error() {
    let out = lowdeg(&["adv", "--model", "nope", "--n", "3"]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(error_of(&out)["kind"], "usage");
}

#[test]
fn oversized_enumeration_exits_three() {
    let out = lowdeg(&[
        "adv", "--model", "corr-er", "--n", "9", "--q", "1/3", "--rho", "1/2", "--D", "3",
    ]);
    assert_eq!(out.status.code(), Some(3));
    assert_eq!(error_of(&out)["kind"], "too_large");
}

#[test]
fn config_file_matches_subcommand() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("c.json");
    std::fs::write(
        &path,
        r#"{"command":"adv","model":"corr-er","params":{"n":3,"q":"1/3","rho":"1/2","degree":3},"flags":{"exact":true}}"#,
    )
    .unwrap();
    let a = lowdeg(&["run", "--config", path.to_str().unwrap()]);
    let b = lowdeg(&[
        "adv", "--model", "corr-er", "--n", "3", "--q", "1/3", "--rho", "1/2", "--D", "3", "--exact",
    ]);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn reduce_is_deterministic_across_threads() {
    let args = |t: &'static str| {
        vec![
            "--threads",
            t,
            "reduce",
            "--estimator",
            "greedy",
            "--n",
            "8",
            "--q",
            "1/2",
            "--rho",
            "9/10",
            "--trials",
            "200",
            "--seed",
            "5",
        ]
    };
    let one = lowdeg(&args("1"));
    let four = lowdeg(&args("4"));
    let again = lowdeg(&args("4"));
    assert!(one.status.success());
    assert_eq!(one.stdout, four.stdout);
    assert_eq!(four.stdout, again.stdout);
}

#[test]
fn sample_writes_edge_lists_and_sidecars() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("s");
    let run = |d: &Path| {
        lowdeg(&[
            "--out",
            d.to_str().unwrap(),
            "sample",
            "--model",
            "corr-er",
            "--n",
            "10",
            "--q",
            "1/3",
            "--rho",
            "1/2",
            "--trials",
            "2",
            "--seed",
            "3",
        ])
    };
    assert!(run(&out).status.success());
    for t in 0..2 {
        for name in ["A", "B", "parent"] {
            assert!(out.join(format!("sample_{t:04}_{name}.edges")).exists());
        }
        let side: Value =
            serde_json::from_str(&std::fs::read_to_string(out.join(format!("sample_{t:04}.json"))).unwrap()).unwrap();
        let mut pi: Vec<u64> = side["pi_star"]
            .as_array()
            .unwrap()
            .iter()
            .map(|x| x.as_u64().unwrap())
            .collect();
        pi.sort();
        assert_eq!(pi, (0..10).collect::<Vec<_>>());
    }
    let other = dir.path().join("t");
    assert!(run(&other).status.success());
    for f in ["sample_0001_A.edges", "sample_0001_B.edges"] {
        assert_eq!(
            std::fs::read(out.join(f)).unwrap(),
            std::fs::read(other.join(f)).unwrap()
        );
    }
}

#[test]
fn bounds_audit_writes_csv() {
    let dir = tempfile::tempdir().unwrap();
    let params = dir.path().join("p.json");
    std::fs::write(&params, r#"{"n":6,"q":"1/4","rho":"1/3","delta":"1/200","degree":3}"#).unwrap();
    let csv = dir.path().join("a.csv");
    let v = ok_json(&[
        "--out",
        csv.to_str().unwrap(),
        "bounds-audit",
        "--suite",
        "A4",
        "--params",
        params.to_str().unwrap(),
    ]);
    assert_eq!(v["passed"], true);
    let text = std::fs::read_to_string(&csv).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("instance,lhs,rhs,slack,holds"));
    assert!(lines.count() > 0);
}

#[test]
fn hidden_sample_value() {
    let dir = tempfile::tempdir().unwrap();
    let spec = dir.path().join("b.json");
    std::fs::write(
        &spec,
        r#"{"dim":1,"null":[[0,"1/2"],[1,"1/2"]],"alt":[[0,"1/5"],[1,"4/5"]]}"#,
    )
    .unwrap();
    let v = ok_json(&["hidden", "--M", "4", "--base-spec", spec.to_str().unwrap(), "--exact"]);
    // Base advantage² is 1 + (3/5)² = 34/25, and the excess shrinks by a factor M.
    assert_eq!(v["result"]["base_value_squared"], "34/25");
    assert_eq!(v["result"]["value_squared"], "109/100");
    assert_eq!(v["result"]["identity_holds"], true);
}

#[test]
fn verify_passes() {
    let v = ok_json(&["verify"]);
    assert_eq!(v["passed"], true);
}

#[test]
fn otter_estimate() {
    let v = ok_json(&["otter", "--max-n", "20"]);
    assert_eq!(v["passed"], true);
}
