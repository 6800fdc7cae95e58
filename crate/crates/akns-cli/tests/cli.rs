use std::path::Path;

use akns_cli::dump::read_csv;
use akns_cli::{run, Outcome, RunConfig};
use serde_json::Value;

fn akns(args: &[&str]) -> Outcome {
    run(std::iter::once("akns").chain(args.iter().copied()))
}

fn path(dir: &Path, name: &str) -> String {
    dir.join(name).display().to_string()
}

/// `key = value` lines of a reduce echo.
fn echo(out: &str, key: &str) -> String {
    out.lines()
        .find_map(|l| l.strip_prefix(&format!("{key} = ")))
        .unwrap_or_else(|| panic!("no `{key}` in\n{out}"))
        .to_string()
}

fn close(got: f64, want: f64, ulps: f64) -> bool {
    (got - want).abs() <= ulps * f64::EPSILON * want.abs()
}

fn row_at<'a>(csv: &'a str, x: &str, t: &str) -> Vec<&'a str> {
    csv.lines()
        .map(|l| l.split(',').collect::<Vec<_>>())
        .find(|c| c[0] == x && c[1] == t)
        .unwrap_or_else(|| panic!("no row at ({x}, {t})"))
}

#[test]
fn verify_seed_passes() {
    let o = akns(&["verify", "--family", "seed", "--alpha", "1", "--grid", "-10:10:101,-5:5:51", "--tol", "1e-10"]);
    assert_eq!(o.code, 0, "{}", o.stderr);
    let v: Value = serde_json::from_str(&o.stdout).unwrap();
    assert_eq!(v["pass"], Value::Bool(true));
}

#[test]
fn verify_perturbed_seed_fails_and_still_reports() {
    let dir = tempfile::tempdir().unwrap();
    let rep = path(dir.path(), "r.json");
    let o = akns(&["verify", "--family", "seed", "--alpha", "1", "--perturb", "u:+0.01", "--report", &rep]);
    assert_eq!(o.code, 1);
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&rep).unwrap()).unwrap();
    assert_eq!(v["pass"], Value::Bool(false));
}

#[test]
fn verify_corrected_case1_passes() {
    for root in ["0", "1"] {
        let o = akns(&[
            "verify", "--family", "case1", "--mode", "sn", "--formulary", "lax", "--root", root, "--lambda", "0.1",
            "--alpha", "1", "--k3", "0.5", "--n", "0.1", "--tol", "1e-6",
        ]);
        assert_eq!(o.code, 0, "root {root}: {}", o.stderr);
    }
}

#[test]
fn printed_case1_map_is_a_constraint_violation() {
    let o = akns(&["verify", "--family", "case1", "--mode", "sn", "--lambda", "0.1", "--alpha", "1", "--k3", "0.5", "--n", "0.1"]);
    assert_eq!(o.code, 1);
    assert!(o.stderr.contains("k2·F − 1 vanishes"), "{}", o.stderr);
}

#[test]
fn reduce_case1_echo() {
    let o = akns(&["reduce", "--case", "1", "--mode", "sn", "--lambda", "0.1", "--alpha", "1", "--k3", "0.5", "--n", "0.1"]);
    let num = |k: &str| echo(&o.stdout, k).parse::<f64>().unwrap();
    assert_eq!(num("b0"), 0.1);
    assert!(close(num("b1"), 0.002, 4.0));
    assert_eq!(num("k2"), 10.0);
    assert!(close(num("k1"), 625.0, 16.0));
    // the assembled bundle itself is refused
    assert_eq!(o.code, 1);
    assert!(echo(&o.stdout, "status").starts_with("constraint violated"));
}

#[test]
fn reduce_case2_branch1_echo() {
    let o = akns(&["reduce", "--case", "2", "--branch", "1", "--C", "1", "--alpha", "1", "--lambda", "0.1", "--m", "0.5", "--l1", "1"]);
    assert_eq!(echo(&o.stdout, "k1"), "1.2");
    assert_eq!(echo(&o.stdout, "k3"), "0.5");
    assert_eq!(echo(&o.stdout, "l0"), "1");
}

#[test]
fn reduce_case2_k2_zero_is_elliptic() {
    let o = akns(&["reduce", "--case", "2", "--branch", "1", "--alpha", "1", "--lambda", "0.1", "--m", "0.5", "--l1", "1", "--k2", "0"]);
    assert_eq!(echo(&o.stdout, "k2"), "0");
    assert_eq!(echo(&o.stdout, "note"), "elliptic (no exponential envelope)");
}

#[test]
fn reduce_writes_ode_dense_output() {
    let dir = tempfile::tempdir().unwrap();
    let ode = path(dir.path(), "ode.csv");
    let o = akns(&[
        "reduce", "--case", "1", "--formulary", "lax", "--k3", "0.5", "--grid", "-5:5:21,-2:2:5", "--ode-csv", &ode,
    ]);
    assert_eq!(o.code, 0, "{}{}", o.stdout, o.stderr);
    let text = std::fs::read_to_string(&ode).unwrap();
    assert!(text.starts_with("xi,F,F_xi\n"));
    assert_eq!(text.lines().count(), 402);
}

#[test]
fn transform_repeat_composes() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (path(dir.path(), "a.csv"), path(dir.path(), "b.csv"));
    let grid = "-6:6:61,-2:2:11";
    assert_eq!(akns(&["transform", "--family", "seed", "--eps", "0.15", "--repeat", "2", "--grid", grid, "--csv", &a]).code, 0);
    assert_eq!(akns(&["transform", "--family", "seed", "--eps", "0.3", "--grid", grid, "--csv", &b]).code, 0);
    let sa = read_csv(&std::fs::read_to_string(&a).unwrap()).unwrap();
    let sb = read_csv(&std::fs::read_to_string(&b).unwrap()).unwrap();
    assert_eq!(sa.len(), 61 * 11);
    for (p, q) in sa.iter().zip(&sb) {
        let (p, q) = (p.values.unwrap(), q.values.unwrap());
        for (x, y) in p.iter().zip(&q) {
            assert!((x - y).norm() <= 1e-12 * y.norm().max(1.0), "{x} vs {y}");
        }
    }
}

#[test]
fn transform_with_zero_eps_reproduces_the_dump() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (path(dir.path(), "a.csv"), path(dir.path(), "b.csv"));
    assert_eq!(akns(&["export", "--family", "seed", "--csv", &a]).code, 0);
    assert_eq!(akns(&["transform", "--family", "seed", "--eps", "0", "--csv", &b]).code, 0);
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
}

#[test]
fn transformed_seed_at_origin() {
    let dir = tempfile::tempdir().unwrap();
    let csv = path(dir.path(), "t.csv");
    assert_eq!(akns(&["transform", "--family", "seed", "--eps", "0.3", "--csv", &csv]).code, 0);
    let text = std::fs::read_to_string(&csv).unwrap();
    assert_eq!(row_at(&text, "0", "0")[2], "-0.5714285714285714");
}

#[test]
fn transform_lists_the_singular_locus_and_composed_config() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = path(dir.path(), "next.toml");
    let o = akns(&["transform", "--family", "seed", "--eps", "0.45", "--repeat", "2", "--config-out", &cfg]);
    assert_eq!(o.code, 0, "{}", o.stderr);
    assert!(o.stderr.contains("singular gauge point"));
    let next = RunConfig::load(Path::new(&cfg)).unwrap();
    assert!((next.transform.eps - 0.9).abs() < 1e-15);
    assert_eq!(next.transform.repeat, 1);
}

#[test]
fn export_seed_origin_reads_minus_one() {
    let o = akns(&["export", "--family", "seed", "--alpha", "1"]);
    assert_eq!(o.code, 0);
    assert!(o.stdout.starts_with("x,t,re_u,im_u,re_v,im_v,re_f,im_f,mask\n"));
    assert_eq!(row_at(&o.stdout, "0", "0")[2], "-1");
    assert!(!o.stdout.contains('\r'));
}

#[test]
fn export_masks_singular_points_without_nan_text() {
    // 1 + 0.9 f vanishes at x = 0 when tanh 2t = −1/9
    let t0 = (-1.0f64 / 9.0).atanh() / 2.0;
    let grid = format!("-4:4:201,{t0}:0.5:2");
    let o = akns(&["export", "--family", "seed", "--eps", "0.9", "--grid", &grid]);
    assert_eq!(o.code, 0, "{}", o.stderr);
    assert!(!o.stdout.to_lowercase().contains("nan"));
    let rows: Vec<&str> = o.stdout.lines().skip(1).collect();
    assert_eq!(rows.len(), 201 * 2);
    let masked: Vec<&&str> = rows.iter().filter(|l| l.ends_with(",1")).collect();
    assert!(!masked.is_empty());
    assert!(masked.iter().all(|l| l.split(',').skip(2).take(6).all(str::is_empty)));
}

#[test]
fn export_gnuplot_needs_csv() {
    let dir = tempfile::tempdir().unwrap();
    let gp = path(dir.path(), "p.gp");
    assert_eq!(akns(&["export", "--family", "seed", "--gnuplot", &gp]).code, 2);
    let csv = path(dir.path(), "d.csv");
    assert_eq!(akns(&["export", "--family", "seed", "--gnuplot", &gp, "--csv", &csv]).code, 0);
    assert!(std::fs::read_to_string(&gp).unwrap().contains("d.csv"));
}

#[test]
fn reimported_points_reproduce_max_abs() {
    let dir = tempfile::tempdir().unwrap();
    let csv = path(dir.path(), "d.csv");
    let args = ["--family", "seed", "--eps", "0.9", "--grid", "-5:5:41,-2:2:9"];
    let mut export = vec!["export", "--csv", &csv];
    export.extend(args);
    assert_eq!(akns(&export).code, 0);
    let mut grid_run = vec!["verify"];
    grid_run.extend(args);
    let mut pts_run = vec!["verify", "--points", &csv];
    pts_run.extend(args);
    let a: Value = serde_json::from_str(&akns(&grid_run).stdout).unwrap();
    let b: Value = serde_json::from_str(&akns(&pts_run).stdout).unwrap();
    let eqs = a["equations"].as_object().unwrap();
    assert!(!eqs.is_empty());
    for (name, e) in eqs {
        let (p, q) = (e["max_abs"].as_f64().unwrap(), b["equations"][name]["max_abs"].as_f64().unwrap());
        assert!((p - q).abs() <= 1e-12, "{name}: {p} vs {q}");
    }
}

#[test]
fn specfun_examples() {
    let o = akns(&["specfun", "--which", "K", "--k", "0"]);
    assert_eq!(o.stdout, "k,K\n0,1.5707963267948966\n");
    let o = akns(&["specfun", "--which", "sn", "--k", "0.5", "--u", "1K"]);
    let v: f64 = o.stdout.lines().nth(1).unwrap().split(',').nth(2).unwrap().parse().unwrap();
    assert!((v - 1.0).abs() < 1e-12);
    let o = akns(&["specfun", "--which", "sn", "--k", "1", "--u", "1.0"]);
    assert_eq!(o.stdout.lines().nth(1).unwrap().split(',').nth(2).unwrap(), "0.7615941559557649");
}

#[test]
fn specfun_range_in_quarter_periods() {
    let o = akns(&["specfun", "--which", "sn,cn", "--k", "0.5", "--u", "0:4K:5"]);
    assert_eq!(o.code, 0, "{}", o.stderr);
    let rows: Vec<Vec<f64>> = o.stdout.lines().skip(1).map(|l| l.split(',').map(|c| c.parse().unwrap()).collect()).collect();
    assert_eq!(rows.len(), 5);
    assert!((rows[1][2] - 1.0).abs() < 1e-12 && (rows[2][3] + 1.0).abs() < 1e-12);
    assert_eq!(akns(&["specfun", "--k", "0.5", "--u", "1:4K:5"]).code, 2);
}

#[test]
fn specfun_rejects_modulus_out_of_range() {
    assert_eq!(akns(&["specfun", "--which", "sn", "--k", "1.5", "--u", "1"]).code, 2);
}

#[test]
fn config_round_trip_is_idempotent() {
    let dir = tempfile::tempdir().unwrap();
    let out = path(dir.path(), "next.toml");
    let o = akns(&[
        "transform", "--family", "seed", "--eps", "0.1", "--grid", "-3:3:7,-1:1:3", "--tol", "1e-9", "--delta", "1,0.2",
        "--config-out", &out,
    ]);
    assert_eq!(o.code, 0, "{}", o.stderr);
    let first = std::fs::read_to_string(&out).unwrap();
    let second = RunConfig::from_toml(&first).unwrap().to_toml().unwrap();
    assert_eq!(first, second);
    let third = RunConfig::from_toml(&second).unwrap().to_toml().unwrap();
    assert_eq!(second, third);
}

#[test]
fn reference_case1_parameters_are_expressible_verbatim() {
    let text = "family = \"case1\"\n\n[case1]\nmode = \"numeric\"\nC = 5\nC1 = 2\nk1 = 0.18\nk2 = 10\nlambda = 0.1\nalpha = 1\nn = 0.1\n";
    let cfg = RunConfig::from_toml(text).unwrap();
    assert_eq!((cfg.case1.c, cfg.case1.c1, cfg.case1.k1, cfg.case1.k2), (5.0, 2.0, 0.18, 10.0));
    let dir = tempfile::tempdir().unwrap();
    let p = path(dir.path(), "fig.toml");
    std::fs::write(&p, text).unwrap();
    let o = akns(&["reduce", "--config", &p]);
    // the echo comes out even though the list does not assemble
    assert_eq!(echo(&o.stdout, "k1"), "0.18");
    assert!([0, 1, 3].contains(&o.code), "{}", o.stderr);
}

#[test]
fn flags_override_file_values() {
    let dir = tempfile::tempdir().unwrap();
    let p = path(dir.path(), "c.toml");
    std::fs::write(&p, "family = \"case2\"\n[case2]\nlambda = 0.3\n").unwrap();
    let o = akns(&["reduce", "--config", &p, "--lambda", "0.1", "--branch", "1", "--l1", "1"]);
    assert_eq!(echo(&o.stdout, "lambda"), "0.1");
}

#[test]
fn bad_input_exits_2() {
    for args in [
        &["verify", "--grid", "1:0:5,0:1:2"][..],
        &["verify", "--grid", "0:1:1,0:1:2"],
        &["verify", "--tol", "0.5"],
        &["verify", "--tol", "0"],
        &["verify", "--perturb", "w:1"],
        &["verify", "--no-such-flag"],
        &["verify", "--family", "seed", "--k1", "2"],
        &["reduce", "--case", "3"],
        &["transform", "--repeat", "0"],
    ] {
        assert_eq!(akns(args).code, 2, "{args:?}");
    }
    let dir = tempfile::tempdir().unwrap();
    let p = path(dir.path(), "c.toml");
    std::fs::write(&p, "family = \"seed\"\nbogus = 1\n").unwrap();
    assert_eq!(akns(&["verify", "--config", &p]).code, 2);
}

#[test]
fn unwritable_output_exits_3() {
    let dir = tempfile::tempdir().unwrap();
    let bad = path(dir.path(), "missing/dir/out.csv");
    assert_eq!(akns(&["export", "--family", "seed", "--csv", &bad]).code, 3);
}

#[test]
fn binary_exit_statuses() {
    let bin = env!("CARGO_BIN_EXE_akns");
    let status = |args: &[&str]| std::process::Command::new(bin).args(args).output().unwrap().status.code();
    assert_eq!(status(&["verify", "--family", "seed", "--grid", "-2:2:11,-1:1:3"]), Some(0));
    assert_eq!(status(&["verify", "--family", "seed", "--grid", "-2:2:11,-1:1:3", "--perturb", "u:0.5"]), Some(1));
    assert_eq!(status(&["verify", "--grid", "nonsense"]), Some(2));
    assert_eq!(status(&["--help"]), Some(0));
}
