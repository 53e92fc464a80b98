use std::path::{Path, PathBuf};
use std::process::Command;

use causal_probe_cli::{canonical_json, format_value, run_cli, scenario_digest};
use causal_probe_core::harness::Scenario;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_causal-probe"))
}

fn corpus() -> Vec<PathBuf> {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../scenarios");
    let mut v: Vec<PathBuf> = std::fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|e| e == "json"))
        .collect();
    v.sort();
    v
}

fn subcommand(path: &Path) -> &'static str {
    let n = path.file_name().unwrap().to_str().unwrap();
    if n.starts_with("spin") {
        "spin"
    } else if n.starts_with("oscillator") {
        "ho"
    } else {
        "field"
    }
}

fn call(args: &[&str]) -> (i32, String, String) {
    let (mut out, mut err) = (Vec::new(), Vec::new());
    let mut full = vec!["causal-probe"];
    full.extend_from_slice(args);
    let code = run_cli(full, &mut out, &mut err);
    (
        code,
        String::from_utf8(out).unwrap(),
        String::from_utf8(err).unwrap(),
    )
}

fn csv_rows(text: &str, table: &str) -> Vec<Vec<String>> {
    let start = text.find(&format!("# {table}.csv\n")).unwrap();
    let body = &text[start..]
        .lines()
        .skip(2)
        .take_while(|l| !l.is_empty())
        .collect::<Vec<_>>()
        .join("\n");
    csv::ReaderBuilder::new()
        .has_headers(false)
        .from_reader(body.as_bytes())
        .records()
        .map(|r| r.unwrap().iter().map(String::from).collect())
        .collect()
}

#[test]
fn spin_qndsv_row() {
    let (code, out, _) = call(&[
        "spin",
        "qndsv",
        "--target",
        "up,right",
        "--alice",
        "rotate-y:1.5707963",
        "--obs",
        "sBz",
    ]);
    assert_eq!(code, 0);
    let rows = csv_rows(&out, "values");
    assert_eq!(rows.len(), 1);
    assert_eq!(rows[0][0], "qndsv:up,right");
    assert_eq!(rows[0][2], "sBz");
    let after: f64 = rows[0][4].parse().unwrap();
    // the angle is given to 7 digits, so compare at that level
    assert!((after - 0.25).abs() < 1e-7);
}

#[test]
fn field_naive_rows() {
    let (code, out, _) = call(&[
        "field",
        "naive",
        "--d",
        "1",
        "--N",
        "8",
        "--a",
        "1",
        "--mass",
        "1",
        "--x",
        "0",
        "--y",
        "3",
        "--p-index",
        "1",
        "--lambda",
        "0.3",
    ]);
    assert_eq!(code, 0);
    let rows = csv_rows(&out, "values");
    let names: Vec<&str> = rows.iter().map(|r| r[2].as_str()).collect();
    assert_eq!(names, ["phi_y", "pi_y", "phi2_y", "pi2_y"]);
    let m = causal_probe_core::field::build_modes(
        &causal_probe_core::field::LatticeSpec::new(1, 8, 1.0, 1.0, 1.0).unwrap(),
    )
    .unwrap();
    let e = causal_probe_core::field::naive_np_expectations(
        &m,
        &causal_probe_core::field::KickSpec::new(vec![0], 0.3),
        &[3],
        &[1],
    )
    .unwrap();
    for (row, v) in rows.iter().zip([e.phi, e.pi, e.phi2, e.pi2]) {
        assert_eq!(row[4], format_value(v));
    }
}

#[test]
fn oscillator_flags() {
    let (code, out, _) = call(&[
        "ho", "naive", "--lambda", "0.4", "--p-a", "0.2", "--p-b", "-0.1", "--obs", "PB",
    ]);
    assert_eq!(code, 0);
    let after: f64 = csv_rows(&out, "values")[0][4].parse().unwrap();
    assert!((after + (0.2 + 0.1 + 0.4) / 2.0).abs() < 1e-8);
}

#[test]
fn exit_codes() {
    assert_eq!(call(&["--bogus"]).0, 64);
    assert_eq!(call(&["spin", "--nope"]).0, 64);
    assert_eq!(call(&["field", "naive", "--d", "1"]).0, 64);
    assert_eq!(call(&["--help"]).0, 0);
    assert_eq!(call(&["--version"]).0, 0);
    assert_eq!(call(&["spin", "s2", "--basis", "diagonal"]).0, 2);
    assert_eq!(
        call(&["ho", "naive", "--lambda", "0.5", "--trunc", "4"]).0,
        3
    );
    assert_eq!(call(&["validate", "/nonexistent/scenario.json"]).0, 2);
    let (code, _, err) = call(&[
        "field",
        "qndsv",
        "--d",
        "1",
        "--N",
        "8",
        "--a",
        "1",
        "--mass",
        "1",
        "--x",
        "0",
        "--y",
        "3",
        "--p-index",
        "4",
    ]);
    assert_eq!(code, 2);
    assert!(err.contains("self-conjugate"), "{err}");
}

#[test]
fn corpus_validates() {
    let files = corpus();
    assert!(files.len() >= 8);
    let mut args = vec!["validate".to_string()];
    args.extend(files.iter().map(|p| p.display().to_string()));
    let refs: Vec<&str> = args.iter().map(|s| s.as_str()).collect();
    let (code, out, _) = call(&refs);
    assert_eq!(code, 0, "{out}");
    assert_eq!(
        out.lines().filter(|l| l.starts_with("ok ")).count(),
        files.len()
    );
}

#[test]
fn unknown_keys_are_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let text = std::fs::read_to_string(&corpus()[0]).unwrap();
    let mut v: serde_json::Value = serde_json::from_str(&text).unwrap();
    v["colour"] = serde_json::json!("blue");
    let path = dir.path().join("bad.json");
    std::fs::write(&path, v.to_string()).unwrap();
    assert_eq!(call(&["validate", path.to_str().unwrap()]).0, 2);
}

#[test]
fn corpus_round_trips_byte_identical() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    for f in corpus() {
        let stem = f.file_stem().unwrap().to_str().unwrap().to_string();
        for root in [a.path(), b.path()] {
            let status = bin()
                .args([
                    "--out",
                    root.join(&stem).to_str().unwrap(),
                    subcommand(&f),
                    "--scenario",
                    f.to_str().unwrap(),
                ])
                .output()
                .unwrap();
            assert!(
                status.status.success(),
                "{}",
                String::from_utf8_lossy(&status.stderr)
            );
        }
        let mut names: Vec<_> = std::fs::read_dir(a.path().join(&stem))
            .unwrap()
            .map(|e| e.unwrap().file_name())
            .filter(|n| n.to_str().unwrap().ends_with(".csv"))
            .collect();
        names.sort();
        assert!(!names.is_empty());
        for n in names {
            let x = std::fs::read(a.path().join(&stem).join(&n)).unwrap();
            let y = std::fs::read(b.path().join(&stem).join(&n)).unwrap();
            assert_eq!(x, y, "{stem}/{n:?}");
            assert!(!x.contains(&b'\r'));
        }
    }
}

#[test]
fn thread_count_does_not_change_output() {
    let f = corpus()
        .into_iter()
        .find(|p| p.ends_with("field_packet.json"))
        .unwrap();
    let run = |threads: &str| {
        bin()
            .env("CAUSAL_PROBE_THREADS", threads)
            .args(["field", "--scenario", f.to_str().unwrap()])
            .output()
            .unwrap()
    };
    let one = run("1");
    let four = run("4");
    assert!(one.status.success() && four.status.success());
    assert_eq!(one.stdout, four.stdout);
    assert_eq!(run("zero").status.code(), Some(2));
}

#[test]
fn manifest_contents() {
    let dir = tempfile::tempdir().unwrap();
    let f = corpus()
        .into_iter()
        .find(|p| p.ends_with("spin_qndsv.json"))
        .unwrap();
    let out = dir.path().join("run");
    let (code, stdout, _) = call(&[
        "--out",
        out.to_str().unwrap(),
        "spin",
        "--scenario",
        f.to_str().unwrap(),
    ]);
    assert_eq!(code, 0);
    assert!(stdout.contains("signaling measure"));
    let m: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out.join("manifest.json")).unwrap()).unwrap();
    let s: Scenario = serde_json::from_str(&std::fs::read_to_string(&f).unwrap()).unwrap();
    assert_eq!(m["scenario_digest"], scenario_digest(&s));
    assert_eq!(m["version"], env!("CARGO_PKG_VERSION"));
    assert_eq!(m["policy"]["tail"], 1e-8);
    assert!(m["wall_clock_seconds"].as_f64().unwrap() >= 0.0);
    for t in ["values", "signaling", "compare"] {
        let p = m["outputs"][t].as_str().unwrap();
        assert!(Path::new(p).exists());
    }
}

#[test]
fn digest_ignores_key_order() {
    let f = corpus()
        .into_iter()
        .find(|p| p.ends_with("field_packet.json"))
        .unwrap();
    let text = std::fs::read_to_string(&f).unwrap();
    let v: serde_json::Value = serde_json::from_str(&text).unwrap();
    // rebuild every object with reversed key order
    fn reverse(v: &serde_json::Value) -> String {
        match v {
            serde_json::Value::Object(m) => {
                let parts: Vec<String> = m
                    .iter()
                    .rev()
                    .map(|(k, v)| format!("{:?}:{}", k, reverse(v)))
                    .collect();
                format!("{{{}}}", parts.join(","))
            }
            serde_json::Value::Array(a) => {
                format!("[{}]", a.iter().map(reverse).collect::<Vec<_>>().join(","))
            }
            other => other.to_string(),
        }
    }
    let reordered = reverse(&v);
    assert_ne!(
        reordered.replace([' ', '\n'], ""),
        text.replace([' ', '\n'], "")
    );
    let a: Scenario = serde_json::from_str(&text).unwrap();
    let b: Scenario = serde_json::from_str(&reordered).unwrap();
    assert_eq!(scenario_digest(&a), scenario_digest(&b));
    assert_eq!(canonical_json(&a), canonical_json(&b));
}

#[test]
fn natural_units_flag() {
    let dir = tempfile::tempdir().unwrap();
    let mut v: serde_json::Value = serde_json::from_str(
        &std::fs::read_to_string(
            corpus()
                .into_iter()
                .find(|p| p.ends_with("spin_qndsv.json"))
                .unwrap(),
        )
        .unwrap(),
    )
    .unwrap();
    v["system"]["spin"].as_object_mut().unwrap().remove("hbar");
    let path = dir.path().join("no_hbar.json");
    std::fs::write(&path, v.to_string()).unwrap();
    let p = path.to_str().unwrap();
    assert_eq!(call(&["validate", p]).0, 2);
    assert_eq!(call(&["--natural-units", "validate", p]).0, 0);
    assert_eq!(call(&["spin", "--scenario", p]).0, 2);
    let (code, out, _) = call(&[
        "--natural-units",
        "spin",
        "--scenario",
        p,
        "--obs",
        "sBz",
        "--grid",
        "1.5707963267948966",
    ]);
    assert_eq!(code, 0);
    let after: f64 = csv_rows(&out, "values")[0][4].parse().unwrap();
    assert!((after - 0.25).abs() < 1e-12);
    // ħ = 2 doubles every spin expectation
    let (_, out, _) = call(&[
        "spin",
        "--scenario",
        p,
        "--hbar",
        "2",
        "--obs",
        "sBz",
        "--grid",
        "1.5707963267948966",
    ]);
    let after: f64 = csv_rows(&out, "values")[0][4].parse().unwrap();
    assert!((after - 0.5).abs() < 1e-12);
}

#[test]
fn sweep_and_compare_commands() {
    let dir = tempfile::tempdir().unwrap();
    let f = corpus()
        .into_iter()
        .find(|p| p.ends_with("field_naive_volume.json"))
        .unwrap();
    let (code, out, _) = call(&["sweep", f.to_str().unwrap()]);
    assert_eq!(code, 0);
    let fit = &csv_rows(&out, "sweep_fit")[0];
    assert_eq!(fit[3], "log_log");
    let slope: f64 = fit[4].parse().unwrap();
    assert!((slope + 1.0).abs() <= 0.05);
    let (code, _, _) = call(&[
        "sweep",
        f.to_str().unwrap(),
        "--axis",
        "s_cut",
        "--values",
        "4,8,16",
    ]);
    assert_eq!(code, 2);
    let (code, _, _) = call(&["sweep", f.to_str().unwrap(), "--values", "4,8"]);
    assert_eq!(code, 2);

    let s = corpus()
        .into_iter()
        .find(|p| p.ends_with("spin_ambiguity.json"))
        .unwrap();
    let out_dir = dir.path().join("cmp");
    let (code, _, _) = call(&[
        "--out",
        out_dir.to_str().unwrap(),
        "compare",
        s.to_str().unwrap(),
        "--schemes",
        "s2-bell,sz-standard,none",
    ]);
    assert_eq!(code, 0);
    let text = std::fs::read_to_string(out_dir.join("compare.csv")).unwrap();
    assert!(text.starts_with("scheme,observable,before,after,derivative\n"));
    assert_eq!(
        call(&["compare", s.to_str().unwrap(), "--schemes", "none"]).0,
        2
    );
}

#[test]
fn number_format() {
    assert_eq!(format_value(-0.0), "0.0000000000000000e0");
    assert_eq!(format_value(0.25), "2.5000000000000000e-1");
    assert_eq!(format_value(-1.0 / 3.0), "-3.3333333333333331e-1");
    assert_eq!(format_value(f64::NAN), "NaN");
    let x = 0.1 + 0.2;
    assert_eq!(format_value(x).parse::<f64>().unwrap(), x);
}

struct ClosedPipe;

impl std::io::Write for ClosedPipe {
    fn write(&mut self, _: &[u8]) -> std::io::Result<usize> {
        Err(std::io::ErrorKind::BrokenPipe.into())
    }

    fn flush(&mut self) -> std::io::Result<()> {
        Ok(())
    }
}

#[test]
fn closed_stdout_exits_quietly() {
    let mut err = Vec::new();
    let code = run_cli(
        ["causal-probe", "spin", "qndsv", "--target", "up,right"],
        &mut ClosedPipe,
        &mut err,
    );
    assert_eq!(code, 0);
    assert!(err.is_empty());
}
