//! End-to-end tests of the `orlicz-flow` binary: exit codes, artifact
//! layout and formats, determinism across processes, and the table/probe
//! subcommands.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use orlicz_flow::config::ExperimentConfig;
use orlicz_flow::edb::edb_report_from_parts;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_orlicz-flow"))
}

fn write_config(dir: &Path, name: &str, body: &str) -> PathBuf {
    let path = dir.join(name);
    std::fs::write(&path, body).unwrap();
    path
}

fn exit_code(out: &Output) -> i32 {
    out.status.code().expect("process terminated by signal")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn stderr(out: &Output) -> String {
    String::from_utf8(out.stderr.clone()).unwrap()
}

fn read_json(path: &Path) -> serde_json::Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

/// Asserts a CSV float field has the fixed scientific shape
/// `d.dddddddddddddddde[-]dd` (one leading digit, sixteen fractional
/// digits, unpadded exponent) so every value round-trips to the same f64.
fn assert_sci17(field: &str) {
    let s = field.strip_prefix('-').unwrap_or(field);
    let b = s.as_bytes();
    assert!(
        b.len() >= 20 && b[0].is_ascii_digit() && b[1] == b'.',
        "bad float field `{field}`"
    );
    assert!(
        b[2..18].iter().all(u8::is_ascii_digit) && b[18] == b'e',
        "bad float field `{field}`"
    );
    let exp = s[19..].strip_prefix('-').unwrap_or(&s[19..]);
    assert!(
        !exp.is_empty() && exp.bytes().all(|c| c.is_ascii_digit()),
        "bad exponent in `{field}`"
    );
    field.parse::<f64>().expect("field parses as f64");
}

#[test]
fn run_writes_artifacts_and_exits_zero() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(
        tmp.path(),
        "q.json",
        r#"{"problem":"quadratic","tau_list":[0.1]}"#,
    );
    let out_dir = tmp.path().join("out");
    let out = bin()
        .arg("run")
        .arg("--config")
        .arg(&cfg)
        .arg("--out")
        .arg(&out_dir)
        .output()
        .unwrap();
    assert_eq!(exit_code(&out), 0, "stderr: {}", stderr(&out));
    assert!(stdout(&out).contains("tau = 1e-1: ok"), "{}", stdout(&out));

    let run_dir = out_dir.join("quadratic").join("tau_1e-1");
    for name in ["trajectory.csv", "edb.json", "summary.json"] {
        assert!(run_dir.join(name).is_file(), "{name} missing");
    }

    let summary = read_json(&run_dir.join("summary.json"));
    assert_eq!(summary["problem"], "quadratic");
    assert_eq!(summary["failed"], false);
    assert_eq!(summary["failure"], serde_json::Value::Null);
    assert_eq!(summary["steps_completed"], 10);
    assert_eq!(summary["steps_requested"], 10);
    assert_eq!(summary["nodes"], 1);
    assert_eq!(summary["classification"], "lyapunov");
    assert_eq!(summary["monotone_nonincreasing"], true);
    // implicit Euler vs the exponential: O(tau) accuracy at tau = 0.1
    let final_error = summary["final_error"].as_f64().unwrap();
    assert!(final_error > 0.0 && final_error < 0.05, "{final_error}");

    let edb = read_json(&run_dir.join("edb.json"));
    assert_eq!(edb["classification"], "lyapunov");
    assert_eq!(edb["per_interval"].as_array().unwrap().len(), 10);
}

#[test]
fn trajectory_csv_format_is_fixed() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(
        tmp.path(),
        "d.json",
        r#"{"problem":"damage","tau_list":[0.25]}"#,
    );
    let out_dir = tmp.path().join("out");
    let out = bin()
        .arg("run")
        .arg("--config")
        .arg(&cfg)
        .arg("--out")
        .arg(&out_dir)
        .output()
        .unwrap();
    assert_eq!(exit_code(&out), 0, "stderr: {}", stderr(&out));

    let csv_path = out_dir.join("damage").join("tau_2.5e-1").join("trajectory.csv");
    let bytes = std::fs::read(&csv_path).unwrap();
    assert!(!bytes.contains(&b'\r'), "line endings must be \\n only");
    let text = String::from_utf8(bytes).unwrap();
    let mut lines = text.lines();
    assert_eq!(
        lines.next().unwrap(),
        "t,node,U,xi,E,phi_step,phistar_step,fy_gap"
    );
    let mut rows = 0;
    for line in lines {
        let fields: Vec<&str> = line.split(',').collect();
        assert_eq!(fields.len(), 8, "row `{line}`");
        for (k, field) in fields.iter().enumerate() {
            if k == 1 {
                field.parse::<usize>().expect("node index");
            } else {
                assert_sci17(field);
            }
        }
        rows += 1;
    }
    // (4 steps + initial state) × 4 nodes
    assert_eq!(rows, 20);
}

#[test]
fn balance_report_recomputable_from_trajectory_csv() {
    let tmp = tempfile::tempdir().unwrap();
    let body = r#"{"problem":"damage","tau_list":[0.05]}"#;
    let cfg = write_config(tmp.path(), "d.json", body);
    let out_dir = tmp.path().join("out");
    let out = bin()
        .arg("run")
        .arg("--config")
        .arg(&cfg)
        .arg("--out")
        .arg(&out_dir)
        .output()
        .unwrap();
    assert_eq!(exit_code(&out), 0, "stderr: {}", stderr(&out));
    let run_dir = out_dir.join("damage").join("tau_5e-2");

    // rebuild states and multipliers from the CSV alone
    let text = std::fs::read_to_string(run_dir.join("trajectory.csv")).unwrap();
    let mut t_nodes: Vec<f64> = Vec::new();
    let mut states: Vec<Vec<f64>> = Vec::new();
    let mut xis: Vec<Vec<f64>> = Vec::new();
    for line in text.lines().skip(1) {
        let f: Vec<&str> = line.split(',').collect();
        let node: usize = f[1].parse().unwrap();
        if node == 0 {
            t_nodes.push(f[0].parse().unwrap());
            states.push(Vec::new());
            xis.push(Vec::new());
        }
        states.last_mut().unwrap().push(f[2].parse().unwrap());
        xis.last_mut().unwrap().push(f[3].parse().unwrap());
    }
    assert_eq!(states.len(), 21);
    let multipliers: Vec<Vec<f64>> = xis[1..].to_vec(); // row block 0 carries placeholders

    // the written floats carry 17 significant digits, so they parse back to
    // the exact binary values and the recomputed report must match the
    // written one byte for byte
    let exp = ExperimentConfig::from_json(body).unwrap().resolve().unwrap();
    let report = edb_report_from_parts(
        &exp.potential,
        &exp.energy,
        &t_nodes,
        &states,
        &multipliers,
        None,
    )
    .unwrap();
    let rendered = serde_json::to_string_pretty(&report).unwrap() + "\n";
    let written = std::fs::read_to_string(run_dir.join("edb.json")).unwrap();
    assert_eq!(rendered, written);
}

#[test]
fn identical_configs_produce_identical_artifacts() {
    let tmp = tempfile::tempdir().unwrap();
    let body = r#"{"problem":"double_well","tau_list":[0.1]}"#;
    let cfg = write_config(tmp.path(), "dw.json", body);
    let mut snapshots: Vec<Vec<(String, Vec<u8>)>> = Vec::new();
    for sub in ["a", "b"] {
        let out_dir = tmp.path().join(sub);
        let out = bin()
            .arg("run")
            .arg("--config")
            .arg(&cfg)
            .arg("--out")
            .arg(&out_dir)
            .output()
            .unwrap();
        assert_eq!(exit_code(&out), 0, "stderr: {}", stderr(&out));
        let run_dir = out_dir.join("double_well").join("tau_1e-1");
        snapshots.push(
            ["trajectory.csv", "edb.json", "summary.json"]
                .iter()
                .map(|n| (n.to_string(), std::fs::read(run_dir.join(n)).unwrap()))
                .collect(),
        );
    }
    for ((name, a), (_, b)) in snapshots[0].iter().zip(&snapshots[1]) {
        assert_eq!(a, b, "{name} differs between identical runs");
    }
}

#[test]
fn check_mode_passes_and_is_deterministic_across_processes() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), "q.json", r#"{"problem":"quadratic"}"#);
    let mut outputs = Vec::new();
    for sub in ["a", "b"] {
        let out_dir = tmp.path().join(sub);
        let out = bin()
            .arg("run")
            .arg("--config")
            .arg(&cfg)
            .arg("--check")
            .arg("--out")
            .arg(&out_dir)
            .output()
            .unwrap();
        assert_eq!(exit_code(&out), 0, "stderr: {}", stderr(&out));
        let report = std::fs::read(out_dir.join("check_report.json")).unwrap();
        outputs.push((out.stdout, report));
    }
    let text = String::from_utf8(outputs[0].0.clone()).unwrap();
    assert!(text.contains("14/14 criteria pass"), "{text}");
    assert!(!text.contains("FAIL"), "{text}");
    assert_eq!(outputs[0].0, outputs[1].0, "stdout differs between runs");
    assert_eq!(
        outputs[0].1, outputs[1].1,
        "check_report.json differs between runs"
    );
    let report: serde_json::Value = serde_json::from_slice(&outputs[0].1).unwrap();
    assert_eq!(report["all_pass"], true);
    assert_eq!(report["criteria"].as_array().unwrap().len(), 14);
}

#[test]
fn solver_failure_exits_three_with_partial_artifacts() {
    let tmp = tempfile::tempdir().unwrap();
    // two inner iterations cannot reach the default tolerance on the
    // coupled Dirichlet energy, so the very first step fails
    let cfg = write_config(
        tmp.path(),
        "ac.json",
        r#"{"problem":"ac_gurtin","tolerances":{"max_inner_iterations":2}}"#,
    );
    let out_dir = tmp.path().join("out");
    let out = bin()
        .arg("run")
        .arg("--config")
        .arg(&cfg)
        .arg("--out")
        .arg(&out_dir)
        .output()
        .unwrap();
    assert_eq!(exit_code(&out), 3, "stderr: {}", stderr(&out));
    assert!(stdout(&out).contains("FAILED"), "{}", stdout(&out));

    let run_dir = out_dir.join("ac_gurtin").join("tau_1e-3");
    let summary = read_json(&run_dir.join("summary.json"));
    assert_eq!(summary["failed"], true);
    assert!(
        summary["failure"].as_str().unwrap().contains("step 1 failed"),
        "{summary}"
    );
    assert!(run_dir.join("trajectory.csv").is_file());
    // only the initial state exists, so there is no balance report
    assert!(!run_dir.join("edb.json").exists());
}

#[test]
fn config_errors_exit_two() {
    let tmp = tempfile::tempdir().unwrap();
    let cases = [
        (r#"{"problem":"quadratic","bogus":1}"#, "unknown field"),
        (
            r#"{"problem":"bp_ode","params":{"p":3.0}}"#,
            "params.p: not used by preset `bp_ode`",
        ),
        (
            r#"{"problem":"quadratic","tau_list":[0.3]}"#,
            "does not divide",
        ),
        (r#"{"problem":"pendulum"}"#, "unknown preset"),
        (r#"not json"#, "config parse"),
    ];
    for (i, (body, needle)) in cases.iter().enumerate() {
        let cfg = write_config(tmp.path(), &format!("c{i}.json"), body);
        let out = bin().arg("run").arg("--config").arg(&cfg).output().unwrap();
        assert_eq!(exit_code(&out), 2, "config {body}");
        assert!(
            stderr(&out).contains(needle),
            "config {body}: stderr {}",
            stderr(&out)
        );
    }

    // unreadable config path
    let out = bin()
        .arg("run")
        .arg("--config")
        .arg(tmp.path().join("missing.json"))
        .output()
        .unwrap();
    assert_eq!(exit_code(&out), 2);
    assert!(stderr(&out).contains("cannot read"), "{}", stderr(&out));

    // clap usage error: missing required --config
    let out = bin().arg("run").output().unwrap();
    assert_eq!(exit_code(&out), 2);
}

#[test]
fn thread_cap_env_var() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(
        tmp.path(),
        "q.json",
        r#"{"problem":"quadratic","tau_list":[0.5,0.25]}"#,
    );
    let run = |threads: &str| {
        bin()
            .arg("run")
            .arg("--config")
            .arg(&cfg)
            .arg("--out")
            .arg(tmp.path().join("out"))
            .env("ORLICZ_FLOW_THREADS", threads)
            .output()
            .unwrap()
    };
    let ok = run("1");
    assert_eq!(exit_code(&ok), 0, "stderr: {}", stderr(&ok));
    assert!(stdout(&ok).contains("tau = 5e-1: ok"));

    let zero = run("0");
    assert_eq!(exit_code(&zero), 2);
    assert!(stderr(&zero).contains("ORLICZ_FLOW_THREADS"), "{}", stderr(&zero));

    let garbage = run("many");
    assert_eq!(exit_code(&garbage), 2);
    assert!(
        stderr(&garbage).contains("cannot parse `many`"),
        "{}",
        stderr(&garbage)
    );
}

#[test]
fn table_reports_first_order_convergence() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), "bp.json", r#"{"problem":"bp_ode"}"#);
    let out = bin().arg("table").arg("--config").arg(&cfg).output().unwrap();
    assert_eq!(exit_code(&out), 0, "stderr: {}", stderr(&out));
    let text = stdout(&out);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "tau,sup_error,edb_residual,empirical_order,note");
    assert_eq!(lines.len(), 4);
    for row in &lines[2..] {
        let fields: Vec<&str> = row.split(',').collect();
        let order: f64 = fields[3].parse().unwrap();
        assert!((0.8..=1.2).contains(&order), "order {order} in row `{row}`");
        assert_eq!(fields[4], "", "no plateau expected in `{row}`");
    }
}

#[test]
fn table_flags_error_plateau() {
    let tmp = tempfile::tempdir().unwrap();
    // on a 9-node interval the spatial error floor overtakes the shrinking
    // step error, so the empirical order collapses on the finest steps
    let cfg = write_config(
        tmp.path(),
        "heat.json",
        r#"{"problem":"heat","params":{"nodes":9},"tau_list":[0.02,0.01,0.005,0.0025,0.00125]}"#,
    );
    let out = bin().arg("table").arg("--config").arg(&cfg).output().unwrap();
    assert_eq!(exit_code(&out), 0, "stderr: {}", stderr(&out));
    let text = stdout(&out);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 6);
    assert!(
        lines.last().unwrap().ends_with(",plateau"),
        "last row should flag the plateau: {text}"
    );
    let first_order: f64 = lines[2].split(',').nth(3).unwrap().parse().unwrap();
    assert!(first_order > 0.5, "coarse steps still converge: {text}");
}

#[test]
fn table_requires_reference_and_three_steps() {
    let tmp = tempfile::tempdir().unwrap();
    let no_oracle = write_config(tmp.path(), "d.json", r#"{"problem":"damage"}"#);
    let out = bin()
        .arg("table")
        .arg("--config")
        .arg(&no_oracle)
        .output()
        .unwrap();
    assert_eq!(exit_code(&out), 2);
    assert!(
        stderr(&out).contains("no closed-form reference"),
        "{}",
        stderr(&out)
    );

    let two_taus = write_config(
        tmp.path(),
        "q.json",
        r#"{"problem":"quadratic","tau_list":[0.1,0.05]}"#,
    );
    let out = bin()
        .arg("table")
        .arg("--config")
        .arg(&two_taus)
        .output()
        .unwrap();
    assert_eq!(exit_code(&out), 2);
    assert!(
        stderr(&out).contains("at least 3 step sizes"),
        "{}",
        stderr(&out)
    );
}

#[test]
fn probe_reports_growth_diagnostics() {
    let out = bin()
        .arg("probe")
        .arg("--potential")
        .arg("power:2")
        .output()
        .unwrap();
    assert_eq!(exit_code(&out), 0, "stderr: {}", stderr(&out));
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["potential"], "power:2");
    assert_eq!(v["delta2"]["passes"], true);
    assert!((v["delta2"]["k"].as_f64().unwrap() - 4.0).abs() <= 1e-9);
    assert!((v["coercivity"]["min_value"].as_f64().unwrap() - 0.5).abs() <= 1e-12);
    for dir in v["superlinearity"].as_array().unwrap() {
        assert_eq!(dir["superlinear"], true);
    }
}

#[test]
fn probe_handles_one_sided_and_bounded_potentials() {
    // one-sided domain: the doubling probe cannot run and says why
    let out = bin()
        .arg("probe")
        .arg("--potential")
        .arg("damage_primal")
        .output()
        .unwrap();
    assert_eq!(exit_code(&out), 0, "stderr: {}", stderr(&out));
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert!(
        v["delta2"]["error"].as_str().unwrap().contains("domain"),
        "{v}"
    );

    // bounded effective domain: the fixed sample set leaves the domain
    let out = bin()
        .arg("probe")
        .arg("--potential")
        .arg("indicator_ball:1")
        .output()
        .unwrap();
    assert_eq!(exit_code(&out), 0, "stderr: {}", stderr(&out));
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert!(
        v["delta2"]["error"]
            .as_str()
            .unwrap()
            .contains("outside the domain"),
        "{v}"
    );
    assert_eq!(v["potential"], "indicator_ball:1");

    // exponential growth: the doubling ratios keep rising, so no Δ2
    let out = bin()
        .arg("probe")
        .arg("--potential")
        .arg("bp_dual")
        .output()
        .unwrap();
    assert_eq!(exit_code(&out), 0, "stderr: {}", stderr(&out));
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["delta2"]["passes"], false);
    assert_eq!(v["delta2"]["k"], serde_json::Value::Null);

    // bad names and malformed arguments are usage errors
    let out = bin()
        .arg("probe")
        .arg("--potential")
        .arg("nope")
        .output()
        .unwrap();
    assert_eq!(exit_code(&out), 2);
    assert!(stderr(&out).contains("unknown potential"), "{}", stderr(&out));

    let out = bin().arg("probe").arg("--potential").arg("power").output().unwrap();
    assert_eq!(exit_code(&out), 2);
    assert!(
        stderr(&out).contains("needs a numeric argument"),
        "{}",
        stderr(&out)
    );
}
