use std::path::Path;
use std::process::{Command, Output};

fn warpboot(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_warpboot"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn write_config(dir: &Path, name: &str, body: &str) -> String {
    let path = dir.join(name);
    std::fs::write(&path, body).unwrap();
    path.to_str().unwrap().to_string()
}

const SMALL_BIAS: &str = r#"
schema_version = 1
experiment = "bias"
functionals = ["cube", "sine"]
n = [12]
b = [60]
c = [1, 3]
trials = 24
"#;

const SMALL_COVERAGE: &str = r#"
schema_version = 1
experiment = "coverage"
n = [10]
b = [40]
c = [8]
trials = 16
alpha = [0.8, 0.9]
"#;

#[test]
fn output_is_identical_across_thread_counts() {
    let dir = tempfile::tempdir().unwrap();
    for (name, body, cmd) in [
        ("b.toml", SMALL_BIAS, "bias"),
        ("c.toml", SMALL_COVERAGE, "coverage"),
    ] {
        let cfg = write_config(dir.path(), name, body);
        let mut outputs = Vec::new();
        for threads in ["1", "3"] {
            let out = dir.path().join(format!("{cmd}-{threads}.csv"));
            let o = warpboot(&[
                cmd,
                "--config",
                &cfg,
                "--threads",
                threads,
                "--out",
                out.to_str().unwrap(),
            ]);
            assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
            outputs.push(std::fs::read(out).unwrap());
        }
        assert_eq!(outputs[0], outputs[1], "{cmd}");
        assert!(outputs[0].len() > 100);
    }
}

#[test]
fn flags_override_config() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "b.toml", SMALL_BIAS);
    let o = warpboot(&[
        "bias", "--config", &cfg, "--trials", "1", "--seed", "5", "--format", "json",
    ]);
    assert!(o.status.success());
    let rows: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    let rows = rows.as_array().unwrap();
    assert_eq!(rows.len(), 2 * 3);
    assert!(rows
        .iter()
        .all(|r| r["trials"] == 1 && r["mc_se"].is_null()));
}

#[test]
fn oracle_subcommand() {
    let o = warpboot(&["oracle"]);
    assert!(o.status.success());
    let text = String::from_utf8(o.stdout).unwrap();
    assert!(text.starts_with("generator,functional,n,analytic_bias,leading_term,tau_squared\n"));
    assert!(text.contains("exponential,cube,20,1.24,1.2,576"));
}

#[test]
fn config_errors_exit_with_2() {
    let dir = tempfile::tempdir().unwrap();
    let bad = write_config(
        dir.path(),
        "bad.toml",
        "schema_version = 1\nexperiment = \"bias\"\ntrials = 0\n",
    );
    assert_eq!(warpboot(&["bias", "--config", &bad]).status.code(), Some(2));
    let other = write_config(dir.path(), "cov.toml", SMALL_COVERAGE);
    assert_eq!(
        warpboot(&["bias", "--config", &other]).status.code(),
        Some(2)
    );
    assert_eq!(
        warpboot(&["bias", "--config", "/nonexistent/x.toml"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        warpboot(&["bias", "--format", "xml"]).status.code(),
        Some(2)
    );
    assert_eq!(
        warpboot(&["variance-check", "--trials", "0"]).status.code(),
        Some(2)
    );
}
