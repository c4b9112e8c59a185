use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use antiassoc::measure::{Base, MeasureModel};
use antiassoc_cli::config::{JobConfig, Overrides};
use antiassoc_cli::model_file::ModelFile;
use tempfile::TempDir;

fn config(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../../configs")
        .join(name)
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_antiassoc"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn run_cmd(cmd: &str, cfg: &Path, out: &Path, extra: &[&str]) -> Output {
    let mut args = vec![
        cmd,
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
    ];
    args.extend_from_slice(extra);
    run(&args)
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn read_csv(path: &Path) -> Vec<Vec<String>> {
    let mut rdr = csv::Reader::from_path(path).unwrap();
    rdr.records()
        .map(|r| r.unwrap().iter().map(String::from).collect())
        .collect()
}

fn write_config(dir: &Path, text: &str) -> PathBuf {
    let p = dir.join("job.toml");
    fs::write(&p, text).unwrap();
    p
}

const GOOD: [&str; 4] = [
    "u_two_masses.toml",
    "u_to_t.toml",
    "grosjean_r1.toml",
    "grosjean_r2.toml",
];

#[test]
fn every_command_succeeds_on_good_configs() {
    for name in GOOD {
        for cmd in ["coeffs", "eval", "measure", "ode"] {
            let dir = TempDir::new().unwrap();
            let o = run_cmd(cmd, &config(name), dir.path(), &[]);
            assert_eq!(
                code(&o),
                0,
                "{cmd} {name}: {}",
                String::from_utf8_lossy(&o.stderr)
            );
        }
    }
}

#[test]
fn verify_passes_on_good_configs() {
    for name in GOOD {
        let dir = TempDir::new().unwrap();
        let o = run_cmd("verify", &config(name), dir.path(), &[]);
        assert_eq!(
            code(&o),
            0,
            "{name}: {}",
            String::from_utf8_lossy(&o.stdout)
        );
        let text = fs::read_to_string(dir.path().join("verify.txt")).unwrap();
        assert!(text.contains("verification passed"));
        let json: serde_json::Value =
            serde_json::from_str(&fs::read_to_string(dir.path().join("verify.json")).unwrap())
                .unwrap();
        assert_eq!(json["passed"], serde_json::Value::Bool(true));
    }
}

#[test]
fn corrupted_measure_fails_verification() {
    let dir = TempDir::new().unwrap();
    let o = run_cmd("verify", &config("corrupted_a0.toml"), dir.path(), &[]);
    assert_eq!(code(&o), 2);
    let text = fs::read_to_string(dir.path().join("verify.txt")).unwrap();
    assert!(
        text.lines().any(|l| l.starts_with("FAIL gram_deviation")),
        "{text}"
    );
}

#[test]
fn config_errors_exit_3() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("out");
    let bad = [
        "[base]\nkind = \"chebyshev_u\"\n[extension]\nb = [0]\na2 = [1]\nbogus = 1\n",
        "[base]\nkind = \"laguerre\"\n[extension]\nb = [0]\na2 = [1]\n",
        "[base]\nkind = \"chebyshev_u\"\n[extension]\nb = [0, 1]\na2 = [1]\n",
        "[base]\nkind = \"chebyshev_u\"\n[extension]\nb = [0]\na2 = [-1]\n",
        "[base]\nkind = \"grosjean1\"\nalpha = 0.5\n[extension]\nb = [0]\na2 = [1]\n",
        "this is not toml",
    ];
    for text in bad {
        let cfg = write_config(dir.path(), text);
        let o = run_cmd("coeffs", &cfg, &out, &[]);
        assert_eq!(code(&o), 3, "{text}");
    }
    let o = run(&["coeffs", "--out", out.to_str().unwrap()]);
    assert_eq!(code(&o), 3, "missing --config");
    let o = run_cmd("coeffs", &dir.path().join("absent.toml"), &out, &[]);
    assert_eq!(code(&o), 3, "missing file");
    let o = run(&["frobnicate"]);
    assert_eq!(code(&o), 3, "unknown subcommand");
    let o = run_cmd("eval", &config("u_to_t.toml"), &out, &["--grid", "many"]);
    assert_eq!(code(&o), 3, "malformed flag value");
}

#[test]
fn masses_json_round_trips_to_model() {
    for name in GOOD {
        let dir = TempDir::new().unwrap();
        assert_eq!(code(&run_cmd("measure", &config(name), dir.path(), &[])), 0);
        let file = ModelFile::read(&dir.path().join("masses.json")).unwrap();
        let job = JobConfig::from_path(&config(name), &Overrides::default()).unwrap();
        let built =
            MeasureModel::build(job.base.measure_base().unwrap(), job.measure_params()).unwrap();
        assert_eq!(file.to_model().unwrap(), built, "{name}");
        assert!(
            (file.total_mass - 1.0).abs() < 1e-7,
            "{name}: {}",
            file.total_mass
        );
    }
}

#[test]
fn two_mass_case_lists_symmetric_masses() {
    let dir = TempDir::new().unwrap();
    assert_eq!(
        code(&run_cmd(
            "measure",
            &config("u_two_masses.toml"),
            dir.path(),
            &[]
        )),
        0
    );
    let file = ModelFile::read(&dir.path().join("masses.json")).unwrap();
    let x0 = 2.0 / 3f64.sqrt();
    assert_eq!(file.masses.len(), 2);
    assert!((file.masses[0].x + x0).abs() < 1e-12 && (file.masses[1].x - x0).abs() < 1e-12);
    for m in &file.masses {
        assert!((m.mass - 1.0 / 3.0).abs() < 1e-10, "{}", m.mass);
    }
    assert!((file.continuous_mass - 1.0 / 3.0).abs() < 1e-8);
}

#[test]
fn chebyshev_t_density_from_u_base() {
    let dir = TempDir::new().unwrap();
    assert_eq!(
        code(&run_cmd(
            "measure",
            &config("u_to_t.toml"),
            dir.path(),
            &["--grid", "301"]
        )),
        0
    );
    let rows = read_csv(&dir.path().join("density.csv"));
    assert_eq!(rows.len(), 301);
    for row in rows {
        let x: f64 = row[0].parse().unwrap();
        let d: f64 = row[1].parse().unwrap();
        let t = 1.0 / (std::f64::consts::PI * (1.0 - x * x).sqrt());
        assert!((d - t).abs() <= 1e-12 * t, "x={x}: {d} vs {t}");
    }
    let file = ModelFile::read(&dir.path().join("masses.json")).unwrap();
    assert!(file.masses.is_empty());
    assert_eq!(file.to_model().unwrap().base(), &Base::ChebyshevU);
}

#[test]
fn ode_residuals_vanish_exactly() {
    for name in GOOD {
        let dir = TempDir::new().unwrap();
        let o = run_cmd("ode", &config(name), dir.path(), &[]);
        assert_eq!(code(&o), 0, "{name}");
        let json: serde_json::Value =
            serde_json::from_str(&fs::read_to_string(dir.path().join("ode.json")).unwrap())
                .unwrap();
        let order = json["order"].as_u64().unwrap();
        assert!(order == 2 || order == 4, "{name}: order {order}");
        assert_eq!(json["annihilates"], serde_json::Value::Bool(true));
        assert_eq!(
            json["annihilates_next_degree"],
            serde_json::Value::Bool(false)
        );
        for r in json["residuals"].as_array().unwrap() {
            assert_eq!(r["value"], "0", "{name}");
        }
    }
}

#[test]
fn grosjean_ode_is_fourth_order() {
    let dir = TempDir::new().unwrap();
    assert_eq!(
        code(&run_cmd(
            "ode",
            &config("grosjean_r2.toml"),
            dir.path(),
            &["--degree", "4"]
        )),
        0
    );
    let json: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("ode.json")).unwrap()).unwrap();
    assert_eq!(json["order"], 4);
    assert_eq!(json["n"], 4);
    assert_eq!(json["r"], 2);
}

#[test]
fn coeffs_shift_back_to_base() {
    for name in GOOD {
        let dir = TempDir::new().unwrap();
        assert_eq!(
            code(&run_cmd(
                "coeffs",
                &config(name),
                dir.path(),
                &["--degree", "30"]
            )),
            0
        );
        let rows = read_csv(&dir.path().join("coeffs.csv"));
        assert_eq!(rows.len(), 31, "{name}");
        for row in &rows {
            assert_eq!(row[1], row[5], "{name}: b at n={}", row[0]);
            assert_eq!(row[2], row[6], "{name}: a2 at n={}", row[0]);
        }
        let job = JobConfig::from_path(&config(name), &Overrides::default()).unwrap();
        let r = job.extension.r();
        for (k, row) in rows.iter().take(r).enumerate() {
            assert_eq!(row[3], job.extension.b()[k].to_text(), "{name}");
        }
    }
}

#[test]
fn eval_closed_form_matches_direct_recurrence() {
    for name in GOOD {
        let dir = TempDir::new().unwrap();
        let o = run_cmd("eval", &config(name), dir.path(), &["--grid", "41"]);
        assert_eq!(code(&o), 0, "{name}");
        for row in read_csv(&dir.path().join("eval.csv")) {
            let mismatch: f64 = row[4].parse().unwrap();
            assert!(mismatch < 1e-10, "{name}: {row:?}");
        }
    }
}

#[test]
fn tight_tolerance_reports_verification_failure() {
    let dir = TempDir::new().unwrap();
    let o = run_cmd(
        "verify",
        &config("grosjean_r1.toml"),
        dir.path(),
        &["--tol", "1e-300"],
    );
    assert_eq!(code(&o), 2);
}
