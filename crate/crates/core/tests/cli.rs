use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use sha2::{Digest, Sha256};

fn adiaproj(args: &[&str], workers: Option<&str>) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_adiaproj"));
    cmd.args(args).env_remove("ADIAPROJ_WORKERS");
    if let Some(w) = workers {
        cmd.env("ADIAPROJ_WORKERS", w);
    }
    cmd.output().expect("binary runs")
}

fn write_config(dir: &Path, name: &str, body: &str) -> String {
    let path = dir.join(name);
    fs::write(&path, body).unwrap();
    path.to_string_lossy().into_owned()
}

fn small_sweep(out: &Path) -> String {
    format!(
        r#"
experiment = "custom"
workers = 1

[model]
kind = "dho"
qubits = 3

[schedule]
run_time = 188.49555921538757

[evolution]
dt = 2e-3
sample_stride = 1000

[sweep]
parameter = "lambda"
values = [-0.5, 0.0, 0.25, 0.5, 1.0]

[output]
directory = "{}"
formats = ["csv", "json"]
emit_plot_script = true
"#,
        out.display()
    )
}

#[test]
fn lists_every_experiment() {
    let out = adiaproj(&["list-experiments"], None);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    for name in [
        "fig1",
        "fig2",
        "fig3",
        "fig4",
        "fig5",
        "dho-energy",
        "aho-energy",
        "psm-spectrum",
        "custom",
    ] {
        assert!(text.lines().any(|l| l.starts_with(name)), "{name} missing");
    }
}

#[test]
fn validate_reports_all_diagnostics() {
    let dir = tempfile::tempdir().unwrap();
    let aho = write_config(
        dir.path(),
        "aho.toml",
        "experiment = \"custom\"\n[model]\nkind = \"aho\"\nqubits = 4\nlambda = -1.0\nshade = 2\n",
    );
    let out = adiaproj(&["validate", &aho], None);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("AHO requires λ ≥ 0"), "{err}");
    assert!(err.contains("unknown field `model.shade`"), "{err}");

    let psm = write_config(
        dir.path(),
        "psm.toml",
        "experiment = \"psm-spectrum\"\n[sweep]\nparameter = \"lambda\"\nvalues = [0.5]\n",
    );
    let out = adiaproj(&["validate", &psm], None);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8(out.stderr)
        .unwrap()
        .contains("not in model"));

    // `run` refuses the same config with the same exit code and no outputs.
    let out = adiaproj(&["run", &psm], None);
    assert_eq!(out.status.code(), Some(2));

    let ok = write_config(dir.path(), "ok.toml", &small_sweep(&dir.path().join("o")));
    assert!(adiaproj(&["validate", &ok], None).status.success());
    let out = adiaproj(&["validate", &ok, "--set", "evolution.dt=0.9"], None);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8(out.stderr).unwrap().contains("stability"));
    assert_eq!(
        adiaproj(&["validate", &ok], Some("zero")).status.code(),
        Some(2)
    );
}

#[test]
fn output_is_independent_of_worker_count() {
    let dir = tempfile::tempdir().unwrap();
    let mut csv = Vec::new();
    for workers in ["1", "3"] {
        let out_dir = dir.path().join(format!("w{workers}"));
        let cfg = write_config(
            dir.path(),
            &format!("w{workers}.toml"),
            &small_sweep(&out_dir),
        );
        let out = adiaproj(&["run", &cfg], Some(workers));
        assert!(
            out.status.success(),
            "{}",
            String::from_utf8_lossy(&out.stderr)
        );
        csv.push(fs::read(out_dir.join("custom.csv")).unwrap());
        let manifest: serde_json::Value =
            serde_json::from_slice(&fs::read(out_dir.join("manifest.json")).unwrap()).unwrap();
        assert_eq!(
            manifest["workers"].as_u64().unwrap(),
            workers.parse::<u64>().unwrap()
        );
    }
    assert_eq!(csv[0], csv[1]);
    let text = String::from_utf8(csv[0].clone()).unwrap();
    let rows: Vec<&str> = text.lines().filter(|l| !l.starts_with('#')).collect();
    assert_eq!(rows[0].split(',').next(), Some("lambda"));
    assert_eq!(rows.len(), 6);
    assert!(rows[1].starts_with("-5.00000000000000e-1,"));
}

#[test]
fn manifest_hashes_every_file() {
    let dir = tempfile::tempdir().unwrap();
    let out_dir = dir.path().join("out");
    let cfg = write_config(dir.path(), "m.toml", &small_sweep(&out_dir));
    let out = adiaproj(&["run", &cfg, "--set", "sweep.values=[0.0, 0.5]"], None);
    assert!(out.status.success());
    let manifest: serde_json::Value =
        serde_json::from_slice(&fs::read(out_dir.join("manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["status"], "ok");
    assert_eq!(manifest["config"]["sweep"]["values"][1].as_f64(), Some(0.5));
    let files = manifest["files"].as_array().unwrap();
    let listed: Vec<&str> = files.iter().map(|f| f["path"].as_str().unwrap()).collect();
    let mut on_disk: Vec<String> = fs::read_dir(&out_dir)
        .unwrap()
        .map(|e| e.unwrap().file_name().to_string_lossy().into_owned())
        .filter(|n| n != "manifest.json")
        .collect();
    on_disk.sort();
    let mut sorted = listed.clone();
    sorted.sort();
    assert_eq!(sorted, on_disk);
    assert!(listed.contains(&"custom.gp"));
    for f in files {
        let bytes = fs::read(out_dir.join(f["path"].as_str().unwrap())).unwrap();
        assert_eq!(
            f["sha256"].as_str().unwrap(),
            hex::encode(Sha256::digest(&bytes))
        );
    }
    let runs = manifest["runs"].as_array().unwrap();
    assert_eq!(runs.len(), 2);
    assert!(runs
        .iter()
        .all(|r| r["adiabatic"] == true && r["norm_compliant"] == true));
}

#[test]
fn failed_run_keeps_partial_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let out_dir = dir.path().join("out");
    // Far too fast a ramp: the energy scan completes, the HF step then
    // rejects the non-adiabatic runs.
    let body = format!(
        "experiment = \"fig3\"\n[model]\nqubits = 2\n[schedule]\nrun_time = 2.0\n\
         [evolution]\ndt = 1e-3\n[output]\ndirectory = \"{}\"\nformats = [\"csv\"]\n",
        out_dir.display()
    );
    let cfg = write_config(dir.path(), "bad.toml", &body);
    let out = adiaproj(&["run", &cfg], None);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8(out.stderr).unwrap().contains("adiabatic"));
    assert!(out_dir.join("fig3_energy.csv.partial").exists());
    assert!(!out_dir.join("fig3_energy.csv").exists());
    let manifest: serde_json::Value =
        serde_json::from_slice(&fs::read(out_dir.join("manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["status"], "error");
    assert_eq!(manifest["files"][0]["path"], "fig3_energy.csv.partial");
    assert!(manifest["runs"]
        .as_array()
        .unwrap()
        .iter()
        .any(|r| r["adiabatic"] == false));
}

#[test]
fn shipped_configs_validate() {
    let root = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs");
    let mut n = 0;
    for entry in fs::read_dir(&root).unwrap() {
        let path = entry.unwrap().path();
        if path.extension().is_some_and(|e| e == "toml") {
            let out = adiaproj(&["validate", path.to_str().unwrap()], None);
            assert!(
                out.status.success(),
                "{}: {}",
                path.display(),
                String::from_utf8_lossy(&out.stderr)
            );
            n += 1;
        }
    }
    assert!(n >= 9);
}
