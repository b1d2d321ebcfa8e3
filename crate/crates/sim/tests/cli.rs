use std::path::Path;
use std::process::Command;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_isac-sim"))
}

fn run_ok(args: &[&str]) -> String {
    let out = bin().args(args).output().unwrap();
    assert!(
        out.status.success(),
        "{args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

fn header(path: &Path) -> String {
    std::fs::read_to_string(path).unwrap().lines().next().unwrap().to_string()
}

#[test]
fn range_profile_writes_columns_and_report() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let stdout = run_ok(&["range-profile", "--trials", "8", "--out", out, "--workers", "2"]);
    assert!(stdout.contains("range_profile:"));
    assert_eq!(
        header(&dir.path().join("range_profile.csv")),
        "cp_mode,filter,l,range_m,power_db_empirical,power_db_analytic"
    );
    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("report.json")).unwrap()).unwrap();
    assert_eq!(report["experiment"], "range_profile");
    assert_eq!(report["metadata"]["trials"], 8);
    assert!(report["checks"].as_array().unwrap().len() > 4);
}

#[test]
fn sweeps_write_expected_columns() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("c.toml");
    std::fs::write(
        &cfg,
        "[sweep]\nranges_m = [60.0, 400.0]\nsnr_db = [0.0, 20.0]\n",
    )
    .unwrap();
    let (cfg, out) = (cfg.to_str().unwrap(), dir.path().to_str().unwrap());
    run_ok(&["sweep-pslr-islr", "--config", cfg, "--trials", "4", "--out", out]);
    assert_eq!(
        header(&dir.path().join("pslr_islr.csv")),
        "range_m,filter,cp_mode,pslr_db_emp,pslr_db_ana,islr_db_emp,islr_db_ana"
    );
    run_ok(&["sweep-rmse", "--config", cfg, "--trials", "4", "--out", out]);
    let rmse = std::fs::read_to_string(dir.path().join("rmse.csv")).unwrap();
    assert!(rmse.starts_with("snr_db,filter,cp_mode,range_rmse_m,velocity_rmse_mps"));
    // 2 SNRs × 2 filters × 2 prefixes.
    assert_eq!(rmse.lines().count(), 1 + 8);
}

#[test]
fn json_format_and_predict() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let stdout = run_ok(&["predict", "--profile", "full", "--out", out, "--format", "json"]);
    assert!(stdout.contains("pslr_db"));
    let rows: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("predict.json")).unwrap()).unwrap();
    // Two targets × two filters × two prefixes; the default pair snaps to
    // delay bins 150 and 200.
    assert_eq!(rows.as_array().unwrap().len(), 8);
    assert_eq!(rows[0]["l"], 150);
    assert_eq!(rows[1]["l"], 200);
}

#[test]
fn echo_check_and_moments_pass_at_desk_scale() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    run_ok(&["echo-check", "--out", out, "--strict"]);
    run_ok(&["validate-moments", "--trials", "200", "--out", out, "--strict"]);
}

#[test]
fn dump_writes_every_artifact() {
    let dir = tempfile::tempdir().unwrap();
    run_ok(&["dump", "--trial", "3", "--out", dir.path().to_str().unwrap()]);
    for f in [
        "echo_time.csv",
        "echo_components.csv",
        "rdm_rf.csv",
        "rdm_mf.csv",
        "rdm_rf.bin",
        "rdm_mf.bin",
    ] {
        assert!(dir.path().join(f).exists(), "{f} missing");
    }
    let g = isac_sim::export::read_matrix(std::fs::File::open(dir.path().join("rdm_mf.bin")).unwrap()).unwrap();
    assert_eq!((g.rows(), g.cols()), (64, 32));
    assert_eq!(header(&dir.path().join("echo_components.csv")), "n,m,component,re,im");
}

#[test]
fn outputs_do_not_depend_on_worker_count() {
    let dirs: Vec<_> = ["1", "4"]
        .iter()
        .map(|w| {
            let dir = tempfile::tempdir().unwrap();
            run_ok(&[
                "sweep-rmse",
                "--trials",
                "70",
                "--seed",
                "11",
                "--workers",
                w,
                "--out",
                dir.path().to_str().unwrap(),
            ]);
            dir
        })
        .collect();
    for f in ["rmse.csv", "report.json"] {
        assert_eq!(
            std::fs::read(dirs[0].path().join(f)).unwrap(),
            std::fs::read(dirs[1].path().join(f)).unwrap(),
            "{f} differs"
        );
    }
}

#[test]
fn bad_config_is_reported() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.json");
    std::fs::write(&cfg, r#"{ "sweep": { "ranges_m": [500.0, 100.0] } }"#).unwrap();
    let out = bin()
        .args(["predict", "--config", cfg.to_str().unwrap(), "--out", dir.path().to_str().unwrap()])
        .output()
        .unwrap();
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("strictly increasing"));

    let cfg = dir.path().join("bad.yaml");
    std::fs::write(&cfg, "seed: 1").unwrap();
    let out = bin().args(["predict", "--config", cfg.to_str().unwrap()]).output().unwrap();
    assert!(!out.status.success());
}

#[test]
fn shipped_configs_resolve() {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs");
    let mut seen = 0;
    for entry in std::fs::read_dir(dir).unwrap() {
        let path = entry.unwrap().path();
        isac_sim::CampaignConfig::from_path(&path)
            .and_then(|c| c.resolve())
            .unwrap_or_else(|e| panic!("{}: {e}", path.display()));
        seen += 1;
    }
    assert!(seen >= 2);
}
