use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn vpfp(args: &[&str], out: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_vpfp"))
        .args(args)
        .arg("--out")
        .arg(out)
        .env_remove("VPFP_THREADS")
        .output()
        .expect("binary runs")
}

fn summary(dir: &Path) -> serde_json::Value {
    serde_json::from_str(&fs::read_to_string(dir.join("summary.json")).unwrap()).unwrap()
}

#[test]
fn unknown_experiment_is_a_usage_error() {
    let tmp = tempfile::tempdir().unwrap();
    let o = vpfp(&["no-such-experiment"], tmp.path());
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn unknown_keys_and_bad_values_are_usage_errors() {
    let tmp = tempfile::tempdir().unwrap();
    let o = vpfp(&["penrose", "--set", "penrose.nuu=0"], tmp.path());
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("penrose.nuu"));
    let o = vpfp(&["penrose", "--set", "penrose.nu=zero"], tmp.path());
    assert_eq!(o.status.code(), Some(2));
    let o = vpfp(&["sim", "--set", "grid.d_eta=-1"], tmp.path());
    assert_eq!(o.status.code(), Some(2));
    // Nothing is written before the parameters are accepted.
    assert!(!tmp.path().join("summary.json").exists());
}

#[test]
fn penrose_reports_a_positive_margin() {
    let tmp = tempfile::tempdir().unwrap();
    let o = vpfp(&["penrose", "--set", "penrose.nu=0,1e-3"], tmp.path());
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stdout));
    let reports: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(tmp.path().join("penrose.json")).unwrap()).unwrap();
    assert!(reports[0]["kappa_estimate"].as_f64().unwrap() > 0.0);
    let s = summary(tmp.path());
    assert_eq!(s["passed"], true);
    assert_eq!(s["parameters"]["penrose.nu"], "0,0.001");
}

#[test]
fn config_file_is_overridden_by_set() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = tmp.path().join("run.cfg");
    fs::write(&cfg, "# Landau run\nsim.t_end = 8\nsim.epsilon = 1e-2\nfit.t_lo = 1\nfit.t_hi = 7\n").unwrap();
    let out = tmp.path().join("out");
    let o = vpfp(&["linear-run", "--config", cfg.to_str().unwrap(), "--set", "sim.epsilon=1e-3"], &out);
    assert!(o.status.code().is_some_and(|c| c <= 1), "{}", String::from_utf8_lossy(&o.stderr));
    let s = summary(&out);
    assert_eq!(s["parameters"]["sim.t_end"], "8");
    assert_eq!(s["parameters"]["sim.epsilon"], "0.001");
    let trace = fs::read_to_string(out.join("trace.csv")).unwrap();
    assert!(trace.starts_with("t,re_rho_1,im_rho_1,abs_rho_1"));
    assert!(!trace.contains('\r'));
    assert!(fs::read_to_string(out.join("rho.svg")).unwrap().starts_with("<svg"));
}

#[test]
fn landau_fit_passes_at_default_resolution() {
    let tmp = tempfile::tempdir().unwrap();
    let o = vpfp(&["linear-run"], tmp.path());
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stdout));
    let s = summary(tmp.path());
    let rate = s["results"]["fit"]["rate"].as_f64().unwrap();
    let root = s["results"]["leading_root"][0].as_f64().unwrap();
    assert!((rate + root).abs() / root.abs() < 0.05);
}

#[test]
fn failed_assertion_exits_with_one() {
    let tmp = tempfile::tempdir().unwrap();
    // A coarse step leaves the trapezoid solutions 1e-3 apart.
    let o = vpfp(&["volterra-xcheck", "--set", "volterra.dt=0.5"], tmp.path());
    assert_eq!(o.status.code(), Some(1));
    assert_eq!(summary(tmp.path())["passed"], false);
}

#[test]
fn blow_up_is_a_numerical_error() {
    let tmp = tempfile::tempdir().unwrap();
    let o = vpfp(&["sim", "--set", "sim.epsilon=1e4", "--set", "sim.t_end=5"], tmp.path());
    assert_eq!(o.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&o.stderr).contains("blow-up"));
}

#[test]
fn outputs_are_bit_identical_across_reruns_and_thread_counts() {
    let tmp = tempfile::tempdir().unwrap();
    let args = ["dispersion", "--set", "dispersion.k=1,2"];
    let a = tmp.path().join("a");
    let b = tmp.path().join("b");
    assert_eq!(vpfp(&[&args[..], &["--threads", "1"]].concat(), &a).status.code(), Some(0));
    let o = Command::new(env!("CARGO_BIN_EXE_vpfp"))
        .args(args)
        .arg("--out")
        .arg(&b)
        .env("VPFP_THREADS", "3")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(0));
    for f in ["roots.csv", "summary.json"] {
        assert_eq!(fs::read(a.join(f)).unwrap(), fs::read(b.join(f)).unwrap(), "{f} differs");
    }
}

#[test]
fn bad_thread_setting_is_a_usage_error() {
    let tmp = tempfile::tempdir().unwrap();
    let o = Command::new(env!("CARGO_BIN_EXE_vpfp"))
        .args(["penrose", "--out"])
        .arg(tmp.path())
        .env("VPFP_THREADS", "many")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(2));
}
