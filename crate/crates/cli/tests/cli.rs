use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use tvs_core::snapshot::read_state;
use tvs_core::Boundary;

fn tvs(args: &[&str], out_dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_tvs"))
        .args(args)
        .env("TVS_OUT_DIR", out_dir)
        .output()
        .expect("spawn tvs")
}

fn write_config(dir: &Path, text: &str) -> String {
    let p = dir.join("case.cfg");
    fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_string()
}

fn budget(dir: &Path) -> Vec<Vec<f64>> {
    let text = fs::read_to_string(dir.join("budget.csv")).unwrap();
    let mut lines = text.lines();
    assert_eq!(
        lines.next().unwrap(),
        tvs_core::audit::BudgetRecord::CSV_HEADER
    );
    lines
        .map(|l| l.split(',').map(|x| x.parse().unwrap()).collect())
        .collect()
}

fn run_ok(cfg: &str) -> (tempfile::TempDir, Vec<Vec<f64>>) {
    let dir = tempfile::tempdir().unwrap();
    let path = write_config(dir.path(), cfg);
    let out = tvs(&["run", &path], dir.path());
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let rows = budget(dir.path());
    (dir, rows)
}

#[test]
fn stationary_rows_identical() {
    let (_d, rows) = run_ok("grid.n = 16\nsolver.dt = fixed\nsolver.dt.value = 1e-4\nsolver.T = 0.01\noutput.stride = 1\n");
    assert_eq!(rows.len(), 101);
    for r in &rows {
        for c in 1..r.len() {
            assert!(
                (r[c] - rows[0][c]).abs() <= 1e-12,
                "column {c}: {} vs {}",
                r[c],
                rows[0][c]
            );
        }
    }
}

#[test]
fn r_out_of_range_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_config(dir.path(), "grid.n = 16\nsolver.r = 1.5\n");
    let out = tvs(&["run", &path], dir.path());
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("solver.r") && err.contains("(0, 1)"), "{err}");
}

#[test]
fn unknown_key_reports_line() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_config(dir.path(), "grid.n = 16\n\nsolver.rr = 0.5\n");
    let out = tvs(&["run", &path], dir.path());
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 3"));
}

#[test]
fn pure_diffusion_conserves_heat() {
    let (_d, rows) = run_ok("grid.n = 16\nmaterial.regime = P1\ninit.preset = pure_diffusion\ninit.amplitude = 0.2\nsolver.T = 0.02\noutput.stride = 5\n");
    let l1_theta = 12;
    assert!(rows.len() > 3);
    for r in &rows {
        assert!(
            (r[l1_theta] - rows[0][l1_theta]).abs() <= 1e-12,
            "{} vs {}",
            r[l1_theta],
            rows[0][l1_theta]
        );
    }
}

#[test]
fn identical_configs_give_identical_budgets() {
    let cfg = "grid.n = 16\nmaterial.regime = P3\ninit.preset = random_smooth\ninit.seed = 11\nsolver.T = 0.01\noutput.stride = 2\n";
    let (a, _) = run_ok(cfg);
    let (b, _) = run_ok(cfg);
    let ba = fs::read(a.path().join("budget.csv")).unwrap();
    let bb = fs::read(b.path().join("budget.csv")).unwrap();
    assert_eq!(ba, bb);
}

#[test]
fn accepted_rows_satisfy_sign_invariants() {
    for regime in ["P1", "P2", "P3"] {
        let cfg = format!("grid.n = 16\nmaterial.regime = {regime}\ninit.preset = random_smooth\ninit.seed = 4\nsolver.T = 0.02\noutput.stride = 3\n");
        let (_d, rows) = run_ok(&cfg);
        for r in &rows {
            assert!(r[5] >= -1e-12, "P_entropy {}", r[5]);
            assert!(r[6] > 0.0 && r[7] > 0.0);
        }
    }
}

#[test]
fn snapshots_and_preview() {
    let (d, rows) = run_ok("grid.n = 8\ngrid.bc = walls\ninit.preset = shear\nsolver.T = 0.005\noutput.stride = 4\noutput.snapshots = true\noutput.pgm = true\n");
    let snaps: Vec<_> = fs::read_dir(d.path())
        .unwrap()
        .filter_map(|e| e.ok())
        .filter(|e| e.path().extension().is_some_and(|x| x == "tvs"))
        .collect();
    assert_eq!(snaps.len(), rows.len());
    let last = d.path().join(format!("snap_{:05}.tvs", rows.len() - 1));
    let s = read_state(
        std::io::BufReader::new(fs::File::open(last).unwrap()),
        Boundary::Walls,
    )
    .unwrap();
    assert_eq!(s.t, rows.last().unwrap()[0]);
    assert!(fs::read(d.path().join("theta.pgm"))
        .unwrap()
        .starts_with(b"P5\n8 8\n255\n"));
    assert!(fs::read_to_string(d.path().join("summary.txt"))
        .unwrap()
        .contains("min_detF"));
}

#[test]
fn zero_amplitude_mms_is_exact() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_config(
        dir.path(),
        "mms.a_v = 0\nmms.a_theta = 0\nmms.a_F = 0\nmms.grids = 8, 16, 32\nmms.T = 0.001\n",
    );
    let out = tvs(&["mms", &path], dir.path());
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let csv = fs::read_to_string(dir.path().join("mms.csv")).unwrap();
    for line in csv.lines().skip(1) {
        let f: Vec<&str> = line.split(',').collect();
        for e in &f[1..4] {
            assert_eq!(e.parse::<f64>().unwrap(), 0.0, "{line}");
        }
    }
}

#[test]
fn coarse_mms_misses_band() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_config(
        dir.path(),
        "mms.grids = 8, 12, 16\nmms.T = 0.002\nmms.order_min = 5\nmms.order_max = 6\n",
    );
    let out = tvs(&["mms", &path], dir.path());
    assert_eq!(out.status.code(), Some(4));
}

#[test]
fn galerkin_compare_small() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_config(
        dir.path(),
        "galerkin.n_flow = 4\ngalerkin.m_temp = 4\ngalerkin.fd_n = 32\n",
    );
    let out = tvs(&["galerkin-compare", &path], dir.path());
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let csv = fs::read_to_string(dir.path().join("galerkin.csv")).unwrap();
    assert_eq!(csv.lines().next().unwrap(), "t,disc_v,disc_theta,disc_F");
    assert_eq!(csv.lines().count(), 3);
}

#[test]
fn galerkin_compare_rejects_mismatched_models() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_config(
        dir.path(),
        "material.regime = P1\ngalerkin.fd_regime = P2\ngalerkin.n_flow = 4\ngalerkin.m_temp = 4\n",
    );
    let out = tvs(&["galerkin-compare", &path], dir.path());
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("incompatible"));
}

#[test]
fn validate_material_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    for (cfg, code) in [
        ("material.regime = P3\n", 0),
        ("material.regime = P3\nmaterial.g = linear(0, 1)\n", 4),
        ("material.regime = P3\nmaterial.g = exponential(1, 1)\n", 4),
    ] {
        let path = write_config(dir.path(), cfg);
        let out = tvs(&["validate-material", &path], dir.path());
        assert_eq!(out.status.code(), Some(code), "{cfg}");
    }
}

#[test]
fn missing_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let out = tvs(&["run", "/nonexistent/case.cfg"], dir.path());
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn shipped_configs_parse() {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs");
    let mut count = 0;
    for entry in fs::read_dir(&dir).unwrap() {
        let path = entry.unwrap().path();
        if path.extension().is_some_and(|e| e == "cfg") {
            tvs_cli::config::SimConfig::load(&path)
                .unwrap_or_else(|e| panic!("{}: {e}", path.display()));
            count += 1;
        }
    }
    assert!(count >= 5);
}
