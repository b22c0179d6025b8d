use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use tempfile::TempDir;

fn nlqw(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_nlqw")).args(args).output().unwrap()
}

fn run(dir: &Path, sub: &str, config: &str, out: &str) -> Output {
    let path = dir.join(format!("{out}.toml"));
    fs::write(&path, config).unwrap();
    let out = dir.join(out);
    nlqw(&[sub, "--config", path.to_str().unwrap(), "--out", out.to_str().unwrap()])
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn rows(path: &Path) -> Vec<Vec<String>> {
    let text = fs::read_to_string(path).unwrap();
    text.lines()
        .map(|l| l.split(',').map(str::to_string).collect())
        .collect()
}

/// Reruns `first` from its own manifest and checks every CSV matches.
fn rerun_matches(dir: &Path, sub: &str, first: &str, files: &[&str]) {
    let manifest = dir.join(first).join("manifest.toml");
    let second = dir.join(format!("{first}-again"));
    let o = nlqw(&[
        sub,
        "--config",
        manifest.to_str().unwrap(),
        "--out",
        second.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let strip = |p: &Path| {
        let text = fs::read_to_string(p).unwrap();
        text.lines()
            .filter(|l| !l.starts_with("out = "))
            .collect::<Vec<_>>()
            .join("\n")
    };
    assert_eq!(strip(&manifest), strip(&second.join("manifest.toml")));
    for f in files {
        assert_eq!(
            fs::read(dir.join(first).join(f)).unwrap(),
            fs::read(second.join(f)).unwrap(),
            "{f} differs on rerun"
        );
    }
}

#[test]
fn evolve_writes_trajectory_and_reruns_identically() {
    let dir = TempDir::new().unwrap();
    let cfg = "[evolve]\nmodel = \"single\"\ntheta0 = 0.3927\nkappa = 3.6\nm = 20\ndelta2 = 50\nsteps = 3000\nrecord_every = 1000\nsnapshots = true\n";
    let o = run(dir.path(), "evolve", cfg, "ev");
    assert!(o.status.success(), "{}", stderr(&o));
    let traj = rows(&dir.path().join("ev/trajectory.csv"));
    assert_eq!(
        traj[0],
        ["t", "norm", "F_0_plus", "F_pi_plus", "F_0_minus", "F_pi_minus"]
    );
    let steps: Vec<&str> = traj[1..].iter().map(|r| r[0].as_str()).collect();
    assert_eq!(steps, ["0", "1000", "2000", "3000"]);
    for r in &traj[1..] {
        assert!((r[1].parse::<f64>().unwrap() - 1.0).abs() < 1e-12);
    }
    let snaps = fs::read_dir(dir.path().join("ev/snapshots")).unwrap().count();
    assert_eq!(snaps, 4);
    assert_eq!(rows(&dir.path().join("ev/collapse.csv")).len(), 5);
    rerun_matches(dir.path(), "evolve", "ev", &["trajectory.csv", "collapse.csv"]);
}

#[test]
fn stability_reports_the_threshold() {
    let dir = TempDir::new().unwrap();
    let cfg = "model = \"single\"\ntheta0 = 0.39269908169872414\nm = 40\nkappa_min = 3.5\nkappa_max = 3.7\nkappa_count = 2\nspectral_norm = true\nworkers = 2\n";
    let o = run(dir.path(), "stability", cfg, "st");
    assert!(o.status.success(), "{}", stderr(&o));
    let reports = rows(&dir.path().join("st/reports.csv"));
    assert_eq!(reports[0], ["kappa", "max_abs_lambda", "bound", "kappa_c", "verdict"]);
    for r in &reports[1..] {
        let kc: f64 = r[3].parse().unwrap();
        assert!((kc - 3.61).abs() < 0.01, "{kc}");
    }
    assert_eq!(reports[1][4], "stable");
    assert_eq!(reports[2][4], "unstable");
    // 8m eigenvalues per κ
    assert_eq!(rows(&dir.path().join("st/spectra.csv")).len(), 1 + 2 * 8 * 40);
    assert_eq!(rows(&dir.path().join("st/spectral_norms.csv")).len(), 3);
    rerun_matches(dir.path(), "stability", "st", &["reports.csv", "spectra.csv"]);
}

#[test]
fn continuum_emits_pt_phase() {
    let dir = TempDir::new().unwrap();
    let o = run(
        dir.path(),
        "continuum",
        "theta0 = 0.3927\nq_count = 21\nkappa_count = 21\n",
        "co",
    );
    assert!(o.status.success(), "{}", stderr(&o));
    let table = rows(&dir.path().join("co/continuum.csv"));
    assert_eq!(table[0].last().unwrap(), "pt_phase");
    assert_eq!(table.len(), 1 + 21 * 21);
    let phases: Vec<&str> = table[1..].iter().map(|r| r[6].as_str()).collect();
    assert!(phases.contains(&"unbroken") && phases.contains(&"broken"));
    let manifest = fs::read_to_string(dir.path().join("co/manifest.toml")).unwrap();
    assert!(manifest.contains("phi2 = 0.138"), "{manifest}");
    rerun_matches(dir.path(), "continuum", "co", &["continuum.csv"]);
}

#[test]
fn edgestate_and_flow_write_their_tables() {
    let dir = TempDir::new().unwrap();
    let o = run(
        dir.path(),
        "edgestate",
        "model = \"two\"\ntheta1 = -0.7\ntheta2 = 1.2\nparity = \"odd\"\neps = \"pi\"\nm = 20\n",
        "es",
    );
    assert!(o.status.success(), "{}", stderr(&o));
    let table = rows(&dir.path().join("es/edge_state.csv"));
    assert_eq!(table[0], ["x", "re_L", "im_L", "re_R", "im_R"]);
    assert_eq!(table.len(), 1 + 80);

    let o = run(
        dir.path(),
        "flow",
        "model = \"single\"\ntheta0 = 0.3927\nm = 10\nkappa_min = 0\nkappa_max = 1\nkappa_count = 3\n",
        "fl",
    );
    assert!(o.status.success(), "{}", stderr(&o));
    assert_eq!(rows(&dir.path().join("fl/flow.csv")).len(), 1 + 3 * 80);
    assert_eq!(rows(&dir.path().join("fl/crossings.csv"))[0][0], "trajectory_id");
}

#[test]
fn sweep_output_does_not_depend_on_workers() {
    let dir = TempDir::new().unwrap();
    let cfg = "model = \"two\"\nangle_min = -0.8\nangle_max = 0.8\nangle_count = 3\nkappa_min = 0\nkappa_max = 2\nkappa_count = 2\nspectral_m = 20\ndynamics_m = 20\nsteps = 200\ndelta2 = 20\nparity = \"even\"\n";
    let path = dir.path().join("sw.toml");
    fs::write(&path, cfg).unwrap();
    let mut outputs = Vec::new();
    for workers in ["1", "3"] {
        let out = dir.path().join(format!("sw{workers}"));
        let o = nlqw(&[
            "sweep",
            "--config",
            path.to_str().unwrap(),
            "--out",
            out.to_str().unwrap(),
            "--workers",
            workers,
        ]);
        assert!(o.status.success(), "{}", stderr(&o));
        outputs.push(fs::read(out.join("sweep.csv")).unwrap());
    }
    assert_eq!(outputs[0], outputs[1]);
    let text = String::from_utf8(outputs.pop().unwrap()).unwrap();
    assert_eq!(text.lines().count(), 1 + 6);
    assert!(text.contains("excluded:theta1 = 0"));
    assert!(dir.path().join("sw1/thresholds.csv").exists());
}

#[test]
fn config_errors_exit_with_one() {
    let dir = TempDir::new().unwrap();
    let o = run(dir.path(), "evolve", "", "empty");
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("missing required key `steps`"));
    assert!(!dir.path().join("empty").exists(), "no artifacts on a rejected config");

    let o = run(
        dir.path(),
        "evolve",
        "model = \"single\"\ntheta0 = 0.3927\nkappa = -1\nm = 20\ndelta2 = 5\nsteps = 1\n",
        "neg",
    );
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("κ must be ≥ 0"));

    assert_eq!(
        nlqw(&["evolve", "--config", "/nonexistent/cfg.toml"]).status.code(),
        Some(1)
    );
    assert_eq!(nlqw(&["evolve"]).status.code(), Some(1));
    assert_eq!(nlqw(&["bogus"]).status.code(), Some(1));
    assert_eq!(nlqw(&["--help"]).status.code(), Some(0));
}

#[test]
fn computation_errors_exit_with_two() {
    let dir = TempDir::new().unwrap();
    let blocker = dir.path().join("file");
    fs::write(&blocker, "").unwrap();
    let cfg = dir.path().join("c.toml");
    fs::write(&cfg, "model = \"single\"\ntheta0 = 0.5\nm = 10\n").unwrap();
    let out = blocker.join("out");
    let o = nlqw(&[
        "edgestate",
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(2), "{}", stderr(&o));
}
