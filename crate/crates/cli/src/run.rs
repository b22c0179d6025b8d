//! Executes a validated [`RunConfig`] and writes its artifacts.

use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::Path;

use anyhow::{Context, Result};
use nlqw_core::continuum::{continuum_table, pt_irrelevance_check, ContinuumGrid};
use nlqw_core::dynamics::{
    detect_collapse, evolve, gaussian_initial, standard_edges, EvolveOptions, RecordSchedule, COLLAPSE_DROP,
    COLLAPSE_WINDOW,
};
use nlqw_core::eigen::EigenSolver;
use nlqw_core::output::{
    float, write_continuum, write_edge_state, write_flow, write_reports, write_snapshot, write_spectra, write_sweep,
    write_trajectory,
};
use nlqw_core::stability::{
    analyze_single, analyze_two, eigenvalue_flow, quasienergy_of, AnalysisOptions, FlowModel, FlowOptions,
    StabilityReport,
};
use nlqw_core::sweeps::{run_sweep, threshold_extract, CellFlag, DynamicsSpec, SweepGrid, SweepMode};
use nlqw_core::{build_edge_single, build_edge_two, transform_edge, Kappa, Lattice, Sublattice, WalkModel};
use rayon::prelude::*;

use crate::config::{
    Command, ContinuumConfig, EdgeConfig, EvolveConfig, FlowConfig, RunConfig, StabilityConfig, SweepConfig,
};

pub const MANIFEST: &str = "manifest.toml";

/// Problems that completed runs recorded instead of aborting on.
#[derive(Debug, Default)]
pub struct Outcome {
    pub failures: Vec<String>,
}

/// Writes the manifest, runs the subcommand on a pool of
/// `config.workers` threads and writes its CSV files into `config.out`.
pub fn dispatch(config: &RunConfig) -> Result<Outcome> {
    let out = config.out.as_path();
    fs::create_dir_all(out).with_context(|| format!("creating {}", out.display()))?;
    fs::write(out.join(MANIFEST), config.manifest()).context("writing manifest")?;
    let pool = rayon::ThreadPoolBuilder::new().num_threads(config.workers).build()?;
    pool.install(|| match &config.command {
        Command::Evolve(c) => run_evolve(c, out),
        Command::Stability(c) => run_stability(c, out),
        Command::Flow(c) => run_flow(c, out),
        Command::Sweep(c) => run_sweep_cmd(c, config.workers, out),
        Command::Continuum(c) => run_continuum(c, out),
        Command::EdgeState(c) => run_edgestate(c, out),
    })
}

fn create(dir: &Path, name: &str) -> Result<BufWriter<File>> {
    let path = dir.join(name);
    let f = File::create(&path).with_context(|| format!("creating {}", path.display()))?;
    Ok(BufWriter::new(f))
}

fn run_evolve(c: &EvolveConfig, out: &Path) -> Result<Outcome> {
    let lattice = Lattice::new(c.m)?;
    let state = gaussian_initial(c.delta2, lattice, c.parity)?;
    let edges = standard_edges(c.model, lattice, c.parity)?;
    let options = EvolveOptions {
        schedule: c.record_every.map_or(RecordSchedule::Geometric, RecordSchedule::Every),
        distributions: c.snapshots,
        trace_stride: c.trace_stride,
    };
    let ev = evolve(state, c.model, Kappa::new(c.kappa)?, c.steps, &edges, &options)?;
    write_trajectory(create(out, "trajectory.csv")?, &ev)?;
    if c.snapshots {
        let dir = out.join("snapshots");
        fs::create_dir_all(&dir)?;
        for r in &ev.records {
            if let Some(p) = &r.distribution {
                write_snapshot(create(&dir, &format!("t{:010}.csv", r.step))?, lattice, p)?;
            }
        }
    }

    let mut w = csv_writer(create(out, "collapse.csv")?);
    w.write_record(["edge", "fidelity_at_T", "collapse_step"])?;
    let last = ev.records.last().context("evolution produced no records")?;
    for (k, label) in ev.labels.iter().enumerate() {
        let collapse = if c.trace_stride > 0 {
            detect_collapse(&ev.trace.series(k), COLLAPSE_WINDOW, COLLAPSE_DROP)
        } else {
            None
        };
        w.write_record([
            label.clone(),
            float(last.fidelities[k]),
            collapse.map(|t| t.to_string()).unwrap_or_default(),
        ])?;
        println!(
            "{label}: F(T) = {:.6}{}",
            last.fidelities[k],
            collapse.map(|t| format!(", collapse at t = {t}")).unwrap_or_default()
        );
    }
    w.flush()?;
    println!("norm at T = {:.15}", last.norm);
    Ok(Outcome::default())
}

fn csv_writer<W: Write>(w: W) -> csv::Writer<W> {
    csv::Writer::from_writer(w)
}

fn stability_reports(c: &StabilityConfig) -> Result<Vec<StabilityReport>> {
    let lattice = Lattice::new(c.m)?;
    let solver = EigenSolver::sequential();
    let options = AnalysisOptions {
        spectral_norm: c.spectral_norm,
        mixed_parity_rescale: c.mixed_parity_rescale,
    };
    let reports = c
        .kappa
        .values()
        .into_par_iter()
        .map(|k| {
            let kappa = Kappa::new(k)?;
            match c.model {
                WalkModel::Single { theta0 } => analyze_single(theta0, kappa, c.eps, c.eta, lattice, &solver, options),
                WalkModel::Two { theta1, theta2 } => analyze_two(
                    theta1,
                    theta2,
                    kappa,
                    c.eps,
                    c.eta,
                    lattice,
                    c.parity.unwrap_or(Sublattice::Even),
                    &solver,
                    options,
                ),
            }
        })
        .collect::<nlqw_core::Result<Vec<_>>>()?;
    Ok(reports)
}

fn run_stability(c: &StabilityConfig, out: &Path) -> Result<Outcome> {
    let reports = stability_reports(c)?;
    write_reports(create(out, "reports.csv")?, &reports)?;
    write_spectra(create(out, "spectra.csv")?, &reports)?;
    if c.spectral_norm {
        let mut w = csv_writer(create(out, "spectral_norms.csv")?);
        w.write_record(["kappa", "spectral_norm"])?;
        for r in &reports {
            w.write_record([float(r.kappa), r.spectral_norm.map(float).unwrap_or_default()])?;
        }
        w.flush()?;
    }
    if let Some(kc) = reports.first().and_then(|r| r.kappa_c) {
        println!("kappa_c = {kc:.6}");
    }
    for r in &reports {
        println!(
            "kappa = {:<10} max|lambda| = {:.12}  {}",
            r.kappa, r.max_modulus, r.verdict
        );
    }
    if reports.iter().any(|r| r.overlap_suspect) {
        eprintln!("warning: edge state overlaps its partner (e^(-2 gamma m) >= 1e-6); enlarge m");
    }
    Ok(Outcome::default())
}

fn run_flow(c: &FlowConfig, out: &Path) -> Result<Outcome> {
    let lattice = Lattice::new(c.m)?;
    let model = match c.model {
        WalkModel::Single { theta0 } => FlowModel::Single { theta0 },
        WalkModel::Two { theta1, theta2 } => FlowModel::Two {
            theta1,
            theta2,
            parity: c.parity.unwrap_or(Sublattice::Even),
        },
    };
    let options = FlowOptions {
        jump_threshold: c.jump_threshold,
        ambiguity_ratio: c.ambiguity_ratio,
        degeneracy: c.degeneracy,
    };
    let mut flow = eigenvalue_flow(model, c.eps, c.eta, lattice, &c.kappa.values(), options)?;
    if c.strict {
        flow = flow.strict()?;
    }
    write_flow(create(out, "flow.csv")?, &flow)?;

    let mut w = csv_writer(create(out, "crossings.csv")?);
    w.write_record([
        "trajectory_id",
        "kappa_before",
        "kappa_after",
        "re_before",
        "re_after",
        "re_xi_before",
        "re_xi_after",
    ])?;
    let crossings = flow.origin_crossings(c.crossing_radius);
    for x in &crossings {
        let (xb, xa) = (quasienergy_of(x.before)?, quasienergy_of(x.after)?);
        w.write_record([
            x.trajectory.to_string(),
            float(x.kappa_before),
            float(x.kappa_after),
            float(x.before.re),
            float(x.after.re),
            float(xb.re),
            float(xa.re),
        ])?;
        println!(
            "trajectory {} crosses the origin between kappa = {} and {}: Re xi {:.6} -> {:.6}",
            x.trajectory, x.kappa_before, x.kappa_after, xb.re, xa.re
        );
    }
    w.flush()?;
    if !flow.warnings.is_empty() {
        eprintln!("warning: {} ambiguous or large-jump matches", flow.warnings.len());
    }
    Ok(Outcome::default())
}

fn run_sweep_cmd(c: &SweepConfig, workers: usize, out: &Path) -> Result<Outcome> {
    let grid = SweepGrid {
        model: c.model,
        angle: c.angle,
        kappa: c.kappa,
        mode: c.mode,
        spectral_m: c.spectral_m,
        dynamics: DynamicsSpec {
            m: c.dynamics_m,
            steps: c.steps,
            delta2: c.delta2,
        },
        parity: c.parity,
    };
    let cells = run_sweep(&grid, workers)?;
    write_sweep(create(out, "sweep.csv")?, &cells)?;

    let mut outcome = Outcome::default();
    for cell in &cells {
        for f in cell.flags.iter().filter(|f| matches!(f, CellFlag::Failed(_))) {
            outcome
                .failures
                .push(format!("cell (angle = {}, kappa = {}): {f}", cell.angle, cell.kappa));
        }
    }
    if c.mode != SweepMode::Dynamical {
        let mut w = csv_writer(create(out, "thresholds.csv")?);
        w.write_record(["axis1", "kappa_c_analytic", "kappa_c_empirical", "agrees", "flags"])?;
        for t in threshold_extract(&cells) {
            let mut flags = Vec::new();
            if t.overlap_suspect {
                flags.push("overlap-suspect");
            }
            if t.excluded {
                flags.push("excluded");
            }
            w.write_record([
                float(t.angle),
                t.kappa_c_analytic.map(float).unwrap_or_default(),
                t.empirical.map(float).unwrap_or_default(),
                t.agrees(c.kappa.step(), c.kappa.max).to_string(),
                flags.join(";"),
            ])?;
        }
        w.flush()?;
    }
    println!("{} cells written, {} failed", cells.len(), outcome.failures.len());
    Ok(outcome)
}

fn run_continuum(c: &ContinuumConfig, out: &Path) -> Result<Outcome> {
    let grid = ContinuumGrid {
        theta0: c.theta0,
        phi2: c.phi2,
        q: c.q,
        kappa: c.kappa,
    };
    write_continuum(create(out, "continuum.csv")?, &continuum_table(&grid, c.eta)?)?;
    let report = pt_irrelevance_check(&grid)?;
    println!(
        "{} points: {} PT-broken, {} exceptional; irrelevance check {}",
        report.points,
        report.broken_points,
        report.exceptional_points,
        if report.passed() { "passed" } else { "FAILED" }
    );
    let mut outcome = Outcome::default();
    for (q, k) in &report.inequality_violations {
        outcome
            .failures
            .push(format!("damping bound violated at q = {q}, kappa = {k}"));
    }
    for (q, k, eta) in &report.sign_violations {
        outcome
            .failures
            .push(format!("growth sign wrong at q = {q}, kappa = {k}, eta = {eta}"));
    }
    Ok(outcome)
}

fn run_edgestate(c: &EdgeConfig, out: &Path) -> Result<Outcome> {
    let lattice = Lattice::new(c.m)?;
    let mut edge = match c.model {
        WalkModel::Single { theta0 } => build_edge_single(c.eps, c.eta, theta0, lattice)?,
        WalkModel::Two { theta1, theta2 } => build_edge_two(
            c.eps,
            c.eta,
            theta1,
            theta2,
            lattice,
            c.parity.unwrap_or(Sublattice::Even),
        )?,
    };
    if let (true, WalkModel::Two { theta1, theta2 }) = (c.transformed, c.model) {
        edge = transform_edge(&edge, theta1, theta2)?;
    }
    write_edge_state(create(out, "edge_state.csv")?, &edge)?;
    println!(
        "gamma = {:.12}, N = {:.12}, max weight = {:.12}, eigen residual = {:.3e}",
        edge.gamma(),
        edge.normalization(),
        edge.max_weight(),
        edge.eigen_residual()
    );
    for warning in edge.warnings() {
        eprintln!("warning: {warning:?}");
    }
    Ok(Outcome::default())
}
