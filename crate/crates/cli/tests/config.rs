use std::path::PathBuf;

use nlqw_cli::config::{Command, EvolveConfig};
use nlqw_cli::{parse_config, Overrides, Subcommand};
use nlqw_core::sweeps::Scale;
use nlqw_core::{Sublattice, WalkModel};
use proptest::prelude::*;

const MINIMAL_EVOLVE: &str = "model = \"single\"\ntheta0 = 0.3927\nkappa = 3.6\nm = 150\ndelta2 = 50\nsteps = 600000\n";

fn parse(sub: Subcommand, text: &str) -> Result<nlqw_cli::RunConfig, Vec<String>> {
    parse_config(sub, text, &Overrides::default()).map_err(|e| e.0)
}

fn errors(sub: Subcommand, text: &str) -> Vec<String> {
    parse(sub, text).expect_err("config should be rejected")
}

#[test]
#[allow(clippy::approx_constant)] // 0.3927 is the configured value, not π/8
fn minimal_evolve_config_is_valid() {
    let c = parse(Subcommand::Evolve, MINIMAL_EVOLVE).unwrap();
    assert_eq!(c.out, PathBuf::from("nlqw-out"));
    assert_eq!(c.workers, 0);
    assert_eq!(c.scale, Scale::Desk);
    let Command::Evolve(e) = c.command else {
        panic!("wrong command")
    };
    assert_eq!(
        e,
        EvolveConfig {
            model: WalkModel::Single { theta0: 0.3927 },
            kappa: 3.6,
            m: 150,
            delta2: 50.0,
            steps: 600_000,
            parity: None,
            record_every: None,
            snapshots: false,
            trace_stride: 10,
        }
    );
}

#[test]
fn sections_and_top_level_keys_merge() {
    let sectioned = format!("[run]\nworkers = 3\n\n[evolve]\n{MINIMAL_EVOLVE}");
    let flat = format!("workers = 3\n{MINIMAL_EVOLVE}");
    assert_eq!(parse(Subcommand::Evolve, &sectioned), parse(Subcommand::Evolve, &flat));
    let twice = format!("kappa = 1.0\n[evolve]\n{MINIMAL_EVOLVE}");
    assert!(errors(Subcommand::Evolve, &twice)[0].contains("`kappa` given twice"));
}

#[test]
fn negative_kappa_is_rejected() {
    let text = MINIMAL_EVOLVE.replace("kappa = 3.6", "kappa = -1");
    assert_eq!(errors(Subcommand::Evolve, &text), ["κ must be ≥ 0 (got -1)"]);
    let axis = "model = \"single\"\ntheta0 = 0.4\nkappa_min = -1\nkappa_max = 1\nkappa_count = 3\n";
    assert_eq!(errors(Subcommand::Stability, axis), ["κ must be ≥ 0 (got -1)"]);
}

#[test]
fn empty_file_lists_required_keys() {
    let e = errors(Subcommand::Evolve, "").join("\n");
    for key in ["model", "kappa", "m", "delta2", "steps"] {
        assert!(e.contains(&format!("missing required key `{key}`")), "{e}");
    }
    assert!(e.contains("theta0"));
    let e = errors(Subcommand::Sweep, "").join("\n");
    for key in [
        "model",
        "angle_min",
        "angle_max",
        "angle_count",
        "kappa_min",
        "kappa_max",
        "kappa_count",
    ] {
        assert!(e.contains(&format!("missing required key `{key}`")), "{e}");
    }
}

#[test]
fn every_violation_is_reported_at_once() {
    let text =
        "model = \"single\"\ntheta0 = 2.0\nkappa = -0.5\nm = 7\ndelta2 = 0\nsteps = 10\ncolour = \"red\"\n[sweep]\n";
    let e = errors(Subcommand::Evolve, text);
    assert_eq!(e.len(), 6, "{e:?}");
    let all = e.join("\n");
    for needle in [
        "section [sweep] does not apply to `evolve`",
        "θ0 = 2 is outside (0, π/2)",
        "κ must be ≥ 0 (got -0.5)",
        "must be even and at least 2, got 7",
        "`delta2` must be > 0",
        "unknown key `colour`",
    ] {
        assert!(all.contains(needle), "missing {needle:?} in\n{all}");
    }
}

#[test]
fn wrong_types_and_syntax() {
    let e = errors(Subcommand::Evolve, &MINIMAL_EVOLVE.replace("m = 150", "m = \"150\""));
    assert_eq!(e, ["`m` must be a nonnegative integer, got \"150\""]);
    let e = errors(Subcommand::Evolve, &MINIMAL_EVOLVE.replace("\"single\"", "\"triple\""));
    assert!(e[0].contains("one of \"single\", \"two\""), "{e:?}");
    let e = errors(Subcommand::Evolve, "model = single\n");
    assert!(e[0].starts_with("syntax error"), "{e:?}");
    assert!(errors(Subcommand::Evolve, "[mystery]\n")[0].contains("unknown section [mystery]"));
}

#[test]
fn two_step_models_need_parity_and_a_region() {
    let sweep = "model = \"two\"\nangle_min = -1\nangle_max = 1\nangle_count = 3\nkappa_min = 0\nkappa_max = 1\nkappa_count = 2\n";
    assert_eq!(errors(Subcommand::Sweep, sweep), ["missing required key `parity`"]);
    let ok = parse(Subcommand::Sweep, &format!("{sweep}parity = \"odd\"\n")).unwrap();
    let Command::Sweep(s) = ok.command else { panic!() };
    assert_eq!(s.parity, Some(Sublattice::Odd));
    assert_eq!(s.delta2, 70.0);
    assert_eq!((s.spectral_m, s.dynamics_m, s.steps), (100, 50, 100_000));
    let mixed = format!("{sweep}parity = \"mixed\"\n");
    assert!(errors(Subcommand::Sweep, &mixed)[0].contains("one of \"even\", \"odd\""));

    let edge = "model = \"two\"\ntheta1 = 0.5\ntheta2 = 0.5\nparity = \"even\"\n";
    assert!(errors(Subcommand::EdgeState, edge)[0].contains("neither region A nor region B"));
    let single = "model = \"single\"\ntheta0 = 0.5\ntransformed = true\n";
    assert!(errors(Subcommand::EdgeState, single)[0].contains("model = \"two\" only"));
}

#[test]
fn command_line_overrides_win() {
    let text = format!("out = \"from-file\"\nworkers = 2\nscale = \"desk\"\n{MINIMAL_EVOLVE}");
    let o = Overrides {
        out: Some(PathBuf::from("from-flag")),
        workers: Some(5),
        scale: Some(Scale::Paper),
    };
    let c = parse_config(Subcommand::Evolve, &text, &o).unwrap();
    assert_eq!(
        (c.out, c.workers, c.scale),
        (PathBuf::from("from-flag"), 5, Scale::Paper)
    );
}

#[test]
fn scale_sets_sweep_defaults() {
    let text = "model = \"single\"\nangle_min = 0.2\nangle_max = 1\nangle_count = 2\nkappa_min = 0\nkappa_max = 1\nkappa_count = 2\nscale = \"paper\"\n";
    let Command::Sweep(s) = parse(Subcommand::Sweep, text).unwrap().command else {
        panic!()
    };
    assert_eq!(
        (s.spectral_m, s.dynamics_m, s.steps, s.delta2),
        (100, 100, 3_000_000, 30.0)
    );
}

#[test]
fn manifests_reparse_to_the_same_config() {
    let configs = [
        (Subcommand::Evolve, format!("{MINIMAL_EVOLVE}record_every = 1000\nsnapshots = true\n")),
        (
            Subcommand::Stability,
            "model = \"two\"\ntheta1 = -0.7853981633974483\ntheta2 = 1.2566370614359172\nparity = \"even\"\neta = \"-\"\nkappa_min = 0.3\nkappa_max = 0.6\nkappa_count = 2\n".into(),
        ),
        (
            Subcommand::Flow,
            "model = \"single\"\ntheta0 = 0.39269908169872414\nkappa_min = 1.7\nkappa_max = 1.9\nkappa_count = 21\nstrict = true\n".into(),
        ),
        (
            Subcommand::Sweep,
            "model = \"two\"\nangle_min = -1.4\nangle_max = 1.4\nangle_count = 10\nkappa_min = 0\nkappa_max = 4.5\nkappa_count = 10\nparity = \"odd\"\nmode = \"spectral\"\n".into(),
        ),
        (Subcommand::Continuum, "theta0 = 0.1\neta = \"-\"\n".into()),
        (
            Subcommand::EdgeState,
            "model = \"two\"\ntheta1 = 1.2\ntheta2 = -0.7\nparity = \"odd\"\neps = \"pi\"\ntransformed = true\nm = 30\n".into(),
        ),
    ];
    for (sub, text) in configs {
        let c = parse(sub, &text).unwrap();
        let again = parse(sub, &c.manifest()).unwrap();
        assert_eq!(c, again, "{}", c.manifest());
        assert_eq!(c.manifest(), again.manifest());
    }
}

proptest! {
    #[test]
    fn evolve_manifest_round_trips(
        theta0 in 1e-3..1.57f64,
        kappa in 0.0..20.0f64,
        half in 1usize..500,
        delta2 in 1e-3..1e3f64,
        steps in 0u64..10_000_000,
        every in proptest::option::of(1u64..100_000),
        workers in 0usize..64,
    ) {
        let mut text = format!(
            "model = \"single\"\ntheta0 = {theta0:?}\nkappa = {kappa:?}\nm = {}\ndelta2 = {delta2:?}\nsteps = {steps}\nworkers = {workers}\n",
            2 * half
        );
        if let Some(n) = every {
            text.push_str(&format!("record_every = {n}\n"));
        }
        let c = parse(Subcommand::Evolve, &text).unwrap();
        prop_assert_eq!(parse(Subcommand::Evolve, &c.manifest()).unwrap(), c);
    }
}
