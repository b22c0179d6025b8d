//! Run configuration: TOML text in, validated [`RunConfig`] out, and back.
//!
//! Keys may sit at the top level, under `[run]`, or under a section named
//! after the subcommand; all three are merged into one key space. The
//! manifest form always uses `[run]` plus the subcommand section.

use std::collections::BTreeMap;
use std::fmt;
use std::path::PathBuf;

use nlqw_core::stability::FlowOptions;
use nlqw_core::sweeps::{Axis, Scale, SweepMode, SweepModel};
use nlqw_core::{
    build_edge_single, classify_region, gamma_single, Chirality, Kappa, Lattice, Quasienergy, Region, Sublattice,
    WalkModel,
};
use toml::{Table, Value};

pub const DEFAULT_OUT: &str = "nlqw-out";

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Subcommand {
    Evolve,
    Stability,
    Flow,
    Sweep,
    Continuum,
    EdgeState,
}

impl Subcommand {
    pub const ALL: [Subcommand; 6] = [
        Subcommand::Evolve,
        Subcommand::Stability,
        Subcommand::Flow,
        Subcommand::Sweep,
        Subcommand::Continuum,
        Subcommand::EdgeState,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Subcommand::Evolve => "evolve",
            Subcommand::Stability => "stability",
            Subcommand::Flow => "flow",
            Subcommand::Sweep => "sweep",
            Subcommand::Continuum => "continuum",
            Subcommand::EdgeState => "edgestate",
        }
    }
}

/// Every violation found while validating a config.
#[derive(Clone, Debug, PartialEq)]
pub struct ConfigError(pub Vec<String>);

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "invalid config ({} problem{}):",
            self.0.len(),
            if self.0.len() == 1 { "" } else { "s" }
        )?;
        for e in &self.0 {
            write!(f, "\n  - {e}")?;
        }
        Ok(())
    }
}

impl std::error::Error for ConfigError {}

/// Command-line values that take precedence over the file.
#[derive(Clone, Debug, Default)]
pub struct Overrides {
    pub out: Option<PathBuf>,
    pub workers: Option<usize>,
    pub scale: Option<Scale>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub out: PathBuf,
    /// Worker threads; 0 lets rayon choose.
    pub workers: usize,
    pub scale: Scale,
    pub command: Command,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Command {
    Evolve(EvolveConfig),
    Stability(StabilityConfig),
    Flow(FlowConfig),
    Sweep(SweepConfig),
    Continuum(ContinuumConfig),
    EdgeState(EdgeConfig),
}

impl Command {
    pub fn subcommand(&self) -> Subcommand {
        match self {
            Command::Evolve(_) => Subcommand::Evolve,
            Command::Stability(_) => Subcommand::Stability,
            Command::Flow(_) => Subcommand::Flow,
            Command::Sweep(_) => Subcommand::Sweep,
            Command::Continuum(_) => Subcommand::Continuum,
            Command::EdgeState(_) => Subcommand::EdgeState,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct EvolveConfig {
    pub model: WalkModel,
    pub kappa: f64,
    pub m: usize,
    pub delta2: f64,
    pub steps: u64,
    /// `None` spreads the Gaussian over both sublattices.
    pub parity: Option<Sublattice>,
    /// `None` records at 0, powers of two and the final step.
    pub record_every: Option<u64>,
    pub snapshots: bool,
    pub trace_stride: u64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct StabilityConfig {
    pub model: WalkModel,
    pub eps: Quasienergy,
    pub eta: Chirality,
    pub m: usize,
    pub kappa: Axis,
    pub parity: Option<Sublattice>,
    pub spectral_norm: bool,
    pub mixed_parity_rescale: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct FlowConfig {
    pub model: WalkModel,
    pub eps: Quasienergy,
    pub eta: Chirality,
    pub m: usize,
    pub kappa: Axis,
    pub parity: Option<Sublattice>,
    pub jump_threshold: f64,
    pub ambiguity_ratio: f64,
    pub degeneracy: f64,
    pub crossing_radius: f64,
    pub strict: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepConfig {
    pub model: SweepModel,
    pub angle: Axis,
    pub kappa: Axis,
    pub mode: SweepMode,
    pub spectral_m: usize,
    pub dynamics_m: usize,
    pub steps: u64,
    pub delta2: f64,
    pub parity: Option<Sublattice>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ContinuumConfig {
    pub theta0: f64,
    pub eta: Chirality,
    /// Uniform `|Φ|²`; defaults to the peak weight of the discrete (0,+)
    /// edge state on a lattice of half-width `m`.
    pub phi2: f64,
    pub m: usize,
    pub q: Axis,
    pub kappa: Axis,
}

#[derive(Clone, Debug, PartialEq)]
pub struct EdgeConfig {
    pub model: WalkModel,
    pub eps: Quasienergy,
    pub eta: Chirality,
    pub m: usize,
    pub parity: Option<Sublattice>,
    pub transformed: bool,
}

/// Parses and validates `text` for `sub`, applying `overrides` on top.
pub fn parse_config(sub: Subcommand, text: &str, overrides: &Overrides) -> Result<RunConfig, ConfigError> {
    let table: Table = text
        .parse()
        .map_err(|e: toml::de::Error| ConfigError(vec![format!("syntax error: {}", e.message().trim())]))?;
    let mut r = Reader::default();
    for (key, value) in table {
        match value {
            Value::Table(inner) if key == "run" || key == sub.name() => {
                for (k, v) in inner {
                    r.insert(format!("[{key}]"), k, v);
                }
            }
            Value::Table(_) if Subcommand::ALL.iter().any(|s| s.name() == key) => {
                r.errors
                    .push(format!("section [{key}] does not apply to `{}`", sub.name()));
            }
            Value::Table(_) => r.errors.push(format!("unknown section [{key}]")),
            v => r.insert("top level".into(), key, v),
        }
    }

    let file_out = r.string("out", false).map(PathBuf::from);
    let out = overrides
        .out
        .clone()
        .or(file_out)
        .unwrap_or_else(|| PathBuf::from(DEFAULT_OUT));
    let file_workers = r.uint("workers", false).map(|w| w as usize);
    let workers = overrides.workers.or(file_workers).unwrap_or(0);
    let file_scale = r.choice("scale", false, &[("desk", Scale::Desk), ("paper", Scale::Paper)]);
    let scale = overrides.scale.or(file_scale).unwrap_or(Scale::Desk);

    let command = match sub {
        Subcommand::Evolve => evolve(&mut r).map(Command::Evolve),
        Subcommand::Stability => stability(&mut r, scale).map(Command::Stability),
        Subcommand::Flow => flow(&mut r, scale).map(Command::Flow),
        Subcommand::Sweep => sweep(&mut r, scale).map(Command::Sweep),
        Subcommand::Continuum => continuum(&mut r, scale).map(Command::Continuum),
        Subcommand::EdgeState => edgestate(&mut r, scale).map(Command::EdgeState),
    };
    for (key, origin) in r.leftover() {
        r.errors.push(format!("unknown key `{key}` ({origin})"));
    }
    match command {
        Some(command) if r.errors.is_empty() => Ok(RunConfig {
            out,
            workers,
            scale,
            command,
        }),
        _ => Err(ConfigError(r.errors)),
    }
}

#[derive(Default)]
struct Reader {
    keys: BTreeMap<String, (String, Value)>,
    errors: Vec<String>,
}

impl Reader {
    fn insert(&mut self, origin: String, key: String, value: Value) {
        if let Some((first, _)) = self.keys.get(&key) {
            self.errors
                .push(format!("key `{key}` given twice ({first} and {origin})"));
        } else {
            self.keys.insert(key, (origin, value));
        }
    }

    fn leftover(&mut self) -> Vec<(String, String)> {
        std::mem::take(&mut self.keys)
            .into_iter()
            .map(|(k, (origin, _))| (k, origin))
            .collect()
    }

    fn take(&mut self, key: &str, required: bool) -> Option<Value> {
        let v = self.keys.remove(key).map(|(_, v)| v);
        if v.is_none() && required {
            self.errors.push(format!("missing required key `{key}`"));
        }
        v
    }

    fn wrong(&mut self, key: &str, want: &str, got: &Value) {
        self.errors.push(format!("`{key}` must be {want}, got {got}"));
    }

    fn float(&mut self, key: &str, required: bool) -> Option<f64> {
        match self.take(key, required)? {
            Value::Float(f) if f.is_finite() => Some(f),
            Value::Integer(i) => Some(i as f64),
            v => {
                self.wrong(key, "a finite number", &v);
                None
            }
        }
    }

    fn uint(&mut self, key: &str, required: bool) -> Option<u64> {
        match self.take(key, required)? {
            Value::Integer(i) if i >= 0 => Some(i as u64),
            v => {
                self.wrong(key, "a nonnegative integer", &v);
                None
            }
        }
    }

    fn boolean(&mut self, key: &str, default: bool) -> bool {
        match self.take(key, false) {
            None => default,
            Some(Value::Boolean(b)) => b,
            Some(v) => {
                self.wrong(key, "true or false", &v);
                default
            }
        }
    }

    fn string(&mut self, key: &str, required: bool) -> Option<String> {
        match self.take(key, required)? {
            Value::String(s) => Some(s),
            v => {
                self.wrong(key, "a string", &v);
                None
            }
        }
    }

    fn choice<T: Copy>(&mut self, key: &str, required: bool, options: &[(&str, T)]) -> Option<T> {
        let v = self.take(key, required)?;
        self.pick(key, v, options)
    }

    fn choice_or<T: Copy>(&mut self, key: &str, default: T, options: &[(&str, T)]) -> Option<T> {
        match self.take(key, false) {
            None => Some(default),
            Some(v) => self.pick(key, v, options),
        }
    }

    fn pick<T: Copy>(&mut self, key: &str, v: Value, options: &[(&str, T)]) -> Option<T> {
        let found = v.as_str().and_then(|s| options.iter().find(|(name, _)| *name == s));
        if found.is_none() {
            let names: Vec<String> = options.iter().map(|(n, _)| format!("\"{n}\"")).collect();
            self.wrong(key, &format!("one of {}", names.join(", ")), &v);
        }
        found.map(|&(_, t)| t)
    }

    fn kappa(&mut self, key: &str, required: bool) -> Option<f64> {
        let k = self.float(key, required)?;
        self.check(Kappa::new(k).map(|_| k))
    }

    fn half_width(&mut self, key: &str, default: Option<usize>) -> Option<usize> {
        let m = match self.uint(key, default.is_none()) {
            Some(m) => m as usize,
            None => default?,
        };
        self.check(Lattice::new(m).map(|_| m))
    }

    fn positive(&mut self, key: &str, value: Option<f64>) -> Option<f64> {
        let v = value?;
        if v > 0.0 {
            Some(v)
        } else {
            self.errors.push(format!("`{key}` must be > 0, got {v}"));
            None
        }
    }

    fn check<T>(&mut self, r: nlqw_core::Result<T>) -> Option<T> {
        r.map_err(|e| self.errors.push(e.to_string())).ok()
    }

    fn model(&mut self) -> Option<WalkModel> {
        let given = self.keys.contains_key("model");
        match self.choice("model", true, &[("single", 1u8), ("two", 2u8)]) {
            Some(1) => {
                let theta0 = self.float("theta0", true)?;
                self.check(gamma_single(theta0)).map(|_| WalkModel::Single { theta0 })
            }
            Some(_) => {
                let theta1 = self.float("theta1", true);
                let theta2 = self.float("theta2", true);
                let (theta1, theta2) = (theta1?, theta2?);
                if classify_region(theta1, theta2) == Region::Undefined {
                    self.check::<()>(Err(nlqw_core::Error::UndefinedRegion { theta1, theta2 }));
                    return None;
                }
                Some(WalkModel::Two { theta1, theta2 })
            }
            None => {
                for k in ["theta0", "theta1", "theta2"] {
                    self.take(k, false);
                }
                if !given {
                    self.errors.push(
                        "missing coin angles: `theta0` (model = \"single\") or `theta1`, `theta2` (model = \"two\")"
                            .into(),
                    );
                }
                None
            }
        }
    }

    /// Required for two-step models; optional otherwise, where `"mixed"`
    /// (the default) spreads over both sublattices.
    fn parity(&mut self, two_step: bool) -> Option<Option<Sublattice>> {
        if two_step {
            self.choice(
                "parity",
                true,
                &[("even", Some(Sublattice::Even)), ("odd", Some(Sublattice::Odd))],
            )
        } else {
            self.choice_or(
                "parity",
                None,
                &[
                    ("even", Some(Sublattice::Even)),
                    ("odd", Some(Sublattice::Odd)),
                    ("mixed", None),
                ],
            )
        }
    }

    fn quasienergy(&mut self, default: Quasienergy) -> Option<Quasienergy> {
        self.choice_or("eps", default, &[("0", Quasienergy::Zero), ("pi", Quasienergy::Pi)])
    }

    fn chirality(&mut self) -> Option<Chirality> {
        self.choice_or(
            "eta",
            Chirality::Plus,
            &[("+", Chirality::Plus), ("-", Chirality::Minus)],
        )
    }

    /// `<name>_min`, `<name>_max`, `<name>_count`, each defaulting to the
    /// matching entry of `default` when given.
    fn axis(&mut self, name: &str, default: Option<(f64, f64, usize)>) -> Option<Axis> {
        let (kmin, kmax, kcount) = (format!("{name}_min"), format!("{name}_max"), format!("{name}_count"));
        let required = default.is_none();
        let min = self.float(&kmin, required).or(default.map(|d| d.0));
        let max = self.float(&kmax, required).or(default.map(|d| d.1));
        let count = self
            .uint(&kcount, required)
            .map(|c| c as usize)
            .or(default.map(|d| d.2));
        let axis = self.check(Axis::new(min?, max?, count?))?;
        if name == "kappa" && axis.min < 0.0 {
            self.check(Kappa::new(axis.min))?;
        }
        Some(axis)
    }
}

fn evolve(r: &mut Reader) -> Option<EvolveConfig> {
    let model = r.model();
    let kappa = r.kappa("kappa", true);
    let m = r.half_width("m", None);
    let delta2 = r.float("delta2", true);
    let delta2 = r.positive("delta2", delta2);
    let steps = r.uint("steps", true);
    let parity = r.parity(matches!(model, Some(WalkModel::Two { .. })));
    let record_every = r.uint("record_every", false);
    if record_every == Some(0) {
        r.errors.push("`record_every` must be ≥ 1".into());
    }
    let snapshots = r.boolean("snapshots", false);
    let trace_stride = r.uint("trace_stride", false).unwrap_or(10);
    Some(EvolveConfig {
        model: model?,
        kappa: kappa?,
        m: m?,
        delta2: delta2?,
        steps: steps?,
        parity: parity?,
        record_every,
        snapshots,
        trace_stride,
    })
}

fn default_eps(model: Option<WalkModel>) -> Quasienergy {
    match model {
        Some(WalkModel::Two { .. }) => Quasienergy::Pi,
        _ => Quasienergy::Zero,
    }
}

fn stability(r: &mut Reader, scale: Scale) -> Option<StabilityConfig> {
    let model = r.model();
    let eps = r.quasienergy(default_eps(model));
    let eta = r.chirality();
    let m = r.half_width("m", Some(scale.defaults().0));
    let kappa = r.axis("kappa", None);
    let parity = r.parity(matches!(model, Some(WalkModel::Two { .. })));
    let spectral_norm = r.boolean("spectral_norm", false);
    let mixed_parity_rescale = r.boolean("mixed_parity_rescale", false);
    Some(StabilityConfig {
        model: model?,
        eps: eps?,
        eta: eta?,
        m: m?,
        kappa: kappa?,
        parity: parity?,
        spectral_norm,
        mixed_parity_rescale,
    })
}

fn flow(r: &mut Reader, scale: Scale) -> Option<FlowConfig> {
    let model = r.model();
    let eps = r.quasienergy(default_eps(model));
    let eta = r.chirality();
    let m = r.half_width("m", Some(scale.defaults().0));
    let kappa = r.axis("kappa", None);
    if kappa.is_some_and(|k| k.count < 2) {
        r.errors.push("`kappa_count` must be ≥ 2 for a flow".into());
    }
    let parity = r.parity(matches!(model, Some(WalkModel::Two { .. })));
    let d = FlowOptions::default();
    let jump = r.float("jump_threshold", false);
    let ratio = r.float("ambiguity_ratio", false);
    let degeneracy = r.float("degeneracy", false);
    let radius = r.float("crossing_radius", false);
    let strict = r.boolean("strict", false);
    let jump_threshold = r.positive("jump_threshold", Some(jump.unwrap_or(d.jump_threshold)));
    let ambiguity_ratio = r.positive("ambiguity_ratio", Some(ratio.unwrap_or(d.ambiguity_ratio)));
    let degeneracy = r.positive("degeneracy", Some(degeneracy.unwrap_or(d.degeneracy)));
    let crossing_radius = r.positive("crossing_radius", Some(radius.unwrap_or(0.05)));
    Some(FlowConfig {
        model: model?,
        eps: eps?,
        eta: eta?,
        m: m?,
        kappa: kappa?,
        parity: parity?,
        jump_threshold: jump_threshold?,
        ambiguity_ratio: ambiguity_ratio?,
        degeneracy: degeneracy?,
        crossing_radius: crossing_radius?,
        strict,
    })
}

fn sweep(r: &mut Reader, scale: Scale) -> Option<SweepConfig> {
    let model = r.choice(
        "model",
        true,
        &[("single", SweepModel::Single), ("two", SweepModel::TwoOnLine)],
    );
    let angle = r.axis("angle", None);
    let kappa = r.axis("kappa", None);
    for (name, axis) in [("angle", angle), ("kappa", kappa)] {
        if axis.is_some_and(|a| a.count < 2) {
            r.errors.push(format!("`{name}_count` must be ≥ 2 for a sweep"));
        }
    }
    let mode = r.choice_or(
        "mode",
        SweepMode::Both,
        &[
            ("spectral", SweepMode::Spectral),
            ("dynamical", SweepMode::Dynamical),
            ("both", SweepMode::Both),
        ],
    );
    let (spectral_m, dynamics_m, steps) = scale.defaults();
    let spectral_m = r.half_width("spectral_m", Some(spectral_m));
    let dynamics_m = r.half_width("dynamics_m", Some(dynamics_m));
    let steps = r.uint("steps", false).unwrap_or(steps);
    // initial widths of the single- and two-step phase diagrams
    let default_delta2 = if model == Some(SweepModel::TwoOnLine) {
        70.0
    } else {
        30.0
    };
    let delta2 = r.float("delta2", false).unwrap_or(default_delta2);
    let delta2 = r.positive("delta2", Some(delta2));
    let parity = r.parity(model == Some(SweepModel::TwoOnLine));
    Some(SweepConfig {
        model: model?,
        angle: angle?,
        kappa: kappa?,
        mode: mode?,
        spectral_m: spectral_m?,
        dynamics_m: dynamics_m?,
        steps,
        delta2: delta2?,
        parity: parity?,
    })
}

fn continuum(r: &mut Reader, scale: Scale) -> Option<ContinuumConfig> {
    let theta0 = r.float("theta0", true);
    let theta0 = theta0.and_then(|t| r.check(gamma_single(t)).map(|_| t));
    let eta = r.chirality();
    let m = r.half_width("m", Some(scale.defaults().0));
    let phi2 = r.float("phi2", false);
    let q = r.axis("q", Some((-3.0, 3.0, 121)));
    let kappa = r.axis("kappa", Some((0.0, 6.0, 121)));
    let phi2 = match phi2 {
        Some(p) if p < 0.0 => {
            r.errors.push(format!("`phi2` must be ≥ 0, got {p}"));
            None
        }
        Some(p) => Some(p),
        None => {
            let edge = build_edge_single(Quasienergy::Zero, Chirality::Plus, theta0?, Lattice::new(m?).ok()?);
            r.check(edge).map(|e| e.max_weight())
        }
    };
    Some(ContinuumConfig {
        theta0: theta0?,
        eta: eta?,
        phi2: phi2?,
        m: m?,
        q: q?,
        kappa: kappa?,
    })
}

fn edgestate(r: &mut Reader, scale: Scale) -> Option<EdgeConfig> {
    let model = r.model();
    let eps = r.quasienergy(Quasienergy::Zero);
    let eta = r.chirality();
    let m = r.half_width("m", Some(scale.defaults().0));
    let two_step = matches!(model, Some(WalkModel::Two { .. }));
    let parity = r.parity(two_step);
    let transformed = r.boolean("transformed", false);
    if transformed && matches!(model, Some(WalkModel::Single { .. })) {
        r.errors.push("`transformed` applies to model = \"two\" only".into());
    }
    Some(EdgeConfig {
        model: model?,
        eps: eps?,
        eta: eta?,
        m: m?,
        parity: parity?,
        transformed,
    })
}

fn scale_name(s: Scale) -> &'static str {
    match s {
        Scale::Desk => "desk",
        Scale::Paper => "paper",
    }
}

fn parity_name(p: Option<Sublattice>) -> &'static str {
    match p {
        Some(Sublattice::Even) => "even",
        Some(Sublattice::Odd) => "odd",
        None => "mixed",
    }
}

struct Section(Table);

impl Section {
    fn float(&mut self, key: &str, v: f64) -> &mut Self {
        self.0.insert(key.into(), Value::Float(v));
        self
    }

    fn int(&mut self, key: &str, v: u64) -> &mut Self {
        self.0.insert(key.into(), Value::Integer(v as i64));
        self
    }

    fn text(&mut self, key: &str, v: impl ToString) -> &mut Self {
        self.0.insert(key.into(), Value::String(v.to_string()));
        self
    }

    fn flag(&mut self, key: &str, v: bool) -> &mut Self {
        self.0.insert(key.into(), Value::Boolean(v));
        self
    }

    fn model(&mut self, model: WalkModel) -> &mut Self {
        match model {
            WalkModel::Single { theta0 } => self.text("model", "single").float("theta0", theta0),
            WalkModel::Two { theta1, theta2 } => self
                .text("model", "two")
                .float("theta1", theta1)
                .float("theta2", theta2),
        }
    }

    fn axis(&mut self, name: &str, a: Axis) -> &mut Self {
        self.float(&format!("{name}_min"), a.min)
            .float(&format!("{name}_max"), a.max)
            .int(&format!("{name}_count"), a.count as u64)
    }

    fn parity(&mut self, p: Option<Sublattice>) -> &mut Self {
        self.text("parity", parity_name(p))
    }
}

impl RunConfig {
    /// The fully resolved config as TOML. Parsing it back yields `self`.
    pub fn manifest(&self) -> String {
        let mut run = Section(Table::new());
        run.text("out", self.out.display())
            .int("workers", self.workers as u64)
            .text("scale", scale_name(self.scale));
        let mut s = Section(Table::new());
        match &self.command {
            Command::Evolve(c) => {
                s.model(c.model)
                    .float("kappa", c.kappa)
                    .int("m", c.m as u64)
                    .float("delta2", c.delta2)
                    .int("steps", c.steps)
                    .parity(c.parity)
                    .flag("snapshots", c.snapshots)
                    .int("trace_stride", c.trace_stride);
                if let Some(n) = c.record_every {
                    s.int("record_every", n);
                }
            }
            Command::Stability(c) => {
                s.model(c.model)
                    .text("eps", c.eps)
                    .text("eta", c.eta)
                    .int("m", c.m as u64)
                    .axis("kappa", c.kappa)
                    .flag("spectral_norm", c.spectral_norm)
                    .flag("mixed_parity_rescale", c.mixed_parity_rescale);
                if c.parity.is_some() {
                    s.parity(c.parity);
                }
            }
            Command::Flow(c) => {
                s.model(c.model)
                    .text("eps", c.eps)
                    .text("eta", c.eta)
                    .int("m", c.m as u64)
                    .axis("kappa", c.kappa)
                    .float("jump_threshold", c.jump_threshold)
                    .float("ambiguity_ratio", c.ambiguity_ratio)
                    .float("degeneracy", c.degeneracy)
                    .float("crossing_radius", c.crossing_radius)
                    .flag("strict", c.strict);
                if c.parity.is_some() {
                    s.parity(c.parity);
                }
            }
            Command::Sweep(c) => {
                let mode = match c.mode {
                    SweepMode::Spectral => "spectral",
                    SweepMode::Dynamical => "dynamical",
                    SweepMode::Both => "both",
                };
                s.text("model", if c.model == SweepModel::Single { "single" } else { "two" })
                    .axis("angle", c.angle)
                    .axis("kappa", c.kappa)
                    .text("mode", mode)
                    .int("spectral_m", c.spectral_m as u64)
                    .int("dynamics_m", c.dynamics_m as u64)
                    .int("steps", c.steps)
                    .float("delta2", c.delta2);
                if c.parity.is_some() {
                    s.parity(c.parity);
                }
            }
            Command::Continuum(c) => {
                s.float("theta0", c.theta0)
                    .text("eta", c.eta)
                    .float("phi2", c.phi2)
                    .int("m", c.m as u64)
                    .axis("q", c.q)
                    .axis("kappa", c.kappa);
            }
            Command::EdgeState(c) => {
                s.model(c.model)
                    .text("eps", c.eps)
                    .text("eta", c.eta)
                    .int("m", c.m as u64)
                    .flag("transformed", c.transformed);
                if c.parity.is_some() {
                    s.parity(c.parity);
                }
            }
        }
        let mut doc = Table::new();
        doc.insert("run".into(), Value::Table(run.0));
        doc.insert(self.command.subcommand().name().into(), Value::Table(s.0));
        toml::to_string(&doc).expect("a table of scalars always serializes")
    }
}
