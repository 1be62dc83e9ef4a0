//! Scenario configuration, subcommand implementations and report rendering
//! for the `gwsim` binary.
//!
//! Every command returns a [`Report`] that echoes the fully resolved
//! configuration, so feeding the echo back in reproduces the report
//! exactly. The report's `checks` decide the process exit code.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::measurement::{
    distinguishability_report, ideal_von_neumann, random_model, DistinguishabilityReport, MeasurementModel,
    OutcomeDistribution,
};
use crate::models::{
    erasure_experiment, nonideal_sweep, run_model, ErasureReport, InterpretationModel, Mode, RunReport, SweepReport,
};
use crate::scenario::{
    analyze_frame, build_schedule, collect_constraints, enumerate_assignments, order_events, OutcomeAssignment,
    ParityConstraint, RoundAnalysis, Slot,
};
use crate::spacetime::{triangle_geometry, validate_geometry, CheckResult, FrameName, GeometrySpec, Site, Vec2};
use crate::systems::{expand_in_basis, ghz_state, BasisSpec, Sign, SpinAxis, SUPPORT_EPS};

pub const SCHEMA_VERSION: u32 = 1;
pub const DEFAULT_SEED: u64 = 20_161_017;
pub const SEED_ENV: &str = "GWSIM_SEED";

const EXACT_TOL: f64 = 1e-10;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScenarioConfig {
    pub geometry: GeometryConfig,
    pub model: ModelConfig,
    pub frames: Vec<FrameName>,
    pub run: RunConfig,
    pub output: OutputConfig,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        Self {
            geometry: GeometryConfig::default(),
            model: ModelConfig::default(),
            frames: FrameName::ALL.to_vec(),
            run: RunConfig::default(),
            output: OutputConfig::default(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GeometryConfig {
    pub side: f64,
    pub tau: f64,
}

impl Default for GeometryConfig {
    fn default() -> Self {
        Self { side: 10.0, tau: 1.0 }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ModelConfig {
    pub kind: ModelKind,
}

/// `ideal` or `random:SEED`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum ModelKind {
    #[default]
    Ideal,
    Random(u64),
}

impl ModelKind {
    /// One measurement model per site, A, B, C.
    pub fn models(self) -> [MeasurementModel; 3] {
        match self {
            ModelKind::Ideal => {
                let u = ideal_von_neumann();
                [u.clone(), u.clone(), u]
            }
            ModelKind::Random(seed) => {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                [random_model(&mut rng), random_model(&mut rng), random_model(&mut rng)]
            }
        }
    }
}

impl FromStr for ModelKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s == "ideal" {
            return Ok(ModelKind::Ideal);
        }
        s.strip_prefix("random:")
            .and_then(|seed| seed.parse().ok())
            .map(ModelKind::Random)
            .ok_or_else(|| Error::Config(format!("unknown model {s:?}; expected ideal or random:SEED")))
    }
}

impl TryFrom<String> for ModelKind {
    type Error = Error;

    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<ModelKind> for String {
    fn from(k: ModelKind) -> String {
        match k {
            ModelKind::Ideal => "ideal".into(),
            ModelKind::Random(seed) => format!("random:{seed}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub mode: Mode,
    pub preferred_frame: FrameName,
    pub trials: usize,
    /// Unset until resolution; every echoed config carries a concrete seed.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    /// Number of random measurement models in `sweep`.
    pub models: usize,
    /// 1-based index of a constraint to leave out in `ghz-nogo`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub drop_constraint: Option<usize>,
    pub skip_j: bool,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            mode: Mode::RoundBorn,
            preferred_frame: FrameName::Sigma,
            trials: 10_000,
            seed: None,
            models: 100,
            drop_constraint: None,
            skip_j: false,
        }
    }
}

impl RunConfig {
    pub fn seed(&self) -> u64 {
        self.seed.unwrap_or(DEFAULT_SEED)
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    #[default]
    Json,
    Text,
}

impl FromStr for Format {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "json" => Ok(Format::Json),
            "text" => Ok(Format::Text),
            _ => Err(Error::Config(format!("unknown format {s:?}; expected json or text"))),
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputConfig {
    pub format: Format,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub path: Option<PathBuf>,
}

/// Command-line values that take precedence over the config file.
#[derive(Clone, Debug, Default)]
pub struct Overrides {
    pub side: Option<f64>,
    pub tau: Option<f64>,
    pub trials: Option<usize>,
    pub seed: Option<u64>,
    pub mode: Option<Mode>,
    pub preferred: Option<FrameName>,
    pub model: Option<ModelKind>,
    pub format: Option<Format>,
    pub drop_constraint: Option<usize>,
    pub skip_j: bool,
    pub models: Option<usize>,
}

pub fn load_config(path: &Path) -> Result<ScenarioConfig> {
    let text = fs::read_to_string(path)?;
    Ok(toml::from_str(&text)?)
}

/// Merges flags over the file (if any) and fixes the seed:
/// flag, then file, then `GWSIM_SEED`, then [`DEFAULT_SEED`].
pub fn resolve_config(file: Option<ScenarioConfig>, o: &Overrides, env_seed: Option<&str>) -> Result<ScenarioConfig> {
    let mut c = file.unwrap_or_default();
    if let Some(v) = o.side {
        c.geometry.side = v;
    }
    if let Some(v) = o.tau {
        c.geometry.tau = v;
    }
    if let Some(v) = o.trials {
        c.run.trials = v;
    }
    if let Some(v) = o.mode {
        c.run.mode = v;
    }
    if let Some(v) = o.preferred {
        c.run.preferred_frame = v;
    }
    if let Some(v) = o.model {
        c.model.kind = v;
    }
    if let Some(v) = o.format {
        c.output.format = v;
    }
    if let Some(v) = o.drop_constraint {
        c.run.drop_constraint = Some(v);
    }
    if let Some(v) = o.models {
        c.run.models = v;
    }
    c.run.skip_j |= o.skip_j;

    let env = match env_seed {
        Some(s) => Some(s.trim().parse::<u64>().map_err(|_| Error::Config(format!("{SEED_ENV}={s:?} is not a u64")))?),
        None => None,
    };
    c.run.seed = Some(o.seed.or(c.run.seed).or(env).unwrap_or(DEFAULT_SEED));

    let GeometryConfig { side, tau } = c.geometry;
    if !(side.is_finite() && side > 0.0 && tau.is_finite() && tau > 0.0) {
        return Err(Error::Config(format!("geometry needs positive finite side and tau, got side {side}, tau {tau}")));
    }
    if let Some(k) = c.run.drop_constraint {
        if !(1..=4).contains(&k) {
            return Err(Error::Config(format!("drop_constraint must be in 1..=4, got {k}")));
        }
    }
    if c.run.models == 0 {
        return Err(Error::Config("models must be at least 1".into()));
    }
    Ok(c)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Command {
    GhzNogo,
    Distinguish,
    Frames,
    Run,
    Erasure,
    Sweep,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::GhzNogo => "ghz-nogo",
            Command::Distinguish => "distinguish",
            Command::Frames => "frames",
            Command::Run => "run",
            Command::Erasure => "erasure",
            Command::Sweep => "sweep",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub schema_version: u32,
    pub version: String,
    pub command: String,
    pub config: ScenarioConfig,
    pub checks: Vec<CheckResult>,
    pub result: Section,
}

impl Report {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failed_checks(&self) -> Vec<&str> {
        self.checks.iter().filter(|c| !c.passed).map(|c| c.name.as_str()).collect()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Section {
    GhzNogo(NogoSection),
    Distinguish(DistinguishabilityReport),
    Frames(FramesSection),
    Run(RunSection),
    Erasure(ErasureReport),
    Sweep(SweepReport),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TableEntry {
    pub labels: Vec<Sign>,
    /// `[re, im]`
    pub amplitude: [f64; 2],
    pub probability: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SupportTable {
    /// Measured spin axis per electron A, B, C, e.g. `"xzz"`.
    pub basis: String,
    pub entries: Vec<TableEntry>,
    pub common_parity: Option<Sign>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NogoSection {
    pub tables: Vec<SupportTable>,
    pub constraints: Vec<ParityConstraint>,
    pub dropped_constraint: Option<usize>,
    pub total_assignments: usize,
    pub satisfying_assignments: Vec<OutcomeAssignment>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FrameRound {
    pub time: f64,
    pub events: Vec<Slot>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FrameEntry {
    pub name: FrameName,
    pub velocity: Vec2,
    pub speed: f64,
    pub rounds: Vec<FrameRound>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FramesSection {
    pub geometry: GeometrySpec,
    pub frames: Vec<FrameEntry>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FrameAnalysis {
    pub name: FrameName,
    pub rounds: Vec<RoundAnalysis>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunSection {
    pub frames: Vec<FrameAnalysis>,
    pub constraints: Vec<ParityConstraint>,
    pub satisfying_assignments: Vec<OutcomeAssignment>,
    /// Absent when `trials` is zero.
    pub run: Option<RunReport>,
}

pub fn execute(command: Command, config: &ScenarioConfig) -> Result<Report> {
    let (result, checks) = match command {
        Command::GhzNogo => cmd_ghz_nogo(config)?,
        Command::Distinguish => cmd_distinguish()?,
        Command::Frames => cmd_frames(config)?,
        Command::Run => cmd_run(config)?,
        Command::Erasure => cmd_erasure(config)?,
        Command::Sweep => cmd_sweep(config)?,
    };
    Ok(Report {
        schema_version: SCHEMA_VERSION,
        version: env!("CARGO_PKG_VERSION").to_string(),
        command: command.name().to_string(),
        config: config.clone(),
        checks,
        result,
    })
}

fn axis_char(a: SpinAxis) -> char {
    match a {
        SpinAxis::X => 'x',
        SpinAxis::Y => 'y',
        SpinAxis::Z => 'z',
    }
}

fn ghz_table(axes: [SpinAxis; 3]) -> Result<SupportTable> {
    let e = expand_in_basis(&ghz_state(), &BasisSpec::spins(&axes), SUPPORT_EPS)?;
    Ok(SupportTable {
        basis: axes.iter().map(|&a| axis_char(a)).collect(),
        common_parity: e.common_parity(),
        entries: e
            .entries
            .iter()
            .map(|x| TableEntry {
                labels: x.labels.clone(),
                amplitude: [x.amplitude.re, x.amplitude.im],
                probability: x.probability(),
            })
            .collect(),
    })
}

fn table_check(t: &SupportTable, size: usize, p: f64, parity: Option<Sign>) -> CheckResult {
    let dev = t.entries.iter().map(|e| (e.probability - p).abs()).fold(0.0, f64::max);
    let ok = t.entries.len() == size && dev <= EXACT_TOL && (parity.is_none() || t.common_parity == parity);
    CheckResult::new(
        format!("support_{}", t.basis),
        ok,
        format!("{} tuples, max |p - {p}| = {dev:e}, parity {}", t.entries.len(), parity_str(t.common_parity)),
    )
}

/// Support tables of the bare GHZ triple and the hidden-variable
/// enumeration over the six spin values.
pub fn cmd_ghz_nogo(config: &ScenarioConfig) -> Result<(Section, Vec<CheckResult>)> {
    use SpinAxis::{X, Z};
    let z = ghz_table([Z, Z, Z])?;
    let mut checks = vec![table_check(&z, 8, 0.125, None)];
    let mut tables = vec![z];
    let mut constraints = Vec::new();
    for (axes, expected) in
        [([X, X, X], Sign::Minus), ([X, Z, Z], Sign::Plus), ([Z, X, Z], Sign::Plus), ([Z, Z, X], Sign::Plus)]
    {
        let t = ghz_table(axes)?;
        checks.push(table_check(&t, 4, 0.25, Some(expected)));
        if let Some(parity) = t.common_parity {
            let slots = Site::ALL
                .iter()
                .zip(axes)
                .map(|(&s, a)| if a == X { Slot::outsider(s) } else { Slot::friend(s) })
                .collect();
            constraints.push(ParityConstraint::new(slots, parity));
        }
        tables.push(t);
    }
    let dropped = config.run.drop_constraint;
    let kept: Vec<ParityConstraint> =
        constraints.iter().enumerate().filter(|&(i, _)| Some(i + 1) != dropped).map(|(_, c)| c.clone()).collect();
    let satisfying = enumerate_assignments(&kept);
    let expected = if dropped.is_some() { 8 } else { 0 };
    checks.push(CheckResult::new(
        "satisfying_assignments",
        satisfying.len() == expected,
        format!("{} of 64 satisfy {} constraints (expected {expected})", satisfying.len(), kept.len()),
    ));
    Ok((
        Section::GhzNogo(NogoSection {
            tables,
            constraints,
            dropped_constraint: dropped,
            total_assignments: 64,
            satisfying_assignments: satisfying,
        }),
        checks,
    ))
}

fn dist_check(name: &str, d: &OutcomeDistribution, expected: &[(f64, f64)]) -> CheckResult {
    let dev = expected.iter().map(|&(l, p)| (d.probability(l) - p).abs()).fold((d.total() - 1.0).abs(), f64::max);
    CheckResult::new(name, dev <= EXACT_TOL, format!("max deviation {dev:e}"))
}

pub fn cmd_distinguish() -> Result<(Section, Vec<CheckResult>)> {
    let r = distinguishability_report()?;
    let checks = vec![
        dist_check("door_uni", &r.door_uni, &[(1.0, 0.5), (-1.0, 0.5)]),
        dist_check("door_col", &r.door_col, &[(1.0, 0.5), (-1.0, 0.5)]),
        CheckResult::new(
            "door_indistinguishable",
            r.door_uni.max_diff(&r.door_col) <= EXACT_TOL,
            format!("max difference {:e}", r.door_uni.max_diff(&r.door_col)),
        ),
        dist_check("j_uni", &r.j_uni, &[(1.0, 1.0), (-1.0, 0.0)]),
        dist_check("j_col", &r.j_col, &[(1.0, 0.5), (-1.0, 0.5)]),
    ];
    Ok((Section::Distinguish(r), checks))
}

pub fn cmd_frames(config: &ScenarioConfig) -> Result<(Section, Vec<CheckResult>)> {
    let geometry = triangle_geometry(config.geometry.side, config.geometry.tau);
    let mut checks = validate_geometry(&geometry);
    let mut frames = Vec::new();
    if checks.iter().all(|c| c.passed) {
        let schedule = build_schedule(config.geometry.side, config.geometry.tau, ModelKind::Ideal.models())?;
        for &name in &config.frames {
            let frame = name.frame(&geometry)?;
            let rounds = order_events(&schedule, &frame)?;
            checks.push(CheckResult::new(
                format!("subluminal({name})"),
                frame.speed() < 1.0,
                format!("speed {}", frame.speed()),
            ));
            frames.push(FrameEntry {
                name,
                velocity: frame.velocity(),
                speed: frame.speed(),
                rounds: rounds.into_iter().map(|r| FrameRound { time: r.time, events: r.slots }).collect(),
            });
        }
    }
    Ok((Section::Frames(FramesSection { geometry, frames }), checks))
}

pub fn cmd_run(config: &ScenarioConfig) -> Result<(Section, Vec<CheckResult>)> {
    let schedule = build_schedule(config.geometry.side, config.geometry.tau, config.model.kind.models())?;
    let geometry = *schedule.geometry();
    let mut frames = Vec::new();
    let mut frame_list = Vec::new();
    for &name in &config.frames {
        let f = name.frame(&geometry)?;
        frames.push(FrameAnalysis { name, rounds: analyze_frame(&schedule, &f)? });
        frame_list.push(f);
    }
    let constraints = collect_constraints(&schedule, &frame_list)?;
    let satisfying = enumerate_assignments(&constraints);
    let mut checks = vec![CheckResult::new(
        "jointly_unsatisfiable",
        satisfying.is_empty(),
        format!("{} constraints, {} of 64 assignments satisfy all", constraints.len(), satisfying.len()),
    )];

    let run = if config.run.trials > 0 {
        let model =
            InterpretationModel { mode: config.run.mode, preferred: config.run.preferred_frame.frame(&geometry)? };
        let r = run_model(&schedule, &model, &constraints, config.run.trials, config.run.seed())?;
        if model.mode == Mode::RoundBorn {
            let broken: Vec<usize> =
                r.preferred_constraints.iter().copied().filter(|&i| r.violation_counts[i] > 0).collect();
            checks.push(CheckResult::new(
                "preferred_constraints_hold",
                broken.is_empty(),
                format!("preferred constraints {:?}, violated {:?}", r.preferred_constraints, broken),
            ));
            if satisfying.is_empty() {
                checks.push(CheckResult::new(
                    "every_trial_violates",
                    r.trials_with_any_violation == r.trials as u64,
                    format!("{} of {} trials violate a constraint", r.trials_with_any_violation, r.trials),
                ));
            }
        }
        Some(r)
    } else {
        None
    };
    Ok((Section::Run(RunSection { frames, constraints, satisfying_assignments: satisfying, run }), checks))
}

/// `|k - n·p| ≤ 4·sqrt(n·p·(1-p))`; exact match when `p` is 0 or 1.
pub fn within_four_sigma(k: u64, n: usize, p: f64) -> bool {
    let n = n as f64;
    let sigma = (n * p * (1.0 - p)).max(0.0).sqrt();
    (k as f64 - n * p).abs() <= 4.0 * sigma + 1e-9
}

pub fn cmd_erasure(config: &ScenarioConfig) -> Result<(Section, Vec<CheckResult>)> {
    let r = erasure_experiment(config.run.trials, config.run.seed(), config.run.skip_j)?;
    let expected = if config.run.skip_j { 0.0 } else { 0.5 };
    let checks = vec![
        CheckResult::new(
            "exact_down_probability",
            (r.exact_down_probability - expected).abs() <= 1e-12,
            format!("{} (expected {expected})", r.exact_down_probability),
        ),
        CheckResult::new(
            "down_frequency",
            within_four_sigma(r.door_down, r.trials, r.exact_down_probability),
            format!("{} of {} trials", r.door_down, r.trials),
        ),
    ];
    Ok((Section::Erasure(r), checks))
}

pub fn cmd_sweep(config: &ScenarioConfig) -> Result<(Section, Vec<CheckResult>)> {
    let r = nonideal_sweep(config.run.models, config.run.seed(), config.geometry.side, config.geometry.tau)?;
    let checks = vec![
        CheckResult::new(
            "baseline",
            r.baseline.reproduces(),
            format!("{} constraints, {} satisfying", r.baseline.constraints.len(), r.baseline.satisfying_assignments),
        ),
        CheckResult::new(
            "random_models_reproduce",
            r.reproduced == r.models.len(),
            format!("{} of {} models", r.reproduced, r.models.len()),
        ),
    ];
    Ok((Section::Sweep(r), checks))
}

pub fn render(report: &Report, format: Format) -> Result<String> {
    match format {
        Format::Json => Ok(serde_json::to_string_pretty(report)? + "\n"),
        Format::Text => Ok(render_text(report)),
    }
}

/// Twelve significant digits.
pub fn sig12(x: f64) -> String {
    if x == 0.0 || !x.is_finite() {
        return format!("{x}");
    }
    let e = x.abs().log10().floor() as i32;
    if (-5..12).contains(&e) {
        format!("{:.*}", (11 - e).max(0) as usize, x)
    } else {
        format!("{x:.11e}")
    }
}

fn parity_str(p: Option<Sign>) -> String {
    p.map_or("mixed".into(), |p| format!("{:+}", p.value()))
}

fn labels(ls: &[Sign]) -> String {
    ls.iter().map(|s| if *s == Sign::Plus { "+" } else { "-" }).collect::<Vec<_>>().join(" ")
}

fn assignment_row(a: &OutcomeAssignment) -> String {
    Slot::ALL.iter().map(|&s| format!("{}={:+}", s.label(), a.get(s).value())).collect::<Vec<_>>().join(" ")
}

fn render_text(r: &Report) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "gwsim {} {} (schema {})", r.version, r.command, r.schema_version);
    match &r.result {
        Section::GhzNogo(s) => {
            for t in &s.tables {
                let _ = writeln!(out, "\nbasis {}  parity {}", t.basis, parity_str(t.common_parity));
                for e in &t.entries {
                    let _ = writeln!(
                        out,
                        "  {:<7} {:>16} {:>+16} {:>16}",
                        labels(&e.labels),
                        sig12(e.amplitude[0]),
                        sig12(e.amplitude[1]),
                        sig12(e.probability)
                    );
                }
            }
            let _ = writeln!(out, "\nconstraints:");
            for (i, c) in s.constraints.iter().enumerate() {
                let mark = if s.dropped_constraint == Some(i + 1) { "  (dropped)" } else { "" };
                let _ = writeln!(out, "  {}. {c}{mark}", i + 1);
            }
            let _ =
                writeln!(out, "satisfying assignments: {} of {}", s.satisfying_assignments.len(), s.total_assignments);
            for a in &s.satisfying_assignments {
                let _ = writeln!(out, "  {}", assignment_row(a));
            }
        }
        Section::Distinguish(d) => {
            let _ = writeln!(out, "\n{:<10} {:>16} {:>16}", "", "+1", "-1");
            for (name, dist) in
                [("door uni", &d.door_uni), ("door col", &d.door_col), ("J uni", &d.j_uni), ("J col", &d.j_col)]
            {
                let _ = writeln!(
                    out,
                    "{:<10} {:>16} {:>16}",
                    name,
                    sig12(dist.probability(1.0)),
                    sig12(dist.probability(-1.0))
                );
            }
        }
        Section::Frames(f) => {
            for e in &f.frames {
                let _ = writeln!(
                    out,
                    "\n{:<10} v = ({}, {})  |v| = {}",
                    e.name.as_str(),
                    sig12(e.velocity[0]),
                    sig12(e.velocity[1]),
                    sig12(e.speed)
                );
                for round in &e.rounds {
                    let names: Vec<&str> = round.events.iter().map(|s| s.label()).collect();
                    let _ = writeln!(out, "  t' = {:>16}  {}", sig12(round.time), names.join(", "));
                }
            }
        }
        Section::Run(s) => {
            for f in &s.frames {
                let _ = writeln!(out, "\n{}", f.name.as_str());
                for a in &f.rounds {
                    let names: Vec<&str> = a.round.slots.iter().map(|s| s.label()).collect();
                    let c = a.constraint.as_ref().map_or("no constraint".into(), |c| c.to_string());
                    let _ = writeln!(out, "  round [{}]: {} tuples, {}", names.join(", "), a.support.entries.len(), c);
                }
            }
            let _ = writeln!(out, "\nconstraints:");
            for c in &s.constraints {
                let _ = writeln!(out, "  {c}");
            }
            let _ = writeln!(out, "satisfying assignments: {} of 64", s.satisfying_assignments.len());
            if let Some(run) = &s.run {
                let _ = writeln!(out, "\n{} trials, mode {}, seed {}", run.trials, run.mode, run.seed);
                for (i, c) in run.constraints.iter().enumerate() {
                    let tag = if run.preferred_constraints.contains(&i) { " (preferred)" } else { "" };
                    let rate = if run.trials > 0 { run.violation_counts[i] as f64 / run.trials as f64 } else { 0.0 };
                    let _ = writeln!(
                        out,
                        "  {:<24} violated {:>8}  rate {:>16}{tag}",
                        c.to_string(),
                        run.violation_counts[i],
                        sig12(rate)
                    );
                }
                let _ = writeln!(
                    out,
                    "  trials violating a non-preferred constraint: {}",
                    run.trials_with_non_preferred_violation
                );
                let _ = writeln!(out, "  trials violating any constraint: {}", run.trials_with_any_violation);
            }
        }
        Section::Erasure(e) => {
            let _ = writeln!(out, "\n{} trials, seed {}, skip J: {}", e.trials, e.seed, e.skip_j);
            let _ = writeln!(out, "  J = +1: {:>8}   J = -1: {:>8}", e.j_plus, e.j_minus);
            let _ = writeln!(
                out,
                "  door up: {:>7}   door down: {:>6}   frequency {}",
                e.door_up,
                e.door_down,
                sig12(e.down_frequency())
            );
            let _ = writeln!(out, "  exact P(down) = {}", sig12(e.exact_down_probability));
        }
        Section::Sweep(s) => {
            let _ = writeln!(out, "\nseed {}; {} of {} random models reproduce", s.seed, s.reproduced, s.models.len());
            let _ =
                writeln!(out, "  {:>5} {:>12} {:>11} {:>16}", "model", "constraints", "satisfying", "max |p - 1/4|");
            for m in std::iter::once(&s.baseline).chain(&s.models) {
                let _ = writeln!(
                    out,
                    "  {:>5} {:>12} {:>11} {:>16}",
                    m.index,
                    m.constraints.len(),
                    m.satisfying_assignments,
                    sig12(m.max_support_deviation)
                );
            }
        }
    }
    let _ = writeln!(out, "\nchecks:");
    for c in &r.checks {
        let _ = writeln!(out, "  [{}] {}: {}", if c.passed { "pass" } else { "FAIL" }, c.name, c.detail);
    }
    out
}
