//! Experiment harness: configs, function families, the experiments, and
//! CSV/JSON reports with pass/fail verdicts.

use std::fmt;
use std::io::Write;
use std::path::{Path, PathBuf};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::ergodic::{
    circle_lp_norm, ebmo_norm, ergodic_maximal, sample_points, CircleFunction, CircleGrid,
    OrbitFunction, RotationSystem, SharpVariant, SystemKind, DEFAULT_THETA,
};
use crate::error::{Error, Result};
use crate::grid::GridFunction;
use crate::kernel::{OscillationKernel, DEFAULT_CUTOFF};
use crate::norms::{
    bmo_norm, bmo_vector_norm, h1_norm_ergodic, h1_norm_line, make_atom, AtomShape,
    BlockGridFunction,
};
use crate::oscillation::{
    ergodic_tail_constant, ergodic_values, line_averages, oscillation_ergodic,
    oscillation_line, LineProfile, Mode, OscillationConfig,
};
use crate::sequences::SequenceSpec;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Experiment {
    #[serde(rename = "verify-hormander", alias = "hormander")]
    VerifyHormander,
    #[serde(rename = "oscillation")]
    Oscillation,
    #[serde(rename = "strong-p", alias = "strong_p")]
    StrongP,
    #[serde(rename = "weak11", alias = "weak_11")]
    Weak11,
    #[serde(rename = "h1")]
    H1,
    #[serde(rename = "bmo")]
    Bmo,
    #[serde(rename = "fstar")]
    Fstar,
    #[serde(rename = "transfer", alias = "transference")]
    Transfer,
}

impl Experiment {
    pub const ALL: [Experiment; 8] = [
        Self::VerifyHormander,
        Self::Oscillation,
        Self::StrongP,
        Self::Weak11,
        Self::H1,
        Self::Bmo,
        Self::Fstar,
        Self::Transfer,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Self::VerifyHormander => "verify-hormander",
            Self::Oscillation => "oscillation",
            Self::StrongP => "strong-p",
            Self::Weak11 => "weak11",
            Self::H1 => "h1",
            Self::Bmo => "bmo",
            Self::Fstar => "fstar",
            Self::Transfer => "transfer",
        }
    }
}

impl fmt::Display for Experiment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Domain {
    Line,
    Ergodic,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Generator {
    Indicator,
    Tent,
    Haar,
    RandomBounded,
    Constant,
    Cosine,
    Arc,
    RandomCells,
}

impl Generator {
    fn id(self) -> u64 {
        self as u64
    }

    fn name(self) -> &'static str {
        match self {
            Self::Indicator => "indicator",
            Self::Tent => "tent",
            Self::Haar => "haar",
            Self::RandomBounded => "random_bounded",
            Self::Constant => "constant",
            Self::Cosine => "cosine",
            Self::Arc => "arc",
            Self::RandomCells => "random_cells",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FamilySpec {
    pub generator: Generator,
    pub count: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SystemSpec {
    pub kind: SystemKind,
    #[serde(default = "default_theta")]
    pub theta: f64,
}

fn default_theta() -> f64 {
    DEFAULT_THETA
}

/// Optional upper limits checked against the summary values.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Ceilings {
    /// Hörmander integral ceiling; the analytic `C(α) + C(β)` when unset.
    pub hormander: Option<f64>,
    pub strong_p: Option<f64>,
    pub weak11: Option<f64>,
    pub h1: Option<f64>,
    pub bmo: Option<f64>,
    pub fstar: Option<f64>,
    /// Largest allowed max/min of `‖O a‖₁` over the atom sweep.
    pub h1_band: Option<f64>,
    /// Largest allowed Hilbert truncation diagnostic as a fraction of `‖Hf‖₁`.
    pub hilbert_diagnostic: Option<f64>,
}

/// Experiment configuration as read from JSON. Unset fields take
/// experiment-specific defaults in [`ExperimentConfig::resolve`].
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub experiment: Option<Experiment>,
    pub n: Option<SequenceSpec>,
    pub m: Option<SequenceSpec>,
    pub k_max: Option<usize>,
    pub s: Option<f64>,
    pub mode: Option<Mode>,
    /// Length unit: averaging lengths are the sequence values times this.
    pub unit: Option<f64>,
    pub domain: Option<Domain>,
    pub system: Option<SystemSpec>,
    pub grid_step: Option<f64>,
    pub family: Option<Vec<FamilySpec>>,
    /// Explicit functions such as `indicator(0,1)`, `tent(0,2)`,
    /// `haar(0,2)`, `random_bounded(7,0,4)`, `csv:path`, `cosine(1)`,
    /// `arc(0.2,0.5)`, `cells(3,64)`, `constant(2)`.
    pub functions: Option<Vec<String>>,
    pub p_list: Option<Vec<f64>>,
    pub lambda_points: Option<usize>,
    pub lambda_span: Option<[f64; 2]>,
    pub seed: Option<u64>,
    /// Circle sample points for `μ`-integrals.
    pub samples: Option<usize>,
    pub bmo_depth: Option<usize>,
    pub epsilon: Option<f64>,
    pub hilbert_terms: Option<usize>,
    pub orbit_length: Option<usize>,
    pub ebmo_points: Option<usize>,
    pub sharp_variant: Option<SharpVariant>,
    pub y_values: Option<Vec<f64>>,
    pub cutoff: Option<f64>,
    pub horizons: Option<Vec<f64>>,
    pub points: Option<Vec<f64>>,
    /// `[j_min, j_max]` for atom widths `2^j`.
    pub atom_widths: Option<[i32; 2]>,
    pub translations: Option<usize>,
    pub ceilings: Option<Ceilings>,
    pub output: Option<PathBuf>,
}

/// Fully populated settings an experiment runs with.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Settings {
    pub experiment: Experiment,
    pub n: SequenceSpec,
    pub m: SequenceSpec,
    pub k_max: Option<usize>,
    pub s: f64,
    pub mode: Mode,
    pub unit: f64,
    pub domain: Domain,
    pub system: SystemSpec,
    pub grid_step: f64,
    pub family: Vec<FamilySpec>,
    pub functions: Vec<String>,
    pub p_list: Vec<f64>,
    pub lambda_points: usize,
    pub lambda_span: [f64; 2],
    pub seed: u64,
    pub samples: usize,
    pub bmo_depth: Option<usize>,
    pub epsilon: Option<f64>,
    pub hilbert_terms: usize,
    pub orbit_length: Option<usize>,
    pub ebmo_points: usize,
    pub sharp_variant: SharpVariant,
    pub y_values: Vec<f64>,
    pub cutoff: f64,
    pub horizons: Option<Vec<f64>>,
    pub points: Vec<f64>,
    pub atom_widths: [i32; 2],
    pub translations: usize,
    pub ceilings: Ceilings,
}

fn geometric(first: u64, count: usize) -> SequenceSpec {
    SequenceSpec::Geometric { base: 2, first, count }
}

fn family(gens: &[Generator], count: usize) -> Vec<FamilySpec> {
    gens.iter().map(|&generator| FamilySpec { generator, count }).collect()
}

fn hormander_y_values() -> Vec<f64> {
    let mut ys: Vec<f64> = [0.01, 0.1, 0.5, 1.0, 3.0, 10.0, 37.5, 100.0, 500.0, 1000.0]
        .iter()
        .flat_map(|&y| [-y, y])
        .collect();
    ys.sort_by(f64::total_cmp);
    ys
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn from_path(path: &Path) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    /// Fills unset fields with the defaults for `experiment` and validates.
    pub fn resolve(&self, experiment: Experiment) -> Result<Settings> {
        if let Some(e) = self.experiment {
            if e != experiment {
                return Err(Error::Config(format!("config is for `{e}`, not `{experiment}`")));
            }
        }
        use Generator::*;
        let domain = self.domain.unwrap_or(match experiment {
            Experiment::Fstar | Experiment::Transfer => Domain::Ergodic,
            _ => Domain::Line,
        });
        let (seq, unit, step) = match experiment {
            Experiment::VerifyHormander => (geometric(2, 24), 1.0, 0.125),
            Experiment::H1 if domain == Domain::Line => (geometric(1, 23), 2f64.powi(-8), 0.0625),
            _ => (geometric(1, 11), 1.0, 0.125),
        };
        let default_family = match domain {
            Domain::Line => family(&[Indicator, Tent, Haar, RandomBounded], 16),
            Domain::Ergodic => family(&[Arc, Cosine, RandomCells], 16),
        };
        let settings = Settings {
            experiment,
            n: self.n.clone().unwrap_or_else(|| seq.clone()),
            m: self.m.clone().or_else(|| self.n.clone()).unwrap_or(seq),
            k_max: self.k_max,
            s: self.s.unwrap_or(2.0),
            mode: self.mode.unwrap_or_default(),
            unit: self.unit.unwrap_or(unit),
            domain,
            system: self.system.unwrap_or(SystemSpec { kind: SystemKind::Flow, theta: DEFAULT_THETA }),
            grid_step: self.grid_step.unwrap_or(step),
            family: self.family.clone().unwrap_or(default_family),
            functions: self.functions.clone().unwrap_or_default(),
            p_list: self.p_list.clone().unwrap_or_else(|| vec![1.5, 2.0, 3.0, 4.0]),
            lambda_points: self.lambda_points.unwrap_or(40),
            lambda_span: self.lambda_span.unwrap_or([1e-3, 1e2]),
            seed: self.seed.unwrap_or(0),
            samples: self.samples.unwrap_or(4096),
            bmo_depth: self.bmo_depth,
            epsilon: self.epsilon,
            hilbert_terms: self.hilbert_terms.unwrap_or(4096),
            orbit_length: self.orbit_length,
            ebmo_points: self.ebmo_points.unwrap_or(256),
            sharp_variant: self.sharp_variant.unwrap_or_default(),
            y_values: self.y_values.clone().unwrap_or_else(hormander_y_values),
            cutoff: self.cutoff.unwrap_or(DEFAULT_CUTOFF),
            horizons: self.horizons.clone(),
            points: self.points.clone().unwrap_or_else(|| match domain {
                Domain::Line => (0..=32).map(|i| i as f64 * 0.5).collect(),
                Domain::Ergodic => sample_points(16),
            }),
            atom_widths: self.atom_widths.unwrap_or([-3, 6]),
            translations: self.translations.unwrap_or(20),
            ceilings: self.ceilings.clone().unwrap_or_default(),
        };
        settings.validate()?;
        Ok(settings)
    }
}

fn config_err(msg: impl Into<String>) -> Error {
    Error::Config(msg.into())
}

impl Settings {
    pub fn validate(&self) -> Result<()> {
        if !(self.s >= 2.0 && self.s.is_finite()) {
            return Err(config_err(format!("s must be finite and at least 2, got {}", self.s)));
        }
        if !(self.unit > 0.0 && self.unit.is_finite()) {
            return Err(config_err(format!("unit must be positive, got {}", self.unit)));
        }
        if !(self.grid_step > 0.0 && self.grid_step.is_finite()) {
            return Err(config_err(format!("grid_step must be positive, got {}", self.grid_step)));
        }
        if !(self.system.theta > 0.0 && self.system.theta < 1.0) {
            return Err(config_err(format!("theta must lie in (0, 1), got {}", self.system.theta)));
        }
        if self.p_list.iter().any(|&p| !(p >= 1.0)) {
            return Err(config_err("every p must be at least 1"));
        }
        if self.lambda_points < 2 {
            return Err(config_err("lambda_points must be at least 2"));
        }
        let [lo, hi] = self.lambda_span;
        if !(lo > 0.0 && lo < hi && hi.is_finite()) {
            return Err(config_err("lambda_span must satisfy 0 < lo < hi"));
        }
        if self.samples == 0 || self.hilbert_terms == 0 || self.ebmo_points == 0 {
            return Err(config_err("sample, subdivision, term and point counts must be positive"));
        }
        if self.bmo_depth == Some(0) {
            return Err(config_err("bmo_depth must be at least 1"));
        }
        if self.orbit_length == Some(0) {
            return Err(config_err("orbit_length must be positive"));
        }
        if !(self.cutoff > 0.0 && self.cutoff.is_finite()) {
            return Err(config_err("cutoff must be positive"));
        }
        if self.y_values.iter().any(|&y| y == 0.0 || !y.is_finite()) {
            return Err(config_err("y values must be finite and nonzero"));
        }
        if let Some(hs) = &self.horizons {
            if hs.iter().any(|&t| !(t > 0.0 && t.is_finite())) {
                return Err(config_err("horizons must be positive"));
            }
        }
        if self.atom_widths[0] > self.atom_widths[1] {
            return Err(config_err("atom_widths must be [j_min, j_max] with j_min ≤ j_max"));
        }
        if self.family.iter().all(|f| f.count == 0) && self.functions.is_empty() {
            return Err(Error::EmptyFamily);
        }
        Ok(())
    }

    pub fn oscillation_config(&self) -> Result<OscillationConfig> {
        let n = self.n.build()?;
        let m = self.m.build()?;
        OscillationConfig::new(&n, &m, self.k_max, self.s, self.mode)?.with_unit(self.unit)
    }

    pub fn system(&self) -> Result<RotationSystem> {
        RotationSystem::new(self.system.theta, self.system.kind)
    }

    /// The time-one map with the configured angle, for `f*`, `H` and `f♯`.
    pub fn map(&self) -> Result<RotationSystem> {
        RotationSystem::map(self.system.theta)
    }

    /// Test functions: the explicit list first, then the generated family.
    pub fn cases(&self) -> Result<Vec<Case>> {
        let mut out = Vec::new();
        for spec in &self.functions {
            out.push(parse_function(spec, self.domain, self.grid_step)?);
        }
        for fam in &self.family {
            for i in 0..fam.count {
                out.push(instantiate(fam.generator, i, self.seed, self.domain, self.grid_step)?);
            }
        }
        if out.is_empty() {
            return Err(Error::EmptyFamily);
        }
        Ok(out)
    }

    /// `lambda_points` log-spaced levels across `lambda_span · scale`.
    pub fn lambda_grid(&self, scale: f64) -> Vec<f64> {
        let [lo, hi] = self.lambda_span;
        let (a, b) = (lo.ln(), hi.ln());
        let n = self.lambda_points;
        (0..n)
            .map(|i| scale * (a + (b - a) * i as f64 / (n - 1) as f64).exp())
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum CaseFunction {
    Line(GridFunction),
    Circle(CircleFunction),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Case {
    pub label: String,
    pub function: CaseFunction,
}

impl Case {
    pub fn line(label: impl Into<String>, f: GridFunction) -> Self {
        Self { label: label.into(), function: CaseFunction::Line(f) }
    }

    pub fn circle(label: impl Into<String>, f: CircleFunction) -> Self {
        Self { label: label.into(), function: CaseFunction::Circle(f) }
    }

    fn as_line(&self) -> Result<&GridFunction> {
        match &self.function {
            CaseFunction::Line(f) => Ok(f),
            CaseFunction::Circle(_) => Err(config_err(format!("`{}` is not a line function", self.label))),
        }
    }

    fn as_circle(&self) -> Result<&CircleFunction> {
        match &self.function {
            CaseFunction::Circle(f) => Ok(f),
            CaseFunction::Line(_) => Err(config_err(format!("`{}` is not a circle function", self.label))),
        }
    }
}

/// Instance `index` of a generator; its parameters depend only on
/// `(seed, generator, index)`, so enlarging a family keeps earlier members.
pub fn instantiate(gen: Generator, index: usize, seed: u64, domain: Domain, step: f64) -> Result<Case> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream((gen.id() << 32) | index as u64);
    let label = format!("{}#{index}", gen.name());
    let cells = |rng: &mut ChaCha8Rng, lo: f64, hi: f64| {
        let k0 = (lo / step).ceil().max(1.0) as u64;
        let k1 = (hi / step).floor().max(k0 as f64) as u64;
        rng.gen_range(k0..=k1) as f64 * step
    };
    match domain {
        Domain::Line => {
            let a = (rng.gen_range(0.0..12.0) / step).floor() * step;
            let f = match gen {
                Generator::Indicator => GridFunction::indicator(a, a + cells(&mut rng, 0.25, 4.0), step)?,
                Generator::Tent => GridFunction::tent(a, a + cells(&mut rng, 0.25, 4.0), step)?,
                Generator::Haar => {
                    let w = 2.0 * step * 2f64.powi(rng.gen_range(0..5));
                    make_atom(a, a + w, AtomShape::Haar, step)?.into_profile()
                }
                Generator::RandomBounded => {
                    let w = cells(&mut rng, 0.25, 4.0);
                    GridFunction::random_bounded(rng.gen(), a, a + w, step)?
                }
                other => {
                    return Err(config_err(format!("generator `{}` is not defined on the line", other.name())))
                }
            };
            Ok(Case::line(label, f))
        }
        Domain::Ergodic => {
            let f = match gen {
                Generator::Constant => CircleFunction::Constant(rng.gen_range(-2.0..2.0)),
                Generator::Cosine => CircleFunction::Cosine { amplitude: rng.gen_range(0.5..2.0) },
                Generator::Arc | Generator::Indicator => {
                    let a = rng.gen_range(0.0..0.9);
                    let w = rng.gen_range(0.05..0.5);
                    CircleFunction::arc(a, (a + w).min(1.0))?
                }
                Generator::RandomCells | Generator::RandomBounded => {
                    CircleFunction::Cells(CircleGrid::random(rng.gen(), 8 << rng.gen_range(0..3))?)
                }
                other => {
                    return Err(config_err(format!("generator `{}` is not defined on the circle", other.name())))
                }
            };
            Ok(Case::circle(label, f))
        }
    }
}

fn parse_args(spec: &str, name: &str, count: usize) -> Result<Vec<f64>> {
    let inner = spec
        .strip_prefix(name)
        .and_then(|r| r.trim().strip_prefix('('))
        .and_then(|r| r.trim().strip_suffix(')'))
        .ok_or_else(|| config_err(format!("cannot parse function `{spec}`")))?;
    let args: Vec<f64> = inner
        .split(',')
        .map(|t| t.trim().parse::<f64>().map_err(|_| config_err(format!("bad number in `{spec}`"))))
        .collect::<Result<_>>()?;
    if args.len() != count {
        return Err(config_err(format!("`{name}` takes {count} arguments, got `{spec}`")));
    }
    Ok(args)
}

/// Parses one entry of the `functions` list.
pub fn parse_function(spec: &str, domain: Domain, step: f64) -> Result<Case> {
    let spec = spec.trim();
    let name = spec.split('(').next().unwrap_or("").trim();
    let f = match (domain, name) {
        (Domain::Line, _) if spec.starts_with("csv:") => {
            let file = std::fs::File::open(&spec[4..])?;
            CaseFunction::Line(GridFunction::from_csv(file, 0.0, step)?)
        }
        (Domain::Line, "indicator") => {
            let a = parse_args(spec, name, 2)?;
            CaseFunction::Line(GridFunction::indicator(a[0], a[1], step)?)
        }
        (Domain::Line, "tent") => {
            let a = parse_args(spec, name, 2)?;
            CaseFunction::Line(GridFunction::tent(a[0], a[1], step)?)
        }
        (Domain::Line, "haar" | "atom") => {
            let a = parse_args(spec, name, 2)?;
            CaseFunction::Line(make_atom(a[0], a[1], AtomShape::Haar, step)?.into_profile())
        }
        (Domain::Line, "random_bounded") => {
            let a = parse_args(spec, name, 3)?;
            CaseFunction::Line(GridFunction::random_bounded(a[0] as u64, a[1], a[2], step)?)
        }
        (Domain::Line, "constant") => {
            let a = parse_args(spec, name, 3)?;
            CaseFunction::Line(GridFunction::constant_on(a[0], a[1], a[2], step)?)
        }
        (Domain::Ergodic, "constant") => CaseFunction::Circle(CircleFunction::Constant(parse_args(spec, name, 1)?[0])),
        (Domain::Ergodic, "cosine") => {
            CaseFunction::Circle(CircleFunction::Cosine { amplitude: parse_args(spec, name, 1)?[0] })
        }
        (Domain::Ergodic, "arc" | "indicator") => {
            let a = parse_args(spec, name, 2)?;
            CaseFunction::Circle(CircleFunction::arc(a[0], a[1])?)
        }
        (Domain::Ergodic, "cells") => {
            let a = parse_args(spec, name, 2)?;
            CaseFunction::Circle(CircleFunction::Cells(CircleGrid::random(a[0] as u64, a[1] as usize)?))
        }
        _ => return Err(config_err(format!("unknown function `{spec}` for the {domain:?} domain"))),
    };
    Ok(Case { label: spec.to_string(), function: f })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(untagged)]
pub enum Value {
    Num(f64),
    Int(i64),
    Text(String),
    Flag(bool),
}

impl Value {
    pub fn as_f64(&self) -> Option<f64> {
        match self {
            Value::Num(v) => Some(*v),
            Value::Int(v) => Some(*v as f64),
            _ => None,
        }
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Num(v) => write!(f, "{v}"),
            Value::Int(v) => write!(f, "{v}"),
            Value::Text(s) => f.write_str(s),
            Value::Flag(b) => write!(f, "{b}"),
        }
    }
}

impl From<f64> for Value {
    fn from(v: f64) -> Self {
        Value::Num(v)
    }
}

impl From<usize> for Value {
    fn from(v: usize) -> Self {
        Value::Int(v as i64)
    }
}

impl From<i32> for Value {
    fn from(v: i32) -> Self {
        Value::Int(v as i64)
    }
}

impl From<bool> for Value {
    fn from(v: bool) -> Self {
        Value::Flag(v)
    }
}

impl From<&str> for Value {
    fn from(v: &str) -> Self {
        Value::Text(v.to_string())
    }
}

impl From<String> for Value {
    fn from(v: String) -> Self {
        Value::Text(v)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SummaryEntry {
    pub name: String,
    pub value: f64,
    /// Row index attaining `value`, when it is a row maximum.
    pub argmax: Option<usize>,
    pub case: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Verdict {
    pub name: String,
    pub pass: bool,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentReport {
    pub experiment: Experiment,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Value>>,
    pub summary: Vec<SummaryEntry>,
    pub diagnostics: Vec<(String, f64)>,
    pub verdicts: Vec<Verdict>,
}

impl ExperimentReport {
    fn new(experiment: Experiment, columns: &[&str]) -> Self {
        Self {
            experiment,
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
            summary: Vec::new(),
            diagnostics: Vec::new(),
            verdicts: Vec::new(),
        }
    }

    pub fn column(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c == name)
    }

    /// Numeric values of a column, row by row.
    pub fn numbers(&self, name: &str) -> Vec<f64> {
        let j = self.column(name).unwrap_or_else(|| panic!("no column `{name}`"));
        self.rows.iter().map(|r| r[j].as_f64().unwrap_or(f64::NAN)).collect()
    }

    pub fn texts(&self, name: &str) -> Vec<String> {
        let j = self.column(name).unwrap_or_else(|| panic!("no column `{name}`"));
        self.rows.iter().map(|r| r[j].to_string()).collect()
    }

    pub fn summary_value(&self, name: &str) -> Option<f64> {
        self.summary.iter().find(|s| s.name == name).map(|s| s.value)
    }

    pub fn passed(&self) -> bool {
        self.verdicts.iter().all(|v| v.pass)
    }

    /// Records the maximum of `column` over rows accepted by `keep`.
    fn sup(&mut self, name: impl Into<String>, column: &str, keep: impl Fn(&[Value]) -> bool) -> f64 {
        let j = self.column(column).expect("known column");
        let case_col = self.column("case");
        let mut best: Option<(usize, f64)> = None;
        for (i, row) in self.rows.iter().enumerate() {
            if !keep(row) {
                continue;
            }
            let v = row[j].as_f64().unwrap_or(f64::NAN);
            if best.map_or(true, |(_, b)| v > b || v.is_nan()) {
                best = Some((i, v));
            }
        }
        let (argmax, value) = match best {
            Some((i, v)) => (Some(i), v),
            None => (None, 0.0),
        };
        let case = argmax.zip(case_col).map(|(i, c)| self.rows[i][c].to_string());
        self.summary.push(SummaryEntry { name: name.into(), value, argmax, case });
        value
    }

    fn verdict(&mut self, name: &str, pass: bool, detail: String) {
        self.verdicts.push(Verdict { name: name.to_string(), pass, detail });
    }

    fn diagnostic(&mut self, name: &str, value: f64) {
        self.diagnostics.push((name.to_string(), value));
    }

    fn finite_verdict(&mut self, column: &str) {
        let vals = self.numbers(column);
        let ok = vals.iter().all(|v| v.is_finite());
        self.verdict(&format!("{column}_finite"), ok, format!("{} rows", vals.len()));
    }

    fn ceiling_verdict(&mut self, name: &str, value: f64, ceiling: Option<f64>) {
        if let Some(c) = ceiling {
            self.verdict(name, value <= c, format!("{value} vs ceiling {c}"));
        }
    }

    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(&self.columns)?;
        for row in &self.rows {
            w.write_record(row.iter().map(|v| v.to_string()))?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn csv_string(&self) -> Result<String> {
        let mut buf = Vec::new();
        self.write_csv(&mut buf)?;
        Ok(String::from_utf8(buf).expect("csv output is utf-8"))
    }

    pub fn summary_json(&self, settings: &Settings) -> serde_json::Value {
        serde_json::json!({
            "experiment": self.experiment,
            "settings": settings,
            "rows": self.rows.len(),
            "summary": self.summary,
            "diagnostics": self.diagnostics.iter().map(|(k, v)| serde_json::json!({"name": k, "value": v})).collect::<Vec<_>>(),
            "verdicts": self.verdicts,
            "pass": self.passed(),
        })
    }

    /// Writes `<stem>.csv` and `<stem>.json`; a `.csv` or `.json` extension
    /// on `path` is replaced.
    pub fn write_files(&self, settings: &Settings, path: &Path) -> Result<(PathBuf, PathBuf)> {
        let stem = match path.extension().and_then(|e| e.to_str()) {
            Some("csv" | "json") => path.with_extension(""),
            _ => path.to_path_buf(),
        };
        let csv_path = stem.with_extension("csv");
        let json_path = stem.with_extension("json");
        if let Some(dir) = csv_path.parent().filter(|d| !d.as_os_str().is_empty()) {
            std::fs::create_dir_all(dir)?;
        }
        self.write_csv(std::fs::File::create(&csv_path)?)?;
        let mut text = serde_json::to_string_pretty(&self.summary_json(settings))?;
        text.push('\n');
        std::fs::write(&json_path, text)?;
        Ok((csv_path, json_path))
    }
}

pub fn run(settings: &Settings) -> Result<ExperimentReport> {
    match settings.experiment {
        Experiment::VerifyHormander => exp_hormander(settings),
        Experiment::Oscillation => exp_oscillation(settings),
        Experiment::StrongP => exp_strong_p(settings),
        Experiment::Weak11 => exp_weak_11(settings),
        Experiment::H1 => exp_h1(settings),
        Experiment::Bmo => exp_bmo(settings),
        Experiment::Fstar => exp_fstar_ratio(settings),
        Experiment::Transfer => exp_transference(settings),
    }
}

fn ratio(num: f64, den: f64) -> f64 {
    if num == 0.0 {
        0.0
    } else {
        num / den
    }
}

/// `O f` at the sample points of the circle.
fn circle_oscillation(cfg: &OscillationConfig, s: &Settings, f: &CircleFunction) -> Result<Vec<f64>> {
    ergodic_values(cfg, &s.system()?, &OrbitFunction::new(f.clone()), &sample_points(s.samples))
}

fn circle_values(f: &CircleFunction, samples: usize) -> Vec<f64> {
    sample_points(samples).iter().map(|&x| f.eval_at(x)).collect()
}

fn par_rows<T: Sync>(items: &[T], f: impl Fn(&T) -> Result<Vec<Vec<Value>>> + Sync + Send) -> Result<Vec<Vec<Value>>> {
    let chunks: Vec<Vec<Vec<Value>>> = items.par_iter().map(f).collect::<Result<_>>()?;
    Ok(chunks.into_iter().flatten().collect())
}

pub fn exp_hormander(s: &Settings) -> Result<ExperimentReport> {
    let cfg = s.oscillation_config()?;
    let kernel = OscillationKernel::new(&cfg);
    let ceiling = s.ceilings.hormander.unwrap_or_else(|| kernel.hormander_ceiling());
    let mut rep = ExperimentReport::new(
        Experiment::VerifyHormander,
        &["y", "cutoff", "integral", "positive_side", "negative_side", "ceiling", "pass"],
    );
    rep.rows = par_rows(&s.y_values, |&y| {
        let h = kernel.hormander_integral(y, s.cutoff)?;
        let pass = h.total <= ceiling + 1e-6;
        Ok(vec![vec![y.into(), s.cutoff.into(), h.total.into(), h.positive_side.into(), h.negative_side.into(), ceiling.into(), pass.into()]])
    })?;
    let sup = rep.sup("sup_integral", "integral", |_| true);
    let all = rep.numbers("integral");
    let min = all.iter().copied().fold(f64::INFINITY, f64::min);
    rep.diagnostic("min_integral", min);
    rep.diagnostic("ceiling", ceiling);
    rep.verdict("below_ceiling", sup <= ceiling + 1e-6, format!("sup {sup} vs ceiling {ceiling}"));
    let neg = rep.numbers("negative_side");
    rep.verdict(
        "negative_side_zero",
        neg.iter().all(|&v| v == 0.0),
        format!("max negative-side integral {}", neg.iter().copied().fold(0.0, f64::max)),
    );
    Ok(rep)
}

pub fn exp_oscillation(s: &Settings) -> Result<ExperimentReport> {
    let cfg = s.oscillation_config()?;
    let cases = s.cases()?;
    let mut rep = ExperimentReport::new(Experiment::Oscillation, &["case", "x", "value", "tail_bound"]);
    let system = s.system()?;
    rep.rows = par_rows(&cases, |case| {
        s.points
            .iter()
            .map(|&x| {
                let v = match &case.function {
                    CaseFunction::Line(f) => oscillation_line(&cfg, f, x),
                    CaseFunction::Circle(f) => oscillation_ergodic(&cfg, &system, &OrbitFunction::new(f.clone()), x)?,
                };
                let tail = v.tail_bound.map_or(Value::Text(String::new()), Value::Num);
                Ok(vec![case.label.as_str().into(), x.into(), v.value.into(), tail])
            })
            .collect()
    })?;
    rep.sup("sup_value", "value", |_| true);
    rep.finite_verdict("value");
    Ok(rep)
}

pub fn exp_strong_p(s: &Settings) -> Result<ExperimentReport> {
    let cfg = s.oscillation_config()?;
    let cases = s.cases()?;
    let mut rep = ExperimentReport::new(Experiment::StrongP, &["case", "p", "norm_of", "norm_f", "ratio"]);
    rep.rows = par_rows(&cases, |case| {
        let (of, fv): (Box<dyn Fn(f64) -> f64>, Box<dyn Fn(f64) -> f64>) = match &case.function {
            CaseFunction::Line(f) => {
                let prof = LineProfile::build(&cfg, f);
                let f = f.clone();
                (Box::new(move |p| prof.lp_norm(p)), Box::new(move |p| f.lp_norm(p)))
            }
            CaseFunction::Circle(f) => {
                let o = circle_oscillation(&cfg, s, f)?;
                let v = circle_values(f, s.samples);
                (Box::new(move |p| circle_lp_norm(&o, p)), Box::new(move |p| circle_lp_norm(&v, p)))
            }
        };
        Ok(s.p_list
            .iter()
            .map(|&p| {
                let (a, b) = (of(p), fv(p));
                vec![case.label.as_str().into(), p.into(), a.into(), b.into(), ratio(a, b).into()]
            })
            .collect())
    })?;
    let sup = rep.sup("sup_ratio", "ratio", |_| true);
    for &p in &s.p_list {
        rep.sup(format!("sup_ratio[p={p}]"), "ratio", |r| r[1] == Value::Num(p));
    }
    rep.finite_verdict("ratio");
    rep.ceiling_verdict("ratio_below_ceiling", sup, s.ceilings.strong_p);
    Ok(rep)
}

pub fn exp_weak_11(s: &Settings) -> Result<ExperimentReport> {
    let cfg = s.oscillation_config()?;
    let cases = s.cases()?;
    let mut rep = ExperimentReport::new(
        Experiment::Weak11,
        &["case", "lambda", "measure", "norm1_f", "ratio", "chebyshev"],
    );
    rep.rows = par_rows(&cases, |case| {
        let rows = match &case.function {
            CaseFunction::Line(f) => {
                let prof = LineProfile::build(&cfg, f);
                let l1 = f.l1_norm();
                let width = f.support().map_or(1.0, |(a, b)| b - a);
                s.lambda_grid(l1 / width)
                    .into_iter()
                    .map(|lam| {
                        let m = prof.superlevel_measure(lam);
                        let cheb = ratio(f.distribution_bound(lam), l1);
                        vec![case.label.as_str().into(), lam.into(), m.into(), l1.into(), ratio(lam * m, l1).into(), cheb.into()]
                    })
                    .collect()
            }
            CaseFunction::Circle(f) => {
                let o = circle_oscillation(&cfg, s, f)?;
                let v = circle_values(f, s.samples);
                let l1 = circle_lp_norm(&v, 1.0);
                let n = o.len() as f64;
                s.lambda_grid(l1)
                    .into_iter()
                    .map(|lam| {
                        let m = o.iter().filter(|&&x| x > lam).count() as f64 / n;
                        let cheb = ratio(lam * v.iter().filter(|x| x.abs() > lam).count() as f64 / n, l1);
                        vec![case.label.as_str().into(), lam.into(), m.into(), l1.into(), ratio(lam * m, l1).into(), cheb.into()]
                    })
                    .collect()
            }
        };
        Ok(rows)
    })?;
    let sup = rep.sup("sup_ratio", "ratio", |_| true);
    let cheb = rep.sup("sup_chebyshev", "chebyshev", |_| true);
    rep.finite_verdict("ratio");
    rep.verdict("chebyshev", cheb <= 1.0, format!("sup λ|{{|f|>λ}}|/‖f‖₁ = {cheb}"));
    rep.ceiling_verdict("ratio_below_ceiling", sup, s.ceilings.weak11);
    Ok(rep)
}

/// Lattice-aligned translations in `[0, 64)` for the atom sweep.
fn atom_translations(seed: u64, j: i32, count: usize, step: f64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(0xA70_0000 + (j + 64) as u64);
    let slots = (64.0 / step) as u64;
    (0..count).map(|_| rng.gen_range(0..slots) as f64 * step).collect()
}

pub fn exp_h1(s: &Settings) -> Result<ExperimentReport> {
    let cfg = s.oscillation_config()?;
    match s.domain {
        Domain::Line => {
            let mut rep = ExperimentReport::new(
                Experiment::H1,
                &["case", "width", "shift", "norm1_of", "h1_norm", "ratio", "hilbert_tail"],
            );
            let mut jobs = Vec::new();
            for j in s.atom_widths[0]..=s.atom_widths[1] {
                for t in atom_translations(s.seed, j, s.translations, s.grid_step) {
                    jobs.push((j, t));
                }
            }
            let eps = s.epsilon.unwrap_or(s.grid_step);
            rep.rows = par_rows(&jobs, |&(j, t)| {
                let w = 2f64.powi(j);
                let atom = make_atom(t, t + w, AtomShape::Haar, s.grid_step)?;
                let of = LineProfile::build(&cfg, atom.profile()).lp_norm(1.0);
                let h1 = h1_norm_line(atom.profile(), eps)?;
                Ok(vec![vec![
                    format!("haar(2^{j})").into(),
                    w.into(),
                    t.into(),
                    of.into(),
                    h1.norm.into(),
                    ratio(of, h1.norm).into(),
                    h1.tail_estimate.into(),
                ]])
            })?;
            let max = rep.sup("sup_norm1_of", "norm1_of", |_| true);
            let min = rep.numbers("norm1_of").into_iter().fold(f64::INFINITY, f64::min);
            let band = max / min;
            rep.summary.push(SummaryEntry { name: "band".into(), value: band, argmax: None, case: None });
            let sup = rep.sup("sup_ratio", "ratio", |_| true);
            rep.diagnostic("min_norm1_of", min);
            rep.diagnostic("epsilon", eps);
            rep.finite_verdict("norm1_of");
            let limit = s.ceilings.h1_band.unwrap_or(3.0);
            rep.verdict("uniform_band", band <= limit, format!("max/min = {band} vs {limit}"));
            rep.ceiling_verdict("ratio_below_ceiling", sup, s.ceilings.h1);
            Ok(rep)
        }
        Domain::Ergodic => {
            let cases = s.cases()?;
            let map = s.map()?;
            let mut rep = ExperimentReport::new(
                Experiment::H1,
                &["case", "norm1_of", "norm1_f", "norm1_hf", "h1_norm", "ratio", "hilbert_increment", "increment_fraction"],
            );
            rep.rows = par_rows(&cases, |case| {
                let f = case.as_circle()?;
                let o = circle_oscillation(&cfg, s, f)?;
                let of = circle_lp_norm(&o, 1.0);
                let h = h1_norm_ergodic(&map, f, s.hilbert_terms, s.samples)?;
                let frac = ratio(h.diagnostic, h.hilbert_l1);
                Ok(vec![vec![
                    case.label.as_str().into(),
                    of.into(),
                    h.l1.into(),
                    h.hilbert_l1.into(),
                    h.norm.into(),
                    ratio(of, h.norm).into(),
                    h.diagnostic.into(),
                    frac.into(),
                ]])
            })?;
            let sup = rep.sup("sup_ratio", "ratio", |_| true);
            let frac = rep.sup("sup_increment_fraction", "increment_fraction", |_| true);
            rep.diagnostic("hilbert_terms", s.hilbert_terms as f64);
            rep.finite_verdict("ratio");
            let limit = s.ceilings.hilbert_diagnostic.unwrap_or(0.01);
            rep.verdict("hilbert_truncation", frac < limit, format!("sup increment/‖Hf‖₁ = {frac} vs {limit}"));
            rep.ceiling_verdict("ratio_below_ceiling", sup, s.ceilings.h1);
            Ok(rep)
        }
    }
}

/// `O_ℝ f` and `K ∗ f` sampled at cell midpoints over the region where they
/// can be nonzero, padded on the left by the support width.
pub fn sample_line(cfg: &OscillationConfig, f: &GridFunction, step: f64) -> Result<(GridFunction, BlockGridFunction)> {
    let (a, b) = f.support().unwrap_or((0.0, step));
    let lo = ((a - (b - a)) / step).floor() * step;
    let hi = ((b + cfg.max_length()) / step).ceil() * step;
    let cells = ((hi - lo) / step).round() as usize;
    let rows: Vec<(f64, Vec<f64>)> = (0..cells)
        .into_par_iter()
        .map(|i| {
            let x = lo + (i as f64 + 0.5) * step;
            let avg = line_averages(cfg, f, x);
            (cfg.aggregate(&avg), cfg.components(&avg))
        })
        .collect();
    let scalar = GridFunction::new(lo, step, rows.iter().map(|r| r.0).collect())?;
    let flat = rows.into_iter().flat_map(|r| r.1).collect();
    let vector = BlockGridFunction::from_flat(lo, step, cfg.space().clone(), flat)?;
    Ok((scalar, vector))
}

pub fn exp_bmo(s: &Settings) -> Result<ExperimentReport> {
    let cfg = s.oscillation_config()?;
    let cases = s.cases()?;
    match s.domain {
        Domain::Line => {
            let mut rep = ExperimentReport::new(
                Experiment::Bmo,
                &["case", "sup_f", "bmo_of", "bmo_vector", "ratio", "ratio_vector", "factor_two"],
            );
            rep.rows = par_rows(&cases, |case| {
                let f = case.as_line()?;
                let (scalar, vector) = sample_line(&cfg, f, s.grid_step)?;
                let depth = s.bmo_depth.unwrap_or_else(|| (scalar.len().max(2) as f64).log2().ceil() as usize);
                let bo = bmo_norm(&scalar, depth)?;
                let bv = bmo_vector_norm(&vector, depth)?;
                let sup = f.sup_norm();
                Ok(vec![vec![
                    case.label.as_str().into(),
                    sup.into(),
                    bo.into(),
                    bv.into(),
                    ratio(bo, sup).into(),
                    ratio(bv, sup).into(),
                    (bo <= 2.0 * bv + 1e-9).into(),
                ]])
            })?;
            let sup = rep.sup("sup_ratio", "ratio", |_| true);
            rep.sup("sup_ratio_vector", "ratio_vector", |_| true);
            rep.finite_verdict("ratio");
            let j = rep.column("factor_two").unwrap();
            let ok = rep.rows.iter().all(|r| r[j] == Value::Flag(true));
            rep.verdict("factor_two", ok, "bmo(‖K∗f‖_B) ≤ 2·bmo_B(K∗f) per case".into());
            rep.ceiling_verdict("ratio_below_ceiling", sup, s.ceilings.bmo);
            Ok(rep)
        }
        Domain::Ergodic => {
            let system = s.system()?;
            let map = s.map()?;
            let n_max = s.orbit_length.unwrap_or(64);
            let points = sample_points(s.ebmo_points);
            let mut rep = ExperimentReport::new(Experiment::Bmo, &["case", "sup_f", "ebmo_of", "ratio"]);
            rep.rows = par_rows(&cases, |case| {
                let f = OrbitFunction::new(case.as_circle()?.clone());
                oscillation_ergodic(&cfg, &system, &f, 0.0)?;
                let of = |x: f64| oscillation_ergodic(&cfg, &system, &f, x).map_or(f64::NAN, |v| v.value);
                let e = ebmo_norm(&map, &of, &points, n_max, s.sharp_variant)?;
                let sup = f.base().sup_bound();
                Ok(vec![vec![case.label.as_str().into(), sup.into(), e.into(), ratio(e, sup).into()]])
            })?;
            let sup = rep.sup("sup_ratio", "ratio", |_| true);
            rep.diagnostic("orbit_length", n_max as f64);
            rep.finite_verdict("ratio");
            rep.ceiling_verdict("ratio_below_ceiling", sup, s.ceilings.bmo);
            Ok(rep)
        }
    }
}

pub fn exp_fstar_ratio(s: &Settings) -> Result<ExperimentReport> {
    if s.domain != Domain::Ergodic {
        return Err(config_err("fstar runs on the ergodic domain only"));
    }
    let cfg = s.oscillation_config()?;
    let cases = s.cases()?;
    let map = s.map()?;
    let n_max = s.orbit_length.unwrap_or(cfg.max_length().ceil() as usize);
    let points = sample_points(s.samples);
    let mut rep = ExperimentReport::new(Experiment::Fstar, &["case", "norm1_of", "norm1_fstar", "ratio"]);
    rep.rows = par_rows(&cases, |case| {
        let f = case.as_circle()?;
        let of = circle_lp_norm(&circle_oscillation(&cfg, s, f)?, 1.0);
        let fs: Vec<f64> = points.par_iter().map(|&x| ergodic_maximal(&map, f, x, n_max)).collect();
        let fs = circle_lp_norm(&fs, 1.0);
        Ok(vec![vec![case.label.as_str().into(), of.into(), fs.into(), ratio(of, fs).into()]])
    })?;
    let sup = rep.sup("sup_ratio", "ratio", |_| true);
    rep.diagnostic("orbit_length", n_max as f64);
    rep.finite_verdict("ratio");
    rep.ceiling_verdict("ratio_below_ceiling", sup, s.ceilings.fstar);
    Ok(rep)
}

/// Largest `k_max` whose longest window fits in `horizon`.
pub fn blocks_within(cfg: &OscillationConfig, horizon: f64) -> Option<usize> {
    let n = cfg.pair().n().values();
    let fits = |k: usize| {
        let top = cfg.pair().blocks()[..k].iter().flatten().copied().max().unwrap_or(0);
        (n[k] as f64 * cfg.unit()).max(top as f64 * cfg.unit()) <= horizon
    };
    (1..=cfg.k_max()).rev().find(|&k| fits(k))
}

/// Orbit data `t ↦ f(x + tθ)` on `[0, T]`, cell-averaged, reflected to
/// `[-T, 0]` so that the line averages at 0 are the orbit averages.
pub fn orbit_segment(system: &RotationSystem, f: &CircleFunction, x: f64, horizon: f64, step: f64) -> Result<GridFunction> {
    let theta = system.theta();
    let g = GridFunction::from_antiderivative(0.0, horizon, step, |t| f.antiderivative(x + t * theta) / theta)?;
    Ok(g.reflect())
}

/// Slack for floating-point rounding in the transference comparison.
pub const TRANSFER_ROUNDING: f64 = 1e-12;

pub fn exp_transference(s: &Settings) -> Result<ExperimentReport> {
    let cfg = s.oscillation_config()?;
    let system = s.system()?;
    if system.kind() != SystemKind::Flow {
        return Err(config_err("transference compares against the Kronecker flow"));
    }
    let cases = s.cases()?;
    let full = cfg.max_length();
    let horizons = s.horizons.clone().unwrap_or_else(|| vec![full / 8.0, full / 4.0, full / 2.0, full]);
    let mut plans = Vec::new();
    for &t in &horizons {
        let k = blocks_within(&cfg, t).ok_or(Error::InsufficientHorizon {
            required: cfg.base_length(1).max(cfg.pair().blocks()[0].iter().copied().max().unwrap_or(0) as f64 * cfg.unit()),
            available: t,
        })?;
        plans.push((t, cfg.truncated(k)?));
    }
    let mut rep = ExperimentReport::new(
        Experiment::Transfer,
        &["case", "x", "horizon", "k_max", "ergodic", "line", "discrepancy", "tail_bound", "within_bound"],
    );
    let mut jobs = Vec::new();
    for case in &cases {
        for &x in &s.points {
            jobs.push((case, x));
        }
    }
    rep.rows = par_rows(&jobs, |&(case, x)| {
        let f = case.as_circle()?;
        let orbit = OrbitFunction::new(f.clone());
        let ergodic = oscillation_ergodic(&cfg, &system, &orbit, x)?.value;
        let d = ergodic_tail_constant(&system, &orbit);
        let scale = 1.0 + f.sup_bound();
        plans
            .iter()
            .map(|(t, trunc)| {
                let g = orbit_segment(&system, f, x, *t, s.grid_step)?;
                let line = oscillation_line(trunc, &g, 0.0).value;
                let bound = d * trunc.tail_factor();
                let disc = (ergodic - line).abs();
                let ok = disc <= bound + TRANSFER_ROUNDING * scale;
                Ok(vec![
                    case.label.as_str().into(),
                    x.into(),
                    (*t).into(),
                    trunc.k_max().into(),
                    ergodic.into(),
                    line.into(),
                    disc.into(),
                    bound.into(),
                    ok.into(),
                ])
            })
            .collect()
    })?;
    rep.sup("max_discrepancy", "discrepancy", |_| true);
    let j = rep.column("within_bound").unwrap();
    let ok = rep.rows.iter().all(|r| r[j] == Value::Flag(true));
    rep.verdict("within_bound", ok, format!("discrepancy ≤ tail bound + {TRANSFER_ROUNDING}·(1 + sup|f|)"));
    // bound per horizon, case by case
    let per = plans.len();
    let bounds = rep.numbers("tail_bound");
    let mut monotone = true;
    for chunk in bounds.chunks(per) {
        monotone &= chunk.windows(2).all(|w| w[1] < w[0] || (w[0] == 0.0 && w[1] == 0.0));
    }
    for (i, (t, trunc)) in plans.iter().enumerate() {
        rep.diagnostic(&format!("tail_factor[T={t}]"), trunc.tail_factor());
        if i > 0 {
            rep.diagnostic(&format!("tail_ratio[T={t}]"), trunc.tail_factor() / plans[i - 1].1.tail_factor());
        }
    }
    rep.verdict("bound_decreasing", monotone, format!("{} horizons", per));
    Ok(rep)
}
