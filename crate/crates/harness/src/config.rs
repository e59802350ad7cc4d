//! Experiment configuration: one schema per experiment, shared by the
//! command line and by config files.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::ser::{Serialize, SerializeMap, Serializer};

use crate::error::{invalid, io, HarnessError, Result};

pub const DEFAULT_SEED: u64 = 1;

/// The experiments the harness can run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Experiment {
    HypiDist,
    SimCopula,
    BootstrapBand,
    GofPower,
    SimTaildep,
    SimRegression,
}

impl Experiment {
    pub const ALL: [Experiment; 6] = [
        Experiment::HypiDist,
        Experiment::SimCopula,
        Experiment::BootstrapBand,
        Experiment::GofPower,
        Experiment::SimTaildep,
        Experiment::SimRegression,
    ];

    /// Name used in config files and manifests.
    pub fn name(self) -> &'static str {
        match self {
            Experiment::HypiDist => "hypi_dist",
            Experiment::SimCopula => "sim_copula",
            Experiment::BootstrapBand => "bootstrap_band",
            Experiment::GofPower => "gof_power",
            Experiment::SimTaildep => "sim_taildep",
            Experiment::SimRegression => "sim_regression",
        }
    }

    /// `(group, command)` on the command line, e.g. `sim copula`.
    pub fn command(self) -> (&'static str, &'static str) {
        match self {
            Experiment::HypiDist => ("hypi", "dist"),
            Experiment::SimCopula => ("sim", "copula"),
            Experiment::BootstrapBand => ("bootstrap", "band"),
            Experiment::GofPower => ("gof", "power"),
            Experiment::SimTaildep => ("sim", "taildep"),
            Experiment::SimRegression => ("sim", "regression"),
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|e| e.name() == name)
    }

    pub fn about(self) -> &'static str {
        match self {
            Experiment::HypiDist => "Hypi, sup, L1 and L2 distances between two grid functions",
            Experiment::SimCopula => "Empirical copula process replicates against limit draws",
            Experiment::BootstrapBand => "Bootstrap confidence bands and their coverage",
            Experiment::GofPower => "Level and power of the Cramer-von Mises and Kolmogorov-Smirnov independence tests",
            Experiment::SimTaildep => "Empirical stable tail dependence function replicates",
            Experiment::SimRegression => "Residual empirical process replicates in a linear model",
        }
    }

    /// Command-line flag carrying the replicate count, if the experiment
    /// has replicates.
    pub fn reps_flag(self) -> Option<&'static str> {
        match self {
            Experiment::HypiDist => None,
            Experiment::BootstrapBand => Some("coverage-reps"),
            _ => Some("reps"),
        }
    }

    pub fn default_reps(self) -> u64 {
        match self {
            Experiment::HypiDist => 0,
            Experiment::SimCopula => 100,
            Experiment::BootstrapBand => 1,
            Experiment::GofPower => 2000,
            Experiment::SimTaildep => 200,
            Experiment::SimRegression => 300,
        }
    }

    pub fn schema(self) -> &'static [ParamSpec] {
        match self {
            Experiment::HypiDist => HYPI_DIST,
            Experiment::SimCopula => SIM_COPULA,
            Experiment::BootstrapBand => BOOTSTRAP_BAND,
            Experiment::GofPower => GOF_POWER,
            Experiment::SimTaildep => SIM_TAILDEP,
            Experiment::SimRegression => SIM_REGRESSION,
        }
    }
}

/// Admissible values of a real parameter.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Range {
    Any,
    Positive,
    /// `(0, 1)`.
    Open01,
    /// `[0, 1)`.
    ClosedOpen01,
    /// `(0, 1]`.
    OpenClosed01,
}

impl Range {
    fn check(self, v: f64) -> std::result::Result<(), &'static str> {
        let ok = v.is_finite()
            && match self {
                Range::Any => true,
                Range::Positive => v > 0.0,
                Range::Open01 => v > 0.0 && v < 1.0,
                Range::ClosedOpen01 => (0.0..1.0).contains(&v),
                Range::OpenClosed01 => v > 0.0 && v <= 1.0,
            };
        if ok {
            return Ok(());
        }
        Err(match self {
            Range::Any => "must be finite",
            Range::Positive => "must be finite and > 0",
            Range::Open01 => "must lie in (0, 1)",
            Range::ClosedOpen01 => "must lie in [0, 1)",
            Range::OpenClosed01 => "must lie in (0, 1]",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Kind {
    Count { min: u64 },
    /// A count whose default is derived from other parameters.
    CountOrAuto { min: u64 },
    Real(Range),
    Choice(&'static [&'static str]),
    RealList(Range),
    Flag,
    Path,
}

/// One parameter of an experiment. `default: None` marks it required.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ParamSpec {
    pub key: &'static str,
    pub kind: Kind,
    pub default: Option<&'static str>,
    pub help: &'static str,
}

const fn p(key: &'static str, kind: Kind, default: Option<&'static str>, help: &'static str) -> ParamSpec {
    ParamSpec {
        key,
        kind,
        default,
        help,
    }
}

const COPULA_MODELS: &[&str] = &["indep", "mixture"];

static HYPI_DIST: &[ParamSpec] = &[
    p("f", Kind::Path, None, "first grid function (CSV)"),
    p("g", Kind::Path, None, "second grid function (CSV)"),
    p("ylow", Kind::Real(Range::Any), None, "bottom of the value window"),
    p("yhigh", Kind::Real(Range::Any), None, "top of the value window"),
    p("ypoints", Kind::Count { min: 2 }, Some("201"), "levels in the value window"),
    p("radius", Kind::Count { min: 0 }, Some("1"), "hull radius in cells"),
    p("backend", Kind::Choice(&["brute", "dt"]), Some("dt"), "Hausdorff backend"),
];

static SIM_COPULA: &[ParamSpec] = &[
    p("model", Kind::Choice(COPULA_MODELS), Some("mixture"), "copula model"),
    p("lambda", Kind::Real(Range::Open01), Some("0.5"), "mixture weight of the comonotone part"),
    p("n", Kind::Count { min: 2 }, Some("1000"), "sample size"),
    p("grid", Kind::Count { min: 2 }, Some("21"), "grid points per axis"),
    p("n-approx", Kind::Count { min: 1000 }, Some("2000"), "latent sample size of the limit draw"),
    p("ypoints", Kind::Count { min: 2 }, Some("401"), "levels of the hypi raster"),
];

static BOOTSTRAP_BAND: &[ParamSpec] = &[
    p("model", Kind::Choice(COPULA_MODELS), Some("indep"), "copula model"),
    p("lambda", Kind::Real(Range::Open01), Some("0.5"), "mixture weight of the comonotone part"),
    p("n", Kind::Count { min: 2 }, Some("500"), "sample size"),
    p("M", Kind::Count { min: 50 }, Some("300"), "bootstrap replicates per band"),
    p("level", Kind::Real(Range::ClosedOpen01), Some("0.95"), "nominal coverage"),
    p("grid", Kind::Count { min: 2 }, Some("21"), "grid points per axis"),
    p("weights", Kind::Choice(&["multiplier", "multinomial"]), Some("multiplier"), "bootstrap weights"),
];

static GOF_POWER: &[ParamSpec] = &[
    p("n", Kind::Count { min: 2 }, Some("400"), "sample size"),
    p("deltas", Kind::RealList(Range::Any), Some("0,1,2,3,4"), "local alternative sizes"),
    p("level", Kind::Real(Range::OpenClosed01), Some("0.05"), "test level"),
    p("grid", Kind::Count { min: 2 }, Some("41"), "grid points per axis"),
    p("calibration-reps", Kind::CountOrAuto { min: 1 }, Some("auto"), "null samples for the critical values (auto: 10 x reps)"),
];

static SIM_TAILDEP: &[ParamSpec] = &[
    p("model", Kind::Choice(&["max", "indep"]), Some("max"), "tail model"),
    p("n", Kind::Count { min: 2 }, Some("100000"), "sample size"),
    p("k", Kind::CountOrAuto { min: 1 }, Some("auto"), "tail count (auto: floor(n^0.4))"),
    p("T", Kind::Real(Range::Positive), Some("3"), "truncation of the tail grid"),
    p("grid", Kind::Count { min: 2 }, Some("31"), "grid points per axis"),
];

static SIM_REGRESSION: &[ParamSpec] = &[
    p("theta-minus", Kind::Real(Range::Positive), Some("1"), "scale of the negative error branch"),
    p("theta-plus", Kind::Real(Range::Positive), Some("4"), "scale of the positive error branch"),
    p("n", Kind::Count { min: 2 }, Some("100000"), "sample size"),
    p("zmax", Kind::Real(Range::Positive), Some("10"), "half-width of the z grid"),
    p("grid", Kind::Count { min: 3 }, Some("401"), "z grid points"),
    p("x-mean", Kind::Real(Range::Any), Some("0"), "mean of the scalar normal regressor"),
    p("x-sd", Kind::Real(Range::Positive), Some("1"), "standard deviation of the regressor"),
    p("h", Kind::Real(Range::Positive), Some("0.02"), "half-width of the spike contrast"),
    p("reference", Kind::Real(Range::Any), Some("0.5"), "continuity point of the spike contrast"),
    p("trajectory", Kind::Flag, Some("false"), "also write the first replicate's path"),
];

/// A validated parameter value.
#[derive(Debug, Clone, PartialEq)]
pub enum Value {
    Count(u64),
    Real(f64),
    Text(String),
    List(Vec<f64>),
    Flag(bool),
}

impl Serialize for Value {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Value::Count(v) => s.serialize_u64(*v),
            Value::Real(v) => s.serialize_f64(*v),
            Value::Text(v) => s.serialize_str(v),
            Value::List(v) => v.serialize(s),
            Value::Flag(v) => s.serialize_bool(*v),
        }
    }
}

fn parse_u64(key: &str, raw: &str) -> Result<u64> {
    let t = raw.trim();
    let parsed = match t.strip_prefix("0x").or_else(|| t.strip_prefix("0X")) {
        Some(hex) => u64::from_str_radix(hex, 16),
        None => t.parse(),
    };
    parsed.map_err(|_| invalid(key, format!("expected a non-negative integer, got `{raw}`")))
}

fn parse_real(key: &str, raw: &str, range: Range) -> Result<f64> {
    let v: f64 = raw
        .trim()
        .parse()
        .map_err(|_| invalid(key, format!("expected a number, got `{raw}`")))?;
    range.check(v).map_err(|why| invalid(key, format!("{why}, got {v}")))?;
    Ok(v)
}

/// Parsed value, or `None` for an `auto` default still to be resolved.
fn parse_value(spec: &ParamSpec, raw: &str) -> Result<Option<Value>> {
    let key = spec.key;
    let v = match spec.kind {
        Kind::CountOrAuto { .. } if raw.trim() == "auto" => return Ok(None),
        Kind::Count { min } | Kind::CountOrAuto { min } => {
            let v = parse_u64(key, raw)?;
            if v < min {
                return Err(invalid(key, format!("must be at least {min}, got {v}")));
            }
            Value::Count(v)
        }
        Kind::Real(range) => Value::Real(parse_real(key, raw, range)?),
        Kind::Choice(options) => {
            let t = raw.trim();
            if !options.contains(&t) {
                return Err(invalid(key, format!("expected one of {}, got `{raw}`", options.join("|"))));
            }
            Value::Text(t.to_string())
        }
        Kind::RealList(range) => {
            let items = raw
                .split(',')
                .filter(|s| !s.trim().is_empty())
                .map(|s| parse_real(key, s, range))
                .collect::<Result<Vec<_>>>()?;
            if items.is_empty() {
                return Err(invalid(key, "expected a comma-separated list of numbers"));
            }
            Value::List(items)
        }
        Kind::Flag => match raw.trim() {
            "true" => Value::Flag(true),
            "false" => Value::Flag(false),
            _ => return Err(invalid(key, format!("expected true or false, got `{raw}`"))),
        },
        Kind::Path => {
            if raw.is_empty() {
                return Err(invalid(key, "empty path"));
            }
            Value::Text(raw.to_string())
        }
    };
    Ok(Some(v))
}

/// Validated parameters of one experiment, every key resolved.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Params(BTreeMap<&'static str, Value>);

impl Params {
    fn get(&self, key: &str) -> Result<&Value> {
        self.0
            .get(key)
            .ok_or_else(|| HarnessError::Config(format!("parameter `{key}` was not resolved")))
    }

    pub fn count(&self, key: &str) -> Result<usize> {
        match self.get(key)? {
            Value::Count(v) => usize::try_from(*v).map_err(|_| invalid(key, "too large for this platform")),
            other => Err(invalid(key, format!("expected a count, found {other:?}"))),
        }
    }

    pub fn real(&self, key: &str) -> Result<f64> {
        match self.get(key)? {
            Value::Real(v) => Ok(*v),
            other => Err(invalid(key, format!("expected a number, found {other:?}"))),
        }
    }

    pub fn text(&self, key: &str) -> Result<&str> {
        match self.get(key)? {
            Value::Text(v) => Ok(v),
            other => Err(invalid(key, format!("expected text, found {other:?}"))),
        }
    }

    pub fn list(&self, key: &str) -> Result<&[f64]> {
        match self.get(key)? {
            Value::List(v) => Ok(v),
            other => Err(invalid(key, format!("expected a list, found {other:?}"))),
        }
    }

    pub fn flag(&self, key: &str) -> Result<bool> {
        match self.get(key)? {
            Value::Flag(v) => Ok(*v),
            other => Err(invalid(key, format!("expected a flag, found {other:?}"))),
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = (&'static str, &Value)> {
        self.0.iter().map(|(k, v)| (*k, v))
    }
}

impl Serialize for Params {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut m = s.serialize_map(Some(self.0.len()))?;
        for (k, v) in &self.0 {
            m.serialize_entry(k, v)?;
        }
        m.end()
    }
}

/// Unvalidated settings as they arrive from the command line or a file.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct RawConfig {
    pub experiment: Option<Experiment>,
    pub params: Vec<(String, String)>,
    pub seed: Option<String>,
    pub reps: Option<String>,
    pub threads: Option<String>,
    pub out: Option<String>,
}

/// A fully validated run description.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub experiment: Experiment,
    pub params: Params,
    /// Keys (including `seed`, `reps`, `threads`) filled in from defaults.
    pub defaulted: Vec<&'static str>,
    pub seed: u64,
    pub reps: usize,
    /// Worker threads; `None` lets the pool pick one per core.
    pub threads: Option<usize>,
    /// Output CSV; `None` writes to standard output.
    pub out: Option<PathBuf>,
}

impl RawConfig {
    pub fn new(experiment: Experiment) -> Self {
        Self {
            experiment: Some(experiment),
            ..Self::default()
        }
    }

    pub fn param(mut self, key: &str, value: impl ToString) -> Self {
        self.params.push((key.to_string(), value.to_string()));
        self
    }

    /// Checks everything against the experiment's schema and resolves
    /// defaults. No work has been done when this fails.
    pub fn resolve(&self) -> Result<ExperimentConfig> {
        let experiment = self
            .experiment
            .ok_or_else(|| HarnessError::Config("no experiment given".into()))?;
        let name = experiment.name();
        let schema = experiment.schema();
        let mut given: BTreeMap<&'static str, &str> = BTreeMap::new();
        for (key, raw) in &self.params {
            let spec = schema
                .iter()
                .find(|s| s.key == key)
                .ok_or_else(|| HarnessError::UnknownKey {
                    experiment: name,
                    key: key.clone(),
                })?;
            if given.insert(spec.key, raw).is_some() {
                return Err(invalid(key.as_str(), "given more than once"));
            }
        }
        let mut defaulted = Vec::new();

        let seed = match &self.seed {
            Some(s) => parse_u64("seed", s)?,
            None => {
                defaulted.push("seed");
                DEFAULT_SEED
            }
        };
        let reps = match (experiment.reps_flag(), &self.reps) {
            (None, Some(_)) => {
                return Err(HarnessError::UnknownKey {
                    experiment: name,
                    key: "reps".into(),
                })
            }
            (Some(flag), Some(r)) => usize::try_from(parse_u64(flag, r)?).map_err(|_| invalid(flag, "too large"))?,
            (Some(_), None) => {
                defaulted.push("reps");
                experiment.default_reps() as usize
            }
            (None, None) => 0,
        };
        let threads = match self.threads.as_deref().map(str::trim) {
            None => {
                defaulted.push("threads");
                None
            }
            Some("auto") => None,
            Some(t) => match parse_u64("threads", t)? {
                0 => return Err(invalid("threads", "must be at least 1 or `auto`")),
                v => Some(usize::try_from(v).map_err(|_| invalid("threads", "too large"))?),
            },
        };

        let mut values = BTreeMap::new();
        let mut auto = Vec::new();
        for spec in schema {
            let raw = match given.get(spec.key) {
                Some(raw) => *raw,
                None => {
                    defaulted.push(spec.key);
                    spec.default.ok_or(HarnessError::MissingKey {
                        experiment: name,
                        key: spec.key,
                    })?
                }
            };
            match parse_value(spec, raw)? {
                Some(v) => {
                    values.insert(spec.key, v);
                }
                None => auto.push(spec.key),
            }
        }
        let mut params = Params(values);
        for key in auto {
            let v = resolve_auto(experiment, key, &params, reps)?;
            params.0.insert(key, Value::Count(v));
        }

        let out = self.out.as_ref().map(PathBuf::from);
        check_cross(experiment, &params, reps, out.as_deref())?;
        Ok(ExperimentConfig {
            experiment,
            params,
            defaulted,
            seed,
            reps,
            threads,
            out,
        })
    }
}

fn resolve_auto(experiment: Experiment, key: &str, params: &Params, reps: usize) -> Result<u64> {
    match (experiment, key) {
        (Experiment::SimTaildep, "k") => Ok(hypimetric::taildep::default_k(params.count("n")?) as u64),
        (Experiment::GofPower, "calibration-reps") => {
            Ok((hypimetric::gof::DEFAULT_CALIBRATION_FACTOR * reps) as u64)
        }
        _ => Err(HarnessError::Config(format!("no automatic value for `{key}`"))),
    }
}

/// Constraints that involve more than one key.
fn check_cross(experiment: Experiment, params: &Params, reps: usize, out: Option<&Path>) -> Result<()> {
    match experiment {
        Experiment::HypiDist => {
            let (lo, hi) = (params.real("ylow")?, params.real("yhigh")?);
            if !(lo < hi) {
                return Err(invalid("yhigh", format!("must exceed ylow = {lo}, got {hi}")));
            }
        }
        Experiment::SimTaildep => {
            let (n, k) = (params.count("n")?, params.count("k")?);
            if k > n {
                return Err(invalid("k", format!("must not exceed n = {n}, got {k}")));
            }
        }
        Experiment::GofPower if reps > 0 => {
            let mut cfg = hypimetric::gof::PowerConfig::new(params.count("n")?, params.list("deltas")?.to_vec(), params.real("level")?, reps);
            cfg.grid_points = params.count("grid")?;
            cfg.calibration_reps = params.count("calibration-reps")?;
            cfg.validate()
                .map_err(|e| invalid("reps", e.to_string()))?;
        }
        Experiment::SimRegression => {
            if params.flag("trajectory")? && out.is_none() {
                return Err(invalid("trajectory", "needs --out to name the trajectory file"));
            }
        }
        _ => {}
    }
    Ok(())
}

impl ExperimentConfig {
    /// The configuration in file form; loading it back with `--config`
    /// reproduces the run.
    pub fn to_json(&self) -> serde_json::Value {
        let mut m = serde_json::Map::new();
        m.insert("experiment".into(), self.experiment.name().into());
        let seed = if self.seed <= i64::MAX as u64 {
            serde_json::Value::from(self.seed)
        } else {
            serde_json::Value::from(format!("{:#x}", self.seed))
        };
        m.insert("seed".into(), seed);
        if self.experiment.reps_flag().is_some() {
            m.insert("reps".into(), self.reps.into());
        }
        m.insert(
            "threads".into(),
            match self.threads {
                Some(t) => t.into(),
                None => "auto".into(),
            },
        );
        if let Some(out) = &self.out {
            m.insert("out".into(), out.to_string_lossy().into_owned().into());
        }
        m.insert(
            "params".into(),
            serde_json::to_value(&self.params).unwrap_or(serde_json::Value::Null),
        );
        serde_json::Value::Object(m)
    }
}

/// Reads a config file: TOML, or a run manifest (JSON with a `config`
/// member) from an earlier run.
pub fn load_config_file(path: &Path) -> Result<RawConfig> {
    let text = std::fs::read_to_string(path).map_err(io(path))?;
    let table = if text.trim_start().starts_with('{') {
        let json: serde_json::Value =
            serde_json::from_str(&text).map_err(|e| HarnessError::Config(format!("{}: {e}", path.display())))?;
        let body = json.get("config").cloned().unwrap_or(json);
        match json_to_toml(&body)? {
            toml::Value::Table(t) => t,
            _ => return Err(HarnessError::Config("config must be an object".into())),
        }
    } else {
        text.parse::<toml::Table>()
            .map_err(|e| HarnessError::Config(format!("{}: {}", path.display(), e.message())))?
    };
    raw_from_table(&table)
}

fn json_to_toml(v: &serde_json::Value) -> Result<toml::Value> {
    use serde_json::Value as J;
    Ok(match v {
        J::Null => return Err(HarnessError::Config("null is not a valid setting".into())),
        J::Bool(b) => toml::Value::Boolean(*b),
        J::Number(n) => match (n.as_i64(), n.as_u64(), n.as_f64()) {
            (Some(i), _, _) => toml::Value::Integer(i),
            (None, Some(u), _) => toml::Value::String(u.to_string()),
            (_, _, Some(f)) => toml::Value::Float(f),
            _ => return Err(HarnessError::Config(format!("unrepresentable number {n}"))),
        },
        J::String(s) => toml::Value::String(s.clone()),
        J::Array(a) => toml::Value::Array(a.iter().map(json_to_toml).collect::<Result<_>>()?),
        J::Object(o) => toml::Value::Table(
            o.iter()
                .map(|(k, v)| Ok((k.clone(), json_to_toml(v)?)))
                .collect::<Result<_>>()?,
        ),
    })
}

fn scalar_text(key: &str, v: &toml::Value) -> Result<String> {
    Ok(match v {
        toml::Value::String(s) => s.clone(),
        toml::Value::Integer(i) => i.to_string(),
        toml::Value::Float(f) => f.to_string(),
        toml::Value::Boolean(b) => b.to_string(),
        toml::Value::Array(items) => items
            .iter()
            .map(|item| match item {
                toml::Value::Array(_) | toml::Value::Table(_) => Err(invalid(key, "nested lists are not allowed")),
                other => scalar_text(key, other),
            })
            .collect::<Result<Vec<_>>>()?
            .join(","),
        toml::Value::Datetime(_) | toml::Value::Table(_) => {
            return Err(invalid(key, "expected a number, string, boolean or list"))
        }
    })
}

fn raw_from_table(t: &toml::Table) -> Result<RawConfig> {
    let mut raw = RawConfig::default();
    for (key, v) in t {
        match key.as_str() {
            "experiment" => {
                let name = scalar_text(key, v)?;
                raw.experiment = Some(
                    Experiment::from_name(&name)
                        .ok_or_else(|| invalid("experiment", format!("unknown experiment `{name}`")))?,
                );
            }
            "seed" => raw.seed = Some(scalar_text(key, v)?),
            "reps" => raw.reps = Some(scalar_text(key, v)?),
            "threads" => raw.threads = Some(scalar_text(key, v)?),
            "out" => raw.out = Some(scalar_text(key, v)?),
            "params" => {
                let table = v
                    .as_table()
                    .ok_or_else(|| invalid("params", "expected a table"))?;
                for (k, pv) in table {
                    raw.params.push((k.clone(), scalar_text(k, pv)?));
                }
            }
            other => {
                return Err(HarnessError::UnknownKey {
                    experiment: "config",
                    key: other.to_string(),
                })
            }
        }
    }
    Ok(raw)
}
