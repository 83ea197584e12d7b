//! Run configuration: flat `key=value` files with `#` comments, overridden by
//! command-line flags.

use std::fmt;
use std::path::PathBuf;

use ctc_core::pctc::ConstraintParams;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ConfigError {
    #[error("line {line}: {message}")]
    Line { line: usize, message: String },
    #[error("--{flag}: {message}")]
    Flag { flag: String, message: String },
    #[error("{0}")]
    Invalid(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Model {
    Dctc,
    Pctc,
}

impl fmt::Display for Model {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Model::Dctc => "dctc",
            Model::Pctc => "pctc",
        })
    }
}

/// Groups of observables a sweep can emit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum ObservableGroup {
    /// Energy-basis populations.
    Populations,
    /// Unevolved and orthogonal clock probabilities of the CR output.
    ClockProbs,
    /// Unevolved and orthogonal clock probabilities of the CV state (D-CTC).
    CvProbs,
}

impl ObservableGroup {
    fn parse(s: &str) -> Result<Self, String> {
        match s {
            "populations" => Ok(Self::Populations),
            "clock_probs" => Ok(Self::ClockProbs),
            "cv_probs" => Ok(Self::CvProbs),
            other => Err(format!(
                "unknown observable group '{other}' (expected populations, clock_probs or cv_probs)"
            )),
        }
    }
}

/// Evenly spaced `Δt/t⊥` values, endpoints included.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DtGrid {
    pub start: f64,
    pub stop: f64,
    pub points: usize,
}

impl DtGrid {
    pub fn values(&self) -> Vec<f64> {
        let span = self.stop - self.start;
        let last = (self.points - 1) as f64;
        (0..self.points)
            .map(|i| if i + 1 == self.points { self.stop } else { self.start + span * i as f64 / last })
            .collect()
    }
}

impl Default for DtGrid {
    fn default() -> Self {
        Self { start: 0.0, stop: 2.0, points: 201 }
    }
}

/// A validated run.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub model: Model,
    pub levels: usize,
    /// Vacuum weights `Ω` (not `√Ω`).
    pub omegas: Vec<f64>,
    /// Empty-CTC probabilities; empty for P-CTC runs.
    pub gs: Vec<f64>,
    pub dt_grid: DtGrid,
    pub e1: f64,
    pub constrained: Option<ConstraintParams>,
    pub observables: Vec<ObservableGroup>,
    /// Winding-series truncation for D-CTC closed forms.
    pub truncation_eps: f64,
    pub output_path: Option<PathBuf>,
}

impl RunConfig {
    /// True when the run evaluates exactly one parameter point.
    pub fn is_single_point(&self) -> bool {
        self.constrained.is_some() && self.omegas.len() == 1 && self.gs.len() <= 1
    }
}

/// Appendix legend values `√Ω ∈ {0, 0.2, …, 1}`, stored as `Ω`.
pub fn figure_omegas() -> Vec<f64> {
    [0.0, 0.2, 0.4, 0.6, 0.8, 1.0].iter().map(|s: &f64| s * s).collect()
}

/// Unvalidated settings collected from a file and flags.
#[derive(Debug, Clone, Default)]
pub struct RawConfig {
    model: Option<Model>,
    levels: Option<usize>,
    omegas: Option<Vec<f64>>,
    gs: Option<Vec<f64>>,
    dt_grid: Option<DtGrid>,
    e1: Option<f64>,
    constrained: Option<ConstraintParams>,
    observables: Option<Vec<ObservableGroup>>,
    truncation_eps: Option<f64>,
    output_path: Option<PathBuf>,
}

fn number(s: &str) -> Result<f64, String> {
    let x: f64 = s.trim().parse().map_err(|_| format!("malformed number '{}'", s.trim()))?;
    if !x.is_finite() {
        return Err(format!("non-finite number '{}'", s.trim()));
    }
    Ok(x)
}

fn unit_list(s: &str, name: &str) -> Result<Vec<f64>, String> {
    let values = s
        .split(',')
        .map(|v| {
            let x = number(v)?;
            if !(0.0..=1.0).contains(&x) {
                return Err(format!("{name} = {x} is out of range [0, 1]"));
            }
            Ok(x)
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(values)
}

fn integer<T: std::str::FromStr>(s: &str) -> Result<T, String> {
    s.trim().parse().map_err(|_| format!("malformed integer '{}'", s.trim()))
}

impl RawConfig {
    /// Parses a configuration document; every error carries its line number.
    pub fn from_text(text: &str) -> Result<Self, ConfigError> {
        let mut raw = Self::default();
        let mut seen: Vec<(&'static str, usize)> = Vec::new();
        for (idx, line) in text.lines().enumerate() {
            let line_no = idx + 1;
            let content = line.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let err = |message: String| ConfigError::Line { line: line_no, message };
            let (key, value) = content
                .split_once('=')
                .ok_or_else(|| err(format!("expected key=value, found '{content}'")))?;
            let slot = raw.set(key.trim(), value.trim()).map_err(err)?;
            if let Some(&(_, first)) = seen.iter().find(|(s, _)| *s == slot) {
                return Err(err(format!("'{slot}' already set on line {first}")));
            }
            seen.push((slot, line_no));
        }
        Ok(raw)
    }

    /// Applies a command-line flag, replacing any file value.
    pub fn set_flag(&mut self, flag: &str, value: &str) -> Result<(), ConfigError> {
        let key = flag.replace('-', "_");
        self.set(&key, value.trim())
            .map(|_| ())
            .map_err(|message| ConfigError::Flag { flag: flag.to_string(), message })
    }

    /// Sets one key and returns the slot it fills.
    fn set(&mut self, key: &str, value: &str) -> Result<&'static str, String> {
        match key {
            "model" => {
                self.model = Some(match value {
                    "dctc" => Model::Dctc,
                    "pctc" => Model::Pctc,
                    other => return Err(format!("unknown model '{other}' (expected dctc or pctc)")),
                });
                Ok("model")
            }
            "N" => {
                let n: usize = integer(value)?;
                if n < 2 {
                    return Err(format!("N = {n} is out of range (a clock needs at least two levels)"));
                }
                self.levels = Some(n);
                Ok("N")
            }
            "omega" => {
                self.omegas = Some(unit_list(value, "omega")?);
                Ok("omega")
            }
            "sqrt_omega" => {
                let roots = unit_list(value, "sqrt_omega")?;
                self.omegas = Some(roots.into_iter().map(|s| s * s).collect());
                Ok("omega")
            }
            "g" => {
                self.gs = Some(unit_list(value, "g")?);
                Ok("g")
            }
            "dt_grid" => {
                let parts: Vec<&str> = value.split(':').collect();
                let [start, stop, points] = parts[..] else {
                    return Err(format!("dt_grid must be START:STOP:POINTS, found '{value}'"));
                };
                let grid = DtGrid { start: number(start)?, stop: number(stop)?, points: integer(points)? };
                if grid.points < 2 {
                    return Err(format!("dt_grid needs at least 2 points, found {}", grid.points));
                }
                if !(grid.stop > grid.start) {
                    return Err("dt_grid STOP must exceed START".to_string());
                }
                self.dt_grid = Some(grid);
                Ok("dt_grid")
            }
            "e1" => {
                self.e1 = Some(number(value)?);
                Ok("e1")
            }
            "constrained" => {
                let (p, q) = value
                    .split_once(',')
                    .ok_or_else(|| format!("constrained must be P,Q, found '{value}'"))?;
                let params = ConstraintParams::new(integer(p)?, integer(q)?).map_err(|e| e.to_string())?;
                self.constrained = Some(params);
                Ok("constrained")
            }
            "observables" => {
                let mut groups = value
                    .split(',')
                    .map(|s| ObservableGroup::parse(s.trim()))
                    .collect::<Result<Vec<_>, _>>()?;
                groups.sort();
                groups.dedup();
                self.observables = Some(groups);
                Ok("observables")
            }
            "tol" => {
                let eps = number(value)?;
                if !(eps > 0.0 && eps < 1.0) {
                    return Err(format!("tol = {eps} is out of range (0, 1)"));
                }
                self.truncation_eps = Some(eps);
                Ok("tol")
            }
            "out" => {
                if value.is_empty() {
                    return Err("out needs a path".to_string());
                }
                self.output_path = Some(PathBuf::from(value));
                Ok("out")
            }
            other => Err(format!("unknown key '{other}'")),
        }
    }

    /// Fills defaults and checks cross-key consistency. `model` overrides any
    /// model named in the file.
    pub fn resolve(self, model: Option<Model>) -> Result<RunConfig, ConfigError> {
        let model = model.or(self.model).unwrap_or(Model::Dctc);
        let levels = self.levels.unwrap_or(2);
        if self.constrained.is_some() && self.e1.is_some() {
            return Err(ConfigError::Invalid(
                "e1 cannot be combined with constrained, which fixes the ground energy".to_string(),
            ));
        }
        let gs = match model {
            Model::Dctc => self.gs.unwrap_or_else(|| vec![1.0 / (levels + 1) as f64]),
            Model::Pctc => {
                if self.gs.is_some() {
                    return Err(ConfigError::Invalid("g applies to dctc runs only".to_string()));
                }
                Vec::new()
            }
        };
        if model == Model::Pctc && self.truncation_eps.is_some() {
            return Err(ConfigError::Invalid("tol applies to dctc runs only".to_string()));
        }
        let observables = match (model, self.observables) {
            (Model::Dctc, None) => {
                vec![ObservableGroup::Populations, ObservableGroup::ClockProbs, ObservableGroup::CvProbs]
            }
            (Model::Pctc, None) => vec![ObservableGroup::Populations, ObservableGroup::ClockProbs],
            (Model::Pctc, Some(groups)) if groups.contains(&ObservableGroup::CvProbs) => {
                return Err(ConfigError::Invalid(
                    "cv_probs is not defined for pctc runs".to_string(),
                ))
            }
            (_, Some(groups)) => groups,
        };
        Ok(RunConfig {
            model,
            levels,
            omegas: self.omegas.unwrap_or_else(figure_omegas),
            gs,
            dt_grid: self.dt_grid.unwrap_or_default(),
            e1: self.e1.unwrap_or(0.0),
            constrained: self.constrained,
            observables,
            truncation_eps: self.truncation_eps.unwrap_or(ctc_core::dctc::DEFAULT_TRUNCATION),
            output_path: self.output_path,
        })
    }
}

/// Parses and validates a configuration document on its own.
pub fn parse_config(text: &str) -> Result<RunConfig, ConfigError> {
    RawConfig::from_text(text)?.resolve(None)
}
