//! Experiment configuration: a flat key-value text format with typed
//! sections, plus the small spec strings used on the command line
//! (`builtin:p,q,s`, `sine:a,k`, ...).
//!
//! Parsing is strict and total: unknown sections or keys are errors, and no
//! input can panic the parser (these entry points are fuzzed).

use std::collections::BTreeMap;
use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum ConfigError {
    #[error("line {line}: {msg}")]
    Syntax { line: usize, msg: String },
    #[error("line {line}: duplicate key {key:?} in section [{section}]")]
    DuplicateKey {
        line: usize,
        section: String,
        key: String,
    },
    #[error("unknown section [{0}]")]
    UnknownSection(String),
    #[error("unknown key {key:?} in section [{section}]")]
    UnknownKey { section: String, key: String },
    #[error("missing required key {key:?} in section [{section}]")]
    MissingKey { section: String, key: String },
    #[error("bad value for {key}: {detail}")]
    BadValue { key: String, detail: String },
    #[error("bad spec string {spec:?}: {detail}")]
    BadSpec { spec: String, detail: String },
}

/// Raw sectioned key-value data, before typing.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct RawConfig {
    sections: BTreeMap<String, BTreeMap<String, String>>,
}

impl RawConfig {
    pub fn get(&self, section: &str, key: &str) -> Option<&str> {
        self.sections.get(section)?.get(key).map(|s| s.as_str())
    }

    /// Applies a `section.key=value` override (command-line flags win over
    /// file contents).
    pub fn set(&mut self, dotted: &str, value: &str) -> Result<(), ConfigError> {
        let (section, key) = dotted.split_once('.').ok_or_else(|| ConfigError::BadSpec {
            spec: dotted.to_string(),
            detail: "expected section.key".to_string(),
        })?;
        if section.is_empty() || key.is_empty() {
            return Err(ConfigError::BadSpec {
                spec: dotted.to_string(),
                detail: "expected section.key".to_string(),
            });
        }
        self.sections
            .entry(section.to_string())
            .or_default()
            .insert(key.to_string(), value.to_string());
        Ok(())
    }

    pub fn sections(&self) -> impl Iterator<Item = (&String, &BTreeMap<String, String>)> {
        self.sections.iter()
    }
}

/// Parses the flat `[section]` / `key = value` format. `#` starts a comment;
/// blank lines are ignored; keys may not repeat within a section.
pub fn parse_config_str(text: &str) -> Result<RawConfig, ConfigError> {
    let mut out = RawConfig::default();
    let mut current: Option<String> = None;
    for (idx, raw_line) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = match raw_line.find('#') {
            Some(p) => &raw_line[..p],
            None => raw_line,
        };
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        if let Some(rest) = line.strip_prefix('[') {
            let name = rest.strip_suffix(']').ok_or_else(|| ConfigError::Syntax {
                line: line_no,
                msg: "unterminated section header".to_string(),
            })?;
            let name = name.trim();
            if name.is_empty() || !name.chars().all(|c| c.is_ascii_alphanumeric() || c == '_') {
                return Err(ConfigError::Syntax {
                    line: line_no,
                    msg: format!("bad section name {name:?}"),
                });
            }
            current = Some(name.to_string());
            out.sections.entry(name.to_string()).or_default();
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| ConfigError::Syntax {
            line: line_no,
            msg: "expected key = value".to_string(),
        })?;
        let key = key.trim();
        let value = value.trim();
        if key.is_empty() || !key.chars().all(|c| c.is_ascii_alphanumeric() || c == '_') {
            return Err(ConfigError::Syntax {
                line: line_no,
                msg: format!("bad key {key:?}"),
            });
        }
        let section = current.clone().ok_or_else(|| ConfigError::Syntax {
            line: line_no,
            msg: "key outside of any [section]".to_string(),
        })?;
        let slot = out.sections.entry(section.clone()).or_default();
        if slot.contains_key(key) {
            return Err(ConfigError::DuplicateKey {
                line: line_no,
                section,
                key: key.to_string(),
            });
        }
        slot.insert(key.to_string(), value.to_string());
    }
    Ok(out)
}

/// Where a potential comes from.
#[derive(Debug, Clone, PartialEq)]
pub enum PotentialSpec {
    /// `builtin:p,q,s`: the built-in admissible family
    /// `V = p(1-cos x1) + q/2 (x2-1)^2 + s(1-cos x1)(x2-1)`.
    Builtin { p: f64, q: f64, s: f64 },
    /// `file:path`: closed-form expressions for the potential and its
    /// partial derivatives, in the documented config schema.
    File(PathBuf),
}

pub fn parse_potential_spec(spec: &str) -> Result<PotentialSpec, ConfigError> {
    let bad = |detail: &str| ConfigError::BadSpec {
        spec: spec.to_string(),
        detail: detail.to_string(),
    };
    let (kind, rest) = spec
        .split_once(':')
        .ok_or_else(|| bad("expected kind:args"))?;
    match kind.trim() {
        "builtin" => {
            let nums = parse_float_list(rest).map_err(|d| bad(&d))?;
            if nums.len() != 3 {
                return Err(bad("builtin takes exactly three numbers p,q,s"));
            }
            Ok(PotentialSpec::Builtin {
                p: nums[0],
                q: nums[1],
                s: nums[2],
            })
        }
        "file" => {
            let path = rest.trim();
            if path.is_empty() {
                return Err(bad("empty path"));
            }
            Ok(PotentialSpec::File(PathBuf::from(path)))
        }
        other => Err(bad(&format!("unknown potential kind {other:?}"))),
    }
}

/// Named initial-condition profiles. Atoms can be summed with `+`, e.g.
/// `sine:1,1+cosine:0.3,2`.
#[derive(Debug, Clone, PartialEq)]
pub enum InitialCondition {
    /// `sine:a,k`: `a * sin(k x)`.
    Sine { amplitude: f64, mode: u32 },
    /// `cosine:a,k`: `a * cos(k x)`.
    Cosine { amplitude: f64, mode: u32 },
    /// `soliton:kappa,x0`: the periodized sech^2 traveling wave
    /// `4 kappa^2 sech^2(kappa (x - x0))`.
    Soliton { kappa: f64, x0: f64 },
    /// `constant:c`.
    Constant(f64),
    /// `+`-joined atoms, summed pointwise.
    Sum(Vec<InitialCondition>),
}

impl InitialCondition {
    pub fn build(&self, n: usize) -> crate::error::Result<crate::grid::PeriodicField> {
        use crate::grid::PeriodicField;
        match self {
            InitialCondition::Sine { amplitude, mode } => {
                let (a, k) = (*amplitude, *mode as f64);
                PeriodicField::from_fn(n, |x| a * (k * x).sin())
            }
            InitialCondition::Cosine { amplitude, mode } => {
                let (a, k) = (*amplitude, *mode as f64);
                PeriodicField::from_fn(n, |x| a * (k * x).cos())
            }
            InitialCondition::Soliton { kappa, x0 } => {
                crate::ch_family::soliton_profile(n, *kappa, *x0)
            }
            InitialCondition::Constant(c) => PeriodicField::constant(n, *c),
            InitialCondition::Sum(parts) => {
                let mut acc = PeriodicField::zeros(n)?;
                for part in parts {
                    acc = acc.plus(&part.build(n)?);
                }
                Ok(acc)
            }
        }
    }
}

pub fn parse_initial_condition(spec: &str) -> Result<InitialCondition, ConfigError> {
    let mut atoms = Vec::new();
    for part in split_profile_sum(spec) {
        atoms.push(parse_profile_atom(part.trim(), spec)?);
    }
    match atoms.len() {
        0 => Err(ConfigError::BadSpec {
            spec: spec.to_string(),
            detail: "empty profile".to_string(),
        }),
        1 => Ok(atoms.pop().expect("one atom")),
        _ => Ok(InitialCondition::Sum(atoms)),
    }
}

/// Splits on `+` only where it joins profile atoms (the next non-space
/// character starts a profile name), so exponents like `1e+3` survive.
fn split_profile_sum(spec: &str) -> Vec<&str> {
    let bytes = spec.as_bytes();
    let mut parts = Vec::new();
    let mut start = 0;
    for (i, &c) in bytes.iter().enumerate() {
        if c == b'+' {
            let next_alpha = bytes[i + 1..]
                .iter()
                .find(|b| !b.is_ascii_whitespace())
                .is_some_and(|b| b.is_ascii_alphabetic());
            if next_alpha {
                parts.push(&spec[start..i]);
                start = i + 1;
            }
        }
    }
    parts.push(&spec[start..]);
    parts
}

fn parse_profile_atom(atom: &str, whole: &str) -> Result<InitialCondition, ConfigError> {
    let bad = |detail: &str| ConfigError::BadSpec {
        spec: whole.to_string(),
        detail: detail.to_string(),
    };
    let (kind, rest) = atom
        .split_once(':')
        .ok_or_else(|| bad("expected kind:args"))?;
    let nums = parse_float_list(rest).map_err(|d| bad(&d))?;
    let harmonic = |nums: &[f64]| -> Result<(f64, u32), ConfigError> {
        if nums.len() != 2 {
            return Err(bad("expected amplitude,mode"));
        }
        let mode = nums[1];
        if !(mode.fract() == 0.0 && (1.0..=1024.0).contains(&mode)) {
            return Err(bad("mode must be a positive integer <= 1024"));
        }
        Ok((nums[0], mode as u32))
    };
    match kind.trim() {
        "sine" => {
            let (amplitude, mode) = harmonic(&nums)?;
            Ok(InitialCondition::Sine { amplitude, mode })
        }
        "cosine" => {
            let (amplitude, mode) = harmonic(&nums)?;
            Ok(InitialCondition::Cosine { amplitude, mode })
        }
        "soliton" => {
            if nums.len() != 2 {
                return Err(bad("soliton takes kappa,x0"));
            }
            if !(nums[0] > 0.0) {
                return Err(bad("kappa must be positive"));
            }
            Ok(InitialCondition::Soliton {
                kappa: nums[0],
                x0: nums[1],
            })
        }
        "constant" => {
            if nums.len() != 1 {
                return Err(bad("constant takes one number"));
            }
            Ok(InitialCondition::Constant(nums[0]))
        }
        other => Err(bad(&format!("unknown profile {other:?}"))),
    }
}

/// Which residual-order measurement `continuum-check` runs.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ContinuumMode {
    /// V-class potential, generic frozen field: expect order 2.
    Generic,
    /// V-class potential, field from a time-reversed PDE solution of the
    /// matching family member: expect order >= 2.7.
    Solution,
    /// General U-class potential: expect order 1.
    GenericU,
}

impl ContinuumMode {
    pub fn as_str(&self) -> &'static str {
        match self {
            ContinuumMode::Generic => "generic",
            ContinuumMode::Solution => "solution",
            ContinuumMode::GenericU => "generic-u",
        }
    }
}

/// Fully-typed experiment configuration. Built from a [`RawConfig`] after
/// command-line overrides; every key is validated here, before any
/// computation starts.
#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub grid_n: usize,
    pub potential: PotentialSpec,
    pub solver_tol: f64,
    pub solver_max_iter: usize,
    pub solver_fd_step: f64,
    pub solver_min_slope: f64,
    pub solver_max_backtracks: u32,
    pub eps_list: Vec<f64>,
    pub continuum_central: f64,
    pub continuum_t0: f64,
    pub continuum_mode: ContinuumMode,
    pub alpha: f64,
    pub beta: f64,
    pub b: f64,
    pub t_final: f64,
    pub dt: f64,
    pub save_every: usize,
    pub initial: InitialCondition,
    pub sim_velocity: InitialCondition,
    pub sim_central: f64,
    pub sim_steps: usize,
    pub oracle_count: usize,
    pub oracle_amplitude: f64,
    pub oracle_central: f64,
    pub out_dir: PathBuf,
    pub seed: u64,
    pub svg: bool,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            grid_n: 128,
            potential: PotentialSpec::Builtin {
                p: 1.0,
                q: 1.0,
                s: 0.0,
            },
            solver_tol: 1e-10,
            solver_max_iter: 50,
            solver_fd_step: 1e-6,
            solver_min_slope: 0.05,
            solver_max_backtracks: 30,
            eps_list: vec![1e-2, 7.5e-3, 5e-3, 2.5e-3, 1e-3],
            continuum_central: 0.25,
            continuum_t0: 0.0,
            continuum_mode: ContinuumMode::Generic,
            alpha: 1.0,
            beta: 1.0,
            b: 0.0,
            t_final: 1.0,
            dt: 1e-4,
            save_every: 1000,
            initial: InitialCondition::Sine {
                amplitude: 0.1,
                mode: 1,
            },
            sim_velocity: InitialCondition::Sine {
                amplitude: 0.02,
                mode: 1,
            },
            sim_central: 0.05,
            sim_steps: 20,
            oracle_count: 10,
            oracle_amplitude: 0.05,
            oracle_central: 0.1,
            out_dir: PathBuf::from("out"),
            seed: 42,
            svg: false,
        }
    }
}

impl ExperimentConfig {
    pub fn from_raw(raw: &RawConfig) -> Result<Self, ConfigError> {
        let mut cfg = ExperimentConfig::default();
        for (section, keys) in raw.sections() {
            for (key, value) in keys {
                cfg.apply(section, key, value)?;
            }
        }
        cfg.validate()?;
        Ok(cfg)
    }

    fn apply(&mut self, section: &str, key: &str, value: &str) -> Result<(), ConfigError> {
        let bad = |detail: String| ConfigError::BadValue {
            key: format!("{section}.{key}"),
            detail,
        };
        let as_f64 = |value: &str| -> Result<f64, ConfigError> {
            value
                .parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| bad(format!("not a finite number: {value:?}")))
        };
        let as_usize = |value: &str| -> Result<usize, ConfigError> {
            value
                .parse::<usize>()
                .map_err(|_| bad(format!("not a nonnegative integer: {value:?}")))
        };
        match (section, key) {
            ("grid", "n") => self.grid_n = as_usize(value)?,
            ("potential", "spec") => self.potential = parse_potential_spec(value)?,
            ("potential", "file") => self.potential = PotentialSpec::File(PathBuf::from(value)),
            ("solver", "tol") => self.solver_tol = as_f64(value)?,
            ("solver", "max_iter") => self.solver_max_iter = as_usize(value)?,
            ("solver", "fd_step") => self.solver_fd_step = as_f64(value)?,
            ("solver", "min_slope") => self.solver_min_slope = as_f64(value)?,
            ("solver", "max_backtracks") => {
                self.solver_max_backtracks = value
                    .parse::<u32>()
                    .map_err(|_| bad(format!("not a small integer: {value:?}")))?
            }
            ("continuum", "eps") => {
                self.eps_list = parse_float_list(value).map_err(bad)?;
            }
            ("continuum", "a") => self.continuum_central = as_f64(value)?,
            ("continuum", "t0") => self.continuum_t0 = as_f64(value)?,
            ("continuum", "mode") => {
                self.continuum_mode = match value {
                    "generic" => ContinuumMode::Generic,
                    "solution" => ContinuumMode::Solution,
                    "generic-u" => ContinuumMode::GenericU,
                    other => return Err(bad(format!("unknown mode {other:?}"))),
                }
            }
            ("pde", "alpha") => self.alpha = as_f64(value)?,
            ("pde", "beta") => self.beta = as_f64(value)?,
            ("pde", "b") => self.b = as_f64(value)?,
            ("pde", "t_final") => self.t_final = as_f64(value)?,
            ("pde", "dt") => self.dt = as_f64(value)?,
            ("pde", "save_every") => self.save_every = as_usize(value)?,
            ("initial", "profile") => self.initial = parse_initial_condition(value)?,
            ("simulate", "velocity") => self.sim_velocity = parse_initial_condition(value)?,
            ("simulate", "central") => self.sim_central = as_f64(value)?,
            ("simulate", "nsteps") => self.sim_steps = as_usize(value)?,
            ("oracle", "count") => self.oracle_count = as_usize(value)?,
            ("oracle", "amplitude") => self.oracle_amplitude = as_f64(value)?,
            ("oracle", "central") => self.oracle_central = as_f64(value)?,
            ("run", "out_dir") => self.out_dir = PathBuf::from(value),
            ("run", "seed") => {
                self.seed = value
                    .parse::<u64>()
                    .map_err(|_| bad(format!("not a u64: {value:?}")))?
            }
            ("run", "svg") => {
                self.svg = match value {
                    "true" | "1" => true,
                    "false" | "0" => false,
                    other => return Err(bad(format!("not a boolean: {other:?}"))),
                }
            }
            _ => {
                return Err(if KNOWN_SECTIONS.contains(&section) {
                    ConfigError::UnknownKey {
                        section: section.to_string(),
                        key: key.to_string(),
                    }
                } else {
                    ConfigError::UnknownSection(section.to_string())
                });
            }
        }
        Ok(())
    }

    fn validate(&self) -> Result<(), ConfigError> {
        let bad = |key: &str, detail: String| {
            Err(ConfigError::BadValue {
                key: key.to_string(),
                detail,
            })
        };
        if !(self.grid_n >= 16 && self.grid_n.is_power_of_two()) {
            return bad("grid.n", format!("{} is not a power of two >= 16", self.grid_n));
        }
        if !(self.solver_tol > 0.0 && self.solver_fd_step > 0.0) {
            return bad("solver.tol", "tolerances must be positive".to_string());
        }
        if self.solver_max_iter == 0 {
            return bad("solver.max_iter", "must be at least 1".to_string());
        }
        if self.eps_list.len() < 4 {
            return bad("continuum.eps", "need at least 4 samples".to_string());
        }
        for w in self.eps_list.windows(2) {
            if !(w[1] > 0.0 && w[0] > w[1]) {
                return bad(
                    "continuum.eps",
                    "must be strictly decreasing and positive".to_string(),
                );
            }
        }
        if !(self.eps_list[0] > 0.0) {
            return bad("continuum.eps", "must be positive".to_string());
        }
        if !(self.dt > 0.0) {
            return bad("pde.dt", "must be positive".to_string());
        }
        if !(self.t_final >= 0.0) {
            return bad("pde.t_final", "must be nonnegative".to_string());
        }
        if self.save_every == 0 {
            return bad("pde.save_every", "must be at least 1".to_string());
        }
        if self.sim_steps == 0 {
            return bad("simulate.nsteps", "must be at least 1".to_string());
        }
        if self.oracle_count == 0 {
            return bad("oracle.count", "must be at least 1".to_string());
        }
        if !(self.oracle_amplitude > 0.0 && self.oracle_amplitude < 0.5) {
            return bad("oracle.amplitude", "must be in (0, 0.5)".to_string());
        }
        Ok(())
    }
}

const KNOWN_SECTIONS: &[&str] = &[
    "grid",
    "potential",
    "solver",
    "continuum",
    "pde",
    "initial",
    "simulate",
    "oracle",
    "run",
];

pub(crate) fn parse_float_list(text: &str) -> Result<Vec<f64>, String> {
    let mut out = Vec::new();
    for part in text.split(',') {
        let part = part.trim();
        if part.is_empty() {
            return Err("empty number in list".to_string());
        }
        let v: f64 = part
            .parse()
            .map_err(|_| format!("not a number: {part:?}"))?;
        if !v.is_finite() {
            return Err(format!("non-finite number: {part:?}"));
        }
        out.push(v);
    }
    if out.is_empty() {
        return Err("empty list".to_string());
    }
    Ok(out)
}
