//! Flat sectioned `key = value` configuration.
//!
//! ```text
//! # P_exp
//! [material]
//! bc = A3
//! rho = 1.0
//! ...
//! [scan]
//! n_max = 200
//! ```
//!
//! Every material field except `length` is required. The other sections
//! are optional and every key in them has a default.

use std::collections::BTreeSet;
use std::fmt::Write as _;

use thiserror::Error;

use crate::params::{BoundaryKind, MaterialParams};
use crate::resolvent::DEFAULT_N_LIST;
use crate::simulate::{InitialSpec, Integrator, DEFAULT_DT, DEFAULT_MODES, DEFAULT_T_END, DEFAULT_WINDOW};
use crate::stability::DEFAULT_TOL;

pub const DEFAULT_N_MAX: usize = 200;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ConfigError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("missing key `{key}` in [{section}]")]
    MissingKey { section: String, key: String },
    #[error("line {line}: unknown key `{key}` in [{section}]")]
    UnknownKey { line: usize, section: String, key: String },
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScanConfig {
    pub n_max: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProbeConfig {
    pub n_list: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimulateConfig {
    pub modes: usize,
    pub dt: f64,
    pub t_end: f64,
    pub integrator: Integrator,
    pub initial: InitialSpec,
    /// Trajectory rows are written every this many steps.
    pub output_every: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FitConfig {
    pub window: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub params: MaterialParams,
    pub bc: BoundaryKind,
    pub scan: ScanConfig,
    pub probe: ProbeConfig,
    pub simulate: SimulateConfig,
    pub fit: FitConfig,
    pub tol: f64,
}

impl RunConfig {
    /// Defaults everywhere except the material block.
    pub fn with_params(params: MaterialParams, bc: BoundaryKind) -> Self {
        Self {
            params,
            bc,
            scan: ScanConfig { n_max: DEFAULT_N_MAX },
            probe: ProbeConfig { n_list: DEFAULT_N_LIST.to_vec() },
            simulate: SimulateConfig {
                modes: DEFAULT_MODES,
                dt: DEFAULT_DT,
                t_end: DEFAULT_T_END,
                integrator: Integrator::Exact,
                initial: InitialSpec::Broadband,
                output_every: 1,
            },
            fit: FitConfig { window: DEFAULT_WINDOW },
            tol: DEFAULT_TOL,
        }
    }
}

const SECTIONS: [&str; 6] = ["material", "scan", "probe", "simulate", "fit", "stability"];

fn err(line: usize, message: impl Into<String>) -> ConfigError {
    ConfigError::Parse { line, message: message.into() }
}

fn parse_f64(line: usize, key: &str, v: &str) -> Result<f64, ConfigError> {
    let x: f64 = v.parse().map_err(|_| err(line, format!("`{key}` expects a number, got `{v}`")))?;
    if !x.is_finite() {
        return Err(err(line, format!("`{key}` must be finite")));
    }
    Ok(x)
}

fn parse_positive_f64(line: usize, key: &str, v: &str) -> Result<f64, ConfigError> {
    let x = parse_f64(line, key, v)?;
    if x <= 0.0 {
        return Err(err(line, format!("`{key}` must be positive")));
    }
    Ok(x)
}

fn parse_count(line: usize, key: &str, v: &str) -> Result<usize, ConfigError> {
    match v.parse::<usize>() {
        Ok(n) if n >= 1 => Ok(n),
        _ => Err(err(line, format!("`{key}` expects a positive integer, got `{v}`"))),
    }
}

pub fn parse_config(text: &str) -> Result<RunConfig, ConfigError> {
    let mut cfg = RunConfig::with_params(MaterialParams::default(), BoundaryKind::MixedA3);
    let mut section: Option<&str> = None;
    let mut seen: BTreeSet<(String, String)> = BTreeSet::new();
    let mut seen_sections: BTreeSet<&str> = BTreeSet::new();
    let mut initial_line = 0;

    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        if let Some(name) = content.strip_prefix('[') {
            let name = name
                .strip_suffix(']')
                .ok_or_else(|| err(line, format!("malformed section header `{content}`")))?
                .trim();
            let known = SECTIONS
                .iter()
                .find(|s| **s == name)
                .ok_or_else(|| err(line, format!("unknown section [{name}]")))?;
            if !seen_sections.insert(known) {
                return Err(err(line, format!("section [{name}] appears twice")));
            }
            section = Some(known);
            continue;
        }
        let (key, value) = content
            .split_once('=')
            .map(|(k, v)| (k.trim(), v.trim()))
            .ok_or_else(|| err(line, format!("expected `key = value`, got `{content}`")))?;
        let sec = section.ok_or_else(|| err(line, "key outside any section"))?;
        if key.is_empty() || value.is_empty() {
            return Err(err(line, format!("expected `key = value`, got `{content}`")));
        }
        if !seen.insert((sec.to_string(), key.to_string())) {
            return Err(err(line, format!("duplicate key `{key}` in [{sec}]")));
        }
        let unknown = || ConfigError::UnknownKey { line, section: sec.to_string(), key: key.to_string() };
        match (sec, key) {
            ("material", "bc") => cfg.bc = value.parse().map_err(|e: String| err(line, e))?,
            ("material", name) => {
                if !MaterialParams::FIELD_NAMES.contains(&name) {
                    return Err(unknown());
                }
                cfg.params.set(name, parse_f64(line, name, value)?);
            }
            ("scan", "n_max") => cfg.scan.n_max = parse_count(line, key, value)?,
            ("probe", "n_list") => {
                let list = value
                    .split(',')
                    .map(|v| parse_count(line, key, v.trim()))
                    .collect::<Result<Vec<_>, _>>()?;
                if list.len() < 2 || list.windows(2).any(|w| w[0] >= w[1]) {
                    return Err(err(line, "`n_list` needs at least two strictly increasing mode numbers"));
                }
                cfg.probe.n_list = list;
            }
            ("simulate", "modes") => cfg.simulate.modes = parse_count(line, key, value)?,
            ("simulate", "dt") => cfg.simulate.dt = parse_positive_f64(line, key, value)?,
            ("simulate", "t_end") => cfg.simulate.t_end = parse_positive_f64(line, key, value)?,
            ("simulate", "integrator") => cfg.simulate.integrator = value.parse().map_err(|e: String| err(line, e))?,
            ("simulate", "initial") => {
                cfg.simulate.initial = value.parse().map_err(|e: String| err(line, e))?;
                initial_line = line;
            }
            ("simulate", "output_every") => cfg.simulate.output_every = parse_count(line, key, value)?,
            ("fit", "window") => {
                let w = parse_positive_f64(line, key, value)?;
                if w > 1.0 {
                    return Err(err(line, "`window` is a fraction in (0, 1]"));
                }
                cfg.fit.window = w;
            }
            ("stability", "tol") => cfg.tol = parse_positive_f64(line, key, value)?,
            _ => return Err(unknown()),
        }
    }

    let required = std::iter::once("bc")
        .chain(MaterialParams::FIELD_NAMES.iter().copied().filter(|n| *n != "length"));
    for key in required {
        if !seen.contains(&("material".to_string(), key.to_string())) {
            return Err(ConfigError::MissingKey { section: "material".into(), key: key.into() });
        }
    }
    if !seen.contains(&("material".to_string(), "length".to_string())) {
        cfg.params.length = MaterialParams::DEFAULT_LENGTH;
    }
    if let InitialSpec::Mode(n) = cfg.simulate.initial {
        if n > cfg.simulate.modes {
            return Err(err(initial_line, format!("initial mode {n} exceeds simulate.modes = {}", cfg.simulate.modes)));
        }
    }
    Ok(cfg)
}

/// Writes every value, so that `parse_config(&emit_config(c)) == c`.
pub fn emit_config(cfg: &RunConfig) -> String {
    let mut out = String::new();
    out.push_str("[material]\n");
    let _ = writeln!(out, "bc = {}", cfg.bc.as_str());
    for name in MaterialParams::FIELD_NAMES {
        let _ = writeln!(out, "{name} = {:?}", cfg.params.get(name).expect("known field"));
    }
    let _ = writeln!(out, "\n[scan]\nn_max = {}", cfg.scan.n_max);
    let list: Vec<String> = cfg.probe.n_list.iter().map(|n| n.to_string()).collect();
    let _ = writeln!(out, "\n[probe]\nn_list = {}", list.join(", "));
    let s = &cfg.simulate;
    let _ = writeln!(
        out,
        "\n[simulate]\nmodes = {}\ndt = {:?}\nt_end = {:?}\nintegrator = {}\ninitial = {}\noutput_every = {}",
        s.modes,
        s.dt,
        s.t_end,
        s.integrator.as_str(),
        s.initial,
        s.output_every
    );
    let _ = writeln!(out, "\n[fit]\nwindow = {:?}", cfg.fit.window);
    let _ = writeln!(out, "\n[stability]\ntol = {:?}", cfg.tol);
    out
}
