//! Configuration files, command dispatch and CSV/JSON output.
//!
//! Every command produces its artifacts in memory; the binary writes them to
//! an output directory or standard output. Floats in CSV use the shortest
//! decimal that round-trips, so identical inputs give identical bytes.

mod config;

pub use config::{
    emit_config, parse_config, ConfigError, FitConfig, ProbeConfig, RunConfig, ScanConfig, SimulateConfig,
    DEFAULT_N_MAX,
};

use std::fmt::Write as _;
use std::io::{self, Write as _};
use std::path::Path;

use serde::Serialize;
use thiserror::Error;

use crate::modal::{self, ModalError, ScanVerdict, SpectrumScan};
use crate::params::{self, ValidationReport};
use crate::resolvent::{self, ProbeResult, ResolventError};
use crate::simulate::{self, DecayFit, EnergyTrace, Evolver, SimError};
use crate::stability::{self, Regime};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VALIDATION: i32 = 1;
pub const EXIT_PARSE: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;

pub const SCAN_HEADER: &str = "n,k,abscissa,abscissa_freq";
pub const PROBE_HEADER: &str = "n,lambda,normU,A_re,A_im,B_re,B_im,C_re,C_im";
pub const TRAJECTORY_HEADER: &str = "t,E,kinetic,potential,D,balance_residual";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Validate,
    Classify,
    Spectrum,
    Probe,
    Simulate,
    DecayFit,
    Report,
}

impl Command {
    pub const ALL: [Command; 7] = [
        Command::Validate,
        Command::Classify,
        Command::Spectrum,
        Command::Probe,
        Command::Simulate,
        Command::DecayFit,
        Command::Report,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Command::Validate => "validate",
            Command::Classify => "classify",
            Command::Spectrum => "spectrum",
            Command::Probe => "probe",
            Command::Simulate => "simulate",
            Command::DecayFit => "decay-fit",
            Command::Report => "report",
        }
    }
}

impl std::str::FromStr for Command {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Command::ALL
            .into_iter()
            .find(|c| c.as_str() == s)
            .ok_or_else(|| format!("unknown command `{s}`"))
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct RunOptions {
    /// Run the analyses even when the parameters fail validation.
    pub override_validation: bool,
}

/// A named output file.
#[derive(Debug, Clone, PartialEq)]
pub struct Artifact {
    pub name: String,
    pub contents: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunOutcome {
    pub exit_code: i32,
    pub artifacts: Vec<Artifact>,
    /// Human-readable messages for the error stream.
    pub diagnostics: Vec<String>,
}

impl RunOutcome {
    pub fn artifact(&self, name: &str) -> Option<&str> {
        self.artifacts.iter().find(|a| a.name == name).map(|a| a.contents.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum NumericalError {
    #[error(transparent)]
    Modal(#[from] ModalError),
    #[error(transparent)]
    Resolvent(#[from] ResolventError),
    #[error(transparent)]
    Sim(#[from] SimError),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScanSummary {
    pub n_max: usize,
    pub sup: f64,
    pub tail_limit: f64,
    pub tail_coeff: f64,
    pub verdict: ScanVerdict,
}

impl From<&SpectrumScan> for ScanSummary {
    fn from(s: &SpectrumScan) -> Self {
        Self {
            n_max: s.records.last().map_or(0, |r| r.n),
            sup: s.sup,
            tail_limit: s.tail_limit,
            tail_coeff: s.tail_coeff,
            verdict: s.verdict,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProbeSummary {
    pub exponent: f64,
    pub residual: f64,
    pub full_exponent: f64,
    pub full_residual: f64,
    pub theoretical_exponent: f64,
    pub class: Regime,
    pub skipped: Vec<usize>,
}

impl From<&ProbeResult> for ProbeSummary {
    fn from(p: &ProbeResult) -> Self {
        Self {
            exponent: p.tail_fit.exponent,
            residual: p.tail_fit.residual,
            full_exponent: p.full_fit.exponent,
            full_residual: p.full_fit.residual,
            theoretical_exponent: p.theoretical_exponent,
            class: p.class,
            skipped: p.skipped.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StabilityReport {
    pub validation: ValidationReport,
    pub chi0: f64,
    pub chi1: f64,
    pub class: Regime,
    pub zero_tolerance: f64,
    pub chi0_scale: f64,
    pub chi1_scale: f64,
    pub hprime_witness: Option<[f64; 2]>,
    pub scan: Option<ScanSummary>,
    pub probe_exponent: Option<f64>,
}

pub fn stability_report(cfg: &RunConfig) -> StabilityReport {
    let c = stability::classify(&cfg.params, cfg.tol);
    StabilityReport {
        validation: params::validate_all(&cfg.params, cfg.bc),
        chi0: c.chi0,
        chi1: c.chi1,
        class: c.class,
        zero_tolerance: c.zero_tolerance,
        chi0_scale: c.chi0_scale,
        chi1_scale: c.chi1_scale,
        hprime_witness: stability::check_hprime(&cfg.params).map(|(s, o)| [s, o]),
        scan: None,
        probe_exponent: None,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SimulationSummary {
    pub modes: usize,
    pub dt: f64,
    pub t_end: f64,
    pub integrator: String,
    pub initial: String,
    pub initial_energy: f64,
    pub final_energy: f64,
    pub max_balance_residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Report {
    pub bc: String,
    pub stability: StabilityReport,
    pub scan: SpectrumScan,
    pub probe: ProbeResult,
    pub simulation: SimulationSummary,
    pub decay_fit: DecayFit,
}

/// Energy trace at every step of the configured simulation.
pub fn simulate_trace(cfg: &RunConfig) -> Result<EnergyTrace, SimError> {
    let s = &cfg.simulate;
    let state0 = s.initial.build(cfg.bc, s.modes)?;
    let mut ev = Evolver::new(&cfg.params, cfg.bc, s.modes, s.dt, s.integrator)?;
    let steps = (s.t_end / s.dt).round() as usize;
    let mut trace = EnergyTrace::new();
    ev.run(&state0, steps, |st| trace.record(&cfg.params, cfg.bc, st))?;
    Ok(trace)
}

fn json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("report types serialize");
    s.push('\n');
    s
}

pub fn scan_csv(scan: &SpectrumScan) -> String {
    let mut out = format!("{SCAN_HEADER}\n");
    for r in &scan.records {
        let _ = writeln!(out, "{},{:?},{:?},{:?}", r.n, r.k, r.abscissa, r.abscissa_freq);
    }
    out
}

pub fn probe_csv(probe: &ProbeResult) -> String {
    let mut out = format!("{PROBE_HEADER}\n");
    for r in &probe.records {
        let _ = writeln!(
            out,
            "{},{:?},{:?},{:?},{:?},{:?},{:?},{:?},{:?}",
            r.n, r.lambda, r.norm_u, r.a.0, r.a.1, r.b.0, r.b.1, r.c.0, r.c.1
        );
    }
    out
}

pub fn trajectory_csv(trace: &EnergyTrace, every: usize) -> String {
    let mut out = format!("{TRAJECTORY_HEADER}\n");
    let residuals = trace.balance_residuals();
    for j in (0..trace.len()).step_by(every.max(1)) {
        let e = &trace.breakdown[j];
        let _ = writeln!(
            out,
            "{:?},{:?},{:?},{:?},{:?},{:?}",
            trace.times[j],
            e.total(),
            e.kinetic,
            e.potential(),
            trace.dissipation[j],
            residuals[j]
        );
    }
    out
}

fn artifact(name: &str, contents: String) -> Artifact {
    Artifact { name: name.to_string(), contents }
}

fn execute(command: Command, cfg: &RunConfig) -> Result<Vec<Artifact>, NumericalError> {
    let p = &cfg.params;
    Ok(match command {
        Command::Validate => unreachable!("handled before dispatch"),
        Command::Classify => vec![artifact("stability.json", json(&stability_report(cfg)))],
        Command::Spectrum => {
            let scan = modal::abscissa_scan(p, cfg.bc, cfg.scan.n_max)?;
            vec![artifact("scan.csv", scan_csv(&scan)), artifact("spectrum.json", json(&ScanSummary::from(&scan)))]
        }
        Command::Probe => {
            let probe = resolvent::probe_sequence(p, &cfg.probe.n_list, cfg.tol)?;
            vec![artifact("probe.csv", probe_csv(&probe)), artifact("probe.json", json(&ProbeSummary::from(&probe)))]
        }
        Command::Simulate => {
            let trace = simulate_trace(cfg)?;
            vec![artifact("trajectory.csv", trajectory_csv(&trace, cfg.simulate.output_every))]
        }
        Command::DecayFit => {
            let trace = simulate_trace(cfg)?;
            vec![artifact("decay_fit.json", json(&simulate::fit_decay(&trace, cfg.fit.window)?))]
        }
        Command::Report => vec![artifact("report.json", json(&build_report(cfg)?))],
    })
}

pub fn build_report(cfg: &RunConfig) -> Result<Report, NumericalError> {
    let p = &cfg.params;
    let scan = modal::abscissa_scan(p, cfg.bc, cfg.scan.n_max)?;
    let probe = resolvent::probe_sequence(p, &cfg.probe.n_list, cfg.tol)?;
    let trace = simulate_trace(cfg)?;
    let decay_fit = simulate::fit_decay(&trace, cfg.fit.window)?;
    let energy = trace.energy();
    let s = &cfg.simulate;
    let simulation = SimulationSummary {
        modes: s.modes,
        dt: s.dt,
        t_end: s.t_end,
        integrator: s.integrator.as_str().to_string(),
        initial: s.initial.to_string(),
        initial_energy: energy[0],
        final_energy: energy[energy.len() - 1],
        max_balance_residual: simulate::dissipation_check(&trace).max_residual,
    };
    let mut stability = stability_report(cfg);
    stability.scan = Some(ScanSummary::from(&scan));
    stability.probe_exponent = Some(probe.exponent());
    Ok(Report { bc: cfg.bc.as_str().to_string(), stability, scan, probe, simulation, decay_fit })
}

/// Runs one command on a parsed configuration.
pub fn run(command: Command, cfg: &RunConfig, opts: &RunOptions) -> RunOutcome {
    let validation = params::validate_all(&cfg.params, cfg.bc);
    let mut diagnostics = validation.messages.clone();
    if command == Command::Validate {
        let exit_code = if validation.all_ok() { EXIT_OK } else { EXIT_VALIDATION };
        return RunOutcome { exit_code, artifacts: vec![artifact("validation.json", json(&validation))], diagnostics };
    }
    if !validation.all_ok() {
        if !opts.override_validation {
            diagnostics.push("parameters failed validation; rerun with --override-validation to proceed".into());
            return RunOutcome { exit_code: EXIT_VALIDATION, artifacts: Vec::new(), diagnostics };
        }
        diagnostics.push("proceeding despite failed validation".into());
    }
    match execute(command, cfg) {
        Ok(artifacts) => RunOutcome { exit_code: EXIT_OK, artifacts, diagnostics },
        Err(e) => {
            diagnostics.push(format!("numerical failure: {e}"));
            RunOutcome { exit_code: EXIT_NUMERICAL, artifacts: Vec::new(), diagnostics }
        }
    }
}

/// Writes artifacts into `out_dir`, or concatenated to standard output.
pub fn write_artifacts(outcome: &RunOutcome, out_dir: Option<&Path>) -> io::Result<()> {
    match out_dir {
        Some(dir) => {
            std::fs::create_dir_all(dir)?;
            for a in &outcome.artifacts {
                std::fs::write(dir.join(&a.name), &a.contents)?;
            }
        }
        None => {
            let mut stdout = io::stdout().lock();
            for a in &outcome.artifacts {
                stdout.write_all(a.contents.as_bytes())?;
            }
            stdout.flush()?;
        }
    }
    Ok(())
}
