//! Time-domain evolution in the Fourier basis.
//!
//! A [`SpectralState`] holds the `(a, a', b, b', c, c')` coefficients of modes
//! `1..=N` and, under A3, the mean mode `(phi, phi', psi, psi')` as spatial
//! averages. Under A3 the basis is `u ~ sin(k x)`, `phi, psi ~ cos(k x)`;
//! under A2 it is `u ~ cos(k x)`, `phi, psi ~ sin(k x)`.

mod energy;
mod evolve;
mod fit;

pub use energy::{dissipation, dissipation_check, energy, BalanceReport, EnergyBreakdown, EnergyTrace};
pub use evolve::{evolve, Evolver, Integrator};
pub use fit::{fit_decay, fit_exponential, DecayFit, DEFAULT_WINDOW};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::linalg::LinalgError;
use crate::modal::ModalError;
use crate::params::{BoundaryKind, MaterialParams};

pub const DEFAULT_MODES: usize = 64;
pub const DEFAULT_DT: f64 = 1e-3;
pub const DEFAULT_T_END: f64 = 20.0;

/// Relative size of a sampled u-mean that still counts as zero under A2.
const MEAN_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SimError {
    #[error("initial u-data has mean {mean:e}; A2 boundary conditions require zero mean")]
    MeanViolation { mean: f64 },
    #[error("grid has {points} points, at least {required} needed for {modes} modes")]
    GridTooCoarse { points: usize, required: usize, modes: usize },
    #[error("field samples have inconsistent lengths")]
    SampleLength,
    #[error("mode {n} is outside 1..={modes}")]
    ModeOutOfRange { n: usize, modes: usize },
    #[error("state layout does not match the evolver")]
    LayoutMismatch,
    #[error("at least one mode is required")]
    NoModes,
    #[error("time step must be positive and finite, got {0}")]
    InvalidStep(f64),
    #[error("energy is not positive at t = {t}")]
    NonPositiveEnergy { t: f64 },
    #[error("energy trace has too few samples ({0})")]
    TooFewSamples(usize),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error(transparent)]
    Modal(#[from] ModalError),
}

/// Mode coefficients at one instant.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectralState {
    pub t: f64,
    /// `modes[n - 1] = (a, a', b, b', c, c')` of mode `n`.
    pub modes: Vec<[f64; 6]>,
    /// Spatial averages `(phi, phi', psi, psi')`; present only under A3.
    pub mean: Option<[f64; 4]>,
}

impl SpectralState {
    pub fn zero(bc: BoundaryKind, n_modes: usize) -> Self {
        Self {
            t: 0.0,
            modes: vec![[0.0; 6]; n_modes],
            mean: (bc == BoundaryKind::MixedA3).then_some([0.0; 4]),
        }
    }

    pub fn n_modes(&self) -> usize {
        self.modes.len()
    }

    pub fn is_finite(&self) -> bool {
        self.modes.iter().flatten().chain(self.mean.iter().flatten()).all(|v| v.is_finite())
    }

    /// Mode numbers with a nonzero coefficient.
    pub fn active_modes(&self) -> Vec<usize> {
        self.modes
            .iter()
            .enumerate()
            .filter(|(_, m)| m.iter().any(|v| *v != 0.0))
            .map(|(i, _)| i + 1)
            .collect()
    }

    pub fn mean_active(&self) -> bool {
        self.mean.is_some_and(|m| m.iter().any(|v| *v != 0.0))
    }

    pub fn scaled(&self, s: f64) -> Self {
        Self {
            t: self.t,
            modes: self.modes.iter().map(|m| m.map(|v| s * v)).collect(),
            mean: self.mean.map(|m| m.map(|v| s * v)),
        }
    }

    /// Largest entrywise difference, `inf` if the layouts differ.
    pub fn max_deviation(&self, other: &Self) -> f64 {
        if self.modes.len() != other.modes.len() || self.mean.is_some() != other.mean.is_some() {
            return f64::INFINITY;
        }
        let modes = self.modes.iter().flatten().zip(other.modes.iter().flatten());
        let means = self.mean.iter().flatten().zip(other.mean.iter().flatten());
        modes.chain(means).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max)
    }
}

/// Field values sampled on a uniform grid over `[0, L]`, endpoints included.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct FieldSamples {
    pub u0: Vec<f64>,
    pub u1: Vec<f64>,
    pub phi0: Vec<f64>,
    pub phi1: Vec<f64>,
    pub psi0: Vec<f64>,
    pub psi1: Vec<f64>,
}

impl FieldSamples {
    /// Samples of the given functions on `points` grid points.
    pub fn from_fns(
        length: f64,
        points: usize,
        fields: [&dyn Fn(f64) -> f64; 6],
    ) -> Self {
        let grid = uniform_grid(length, points);
        let sample = |f: &dyn Fn(f64) -> f64| grid.iter().map(|&x| f(x)).collect::<Vec<_>>();
        Self {
            u0: sample(fields[0]),
            u1: sample(fields[1]),
            phi0: sample(fields[2]),
            phi1: sample(fields[3]),
            psi0: sample(fields[4]),
            psi1: sample(fields[5]),
        }
    }

    pub fn points(&self) -> usize {
        self.u0.len()
    }
}

/// How initial data is supplied.
#[derive(Debug, Clone, PartialEq)]
pub enum InitialData {
    /// Explicit coefficients; `mean` is ignored under A2 unless nonzero.
    Coefficients { modes: Vec<[f64; 6]>, mean: Option<[f64; 4]> },
    Samples(FieldSamples),
}

/// Named initial states used by the command-line runs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum InitialSpec {
    /// `a_n = b_n = c_n = 1/n^2`, velocities and means zero.
    Broadband,
    /// `a_n = 1` on a single mode.
    Mode(usize),
}

impl InitialSpec {
    pub fn build(self, bc: BoundaryKind, n_modes: usize) -> Result<SpectralState, SimError> {
        if n_modes == 0 {
            return Err(SimError::NoModes);
        }
        let mut state = SpectralState::zero(bc, n_modes);
        match self {
            InitialSpec::Broadband => {
                for (i, m) in state.modes.iter_mut().enumerate() {
                    let w = 1.0 / ((i + 1) * (i + 1)) as f64;
                    m[0] = w;
                    m[2] = w;
                    m[4] = w;
                }
            }
            InitialSpec::Mode(n) => {
                if n == 0 || n > n_modes {
                    return Err(SimError::ModeOutOfRange { n, modes: n_modes });
                }
                state.modes[n - 1][0] = 1.0;
            }
        }
        Ok(state)
    }
}

impl std::fmt::Display for InitialSpec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            InitialSpec::Broadband => write!(f, "broadband"),
            InitialSpec::Mode(n) => write!(f, "mode:{n}"),
        }
    }
}

impl std::str::FromStr for InitialSpec {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        if s == "broadband" {
            return Ok(InitialSpec::Broadband);
        }
        if let Some(n) = s.strip_prefix("mode:") {
            return n
                .trim()
                .parse()
                .ok()
                .filter(|n| *n >= 1)
                .map(InitialSpec::Mode)
                .ok_or_else(|| format!("bad mode number in `{s}`"));
        }
        Err(format!("unknown initial data `{s}`, expected `broadband` or `mode:<n>`"))
    }
}

pub fn uniform_grid(length: f64, points: usize) -> Vec<f64> {
    let h = length / (points - 1) as f64;
    (0..points).map(|j| j as f64 * h).collect()
}

fn trapezoid_weights(length: f64, points: usize) -> Vec<f64> {
    let h = length / (points - 1) as f64;
    let mut w = vec![h; points];
    w[0] = 0.5 * h;
    w[points - 1] = 0.5 * h;
    w
}

type Basis = fn(f64) -> f64;

/// Spectral coefficients of the initial data.
pub fn project_initial(
    data: &InitialData,
    params: &MaterialParams,
    bc: BoundaryKind,
    n_modes: usize,
) -> Result<SpectralState, SimError> {
    if n_modes == 0 {
        return Err(SimError::NoModes);
    }
    match data {
        InitialData::Coefficients { modes, mean } => {
            let mut state = SpectralState::zero(bc, n_modes);
            for (dst, src) in state.modes.iter_mut().zip(modes) {
                *dst = *src;
            }
            match (bc, mean) {
                (BoundaryKind::MixedA3, Some(m)) => state.mean = Some(*m),
                (BoundaryKind::MixedA2, Some(m)) if m.iter().any(|v| *v != 0.0) => {
                    return Err(SimError::MeanViolation { mean: m[0] });
                }
                _ => {}
            }
            Ok(state)
        }
        InitialData::Samples(s) => project_samples(s, params, bc, n_modes),
    }
}

fn project_samples(
    s: &FieldSamples,
    params: &MaterialParams,
    bc: BoundaryKind,
    n_modes: usize,
) -> Result<SpectralState, SimError> {
    let m = s.points();
    let fields = [&s.u0, &s.u1, &s.phi0, &s.phi1, &s.psi0, &s.psi1];
    if fields.iter().any(|f| f.len() != m) {
        return Err(SimError::SampleLength);
    }
    let required = 4 * n_modes + 1;
    if m < required {
        return Err(SimError::GridTooCoarse { points: m, required, modes: n_modes });
    }
    let l = params.length;
    let w = trapezoid_weights(l, m);
    let grid = uniform_grid(l, m);
    let average = |f: &[f64]| f.iter().zip(&w).map(|(v, wj)| v * wj).sum::<f64>() / l;

    if bc == BoundaryKind::MixedA2 {
        for f in [&s.u0, &s.u1] {
            let scale = f.iter().map(|v| v.abs()).fold(0.0, f64::max);
            let mean = average(f);
            if mean.abs() > MEAN_TOL * scale.max(f64::MIN_POSITIVE) {
                return Err(SimError::MeanViolation { mean });
            }
        }
    }

    let mut state = SpectralState::zero(bc, n_modes);
    for (i, coeffs) in state.modes.iter_mut().enumerate() {
        let k = params.wavenumber(i + 1);
        let (u_basis, porous_basis): (Basis, Basis) = match bc {
            BoundaryKind::MixedA3 => (f64::sin, f64::cos),
            BoundaryKind::MixedA2 => (f64::cos, f64::sin),
        };
        let project = |f: &[f64], basis: fn(f64) -> f64| {
            2.0 / l * f.iter().zip(&w).zip(&grid).map(|((v, wj), x)| v * wj * basis(k * x)).sum::<f64>()
        };
        *coeffs = [
            project(&s.u0, u_basis),
            project(&s.u1, u_basis),
            project(&s.phi0, porous_basis),
            project(&s.phi1, porous_basis),
            project(&s.psi0, porous_basis),
            project(&s.psi1, porous_basis),
        ];
    }
    if let Some(mean) = state.mean.as_mut() {
        *mean = [average(&s.phi0), average(&s.phi1), average(&s.psi0), average(&s.psi1)];
    }
    Ok(state)
}

/// Field values and first space derivatives at one point.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct FieldValues {
    pub u: f64,
    pub u_t: f64,
    pub u_x: f64,
    pub phi: f64,
    pub phi_t: f64,
    pub phi_x: f64,
    pub psi: f64,
    pub psi_t: f64,
    pub psi_x: f64,
}

/// Evaluates the truncated series at `x`.
pub fn reconstruct(params: &MaterialParams, bc: BoundaryKind, state: &SpectralState, x: f64) -> FieldValues {
    let mut f = FieldValues::default();
    if let Some([p, pt, q, qt]) = state.mean {
        f.phi = p;
        f.phi_t = pt;
        f.psi = q;
        f.psi_t = qt;
    }
    for (i, m) in state.modes.iter().enumerate() {
        let k = params.wavenumber(i + 1);
        let (s, c) = (k * x).sin_cos();
        // (u basis, its x-derivative factor, porous basis, its derivative factor)
        let (ub, ud, pb, pd) = match bc {
            BoundaryKind::MixedA3 => (s, k * c, c, -k * s),
            BoundaryKind::MixedA2 => (c, -k * s, s, k * c),
        };
        f.u += m[0] * ub;
        f.u_t += m[1] * ub;
        f.u_x += m[0] * ud;
        f.phi += m[2] * pb;
        f.phi_t += m[3] * pb;
        f.phi_x += m[2] * pd;
        f.psi += m[4] * pb;
        f.psi_t += m[5] * pb;
        f.psi_x += m[4] * pd;
    }
    f
}
