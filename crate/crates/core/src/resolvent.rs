//! Single-mode resolvent witness for the lack of exponential decay.
//!
//! Forcing the velocity equation with `sin(k x)` at real frequency `lambda`
//! and eliminating the velocities leaves the complex 3x3 system
//!
//! ```text
//! [ p1   -b k  -d k ] [A]   [1]
//! [ -b k  p2    p4  ] [B] = [0]
//! [ -d k  p5    p3  ] [C]   [0]
//! ```
//!
//! for the amplitudes of `u = A sin`, `phi = B cos`, `psi = C cos`, with
//!
//! ```text
//! p1 = rho lambda^2 - mu k^2
//! p2 = kappa1 lambda^2 - alpha k^2 - (alpha1 - i lambda tau1)
//! p3 = kappa2 lambda^2 - gamma k^2 - (alpha2 - i lambda tau4)
//! p4 = -beta k^2 - (alpha3 - i lambda tau2)
//! p5 = -beta k^2 - (alpha3 - i lambda tau3)
//! ```
//!
//! The `lambda^2` terms come from `(i lambda)^2` with the sign convention
//! `v = -i lambda u`: the 6-vector `(A, -i lambda A, B, -i lambda B, C, -i lambda C)`
//! solves `(s I - G_n) U = (0, -1/rho, 0, 0, 0, 0)` at `s = -i lambda`, where
//! `G_n` is the A3 mode generator. Only `|U|` enters the growth analysis, so
//! the sign of the frequency is immaterial.
//!
//! Along `lambda_n = k_n sqrt(mu / rho)` (the root of `p1`), `A = K1 / K2`
//! and the growth of `||U_n||` in `lambda_n` is governed by the leading
//! terms of `K1` and `K2`.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::linalg::{self, ComplexMatrix};
use crate::modal::ModeIndex;
use crate::params::MaterialParams;
use crate::stability::{self, Regime};

/// Probe points with `n` below this are excluded from the tail fit.
pub const TAIL_MIN_N: usize = 16;

pub const DEFAULT_N_LIST: [usize; 6] = [8, 16, 32, 64, 128, 256];

const SINGULAR_REL: f64 = 1e-14;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ResolventError {
    #[error("modal system is singular at lambda = {lambda}, n = {n:?}")]
    SingularSystem { lambda: f64, n: Option<usize> },
    #[error("probe needs at least two usable points, got {0}")]
    TooFewPoints(usize),
    #[error("probe mode list must be strictly increasing and start at n >= 1")]
    BadModeList,
}

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// The complex 3x3 modal system at one `(lambda, k)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ModalResolventSystem {
    pub lambda: f64,
    /// Mode number, absent when built at a free wavenumber.
    pub n: Option<ModeIndex>,
    pub k: f64,
    pub p1: Complex64,
    pub p2: Complex64,
    pub p3: Complex64,
    pub p4: Complex64,
    pub p5: Complex64,
    pub k1: Complex64,
    pub k2: Complex64,
    /// `(A, B, C)` once solved.
    pub solution: Option<[Complex64; 3]>,
}

impl ModalResolventSystem {
    pub fn matrix(&self, params: &MaterialParams) -> ComplexMatrix {
        let bk = c(-params.b * self.k, 0.0);
        let dk = c(-params.d * self.k, 0.0);
        ComplexMatrix::from_rows(&[
            vec![self.p1, bk, dk],
            vec![bk, self.p2, self.p4],
            vec![dk, self.p5, self.p3],
        ])
        .expect("3x3 with finite entries")
    }

    /// `p1 K1 + K2`, the determinant of the system.
    pub fn determinant(&self) -> Complex64 {
        self.p1 * self.k1 + self.k2
    }

    /// `A = K1 / (p1 K1 + K2)`.
    pub fn closed_form_a(&self) -> Complex64 {
        self.k1 / self.determinant()
    }
}

/// System at mode `n`, `k = n pi / L`.
pub fn build_system(params: &MaterialParams, lambda: f64, n: ModeIndex) -> ModalResolventSystem {
    let mut sys = build_system_at(params, lambda, params.wavenumber(n.get()));
    sys.n = Some(n);
    sys
}

/// System at an arbitrary wavenumber `k`.
pub fn build_system_at(params: &MaterialParams, lambda: f64, k: f64) -> ModalResolventSystem {
    let p = params;
    let l2 = lambda * lambda;
    let k2 = k * k;
    let p1 = c(p.rho * l2 - p.mu * k2, 0.0);
    let p2 = c(p.kappa1 * l2 - k2 * p.alpha - p.alpha1, lambda * p.tau1);
    let p3 = c(p.kappa2 * l2 - k2 * p.gamma - p.alpha2, lambda * p.tau4);
    let p4 = c(-p.beta * k2 - p.alpha3, lambda * p.tau2);
    let p5 = c(-p.beta * k2 - p.alpha3, lambda * p.tau3);
    let k1 = p2 * p3 - p4 * p5;
    let k2v = (p.d * p4 - p.b * p3) * (p.b * k2) - (p.d * p2 - p.b * p5) * (p.d * k2);
    ModalResolventSystem { lambda, n: None, k, p1, p2, p3, p4, p5, k1, k2: k2v, solution: None }
}

/// Solves the system with right-hand side `rhs`, storing `(A, B, C)`.
pub fn solve_system(
    params: &MaterialParams,
    sys: &mut ModalResolventSystem,
    rhs: [Complex64; 3],
) -> Result<[Complex64; 3], ResolventError> {
    let m = sys.matrix(params);
    let singular = || ResolventError::SingularSystem { lambda: sys.lambda, n: sys.n.map(ModeIndex::get) };
    let scale = m.max_abs().powi(3);
    if !(sys.determinant().norm() > SINGULAR_REL * scale) {
        return Err(singular());
    }
    let x = linalg::solve_linear(&m, &rhs).map_err(|_| singular())?;
    let sol = [x[0], x[1], x[2]];
    sys.solution = Some(sol);
    Ok(sol)
}

/// Builds and solves the system at mode `n` with unit forcing.
pub fn solve_modal(
    params: &MaterialParams,
    lambda: f64,
    n: ModeIndex,
) -> Result<ModalResolventSystem, ResolventError> {
    let mut sys = build_system(params, lambda, n);
    solve_system(params, &mut sys, [c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)])?;
    Ok(sys)
}

/// Relative residual `||G x - e1||` of a solved system.
pub fn residual(params: &MaterialParams, sys: &ModalResolventSystem) -> Option<f64> {
    let sol = sys.solution?;
    let r = sys.matrix(params).mul_vec(&sol);
    let e = [r[0] - 1.0, r[1], r[2]];
    Some(linalg::vec_norm(&e))
}

/// Energy norm of the single-mode state
/// `(A sin, -i lambda A sin, B cos, -i lambda B cos, C cos, -i lambda C cos)`.
pub fn state_norm(params: &MaterialParams, sys: &ModalResolventSystem) -> f64 {
    let Some([a, b, cc]) = sys.solution else {
        return 0.0;
    };
    amplitude_norm(params, sys.lambda, sys.k, a, b, cc)
}

pub(crate) fn amplitude_norm(
    params: &MaterialParams,
    lambda: f64,
    k: f64,
    a: Complex64,
    b: Complex64,
    cc: Complex64,
) -> f64 {
    let p = params;
    let l2 = lambda * lambda;
    let k2 = k * k;
    let kinetic = l2 * (p.rho * a.norm_sqr() + p.kappa1 * b.norm_sqr() + p.kappa2 * cc.norm_sqr());
    let gradient = k2 * (p.mu * a.norm_sqr() + p.alpha * b.norm_sqr() + p.gamma * cc.norm_sqr())
        + 2.0 * p.beta * k2 * (b * cc.conj()).re;
    let restoring = p.alpha1 * b.norm_sqr()
        + p.alpha2 * cc.norm_sqr()
        + 2.0 * p.alpha3 * (b * cc.conj()).re;
    let coupling = 2.0 * k * (p.b * (a * b.conj()).re + p.d * (a * cc.conj()).re);
    let twice_energy = 0.5 * p.length * (kinetic + gradient + restoring + coupling);
    twice_energy.max(0.0).sqrt()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProbeRecord {
    pub n: usize,
    pub lambda: f64,
    pub norm_u: f64,
    pub a: (f64, f64),
    pub b: (f64, f64),
    pub c: (f64, f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExponentFit {
    pub exponent: f64,
    pub intercept: f64,
    /// RMS residual of the fit in log space.
    pub residual: f64,
    pub points: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProbeResult {
    pub records: Vec<ProbeRecord>,
    /// Fit over every usable point.
    pub full_fit: ExponentFit,
    /// Fit over points with `n >= TAIL_MIN_N`; the headline exponent.
    pub tail_fit: ExponentFit,
    pub class: Regime,
    pub theoretical_exponent: f64,
    /// Mode numbers whose system was singular.
    pub skipped: Vec<usize>,
}

impl ProbeResult {
    pub fn exponent(&self) -> f64 {
        self.tail_fit.exponent
    }
}

/// Resolvent norm along `lambda_n = k_n sqrt(mu/rho)` for each `n` in the
/// list, and the growth exponent `s` in `||U|| ~ lambda^s`.
pub fn probe_sequence(params: &MaterialParams, n_list: &[usize], tol: f64) -> Result<ProbeResult, ResolventError> {
    if n_list.is_empty() || n_list[0] == 0 || n_list.windows(2).any(|w| w[0] >= w[1]) {
        return Err(ResolventError::BadModeList);
    }
    let speed = (params.mu / params.rho).sqrt();
    let outcomes: Vec<(usize, Result<ProbeRecord, ResolventError>)> = n_list
        .par_iter()
        .map(|&n| {
            let idx = ModeIndex::new(n).expect("validated above");
            let lambda = params.wavenumber(n) * speed;
            let rec = solve_modal(params, lambda, idx).map(|sys| {
                let [a, b, cc] = sys.solution.expect("solved");
                ProbeRecord {
                    n,
                    lambda,
                    norm_u: state_norm(params, &sys),
                    a: (a.re, a.im),
                    b: (b.re, b.im),
                    c: (cc.re, cc.im),
                }
            });
            (n, rec)
        })
        .collect();

    let mut records = Vec::new();
    let mut skipped = Vec::new();
    for (n, rec) in outcomes {
        match rec {
            Ok(r) => records.push(r),
            Err(ResolventError::SingularSystem { .. }) => skipped.push(n),
            Err(e) => return Err(e),
        }
    }
    let full: Vec<&ProbeRecord> = records.iter().collect();
    let tail: Vec<&ProbeRecord> = records.iter().filter(|r| r.n >= TAIL_MIN_N).collect();
    let full_fit = fit_log_log(&full).ok_or(ResolventError::TooFewPoints(full.len()))?;
    let tail_fit = if tail.len() >= 2 { fit_log_log(&tail).expect("two points") } else { full_fit };
    let class = stability::classify(params, tol).class;
    Ok(ProbeResult {
        records,
        full_fit,
        tail_fit,
        class,
        theoretical_exponent: class.probe_exponent(),
        skipped,
    })
}

fn fit_log_log(records: &[&ProbeRecord]) -> Option<ExponentFit> {
    let pts: Vec<(f64, f64)> = records
        .iter()
        .filter(|r| r.norm_u > 0.0 && r.lambda > 0.0)
        .map(|r| (r.lambda.ln(), r.norm_u.ln()))
        .collect();
    if pts.len() < 2 {
        return None;
    }
    let m = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / m;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / m;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    if sxx == 0.0 {
        return None;
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let rss: f64 = pts.iter().map(|p| (p.1 - intercept - slope * p.0).powi(2)).sum();
    Some(ExponentFit { exponent: slope, intercept, residual: (rss / m).sqrt(), points: pts.len() })
}

/// Leading coefficients of `K1` and `K2` on the curve `k^2 = rho lambda^2 / mu`:
///
/// ```text
/// K1 = k1_quartic lambda^4 + i k1_cubic lambda^3 + O(lambda^2)
/// K2 = k2_quartic lambda^4 + i k2_cubic lambda^3 + O(lambda^2)
/// ```
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AsymptoticCoefficients {
    /// `(rho/mu)^2 chi0`.
    pub k1_quartic: f64,
    /// `(rho/mu) [X tau4 + Y tau1 + beta (tau2 + tau3)]`.
    pub k1_cubic: f64,
    /// `-(rho/mu)^2 chi1`.
    pub k2_quartic: f64,
    /// `(rho/mu) [b d (tau2 + tau3) - b^2 tau4 - d^2 tau1]`.
    pub k2_cubic: f64,
}

impl AsymptoticCoefficients {
    /// Largest of the four magnitudes.
    pub fn scale(&self) -> f64 {
        [self.k1_quartic, self.k1_cubic, self.k2_quartic, self.k2_cubic]
            .iter()
            .map(|v| v.abs())
            .fold(0.0, f64::max)
    }
}

pub fn asymptotic_coefficients(params: &MaterialParams) -> AsymptoticCoefficients {
    let p = params;
    let r = p.rho / p.mu;
    let x = p.mu * p.kappa1 / p.rho - p.alpha;
    let y = p.mu * p.kappa2 / p.rho - p.gamma;
    AsymptoticCoefficients {
        k1_quartic: r * r * stability::chi0(p),
        k1_cubic: r * (x * p.tau4 + y * p.tau1 + p.beta * (p.tau2 + p.tau3)),
        k2_quartic: -r * r * stability::chi1(p),
        k2_cubic: r * (p.b * p.d * (p.tau2 + p.tau3) - p.b * p.b * p.tau4 - p.d * p.d * p.tau1),
    }
}

/// System on the `p1 = 0` curve at frequency `lambda`.
pub fn system_on_root_curve(params: &MaterialParams, lambda: f64) -> ModalResolventSystem {
    build_system_at(params, lambda, lambda * (params.rho / params.mu).sqrt())
}
