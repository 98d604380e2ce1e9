//! Stability numbers and regime classification.
//!
//! With `X = mu kappa1 / rho - alpha` and `Y = mu kappa2 / rho - gamma`:
//!
//! ```text
//! chi0 = X Y - beta^2
//! chi1 = d^2 X + b^2 Y + 2 b d beta
//! ```
//!
//! The energy decays exponentially exactly when `chi0 = 0` and `chi1 != 0`;
//! every other sign pattern is one of three non-exponential cases.

use serde::{Deserialize, Serialize};

use crate::params::MaterialParams;

pub const DEFAULT_TOL: f64 = 1e-9;

/// Relative tolerance of the wave-speed identities in [`check_hprime`].
const HPRIME_REL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Regime {
    /// `chi0 = 0`, `chi1 != 0`.
    Exponential,
    /// `chi0 != 0`, `chi1 != 0`.
    NonExpCase1,
    /// `chi0 = chi1 = 0`.
    NonExpCase2,
    /// `chi0 != 0`, `chi1 = 0`.
    NonExpCase3,
}

impl Regime {
    /// Growth exponent `s` of the resolvent witness `||U_n|| ~ lambda_n^s`.
    pub fn probe_exponent(self) -> f64 {
        match self {
            Regime::Exponential => 0.0,
            Regime::NonExpCase1 | Regime::NonExpCase2 => 1.0,
            Regime::NonExpCase3 => 2.0,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Regime::Exponential => "Exponential",
            Regime::NonExpCase1 => "NonExpCase1",
            Regime::NonExpCase2 => "NonExpCase2",
            Regime::NonExpCase3 => "NonExpCase3",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StabilityClass {
    pub class: Regime,
    pub chi0: f64,
    pub chi1: f64,
    pub zero_tolerance: f64,
    /// Scales the zero tests of `chi0` and `chi1` are relative to.
    pub chi0_scale: f64,
    pub chi1_scale: f64,
}

impl StabilityClass {
    pub fn chi0_zero(&self) -> bool {
        self.chi0.abs() <= self.zero_tolerance * self.chi0_scale
    }

    pub fn chi1_zero(&self) -> bool {
        self.chi1.abs() <= self.zero_tolerance * self.chi1_scale
    }
}

fn speed_gaps(p: &MaterialParams) -> (f64, f64) {
    (p.mu * p.kappa1 / p.rho - p.alpha, p.mu * p.kappa2 / p.rho - p.gamma)
}

/// Maps `-0.0` to `0.0` so reports print an unsigned zero.
fn unsigned_zero(v: f64) -> f64 {
    if v == 0.0 {
        0.0
    } else {
        v
    }
}

pub fn chi0(params: &MaterialParams) -> f64 {
    let (x, y) = speed_gaps(params);
    unsigned_zero(x * y - params.beta * params.beta)
}

pub fn chi1(params: &MaterialParams) -> f64 {
    let p = params;
    let (x, y) = speed_gaps(p);
    unsigned_zero(p.d * p.d * x + p.b * p.b * y + 2.0 * p.b * p.d * p.beta)
}

/// Magnitude scales for the relative zero tests.
///
/// `chi0` is quadratic in the stiffness-like quantities `m`, `chi1` is
/// linear in them and quadratic in the couplings.
fn chi_scales(p: &MaterialParams) -> (f64, f64) {
    let m = [
        1.0,
        (p.mu * p.kappa1 / p.rho).abs(),
        (p.mu * p.kappa2 / p.rho).abs(),
        p.alpha.abs(),
        p.gamma.abs(),
        p.beta.abs(),
    ]
    .into_iter()
    .fold(0.0, f64::max);
    let coupling = [1.0, p.b * p.b, p.d * p.d, (p.b * p.d).abs()].into_iter().fold(0.0, f64::max);
    (m * m, m * coupling)
}

/// Classifies with the relative zero test `|chi| <= tol * scale`.
pub fn classify(params: &MaterialParams, tol: f64) -> StabilityClass {
    let c0 = chi0(params);
    let c1 = chi1(params);
    let (s0, s1) = chi_scales(params);
    let zero0 = c0.abs() <= tol * s0;
    let zero1 = c1.abs() <= tol * s1;
    let class = match (zero0, zero1) {
        (true, false) => Regime::Exponential,
        (false, false) => Regime::NonExpCase1,
        (true, true) => Regime::NonExpCase2,
        (false, true) => Regime::NonExpCase3,
    };
    StabilityClass { class, chi0: c0, chi1: c1, zero_tolerance: tol, chi0_scale: s0, chi1_scale: s1 }
}

fn rel_eq(a: f64, b: f64) -> bool {
    (a - b).abs() <= HPRIME_REL * a.abs().max(b.abs()).max(f64::MIN_POSITIVE)
}

/// Looks for a witness `(sigma, omega)` of the wave-speed form of the
/// exponential-decay hypothesis.
///
/// For `beta != 0` the candidate is `(b, d)`, checked against
/// `mu/rho = (sigma alpha + omega beta)/(sigma kappa1) = (sigma beta + omega gamma)/(omega kappa2)`.
/// For `beta = 0` the two single-porosity alternatives are tried and
/// `(1, 0)` or `(0, 1)` returned.
pub fn check_hprime(params: &MaterialParams) -> Option<(f64, f64)> {
    let p = params;
    let speed = p.mu / p.rho;
    if p.beta != 0.0 {
        let (sigma, omega) = (p.b, p.d);
        if sigma == 0.0 || omega == 0.0 {
            return None;
        }
        let first = (sigma * p.alpha + omega * p.beta) / (sigma * p.kappa1);
        let second = (sigma * p.beta + omega * p.gamma) / (omega * p.kappa2);
        (rel_eq(speed, first) && rel_eq(speed, second)).then_some((sigma, omega))
    } else if rel_eq(speed, p.alpha / p.kappa1) && p.b != 0.0 {
        Some((1.0, 0.0))
    } else if rel_eq(speed, p.gamma / p.kappa2) && p.d != 0.0 {
        Some((0.0, 1.0))
    } else {
        None
    }
}
