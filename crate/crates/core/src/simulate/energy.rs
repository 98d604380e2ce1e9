use serde::{Deserialize, Serialize};

use super::SpectralState;
use crate::params::{BoundaryKind, MaterialParams};

/// Energy split by term. Mean-mode contributions are folded into
/// `kinetic` and `porous_restoring`; gradients vanish on the mean.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct EnergyBreakdown {
    /// `1/2 (rho u_t^2 + kappa1 phi_t^2 + kappa2 psi_t^2)`
    pub kinetic: f64,
    /// `1/2 mu u_x^2`
    pub elastic: f64,
    /// `1/2 (alpha phi_x^2 + gamma psi_x^2 + 2 beta phi_x psi_x)`
    pub porous_gradient: f64,
    /// `1/2 (alpha1 phi^2 + alpha2 psi^2 + 2 alpha3 phi psi)`
    pub porous_restoring: f64,
    /// `b u_x phi + d u_x psi`
    pub coupling: f64,
}

impl EnergyBreakdown {
    pub fn total(&self) -> f64 {
        self.kinetic + self.potential()
    }

    pub fn potential(&self) -> f64 {
        self.elastic + self.porous_gradient + self.porous_restoring + self.coupling
    }
}

/// Energy of a state by Parseval: each mode term carries `L/2`, the mean `L`.
pub fn energy(params: &MaterialParams, bc: BoundaryKind, state: &SpectralState) -> EnergyBreakdown {
    let p = params;
    let s = match bc {
        BoundaryKind::MixedA3 => 1.0,
        BoundaryKind::MixedA2 => -1.0,
    };
    let mut e = EnergyBreakdown::default();
    for (i, &[a, at, b, bt, c, ct]) in state.modes.iter().enumerate() {
        let k = p.wavenumber(i + 1);
        let k2 = k * k;
        e.kinetic += p.rho * at * at + p.kappa1 * bt * bt + p.kappa2 * ct * ct;
        e.elastic += p.mu * k2 * a * a;
        e.porous_gradient += k2 * (p.alpha * b * b + p.gamma * c * c + 2.0 * p.beta * b * c);
        e.porous_restoring += p.alpha1 * b * b + p.alpha2 * c * c + 2.0 * p.alpha3 * b * c;
        e.coupling += 2.0 * s * k * a * (p.b * b + p.d * c);
    }
    let half_l = 0.5 * p.length;
    let mut out = EnergyBreakdown {
        kinetic: 0.5 * half_l * e.kinetic,
        elastic: 0.5 * half_l * e.elastic,
        porous_gradient: 0.5 * half_l * e.porous_gradient,
        porous_restoring: 0.5 * half_l * e.porous_restoring,
        coupling: 0.5 * half_l * e.coupling,
    };
    if let Some([f, ft, g, gt]) = state.mean {
        let l = p.length;
        out.kinetic += 0.5 * l * (p.kappa1 * ft * ft + p.kappa2 * gt * gt);
        out.porous_restoring += 0.5 * l * (p.alpha1 * f * f + p.alpha2 * g * g + 2.0 * p.alpha3 * f * g);
    }
    out
}

/// `D = -tau1 ||phi_t||^2 - (tau2 + tau3) <phi_t, psi_t> - tau4 ||psi_t||^2`.
pub fn dissipation(params: &MaterialParams, state: &SpectralState) -> f64 {
    let half_l = 0.5 * params.length;
    let (mut pp, mut pq, mut qq) = (0.0, 0.0, 0.0);
    for m in &state.modes {
        pp += m[3] * m[3];
        pq += m[3] * m[5];
        qq += m[5] * m[5];
    }
    pp *= half_l;
    pq *= half_l;
    qq *= half_l;
    if let Some([_, ft, _, gt]) = state.mean {
        pp += params.length * ft * ft;
        pq += params.length * ft * gt;
        qq += params.length * gt * gt;
    }
    -params.tau1 * pp - (params.tau2 + params.tau3) * pq - params.tau4 * qq
}

/// Energy and dissipation sampled along a trajectory.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct EnergyTrace {
    pub times: Vec<f64>,
    pub breakdown: Vec<EnergyBreakdown>,
    pub dissipation: Vec<f64>,
}

impl EnergyTrace {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn record(&mut self, params: &MaterialParams, bc: BoundaryKind, state: &SpectralState) {
        self.times.push(state.t);
        self.breakdown.push(energy(params, bc, state));
        self.dissipation.push(dissipation(params, state));
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn energy(&self) -> Vec<f64> {
        self.breakdown.iter().map(EnergyBreakdown::total).collect()
    }

    /// `max_j |E_j - E_0| / |E_0|`.
    pub fn max_relative_drift(&self) -> f64 {
        let e = self.energy();
        let Some(&e0) = e.first() else {
            return 0.0;
        };
        e.iter().map(|v| (v - e0).abs()).fold(0.0, f64::max) / e0.abs()
    }

    /// `int_{t_0}^{t_j} D dt` for every sample, assuming uniform spacing.
    ///
    /// Composite Simpson on even indices, with the 3/8 rule closing odd ones
    /// and the three-point end correction at `j = 1`.
    pub fn cumulative_dissipation(&self) -> Vec<f64> {
        let d = &self.dissipation;
        let n = d.len();
        let mut out = vec![0.0; n];
        if n < 2 {
            return out;
        }
        let h = (self.times[n - 1] - self.times[0]) / (n - 1) as f64;
        if n == 2 {
            out[1] = 0.5 * h * (d[0] + d[1]);
            return out;
        }
        out[1] = h / 12.0 * (5.0 * d[0] + 8.0 * d[1] - d[2]);
        let mut even = vec![0.0; n];
        for j in (2..n).step_by(2) {
            even[j] = even[j - 2] + h / 3.0 * (d[j - 2] + 4.0 * d[j - 1] + d[j]);
            out[j] = even[j];
        }
        for j in (3..n).step_by(2) {
            out[j] = even[j - 3] + 3.0 * h / 8.0 * (d[j - 3] + 3.0 * d[j - 2] + 3.0 * d[j - 1] + d[j]);
        }
        out
    }

    /// `(E_j - E_0 - int D) / max(|E_0|, 1)` at every sample.
    pub fn balance_residuals(&self) -> Vec<f64> {
        let e = self.energy();
        let Some(&e0) = e.first() else {
            return Vec::new();
        };
        let scale = e0.abs().max(1.0);
        e.iter()
            .zip(self.cumulative_dissipation())
            .map(|(ej, ij)| (ej - e0 - ij) / scale)
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BalanceReport {
    /// Largest `|E_j - E_0 - int_0^{t_j} D| / max(|E_0|, 1)`.
    pub max_residual: f64,
    pub worst_time: f64,
    pub residuals: Vec<f64>,
}

/// Compares energy changes with the integrated dissipation.
pub fn dissipation_check(trace: &EnergyTrace) -> BalanceReport {
    let residuals = trace.balance_residuals();
    let (worst, max_residual) = residuals
        .iter()
        .enumerate()
        .fold((0, 0.0), |(wi, wv), (i, r)| if r.abs() > wv { (i, r.abs()) } else { (wi, wv) });
    BalanceReport {
        max_residual,
        worst_time: trace.times.get(worst).copied().unwrap_or(0.0),
        residuals,
    }
}
