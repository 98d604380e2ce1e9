//! Exact Fourier-mode reduction.
//!
//! Under either boundary condition the system is diagonal in the Fourier
//! basis: mode `n` of `(u, phi, psi)` obeys a closed 3-DOF second-order ODE
//! with wavenumber `k = n pi / L`. The state ordering is fixed as
//! `(a, a', b, b', c, c')`, where `a`, `b`, `c` are the mode coefficients of
//! `u`, `phi`, `psi`. Under A3 the spatially constant parts of `phi` and
//! `psi` form an extra 4-dimensional mean mode.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::linalg::{self, ComplexMatrix, LinalgError};
use crate::params::{BoundaryKind, MaterialParams};

/// Below this the scan treats an abscissa or fitted limit as touching the axis.
pub const AXIS_TOL: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ModalError {
    #[error("mode index must be at least 1")]
    InvalidMode,
    #[error("the mean mode exists only under A3 boundary conditions")]
    BcMismatch,
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

/// Fourier mode number, at least 1.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct ModeIndex(usize);

impl ModeIndex {
    pub fn new(n: usize) -> Result<Self, ModalError> {
        if n == 0 {
            Err(ModalError::InvalidMode)
        } else {
            Ok(Self(n))
        }
    }

    pub fn get(self) -> usize {
        self.0
    }
}

impl TryFrom<usize> for ModeIndex {
    type Error = ModalError;
    fn try_from(n: usize) -> Result<Self, Self::Error> {
        Self::new(n)
    }
}

/// Real 6x6 generator of one Fourier mode.
#[derive(Debug, Clone, PartialEq)]
pub struct ModeMatrix {
    pub n: ModeIndex,
    pub k: f64,
    pub entries: [[f64; 6]; 6],
}

impl ModeMatrix {
    pub fn to_complex(&self) -> ComplexMatrix {
        ComplexMatrix::from_fn(6, |i, j| Complex64::new(self.entries[i][j], 0.0))
    }

    pub fn trace(&self) -> f64 {
        (0..6).map(|i| self.entries[i][i]).sum()
    }

    pub fn apply(&self, x: &[f64; 6]) -> [f64; 6] {
        let mut y = [0.0; 6];
        for (i, row) in self.entries.iter().enumerate() {
            y[i] = row.iter().zip(x).map(|(a, b)| a * b).sum();
        }
        y
    }
}

/// Real 4x4 generator of the mean mode `(phi, phi', psi, psi')`.
#[derive(Debug, Clone, PartialEq)]
pub struct MeanModeMatrix {
    pub entries: [[f64; 4]; 4],
}

impl MeanModeMatrix {
    pub fn to_complex(&self) -> ComplexMatrix {
        ComplexMatrix::from_fn(4, |i, j| Complex64::new(self.entries[i][j], 0.0))
    }

    pub fn trace(&self) -> f64 {
        (0..4).map(|i| self.entries[i][i]).sum()
    }

    pub fn apply(&self, x: &[f64; 4]) -> [f64; 4] {
        let mut y = [0.0; 4];
        for (i, row) in self.entries.iter().enumerate() {
            y[i] = row.iter().zip(x).map(|(a, b)| a * b).sum();
        }
        y
    }
}

/// Generator of mode `n`.
///
/// Under A3 (`u ~ sin`, `phi, psi ~ cos`):
///
/// ```text
/// rho a''    = -mu k^2 a - b k b - d k c
/// kappa1 b'' = -b k a - (alpha k^2 + alpha1) b - (beta k^2 + alpha3) c - tau1 b' - tau2 c'
/// kappa2 c'' = -d k a - (beta k^2 + alpha3) b - (gamma k^2 + alpha2) c - tau3 b' - tau4 c'
/// ```
///
/// Under A2 the `b k`, `d k` couplings change sign; the two generators are
/// similar through `a -> -a`.
pub fn assemble_mode_matrix(params: &MaterialParams, bc: BoundaryKind, n: ModeIndex) -> ModeMatrix {
    let p = params;
    let k = p.wavenumber(n.get());
    let k2 = k * k;
    let s = bc.coupling_sign();
    let mut e = [[0.0; 6]; 6];
    e[0][1] = 1.0;
    e[2][3] = 1.0;
    e[4][5] = 1.0;

    e[1][0] = -p.mu * k2 / p.rho;
    e[1][2] = -s * p.b * k / p.rho;
    e[1][4] = -s * p.d * k / p.rho;

    e[3][0] = -s * p.b * k / p.kappa1;
    e[3][2] = -(p.alpha * k2 + p.alpha1) / p.kappa1;
    e[3][3] = -p.tau1 / p.kappa1;
    e[3][4] = -(p.beta * k2 + p.alpha3) / p.kappa1;
    e[3][5] = -p.tau2 / p.kappa1;

    e[5][0] = -s * p.d * k / p.kappa2;
    e[5][2] = -(p.beta * k2 + p.alpha3) / p.kappa2;
    e[5][3] = -p.tau3 / p.kappa2;
    e[5][4] = -(p.gamma * k2 + p.alpha2) / p.kappa2;
    e[5][5] = -p.tau4 / p.kappa2;

    ModeMatrix { n, k, entries: e }
}

/// Generator of the mean mode; only defined under A3.
pub fn assemble_mean_matrix(params: &MaterialParams, bc: BoundaryKind) -> Result<MeanModeMatrix, ModalError> {
    if bc != BoundaryKind::MixedA3 {
        return Err(ModalError::BcMismatch);
    }
    let p = params;
    Ok(MeanModeMatrix {
        entries: [
            [0.0, 1.0, 0.0, 0.0],
            [-p.alpha1 / p.kappa1, -p.tau1 / p.kappa1, -p.alpha3 / p.kappa1, -p.tau2 / p.kappa1],
            [0.0, 0.0, 0.0, 1.0],
            [-p.alpha3 / p.kappa2, -p.tau3 / p.kappa2, -p.alpha2 / p.kappa2, -p.tau4 / p.kappa2],
        ],
    })
}

/// The six eigenvalues of mode `n`, residual-certified.
pub fn mode_spectrum(params: &MaterialParams, bc: BoundaryKind, n: ModeIndex) -> Result<Vec<Complex64>, ModalError> {
    let m = assemble_mode_matrix(params, bc, n);
    Ok(linalg::eigenvalues(&m.to_complex())?)
}

/// Verdict of a spectral-abscissa scan.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ScanVerdict {
    /// Every scanned abscissa and the fitted large-`n` limit stay left of `-AXIS_TOL`.
    UniformlyNegative,
    /// The fitted large-`n` limit is within `AXIS_TOL` of the imaginary axis (or right of it).
    ApproachingAxis,
    /// The tail limit is negative but some scanned mode reaches the axis.
    Indeterminate,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanRecord {
    pub n: usize,
    pub k: f64,
    pub abscissa: f64,
    /// `|Im|` of the eigenvalue attaining the abscissa.
    pub abscissa_freq: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumScan {
    pub params: MaterialParams,
    pub bc: BoundaryKind,
    pub records: Vec<ScanRecord>,
    pub sup: f64,
    /// Fitted `c0` in `abscissa(n) ~ c0 + c1 / n^2` over the top third of modes.
    pub tail_limit: f64,
    pub tail_coeff: f64,
    pub verdict: ScanVerdict,
}

impl SpectrumScan {
    pub fn abscissa(&self, n: usize) -> Option<f64> {
        self.records.iter().find(|r| r.n == n).map(|r| r.abscissa)
    }
}

/// Largest real part and the `|Im|` of the eigenvalue attaining it.
pub fn abscissa_of(eigs: &[Complex64]) -> (f64, f64) {
    eigs.iter().fold((f64::NEG_INFINITY, 0.0), |best, z| {
        if z.re > best.0 || (z.re == best.0 && z.im.abs() > best.1) {
            (z.re, z.im.abs())
        } else {
            best
        }
    })
}

/// Abscissa of every mode `1..=n_max`, with a tail fit and a verdict.
///
/// Modes are evaluated in parallel; records are always ordered by `n`.
pub fn abscissa_scan(params: &MaterialParams, bc: BoundaryKind, n_max: usize) -> Result<SpectrumScan, ModalError> {
    if n_max == 0 {
        return Err(ModalError::InvalidMode);
    }
    let records = (1..=n_max)
        .into_par_iter()
        .map(|n| {
            let idx = ModeIndex::new(n)?;
            let eigs = mode_spectrum(params, bc, idx)?;
            let (abscissa, abscissa_freq) = abscissa_of(&eigs);
            Ok(ScanRecord { n, k: params.wavenumber(n), abscissa, abscissa_freq })
        })
        .collect::<Result<Vec<_>, ModalError>>()?;

    let sup = records.iter().map(|r| r.abscissa).fold(f64::NEG_INFINITY, f64::max);
    let tail_start = n_max - n_max / 3;
    let tail: Vec<&ScanRecord> = if n_max >= 3 {
        records.iter().filter(|r| r.n > tail_start.min(n_max - 2)).collect()
    } else {
        records.iter().collect()
    };
    let (tail_limit, tail_coeff) = fit_inverse_square(&tail);
    let verdict = if tail_limit < -AXIS_TOL && sup < -AXIS_TOL {
        ScanVerdict::UniformlyNegative
    } else if tail_limit >= -AXIS_TOL {
        ScanVerdict::ApproachingAxis
    } else {
        ScanVerdict::Indeterminate
    };
    Ok(SpectrumScan { params: *params, bc, records, sup, tail_limit, tail_coeff, verdict })
}

/// Least squares of `abscissa` against `{1, 1/n^2}`.
fn fit_inverse_square(records: &[&ScanRecord]) -> (f64, f64) {
    if records.len() == 1 {
        return (records[0].abscissa, 0.0);
    }
    let m = records.len() as f64;
    let (mut sx, mut sy, mut sxx, mut sxy) = (0.0, 0.0, 0.0, 0.0);
    for r in records {
        let x = 1.0 / (r.n as f64).powi(2);
        sx += x;
        sy += r.abscissa;
        sxx += x * x;
        sxy += x * r.abscissa;
    }
    let denom = m * sxx - sx * sx;
    if denom == 0.0 {
        return (sy / m, 0.0);
    }
    let slope = (m * sxy - sx * sy) / denom;
    let intercept = (sy - slope * sx) / m;
    (intercept, slope)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;
    use crate::linalg::match_multisets;

    fn idx(n: usize) -> ModeIndex {
        ModeIndex::new(n).unwrap()
    }

    #[test]
    fn decoupled_wave_frequencies() {
        let p = MaterialParams { b: 0.0, d: 0.0, ..catalog::p_exp().undamped() };
        let p = MaterialParams { mu: 4.0, rho: 2.0, ..p };
        for n in [1, 5] {
            let k = p.wavenumber(n);
            let eigs = mode_spectrum(&p, BoundaryKind::MixedA3, idx(n)).unwrap();
            let w = k * (p.mu / p.rho).sqrt();
            for target in [Complex64::new(0.0, w), Complex64::new(0.0, -w)] {
                assert!(eigs.iter().any(|z| (z - target).norm() < 1e-9 * w), "{target} not in {eigs:?}");
            }
        }
    }

    #[test]
    fn trace_is_independent_of_mode() {
        for p in catalog::all().iter().map(|(_, p)| *p) {
            let expected = -p.tau1 / p.kappa1 - p.tau4 / p.kappa2;
            for n in [1, 7, 100] {
                for bc in [BoundaryKind::MixedA2, BoundaryKind::MixedA3] {
                    let m = assemble_mode_matrix(&p, bc, idx(n));
                    assert!((m.trace() - expected).abs() < 1e-14);
                }
            }
        }
    }

    #[test]
    fn boundary_variants_share_spectrum() {
        let p = catalog::p_exp();
        let a2 = mode_spectrum(&p, BoundaryKind::MixedA2, idx(3)).unwrap();
        let a3 = mode_spectrum(&p, BoundaryKind::MixedA3, idx(3)).unwrap();
        assert!(match_multisets(&a2, &a3).unwrap() < 1e-10);
    }

    #[test]
    fn mean_matrix_layout() {
        let p = catalog::p_case2();
        let m = assemble_mean_matrix(&p, BoundaryKind::MixedA3).unwrap();
        assert_eq!(m.entries[0], [0.0, 1.0, 0.0, 0.0]);
        assert_eq!(m.entries[2], [0.0, 0.0, 0.0, 1.0]);
        assert!((m.trace() + p.tau1 / p.kappa1 + p.tau4 / p.kappa2).abs() < 1e-15);
        assert_eq!(assemble_mean_matrix(&p, BoundaryKind::MixedA2), Err(ModalError::BcMismatch));
    }

    #[test]
    fn mean_matrix_decoupled_oscillators() {
        let p = MaterialParams { alpha3: 0.0, tau2: 0.0, tau3: 0.0, kappa1: 2.0, alpha1: 3.0, tau1: 0.5, ..catalog::p_exp() };
        let m = assemble_mean_matrix(&p, BoundaryKind::MixedA3).unwrap();
        let eigs = linalg::eigenvalues(&m.to_complex()).unwrap();
        // z^2 + (tau1/kappa1) z + alpha1/kappa1 = 0, and likewise for psi.
        for z in eigs {
            let phi = z * z + z * (p.tau1 / p.kappa1) + p.alpha1 / p.kappa1;
            let psi = z * z + z * (p.tau4 / p.kappa2) + p.alpha2 / p.kappa2;
            assert!(phi.norm().min(psi.norm()) < 1e-12);
        }
    }

    #[test]
    fn mean_matrix_harmonic() {
        let p = MaterialParams { alpha3: 0.0, alpha1: 2.0, kappa1: 2.0, alpha2: 4.0, kappa2: 1.0, ..catalog::p_exp().undamped() };
        let m = assemble_mean_matrix(&p, BoundaryKind::MixedA3).unwrap();
        let eigs = linalg::eigenvalues(&m.to_complex()).unwrap();
        let expected = [
            Complex64::new(0.0, 1.0),
            Complex64::new(0.0, -1.0),
            Complex64::new(0.0, 2.0),
            Complex64::new(0.0, -2.0),
        ];
        assert!(match_multisets(&eigs, &expected).unwrap() < 1e-12);
    }

    #[test]
    fn p_exp_mean_mode_is_stable() {
        let m = assemble_mean_matrix(&catalog::p_exp(), BoundaryKind::MixedA3).unwrap();
        let eigs = linalg::eigenvalues(&m.to_complex()).unwrap();
        assert!(eigs.iter().all(|z| z.re < 0.0));
    }

    #[test]
    fn conservative_scan_sits_on_axis() {
        let p = catalog::p_case1().undamped();
        let scan = abscissa_scan(&p, BoundaryKind::MixedA3, 60).unwrap();
        for r in &scan.records {
            assert!(r.abscissa.abs() < 1e-9, "n = {}: {}", r.n, r.abscissa);
        }
        assert_eq!(scan.verdict, ScanVerdict::ApproachingAxis);
    }

    #[test]
    fn scan_records_ordered() {
        let scan = abscissa_scan(&catalog::p_exp(), BoundaryKind::MixedA3, 25).unwrap();
        let ns: Vec<usize> = scan.records.iter().map(|r| r.n).collect();
        assert_eq!(ns, (1..=25).collect::<Vec<_>>());
        assert!(abscissa_scan(&catalog::p_exp(), BoundaryKind::MixedA3, 0).is_err());
    }

    #[test]
    fn spectrum_is_conjugate_symmetric() {
        for (_, p) in catalog::all() {
            for n in [1, 13, 250] {
                let eigs = mode_spectrum(&p, BoundaryKind::MixedA3, idx(n)).unwrap();
                let conj: Vec<Complex64> = eigs.iter().map(|z| z.conj()).collect();
                assert!(match_multisets(&eigs, &conj).unwrap() < 1e-10 * eigs.iter().map(|z| z.norm()).fold(1.0, f64::max));
            }
        }
    }

    #[test]
    fn small_coupling_limit_matches_split_assembly() {
        let base = MaterialParams { beta: 0.0, alpha3: 0.0, tau2: 0.0, tau3: 0.0, ..catalog::p_case1() };
        let coupled = MaterialParams { b: 1e-8, d: 1e-8, ..base };
        let n = idx(4);
        let joint = mode_spectrum(&coupled, BoundaryKind::MixedA3, n).unwrap();
        // split: u alone, phi alone, psi alone
        let p = base;
        let k = p.wavenumber(4);
        let w = k * (p.mu / p.rho).sqrt();
        let mut split = vec![Complex64::new(0.0, w), Complex64::new(0.0, -w)];
        for (kap, stiff, tau) in [
            (p.kappa1, p.alpha * k * k + p.alpha1, p.tau1),
            (p.kappa2, p.gamma * k * k + p.alpha2, p.tau4),
        ] {
            // kap z^2 + tau z + stiff = 0
            let disc = Complex64::new(tau * tau - 4.0 * kap * stiff, 0.0).sqrt();
            split.push((-tau + disc) / (2.0 * kap));
            split.push((-tau - disc) / (2.0 * kap));
        }
        assert!(match_multisets(&joint, &split).unwrap() < 1e-6);
    }
}
