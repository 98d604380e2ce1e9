//! Material coefficients, boundary conditions and admissibility checks.
//!
//! Every coefficient of the coupled system lives in [`MaterialParams`]:
//!
//! ```text
//! rho u_tt   = mu u_xx + b phi_x + d psi_x
//! kappa1 phi_tt = alpha phi_xx + beta psi_xx - b u_x - alpha1 phi - alpha3 psi - tau1 phi_t - tau2 psi_t
//! kappa2 psi_tt = beta phi_xx + gamma psi_xx - d u_x - alpha3 phi - alpha2 psi - tau3 phi_t - tau4 psi_t
//! ```
//!
//! on `(0, L)`. The energy is positive definite iff the 5x5 symmetric matrix
//! built from the elastic block `{mu, b, d; b, alpha1, alpha3; d, alpha3, alpha2}`
//! and the porous block `{alpha, beta; beta, gamma}` is positive definite,
//! which is checked here through its leading principal minors.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

/// Relative size below which a minor is reported as marginal.
const MARGINAL_REL: f64 = 1e-12;

/// Constitutive coefficients and domain length.
///
/// `Default` is all zeros, which is not admissible.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct MaterialParams {
    pub rho: f64,
    pub mu: f64,
    pub b: f64,
    pub d: f64,
    pub kappa1: f64,
    pub kappa2: f64,
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
    pub alpha1: f64,
    pub alpha2: f64,
    pub alpha3: f64,
    pub tau1: f64,
    pub tau2: f64,
    pub tau3: f64,
    pub tau4: f64,
    pub length: f64,
}

impl MaterialParams {
    /// Field names in canonical order. Config files use exactly these keys.
    pub const FIELD_NAMES: [&'static str; 17] = [
        "rho", "mu", "b", "d", "kappa1", "kappa2", "alpha", "beta", "gamma", "alpha1", "alpha2",
        "alpha3", "tau1", "tau2", "tau3", "tau4", "length",
    ];

    pub const DEFAULT_LENGTH: f64 = PI;

    pub fn get(&self, name: &str) -> Option<f64> {
        Some(match name {
            "rho" => self.rho,
            "mu" => self.mu,
            "b" => self.b,
            "d" => self.d,
            "kappa1" => self.kappa1,
            "kappa2" => self.kappa2,
            "alpha" => self.alpha,
            "beta" => self.beta,
            "gamma" => self.gamma,
            "alpha1" => self.alpha1,
            "alpha2" => self.alpha2,
            "alpha3" => self.alpha3,
            "tau1" => self.tau1,
            "tau2" => self.tau2,
            "tau3" => self.tau3,
            "tau4" => self.tau4,
            "length" => self.length,
            _ => return None,
        })
    }

    /// Returns `false` for an unknown field name.
    pub fn set(&mut self, name: &str, value: f64) -> bool {
        let slot = match name {
            "rho" => &mut self.rho,
            "mu" => &mut self.mu,
            "b" => &mut self.b,
            "d" => &mut self.d,
            "kappa1" => &mut self.kappa1,
            "kappa2" => &mut self.kappa2,
            "alpha" => &mut self.alpha,
            "beta" => &mut self.beta,
            "gamma" => &mut self.gamma,
            "alpha1" => &mut self.alpha1,
            "alpha2" => &mut self.alpha2,
            "alpha3" => &mut self.alpha3,
            "tau1" => &mut self.tau1,
            "tau2" => &mut self.tau2,
            "tau3" => &mut self.tau3,
            "tau4" => &mut self.tau4,
            "length" => &mut self.length,
            _ => return false,
        };
        *slot = value;
        true
    }

    /// Wavenumber `n pi / L` of Fourier mode `n`.
    pub fn wavenumber(&self, n: usize) -> f64 {
        n as f64 * PI / self.length
    }

    /// Copy with every damping weight set to zero.
    pub fn undamped(&self) -> Self {
        Self { tau1: 0.0, tau2: 0.0, tau3: 0.0, tau4: 0.0, ..*self }
    }

    /// The symmetric 5x5 matrix whose definiteness makes the energy positive.
    pub fn energy_matrix(&self) -> [[f64; 5]; 5] {
        [
            [self.mu, self.b, self.d, 0.0, 0.0],
            [self.b, self.alpha1, self.alpha3, 0.0, 0.0],
            [self.d, self.alpha3, self.alpha2, 0.0, 0.0],
            [0.0, 0.0, 0.0, self.alpha, self.beta],
            [0.0, 0.0, 0.0, self.beta, self.gamma],
        ]
    }

    /// Names of the strictly-positive fields that are not.
    fn positivity_violations(&self) -> Vec<&'static str> {
        let checks = [
            ("rho", self.rho),
            ("mu", self.mu),
            ("kappa1", self.kappa1),
            ("kappa2", self.kappa2),
            ("alpha", self.alpha),
            ("gamma", self.gamma),
            ("alpha1", self.alpha1),
            ("alpha2", self.alpha2),
            ("length", self.length),
        ];
        checks
            .iter()
            .filter(|(_, v)| !(*v > 0.0))
            .map(|(name, _)| *name)
            .collect()
    }
}

/// Boundary conditions at `x = 0` and `x = L`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum BoundaryKind {
    /// `u_x = 0`, `phi = psi = 0`: u expands in cosines, phi and psi in sines.
    MixedA2,
    /// `u = 0`, `phi_x = psi_x = 0`: u expands in sines, phi and psi in cosines.
    MixedA3,
}

impl BoundaryKind {
    /// Sign carried by the first-derivative couplings `b k`, `d k` in the mode equations.
    pub(crate) fn coupling_sign(self) -> f64 {
        match self {
            BoundaryKind::MixedA2 => -1.0,
            BoundaryKind::MixedA3 => 1.0,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            BoundaryKind::MixedA2 => "A2",
            BoundaryKind::MixedA3 => "A3",
        }
    }
}

impl fmt::Display for BoundaryKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for BoundaryKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "A2" => Ok(BoundaryKind::MixedA2),
            "A3" => Ok(BoundaryKind::MixedA3),
            other => Err(format!("unknown boundary kind `{other}` (expected A2 or A3)")),
        }
    }
}

/// Outcome of the admissibility checks.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ValidationReport {
    pub positivity_ok: bool,
    /// Leading principal minors of the 5x5 energy matrix.
    pub minors: [f64; 5],
    pub damping_ok: bool,
    pub coupling_ok: bool,
    /// Left-hand sides of the derived strict inequalities, keyed by name.
    #[serde(serialize_with = "ordered_map")]
    pub diagnostics: Vec<(String, f64)>,
    pub messages: Vec<String>,
}

fn ordered_map<S: serde::Serializer>(pairs: &[(String, f64)], s: S) -> Result<S::Ok, S::Error> {
    s.collect_map(pairs.iter().map(|(k, v)| (k, v)))
}

impl ValidationReport {
    pub fn all_ok(&self) -> bool {
        self.positivity_ok && self.damping_ok && self.coupling_ok
    }
}

/// Sylvester test on the energy matrix.
///
/// Never fails; violations are described in `messages`.
pub fn validate_positivity(params: &MaterialParams) -> ValidationReport {
    let p = params;
    let elastic2 = p.mu * p.alpha1 - p.b * p.b;
    let elastic3 = p.mu * (p.alpha1 * p.alpha2 - p.alpha3 * p.alpha3)
        - p.b * (p.b * p.alpha2 - p.alpha3 * p.d)
        + p.d * (p.b * p.alpha3 - p.alpha1 * p.d);
    let porous2 = p.alpha * p.gamma - p.beta * p.beta;
    let minors = [p.mu, elastic2, elastic3, elastic3 * p.alpha, elastic3 * porous2];

    let mut messages = Vec::new();
    for name in p.positivity_violations() {
        messages.push(format!("{name} must be strictly positive"));
    }

    // Scale of each minor: product of the diagonal entries it spans.
    let diag = [p.mu, p.alpha1, p.alpha2, p.alpha, p.gamma];
    let mut scale = 1.0;
    for (i, minor) in minors.iter().enumerate() {
        scale *= diag[i].abs().max(f64::MIN_POSITIVE);
        if *minor <= 0.0 {
            messages.push(format!(
                "leading minor {} of the energy matrix is {minor:e}, not positive",
                i + 1
            ));
        } else if *minor <= MARGINAL_REL * scale {
            messages.push(format!(
                "leading minor {} of the energy matrix is marginal ({minor:e})",
                i + 1
            ));
        }
    }

    let c1 = (p.alpha1 - p.b * p.b / p.mu) * (p.alpha2 - p.d * p.d / p.mu)
        - (p.alpha3 - p.b * p.d / p.mu).powi(2);
    let diagnostics = vec![
        ("schur(mu)-det".to_string(), c1),
        ("alpha1*mu-b^2".to_string(), elastic2),
        ("alpha2*mu-d^2".to_string(), p.alpha2 * p.mu - p.d * p.d),
        ("alpha1*alpha2-alpha3^2".to_string(), p.alpha1 * p.alpha2 - p.alpha3 * p.alpha3),
        ("alpha*gamma-beta^2".to_string(), porous2),
    ];
    for (name, value) in &diagnostics {
        if !(*value > 0.0) {
            messages.push(format!("condition {name} > 0 violated (value {value:e})"));
        }
    }

    ValidationReport {
        positivity_ok: minors.iter().all(|m| *m > 0.0),
        minors,
        damping_ok: true,
        coupling_ok: true,
        diagnostics,
        messages,
    }
}

/// `tau1 > 0` and `4 tau1 tau4 > (tau2 + tau3)^2`.
pub fn validate_damping(params: &MaterialParams) -> bool {
    let cross = params.tau2 + params.tau3;
    params.tau1 > 0.0 && 4.0 * params.tau1 * params.tau4 > cross * cross
}

/// `b` and `d` must not vanish together.
pub fn validate_coupling(params: &MaterialParams) -> bool {
    !(params.b == 0.0 && params.d == 0.0)
}

/// All admissibility checks in one report.
pub fn validate_all(params: &MaterialParams, _bc: BoundaryKind) -> ValidationReport {
    let mut report = validate_positivity(params);
    let fields_ok = params.positivity_violations().is_empty();
    report.positivity_ok &= fields_ok;
    report.damping_ok = validate_damping(params);
    if !report.damping_ok {
        report.messages.push(format!(
            "damping condition violated: need tau1 > 0 and 4*tau1*tau4 > (tau2+tau3)^2 \
             (tau1 = {}, 4*tau1*tau4 = {}, (tau2+tau3)^2 = {})",
            params.tau1,
            4.0 * params.tau1 * params.tau4,
            (params.tau2 + params.tau3).powi(2)
        ));
    }
    report.coupling_ok = validate_coupling(params);
    if !report.coupling_ok {
        report.messages.push("coefficients b and d must not both be zero".to_string());
    }
    if params.iter_values().any(|v| !v.is_finite()) {
        report.positivity_ok = false;
        report.messages.push("all coefficients must be finite".to_string());
    }
    report
}

impl MaterialParams {
    fn iter_values(&self) -> impl Iterator<Item = f64> + '_ {
        Self::FIELD_NAMES.iter().map(move |n| self.get(n).unwrap_or(f64::NAN))
    }
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;

    pub(crate) fn identity_like() -> MaterialParams {
        MaterialParams {
            rho: 1.0,
            mu: 1.0,
            b: 0.0,
            d: 0.0,
            kappa1: 1.0,
            kappa2: 1.0,
            alpha: 1.0,
            beta: 0.0,
            gamma: 1.0,
            alpha1: 1.0,
            alpha2: 1.0,
            alpha3: 0.0,
            tau1: 1.0,
            tau2: 0.0,
            tau3: 0.0,
            tau4: 1.0,
            length: PI,
        }
    }

    #[test]
    fn identity_matrix_minors() {
        let r = validate_positivity(&identity_like());
        assert!(r.positivity_ok);
        assert_eq!(r.minors, [1.0; 5]);
    }

    #[test]
    fn c2_boundary_is_rejected() {
        let p = MaterialParams { b: 1.0, ..identity_like() };
        let r = validate_positivity(&p);
        assert!(!r.positivity_ok);
        assert_eq!(r.minors[1], 0.0);
        assert!(r.messages.iter().any(|m| m.contains("alpha1*mu-b^2")));
    }

    #[test]
    fn case2_elastic_block_minor() {
        let p = MaterialParams {
            b: 1.0,
            d: 1.0,
            alpha: 1.5,
            gamma: 1.5,
            beta: 0.5,
            alpha1: 3.0,
            alpha2: 3.0,
            ..identity_like()
        };
        let r = validate_positivity(&p);
        assert!(r.positivity_ok);
        assert_eq!(r.minors[2], 3.0);
    }

    #[test]
    fn damping_examples() {
        let base = identity_like();
        assert!(validate_damping(&base));
        let equal = MaterialParams { tau2: 1.0, tau3: 1.0, ..base };
        assert!(!validate_damping(&equal));
        let p = MaterialParams { tau1: 2.0, tau4: 1.0, tau2: 0.5, tau3: 0.5, ..base };
        assert!(validate_damping(&p));
        let neg = MaterialParams { tau1: -1.0, tau4: -1.0, ..base };
        assert!(!validate_damping(&neg));
    }

    #[test]
    fn validate_all_collects_everything() {
        let p = MaterialParams { tau2: 3.0, ..identity_like() };
        let r = validate_all(&p, BoundaryKind::MixedA3);
        assert!(r.positivity_ok);
        assert!(!r.damping_ok);
        assert!(!r.coupling_ok);
        assert!(!r.all_ok());
        assert_eq!(r.messages.len(), 2);
    }

    #[test]
    fn nonpositive_field_fails_positivity() {
        let p = MaterialParams { rho: 0.0, b: 0.1, ..identity_like() };
        let r = validate_all(&p, BoundaryKind::MixedA3);
        assert!(!r.positivity_ok);
        assert!(r.messages.iter().any(|m| m.starts_with("rho")));
    }

    #[test]
    fn boundary_kind_parses() {
        assert_eq!("A2".parse::<BoundaryKind>(), Ok(BoundaryKind::MixedA2));
        assert_eq!("A3".parse::<BoundaryKind>(), Ok(BoundaryKind::MixedA3));
        assert!("A4".parse::<BoundaryKind>().is_err());
    }

    #[test]
    fn get_set_cover_all_fields() {
        let mut p = identity_like();
        for (i, name) in MaterialParams::FIELD_NAMES.iter().enumerate() {
            assert!(p.set(name, i as f64 + 0.5));
            assert_eq!(p.get(name), Some(i as f64 + 0.5));
        }
        assert!(!p.set("tau5", 1.0));
        assert_eq!(p.get("tau5"), None);
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn diagonal_case_is_positive(
                mu in 0.01f64..100.0, a1 in 0.01f64..100.0, a2 in 0.01f64..100.0,
                al in 0.01f64..100.0, ga in 0.01f64..100.0,
            ) {
                let p = MaterialParams {
                    mu, alpha1: a1, alpha2: a2, alpha: al, gamma: ga, ..identity_like()
                };
                prop_assert!(validate_positivity(&p).positivity_ok);
            }

            #[test]
            fn elastic_scaling_preserves_classification(
                b in -2.0f64..2.0, d in -2.0f64..2.0, a3 in -2.0f64..2.0,
                a1 in 0.1f64..4.0, a2 in 0.1f64..4.0,
            ) {
                let p = MaterialParams { b, d, alpha3: a3, alpha1: a1, alpha2: a2, ..identity_like() };
                let base = validate_positivity(&p).positivity_ok;
                for s in [0.5, 2.0, 10.0] {
                    let q = MaterialParams {
                        mu: s * p.mu, b: s * p.b, d: s * p.d,
                        alpha1: s * p.alpha1, alpha2: s * p.alpha2, alpha3: s * p.alpha3,
                        ..p
                    };
                    prop_assert_eq!(validate_positivity(&q).positivity_ok, base);
                }
            }

            #[test]
            fn damping_symmetric_in_cross_weights(
                t1 in -2.0f64..2.0, t2 in -2.0f64..2.0, t3 in -2.0f64..2.0, t4 in -2.0f64..2.0,
            ) {
                let p = MaterialParams { tau1: t1, tau2: t2, tau3: t3, tau4: t4, ..identity_like() };
                let q = MaterialParams { tau2: t3, tau3: t2, ..p };
                prop_assert_eq!(validate_damping(&p), validate_damping(&q));
            }
        }
    }
}
