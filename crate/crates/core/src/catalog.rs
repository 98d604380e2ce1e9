//! The four reference parameter sets, one per stability regime.
//!
//! The same sets ship as config files under `catalog/` at the repository root.

use std::f64::consts::PI;

use crate::params::MaterialParams;

const BASE: MaterialParams = MaterialParams {
    rho: 1.0,
    mu: 1.0,
    b: 0.1,
    d: 0.0,
    kappa1: 1.0,
    kappa2: 1.0,
    alpha: 1.0,
    beta: 0.0,
    gamma: 2.0,
    alpha1: 1.0,
    alpha2: 1.0,
    alpha3: 0.0,
    tau1: 1.0,
    tau2: 0.0,
    tau3: 0.0,
    tau4: 1.0,
    length: PI,
};

/// `chi0 = 0`, `chi1 = -0.01`: exponential decay.
pub fn p_exp() -> MaterialParams {
    BASE
}

/// `chi0 = 1`, `chi1 = -0.02`.
pub fn p_case1() -> MaterialParams {
    MaterialParams { b: 0.1, d: 0.1, alpha: 2.0, gamma: 2.0, ..BASE }
}

/// `chi0 = chi1 = 0`.
pub fn p_case2() -> MaterialParams {
    MaterialParams {
        b: 1.0,
        d: 1.0,
        alpha: 1.5,
        gamma: 1.5,
        beta: 0.5,
        alpha1: 3.0,
        alpha2: 3.0,
        ..BASE
    }
}

/// `chi0 = -1`, `chi1 = 0`.
pub fn p_case3() -> MaterialParams {
    MaterialParams { b: 0.1, d: 0.1, kappa2: 3.0, alpha: 2.0, gamma: 2.0, ..BASE }
}

/// `(name, params)` for every catalog set, in a fixed order.
pub fn all() -> [(&'static str, MaterialParams); 4] {
    [("p_exp", p_exp()), ("p_case1", p_case1()), ("p_case2", p_case2()), ("p_case3", p_case3())]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::{validate_all, BoundaryKind};

    #[test]
    fn every_set_is_admissible() {
        for (name, p) in all() {
            let r = validate_all(&p, BoundaryKind::MixedA3);
            assert!(r.all_ok(), "{name}: {:?}", r.messages);
        }
    }
}
