use serde::{Deserialize, Serialize};

use super::{SimError, SpectralState};
use crate::linalg::{expm, ComplexMatrix};
use crate::modal::{assemble_mean_matrix, assemble_mode_matrix, ModeIndex};
use crate::params::{BoundaryKind, MaterialParams};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Integrator {
    /// Each mode advanced by `expm(A_n dt)`.
    Exact,
    /// Classical four-stage Runge-Kutta on the same generators.
    Rk4,
}

impl Integrator {
    pub fn as_str(self) -> &'static str {
        match self {
            Integrator::Exact => "exact",
            Integrator::Rk4 => "rk4",
        }
    }
}

impl std::str::FromStr for Integrator {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "exact" => Ok(Integrator::Exact),
            "rk4" => Ok(Integrator::Rk4),
            other => Err(format!("unknown integrator `{other}`, expected `exact` or `rk4`")),
        }
    }
}

fn apply<const N: usize>(m: &[[f64; N]; N], x: &[f64; N]) -> [f64; N] {
    let mut y = [0.0; N];
    for (yi, row) in y.iter_mut().zip(m) {
        *yi = row.iter().zip(x).map(|(a, b)| a * b).sum();
    }
    y
}

fn axpy<const N: usize>(x: &[f64; N], s: f64, d: &[f64; N]) -> [f64; N] {
    let mut y = *x;
    for (yi, di) in y.iter_mut().zip(d) {
        *yi += s * di;
    }
    y
}

fn rk4_step<const N: usize>(m: &[[f64; N]; N], x: &mut [f64; N], dt: f64) {
    let k1 = apply(m, x);
    let k2 = apply(m, &axpy(x, 0.5 * dt, &k1));
    let k3 = apply(m, &axpy(x, 0.5 * dt, &k2));
    let k4 = apply(m, &axpy(x, dt, &k3));
    for i in 0..N {
        x[i] += dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    }
}

fn real_propagator<const N: usize>(m: &[[f64; N]; N], dt: f64) -> Result<[[f64; N]; N], SimError> {
    let rows: Vec<&[f64]> = m.iter().map(|r| r.as_slice()).collect();
    let e = expm(&ComplexMatrix::from_real(&rows)?, dt)?;
    let mut out = [[0.0; N]; N];
    for (i, row) in out.iter_mut().enumerate() {
        for (j, v) in row.iter_mut().enumerate() {
            *v = e[(i, j)].re;
        }
    }
    Ok(out)
}

struct Propagators {
    modes: Vec<[[f64; 6]; 6]>,
    mean: Option<[[f64; 4]; 4]>,
}

/// Steps a [`SpectralState`] with a fixed time step.
///
/// Exact propagators are built on first use and kept until the step changes.
pub struct Evolver {
    bc: BoundaryKind,
    dt: f64,
    integrator: Integrator,
    generators: Vec<[[f64; 6]; 6]>,
    mean_generator: Option<[[f64; 4]; 4]>,
    cache: Option<Propagators>,
}

impl Evolver {
    pub fn new(
        params: &MaterialParams,
        bc: BoundaryKind,
        n_modes: usize,
        dt: f64,
        integrator: Integrator,
    ) -> Result<Self, SimError> {
        if n_modes == 0 {
            return Err(SimError::NoModes);
        }
        check_step(dt)?;
        let generators = (1..=n_modes)
            .map(|n| assemble_mode_matrix(params, bc, ModeIndex::new(n).expect("n >= 1")).entries)
            .collect();
        let mean_generator = match bc {
            BoundaryKind::MixedA3 => Some(assemble_mean_matrix(params, bc)?.entries),
            BoundaryKind::MixedA2 => None,
        };
        Ok(Self { bc, dt, integrator, generators, mean_generator, cache: None })
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn n_modes(&self) -> usize {
        self.generators.len()
    }

    pub fn set_dt(&mut self, dt: f64) -> Result<(), SimError> {
        check_step(dt)?;
        if dt != self.dt {
            self.dt = dt;
            self.cache = None;
        }
        Ok(())
    }

    fn propagators(&mut self) -> Result<&Propagators, SimError> {
        if self.cache.is_none() {
            let modes = self
                .generators
                .iter()
                .map(|g| real_propagator(g, self.dt))
                .collect::<Result<Vec<_>, _>>()?;
            let mean = self.mean_generator.as_ref().map(|g| real_propagator(g, self.dt)).transpose()?;
            self.cache = Some(Propagators { modes, mean });
        }
        Ok(self.cache.as_ref().expect("just filled"))
    }

    /// Advances `state` by one step.
    pub fn step(&mut self, state: &mut SpectralState) -> Result<(), SimError> {
        if state.modes.len() != self.generators.len() || state.mean.is_some() != (self.bc == BoundaryKind::MixedA3) {
            return Err(SimError::LayoutMismatch);
        }
        let dt = self.dt;
        match self.integrator {
            Integrator::Exact => {
                let props = self.propagators()?;
                for (x, p) in state.modes.iter_mut().zip(&props.modes) {
                    *x = apply(p, x);
                }
                if let (Some(x), Some(p)) = (state.mean.as_mut(), props.mean.as_ref()) {
                    *x = apply(p, x);
                }
            }
            Integrator::Rk4 => {
                for (x, g) in state.modes.iter_mut().zip(&self.generators) {
                    rk4_step(g, x, dt);
                }
                if let (Some(x), Some(g)) = (state.mean.as_mut(), self.mean_generator.as_ref()) {
                    rk4_step(g, x, dt);
                }
            }
        }
        state.t += dt;
        if !state.is_finite() {
            return Err(SimError::Linalg(crate::linalg::LinalgError::Overflow));
        }
        Ok(())
    }

    /// Runs `steps` steps from `state0`, calling `sink` on the initial state
    /// and then after every step. Times are `t0 + j dt` without accumulation.
    pub fn run(
        &mut self,
        state0: &SpectralState,
        steps: usize,
        mut sink: impl FnMut(&SpectralState),
    ) -> Result<SpectralState, SimError> {
        let t0 = state0.t;
        let mut state = state0.clone();
        sink(&state);
        for j in 1..=steps {
            self.step(&mut state)?;
            state.t = t0 + j as f64 * self.dt;
            sink(&state);
        }
        Ok(state)
    }
}

fn check_step(dt: f64) -> Result<(), SimError> {
    if dt > 0.0 && dt.is_finite() {
        Ok(())
    } else {
        Err(SimError::InvalidStep(dt))
    }
}

/// Number of whole steps of size `dt` covering `[0, t_end]`.
pub(crate) fn step_count(t_end: f64, dt: f64) -> usize {
    (t_end / dt).round().max(0.0) as usize
}

/// Every state from `t0` to `t0 + t_end`, one per step.
pub fn evolve(
    params: &MaterialParams,
    bc: BoundaryKind,
    state0: &SpectralState,
    t_end: f64,
    dt: f64,
    integrator: Integrator,
) -> Result<Vec<SpectralState>, SimError> {
    let mut ev = Evolver::new(params, bc, state0.n_modes(), dt, integrator)?;
    let mut out = Vec::with_capacity(step_count(t_end, dt) + 1);
    ev.run(state0, step_count(t_end, dt), |s| out.push(s.clone()))?;
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;
    use crate::simulate::InitialSpec;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_state(bc: BoundaryKind, n: usize, seed: u64) -> SpectralState {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut s = SpectralState::zero(bc, n);
        for v in s.modes.iter_mut().flatten().chain(s.mean.iter_mut().flatten()) {
            *v = rng.gen_range(-1.0..1.0);
        }
        s
    }

    #[test]
    fn zero_stays_zero() {
        let p = catalog::p_case2();
        let s0 = SpectralState::zero(BoundaryKind::MixedA3, 8);
        for integ in [Integrator::Exact, Integrator::Rk4] {
            let traj = evolve(&p, BoundaryKind::MixedA3, &s0, 1.0, 0.01, integ).unwrap();
            assert_eq!(traj.len(), 101);
            assert!(traj.iter().all(|s| s.modes.iter().flatten().all(|v| *v == 0.0)));
        }
    }

    #[test]
    fn decoupled_u_mode_is_a_cosine() {
        let p = MaterialParams { b: 0.0, d: 0.0, ..catalog::p_exp().undamped() };
        let s0 = InitialSpec::Mode(1).build(BoundaryKind::MixedA3, 4).unwrap();
        let traj = evolve(&p, BoundaryKind::MixedA3, &s0, 5.0, 1e-2, Integrator::Exact).unwrap();
        let omega = p.wavenumber(1) * (p.mu / p.rho).sqrt();
        for s in &traj {
            assert!((s.modes[0][0] - (omega * s.t).cos()).abs() < 1e-10, "t = {}", s.t);
        }
    }

    #[test]
    fn exact_and_rk4_agree() {
        let p = catalog::p_exp();
        let s0 = random_state(BoundaryKind::MixedA3, 16, 3);
        let bc = BoundaryKind::MixedA3;
        let exact = evolve(&p, bc, &s0, 10.0, 1e-3, Integrator::Exact).unwrap();
        let rk4 = evolve(&p, bc, &s0, 10.0, 1e-3, Integrator::Rk4).unwrap();
        let worst = exact.iter().zip(&rk4).map(|(a, b)| a.max_deviation(b)).fold(0.0, f64::max);
        assert!(worst < 1e-6, "{worst}");
    }

    #[test]
    fn evolution_is_linear() {
        let p = catalog::p_case3();
        let bc = BoundaryKind::MixedA3;
        let s0 = random_state(bc, 6, 4);
        let a = evolve(&p, bc, &s0, 2.0, 1e-2, Integrator::Exact).unwrap();
        let b = evolve(&p, bc, &s0.scaled(-2.5), 2.0, 1e-2, Integrator::Exact).unwrap();
        for (x, y) in a.iter().zip(&b) {
            assert!(x.scaled(-2.5).max_deviation(y) < 1e-12);
        }
    }

    #[test]
    fn modes_never_couple() {
        let p = catalog::p_case1();
        for bc in [BoundaryKind::MixedA3, BoundaryKind::MixedA2] {
            let mut s0 = SpectralState::zero(bc, 8);
            s0.modes[4] = [1.0, -0.5, 0.3, 0.2, -0.7, 0.1];
            let traj = evolve(&p, bc, &s0, 3.0, 1e-2, Integrator::Exact).unwrap();
            for s in &traj {
                for (i, m) in s.modes.iter().enumerate() {
                    if i != 4 {
                        assert!(m.iter().all(|v| v.abs() < 1e-14));
                    }
                }
                assert!(s.mean.iter().flatten().all(|v| v.abs() < 1e-14));
            }
        }
    }

    #[test]
    fn mean_mode_exact_matches_rk4_to_t20() {
        for (name, p) in catalog::all() {
            let mut s0 = SpectralState::zero(BoundaryKind::MixedA3, 1);
            s0.mean = Some([1.0, -0.5, 0.25, 0.75]);
            let mut exact = Evolver::new(&p, BoundaryKind::MixedA3, 1, 0.5, Integrator::Exact).unwrap();
            let mut rk4 = Evolver::new(&p, BoundaryKind::MixedA3, 1, 1e-3, Integrator::Rk4).unwrap();
            let mut coarse = Vec::new();
            exact.run(&s0, 40, |s| coarse.push(s.mean.unwrap())).unwrap();
            let mut fine = Vec::new();
            rk4.run(&s0, 20_000, |s| fine.push(s.mean.unwrap())).unwrap();
            for (j, m) in coarse.iter().enumerate() {
                let r = fine[j * 500];
                let dev = m.iter().zip(&r).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
                assert!(dev < 1e-8, "{name} at t = {}: {dev}", j as f64 * 0.5);
            }
        }
    }

    #[test]
    fn set_dt_invalidates_cache() {
        let p = catalog::p_exp();
        let bc = BoundaryKind::MixedA3;
        let s0 = random_state(bc, 3, 9);
        let mut ev = Evolver::new(&p, bc, 3, 0.1, Integrator::Exact).unwrap();
        let mut a = s0.clone();
        ev.step(&mut a).unwrap();
        ev.set_dt(0.2).unwrap();
        let mut b = s0.clone();
        ev.step(&mut b).unwrap();
        let mut c = s0.clone();
        let mut fresh = Evolver::new(&p, bc, 3, 0.1, Integrator::Exact).unwrap();
        fresh.step(&mut c).unwrap();
        fresh.step(&mut c).unwrap();
        assert!(b.max_deviation(&c) < 1e-13);
        assert!(a.max_deviation(&b) > 1e-3);
        assert!(ev.set_dt(0.0).is_err());
        assert!(ev.set_dt(f64::NAN).is_err());
    }

    #[test]
    fn layout_mismatch_rejected() {
        let p = catalog::p_exp();
        let mut ev = Evolver::new(&p, BoundaryKind::MixedA3, 3, 0.1, Integrator::Exact).unwrap();
        let mut wrong = SpectralState::zero(BoundaryKind::MixedA2, 3);
        assert!(ev.step(&mut wrong).is_err());
        let mut short = SpectralState::zero(BoundaryKind::MixedA3, 2);
        assert!(ev.step(&mut short).is_err());
    }

    #[test]
    fn integrator_names() {
        assert_eq!("Exact".parse::<Integrator>(), Ok(Integrator::Exact));
        assert_eq!("rk4".parse::<Integrator>(), Ok(Integrator::Rk4));
        assert!("euler".parse::<Integrator>().is_err());
        assert_eq!(Integrator::Rk4.as_str().parse::<Integrator>(), Ok(Integrator::Rk4));
    }
}
