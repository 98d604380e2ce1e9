use std::f64::consts::PI;

use num_complex::Complex64;

use super::{ComplexMatrix, LinalgError};

const MAX_ITER: usize = 500;
const RESIDUAL_REL: f64 = 1e-10;

/// Polynomial `c[0] + c[1] z + ... + c[d] z^d` with `c[d] != 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct PolyCoeffs {
    coeffs: Vec<Complex64>,
}

impl PolyCoeffs {
    /// Trailing zero leading coefficients are trimmed; the all-zero
    /// polynomial is rejected.
    pub fn new(mut coeffs: Vec<Complex64>) -> Option<Self> {
        while coeffs.last().is_some_and(|c| *c == Complex64::new(0.0, 0.0)) {
            coeffs.pop();
        }
        if coeffs.is_empty() {
            return None;
        }
        Some(Self { coeffs })
    }

    /// Monic polynomial with the given roots.
    pub fn from_roots(roots: &[Complex64]) -> Self {
        let mut coeffs = vec![Complex64::new(1.0, 0.0)];
        for r in roots {
            let mut next = vec![Complex64::new(0.0, 0.0); coeffs.len() + 1];
            for (i, c) in coeffs.iter().enumerate() {
                next[i + 1] += c;
                next[i] -= c * r;
            }
            coeffs = next;
        }
        Self { coeffs }
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn max_abs_coeff(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    pub fn eval(&self, z: Complex64) -> Complex64 {
        self.coeffs.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, c| acc * z + c)
    }

    /// Value and first derivative by Horner's scheme.
    fn eval_with_derivative(&self, z: Complex64) -> (Complex64, Complex64) {
        let mut p = Complex64::new(0.0, 0.0);
        let mut dp = Complex64::new(0.0, 0.0);
        for c in self.coeffs.iter().rev() {
            dp = dp * z + p;
            p = p * z + c;
        }
        (p, dp)
    }

    /// Residual bound a root `r` must satisfy.
    pub fn residual_tolerance(&self, r: Complex64) -> f64 {
        RESIDUAL_REL * self.max_abs_coeff() * r.norm().max(1.0).powi(self.degree() as i32)
    }
}

/// Monic characteristic polynomial `det(z I - M)` by Faddeev-LeVerrier.
pub fn char_poly(m: &ComplexMatrix) -> PolyCoeffs {
    let n = m.dim();
    let mut coeffs = vec![Complex64::new(0.0, 0.0); n + 1];
    coeffs[n] = Complex64::new(1.0, 0.0);
    let mut aux = ComplexMatrix::zeros(n);
    for k in 1..=n {
        // aux_k = M aux_{k-1} + c_{n-k+1} I
        let mut next = m * &aux;
        for i in 0..n {
            next[(i, i)] += coeffs[n - k + 1];
        }
        aux = next;
        let tr = (m * &aux).trace();
        coeffs[n - k] = -tr / k as f64;
    }
    PolyCoeffs { coeffs }
}

/// All roots with multiplicity by Aberth-Ehrlich iteration, then a Newton polish.
pub fn poly_roots(p: &PolyCoeffs) -> Result<Vec<Complex64>, LinalgError> {
    let d = p.degree();
    if d == 0 {
        return Err(LinalgError::Dimension("constant polynomial has no roots".into()));
    }
    let c = p.coeffs();
    if d == 1 {
        return Ok(vec![-c[0] / c[1]]);
    }

    let mut z = initial_guesses(p);
    let mut done = vec![false; d];
    let mut iterations = 0;
    while iterations < MAX_ITER && done.iter().any(|f| !f) {
        iterations += 1;
        for i in 0..d {
            if done[i] {
                continue;
            }
            let (val, der) = p.eval_with_derivative(z[i]);
            if val == Complex64::new(0.0, 0.0) {
                done[i] = true;
                continue;
            }
            let ratio = val / der;
            let repulsion: Complex64 = (0..d)
                .filter(|&j| j != i)
                .map(|j| {
                    let diff = z[i] - z[j];
                    if diff == Complex64::new(0.0, 0.0) {
                        Complex64::new(0.0, 0.0)
                    } else {
                        diff.inv()
                    }
                })
                .sum();
            let step = ratio / (Complex64::new(1.0, 0.0) - ratio * repulsion);
            if !(step.re.is_finite() && step.im.is_finite()) {
                // Derivative vanished: nudge off the critical point.
                let nudge = Complex64::new(1e-8, 1e-8) * z[i].norm().max(1.0);
                z[i] += nudge;
                continue;
            }
            z[i] -= step;
            if step.norm() <= 4.0 * f64::EPSILON * z[i].norm().max(f64::MIN_POSITIVE) {
                done[i] = true;
            }
        }
    }

    for zi in z.iter_mut() {
        newton_polish(p, zi);
    }

    let worst = z
        .iter()
        .map(|r| p.eval(*r).norm() / p.residual_tolerance(*r))
        .fold(0.0, f64::max);
    if !(worst <= 1.0) {
        let residual = z.iter().map(|r| p.eval(*r).norm()).fold(0.0, f64::max);
        return Err(LinalgError::NoConvergence { iterations, residual, best: z });
    }
    Ok(z)
}

fn newton_polish(p: &PolyCoeffs, z: &mut Complex64) {
    let mut best = p.eval(*z).norm();
    for _ in 0..3 {
        let (val, der) = p.eval_with_derivative(*z);
        let cand = *z - val / der;
        if !(cand.re.is_finite() && cand.im.is_finite()) {
            return;
        }
        let r = p.eval(cand).norm();
        if r < best {
            best = r;
            *z = cand;
        } else {
            return;
        }
    }
}

/// Points on a circle around the root centroid, rotated off the real axis.
fn initial_guesses(p: &PolyCoeffs) -> Vec<Complex64> {
    let d = p.degree();
    let c = p.coeffs();
    let lead = c[d];
    let center = -c[d - 1] / (lead * d as f64);
    // Cauchy-type radius for the shifted polynomial.
    let shifted = shift_polynomial(p, center);
    let radius = (1..=d)
        .map(|k| (shifted[d - k] / lead).norm().powf(1.0 / k as f64))
        .fold(0.0, f64::max)
        .max(1e-12 * center.norm().max(1.0));
    (0..d)
        .map(|j| {
            let theta = 2.0 * PI * j as f64 / d as f64 + 0.4;
            center + Complex64::from_polar(radius, theta)
        })
        .collect()
}

/// Coefficients of `p(z + s)`.
fn shift_polynomial(p: &PolyCoeffs, s: Complex64) -> Vec<Complex64> {
    let mut a = p.coeffs().to_vec();
    let d = a.len() - 1;
    for i in 0..d {
        for j in (i..d).rev() {
            let hi = a[j + 1];
            a[j] += s * hi;
        }
    }
    a
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn char_poly_of_diagonal() {
        let m = ComplexMatrix::from_real(&[&[1.0, 0.0], &[0.0, 2.0]]).unwrap();
        assert_eq!(char_poly(&m).coeffs(), &[c(2.0, 0.0), c(-3.0, 0.0), c(1.0, 0.0)]);
    }

    #[test]
    fn char_poly_of_zero() {
        let p = char_poly(&ComplexMatrix::zeros(2));
        assert_eq!(p.coeffs(), &[c(0.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)]);
        let roots = poly_roots(&p).unwrap();
        assert!(roots.iter().all(|r| r.norm() < 1e-6));
    }

    #[test]
    fn subleading_coefficient_is_minus_trace() {
        let m = ComplexMatrix::from_fn(5, |i, j| c((i * 3 + j) as f64 * 0.37 - 1.0, (i + 2 * j) as f64 * 0.11));
        let p = char_poly(&m);
        assert!((p.coeffs()[4] + m.trace()).norm() < 1e-12);
    }

    #[test]
    fn roots_of_z2_plus_1() {
        let p = PolyCoeffs::new(vec![c(1.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)]).unwrap();
        let mut roots = poly_roots(&p).unwrap();
        roots.sort_by(|a, b| a.im.partial_cmp(&b.im).unwrap());
        assert!((roots[0] - c(0.0, -1.0)).norm() < 1e-14);
        assert!((roots[1] - c(0.0, 1.0)).norm() < 1e-14);
    }

    #[test]
    fn cube_roots_of_unity() {
        let p = PolyCoeffs::new(vec![c(-1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)]).unwrap();
        let roots = poly_roots(&p).unwrap();
        for k in 0..3 {
            let w = Complex64::from_polar(1.0, 2.0 * PI * k as f64 / 3.0);
            assert!(roots.iter().any(|r| (r - w).norm() < 1e-13), "missing {w}");
        }
    }

    #[test]
    fn linear_and_constant() {
        let p = PolyCoeffs::new(vec![c(2.0, 0.0), c(4.0, 0.0)]).unwrap();
        assert_eq!(poly_roots(&p).unwrap(), vec![c(-0.5, 0.0)]);
        let k = PolyCoeffs::new(vec![c(2.0, 0.0)]).unwrap();
        assert!(poly_roots(&k).is_err());
        assert!(PolyCoeffs::new(vec![c(0.0, 0.0)]).is_none());
    }

    #[test]
    fn from_roots_expands() {
        let p = PolyCoeffs::from_roots(&[c(1.0, 0.0), c(2.0, 0.0)]);
        assert_eq!(p.coeffs(), &[c(2.0, 0.0), c(-3.0, 0.0), c(1.0, 0.0)]);
    }

    #[test]
    fn repeated_roots_within_residual() {
        let p = PolyCoeffs::from_roots(&[c(1.0, 1.0), c(1.0, 1.0), c(-2.0, 0.5)]);
        let roots = poly_roots(&p).unwrap();
        for r in &roots {
            assert!(p.eval(*r).norm() <= p.residual_tolerance(*r));
        }
    }

    #[test]
    fn shift_matches_direct_evaluation() {
        let p = PolyCoeffs::new(vec![c(1.0, 2.0), c(-3.0, 0.5), c(0.5, 0.0), c(2.0, -1.0)]).unwrap();
        let s = c(0.3, -0.7);
        let q = PolyCoeffs::new(shift_polynomial(&p, s)).unwrap();
        let z = c(1.1, 0.4);
        assert!((q.eval(z) - p.eval(z + s)).norm() < 1e-12);
    }
}
