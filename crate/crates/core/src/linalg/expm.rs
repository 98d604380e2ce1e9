use num_complex::Complex64;

use super::{ComplexMatrix, LinalgError, Lu};

/// Diagonal Pade(6,6) coefficients `(2q-k)! q! / ((2q)! k! (q-k)!)`, q = 6.
const PADE6: [f64; 7] = [
    1.0,
    0.5,
    5.0 / 44.0,
    1.0 / 66.0,
    1.0 / 792.0,
    1.0 / 15840.0,
    1.0 / 665280.0,
];

/// One-norm the scaled matrix is reduced to before the Pade step.
const THETA: f64 = 0.5;

/// `exp(t M)` by scaling and squaring with a (6,6) Pade approximant.
pub fn expm(m: &ComplexMatrix, t: f64) -> Result<ComplexMatrix, LinalgError> {
    if !t.is_finite() || !m.is_finite() {
        return Err(LinalgError::NonFinite);
    }
    let n = m.dim();
    let a = m.scale_real(t);
    let norm = a.norm_one();
    let squarings = if norm > THETA { (norm / THETA).log2().ceil() as i32 } else { 0 };
    let x = a.scale_real(0.5f64.powi(squarings));

    let mut num = ComplexMatrix::identity(n);
    let mut den = ComplexMatrix::identity(n);
    let mut power = ComplexMatrix::identity(n);
    for (k, &c) in PADE6.iter().enumerate().skip(1) {
        power = &power * &x;
        let term = power.scale_real(c);
        num = &num + &term;
        den = if k % 2 == 0 { &den + &term } else { &den - &term };
    }

    let lu = Lu::factor(&den);
    if lu.pivots().any(|p| p == Complex64::new(0.0, 0.0)) {
        return Err(LinalgError::Overflow);
    }
    let mut result = ComplexMatrix::zeros(n);
    let mut col = vec![Complex64::new(0.0, 0.0); n];
    for j in 0..n {
        for i in 0..n {
            col[i] = num[(i, j)];
        }
        let sol = lu.solve(&col);
        for i in 0..n {
            result[(i, j)] = sol[i];
        }
    }

    for _ in 0..squarings {
        result = &result * &result;
        if !result.is_finite() {
            return Err(LinalgError::Overflow);
        }
    }
    if !result.is_finite() {
        return Err(LinalgError::Overflow);
    }
    Ok(result)
}
