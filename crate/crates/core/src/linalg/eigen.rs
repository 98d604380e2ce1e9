use std::cmp::Ordering;

use num_complex::Complex64;

use super::{char_poly, poly_roots, vec_norm, ComplexMatrix, LinalgError, Lu};

/// Certified residual bound, relative to the Frobenius norm of the matrix.
pub const CERTIFY_REL: f64 = 1e-9;

const POLISH_STEPS: usize = 6;

/// Eigenvalues with multiplicity.
///
/// The matrix is balanced by an exact power-of-two diagonal similarity and
/// normalized, its characteristic polynomial is solved, and every root is
/// then polished by Newton's method on `det(M - z I)` and certified by one
/// step of inverse iteration.
pub fn eigenvalues(m: &ComplexMatrix) -> Result<Vec<Complex64>, LinalgError> {
    if !m.is_finite() {
        return Err(LinalgError::NonFinite);
    }
    let n = m.dim();
    if n == 1 {
        return Ok(vec![m[(0, 0)]]);
    }
    let balanced = balance(m);
    let scale = balanced.norm_fro();
    if scale == 0.0 {
        return Ok(vec![Complex64::new(0.0, 0.0); n]);
    }
    let normalized = balanced.scale_real(1.0 / scale);
    let p = char_poly(&normalized);
    let mut roots: Vec<Complex64> = poly_roots(&p)?.into_iter().map(|r| r * scale).collect();

    polish(&balanced, &mut roots);

    let norm = m.norm_fro();
    refine_clusters(m, &balanced, &mut roots);
    for &z in &roots {
        let residual = certify_eigenvalue(m, z);
        if !(residual <= CERTIFY_REL * norm) {
            return Err(LinalgError::NoConvergence {
                iterations: POLISH_STEPS,
                residual,
                best: roots.clone(),
            });
        }
    }
    Ok(roots)
}

/// Residual `||(M - z I) v||` for `v` from one inverse-iteration step,
/// minimized over a few fixed start vectors.
pub fn certify_eigenvalue(m: &ComplexMatrix, z: Complex64) -> f64 {
    let n = m.dim();
    let shifted = m.shifted(z);
    let mut lu = Lu::factor(&shifted);
    let floor = f64::EPSILON * m.norm_fro().max(f64::MIN_POSITIVE);
    lu.floor_pivots(floor);
    let starts: [Box<dyn Fn(usize) -> Complex64>; 3] = [
        Box::new(|_| Complex64::new(1.0, 0.0)),
        Box::new(|i| Complex64::new(1.0 + 0.3 * i as f64, -0.2 * (i as f64).sin())),
        Box::new(|i| Complex64::new(((i * 7 + 3) % 5) as f64 - 2.0, 0.5)),
    ];
    starts
        .iter()
        .map(|f| {
            let x: Vec<Complex64> = (0..n).map(f).collect();
            let v = lu.solve(&x);
            let nv = vec_norm(&v);
            if !(nv.is_finite() && nv > 0.0) {
                return f64::INFINITY;
            }
            let v: Vec<Complex64> = v.iter().map(|e| e / nv).collect();
            vec_norm(&shifted.mul_vec(&v))
        })
        .fold(f64::INFINITY, f64::min)
}

/// Newton steps `z += 1 / tr((M - z I)^{-1})`, accepted only while they stay
/// well inside the gap to the neighbouring roots.
fn polish(m: &ComplexMatrix, roots: &mut [Complex64]) {
    let scale = m.norm_fro();
    for i in 0..roots.len() {
        for _ in 0..POLISH_STEPS {
            let z = roots[i];
            let gap = roots
                .iter()
                .enumerate()
                .filter(|(j, _)| *j != i)
                .map(|(_, r)| (r - z).norm())
                .fold(f64::INFINITY, f64::min);
            let lu = Lu::factor(&m.shifted(z));
            if lu.pivots().any(|p| p == Complex64::new(0.0, 0.0)) {
                break;
            }
            let step = lu.trace_of_inverse().inv();
            if !(step.re.is_finite() && step.im.is_finite()) || step.norm() >= 0.25 * gap {
                break;
            }
            roots[i] = z + step;
            if step.norm() <= 2.0 * f64::EPSILON * z.norm().max(scale * f64::EPSILON) {
                break;
            }
        }
    }
}

/// Multiple eigenvalues come out of the root iteration as a spread-out
/// cluster. For roots not already accurate to a few ulps, the cluster they belong to is
/// collapsed to its mean and refined with the multiplicity-aware Newton step
/// `z += m / tr((M - z I)^{-1})`; the collapse is kept only if it certifies better.
fn refine_clusters(original: &ComplexMatrix, m: &ComplexMatrix, roots: &mut [Complex64]) {
    let scale = m.norm_fro().max(f64::MIN_POSITIVE);
    let bound = 100.0 * f64::EPSILON * original.norm_fro();
    let radius = 1e-4 * scale;
    let n = roots.len();
    let mut handled = vec![false; n];
    for i in 0..n {
        if handled[i] || certify_eigenvalue(original, roots[i]) <= bound {
            continue;
        }
        let members: Vec<usize> =
            (0..n).filter(|&j| !handled[j] && (roots[j] - roots[i]).norm() <= radius).collect();
        if members.len() < 2 {
            continue;
        }
        let mult = members.len() as f64;
        let mut z: Complex64 = members.iter().map(|&j| roots[j]).sum::<Complex64>() / mult;
        let mut last_step = f64::INFINITY;
        for _ in 0..POLISH_STEPS {
            let lu = Lu::factor(&m.shifted(z));
            if lu.pivots().any(|p| p == Complex64::new(0.0, 0.0)) {
                break;
            }
            let step = mult / lu.trace_of_inverse();
            if !(step.re.is_finite() && step.im.is_finite()) || step.norm() >= last_step || step.norm() > radius {
                break;
            }
            z += step;
            last_step = step.norm();
        }
        let before = members.iter().map(|&j| certify_eigenvalue(original, roots[j])).fold(0.0, f64::max);
        if certify_eigenvalue(original, z) < before {
            for &j in &members {
                roots[j] = z;
                handled[j] = true;
            }
        }
    }
}

/// Power-of-two diagonal balancing; the result is similar to `m`.
fn balance(m: &ComplexMatrix) -> ComplexMatrix {
    let n = m.dim();
    let mut b = m.clone();
    loop {
        let mut changed = false;
        for i in 0..n {
            let col: f64 = (0..n).filter(|&j| j != i).map(|j| b[(j, i)].norm()).sum();
            let row: f64 = (0..n).filter(|&j| j != i).map(|j| b[(i, j)].norm()).sum();
            if col == 0.0 || row == 0.0 {
                continue;
            }
            let mut f = 1.0;
            let mut c = col;
            let r = row;
            while c < r / 2.0 {
                c *= 2.0;
                f *= 2.0;
            }
            while c > r * 2.0 {
                c /= 2.0;
                f /= 2.0;
            }
            if (c + r / f) < 0.95 * (col + row) && f != 1.0 {
                changed = true;
                for j in 0..n {
                    b[(j, i)] *= f;
                    b[(i, j)] /= f;
                }
            }
        }
        if !changed {
            return b;
        }
    }
}

fn by_re_im(a: &Complex64, b: &Complex64) -> Ordering {
    a.re.partial_cmp(&b.re)
        .unwrap_or(Ordering::Equal)
        .then(a.im.partial_cmp(&b.im).unwrap_or(Ordering::Equal))
}

/// Greedy nearest-neighbour pairing of two multisets after sorting by
/// `(Re, Im)`; returns the largest paired distance, or `None` if the sizes differ.
pub fn match_multisets(a: &[Complex64], b: &[Complex64]) -> Option<f64> {
    if a.len() != b.len() {
        return None;
    }
    let mut a = a.to_vec();
    a.sort_by(by_re_im);
    let mut b = b.to_vec();
    b.sort_by(by_re_im);
    let mut used = vec![false; b.len()];
    let mut worst = 0.0f64;
    for x in &a {
        let (j, dist) = b
            .iter()
            .enumerate()
            .filter(|(j, _)| !used[*j])
            .map(|(j, y)| (j, (x - y).norm()))
            .fold((usize::MAX, f64::INFINITY), |best, cur| if cur.1 < best.1 { cur } else { best });
        used[j] = true;
        worst = worst.max(dist);
    }
    Some(worst)
}
