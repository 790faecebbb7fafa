//! Matrix-free Lanczos for the lowest eigenpair of a Hermitian operator.

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;

fn dot(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

fn norm(a: &[Complex64]) -> f64 {
    a.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt()
}

/// Lowest Ritz pair of the Hermitian operator represented by `matvec`,
/// starting from `start`, with full reorthogonalization.
pub fn lanczos_lowest(
    dim: usize,
    matvec: &impl Fn(&[Complex64], &mut [Complex64]),
    start: &[Complex64],
    max_iter: usize,
    tol: f64,
) -> (f64, Vec<Complex64>) {
    assert_eq!(start.len(), dim);
    let max_iter = max_iter.min(dim).max(1);
    let mut basis: Vec<Vec<Complex64>> = Vec::new();
    let mut alphas: Vec<f64> = Vec::new();
    let mut betas: Vec<f64> = Vec::new();

    let mut v = start.to_vec();
    let n0 = norm(&v);
    assert!(n0 > 0.0, "start vector must be nonzero");
    for x in &mut v {
        *x /= n0;
    }
    basis.push(v);

    let mut w = vec![Complex64::new(0.0, 0.0); dim];
    let mut last_value = f64::INFINITY;
    loop {
        let k = basis.len() - 1;
        matvec(&basis[k], &mut w);
        let alpha = dot(&basis[k], &w).re;
        alphas.push(alpha);
        for (i, x) in w.iter_mut().enumerate() {
            *x -= Complex64::new(alpha, 0.0) * basis[k][i];
            if k > 0 {
                *x -= Complex64::new(betas[k - 1], 0.0) * basis[k - 1][i];
            }
        }
        // Full reorthogonalization, twice for numerical safety.
        for _ in 0..2 {
            for b in &basis {
                let overlap = dot(b, &w);
                for (i, x) in w.iter_mut().enumerate() {
                    *x -= overlap * b[i];
                }
            }
        }
        let beta = norm(&w);
        let exhausted = basis.len() >= max_iter || beta < 1e-14;

        if exhausted || basis.len() % 4 == 0 {
            let (value, ritz_weights) = lowest_of_tridiagonal(&alphas, &betas);
            let residual = if beta < 1e-14 {
                0.0
            } else {
                beta * ritz_weights.last().copied().unwrap_or(1.0).abs()
            };
            let converged = residual < 1e-11 && (last_value - value).abs() <= tol.max(1e-15);
            last_value = value;
            if exhausted || converged {
                let mut vector = vec![Complex64::new(0.0, 0.0); dim];
                for (wgt, b) in ritz_weights.iter().zip(&basis) {
                    for (i, x) in vector.iter_mut().enumerate() {
                        *x += Complex64::new(*wgt, 0.0) * b[i];
                    }
                }
                return (value, vector);
            }
        }
        betas.push(beta);
        let mut next = w.clone();
        for x in &mut next {
            *x /= beta;
        }
        basis.push(next);
    }
}

/// Smallest eigenvalue and eigenvector of the symmetric tridiagonal matrix
/// defined by the Lanczos coefficients.
fn lowest_of_tridiagonal(alphas: &[f64], betas: &[f64]) -> (f64, Vec<f64>) {
    let k = alphas.len();
    let mut t = DMatrix::zeros(k, k);
    for i in 0..k {
        t[(i, i)] = alphas[i];
        if i + 1 < k {
            t[(i, i + 1)] = betas[i];
            t[(i + 1, i)] = betas[i];
        }
    }
    let eig = SymmetricEigen::new(t);
    let mut best = 0;
    for i in 1..k {
        if eig.eigenvalues[i] < eig.eigenvalues[best] {
            best = i;
        }
    }
    let vec = eig.eigenvectors.column(best).iter().copied().collect();
    (eig.eigenvalues[best], vec)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn finds_lowest_of_diagonal() {
        let diag = [3.0, -1.0, 4.0, 2.5, 0.0, -7.25, 1.0, 9.0];
        let matvec = |x: &[Complex64], y: &mut [Complex64]| {
            for i in 0..x.len() {
                y[i] = Complex64::new(diag[i], 0.0) * x[i];
            }
        };
        let start: Vec<Complex64> = (0..8)
            .map(|i| Complex64::new(1.0 + i as f64 * 0.1, 0.2))
            .collect();
        let (value, vector) = lanczos_lowest(8, &matvec, &start, 50, 1e-13);
        assert!((value - -7.25).abs() < 1e-10);
        let weight = vector[5].norm_sqr() / vector.iter().map(|v| v.norm_sqr()).sum::<f64>();
        assert!(weight > 1.0 - 1e-9);
    }

    #[test]
    fn handles_degenerate_ground_space() {
        let diag = [-2.0, -2.0, 1.0, 5.0];
        let matvec = |x: &[Complex64], y: &mut [Complex64]| {
            for i in 0..x.len() {
                y[i] = Complex64::new(diag[i], 0.0) * x[i];
            }
        };
        let start: Vec<Complex64> = (0..4).map(|i| Complex64::new(0.3 + i as f64, 0.0)).collect();
        let (value, _) = lanczos_lowest(4, &matvec, &start, 20, 1e-13);
        assert!((value - -2.0).abs() < 1e-10);
    }
}
