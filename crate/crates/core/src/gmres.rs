//! Unrestarted GMRES with modified Gram-Schmidt and Givens rotations.

use nalgebra::DMatrix;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GmresConfig {
    /// Stop once `|b - A x| <= tol * |b|`.
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for GmresConfig {
    fn default() -> Self {
        Self {
            tol: 1e-10,
            max_iter: 500,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GmresResult {
    pub x: Vec<f64>,
    pub iterations: usize,
    /// Final relative residual estimate.
    pub residual: f64,
    pub converged: bool,
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

fn matvec(a: &DMatrix<f64>, x: &[f64], out: &mut [f64]) {
    let n = a.nrows();
    out.iter_mut().for_each(|v| *v = 0.0);
    for (j, &xj) in x.iter().enumerate() {
        if xj == 0.0 {
            continue;
        }
        let col = &a.as_slice()[j * n..(j + 1) * n];
        for (o, c) in out.iter_mut().zip(col) {
            *o += c * xj;
        }
    }
}

/// Solve `A x = b` from a zero initial guess.
pub fn gmres(a: &DMatrix<f64>, b: &[f64], cfg: &GmresConfig) -> GmresResult {
    let n = b.len();
    assert_eq!(a.nrows(), n, "gmres: matrix/rhs size mismatch");
    assert_eq!(a.ncols(), n, "gmres: matrix must be square");
    let beta = norm(b);
    if beta == 0.0 {
        return GmresResult {
            x: vec![0.0; n],
            iterations: 0,
            residual: 0.0,
            converged: true,
        };
    }
    let max_iter = cfg.max_iter.min(n);
    let mut basis: Vec<Vec<f64>> = Vec::with_capacity(max_iter + 1);
    basis.push(b.iter().map(|v| v / beta).collect());
    // Columns of the upper Hessenberg matrix after rotation.
    let mut h: Vec<Vec<f64>> = Vec::with_capacity(max_iter);
    let mut cs: Vec<f64> = Vec::with_capacity(max_iter);
    let mut sn: Vec<f64> = Vec::with_capacity(max_iter);
    let mut g = vec![0.0; max_iter + 1];
    g[0] = beta;
    let mut k = 0;
    let mut residual = 1.0;
    let mut w = vec![0.0; n];
    while k < max_iter {
        matvec(a, &basis[k], &mut w);
        let mut col = vec![0.0; k + 2];
        for (i, v) in basis.iter().enumerate() {
            let hij = dot(&w, v);
            col[i] = hij;
            for (wi, vi) in w.iter_mut().zip(v) {
                *wi -= hij * vi;
            }
        }
        let hnext = norm(&w);
        col[k + 1] = hnext;
        for i in 0..k {
            let t = cs[i] * col[i] + sn[i] * col[i + 1];
            col[i + 1] = -sn[i] * col[i] + cs[i] * col[i + 1];
            col[i] = t;
        }
        let denom = col[k].hypot(col[k + 1]);
        let (c, s) = if denom == 0.0 {
            (1.0, 0.0)
        } else {
            (col[k] / denom, col[k + 1] / denom)
        };
        col[k] = denom;
        col[k + 1] = 0.0;
        g[k + 1] = -s * g[k];
        g[k] *= c;
        cs.push(c);
        sn.push(s);
        h.push(col);
        k += 1;
        residual = g[k].abs() / beta;
        if residual <= cfg.tol || hnext == 0.0 {
            break;
        }
        basis.push(w.iter().map(|v| v / hnext).collect());
    }
    // Back substitution for the k x k triangular system.
    let mut y = vec![0.0; k];
    for i in (0..k).rev() {
        let mut s = g[i];
        for j in i + 1..k {
            s -= h[j][i] * y[j];
        }
        y[i] = s / h[i][i];
    }
    let mut x = vec![0.0; n];
    for (yi, v) in y.iter().zip(&basis) {
        for (xi, vi) in x.iter_mut().zip(v) {
            *xi += yi * vi;
        }
    }
    GmresResult {
        x,
        iterations: k,
        residual,
        converged: residual <= cfg.tol,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn solves_small_nonsymmetric_system() {
        let a = DMatrix::from_row_slice(3, 3, &[4.0, 1.0, 0.5, -1.0, 3.0, 0.2, 0.3, 0.7, 5.0]);
        let want = [1.0, -2.0, 0.5];
        let b: Vec<f64> = (a.clone() * nalgebra::DVector::from_column_slice(&want))
            .as_slice()
            .to_vec();
        let r = gmres(&a, &b, &GmresConfig::default());
        assert!(r.converged);
        assert!(r.iterations <= 3);
        for (x, w) in r.x.iter().zip(want) {
            assert!((x - w).abs() < 1e-12);
        }
    }

    #[test]
    fn zero_rhs_returns_zero() {
        let a = DMatrix::<f64>::identity(5, 5);
        let r = gmres(&a, &[0.0; 5], &GmresConfig::default());
        assert_eq!(r.iterations, 0);
        assert!(r.x.iter().all(|v| *v == 0.0));
    }

    #[test]
    fn true_residual_meets_tolerance() {
        let n = 60;
        let a = DMatrix::from_fn(n, n, |i, j| {
            if i == j {
                2.0 + i as f64 / n as f64
            } else {
                0.3 / (1.0 + (i as f64 - j as f64).powi(2))
            }
        });
        let b: Vec<f64> = (0..n).map(|i| (i as f64 * 0.3).sin()).collect();
        let r = gmres(
            &a,
            &b,
            &GmresConfig {
                tol: 1e-11,
                max_iter: 500,
            },
        );
        assert!(r.converged);
        let ax = a * nalgebra::DVector::from_column_slice(&r.x);
        let res: f64 = ax
            .iter()
            .zip(&b)
            .map(|(p, q)| (p - q).powi(2))
            .sum::<f64>()
            .sqrt();
        assert!(res / norm(&b) < 2e-11);
    }

    #[test]
    fn reports_non_convergence() {
        // Cyclic shift: GMRES makes no progress until the last iteration.
        let n = 20;
        let a = DMatrix::from_fn(n, n, |i, j| if (i + 1) % n == j { 1.0 } else { 0.0 });
        let mut b = vec![0.0; n];
        b[0] = 1.0;
        let r = gmres(
            &a,
            &b,
            &GmresConfig {
                tol: 1e-10,
                max_iter: 5,
            },
        );
        assert!(!r.converged);
        assert_eq!(r.iterations, 5);
        assert!((r.residual - 1.0).abs() < 1e-12);
    }
}
