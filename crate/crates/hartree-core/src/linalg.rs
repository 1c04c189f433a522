//! Linear-algebra helpers: tridiagonal solves, a small cyclic-Jacobi
//! eigensolver (used both for tiny Hessians and as an independent oracle),
//! and thin wrappers around faer's dense symmetric eigendecomposition.
//!
//! faer is forced into sequential mode once per process so that repeated
//! runs are bit-identical.

use std::sync::Once;

use faer::Mat;

use crate::error::{HartreeError, Result};

static FAER_SEQ: Once = Once::new();

fn ensure_sequential() {
    FAER_SEQ.call_once(|| {
        faer::set_global_parallelism(faer::Par::Seq);
    });
}

/// Symmetric tridiagonal matrix stored by diagonals. `lower[i]` couples
/// rows i and i+1 (so `lower.len() == diag.len() - 1`).
#[derive(Debug, Clone)]
pub struct SymTridiag {
    pub diag: Vec<f64>,
    pub lower: Vec<f64>,
}

impl SymTridiag {
    pub fn len(&self) -> usize {
        self.diag.len()
    }

    pub fn is_empty(&self) -> bool {
        self.diag.is_empty()
    }

    /// Matrix-vector product y = T x.
    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        let n = self.len();
        assert_eq!(x.len(), n);
        let mut y = vec![0.0; n];
        for i in 0..n {
            let mut acc = self.diag[i] * x[i];
            if i > 0 {
                acc += self.lower[i - 1] * x[i - 1];
            }
            if i + 1 < n {
                acc += self.lower[i] * x[i + 1];
            }
            y[i] = acc;
        }
        y
    }

    /// Solve T x = rhs by the Thomas algorithm (no pivoting; valid for the
    /// diagonally dominant / positive definite operators built here).
    pub fn solve(&self, rhs: &[f64]) -> Result<Vec<f64>> {
        let n = self.len();
        assert_eq!(rhs.len(), n);
        let mut c = vec![0.0; n]; // modified upper coefficients
        let mut d = vec![0.0; n]; // modified rhs
        let mut denom = self.diag[0];
        if denom == 0.0 {
            return Err(HartreeError::Linalg("zero pivot in tridiagonal solve".into()));
        }
        if n > 1 {
            c[0] = self.lower[0] / denom;
        }
        d[0] = rhs[0] / denom;
        for i in 1..n {
            denom = self.diag[i] - self.lower[i - 1] * c[i - 1];
            if denom == 0.0 || !denom.is_finite() {
                return Err(HartreeError::Linalg(format!(
                    "breakdown at row {i} of tridiagonal solve"
                )));
            }
            if i + 1 < n {
                c[i] = self.lower[i] / denom;
            }
            d[i] = (rhs[i] - self.lower[i - 1] * d[i - 1]) / denom;
        }
        let mut x = d;
        for i in (0..n - 1).rev() {
            let next = x[i + 1];
            x[i] -= c[i] * next;
        }
        Ok(x)
    }

    /// Dense copy (for assembling the stiffness side of the eigenpencil).
    pub fn to_dense(&self) -> Mat<f64> {
        let n = self.len();
        let mut m = Mat::<f64>::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = self.diag[i];
            if i + 1 < n {
                m[(i, i + 1)] = self.lower[i];
                m[(i + 1, i)] = self.lower[i];
            }
        }
        m
    }
}

/// Eigendecomposition of a small dense symmetric matrix by the cyclic
/// Jacobi method. Returns eigenvalues in ascending order and the matching
/// eigenvectors as columns. Independent of faer — used as an oracle and
/// for the tiny Robin Hessians.
pub fn jacobi_eigen(a: &Mat<f64>) -> Result<(Vec<f64>, Mat<f64>)> {
    let n = a.nrows();
    if a.ncols() != n {
        return Err(HartreeError::Linalg("jacobi_eigen needs a square matrix".into()));
    }
    let mut m = a.clone();
    let mut v = Mat::<f64>::identity(n, n);
    for sweep in 0..200 {
        let mut off = 0.0f64;
        for i in 0..n {
            for j in (i + 1)..n {
                off += m[(i, j)] * m[(i, j)];
            }
        }
        if off.sqrt() < 1e-15 * (1.0 + frob(&m)) {
            break;
        }
        if sweep == 199 {
            return Err(HartreeError::Linalg("jacobi_eigen failed to converge".into()));
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = m[(p, q)];
                if apq.abs() < 1e-300 {
                    continue;
                }
                let theta = (m[(q, q)] - m[(p, p)]) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let mkp = m[(k, p)];
                    let mkq = m[(k, q)];
                    m[(k, p)] = c * mkp - s * mkq;
                    m[(k, q)] = s * mkp + c * mkq;
                }
                for k in 0..n {
                    let mpk = m[(p, k)];
                    let mqk = m[(q, k)];
                    m[(p, k)] = c * mpk - s * mqk;
                    m[(q, k)] = s * mpk + c * mqk;
                }
                for k in 0..n {
                    let vkp = v[(k, p)];
                    let vkq = v[(k, q)];
                    v[(k, p)] = c * vkp - s * vkq;
                    v[(k, q)] = s * vkp + c * vkq;
                }
            }
        }
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| m[(i, i)].partial_cmp(&m[(j, j)]).unwrap());
    let vals: Vec<f64> = order.iter().map(|&i| m[(i, i)]).collect();
    let mut vecs = Mat::<f64>::zeros(n, n);
    for (col, &i) in order.iter().enumerate() {
        for k in 0..n {
            vecs[(k, col)] = v[(k, i)];
        }
    }
    Ok((vals, vecs))
}

fn frob(m: &Mat<f64>) -> f64 {
    let mut acc = 0.0;
    for i in 0..m.nrows() {
        for j in 0..m.ncols() {
            acc += m[(i, j)] * m[(i, j)];
        }
    }
    acc.sqrt()
}

/// Dense symmetric eigendecomposition via faer (sequential). Eigenvalues
/// ascending, eigenvectors as columns.
pub fn sym_eigen(m: &Mat<f64>) -> Result<(Vec<f64>, Mat<f64>)> {
    ensure_sequential();
    let evd = m
        .self_adjoint_eigen(faer::Side::Lower)
        .map_err(|e| HartreeError::Linalg(format!("symmetric eigendecomposition failed: {e:?}")))?;
    let n = m.nrows();
    let vals: Vec<f64> = (0..n).map(|i| evd.S().column_vector()[i]).collect();
    Ok((vals, evd.U().to_owned()))
}

/// Cholesky factor L (lower) of a symmetric positive definite matrix.
pub fn cholesky(m: &Mat<f64>) -> Result<Mat<f64>> {
    ensure_sequential();
    let n = m.nrows();
    let llt = m
        .llt(faer::Side::Lower)
        .map_err(|_| HartreeError::Linalg("Cholesky failed: matrix not positive definite".into()))?;
    let lfull = llt.L();
    let mut l = Mat::<f64>::zeros(n, n);
    for j in 0..n {
        for i in j..n {
            l[(i, j)] = lfull[(i, j)];
        }
    }
    Ok(l)
}

/// Forward substitution: solve L x = b with L lower triangular.
pub fn solve_lower(l: &Mat<f64>, b: &[f64]) -> Vec<f64> {
    let n = l.nrows();
    let mut x = b.to_vec();
    for i in 0..n {
        for j in 0..i {
            x[i] -= l[(i, j)] * x[j];
        }
        x[i] /= l[(i, i)];
    }
    x
}

/// Backward substitution: solve Lᵀ x = b with L lower triangular.
pub fn solve_lower_t(l: &Mat<f64>, b: &[f64]) -> Vec<f64> {
    let n = l.nrows();
    let mut x = b.to_vec();
    for i in (0..n).rev() {
        for j in (i + 1)..n {
            x[i] -= l[(j, i)] * x[j];
        }
        x[i] /= l[(i, i)];
    }
    x
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn thomas_solves_poisson_stencil() {
        let n = 50;
        let t = SymTridiag {
            diag: vec![2.0; n],
            lower: vec![-1.0; n - 1],
        };
        let x_true: Vec<f64> = (0..n).map(|i| (i as f64 * 0.1).sin()).collect();
        let rhs = t.matvec(&x_true);
        let x = t.solve(&rhs).unwrap();
        for (a, b) in x.iter().zip(&x_true) {
            assert!((a - b).abs() < 1e-11);
        }
    }

    #[test]
    fn jacobi_matches_known_spectrum() {
        // 2x2 with eigenvalues 1 and 3
        let mut m = Mat::<f64>::zeros(2, 2);
        m[(0, 0)] = 2.0;
        m[(1, 1)] = 2.0;
        m[(0, 1)] = 1.0;
        m[(1, 0)] = 1.0;
        let (vals, vecs) = jacobi_eigen(&m).unwrap();
        assert!((vals[0] - 1.0).abs() < 1e-13);
        assert!((vals[1] - 3.0).abs() < 1e-13);
        // eigenvector for eigenvalue 1 is (1,-1)/sqrt(2)
        let ratio = vecs[(0, 0)] / vecs[(1, 0)];
        assert!((ratio + 1.0).abs() < 1e-12);
    }

    #[test]
    fn faer_and_jacobi_agree() {
        let n = 12;
        let mut m = Mat::<f64>::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                let v = 1.0 / ((i + j) as f64 + 1.0); // Hilbert-like, symmetric
                m[(i, j)] = v;
            }
        }
        let (vj, _) = jacobi_eigen(&m).unwrap();
        let (vf, _) = sym_eigen(&m).unwrap();
        for (a, b) in vj.iter().zip(&vf) {
            assert!((a - b).abs() < 1e-11, "jacobi {a} vs faer {b}");
        }
    }

    #[test]
    fn triangular_solves_invert_cholesky() {
        let n = 8;
        let mut m = Mat::<f64>::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                m[(i, j)] = if i == j { 3.0 } else { 1.0 / (1.0 + (i as f64 - j as f64).abs()) };
            }
        }
        let l = cholesky(&m).unwrap();
        let b: Vec<f64> = (0..n).map(|i| (i as f64).cos()).collect();
        // Solve (L Lᵀ) x = b and check the residual against m.
        let y = solve_lower(&l, &b);
        let x = solve_lower_t(&l, &y);
        let mut residual: f64 = 0.0;
        for i in 0..n {
            let mut acc = 0.0;
            for j in 0..n {
                acc += m[(i, j)] * x[j];
            }
            residual = residual.max((acc - b[i]).abs());
        }
        assert!(residual < 1e-12);
    }
}
