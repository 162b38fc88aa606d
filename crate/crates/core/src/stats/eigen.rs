//! Cyclic Jacobi eigensolver for symmetric matrices.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

pub const MAX_SWEEPS: usize = 100;

/// Eigenvalues (descending) and matching unit eigenvectors (columns) of a
/// symmetric matrix. Fails with the off-diagonal residual if the rotation
/// sweeps do not converge within [`MAX_SWEEPS`].
pub fn symmetric_eigen(a: &DMatrix<f64>) -> Result<(DVector<f64>, DMatrix<f64>)> {
    let n = a.nrows();
    if n != a.ncols() {
        return Err(Error::Validation(format!(
            "eigen: matrix is {}x{}",
            a.nrows(),
            a.ncols()
        )));
    }
    let mut m = a.clone();
    let mut v = DMatrix::<f64>::identity(n, n);
    let scale = a.norm().max(f64::MIN_POSITIVE);
    let off = |m: &DMatrix<f64>| -> f64 {
        let mut s = 0.0;
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    s += m[(i, j)] * m[(i, j)];
                }
            }
        }
        s.sqrt()
    };
    let mut sweeps = 0;
    while off(&m) > 1e-13 * scale {
        if sweeps == MAX_SWEEPS {
            return Err(Error::NonConvergence {
                what: "Jacobi eigensolver".into(),
                iterations: sweeps,
                residual: off(&m),
            });
        }
        sweeps += 1;
        for p in 0..n {
            for q in p + 1..n {
                let apq = m[(p, q)];
                if apq.abs() < f64::MIN_POSITIVE {
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
    order.sort_by(|&i, &j| m[(j, j)].total_cmp(&m[(i, i)]).then(i.cmp(&j)));
    let values = DVector::from_iterator(n, order.iter().map(|&i| m[(i, i)]));
    let mut vectors = DMatrix::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        vectors.set_column(dst, &v.column(src));
    }
    Ok((values, vectors))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn diagonal_and_two_by_two() {
        let a = DMatrix::from_row_slice(2, 2, &[2.0, 1.0, 1.0, 2.0]);
        let (vals, vecs) = symmetric_eigen(&a).unwrap();
        assert!((vals[0] - 3.0).abs() < 1e-14 && (vals[1] - 1.0).abs() < 1e-14);
        let v0 = vecs.column(0);
        assert!((v0[0].abs() - 0.5f64.sqrt()).abs() < 1e-14);
        let d = DMatrix::from_diagonal(&DVector::from_vec(vec![1.0, 5.0, 3.0]));
        let (vals, _) = symmetric_eigen(&d).unwrap();
        assert_eq!(vals.as_slice(), &[5.0, 3.0, 1.0]);
    }

    #[test]
    fn reconstructs_input() {
        let a = DMatrix::from_row_slice(3, 3, &[4.0, -2.0, 0.5, -2.0, 3.0, 1.0, 0.5, 1.0, 2.0]);
        let (vals, vecs) = symmetric_eigen(&a).unwrap();
        let back = &vecs * DMatrix::from_diagonal(&vals) * vecs.transpose();
        assert!((back - &a).abs().max() < 1e-12);
        let gram = vecs.transpose() * &vecs;
        assert!((gram - DMatrix::identity(3, 3)).abs().max() < 1e-12);
    }

    #[test]
    fn rejects_non_square() {
        assert!(symmetric_eigen(&DMatrix::zeros(2, 3)).is_err());
    }
}
