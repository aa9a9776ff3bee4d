use super::Matrix;
use crate::error::{domain, Error, Result};

pub const DEFAULT_JACOBI_TOL: f64 = 1e-12;
pub const MAX_SWEEPS: usize = 100;

/// Eigenvalues of a symmetric matrix in decreasing order, by cyclic Jacobi
/// rotations.
///
/// Iterates until the off-diagonal Frobenius mass drops below
/// `tol * ‖M‖_F`. Input must be symmetric to within `tol * max(1, max|m_ij|)`.
pub fn sym_eigenvalues(m: &Matrix, tol: f64) -> Result<Vec<f64>> {
    if !m.is_square() {
        return Err(domain(format!("eigenvalues of a non-square {}x{} matrix", m.rows(), m.cols())));
    }
    let n = m.rows();
    let sym_tol = tol * m.max_abs().max(1.0);
    for i in 0..n {
        for j in i + 1..n {
            if (m[(i, j)] - m[(j, i)]).abs() > sym_tol {
                return Err(domain(format!("matrix is not symmetric at ({i}, {j})")));
            }
        }
    }

    let mut a = m.clone();
    // Symmetrize exactly so the rotations act on a symmetric array.
    for i in 0..n {
        for j in i + 1..n {
            let v = 0.5 * (a[(i, j)] + a[(j, i)]);
            a[(i, j)] = v;
            a[(j, i)] = v;
        }
    }
    let norm = a.frobenius_norm();
    if norm == 0.0 {
        return Ok(vec![0.0; n]);
    }
    let target = tol * norm;

    let mut converged = false;
    for _ in 0..MAX_SWEEPS {
        if off_diagonal_norm(&a) < target {
            converged = true;
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                rotate(&mut a, p, q);
            }
        }
    }
    if !converged && off_diagonal_norm(&a) >= target {
        return Err(Error::Numerical(format!(
            "Jacobi iteration did not converge in {MAX_SWEEPS} sweeps"
        )));
    }

    let mut eig: Vec<f64> = (0..n).map(|i| a[(i, i)]).collect();
    eig.sort_by(|x, y| y.total_cmp(x));
    Ok(eig)
}

fn off_diagonal_norm(a: &Matrix) -> f64 {
    let n = a.rows();
    let mut s = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                s += a[(i, j)] * a[(i, j)];
            }
        }
    }
    s.sqrt()
}

// One Jacobi rotation zeroing a[p][q]: a <- Jᵀ a J.
fn rotate(a: &mut Matrix, p: usize, q: usize) {
    let apq = a[(p, q)];
    if apq == 0.0 {
        return;
    }
    let n = a.rows();
    let theta = (a[(q, q)] - a[(p, p)]) / (2.0 * apq);
    let t = if theta.abs() > 1e150 {
        0.5 / theta
    } else {
        theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt())
    };
    let c = 1.0 / (t * t + 1.0).sqrt();
    let s = t * c;
    for k in 0..n {
        let (akp, akq) = (a[(k, p)], a[(k, q)]);
        a[(k, p)] = c * akp - s * akq;
        a[(k, q)] = s * akp + c * akq;
    }
    for k in 0..n {
        let (apk, aqk) = (a[(p, k)], a[(q, k)]);
        a[(p, k)] = c * apk - s * aqk;
        a[(q, k)] = s * apk + c * aqk;
    }
    a[(p, q)] = 0.0;
    a[(q, p)] = 0.0;
}
