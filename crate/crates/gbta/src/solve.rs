//! Small dense solvers shared by the root-searching oracles: Gaussian
//! elimination, determinants, Newton and Gauss-Newton iterations.

/// Solves `a x = b` in place by Gaussian elimination with partial pivoting.
/// Returns `None` when a pivot falls below `1e-13` times the matrix scale.
pub fn solve_dense(a: &mut [Vec<f64>], b: &mut [f64]) -> Option<Vec<f64>> {
    let n = a.len();
    debug_assert!(a.iter().all(|r| r.len() == n) && b.len() == n);
    let scale = a
        .iter()
        .flat_map(|r| r.iter())
        .fold(0.0f64, |m, x| m.max(x.abs()));
    if scale == 0.0 {
        return None;
    }
    let floor = 1e-13 * scale;
    for col in 0..n {
        let (pivot, pv) = (col..n)
            .map(|i| (i, a[i][col].abs()))
            .fold((col, 0.0), |acc, x| if x.1 > acc.1 { x } else { acc });
        if pv <= floor {
            return None;
        }
        a.swap(col, pivot);
        b.swap(col, pivot);
        for i in 0..n {
            if i == col || a[i][col] == 0.0 {
                continue;
            }
            let f = a[i][col] / a[col][col];
            for k in col..n {
                a[i][k] -= f * a[col][k];
            }
            b[i] -= f * b[col];
        }
    }
    Some((0..n).map(|i| b[i] / a[i][i]).collect())
}

/// Determinant of a 4x4 matrix by LU with partial pivoting.
pub fn det4(m: &[[f64; 4]; 4]) -> f64 {
    let mut a = *m;
    let mut det = 1.0;
    for col in 0..4 {
        let (pivot, pv) = (col..4)
            .map(|i| (i, a[i][col].abs()))
            .fold((col, 0.0), |acc, x| if x.1 > acc.1 { x } else { acc });
        if pv == 0.0 {
            return 0.0;
        }
        if pivot != col {
            a.swap(col, pivot);
            det = -det;
        }
        det *= a[col][col];
        for i in (col + 1)..4 {
            let f = a[i][col] / a[col][col];
            for k in col..4 {
                a[i][k] -= f * a[col][k];
            }
        }
    }
    det
}

/// Newton iteration for a square system with analytic Jacobian.
///
/// `f(x)` returns `(residual, jacobian)`. Converges when the residual
/// infinity norm drops to `tol`; gives up after `max_iter` steps or on a
/// singular Jacobian.
pub fn newton<F>(mut x: Vec<f64>, f: F, max_iter: usize, tol: f64) -> Option<Vec<f64>>
where
    F: Fn(&[f64]) -> (Vec<f64>, Vec<Vec<f64>>),
{
    for _ in 0..max_iter {
        let (r, mut jac) = f(&x);
        if r.iter().all(|v| v.abs() <= tol) {
            return Some(x);
        }
        if r.iter().any(|v| !v.is_finite()) {
            return None;
        }
        let mut rhs: Vec<f64> = r.iter().map(|v| -v).collect();
        let step = solve_dense(&mut jac, &mut rhs)?;
        for (xi, si) in x.iter_mut().zip(&step) {
            *xi += si;
        }
    }
    let (r, _) = f(&x);
    if r.iter().all(|v| v.abs() <= tol) {
        Some(x)
    } else {
        None
    }
}

/// Gauss-Newton for overdetermined systems, with a forward-difference
/// Jacobian. Returns the final iterate only if the residual converged.
pub fn gauss_newton<F>(mut x: Vec<f64>, f: F, max_iter: usize, tol: f64) -> Option<Vec<f64>>
where
    F: Fn(&[f64]) -> Vec<f64>,
{
    let n = x.len();
    let h = 1e-7;
    for _ in 0..max_iter {
        let r = f(&x);
        if r.iter().all(|v| v.abs() <= tol) {
            return Some(x);
        }
        if r.iter().any(|v| !v.is_finite()) {
            return None;
        }
        let m = r.len();
        // J[i][j] = d r_i / d x_j
        let mut jac = vec![vec![0.0; n]; m];
        for j in 0..n {
            let mut xp = x.clone();
            xp[j] += h;
            let rp = f(&xp);
            for i in 0..m {
                jac[i][j] = (rp[i] - r[i]) / h;
            }
        }
        // Normal equations: (J^T J) s = -J^T r
        let mut jtj = vec![vec![0.0; n]; n];
        let mut jtr = vec![0.0; n];
        for i in 0..n {
            for k in 0..n {
                jtj[i][k] = (0..m).map(|row| jac[row][i] * jac[row][k]).sum();
            }
            jtr[i] = -(0..m).map(|row| jac[row][i] * r[row]).sum::<f64>();
        }
        // Tiny ridge keeps near-singular normal matrices solvable.
        let trace: f64 = (0..n).map(|i| jtj[i][i]).sum();
        let ridge = 1e-12 * (trace / n as f64).max(1e-30);
        for (i, row) in jtj.iter_mut().enumerate() {
            row[i] += ridge;
        }
        let step = solve_dense(&mut jtj, &mut jtr)?;
        let step_norm = step.iter().fold(0.0f64, |a, s| a.max(s.abs()));
        for (xi, si) in x.iter_mut().zip(&step) {
            *xi += si;
        }
        if step_norm < 1e-16 {
            break;
        }
    }
    let r = f(&x);
    if r.iter().all(|v| v.abs() <= tol) {
        Some(x)
    } else {
        None
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn solve_simple_system() {
        let mut a = vec![vec![2.0, 1.0], vec![1.0, 3.0]];
        let mut b = vec![3.0, 5.0];
        let x = solve_dense(&mut a, &mut b).unwrap();
        assert!((x[0] - 0.8).abs() < 1e-12);
        assert!((x[1] - 1.4).abs() < 1e-12);
    }

    #[test]
    fn singular_detected() {
        let mut a = vec![vec![1.0, 2.0], vec![2.0, 4.0]];
        let mut b = vec![1.0, 2.0];
        assert!(solve_dense(&mut a, &mut b).is_none());
    }

    #[test]
    fn det4_permutation() {
        let mut m = [[0.0; 4]; 4];
        m[0][0] = 1.0;
        m[1][2] = 1.0;
        m[2][1] = 1.0;
        m[3][3] = 1.0;
        assert!((det4(&m) + 1.0).abs() < 1e-15);
    }

    #[test]
    fn newton_finds_quadratic_root() {
        // x^2 - 2 = 0, y - x = 0
        let f = |x: &[f64]| {
            (
                vec![x[0] * x[0] - 2.0, x[1] - x[0]],
                vec![vec![2.0 * x[0], 0.0], vec![-1.0, 1.0]],
            )
        };
        let root = newton(vec![1.0, 0.0], f, 50, 1e-14).unwrap();
        assert!((root[0] - 2f64.sqrt()).abs() < 1e-10);
    }

    #[test]
    fn gauss_newton_overdetermined() {
        // Fit x to residuals (x-1, 2(x-1)): root at 1.
        let f = |x: &[f64]| vec![x[0] - 1.0, 2.0 * (x[0] - 1.0)];
        let root = gauss_newton(vec![5.0], f, 50, 1e-12).unwrap();
        assert!((root[0] - 1.0).abs() < 1e-9);
    }
}
