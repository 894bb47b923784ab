//! Fixed-size 2×2 linear algebra used by the theory layer.

use super::{Result, TheoryError};

pub type Vec2 = [f64; 2];
pub type Mat2 = [[f64; 2]; 2];

pub const IDENTITY: Mat2 = [[1.0, 0.0], [0.0, 1.0]];

pub fn norm(v: Vec2) -> f64 {
    v[0].hypot(v[1])
}

pub fn sub(a: Vec2, b: Vec2) -> Vec2 {
    [a[0] - b[0], a[1] - b[1]]
}

pub fn scale(v: Vec2, s: f64) -> Vec2 {
    [v[0] * s, v[1] * s]
}

pub fn dot(a: Vec2, b: Vec2) -> f64 {
    a[0] * b[0] + a[1] * b[1]
}

pub fn mat_vec(m: &Mat2, v: Vec2) -> Vec2 {
    [
        m[0][0] * v[0] + m[0][1] * v[1],
        m[1][0] * v[0] + m[1][1] * v[1],
    ]
}

pub fn transpose(m: &Mat2) -> Mat2 {
    [[m[0][0], m[1][0]], [m[0][1], m[1][1]]]
}

pub fn shift(m: &Mat2, s: f64) -> Mat2 {
    [[m[0][0] + s, m[0][1]], [m[1][0], m[1][1] + s]]
}

/// `vᵀ M v`
pub fn quad_form(m: &Mat2, v: Vec2) -> f64 {
    dot(v, mat_vec(m, v))
}

/// Solves `M x = b`, failing on (numerically) singular `M`.
pub fn solve(m: &Mat2, b: Vec2) -> Result<Vec2> {
    let det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
    let scale = m.iter().flatten().fold(0.0f64, |a, x| a.max(x.abs()));
    if scale == 0.0 || det.abs() <= 1e-14 * scale * scale {
        return Err(TheoryError::Singular);
    }
    Ok([
        (b[0] * m[1][1] - m[0][1] * b[1]) / det,
        (m[0][0] * b[1] - m[1][0] * b[0]) / det,
    ])
}

/// Real eigenvalues of a 2×2 matrix, largest first.
pub fn eigenvalues(m: &Mat2) -> Result<(f64, f64)> {
    let half_tr = 0.5 * (m[0][0] + m[1][1]);
    let half_diff = 0.5 * (m[0][0] - m[1][1]);
    // (tr/2)² - det written without cancellation
    let disc = half_diff * half_diff + m[0][1] * m[1][0];
    if disc < 0.0 {
        let scale = m.iter().flatten().fold(0.0f64, |a, x| a.max(x.abs()));
        if disc < -1e-14 * scale.max(1.0) * scale.max(1.0) {
            return Err(TheoryError::ComplexEigenvalues(disc));
        }
        return Ok((half_tr, half_tr));
    }
    let r = disc.sqrt();
    Ok((half_tr + r, half_tr - r))
}

/// Eigenvector for eigenvalue `lambda`, scaled so its first component is 1
/// whenever that component is non-zero (otherwise `(0, 1)`).
///
/// Returns `None` when `M - λI` vanishes, i.e. every vector is an eigenvector.
pub fn eigenvector(m: &Mat2, lambda: f64) -> Option<Vec2> {
    let a = m[0][0] - lambda;
    let b = m[0][1];
    let c = m[1][0];
    let d = m[1][1] - lambda;
    // null vector of each row, keep the better conditioned one
    let from_row1 = [b, -a];
    let from_row2 = [d, -c];
    let v = if norm(from_row1) >= norm(from_row2) {
        from_row1
    } else {
        from_row2
    };
    let n = norm(v);
    let scale = m.iter().flatten().fold(1.0f64, |a, x| a.max(x.abs()));
    if n <= 1e-13 * scale {
        return None;
    }
    if v[0].abs() <= 1e-14 * n {
        Some([0.0, 1.0])
    } else {
        Some([1.0, v[1] / v[0]])
    }
}

/// Solves the continuous Lyapunov equation `A M + M Aᵀ = -Q` for symmetric
/// `Q` and Hurwitz `A` (every eigenvalue strictly below `-1e-9`).
pub fn lyapunov(a: &Mat2, q: &Mat2) -> Result<Mat2> {
    let (l1, _) = eigenvalues(a)?;
    if l1 >= -1e-9 {
        return Err(TheoryError::NotHurwitz(l1));
    }
    // unknowns (m11, m12, m22) of the symmetric solution
    let mut sys = [
        [2.0 * a[0][0], 2.0 * a[0][1], 0.0, -q[0][0]],
        [a[1][0], a[0][0] + a[1][1], a[0][1], -0.5 * (q[0][1] + q[1][0])],
        [0.0, 2.0 * a[1][0], 2.0 * a[1][1], -q[1][1]],
    ];
    let x = gauss3(&mut sys)?;
    Ok([[x[0], x[1]], [x[1], x[2]]])
}

fn gauss3(sys: &mut [[f64; 4]; 3]) -> Result<[f64; 3]> {
    for col in 0..3 {
        let pivot = (col..3)
            .max_by(|&i, &j| sys[i][col].abs().total_cmp(&sys[j][col].abs()))
            .unwrap();
        if sys[pivot][col].abs() < 1e-300 {
            return Err(TheoryError::Singular);
        }
        sys.swap(col, pivot);
        for row in col + 1..3 {
            let f = sys[row][col] / sys[col][col];
            for k in col..4 {
                sys[row][k] -= f * sys[col][k];
            }
        }
    }
    let mut x = [0.0; 3];
    for row in (0..3).rev() {
        let tail: f64 = (row + 1..3).map(|k| sys[row][k] * x[k]).sum();
        x[row] = (sys[row][3] - tail) / sys[row][row];
    }
    Ok(x)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mat_mul(a: &Mat2, b: &Mat2) -> Mat2 {
        let mut out = [[0.0; 2]; 2];
        for i in 0..2 {
            for j in 0..2 {
                out[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
            }
        }
        out
    }

    #[test]
    fn eigen_of_triangular() {
        let m = [[2.0, 1.0], [0.0, -3.0]];
        let (l1, l2) = eigenvalues(&m).unwrap();
        assert_eq!((l1, l2), (2.0, -3.0));
        let v = eigenvector(&m, l2).unwrap();
        let r = sub(mat_vec(&m, v), scale(v, l2));
        assert!(norm(r) < 1e-14);
    }

    #[test]
    fn scalar_matrix_has_no_distinguished_eigenvector() {
        let m = [[-1.0, 0.0], [0.0, -1.0]];
        assert_eq!(eigenvalues(&m).unwrap(), (-1.0, -1.0));
        assert!(eigenvector(&m, -1.0).is_none());
    }

    #[test]
    fn rotation_is_complex() {
        let m = [[0.0, -1.0], [1.0, 0.0]];
        assert!(matches!(
            eigenvalues(&m),
            Err(TheoryError::ComplexEigenvalues(_))
        ));
    }

    #[test]
    fn lyapunov_residual() {
        let a = [[-1.2, 0.4], [0.1, -0.7]];
        let q = [[0.3, -0.1], [-0.1, 0.2]];
        let m = lyapunov(&a, &q).unwrap();
        let lhs = mat_mul(&a, &m);
        let rhs = mat_mul(&m, &transpose(&a));
        for i in 0..2 {
            for j in 0..2 {
                assert!((lhs[i][j] + rhs[i][j] + q[i][j]).abs() < 1e-14);
            }
        }
        assert_eq!(m[0][1], m[1][0]);
    }

    #[test]
    fn lyapunov_rejects_unstable() {
        let a = [[0.1, 0.0], [0.0, -1.0]];
        assert!(matches!(
            lyapunov(&a, &IDENTITY),
            Err(TheoryError::NotHurwitz(_))
        ));
    }

    #[test]
    fn solve_singular() {
        assert_eq!(
            solve(&[[1.0, 2.0], [2.0, 4.0]], [1.0, 1.0]),
            Err(TheoryError::Singular)
        );
        let x = solve(&[[2.0, 1.0], [1.0, 3.0]], [3.0, 5.0]).unwrap();
        assert!((x[0] - 0.8).abs() < 1e-15 && (x[1] - 1.4).abs() < 1e-15);
    }
}
