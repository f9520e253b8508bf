//! Dense 4x4 helpers. The closed-form formulas in [`crate::cauchy`] are
//! always cross-checked against these direct LU routines, so they stay
//! deliberately free of any closed-form knowledge.

pub type Vec4 = [f64; 4];
pub type Mat4 = [[f64; 4]; 4];

pub const ZERO: Mat4 = [[0.0; 4]; 4];

pub fn identity() -> Mat4 {
    let mut m = ZERO;
    for (i, row) in m.iter_mut().enumerate() {
        row[i] = 1.0;
    }
    m
}

pub fn matmul(a: &Mat4, b: &Mat4) -> Mat4 {
    let mut out = ZERO;
    for i in 0..4 {
        for k in 0..4 {
            let aik = a[i][k];
            for j in 0..4 {
                out[i][j] += aik * b[k][j];
            }
        }
    }
    out
}

pub fn matvec(a: &Mat4, v: &Vec4) -> Vec4 {
    let mut out = [0.0; 4];
    for i in 0..4 {
        for j in 0..4 {
            out[i] += a[i][j] * v[j];
        }
    }
    out
}

pub fn scale(a: &Mat4, k: f64) -> Mat4 {
    let mut out = *a;
    for row in out.iter_mut() {
        for x in row.iter_mut() {
            *x *= k;
        }
    }
    out
}

pub fn sub(a: &Mat4, b: &Mat4) -> Mat4 {
    let mut out = ZERO;
    for i in 0..4 {
        for j in 0..4 {
            out[i][j] = a[i][j] - b[i][j];
        }
    }
    out
}

pub fn norm_inf(a: &Mat4) -> f64 {
    a.iter()
        .map(|row| row.iter().map(|x| x.abs()).sum::<f64>())
        .fold(0.0, f64::max)
}

pub fn vec_norm_inf(v: &Vec4) -> f64 {
    v.iter().fold(0.0, |acc, x| acc.max(x.abs()))
}

/// Determinant by LU factorization with partial pivoting.
pub fn det_lu(a: &Mat4) -> f64 {
    let mut m = *a;
    let mut det = 1.0;
    for col in 0..4 {
        let mut pivot = col;
        for row in col + 1..4 {
            if m[row][col].abs() > m[pivot][col].abs() {
                pivot = row;
            }
        }
        if m[pivot][col] == 0.0 {
            return 0.0;
        }
        if pivot != col {
            m.swap(pivot, col);
            det = -det;
        }
        det *= m[col][col];
        let pivot_row = m[col];
        for row in m.iter_mut().skip(col + 1) {
            let f = row[col] / pivot_row[col];
            for (j, v) in row.iter_mut().enumerate().skip(col) {
                *v -= f * pivot_row[j];
            }
        }
    }
    det
}

/// Inverse by Gauss-Jordan elimination with partial pivoting.
/// Returns `None` when a pivot degenerates.
pub fn inverse_gauss(a: &Mat4) -> Option<Mat4> {
    let mut m = *a;
    let mut inv = identity();
    for col in 0..4 {
        let mut pivot = col;
        for row in col + 1..4 {
            if m[row][col].abs() > m[pivot][col].abs() {
                pivot = row;
            }
        }
        let p = m[pivot][col];
        if p == 0.0 || !p.is_finite() {
            return None;
        }
        m.swap(pivot, col);
        inv.swap(pivot, col);
        let inv_p = 1.0 / m[col][col];
        for j in 0..4 {
            m[col][j] *= inv_p;
            inv[col][j] *= inv_p;
        }
        for row in 0..4 {
            if row == col {
                continue;
            }
            let f = m[row][col];
            if f == 0.0 {
                continue;
            }
            for j in 0..4 {
                m[row][j] -= f * m[col][j];
                inv[row][j] -= f * inv[col][j];
            }
        }
    }
    Some(inv)
}

/// Solve A x = rhs by the same elimination.
pub fn solve(a: &Mat4, rhs: &Vec4) -> Option<Vec4> {
    inverse_gauss(a).map(|inv| matvec(&inv, rhs))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn inverse_round_trip() {
        let a: Mat4 = [
            [2.0, 1.0, 0.0, 3.0],
            [0.5, -1.0, 2.0, 0.0],
            [1.0, 0.0, 1.0, 4.0],
            [-2.0, 3.0, 0.0, 1.0],
        ];
        let inv = inverse_gauss(&a).unwrap();
        let prod = matmul(&a, &inv);
        let err = norm_inf(&sub(&prod, &identity()));
        assert!(err < 1e-12, "err = {err}");
    }

    #[test]
    fn det_of_triangular() {
        let a: Mat4 = [
            [2.0, 0.0, 0.0, 0.0],
            [1.0, -3.0, 0.0, 0.0],
            [5.0, 2.0, 0.5, 0.0],
            [0.0, 1.0, 1.0, 4.0],
        ];
        assert!((det_lu(&a) - (2.0 * -3.0 * 0.5 * 4.0)).abs() < 1e-14);
    }
}
