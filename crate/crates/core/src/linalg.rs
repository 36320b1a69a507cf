//! Fixed-size helpers for points and matrices in dimension ≤ 3.
//!
//! Points are stored as `[f64; 3]` with unused trailing components kept at
//! zero, so dot products and norms are dimension-agnostic.

pub type Vec3 = [f64; 3];
pub type Mat3 = [[f64; 3]; 3];

pub const ZERO: Vec3 = [0.0; 3];

#[inline]
pub fn dot(a: &Vec3, b: &Vec3) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

#[inline]
pub fn norm(a: &Vec3) -> f64 {
    dot(a, a).sqrt()
}

#[inline]
pub fn add(a: &Vec3, b: &Vec3) -> Vec3 {
    [a[0] + b[0], a[1] + b[1], a[2] + b[2]]
}

#[inline]
pub fn sub(a: &Vec3, b: &Vec3) -> Vec3 {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

#[inline]
pub fn scale(a: &Vec3, s: f64) -> Vec3 {
    [a[0] * s, a[1] * s, a[2] * s]
}

/// `a + s * b`
#[inline]
pub fn axpy(a: &Vec3, s: f64, b: &Vec3) -> Vec3 {
    [a[0] + s * b[0], a[1] + s * b[1], a[2] + s * b[2]]
}

#[inline]
pub fn cross(a: &Vec3, b: &Vec3) -> Vec3 {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

pub fn dist(a: &Vec3, b: &Vec3) -> f64 {
    norm(&sub(a, b))
}

pub fn normalize(a: &Vec3) -> Option<Vec3> {
    let n = norm(a);
    (n > 0.0 && n.is_finite()).then(|| scale(a, 1.0 / n))
}

pub fn from_slice(xs: &[f64]) -> Vec3 {
    let mut p = ZERO;
    for (dst, src) in p.iter_mut().zip(xs) {
        *dst = *src;
    }
    p
}

/// Determinant of the leading `n × n` block.
pub fn det(m: &Mat3, n: usize) -> f64 {
    match n {
        0 => 1.0,
        1 => m[0][0],
        2 => m[0][0] * m[1][1] - m[0][1] * m[1][0],
        _ => {
            m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
                - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
                + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
        }
    }
}

/// Frobenius norm of the leading `n × n` block (an upper bound on the
/// operator norm).
pub fn frobenius(m: &Mat3, n: usize) -> f64 {
    let mut s = 0.0;
    for row in m.iter().take(n) {
        for x in row.iter().take(n) {
            s += x * x;
        }
    }
    s.sqrt()
}

/// Solves `(AᵀA + μI) x = Aᵀb` on the leading `n × n` block by Gaussian
/// elimination with partial pivoting. With `mu = 0` this is a plain solve
/// of `A x = b` whenever `A` is nonsingular.
pub fn solve_damped(a: &Mat3, b: &Vec3, n: usize, mu: f64) -> Option<Vec3> {
    if mu == 0.0 {
        return solve(a, b, n);
    }
    let mut ata = [[0.0; 3]; 3];
    let mut atb = ZERO;
    for i in 0..n {
        for j in 0..n {
            ata[i][j] = (0..n).map(|k| a[k][i] * a[k][j]).sum();
        }
        ata[i][i] += mu;
        atb[i] = (0..n).map(|k| a[k][i] * b[k]).sum();
    }
    solve(&ata, &atb, n)
}

pub fn solve(a: &Mat3, b: &Vec3, n: usize) -> Option<Vec3> {
    let mut m = *a;
    let mut rhs = *b;
    for col in 0..n {
        let pivot = (col..n).max_by(|&i, &j| m[i][col].abs().total_cmp(&m[j][col].abs()))?;
        if m[pivot][col].abs() < 1e-300 {
            return None;
        }
        m.swap(col, pivot);
        rhs.swap(col, pivot);
        for row in col + 1..n {
            let f = m[row][col] / m[col][col];
            for k in col..n {
                m[row][k] -= f * m[col][k];
            }
            rhs[row] -= f * rhs[col];
        }
    }
    let mut x = ZERO;
    for row in (0..n).rev() {
        let mut s = rhs[row];
        for k in row + 1..n {
            s -= m[row][k] * x[k];
        }
        x[row] = s / m[row][row];
    }
    x.iter().all(|v| v.is_finite()).then_some(x)
}

/// Orthonormal pair spanning the plane orthogonal to the unit vector `u`,
/// oriented so that `(u, e1, e2)` is right-handed.
pub fn tangent_frame(u: &Vec3) -> (Vec3, Vec3) {
    let helper = if u[0].abs() < 0.6 {
        [1.0, 0.0, 0.0]
    } else if u[1].abs() < 0.6 {
        [0.0, 1.0, 0.0]
    } else {
        [0.0, 0.0, 1.0]
    };
    let e1 = normalize(&axpy(&helper, -dot(&helper, u), u)).unwrap_or([0.0, 1.0, 0.0]);
    let e2 = cross(u, &e1);
    (e1, e2)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn solve_recovers_known_solution() {
        let a = [[2.0, 1.0, 0.0], [1.0, 3.0, 1.0], [0.0, 1.0, 4.0]];
        let x = [1.0, -2.0, 0.5];
        let b = [
            dot(&a[0], &x),
            dot(&a[1], &x),
            dot(&a[2], &x),
        ];
        let got = solve(&a, &b, 3).unwrap();
        for i in 0..3 {
            assert!((got[i] - x[i]).abs() < 1e-12);
        }
    }

    #[test]
    fn singular_solve_is_none() {
        let a = [[1.0, 2.0, 0.0], [2.0, 4.0, 0.0], [0.0, 0.0, 0.0]];
        assert!(solve(&a, &[1.0, 1.0, 0.0], 2).is_none());
    }

    #[test]
    fn tangent_frame_is_right_handed() {
        let u = normalize(&[0.3, -0.7, 0.2]).unwrap();
        let (e1, e2) = tangent_frame(&u);
        assert!(dot(&u, &e1).abs() < 1e-14);
        assert!(dot(&e1, &e2).abs() < 1e-14);
        assert!((dot(&cross(&u, &e1), &e2) - 1.0).abs() < 1e-14);
    }
}
