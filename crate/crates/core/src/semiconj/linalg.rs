//! Small dense helpers on fixed-size arrays; only the leading `d × d` block is used.

use super::{Mat, Pt, MAX_DIM};
use nalgebra::DMatrix;

pub(crate) fn mat_vec(m: &Mat, x: &Pt, d: usize) -> Pt {
    match d {
        1 => mat_vec_n::<1>(m, x),
        2 => mat_vec_n::<2>(m, x),
        3 => mat_vec_n::<3>(m, x),
        _ => mat_vec_n::<4>(m, x),
    }
}

#[inline(always)]
pub(crate) fn mat_vec_n<const D: usize>(m: &Mat, x: &Pt) -> Pt {
    let mut out = [0.0; MAX_DIM];
    for i in 0..D {
        let mut s = 0.0;
        for j in 0..D {
            s += m[i][j] * x[j];
        }
        out[i] = s;
    }
    out
}

pub(crate) fn mat_mul(a: &Mat, b: &Mat, d: usize) -> Mat {
    let mut out = [[0.0; MAX_DIM]; MAX_DIM];
    for i in 0..d {
        for k in 0..d {
            let aik = a[i][k];
            for j in 0..d {
                out[i][j] += aik * b[k][j];
            }
        }
    }
    out
}

#[cfg(test)]
pub(crate) fn identity(d: usize) -> Mat {
    let mut m = [[0.0; MAX_DIM]; MAX_DIM];
    for (i, row) in m.iter_mut().enumerate().take(d) {
        row[i] = 1.0;
    }
    m
}

pub(crate) fn to_dmatrix(m: &Mat, d: usize) -> DMatrix<f64> {
    DMatrix::from_fn(d, d, |i, j| m[i][j])
}

pub(crate) fn from_dmatrix(m: &DMatrix<f64>) -> Mat {
    let mut out = [[0.0; MAX_DIM]; MAX_DIM];
    for i in 0..m.nrows().min(MAX_DIM) {
        for j in 0..m.ncols().min(MAX_DIM) {
            out[i][j] = m[(i, j)];
        }
    }
    out
}

/// Operator 2-norm.
pub(crate) fn op_norm(m: &Mat, d: usize) -> f64 {
    if d == 0 {
        return 0.0;
    }
    to_dmatrix(m, d).singular_values().max()
}

pub(crate) fn det(m: &Mat, d: usize) -> f64 {
    to_dmatrix(m, d).determinant()
}

/// Gaussian elimination with partial pivoting; `None` if singular.
pub(crate) fn solve(m: &Mat, b: &Pt, d: usize) -> Option<Pt> {
    match d {
        1 => solve_n::<1>(m, b),
        2 => solve_n::<2>(m, b),
        3 => solve_n::<3>(m, b),
        _ => solve_n::<4>(m, b),
    }
}

#[inline(always)]
pub(crate) fn solve_n<const D: usize>(m: &Mat, b: &Pt) -> Option<Pt> {
    if D == 1 {
        return (m[0][0].abs() >= 1e-300).then(|| [b[0] / m[0][0], 0.0, 0.0, 0.0]);
    }
    if D == 2 {
        let det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
        let scale = m[0][0].abs().max(m[0][1].abs()).max(m[1][0].abs()).max(m[1][1].abs());
        if det.abs() > 1e-12 * scale * scale {
            let inv = 1.0 / det;
            return Some([
                (m[1][1] * b[0] - m[0][1] * b[1]) * inv,
                (m[0][0] * b[1] - m[1][0] * b[0]) * inv,
                0.0,
                0.0,
            ]);
        }
    }
    let mut a = *m;
    let mut x = *b;
    for col in 0..D {
        let mut piv = col;
        for r in col + 1..D {
            if a[r][col].abs() > a[piv][col].abs() {
                piv = r;
            }
        }
        if a[piv][col].abs() < 1e-300 {
            return None;
        }
        if piv != col {
            a.swap(col, piv);
            x.swap(col, piv);
        }
        let inv = 1.0 / a[col][col];
        for r in col + 1..D {
            let f = a[r][col] * inv;
            for c in col..D {
                a[r][c] -= f * a[col][c];
            }
            x[r] -= f * x[col];
        }
    }
    for col in (0..D).rev() {
        let mut s = x[col];
        for c in col + 1..D {
            s -= a[col][c] * x[c];
        }
        x[col] = s / a[col][col];
    }
    Some(x)
}

pub(crate) fn inverse(m: &Mat, d: usize) -> Option<Mat> {
    let mut out = [[0.0; MAX_DIM]; MAX_DIM];
    for j in 0..d {
        let mut e = [0.0; MAX_DIM];
        e[j] = 1.0;
        let col = solve(m, &e, d)?;
        for i in 0..d {
            out[i][j] = col[i];
        }
    }
    Some(out)
}

/// Euclidean distance on `ℝ^d/ℤ^d`.
pub fn torus_dist(a: &Pt, b: &Pt, d: usize) -> f64 {
    let mut s = 0.0;
    for i in 0..d {
        let t = a[i] - b[i];
        let t = t - t.round();
        s += t * t;
    }
    s.sqrt()
}

/// `floor` through an integer cast; exact for `|x| < 2^53`, otherwise falls back to `f64::floor`.
#[inline(always)]
pub(crate) fn fast_floor(x: f64) -> f64 {
    if x.abs() < 4.5e15 {
        let t = (x as i64) as f64;
        if t > x {
            t - 1.0
        } else {
            t
        }
    } else {
        x.floor()
    }
}

pub(crate) fn frac(x: &Pt, d: usize) -> Pt {
    let mut out = [0.0; MAX_DIM];
    for i in 0..d {
        out[i] = x[i] - fast_floor(x[i]);
        if out[i] >= 1.0 {
            out[i] = 0.0;
        }
    }
    out
}

#[inline(always)]
pub(crate) fn frac_n<const D: usize>(x: &Pt) -> Pt {
    let mut out = [0.0; MAX_DIM];
    for i in 0..D {
        out[i] = x[i] - fast_floor(x[i]);
        if out[i] >= 1.0 {
            out[i] = 0.0;
        }
    }
    out
}
