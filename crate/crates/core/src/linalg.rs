//! Small dense helpers on top of `faer`.

use std::f64::consts::PI;

use faer::{c64, Mat, MatRef};

pub type CMat = Mat<c64>;

pub fn max_abs(m: MatRef<'_, c64>) -> f64 {
    let mut out = 0.0f64;
    for j in 0..m.ncols() {
        for i in 0..m.nrows() {
            out = out.max(m[(i, j)].norm());
        }
    }
    out
}

/// `max |m - I|`.
pub fn max_abs_minus_identity(m: MatRef<'_, c64>) -> f64 {
    let mut out = 0.0f64;
    for j in 0..m.ncols() {
        for i in 0..m.nrows() {
            let d = if i == j { m[(i, j)] - 1.0 } else { m[(i, j)] };
            out = out.max(d.norm());
        }
    }
    out
}

/// `max |m + m^T|`, the departure from skew-symmetry.
pub fn skew_defect(m: MatRef<'_, c64>) -> f64 {
    let mut out = 0.0f64;
    for j in 0..m.ncols() {
        for i in 0..m.nrows() {
            out = out.max((m[(i, j)] + m[(j, i)]).norm());
        }
    }
    out
}

/// `max |m - m^dagger|`.
pub fn hermitian_defect(m: MatRef<'_, c64>) -> f64 {
    let mut out = 0.0f64;
    for j in 0..m.ncols() {
        for i in 0..m.nrows() {
            out = out.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    out
}

/// Principal-branch-free log-determinant from a partially pivoted LU:
/// `sum ln U_ii` plus `i*pi` for an odd row permutation. The imaginary part is
/// only defined modulo `2*pi`.
pub fn log_det(m: MatRef<'_, c64>) -> c64 {
    assert_eq!(m.nrows(), m.ncols());
    if m.nrows() == 0 {
        return c64::new(0.0, 0.0);
    }
    let lu = m.partial_piv_lu();
    let u = lu.U();
    let mut acc = c64::new(0.0, 0.0);
    for i in 0..u.nrows() {
        acc += u[(i, i)].ln();
    }
    let (fwd, _) = lu.P().arrays();
    if permutation_is_odd(fwd) {
        acc += c64::new(0.0, PI);
    }
    acc
}

fn permutation_is_odd(perm: &[usize]) -> bool {
    let n = perm.len();
    let mut seen = vec![false; n];
    let mut cycles = 0usize;
    for start in 0..n {
        if seen[start] {
            continue;
        }
        cycles += 1;
        let mut i = start;
        while !seen[i] {
            seen[i] = true;
            i = perm[i];
        }
    }
    (n - cycles) % 2 == 1
}

/// `diag(left) * m * diag(right)`.
pub fn scale_rows_cols(m: MatRef<'_, c64>, left: &[c64], right: &[c64]) -> CMat {
    Mat::from_fn(m.nrows(), m.ncols(), |i, j| left[i] * m[(i, j)] * right[j])
}

/// `m * diag(d)`.
pub fn scale_cols(m: MatRef<'_, c64>, d: &[c64]) -> CMat {
    Mat::from_fn(m.nrows(), m.ncols(), |i, j| m[(i, j)] * d[j])
}

pub fn conj(m: MatRef<'_, c64>) -> CMat {
    Mat::from_fn(m.nrows(), m.ncols(), |i, j| m[(i, j)].conj())
}

pub fn frobenius_sq(m: MatRef<'_, c64>) -> f64 {
    let mut s = 0.0;
    for j in 0..m.ncols() {
        for i in 0..m.nrows() {
            s += m[(i, j)].norm_sqr();
        }
    }
    s
}
