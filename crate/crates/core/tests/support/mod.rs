//! Dense linear algebra used as independent oracles.
#![allow(dead_code, clippy::needless_range_loop)]

use ehm_core::{CouplingTriple, C64};
use std::f64::consts::TAU;

pub type Dense = Vec<Vec<C64>>;

pub const GOLDEN: f64 = 0.618_033_988_749_894_8;

/// `c(x)` written out from the three exponential terms.
pub fn c_direct(lam: &CouplingTriple, alpha: f64, x: f64) -> C64 {
    let t = TAU * (x + alpha / 2.0);
    C64::new(
        lam.lambda1 * t.cos() + lam.lambda2 + lam.lambda3 * t.cos(),
        -lam.lambda1 * t.sin() + lam.lambda3 * t.sin(),
    )
}

/// Dense `H` restricted to `[start, start + size − 1]`.
pub fn dense_section(lam: &CouplingTriple, alpha: f64, theta: f64, start: i64, size: usize) -> Dense {
    let mut h = vec![vec![C64::new(0.0, 0.0); size]; size];
    for i in 0..size {
        let x = theta + (start + i as i64) as f64 * alpha;
        h[i][i] = C64::new(2.0 * (TAU * x).cos(), 0.0);
        if i + 1 < size {
            let c = c_direct(lam, alpha, x);
            h[i][i + 1] = c;
            h[i + 1][i] = c.conj();
        }
    }
    h
}

/// `E − H`.
pub fn shifted(h: &Dense, e: f64) -> Dense {
    let mut m = h.clone();
    for (i, row) in m.iter_mut().enumerate() {
        for (j, v) in row.iter_mut().enumerate() {
            *v = if i == j { e - *v } else { -*v };
        }
    }
    m
}

/// Determinant by LU with partial pivoting.
pub fn det_lu(m: &Dense) -> C64 {
    let n = m.len();
    let mut a = m.clone();
    let mut det = C64::new(1.0, 0.0);
    for col in 0..n {
        let p = (col..n).max_by(|&i, &j| a[i][col].norm().total_cmp(&a[j][col].norm())).unwrap();
        if a[p][col].norm() == 0.0 {
            return C64::new(0.0, 0.0);
        }
        if p != col {
            a.swap(p, col);
            det = -det;
        }
        det *= a[col][col];
        for r in col + 1..n {
            let f = a[r][col] / a[col][col];
            for c in col..n {
                let v = a[col][c];
                a[r][c] -= f * v;
            }
        }
    }
    det
}

/// Inverse by Gauss–Jordan elimination.
pub fn inverse(m: &Dense) -> Dense {
    let n = m.len();
    let mut a = m.clone();
    let mut inv: Dense = (0..n)
        .map(|i| (0..n).map(|j| C64::new(if i == j { 1.0 } else { 0.0 }, 0.0)).collect())
        .collect();
    for col in 0..n {
        let p = (col..n).max_by(|&i, &j| a[i][col].norm().total_cmp(&a[j][col].norm())).unwrap();
        a.swap(p, col);
        inv.swap(p, col);
        let d = a[col][col];
        for c in 0..n {
            a[col][c] /= d;
            inv[col][c] /= d;
        }
        for r in 0..n {
            if r != col {
                let f = a[r][col];
                for c in 0..n {
                    let (x, y) = (a[col][c], inv[col][c]);
                    a[r][c] -= f * x;
                    inv[r][c] -= f * y;
                }
            }
        }
    }
    inv
}

/// Eigenvalues of a Hermitian matrix via cyclic Jacobi on its real 2n×2n form.
pub fn hermitian_eigenvalues(h: &Dense) -> Vec<f64> {
    let n = h.len();
    let m = 2 * n;
    let mut a = vec![vec![0.0; m]; m];
    for i in 0..n {
        for j in 0..n {
            a[i][j] = h[i][j].re;
            a[i + n][j + n] = h[i][j].re;
            a[i][j + n] = -h[i][j].im;
            a[i + n][j] = h[i][j].im;
        }
    }
    for _ in 0..100 {
        let off: f64 = (0..m).flat_map(|i| (0..m).filter(move |&j| j != i).map(move |j| (i, j))).map(|(i, j)| a[i][j] * a[i][j]).sum();
        if off < 1e-30 {
            break;
        }
        for p in 0..m {
            for q in p + 1..m {
                if a[p][q].abs() < 1e-300 {
                    continue;
                }
                let theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..m {
                    let (akp, akq) = (a[k][p], a[k][q]);
                    a[k][p] = c * akp - s * akq;
                    a[k][q] = s * akp + c * akq;
                }
                for k in 0..m {
                    let (apk, aqk) = (a[p][k], a[q][k]);
                    a[p][k] = c * apk - s * aqk;
                    a[q][k] = s * apk + c * aqk;
                }
            }
        }
    }
    let mut d: Vec<f64> = (0..m).map(|i| a[i][i]).collect();
    d.sort_by(f64::total_cmp);
    d.into_iter().step_by(2).collect()
}

pub fn rel_err(a: C64, b: C64) -> f64 {
    (a - b).norm() / b.norm().max(1e-300)
}
