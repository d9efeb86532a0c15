//! Singular values by cyclic one-sided (Hestenes) Jacobi.

use super::matrix::SquareMatrix;

const MAX_SWEEPS: usize = 80;

/// Singular values of `a`, sorted descending. Degenerate matrices give zeros.
pub fn singular_values(a: &SquareMatrix) -> Vec<f64> {
    let d = a.dim();
    let mut buf = vec![0.0; d * d];
    for j in 0..d {
        for i in 0..d {
            buf[j * d + i] = a[(i, j)];
        }
    }
    jacobi(&mut buf, d, d)
}

/// Singular values of the `rows × ncols` matrix stored column-major in `cols`.
pub fn singular_values_of_columns(cols: &[f64], rows: usize, ncols: usize) -> Vec<f64> {
    assert_eq!(cols.len(), rows * ncols);
    let mut buf = cols.to_vec();
    jacobi(&mut buf, rows, ncols)
}

/// Largest singular value of the column-major `rows × ncols` matrix.
///
/// Columns whose norm is below `1e-17` of the largest are dropped first: by
/// Weyl's inequality they move `σ₁` by less than one part in `1e15`, and on
/// strongly graded products they are what keeps Jacobi sweeping.
pub fn top_singular_value_of_columns(cols: &[f64], rows: usize, ncols: usize) -> f64 {
    assert_eq!(cols.len(), rows * ncols);
    let norms: Vec<f64> = (0..ncols)
        .map(|j| cols[j * rows..(j + 1) * rows].iter().fold(0.0f64, |a, &v| a.hypot(v)))
        .collect();
    let top = norms.iter().fold(0.0f64, |a, &b| a.max(b));
    if top == 0.0 || !top.is_finite() {
        return if top.is_finite() { 0.0 } else { f64::NAN };
    }
    let mut order: Vec<usize> = (0..ncols).filter(|&j| norms[j] >= 1e-17 * top).collect();
    order.sort_by(|&a, &b| norms[b].total_cmp(&norms[a]));
    let mut buf = Vec::with_capacity(rows * order.len());
    for &j in &order {
        buf.extend_from_slice(&cols[j * rows..(j + 1) * rows]);
    }
    jacobi(&mut buf, rows, order.len())[0]
}

fn jacobi(buf: &mut [f64], rows: usize, ncols: usize) -> Vec<f64> {
    let scale = buf.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    if scale == 0.0 || !scale.is_finite() {
        return vec![if scale.is_finite() { 0.0 } else { f64::NAN }; ncols];
    }
    for v in buf.iter_mut() {
        *v /= scale;
    }

    for _ in 0..MAX_SWEEPS {
        let mut rotated = false;
        for p in 0..ncols {
            for q in p + 1..ncols {
                let (mut alpha, mut beta, mut gamma) = (0.0, 0.0, 0.0);
                for i in 0..rows {
                    let x = buf[p * rows + i];
                    let y = buf[q * rows + i];
                    alpha += x * x;
                    beta += y * y;
                    gamma += x * y;
                }
                if gamma == 0.0 || gamma.abs() <= f64::EPSILON * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                let zeta = (beta - alpha) / (2.0 * gamma);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                for i in 0..rows {
                    let x = buf[p * rows + i];
                    let y = buf[q * rows + i];
                    buf[p * rows + i] = c * x - s * y;
                    buf[q * rows + i] = s * x + c * y;
                }
            }
        }
        if !rotated {
            break;
        }
    }

    let mut sv: Vec<f64> = (0..ncols)
        .map(|j| {
            let col = &buf[j * rows..(j + 1) * rows];
            // hypot-style accumulation avoids underflow of tiny columns
            col.iter().fold(0.0f64, |acc, &v| acc.hypot(v)) * scale
        })
        .collect();
    sv.sort_by(|a, b| b.total_cmp(a));
    sv
}
