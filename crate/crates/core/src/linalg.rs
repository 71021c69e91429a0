//! Small dense least-squares helper (K is at most a few tens).

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};

/// Solve `min ‖A x − b‖²` through the normal equations, `A` is `rows × cols` row-major.
pub(crate) fn least_squares(a: &[f64], rows: usize, cols: usize, b: &[f64]) -> Result<Vec<f64>> {
    debug_assert_eq!(a.len(), rows * cols);
    debug_assert_eq!(b.len(), rows);
    let mut ata = vec![0.0; cols * cols];
    let mut atb = vec![0.0; cols];
    for r in 0..rows {
        let row = &a[r * cols..(r + 1) * cols];
        for i in 0..cols {
            atb[i] += row[i] * b[r];
            for j in 0..cols {
                ata[i * cols + j] += row[i] * row[j];
            }
        }
    }
    solve(&mut ata, &mut atb, cols)?;
    Ok(atb)
}

/// Gaussian elimination with partial pivoting, in place; the solution ends in `b`.
fn solve(m: &mut [f64], b: &mut [f64], n: usize) -> Result<()> {
    let scale = (0..n).map(|i| m[i * n + i].abs()).fold(0.0, f64::max);
    if !(scale > 0.0) {
        return Err(Error::SingularTraining);
    }
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&x, &y| m[x * n + col].abs().total_cmp(&m[y * n + col].abs()))
            .unwrap_or(col);
        if m[pivot * n + col].abs() <= 1e-12 * scale {
            return Err(Error::SingularTraining);
        }
        if pivot != col {
            for j in 0..n {
                m.swap(col * n + j, pivot * n + j);
            }
            b.swap(col, pivot);
        }
        for r in col + 1..n {
            let f = m[r * n + col] / m[col * n + col];
            if f != 0.0 {
                for j in col..n {
                    m[r * n + j] -= f * m[col * n + j];
                }
                b[r] -= f * b[col];
            }
        }
    }
    for col in (0..n).rev() {
        let mut acc = b[col];
        for j in col + 1..n {
            acc -= m[col * n + j] * b[j];
        }
        b[col] = acc / m[col * n + col];
    }
    Ok(())
}
