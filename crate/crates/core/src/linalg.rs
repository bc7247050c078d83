//! Small dense linear algebra over a [`Scalar`] field.

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Whether `x` counts as zero: exactly in rational mode, relative to
/// `scale` in float mode.
pub fn negligible<S: Scalar>(x: &S, scale: f64) -> bool {
    if S::EXACT {
        x.is_zero()
    } else {
        x.is_zero() || x.to_f64().abs() <= 1e-40 * scale.max(1.0)
    }
}

fn max_abs<S: Scalar>(m: &[Vec<S>]) -> f64 {
    m.iter().flatten().map(|x| x.to_f64().abs()).fold(0.0, f64::max)
}

/// Picks rows greedily in the order given until `rank` independent rows are
/// found. Returns `None` when the rows span less than `rank` dimensions.
pub fn select_rows<S: Scalar>(m: &[Vec<S>], order: &[usize], rank: usize) -> Option<Vec<usize>> {
    let scale = max_abs(m);
    let mut basis: Vec<(usize, Vec<S>)> = Vec::new();
    let mut chosen = Vec::new();
    for &r in order {
        if chosen.len() == rank {
            break;
        }
        let mut v = m[r].clone();
        for (p, b) in &basis {
            if !v[*p].is_zero() {
                let f = v[*p].clone();
                for (x, y) in v.iter_mut().zip(b) {
                    *x = x.sub(&f.mul(y));
                }
            }
        }
        let Some(p) = (0..v.len()).find(|&c| !negligible(&v[c], scale)) else {
            continue;
        };
        let inv = S::one(&v[p].ctx()).div(&v[p]).expect("nonzero pivot");
        for x in v.iter_mut() {
            *x = x.mul(&inv);
        }
        for (_, b) in basis.iter_mut() {
            if !b[p].is_zero() {
                let f = b[p].clone();
                for (x, y) in b.iter_mut().zip(&v) {
                    *x = x.sub(&f.mul(y));
                }
            }
        }
        basis.push((p, v));
        chosen.push(r);
    }
    (chosen.len() == rank).then_some(chosen)
}

/// Inverse of a square matrix by Gauss-Jordan elimination.
pub fn invert<S: Scalar>(m: &[Vec<S>]) -> Result<Vec<Vec<S>>> {
    let n = m.len();
    if n == 0 {
        return Ok(Vec::new());
    }
    let ctx = m[0][0].ctx();
    let scale = max_abs(m);
    let mut a: Vec<Vec<S>> = m.to_vec();
    let mut inv: Vec<Vec<S>> = (0..n)
        .map(|i| (0..n).map(|j| if i == j { S::one(&ctx) } else { S::zero(&ctx) }).collect())
        .collect();
    for col in 0..n {
        let piv = (col..n)
            .filter(|&r| !negligible(&a[r][col], scale))
            .max_by(|&x, &y| a[x][col].to_f64().abs().total_cmp(&a[y][col].to_f64().abs()))
            .ok_or_else(|| Error::Singular(format!("singular linear system at column {col}")))?;
        a.swap(col, piv);
        inv.swap(col, piv);
        let p = S::one(&ctx).div(&a[col][col]).expect("nonzero pivot");
        for j in 0..n {
            a[col][j] = a[col][j].mul(&p);
            inv[col][j] = inv[col][j].mul(&p);
        }
        for r in 0..n {
            if r == col || a[r][col].is_zero() {
                continue;
            }
            let f = a[r][col].clone();
            for j in 0..n {
                let (x, y) = (a[col][j].clone(), inv[col][j].clone());
                a[r][j] = a[r][j].sub(&f.mul(&x));
                inv[r][j] = inv[r][j].sub(&f.mul(&y));
            }
        }
    }
    Ok(inv)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Q;

    #[test]
    fn inverts_and_selects() {
        let m = vec![vec![Q::int(2), Q::int(1)], vec![Q::int(1), Q::int(1)]];
        let inv = invert(&m).unwrap();
        assert_eq!(inv[0][0], Q::int(1));
        assert_eq!(inv[0][1], Q::int(-1));
        assert_eq!(inv[1][1], Q::int(2));
        let rows = vec![vec![Q::int(1), Q::int(1)], vec![Q::int(2), Q::int(2)], vec![Q::int(0), Q::int(1)]];
        assert_eq!(select_rows(&rows, &[0, 1, 2], 2), Some(vec![0, 2]));
        assert_eq!(select_rows(&rows, &[0, 1], 2), None);
    }
}
