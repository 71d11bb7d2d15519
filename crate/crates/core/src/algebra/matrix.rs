//! Determinants over `ℚ[λ]`.

use crate::algebra::LambdaPolynomial;
use crate::error::{Error, Result};

pub type PolyMatrix = Vec<Vec<LambdaPolynomial>>;

/// Cofactor expansion up to this size, Bareiss above it.
const COFACTOR_LIMIT: usize = 4;

pub fn determinant(matrix: &PolyMatrix) -> Result<LambdaPolynomial> {
    let n = matrix.len();
    if matrix.iter().any(|row| row.len() != n) {
        return Err(Error::Internal("determinant of a non-square matrix".into()));
    }
    if n <= COFACTOR_LIMIT {
        let rows: Vec<usize> = (0..n).collect();
        Ok(cofactor(matrix, &rows, (1usize << n) - 1))
    } else {
        bareiss(matrix.clone())
    }
}

/// Laplace expansion along the first remaining row; `cols` is a bitmask.
fn cofactor(m: &PolyMatrix, rows: &[usize], cols: usize) -> LambdaPolynomial {
    let Some((&r, rest)) = rows.split_first() else {
        return LambdaPolynomial::one();
    };
    let mut acc = LambdaPolynomial::zero();
    let mut sign = true;
    for c in 0..m.len() {
        if cols & (1 << c) == 0 {
            continue;
        }
        if !m[r][c].is_zero() {
            let minor = cofactor(m, rest, cols & !(1 << c));
            let term = &m[r][c] * &minor;
            if sign {
                acc += &term;
            } else {
                acc -= &term;
            }
        }
        sign = !sign;
    }
    acc
}

/// Fraction-free elimination; every intermediate division is exact.
pub fn bareiss(mut m: PolyMatrix) -> Result<LambdaPolynomial> {
    let n = m.len();
    if n == 0 {
        return Ok(LambdaPolynomial::one());
    }
    let mut negate = false;
    let mut prev = LambdaPolynomial::one();
    for k in 0..n - 1 {
        if m[k][k].is_zero() {
            let Some(swap) = (k + 1..n).find(|&i| !m[i][k].is_zero()) else {
                return Ok(LambdaPolynomial::zero());
            };
            m.swap(k, swap);
            negate = !negate;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let num = &(&m[k][k] * &m[i][j]) - &(&m[i][k] * &m[k][j]);
                m[i][j] = num
                    .div_exact(&prev)
                    .ok_or_else(|| Error::Internal("Bareiss division not exact".into()))?;
            }
        }
        prev = m[k][k].clone();
    }
    let det = m[n - 1][n - 1].clone();
    Ok(if negate { -&det } else { det })
}

/// Inverse of an upper unitriangular matrix, by back substitution.
pub fn unitriangular_inverse(m: &PolyMatrix) -> Result<PolyMatrix> {
    let n = m.len();
    for (i, row) in m.iter().enumerate() {
        if row.len() != n || !row[i].is_one() || row[..i].iter().any(|e| !e.is_zero()) {
            return Err(Error::NotInvertible);
        }
    }
    let mut inv = vec![vec![LambdaPolynomial::zero(); n]; n];
    for j in 0..n {
        inv[j][j] = LambdaPolynomial::one();
        for i in (0..j).rev() {
            let mut acc = LambdaPolynomial::zero();
            for k in i + 1..=j {
                acc -= &(&m[i][k] * &inv[k][j]);
            }
            inv[i][j] = acc;
        }
    }
    Ok(inv)
}

pub fn transpose(m: &PolyMatrix) -> PolyMatrix {
    let cols = m.first().map_or(0, |r| r.len());
    (0..cols).map(|j| m.iter().map(|r| r[j].clone()).collect()).collect()
}

pub fn matmul(a: &PolyMatrix, b: &PolyMatrix) -> PolyMatrix {
    let inner = b.len();
    let cols = b.first().map_or(0, |r| r.len());
    a.iter()
        .map(|row| {
            (0..cols)
                .map(|j| {
                    let mut acc = LambdaPolynomial::zero();
                    for k in 0..inner {
                        if !row[k].is_zero() && !b[k][j].is_zero() {
                            acc += &(&row[k] * &b[k][j]);
                        }
                    }
                    acc
                })
                .collect()
        })
        .collect()
}
