//! The point of the Sato Grassmannian attached to the affine ring.
//!
//! `Σ a_m z^m ↦ Σ a_m e_{m+g−1}`; column `j` of the frame is the image of the
//! `j`-th basis monomial `f_j`, with pivot (lowest nonzero row) `g − 1 − w*_j`.

use rayon::prelude::*;

use crate::algebra::matrix::{bareiss, determinant, PolyMatrix};
use crate::algebra::{LambdaPolynomial, Signature};
use crate::curve::{BasisMonomial, NSCurve};
use crate::error::{Error, Result};
use crate::schur::Partition;

#[derive(Clone, Debug)]
pub struct FrameColumn {
    pub basis: BasisMonomial,
    pub pivot: i64,
    /// `entries[k]` is the entry in row `pivot + k`, through the top row.
    pub entries: Vec<LambdaPolynomial>,
}

#[derive(Clone, Debug)]
pub struct FrameMatrix {
    sig: Signature,
    genus: u32,
    lambda: Partition,
    top_row: i64,
    normalized: bool,
    columns: Vec<FrameColumn>,
}

impl FrameMatrix {
    pub fn signature(&self) -> Signature {
        self.sig
    }

    pub fn genus(&self) -> u32 {
        self.genus
    }

    /// `λ(n,s)`, the partition of the frame's Schubert cell.
    pub fn lambda(&self) -> &Partition {
        &self.lambda
    }

    /// Highest row index known exactly.
    pub fn top_row(&self) -> i64 {
        self.top_row
    }

    pub fn is_normalized(&self) -> bool {
        self.normalized
    }

    pub fn columns(&self) -> &[FrameColumn] {
        &self.columns
    }

    pub fn column_count(&self) -> usize {
        self.columns.len()
    }

    /// Entry at row `row`, column `col` (1-based).
    pub fn entry(&self, row: i64, col: usize) -> Result<LambdaPolynomial> {
        let c = self
            .columns
            .get(col - 1)
            .ok_or_else(|| Error::InvalidInput(format!("frame has no column {col}")))?;
        if row > self.top_row {
            return Err(Error::BeyondTruncation {
                exponent: row,
                order: self.top_row,
            });
        }
        if row < c.pivot {
            return Ok(LambdaPolynomial::zero());
        }
        Ok(c.entries[(row - c.pivot) as usize].clone())
    }

    /// Unit pivots, zeros below them, strictly decreasing pivot rows and, once
    /// normalized, zeros at every other column's pivot row.
    pub fn structural_check(&self) -> Result<()> {
        let mut last = i64::MAX;
        for (k, c) in self.columns.iter().enumerate() {
            if c.pivot >= last {
                return Err(Error::Internal(format!("pivot of column {} not decreasing", k + 1)));
            }
            last = c.pivot;
            if !c.entries.first().is_some_and(|e| e.is_one()) {
                return Err(Error::Internal(format!("pivot of column {} is not 1", k + 1)));
            }
            if self.normalized {
                for other in &self.columns[..k] {
                    if !c.entries[(other.pivot - c.pivot) as usize].is_zero() {
                        return Err(Error::Internal(format!(
                            "column {} not reduced at row {}",
                            k + 1,
                            other.pivot
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    /// The `m×m` minor at rows `μ_i − i` (`i = 1..m`) and columns `f_1..f_m`.
    pub fn minor(&self, mu: &Partition, m: usize) -> Result<PolyMatrix> {
        if m > self.columns.len() {
            return Err(Error::CutoffTooSmall {
                cutoff: self.columns.len() as i64,
                required: m as i64,
            });
        }
        (1..=m)
            .map(|i| {
                let row = mu.part(i) as i64 - i as i64;
                (1..=m).map(|j| self.entry(row, j)).collect()
            })
            .collect()
    }

    /// Minor size used for `ξ_μ`.
    pub fn minor_size(&self, mu: &Partition) -> usize {
        mu.len().max(self.genus as usize)
    }

    /// `ξ_μ` with the minor size chosen explicitly.
    pub fn plucker_with_size(&self, mu: &Partition, m: usize) -> Result<LambdaPolynomial> {
        if self.normalized {
            self.plucker_normalized(mu, m)
        } else {
            bareiss(self.minor(mu, m)?)
        }
    }

    /// Rows that are pivots of included columns are unit rows in a normalized
    /// frame; they are expanded away before the remaining block is eliminated.
    fn plucker_normalized(&self, mu: &Partition, m: usize) -> Result<LambdaPolynomial> {
        if m > self.columns.len() {
            return Err(Error::CutoffTooSmall {
                cutoff: self.columns.len() as i64,
                required: m as i64,
            });
        }
        let rows: Vec<i64> = (1..=m).map(|i| mu.part(i) as i64 - i as i64).collect();
        let mut free_rows = Vec::new();
        let mut used_cols = vec![false; m];
        // Permutation sign of matching unit rows to their columns.
        let mut pairs: Vec<(usize, usize)> = Vec::new();
        for (r, &row) in rows.iter().enumerate() {
            if let Some(c) = self.pivot_column(row) {
                if c >= m {
                    return Ok(LambdaPolynomial::zero());
                }
                used_cols[c] = true;
                pairs.push((r, c));
            } else {
                free_rows.push(r);
            }
        }
        let free_cols: Vec<usize> = (0..m).filter(|&c| !used_cols[c]).collect();
        let mut perm = vec![0usize; m];
        for &(r, c) in &pairs {
            perm[r] = c;
        }
        for (k, &r) in free_rows.iter().enumerate() {
            perm[r] = free_cols[k];
        }
        let block: PolyMatrix = free_rows
            .iter()
            .map(|&r| {
                free_cols
                    .iter()
                    .map(|&c| self.entry(rows[r], c + 1))
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<_>>()?;
        let det = determinant(&block)?;
        Ok(if permutation_is_odd(&perm) { -&det } else { det })
    }

    fn pivot_column(&self, row: i64) -> Option<usize> {
        // Pivots strictly decrease, so binary search on the reversed order.
        self.columns
            .binary_search_by(|c| row.cmp(&c.pivot))
            .ok()
    }

    /// `ξ_μ` with `m = max(ℓ(μ), g)`.
    pub fn plucker(&self, mu: &Partition) -> Result<LambdaPolynomial> {
        self.plucker_with_size(mu, self.minor_size(mu))
    }

    /// `ξ_μ` for every `μ`, in the input order, computed in parallel.
    pub fn plucker_all(&self, mus: &[Partition]) -> Result<Vec<(Partition, LambdaPolynomial)>> {
        mus.par_iter()
            .map(|mu| Ok((mu.clone(), self.plucker(mu)?)))
            .collect()
    }
}

fn permutation_is_odd(perm: &[usize]) -> bool {
    let mut seen = vec![false; perm.len()];
    let mut odd = false;
    for start in 0..perm.len() {
        let mut len = 0;
        let mut k = start;
        while !seen[k] {
            seen[k] = true;
            k = perm[k];
            len += 1;
        }
        if len > 0 && len % 2 == 0 {
            odd = !odd;
        }
    }
    odd
}

/// Number of frame columns needed for partitions of weight ≤ `W`.
pub fn columns_needed(curve: &NSCurve, weight: u32) -> usize {
    let lambda = curve.partition_ns();
    (curve.genus() + weight.saturating_sub(lambda.weight()) + 1) as usize
}

/// The raw frame through weight `W`: rows up to `W + g`.
pub fn build_frame(curve: &NSCurve, weight: u32) -> Result<FrameMatrix> {
    let lambda = curve.partition_ns();
    if weight < lambda.weight() {
        return Err(Error::CutoffTooSmall {
            cutoff: weight as i64,
            required: lambda.weight() as i64,
        });
    }
    let g = curve.genus() as i64;
    build_frame_window(curve, columns_needed(curve, weight), weight as i64 + g)
}

/// The raw frame restricted to its first `count` columns and rows up to
/// `top_row`. Its entries agree with every larger frame, before and after
/// normalization.
pub fn build_frame_window(curve: &NSCurve, count: usize, top_row: i64) -> Result<FrameMatrix> {
    let lambda = curve.partition_ns();
    let g = curve.genus() as i64;
    let basis = curve.basis_monomials(count);
    let z_top = top_row - g + 1;
    let max_order = basis.last().map_or(0, |b| b.order) as i64;
    let expansion = curve.expansion(z_top + max_order)?;
    let columns = basis
        .into_iter()
        .map(|b| {
            let series = expansion.monomial(b.m1, b.m2)?;
            let pivot = g - 1 - b.order as i64;
            let entries = (pivot..=top_row)
                .map(|row| series.coeff(row - g + 1))
                .collect::<Result<Vec<_>>>()?;
            Ok(FrameColumn {
                basis: b,
                pivot,
                entries,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let frame = FrameMatrix {
        sig: curve.signature(),
        genus: curve.genus(),
        lambda,
        top_row,
        normalized: false,
        columns,
    };
    frame.structural_check()?;
    Ok(frame)
}

/// Clears, in each column, the entries at the pivot rows of earlier columns by
/// subtracting multiples of those columns.
pub fn normalize_frame(frame: &FrameMatrix) -> FrameMatrix {
    let mut columns = frame.columns.clone();
    for j in 1..columns.len() {
        let (done, rest) = columns.split_at_mut(j);
        let col = &mut rest[0];
        for k in (0..j).rev() {
            let other = &done[k];
            let at = (other.pivot - col.pivot) as usize;
            let factor = col.entries[at].clone();
            if factor.is_zero() {
                continue;
            }
            for (idx, e) in other.entries.iter().enumerate() {
                if !e.is_zero() {
                    let target = at + idx;
                    col.entries[target] -= &(&factor * e);
                }
            }
        }
    }
    FrameMatrix {
        columns,
        normalized: true,
        ..frame.clone()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::Param;
    use crate::schur::{enumerate_superpartitions, partitions_of};

    #[test]
    fn windows_agree_with_the_full_frame() {
        let c = NSCurve::symbolic(2, 5).unwrap();
        let full = normalize_frame(&build_frame(&c, 9).unwrap());
        let window = normalize_frame(&build_frame_window(&c, 5, 4).unwrap());
        for col in 1..=5 {
            for row in -12..=4 {
                assert_eq!(window.entry(row, col).unwrap(), full.entry(row, col).unwrap());
            }
        }
        assert!(window.entry(5, 1).is_err());
    }

    #[test]
    fn degenerate_frame_is_unit() {
        let c = NSCurve::degenerate(3, 4).unwrap();
        let f = build_frame(&c, 8).unwrap();
        for col in f.columns() {
            assert!(col.entries[0].is_one());
            assert!(col.entries[1..].iter().all(|e| e.is_zero()));
        }
        let n = normalize_frame(&f);
        n.structural_check().unwrap();
    }

    #[test]
    fn elliptic_x_column() {
        let c = NSCurve::symbolic(2, 3).unwrap();
        let f = build_frame(&c, 5).unwrap();
        assert_eq!(f.columns()[1].pivot, -2);
        assert!(f.columns()[1].entries[1..].iter().all(|e| e.is_zero()));
    }

    #[test]
    fn entry_degrees() {
        let c = NSCurve::symbolic(2, 5).unwrap();
        let f = build_frame(&c, 8).unwrap();
        let sg = c.semigroup();
        let g = c.genus() as i64;
        for (k, col) in f.columns().iter().enumerate() {
            for (off, e) in col.entries.iter().enumerate() {
                let row = col.pivot + off as i64;
                let deg = row - g + 1 + sg.nongap(k + 1) as i64;
                assert!(e.is_homogeneous_of(c.signature(), deg));
            }
        }
    }

    #[test]
    fn leading_plucker_is_one() {
        for (n, s) in [(2, 3), (2, 5), (3, 4)] {
            let c = NSCurve::symbolic(n, s).unwrap();
            let f = normalize_frame(&build_frame(&c, 8).unwrap());
            assert!(f.plucker(&c.partition_ns()).unwrap().is_one());
        }
    }

    #[test]
    fn genus_two_first_coordinate() {
        // y ↦ y − λ₂₁x²/2 is a unipotent column operation, so λ₂₁ enters only
        // through λ₄₀ + λ₂₁²/4 and the degree-one coordinate vanishes.
        let c = NSCurve::symbolic(2, 5).unwrap();
        let f = normalize_frame(&build_frame(&c, 8).unwrap());
        let xi = f.plucker(&Partition::new(vec![3, 1]).unwrap()).unwrap();
        let l21 = crate::algebra::LambdaMonomial::var(Param::new(2, 1));
        assert_eq!(xi, LambdaPolynomial::var(Param::new(2, 1)).scale(&xi.coefficient(&l21)));
        assert!(xi.is_zero());
    }

    #[test]
    fn shift_of_y_preserves_the_point() {
        use crate::algebra::rational::int;
        use crate::curve::Coefficient;
        let curve = |l21: i64, l40: i64| {
            let mut m = std::collections::BTreeMap::new();
            m.insert(Param::new(2, 1), Coefficient::Value(int(l21)));
            m.insert(Param::new(4, 0), Coefficient::Value(int(l40)));
            m.insert(Param::new(0, 0), Coefficient::Value(int(3)));
            NSCurve::new(2, 5, m).unwrap()
        };
        let a = normalize_frame(&build_frame(&curve(2, 0), 9).unwrap());
        let b = normalize_frame(&build_frame(&curve(0, 1), 9).unwrap());
        let mus = enumerate_superpartitions(&Partition::new(vec![2, 1]).unwrap(), 9);
        assert_eq!(a.plucker_all(&mus).unwrap(), b.plucker_all(&mus).unwrap());
        assert!(a.plucker_all(&mus).unwrap().iter().any(|(mu, x)| mu.weight() > 3 && !x.is_zero()));
    }

    #[test]
    fn raw_and_normalized_agree() {
        let c = NSCurve::symbolic(2, 5).unwrap();
        let raw = build_frame(&c, 8).unwrap();
        let norm = normalize_frame(&raw);
        norm.structural_check().unwrap();
        for w in 0..=8 {
            for mu in partitions_of(w) {
                if norm.minor_size(&mu) > norm.column_count() {
                    continue;
                }
                assert_eq!(raw.plucker(&mu).unwrap(), norm.plucker(&mu).unwrap(), "{mu}");
            }
        }
    }

    #[test]
    fn containment_and_homogeneity() {
        let c = NSCurve::symbolic(3, 4).unwrap();
        let lambda = c.partition_ns();
        let f = normalize_frame(&build_frame(&c, 8).unwrap());
        for w in 0..=8 {
            for mu in partitions_of(w) {
                if f.minor_size(&mu) > f.column_count() {
                    continue;
                }
                let xi = f.plucker(&mu).unwrap();
                if !mu.contains(&lambda) {
                    assert!(xi.is_zero(), "{mu}");
                } else {
                    let deg = (mu.weight() - lambda.weight()) as i64;
                    assert!(xi.is_homogeneous_of(c.signature(), deg), "{mu}");
                }
            }
        }
    }

    #[test]
    fn minor_size_independence() {
        let c = NSCurve::symbolic(2, 5).unwrap();
        let raw = build_frame(&c, 9).unwrap();
        let norm = normalize_frame(&raw);
        for mu in enumerate_superpartitions(&c.partition_ns(), 8) {
            let m = norm.minor_size(&mu);
            if m + 2 > norm.column_count() {
                continue;
            }
            let a = norm.plucker_with_size(&mu, m).unwrap();
            assert_eq!(a, norm.plucker_with_size(&mu, m + 2).unwrap());
            assert_eq!(a, raw.plucker_with_size(&mu, m + 1).unwrap());
        }
    }

    #[test]
    fn permutation_parity() {
        assert!(!permutation_is_odd(&[0, 1, 2]));
        assert!(permutation_is_odd(&[1, 0, 2]));
        assert!(!permutation_is_odd(&[1, 2, 0]));
    }
}
