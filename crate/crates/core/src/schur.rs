//! Partitions, Maya-type ρ-sequences, the elementary polynomials `p_j(t)` and
//! Schur functions via Jacobi–Trudi.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use num_bigint::BigInt;
use num_traits::One;

use crate::algebra::rational::{factorial, int, Rational};
use crate::algebra::{Family, GradedSeries, LambdaPolynomial, VarMonomial};
use crate::error::{Error, Result};

/// A weakly decreasing list of positive parts; the empty list is the zero partition.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Partition(Vec<u32>);

impl Partition {
    pub fn new(mut parts: Vec<u32>) -> Result<Self> {
        while parts.last() == Some(&0) {
            parts.pop();
        }
        if parts.windows(2).any(|w| w[0] < w[1]) || parts.contains(&0) {
            return Err(Error::InvalidInput(format!(
                "not a partition: {parts:?}"
            )));
        }
        Ok(Partition(parts))
    }

    pub fn empty() -> Self {
        Partition(Vec::new())
    }

    pub fn parts(&self) -> &[u32] {
        &self.0
    }

    pub fn weight(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// `λ_i`, 1-based, zero past the length.
    pub fn part(&self, i: usize) -> u32 {
        if i == 0 {
            return 0;
        }
        self.0.get(i - 1).copied().unwrap_or(0)
    }

    /// Containment `self_i ≥ other_i` for all `i`.
    pub fn contains(&self, other: &Partition) -> bool {
        other.len() <= self.len() && other.0.iter().zip(&self.0).all(|(o, s)| s >= o)
    }

    pub fn conjugate(&self) -> Partition {
        let top = self.0.first().copied().unwrap_or(0);
        Partition(
            (1..=top)
                .map(|k| self.0.iter().filter(|&&p| p >= k).count() as u32)
                .collect(),
        )
    }
}

impl fmt::Display for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (k, p) in self.0.iter().enumerate() {
            if k > 0 {
                write!(f, ",")?;
            }
            write!(f, "{p}")?;
        }
        write!(f, ")")
    }
}

/// A strictly decreasing sequence `ρ(−1) > ρ(−2) > …` with `ρ(−i) = −i` for
/// large `i`. Stored as the prefix up to the last index where `ρ(−i) ≠ −i`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct RhoSequence {
    prefix: Vec<i64>,
}

impl RhoSequence {
    /// Validates a finite prefix; the identity tail is implied after it.
    pub fn new(prefix: Vec<i64>) -> Result<Self> {
        let len = prefix.len() as i64;
        let full: Vec<i64> = prefix.iter().copied().chain([-len - 1]).collect();
        if full.windows(2).any(|w| w[0] <= w[1]) {
            return Err(Error::InvalidInput(format!(
                "ρ-sequence must be strictly decreasing into the tail: {prefix:?}"
            )));
        }
        let mut prefix = prefix;
        while let Some(&last) = prefix.last() {
            if last == -(prefix.len() as i64) {
                prefix.pop();
            } else {
                break;
            }
        }
        Ok(RhoSequence { prefix })
    }

    /// `ρ(−i)` for `i ≥ 1`.
    pub fn at(&self, i: usize) -> i64 {
        self.prefix
            .get(i - 1)
            .copied()
            .unwrap_or(-(i as i64))
    }

    pub fn prefix(&self) -> &[i64] {
        &self.prefix
    }
}

/// `λ_i = ρ(−i) + i`.
pub fn partition_from_rho(rho: &RhoSequence) -> Partition {
    let parts = (1..=rho.prefix.len())
        .map(|i| (rho.at(i) + i as i64) as u32)
        .collect();
    Partition::new(parts).expect("a strictly decreasing ρ yields a partition")
}

/// `ρ(−i) = λ_i − i`.
pub fn rho_from_partition(lambda: &Partition) -> RhoSequence {
    RhoSequence::new(
        (1..=lambda.len())
            .map(|i| lambda.part(i) as i64 - i as i64)
            .collect(),
    )
    .expect("a partition yields a strictly decreasing ρ")
}

/// `p_0, …, p_W` defined by `exp(Σ t_i k^i) = Σ p_j(t) k^j`, in `t_1, …, t_M`.
///
/// Uses the recurrence `j·p_j = Σ_{i=1}^{j} i·t_i·p_{j−i}`.
pub fn p_polynomials(m: u32, w: u32) -> Result<Vec<GradedSeries>> {
    if m < w {
        return Err(Error::InvalidInput(format!(
            "p-polynomials need at least as many variables as the weight ({m} < {w})"
        )));
    }
    let cutoff = w as i64;
    let mut out: Vec<GradedSeries> = vec![GradedSeries::one(Family::T, cutoff)];
    for j in 1..=w {
        let mut acc = GradedSeries::zero(Family::T, cutoff);
        for i in 1..=j {
            let ti = GradedSeries::var(Family::T, i as u16, cutoff).scale(&int(i as i64));
            acc = acc.add(&ti.mul_capped(&out[(j - i) as usize], cutoff));
        }
        out.push(acc.scale(&Rational::new(BigInt::one(), BigInt::from(j))));
    }
    Ok(out)
}

/// Schur function `s_λ(t) = det(p_{λ_i−i+j}(t))`.
///
/// Evaluated with the ℓ(λ)×ℓ(λ) Jacobi–Trudi matrix, or with the dual
/// λ₁×λ₁ form `det(e_{λ'_i−i+j})`, `e_j(t) = (−1)^j p_j(−t)`, whichever is
/// smaller. The result carries cutoff `w`.
pub fn schur(lambda: &Partition, w: u32) -> Result<GradedSeries> {
    let weight = lambda.weight();
    if weight > w {
        return Err(Error::CutoffTooSmall {
            cutoff: w as i64,
            required: weight as i64,
        });
    }
    let p = p_polynomials(weight.max(1), weight)?;
    let conj = lambda.conjugate();
    let det = if conj.len() < lambda.len() {
        let e: Vec<GradedSeries> = p
            .iter()
            .enumerate()
            .map(|(j, pj)| negate_times(pj, j % 2 == 1))
            .collect();
        jacobi_trudi(&conj, &e, weight)
    } else {
        jacobi_trudi(lambda, &p, weight)
    };
    Ok(GradedSeries::from_terms(
        Family::T,
        w as i64,
        det.terms().map(|(m, c)| (m.clone(), c.clone())),
    ))
}

/// Schur function using only the ℓ(λ)-sized matrix over `p_j`.
pub fn schur_row_form(lambda: &Partition, w: u32) -> Result<GradedSeries> {
    let weight = lambda.weight();
    let p = p_polynomials(weight.max(1), weight)?;
    let det = jacobi_trudi(lambda, &p, weight);
    Ok(GradedSeries::from_terms(
        Family::T,
        w as i64,
        det.terms().map(|(m, c)| (m.clone(), c.clone())),
    ))
}

/// `(−1)^j p_j(−t)`: flip the sign of each term by its degree parity, and by `j`.
fn negate_times(pj: &GradedSeries, odd_index: bool) -> GradedSeries {
    let terms = pj.terms().map(|(m, c)| {
        let flip = (m.degree() % 2 == 1) ^ odd_index;
        (m.clone(), if flip { -c } else { c.clone() })
    });
    GradedSeries::from_terms(Family::T, pj.cutoff(), terms)
}

fn jacobi_trudi(lambda: &Partition, h: &[GradedSeries], weight: u32) -> GradedSeries {
    let l = lambda.len();
    let cutoff = weight as i64;
    let entry = |i: usize, j: usize| -> Option<&GradedSeries> {
        let idx = lambda.part(i + 1) as i64 - i as i64 + j as i64;
        if idx < 0 {
            None
        } else {
            h.get(idx as usize)
        }
    };
    // Laplace expansion along rows with minors memoized by the set of used columns.
    let mut memo: HashMap<u32, GradedSeries> = HashMap::new();
    memo.insert(0, GradedSeries::one(Family::T, cutoff));
    for row in (0..l).rev() {
        let depth = l - row;
        let mut next: HashMap<u32, GradedSeries> = HashMap::new();
        for mask in subsets_of_size(l, depth) {
            let mut acc = GradedSeries::zero(Family::T, cutoff);
            let mut sign_pos = 0;
            for col in 0..l {
                if mask & (1 << col) == 0 {
                    continue;
                }
                let rest = mask & !(1 << col);
                if let (Some(e), Some(minor)) = (entry(row, col), memo.get(&rest)) {
                    if !e.is_zero() && !minor.is_zero() {
                        let term = e.mul_capped(minor, cutoff);
                        acc = if sign_pos % 2 == 0 {
                            acc.add(&term)
                        } else {
                            acc.sub(&term)
                        };
                    }
                }
                sign_pos += 1;
            }
            if !acc.is_zero() {
                next.insert(mask, acc);
            }
        }
        memo = next;
    }
    memo.remove(&((1u32 << l) - 1))
        .unwrap_or_else(|| GradedSeries::zero(Family::T, cutoff))
}

fn subsets_of_size(n: usize, k: usize) -> impl Iterator<Item = u32> {
    (0u32..(1u32 << n)).filter(move |m| m.count_ones() as usize == k)
}

/// `d_λ = Π_{i<j}(μ_i − μ_j) / Π μ_i!` with `μ_i = λ_i + ℓ − i`.
pub fn d_coefficient(lambda: &Partition) -> Rational {
    d_coefficient_with_length(lambda, lambda.len())
}

/// As [`d_coefficient`], with an explicit `l ≥ ℓ(λ)`.
pub fn d_coefficient_with_length(lambda: &Partition, l: usize) -> Rational {
    assert!(l >= lambda.len());
    let mu: Vec<i64> = (1..=l)
        .map(|i| lambda.part(i) as i64 + l as i64 - i as i64)
        .collect();
    let mut num = BigInt::one();
    for i in 0..l {
        for j in i + 1..l {
            num *= BigInt::from(mu[i] - mu[j]);
        }
    }
    let den = mu
        .iter()
        .fold(BigInt::one(), |acc, &m| acc * factorial(m as u32));
    Rational::new(num, den)
}

/// All partitions of `n`, largest first part first (reverse lexicographic).
pub fn partitions_of(n: u32) -> Vec<Partition> {
    fn rec(rem: u32, max: u32, cur: &mut Vec<u32>, out: &mut Vec<Partition>) {
        if rem == 0 {
            out.push(Partition(cur.clone()));
            return;
        }
        for p in (1..=rem.min(max)).rev() {
            cur.push(p);
            rec(rem - p, p, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(n, n, &mut Vec::new(), &mut out);
    out
}

/// All `μ ⊇ λ₀` with `|μ| ≤ w`, ordered by weight, then reverse
/// lexicographically within a weight.
pub fn enumerate_superpartitions(lambda0: &Partition, w: u32) -> Vec<Partition> {
    fn rec(
        idx: usize,
        rem: u32,
        max: u32,
        floor: &Partition,
        cur: &mut Vec<u32>,
        out: &mut Vec<Partition>,
    ) {
        let need = floor.part(idx + 1);
        if rem == 0 {
            if need == 0 {
                out.push(Partition(cur.clone()));
            }
            return;
        }
        // Remaining floor parts must still fit.
        let floor_rest: u32 = floor.parts().iter().skip(idx + 1).sum();
        for p in (need.max(1)..=rem.min(max)).rev() {
            if rem - p < floor_rest {
                continue;
            }
            cur.push(p);
            rec(idx + 1, rem - p, p, floor, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    for weight in lambda0.weight()..=w {
        rec(0, weight, weight, lambda0, &mut Vec::new(), &mut out);
    }
    out
}

/// `s_λ(t_1, 0, 0, …)` read off as the coefficient of `t_1^{|λ|}`.
pub fn t1_coefficient(series: &GradedSeries, power: u32) -> LambdaPolynomial {
    series
        .coeff(&VarMonomial::from_pairs([(1, power as u16)]))
        .unwrap_or_default()
}

/// Sorted, deduplicated weights present in a list of partitions.
pub fn weights(partitions: &[Partition]) -> BTreeMap<u32, usize> {
    let mut out = BTreeMap::new();
    for p in partitions {
        *out.entry(p.weight()).or_default() += 1;
    }
    out
}
