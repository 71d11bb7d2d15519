//! Two-variable Laurent expansions `Σ c_{ab} z₁^a z₂^b` in the region `|z₁| < |z₂|`.

use std::collections::BTreeMap;

use super::laurent::LaurentSeries;
use super::poly::LambdaPolynomial;
use super::rational::int;
use crate::error::{Error, Result};

/// Coefficients of `z₁^a z₂^b dz₁dz₂`, exact for `a ≤ order1` and `b ≤ order2`.
///
/// Only the region `|z₁| < |z₂|` is represented: for fixed `a` the
/// z₂-exponents are bounded below, z₁-exponents are bounded below globally.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BiSeries {
    order1: i64,
    order2: i64,
    terms: BTreeMap<(i64, i64), LambdaPolynomial>,
}

impl BiSeries {
    pub fn zero(order1: i64, order2: i64) -> Self {
        BiSeries {
            order1,
            order2,
            terms: BTreeMap::new(),
        }
    }

    /// `1/(z₁−z₂)² = Σ_{k≥1} k z₁^{k−1} z₂^{−k−1}`, for `k ≤ order1 + 1`.
    pub fn diagonal_kernel(order1: i64, order2: i64) -> Self {
        let mut out = Self::zero(order1, order2);
        for k in 1..=order1 + 1 {
            out.add_term(k - 1, -k - 1, &LambdaPolynomial::constant(int(k)));
        }
        out
    }

    /// `f(z₁)·g(z₂)`, truncated at the orders of the factors.
    pub fn tensor(f: &LaurentSeries, g: &LaurentSeries) -> Self {
        let mut out = Self::zero(f.order(), g.order());
        for (a, ca) in f.terms() {
            for (b, cb) in g.terms() {
                out.add_term(a, b, &(ca * cb));
            }
        }
        out
    }

    pub fn order1(&self) -> i64 {
        self.order1
    }

    pub fn order2(&self) -> i64 {
        self.order2
    }

    pub fn add_term(&mut self, a: i64, b: i64, c: &LambdaPolynomial) {
        if c.is_zero() || a > self.order1 || b > self.order2 {
            return;
        }
        let e = self.terms.entry((a, b)).or_default();
        *e += c;
        if e.is_zero() {
            self.terms.remove(&(a, b));
        }
    }

    pub fn coeff(&self, a: i64, b: i64) -> Result<LambdaPolynomial> {
        if a > self.order1 {
            return Err(Error::BeyondTruncation {
                exponent: a,
                order: self.order1,
            });
        }
        if b > self.order2 {
            return Err(Error::BeyondTruncation {
                exponent: b,
                order: self.order2,
            });
        }
        Ok(self.terms.get(&(a, b)).cloned().unwrap_or_default())
    }

    pub fn terms(&self) -> impl Iterator<Item = (&(i64, i64), &LambdaPolynomial)> {
        self.terms.iter()
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = Self::zero(self.order1.min(other.order1), self.order2.min(other.order2));
        for (&(a, b), c) in self.terms.iter().chain(other.terms.iter()) {
            out.add_term(a, b, c);
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(&int(-1)))
    }

    pub fn scale(&self, factor: &super::Rational) -> Self {
        let mut out = Self::zero(self.order1, self.order2);
        for (&(a, b), c) in &self.terms {
            out.add_term(a, b, &c.scale(factor));
        }
        out
    }

    /// The z₂-series multiplying `z₁^a`.
    pub fn row(&self, a: i64) -> LaurentSeries {
        let entries: Vec<(i64, &LambdaPolynomial)> = self
            .terms
            .range((a, i64::MIN)..=(a, i64::MAX))
            .map(|(&(_, b), c)| (b, c))
            .collect();
        match entries.first() {
            None => LaurentSeries::zero(self.order2),
            Some(&(low, _)) => {
                let high = entries.last().map_or(low, |e| e.0);
                let mut coeffs = vec![LambdaPolynomial::zero(); (high - low + 1) as usize];
                for (b, c) in entries {
                    coeffs[(b - low) as usize] = c.clone();
                }
                LaurentSeries::from_coeffs(low, coeffs, self.order2)
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kernel_coefficients() {
        let k = BiSeries::diagonal_kernel(3, 2);
        assert_eq!(k.coeff(0, -2).unwrap(), LambdaPolynomial::one());
        assert_eq!(k.coeff(3, -5).unwrap(), LambdaPolynomial::constant(int(4)));
        assert!(k.coeff(1, -2).unwrap().is_zero());
        assert!(k.coeff(4, -6).is_err());
    }
}
