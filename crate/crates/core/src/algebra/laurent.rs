//! Truncated Laurent series in one local variable with λ-polynomial coefficients.
//!
//! A series carries an explicit truncation order `N`: coefficients of
//! `z^k` for `k ≤ N` are exact, everything above is unknown. Asking for a
//! coefficient above `N` is an error rather than an implicit zero.

use std::fmt;

use num_traits::Zero;

use super::poly::LambdaPolynomial;
use super::rational::{int, Rational};
use super::univariate::{self, SeriesOps};
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LaurentSeries {
    /// Exponent of `coeffs[0]`.
    low: i64,
    /// Truncation order: coefficients with exponent `≤ order` are exact.
    order: i64,
    coeffs: Vec<LambdaPolynomial>,
}

impl LaurentSeries {
    /// The zero series known exactly through `order`.
    pub fn zero(order: i64) -> Self {
        LaurentSeries {
            low: order + 1,
            order,
            coeffs: Vec::new(),
        }
    }

    pub fn one(order: i64) -> Self {
        Self::monomial(0, LambdaPolynomial::one(), order)
    }

    /// `c·z^exponent + O(z^{order+1})`.
    pub fn monomial(exponent: i64, coeff: LambdaPolynomial, order: i64) -> Self {
        Self::from_coeffs(exponent, vec![coeff], order)
    }

    /// Builds `Σ coeffs[k] z^{low+k}`, dropping anything above `order`.
    pub fn from_coeffs(low: i64, mut coeffs: Vec<LambdaPolynomial>, order: i64) -> Self {
        let keep = (order - low + 1).max(0) as usize;
        coeffs.truncate(keep);
        let mut s = LaurentSeries { low, order, coeffs };
        s.normalize();
        s
    }

    fn normalize(&mut self) {
        let lead = self.coeffs.iter().position(|c| !c.is_zero());
        match lead {
            None => {
                self.coeffs.clear();
                self.low = self.order + 1;
            }
            Some(k) => {
                self.coeffs.drain(..k);
                self.low += k as i64;
                while self.coeffs.last().is_some_and(|c| c.is_zero()) {
                    self.coeffs.pop();
                }
            }
        }
    }

    pub fn order(&self) -> i64 {
        self.order
    }

    /// Lowest exponent with a nonzero coefficient, or `order + 1` if none is known.
    pub fn valuation(&self) -> i64 {
        if self.coeffs.is_empty() {
            self.order + 1
        } else {
            self.low
        }
    }

    /// Highest exponent with a stored nonzero coefficient.
    pub fn top(&self) -> i64 {
        self.low + self.coeffs.len() as i64 - 1
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn coeff(&self, exponent: i64) -> Result<LambdaPolynomial> {
        if exponent > self.order {
            return Err(Error::BeyondTruncation {
                exponent,
                order: self.order,
            });
        }
        Ok(self.coeff_ref(exponent).cloned().unwrap_or_default())
    }

    fn coeff_ref(&self, exponent: i64) -> Option<&LambdaPolynomial> {
        if exponent < self.low {
            return None;
        }
        self.coeffs.get((exponent - self.low) as usize)
    }

    /// Nonzero `(exponent, coefficient)` pairs in increasing exponent order.
    pub fn terms(&self) -> impl Iterator<Item = (i64, &LambdaPolynomial)> {
        self.coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(move |(k, c)| (self.low + k as i64, c))
    }

    pub fn truncate(&self, order: i64) -> Self {
        let order = order.min(self.order);
        Self::from_coeffs(self.low, self.coeffs.clone(), order)
    }

    pub fn add(&self, other: &Self) -> Self {
        let order = self.order.min(other.order);
        let low = self.valuation().min(other.valuation()).min(order + 1);
        let coeffs = (low..=order)
            .map(|k| {
                let mut c = self.coeff_ref(k).cloned().unwrap_or_default();
                if let Some(d) = other.coeff_ref(k) {
                    c += d;
                }
                c
            })
            .collect();
        Self::from_coeffs(low, coeffs, order)
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        self.scale(&int(-1))
    }

    pub fn scale(&self, factor: &Rational) -> Self {
        Self::from_coeffs(
            self.low,
            self.coeffs.iter().map(|c| c.scale(factor)).collect(),
            self.order,
        )
    }

    pub fn scale_poly(&self, factor: &LambdaPolynomial) -> Self {
        Self::from_coeffs(
            self.low,
            self.coeffs.iter().map(|c| c * factor).collect(),
            self.order,
        )
    }

    /// Multiplication by `z^k`.
    pub fn shift(&self, k: i64) -> Self {
        LaurentSeries {
            low: self.low + k,
            order: self.order + k,
            coeffs: self.coeffs.clone(),
        }
    }

    /// Product, exact through `min(N₁ + v₂, N₂ + v₁)`.
    pub fn mul(&self, other: &Self) -> Self {
        let order = (self.order + other.valuation()).min(other.order + self.valuation());
        self.mul_to(other, order)
    }

    fn mul_to(&self, other: &Self, order: i64) -> Self {
        if self.is_zero() || other.is_zero() {
            return Self::zero(order);
        }
        let low = self.low + other.low;
        if order < low {
            return Self::zero(order);
        }
        let len = (order - low + 1) as usize;
        let mut coeffs = vec![LambdaPolynomial::zero(); len];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() || i >= len {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                if i + j >= len {
                    break;
                }
                if !b.is_zero() {
                    coeffs[i + j] += &(a * b);
                }
            }
        }
        Self::from_coeffs(low, coeffs, order)
    }

    pub fn pow(&self, exp: u32) -> Self {
        if exp == 0 {
            return Self::one(self.order - self.valuation());
        }
        let mut acc = self.clone();
        for _ in 1..exp {
            acc = acc.mul(self);
        }
        acc
    }

    /// Leading coefficient as a nonzero rational constant, if it is one.
    fn leading_constant(&self) -> Option<Rational> {
        let c = self.coeffs.first()?.as_constant()?;
        (!c.is_zero()).then_some(c)
    }

    /// `1/self` for a series whose leading coefficient is a nonzero constant.
    pub fn inverse(&self) -> Result<Self> {
        let lead = self.leading_constant().ok_or(Error::NotInvertible)?;
        let v = self.valuation();
        // self = lead·z^v·(1 + r)
        let unit = self.shift(-v).scale(&lead.recip());
        let r = unit.sub(&Self::one(unit.order));
        let inv = univariate::compose(&r, &|k| int(if k % 2 == 0 { 1 } else { -1 }))?;
        Ok(inv.scale(&lead.recip()).shift(-v))
    }

    pub fn div(&self, other: &Self) -> Result<Self> {
        Ok(self.mul(&other.inverse()?))
    }

    /// `d/dz`.
    pub fn derivative(&self) -> Self {
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(k, c)| c.scale(&int(self.low + k as i64)))
            .collect();
        Self::from_coeffs(self.low - 1, coeffs, self.order - 1)
    }

    /// Coefficient of `z^{-1}`.
    pub fn residue(&self) -> Result<LambdaPolynomial> {
        self.coeff(-1)
    }

    /// Term-wise antiderivative with zero constant of integration.
    pub fn integrate_no_log(&self) -> Result<Self> {
        if self.order >= -1 && !self.coeff(-1)?.is_zero() {
            return Err(Error::LogarithmicTerm);
        }
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(k, c)| {
                let e = self.low + k as i64;
                if e == -1 {
                    LambdaPolynomial::zero()
                } else {
                    c.scale(&Rational::new((1).into(), (e + 1).into()))
                }
            })
            .collect();
        Ok(Self::from_coeffs(self.low + 1, coeffs, self.order + 1))
    }

    /// The Laurent polynomial of terms with negative exponent, kept at the
    /// same truncation order.
    pub fn polar_part(&self) -> Self {
        let coeffs = (self.low..0)
            .map(|k| self.coeff_ref(k).cloned().unwrap_or_default())
            .collect();
        Self::from_coeffs(self.low, coeffs, self.order)
    }

    pub fn exp(&self) -> Result<Self> {
        if self.valuation() <= 0 {
            return Err(Error::ExpConstantTerm);
        }
        univariate::exp(self)
    }

    pub fn log(&self) -> Result<Self> {
        univariate::log(&self.unit_remainder()?)
    }

    pub fn sqrt(&self) -> Result<Self> {
        univariate::sqrt(&self.unit_remainder()?)
    }

    /// `self − 1`, checking that `self = 1 + O(z)`.
    fn unit_remainder(&self) -> Result<Self> {
        if self.valuation() != 0 || !self.coeff(0)?.is_one() {
            return Err(Error::LeadingNotOne);
        }
        Ok(self.sub(&Self::one(self.order)))
    }

    pub fn map_coeffs(&self, f: impl Fn(&LambdaPolynomial) -> LambdaPolynomial) -> Self {
        Self::from_coeffs(self.low, self.coeffs.iter().map(f).collect(), self.order)
    }
}

impl SeriesOps for LaurentSeries {
    fn one_like(&self) -> Self {
        Self::one(self.order)
    }
    fn add_series(&self, other: &Self) -> Self {
        self.add(other)
    }
    fn mul_series(&self, other: &Self) -> Self {
        let natural = (self.order + other.valuation()).min(other.order + self.valuation());
        self.mul_to(other, natural.min(self.order.min(other.order)))
    }
    fn scale_series(&self, factor: &Rational) -> Self {
        self.scale(factor)
    }
    fn is_zero_series(&self) -> bool {
        self.is_zero()
    }
    fn positive_valuation(&self) -> bool {
        self.valuation() >= 1
    }
}

impl fmt::Display for LaurentSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (e, c) in self.terms() {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(f, "({c})*z^{e}")?;
        }
        if first {
            write!(f, "0")?;
        }
        write!(f, " + O(z^{})", self.order + 1)
    }
}

impl Default for LaurentSeries {
    fn default() -> Self {
        Self::zero(0)
    }
}
