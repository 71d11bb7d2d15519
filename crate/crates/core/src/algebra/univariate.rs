//! Univariate power series `Σ a_k r^k` applied to a series `r` of positive
//! valuation. Shared by the Laurent and graded series kinds.

use num_traits::{One, Zero};

use super::rational::{binomial_rational, int, rat, Rational};
use crate::error::{Error, Result};

pub trait SeriesOps: Sized + Clone {
    fn one_like(&self) -> Self;
    fn add_series(&self, other: &Self) -> Self;
    fn mul_series(&self, other: &Self) -> Self;
    fn scale_series(&self, factor: &Rational) -> Self;
    fn is_zero_series(&self) -> bool;
    fn positive_valuation(&self) -> bool;
}

/// `Σ_k a(k)·r^k`, stopping once `r^k` vanishes within the truncation.
pub fn compose<S: SeriesOps>(r: &S, a: &dyn Fn(u32) -> Rational) -> Result<S> {
    if !r.positive_valuation() {
        return Err(Error::Internal(
            "series composition requires positive valuation".into(),
        ));
    }
    let mut acc = r.one_like().scale_series(&a(0));
    let mut power = r.one_like();
    let mut k = 1;
    loop {
        power = power.mul_series(r);
        if power.is_zero_series() {
            break;
        }
        let c = a(k);
        if !c.is_zero() {
            acc = acc.add_series(&power.scale_series(&c));
        }
        k += 1;
    }
    Ok(acc)
}

/// `exp(r)` for `r` without constant term.
pub fn exp<S: SeriesOps>(r: &S) -> Result<S> {
    if !r.positive_valuation() {
        return Err(Error::ExpConstantTerm);
    }
    let mut fact = Rational::one();
    let coeffs: Vec<Rational> = (0..64u32)
        .map(|k| {
            if k > 0 {
                fact = &fact * int(k as i64);
            }
            fact.recip()
        })
        .collect();
    compose(r, &|k| {
        coeffs
            .get(k as usize)
            .cloned()
            .unwrap_or_else(|| inverse_factorial(k))
    })
}

fn inverse_factorial(k: u32) -> Rational {
    Rational::from_integer(super::rational::factorial(k)).recip()
}

/// `log(1 + r)`.
pub fn log<S: SeriesOps>(r: &S) -> Result<S> {
    compose(r, &|k| {
        if k == 0 {
            Rational::zero()
        } else if k % 2 == 1 {
            rat(1, k as i64)
        } else {
            rat(-1, k as i64)
        }
    })
}

/// `(1 + r)^{1/2}`.
pub fn sqrt<S: SeriesOps>(r: &S) -> Result<S> {
    let half = rat(1, 2);
    compose(r, &|k| binomial_rational(&half, k))
}
