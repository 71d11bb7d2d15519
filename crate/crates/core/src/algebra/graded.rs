//! Sparse truncated series in weighted variables with λ-polynomial coefficients.
//!
//! Variables are identified by a positive label equal to their weight:
//! `t_i` has label `i`, and `u_{w}` (a gap variable) has label `w`. A series
//! with cutoff `W` is exact for every monomial of weight `≤ W`; nothing of
//! higher weight is stored.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_traits::One;
use smallvec::SmallVec;

use super::poly::{LambdaPolynomial, Signature};
use super::rational::{format_rational_short, int, Rational};
use super::univariate::{self, SeriesOps};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Family {
    /// KP times `t_1, t_2, …`.
    T,
    /// Abelian coordinates `u_{w_1}, …, u_{w_g}`, labelled by the gap.
    U,
}

impl Family {
    pub fn symbol(self) -> char {
        match self {
            Family::T => 't',
            Family::U => 'u',
        }
    }
}

/// A monomial `Π x_l^{e_l}`, stored as `(label, exponent)` pairs sorted by label.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct VarMonomial(SmallVec<[(u16, u16); 4]>);

impl VarMonomial {
    pub fn one() -> Self {
        VarMonomial(SmallVec::new())
    }

    pub fn var(label: u16) -> Self {
        Self::from_pairs([(label, 1)])
    }

    pub fn from_pairs(pairs: impl IntoIterator<Item = (u16, u16)>) -> Self {
        let mut map: BTreeMap<u16, u16> = BTreeMap::new();
        for (l, e) in pairs {
            *map.entry(l).or_default() += e;
        }
        VarMonomial(map.into_iter().filter(|&(_, e)| e > 0).collect())
    }

    pub fn factors(&self) -> &[(u16, u16)] {
        &self.0
    }

    pub fn is_one(&self) -> bool {
        self.0.is_empty()
    }

    pub fn weight(&self) -> i64 {
        self.0.iter().map(|&(l, e)| l as i64 * e as i64).sum()
    }

    pub fn exponent(&self, label: u16) -> u16 {
        self.0
            .iter()
            .find(|(l, _)| *l == label)
            .map_or(0, |&(_, e)| e)
    }

    pub fn mul(&self, other: &Self) -> Self {
        Self::from_pairs(self.0.iter().chain(other.0.iter()).copied())
    }

    /// `∂/∂x_label` of this monomial as `(multiplier, monomial)`.
    pub fn derivative(&self, label: u16) -> Option<(u16, Self)> {
        let e = self.exponent(label);
        if e == 0 {
            return None;
        }
        let rest = self
            .0
            .iter()
            .map(|&(l, k)| if l == label { (l, k - 1) } else { (l, k) });
        Some((e, Self::from_pairs(rest)))
    }

    /// Total degree `Σ e_l`.
    pub fn degree(&self) -> u32 {
        self.0.iter().map(|&(_, e)| e as u32).sum()
    }
}

impl fmt::Display for VarMonomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "1");
        }
        for (k, (l, e)) in self.0.iter().enumerate() {
            if k > 0 {
                write!(f, "*")?;
            }
            if *e == 1 {
                write!(f, "x{l}")?;
            } else {
                write!(f, "x{l}^{e}")?;
            }
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GradedSeries {
    family: Family,
    cutoff: i64,
    terms: BTreeMap<VarMonomial, LambdaPolynomial>,
}

impl GradedSeries {
    pub fn zero(family: Family, cutoff: i64) -> Self {
        GradedSeries {
            family,
            cutoff,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(family: Family, value: LambdaPolynomial, cutoff: i64) -> Self {
        Self::from_terms(family, cutoff, [(VarMonomial::one(), value)])
    }

    pub fn one(family: Family, cutoff: i64) -> Self {
        Self::constant(family, LambdaPolynomial::one(), cutoff)
    }

    pub fn var(family: Family, label: u16, cutoff: i64) -> Self {
        Self::from_terms(family, cutoff, [(VarMonomial::var(label), LambdaPolynomial::one())])
    }

    /// Collects terms, dropping those above the cutoff.
    pub fn from_terms(
        family: Family,
        cutoff: i64,
        terms: impl IntoIterator<Item = (VarMonomial, LambdaPolynomial)>,
    ) -> Self {
        let mut out = Self::zero(family, cutoff);
        for (m, c) in terms {
            out.add_term(m, &c);
        }
        out
    }

    pub fn family(&self) -> Family {
        self.family
    }

    pub fn cutoff(&self) -> i64 {
        self.cutoff
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&VarMonomial, &LambdaPolynomial)> {
        self.terms.iter()
    }

    pub fn add_term(&mut self, monomial: VarMonomial, coeff: &LambdaPolynomial) {
        if coeff.is_zero() || monomial.weight() > self.cutoff {
            return;
        }
        match self.terms.entry(monomial) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(coeff.clone());
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                *o.get_mut() += coeff;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn coeff(&self, monomial: &VarMonomial) -> Result<LambdaPolynomial> {
        let w = monomial.weight();
        if w > self.cutoff {
            return Err(Error::BeyondTruncation {
                exponent: w,
                order: self.cutoff,
            });
        }
        Ok(self.terms.get(monomial).cloned().unwrap_or_default())
    }

    /// Lowest weight present, or `cutoff + 1` when nothing is known to be nonzero.
    pub fn valuation(&self) -> i64 {
        self.terms
            .keys()
            .map(VarMonomial::weight)
            .min()
            .unwrap_or(self.cutoff + 1)
    }

    /// Terms of exactly the given weight.
    pub fn component(&self, weight: i64) -> Self {
        Self::from_terms(
            self.family,
            self.cutoff,
            self.terms
                .iter()
                .filter(|(m, _)| m.weight() == weight)
                .map(|(m, c)| (m.clone(), c.clone())),
        )
    }

    pub fn truncate(&self, cutoff: i64) -> Self {
        let cutoff = cutoff.min(self.cutoff);
        Self::from_terms(
            self.family,
            cutoff,
            self.terms.iter().map(|(m, c)| (m.clone(), c.clone())),
        )
    }

    fn check_family(&self, other: &Self) {
        assert_eq!(
            self.family, other.family,
            "graded series of different variable families combined"
        );
    }

    pub fn add(&self, other: &Self) -> Self {
        self.check_family(other);
        let mut out = self.truncate(other.cutoff);
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c);
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        self.scale(&int(-1))
    }

    pub fn scale(&self, factor: &Rational) -> Self {
        Self::from_terms(
            self.family,
            self.cutoff,
            self.terms.iter().map(|(m, c)| (m.clone(), c.scale(factor))),
        )
    }

    pub fn scale_poly(&self, factor: &LambdaPolynomial) -> Self {
        Self::from_terms(
            self.family,
            self.cutoff,
            self.terms.iter().map(|(m, c)| (m.clone(), c * factor)),
        )
    }

    /// Product, exact through `min(W₁ + v₂, W₂ + v₁)`.
    pub fn mul(&self, other: &Self) -> Self {
        self.mul_capped(other, i64::MAX)
    }

    /// Product with the result cutoff additionally capped at `cap`.
    pub fn mul_capped(&self, other: &Self, cap: i64) -> Self {
        self.check_family(other);
        let cutoff = (self.cutoff + other.valuation())
            .min(other.cutoff + self.valuation())
            .min(cap);
        let mut acc: BTreeMap<VarMonomial, LambdaPolynomial> = BTreeMap::new();
        let rhs: Vec<(&VarMonomial, i64, &LambdaPolynomial)> = other
            .terms
            .iter()
            .map(|(m, c)| (m, m.weight(), c))
            .collect();
        for (ma, ca) in &self.terms {
            let wa = ma.weight();
            for &(mb, wb, cb) in &rhs {
                if wa + wb > cutoff {
                    continue;
                }
                *acc.entry(ma.mul(mb)).or_default() += &(ca * cb);
            }
        }
        acc.retain(|_, c| !c.is_zero());
        GradedSeries {
            family: self.family,
            cutoff,
            terms: acc,
        }
    }

    pub fn pow(&self, exp: u32) -> Self {
        self.pow_capped(exp, i64::MAX)
    }

    pub fn pow_capped(&self, exp: u32, cap: i64) -> Self {
        let mut acc = Self::one(self.family, cap.min(self.natural_power_cutoff(exp)));
        for _ in 0..exp {
            acc = acc.mul_capped(self, cap);
        }
        acc
    }

    fn natural_power_cutoff(&self, exp: u32) -> i64 {
        if exp == 0 {
            return i64::MAX / 4;
        }
        let v = self.valuation().min(self.cutoff + 1);
        self.cutoff + (exp as i64 - 1) * v
    }

    /// `∂/∂x_label`.
    pub fn derivative(&self, label: u16) -> Self {
        let mut out = Self::zero(self.family, self.cutoff - label as i64);
        for (m, c) in &self.terms {
            if let Some((k, dm)) = m.derivative(label) {
                out.add_term(dm, &c.scale(&int(k as i64)));
            }
        }
        out
    }

    /// Sets every listed variable to zero.
    pub fn set_zero(&self, labels: &BTreeSet<u16>) -> Self {
        Self::from_terms(
            self.family,
            self.cutoff,
            self.terms
                .iter()
                .filter(|(m, _)| m.factors().iter().all(|(l, _)| !labels.contains(l)))
                .map(|(m, c)| (m.clone(), c.clone())),
        )
    }

    /// Labels of variables occurring in some term.
    pub fn variables(&self) -> BTreeSet<u16> {
        self.terms
            .keys()
            .flat_map(|m| m.factors().iter().map(|&(l, _)| l))
            .collect()
    }

    /// Substitutes `x_l ↦ images[l]` (a series in `family`); variables without
    /// an image are set to zero.
    ///
    /// Every image must have valuation at least its label, so that a source
    /// term of weight `w` only feeds result terms of weight `≥ w`. The result is
    /// exact through `min(cap, source cutoff, image-product exactness)`.
    pub fn substitute(
        &self,
        family: Family,
        images: &BTreeMap<u16, GradedSeries>,
        cap: i64,
    ) -> Result<Self> {
        for (&label, image) in images {
            if image.family != family {
                return Err(Error::InvalidInput("substitution family mismatch".into()));
            }
            if image.valuation() < label as i64 {
                return Err(Error::InvalidInput(format!(
                    "substitution for x{label} lowers weight (valuation {})",
                    image.valuation()
                )));
            }
        }
        let cutoff = cap.min(self.cutoff);
        let mut powers: BTreeMap<(u16, u16), GradedSeries> = BTreeMap::new();
        let mut out = Self::zero(family, cutoff);
        let mut exact = cutoff;
        for (m, c) in &self.terms {
            let mut prod = Self::constant(family, c.clone(), cutoff);
            let mut vanished = false;
            for &(label, e) in m.factors() {
                let Some(image) = images.get(&label) else {
                    vanished = true;
                    break;
                };
                let p = powers
                    .entry((label, e))
                    .or_insert_with(|| image.pow_capped(e as u32, cutoff));
                prod = prod.mul_capped(p, cutoff);
            }
            if vanished {
                continue;
            }
            exact = exact.min(prod.cutoff);
            for (pm, pc) in prod.terms {
                out.add_term(pm, &pc);
            }
        }
        Ok(out.truncate(exact))
    }

    /// The set of values `weight(monomial) − λ-degree(coefficient term)`.
    pub fn homogeneity_scan(&self, sig: Signature) -> BTreeSet<i64> {
        let mut out = BTreeSet::new();
        for (m, c) in &self.terms {
            let w = m.weight();
            for (lm, _) in c.terms() {
                out.insert(w - lm.degree(sig));
            }
        }
        out
    }

    /// First term whose total weight differs from `total`, if any.
    pub fn first_inhomogeneous(
        &self,
        sig: Signature,
        total: i64,
    ) -> Option<(VarMonomial, LambdaPolynomial)> {
        self.terms.iter().find_map(|(m, c)| {
            let w = m.weight();
            let bad = c.terms().any(|(lm, _)| w - lm.degree(sig) != total);
            bad.then(|| (m.clone(), c.clone()))
        })
    }

    pub fn map_coeffs(&self, f: impl Fn(&LambdaPolynomial) -> LambdaPolynomial) -> Self {
        Self::from_terms(
            self.family,
            self.cutoff,
            self.terms.iter().map(|(m, c)| (m.clone(), f(c))),
        )
    }

    /// Reinterprets the variables as belonging to another family (labels kept).
    pub fn relabel_family(&self, family: Family) -> Self {
        GradedSeries {
            family,
            cutoff: self.cutoff,
            terms: self.terms.clone(),
        }
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

    fn unit_remainder(&self) -> Result<Self> {
        let c0 = self.coeff(&VarMonomial::one())?;
        if !c0.is_one() {
            return Err(Error::LeadingNotOne);
        }
        Ok(self.sub(&Self::one(self.family, self.cutoff)))
    }
}

impl SeriesOps for GradedSeries {
    fn one_like(&self) -> Self {
        Self::one(self.family, self.cutoff)
    }
    fn add_series(&self, other: &Self) -> Self {
        self.add(other)
    }
    fn mul_series(&self, other: &Self) -> Self {
        self.mul_capped(other, self.cutoff.min(other.cutoff))
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

impl fmt::Display for GradedSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sym = self.family.symbol();
        let mut terms: Vec<_> = self.terms.iter().collect();
        terms.sort_by_key(|(m, _)| (m.weight(), (*m).clone()));
        let mut first = true;
        for (m, c) in terms {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            let coeff = match c.as_constant() {
                Some(r) if r.is_one() => String::new(),
                Some(r) => format!("{}*", format_rational_short(&r)),
                None => format!("({c})*"),
            };
            if m.is_one() {
                match c.as_constant() {
                    Some(r) => write!(f, "{}", format_rational_short(&r))?,
                    None => write!(f, "({c})")?,
                }
            } else {
                let mono = m.to_string().replace('x', &sym.to_string());
                write!(f, "{coeff}{mono}")?;
            }
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}
