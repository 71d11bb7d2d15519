//! Polynomials over ℚ in the curve parameters `λ_ij`.
//!
//! A monomial is a sparse exponent list sorted by `(i, j)`, so the canonical
//! ordering of parameters is lexicographic in their indices. Zero coefficients
//! are purged on every operation.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};

use num_traits::{One, Zero};
use smallvec::SmallVec;

use super::rational::{format_rational_short, Rational};

/// The pair `(n, s)` of an (n,s)-curve; fixes the degree of every parameter.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Signature {
    pub n: u32,
    pub s: u32,
}

impl Signature {
    pub fn new(n: u32, s: u32) -> Self {
        Signature { n, s }
    }

    /// Whether `λ_ij` is an admissible coefficient: `ni + sj < ns`, `j < n`.
    pub fn admits(&self, param: Param) -> bool {
        let (i, j) = (param.i as u64, param.j as u64);
        let (n, s) = (self.n as u64, self.s as u64);
        j < n && n * i + s * j < n * s
    }

    /// All admissible parameters in canonical order.
    pub fn params(&self) -> Vec<Param> {
        let mut out = Vec::new();
        for i in 0..self.s {
            for j in 0..self.n {
                let p = Param::new(i as u16, j as u16);
                if self.admits(p) {
                    out.push(p);
                }
            }
        }
        out
    }

    /// `deg λ_ij = ns − ni − sj`.
    pub fn param_degree(&self, param: Param) -> i64 {
        let (n, s) = (self.n as i64, self.s as i64);
        n * s - n * param.i as i64 - s * param.j as i64
    }
}

/// The curve coefficient `λ_ij`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Param {
    pub i: u16,
    pub j: u16,
}

impl Param {
    pub const fn new(i: u16, j: u16) -> Self {
        Param { i, j }
    }
}

impl fmt::Display for Param {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "l{}_{}", self.i, self.j)
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LambdaMonomial(SmallVec<[(Param, u32); 4]>);

impl LambdaMonomial {
    pub fn one() -> Self {
        LambdaMonomial(SmallVec::new())
    }

    pub fn var(param: Param) -> Self {
        let mut v = SmallVec::new();
        v.push((param, 1));
        LambdaMonomial(v)
    }

    /// Builds a monomial from arbitrary `(param, exponent)` pairs.
    pub fn from_pairs(pairs: impl IntoIterator<Item = (Param, u32)>) -> Self {
        let mut map: BTreeMap<Param, u32> = BTreeMap::new();
        for (p, e) in pairs {
            *map.entry(p).or_default() += e;
        }
        LambdaMonomial(map.into_iter().filter(|&(_, e)| e > 0).collect())
    }

    pub fn is_one(&self) -> bool {
        self.0.is_empty()
    }

    pub fn factors(&self) -> &[(Param, u32)] {
        &self.0
    }

    pub fn exponent(&self, param: Param) -> u32 {
        self.0
            .iter()
            .find(|(p, _)| *p == param)
            .map_or(0, |&(_, e)| e)
    }

    pub fn degree(&self, sig: Signature) -> i64 {
        self.0
            .iter()
            .map(|&(p, e)| sig.param_degree(p) * e as i64)
            .sum()
    }

    pub fn mul(&self, other: &Self) -> Self {
        let (a, b) = (&self.0, &other.0);
        let mut out = SmallVec::with_capacity(a.len() + b.len());
        let (mut x, mut y) = (0, 0);
        while x < a.len() && y < b.len() {
            match a[x].0.cmp(&b[y].0) {
                std::cmp::Ordering::Less => {
                    out.push(a[x]);
                    x += 1;
                }
                std::cmp::Ordering::Greater => {
                    out.push(b[y]);
                    y += 1;
                }
                std::cmp::Ordering::Equal => {
                    out.push((a[x].0, a[x].1 + b[y].1));
                    x += 1;
                    y += 1;
                }
            }
        }
        out.extend_from_slice(&a[x..]);
        out.extend_from_slice(&b[y..]);
        LambdaMonomial(out)
    }

    pub fn total_degree(&self) -> u32 {
        self.0.iter().map(|&(_, e)| e).sum()
    }

    /// Graded lexicographic comparison, earlier parameters dominating.
    pub fn grlex_cmp(&self, other: &Self) -> std::cmp::Ordering {
        use std::cmp::Ordering;
        let by_degree = self.total_degree().cmp(&other.total_degree());
        if by_degree != Ordering::Equal {
            return by_degree;
        }
        let (a, b) = (&self.0, &other.0);
        let (mut x, mut y) = (0, 0);
        loop {
            match (a.get(x), b.get(y)) {
                (None, None) => return Ordering::Equal,
                (Some(_), None) => return Ordering::Greater,
                (None, Some(_)) => return Ordering::Less,
                (Some(&(pa, ea)), Some(&(pb, eb))) => match pa.cmp(&pb) {
                    Ordering::Less => return Ordering::Greater,
                    Ordering::Greater => return Ordering::Less,
                    Ordering::Equal => {
                        if ea != eb {
                            return ea.cmp(&eb);
                        }
                        x += 1;
                        y += 1;
                    }
                },
            }
        }
    }

    /// `self / other` when `other` divides `self`.
    pub fn div(&self, other: &Self) -> Option<Self> {
        let mut out = SmallVec::new();
        let mut y = 0;
        for &(p, e) in &self.0 {
            if y < other.0.len() && other.0[y].0 < p {
                return None;
            }
            if y < other.0.len() && other.0[y].0 == p {
                let f = other.0[y].1;
                y += 1;
                if f > e {
                    return None;
                }
                if f < e {
                    out.push((p, e - f));
                }
            } else {
                out.push((p, e));
            }
        }
        if y < other.0.len() {
            return None;
        }
        Some(LambdaMonomial(out))
    }
}

impl fmt::Display for LambdaMonomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "1");
        }
        for (k, (p, e)) in self.0.iter().enumerate() {
            if k > 0 {
                write!(f, "*")?;
            }
            if *e == 1 {
                write!(f, "{p}")?;
            } else {
                write!(f, "{p}^{e}")?;
            }
        }
        Ok(())
    }
}

/// A polynomial in the `λ_ij` with exact rational coefficients.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct LambdaPolynomial {
    terms: BTreeMap<LambdaMonomial, Rational>,
}

impl LambdaPolynomial {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::constant(Rational::one())
    }

    pub fn constant(value: Rational) -> Self {
        Self::term(LambdaMonomial::one(), value)
    }

    pub fn var(param: Param) -> Self {
        Self::term(LambdaMonomial::var(param), Rational::one())
    }

    pub fn term(monomial: LambdaMonomial, coeff: Rational) -> Self {
        let mut terms = BTreeMap::new();
        if !coeff.is_zero() {
            terms.insert(monomial, coeff);
        }
        LambdaPolynomial { terms }
    }

    pub fn from_terms(terms: impl IntoIterator<Item = (LambdaMonomial, Rational)>) -> Self {
        let mut out = Self::zero();
        for (m, c) in terms {
            out.add_term(m, c);
        }
        out
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&LambdaMonomial, &Rational)> {
        self.terms.iter()
    }

    /// The value if this polynomial is constant (zero included).
    pub fn as_constant(&self) -> Option<Rational> {
        match self.terms.len() {
            0 => Some(Rational::zero()),
            1 => self
                .terms
                .get(&LambdaMonomial::one())
                .cloned(),
            _ => None,
        }
    }

    pub fn is_one(&self) -> bool {
        self.as_constant().is_some_and(|c| c.is_one())
    }

    pub fn coefficient(&self, monomial: &LambdaMonomial) -> Rational {
        self.terms.get(monomial).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn add_term(&mut self, monomial: LambdaMonomial, coeff: Rational) {
        if coeff.is_zero() {
            return;
        }
        match self.terms.entry(monomial) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(coeff);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                *o.get_mut() += coeff;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn scale(&self, factor: &Rational) -> Self {
        if factor.is_zero() {
            return Self::zero();
        }
        LambdaPolynomial {
            terms: self
                .terms
                .iter()
                .map(|(m, c)| (m.clone(), c * factor))
                .collect(),
        }
    }

    pub fn pow(&self, exp: u32) -> Self {
        let mut acc = Self::one();
        for _ in 0..exp {
            acc = &acc * self;
        }
        acc
    }

    /// The set of λ-degrees of the monomials present.
    pub fn degrees(&self, sig: Signature) -> BTreeSet<i64> {
        self.terms.keys().map(|m| m.degree(sig)).collect()
    }

    /// The common degree of all terms; `None` for zero or inhomogeneous input.
    pub fn homogeneous_degree(&self, sig: Signature) -> Option<i64> {
        let degrees = self.degrees(sig);
        if degrees.len() == 1 {
            degrees.into_iter().next()
        } else {
            None
        }
    }

    /// Whether every term has λ-degree `degree` (vacuously true for zero).
    pub fn is_homogeneous_of(&self, sig: Signature, degree: i64) -> bool {
        self.terms.keys().all(|m| m.degree(sig) == degree)
    }

    pub fn params(&self) -> BTreeSet<Param> {
        self.terms
            .keys()
            .flat_map(|m| m.factors().iter().map(|&(p, _)| p))
            .collect()
    }

    /// Substitutes rational values for the listed parameters.
    pub fn specialize(&self, values: &BTreeMap<Param, Rational>) -> Self {
        let mut out = Self::zero();
        for (m, c) in &self.terms {
            let mut coeff = c.clone();
            let mut rest = Vec::new();
            for &(p, e) in m.factors() {
                match values.get(&p) {
                    Some(v) => {
                        let mut pw = Rational::one();
                        for _ in 0..e {
                            pw *= v;
                        }
                        coeff *= pw;
                    }
                    None => rest.push((p, e)),
                }
            }
            out.add_term(LambdaMonomial::from_pairs(rest), coeff);
        }
        out
    }

    /// Leading term in graded-lex order (a genuine monomial order).
    fn leading(&self) -> Option<(&LambdaMonomial, &Rational)> {
        self.terms.iter().max_by(|a, b| a.0.grlex_cmp(b.0))
    }

    /// Exact quotient `self / divisor`; `None` if the division leaves a remainder.
    pub fn div_exact(&self, divisor: &Self) -> Option<Self> {
        if divisor.is_zero() {
            return None;
        }
        if let Some(c) = divisor.as_constant() {
            return Some(self.scale(&c.recip()));
        }
        let (dm, dc) = divisor.leading()?;
        let mut rem = self.clone();
        let mut quot = Self::zero();
        while let Some((rm, rc)) = rem.leading() {
            let qm = rm.div(dm)?;
            let qc = rc / dc;
            let step = Self::term(qm, qc);
            rem = &rem - &(&step * divisor);
            quot = &quot + &step;
        }
        Some(quot)
    }
}

impl From<Rational> for LambdaPolynomial {
    fn from(value: Rational) -> Self {
        Self::constant(value)
    }
}

impl Add for &LambdaPolynomial {
    type Output = LambdaPolynomial;
    fn add(self, rhs: &LambdaPolynomial) -> LambdaPolynomial {
        let mut out = self.clone();
        out += rhs;
        out
    }
}

impl Sub for &LambdaPolynomial {
    type Output = LambdaPolynomial;
    fn sub(self, rhs: &LambdaPolynomial) -> LambdaPolynomial {
        let mut out = self.clone();
        out -= rhs;
        out
    }
}

impl Neg for &LambdaPolynomial {
    type Output = LambdaPolynomial;
    fn neg(self) -> LambdaPolynomial {
        LambdaPolynomial {
            terms: self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect(),
        }
    }
}

impl AddAssign<&LambdaPolynomial> for LambdaPolynomial {
    fn add_assign(&mut self, rhs: &LambdaPolynomial) {
        for (m, c) in &rhs.terms {
            self.add_term(m.clone(), c.clone());
        }
    }
}

impl SubAssign<&LambdaPolynomial> for LambdaPolynomial {
    fn sub_assign(&mut self, rhs: &LambdaPolynomial) {
        for (m, c) in &rhs.terms {
            self.add_term(m.clone(), -c);
        }
    }
}

impl Mul for &LambdaPolynomial {
    type Output = LambdaPolynomial;
    fn mul(self, rhs: &LambdaPolynomial) -> LambdaPolynomial {
        if self.is_zero() || rhs.is_zero() {
            return LambdaPolynomial::zero();
        }
        if let Some(c) = self.as_constant() {
            return rhs.scale(&c);
        }
        if let Some(c) = rhs.as_constant() {
            return self.scale(&c);
        }
        let mut out = LambdaPolynomial::zero();
        for (ma, ca) in &self.terms {
            for (mb, cb) in &rhs.terms {
                out.add_term(ma.mul(mb), ca * cb);
            }
        }
        out
    }
}

impl fmt::Display for LambdaPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (k, (m, c)) in self.terms.iter().enumerate() {
            if k > 0 {
                write!(f, " + ")?;
            }
            if m.is_one() {
                write!(f, "{}", format_rational_short(c))?;
            } else if c.is_one() {
                write!(f, "{m}")?;
            } else {
                write!(f, "({})*{m}", format_rational_short(c))?;
            }
        }
        Ok(())
    }
}
