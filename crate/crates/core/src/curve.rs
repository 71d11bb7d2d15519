//! (n,s)-curves `yⁿ = x^s + Σ_{ni+sj<ns} λ_ij x^i y^j`: gap sequence, monomial
//! basis of the affine ring, and exact expansions at the point at infinity in
//! the local coordinate `z` with `x = z^{−n}`, `y = z^{−s}(1 + O(z))`.
//!
//! The index condition is `ni + sj < ns`, so that `deg λ_ij = ns − ni − sj` is
//! positive. The transposed form `si + nj < ns` also appears in the literature;
//! it is not used here.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_integer::Integer;
use num_traits::Zero;

use crate::algebra::rational::{format_rational, int, parse_rational, Rational};
use crate::algebra::{LambdaPolynomial, LaurentSeries, Param, Signature};
use crate::error::{Error, Result};
use crate::schur::Partition;

/// A curve coefficient: a fixed rational or a free symbol.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Coefficient {
    Value(Rational),
    Symbolic,
}

impl FromStr for Coefficient {
    type Err = Error;
    fn from_str(text: &str) -> Result<Self> {
        if text.trim() == "sym" {
            Ok(Coefficient::Symbolic)
        } else {
            parse_rational(text).map(Coefficient::Value)
        }
    }
}

impl fmt::Display for Coefficient {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Coefficient::Value(v) => write!(f, "{}", format_rational(v)),
            Coefficient::Symbolic => write!(f, "sym"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct NSCurve {
    sig: Signature,
    coefficients: BTreeMap<Param, Coefficient>,
}

impl NSCurve {
    /// Validates `1 < n < s`, `gcd(n, s) = 1` and the index condition on every
    /// coefficient. Zero values are dropped; unlisted coefficients are zero.
    pub fn new(n: u32, s: u32, coefficients: BTreeMap<Param, Coefficient>) -> Result<Self> {
        if !(1 < n && n < s) {
            return Err(Error::InvalidCurve(format!("need 1 < n < s, got ({n},{s})")));
        }
        if n.gcd(&s) != 1 {
            return Err(Error::InvalidCurve(format!("gcd({n},{s}) ≠ 1")));
        }
        let sig = Signature::new(n, s);
        for p in coefficients.keys() {
            if !sig.admits(*p) {
                return Err(Error::InvalidCurve(format!(
                    "λ_{},{} violates ni+sj<ns, j<n for (n,s)=({n},{s})",
                    p.i, p.j
                )));
            }
        }
        let coefficients = coefficients
            .into_iter()
            .filter(|(_, c)| !matches!(c, Coefficient::Value(v) if v.is_zero()))
            .collect();
        Ok(NSCurve { sig, coefficients })
    }

    /// The curve `yⁿ = x^s` with every `λ_ij = 0`.
    pub fn degenerate(n: u32, s: u32) -> Result<Self> {
        Self::new(n, s, BTreeMap::new())
    }

    /// Every admissible coefficient symbolic.
    pub fn symbolic(n: u32, s: u32) -> Result<Self> {
        let sig = Signature::new(n, s);
        Self::new(
            n,
            s,
            sig.params()
                .into_iter()
                .map(|p| (p, Coefficient::Symbolic))
                .collect(),
        )
    }

    /// Only the listed coefficients symbolic, the rest zero.
    pub fn with_symbols(n: u32, s: u32, params: &[Param]) -> Result<Self> {
        Self::new(
            n,
            s,
            params.iter().map(|&p| (p, Coefficient::Symbolic)).collect(),
        )
    }

    pub fn signature(&self) -> Signature {
        self.sig
    }

    pub fn n(&self) -> u32 {
        self.sig.n
    }

    pub fn s(&self) -> u32 {
        self.sig.s
    }

    pub fn coefficients(&self) -> &BTreeMap<Param, Coefficient> {
        &self.coefficients
    }

    pub fn is_symbolic(&self) -> bool {
        self.coefficients
            .values()
            .any(|c| matches!(c, Coefficient::Symbolic))
    }

    /// Symbolic parameters in canonical order.
    pub fn symbols(&self) -> Vec<Param> {
        self.coefficients
            .iter()
            .filter(|(_, c)| matches!(c, Coefficient::Symbolic))
            .map(|(&p, _)| p)
            .collect()
    }

    /// Every nonzero coefficient is a free symbol, so all derived data is
    /// λ-homogeneous.
    pub fn is_homogeneous(&self) -> bool {
        self.coefficients
            .values()
            .all(|c| matches!(c, Coefficient::Symbolic))
    }

    pub fn coefficient(&self, param: Param) -> LambdaPolynomial {
        match self.coefficients.get(&param) {
            None => LambdaPolynomial::zero(),
            Some(Coefficient::Symbolic) => LambdaPolynomial::var(param),
            Some(Coefficient::Value(v)) => LambdaPolynomial::constant(v.clone()),
        }
    }

    /// Replaces the listed symbols by rational values.
    pub fn specialize(&self, values: &BTreeMap<Param, Rational>) -> Result<Self> {
        let coefficients = self
            .coefficients
            .iter()
            .map(|(&p, c)| match (c, values.get(&p)) {
                (Coefficient::Symbolic, Some(v)) => (p, Coefficient::Value(v.clone())),
                _ => (p, c.clone()),
            })
            .collect();
        Self::new(self.sig.n, self.sig.s, coefficients)
    }

    pub fn genus(&self) -> u32 {
        (self.sig.n - 1) * (self.sig.s - 1) / 2
    }

    pub fn semigroup(&self) -> WeierstrassSemigroup {
        WeierstrassSemigroup::new(self.sig.n, self.sig.s)
    }

    /// The first `count` monomials `x^{m₁}y^{m₂}` (`m₂ < n`) by increasing order.
    pub fn basis_monomials(&self, count: usize) -> Vec<BasisMonomial> {
        let (n, s) = (self.sig.n as u64, self.sig.s as u64);
        let mut out = Vec::with_capacity(count);
        let mut ord = 0u64;
        while out.len() < count {
            let found = (0..n).find(|&m2| ord >= s * m2 && (ord - s * m2) % n == 0);
            if let Some(m2) = found {
                out.push(BasisMonomial {
                    index: out.len() + 1,
                    m1: ((ord - s * m2) / n) as u32,
                    m2: m2 as u32,
                    order: ord as u32,
                });
            }
            ord += 1;
        }
        out
    }

    /// `λ(n,s) = (w_g, …, w_1) − (g−1, …, 0)`.
    pub fn partition_ns(&self) -> Partition {
        let sg = self.semigroup();
        let g = sg.genus as usize;
        let parts = (0..g)
            .map(|k| sg.gaps[g - 1 - k] - (g - 1 - k) as u32)
            .collect();
        Partition::new(parts).expect("gap sequence yields a partition")
    }

    /// Expansion data at ∞ with `v = z^s·y` known through `z^{v_order}`.
    pub fn expansion(&self, v_order: i64) -> Result<CurveExpansion> {
        CurveExpansion::new(self, v_order)
    }

    /// `y(z)` exact through `z^N`.
    pub fn y_expansion(&self, order: i64) -> Result<LaurentSeries> {
        Ok(self.expansion(order + self.sig.s as i64)?.y_power(1))
    }

    /// `x^{m₁}y^{m₂}` exact through `z^N`.
    pub fn expand_monomial(&self, m1: u32, m2: u32, order: i64) -> Result<LaurentSeries> {
        if m2 >= self.sig.n {
            return Err(Error::InvalidInput(format!(
                "basis monomials need m₂ < n, got m₂ = {m2}"
            )));
        }
        let ord = (self.sig.n * m1 + self.sig.s * m2) as i64;
        self.expansion(order + ord)?.monomial(m1, m2)
    }

    /// `∂f/∂y` on the local parametrization, exact through `z^N`.
    pub fn f_y_expansion(&self, order: i64) -> Result<LaurentSeries> {
        let lift = (self.sig.s * (self.sig.n - 1)) as i64;
        self.expansion(order + lift)?.f_y()
    }

    /// `f(x, y)` evaluated on series; used for residual checks.
    pub fn evaluate(&self, x: &LaurentSeries, y: &LaurentSeries) -> LaurentSeries {
        let n = self.sig.n;
        let mut out = y.pow(n).sub(&x.pow(self.sig.s));
        for (&p, _) in &self.coefficients {
            let term = x
                .pow(p.i as u32)
                .mul(&y.pow(p.j as u32))
                .scale_poly(&self.coefficient(p));
            out = out.sub(&term);
        }
        out
    }
}

impl fmt::Display for NSCurve {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.sig.n, self.sig.s)?;
        for (p, c) in &self.coefficients {
            write!(f, " {},{}={}", p.i, p.j, c)?;
        }
        Ok(())
    }
}

/// Gaps and non-gaps of the numerical semigroup `⟨n, s⟩`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WeierstrassSemigroup {
    pub genus: u32,
    pub gaps: Vec<u32>,
    /// `w*_1 < w*_2 < …` up to and including every value below `2g`.
    pub nongaps: Vec<u32>,
}

impl WeierstrassSemigroup {
    pub fn new(n: u32, s: u32) -> Self {
        let genus = (n - 1) * (s - 1) / 2;
        let limit = 2 * genus.max(1);
        let member = |k: u32| (0..=k / s).any(|b| (k - s * b) % n == 0);
        let (mut gaps, mut nongaps) = (Vec::new(), Vec::new());
        for k in 0..limit {
            if member(k) {
                nongaps.push(k);
            } else {
                gaps.push(k);
            }
        }
        WeierstrassSemigroup {
            genus,
            gaps,
            nongaps,
        }
    }

    /// `w*_i` for any `i ≥ 1`, using `w*_i = g − 1 + i` past the stored prefix.
    pub fn nongap(&self, i: usize) -> u32 {
        match self.nongaps.get(i - 1) {
            Some(&v) => v,
            None => self.genus - 1 + i as u32,
        }
    }

    pub fn is_gap(&self, k: u32) -> bool {
        self.gaps.binary_search(&k).is_ok()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct BasisMonomial {
    /// 1-based position `i` of `f_i`.
    pub index: usize,
    pub m1: u32,
    pub m2: u32,
    /// Pole order `n·m₁ + s·m₂` at ∞.
    pub order: u32,
}

impl fmt::Display for BasisMonomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.m1, self.m2) {
            (0, 0) => write!(f, "1"),
            (a, 0) => write!(f, "{}", power("x", a)),
            (0, b) => write!(f, "{}", power("y", b)),
            (a, b) => write!(f, "{}{}", power("x", a), power("y", b)),
        }
    }
}

fn power(sym: &str, e: u32) -> String {
    if e == 1 {
        sym.to_string()
    } else {
        format!("{sym}^{e}")
    }
}

/// Memoized local expansions at ∞.
///
/// `v = z^s·y` is known through `z^M`; consequently `x^{m₁}y^{m₂}` is exact
/// through `z^{M − ord}`.
#[derive(Clone, Debug)]
pub struct CurveExpansion {
    curve: NSCurve,
    v_order: i64,
    /// `v^k` for `k = 0..=n` (exact through `z^M`).
    v_powers: Vec<LaurentSeries>,
}

impl CurveExpansion {
    fn new(curve: &NSCurve, v_order: i64) -> Result<Self> {
        let v = solve_v(curve, v_order.max(0))?;
        let mut v_powers = vec![LaurentSeries::one(v.order())];
        for k in 1..=curve.n() {
            let next = v_powers[k as usize - 1].mul(&v);
            v_powers.push(next);
        }
        Ok(CurveExpansion {
            curve: curve.clone(),
            v_order: v.order(),
            v_powers,
        })
    }

    pub fn curve(&self) -> &NSCurve {
        &self.curve
    }

    pub fn v_order(&self) -> i64 {
        self.v_order
    }

    pub fn v(&self) -> &LaurentSeries {
        &self.v_powers[1]
    }

    fn v_power(&self, k: u32) -> LaurentSeries {
        if (k as usize) < self.v_powers.len() {
            return self.v_powers[k as usize].clone();
        }
        let mut acc = self.v_powers[self.v_powers.len() - 1].clone();
        for _ in self.v_powers.len() - 1..k as usize {
            acc = acc.mul(self.v());
        }
        acc
    }

    /// `y^k = z^{−ks} v^k`.
    pub fn y_power(&self, k: u32) -> LaurentSeries {
        self.v_power(k).shift(-((k * self.curve.s()) as i64))
    }

    /// `x^k = z^{−nk}`, exact to the same relative precision as the `y`-powers.
    pub fn x_power(&self, k: u32) -> LaurentSeries {
        let shift = -((k * self.curve.n()) as i64);
        LaurentSeries::monomial(shift, LambdaPolynomial::one(), self.v_order + shift)
    }

    pub fn monomial(&self, m1: u32, m2: u32) -> Result<LaurentSeries> {
        Ok(self.y_power(m2).shift(-((m1 * self.curve.n()) as i64)))
    }

    /// `f_y = n y^{n−1} − Σ j λ_ij x^i y^{j−1}`.
    pub fn f_y(&self) -> Result<LaurentSeries> {
        let n = self.curve.n();
        let mut out = self.y_power(n - 1).scale(&int(n as i64));
        for (&p, _) in self.curve.coefficients() {
            if p.j == 0 {
                continue;
            }
            let term = self
                .monomial(p.i as u32, p.j as u32 - 1)?
                .scale_poly(&self.curve.coefficient(p))
                .scale(&int(p.j as i64));
            out = out.sub(&term);
        }
        Ok(out)
    }

    /// `dx/dz = −n z^{−n−1}` (exact).
    pub fn dx_dz(&self) -> LaurentSeries {
        let n = self.curve.n() as i64;
        LaurentSeries::monomial(-n - 1, LambdaPolynomial::constant(int(-n)), i64::MAX / 4)
    }

    /// `h·dx/f_y` divided by `dz`, for a polynomial function `h` given by its expansion.
    pub fn form_over_f_y(&self, h: &LaurentSeries) -> Result<LaurentSeries> {
        let inv = self.f_y()?.inverse()?;
        Ok(h.mul(&self.dx_dz()).mul(&inv))
    }
}

/// Newton iteration for `vⁿ = 1 + Σ λ_ij z^{ns−ni−sj} v^j`, doubling the
/// precision at each step.
fn solve_v(curve: &NSCurve, order: i64) -> Result<LaurentSeries> {
    let n = curve.n();
    let sig = curve.signature();
    let terms: Vec<(i64, u32, LambdaPolynomial)> = curve
        .coefficients()
        .keys()
        .map(|&p| (sig.param_degree(p), p.j as u32, curve.coefficient(p)))
        .collect();
    let mut v = LaurentSeries::one(0);
    let mut prec = 0;
    while prec < order {
        prec = (2 * prec + 1).min(order);
        let v_cur = LaurentSeries::from_coeffs(
            0,
            (0..=v.order()).map(|k| v.coeff(k).unwrap_or_default()).collect(),
            prec,
        );
        let mut powers = vec![LaurentSeries::one(prec)];
        for k in 1..=n {
            let next = powers[k as usize - 1].mul(&v_cur).truncate(prec);
            powers.push(next);
        }
        let mut f = powers[n as usize].sub(&LaurentSeries::one(prec));
        let mut df = powers[n as usize - 1].scale(&int(n as i64));
        for (deg, j, c) in &terms {
            let zc = LaurentSeries::monomial(*deg, c.clone(), prec);
            f = f.sub(&zc.mul(&powers[*j as usize]).truncate(prec));
            if *j > 0 {
                let dterm = zc
                    .mul(&powers[*j as usize - 1])
                    .scale(&int(*j as i64))
                    .truncate(prec);
                df = df.sub(&dterm);
            }
        }
        let step = f
            .mul(&df.inverse().map_err(|_| {
                Error::Internal("Newton step: derivative is not a unit".into())
            })?)
            .truncate(prec);
        v = v_cur.sub(&step).truncate(prec);
    }
    Ok(LaurentSeries::from_coeffs(
        0,
        (0..=v.order()).map(|k| v.coeff(k).unwrap_or_default()).collect(),
        order,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::rational::rat;

    fn sym(n: u32, s: u32, params: &[(u16, u16)]) -> NSCurve {
        let ps: Vec<Param> = params.iter().map(|&(i, j)| Param::new(i, j)).collect();
        NSCurve::with_symbols(n, s, &ps).unwrap()
    }

    #[test]
    fn validation() {
        assert!(NSCurve::degenerate(2, 4).is_err());
        assert!(NSCurve::degenerate(3, 2).is_err());
        assert!(NSCurve::degenerate(1, 3).is_err());
        let mut bad = BTreeMap::new();
        bad.insert(Param::new(2, 1), Coefficient::Symbolic);
        assert!(NSCurve::new(2, 3, bad).is_err());
    }

    #[test]
    fn genus_values() {
        assert_eq!(NSCurve::degenerate(2, 3).unwrap().genus(), 1);
        assert_eq!(NSCurve::degenerate(2, 7).unwrap().genus(), 3);
        assert_eq!(NSCurve::degenerate(3, 4).unwrap().genus(), 3);
    }

    #[test]
    fn gaps() {
        assert_eq!(WeierstrassSemigroup::new(2, 5).gaps, vec![1, 3]);
        assert_eq!(WeierstrassSemigroup::new(3, 4).gaps, vec![1, 2, 5]);
        let sg = WeierstrassSemigroup::new(3, 5);
        assert_eq!(sg.gaps.len() as u32, sg.genus);
        assert_eq!(sg.nongap(sg.genus as usize + 3), 2 * sg.genus + 2);
        assert_eq!(sg.nongaps, vec![0, 3, 5, 6]);
    }

    #[test]
    fn basis() {
        let c = NSCurve::degenerate(2, 7).unwrap();
        let names: Vec<String> = c.basis_monomials(6).iter().map(|b| b.to_string()).collect();
        assert_eq!(names, ["1", "x", "x^2", "x^3", "y", "x^4"]);
        let c = NSCurve::degenerate(3, 4).unwrap();
        let names: Vec<String> = c.basis_monomials(5).iter().map(|b| b.to_string()).collect();
        assert_eq!(names, ["1", "x", "y", "x^2", "xy"]);
    }

    #[test]
    fn partition_ns_values() {
        let p = |n, s| NSCurve::degenerate(n, s).unwrap().partition_ns();
        assert_eq!(p(2, 3).parts(), &[1]);
        assert_eq!(p(2, 5).parts(), &[2, 1]);
        assert_eq!(p(3, 4).parts(), &[3, 1, 1]);
    }

    #[test]
    fn degenerate_y() {
        let c = NSCurve::degenerate(3, 5).unwrap();
        let y = c.y_expansion(6).unwrap();
        assert_eq!(y, LaurentSeries::monomial(-5, LambdaPolynomial::one(), 6));
    }

    #[test]
    fn elliptic_v_matches_square_root() {
        let c = sym(2, 3, &[(1, 0), (0, 0)]);
        let v = c.expansion(10).unwrap().v().clone();
        let l10 = LambdaPolynomial::var(Param::new(1, 0));
        let l00 = LambdaPolynomial::var(Param::new(0, 0));
        assert_eq!(v.coeff(4).unwrap(), l10.scale(&rat(1, 2)));
        assert_eq!(v.coeff(6).unwrap(), l00.scale(&rat(1, 2)));
        assert_eq!(v.coeff(8).unwrap(), (&l10 * &l10).scale(&rat(-1, 8)));
        let radicand = LaurentSeries::from_coeffs(
            0,
            vec![
                LambdaPolynomial::one(),
                LambdaPolynomial::zero(),
                LambdaPolynomial::zero(),
                LambdaPolynomial::zero(),
                l10,
                LambdaPolynomial::zero(),
                l00,
            ],
            10,
        );
        assert_eq!(v, radicand.sqrt().unwrap());
    }

    #[test]
    fn residual_vanishes() {
        for (n, s) in [(2, 3), (2, 5), (3, 4)] {
            let c = NSCurve::symbolic(n, s).unwrap();
            let order = 8;
            let y = c.y_expansion(order).unwrap();
            let x = LaurentSeries::monomial(-(n as i64), LambdaPolynomial::one(), order);
            let r = c.evaluate(&x, &y);
            assert!(r.is_zero(), "({n},{s}): {r}");
            assert!(r.order() >= order - (n * s) as i64 + 1);
        }
    }

    #[test]
    fn f_y_leading() {
        let c = NSCurve::degenerate(3, 4).unwrap();
        assert_eq!(
            c.f_y_expansion(2).unwrap(),
            LaurentSeries::monomial(-8, LambdaPolynomial::constant(int(3)), 2)
        );
        let c = NSCurve::symbolic(2, 5).unwrap();
        let fy = c.f_y_expansion(3).unwrap();
        assert_eq!(fy.valuation(), -5);
        assert_eq!(fy.coeff(-5).unwrap(), LambdaPolynomial::constant(int(2)));
    }

    #[test]
    fn monomial_homogeneity() {
        let c = NSCurve::symbolic(2, 5).unwrap();
        let sg = c.semigroup();
        let sig = c.signature();
        for b in c.basis_monomials(6) {
            let e = c.expand_monomial(b.m1, b.m2, 12).unwrap();
            for i in -(b.order as i64)..=12 {
                let coeff = e.coeff(i).unwrap();
                let expected = i + sg.nongap(b.index) as i64;
                assert!(coeff.is_homogeneous_of(sig, expected), "f_{} z^{i}", b.index);
            }
        }
    }
}
