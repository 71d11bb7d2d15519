//! The tau function `τ(t) = Σ_{μ ⊇ λ(n,s)} ξ_μ s_μ(t)` and its bilinear checks.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use num_traits::{One, Zero};
use rayon::prelude::*;

use crate::algebra::rational::{binomial, factorial, format_rational_short, int, Rational};
use crate::algebra::{Family, GradedSeries, LambdaPolynomial, VarMonomial};
use crate::curve::NSCurve;
use crate::error::{Error, Result};
use crate::frame::{build_frame, normalize_frame};
use crate::report::{zero_report, Report};
use crate::schur::{enumerate_superpartitions, p_polynomials, partitions_of, schur, Partition};

#[derive(Clone, Debug)]
pub struct TauSeries {
    curve: NSCurve,
    weight: u32,
    lambda: Partition,
    plucker: Vec<(Partition, LambdaPolynomial)>,
    series: GradedSeries,
}

impl TauSeries {
    pub fn curve(&self) -> &NSCurve {
        &self.curve
    }

    pub fn weight(&self) -> u32 {
        self.weight
    }

    pub fn lambda(&self) -> &Partition {
        &self.lambda
    }

    /// `(μ, ξ_μ)` for every enumerated `μ`, zero coordinates included.
    pub fn plucker(&self) -> &[(Partition, LambdaPolynomial)] {
        &self.plucker
    }

    pub fn series(&self) -> &GradedSeries {
        &self.series
    }

    /// The same series with `ξ_μ` replaced by `ξ_μ + delta`.
    pub fn perturbed(&self, mu: &Partition, delta: &LambdaPolynomial) -> Result<TauSeries> {
        let mut out = self.clone();
        match out.plucker.iter_mut().find(|(m, _)| m == mu) {
            Some((_, xi)) => *xi += delta,
            None => out.plucker.push((mu.clone(), delta.clone())),
        }
        out.series = out.series.add(&schur(mu, self.weight)?.scale_poly(delta));
        Ok(out)
    }

    /// Coefficient of `t_1^k` in `τ(t_1, 0, 0, …)`.
    pub fn t1_coefficient(&self, k: u32) -> Result<LambdaPolynomial> {
        self.series.coeff(&VarMonomial::from_pairs([(1, k as u16)]))
    }
}

/// `τ` through weight `W`.
pub fn build_tau(curve: &NSCurve, weight: u32) -> Result<TauSeries> {
    let frame = normalize_frame(&build_frame(curve, weight)?);
    let lambda = frame.lambda().clone();
    let mus = enumerate_superpartitions(&lambda, weight);
    let plucker = frame.plucker_all(&mus)?;
    let parts: Vec<GradedSeries> = plucker
        .par_iter()
        .filter(|(_, xi)| !xi.is_zero())
        .map(|(mu, xi)| Ok(schur(mu, weight)?.scale_poly(xi)))
        .collect::<Result<_>>()?;
    let series = parts
        .iter()
        .fold(GradedSeries::zero(Family::T, weight as i64), |acc, p| acc.add(p));
    Ok(TauSeries {
        curve: curve.clone(),
        weight,
        lambda,
        plucker,
        series,
    })
}

/// A polynomial in the Hirota symbols `D_1, D_2, …` (labels are weights).
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct HirotaOperator {
    terms: BTreeMap<VarMonomial, Rational>,
}

impl HirotaOperator {
    pub fn new(terms: impl IntoIterator<Item = (VarMonomial, Rational)>) -> Self {
        let mut op = HirotaOperator::default();
        for (m, c) in terms {
            op.add_term(m, c);
        }
        op
    }

    /// Builds from `(coefficient, [(label, exponent), …])`.
    pub fn from_spec(spec: &[(i64, &[(u16, u16)])]) -> Self {
        Self::new(
            spec.iter()
                .map(|(c, pairs)| (VarMonomial::from_pairs(pairs.iter().copied()), int(*c))),
        )
    }

    fn add_term(&mut self, m: VarMonomial, c: Rational) {
        let entry = self.terms.entry(m.clone()).or_insert_with(Rational::zero);
        *entry += c;
        if entry.is_zero() {
            self.terms.remove(&m);
        }
    }

    /// `D_1⁴ + 3D_2² − 4D_1D_3`.
    pub fn kp() -> Self {
        Self::from_spec(&[(1, &[(1, 4)]), (3, &[(2, 2)]), (-4, &[(1, 1), (3, 1)])])
    }

    /// `D_1⁴ − 4D_1D_3`.
    pub fn kdv() -> Self {
        Self::from_spec(&[(1, &[(1, 4)]), (-4, &[(1, 1), (3, 1)])])
    }

    /// `D_1⁴ + 3D_2²`.
    pub fn boussinesq() -> Self {
        Self::from_spec(&[(1, &[(1, 4)]), (3, &[(2, 2)])])
    }

    pub fn terms(&self) -> &BTreeMap<VarMonomial, Rational> {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Largest monomial weight.
    pub fn weight(&self) -> i64 {
        self.terms.keys().map(|m| m.weight()).max().unwrap_or(0)
    }

    pub fn is_weight_homogeneous(&self) -> bool {
        let ws: BTreeSet<i64> = self.terms.keys().map(|m| m.weight()).collect();
        ws.len() <= 1
    }

    /// Drops monomials of odd total degree, which act as zero on `f·f`.
    pub fn even_part(&self) -> Self {
        Self::new(
            self.terms
                .iter()
                .filter(|(m, _)| m.degree() % 2 == 0)
                .map(|(m, c)| (m.clone(), c.clone())),
        )
    }

    pub fn scale(&self, factor: &Rational) -> Self {
        Self::new(self.terms.iter().map(|(m, c)| (m.clone(), c * factor)))
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut out = HirotaOperator::default();
        for (a, ca) in &self.terms {
            for (b, cb) in &other.terms {
                out.add_term(a.mul(b), ca * cb);
            }
        }
        out
    }
}

impl fmt::Display for HirotaOperator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut terms: Vec<_> = self.terms.iter().collect();
        terms.sort_by(|a, b| b.0.weight().cmp(&a.0.weight()).then(b.0.cmp(a.0)));
        for (k, (m, c)) in terms.into_iter().enumerate() {
            let neg = c < &Rational::zero();
            let abs = if neg { -c } else { c.clone() };
            match (k, neg) {
                (0, true) => write!(f, "-")?,
                (0, false) => {}
                (_, true) => write!(f, " - ")?,
                (_, false) => write!(f, " + ")?,
            }
            let mono = m.to_string().replace('x', "D").replace('*', "");
            if abs.is_one() && !m.is_one() {
                write!(f, "{mono}")?;
            } else if m.is_one() {
                write!(f, "{}", format_rational_short(&abs))?;
            } else {
                write!(f, "{}{mono}", format_rational_short(&abs))?;
            }
        }
        Ok(())
    }
}

/// Every `K ≤ M` componentwise.
fn sub_monomials(m: &VarMonomial) -> Vec<VarMonomial> {
    let mut out = vec![Vec::new()];
    for &(l, e) in m.factors() {
        out = out
            .into_iter()
            .flat_map(|prefix: Vec<(u16, u16)>| {
                (0..=e).map(move |k| {
                    let mut p = prefix.clone();
                    p.push((l, k));
                    p
                })
            })
            .collect();
    }
    out.into_iter().map(VarMonomial::from_pairs).collect()
}

fn quotient(m: &VarMonomial, k: &VarMonomial) -> VarMonomial {
    VarMonomial::from_pairs(m.factors().iter().map(|&(l, e)| (l, e - k.exponent(l))))
}

/// Cached mixed partial derivatives `∂^K f`.
struct Derivatives<'a> {
    base: &'a GradedSeries,
    cache: HashMap<VarMonomial, GradedSeries>,
}

impl<'a> Derivatives<'a> {
    fn new(base: &'a GradedSeries) -> Self {
        Derivatives {
            base,
            cache: HashMap::new(),
        }
    }

    fn get(&mut self, k: &VarMonomial) -> GradedSeries {
        if k.is_one() {
            return self.base.clone();
        }
        if let Some(d) = self.cache.get(k) {
            return d.clone();
        }
        let &(l, _) = k.factors().last().expect("non-unit monomial");
        let (_, lower) = k.derivative(l).expect("label present");
        let d = self.get(&lower).derivative(l);
        self.cache.insert(k.clone(), d.clone());
        d
    }
}

/// `D^M f·g = Σ_{K≤M} Π C(m_i,k_i)(−1)^{m_i−k_i} ∂^K f ∂^{M−K} g` for each
/// requested `M`. The cutoff of each result is what the product rule proves.
pub fn hirota_monomials(
    monomials: &BTreeSet<VarMonomial>,
    f: &GradedSeries,
    g: &GradedSeries,
) -> BTreeMap<VarMonomial, GradedSeries> {
    let same = f == g;
    let mut df = Derivatives::new(f);
    let mut dg = Derivatives::new(g);
    let mut jobs: Vec<(VarMonomial, Vec<(Rational, GradedSeries, GradedSeries)>)> = Vec::new();
    for m in monomials {
        if same && m.degree() % 2 == 1 {
            continue;
        }
        let mut pieces = Vec::new();
        for k in sub_monomials(m) {
            let rest = quotient(m, &k);
            if same && k > rest {
                continue;
            }
            let mut coeff = Rational::one();
            for &(l, e) in m.factors() {
                let kl = k.exponent(l);
                coeff *= Rational::from_integer(binomial(e as u32, kl as u32));
                if (e - kl) % 2 == 1 {
                    coeff = -coeff;
                }
            }
            if same && k != rest {
                // The mirrored term is equal for even total degree.
                coeff *= int(2);
            }
            pieces.push((coeff, df.get(&k), if same { df.get(&rest) } else { dg.get(&rest) }));
        }
        jobs.push((m.clone(), pieces));
    }
    jobs.into_par_iter()
        .map(|(m, pieces)| {
            let mut acc: Option<GradedSeries> = None;
            for (c, a, b) in pieces {
                let term = a.mul(&b).scale(&c);
                acc = Some(match acc {
                    None => term,
                    Some(s) => s.add(&term),
                });
            }
            let family = f.family();
            (m, acc.unwrap_or_else(|| GradedSeries::zero(family, i64::MAX / 4)))
        })
        .collect()
}

/// `H(D) f·g` as a series in the shared variables.
pub fn hirota_apply(h: &HirotaOperator, f: &GradedSeries, g: &GradedSeries) -> GradedSeries {
    let monomials: BTreeSet<VarMonomial> = h.terms.keys().cloned().collect();
    let values = hirota_monomials(&monomials, f, g);
    combine(h, &values, f.family(), f.cutoff().min(g.cutoff()))
}

fn combine(
    h: &HirotaOperator,
    values: &BTreeMap<VarMonomial, GradedSeries>,
    family: Family,
    fallback_cutoff: i64,
) -> GradedSeries {
    let mut acc: Option<GradedSeries> = None;
    for (m, c) in &h.terms {
        let Some(v) = values.get(m) else { continue };
        let term = v.scale(c);
        acc = Some(match acc {
            None => term,
            Some(s) => s.add(&term),
        });
    }
    acc.unwrap_or_else(|| GradedSeries::zero(family, fallback_cutoff))
}

/// The operator multiplying `y^α` in
/// `Σ_j p_j(−2y) p_{j+1}(D̃) exp(Σ_l y_l D_l)`, with `D̃ = (D_1, D_2/2, D_3/3, …)`.
pub fn generating_coefficient(alpha: &VarMonomial) -> Result<HirotaOperator> {
    let top = (alpha.weight() + 1) as u32;
    let p = p_polynomials(top, top)?;
    let tilde = |j: usize| -> HirotaOperator {
        HirotaOperator::new(p[j].terms().map(|(m, c)| {
            let mut coeff = c.as_constant().expect("p-polynomials have rational coefficients");
            for &(l, e) in m.factors() {
                coeff /= Rational::from_integer((l as i64).pow(e as u32).into());
            }
            (m.clone(), coeff)
        }))
    };
    let mut out = HirotaOperator::default();
    for beta in sub_monomials(alpha) {
        let rest = quotient(alpha, &beta);
        let mut coeff = Rational::one();
        for &(_, b) in beta.factors() {
            coeff *= int(-2).pow(b as i32) / Rational::from_integer(factorial(b as u32));
        }
        for &(_, e) in rest.factors() {
            coeff /= Rational::from_integer(factorial(e as u32));
        }
        let shift = HirotaOperator::new([(rest, coeff)]);
        out = out.add(&tilde(beta.weight() as usize + 1).mul(&shift));
    }
    Ok(out)
}

/// `y`-monomials by weight, reverse-lexicographic within a weight.
fn y_monomials(max_weight: u32) -> Vec<VarMonomial> {
    (1..=max_weight)
        .flat_map(partitions_of)
        .map(|p| VarMonomial::from_pairs(p.parts().iter().map(|&l| (l as u16, 1))))
        .collect()
}

fn y_name(alpha: &VarMonomial) -> String {
    alpha.to_string().replace('x', "y")
}

/// Checks the first `count` nontrivial `y`-coefficients of the KP generating
/// identity on `τ·τ`, each through its provable weight.
pub fn kp_generating_check(tau: &TauSeries, count: usize) -> Result<Vec<Report>> {
    let f = tau.series();
    let limit = (tau.weight() + tau.lambda().weight()) as u32;
    let mut ops = Vec::new();
    for alpha in y_monomials(limit) {
        if ops.len() >= count {
            break;
        }
        let op = generating_coefficient(&alpha)?.even_part();
        if !op.is_zero() {
            ops.push((alpha, op));
        }
    }
    let monomials: BTreeSet<VarMonomial> =
        ops.iter().flat_map(|(_, op)| op.terms.keys().cloned()).collect();
    let values = hirota_monomials(&monomials, f, f);
    Ok(ops
        .iter()
        .map(|(alpha, op)| {
            let residual = combine(op, &values, Family::T, f.cutoff());
            zero_report(
                format!("KP generating identity, coefficient of {}: ({op}) τ·τ = 0", y_name(alpha)),
                &residual,
            )
        })
        .collect())
}

/// `H τ·τ = 0` through the provable weight.
pub fn bilinear_check(name: &str, h: &HirotaOperator, f: &GradedSeries) -> Report {
    let residual = hirota_apply(&h.even_part(), f, f);
    zero_report(format!("{name}: ({h}) τ·τ = 0"), &residual)
}

/// `(∂_{t_{nk}} + nk·c_{nk}) τ = 0` for every `nk ≤ W`, then the reduced bilinear
/// equation (KdV for `n = 2`, Boussinesq for `n = 3`) on `exp(Σ i·c_i t_i) τ`
/// restricted to `t_{nk} = 0`. `c[i-1]` is `c_i`.
pub fn reduction_check(tau: &TauSeries, c: &[LambdaPolynomial]) -> Result<Vec<Report>> {
    let n = tau.curve().n();
    let w = tau.weight();
    if (c.len() as u32) < w {
        return Err(Error::CutoffTooSmall {
            cutoff: c.len() as i64,
            required: w as i64,
        });
    }
    let c = crate::forms::time_exponent(c);
    let f = tau.series();
    let mut reports = Vec::new();
    let mut k = n;
    while k <= w {
        let d = f.derivative(k as u16);
        let residual = d.add(&f.scale_poly(&c[k as usize - 1]).truncate(d.cutoff()));
        reports.push(zero_report(
            format!("(∂/∂t{k} + {k}·c{k}) τ = 0"),
            &residual,
        ));
        k += n;
    }
    let op = match n {
        2 => Some(("KdV", HirotaOperator::kdv())),
        3 => Some(("Boussinesq", HirotaOperator::boussinesq())),
        _ => None,
    };
    if let Some((name, op)) = op {
        let multiples: BTreeSet<u16> = (1..=w / n).map(|j| (j * n) as u16).collect();
        let mut phase = GradedSeries::zero(Family::T, w as i64);
        for i in 1..=w {
            if i % n != 0 {
                phase = phase.add(&GradedSeries::var(Family::T, i as u16, w as i64).scale_poly(&c[i as usize - 1]));
            }
        }
        let reduced = phase.exp()?.mul(&f.set_zero(&multiples));
        reports.push(bilinear_check(&format!("{name} on exp(Σ i·c_i t_i) τ, t_{{{n}k}} = 0"), &op, &reduced));
    }
    Ok(reports)
}

/// Every term of `τ` has `weight(t-monomial) − deg_λ(coefficient) = |λ(n,s)|`.
pub fn homogeneity_check(tau: &TauSeries) -> Result<Report> {
    if !tau.curve().is_homogeneous() {
        return Err(Error::InvalidInput(
            "homogeneity needs every nonzero curve coefficient symbolic".into(),
        ));
    }
    let total = tau.lambda().weight() as i64;
    let bad = tau.series().first_inhomogeneous(tau.curve().signature(), total);
    Ok(Report {
        name: format!("total-weight homogeneity of τ (weight {total})"),
        weight_bound: tau.weight() as i64,
        pass: bad.is_none(),
        counterexample: bad.map(|(m, c)| format!("coefficient of {} is {c}", m.to_string().replace('x', "t"))),
    })
}

/// `ord_{t_1} τ(t_1, 0, …) = |λ(n,s)|` with leading coefficient `d_{λ(n,s)}`.
pub fn t1_restriction_check(tau: &TauSeries) -> Result<Report> {
    let lam = tau.lambda();
    let k = lam.weight();
    let lead = tau.t1_coefficient(k)?;
    let expected = LambdaPolynomial::constant(crate::schur::d_coefficient(lam));
    let mut bad = None;
    for j in 0..k {
        let c = tau.t1_coefficient(j)?;
        if !c.is_zero() {
            bad = Some(format!("t1^{j} has coefficient {c}"));
            break;
        }
    }
    if bad.is_none() && lead != expected {
        bad = Some(format!("t1^{k} has coefficient {lead}, expected {expected}"));
    }
    Ok(Report {
        name: format!("τ(t1,0,…) = d_λ t1^{k} (1 + O(t1)), d_λ = {}", format_rational_short(&crate::schur::d_coefficient(lam))),
        weight_bound: tau.weight() as i64,
        pass: bad.is_none(),
        counterexample: bad,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::rational::rat;
    use crate::algebra::Param;
    use crate::curve::Coefficient;

    #[test]
    fn degenerate_tau_is_schur() {
        for (n, s) in [(2, 3), (2, 5), (3, 4)] {
            let c = NSCurve::degenerate(n, s).unwrap();
            let tau = build_tau(&c, 8).unwrap();
            assert_eq!(tau.series(), &schur(&c.partition_ns(), 8).unwrap());
        }
    }

    #[test]
    fn elliptic_tau_starts_with_t1() {
        let c = NSCurve::symbolic(2, 3).unwrap();
        let tau = build_tau(&c, 7).unwrap();
        assert!(tau.series().component(1).coeff(&VarMonomial::var(1)).unwrap().is_one());
        assert_eq!(tau.series().component(0).len(), 0);
    }

    #[test]
    fn single_hirota_derivative_vanishes() {
        let c = NSCurve::symbolic(2, 5).unwrap();
        let tau = build_tau(&c, 7).unwrap();
        let d1 = HirotaOperator::from_spec(&[(1, &[(1, 1)])]);
        assert!(hirota_apply(&d1, tau.series(), tau.series()).is_zero());
    }

    #[test]
    fn kp_on_t1() {
        let t1 = GradedSeries::var(Family::T, 1, 10);
        let r = hirota_apply(&HirotaOperator::kp(), &t1, &t1);
        assert!(r.is_zero());
    }

    fn exp_linear(coeffs: &[i64], cutoff: i64) -> GradedSeries {
        let mut lin = GradedSeries::zero(Family::T, cutoff);
        for (k, &a) in coeffs.iter().enumerate() {
            let v = GradedSeries::var(Family::T, k as u16 + 1, cutoff);
            lin = lin.add(&v.scale(&int(a)));
        }
        lin.exp().unwrap()
    }

    #[test]
    fn hirota_on_exponentials() {
        // D^M e^{a·t}·e^{b·t} = (a−b)^M e^{(a+b)·t}.
        let (a, b) = ([1, 2, 0], [3, -1, 1]);
        let f = exp_linear(&a, 9);
        let g = exp_linear(&b, 9);
        let sum = exp_linear(&[4, 1, 1], 9);
        for pairs in [vec![(1u16, 2u16)], vec![(1, 1), (3, 1)], vec![(2, 2)], vec![(1, 3), (2, 1)]] {
            let m = VarMonomial::from_pairs(pairs.clone());
            let op = HirotaOperator::new([(m, Rational::one())]);
            let got = hirota_apply(&op, &f, &g);
            let mut factor = Rational::one();
            for (l, e) in pairs {
                let d = int(a[l as usize - 1] - b[l as usize - 1]);
                factor *= d.pow(e as i32);
            }
            let expected = sum.scale(&factor).truncate(got.cutoff());
            assert_eq!(got, expected);
        }
    }

    #[test]
    fn y3_coefficient_is_kp() {
        let y3 = VarMonomial::var(3);
        let op = generating_coefficient(&y3).unwrap().even_part();
        assert_eq!(op, HirotaOperator::kp().scale(&rat(-1, 12)));
        let y1 = VarMonomial::var(1);
        assert!(generating_coefficient(&y1).unwrap().even_part().is_zero());
    }

    #[test]
    fn kp_holds_genus_two() {
        let c = NSCurve::symbolic(2, 5).unwrap();
        let tau = build_tau(&c, 9).unwrap();
        let r = bilinear_check("KP", &HirotaOperator::kp(), tau.series());
        assert!(r.pass, "{r}");
        assert_eq!(r.weight_bound, 9 + 3 - 4);
        for r in kp_generating_check(&tau, 4).unwrap() {
            assert!(r.pass, "{r}");
        }
    }

    #[test]
    fn kp_fails_on_perturbed_tau() {
        let c = NSCurve::symbolic(2, 5).unwrap();
        let tau = build_tau(&c, 8).unwrap();
        let mut bad = tau.series().clone();
        bad.add_term(VarMonomial::from_pairs([(1, 1), (3, 1)]), &LambdaPolynomial::one());
        assert!(!bilinear_check("KP", &HirotaOperator::kp(), &bad).pass);
    }

    #[test]
    fn homogeneity_and_t1() {
        for (n, s) in [(2, 3), (2, 5), (3, 4)] {
            let c = NSCurve::symbolic(n, s).unwrap();
            let tau = build_tau(&c, 8).unwrap();
            assert!(homogeneity_check(&tau).unwrap().pass);
            assert!(t1_restriction_check(&tau).unwrap().pass);
        }
    }

    #[test]
    fn specialization_commutes() {
        let c = NSCurve::symbolic(2, 5).unwrap();
        let values: BTreeMap<Param, Rational> = c
            .symbols()
            .into_iter()
            .enumerate()
            .map(|(k, p)| (p, rat(k as i64 * 3 - 5, k as i64 + 2)))
            .collect();
        let numeric = c.specialize(&values).unwrap();
        assert!(numeric.coefficients().values().all(|v| matches!(v, Coefficient::Value(_))));
        let a = build_tau(&c, 8).unwrap().series().map_coeffs(|p| p.specialize(&values));
        let b = build_tau(&numeric, 8).unwrap();
        assert_eq!(&a, b.series());
    }
}
