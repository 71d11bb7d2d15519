//! Differentials on the curve expanded at ∞: the holomorphic forms
//! `du_{w_i} = −f_{g+1−i} dx/f_y`, the constants `c_i`, the fundamental
//! two-form `ω̂ = d_{p₂}Ω + Σ du_{w_i} ⊗ dr_i` and its regular coefficients `q̂_ij`.
//!
//! Every one-form is stored as the Laurent series of its coefficient of `dz`.

use std::collections::BTreeMap;
use std::fmt;

use crate::algebra::matrix::{matmul, transpose, unitriangular_inverse, PolyMatrix};
use crate::algebra::rational::int;
use crate::algebra::{BiSeries, LambdaPolynomial, LaurentSeries, Signature};
use crate::curve::{BasisMonomial, CurveExpansion, NSCurve};
use crate::error::{Error, Result};
use crate::report::Report;

/// Residual freedom of `ω̂`, fixed through the `g×g` block `(q̂_{w_i,w_j})`.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub enum Gauge {
    #[default]
    ZeroGapBlock,
    /// Symmetric `g×g` block indexed by gap positions.
    GapBlock(PolyMatrix),
}

impl Gauge {
    pub fn block(&self, genus: usize) -> Result<PolyMatrix> {
        match self {
            Gauge::ZeroGapBlock => Ok(vec![vec![LambdaPolynomial::zero(); genus]; genus]),
            Gauge::GapBlock(m) => {
                if m.len() != genus || m.iter().any(|r| r.len() != genus) {
                    return Err(Error::InvalidInput(format!(
                        "gauge block must be {genus}×{genus}"
                    )));
                }
                for i in 0..genus {
                    for j in 0..i {
                        if m[i][j] != m[j][i] {
                            return Err(Error::InvalidInput("gauge block must be symmetric".into()));
                        }
                    }
                }
                Ok(m.clone())
            }
        }
    }

    pub fn descriptor(&self) -> String {
        match self {
            Gauge::ZeroGapBlock => "gap-block=0".into(),
            Gauge::GapBlock(m) => {
                let rows: Vec<String> = m
                    .iter()
                    .map(|r| {
                        let cells: Vec<String> = r.iter().map(|c| c.to_string()).collect();
                        format!("[{}]", cells.join(","))
                    })
                    .collect();
                format!("gap-block=[{}]", rows.join(","))
            }
        }
    }

    pub fn is_homogeneous(&self, sig: Signature, gaps: &[u32]) -> bool {
        match self {
            Gauge::ZeroGapBlock => true,
            Gauge::GapBlock(m) => m.iter().enumerate().all(|(i, r)| {
                r.iter()
                    .enumerate()
                    .all(|(j, c)| c.is_homogeneous_of(sig, (gaps[i] + gaps[j]) as i64))
            }),
        }
    }
}

impl fmt::Display for Gauge {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.descriptor())
    }
}

/// `Σ_l c_l·x^{a_l}y^{b_l}` expanded at ∞ times `dx/f_y`, per `dz`.
struct FormContext {
    expansion: CurveExpansion,
    inv_f_y: LaurentSeries,
    dx: LaurentSeries,
    order: i64,
}

impl FormContext {
    /// Forms `f dx/f_y` with `ord f ≤ max_order`, exact through `z^order`.
    fn new(curve: &NSCurve, order: i64, max_order: i64) -> Result<Self> {
        let expansion = curve.expansion(order + max_order + 2)?;
        let inv_f_y = expansion.f_y()?.inverse()?;
        let dx = expansion.dx_dz();
        Ok(FormContext {
            expansion,
            inv_f_y,
            dx,
            order,
        })
    }

    fn monomial_form(&self, b: &BasisMonomial) -> Result<LaurentSeries> {
        let h = self.expansion.monomial(b.m1, b.m2)?;
        exact(&h.mul(&self.dx).mul(&self.inv_f_y), self.order)
    }
}

/// Truncates to `order`, failing if the series is not known that far.
fn exact(s: &LaurentSeries, order: i64) -> Result<LaurentSeries> {
    if s.order() < order {
        return Err(Error::CutoffTooSmall {
            cutoff: s.order(),
            required: order,
        });
    }
    Ok(s.truncate(order))
}

/// `b_ij` with `du_{w_i} = Σ_j b_ij z^{j−1} dz`, `1 ≤ j ≤ W`.
#[derive(Clone, Debug)]
pub struct BMatrix {
    gaps: Vec<u32>,
    weight: u32,
    du: Vec<LaurentSeries>,
}

impl BMatrix {
    pub fn genus(&self) -> usize {
        self.gaps.len()
    }

    pub fn gaps(&self) -> &[u32] {
        &self.gaps
    }

    pub fn weight(&self) -> u32 {
        self.weight
    }

    /// `b_ij`, `1 ≤ i ≤ g`, `1 ≤ j ≤ W`.
    pub fn entry(&self, i: usize, j: usize) -> LambdaPolynomial {
        self.du[i - 1].coeff(j as i64 - 1).expect("within the stored weight")
    }

    /// `du_{w_i}/dz`, exact through `z^{W−1}`.
    pub fn du(&self, i: usize) -> &LaurentSeries {
        &self.du[i - 1]
    }

    /// `(b_{i,w_k})`, upper unitriangular.
    pub fn gap_block(&self) -> PolyMatrix {
        let g = self.genus();
        (1..=g)
            .map(|i| (1..=g).map(|k| self.entry(i, self.gaps[k - 1] as usize)).collect())
            .collect()
    }

    /// `u_{w_i} = Σ_j b_ij t_j` for `j ≤ W`.
    pub fn rows(&self) -> Vec<Vec<LambdaPolynomial>> {
        (1..=self.genus())
            .map(|i| (1..=self.weight as usize).map(|j| self.entry(i, j)).collect())
            .collect()
    }
}

pub fn holomorphic_basis(curve: &NSCurve, weight: u32) -> Result<BMatrix> {
    let sg = curve.semigroup();
    let g = sg.genus as usize;
    let basis = curve.basis_monomials(g);
    let max_order = basis.last().map_or(0, |b| b.order) as i64;
    let ctx = FormContext::new(curve, weight as i64 - 1, max_order)?;
    let mut du = Vec::with_capacity(g);
    for i in 1..=g {
        let form = ctx.monomial_form(&basis[g - i])?.scale(&int(-1));
        let w = sg.gaps[i - 1] as i64;
        if form.valuation() != w - 1 || !form.coeff(w - 1)?.is_one() {
            return Err(Error::Internal(format!(
                "du_{w} does not start with z^{}",
                w - 1
            )));
        }
        du.push(form);
    }
    Ok(BMatrix {
        gaps: sg.gaps,
        weight,
        du,
    })
}

/// `c_1..c_W` from `log(z^{−(g−1)} √(du_{w_g}/dz)) = Σ c_i z^i`.
pub fn c_coefficients(curve: &NSCurve, weight: u32) -> Result<Vec<LambdaPolynomial>> {
    let g = curve.genus() as i64;
    let order = weight as i64 + 2 * g - 2;
    let ctx = FormContext::new(curve, order, 0)?;
    let one = curve.basis_monomials(1)[0];
    let du_top = ctx.monomial_form(&one)?.scale(&int(-1));
    let normalized = du_top.shift(-(2 * g - 2));
    let log = normalized.sqrt()?.log()?;
    if !log.coeff(0)?.is_zero() {
        return Err(Error::Internal("c_0 is not zero".into()));
    }
    (1..=weight as i64).map(|i| log.coeff(i)).collect()
}

/// `i·c_i`, the coefficients of the linear exponent in `t`. Rescaling the frame
/// by `exp(Σ c_i z^i)` rescales `τ` by `exp(Σ i c_i t_i)`.
pub fn time_exponent(c: &[LambdaPolynomial]) -> Vec<LambdaPolynomial> {
    c.iter()
        .enumerate()
        .map(|(i, ci)| ci.scale(&int(i as i64 + 1)))
        .collect()
}

/// `P_i(x,y) = [f(x,w)/w^{i+1}]_+` at `w = y`, as `(coefficient, x-power, y-power)`.
fn truncated_quotient(curve: &NSCurve, i: u32) -> Vec<(LambdaPolynomial, u32, u32)> {
    let n = curve.n();
    let mut out = vec![(LambdaPolynomial::one(), 0, n - i - 1)];
    for (&p, _) in curve.coefficients() {
        if p.j as u32 >= i + 1 {
            out.push((-&curve.coefficient(p), p.i as u32, p.j as u32 - i - 1));
        }
    }
    out
}

/// `d_{p₂}Ω` for `|z₁| < |z₂|`, exact for `z₁`-exponents `≤ N₁`, `z₂`-exponents `≤ N₂`.
///
/// With `1/(x₁−x₂) = Σ_k x₂^k/x₁^{k+1}`:
/// `d_{p₂}Ω = Σ_{k,i} (−n z₁^{nk−1} y₁^i / f_y(z₁)) dz₁ ⊗ d(x₂^k P_i(x₂,y₂))`.
pub fn omega_form(curve: &NSCurve, order1: i64, order2: i64) -> Result<BiSeries> {
    let (n, s) = (curve.n() as i64, curve.s() as i64);
    let expansion = curve.expansion(order1 + order2 + 4)?;
    let inv_f_y = expansion.f_y()?.inverse()?;
    let mut out = BiSeries::zero(order1, order2);
    for i in 0..n {
        let quotient = truncated_quotient(curve, i as u32);
        let y_part = expansion.y_power(i as u32).mul(&inv_f_y).scale(&int(-n));
        let mut k = 0;
        while n * k - 1 + s * (n - 1 - i) <= order1 {
            let alpha = exact(&y_part.shift(n * k - 1), order1)?;
            let mut f = LaurentSeries::zero(i64::MAX / 4);
            for (c, a, b) in &quotient {
                let term = expansion.monomial(k as u32 + a, *b)?.scale_poly(c);
                f = f.add(&term);
            }
            let df = exact(&f.derivative(), order2)?;
            if !alpha.is_zero() && !df.is_zero() {
                out = out.add(&BiSeries::tensor(&alpha, &df));
            }
            k += 1;
        }
    }
    Ok(out)
}

/// A second-kind differential `dr_i = Σ_k β_k f_k dx/f_y`.
#[derive(Clone, Debug)]
pub struct SecondKindForm {
    /// `i`, the holomorphic form it is dual to.
    pub index: usize,
    /// `β_k` keyed by basis index `k`.
    pub coefficients: BTreeMap<usize, LambdaPolynomial>,
    pub series: LaurentSeries,
}

/// `q̂_ij`, `1 ≤ i, j ≤ W`, from `ω̂ = Σ k z₁^{k−1}z₂^{−k−1} + Σ q̂_ij z₁^{i−1}z₂^{j−1}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QHatMatrix {
    entries: PolyMatrix,
    gauge: Gauge,
}

impl QHatMatrix {
    pub fn size(&self) -> usize {
        self.entries.len()
    }

    pub fn entry(&self, i: usize, j: usize) -> &LambdaPolynomial {
        &self.entries[i - 1][j - 1]
    }

    pub fn gauge(&self) -> &Gauge {
        &self.gauge
    }

    pub fn entries(&self) -> &PolyMatrix {
        &self.entries
    }

    pub fn first_asymmetry(&self) -> Option<(usize, usize)> {
        let w = self.size();
        (1..=w)
            .flat_map(|i| (1..i).map(move |j| (i, j)))
            .find(|&(i, j)| self.entry(i, j) != self.entry(j, i))
    }

    /// First nonzero `q̂_ij` with `n | i` or `n | j`.
    pub fn first_reduction_violation(&self, n: usize) -> Option<(usize, usize)> {
        let w = self.size();
        (1..=w)
            .flat_map(|i| (1..=w).map(move |j| (i, j)))
            .find(|&(i, j)| (i % n == 0 || j % n == 0) && !self.entry(i, j).is_zero())
    }

    /// Whether `q̂_ij = 0` whenever `n | ij` (a stronger reading of the
    /// reduction pattern; reported, not required).
    pub fn product_pattern_holds(&self, n: usize) -> bool {
        let w = self.size();
        (1..=w).all(|i| (1..=w).all(|j| (i * j) % n != 0 || self.entry(i, j).is_zero()))
    }
}

/// Everything `solve_dr` determines.
#[derive(Clone, Debug)]
pub struct KleinianData {
    pub b: BMatrix,
    pub dr: Vec<SecondKindForm>,
    pub qhat: QHatMatrix,
    /// Holomorphic correction `dr_i = dr⁰_i + Σ_k H_ik du_{w_k}` fixed by the gauge.
    pub gauge_shift: PolyMatrix,
    pub omega_hat: BiSeries,
}

/// Polar part of a row, as a series known through `z^{−1}`.
fn polar(s: &LaurentSeries) -> LaurentSeries {
    s.truncate(-1)
}

fn kernel_row(a: i64) -> LaurentSeries {
    LaurentSeries::monomial(-a - 2, LambdaPolynomial::constant(int(a + 1)), -1)
}

fn assemble(omega: &BiSeries, b: &BMatrix, dr: &[LaurentSeries], order: i64) -> Result<BiSeries> {
    let mut out = omega.clone();
    for (i, d) in dr.iter().enumerate() {
        out = out.add(&BiSeries::tensor(&exact(b.du(i + 1), order)?, &exact(d, order)?));
    }
    if out.terms().any(|(&(a, _), _)| a < 0) {
        return Err(Error::Internal("ω̂ has a pole in z₁".into()));
    }
    for a in 0..=order {
        let row = polar(&out.row(a));
        if row != kernel_row(a) {
            return Err(Error::InconsistentSystem(format!(
                "row z₁^{a}: polar part {row} differs from the diagonal kernel"
            )));
        }
    }
    Ok(out)
}

/// Determines the `dr_i`, fixes the gauge and reads off `q̂` through index `W`.
pub fn solve_dr(curve: &NSCurve, weight: u32, gauge: &Gauge) -> Result<KleinianData> {
    let sg = curve.semigroup();
    let g = sg.genus as usize;
    let gi = g as i64;
    let order = weight as i64 - 1;
    let b = holomorphic_basis(curve, weight)?;
    let omega = omega_form(curve, order, order)?;
    // Ansatz: ord f_k ≤ w_g + 2g − 1 = 4g − 2.
    let max_order = 4 * gi - 2;
    let count = (max_order - gi + 1).max(gi) as usize;
    let basis = curve.basis_monomials(count);
    let ctx = FormContext::new(curve, order, max_order)?;
    let phis: Vec<LaurentSeries> = basis
        .iter()
        .map(|m| ctx.monomial_form(m))
        .collect::<Result<_>>()?;

    let mut dr0: Vec<LaurentSeries> = Vec::with_capacity(g);
    let mut beta0: Vec<BTreeMap<usize, LambdaPolynomial>> = Vec::with_capacity(g);
    for j in 1..=g {
        let wj = sg.gaps[j - 1] as i64;
        let a = wj - 1;
        let mut target = kernel_row(a).sub(&polar(&omega.row(a)));
        for i in 1..j {
            let bij = b.entry(i, wj as usize);
            target = target.sub(&polar(&dr0[i - 1]).scale_poly(&bij));
        }
        let mut coeffs = BTreeMap::new();
        let mut form = LaurentSeries::zero(order);
        while target.valuation() <= -2 {
            let e = target.valuation();
            let c = target.coeff(e)?;
            let ord = 2 * gi - 2 - e;
            if ord > wj + 2 * gi - 1 {
                return Err(Error::InconsistentSystem(format!(
                    "no symmetric fundamental form in ansatz: dr_{j} needs ord {ord}"
                )));
            }
            let k = (ord - gi + 1) as usize;
            debug_assert_eq!(basis[k - 1].order as i64, ord);
            let beta = -&c;
            target = target.sub(&polar(&phis[k - 1]).scale_poly(&beta));
            form = form.add(&phis[k - 1].scale_poly(&beta));
            coeffs.insert(k, beta);
        }
        if !target.coeff(-1)?.is_zero() {
            return Err(Error::InconsistentSystem(format!(
                "no symmetric fundamental form in ansatz: dr_{j} has a residue"
            )));
        }
        dr0.push(form);
        beta0.push(coeffs);
    }

    let omega0 = assemble(&omega, &b, &dr0, order)?;
    let read = |om: &BiSeries, i: usize, j: usize| om.coeff(i as i64 - 1, j as i64 - 1);
    let gaps: Vec<usize> = sg.gaps.iter().map(|&w| w as usize).collect();
    let q0_gap: PolyMatrix = gaps
        .iter()
        .map(|&p| gaps.iter().map(|&q| read(&omega0, p, q)).collect())
        .collect::<Result<_>>()?;
    let target = gauge.block(g)?;
    let diff: PolyMatrix = target
        .iter()
        .zip(&q0_gap)
        .map(|(tr, qr)| tr.iter().zip(qr).map(|(t, q)| t - q).collect())
        .collect();
    let binv = unitriangular_inverse(&b.gap_block())?;
    let h = matmul(&matmul(&transpose(&binv), &diff), &binv);

    let mut dr = Vec::with_capacity(g);
    let mut series = Vec::with_capacity(g);
    for i in 1..=g {
        let mut s = dr0[i - 1].clone();
        let mut coeffs = beta0[i - 1].clone();
        for k in 1..=g {
            let hik = &h[i - 1][k - 1];
            if hik.is_zero() {
                continue;
            }
            s = s.add(&exact(b.du(k), order)?.scale_poly(hik));
            // du_{w_k} = −f_{g+1−k} dx/f_y.
            let e = coeffs.entry(g + 1 - k).or_default();
            *e -= hik;
        }
        coeffs.retain(|_, c| !c.is_zero());
        series.push(s.clone());
        dr.push(SecondKindForm {
            index: i,
            coefficients: coeffs,
            series: s,
        });
    }
    let omega_hat = assemble(&omega, &b, &series, order)?;
    let w = weight as usize;
    let entries: PolyMatrix = (1..=w)
        .map(|i| (1..=w).map(|j| read(&omega_hat, i, j)).collect())
        .collect::<Result<_>>()?;
    Ok(KleinianData {
        b,
        dr,
        qhat: QHatMatrix {
            entries,
            gauge: gauge.clone(),
        },
        gauge_shift: h,
        omega_hat,
    })
}

/// `ω∘η = Res_{z=0} (∫ω) η`.
pub fn pairing(omega: &LaurentSeries, eta: &LaurentSeries) -> Result<LambdaPolynomial> {
    omega.integrate_no_log()?.mul(eta).residue()
}

/// The structural properties of `b`, `c`, `q̂` and the pairings.
pub fn forms_reports(
    curve: &NSCurve,
    data: &KleinianData,
    c: &[LambdaPolynomial],
) -> Result<Vec<Report>> {
    let sig = curve.signature();
    let n = curve.n() as usize;
    let b = &data.b;
    let g = b.genus();
    let w = b.weight() as usize;
    let bound = w as i64;
    let homogeneous = curve.is_homogeneous();
    let mut out = Vec::new();

    let mut bad = None;
    'outer: for i in 1..=g {
        let wi = b.gaps[i - 1] as usize;
        for j in 1..=w {
            let e = b.entry(i, j);
            let ok = if j < wi {
                e.is_zero()
            } else if j == wi {
                e.is_one()
            } else if j % n == 0 {
                e.is_zero()
            } else {
                !homogeneous || e.is_homogeneous_of(sig, (j - wi) as i64)
            };
            if !ok {
                bad = Some(format!("b_{i},{j} = {e}"));
                break 'outer;
            }
        }
    }
    out.push(Report::from_outcome(
        "b_ij: zero below w_i, b_(i,w_i) = 1, zero at multiples of n, degree j − w_i",
        bound,
        bad,
    ));

    if homogeneous {
        let bad = c
            .iter()
            .enumerate()
            .find(|(i, ci)| !ci.is_homogeneous_of(sig, *i as i64 + 1))
            .map(|(i, ci)| format!("c_{} = {ci}", i + 1));
        out.push(Report::from_outcome("c_i has λ-degree i", bound, bad));
    }

    let q = &data.qhat;
    out.push(Report::from_outcome(
        "q̂ symmetric",
        bound,
        q.first_asymmetry()
            .map(|(i, j)| format!("q̂_{i},{j} = {} but q̂_{j},{i} = {}", q.entry(i, j), q.entry(j, i))),
    ));
    out.push(Report::from_outcome(
        format!("q̂_ij = 0 when {n} divides i or j"),
        bound,
        q.first_reduction_violation(n)
            .map(|(i, j)| format!("q̂_{i},{j} = {}", q.entry(i, j))),
    ));
    // The product reading is recorded, never failed on.
    let holds = if q.product_pattern_holds(n) { "holds" } else { "does not hold" };
    out.push(Report::from_outcome(
        format!("note: q̂_ij = 0 when {n} divides ij {holds} (informational)"),
        bound,
        None,
    ));
    if homogeneous && q.gauge().is_homogeneous(sig, b.gaps()) {
        let bad = (1..=w)
            .flat_map(|i| (1..=w).map(move |j| (i, j)))
            .find(|&(i, j)| !q.entry(i, j).is_homogeneous_of(sig, (i + j) as i64))
            .map(|(i, j)| format!("q̂_{i},{j} = {}", q.entry(i, j)));
        out.push(Report::from_outcome("q̂_ij has λ-degree i + j", bound, bad));
    }

    let mut bad = None;
    for i in 1..=g {
        for j in 1..=g {
            let du = b.du(i);
            let dr = &data.dr[j - 1].series;
            let delta = LambdaPolynomial::constant(int((i == j) as i64));
            let checks = [
                (format!("du_{}∘dr_{}", b.gaps[i - 1], j), pairing(du, dr)?, delta),
                (format!("du_{}∘du_{}", b.gaps[i - 1], b.gaps[j - 1]), pairing(du, b.du(j))?, LambdaPolynomial::zero()),
                (format!("dr_{i}∘dr_{j}"), pairing(&data.dr[i - 1].series, dr)?, LambdaPolynomial::zero()),
            ];
            for (name, got, want) in checks {
                if bad.is_none() && got != want {
                    bad = Some(format!("{name} = {got}, expected {want}"));
                }
            }
        }
    }
    out.push(Report::from_outcome(
        "du∘dr = δ, du∘du = 0, dr∘dr = 0",
        bound,
        bad,
    ));

    let mut bad = None;
    let mut k = 1;
    while n * k <= w {
        let e = (n * k) as i64;
        let dxk = LaurentSeries::monomial(-e - 1, LambdaPolynomial::constant(int(-e)), w as i64);
        for i in 1..=g {
            let got = pairing(&dxk, b.du(i))?;
            if bad.is_none() && !got.is_zero() {
                bad = Some(format!("d(x^{k})∘du_{} = {got}", b.gaps[i - 1]));
            }
        }
        k += 1;
    }
    out.push(Report::from_outcome("d(x^k)∘du = 0", bound, bad));
    Ok(out)
}
