//! The sigma function as a series in `u_{w_1}, …, u_{w_g}`, defined through
//! `exp(Σ i·c_i t_i − ½ q̂(t)) τ(t) = σ(Bt)`.

use std::collections::{BTreeMap, BTreeSet};

use num_traits::{One, Zero};

use crate::algebra::matrix::{matmul, transpose, unitriangular_inverse, PolyMatrix};
use crate::algebra::rational::{factorial, int, rat, Rational};
use crate::algebra::{Family, GradedSeries, LambdaPolynomial, VarMonomial};
use crate::curve::NSCurve;
use crate::error::{Error, Result};
use crate::forms::{c_coefficients, forms_reports, solve_dr, time_exponent, BMatrix, Gauge, KleinianData, QHatMatrix};
use crate::report::{zero_report, Report};
use crate::schur::Partition;
use crate::tau::{build_tau, TauSeries};

#[derive(Clone, Debug)]
pub struct SigmaSeries {
    series: GradedSeries,
    gaps: Vec<u32>,
    lambda: Partition,
    gauge: Gauge,
}

impl SigmaSeries {
    /// In the `u` family; variable labels are the gaps.
    pub fn series(&self) -> &GradedSeries {
        &self.series
    }

    pub fn gaps(&self) -> &[u32] {
        &self.gaps
    }

    pub fn lambda(&self) -> &Partition {
        &self.lambda
    }

    pub fn gauge(&self) -> &Gauge {
        &self.gauge
    }
}

/// `t_{w_k} = Σ_i (B_gap^{−1})_{ki} u_{w_i}`, the inverse of `u = B t` on gap variables.
pub fn t_of_u(b: &BMatrix, cutoff: i64) -> Result<BTreeMap<u16, GradedSeries>> {
    let inv = unitriangular_inverse(&b.gap_block())?;
    let gaps = b.gaps();
    Ok(gaps
        .iter()
        .enumerate()
        .map(|(k, &wk)| {
            let mut image = GradedSeries::zero(Family::U, cutoff);
            for (i, &wi) in gaps.iter().enumerate() {
                let coeff = &inv[k][i];
                if !coeff.is_zero() {
                    image.add_term(VarMonomial::var(wi as u16), coeff);
                }
            }
            (wk as u16, image)
        })
        .collect())
}

/// `u_{w_i} = Σ_j b_ij t_j`.
pub fn u_of_t(b: &BMatrix, cutoff: i64) -> BTreeMap<u16, GradedSeries> {
    b.gaps()
        .iter()
        .enumerate()
        .map(|(i, &wi)| {
            let mut image = GradedSeries::zero(Family::T, cutoff);
            for j in 1..=b.weight() as usize {
                image.add_term(VarMonomial::var(j as u16), &b.entry(i + 1, j));
            }
            (wi as u16, image)
        })
        .collect()
}

/// `Σ i·c_i t_i − ½ Σ q̂_ij t_i t_j` through weight `W`.
pub fn phase(c: &[LambdaPolynomial], q: &QHatMatrix, cutoff: i64) -> GradedSeries {
    let mut out = GradedSeries::zero(Family::T, cutoff);
    for (i, ci) in time_exponent(c).iter().enumerate() {
        out.add_term(VarMonomial::var(i as u16 + 1), ci);
    }
    let half = rat(-1, 2);
    for i in 1..=q.size() {
        for j in 1..=q.size() {
            if (i + j) as i64 > cutoff {
                continue;
            }
            let m = VarMonomial::from_pairs([(i as u16, 1), (j as u16, 1)]);
            out.add_term(m, &q.entry(i, j).scale(&half));
        }
    }
    out
}

/// `exp(Σ i·c_i t_i − ½ q̂(t)) τ(t)` as a full series in `t`.
pub fn modified_tau(tau: &TauSeries, c: &[LambdaPolynomial], q: &QHatMatrix) -> Result<GradedSeries> {
    let cutoff = tau.weight() as i64;
    Ok(phase(c, q, cutoff).exp()?.mul(tau.series()))
}

/// `σ(u)`: the modified tau function at `t = B_gap^{−1} u`, non-gap `t` set to zero.
pub fn build_sigma(
    tau: &TauSeries,
    c: &[LambdaPolynomial],
    q: &QHatMatrix,
    b: &BMatrix,
) -> Result<SigmaSeries> {
    let cutoff = tau.weight() as i64;
    if (c.len() as i64) < cutoff || (q.size() as i64) < cutoff - 1 || (b.weight() as i64) < cutoff {
        return Err(Error::CutoffMismatch(format!(
            "τ has weight {cutoff} but c, q̂, B reach {}, {}, {}",
            c.len(),
            q.size(),
            b.weight()
        )));
    }
    let gaps: BTreeSet<u16> = b.gaps().iter().map(|&w| w as u16).collect();
    let others: BTreeSet<u16> = (1..=cutoff as u16).filter(|l| !gaps.contains(l)).collect();
    let restricted = phase(c, q, cutoff).set_zero(&others).exp()?.mul(&tau.series().set_zero(&others));
    let series = restricted.substitute(Family::U, &t_of_u(b, cutoff)?, cutoff)?;
    Ok(SigmaSeries {
        series,
        gaps: b.gaps().to_vec(),
        lambda: tau.lambda().clone(),
        gauge: q.gauge().clone(),
    })
}

/// `exp(Σ i·c_i t_i − ½ q̂(t)) τ(t) = σ(Bt)` over all of `t_1, …, t_W`.
pub fn factorization_check(
    tau: &TauSeries,
    sigma: &SigmaSeries,
    c: &[LambdaPolynomial],
    q: &QHatMatrix,
    b: &BMatrix,
) -> Result<Report> {
    let cutoff = tau.weight() as i64;
    let lhs = modified_tau(tau, c, q)?;
    let rhs = sigma.series().substitute(Family::T, &u_of_t(b, cutoff), cutoff)?;
    Ok(zero_report(
        "exp(Σ i·c_i t_i − ½ q̂(t)) τ(t) = σ(Bt) in all t",
        &lhs.sub(&rhs),
    ))
}

/// The leading part of `σ` is `s_{λ(n,s)}(u)` and every coefficient is
/// homogeneous of degree `weight − |λ(n,s)|`.
pub fn sigma_structure_reports(curve: &NSCurve, sigma: &SigmaSeries) -> Result<Vec<Report>> {
    let lam = sigma.lambda();
    let total = lam.weight() as i64;
    let series = sigma.series();
    let bound = series.cutoff();
    let mut out = Vec::new();
    // s_λ(u): the λ-free part of σ at weight |λ|, i.e. s_λ(t) at t = gap variables.
    let leading = series.component(total).map_coeffs(|p| {
        LambdaPolynomial::constant(p.coefficient(&crate::algebra::LambdaMonomial::one()))
    });
    let gaps: BTreeSet<u16> = sigma.gaps().iter().map(|&w| w as u16).collect();
    let others: BTreeSet<u16> = (1..=total as u16).filter(|l| !gaps.contains(l)).collect();
    let schur = crate::schur::schur(lam, total as u32)?
        .set_zero(&others)
        .relabel_family(Family::U);
    let leading = leading.truncate(total);
    let schur = schur.truncate(total);
    let mut bad = None;
    if leading != schur {
        bad = Some(format!("weight-{total} part is {leading}, expected {schur}"));
    }
    if bad.is_none() && series.valuation() < total {
        bad = Some(format!("σ has terms below weight {total}"));
    }
    out.push(Report::from_outcome(
        format!("σ(u) = s_{lam}(u) + higher terms"),
        bound,
        bad,
    ));
    if curve.is_homogeneous() && sigma.gauge().is_homogeneous(curve.signature(), sigma.gaps()) {
        let bad = series
            .first_inhomogeneous(curve.signature(), total)
            .map(|(m, c)| format!("coefficient of {} is {c}", m.to_string().replace('x', "u")));
        out.push(Report::from_outcome(
            format!("σ total-weight homogeneous of weight {total}"),
            bound,
            bad,
        ));
    }
    Ok(out)
}

/// Classical Weierstrass sigma through `u^W`, from
/// `σ = Σ a_{m,n} (g₂/2)^m (2g₃)^n u^{4m+6n+1}/(4m+6n+1)!`, `a_{0,0} = 1`,
/// `a_{m,n} = 3(m+1)a_{m+1,n−1} + (16/3)(n+1)a_{m−2,n+1} − (1/3)(2m+3n−1)(4m+6n−1)a_{m−1,n}`.
pub fn weierstrass_oracle(g2: &LambdaPolynomial, g3: &LambdaPolynomial, weight: u32) -> GradedSeries {
    let mut a: BTreeMap<(i64, i64), Rational> = BTreeMap::new();
    a.insert((0, 0), Rational::one());
    let get = |a: &BTreeMap<(i64, i64), Rational>, m: i64, n: i64| -> Rational {
        if m < 0 || n < 0 {
            Rational::zero()
        } else {
            a.get(&(m, n)).cloned().unwrap_or_else(Rational::zero)
        }
    };
    let max_k = (weight as i64 - 1) / 2;
    for k in 1..=max_k {
        // 2m + 3n = k.
        for n in 0..=k / 3 {
            let rem = k - 3 * n;
            if rem % 2 != 0 {
                continue;
            }
            let m = rem / 2;
            let v = int(3 * (m + 1)) * get(&a, m + 1, n - 1)
                + rat(16, 3) * int(n + 1) * get(&a, m - 2, n + 1)
                - rat(1, 3) * int((2 * m + 3 * n - 1) * (4 * m + 6 * n - 1)) * get(&a, m - 1, n);
            a.insert((m, n), v);
        }
    }
    let half_g2 = g2.scale(&rat(1, 2));
    let two_g3 = g3.scale(&int(2));
    let mut out = GradedSeries::zero(Family::U, weight as i64);
    for (&(m, n), coeff) in &a {
        let e = 4 * m + 6 * n + 1;
        if e > weight as i64 || coeff.is_zero() {
            continue;
        }
        let c = (&half_g2.pow(m as u32) * &two_g3.pow(n as u32))
            .scale(&(coeff / Rational::from_integer(factorial(e as u32))));
        out.add_term(VarMonomial::from_pairs([(1, e as u16)]), &c);
    }
    out
}

/// Everything computed for one curve and weight.
#[derive(Clone, Debug)]
pub struct Pipeline {
    pub curve: NSCurve,
    pub weight: u32,
    pub tau: TauSeries,
    pub c: Vec<LambdaPolynomial>,
    pub forms: KleinianData,
    pub sigma: SigmaSeries,
}

pub fn run_pipeline(curve: &NSCurve, weight: u32, gauge: &Gauge) -> Result<Pipeline> {
    let tau = build_tau(curve, weight)?;
    let c = c_coefficients(curve, weight)?;
    let forms = solve_dr(curve, weight, gauge)?;
    let sigma = build_sigma(&tau, &c, &forms.qhat, &forms.b)?;
    Ok(Pipeline {
        curve: curve.clone(),
        weight,
        tau,
        c,
        forms,
        sigma,
    })
}

/// `S` with `σ_{gauge'} = exp(−½ uᵀSu) σ_{gauge}`: `S = B_gap^{−T} (G' − G) B_gap^{−1}`.
pub fn gauge_change(b: &BMatrix, from: &Gauge, to: &Gauge) -> Result<PolyMatrix> {
    let g = b.genus();
    let (a, z) = (from.block(g)?, to.block(g)?);
    let diff: PolyMatrix = z
        .iter()
        .zip(&a)
        .map(|(zr, ar)| zr.iter().zip(ar).map(|(x, y)| x - y).collect())
        .collect();
    let inv = unitriangular_inverse(&b.gap_block())?;
    Ok(matmul(&matmul(&transpose(&inv), &diff), &inv))
}

/// `½ Σ S_ij u_{w_i} u_{w_j}`.
pub fn half_quadratic(s: &PolyMatrix, gaps: &[u32], cutoff: i64) -> GradedSeries {
    let mut out = GradedSeries::zero(Family::U, cutoff);
    for (i, row) in s.iter().enumerate() {
        for (j, e) in row.iter().enumerate() {
            let m = VarMonomial::from_pairs([(gaps[i] as u16, 1), (gaps[j] as u16, 1)]);
            out.add_term(m, &e.scale(&rat(1, 2)));
        }
    }
    out
}

/// All structural checks on a completed pipeline.
pub fn verify_pipeline(p: &Pipeline, kp_equations: usize) -> Result<Vec<Report>> {
    let mut out = Vec::new();
    out.push(crate::tau::bilinear_check("KP", &crate::tau::HirotaOperator::kp(), p.tau.series()));
    out.extend(crate::tau::kp_generating_check(&p.tau, kp_equations)?);
    out.extend(crate::tau::reduction_check(&p.tau, &p.c)?);
    if p.curve.is_homogeneous() {
        out.push(crate::tau::homogeneity_check(&p.tau)?);
    }
    out.push(crate::tau::t1_restriction_check(&p.tau)?);
    out.extend(forms_reports(&p.curve, &p.forms, &p.c)?);
    out.extend(sigma_structure_reports(&p.curve, &p.sigma)?);
    out.push(factorization_check(&p.tau, &p.sigma, &p.c, &p.forms.qhat, &p.forms.b)?);
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::Param;

    fn lam(i: u16, j: u16) -> LambdaPolynomial {
        LambdaPolynomial::var(Param::new(i, j))
    }

    #[test]
    fn oracle_first_terms() {
        let (g2, g3) = (lam(1, 0), lam(0, 0));
        let s = weierstrass_oracle(&g2, &g3, 9);
        let u = |e: u16| VarMonomial::from_pairs([(1, e)]);
        assert!(s.coeff(&u(1)).unwrap().is_one());
        assert_eq!(s.coeff(&u(5)).unwrap(), g2.scale(&rat(-1, 240)));
        assert_eq!(s.coeff(&u(7)).unwrap(), g3.scale(&rat(-1, 840)));
        assert_eq!(s.coeff(&u(9)).unwrap(), (&g2 * &g2).scale(&rat(-1, 161280)));
        let zero = weierstrass_oracle(&LambdaPolynomial::zero(), &LambdaPolynomial::zero(), 11);
        assert_eq!(zero, GradedSeries::var(Family::U, 1, 11));
    }

    #[test]
    fn oracle_satisfies_sigma_equation() {
        // ℘ = −(log σ)'' satisfies ℘'' = 6℘² − g₂/2 for the oracle series.
        let (g2, g3) = (lam(1, 0), lam(0, 0));
        let w = 15;
        let s = weierstrass_oracle(&g2, &g3, w);
        // σ/u = 1 + O(u⁴); log and derivatives on the reduced series.
        let reduced = GradedSeries::from_terms(
            Family::U,
            w as i64 - 1,
            s.terms().map(|(m, c)| {
                let e = m.exponent(1);
                (VarMonomial::from_pairs([(1, e - 1)]), c.clone())
            }),
        );
        let log = reduced.log().unwrap();
        // ℘ = 1/u² − (log(σ/u))''.
        let p_reg = log.derivative(1).derivative(1).neg();
        let lhs = p_reg.derivative(1).derivative(1);
        // 6(u⁻² + p)² − g₂/2 minus (6/u⁴) from d²(u⁻²); regular part:
        // 12 p/u² + 6p² − g₂/2 = p''.
        let p_over_u2: GradedSeries = GradedSeries::from_terms(
            Family::U,
            p_reg.cutoff() - 2,
            p_reg.terms().filter(|(m, _)| m.exponent(1) >= 2).map(|(m, c)| {
                (VarMonomial::from_pairs([(1, m.exponent(1) - 2)]), c.clone())
            }),
        );
        assert!(p_reg.coeff(&VarMonomial::one()).unwrap().is_zero());
        assert!(p_reg.coeff(&VarMonomial::var(1)).unwrap().is_zero());
        let rhs = p_over_u2
            .scale(&int(12))
            .add(&p_reg.mul(&p_reg).scale(&int(6)))
            .sub(&GradedSeries::constant(Family::U, g2.scale(&rat(1, 2)), 40));
        let diff = lhs.sub(&rhs);
        assert!(diff.is_zero(), "{diff}");
    }

    #[test]
    fn degenerate_sigma_is_schur() {
        let c = NSCurve::degenerate(2, 5).unwrap();
        let p = run_pipeline(&c, 8, &Gauge::ZeroGapBlock).unwrap();
        let expected = crate::schur::schur(&Partition::new(vec![2, 1]).unwrap(), 8)
            .unwrap()
            .set_zero(&[2u16, 4, 5, 6, 7, 8].into_iter().collect())
            .relabel_family(Family::U);
        assert_eq!(p.sigma.series(), &expected);
    }

    #[test]
    fn elliptic_matches_weierstrass() {
        let c = NSCurve::with_symbols(2, 3, &[Param::new(1, 0), Param::new(0, 0)]).unwrap();
        let w = 13;
        let p = run_pipeline(&c, w, &Gauge::ZeroGapBlock).unwrap();
        let oracle = weierstrass_oracle(&lam(1, 0).scale(&int(-4)), &lam(0, 0).scale(&int(-4)), w);
        assert_eq!(p.sigma.series(), &oracle);
        assert!(p.sigma.series().terms().all(|(m, _)| m.exponent(1) % 2 == 1));
    }

    #[test]
    fn pipeline_genus_two() {
        let c = NSCurve::symbolic(2, 5).unwrap();
        let p = run_pipeline(&c, 9, &Gauge::ZeroGapBlock).unwrap();
        let reports = verify_pipeline(&p, 4).unwrap();
        for r in &reports {
            eprintln!("{r}");
        }
        assert!(reports.iter().all(|r| r.pass));
    }

    #[test]
    fn t_of_u_round_trip() {
        let c = NSCurve::symbolic(3, 4).unwrap();
        let b = crate::forms::holomorphic_basis(&c, 8).unwrap();
        let images = t_of_u(&b, 8).unwrap();
        let bgap = b.gap_block();
        for (i, &wi) in b.gaps().iter().enumerate() {
            let mut u = GradedSeries::zero(Family::U, 8);
            for (k, &wk) in b.gaps().iter().enumerate() {
                u = u.add(&images[&(wk as u16)].scale_poly(&bgap[i][k]));
            }
            assert_eq!(u, GradedSeries::var(Family::U, wi as u16, 8));
        }
    }

    #[test]
    fn gauge_perturbation_is_quadratic_exponential() {
        let c = NSCurve::symbolic(2, 5).unwrap();
        let w = 9;
        let base = run_pipeline(&c, w, &Gauge::ZeroGapBlock).unwrap();
        // Homogeneous symmetric block: degrees w_i + w_j = 2, 4, 6.
        let block = vec![
            vec![lam(4, 0).scale(&int(3)), lam(1, 1).scale(&rat(1, 2))],
            vec![lam(1, 1).scale(&rat(1, 2)), &lam(0, 1) * &lam(1, 0)],
        ];
        let gauge = Gauge::GapBlock(block);
        let moved = run_pipeline(&c, w, &gauge).unwrap();
        let s = gauge_change(&base.forms.b, &Gauge::ZeroGapBlock, &gauge).unwrap();
        let factor = half_quadratic(&s, base.sigma.gaps(), w as i64).neg().exp().unwrap();
        assert_eq!(moved.sigma.series(), &factor.mul(base.sigma.series()));
        for r in verify_pipeline(&moved, 2).unwrap() {
            assert!(r.pass, "{r}");
        }
    }

    #[test]
    fn exponent_carries_the_index() {
        // Elliptic: ∂τ/∂t4 starts with λ10 t1 while c4 = −λ10/4.
        let c = NSCurve::with_symbols(2, 3, &[Param::new(1, 0), Param::new(0, 0)]).unwrap();
        let p = run_pipeline(&c, 7, &Gauge::ZeroGapBlock).unwrap();
        let t1 = VarMonomial::var(1);
        let d4 = p.tau.series().derivative(4);
        assert_eq!(d4.coeff(&t1).unwrap(), lam(1, 0));
        assert_eq!(p.c[3], lam(1, 0).scale(&rat(-1, 4)));
        assert_eq!(time_exponent(&p.c)[3], lam(1, 0).scale(&int(-1)));
    }
}
