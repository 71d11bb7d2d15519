//! The ten acceptance criteria, exact (tolerance 0), one line each.

use std::io::Write;
use std::sync::OnceLock;
use std::time::{Duration, Instant};

use ns_sigma::algebra::rational::{int, rat, Rational};
use ns_sigma::algebra::{Family, LambdaPolynomial, Param, VarMonomial};
use ns_sigma::curve::NSCurve;
use ns_sigma::forms::{forms_reports, Gauge};
use ns_sigma::frame::{build_frame_window, normalize_frame};
use ns_sigma::report::Report;
use ns_sigma::schur::{schur, Partition};
use ns_sigma::sigma::{
    factorization_check, run_pipeline, sigma_structure_reports, weierstrass_oracle, Pipeline,
};
use ns_sigma::tau::{bilinear_check, homogeneity_check, kp_generating_check, reduction_check, t1_restriction_check, HirotaOperator};

/// `(2,5)` with every coefficient symbolic, through weight 12.
fn genus_two() -> &'static Pipeline {
    static P: OnceLock<Pipeline> = OnceLock::new();
    P.get_or_init(|| run_pipeline(&NSCurve::symbolic(2, 5).unwrap(), 12, &Gauge::ZeroGapBlock).unwrap())
}

/// `(3,4)` with every coefficient symbolic, through weight 10.
fn trigonal() -> &'static Pipeline {
    static P: OnceLock<Pipeline> = OnceLock::new();
    P.get_or_init(|| run_pipeline(&NSCurve::symbolic(3, 4).unwrap(), 10, &Gauge::ZeroGapBlock).unwrap())
}

/// `(2,3)` with all five coefficients symbolic, through weight 10.
fn elliptic_full() -> &'static Pipeline {
    static P: OnceLock<Pipeline> = OnceLock::new();
    P.get_or_init(|| run_pipeline(&NSCurve::symbolic(2, 3).unwrap(), 10, &Gauge::ZeroGapBlock).unwrap())
}

fn first_failure(reports: &[Report]) -> Option<String> {
    reports.iter().find(|r| !r.pass).map(|r| r.to_string())
}

fn fail_if(cond: bool, message: impl FnOnce() -> String) -> Option<String> {
    if cond {
        Some(message())
    } else {
        None
    }
}

fn c1_degenerate() -> Option<String> {
    for (n, s) in [(2, 3), (2, 5), (3, 4)] {
        let curve = NSCurve::degenerate(n, s).unwrap();
        let w = 10;
        let p = run_pipeline(&curve, w, &Gauge::ZeroGapBlock).unwrap();
        let s_lam = schur(&curve.partition_ns(), w).unwrap();
        if p.tau.series() != &s_lam {
            return Some(format!("({n},{s}): τ differs from s_λ"));
        }
        let gaps: Vec<u16> = p.sigma.gaps().iter().map(|&g| g as u16).collect();
        let others = (1..=w as u16).filter(|l| !gaps.contains(l)).collect();
        if p.sigma.series() != &s_lam.set_zero(&others).relabel_family(Family::U) {
            return Some(format!("({n},{s}): σ differs from s_λ(u)"));
        }
    }
    None
}

fn c2_containment() -> Option<String> {
    let curve = NSCurve::symbolic(2, 5).unwrap();
    let lam = curve.partition_ns();
    let p = genus_two();
    let xi_lam = p.tau.plucker().iter().find(|(m, _)| m == &lam).map(|(_, x)| x.clone());
    if xi_lam != Some(LambdaPolynomial::one()) {
        return Some(format!("ξ_λ = {xi_lam:?}"));
    }
    // μ ⊉ (2,1) means μ is a single row or column. A row (k) only meets the
    // first two columns up to row k − 1 and a column (1^k) only meets rows ≤ 0
    // of the first k columns, so each is read from a window of the frame.
    let rows = normalize_frame(&build_frame_window(&curve, 2, 24).unwrap());
    let cols = normalize_frame(&build_frame_window(&curve, 25, 1).unwrap());
    let mut sample = vec![(Partition::empty(), &rows)];
    for k in 1..=25 {
        sample.push((Partition::new(vec![k]).unwrap(), &rows));
        if k > 1 {
            sample.push((Partition::new(vec![1; k as usize]).unwrap(), &cols));
        }
    }
    sample.truncate(50);
    if sample.len() != 50 || sample.iter().any(|(m, _)| m.contains(&lam)) {
        return Some("bad sample".into());
    }
    for (mu, frame) in &sample {
        let xi = match frame.plucker(mu) {
            Ok(xi) => xi,
            Err(e) => return Some(format!("ξ_{mu}: {e}")),
        };
        if !xi.is_zero() {
            return Some(format!("ξ_{mu} = {xi}"));
        }
    }
    None
}

fn c3_homogeneity() -> Option<String> {
    let p = genus_two();
    let sig = p.curve.signature();
    for (mu, xi) in p.tau.plucker() {
        if !xi.is_homogeneous_of(sig, mu.weight() as i64 - 3) {
            return Some(format!("ξ_{mu} = {xi} is not of degree {}", mu.weight() as i64 - 3));
        }
    }
    let tau = homogeneity_check(&p.tau).unwrap();
    if !tau.pass {
        return Some(tau.to_string());
    }
    let sigma = sigma_structure_reports(&p.curve, &p.sigma).unwrap();
    first_failure(&sigma)
}

fn c4_kp() -> Option<String> {
    let p = genus_two();
    let kp = bilinear_check("KP", &HirotaOperator::kp(), p.tau.series());
    if !kp.pass || kp.weight_bound < 12 + 3 - 4 {
        return Some(kp.to_string());
    }
    let generating = kp_generating_check(&p.tau, 4).unwrap();
    fail_if(generating.len() != 4, || "fewer than 4 generating equations".into())
        .or_else(|| first_failure(&generating))
}

fn c5_reduction() -> Option<String> {
    for p in [genus_two(), trigonal()] {
        let reports = reduction_check(&p.tau, &p.c).unwrap();
        let bilinear = if p.curve.n() == 2 { "KdV" } else { "Boussinesq" };
        if !reports.iter().any(|r| r.name.starts_with(bilinear)) {
            return Some(format!("no {bilinear} check on {}", p.curve));
        }
        if let Some(f) = first_failure(&reports) {
            return Some(f);
        }
    }
    None
}

fn c6_forms() -> Option<String> {
    for p in [elliptic_full(), genus_two(), trigonal()] {
        let reports = forms_reports(&p.curve, &p.forms, &p.c).unwrap();
        if let Some(f) = first_failure(&reports) {
            return Some(format!("{}: {f}", p.curve));
        }
    }
    None
}

fn c7_factorization() -> Option<String> {
    for (p, w) in [(elliptic_full(), 10), (genus_two(), 12)] {
        let r = factorization_check(&p.tau, &p.sigma, &p.c, &p.forms.qhat, &p.forms.b).unwrap();
        if !r.pass || r.weight_bound < w {
            return Some(format!("{}: {r}", p.curve));
        }
    }
    None
}

fn c8_elliptic() -> Option<String> {
    let curve = NSCurve::with_symbols(2, 3, &[Param::new(1, 0), Param::new(0, 0)]).unwrap();
    let l10 = LambdaPolynomial::var(Param::new(1, 0));
    let l00 = LambdaPolynomial::var(Param::new(0, 0));
    let oracle = weierstrass_oracle(&l10.scale(&int(-4)), &l00.scale(&int(-4)), 13);
    let u = |e: u16| VarMonomial::from_pairs([(1, e)]);
    let expected = [
        (5, l10.scale(&rat(1, 60))),
        (7, l00.scale(&rat(1, 210))),
        (9, (&l10 * &l10).scale(&rat(-1, 10080))),
    ];
    for (e, c) in &expected {
        if oracle.coeff(&u(*e)).unwrap() != *c {
            return Some(format!("oracle u^{e} coefficient differs from {c}"));
        }
    }
    let p = run_pipeline(&curve, 13, &Gauge::ZeroGapBlock).unwrap();
    fail_if(p.sigma.series() != &oracle, || {
        format!("σ = {} differs from the oracle {oracle}", p.sigma.series())
    })
}

/// `1/Π hook lengths`, independent of the determinant formula.
fn hook_d(lam: &Partition) -> Rational {
    let conj = lam.conjugate();
    let mut prod = 1i64;
    for i in 1..=lam.len() {
        for j in 1..=lam.part(i) as usize {
            prod *= (lam.part(i) as i64 - j as i64) + (conj.part(j) as i64 - i as i64) + 1;
        }
    }
    rat(1, prod)
}

fn c9_t1_restriction() -> Option<String> {
    let start = Instant::now();
    for p in [elliptic_full(), genus_two(), trigonal()] {
        let r = t1_restriction_check(&p.tau).unwrap();
        if !r.pass {
            return Some(r.to_string());
        }
        let k = p.tau.lambda().weight();
        let lead = p.tau.t1_coefficient(k).unwrap();
        if lead != LambdaPolynomial::constant(hook_d(p.tau.lambda())) {
            return Some(format!("{}: t1^{k} coefficient {lead} differs from the hook formula", p.curve));
        }
    }
    fail_if(start.elapsed() > Duration::from_secs(1), || "slower than 1 s".into())
}

fn cli(args: &[&str]) -> (i32, Vec<u8>) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let code = ns_sigma_cli::run(std::iter::once("ns-sigma").chain(args.iter().copied()), &mut out, &mut err);
    (code, out)
}

fn c10_determinism() -> Option<String> {
    for cmd in ["tau", "sigma", "forms", "verify"] {
        let mut seen: Option<Vec<u8>> = None;
        for jobs in ["1", "2", "4", "1"] {
            let (code, out) = cli(&[cmd, "--n", "2", "--s", "5", "--lambda", "*=sym", "--weight", "8", "--jobs", jobs]);
            if code != 0 {
                return Some(format!("{cmd} --jobs {jobs} exited {code}"));
            }
            match &seen {
                None => seen = Some(out),
                Some(prev) if prev != &out => return Some(format!("{cmd} output depends on --jobs {jobs}")),
                _ => {}
            }
        }
    }
    let golden_dir = std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden");
    for (cmd, file) in [("tau", "tau_2_5_w8.json"), ("sigma", "sigma_2_5_w8.json")] {
        let golden = std::fs::read(golden_dir.join(file)).unwrap();
        let (_, out) = cli(&[cmd, "--n", "2", "--s", "5", "--lambda", "*=sym", "--weight", "8"]);
        if out != golden {
            return Some(format!("{cmd} differs from {file}"));
        }
    }
    None
}

#[test]
fn acceptance() {
    type Criterion = (&'static str, u64, fn() -> Option<String>);
    let criteria: [Criterion; 10] = [
        ("1 degenerate fiber: τ = s_λ and σ = s_λ(u) on (2,3), (2,5), (3,4)", 5, c1_degenerate),
        ("2 leading term and containment: ξ_λ = 1, ξ_μ = 0 for 50 μ ⊉ λ on (2,5)", 60, c2_containment),
        ("3 homogeneity: ξ_μ of degree |μ|−3 for |μ| ≤ 12; τ and σ homogeneous", 300, c3_homogeneity),
        ("4 KP bilinear and 4 generating-identity equations on (2,5), W=12", 600, c4_kp),
        ("5 reduction (∂_{nk} + nk·c_{nk})τ = 0, KdV on (2,5), Boussinesq on (3,4)", 600, c5_reduction),
        ("6 differential data on (2,3), (2,5), (3,4)", 300, c6_forms),
        ("7 factorization exp(Σ i·c_i t_i − ½q̂(t))τ = σ(Bt): (2,3) W=10, (2,5) W=12", 900, c7_factorization),
        ("8 elliptic σ equals the Weierstrass recursion through u^13", 60, c8_elliptic),
        ("9 τ(t1,0,…) = d_λ t1^|λ| (1 + O(t1)) with the hook-length d_λ", 1, c9_t1_restriction),
        ("10 determinism across runs and --jobs; (2,5) W=8 golden files", 600, c10_determinism),
    ];
    let mut failures = Vec::new();
    let mut stdout = std::io::stdout().lock();
    for (name, limit, check) in criteria {
        let start = Instant::now();
        let mut outcome = check();
        let elapsed = start.elapsed();
        if outcome.is_none() && elapsed > Duration::from_secs(limit) {
            outcome = Some(format!("took {elapsed:.1?}, limit {limit} s"));
        }
        let line = match &outcome {
            None => format!("PASS criterion {name} ({elapsed:.2?})"),
            Some(why) => format!("FAIL criterion {name} ({elapsed:.2?}): {why}"),
        };
        writeln!(stdout, "{line}").unwrap();
        if outcome.is_some() {
            failures.push(line);
        }
    }
    assert!(failures.is_empty(), "{}", failures.join("\n"));
}
