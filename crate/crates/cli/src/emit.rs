//! JSON and text rendering. Rationals are always `"num/den"` strings.

use serde_json::{json, Map, Value};

use ns_sigma::algebra::rational::{format_rational, parse_rational};
use ns_sigma::algebra::{Family, GradedSeries, LambdaMonomial, LambdaPolynomial, Param, VarMonomial};
use ns_sigma::curve::NSCurve;
use ns_sigma::forms::KleinianData;
use ns_sigma::report::Report;
use ns_sigma::{Error, Result};

use crate::config::parse_param_name;

pub const SCHEMA: &str = "ns-sigma/1";

/// `{ "e₁,e₂,…": "num/den" }` over the ordered parameter list.
pub fn coefficient_json(p: &LambdaPolynomial, params: &[Param]) -> Value {
    let mut out = Map::new();
    for (m, c) in p.terms() {
        let key: Vec<String> = params.iter().map(|&q| m.exponent(q).to_string()).collect();
        out.insert(format!("[{}]", key.join(",")), Value::String(format_rational(c)));
    }
    Value::Object(out)
}

pub fn parse_coefficient(v: &Value, params: &[Param]) -> Result<LambdaPolynomial> {
    let obj = v
        .as_object()
        .ok_or_else(|| Error::InvalidInput("coefficient must be an object".into()))?;
    let mut out = LambdaPolynomial::zero();
    for (key, value) in obj {
        let inner = key
            .strip_prefix('[')
            .and_then(|k| k.strip_suffix(']'))
            .ok_or_else(|| Error::InvalidInput(format!("bad exponent vector {key:?}")))?;
        let exps: Vec<u32> = if inner.is_empty() {
            Vec::new()
        } else {
            inner
                .split(',')
                .map(|e| e.trim().parse())
                .collect::<std::result::Result<_, _>>()
                .map_err(|_| Error::InvalidInput(format!("bad exponent vector {key:?}")))?
        };
        if exps.len() != params.len() {
            return Err(Error::InvalidInput(format!(
                "exponent vector {key:?} does not match {} parameters",
                params.len()
            )));
        }
        let value = value
            .as_str()
            .ok_or_else(|| Error::InvalidInput("rational must be a string".into()))?;
        let m = LambdaMonomial::from_pairs(params.iter().copied().zip(exps));
        out.add_term(m, parse_rational(value)?);
    }
    Ok(out)
}

pub fn params_json(params: &[Param]) -> Value {
    Value::Array(params.iter().map(|p| Value::String(p.to_string())).collect())
}

pub fn parse_params(v: &Value) -> Result<Vec<Param>> {
    v.as_array()
        .ok_or_else(|| Error::InvalidInput("parameters must be a list".into()))?
        .iter()
        .map(|p| {
            p.as_str()
                .ok_or_else(|| Error::InvalidInput("parameter names are strings".into()))
                .and_then(parse_param_name)
        })
        .collect()
}

pub fn curve_json(curve: &NSCurve) -> Value {
    let coefficients: Map<String, Value> = curve
        .coefficients()
        .iter()
        .map(|(p, c)| (format!("{},{}", p.i, p.j), Value::String(c.to_string())))
        .collect();
    json!({ "n": curve.n(), "s": curve.s(), "coefficients": coefficients })
}

/// Terms sorted by weight, then monomial.
fn sorted_terms(series: &GradedSeries) -> Vec<(&VarMonomial, &LambdaPolynomial)> {
    let mut terms: Vec<_> = series.terms().collect();
    terms.sort_by(|a, b| (a.0.weight(), a.0).cmp(&(b.0.weight(), b.0)));
    terms
}

/// `{ header, terms: [{ exponents, coefficient }] }`; `labels` fixes the
/// exponent-vector order.
pub fn series_json(header: Value, series: &GradedSeries, labels: &[u16], params: &[Param]) -> Value {
    let terms: Vec<Value> = sorted_terms(series)
        .into_iter()
        .map(|(m, c)| {
            let exps: Vec<u16> = labels.iter().map(|&l| m.exponent(l)).collect();
            json!({ "exponents": exps, "coefficient": coefficient_json(c, params) })
        })
        .collect();
    json!({ "header": header, "terms": terms })
}

/// Inverse of [`series_json`].
pub fn parse_series(doc: &Value) -> Result<GradedSeries> {
    let bad = |what: &str| Error::InvalidInput(format!("series document: {what}"));
    let header = doc.get("header").ok_or_else(|| bad("missing header"))?;
    let params = parse_params(header.get("parameters").ok_or_else(|| bad("missing parameters"))?)?;
    let family = match header.get("family").and_then(Value::as_str) {
        Some("t") => Family::T,
        Some("u") => Family::U,
        _ => return Err(bad("family must be \"t\" or \"u\"")),
    };
    let labels: Vec<u16> = header
        .get("labels")
        .and_then(Value::as_array)
        .ok_or_else(|| bad("missing labels"))?
        .iter()
        .map(|l| l.as_u64().map(|v| v as u16).ok_or_else(|| bad("labels are integers")))
        .collect::<Result<_>>()?;
    let cutoff = header
        .get("exact_through_weight")
        .and_then(Value::as_i64)
        .ok_or_else(|| bad("missing exact_through_weight"))?;
    let mut terms = Vec::new();
    for t in doc.get("terms").and_then(Value::as_array).ok_or_else(|| bad("missing terms"))? {
        let exps = t
            .get("exponents")
            .and_then(Value::as_array)
            .ok_or_else(|| bad("missing exponents"))?;
        if exps.len() != labels.len() {
            return Err(bad("exponent vector length differs from labels"));
        }
        let pairs = labels
            .iter()
            .zip(exps)
            .map(|(&l, e)| Ok((l, e.as_u64().ok_or_else(|| bad("exponents are integers"))? as u16)))
            .collect::<Result<Vec<_>>>()?;
        let m = VarMonomial::from_pairs(pairs.into_iter().filter(|&(_, e)| e > 0));
        let c = parse_coefficient(t.get("coefficient").ok_or_else(|| bad("missing coefficient"))?, &params)?;
        terms.push((m, c));
    }
    Ok(GradedSeries::from_terms(family, cutoff, terms))
}

pub fn matrix_json(m: &[Vec<LambdaPolynomial>], params: &[Param]) -> Value {
    Value::Array(
        m.iter()
            .map(|r| Value::Array(r.iter().map(|c| coefficient_json(c, params)).collect()))
            .collect(),
    )
}

pub fn report_json(r: &Report) -> Value {
    json!({
        "name": r.name,
        "pass": r.pass,
        "through_weight": r.weight_bound,
        "counterexample": r.counterexample,
    })
}

/// Human-readable series: one `coefficient * monomial` per line.
pub fn series_text(title: &str, header: &[(String, String)], series: &GradedSeries) -> String {
    let sym = series.family().symbol();
    let mut out = format!("# {title}\n");
    for (k, v) in header {
        out.push_str(&format!("# {k}: {v}\n"));
    }
    for (m, c) in sorted_terms(series) {
        let mono = m.to_string().replace('x', &sym.to_string());
        out.push_str(&format!("({c}) * {mono}\n"));
    }
    out
}

pub fn reports_text(reports: &[Report]) -> String {
    let mut out = String::new();
    for r in reports {
        out.push_str(&format!("{r}\n"));
    }
    let failed = reports.iter().filter(|r| !r.pass).count();
    out.push_str(&format!("{} checks, {} failed\n", reports.len(), failed));
    out
}

pub fn forms_doc(
    header: Value,
    data: &KleinianData,
    c: &[LambdaPolynomial],
    reports: &[Report],
    params: &[Param],
) -> Value {
    json!({
        "header": header,
        "b": matrix_json(&data.b.rows(), params),
        "c": c.iter().map(|x| coefficient_json(x, params)).collect::<Vec<_>>(),
        "qhat": matrix_json(data.qhat.entries(), params),
        "checks": reports.iter().map(report_json).collect::<Vec<_>>(),
    })
}

pub fn forms_text(
    header: &[(String, String)],
    data: &KleinianData,
    c: &[LambdaPolynomial],
    reports: &[Report],
) -> String {
    let mut out = String::from("# forms\n");
    for (k, v) in header {
        out.push_str(&format!("# {k}: {v}\n"));
    }
    for (i, row) in data.b.rows().iter().enumerate() {
        for (j, e) in row.iter().enumerate() {
            if !e.is_zero() {
                out.push_str(&format!("b[{},{}] = {e}\n", i + 1, j + 1));
            }
        }
    }
    for (i, ci) in c.iter().enumerate() {
        if !ci.is_zero() {
            out.push_str(&format!("c[{}] = {ci}\n", i + 1));
        }
    }
    for (i, row) in data.qhat.entries().iter().enumerate() {
        for (j, e) in row.iter().enumerate() {
            if j >= i && !e.is_zero() {
                out.push_str(&format!("qhat[{},{}] = {e}\n", i + 1, j + 1));
            }
        }
    }
    out.push_str(&reports_text(reports));
    out
}

pub fn render(value: &Value) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("JSON values always serialize");
    s.push('\n');
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use ns_sigma::algebra::rational::rat;

    #[test]
    fn coefficient_round_trip() {
        let params = [Param::new(4, 0), Param::new(2, 1)];
        let p = &LambdaPolynomial::var(params[0]).scale(&rat(-3, 7))
            + &(&LambdaPolynomial::var(params[1]) * &LambdaPolynomial::var(params[1]));
        let v = coefficient_json(&p, &params);
        assert_eq!(v["[1,0]"], "-3/7");
        assert_eq!(v["[0,2]"], "1/1");
        assert_eq!(parse_coefficient(&v, &params).unwrap(), p);
        let k = LambdaPolynomial::constant(rat(5, 2));
        assert_eq!(coefficient_json(&k, &[])["[]"], "5/2");
        assert_eq!(parse_coefficient(&coefficient_json(&k, &[]), &[]).unwrap(), k);
    }
}
