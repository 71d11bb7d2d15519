//! Job configuration assembled from command-line flags.

use std::collections::BTreeMap;
use std::path::PathBuf;

use ns_sigma::algebra::{Param, Signature};
use ns_sigma::curve::{Coefficient, NSCurve};
use ns_sigma::forms::Gauge;
use ns_sigma::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Json,
    Text,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Command {
    Curve,
    Tau,
    Sigma,
    Forms,
    Verify,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Curve => "curve",
            Command::Tau => "tau",
            Command::Sigma => "sigma",
            Command::Forms => "forms",
            Command::Verify => "verify",
        }
    }
}

#[derive(Clone, Debug)]
pub struct JobConfig {
    pub command: Command,
    pub curve: NSCurve,
    pub weight: u32,
    pub format: Format,
    pub cache: Option<PathBuf>,
    pub jobs: usize,
    pub gauge: Gauge,
}

impl JobConfig {
    pub fn validate(&self) -> Result<()> {
        let min = self.curve.partition_ns().weight();
        if self.command != Command::Curve && self.weight < min {
            return Err(Error::InvalidInput(format!(
                "--weight {} is below |λ(n,s)| = {min}",
                self.weight
            )));
        }
        if self.jobs == 0 {
            return Err(Error::InvalidInput("--jobs must be at least 1".into()));
        }
        Ok(())
    }
}

/// Parses `i,j=VAL` assignments; `*=VAL` sets every admissible coefficient.
/// One flag value may hold several assignments separated by `;` or spaces.
pub fn parse_curve(n: u32, s: u32, assignments: &[String]) -> Result<NSCurve> {
    if !(1 < n && n < s) {
        return Err(Error::InvalidCurve(format!("need 1 < n < s, got ({n},{s})")));
    }
    let sig = Signature::new(n, s);
    let mut coefficients = BTreeMap::new();
    let mut explicit = Vec::new();
    for item in assignments
        .iter()
        .flat_map(|a| a.split(|c: char| c == ';' || c.is_whitespace()))
        .filter(|a| !a.is_empty())
    {
        let (key, value) = item
            .split_once('=')
            .ok_or_else(|| Error::InvalidInput(format!("expected i,j=VAL, got {item:?}")))?;
        let value: Coefficient = value.parse()?;
        if key.trim() == "*" {
            for p in sig.params() {
                coefficients.insert(p, value.clone());
            }
        } else {
            explicit.push((parse_param(key)?, value));
        }
    }
    for (p, v) in explicit {
        coefficients.insert(p, v);
    }
    NSCurve::new(n, s, coefficients)
}

fn parse_param(key: &str) -> Result<Param> {
    let bad = || Error::InvalidInput(format!("expected a coefficient index i,j, got {key:?}"));
    let (i, j) = key.split_once(',').ok_or_else(bad)?;
    Ok(Param::new(
        i.trim().parse().map_err(|_| bad())?,
        j.trim().parse().map_err(|_| bad())?,
    ))
}

/// `l{i}_{j}`, as printed by the core library.
pub fn parse_param_name(name: &str) -> Result<Param> {
    let bad = || Error::InvalidInput(format!("not a parameter name: {name:?}"));
    let rest = name.strip_prefix('l').ok_or_else(bad)?;
    let (i, j) = rest.split_once('_').ok_or_else(bad)?;
    Ok(Param::new(i.parse().map_err(|_| bad())?, j.parse().map_err(|_| bad())?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use ns_sigma::algebra::rational::rat;

    #[test]
    fn assignments() {
        let c = parse_curve(2, 5, &["4,0=1/2; 2,1=sym".into(), "0,0=-3".into()]).unwrap();
        assert_eq!(c.coefficients()[&Param::new(4, 0)], Coefficient::Value(rat(1, 2)));
        assert_eq!(c.coefficients()[&Param::new(2, 1)], Coefficient::Symbolic);
        assert_eq!(c.coefficients()[&Param::new(0, 0)], Coefficient::Value(rat(-3, 1)));
        let all = parse_curve(2, 5, &["*=sym".into(), "3,0=0".into()]).unwrap();
        assert_eq!(all.symbols().len(), 7);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(parse_curve(2, 4, &[]).is_err());
        assert!(parse_curve(3, 2, &[]).is_err());
        assert!(parse_curve(2, 5, &["5,0=1".into()]).is_err());
        assert!(parse_curve(2, 5, &["4,0".into()]).is_err());
        assert!(parse_curve(2, 5, &["4,0=x".into()]).is_err());
        assert_eq!(parse_param_name("l2_1").unwrap(), Param::new(2, 1));
        assert!(parse_param_name("x2_1").is_err());
    }
}
