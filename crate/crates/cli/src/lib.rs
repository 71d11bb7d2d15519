//! Command-line driver: `curve`, `tau`, `sigma`, `forms` and `verify`.
//!
//! Exit codes: 0 success, 1 verification failure, 2 usage or input error.

pub mod cache;
pub mod config;
pub mod emit;

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use ns_sigma::algebra::rational::parse_rational;
use ns_sigma::algebra::{LambdaPolynomial, Param};
use ns_sigma::curve::NSCurve;
use ns_sigma::forms::{c_coefficients, forms_reports, solve_dr, Gauge};
use ns_sigma::schur::Partition;
use ns_sigma::sigma::{run_pipeline, verify_pipeline};
use ns_sigma::tau::build_tau;
use ns_sigma::Error;

use cache::Cache;
use config::{parse_curve, Command, Format, JobConfig};
use emit::SCHEMA;

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Parser, Debug)]
#[command(name = "ns-sigma", version, about = "Exact tau and sigma expansions for (n,s)-curves")]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// Genus, gaps, monomial basis and λ(n,s).
    Curve(CurveArgs),
    /// Schur expansion of τ as JSON or text.
    Tau(JobArgs),
    /// σ(u) through the given weight.
    Sigma(JobArgs),
    /// b_ij, c_i, q̂_ij and the pairing checks.
    Forms(JobArgs),
    /// Run every structural check; exit 1 on any failure.
    Verify(VerifyArgs),
}

#[derive(Args, Debug)]
struct CurveArgs {
    #[arg(long)]
    n: u32,
    #[arg(long)]
    s: u32,
    /// Coefficient assignment `i,j=VAL` with VAL a rational or `sym`;
    /// `*=VAL` sets all. Unlisted coefficients are zero.
    #[arg(long = "lambda", value_name = "i,j=VAL")]
    lambda: Vec<String>,
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
    /// Write here instead of stdout.
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct JobArgs {
    #[command(flatten)]
    curve: CurveArgs,
    #[arg(long)]
    weight: u32,
    /// Result cache directory (NS_SIGMA_CACHE overrides).
    #[arg(long)]
    cache: Option<PathBuf>,
    /// Worker threads.
    #[arg(long)]
    jobs: Option<usize>,
    /// JSON file fixing the gap block of q̂.
    #[arg(long)]
    gauge: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct VerifyArgs {
    #[command(flatten)]
    job: JobArgs,
    /// Number of generating-identity coefficients to check.
    #[arg(long, default_value_t = 4)]
    kp_equations: usize,
    /// Add VAL to ξ_μ before checking, e.g. `2,2=1`.
    #[arg(long, hide = true, value_name = "PARTS=VAL")]
    perturb: Option<String>,
}

/// Failure of a command, tagged with its exit code.
#[derive(Debug)]
struct Failure {
    code: i32,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::InvalidInput(_) | Error::InvalidCurve(_) | Error::CutoffTooSmall { .. } => EXIT_USAGE,
            _ => EXIT_FAILED,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

fn usage(message: impl Into<String>) -> Failure {
    Failure {
        code: EXIT_USAGE,
        message: message.into(),
    }
}

/// Parses `args` (program name first), runs the command and returns the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                let _ = write!(err, "{text}");
                EXIT_USAGE
            } else {
                let _ = write!(out, "{text}");
                EXIT_OK
            };
        }
    };
    match execute(cli) {
        Ok((text, target, code)) => {
            let written = match target {
                Some(path) => std::fs::write(&path, text.as_bytes())
                    .map_err(|e| format!("cannot write {}: {e}", path.display())),
                None => out.write_all(text.as_bytes()).map_err(|e| e.to_string()),
            };
            match written {
                Ok(()) => code,
                Err(m) => {
                    let _ = writeln!(err, "error: {m}");
                    EXIT_USAGE
                }
            }
        }
        Err(f) => {
            let _ = writeln!(err, "error: {}", f.message);
            f.code
        }
    }
}

type Outcome = (String, Option<PathBuf>, i32);

fn execute(cli: Cli) -> Result<Outcome, Failure> {
    match cli.command {
        Cmd::Curve(a) => {
            let curve = parse_curve(a.n, a.s, &a.lambda)?;
            Ok((curve_output(&curve, a.format), a.output, EXIT_OK))
        }
        Cmd::Tau(a) => job(Command::Tau, a),
        Cmd::Sigma(a) => job(Command::Sigma, a),
        Cmd::Forms(a) => job(Command::Forms, a),
        Cmd::Verify(v) => {
            let output = v.job.curve.output.clone();
            let config = job_config(Command::Verify, &v.job)?;
            let perturb = v.perturb.as_deref().map(parse_perturbation).transpose()?;
            let (text, pass) = in_pool(config.jobs, || verify(&config, v.kp_equations, perturb.as_ref()))??;
            Ok((text, output, if pass { EXIT_OK } else { EXIT_FAILED }))
        }
    }
}

fn job_config(command: Command, a: &JobArgs) -> Result<JobConfig, Failure> {
    let curve = parse_curve(a.curve.n, a.curve.s, &a.curve.lambda)?;
    let gauge = match &a.gauge {
        Some(path) => read_gauge(path, &curve)?,
        None => Gauge::ZeroGapBlock,
    };
    let jobs = a.jobs.unwrap_or_else(|| {
        std::thread::available_parallelism().map_or(1, |n| n.get())
    });
    let config = JobConfig {
        command,
        curve,
        weight: a.weight,
        format: a.curve.format,
        cache: a.cache.clone(),
        jobs,
        gauge,
    };
    config.validate()?;
    Ok(config)
}

fn in_pool<R: Send>(jobs: usize, f: impl FnOnce() -> R + Send) -> Result<R, Failure> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .map_err(|e| usage(format!("cannot start {jobs} worker threads: {e}")))?;
    Ok(pool.install(f))
}

fn job(command: Command, a: JobArgs) -> Result<Outcome, Failure> {
    let config = job_config(command, &a)?;
    let cache = Cache::resolve(config.cache.as_deref());
    let format = match config.format {
        Format::Json => "json",
        Format::Text => "text",
    };
    let weight = config.weight.to_string();
    let curve = config.curve.to_string();
    let gauge = config.gauge.descriptor();
    let key = Cache::key(&[SCHEMA, command.name(), format, &curve, &weight, &gauge]);
    if let Some(text) = cache.as_ref().and_then(|c| c.get(&key)) {
        return Ok((text, a.curve.output, EXIT_OK));
    }
    let text = in_pool(config.jobs, || match command {
        Command::Tau => tau_output(&config),
        Command::Sigma => sigma_output(&config),
        Command::Forms => forms_output(&config),
        Command::Curve | Command::Verify => unreachable!("not a cached job"),
    })??;
    if let Some(c) = &cache {
        c.put(&key, &text)
            .map_err(|e| usage(format!("cannot write cache {}: {e}", c.dir().display())))?;
    }
    Ok((text, a.curve.output, EXIT_OK))
}

fn lambda_ns(curve: &NSCurve) -> Vec<u32> {
    curve.partition_ns().parts().to_vec()
}

fn base_header(kind: &str, config: &JobConfig) -> Value {
    json!({
        "schema": SCHEMA,
        "kind": kind,
        "curve": emit::curve_json(&config.curve),
        "weight": config.weight,
        "lambda_ns": lambda_ns(&config.curve),
        "parameters": emit::params_json(&config.curve.symbols()),
    })
}

fn text_header(config: &JobConfig) -> Vec<(String, String)> {
    vec![
        ("curve".into(), config.curve.to_string()),
        ("weight".into(), config.weight.to_string()),
        ("lambda(n,s)".into(), config.curve.partition_ns().to_string()),
    ]
}

fn curve_output(curve: &NSCurve, format: Format) -> String {
    let sg = curve.semigroup();
    let g = curve.genus() as usize;
    let basis = curve.basis_monomials(2 * g.max(1));
    let sig = curve.signature();
    match format {
        Format::Json => {
            let params: Vec<Value> = sig
                .params()
                .into_iter()
                .map(|p| {
                    json!({
                        "name": p.to_string(),
                        "degree": sig.param_degree(p),
                        "value": curve.coefficients().get(&p).map_or("0".to_string(), |c| c.to_string()),
                    })
                })
                .collect();
            let basis: Vec<Value> = basis
                .iter()
                .map(|b| json!({ "index": b.index, "monomial": b.to_string(), "m1": b.m1, "m2": b.m2, "order": b.order }))
                .collect();
            emit::render(&json!({
                "header": { "schema": SCHEMA, "kind": "curve", "curve": emit::curve_json(curve) },
                "genus": g,
                "gaps": sg.gaps,
                "nongaps": sg.nongaps,
                "basis": basis,
                "lambda_ns": lambda_ns(curve),
                "parameters": params,
            }))
        }
        Format::Text => {
            let list = |v: &[u32]| v.iter().map(u32::to_string).collect::<Vec<_>>().join(", ");
            let mut out = format!("curve: {curve}\ngenus: {g}\n");
            out.push_str(&format!("gaps: {}\n", list(&sg.gaps)));
            out.push_str(&format!("nongaps below 2g: {}\n", list(&sg.nongaps)));
            let names: Vec<String> = basis.iter().map(|b| format!("{b} ({})", b.order)).collect();
            out.push_str(&format!("basis: {}\n", names.join(", ")));
            out.push_str(&format!("lambda(n,s): {}\n", curve.partition_ns()));
            for p in sig.params() {
                let value = curve.coefficients().get(&p).map_or("0".to_string(), |c| c.to_string());
                out.push_str(&format!("{p} (degree {}): {value}\n", sig.param_degree(p)));
            }
            out
        }
    }
}

fn tau_output(config: &JobConfig) -> Result<String, Failure> {
    let tau = build_tau(&config.curve, config.weight)?;
    let labels: Vec<u16> = (1..=config.weight as u16).collect();
    Ok(match config.format {
        Format::Json => {
            let mut header = base_header("tau", config);
            header["family"] = json!("t");
            header["labels"] = json!(labels);
            header["exact_through_weight"] = json!(config.weight);
            emit::render(&emit::series_json(header, tau.series(), &labels, &config.curve.symbols()))
        }
        Format::Text => emit::series_text("tau", &text_header(config), tau.series()),
    })
}

fn sigma_output(config: &JobConfig) -> Result<String, Failure> {
    let p = run_pipeline(&config.curve, config.weight, &config.gauge)?;
    let labels: Vec<u16> = p.sigma.gaps().iter().map(|&g| g as u16).collect();
    Ok(match config.format {
        Format::Json => {
            let mut header = base_header("sigma", config);
            header["family"] = json!("u");
            header["labels"] = json!(labels);
            header["exact_through_weight"] = json!(config.weight);
            header["gauge"] = json!(config.gauge.descriptor());
            emit::render(&emit::series_json(header, p.sigma.series(), &labels, &config.curve.symbols()))
        }
        Format::Text => {
            let mut header = text_header(config);
            header.push(("gauge".into(), config.gauge.descriptor()));
            emit::series_text("sigma", &header, p.sigma.series())
        }
    })
}

fn forms_output(config: &JobConfig) -> Result<String, Failure> {
    let c = c_coefficients(&config.curve, config.weight)?;
    let data = solve_dr(&config.curve, config.weight, &config.gauge)?;
    let reports = forms_reports(&config.curve, &data, &c)?;
    Ok(match config.format {
        Format::Json => {
            let mut header = base_header("forms", config);
            header["gauge"] = json!(config.gauge.descriptor());
            emit::render(&emit::forms_doc(header, &data, &c, &reports, &config.curve.symbols()))
        }
        Format::Text => {
            let mut header = text_header(config);
            header.push(("gauge".into(), config.gauge.descriptor()));
            emit::forms_text(&header, &data, &c, &reports)
        }
    })
}

fn verify(
    config: &JobConfig,
    kp_equations: usize,
    perturb: Option<&(Partition, LambdaPolynomial)>,
) -> Result<(String, bool), Failure> {
    let mut p = run_pipeline(&config.curve, config.weight, &config.gauge)?;
    if let Some((mu, delta)) = perturb {
        p.tau = p.tau.perturbed(mu, delta)?;
    }
    let reports = verify_pipeline(&p, kp_equations)?;
    let pass = reports.iter().all(|r| r.pass);
    let text = match config.format {
        Format::Json => {
            let mut header = base_header("verify", config);
            header["gauge"] = json!(config.gauge.descriptor());
            emit::render(&json!({
                "header": header,
                "pass": pass,
                "checks": reports.iter().map(emit::report_json).collect::<Vec<_>>(),
            }))
        }
        Format::Text => emit::reports_text(&reports),
    };
    Ok((text, pass))
}

fn parse_perturbation(text: &str) -> Result<(Partition, LambdaPolynomial), Failure> {
    let (parts, value) = text
        .split_once('=')
        .ok_or_else(|| usage(format!("expected PARTS=VAL, got {text:?}")))?;
    let parts: Vec<u32> = parts
        .split(',')
        .map(|p| p.trim().parse())
        .collect::<Result<_, _>>()
        .map_err(|_| usage(format!("bad partition {parts:?}")))?;
    let mu = Partition::new(parts)?;
    Ok((mu, LambdaPolynomial::constant(parse_rational(value)?)))
}

/// `{"parameters": ["l4_0", …], "gap_block": [[coefficient, …], …]}` with
/// coefficients in the output schema.
fn read_gauge(path: &Path, curve: &NSCurve) -> Result<Gauge, Failure> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| usage(format!("cannot read gauge file {}: {e}", path.display())))?;
    let doc: Value = serde_json::from_str(&text)
        .map_err(|e| usage(format!("gauge file {}: {e}", path.display())))?;
    let gauge = parse_gauge(&doc)?;
    let symbols = curve.symbols();
    if let Gauge::GapBlock(m) = &gauge {
        let stray: Vec<Param> = m
            .iter()
            .flatten()
            .flat_map(|c| c.params())
            .filter(|p| !symbols.contains(p))
            .collect();
        if let Some(p) = stray.first() {
            return Err(usage(format!("gauge uses {p}, which is not a symbolic coefficient")));
        }
    }
    gauge.block(curve.genus() as usize)?;
    Ok(gauge)
}

pub fn parse_gauge(doc: &Value) -> ns_sigma::Result<Gauge> {
    let params = match doc.get("parameters") {
        Some(v) => emit::parse_params(v)?,
        None => Vec::new(),
    };
    let rows = doc
        .get("gap_block")
        .and_then(Value::as_array)
        .ok_or_else(|| Error::InvalidInput("gauge file needs a gap_block matrix".into()))?;
    let block = rows
        .iter()
        .map(|r| {
            r.as_array()
                .ok_or_else(|| Error::InvalidInput("gap_block rows are lists".into()))?
                .iter()
                .map(|c| emit::parse_coefficient(c, &params))
                .collect()
        })
        .collect::<ns_sigma::Result<Vec<Vec<_>>>>()?;
    if block.iter().flatten().all(|c| c.is_zero()) {
        return Ok(Gauge::ZeroGapBlock);
    }
    Ok(Gauge::GapBlock(block))
}
