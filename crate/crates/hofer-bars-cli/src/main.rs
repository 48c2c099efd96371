mod scenario;

use std::collections::BTreeMap;
use std::fs;
use std::panic::{self, AssertUnwindSafe};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use hofer_bars::barcodes::{barcode_from_json, barcodes_to_svg, bottleneck_distance, Bar, Barcode};
use hofer_bars::embedding::build_generators;
use hofer_bars::homotopy::CaseData;
use hofer_bars::spectrum::enumerate_spectrum;
use hofer_bars::tracker::{dispatch_case, run_certificate, BarCertificate};
use hofer_bars::{Error, ExtendedScalar, ManifoldParams, PLProfile, Quantity, Scalar};
use serde_json::{json, Value};

use scenario::Scenario;

const DIGITS: usize = 20;

#[derive(Parser)]
#[command(name = "hofer-bars", version, about = "Exact spectra, barcodes and bar certificates for radial PL Hamiltonians")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Indexed action spectrum of a profile file over a degree range.
    Spectrum {
        profile: PathBuf,
        #[command(flatten)]
        params: ParamFlags,
        /// Inclusive range `lo..hi`, or a single degree.
        #[arg(long, default_value = "-2..2", allow_hyphen_values = true)]
        degrees: String,
    },
    /// Bar certificate for one or more scenario files.
    Certificate {
        #[arg(required = true)]
        scenarios: Vec<PathBuf>,
        #[command(flatten)]
        params: ParamFlags,
        #[arg(long)]
        epsilon: Option<Scalar>,
        #[arg(long)]
        seed: Option<u64>,
        /// Scenario files processed concurrently.
        #[arg(long, default_value_t = 1)]
        jobs: usize,
        /// Directory for one SVG snapshot per logged event.
        #[arg(long)]
        frames: Option<PathBuf>,
    },
    /// Exact bottleneck distance between two barcode JSON files.
    Bottleneck { a: PathBuf, b: PathBuf },
}

#[derive(Args, Clone, Default)]
struct ParamFlags {
    #[arg(long)]
    n: Option<i64>,
    #[arg(long = "N")]
    chern: Option<i64>,
    /// γ̂ in units of 2π.
    #[arg(long)]
    gamma2pi: Option<Scalar>,
    #[arg(long, allow_hyphen_values = true)]
    lambda_sign: Option<i64>,
    #[arg(long = "R")]
    radius: Option<Scalar>,
    /// Comma-separated exterior Morse indices.
    #[arg(long)]
    exterior: Option<String>,
}

impl ParamFlags {
    /// Flags override `base`; without a base, n and R are required.
    fn resolve(&self, base: Option<&ManifoldParams>, radius: Option<&Scalar>) -> hofer_bars::Result<ManifoldParams> {
        let missing = |k: &str| Error::Parse(format!("--{k} is required"));
        let n = self.n.or(base.map(|p| p.n)).ok_or_else(|| missing("n"))?;
        let chern = self.chern.or(base.map(|p| p.chern)).unwrap_or(0);
        let gamma = self.gamma2pi.clone().or(base.map(|p| p.gamma_hat.clone())).unwrap_or_else(Scalar::zero);
        let sign = self.lambda_sign.or(base.map(|p| p.lambda_sign)).unwrap_or(if gamma.is_zero() { 0 } else { 1 });
        let r = self.radius.clone().or(base.map(|p| p.radius.clone())).or(radius.cloned()).ok_or_else(|| missing("R"))?;
        if let (Some(given), Some(file)) = (&self.radius, radius) {
            if given != file {
                return Err(Error::DomainMismatch(format!("--R {given} but the profile has R = {file}")));
            }
        }
        let ext = match &self.exterior {
            Some(s) => s
                .split(',')
                .map(|x| x.trim().parse::<i64>())
                .collect::<Result<Vec<_>, _>>()
                .map_err(|_| Error::Parse("--exterior must list integers".into()))?,
            None => base.map(|p| p.exterior_morse_indices.clone()).unwrap_or_else(|| vec![0]),
        };
        ManifoldParams::new(n, chern, gamma, sign, r, ext)
    }
}

/// A failure with its exit code.
struct Fail(u8, String);

impl From<Error> for Fail {
    fn from(e: Error) -> Fail {
        let code = match e {
            Error::RuleConflict { .. } => 3,
            _ => 2,
        };
        Fail(code, e.to_string())
    }
}

fn read(path: &Path) -> Result<String, Fail> {
    fs::read_to_string(path).map_err(|e| Fail(2, format!("{}: {e}", path.display())))
}

fn parse_degrees(s: &str) -> Result<Vec<i64>, Fail> {
    let bad = || Fail(2, format!("bad degree range {s:?}; expected lo..hi"));
    let (lo, hi) = match s.split_once("..") {
        Some((a, b)) => (a.trim().parse().map_err(|_| bad())?, b.trim().parse().map_err(|_| bad())?),
        None => {
            let d = s.trim().parse().map_err(|_| bad())?;
            (d, d)
        }
    };
    Ok((lo..=hi).collect())
}

fn cmd_spectrum(profile: &Path, flags: &ParamFlags, degrees: &str) -> Result<Value, Fail> {
    let f = PLProfile::parse_text(&read(profile)?)?;
    let p = flags.resolve(None, Some(f.radius()))?;
    let mut out = Vec::new();
    for d in parse_degrees(degrees)? {
        out.extend(enumerate_spectrum(&f, &p, d).iter().map(|a| {
            let mut v = a.to_json();
            v["decimal"] = json!(a.value.to_decimal(DIGITS));
            v
        }));
    }
    Ok(Value::Array(out))
}

fn quantity_json(q: &Quantity) -> Value {
    json!({"symbolic": q.to_string(), "twoPi": q.two_pi.to_string(), "raw": q.raw.to_string(), "decimal": q.to_decimal(DIGITS)})
}

/// The tracked bar at each logged event, as one SVG per event.
fn write_frames(dir: &Path, stem: &str, cert: &BarCertificate) -> Result<usize, Fail> {
    fs::create_dir_all(dir).map_err(|e| Fail(2, format!("{}: {e}", dir.display())))?;
    for (i, e) in cert.events.iter().enumerate() {
        let bars = match &e.left_value {
            Some(l) if l < &e.right_value => vec![Bar { left: l.clone(), right: ExtendedScalar::Finite(e.right_value.clone()) }],
            _ => vec![],
        };
        let mut codes = BTreeMap::new();
        codes.insert(cert.tracked_degree, Barcode::new(cert.tracked_degree, bars));
        let title = format!("leg {} t = {} {}", e.leg, e.event.time, e.rule.name());
        let path = dir.join(format!("{stem}-{i:03}.svg"));
        fs::write(&path, barcodes_to_svg(&codes, Some(&title))).map_err(|e| Fail(2, format!("{}: {e}", path.display())))?;
    }
    Ok(cert.events.len())
}

struct CertOpts<'a> {
    flags: &'a ParamFlags,
    epsilon: Option<&'a Scalar>,
    seed: Option<u64>,
    frames: Option<&'a Path>,
}

fn cmd_certificate(path: &Path, o: &CertOpts) -> Result<Value, Fail> {
    let mut sc = Scenario::parse(&read(path)?)?;
    sc.params = o.flags.resolve(Some(&sc.params), None)?;
    if let Some(e) = o.epsilon {
        sc.epsilon = e.clone();
    }
    if let Some(s) = o.seed {
        sc.seed = s;
    }
    let p = &sc.params;
    let fam = build_generators(p, &sc.epsilon, sc.m)?;
    let (data, k) = CaseData::from_embedding(&fam, &sc.padded(), p, sc.seed)?;
    let cert = run_certificate(p, &data)?;
    let len = cert.final_bar.length().ok_or_else(|| Fail(4, "certified bar is infinite".into()))?;
    if cert.lower_bound > Quantity::normalized(len.clone()) {
        return Err(Fail(4, format!("lower bound {} exceeds the bar length 2π·({len})", cert.lower_bound)));
    }
    // 2πR − (4π + 7)ε
    let two = Scalar::from_int(2);
    let target = Quantity::new(&p.radius - &two * &sc.epsilon, -(Scalar::from_int(7) * &sc.epsilon));
    let mut report = json!({
        "scenario": sc.to_text(),
        "case": dispatch_case(p).number(),
        "generator": k + 1,
        "certificate": cert.to_json(),
        "lowerBound": quantity_json(&cert.lower_bound),
        "targetBound": quantity_json(&target),
        "meetsTarget": cert.lower_bound >= target,
    });
    if let Some(dir) = o.frames {
        let stem = path.file_stem().and_then(|s| s.to_str()).unwrap_or("scenario");
        report["frames"] = json!(write_frames(dir, stem, &cert)?);
    }
    Ok(report)
}

fn cmd_bottleneck(a: &Path, b: &Path) -> Result<Value, Fail> {
    let load = |p: &Path| -> Result<Barcode, Fail> {
        let v: Value = serde_json::from_str(&read(p)?).map_err(|e| Fail(2, format!("{}: {e}", p.display())))?;
        Ok(barcode_from_json(&v)?)
    };
    let d = bottleneck_distance(&load(a)?, &load(b)?)?;
    let decimal = match &d {
        ExtendedScalar::Finite(x) => x.to_decimal(DIGITS),
        ExtendedScalar::Infinity => "inf".into(),
    };
    Ok(json!({"exact": d.to_string(), "decimal": decimal}))
}

/// Runs `f` on every path with at most `jobs` threads, keeping input order.
fn parallel<F>(paths: &[PathBuf], jobs: usize, f: F) -> Vec<Result<Value, Fail>>
where
    F: Fn(&Path) -> Result<Value, Fail> + Sync,
{
    let jobs = jobs.clamp(1, paths.len().max(1));
    let mut out: Vec<Option<Result<Value, Fail>>> = paths.iter().map(|_| None).collect();
    std::thread::scope(|s| {
        let chunks: Vec<_> = out.chunks_mut(paths.len().div_ceil(jobs).max(1)).collect();
        let mut start = 0;
        for chunk in chunks {
            let (f, base) = (&f, start);
            start += chunk.len();
            s.spawn(move || {
                for (i, slot) in chunk.iter_mut().enumerate() {
                    *slot = Some(guard(|| f(&paths[base + i])));
                }
            });
        }
    });
    out.into_iter().map(Option::unwrap).collect()
}

/// Panics inside the library are internal invariant breaches.
fn guard(f: impl FnOnce() -> Result<Value, Fail>) -> Result<Value, Fail> {
    panic::catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|e| {
        let msg = e.downcast_ref::<String>().cloned().or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()));
        Err(Fail(4, format!("internal invariant breach: {}", msg.unwrap_or_default())))
    })
}

fn emit(v: &Value) {
    println!("{}", serde_json::to_string_pretty(v).expect("JSON values serialize"));
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    panic::set_hook(Box::new(|_| {}));
    let results = match &cli.cmd {
        Cmd::Spectrum { profile, params, degrees } => vec![guard(|| cmd_spectrum(profile, params, degrees))],
        Cmd::Bottleneck { a, b } => vec![guard(|| cmd_bottleneck(a, b))],
        Cmd::Certificate { scenarios, params, epsilon, seed, jobs, frames } => {
            let o = CertOpts { flags: params, epsilon: epsilon.as_ref(), seed: *seed, frames: frames.as_deref() };
            let res = parallel(scenarios, *jobs, |p| cmd_certificate(p, &o));
            if scenarios.len() == 1 {
                res
            } else {
                let mut code = 0;
                let mut all = Vec::new();
                for (path, r) in scenarios.iter().zip(res) {
                    match r {
                        Ok(v) => all.push(v),
                        Err(Fail(c, msg)) => {
                            code = code.max(c);
                            all.push(json!({"path": path.display().to_string(), "error": msg, "exitCode": c}));
                        }
                    }
                }
                let v = Value::Array(all);
                vec![if code == 0 { Ok(v) } else { emit(&v); Err(Fail(code, "some scenarios failed".into())) }]
            }
        }
    };
    match results.into_iter().next().expect("one result") {
        Ok(v) => {
            emit(&v);
            ExitCode::SUCCESS
        }
        Err(Fail(code, msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(code)
        }
    }
}
