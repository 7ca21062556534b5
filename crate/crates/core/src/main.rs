use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value as Json};

use convexval::duality::TransformHandle;
use convexval::function::LogConcaveFn;
use convexval::geom::shadow_profile;
use convexval::harness::continuity::{build_sequence, continuity_fixture, residual_curve, SequenceSpec};
use convexval::harness::input::parse_json;
use convexval::harness::laws::CheckConfig;
use convexval::harness::suites::{run_suite, SuiteConfig};
use convexval::harness::{report, Evaluator, Input, ValuationReport};
use convexval::rat::{format_rat, parse_vector, rat_to_f64};
use convexval::real::Prec;
use convexval::transforms::{laplace_logconcave, laplace_polytope, legendre_f, legendre_s, polar};
use convexval::value::Value;
use convexval::{Error, Rat, Result, Vector};

#[derive(Parser)]
#[command(name = "convexval", version, about = "Exact polyhedral convex analysis and valuation law checks")]
struct Cli {
    /// Working precision of ball arithmetic, in bits.
    #[arg(long, global = true, env = "CONVEXVAL_PRECISION_BITS", default_value_t = 128)]
    precision_bits: u32,

    #[command(subcommand)]
    cmd: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Subcommand)]
enum Command {
    /// Legendre transform of a class-S or class-F function.
    Legendre {
        input: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Laplace transform of a polytope or log-concave function at points.
    Laplace {
        #[arg(long, conflicts_with = "input", required_unless_present = "input")]
        polytope: Option<PathBuf>,
        #[arg(long)]
        input: Option<PathBuf>,
        /// Points as `x1,x2,...;y1,y2,...`.
        #[arg(long)]
        at: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Polar `f° = e^{-(-log f)*}` of a log-concave function.
    Polar {
        input: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Infimal convolution of two class-S functions.
    Infconv {
        first: PathBuf,
        second: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Evaluate a transform handle on an input.
    FamilyEval {
        /// Handle JSON (file path or inline `{...}`).
        #[arg(long)]
        transform: String,
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        at: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run a verification suite (`all` runs every suite).
    Verify {
        suite: String,
        #[arg(long, default_value_t = 3, value_parser = clap::value_parser!(u32).range(1..=4))]
        dim: u32,
        #[arg(long, default_value = "0xC0FFEE", value_parser = parse_seed)]
        seed: u64,
        #[arg(long)]
        count: Option<usize>,
        #[arg(long, value_parser = parse_tol)]
        tol: Option<f64>,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
    /// Merge report JSON files.
    Report {
        #[arg(required = true)]
        reports: Vec<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
    },
    /// CSV data for external plotting.
    #[command(subcommand)]
    Plot(PlotCommand),
}

#[derive(Subcommand)]
enum PlotCommand {
    /// Shadow profile `t ↦ vol_{n-1}(P ∩ {x·y = t})`.
    Profile {
        #[arg(long)]
        polytope: PathBuf,
        #[arg(long)]
        direction: String,
        /// Samples per polynomial piece.
        #[arg(long, default_value_t = 8)]
        samples: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Residuals `i ↦ |Φ(u_i) - Φ(u_∞)|` along a convergent sequence.
    Continuity {
        /// Handle JSON (file path or inline `{...}`) or a bare transform id.
        #[arg(long, default_value = "legendre")]
        transform: String,
        #[arg(long, value_enum, default_value_t = SequenceArg::TranslateLimit)]
        sequence: SequenceArg,
        #[arg(long, default_value_t = 3, value_parser = clap::value_parser!(u32).range(1..=4))]
        dim: u32,
        #[arg(long, default_value = "0xC0FFEE", value_parser = parse_seed)]
        seed: u64,
        #[arg(long, default_value_t = 0)]
        fixture: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum SequenceArg {
    TranslateLimit,
    ScaleLimit,
    StaircaseLimit,
}

impl From<SequenceArg> for SequenceSpec {
    fn from(s: SequenceArg) -> Self {
        match s {
            SequenceArg::TranslateLimit => SequenceSpec::TranslateLimit,
            SequenceArg::ScaleLimit => SequenceSpec::ScaleLimit,
            SequenceArg::StaircaseLimit => SequenceSpec::StaircaseLimit,
        }
    }
}

fn parse_seed(s: &str) -> std::result::Result<u64, String> {
    let r = match s.strip_prefix("0x").or_else(|| s.strip_prefix("0X")) {
        Some(hex) => u64::from_str_radix(hex, 16),
        None => s.parse(),
    };
    r.map_err(|e| format!("invalid seed {s:?}: {e}"))
}

fn parse_tol(s: &str) -> std::result::Result<f64, String> {
    match s.parse::<f64>() {
        Ok(t) if t.is_finite() && t >= 0.0 => Ok(t),
        _ => Err(format!("tolerance must be a finite number >= 0, got {s:?}")),
    }
}

/// Outcome of a subcommand that did not error.
enum Outcome {
    Ok,
    CheckFailed(String),
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let prec = Prec(cli.precision_bits.max(16));
    match run(cli.cmd, prec) {
        Ok(Outcome::Ok) => ExitCode::SUCCESS,
        Ok(Outcome::CheckFailed(msg)) => {
            eprintln!("{msg}");
            ExitCode::from(1)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::parse(path.display().to_string(), e.to_string()))
}

fn located(path: &Path, e: Error) -> Error {
    match e {
        Error::Parse { location, message } => Error::parse(format!("{}: {location}", path.display()), message),
        other => other,
    }
}

fn read_input(path: &Path) -> Result<Input> {
    let input = Input::parse_str(&read(path)?).map_err(|e| located(path, e))?;
    check_dim(input.dim())?;
    Ok(input)
}

fn check_dim(n: usize) -> Result<()> {
    if (1..=4).contains(&n) {
        Ok(())
    } else {
        Err(Error::Input(format!("dimension {n} outside 1..=4")))
    }
}

fn read_handle(arg: &str) -> Result<TransformHandle> {
    let trimmed = arg.trim_start();
    if trimmed.starts_with('{') {
        TransformHandle::from_json(&parse_json(arg)?)
    } else if Path::new(arg).is_file() {
        let path = Path::new(arg);
        TransformHandle::from_json(&parse_json(&read(path)?).map_err(|e| located(path, e))?)
    } else {
        TransformHandle::from_json(&json!({ "transform": arg }))
    }
}

fn parse_points(at: &str, n: usize) -> Result<Vec<Vector>> {
    at.split(';')
        .filter(|s| !s.trim().is_empty())
        .enumerate()
        .map(|(i, s)| {
            let x = parse_vector(s).map_err(|e| match e {
                Error::Parse { location, message } => Error::parse(format!("--at point {}: {location}", i + 1), message),
                other => other,
            })?;
            if x.dim() != n {
                return Err(Error::parse(format!("--at point {}", i + 1), format!("has {} coordinates, expected {n}", x.dim())));
            }
            Ok(x)
        })
        .collect()
}

/// Writes next to the target and renames, so readers never see a partial file.
fn write_atomic(out: Option<&Path>, bytes: &[u8]) -> Result<()> {
    match out {
        None => {
            let mut so = std::io::stdout().lock();
            so.write_all(bytes)?;
            so.flush()?;
        }
        Some(path) => {
            let dir = path.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(Path::new("."));
            let name = path.file_name().ok_or_else(|| Error::Input(format!("{} is not a file path", path.display())))?;
            let tmp = dir.join(format!(".{}.{}.tmp", name.to_string_lossy(), std::process::id()));
            fs::write(&tmp, bytes)?;
            fs::rename(&tmp, path).inspect_err(|_| {
                let _ = fs::remove_file(&tmp);
            })?;
        }
    }
    Ok(())
}

fn write_json(out: Option<&Path>, v: &Json) -> Result<()> {
    let mut s = serde_json::to_string_pretty(v)?;
    s.push('\n');
    write_atomic(out, s.as_bytes())
}

fn values_json(points: &[Vector], values: Vec<Value>, prec: Prec) -> Result<Json> {
    let rows: Vec<Json> = points
        .iter()
        .zip(values)
        .map(|(x, v)| {
            let mut o = serde_json::to_value(v.to_json(prec)).expect("serializable");
            o.as_object_mut().expect("object").insert("x".into(), serde_json::to_value(x).expect("serializable"));
            o
        })
        .collect();
    Ok(Json::Array(rows))
}

fn run(cmd: Command, prec: Prec) -> Result<Outcome> {
    match cmd {
        Command::Legendre { input, out } => {
            let result = match read_input(&input)? {
                Input::S(u) => Input::F(legendre_s(&u)),
                Input::F(u) => Input::S(legendre_f(&u)),
                other => return Err(Error::Input(format!("legendre expects S or F input, got {}", other.class()))),
            };
            write_json(out.as_deref(), &result.to_json())?;
        }
        Command::Laplace { polytope, input, at, out } => {
            let path = polytope.or(input).expect("clap enforces one source");
            let source = read_input(&path)?;
            let points = parse_points(&at, source.dim())?;
            let values = points
                .iter()
                .map(|x| {
                    Ok(Value::Approx(match &source {
                        Input::Polytope(p) => laplace_polytope(p, x, prec)?,
                        Input::Lc(f) => laplace_logconcave(f, x, prec)?,
                        Input::S(u) => laplace_logconcave(&LogConcaveFn::from_s(u.clone()), x, prec)?,
                        Input::F(_) => return Err(Error::Input("laplace of e^{-u} needs u of class S".into())),
                    }))
                })
                .collect::<Result<Vec<_>>>()?;
            write_json(out.as_deref(), &values_json(&points, values, prec)?)?;
        }
        Command::Polar { input, out } => {
            let f = match read_input(&input)? {
                Input::Lc(f) => f,
                other => return Err(Error::Input(format!("polar expects a log-concave input, got {}", other.class()))),
            };
            write_json(out.as_deref(), &Input::Lc(polar(&f)?).to_json())?;
        }
        Command::Infconv { first, second, out } => {
            let (u, v) = match (read_input(&first)?, read_input(&second)?) {
                (Input::S(u), Input::S(v)) => (u, v),
                _ => return Err(Error::Input("infconv expects two class-S inputs".into())),
            };
            write_json(out.as_deref(), &Input::S(u.inf_conv(&v)?).to_json())?;
        }
        Command::FamilyEval { transform, input, at, out } => {
            let h = read_handle(&transform)?;
            let u = h.prepare(read_input(&input)?);
            let points = parse_points(&at, u.dim())?;
            let values = points.iter().map(|x| h.eval(&u, x, prec)).collect::<Result<Vec<_>>>()?;
            write_json(out.as_deref(), &values_json(&points, values, prec)?)?;
        }
        Command::Verify { suite, dim, seed, count, tol, out, format } => {
            let cfg = SuiteConfig { dim: dim as usize, seed, count, tol, prec };
            let r = run_suite(&suite, &cfg)?;
            write_report(&r, out.as_deref(), format)?;
            if let Some((i, law)) = r.laws.iter().enumerate().find(|(_, l)| !l.ok()) {
                let file = out.as_ref().map_or_else(|| "-".to_string(), |p| p.display().to_string());
                let pointer = match format {
                    Format::Json => format!("{file}#/laws/{i}/witness"),
                    Format::Csv => format!("{file} (row {}, column witness)", i + 2),
                };
                return Ok(Outcome::CheckFailed(format!(
                    "check failed: {} (max residual {:e}, tolerance {:e}); witness: {pointer}",
                    law.name, law.max_residual, law.tolerance
                )));
            }
        }
        Command::Report { reports, out, format } => {
            let parsed = reports
                .iter()
                .map(|p| {
                    let v = parse_json(&read(p)?).map_err(|e| located(p, e))?;
                    serde_json::from_value::<ValuationReport>(v).map_err(|e| Error::parse(p.display().to_string(), e.to_string()))
                })
                .collect::<Result<Vec<_>>>()?;
            match format {
                Format::Csv => {
                    let mut buf = Vec::new();
                    report::write_csv(&parsed, &mut buf)?;
                    write_atomic(out.as_deref(), &buf)?;
                }
                Format::Json => {
                    let merged = parsed.iter().skip(1).fold(parsed[0].clone(), |acc, r| acc.merge(r));
                    write_json(out.as_deref(), &serde_json::to_value(&merged)?)?;
                }
            }
            if let Some(r) = parsed.iter().find(|r| !r.pass) {
                return Ok(Outcome::CheckFailed(format!("report for suite {} records a failure", r.suite)));
            }
        }
        Command::Plot(p) => plot(p, prec)?,
    }
    Ok(Outcome::Ok)
}

fn write_report(r: &ValuationReport, out: Option<&Path>, format: Format) -> Result<()> {
    match format {
        Format::Json => {
            let mut s = r.to_json_string();
            s.push('\n');
            write_atomic(out, s.as_bytes())
        }
        Format::Csv => {
            let mut buf = Vec::new();
            r.write_csv(&mut buf)?;
            write_atomic(out, &buf)
        }
    }
}

fn plot(cmd: PlotCommand, prec: Prec) -> Result<()> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let io = |e: csv::Error| Error::Io(std::io::Error::other(e));
    let out = match cmd {
        PlotCommand::Profile { polytope, direction, samples, out } => {
            let p = match read_input(&polytope)? {
                Input::Polytope(p) => p,
                other => return Err(Error::Input(format!("profile expects a polytope, got {}", other.class()))),
            };
            let x = parse_points(&direction, p.ambient_dim())?.pop().ok_or_else(|| Error::parse("--direction", "empty"))?;
            let prof = shadow_profile(&p, &x)?;
            w.write_record(["t", "profile"]).map_err(io)?;
            let bp = &prof.breakpoints;
            let k = samples.max(1) as i64;
            for i in 0..bp.len().saturating_sub(1) {
                let width = &bp[i + 1] - &bp[i];
                for j in 0..k {
                    let t = &bp[i] + &width * Rat::new(j.into(), k.into());
                    w.write_record([format_rat(&t), rat_to_f64(&prof.eval(&t)).to_string()]).map_err(io)?;
                }
            }
            if let Some(last) = bp.last() {
                w.write_record([format_rat(last), rat_to_f64(&prof.eval(last)).to_string()]).map_err(io)?;
            }
            out
        }
        PlotCommand::Continuity { transform, sequence, dim, seed, fixture, out } => {
            let h = read_handle(&transform)?;
            let mut cfg = CheckConfig::new(dim as usize, seed, fixture + 1);
            cfg.prec = prec;
            let spec = SequenceSpec::from(sequence);
            let (u, y, probes) = continuity_fixture(&h, spec, &cfg, fixture);
            let seq = build_sequence(spec, &u, &y)?;
            w.write_record(["index", "residual"]).map_err(io)?;
            for (i, r) in residual_curve(&h, &seq, &probes, prec)? {
                w.write_record([i.to_string(), format!("{r:e}")]).map_err(io)?;
            }
            out
        }
    };
    let bytes = w.into_inner().map_err(|e| Error::Io(std::io::Error::other(e.to_string())))?;
    write_atomic(out.as_deref(), &bytes)
}
