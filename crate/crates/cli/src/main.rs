use std::f64::consts::{FRAC_PI_2, PI};
use std::fs::File;
use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;
use std::str::FromStr;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Map, Value};
use sphtri::densities::{DensityError, DensityId};
use sphtri::sampling::{collect, correlation, estimate, MonteCarloEstimate, RngStream, SideName, TriangleSampler};
use sphtri::tessellation::{cell_statistics, CellScheme};
use sphtri::verification::{format_sig, registry, run_constant, run_suite, ConstantCheck, RouteKind, SuiteConfig};

#[derive(Parser, Debug)]
#[command(name = "sphtri", version, about = "Random spherical triangles: densities, moments, samplers and tessellations")]
#[command(allow_negative_numbers = true)]
struct Cli {
    /// Random seed.
    #[arg(long, global = true, env = "SPHTRI_SEED", default_value_t = 0)]
    seed: u64,
    /// Monte Carlo sample count.
    #[arg(long, global = true, default_value_t = 1_000_000, value_parser = parse_samples)]
    samples: usize,
    /// Tolerance for exact checks.
    #[arg(long, global = true, default_value_t = 1e-9, value_parser = parse_tol, allow_negative_numbers = true)]
    tol: f64,
    #[arg(long, global = true, value_enum, default_value_t = Output::Human)]
    output: Output,
    /// Shorthand for `--output json`.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Output {
    Human,
    Json,
    Csv,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Evaluate every registered constant along all routes.
    Verify {
        /// Arrangements per tessellation check.
        #[arg(long, default_value_t = 100_000, value_parser = parse_samples)]
        trials: usize,
    },
    /// List registered constants, or evaluate one of them.
    Constants {
        name: Option<String>,
        /// Include Monte Carlo routes.
        #[arg(long)]
        with_mc: bool,
        #[arg(long, default_value_t = 100_000, value_parser = parse_samples)]
        trials: usize,
    },
    /// Tabulate a density on a regular grid.
    Density {
        #[arg(value_parser = parse_density)]
        name: DensityId,
        #[arg(long, value_parser = parse_radians, allow_negative_numbers = true)]
        from: Option<f64>,
        #[arg(long, value_parser = parse_radians, allow_negative_numbers = true)]
        to: Option<f64>,
        /// Grid points per axis, endpoints included.
        #[arg(long, default_value_t = 101, value_parser = clap::value_parser!(u64).range(1..=100_000))]
        steps: u64,
        #[arg(long, value_parser = parse_radians, allow_negative_numbers = true)]
        y_from: Option<f64>,
        #[arg(long, value_parser = parse_radians, allow_negative_numbers = true)]
        y_to: Option<f64>,
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..=100_000))]
        y_steps: Option<u64>,
        #[arg(long, value_parser = parse_radians, allow_negative_numbers = true)]
        z_from: Option<f64>,
        #[arg(long, value_parser = parse_radians, allow_negative_numbers = true)]
        z_to: Option<f64>,
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..=100_000))]
        z_steps: Option<u64>,
        /// Write to a file instead of standard output.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Monte Carlo estimate of a triangle moment.
    Mc {
        #[arg(value_parser = parse_quantity)]
        quantity: Quantity,
    },
    /// Cell statistics of random great-circle arrangements.
    Tessellate {
        #[arg(long, value_parser = clap::value_parser!(u64).range(2..=62))]
        k: u64,
        #[arg(long, default_value_t = 100_000, value_parser = parse_samples)]
        trials: usize,
        #[arg(long, default_value_t = CellScheme::Uniform, value_parser = parse_scheme)]
        scheme: CellScheme,
    },
}

fn parse_samples(s: &str) -> Result<usize, String> {
    let n: usize = s.parse().map_err(|e| format!("{e}"))?;
    if n < 2 {
        return Err("must be at least 2".into());
    }
    Ok(n)
}

fn parse_tol(s: &str) -> Result<f64, String> {
    let t: f64 = s.parse().map_err(|e| format!("{e}"))?;
    if !(t.is_finite() && t > 0.0) {
        return Err("must be a positive number".into());
    }
    Ok(t)
}

/// Decimal radians or one of `pi`, `pi/2`, `pi/3`, `pi/4`.
fn parse_radians(s: &str) -> Result<f64, String> {
    let v = match s {
        "pi" => PI,
        "pi/2" => FRAC_PI_2,
        "pi/3" => PI / 3.0,
        "pi/4" => PI / 4.0,
        _ => s.parse().map_err(|_| format!("`{s}` is not a number of radians"))?,
    };
    if v.is_finite() {
        Ok(v)
    } else {
        Err("must be finite".into())
    }
}

fn parse_density(s: &str) -> Result<DensityId, String> {
    DensityId::from_str(s).map_err(|_| {
        let names: Vec<&str> = DensityId::ALL.iter().map(|d| d.name()).collect();
        format!("unknown density `{s}`; expected one of {}", names.join(", "))
    })
}

fn parse_scheme(s: &str) -> Result<CellScheme, String> {
    s.parse()
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Quantity {
    AlphaA,
    AlphaAGivenBHalf,
    AlphaAGivenB(f64),
    AlphaAGivenBetaHalf,
    VsProduct,
    SideSq,
    AngleSq,
    CorrAlphaB,
}

fn parse_quantity(s: &str) -> Result<Quantity, String> {
    Ok(match s {
        "alpha_a" => Quantity::AlphaA,
        "alpha_a_given_b_half" => Quantity::AlphaAGivenBHalf,
        "alpha_a_given_beta_half" => Quantity::AlphaAGivenBetaHalf,
        "vs_product" => Quantity::VsProduct,
        "side_sq" => Quantity::SideSq,
        "angle_sq" => Quantity::AngleSq,
        "corr_alpha_b" => Quantity::CorrAlphaB,
        _ => match s.strip_prefix("alpha_a_given_b:") {
            Some(b) => {
                let b = parse_radians(b)?;
                if !(b > 0.0 && b < PI) {
                    return Err("side length must lie in (0, π)".into());
                }
                Quantity::AlphaAGivenB(b)
            }
            None => {
                return Err(format!(
                    "unknown quantity `{s}`; expected alpha_a, alpha_a_given_b_half, alpha_a_given_b:<radians>, \
                     alpha_a_given_beta_half, vs_product, side_sq, angle_sq or corr_alpha_b"
                ))
            }
        },
    })
}

impl Quantity {
    fn label(self) -> String {
        match self {
            Quantity::AlphaA => "alpha_a".into(),
            Quantity::AlphaAGivenBHalf => "alpha_a_given_b_half".into(),
            Quantity::AlphaAGivenB(b) => format!("alpha_a_given_b:{b}"),
            Quantity::AlphaAGivenBetaHalf => "alpha_a_given_beta_half".into(),
            Quantity::VsProduct => "vs_product".into(),
            Quantity::SideSq => "side_sq".into(),
            Quantity::AngleSq => "angle_sq".into(),
            Quantity::CorrAlphaB => "corr_alpha_b".into(),
        }
    }
}

/// Failures with their exit status.
enum Failure {
    Usage(String),
    Runtime(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Usage(_) => 2,
            Failure::Runtime(_) => 1,
        }
    }
}

fn runtime(e: impl ToString) -> Failure {
    Failure::Runtime(e.to_string())
}

struct Context {
    seed: u64,
    samples: usize,
    tol: f64,
    output: Output,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let ctx = Context {
        seed: cli.seed,
        samples: cli.samples,
        tol: cli.tol,
        output: if cli.json { Output::Json } else { cli.output },
    };
    let result = match cli.command {
        Command::Verify { trials } => cmd_verify(&ctx, trials),
        Command::Constants { name, with_mc, trials } => cmd_constants(&ctx, name.as_deref(), with_mc, trials),
        Command::Density { name, from, to, steps, y_from, y_to, y_steps, z_from, z_to, z_steps, out } => {
            let axes = [(from, to, Some(steps)), (y_from, y_to, y_steps.or(Some(steps))), (z_from, z_to, z_steps.or(Some(steps)))];
            cmd_density(&ctx, name, &axes, out)
        }
        Command::Mc { quantity } => cmd_mc(&ctx, quantity),
        Command::Tessellate { k, trials, scheme } => cmd_tessellate(&ctx, k as usize, trials, scheme),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            let code = f.code();
            let (Failure::Usage(msg) | Failure::Runtime(msg)) = f;
            eprintln!("error: {msg}");
            if code == 2 {
                eprintln!("\nFor more information, try '--help'.");
            }
            ExitCode::from(code)
        }
    }
}

fn emit(text: &str) -> Result<(), Failure> {
    let mut out = io::stdout().lock();
    out.write_all(text.as_bytes()).map_err(runtime)?;
    out.flush().map_err(runtime)
}

fn to_json(v: &impl serde::Serialize) -> Result<String, Failure> {
    serde_json::to_string_pretty(v).map(|s| s + "\n").map_err(runtime)
}

fn csv_string(rows: impl IntoIterator<Item = Vec<String>>) -> Result<String, Failure> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in rows {
        w.write_record(&r).map_err(runtime)?;
    }
    let bytes = w.into_inner().map_err(runtime)?;
    String::from_utf8(bytes).map_err(runtime)
}

fn opt<T: ToString>(x: Option<T>) -> String {
    x.map(|v| v.to_string()).unwrap_or_default()
}

fn checks_csv(checks: &[ConstantCheck]) -> Result<String, Failure> {
    let header = ["name", "route", "value", "reference", "abs_error", "tolerance", "pass", "n_samples", "stderr", "seed"];
    let rows = std::iter::once(header.iter().map(|s| s.to_string()).collect()).chain(checks.iter().map(|c| {
        vec![
            c.name.clone(),
            c.route.clone(),
            c.value.to_string(),
            c.reference.to_string(),
            c.abs_error.to_string(),
            c.tolerance.to_string(),
            c.pass.to_string(),
            opt(c.n_samples),
            opt(c.stderr),
            opt(c.seed),
        ]
    }));
    csv_string(rows)
}

fn suite_config(ctx: &Context, trials: usize) -> SuiteConfig {
    SuiteConfig { tol: ctx.tol, mc_samples: ctx.samples, seed: ctx.seed, tessellation_trials: trials }
}

fn cmd_verify(ctx: &Context, trials: usize) -> Result<u8, Failure> {
    let report = run_suite(&suite_config(ctx, trials));
    let text = match ctx.output {
        Output::Human => report.human(),
        Output::Json => to_json(&report.checks)?,
        Output::Csv => checks_csv(&report.checks)?,
    };
    emit(&text)?;
    Ok(if report.pass { 0 } else { 1 })
}

fn cmd_constants(ctx: &Context, name: Option<&str>, with_mc: bool, trials: usize) -> Result<u8, Failure> {
    let reg = registry();
    let Some(name) = name else {
        let text = match ctx.output {
            Output::Json => {
                let list: Vec<Value> = reg
                    .iter()
                    .map(|c| {
                        json!({
                            "name": c.name,
                            "description": c.description,
                            "reference_string": c.reference_string,
                            "routes": c.routes.iter().map(|r| r.name).collect::<Vec<_>>(),
                        })
                    })
                    .collect();
                to_json(&list)?
            }
            Output::Csv => csv_string(
                std::iter::once(vec!["name".into(), "route".into(), "kind".into(), "description".into()]).chain(
                    reg.iter().flat_map(|c| {
                        c.routes.iter().map(|r| {
                            vec![c.name.into(), r.name.into(), format!("{:?}", r.kind).to_lowercase(), c.description.into()]
                        })
                    }),
                ),
            )?,
            Output::Human => {
                let mut s = String::new();
                for c in &reg {
                    let routes: Vec<String> = c
                        .routes
                        .iter()
                        .map(|r| if r.kind == RouteKind::MonteCarlo { format!("{}*", r.name) } else { r.name.into() })
                        .collect();
                    s += &format!("{:<30} {:<45} {}\n", c.name, c.description, routes.join(", "));
                }
                s += "\n* Monte Carlo route, evaluated by `verify` or with `--with-mc`\n";
                s
            }
        };
        emit(&text)?;
        return Ok(0);
    };
    let checks = run_constant(name, &suite_config(ctx, trials), with_mc).map_err(|e| Failure::Usage(e.to_string()))?;
    let constant = reg.iter().find(|c| c.name == name).expect("name was found by run_constant");
    let text = match ctx.output {
        Output::Json => to_json(&checks)?,
        Output::Csv => checks_csv(&checks)?,
        Output::Human => {
            let mut s = format!("{}  {}\n", constant.name, constant.description);
            for c in &checks {
                s += &format!(
                    "  {:<20} {:>20}   abs_error {:.3e}   {}\n",
                    c.route,
                    format_sig(c.value),
                    c.abs_error,
                    if c.pass { "pass" } else { "FAIL" }
                );
                if let Some(e) = &c.error {
                    s += &format!("    error: {e}\n");
                }
            }
            match constant.reference_string {
                Some(r) => s += &format!("  reference {r}\n"),
                None => {
                    if let Some(c) = checks.first() {
                        s += &format!("  reference {}\n", format_sig(c.reference));
                    }
                }
            }
            s
        }
    };
    emit(&text)?;
    Ok(if checks.iter().all(|c| c.pass) { 0 } else { 1 })
}

fn grid(lo: f64, hi: f64, steps: u64) -> Vec<f64> {
    if steps == 1 {
        return vec![lo];
    }
    let h = (hi - lo) / (steps - 1) as f64;
    (0..steps).map(|i| if i + 1 == steps { hi } else { lo + i as f64 * h }).collect()
}

type Axis = (Option<f64>, Option<f64>, Option<u64>);

fn cmd_density(ctx: &Context, id: DensityId, axes: &[Axis; 3], out: Option<PathBuf>) -> Result<u8, Failure> {
    let support = id.support();
    let mut grids = Vec::with_capacity(id.dimension());
    for (d, &(lo, hi)) in support.iter().enumerate() {
        let (from, to, steps) = axes[d];
        let (from, to) = (from.unwrap_or(lo), to.unwrap_or(hi));
        if !(from < to || (from == to && steps == Some(1))) {
            return Err(Failure::Usage(format!("empty range [{from}, {to}] for `{}`", id.variables()[d])));
        }
        if from < lo || to > hi {
            return Err(Failure::Usage(format!(
                "range [{from}, {to}] for `{}` leaves the support [{lo}, {hi}]",
                id.variables()[d]
            )));
        }
        grids.push(grid(from, to, steps.unwrap_or(101)));
    }
    for (d, _) in axes.iter().enumerate().skip(id.dimension()) {
        if axes[d].0.is_some() || axes[d].1.is_some() {
            return Err(Failure::Usage(format!("`{}` has only {} coordinate(s)", id.name(), id.dimension())));
        }
    }

    let mut points: Vec<Vec<f64>> = vec![Vec::new()];
    for g in &grids {
        points = points.into_iter().flat_map(|p| g.iter().map(move |&x| [p.clone(), vec![x]].concat())).collect();
    }
    let mut rows = Vec::with_capacity(points.len());
    for p in points {
        let v = match id.evaluate(&p) {
            Ok(v) => Some(v),
            Err(DensityError::SingularPoint { .. }) => None,
            Err(e) => return Err(runtime(e)),
        };
        rows.push((p, v));
    }

    let text = match ctx.output {
        Output::Json => {
            let list: Vec<Value> = rows
                .iter()
                .map(|(p, v)| {
                    let mut m = Map::new();
                    for (name, x) in id.variables().iter().zip(p) {
                        m.insert((*name).into(), json!(x));
                    }
                    m.insert("value".into(), json!(v));
                    Value::Object(m)
                })
                .collect();
            to_json(&list)?
        }
        Output::Human | Output::Csv => {
            let header: Vec<String> =
                id.variables().iter().map(|s| s.to_string()).chain(std::iter::once("value".to_string())).collect();
            csv_string(std::iter::once(header).chain(
                rows.iter().map(|(p, v)| p.iter().map(|x| x.to_string()).chain(std::iter::once(opt(*v))).collect()),
            ))?
        }
    };
    match out {
        Some(path) => File::create(&path).and_then(|mut f| f.write_all(text.as_bytes())).map_err(runtime)?,
        None => emit(&text)?,
    }
    Ok(0)
}

fn cmd_mc(ctx: &Context, q: Quantity) -> Result<u8, Failure> {
    let stream = RngStream::new(ctx.seed, 0);
    let n = ctx.samples;
    let e: MonteCarloEstimate = match q {
        Quantity::AlphaA => estimate(TriangleSampler::Uniform, |m| m.alpha * m.a, n, stream),
        Quantity::AlphaAGivenBHalf => {
            estimate(TriangleSampler::FixedSide(SideName::B, FRAC_PI_2), |m| m.alpha * m.a, n, stream)
        }
        Quantity::AlphaAGivenB(b) => estimate(TriangleSampler::FixedSide(SideName::B, b), |m| m.alpha * m.a, n, stream),
        Quantity::AlphaAGivenBetaHalf => estimate(TriangleSampler::RightAngle, |m| m.alpha * m.a, n, stream),
        Quantity::VsProduct => estimate(TriangleSampler::Uniform, |m| m.excess * m.perimeter, n, stream),
        Quantity::SideSq => estimate(TriangleSampler::Uniform, |m| m.a * m.a, n, stream),
        Quantity::AngleSq => estimate(TriangleSampler::Uniform, |m| m.alpha * m.alpha, n, stream),
        Quantity::CorrAlphaB => collect(TriangleSampler::Uniform, n, stream).and_then(|t| {
            let alpha: Vec<f64> = t.iter().map(|m| m.alpha).collect();
            let b: Vec<f64> = t.iter().map(|m| m.b).collect();
            correlation(&alpha, &b)
        }),
    }
    .map_err(runtime)?;
    let label = q.label();
    let text = match ctx.output {
        Output::Json => to_json(&json!({
            "quantity": label,
            "mean": e.mean,
            "stderr": e.stderr,
            "n": e.n,
            "seed": ctx.seed,
        }))?,
        Output::Csv => csv_string([
            vec!["quantity".into(), "mean".into(), "stderr".into(), "n".into(), "seed".into()],
            vec![label, e.mean.to_string(), e.stderr.to_string(), e.n.to_string(), ctx.seed.to_string()],
        ])?,
        Output::Human => format!(
            "quantity  {label}\nmean      {}\nstderr    {}\nn         {}\nseed      {}\n",
            format_sig(e.mean),
            format_sig(e.stderr),
            e.n,
            ctx.seed
        ),
    };
    emit(&text)?;
    Ok(0)
}

fn cmd_tessellate(ctx: &Context, k: usize, trials: usize, scheme: CellScheme) -> Result<u8, Failure> {
    let s = cell_statistics(k, scheme, trials, RngStream::new(ctx.seed, 0)).map_err(runtime)?;
    let rows = [("V", s.area), ("S", s.perimeter), ("VS", s.area_perimeter), ("N", s.vertex_count)];
    let text = match ctx.output {
        Output::Json => {
            let mut v = serde_json::to_value(&s).map_err(runtime)?;
            v["seed"] = json!(ctx.seed);
            to_json(&v)?
        }
        Output::Csv => {
            let mut out = vec![vec!["statistic".to_string(), "mean".into(), "stderr".into(), "n".into()]];
            for (name, e) in rows {
                out.push(vec![name.into(), e.mean.to_string(), e.stderr.to_string(), e.n.to_string()]);
            }
            for &n in s.vertex_counts.keys() {
                let f = s.frequency(n);
                out.push(vec![format!("P(N={n})"), f.mean.to_string(), f.stderr.to_string(), f.n.to_string()]);
            }
            csv_string(out)?
        }
        Output::Human => {
            let mut t = format!("k {k}, scheme {scheme}, {trials} trials, seed {}\n", ctx.seed);
            t += &format!("{:<10} {:>20} {:>20}\n", "statistic", "mean", "stderr");
            for (name, e) in rows {
                t += &format!("{:<10} {:>20} {:>20}\n", name, format_sig(e.mean), format_sig(e.stderr));
            }
            t += "\nN      count       frequency\n";
            for (&n, &count) in &s.vertex_counts {
                t += &format!("{n:<6} {count:<11} {}\n", format_sig(s.frequency(n).mean));
            }
            if s.resampled > 0 {
                t += &format!("\n{} degenerate configurations resampled\n", s.resampled);
            }
            t
        }
    };
    emit(&text)?;
    Ok(0)
}
