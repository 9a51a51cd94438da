#![allow(clippy::neg_cmp_op_on_partial_ord)]

use std::cell::RefCell;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{anyhow, bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use discbound::bounds::{delta1, lipschitz_envelope, read_samples_csv, write_samples_csv, BoundSample};
use discbound::flows::{find_crossings, lower_bound_curve, CurveSample, CurveTag, DensityCurve, FlowRecipe, Registry};
use discbound::harness::{certifier_by_name, certify_interval, sweep, HarnessError, ProofTrace, DEFAULT_PRECISION};
use discbound::numerics::Interval;
use discbound::ratios::ratio_table;

const EXIT_CERTIFICATION: u8 = 2;
const EXIT_CONFIG: u8 = 3;

#[derive(Parser)]
#[command(name = "discbound", version, about = "Bounds on the density of binary disc packings")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Special disc ratios as certified root enclosures.
    Ratios(Output),
    /// Lower-bound curve from the hexagonal, interstitial and flow packings.
    Lower(LowerArgs),
    /// Upper-bound curve: certified samples and their Lipschitz envelope.
    Upper(UpperArgs),
    /// Prove a density bound on a whole ratio interval by bisection.
    Certify(CertifyArgs),
}

#[derive(Args)]
struct Output {
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
    /// Write here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Args)]
struct LowerArgs {
    #[arg(long, value_parser = parse_range)]
    range: (f64, f64),
    #[arg(long, default_value_t = 1e-3)]
    step: f64,
    /// Built-in recipe name or recipe file; repeatable.
    #[arg(long)]
    recipe: Vec<String>,
    #[command(flatten)]
    output: Output,
}

#[derive(Args)]
struct UpperArgs {
    #[arg(long, value_parser = parse_range)]
    range: (f64, f64),
    /// Spacing of the certified samples.
    #[arg(long, default_value_t = 1e-2)]
    step: f64,
    /// Output points per sample spacing.
    #[arg(long, default_value_t = 10)]
    dense: u32,
    #[arg(long, default_value = "blind")]
    certifier: String,
    #[arg(long, default_value_t = DEFAULT_PRECISION)]
    precision: f64,
    /// Extra samples to merge (CSV `r,value`).
    #[arg(long)]
    samples: Option<PathBuf>,
    /// Also write the merged samples here (CSV `r,value`).
    #[arg(long)]
    samples_out: Option<PathBuf>,
    #[command(flatten)]
    output: Output,
}

#[derive(Args)]
struct CertifyArgs {
    #[arg(long, value_parser = parse_range)]
    range: (f64, f64),
    /// Density to prove; the hexagonal density by default.
    #[arg(long)]
    delta: Option<f64>,
    #[arg(long, default_value = "blind")]
    certifier: String,
    #[arg(long, default_value_t = 40)]
    max_depth: u32,
    /// `json` writes the whole trace, `csv` the leaves.
    #[command(flatten)]
    output: Output,
}

enum Failure {
    Config(anyhow::Error),
    Certification(String),
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        Failure::Config(e)
    }
}

type Run = Result<(), Failure>;

fn parse_range(s: &str) -> Result<(f64, f64), String> {
    let (lo, hi) = s.split_once(':').ok_or("expected LO:HI")?;
    let lo: f64 = lo.trim().parse().map_err(|e| format!("LO: {e}"))?;
    let hi: f64 = hi.trim().parse().map_err(|e| format!("HI: {e}"))?;
    if !(0.0 < lo && lo <= hi && hi < 1.0) {
        return Err(format!("need 0 < LO <= HI < 1, got {lo}:{hi}"));
    }
    Ok((lo, hi))
}

/// `lo, lo + step, ...` up to `hi`, ending exactly on `hi`.
fn grid(range: (f64, f64), step: f64) -> anyhow::Result<Vec<f64>> {
    if !(step > 0.0 && step.is_finite()) {
        bail!("step must be positive, got {step}");
    }
    let (lo, hi) = range;
    let n = ((hi - lo) / step * (1.0 + 1e-12)).floor() as usize;
    let mut g: Vec<f64> = (0..=n).map(|k| lo + k as f64 * step).filter(|&r| r < hi - 1e-9 * step).collect();
    g.push(hi);
    Ok(g)
}

fn sink(out: &Option<PathBuf>) -> anyhow::Result<Box<dyn Write>> {
    Ok(match out {
        Some(p) => Box::new(BufWriter::new(File::create(p).with_context(|| format!("cannot create {}", p.display()))?)),
        None => Box::new(io::stdout().lock()),
    })
}

fn write_curve(curve: &DensityCurve, output: &Output) -> anyhow::Result<()> {
    let mut w = sink(&output.out)?;
    match output.format {
        Format::Csv => curve.write_csv(&mut w)?,
        Format::Json => {
            serde_json::to_writer_pretty(&mut w, curve)?;
            writeln!(w)?;
        }
    }
    w.flush()?;
    Ok(())
}

fn load_recipe(source: &str) -> anyhow::Result<FlowRecipe> {
    if let Some(r) = FlowRecipe::builtin(source) {
        return Ok(r);
    }
    Ok(FlowRecipe::load(Path::new(source))?)
}

fn cmd_ratios(output: &Output) -> Run {
    let table = ratio_table(1e-10);
    let mut w = sink(&output.out)?;
    match output.format {
        Format::Csv => {
            let mut wtr = csv::Writer::from_writer(&mut w);
            wtr.write_record(["name", "lo", "hi", "polynomial", "roots_in_unit"]).map_err(anyhow::Error::from)?;
            for v in &table {
                wtr.write_record([
                    v.name.clone(),
                    format!("{:?}", v.enclosure.lo()),
                    format!("{:?}", v.enclosure.hi()),
                    v.polynomial.clone(),
                    v.roots_in_unit.to_string(),
                ])
                .map_err(anyhow::Error::from)?;
            }
            wtr.flush().map_err(anyhow::Error::from)?;
        }
        Format::Json => {
            serde_json::to_writer_pretty(&mut w, &table).map_err(anyhow::Error::from)?;
            writeln!(w).map_err(anyhow::Error::from)?;
        }
    }
    w.flush().map_err(anyhow::Error::from)?;
    Ok(())
}

fn cmd_lower(args: &LowerArgs) -> Run {
    let g = grid(args.range, args.step)?;
    let mut registry = Registry::empty();
    let mut bad = Vec::new();
    for source in &args.recipe {
        match load_recipe(source).and_then(|r| registry.add(r).map_err(|e| anyhow!("{source}: {e}"))) {
            Ok(()) => {}
            Err(e) => {
                eprintln!("error: {e:#}");
                bad.push(source.as_str());
            }
        }
    }
    if !bad.is_empty() {
        return Err(Failure::Config(anyhow!("could not load recipe(s): {}", bad.join(", "))));
    }
    let names: Vec<String> = registry.names().into_iter().map(String::from).collect();
    let curve = lower_bound_curve(&g, &mut registry).map_err(anyhow::Error::from)?;

    for name in &names {
        let flow = registry.flow_mut(name).expect("registered");
        let valid = flow.recipe().valid_range;
        let (lo, hi) = (args.range.0.max(valid.lo()), args.range.1.min(valid.hi()));
        if lo > hi {
            continue;
        }
        let flow = RefCell::new(flow);
        let density = |r: f64| flow.borrow_mut().eval(r).map(|x| x.1).unwrap_or(f64::NAN);
        for c in find_crossings(density, delta1(), Interval::new(lo, hi).expect("ordered"), 1e-10) {
            eprintln!("crossing: {name} meets delta1 in [{:?}, {:?}]", c.lo(), c.hi());
        }
    }
    write_curve(&curve, &args.output)?;
    Ok(())
}

fn cmd_upper(args: &UpperArgs) -> Run {
    let coarse = grid(args.range, args.step)?;
    if args.dense == 0 {
        return Err(Failure::Config(anyhow!("--dense must be at least 1")));
    }
    if !(args.precision > 0.0) {
        return Err(Failure::Config(anyhow!("precision must be positive, got {}", args.precision)));
    }
    let c = certifier_by_name(&args.certifier).map_err(anyhow::Error::from)?;
    let mut extra = Vec::new();
    if let Some(p) = &args.samples {
        let f = File::open(p).with_context(|| format!("cannot open {}", p.display()))?;
        extra = read_samples_csv(f).map_err(|e| anyhow!("{}: {e}", p.display()))?;
    }

    let start = Instant::now();
    let outcome = sweep(c.as_ref(), &coarse, args.precision);
    eprintln!("swept {} ratios with {} in {:.3}s", coarse.len(), c.name(), start.elapsed().as_secs_f64());
    for (r, why) in &outcome.failures {
        eprintln!("not certified at r = {r:?}: {why}");
    }

    let mut samples: Vec<BoundSample> = outcome.samples;
    samples.extend(extra);
    samples.sort_by(|a, b| a.r.total_cmp(&b.r).then(a.value.total_cmp(&b.value)));
    if samples.is_empty() {
        return Err(Failure::Certification("no certified samples".into()));
    }
    if let Some(p) = &args.samples_out {
        let f = File::create(p).with_context(|| format!("cannot create {}", p.display()))?;
        write_samples_csv(&samples, BufWriter::new(f)).map_err(anyhow::Error::from)?;
    }

    let dense = grid(args.range, args.step / args.dense as f64)?;
    let curve = DensityCurve::new(
        dense
            .iter()
            .map(|&r| CurveSample { r, value: lipschitz_envelope(&samples, r), tag: CurveTag::Upper })
            .collect(),
    )
    .map_err(anyhow::Error::from)?;
    write_curve(&curve, &args.output)?;
    if outcome.failures.is_empty() {
        Ok(())
    } else {
        Err(Failure::Certification(format!("{} of {} ratios not certified", outcome.failures.len(), coarse.len())))
    }
}

fn write_trace(trace: &ProofTrace, output: &Output) -> anyhow::Result<()> {
    let mut w = sink(&output.out)?;
    match output.format {
        Format::Csv => trace.write_leaves_csv(&mut w)?,
        Format::Json => {
            serde_json::to_writer_pretty(&mut w, trace)?;
            writeln!(w)?;
        }
    }
    w.flush()?;
    Ok(())
}

fn cmd_certify(args: &CertifyArgs) -> Run {
    let c = certifier_by_name(&args.certifier).map_err(anyhow::Error::from)?;
    let delta = args.delta.unwrap_or_else(delta1);
    let r = Interval::new(args.range.0, args.range.1).map_err(anyhow::Error::from)?;
    match certify_interval(c.as_ref(), r, delta, args.max_depth) {
        Ok(trace) => {
            eprintln!(
                "proved delta <= {delta:?} on [{:?}, {:?}] with {} subintervals in {:.3}s",
                r.lo(),
                r.hi(),
                trace.subintervals,
                trace.wall_time.as_secs_f64()
            );
            write_trace(&trace, &args.output)?;
            Ok(())
        }
        Err(HarnessError::DepthExceeded(trace)) => {
            write_trace(&trace, &args.output)?;
            let failing = trace.failing_leaves();
            for l in &failing {
                eprintln!("unproven: [{:?}, {:?}]", l.interval.lo(), l.interval.hi());
            }
            Err(Failure::Certification(format!("{} of {} subintervals unproven", failing.len(), trace.subintervals)))
        }
        Err(e) => Err(Failure::Config(e.into())),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(EXIT_CONFIG) } else { ExitCode::SUCCESS };
        }
    };
    let result = match &cli.command {
        Command::Ratios(o) => cmd_ratios(o),
        Command::Lower(a) => cmd_lower(a),
        Command::Upper(a) => cmd_upper(a),
        Command::Certify(a) => cmd_certify(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Config(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(EXIT_CONFIG)
        }
        Err(Failure::Certification(msg)) => {
            eprintln!("certification failed: {msg}");
            ExitCode::from(EXIT_CERTIFICATION)
        }
    }
}
