use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use multihyp_core::engine::{Engine, RunMetrics, WorkerPolicy};
use multihyp_core::risk::CriticalityResult;
use multihyp_core::scenario::{validate_scenario, CollisionMode, RawScenario, SimulationConfig};
use serde::Serialize;

mod trace;

use trace::{read_trace, write_trace, TraceRecord};

#[derive(Parser)]
#[command(name = "multihyp", version, about = "Multi-hypothesis collision criticality estimation")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate a scenario file or a directory of frames.
    Run(RunArgs),
    /// Print the per-frame criticality stored in a trace file.
    Trace { path: PathBuf },
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Paper,
    Exact,
}

#[derive(clap::Args)]
struct RunArgs {
    /// Scenario JSON file, or a directory whose *.json files are frames.
    path: PathBuf,
    /// Write one CSV record per frame.
    #[arg(long)]
    trace: Option<PathBuf>,
    /// Write run metrics as JSON.
    #[arg(long)]
    metrics: Option<PathBuf>,
    /// Time repeated evaluations and report medians.
    #[arg(long)]
    bench: bool,
    #[arg(long, default_value_t = 5)]
    repeat: usize,
    /// Worker threads: a number or `auto`.
    #[arg(long, default_value = "auto")]
    workers: String,
    #[arg(long, value_enum)]
    collision_mode: Option<ModeArg>,
    /// JSON object whose keys override the scenario's config.
    #[arg(long)]
    config: Option<PathBuf>,
}

fn parse_workers(s: &str) -> Result<WorkerPolicy> {
    if s == "auto" {
        return Ok(WorkerPolicy::AllCores);
    }
    match s.parse::<usize>() {
        Ok(0) | Err(_) => bail!("--workers expects a positive number or `auto`, got {s:?}"),
        Ok(1) => Ok(WorkerPolicy::Sequential),
        Ok(n) => Ok(WorkerPolicy::Fixed(n)),
    }
}

/// Applies the keys of `overrides` on top of `base`.
fn merge_config(base: &SimulationConfig, overrides: &serde_json::Value) -> Result<SimulationConfig> {
    let serde_json::Value::Object(extra) = overrides else {
        bail!("config override must be a JSON object");
    };
    let mut value = serde_json::to_value(base)?;
    let map = value.as_object_mut().expect("config serializes to an object");
    for (k, v) in extra {
        map.insert(k.clone(), v.clone());
    }
    serde_json::from_value(value).context("invalid config override")
}

fn frame_files(path: &Path) -> Result<Vec<PathBuf>> {
    if path.is_dir() {
        let mut files: Vec<PathBuf> = fs::read_dir(path)
            .with_context(|| format!("cannot read directory {}", path.display()))?
            .filter_map(|e| e.ok().map(|e| e.path()))
            .filter(|p| p.extension().is_some_and(|e| e == "json"))
            .collect();
        files.sort();
        if files.is_empty() {
            bail!("no .json frames in {}", path.display());
        }
        Ok(files)
    } else if path.exists() {
        Ok(vec![path.to_path_buf()])
    } else {
        bail!("file not found: {}", path.display())
    }
}

struct Frame {
    name: String,
    raw: Result<RawScenario, String>,
}

fn load_frame(path: &Path, overrides: Option<&serde_json::Value>, mode: Option<ModeArg>) -> Frame {
    let name = path
        .file_name()
        .map_or_else(|| path.display().to_string(), |n| n.to_string_lossy().into_owned());
    let raw = (|| -> Result<RawScenario> {
        let text = fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
        let mut raw = RawScenario::from_json(&text).map_err(|e| anyhow::anyhow!("scenario validation: {e}"))?;
        if let Some(o) = overrides {
            raw.config = merge_config(&raw.config, o)?;
        }
        match mode {
            Some(ModeArg::Paper) => raw.config.collision_mode = CollisionMode::VertexContainment,
            Some(ModeArg::Exact) => raw.config.collision_mode = CollisionMode::Exact,
            None => {}
        }
        Ok(raw)
    })()
    .map_err(|e| format!("{e:#}"));
    Frame { name, raw }
}

fn evaluate(engine: &Engine, raw: &RawScenario) -> Result<(CriticalityResult, RunMetrics), String> {
    let scenario = validate_scenario(raw).map_err(|e| format!("scenario validation: {e}"))?;
    engine.evaluate(&scenario, &scenario.config).map_err(|e| e.to_string())
}

fn median(mut xs: Vec<f64>) -> f64 {
    xs.sort_by(f64::total_cmp);
    let n = xs.len();
    if n % 2 == 1 {
        xs[n / 2]
    } else {
        0.5 * (xs[n / 2 - 1] + xs[n / 2])
    }
}

#[derive(Serialize)]
struct BenchReport {
    repeats: usize,
    street_ms: f64,
    trajectories_ms: f64,
    collision_ms: f64,
    risk_ms: f64,
    total_ms: f64,
    pose_combinations_per_second: f64,
}

fn bench(engine: &Engine, raw: &RawScenario, repeats: usize) -> Result<BenchReport, String> {
    let mut runs = Vec::with_capacity(repeats);
    for _ in 0..repeats.max(1) {
        runs.push(evaluate(engine, raw)?.1);
    }
    let pick = |f: &dyn Fn(&RunMetrics) -> f64| median(runs.iter().map(f).collect());
    let collision_ms = pick(&|m| m.stages.collision.seconds() * 1e3);
    Ok(BenchReport {
        repeats: runs.len(),
        street_ms: pick(&|m| m.stages.street.seconds() * 1e3),
        trajectories_ms: pick(&|m| m.stages.trajectories.seconds() * 1e3),
        collision_ms,
        risk_ms: pick(&|m| m.stages.risk.seconds() * 1e3),
        total_ms: pick(&|m| m.total_seconds * 1e3),
        pose_combinations_per_second: runs[0].pose_combinations as f64 / (collision_ms * 1e-3).max(1e-12),
    })
}

#[derive(Serialize)]
struct FrameMetrics {
    frame: String,
    timestamp: f64,
    metrics: RunMetrics,
    #[serde(skip_serializing_if = "Option::is_none")]
    bench: Option<BenchReport>,
}

fn print_summary(name: &str, r: &CriticalityResult, m: &RunMetrics) {
    println!("{name}  t={}", trace::sig12(r.timestamp));
    println!("  p_cra          {}", trace::sig12(r.p_cra));
    println!(
        "  trajectories   {} (ego {}, co {})",
        m.trajectories, r.ego_trajectories, r.co_trajectories
    );
    println!(
        "  combinations   {} ({} pose combinations, {} colliding)",
        r.combinations,
        m.pose_combinations,
        r.collisions.len()
    );
    for o in &r.objects {
        println!("  object {:<7} p={}", o.object, trace::sig12(o.probability));
    }
    let best: Vec<String> = r
        .escape_routes
        .iter()
        .take(3)
        .map(|e| format!("{} (p={})", e.ego, trace::sig12(e.probability)))
        .collect();
    println!("  escape routes  {} [{}]", r.escape_routes.len(), best.join(", "));
    let s = &m.stages;
    println!(
        "  stages [ms]    street {:.3}, trajectories {:.3}, collision {:.3}, risk {:.3} on {} workers",
        s.street.seconds() * 1e3,
        s.trajectories.seconds() * 1e3,
        s.collision.seconds() * 1e3,
        s.risk.seconds() * 1e3,
        m.workers
    );
}

fn run(args: &RunArgs) -> Result<bool> {
    let policy = parse_workers(&args.workers)?;
    let overrides = match &args.config {
        Some(p) => Some(
            serde_json::from_str::<serde_json::Value>(&fs::read_to_string(p).with_context(|| format!("cannot read {}", p.display()))?)
                .with_context(|| format!("{} is not valid JSON", p.display()))?,
        ),
        None => None,
    };
    let engine = Engine::new(policy)?;
    let mut frames: Vec<Frame> = frame_files(&args.path)?
        .iter()
        .map(|p| load_frame(p, overrides.as_ref(), args.collision_mode))
        .collect();
    // Frames with a readable timestamp are replayed in time order.
    frames.sort_by(|a, b| {
        let ta = a.raw.as_ref().map_or(f64::NEG_INFINITY, |r| r.timestamp);
        let tb = b.raw.as_ref().map_or(f64::NEG_INFINITY, |r| r.timestamp);
        ta.total_cmp(&tb)
    });

    let mut records = Vec::new();
    let mut metrics = Vec::new();
    let mut ok = true;
    for frame in &frames {
        let outcome = frame.raw.as_ref().map_err(Clone::clone).and_then(|raw| {
            let (r, m) = evaluate(&engine, raw)?;
            let b = if args.bench {
                Some(bench(&engine, raw, args.repeat)?)
            } else {
                None
            };
            Ok((r, m, b))
        });
        match outcome {
            Ok((r, m, b)) => {
                print_summary(&frame.name, &r, &m);
                if let Some(b) = &b {
                    println!(
                        "  bench          median of {}: total {:.3} ms, collision {:.3} ms, {:.3e} pose combinations/s",
                        b.repeats, b.total_ms, b.collision_ms, b.pose_combinations_per_second
                    );
                }
                records.push(TraceRecord::from_result(&frame.name, &r, &m));
                metrics.push(FrameMetrics {
                    frame: frame.name.clone(),
                    timestamp: r.timestamp,
                    metrics: m,
                    bench: b,
                });
            }
            Err(e) => {
                ok = false;
                eprintln!("{}: error: {e}", frame.name);
                let ts = frame.raw.as_ref().map_or(0.0, |r| r.timestamp);
                records.push(TraceRecord::failed(&frame.name, ts, &e));
            }
        }
    }

    if let Some(p) = &args.trace {
        let f = fs::File::create(p).with_context(|| format!("cannot create {}", p.display()))?;
        write_trace(f, &records)?;
    }
    if let Some(p) = &args.metrics {
        fs::write(p, serde_json::to_string_pretty(&metrics)?).with_context(|| format!("cannot write {}", p.display()))?;
    }
    Ok(ok)
}

fn show_trace(path: &Path) -> Result<()> {
    let f = fs::File::open(path).with_context(|| format!("file not found: {}", path.display()))?;
    for r in read_trace(f)? {
        match r.p_cra {
            Some(p) => println!("{} {} {}", r.frame, trace::sig12(r.timestamp), trace::sig12(p)),
            None => println!("{} {} {}", r.frame, trace::sig12(r.timestamp), r.status),
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match &cli.command {
        Command::Run(args) => run(args),
        Command::Trace { path } => show_trace(path).map(|_| true),
    };
    match outcome {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
