use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

use anyhow::{anyhow, bail, Context};
use clap::{Args, Parser, Subcommand};
use log::{info, warn};

use roofgraph::geom::Canvas;
use roofgraph::io::{
    detections_from_json, detections_to_json, graph_from_json, graph_to_json, parse_lp, render_detections,
    render_graph, write_lp,
};
use roofgraph::ipbuild::{build, BuildParams, Family};
use roofgraph::metrics::evaluate;
use roofgraph::model::{FeatureConfig, PlanarGraph};
use roofgraph::pipeline::{assemble, AssembleOptions};
use roofgraph::simdet::{random_building, simulate, BuildingParams, NoiseConfig};
use roofgraph::solver::{SolveStatus, MAX_TIME_LIMIT};

#[derive(Parser)]
#[command(name = "roofgraph", version, about = "Planar roof graphs from detected corners, edges and regions")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve for the graph that best explains a detection file.
    Assemble(AssembleArgs),
    /// Produce synthetic detections from a ground-truth graph.
    Simulate(SimulateArgs),
    /// Write a random ground-truth building graph.
    Generate(GenerateArgs),
    /// Score predicted graphs against ground truth.
    Evaluate(EvaluateArgs),
    /// Write the integer program for a detection file in LP format.
    ExportLp(ExportLpArgs),
    /// Draw a graph or a detection file as SVG.
    Render(RenderArgs),
}

#[derive(Args)]
struct ProgramArgs {
    /// Comma-separated features: edges, corners, ce, regions, rr, or all.
    #[arg(long, default_value = "all")]
    features: String,
    /// Slack penalty override, e.g. `region_noncross=0.25` or `ce=2`.
    #[arg(long = "lambda", value_name = "FAMILY=VALUE")]
    lambdas: Vec<String>,
}

impl ProgramArgs {
    fn resolve(&self) -> anyhow::Result<(FeatureConfig, BuildParams)> {
        let features = FeatureConfig::parse(&self.features)?;
        let mut params = BuildParams::default();
        for spec in &self.lambdas {
            let (name, value) =
                spec.split_once('=').ok_or_else(|| anyhow!("--lambda expects FAMILY=VALUE, got '{spec}'"))?;
            let v: f64 = value.parse().with_context(|| format!("bad lambda value '{value}'"))?;
            if !(v > 0.0 && v.is_finite()) {
                bail!("lambda for {name} must be positive");
            }
            match name {
                "ce" => params.lambda_ce = v,
                "slack_cap" => params.slack_cap = v,
                _ => match Family::from_tag(name) {
                    Some(Family::RegionNoncross) => params.lambda_region_noncross = v,
                    Some(Family::RegionEnclose) => params.lambda_region_enclose = v,
                    Some(Family::RegionRegion) => params.lambda_region_region = v,
                    Some(Family::CeBin | Family::CePrune) => params.lambda_ce = v,
                    _ => bail!("no slack penalty for '{name}'"),
                },
            }
        }
        Ok((features, params))
    }
}

#[derive(Args)]
struct AssembleArgs {
    detections: PathBuf,
    #[command(flatten)]
    program: ProgramArgs,
    /// Solver budget in seconds.
    #[arg(long, env = "ROOFGRAPH_TIME_LIMIT", default_value_t = 300.0)]
    time_limit: f64,
    /// Output graph; standard output when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    svg: Option<PathBuf>,
    /// Merge near-straight corners after solving (default).
    #[arg(long, overrides_with = "no_post")]
    post: bool,
    #[arg(long, overrides_with = "post")]
    no_post: bool,
}

#[derive(Args)]
struct CanvasArg {
    /// Canvas size as WIDTHxHEIGHT.
    #[arg(long, default_value = "256x256", value_parser = parse_canvas)]
    canvas: Canvas,
}

#[derive(Args)]
struct SimulateArgs {
    gt: PathBuf,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 1.0)]
    corner_jitter: f64,
    #[arg(long, default_value_t = 0.0)]
    corner_drop: f64,
    /// Expected number of spurious corners.
    #[arg(long, default_value_t = 0.0)]
    spurious_corners: f64,
    #[arg(long, default_value_t = 0.05)]
    edge_noise: f64,
    #[arg(long, default_value_t = 0)]
    region_erode: usize,
    #[arg(long, default_value_t = 0.0)]
    rr_drop: f64,
    #[command(flatten)]
    canvas: CanvasArg,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct GenerateArgs {
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[command(flatten)]
    canvas: CanvasArg,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct EvaluateArgs {
    /// Predicted graph files, directories or glob patterns.
    #[arg(long, required = true, num_args = 1..)]
    pred: Vec<String>,
    /// Ground-truth graph files, directories or glob patterns.
    #[arg(long, required = true, num_args = 1..)]
    gt: Vec<String>,
    #[command(flatten)]
    canvas: CanvasArg,
    /// Write the report as JSON.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ExportLpArgs {
    detections: PathBuf,
    #[command(flatten)]
    program: ProgramArgs,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct RenderArgs {
    /// A graph or detection file.
    input: PathBuf,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Also draw enclosure rays and boundary probes.
    #[arg(long)]
    debug: bool,
    #[command(flatten)]
    canvas: CanvasArg,
}

fn parse_canvas(s: &str) -> Result<Canvas, String> {
    let (w, h) = s.split_once('x').ok_or("expected WIDTHxHEIGHT")?;
    let w: usize = w.parse().map_err(|_| format!("bad width '{w}'"))?;
    let h: usize = h.parse().map_err(|_| format!("bad height '{h}'"))?;
    if w == 0 || h == 0 {
        return Err("canvas must be non-empty".into());
    }
    Ok(Canvas::new(w, h))
}

/// A failure and its exit status.
struct Failure {
    code: u8,
    error: anyhow::Error,
}

trait ExitClass<T> {
    fn input(self) -> Result<T, Failure>;
    fn internal(self) -> Result<T, Failure>;
}

impl<T, E: Into<anyhow::Error>> ExitClass<T> for Result<T, E> {
    fn input(self) -> Result<T, Failure> {
        self.map_err(|e| Failure { code: 1, error: e.into() })
    }
    fn internal(self) -> Result<T, Failure> {
        self.map_err(|e| Failure { code: 2, error: e.into() })
    }
}

fn read(path: &Path) -> anyhow::Result<String> {
    fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))
}

fn emit(path: Option<&Path>, text: &str) -> anyhow::Result<()> {
    match path {
        Some(p) => fs::write(p, text).with_context(|| format!("cannot write {}", p.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn load_detections(path: &Path) -> anyhow::Result<roofgraph::model::DetectionSet> {
    detections_from_json(&read(path)?).with_context(|| format!("invalid detections in {}", path.display()))
}

fn load_graph(path: &Path) -> anyhow::Result<PlanarGraph> {
    graph_from_json(&read(path)?).with_context(|| format!("invalid graph in {}", path.display()))
}

fn cmd_assemble(a: AssembleArgs) -> Result<u8, Failure> {
    let d = load_detections(&a.detections).input()?;
    let (features, params) = a.program.resolve().input()?;
    if !(a.time_limit >= 0.0 && a.time_limit.is_finite()) {
        return Err(anyhow!("time limit must be a non-negative number of seconds")).input();
    }
    let time_limit = Duration::from_secs_f64(a.time_limit).min(MAX_TIME_LIMIT);
    let opts = AssembleOptions { features, params, time_limit, post_process: !a.no_post };
    let out = assemble(&d, &opts).internal()?;
    for w in &out.assembly.warnings {
        warn!("{w}");
    }
    let stats = &out.result.stats;
    info!(
        "{:?}: objective {:.6}, bound {:.6}, {} nodes, {:?}",
        out.result.status, out.result.objective, out.result.bound, stats.nodes, stats.wall_time
    );
    let code = match out.result.status {
        SolveStatus::Optimal => 0,
        SolveStatus::TimeLimit => 3,
        SolveStatus::Infeasible => return Err(anyhow!("the program has no feasible assignment")).internal(),
    };
    out.graph.validate().internal()?;
    emit(a.out.as_deref(), &graph_to_json(&out.graph)).input()?;
    if let Some(svg) = &a.svg {
        emit(Some(svg), &render_graph(&out.graph, d.canvas)).input()?;
    }
    Ok(code)
}

fn cmd_simulate(a: SimulateArgs) -> Result<u8, Failure> {
    let gt = load_graph(&a.gt).input()?;
    let cfg = NoiseConfig {
        seed: a.seed,
        corner_jitter_sigma: a.corner_jitter,
        corner_drop_rate: a.corner_drop,
        spurious_corner_rate: a.spurious_corners,
        edge_map_noise_sigma: a.edge_noise,
        region_erode_px: a.region_erode,
        rr_boundary_drop_rate: a.rr_drop,
        ..NoiseConfig::default()
    };
    let d = simulate(&gt, &cfg, a.canvas.canvas).input()?;
    emit(a.out.as_deref(), &detections_to_json(&d)).input()?;
    Ok(0)
}

fn cmd_generate(a: GenerateArgs) -> Result<u8, Failure> {
    let g = random_building(a.seed, &BuildingParams::default(), a.canvas.canvas);
    emit(a.out.as_deref(), &graph_to_json(&g)).input()?;
    Ok(0)
}

/// Expands files, directories (their `.json` files) and glob patterns into a
/// map from file name to path.
fn collect(inputs: &[String]) -> anyhow::Result<BTreeMap<String, PathBuf>> {
    let mut paths = Vec::new();
    for s in inputs {
        let p = Path::new(s);
        if p.is_dir() {
            for entry in fs::read_dir(p).with_context(|| format!("cannot list {s}"))? {
                let path = entry?.path();
                if path.extension().is_some_and(|e| e == "json") {
                    paths.push(path);
                }
            }
        } else if p.exists() {
            paths.push(p.to_path_buf());
        } else {
            let matches: Vec<PathBuf> =
                glob::glob(s).with_context(|| format!("bad pattern {s}"))?.filter_map(Result::ok).collect();
            paths.extend(matches);
        }
    }
    let mut out = BTreeMap::new();
    for p in paths {
        let name = p.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default();
        if let Some(prev) = out.insert(name.clone(), p.clone()) {
            if prev != p {
                bail!("two inputs are named {name}");
            }
        }
    }
    Ok(out)
}

fn cmd_evaluate(a: EvaluateArgs) -> Result<u8, Failure> {
    let mut preds = collect(&a.pred).input()?;
    let gts = collect(&a.gt).input()?;
    if gts.is_empty() {
        return Err(anyhow!("no ground-truth files found")).input();
    }
    // One file on each side pairs regardless of name.
    if preds.len() == 1 && gts.len() == 1 {
        let path = preds.pop_first().map(|(_, p)| p).unwrap_or_default();
        preds.insert(gts.keys().next().cloned().unwrap_or_default(), path);
    }
    if preds.keys().ne(gts.keys()) {
        let only_pred: Vec<&String> = preds.keys().filter(|k| !gts.contains_key(*k)).collect();
        let only_gt: Vec<&String> = gts.keys().filter(|k| !preds.contains_key(*k)).collect();
        return Err(anyhow!("unpaired files: prediction only {only_pred:?}, ground truth only {only_gt:?}")).input();
    }
    let mut p = Vec::new();
    let mut g = Vec::new();
    for (name, path) in &gts {
        g.push(load_graph(path).input()?);
        p.push(load_graph(&preds[name]).input()?);
    }
    let report = evaluate(&p, &g, a.canvas.canvas).internal()?;
    let s = report.percentages();
    println!("corner P/R/F1: {:.1} {:.1} {:.1}", s[0], s[1], s[2]);
    println!("edge   P/R/F1: {:.1} {:.1} {:.1}", s[3], s[4], s[5]);
    println!("region P/R/F1: {:.1} {:.1} {:.1}", s[6], s[7], s[8]);
    if let Some(out) = &a.out {
        let text = serde_json::to_string_pretty(&report.to_json()).internal()? + "\n";
        emit(Some(out), &text).input()?;
    }
    Ok(0)
}

fn cmd_export_lp(a: ExportLpArgs) -> Result<u8, Failure> {
    let d = load_detections(&a.detections).input()?;
    let (features, params) = a.program.resolve().input()?;
    let assembly = build(&d, &features, &params).internal()?;
    let text = write_lp(&assembly.program);
    if parse_lp(&text).is_err() {
        return Err(anyhow!("exported LP does not parse back")).internal();
    }
    emit(a.out.as_deref(), &text).input()?;
    Ok(0)
}

fn cmd_render(a: RenderArgs) -> Result<u8, Failure> {
    let text = read(&a.input).input()?;
    let value: serde_json::Value =
        serde_json::from_str(&text).with_context(|| format!("{} is not JSON", a.input.display())).input()?;
    let svg = if value.get("vertices").is_some() {
        render_graph(&graph_from_json(&text).input()?, a.canvas.canvas)
    } else {
        let d = detections_from_json(&text).input()?;
        render_detections(&d, a.debug, &BuildParams::default())
    };
    emit(a.out.as_deref(), &svg).input()?;
    Ok(0)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Assemble(a) => cmd_assemble(a),
        Command::Simulate(a) => cmd_simulate(a),
        Command::Generate(a) => cmd_generate(a),
        Command::Evaluate(a) => cmd_evaluate(a),
        Command::ExportLp(a) => cmd_export_lp(a),
        Command::Render(a) => cmd_render(a),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {:#}", f.error);
            ExitCode::from(f.code)
        }
    }
}
