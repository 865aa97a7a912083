use std::io::Write as _;
use std::path::Path;

use serde::Serialize;
use vispath_core::context::{generate_suite, load_scene, write_suite, SceneDescriptor, SynthSpec};
use vispath_core::eval::{evaluate_dataset, EvalError, Method};

use crate::args::{DrawFlags, EvaluateArgs, FormatArg, PredictArgs, RenderArgs, SynthArgs};
use crate::config::{load_file_config, DrawSettings, PlanSettings, TOOL};
use crate::error::{input, usage, write_file, CliError};
use crate::prediction::{object_at, run_prediction, PredictionFile};
use crate::render::{build_scenery, ppm, svg};

fn stdout(bytes: &[u8]) -> Result<(), CliError> {
    std::io::stdout().write_all(bytes).map_err(|e| input(format!("standard output: {e}")))
}

fn warn(message: &str) {
    eprintln!("{}", serde_json::json!({ "warning": message }));
}

fn load(path: &Path) -> Result<SceneDescriptor, CliError> {
    load_scene(path).map_err(input)
}

pub fn predict(args: &PredictArgs) -> Result<(), CliError> {
    let file = load_file_config(args.planner.config.as_deref())?;
    let settings = PlanSettings::resolve(&args.planner, &file)?;
    let top = args.top.or(file.top).unwrap_or(10);
    if top == 0 {
        return Err(usage("top must be at least 1"));
    }
    let draw = DrawSettings::resolve(&DrawFlags::default(), &file)?;

    let scene = load(&args.scene)?;
    let object = object_at(&scene, args.object)?;
    let prediction = run_prediction(&scene, object, &settings, top)?;
    let record = PredictionFile::new(&scene, args.object, &settings, top, &prediction);
    let json = record.to_json();
    match &args.out {
        Some(path) => write_file(path, json.as_bytes())?,
        None => stdout(json.as_bytes())?,
    }
    if let Some(path) = &args.render {
        emit_render(&scene, &record, &draw, format_for(path, None), path)?;
    }
    Ok(())
}

fn parse_methods(names: &[String]) -> Result<Vec<Method>, CliError> {
    let methods = names
        .iter()
        .filter(|s| !s.trim().is_empty())
        .map(|s| s.parse::<Method>().map_err(|e| usage(e.to_string())))
        .collect::<Result<Vec<_>, _>>()?;
    if methods.is_empty() {
        return Err(usage("no methods selected"));
    }
    Ok(methods)
}

pub fn evaluate(args: &EvaluateArgs) -> Result<(), CliError> {
    let file = load_file_config(args.planner.config.as_deref())?;
    let settings = PlanSettings::resolve(&args.planner, &file)?;
    let methods = match args.methods.as_ref().or(file.methods.as_ref()) {
        Some(names) => parse_methods(names)?,
        None => Method::ALL.to_vec(),
    };
    if !args.dataset.is_dir() {
        return Err(input(format!("{}: dataset directory not found", args.dataset.display())));
    }
    let report = evaluate_dataset(&args.dataset, &methods, &settings.eval()).map_err(|e| match e {
        EvalError::NoMethods | EvalError::UnknownMethod(_) => usage(e.to_string()),
        _ => input(e),
    })?;
    for failure in &report.failures {
        warn(&format!("{}: {}", failure.path.display(), failure.message));
    }

    let mut names: Vec<&str> = methods.iter().map(|m| m.name()).collect();
    names.sort_unstable();
    names.dedup();
    let preamble = vec![TOOL.to_string(), settings.summary(), format!("methods={}", names.join(","))];
    let csv = report.to_csv(&preamble);
    let table = report.to_text(&preamble);
    match &args.out {
        Some(path) => write_file(path, csv.as_bytes())?,
        None => stdout(csv.as_bytes())?,
    }
    match (&args.table, &args.out) {
        (Some(path), _) => write_file(path, table.as_bytes())?,
        (None, Some(_)) => stdout(table.as_bytes())?,
        (None, None) => {}
    }
    Ok(())
}

#[derive(Serialize)]
struct SynthManifest<'a> {
    tool: &'a str,
    seed: u64,
    count: u32,
    width: u32,
    height: u32,
    agents: u32,
}

pub fn synth(args: &SynthArgs) -> Result<(), CliError> {
    let file = load_file_config(args.config.as_deref())?;
    let defaults = SynthSpec::default();
    let seed = args.seed.or(file.seed).unwrap_or(0);
    let count = args.count.or(file.count).unwrap_or(10);
    if count == 0 {
        return Err(usage("count must be at least 1"));
    }
    let spec = SynthSpec {
        width: args.width.or(file.width).unwrap_or(defaults.width),
        height: args.height.or(file.height).unwrap_or(defaults.height),
        agents: args.agents.or(file.agents).unwrap_or(defaults.agents),
        ..defaults
    };
    let mut scenes = generate_suite(seed, count, &spec).map_err(|e| match e {
        vispath_core::context::SynthError::InvalidSpec(_) => usage(e.to_string()),
        other => CliError::Planning(other.to_string()),
    })?;
    std::fs::create_dir_all(&args.out).map_err(|e| input(format!("{}: {e}", args.out.display())))?;
    write_suite(&args.out, &mut scenes).map_err(input)?;
    let manifest = SynthManifest { tool: TOOL, seed, count, width: spec.width, height: spec.height, agents: spec.agents };
    let text = toml::to_string(&manifest).expect("manifest serializes");
    write_file(&args.out.join("synth.toml"), text.as_bytes())
}

fn format_for(path: &Path, explicit: Option<FormatArg>) -> FormatArg {
    explicit.unwrap_or_else(|| match path.extension().and_then(|e| e.to_str()) {
        Some(ext) if ext.eq_ignore_ascii_case("ppm") => FormatArg::Ppm,
        _ => FormatArg::Svg,
    })
}

fn emit_render(
    scene: &SceneDescriptor,
    record: &PredictionFile,
    draw: &DrawSettings,
    format: FormatArg,
    out: &Path,
) -> Result<(), CliError> {
    let scenery = build_scenery(scene, record, draw)?;
    let metadata = serde_json::json!({
        "tool": TOOL,
        "scene_id": record.scene_id,
        "object_index": record.object_index,
        "config": record.config,
        "draw": draw,
    })
    .to_string();
    let bytes = match format {
        FormatArg::Svg => svg(&scenery, draw, &metadata).into_bytes(),
        FormatArg::Ppm => ppm(&scenery, draw, &metadata),
    };
    write_file(out, &bytes)
}

pub fn render(args: &RenderArgs) -> Result<(), CliError> {
    let file = load_file_config(args.config.as_deref())?;
    let draw = DrawSettings::resolve(&args.draw, &file)?;
    let scene = load(&args.scene)?;
    let text = std::fs::read_to_string(&args.prediction)
        .map_err(|e| input(format!("{}: {e}", args.prediction.display())))?;
    let record: PredictionFile =
        serde_json::from_str(&text).map_err(|e| input(format!("{}: {e}", args.prediction.display())))?;
    if record.scene_id != scene.scene_id {
        return Err(input(format!(
            "prediction is for scene '{}' but {} is '{}'",
            record.scene_id,
            args.scene.display(),
            scene.scene_id
        )));
    }
    emit_render(&scene, &record, &draw, format_for(&args.out, args.format), &args.out)
}
