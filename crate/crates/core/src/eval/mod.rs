//! Path distances and the dataset evaluation harness.

mod report;

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use rayon::prelude::*;
use thiserror::Error;

use crate::context::{
    default_reward_provider, load_scene, AssemblyConfig, Constant, Declared, ObjectRecord,
    OrientationProvider, ProviderError, SceneDescriptor, TrajectoryOracle,
};
use crate::geom::{GeomError, PathSeq, Position};
use crate::planner::{predict, PlannerConfig, PredictError};

pub use report::{EvalReport, LoadFailure, ReportRow};

#[derive(Debug, Error)]
pub enum EvalError {
    #[error("point set must not be empty")]
    EmptyPointSet,
    #[error("prediction set must not be empty")]
    EmptyPredictions,
    #[error("n must be at least 1")]
    ZeroN,
    #[error("{0}: dataset directory is unreadable: {1}")]
    UnreadableDataset(PathBuf, std::io::Error),
    #[error("{0}: dataset contains no loadable scenes")]
    EmptyDataset(PathBuf),
    #[error("no evaluation methods selected")]
    NoMethods,
    #[error("unknown method '{0}' (expected planner, straightline or uniform)")]
    UnknownMethod(String),
    #[error("orientation: {0}")]
    Orientation(#[from] ProviderError),
    #[error(transparent)]
    Geometry(#[from] GeomError),
}

/// Directed mean nearest-neighbor distance from `a` to `b`.
fn directed_mean(a: &[Position], b: &[Position]) -> f64 {
    let total: f64 = a
        .iter()
        .map(|p| b.iter().map(|q| p.euclidean(*q)).fold(f64::INFINITY, f64::min))
        .sum();
    total / a.len() as f64
}

/// Modified Hausdorff distance: the larger of the two directed mean
/// nearest-neighbor distances. Paths are treated as point sets.
pub fn mhd(a: &[Position], b: &[Position]) -> Result<f64, EvalError> {
    if a.is_empty() || b.is_empty() {
        return Err(EvalError::EmptyPointSet);
    }
    Ok(directed_mean(a, b).max(directed_mean(b, a)))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TopNAverage {
    pub value: f64,
    /// Number of predictions actually averaged, `min(n, available)`.
    pub count: usize,
}

/// Mean MHD between the ground truth and the first `n` predictions.
pub fn top_n_average(gt: &[Position], predictions: &[PathSeq], n: usize) -> Result<TopNAverage, EvalError> {
    if n == 0 {
        return Err(EvalError::ZeroN);
    }
    if predictions.is_empty() {
        return Err(EvalError::EmptyPredictions);
    }
    let count = n.min(predictions.len());
    let mut sum = 0.0;
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for p in &predictions[..count] {
        let v = mhd(gt, p.positions())?;
        sum += v;
        lo = lo.min(v);
        hi = hi.max(v);
    }
    let value = (sum / count as f64).clamp(lo, hi);
    Ok(TopNAverage { value, count })
}

/// Rasterized ray from `start` along `theta` up to the first border cell of
/// a `width x height` grid. Steps advance one cell along the dominant axis,
/// so the result is 8-connected.
pub fn rasterize_ray(start: Position, theta: crate::geom::Angle, width: usize, height: usize) -> PathSeq {
    let (sin, cos) = theta.radians().sin_cos();
    let major = sin.abs().max(cos.abs());
    let (sx, sy) = (cos / major, sin / major);
    let on_border = |p: Position| {
        p.x <= 0 || p.y <= 0 || p.x as usize >= width - 1 || p.y as usize >= height - 1
    };
    let mut cells = vec![start];
    let mut t = 1.0;
    let mut cur = start;
    while !on_border(cur) {
        let next = Position::new(
            (f64::from(start.x) + t * sx).round() as i32,
            (f64::from(start.y) + t * sy).round() as i32,
        );
        cells.push(next);
        cur = next;
        t += 1.0;
    }
    PathSeq::new(cells).expect("unit-major steps are 8-adjacent")
}

/// Reference comparator: the straight ray from the object's start cell
/// along its estimated heading.
pub fn straight_line_baseline(
    scene: &SceneDescriptor,
    object: &ObjectRecord,
    orientation: &dyn OrientationProvider,
    downsample: u32,
) -> Result<PathSeq, EvalError> {
    let (width, height) = scene.grid_dims(downsample);
    let start = object.start_cell(downsample)?;
    let theta = orientation.estimate(object)?;
    Ok(rasterize_ray(start, theta, width, height))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Method {
    /// Full pipeline with the scene's reward map.
    Planner,
    /// Straight ray along the estimated heading.
    StraightLine,
    /// Planner over a uniform reward map: orientation and geometry only.
    Uniform,
}

impl Method {
    pub const ALL: [Method; 3] = [Method::Planner, Method::StraightLine, Method::Uniform];

    pub fn name(self) -> &'static str {
        match self {
            Method::Planner => "planner",
            Method::StraightLine => "straightline",
            Method::Uniform => "uniform",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Method {
    type Err = EvalError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Method::ALL
            .into_iter()
            .find(|m| m.name() == s.trim())
            .ok_or_else(|| EvalError::UnknownMethod(s.to_string()))
    }
}

/// Where headings come from during evaluation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum OrientationSource {
    /// Declared orientation when present, otherwise the trajectory oracle.
    #[default]
    Auto,
    Declared,
    Trajectory,
}

impl OrientationSource {
    pub fn provider(self, object: &ObjectRecord) -> &'static dyn OrientationProvider {
        match self {
            OrientationSource::Declared => &Declared,
            OrientationSource::Trajectory => &TrajectoryOracle,
            OrientationSource::Auto if object.orientation.is_some() => &Declared,
            OrientationSource::Auto => &TrajectoryOracle,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct EvalConfig {
    pub planner: PlannerConfig,
    pub assembly: AssemblyConfig,
    pub orientation: OrientationSource,
}

/// Per-sample metrics for one method.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SampleScore {
    pub top1: f64,
    pub top5: f64,
    pub top10: f64,
}

/// Why an object did not contribute to the aggregates.
#[derive(Debug, Clone, PartialEq)]
pub enum SkipReason {
    NoTrajectory,
    /// Start-to-end displacement below `2·d` cells.
    TooShort,
    Failed(String),
}

fn score_paths(gt: &[Position], paths: &[PathSeq]) -> Result<SampleScore, EvalError> {
    Ok(SampleScore {
        top1: top_n_average(gt, paths, 1)?.value,
        top5: top_n_average(gt, paths, 5)?.value,
        top10: top_n_average(gt, paths, 10)?.value,
    })
}

fn failure(e: impl fmt::Display) -> SkipReason {
    SkipReason::Failed(e.to_string())
}

/// Scores one object under every method, or says why it was skipped.
pub fn evaluate_object(
    scene: &SceneDescriptor,
    object: &ObjectRecord,
    methods: &[Method],
    cfg: &EvalConfig,
) -> Result<Vec<SampleScore>, SkipReason> {
    let downsample = cfg.assembly.downsample;
    let gt = object.trajectory_cells(downsample).ok_or(SkipReason::NoTrajectory)?;
    let d = match cfg.planner.probe_distance {
        Some(d) => d,
        None => object.probe_distance(downsample).map_err(failure)?,
    };
    if gt[0].euclidean(gt[gt.len() - 1]) < f64::from(2 * d) {
        return Err(SkipReason::TooShort);
    }
    let heading = cfg.orientation.provider(object);
    methods
        .iter()
        .map(|method| {
            let paths = match method {
                Method::StraightLine => {
                    vec![straight_line_baseline(scene, object, heading, downsample).map_err(failure)?]
                }
                Method::Planner | Method::Uniform => {
                    let rewards = match method {
                        Method::Planner => default_reward_provider(scene, downsample)
                            .ok_or_else(|| failure("scene has no reward or obstacle map"))?
                            .map_err(failure)?,
                        _ => Box::new(Constant::new(1.0).expect("1.0 is a valid reward")),
                    };
                    predict(scene, object, rewards.as_ref(), heading, &cfg.planner, &cfg.assembly, 10)
                        .map_err(|e: PredictError| failure(format!("{} stage: {e}", e.stage())))?
                        .set
                        .paths()
                        .to_vec()
                }
            };
            score_paths(&gt, &paths).map_err(failure)
        })
        .collect()
}

/// Descriptor files of a dataset directory: `*.json` files directly inside
/// it and `scene.json` in each immediate subdirectory, in name order.
pub fn dataset_scene_files(dir: &Path) -> Result<Vec<PathBuf>, EvalError> {
    let entries = std::fs::read_dir(dir).map_err(|e| EvalError::UnreadableDataset(dir.to_path_buf(), e))?;
    let mut paths: Vec<PathBuf> = entries.filter_map(|e| e.ok()).map(|e| e.path()).collect();
    paths.sort();
    Ok(paths
        .into_iter()
        .filter_map(|p| {
            if p.is_dir() {
                let nested = p.join("scene.json");
                nested.is_file().then_some(nested)
            } else {
                (p.extension().is_some_and(|e| e == "json")).then_some(p)
            }
        })
        .collect())
}

/// Evaluates every selected method on every annotated object of a dataset.
pub fn evaluate_dataset(dir: &Path, methods: &[Method], cfg: &EvalConfig) -> Result<EvalReport, EvalError> {
    if methods.is_empty() {
        return Err(EvalError::NoMethods);
    }
    let files = dataset_scene_files(dir)?;
    let loaded: Vec<_> = files.par_iter().map(|p| (p, load_scene(p))).collect();
    let mut scenes = Vec::new();
    let mut failures = Vec::new();
    for (path, result) in loaded {
        match result {
            Ok(scene) => scenes.push(scene),
            Err(e) => failures.push(LoadFailure { path: path.clone(), message: e.to_string() }),
        }
    }
    if scenes.is_empty() {
        return Err(EvalError::EmptyDataset(dir.to_path_buf()));
    }
    Ok(evaluate_scenes(&scenes, methods, cfg, failures))
}

/// Evaluates in-memory scenes; rows come out ordered by scene id, then method.
pub fn evaluate_scenes(
    scenes: &[SceneDescriptor],
    methods: &[Method],
    cfg: &EvalConfig,
    failures: Vec<LoadFailure>,
) -> EvalReport {
    let mut methods = methods.to_vec();
    methods.sort();
    methods.dedup();
    let mut order: Vec<&SceneDescriptor> = scenes.iter().collect();
    order.sort_by(|a, b| a.scene_id.cmp(&b.scene_id));

    let tasks: Vec<(usize, &ObjectRecord)> = order
        .iter()
        .enumerate()
        .flat_map(|(i, s)| s.objects.iter().map(move |o| (i, o)))
        .collect();
    let outcomes: Vec<_> = tasks
        .par_iter()
        .map(|&(i, obj)| (i, evaluate_object(order[i], obj, &methods, cfg)))
        .collect();

    let per_scene = order
        .iter()
        .enumerate()
        .map(|(i, scene)| {
            let results: Vec<_> = outcomes.iter().filter(|(j, _)| *j == i).map(|(_, r)| r.clone()).collect();
            (scene.scene_id.clone(), results)
        })
        .collect::<Vec<_>>();
    EvalReport::assemble(&methods, &per_scene, failures)
}
