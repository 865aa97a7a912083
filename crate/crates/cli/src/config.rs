use std::path::Path;

use serde::{Deserialize, Serialize};
use vispath_core::context::AssemblyConfig;
use vispath_core::eval::{EvalConfig, OrientationSource};
use vispath_core::planner::PlannerConfig;

use crate::args::{BackgroundArg, DrawFlags, OrientationArg, PlannerFlags};
use crate::error::{input, usage, CliError};

pub const TOOL: &str = concat!("vispath ", env!("CARGO_PKG_VERSION"));

/// Keys accepted in a `--config` TOML file.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub alpha: Option<f64>,
    pub gamma: Option<f64>,
    pub epsilon: Option<f64>,
    pub probe_distance: Option<u32>,
    pub window: Option<u32>,
    pub stride: Option<u32>,
    pub downsample: Option<u32>,
    pub orientation: Option<String>,
    pub top: Option<usize>,
    pub methods: Option<Vec<String>>,
    pub seed: Option<u64>,
    pub count: Option<u32>,
    pub width: Option<u32>,
    pub height: Option<u32>,
    pub agents: Option<u32>,
    pub cell_size: Option<u32>,
    pub background: Option<String>,
}

pub fn load_file_config(path: Option<&Path>) -> Result<FileConfig, CliError> {
    let Some(path) = path else {
        return Ok(FileConfig::default());
    };
    let text = std::fs::read_to_string(path).map_err(|e| input(format!("{}: {e}", path.display())))?;
    toml::from_str(&text).map_err(|e| usage(format!("{}: {}", path.display(), e.message())))
}

/// Fully resolved planning settings, echoed into every output.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PlanSettings {
    pub alpha: f64,
    pub gamma: f64,
    pub epsilon: f64,
    pub probe_distance: Option<u32>,
    pub window: Option<u32>,
    pub stride: Option<u32>,
    pub downsample: u32,
    pub orientation: &'static str,
}

fn parse_orientation(s: &str) -> Result<OrientationArg, CliError> {
    match s {
        "auto" => Ok(OrientationArg::Auto),
        "declared" => Ok(OrientationArg::Declared),
        "trajectory" => Ok(OrientationArg::Trajectory),
        other => Err(usage(format!("unknown orientation '{other}' (expected auto, declared or trajectory)"))),
    }
}

impl PlanSettings {
    pub fn resolve(flags: &PlannerFlags, file: &FileConfig) -> Result<Self, CliError> {
        let defaults = PlannerConfig::default();
        let orientation = match (flags.orientation, &file.orientation) {
            (Some(o), _) => o,
            (None, Some(s)) => parse_orientation(s)?,
            (None, None) => OrientationArg::Auto,
        };
        let settings = Self {
            alpha: flags.alpha.or(file.alpha).unwrap_or(defaults.alpha),
            gamma: flags.gamma.or(file.gamma).unwrap_or(defaults.gamma),
            epsilon: flags.epsilon.or(file.epsilon).unwrap_or(defaults.epsilon),
            probe_distance: flags.probe_distance.or(file.probe_distance),
            window: flags.window.or(file.window),
            stride: flags.stride.or(file.stride),
            downsample: flags.downsample.or(file.downsample).unwrap_or(1),
            orientation: match orientation {
                OrientationArg::Auto => "auto",
                OrientationArg::Declared => "declared",
                OrientationArg::Trajectory => "trajectory",
            },
        };
        settings.planner().validate().map_err(|e| usage(e.to_string()))?;
        if settings.downsample == 0 {
            return Err(usage("downsample must be at least 1"));
        }
        if settings.window == Some(0) || settings.stride == Some(0) {
            return Err(usage("window and stride must be at least 1"));
        }
        if let (Some(w), Some(s)) = (settings.window, settings.stride) {
            if s > w {
                return Err(usage(format!("stride {s} exceeds window {w}")));
            }
        }
        Ok(settings)
    }

    pub fn planner(&self) -> PlannerConfig {
        PlannerConfig {
            alpha: self.alpha,
            gamma: self.gamma,
            epsilon: self.epsilon,
            probe_distance: self.probe_distance,
        }
    }

    pub fn assembly(&self) -> AssemblyConfig {
        AssemblyConfig { window: self.window, stride: self.stride, downsample: self.downsample }
    }

    pub fn orientation_source(&self) -> OrientationSource {
        match self.orientation {
            "declared" => OrientationSource::Declared,
            "trajectory" => OrientationSource::Trajectory,
            _ => OrientationSource::Auto,
        }
    }

    pub fn eval(&self) -> EvalConfig {
        EvalConfig { planner: self.planner(), assembly: self.assembly(), orientation: self.orientation_source() }
    }

    /// Single-line `key=value` summary for text outputs.
    pub fn summary(&self) -> String {
        let opt = |v: Option<u32>| v.map_or_else(|| "auto".to_string(), |x| x.to_string());
        format!(
            "alpha={} gamma={} epsilon={} probe_distance={} window={} stride={} downsample={} orientation={}",
            self.alpha,
            self.gamma,
            self.epsilon,
            opt(self.probe_distance),
            opt(self.window),
            opt(self.stride),
            self.downsample,
            self.orientation
        )
    }
}

/// Resolved drawing options.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DrawSettings {
    pub cell_size: u32,
    pub background: Option<&'static str>,
    pub obstacles: bool,
    pub ground_truth: bool,
    pub arrow: bool,
}

impl DrawSettings {
    pub fn resolve(flags: &DrawFlags, file: &FileConfig) -> Result<Self, CliError> {
        let cell_size = flags.cell_size.or(file.cell_size).unwrap_or(16);
        if cell_size == 0 {
            return Err(usage("cell size must be at least 1"));
        }
        let background = match (flags.background, file.background.as_deref()) {
            (Some(BackgroundArg::Reward), _) | (None, Some("reward")) => "reward",
            (Some(BackgroundArg::Cost), _) | (None, Some("cost")) | (None, None) => "cost",
            (None, Some(other)) => return Err(usage(format!("unknown background '{other}' (expected cost or reward)"))),
        };
        Ok(Self {
            cell_size,
            background: (!flags.no_background).then_some(background),
            obstacles: !flags.no_obstacles,
            ground_truth: !flags.no_ground_truth,
            arrow: !flags.no_arrow,
        })
    }
}
