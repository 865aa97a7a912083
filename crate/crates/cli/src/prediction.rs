use serde::{Deserialize, Serialize};
use vispath_core::context::{default_reward_provider, ObjectRecord, SceneDescriptor};
use vispath_core::planner::{predict, PredictError, Prediction};

use crate::config::{PlanSettings, TOOL};
use crate::error::{input, usage, CliError};

/// Settings a prediction was produced with, after resolving automatic values.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PredictionConfig {
    pub alpha: f64,
    pub gamma: f64,
    pub epsilon: f64,
    pub d: u32,
    pub top: usize,
    pub window: u32,
    pub stride: u32,
    pub downsample: u32,
    pub orientation: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PathEntry {
    pub length: f64,
    pub cells: Vec<[i32; 2]>,
}

/// On-disk prediction document.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PredictionFile {
    pub tool: String,
    pub scene_id: String,
    pub object_index: usize,
    /// Planning grid `[width, height]` in cells.
    pub grid: [usize; 2],
    pub start: [i32; 2],
    pub theta_esti: f64,
    pub config: PredictionConfig,
    pub paths: Vec<PathEntry>,
}

impl PredictionFile {
    pub fn new(scene: &SceneDescriptor, object_index: usize, settings: &PlanSettings, top: usize, p: &Prediction) -> Self {
        Self {
            tool: TOOL.to_string(),
            scene_id: scene.scene_id.clone(),
            object_index,
            grid: [p.reward.width(), p.reward.height()],
            start: [p.start.x, p.start.y],
            theta_esti: p.theta.radians(),
            config: PredictionConfig {
                alpha: settings.alpha,
                gamma: settings.gamma,
                epsilon: settings.epsilon,
                d: p.probe_distance,
                top,
                window: p.window,
                stride: p.stride,
                downsample: settings.downsample,
                orientation: settings.orientation.to_string(),
            },
            paths: p
                .set
                .iter()
                .map(|(path, length)| PathEntry {
                    length,
                    cells: path.positions().iter().map(|c| [c.x, c.y]).collect(),
                })
                .collect(),
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("prediction serializes");
        s.push('\n');
        s
    }
}

pub fn object_at(scene: &SceneDescriptor, index: usize) -> Result<&ObjectRecord, CliError> {
    scene.objects.get(index).ok_or_else(|| {
        input(format!(
            "scene '{}' has {} objects; object index {index} is out of range",
            scene.scene_id,
            scene.objects.len()
        ))
    })
}

pub fn run_prediction(
    scene: &SceneDescriptor,
    object: &ObjectRecord,
    settings: &PlanSettings,
    top: usize,
) -> Result<Prediction, CliError> {
    let rewards = default_reward_provider(scene, settings.downsample)
        .ok_or_else(|| input(format!("scene '{}' has no reward or obstacle map", scene.scene_id)))?
        .map_err(input)?;
    let heading = settings.orientation_source().provider(object);
    predict(scene, object, rewards.as_ref(), heading, &settings.planner(), &settings.assembly(), top).map_err(
        |e: PredictError| {
            let msg = format!("{} stage: {e}", e.stage());
            match e {
                PredictError::Config(_) | PredictError::ZeroTopN => usage(msg),
                _ => CliError::Planning(msg),
            }
        },
    )
}
