//! Cost conversion, orientation-penalized grid graphs, and extraction of
//! the shortest start-to-border paths.

mod graph;
mod predict;
mod search;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::field::ScalarField;
use crate::geom::{GeomError, Position};

pub use graph::{build_graph, PlanGraph};
pub use predict::{path_cost_audit, predict, CostAudit, PredictError, Prediction};
pub use search::{shortest_paths_to_boundary, shortest_paths_to_boundary_top, PredictionSet};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PlannerError {
    #[error("invalid planner config: {0}")]
    InvalidConfig(String),
    #[error("start {start} lies on the grid border; it is already an exit point")]
    StartOnBoundary { start: Position },
    #[error("start {start} lies outside the {width}x{height} grid")]
    StartOutside {
        start: Position,
        width: usize,
        height: usize,
    },
    #[error("probe distance must be at least 1")]
    ZeroProbeDistance,
    #[error("cost {value} at {position} is not a positive finite number")]
    NonPositiveCost { position: Position, value: f64 },
    #[error("path needs at least two cells to define an initial direction")]
    UndefinedInitialDirection,
    #[error("path cell {position} lies outside the cost map")]
    PathOutsideMap { position: Position },
    #[error(transparent)]
    Geometry(#[from] GeomError),
}

/// Planner parameters.
///
/// `alpha` is the signed sigmoid slope of the reward-to-cost conversion;
/// negative values make high-reward cells cheap. `epsilon` weighs the
/// orientation penalty against the accumulated cell cost.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PlannerConfig {
    pub alpha: f64,
    pub gamma: f64,
    pub epsilon: f64,
    /// Overrides the bounding-box derived probe distance when set.
    pub probe_distance: Option<u32>,
}

impl Default for PlannerConfig {
    fn default() -> Self {
        Self { alpha: -10.0, gamma: 0.5, epsilon: 5.0, probe_distance: None }
    }
}

impl PlannerConfig {
    pub fn validate(&self) -> Result<(), PlannerError> {
        if !self.alpha.is_finite() {
            return Err(PlannerError::InvalidConfig(format!("alpha must be finite, got {}", self.alpha)));
        }
        if !(self.gamma > 0.0 && self.gamma < 1.0) {
            return Err(PlannerError::InvalidConfig(format!("gamma must lie in (0, 1), got {}", self.gamma)));
        }
        if !(self.epsilon >= 0.0 && self.epsilon.is_finite()) {
            return Err(PlannerError::InvalidConfig(format!(
                "epsilon must be finite and >= 0, got {}",
                self.epsilon
            )));
        }
        if self.probe_distance == Some(0) {
            return Err(PlannerError::InvalidConfig("probe_distance must be >= 1".into()));
        }
        Ok(())
    }
}

/// Logistic reward-to-cost conversion:
/// `cost = 1 / (1 + exp(-alpha * (reward - gamma)))`.
pub fn cost_of(reward: f64, cfg: &PlannerConfig) -> f64 {
    1.0 / (1.0 + (-cfg.alpha * (reward - cfg.gamma)).exp())
}

pub fn to_cost_map(reward: &ScalarField, cfg: &PlannerConfig) -> ScalarField {
    reward.map(|r| cost_of(r, cfg))
}
