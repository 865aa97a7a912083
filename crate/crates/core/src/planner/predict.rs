use thiserror::Error;

use super::graph::build_graph;
use super::search::{shortest_paths_to_boundary_top, PredictionSet};
use super::{to_cost_map, PlannerConfig, PlannerError};
use crate::context::{assemble_reward_map, AssemblyConfig, ObjectRecord, OrientationProvider, ProviderError, RewardProvider, SceneDescriptor};
use crate::field::ScalarField;
use crate::geom::{angular_difference, direction_between, Angle, GeomError, PathSeq, Position};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PredictError {
    #[error("config: {0}")]
    Config(#[from] PlannerError),
    #[error("top_n must be at least 1")]
    ZeroTopN,
    #[error("object geometry: {0}")]
    Geometry(#[from] GeomError),
    #[error("reward map: {0}")]
    Reward(ProviderError),
    #[error("orientation: {0}")]
    Orientation(ProviderError),
    #[error("graph: {0}")]
    Graph(PlannerError),
}

impl PredictError {
    pub fn stage(&self) -> &'static str {
        match self {
            Self::Config(_) | Self::ZeroTopN => "config",
            Self::Geometry(_) => "geometry",
            Self::Reward(_) => "reward",
            Self::Orientation(_) => "orientation",
            Self::Graph(_) => "graph",
        }
    }
}

/// Output of one end-to-end prediction, with the intermediates kept for
/// rendering and auditing.
#[derive(Debug, Clone, PartialEq)]
pub struct Prediction {
    pub set: PredictionSet,
    pub reward: ScalarField,
    pub cost: ScalarField,
    pub theta: Angle,
    pub start: Position,
    pub probe_distance: u32,
    pub window: u32,
    pub stride: u32,
}

/// Assembles the reward map, estimates the heading, converts to costs,
/// builds the graph and returns the `top_n` shortest border paths.
pub fn predict(
    scene: &SceneDescriptor,
    object: &ObjectRecord,
    rewards: &dyn RewardProvider,
    orientation: &dyn OrientationProvider,
    cfg: &PlannerConfig,
    assembly: &AssemblyConfig,
    top_n: usize,
) -> Result<Prediction, PredictError> {
    cfg.validate()?;
    if top_n == 0 {
        return Err(PredictError::ZeroTopN);
    }
    let downsample = assembly.downsample;
    let start = object.start_cell(downsample)?;
    let probe_distance = match cfg.probe_distance {
        Some(d) => d,
        None => object.probe_distance(downsample)?,
    };
    let (window, stride) = assembly.resolve(probe_distance);

    let reward = assemble_reward_map(scene, object, rewards, window, stride, downsample)
        .map_err(PredictError::Reward)?;
    let theta = orientation.estimate(object).map_err(PredictError::Orientation)?;
    let cost = to_cost_map(&reward, cfg);
    let graph = build_graph(&cost, start, theta, probe_distance, cfg).map_err(PredictError::Graph)?;
    let set = shortest_paths_to_boundary_top(&graph, top_n);
    Ok(Prediction { set, reward, cost, theta, start, probe_distance, window, stride })
}

/// The path objective evaluated directly rather than through graph weights.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CostAudit {
    /// Sum of cell costs over every path cell, the start included.
    pub spatial: f64,
    /// Angular difference between the path's initial direction and `theta`.
    pub orientation: f64,
    /// `spatial + epsilon * orientation`.
    pub total: f64,
}

/// Evaluates a path against the original objective. The initial direction
/// is taken towards the first cell at L1 distance `>= d` from the start, or
/// towards the last cell when the path never gets that far.
pub fn path_cost_audit(
    path: &PathSeq,
    cost: &ScalarField,
    theta: Angle,
    probe_distance: u32,
    cfg: &PlannerConfig,
) -> Result<CostAudit, PlannerError> {
    let cells = path.positions();
    if cells.len() < 2 {
        return Err(PlannerError::UndefinedInitialDirection);
    }
    let mut spatial = 0.0;
    for &p in cells {
        spatial += cost.get(p).ok_or(PlannerError::PathOutsideMap { position: p })?;
    }
    let start = cells[0];
    let probe = cells[1..]
        .iter()
        .find(|p| p.l1(start) >= i64::from(probe_distance))
        .unwrap_or(&cells[cells.len() - 1]);
    let initial = direction_between(start, *probe).map_err(|_| PlannerError::UndefinedInitialDirection)?;
    let orientation = angular_difference(initial, theta);
    Ok(CostAudit { spatial, orientation, total: spatial + cfg.epsilon * orientation })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::context::{Constant, Fixed};
    use crate::geom::BoundingBox;
    use std::f64::consts::PI;

    fn path(cells: &[(i32, i32)]) -> PathSeq {
        PathSeq::new(cells.iter().map(|&(x, y)| Position::new(x, y)).collect()).unwrap()
    }

    #[test]
    fn audit_examples() {
        let cost = ScalarField::filled(5, 5, 0.2).unwrap();
        let cfg = PlannerConfig::default();
        let p = path(&[(2, 2), (3, 2), (4, 2)]);
        let aligned = path_cost_audit(&p, &cost, Angle::new(0.0), 1, &cfg).unwrap();
        assert!((aligned.spatial - 0.6).abs() < 1e-12);
        assert_eq!(aligned.orientation, 0.0);
        assert!((aligned.total - 0.6).abs() < 1e-12);
        let opposed = path_cost_audit(&p, &cost, Angle::new(PI), 2, &cfg).unwrap();
        assert!((opposed.total - (0.6 + 5.0 * PI)).abs() < 1e-12);
        assert_eq!(
            path_cost_audit(&path(&[(2, 2)]), &cost, Angle::new(0.0), 1, &cfg),
            Err(PlannerError::UndefinedInitialDirection)
        );
    }

    #[test]
    fn audit_falls_back_to_last_cell() {
        let cost = ScalarField::filled(5, 5, 0.1).unwrap();
        let p = path(&[(2, 2), (2, 1)]);
        let audit = path_cost_audit(&p, &cost, Angle::new(-PI / 2.0), 4, &PlannerConfig::default()).unwrap();
        assert_eq!(audit.orientation, 0.0);
    }

    fn free_scene(w: u32, h: u32) -> SceneDescriptor {
        SceneDescriptor {
            scene_id: "free".into(),
            width: w,
            height: h,
            reward_map_ref: None,
            obstacle_map_ref: None,
            reward: None,
            obstacles: Some(ScalarField::filled(w as usize, h as usize, 0.0).unwrap()),
            objects: vec![],
        }
    }

    #[test]
    fn top_n_truncation_and_stage_errors() {
        let scene = free_scene(9, 9);
        let obj = ObjectRecord::new(BoundingBox::new(3, 3, 3, 3).unwrap());
        let cfg = PlannerConfig::default();
        let rewards = Constant::new(1.0).unwrap();
        let heading = Fixed(Angle::new(0.0));
        let one = predict(&scene, &obj, &rewards, &heading, &cfg, &AssemblyConfig::default(), 1).unwrap();
        assert_eq!(one.set.len(), 1);
        assert_eq!(one.start, Position::new(4, 4));
        assert_eq!(one.probe_distance, 4);
        assert_eq!(one.set.top1().unwrap().0.positions(), path(&[(4, 4), (5, 4), (6, 4), (7, 4), (8, 4)]).positions());
        assert_eq!(one.set.top1().unwrap().0.end(), Position::new(8, 4));

        assert_eq!(
            predict(&scene, &obj, &rewards, &heading, &cfg, &AssemblyConfig::default(), 0),
            Err(PredictError::ZeroTopN)
        );
        let edge = ObjectRecord::new(BoundingBox::new(0, 3, 1, 1).unwrap());
        let err = predict(&scene, &edge, &rewards, &heading, &cfg, &AssemblyConfig::default(), 3).unwrap_err();
        assert_eq!(err.stage(), "graph");
        let err = predict(&scene, &obj, &rewards, &crate::context::Declared, &cfg, &AssemblyConfig::default(), 3)
            .unwrap_err();
        assert_eq!(err.stage(), "orientation");
    }
}
