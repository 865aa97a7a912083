//! Scene descriptors: geometry, raster references and annotated objects.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::raster::{self, RasterError};
use crate::field::ScalarField;
use crate::geom::{diagonal_distance, Angle, BoundingBox, GeomError, Position};

#[derive(Debug, Error)]
pub enum SceneError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}:{line}:{column}: {message}")]
    Parse {
        path: PathBuf,
        line: usize,
        column: usize,
        message: String,
    },
    #[error(transparent)]
    Raster(#[from] RasterError),
    #[error("{path}: {field} is {got_w}x{got_h} but the scene declares {width}x{height}")]
    DimensionMismatch {
        path: PathBuf,
        field: &'static str,
        width: u32,
        height: u32,
        got_w: usize,
        got_h: usize,
    },
    #[error("{path}: objects[{index}].bbox {bbox:?} lies outside the {width}x{height} scene")]
    BoxOutOfRange {
        path: PathBuf,
        index: usize,
        bbox: [i64; 4],
        width: u32,
        height: u32,
    },
    #[error("{path}: objects[{index}].bbox: {source}")]
    InvalidBox {
        path: PathBuf,
        index: usize,
        #[source]
        source: GeomError,
    },
    #[error("{path}: objects[{index}].trajectory: {reason}")]
    InvalidTrajectory {
        path: PathBuf,
        index: usize,
        reason: String,
    },
    #[error("{path}: scene needs a reward_map or an obstacle_map")]
    NoRasters { path: PathBuf },
    #[error("{path}: scene dimensions must be positive")]
    EmptyScene { path: PathBuf },
}

/// On-disk JSON layout of a scene descriptor.
#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SceneFile {
    scene_id: String,
    width: u32,
    height: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    reward_map: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    obstacle_map: Option<String>,
    objects: Vec<ObjectFile>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ObjectFile {
    bbox: [i64; 4],
    #[serde(default, skip_serializing_if = "Option::is_none")]
    orientation: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    trajectory: Option<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ObjectRecord {
    pub bbox: BoundingBox,
    pub orientation: Option<Angle>,
    pub trajectory_ref: Option<PathBuf>,
    /// Ground-truth trajectory in scene pixels.
    pub trajectory: Option<Vec<Position>>,
}

impl ObjectRecord {
    pub fn new(bbox: BoundingBox) -> Self {
        Self { bbox, orientation: None, trajectory_ref: None, trajectory: None }
    }

    /// Path start `s_ini` on the planning grid.
    pub fn start_cell(&self, downsample: u32) -> Result<Position, GeomError> {
        self.bbox.center_cell(downsample)
    }

    pub fn probe_distance(&self, downsample: u32) -> Result<u32, GeomError> {
        diagonal_distance(&self.bbox, downsample)
    }

    /// Ground truth mapped onto the planning grid, with consecutive
    /// duplicates collapsed.
    pub fn trajectory_cells(&self, downsample: u32) -> Option<Vec<Position>> {
        let k = downsample.max(1) as i32;
        let traj = self.trajectory.as_ref()?;
        let mut cells: Vec<Position> = Vec::with_capacity(traj.len());
        for p in traj {
            let c = Position::new(p.x.div_euclid(k), p.y.div_euclid(k));
            if cells.last() != Some(&c) {
                cells.push(c);
            }
        }
        Some(cells)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SceneDescriptor {
    pub scene_id: String,
    pub width: u32,
    pub height: u32,
    pub reward_map_ref: Option<PathBuf>,
    pub obstacle_map_ref: Option<PathBuf>,
    /// Reward raster at scene resolution, values in `[0, 1]`.
    pub reward: Option<ScalarField>,
    /// Binary obstacle raster at scene resolution (1.0 = obstacle).
    pub obstacles: Option<ScalarField>,
    pub objects: Vec<ObjectRecord>,
}

impl SceneDescriptor {
    /// Planning grid size after downsampling by `downsample`.
    pub fn grid_dims(&self, downsample: u32) -> (usize, usize) {
        let k = downsample.max(1) as usize;
        ((self.width as usize).div_ceil(k), (self.height as usize).div_ceil(k))
    }

    pub fn reward_field(&self, downsample: u32) -> Option<ScalarField> {
        self.reward.as_ref().map(|f| f.downsample_mean(downsample.max(1) as usize))
    }

    /// Per-cell obstacle fraction on the planning grid.
    pub fn occupancy_field(&self, downsample: u32) -> Option<ScalarField> {
        self.obstacles.as_ref().map(|f| f.downsample_mean(downsample.max(1) as usize))
    }
}

fn check_dims(
    path: &Path,
    field_name: &'static str,
    field: &ScalarField,
    width: u32,
    height: u32,
) -> Result<(), SceneError> {
    if field.dims() != (width as usize, height as usize) {
        return Err(SceneError::DimensionMismatch {
            path: path.to_path_buf(),
            field: field_name,
            width,
            height,
            got_w: field.width(),
            got_h: field.height(),
        });
    }
    Ok(())
}

/// Reads and validates a scene descriptor and everything it references.
/// Relative raster and trajectory paths resolve against the descriptor's
/// directory.
pub fn load_scene(path: &Path) -> Result<SceneDescriptor, SceneError> {
    let text = fs::read_to_string(path)
        .map_err(|source| SceneError::Io { path: path.to_path_buf(), source })?;
    let file: SceneFile = serde_json::from_str(&text).map_err(|e| SceneError::Parse {
        path: path.to_path_buf(),
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;
    if file.width == 0 || file.height == 0 {
        return Err(SceneError::EmptyScene { path: path.to_path_buf() });
    }
    if file.reward_map.is_none() && file.obstacle_map.is_none() {
        return Err(SceneError::NoRasters { path: path.to_path_buf() });
    }
    let base = path.parent().unwrap_or_else(|| Path::new("."));
    let resolve = |rel: &str| base.join(rel);

    let reward_map_ref = file.reward_map.as_deref().map(resolve);
    let obstacle_map_ref = file.obstacle_map.as_deref().map(resolve);
    let reward = match &reward_map_ref {
        Some(p) => {
            let f = raster::load_scalar_field(p)?;
            check_dims(p, "reward_map", &f, file.width, file.height)?;
            Some(f)
        }
        None => None,
    };
    let obstacles = match &obstacle_map_ref {
        Some(p) => {
            let f = raster::load_obstacle_map(p)?;
            check_dims(p, "obstacle_map", &f, file.width, file.height)?;
            Some(f)
        }
        None => None,
    };

    let mut objects = Vec::with_capacity(file.objects.len());
    for (index, obj) in file.objects.into_iter().enumerate() {
        let [b1, b2, w, h] = obj.bbox;
        let bbox = BoundingBox::new(b1, b2, w, h).map_err(|source| SceneError::InvalidBox {
            path: path.to_path_buf(),
            index,
            source,
        })?;
        if !bbox.fits_within(file.width, file.height) {
            return Err(SceneError::BoxOutOfRange {
                path: path.to_path_buf(),
                index,
                bbox: obj.bbox,
                width: file.width,
                height: file.height,
            });
        }
        let trajectory_ref = obj.trajectory.as_deref().map(resolve);
        let trajectory = match &trajectory_ref {
            Some(p) => {
                let points = raster::load_trajectory(p)?;
                validate_trajectory(&bbox, &points).map_err(|reason| {
                    SceneError::InvalidTrajectory { path: path.to_path_buf(), index, reason }
                })?;
                Some(points)
            }
            None => None,
        };
        objects.push(ObjectRecord {
            bbox,
            orientation: obj.orientation.map(Angle::new),
            trajectory_ref,
            trajectory,
        });
    }

    Ok(SceneDescriptor {
        scene_id: file.scene_id,
        width: file.width,
        height: file.height,
        reward_map_ref,
        obstacle_map_ref,
        reward,
        obstacles,
        objects,
    })
}

/// A trajectory needs two or more points and must start within `2·d`
/// pixels of the box center.
pub fn validate_trajectory(bbox: &BoundingBox, points: &[Position]) -> Result<(), String> {
    if points.len() < 2 {
        return Err(format!("needs at least 2 points, found {}", points.len()));
    }
    let d = diagonal_distance(bbox, 1).map_err(|e| e.to_string())?;
    let (cx, cy) = bbox.center();
    let first = points[0];
    let gap = (f64::from(first.x) - cx).hypot(f64::from(first.y) - cy);
    if gap > 2.0 * f64::from(d) {
        return Err(format!(
            "starts at {first}, {gap:.2} px from the box center (limit {})",
            2 * d
        ));
    }
    Ok(())
}

/// Writes `scene.json` plus its rasters and trajectories into `dir`, using
/// fixed file names. The in-memory references are updated to the written
/// files.
pub fn write_scene(dir: &Path, scene: &mut SceneDescriptor) -> Result<PathBuf, SceneError> {
    let io = |path: &Path| {
        let path = path.to_path_buf();
        move |source| SceneError::Io { path, source }
    };
    fs::create_dir_all(dir).map_err(io(dir))?;

    let mut file = SceneFile {
        scene_id: scene.scene_id.clone(),
        width: scene.width,
        height: scene.height,
        reward_map: None,
        obstacle_map: None,
        objects: Vec::with_capacity(scene.objects.len()),
    };
    if let Some(reward) = &scene.reward {
        let p = dir.join("reward.pgm");
        raster::write_pgm(&p, reward)?;
        file.reward_map = Some("reward.pgm".into());
        scene.reward_map_ref = Some(p);
    }
    if let Some(obstacles) = &scene.obstacles {
        let p = dir.join("obstacles.pgm");
        raster::write_pgm(&p, obstacles)?;
        file.obstacle_map = Some("obstacles.pgm".into());
        scene.obstacle_map_ref = Some(p);
    }
    for (i, obj) in scene.objects.iter_mut().enumerate() {
        let trajectory = match &obj.trajectory {
            Some(points) => {
                let name = format!("traj_{i:02}.csv");
                let p = dir.join(&name);
                raster::write_trajectory(&p, points)?;
                obj.trajectory_ref = Some(p);
                Some(name)
            }
            None => None,
        };
        file.objects.push(ObjectFile {
            bbox: obj.bbox.as_array(),
            orientation: obj.orientation.map(Angle::radians),
            trajectory,
        });
    }
    let json_path = dir.join("scene.json");
    let mut json = serde_json::to_string_pretty(&file).expect("scene file serializes");
    json.push('\n');
    fs::write(&json_path, json).map_err(io(&json_path))?;
    Ok(json_path)
}
