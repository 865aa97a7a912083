//! Provider capabilities standing in for learned context models, and
//! reward-map assembly over an overlapped sliding window.
//!
//! A [`RewardProvider`] scores how well an object fits the scene patch under
//! a window; an [`OrientationProvider`] estimates the object's facing
//! heading. Trained models plug in behind the same traits. The built-in
//! variants are file-backed maps and oracles derived from scene annotations.

use rayon::prelude::*;
use thiserror::Error;

use super::scene::{ObjectRecord, SceneDescriptor};
use crate::field::{FieldError, ScalarField};
use crate::geom::{angular_difference, direction_between, Angle, Position};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ProviderError {
    #[error("provider failed at window center {center}: {reason}")]
    Score { center: Position, reason: String },
    #[error("window must be >= 1 and stride in 1..=window, got window {window}, stride {stride}")]
    InvalidWindow { window: u32, stride: u32 },
    #[error("object has no declared orientation")]
    NoDeclaredOrientation,
    #[error("object has no ground-truth trajectory")]
    NoTrajectory,
    #[error(transparent)]
    Trajectory(#[from] TrajectoryAngleError),
    #[error(transparent)]
    Field(#[from] FieldError),
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum TrajectoryAngleError {
    #[error("index {index} out of range for a trajectory of {len} points")]
    IndexOutOfRange { index: usize, len: usize },
    #[error("all points from index {index} on coincide; direction undefined")]
    Stationary { index: usize },
}

/// A square patch of `size` cells centered on `center`. Even sizes extend one
/// cell further right and down.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Window {
    pub center: Position,
    pub size: u32,
}

impl Window {
    /// Clipped half-open column and row ranges of the patch on a grid.
    pub fn clipped(&self, width: usize, height: usize) -> (std::ops::Range<usize>, std::ops::Range<usize>) {
        let half = (self.size / 2) as i64;
        let clip = |c: i32, n: usize| {
            let lo = (i64::from(c) - half).clamp(0, n as i64) as usize;
            let hi = (i64::from(c) - half + i64::from(self.size)).clamp(0, n as i64) as usize;
            lo..hi
        };
        (clip(self.center.x, width), clip(self.center.y, height))
    }
}

pub trait RewardProvider: Send + Sync {
    /// Likelihood in `[0, 1]` that `object` can occupy the patch under `window`.
    fn score(&self, object: &ObjectRecord, window: &Window) -> Result<f64, ProviderError>;
}

pub trait OrientationProvider: Send + Sync {
    fn estimate(&self, object: &ObjectRecord) -> Result<Angle, ProviderError>;
}

fn window_mean(field: &ScalarField, window: &Window) -> Result<f64, ProviderError> {
    let (xs, ys) = window.clipped(field.width(), field.height());
    let count = xs.len() * ys.len();
    if count == 0 {
        return Err(ProviderError::Score {
            center: window.center,
            reason: "window does not overlap the grid".into(),
        });
    }
    let width = field.width();
    let sum: f64 = ys
        .flat_map(|y| field.values()[y * width + xs.start..y * width + xs.end].iter())
        .sum();
    Ok(sum / count as f64)
}

/// Precomputed reward map on the planning grid; a window scores the mean of
/// the map under it, so a 1-cell window is an exact lookup.
#[derive(Debug, Clone)]
pub struct FileBacked {
    map: ScalarField,
}

impl FileBacked {
    pub fn new(map: ScalarField) -> Result<Self, FieldError> {
        map.check_unit_range()?;
        Ok(Self { map })
    }
}

impl RewardProvider for FileBacked {
    fn score(&self, _object: &ObjectRecord, window: &Window) -> Result<f64, ProviderError> {
        window_mean(&self.map, window)
    }
}

/// Scores a window as one minus the obstacle fraction under it.
#[derive(Debug, Clone)]
pub struct OccupancyOracle {
    occupancy: ScalarField,
}

impl OccupancyOracle {
    pub fn new(occupancy: ScalarField) -> Result<Self, FieldError> {
        occupancy.check_unit_range()?;
        Ok(Self { occupancy })
    }
}

impl RewardProvider for OccupancyOracle {
    fn score(&self, _object: &ObjectRecord, window: &Window) -> Result<f64, ProviderError> {
        window_mean(&self.occupancy, window).map(|occupied| 1.0 - occupied)
    }
}

#[derive(Debug, Clone, Copy)]
pub struct Constant(f64);

impl Constant {
    pub fn new(value: f64) -> Option<Self> {
        (0.0..=1.0).contains(&value).then_some(Self(value))
    }
}

impl RewardProvider for Constant {
    fn score(&self, _object: &ObjectRecord, _window: &Window) -> Result<f64, ProviderError> {
        Ok(self.0)
    }
}

/// Uses the orientation annotated on the object.
#[derive(Debug, Clone, Copy, Default)]
pub struct Declared;

impl OrientationProvider for Declared {
    fn estimate(&self, object: &ObjectRecord) -> Result<Angle, ProviderError> {
        object.orientation.ok_or(ProviderError::NoDeclaredOrientation)
    }
}

/// Heading between the first two distinct ground-truth points.
#[derive(Debug, Clone, Copy, Default)]
pub struct TrajectoryOracle;

impl OrientationProvider for TrajectoryOracle {
    fn estimate(&self, object: &ObjectRecord) -> Result<Angle, ProviderError> {
        let traj = object.trajectory.as_deref().ok_or(ProviderError::NoTrajectory)?;
        Ok(trajectory_ground_truth_angle(traj, 0)?)
    }
}

#[derive(Debug, Clone, Copy)]
pub struct Fixed(pub Angle);

impl OrientationProvider for Fixed {
    fn estimate(&self, _object: &ObjectRecord) -> Result<Angle, ProviderError> {
        Ok(self.0)
    }
}

/// File-backed provider when the scene carries a reward map, otherwise the
/// occupancy oracle over its obstacle map.
pub fn default_reward_provider(
    scene: &SceneDescriptor,
    downsample: u32,
) -> Option<Result<Box<dyn RewardProvider>, FieldError>> {
    if let Some(map) = scene.reward_field(downsample) {
        return Some(FileBacked::new(map).map(|p| Box::new(p) as Box<dyn RewardProvider>));
    }
    scene
        .occupancy_field(downsample)
        .map(|occ| OccupancyOracle::new(occ).map(|p| Box::new(p) as Box<dyn RewardProvider>))
}

/// Sliding-window settings. Unset values fall back to
/// `window = max(d, 8)` and `stride = window / 2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AssemblyConfig {
    pub window: Option<u32>,
    pub stride: Option<u32>,
    pub downsample: u32,
}

impl Default for AssemblyConfig {
    fn default() -> Self {
        Self { window: None, stride: None, downsample: 1 }
    }
}

impl AssemblyConfig {
    /// Exact per-cell evaluation (1-cell window, stride 1).
    pub fn dense(downsample: u32) -> Self {
        Self { window: Some(1), stride: Some(1), downsample }
    }

    pub fn resolve(&self, probe_distance: u32) -> (u32, u32) {
        let window = self.window.unwrap_or_else(|| probe_distance.max(8));
        let stride = self.stride.unwrap_or_else(|| (window / 2).max(1));
        (window, stride)
    }
}

/// Window center coordinates along one axis: every `stride` cells from 0,
/// always including the last cell.
fn axis_centers(len: usize, stride: usize) -> Vec<usize> {
    let mut centers: Vec<usize> = (0..len).step_by(stride).collect();
    if centers.last() != Some(&(len - 1)) {
        centers.push(len - 1);
    }
    centers
}

/// For each coordinate, the index of its nearest center (ties to the smaller).
fn nearest_center_index(len: usize, centers: &[usize]) -> Vec<usize> {
    let mut out = Vec::with_capacity(len);
    let mut k = 0;
    for x in 0..len {
        while k + 1 < centers.len() && centers[k + 1].abs_diff(x) < centers[k].abs_diff(x) {
            k += 1;
        }
        out.push(k);
    }
    out
}

/// Builds the reward map on the planning grid by scoring windows at a
/// lattice of centers, then giving every cell the score of its nearest
/// center. Windows are scored in parallel; the result matches a sequential
/// evaluation exactly.
pub fn assemble_reward_map(
    scene: &SceneDescriptor,
    object: &ObjectRecord,
    provider: &dyn RewardProvider,
    window: u32,
    stride: u32,
    downsample: u32,
) -> Result<ScalarField, ProviderError> {
    if window == 0 || stride == 0 || stride > window {
        return Err(ProviderError::InvalidWindow { window, stride });
    }
    let (width, height) = scene.grid_dims(downsample);
    let xs = axis_centers(width, stride as usize);
    let ys = axis_centers(height, stride as usize);

    let centers: Vec<Position> = ys
        .iter()
        .flat_map(|&y| xs.iter().map(move |&x| Position::new(x as i32, y as i32)))
        .collect();
    let scores: Vec<f64> = centers
        .par_iter()
        .map(|&center| {
            let score = provider.score(object, &Window { center, size: window })?;
            if !(0.0..=1.0).contains(&score) {
                return Err(ProviderError::Score {
                    center,
                    reason: format!("score {score} outside [0, 1]"),
                });
            }
            Ok(score)
        })
        .collect::<Result<_, _>>()?;

    let near_x = nearest_center_index(width, &xs);
    let near_y = nearest_center_index(height, &ys);
    let values = near_y
        .iter()
        .flat_map(|&iy| near_x.iter().map(move |&ix| (iy, ix)))
        .map(|(iy, ix)| scores[iy * xs.len() + ix])
        .collect();
    Ok(ScalarField::new(width, height, values)?)
}

/// Ground-truth heading at `index`: direction to the next point that
/// differs from `trajectory[index]`.
pub fn trajectory_ground_truth_angle(
    trajectory: &[Position],
    index: usize,
) -> Result<Angle, TrajectoryAngleError> {
    if index + 1 >= trajectory.len() {
        return Err(TrajectoryAngleError::IndexOutOfRange { index, len: trajectory.len() });
    }
    let from = trajectory[index];
    let to = trajectory[index + 1..]
        .iter()
        .find(|&&p| p != from)
        .ok_or(TrajectoryAngleError::Stationary { index })?;
    Ok(direction_between(from, *to).expect("points are distinct"))
}

/// Squared angular difference between ground-truth and estimated headings.
pub fn orientation_loss(gt: Angle, est: Angle) -> f64 {
    angular_difference(gt, est).powi(2)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::BoundingBox;
    use std::f64::consts::PI;

    fn scene(width: u32, height: u32, obstacles: ScalarField) -> SceneDescriptor {
        SceneDescriptor {
            scene_id: "t".into(),
            width,
            height,
            reward_map_ref: None,
            obstacle_map_ref: None,
            reward: None,
            obstacles: Some(obstacles),
            objects: vec![],
        }
    }

    fn object() -> ObjectRecord {
        ObjectRecord::new(BoundingBox::new(1, 1, 2, 2).unwrap())
    }

    #[test]
    fn oracle_all_free_and_all_blocked() {
        for (occ, expected) in [(0.0, 1.0), (1.0, 0.0)] {
            let field = ScalarField::filled(12, 7, occ).unwrap();
            let s = scene(12, 7, field.clone());
            let oracle = OccupancyOracle::new(field).unwrap();
            let map = assemble_reward_map(&s, &object(), &oracle, 4, 2, 1).unwrap();
            assert_eq!(map.dims(), (12, 7));
            assert!(map.values().iter().all(|&v| v == expected));
        }
    }

    #[test]
    fn half_obstacle_window_scores_half() {
        // Left half of an 8x8 grid blocked; a 4-cell window at (4, 4) covers
        // columns 2..6, half of them blocked.
        let occ = ScalarField::from_fn(8, 8, |p| if p.x < 4 { 1.0 } else { 0.0 }).unwrap();
        let s = scene(8, 8, occ.clone());
        let oracle = OccupancyOracle::new(occ).unwrap();
        let w = Window { center: Position::new(4, 4), size: 4 };
        assert_eq!(oracle.score(&object(), &w).unwrap(), 0.5);
        let map = assemble_reward_map(&s, &object(), &oracle, 4, 4, 1).unwrap();
        assert_eq!(map.at(Position::new(4, 4)), 0.5);
    }

    #[test]
    fn window_clipping() {
        let w = Window { center: Position::new(0, 5), size: 3 };
        assert_eq!(w.clipped(10, 6), (0..2, 4..6));
        let even = Window { center: Position::new(5, 5), size: 4 };
        assert_eq!(even.clipped(10, 10), (3..7, 3..7));
    }

    #[test]
    fn nearest_center_fill_ties_go_to_smaller_center() {
        assert_eq!(axis_centers(7, 2), vec![0, 2, 4, 6]);
        assert_eq!(axis_centers(6, 4), vec![0, 4, 5]);
        assert_eq!(nearest_center_index(7, &[0, 2, 4, 6]), vec![0, 0, 1, 1, 2, 2, 3]);
        assert_eq!(nearest_center_index(6, &[0, 4, 5]), vec![0, 0, 0, 1, 1, 2]);
    }

    #[test]
    fn file_backed_dense_reproduces_field() {
        let map = ScalarField::from_fn(9, 5, |p| f64::from(p.x * p.y) / 32.0).unwrap();
        let s = scene(9, 5, ScalarField::filled(9, 5, 0.0).unwrap());
        let provider = FileBacked::new(map.clone()).unwrap();
        assert_eq!(assemble_reward_map(&s, &object(), &provider, 1, 1, 1).unwrap(), map);
    }

    #[test]
    fn invalid_window_and_bad_scores_rejected() {
        let s = scene(4, 4, ScalarField::filled(4, 4, 0.0).unwrap());
        let c = Constant::new(0.3).unwrap();
        for (w, st) in [(0, 1), (2, 0), (2, 3)] {
            assert!(matches!(
                assemble_reward_map(&s, &object(), &c, w, st, 1),
                Err(ProviderError::InvalidWindow { .. })
            ));
        }
        assert!(Constant::new(1.2).is_none());

        struct Broken;
        impl RewardProvider for Broken {
            fn score(&self, _: &ObjectRecord, w: &Window) -> Result<f64, ProviderError> {
                Ok(if w.center == Position::new(2, 2) { 2.0 } else { 0.5 })
            }
        }
        let err = assemble_reward_map(&s, &object(), &Broken, 2, 1, 1).unwrap_err();
        assert!(matches!(err, ProviderError::Score { center, .. } if center == Position::new(2, 2)));
    }

    #[test]
    fn ground_truth_angle_examples() {
        let p = Position::new;
        assert_eq!(trajectory_ground_truth_angle(&[p(0, 0), p(1, 0)], 0).unwrap().radians(), 0.0);
        let dup = trajectory_ground_truth_angle(&[p(0, 0), p(0, 0), p(0, 2)], 0).unwrap();
        assert!((dup.radians() - PI / 2.0).abs() < 1e-12);
        let diag = trajectory_ground_truth_angle(&[p(5, 5), p(4, 4)], 0).unwrap();
        assert!((diag.radians() + 3.0 * PI / 4.0).abs() < 1e-12);
        assert_eq!(
            trajectory_ground_truth_angle(&[p(1, 1), p(1, 1)], 0),
            Err(TrajectoryAngleError::Stationary { index: 0 })
        );
        assert!(trajectory_ground_truth_angle(&[p(1, 1), p(2, 1)], 1).is_err());
    }

    #[test]
    fn orientation_loss_examples() {
        assert_eq!(orientation_loss(Angle::new(PI / 2.0), Angle::new(PI / 2.0)), 0.0);
        assert!((orientation_loss(Angle::new(0.0), Angle::new(PI)) - 9.8696).abs() < 1e-4);
        let wrap = orientation_loss(Angle::new(3.0 * PI / 4.0), Angle::new(-3.0 * PI / 4.0));
        assert!((wrap - 2.4674).abs() < 1e-4);
    }

    #[test]
    fn orientation_providers() {
        let mut obj = object();
        assert_eq!(Declared.estimate(&obj), Err(ProviderError::NoDeclaredOrientation));
        assert_eq!(TrajectoryOracle.estimate(&obj), Err(ProviderError::NoTrajectory));
        obj.orientation = Some(Angle::new(1.0));
        obj.trajectory = Some(vec![Position::new(2, 2), Position::new(2, 1)]);
        assert_eq!(Declared.estimate(&obj).unwrap().radians(), 1.0);
        assert!((TrajectoryOracle.estimate(&obj).unwrap().radians() + PI / 2.0).abs() < 1e-12);
        assert_eq!(Fixed(Angle::new(4.0)).estimate(&obj).unwrap(), Angle::new(4.0));
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn assembled_values_in_unit_range(
                seed_vals in proptest::collection::vec(0.0f64..=1.0, 48),
                window in 1u32..7,
                stride_frac in 0.0f64..1.0,
            ) {
                let stride = 1 + ((window - 1) as f64 * stride_frac) as u32;
                let occ = ScalarField::new(8, 6, seed_vals).unwrap();
                let s = scene(8, 6, occ.clone());
                let oracle = OccupancyOracle::new(occ.clone()).unwrap();
                let map = assemble_reward_map(&s, &object(), &oracle, window, stride, 1).unwrap();
                prop_assert!(map.values().iter().all(|v| (0.0..=1.0).contains(v)));
                let again = assemble_reward_map(&s, &object(), &oracle, window, stride, 1).unwrap();
                prop_assert_eq!(map, again);
            }

            #[test]
            fn loss_is_symmetric_square_of_difference(a in -4.0f64..4.0, b in -4.0f64..4.0) {
                let (a, b) = (Angle::new(a), Angle::new(b));
                prop_assert_eq!(orientation_loss(a, b), orientation_loss(b, a));
                prop_assert_eq!(orientation_loss(a, b), angular_difference(a, b).powi(2));
            }
        }
    }
}
