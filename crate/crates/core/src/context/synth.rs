//! Seeded synthetic scenes for benchmarking.
//!
//! A scene is a free grid with axis-aligned rectangles and random-walk blobs
//! stamped in as obstacles. Each agent gets a small bounding box, a random
//! preferred heading, and an exit goal: the border cell reachable in the
//! fewest steps among those within 45° of the heading. The agent then walks
//! a shortest obstacle-free route to that goal, choosing between equally
//! short steps with seeded noise. The oracle reward map is `1 - occupancy`.

use std::collections::VecDeque;
use std::f64::consts::{PI, TAU};
use std::path::{Path, PathBuf};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use super::scene::{write_scene, ObjectRecord, SceneDescriptor, SceneError};
use crate::field::ScalarField;
use crate::geom::{angular_difference, direction_between, diagonal_distance, Angle, BoundingBox, Position};

#[derive(Debug, Error)]
pub enum SynthError {
    #[error("invalid synthetic spec: {0}")]
    InvalidSpec(String),
    #[error("could not place agent {agent} after {attempts} attempts")]
    Unsatisfiable { agent: u32, attempts: u32 },
    #[error(transparent)]
    Write(#[from] SceneError),
}

/// An axis-aligned obstacle rectangle in cells: `[x, x + w) x [y, y + h)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Rect {
    pub x: u32,
    pub y: u32,
    pub w: u32,
    pub h: u32,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SynthSpec {
    pub width: u32,
    pub height: u32,
    /// Obstacles stamped before the random ones.
    pub fixed_obstacles: Vec<Rect>,
    pub rectangles: u32,
    /// Inclusive side-length range of random rectangles.
    pub rect_side: (u32, u32),
    pub blobs: u32,
    /// Inclusive cell-count range of random blobs.
    pub blob_cells: (u32, u32),
    pub agents: u32,
    /// Inclusive side-length range of agent bounding boxes, in pixels.
    pub box_side: (u32, u32),
    /// Half-angle, in radians, of the cone around the sampled heading in
    /// which the walker picks its exit. `PI` lets it take any exit.
    pub goal_cone: f64,
    /// Probability that the walker takes a random shortest-route step
    /// instead of the one best aligned with its goal.
    pub step_noise: f64,
    pub max_attempts: u32,
}

impl Default for SynthSpec {
    fn default() -> Self {
        Self {
            width: 160,
            height: 90,
            fixed_obstacles: Vec::new(),
            rectangles: 30,
            rect_side: (6, 20),
            blobs: 10,
            blob_cells: (40, 120),
            agents: 3,
            box_side: (2, 4),
            goal_cone: PI,
            step_noise: 0.2,
            max_attempts: 200,
        }
    }
}

impl SynthSpec {
    fn validate(&self) -> Result<(), SynthError> {
        let bad = |m: &str| Err(SynthError::InvalidSpec(m.into()));
        if self.width < 3 || self.height < 3 {
            return bad("grid must be at least 3x3");
        }
        if self.rect_side.0 == 0 || self.rect_side.0 > self.rect_side.1 {
            return bad("rect_side must be a non-empty range of positive sides");
        }
        if self.blob_cells.0 == 0 || self.blob_cells.0 > self.blob_cells.1 {
            return bad("blob_cells must be a non-empty range of positive sizes");
        }
        if self.box_side.0 == 0 || self.box_side.0 > self.box_side.1 {
            return bad("box_side must be a non-empty range of positive sides");
        }
        if !(0.0..=PI).contains(&self.goal_cone) {
            return bad("goal_cone must lie in [0, pi]");
        }
        if !(0.0..=1.0).contains(&self.step_noise) {
            return bad("step_noise must lie in [0, 1]");
        }
        if self.max_attempts == 0 {
            return bad("max_attempts must be positive");
        }
        Ok(())
    }
}

const NEIGHBORS: [(i32, i32); 8] = [(-1, -1), (0, -1), (1, -1), (-1, 0), (1, 0), (-1, 1), (0, 1), (1, 1)];

struct Grid {
    width: i32,
    height: i32,
    blocked: Vec<bool>,
}

impl Grid {
    fn idx(&self, p: Position) -> Option<usize> {
        (p.x >= 0 && p.y >= 0 && p.x < self.width && p.y < self.height)
            .then(|| (p.y * self.width + p.x) as usize)
    }

    fn free(&self, p: Position) -> bool {
        self.idx(p).is_some_and(|i| !self.blocked[i])
    }

    fn block(&mut self, p: Position) {
        if let Some(i) = self.idx(p) {
            self.blocked[i] = true;
        }
    }

    fn is_border(&self, p: Position) -> bool {
        p.x == 0 || p.y == 0 || p.x == self.width - 1 || p.y == self.height - 1
    }

    /// 8-connected step counts from `from` over free cells (`u32::MAX` = unreachable).
    fn step_distances(&self, from: Position) -> Vec<u32> {
        let mut dist = vec![u32::MAX; self.blocked.len()];
        let mut queue = VecDeque::new();
        if let Some(i) = self.idx(from).filter(|&i| !self.blocked[i]) {
            dist[i] = 0;
            queue.push_back(from);
        }
        while let Some(p) = queue.pop_front() {
            let next = dist[self.idx(p).unwrap()] + 1;
            for (dx, dy) in NEIGHBORS {
                let q = Position::new(p.x + dx, p.y + dy);
                if let Some(j) = self.idx(q) {
                    if !self.blocked[j] && dist[j] == u32::MAX {
                        dist[j] = next;
                        queue.push_back(q);
                    }
                }
            }
        }
        dist
    }

    fn position(&self, i: usize) -> Position {
        Position::new(i as i32 % self.width, i as i32 / self.width)
    }
}

fn stamp_rect(grid: &mut Grid, r: Rect) {
    for y in r.y..r.y.saturating_add(r.h) {
        for x in r.x..r.x.saturating_add(r.w) {
            grid.block(Position::new(x as i32, y as i32));
        }
    }
}

fn stamp_blob(grid: &mut Grid, rng: &mut ChaCha8Rng, cells: u32) {
    let mut blob = vec![Position::new(rng.gen_range(0..grid.width), rng.gen_range(0..grid.height))];
    grid.block(blob[0]);
    let mut guard = 0;
    while (blob.len() as u32) < cells && guard < cells * 20 {
        guard += 1;
        let base = blob[rng.gen_range(0..blob.len())];
        let (dx, dy) = [(1, 0), (-1, 0), (0, 1), (0, -1)][rng.gen_range(0..4)];
        let q = Position::new(base.x + dx, base.y + dy);
        if grid.idx(q).is_some() && !blob.contains(&q) {
            grid.block(q);
            blob.push(q);
        }
    }
}

struct Agent {
    bbox: BoundingBox,
    trajectory: Vec<Position>,
}

fn place_agent(grid: &Grid, spec: &SynthSpec, rng: &mut ChaCha8Rng) -> Option<Agent> {
    let bw = rng.gen_range(spec.box_side.0..=spec.box_side.1) as i32;
    let bh = rng.gen_range(spec.box_side.0..=spec.box_side.1) as i32;
    let heading = Angle::new(rng.gen_range(0.0..TAU));
    let bbox_at = |s: Position| BoundingBox::new(i64::from(s.x - bw / 2), i64::from(s.y - bh / 2), bw.into(), bh.into());
    let d = diagonal_distance(&bbox_at(Position::new(0, 0)).ok()?, 1).ok()? as i32;
    let margin = 2 * d + 2;
    if grid.width - 1 - margin < margin || grid.height - 1 - margin < margin {
        return None;
    }
    let start = Position::new(
        rng.gen_range(margin..=grid.width - 1 - margin),
        rng.gen_range(margin..=grid.height - 1 - margin),
    );
    if !grid.free(start) {
        return None;
    }

    let from_start = grid.step_distances(start);
    let goal = (0..grid.blocked.len())
        .filter(|&i| from_start[i] != u32::MAX)
        .map(|i| grid.position(i))
        .filter(|&p| grid.is_border(p))
        .filter(|&p| p.euclidean(start) >= f64::from(2 * d))
        .filter(|&p| angular_difference(direction_between(start, p).unwrap(), heading) <= spec.goal_cone)
        .min_by_key(|&p| (from_start[grid.idx(p).unwrap()], p.y, p.x))?;

    let to_goal = grid.step_distances(goal);
    let mut trajectory = vec![start];
    let mut cur = start;
    while cur != goal {
        let remaining = to_goal[grid.idx(cur).unwrap()];
        let toward = direction_between(cur, goal).unwrap();
        let steps: Vec<Position> = NEIGHBORS
            .iter()
            .map(|&(dx, dy)| Position::new(cur.x + dx, cur.y + dy))
            .filter(|&q| grid.idx(q).is_some_and(|j| to_goal[j] == remaining - 1))
            .collect();
        let next = if steps.len() > 1 && rng.gen_bool(spec.step_noise) {
            steps[rng.gen_range(0..steps.len())]
        } else {
            *steps
                .iter()
                .min_by(|a, b| {
                    let da = angular_difference(direction_between(cur, **a).unwrap(), toward);
                    let db = angular_difference(direction_between(cur, **b).unwrap(), toward);
                    da.total_cmp(&db)
                })
                .expect("a shortest route always has a next step")
        };
        trajectory.push(next);
        cur = next;
    }
    Some(Agent { bbox: bbox_at(start).ok()?, trajectory })
}

/// Generates one scene. Identical `(seed, spec)` pairs give identical scenes.
pub fn generate_synthetic_scene(seed: u64, spec: &SynthSpec) -> Result<SceneDescriptor, SynthError> {
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (w, h) = (spec.width as i32, spec.height as i32);
    let mut grid = Grid { width: w, height: h, blocked: vec![false; (w * h) as usize] };

    for &r in &spec.fixed_obstacles {
        stamp_rect(&mut grid, r);
    }
    for _ in 0..spec.rectangles {
        let rw = rng.gen_range(spec.rect_side.0..=spec.rect_side.1);
        let rh = rng.gen_range(spec.rect_side.0..=spec.rect_side.1);
        let x = rng.gen_range(0..spec.width);
        let y = rng.gen_range(0..spec.height);
        stamp_rect(&mut grid, Rect { x, y, w: rw, h: rh });
    }
    for _ in 0..spec.blobs {
        let cells = rng.gen_range(spec.blob_cells.0..=spec.blob_cells.1);
        stamp_blob(&mut grid, &mut rng, cells);
    }

    let mut objects = Vec::with_capacity(spec.agents as usize);
    for agent in 0..spec.agents {
        let placed = (0..spec.max_attempts).find_map(|_| place_agent(&grid, spec, &mut rng));
        let Agent { bbox, trajectory } = placed.ok_or(SynthError::Unsatisfiable {
            agent,
            attempts: spec.max_attempts,
        })?;
        let mut obj = ObjectRecord::new(bbox);
        obj.trajectory = Some(trajectory);
        objects.push(obj);
    }

    let (wu, hu) = (spec.width as usize, spec.height as usize);
    let occupancy = grid.blocked.iter().map(|&b| if b { 1.0 } else { 0.0 }).collect();
    let obstacles = ScalarField::new(wu, hu, occupancy).expect("dimensions match");
    let reward = obstacles.map(|o| 1.0 - o);
    Ok(SceneDescriptor {
        scene_id: format!("synth_{seed}"),
        width: spec.width,
        height: spec.height,
        reward_map_ref: None,
        obstacle_map_ref: None,
        reward: Some(reward),
        obstacles: Some(obstacles),
        objects,
    })
}

/// Per-scene seed for scene `index` of a suite.
pub fn suite_scene_seed(seed: u64, index: u32) -> u64 {
    // splitmix64 finalizer over the combined input
    let mut z = seed
        .wrapping_mul(0x9E37_79B9_7F4A_7C15)
        .wrapping_add(u64::from(index).wrapping_add(1).wrapping_mul(0xBF58_476D_1CE4_E5B9));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Generates `count` scenes named `scene_0000`, `scene_0001`, ...
pub fn generate_suite(seed: u64, count: u32, spec: &SynthSpec) -> Result<Vec<SceneDescriptor>, SynthError> {
    (0..count)
        .map(|i| {
            let mut scene = generate_synthetic_scene(suite_scene_seed(seed, i), spec)?;
            scene.scene_id = format!("scene_{i:04}");
            Ok(scene)
        })
        .collect()
}

/// Writes each scene into `<dir>/<scene_id>/` and returns the descriptor paths.
pub fn write_suite(dir: &Path, scenes: &mut [SceneDescriptor]) -> Result<Vec<PathBuf>, SynthError> {
    scenes
        .iter_mut()
        .map(|scene| {
            let sub = dir.join(&scene.scene_id);
            Ok(write_scene(&sub, scene)?)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small_spec() -> SynthSpec {
        SynthSpec { width: 60, height: 40, rectangles: 4, blobs: 2, agents: 3, ..SynthSpec::default() }
    }

    fn assert_obstacle_free(scene: &SceneDescriptor) {
        let obstacles = scene.obstacles.as_ref().unwrap();
        for obj in &scene.objects {
            let traj = obj.trajectory.as_ref().unwrap();
            assert!(traj.len() >= 2);
            for p in traj {
                assert_eq!(obstacles.at(*p), 0.0, "trajectory enters obstacle at {p}");
            }
            assert!(traj.windows(2).all(|w| w[0].is_adjacent(w[1])));
        }
    }

    #[test]
    fn deterministic_for_fixed_seed() {
        let a = generate_synthetic_scene(7, &small_spec()).unwrap();
        let b = generate_synthetic_scene(7, &small_spec()).unwrap();
        assert_eq!(a, b);
        let c = generate_synthetic_scene(8, &small_spec()).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn trajectories_avoid_obstacles_and_start_at_box_center() {
        for seed in 0..20 {
            let scene = generate_synthetic_scene(seed, &small_spec()).unwrap();
            assert_obstacle_free(&scene);
            for obj in &scene.objects {
                let traj = obj.trajectory.as_ref().unwrap();
                assert_eq!(obj.start_cell(1).unwrap(), traj[0]);
                assert!(obj.bbox.fits_within(scene.width, scene.height));
                let border = |p: Position| {
                    p.x == 0 || p.y == 0 || p.x == scene.width as i32 - 1 || p.y == scene.height as i32 - 1
                };
                assert!(border(*traj.last().unwrap()));
                let d = obj.probe_distance(1).unwrap();
                assert!(traj[0].euclidean(*traj.last().unwrap()) >= f64::from(2 * d));
            }
        }
    }

    #[test]
    fn zero_obstacles_give_full_reward_along_trajectories() {
        let spec = SynthSpec { rectangles: 0, blobs: 0, ..small_spec() };
        let scene = generate_synthetic_scene(3, &spec).unwrap();
        let reward = scene.reward.as_ref().unwrap();
        for obj in &scene.objects {
            for p in obj.trajectory.as_ref().unwrap() {
                assert_eq!(reward.at(*p), 1.0);
            }
        }
    }

    #[test]
    fn wall_with_single_gap_is_crossed_through_the_gap() {
        let (gap_x, gap_y) = (30u32, 17u32);
        let spec = SynthSpec {
            fixed_obstacles: vec![
                Rect { x: gap_x, y: 0, w: 1, h: gap_y },
                Rect { x: gap_x, y: gap_y + 1, w: 1, h: 40 },
            ],
            rectangles: 0,
            blobs: 0,
            agents: 4,
            ..small_spec()
        };
        let mut crossings = 0;
        for seed in 0..30 {
            let scene = generate_synthetic_scene(seed, &spec).unwrap();
            assert_obstacle_free(&scene);
            for obj in &scene.objects {
                let traj = obj.trajectory.as_ref().unwrap();
                let side = |p: &Position| p.x.cmp(&(gap_x as i32));
                if side(&traj[0]) != side(traj.last().unwrap()) {
                    crossings += 1;
                    assert!(traj.contains(&Position::new(gap_x as i32, gap_y as i32)));
                }
                for p in traj.iter().filter(|p| p.x == gap_x as i32) {
                    assert_eq!(p.y, gap_y as i32);
                }
            }
        }
        assert!(crossings > 0, "no generated trajectory crossed the wall");
    }

    #[test]
    fn unsatisfiable_spec_reports_error() {
        let spec = SynthSpec {
            fixed_obstacles: vec![Rect { x: 0, y: 0, w: 60, h: 40 }],
            max_attempts: 10,
            ..small_spec()
        };
        assert!(matches!(
            generate_synthetic_scene(1, &spec),
            Err(SynthError::Unsatisfiable { agent: 0, attempts: 10 })
        ));
        let bad = SynthSpec { box_side: (3, 2), ..small_spec() };
        assert!(matches!(generate_synthetic_scene(1, &bad), Err(SynthError::InvalidSpec(_))));
    }

    #[test]
    fn suite_written_and_reloaded() {
        let dir = tempfile::tempdir().unwrap();
        let mut scenes = generate_suite(11, 2, &small_spec()).unwrap();
        let paths = write_suite(dir.path(), &mut scenes).unwrap();
        assert_eq!(paths.len(), 2);
        assert!(paths[1].ends_with("scene_0001/scene.json"));
        let loaded = crate::context::load_scene(&paths[0]).unwrap();
        assert_eq!(loaded, scenes[0]);
    }
}
