//! Path prediction in static scenes.
//!
//! A reward map (how well an object fits each part of the scene) is turned
//! into a cost map, a grid graph is built whose edges also penalize leaving
//! the start against the object's facing heading, and Dijkstra's algorithm
//! yields the cheapest path to every border cell. The sorted set of those
//! paths is the prediction.
//!
//! - [`geom`]: positions, angles, bounding boxes, paths.
//! - [`field`]: dense scalar grids.
//! - [`context`]: scenes, reward/orientation providers, synthetic scenes.
//! - [`planner`]: cost conversion, graph construction, shortest paths.
//! - [`eval`]: path distances and the dataset evaluation harness.

pub mod context;
pub mod eval;
pub mod field;
pub mod geom;
pub mod planner;

pub use field::ScalarField;
pub use geom::{angular_difference, diagonal_distance, direction_between, Angle, BoundingBox, PathSeq, Position};
