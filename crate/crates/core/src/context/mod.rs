//! Scene ingestion, context providers, and synthetic scene generation.

pub mod provider;
pub mod raster;
pub mod scene;
pub mod synth;

pub use provider::{
    assemble_reward_map, default_reward_provider, orientation_loss, trajectory_ground_truth_angle,
    AssemblyConfig, Constant, Declared, FileBacked, Fixed, OccupancyOracle, OrientationProvider,
    ProviderError, RewardProvider, TrajectoryAngleError, TrajectoryOracle, Window,
};
pub use raster::{load_obstacle_map, load_scalar_field, load_trajectory, RasterError};
pub use scene::{load_scene, write_scene, ObjectRecord, SceneDescriptor, SceneError};
pub use synth::{generate_suite, generate_synthetic_scene, write_suite, Rect, SynthError, SynthSpec};
