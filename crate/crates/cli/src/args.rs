use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

/// Predict likely future paths of objects in static scenes, evaluate the
/// predictions and generate synthetic benchmark scenes.
#[derive(Debug, Parser)]
#[command(name = "vispath", version)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Predict the top-N paths of one object and write them as JSON.
    Predict(PredictArgs),
    /// Score methods on a directory of annotated scenes.
    Evaluate(EvaluateArgs),
    /// Generate a seeded synthetic dataset.
    Synth(SynthArgs),
    /// Draw a prediction over its scene as SVG or PPM.
    Render(RenderArgs),
}

/// Settings shared by every planning command. Precedence: flag, then
/// config file, then the built-in default.
#[derive(Debug, Clone, Default, Args)]
pub struct PlannerFlags {
    /// Obstacle tolerance of the reward-to-cost sigmoid [default: -10]
    #[arg(long, allow_negative_numbers = true)]
    pub alpha: Option<f64>,
    /// Sigmoid midpoint, in (0, 1) [default: 0.5]
    #[arg(long, allow_negative_numbers = true)]
    pub gamma: Option<f64>,
    /// Weight of the heading penalty, >= 0 [default: 5]
    #[arg(long, allow_negative_numbers = true)]
    pub epsilon: Option<f64>,
    /// Probe distance d in cells [default: bounding-box diagonal]
    #[arg(long)]
    pub probe_distance: Option<u32>,
    /// Reward window side in cells [default: max(d, 8)]
    #[arg(long)]
    pub window: Option<u32>,
    /// Reward window stride in cells [default: window / 2]
    #[arg(long)]
    pub stride: Option<u32>,
    /// Integer pixel-to-cell downsampling factor [default: 1]
    #[arg(long)]
    pub downsample: Option<u32>,
    /// Heading source [default: auto]
    #[arg(long, value_enum)]
    pub orientation: Option<OrientationArg>,
    /// TOML file with default values for any of these settings
    #[arg(long)]
    pub config: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OrientationArg {
    /// Declared orientation, falling back to the trajectory
    Auto,
    /// Orientation field of the scene descriptor
    Declared,
    /// Direction of the first trajectory step
    Trajectory,
}

#[derive(Debug, Args)]
pub struct PredictArgs {
    /// Scene descriptor (JSON)
    #[arg(long)]
    pub scene: PathBuf,
    /// Index of the object in the descriptor
    #[arg(long, default_value_t = 0)]
    pub object: usize,
    /// Number of paths to keep [default: 10]
    #[arg(long)]
    pub top: Option<usize>,
    /// Prediction JSON path [default: standard output]
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Also render the prediction to this file (.svg or .ppm)
    #[arg(long)]
    pub render: Option<PathBuf>,
    #[command(flatten)]
    pub planner: PlannerFlags,
}

#[derive(Debug, Args)]
pub struct EvaluateArgs {
    /// Dataset directory
    #[arg(long)]
    pub dataset: PathBuf,
    /// Comma-separated methods: planner, straightline, uniform [default: all]
    #[arg(long, value_delimiter = ',')]
    pub methods: Option<Vec<String>>,
    /// CSV report path [default: standard output]
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Text table path [default: standard output when --out is set]
    #[arg(long)]
    pub table: Option<PathBuf>,
    #[command(flatten)]
    pub planner: PlannerFlags,
}

#[derive(Debug, Args)]
pub struct SynthArgs {
    /// Base seed [default: 0]
    #[arg(long)]
    pub seed: Option<u64>,
    /// Number of scenes, >= 1 [default: 10]
    #[arg(long)]
    pub count: Option<u32>,
    /// Scene width in pixels [default: 160]
    #[arg(long)]
    pub width: Option<u32>,
    /// Scene height in pixels [default: 90]
    #[arg(long)]
    pub height: Option<u32>,
    /// Agents per scene [default: 3]
    #[arg(long)]
    pub agents: Option<u32>,
    /// Output dataset directory
    #[arg(long)]
    pub out: PathBuf,
    /// TOML file with default values for these settings
    #[arg(long)]
    pub config: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FormatArg {
    Svg,
    Ppm,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum BackgroundArg {
    Cost,
    Reward,
}

#[derive(Debug, Clone, Default, Args)]
pub struct DrawFlags {
    /// Pixels per grid cell [default: 16]
    #[arg(long)]
    pub cell_size: Option<u32>,
    /// Map used for background shading [default: cost]
    #[arg(long, value_enum)]
    pub background: Option<BackgroundArg>,
    /// Omit the background shading
    #[arg(long)]
    pub no_background: bool,
    /// Omit obstacle cells
    #[arg(long)]
    pub no_obstacles: bool,
    /// Omit the ground-truth trajectory
    #[arg(long)]
    pub no_ground_truth: bool,
    /// Omit the heading arrow
    #[arg(long)]
    pub no_arrow: bool,
}

#[derive(Debug, Args)]
pub struct RenderArgs {
    /// Scene descriptor the prediction was made on
    #[arg(long)]
    pub scene: PathBuf,
    /// Prediction JSON written by `predict`
    #[arg(long)]
    pub prediction: PathBuf,
    /// Output image
    #[arg(long)]
    pub out: PathBuf,
    /// Image format [default: from the extension of --out, else svg]
    #[arg(long, value_enum)]
    pub format: Option<FormatArg>,
    /// TOML file with default values for these settings
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[command(flatten)]
    pub draw: DrawFlags,
}
