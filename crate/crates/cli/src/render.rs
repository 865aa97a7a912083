//! Static figures of a prediction: background shading, obstacles, ground
//! truth, the top-1 path in red, the other paths in black and a heading
//! arrow at the start cell.

use std::fmt::Write;

use vispath_core::context::{assemble_reward_map, default_reward_provider, SceneDescriptor};
use vispath_core::field::ScalarField;
use vispath_core::planner::{to_cost_map, PlannerConfig};
use vispath_core::Position;

use crate::config::DrawSettings;
use crate::error::{input, CliError};
use crate::prediction::{object_at, PredictionFile};

const TOP1: [u8; 3] = [0xd6, 0x27, 0x28];
const OTHER: [u8; 3] = [0x00, 0x00, 0x00];
const TRUTH: [u8; 3] = [0x2c, 0xa0, 0x2c];
const ARROW: [u8; 3] = [0x1f, 0x77, 0xb4];
const OBSTACLE: [u8; 3] = [0x30, 0x30, 0x30];
const PLAIN: [u8; 3] = [0xff, 0xff, 0xff];

/// Everything a figure shows, in grid cells.
#[derive(Debug, Clone)]
pub struct Scenery {
    pub width: usize,
    pub height: usize,
    /// Lightness per cell in `[0, 1]`, 1 being white.
    pub shading: Option<ScalarField>,
    pub obstacles: Vec<Position>,
    pub ground_truth: Option<Vec<Position>>,
    /// Ranked paths, best first.
    pub paths: Vec<Vec<Position>>,
    pub start: Position,
    pub theta: f64,
    pub arrow_cells: f64,
}

pub fn build_scenery(scene: &SceneDescriptor, record: &PredictionFile, draw: &DrawSettings) -> Result<Scenery, CliError> {
    let cfg = &record.config;
    let ds = cfg.downsample;
    if ds == 0 {
        return Err(input("prediction has downsample 0"));
    }
    let (width, height) = scene.grid_dims(ds);
    if [width, height] != record.grid {
        return Err(input(format!(
            "prediction grid {}x{} does not match the scene grid {width}x{height}",
            record.grid[0], record.grid[1]
        )));
    }
    let object = object_at(scene, record.object_index)?;
    let inside = |c: &[i32; 2]| c[0] >= 0 && c[1] >= 0 && (c[0] as usize) < width && (c[1] as usize) < height;
    if !inside(&record.start) || record.paths.iter().any(|p| !p.cells.iter().all(inside)) {
        return Err(input("prediction has cells outside the scene grid"));
    }

    let shading = match draw.background {
        None => None,
        Some(kind) => {
            let provider = default_reward_provider(scene, ds)
                .ok_or_else(|| input(format!("scene '{}' has no reward or obstacle map", scene.scene_id)))?
                .map_err(input)?;
            let reward = assemble_reward_map(scene, object, provider.as_ref(), cfg.window, cfg.stride, ds)
                .map_err(|e| CliError::Planning(format!("reward stage: {e}")))?;
            Some(if kind == "reward" {
                reward
            } else {
                let planner = PlannerConfig { alpha: cfg.alpha, gamma: cfg.gamma, ..PlannerConfig::default() };
                to_cost_map(&reward, &planner).map(|c| 1.0 - c)
            })
        }
    };
    let obstacles = match (draw.obstacles, scene.occupancy_field(ds)) {
        (true, Some(occ)) => (0..occ.values().len())
            .filter(|&i| occ.values()[i] >= 0.5)
            .map(|i| occ.position_of(i))
            .collect(),
        _ => Vec::new(),
    };
    let ground_truth = if draw.ground_truth { object.trajectory_cells(ds) } else { None };
    Ok(Scenery {
        width,
        height,
        shading,
        obstacles,
        ground_truth,
        paths: record
            .paths
            .iter()
            .map(|p| p.cells.iter().map(|c| Position::new(c[0], c[1])).collect())
            .collect(),
        start: Position::new(record.start[0], record.start[1]),
        theta: if draw.arrow { record.theta_esti } else { f64::NAN },
        arrow_cells: f64::from(cfg.d.max(3)),
    })
}

fn gray(lightness: f64) -> [u8; 3] {
    let g = (255.0 * lightness.clamp(0.0, 1.0)).round() as u8;
    [g, g, g]
}

fn hex(c: [u8; 3]) -> String {
    format!("#{:02x}{:02x}{:02x}", c[0], c[1], c[2])
}

/// Fixed notation with six significant digits, trailing zeros removed.
pub fn num(v: f64) -> String {
    if v == 0.0 || !v.is_finite() {
        return "0".into();
    }
    let magnitude = v.abs().log10().floor() as i32;
    let decimals = (5 - magnitude).max(0) as usize;
    let mut s = format!("{v:.decimals$}");
    if s.contains('.') {
        s = s.trim_end_matches('0').trim_end_matches('.').to_string();
    }
    if s == "-0" {
        s = "0".into();
    }
    s
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

fn arrow_segments(s: &Scenery, cell: f64) -> Option<[(f64, f64, f64, f64); 3]> {
    if s.theta.is_nan() {
        return None;
    }
    let (cx, cy) = ((f64::from(s.start.x) + 0.5) * cell, (f64::from(s.start.y) + 0.5) * cell);
    let len = s.arrow_cells * cell;
    let (ex, ey) = (cx + len * s.theta.cos(), cy + len * s.theta.sin());
    let head = 0.8 * cell;
    let wing = |turn: f64| {
        let a = s.theta + std::f64::consts::PI + turn;
        (ex, ey, ex + head * a.cos(), ey + head * a.sin())
    };
    Some([(cx, cy, ex, ey), wing(0.5), wing(-0.5)])
}

pub fn svg(s: &Scenery, draw: &DrawSettings, metadata: &str) -> String {
    let cell = f64::from(draw.cell_size);
    let (w, h) = (s.width as f64 * cell, s.height as f64 * cell);
    let center = |p: Position| ((f64::from(p.x) + 0.5) * cell, (f64::from(p.y) + 0.5) * cell);
    let mut out = String::new();
    out.push_str("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n");
    writeln!(
        out,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{0}\" height=\"{1}\" viewBox=\"0 0 {0} {1}\">",
        num(w),
        num(h)
    )
    .unwrap();
    writeln!(out, "<metadata>{}</metadata>", escape(metadata)).unwrap();
    writeln!(out, "<rect x=\"0\" y=\"0\" width=\"{}\" height=\"{}\" fill=\"{}\"/>", num(w), num(h), hex(PLAIN)).unwrap();

    if let Some(shading) = &s.shading {
        out.push_str("<g id=\"background\" shape-rendering=\"crispEdges\">\n");
        for y in 0..s.height {
            let mut x = 0;
            while x < s.width {
                let color = gray(shading.at(Position::new(x as i32, y as i32)));
                let mut run = 1;
                while x + run < s.width && gray(shading.at(Position::new((x + run) as i32, y as i32))) == color {
                    run += 1;
                }
                if color != PLAIN {
                    writeln!(
                        out,
                        "<rect x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" fill=\"{}\"/>",
                        num(x as f64 * cell),
                        num(y as f64 * cell),
                        num(run as f64 * cell),
                        num(cell),
                        hex(color)
                    )
                    .unwrap();
                }
                x += run;
            }
        }
        out.push_str("</g>\n");
    }
    if !s.obstacles.is_empty() {
        writeln!(out, "<g id=\"obstacles\" fill=\"{}\" shape-rendering=\"crispEdges\">", hex(OBSTACLE)).unwrap();
        for p in &s.obstacles {
            writeln!(
                out,
                "<rect x=\"{}\" y=\"{}\" width=\"{2}\" height=\"{2}\"/>",
                num(f64::from(p.x) * cell),
                num(f64::from(p.y) * cell),
                num(cell)
            )
            .unwrap();
        }
        out.push_str("</g>\n");
    }
    if let Some(gt) = &s.ground_truth {
        let points: Vec<String> = gt
            .iter()
            .map(|&p| {
                let (x, y) = center(p);
                format!("{},{}", num(x), num(y))
            })
            .collect();
        writeln!(
            out,
            "<polyline id=\"ground-truth\" points=\"{}\" fill=\"none\" stroke=\"{}\" stroke-width=\"{}\" stroke-dasharray=\"{}\" stroke-linejoin=\"round\"/>",
            points.join(" "),
            hex(TRUTH),
            num(cell * 0.3),
            num(cell * 0.6)
        )
        .unwrap();
    }
    for (rank, path) in s.paths.iter().enumerate().rev() {
        let d: Vec<String> = path
            .iter()
            .enumerate()
            .map(|(i, &p)| {
                let (x, y) = center(p);
                format!("{}{} {}", if i == 0 { "M" } else { "L" }, num(x), num(y))
            })
            .collect();
        let color = if rank == 0 { TOP1 } else { OTHER };
        let width = if rank == 0 { 0.25 } else { 0.12 };
        writeln!(
            out,
            "<path d=\"{}\" fill=\"none\" stroke=\"{}\" stroke-width=\"{}\" stroke-linejoin=\"round\" data-rank=\"{}\"/>",
            d.join(" "),
            hex(color),
            num(cell * width),
            rank + 1
        )
        .unwrap();
    }
    if let Some(segments) = arrow_segments(s, cell) {
        writeln!(
            out,
            "<g id=\"heading\" stroke=\"{}\" stroke-width=\"{}\" stroke-linecap=\"round\">",
            hex(ARROW),
            num(cell * 0.2)
        )
        .unwrap();
        for (x1, y1, x2, y2) in segments {
            writeln!(out, "<line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\"/>", num(x1), num(y1), num(x2), num(y2)).unwrap();
        }
        out.push_str("</g>\n");
    }
    out.push_str("</svg>\n");
    out
}

struct Canvas {
    width: usize,
    height: usize,
    pixels: Vec<[u8; 3]>,
}

impl Canvas {
    fn fill(&mut self, x0: i64, y0: i64, x1: i64, y1: i64, color: [u8; 3]) {
        let clamp_x = |v: i64| v.clamp(0, self.width as i64) as usize;
        let clamp_y = |v: i64| v.clamp(0, self.height as i64) as usize;
        let (xa, xb, ya, yb) = (clamp_x(x0), clamp_x(x1), clamp_y(y0), clamp_y(y1));
        for y in ya..yb {
            for x in xa..xb {
                self.pixels[y * self.width + x] = color;
            }
        }
    }

    fn line(&mut self, (x0, y0): (f64, f64), (x1, y1): (f64, f64), thickness: i64, color: [u8; 3]) {
        let (mut x, mut y) = (x0.round() as i64, y0.round() as i64);
        let (tx, ty) = (x1.round() as i64, y1.round() as i64);
        let (dx, dy) = ((tx - x).abs(), -(ty - y).abs());
        let (sx, sy) = (if x < tx { 1 } else { -1 }, if y < ty { 1 } else { -1 });
        let mut err = dx + dy;
        let lo = thickness / 2;
        loop {
            self.fill(x - lo, y - lo, x - lo + thickness, y - lo + thickness, color);
            if x == tx && y == ty {
                break;
            }
            let e2 = 2 * err;
            if e2 >= dy {
                err += dy;
                x += sx;
            }
            if e2 <= dx {
                err += dx;
                y += sy;
            }
        }
    }
}

/// Binary P6 image of `width * cell_size` by `height * cell_size` pixels.
pub fn ppm(s: &Scenery, draw: &DrawSettings, metadata: &str) -> Vec<u8> {
    let cs = draw.cell_size as usize;
    let mut canvas = Canvas { width: s.width * cs, height: s.height * cs, pixels: vec![PLAIN; s.width * s.height * cs * cs] };
    let cell = cs as f64;
    let rect = |p: Position| {
        let (x, y) = (i64::from(p.x) * cs as i64, i64::from(p.y) * cs as i64);
        (x, y, x + cs as i64, y + cs as i64)
    };
    if let Some(shading) = &s.shading {
        for i in 0..shading.values().len() {
            let p = shading.position_of(i);
            let (x0, y0, x1, y1) = rect(p);
            canvas.fill(x0, y0, x1, y1, gray(shading.values()[i]));
        }
    }
    for &p in &s.obstacles {
        let (x0, y0, x1, y1) = rect(p);
        canvas.fill(x0, y0, x1, y1, OBSTACLE);
    }
    let center = |p: Position| ((f64::from(p.x) + 0.5) * cell, (f64::from(p.y) + 0.5) * cell);
    let thick = |f: f64| ((cell * f).round() as i64).max(1);
    let polyline = |canvas: &mut Canvas, cells: &[Position], t: i64, color: [u8; 3]| {
        if let [only] = cells {
            canvas.line(center(*only), center(*only), t, color);
        }
        for w in cells.windows(2) {
            canvas.line(center(w[0]), center(w[1]), t, color);
        }
    };
    if let Some(gt) = &s.ground_truth {
        polyline(&mut canvas, gt, thick(0.3), TRUTH);
    }
    for (rank, path) in s.paths.iter().enumerate().rev() {
        let (t, color) = if rank == 0 { (thick(0.25), TOP1) } else { (thick(0.12), OTHER) };
        polyline(&mut canvas, path, t, color);
    }
    if let Some(segments) = arrow_segments(s, cell) {
        for (x1, y1, x2, y2) in segments {
            canvas.line((x1, y1), (x2, y2), thick(0.2), ARROW);
        }
    }

    let mut out = format!("P6\n# {}\n{} {}\n255\n", metadata.replace('\n', " "), canvas.width, canvas.height).into_bytes();
    out.reserve(canvas.pixels.len() * 3);
    for px in &canvas.pixels {
        out.extend_from_slice(px);
    }
    out
}
