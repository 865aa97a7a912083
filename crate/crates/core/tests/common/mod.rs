//! Independent reference computations used by the integration tests.
#![allow(dead_code)]

use rand::Rng;
use vispath_core::field::ScalarField;
use vispath_core::Position;

/// Angular gap computed through wrap-around remainders.
pub fn oracle_angle_gap(a: f64, b: f64) -> f64 {
    let tau = std::f64::consts::TAU;
    let r = (a - b).rem_euclid(tau);
    r.min(tau - r)
}

/// Weight of stepping into `to`, recomputed from the cost map and the
/// ring rule without touching the graph type.
pub fn oracle_entry_weight(cost: &ScalarField, start: Position, theta: f64, d: u32, epsilon: f64, to: Position) -> f64 {
    let base = cost.at(to);
    let l1 = (to.x - start.x).abs() + (to.y - start.y).abs();
    let d = d as i32;
    if epsilon > 0.0 && (l1 == d || l1 == d + 1) {
        let dir = f64::from(to.y - start.y).atan2(f64::from(to.x - start.x));
        base + epsilon * oracle_angle_gap(dir, theta)
    } else {
        base
    }
}

pub fn oracle_path_length(
    cost: &ScalarField,
    path: &[Position],
    theta: f64,
    d: u32,
    epsilon: f64,
) -> f64 {
    path.windows(2)
        .map(|w| oracle_entry_weight(cost, path[0], theta, d, epsilon, w[1]))
        .sum()
}

fn on_border(p: Position, w: usize, h: usize) -> bool {
    p.x == 0 || p.y == 0 || p.x as usize == w - 1 || p.y as usize == h - 1
}

/// Exhaustive search over simple 8-connected paths from `start` that stop at
/// the first border cell they touch. Returns the least total weight.
pub fn brute_force_min_length(cost: &ScalarField, start: Position, theta: f64, d: u32, epsilon: f64) -> f64 {
    let (w, h) = cost.dims();
    let mut visited = vec![false; w * h];
    let mut best = f64::INFINITY;

    fn walk(
        cur: Position,
        acc: f64,
        visited: &mut Vec<bool>,
        best: &mut f64,
        ctx: (&ScalarField, Position, f64, u32, f64),
    ) {
        let (cost, start, theta, d, epsilon) = ctx;
        let (w, h) = cost.dims();
        if cur != start && on_border(cur, w, h) {
            *best = best.min(acc);
            return;
        }
        for dy in -1..=1 {
            for dx in -1..=1 {
                if dx == 0 && dy == 0 {
                    continue;
                }
                let next = Position::new(cur.x + dx, cur.y + dy);
                if next.x < 0 || next.y < 0 || next.x as usize >= w || next.y as usize >= h {
                    continue;
                }
                let i = next.y as usize * w + next.x as usize;
                if visited[i] {
                    continue;
                }
                visited[i] = true;
                let step = oracle_entry_weight(cost, start, theta, d, epsilon, next);
                walk(next, acc + step, visited, best, ctx);
                visited[i] = false;
            }
        }
    }

    visited[start.y as usize * w + start.x as usize] = true;
    walk(start, 0.0, &mut visited, &mut best, (cost, start, theta, d, epsilon));
    best
}

/// Modified Hausdorff distance straight from its definition.
pub fn brute_force_mhd(a: &[(i32, i32)], b: &[(i32, i32)]) -> f64 {
    let directed = |from: &[(i32, i32)], to: &[(i32, i32)]| {
        let mut total = 0.0;
        for &(x1, y1) in from {
            let mut nearest = f64::MAX;
            for &(x2, y2) in to {
                let dist = f64::from(x1 - x2).hypot(f64::from(y1 - y2));
                if dist < nearest {
                    nearest = dist;
                }
            }
            total += nearest;
        }
        total / from.len() as f64
    };
    let ab = directed(a, b);
    let ba = directed(b, a);
    if ab > ba {
        ab
    } else {
        ba
    }
}

pub fn random_cost_map(rng: &mut impl Rng, w: usize, h: usize) -> ScalarField {
    let values = (0..w * h).map(|_| rng.gen_range(0.001..0.999)).collect();
    ScalarField::new(w, h, values).unwrap()
}

pub fn random_points(rng: &mut impl Rng, max_len: usize) -> Vec<(i32, i32)> {
    let n = rng.gen_range(1..=max_len);
    (0..n).map(|_| (rng.gen_range(-30..30), rng.gen_range(-30..30))).collect()
}

pub fn positions(points: &[(i32, i32)]) -> Vec<Position> {
    points.iter().map(|&(x, y)| Position::new(x, y)).collect()
}

/// 15 x 9 cost map with one cheap horizontal corridor through row 4. The
/// start (7, 4) sits at its middle, so the left and right halves mirror
/// each other exactly.
pub fn corridor_cost_map() -> (ScalarField, Position) {
    let cost = ScalarField::from_fn(15, 9, |p| if p.y == 4 { 0.01 } else { 0.99 }).unwrap();
    (cost, Position::new(7, 4))
}
