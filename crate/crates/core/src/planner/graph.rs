use super::{PlannerConfig, PlannerError};
use crate::field::ScalarField;
use crate::geom::{angular_difference, direction_between, Angle, Position};

/// 8-neighborhood offsets in row-major order.
pub(crate) const NEIGHBORS: [(i32, i32); 8] =
    [(-1, -1), (0, -1), (1, -1), (-1, 0), (1, 0), (-1, 1), (0, 1), (1, 1)];

/// Directed grid graph whose edge weights depend only on the destination
/// cell: its cost, plus `epsilon * D(direction(start, cell), theta)` when the
/// cell's L1 distance from the start is `d` or `d + 1`.
#[derive(Debug, Clone)]
pub struct PlanGraph {
    width: usize,
    height: usize,
    entry_weight: Vec<f64>,
    start: Position,
    probe_distance: u32,
    theta: Angle,
}

impl PlanGraph {
    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn start(&self) -> Position {
        self.start
    }

    pub fn probe_distance(&self) -> u32 {
        self.probe_distance
    }

    pub fn theta(&self) -> Angle {
        self.theta
    }

    pub fn node_count(&self) -> usize {
        self.width * self.height
    }

    pub fn contains(&self, p: Position) -> bool {
        p.x >= 0 && p.y >= 0 && (p.x as usize) < self.width && (p.y as usize) < self.height
    }

    pub(crate) fn index(&self, p: Position) -> usize {
        p.y as usize * self.width + p.x as usize
    }

    pub(crate) fn position(&self, index: usize) -> Position {
        Position::new((index % self.width) as i32, (index / self.width) as i32)
    }

    /// Whether entering `p` carries the orientation penalty.
    pub fn in_ring(&self, p: Position) -> bool {
        let l1 = p.l1(self.start);
        l1 == i64::from(self.probe_distance) || l1 == i64::from(self.probe_distance) + 1
    }

    pub fn is_boundary(&self, p: Position) -> bool {
        self.contains(p)
            && (p.x == 0 || p.y == 0 || p.x as usize == self.width - 1 || p.y as usize == self.height - 1)
    }

    /// Border cells in row-major order; `2(W + H) - 4` of them.
    pub fn boundary(&self) -> Vec<Position> {
        (0..self.node_count())
            .map(|i| self.position(i))
            .filter(|&p| self.is_boundary(p))
            .collect()
    }

    /// Weight of any edge entering `p`.
    pub fn entry_weight(&self, p: Position) -> f64 {
        self.entry_weight[self.index(p)]
    }

    pub(crate) fn entry_weight_at(&self, index: usize) -> f64 {
        self.entry_weight[index]
    }

    pub fn neighbors(&self, p: Position) -> impl Iterator<Item = Position> + '_ {
        NEIGHBORS
            .iter()
            .map(move |&(dx, dy)| Position::new(p.x + dx, p.y + dy))
            .filter(move |&q| self.contains(q))
    }

    pub fn out_degree(&self, p: Position) -> usize {
        self.neighbors(p).count()
    }

    /// `W(from, to)`; infinite unless both cells are in the grid and adjacent.
    pub fn edge_weight(&self, from: Position, to: Position) -> f64 {
        if self.contains(from) && self.contains(to) && from.is_adjacent(to) {
            self.entry_weight(to)
        } else {
            f64::INFINITY
        }
    }
}

pub fn build_graph(
    cost: &ScalarField,
    start: Position,
    theta: Angle,
    probe_distance: u32,
    cfg: &PlannerConfig,
) -> Result<PlanGraph, PlannerError> {
    cfg.validate()?;
    let (width, height) = cost.dims();
    if !cost.contains(start) {
        return Err(PlannerError::StartOutside { start, width, height });
    }
    if cost.is_border(start) {
        return Err(PlannerError::StartOnBoundary { start });
    }
    if probe_distance == 0 {
        return Err(PlannerError::ZeroProbeDistance);
    }
    if let Some(i) = cost.values().iter().position(|&c| !(c > 0.0 && c.is_finite())) {
        return Err(PlannerError::NonPositiveCost { position: cost.position_of(i), value: cost.values()[i] });
    }

    let mut graph = PlanGraph {
        width,
        height,
        entry_weight: cost.values().to_vec(),
        start,
        probe_distance,
        theta,
    };
    if cfg.epsilon > 0.0 {
        for i in 0..graph.node_count() {
            let p = graph.position(i);
            if graph.in_ring(p) {
                let heading = direction_between(start, p)?;
                graph.entry_weight[i] += cfg.epsilon * angular_difference(heading, theta);
            }
        }
    }
    Ok(graph)
}
