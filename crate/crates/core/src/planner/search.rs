use std::cmp::Ordering;
use std::collections::BinaryHeap;

use super::graph::PlanGraph;
use crate::geom::{PathSeq, Position};

/// Candidate paths sorted by ascending graph length. Equal lengths are
/// ordered by the terminal cell's (row, column).
#[derive(Debug, Clone, PartialEq)]
pub struct PredictionSet {
    paths: Vec<PathSeq>,
    lengths: Vec<f64>,
}

impl PredictionSet {
    pub fn paths(&self) -> &[PathSeq] {
        &self.paths
    }

    pub fn lengths(&self) -> &[f64] {
        &self.lengths
    }

    pub fn len(&self) -> usize {
        self.paths.len()
    }

    pub fn is_empty(&self) -> bool {
        self.paths.is_empty()
    }

    pub fn top1(&self) -> Option<(&PathSeq, f64)> {
        self.paths.first().map(|p| (p, self.lengths[0]))
    }

    pub fn iter(&self) -> impl Iterator<Item = (&PathSeq, f64)> {
        self.paths.iter().zip(self.lengths.iter().copied())
    }

    pub fn truncate(&mut self, n: usize) {
        self.paths.truncate(n);
        self.lengths.truncate(n);
    }

    /// Builds a set from already sorted entries.
    pub fn from_sorted(entries: Vec<(PathSeq, f64)>) -> Self {
        let (paths, lengths) = entries.into_iter().unzip();
        Self { paths, lengths }
    }
}

/// Heap entry. Among exactly equal lengths the route with fewer diagonal
/// steps wins, then the smaller node index; lengths themselves are unaffected.
#[derive(PartialEq)]
struct Frontier {
    dist: f64,
    diagonals: u32,
    node: usize,
}

impl Eq for Frontier {}

impl Ord for Frontier {
    fn cmp(&self, other: &Self) -> Ordering {
        // Min-heap on (dist, diagonals, node).
        other
            .dist
            .total_cmp(&self.dist)
            .then_with(|| other.diagonals.cmp(&self.diagonals))
            .then_with(|| other.node.cmp(&self.node))
    }
}

impl PartialOrd for Frontier {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

struct Tree {
    dist: Vec<f64>,
    parent: Vec<usize>,
}

fn dijkstra(graph: &PlanGraph) -> Tree {
    let n = graph.node_count();
    let mut dist = vec![f64::INFINITY; n];
    let mut diagonals = vec![u32::MAX; n];
    let mut parent = vec![usize::MAX; n];
    let mut done = vec![false; n];
    let source = graph.index(graph.start());
    dist[source] = 0.0;
    diagonals[source] = 0;
    let mut heap = BinaryHeap::new();
    heap.push(Frontier { dist: 0.0, diagonals: 0, node: source });

    while let Some(Frontier { dist: d, diagonals: k, node }) = heap.pop() {
        if done[node] {
            continue;
        }
        done[node] = true;
        let here = graph.position(node);
        for next in graph.neighbors(here) {
            let j = graph.index(next);
            if done[j] {
                continue;
            }
            let candidate = d + graph.entry_weight_at(j);
            let turns = k + u32::from(next.x != here.x && next.y != here.y);
            if candidate < dist[j] || (candidate == dist[j] && turns < diagonals[j]) {
                dist[j] = candidate;
                diagonals[j] = turns;
                parent[j] = node;
                heap.push(Frontier { dist: candidate, diagonals: turns, node: j });
            }
        }
    }
    Tree { dist, parent }
}

fn trace(graph: &PlanGraph, tree: &Tree, target: usize) -> PathSeq {
    let mut cells = vec![graph.position(target)];
    let mut cur = target;
    while tree.parent[cur] != usize::MAX {
        cur = tree.parent[cur];
        cells.push(graph.position(cur));
    }
    cells.reverse();
    PathSeq::new(cells).expect("Dijkstra tree paths are 8-adjacent")
}

/// The tree path and length from the start to every border cell, sorted
/// ascending by length.
pub fn shortest_paths_to_boundary(graph: &PlanGraph) -> PredictionSet {
    shortest_paths_to_boundary_top(graph, usize::MAX)
}

/// As [`shortest_paths_to_boundary`], keeping only the first `limit` entries.
pub fn shortest_paths_to_boundary_top(graph: &PlanGraph, limit: usize) -> PredictionSet {
    let tree = dijkstra(graph);
    let mut ends: Vec<(f64, Position)> = graph
        .boundary()
        .into_iter()
        .map(|p| (tree.dist[graph.index(p)], p))
        .collect();
    ends.sort_by(|a, b| a.0.total_cmp(&b.0).then_with(|| a.1.row_major_key().cmp(&b.1.row_major_key())));
    ends.truncate(limit);
    let entries = ends
        .into_iter()
        .map(|(len, p)| (trace(graph, &tree, graph.index(p)), len))
        .collect();
    PredictionSet::from_sorted(entries)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::ScalarField;
    use crate::geom::Angle;
    use crate::planner::{build_graph, PlannerConfig};

    #[test]
    fn uniform_3x3_ties_break_by_row_then_column() {
        let cost = ScalarField::filled(3, 3, 0.1).unwrap();
        let cfg = PlannerConfig { epsilon: 0.0, ..Default::default() };
        let g = build_graph(&cost, Position::new(1, 1), Angle::new(0.0), 1, &cfg).unwrap();
        let set = shortest_paths_to_boundary(&g);
        assert_eq!(set.len(), 8);
        assert!(set.lengths().iter().all(|&l| l == 0.1));
        let ends: Vec<Position> = set.paths().iter().map(|p| p.end()).collect();
        assert_eq!(ends[0], Position::new(0, 0));
        assert_eq!(ends[1], Position::new(1, 0));
        assert_eq!(ends[7], Position::new(2, 2));
        assert!(set.paths().iter().all(|p| p.len() == 2));
    }

    #[test]
    fn paths_are_simple_and_end_on_border() {
        let cost = ScalarField::from_fn(12, 9, |p| 0.05 + f64::from((p.x * 7 + p.y * 3) % 10) / 11.0).unwrap();
        let g = build_graph(&cost, Position::new(5, 4), Angle::new(2.0), 2, &PlannerConfig::default()).unwrap();
        let set = shortest_paths_to_boundary(&g);
        assert_eq!(set.len(), 2 * (12 + 9) - 4);
        for (path, len) in set.iter() {
            assert!(g.is_boundary(path.end()));
            assert_eq!(path.start(), Position::new(5, 4));
            let mut seen = std::collections::HashSet::new();
            assert!(path.positions().iter().all(|p| seen.insert(*p)));
            let recomputed: f64 = path.positions().windows(2).map(|w| g.edge_weight(w[0], w[1])).sum();
            assert!((recomputed - len).abs() < 1e-9);
        }
        assert!(set.lengths().windows(2).all(|w| w[0] <= w[1]));
        let top = shortest_paths_to_boundary_top(&g, 5);
        assert_eq!(top.paths(), &set.paths()[..5]);
    }
}
