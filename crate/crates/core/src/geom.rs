//! Grid geometry and angle arithmetic.
//!
//! All coordinates live in an image-style frame: origin at the top-left
//! cell, `x` grows to the right (columns) and `y` grows downward (rows).
//! Angles are measured in that frame, so `π/2` points *down* the grid.

use std::f64::consts::{PI, TAU};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GeomError {
    #[error("direction between identical positions ({0}, {1}) is undefined")]
    UndefinedDirection(i32, i32),
    #[error("bounding box dimensions must be positive, got {w}x{h}")]
    NonPositiveBox { w: i64, h: i64 },
    #[error("downsampling factor must be at least 1")]
    ZeroScale,
    #[error("path must contain at least one position")]
    EmptyPath,
    #[error("path positions {index} and {next} are not 8-adjacent")]
    NotAdjacent { index: usize, next: usize },
}

/// A grid cell, `x` = column, `y` = row.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Position {
    pub x: i32,
    pub y: i32,
}

impl Position {
    pub const fn new(x: i32, y: i32) -> Self {
        Self { x, y }
    }

    pub fn l1(self, other: Position) -> i64 {
        (i64::from(self.x) - i64::from(other.x)).abs() + (i64::from(self.y) - i64::from(other.y)).abs()
    }

    pub fn chebyshev(self, other: Position) -> i64 {
        (i64::from(self.x) - i64::from(other.x))
            .abs()
            .max((i64::from(self.y) - i64::from(other.y)).abs())
    }

    pub fn euclidean(self, other: Position) -> f64 {
        let dx = f64::from(self.x) - f64::from(other.x);
        let dy = f64::from(self.y) - f64::from(other.y);
        dx.hypot(dy)
    }

    pub fn is_adjacent(self, other: Position) -> bool {
        self.chebyshev(other) == 1
    }

    /// Sort key ordering cells by row first, then column.
    pub fn row_major_key(self) -> (i32, i32) {
        (self.y, self.x)
    }
}

impl fmt::Display for Position {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.x, self.y)
    }
}

/// An angle in radians, always normalized into `(-π, +π]`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(from = "f64", into = "f64")]
pub struct Angle(f64);

impl Angle {
    pub fn new(radians: f64) -> Self {
        Self(normalize(radians))
    }

    pub fn radians(self) -> f64 {
        self.0
    }

    /// The opposite heading.
    pub fn reversed(self) -> Self {
        Self::new(self.0 + PI)
    }
}

impl From<f64> for Angle {
    fn from(radians: f64) -> Self {
        Self::new(radians)
    }
}

impl From<Angle> for f64 {
    fn from(angle: Angle) -> f64 {
        angle.0
    }
}

fn normalize(radians: f64) -> f64 {
    if radians > -PI && radians <= PI {
        return radians;
    }
    let mut r = radians.rem_euclid(TAU);
    // rem_euclid may round up to exactly TAU for tiny negative inputs.
    if r >= TAU {
        r -= TAU;
    }
    if r > PI {
        r - TAU
    } else {
        r
    }
}

/// Angular difference between two headings, in `[0, π]`.
pub fn angular_difference(a: Angle, b: Angle) -> f64 {
    let diff = (a.0 - b.0).abs();
    if diff <= PI {
        diff
    } else {
        TAU - diff
    }
}

/// Heading from `from` to `to` in the grid frame.
pub fn direction_between(from: Position, to: Position) -> Result<Angle, GeomError> {
    if from == to {
        return Err(GeomError::UndefinedDirection(from.x, from.y));
    }
    let dx = f64::from(to.x) - f64::from(from.x);
    let dy = f64::from(to.y) - f64::from(from.y);
    Ok(Angle::new(dy.atan2(dx)))
}

/// Object bounding box in scene pixels: top-left `(b1, b2)`, width `w`, height `h`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct BoundingBox {
    b1: i64,
    b2: i64,
    w: i64,
    h: i64,
}

impl BoundingBox {
    pub fn new(b1: i64, b2: i64, w: i64, h: i64) -> Result<Self, GeomError> {
        if w < 1 || h < 1 {
            return Err(GeomError::NonPositiveBox { w, h });
        }
        Ok(Self { b1, b2, w, h })
    }

    pub fn left(&self) -> i64 {
        self.b1
    }

    pub fn top(&self) -> i64 {
        self.b2
    }

    pub fn width(&self) -> i64 {
        self.w
    }

    pub fn height(&self) -> i64 {
        self.h
    }

    pub fn as_array(&self) -> [i64; 4] {
        [self.b1, self.b2, self.w, self.h]
    }

    /// Whether the box lies fully inside a `width x height` raster.
    pub fn fits_within(&self, width: u32, height: u32) -> bool {
        self.b1 >= 0
            && self.b2 >= 0
            && self.b1 + self.w <= i64::from(width)
            && self.b2 + self.h <= i64::from(height)
    }

    /// Center in pixel coordinates.
    pub fn center(&self) -> (f64, f64) {
        (
            self.b1 as f64 + self.w as f64 / 2.0,
            self.b2 as f64 + self.h as f64 / 2.0,
        )
    }

    /// The grid cell containing the box center after downsampling by `scale`.
    pub fn center_cell(&self, scale: u32) -> Result<Position, GeomError> {
        if scale == 0 {
            return Err(GeomError::ZeroScale);
        }
        let (cx, cy) = self.center();
        let s = f64::from(scale);
        Ok(Position::new((cx / s).floor() as i32, (cy / s).floor() as i32))
    }
}

/// Probe distance `d` in grid cells: the box diagonal, floored after scaling, at least 1.
pub fn diagonal_distance(bbox: &BoundingBox, scale: u32) -> Result<u32, GeomError> {
    if bbox.w < 1 || bbox.h < 1 {
        return Err(GeomError::NonPositiveBox { w: bbox.w, h: bbox.h });
    }
    if scale == 0 {
        return Err(GeomError::ZeroScale);
    }
    let diag = ((bbox.w * bbox.w + bbox.h * bbox.h) as f64).sqrt();
    let cells = (diag / f64::from(scale)).floor() as u32;
    Ok(cells.max(1))
}

/// A non-empty sequence of pairwise 8-adjacent cells.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PathSeq(Vec<Position>);

impl PathSeq {
    pub fn new(positions: Vec<Position>) -> Result<Self, GeomError> {
        if positions.is_empty() {
            return Err(GeomError::EmptyPath);
        }
        if let Some(i) = positions.windows(2).position(|w| !w[0].is_adjacent(w[1])) {
            return Err(GeomError::NotAdjacent { index: i, next: i + 1 });
        }
        Ok(Self(positions))
    }

    pub fn positions(&self) -> &[Position] {
        &self.0
    }

    pub fn start(&self) -> Position {
        self.0[0]
    }

    pub fn end(&self) -> Position {
        self.0[self.0.len() - 1]
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn into_positions(self) -> Vec<Position> {
        self.0
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    const TOL: f64 = 1e-12;

    #[test]
    fn angular_difference_examples() {
        assert_eq!(angular_difference(Angle::new(0.5), Angle::new(0.5)), 0.0);
        let wrap = angular_difference(Angle::new(3.0 * PI / 4.0), Angle::new(-3.0 * PI / 4.0));
        assert!((wrap - PI / 2.0).abs() < TOL);
        let direct = angular_difference(Angle::new(2.0), Angle::new(-1.0));
        assert!((direct - 3.0).abs() < TOL);
    }

    #[test]
    fn normalization_half_open_interval() {
        assert_eq!(Angle::new(PI).radians(), PI);
        assert!((Angle::new(-PI).radians() - PI).abs() < TOL);
        assert!((Angle::new(3.0 * PI).radians() - PI).abs() < 1e-9);
        assert!((Angle::new(-PI / 2.0 - TAU).radians() + PI / 2.0).abs() < TOL);
        assert!(Angle::new(-1e-300).radians() <= 0.0);
    }

    #[test]
    fn diagonal_distance_examples() {
        let b = |w, h| BoundingBox::new(0, 0, w, h).unwrap();
        assert_eq!(diagonal_distance(&b(3, 4), 1).unwrap(), 5);
        assert_eq!(diagonal_distance(&b(1, 1), 1).unwrap(), 1);
        assert_eq!(diagonal_distance(&b(8, 6), 2).unwrap(), 5);
        assert_eq!(diagonal_distance(&b(1, 1), 4).unwrap(), 1);
    }

    #[test]
    fn non_positive_box_rejected() {
        assert!(matches!(
            BoundingBox::new(0, 0, 0, 3),
            Err(GeomError::NonPositiveBox { .. })
        ));
        assert!(BoundingBox::new(0, 0, 3, -1).is_err());
    }

    #[test]
    fn direction_examples() {
        let o = Position::new(0, 0);
        assert_eq!(direction_between(o, Position::new(1, 0)).unwrap().radians(), 0.0);
        assert!((direction_between(o, Position::new(0, 1)).unwrap().radians() - PI / 2.0).abs() < TOL);
        assert!(
            (direction_between(o, Position::new(-1, -1)).unwrap().radians() + 3.0 * PI / 4.0).abs()
                < TOL
        );
        assert_eq!(direction_between(o, Position::new(-1, 0)).unwrap().radians(), PI);
        assert!(matches!(direction_between(o, o), Err(GeomError::UndefinedDirection(0, 0))));
    }

    #[test]
    fn box_center_cell() {
        let b = BoundingBox::new(4, 6, 3, 3).unwrap();
        assert_eq!(b.center_cell(1).unwrap(), Position::new(5, 7));
        assert_eq!(b.center_cell(2).unwrap(), Position::new(2, 3));
        assert!(b.fits_within(7, 9));
        assert!(!b.fits_within(6, 9));
        let edge = BoundingBox::new(630, 350, 20, 20).unwrap();
        assert!(!edge.fits_within(640, 360));
    }

    #[test]
    fn path_seq_validation() {
        let p = |x, y| Position::new(x, y);
        assert!(PathSeq::new(vec![]).is_err());
        assert!(PathSeq::new(vec![p(0, 0), p(1, 1), p(2, 1)]).is_ok());
        assert_eq!(
            PathSeq::new(vec![p(0, 0), p(2, 0)]),
            Err(GeomError::NotAdjacent { index: 0, next: 1 })
        );
        assert!(PathSeq::new(vec![p(0, 0), p(0, 0)]).is_err());
    }

    fn any_angle() -> impl Strategy<Value = Angle> {
        (-10.0f64..10.0).prop_map(Angle::new)
    }

    proptest! {
        #[test]
        fn angle_always_normalized(r in -1e6f64..1e6) {
            let a = Angle::new(r).radians();
            prop_assert!(a > -PI && a <= PI);
        }

        #[test]
        fn difference_symmetric_and_bounded(a in any_angle(), b in any_angle()) {
            let d = angular_difference(a, b);
            prop_assert!((0.0..=PI).contains(&d));
            prop_assert!((d - angular_difference(b, a)).abs() <= TOL);
        }

        #[test]
        fn difference_invariant_under_full_turns(a in -PI..PI, b in any_angle(), k in -20i32..20) {
            let shifted = Angle::new(a + TAU * f64::from(k));
            let base = angular_difference(Angle::new(a), b);
            prop_assert!((angular_difference(shifted, b) - base).abs() <= TOL);
        }

        #[test]
        fn difference_triangle_bound(a in any_angle(), b in any_angle(), c in any_angle()) {
            prop_assert!(
                angular_difference(a, c) <= angular_difference(a, b) + angular_difference(b, c) + TOL
            );
        }

        #[test]
        fn reversed_direction_differs_by_pi(
            x0 in -50i32..50, y0 in -50i32..50, x1 in -50i32..50, y1 in -50i32..50
        ) {
            let p = Position::new(x0, y0);
            let q = Position::new(x1, y1);
            prop_assume!(p != q);
            let forward = direction_between(p, q).unwrap();
            let backward = direction_between(q, p).unwrap();
            prop_assert!((angular_difference(forward, backward) - PI).abs() <= TOL);
        }
    }
}
