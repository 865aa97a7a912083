//! Dense row-major grids of real values (reward, cost and occupancy maps).

use thiserror::Error;

use crate::geom::Position;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FieldError {
    #[error("field of {width}x{height} needs {expected} values, got {got}")]
    LengthMismatch {
        width: usize,
        height: usize,
        expected: usize,
        got: usize,
    },
    #[error("field dimensions must be non-zero, got {width}x{height}")]
    Empty { width: usize, height: usize },
    #[error("value {value} at {position} is outside [0, 1]")]
    OutOfUnitRange { position: Position, value: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScalarField {
    width: usize,
    height: usize,
    values: Vec<f64>,
}

impl ScalarField {
    pub fn new(width: usize, height: usize, values: Vec<f64>) -> Result<Self, FieldError> {
        if width == 0 || height == 0 {
            return Err(FieldError::Empty { width, height });
        }
        if values.len() != width * height {
            return Err(FieldError::LengthMismatch {
                width,
                height,
                expected: width * height,
                got: values.len(),
            });
        }
        Ok(Self { width, height, values })
    }

    pub fn filled(width: usize, height: usize, value: f64) -> Result<Self, FieldError> {
        Self::new(width, height, vec![value; width * height])
    }

    pub fn from_fn(
        width: usize,
        height: usize,
        mut f: impl FnMut(Position) -> f64,
    ) -> Result<Self, FieldError> {
        let mut values = Vec::with_capacity(width * height);
        for y in 0..height {
            for x in 0..width {
                values.push(f(Position::new(x as i32, y as i32)));
            }
        }
        Self::new(width, height, values)
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.width, self.height)
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn contains(&self, p: Position) -> bool {
        p.x >= 0 && p.y >= 0 && (p.x as usize) < self.width && (p.y as usize) < self.height
    }

    pub fn index_of(&self, p: Position) -> Option<usize> {
        self.contains(p).then(|| p.y as usize * self.width + p.x as usize)
    }

    pub fn position_of(&self, index: usize) -> Position {
        Position::new((index % self.width) as i32, (index / self.width) as i32)
    }

    pub fn get(&self, p: Position) -> Option<f64> {
        self.index_of(p).map(|i| self.values[i])
    }

    /// Panics when `p` is outside the field.
    pub fn at(&self, p: Position) -> f64 {
        self.get(p)
            .unwrap_or_else(|| panic!("{p} outside {}x{} field", self.width, self.height))
    }

    pub fn set(&mut self, p: Position, value: f64) -> bool {
        match self.index_of(p) {
            Some(i) => {
                self.values[i] = value;
                true
            }
            None => false,
        }
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> ScalarField {
        ScalarField {
            width: self.width,
            height: self.height,
            values: self.values.iter().map(|&v| f(v)).collect(),
        }
    }

    /// Whether `p` lies on the outermost ring of cells.
    pub fn is_border(&self, p: Position) -> bool {
        self.contains(p)
            && (p.x == 0
                || p.y == 0
                || p.x as usize == self.width - 1
                || p.y as usize == self.height - 1)
    }

    /// Checks reward semantics: every value in `[0, 1]`.
    pub fn check_unit_range(&self) -> Result<(), FieldError> {
        match self.values.iter().position(|v| !(0.0..=1.0).contains(v)) {
            Some(i) => Err(FieldError::OutOfUnitRange {
                position: self.position_of(i),
                value: self.values[i],
            }),
            None => Ok(()),
        }
    }

    /// Block-mean downsampling by an integer factor. Edge blocks average
    /// only the cells they actually cover.
    pub fn downsample_mean(&self, factor: usize) -> ScalarField {
        if factor <= 1 {
            return self.clone();
        }
        let w = self.width.div_ceil(factor);
        let h = self.height.div_ceil(factor);
        let mut values = Vec::with_capacity(w * h);
        for by in 0..h {
            for bx in 0..w {
                let (mut sum, mut count) = (0.0, 0usize);
                for y in by * factor..((by + 1) * factor).min(self.height) {
                    let row = &self.values[y * self.width..(y + 1) * self.width];
                    for v in &row[bx * factor..((bx + 1) * factor).min(self.width)] {
                        sum += v;
                        count += 1;
                    }
                }
                values.push(sum / count as f64);
            }
        }
        ScalarField { width: w, height: h, values }
    }
}
