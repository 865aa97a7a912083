//! Raster and trajectory file formats.
//!
//! Scalar fields are read from PGM (`P2` ASCII or `P5` binary, 8 or 16 bit)
//! or from CSV (one grid row per line, comma-separated reals). PGM samples
//! `v` with maximum value `M` map to `v / M`. Trajectories are CSV files of
//! `x,y` pairs with an optional `x,y` header line.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use thiserror::Error;

use crate::field::{FieldError, ScalarField};
use crate::geom::Position;

#[derive(Debug, Error)]
pub enum RasterError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: malformed PGM header: {reason}")]
    MalformedHeader { path: PathBuf, reason: String },
    #[error("{path}: truncated payload, expected {expected} samples but found {found}")]
    Truncated {
        path: PathBuf,
        expected: usize,
        found: usize,
    },
    #[error("{path}: sample {value} exceeds maxval {maxval}")]
    SampleAboveMax { path: PathBuf, value: u32, maxval: u32 },
    #[error("{path}:{line}: {reason}")]
    Csv {
        path: PathBuf,
        line: u64,
        reason: String,
    },
    #[error("{path}:{line}: value {value} in column {column} is outside [0, 1]")]
    OutOfRange {
        path: PathBuf,
        line: u64,
        column: usize,
        value: f64,
    },
    #[error("{path}: {source}")]
    Field {
        path: PathBuf,
        #[source]
        source: FieldError,
    },
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> RasterError + '_ {
    move |source| RasterError::Io { path: path.to_path_buf(), source }
}

/// Loads a reward-style field from PGM or CSV, picking the format from the
/// file's leading bytes.
pub fn load_scalar_field(path: &Path) -> Result<ScalarField, RasterError> {
    let bytes = fs::read(path).map_err(io_err(path))?;
    if bytes.starts_with(b"P2") || bytes.starts_with(b"P5") {
        parse_pgm(&bytes, path)
    } else {
        parse_csv_field(&bytes, path)
    }
}

/// Loads an obstacle raster: each value is binarized at 0.5, yielding a
/// field of 0.0 (free) and 1.0 (obstacle).
pub fn load_obstacle_map(path: &Path) -> Result<ScalarField, RasterError> {
    let field = load_scalar_field(path)?;
    Ok(field.map(|v| if v >= 0.5 { 1.0 } else { 0.0 }))
}

struct HeaderReader<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> HeaderReader<'a> {
    fn skip_space_and_comments(&mut self) {
        while self.pos < self.bytes.len() {
            match self.bytes[self.pos] {
                b'#' => {
                    while self.pos < self.bytes.len() && self.bytes[self.pos] != b'\n' {
                        self.pos += 1;
                    }
                }
                b if b.is_ascii_whitespace() => self.pos += 1,
                _ => break,
            }
        }
    }

    fn token(&mut self) -> Option<&'a [u8]> {
        self.skip_space_and_comments();
        let start = self.pos;
        while self.pos < self.bytes.len() && !self.bytes[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
        (self.pos > start).then(|| &self.bytes[start..self.pos])
    }

    fn number(&mut self, what: &str) -> Result<u32, String> {
        let tok = self.token().ok_or_else(|| format!("missing {what}"))?;
        std::str::from_utf8(tok)
            .ok()
            .and_then(|s| s.parse::<u32>().ok())
            .ok_or_else(|| format!("invalid {what} '{}'", String::from_utf8_lossy(tok)))
    }
}

fn parse_pgm(bytes: &[u8], path: &Path) -> Result<ScalarField, RasterError> {
    let malformed = |reason: String| RasterError::MalformedHeader { path: path.to_path_buf(), reason };
    let mut reader = HeaderReader { bytes, pos: 0 };
    let magic = reader.token().ok_or_else(|| malformed("missing magic".into()))?;
    let binary = match magic {
        b"P2" => false,
        b"P5" => true,
        other => return Err(malformed(format!("unsupported magic '{}'", String::from_utf8_lossy(other)))),
    };
    let width = reader.number("width").map_err(malformed)? as usize;
    let height = reader.number("height").map_err(malformed)? as usize;
    let maxval = reader.number("maxval").map_err(malformed)?;
    if width == 0 || height == 0 {
        return Err(malformed(format!("zero dimension {width}x{height}")));
    }
    if maxval == 0 || maxval > 65535 {
        return Err(malformed(format!("maxval {maxval} outside 1..=65535")));
    }
    let expected = width * height;
    let mut samples = Vec::with_capacity(expected);
    if binary {
        // Exactly one whitespace byte separates the header from the raster.
        let data = bytes.get(reader.pos + 1..).unwrap_or(&[]);
        if maxval < 256 {
            samples.extend(data.iter().take(expected).map(|&b| u32::from(b)));
        } else {
            samples.extend(
                data.chunks_exact(2)
                    .take(expected)
                    .map(|c| u32::from(u16::from_be_bytes([c[0], c[1]]))),
            );
        }
    } else {
        while samples.len() < expected {
            match reader.token() {
                Some(tok) => {
                    let v = std::str::from_utf8(tok)
                        .ok()
                        .and_then(|s| s.parse::<u32>().ok())
                        .ok_or_else(|| RasterError::Csv {
                            path: path.to_path_buf(),
                            line: 0,
                            reason: format!("invalid sample '{}'", String::from_utf8_lossy(tok)),
                        })?;
                    samples.push(v);
                }
                None => break,
            }
        }
    }
    if samples.len() < expected {
        return Err(RasterError::Truncated {
            path: path.to_path_buf(),
            expected,
            found: samples.len(),
        });
    }
    if let Some(&value) = samples.iter().find(|&&v| v > maxval) {
        return Err(RasterError::SampleAboveMax { path: path.to_path_buf(), value, maxval });
    }
    let scale = f64::from(maxval);
    let values = samples.into_iter().map(|v| f64::from(v) / scale).collect();
    ScalarField::new(width, height, values)
        .map_err(|source| RasterError::Field { path: path.to_path_buf(), source })
}

fn parse_csv_field(bytes: &[u8], path: &Path) -> Result<ScalarField, RasterError> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .from_reader(bytes);
    let mut width = None;
    let mut values = Vec::new();
    let mut rows = 0;
    for record in reader.records() {
        let record = record.map_err(|e| RasterError::Csv {
            path: path.to_path_buf(),
            line: e.position().map_or(0, |p| p.line()),
            reason: e.to_string(),
        })?;
        let line = record.position().map_or(0, |p| p.line());
        for (column, cell) in record.iter().enumerate() {
            let value: f64 = cell.parse().map_err(|_| RasterError::Csv {
                path: path.to_path_buf(),
                line,
                reason: format!("invalid number '{cell}' in column {column}"),
            })?;
            if !(0.0..=1.0).contains(&value) {
                return Err(RasterError::OutOfRange { path: path.to_path_buf(), line, column, value });
            }
            values.push(value);
        }
        width.get_or_insert(record.len());
        rows += 1;
    }
    let width = width.unwrap_or(0);
    ScalarField::new(width, rows, values)
        .map_err(|source| RasterError::Field { path: path.to_path_buf(), source })
}

/// Encodes a field as an 8-bit binary PGM, quantizing `[0, 1]` to `0..=255`.
pub fn encode_pgm(field: &ScalarField) -> Vec<u8> {
    let mut out = format!("P5\n{} {}\n255\n", field.width(), field.height()).into_bytes();
    out.extend(
        field
            .values()
            .iter()
            .map(|v| (v.clamp(0.0, 1.0) * 255.0).round() as u8),
    );
    out
}

pub fn write_pgm(path: &Path, field: &ScalarField) -> Result<(), RasterError> {
    fs::write(path, encode_pgm(field)).map_err(io_err(path))
}

/// Reads an `x,y` trajectory. Real-valued coordinates are floored to the
/// containing pixel.
pub fn load_trajectory(path: &Path) -> Result<Vec<Position>, RasterError> {
    let bytes = fs::read(path).map_err(io_err(path))?;
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .from_reader(bytes.as_slice());
    let mut points = Vec::new();
    for (i, record) in reader.records().enumerate() {
        let record = record.map_err(|e| RasterError::Csv {
            path: path.to_path_buf(),
            line: e.position().map_or(0, |p| p.line()),
            reason: e.to_string(),
        })?;
        let line = record.position().map_or(0, |p| p.line());
        if i == 0 && record.iter().eq(["x", "y"]) {
            continue;
        }
        if record.len() != 2 {
            return Err(RasterError::Csv {
                path: path.to_path_buf(),
                line,
                reason: format!("expected 2 columns, found {}", record.len()),
            });
        }
        let coord = |s: &str| {
            s.parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| RasterError::Csv {
                    path: path.to_path_buf(),
                    line,
                    reason: format!("invalid coordinate '{s}'"),
                })
        };
        let x = coord(&record[0])?;
        let y = coord(&record[1])?;
        points.push(Position::new(x.floor() as i32, y.floor() as i32));
    }
    Ok(points)
}

pub fn write_trajectory(path: &Path, points: &[Position]) -> Result<(), RasterError> {
    let mut out = Vec::with_capacity(8 + points.len() * 8);
    out.extend_from_slice(b"x,y\n");
    for p in points {
        writeln!(out, "{},{}", p.x, p.y).expect("write to Vec");
    }
    fs::write(path, out).map_err(io_err(path))
}
