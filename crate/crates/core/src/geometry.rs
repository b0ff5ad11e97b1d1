use alloc::vec::Vec;

use crate::Error;

/// A position in the normalized search area.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Point2 {
    pub x: f64,
    pub y: f64,
}

impl Point2 {
    pub const fn new(x: f64, y: f64) -> Self {
        Point2 { x, y }
    }

    pub fn dist_sq(self, other: Point2) -> f64 {
        let dx = self.x - other.x;
        let dy = self.y - other.y;
        dx * dx + dy * dy
    }

    pub fn in_unit_square(self) -> bool {
        (0.0..=1.0).contains(&self.x) && (0.0..=1.0).contains(&self.y)
    }
}

impl From<(f64, f64)> for Point2 {
    fn from((x, y): (f64, f64)) -> Self {
        Point2 { x, y }
    }
}

/// Uniform `resolution × resolution` lattice over `[0, 1]²`.
///
/// Points are stored row-major: index `row * resolution + col` sits at
/// `x = col / (resolution - 1)`, `y = row / (resolution - 1)`, so index 0 is
/// the `(0, 0)` corner and the last index is `(1, 1)`.
#[derive(Debug, Clone, PartialEq)]
pub struct CandidateGrid {
    resolution: usize,
    points: Vec<Point2>,
}

impl CandidateGrid {
    pub fn new(resolution: usize) -> Result<Self, Error> {
        if resolution < 2 {
            return Err(Error::InvalidParameter(
                "grid resolution must be at least 2",
            ));
        }
        let step = 1.0 / (resolution - 1) as f64;
        let last = resolution - 1;
        let coord = |k: usize| if k == last { 1.0 } else { k as f64 * step };
        let mut points = Vec::with_capacity(resolution * resolution);
        for row in 0..resolution {
            for col in 0..resolution {
                points.push(Point2::new(coord(col), coord(row)));
            }
        }
        Ok(CandidateGrid { resolution, points })
    }

    pub fn resolution(&self) -> usize {
        self.resolution
    }

    pub fn spacing(&self) -> f64 {
        1.0 / (self.resolution - 1) as f64
    }

    pub fn points(&self) -> &[Point2] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn point(&self, index: usize) -> Point2 {
        self.points[index]
    }

    /// `(row, col)` of a flat index.
    pub fn row_col(&self, index: usize) -> (usize, usize) {
        (index / self.resolution, index % self.resolution)
    }

    /// Index of the grid point coinciding with `p`, if any.
    pub fn index_of(&self, p: Point2) -> Option<usize> {
        if !p.in_unit_square() {
            return None;
        }
        let scale = (self.resolution - 1) as f64;
        let col = libm::round(p.x * scale) as usize;
        let row = libm::round(p.y * scale) as usize;
        let idx = row * self.resolution + col;
        let q = self.points[idx];
        let tol = 1e-9 * self.spacing();
        ((q.x - p.x).abs() <= tol && (q.y - p.y).abs() <= tol).then_some(idx)
    }
}
