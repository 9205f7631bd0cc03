use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::em::{Aabb, Point};
use crate::error::{Error, Result};

/// Vertex lattice over an axis-aligned box, endpoints included: `[-2,2]²`
/// at spacing 0.01 has 401 points per axis. Linear index is row-major with
/// the last axis fastest.
#[derive(Debug, Clone, PartialEq)]
pub struct SamplingGrid {
    bounds: Aabb,
    spacing: f64,
    counts: [usize; 3],
}

impl SamplingGrid {
    pub fn new(bounds: Aabb, spacing: f64) -> Result<Self> {
        if !(spacing > 0.0 && spacing.is_finite()) {
            return Err(Error::DegenerateGrid(format!("spacing must be positive, got {spacing}")));
        }
        let mut counts = [1; 3];
        for (a, count) in counts.iter_mut().enumerate().take(bounds.dim) {
            let steps = bounds.extent(a) / spacing;
            let n = (steps + 1e-9).floor();
            if n < 1.0 {
                return Err(Error::DegenerateGrid(format!(
                    "spacing {spacing} exceeds the box extent along axis {a}"
                )));
            }
            *count = n as usize + 1;
        }
        Ok(Self { bounds, spacing, counts })
    }

    pub fn bounds(&self) -> &Aabb {
        &self.bounds
    }

    pub fn spacing(&self) -> f64 {
        self.spacing
    }

    pub fn dim(&self) -> usize {
        self.bounds.dim
    }

    pub fn counts(&self) -> &[usize] {
        &self.counts[..self.dim()]
    }

    pub fn len(&self) -> usize {
        self.counts.iter().product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn multi_index(&self, i: usize) -> [usize; 3] {
        let [_, n1, n2] = self.counts;
        [i / (n1 * n2), (i / n2) % n1, i % n2]
    }

    pub fn linear_index(&self, m: [usize; 3]) -> usize {
        (m[0] * self.counts[1] + m[1]) * self.counts[2] + m[2]
    }

    pub fn point(&self, i: usize) -> Point {
        let m = self.multi_index(i);
        let mut c = [0.0; 3];
        for (a, v) in c.iter_mut().enumerate().take(self.dim()) {
            *v = self.bounds.min[a] + m[a] as f64 * self.spacing;
        }
        Point::new(&c[..self.dim()]).expect("valid dimension")
    }

    pub fn points(&self) -> impl Iterator<Item = Point> + '_ {
        (0..self.len()).map(|i| self.point(i))
    }

    /// Indices of the existing lattice neighbours (8 in 2D, 26 in 3D).
    pub fn neighbours(&self, i: usize) -> impl Iterator<Item = usize> + '_ {
        let m = self.multi_index(i);
        let d = self.dim();
        let span = |a: usize| if a < d { -1i64..=1 } else { 0..=0 };
        let (s0, s1, s2) = (span(0), span(1), span(2));
        s0.flat_map(move |a| {
            let s2 = s2.clone();
            s1.clone().flat_map(move |b| s2.clone().map(move |c| [a, b, c]))
        })
        .filter(|o| *o != [0, 0, 0])
        .filter_map(move |o| {
            let mut q = [0usize; 3];
            for a in 0..3 {
                let v = m[a] as i64 + o[a];
                if v < 0 || v >= self.counts[a] as i64 {
                    return None;
                }
                q[a] = v as usize;
            }
            Some(self.linear_index(q))
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum IndexLabel {
    SinglePolarization { q: Vec<f64> },
    Combined,
    Map { name: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LocalMax {
    pub location: [f64; 3],
    pub value: f64,
    #[serde(skip)]
    pub index: usize,
}

/// Real values on a sampling grid.
#[derive(Debug, Clone, PartialEq)]
pub struct IndexGrid {
    grid: SamplingGrid,
    values: Vec<f64>,
    label: IndexLabel,
}

impl IndexGrid {
    pub fn new(grid: SamplingGrid, values: Vec<f64>, label: IndexLabel) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::DimensionMismatch { expected: grid.len(), found: values.len() });
        }
        Ok(Self { grid, values, label })
    }

    pub fn grid(&self) -> &SamplingGrid {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn label(&self) -> &IndexLabel {
        &self.label
    }

    pub fn max(&self) -> f64 {
        self.values.iter().cloned().fold(f64::NEG_INFINITY, f64::max)
    }

    /// First index attaining the maximum.
    pub fn argmax(&self) -> (Point, f64) {
        let mut best = 0;
        for (i, v) in self.values.iter().enumerate() {
            if *v > self.values[best] {
                best = i;
            }
        }
        (self.grid.point(best), self.values[best])
    }

    /// Copy scaled so the maximum is 1 (unchanged if the maximum is not positive).
    pub fn normalized(&self) -> IndexGrid {
        let m = self.max();
        let values = if m > 0.0 { self.values.iter().map(|v| v / m).collect() } else { self.values.clone() };
        IndexGrid { values, ..self.clone() }
    }

    /// Points whose value strictly exceeds every lattice neighbour and is at
    /// least `floor_fraction` of the global maximum, sorted by value,
    /// largest first.
    pub fn local_maxima(&self, floor_fraction: f64) -> Vec<LocalMax> {
        let floor = floor_fraction * self.max();
        let mut out: Vec<LocalMax> = (0..self.values.len())
            .filter(|&i| {
                let v = self.values[i];
                v >= floor && self.grid.neighbours(i).all(|j| self.values[j] < v)
            })
            .map(|i| {
                let p = self.grid.point(i);
                let mut location = [0.0; 3];
                location[..p.dim()].copy_from_slice(p.coords());
                LocalMax { location, value: self.values[i], index: i }
            })
            .collect();
        out.sort_by(|a, b| b.value.total_cmp(&a.value).then(a.index.cmp(&b.index)));
        out
    }

    /// Header `x1,..,xd,value`, one row per sampling point.
    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        let d = self.grid.dim();
        let header: Vec<String> = (1..=d).map(|i| format!("x{i}")).chain(["value".to_string()]).collect();
        writeln!(out, "{}", header.join(","))?;
        for (i, v) in self.values.iter().enumerate() {
            let p = self.grid.point(i);
            let mut row: Vec<String> = p.coords().iter().map(|c| format!("{c:.16e}")).collect();
            row.push(format!("{v:.16e}"));
            writeln!(out, "{}", row.join(","))?;
        }
        Ok(())
    }

    /// Binary 16-bit PGM of the `x1`–`x2` plane (in 3D, the plane through
    /// the argmax). Columns run along `x1`, the top row is the largest `x2`,
    /// and `[0, max]` maps linearly onto `[0, 65535]`.
    pub fn write_pgm<W: Write>(&self, mut out: W) -> Result<()> {
        let n = self.grid.counts3();
        let k = if self.grid.dim() == 3 {
            let (p, _) = self.argmax();
            ((p.coords()[2] - self.grid.bounds.min[2]) / self.grid.spacing).round() as usize
        } else {
            0
        };
        let m = self.max();
        write!(out, "P5\n{} {}\n65535\n", n[0], n[1])?;
        let mut bytes = Vec::with_capacity(2 * n[0] * n[1]);
        for row in (0..n[1]).rev() {
            for col in 0..n[0] {
                let v = self.values[self.grid.linear_index([col, row, k])];
                let level = if m > 0.0 { (v.max(0.0) / m * 65535.0).round().min(65535.0) as u16 } else { 0 };
                bytes.extend_from_slice(&level.to_be_bytes());
            }
        }
        out.write_all(&bytes)?;
        Ok(())
    }
}

impl SamplingGrid {
    pub(crate) fn counts3(&self) -> [usize; 3] {
        self.counts
    }
}
