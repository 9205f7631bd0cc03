use crate::em::{ContrastField, Point};
use crate::error::{Error, Result};

/// Uniform tensor grid of cubical cells; nodes sit at cell centers.
/// Linear node index is row-major with the last axis fastest.
#[derive(Debug, Clone, PartialEq)]
pub struct VolumeGrid {
    mesh_size: f64,
    origin: [f64; 3],
    counts: [usize; 3],
    dim: usize,
}

impl VolumeGrid {
    /// `origin` is the lower corner of the first cell.
    pub fn new(origin: &Point, mesh_size: f64, counts: &[usize]) -> Result<Self> {
        if counts.len() != origin.dim() {
            return Err(Error::DimensionMismatch {
                expected: origin.dim(),
                found: counts.len(),
            });
        }
        if !(mesh_size > 0.0) || counts.contains(&0) {
            return Err(Error::DegenerateGrid(format!(
                "mesh size {mesh_size}, counts {counts:?}"
            )));
        }
        let mut c = [1; 3];
        c[..counts.len()].copy_from_slice(counts);
        let mut o = [0.0; 3];
        o[..origin.dim()].copy_from_slice(origin.coords());
        Ok(Self {
            mesh_size,
            origin: o,
            counts: c,
            dim: origin.dim(),
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn mesh_size(&self) -> f64 {
        self.mesh_size
    }

    pub fn origin(&self) -> Point {
        Point::new(&self.origin[..self.dim]).expect("valid dimension")
    }

    pub fn counts(&self) -> &[usize] {
        &self.counts[..self.dim]
    }

    pub(crate) fn counts3(&self) -> [usize; 3] {
        self.counts
    }

    pub fn cell_measure(&self) -> f64 {
        self.mesh_size.powi(self.dim as i32)
    }

    pub fn len(&self) -> usize {
        self.counts.iter().product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn multi_index(&self, index: usize) -> [usize; 3] {
        let [_, n1, n2] = self.counts;
        [index / (n1 * n2), (index / n2) % n1, index % n2]
    }

    pub fn linear_index(&self, idx: [usize; 3]) -> usize {
        (idx[0] * self.counts[1] + idx[1]) * self.counts[2] + idx[2]
    }

    pub fn node(&self, index: usize) -> Point {
        let m = self.multi_index(index);
        let mut c = [0.0; 3];
        for a in 0..self.dim {
            c[a] = self.origin[a] + (m[a] as f64 + 0.5) * self.mesh_size;
        }
        Point::new(&c[..self.dim]).expect("valid dimension")
    }

    pub fn nodes(&self) -> impl Iterator<Item = Point> + '_ {
        (0..self.len()).map(|i| self.node(i))
    }

    /// Closed box covered by the cells.
    pub fn extent(&self) -> ([f64; 3], [f64; 3]) {
        let mut hi = self.origin;
        for a in 0..self.dim {
            hi[a] += self.counts[a] as f64 * self.mesh_size;
        }
        (self.origin, hi)
    }

    /// Grid grown by `layers` empty cells on every side.
    pub fn padded(&self, layers: usize) -> Self {
        let mut out = self.clone();
        for a in 0..self.dim {
            out.origin[a] -= layers as f64 * self.mesh_size;
            out.counts[a] += 2 * layers;
        }
        out
    }
}

/// Smallest cell-centered grid of mesh size `h` whose cells cover the
/// contrast's bounding box, centered on that box.
pub fn build_grid(contrast: &ContrastField, h: f64) -> Result<VolumeGrid> {
    let bbox = contrast
        .bounding_box()
        .ok_or_else(|| Error::DegenerateGrid("contrast has no shapes".into()))?;
    if !(h > 0.0 && h.is_finite()) {
        return Err(Error::DegenerateGrid(format!("mesh size must be positive, got {h}")));
    }
    let dim = bbox.dim;
    let mut counts = vec![0usize; dim];
    let mut origin = vec![0.0; dim];
    for a in 0..dim {
        let extent = bbox.extent(a);
        if h > extent * (1.0 + 1e-12) {
            return Err(Error::DegenerateGrid(format!(
                "mesh size {h} exceeds the scatterer extent {extent} along axis {a}"
            )));
        }
        let n = (extent / h - 1e-9).ceil().max(1.0) as usize;
        counts[a] = n;
        let center = 0.5 * (bbox.min[a] + bbox.max[a]);
        origin[a] = center - 0.5 * n as f64 * h;
    }
    VolumeGrid::new(&Point::new(&origin)?, h, &counts)
}
