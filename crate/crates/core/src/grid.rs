//! Axis-aligned box grids and their boundary faces.

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::clifford::{Algebra, Multivector};
use crate::error::{Error, Result};

/// Up to three spatial axes plus a time axis.
pub const MAX_DIM: usize = 4;
pub const MIN_COUNT: usize = 8;

#[derive(Serialize, Deserialize)]
struct GridSpecRepr {
    origin: Vec<f64>,
    extents: Vec<f64>,
    counts: Vec<usize>,
}

/// Uniform tensor grid on `origin + [0, extents]`. Axis 0 varies slowest.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "GridSpecRepr", into = "GridSpecRepr")]
pub struct GridSpec {
    origin: Vec<f64>,
    extents: Vec<f64>,
    counts: Vec<usize>,
}

impl TryFrom<GridSpecRepr> for GridSpec {
    type Error = Error;
    fn try_from(r: GridSpecRepr) -> Result<Self> {
        GridSpec::new(r.origin, r.extents, r.counts)
    }
}

impl From<GridSpec> for GridSpecRepr {
    fn from(g: GridSpec) -> Self {
        GridSpecRepr { origin: g.origin, extents: g.extents, counts: g.counts }
    }
}

impl GridSpec {
    pub fn new(origin: Vec<f64>, extents: Vec<f64>, counts: Vec<usize>) -> Result<Self> {
        let d = counts.len();
        if d == 0 || d > MAX_DIM {
            return Err(Error::InvalidGrid(format!("dimension {d} outside 1..={MAX_DIM}")));
        }
        if origin.len() != d || extents.len() != d {
            return Err(Error::InvalidGrid("origin, extents and counts differ in length".into()));
        }
        if let Some(c) = counts.iter().find(|&&c| c < MIN_COUNT) {
            return Err(Error::GridTooSmall(format!("node count {c} < {MIN_COUNT}")));
        }
        if extents.iter().any(|&e| !(e > 0.0 && e.is_finite())) || origin.iter().any(|o| !o.is_finite()) {
            return Err(Error::InvalidGrid("extents must be positive and finite".into()));
        }
        Ok(Self { origin, extents, counts })
    }

    /// `[0,1]^dim` with `count` nodes per axis.
    pub fn unit(dim: usize, count: usize) -> Result<Self> {
        Self::new(vec![0.0; dim], vec![1.0; dim], vec![count; dim])
    }

    /// `[lo,hi]^dim` with `count` nodes per axis.
    pub fn cube(dim: usize, lo: f64, hi: f64, count: usize) -> Result<Self> {
        Self::new(vec![lo; dim], vec![hi - lo; dim], vec![count; dim])
    }

    pub fn dim(&self) -> usize {
        self.counts.len()
    }

    pub fn origin(&self) -> &[f64] {
        &self.origin
    }

    pub fn extents(&self) -> &[f64] {
        &self.extents
    }

    pub fn counts(&self) -> &[usize] {
        &self.counts
    }

    pub fn spacing(&self, axis: usize) -> f64 {
        self.extents[axis] / (self.counts[axis] - 1) as f64
    }

    pub fn spacings(&self) -> Vec<f64> {
        (0..self.dim()).map(|a| self.spacing(a)).collect()
    }

    /// Largest spacing, used as "h" in refinement studies.
    pub fn h(&self) -> f64 {
        (0..self.dim()).map(|a| self.spacing(a)).fold(0.0, f64::max)
    }

    pub fn node_count(&self) -> usize {
        self.counts.iter().product()
    }

    pub fn stride(&self, axis: usize) -> usize {
        self.counts[axis + 1..].iter().product()
    }

    pub fn multi_index(&self, mut node: usize) -> [usize; MAX_DIM] {
        let mut idx = [0; MAX_DIM];
        for a in (0..self.dim()).rev() {
            idx[a] = node % self.counts[a];
            node /= self.counts[a];
        }
        idx
    }

    pub fn node_index(&self, idx: &[usize]) -> usize {
        idx.iter().zip(&self.counts).fold(0, |acc, (&i, &c)| acc * c + i)
    }

    pub fn coord(&self, axis: usize, i: usize) -> f64 {
        self.origin[axis] + i as f64 * self.spacing(axis)
    }

    pub fn coords(&self, node: usize) -> [f64; MAX_DIM] {
        let idx = self.multi_index(node);
        let mut x = [0.0; MAX_DIM];
        for a in 0..self.dim() {
            x[a] = self.coord(a, idx[a]);
        }
        x
    }

    /// Distance to the boundary in index units (0 on the boundary).
    pub fn layer(&self, node: usize) -> usize {
        let idx = self.multi_index(node);
        (0..self.dim()).map(|a| idx[a].min(self.counts[a] - 1 - idx[a])).min().unwrap_or(0)
    }

    pub fn is_boundary(&self, node: usize) -> bool {
        self.layer(node) == 0
    }

    /// Trapezoid weight of index `i` along `axis`, including the spacing.
    pub fn axis_weight(&self, axis: usize, i: usize) -> f64 {
        let h = self.spacing(axis);
        if i == 0 || i == self.counts[axis] - 1 {
            0.5 * h
        } else {
            h
        }
    }

    /// Tensor trapezoid quadrature weight of a node.
    pub fn node_weight(&self, node: usize) -> f64 {
        let idx = self.multi_index(node);
        (0..self.dim()).map(|a| self.axis_weight(a, idx[a])).product()
    }

    /// Nearest node to a point, if it lies within half a cell of one.
    pub fn locate(&self, x: &[f64]) -> Option<usize> {
        let mut idx = [0usize; MAX_DIM];
        for a in 0..self.dim() {
            let t = (x[a] - self.origin[a]) / self.spacing(a);
            let r = t.round();
            if !(r >= 0.0 && r < self.counts[a] as f64) || (t - r).abs() > 1e-6 {
                return None;
            }
            idx[a] = r as usize;
        }
        Some(self.node_index(&idx[..self.dim()]))
    }

    /// Hex sha256 of the canonical JSON form.
    pub fn hash(&self) -> String {
        let json = serde_json::to_vec(self).expect("grid serializes");
        hex(&Sha256::digest(&json))
    }

    /// Same box with a different node count on every axis.
    pub fn with_count(&self, count: usize) -> Result<Self> {
        Self::new(self.origin.clone(), self.extents.clone(), vec![count; self.dim()])
    }
}

pub(crate) fn hex(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}

/// One side of the box seen from one boundary node.
#[derive(Clone, Debug, PartialEq)]
pub struct BoundaryFace {
    pub node: usize,
    pub axis: usize,
    /// +1 or -1: direction of the outward normal along `axis`.
    pub orientation: f64,
    /// Unit outward normal in Cl(0, dim).
    pub normal: Multivector,
    /// Surface measure carried by this face (product of tangential trapezoid weights).
    pub weight: f64,
}

#[derive(Clone, Debug)]
pub struct GridGeometry {
    /// Node coordinates, `dim` per node.
    pub coords: Vec<f64>,
    pub interior: Vec<bool>,
    pub faces: Vec<BoundaryFace>,
}

/// Boundary faces: one per boundary node and box side it lies on.
pub fn boundary_faces(spec: &GridSpec) -> Result<Vec<BoundaryFace>> {
    let d = spec.dim();
    let alg = Algebra::plain(d)?;
    let mut faces = Vec::new();
    for node in 0..spec.node_count() {
        let idx = spec.multi_index(node);
        for axis in 0..d {
            let last = spec.counts()[axis] - 1;
            for (hit, orientation) in [(idx[axis] == 0, -1.0), (idx[axis] == last, 1.0)] {
                if !hit {
                    continue;
                }
                let mut n = vec![0.0; d];
                n[axis] = orientation;
                let weight = (0..d).filter(|&a| a != axis).map(|a| spec.axis_weight(a, idx[a])).product();
                faces.push(BoundaryFace {
                    node,
                    axis,
                    orientation,
                    normal: Multivector::vector(alg, &n)?,
                    weight,
                });
            }
        }
    }
    Ok(faces)
}

pub fn build_grid(spec: &GridSpec) -> Result<GridGeometry> {
    let d = spec.dim();
    let mut coords = Vec::with_capacity(spec.node_count() * d);
    let mut interior = Vec::with_capacity(spec.node_count());
    for node in 0..spec.node_count() {
        coords.extend_from_slice(&spec.coords(node)[..d]);
        interior.push(!spec.is_boundary(node));
    }
    Ok(GridGeometry { coords, interior, faces: boundary_faces(spec)? })
}
