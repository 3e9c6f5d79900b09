//! Precomputed cell integrals of the Cauchy kernel.
//!
//! The weight of source node `j` seen from target `i` is
//! `∫_{cell_j} e(x_i - y) dy`, where `cell_j` is the dual cell of `j`
//! clipped to the box. It depends only on the offset `i - j` and on which
//! sides the cell is clipped, so the table is indexed by (clip pattern, offset).

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Read, Write};
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::cell::kernel_box_integral;
use super::kernels::unit_sphere_area;
use crate::error::{Error, Result};
use crate::grid::GridSpec;

const FORMAT: &str = "miura-kernel-cache";
const VERSION: u32 = 1;

#[derive(Clone, Debug)]
pub struct KernelCache {
    grid: GridSpec,
    dim: usize,
    offset_dims: Vec<usize>,
    offset_strides: Vec<usize>,
    n_offsets: usize,
    table: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
struct Header {
    format: String,
    version: u32,
    grid_hash: String,
    n: usize,
    layout: String,
    patterns: usize,
    offset_dims: Vec<usize>,
    components: usize,
    entries: usize,
}

/// Clip state of a node's dual cell along one axis: 0 full, 1 lower end, 2 upper end.
fn clip_state(i: usize, count: usize) -> usize {
    if i == 0 {
        1
    } else if i == count - 1 {
        2
    } else {
        0
    }
}

impl KernelCache {
    /// Builds the table for a 2D or 3D grid. Parallel over table rows.
    pub fn build(grid: &GridSpec) -> Result<Self> {
        let mut cache = Self::empty(grid)?;
        let dim = cache.dim;
        let h = grid.spacings();
        let counts = grid.counts().to_vec();
        let scale = -1.0 / unit_sphere_area(dim);
        let n_off = cache.n_offsets;
        let offset_dims = cache.offset_dims.clone();
        let strides = cache.offset_strides.clone();

        cache.table.par_chunks_mut(dim).enumerate().for_each(|(row, out)| {
            let (pattern, off) = (row / n_off, row % n_off);
            let mut lo = [0.0; 3];
            let mut hi = [0.0; 3];
            let mut p = pattern;
            for k in 0..dim {
                let state = p % 3;
                p /= 3;
                let d = ((off / strides[k]) % offset_dims[k]) as isize - (counts[k] as isize - 1);
                let feasible = match state {
                    1 => d >= 0,
                    2 => d <= 0,
                    _ => true,
                };
                if !feasible {
                    return;
                }
                // source cell relative to its node
                let (clo, chi) = match state {
                    1 => (0.0, 0.5 * h[k]),
                    2 => (-0.5 * h[k], 0.0),
                    _ => (-0.5 * h[k], 0.5 * h[k]),
                };
                let x = d as f64 * h[k];
                lo[k] = x - chi;
                hi[k] = x - clo;
            }
            let v = kernel_box_integral(&lo[..dim], &hi[..dim]);
            for k in 0..dim {
                out[k] = scale * v[k];
            }
        });

        // Full cells: exact antisymmetry and a zero self cell.
        let mid = &mut cache.table[..n_off * dim];
        for o in 0..n_off {
            let mirror = n_off - 1 - o;
            match o.cmp(&mirror) {
                std::cmp::Ordering::Equal => mid[o * dim..(o + 1) * dim].fill(0.0),
                std::cmp::Ordering::Greater => {
                    for k in 0..dim {
                        mid[o * dim + k] = -mid[mirror * dim + k];
                    }
                }
                std::cmp::Ordering::Less => {}
            }
        }
        Ok(cache)
    }

    fn empty(grid: &GridSpec) -> Result<Self> {
        let dim = grid.dim();
        if !(2..=3).contains(&dim) {
            return Err(Error::InvalidGrid(format!("kernel cache needs a 2D or 3D grid, got {dim}D")));
        }
        let offset_dims: Vec<usize> = grid.counts().iter().map(|&c| 2 * c - 1).collect();
        let mut offset_strides = vec![1; dim];
        for k in (0..dim - 1).rev() {
            offset_strides[k] = offset_strides[k + 1] * offset_dims[k + 1];
        }
        let n_offsets: usize = offset_dims.iter().product();
        let patterns = 3usize.pow(dim as u32);
        Ok(Self {
            grid: grid.clone(),
            dim,
            offset_dims,
            offset_strides,
            n_offsets,
            table: vec![0.0; patterns * n_offsets * dim],
        })
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn table_len(&self) -> usize {
        self.table.len()
    }

    pub(crate) fn table(&self) -> &[f64] {
        &self.table
    }

    /// Table position offset contributed by a target node.
    pub(crate) fn target_offset(&self, node: usize) -> usize {
        let idx = self.grid.multi_index(node);
        (0..self.dim).map(|k| idx[k] * self.offset_strides[k]).sum()
    }

    /// Table position offset contributed by a source node (pattern and reflection).
    pub(crate) fn source_offset(&self, node: usize) -> usize {
        let idx = self.grid.multi_index(node);
        let counts = self.grid.counts();
        let mut pattern = 0;
        let mut base = 0;
        for k in (0..self.dim).rev() {
            pattern = pattern * 3 + clip_state(idx[k], counts[k]);
        }
        for k in 0..self.dim {
            base += (counts[k] - 1 - idx[k]) * self.offset_strides[k];
        }
        pattern * self.n_offsets + base
    }

    /// Weight vector (one entry per kernel component) of source `j` at target `i`.
    pub fn entry(&self, target: usize, source: usize) -> &[f64] {
        let at = (self.target_offset(target) + self.source_offset(source)) * self.dim;
        &self.table[at..at + self.dim]
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let mut w = BufWriter::new(File::create(path)?);
        let header = Header {
            format: FORMAT.into(),
            version: VERSION,
            grid_hash: self.grid.hash(),
            n: self.dim,
            layout: "pattern-offset-component".into(),
            patterns: 3usize.pow(self.dim as u32),
            offset_dims: self.offset_dims.clone(),
            components: self.dim,
            entries: self.table.len(),
        };
        serde_json::to_writer(&mut w, &header)?;
        w.write_all(b"\n")?;
        for v in &self.table {
            w.write_all(&v.to_le_bytes())?;
        }
        w.flush()?;
        Ok(())
    }

    /// Loads a cache written by [`save`](Self::save); the grid must match.
    pub fn load(path: impl AsRef<Path>, grid: &GridSpec) -> Result<Self> {
        let mut r = BufReader::new(File::open(path)?);
        let mut line = String::new();
        r.read_line(&mut line)?;
        let header: Header = serde_json::from_str(line.trim_end())?;
        if header.format != FORMAT || header.version != VERSION {
            return Err(Error::Parse("not a kernel cache file".into()));
        }
        if header.grid_hash != grid.hash() {
            return Err(Error::GridMismatch("cache was built for a different grid".into()));
        }
        let mut cache = Self::empty(grid)?;
        if header.entries != cache.table.len() {
            return Err(Error::Parse("cache length does not match grid".into()));
        }
        let mut buf = [0u8; 8];
        for v in cache.table.iter_mut() {
            r.read_exact(&mut buf)?;
            *v = f64::from_le_bytes(buf);
        }
        Ok(cache)
    }
}
