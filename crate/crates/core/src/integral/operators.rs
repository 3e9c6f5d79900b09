use num_complex::Complex64;
use rayon::prelude::*;

use super::cache::KernelCache;
use super::kernels::cauchy_kernel_components;
use crate::clifford::{Algebra, Multivector};
use crate::diff::dirac_apply;
use crate::error::{Error, Result};
use crate::field::{relative_residual, CliffordField};
use crate::grid::{boundary_faces, BoundaryFace, GridSpec};

/// Residuals of the integral identities are taken over nodes at least this
/// many cells away from the boundary.
pub const CORE_LAYER: usize = 3;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// `(sign, destination)` of `e_{k+1} · blade_b` for every generator and blade.
fn generator_left_table(alg: Algebra, dim: usize) -> Result<Vec<Vec<(f64, usize)>>> {
    (0..dim)
        .map(|k| {
            let e = Multivector::generator(alg, k + 1)?;
            Ok(alg
                .blades()
                .map(|b| {
                    let p = &e * &Multivector::basis(alg, b).expect("basis blade");
                    let (blade, c) = p.terms().next().expect("generator product is a single blade");
                    (c.re, alg.index_of(blade).expect("valid blade"))
                })
                .collect())
        })
        .collect()
}

fn check_spatial(f: &CliffordField, grid: &GridSpec) -> Result<()> {
    f.check_grid(grid)?;
    if f.algebra().n() < grid.dim() {
        return Err(Error::InvalidGenerator { index: grid.dim(), n: f.algebra().n() });
    }
    Ok(())
}

/// Teodorescu transform `Tf(x) = ∫_G e(x-y) f(y) dy` with a piecewise-constant
/// density on dual cells. Parallel over targets; each target sums its sources
/// in node order, so the result does not depend on the thread count.
pub fn teodorescu_apply(f: &CliffordField, cache: &KernelCache) -> Result<CliffordField> {
    let grid = cache.grid();
    check_spatial(f, grid)?;
    let alg = f.algebra();
    let dim = cache.dim();
    let support = f.support();
    let s = support.len();
    let mut out = CliffordField::zeros(grid, alg);
    if s == 0 {
        return Ok(out);
    }
    let nodes = grid.node_count();
    let mut packed = Vec::with_capacity(nodes * s);
    for node in 0..nodes {
        let c = f.node(node);
        packed.extend(support.iter().map(|&b| c[b]));
    }
    let src: Vec<usize> = (0..nodes).map(|j| cache.source_offset(j)).collect();
    let gen = generator_left_table(alg, dim)?;
    let table = cache.table();
    let stride = alg.basis_len();

    out.data_mut().par_chunks_mut(stride).enumerate().for_each(|(i, dst)| {
        let tgt = cache.target_offset(i);
        let mut acc = vec![ZERO; dim * s];
        for (j, &so) in src.iter().enumerate() {
            let at = (tgt + so) * dim;
            let w = &table[at..at + dim];
            let fj = &packed[j * s..(j + 1) * s];
            for (k, &wk) in w.iter().enumerate() {
                let row = &mut acc[k * s..(k + 1) * s];
                for (a, &v) in row.iter_mut().zip(fj) {
                    *a += v * wk;
                }
            }
        }
        for k in 0..dim {
            for (q, &b) in support.iter().enumerate() {
                let (sign, to) = gen[k][b];
                dst[to] += acc[k * s + q] * sign;
            }
        }
    });
    Ok(out)
}

/// Values of a field on the boundary nodes.
#[derive(Clone, Debug)]
pub struct BoundaryTrace {
    grid: GridSpec,
    alg: Algebra,
    values: CliffordField,
}

impl BoundaryTrace {
    pub fn of(f: &CliffordField) -> Self {
        let mut values = f.clone();
        for node in 0..f.node_count() {
            if !f.grid().is_boundary(node) {
                values.node_mut(node).fill(ZERO);
            }
        }
        Self { grid: f.grid().clone(), alg: f.algebra(), values }
    }

    /// Trace sampled from a function on the boundary nodes.
    pub fn from_fn(grid: &GridSpec, alg: Algebra, g: impl Fn(&[f64]) -> Multivector) -> Result<Self> {
        let mut values = CliffordField::zeros(grid, alg);
        for node in 0..grid.node_count() {
            if grid.is_boundary(node) {
                let x = grid.coords(node);
                values.set(node, &g(&x[..grid.dim()]))?;
            }
        }
        Ok(Self { grid: grid.clone(), alg, values })
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn algebra(&self) -> Algebra {
        self.alg
    }

    pub fn value(&self, node: usize) -> &[Complex64] {
        self.values.node(node)
    }
}

/// `Fg(x) = -∫_Γ e(x-y) n(y) g(y) dΓ_y` at the given targets (others left 0).
pub fn cauchy_boundary_apply(g: &BoundaryTrace, faces: &[BoundaryFace], targets: &[usize]) -> Result<CliffordField> {
    let grid = &g.grid;
    let dim = grid.dim();
    let alg = g.alg;
    if alg.n() < dim {
        return Err(Error::InvalidGenerator { index: dim, n: alg.n() });
    }
    if let Some(&t) = targets.iter().find(|&&t| t >= grid.node_count() || grid.is_boundary(t)) {
        return Err(Error::Singular(format!("target node {t} is not strictly interior")));
    }
    let b = alg.basis_len();
    // per face and kernel component k: -(e_{k+1} n) g(y) w
    let mut face_terms: Vec<(usize, Vec<Complex64>)> = Vec::with_capacity(faces.len());
    for face in faces {
        if face.node >= grid.node_count() || !grid.is_boundary(face.node) {
            return Err(Error::InvalidArgument(format!("face node {} is not on the boundary", face.node)));
        }
        let n = face.normal.embed(alg)?;
        let gy = Multivector::from_coeffs(alg, g.value(face.node).to_vec())?;
        let ng = &n * &gy;
        let mut m = Vec::with_capacity(dim * b);
        for k in 0..dim {
            let ek = Multivector::generator(alg, k + 1)?;
            m.extend((&ek * &ng).coeffs().iter().map(|c| -c * face.weight));
        }
        face_terms.push((face.node, m));
    }
    let mut out = CliffordField::zeros(grid, alg);
    let results: Vec<(usize, Vec<Complex64>)> = targets
        .par_iter()
        .map(|&t| {
            let x = grid.coords(t);
            let mut acc = vec![ZERO; b];
            let mut z = [0.0; 3];
            for (node, m) in &face_terms {
                let y = grid.coords(*node);
                for k in 0..dim {
                    z[k] = x[k] - y[k];
                }
                let e = cauchy_kernel_components(&z[..dim]).expect("target off the boundary");
                for (k, &ek) in e.iter().enumerate() {
                    for (a, &v) in acc.iter_mut().zip(&m[k * b..(k + 1) * b]) {
                        *a += v * ek;
                    }
                }
            }
            (t, acc)
        })
        .collect();
    for (t, v) in results {
        out.node_mut(t).copy_from_slice(&v);
    }
    Ok(out)
}

/// `F(tr f)` at every interior node.
pub fn cauchy_boundary_field(f: &CliffordField) -> Result<CliffordField> {
    let grid = f.grid();
    let faces = boundary_faces(grid)?;
    let targets: Vec<usize> = (0..grid.node_count()).filter(|&n| !grid.is_boundary(n)).collect();
    cauchy_boundary_apply(&BoundaryTrace::of(f), &faces, &targets)
}

fn check_core(grid: &GridSpec) -> Result<()> {
    if grid.counts().iter().any(|&c| c < 2 * CORE_LAYER + 1) {
        return Err(Error::GridTooSmall(format!("no nodes {CORE_LAYER} cells from the boundary")));
    }
    Ok(())
}

/// `||D(Tf) - f|| / ||f||` on the interior core.
pub fn right_inverse_residual(f: &CliffordField, cache: &KernelCache) -> Result<f64> {
    check_core(f.grid())?;
    let dtf = dirac_apply(&teodorescu_apply(f, cache)?)?;
    relative_residual(&dtf, f, CORE_LAYER)
}

/// `||F(tr f) + T(Df) - f|| / ||f||` on the interior core.
pub fn borel_pompeiu_residual(f: &CliffordField, cache: &KernelCache) -> Result<f64> {
    check_core(f.grid())?;
    let lhs = cauchy_boundary_field(f)?.add(&teodorescu_apply(&dirac_apply(f)?, cache)?)?;
    relative_residual(&lhs, f, CORE_LAYER)
}

/// `||F(tr Tf)|| / ||f||` on the interior core; small when traces of T lie in im Q.
pub fn im_q_residual(f: &CliffordField, cache: &KernelCache) -> Result<f64> {
    check_core(f.grid())?;
    let ft = cauchy_boundary_field(&teodorescu_apply(f, cache)?)?;
    let den = f.interior_rms(CORE_LAYER)?;
    let num = ft.interior_rms(CORE_LAYER)?;
    Ok(if den == 0.0 { 0.0 } else { num / den })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn plain(n: usize) -> Algebra {
        Algebra::plain(n).unwrap()
    }

    #[test]
    fn zero_and_linearity() {
        let g = GridSpec::unit(2, 12).unwrap();
        let c = KernelCache::build(&g).unwrap();
        let a = plain(2);
        assert_eq!(teodorescu_apply(&CliffordField::zeros(&g, a), &c).unwrap().max_abs(), 0.0);
        let f = CliffordField::scalar_from_fn(&g, a, |x| x[0] * x[1] + 1.0);
        let lam = Complex64::new(2.5, -1.0);
        let t1 = teodorescu_apply(&f.scale(lam), &c).unwrap();
        let t2 = teodorescu_apply(&f, &c).unwrap().scale(lam);
        assert!(t1.max_abs_diff(&t2).unwrap() < 1e-14);
    }

    #[test]
    fn scalar_data_maps_to_vectors() {
        let g = GridSpec::unit(2, 10).unwrap();
        let c = KernelCache::build(&g).unwrap();
        let f = CliffordField::scalar_from_fn(&g, plain(2), |x| (x[0] - x[1]).cos());
        assert!(teodorescu_apply(&f, &c).unwrap().is_grade1());
    }

    #[test]
    fn boundary_operator_reproduces_constants() {
        let g = GridSpec::unit(2, 32).unwrap();
        let one = CliffordField::constant(&g, &Multivector::one(plain(2)));
        let f1 = cauchy_boundary_field(&one).unwrap();
        assert!(relative_residual(&f1, &one, CORE_LAYER).unwrap() < 0.01);
        let zero = CliffordField::zeros(&g, plain(2));
        assert_eq!(cauchy_boundary_field(&zero).unwrap().max_abs(), 0.0);
    }

    #[test]
    fn boundary_target_rejected() {
        let g = GridSpec::unit(2, 9).unwrap();
        let tr = BoundaryTrace::from_fn(&g, plain(2), |_| Multivector::one(plain(2))).unwrap();
        let faces = boundary_faces(&g).unwrap();
        assert!(matches!(cauchy_boundary_apply(&tr, &faces, &[0]), Err(Error::Singular(_))));
    }

    #[test]
    fn grid_mismatch_rejected() {
        let c = KernelCache::build(&GridSpec::unit(2, 9).unwrap()).unwrap();
        let f = CliffordField::zeros(&GridSpec::unit(2, 10).unwrap(), plain(2));
        assert!(matches!(teodorescu_apply(&f, &c), Err(Error::GridMismatch(_))));
    }
}
