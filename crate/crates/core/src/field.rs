//! Multivector-valued grid functions, finite-difference partials and the
//! component-sum Lp / W1p norms.

use std::io::{BufRead, Write};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::clifford::{multiplication_entries, Algebra, BladeIndex, Multivector, ProductTable};
use crate::error::{Error, Result};
use crate::grid::GridSpec;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Node-major dense storage: `basis_len` coefficients per node.
#[derive(Clone, Debug, PartialEq)]
pub struct CliffordField {
    grid: GridSpec,
    alg: Algebra,
    data: Vec<Complex64>,
}

/// Sidecar metadata written next to a CSV dump.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FieldMeta {
    pub grid: GridSpec,
    pub n: usize,
    pub witt: bool,
}

impl CliffordField {
    pub fn zeros(grid: &GridSpec, alg: Algebra) -> Self {
        Self { grid: grid.clone(), alg, data: vec![ZERO; grid.node_count() * alg.basis_len()] }
    }

    pub fn from_raw(grid: &GridSpec, alg: Algebra, data: Vec<Complex64>) -> Result<Self> {
        if data.len() != grid.node_count() * alg.basis_len() {
            return Err(Error::InvalidArgument("field data length does not match grid".into()));
        }
        Ok(Self { grid: grid.clone(), alg, data })
    }

    /// Pointwise sampling of a multivector-valued function.
    pub fn from_fn(grid: &GridSpec, alg: Algebra, f: impl Fn(&[f64]) -> Multivector) -> Result<Self> {
        let mut out = Self::zeros(grid, alg);
        for node in 0..grid.node_count() {
            let x = grid.coords(node);
            out.set(node, &f(&x[..grid.dim()]))?;
        }
        Ok(out)
    }

    /// `f(x) e0`.
    pub fn scalar_from_fn(grid: &GridSpec, alg: Algebra, f: impl Fn(&[f64]) -> f64) -> Self {
        let mut out = Self::zeros(grid, alg);
        let b = alg.basis_len();
        for node in 0..grid.node_count() {
            let x = grid.coords(node);
            out.data[node * b] = Complex64::new(f(&x[..grid.dim()]), 0.0);
        }
        out
    }

    /// `Σ_j f_j(x) e_j` from a function returning the components.
    pub fn vector_from_fn(grid: &GridSpec, alg: Algebra, f: impl Fn(&[f64]) -> Vec<f64>) -> Result<Self> {
        let mut out = Self::zeros(grid, alg);
        let b = alg.basis_len();
        for node in 0..grid.node_count() {
            let x = grid.coords(node);
            let v = f(&x[..grid.dim()]);
            if v.len() > alg.n() {
                return Err(Error::InvalidGenerator { index: v.len(), n: alg.n() });
            }
            for (j, vj) in v.into_iter().enumerate() {
                out.data[node * b + (1 << j)] = Complex64::new(vj, 0.0);
            }
        }
        Ok(out)
    }

    /// Constant field.
    pub fn constant(grid: &GridSpec, value: &Multivector) -> Self {
        let alg = value.algebra();
        let mut data = Vec::with_capacity(grid.node_count() * alg.basis_len());
        for _ in 0..grid.node_count() {
            data.extend_from_slice(value.coeffs());
        }
        Self { grid: grid.clone(), alg, data }
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn algebra(&self) -> Algebra {
        self.alg
    }

    pub fn data(&self) -> &[Complex64] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [Complex64] {
        &mut self.data
    }

    pub fn node_count(&self) -> usize {
        self.grid.node_count()
    }

    pub fn stride(&self) -> usize {
        self.alg.basis_len()
    }

    pub fn node(&self, node: usize) -> &[Complex64] {
        let b = self.stride();
        &self.data[node * b..(node + 1) * b]
    }

    pub fn node_mut(&mut self, node: usize) -> &mut [Complex64] {
        let b = self.stride();
        &mut self.data[node * b..(node + 1) * b]
    }

    pub fn get(&self, node: usize) -> Multivector {
        Multivector::from_coeffs(self.alg, self.node(node).to_vec()).expect("stride matches algebra")
    }

    pub fn set(&mut self, node: usize, value: &Multivector) -> Result<()> {
        self.alg.check_same(&value.algebra())?;
        self.node_mut(node).copy_from_slice(value.coeffs());
        Ok(())
    }

    /// Values of one blade at every node.
    pub fn component(&self, blade: BladeIndex) -> Result<Vec<Complex64>> {
        let k = self.alg.index_of(blade)?;
        Ok(self.data.chunks(self.stride()).map(|c| c[k]).collect())
    }

    pub(crate) fn check_compatible(&self, other: &CliffordField) -> Result<()> {
        if self.grid != other.grid {
            return Err(Error::GridMismatch("fields live on different grids".into()));
        }
        self.alg.check_same(&other.alg)
    }

    pub fn check_grid(&self, grid: &GridSpec) -> Result<()> {
        if &self.grid != grid {
            return Err(Error::GridMismatch("field grid differs from operator grid".into()));
        }
        Ok(())
    }

    fn zip_with(&self, other: &CliffordField, op: impl Fn(Complex64, Complex64) -> Complex64) -> Result<Self> {
        self.check_compatible(other)?;
        let data = self.data.iter().zip(&other.data).map(|(&a, &b)| op(a, b)).collect();
        Ok(Self { grid: self.grid.clone(), alg: self.alg, data })
    }

    pub fn add(&self, other: &CliffordField) -> Result<Self> {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &CliffordField) -> Result<Self> {
        self.zip_with(other, |a, b| a - b)
    }

    pub fn scale(&self, c: impl Into<Complex64>) -> Self {
        let c = c.into();
        Self { grid: self.grid.clone(), alg: self.alg, data: self.data.iter().map(|x| x * c).collect() }
    }

    /// `self += c * other`
    pub fn axpy(&mut self, c: impl Into<Complex64>, other: &CliffordField) -> Result<()> {
        self.check_compatible(other)?;
        let c = c.into();
        for (a, b) in self.data.iter_mut().zip(&other.data) {
            *a += c * b;
        }
        Ok(())
    }

    /// Pointwise geometric product `self(x) other(x)`.
    pub fn product(&self, other: &CliffordField) -> Result<Self> {
        self.check_compatible(other)?;
        let table = ProductTable::new(self.alg);
        let mut out = Self::zeros(&self.grid, self.alg);
        let b = self.stride();
        for node in 0..self.node_count() {
            let r = node * b..(node + 1) * b;
            table.mul_add(&self.data[r.clone()], &other.data[r.clone()], &mut out.data[r]);
        }
        Ok(out)
    }

    /// `c f(x)` for a constant multivector `c`.
    pub fn left_mul(&self, c: &Multivector) -> Result<Self> {
        self.mul_const(c, true)
    }

    /// `f(x) c` for a constant multivector `c`.
    pub fn right_mul(&self, c: &Multivector) -> Result<Self> {
        self.mul_const(c, false)
    }

    fn mul_const(&self, c: &Multivector, left: bool) -> Result<Self> {
        self.alg.check_same(&c.algebra())?;
        let entries = multiplication_entries(c, left);
        let mut out = Self::zeros(&self.grid, self.alg);
        let b = self.stride();
        for (src, dst) in self.data.chunks(b).zip(out.data.chunks_mut(b)) {
            for &(j, k, s) in &entries {
                dst[k] += s * src[j];
            }
        }
        Ok(out)
    }

    /// Same values viewed in a larger algebra.
    pub fn embed(&self, target: Algebra) -> Result<Self> {
        if target.n() < self.alg.n() || (self.alg.witt_enabled() && !target.witt_enabled()) {
            return Err(Error::AlgebraMismatch { left: self.alg.to_string(), right: target.to_string() });
        }
        let mut out = Self::zeros(&self.grid, target);
        let map: Vec<usize> = self.alg.blades().map(|bl| target.index_of(bl)).collect::<Result<_>>()?;
        let (b, tb) = (self.stride(), target.basis_len());
        for node in 0..self.node_count() {
            for (k, &m) in map.iter().enumerate() {
                out.data[node * tb + m] = self.data[node * b + k];
            }
        }
        Ok(out)
    }

    /// Nodal values of a real scalar field.
    pub fn real_scalar_values(&self) -> Result<Vec<f64>> {
        let b = self.stride();
        self.data
            .chunks(b)
            .map(|c| {
                if c[0].im != 0.0 || c[1..].iter().any(|&x| x != ZERO) {
                    Err(Error::NotScalar)
                } else {
                    Ok(c[0].re)
                }
            })
            .collect()
    }

    /// Components `a_j` (axis-major: `out[j][node]`) of a real grade-1 field.
    pub fn real_vector_components(&self) -> Result<Vec<Vec<f64>>> {
        let b = self.stride();
        let n = self.alg.n();
        let mut out = vec![vec![0.0; self.node_count()]; n];
        for (node, c) in self.data.chunks(b).enumerate() {
            for (k, &x) in c.iter().enumerate() {
                if k.is_power_of_two() && k < (1 << n) {
                    if x.im != 0.0 {
                        return Err(Error::NotAVector);
                    }
                    out[k.trailing_zeros() as usize][node] = x.re;
                } else if x != ZERO {
                    return Err(Error::NotAVector);
                }
            }
        }
        Ok(out)
    }

    /// True when every nonzero coefficient sits on a grade-1 Euclidean blade.
    pub fn is_grade1(&self) -> bool {
        let b = self.stride();
        let n = self.alg.n();
        self.data
            .chunks(b)
            .all(|c| c.iter().enumerate().all(|(k, &x)| x == ZERO || (k.is_power_of_two() && k < (1 << n))))
    }

    /// Blades carrying a nonzero coefficient somewhere.
    pub fn support(&self) -> Vec<usize> {
        let b = self.stride();
        (0..b).filter(|&k| self.data.chunks(b).any(|c| c[k] != ZERO)).collect()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    pub fn max_abs_diff(&self, other: &CliffordField) -> Result<f64> {
        self.check_compatible(other)?;
        Ok(self.data.iter().zip(&other.data).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max))
    }

    /// Largest difference over nodes at least `min_layer` cells from the boundary.
    pub fn max_abs_diff_inner(&self, other: &CliffordField, min_layer: usize) -> Result<f64> {
        self.check_compatible(other)?;
        let b = self.stride();
        let mut m = 0.0f64;
        for node in 0..self.node_count() {
            if self.grid.layer(node) < min_layer {
                continue;
            }
            for k in node * b..(node + 1) * b {
                m = m.max((self.data[k] - other.data[k]).norm());
            }
        }
        Ok(m)
    }

    /// Root mean square of the coefficient norm over nodes at least
    /// `min_layer` cells from the boundary.
    pub fn interior_rms(&self, min_layer: usize) -> Result<f64> {
        let b = self.stride();
        let mut sum = 0.0;
        let mut count = 0usize;
        for node in 0..self.node_count() {
            if self.grid.layer(node) < min_layer {
                continue;
            }
            sum += self.data[node * b..(node + 1) * b].iter().map(|c| c.norm_sqr()).sum::<f64>();
            count += 1;
        }
        if count == 0 {
            return Err(Error::GridTooSmall(format!("no nodes at depth {min_layer}")));
        }
        Ok((sum / count as f64).sqrt())
    }

    /// Second-order first partial along `axis`: central inside, one-sided at the ends.
    pub fn partial(&self, axis: usize) -> Result<Self> {
        self.check_axis(axis)?;
        let g = &self.grid;
        let (n, s, b) = (g.counts()[axis], g.stride(axis) * self.stride(), self.stride());
        let inv = 1.0 / (2.0 * g.spacing(axis));
        let mut out = Self::zeros(g, self.alg);
        let u = &self.data;
        for node in 0..self.node_count() {
            let i = g.multi_index(node)[axis];
            let base = node * b;
            for k in base..base + b {
                out.data[k] = if i == 0 {
                    (-3.0 * u[k] + 4.0 * u[k + s] - u[k + 2 * s]) * inv
                } else if i == n - 1 {
                    (3.0 * u[k] - 4.0 * u[k - s] + u[k - 2 * s]) * inv
                } else {
                    (u[k + s] - u[k - s]) * inv
                };
            }
        }
        Ok(out)
    }

    /// Compact second partial along `axis`; second-order one-sided rows at the ends.
    pub fn second_partial(&self, axis: usize) -> Result<Self> {
        self.check_axis(axis)?;
        let g = &self.grid;
        let (n, s, b) = (g.counts()[axis], g.stride(axis) * self.stride(), self.stride());
        let h = g.spacing(axis);
        let inv = 1.0 / (h * h);
        let mut out = Self::zeros(g, self.alg);
        let u = &self.data;
        for node in 0..self.node_count() {
            let i = g.multi_index(node)[axis];
            let base = node * b;
            for k in base..base + b {
                out.data[k] = if i == 0 {
                    (2.0 * u[k] - 5.0 * u[k + s] + 4.0 * u[k + 2 * s] - u[k + 3 * s]) * inv
                } else if i == n - 1 {
                    (2.0 * u[k] - 5.0 * u[k - s] + 4.0 * u[k - 2 * s] - u[k - 3 * s]) * inv
                } else {
                    (u[k + s] - 2.0 * u[k] + u[k - s]) * inv
                };
            }
        }
        Ok(out)
    }

    fn check_axis(&self, axis: usize) -> Result<()> {
        if axis >= self.grid.dim() {
            return Err(Error::InvalidArgument(format!("axis {axis} outside grid dimension {}", self.grid.dim())));
        }
        Ok(())
    }

    /// `Σ_A ||f_A||_p^p` split by component, in a fixed node order.
    fn component_pth_powers(&self, p: f64) -> Vec<f64> {
        let b = self.stride();
        let mut acc = vec![0.0; b];
        for node in 0..self.node_count() {
            let w = self.grid.node_weight(node);
            for (a, c) in acc.iter_mut().zip(self.node(node)) {
                *a += w * c.norm().powf(p);
            }
        }
        acc
    }

    /// `sqrt(Σ_A ||f_A||_p^2)` with trapezoid quadrature.
    pub fn lp_norm(&self, p: f64) -> Result<f64> {
        check_exponent(p)?;
        Ok(self.component_pth_powers(p).iter().map(|s| s.powf(2.0 / p)).sum::<f64>().sqrt())
    }

    /// `(||f||_p^p + Σ_j ||∂_j f||_p^p)^(1/p)`.
    pub fn w1p_norm(&self, p: f64) -> Result<f64> {
        let mut total = self.lp_norm(p)?.powf(p);
        for axis in 0..self.grid.dim() {
            total += self.partial(axis)?.lp_norm(p)?.powf(p);
        }
        Ok(total.powf(1.0 / p))
    }

    /// CSV dump: `x1,...,xn,blade,re,im`, one row per node and nonzero blade.
    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        let d = self.grid.dim();
        let header: Vec<String> = (1..=d).map(|i| format!("x{i}")).collect();
        writeln!(w, "{},blade,re,im", header.join(","))?;
        for node in 0..self.node_count() {
            let x = self.grid.coords(node);
            for (k, c) in self.node(node).iter().enumerate() {
                if *c == ZERO {
                    continue;
                }
                for xi in &x[..d] {
                    write!(w, "{xi},")?;
                }
                writeln!(w, "{},{},{}", self.alg.blade_at(k), c.re, c.im)?;
            }
        }
        Ok(())
    }

    pub fn meta(&self) -> FieldMeta {
        FieldMeta { grid: self.grid.clone(), n: self.alg.n(), witt: self.alg.witt_enabled() }
    }

    /// Inverse of [`write_csv`](Self::write_csv) given the sidecar metadata.
    pub fn read_csv<R: BufRead>(r: R, meta: &FieldMeta) -> Result<Self> {
        let alg = Algebra::new(meta.n, meta.witt)?;
        let d = meta.grid.dim();
        let mut out = Self::zeros(&meta.grid, alg);
        for (lineno, line) in r.lines().enumerate().skip(1) {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            let bad = |what: &str| Error::Parse(format!("line {}: {what}", lineno + 1));
            let cols: Vec<&str> = line.split(',').collect();
            if cols.len() != d + 3 {
                return Err(bad("wrong column count"));
            }
            let x: Vec<f64> = cols[..d].iter().map(|c| c.parse()).collect::<Result<_, _>>().map_err(|_| bad("bad coordinate"))?;
            let node = meta.grid.locate(&x).ok_or_else(|| bad("point is not a grid node"))?;
            let blade: BladeIndex = cols[d].parse()?;
            let k = alg.index_of(blade)?;
            let re: f64 = cols[d + 1].parse().map_err(|_| bad("bad real part"))?;
            let im: f64 = cols[d + 2].parse().map_err(|_| bad("bad imaginary part"))?;
            out.node_mut(node)[k] = Complex64::new(re, im);
        }
        Ok(out)
    }
}

pub fn check_exponent(p: f64) -> Result<()> {
    if p > 1.0 && p.is_finite() {
        Ok(())
    } else {
        Err(Error::ExponentOutOfRange(p))
    }
}

/// `||approx - exact|| / ||exact||` in interior RMS, 0 when both vanish.
pub fn relative_residual(approx: &CliffordField, exact: &CliffordField, min_layer: usize) -> Result<f64> {
    let num = approx.sub(exact)?.interior_rms(min_layer)?;
    let den = exact.interior_rms(min_layer)?;
    if den == 0.0 {
        return Ok(if num == 0.0 { 0.0 } else { f64::INFINITY });
    }
    Ok(num / den)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn alg(n: usize) -> Algebra {
        Algebra::plain(n).unwrap()
    }

    #[test]
    fn constant_norms() {
        let g = GridSpec::unit(2, 17).unwrap();
        let a = alg(2);
        let one = CliffordField::constant(&g, &Multivector::one(a));
        for p in [1.5, 2.0, 3.0] {
            assert!((one.lp_norm(p).unwrap() - 1.0).abs() < 1e-12);
            assert!((one.w1p_norm(p).unwrap() - one.lp_norm(p).unwrap()).abs() < 1e-12);
        }
        let v = &Multivector::one(a) + &Multivector::generator(a, 1).unwrap();
        let f = CliffordField::constant(&g, &v);
        assert!((f.lp_norm(2.0).unwrap() - 2f64.sqrt()).abs() < 1e-12);
        assert_eq!(CliffordField::zeros(&g, a).lp_norm(2.0).unwrap(), 0.0);
        assert!(matches!(one.lp_norm(1.0), Err(Error::ExponentOutOfRange(_))));
    }

    #[test]
    fn w1p_of_linear_ramp() {
        // (∫x² + ∫1)^(1/2) = sqrt(4/3), trapezoid error O(h²)
        let a = alg(2);
        let mut prev = f64::INFINITY;
        for n in [16, 32, 64] {
            let g = GridSpec::unit(2, n).unwrap();
            let f = CliffordField::scalar_from_fn(&g, a, |x| x[0]);
            let err = (f.w1p_norm(2.0).unwrap() - (4.0f64 / 3.0).sqrt()).abs();
            assert!(err < 1e-3 && err < prev / 3.0, "{n}: {err}");
            prev = err;
        }
    }

    #[test]
    fn partials_exact_on_quadratics() {
        let g = GridSpec::new(vec![-0.3, 0.2], vec![1.1, 0.7], vec![9, 11]).unwrap();
        let a = alg(2);
        let f = CliffordField::scalar_from_fn(&g, a, |x| 1.0 + 2.0 * x[0] - x[1] + x[0] * x[0] + 3.0 * x[0] * x[1]);
        let fx = CliffordField::scalar_from_fn(&g, a, |x| 2.0 + 2.0 * x[0] + 3.0 * x[1]);
        assert!(f.partial(0).unwrap().max_abs_diff(&fx).unwrap() < 1e-12);
        let fxx = CliffordField::scalar_from_fn(&g, a, |_| 2.0);
        assert!(f.second_partial(0).unwrap().max_abs_diff(&fxx).unwrap() < 1e-10);
        assert!(f.second_partial(1).unwrap().max_abs() < 1e-10);
        assert!(f.partial(2).is_err());
    }

    #[test]
    fn pointwise_products() {
        let g = GridSpec::unit(2, 8).unwrap();
        let a = alg(2);
        let e1 = Multivector::generator(a, 1).unwrap();
        let e2 = Multivector::generator(a, 2).unwrap();
        let u = CliffordField::constant(&g, &e2);
        let r = u.right_mul(&e1).unwrap();
        assert_eq!(r.get(5), &e2 * &e1);
        let l = u.left_mul(&e1).unwrap();
        assert_eq!(l.get(5), &e1 * &e2);
        let p = u.product(&CliffordField::constant(&g, &e1)).unwrap();
        assert_eq!(p, r);
    }

    #[test]
    fn csv_round_trip() {
        let g = GridSpec::unit(2, 8).unwrap();
        let a = Algebra::witt(2).unwrap();
        let f = CliffordField::from_fn(&g, a, |x| {
            let v = Multivector::vector(a, &[x[0], -x[1]]).unwrap();
            &v + &(&Multivector::witt_f_plus(a).unwrap() * Complex64::new(0.5, x[0]))
        })
        .unwrap();
        let mut buf = Vec::new();
        f.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with("x1,x2,blade,re,im\n"));
        let back = CliffordField::read_csv(&buf[..], &f.meta()).unwrap();
        assert_eq!(back, f);
    }

    #[test]
    fn grade_checks() {
        let g = GridSpec::unit(2, 8).unwrap();
        let a = alg(3);
        let v = CliffordField::vector_from_fn(&g, a, |x| vec![x[0], x[1]]).unwrap();
        assert!(v.is_grade1());
        assert_eq!(v.real_vector_components().unwrap()[1][1], g.coords(1)[1]);
        assert!(v.real_scalar_values().is_err());
        let s = CliffordField::scalar_from_fn(&g, a, |x| x[0]);
        assert!(!s.is_grade1());
        assert!(s.real_scalar_values().is_ok());
    }
}
