use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::blade::{blade_product_unchecked, BladeIndex, WittWord, MAX_GENERATORS};
use crate::error::{Error, Result};

/// Cl(0,n), optionally tensored with the Witt pair.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Algebra {
    n: usize,
    witt: bool,
}

impl Algebra {
    pub fn new(n: usize, witt: bool) -> Result<Self> {
        if n == 0 || n > MAX_GENERATORS {
            return Err(Error::InvalidDimension(n));
        }
        Ok(Self { n, witt })
    }

    pub fn plain(n: usize) -> Result<Self> {
        Self::new(n, false)
    }

    pub fn witt(n: usize) -> Result<Self> {
        Self::new(n, true)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn witt_enabled(&self) -> bool {
        self.witt
    }

    /// Number of basis words.
    pub fn basis_len(&self) -> usize {
        (1 << self.n) * if self.witt { 4 } else { 1 }
    }

    /// Position of `b` in the coefficient vector. Euclidean mask varies fastest.
    pub fn index_of(&self, b: BladeIndex) -> Result<usize> {
        if !b.is_valid_for(self.n, self.witt) {
            return Err(Error::Parse(format!("blade {b} not in {self}")));
        }
        Ok(self.index_unchecked(b))
    }

    pub(crate) fn index_unchecked(&self, b: BladeIndex) -> usize {
        b.euclid_mask() as usize + (b.witt().index() << self.n)
    }

    pub fn blade_at(&self, i: usize) -> BladeIndex {
        let mask = (i & ((1 << self.n) - 1)) as u8;
        let w = WittWord::from_index(i >> self.n).expect("index within basis");
        BladeIndex::from_mask(mask, w)
    }

    pub fn blades(&self) -> impl Iterator<Item = BladeIndex> + '_ {
        (0..self.basis_len()).map(|i| self.blade_at(i))
    }

    pub(crate) fn check_same(&self, other: &Algebra) -> Result<()> {
        if self != other {
            return Err(Error::AlgebraMismatch { left: self.to_string(), right: other.to_string() });
        }
        Ok(())
    }
}

impl fmt::Display for Algebra {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Cl(0,{})", self.n)?;
        if self.witt {
            f.write_str("+witt")?;
        }
        Ok(())
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Involution {
    Principal,
    Reversion,
    Conjugation,
}

impl Involution {
    /// Sign applied to a word with `k` generators.
    pub fn sign(self, k: usize) -> f64 {
        let e = match self {
            Involution::Principal => k,
            Involution::Reversion => k * k.saturating_sub(1) / 2,
            Involution::Conjugation => k * (k + 1) / 2,
        };
        if e % 2 == 0 {
            1.0
        } else {
            -1.0
        }
    }
}

/// Element of the algebra with dense complex coefficients.
#[derive(Clone, Debug, PartialEq)]
pub struct Multivector {
    alg: Algebra,
    coeffs: Vec<Complex64>,
}

impl Multivector {
    pub fn zero(alg: Algebra) -> Self {
        Self { alg, coeffs: vec![Complex64::new(0.0, 0.0); alg.basis_len()] }
    }

    pub fn scalar(alg: Algebra, c: impl Into<Complex64>) -> Self {
        let mut m = Self::zero(alg);
        m.coeffs[0] = c.into();
        m
    }

    pub fn one(alg: Algebra) -> Self {
        Self::scalar(alg, 1.0)
    }

    pub fn basis(alg: Algebra, b: BladeIndex) -> Result<Self> {
        let mut m = Self::zero(alg);
        m.coeffs[alg.index_of(b)?] = Complex64::new(1.0, 0.0);
        Ok(m)
    }

    /// Generator `e_i`, 1-based.
    pub fn generator(alg: Algebra, i: usize) -> Result<Self> {
        if i == 0 || i > alg.n {
            return Err(Error::InvalidGenerator { index: i, n: alg.n });
        }
        Self::basis(alg, BladeIndex::generator(i)?)
    }

    pub fn witt_f(alg: Algebra) -> Result<Self> {
        if !alg.witt {
            return Err(Error::WittDisabled);
        }
        Self::basis(alg, BladeIndex::SCALAR.with_witt(WittWord::F))
    }

    pub fn witt_f_plus(alg: Algebra) -> Result<Self> {
        if !alg.witt {
            return Err(Error::WittDisabled);
        }
        Self::basis(alg, BladeIndex::SCALAR.with_witt(WittWord::FPlus))
    }

    /// Real vector `Σ x_i e_i`.
    pub fn vector(alg: Algebra, x: &[f64]) -> Result<Self> {
        if x.len() > alg.n {
            return Err(Error::InvalidGenerator { index: x.len(), n: alg.n });
        }
        let mut m = Self::zero(alg);
        for (i, &xi) in x.iter().enumerate() {
            m.coeffs[1 << i] = Complex64::new(xi, 0.0);
        }
        Ok(m)
    }

    pub fn from_terms(alg: Algebra, terms: &[(BladeIndex, Complex64)]) -> Result<Self> {
        let mut m = Self::zero(alg);
        for &(b, c) in terms {
            m.coeffs[alg.index_of(b)?] += c;
        }
        Ok(m)
    }

    pub fn from_coeffs(alg: Algebra, coeffs: Vec<Complex64>) -> Result<Self> {
        if coeffs.len() != alg.basis_len() {
            return Err(Error::InvalidArgument(format!(
                "expected {} coefficients, got {}",
                alg.basis_len(),
                coeffs.len()
            )));
        }
        Ok(Self { alg, coeffs })
    }

    pub fn algebra(&self) -> Algebra {
        self.alg
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn coeff(&self, b: BladeIndex) -> Complex64 {
        self.alg.index_of(b).map(|i| self.coeffs[i]).unwrap_or_default()
    }

    pub fn set_coeff(&mut self, b: BladeIndex, c: Complex64) -> Result<()> {
        let i = self.alg.index_of(b)?;
        self.coeffs[i] = c;
        Ok(())
    }

    pub fn scalar_part(&self) -> Complex64 {
        self.coeffs[0]
    }

    /// Nonzero terms in basis order.
    pub fn terms(&self) -> impl Iterator<Item = (BladeIndex, Complex64)> + '_ {
        self.coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| **c != Complex64::new(0.0, 0.0))
            .map(|(i, &c)| (self.alg.blade_at(i), c))
    }

    pub fn geometric_product(&self, other: &Multivector) -> Result<Multivector> {
        self.alg.check_same(&other.alg)?;
        let mut out = Self::zero(self.alg);
        for (i, &a) in self.coeffs.iter().enumerate() {
            if a == Complex64::new(0.0, 0.0) {
                continue;
            }
            let ba = self.alg.blade_at(i);
            for (j, &b) in other.coeffs.iter().enumerate() {
                if b == Complex64::new(0.0, 0.0) {
                    continue;
                }
                let p = blade_product_unchecked(ba, self.alg.blade_at(j));
                for &(s, blade) in p.terms() {
                    out.coeffs[self.alg.index_unchecked(blade)] += a * b * s;
                }
            }
        }
        Ok(out)
    }

    pub fn involution(&self, kind: Involution) -> Multivector {
        let mut out = self.clone();
        for (i, c) in out.coeffs.iter_mut().enumerate() {
            *c *= kind.sign(self.alg.blade_at(i).generator_count());
        }
        out
    }

    /// Part with `|A| = k` and Witt word 1.
    pub fn grade_project(&self, k: usize) -> Multivector {
        let mut out = Self::zero(self.alg);
        for (i, &c) in self.coeffs.iter().enumerate() {
            let b = self.alg.blade_at(i);
            if b.grade() == k && b.witt() == WittWord::One {
                out.coeffs[i] = c;
            }
        }
        out
    }

    /// Real components `x_i` if this is a real grade-1 element.
    pub fn as_real_vector(&self) -> Result<Vec<f64>> {
        let mut x = vec![0.0; self.alg.n];
        for (i, &c) in self.coeffs.iter().enumerate() {
            let b = self.alg.blade_at(i);
            let is_vec = b.grade() == 1 && b.witt() == WittWord::One;
            if is_vec {
                if c.im != 0.0 {
                    return Err(Error::NotAVector);
                }
                x[b.euclid_mask().trailing_zeros() as usize] = c.re;
            } else if c != Complex64::new(0.0, 0.0) {
                return Err(Error::NotAVector);
            }
        }
        Ok(x)
    }

    /// Inverse of a nonzero real vector: `-x/|x|^2`.
    pub fn vector_inverse(&self) -> Result<Multivector> {
        let x = self.as_real_vector()?;
        let n2: f64 = x.iter().map(|v| v * v).sum();
        if n2 == 0.0 {
            return Err(Error::ZeroVector);
        }
        Ok(self * (-1.0 / n2))
    }

    /// Euclidean norm of the coefficient vector.
    pub fn norm(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn max_abs_diff(&self, other: &Multivector) -> f64 {
        assert_eq!(self.alg, other.alg, "algebra mismatch");
        self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max)
    }

    /// Same element viewed in a larger algebra.
    pub fn embed(&self, target: Algebra) -> Result<Multivector> {
        if target.n < self.alg.n || (self.alg.witt && !target.witt) {
            return Err(Error::AlgebraMismatch {
                left: self.alg.to_string(),
                right: target.to_string(),
            });
        }
        let mut out = Self::zero(target);
        for (b, c) in self.terms() {
            out.coeffs[target.index_unchecked(b)] = c;
        }
        Ok(out)
    }
}

/// Dense blade multiplication table for pointwise field products.
pub(crate) struct ProductTable {
    len: usize,
    entries: Vec<([(f64, u32); 2], u8)>,
}

impl ProductTable {
    pub(crate) fn new(alg: Algebra) -> Self {
        let len = alg.basis_len();
        let mut entries = Vec::with_capacity(len * len);
        for i in 0..len {
            for j in 0..len {
                let p = blade_product_unchecked(alg.blade_at(i), alg.blade_at(j));
                let mut t = [(0.0, 0u32); 2];
                for (slot, &(s, b)) in t.iter_mut().zip(p.terms()) {
                    *slot = (s, alg.index_unchecked(b) as u32);
                }
                entries.push((t, p.terms().len() as u8));
            }
        }
        Self { len, entries }
    }

    #[inline]
    pub(crate) fn terms(&self, i: usize, j: usize) -> &[(f64, u32)] {
        let (t, n) = &self.entries[i * self.len + j];
        &t[..*n as usize]
    }

    /// `out += a * b` on raw coefficient slices.
    pub(crate) fn mul_add(&self, a: &[Complex64], b: &[Complex64], out: &mut [Complex64]) {
        for (i, &x) in a.iter().enumerate() {
            if x == Complex64::new(0.0, 0.0) {
                continue;
            }
            for (j, &y) in b.iter().enumerate() {
                if y == Complex64::new(0.0, 0.0) {
                    continue;
                }
                let xy = x * y;
                for &(s, k) in self.terms(i, j) {
                    out[k as usize] += xy * s;
                }
            }
        }
    }
}

/// Sparse matrix of `x -> c x` (left) or `x -> x c` (right) on coefficient vectors,
/// as `(source, destination, factor)` triples.
pub(crate) fn multiplication_entries(c: &Multivector, left: bool) -> Vec<(usize, usize, Complex64)> {
    let alg = c.alg;
    let mut out = Vec::new();
    for (i, &ci) in c.coeffs.iter().enumerate() {
        if ci == Complex64::new(0.0, 0.0) {
            continue;
        }
        for j in 0..alg.basis_len() {
            let (a, b) = if left { (i, j) } else { (j, i) };
            let p = blade_product_unchecked(alg.blade_at(a), alg.blade_at(b));
            for &(s, blade) in p.terms() {
                out.push((j, alg.index_unchecked(blade), ci * s));
            }
        }
    }
    out
}

impl fmt::Display for Multivector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (b, c) in self.terms() {
            if !first {
                f.write_str(" + ")?;
            }
            first = false;
            if c.im == 0.0 {
                write!(f, "{}*{b}", c.re)?;
            } else {
                write!(f, "({}{:+}i)*{b}", c.re, c.im)?;
            }
        }
        if first {
            f.write_str("0")?;
        }
        Ok(())
    }
}

// Operator forms panic on mismatched algebras, like slice length mismatches.
// Use `geometric_product` for the fallible version.

impl Add for &Multivector {
    type Output = Multivector;
    fn add(self, rhs: &Multivector) -> Multivector {
        assert_eq!(self.alg, rhs.alg, "algebra mismatch");
        let coeffs = self.coeffs.iter().zip(&rhs.coeffs).map(|(a, b)| a + b).collect();
        Multivector { alg: self.alg, coeffs }
    }
}

impl Sub for &Multivector {
    type Output = Multivector;
    fn sub(self, rhs: &Multivector) -> Multivector {
        assert_eq!(self.alg, rhs.alg, "algebra mismatch");
        let coeffs = self.coeffs.iter().zip(&rhs.coeffs).map(|(a, b)| a - b).collect();
        Multivector { alg: self.alg, coeffs }
    }
}

impl Neg for &Multivector {
    type Output = Multivector;
    fn neg(self) -> Multivector {
        Multivector { alg: self.alg, coeffs: self.coeffs.iter().map(|c| -c).collect() }
    }
}

impl Mul for &Multivector {
    type Output = Multivector;
    fn mul(self, rhs: &Multivector) -> Multivector {
        self.geometric_product(rhs).expect("algebra mismatch")
    }
}

impl Mul<Complex64> for &Multivector {
    type Output = Multivector;
    fn mul(self, rhs: Complex64) -> Multivector {
        Multivector { alg: self.alg, coeffs: self.coeffs.iter().map(|c| c * rhs).collect() }
    }
}

impl Mul<f64> for &Multivector {
    type Output = Multivector;
    fn mul(self, rhs: f64) -> Multivector {
        Multivector { alg: self.alg, coeffs: self.coeffs.iter().map(|c| c * rhs).collect() }
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr for Multivector {
            type Output = Multivector;
            fn $m(self, rhs: Multivector) -> Multivector {
                (&self).$m(&rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl Neg for Multivector {
    type Output = Multivector;
    fn neg(self) -> Multivector {
        -&self
    }
}

impl Mul<f64> for Multivector {
    type Output = Multivector;
    fn mul(self, rhs: f64) -> Multivector {
        &self * rhs
    }
}

impl Mul<Complex64> for Multivector {
    type Output = Multivector;
    fn mul(self, rhs: Complex64) -> Multivector {
        &self * rhs
    }
}
