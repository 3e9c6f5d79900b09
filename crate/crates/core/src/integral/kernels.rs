//! Closed-form fundamental solutions.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::clifford::{Algebra, Multivector};
use crate::error::{Error, Result};

/// Surface area ω_n of the unit sphere in R^n.
pub fn unit_sphere_area(n: usize) -> f64 {
    match n {
        1 => 2.0,
        2 => 2.0 * PI,
        3 => 4.0 * PI,
        4 => 2.0 * PI * PI,
        5 => 8.0 * PI * PI / 3.0,
        _ => panic!("unit_sphere_area: n = {n} outside 1..=5"),
    }
}

/// Real components of `e(x) = -x / (ω_n |x|^n)`.
pub fn cauchy_kernel_components(x: &[f64]) -> Result<Vec<f64>> {
    let n = x.len();
    if n == 0 || n > 5 {
        return Err(Error::InvalidDimension(n));
    }
    let r2: f64 = x.iter().map(|v| v * v).sum();
    if r2 == 0.0 {
        return Err(Error::Singular("x = 0".into()));
    }
    let scale = -1.0 / (unit_sphere_area(n) * r2.sqrt().powi(n as i32));
    Ok(x.iter().map(|v| v * scale).collect())
}

/// Generalized Cauchy kernel `e(x) = -x / (ω_n |x|^n)` in Cl(0,n), n = x.len().
pub fn cauchy_kernel(x: &[f64]) -> Result<Multivector> {
    let c = cauchy_kernel_components(x)?;
    Multivector::vector(Algebra::plain(x.len())?, &c)
}

/// `(2 sqrt(π i t))^{-n} exp(i|x|²/4t)` without the Heaviside gate.
fn schrodinger_free(x: &[f64], t: f64) -> Complex64 {
    let r2: f64 = x.iter().map(|v| v * v).sum();
    let root = (Complex64::new(0.0, PI * t)).sqrt() * 2.0;
    let phase = Complex64::new(0.0, r2 / (4.0 * t)).exp();
    phase / root.powi(x.len() as i32)
}

/// Fundamental solution of the free Schrödinger operator, `H(t)(2√(πit))^{-n} e^{i|x|²/4t}`.
/// Zero for `t <= 0`; principal square root.
pub fn schrodinger_kernel(x: &[f64], t: f64) -> Complex64 {
    if t <= 0.0 {
        return Complex64::new(0.0, 0.0);
    }
    schrodinger_free(x, t)
}

/// `e(x,t) = H(-t) E(x,-t) [(-i/2t) Σ x_j e_j + 𝔣(-n/2t + i|x|²/4t²) + i𝔣⁺]`,
/// in the Witt-enabled Cl(0,n) with n = x.len().
pub fn parabolic_kernel(x: &[f64], t: f64) -> Result<Multivector> {
    if t == 0.0 {
        return Err(Error::Singular("t = 0".into()));
    }
    let n = x.len();
    let alg = Algebra::witt(n)?;
    if t > 0.0 {
        return Ok(Multivector::zero(alg));
    }
    let e = schrodinger_free(x, -t);
    let r2: f64 = x.iter().map(|v| v * v).sum();
    let i = Complex64::new(0.0, 1.0);
    let mut out = &Multivector::vector(alg, x)? * (-i / (2.0 * t));
    let f_coeff = Complex64::new(-(n as f64) / (2.0 * t), r2 / (4.0 * t * t));
    out = &out + &(&Multivector::witt_f(alg)? * f_coeff);
    out = &out + &(&Multivector::witt_f_plus(alg)? * i);
    Ok(&out * e)
}
