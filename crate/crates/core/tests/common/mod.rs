//! Oracles and manufactured inputs shared by the integration tests.
#![allow(dead_code)]

use std::f64::consts::PI;

use miura_core::diff::{factorization_residual, miura_potential, FactorizationCase, ParabolicVariant, Sign};
use miura_core::integral::schrodinger_kernel;
use miura_core::{Algebra, CliffordField, GridSpec, Multivector, WittWord};
use num_complex::Complex64;

pub fn plain(n: usize) -> Algebra {
    Algebra::plain(n).unwrap()
}

pub fn quadratic(x: &[f64]) -> f64 {
    let (a, b) = (x[0], x[1]);
    0.7 - 1.3 * a + 0.4 * b + 2.0 * a * b - a * a + 0.5 * b * b
}

pub fn trig(x: &[f64]) -> f64 {
    (PI * x[0]).sin() * (PI * x[1]).sin()
}

pub fn vector_a(g: &GridSpec, alg: Algebra, trig_a: bool) -> CliffordField {
    if trig_a {
        CliffordField::vector_from_fn(g, alg, |x| vec![0.3 * (PI * x[0]).sin(), 0.2 * (PI * x[1]).cos()]).unwrap()
    } else {
        CliffordField::constant(g, &Multivector::vector(alg, &[0.4, -0.25]).unwrap())
    }
}

/// Residual of every factorization identity on `u` with `n` nodes per axis.
/// Polynomial inputs use a constant `a` in the Miura case, others a trig `a`.
pub fn factorization_residuals(n: usize, u: fn(&[f64]) -> f64, polynomial: bool) -> Vec<(&'static str, f64)> {
    let g = GridSpec::unit(2, n).unwrap();
    let alg = plain(2);
    let su = CliffordField::scalar_from_fn(&g, alg, u);
    let mut out = vec![
        ("laplace", factorization_residual(FactorizationCase::Laplace, &su).unwrap()),
        ("helmholtz", factorization_residual(FactorizationCase::Helmholtz(Complex64::new(2.0, 0.5)), &su).unwrap()),
    ];
    // (x0, x1) grid for the Cauchy-Riemann operator
    let cr = CliffordField::scalar_from_fn(&g, plain(1), u);
    out.push(("cauchy_riemann", factorization_residual(FactorizationCase::CauchyRiemann, &cr).unwrap()));

    let a = vector_a(&g, alg, !polynomial);
    let v = miura_potential(&a).unwrap();
    out.push(("miura", factorization_residual(FactorizationCase::Miura { a: &a, v: &v }, &su).unwrap()));

    // (x, t) grid in the Witt-enabled algebra
    let pu = CliffordField::scalar_from_fn(&g, Algebra::witt(1).unwrap(), u);
    for (name, sign, variant) in [
        ("schrodinger+", Sign::Plus, ParabolicVariant::Schrodinger),
        ("schrodinger-", Sign::Minus, ParabolicVariant::Schrodinger),
        ("heat+", Sign::Plus, ParabolicVariant::Heat),
        ("heat-", Sign::Minus, ParabolicVariant::Heat),
    ] {
        out.push((name, factorization_residual(FactorizationCase::Parabolic { sign, variant }, &pu).unwrap()));
    }
    out
}

/// Reference product in complex Cl(0,m): generator lists are concatenated,
/// bubble-sorted with one sign flip per swap, and equal neighbours contracted
/// to -1.
pub struct Oracle {
    pub m: usize,
}

impl Oracle {
    pub fn blade(&self, a: usize, b: usize) -> (f64, usize) {
        let mut word: Vec<usize> = (0..self.m).filter(|i| a >> i & 1 == 1).collect();
        word.extend((0..self.m).filter(|i| b >> i & 1 == 1));
        let mut sign = 1.0;
        let mut changed = true;
        while changed {
            changed = false;
            let mut i = 0;
            while i + 1 < word.len() {
                if word[i] > word[i + 1] {
                    word.swap(i, i + 1);
                    sign = -sign;
                    changed = true;
                } else if word[i] == word[i + 1] {
                    word.drain(i..i + 2);
                    sign = -sign;
                    changed = true;
                    continue;
                }
                i += 1;
            }
        }
        (sign, word.iter().fold(0, |acc, g| acc | 1 << g))
    }

    pub fn mul(&self, x: &[Complex64], y: &[Complex64]) -> Vec<Complex64> {
        let mut out = vec![Complex64::new(0.0, 0.0); 1 << self.m];
        for (a, &xa) in x.iter().enumerate() {
            if xa == Complex64::new(0.0, 0.0) {
                continue;
            }
            for (b, &yb) in y.iter().enumerate() {
                let (s, c) = self.blade(a, b);
                out[c] += xa * yb * s;
            }
        }
        out
    }

    pub fn unit(&self, mask: usize) -> Vec<Complex64> {
        let mut v = vec![Complex64::new(0.0, 0.0); 1 << self.m];
        v[mask] = 1.0.into();
        v
    }
}

/// Embedding of the Witt-extended Cl(0,n) into complex Cl(0,n+2) with
/// f = (e_a + i e_b)/2, f+ = (-e_a + i e_b)/2.
pub fn embed(u: &Multivector) -> Vec<Complex64> {
    let n = u.algebra().n();
    let o = Oracle { m: n + 2 };
    let (ea, eb) = (o.unit(1 << n), o.unit(1 << (n + 1)));
    let i = Complex64::new(0.0, 1.0);
    let f: Vec<Complex64> = ea.iter().zip(&eb).map(|(a, b)| (a + i * b) * 0.5).collect();
    let fp: Vec<Complex64> = ea.iter().zip(&eb).map(|(a, b)| (-a + i * b) * 0.5).collect();
    let fpf = o.mul(&fp, &f);
    let mut out = vec![Complex64::new(0.0, 0.0); 1 << (n + 2)];
    for (blade, c) in u.terms() {
        let w = match blade.witt() {
            WittWord::One => o.unit(0),
            WittWord::F => f.clone(),
            WittWord::FPlus => fp.clone(),
            WittWord::FPlusF => fpf.clone(),
        };
        let term = o.mul(&o.unit(blade.euclid_mask() as usize), &w);
        for (acc, t) in out.iter_mut().zip(term) {
            *acc += c * t;
        }
    }
    out
}

pub fn max_diff(a: &[Complex64], b: &[Complex64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

pub const FD_STEP: f64 = 1e-3;

/// Fourth-order central first difference.
pub fn d1(f: impl Fn(f64) -> Complex64, s: f64) -> Complex64 {
    let h = FD_STEP;
    (f(s - 2.0 * h) - f(s + 2.0 * h) + (f(s + h) - f(s - h)) * 8.0) / (12.0 * h)
}

/// Fourth-order central second difference.
pub fn d2(f: impl Fn(f64) -> Complex64, s: f64) -> Complex64 {
    let h = FD_STEP;
    (-f(s - 2.0 * h) - f(s + 2.0 * h) + (f(s + h) + f(s - h)) * 16.0 - f(s) * 30.0) / (12.0 * h * h)
}

pub fn kernel_probes(n: usize) -> Vec<(Vec<f64>, f64)> {
    let base = [[0.3, -0.2, 0.1], [0.0, 0.0, 0.0], [0.8, 0.5, -0.4], [-0.6, 0.2, 0.9], [1.1, -0.9, 0.3]];
    let times = [0.7, 1.3, 2.0, 0.9, 3.5];
    base.iter().zip(times).map(|(x, t)| (x[..n].to_vec(), t)).collect()
}

/// `|(-i∂_t - Δ)E|` by finite differences.
pub fn schrodinger_pde_residual(x: &[f64], t: f64) -> f64 {
    let dt = d1(|s| schrodinger_kernel(x, s), t);
    let mut lap = Complex64::new(0.0, 0.0);
    for j in 0..x.len() {
        lap += d2(
            |s| {
                let mut y = x.to_vec();
                y[j] = s;
                schrodinger_kernel(&y, t)
            },
            x[j],
        );
    }
    (-Complex64::i() * dt - lap).norm()
}

/// `Σ e_j ∂_j E(x,-t) + 𝔣 ∂_t E(x,-t) + i𝔣⁺ E(x,-t)` by finite differences.
pub fn parabolic_by_differences(x: &[f64], t: f64) -> Multivector {
    let alg = Algebra::witt(x.len()).unwrap();
    let e = |y: &[f64], s: f64| schrodinger_kernel(y, -s);
    let mut out = &Multivector::witt_f_plus(alg).unwrap() * (Complex64::i() * e(x, t));
    out = &out + &(&Multivector::witt_f(alg).unwrap() * d1(|s| e(x, s), t));
    for j in 0..x.len() {
        let dj = d1(
            |s| {
                let mut y = x.to_vec();
                y[j] = s;
                e(&y, t)
            },
            x[j],
        );
        out = &out + &(&Multivector::generator(alg, j + 1).unwrap() * dj);
    }
    out
}

/// `K₀` from its power series, summed term by term with explicit factorials.
pub fn k0_series(z: f64) -> f64 {
    let gamma = 0.5772156649015329;
    let (mut i0, mut rest) = (0.0, 0.0);
    let mut fact = 1.0f64;
    let mut harmonic = 0.0;
    for k in 0..60 {
        if k > 0 {
            fact *= k as f64;
            harmonic += 1.0 / k as f64;
        }
        let t = (z / 2.0).powi(2 * k) / (fact * fact);
        i0 += t;
        rest += t * harmonic;
    }
    -((z / 2.0).ln() + gamma) * i0 + rest
}

pub fn orders(errs: &[f64]) -> Vec<f64> {
    errs.windows(2).map(|w| (w[0] / w[1]).log2()).collect()
}

pub fn oscillator(g: &GridSpec) -> CliffordField {
    CliffordField::scalar_from_fn(g, plain(2), |x| (-(x[0] * x[0] + x[1] * x[1]) / 2.0).exp())
}

/// φ with `|φ|² = (1 + 2α²π²) sin(πx) sin(πy)`, so `F = sin(πx) sin(πy)`.
pub fn eigen_phi(g: &GridSpec, alpha: f64) -> CliffordField {
    let s = 1.0 + 2.0 * alpha * alpha * PI * PI;
    CliffordField::scalar_from_fn(g, plain(2), |x| (s * (PI * x[0]).sin().max(0.0) * (PI * x[1]).sin().max(0.0)).sqrt())
}
