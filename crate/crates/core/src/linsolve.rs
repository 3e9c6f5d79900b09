//! Matrix-free conjugate gradients with sequential reductions.

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CgStats {
    pub iterations: usize,
    pub relative_residual: f64,
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Solves `A x = b` for symmetric positive (semi)definite `A` given as a
/// closure `apply(x, out)`. `project`, if given, is applied to the right-hand
/// side and every search direction (e.g. removing the mean for a Neumann
/// problem). `x` holds the initial guess on entry.
pub fn conjugate_gradient(
    apply: impl Fn(&[f64], &mut [f64]),
    b: &[f64],
    x: &mut [f64],
    rel_tol: f64,
    max_iter: usize,
    project: Option<&dyn Fn(&mut [f64])>,
) -> Result<CgStats> {
    let n = b.len();
    let mut rhs = b.to_vec();
    if let Some(p) = project {
        p(&mut rhs);
        p(x);
    }
    let bnorm = dot(&rhs, &rhs).sqrt();
    if bnorm == 0.0 {
        x.fill(0.0);
        return Ok(CgStats { iterations: 0, relative_residual: 0.0 });
    }
    let mut ax = vec![0.0; n];
    apply(x, &mut ax);
    let mut r: Vec<f64> = rhs.iter().zip(&ax).map(|(b, a)| b - a).collect();
    if let Some(p) = project {
        p(&mut r);
    }
    let mut d = r.clone();
    let mut rr = dot(&r, &r);
    let mut ad = vec![0.0; n];
    for it in 0..=max_iter {
        let rel = rr.sqrt() / bnorm;
        if rel <= rel_tol {
            return Ok(CgStats { iterations: it, relative_residual: rel });
        }
        if it == max_iter {
            return Err(Error::NotConverged { iterations: it, residual: rel });
        }
        apply(&d, &mut ad);
        let dad = dot(&d, &ad);
        if dad <= 0.0 {
            return Err(Error::NotConverged { iterations: it, residual: rel });
        }
        let alpha = rr / dad;
        for i in 0..n {
            x[i] += alpha * d[i];
            r[i] -= alpha * ad[i];
        }
        if let Some(p) = project {
            p(&mut r);
        }
        let rr_new = dot(&r, &r);
        let beta = rr_new / rr;
        rr = rr_new;
        for i in 0..n {
            d[i] = r[i] + beta * d[i];
        }
    }
    unreachable!()
}
