//! Stationary Gross–Pitaevskii system with a finite-range interaction:
//! `(1 - α²Δ)F = |φ|²` and `(-ℏ²/2m Δ + gF + V - μ)φ = 0`, and its
//! reduction to the Miura equation through `a = Dφ/φ`.

use std::f64::consts::PI;
use std::path::PathBuf;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::clifford::Algebra;
use crate::diff::laplacian_apply;
use crate::error::{Error, Result};
use crate::field::CliffordField;
use crate::grid::GridSpec;
use crate::integral::{KernelCache, CORE_LAYER};
use crate::linsolve::{conjugate_gradient, CgStats};
use crate::miura::{
    log_derivative, miura_iterate_with_mode, proposition_check, strong_residual, BoundaryMode, ConvergenceReport, MiuraConfig,
};

/// Relative residual required of the F-solve.
pub const HELMHOLTZ_TOL: f64 = 1e-10;
const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

fn one() -> f64 {
    1.0
}

/// External potential `V(x)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Trap {
    /// `V = m ω² |x|² / 2`.
    Harmonic { omega: f64 },
    Zero,
    /// Scalar field read from a CSV file written by `CliffordField::write_csv`.
    Sampled { file: PathBuf },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GpConfig {
    #[serde(default = "one")]
    pub hbar: f64,
    #[serde(default = "one")]
    pub mass: f64,
    #[serde(default)]
    pub g: f64,
    #[serde(default)]
    pub alpha: f64,
    #[serde(default)]
    pub mu: f64,
    #[serde(default = "default_trap")]
    pub trap: Trap,
}

fn default_trap() -> Trap {
    Trap::Zero
}

impl Default for GpConfig {
    fn default() -> Self {
        Self { hbar: 1.0, mass: 1.0, g: 0.0, alpha: 0.0, mu: 0.0, trap: Trap::Zero }
    }
}

impl GpConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.hbar > 0.0 && self.hbar.is_finite()) || !(self.mass > 0.0 && self.mass.is_finite()) {
            return Err(Error::InvalidArgument("hbar and mass must be positive".into()));
        }
        if !(self.alpha >= 0.0 && self.alpha.is_finite()) {
            return Err(Error::InvalidArgument("alpha must be >= 0".into()));
        }
        if !self.g.is_finite() || !self.mu.is_finite() {
            return Err(Error::InvalidArgument("g and mu must be finite".into()));
        }
        if let Trap::Harmonic { omega } = self.trap {
            if !omega.is_finite() {
                return Err(Error::InvalidArgument("omega must be finite".into()));
            }
        }
        Ok(())
    }

    /// Samples the trap on `grid` as a scalar field.
    pub fn trap_field(&self, grid: &GridSpec, alg: Algebra) -> Result<CliffordField> {
        match &self.trap {
            Trap::Zero => Ok(CliffordField::zeros(grid, alg)),
            Trap::Harmonic { omega } => {
                let k = 0.5 * self.mass * omega * omega;
                Ok(CliffordField::scalar_from_fn(grid, alg, |x| k * x.iter().map(|v| v * v).sum::<f64>()))
            }
            Trap::Sampled { file } => {
                let meta = crate::field::FieldMeta { grid: grid.clone(), n: alg.n(), witt: alg.witt_enabled() };
                let r = std::io::BufReader::new(std::fs::File::open(file)?);
                let f = CliffordField::read_csv(r, &meta)?;
                f.real_scalar_values()?;
                Ok(f)
            }
        }
    }
}

/// `|φ|²` nodewise for a scalar field (complex values allowed).
fn density(phi: &CliffordField) -> Result<Vec<f64>> {
    let b = phi.stride();
    phi.data()
        .chunks(b)
        .map(|c| if c[1..].iter().any(|x| *x != Complex64::new(0.0, 0.0)) { Err(Error::NotScalar) } else { Ok(c[0].norm_sqr()) })
        .collect()
}

fn scalar_field(grid: &GridSpec, alg: Algebra, vals: &[f64]) -> CliffordField {
    let mut out = CliffordField::zeros(grid, alg);
    let b = out.stride();
    for (node, &v) in vals.iter().enumerate() {
        out.data_mut()[node * b] = Complex64::new(v, 0.0);
    }
    out
}

/// Solves `(I - α²Δ_h)F = |φ|²` with `F = 0` on Γ by conjugate gradients.
/// `α = 0` returns `|φ|²` exactly (boundary values included).
pub fn helmholtz_solve_f(phi: &CliffordField, alpha: f64) -> Result<(CliffordField, CgStats)> {
    if !(alpha >= 0.0 && alpha.is_finite()) {
        return Err(Error::InvalidArgument("alpha must be >= 0".into()));
    }
    let grid = phi.grid().clone();
    let rho = density(phi)?;
    if alpha == 0.0 {
        return Ok((scalar_field(&grid, phi.algebra(), &rho), CgStats { iterations: 0, relative_residual: 0.0 }));
    }
    let d = grid.dim();
    let boundary: Vec<bool> = (0..grid.node_count()).map(|i| grid.is_boundary(i)).collect();
    let coef: Vec<f64> = grid.spacings().iter().map(|h| alpha * alpha / (h * h)).collect();
    let strides: Vec<usize> = (0..d).map(|k| grid.stride(k)).collect();
    let apply = |x: &[f64], out: &mut [f64]| {
        for i in 0..x.len() {
            if boundary[i] {
                out[i] = x[i];
                continue;
            }
            let mut acc = x[i];
            for k in 0..d {
                let s = strides[k];
                acc += coef[k] * (2.0 * x[i] - x[i - s] - x[i + s]);
            }
            out[i] = acc;
        }
    };
    let zero_boundary = |v: &mut [f64]| {
        for (x, &b) in v.iter_mut().zip(&boundary) {
            if b {
                *x = 0.0;
            }
        }
    };
    let mut f = vec![0.0; rho.len()];
    let max_iter = 20 * rho.len() + 100;
    let stats = conjugate_gradient(apply, &rho, &mut f, HELMHOLTZ_TOL, max_iter, Some(&zero_boundary))?;
    Ok((scalar_field(&grid, phi.algebra(), &f), stats))
}

/// `v_eff = -(2m/ℏ²)(gF + V - μ)`, so that the state equation reads `-Δφ - v_eff φ = 0`.
pub fn assemble_effective_potential(f: &CliffordField, trap: &CliffordField, cfg: &GpConfig) -> Result<CliffordField> {
    cfg.validate()?;
    f.check_compatible(trap)?;
    let fv = f.real_scalar_values()?;
    let tv = trap.real_scalar_values()?;
    let k = -2.0 * cfg.mass / (cfg.hbar * cfg.hbar);
    let vals: Vec<f64> = fv.iter().zip(&tv).map(|(f, v)| k * (cfg.g * f + v - cfg.mu)).collect();
    Ok(scalar_field(f.grid(), f.algebra(), &vals))
}

/// `g = 4πℏ²α_s/m`.
pub fn scattering_coupling(alpha_s: f64, cfg: &GpConfig) -> f64 {
    4.0 * PI * cfg.hbar * cfg.hbar * alpha_s / cfg.mass
}

/// Modified Bessel function `K₀(z)` for `z > 0`.
pub fn bessel_k0(z: f64) -> Result<f64> {
    if !(z > 0.0 && z.is_finite()) {
        return Err(Error::InvalidArgument(format!("K0 needs z > 0, got {z}")));
    }
    if z <= 2.0 {
        // K0 = -(ln(z/2) + γ) I0 + Σ (z²/4)^k / (k!)² H_k
        let q = 0.25 * z * z;
        let (mut term, mut i0, mut tail, mut harmonic) = (1.0, 1.0, 0.0, 0.0);
        for k in 1..40 {
            let kf = k as f64;
            term *= q / (kf * kf);
            harmonic += 1.0 / kf;
            i0 += term;
            tail += term * harmonic;
            if term < 1e-18 * i0 {
                break;
            }
        }
        Ok(-((0.5 * z).ln() + EULER_GAMMA) * i0 + tail)
    } else {
        // K0 = ∫₀^∞ exp(-z cosh t) dt; the trapezoid rule converges exponentially
        let step: f64 = 0.05;
        let mut sum = 0.5 * (-z).exp();
        let mut t = step;
        loop {
            let v = (-z * t.cosh()).exp();
            sum += v;
            if v < 1e-20 * sum {
                break;
            }
            t += step;
        }
        Ok(sum * step)
    }
}

/// Effective interaction kernel at distance `r`: Yukawa `e^{-r/α}/(4πα²r)` in
/// 3D, `K₀(r/α)/(2πα²)` in 2D.
pub fn effective_potential_kernel(r: f64, alpha: f64, dim: usize) -> Result<f64> {
    if !(r > 0.0) {
        return Err(Error::InvalidArgument(format!("distance must be positive, got {r}")));
    }
    if !(alpha > 0.0) {
        return Err(Error::InvalidArgument("alpha must be positive".into()));
    }
    match dim {
        2 => Ok(bessel_k0(r / alpha)? / (2.0 * PI * alpha * alpha)),
        3 => Ok((-r / alpha).exp() / (4.0 * PI * alpha * alpha * r)),
        _ => Err(Error::InvalidArgument(format!("effective potential defined for dim 2 or 3, got {dim}"))),
    }
}

/// Boundary treatment of the Miura solve inside the pipeline.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PipelineBoundary {
    /// `a ∈ im Q`.
    #[default]
    ImQ,
    /// Prescribe `tr(Dφ/φ)` on Γ.
    Trace,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GpReport {
    #[serde(rename = "F_solve_residual")]
    pub f_solve_residual: f64,
    #[serde(rename = "F_cg_iterations")]
    pub f_cg_iterations: usize,
    /// Core RMS of `-Δφ - v_eff φ`.
    pub schrodinger_residual: f64,
    /// Core RMS of `Da - |a|² - v_eff` for `a = Dφ/φ`.
    pub proposition_residual: f64,
    /// Same identity with the discrete potential `-Δφ/φ` in place of `v_eff`.
    pub proposition_check_residual: f64,
    pub v_eff_min: f64,
    pub v_eff_max: f64,
    /// Relative discrete W1p distance between the solver output and `Dφ/φ`.
    pub solver_vs_log_derivative: f64,
    pub miura_report: ConvergenceReport,
}

/// Pipeline outputs: the report plus the fields it was computed from.
#[derive(Clone, Debug)]
pub struct GpRun {
    pub report: GpReport,
    pub density: CliffordField,
    pub effective_potential: CliffordField,
    pub log_derivative: CliffordField,
    pub miura_solution: CliffordField,
}

/// F-solve, effective potential, the log-derivative residual for `a = Dφ/φ`,
/// and the Miura fixed-point solve with `V_fp = v_eff` (`Da = V_fp + |a|²`).
pub fn gp_miura_pipeline(
    phi: &CliffordField,
    cfg: &GpConfig,
    mcfg: &MiuraConfig,
    cache: &KernelCache,
    boundary: PipelineBoundary,
) -> Result<GpRun> {
    cfg.validate()?;
    phi.check_grid(cache.grid())?;
    let vals = phi.real_scalar_values()?;
    if let Some(node) = vals.iter().position(|&v| !(v > 0.0)) {
        return Err(Error::InvalidArgument(format!("phi must be positive, fails at node {node}")));
    }
    let (f, stats) = helmholtz_solve_f(phi, cfg.alpha)?;
    let trap = cfg.trap_field(phi.grid(), phi.algebra())?;
    let v_eff = assemble_effective_potential(&f, &trap, cfg)?;

    let lap = laplacian_apply(phi)?;
    let schrodinger = lap.scale(-1.0).sub(&v_eff.product(phi)?)?.interior_rms(CORE_LAYER)?;
    let a = log_derivative(phi)?;
    let proposition = strong_residual(&a, &v_eff)?;

    let mode = match boundary {
        PipelineBoundary::ImQ => BoundaryMode::ImQ,
        PipelineBoundary::Trace => BoundaryMode::Trace(&a),
    };
    let (sol, miura_report) = miura_iterate_with_mode(&v_eff, None, mcfg, cache, mode)?;
    let p = mcfg.p;
    let denom = a.w1p_norm(p)?;
    let dist = sol.sub(&a)?.w1p_norm(p)?;
    let solver_vs = if denom > 0.0 { dist / denom } else { dist };

    let ve = v_eff.real_scalar_values()?;
    let report = GpReport {
        f_solve_residual: stats.relative_residual,
        f_cg_iterations: stats.iterations,
        schrodinger_residual: schrodinger,
        proposition_residual: proposition,
        proposition_check_residual: proposition_check(phi)?,
        v_eff_min: ve.iter().copied().fold(f64::INFINITY, f64::min),
        v_eff_max: ve.iter().copied().fold(f64::NEG_INFINITY, f64::max),
        solver_vs_log_derivative: solver_vs,
        miura_report,
    };
    Ok(GpRun { report, density: f, effective_potential: v_eff, log_derivative: a, miura_solution: sol })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn alg() -> Algebra {
        Algebra::plain(2).unwrap()
    }

    #[test]
    fn k0_values() {
        // scipy.special.k0
        for (z, want) in [
            (0.1, 2.4270690247020164),
            (1.0, 0.42102443824070823),
            (2.0, 0.1138938727495334),
            (5.0, 0.0036910983340425942),
            (20.0, 5.741237815336524e-10),
        ] {
            let got = bessel_k0(z).unwrap();
            assert!((got - want).abs() <= 1e-12 * want.max(1e-300) + 1e-15, "{z}: {got} vs {want}");
        }
        // both branches agree at the switch
        let below = bessel_k0(2.0).unwrap();
        let above = bessel_k0(2.0 + 1e-12).unwrap();
        assert!((below - above).abs() < 1e-11);
        assert!(bessel_k0(0.0).is_err());
    }

    #[test]
    fn yukawa_examples() {
        let a = 0.7;
        let got = effective_potential_kernel(a, a, 3).unwrap();
        assert!((got - (-1f64).exp() / (4.0 * PI * a * a * a)).abs() < 1e-15);
        let r = 1e-9;
        let ratio = effective_potential_kernel(r, 1.0, 3).unwrap() * 4.0 * PI * r;
        assert!((ratio - 1.0).abs() < 1e-8);
        assert!(effective_potential_kernel(0.0, 1.0, 3).is_err());
        assert!(effective_potential_kernel(1.0, 1.0, 4).is_err());
        let u2 = effective_potential_kernel(1.0, 1.0, 2).unwrap();
        assert!((u2 - 0.42102443824070823 / (2.0 * PI)).abs() < 1e-12);
    }

    #[test]
    fn coupling_examples() {
        let cfg = GpConfig::default();
        assert_eq!(scattering_coupling(1.0, &cfg), 4.0 * PI);
        assert_eq!(scattering_coupling(2.0, &cfg), 2.0 * scattering_coupling(1.0, &cfg));
        let si = GpConfig { hbar: 1.0545718e-34, mass: 1.44e-25, ..GpConfig::default() };
        let g = scattering_coupling(5.3e-9, &si);
        let want = 4.0 * 3.141592653589793 * (1.0545718e-34f64.powi(2)) * 5.3e-9 / 1.44e-25;
        assert!(((g - want) / want).abs() < 1e-14);
    }

    #[test]
    fn effective_potential_examples() {
        let g = GridSpec::cube(2, -1.0, 1.0, 9).unwrap();
        let zero = CliffordField::zeros(&g, alg());
        let v = assemble_effective_potential(&zero, &zero, &GpConfig::default()).unwrap();
        assert_eq!(v.max_abs(), 0.0);
        let cfg = GpConfig { mu: 1.0, trap: Trap::Harmonic { omega: 1.0 }, ..GpConfig::default() };
        let trap = cfg.trap_field(&g, alg()).unwrap();
        let v = assemble_effective_potential(&zero, &trap, &cfg).unwrap();
        let want = CliffordField::scalar_from_fn(&g, alg(), |x| 2.0 - x[0] * x[0] - x[1] * x[1]);
        assert!(v.max_abs_diff(&want).unwrap() < 1e-14);
        let shifted = GpConfig { mu: 1.5, ..cfg.clone() };
        let v2 = assemble_effective_potential(&zero, &trap, &shifted).unwrap();
        let d = v2.sub(&v).unwrap().real_scalar_values().unwrap();
        assert!(d.iter().all(|x| (x - 1.0).abs() < 1e-14));
    }

    #[test]
    fn helmholtz_trivial_cases() {
        let g = GridSpec::unit(2, 12).unwrap();
        let phi = CliffordField::scalar_from_fn(&g, alg(), |x| 1.0 + x[0] * x[1]);
        let (f, _) = helmholtz_solve_f(&phi, 0.0).unwrap();
        let rho: Vec<f64> = phi.real_scalar_values().unwrap().iter().map(|v| v * v).collect();
        assert_eq!(f.real_scalar_values().unwrap(), rho);
        let (f, st) = helmholtz_solve_f(&CliffordField::zeros(&g, alg()), 0.3).unwrap();
        assert_eq!(f.max_abs(), 0.0);
        assert_eq!(st.iterations, 0);
        assert!(helmholtz_solve_f(&phi, -1.0).is_err());
    }

    #[test]
    fn config_json() {
        let s = r#"{"hbar":1.0,"mass":2.0,"g":0.5,"alpha":0.1,"mu":1.0,"trap":{"kind":"harmonic","omega":1.0}}"#;
        let cfg: GpConfig = serde_json::from_str(s).unwrap();
        assert_eq!(cfg.trap, Trap::Harmonic { omega: 1.0 });
        let back: GpConfig = serde_json::from_str(&serde_json::to_string(&cfg).unwrap()).unwrap();
        assert_eq!(back, cfg);
        let bad: GpConfig = serde_json::from_str(r#"{"hbar":-1.0}"#).unwrap();
        assert!(bad.validate().is_err());
    }
}
