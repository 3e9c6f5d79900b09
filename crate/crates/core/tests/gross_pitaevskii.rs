mod common;

use std::f64::consts::PI;

use common::{eigen_phi, orders, oscillator};
use miura_core::gp::{gp_miura_pipeline, helmholtz_solve_f, GpConfig, PipelineBoundary, Trap};
use miura_core::integral::KernelCache;
use miura_core::miura::MiuraConfig;
use miura_core::{Algebra, CliffordField, GridSpec};

fn alg() -> Algebra {
    Algebra::plain(2).unwrap()
}

#[test]
fn helmholtz_manufactured_second_order() {
    let alpha = 0.2;
    let mut errs = Vec::new();
    for n in [16, 32, 64] {
        let g = GridSpec::unit(2, n).unwrap();
        let (f, st) = helmholtz_solve_f(&eigen_phi(&g, alpha), alpha).unwrap();
        assert!(st.relative_residual <= 1e-10);
        let exact = CliffordField::scalar_from_fn(&g, alg(), |x| (PI * x[0]).sin() * (PI * x[1]).sin());
        errs.push(f.max_abs_diff(&exact).unwrap());
    }
    let o = orders(&errs);
    println!("helmholtz {errs:?} {o:?}");
    assert!(o.iter().all(|o| (1.7..=2.3).contains(o)), "{o:?}");
}

#[test]
fn helmholtz_limit_and_positivity() {
    let g = GridSpec::unit(2, 24).unwrap();
    let phi = CliffordField::scalar_from_fn(&g, alg(), |x| 1.0 + x[0] * x[1] * (PI * x[0]).cos());
    let rho = helmholtz_solve_f(&phi, 0.0).unwrap().0;
    let mut prev = f64::INFINITY;
    for alpha in [0.1, 0.01, 0.001] {
        let (f, _) = helmholtz_solve_f(&phi, alpha).unwrap();
        let d = f.max_abs_diff_inner(&rho, 1).unwrap();
        assert!(d < prev, "alpha {alpha}: {d} vs {prev}");
        prev = d;
        assert!(f.real_scalar_values().unwrap().iter().all(|&v| v >= -1e-10));
    }
    assert!(prev < 2e-3, "{prev}");
}

fn oscillator_cfg(g_coupling: f64) -> GpConfig {
    GpConfig { mu: 1.0, g: g_coupling, trap: Trap::Harmonic { omega: 1.0 }, ..GpConfig::default() }
}

fn mcfg() -> MiuraConfig {
    MiuraConfig { max_iter: 60, tol: 1e-10, ..MiuraConfig::for_dimension(2) }
}

#[test]
fn harmonic_oscillator_pipeline() {
    let mut sch = Vec::new();
    let mut prop = Vec::new();
    for n in [16, 32, 64] {
        let g = GridSpec::cube(2, -1.0, 1.0, n).unwrap();
        let cache = KernelCache::build(&g).unwrap();
        let run = gp_miura_pipeline(&oscillator(&g), &oscillator_cfg(0.0), &mcfg(), &cache, PipelineBoundary::Trace).unwrap();
        let r = &run.report;
        println!(
            "n={n} schrodinger={:e} proposition={:e} check={:e} iterations={} distance={:e}",
            r.schrodinger_residual,
            r.proposition_residual,
            r.proposition_check_residual,
            r.miura_report.iterations,
            r.solver_vs_log_derivative
        );
        let ratio = r.proposition_residual / r.proposition_check_residual;
        assert!((1.0 / 3.0..=3.0).contains(&ratio), "routes disagree: {ratio}");
        assert!(r.miura_report.converged && r.miura_report.iterations <= 50);
        assert!(r.solver_vs_log_derivative < 0.05);
        assert_eq!(r.f_cg_iterations, 0);
        sch.push(r.schrodinger_residual);
        prop.push(r.proposition_residual);
    }
    let (os, op) = (orders(&sch), orders(&prop));
    println!("orders schrodinger {os:?} proposition {op:?}");
    for o in os.iter().chain(&op) {
        assert!((1.7..=2.5).contains(o), "{os:?} {op:?}");
    }
}

#[test]
fn small_coupling_is_continuous() {
    let g = GridSpec::cube(2, -1.0, 1.0, 24).unwrap();
    let cache = KernelCache::build(&g).unwrap();
    let phi = oscillator(&g);
    let base = gp_miura_pipeline(&phi, &oscillator_cfg(0.0), &mcfg(), &cache, PipelineBoundary::Trace).unwrap();
    let pert = gp_miura_pipeline(&phi, &oscillator_cfg(1e-3), &mcfg(), &cache, PipelineBoundary::Trace).unwrap();
    let rho: Vec<f64> = phi.real_scalar_values().unwrap().iter().map(|v| v * v).collect();
    assert_eq!(pert.density.real_scalar_values().unwrap(), rho);
    let (b, p) = (&base.report, &pert.report);
    assert!(p.schrodinger_residual <= 10.0 * b.schrodinger_residual);
    assert!(p.proposition_residual <= 10.0 * b.proposition_residual);
}

#[test]
fn constant_state_has_zero_residuals() {
    let g = GridSpec::unit(2, 16).unwrap();
    let cache = KernelCache::build(&g).unwrap();
    let phi = CliffordField::scalar_from_fn(&g, alg(), |_| 0.8);
    for boundary in [PipelineBoundary::ImQ, PipelineBoundary::Trace] {
        let run = gp_miura_pipeline(&phi, &GpConfig::default(), &mcfg(), &cache, boundary).unwrap();
        let r = &run.report;
        assert!(r.schrodinger_residual < 1e-12);
        assert!(r.proposition_residual < 1e-12);
        assert_eq!(r.miura_report.iterations, 1);
        assert!(run.miura_solution.max_abs() < 1e-12);
    }
}

#[test]
fn pipeline_rejects_nonpositive_state() {
    let g = GridSpec::unit(2, 12).unwrap();
    let cache = KernelCache::build(&g).unwrap();
    let phi = CliffordField::scalar_from_fn(&g, alg(), |x| x[0] - 0.5);
    assert!(gp_miura_pipeline(&phi, &GpConfig::default(), &mcfg(), &cache, PipelineBoundary::ImQ).is_err());
}
