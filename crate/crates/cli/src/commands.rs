use std::collections::BTreeMap;
use std::path::Path;

use miura_core::diff::{factorization_residual, miura_potential, FactorizationCase, ParabolicVariant, Sign};
use miura_core::gp::{bessel_k0, effective_potential_kernel, gp_miura_pipeline, PipelineBoundary, Trap};
use miura_core::integral::{
    borel_pompeiu_residual, cauchy_kernel_components, im_q_residual, parabolic_kernel, right_inverse_residual,
    schrodinger_kernel, KernelCache,
};
use miura_core::miura::{miura_iterate_with_mode, BoundaryMode, ConvergenceReport};
use miura_core::study::{convergence_study, StudyCase};
use miura_core::{Algebra, BladeIndex, CliffordField, Involution, Multivector};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::config::{CommandKind, PotentialSpec, RunConfig};
use crate::output::OutputDir;
use crate::CliError;

/// What a command hands back to the driver besides its artifacts.
pub struct Outcome {
    /// The solver diverged or hit its iteration cap.
    pub diverged: bool,
}

const OK: Outcome = Outcome { diverged: false };

pub fn execute(cfg: &RunConfig, base: &Path, out: &mut OutputDir) -> Result<Outcome, CliError> {
    match cfg.command {
        CommandKind::AlgebraCheck => algebra_check(cfg, out),
        CommandKind::Identities => identities(cfg, out),
        CommandKind::MiuraSolve => miura_solve(cfg, base, out),
        CommandKind::GpRun => gp_run(cfg, base, out),
        CommandKind::Kernels => kernels(cfg, out),
        CommandKind::ConvergenceStudy => study(cfg, out),
    }
}

#[derive(Serialize)]
struct AlgebraReport {
    n: usize,
    samples: usize,
    seed: u64,
    generator_relations: f64,
    witt_relations: f64,
    associativity_plain: f64,
    associativity_witt: f64,
    involution_laws: f64,
    conjugation_composition: f64,
    vector_inverse: f64,
}

fn random_mv(rng: &mut ChaCha8Rng, alg: Algebra) -> Multivector {
    let c = (0..alg.basis_len()).map(|_| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)));
    Multivector::from_coeffs(alg, c.collect()).expect("length matches basis")
}

fn algebra_check(cfg: &RunConfig, out: &mut OutputDir) -> Result<Outcome, CliError> {
    let sec = cfg.algebra.clone().unwrap_or_default();
    let plain = Algebra::plain(sec.n)?;
    let witt = Algebra::witt(sec.n)?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);

    let mut gens = 0.0f64;
    let mut wr = 0.0f64;
    let one = Multivector::one(witt);
    let f = Multivector::witt_f(witt)?;
    let fp = Multivector::witt_f_plus(witt)?;
    for i in 1..=sec.n {
        let ei = Multivector::generator(witt, i)?;
        gens = gens.max((&ei * &ei).max_abs_diff(&-&one));
        for j in (1..=sec.n).filter(|&j| j != i) {
            let ej = Multivector::generator(witt, j)?;
            gens = gens.max((&(&ei * &ej) + &(&ej * &ei)).norm());
        }
        wr = wr.max((&(&f * &ei) + &(&ei * &f)).norm()).max((&(&fp * &ei) + &(&ei * &fp)).norm());
    }
    wr = wr.max((&(&f * &fp) + &(&fp * &f)).max_abs_diff(&one));
    wr = wr.max((&f * &f).norm()).max((&fp * &fp).norm());

    let assoc = |rng: &mut ChaCha8Rng, alg| {
        (0..sec.samples).fold(0.0f64, |m, _| {
            let (a, b, c) = (random_mv(rng, alg), random_mv(rng, alg), random_mv(rng, alg));
            m.max((&(&a * &b) * &c).max_abs_diff(&(&a * &(&b * &c))))
        })
    };
    let associativity_plain = assoc(&mut rng, plain);
    let associativity_witt = assoc(&mut rng, witt);

    let (mut inv, mut comp, mut vinv) = (0.0f64, 0.0f64, 0.0f64);
    let rev = |x: &Multivector| x.involution(Involution::Reversion);
    let pri = |x: &Multivector| x.involution(Involution::Principal);
    let con = |x: &Multivector| x.involution(Involution::Conjugation);
    for _ in 0..sec.samples {
        let (a, b) = (random_mv(&mut rng, plain), random_mv(&mut rng, plain));
        let ab = &a * &b;
        inv = inv.max(rev(&ab).max_abs_diff(&(&rev(&b) * &rev(&a))));
        inv = inv.max(pri(&ab).max_abs_diff(&(&pri(&a) * &pri(&b))));
        inv = inv.max(con(&ab).max_abs_diff(&(&con(&b) * &con(&a))));
        let w = random_mv(&mut rng, witt);
        comp = comp.max(pri(&rev(&w)).max_abs_diff(&con(&w))).max(rev(&pri(&w)).max_abs_diff(&con(&w)));
        let x: Vec<f64> = (0..sec.n).map(|_| rng.random_range(-2.0..2.0)).collect();
        let v = Multivector::vector(plain, &x)?;
        if let Ok(vi) = v.vector_inverse() {
            vinv = vinv.max((&v * &vi).max_abs_diff(&Multivector::one(plain)));
        }
    }
    // blade-exhaustive composition check
    for b in witt.blades().collect::<Vec<BladeIndex>>() {
        let x = Multivector::basis(witt, b)?;
        comp = comp.max(pri(&rev(&x)).max_abs_diff(&con(&x)));
    }

    out.write_json(
        "report.json",
        &AlgebraReport {
            n: sec.n,
            samples: sec.samples,
            seed: cfg.seed,
            generator_relations: gens,
            witt_relations: wr,
            associativity_plain,
            associativity_witt,
            involution_laws: inv,
            conjugation_composition: comp,
            vector_inverse: vinv,
        },
    )?;
    Ok(OK)
}

/// Smooth scalar test input used by `identities`.
fn test_input(x: &[f64]) -> f64 {
    let y = x.get(1).copied().unwrap_or(0.0);
    let z = x.get(2).copied().unwrap_or(0.0);
    x[0].sin() * y.cos() + 0.5 * (x[0] * z).cos()
}

fn identities(cfg: &RunConfig, out: &mut OutputDir) -> Result<Outcome, CliError> {
    let g = cfg.grid()?;
    let d = g.dim();
    let alg = Algebra::plain(d)?;
    let u = CliffordField::scalar_from_fn(g, alg, test_input);
    let mut res: BTreeMap<&str, f64> = BTreeMap::new();

    res.insert("laplace", factorization_residual(FactorizationCase::Laplace, &u)?);
    res.insert("helmholtz", factorization_residual(FactorizationCase::Helmholtz(Complex64::new(2.0, 0.5)), &u)?);
    // first axis read as x0 (Cauchy-Riemann) or t (parabolic)
    let cr = CliffordField::scalar_from_fn(g, Algebra::plain(d - 1)?, test_input);
    res.insert("cauchy_riemann", factorization_residual(FactorizationCase::CauchyRiemann, &cr)?);
    let a = CliffordField::vector_from_fn(g, alg, |x| x.iter().map(|c| 0.3 * c.sin()).collect())?;
    let v = miura_potential(&a)?;
    res.insert("miura", factorization_residual(FactorizationCase::Miura { a: &a, v: &v }, &u)?);
    let pu = CliffordField::scalar_from_fn(g, Algebra::witt(d - 1)?, test_input);
    for (name, sign, variant) in [
        ("schrodinger_plus", Sign::Plus, ParabolicVariant::Schrodinger),
        ("schrodinger_minus", Sign::Minus, ParabolicVariant::Schrodinger),
        ("heat_plus", Sign::Plus, ParabolicVariant::Heat),
        ("heat_minus", Sign::Minus, ParabolicVariant::Heat),
    ] {
        res.insert(name, factorization_residual(FactorizationCase::Parabolic { sign, variant }, &pu)?);
    }

    if d <= 3 {
        let cache = KernelCache::build(g)?;
        let f = CliffordField::vector_from_fn(g, alg, |x| {
            let mut v = vec![0.0; d];
            v[0] = x[0];
            v
        })?;
        res.insert("right_inverse", right_inverse_residual(&f, &cache)?);
        res.insert("borel_pompeiu", borel_pompeiu_residual(&f, &cache)?);
        res.insert("im_q", im_q_residual(&f, &cache)?);
    }

    out.write_json("report.json", &res)?;
    out.write_field("input.csv", &u)?;
    Ok(OK)
}

#[derive(Serialize)]
struct MiuraSolveReport {
    #[serde(flatten)]
    report: ConvergenceReport,
    /// Relative discrete W1p distance to the closed-form solution, when known.
    #[serde(skip_serializing_if = "Option::is_none")]
    exact_error: Option<f64>,
}

fn miura_solve(cfg: &RunConfig, base: &Path, out: &mut OutputDir) -> Result<Outcome, CliError> {
    let g = cfg.grid()?;
    let alg = Algebra::plain(g.dim())?;
    let mcfg = cfg.miura_config(g.dim());
    let v = cfg.sample_potential(g, alg, base, false)?;
    let exact = match &cfg.potential {
        PotentialSpec::Manufactured { phi } => {
            let phi = *phi;
            Some(CliffordField::vector_from_fn(g, alg, |x| phi.log_gradient(x))?)
        }
        _ => None,
    };
    let cache = KernelCache::build(g)?;
    let mode = match (cfg.boundary, &exact) {
        (PipelineBoundary::Trace, Some(e)) => BoundaryMode::Trace(e),
        _ => BoundaryMode::ImQ,
    };
    let (a, report) = miura_iterate_with_mode(&v, None, &mcfg, &cache, mode)?;
    let exact_error = match &exact {
        Some(e) if !report.diverged => {
            let diff = a.sub(e)?.w1p_norm(mcfg.p)?;
            let norm = e.w1p_norm(mcfg.p)?;
            Some(if norm > 0.0 { diff / norm } else { diff })
        }
        _ => None,
    };
    let diverged = report.diverged || !report.converged;
    out.write_json("report.json", &MiuraSolveReport { report, exact_error })?;
    out.write_field("potential.csv", &v)?;
    out.write_field("solution.csv", &a)?;
    Ok(Outcome { diverged })
}

fn gp_run(cfg: &RunConfig, base: &Path, out: &mut OutputDir) -> Result<Outcome, CliError> {
    let g = cfg.grid()?;
    let alg = Algebra::plain(g.dim())?;
    let mcfg = cfg.miura_config(g.dim());
    let mut gp = cfg.gp.clone().unwrap_or_default();
    if let Trap::Sampled { file } = &gp.trap {
        gp.trap = Trap::Sampled { file: base.join(file) };
    }
    let phi = cfg.sample_potential(g, alg, base, true)?;
    let cache = KernelCache::build(g)?;
    let run = gp_miura_pipeline(&phi, &gp, &mcfg, &cache, cfg.boundary)?;
    let m = &run.report.miura_report;
    let diverged = m.diverged || !m.converged;
    out.write_json("report.json", &run.report)?;
    out.write_field("phi.csv", &phi)?;
    out.write_field("density.csv", &run.density)?;
    out.write_field("effective_potential.csv", &run.effective_potential)?;
    out.write_field("log_derivative.csv", &run.log_derivative)?;
    out.write_field("miura_solution.csv", &run.miura_solution)?;
    Ok(Outcome { diverged })
}

#[derive(Serialize)]
struct KernelSample {
    x: Vec<f64>,
    t: f64,
    cauchy: Vec<f64>,
    schrodinger_re: f64,
    schrodinger_im: f64,
    parabolic_scalar: f64,
    parabolic_norm: f64,
}

#[derive(Serialize)]
struct KernelReport {
    alpha: f64,
    samples: Vec<KernelSample>,
}

const PROBES: [[f64; 3]; 4] = [[0.3, 0.4, 0.0], [-0.5, 0.2, 0.1], [1.0, -1.0, 0.5], [0.05, 0.1, -0.2]];
const TIMES: [f64; 2] = [0.25, 1.0];
/// Screening length for the radial table when the config has none.
const DEFAULT_ALPHA: f64 = 0.5;

fn kernels(cfg: &RunConfig, out: &mut OutputDir) -> Result<Outcome, CliError> {
    let alpha = cfg.gp.as_ref().map(|g| g.alpha).filter(|&a| a > 0.0).unwrap_or(DEFAULT_ALPHA);
    let mut samples = Vec::new();
    for dim in [2, 3] {
        for p in PROBES {
            let x = &p[..dim];
            for t in TIMES {
                let s = schrodinger_kernel(x, t);
                let e = parabolic_kernel(x, -t)?;
                samples.push(KernelSample {
                    x: x.to_vec(),
                    t,
                    cauchy: cauchy_kernel_components(x)?,
                    schrodinger_re: s.re,
                    schrodinger_im: s.im,
                    parabolic_scalar: e.scalar_part().re,
                    parabolic_norm: e.norm(),
                });
            }
        }
    }
    out.write_json("report.json", &KernelReport { alpha, samples })?;

    let mut rows = Vec::new();
    for k in 1..=40 {
        let r = 0.05 * k as f64;
        rows.push((r, bessel_k0(r / alpha)?, effective_potential_kernel(r, alpha, 2)?, effective_potential_kernel(r, alpha, 3)?));
    }
    out.write_with("radial.csv", |w| {
        use std::io::Write;
        writeln!(w, "r,k0,kernel_2d,kernel_3d")?;
        for (r, k0, k2, k3) in rows {
            writeln!(w, "{r:e},{k0:e},{k2:e},{k3:e}")?;
        }
        Ok(())
    })?;
    Ok(OK)
}

fn study(cfg: &RunConfig, out: &mut OutputDir) -> Result<Outcome, CliError> {
    let s = cfg.study.as_ref().expect("validated");
    let table = convergence_study(s.case, &s.levels)?;
    out.write_json("report.json", &table)?;
    let mut buf = Vec::new();
    table.write_csv(&mut buf)?;
    out.write_bytes("study.csv", &buf)?;
    Ok(OK)
}

/// Config equivalent to `miura study --case C --levels L`.
pub fn study_config(case: StudyCase, levels: Vec<usize>) -> RunConfig {
    RunConfig {
        command: CommandKind::ConvergenceStudy,
        grid: None,
        miura: None,
        gp: None,
        potential: PotentialSpec::Zero,
        boundary: PipelineBoundary::ImQ,
        seed: 0,
        output_dir: None,
        algebra: None,
        study: Some(crate::config::StudySection { case, levels }),
    }
}
