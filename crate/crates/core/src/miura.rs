//! Fixed-point solver for the stationary Miura equation `Da + a² = V`,
//! written as `a = T(V + |a|²)`, with its convergence constants and the
//! logarithmic-derivative link to `-Δφ - vφ = 0`.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::clifford::Algebra;
use crate::diff::{dirac_apply, laplacian_apply};
use crate::error::{Error, Result};
use crate::field::{check_exponent, CliffordField};
use crate::grid::GridSpec;
use crate::integral::{cauchy_boundary_field, teodorescu_apply, KernelCache, CORE_LAYER};
use crate::linsolve::conjugate_gradient;

pub const DEFAULT_MAX_ITER: usize = 200;
pub const DEFAULT_TRIALS: usize = 16;
/// Estimated constants are multiplied by this factor.
pub const SAFETY_FACTOR: f64 = 1.25;
/// A residual this many times above its running minimum flags divergence.
pub const DIVERGENCE_FACTOR: f64 = 5.0;
/// Smallest |φ| accepted by the logarithmic derivative.
pub const PHI_FLOOR: f64 = 1e-12;

fn default_max_iter() -> usize {
    DEFAULT_MAX_ITER
}

fn default_trials() -> usize {
    DEFAULT_TRIALS
}

/// Default Lebesgue exponent: 1.5 in the plane, 2 in space, n/2 beyond.
pub fn default_p(n: usize) -> f64 {
    if n == 2 {
        1.5
    } else {
        (n as f64 / 2.0).max(2.0)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MiuraConfig {
    pub p: f64,
    pub tol: f64,
    #[serde(default = "default_max_iter")]
    pub max_iter: usize,
    /// `||T||` from Lp to W1p; estimated when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k1: Option<f64>,
    /// Embedding constant W1p into L2p; estimated when absent.
    #[serde(default, rename = "C", skip_serializing_if = "Option::is_none")]
    pub c: Option<f64>,
    #[serde(default = "default_trials")]
    pub trials: usize,
    #[serde(default)]
    pub seed: u64,
}

impl MiuraConfig {
    pub fn for_dimension(n: usize) -> Self {
        Self { p: default_p(n), tol: 1e-10, max_iter: DEFAULT_MAX_ITER, k1: None, c: None, trials: DEFAULT_TRIALS, seed: 0 }
    }

    /// Checks the exponent window `n > p >= n/2 > 1` (`n > p > 1` for n = 2).
    pub fn validate(&self, n: usize) -> Result<()> {
        check_exponent(self.p)?;
        let nf = n as f64;
        let ok = if n == 2 { self.p < 2.0 } else { self.p < nf && self.p >= nf / 2.0 && n > 2 };
        if !ok {
            return Err(Error::InvalidArgument(format!("p = {} outside the admissible window for n = {n}", self.p)));
        }
        if !(self.tol > 0.0) {
            return Err(Error::InvalidArgument("tol must be positive".into()));
        }
        if self.max_iter == 0 {
            return Err(Error::InvalidArgument("max_iter must be positive".into()));
        }
        for (name, v) in [("k1", self.k1), ("C", self.c)] {
            if let Some(v) = v {
                if !(v > 0.0 && v.is_finite()) {
                    return Err(Error::InvalidArgument(format!("{name} must be positive")));
                }
            }
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceBounds {
    pub threshold: f64,
    pub small_enough: bool,
    #[serde(rename = "W")]
    pub w: Option<f64>,
    #[serde(rename = "L")]
    pub l: Option<f64>,
}

/// Threshold `1/(4 k1 k2)`, radius `W = sqrt(1/(4k2²) - (k1/k2)||V||)` and
/// contraction `L = 1 - sqrt(1 - 4 k1 k2 ||V||)`.
pub fn convergence_bounds(norm_v: f64, k1: f64, k2: f64) -> Result<ConvergenceBounds> {
    if !(k1 > 0.0 && k2 > 0.0 && norm_v >= 0.0) || !norm_v.is_finite() {
        return Err(Error::InvalidArgument("need k1, k2 > 0 and a finite ||V|| >= 0".into()));
    }
    let threshold = 1.0 / (4.0 * k1 * k2);
    let small_enough = norm_v <= threshold;
    if !small_enough {
        return Ok(ConvergenceBounds { threshold, small_enough, w: None, l: None });
    }
    // q in [0,1], computed as a ratio so the boundary cases come out exact
    let root = (1.0 - norm_v / threshold).sqrt();
    Ok(ConvergenceBounds { threshold, small_enough, w: Some(root / (2.0 * k2)), l: Some(1.0 - root) })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConstantEstimate {
    pub k1: f64,
    #[serde(rename = "C")]
    pub c: f64,
    pub trials: usize,
    pub seed: u64,
}

/// Random superposition of low cosine modes, `Σ c_m Π_k cos(π m_k x̂_k + φ)`.
fn random_smooth(grid: &GridSpec, alg: Algebra, rng: &mut ChaCha8Rng) -> CliffordField {
    let d = grid.dim();
    let modes = 3usize.pow(d as u32);
    let terms: Vec<(f64, Vec<(f64, f64)>)> = (0..modes)
        .map(|m| {
            let c = rng.random_range(-1.0..1.0);
            let mut rem = m;
            let waves = (0..d)
                .map(|_| {
                    let k = (rem % 3) as f64;
                    rem /= 3;
                    (k, rng.random_range(0.0..std::f64::consts::TAU))
                })
                .collect();
            (c, waves)
        })
        .collect();
    let (o, l) = (grid.origin().to_vec(), grid.extents().to_vec());
    CliffordField::scalar_from_fn(grid, alg, |x| {
        terms
            .iter()
            .map(|(c, w)| c * w.iter().enumerate().map(|(k, (m, ph))| (std::f64::consts::PI * m * (x[k] - o[k]) / l[k] + ph).cos()).product::<f64>())
            .sum()
    })
}

/// Randomized lower bounds for `k1 = ||T||_{Lp→W1p}` and the embedding
/// constant `C` of W1p into L2p, each times [`SAFETY_FACTOR`]. Trial 0 is the
/// constant field `e0`; later trials are random smooth fields from a ChaCha
/// stream seeded with `seed`, so more trials only extend the sample.
pub fn estimate_constants_with_cache(cache: &KernelCache, p: f64, trials: usize, seed: u64) -> Result<ConstantEstimate> {
    check_exponent(p)?;
    if trials < 16 {
        return Err(Error::InvalidArgument(format!("need at least 16 trials, got {trials}")));
    }
    let grid = cache.grid();
    let alg = Algebra::plain(grid.dim())?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (mut k1, mut c) = (0.0f64, 0.0f64);
    for t in 0..trials {
        let f = if t == 0 {
            CliffordField::scalar_from_fn(grid, alg, |_| 1.0)
        } else {
            random_smooth(grid, alg, &mut rng)
        };
        let lp = f.lp_norm(p)?;
        if lp == 0.0 {
            continue;
        }
        k1 = k1.max(teodorescu_apply(&f, cache)?.w1p_norm(p)? / lp);
        c = c.max(f.lp_norm(2.0 * p)? / f.w1p_norm(p)?);
    }
    Ok(ConstantEstimate { k1: k1 * SAFETY_FACTOR, c: c * SAFETY_FACTOR, trials, seed })
}

/// [`estimate_constants_with_cache`] after building the kernel cache for `grid`.
pub fn estimate_constants(grid: &GridSpec, p: f64, trials: usize, seed: u64) -> Result<ConstantEstimate> {
    estimate_constants_with_cache(&KernelCache::build(grid)?, p, trials, seed)
}

/// How the solver treats the boundary Cauchy term `Fa`.
#[derive(Clone, Copy, Debug)]
pub enum BoundaryMode<'a> {
    /// `a ∈ im Q`, so `Fa = 0` and `a = T(V + |a|²)`.
    ImQ,
    /// Prescribed trace `g`: `a = F(g) + T(V + |a|²)` inside, `a = g` on Γ.
    Trace(&'a CliffordField),
}

impl BoundaryMode<'_> {
    fn label(&self) -> &'static str {
        match self {
            BoundaryMode::ImQ => "im_q",
            BoundaryMode::Trace(_) => "trace",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceReport {
    pub boundary_mode: String,
    pub p: f64,
    pub k1: f64,
    #[serde(rename = "C")]
    pub c: f64,
    pub k2: f64,
    pub constants_estimated: bool,
    #[serde(rename = "norm_V")]
    pub norm_v: f64,
    pub threshold: f64,
    pub small_enough: bool,
    #[serde(rename = "W")]
    pub w: Option<f64>,
    #[serde(rename = "L")]
    pub l: Option<f64>,
    pub iterations: usize,
    pub converged: bool,
    pub diverged: bool,
    /// `||a_n - a_{n-1}||_{W1p}` per iteration.
    pub residual_history: Vec<f64>,
    pub ratio_history: Vec<f64>,
    /// `||a_n||_{W1p}` per iteration.
    pub norm_history: Vec<f64>,
    /// Every iterate came out exactly grade-1 before any projection.
    pub grade1_pure: bool,
    /// Largest non-vector coefficient removed by projection (trace mode only).
    pub max_non_vector: f64,
    /// A-priori bound `||a_n|| <= 1/(2k2) + W`, checked only for supplied constants.
    pub within_lemma_bound: Option<bool>,
    pub final_fp_residual: f64,
    pub final_strong_residual: f64,
}

/// `V + Σ a_j²` as a scalar field.
fn nonlinear_source(a: &CliffordField, v: &[f64]) -> Result<CliffordField> {
    let comps = a.real_vector_components()?;
    let mut out = CliffordField::zeros(a.grid(), a.algebra());
    let b = out.stride();
    for (node, &vn) in v.iter().enumerate() {
        let sq: f64 = comps.iter().map(|c| c[node] * c[node]).sum();
        out.data_mut()[node * b] = Complex64::new(vn + sq, 0.0);
    }
    Ok(out)
}

/// Zeroes every coefficient off the Euclidean grade-1 blades; returns the largest removed.
fn project_vector(f: &mut CliffordField) -> f64 {
    let n = f.algebra().n();
    let b = f.stride();
    let mut removed = 0.0f64;
    for chunk in f.data_mut().chunks_mut(b) {
        for (k, c) in chunk.iter_mut().enumerate() {
            if !(k.is_power_of_two() && k < (1 << n)) {
                removed = removed.max(c.norm());
                *c = Complex64::new(0.0, 0.0);
            }
            c.im = 0.0;
        }
    }
    removed
}

struct FixedPointMap<'a> {
    cache: &'a KernelCache,
    v: Vec<f64>,
    trace: Option<(&'a CliffordField, CliffordField)>,
}

impl<'a> FixedPointMap<'a> {
    fn new(v: &CliffordField, cache: &'a KernelCache, mode: BoundaryMode<'a>) -> Result<Self> {
        let trace = match mode {
            BoundaryMode::ImQ => None,
            BoundaryMode::Trace(g) => {
                g.check_compatible(v)?;
                g.real_vector_components()?;
                Some((g, cauchy_boundary_field(g)?))
            }
        };
        Ok(Self { cache, v: v.real_scalar_values()?, trace })
    }

    fn apply(&self, a: &CliffordField) -> Result<CliffordField> {
        let mut out = teodorescu_apply(&nonlinear_source(a, &self.v)?, self.cache)?;
        if let Some((g, fg)) = &self.trace {
            out.axpy(1.0, fg)?;
            let grid = out.grid().clone();
            for node in 0..grid.node_count() {
                if grid.is_boundary(node) {
                    out.node_mut(node).copy_from_slice(g.node(node));
                }
            }
        }
        Ok(out)
    }
}

fn check_inputs(v: &CliffordField, a: &CliffordField, cache: &KernelCache) -> Result<()> {
    v.check_grid(cache.grid())?;
    a.check_compatible(v)?;
    if v.algebra().witt_enabled() {
        return Err(Error::InvalidArgument("the Miura solver works in the plain algebra".into()));
    }
    v.real_scalar_values()?;
    a.real_vector_components()?;
    Ok(())
}

/// Interior-core RMS of `Da - |a|² e0 - V`.
pub(crate) fn strong_residual(a: &CliffordField, v: &CliffordField) -> Result<f64> {
    let vals = v.real_scalar_values()?;
    let src = nonlinear_source(a, &vals)?;
    dirac_apply(a)?.sub(&src)?.interior_rms(CORE_LAYER)
}

/// `(||a - T(V+|a|²)||_{W1p}, core RMS of Da - |a|² - V)` for `a ∈ im Q`.
pub fn miura_residual(a: &CliffordField, v: &CliffordField, cache: &KernelCache, p: f64) -> Result<(f64, f64)> {
    miura_residual_with_mode(a, v, cache, p, BoundaryMode::ImQ)
}

pub fn miura_residual_with_mode(
    a: &CliffordField,
    v: &CliffordField,
    cache: &KernelCache,
    p: f64,
    mode: BoundaryMode<'_>,
) -> Result<(f64, f64)> {
    check_inputs(v, a, cache)?;
    let map = FixedPointMap::new(v, cache, mode)?;
    let mut next = map.apply(a)?;
    project_vector(&mut next);
    Ok((a.sub(&next)?.w1p_norm(p)?, strong_residual(a, v)?))
}

/// `a0 = T(b)` for a scalar `b`, the alternative starting point.
pub fn initial_from_scalar(b: &CliffordField, cache: &KernelCache) -> Result<CliffordField> {
    b.real_scalar_values()?;
    teodorescu_apply(b, cache)
}

/// Picard iteration `a_n = T(V + |a_{n-1}|²)` from `a0` (default 0).
pub fn miura_iterate(
    v: &CliffordField,
    a0: Option<&CliffordField>,
    cfg: &MiuraConfig,
    cache: &KernelCache,
) -> Result<(CliffordField, ConvergenceReport)> {
    miura_iterate_with_mode(v, a0, cfg, cache, BoundaryMode::ImQ)
}

pub fn miura_iterate_with_mode(
    v: &CliffordField,
    a0: Option<&CliffordField>,
    cfg: &MiuraConfig,
    cache: &KernelCache,
    mode: BoundaryMode<'_>,
) -> Result<(CliffordField, ConvergenceReport)> {
    let grid = cache.grid();
    cfg.validate(grid.dim())?;
    let zero = CliffordField::zeros(grid, v.algebra());
    let mut a = a0.cloned().unwrap_or(zero);
    check_inputs(v, &a, cache)?;
    let p = cfg.p;

    let (k1, c, estimated) = match (cfg.k1, cfg.c) {
        (Some(k1), Some(c)) => (k1, c, false),
        (k1, c) => {
            let est = estimate_constants_with_cache(cache, p, cfg.trials, cfg.seed)?;
            (k1.unwrap_or(est.k1), c.unwrap_or(est.c), true)
        }
    };
    let k2 = k1 * c * c;
    let norm_v = v.lp_norm(p)?;
    let bounds = convergence_bounds(norm_v, k1, k2)?;

    let map = FixedPointMap::new(v, cache, mode)?;
    let mut residuals: Vec<f64> = Vec::new();
    let mut norms = Vec::new();
    let mut pure = true;
    let mut max_non_vector = 0.0f64;
    let (mut converged, mut diverged) = (false, false);
    let mut best = f64::INFINITY;

    for _ in 0..cfg.max_iter {
        let mut next = map.apply(&a)?;
        if !next.is_grade1() {
            pure = false;
        }
        max_non_vector = max_non_vector.max(project_vector(&mut next));
        let r = next.sub(&a)?.w1p_norm(p)?;
        a = next;
        residuals.push(r);
        norms.push(a.w1p_norm(p)?);
        if !r.is_finite() {
            diverged = true;
            break;
        }
        if r <= cfg.tol {
            converged = true;
            break;
        }
        best = best.min(r);
        if r > DIVERGENCE_FACTOR * best {
            diverged = true;
            break;
        }
    }

    let ratios = residuals.windows(2).map(|w| w[1] / w[0]).collect();
    let within_lemma_bound = match (estimated, bounds.w) {
        (false, Some(w)) => Some(norms.iter().all(|&n| n <= 1.0 / (2.0 * k2) + w)),
        _ => None,
    };
    let (fp, strong) = if diverged {
        (f64::NAN, f64::NAN)
    } else {
        miura_residual_with_mode(&a, v, cache, p, mode)?
    };
    let report = ConvergenceReport {
        boundary_mode: mode.label().into(),
        p,
        k1,
        c,
        k2,
        constants_estimated: estimated,
        norm_v,
        threshold: bounds.threshold,
        small_enough: bounds.small_enough,
        w: bounds.w,
        l: bounds.l,
        iterations: residuals.len(),
        converged,
        diverged,
        residual_history: residuals,
        ratio_history: ratios,
        norm_history: norms,
        grade1_pure: pure,
        max_non_vector,
        within_lemma_bound,
        final_fp_residual: fp,
        final_strong_residual: strong,
    };
    Ok((a, report))
}

/// Nodal `Dφ / φ` for a real scalar `φ` without zeros.
pub fn log_derivative(phi: &CliffordField) -> Result<CliffordField> {
    let vals = phi.real_scalar_values()?;
    if let Some(node) = vals.iter().position(|v| v.abs() < PHI_FLOOR) {
        return Err(Error::NearZero { node });
    }
    let mut d = dirac_apply(phi)?;
    let b = d.stride();
    for (chunk, &v) in d.data_mut().chunks_mut(b).zip(&vals) {
        for c in chunk {
            *c /= v;
        }
    }
    Ok(d)
}

/// Potential `v = -Δφ/φ` of the Schrödinger equation `-Δφ - vφ = 0`.
pub fn schrodinger_potential(phi: &CliffordField) -> Result<CliffordField> {
    let vals = phi.real_scalar_values()?;
    if let Some(node) = vals.iter().position(|v| v.abs() < PHI_FLOOR) {
        return Err(Error::NearZero { node });
    }
    let lap = laplacian_apply(phi)?.real_scalar_values()?;
    let mut out = CliffordField::zeros(phi.grid(), phi.algebra());
    let b = out.stride();
    for (node, (l, v)) in lap.iter().zip(&vals).enumerate() {
        out.data_mut()[node * b] = Complex64::new(-l / v, 0.0);
    }
    Ok(out)
}

/// Interior-core RMS of `Da - |a|² - v` with `a = Dφ/φ`, `v = -Δφ/φ`.
pub fn proposition_check(phi: &CliffordField) -> Result<f64> {
    let a = log_derivative(phi)?;
    let v = schrodinger_potential(phi)?;
    strong_residual(&a, &v)
}

#[derive(Clone, Debug)]
pub struct LogReconstruction {
    /// Mean-zero scalar `s` with `Ds ≈ a`.
    pub s: CliffordField,
    /// `||D_h s - a|| / ||a||` over all nodes (RMS).
    pub residual: f64,
    pub cg_iterations: usize,
}

/// Least-squares `s` with `∂_j s ≈ a_j` on grid edges:
/// minimises `Σ_edges ((s_b - s_a)/h - (a_a + a_b)/2)²` in the mean-zero gauge.
pub fn reconstruct_log_phi(a: &CliffordField) -> Result<LogReconstruction> {
    let comps = a.real_vector_components()?;
    let grid = a.grid().clone();
    let nodes = grid.node_count();
    let d = grid.dim();
    let mut edges: Vec<(usize, usize, usize)> = Vec::new();
    for node in 0..nodes {
        let idx = grid.multi_index(node);
        for k in 0..d {
            if idx[k] + 1 < grid.counts()[k] {
                edges.push((node, node + grid.stride(k), k));
            }
        }
    }
    let h: Vec<f64> = grid.spacings();
    let mut rhs = vec![0.0; nodes];
    for &(i, j, k) in &edges {
        let target = if k < comps.len() { 0.5 * (comps[k][i] + comps[k][j]) } else { 0.0 };
        rhs[j] += target / h[k];
        rhs[i] -= target / h[k];
    }
    let apply = |x: &[f64], out: &mut [f64]| {
        out.fill(0.0);
        for &(i, j, k) in &edges {
            let diff = (x[j] - x[i]) / (h[k] * h[k]);
            out[j] += diff;
            out[i] -= diff;
        }
    };
    let demean = |x: &mut [f64]| {
        let m = x.iter().sum::<f64>() / x.len() as f64;
        x.iter_mut().for_each(|v| *v -= m);
    };
    let mut s = vec![0.0; nodes];
    let stats = conjugate_gradient(apply, &rhs, &mut s, 1e-12, 20 * nodes, Some(&demean))?;
    demean(&mut s);
    let sf = CliffordField::from_raw(
        &grid,
        a.algebra(),
        {
            let mut data = vec![Complex64::new(0.0, 0.0); nodes * a.stride()];
            for (node, v) in s.iter().enumerate() {
                data[node * a.stride()] = Complex64::new(*v, 0.0);
            }
            data
        },
    )?;
    let ds = dirac_apply(&sf)?;
    let den = a.interior_rms(0)?;
    let num = ds.sub(a)?.interior_rms(0)?;
    let residual = if den == 0.0 { num } else { num / den };
    Ok(LogReconstruction { s: sf, residual, cg_iterations: stats.iterations })
}
