//! Grid-refinement studies of named residuals.

use std::f64::consts::PI;
use std::fmt;
use std::io::Write;
use std::str::FromStr;

use serde::{Deserialize, Serialize, Serializer};

use crate::clifford::Algebra;
use crate::diff::{factorization_residual, FactorizationCase};
use crate::error::{Error, Result};
use crate::field::{relative_residual, CliffordField};
use crate::gp::helmholtz_solve_f;
use crate::grid::GridSpec;
use crate::integral::{borel_pompeiu_residual, im_q_residual, right_inverse_residual, KernelCache};
use crate::miura::{proposition_check, reconstruct_log_phi};

/// Residuals at or below this count as exact.
pub const EXACT_TOL: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StudyCase {
    /// `DDu + Δu` for a quadratic `u`.
    LaplaceQuadratic,
    /// `DDu + Δu` for `u = sin(πx)cos(πy)`.
    LaplaceTrig,
    /// `(D+k)(D-k)u + Δu + k²u` with `k = 2` and the trig `u`.
    HelmholtzTrig,
    /// Log-derivative (`proposition_check`) residual for `φ = exp(0.1xy)`.
    PropositionExpBilinear,
    /// Log-derivative (`proposition_check`) residual for `φ = exp(-|x|²/4)`.
    PropositionGaussian,
    /// `D(Tf) - f` for `f = x e1`.
    RightInverse,
    /// `F(tr f) + T(Df) - f` for `f = x e1`.
    BorelPompeiu,
    /// `F(tr Tf)` for `f = x e1`.
    ImQ,
    /// `(I - α²Δ)F = |φ|²` against `F = sin(πx)sin(πy)`, `α = 0.2`.
    HelmholtzSolve,
    /// Gradient reconstruction of `s = 0.3 y sin(2x)` from `a = Ds`.
    LogReconstruction,
}

impl StudyCase {
    pub const ALL: [StudyCase; 10] = [
        StudyCase::LaplaceQuadratic,
        StudyCase::LaplaceTrig,
        StudyCase::HelmholtzTrig,
        StudyCase::PropositionExpBilinear,
        StudyCase::PropositionGaussian,
        StudyCase::RightInverse,
        StudyCase::BorelPompeiu,
        StudyCase::ImQ,
        StudyCase::HelmholtzSolve,
        StudyCase::LogReconstruction,
    ];

    pub fn name(self) -> &'static str {
        match self {
            StudyCase::LaplaceQuadratic => "laplace_quadratic",
            StudyCase::LaplaceTrig => "laplace_trig",
            StudyCase::HelmholtzTrig => "helmholtz_trig",
            StudyCase::PropositionExpBilinear => "proposition_exp_bilinear",
            StudyCase::PropositionGaussian => "proposition_gaussian",
            StudyCase::RightInverse => "right_inverse",
            StudyCase::BorelPompeiu => "borel_pompeiu",
            StudyCase::ImQ => "im_q",
            StudyCase::HelmholtzSolve => "helmholtz_solve",
            StudyCase::LogReconstruction => "log_reconstruction",
        }
    }

    /// Residual on the unit square with `count` nodes per axis.
    pub fn residual(self, count: usize) -> Result<f64> {
        let g = GridSpec::unit(2, count)?;
        let alg = Algebra::plain(2)?;
        let trig = |x: &[f64]| (PI * x[0]).sin() * (PI * x[1]).cos();
        let x_e1 = || CliffordField::vector_from_fn(&g, alg, |x| vec![x[0], 0.0]);
        match self {
            StudyCase::LaplaceQuadratic => {
                let u = CliffordField::scalar_from_fn(&g, alg, |x| {
                    1.0 + x[0] - 2.0 * x[1] + 3.0 * x[0] * x[1] + x[0] * x[0] - 0.5 * x[1] * x[1]
                });
                factorization_residual(FactorizationCase::Laplace, &u)
            }
            StudyCase::LaplaceTrig => {
                factorization_residual(FactorizationCase::Laplace, &CliffordField::scalar_from_fn(&g, alg, trig))
            }
            StudyCase::HelmholtzTrig => factorization_residual(
                FactorizationCase::Helmholtz(2.0.into()),
                &CliffordField::scalar_from_fn(&g, alg, trig),
            ),
            StudyCase::PropositionExpBilinear => {
                proposition_check(&CliffordField::scalar_from_fn(&g, alg, |x| (0.1 * x[0] * x[1]).exp()))
            }
            StudyCase::PropositionGaussian => proposition_check(&CliffordField::scalar_from_fn(&g, alg, |x| {
                (-(x[0] * x[0] + x[1] * x[1]) / 4.0).exp()
            })),
            StudyCase::RightInverse => right_inverse_residual(&x_e1()?, &KernelCache::build(&g)?),
            StudyCase::BorelPompeiu => borel_pompeiu_residual(&x_e1()?, &KernelCache::build(&g)?),
            StudyCase::ImQ => im_q_residual(&x_e1()?, &KernelCache::build(&g)?),
            StudyCase::HelmholtzSolve => {
                let alpha = 0.2;
                let s = 1.0 + 2.0 * alpha * alpha * PI * PI;
                let exact = |x: &[f64]| (PI * x[0]).sin().max(0.0) * (PI * x[1]).sin().max(0.0);
                let phi = CliffordField::scalar_from_fn(&g, alg, |x| (s * exact(x)).sqrt());
                let (f, _) = helmholtz_solve_f(&phi, alpha)?;
                f.max_abs_diff(&CliffordField::scalar_from_fn(&g, alg, exact))
            }
            StudyCase::LogReconstruction => {
                let s = |x: &[f64]| 0.3 * x[1] * (2.0 * x[0]).sin();
                let a = CliffordField::vector_from_fn(&g, alg, |x| {
                    vec![0.6 * x[1] * (2.0 * x[0]).cos(), 0.3 * (2.0 * x[0]).sin()]
                })?;
                let rec = reconstruct_log_phi(&a)?;
                // compare in the mean-zero gauge
                let vals: Vec<f64> = (0..g.node_count()).map(|i| s(&g.coords(i))).collect();
                let mean = vals.iter().sum::<f64>() / vals.len() as f64;
                let exact = CliffordField::scalar_from_fn(&g, alg, |x| s(x) - mean);
                relative_residual(&rec.s, &exact, 0)
            }
        }
    }
}

impl fmt::Display for StudyCase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for StudyCase {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        StudyCase::ALL.into_iter().find(|c| c.name() == s).ok_or_else(|| {
            let names: Vec<&str> = StudyCase::ALL.iter().map(|c| c.name()).collect();
            Error::Parse(format!("unknown study case {s:?} (expected one of {})", names.join(", ")))
        })
    }
}

/// Observed order between consecutive levels, or the exact marker.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Order {
    Exact,
    Estimate(f64),
}

impl Serialize for Order {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Order::Exact => s.serialize_str("exact"),
            Order::Estimate(v) => s.serialize_f64(*v),
        }
    }
}

impl fmt::Display for Order {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Order::Exact => f.write_str("exact"),
            Order::Estimate(v) => write!(f, "{v:.6}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct StudyRow {
    pub count: usize,
    pub h: f64,
    pub residual: f64,
    /// Order against the previous level (absent on the first row).
    pub order: Option<Order>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct StudyTable {
    pub case: String,
    pub exact: bool,
    pub rows: Vec<StudyRow>,
}

impl StudyTable {
    /// Order estimates, skipping the first row.
    pub fn orders(&self) -> Vec<Order> {
        self.rows.iter().filter_map(|r| r.order).collect()
    }

    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "count,h,residual,order")?;
        for r in &self.rows {
            let order = r.order.map(|o| o.to_string()).unwrap_or_default();
            writeln!(w, "{},{:e},{:e},{}", r.count, r.h, r.residual, order)?;
        }
        Ok(())
    }
}

/// `ln(r_k / r_{k+1}) / ln(N_{k+1} / N_k)`: `log₂(r_k/r_{k+1})` for doubling levels.
pub fn observed_order(r0: f64, r1: f64, n0: usize, n1: usize) -> f64 {
    (r0 / r1).ln() / (n1 as f64 / n0 as f64).ln()
}

/// Residual of `case` at each node count in `levels` (strictly increasing, at least two).
pub fn convergence_study(case: StudyCase, levels: &[usize]) -> Result<StudyTable> {
    if levels.len() < 2 || levels.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidArgument("need at least two strictly increasing levels".into()));
    }
    let residuals = levels.iter().map(|&n| case.residual(n)).collect::<Result<Vec<_>>>()?;
    let exact = residuals.iter().all(|&r| r <= EXACT_TOL);
    let rows = levels
        .iter()
        .zip(&residuals)
        .enumerate()
        .map(|(k, (&count, &residual))| {
            let order = (k > 0).then(|| {
                if exact {
                    Order::Exact
                } else {
                    Order::Estimate(observed_order(residuals[k - 1], residual, levels[k - 1], count))
                }
            });
            Ok(StudyRow { count, h: GridSpec::unit(2, count)?.h(), residual, order })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(StudyTable { case: case.name().into(), exact, rows })
}
