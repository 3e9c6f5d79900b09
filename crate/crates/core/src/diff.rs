//! Finite-difference Dirac-type operators and factorization residuals.
//!
//! Axis conventions:
//! * Dirac: grid axis `j` pairs with `e_{j+1}`.
//! * Cauchy-Riemann: grid axis 0 is `x0`, axis `j >= 1` pairs with `e_j`.
//! * Parabolic: the last grid axis is time, the others pair with `e_1..`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::clifford::{Algebra, Multivector};
use crate::error::{Error, Result};
use crate::field::CliffordField;
use crate::grid::GridSpec;

/// Residuals are measured on nodes at least this many cells from the boundary.
pub const RESIDUAL_LAYER: usize = 2;

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn value(self) -> f64 {
        match self {
            Sign::Plus => 1.0,
            Sign::Minus => -1.0,
        }
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ParabolicVariant {
    Heat,
    Schrodinger,
}

/// `Σ c_axis ∂_axis f + c0 f` with constant left coefficients.
fn first_order(f: &CliffordField, terms: &[(usize, Multivector)], zeroth: Option<&Multivector>) -> Result<CliffordField> {
    let mut out = CliffordField::zeros(f.grid(), f.algebra());
    for (axis, c) in terms {
        out.axpy(1.0, &f.partial(*axis)?.left_mul(c)?)?;
    }
    if let Some(c0) = zeroth {
        out.axpy(1.0, &f.left_mul(c0)?)?;
    }
    Ok(out)
}

fn require_generators(alg: Algebra, needed: usize) -> Result<()> {
    if alg.n() < needed {
        return Err(Error::InvalidGenerator { index: needed, n: alg.n() });
    }
    Ok(())
}

fn dirac_terms(alg: Algebra, axes: usize) -> Result<Vec<(usize, Multivector)>> {
    require_generators(alg, axes)?;
    (0..axes).map(|j| Ok((j, Multivector::generator(alg, j + 1)?))).collect()
}

/// `Df = Σ_j e_j ∂_j f`.
pub fn dirac_apply(f: &CliffordField) -> Result<CliffordField> {
    first_order(f, &dirac_terms(f.algebra(), f.grid().dim())?, None)
}

/// Spatial Dirac operator on a space-time grid (skips the last axis).
pub fn spatial_dirac_apply(f: &CliffordField) -> Result<CliffordField> {
    first_order(f, &dirac_terms(f.algebra(), f.grid().dim() - 1)?, None)
}

/// `∂_0 f + Σ e_j ∂_j f`, or `∂_0 f - Σ e_j ∂_j f` when `conjugate`.
pub fn cauchy_riemann_apply(f: &CliffordField, conjugate: bool) -> Result<CliffordField> {
    let alg = f.algebra();
    let d = f.grid().dim();
    require_generators(alg, d - 1)?;
    let s = if conjugate { -1.0 } else { 1.0 };
    let mut terms = vec![(0, Multivector::one(alg))];
    for j in 1..d {
        terms.push((j, &Multivector::generator(alg, j)? * s));
    }
    first_order(f, &terms, None)
}

/// Compact (2d+1)-point Laplacian over the first `axes` grid axes.
fn laplacian_axes(f: &CliffordField, axes: usize) -> Result<CliffordField> {
    let mut out = CliffordField::zeros(f.grid(), f.algebra());
    for a in 0..axes {
        out.axpy(1.0, &f.second_partial(a)?)?;
    }
    Ok(out)
}

/// Compact Laplacian over all grid axes, componentwise.
pub fn laplacian_apply(f: &CliffordField) -> Result<CliffordField> {
    laplacian_axes(f, f.grid().dim())
}

/// Laplacian over the spatial axes of a space-time grid.
pub fn spatial_laplacian_apply(f: &CliffordField) -> Result<CliffordField> {
    laplacian_axes(f, f.grid().dim() - 1)
}

/// Central (one-sided at the ends) derivative along the time axis.
pub fn time_derivative(f: &CliffordField) -> Result<CliffordField> {
    f.partial(f.grid().dim() - 1)
}

#[derive(Clone, Copy, Debug)]
pub enum DisturbedMode<'a> {
    /// `Df + k f`, constant complex `k`.
    PlusK(Complex64),
    /// `Df + k(x) f`, scalar field `k`.
    PlusKField(&'a CliffordField),
    /// `Df + f a`, the right multiplication `M^a`.
    RightMult(&'a CliffordField),
}

pub fn disturbed_dirac_apply(f: &CliffordField, mode: DisturbedMode<'_>) -> Result<CliffordField> {
    let mut out = dirac_apply(f)?;
    match mode {
        DisturbedMode::PlusK(k) => out.axpy(k, f)?,
        DisturbedMode::PlusKField(k) => {
            // complex values allowed, but only on the scalar blade
            if k.support().iter().any(|&b| b != 0) {
                return Err(Error::NotScalar);
            }
            out.axpy(1.0, &k.product(f)?)?
        }
        DisturbedMode::RightMult(a) => out.axpy(1.0, &f.product(a)?)?,
    }
    Ok(out)
}

/// `D_x f + 𝔣 ∂_t f ± i𝔣⁺ f` (Schrödinger) or `... ± 𝔣⁺ f` (heat).
pub fn parabolic_dirac_apply(f: &CliffordField, sign: Sign, variant: ParabolicVariant) -> Result<CliffordField> {
    let alg = f.algebra();
    if !alg.witt_enabled() {
        return Err(Error::WittDisabled);
    }
    let d = f.grid().dim();
    if d < 2 {
        return Err(Error::InvalidGrid("parabolic operators need a space-time grid".into()));
    }
    let mut terms = dirac_terms(alg, d - 1)?;
    terms.push((d - 1, Multivector::witt_f(alg)?));
    let unit = match variant {
        ParabolicVariant::Schrodinger => Complex64::new(0.0, sign.value()),
        ParabolicVariant::Heat => Complex64::new(sign.value(), 0.0),
    };
    let zeroth = &Multivector::witt_f_plus(alg)? * unit;
    first_order(f, &terms, Some(&zeroth))
}

/// `Σ_{k} E_k ∂_k f` with `E_0 = e_{d}` and `E_j = -e_j e_{d}`: the Dirac-type
/// operator that right multiplication by `e_{n+1}` turns the conjugate
/// Cauchy-Riemann operator into (for scalar-valued `f`).
pub fn transmuted_dirac_apply(f: &CliffordField) -> Result<CliffordField> {
    let alg = f.algebra();
    let d = f.grid().dim();
    require_generators(alg, d)?;
    let top = Multivector::generator(alg, d)?;
    let mut terms = vec![(0, top.clone())];
    for j in 1..d {
        terms.push((j, -(&Multivector::generator(alg, j)? * &top)));
    }
    first_order(f, &terms, None)
}

/// Max difference between `(D̄ f) e_{n+1}` and [`transmuted_dirac_apply`].
pub fn transmutation_residual(f: &CliffordField) -> Result<f64> {
    f.real_scalar_values()?;
    let top = Multivector::generator(f.algebra(), f.grid().dim())?;
    let lhs = cauchy_riemann_apply(f, true)?.right_mul(&top)?;
    lhs.max_abs_diff(&transmuted_dirac_apply(f)?)
}

#[derive(Clone, Debug)]
pub enum OperatorKind {
    Dirac,
    CauchyRiemann { conjugate: bool },
    Laplacian,
    DisturbedDirac(Complex64),
    MultRight(CliffordField),
    ParabolicDirac { sign: Sign, variant: ParabolicVariant },
}

/// An operator bound to the grid it acts on.
#[derive(Clone, Debug)]
pub struct StencilOperator {
    pub kind: OperatorKind,
    pub grid: GridSpec,
}

impl StencilOperator {
    pub fn new(kind: OperatorKind, grid: GridSpec) -> Result<Self> {
        if let OperatorKind::MultRight(a) = &kind {
            a.check_grid(&grid)?;
        }
        Ok(Self { kind, grid })
    }

    pub fn apply(&self, f: &CliffordField) -> Result<CliffordField> {
        f.check_grid(&self.grid)?;
        match &self.kind {
            OperatorKind::Dirac => dirac_apply(f),
            OperatorKind::CauchyRiemann { conjugate } => cauchy_riemann_apply(f, *conjugate),
            OperatorKind::Laplacian => laplacian_apply(f),
            OperatorKind::DisturbedDirac(k) => disturbed_dirac_apply(f, DisturbedMode::PlusK(*k)),
            OperatorKind::MultRight(a) => f.product(a),
            OperatorKind::ParabolicDirac { sign, variant } => parabolic_dirac_apply(f, *sign, *variant),
        }
    }
}

/// Identities checked by [`factorization_residual`].
#[derive(Clone, Copy, Debug)]
pub enum FactorizationCase<'a> {
    /// `DDu + Δu`
    Laplace,
    /// `D D̄ u - Δu` on an `(x0, x)` grid
    CauchyRiemann,
    /// `(D+k)(D-k)u + Δu + k²u`
    Helmholtz(Complex64),
    /// `(D+M^a)(D-M^a)u + Δu + v u` with `v = Da + a²` supplied by the caller
    Miura { a: &'a CliffordField, v: &'a CliffordField },
    /// `(D±)²u + Δ_x u ∓ i∂_t u` (Schrödinger) or `∓ ∂_t u` (heat)
    Parabolic { sign: Sign, variant: ParabolicVariant },
    /// `(D±+M^a)(D±-M^a)u + Δ_x u ∓ i∂_t u + u v` with `v = D_x a + 𝔣∂_t a + a²`
    ParabolicMiura { sign: Sign, a: &'a CliffordField, v: &'a CliffordField },
}

/// `Da + a a`, the potential that makes `(D+M^a)(D-M^a) = -Δ - v` for scalar `u`.
pub fn miura_potential(a: &CliffordField) -> Result<CliffordField> {
    dirac_apply(a)?.add(&a.product(a)?)
}

/// Interior RMS of the identity rearranged to zero.
pub fn factorization_residual(case: FactorizationCase<'_>, u: &CliffordField) -> Result<f64> {
    let r = match case {
        FactorizationCase::Laplace => dirac_apply(&dirac_apply(u)?)?.add(&laplacian_apply(u)?)?,
        FactorizationCase::CauchyRiemann => {
            cauchy_riemann_apply(&cauchy_riemann_apply(u, true)?, false)?.sub(&laplacian_apply(u)?)?
        }
        FactorizationCase::Helmholtz(k) => {
            let inner = disturbed_dirac_apply(u, DisturbedMode::PlusK(-k))?;
            let mut r = disturbed_dirac_apply(&inner, DisturbedMode::PlusK(k))?;
            r.axpy(1.0, &laplacian_apply(u)?)?;
            r.axpy(k * k, u)?;
            r
        }
        FactorizationCase::Miura { a, v } => {
            let w = dirac_apply(u)?.sub(&u.product(a)?)?;
            let mut r = dirac_apply(&w)?.add(&w.product(a)?)?;
            r.axpy(1.0, &laplacian_apply(u)?)?;
            r.axpy(1.0, &v.product(u)?)?;
            r
        }
        FactorizationCase::Parabolic { sign, variant } => {
            let pu = parabolic_dirac_apply(u, sign, variant)?;
            let mut r = parabolic_dirac_apply(&pu, sign, variant)?;
            r.axpy(1.0, &spatial_laplacian_apply(u)?)?;
            r.axpy(-time_unit(sign, variant), &time_derivative(u)?)?;
            r
        }
        FactorizationCase::ParabolicMiura { sign, a, v } => {
            let variant = ParabolicVariant::Schrodinger;
            let w = parabolic_dirac_apply(u, sign, variant)?.sub(&u.product(a)?)?;
            let mut r = parabolic_dirac_apply(&w, sign, variant)?.add(&w.product(a)?)?;
            r.axpy(1.0, &spatial_laplacian_apply(u)?)?;
            r.axpy(-time_unit(sign, variant), &time_derivative(u)?)?;
            r.axpy(1.0, &u.product(v)?)?;
            r
        }
    };
    r.interior_rms(RESIDUAL_LAYER)
}

fn time_unit(sign: Sign, variant: ParabolicVariant) -> Complex64 {
    match variant {
        ParabolicVariant::Schrodinger => Complex64::new(0.0, sign.value()),
        ParabolicVariant::Heat => Complex64::new(sign.value(), 0.0),
    }
}
