//! Cutoff-regularised divergent integrals: the vacuum mass density of a
//! dielectric, the nonrelativistic electromagnetic mass shift, and the
//! resulting shift of the inverse reduced mass.
//!
//! Every integral has a closed-form antiderivative and a quadrature route;
//! the two are compared on each call that requests it.

use std::f64::consts::{LN_2, PI};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::quadrature::{integrate_panels, QuadratureError, QuadratureSpec};
use crate::units::{AtomicParams, PhysicalConstants, Quantity};

/// Relative route disagreement treated as a hard failure.
const HARD_DISAGREEMENT: f64 = 1e-8;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum RenormalizationError {
    #[error("dispersionless model needs ε_r > 1, got {0}")]
    InvalidPermittivity(f64),
    #[error("free-electron model needs n_e > 0, got {0}")]
    InvalidDensity(f64),
    #[error("cutoff must be positive and finite, got {0}")]
    InvalidCutoff(f64),
    #[error("mass must be positive and finite, got {0}")]
    InvalidMass(f64),
    #[error("mass shift {shift} must be smaller than the mass {mass}")]
    ShiftTooLarge { mass: f64, shift: f64 },
    #[error("closed form {closed} and quadrature {quadrature} disagree (rel {relative:e})")]
    RouteDisagreement {
        closed: f64,
        quadrature: f64,
        relative: f64,
    },
    #[error("need at least 4 cutoffs, got {0}")]
    TooFewCutoffs(usize),
    #[error("cutoffs must be geometrically spaced and ascending")]
    NotGeometric,
    #[error("values are not monotone in the cutoff")]
    NonMonotone,
    #[error(transparent)]
    Quadrature(#[from] QuadratureError),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum DispersionModel {
    /// Constant relative permittivity.
    Dispersionless { epsilon_r: f64 },
    /// ε_r(ω) = 1 − n_e e²/(ε₀ mₑ ω²), n_e in m⁻³.
    FreeElectron { n_e: f64 },
}

impl DispersionModel {
    pub fn validate(&self) -> Result<(), RenormalizationError> {
        match *self {
            Self::Dispersionless { epsilon_r } if !(epsilon_r > 1.0 && epsilon_r.is_finite()) => {
                Err(RenormalizationError::InvalidPermittivity(epsilon_r))
            }
            Self::FreeElectron { n_e } if !(n_e > 0.0 && n_e.is_finite()) => {
                Err(RenormalizationError::InvalidDensity(n_e))
            }
            _ => Ok(()),
        }
    }

    pub fn description(&self) -> String {
        match *self {
            Self::Dispersionless { epsilon_r } => format!("dispersionless, eps_r = {epsilon_r}"),
            Self::FreeElectron { n_e } => format!("free-electron plasma, n_e = {n_e} m^-3"),
        }
    }

    /// Plasma frequency in rad/s, for the free-electron model.
    pub fn plasma_frequency(&self, c: &PhysicalConstants) -> Option<f64> {
        match *self {
            Self::FreeElectron { n_e } => Some(
                (n_e * c.elementary_charge * c.elementary_charge / (c.vacuum_permittivity * c.electron_mass)).sqrt(),
            ),
            Self::Dispersionless { .. } => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum CutoffScheme {
    /// Upper angular frequency in rad/s.
    Frequency { omega_max: f64 },
    /// Shortest length in m; ω_max = π c₀ / l_min.
    Length { l_min: f64 },
}

impl CutoffScheme {
    pub fn omega_max(&self, c: &PhysicalConstants) -> Result<f64, RenormalizationError> {
        let (v, omega) = match *self {
            Self::Frequency { omega_max } => (omega_max, omega_max),
            Self::Length { l_min } => (l_min, PI * c.light_speed / l_min),
        };
        if v > 0.0 && v.is_finite() {
            Ok(omega)
        } else {
            Err(RenormalizationError::InvalidCutoff(v))
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CasimirDensity {
    /// ρ_C in kg/m³ from the closed form.
    pub value: f64,
    /// Same quantity by quadrature.
    pub quadrature: f64,
    pub omega_max: f64,
    /// Set when a free-electron cutoff lies below the plasma frequency.
    pub below_plasma: bool,
}

fn check_routes(closed: f64, quadrature: f64) -> Result<(), RenormalizationError> {
    let scale = closed.abs().max(quadrature.abs());
    let relative = if scale == 0.0 {
        0.0
    } else {
        (closed - quadrature).abs() / scale
    };
    if relative <= HARD_DISAGREEMENT {
        Ok(())
    } else {
        Err(RenormalizationError::RouteDisagreement {
            closed,
            quadrature,
            relative,
        })
    }
}

fn tight_spec() -> QuadratureSpec {
    QuadratureSpec {
        abs_tol: f64::MIN_POSITIVE,
        rel_tol: 1e-13,
        max_subdivisions: 5000,
        ..QuadratureSpec::default()
    }
}

/// ρ_C = (2/3)(ħ/(π³c₀⁵)) ∫₀^{ω_max} (ε_r(ω) − 1) ω³ dω, in kg/m³.
///
/// The integral is evaluated in x = ω/ω_au, ω_au = E_h/ħ, and converted to SI
/// at the end.
pub fn casimir_mass_density(
    model: &DispersionModel,
    cutoff: &CutoffScheme,
    c: &PhysicalConstants,
) -> Result<CasimirDensity, RenormalizationError> {
    model.validate()?;
    let omega_max = cutoff.omega_max(c)?;
    let omega_au = c.atomic_unit(Quantity::AngularFrequency);
    let x_max = omega_max / omega_au;
    let (closed, quadrature, below_plasma) = match *model {
        DispersionModel::Dispersionless { epsilon_r } => {
            let chi = epsilon_r - 1.0;
            let q = integrate_panels(|x| chi * x * x * x, &[0.0, x_max], &tight_spec())?;
            (chi * x_max.powi(4) / 4.0, q.value, false)
        }
        DispersionModel::FreeElectron { .. } => {
            let omega_p = model.plasma_frequency(c).expect("free-electron model");
            let xp2 = (omega_p / omega_au).powi(2);
            let q = integrate_panels(|x| -xp2 * x, &[0.0, x_max], &tight_spec())?;
            (-xp2 * x_max * x_max / 2.0, q.value, omega_max < omega_p)
        }
    };
    check_routes(closed, quadrature)?;
    let prefactor = 2.0 / 3.0 * c.hbar * omega_au.powi(4) / (PI.powi(3) * c.light_speed.powi(5));
    Ok(CasimirDensity {
        value: prefactor * closed,
        quadrature: prefactor * quadrature,
        omega_max,
        below_plasma,
    })
}

/// ħ, c₀ and α in whatever consistent unit system the masses use.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UnitContext {
    pub hbar: f64,
    pub c0: f64,
    pub alpha: f64,
}

impl UnitContext {
    /// Hartree atomic units: ħ = 1, c₀ = 1/α.
    pub fn atomic(alpha: f64) -> Self {
        Self {
            hbar: 1.0,
            c0: 1.0 / alpha,
            alpha,
        }
    }

    pub fn si(c: &PhysicalConstants) -> Self {
        Self {
            hbar: c.hbar,
            c0: c.light_speed,
            alpha: c.fine_structure_alpha,
        }
    }

    /// Wavenumber 2mc₀/ħ at which the log argument doubles.
    pub fn crossover_wavenumber(&self, m: f64) -> f64 {
        2.0 * m * self.c0 / self.hbar
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MassRoute {
    Quadrature,
    ClosedForm,
    /// Both routes; fails if they disagree beyond 1e-8 relative.
    CrossChecked,
}

fn delta_mass_closed(m: f64, lambda: f64, ctx: &UnitContext) -> f64 {
    8.0 * ctx.alpha * m / (3.0 * PI) * (ctx.hbar * lambda / (2.0 * m * ctx.c0)).ln_1p()
}

/// (4/3π) α ħ² ∫₀^Λ k dk / (ħ²k²/2m + ħc₀k), with k = k₀ s, k₀ = 2mc₀/ħ.
fn delta_mass_quadrature(m: f64, lambda: f64, ctx: &UnitContext) -> Result<f64, RenormalizationError> {
    let s_max = lambda / ctx.crossover_wavenumber(m);
    let mut points = vec![0.0];
    let mut s = 1.0 / 1024.0;
    while s < s_max {
        points.push(s);
        s *= 2.0;
    }
    points.push(s_max);
    let est = integrate_panels(|s| 1.0 / (1.0 + s), &points, &tight_spec())?;
    Ok(8.0 * ctx.alpha * m / (3.0 * PI) * est.value)
}

/// Electromagnetic mass shift δm(Λ) for a particle of mass m.
pub fn delta_mass(m: f64, lambda: f64, route: MassRoute, ctx: &UnitContext) -> Result<f64, RenormalizationError> {
    if !(m > 0.0 && m.is_finite()) {
        return Err(RenormalizationError::InvalidMass(m));
    }
    if !(lambda >= 0.0 && lambda.is_finite()) {
        return Err(RenormalizationError::InvalidCutoff(lambda));
    }
    if lambda == 0.0 {
        return Ok(0.0);
    }
    match route {
        MassRoute::ClosedForm => Ok(delta_mass_closed(m, lambda, ctx)),
        MassRoute::Quadrature => delta_mass_quadrature(m, lambda, ctx),
        MassRoute::CrossChecked => {
            let closed = delta_mass_closed(m, lambda, ctx);
            check_routes(closed, delta_mass_quadrature(m, lambda, ctx)?)?;
            Ok(closed)
        }
    }
}

/// Large-Λ limit of δm(2Λ) − δm(Λ): (8αm/3π) ln 2.
pub fn delta_mass_doubling_limit(m: f64, ctx: &UnitContext) -> f64 {
    8.0 * ctx.alpha * m / (3.0 * PI) * LN_2
}

fn check_shift(mass: f64, shift: f64) -> Result<(), RenormalizationError> {
    if !shift.is_finite() || shift.abs() >= mass {
        Err(RenormalizationError::ShiftTooLarge { mass, shift })
    } else {
        Ok(())
    }
}

/// δ(1/μ) = −δm₁/m₁² − δm₂/m₂².
pub fn reduced_mass_shift(params: &AtomicParams, dm1: f64, dm2: f64) -> Result<f64, RenormalizationError> {
    check_shift(params.m1, dm1)?;
    check_shift(params.m2, dm2)?;
    Ok(-dm1 / (params.m1 * params.m1) - dm2 / (params.m2 * params.m2))
}

/// Central difference [1/μ(m+δm) − 1/μ(m−δm)]/2 of the exact inverse reduced mass.
pub fn reduced_mass_shift_two_sided(params: &AtomicParams, dm1: f64, dm2: f64) -> Result<f64, RenormalizationError> {
    check_shift(params.m1, dm1)?;
    check_shift(params.m2, dm2)?;
    let inv_mu = |a: f64, b: f64| 1.0 / a + 1.0 / b;
    let up = inv_mu(params.m1 + dm1, params.m2 + dm2);
    let down = inv_mu(params.m1 - dm1, params.m2 - dm2);
    Ok(0.5 * (up - down))
}

/// Mass shifts of both particles at a common cutoff, with the totals built
/// from the same two numbers.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MassRenormalization {
    pub lambda: f64,
    pub delta_m1: f64,
    pub delta_m2: f64,
    /// δM = δm₁ + δm₂, absorbed into the total inertial mass.
    pub delta_total_mass: f64,
    /// δ(1/μ) from the same δm₁, δm₂.
    pub delta_inverse_reduced_mass: f64,
}

pub fn mass_renormalization(
    params: &AtomicParams,
    lambda: f64,
    route: MassRoute,
) -> Result<MassRenormalization, RenormalizationError> {
    let ctx = UnitContext::atomic(params.alpha);
    let delta_m1 = delta_mass(params.m1, lambda, route, &ctx)?;
    let delta_m2 = delta_mass(params.m2, lambda, route, &ctx)?;
    Ok(MassRenormalization {
        lambda,
        delta_m1,
        delta_m2,
        delta_total_mass: delta_m1 + delta_m2,
        delta_inverse_reduced_mass: reduced_mass_shift(params, delta_m1, delta_m2)?,
    })
}

/// Least-squares slope of log|value| against log(cutoff).
///
/// Cutoffs must be ascending, geometrically spaced and at least four; the
/// magnitudes must be strictly increasing.
pub fn fit_divergence_exponent(points: &[(f64, f64)]) -> Result<f64, RenormalizationError> {
    if points.len() < 4 {
        return Err(RenormalizationError::TooFewCutoffs(points.len()));
    }
    if points.iter().any(|&(x, _)| !(x > 0.0 && x.is_finite())) {
        return Err(RenormalizationError::NotGeometric);
    }
    let ratio = points[1].0 / points[0].0;
    let geometric = ratio > 1.0
        && points
            .windows(2)
            .all(|w| ((w[1].0 / w[0].0) / ratio - 1.0).abs() < 1e-9);
    if !geometric {
        return Err(RenormalizationError::NotGeometric);
    }
    if points.windows(2).any(|w| !(w[1].1.abs() > w[0].1.abs())) || points[0].1 == 0.0 {
        return Err(RenormalizationError::NonMonotone);
    }
    let logs: Vec<(f64, f64)> = points.iter().map(|&(x, v)| (x.ln(), v.abs().ln())).collect();
    let n = logs.len() as f64;
    let mx = logs.iter().map(|p| p.0).sum::<f64>() / n;
    let my = logs.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = logs.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = logs.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    Ok(sxy / sxx)
}

/// Divergence exponent of ρ_C over a grid of frequency cutoffs (rad/s).
pub fn divergence_exponent(
    model: &DispersionModel,
    omega_grid: &[f64],
    c: &PhysicalConstants,
) -> Result<f64, RenormalizationError> {
    let values = omega_grid
        .par_iter()
        .map(|&w| casimir_mass_density(model, &CutoffScheme::Frequency { omega_max: w }, c).map(|r| (w, r.value)))
        .collect::<Result<Vec<_>, _>>()?;
    fit_divergence_exponent(&values)
}

/// Same fit applied to δm(Λ) over a wavenumber grid.
pub fn delta_mass_divergence_exponent(
    m: f64,
    lambda_grid: &[f64],
    ctx: &UnitContext,
) -> Result<f64, RenormalizationError> {
    let values = lambda_grid
        .par_iter()
        .map(|&l| delta_mass(m, l, MassRoute::ClosedForm, ctx).map(|v| (l, v)))
        .collect::<Result<Vec<_>, _>>()?;
    fit_divergence_exponent(&values)
}

/// Geometric grid of `count` points from `start` with the given ratio.
pub fn geometric_grid(start: f64, ratio: f64, count: usize) -> Vec<f64> {
    (0..count).map(|i| start * ratio.powi(i as i32)).collect()
}
