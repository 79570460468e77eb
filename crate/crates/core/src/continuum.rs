//! Continuum (plane-wave) contributions κ₁(C) and κ₂(C) as integrals over
//! y = q·a₀ from a lower cutoff y_min to infinity.

use std::f64::consts::PI;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::quadrature::{integrate_to_infinity, QuadratureError, QuadratureSpec};

/// Lower cutoff adopted for the continuum parts of the κ totals.
pub const ADOPTED_Y_MIN: f64 = 1.0;

const KAPPA1_PREFACTOR: f64 = 8.0 / 27.0 * 16.0 / PI;
const KAPPA2_PREFACTOR: f64 = 256.0 / (27.0 * PI);
const SERIES_SWITCH: f64 = 1e-3;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ContinuumError {
    #[error("y_min must be finite and non-negative, got {0}")]
    InvalidYMin(f64),
    #[error("y_min grid is empty")]
    EmptyGrid,
    #[error("y_min grid must be strictly ascending")]
    UnsortedGrid,
    #[error(transparent)]
    Quadrature(#[from] QuadratureError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Kappa {
    Kappa1,
    Kappa2,
}

impl FromStr for Kappa {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "kappa1" => Ok(Kappa::Kappa1),
            "kappa2" => Ok(Kappa::Kappa2),
            other => Err(format!("expected 'kappa1' or 'kappa2', got '{other}'")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ContinuumResult {
    pub value: f64,
    pub y_min: f64,
    pub estimated_error: f64,
}

/// arctan(y)/y² − 1/(y√(1+y²)), with its series below 1e-3.
pub fn kappa1_bracket(y: f64) -> f64 {
    if y < SERIES_SWITCH {
        let y2 = y * y;
        y / 6.0 - 7.0 * y * y2 / 40.0
    } else {
        y.atan() / (y * y) - 1.0 / (y * (1.0 + y * y).sqrt())
    }
}

/// y³/(y²+1)³ · bracket(y), without the prefactor.
pub fn kappa1_integrand(y: f64) -> f64 {
    let d = 1.0 + y * y;
    y * y * y / (d * d * d) * kappa1_bracket(y)
}

/// y⁴/(y²+1)⁶, without the prefactor.
pub fn kappa2_integrand(y: f64) -> f64 {
    let d = 1.0 + y * y;
    let d3 = d * d * d;
    y * y * y * y / (d3 * d3)
}

fn check_y_min(y_min: f64) -> Result<(), ContinuumError> {
    if y_min.is_finite() && y_min >= 0.0 {
        Ok(())
    } else {
        Err(ContinuumError::InvalidYMin(y_min))
    }
}

fn integrate(
    prefactor: f64,
    integrand: fn(f64) -> f64,
    tail: impl Fn(f64) -> f64,
    y_min: f64,
    spec: &QuadratureSpec,
) -> Result<ContinuumResult, ContinuumError> {
    check_y_min(y_min)?;
    let spec = QuadratureSpec {
        upper_cut: spec.upper_cut.max(2.0 * y_min + 1.0),
        abs_tol: spec.abs_tol / prefactor,
        ..*spec
    };
    let est = integrate_to_infinity(integrand, y_min, &spec, tail)?;
    Ok(ContinuumResult {
        value: prefactor * est.value,
        y_min,
        estimated_error: prefactor * est.error,
    })
}

/// κ₁(C) = (8/27)(16/π) ∫_{y_min}^∞ y³/(y²+1)³ (arctan y/y² − 1/(y√(y²+1))) dy.
pub fn kappa1_continuum(y_min: f64, spec: &QuadratureSpec) -> Result<ContinuumResult, ContinuumError> {
    // integrand ≤ (π/2) y⁻⁵
    integrate(
        KAPPA1_PREFACTOR,
        kappa1_integrand,
        |y| PI / (8.0 * y.powi(4)),
        y_min,
        spec,
    )
}

/// κ₂(C) = (256/27π) ∫_{y_min}^∞ y⁴/(y²+1)⁶ dy.
pub fn kappa2_continuum(y_min: f64, spec: &QuadratureSpec) -> Result<ContinuumResult, ContinuumError> {
    // integrand ≤ y⁻⁸
    integrate(
        KAPPA2_PREFACTOR,
        kappa2_integrand,
        |y| 1.0 / (7.0 * y.powi(7)),
        y_min,
        spec,
    )
}

/// Closed form of κ₂(C) via y = tan θ; loses relative accuracy for large y_min.
pub fn kappa2_continuum_closed_form(y_min: f64) -> f64 {
    let t = y_min.atan();
    let s = |k: f64| (k * t).sin();
    let integral = 3.0 * (PI / 2.0 - t) / 256.0
        - (s(2.0) / 512.0 - s(4.0) / 256.0 - s(6.0) / 1024.0 + s(8.0) / 2048.0 + s(10.0) / 5120.0);
    KAPPA2_PREFACTOR * integral
}

pub fn continuum(which: Kappa, y_min: f64, spec: &QuadratureSpec) -> Result<ContinuumResult, ContinuumError> {
    match which {
        Kappa::Kappa1 => kappa1_continuum(y_min, spec),
        Kappa::Kappa2 => kappa2_continuum(y_min, spec),
    }
}

/// One row per grid point, evaluated in parallel and returned in grid order.
pub fn ymin_sensitivity(
    which: Kappa,
    grid: &[f64],
    spec: &QuadratureSpec,
) -> Result<Vec<ContinuumResult>, ContinuumError> {
    if grid.is_empty() {
        return Err(ContinuumError::EmptyGrid);
    }
    for &y in grid {
        check_y_min(y)?;
    }
    if grid.windows(2).any(|w| w[0] >= w[1]) {
        return Err(ContinuumError::UnsortedGrid);
    }
    grid.par_iter().map(|&y| continuum(which, y, spec)).collect()
}
