//! Hydrogen bound states: energies, radial functions for s and p waves, and the
//! 1s↔np radial integrals consumed by the spectral sums.
//!
//! Radial integrals have two independent routes: exact rational integration
//! of the associated-Laguerre expansion, and adaptive quadrature of the
//! floating-point wavefunctions. Each route checks the other.

mod exact;
mod integrals;

pub(crate) use integrals::gradient_elements;

pub use integrals::{
    oscillator_strength, IntegralMethod, RadialIntegralRecord, RadialIntegrals, RadialTable, DEFAULT_EXACT_LIMIT,
};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::quadrature::QuadratureError;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum HydrogenError {
    #[error("principal quantum number must be at least 1")]
    ZeroPrincipal,
    #[error("unsupported orbital quantum number l={0} (only s and p waves)")]
    UnsupportedL(u32),
    #[error("l={l} is not allowed for n={n}")]
    InvalidL { n: u32, l: u32 },
    #[error("radius must be non-negative and finite, got {0}")]
    InvalidRadius(f64),
    #[error("1s→np integrals need n ≥ 2, got {0}")]
    NoDipolePartner(u32),
    #[error("moment power must be 1, 2 or 3, got {0}")]
    InvalidPower(u32),
    #[error("closed form and quadrature disagree for n={n}, p={p}: {closed} vs {quadrature} (rel {relative:e})")]
    MethodDisagreement {
        n: u32,
        p: u32,
        closed: f64,
        quadrature: f64,
        relative: f64,
    },
    #[error(transparent)]
    Quadrature(#[from] QuadratureError),
}

/// A bound-state label |n l⟩ restricted to s and p waves.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct BoundStateLabel {
    n: u32,
    l: u32,
}

impl BoundStateLabel {
    pub fn new(n: u32, l: u32) -> Result<Self, HydrogenError> {
        if n == 0 {
            return Err(HydrogenError::ZeroPrincipal);
        }
        if l > 1 {
            return Err(HydrogenError::UnsupportedL(l));
        }
        if l >= n {
            return Err(HydrogenError::InvalidL { n, l });
        }
        Ok(Self { n, l })
    }

    pub fn ground() -> Self {
        Self { n: 1, l: 0 }
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn l(&self) -> u32 {
        self.l
    }
}

/// Bound-state energy −1/(2n²) hartree.
pub fn energy(n: u32) -> Result<f64, HydrogenError> {
    if n == 0 {
        return Err(HydrogenError::ZeroPrincipal);
    }
    let n = f64::from(n);
    Ok(-0.5 / (n * n))
}

/// Excitation energy E_n − E_1 from the ground state, in hartree.
pub fn excitation_energy(n: u32) -> Result<f64, HydrogenError> {
    Ok(energy(n)? - energy(1)?)
}

const RESCALE: f64 = 1e150;

/// L_m^{(a)}(x) as mantissa·e^{log_scale}; the forward recurrence is rescaled
/// whenever it grows past 1e150.
fn laguerre_scaled(m: u32, a: f64, x: f64) -> (f64, f64) {
    let mut log_scale = 0.0;
    let mut prev = 1.0;
    if m == 0 {
        return (prev, log_scale);
    }
    let mut cur = 1.0 + a - x;
    for k in 1..m {
        let k = f64::from(k);
        let next = ((2.0 * k + 1.0 + a - x) * cur - (k + a) * prev) / (k + 1.0);
        prev = cur;
        cur = next;
        if cur.abs() > RESCALE {
            cur /= RESCALE;
            prev /= RESCALE;
            log_scale += RESCALE.ln();
        }
    }
    (cur, log_scale)
}

fn ln_norm(n: u32, l: u32) -> f64 {
    let nf = f64::from(n);
    let base = std::f64::consts::LN_2 - 2.5 * nf.ln();
    if l == 0 {
        base
    } else {
        base - 0.5 * (nf * nf - 1.0).ln()
    }
}

/// Normalised radial function R_{nl}(r), r in Bohr radii.
pub fn radial_wavefunction(state: BoundStateLabel, r: f64) -> Result<f64, HydrogenError> {
    if !(r >= 0.0 && r.is_finite()) {
        return Err(HydrogenError::InvalidRadius(r));
    }
    Ok(radial_unchecked(state.n, state.l, r))
}

pub(crate) fn radial_unchecked(n: u32, l: u32, r: f64) -> f64 {
    let x = 2.0 * r / f64::from(n);
    if l == 1 && x == 0.0 {
        return 0.0;
    }
    let (mantissa, log_scale) = laguerre_scaled(n - l - 1, f64::from(2 * l + 1), x);
    if mantissa == 0.0 {
        return 0.0;
    }
    let half_x = 0.5 * x;
    if log_scale == 0.0 && half_x < 600.0 {
        let prefactor = ln_norm(n, l).exp() * if l == 1 { x } else { 1.0 };
        return prefactor * (-half_x).exp() * mantissa;
    }
    let log_mag = ln_norm(n, l) + f64::from(l) * x.ln() - half_x + mantissa.abs().ln() + log_scale;
    mantissa.signum() * log_mag.exp()
}
