//! Discrete Rydberg sums over the 1s→np series with tail extrapolation.
//!
//! Every summand decays like n⁻³, so the tail beyond the truncation point is
//! modelled as a/n³ + b/n⁴, fitted to the upper half of the computed terms and
//! summed with Euler–Maclaurin.

use std::f64::consts::PI;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::hydrogen::{HydrogenError, RadialIntegralRecord, RadialIntegrals, RadialTable};
use crate::summation::CompensatedSum;

/// Default truncation for the κ and Bethe sums.
pub const DEFAULT_N_MAX: u32 = 200;
/// Default truncation for the polarizability and oscillator sums.
pub const DEFAULT_N_MAX_POLARIZABILITY: u32 = 400;
/// Bethe logarithm supplied as an external constant.
pub const DEFAULT_LOG_VALUE: f64 = -8.35;
/// Fewest points accepted by the tail fit.
pub const MIN_FIT_POINTS: usize = 8;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SpectralError {
    #[error("n_max must be at least 2, got {0}")]
    NMaxTooSmall(u32),
    #[error("radial table covers n ≤ {available}, but n_max = {requested} was requested")]
    TableTooShort { requested: u32, available: u32 },
    #[error("tail fit needs at least {need} points, got {got}")]
    TooFewFitPoints { got: usize, need: usize },
    #[error("tail terms change sign at n = {n}; power-law tail model does not apply")]
    MixedSignTerms { n: u32 },
    #[error("tail terms must be finite and indexed by consecutive n")]
    MalformedTerms,
    #[error("basis size must be at least 2, got {0}")]
    BasisTooSmall(u32),
    #[error(transparent)]
    Hydrogen(#[from] HydrogenError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Tail {
    On,
    Off,
}

impl FromStr for Tail {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "on" => Ok(Tail::On),
            "off" => Ok(Tail::Off),
            other => Err(format!("expected 'on' or 'off', got '{other}'")),
        }
    }
}

/// How the remainder beyond n_max was treated.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum TailModel {
    /// t_n ≈ a/n³ + b/n⁴ fitted on n ∈ [fit_from, fit_to].
    PowerLaw { a: f64, b: f64, fit_from: u32, fit_to: u32 },
    /// Too few terms to fit; the bound assumes t_n·n³ does not grow.
    Crude { last_term: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TailEstimate {
    pub value: f64,
    pub error: f64,
    pub model: TailModel,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectralSumResult {
    pub value: f64,
    pub n_max: u32,
    /// (n, Σ_{k≤n} t_k) for every n from 2 to n_max.
    pub partial_sums: Vec<(u32, f64)>,
    pub tail_estimate: f64,
    pub tail_model: TailModel,
    pub error_bound: f64,
}

impl SpectralSumResult {
    pub fn truncated_sum(&self) -> f64 {
        self.partial_sums.last().map_or(0.0, |&(_, s)| s)
    }
}

/// Σ_{n>N} n^{−s} for s ≥ 2: direct summation up to 20, Euler–Maclaurin beyond.
pub fn zeta_tail(s: u32, n: u32) -> f64 {
    const SWITCH: u32 = 20;
    let mut acc = CompensatedSum::new();
    let mut start = n;
    if n < SWITCH {
        for k in (n + 1..=SWITCH).rev() {
            acc.add(f64::from(k).powi(-(s as i32)));
        }
        start = SWITCH;
    }
    let x = f64::from(start);
    let s = f64::from(s);
    let p = |k: f64| x.powf(-(s + k));
    acc.add(x.powf(1.0 - s) / (s - 1.0));
    acc.add(-0.5 * p(0.0));
    acc.add(s / 12.0 * p(1.0));
    acc.add(-s * (s + 1.0) * (s + 2.0) / 720.0 * p(3.0));
    acc.add(s * (s + 1.0) * (s + 2.0) * (s + 3.0) * (s + 4.0) / 30240.0 * p(5.0));
    acc.value()
}

/// Fits the power-law tail to `terms` (consecutive n, one sign) and returns
/// the modelled Σ_{n>n_last}.
pub fn tail_extrapolate(terms: &[(u32, f64)]) -> Result<TailEstimate, SpectralError> {
    if terms.len() < MIN_FIT_POINTS {
        return Err(SpectralError::TooFewFitPoints {
            got: terms.len(),
            need: MIN_FIT_POINTS,
        });
    }
    let mut sign = 0.0;
    for (i, &(n, t)) in terms.iter().enumerate() {
        if !t.is_finite() || (i > 0 && n != terms[i - 1].0 + 1) || n == 0 {
            return Err(SpectralError::MalformedTerms);
        }
        if t != 0.0 {
            if sign == 0.0 {
                sign = t.signum();
            } else if t.signum() != sign {
                return Err(SpectralError::MixedSignTerms { n });
            }
        }
    }
    let (first, last) = (terms[0].0, terms[terms.len() - 1].0);
    if sign == 0.0 {
        return Ok(TailEstimate {
            value: 0.0,
            error: 0.0,
            model: TailModel::PowerLaw {
                a: 0.0,
                b: 0.0,
                fit_from: first,
                fit_to: last,
            },
        });
    }

    // u = n³ t = a + b x with x = 1/n, fitted about the means.
    let points: Vec<(f64, f64)> = terms
        .iter()
        .map(|&(n, t)| {
            let nf = f64::from(n);
            (1.0 / nf, t * nf * nf * nf)
        })
        .collect();
    let count = points.len() as f64;
    let mean = |f: &dyn Fn(&(f64, f64)) -> f64| {
        let mut acc = CompensatedSum::new();
        acc.extend(points.iter().map(f));
        acc.value() / count
    };
    let x_mean = mean(&|p| p.0);
    let u_mean = mean(&|p| p.1);
    let sxx = mean(&|p| (p.0 - x_mean) * (p.0 - x_mean));
    let sxu = mean(&|p| (p.0 - x_mean) * (p.1 - u_mean));
    let b = sxu / sxx;
    let a = u_mean - b * x_mean;
    let max_rel_residual = points
        .iter()
        .map(|&(x, u)| ((u - (a + b * x)) / u).abs())
        .fold(0.0, f64::max);

    let value = a * zeta_tail(3, last) + b * zeta_tail(4, last);
    let anchored = points[points.len() - 1].1 * zeta_tail(3, last);
    let error = (value - anchored).abs() + max_rel_residual * value.abs() + 8.0 * f64::EPSILON * value.abs();
    Ok(TailEstimate {
        value,
        error,
        model: TailModel::PowerLaw {
            a,
            b,
            fit_from: first,
            fit_to: last,
        },
    })
}

fn crude_tail(n: u32, t: f64) -> TailEstimate {
    let nf = f64::from(n);
    TailEstimate {
        value: 0.0,
        error: 2.0 * (t * nf * nf * nf).abs() * zeta_tail(3, n),
        model: TailModel::Crude { last_term: t },
    }
}

fn sum_terms(terms: &[(u32, f64)], tail: Tail) -> Result<SpectralSumResult, SpectralError> {
    let mut acc = CompensatedSum::new();
    let partial_sums: Vec<(u32, f64)> = terms
        .iter()
        .map(|&(n, t)| {
            acc.add(t);
            (n, acc.value())
        })
        .collect();
    let truncated = acc.value();
    let &(n_max, t_last) = terms.last().expect("n_max >= 2 gives at least one term");
    let window = &terms[terms.partition_point(|&(n, _)| n < n_max / 2)..];
    let fitted = match tail_extrapolate(window) {
        Ok(t) => Some(t),
        Err(SpectralError::TooFewFitPoints { .. }) => None,
        Err(e) => return Err(e),
    };
    let (tail_estimate, tail_model, error_bound) = match (tail, fitted) {
        (Tail::On, Some(t)) => (t.value, t.model, t.error),
        (Tail::Off, Some(t)) => (0.0, t.model, 1.1 * t.value.abs() + t.error),
        (_, None) => {
            let t = crude_tail(n_max, t_last);
            (0.0, t.model, t.error)
        }
    };
    Ok(SpectralSumResult {
        value: truncated + tail_estimate,
        n_max,
        partial_sums,
        tail_estimate,
        tail_model,
        error_bound,
    })
}

pub fn kappa1_term(r: &RadialIntegralRecord) -> f64 {
    let de = r.excitation_energy();
    2.0 / 27.0 * r.i1 * r.i3 / (de * de)
}

pub fn kappa2_term(r: &RadialIntegralRecord) -> f64 {
    1.0 / 27.0 * r.i2 * r.i3 / r.excitation_energy()
}

pub fn polarizability_term(r: &RadialIntegralRecord) -> f64 {
    2.0 / 3.0 * r.i3 * r.i3 / r.excitation_energy()
}

pub fn bethe_term(r: &RadialIntegralRecord) -> f64 {
    r.i2 * r.i2
}

/// Radial table plus the sums built from it.
#[derive(Debug, Clone)]
pub struct SpectralSums {
    table: RadialTable,
}

impl SpectralSums {
    /// Computes radial integrals for n = 2..=n_max with default settings.
    pub fn compute(n_max: u32) -> Result<Self, SpectralError> {
        Self::with_engine(&RadialIntegrals::default(), n_max)
    }

    pub fn with_engine(engine: &RadialIntegrals, n_max: u32) -> Result<Self, SpectralError> {
        if n_max < 2 {
            return Err(SpectralError::NMaxTooSmall(n_max));
        }
        Ok(Self {
            table: engine.table(n_max)?,
        })
    }

    pub fn from_table(table: RadialTable) -> Self {
        Self { table }
    }

    pub fn table(&self) -> &RadialTable {
        &self.table
    }

    pub fn sum(
        &self,
        n_max: u32,
        tail: Tail,
        term: impl Fn(&RadialIntegralRecord) -> f64,
    ) -> Result<SpectralSumResult, SpectralError> {
        if n_max < 2 {
            return Err(SpectralError::NMaxTooSmall(n_max));
        }
        if n_max > self.table.n_max() {
            return Err(SpectralError::TableTooShort {
                requested: n_max,
                available: self.table.n_max(),
            });
        }
        let terms: Vec<(u32, f64)> = self.table.up_to(n_max).iter().map(|r| (r.n, term(r))).collect();
        sum_terms(&terms, tail)
    }

    /// κ₁(D) = (2/27) Σ I₁ I₃ / ΔE².
    pub fn kappa1(&self, n_max: u32, tail: Tail) -> Result<SpectralSumResult, SpectralError> {
        self.sum(n_max, tail, kappa1_term)
    }

    /// κ₂(D) = (1/27) Σ I₂ I₃ / ΔE.
    pub fn kappa2(&self, n_max: u32, tail: Tail) -> Result<SpectralSumResult, SpectralError> {
        self.sum(n_max, tail, kappa2_term)
    }

    /// Bound-state part of α(0) = (2/3) Σ I₃² / ΔE, in units of 4πε₀a₀³.
    pub fn polarizability(&self, n_max: u32, tail: Tail) -> Result<SpectralSumResult, SpectralError> {
        self.sum(n_max, tail, polarizability_term)
    }

    /// S_B = Σ I₂².
    pub fn bethe(&self, n_max: u32, tail: Tail) -> Result<SpectralSumResult, SpectralError> {
        self.sum(n_max, tail, bethe_term)
    }

    /// Σ f_n over bound np states.
    pub fn oscillator_sum(&self, n_max: u32, tail: Tail) -> Result<SpectralSumResult, SpectralError> {
        self.sum(n_max, tail, crate::hydrogen::oscillator_strength)
    }
}

pub fn kappa1_discrete(n_max: u32, tail: Tail) -> Result<SpectralSumResult, SpectralError> {
    SpectralSums::compute(n_max)?.kappa1(n_max, tail)
}

pub fn kappa2_discrete(n_max: u32, tail: Tail) -> Result<SpectralSumResult, SpectralError> {
    SpectralSums::compute(n_max)?.kappa2(n_max, tail)
}

pub fn polarizability_discrete(n_max: u32, tail: Tail) -> Result<SpectralSumResult, SpectralError> {
    SpectralSums::compute(n_max)?.polarizability(n_max, tail)
}

pub fn bethe_sum(n_max: u32, tail: Tail) -> Result<SpectralSumResult, SpectralError> {
    SpectralSums::compute(n_max)?.bethe(n_max, tail)
}

/// Coefficient of α³ in N = (1/π)(−L − 1/2) S_B.
pub fn normalization_constant(log_value: f64, bethe: f64) -> f64 {
    (-log_value - 0.5) * bethe / PI
}

/// Ground state dressed to first order by a static field F along z, truncated
/// to the np₀ states with n ≤ basis_size.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PerturbedGroundState {
    pub basis_size: u32,
    pub field: f64,
    /// (n, c_n) with c_n = −F·⟨np₀|z|1s⟩/ΔE_n.
    pub coefficients: Vec<(u32, f64)>,
}

impl PerturbedGroundState {
    pub fn new(basis_size: u32, field: f64) -> Result<Self, SpectralError> {
        if basis_size < 2 {
            return Err(SpectralError::BasisTooSmall(basis_size));
        }
        let engine = RadialIntegrals::with_exact_limit(basis_size);
        let coefficients = (2..=basis_size)
            .map(|n| {
                let r = engine.closed_form(n)?;
                Ok((n, -field * r.i3 / (3f64.sqrt() * r.excitation_energy())))
            })
            .collect::<Result<Vec<_>, SpectralError>>()?;
        Ok(Self {
            basis_size,
            field,
            coefficients,
        })
    }
}

/// |⟨ψ|p_z|ψ⟩| in the truncated basis. p_z = −i∂_z has vanishing s–s and
/// p–p elements by parity, so only the 1s↔np cross terms contribute.
pub fn first_moment_residual(state: &PerturbedGroundState) -> Result<f64, SpectralError> {
    let minus_i = Complex64::new(0.0, -1.0);
    let mut re = CompensatedSum::new();
    let mut im = CompensatedSum::new();
    for &(n, c) in &state.coefficients {
        let (to_excited, to_ground) = crate::hydrogen::gradient_elements(n)?;
        let c = Complex64::new(c, 0.0);
        for element in [to_excited, to_ground] {
            let term = c * minus_i * element;
            re.add(term.re);
            im.add(term.im);
        }
    }
    Ok(Complex64::new(re.value(), im.value()).norm())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::sync::OnceLock;

    fn sums() -> &'static SpectralSums {
        static SUMS: OnceLock<SpectralSums> = OnceLock::new();
        SUMS.get_or_init(|| SpectralSums::compute(400).unwrap())
    }

    #[test]
    fn n2_terms() {
        let s = sums();
        let t = |r: SpectralSumResult| r.value;
        assert!((t(s.kappa1(2, Tail::Off).unwrap()) - 0.16441).abs() < 1e-4);
        assert!((t(s.kappa2(2, Tail::Off).unwrap()) - 0.061660).abs() < 1e-4);
        assert!((t(s.polarizability(2, Tail::Off).unwrap()) - 2.9599).abs() < 1e-3);
        assert!((t(s.bethe(2, Tail::Off).unwrap()) - 0.234069).abs() < 1e-4);
        let r = s.kappa1(2, Tail::Off).unwrap();
        assert_eq!(r.value, kappa1_term(s.table().get(2).unwrap()));
        assert_eq!(r.partial_sums, vec![(2, r.value)]);
    }

    #[test]
    fn frozen_truncated_sums() {
        let s = sums();
        let close = |a: f64, b: f64| ((a - b) / b).abs() < 1e-11;
        assert!(close(s.kappa1(200, Tail::Off).unwrap().value, 0.20874326650547398));
        assert!(close(s.kappa2(200, Tail::Off).unwrap().value, 0.07961870487955583));
        assert!(close(
            s.polarizability(400, Tail::Off).unwrap().value,
            3.6632384021251485
        ));
        assert!(close(s.bethe(200, Tail::Off).unwrap().value, 0.3370023926221345));
        assert!(close(
            s.oscillator_sum(400, Tail::Off).unwrap().value,
            0.5649992786591447
        ));
    }

    #[test]
    fn value_is_partial_plus_tail() {
        let r = sums().kappa1(120, Tail::On).unwrap();
        assert_eq!(r.value, r.truncated_sum() + r.tail_estimate);
        assert_eq!(r.partial_sums.len(), 119);
        assert!(matches!(
            r.tail_model,
            TailModel::PowerLaw {
                fit_from: 60,
                fit_to: 120,
                ..
            }
        ));
    }

    #[test]
    fn doubling_within_error_bound() {
        let s = sums();
        type SumFn = fn(&SpectralSums, u32, Tail) -> Result<SpectralSumResult, SpectralError>;
        let all: [SumFn; 5] = [
            SpectralSums::kappa1,
            SpectralSums::kappa2,
            SpectralSums::polarizability,
            SpectralSums::bethe,
            SpectralSums::oscillator_sum,
        ];
        for f in all {
            for tail in [Tail::On, Tail::Off] {
                for n in [10, 25, 50, 100, 200] {
                    let lo = f(s, n, tail).unwrap();
                    let hi = f(s, 2 * n, tail).unwrap();
                    assert!(
                        (lo.value - hi.value).abs() <= lo.error_bound,
                        "n={n} {tail:?}: {} vs {} bound {}",
                        lo.value,
                        hi.value,
                        lo.error_bound
                    );
                }
            }
        }
    }

    #[test]
    fn tail_consistency_100_vs_200() {
        let s = sums();
        for f in [SpectralSums::kappa1, SpectralSums::kappa2, SpectralSums::bethe] {
            let a = f(s, 100, Tail::On).unwrap();
            let b = f(s, 200, Tail::On).unwrap();
            assert!((a.value - b.value).abs() <= a.error_bound + b.error_bound);
        }
    }

    #[test]
    fn kappa1_positive_and_monotone() {
        let r = sums().kappa1(200, Tail::Off).unwrap();
        let mut last = 0.0;
        for &(_, v) in &r.partial_sums {
            assert!(v > last);
            last = v;
        }
        let k2 = sums();
        assert!(k2.kappa2(50, Tail::Off).unwrap().value < k2.kappa2(100, Tail::Off).unwrap().value);
    }

    #[test]
    fn discrete_bounds() {
        let s = sums();
        let p = s.polarizability(400, Tail::On).unwrap();
        assert!(p.value < 4.5);
        for &(_, v) in &s.oscillator_sum(400, Tail::Off).unwrap().partial_sums {
            assert!(v < 1.0);
        }
    }

    #[test]
    fn deterministic() {
        let a = SpectralSums::compute(150).unwrap().kappa1(150, Tail::On).unwrap();
        let b = SpectralSums::compute(150).unwrap().kappa1(150, Tail::On).unwrap();
        assert_eq!(a.value.to_bits(), b.value.to_bits());
        assert_eq!(a, b);
    }

    #[test]
    fn table_bounds_checked() {
        assert_eq!(
            sums().kappa1(401, Tail::On).unwrap_err(),
            SpectralError::TableTooShort {
                requested: 401,
                available: 400
            }
        );
        assert_eq!(sums().bethe(1, Tail::On).unwrap_err(), SpectralError::NMaxTooSmall(1));
    }

    #[test]
    fn zeta_tail_oracle() {
        assert!((zeta_tail(3, 100) / 4.950249991667e-5 - 1.0).abs() < 1e-10);
        // Σ_{n>1} n⁻² = π²/6 − 1
        assert!((zeta_tail(2, 1) - (PI * PI / 6.0 - 1.0)).abs() < 1e-13);
    }

    #[test]
    fn tail_of_pure_cube() {
        let terms: Vec<(u32, f64)> = (50..=100).map(|n| (n, 1.0 / f64::from(n).powi(3))).collect();
        let t = tail_extrapolate(&terms).unwrap();
        assert!((t.value / 4.950249991667e-5 - 1.0).abs() < 1e-10);
        assert!(t.error < 1e-15);
    }

    #[test]
    fn tail_contract_cases() {
        let zeros: Vec<(u32, f64)> = (50..=100).map(|n| (n, 0.0)).collect();
        assert_eq!(tail_extrapolate(&zeros).unwrap().value, 0.0);
        let alt: Vec<(u32, f64)> = (50..=100)
            .map(|n| (n, if n % 2 == 0 { 1.0 } else { -1.0 } / f64::from(n).powi(3)))
            .collect();
        assert!(matches!(
            tail_extrapolate(&alt),
            Err(SpectralError::MixedSignTerms { .. })
        ));
        assert!(matches!(
            tail_extrapolate(&zeros[..5]),
            Err(SpectralError::TooFewFitPoints { .. })
        ));
        let gap = vec![
            (10, 1.0),
            (12, 1.0),
            (13, 1.0),
            (14, 1.0),
            (15, 1.0),
            (16, 1.0),
            (17, 1.0),
            (18, 1.0),
        ];
        assert_eq!(tail_extrapolate(&gap), Err(SpectralError::MalformedTerms));
    }

    #[test]
    fn normalization_examples() {
        assert!((normalization_constant(-8.35, 0.336) - 0.8395).abs() < 0.01);
        assert_eq!(normalization_constant(-0.5, 0.3), 0.0);
        assert_eq!(normalization_constant(-8.35, 0.0), 0.0);
    }

    #[test]
    fn first_moment_vanishes() {
        for n in [2, 3, 10, 40] {
            let state = PerturbedGroundState::new(n, 1.0).unwrap();
            assert!(first_moment_residual(&state).unwrap() <= 1e-14);
        }
        let zero = PerturbedGroundState::new(5, 0.0).unwrap();
        assert_eq!(first_moment_residual(&zero).unwrap(), 0.0);
        assert!(PerturbedGroundState::new(1, 1.0).is_err());
    }

    #[test]
    fn perturbed_coefficients_decay() {
        let s = PerturbedGroundState::new(60, 1.0).unwrap();
        let scaled: Vec<f64> = s
            .coefficients
            .iter()
            .map(|&(n, c)| c.abs() * f64::from(n).powf(1.5))
            .collect();
        let (a, b) = (scaled[scaled.len() - 2], scaled[scaled.len() - 1]);
        assert!(((a - b) / b).abs() < 1e-2);
    }

    proptest! {
        #[test]
        fn recovers_two_term_power_law(a in 0.1f64..10.0, ratio in -0.5f64..0.5, n_max in 40u32..300) {
            let b = ratio * a * 10.0;
            let terms: Vec<(u32, f64)> = (n_max / 2..=n_max)
                .map(|n| {
                    let nf = f64::from(n);
                    (n, a / nf.powi(3) + b / nf.powi(4))
                })
                .collect();
            let t = tail_extrapolate(&terms).unwrap();
            let exact = a * zeta_tail(3, n_max) + b * zeta_tail(4, n_max);
            prop_assert!(((t.value - exact) / exact).abs() < 1e-9);
            prop_assert!(t.error >= (t.value - exact).abs());
        }
    }
}
