//! 1s→np radial integrals I_p(n) = ∫₀^∞ R₁₀ R_{n1} r^p dr, p ∈ {1, 2, 3}.
//!
//! Summing over the three m sublevels and Cartesian components leaves the
//! product of radial integrals with unit angular weight, so the records hold
//! radial numbers only.

use num_bigint::BigInt;
use num_rational::BigRational;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::exact::{norm_squared, normalized_value, ExpPoly};
use super::{excitation_energy, radial_unchecked, HydrogenError};
use crate::quadrature::{integrate_panels_vec, QuadratureSpec};

/// Highest n evaluated in exact arithmetic by default.
pub const DEFAULT_EXACT_LIMIT: u32 = 60;

/// Relative disagreement between routes treated as a numerics bug.
const HARD_DISAGREEMENT: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum IntegralMethod {
    ClosedForm,
    Quadrature,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RadialIntegralRecord {
    pub n: u32,
    /// ∫ R₁₀ R_{n1} r dr, the ⟨1s| r̂/r |np⟩ radial factor.
    pub i1: f64,
    /// ∫ R₁₀ R_{n1} r² dr, the ⟨1s| r̂ |np⟩ radial factor.
    pub i2: f64,
    /// ∫ R₁₀ R_{n1} r³ dr, the dipole radial element ⟨np| r |1s⟩.
    pub i3: f64,
    pub method: IntegralMethod,
}

impl RadialIntegralRecord {
    pub fn moment(&self, p: u32) -> Result<f64, HydrogenError> {
        match p {
            1 => Ok(self.i1),
            2 => Ok(self.i2),
            3 => Ok(self.i3),
            _ => Err(HydrogenError::InvalidPower(p)),
        }
    }

    pub fn excitation_energy(&self) -> f64 {
        excitation_energy(self.n).expect("records have n >= 2")
    }
}

/// f_n = (2/3) ΔE_n I₃(n)².
pub fn oscillator_strength(record: &RadialIntegralRecord) -> f64 {
    2.0 / 3.0 * record.excitation_energy() * record.i3 * record.i3
}

/// Evaluator for radial integrals; routes n ≤ `exact_limit` through exact
/// arithmetic and larger n through quadrature.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RadialIntegrals {
    pub exact_limit: u32,
    pub quadrature: QuadratureSpec,
}

impl Default for RadialIntegrals {
    fn default() -> Self {
        Self {
            exact_limit: DEFAULT_EXACT_LIMIT,
            quadrature: QuadratureSpec {
                abs_tol: 1e-20,
                rel_tol: 1e-13,
                max_subdivisions: 20_000,
                upper_cut: f64::MAX,
            },
        }
    }
}

/// Upper radius for the quadrature route.
pub(crate) fn radial_cutoff(n: u32) -> f64 {
    let n = f64::from(n);
    2.0 * n * (n + 15.0)
}

/// Breakpoints on a dyadic grid from 1/4 up to the cutoff.
pub(crate) fn radial_panels(cut: f64) -> Vec<f64> {
    let mut points = vec![0.0];
    let mut x = 0.25;
    while x < cut {
        points.push(x);
        x *= 2.0;
    }
    points.push(cut);
    points
}

fn check_n(n: u32) -> Result<(), HydrogenError> {
    if n < 2 {
        Err(HydrogenError::NoDipolePartner(n))
    } else {
        Ok(())
    }
}

impl RadialIntegrals {
    pub fn with_exact_limit(exact_limit: u32) -> Self {
        Self {
            exact_limit,
            ..Self::default()
        }
    }

    /// Exact route: term-by-term integration of the Laguerre expansion.
    pub fn closed_form(&self, n: u32) -> Result<RadialIntegralRecord, HydrogenError> {
        check_n(n)?;
        let product = ExpPoly::hydrogen_radial(n, 1).mul(&ExpPoly::hydrogen_radial(1, 0));
        let norm_sq = norm_squared(n, 1) * norm_squared(1, 0);
        let moment = |p: usize| normalized_value(&norm_sq, &product.times_power(p).integrate());
        Ok(RadialIntegralRecord {
            n,
            i1: moment(1),
            i2: moment(2),
            i3: moment(3),
            method: IntegralMethod::ClosedForm,
        })
    }

    /// Quadrature route over [0, 2n(n+15)].
    pub fn quadrature(&self, n: u32) -> Result<RadialIntegralRecord, HydrogenError> {
        check_n(n)?;
        let integrand = |r: f64| {
            let ground = 2.0 * (-r).exp();
            if ground == 0.0 {
                return [0.0; 3];
            }
            let w = ground * radial_unchecked(n, 1, r) * r;
            [w, w * r, w * r * r]
        };
        let est = integrate_panels_vec(integrand, &radial_panels(radial_cutoff(n)), &self.quadrature)?;
        Ok(RadialIntegralRecord {
            n,
            i1: est.value[0],
            i2: est.value[1],
            i3: est.value[2],
            method: IntegralMethod::Quadrature,
        })
    }

    pub fn record(&self, n: u32) -> Result<RadialIntegralRecord, HydrogenError> {
        if n <= self.exact_limit {
            self.closed_form(n)
        } else {
            self.quadrature(n)
        }
    }

    /// Both routes for one moment; returns the closed-form value after
    /// checking agreement.
    pub fn radial_integral(&self, n: u32, p: u32) -> Result<f64, HydrogenError> {
        if !(1..=3).contains(&p) {
            return Err(HydrogenError::InvalidPower(p));
        }
        let closed = self.closed_form(n)?.moment(p)?;
        let quadrature = self.quadrature(n)?.moment(p)?;
        let relative = ((closed - quadrature) / closed).abs();
        if !(relative <= HARD_DISAGREEMENT) {
            return Err(HydrogenError::MethodDisagreement {
                n,
                p,
                closed,
                quadrature,
                relative,
            });
        }
        Ok(closed)
    }

    /// Records for n = 2..=n_max, evaluated in parallel and stored in order.
    pub fn table(&self, n_max: u32) -> Result<RadialTable, HydrogenError> {
        check_n(n_max)?;
        let records = (2..=n_max)
            .into_par_iter()
            .map(|n| self.record(n))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(RadialTable { records })
    }
}

/// 1s↔np_z gradient elements (⟨1s|∂_z|np_z⟩, ⟨np_z|∂_z|1s⟩) in exact
/// arithmetic. The angular factor 1/√3 is included.
pub(crate) fn gradient_elements(n: u32) -> Result<(f64, f64), HydrogenError> {
    check_n(n)?;
    let ground = ExpPoly::hydrogen_radial(1, 0);
    let excited = ExpPoly::hydrogen_radial(n, 1);
    // ⟨Y00|∂_z|R Y10⟩ = (R' + 2R/r)/√3 and ⟨Y10|∂_z|R Y00⟩ = R'/√3, each with r² dr.
    let two = BigRational::from_integer(BigInt::from(2));
    let up = excited
        .derivative()
        .times_power(2)
        .add(&excited.times_power(1).scale(&two));
    let down = ground.derivative().times_power(2);
    let third = BigRational::new(BigInt::from(1), BigInt::from(3));
    let norm_sq = norm_squared(n, 1) * norm_squared(1, 0) * third;
    let to_excited = normalized_value(&norm_sq, &ground.mul(&up).integrate());
    let to_ground = normalized_value(&norm_sq, &excited.mul(&down).integrate());
    Ok((to_excited, to_ground))
}

/// Contiguous records for n = 2..=n_max.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RadialTable {
    records: Vec<RadialIntegralRecord>,
}

impl RadialTable {
    pub fn n_max(&self) -> u32 {
        self.records.last().map_or(1, |r| r.n)
    }

    pub fn get(&self, n: u32) -> Option<&RadialIntegralRecord> {
        n.checked_sub(2).and_then(|i| self.records.get(i as usize))
    }

    pub fn records(&self) -> &[RadialIntegralRecord] {
        &self.records
    }

    /// Records with n ≤ n_max.
    pub fn up_to(&self, n_max: u32) -> &[RadialIntegralRecord] {
        let len = (n_max.saturating_sub(1) as usize).min(self.records.len());
        &self.records[..len]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rel(a: f64, b: f64) -> f64 {
        ((a - b) / b).abs()
    }

    #[test]
    fn n2_closed_forms() {
        let r = RadialIntegrals::default().closed_form(2).unwrap();
        let s6 = 6f64.sqrt();
        assert!(rel(r.i1, 16.0 / (27.0 * s6)) < 1e-15);
        assert!(rel(r.i2, 6.0 / (s6 * 1.5f64.powi(4))) < 1e-15);
        assert!(rel(r.i3, 768.0 / (243.0 * s6)) < 1e-15);
        assert!((r.i3 - 1.290266).abs() < 1e-6);
        assert_eq!(r.method, IntegralMethod::ClosedForm);
    }

    #[test]
    fn dipole_element_matches_known_closed_form() {
        // |⟨np|r|1s⟩|² = 2⁸ n⁷ (n−1)^{2n−5} / (n+1)^{2n+5}
        let engine = RadialIntegrals::default();
        for n in [2u32, 3, 5, 10, 40] {
            let nf = f64::from(n);
            let ln_sq = 8.0 * 2f64.ln() + 7.0 * nf.ln() + (2.0 * nf - 5.0) * (nf - 1.0).ln()
                - (2.0 * nf + 5.0) * (nf + 1.0).ln();
            let i3 = engine.closed_form(n).unwrap().i3;
            assert!(rel(i3 * i3, ln_sq.exp()) < 1e-12, "n={n}");
        }
    }

    #[test]
    fn routes_agree_low_n() {
        let engine = RadialIntegrals::default();
        for n in 2..=12 {
            let a = engine.closed_form(n).unwrap();
            let b = engine.quadrature(n).unwrap();
            for p in 1..=3 {
                assert!(rel(a.moment(p).unwrap(), b.moment(p).unwrap()) < 1e-10, "n={n} p={p}");
            }
        }
        assert!(engine.radial_integral(5, 3).is_ok());
    }

    #[test]
    fn invalid_inputs() {
        let engine = RadialIntegrals::default();
        assert_eq!(engine.closed_form(1), Err(HydrogenError::NoDipolePartner(1)));
        assert_eq!(engine.radial_integral(3, 4), Err(HydrogenError::InvalidPower(4)));
        assert!(engine.record(2).unwrap().moment(0).is_err());
    }

    #[test]
    fn oscillator_strengths() {
        let engine = RadialIntegrals::default();
        let f2 = oscillator_strength(&engine.record(2).unwrap());
        let f3 = oscillator_strength(&engine.record(3).unwrap());
        assert!((f2 - 0.41620).abs() < 1e-4);
        assert!((f3 - 0.07910).abs() < 1e-4);
    }

    #[test]
    fn table_indexing() {
        let t = RadialIntegrals::default().table(10).unwrap();
        assert_eq!(t.n_max(), 10);
        assert_eq!(t.get(2).unwrap().n, 2);
        assert_eq!(t.get(10).unwrap().n, 10);
        assert!(t.get(11).is_none());
        assert!(t.get(1).is_none());
        assert_eq!(t.up_to(5).len(), 4);
        assert_eq!(t.up_to(50).len(), 9);
    }

    #[test]
    fn gradient_elements_antisymmetric() {
        for n in [2, 3, 9, 30] {
            let (up, down) = gradient_elements(n).unwrap();
            assert_eq!(up, -down, "n={n}");
            assert!(up != 0.0);
        }
    }
}
