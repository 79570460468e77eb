//! Itemised pseudo-momentum budget of a hydrogen-like atom in crossed static
//! fields: classical Abraham momentum, its vacuum correction, binding-energy
//! mass corrections to the kinetic momentum and order-of-magnitude bounds.
//!
//! Inputs and vector outputs are SI; coefficients are dimensionless.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use nalgebra::Vector3;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::units::{AtomicParams, PhysicalConstants, Quantity};

/// Coefficient of (E₀/Mc₀²)Q₀ from the Darwin (modified Coulomb) term, in thirds.
pub const DARWIN_THIRDS: i32 = 8;
/// Coefficient of (E₀/Mc₀²)Q₀ from the p⁴ kinetic correction, in thirds.
pub const P4_THIRDS: i32 = -5;
/// Relative relativistic correction to α(0), in units of α².
pub const BARTLETT_POWER_COEFFICIENT: f64 = -28.0 / 27.0;
/// Exact static polarizability of 1s hydrogen, in units of 4πε₀a₀³.
pub const EXACT_POLARIZABILITY_AU: f64 = 4.5;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum BudgetError {
    #[error("binding energy must be non-positive, got {0} J")]
    PositiveBindingEnergy(f64),
    #[error("total mass must be positive, got {0} kg")]
    InvalidMass(f64),
    #[error("polarizability must be positive, got {0}")]
    InvalidPolarizability(f64),
    #[error("non-finite input: {0}")]
    NonFinite(&'static str),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FieldConfiguration {
    /// Electric field, V/m.
    pub e0: Vector3<f64>,
    /// Magnetic field, T.
    pub b0: Vector3<f64>,
    /// Pseudo-momentum of the atom, kg·m/s.
    pub q0: Vector3<f64>,
}

impl FieldConfiguration {
    pub fn new(e0: [f64; 3], b0: [f64; 3], q0: [f64; 3]) -> Self {
        Self {
            e0: e0.into(),
            b0: b0.into(),
            q0: q0.into(),
        }
    }

    fn check(&self) -> Result<(), BudgetError> {
        let finite = |v: &Vector3<f64>| v.iter().all(|c| c.is_finite());
        if !finite(&self.e0) {
            return Err(BudgetError::NonFinite("E0"));
        }
        if !finite(&self.b0) {
            return Err(BudgetError::NonFinite("B0"));
        }
        if !finite(&self.q0) {
            return Err(BudgetError::NonFinite("Q0"));
        }
        Ok(())
    }
}

/// P_A = ε₀ α(0) B₀ × E₀, with α(0) given as a volume α/ε₀ in m³.
pub fn abraham_momentum(
    fields: &FieldConfiguration,
    alpha0_volume: f64,
    c: &PhysicalConstants,
) -> Result<Vector3<f64>, BudgetError> {
    if !(alpha0_volume > 0.0 && alpha0_volume.is_finite()) {
        return Err(BudgetError::InvalidPolarizability(alpha0_volume));
    }
    fields.check()?;
    Ok(c.vacuum_permittivity * alpha0_volume * fields.b0.cross(&fields.e0))
}

/// (−κ₁ + κ₂) α² P_A.
pub fn casimir_correction(kappa1: f64, kappa2: f64, alpha: f64, abraham: &Vector3<f64>) -> Vector3<f64> {
    (kappa2 - kappa1) * alpha * alpha * abraham
}

/// E₀/(Mc₀²) for binding energy E₀ ≤ 0 (J) and total mass M (kg).
pub fn effective_mass_factor(binding_energy: f64, total_mass: f64, c: &PhysicalConstants) -> Result<f64, BudgetError> {
    if !binding_energy.is_finite() {
        return Err(BudgetError::NonFinite("binding energy"));
    }
    if binding_energy > 0.0 {
        return Err(BudgetError::PositiveBindingEnergy(binding_energy));
    }
    if !(total_mass > 0.0 && total_mass.is_finite()) {
        return Err(BudgetError::InvalidMass(total_mass));
    }
    Ok(binding_energy / (total_mass * c.light_speed * c.light_speed))
}

/// α·|E₀/(Mc₀²)|·|Q₀| + α³·|P_A|; an order-of-magnitude estimate only.
pub fn transverse_bound(
    fields: &FieldConfiguration,
    binding_energy: f64,
    total_mass: f64,
    abraham: &Vector3<f64>,
    c: &PhysicalConstants,
) -> Result<f64, BudgetError> {
    let factor = effective_mass_factor(binding_energy, total_mass, c)?;
    let alpha = c.fine_structure_alpha;
    Ok(alpha * factor.abs() * fields.q0.norm() + alpha.powi(3) * abraham.norm())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Kappas {
    pub kappa1: f64,
    pub kappa2: f64,
}

impl Kappas {
    /// κ₁ = 0.22, κ₂ = 0.0976.
    pub fn adopted() -> Self {
        Self {
            kappa1: 0.22,
            kappa2: 0.0976,
        }
    }

    /// Discrete plus continuum parts.
    pub fn from_components(
        kappa1_discrete: f64,
        kappa1_continuum: f64,
        kappa2_discrete: f64,
        kappa2_continuum: f64,
    ) -> Self {
        Self {
            kappa1: kappa1_discrete + kappa1_continuum,
            kappa2: kappa2_discrete + kappa2_continuum,
        }
    }

    /// −κ₁ + κ₂, the coefficient of α² P_A.
    pub fn net(&self) -> f64 {
        self.kappa2 - self.kappa1
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, Default)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PolarizabilityChoice {
    /// α(0) = 18π a₀³.
    #[default]
    Exact,
    /// A computed value in units of 4πε₀a₀³.
    ComputedDiscrete { value_au: f64 },
    /// 18π a₀³ · (1 − (28/27) α²).
    RelativisticCorrected,
}

impl PolarizabilityChoice {
    /// α(0)/ε₀ in m³.
    pub fn volume(&self, c: &PhysicalConstants) -> f64 {
        let a0_cubed = c.atomic_unit(Quantity::PolarizabilityVolume);
        let au = match *self {
            Self::Exact | Self::RelativisticCorrected => EXACT_POLARIZABILITY_AU,
            Self::ComputedDiscrete { value_au } => value_au,
        };
        let v = 4.0 * PI * au * a0_cubed;
        match self {
            Self::RelativisticCorrected => {
                let alpha = c.fine_structure_alpha;
                v * (1.0 + BARTLETT_POWER_COEFFICIENT * alpha * alpha)
            }
            _ => v,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RelativisticTerms {
    pub darwin_coefficient: f64,
    pub p4_coefficient: f64,
    pub net: f64,
    pub bartlett_power_alpha2_coeff: f64,
}

impl RelativisticTerms {
    pub fn standard() -> Self {
        Self {
            darwin_coefficient: f64::from(DARWIN_THIRDS) / 3.0,
            p4_coefficient: f64::from(P4_THIRDS) / 3.0,
            net: f64::from(DARWIN_THIRDS + P4_THIRDS) / 3.0,
            bartlett_power_alpha2_coeff: BARTLETT_POWER_COEFFICIENT,
        }
    }
}

/// A quantity reported for completeness but never added into totals.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Footnote {
    pub value: f64,
    pub note: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MomentumBudget {
    pub fields: FieldConfiguration,
    pub polarizability_choice: PolarizabilityChoice,
    /// α(0)/ε₀ used for P_A, m³.
    pub polarizability_volume: f64,
    pub kappas: Kappas,
    /// Kinetic momentum Q₀ before mass corrections.
    pub kinetic: Vector3<f64>,
    pub abraham: Vector3<f64>,
    pub casimir_correction: Vector3<f64>,
    /// (−κ₁ + κ₂) α².
    pub casimir_relative_shift: f64,
    pub binding_energy: f64,
    pub total_mass: f64,
    /// E₀/(Mc₀²).
    pub kinetic_mass_factor: f64,
    /// (8/3)(E₀/Mc₀²) Q₀.
    pub darwin_term: Vector3<f64>,
    /// −(5/3)(E₀/Mc₀²) Q₀.
    pub p4_term: Vector3<f64>,
    /// (E₀/Mc₀²) Q₀.
    pub kinetic_mass_correction: Vector3<f64>,
    pub relativistic_terms: RelativisticTerms,
    /// α² (mₑ/M) |P_A|.
    pub magnetic_relativistic_bound: f64,
    pub transverse_bound: f64,
    pub polarization_footnote: Footnote,
    pub provenance: BTreeMap<String, String>,
}

fn provenance() -> BTreeMap<String, String> {
    [
        ("abraham", "P_A = eps0 alpha(0) B0 x E0"),
        ("casimir_correction", "<P_long> = (-kappa1 + kappa2) alpha^2 P_A"),
        ("kinetic_mass_factor", "E0/(M c0^2) from the binding energy"),
        (
            "darwin_term",
            "+(8/3)(E0/M c0^2) Q0, modified Coulomb field of moving charges",
        ),
        ("p4_term", "-(5/3)(E0/M c0^2) Q0, relativistic kinetic correction"),
        (
            "kinetic_mass_correction",
            "darwin + p4 = (E0/M c0^2) Q0, equivalence principle",
        ),
        ("bartlett_power", "alpha(0) relativistic correction -(28/27) alpha^2"),
        ("magnetic_relativistic_bound", "O(alpha^2 m_e/M) P_A, bound only"),
        ("transverse_bound", "alpha |E0/M c0^2| |Q0| + alpha^3 |P_A|, bound only"),
        ("polarization_footnote", "no alpha^2 vacuum correction to alpha(0)"),
    ]
    .into_iter()
    .map(|(k, v)| (k.to_string(), v.to_string()))
    .collect()
}

/// Binding energy −m₂α²c₀²/2 of the ground state, in J (no reduced-mass correction).
pub fn ground_binding_energy(atom: &AtomicParams, c: &PhysicalConstants) -> f64 {
    -0.5 * atom.m2 * c.hartree_energy
}

pub fn assemble_budget(
    fields: &FieldConfiguration,
    atom: &AtomicParams,
    kappas: Kappas,
    choice: PolarizabilityChoice,
    c: &PhysicalConstants,
) -> Result<MomentumBudget, BudgetError> {
    if !(kappas.kappa1.is_finite() && kappas.kappa2.is_finite()) {
        return Err(BudgetError::NonFinite("kappa"));
    }
    let alpha = atom.alpha;
    let volume = choice.volume(c);
    let abraham = abraham_momentum(fields, volume, c)?;
    let casimir = casimir_correction(kappas.kappa1, kappas.kappa2, alpha, &abraham);
    let binding_energy = ground_binding_energy(atom, c);
    let total_mass = atom.total_mass() * c.electron_mass;
    let factor = effective_mass_factor(binding_energy, total_mass, c)?;
    let terms = RelativisticTerms::standard();
    Ok(MomentumBudget {
        fields: *fields,
        polarizability_choice: choice,
        polarizability_volume: volume,
        kappas,
        kinetic: fields.q0,
        abraham,
        casimir_correction: casimir,
        casimir_relative_shift: kappas.net() * alpha * alpha,
        binding_energy,
        total_mass,
        kinetic_mass_factor: factor,
        darwin_term: terms.darwin_coefficient * factor * fields.q0,
        p4_term: terms.p4_coefficient * factor * fields.q0,
        kinetic_mass_correction: terms.net * factor * fields.q0,
        relativistic_terms: terms,
        magnetic_relativistic_bound: alpha * alpha * atom.m2 / atom.total_mass() * abraham.norm(),
        transverse_bound: transverse_bound(fields, binding_energy, total_mass, &abraham, c)?,
        polarization_footnote: Footnote {
            value: 0.0,
            note: "finite O(alpha^2 m_e/M) remainder of the polarization term is not evaluated".into(),
        },
        provenance: provenance(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::units::CODATA_2018;
    use nalgebra::{Rotation3, Unit};
    use proptest::prelude::*;

    const C: &PhysicalConstants = &CODATA_2018;

    fn rel(a: f64, b: f64) -> f64 {
        ((a - b) / b).abs()
    }

    fn crossed() -> FieldConfiguration {
        FieldConfiguration::new([1e5, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 0.0])
    }

    #[test]
    fn abraham_example() {
        let p = abraham_momentum(&crossed(), PolarizabilityChoice::Exact.volume(C), C).unwrap();
        assert_eq!((p.x, p.y), (0.0, 0.0));
        assert!(rel(p.z, -7.419497734621287e-36) < 1e-12);
        let parallel = FieldConfiguration::new([1.0, 2.0, 3.0], [2.0, 4.0, 6.0], [0.0; 3]);
        assert_eq!(abraham_momentum(&parallel, 1.0, C).unwrap(), Vector3::zeros());
        let doubled = FieldConfiguration {
            e0: 2.0 * crossed().e0,
            ..crossed()
        };
        assert_eq!(
            abraham_momentum(&doubled, 1e-30, C).unwrap(),
            2.0 * abraham_momentum(&crossed(), 1e-30, C).unwrap()
        );
        assert!(abraham_momentum(&crossed(), 0.0, C).is_err());
    }

    #[test]
    fn abraham_parallel_to_b_cross_e() {
        let f = FieldConfiguration::new([1.0, 2.0, -0.5], [0.3, -1.0, 2.0], [0.0; 3]);
        let p = abraham_momentum(&f, 1.0, C).unwrap();
        let bxe = f.b0.cross(&f.e0);
        assert!(rel(p.dot(&bxe), p.norm() * bxe.norm()) < 1e-14);
    }

    #[test]
    fn casimir_examples() {
        let alpha = C.fine_structure_alpha;
        let pa = Vector3::new(0.0, 0.0, 1.0);
        let k = Kappas::adopted();
        let corr = casimir_correction(k.kappa1, k.kappa2, alpha, &pa);
        assert!(rel(corr.z, -0.1224 * alpha * alpha) < 1e-12);
        assert!((corr.z.abs() - 6.518e-6).abs() < 1e-9);
        assert_eq!(casimir_correction(0.1, 0.1, alpha, &pa), Vector3::zeros());
        assert_eq!(
            casimir_correction(k.kappa1, k.kappa2, alpha, &Vector3::zeros()),
            Vector3::zeros()
        );
    }

    #[test]
    fn mass_factor_examples() {
        let h = AtomicParams::hydrogen();
        let e0 = ground_binding_energy(&h, C);
        let m = h.total_mass() * C.electron_mass;
        let f = effective_mass_factor(e0, m, C).unwrap();
        assert!((f + 1.449e-8).abs() < 1e-11);
        assert_eq!(effective_mass_factor(0.0, m, C).unwrap(), 0.0);
        assert!(effective_mass_factor(1.0, m, C).is_err());
        let t = RelativisticTerms::standard();
        assert_eq!(DARWIN_THIRDS + P4_THIRDS, 3);
        assert_eq!(t.net, 1.0);
        assert!(rel(t.darwin_coefficient * f + t.p4_coefficient * f, f) < 1e-15);
    }

    #[test]
    fn transverse_examples() {
        let h = AtomicParams::hydrogen();
        let e0 = ground_binding_energy(&h, C);
        let m = h.total_mass() * C.electron_mass;
        let zero = FieldConfiguration::new([0.0; 3], [0.0; 3], [0.0; 3]);
        assert_eq!(transverse_bound(&zero, e0, m, &Vector3::zeros(), C).unwrap(), 0.0);
        let q = FieldConfiguration::new([0.0; 3], [0.0; 3], [1e-27, 0.0, 0.0]);
        let b = transverse_bound(&q, e0, m, &Vector3::zeros(), C).unwrap();
        assert!((b - 1.06e-37).abs() < 0.01e-37);
    }

    #[test]
    fn budget_examples() {
        let h = AtomicParams::hydrogen();
        let zero = FieldConfiguration::new([0.0; 3], [0.0; 3], [0.0; 3]);
        let b = assemble_budget(&zero, &h, Kappas::adopted(), PolarizabilityChoice::Exact, C).unwrap();
        for v in [
            b.kinetic,
            b.abraham,
            b.casimir_correction,
            b.darwin_term,
            b.p4_term,
            b.kinetic_mass_correction,
        ] {
            assert_eq!(v, Vector3::zeros());
        }
        assert_eq!(b.transverse_bound, 0.0);
        assert_eq!(b.magnetic_relativistic_bound, 0.0);
        assert_eq!(b.polarization_footnote.value, 0.0);

        let exact = assemble_budget(&crossed(), &h, Kappas::adopted(), PolarizabilityChoice::Exact, C).unwrap();
        let rel_corr = assemble_budget(
            &crossed(),
            &h,
            Kappas::adopted(),
            PolarizabilityChoice::RelativisticCorrected,
            C,
        )
        .unwrap();
        let ratio = rel_corr.abraham.norm() / exact.abraham.norm();
        assert!((1.0 - ratio - 5.522e-5).abs() < 1e-8);
        assert!(rel(exact.casimir_relative_shift, -0.12 * h.alpha * h.alpha) < 0.1);
        assert!(exact.provenance.contains_key("abraham"));
    }

    #[test]
    fn computed_polarizability_choice() {
        let v = PolarizabilityChoice::ComputedDiscrete { value_au: 4.5 }.volume(C);
        assert_eq!(v, PolarizabilityChoice::Exact.volume(C));
    }

    fn budget(f: &FieldConfiguration) -> MomentumBudget {
        assemble_budget(
            f,
            &AtomicParams::hydrogen(),
            Kappas::adopted(),
            PolarizabilityChoice::Exact,
            C,
        )
        .unwrap()
    }

    fn close(a: &Vector3<f64>, b: &Vector3<f64>, scale: f64) -> bool {
        (a - b).norm() <= 1e-12 * scale
    }

    fn vec3() -> impl Strategy<Value = [f64; 3]> {
        prop::array::uniform3(-1e3f64..1e3)
    }

    proptest! {
        #[test]
        fn homogeneity(e in vec3(), b in vec3(), q in vec3(), s in 0.1f64..10.0) {
            let q = q.map(|x| x * 1e-27);
            let base = budget(&FieldConfiguration::new(e, b, q));
            let se = budget(&FieldConfiguration::new(e.map(|x| x * s), b, q));
            let sb = budget(&FieldConfiguration::new(e, b.map(|x| x * s), q));
            let sq = budget(&FieldConfiguration::new(e, b, q.map(|x| x * s)));
            let pa = base.abraham.norm() * s;
            prop_assert!(close(&se.abraham, &(s * base.abraham), pa));
            prop_assert!(close(&sb.abraham, &(s * base.abraham), pa));
            prop_assert!(close(&se.casimir_correction, &(s * base.casimir_correction), pa));
            prop_assert_eq!(se.kinetic_mass_correction, base.kinetic_mass_correction);
            prop_assert_eq!(sq.abraham, base.abraham);
            let kq = base.kinetic_mass_correction.norm() * s;
            prop_assert!(close(&sq.kinetic_mass_correction, &(s * base.kinetic_mass_correction), kq));
        }

        #[test]
        fn rotation_equivariance(e in vec3(), b in vec3(), q in vec3(), axis in vec3(), angle in -3.0f64..3.0) {
            prop_assume!(axis.iter().any(|c| c.abs() > 1e-3));
            let rot = Rotation3::from_axis_angle(&Unit::new_normalize(Vector3::from(axis)), angle);
            let q = q.map(|x| x * 1e-27);
            let f = FieldConfiguration::new(e, b, q);
            let g = FieldConfiguration { e0: rot * f.e0, b0: rot * f.b0, q0: rot * f.q0 };
            let (x, y) = (budget(&f), budget(&g));
            for (u, v) in [
                (x.abraham, y.abraham),
                (x.casimir_correction, y.casimir_correction),
                (x.kinetic_mass_correction, y.kinetic_mass_correction),
                (x.darwin_term, y.darwin_term),
            ] {
                prop_assert!(close(&(rot * u), &v, u.norm().max(f64::MIN_POSITIVE) * 10.0));
            }
            prop_assert!((x.transverse_bound - y.transverse_bound).abs() <= 1e-12 * x.transverse_bound);
        }

        #[test]
        fn relative_shift_field_independent(e in vec3(), b in vec3()) {
            let bud = budget(&FieldConfiguration::new(e, b, [0.0; 3]));
            prop_assume!(bud.abraham.norm() > 0.0);
            let r = bud.casimir_correction.norm() / bud.abraham.norm();
            prop_assert!((r - bud.casimir_relative_shift.abs()).abs() <= 1e-14 * r);
        }
    }
}
