//! Physical constants and conversions between SI and Hartree atomic units.
//!
//! Every computation in this crate is carried out in atomic units
//! (ħ = e = mₑ = 4πε₀ = 1, c₀ = 1/α); SI only appears at the boundaries.
//! The constant set is the CODATA 2018 recommended values
//! (<https://physics.nist.gov/cuu/Constants/>), hard-coded.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum UnitsError {
    #[error("unsupported quantity kind `{0}`")]
    UnsupportedKind(String),
    #[error("invalid particle masses: need m1 > m2 > 0, got m1={m1}, m2={m2}")]
    InvalidMasses { m1: f64, m2: f64 },
    #[error("fine-structure constant must lie in (0, 1), got {0}")]
    InvalidAlpha(f64),
}

/// A fixed set of fundamental constants, all in SI units.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhysicalConstants {
    pub fine_structure_alpha: f64,
    /// kg
    pub electron_mass: f64,
    /// kg
    pub proton_mass: f64,
    /// m
    pub bohr_radius: f64,
    /// J
    pub hartree_energy: f64,
    /// m/s
    pub light_speed: f64,
    /// F/m
    pub vacuum_permittivity: f64,
    /// J·s
    pub hbar: f64,
    /// C
    pub elementary_charge: f64,
}

/// CODATA 2018 recommended values.
pub const CODATA_2018: PhysicalConstants = PhysicalConstants {
    fine_structure_alpha: 7.297_352_569_3e-3,
    electron_mass: 9.109_383_701_5e-31,
    proton_mass: 1.672_621_923_69e-27,
    bohr_radius: 5.291_772_109_03e-11,
    hartree_energy: 4.359_744_722_207_1e-18,
    light_speed: 299_792_458.0,
    vacuum_permittivity: 8.854_187_812_8e-12,
    hbar: 1.054_571_817e-34,
    elementary_charge: 1.602_176_634e-19,
};

/// The constant set used throughout the crate.
pub fn constants() -> &'static PhysicalConstants {
    &CODATA_2018
}

impl PhysicalConstants {
    /// Classical electron radius r_e = α² a₀, in metres.
    pub fn classical_electron_radius(&self) -> f64 {
        self.fine_structure_alpha * self.fine_structure_alpha * self.bohr_radius
    }

    /// One electronvolt in joules.
    pub fn electron_volt(&self) -> f64 {
        self.elementary_charge
    }

    /// Speed of light in atomic units (1/α).
    pub fn light_speed_atomic(&self) -> f64 {
        1.0 / self.fine_structure_alpha
    }

    /// Proton-to-electron mass ratio.
    pub fn proton_electron_mass_ratio(&self) -> f64 {
        self.proton_mass / self.electron_mass
    }

    /// SI value of one atomic unit of the given kind.
    pub fn atomic_unit(&self, kind: Quantity) -> f64 {
        let a0 = self.bohr_radius;
        let eh = self.hartree_energy;
        let hbar = self.hbar;
        let e = self.elementary_charge;
        match kind {
            Quantity::Length => a0,
            Quantity::Energy => eh,
            Quantity::Mass => self.electron_mass,
            Quantity::Momentum => hbar / a0,
            Quantity::Time => hbar / eh,
            Quantity::AngularFrequency => eh / hbar,
            Quantity::Wavenumber => 1.0 / a0,
            Quantity::Velocity => a0 * eh / hbar,
            Quantity::ElectricField => eh / (e * a0),
            Quantity::MagneticField => hbar / (e * a0 * a0),
            Quantity::NumberDensity => 1.0 / (a0 * a0 * a0),
            Quantity::MassDensity => self.electron_mass / (a0 * a0 * a0),
            Quantity::PolarizabilityVolume => a0 * a0 * a0,
        }
    }
}

/// Kinds of physical quantity that can cross the SI/atomic boundary.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Quantity {
    Length,
    Energy,
    Mass,
    Momentum,
    Time,
    AngularFrequency,
    Wavenumber,
    Velocity,
    ElectricField,
    MagneticField,
    NumberDensity,
    MassDensity,
    /// Polarizability expressed as a volume (α/4πε₀ in SI is m³).
    PolarizabilityVolume,
}

impl Quantity {
    pub const ALL: [Quantity; 13] = [
        Quantity::Length,
        Quantity::Energy,
        Quantity::Mass,
        Quantity::Momentum,
        Quantity::Time,
        Quantity::AngularFrequency,
        Quantity::Wavenumber,
        Quantity::Velocity,
        Quantity::ElectricField,
        Quantity::MagneticField,
        Quantity::NumberDensity,
        Quantity::MassDensity,
        Quantity::PolarizabilityVolume,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Quantity::Length => "length",
            Quantity::Energy => "energy",
            Quantity::Mass => "mass",
            Quantity::Momentum => "momentum",
            Quantity::Time => "time",
            Quantity::AngularFrequency => "angular-frequency",
            Quantity::Wavenumber => "wavenumber",
            Quantity::Velocity => "velocity",
            Quantity::ElectricField => "electric-field",
            Quantity::MagneticField => "magnetic-field",
            Quantity::NumberDensity => "number-density",
            Quantity::MassDensity => "mass-density",
            Quantity::PolarizabilityVolume => "polarizability-volume",
        }
    }
}

impl fmt::Display for Quantity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Quantity {
    type Err = UnitsError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Quantity::ALL
            .iter()
            .copied()
            .find(|q| q.name() == s)
            .ok_or_else(|| UnitsError::UnsupportedKind(s.to_owned()))
    }
}

/// Convert an SI value to atomic units.
pub fn to_atomic(value: f64, kind: Quantity) -> f64 {
    value / constants().atomic_unit(kind)
}

/// Convert an atomic-unit value to SI.
pub fn from_atomic(value: f64, kind: Quantity) -> f64 {
    value * constants().atomic_unit(kind)
}

/// String-keyed variant of [`to_atomic`], for callers holding a kind name.
pub fn to_atomic_named(value: f64, kind: &str) -> Result<f64, UnitsError> {
    Ok(to_atomic(value, kind.parse()?))
}

/// Masses of a two-body Coulomb system, in electron masses.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AtomicParams {
    /// Heavy particle (proton or heavier isotope).
    pub m1: f64,
    /// Light particle (electron).
    pub m2: f64,
    pub alpha: f64,
}

impl AtomicParams {
    pub fn new(m1: f64, m2: f64, alpha: f64) -> Result<Self, UnitsError> {
        if !(m2 > 0.0 && m1 > m2 && m1.is_finite()) {
            return Err(UnitsError::InvalidMasses { m1, m2 });
        }
        if !(alpha > 0.0 && alpha < 1.0) {
            return Err(UnitsError::InvalidAlpha(alpha));
        }
        Ok(Self { m1, m2, alpha })
    }

    /// Ordinary hydrogen with CODATA masses.
    pub fn hydrogen() -> Self {
        let c = constants();
        Self {
            m1: c.proton_electron_mass_ratio(),
            m2: 1.0,
            alpha: c.fine_structure_alpha,
        }
    }

    pub fn total_mass(&self) -> f64 {
        self.m1 + self.m2
    }

    pub fn reduced_mass(&self) -> f64 {
        self.m1 * self.m2 / (self.m1 + self.m2)
    }

    pub fn mass_difference(&self) -> f64 {
        self.m1 - self.m2
    }

    /// Total mass in kilograms.
    pub fn total_mass_si(&self) -> f64 {
        from_atomic(self.total_mass(), Quantity::Mass)
    }
}

/// Hartree energy computed from e²/(4πε₀a₀); used to cross-check the table.
pub fn coulomb_energy_scale(c: &PhysicalConstants) -> f64 {
    c.elementary_charge * c.elementary_charge / (4.0 * PI * c.vacuum_permittivity * c.bohr_radius)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rel(a: f64, b: f64) -> f64 {
        ((a - b) / b).abs()
    }

    #[test]
    fn codata_alpha() {
        assert!(rel(constants().fine_structure_alpha, 7.2973525693e-3) < 1e-12);
    }

    #[test]
    fn hartree_is_alpha_squared_mc2() {
        let c = constants();
        let mc2 = c.electron_mass * c.light_speed * c.light_speed;
        let a2 = c.fine_structure_alpha * c.fine_structure_alpha;
        assert!(rel(c.hartree_energy / (a2 * mc2), 1.0) < 1e-9);
    }

    #[test]
    fn bohr_radius_from_hbar() {
        let c = constants();
        let a0 = c.hbar / (c.electron_mass * c.light_speed * c.fine_structure_alpha);
        assert!(rel(a0, c.bohr_radius) < 1e-9);
    }

    #[test]
    fn classical_radius_ratio() {
        let c = constants();
        let ratio = c.classical_electron_radius() / c.bohr_radius;
        assert!(rel(ratio, 5.3251e-5) < 1e-4);
        // independent route: r_e = e²/(4πε₀ mₑ c²)
        let re =
            c.elementary_charge.powi(2) / (4.0 * PI * c.vacuum_permittivity * c.electron_mass * c.light_speed.powi(2));
        assert!(rel(re, c.classical_electron_radius()) < 1e-9);
    }

    #[test]
    fn coulomb_scale_matches_hartree() {
        let c = constants();
        assert!(rel(coulomb_energy_scale(c), c.hartree_energy) < 1e-9);
    }

    #[test]
    fn unit_definitions() {
        let c = constants();
        assert_eq!(to_atomic(c.hartree_energy, Quantity::Energy), 1.0);
        assert_eq!(to_atomic(c.bohr_radius, Quantity::Length), 1.0);
        let rydberg_ev = 13.605693;
        let e = to_atomic(rydberg_ev * c.electron_volt(), Quantity::Energy);
        assert!((e - 0.5).abs() < 1e-6);
    }

    #[test]
    fn unsupported_kind_rejected() {
        assert_eq!(
            "charge".parse::<Quantity>(),
            Err(UnitsError::UnsupportedKind("charge".into()))
        );
        assert!(to_atomic_named(1.0, "volume").is_err());
        assert_eq!(to_atomic_named(constants().bohr_radius, "length").unwrap(), 1.0);
    }

    #[test]
    fn atomic_params_validation() {
        assert!(AtomicParams::new(1.0, 1.0, 0.007).is_err());
        assert!(AtomicParams::new(1.0, 2.0, 0.007).is_err());
        assert!(AtomicParams::new(2.0, 0.0, 0.007).is_err());
        assert!(AtomicParams::new(2.0, 1.0, 0.0).is_err());
        let h = AtomicParams::hydrogen();
        assert!(rel(h.m1, 1836.15267343) < 1e-9);
        assert!(rel(h.reduced_mass(), h.m1 / (h.m1 + 1.0)) < 1e-15);
        assert!(h.mass_difference() > 0.0);
    }

    proptest::proptest! {
        #[test]
        fn round_trip(v in 1e-40f64..1e40, idx in 0usize..13) {
            let kind = Quantity::ALL[idx];
            let back = from_atomic(to_atomic(v, kind), kind);
            proptest::prop_assert!(rel(back, v) < 1e-12);
        }

        #[test]
        fn names_parse_back(idx in 0usize..13) {
            let kind = Quantity::ALL[idx];
            proptest::prop_assert_eq!(kind.name().parse::<Quantity>().unwrap(), kind);
        }
    }
}
