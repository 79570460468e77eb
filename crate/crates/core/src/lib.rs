//! Numerics for the vacuum (Casimir) correction to the Abraham momentum of a
//! hydrogen atom in crossed electric and magnetic fields.
//!
//! The crate is organised bottom-up: unit handling, compensated summation and
//! adaptive quadrature support the hydrogen radial integrals, which feed the
//! discrete spectral sums. Continuum integrals, cutoff regularisation and the
//! final momentum budget sit on top.

pub mod budget;
pub mod continuum;
pub mod hydrogen;
pub mod quadrature;
pub mod renormalization;
pub mod spectral;
pub mod summation;
pub mod units;

pub use budget::{assemble_budget, FieldConfiguration, Kappas, MomentumBudget, PolarizabilityChoice};
pub use continuum::{kappa1_continuum, kappa2_continuum, ContinuumResult, Kappa};
pub use hydrogen::{BoundStateLabel, RadialIntegralRecord, RadialIntegrals};
pub use quadrature::{Estimate, QuadratureSpec};
pub use spectral::{SpectralSumResult, SpectralSums, Tail};
pub use units::{constants, AtomicParams, PhysicalConstants};
