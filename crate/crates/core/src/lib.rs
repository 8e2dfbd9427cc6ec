//! Exact additive combinatorics on finite abelian groups: sumsets, covering
//! certificates, growth counting, Fourier concentration, diameter and
//! rectification search, and subgroup covers in torsion groups.

pub mod covering;
pub mod error;
pub mod exact;
pub mod fourier;
pub mod group;
pub mod harness;
pub mod primes;
pub mod real;
pub mod rectify;
pub mod tolerance;
pub mod torsion;

pub use error::{Error, Result};
pub use group::{Element, GSet, GroupSpec, Instance};
pub use real::Real;

/// Character-sum report in double precision.
pub type Spectrum = fourier::SpectrumReport<f64>;
/// Character-sum report in single precision.
pub type Spectrum32 = fourier::SpectrumReport<f32>;
pub type Moments = fourier::MomentReport<f64>;
pub type Eta = fourier::EtaChoice<f64>;
pub type LargeCoefficient = fourier::LargeCoefficientReport<f64>;
