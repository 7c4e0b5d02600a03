//! Weighted Morrey–Sobolev moduli on the upper half-space `R^n_+`.
//!
//! Fields in `Ẇ^{1,p}_γ(R^n_+)` with `p > n` are Hölder-type continuous, with a
//! two-point modulus controlled by the energy `∫ |Du|^p z_n^γ dz`. This crate
//! evaluates the closed-form moduli ([`modulus`]), integrates weighted energies
//! ([`quadrature`]), provides the extremal test functions ([`extremals`]),
//! measures inequality constants over corpora ([`certify`]) and estimates the
//! optimal modulus by discrete p-energy minimisation ([`omega_star`]).

// `!(a > b)` is used on purpose so that NaN fails validation.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod certify;
pub mod error;
pub mod extremals;
pub mod field;
pub mod grid;
pub mod modulus;
pub mod omega_star;
pub mod point;
pub mod quadrature;

pub use certify::{CertRecord, CertReport, Variant};
pub use error::{Error, Result};
pub use field::{NamedField, ScalarField};
pub use grid::{GridSpec, Resolution};
pub use modulus::{Params, ThetaParams};
pub use omega_star::{OmegaEstimate, SolverConfig};
pub use point::{BoxRegion, HalfSpacePoint};
pub use quadrature::EnergyReport;
