//! Rotational hypersurfaces with vanishing `(r+1)`-th mean curvature in
//! H^n x R: the catenoid family, its height integrals, the profile ODE,
//! family-level structure and curvature checks.

// `!(x > 0.0)` is used on purpose so that NaN fails validation.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analysis;
pub mod config;
pub mod curvature;
pub mod error;
pub mod export;
pub mod family;
pub mod ode;
pub mod profile;
pub mod quadrature;
pub mod solve;
pub mod verify;

pub use config::RunConfig;
pub use error::{Error, Result};
pub use family::{FamilyParams, ProfilePoint, Regime};
pub use quadrature::{HeightValue, QuadratureSettings};
