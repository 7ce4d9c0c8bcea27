//! Fox-H probability densities.
//!
//! Parameter records and their structural constants live in [`spec`];
//! [`eval`] evaluates Fox-H functions by residue series, contour
//! quadrature and generalized Wright series; [`densities`] builds the
//! eight closed families of densities with all moments finite;
//! [`variates`] implements products, powers and sampling; [`positivity`]
//! certifies non-negativity through atomic factorizations.
//!
//! The crate is `no_std` and only needs `alloc`.

#![no_std]

extern crate alloc;

pub mod error;
pub mod densities;
pub mod eval;
pub mod fixtures;
pub mod gamma;
pub mod math;
pub mod positivity;
pub mod quad;
pub mod reference;
pub mod spec;
pub mod variates;

pub use error::{Error, Result};
pub use spec::{DerivedParams, FoxHSpec, ParamPair};
