//! Critical exponents of quantum chains from the linear response to weak quenches.
//!
//! A quench perturbs the ground (or thermal) state; the lowest non-zero
//! frequency in the spectrum of an observable's response is the finite-size
//! gap, and its decay with system size gives the dynamical exponent `z`.
//!
//! - [`tfim`], [`lrk`]: free-fermion chains as independent two-level modes.
//! - [`response`]: first-order response of those modes; [`oracle`] integrates
//!   the same modes exactly for validation.
//! - [`ed`]: dense exact diagonalization for chains without a free-fermion form.
//! - [`spectral`]: spectra and peak extraction; [`scaling`]: power-law fits.

// `!(x > 0.0)` is used deliberately so that NaN fails validation.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod ed;
pub mod error;
pub mod lrk;
pub mod mode;
pub mod oracle;
pub mod response;
pub mod scaling;
pub mod series;
pub mod spectral;
pub mod tfim;

pub use error::{Error, Result};
pub use mode::{Bloch, TwoLevelMode};
pub use series::{TimeGrid, TimeSeries};
