//! Optical pumping of laser-cooled cesium into the magnetically insensitive
//! (F=4, m=0) sublevel, the Raman spectra used to read it out, and the recoil
//! heating it costs.
//!
//! * [`atomic`]: 43-sublevel D2 state space, branching ratios, Zeeman offsets.
//! * [`kinetics`]: rate-equation generator, pruning, RK4 integration.
//! * [`raman`]: co- and counterpropagating Raman spectra and Gaussian fits.
//! * [`heating`]: fluorescence-cycle counting and recoil random walks.
//! * [`fitting`]: least-squares estimate of the polarization contamination.

// `!(x > 0.0)` is used on purpose so NaN fails validation.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod atomic;
pub mod constants;
pub mod error;
pub mod fitting;
pub mod heating;
pub mod kinetics;
pub mod raman;

pub use error::{Error, Result};
