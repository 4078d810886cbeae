//! Spectra of the PT-symmetric problem `-eps^2 f'' - (i z)^p f = f` and of the
//! quartic oscillator `-eps^2 f'' + (z^4 + i a z) f = f`, computed three ways:
//! WKB quantisation, an exponentially corrected eigenvalue condition, and
//! shooting along complex contours.

pub mod action;
pub mod asymptotic;
pub mod cli;
pub mod error;
pub mod geometry;
pub mod quad;
mod roots;
pub mod shooting;
pub mod special;
pub mod verify;

pub use error::{Error, Result};
pub use special::CScalar;
