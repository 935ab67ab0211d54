//! Supersingular isogeny graphs in genus one and two, their spectra, the
//! affine building of Sp_2n, and Charles–Goren–Lauter style hash walks.

pub mod building;
pub mod ec;
pub mod error;
pub mod ff;
pub mod g2;
pub mod hash;
pub mod spectra;

pub use error::{Error, Result};
