//! Single-stage coilgun simulator: winding geometry, on-axis field, capacitor
//! discharge through an H-bridge, and the coupled projectile launch.

pub mod circuit;
pub mod config;
pub mod dynamics;
pub mod elliptic;
pub mod error;
pub mod magnetostatics;
pub mod measured;
pub mod pulse;
pub mod sweep;
pub mod winding;

pub use error::{Error, Result};
