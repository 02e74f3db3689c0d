//! Steady-state spectra of a V-type three-level system driven by a strong
//! pump on a fast transition and a weak probe on a slow "clock" transition.
//!
//! All rates and detunings are in units of the fast decay rate `Γ₁` once
//! [`SystemParams::normalize`] has been applied.

pub mod closedform;
pub mod error;
pub mod figures;
pub mod grid;
pub mod master;
pub mod output;
pub mod params;
pub mod peaks;
pub mod poleatlas;
pub mod poly;
pub mod report;
pub mod scan;
pub mod state;

pub use error::{Error, Result};
pub use params::SystemParams;
pub use state::BlochState;
