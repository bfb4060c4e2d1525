//! Derivative-free minimisers used by the likelihood fits.

mod anneal;
mod simplex;

pub use anneal::{anneal, AnnealOptions, AnnealOutcome};
pub use simplex::{nelder_mead, SimplexOptions, SimplexOutcome};
