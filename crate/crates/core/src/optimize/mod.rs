//! Direct maximization of the success rate over linear scoring functions.
//!
//! Two search strategies: exhaustive enumeration of integer coefficient
//! vectors with a tolerance-based simplicity tie-break, and multi-start
//! Nelder-Mead simplex search over unconstrained real coefficients. The
//! success rate is piecewise constant in the coefficients, so the simplex
//! search carries no convergence guarantee here; multi-start and plateau
//! termination make it useful anyway.

mod brute_force;
mod nelder_mead;

pub use brute_force::{brute_force_search, grid_candidates, BruteForceConfig};
pub use nelder_mead::{
    default_starts, maximize_success_rate, nelder_mead_maximize, seeded_starts,
    NelderMeadConfig,
};
