//! Numerical checks of the qualitative theory: maximum principle, extremum
//! lemma, Harnack inequality, positivity times and the two mechanisms that
//! separate different weights (iterated integrals and the Laplace symbol).

pub mod checks;
pub mod harnack;
pub mod witness;

pub use checks::{
    check_max_principle, extremum_lemma_probe, positivity_hitting, CheckRecord, MaxPrincipleReport,
    DEFAULT_MAX_PRINCIPLE_TOL,
};
pub use harnack::{harnack_scan, HarnackReport, Subdomain, DEFAULT_HARNACK_S};
pub use witness::{default_s_grid, j2_compare, laplace_witness, Witness, WITNESS_FLOOR};
