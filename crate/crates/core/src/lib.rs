//! Solvers for two-type, two-message, two-action signaling games with
//! probabilistic deception detection, built around the honeypot
//! network-defense scenario: a defender portrays systems as normal machines
//! or honeypots, an attacker chooses to attack or withdraw, and an optional
//! detector leaks evidence of deceptive portrayals.
//!
//! The crate computes perfect Bayesian equilibria analytically where closed
//! forms exist ([`analytic`]) and numerically everywhere else ([`numeric`]),
//! maps timing-based classifiers onto evidence kernels ([`detector`]), and
//! runs mechanism-design sweeps over the honeypot fraction ([`sweep`]).

// Types, messages, evidence and actions are all indexed 0/1; loops over those
// domain indices read better than iterator chains here.
#![allow(clippy::needless_range_loop)]
#![forbid(unsafe_code)]

pub mod analytic;
pub mod detector;
mod equilibrium;
mod error;
pub mod game;
pub mod numeric;
mod support;
pub mod sweep;

pub use equilibrium::{
    sort_and_dedup as sort_equilibria, BeliefInterval, Classification, Equilibrium, Utilities,
};
pub use error::{GameError, Result};
pub use game::{
    expected_utilities, honeypot_payoffs, honeypot_table3, posterior_from_evidence,
    posterior_from_message, receiver_action_value, sender_utility_given_type, BeliefSystem,
    DetectorModel, GameSpec, InfoSet, PayoffTable, Posterior, Prior, ReceiverStrategy,
    SenderStrategy,
};

/// Number formatting shared with the CLI: 12 significant digits.
pub mod fmt {
    /// Format with 12 significant digits in scientific notation; parses back
    /// as JSON and CSV numbers and diffs stably across runs.
    pub fn sig12(x: f64) -> String {
        format!("{:.11e}", x)
    }
}
