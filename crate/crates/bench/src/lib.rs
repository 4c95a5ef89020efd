//! Shared fixtures for the benchmark targets.

use sigev_core::game::{honeypot_table3, DetectorModel, GameSpec, Prior};

/// Table 3 payoffs with the given prior and an optional symmetric detector.
pub fn table3_game(p0: f64, detector: Option<(f64, f64)>) -> GameSpec {
    GameSpec::new(
        honeypot_table3(),
        Prior::new(p0).expect("valid prior"),
        detector.map(|(eps, del)| DetectorModel::symmetric(eps, del).expect("valid rates")),
    )
}
