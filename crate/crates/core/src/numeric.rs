//! Numerical equilibrium machinery for the evidence game: detector-region
//! classification, exhaustive pure-strategy PBE enumeration, mixed-strategy
//! solving by support enumeration, and an independent verifier.
//!
//! The verifier checks the equilibrium definition directly (sender optimality
//! per type, receiver optimality per information set against stated beliefs,
//! two-step Bayes consistency on path, and supporting intervals off path), so
//! it serves as the oracle for both solvers.

use serde::{Deserialize, Serialize};

use crate::equilibrium::Equilibrium;
use crate::error::{GameError, Result};
use crate::game::{
    expected_utilities, receiver_action_value, DetectorModel, GameSpec, InfoSet, ReceiverStrategy,
    SenderStrategy,
};

/// Default tolerance on deviation gains.
pub const DEFAULT_DEVIATION_TOL: f64 = 1e-9;
/// Default tolerance when solving indifference conditions.
pub const DEFAULT_INDIFFERENCE_TOL: f64 = 1e-10;

/// Attacker-capability regions for a symmetric detector.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DetectorRegionLabel {
    /// `delta = epsilon`: the evidence is useless, the game reduces to the
    /// one without evidence.
    Weak,
    /// `epsilon = 1, delta = 0`: a complete information game.
    Omnipotent,
    /// `delta = 0`: evidence guarantees deception.
    Conservative,
    /// `epsilon = 1`: no evidence guarantees truth-telling.
    Aggressive,
    /// `epsilon > delta` with no guarantees.
    Intermediate,
}

impl std::fmt::Display for DetectorRegionLabel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            Self::Weak => "weak",
            Self::Omnipotent => "omnipotent",
            Self::Conservative => "conservative",
            Self::Aggressive => "aggressive",
            Self::Intermediate => "intermediate",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DetectorRegion {
    pub label: DetectorRegionLabel,
    pub epsilon: f64,
    pub delta: f64,
}

/// Classify a symmetric detector into its capability region.
///
/// Detectors with `epsilon < delta` must be relabeled (`e -> 1 - e`) first;
/// the equilibria are symmetric around the `epsilon = delta` diagonal.
pub fn classify_detector(detector: &DetectorModel, tol: f64) -> Result<DetectorRegion> {
    if !(tol.is_finite() && tol >= 0.0) {
        return Err(GameError::Validation(format!(
            "classification tolerance must be nonnegative, got {tol}"
        )));
    }
    let (epsilon, delta) = detector.symmetric_rates().ok_or_else(|| {
        GameError::Validation(
            "detector region classification requires the symmetric (epsilon, delta) form"
                .to_string(),
        )
    })?;
    if epsilon < delta - tol {
        return Err(GameError::Validation(format!(
            "epsilon = {epsilon} < delta = {delta}; relabel evidence (e -> 1 - e) before classifying"
        )));
    }
    let label = if (epsilon - delta).abs() <= tol {
        DetectorRegionLabel::Weak
    } else if (epsilon - 1.0).abs() <= tol && delta.abs() <= tol {
        DetectorRegionLabel::Omnipotent
    } else if delta.abs() <= tol {
        DetectorRegionLabel::Conservative
    } else if (epsilon - 1.0).abs() <= tol {
        DetectorRegionLabel::Aggressive
    } else {
        DetectorRegionLabel::Intermediate
    };
    Ok(DetectorRegion {
        label,
        epsilon,
        delta,
    })
}

/// Enumeration cursor over the extreme points of the strategy sets: a pure
/// sender map `m -> n` and a pure receiver action per information set.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PureProfile {
    /// `sender_msg[m]` is the message sent by type `m`.
    pub sender_msg: [usize; 2],
    /// Actions ordered by message (no evidence: `[n=0, n=1]`) or row-major by
    /// `(n, e)` (evidence: `[(0,0), (0,1), (1,0), (1,1)]`).
    pub receiver_act: Vec<usize>,
}

impl PureProfile {
    /// All 4 x 4 (no evidence) or 4 x 16 (evidence) pure profiles.
    pub fn all(evidence: bool) -> Vec<PureProfile> {
        let nslots = if evidence { 4 } else { 2 };
        let mut out = Vec::with_capacity(4 << nslots);
        for s0 in 0..2 {
            for s1 in 0..2 {
                for bits in 0..(1usize << nslots) {
                    out.push(PureProfile {
                        sender_msg: [s0, s1],
                        receiver_act: (0..nslots).map(|i| (bits >> i) & 1).collect(),
                    });
                }
            }
        }
        out
    }

    pub fn sender_strategy(&self) -> SenderStrategy {
        SenderStrategy::pure(self.sender_msg)
    }

    pub fn receiver_strategy(&self) -> ReceiverStrategy {
        if self.receiver_act.len() == 2 {
            ReceiverStrategy::no_evidence([self.receiver_act[0] as f64, self.receiver_act[1] as f64])
                .expect("pure action is a probability")
        } else {
            let mut act1 = [[0.0; 2]; 2];
            for n in 0..2 {
                for e in 0..2 {
                    act1[n][e] = self.receiver_act[2 * n + e] as f64;
                }
            }
            ReceiverStrategy::with_evidence(act1).expect("pure action is a probability")
        }
    }
}

/// Enumerate every pure-strategy perfect Bayesian equilibrium.
///
/// On-path beliefs follow the two-step update; every off-path information set
/// only requires the prescribed action to be a best response for some belief
/// in `[0, 1]` (payoffs are linear in the belief, so endpoint support
/// suffices). Survivors carry the supporting interval per off-path set.
pub fn enumerate_pure_pbe(spec: &GameSpec) -> Vec<Equilibrium> {
    crate::support::enumerate_pure(spec, DEFAULT_DEVIATION_TOL)
}

/// `enumerate_pure_pbe` with an explicit deviation tolerance.
pub fn enumerate_pure_pbe_with_tol(spec: &GameSpec, tol: f64) -> Vec<Equilibrium> {
    crate::support::enumerate_pure(spec, tol)
}

/// Options for the mixed-strategy solver, readable from JSON.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SolveOptions {
    pub deviation_tol: f64,
    pub indifference_tol: f64,
}

impl Default for SolveOptions {
    fn default() -> Self {
        Self {
            deviation_tol: DEFAULT_DEVIATION_TOL,
            indifference_tol: DEFAULT_INDIFFERENCE_TOL,
        }
    }
}

/// Solve for all mixed and pure perfect Bayesian equilibria by support
/// enumeration.
///
/// Every assignment of {pure-0, pure-1, mixed} to the sender's two
/// type-conditional choices and the receiver's information sets is screened:
/// receiver indifference pins the message posteriors, the posteriors pin the
/// sender mixture in closed form, and the sender indifference conditions are
/// a small linear system in the mixing receiver probabilities. Each surviving
/// candidate is confirmed with [`verify_pbe`] before being returned, sorted
/// lexicographically by strategy probabilities.
pub fn solve_mixed_pbe(spec: &GameSpec, opts: &SolveOptions) -> Result<Vec<Equilibrium>> {
    crate::support::solve_mixed(spec, opts)
}

/// Outcome of an equilibrium check: pass/fail, the worst deviation gain or
/// consistency discrepancy found, and a description of each failure.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Verdict {
    pub pass: bool,
    pub worst_gain: f64,
    pub failures: Vec<String>,
}

fn decision_info_sets(evidence: bool) -> Vec<InfoSet> {
    if evidence {
        (0..2)
            .flat_map(|n| (0..2).map(move |e| InfoSet::MessageEvidence(n, e)))
            .collect()
    } else {
        (0..2).map(InfoSet::Message).collect()
    }
}

/// Check a claimed equilibrium against the defining conditions:
///
/// (a) no pure message improves any sender type by more than `tol`;
/// (b) the receiver's action at every information set is a best response to
///     the stated belief, within `tol`;
/// (c) stated beliefs match the (two-step) Bayes updates on path, and
///     off-path flags match reachability;
/// (d) every off-path information set carries a supporting belief interval
///     containing the stated belief, whose endpoints both support the action.
pub fn verify_pbe(spec: &GameSpec, eq: &Equilibrium, tol: f64) -> Verdict {
    let mut failures: Vec<String> = Vec::new();
    let mut worst: f64 = 0.0;
    let payoffs = &spec.payoffs;

    if spec.has_evidence() != eq.receiver.has_evidence()
        || spec.has_evidence() != eq.beliefs.after_evidence.is_some()
    {
        return Verdict {
            pass: false,
            worst_gain: f64::INFINITY,
            failures: vec!["profile shape does not match the game (evidence kind)".to_string()],
        };
    }

    // (c) first step: message marginals, flags, Bayes consistency.
    let mut marg = [0.0; 2];
    for n in 0..2 {
        marg[n] = spec.prior.p0() * eq.sender.prob(n, 0) + spec.prior.p1() * eq.sender.prob(n, 1);
        let off = marg[n] == 0.0;
        if off != eq.beliefs.msg_off_path[n] {
            failures.push(format!(
                "message {n}: off-path flag is {} but the message is {}",
                eq.beliefs.msg_off_path[n],
                if off { "unreached" } else { "reached" }
            ));
            continue;
        }
        if !off {
            let bayes = spec.prior.p1() * eq.sender.prob(n, 1) / marg[n];
            let disc = (eq.beliefs.after_message[n] - bayes).abs();
            worst = worst.max(disc);
            if disc > tol {
                failures.push(format!(
                    "message {n}: stated belief {} disagrees with Bayes {}",
                    eq.beliefs.after_message[n], bayes
                ));
            }
        }
    }

    // (c) second step, evidence games only.
    if let (Some(det), Some(mu_ev), Some(ev_off)) = (
        spec.detector.as_ref(),
        eq.beliefs.after_evidence.as_ref(),
        eq.beliefs.ev_off_path.as_ref(),
    ) {
        for n in 0..2 {
            for e in 0..2 {
                let (off, bayes) = if marg[n] == 0.0 {
                    (true, None)
                } else {
                    let mu_n = eq.beliefs.after_message[n];
                    let denom = det.lam(e, 0, n) * (1.0 - mu_n) + det.lam(e, 1, n) * mu_n;
                    if denom > 0.0 {
                        (false, Some(det.lam(e, 1, n) * mu_n / denom))
                    } else {
                        (true, None)
                    }
                };
                if off != ev_off[n][e] {
                    failures.push(format!(
                        "info set ({n},{e}): off-path flag is {} but the set is {}",
                        ev_off[n][e],
                        if off { "unreached" } else { "reached" }
                    ));
                    continue;
                }
                if let Some(bayes) = bayes {
                    let disc = (mu_ev[n][e] - bayes).abs();
                    worst = worst.max(disc);
                    if disc > tol {
                        failures.push(format!(
                            "info set ({n},{e}): stated belief {} disagrees with Bayes {}",
                            mu_ev[n][e], bayes
                        ));
                    }
                }
            }
        }
    }

    // (b) receiver optimality against stated beliefs.
    let gain_at = |mu: f64, act1: f64| -> f64 {
        let v0 = receiver_action_value(payoffs, mu, 0);
        let v1 = receiver_action_value(payoffs, mu, 1);
        v0.max(v1) - (act1 * v1 + (1.0 - act1) * v0)
    };
    let info_sets = decision_info_sets(spec.has_evidence());
    for &info in &info_sets {
        let mu = eq.beliefs.belief_at(info).expect("shape checked above");
        let act1 = match info {
            InfoSet::Message(n) => eq.receiver.act1(n, 0),
            InfoSet::MessageEvidence(n, e) => eq.receiver.act1(n, e),
        };
        let gain = gain_at(mu, act1);
        worst = worst.max(gain);
        if gain > tol {
            failures.push(format!(
                "receiver at {info}: deviating from act1={act1} gains {gain}"
            ));
        }
    }

    // (a) sender optimality per type.
    for m in 0..2 {
        let value = |n: usize| crate::game::sender_message_value(spec, &eq.receiver, m, n);
        let realized: f64 = (0..2).map(|n| eq.sender.prob(n, m) * value(n)).sum();
        let gain = value(0).max(value(1)) - realized;
        worst = worst.max(gain);
        if gain > tol {
            failures.push(format!("sender type {m}: deviating gains {gain}"));
        }
    }

    // (d) off-path supporting intervals.
    for &info in &info_sets {
        if eq.beliefs.off_path_at(info) != Some(true) {
            continue;
        }
        let mu = eq.beliefs.belief_at(info).expect("shape checked above");
        let act1 = match info {
            InfoSet::Message(n) => eq.receiver.act1(n, 0),
            InfoSet::MessageEvidence(n, e) => eq.receiver.act1(n, e),
        };
        match eq.belief_intervals.get(&info) {
            None => failures.push(format!("off-path info set {info} has no belief interval")),
            Some(iv) => {
                if !(0.0..=1.0).contains(&iv.lo) || !(0.0..=1.0).contains(&iv.hi) || iv.lo > iv.hi
                {
                    failures.push(format!("info set {info}: malformed interval {iv:?}"));
                    continue;
                }
                if !iv.contains(mu, tol) {
                    failures.push(format!(
                        "info set {info}: stated belief {mu} outside supporting interval"
                    ));
                }
                for endpoint in [iv.lo, iv.hi] {
                    let gain = gain_at(endpoint, act1);
                    worst = worst.max(gain);
                    if gain > tol {
                        failures.push(format!(
                            "info set {info}: interval endpoint {endpoint} does not support act1={act1}"
                        ));
                    }
                }
            }
        }
    }

    // Stored utilities must agree with the profile.
    match expected_utilities(spec, &eq.sender, &eq.receiver) {
        Ok((u_s, u_r)) => {
            let disc = (u_s - eq.utilities.sender)
                .abs()
                .max((u_r - eq.utilities.receiver).abs());
            worst = worst.max(disc);
            if disc > tol {
                failures.push(format!(
                    "stored utilities ({}, {}) disagree with recomputed ({u_s}, {u_r})",
                    eq.utilities.sender, eq.utilities.receiver
                ));
            }
        }
        Err(e) => failures.push(format!("utilities not computable: {e}")),
    }

    Verdict {
        pass: failures.is_empty(),
        worst_gain: worst,
        failures,
    }
}
