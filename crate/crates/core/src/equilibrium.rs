//! The verified equilibrium record shared by the closed-form and numeric
//! solvers: strategy profile, beliefs, supporting off-path belief intervals,
//! expected utilities and a classification label.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::game::{BeliefSystem, InfoSet, ReceiverStrategy, SenderStrategy};

/// Sender-strategy taxonomy. Pure profiles are separating or pooling; one
/// strictly mixing type is partial pooling; both mixing is fully mixed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Classification {
    Separating,
    Pooling,
    PartialPooling,
    Mixed,
}

impl Classification {
    pub fn of(sender: &SenderStrategy) -> Self {
        const TOL: f64 = 1e-9;
        let pure = |x: f64| x <= TOL || x >= 1.0 - TOL;
        let s0 = sender.sig1(0);
        let s1 = sender.sig1(1);
        match (pure(s0), pure(s1)) {
            (true, true) => {
                if (s0 > 0.5) == (s1 > 0.5) {
                    Classification::Pooling
                } else {
                    Classification::Separating
                }
            }
            (false, false) => Classification::Mixed,
            _ => Classification::PartialPooling,
        }
    }
}

/// Closed interval of beliefs supporting an off-path action, as `[lo, hi]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(into = "(f64, f64)", try_from = "(f64, f64)")]
pub struct BeliefInterval {
    pub lo: f64,
    pub hi: f64,
}

impl BeliefInterval {
    pub fn new(lo: f64, hi: f64) -> Self {
        Self { lo, hi }
    }

    pub fn point(mu: f64) -> Self {
        Self { lo: mu, hi: mu }
    }

    pub fn midpoint(&self) -> f64 {
        0.5 * (self.lo + self.hi)
    }

    pub fn contains(&self, mu: f64, tol: f64) -> bool {
        mu >= self.lo - tol && mu <= self.hi + tol
    }
}

impl From<BeliefInterval> for (f64, f64) {
    fn from(i: BeliefInterval) -> Self {
        (i.lo, i.hi)
    }
}

impl TryFrom<(f64, f64)> for BeliefInterval {
    type Error = crate::error::GameError;

    fn try_from((lo, hi): (f64, f64)) -> crate::error::Result<Self> {
        if !(lo.is_finite() && hi.is_finite() && lo <= hi) {
            return Err(crate::error::GameError::Validation(format!(
                "bad belief interval [{lo}, {hi}]"
            )));
        }
        Ok(Self { lo, hi })
    }
}

/// Expected utility pair.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Utilities {
    pub sender: f64,
    pub receiver: f64,
}

/// A strategy profile plus beliefs forming a perfect Bayesian equilibrium,
/// with the supporting belief interval recorded for every off-path info set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Equilibrium {
    pub sender: SenderStrategy,
    pub receiver: ReceiverStrategy,
    pub beliefs: BeliefSystem,
    pub belief_intervals: BTreeMap<InfoSet, BeliefInterval>,
    pub utilities: Utilities,
    pub classification: Classification,
    /// True when every sender strategy supports this profile (the omnipotent
    /// detector makes the message irrelevant); the stored sender is then just
    /// a representative.
    #[serde(default)]
    pub all_sender_strategies: bool,
}

impl Equilibrium {
    /// Strategy probabilities flattened into a stable ordering, used for the
    /// deterministic lexicographic sort and for deduplication.
    pub fn strategy_key(&self) -> Vec<f64> {
        let mut key = vec![self.sender.sig1(0), self.sender.sig1(1)];
        match &self.receiver {
            ReceiverStrategy::NoEvidence { .. } => {
                for n in 0..2 {
                    key.push(self.receiver.act1(n, 0));
                }
            }
            ReceiverStrategy::WithEvidence { .. } => {
                for n in 0..2 {
                    for e in 0..2 {
                        key.push(self.receiver.act1(n, e));
                    }
                }
            }
        }
        key
    }
}

/// Sort equilibria lexicographically by strategy probabilities and drop
/// duplicates of the same profile.
pub fn sort_and_dedup(mut eqs: Vec<Equilibrium>) -> Vec<Equilibrium> {
    let rounded = |eq: &Equilibrium| -> Vec<i64> {
        eq.strategy_key()
            .iter()
            .map(|x| (x * 1e12).round() as i64)
            .collect()
    };
    eqs.sort_by_key(rounded);
    eqs.dedup_by(|a, b| rounded(a) == rounded(b));
    eqs
}
