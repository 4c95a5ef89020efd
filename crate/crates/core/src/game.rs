//! Game data model: payoffs, priors, detectors, strategies, beliefs, and the
//! one-step / two-step Bayesian updates every solver builds on.
//!
//! Types, messages, actions and evidence are all binary and indexed by
//! `usize` in `{0, 1}`:
//!
//! * type `m`: 0 = normal system, 1 = honeypot
//! * message `n`: the sender's portrayal of the system
//! * action `y`: 0 = withdraw, 1 = attack
//! * evidence `e`: 1 = evidence of deception, 0 = none

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{GameError, Result};

/// Absolute tolerance for validating probabilities that may come from text
/// config (range checks and sum-to-one checks).
pub const PROB_TOL: f64 = 1e-9;

fn check_prob(value: f64, what: &str) -> Result<f64> {
    if !value.is_finite() || !(-PROB_TOL..=1.0 + PROB_TOL).contains(&value) {
        return Err(GameError::Validation(format!(
            "{what} must be a probability in [0, 1], got {value}"
        )));
    }
    Ok(value.clamp(0.0, 1.0))
}

/// The four sender and four receiver utilities `u^S(y, m)`, `u^R(y, m)`.
///
/// Payoffs do not depend on the message (cheap talk).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "PayoffTableRepr", into = "PayoffTableRepr")]
pub struct PayoffTable {
    sender: [[f64; 2]; 2],   // [y][m]
    receiver: [[f64; 2]; 2], // [y][m]
}

impl PayoffTable {
    /// Build a table from `[y][m]`-indexed utilities. All entries must be finite.
    pub fn new(sender: [[f64; 2]; 2], receiver: [[f64; 2]; 2]) -> Result<Self> {
        for table in [&sender, &receiver] {
            for row in table {
                for &u in row {
                    if !u.is_finite() {
                        return Err(GameError::Validation(format!(
                            "payoffs must be finite, got {u}"
                        )));
                    }
                }
            }
        }
        Ok(Self { sender, receiver })
    }

    /// `u^S(y, m)`.
    pub fn sender_u(&self, y: usize, m: usize) -> f64 {
        self.sender[y][m]
    }

    /// `u^R(y, m)`.
    pub fn receiver_u(&self, y: usize, m: usize) -> f64 {
        self.receiver[y][m]
    }

    /// Sender's gain from being attacked rather than withdrawn from, per type.
    pub fn sender_attack_gain(&self, m: usize) -> f64 {
        self.sender[1][m] - self.sender[0][m]
    }
}

/// Wire format: flat rows ordered u(y=0,m=0), u(y=1,m=0), u(y=0,m=1), u(y=1,m=1).
#[derive(Serialize, Deserialize)]
struct PayoffTableRepr {
    sender: [f64; 4],
    receiver: [f64; 4],
}

impl From<PayoffTable> for PayoffTableRepr {
    fn from(t: PayoffTable) -> Self {
        let flat = |u: &[[f64; 2]; 2]| [u[0][0], u[1][0], u[0][1], u[1][1]];
        Self {
            sender: flat(&t.sender),
            receiver: flat(&t.receiver),
        }
    }
}

impl TryFrom<PayoffTableRepr> for PayoffTable {
    type Error = GameError;

    fn try_from(r: PayoffTableRepr) -> Result<Self> {
        let unflat = |u: [f64; 4]| [[u[0], u[2]], [u[1], u[3]]];
        PayoffTable::new(unflat(r.sender), unflat(r.receiver))
    }
}

/// Construct the honeypot game's payoff table from its six named parameters.
///
/// * `v_o`: defender benefit of observing an attack on a honeypot
/// * `v_g`: defender benefit of a normal system surviving
/// * `c_c`: defender cost of a compromised normal system
/// * `v_a`: attacker benefit of compromising a normal system
/// * `c_a`: attacker cost of attacking any system
/// * `c_o`: attacker additional cost of attacking a honeypot
///
/// An unattacked honeypot is worth 0 to the defender, and withdrawing is
/// always worth 0 to the attacker.
pub fn honeypot_payoffs(
    v_o: f64,
    v_g: f64,
    c_c: f64,
    v_a: f64,
    c_a: f64,
    c_o: f64,
) -> Result<PayoffTable> {
    for (name, value) in [
        ("v_o", v_o),
        ("v_g", v_g),
        ("c_c", c_c),
        ("v_a", v_a),
        ("c_a", c_a),
        ("c_o", c_o),
    ] {
        if !value.is_finite() || value < 0.0 {
            return Err(GameError::Validation(format!(
                "honeypot parameter {name} must be nonnegative, got {value}"
            )));
        }
    }
    PayoffTable::new(
        [[v_g, 0.0], [-c_c, v_o]],
        [[0.0, 0.0], [v_a - c_a, -(c_o + c_a)]],
    )
}

/// The Table 3 sample parameters: v_o=5, v_g=1, c_c=10, v_a-c_a=15, c_o+c_a=22.
pub fn honeypot_table3() -> PayoffTable {
    honeypot_payoffs(5.0, 1.0, 10.0, 16.0, 1.0, 21.0).expect("table 3 parameters are valid")
}

/// Prior probability `p(0)` of the normal-system type; `p(1)` is always `1 - p(0)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Prior {
    p0: f64,
}

impl Prior {
    pub fn new(p0: f64) -> Result<Self> {
        Ok(Self {
            p0: check_prob(p0, "prior p0")?,
        })
    }

    pub fn p0(&self) -> f64 {
        self.p0
    }

    pub fn p1(&self) -> f64 {
        1.0 - self.p0
    }

    /// `p(m)`.
    pub fn p(&self, m: usize) -> f64 {
        if m == 0 {
            self.p0
        } else {
            1.0 - self.p0
        }
    }
}

/// Evidence-emission kernel `lambda(e | m, n)`.
///
/// Stored as the e=1 slice; `lambda(0|m,n)` is the complement, so the
/// normalization invariant holds by construction.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "DetectorRepr", into = "DetectorRepr")]
pub struct DetectorModel {
    lam1: [[f64; 2]; 2], // [m][n] -> lambda(1 | m, n)
}

impl DetectorModel {
    /// Build from the full `lambda(1|m,n)` slice.
    pub fn from_lambda1(lam1: [[f64; 2]; 2]) -> Result<Self> {
        let mut out = [[0.0; 2]; 2];
        for m in 0..2 {
            for n in 0..2 {
                out[m][n] = check_prob(lam1[m][n], &format!("lambda(1|{m},{n})"))?;
            }
        }
        Ok(Self { lam1: out })
    }

    /// The symmetric parameterization: `epsilon = lambda(1|m,n)` for `m != n`
    /// (deception detected), `delta = lambda(1|m,n)` for `m == n`
    /// (false positive).
    pub fn symmetric(epsilon: f64, delta: f64) -> Result<Self> {
        let eps = check_prob(epsilon, "epsilon")?;
        let del = check_prob(delta, "delta")?;
        Ok(Self {
            lam1: [[del, eps], [eps, del]],
        })
    }

    /// `lambda(e | m, n)`.
    pub fn lam(&self, e: usize, m: usize, n: usize) -> f64 {
        if e == 1 {
            self.lam1[m][n]
        } else {
            1.0 - self.lam1[m][n]
        }
    }

    /// Recover `(epsilon, delta)` when the kernel has the symmetric shape.
    pub fn symmetric_rates(&self) -> Option<(f64, f64)> {
        let eps_pair = (self.lam1[0][1], self.lam1[1][0]);
        let del_pair = (self.lam1[0][0], self.lam1[1][1]);
        if (eps_pair.0 - eps_pair.1).abs() <= PROB_TOL && (del_pair.0 - del_pair.1).abs() <= PROB_TOL
        {
            Some((
                0.5 * (eps_pair.0 + eps_pair.1),
                0.5 * (del_pair.0 + del_pair.1),
            ))
        } else {
            None
        }
    }
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum DetectorRepr {
    Symmetric { epsilon: f64, delta: f64 },
    Table { lambda: BTreeMap<String, f64> },
}

impl From<DetectorModel> for DetectorRepr {
    fn from(d: DetectorModel) -> Self {
        if let Some((epsilon, delta)) = d.symmetric_rates() {
            return DetectorRepr::Symmetric { epsilon, delta };
        }
        let mut lambda = BTreeMap::new();
        for e in 0..2 {
            for m in 0..2 {
                for n in 0..2 {
                    lambda.insert(format!("{e}|{m},{n}"), d.lam(e, m, n));
                }
            }
        }
        DetectorRepr::Table { lambda }
    }
}

impl TryFrom<DetectorRepr> for DetectorModel {
    type Error = GameError;

    fn try_from(r: DetectorRepr) -> Result<Self> {
        match r {
            DetectorRepr::Symmetric { epsilon, delta } => DetectorModel::symmetric(epsilon, delta),
            DetectorRepr::Table { lambda } => {
                let get = |key: &str| {
                    lambda
                        .get(key)
                        .copied()
                        .ok_or_else(|| GameError::Validation(format!("lambda table missing {key}")))
                };
                let mut lam1 = [[0.0; 2]; 2];
                for m in 0..2 {
                    for n in 0..2 {
                        let one = get(&format!("1|{m},{n}"))?;
                        let zero = get(&format!("0|{m},{n}"))?;
                        if (one + zero - 1.0).abs() > PROB_TOL {
                            return Err(GameError::Validation(format!(
                                "lambda(.|{m},{n}) must sum to 1, got {}",
                                one + zero
                            )));
                        }
                        lam1[m][n] = one;
                    }
                }
                DetectorModel::from_lambda1(lam1)
            }
        }
    }
}

/// Sender mixed strategy: probability of sending message 1 per observed type.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "SenderStrategyRepr", into = "SenderStrategyRepr")]
pub struct SenderStrategy {
    sig1: [f64; 2], // [m] -> sigma_S(1 | m)
}

impl SenderStrategy {
    pub fn new(sig1_given_0: f64, sig1_given_1: f64) -> Result<Self> {
        Ok(Self {
            sig1: [
                check_prob(sig1_given_0, "sigma_S(1|0)")?,
                check_prob(sig1_given_1, "sigma_S(1|1)")?,
            ],
        })
    }

    /// Pure strategy sending `msg_for_type[m]` when the type is `m`.
    pub fn pure(msg_for_type: [usize; 2]) -> Self {
        Self {
            sig1: [msg_for_type[0] as f64, msg_for_type[1] as f64],
        }
    }

    /// `sigma_S(n | m)`.
    pub fn prob(&self, n: usize, m: usize) -> f64 {
        if n == 1 {
            self.sig1[m]
        } else {
            1.0 - self.sig1[m]
        }
    }

    /// `sigma_S(1 | m)`.
    pub fn sig1(&self, m: usize) -> f64 {
        self.sig1[m]
    }
}

#[derive(Serialize, Deserialize)]
struct SenderStrategyRepr {
    sig1_given_m: BTreeMap<String, f64>,
}

impl From<SenderStrategy> for SenderStrategyRepr {
    fn from(s: SenderStrategy) -> Self {
        let mut sig1_given_m = BTreeMap::new();
        sig1_given_m.insert("0".to_string(), s.sig1[0]);
        sig1_given_m.insert("1".to_string(), s.sig1[1]);
        Self { sig1_given_m }
    }
}

impl TryFrom<SenderStrategyRepr> for SenderStrategy {
    type Error = GameError;

    fn try_from(r: SenderStrategyRepr) -> Result<Self> {
        let get = |key: &str| {
            r.sig1_given_m
                .get(key)
                .copied()
                .ok_or_else(|| GameError::Validation(format!("sender strategy missing type {key}")))
        };
        SenderStrategy::new(get("0")?, get("1")?)
    }
}

/// Receiver mixed strategy: probability of attacking per information set.
///
/// Without evidence the information sets are the two messages; with evidence
/// they are the four `(n, e)` pairs.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ReceiverStrategyRepr", into = "ReceiverStrategyRepr")]
pub enum ReceiverStrategy {
    NoEvidence {
        act1: [f64; 2], // [n] -> sigma_R(1 | n)
    },
    WithEvidence {
        act1: [[f64; 2]; 2], // [n][e] -> sigma_R(1 | n, e)
    },
}

impl ReceiverStrategy {
    pub fn no_evidence(act1_given_msg: [f64; 2]) -> Result<Self> {
        Ok(Self::NoEvidence {
            act1: [
                check_prob(act1_given_msg[0], "sigma_R(1|0)")?,
                check_prob(act1_given_msg[1], "sigma_R(1|1)")?,
            ],
        })
    }

    pub fn with_evidence(act1: [[f64; 2]; 2]) -> Result<Self> {
        let mut out = [[0.0; 2]; 2];
        for n in 0..2 {
            for e in 0..2 {
                out[n][e] = check_prob(act1[n][e], &format!("sigma_R(1|{n},{e})"))?;
            }
        }
        Ok(Self::WithEvidence { act1: out })
    }

    pub fn has_evidence(&self) -> bool {
        matches!(self, Self::WithEvidence { .. })
    }

    /// `sigma_R(1 | n)` or `sigma_R(1 | n, e)`; `e` is ignored by the
    /// no-evidence kind.
    pub fn act1(&self, n: usize, e: usize) -> f64 {
        match self {
            Self::NoEvidence { act1 } => act1[n],
            Self::WithEvidence { act1 } => act1[n][e],
        }
    }
}

#[derive(Serialize, Deserialize)]
struct ReceiverStrategyRepr {
    kind: String,
    act1_given: BTreeMap<String, f64>,
}

impl From<ReceiverStrategy> for ReceiverStrategyRepr {
    fn from(s: ReceiverStrategy) -> Self {
        let mut act1_given = BTreeMap::new();
        let kind = match s {
            ReceiverStrategy::NoEvidence { act1 } => {
                act1_given.insert("0".to_string(), act1[0]);
                act1_given.insert("1".to_string(), act1[1]);
                "no_evidence"
            }
            ReceiverStrategy::WithEvidence { act1 } => {
                for n in 0..2 {
                    for e in 0..2 {
                        act1_given.insert(format!("{n},{e}"), act1[n][e]);
                    }
                }
                "with_evidence"
            }
        };
        Self {
            kind: kind.to_string(),
            act1_given,
        }
    }
}

impl TryFrom<ReceiverStrategyRepr> for ReceiverStrategy {
    type Error = GameError;

    fn try_from(r: ReceiverStrategyRepr) -> Result<Self> {
        let get = |key: &str| {
            r.act1_given
                .get(key)
                .copied()
                .ok_or_else(|| {
                    GameError::Validation(format!("receiver strategy missing info set {key}"))
                })
        };
        match r.kind.as_str() {
            "no_evidence" => ReceiverStrategy::no_evidence([get("0")?, get("1")?]),
            "with_evidence" => {
                let mut act1 = [[0.0; 2]; 2];
                for n in 0..2 {
                    for e in 0..2 {
                        act1[n][e] = get(&format!("{n},{e}"))?;
                    }
                }
                ReceiverStrategy::with_evidence(act1)
            }
            other => Err(GameError::Validation(format!(
                "unknown receiver strategy kind {other:?}"
            ))),
        }
    }
}

/// A receiver information set: a bare message, or a message-evidence pair.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum InfoSet {
    Message(usize),
    MessageEvidence(usize, usize),
}

impl std::fmt::Display for InfoSet {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            InfoSet::Message(n) => write!(f, "{n}"),
            InfoSet::MessageEvidence(n, e) => write!(f, "{n},{e}"),
        }
    }
}

impl std::str::FromStr for InfoSet {
    type Err = GameError;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || GameError::Validation(format!("bad info set key {s:?}"));
        let parse_bit = |t: &str| -> Result<usize> {
            match t {
                "0" => Ok(0),
                "1" => Ok(1),
                _ => Err(bad()),
            }
        };
        match s.split_once(',') {
            None => Ok(InfoSet::Message(parse_bit(s)?)),
            Some((n, e)) => Ok(InfoSet::MessageEvidence(parse_bit(n)?, parse_bit(e)?)),
        }
    }
}

impl Serialize for InfoSet {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for InfoSet {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Receiver posteriors: the first-step beliefs `mu_R(1|n)` and, for evidence
/// games, the second-step beliefs `mu_R(1|n,e)`.
///
/// Information sets reached with probability zero are flagged off-path; their
/// stored beliefs are a solver's choice, never a silent default.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "BeliefSystemRepr", into = "BeliefSystemRepr")]
pub struct BeliefSystem {
    pub after_message: [f64; 2],
    pub msg_off_path: [bool; 2],
    pub after_evidence: Option<[[f64; 2]; 2]>, // [n][e]
    pub ev_off_path: Option<[[bool; 2]; 2]>,
}

impl BeliefSystem {
    /// Stored belief at a receiver decision info set.
    pub fn belief_at(&self, info: InfoSet) -> Option<f64> {
        match info {
            InfoSet::Message(n) => Some(self.after_message[n]),
            InfoSet::MessageEvidence(n, e) => self.after_evidence.map(|mu| mu[n][e]),
        }
    }

    /// Off-path flag at an info set.
    pub fn off_path_at(&self, info: InfoSet) -> Option<bool> {
        match info {
            InfoSet::Message(n) => Some(self.msg_off_path[n]),
            InfoSet::MessageEvidence(n, e) => self.ev_off_path.map(|f| f[n][e]),
        }
    }
}

#[derive(Serialize, Deserialize)]
struct BeliefSystemRepr {
    after_message: BTreeMap<String, f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    after_evidence: Option<BTreeMap<String, f64>>,
    off_path_flags: BTreeMap<String, bool>,
}

impl From<BeliefSystem> for BeliefSystemRepr {
    fn from(b: BeliefSystem) -> Self {
        let mut after_message = BTreeMap::new();
        let mut off_path_flags = BTreeMap::new();
        for n in 0..2 {
            after_message.insert(n.to_string(), b.after_message[n]);
            off_path_flags.insert(n.to_string(), b.msg_off_path[n]);
        }
        let after_evidence = b.after_evidence.map(|mu| {
            let mut map = BTreeMap::new();
            for n in 0..2 {
                for e in 0..2 {
                    map.insert(format!("{n},{e}"), mu[n][e]);
                }
            }
            map
        });
        if let Some(flags) = b.ev_off_path {
            for n in 0..2 {
                for e in 0..2 {
                    off_path_flags.insert(format!("{n},{e}"), flags[n][e]);
                }
            }
        }
        Self {
            after_message,
            after_evidence,
            off_path_flags,
        }
    }
}

impl TryFrom<BeliefSystemRepr> for BeliefSystem {
    type Error = GameError;

    fn try_from(r: BeliefSystemRepr) -> Result<Self> {
        let msg = |n: usize| {
            r.after_message.get(&n.to_string()).copied().ok_or_else(|| {
                GameError::Validation(format!("beliefs missing after_message[{n}]"))
            })
        };
        let flag = |key: String| r.off_path_flags.get(&key).copied().unwrap_or(false);
        let mut after_message = [0.0; 2];
        let mut msg_off_path = [false; 2];
        for n in 0..2 {
            after_message[n] = check_prob(msg(n)?, "belief")?;
            msg_off_path[n] = flag(n.to_string());
        }
        let (after_evidence, ev_off_path) = match r.after_evidence {
            None => (None, None),
            Some(map) => {
                let mut mu = [[0.0; 2]; 2];
                let mut flags = [[false; 2]; 2];
                for n in 0..2 {
                    for e in 0..2 {
                        let key = format!("{n},{e}");
                        let value = map.get(&key).copied().ok_or_else(|| {
                            GameError::Validation(format!("beliefs missing after_evidence[{key}]"))
                        })?;
                        mu[n][e] = check_prob(value, "belief")?;
                        flags[n][e] = flag(key);
                    }
                }
                (Some(mu), Some(flags))
            }
        };
        Ok(Self {
            after_message,
            msg_off_path,
            after_evidence,
            ev_off_path,
        })
    }
}

/// A complete game instance. `detector: None` is the plain cheap-talk game.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GameSpec {
    pub payoffs: PayoffTable,
    pub prior: Prior,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub detector: Option<DetectorModel>,
}

impl GameSpec {
    pub fn new(payoffs: PayoffTable, prior: Prior, detector: Option<DetectorModel>) -> Self {
        Self {
            payoffs,
            prior,
            detector,
        }
    }

    pub fn has_evidence(&self) -> bool {
        self.detector.is_some()
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text)
            .map_err(|e| GameError::Validation(format!("bad game spec JSON: {e}")))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("game spec serializes")
    }
}

/// Result of a Bayesian update: a posterior, or the marker that the
/// conditioning event has probability zero and the belief is a free choice.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Posterior {
    OnPath(f64),
    OffPath,
}

impl Posterior {
    pub fn on_path(self) -> Option<f64> {
        match self {
            Posterior::OnPath(mu) => Some(mu),
            Posterior::OffPath => None,
        }
    }
}

/// Shared Bayes kernel: posterior of type 1 from prior `mu` under
/// likelihoods `l0`, `l1`; `None` when the denominator is zero.
pub(crate) fn bayes_update(l0: f64, l1: f64, mu: f64) -> Option<f64> {
    let denom = l0 * (1.0 - mu) + l1 * mu;
    if denom > 0.0 {
        Some((l1 * mu / denom).clamp(0.0, 1.0))
    } else {
        None
    }
}

/// First-step update `mu_R(1|n)` from the prior and the sender strategy.
pub fn posterior_from_message(spec: &GameSpec, sender: &SenderStrategy, n: usize) -> Posterior {
    let denom = sender.prob(n, 0) * spec.prior.p0() + sender.prob(n, 1) * spec.prior.p1();
    if denom > 0.0 {
        Posterior::OnPath((sender.prob(n, 1) * spec.prior.p1() / denom).clamp(0.0, 1.0))
    } else {
        Posterior::OffPath
    }
}

/// Second-step update `mu_R(1|n,e)` from a first-step belief `mu_n`.
pub fn posterior_from_evidence(
    detector: &DetectorModel,
    mu_n: f64,
    n: usize,
    e: usize,
) -> Posterior {
    match bayes_update(detector.lam(e, 0, n), detector.lam(e, 1, n), mu_n) {
        Some(mu) => Posterior::OnPath(mu),
        None => Posterior::OffPath,
    }
}

/// Expected utility to the receiver of action `y` under belief `mu` that the
/// type is a honeypot. This is the summand of the receiver's conditional
/// objective at an information set.
pub fn receiver_action_value(payoffs: &PayoffTable, mu: f64, y: usize) -> f64 {
    (1.0 - mu) * payoffs.receiver_u(y, 0) + mu * payoffs.receiver_u(y, 1)
}

/// Probability that type `m` gets attacked after sending message `n`.
pub(crate) fn attack_prob_given_type_message(
    spec: &GameSpec,
    receiver: &ReceiverStrategy,
    m: usize,
    n: usize,
) -> f64 {
    match (spec.detector.as_ref(), receiver) {
        (None, ReceiverStrategy::NoEvidence { act1 }) => act1[n],
        (Some(det), ReceiverStrategy::WithEvidence { act1 }) => {
            det.lam(0, m, n) * act1[n][0] + det.lam(1, m, n) * act1[n][1]
        }
        // Mismatched shapes are rejected by the public entry points.
        (None, ReceiverStrategy::WithEvidence { act1 }) => act1[n][0],
        (Some(_), ReceiverStrategy::NoEvidence { act1 }) => act1[n],
    }
}

fn check_kind(spec: &GameSpec, receiver: &ReceiverStrategy) -> Result<()> {
    if spec.has_evidence() != receiver.has_evidence() {
        return Err(GameError::KindMismatch(format!(
            "game {} a detector but receiver strategy is {}",
            if spec.has_evidence() { "has" } else { "lacks" },
            if receiver.has_evidence() {
                "evidence-conditional"
            } else {
                "message-conditional"
            },
        )));
    }
    Ok(())
}

/// Sender's expected utility of sending message `n` when the type is `m`,
/// against the given receiver strategy.
pub(crate) fn sender_message_value(
    spec: &GameSpec,
    receiver: &ReceiverStrategy,
    m: usize,
    n: usize,
) -> f64 {
    let attack = attack_prob_given_type_message(spec, receiver, m, n);
    spec.payoffs.sender_u(0, m) + spec.payoffs.sender_attack_gain(m) * attack
}

/// The per-type sender objective: expected utility of playing `sender` when
/// the receiver plays `receiver` and the realized type is `m`.
pub fn sender_utility_given_type(
    spec: &GameSpec,
    sender: &SenderStrategy,
    receiver: &ReceiverStrategy,
    m: usize,
) -> Result<f64> {
    check_kind(spec, receiver)?;
    Ok((0..2)
        .map(|n| sender.prob(n, m) * sender_message_value(spec, receiver, m, n))
        .sum())
}

/// Exact expected utilities `(U_S, U_R)` over the joint distribution of
/// (type, message, evidence, action).
pub fn expected_utilities(
    spec: &GameSpec,
    sender: &SenderStrategy,
    receiver: &ReceiverStrategy,
) -> Result<(f64, f64)> {
    check_kind(spec, receiver)?;
    let mut u_s = 0.0;
    let mut u_r = 0.0;
    for m in 0..2 {
        let pm = spec.prior.p(m);
        if pm == 0.0 {
            continue;
        }
        for n in 0..2 {
            let reach = pm * sender.prob(n, m);
            if reach == 0.0 {
                continue;
            }
            let attack = attack_prob_given_type_message(spec, receiver, m, n);
            u_s += reach
                * (attack * spec.payoffs.sender_u(1, m)
                    + (1.0 - attack) * spec.payoffs.sender_u(0, m));
            u_r += reach
                * (attack * spec.payoffs.receiver_u(1, m)
                    + (1.0 - attack) * spec.payoffs.receiver_u(0, m));
        }
    }
    Ok((u_s, u_r))
}
