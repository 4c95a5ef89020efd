//! Closed-form equilibrium results: the receiver's cost-benefit constants,
//! payoff-region classification, the pooling and separating analysis of the
//! game without evidence, and the omnipotent-detector equilibria.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::equilibrium::{
    sort_and_dedup, BeliefInterval, Classification, Equilibrium, Utilities,
};
use crate::error::{GameError, Result};
use crate::game::{
    BeliefSystem, GameSpec, InfoSet, PayoffTable, ReceiverStrategy, SenderStrategy,
};
use crate::support::{action_support, attack_advantage};

/// Default boundary tolerance for payoff-region classification.
pub const DEFAULT_BOUNDARY_TOL: f64 = 1e-9;

/// Receiver's relative benefit of attacking a normal system (`CB0`) and of
/// withdrawing from a honeypot (`CB1`):
/// `CB0 = u^R(1,0) - u^R(0,0)`, `CB1 = u^R(0,1) - u^R(1,1)`.
pub fn cb_constants(payoffs: &PayoffTable) -> (f64, f64) {
    (
        payoffs.receiver_u(1, 0) - payoffs.receiver_u(0, 0),
        payoffs.receiver_u(0, 1) - payoffs.receiver_u(1, 1),
    )
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RegionLabel {
    AttackFavorable,
    DefendFavorable,
    NeitherFavorable,
}

impl std::fmt::Display for RegionLabel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            Self::AttackFavorable => "attack_favorable",
            Self::DefendFavorable => "defend_favorable",
            Self::NeitherFavorable => "neither_favorable",
        };
        f.write_str(s)
    }
}

/// Region verdict with the two sides of the comparison that produced it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PayoffRegion {
    pub label: RegionLabel,
    /// `p(0) * CB0`
    pub lhs: f64,
    /// `(1 - p(0)) * CB1`
    pub rhs: f64,
}

/// Compare `p(0)*CB0` against `(1-p(0))*CB1`; within `boundary_tol` of
/// equality the region is neither-favorable.
pub fn classify_payoff_region(spec: &GameSpec, boundary_tol: f64) -> PayoffRegion {
    let (cb0, cb1) = cb_constants(&spec.payoffs);
    let lhs = spec.prior.p0() * cb0;
    let rhs = spec.prior.p1() * cb1;
    let label = if (lhs - rhs).abs() <= boundary_tol {
        RegionLabel::NeitherFavorable
    } else if lhs > rhs {
        RegionLabel::AttackFavorable
    } else {
        RegionLabel::DefendFavorable
    };
    PayoffRegion { label, lhs, rhs }
}

fn require_no_detector(spec: &GameSpec, what: &str) -> Result<()> {
    if spec.has_evidence() {
        return Err(GameError::Validation(format!(
            "{what} applies to the game without evidence; remove the detector"
        )));
    }
    Ok(())
}

/// Check both separating candidates (truth-telling `n = m` and inversion
/// `n = 1 - m`) against every sequentially rational receiver response and
/// return the profiles that survive the sender's deviation incentives.
///
/// For the honeypot payoff signs this is always empty: the attacker would
/// exploit whichever labeling reveals the truth.
pub fn separating_equilibria_no_evidence(spec: &GameSpec) -> Result<Vec<Equilibrium>> {
    require_no_detector(spec, "separating analysis")?;
    Ok(crate::numeric::enumerate_pure_pbe(spec)
        .into_iter()
        .filter(|eq| eq.classification == Classification::Separating)
        .collect())
}

/// The pooling equilibria of the no-evidence game, in closed form.
///
/// In the attack-favorable region the receiver always attacks; in the
/// defend-favorable region it always withdraws. Pooling on 0 and pooling on 1
/// both work and give identical utilities; the off-path message carries a
/// supporting belief interval.
pub fn pooling_equilibria_no_evidence(spec: &GameSpec) -> Result<Vec<Equilibrium>> {
    require_no_detector(spec, "pooling analysis")?;
    let region = classify_payoff_region(spec, DEFAULT_BOUNDARY_TOL);
    let act = match region.label {
        RegionLabel::AttackFavorable => 1.0,
        RegionLabel::DefendFavorable => 0.0,
        RegionLabel::NeitherFavorable => {
            return Err(GameError::UnsupportedRegion(
                "the neither-favorable knife edge has no closed-form pooling analysis".to_string(),
            ))
        }
    };
    let u = &spec.payoffs;
    let p0 = spec.prior.p0();
    let utilities = if act == 1.0 {
        Utilities {
            sender: u.sender_u(1, 1) - p0 * (u.sender_u(1, 1) - u.sender_u(1, 0)),
            receiver: u.receiver_u(1, 1) - p0 * (u.receiver_u(1, 1) - u.receiver_u(1, 0)),
        }
    } else {
        Utilities {
            sender: p0 * (u.sender_u(0, 0) - u.sender_u(0, 1)) + u.sender_u(0, 1),
            receiver: p0 * (u.receiver_u(0, 0) - u.receiver_u(0, 1)) + u.receiver_u(0, 1),
        }
    };

    let (cb0, cb1) = cb_constants(u);
    let mut out = Vec::new();
    for pool_msg in 0..2 {
        let off_msg = 1 - pool_msg;
        let interval = action_support(cb0, cb1, act, 0.0).ok_or_else(|| {
            GameError::UnsupportedRegion(format!(
                "pooling action has no supporting off-path belief (CB0={cb0}, CB1={cb1})"
            ))
        })?;
        let interval = BeliefInterval::new(interval.lo.clamp(0.0, 1.0), interval.hi.clamp(0.0, 1.0));
        let mut after_message = [0.0; 2];
        let mut msg_off_path = [false; 2];
        after_message[pool_msg] = spec.prior.p1();
        after_message[off_msg] = interval.midpoint();
        msg_off_path[off_msg] = true;
        let mut belief_intervals = BTreeMap::new();
        belief_intervals.insert(InfoSet::Message(off_msg), interval);

        out.push(Equilibrium {
            sender: SenderStrategy::pure([pool_msg, pool_msg]),
            receiver: ReceiverStrategy::NoEvidence { act1: [act, act] },
            beliefs: BeliefSystem {
                after_message,
                msg_off_path,
                after_evidence: None,
                ev_off_path: None,
            },
            belief_intervals,
            utilities,
            classification: Classification::Pooling,
            all_sender_strategies: false,
        });
    }
    Ok(sort_and_dedup(out))
}

/// Equilibria of the evidence game under an omnipotent detector
/// (`epsilon = 1, delta = 0`).
///
/// The pair `(n, e)` then reveals the type exactly (`e = 1` flips the
/// message), the receiver best-responds to the revealed type, and every
/// sender strategy is optimal because the message cannot change the outcome.
/// Truth-telling is returned as the representative, flagged accordingly.
pub fn omnipotent_equilibria(spec: &GameSpec) -> Result<Vec<Equilibrium>> {
    let det = spec.detector.as_ref().ok_or_else(|| {
        GameError::DetectorPrecondition("omnipotent analysis requires a detector".to_string())
    })?;
    let (eps, del) = det.symmetric_rates().ok_or_else(|| {
        GameError::DetectorPrecondition("detector must use the symmetric form".to_string())
    })?;
    if (eps - 1.0).abs() > 1e-9 || del.abs() > 1e-9 {
        return Err(GameError::DetectorPrecondition(format!(
            "omnipotent analysis requires epsilon = 1, delta = 0; got ({eps}, {del})"
        )));
    }

    let (cb0, cb1) = cb_constants(&spec.payoffs);
    // Best response(s) to each revealed type: the attack advantage at a point
    // belief is CB0 (normal) or -CB1 (honeypot). Ties produce one equilibrium
    // per action choice.
    let choices = |advantage: f64| -> Vec<f64> {
        if advantage > 0.0 {
            vec![1.0]
        } else if advantage < 0.0 {
            vec![0.0]
        } else {
            vec![0.0, 1.0]
        }
    };
    let mut out = Vec::new();
    for &act_normal in &choices(attack_advantage(cb0, cb1, 0.0)) {
        for &act_honeypot in &choices(attack_advantage(cb0, cb1, 1.0)) {
            // e = 1 flips the message back to the true type.
            let decoded = |n: usize, e: usize| if e == 1 { 1 - n } else { n };
            let act_for = |m: usize| if m == 0 { act_normal } else { act_honeypot };
            let mut act1 = [[0.0; 2]; 2];
            for n in 0..2 {
                for e in 0..2 {
                    act1[n][e] = act_for(decoded(n, e));
                }
            }
            let sender = SenderStrategy::pure([0, 1]);

            let mut after_message = [0.0, 1.0];
            let mut msg_off_path = [false; 2];
            let mut mu_ev = [[0.0; 2]; 2];
            let mut ev_off = [[false; 2]; 2];
            let mut belief_intervals = BTreeMap::new();
            for n in 0..2 {
                if spec.prior.p(n) == 0.0 {
                    // The truthful representative never sends this message.
                    msg_off_path[n] = true;
                    after_message[n] = 0.5;
                }
                for e in 0..2 {
                    let m = decoded(n, e);
                    mu_ev[n][e] = m as f64;
                    // Truthful senders never emit e = 1 (delta = 0), and an
                    // off-path message leaves both slots unreached.
                    if e == 1 || msg_off_path[n] {
                        ev_off[n][e] = true;
                        let iv = action_support(cb0, cb1, act1[n][e], 0.0)
                            .expect("chosen action is supported at the decoded belief");
                        let iv =
                            BeliefInterval::new(iv.lo.clamp(0.0, 1.0), iv.hi.clamp(0.0, 1.0));
                        mu_ev[n][e] = iv.midpoint();
                        belief_intervals.insert(InfoSet::MessageEvidence(n, e), iv);
                    }
                }
            }

            let utilities = Utilities {
                sender: spec.prior.p0() * spec.payoffs.sender_u(act_normal as usize, 0)
                    + spec.prior.p1() * spec.payoffs.sender_u(act_honeypot as usize, 1),
                receiver: spec.prior.p0() * spec.payoffs.receiver_u(act_normal as usize, 0)
                    + spec.prior.p1() * spec.payoffs.receiver_u(act_honeypot as usize, 1),
            };
            out.push(Equilibrium {
                sender,
                receiver: ReceiverStrategy::WithEvidence { act1 },
                beliefs: BeliefSystem {
                    after_message,
                    msg_off_path,
                    after_evidence: Some(mu_ev),
                    ev_off_path: Some(ev_off),
                },
                belief_intervals,
                utilities,
                classification: Classification::Separating,
                all_sender_strategies: true,
            });
        }
    }
    Ok(sort_and_dedup(out))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::{honeypot_table3, DetectorModel, Prior};
    use crate::numeric::verify_pbe;

    fn table3(p0: f64) -> GameSpec {
        GameSpec::new(honeypot_table3(), Prior::new(p0).unwrap(), None)
    }

    #[test]
    fn cb_constants_examples() {
        assert_eq!(cb_constants(&honeypot_table3()), (15.0, 22.0));
        let zero = PayoffTable::new([[0.0; 2]; 2], [[0.0; 2]; 2]).unwrap();
        assert_eq!(cb_constants(&zero), (0.0, 0.0));
        let t = PayoffTable::new([[0.0; 2]; 2], [[0.0, 0.0], [1.0, -1.0]]).unwrap();
        assert_eq!(cb_constants(&t), (1.0, 1.0));
    }

    #[test]
    fn classify_region_examples() {
        assert_eq!(
            classify_payoff_region(&table3(0.9), DEFAULT_BOUNDARY_TOL).label,
            RegionLabel::AttackFavorable
        );
        assert_eq!(
            classify_payoff_region(&table3(0.2), DEFAULT_BOUNDARY_TOL).label,
            RegionLabel::DefendFavorable
        );
        assert_eq!(
            classify_payoff_region(&table3(22.0 / 37.0), DEFAULT_BOUNDARY_TOL).label,
            RegionLabel::NeitherFavorable
        );
    }

    #[test]
    fn no_separating_equilibria_for_honeypot_payoffs() {
        for p0 in [0.1, 0.4, 22.0 / 37.0, 0.7, 0.95] {
            assert!(separating_equilibria_no_evidence(&table3(p0))
                .unwrap()
                .is_empty());
        }
    }

    #[test]
    fn aligned_interests_support_truth_telling() {
        // Both players earn 1 when the action matches the type.
        let aligned = PayoffTable::new([[1.0, 0.0], [0.0, 1.0]], [[1.0, 0.0], [0.0, 1.0]]).unwrap();
        let spec = GameSpec::new(aligned, Prior::new(0.6).unwrap(), None);
        let eqs = separating_equilibria_no_evidence(&spec).unwrap();
        assert!(eqs.iter().any(|eq| {
            eq.sender.sig1(0) == 0.0
                && eq.sender.sig1(1) == 1.0
                && eq.receiver.act1(0, 0) == 0.0
                && eq.receiver.act1(1, 0) == 1.0
        }));
        for eq in &eqs {
            assert!(verify_pbe(&spec, eq, 1e-9).pass);
        }
    }

    #[test]
    fn degenerate_prior_keeps_off_path_interval() {
        // At p0 = 1 only type 0 is realized, so the message it does not send
        // is off path and must carry a supporting interval.
        let eqs = separating_equilibria_no_evidence(&table3(1.0)).unwrap();
        for eq in &eqs {
            let off_msg = if eq.sender.sig1(0) == 0.0 { 1 } else { 0 };
            assert!(eq.beliefs.msg_off_path[off_msg]);
            assert!(eq.belief_intervals.contains_key(&InfoSet::Message(off_msg)));
            assert!(verify_pbe(&table3(1.0), eq, 1e-9).pass);
        }
    }

    #[test]
    fn pooling_equilibria_examples() {
        let eqs = pooling_equilibria_no_evidence(&table3(0.9)).unwrap();
        assert_eq!(eqs.len(), 2);
        for eq in &eqs {
            assert!((eq.utilities.sender - -8.5).abs() < 1e-12);
            assert!((eq.utilities.receiver - 11.3).abs() < 1e-12);
            assert!(verify_pbe(&table3(0.9), eq, 1e-9).pass);
        }

        let eqs = pooling_equilibria_no_evidence(&table3(0.2)).unwrap();
        assert_eq!(eqs.len(), 2);
        for eq in &eqs {
            assert!((eq.utilities.sender - 0.2).abs() < 1e-12);
            assert!(eq.utilities.receiver.abs() < 1e-12);
        }

        let eqs = pooling_equilibria_no_evidence(&table3(0.5)).unwrap();
        for eq in &eqs {
            assert!((eq.utilities.sender - 0.5).abs() < 1e-12);
        }

        assert!(matches!(
            pooling_equilibria_no_evidence(&table3(22.0 / 37.0)),
            Err(GameError::UnsupportedRegion(_))
        ));
    }

    #[test]
    fn pooling_off_path_intervals_match_closed_forms() {
        // Attack-favorable: off-path belief must not exceed CB0/(CB0+CB1).
        let eqs = pooling_equilibria_no_evidence(&table3(0.9)).unwrap();
        for eq in &eqs {
            let iv = eq.belief_intervals.values().next().unwrap();
            assert_eq!(iv.lo, 0.0);
            assert!((iv.hi - 15.0 / 37.0).abs() < 1e-12);
        }
        // Defend-favorable: at least CB0/(CB0+CB1).
        let eqs = pooling_equilibria_no_evidence(&table3(0.2)).unwrap();
        for eq in &eqs {
            let iv = eq.belief_intervals.values().next().unwrap();
            assert!((iv.lo - 15.0 / 37.0).abs() < 1e-12);
            assert_eq!(iv.hi, 1.0);
        }
    }

    #[test]
    fn receiver_pooling_utility_continuous_sender_jumps() {
        let p0_star = 22.0 / 37.0;
        let below = pooling_equilibria_no_evidence(&table3(p0_star - 2e-9));
        // Within the boundary band classification is neither-favorable, so
        // evaluate the two closed forms directly at p0*.
        let t = honeypot_table3();
        let attack_u_r = t.receiver_u(1, 1) - p0_star * (t.receiver_u(1, 1) - t.receiver_u(1, 0));
        let defend_u_r = p0_star * (t.receiver_u(0, 0) - t.receiver_u(0, 1)) + t.receiver_u(0, 1);
        assert!((attack_u_r - defend_u_r).abs() < 1e-12);

        let attack_u_s = t.sender_u(1, 1) - p0_star * (t.sender_u(1, 1) - t.sender_u(1, 0));
        let defend_u_s = p0_star * (t.sender_u(0, 0) - t.sender_u(0, 1)) + t.sender_u(0, 1);
        let jump = defend_u_s - attack_u_s;
        let expected = p0_star * (t.sender_u(0, 0) - t.sender_u(1, 0))
            + (1.0 - p0_star) * (t.sender_u(0, 1) - t.sender_u(1, 1));
        assert!((jump - expected).abs() < 1e-12);
        assert!((jump - 167.0 / 37.0).abs() < 1e-12);
        drop(below);
    }

    #[test]
    fn pooling_passes_verify_at_interval_endpoints() {
        for p0 in [0.1, 0.35, 0.8, 0.97] {
            let spec = table3(p0);
            for eq in pooling_equilibria_no_evidence(&spec).unwrap() {
                for (&info, iv) in &eq.belief_intervals {
                    for endpoint in [iv.lo, iv.hi] {
                        let mut probe = eq.clone();
                        if let InfoSet::Message(n) = info {
                            probe.beliefs.after_message[n] = endpoint;
                        }
                        assert!(verify_pbe(&spec, &probe, 1e-9).pass);
                    }
                }
            }
        }
    }

    #[test]
    fn omnipotent_examples() {
        let with_detector = |p0: f64| {
            GameSpec::new(
                honeypot_table3(),
                Prior::new(p0).unwrap(),
                Some(DetectorModel::symmetric(1.0, 0.0).unwrap()),
            )
        };
        let eqs = omnipotent_equilibria(&with_detector(0.6)).unwrap();
        assert_eq!(eqs.len(), 1);
        let eq = &eqs[0];
        assert!((eq.utilities.sender - -6.0).abs() < 1e-12);
        assert!((eq.utilities.receiver - 9.0).abs() < 1e-12);
        assert!(eq.all_sender_strategies);
        // sigma_R(1|n,e) = n when e = 1, 1 - n when e = 0.
        for n in 0..2 {
            assert_eq!(eq.receiver.act1(n, 1), n as f64);
            assert_eq!(eq.receiver.act1(n, 0), 1.0 - n as f64);
        }
        assert!(verify_pbe(&with_detector(0.6), eq, 1e-9).pass);

        let eqs = omnipotent_equilibria(&with_detector(0.0)).unwrap();
        assert!((eqs[0].utilities.sender).abs() < 1e-12);
        assert!((eqs[0].utilities.receiver).abs() < 1e-12);

        let eqs = omnipotent_equilibria(&with_detector(1.0)).unwrap();
        assert!((eqs[0].utilities.sender - -10.0).abs() < 1e-12);
        assert!((eqs[0].utilities.receiver - 15.0).abs() < 1e-12);

        let weak = GameSpec::new(
            honeypot_table3(),
            Prior::new(0.5).unwrap(),
            Some(DetectorModel::symmetric(0.8, 0.5).unwrap()),
        );
        assert!(matches!(
            omnipotent_equilibria(&weak),
            Err(GameError::DetectorPrecondition(_))
        ));
    }
}
