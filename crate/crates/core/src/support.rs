//! Internal solver machinery shared by the pure-profile enumerator and the
//! mixed-strategy support-enumeration solver.
//!
//! Both game kinds are handled uniformly: a message `n` fans out into one
//! receiver decision slot (no evidence) or two slots `(n, e)` (evidence),
//! each with type-conditional reach probabilities. The slot posterior is a
//! monotone Bayes map of the first-step belief, so receiver constraints pull
//! back to interval constraints on the message posteriors, which in turn pin
//! the sender mixture in closed form. Sender indifference conditions are
//! linear in the receiver's attack probabilities and are solved by a small
//! vertex enumeration over the feasible box.

use std::collections::BTreeMap;

use crate::equilibrium::{BeliefInterval, Classification, Equilibrium, Utilities};
use crate::error::{GameError, Result};
use crate::game::{
    bayes_update, expected_utilities, BeliefSystem, GameSpec, InfoSet, PayoffTable,
    ReceiverStrategy, SenderStrategy,
};
use crate::numeric::{verify_pbe, PureProfile, SolveOptions};

/// Slack for membership tests on closed-form x intervals.
const X_EPS: f64 = 1e-10;
/// Below this a probability is treated as a pure 0/1 when classifying actions.
const PURE_EPS: f64 = 1e-12;
/// Pivot threshold for the small linear solves.
const PIVOT_EPS: f64 = 1e-11;

// ---------------------------------------------------------------------------
// Intervals in belief space
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub fn new(lo: f64, hi: f64) -> Option<Self> {
        if lo <= hi {
            Some(Self { lo, hi })
        } else {
            None
        }
    }

    pub fn point(x: f64) -> Self {
        Self { lo: x, hi: x }
    }

    pub fn full() -> Self {
        Self { lo: 0.0, hi: 1.0 }
    }

    pub fn mid(&self) -> f64 {
        0.5 * (self.lo + self.hi)
    }

    pub fn contains(&self, x: f64, eps: f64) -> bool {
        x >= self.lo - eps && x <= self.hi + eps
    }

    pub fn intersect(&self, other: &Interval, eps: f64) -> Option<Interval> {
        let lo = self.lo.max(other.lo);
        let hi = self.hi.min(other.hi);
        if hi >= lo {
            Some(Interval { lo, hi })
        } else if hi >= lo - eps {
            Some(Interval::point(0.5 * (lo + hi)))
        } else {
            None
        }
    }
}

#[derive(Debug, Clone, Default)]
pub(crate) struct IntervalSet(Vec<Interval>);

impl IntervalSet {
    pub fn empty() -> Self {
        Self(Vec::new())
    }

    pub fn full() -> Self {
        Self(vec![Interval::full()])
    }

    pub fn one(iv: Interval) -> Self {
        Self(vec![iv])
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn components(&self) -> &[Interval] {
        &self.0
    }

    pub fn contains(&self, x: f64, eps: f64) -> bool {
        self.0.iter().any(|iv| iv.contains(x, eps))
    }

    pub fn intersect(&self, other: &IntervalSet) -> IntervalSet {
        let mut out = Vec::new();
        for a in &self.0 {
            for b in &other.0 {
                if let Some(iv) = a.intersect(b, X_EPS) {
                    out.push(iv);
                }
            }
        }
        out.sort_by(|a, b| a.lo.total_cmp(&b.lo));
        out.dedup_by(|a, b| (a.lo - b.lo).abs() <= PURE_EPS && (a.hi - b.hi).abs() <= PURE_EPS);
        IntervalSet(out)
    }

    pub fn intersect_interval(&self, iv: Interval) -> IntervalSet {
        self.intersect(&IntervalSet::one(iv))
    }
}

// ---------------------------------------------------------------------------
// Receiver best-response geometry
// ---------------------------------------------------------------------------

/// Receiver's advantage of attacking over withdrawing at belief `mu` that the
/// type is a honeypot: `(1-mu)*CB0 - mu*CB1`.
pub(crate) fn attack_advantage(cb0: f64, cb1: f64, mu: f64) -> f64 {
    (1.0 - mu) * cb0 - mu * cb1
}

/// Beliefs where attacking loses at most `tol`: `{mu : advantage >= -tol}`.
pub(crate) fn attack_support(cb0: f64, cb1: f64, tol: f64) -> Option<Interval> {
    let s = cb0 + cb1;
    if s == 0.0 {
        return if cb0 >= -tol {
            Some(Interval::full())
        } else {
            None
        };
    }
    let crossing = (cb0 + tol) / s;
    if s > 0.0 {
        // advantage decreasing in mu
        if crossing < 0.0 {
            None
        } else {
            Interval::new(0.0, crossing.min(1.0))
        }
    } else if crossing > 1.0 {
        None
    } else {
        Interval::new(crossing.max(0.0), 1.0)
    }
}

pub(crate) fn withdraw_support(cb0: f64, cb1: f64, tol: f64) -> Option<Interval> {
    attack_support(-cb0, -cb1, tol)
}

pub(crate) fn indifference_support(cb0: f64, cb1: f64, tol: f64) -> Option<Interval> {
    let a = attack_support(cb0, cb1, tol)?;
    let w = withdraw_support(cb0, cb1, tol)?;
    a.intersect(&w, 0.0)
}

/// Beliefs supporting an attack probability `act1` (pure action for extreme
/// values, exact indifference for interior mixes).
pub(crate) fn action_support(cb0: f64, cb1: f64, act1: f64, tol: f64) -> Option<Interval> {
    if act1 <= PURE_EPS {
        withdraw_support(cb0, cb1, tol)
    } else if act1 >= 1.0 - PURE_EPS {
        attack_support(cb0, cb1, tol)
    } else {
        indifference_support(cb0, cb1, tol)
    }
}

/// Utility the receiver forgoes by playing `act1` instead of its best action
/// at belief `mu`.
pub(crate) fn receiver_gain(payoffs: &PayoffTable, mu: f64, act1: f64) -> f64 {
    let v0 = crate::game::receiver_action_value(payoffs, mu, 0);
    let v1 = crate::game::receiver_action_value(payoffs, mu, 1);
    v0.max(v1) - (act1 * v1 + (1.0 - act1) * v0)
}

fn support_or_relaxed(cb0: f64, cb1: f64, act1: f64, tol: f64) -> Option<Interval> {
    action_support(cb0, cb1, act1, 0.0).or_else(|| {
        action_support(cb0, cb1, act1, tol).map(|iv| Interval::point(iv.mid().clamp(0.0, 1.0)))
    })
}

// ---------------------------------------------------------------------------
// Game form: decision slots with type-conditional reach probabilities
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy)]
pub(crate) struct Slot {
    pub n: usize,
    pub e: Option<usize>,
    /// `reach[m]` = probability of landing in this slot given type `m` sent `n`.
    pub reach: [f64; 2],
}

pub(crate) struct GameForm<'a> {
    pub spec: &'a GameSpec,
    pub cb0: f64,
    pub cb1: f64,
    /// Sender's attack gain per type, `u^S(1,m) - u^S(0,m)`.
    pub d: [f64; 2],
    pub slots: Vec<Slot>,
    pub by_msg: [Vec<usize>; 2],
}

impl<'a> GameForm<'a> {
    pub fn new(spec: &'a GameSpec) -> Self {
        let (cb0, cb1) = crate::analytic::cb_constants(&spec.payoffs);
        let d = [
            spec.payoffs.sender_attack_gain(0),
            spec.payoffs.sender_attack_gain(1),
        ];
        let mut slots = Vec::new();
        let mut by_msg = [Vec::new(), Vec::new()];
        match spec.detector.as_ref() {
            None => {
                for n in 0..2 {
                    by_msg[n].push(slots.len());
                    slots.push(Slot {
                        n,
                        e: None,
                        reach: [1.0, 1.0],
                    });
                }
            }
            Some(det) => {
                for n in 0..2 {
                    for e in 0..2 {
                        by_msg[n].push(slots.len());
                        slots.push(Slot {
                            n,
                            e: Some(e),
                            reach: [det.lam(e, 0, n), det.lam(e, 1, n)],
                        });
                    }
                }
            }
        }
        Self {
            spec,
            cb0,
            cb1,
            d,
            slots,
            by_msg,
        }
    }

    pub fn evidence(&self) -> bool {
        self.spec.has_evidence()
    }

    pub fn p(&self, m: usize) -> f64 {
        self.spec.prior.p(m)
    }

    pub fn receiver_from_acts(&self, acts: &[f64]) -> ReceiverStrategy {
        if self.evidence() {
            let mut act1 = [[0.0; 2]; 2];
            for (i, slot) in self.slots.iter().enumerate() {
                act1[slot.n][slot.e.unwrap()] = acts[i];
            }
            ReceiverStrategy::WithEvidence { act1 }
        } else {
            let mut act1 = [0.0; 2];
            for (i, slot) in self.slots.iter().enumerate() {
                act1[slot.n] = acts[i];
            }
            ReceiverStrategy::NoEvidence { act1 }
        }
    }

    /// Probability that type `m` is attacked after sending `n`.
    fn attack_prob(&self, acts: &[f64], m: usize, n: usize) -> f64 {
        self.by_msg[n]
            .iter()
            .map(|&i| self.slots[i].reach[m] * acts[i])
            .sum()
    }

    /// Sender's value of sending `n` as type `m`.
    fn message_value(&self, acts: &[f64], m: usize, n: usize) -> f64 {
        self.spec.payoffs.sender_u(0, m) + self.d[m] * self.attack_prob(acts, m, n)
    }
}

/// Message posteriors and slot posteriors for a sender strategy; `None` marks
/// an unreached (off-path) information set.
pub(crate) fn profile_beliefs(
    form: &GameForm,
    sender: &SenderStrategy,
) -> ([Option<f64>; 2], Vec<Option<f64>>) {
    let mut msg = [None; 2];
    for n in 0..2 {
        let denom = form.p(0) * sender.prob(n, 0) + form.p(1) * sender.prob(n, 1);
        if denom > 0.0 {
            msg[n] = Some((form.p(1) * sender.prob(n, 1) / denom).clamp(0.0, 1.0));
        }
    }
    let slots = form
        .slots
        .iter()
        .map(|slot| msg[slot.n].and_then(|x| bayes_update(slot.reach[0], slot.reach[1], x)))
        .collect();
    (msg, slots)
}

/// Build the full equilibrium record for a profile, choosing off-path beliefs
/// from the supporting interval of each off-path slot's action. `None` if some
/// off-path action is unsupportable.
pub(crate) fn assemble(
    form: &GameForm,
    sender: SenderStrategy,
    acts: &[f64],
    tol: f64,
) -> Option<Equilibrium> {
    let (msg_mu, slot_mu) = profile_beliefs(form, &sender);
    let receiver = form.receiver_from_acts(acts);
    let mut after_message = [0.5; 2];
    let mut msg_off_path = [false; 2];
    let mut intervals: BTreeMap<InfoSet, BeliefInterval> = BTreeMap::new();

    for n in 0..2 {
        match msg_mu[n] {
            Some(mu) => after_message[n] = mu,
            None => msg_off_path[n] = true,
        }
    }

    let (after_evidence, ev_off_path) = if form.evidence() {
        let mut mu_ev = [[0.0; 2]; 2];
        let mut off = [[false; 2]; 2];
        for (i, slot) in form.slots.iter().enumerate() {
            let (n, e) = (slot.n, slot.e.unwrap());
            match slot_mu[i] {
                Some(mu) => mu_ev[n][e] = mu,
                None => {
                    off[n][e] = true;
                    let iv = support_or_relaxed(form.cb0, form.cb1, acts[i], tol)?;
                    mu_ev[n][e] = iv.mid().clamp(0.0, 1.0);
                    intervals.insert(
                        InfoSet::MessageEvidence(n, e),
                        BeliefInterval::new(iv.lo.clamp(0.0, 1.0), iv.hi.clamp(0.0, 1.0)),
                    );
                }
            }
        }
        (Some(mu_ev), Some(off))
    } else {
        for n in 0..2 {
            if msg_off_path[n] {
                let iv = support_or_relaxed(form.cb0, form.cb1, acts[form.by_msg[n][0]], tol)?;
                after_message[n] = iv.mid().clamp(0.0, 1.0);
                intervals.insert(
                    InfoSet::Message(n),
                    BeliefInterval::new(iv.lo.clamp(0.0, 1.0), iv.hi.clamp(0.0, 1.0)),
                );
            }
        }
        (None, None)
    };

    let beliefs = BeliefSystem {
        after_message,
        msg_off_path,
        after_evidence,
        ev_off_path,
    };
    let (u_s, u_r) = expected_utilities(form.spec, &sender, &receiver).ok()?;
    Some(Equilibrium {
        classification: Classification::of(&sender),
        sender,
        receiver,
        beliefs,
        belief_intervals: intervals,
        utilities: Utilities {
            sender: u_s,
            receiver: u_r,
        },
        all_sender_strategies: false,
    })
}

// ---------------------------------------------------------------------------
// Pure-profile enumeration
// ---------------------------------------------------------------------------

pub(crate) fn enumerate_pure(spec: &GameSpec, tol: f64) -> Vec<Equilibrium> {
    let form = GameForm::new(spec);
    let mut out = Vec::new();

    for profile in PureProfile::all(spec.has_evidence()) {
        let sender = profile.sender_strategy();
        let acts: Vec<f64> = profile.receiver_act.iter().map(|&a| a as f64).collect();
        let (_, slot_mu) = profile_beliefs(&form, &sender);

        // Receiver optimality on-path, supportability off-path.
        let mut ok = true;
        for (i, mu) in slot_mu.iter().enumerate() {
            match mu {
                Some(mu) => {
                    if receiver_gain(&spec.payoffs, *mu, acts[i]) > tol {
                        ok = false;
                        break;
                    }
                }
                None => {
                    if support_or_relaxed(form.cb0, form.cb1, acts[i], tol).is_none() {
                        ok = false;
                        break;
                    }
                }
            }
        }
        if !ok {
            continue;
        }

        // Sender optimality per type.
        for m in 0..2 {
            let chosen = profile.sender_msg[m];
            let v_chosen = form.message_value(&acts, m, chosen);
            let v_other = form.message_value(&acts, m, 1 - chosen);
            if v_other - v_chosen > tol {
                ok = false;
                break;
            }
        }
        if !ok {
            continue;
        }

        if let Some(eq) = assemble(&form, sender, &acts, tol) {
            out.push(eq);
        }
    }
    crate::equilibrium::sort_and_dedup(out)
}

/// Assemble an arbitrary pure profile into an equilibrium record without any
/// optimality screening, for exercising the verifier on invalid profiles.
#[cfg(test)]
pub(crate) fn enumerate_profile_for_tests(spec: &GameSpec, profile: &PureProfile) -> Equilibrium {
    let form = GameForm::new(spec);
    let acts: Vec<f64> = profile.receiver_act.iter().map(|&a| a as f64).collect();
    assemble(
        &form,
        profile.sender_strategy(),
        &acts,
        crate::numeric::DEFAULT_DEVIATION_TOL,
    )
    .expect("profile assembles")
}

// ---------------------------------------------------------------------------
// Support enumeration for mixed equilibria
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Pat {
    Zero,
    One,
    Mix,
}

const PATS: [Pat; 3] = [Pat::Zero, Pat::One, Pat::Mix];

fn pat_sends(p: Pat, n: usize) -> bool {
    match p {
        Pat::Zero => n == 0,
        Pat::One => n == 1,
        Pat::Mix => true,
    }
}

fn pat_act_repr(p: Pat) -> f64 {
    match p {
        Pat::Zero => 0.0,
        Pat::One => 1.0,
        Pat::Mix => 0.5,
    }
}

#[derive(Debug, Clone, Copy)]
struct SenderCand {
    s: [f64; 2],
}

pub(crate) fn solve_mixed(spec: &GameSpec, opts: &SolveOptions) -> Result<Vec<Equilibrium>> {
    let form = GameForm::new(spec);
    let nslots = form.slots.len();
    let npat = 3usize.pow(nslots as u32);
    let mut raw = Vec::new();

    for &s0p in &PATS {
        for &s1p in &PATS {
            let spat = [s0p, s1p];
            for code in 0..npat {
                let mut rpat = Vec::with_capacity(nslots);
                let mut c = code;
                for _ in 0..nslots {
                    rpat.push(PATS[c % 3]);
                    c /= 3;
                }
                solve_pattern(&form, spat, &rpat, opts, &mut raw);
            }
        }
    }

    let verified: Vec<Equilibrium> = raw
        .into_iter()
        .filter(|eq| verify_pbe(spec, eq, opts.deviation_tol).pass)
        .collect();
    let eqs = crate::equilibrium::sort_and_dedup(verified);
    if eqs.is_empty() {
        Err(GameError::SolverFailure(
            "support enumeration found no equilibrium; finite signaling games always have one"
                .to_string(),
        ))
    } else {
        Ok(eqs)
    }
}

/// Feasible first-step beliefs for one slot under a receiver support pattern.
///
/// For an on-path message the slot posterior must support the pattern action
/// (equal the indifference belief for a mix); the preimage of that belief set
/// under the monotone second-step update is an interval in x. Slots that a
/// boundary x leaves unreached are free and only require the action to be
/// supportable by some belief.
fn slot_xset(slot: &Slot, pat: Pat, cb0: f64, cb1: f64) -> IntervalSet {
    let b = match pat {
        Pat::Zero => withdraw_support(cb0, cb1, 0.0),
        Pat::One => attack_support(cb0, cb1, 0.0),
        Pat::Mix => indifference_support(cb0, cb1, 0.0),
    };
    let Some(b) = b else {
        return IntervalSet::empty();
    };
    let (l0, l1) = (slot.reach[0], slot.reach[1]);
    if l0 == 0.0 && l1 == 0.0 {
        return IntervalSet::full();
    }
    if l1 == 0.0 {
        // posterior is 0 for x < 1; x = 1 leaves the slot unreached
        return if b.lo <= 0.0 {
            IntervalSet::full()
        } else {
            IntervalSet::one(Interval::point(1.0))
        };
    }
    if l0 == 0.0 {
        return if b.hi >= 1.0 {
            IntervalSet::full()
        } else {
            IntervalSet::one(Interval::point(0.0))
        };
    }
    let pinv = |y: f64| (y * l0 / (l1 * (1.0 - y) + l0 * y)).clamp(0.0, 1.0);
    IntervalSet::one(Interval {
        lo: pinv(b.lo),
        hi: pinv(b.hi),
    })
}

fn solve_pattern(
    form: &GameForm,
    spat: [Pat; 2],
    rpat: &[Pat],
    opts: &SolveOptions,
    out: &mut Vec<Equilibrium>,
) {
    let p = [form.p(0), form.p(1)];
    let reaches = |m: usize, n: usize| p[m] > 0.0 && pat_sends(spat[m], n);
    let onpath = [
        reaches(0, 0) || reaches(1, 0),
        reaches(0, 1) || reaches(1, 1),
    ];

    let mut xsets = [IntervalSet::full(), IntervalSet::full()];
    for n in 0..2 {
        if onpath[n] {
            for &si in &form.by_msg[n] {
                let xs = slot_xset(&form.slots[si], rpat[si], form.cb0, form.cb1);
                xsets[n] = xsets[n].intersect(&xs);
                if xsets[n].is_empty() {
                    return;
                }
            }
        } else {
            for &si in &form.by_msg[n] {
                if action_support(form.cb0, form.cb1, pat_act_repr(rpat[si]), 0.0).is_none() {
                    return;
                }
            }
        }
    }

    for cand in sender_candidates(form, spat, &onpath, &xsets, p) {
        let sender = match SenderStrategy::new(cand.s[0], cand.s[1]) {
            Ok(s) => s,
            Err(_) => continue,
        };
        for acts in receiver_solutions(form, spat, rpat, opts) {
            if let Some(eq) = assemble(form, sender, &acts, opts.deviation_tol) {
                out.push(eq);
            }
        }
    }
}

/// Representative x values from a feasible set: the midpoint of every
/// component plus its endpoints.
fn pick_points(set: &IntervalSet) -> Vec<f64> {
    let mut v = Vec::new();
    for c in set.components() {
        v.push(c.mid());
        if c.hi - c.lo > PURE_EPS {
            v.push(c.lo);
            v.push(c.hi);
        }
    }
    v.sort_by(f64::total_cmp);
    v.dedup_by(|a, b| (*a - *b).abs() <= PURE_EPS);
    v
}

fn sender_candidates(
    form: &GameForm,
    spat: [Pat; 2],
    onpath: &[bool; 2],
    xsets: &[IntervalSet; 2],
    p: [f64; 2],
) -> Vec<SenderCand> {
    let mut cands = Vec::new();
    match spat {
        [a, b] if a != Pat::Mix && b != Pat::Mix => {
            let s = [pat_act_repr(a), pat_act_repr(b)];
            let sender = SenderStrategy::new(s[0], s[1]).expect("pure strategy is valid");
            let (msg_mu, _) = profile_beliefs(form, &sender);
            let mut ok = true;
            for n in 0..2 {
                if onpath[n] {
                    match msg_mu[n] {
                        Some(x) if xsets[n].contains(x, X_EPS) => {}
                        _ => {
                            ok = false;
                            break;
                        }
                    }
                }
            }
            if ok {
                cands.push(SenderCand { s });
            }
        }
        _ if spat[0] != Pat::Mix || spat[1] != Pat::Mix => {
            // exactly one mixing type
            let mixer = if spat[0] == Pat::Mix { 0 } else { 1 };
            let pure = 1 - mixer;
            let n_pure = if spat[pure] == Pat::One { 1 } else { 0 };
            let v_pure = n_pure as f64;
            if p[mixer] == 0.0 {
                let x = if pure == 1 { 1.0 } else { 0.0 };
                if xsets[n_pure].contains(x, X_EPS) {
                    let mut s = [0.0; 2];
                    s[mixer] = 0.5;
                    s[pure] = v_pure;
                    cands.push(SenderCand { s });
                }
            } else if p[pure] == 0.0 {
                let x = if mixer == 1 { 1.0 } else { 0.0 };
                if xsets[0].contains(x, X_EPS) && xsets[1].contains(x, X_EPS) {
                    let mut s = [0.0; 2];
                    s[mixer] = 0.5;
                    s[pure] = v_pure;
                    cands.push(SenderCand { s });
                }
            } else {
                let n_other = 1 - n_pure;
                let x_other = if mixer == 1 { 1.0 } else { 0.0 };
                if !xsets[n_other].contains(x_other, X_EPS) {
                    return cands;
                }
                // The shared message's posterior runs from the pooled value
                // p(1) (mixer fully joins) to the pure type's revealed value.
                let b_val = if pure == 1 { 1.0 } else { 0.0 };
                let range = Interval {
                    lo: p[1].min(b_val),
                    hi: p[1].max(b_val),
                };
                for x in pick_points(&xsets[n_pure].intersect_interval(range)) {
                    let t = if mixer == 0 {
                        if x <= 0.0 {
                            continue;
                        }
                        p[1] * (1.0 - x) / (p[0] * x)
                    } else {
                        if x >= 1.0 {
                            continue;
                        }
                        p[0] * x / (p[1] * (1.0 - x))
                    };
                    if !(-1e-9..=1.0 + 1e-9).contains(&t) {
                        continue;
                    }
                    let t = t.clamp(0.0, 1.0);
                    if t <= PURE_EPS || t >= 1.0 - PURE_EPS {
                        continue; // degenerates to a pure pattern
                    }
                    let sig1 = if n_pure == 1 { t } else { 1.0 - t };
                    let mut s = [0.0; 2];
                    s[mixer] = sig1;
                    s[pure] = v_pure;
                    cands.push(SenderCand { s });
                }
            }
        }
        _ => {
            // both types mixing
            if p[0] == 0.0 || p[1] == 0.0 {
                let x = if p[0] == 0.0 { 1.0 } else { 0.0 };
                if xsets[0].contains(x, X_EPS) && xsets[1].contains(x, X_EPS) {
                    cands.push(SenderCand { s: [0.5, 0.5] });
                }
            } else {
                let p1 = p[1];
                for i0 in xsets[0].components() {
                    for i1 in xsets[1].components() {
                        if i0.contains(p1, X_EPS) && i1.contains(p1, X_EPS) {
                            cands.push(SenderCand { s: [0.5, 0.5] });
                        }
                        for low_is_x0 in [true, false] {
                            let below = Interval { lo: 0.0, hi: p1 };
                            let above = Interval { lo: p1, hi: 1.0 };
                            let (lo_set, hi_set) = if low_is_x0 {
                                (i0.intersect(&below, 0.0), i1.intersect(&above, 0.0))
                            } else {
                                (i1.intersect(&below, 0.0), i0.intersect(&above, 0.0))
                            };
                            let (Some(lo_iv), Some(hi_iv)) = (lo_set, hi_set) else {
                                continue;
                            };
                            for (xl, xh) in [
                                (lo_iv.mid(), hi_iv.mid()),
                                (lo_iv.lo, hi_iv.hi),
                                (lo_iv.hi, hi_iv.lo),
                            ] {
                                let (x0, x1) = if low_is_x0 { (xl, xh) } else { (xh, xl) };
                                if (x1 - x0).abs() <= PURE_EPS {
                                    continue;
                                }
                                let q = (p1 - x0) / (x1 - x0);
                                if !(PURE_EPS..=1.0 - PURE_EPS).contains(&q) {
                                    continue;
                                }
                                let s1 = (q * x1 / p1).clamp(0.0, 1.0);
                                let s0 = (q * (1.0 - x1) / p[0]).clamp(0.0, 1.0);
                                if s0 <= PURE_EPS
                                    || s0 >= 1.0 - PURE_EPS
                                    || s1 <= PURE_EPS
                                    || s1 >= 1.0 - PURE_EPS
                                {
                                    continue;
                                }
                                cands.push(SenderCand { s: [s0, s1] });
                            }
                        }
                    }
                }
            }
        }
    }
    cands.sort_by(|a, b| a.s[0].total_cmp(&b.s[0]).then(a.s[1].total_cmp(&b.s[1])));
    cands.dedup_by(|a, b| (a.s[0] - b.s[0]).abs() <= PURE_EPS && (a.s[1] - b.s[1]).abs() <= PURE_EPS);
    cands
}

/// Solve the sender indifference conditions for the free (mixing) receiver
/// probabilities. Returns at most one representative solution.
fn receiver_solutions(
    form: &GameForm,
    spat: [Pat; 2],
    rpat: &[Pat],
    opts: &SolveOptions,
) -> Vec<Vec<f64>> {
    let nslots = rpat.len();
    let mut acts = vec![0.0; nslots];
    let mut free = Vec::new();
    for (i, &pat) in rpat.iter().enumerate() {
        match pat {
            Pat::Zero => acts[i] = 0.0,
            Pat::One => acts[i] = 1.0,
            Pat::Mix => free.push(i),
        }
    }
    let k = free.len();

    // A_m(n) = const + sum over free slots of message n.
    let a_const = |m: usize, n: usize| -> f64 {
        form.by_msg[n]
            .iter()
            .filter(|&&i| rpat[i] != Pat::Mix)
            .map(|&i| form.slots[i].reach[m] * acts[i])
            .sum()
    };
    let coef = |m: usize, i: usize| -> f64 {
        let slot = &form.slots[free[i]];
        let sign = if slot.n == 0 { 1.0 } else { -1.0 };
        sign * slot.reach[m]
    };

    // Equalities A_m(0) = A_m(1) for mixing types with a real stake.
    let mut eq_rows: Vec<Vec<f64>> = Vec::new();
    let mut eq_rhs: Vec<f64> = Vec::new();
    let mut eq_scale: Vec<f64> = Vec::new();
    for m in 0..2 {
        if spat[m] == Pat::Mix && form.d[m] != 0.0 {
            eq_rows.push((0..k).map(|i| coef(m, i)).collect());
            eq_rhs.push(-(a_const(m, 0) - a_const(m, 1)));
            eq_scale.push(form.d[m].abs());
        }
    }

    // Inequalities (utility-scaled): pure type must not gain by deviating.
    // g(x) = base + coefs . x >= -tol
    let mut ineqs: Vec<(Vec<f64>, f64)> = Vec::new();
    for m in 0..2 {
        if spat[m] != Pat::Mix && form.d[m] != 0.0 {
            let nh = if spat[m] == Pat::One { 1 } else { 0 };
            let sign = |n: usize| if n == nh { 1.0 } else { -1.0 };
            let base = form.d[m] * (a_const(m, nh) - a_const(m, 1 - nh));
            let coefs: Vec<f64> = (0..k)
                .map(|i| {
                    let slot = &form.slots[free[i]];
                    form.d[m] * sign(slot.n) * slot.reach[m]
                })
                .collect();
            ineqs.push((coefs, base));
        }
    }

    let tol = opts.deviation_tol;
    if k == 0 {
        for (row, (&rhs, &scale)) in eq_rows.iter().zip(eq_rhs.iter().zip(eq_scale.iter())) {
            debug_assert!(row.is_empty());
            if scale * rhs.abs() > tol.max(opts.indifference_tol) {
                return Vec::new();
            }
        }
        for (_, base) in &ineqs {
            if *base < -tol {
                return Vec::new();
            }
        }
        return vec![acts];
    }

    let Some((particular, basis)) = solve_affine(&eq_rows, &eq_rhs, k) else {
        return Vec::new();
    };
    let d = basis.len();

    if d == 0 {
        for (i, &x) in particular.iter().enumerate() {
            if !(-1e-9..=1.0 + 1e-9).contains(&x) {
                return Vec::new();
            }
            acts[free[i]] = x.clamp(0.0, 1.0);
        }
        for (coefs, base) in &ineqs {
            let g = base
                + coefs
                    .iter()
                    .zip(particular.iter())
                    .map(|(c, x)| c * x)
                    .sum::<f64>();
            if g < -tol {
                return Vec::new();
            }
        }
        return vec![acts];
    }

    // Parameterize x = particular + basis * t and enumerate the vertices of
    // the t-polytope cut out by the box and the deviation inequalities.
    // rows: a . t >= b
    let mut rows: Vec<(Vec<f64>, f64)> = Vec::new();
    for i in 0..k {
        let dir: Vec<f64> = (0..d).map(|j| basis[j][i]).collect();
        rows.push((dir.clone(), -particular[i])); // x_i >= 0
        rows.push((dir.iter().map(|v| -v).collect(), particular[i] - 1.0)); // x_i <= 1
    }
    for (coefs, base) in &ineqs {
        let shifted = base
            + coefs
                .iter()
                .zip(particular.iter())
                .map(|(c, x)| c * x)
                .sum::<f64>();
        let dir: Vec<f64> = (0..d)
            .map(|j| {
                coefs
                    .iter()
                    .zip(basis[j].iter())
                    .map(|(c, v)| c * v)
                    .sum::<f64>()
            })
            .collect();
        rows.push((dir, -tol - shifted));
    }

    let mut vertices: Vec<Vec<f64>> = Vec::new();
    for_each_combination(rows.len(), d, &mut |subset| {
        let a: Vec<Vec<f64>> = subset.iter().map(|&r| rows[r].0.clone()).collect();
        let b: Vec<f64> = subset.iter().map(|&r| rows[r].1).collect();
        if let Some(t) = solve_square(&a, &b) {
            let feasible = rows
                .iter()
                .all(|(dir, bound)| {
                    dir.iter().zip(t.iter()).map(|(c, x)| c * x).sum::<f64>() >= bound - 1e-9
                });
            if feasible
                && !vertices
                    .iter()
                    .any(|v| v.iter().zip(t.iter()).all(|(a, b)| (a - b).abs() <= 1e-9))
            {
                vertices.push(t);
            }
        }
    });
    if vertices.is_empty() {
        return Vec::new();
    }
    let centroid: Vec<f64> = (0..d)
        .map(|j| vertices.iter().map(|v| v[j]).sum::<f64>() / vertices.len() as f64)
        .collect();
    for (i, idx) in free.iter().enumerate() {
        let x = particular[i]
            + (0..d).map(|j| basis[j][i] * centroid[j]).sum::<f64>();
        acts[*idx] = x.clamp(0.0, 1.0);
    }
    vec![acts]
}

// ---------------------------------------------------------------------------
// Small dense linear algebra
// ---------------------------------------------------------------------------

/// Solve `rows * x = rhs` over `k` variables. Returns a particular solution
/// and a nullspace basis, or `None` if inconsistent.
fn solve_affine(rows: &[Vec<f64>], rhs: &[f64], k: usize) -> Option<(Vec<f64>, Vec<Vec<f64>>)> {
    let m = rows.len();
    let mut a: Vec<Vec<f64>> = rows.to_vec();
    let mut b: Vec<f64> = rhs.to_vec();
    let mut pivot_col_of_row = vec![usize::MAX; m];
    let mut pivot_row_of_col = vec![usize::MAX; k];
    let mut rank = 0usize;
    for col in 0..k {
        let mut best = rank;
        let mut best_abs = 0.0;
        for r in rank..m {
            let v = a[r][col].abs();
            if v > best_abs {
                best_abs = v;
                best = r;
            }
        }
        if best_abs <= PIVOT_EPS {
            continue;
        }
        a.swap(rank, best);
        b.swap(rank, best);
        let pv = a[rank][col];
        for c in 0..k {
            a[rank][c] /= pv;
        }
        b[rank] /= pv;
        for r in 0..m {
            if r != rank {
                let f = a[r][col];
                if f != 0.0 {
                    for c in 0..k {
                        a[r][c] -= f * a[rank][c];
                    }
                    b[r] -= f * b[rank];
                }
            }
        }
        pivot_col_of_row[rank] = col;
        pivot_row_of_col[col] = rank;
        rank += 1;
        if rank == m {
            break;
        }
    }
    for r in rank..m {
        if b[r].abs() > 1e-9 {
            return None;
        }
    }
    let mut particular = vec![0.0; k];
    for r in 0..rank {
        particular[pivot_col_of_row[r]] = b[r];
    }
    let mut basis = Vec::new();
    for col in 0..k {
        if pivot_row_of_col[col] == usize::MAX {
            let mut v = vec![0.0; k];
            v[col] = 1.0;
            for r in 0..rank {
                v[pivot_col_of_row[r]] = -a[r][col];
            }
            basis.push(v);
        }
    }
    Some((particular, basis))
}

fn solve_square(a: &[Vec<f64>], b: &[f64]) -> Option<Vec<f64>> {
    let n = b.len();
    let mut m: Vec<Vec<f64>> = a.to_vec();
    let mut rhs = b.to_vec();
    for col in 0..n {
        let mut best = col;
        let mut best_abs = 0.0;
        for r in col..n {
            let v = m[r][col].abs();
            if v > best_abs {
                best_abs = v;
                best = r;
            }
        }
        if best_abs <= PIVOT_EPS {
            return None;
        }
        m.swap(col, best);
        rhs.swap(col, best);
        let pv = m[col][col];
        for c in 0..n {
            m[col][c] /= pv;
        }
        rhs[col] /= pv;
        for r in 0..n {
            if r != col {
                let f = m[r][col];
                if f != 0.0 {
                    for c in 0..n {
                        m[r][c] -= f * m[col][c];
                    }
                    rhs[r] -= f * rhs[col];
                }
            }
        }
    }
    Some(rhs)
}

fn for_each_combination(n: usize, d: usize, f: &mut impl FnMut(&[usize])) {
    if d == 0 {
        f(&[]);
        return;
    }
    if d > n {
        return;
    }
    let mut idx: Vec<usize> = (0..d).collect();
    loop {
        f(&idx);
        let mut i = d;
        loop {
            if i == 0 {
                return;
            }
            i -= 1;
            if idx[i] != i + n - d {
                idx[i] += 1;
                for j in i + 1..d {
                    idx[j] = idx[j - 1] + 1;
                }
                break;
            }
        }
    }
}
