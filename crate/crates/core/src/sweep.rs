//! Mechanism-design engine: equilibrium-utility curves over the honeypot
//! prior `p(0)`, the transition point between the pooling regimes, the
//! optimal honeypot fraction, and the with/without-detector comparison.

use rayon::prelude::*;

use crate::analytic::{
    cb_constants, classify_payoff_region, omnipotent_equilibria,
    pooling_equilibria_no_evidence, separating_equilibria_no_evidence, RegionLabel,
    DEFAULT_BOUNDARY_TOL,
};
use crate::equilibrium::{Equilibrium, Utilities};
use crate::error::{GameError, Result};
use crate::game::{DetectorModel, GameSpec, PayoffTable, Prior};
use crate::numeric::{classify_detector, solve_mixed_pbe, DetectorRegionLabel, SolveOptions};

/// Grid points this close to the transition prior are solved from both sides
/// and reported as two half-rows, making the sender's discontinuity visible.
pub const STRADDLE_TOL: f64 = 1e-6;
/// Utility spread beyond which a grid point is flagged ambiguous.
pub const AMBIGUITY_TOL: f64 = 1e-6;

/// One solved grid point (or one side of a straddled transition point).
#[derive(Debug, Clone)]
pub struct SweepRow {
    pub grid_index: usize,
    pub p0: f64,
    pub region: RegionLabel,
    pub detector_region: Option<DetectorRegionLabel>,
    /// Distinct equilibrium utility pairs at this point, sorted.
    pub utility_pairs: Vec<Utilities>,
    pub n_equilibria: usize,
    /// True when distinct equilibria disagree on utilities by more than
    /// [`AMBIGUITY_TOL`].
    pub ambiguous: bool,
    /// The equilibrium whose receiver strategy varies most continuously with
    /// the previous grid point's selection.
    pub selected: Equilibrium,
}

#[derive(Debug, Clone)]
pub struct SweepResult {
    pub grid: Vec<f64>,
    pub detector_region: Option<DetectorRegionLabel>,
    pub rows: Vec<SweepRow>,
}

/// The default 101-point grid over `[0, 1]`.
pub fn default_grid() -> Vec<f64> {
    grid_of(101)
}

/// `n` evenly spaced priors from 0 to 1 inclusive.
pub fn grid_of(n: usize) -> Vec<f64> {
    assert!(n >= 2, "grid needs at least two points");
    (0..n).map(|i| i as f64 / (n - 1) as f64).collect()
}

/// The prior where `p(0) CB0 = (1 - p(0)) CB1`: `p0* = CB1/(CB0+CB1)`.
pub fn transition_prior(payoffs: &PayoffTable) -> Result<f64> {
    let (cb0, cb1) = cb_constants(payoffs);
    if cb0 + cb1 <= 0.0 {
        return Err(GameError::Validation(format!(
            "no transition: CB0 + CB1 = {} is not positive",
            cb0 + cb1
        )));
    }
    Ok(cb1 / (cb0 + cb1))
}

/// The defend-favorable prior the designer should target: as close to the
/// transition as the safety margin allows when the pooled defender utility
/// rises with `p(0)`, otherwise the defend-favorable infimum 0.
pub fn optimal_honeypot_fraction(payoffs: &PayoffTable, margin: f64) -> Result<f64> {
    let p_star = transition_prior(payoffs)?;
    if p_star <= 0.0 {
        return Err(GameError::Validation(
            "no defend-favorable region: the transition prior is 0".to_string(),
        ));
    }
    if !(margin > 0.0 && margin < p_star) {
        return Err(GameError::Validation(format!(
            "margin must lie strictly between 0 and the transition prior {p_star}, got {margin}"
        )));
    }
    if payoffs.sender_u(0, 0) >= payoffs.sender_u(0, 1) {
        Ok(p_star - margin)
    } else {
        Ok(0.0)
    }
}

fn validate_grid(grid: &[f64]) -> Result<()> {
    if grid.is_empty() {
        return Err(GameError::Validation("grid must be nonempty".to_string()));
    }
    for &p in grid {
        if !(0.0..=1.0).contains(&p) {
            return Err(GameError::Validation(format!(
                "grid values must lie in [0, 1], got {p}"
            )));
        }
    }
    if grid.windows(2).any(|w| w[0] > w[1]) {
        return Err(GameError::Validation(
            "grid must be sorted ascending".to_string(),
        ));
    }
    Ok(())
}

/// Closed-form pooling equilibria evaluated as the one-sided limit for a
/// forced region, used for the two half-rows at a straddled transition point.
fn pooling_limit(payoffs: &PayoffTable, p0: f64, side: RegionLabel) -> Result<Vec<Equilibrium>> {
    // Nudge the prior to the requested side of the transition, then restore
    // the closed forms at the original prior: the formulas are continuous in
    // p0, so evaluating them at p0 gives the exact one-sided limit.
    let p_star = transition_prior(payoffs)?;
    let nudged = match side {
        RegionLabel::DefendFavorable => (p_star - 1e-3).max(0.0),
        RegionLabel::AttackFavorable => (p_star + 1e-3).min(1.0),
        RegionLabel::NeitherFavorable => unreachable!("limits are one-sided"),
    };
    let probe = GameSpec::new(*payoffs, Prior::new(nudged)?, None);
    let mut eqs = pooling_equilibria_no_evidence(&probe)?;
    let u = payoffs;
    for eq in &mut eqs {
        let act = eq.receiver.act1(0, 0);
        eq.utilities = if act == 1.0 {
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
        // The pooled message's posterior is the prior at the actual p0.
        for n in 0..2 {
            if !eq.beliefs.msg_off_path[n] {
                eq.beliefs.after_message[n] = 1.0 - p0;
            }
        }
    }
    Ok(eqs)
}

struct PointSolve {
    p0: f64,
    region: RegionLabel,
    equilibria: Vec<Equilibrium>,
}

fn solve_no_detector_point(payoffs: &PayoffTable, p0: f64) -> Result<Vec<PointSolve>> {
    let spec = GameSpec::new(*payoffs, Prior::new(p0)?, None);
    let region = classify_payoff_region(&spec, DEFAULT_BOUNDARY_TOL);
    // Both one-sided limits exist only for an interior transition prior.
    let straddles = transition_prior(payoffs)
        .map(|p_star| {
            (p0 - p_star).abs() <= STRADDLE_TOL
                && p_star > STRADDLE_TOL
                && p_star < 1.0 - STRADDLE_TOL
        })
        .unwrap_or(false);
    if straddles {
        let mut out = Vec::new();
        for side in [RegionLabel::DefendFavorable, RegionLabel::AttackFavorable] {
            let mut eqs = pooling_limit(payoffs, p0, side)?;
            eqs.extend(separating_equilibria_no_evidence(&spec)?);
            out.push(PointSolve {
                p0,
                region: side,
                equilibria: crate::equilibrium::sort_and_dedup(eqs),
            });
        }
        return Ok(out);
    }
    let equilibria = if region.label == RegionLabel::NeitherFavorable {
        // Knife edge without a positive transition (e.g. CB0 = CB1 = 0);
        // the numeric solver still applies.
        solve_mixed_pbe(&spec, &SolveOptions::default())
            .map_err(|e| GameError::SolverFailure(format!("at p0={p0}: {e}")))?
    } else {
        let mut eqs = pooling_equilibria_no_evidence(&spec)?;
        eqs.extend(separating_equilibria_no_evidence(&spec)?);
        crate::equilibrium::sort_and_dedup(eqs)
    };
    Ok(vec![PointSolve {
        p0,
        region: region.label,
        equilibria,
    }])
}

fn solve_detector_point(
    payoffs: &PayoffTable,
    detector: &DetectorModel,
    p0: f64,
) -> Result<Vec<PointSolve>> {
    let spec = GameSpec::new(*payoffs, Prior::new(p0)?, Some(*detector));
    let region = classify_payoff_region(&spec, DEFAULT_BOUNDARY_TOL);
    let omnipotent = matches!(
        detector.symmetric_rates(),
        Some((eps, del)) if (eps - 1.0).abs() <= 1e-9 && del.abs() <= 1e-9
    );
    let equilibria = if omnipotent {
        omnipotent_equilibria(&spec)?
    } else {
        solve_mixed_pbe(&spec, &SolveOptions::default())
            .map_err(|e| GameError::SolverFailure(format!("at p0={p0}: {e}")))?
    };
    Ok(vec![PointSolve {
        p0,
        region: region.label,
        equilibria,
    }])
}

fn distinct_utilities(eqs: &[Equilibrium]) -> Vec<Utilities> {
    let mut pairs: Vec<Utilities> = eqs.iter().map(|e| e.utilities).collect();
    pairs.sort_by(|a, b| {
        a.sender
            .total_cmp(&b.sender)
            .then(a.receiver.total_cmp(&b.receiver))
    });
    pairs.dedup_by(|a, b| {
        (a.sender - b.sender).abs() <= 1e-9 && (a.receiver - b.receiver).abs() <= 1e-9
    });
    pairs
}

fn utility_spread(pairs: &[Utilities]) -> f64 {
    let fold = |get: fn(&Utilities) -> f64| -> f64 {
        let lo = pairs.iter().map(get).fold(f64::INFINITY, f64::min);
        let hi = pairs.iter().map(get).fold(f64::NEG_INFINITY, f64::max);
        hi - lo
    };
    fold(|u| u.sender).max(fold(|u| u.receiver))
}

fn strategy_distance(a: &Equilibrium, b: &Equilibrium) -> f64 {
    a.strategy_key()
        .iter()
        .zip(b.strategy_key())
        .map(|(x, y)| (x - y).abs())
        .sum()
}

/// Solve the game across a sorted grid of priors and record every
/// equilibrium's utilities per point.
///
/// Analytic paths are used where they exist (no detector, or the omnipotent
/// detector); all other points go through the mixed-strategy solver. Grid
/// points are solved in parallel; output order follows the grid.
pub fn sweep_prior(
    payoffs: &PayoffTable,
    detector: Option<&DetectorModel>,
    grid: &[f64],
) -> Result<SweepResult> {
    validate_grid(grid)?;
    let detector_region =
        detector.and_then(|d| classify_detector(d, DEFAULT_BOUNDARY_TOL).ok().map(|r| r.label));

    let solved: Result<Vec<Vec<PointSolve>>> = grid
        .par_iter()
        .map(|&p0| match detector {
            None => solve_no_detector_point(payoffs, p0),
            Some(det) => solve_detector_point(payoffs, det, p0),
        })
        .collect();
    let solved = solved?;

    let mut rows = Vec::new();
    let mut previous: Option<Equilibrium> = None;
    for (grid_index, points) in solved.into_iter().enumerate() {
        for point in points {
            if point.equilibria.is_empty() {
                return Err(GameError::SolverFailure(format!(
                    "no equilibrium at p0={}",
                    point.p0
                )));
            }
            let utility_pairs = distinct_utilities(&point.equilibria);
            let ambiguous = utility_spread(&utility_pairs) > AMBIGUITY_TOL;
            let selected = match &previous {
                None => point.equilibria[0].clone(),
                Some(prev) => point
                    .equilibria
                    .iter()
                    .min_by(|a, b| {
                        strategy_distance(a, prev).total_cmp(&strategy_distance(b, prev))
                    })
                    .expect("nonempty")
                    .clone(),
            };
            previous = Some(selected.clone());
            rows.push(SweepRow {
                grid_index,
                p0: point.p0,
                region: point.region,
                detector_region,
                n_equilibria: point.equilibria.len(),
                utility_pairs,
                ambiguous,
                selected,
            });
        }
    }
    Ok(SweepResult {
        grid: grid.to_vec(),
        detector_region,
        rows,
    })
}

/// Defender's gain from the attacker's detector, per grid point:
/// `benefit = U_S(with detector) - U_S(without)`, using the
/// continuity-selected equilibrium on each side.
#[derive(Debug, Clone, Copy)]
pub struct BenefitRow {
    pub p0: f64,
    pub u_s_with: f64,
    pub u_s_without: f64,
    pub benefit: f64,
    pub ambiguous: bool,
}

pub fn detector_benefit(
    payoffs: &PayoffTable,
    detector: &DetectorModel,
    grid: &[f64],
) -> Result<Vec<BenefitRow>> {
    let with = sweep_prior(payoffs, Some(detector), grid)?;
    let without = sweep_prior(payoffs, None, grid)?;
    let mut out = Vec::new();
    for w in &with.rows {
        for wo in without.rows.iter().filter(|r| r.grid_index == w.grid_index) {
            out.push(BenefitRow {
                p0: w.p0,
                u_s_with: w.selected.utilities.sender,
                u_s_without: wo.selected.utilities.sender,
                benefit: w.selected.utilities.sender - wo.selected.utilities.sender,
                ambiguous: w.ambiguous || wo.ambiguous,
            });
        }
    }
    Ok(out)
}

/// Render a sweep as CSV, one line per distinct utility pair at each point.
pub fn sweep_to_csv(result: &SweepResult) -> String {
    let mut out = String::from("p0,region,detector_region,U_S,U_R,n_equilibria,ambiguous\n");
    for row in &result.rows {
        for pair in &row.utility_pairs {
            out.push_str(&format!(
                "{},{},{},{},{},{},{}\n",
                crate::fmt::sig12(row.p0),
                row.region,
                row.detector_region
                    .map(|r| r.to_string())
                    .unwrap_or_default(),
                crate::fmt::sig12(pair.sender),
                crate::fmt::sig12(pair.receiver),
                row.n_equilibria,
                row.ambiguous,
            ));
        }
    }
    out
}
