//! Equilibrium of a committee in which a single member decides.
//!
//! The dictator votes for the preferred decision at the posterior, acquires
//! information only between the persuasion thresholds, and the lobbyist
//! either leaves the prior alone or splits it between certainty of a bad
//! policy and the upper threshold.

use crate::belief::{Belief, BeliefDistribution, BeliefError};
use crate::persuasion::{
    concavified_value, persuasion_thresholds, GridFunction, PersuasionThresholds,
};
use crate::preferences::{Committee, MemberSpec};
use serde::{Deserialize, Serialize};

/// Conditional enactment probabilities and expected information costs for
/// one mechanism and one equilibrium.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OutcomeStats {
    /// P(enact | good)
    pub p_enact_good: f64,
    /// P(enact | bad)
    pub p_enact_bad: f64,
    pub p_enact: f64,
    /// Expected information cost, one entry per member.
    pub expected_cost: Vec<f64>,
}

impl OutcomeStats {
    pub fn new(prior: f64, p_enact_good: f64, p_enact_bad: f64, expected_cost: Vec<f64>) -> Self {
        OutcomeStats {
            p_enact_good,
            p_enact_bad,
            p_enact: prior * p_enact_good + (1.0 - prior) * p_enact_bad,
            expected_cost,
        }
    }

    pub fn p_block_bad(&self) -> f64 {
        1.0 - self.p_enact_bad
    }

    pub fn n_members(&self) -> usize {
        self.expected_cost.len()
    }
}

/// 1 when `m` prefers enactment at posterior `q`, ties included.
pub fn dictator_enact_prob(m: &MemberSpec, q: f64) -> f64 {
    if m.prefers_enact(q) {
        1.0
    } else {
        0.0
    }
}

/// The dictator's experiment at interim belief `r`.
pub fn dictator_info_strategy(t: &PersuasionThresholds, r: Belief) -> BeliefDistribution {
    if t.acquires_at(r.value()) {
        BeliefDistribution::binary_split(t.q_low, t.q_high, r.value())
            .expect("r lies strictly between the thresholds")
    } else {
        BeliefDistribution::degenerate(r)
    }
}

/// Probability of enactment as a function of the interim belief, given the
/// dictator's experiment and vote.
pub fn enactment_value(t: &PersuasionThresholds, r: f64) -> f64 {
    if t.is_degenerate() {
        if r >= t.q_high - crate::preferences::PAYOFF_TOLERANCE {
            1.0
        } else {
            0.0
        }
    } else if r <= t.q_low {
        0.0
    } else if r >= t.q_high {
        1.0
    } else {
        (r - t.q_low) / (t.q_high - t.q_low)
    }
}

/// Concave envelope of [`enactment_value`]: `min{1, r/q_high}`.
pub fn enactment_envelope(t: &PersuasionThresholds, r: f64) -> f64 {
    (r / t.q_high).min(1.0)
}

pub fn enactment_function(t: &PersuasionThresholds, grid_n: usize) -> GridFunction {
    GridFunction::tabulate(grid_n, |r| enactment_value(t, r))
}

/// The lobbyist's optimal signal against a dictator with upper threshold `q_high`.
pub fn lobbyist_signal(q_high: f64, prior: Belief) -> BeliefDistribution {
    if prior.value() < q_high {
        BeliefDistribution::binary_split(0.0, q_high, prior.value())
            .expect("prior lies in [0, q_high]")
    } else {
        BeliefDistribution::degenerate(prior)
    }
}

/// Outcome when member `dictator` decides alone and the lobbyist sends `signal`.
pub fn dictator_outcome(
    committee: &Committee,
    dictator: usize,
    thresholds: &PersuasionThresholds,
    signal: &BeliefDistribution,
) -> Result<OutcomeStats, BeliefError> {
    let member = &committee.members()[dictator];
    let prior = committee.prior();
    let (given_good, given_bad) = signal.state_conditional(prior)?;

    let (mut good, mut bad, mut cost) = (0.0, 0.0, 0.0);
    for (r, w) in signal.atoms() {
        let (wg, wb) = (given_good.weight_at(r), given_bad.weight_at(r));
        let experiment = dictator_info_strategy(thresholds, Belief::new(r)?);
        if experiment.is_degenerate() {
            let enact = dictator_enact_prob(member, r);
            good += wg * enact;
            bad += wb * enact;
        } else {
            // Posterior q reached from r with weight v has likelihood v·q/r
            // given a good policy and v·(1−q)/(1−r) given a bad one.
            for (q, v) in experiment.atoms() {
                let enact = dictator_enact_prob(member, q);
                good += wg * v * q / r * enact;
                bad += wb * v * (1.0 - q) / (1.0 - r) * enact;
            }
            cost += w * member.info_cost(&experiment);
        }
    }
    let mut costs = vec![0.0; committee.len()];
    costs[dictator] = cost;
    Ok(OutcomeStats::new(prior.value(), good, bad, costs))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DictatorshipEquilibrium {
    pub member_index: usize,
    pub thresholds: PersuasionThresholds,
    pub lobbyist_signal: BeliefDistribution,
    /// Expected enactment under the lobbyist's signal.
    pub lobbyist_payoff: f64,
    /// Concavified enactment value at the prior, computed on the grid.
    pub envelope_payoff: f64,
    #[serde(skip)]
    pub enactment_fn: GridFunction,
    pub outcome: OutcomeStats,
}

pub fn all_thresholds(committee: &Committee, grid_n: usize) -> Vec<PersuasionThresholds> {
    committee
        .members()
        .iter()
        .map(|m| persuasion_thresholds(m, grid_n))
        .collect()
}

/// Equilibrium of the dictatorship of member `i`.
///
/// # Panics
/// If `i` is not a member index.
pub fn dictatorship_equilibrium(
    committee: &Committee,
    i: usize,
    grid_n: usize,
) -> DictatorshipEquilibrium {
    let member = &committee.members()[i];
    let thresholds = persuasion_thresholds(member, grid_n);
    dictatorship_with_thresholds(committee, i, thresholds, grid_n)
}

pub fn dictatorship_with_thresholds(
    committee: &Committee,
    i: usize,
    thresholds: PersuasionThresholds,
    grid_n: usize,
) -> DictatorshipEquilibrium {
    let prior = committee.prior();
    let signal = lobbyist_signal(thresholds.q_high, prior);
    let enactment_fn = enactment_function(&thresholds, grid_n);
    let lobbyist_payoff = signal.expect(|r| enactment_value(&thresholds, r));
    let envelope_payoff = concavified_value(&enactment_fn, prior.value());
    let outcome = dictator_outcome(committee, i, &thresholds, &signal)
        .expect("the lobbyist signal is Bayes plausible");
    DictatorshipEquilibrium {
        member_index: i,
        thresholds,
        lobbyist_signal: signal,
        lobbyist_payoff,
        envelope_payoff,
        enactment_fn,
        outcome,
    }
}

/// Index of the member with the highest upper persuasion threshold and that
/// threshold. Ties go to the lowest index.
pub fn most_demanding(committee: &Committee, grid_n: usize) -> (usize, f64) {
    most_demanding_of(&all_thresholds(committee, grid_n))
}

pub fn most_demanding_of(thresholds: &[PersuasionThresholds]) -> (usize, f64) {
    let mut best = (0, thresholds[0].q_high);
    for (i, t) in thresholds.iter().enumerate().skip(1) {
        if t.q_high > best.1 + 1e-12 {
            best = (i, t.q_high);
        }
    }
    best
}
