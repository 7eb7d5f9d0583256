//! Numerical checks of how voting mechanisms compare once the lobbyist and
//! the members' information choices are taken into account.
//!
//! Everything here is built around one signal: the split of the prior
//! between certainty of a bad policy and the upper persuasion threshold of
//! the most-demanding member. It deters every member from buying information
//! under any mechanism and secures enactment as often as that member's
//! dictatorship does.

use crate::belief::{convex_order_compare, Belief, BeliefDistribution, BeliefError, ConvexOrder};
use crate::dictatorship::{
    dictator_outcome, dictatorship_with_thresholds, enactment_value, lobbyist_signal,
    most_demanding_of, DictatorshipEquilibrium, OutcomeStats,
};
use crate::mechanism::{MechanismError, VotingMechanism};
use crate::persuasion::{persuasion_thresholds, PersuasionThresholds};
use crate::preferences::{Committee, CostKernel, MemberSpec, PAYOFF_TOLERANCE};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use std::fmt;
use thiserror::Error;

/// Largest tolerated violation of the no-information inequalities.
pub const VIOLATION_TOLERANCE: f64 = 1e-8;
/// Slack in midpoint concavity tests.
pub const CONCAVITY_TOLERANCE: f64 = 1e-10;
/// Slack in dominance and payoff comparisons.
pub const COMPARE_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LabError {
    #[error(transparent)]
    Belief(#[from] BeliefError),

    #[error(transparent)]
    Mechanism(#[from] MechanismError),

    #[error("mechanism {mechanism} has {votes} voters but the committee has {members} members")]
    MemberCount {
        mechanism: String,
        votes: usize,
        members: usize,
    },

    #[error("mechanism {0} is not a dictatorship")]
    NotDictatorship(String),

    #[error("experiment menu is empty")]
    EmptyMenu,

    #[error("menu entry {index} has mean {mean}, expected {prior}")]
    MenuMeanMismatch { index: usize, mean: f64, prior: f64 },

    #[error("outcomes cover {0} and {1} members")]
    SizeMismatch(usize, usize),

    #[error(
        "distribution is {0} relative to the benchmark signal, not a mean-preserving spread of it"
    )]
    NotComparable(ConvexOrder),
}

/// A committee with its persuasion thresholds and most-demanding member.
#[derive(Debug, Clone)]
pub struct LabContext {
    pub committee: Committee,
    pub thresholds: Vec<PersuasionThresholds>,
    pub grid_n: usize,
    pub q_hat_member: usize,
    pub q_hat: f64,
}

impl LabContext {
    pub fn new(committee: Committee, grid_n: usize) -> Self {
        let thresholds: Vec<_> = committee
            .members()
            .iter()
            .map(|m| persuasion_thresholds(m, grid_n))
            .collect();
        let (q_hat_member, q_hat) = most_demanding_of(&thresholds);
        LabContext {
            committee,
            thresholds,
            grid_n,
            q_hat_member,
            q_hat,
        }
    }

    pub fn prior(&self) -> Belief {
        self.committee.prior()
    }

    /// The benchmark signal: the most-demanding member's dictatorship signal.
    pub fn hat_signal(&self) -> BeliefDistribution {
        lobbyist_signal(self.q_hat, self.prior())
    }

    pub fn dictatorship(&self, i: usize) -> DictatorshipEquilibrium {
        dictatorship_with_thresholds(&self.committee, i, self.thresholds[i], self.grid_n)
    }

    pub fn hat_dictatorship(&self) -> DictatorshipEquilibrium {
        self.dictatorship(self.q_hat_member)
    }

    fn check_size(&self, mech: &VotingMechanism) -> Result<(), LabError> {
        if mech.n_members() != self.committee.len() {
            return Err(LabError::MemberCount {
                mechanism: mech.name().to_string(),
                votes: mech.n_members(),
                members: self.committee.len(),
            });
        }
        Ok(())
    }
}

/// Member's expected payoff at posterior `q` when the others enact without
/// information and their own vote can push enactment down to `d_min`.
pub fn continuation_payoff(m: &MemberSpec, q: f64, d_min: f64) -> f64 {
    if m.prefers_enact(q) {
        m.enact_payoff(q)
    } else {
        d_min * m.enact_payoff(q)
    }
}

/// Continuation payoff gain net of the gain under the preferred decision:
/// `[π(q) − π(r)] − [π̂(q) − π̂(r)]`.
pub fn payoff_gap(m: &MemberSpec, q: f64, r: f64, d_min: f64) -> f64 {
    (continuation_payoff(m, q, d_min) - continuation_payoff(m, r, d_min))
        - (m.preferred_payoff(q) - m.preferred_payoff(r))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Claim11Config {
    /// Points in the interim-belief grid over `[q̂, 1]`, also the resolution
    /// of the grid the deviation atoms are drawn from.
    pub grid_n: usize,
    /// Random binary deviations per grid point.
    pub samples: usize,
    pub seed: u64,
}

impl Default for Claim11Config {
    fn default() -> Self {
        Claim11Config {
            grid_n: 1001,
            samples: 200,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MemberClaimCheck {
    pub member: usize,
    pub q_high: f64,
    /// Lowest enactment probability the member can force at the enacting profile.
    pub d_min: f64,
    /// `q̂ ≥ q̄_i`: the member would not buy information alone above `q̂`.
    pub threshold_ok: bool,
    pub max_violation_ineq1: f64,
    pub max_violation_ineq2: f64,
    pub max_violation_ineq3: f64,
    pub concavity_ok: bool,
    pub vote_enact_ok: bool,
}

impl MemberClaimCheck {
    pub fn holds(&self) -> bool {
        self.threshold_ok
            && self.concavity_ok
            && self.vote_enact_ok
            && self.max_violation_ineq1 <= VIOLATION_TOLERANCE
            && self.max_violation_ineq2 <= VIOLATION_TOLERANCE
            && self.max_violation_ineq3 <= VIOLATION_TOLERANCE
    }
}

/// Whether, above `q̂`, nobody buys information and everybody votes to enact.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Claim11Report {
    pub mechanism: String,
    pub q_hat: f64,
    pub per_member: Vec<MemberClaimCheck>,
    pub grid_n: usize,
    pub samples: usize,
    pub holds: bool,
}

// SplitMix64 finaliser, used to derive independent per-task seeds.
fn mix_seed(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

pub fn task_seed(seed: u64, parts: &[u64]) -> u64 {
    parts
        .iter()
        .fold(mix_seed(seed), |acc, &p| mix_seed(acc ^ p))
}

fn binary_cost(kernel: &CostKernel, a: f64, b: f64, w_b: f64, r: f64) -> f64 {
    ((1.0 - w_b) * kernel.eval(a) + w_b * kernel.eval(b) - kernel.eval(r)).max(0.0)
}

#[derive(Default, Clone, Copy)]
struct PointCheck {
    ineq1: f64,
    ineq2: f64,
    ineq3: f64,
    concave: bool,
    enact: bool,
}

/// Checks that the no-information, vote-to-enact profile is a mutual best
/// response at every interim belief `r ≥ q̂`.
///
/// For each member and each grid point `r` this verifies the ordering of
/// thresholds, midpoint concavity of the payoff gap in the posterior, the
/// member's preference for enactment at `r`, and three inequalities on
/// randomly drawn Bayes-plausible binary experiments: no profit under the
/// mechanism, no profit as a lone decision-maker, and a nonpositive expected
/// payoff gap.
pub fn verify_claim11(
    ctx: &LabContext,
    mech: &VotingMechanism,
    config: &Claim11Config,
) -> Result<Claim11Report, LabError> {
    ctx.check_size(mech)?;
    let witness = mech.validate()?.enact_witness;
    let q_hat = ctx.q_hat;
    let n = config.grid_n.max(2);
    let atom = |k: usize| k as f64 / (n - 1) as f64;

    let per_member: Vec<MemberClaimCheck> = ctx
        .committee
        .members()
        .iter()
        .enumerate()
        .map(|(i, m)| {
            let d_min = mech.pivotal_bounds_at(i, &witness).0;
            let enacting = mech.decision(&witness) == 1.0;
            let gap = |q: f64, r: f64| payoff_gap(m, q, r, d_min);

            let points: Vec<PointCheck> = (0..n)
                .into_par_iter()
                .map(|j| {
                    let r = (q_hat + (1.0 - q_hat) * j as f64 / (n - 1) as f64).min(1.0);
                    let mut check = PointCheck {
                        concave: true,
                        enact: enacting && m.prefers_enact(r),
                        ..Default::default()
                    };
                    for k in 1..n - 1 {
                        let mid = gap(atom(k), r);
                        let chord = 0.5 * (gap(atom(k - 1), r) + gap(atom(k + 1), r));
                        if mid < chord - CONCAVITY_TOLERANCE {
                            check.concave = false;
                        }
                    }

                    // Atoms strictly below and strictly above r.
                    let below = (0..n).take_while(|&k| atom(k) < r).count();
                    let above_start = (0..n).position(|k| atom(k) > r).unwrap_or(n);
                    if below == 0 || above_start == n {
                        return check;
                    }
                    let mut rng =
                        ChaCha8Rng::seed_from_u64(task_seed(config.seed, &[i as u64, j as u64]));
                    let base = continuation_payoff(m, r, d_min);
                    let base_hat = m.preferred_payoff(r);
                    for _ in 0..config.samples {
                        let a = atom(rng.gen_range(0..below));
                        let b = atom(rng.gen_range(above_start..n));
                        let w_b = (r - a) / (b - a);
                        let cost = binary_cost(&m.kernel, a, b, w_b, r);
                        let expect = |f: &dyn Fn(f64) -> f64| (1.0 - w_b) * f(a) + w_b * f(b);
                        let v1 = expect(&|q| continuation_payoff(m, q, d_min) - base) - cost;
                        let v2 = expect(&|q| m.preferred_payoff(q) - base_hat) - cost;
                        let v3 = expect(&|q| gap(q, r));
                        check.ineq1 = check.ineq1.max(v1);
                        check.ineq2 = check.ineq2.max(v2);
                        check.ineq3 = check.ineq3.max(v3);
                        let mid = gap(0.5 * (a + b), r);
                        if mid < 0.5 * (gap(a, r) + gap(b, r)) - CONCAVITY_TOLERANCE {
                            check.concave = false;
                        }
                    }
                    check
                })
                .collect();

            MemberClaimCheck {
                member: i,
                q_high: ctx.thresholds[i].q_high,
                d_min,
                threshold_ok: q_hat >= ctx.thresholds[i].q_high,
                max_violation_ineq1: points.iter().map(|c| c.ineq1).fold(0.0, f64::max),
                max_violation_ineq2: points.iter().map(|c| c.ineq2).fold(0.0, f64::max),
                max_violation_ineq3: points.iter().map(|c| c.ineq3).fold(0.0, f64::max),
                concavity_ok: points.iter().all(|c| c.concave),
                vote_enact_ok: points.iter().all(|c| c.enact),
            }
        })
        .collect();

    let holds = per_member.iter().all(MemberClaimCheck::holds);
    Ok(Claim11Report {
        mechanism: mech.name().to_string(),
        q_hat,
        per_member,
        grid_n: n,
        samples: config.samples,
        holds,
    })
}

/// Outcome when the lobbyist sends the benchmark signal, members vote the
/// enacting profile at `q̂` without buying information, and block at 0.
pub fn benchmark_signal_outcome(
    ctx: &LabContext,
    mech: &VotingMechanism,
) -> Result<OutcomeStats, LabError> {
    ctx.check_size(mech)?;
    let report = mech.validate()?;
    let enact = mech.decision(&report.enact_witness);
    let block = mech.decision(&report.block_witness);
    let prior = ctx.prior();
    let signal = ctx.hat_signal();
    let (given_good, given_bad) = signal.state_conditional(prior)?;
    let (mut good, mut bad) = (0.0, 0.0);
    for &r in signal.support() {
        let d = if r >= ctx.q_hat - PAYOFF_TOLERANCE {
            enact
        } else {
            block
        };
        good += given_good.weight_at(r) * d;
        bad += given_bad.weight_at(r) * d;
    }
    Ok(OutcomeStats::new(
        prior.value(),
        good,
        bad,
        vec![0.0; ctx.committee.len()],
    ))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Verdict {
    ADominates,
    BDominates,
    Equivalent,
    Incomparable,
}

impl Verdict {
    /// The first outcome is at least as good on every coordinate.
    pub fn a_weakly_dominates(self) -> bool {
        matches!(self, Verdict::ADominates | Verdict::Equivalent)
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Verdict::ADominates => "a_dominates",
            Verdict::BDominates => "b_dominates",
            Verdict::Equivalent => "equivalent",
            Verdict::Incomparable => "incomparable",
        };
        f.write_str(s)
    }
}

/// Which outcome does better on one coordinate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Coordinate {
    ABetter,
    BBetter,
    Tie,
}

impl Coordinate {
    /// Compares two quantities where more is better.
    fn more_is_better(a: f64, b: f64) -> Self {
        if a > b + COMPARE_TOLERANCE {
            Coordinate::ABetter
        } else if b > a + COMPARE_TOLERANCE {
            Coordinate::BBetter
        } else {
            Coordinate::Tie
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DominanceVerdict {
    pub block_bad: Coordinate,
    pub enact_good: Coordinate,
    pub costs: Vec<Coordinate>,
    pub verdict: Verdict,
}

/// Compares blocking of bad policies, enactment of good ones, and every
/// member's expected information cost.
pub fn dominance_compare(a: &OutcomeStats, b: &OutcomeStats) -> Result<DominanceVerdict, LabError> {
    if a.n_members() != b.n_members() {
        return Err(LabError::SizeMismatch(a.n_members(), b.n_members()));
    }
    let block_bad = Coordinate::more_is_better(b.p_enact_bad, a.p_enact_bad);
    let enact_good = Coordinate::more_is_better(a.p_enact_good, b.p_enact_good);
    let costs: Vec<Coordinate> = a
        .expected_cost
        .iter()
        .zip(&b.expected_cost)
        .map(|(&ca, &cb)| Coordinate::more_is_better(cb, ca))
        .collect();
    let all = || {
        std::iter::once(&block_bad)
            .chain([&enact_good])
            .chain(&costs)
    };
    let a_weak = all().all(|c| *c != Coordinate::BBetter);
    let b_weak = all().all(|c| *c != Coordinate::ABetter);
    let verdict = match (a_weak, b_weak) {
        (true, true) => Verdict::Equivalent,
        (true, false) => Verdict::ADominates,
        (false, true) => Verdict::BDominates,
        (false, false) => Verdict::Incomparable,
    };
    Ok(DominanceVerdict {
        block_bad,
        enact_good,
        costs,
        verdict,
    })
}

/// How a mechanism's outcome in an audit row was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum OutcomeSource {
    /// The mechanism is a dictatorship; its equilibrium is known in closed form.
    DictatorshipEquilibrium,
    /// The best outcome compatible with the lobbyist securing at least the
    /// benchmark enactment probability.
    BenchmarkBound,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AuditRow {
    pub mechanism: String,
    pub claim: Claim11Report,
    pub benchmark: OutcomeStats,
    /// The lobbyist can secure at least the dictatorship's enactment probability.
    pub lobbyist_payoff_ok: bool,
    pub outcome: OutcomeStats,
    pub outcome_source: OutcomeSource,
    pub vs_benchmark: DominanceVerdict,
    pub vs_outcome: DominanceVerdict,
    pub ok: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AuditTable {
    pub q_hat_member: usize,
    pub q_hat: f64,
    pub dictatorship_outcome: OutcomeStats,
    pub rows: Vec<AuditRow>,
    pub all_ok: bool,
}

/// Compares the most-demanding member's dictatorship with every mechanism in
/// `catalog`.
pub fn theorem1_audit(
    ctx: &LabContext,
    catalog: &[VotingMechanism],
    config: &Claim11Config,
) -> Result<AuditTable, LabError> {
    let hat = ctx.hat_dictatorship().outcome;
    let rows = catalog
        .iter()
        .enumerate()
        .map(|(idx, mech)| {
            let row_config = Claim11Config {
                seed: task_seed(config.seed, &[0xA0D1_7000 + idx as u64]),
                ..*config
            };
            let claim = verify_claim11(ctx, mech, &row_config)?;
            let benchmark = benchmark_signal_outcome(ctx, mech)?;
            let lobbyist_payoff_ok = benchmark.p_enact >= hat.p_enact - COMPARE_TOLERANCE;
            let (outcome, outcome_source) = match mech.is_dictatorship() {
                Some(j) => (
                    ctx.dictatorship(j).outcome,
                    OutcomeSource::DictatorshipEquilibrium,
                ),
                None => (benchmark.clone(), OutcomeSource::BenchmarkBound),
            };
            let vs_benchmark = dominance_compare(&hat, &benchmark)?;
            let vs_outcome = dominance_compare(&hat, &outcome)?;
            let ok = claim.holds
                && lobbyist_payoff_ok
                && vs_benchmark.verdict.a_weakly_dominates()
                && vs_outcome.verdict.a_weakly_dominates();
            Ok(AuditRow {
                mechanism: mech.name().to_string(),
                claim,
                benchmark,
                lobbyist_payoff_ok,
                outcome,
                outcome_source,
                vs_benchmark,
                vs_outcome,
                ok,
            })
        })
        .collect::<Result<Vec<_>, LabError>>()?;
    let all_ok = rows.iter().all(|r| r.ok);
    Ok(AuditTable {
        q_hat_member: ctx.q_hat_member,
        q_hat: ctx.q_hat,
        dictatorship_outcome: hat,
        rows,
        all_ok,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Prop1Record {
    pub order: ConvexOrder,
    /// Upper bound on the lobbyist's payoff from the more informative signal.
    pub payoff: f64,
    /// Lobbyist's payoff from the benchmark signal.
    pub payoff_hat: f64,
    /// Whether `payoff` is the exact equilibrium payoff (dictatorships) or a bound.
    pub exact: bool,
    /// Atoms strictly inside some member's information-acquisition interval
    /// under a mechanism that is not a dictatorship; their continuation is
    /// bounded by certain enactment.
    pub flagged_atoms: Vec<f64>,
    pub holds: bool,
}

/// Checks that a signal more informative than the benchmark cannot raise the
/// lobbyist's payoff.
///
/// Atoms at or above `q̂` enact and the atom at 0 blocks under any mechanism.
/// Under a dictatorship every other atom follows the dictator's closed-form
/// response; under other mechanisms it is bounded by certain enactment.
pub fn prop1_payoff_check(
    ctx: &LabContext,
    mech: &VotingMechanism,
    mu: &BeliefDistribution,
) -> Result<Prop1Record, LabError> {
    ctx.check_size(mech)?;
    let report = mech.validate()?;
    let hat = ctx.hat_signal();
    let order = convex_order_compare(mu, &hat)?;
    if !matches!(order, ConvexOrder::Dominates | ConvexOrder::Equal) {
        return Err(LabError::NotComparable(order));
    }
    let enact = mech.decision(&report.enact_witness);
    let block = mech.decision(&report.block_witness);
    let dictator = mech.is_dictatorship();
    let q_hat = ctx.q_hat;

    let mut flagged_atoms = Vec::new();
    let mut response = |r: f64| -> f64 {
        if let Some(j) = dictator {
            return enactment_value(&ctx.thresholds[j], r);
        }
        if r >= q_hat - PAYOFF_TOLERANCE {
            enact
        } else if r == 0.0 {
            block
        } else {
            if ctx.thresholds.iter().any(|t| t.acquires_at(r)) {
                flagged_atoms.push(r);
            }
            1.0
        }
    };
    let payoff: f64 = mu.atoms().map(|(r, w)| w * response(r)).sum();
    let payoff_hat: f64 = hat
        .atoms()
        .map(|(r, w)| {
            let d = if r >= q_hat - PAYOFF_TOLERANCE {
                enact
            } else {
                block
            };
            w * d
        })
        .sum();
    Ok(Prop1Record {
        order,
        payoff,
        payoff_hat,
        exact: dictator.is_some(),
        flagged_atoms,
        holds: payoff <= payoff_hat + COMPARE_TOLERANCE,
    })
}

/// A finite set of belief distributions the lobbyist may choose from.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentMenu {
    distributions: Vec<BeliefDistribution>,
}

impl ExperimentMenu {
    pub fn new(distributions: Vec<BeliefDistribution>, prior: Belief) -> Result<Self, LabError> {
        if distributions.is_empty() {
            return Err(LabError::EmptyMenu);
        }
        for (index, d) in distributions.iter().enumerate() {
            if !d.is_bayes_plausible(prior.value()) {
                return Err(LabError::MenuMeanMismatch {
                    index,
                    mean: d.mean(),
                    prior: prior.value(),
                });
            }
        }
        Ok(ExperimentMenu { distributions })
    }

    pub fn distributions(&self) -> &[BeliefDistribution] {
        &self.distributions
    }

    pub fn len(&self) -> usize {
        self.distributions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.distributions.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConstrainedChoice {
    pub dictator: usize,
    pub chosen_index: usize,
    pub chosen: BeliefDistribution,
    pub payoff: f64,
    pub outcome: OutcomeStats,
    /// Lobbyist payoff of every menu entry, in menu order.
    pub payoffs: Vec<f64>,
}

/// The lobbyist's best menu entry against a dictatorship. Ties go to the
/// earlier entry.
pub fn constrained_lobbyist_best(
    ctx: &LabContext,
    mech: &VotingMechanism,
    menu: &ExperimentMenu,
) -> Result<ConstrainedChoice, LabError> {
    ctx.check_size(mech)?;
    let j = mech
        .is_dictatorship()
        .ok_or_else(|| LabError::NotDictatorship(mech.name().to_string()))?;
    constrained_best_for(ctx, j, menu)
}

pub fn constrained_best_for(
    ctx: &LabContext,
    dictator: usize,
    menu: &ExperimentMenu,
) -> Result<ConstrainedChoice, LabError> {
    if menu.is_empty() {
        return Err(LabError::EmptyMenu);
    }
    let outcomes = menu
        .distributions()
        .iter()
        .map(|d| dictator_outcome(&ctx.committee, dictator, &ctx.thresholds[dictator], d))
        .collect::<Result<Vec<_>, _>>()?;
    let payoffs: Vec<f64> = outcomes.iter().map(|o| o.p_enact).collect();
    let mut best = 0;
    for (k, &p) in payoffs.iter().enumerate().skip(1) {
        if p > payoffs[best] + 1e-12 {
            best = k;
        }
    }
    Ok(ConstrainedChoice {
        dictator,
        chosen_index: best,
        chosen: menu.distributions()[best].clone(),
        payoff: payoffs[best],
        outcome: outcomes[best].clone(),
        payoffs,
    })
}

/// Tolerance on every golden value of the restricted-menu example.
pub const GOLDEN_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NumericCheck {
    pub name: String,
    pub expected: f64,
    pub actual: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LabelCheck {
    pub name: String,
    pub expected: String,
    pub actual: String,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CounterexampleReport {
    pub numeric: Vec<NumericCheck>,
    pub labels: Vec<LabelCheck>,
    pub choices: Vec<ConstrainedChoice>,
    pub free_outcomes: Vec<OutcomeStats>,
    pub all_pass: bool,
}

/// Two members with composite kernels matched to their own payoffs.
pub fn example_committee(u1: f64, u2: f64) -> Committee {
    Committee::new(
        vec![
            MemberSpec::composite(u1).expect("u1 is nonnegative"),
            MemberSpec::composite(u2).expect("u2 is nonnegative"),
        ],
        0.5,
    )
    .expect("valid committee")
}

/// Supports `{0.2, 0.8}` and `{0, 0.6}`, both with mean 1/2.
pub fn example_menu() -> ExperimentMenu {
    let half = Belief::new(0.5).expect("valid prior");
    ExperimentMenu::new(
        vec![
            BeliefDistribution::binary_split(0.2, 0.8, 0.5).expect("valid split"),
            BeliefDistribution::binary_split(0.0, 0.6, 0.5).expect("valid split"),
        ],
        half,
    )
    .expect("menu entries have mean 1/2")
}

/// Runs the restricted-menu example and compares every quantity with its
/// known value.
///
/// With the lobbyist limited to the menu, the most-demanding member's
/// dictatorship enacts good policies less often than the other member's, so
/// neither dictatorship dominates; with a free lobbyist the ordering returns.
pub fn counterexample_report(
    committee: &Committee,
    menu: &ExperimentMenu,
    grid_n: usize,
) -> Result<CounterexampleReport, LabError> {
    let ctx = LabContext::new(committee.clone(), grid_n);
    let mut numeric = Vec::new();
    let mut check = |name: &str, expected: f64, actual: f64| {
        numeric.push(NumericCheck {
            name: name.to_string(),
            expected,
            actual,
            pass: (expected - actual).abs() <= GOLDEN_TOLERANCE,
        });
    };

    let t = &ctx.thresholds;
    let member = |i: usize| {
        t.get(i)
            .copied()
            .unwrap_or(PersuasionThresholds::degenerate(f64::NAN))
    };
    check("m1 lower persuasion threshold", 0.8, member(0).q_low);
    check("m1 upper persuasion threshold", 0.8, member(0).q_high);
    check("m2 lower persuasion threshold", 0.6, member(1).q_low);
    check("m2 upper persuasion threshold", 0.6, member(1).q_high);
    check("most-demanding member", 1.0, (ctx.q_hat_member + 1) as f64);
    check("q_hat", 0.8, ctx.q_hat);

    let choices: Vec<ConstrainedChoice> = (0..committee.len())
        .map(|j| constrained_best_for(&ctx, j, menu))
        .collect::<Result<_, _>>()?;
    let c1 = &choices[0];
    let c2 = choices.get(1).unwrap_or(c1);
    check(
        "m1-dictatorship menu choice",
        1.0,
        (c1.chosen_index + 1) as f64,
    );
    check(
        "m1-dictatorship P(enact | good)",
        0.8,
        c1.outcome.p_enact_good,
    );
    check(
        "m1-dictatorship P(block | bad)",
        0.8,
        c1.outcome.p_block_bad(),
    );
    check("m1-dictatorship lobbyist payoff", 0.5, c1.payoff);
    check(
        "m2-dictatorship menu choice",
        2.0,
        (c2.chosen_index + 1) as f64,
    );
    check(
        "m2-dictatorship P(enact | good)",
        1.0,
        c2.outcome.p_enact_good,
    );
    check(
        "m2-dictatorship P(block | bad)",
        1.0 / 3.0,
        c2.outcome.p_block_bad(),
    );
    check("m2-dictatorship lobbyist payoff", 5.0 / 6.0, c2.payoff);

    let free_outcomes: Vec<OutcomeStats> = (0..committee.len())
        .map(|j| ctx.dictatorship(j).outcome)
        .collect();
    let f2 = free_outcomes.get(1).unwrap_or(&free_outcomes[0]);
    check(
        "free lobbyist m1-dictatorship P(enact | bad)",
        0.25,
        free_outcomes[0].p_enact_bad,
    );
    check(
        "free lobbyist m2-dictatorship P(enact | bad)",
        2.0 / 3.0,
        f2.p_enact_bad,
    );

    let mut labels = Vec::new();
    let mut label = |name: &str, expected: Verdict, actual: Verdict| {
        labels.push(LabelCheck {
            name: name.to_string(),
            expected: expected.to_string(),
            actual: actual.to_string(),
            pass: expected == actual,
        });
    };
    let restricted = dominance_compare(&c1.outcome, &c2.outcome)?.verdict;
    label(
        "restricted menu: m1- vs m2-dictatorship",
        Verdict::Incomparable,
        restricted,
    );
    let free = dominance_compare(&free_outcomes[0], f2)?.verdict;
    label(
        "free lobbyist: m1- vs m2-dictatorship",
        Verdict::ADominates,
        free,
    );

    let all_pass = numeric.iter().all(|c| c.pass) && labels.iter().all(|c| c.pass);
    Ok(CounterexampleReport {
        numeric,
        labels,
        choices,
        free_outcomes,
        all_pass,
    })
}

/// The restricted-menu example with its original parameters.
pub fn counterexample_s5() -> CounterexampleReport {
    counterexample_report(
        &example_committee(0.25, 2.0 / 3.0),
        &example_menu(),
        crate::persuasion::DEFAULT_GRID_N,
    )
    .expect("the canonical example is well formed")
}
