//! Beliefs about the binary state and finite-support distributions over them.
//!
//! A belief is the probability that the policy is good. Every signal the
//! lobbyist can send, and every experiment a member can run, is represented
//! here by the distribution of beliefs it induces. Bayes plausibility is the
//! statement that this distribution has the prior as its mean.

use serde::{Deserialize, Serialize};
use std::fmt;
use thiserror::Error;

/// Tolerance on the total weight of a distribution.
pub const WEIGHT_TOLERANCE: f64 = 1e-12;
/// Atoms closer than this are merged.
pub const ATOM_MERGE_TOLERANCE: f64 = 1e-12;
/// Tolerance when comparing the mean of a distribution to a prior.
pub const MEAN_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum BeliefError {
    #[error("belief {0} is outside [0, 1]")]
    Range(f64),

    #[error("weights sum to {0}, expected 1")]
    WeightSum(f64),

    #[error("weight {0} is negative or not finite")]
    InvalidWeight(f64),

    #[error("support has {support} atoms but {weights} weights")]
    LengthMismatch { support: usize, weights: usize },

    #[error("distribution has no atoms")]
    Empty,

    #[error("distribution mean {mean} does not match prior {prior}")]
    NotBayesPlausible { mean: f64, prior: f64 },

    #[error("prior {0} must lie strictly inside (0, 1)")]
    PriorBoundary(f64),

    #[error("conclusive evidence for both states")]
    InconsistentEvidence,

    #[error("means differ ({0} vs {1}); convex order compares distributions with a common mean")]
    MeanMismatch(f64, f64),
}

/// Probability that the state is good.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct Belief(f64);

impl Belief {
    pub fn new(value: f64) -> Result<Self, BeliefError> {
        if (0.0..=1.0).contains(&value) {
            Ok(Belief(value))
        } else {
            Err(BeliefError::Range(value))
        }
    }

    /// A belief in the open interval (0, 1), as required of a common prior.
    pub fn interior(value: f64) -> Result<Self, BeliefError> {
        if value > 0.0 && value < 1.0 {
            Ok(Belief(value))
        } else {
            Err(BeliefError::PriorBoundary(value))
        }
    }

    pub fn value(self) -> f64 {
        self.0
    }

    pub fn odds(self) -> f64 {
        self.0 / (1.0 - self.0)
    }
}

impl TryFrom<f64> for Belief {
    type Error = BeliefError;

    fn try_from(value: f64) -> Result<Self, Self::Error> {
        Belief::new(value)
    }
}

impl From<Belief> for f64 {
    fn from(b: Belief) -> f64 {
        b.0
    }
}

impl fmt::Display for Belief {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StateLabel {
    Good,
    Bad,
}

/// A probability distribution over beliefs with finitely many atoms.
///
/// Atoms are kept sorted and strictly increasing, and every stored weight is
/// positive.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawDistribution", into = "RawDistribution")]
pub struct BeliefDistribution {
    support: Vec<f64>,
    weights: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
struct RawDistribution {
    support: Vec<f64>,
    weights: Vec<f64>,
}

impl TryFrom<RawDistribution> for BeliefDistribution {
    type Error = BeliefError;

    fn try_from(raw: RawDistribution) -> Result<Self, Self::Error> {
        BeliefDistribution::new(&raw.support, &raw.weights)
    }
}

impl From<BeliefDistribution> for RawDistribution {
    fn from(d: BeliefDistribution) -> Self {
        RawDistribution {
            support: d.support,
            weights: d.weights,
        }
    }
}

impl BeliefDistribution {
    /// Point mass at `b`.
    pub fn degenerate(b: Belief) -> Self {
        BeliefDistribution {
            support: vec![b.0],
            weights: vec![1.0],
        }
    }

    /// Validates, sorts, drops zero-weight atoms and merges duplicates.
    pub fn new(support: &[f64], weights: &[f64]) -> Result<Self, BeliefError> {
        if support.len() != weights.len() {
            return Err(BeliefError::LengthMismatch {
                support: support.len(),
                weights: weights.len(),
            });
        }
        if support.is_empty() {
            return Err(BeliefError::Empty);
        }
        for &q in support {
            if !(0.0..=1.0).contains(&q) {
                return Err(BeliefError::Range(q));
            }
        }
        for &w in weights {
            if !w.is_finite() || w < 0.0 {
                return Err(BeliefError::InvalidWeight(w));
            }
        }
        let total: f64 = weights.iter().sum();
        if (total - 1.0).abs() > WEIGHT_TOLERANCE {
            return Err(BeliefError::WeightSum(total));
        }

        let mut atoms: Vec<(f64, f64)> = support
            .iter()
            .zip(weights)
            .filter(|(_, &w)| w > 0.0)
            .map(|(&q, &w)| (q, w))
            .collect();
        atoms.sort_by(|a, b| a.0.total_cmp(&b.0));

        let mut merged: Vec<(f64, f64)> = Vec::with_capacity(atoms.len());
        for (q, w) in atoms {
            match merged.last_mut() {
                Some(last) if q - last.0 < ATOM_MERGE_TOLERANCE => last.1 += w,
                _ => merged.push((q, w)),
            }
        }
        let (support, weights) = merged.into_iter().unzip();
        Ok(BeliefDistribution { support, weights })
    }

    /// The unique distribution with mean `mean` supported on `{low, high}`.
    ///
    /// Collapses to a point mass when `mean` sits on either atom.
    pub fn binary_split(low: f64, high: f64, mean: f64) -> Result<Self, BeliefError> {
        if !(low <= mean && mean <= high) {
            return Err(BeliefError::NotBayesPlausible { mean, prior: mean });
        }
        if high - low < ATOM_MERGE_TOLERANCE {
            return Ok(Self::degenerate(Belief::new(mean)?));
        }
        let w_high = (mean - low) / (high - low);
        Self::new(&[low, high], &[1.0 - w_high, w_high])
    }

    pub fn support(&self) -> &[f64] {
        &self.support
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn atoms(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.support
            .iter()
            .copied()
            .zip(self.weights.iter().copied())
    }

    pub fn len(&self) -> usize {
        self.support.len()
    }

    pub fn is_empty(&self) -> bool {
        self.support.is_empty()
    }

    pub fn is_degenerate(&self) -> bool {
        self.support.len() == 1
    }

    pub fn mean(&self) -> f64 {
        self.atoms().map(|(q, w)| q * w).sum()
    }

    /// Weight on the atom at `q`, or zero when `q` is not an atom.
    pub fn weight_at(&self, q: f64) -> f64 {
        self.atoms()
            .find(|(x, _)| (x - q).abs() < ATOM_MERGE_TOLERANCE)
            .map_or(0.0, |(_, w)| w)
    }

    /// `Σ w·f(q)` over the atoms.
    pub fn expect(&self, f: impl Fn(f64) -> f64) -> f64 {
        self.atoms().map(|(q, w)| w * f(q)).sum()
    }

    /// `∫ max(q − t, 0) dμ(q)`.
    pub fn call_integral(&self, t: f64) -> f64 {
        self.expect(|q| (q - t).max(0.0))
    }

    pub fn is_bayes_plausible(&self, prior: f64) -> bool {
        (self.mean() - prior).abs() <= MEAN_TOLERANCE
    }

    /// Splits the distribution into its laws conditional on each state.
    ///
    /// Returns `(given_good, given_bad)`. Atoms with zero conditional weight
    /// (the atom at 0 given a good policy, the atom at 1 given a bad one) are
    /// dropped from the respective law; use [`BeliefDistribution::weight_at`]
    /// to read them back as zeros.
    pub fn state_conditional(
        &self,
        prior: Belief,
    ) -> Result<(BeliefDistribution, BeliefDistribution), BeliefError> {
        let p = prior.0;
        if p <= 0.0 || p >= 1.0 {
            return Err(BeliefError::PriorBoundary(p));
        }
        let mean = self.mean();
        if (mean - p).abs() > MEAN_TOLERANCE {
            return Err(BeliefError::NotBayesPlausible { mean, prior: p });
        }
        let good: Vec<f64> = self.atoms().map(|(r, w)| w * r / p).collect();
        let bad: Vec<f64> = self
            .atoms()
            .map(|(r, w)| w * (1.0 - r) / (1.0 - p))
            .collect();
        Ok((
            Self::renormalised(&self.support, good),
            Self::renormalised(&self.support, bad),
        ))
    }

    // The conditional weights sum to 1 only up to the mean tolerance.
    fn renormalised(support: &[f64], mut weights: Vec<f64>) -> BeliefDistribution {
        let total: f64 = weights.iter().sum();
        weights.iter_mut().for_each(|w| *w /= total);
        let (support, weights) = support
            .iter()
            .zip(weights)
            .filter(|(_, w)| *w > 0.0)
            .map(|(&q, w)| (q, w))
            .unzip();
        BeliefDistribution { support, weights }
    }
}

/// Belief about the good state after pooling a public interim belief with
/// independent private posteriors that each started from it.
///
/// Conclusive evidence (a belief of exactly 0 or 1, including the interim
/// belief itself) overrides the odds product.
pub fn aggregate_posteriors(interim: Belief, posteriors: &[Belief]) -> Result<Belief, BeliefError> {
    let mut conclusive: Option<f64> = None;
    for b in std::iter::once(&interim).chain(posteriors) {
        if b.0 == 0.0 || b.0 == 1.0 {
            match conclusive {
                Some(c) if c != b.0 => return Err(BeliefError::InconsistentEvidence),
                _ => conclusive = Some(b.0),
            }
        }
    }
    if let Some(c) = conclusive {
        return Ok(Belief(c));
    }

    let base = interim.odds().ln();
    let log_odds = base + posteriors.iter().map(|q| q.odds().ln() - base).sum::<f64>();
    // Logistic map, written to stay finite for large |log_odds|.
    let value = if log_odds >= 0.0 {
        1.0 / (1.0 + (-log_odds).exp())
    } else {
        let e = log_odds.exp();
        e / (1.0 + e)
    };
    Ok(Belief(value))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ConvexOrder {
    /// The first distribution is a mean-preserving spread of the second.
    Dominates,
    DominatedBy,
    Equal,
    Incomparable,
}

impl ConvexOrder {
    pub fn reversed(self) -> Self {
        match self {
            ConvexOrder::Dominates => ConvexOrder::DominatedBy,
            ConvexOrder::DominatedBy => ConvexOrder::Dominates,
            other => other,
        }
    }
}

impl fmt::Display for ConvexOrder {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            ConvexOrder::Dominates => "dominates",
            ConvexOrder::DominatedBy => "dominated_by",
            ConvexOrder::Equal => "equal",
            ConvexOrder::Incomparable => "incomparable",
        };
        f.write_str(s)
    }
}

/// Compares two belief distributions in the convex order.
///
/// For beliefs over a binary state this is the Blackwell order on the
/// underlying experiments. The call integral is piecewise linear in the
/// strike with kinks only at atoms, so checking the union of both supports
/// plus the endpoints is exact.
pub fn convex_order_compare(
    mu: &BeliefDistribution,
    nu: &BeliefDistribution,
) -> Result<ConvexOrder, BeliefError> {
    let (m1, m2) = (mu.mean(), nu.mean());
    if (m1 - m2).abs() > MEAN_TOLERANCE {
        return Err(BeliefError::MeanMismatch(m1, m2));
    }
    let mut strikes: Vec<f64> = mu
        .support()
        .iter()
        .chain(nu.support())
        .copied()
        .chain([0.0, 1.0])
        .collect();
    strikes.sort_by(f64::total_cmp);
    strikes.dedup();

    let (mut mu_above, mut nu_above) = (false, false);
    for t in strikes {
        let diff = mu.call_integral(t) - nu.call_integral(t);
        if diff > MEAN_TOLERANCE {
            mu_above = true;
        } else if diff < -MEAN_TOLERANCE {
            nu_above = true;
        }
    }
    Ok(match (mu_above, nu_above) {
        (false, false) => ConvexOrder::Equal,
        (true, false) => ConvexOrder::Dominates,
        (false, true) => ConvexOrder::DominatedBy,
        (true, true) => ConvexOrder::Incomparable,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn b(x: f64) -> Belief {
        Belief::new(x).unwrap()
    }

    fn mu1() -> BeliefDistribution {
        BeliefDistribution::new(&[0.2, 0.8], &[0.5, 0.5]).unwrap()
    }

    fn mu2() -> BeliefDistribution {
        BeliefDistribution::new(&[0.0, 0.6], &[1.0 / 6.0, 5.0 / 6.0]).unwrap()
    }

    #[test]
    fn degenerate_is_point_mass() {
        let d = BeliefDistribution::degenerate(b(0.5));
        assert_eq!(d.support(), &[0.5]);
        assert_eq!(d.weights(), &[1.0]);
        assert_eq!(BeliefDistribution::degenerate(b(0.0)).support(), &[0.0]);
        assert_eq!(BeliefDistribution::degenerate(b(0.8)).mean(), 0.8);
    }

    #[test]
    fn make_distribution_examples() {
        assert!((mu2().mean() - 0.5).abs() < 1e-15);
        assert!((mu1().mean() - 0.5).abs() < 1e-15);
        assert!(matches!(
            BeliefDistribution::new(&[0.3], &[0.9]),
            Err(BeliefError::WeightSum(_))
        ));
        assert!(matches!(
            BeliefDistribution::new(&[1.2], &[1.0]),
            Err(BeliefError::Range(_))
        ));
        assert!(matches!(
            BeliefDistribution::new(&[], &[]),
            Err(BeliefError::Empty)
        ));
    }

    #[test]
    fn make_distribution_sorts_merges_and_drops() {
        let d = BeliefDistribution::new(&[0.7, 0.1, 0.7, 0.4], &[0.25, 0.25, 0.5, 0.0]).unwrap();
        assert_eq!(d.support(), &[0.1, 0.7]);
        assert_eq!(d.weights(), &[0.25, 0.75]);
    }

    #[test]
    fn decomposition_examples() {
        let p = b(0.5);
        let (good, bad) = mu1().state_conditional(p).unwrap();
        assert!((good.weight_at(0.8) - 0.8).abs() < 1e-15);
        assert!((bad.weight_at(0.2) - 0.8).abs() < 1e-15);

        let (good, bad) = mu2().state_conditional(p).unwrap();
        assert!((good.weight_at(0.6) - 1.0).abs() < 1e-15);
        assert_eq!(good.weight_at(0.0), 0.0);
        assert!((bad.weight_at(0.0) - 1.0 / 3.0).abs() < 1e-15);

        let (good, bad) = BeliefDistribution::degenerate(b(0.3))
            .state_conditional(b(0.3))
            .unwrap();
        assert_eq!(good.weight_at(0.3), 1.0);
        assert_eq!(bad.weight_at(0.3), 1.0);
    }

    #[test]
    fn decomposition_errors() {
        assert!(matches!(
            mu1().state_conditional(b(0.4)),
            Err(BeliefError::NotBayesPlausible { .. })
        ));
        let point = BeliefDistribution::degenerate(b(1.0));
        assert!(matches!(
            point.state_conditional(b(1.0)),
            Err(BeliefError::PriorBoundary(_))
        ));
    }

    // Two conditionally independent binary signals with the given accuracies,
    // enumerated directly.
    fn brute_force_two_signals(prior: f64, post1: f64, post2: f64) -> f64 {
        // A signal that moves belief from `prior` to `post` has likelihood ratio
        // odds(post)/odds(prior); pick P(s|good) = lr * P(s|bad) with P(s|bad) small.
        let odds = |x: f64| x / (1.0 - x);
        let lr1 = odds(post1) / odds(prior);
        let lr2 = odds(post2) / odds(prior);
        let bad1 = 0.1;
        let bad2 = 0.1;
        let joint_good = prior * (lr1 * bad1) * (lr2 * bad2);
        let joint_bad = (1.0 - prior) * bad1 * bad2;
        joint_good / (joint_good + joint_bad)
    }

    #[test]
    fn aggregate_examples() {
        let agg = |r: f64, qs: &[f64]| {
            let qs: Vec<Belief> = qs.iter().map(|&q| b(q)).collect();
            aggregate_posteriors(b(r), &qs).unwrap().value()
        };
        assert!((agg(0.5, &[0.5, 0.5]) - 0.5).abs() < 1e-15);
        assert!((agg(0.5, &[0.8, 0.5]) - 0.8).abs() < 1e-15);
        let oracle = brute_force_two_signals(0.5, 0.8, 0.8);
        assert!((oracle - 16.0 / 17.0).abs() < 1e-12);
        assert!((agg(0.5, &[0.8, 0.8]) - oracle).abs() < 1e-12);
        let oracle = brute_force_two_signals(0.3, 0.6, 0.1);
        assert!((agg(0.3, &[0.6, 0.1]) - oracle).abs() < 1e-12);
    }

    #[test]
    fn aggregate_boundaries() {
        assert_eq!(
            aggregate_posteriors(b(0.4), &[b(0.9), b(1.0)])
                .unwrap()
                .value(),
            1.0
        );
        assert_eq!(
            aggregate_posteriors(b(0.4), &[b(0.0), b(0.7)])
                .unwrap()
                .value(),
            0.0
        );
        assert_eq!(
            aggregate_posteriors(b(0.4), &[b(0.0), b(1.0)]),
            Err(BeliefError::InconsistentEvidence)
        );
    }

    #[test]
    fn aggregate_fixed_point_on_grid() {
        for k in 1..1000 {
            let r = k as f64 / 1000.0;
            let got = aggregate_posteriors(b(r), &[b(r), b(r), b(r)]).unwrap();
            assert!((got.value() - r).abs() < 1e-12, "r = {r}");
        }
    }

    #[test]
    fn convex_order_examples() {
        let full = BeliefDistribution::new(&[0.0, 1.0], &[0.5, 0.5]).unwrap();
        let none = BeliefDistribution::degenerate(b(0.5));
        assert_eq!(
            convex_order_compare(&full, &none),
            Ok(ConvexOrder::Dominates)
        );
        assert_eq!(
            convex_order_compare(&none, &full),
            Ok(ConvexOrder::DominatedBy)
        );
        assert_eq!(
            convex_order_compare(&mu1(), &mu2()),
            Ok(ConvexOrder::Incomparable)
        );
        assert_eq!(convex_order_compare(&mu1(), &mu1()), Ok(ConvexOrder::Equal));
        assert!(matches!(
            convex_order_compare(&mu1(), &BeliefDistribution::degenerate(b(0.4))),
            Err(BeliefError::MeanMismatch(..))
        ));
    }

    #[test]
    fn mu1_mu2_incomparable_on_a_strike_scan() {
        let (mut first_wins, mut second_wins) = (false, false);
        for k in 0..=1000 {
            let t = k as f64 / 1000.0;
            let d = mu1().call_integral(t) - mu2().call_integral(t);
            first_wins |= d > 1e-12;
            second_wins |= d < -1e-12;
        }
        assert!(first_wins && second_wins);
        assert!((mu1().call_integral(0.6) - 0.1).abs() < 1e-15);
        assert!((mu2().call_integral(0.1) - 5.0 / 12.0).abs() < 1e-15);
    }
}
