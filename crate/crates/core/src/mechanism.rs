//! Finite voting mechanisms.
//!
//! Every member chooses from a finite list of votes and the decision rule is
//! a complete table from vote profiles to enactment probabilities. Profiles
//! are enumerated in lexicographic order with the first member most
//! significant.

use serde::{Deserialize, Serialize};
use std::fmt;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MechanismError {
    #[error("no vote profile enacts the policy with certainty")]
    MissingUnanimousEnact,

    #[error("no vote profile blocks the policy with certainty")]
    MissingUnanimousBlock,

    #[error("parameter out of range: {0}")]
    ParameterOutOfRange(String),

    #[error("member {0} has an empty vote set")]
    EmptyVoteSet(usize),

    #[error("decision table has no row for profile {0:?}")]
    IncompleteTable(Vec<String>),

    #[error("decision table lists profile {0:?} twice")]
    DuplicateRow(Vec<String>),

    #[error("unknown vote {vote:?} for member {member}")]
    UnknownVote { member: usize, vote: String },

    #[error("profile {0:?} has the wrong number of votes")]
    ProfileLength(Vec<String>),

    #[error("enactment probability {0} is outside [0, 1]")]
    ProbabilityOutOfRange(f64),
}

/// Standard mechanisms over binary `{no, yes}` votes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum CatalogKind {
    /// Only `member`'s vote counts.
    Dictatorship {
        member: usize,
    },
    /// Enact iff at least `k` members vote yes.
    KMajority {
        k: usize,
    },
    Unanimity,
    /// Enact iff the total weight of yes votes reaches `threshold`.
    WeightedThreshold {
        weights: Vec<f64>,
        threshold: f64,
    },
}

pub const NO: usize = 0;
pub const YES: usize = 1;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VotingMechanism {
    name: String,
    vote_sets: Vec<Vec<String>>,
    table: Vec<f64>,
}

/// Profiles that certify the two validity conditions.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ValidationReport {
    pub enact_witness: Vec<usize>,
    pub block_witness: Vec<usize>,
}

impl VotingMechanism {
    /// Builds a mechanism by evaluating `decision` on every profile.
    pub fn from_fn(
        name: impl Into<String>,
        vote_sets: Vec<Vec<String>>,
        decision: impl Fn(&[usize]) -> f64,
    ) -> Result<Self, MechanismError> {
        check_vote_sets(&vote_sets)?;
        let mut table = Vec::new();
        for profile in Profiles::new(&sizes(&vote_sets)) {
            let d = decision(&profile);
            if !(0.0..=1.0).contains(&d) {
                return Err(MechanismError::ProbabilityOutOfRange(d));
            }
            table.push(d);
        }
        Ok(VotingMechanism {
            name: name.into(),
            vote_sets,
            table,
        })
    }

    /// Builds a mechanism from labelled `(profile, probability)` rows that
    /// must cover every profile exactly once.
    pub fn from_rows(
        name: impl Into<String>,
        vote_sets: Vec<Vec<String>>,
        rows: &[(Vec<String>, f64)],
    ) -> Result<Self, MechanismError> {
        check_vote_sets(&vote_sets)?;
        let sizes = sizes(&vote_sets);
        let total: usize = sizes.iter().product();
        let mut table: Vec<Option<f64>> = vec![None; total];
        for (labels, p) in rows {
            if labels.len() != vote_sets.len() {
                return Err(MechanismError::ProfileLength(labels.clone()));
            }
            if !(0.0..=1.0).contains(p) {
                return Err(MechanismError::ProbabilityOutOfRange(*p));
            }
            let mut profile = Vec::with_capacity(labels.len());
            for (member, label) in labels.iter().enumerate() {
                let v = vote_sets[member]
                    .iter()
                    .position(|x| x == label)
                    .ok_or_else(|| MechanismError::UnknownVote {
                        member,
                        vote: label.clone(),
                    })?;
                profile.push(v);
            }
            let slot = &mut table[flat_index(&sizes, &profile)];
            if slot.is_some() {
                return Err(MechanismError::DuplicateRow(labels.clone()));
            }
            *slot = Some(*p);
        }
        let mut filled = Vec::with_capacity(total);
        for (profile, entry) in Profiles::new(&sizes).zip(&table) {
            match entry {
                Some(p) => filled.push(*p),
                None => {
                    let labels = profile
                        .iter()
                        .enumerate()
                        .map(|(m, &v)| vote_sets[m][v].clone())
                        .collect();
                    return Err(MechanismError::IncompleteTable(labels));
                }
            }
        }
        Ok(VotingMechanism {
            name: name.into(),
            vote_sets,
            table: filled,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn n_members(&self) -> usize {
        self.vote_sets.len()
    }

    pub fn vote_sets(&self) -> &[Vec<String>] {
        &self.vote_sets
    }

    pub fn decision(&self, profile: &[usize]) -> f64 {
        self.table[flat_index(&sizes(&self.vote_sets), profile)]
    }

    pub fn profiles(&self) -> Profiles {
        Profiles::new(&sizes(&self.vote_sets))
    }

    pub fn labels(&self, profile: &[usize]) -> Vec<String> {
        profile
            .iter()
            .enumerate()
            .map(|(m, &v)| self.vote_sets[m][v].clone())
            .collect()
    }

    /// Labelled rows in enumeration order.
    pub fn rows(&self) -> Vec<(Vec<String>, f64)> {
        self.profiles()
            .zip(&self.table)
            .map(|(p, &d)| (self.labels(&p), d))
            .collect()
    }

    /// Checks that some profile enacts with certainty and some blocks with
    /// certainty. Lowest and highest votes always exist for finite vote sets.
    pub fn validate(&self) -> Result<ValidationReport, MechanismError> {
        let enact = self.profiles().find(|p| self.decision(p) == 1.0);
        let block = self.profiles().find(|p| self.decision(p) == 0.0);
        match (enact, block) {
            (None, _) => Err(MechanismError::MissingUnanimousEnact),
            (_, None) => Err(MechanismError::MissingUnanimousBlock),
            (Some(enact_witness), Some(block_witness)) => Ok(ValidationReport {
                enact_witness,
                block_witness,
            }),
        }
    }

    /// Members whose vote can change the decision with everyone else's vote held fixed.
    pub fn influential_members(&self) -> Vec<usize> {
        let sizes = sizes(&self.vote_sets);
        (0..self.n_members())
            .filter(|&i| {
                self.profiles().any(|mut p| {
                    let base = self.decision(&p);
                    (0..sizes[i]).any(|v| {
                        p[i] = v;
                        self.decision(&p) != base
                    })
                })
            })
            .collect()
    }

    /// The member whose vote alone determines the decision, if there is one.
    pub fn is_dictatorship(&self) -> Option<usize> {
        match self.influential_members().as_slice() {
            [i] => Some(*i),
            _ => None,
        }
    }

    /// Lowest and highest enactment probability member `i` can produce when
    /// the others vote `others` (listed in member order, skipping `i`).
    pub fn pivotal_bounds(&self, i: usize, others: &[usize]) -> (f64, f64) {
        assert_eq!(
            others.len() + 1,
            self.n_members(),
            "one vote per other member"
        );
        let mut profile: Vec<usize> = others.to_vec();
        profile.insert(i, 0);
        let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
        for v in 0..self.vote_sets[i].len() {
            profile[i] = v;
            let d = self.decision(&profile);
            lo = lo.min(d);
            hi = hi.max(d);
        }
        (lo, hi)
    }

    /// [`pivotal_bounds`](Self::pivotal_bounds) with the others' votes read
    /// from a full profile.
    pub fn pivotal_bounds_at(&self, i: usize, profile: &[usize]) -> (f64, f64) {
        let others: Vec<usize> = profile
            .iter()
            .enumerate()
            .filter(|&(j, _)| j != i)
            .map(|(_, &v)| v)
            .collect();
        self.pivotal_bounds(i, &others)
    }
}

impl fmt::Display for VotingMechanism {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name)
    }
}

impl CatalogKind {
    pub fn label(&self, n: usize) -> String {
        match self {
            CatalogKind::Dictatorship { member } => format!("dictatorship(m{})", member + 1),
            CatalogKind::KMajority { k } if *k == n => "unanimity".to_string(),
            CatalogKind::KMajority { k } => format!("{k}-majority"),
            CatalogKind::Unanimity => "unanimity".to_string(),
            CatalogKind::WeightedThreshold { weights, threshold } => {
                let w: Vec<String> = weights.iter().map(|w| w.to_string()).collect();
                format!("weighted([{}] >= {threshold})", w.join(","))
            }
        }
    }
}

fn binary_votes(n: usize) -> Vec<Vec<String>> {
    vec![vec!["no".to_string(), "yes".to_string()]; n]
}

fn yes_count(profile: &[usize]) -> usize {
    profile.iter().filter(|&&v| v == YES).count()
}

pub fn make_catalog_mechanism(
    kind: &CatalogKind,
    n: usize,
) -> Result<VotingMechanism, MechanismError> {
    let out_of_range = |msg: String| Err(MechanismError::ParameterOutOfRange(msg));
    if n == 0 {
        return out_of_range("a committee needs at least one member".into());
    }
    let name = kind.label(n);
    match kind {
        CatalogKind::Dictatorship { member } => {
            if *member >= n {
                return out_of_range(format!("dictator {member} with {n} members"));
            }
            let i = *member;
            VotingMechanism::from_fn(
                name,
                binary_votes(n),
                |p| if p[i] == YES { 1.0 } else { 0.0 },
            )
        }
        CatalogKind::KMajority { k } => {
            if *k == 0 || *k > n {
                return out_of_range(format!("k = {k} with {n} members"));
            }
            let k = *k;
            VotingMechanism::from_fn(name, binary_votes(n), |p| {
                if yes_count(p) >= k {
                    1.0
                } else {
                    0.0
                }
            })
        }
        CatalogKind::Unanimity => make_catalog_mechanism(&CatalogKind::KMajority { k: n }, n),
        CatalogKind::WeightedThreshold { weights, threshold } => {
            if weights.len() != n {
                return out_of_range(format!("{} weights for {n} members", weights.len()));
            }
            if weights.iter().any(|w| !w.is_finite() || *w < 0.0) {
                return out_of_range("weights must be finite and nonnegative".into());
            }
            let total: f64 = weights.iter().sum();
            if !(threshold.is_finite() && *threshold > 0.0 && *threshold <= total) {
                return out_of_range(format!("threshold {threshold} outside (0, {total}]"));
            }
            VotingMechanism::from_fn(name, binary_votes(n), |p| {
                let yes: f64 = p
                    .iter()
                    .zip(weights)
                    .filter(|(&v, _)| v == YES)
                    .map(|(_, w)| w)
                    .sum();
                if yes >= *threshold {
                    1.0
                } else {
                    0.0
                }
            })
        }
    }
}

/// Every dictatorship, every k-majority and unanimity for `n` members.
/// The `n`-majority is unanimity and appears once.
pub fn full_catalog(n: usize) -> Vec<CatalogKind> {
    let mut kinds: Vec<CatalogKind> = (0..n)
        .map(|member| CatalogKind::Dictatorship { member })
        .collect();
    kinds.extend((1..n).map(|k| CatalogKind::KMajority { k }));
    kinds.push(CatalogKind::Unanimity);
    kinds
}

fn check_vote_sets(vote_sets: &[Vec<String>]) -> Result<(), MechanismError> {
    if vote_sets.is_empty() {
        return Err(MechanismError::ParameterOutOfRange(
            "a mechanism needs at least one member".into(),
        ));
    }
    match vote_sets.iter().position(|v| v.is_empty()) {
        Some(i) => Err(MechanismError::EmptyVoteSet(i)),
        None => Ok(()),
    }
}

fn sizes(vote_sets: &[Vec<String>]) -> Vec<usize> {
    vote_sets.iter().map(Vec::len).collect()
}

fn flat_index(sizes: &[usize], profile: &[usize]) -> usize {
    profile
        .iter()
        .zip(sizes)
        .fold(0, |acc, (&v, &size)| acc * size + v)
}

/// Iterator over all vote profiles in lexicographic order.
#[derive(Debug, Clone)]
pub struct Profiles {
    sizes: Vec<usize>,
    next: Option<Vec<usize>>,
}

impl Profiles {
    fn new(sizes: &[usize]) -> Self {
        let next = if sizes.iter().all(|&s| s > 0) {
            Some(vec![0; sizes.len()])
        } else {
            None
        };
        Profiles {
            sizes: sizes.to_vec(),
            next,
        }
    }
}

impl Iterator for Profiles {
    type Item = Vec<usize>;

    fn next(&mut self) -> Option<Vec<usize>> {
        let current = self.next.take()?;
        let mut succ = current.clone();
        for i in (0..succ.len()).rev() {
            succ[i] += 1;
            if succ[i] < self.sizes[i] {
                self.next = Some(succ);
                return Some(current);
            }
            succ[i] = 0;
        }
        Some(current)
    }
}
