//! Member payoffs and uniformly posterior-separable information costs.

use crate::belief::{Belief, BeliefDistribution, BeliefError};
use serde::{Deserialize, Serialize};
use std::f64::consts::LN_2;
use thiserror::Error;

/// Payoff comparisons at the indifference belief resolve toward enactment
/// within this slack.
pub const PAYOFF_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PreferenceError {
    #[error("enactment payoff u = {0} must be finite and nonnegative")]
    NegativePayoff(f64),

    #[error("kernel scale {0} must be finite and positive")]
    NonPositiveScale(f64),

    #[error("tabulated kernel: {0}")]
    BadTable(String),

    #[error("committee has no members")]
    EmptyCommittee,

    #[error(transparent)]
    Belief(#[from] BeliefError),
}

/// Convex kernel `c` of a uniformly posterior-separable cost
/// `C(μ) = ∫ c dμ − c(mean μ)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum CostKernel {
    /// `α·q²`
    Quadratic { alpha: f64 },
    /// `α·(q ln q + (1−q) ln(1−q) + ln 2)`, extended continuously to the endpoints.
    ScaledEntropy { alpha: f64 },
    /// `q² + max{0, q(1+u) − 1}`.
    CompositeCounterexample { u: f64 },
    /// Piecewise-linear interpolation through `(q, c(q))` points spanning [0, 1].
    Tabulated { points: Vec<(f64, f64)> },
}

impl CostKernel {
    pub fn validate(&self) -> Result<(), PreferenceError> {
        match self {
            CostKernel::Quadratic { alpha } | CostKernel::ScaledEntropy { alpha } => {
                if alpha.is_finite() && *alpha > 0.0 {
                    Ok(())
                } else {
                    Err(PreferenceError::NonPositiveScale(*alpha))
                }
            }
            CostKernel::CompositeCounterexample { u } => {
                if u.is_finite() && *u >= 0.0 {
                    Ok(())
                } else {
                    Err(PreferenceError::NegativePayoff(*u))
                }
            }
            CostKernel::Tabulated { points } => validate_table(points),
        }
    }

    pub fn eval(&self, q: f64) -> f64 {
        match self {
            CostKernel::Quadratic { alpha } => alpha * q * q,
            CostKernel::ScaledEntropy { alpha } => alpha * (xlnx(q) + xlnx(1.0 - q) + LN_2),
            CostKernel::CompositeCounterexample { u } => q * q + (q * (1.0 + u) - 1.0).max(0.0),
            CostKernel::Tabulated { points } => {
                let i = segment_index(points, q);
                let (x0, y0) = points[i];
                let (x1, y1) = points[i + 1];
                y0 + (y1 - y0) * (q - x0) / (x1 - x0)
            }
        }
    }

    /// Left derivative of `c` at `q`. At `q = 0` this equals the right derivative.
    pub fn slope_left(&self, q: f64) -> f64 {
        match self {
            CostKernel::CompositeCounterexample { u } => {
                let jump = if q > 1.0 / (1.0 + u) { 1.0 + u } else { 0.0 };
                2.0 * q + jump
            }
            CostKernel::Tabulated { points } => {
                let i = if q <= points[0].0 {
                    0
                } else {
                    // Segment ending at or after q.
                    points
                        .iter()
                        .position(|&(x, _)| x >= q)
                        .unwrap_or(points.len() - 1)
                        - 1
                };
                segment_slope(points, i)
            }
            _ => self.smooth_slope(q),
        }
    }

    /// Right derivative of `c` at `q`. At `q = 1` this equals the left derivative.
    pub fn slope_right(&self, q: f64) -> f64 {
        match self {
            CostKernel::CompositeCounterexample { u } => {
                let jump = if q >= 1.0 / (1.0 + u) { 1.0 + u } else { 0.0 };
                2.0 * q + jump
            }
            CostKernel::Tabulated { points } => segment_slope(points, segment_index(points, q)),
            _ => self.smooth_slope(q),
        }
    }

    fn smooth_slope(&self, q: f64) -> f64 {
        match self {
            CostKernel::Quadratic { alpha } => 2.0 * alpha * q,
            // ±∞ at the endpoints.
            CostKernel::ScaledEntropy { alpha } => alpha * (q.ln() - (1.0 - q).ln()),
            _ => unreachable!("kernel has a kink"),
        }
    }

    pub fn is_differentiable(&self) -> bool {
        matches!(
            self,
            CostKernel::Quadratic { .. } | CostKernel::ScaledEntropy { .. }
        )
    }
}

fn xlnx(x: f64) -> f64 {
    if x <= 0.0 {
        0.0
    } else {
        x * x.ln()
    }
}

// Index i of the segment [x_i, x_{i+1}] containing q, preferring the right
// segment at interior knots.
fn segment_index(points: &[(f64, f64)], q: f64) -> usize {
    let last = points.len() - 2;
    match points.iter().rposition(|&(x, _)| x <= q) {
        Some(i) => i.min(last),
        None => 0,
    }
}

fn segment_slope(points: &[(f64, f64)], i: usize) -> f64 {
    let (x0, y0) = points[i];
    let (x1, y1) = points[i + 1];
    (y1 - y0) / (x1 - x0)
}

fn validate_table(points: &[(f64, f64)]) -> Result<(), PreferenceError> {
    let bad = |msg: &str| Err(PreferenceError::BadTable(msg.to_string()));
    if points.len() < 2 {
        return bad("needs at least two points");
    }
    if points[0].0 != 0.0 || points[points.len() - 1].0 != 1.0 {
        return bad("grid must start at 0 and end at 1");
    }
    if points.windows(2).any(|w| w[1].0 <= w[0].0) {
        return bad("grid must be strictly increasing");
    }
    if points.iter().any(|&(_, c)| !c.is_finite() || c < 0.0) {
        return bad("values must be finite and nonnegative");
    }
    // A piecewise-linear function is convex iff its slopes are nondecreasing.
    for i in 1..points.len() - 1 {
        if segment_slope(points, i) < segment_slope(points, i - 1) - 1e-12 {
            return bad("values are not convex");
        }
    }
    Ok(())
}

/// A committee member: the payoff from enacting a good policy and the cost kernel.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MemberSpec {
    pub u: f64,
    pub kernel: CostKernel,
}

impl MemberSpec {
    pub fn new(u: f64, kernel: CostKernel) -> Result<Self, PreferenceError> {
        if !u.is_finite() || u < 0.0 {
            return Err(PreferenceError::NegativePayoff(u));
        }
        kernel.validate()?;
        Ok(MemberSpec { u, kernel })
    }

    pub fn quadratic(u: f64, alpha: f64) -> Result<Self, PreferenceError> {
        Self::new(u, CostKernel::Quadratic { alpha })
    }

    /// A member whose kernel cancels the kink of the member's own preferred payoff.
    pub fn composite(u: f64) -> Result<Self, PreferenceError> {
        Self::new(u, CostKernel::CompositeCounterexample { u })
    }

    /// The belief `1/(1+u)` at which enacting and blocking pay the same.
    pub fn indifference_threshold(&self) -> f64 {
        1.0 / (1.0 + self.u)
    }

    /// Expected payoff from enactment at posterior `q`: `q(1+u) − 1`.
    pub fn enact_payoff(&self, q: f64) -> f64 {
        q * (1.0 + self.u) - 1.0
    }

    pub fn prefers_enact(&self, q: f64) -> bool {
        self.enact_payoff(q) >= -PAYOFF_TOLERANCE
    }

    /// Payoff of the member's preferred decision at `q`.
    pub fn preferred_payoff(&self, q: f64) -> f64 {
        self.enact_payoff(q).max(0.0)
    }

    pub fn info_cost(&self, mu: &BeliefDistribution) -> f64 {
        info_cost(&self.kernel, mu)
    }
}

/// `∫ c dμ − c(mean μ)`, clamped at zero.
pub fn info_cost(kernel: &CostKernel, mu: &BeliefDistribution) -> f64 {
    let raw = mu.expect(|q| kernel.eval(q)) - kernel.eval(mu.mean());
    raw.max(0.0)
}

/// Members sharing a common prior.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Committee {
    members: Vec<MemberSpec>,
    prior: Belief,
}

impl Committee {
    pub fn new(members: Vec<MemberSpec>, prior: f64) -> Result<Self, PreferenceError> {
        if members.is_empty() {
            return Err(PreferenceError::EmptyCommittee);
        }
        let prior = Belief::interior(prior)?;
        Ok(Committee { members, prior })
    }

    pub fn members(&self) -> &[MemberSpec] {
        &self.members
    }

    pub fn member(&self, i: usize) -> Option<&MemberSpec> {
        self.members.get(i)
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn prior(&self) -> Belief {
        self.prior
    }
}
