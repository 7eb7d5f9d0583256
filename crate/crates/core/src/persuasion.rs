//! One-dimensional concavification.
//!
//! Values are tabulated on a uniform grid over [0, 1]. The upper concave
//! envelope of a tabulated function is the upper convex hull of its points,
//! built with a monotone chain in a single pass.

use crate::belief::{Belief, BeliefDistribution};
use crate::preferences::MemberSpec;
use serde::{Deserialize, Serialize};

/// Default number of grid points (step 1e-4).
pub const DEFAULT_GRID_N: usize = 10001;
/// A grid point is in the contact set when the envelope exceeds the function
/// by at most this much.
pub const CONTACT_TOLERANCE: f64 = 1e-10;

/// Values of a function on `n` equally spaced beliefs `0, 1/(n−1), …, 1`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GridFunction {
    values: Vec<f64>,
}

impl GridFunction {
    /// # Panics
    /// If fewer than three values are supplied.
    pub fn from_values(values: Vec<f64>) -> Self {
        assert!(values.len() >= 3, "a grid function needs at least 3 points");
        GridFunction { values }
    }

    pub fn tabulate(n: usize, f: impl Fn(f64) -> f64) -> Self {
        let step = 1.0 / (n - 1) as f64;
        Self::from_values((0..n).map(|k| f(k as f64 * step)).collect())
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn step(&self) -> f64 {
        1.0 / (self.values.len() - 1) as f64
    }

    pub fn x(&self, k: usize) -> f64 {
        k as f64 / (self.values.len() - 1) as f64
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn points(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.values.iter().enumerate().map(|(k, &y)| (self.x(k), y))
    }

    /// Linear interpolation between neighbouring grid points.
    pub fn eval(&self, x: f64) -> f64 {
        let last = self.values.len() - 1;
        let pos = (x.clamp(0.0, 1.0) * last as f64).min(last as f64);
        let k = (pos.floor() as usize).min(last - 1);
        let t = pos - k as f64;
        self.values[k] * (1.0 - t) + self.values[k + 1] * t
    }
}

/// Vertices of the upper convex hull of a point set sorted by abscissa.
#[derive(Debug, Clone, PartialEq)]
pub struct UpperHull {
    vertices: Vec<(f64, f64)>,
}

impl UpperHull {
    pub fn of_grid(f: &GridFunction) -> Self {
        let mut hull: Vec<(f64, f64)> = Vec::with_capacity(f.len());
        for p in f.points() {
            while hull.len() >= 2 {
                let a = hull[hull.len() - 2];
                let b = hull[hull.len() - 1];
                // Drop b unless a → b → p turns clockwise.
                let cross = (b.0 - a.0) * (p.1 - a.1) - (b.1 - a.1) * (p.0 - a.0);
                if cross >= 0.0 {
                    hull.pop();
                } else {
                    break;
                }
            }
            hull.push(p);
        }
        UpperHull { vertices: hull }
    }

    pub fn vertices(&self) -> &[(f64, f64)] {
        &self.vertices
    }

    /// Consecutive hull vertices `(left, right)` with `left.x ≤ x ≤ right.x`.
    pub fn segment(&self, x: f64) -> ((f64, f64), (f64, f64)) {
        let j = self
            .vertices
            .partition_point(|v| v.0 < x)
            .clamp(1, self.vertices.len() - 1);
        (self.vertices[j - 1], self.vertices[j])
    }

    pub fn eval(&self, x: f64) -> f64 {
        let (a, b) = self.segment(x);
        if b.0 == a.0 {
            return a.1.max(b.1);
        }
        a.1 + (b.1 - a.1) * (x - a.0) / (b.0 - a.0)
    }
}

/// Pointwise-smallest concave function above `f` on the grid.
pub fn upper_concave_envelope(f: &GridFunction) -> GridFunction {
    let hull = UpperHull::of_grid(f);
    let values = (0..f.len()).map(|k| hull.eval(f.x(k))).collect();
    GridFunction::from_values(values)
}

/// Value of the concavified function at `prior`.
pub fn concavified_value(value: &GridFunction, prior: f64) -> f64 {
    UpperHull::of_grid(value).eval(prior)
}

/// Sender-optimal belief distribution with mean `prior` against `value`.
///
/// At most two atoms are used. When several binary supports are optimal,
/// the one with the smallest high atom and then the largest low atom wins.
pub fn optimal_signal(value: &GridFunction, prior: Belief) -> BeliefDistribution {
    let p = prior.value();
    let hull = UpperHull::of_grid(value);
    let env = hull.eval(p);
    if env - value.eval(p) <= 1e-12 {
        return BeliefDistribution::degenerate(prior);
    }
    let ((seg_lo, lo_y), (seg_hi, hi_y)) = hull.segment(p);
    let slope = (hi_y - lo_y) / (seg_hi - seg_lo);
    let on_segment = |x: f64, y: f64| lo_y + slope * (x - seg_lo) - y <= CONTACT_TOLERANCE;
    let (mut lo, mut hi) = (seg_lo, seg_hi);

    // Tighten to the contact points nearest the prior.
    let n = value.len() - 1;
    let k_lo = (lo * n as f64).round() as usize;
    let k_hi = (hi * n as f64).round() as usize;
    for k in (k_lo..=k_hi).rev() {
        let x = value.x(k);
        if x <= p && on_segment(x, value.values()[k]) {
            lo = x;
            break;
        }
    }
    for k in k_lo..=k_hi {
        let x = value.x(k);
        if x >= p && on_segment(x, value.values()[k]) {
            hi = x;
            break;
        }
    }
    BeliefDistribution::binary_split(lo, hi, p).expect("prior lies inside its hull segment")
}

/// The beliefs at which a lone decision-maker stops acquiring information.
///
/// Between `q_low` and `q_high` the member runs an experiment whose posteriors are
/// exactly these two beliefs; outside, the member acts on current beliefs.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PersuasionThresholds {
    pub q_low: f64,
    pub q_high: f64,
    /// `1/(1+u)`, always inside `[q_low, q_high]`.
    pub indifference: f64,
    /// The envelope touches the net payoff along a whole interval at one of
    /// the thresholds, so the reported contact points are the innermost of
    /// several optimal choices.
    pub flat_contact: bool,
}

impl PersuasionThresholds {
    pub fn degenerate(at: f64) -> Self {
        PersuasionThresholds {
            q_low: at,
            q_high: at,
            indifference: at,
            flat_contact: false,
        }
    }

    pub fn is_degenerate(&self) -> bool {
        self.q_low == self.q_high
    }

    pub fn is_strict(&self) -> bool {
        self.q_low < self.indifference && self.indifference < self.q_high
    }

    /// Whether a member with interim belief `r` acquires information.
    pub fn acquires_at(&self, r: f64) -> bool {
        self.q_low < r && r < self.q_high
    }
}

/// Net payoff `π̂(q) − c(q)` whose envelope determines the member's experiment.
pub fn net_value(m: &MemberSpec, q: f64) -> f64 {
    m.preferred_payoff(q) - m.kernel.eval(q)
}

// One-sided derivatives of the net payoff. The enactment slope switches on at
// the indifference belief.
fn net_slope_left(m: &MemberSpec, k: f64, q: f64) -> f64 {
    let gain = if q > k { 1.0 + m.u } else { 0.0 };
    gain - m.kernel.slope_left(q)
}

fn net_slope_right(m: &MemberSpec, k: f64, q: f64) -> f64 {
    let gain = if q >= k { 1.0 + m.u } else { 0.0 };
    gain - m.kernel.slope_right(q)
}

/// Contact set of the grid envelope around the indifference belief.
pub fn grid_thresholds(m: &MemberSpec, grid_n: usize) -> (f64, f64) {
    let k = m.indifference_threshold();
    let f = GridFunction::tabulate(grid_n, |q| net_value(m, q));
    let env = upper_concave_envelope(&f);
    let touches = |i: usize| env.values()[i] - f.values()[i] <= CONTACT_TOLERANCE;
    let low = (0..grid_n)
        .rev()
        .find(|&i| f.x(i) <= k && touches(i))
        .map_or(0.0, |i| f.x(i));
    let high = (0..grid_n)
        .find(|&i| f.x(i) >= k && touches(i))
        .map_or(1.0, |i| f.x(i));
    (low, high)
}

/// Persuasion thresholds of a member deciding alone.
///
/// The net payoff is concave on each side of the indifference belief, so the
/// non-contact set of its envelope is a single interval around that belief.
/// The grid pass locates it; the bridging slope is then found by bisection,
/// which pins both contact points well below the grid step.
pub fn persuasion_thresholds(m: &MemberSpec, grid_n: usize) -> PersuasionThresholds {
    let k = m.indifference_threshold();
    if k >= 1.0 {
        return PersuasionThresholds::degenerate(1.0);
    }
    let s_lo = net_slope_left(m, k, k);
    let s_hi = net_slope_right(m, k, k);
    if s_hi - s_lo <= 1e-12 {
        // Concave kink: the net payoff is globally concave.
        return PersuasionThresholds::degenerate(k);
    }

    let (grid_low, grid_high) = grid_thresholds(m, grid_n);

    // Largest left and smallest right maximizers of f(q) − s·q.
    let left_contact = |s: f64| last_where(0.0, k, |q| q == 0.0 || net_slope_left(m, k, q) >= s);
    let right_contact = |s: f64| first_where(k, 1.0, |q| q == 1.0 || net_slope_right(m, k, q) <= s);
    let gap = |s: f64| {
        let (a, b) = (left_contact(s), right_contact(s));
        (net_value(m, a) - s * a) - (net_value(m, b) - s * b)
    };

    // gap is nondecreasing in s, nonpositive at s_lo and nonnegative at s_hi.
    let (mut lo, mut hi) = (s_lo, s_hi);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if gap(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    // Approaching the bridging slope from below (above) gives the innermost
    // left (right) contact point. If a tiny tilt of the slope moves a contact
    // point by a macroscopic distance, the net payoff is affine there.
    let q_low = left_contact(lo);
    let q_high = right_contact(hi);
    let tilt = 1e-9;
    let flat_contact =
        q_low - left_contact(hi + tilt) > 1e-6 || right_contact(lo - tilt) - q_high > 1e-6;

    let step = 1.0 / (grid_n - 1) as f64;
    debug_assert!(
        (q_low - grid_low).abs() <= 2.0 * step + 1e-9 || flat_contact,
        "refined low threshold {q_low} far from grid estimate {grid_low}"
    );
    debug_assert!(
        (q_high - grid_high).abs() <= 2.0 * step + 1e-9 || flat_contact,
        "refined high threshold {q_high} far from grid estimate {grid_high}"
    );

    PersuasionThresholds {
        q_low: q_low.min(k),
        q_high: q_high.max(k),
        indifference: k,
        flat_contact,
    }
}

// Largest x in [lo, hi] with pred(x), given pred(lo) and pred monotone true→false.
fn last_where(lo: f64, hi: f64, pred: impl Fn(f64) -> bool) -> f64 {
    if pred(hi) {
        return hi;
    }
    let (mut a, mut b) = (lo, hi);
    for _ in 0..100 {
        let mid = 0.5 * (a + b);
        if mid <= a || mid >= b {
            break;
        }
        if pred(mid) {
            a = mid;
        } else {
            b = mid;
        }
    }
    a
}

// Smallest x in [lo, hi] with pred(x), given pred(hi) and pred monotone false→true.
fn first_where(lo: f64, hi: f64, pred: impl Fn(f64) -> bool) -> f64 {
    if pred(lo) {
        return lo;
    }
    let (mut a, mut b) = (lo, hi);
    for _ in 0..100 {
        let mid = 0.5 * (a + b);
        if mid <= a || mid >= b {
            break;
        }
        if pred(mid) {
            b = mid;
        } else {
            a = mid;
        }
    }
    b
}
