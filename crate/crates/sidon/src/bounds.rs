//! Exact rational evaluation of diameter and counting bounds.
//!
//! Everything here is computed in arbitrary-precision rational arithmetic;
//! square roots never appear as floats, only as integer-square-root
//! brackets or as squared comparisons. The module covers:
//!
//! - the closed-form diameter floor s_k ≥ k² - 2k^{3/2} + k + √k - 1 and
//!   its inversion into an upper bound on the maximum Sidon subset of
//!   [1, n];
//! - a coarse two-branch certificate for the leading coefficient
//!   (max 1295/648 across branches, both below 1.999);
//! - the five-parameter bound family (τ, α, β, δ, τ₂): a variance branch
//!   and a missing-small-differences branch whose maximum certifies the
//!   leading coefficient 1.99405, with δ available in closed form as the
//!   value balancing the two branches exactly;
//! - per-instance certificates that check the variance inequality chain
//!   and the fragment difference-count identities on concrete sets.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::rational::{big, isqrt, rat};
use crate::set::SidonSet;
use crate::windows::{u_partition, v_statistic, LevelPartition, TrimmedSet, WindowError, WindowProfile};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum BoundsError {
    #[error("invalid parameters: {0}")]
    InvalidParams(&'static str),
    #[error("delta formula denominator is zero at these parameters")]
    SingularDenominator,
    #[error("region vertex (delta, 0) violates tau2 > x + y; need tau2 > delta")]
    VertexOutsideRegion,
    #[error(transparent)]
    Window(#[from] WindowError),
}

/// The bound parameter tuple (τ, α, β, δ, τ₂), validated on construction.
///
/// τ scales the window length T ≈ τk^{3/2}; α and β set the five level
/// thresholds (1±α, 1±αβ around the mean window count); δ splits the
/// argument into the variance branch (y + β²x ≥ β²δ) and the
/// small-differences branch (y + β²x ≤ β²δ); τ₂ scales the shorter window
/// used on the trimmed core.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BoundParams {
    tau: BigRational,
    alpha: BigRational,
    beta: BigRational,
    delta: BigRational,
    tau2: BigRational,
}

impl BoundParams {
    /// Validates τ > 0, α ∈ (0,1), β ∈ (0,1), δ ∈ [0,1/2), τ₂ > 0, and
    /// τ₂ > β²δ (so the short window exceeds the level-1 vertex of the
    /// small-differences region). δ = 0 is admitted as the degenerate
    /// case in which the variance branch keeps no margin.
    pub fn new(
        tau: BigRational,
        alpha: BigRational,
        beta: BigRational,
        delta: BigRational,
        tau2: BigRational,
    ) -> Result<BoundParams, BoundsError> {
        let one = BigRational::one();
        if !tau.is_positive() {
            return Err(BoundsError::InvalidParams("tau must be positive"));
        }
        if !(alpha.is_positive() && alpha < one) {
            return Err(BoundsError::InvalidParams("alpha must lie in (0, 1)"));
        }
        if !(beta.is_positive() && beta < one) {
            return Err(BoundsError::InvalidParams("beta must lie in (0, 1)"));
        }
        if delta.is_negative() || delta >= rat(1, 2) {
            return Err(BoundsError::InvalidParams("delta must lie in [0, 1/2)"));
        }
        if !tau2.is_positive() {
            return Err(BoundsError::InvalidParams("tau2 must be positive"));
        }
        if tau2 <= &(&beta * &beta) * &delta {
            return Err(BoundsError::InvalidParams("tau2 must exceed beta^2 * delta"));
        }
        Ok(BoundParams {
            tau,
            alpha,
            beta,
            delta,
            tau2,
        })
    }

    /// Builds the tuple with δ taken from `delta_formula`, the value that
    /// balances the two branch bounds exactly.
    pub fn with_delta(
        tau: BigRational,
        alpha: BigRational,
        beta: BigRational,
        tau2: BigRational,
    ) -> Result<BoundParams, BoundsError> {
        let delta = delta_formula(&tau, &alpha, &beta, &tau2)?;
        BoundParams::new(tau, alpha, beta, delta, tau2)
    }

    /// The reference point certifying the 1.99405 leading coefficient:
    /// τ = 59/58, α = 80/319, β = 195/356, τ₂ = 51/223, with δ balancing
    /// the branches exactly.
    pub fn reference() -> BoundParams {
        BoundParams::new(
            rat(59, 58),
            rat(80, 319),
            rat(195, 356),
            rat(398_773_753_333_438_270, 2_448_810_518_987_915_261),
            rat(51, 223),
        )
        .expect("reference parameters are valid")
    }

    pub fn tau(&self) -> &BigRational {
        &self.tau
    }

    pub fn alpha(&self) -> &BigRational {
        &self.alpha
    }

    pub fn beta(&self) -> &BigRational {
        &self.beta
    }

    pub fn delta(&self) -> &BigRational {
        &self.delta
    }

    pub fn tau2(&self) -> &BigRational {
        &self.tau2
    }
}

/// The diameter floor in the exact form a - √r with a = k² + k - 1 and
/// r = k(2k-1)², which equals k² - 2k^{3/2} + k + √k - 1.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DiameterBound {
    anchor: BigInt,
    radicand: BigInt,
}

impl DiameterBound {
    /// The pair (a, r) with the bound equal to a - √r.
    pub fn components(&self) -> (&BigInt, &BigInt) {
        (&self.anchor, &self.radicand)
    }

    /// Smallest integer not below the bound: a - ⌊√r⌋.
    pub fn ceil(&self) -> BigInt {
        &self.anchor - isqrt(&self.radicand)
    }

    /// Whether d ≥ a - √r, decided exactly: either a - d ≤ 0, or
    /// (a - d)² ≤ r.
    pub fn holds_for(&self, d: &BigInt) -> bool {
        let gap = &self.anchor - d;
        !gap.is_positive() || &gap * &gap <= self.radicand
    }
}

/// The closed-form floor on the diameter of any k-element Sidon set.
pub fn diameter_lower_bound(k: u64) -> DiameterBound {
    assert!(k >= 1, "bound needs k >= 1");
    let k = BigInt::from(k);
    let anchor = &k * &k + &k - 1;
    let edge = big(2) * &k - 1;
    let radicand = &k * &edge * &edge;
    DiameterBound { anchor, radicand }
}

/// Largest k for which `pred` holds, where `pred` is true on a prefix
/// 1..=k of the positive integers and true at 1.
fn largest_satisfying(pred: impl Fn(u64) -> bool) -> u64 {
    debug_assert!(pred(1));
    let mut hi = 2u64;
    while pred(hi) {
        hi *= 2;
    }
    let mut lo = hi / 2;
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        if pred(mid) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    lo
}

/// Upper bound on the size of a Sidon set contained in [1, n]: the
/// largest k whose diameter floor fits in n - 1, capped by the largest k
/// with k < √n + n^{1/4} + 1/2 (both decided in exact integer
/// arithmetic; the cap, being the weaker corollary of the floor, never
/// undercuts the inversion by more than rounding).
pub fn r2_upper_bound(n: u64) -> u64 {
    assert!(n >= 1, "bound needs n >= 1");
    let target = BigInt::from(n) - 1;
    let inversion = largest_satisfying(|k| diameter_lower_bound(k).holds_for(&target));
    // k < √n + n^{1/4} + 1/2 with L = 2k - 1 becomes L < 2√n + 2n^{1/4}:
    // true outright when L² ≤ 4n, else square twice.
    let cap = largest_satisfying(|k| {
        let l = BigInt::from(2) * BigInt::from(k) - 1;
        let l2 = &l * &l;
        let n4 = BigInt::from(4) * BigInt::from(n);
        if l2 <= n4 {
            return true;
        }
        let lhs = &l2 + &n4;
        let lp1 = &l + BigInt::one();
        &lhs * &lhs < BigInt::from(16) * &lp1 * &lp1 * BigInt::from(n)
    });
    debug_assert!(
        inversion <= cap && cap <= inversion + 1,
        "cap and inversion diverged at n={n}: {inversion} vs {cap}"
    );
    inversion.min(cap)
}

/// The two branches of the coarse three-level argument (levels 8/9 and
/// 10/9 around the mean, T = k^{3/2}, trimmed window (3/8)T).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoarseBound {
    /// Variance branch: 2 - 1/648.
    pub variance_branch: BigRational,
    /// Missing-small-differences branch: the linear form
    /// (6734/729)u₁ - 2u₂ + 6361/1944 at its extremal point
    /// (u₁, u₂) = (1/16, 15/16).
    pub smalls_branch: BigRational,
}

impl CoarseBound {
    /// The certified coefficient: the worse (larger) branch.
    pub fn worst(&self) -> &BigRational {
        if self.variance_branch >= self.smalls_branch {
            &self.variance_branch
        } else {
            &self.smalls_branch
        }
    }
}

/// Evaluates both branches of the coarse argument exactly.
pub fn coarse_bound() -> CoarseBound {
    let variance_branch = rat(2, 1) - rat(1, 648);
    let u1 = rat(1, 16);
    let u2 = rat(15, 16);
    let smalls_branch = rat(6734, 729) * u1 - rat(2, 1) * u2 + rat(6361, 1944);
    CoarseBound {
        variance_branch,
        smalls_branch,
    }
}

/// The δ that makes the variance branch equal the small-differences
/// branch exactly:
///
/// δ = -τ₂(-2α²β²τ² + 4αβτ²τ₂ + 4αβτ² + τ²τ₂² + τ²τ₂ - 2τ² - τ₂ + 1)
///     / (2τ²(α²β²τ₂² + α²β² - α² - 2αβ + 2α + τ₂²)).
pub fn delta_formula(
    tau: &BigRational,
    alpha: &BigRational,
    beta: &BigRational,
    tau2: &BigRational,
) -> Result<BigRational, BoundsError> {
    let t2 = tau * tau;
    let a2 = alpha * alpha;
    let b2 = beta * beta;
    let s2 = tau2 * tau2;
    let ab = alpha * beta;
    let numerator = -(tau2
        * (-rat(2, 1) * &a2 * &b2 * &t2
            + rat(4, 1) * &ab * &t2 * tau2
            + rat(4, 1) * &ab * &t2
            + &t2 * &s2
            + &t2 * tau2
            - rat(2, 1) * &t2
            - tau2
            + BigRational::one()));
    let denominator =
        rat(2, 1) * &t2 * (&a2 * &b2 * &s2 + &a2 * &b2 - &a2 - rat(2, 1) * &ab + rat(2, 1) * alpha + &s2);
    if denominator.is_zero() {
        return Err(BoundsError::SingularDenominator);
    }
    Ok(numerator / denominator)
}

/// Variance-branch coefficient: τ + 1/τ - 2α²β²δτ.
pub fn variance_bound(params: &BoundParams) -> BigRational {
    let tau = &params.tau;
    let ab = &params.alpha * &params.beta;
    tau + tau.recip() - rat(2, 1) * &ab * &ab * &params.delta * tau
}

/// The linear form w(x, y) bounding the weighted count of small
/// differences missing from the trimmed core, w = c₀ + c_y·y + c_x·x.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WForm {
    /// τ₂(1 - αβ)².
    pub constant: BigRational,
    /// -(1 - α)(1 + α - 2αβ).
    pub y_coefficient: BigRational,
    /// -α(1 - β)(2 - α - αβ).
    pub x_coefficient: BigRational,
}

impl WForm {
    pub fn eval(&self, x: &BigRational, y: &BigRational) -> BigRational {
        &self.constant + &self.y_coefficient * y + &self.x_coefficient * x
    }
}

/// The coefficients of w(x, y) at the given parameters.
pub fn w_form(params: &BoundParams) -> WForm {
    let a = &params.alpha;
    let b = &params.beta;
    let one = BigRational::one();
    let ab = a * b;
    let constant = &params.tau2 * (&one - &ab) * (&one - &ab);
    let y_coefficient = -((&one - a) * (&one + a - rat(2, 1) * &ab));
    let x_coefficient = -(a * (&one - b) * (rat(2, 1) - a - &ab));
    WForm {
        constant,
        y_coefficient,
        x_coefficient,
    }
}

/// Which vertex of the region {x ≥ 0, y ≥ 0, y + β²x ≤ β²δ} attains the
/// maximum of the small-differences branch form.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Vertex {
    /// (x, y) = (δ, 0).
    XAxis,
    /// (x, y) = (0, β²δ).
    YAxis,
}

/// Small-differences branch evaluated at both nontrivial region vertices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SmallsBound {
    pub at_x_vertex: BigRational,
    pub at_y_vertex: BigRational,
    /// max of the two vertex values.
    pub value: BigRational,
    pub vertex: Vertex,
}

/// The branch form ττ₂ - 2τ(1 - x - y) + 2μ + 1/(ττ₂) - 2τw(x,y)/τ₂²
/// with μ = 2(1 + αβ)τ.
fn smalls_form(params: &BoundParams, w: &WForm, x: &BigRational, y: &BigRational) -> BigRational {
    let tau = &params.tau;
    let tau2 = &params.tau2;
    let one = BigRational::one();
    let mu = rat(2, 1) * (&one + &params.alpha * &params.beta) * tau;
    tau * tau2 - rat(2, 1) * tau * (&one - x - y) + rat(2, 1) * mu + (tau * tau2).recip()
        - rat(2, 1) * tau * w.eval(x, y) / (tau2 * tau2)
}

/// Closed form of the branch at the vertex (0, β²δ).
fn smalls_closed_y_vertex(params: &BoundParams) -> BigRational {
    let (t, a, b, d, s) = (
        &params.tau,
        &params.alpha,
        &params.beta,
        &params.delta,
        &params.tau2,
    );
    let one = BigRational::one();
    let t2 = t * t;
    let s2 = s * s;
    let b2 = b * b;
    let ab = a * b;
    let inner = rat(2, 1) * &s2 * (rat(2, 1) * &ab + &b2 * d + &one)
        + rat(2, 1) * (a - &one) * &b2 * d * (a * (rat(2, 1) * b - &one) - &one)
        - rat(2, 1) * s * (&ab - &one) * (&ab - &one)
        + &s2 * s;
    (&t2 * inner + s) / (t * &s2)
}

/// Closed form of the branch at the vertex (δ, 0).
fn smalls_closed_x_vertex(params: &BoundParams) -> BigRational {
    let (t, a, b, d, s) = (
        &params.tau,
        &params.alpha,
        &params.beta,
        &params.delta,
        &params.tau2,
    );
    let t2 = t * t;
    let s2 = s * s;
    let a2 = a * a;
    let b2 = b * b;
    let ab = a * b;
    let num = rat(2, 1) * &a2 * &b2 * d * &t2 - rat(2, 1) * &a2 * &b2 * &t2 * s
        - rat(2, 1) * &a2 * d * &t2
        - rat(4, 1) * &ab * d * &t2
        + rat(4, 1) * &ab * &t2 * &s2
        + rat(4, 1) * &ab * &t2 * s
        + rat(4, 1) * a * d * &t2
        + rat(2, 1) * d * &t2 * &s2
        + &t2 * &s2 * s
        + rat(2, 1) * &t2 * &s2
        - rat(2, 1) * &t2 * s
        + s;
    num / (t * &s2)
}

/// Maximizes the small-differences branch form over the region
/// {x ≥ 0, y ≥ 0, y + β²x ≤ β²δ}. The form is strictly increasing in
/// both x and y, so the maximum sits at one of the two nontrivial
/// vertices (δ, 0) and (0, β²δ); both are evaluated, each cross-checked
/// against an independently derived closed form, and the larger kept.
///
/// The branch needs the short window to exceed the span x + y at the
/// evaluation point. The largest span over the region is δ (at the
/// x-axis vertex), so τ₂ > δ is required; τ₂ > β²δ for the other vertex
/// is already a construction invariant of `BoundParams`.
pub fn smalls_bound(params: &BoundParams) -> Result<SmallsBound, BoundsError> {
    if params.tau2 <= params.delta {
        return Err(BoundsError::VertexOutsideRegion);
    }
    let w = w_form(params);
    let zero = BigRational::zero();
    let b2d = &(&params.beta * &params.beta) * &params.delta;

    let at_x_vertex = smalls_form(params, &w, &params.delta, &zero);
    assert_eq!(
        at_x_vertex,
        smalls_closed_x_vertex(params),
        "x-vertex closed form disagrees with the branch form"
    );
    let at_y_vertex = smalls_form(params, &w, &zero, &b2d);
    assert_eq!(
        at_y_vertex,
        smalls_closed_y_vertex(params),
        "y-vertex closed form disagrees with the branch form"
    );

    let (value, vertex) = if at_x_vertex >= at_y_vertex {
        (at_x_vertex.clone(), Vertex::XAxis)
    } else {
        (at_y_vertex.clone(), Vertex::YAxis)
    };
    Ok(SmallsBound {
        at_x_vertex,
        at_y_vertex,
        value,
        vertex,
    })
}

/// Both branch bounds and their maximum, with the auxiliary quantities a
/// report reader needs to audit them.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BoundReport {
    pub variance: BigRational,
    pub smalls: SmallsBound,
    /// max(variance, smalls.value): certified for every Sidon set, since
    /// every set falls into one branch or the other.
    pub combined: BigRational,
    pub w: WForm,
    /// 2(1 + αβ)τ, the trimmed-core deficit coefficient.
    pub mu_bound: BigRational,
}

/// Evaluates both branches at the given parameters.
pub fn combined_bound(params: &BoundParams) -> Result<BoundReport, BoundsError> {
    let variance = variance_bound(params);
    let smalls = smalls_bound(params)?;
    let combined = variance.clone().max(smalls.value.clone());
    let w = w_form(params);
    let mu_bound = rat(2, 1) * (BigRational::one() + &params.alpha * &params.beta) * &params.tau;
    Ok(BoundReport {
        variance,
        smalls,
        combined,
        w,
        mu_bound,
    })
}

/// Per-instance check of the variance inequality chain on measured data:
///
///   V ≥ 2Σ_{j≤T}(s_j - Ā)²  (needs disjoint edge windows, 2T ≤ N)
///     ≥ 2α²Ā²T(y + β²x)      (level membership)
///     ≥ 2α²τ²(y + β²x)kT     (needs Ā ≥ τ√k, i.e. kT² ≥ τ²N²)
///
/// All quantities are reported so a failed link is visible;
/// `certified` demands the hypothesis y + β²x ≥ β²δ, disjoint edge
/// windows, and that the measured V dominates both the folded sum and
/// the final scaled lower bound (which can hold even when Ā < τ√k).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VarianceCertificate {
    pub x: BigRational,
    pub y: BigRational,
    /// y + β²x ≥ β²δ.
    pub hypothesis_holds: bool,
    /// 2T ≤ N, so the left and right edge windows are disjoint.
    pub folding_applies: bool,
    /// kT² ≥ τ²N², i.e. the mean window count is at least τ√k.
    pub average_large_enough: bool,
    pub v_measured: BigRational,
    /// 2Σ_{j≤T}(s_j - Ā)².
    pub folded_sum: BigRational,
    /// 2α²Ā²T(y + β²x).
    pub band_lower: BigRational,
    /// 2α²τ²(y + β²x)kT.
    pub scaled_lower: BigRational,
    pub certified: bool,
}

/// Measures a set's window profile and checks the variance chain.
pub fn variance_certificate(
    set: &SidonSet,
    t: u64,
    params: &BoundParams,
) -> Result<VarianceCertificate, BoundsError> {
    let profile = WindowProfile::new(set, t)?;
    let partition = u_partition(set, t, &params.alpha, &params.beta)?;
    let v_measured = v_statistic(&profile);
    let mean = profile.mean();
    let n = profile.n();
    let k = set.k() as i128;

    let x = partition.x.clone();
    let y = partition.y.clone();
    let b2 = &params.beta * &params.beta;
    let weight = &y + &b2 * &x;
    let hypothesis_holds = weight >= &b2 * &params.delta;
    let folding_applies = 2 * t <= n;
    // kT² ≥ τ²N² compared exactly.
    let average_large_enough =
        rat(k, 1) * rat(t as i128, 1) * rat(t as i128, 1) >= &params.tau * &params.tau * rat(n as i128, 1) * rat(n as i128, 1);

    let folded_sum = partition
        .twice_symmetrized
        .iter()
        .map(|&tw| {
            let s = rat(tw as i128, 2);
            let dev = &s - &mean;
            &dev * &dev
        })
        .sum::<BigRational>()
        * rat(2, 1);
    let a2 = &params.alpha * &params.alpha;
    let band_lower = rat(2, 1) * &a2 * &mean * &mean * rat(t as i128, 1) * &weight;
    let scaled_lower =
        rat(2, 1) * &a2 * &params.tau * &params.tau * &weight * rat(k, 1) * rat(t as i128, 1);

    let certified = hypothesis_holds
        && folding_applies
        && v_measured >= folded_sum
        && folded_sum >= band_lower
        && v_measured >= scaled_lower;
    Ok(VarianceCertificate {
        x,
        y,
        hypothesis_holds,
        folding_applies,
        average_large_enough,
        v_measured,
        folded_sum,
        band_lower,
        scaled_lower,
        certified,
    })
}

/// Exact difference counts of the trimmed-off fragments. Every fragment
/// is a subset of a Sidon set, so a fragment X contributes exactly
/// C(|X|, 2) distinct differences; counts are paired with the level
/// caps on how large those differences can be.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FragmentCounts {
    /// C(|L₁|,2) + C(|R₁|,2): differences within the outermost fragments.
    pub level1_count: u64,
    /// C(|L₂|,2) + C(|R₂|,2).
    pub level2_count: u64,
    /// C(|L₁|+|L₂|,2) + C(|R₁|+|R₂|,2): each side's union is again a
    /// Sidon subset, so the identity applies to it whole.
    pub combined_count: u64,
    /// Largest difference that actually occurs within level-1 fragments.
    pub level1_max_diff: u64,
    pub level2_max_diff: u64,
    pub combined_max_diff: u64,
    /// Level-1 differences are confined to yT.
    pub level1_cap: BigRational,
    /// Level-2 differences are confined to xT.
    pub level2_cap: BigRational,
    /// Union differences are confined to (x + y)T.
    pub combined_cap: BigRational,
}

fn choose2(n: usize) -> u64 {
    let n = n as u64;
    n * n.saturating_sub(1) / 2
}

fn span(parts: &[&[u64]]) -> u64 {
    let mut lo = u64::MAX;
    let mut hi = 0u64;
    let mut any = false;
    for part in parts {
        if let (Some(&first), Some(&last)) = (part.first(), part.last()) {
            lo = lo.min(first);
            hi = hi.max(last);
            any = true;
        }
    }
    if any {
        hi - lo
    } else {
        0
    }
}

/// Counts the differences contributed by the trimmed fragments and the
/// caps they must respect.
pub fn fragment_difference_counts(
    trimmed: &TrimmedSet,
    partition: &LevelPartition,
) -> FragmentCounts {
    let t = rat(partition.t as i128, 1);
    let level1_cap = &partition.y * &t;
    let level2_cap = &partition.x * &t;
    let combined_cap = (&partition.x + &partition.y) * &t;
    FragmentCounts {
        level1_count: choose2(trimmed.l1.len()) + choose2(trimmed.r1.len()),
        level2_count: choose2(trimmed.l2.len()) + choose2(trimmed.r2.len()),
        combined_count: choose2(trimmed.l1.len() + trimmed.l2.len())
            + choose2(trimmed.r1.len() + trimmed.r2.len()),
        level1_max_diff: span(&[&trimmed.l1]).max(span(&[&trimmed.r1])),
        level2_max_diff: span(&[&trimmed.l2]).max(span(&[&trimmed.r2])),
        combined_max_diff: span(&[&trimmed.l1, &trimmed.l2])
            .max(span(&[&trimmed.r1, &trimmed.r2])),
        level1_cap,
        level2_cap,
        combined_cap,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::parse_rational;
    use crate::set::{diameter_floor, exhaustive_optimal, greedy_sidon, SearchBudget};
    use crate::windows::trim;

    fn reference_target() -> BigRational {
        parse_rational("3869247756486775922024264545/1940405707787319054606925942").unwrap()
    }

    #[test]
    fn diameter_bound_fixed_values() {
        for (k, want) in [(1u64, 0i64), (2, 1), (3, 3), (4, 5), (8, 29), (9, 38)] {
            assert_eq!(diameter_lower_bound(k).ceil(), big(want as i128), "k={k}");
        }
        // agrees with the prune floor used by the exhaustive search
        for k in 1..=200u64 {
            assert_eq!(
                diameter_lower_bound(k).ceil(),
                big(diameter_floor(k) as i128),
                "k={k}"
            );
        }
    }

    #[test]
    fn diameter_bound_exact_comparisons() {
        // s_1..s_8; equality at k=1
        let s = [0u64, 1, 3, 6, 11, 17, 25, 34];
        for (i, &d) in s.iter().enumerate() {
            let k = (i + 1) as u64;
            assert!(diameter_lower_bound(k).holds_for(&big(d as i128)), "k={k}");
        }
        let b4 = diameter_lower_bound(4);
        assert!(!b4.holds_for(&big(4)));
        assert!(b4.holds_for(&big(5)));
        let b1 = diameter_lower_bound(1);
        assert!(b1.holds_for(&big(0)));
        assert!(!b1.holds_for(&big(-1)));
    }

    #[test]
    fn r2_bound_fixed_values_and_oracle() {
        assert_eq!(r2_upper_bound(1), 1);
        assert_eq!(r2_upper_bound(7), 4);
        assert_eq!(r2_upper_bound(12), 5);
        assert_eq!(r2_upper_bound(10_000), 110);

        // never undercuts the true maximum size, known exactly from the
        // minimal diameters s_1..s_8
        let s = [0u64, 1, 3, 6, 11, 17, 25, 34];
        for n in 1..=35u64 {
            let truth = s.iter().filter(|&&d| d <= n - 1).count() as u64;
            assert!(r2_upper_bound(n) >= truth, "n={n}");
        }
    }

    #[test]
    fn coarse_bound_branches() {
        let coarse = coarse_bound();
        assert_eq!(coarse.smalls_branch, rat(11_515, 5_832));
        assert_eq!(coarse.variance_branch, rat(1_295, 648));
        assert!(coarse.smalls_branch < rat(1_999, 1_000));
        assert!(coarse.variance_branch < rat(1_999, 1_000));
        assert_eq!(coarse.worst(), &rat(1_295, 648));
    }

    #[test]
    fn delta_formula_reference_and_edge_cases() {
        let d = delta_formula(&rat(59, 58), &rat(80, 319), &rat(195, 356), &rat(51, 223)).unwrap();
        assert_eq!(d, rat(398_773_753_333_438_270, 2_448_810_518_987_915_261));

        // tau2 = 0 zeroes the numerator while the denominator survives
        let zero = delta_formula(&rat(1, 1), &rat(1, 2), &rat(1, 2), &rat(0, 1)).unwrap();
        assert!(zero.is_zero());

        // alpha = 0 with tau2 = 0 kills the denominator
        assert_eq!(
            delta_formula(&rat(1, 1), &rat(0, 1), &rat(1, 2), &rat(0, 1)),
            Err(BoundsError::SingularDenominator)
        );
    }

    #[test]
    fn params_validation() {
        let ok = BoundParams::new(rat(1, 1), rat(1, 2), rat(1, 2), rat(1, 4), rat(1, 1));
        assert!(ok.is_ok());
        // delta = 0 is the degenerate-but-legal case
        assert!(BoundParams::new(rat(1, 1), rat(1, 2), rat(1, 2), rat(0, 1), rat(1, 1)).is_ok());
        for (tau, alpha, beta, delta, tau2) in [
            (rat(0, 1), rat(1, 2), rat(1, 2), rat(1, 4), rat(1, 1)),
            (rat(1, 1), rat(1, 1), rat(1, 2), rat(1, 4), rat(1, 1)),
            (rat(1, 1), rat(1, 2), rat(-1, 2), rat(1, 4), rat(1, 1)),
            (rat(1, 1), rat(1, 2), rat(1, 2), rat(1, 2), rat(1, 1)),
            (rat(1, 1), rat(1, 2), rat(1, 2), rat(1, 4), rat(0, 1)),
            // tau2 <= beta^2 delta
            (rat(1, 1), rat(1, 2), rat(1, 2), rat(1, 4), rat(1, 16)),
        ] {
            assert!(matches!(
                BoundParams::new(tau, alpha, beta, delta, tau2),
                Err(BoundsError::InvalidParams(_))
            ));
        }
    }

    #[test]
    fn variance_bound_values() {
        assert_eq!(variance_bound(&BoundParams::reference()), reference_target());

        // delta = 0 leaves tau + 1/tau
        let p = BoundParams::new(rat(59, 58), rat(1, 2), rat(1, 2), rat(0, 1), rat(1, 1)).unwrap();
        assert_eq!(variance_bound(&p), rat(59, 58) + rat(58, 59));

        let p = BoundParams::new(rat(1, 1), rat(1, 2), rat(1, 2), rat(1, 4), rat(1, 1)).unwrap();
        assert_eq!(variance_bound(&p), rat(63, 32));
    }

    #[test]
    fn variance_bound_strictly_decreasing_in_delta() {
        let base = BoundParams::reference();
        let smaller = BoundParams::new(
            base.tau().clone(),
            base.alpha().clone(),
            base.beta().clone(),
            base.delta() - rat(1, 1_000_000_000_000_000_000),
            base.tau2().clone(),
        )
        .unwrap();
        assert!(variance_bound(&smaller) > variance_bound(&base));
    }

    #[test]
    fn w_coefficients_at_reference() {
        let w = w_form(&BoundParams::reference());
        assert_eq!(w.constant, rat(30_590_263_131, 179_748_900_463));
        assert_eq!(w.y_coefficient, rat(-6_622_929, 9_056_729));
        assert_eq!(w.x_coefficient, rat(-5_081_160, 27_794_789));
        assert_eq!(
            w.eval(&BigRational::zero(), &BigRational::zero()),
            w.constant
        );
    }

    #[test]
    fn smalls_bound_reference_point() {
        let s = smalls_bound(&BoundParams::reference()).unwrap();
        assert_eq!(s.value, reference_target());
        assert_eq!(s.vertex, Vertex::XAxis);
        assert_eq!(s.at_x_vertex, reference_target());
        assert_eq!(
            s.at_y_vertex,
            parse_rational(
                "35123381037384186441620695479715/17615003015293282377721673701476"
            )
            .unwrap()
        );
        assert!(s.at_y_vertex < s.at_x_vertex);
    }

    #[test]
    fn smalls_bound_region_check() {
        // valid params (tau2 > beta^2 delta) but tau2 <= delta
        let p = BoundParams::new(rat(1, 1), rat(1, 2), rat(1, 2), rat(2, 5), rat(1, 5)).unwrap();
        assert_eq!(smalls_bound(&p), Err(BoundsError::VertexOutsideRegion));

        // delta = 0 collapses the region to the origin; both vertex
        // values coincide there
        let p = BoundParams::new(rat(1, 1), rat(1, 2), rat(1, 2), rat(0, 1), rat(1, 2)).unwrap();
        let s = smalls_bound(&p).unwrap();
        assert_eq!(s.at_x_vertex, s.at_y_vertex);
    }

    #[test]
    fn combined_bound_reference_and_perturbed() {
        let report = combined_bound(&BoundParams::reference()).unwrap();
        assert_eq!(report.variance, report.smalls.value);
        assert_eq!(report.combined, reference_target());
        assert!(report.combined <= rat(199_405, 100_000));
        assert!(&report.combined / rat(2, 1) <= rat(997_025, 1_000_000));
        assert_eq!(
            report.mu_bound,
            rat(2, 1) * (BigRational::one() + rat(80, 319) * rat(195, 356)) * rat(59, 58)
        );
        assert_eq!(report.mu_bound, rat(1_905_169, 823_339));

        // perturbing delta breaks the balance: variance shrinks, the
        // small-differences branch grows, and combined = max
        let base = BoundParams::reference();
        let perturbed = BoundParams::new(
            base.tau().clone(),
            base.alpha().clone(),
            base.beta().clone(),
            base.delta() + rat(1, 1_000_000_000_000_000_000),
            base.tau2().clone(),
        )
        .unwrap();
        let report = combined_bound(&perturbed).unwrap();
        assert!(report.variance < report.smalls.value);
        assert_eq!(report.combined, report.smalls.value);
    }

    #[test]
    fn balance_property_via_with_delta() {
        let p = BoundParams::with_delta(rat(59, 58), rat(80, 319), rat(195, 356), rat(51, 223))
            .unwrap();
        assert_eq!(p.delta(), BoundParams::reference().delta());
        let report = combined_bound(&p).unwrap();
        assert_eq!(report.variance, report.smalls.value);
    }

    #[test]
    fn certificate_on_constant_profile_set() {
        // {0, 5} with T = 5 has every symmetrized count equal to the
        // mean, so x = y = 0 and the branch hypothesis fails.
        let set = SidonSet::normalize(&[0, 5]).unwrap();
        let cert = variance_certificate(&set, 5, &BoundParams::reference()).unwrap();
        assert!(cert.x.is_zero());
        assert!(cert.y.is_zero());
        assert!(!cert.hypothesis_holds);
        assert!(!cert.certified);
    }

    #[test]
    fn certificate_on_greedy_set() {
        // k = 40, T = ceil(tau k^{3/2}) = 258 at the reference tau
        let set = greedy_sidon(40);
        let cert = variance_certificate(&set, 258, &BoundParams::reference()).unwrap();
        assert!(cert.hypothesis_holds);
        assert!(cert.folding_applies);
        // greedy sets are far sparser than the k² - T regime, so the
        // mean window count falls short of tau sqrt(k)...
        assert!(!cert.average_large_enough);
        // ...yet the measured variance dominates the full chain anyway
        assert!(cert.certified);
        assert!(cert.v_measured >= cert.scaled_lower);
    }

    #[test]
    fn certificate_on_two_level_set() {
        // {0, 1, 16} with T = 8: the symmetrized profile takes exactly
        // two values, 1 (= the mean, one index) and 3/2 (seven indices,
        // deviation 1/2). With alpha = 12/25 the outer level cutoff
        // alpha*mean = 12/25 sits just below the actual deviation, so
        // the level bound on the folded sum is tight to within
        // (deviation / cutoff)^2 = (25/24)^2, about 8.5 percent.
        let set = SidonSet::normalize(&[0, 1, 16]).unwrap();
        let params =
            BoundParams::new(rat(1, 2), rat(12, 25), rat(1, 2), rat(1, 4), rat(1, 2)).unwrap();
        let cert = variance_certificate(&set, 8, &params).unwrap();
        assert!(cert.x.is_zero());
        assert_eq!(cert.y, rat(7, 8));
        assert!(cert.hypothesis_holds);
        assert!(cert.folding_applies);
        // kT^2 = 192 >= tau^2 N^2 = 144
        assert!(cert.average_large_enough);
        assert_eq!(cert.folded_sum, rat(7, 2));
        assert_eq!(cert.band_lower, rat(2_016, 625));
        assert_eq!(cert.scaled_lower, rat(1_512, 625));
        assert!(cert.certified);
        // tightness of the level bound on this profile
        assert!(&cert.folded_sum * rat(4_032, 4_375) == cert.band_lower);
    }

    #[test]
    fn fragment_counts_small_example() {
        // the worked {0,1,3,7} example: l1 = {0}, r1 = {7}, l2 = r2 = {}
        let set = SidonSet::normalize(&[0, 1, 3, 7]).unwrap();
        let partition = u_partition(&set, 5, &rat(1, 4), &rat(1, 2)).unwrap();
        let trimmed = trim(&set, &partition).unwrap();
        let counts = fragment_difference_counts(&trimmed, &partition);
        assert_eq!(counts.level1_count, 0);
        assert_eq!(counts.level2_count, 0);
        assert_eq!(counts.combined_count, 0);
        assert_eq!(counts.level1_cap, rat(2, 5) * rat(5, 1));
        assert_eq!(counts.level2_cap, rat(1, 5) * rat(5, 1));
        assert_eq!(counts.combined_cap, rat(3, 1));
    }

    #[test]
    fn fragment_counts_match_brute_force() {
        use std::collections::HashSet;
        let (_, set) = exhaustive_optimal(8, &SearchBudget::default()).unwrap();
        let partition = u_partition(&set, 6, &rat(1, 3), &rat(1, 2)).unwrap();
        let Ok(trimmed) = trim(&set, &partition) else {
            panic!("trim failed on s_8 witness");
        };
        let counts = fragment_difference_counts(&trimmed, &partition);

        let diffs = |parts: &[&Vec<u64>]| -> HashSet<u64> {
            let mut all: Vec<u64> = parts.iter().flat_map(|p| p.iter().copied()).collect();
            all.sort_unstable();
            let mut out = HashSet::new();
            for (i, &a) in all.iter().enumerate() {
                for &b in &all[i + 1..] {
                    out.insert(b - a);
                }
            }
            out
        };
        let level1 = diffs(&[&trimmed.l1])
            .len()
            .checked_add(diffs(&[&trimmed.r1]).len())
            .unwrap() as u64;
        assert_eq!(counts.level1_count, level1);
        let combined_left = diffs(&[&trimmed.l1, &trimmed.l2]);
        let combined_right = diffs(&[&trimmed.r1, &trimmed.r2]);
        assert_eq!(
            counts.combined_count,
            (combined_left.len() + combined_right.len()) as u64
        );
        // measured extremes respect the level caps
        if counts.level1_count > 0 {
            assert!(rat(counts.level1_max_diff as i128, 1) < counts.level1_cap);
        }
        if counts.combined_count > 0 {
            assert!(rat(counts.combined_max_diff as i128, 1) < counts.combined_cap);
        }
    }
}
