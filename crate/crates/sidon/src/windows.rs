//! Sliding-window profiles and the exact diameter identity.
//!
//! For a normalized Sidon set with k elements and diameter d, slide a
//! window of length T across positions i = 1..N with N = d + T, counting
//! A_i = |𝒜 ∩ [i-T, i)|. Every element lands in exactly T windows, so
//! ΣA_i = kT, and because a Sidon set realizes each difference at most
//! once the second moment collapses to a closed form. Writing V for the
//! population variance numerator Σ(A_i - kT/N)² and S for the weighted
//! count of missing small differences Σ_{0<r<T, r∉𝒜-𝒜} (T-r), the
//! diameter satisfies exactly
//!
//!   d = k²T² / (T(T+k-1) - (2S+V)) - T.
//!
//! Dropping 2S+V ≥ 0 gives the elementary lower bound k²T/(T+k-1) - T for
//! every T. The rest of the module classifies window positions into five
//! bands around the mean count (the level partition), trims a set down to
//! its middle band, and measures how much of the variance the edge windows
//! carry; these feed the variance and missing-differences certificates in
//! the bounds module.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};
use thiserror::Error;

use crate::rational::{big, isqrt, rat};
use crate::set::SidonSet;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum WindowError {
    #[error("window length must be at least 1")]
    ZeroWindow,
    #[error("window range is empty")]
    EmptyWindowRange,
    #[error("identity denominator T(T+k-1) - (2S+V) vanished at T={t}")]
    DegenerateDenominator { t: u64 },
    #[error("edge variance fraction undefined: window-count variance is zero")]
    ZeroVariance,
    #[error("level parameters must satisfy 0 < alpha < 1 and 0 < beta < 1")]
    InvalidLevels,
    #[error("middle band of the level partition is empty")]
    EmptyMiddleBand,
    #[error("cut intervals meet: 2z >= diameter at z={z}")]
    OverlappingFragments { z: u64 },
}

/// Window counts A_1..A_N for a fixed window length T.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WindowProfile {
    t: u64,
    k: usize,
    counts: Vec<u32>,
}

impl WindowProfile {
    pub fn new(set: &SidonSet, t: u64) -> Result<WindowProfile, WindowError> {
        if t == 0 {
            return Err(WindowError::ZeroWindow);
        }
        let n = set.diameter() + t;
        let elems = set.elements();
        let mut counts = Vec::with_capacity(n as usize);
        let mut lo = 0usize; // elements below the window
        let mut hi = 0usize; // elements below the right edge
        for i in 1..=n {
            while hi < elems.len() && elems[hi] < i {
                hi += 1;
            }
            // left edge i-T may be negative; lo only moves once i > t
            if i > t {
                let left = i - t;
                while lo < elems.len() && elems[lo] < left {
                    lo += 1;
                }
            }
            counts.push((hi - lo) as u32);
        }
        Ok(WindowProfile {
            t,
            k: set.k(),
            counts,
        })
    }

    pub fn t(&self) -> u64 {
        self.t
    }

    pub fn k(&self) -> usize {
        self.k
    }

    /// Number of window positions, N = diameter + T.
    pub fn n(&self) -> u64 {
        self.counts.len() as u64
    }

    pub fn counts(&self) -> &[u32] {
        &self.counts
    }

    /// ΣA_i, always exactly kT.
    pub fn total(&self) -> u64 {
        let sum: u64 = self.counts.iter().map(|&c| c as u64).sum();
        debug_assert_eq!(sum, self.k as u64 * self.t);
        sum
    }

    /// Mean window count kT/N as an exact rational.
    pub fn mean(&self) -> BigRational {
        rat(self.k as i128 * self.t as i128, self.n() as i128)
    }
}

/// Exact population variance numerator V = Σ(A_i - kT/N)².
///
/// Computed as Σ(A_i·N - kT)² / N² with integer accumulation (i128 with
/// overflow checks, falling back to arbitrary precision).
pub fn v_statistic(profile: &WindowProfile) -> BigRational {
    let n = profile.n() as i128;
    let kt = profile.k() as i128 * profile.t() as i128;
    let mut acc: i128 = 0;
    let mut overflow = false;
    for &c in profile.counts() {
        let dev = c as i128 * n - kt;
        match dev.checked_mul(dev).and_then(|sq| acc.checked_add(sq)) {
            Some(next) => acc = next,
            None => {
                overflow = true;
                break;
            }
        }
    }
    let numer: BigInt = if overflow {
        let big_n = big(n);
        let big_kt = big(kt);
        let mut sum = BigInt::zero();
        for &c in profile.counts() {
            let dev = big(c as i128) * &big_n - &big_kt;
            sum += &dev * &dev;
        }
        sum
    } else {
        big(acc)
    };
    BigRational::new(numer, big(n) * big(n))
}

/// Weighted count of missing small differences, S = Σ_{0<r<T, r∉𝒜-𝒜} (T-r).
pub fn s_statistic(set: &SidonSet, t: u64) -> u128 {
    if t <= 1 {
        return 0;
    }
    let mask = set.diff_mask(t - 1);
    let mut s: u128 = 0;
    for r in 1..t {
        if !mask.contains(r) {
            s += (t - r) as u128;
        }
    }
    s
}

/// Exact identity residual: k²T²/(T(T+k-1) - (2S+V)) - T minus the actual
/// diameter. Zero for every Sidon set and every window length.
///
/// The denominator equals k²T²/N algebraically, so it cannot vanish for a
/// verified Sidon set; the error arm guards the division all the same.
pub fn et_identity_check(set: &SidonSet, t: u64) -> Result<BigRational, WindowError> {
    let profile = WindowProfile::new(set, t)?;
    let v = v_statistic(&profile);
    let s = s_statistic(set, t);
    let k = set.k() as i128;
    let t_i = t as i128;
    let lead = rat(t_i * (t_i + k - 1), 1);
    let denom = lead - (rat(2, 1) * BigRational::from_integer(BigInt::from(s)) + v);
    if denom.is_zero() {
        return Err(WindowError::DegenerateDenominator { t });
    }
    let rhs = rat(k * k * t_i * t_i, 1) / denom - rat(t_i, 1);
    let lhs = rat(set.diameter() as i128, 1);
    Ok(rhs - lhs)
}

/// The elementary window lower bound k²T/(T+k-1) - T on the diameter.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EtLowerBound {
    /// The bound as derived; may be negative for poor window choices.
    pub raw: BigRational,
    /// The bound clamped at zero (a diameter is never negative).
    pub value: BigRational,
}

pub fn et_lower_bound(k: u64, t: u64) -> Result<EtLowerBound, WindowError> {
    if t == 0 {
        return Err(WindowError::ZeroWindow);
    }
    let k = k as i128;
    let t = t as i128;
    let raw = rat(k * k * t, t + k - 1) - rat(t, 1);
    let value = if raw.is_negative() {
        BigRational::zero()
    } else {
        raw.clone()
    };
    Ok(EtLowerBound { raw, value })
}

/// Best window in the given inclusive range: the T maximizing the raw
/// lower bound, smallest T on ties.
pub fn et_best_window(k: u64, t_lo: u64, t_hi: u64) -> Result<(u64, EtLowerBound), WindowError> {
    if t_lo == 0 {
        return Err(WindowError::ZeroWindow);
    }
    if t_lo > t_hi {
        return Err(WindowError::EmptyWindowRange);
    }
    let mut best: Option<(u64, EtLowerBound)> = None;
    for t in t_lo..=t_hi {
        let b = et_lower_bound(k, t)?;
        match &best {
            Some((_, cur)) if b.raw <= cur.raw => {}
            _ => best = Some((t, b)),
        }
    }
    Ok(best.expect("range is nonempty"))
}

fn cube(k: u64) -> BigInt {
    let b = big(k as i128);
    &b * &b * &b
}

/// Default window length ⌈k^{3/2}⌉.
pub fn default_window(k: u64) -> u64 {
    let c = cube(k);
    let root = isqrt(&c);
    let t = if &root * &root == c { root } else { root + 1 };
    t.to_u64().expect("window fits u64")
}

/// Window length ⌊k^{3/2}⌋ - k + 1, the choice behind the closed-form
/// diameter bound (k^{3/2} - k + ε for some ε in (0,1]).
pub fn bound_window(k: u64) -> u64 {
    let root = isqrt(&cube(k));
    let t: BigInt = root - big(k as i128) + 1;
    t.to_u64().expect("window fits u64")
}

/// Smallest integer T with T ≥ τ·k^{3/2}, for rational τ = p/q > 0.
pub fn scaled_window(k: u64, tau: &BigRational) -> u64 {
    assert!(tau.is_positive(), "scale must be positive");
    // T ≥ (p/q)·k^{3/2}  ⟺  T²q² ≥ p²k³ (both sides nonnegative)
    let m = tau.numer() * tau.numer() * cube(k);
    let d = tau.denom() * tau.denom();
    let mut t = isqrt(&(&m / &d));
    while &t * &t * &d < m {
        t += 1;
    }
    t.to_u64().expect("window fits u64")
}

/// Classification of the first T window positions into five bands by the
/// symmetrized count (A_j + A_{N+1-j})/2 against thresholds around the
/// mean Ā = kT/N:
///
///   band 1: s < (1-α)Ā          band 2: (1-α)Ā ≤ s < (1-αβ)Ā
///   band 3: (1-αβ)Ā ≤ s ≤ (1+αβ)Ā
///   band 4: (1+αβ)Ā < s ≤ (1+α)Ā   band 5: (1+α)Ā < s
///
/// The symmetrized profile is nondecreasing over j = 1..T (left windows
/// count elements from the left end, mirrored windows from the right, and
/// both counting functions grow one element at a time), so each band is a
/// consecutive run of positions.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LevelPartition {
    pub t: u64,
    /// Band sizes u_1..u_5; they sum to T.
    pub sizes: [usize; 5],
    /// Half-open 1-based position ranges per band (empty bands collapse).
    pub runs: [(u64, u64); 5],
    /// Fraction of positions in the inner off-bands: (u_2 + u_4)/T.
    pub x: BigRational,
    /// Fraction of positions in the outer off-bands: (u_1 + u_5)/T.
    pub y: BigRational,
    /// Largest position in band 3, if the band is nonempty.
    pub max_u3: Option<u64>,
    /// Twice the symmetrized profile, A_j + A_{N+1-j} for j = 1..T.
    pub twice_symmetrized: Vec<u64>,
}

pub fn u_partition(
    set: &SidonSet,
    t: u64,
    alpha: &BigRational,
    beta: &BigRational,
) -> Result<LevelPartition, WindowError> {
    let one = BigRational::from_integer(BigInt::from(1));
    if !(alpha.is_positive() && alpha < &one && beta.is_positive() && beta < &one) {
        return Err(WindowError::InvalidLevels);
    }
    let profile = WindowProfile::new(set, t)?;
    let n = profile.n();
    let counts = profile.counts();
    let mean = profile.mean();
    let ab = alpha * beta;
    // Thresholds for twice the symmetrized count, to compare integers
    // against rationals without halving.
    let two = rat(2, 1);
    let th = [
        (&one - alpha) * &mean * &two,
        (&one - &ab) * &mean * &two,
        (&one + &ab) * &mean * &two,
        (&one + alpha) * &mean * &two,
    ];
    let mut sizes = [0usize; 5];
    let mut twice_symmetrized = Vec::with_capacity(t as usize);
    let mut prev_band = 0usize;
    for j in 1..=t {
        let a_left = counts[(j - 1) as usize] as u64;
        let a_right = counts[(n - j) as usize] as u64;
        let ts = a_left + a_right;
        let s = rat(ts as i128, 1);
        let band = if s < th[0] {
            0
        } else if s < th[1] {
            1
        } else if s <= th[2] {
            2
        } else if s <= th[3] {
            3
        } else {
            4
        };
        debug_assert!(band >= prev_band, "symmetrized profile must not descend");
        prev_band = band;
        sizes[band] += 1;
        twice_symmetrized.push(ts);
    }
    let mut runs = [(0u64, 0u64); 5];
    let mut start = 1u64;
    for (i, &sz) in sizes.iter().enumerate() {
        runs[i] = (start, start + sz as u64);
        start += sz as u64;
    }
    let x = rat((sizes[1] + sizes[3]) as i128, t as i128);
    let y = rat((sizes[0] + sizes[4]) as i128, t as i128);
    let max_u3 = if sizes[2] > 0 {
        Some(runs[2].1 - 1)
    } else {
        None
    };
    Ok(LevelPartition {
        t,
        sizes,
        runs,
        x,
        y,
        max_u3,
        twice_symmetrized,
    })
}

/// A set cut at z = max band-3 position: the middle 𝒜 ∩ (z, d-z), the two
/// removed cuts, and the band-1/band-2 fragments at each end.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TrimmedSet {
    pub z: u64,
    /// 𝒜 ∩ (z, d-z), in original coordinates.
    pub middle: Vec<u64>,
    /// 𝒜 ∩ [0, z] and 𝒜 ∩ [d-z, d].
    pub left_cut: Vec<u64>,
    pub right_cut: Vec<u64>,
    /// Elements a with a+1 in band 1 resp. band 2.
    pub l1: Vec<u64>,
    pub l2: Vec<u64>,
    /// Elements a with d-a+1 in band 1 resp. band 2.
    pub r1: Vec<u64>,
    pub r2: Vec<u64>,
    /// Number of elements removed, k - |middle|.
    pub removed: usize,
    pub k: usize,
}

impl TrimmedSet {
    /// The middle as a normalized set, if anything survived the cut.
    pub fn middle_set(&self) -> Option<SidonSet> {
        if self.middle.is_empty() {
            return None;
        }
        let shift = self.middle[0];
        let elems = self.middle.iter().map(|&e| e - shift).collect();
        Some(SidonSet::from_sorted_unchecked(elems))
    }
}

pub fn trim(set: &SidonSet, partition: &LevelPartition) -> Result<TrimmedSet, WindowError> {
    let z = partition.max_u3.ok_or(WindowError::EmptyMiddleBand)?;
    let d = set.diameter();
    if 2 * z >= d {
        return Err(WindowError::OverlappingFragments { z });
    }
    let mut middle = Vec::new();
    let mut left_cut = Vec::new();
    let mut right_cut = Vec::new();
    for &a in set.elements() {
        if a <= z {
            left_cut.push(a);
        } else if a < d - z {
            middle.push(a);
        } else {
            right_cut.push(a);
        }
    }
    let in_run = |pos: u64, run: (u64, u64)| pos >= run.0 && pos < run.1;
    let mut l1 = Vec::new();
    let mut l2 = Vec::new();
    let mut r1 = Vec::new();
    let mut r2 = Vec::new();
    for &a in set.elements() {
        if a + 1 <= partition.t {
            if in_run(a + 1, partition.runs[0]) {
                l1.push(a);
            } else if in_run(a + 1, partition.runs[1]) {
                l2.push(a);
            }
        }
        let mirror = d - a + 1;
        if mirror <= partition.t {
            if in_run(mirror, partition.runs[0]) {
                r1.push(a);
            } else if in_run(mirror, partition.runs[1]) {
                r2.push(a);
            }
        }
    }
    let k = set.k();
    let removed = k - middle.len();
    debug_assert_eq!(left_cut.len() + middle.len() + right_cut.len(), k);
    Ok(TrimmedSet {
        z,
        middle,
        left_cut,
        right_cut,
        l1,
        l2,
        r1,
        r2,
        removed,
        k,
    })
}

/// Share of the window-count variance carried by the first and last T
/// positions. Exact rational in [0, 1]; errors when the variance is zero.
pub fn edge_variance_fraction(set: &SidonSet, t: u64) -> Result<BigRational, WindowError> {
    let profile = WindowProfile::new(set, t)?;
    let v = v_statistic(&profile);
    if v.is_zero() {
        return Err(WindowError::ZeroVariance);
    }
    let n = profile.n();
    if 2 * t >= n {
        // The two edge ranges cover every position.
        return Ok(BigRational::from_integer(BigInt::from(1)));
    }
    let n_i = n as i128;
    let kt = profile.k() as i128 * profile.t() as i128;
    let counts = profile.counts();
    let mut acc = BigInt::zero();
    for j in 0..t as usize {
        let dev_l = big(counts[j] as i128 * n_i - kt);
        let dev_r = big(counts[n as usize - 1 - j] as i128 * n_i - kt);
        acc += &dev_l * &dev_l + &dev_r * &dev_r;
    }
    let edge = BigRational::new(acc, big(n_i) * big(n_i));
    Ok(edge / v)
}
