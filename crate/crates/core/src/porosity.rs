//! Porosity profiles of interval sets (finite point sets included as
//! degenerate intervals) and the distance-to-set potential.
//!
//! For `x ∈ A` and `s > 0` the index is `inf{τ ∈ (0,1) : B(x,s) ∩ A ⊆ B̄(x,τs)}`
//! with `inf ∅ = 1`, i.e. `min(1, ρ/s)` where `ρ` is the supremal distance from
//! `x` of points of `A` in the open ball.

use rand::Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::intervals::IntervalSet;
use crate::measure::Measure1D;
use crate::par::{self, Execution};
use crate::piecewise::PiecewiseLinear;
use crate::rates;
use crate::transport;

/// `max(|c − x|, |d − x|)`
fn far(j: (f64, f64), x: f64) -> f64 {
    (x - j.0).abs().max((j.1 - x).abs())
}

pub fn porosity_index(a: &IntervalSet, x: f64, s: f64) -> Result<f64> {
    check_scale(s)?;
    if !a.contains(x) {
        return Err(Error::NotInSet(x));
    }
    let rho = a.intervals()[a.meeting_open(x - s, x + s)]
        .iter()
        .fold(0.0f64, |m, &j| m.max(far(j, x).min(s)));
    Ok((rho / s).min(1.0))
}

fn check_scale(s: f64) -> Result<()> {
    if !(s > 0.0) || !s.is_finite() {
        return Err(Error::Domain { what: "scale", value: s });
    }
    Ok(())
}

/// `sup_{x ∈ A}` of the index at scale `s`.
///
/// For fixed intervals `I ∋ x` and `J`, `J` meets `B(x,s)` for `x` in the
/// relatively open window `I ∩ (c − s, d + s)`, on which the contribution
/// `min(s, max(|c−x|, |d−x|))` is quasi-convex in `x`; its supremum is the
/// larger of the values at the window ends (approached, at an open end).
pub fn porosity_sup(a: &IntervalSet, s: f64) -> Result<f64> {
    check_scale(s)?;
    if a.is_empty() {
        return Err(Error::InvalidSpec("porosity of the empty set".into()));
    }
    let iv = a.intervals();
    let mut best = 0.0f64;
    'outer: for &(lo, hi) in iv {
        for &j in &iv[a.meeting_open(lo - s, hi + s)] {
            let left = lo.max(j.0 - s);
            let right = hi.min(j.1 + s);
            best = best.max(far(j, left).min(s)).max(far(j, right).min(s));
            if best >= s {
                break 'outer;
            }
        }
    }
    Ok((best / s).min(1.0))
}

/// Endpoints and midpoints of every interval.
pub fn candidate_points(a: &IntervalSet) -> Vec<f64> {
    a.intervals()
        .iter()
        .flat_map(|&(lo, hi)| if lo == hi { vec![lo] } else { vec![lo, 0.5 * (lo + hi), hi] })
        .collect()
}

/// Lower bound for [`porosity_sup`] from the points in `xs` (all in `A`).
pub fn porosity_max_over(a: &IntervalSet, xs: &[f64], s: f64) -> Result<f64> {
    xs.iter().try_fold(0.0f64, |m, &x| Ok(m.max(porosity_index(a, x, s)?)))
}

/// Lower bound for [`porosity_sup`] from `samples` random points of `A`.
pub fn porosity_sampled<R: Rng>(a: &IntervalSet, s: f64, samples: usize, rng: &mut R) -> Result<f64> {
    if a.is_empty() {
        return Err(Error::InvalidSpec("porosity of the empty set".into()));
    }
    let iv = a.intervals();
    let xs: Vec<f64> = (0..samples)
        .map(|_| {
            let (lo, hi) = iv[rng.gen_range(0..iv.len())];
            if lo == hi {
                lo
            } else {
                rng.gen_range(lo..=hi)
            }
        })
        .collect();
    porosity_max_over(a, &xs, s)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ProfileRow {
    pub s: f64,
    pub tau: f64,
    /// Best value over [`candidate_points`]; never above `tau`.
    pub candidate_tau: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PorosityProfile {
    pub rows: Vec<ProfileRow>,
}

impl PorosityProfile {
    pub fn taus(&self) -> Vec<f64> {
        self.rows.iter().map(|r| r.tau).collect()
    }
}

pub fn porosity_profile(a: &IntervalSet, scales: &[f64]) -> Result<PorosityProfile> {
    porosity_profile_with(Execution::default(), a, scales)
}

/// Profile over strictly decreasing `scales`, cross-checked against the
/// candidate lower bound.
pub fn porosity_profile_with(exec: Execution, a: &IntervalSet, scales: &[f64]) -> Result<PorosityProfile> {
    if a.is_empty() {
        return Err(Error::InvalidSpec("porosity of the empty set".into()));
    }
    if scales.is_empty() {
        return Err(Error::InvalidSpec("no scales".into()));
    }
    scales.iter().try_for_each(|&s| check_scale(s))?;
    if scales.windows(2).any(|w| w[1] >= w[0]) {
        return Err(Error::InvalidSpec("scales must be strictly decreasing".into()));
    }
    let candidates = candidate_points(a);
    let rows = par::try_map(exec, scales, |&s| {
        let tau = porosity_sup(a, s)?;
        let candidate_tau = porosity_max_over(a, &candidates, s)?;
        if candidate_tau > tau + 1e-12 {
            return Err(Error::Numeric(format!(
                "candidate porosity {candidate_tau} exceeds the exact supremum {tau} at s = {s}"
            )));
        }
        Ok(ProfileRow { s, tau, candidate_tau })
    })?;
    Ok(PorosityProfile { rows })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Verdict {
    #[serde(rename = "consistent-with-A")]
    ConsistentWithA,
    #[serde(rename = "inconsistent")]
    Inconsistent,
    #[serde(rename = "inconclusive")]
    Inconclusive,
}

impl std::fmt::Display for Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Verdict::ConsistentWithA => "consistent-with-A",
            Verdict::Inconsistent => "inconsistent",
            Verdict::Inconclusive => "inconclusive",
        })
    }
}

/// Reads the tail of the profile (smallest scales). A trailing run of at
/// least `max(2, len/4)` rows (capped at `len`) decides: all below
/// `threshold` and nonincreasing is consistent, all at or above it is
/// inconsistent. Membership itself is never claimed.
pub fn class_a_diagnostic(profile: &PorosityProfile, threshold: f64) -> Verdict {
    let taus = profile.taus();
    let len = taus.len();
    if len == 0 {
        return Verdict::Inconclusive;
    }
    let min_tail = len.min((len / 4).max(2));
    let run = |pred: &dyn Fn(f64) -> bool| taus.iter().rev().take_while(|&&t| pred(t)).count();
    let below = run(&|t| t < threshold);
    if below >= min_tail && taus[len - below..].windows(2).all(|w| w[1] <= w[0]) {
        return Verdict::ConsistentWithA;
    }
    if run(&|t| t >= threshold) >= min_tail {
        return Verdict::Inconsistent;
    }
    Verdict::Inconclusive
}

/// `x ↦ d(x, A)`: zero on `A`, tents of slope ±1 over the gaps, `|x − a|`
/// outside the hull.
pub fn distance_potential(a: &IntervalSet) -> Result<PiecewiseLinear> {
    if a.is_empty() {
        return Err(Error::InvalidSpec("distance to the empty set".into()));
    }
    let iv = a.intervals();
    let mut knots = Vec::with_capacity(3 * iv.len());
    for (i, &(lo, hi)) in iv.iter().enumerate() {
        knots.push((lo, 0.0));
        if hi > lo {
            knots.push((hi, 0.0));
        }
        if let Some(&(next, _)) = iv.get(i + 1) {
            knots.push((0.5 * (hi + next), 0.5 * (next - hi)));
        }
    }
    PiecewiseLinear::new(knots, -1.0, 1.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DualRateBound {
    pub h: f64,
    /// `(∫ψ dμ_h − ∫ψ dμ)/h` with `ψ = d(·, A)`
    pub bound: f64,
    /// `μ(A)(1 − τ)/(1 + τ) − (μ(ℝ) − μ(A))`
    pub predicted: f64,
}

/// Lower bound on `W_1(μ, μ_h)/h` at `h = s(1+τ)/2` from the distance
/// potential of a set `A` whose index at scale `s` is at most `τ`.
pub fn porosity_dual_bound(mu: &Measure1D, a: &IntervalSet, s: f64, tau: f64) -> Result<DualRateBound> {
    check_scale(s)?;
    if !(0.0..1.0).contains(&tau) {
        return Err(Error::Domain { what: "tau", value: tau });
    }
    let h = s * (1.0 + tau) / 2.0;
    let psi = distance_potential(a)?;
    let shifted = rates::shift_superpose(mu, h);
    let bound = transport::dual_lower_bound_w1(mu, &shifted, &psi)? / h;
    let inside = match mu.restrict(a) {
        Ok(m) => m.total_mass(),
        Err(Error::EmptyMeasure) => 0.0,
        Err(e) => return Err(e),
    };
    let eps = mu.total_mass() - inside;
    Ok(DualRateBound { h, bound, predicted: inside * (1.0 - tau) / (1.0 + tau) - eps })
}
