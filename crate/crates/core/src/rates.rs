//! The shift superposition `μ_h = ½(id−h)#μ + ½(id+h)#μ` and scans of the
//! rate quotient `W_p(μ, μ_h)/h`.

use serde::Serialize;

use crate::cantor::CantorSpec;
use crate::error::{Error, Result};
use crate::measure::Measure1D;
use crate::par::{self, Execution};
use crate::transport;

/// Slack on the a-priori bound `W_p(μ, μ_h) ≤ h`.
pub const QUOTIENT_SLACK: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RateSample {
    pub h: f64,
    pub p: f64,
    pub distance: f64,
    pub quotient: f64,
    /// Bound on `|W_p(μ, μ_h) − W_p(μ^N, μ^N_h)|` when the scanned measure is
    /// a finite-depth stand-in `μ^N`; zero for exact inputs.
    pub truncation_error_bound: f64,
}

impl RateSample {
    /// Interval certainly containing the quotient of the measure approximated.
    pub fn quotient_range(&self) -> (f64, f64) {
        let e = self.truncation_error_bound / self.h;
        ((self.quotient - e).max(0.0), self.quotient + e)
    }
}

/// `½(id−h)#m + ½(id+h)#m`.
pub fn shift_superpose(m: &Measure1D, h: f64) -> Measure1D {
    if h == 0.0 {
        return m.clone();
    }
    let left = m.pushforward_affine(1.0, -h);
    let right = m.pushforward_affine(1.0, h);
    Measure1D::mixture(&[(&left, 0.5), (&right, 0.5)]).expect("two positive weights")
}

fn check_h(h: f64) -> Result<()> {
    if !(h > 0.0) || !h.is_finite() {
        return Err(Error::Domain { what: "h", value: h });
    }
    Ok(())
}

pub fn rate_quotient(m: &Measure1D, h: f64, p: f64) -> Result<RateSample> {
    rate_quotient_truncated(m, h, p, 0.0)
}

pub fn rate_quotient_truncated(m: &Measure1D, h: f64, p: f64, truncation: f64) -> Result<RateSample> {
    check_h(h)?;
    let distance = transport::wasserstein(m, &shift_superpose(m, h), p)?;
    let quotient = distance / h;
    // The identity-split plan moves all mass by exactly h.
    if quotient > m.total_mass() * (1.0 + QUOTIENT_SLACK) {
        return Err(Error::Numeric(format!("rate quotient {quotient} exceeds the a-priori bound at h = {h}")));
    }
    Ok(RateSample { h, p, distance, quotient, truncation_error_bound: truncation })
}

pub fn rate_scan(m: &Measure1D, hs: &[f64], p: f64) -> Result<Vec<RateSample>> {
    rate_scan_with(Execution::default(), m, hs, p, 0.0)
}

/// One sample per `h`, in input order. `truncation` is copied into every row.
pub fn rate_scan_with(
    exec: Execution,
    m: &Measure1D,
    hs: &[f64],
    p: f64,
    truncation: f64,
) -> Result<Vec<RateSample>> {
    if hs.is_empty() {
        return Err(Error::InvalidSpec("empty h grid".into()));
    }
    hs.iter().try_for_each(|&h| check_h(h))?;
    par::try_map(exec, hs, |&h| rate_quotient_truncated(m, h, p, truncation))
}

/// `count` values from `h_max` down to `h_min`, equally spaced in `log h`.
pub fn geometric_grid(h_max: f64, h_min: f64, count: usize) -> Result<Vec<f64>> {
    check_h(h_max)?;
    check_h(h_min)?;
    if h_min > h_max || count == 0 || (count == 1 && h_min != h_max) {
        return Err(Error::InvalidSpec(format!("bad grid: {count} points from {h_max} to {h_min}")));
    }
    if count == 1 {
        return Ok(vec![h_max]);
    }
    let ratio = (h_min / h_max).ln() / (count - 1) as f64;
    let mut hs: Vec<f64> = (0..count).map(|i| h_max * (ratio * i as f64).exp()).collect();
    hs[count - 1] = h_min;
    Ok(hs)
}

/// Halving grid `h_max, h_max/2, …` down to the last value `≥ h_min`.
pub fn halving_grid(h_max: f64, h_min: f64) -> Vec<f64> {
    std::iter::successors(Some(h_max), |h| Some(h / 2.0)).take_while(|&h| h >= h_min).collect()
}

/// Default scan grid: ratio ½ from `1e-1` to `1e-6`.
pub fn default_grid() -> Vec<f64> {
    halving_grid(1e-1, 1e-6)
}

/// Largest quotient in a scan; evidence for the limsup, never a claim about it.
pub fn scan_max(samples: &[RateSample]) -> Option<&RateSample> {
    samples.iter().max_by(|a, b| a.quotient.total_cmp(&b.quotient))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Probe {
    /// `h_n = α_n δ_n / 2`
    Fail,
    /// geometric midpoint of `[√α_n δ_{n+1}, √α_{n−1} δ_n)`
    Band,
}

impl std::fmt::Display for Probe {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Probe::Fail => "fail",
            Probe::Band => "band",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CantorRow {
    pub probe: Probe,
    pub n: usize,
    pub sample: RateSample,
}

/// Rate quotients of `μ^depth` at the critical scales for `n` in `ns`. Each
/// row carries the truncation bound `2δ_depth`: both `μ` and `μ_h` lie within
/// `W_p`-distance `δ_depth` of their depth-`depth` approximants.
pub fn cantor_scan(
    exec: Execution,
    spec: &CantorSpec,
    ns: std::ops::RangeInclusive<usize>,
    p: f64,
    probes: &[Probe],
) -> Result<Vec<CantorRow>> {
    let depth = spec.depth;
    let mu = spec.measure(depth)?;
    let truncation = 2.0 * spec.truncation_bound(depth);
    let seqs = spec.critical_h_sequences(ns);
    let mut jobs = Vec::new();
    for probe in probes {
        match probe {
            Probe::Fail => jobs.extend(seqs.fail.iter().map(|f| (Probe::Fail, f.n, f.h))),
            Probe::Band => jobs.extend(seqs.band.iter().map(|b| (Probe::Band, b.n, b.probe()))),
        }
    }
    par::try_map(exec, &jobs, |&(probe, n, h)| {
        Ok(CantorRow { probe, n, sample: rate_quotient_truncated(&mu, h, p, truncation)? })
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OrderingEntry {
    pub p: f64,
    pub quotient: f64,
    /// `W_p/h − W_1/h`
    pub lower_margin: f64,
    /// `(W_1/h)^{1/p} − W_p/h`
    pub upper_margin: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OrderingReport {
    pub h: f64,
    pub w1_quotient: f64,
    pub entries: Vec<OrderingEntry>,
}

impl OrderingReport {
    pub fn worst_margin(&self) -> f64 {
        self.entries.iter().fold(f64::INFINITY, |m, e| m.min(e.lower_margin).min(e.upper_margin))
    }
}

/// Checks `W_1/h ≤ W_p/h ≤ (W_1/h)^{1/p}` (for the normalized measure) at every `p`.
pub fn p_ordering_check(m: &Measure1D, h: f64, ps: &[f64]) -> Result<OrderingReport> {
    check_h(h)?;
    let m = m.normalized();
    let w1_quotient = rate_quotient(&m, h, 1.0)?.quotient;
    let entries = ps
        .iter()
        .map(|&p| {
            let quotient = if p == 1.0 { w1_quotient } else { rate_quotient(&m, h, p)?.quotient };
            let entry = OrderingEntry {
                p,
                quotient,
                lower_margin: quotient - w1_quotient,
                upper_margin: w1_quotient.powf(1.0 / p) - quotient,
            };
            if entry.lower_margin < -QUOTIENT_SLACK || entry.upper_margin < -QUOTIENT_SLACK {
                return Err(Error::Numeric(format!(
                    "p-ordering violated at p = {p}, h = {h}: margins {:e} / {:e}",
                    entry.lower_margin, entry.upper_margin
                )));
            }
            Ok(entry)
        })
        .collect::<Result<_>>()?;
    Ok(OrderingReport { h, w1_quotient, entries })
}
