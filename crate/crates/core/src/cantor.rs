//! Centred Cantor sets `C(α)`: generation `n+1` removes the open middle of
//! relative length `α_n` from each of the `2^n` intervals of generation `n`,
//! all of length `δ_n`, so that `δ_{n+1} = δ_n(1 − α_n)/2`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::intervals::IntervalSet;
use crate::measure::{Atom, Measure1D, Segment};
use crate::piecewise::PiecewiseLinear;

/// Largest generation that may be materialized (2^26 intervals).
pub const MAX_DEPTH: usize = 26;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum AlphaRule {
    /// `α_n = c`
    Constant { c: f64 },
    /// `α_n = values[n]`, then `tail`
    Vector { values: Vec<f64>, tail: f64 },
    /// `α_n = 1/(n + c)`
    Harmonic { c: f64 },
}

impl AlphaRule {
    pub fn alpha(&self, n: usize) -> f64 {
        match self {
            AlphaRule::Constant { c } => *c,
            AlphaRule::Vector { values, tail } => values.get(n).copied().unwrap_or(*tail),
            AlphaRule::Harmonic { c } => 1.0 / (n as f64 + c),
        }
    }

    fn validate(&self) -> Result<()> {
        let open = |v: f64| v > 0.0 && v < 1.0;
        let ok = match self {
            AlphaRule::Constant { c } => open(*c),
            AlphaRule::Harmonic { c } => c.is_finite() && *c > 1.0,
            AlphaRule::Vector { values, tail } => {
                values.iter().chain(std::iter::once(tail)).all(|&v| open(v))
                    && values.windows(2).all(|w| w[1] <= w[0])
                    && values.last().is_none_or(|&last| *tail <= last)
            }
        };
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidSpec(format!(
                "alpha rule {self:?} must give a nonincreasing sequence in (0, 1)"
            )))
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CantorSpec {
    pub alpha: AlphaRule,
    /// Deepest generation this spec may realize.
    pub depth: usize,
}

impl CantorSpec {
    pub fn new(alpha: AlphaRule, depth: usize) -> Result<Self> {
        let spec = Self { alpha, depth };
        spec.validate()?;
        Ok(spec)
    }

    pub fn constant(c: f64, depth: usize) -> Result<Self> {
        Self::new(AlphaRule::Constant { c }, depth)
    }

    pub fn harmonic(c: f64, depth: usize) -> Result<Self> {
        Self::new(AlphaRule::Harmonic { c }, depth)
    }

    pub fn validate(&self) -> Result<()> {
        if self.depth > MAX_DEPTH {
            return Err(Error::DepthExceeded { requested: self.depth, limit: MAX_DEPTH });
        }
        self.alpha.validate()
    }

    pub fn alpha(&self, n: usize) -> f64 {
        self.alpha.alpha(n)
    }

    fn check_depth(&self, n: usize) -> Result<()> {
        if n > self.depth {
            return Err(Error::DepthExceeded { requested: n, limit: self.depth });
        }
        Ok(())
    }

    /// `δ_0, …, δ_n`.
    pub fn deltas(&self, n: usize) -> Vec<f64> {
        let mut out = Vec::with_capacity(n + 1);
        out.push(1.0);
        for k in 0..n {
            out.push(out[k] * (1.0 - self.alpha(k)) / 2.0);
        }
        out
    }

    pub fn delta(&self, n: usize) -> f64 {
        self.deltas(n)[n]
    }

    /// Left endpoints of the generation-`n` intervals, increasing.
    pub fn left_endpoints(&self, n: usize) -> Result<Vec<f64>> {
        self.check_depth(n)?;
        let d = self.deltas(n);
        let mut lefts = vec![0.0];
        for k in 0..n {
            let jump = d[k] - d[k + 1];
            lefts = lefts.iter().flat_map(|&a| [a, a + jump]).collect();
        }
        Ok(lefts)
    }

    pub fn generation(&self, n: usize) -> Result<IntervalSet> {
        let dn = self.delta(n);
        let lefts = self.left_endpoints(n)?;
        IntervalSet::new(lefts.into_iter().map(|a| (a, a + dn)).collect())
    }

    /// `μ^n`: normalized Lebesgue measure on generation `n`.
    pub fn measure(&self, n: usize) -> Result<Measure1D> {
        let dn = self.delta(n);
        let mass = 0.5f64.powi(n as i32);
        let segments = self
            .left_endpoints(n)?
            .into_iter()
            .map(|left| Segment { left, right: left + dn, mass })
            .collect();
        Measure1D::new(vec![], segments)
    }

    /// `μ^n` discretized as one atom of mass `2^{−n}` per interval midpoint.
    pub fn midpoint_atoms(&self, n: usize) -> Result<Measure1D> {
        let half = self.delta(n) / 2.0;
        let mass = 0.5f64.powi(n as i32);
        let atoms = self
            .left_endpoints(n)?
            .into_iter()
            .map(|a| Atom { position: a + half, mass })
            .collect();
        Measure1D::new(atoms, vec![])
    }

    /// `F_{μ^n}(x)` by descending the construction, in `O(n)` and without
    /// materializing the generation; `n` may exceed `depth`.
    pub fn cdf_at(&self, n: usize, x: f64) -> f64 {
        if x <= 0.0 {
            return 0.0;
        }
        if x >= 1.0 {
            return 1.0;
        }
        let (mut a, mut delta, mut acc, mut share) = (0.0, 1.0, 0.0, 1.0);
        for k in 0..n {
            let next = delta * (1.0 - self.alpha(k)) / 2.0;
            share *= 0.5;
            let right = a + (delta - next);
            if x < a + next {
                // left child
            } else if x < right {
                return acc + share;
            } else {
                acc += share;
                a = right;
            }
            delta = next;
        }
        acc + share * ((x - a) / delta).clamp(0.0, 1.0)
    }

    /// `f_n = F_{μ^{n+1}} − F_{μ^n}`: zero off `C^n`, on each interval `[a, a+δ_n]`
    /// linear through `0, +c, −c, 0` at `a, a+δ_{n+1}, a+δ_n−δ_{n+1}, a+δ_n`
    /// with `c = 2^{−(n+1)} α_n`.
    pub fn layer_fn(&self, n: usize) -> Result<PiecewiseLinear> {
        self.check_depth(n + 1)?;
        let d = self.deltas(n + 1);
        let (dn, dn1) = (d[n], d[n + 1]);
        let c = 0.5f64.powi(n as i32 + 1) * self.alpha(n);
        let knots = self
            .left_endpoints(n)?
            .into_iter()
            .flat_map(|a| [(a, 0.0), (a + dn1, c), (a + (dn - dn1), -c), (a + dn, 0.0)])
            .collect();
        PiecewiseLinear::new(knots, 0.0, 0.0)
    }

    /// `L(C^n) = 2^n δ_n = ∏_{k<n} (1 − α_k)`.
    pub fn lebesgue_mass(&self, n: usize) -> f64 {
        (0..n).map(|k| 1.0 - self.alpha(k)).product()
    }

    /// `W_1(μ_α, μ^n) ≤ δ_n`: mass never leaves its generation-`n` interval.
    pub fn truncation_bound(&self, n: usize) -> f64 {
        self.delta(n)
    }

    /// Probe scales `h_n = α_n δ_n / 2` and bands
    /// `[√α_n δ_{n+1}, √α_{n−1} δ_n)` for `n` in `ns` (bands need `n ≥ 1`).
    pub fn critical_h_sequences(&self, ns: std::ops::RangeInclusive<usize>) -> CriticalSequences {
        let d = self.deltas(ns.end() + 1);
        let fail = ns.clone().map(|n| FailProbe { n, h: self.alpha(n) * d[n] / 2.0 }).collect();
        let band = ns
            .filter(|&n| n >= 1)
            .map(|n| Band { n, lo: self.alpha(n).sqrt() * d[n + 1], hi: self.alpha(n - 1).sqrt() * d[n] })
            .collect();
        CriticalSequences { fail, band }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FailProbe {
    pub n: usize,
    pub h: f64,
}

/// Half-open scale band `[lo, hi)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Band {
    pub n: usize,
    pub lo: f64,
    pub hi: f64,
}

impl Band {
    /// Geometric midpoint.
    pub fn probe(&self) -> f64 {
        (self.lo * self.hi).sqrt()
    }

    pub fn contains(&self, h: f64) -> bool {
        self.lo <= h && h < self.hi
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CriticalSequences {
    pub fail: Vec<FailProbe>,
    pub band: Vec<Band>,
}
