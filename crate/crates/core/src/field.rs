//! Discrete measure fields over atomic bases: each base point `x_i` of weight
//! `w_i` carries a probability vector of velocities. Distances are the
//! unnormalized fiberwise ones, `W_μ²(ξ, ζ) = Σ_i w_i W₂²(ξ_i, ζ_i)`, so that
//! `‖ξ‖_μ² = Σ_i w_i Σ_j p_ij v_ij²`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::intervals::IntervalSet;
use crate::measure::{Atom, Measure1D};
use crate::par::{self, Execution};
use crate::transport;

const PROB_TOL: f64 = 1e-12;
const BASE_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Fiber {
    pub x: f64,
    #[serde(rename = "w")]
    pub weight: f64,
    /// `(v, p)` pairs
    #[serde(rename = "fiber")]
    pub velocities: Vec<(f64, f64)>,
}

impl Fiber {
    fn measure(&self) -> Measure1D {
        Measure1D::atomic(&self.velocities.iter().copied().filter(|&(_, p)| p > 0.0).collect::<Vec<_>>())
            .expect("validated fiber")
    }

    fn mean(&self) -> f64 {
        self.velocities.iter().map(|&(v, p)| p * v).sum()
    }

    fn second_moment(&self) -> f64 {
        self.velocities.iter().map(|&(v, p)| p * v * v).sum()
    }

    /// `f ≥ 0` when the fiber is `½δ_{−f} + ½δ_f` (or `δ_0`).
    fn symmetric_speed(&self) -> Option<f64> {
        let m = self.measure();
        match m.atoms() {
            [a] if a.position == 0.0 => Some(0.0),
            [a, b] if a.position == -b.position && (a.mass - 0.5).abs() <= PROB_TOL && (b.mass - 0.5).abs() <= PROB_TOL => {
                Some(b.position)
            }
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MeasureField {
    fibers: Vec<Fiber>,
}

impl MeasureField {
    pub fn new(fibers: Vec<Fiber>) -> Result<Self> {
        let field = Self { fibers };
        field.validate()?;
        Ok(field)
    }

    pub fn validate(&self) -> Result<()> {
        if self.fibers.is_empty() {
            return Err(Error::EmptyMeasure);
        }
        for (i, f) in self.fibers.iter().enumerate() {
            let bad = |why: &str| Err(Error::InvalidMeasure(format!("fiber {i}: {why}")));
            if !f.x.is_finite() || !(f.weight > 0.0) || !f.weight.is_finite() {
                return bad("needs a finite position and positive weight");
            }
            if i > 0 && f.x <= self.fibers[i - 1].x {
                return bad("base points must increase strictly");
            }
            if f.velocities.iter().any(|&(v, p)| !v.is_finite() || !(p >= 0.0) || !p.is_finite()) {
                return bad("velocities must be finite with nonnegative probabilities");
            }
            let total: f64 = f.velocities.iter().map(|&(_, p)| p).sum();
            if (total - 1.0).abs() > PROB_TOL {
                return bad(&format!("probabilities sum to {total}"));
            }
        }
        Ok(())
    }

    /// Field over the atoms of `base` with fiber `fiber(x)` at each atom.
    pub fn from_base(base: &Measure1D, mut fiber: impl FnMut(f64) -> Vec<(f64, f64)>) -> Result<Self> {
        if !base.is_atomic() {
            return Err(Error::InvalidMeasure("measure fields need an atomic base".into()));
        }
        Self::new(
            base.atoms()
                .iter()
                .map(|a| Fiber { x: a.position, weight: a.mass, velocities: fiber(a.position) })
                .collect(),
        )
    }

    /// `(id, f)#μ`
    pub fn map_field(base: &Measure1D, f: impl Fn(f64) -> f64) -> Result<Self> {
        Self::from_base(base, |x| vec![(f(x), 1.0)])
    }

    /// `½[(id, −f) + (id, f)]#μ`
    pub fn symmetric(base: &Measure1D, f: impl Fn(f64) -> f64) -> Result<Self> {
        Self::from_base(base, |x| {
            let v = f(x);
            vec![(-v, 0.5), (v, 0.5)]
        })
    }

    pub fn unit_symmetric(base: &Measure1D) -> Result<Self> {
        Self::symmetric(base, |_| 1.0)
    }

    pub fn fibers(&self) -> &[Fiber] {
        &self.fibers
    }

    pub fn base(&self) -> Measure1D {
        Measure1D::new(self.fibers.iter().map(|f| Atom { position: f.x, mass: f.weight }).collect(), vec![])
            .expect("validated base")
    }

    /// `(π_x + h π_v)#ξ`
    pub fn exp_map(&self, h: f64) -> Measure1D {
        let atoms = self
            .fibers
            .iter()
            .flat_map(|f| f.velocities.iter().filter(|&&(_, p)| p > 0.0).map(move |&(v, p)| (f.x + h * v, f.weight * p)))
            .collect::<Vec<_>>();
        Measure1D::atomic(&atoms).expect("validated field")
    }

    pub fn barycenter(&self) -> Vec<f64> {
        self.fibers.iter().map(Fiber::mean).collect()
    }

    /// Each fiber translated by minus its barycenter.
    pub fn center(&self) -> Self {
        let fibers = self
            .fibers
            .iter()
            .map(|f| {
                let b = f.mean();
                Fiber { velocities: f.velocities.iter().map(|&(v, p)| (v - b, p)).collect(), ..f.clone() }
            })
            .collect();
        Self { fibers }
    }

    pub fn norm_sq(&self) -> f64 {
        self.fibers.iter().map(|f| f.weight * f.second_moment()).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sq().sqrt()
    }

    /// `Σ w b²`
    pub fn barycenter_norm_sq(&self) -> f64 {
        self.fibers.iter().map(|f| f.weight * f.mean().powi(2)).sum()
    }

    fn check_base(&self, other: &Self) -> Result<()> {
        let same = self.fibers.len() == other.fibers.len()
            && self.fibers.iter().zip(&other.fibers).all(|(a, b)| {
                (a.x - b.x).abs() <= BASE_TOL * (1.0 + a.x.abs()) && (a.weight - b.weight).abs() <= BASE_TOL
            });
        if same {
            Ok(())
        } else {
            Err(Error::BaseMismatch)
        }
    }

    pub fn w_mu_sq(&self, other: &Self) -> Result<f64> {
        self.check_base(other)?;
        self.fibers.iter().zip(&other.fibers).try_fold(0.0, |acc, (a, b)| {
            Ok(acc + a.weight * transport::transport_cost(&a.measure(), &b.measure(), 2.0)?)
        })
    }

    pub fn w_mu(&self, other: &Self) -> Result<f64> {
        Ok(self.w_mu_sq(other)?.sqrt())
    }

    /// `½(‖ξ‖² + ‖ζ‖² − W_μ²(ξ, ζ))`
    pub fn inner(&self, other: &Self) -> Result<f64> {
        let w2 = self.w_mu_sq(other)?;
        Ok(0.5 * (self.norm_sq() + other.norm_sq() - w2))
    }

    /// `(π_x, λπ_v)#ξ`
    pub fn scale(&self, lambda: f64) -> Result<Self> {
        if !(lambda >= 0.0) || !lambda.is_finite() {
            return Err(Error::Domain { what: "scale factor", value: lambda });
        }
        let fibers = self
            .fibers
            .iter()
            .map(|f| Fiber { velocities: f.velocities.iter().map(|&(v, p)| (lambda * v, p)).collect(), ..f.clone() })
            .collect();
        Ok(Self { fibers })
    }

    /// Keeps the base points in `a`, weights unchanged.
    pub fn restrict_field(&self, a: &IntervalSet) -> Result<Self> {
        let fibers: Vec<Fiber> = self.fibers.iter().filter(|f| a.contains(f.x)).cloned().collect();
        if fibers.is_empty() {
            return Err(Error::EmptyMeasure);
        }
        Ok(Self { fibers })
    }

    /// Replaces `f` by `min(f, r)` in a symmetric field.
    pub fn truncate_symmetric(&self, r: f64) -> Result<Self> {
        if !(r > 0.0) {
            return Err(Error::Domain { what: "truncation radius", value: r });
        }
        let fibers = self
            .fibers
            .iter()
            .enumerate()
            .map(|(i, f)| {
                let speed = f.symmetric_speed().ok_or(Error::NotSymmetric(i))?.min(r);
                Ok(Fiber { velocities: vec![(-speed, 0.5), (speed, 0.5)], ..f.clone() })
            })
            .collect::<Result<_>>()?;
        Ok(Self { fibers })
    }

    /// Largest `|v|` carried with positive probability.
    pub fn max_speed(&self) -> f64 {
        self.fibers
            .iter()
            .flat_map(|f| &f.velocities)
            .filter(|&&(_, p)| p > 0.0)
            .fold(0.0, |m, &(v, _)| m.max(v.abs()))
    }
}

/// `W₂(base, exp(h·ξ))`, unnormalized.
fn exp_distance_sq(xi: &MeasureField, base: &Measure1D, h: f64) -> Result<f64> {
    transport::transport_cost(base, &xi.exp_map(h), 2.0)
}

fn check_hs(hs: &[f64], decreasing: bool) -> Result<()> {
    if hs.is_empty() || hs.iter().any(|&h| !(h > 0.0) || !h.is_finite()) {
        return Err(Error::InvalidSpec("scales must be positive and finite".into()));
    }
    if decreasing && hs.windows(2).any(|w| w[1] >= w[0]) {
        return Err(Error::InvalidSpec("scales must be strictly decreasing".into()));
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LimsupRow {
    pub h: f64,
    pub quotient: f64,
    /// `‖ξ‖_μ − quotient`
    pub deficit: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LimsupReport {
    pub target: f64,
    pub rows: Vec<LimsupRow>,
}

/// Quotients `W(μ, exp_μ(h·ξ))/h` against `‖ξ‖_μ`; errors if any quotient
/// exceeds the norm, which the trivial coupling forbids.
pub fn limsup_condition_check(exec: Execution, xi: &MeasureField, hs: &[f64]) -> Result<LimsupReport> {
    check_hs(hs, true)?;
    let base = xi.base();
    let target = xi.norm();
    let rows = par::try_map(exec, hs, |&h| {
        let quotient = exp_distance_sq(xi, &base, h)?.sqrt() / h;
        if quotient > target + 1e-9 {
            return Err(Error::Numeric(format!("quotient {quotient} above the field norm {target} at h = {h}")));
        }
        Ok(LimsupRow { h, quotient, deficit: target - quotient })
    })?;
    Ok(LimsupReport { target, rows })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RemoveBaryRow {
    pub h: f64,
    /// `W²(μ, exp(h·ζ))/h²`
    pub full: f64,
    /// `W²(μ, exp(h·ζ⁰))/h² + ‖b‖²`
    pub centred_plus_bary: f64,
    pub margin: f64,
}

/// Compares both sides of the barycenter-removal inequality per `h`; the
/// smallest `h` must satisfy it within `1e-6`.
pub fn removebary_check(exec: Execution, zeta: &MeasureField, hs: &[f64]) -> Result<Vec<RemoveBaryRow>> {
    check_hs(hs, false)?;
    let base = zeta.base();
    let centred = zeta.center();
    let b2 = zeta.barycenter_norm_sq();
    let rows = par::try_map(exec, hs, |&h| {
        let full = exp_distance_sq(zeta, &base, h)? / (h * h);
        let centred_plus_bary = exp_distance_sq(&centred, &base, h)? / (h * h) + b2;
        Ok(RemoveBaryRow { h, full, centred_plus_bary, margin: centred_plus_bary - full })
    })?;
    let smallest = rows.iter().min_by(|a, b| a.h.total_cmp(&b.h)).expect("nonempty");
    if smallest.margin < -1e-6 {
        return Err(Error::Numeric(format!(
            "barycenter removal fails at h = {}: margin {:e}",
            smallest.h, smallest.margin
        )));
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rates::shift_superpose;

    fn two_atoms() -> Measure1D {
        Measure1D::atomic(&[(0.0, 0.5), (1.0, 0.5)]).unwrap()
    }

    fn single(v: Vec<(f64, f64)>) -> MeasureField {
        MeasureField::new(vec![Fiber { x: 0.0, weight: 1.0, velocities: v }]).unwrap()
    }

    #[test]
    fn exp_map_examples() {
        let d0 = Measure1D::dirac(0.0);
        let unit = MeasureField::unit_symmetric(&d0).unwrap();
        assert_eq!(unit.exp_map(0.25), shift_superpose(&d0, 0.25));
        assert_eq!(unit.exp_map(0.0), d0);
        let shift = MeasureField::map_field(&two_atoms(), |_| 2.0).unwrap();
        let want = Measure1D::atomic(&[(0.2, 0.5), (1.2, 0.5)]).unwrap();
        assert!(shift.exp_map(0.1).approx_eq(&want, 1e-15));
    }

    #[test]
    fn barycenters_and_centering() {
        assert_eq!(single(vec![(-1.0, 0.5), (1.0, 0.5)]).barycenter(), vec![0.0]);
        assert_eq!(single(vec![(3.0, 1.0)]).barycenter(), vec![3.0]);
        let xi = single(vec![(-2.0, 0.25), (2.0, 0.75)]);
        assert_eq!(xi.barycenter(), vec![1.0]);
        let c = xi.center();
        assert_eq!(c.fibers()[0].velocities, vec![(-3.0, 0.25), (1.0, 0.75)]);
        assert_eq!(c.barycenter(), vec![0.0]);
        assert!((xi.norm_sq() - c.norm_sq() - xi.barycenter_norm_sq()).abs() < 1e-12);
        let sym = single(vec![(-1.0, 0.5), (1.0, 0.5)]);
        assert_eq!(sym.center(), sym);
        let map = MeasureField::map_field(&two_atoms(), |x| x + 1.0).unwrap();
        assert!(map.center().fibers().iter().all(|f| f.velocities == vec![(0.0, 1.0)]));
    }

    #[test]
    fn distances_and_products() {
        let a = single(vec![(1.0, 1.0)]);
        let b = single(vec![(-1.0, 1.0)]);
        assert_eq!(a.w_mu(&a).unwrap(), 0.0);
        assert_eq!(a.w_mu(&b).unwrap(), 2.0);
        let sym = single(vec![(-1.0, 0.5), (1.0, 0.5)]);
        let zero = single(vec![(0.0, 1.0)]);
        assert_eq!(sym.w_mu_sq(&zero).unwrap(), 1.0);
        assert!((sym.inner(&sym).unwrap() - sym.norm_sq()).abs() < 1e-15);
        assert_eq!(single(vec![(2.0, 1.0)]).inner(&single(vec![(3.0, 1.0)])).unwrap(), 6.0);
        let map = MeasureField::map_field(&Measure1D::dirac(0.0), |_| 0.7).unwrap();
        assert!(sym.inner(&map).unwrap().abs() < 1e-12);
        let other = MeasureField::map_field(&two_atoms(), |_| 1.0).unwrap();
        assert!(matches!(sym.w_mu(&other), Err(Error::BaseMismatch)));
    }

    #[test]
    fn operators() {
        let xi = MeasureField::symmetric(&two_atoms(), |x| 3.0 * x + 0.5).unwrap();
        let zero = xi.scale(0.0).unwrap();
        assert_eq!(zero.norm(), 0.0);
        assert!((xi.scale(2.0).unwrap().norm() - 2.0 * xi.norm()).abs() < 1e-15);
        let t = xi.truncate_symmetric(1.0).unwrap();
        assert_eq!(t.fibers()[0].velocities, vec![(-0.5, 0.5), (0.5, 0.5)]);
        assert_eq!(t.fibers()[1].velocities, vec![(-1.0, 0.5), (1.0, 0.5)]);
        let skew = single(vec![(-2.0, 0.25), (2.0, 0.75)]);
        assert!(matches!(skew.truncate_symmetric(1.0), Err(Error::NotSymmetric(0))));
        let r = xi.restrict_field(&IntervalSet::interval(0.5, 2.0).unwrap()).unwrap();
        assert_eq!(r.fibers().len(), 1);
        assert_eq!(r.fibers()[0].weight, 0.5);
        assert!(xi.restrict_field(&IntervalSet::interval(5.0, 6.0).unwrap()).is_err());
        assert!(xi.scale(-1.0).is_err());
    }

    #[test]
    fn limsup_examples() {
        let unit = MeasureField::unit_symmetric(&Measure1D::dirac(0.0)).unwrap();
        let hs = [1e-1, 1e-2, 1e-3];
        let r = limsup_condition_check(Execution::Sequential, &unit, &hs).unwrap();
        assert!(r.rows.iter().all(|row| (row.quotient - 1.0).abs() < 1e-12));
        // oracle: with isolated atoms each atom translates as a block
        let base = Measure1D::atomic(&[(0.0, 0.25), (1.0, 0.25), (3.0, 0.5)]).unwrap();
        let f = |x: f64| 1.0 - x;
        let map = MeasureField::map_field(&base, f).unwrap();
        let norm = (0.25 * f(0.0).powi(2) + 0.25 * f(1.0).powi(2) + 0.5 * f(3.0).powi(2)).sqrt();
        let h_small = 0.5 / (2.0f64 + 1.0);
        let hs: Vec<f64> = [0.9, 0.5, 0.2, 0.1].iter().map(|k| k * h_small).collect();
        let r = limsup_condition_check(Execution::Parallel, &map, &hs).unwrap();
        assert!(r.rows.iter().all(|row| (row.quotient - norm).abs() < 1e-12));
        assert!(limsup_condition_check(Execution::Sequential, &map, &[0.1, 0.2]).is_err());
    }

    #[test]
    fn removebary_examples() {
        let hs = [1e-1, 1e-2, 1e-3, 1e-4];
        let sym = MeasureField::unit_symmetric(&two_atoms()).unwrap();
        let rows = removebary_check(Execution::Sequential, &sym, &hs).unwrap();
        assert!(rows.iter().all(|r| r.margin.abs() < 1e-12));
        let map = MeasureField::map_field(&two_atoms(), |x| 1.0 + x).unwrap();
        let rows = removebary_check(Execution::Sequential, &map, &hs).unwrap();
        assert!(rows.iter().all(|r| (r.full - map.barycenter_norm_sq()).abs() < 1e-9));
        let base = Measure1D::atomic(&[(0.0, 0.5), (10.0, 0.5)]).unwrap();
        let drift = MeasureField::from_base(&base, |_| vec![(0.0, 0.5), (2.0, 0.5)]).unwrap();
        let rows = removebary_check(Execution::Parallel, &drift, &hs).unwrap();
        assert!(rows.iter().all(|r| r.margin >= -1e-9));
    }
}
