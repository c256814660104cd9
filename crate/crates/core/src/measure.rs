//! Finite-complexity nonnegative measures on the real line: atoms plus
//! piecewise-uniform segments, with exact distribution and quantile functions.

use crate::error::{Error, Result};
use crate::intervals::IntervalSet;
use crate::quad;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Atom {
    pub position: f64,
    pub mass: f64,
}

/// Uniform mass on `[left, right]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Segment {
    pub left: f64,
    pub right: f64,
    pub mass: f64,
}

impl Segment {
    pub fn density(&self) -> f64 {
        self.mass / (self.right - self.left)
    }

    pub fn length(&self) -> f64 {
        self.right - self.left
    }
}

/// A nonnegative measure made of atoms and uniform segments. Atoms may sit
/// inside segments; the two parts superpose.
#[derive(Debug, Clone, PartialEq)]
pub struct Measure1D {
    atoms: Vec<Atom>,
    segments: Vec<Segment>,
    total_mass: f64,
}

fn check_atom(i: usize, a: &Atom) -> Result<()> {
    if !a.position.is_finite() || !a.mass.is_finite() {
        return Err(Error::InvalidMeasure(format!("atom {i} is not finite")));
    }
    if a.mass < 0.0 {
        return Err(Error::InvalidMeasure(format!("atom {i} has negative mass {}", a.mass)));
    }
    Ok(())
}

fn check_segment(i: usize, s: &Segment) -> Result<()> {
    if !s.left.is_finite() || !s.right.is_finite() || !s.mass.is_finite() {
        return Err(Error::InvalidMeasure(format!("segment {i} is not finite")));
    }
    if s.mass < 0.0 {
        return Err(Error::InvalidMeasure(format!("segment {i} has negative mass {}", s.mass)));
    }
    if s.left >= s.right {
        return Err(Error::InvalidMeasure(format!(
            "segment {i} has left {} >= right {}",
            s.left, s.right
        )));
    }
    Ok(())
}

/// Neumaier-compensated sum.
#[derive(Debug, Clone, Copy, Default)]
pub(crate) struct Accumulator {
    sum: f64,
    comp: f64,
}

impl Accumulator {
    pub(crate) fn add(&mut self, x: f64) {
        let t = self.sum + x;
        self.comp += if self.sum.abs() >= x.abs() { (self.sum - t) + x } else { (x - t) + self.sum };
        self.sum = t;
    }

    pub(crate) fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

fn canonical_atoms(mut atoms: Vec<Atom>) -> Vec<Atom> {
    atoms.retain(|a| a.mass > 0.0);
    atoms.sort_by(|a, b| a.position.total_cmp(&b.position));
    let mut out: Vec<Atom> = Vec::with_capacity(atoms.len());
    for a in atoms {
        match out.last_mut() {
            Some(last) if last.position == a.position => last.mass += a.mass,
            _ => out.push(a),
        }
    }
    out
}

const RENORM_TOL: f64 = 1e-14;

/// Sorts segments and, when they overlap, splits them at every endpoint and
/// adds densities.
fn canonical_segments(mut segs: Vec<Segment>) -> Vec<Segment> {
    segs.retain(|s| s.mass > 0.0);
    segs.sort_by(|a, b| a.left.total_cmp(&b.left).then(a.right.total_cmp(&b.right)));
    if segs.windows(2).all(|w| w[0].right <= w[1].left) {
        return segs;
    }
    let mut events: Vec<(f64, f64, i32, f64)> = Vec::with_capacity(2 * segs.len());
    for s in &segs {
        let d = s.density();
        events.push((s.left, d, 1, s.mass));
        events.push((s.right, -d, -1, 0.0));
    }
    events.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut out: Vec<Segment> = Vec::with_capacity(events.len());
    // long overlap chains would make a naive running density drift
    let mut density = Accumulator::default();
    let mut active = 0i64;
    // pieces of the current overlap cluster and the exact mass they carry
    let (mut cluster_start, mut cluster_mass) = (0usize, 0.0f64);
    let mut i = 0;
    while i < events.len() {
        let x = events[i].0;
        while i < events.len() && events[i].0 == x {
            density.add(events[i].1);
            active += i64::from(events[i].2);
            cluster_mass += events[i].3;
            i += 1;
        }
        if active == 0 {
            // piece lengths come from rounded endpoints; restore the exact mass
            // once the drift is visible, but leave rounding-level noise alone so
            // exactly cancelling densities stay exact
            let mut acc = Accumulator::default();
            out[cluster_start..].iter().for_each(|s| acc.add(s.mass));
            let got = acc.value();
            if got > 0.0 && (got - cluster_mass).abs() > RENORM_TOL * cluster_mass {
                let fix = cluster_mass / got;
                out[cluster_start..].iter_mut().for_each(|s| s.mass *= fix);
            }
            (density, cluster_mass) = (Accumulator::default(), 0.0);
            cluster_start = out.len();
            continue;
        }
        if let Some(&(next, ..)) = events.get(i) {
            let mass = density.value() * (next - x);
            if mass > 0.0 {
                out.push(Segment { left: x, right: next, mass });
            }
        }
    }
    out
}

impl Measure1D {
    /// Builds a measure from an already canonical description: atoms strictly
    /// increasing, segments sorted with disjoint interiors, all masses positive.
    pub fn new(atoms: Vec<Atom>, segments: Vec<Segment>) -> Result<Self> {
        for (i, a) in atoms.iter().enumerate() {
            check_atom(i, a)?;
            if a.mass == 0.0 {
                return Err(Error::InvalidMeasure(format!("atom {i} has zero mass")));
            }
        }
        for (i, s) in segments.iter().enumerate() {
            check_segment(i, s)?;
            if s.mass == 0.0 {
                return Err(Error::InvalidMeasure(format!("segment {i} has zero mass")));
            }
        }
        if let Some(i) = atoms.windows(2).position(|w| w[0].position >= w[1].position) {
            return Err(Error::InvalidMeasure(format!(
                "atoms {i} and {} are not strictly increasing",
                i + 1
            )));
        }
        if let Some(i) = segments.windows(2).position(|w| w[0].right > w[1].left) {
            return Err(Error::InvalidMeasure(format!(
                "segments {i} and {} overlap or are out of order",
                i + 1
            )));
        }
        Self::assemble(atoms, segments)
    }

    /// Builds a measure from arbitrary parts: atoms at equal positions merge,
    /// overlapping segments are split and their densities added, zero masses
    /// are dropped.
    pub fn from_parts(atoms: Vec<Atom>, segments: Vec<Segment>) -> Result<Self> {
        for (i, a) in atoms.iter().enumerate() {
            check_atom(i, a)?;
        }
        for (i, s) in segments.iter().enumerate() {
            check_segment(i, s)?;
        }
        Self::assemble(canonical_atoms(atoms), canonical_segments(segments))
    }

    fn assemble(atoms: Vec<Atom>, segments: Vec<Segment>) -> Result<Self> {
        let mut total = Accumulator::default();
        atoms.iter().for_each(|a| total.add(a.mass));
        segments.iter().for_each(|s| total.add(s.mass));
        let total_mass = total.value();
        if !(total_mass > 0.0) || !total_mass.is_finite() {
            return Err(Error::EmptyMeasure);
        }
        Ok(Self { atoms, segments, total_mass })
    }

    /// Unit atom at `x`.
    pub fn dirac(x: f64) -> Self {
        Self::new(vec![Atom { position: x, mass: 1.0 }], vec![])
            .expect("dirac at a finite position")
    }

    pub fn uniform(left: f64, right: f64, mass: f64) -> Result<Self> {
        Self::new(vec![], vec![Segment { left, right, mass }])
    }

    /// Atomic measure from `(position, mass)` pairs in any order.
    pub fn atomic(points: &[(f64, f64)]) -> Result<Self> {
        Self::from_parts(
            points.iter().map(|&(position, mass)| Atom { position, mass }).collect(),
            vec![],
        )
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    pub fn segments(&self) -> &[Segment] {
        &self.segments
    }

    pub fn total_mass(&self) -> f64 {
        self.total_mass
    }

    pub fn is_atomic(&self) -> bool {
        self.segments.is_empty()
    }

    /// Smallest closed interval carrying the measure.
    pub fn support_hull(&self) -> (f64, f64) {
        let lo = self
            .atoms
            .first()
            .map(|a| a.position)
            .into_iter()
            .chain(self.segments.first().map(|s| s.left))
            .fold(f64::INFINITY, f64::min);
        let hi = self
            .atoms
            .last()
            .map(|a| a.position)
            .into_iter()
            .chain(self.segments.last().map(|s| s.right))
            .fold(f64::NEG_INFINITY, f64::max);
        (lo, hi)
    }

    /// Multiplies every mass by `factor > 0`.
    pub fn scaled(&self, factor: f64) -> Result<Self> {
        if !(factor > 0.0) || !factor.is_finite() {
            return Err(Error::Domain { what: "mass scale", value: factor });
        }
        let atoms = self
            .atoms
            .iter()
            .map(|a| Atom { mass: a.mass * factor, ..*a })
            .collect();
        let segments = self
            .segments
            .iter()
            .map(|s| Segment { mass: s.mass * factor, ..*s })
            .collect();
        Self::assemble(atoms, segments)
    }

    /// Copy rescaled to unit total mass.
    pub fn normalized(&self) -> Self {
        self.scaled(1.0 / self.total_mass).expect("positive total mass")
    }

    /// Sorted, deduplicated atom positions and segment endpoints.
    pub fn breakpoints(&self) -> Vec<f64> {
        let mut xs: Vec<f64> = Vec::with_capacity(self.atoms.len() + 2 * self.segments.len());
        xs.extend(self.atoms.iter().map(|a| a.position));
        for s in &self.segments {
            xs.push(s.left);
            xs.push(s.right);
        }
        xs.sort_by(f64::total_cmp);
        xs.dedup();
        xs
    }

    /// Distribution function `x ↦ m((−∞, x])`.
    pub fn cdf(&self) -> MonotoneFn {
        let xs = self.breakpoints();
        let mut left = Vec::with_capacity(xs.len());
        let mut right = Vec::with_capacity(xs.len());
        let mut level = Accumulator::default();
        let mut ia = 0;
        let mut is = 0;
        // mass already credited for the current segment and the level at its start
        let mut seg_done = 0.0;
        for (k, &x) in xs.iter().enumerate() {
            if k > 0 {
                let prev = xs[k - 1];
                while is < self.segments.len() && self.segments[is].right <= prev {
                    is += 1;
                    seg_done = 0.0;
                }
                if let Some(s) = self.segments.get(is) {
                    if s.left <= prev && x <= s.right {
                        let piece = if x == s.right {
                            s.mass - seg_done
                        } else {
                            s.density() * (x - prev)
                        };
                        level.add(piece);
                        seg_done += piece;
                    }
                }
            }
            left.push(level.value());
            if ia < self.atoms.len() && self.atoms[ia].position == x {
                level.add(self.atoms[ia].mass);
                ia += 1;
            }
            right.push(level.value());
        }
        MonotoneFn { xs, left, right }
    }

    /// Quantile (left-inf pseudo-inverse of the distribution function).
    pub fn quantile(&self) -> Quantile {
        Quantile::from_cdf(&self.cdf())
    }

    /// Image under `x ↦ a x + b`.
    pub fn pushforward_affine(&self, a: f64, b: f64) -> Self {
        if a == 0.0 {
            return Self {
                atoms: vec![Atom { position: b, mass: self.total_mass }],
                segments: vec![],
                total_mass: self.total_mass,
            };
        }
        let map = |x: f64| a * x + b;
        let mut atoms: Vec<Atom> = self
            .atoms
            .iter()
            .map(|at| Atom { position: map(at.position), mass: at.mass })
            .collect();
        let mut segments = Vec::with_capacity(self.segments.len());
        for s in &self.segments {
            let (l, r) = if a > 0.0 { (map(s.left), map(s.right)) } else { (map(s.right), map(s.left)) };
            if l < r {
                segments.push(Segment { left: l, right: r, mass: s.mass });
            } else {
                // collapsed below floating resolution
                atoms.push(Atom { position: l, mass: s.mass });
            }
        }
        if a < 0.0 {
            atoms.reverse();
            segments.reverse();
        }
        let needs_canon = atoms.windows(2).any(|w| w[0].position >= w[1].position)
            || segments.windows(2).any(|w| w[0].right > w[1].left);
        if needs_canon {
            atoms = canonical_atoms(atoms);
            segments = canonical_segments(segments);
        }
        Self { atoms, segments, total_mass: self.total_mass }
    }

    /// `Σ wᵢ mᵢ`, with atoms merged and overlapping segments split.
    pub fn mixture(parts: &[(&Measure1D, f64)]) -> Result<Self> {
        let mut atoms = Vec::new();
        let mut segments = Vec::new();
        for &(m, w) in parts {
            if !w.is_finite() || w < 0.0 {
                return Err(Error::Domain { what: "mixture weight", value: w });
            }
            if w == 0.0 {
                continue;
            }
            atoms.extend(m.atoms.iter().map(|a| Atom { mass: a.mass * w, ..*a }));
            segments.extend(m.segments.iter().map(|s| Segment { mass: s.mass * w, ..*s }));
        }
        if atoms.is_empty() && segments.is_empty() {
            return Err(Error::ZeroWeights);
        }
        Self::assemble(canonical_atoms(atoms), canonical_segments(segments))
    }

    /// Restriction to a finite union of closed intervals.
    pub fn restrict(&self, set: &IntervalSet) -> Result<Self> {
        let atoms: Vec<Atom> = self.atoms.iter().copied().filter(|a| set.contains(a.position)).collect();
        let mut segments = Vec::new();
        for s in &self.segments {
            for i in set.meeting_open(s.left, s.right) {
                let (a, b) = set.intervals()[i];
                let (l, r) = (a.max(s.left), b.min(s.right));
                if l >= r {
                    continue;
                }
                let mass = if l == s.left && r == s.right { s.mass } else { s.density() * (r - l) };
                segments.push(Segment { left: l, right: r, mass });
            }
        }
        Self::assemble(atoms, segments)
    }

    /// `∫ |x|^p dm`.
    pub fn moment(&self, p: f64) -> f64 {
        let atoms: f64 = self.atoms.iter().map(|a| a.mass * a.position.abs().powf(p)).sum();
        let segs: f64 = self
            .segments
            .iter()
            .map(|s| {
                let integral = if p == 1.0 || p == 2.0 {
                    // antiderivative of |x|^p is x|x|^p/(p+1)
                    let g = |x: f64| x * x.abs().powf(p) / (p + 1.0);
                    g(s.right) - g(s.left)
                } else {
                    let f = |x: f64| x.abs().powf(p);
                    if s.left < 0.0 && s.right > 0.0 {
                        quad::integrate(f, s.left, 0.0, 1e-10, 0.0)
                            + quad::integrate(f, 0.0, s.right, 1e-10, 0.0)
                    } else {
                        quad::integrate(f, s.left, s.right, 1e-10, 0.0)
                    }
                };
                s.density() * integral
            })
            .sum();
        atoms + segs
    }

    /// Piecewise-constant density of the segment part, as `(x_k, d_k)` with
    /// density `d_k` on `[x_k, x_{k+1})`; the last entry carries density 0.
    pub(crate) fn density_steps(&self) -> Vec<(f64, f64)> {
        let mut out: Vec<(f64, f64)> = Vec::with_capacity(2 * self.segments.len());
        for s in &self.segments {
            match out.last_mut() {
                Some(last) if last.0 == s.left => last.1 = s.density(),
                _ => out.push((s.left, s.density())),
            }
            out.push((s.right, 0.0));
        }
        out
    }

    /// Equality of canonical representations, every coordinate (positions,
    /// endpoints, masses) within `tol`.
    pub fn approx_eq(&self, other: &Measure1D, tol: f64) -> bool {
        let close = |a: f64, b: f64| (a - b).abs() <= tol;
        self.atoms.len() == other.atoms.len()
            && self.segments.len() == other.segments.len()
            && self.atoms.iter().zip(&other.atoms).all(|(a, b)| close(a.position, b.position) && close(a.mass, b.mass))
            && self
                .segments
                .iter()
                .zip(&other.segments)
                .all(|(a, b)| close(a.left, b.left) && close(a.right, b.right) && close(a.mass, b.mass))
    }
}

/// Piecewise-linear nondecreasing function with jumps. Between breakpoints it
/// interpolates linearly from the right value at the left breakpoint to the left
/// value at the right breakpoint; outside it is constant.
#[derive(Debug, Clone, PartialEq)]
pub struct MonotoneFn {
    xs: Vec<f64>,
    left: Vec<f64>,
    right: Vec<f64>,
}

impl MonotoneFn {
    pub fn new(breakpoints: Vec<(f64, f64, f64)>) -> Result<Self> {
        let mut prev_x = f64::NEG_INFINITY;
        let mut prev_v = f64::NEG_INFINITY;
        for (i, &(x, vl, vr)) in breakpoints.iter().enumerate() {
            if !(x > prev_x) || vl > vr || vl < prev_v || !vl.is_finite() || !vr.is_finite() {
                return Err(Error::InvalidSpec(format!("breakpoint {i} breaks monotonicity")));
            }
            prev_x = x;
            prev_v = vr;
        }
        let (xs, (left, right)) = breakpoints.into_iter().map(|(x, l, r)| (x, (l, r))).unzip();
        Ok(Self { xs, left, right })
    }

    pub fn breakpoints(&self) -> impl Iterator<Item = (f64, f64, f64)> + '_ {
        self.xs
            .iter()
            .zip(self.left.iter().zip(&self.right))
            .map(|(&x, (&l, &r))| (x, l, r))
    }

    pub fn len(&self) -> usize {
        self.xs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.xs.is_empty()
    }

    pub(crate) fn xs(&self) -> &[f64] {
        &self.xs
    }

    fn between(&self, k: usize, x: f64) -> f64 {
        let (x0, x1) = (self.xs[k], self.xs[k + 1]);
        let (v0, v1) = (self.right[k], self.left[k + 1]);
        v0 + (v1 - v0) * ((x - x0) / (x1 - x0))
    }

    /// Right-continuous evaluation.
    pub fn eval(&self, x: f64) -> f64 {
        let n = self.xs.len();
        if n == 0 {
            return 0.0;
        }
        let k = self.xs.partition_point(|&b| b <= x);
        if k == 0 {
            return self.left[0];
        }
        let k = k - 1;
        if self.xs[k] == x || k + 1 == n {
            return self.right[k];
        }
        self.between(k, x)
    }

    /// Left limit at `x`.
    pub fn eval_left(&self, x: f64) -> f64 {
        let n = self.xs.len();
        if n == 0 {
            return 0.0;
        }
        let k = self.xs.partition_point(|&b| b < x);
        if k == n {
            return self.right[n - 1];
        }
        if self.xs[k] == x || k == 0 {
            return self.left[k];
        }
        self.between(k - 1, x)
    }

    /// Value just right of breakpoint `k` and just left of breakpoint `k + 1`.
    pub(crate) fn piece(&self, k: usize) -> (f64, f64) {
        (self.right[k], self.left[k + 1])
    }

    pub(crate) fn left_at(&self, k: usize) -> f64 {
        self.left[k]
    }

    pub(crate) fn right_at(&self, k: usize) -> f64 {
        self.right[k]
    }
}

/// Quantile function `r ↦ inf{x : F(x) ≥ r}` on `(0, total_mass]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Quantile {
    inner: MonotoneFn,
    mass: f64,
}

impl Quantile {
    /// Reflects the graph of `F` (jumps included) across the diagonal; equal
    /// levels collapse into one breakpoint whose left value is the infimum.
    pub fn from_cdf(cdf: &MonotoneFn) -> Self {
        let mut xs: Vec<f64> = Vec::with_capacity(cdf.len());
        let mut left: Vec<f64> = Vec::with_capacity(cdf.len());
        let mut right: Vec<f64> = Vec::with_capacity(cdf.len());
        let mut push = |r: f64, q: f64| match xs.last() {
            Some(&last) if last == r => *right.last_mut().unwrap() = q,
            _ => {
                xs.push(r);
                left.push(q);
                right.push(q);
            }
        };
        for (x, vl, vr) in cdf.breakpoints() {
            push(vl, x);
            push(vr, x);
        }
        let mass = xs.last().copied().unwrap_or(0.0);
        Self { inner: MonotoneFn { xs, left, right }, mass }
    }

    pub fn mass(&self) -> f64 {
        self.mass
    }

    pub fn eval(&self, r: f64) -> Result<f64> {
        if !(r > 0.0) || r > self.mass {
            return Err(Error::Domain { what: "quantile level", value: r });
        }
        Ok(self.inner.eval_left(r))
    }

    /// Value just above level `r` (the right limit).
    pub fn eval_right(&self, r: f64) -> f64 {
        self.inner.eval(r)
    }

    pub fn function(&self) -> &MonotoneFn {
        &self.inner
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn half_half() -> Measure1D {
        Measure1D::atomic(&[(0.0, 0.5), (1.0, 0.5)]).unwrap()
    }

    #[test]
    fn cdf_of_dirac() {
        let f = Measure1D::dirac(0.0).cdf();
        assert_eq!(f.eval(-1e-300), 0.0);
        assert_eq!(f.eval(0.0), 1.0);
        assert_eq!(f.eval_left(0.0), 0.0);
        assert_eq!(f.eval(5.0), 1.0);
    }

    #[test]
    fn cdf_of_uniform_and_steps() {
        let u = Measure1D::uniform(0.0, 1.0, 1.0).unwrap();
        assert_eq!(u.cdf().eval(0.25), 0.25);
        let f = half_half().cdf();
        assert_eq!(f.eval(0.5), 0.5);
        assert_eq!(f.eval(1.0), 1.0);
    }

    #[test]
    fn cdf_with_atom_inside_segment() {
        let m = Measure1D::from_parts(
            vec![Atom { position: 0.5, mass: 1.0 }],
            vec![Segment { left: 0.0, right: 1.0, mass: 1.0 }],
        )
        .unwrap();
        let f = m.cdf();
        assert_eq!(f.eval_left(0.5), 0.5);
        assert_eq!(f.eval(0.5), 1.5);
        assert_eq!(f.eval(0.75), 1.75);
        assert_eq!(f.eval(1.0), 2.0);
    }

    #[test]
    fn quantile_inf_convention() {
        let q = half_half().quantile();
        assert_eq!(q.eval(0.5).unwrap(), 0.0);
        assert_eq!(q.eval(0.6).unwrap(), 1.0);
        assert_eq!(q.eval(1.0).unwrap(), 1.0);
        assert!(q.eval(0.0).is_err());
        assert!(q.eval(1.0 + 1e-9).is_err());
        let u = Measure1D::uniform(0.0, 1.0, 1.0).unwrap().quantile();
        for r in [0.1, 0.37, 0.5, 1.0] {
            assert!((u.eval(r).unwrap() - r).abs() < 1e-15);
        }
    }

    #[test]
    fn quantile_mixed_matches_bisection() {
        let m = Measure1D::from_parts(
            vec![Atom { position: -1.0, mass: 0.25 }],
            vec![Segment { left: 0.0, right: 1.0, mass: 0.75 }],
        )
        .unwrap();
        let f = m.cdf();
        // bisection on F for inf{x : F(x) >= r}
        let bisect = |r: f64| {
            let (mut lo, mut hi) = (-10.0f64, 10.0f64);
            for _ in 0..200 {
                let mid = 0.5 * (lo + hi);
                if f.eval(mid) >= r {
                    hi = mid
                } else {
                    lo = mid
                }
            }
            hi
        };
        let q = m.quantile();
        for r in [0.25, 0.625] {
            assert!((q.eval(r).unwrap() - bisect(r)).abs() < 1e-12);
        }
        assert_eq!(q.eval(0.25).unwrap(), -1.0);
        assert!((q.eval(0.625).unwrap() - 0.5).abs() < 1e-15);
    }

    #[test]
    fn quantile_jumps_across_gaps() {
        let m = Measure1D::from_parts(
            vec![],
            vec![
                Segment { left: 0.0, right: 1.0, mass: 0.5 },
                Segment { left: 2.0, right: 3.0, mass: 0.5 },
            ],
        )
        .unwrap();
        let q = m.quantile();
        assert_eq!(q.eval(0.5).unwrap(), 1.0);
        assert_eq!(q.eval_right(0.5), 2.0);
        assert!((q.eval(0.75).unwrap() - 2.5).abs() < 1e-15);
    }

    #[test]
    fn pushforward_cases() {
        let h = 0.3;
        let d = Measure1D::dirac(0.0).pushforward_affine(1.0, -h);
        assert_eq!(d.atoms(), &[Atom { position: -h, mass: 1.0 }]);
        let u = Measure1D::uniform(0.0, 1.0, 1.0).unwrap().pushforward_affine(2.0, 0.0);
        assert_eq!(u.segments(), &[Segment { left: 0.0, right: 2.0, mass: 1.0 }]);
        let hh = half_half();
        assert!(hh.pushforward_affine(-1.0, 1.0).approx_eq(&hh, 0.0));
        let c = hh.pushforward_affine(0.0, 4.0);
        assert_eq!(c.atoms(), &[Atom { position: 4.0, mass: 1.0 }]);
    }

    #[test]
    fn mixture_cases() {
        let h = 0.25;
        let l = Measure1D::dirac(-h);
        let r = Measure1D::dirac(h);
        let m = Measure1D::mixture(&[(&l, 0.5), (&r, 0.5)]).unwrap();
        assert_eq!(m.atoms().len(), 2);
        assert_eq!(m.atoms()[0].mass, 0.5);

        let a = half_half();
        let b = Measure1D::atomic(&[(1.0, 0.5), (2.0, 0.5)]).unwrap();
        let m = Measure1D::mixture(&[(&a, 0.5), (&b, 0.5)]).unwrap();
        let got: Vec<(f64, f64)> = m.atoms().iter().map(|a| (a.position, a.mass)).collect();
        assert_eq!(got, vec![(0.0, 0.25), (1.0, 0.5), (2.0, 0.25)]);

        let u1 = Measure1D::uniform(0.0, 2.0, 1.0).unwrap();
        let u2 = Measure1D::uniform(1.0, 3.0, 1.0).unwrap();
        let m = Measure1D::mixture(&[(&u1, 1.0), (&u2, 1.0)]).unwrap();
        // oracle: pointwise density addition
        let density = |x: f64| {
            let mut d = 0.0;
            if (0.0..2.0).contains(&x) {
                d += 0.5
            }
            if (1.0..3.0).contains(&x) {
                d += 0.5
            }
            d
        };
        let segs: Vec<(f64, f64, f64)> = m.segments().iter().map(|s| (s.left, s.right, s.mass)).collect();
        assert_eq!(segs, vec![(0.0, 1.0, 0.5), (1.0, 2.0, 1.0), (2.0, 3.0, 0.5)]);
        for s in m.segments() {
            let mid = 0.5 * (s.left + s.right);
            assert_eq!(s.density(), density(mid));
        }

        assert_eq!(Measure1D::mixture(&[(&a, 0.0)]), Err(Error::ZeroWeights));
    }

    #[test]
    fn restrict_cases() {
        let r = half_half().restrict(&IntervalSet::interval(-0.5, 0.5).unwrap()).unwrap();
        assert_eq!(r.atoms(), &[Atom { position: 0.0, mass: 0.5 }]);
        let u = Measure1D::uniform(0.0, 1.0, 1.0).unwrap();
        let set = IntervalSet::new(vec![(0.0, 0.25), (0.75, 1.0)]).unwrap();
        let r = u.restrict(&set).unwrap();
        assert_eq!(r.segments().len(), 2);
        assert_eq!(r.total_mass(), 0.5);
        let full = u.restrict(&IntervalSet::interval(0.0, 1.0).unwrap()).unwrap();
        assert_eq!(full, u);
        // closed intervals keep endpoint atoms
        let e = half_half().restrict(&IntervalSet::interval(1.0, 2.0).unwrap()).unwrap();
        assert_eq!(e.total_mass(), 0.5);
        assert_eq!(
            half_half().restrict(&IntervalSet::interval(2.0, 3.0).unwrap()),
            Err(Error::EmptyMeasure)
        );
    }

    #[test]
    fn moments() {
        assert_eq!(Measure1D::dirac(3.0).moment(1.0), 3.0);
        let u = Measure1D::uniform(0.0, 1.0, 1.0).unwrap();
        assert!((u.moment(2.0) - 1.0 / 3.0).abs() < 1e-15);
        let s = Measure1D::atomic(&[(-2.0, 0.5), (2.0, 0.5)]).unwrap();
        assert_eq!(s.moment(3.0), 8.0);
        // quadrature path against x|x|^p/(p+1)
        let v = Measure1D::uniform(-1.0, 2.0, 3.0).unwrap();
        let p: f64 = 1.5;
        let exact = (2f64.powf(p + 1.0) + 1.0) / (p + 1.0);
        assert!((v.moment(p) - exact).abs() < 1e-10 * exact);
    }

    #[test]
    fn strict_constructor_rejects_bad_input() {
        assert!(Measure1D::new(vec![Atom { position: 1.0, mass: 1.0 }, Atom { position: 0.0, mass: 1.0 }], vec![]).is_err());
        assert!(Measure1D::new(vec![Atom { position: 0.0, mass: -1.0 }], vec![]).is_err());
        assert!(Measure1D::uniform(1.0, 1.0, 1.0).is_err());
        assert!(Measure1D::new(
            vec![],
            vec![Segment { left: 0.0, right: 2.0, mass: 1.0 }, Segment { left: 1.0, right: 3.0, mass: 1.0 }]
        )
        .is_err());
        assert_eq!(Measure1D::new(vec![], vec![]), Err(Error::EmptyMeasure));
    }
}
