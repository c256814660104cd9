//! Exact one-dimensional transport: Wasserstein distances through quantile
//! functions (and, for `p = 1`, through distribution functions), monotone plan
//! samples, dual lower bounds, grid c-transforms and the coarse porous set.

use crate::error::{Error, Result};
use crate::measure::{Measure1D, MonotoneFn};
use crate::piecewise::PiecewiseLinear;
use crate::quad;

/// Relative tolerance under which two total masses count as equal.
pub const MASS_TOL: f64 = 1e-12;
/// Maximal disagreement between the quantile and CDF routes for `W_1`.
pub const ROUTE_TOL: f64 = 1e-9;
const QUAD_REL_TOL: f64 = 1e-10;

fn check_p(p: f64) -> Result<()> {
    if !(p >= 1.0) || !p.is_finite() {
        return Err(Error::Domain { what: "cost exponent", value: p });
    }
    Ok(())
}

fn common_mass(m: &Measure1D, n: &Measure1D) -> Result<f64> {
    let (a, b) = (m.total_mass(), n.total_mass());
    if (a - b).abs() > MASS_TOL * a.max(b).max(1.0) {
        return Err(Error::MassMismatch { left: a, right: b });
    }
    Ok(a.min(b))
}

/// `∫_0^len |a + (b − a) t/len|^p dt`.
fn power_piece(len: f64, a: f64, b: f64, p: f64) -> f64 {
    if len <= 0.0 || (a == 0.0 && b == 0.0) {
        return 0.0;
    }
    if p == 1.0 {
        let (aa, ab) = (a.abs(), b.abs());
        if a * b >= 0.0 {
            return len * 0.5 * (aa + ab);
        }
        return len * 0.5 * (a * a + b * b) / (aa + ab);
    }
    if p == 2.0 {
        return len * (a * a + a * b + b * b) / 3.0;
    }
    let f = |t: f64| (a + (b - a) * t).abs().powf(p);
    let unit = if a * b < 0.0 {
        let t0 = a / (a - b);
        quad::integrate(f, 0.0, t0, QUAD_REL_TOL, 0.0) + quad::integrate(f, t0, 1.0, QUAD_REL_TOL, 0.0)
    } else {
        quad::integrate(f, 0.0, 1.0, QUAD_REL_TOL, 0.0)
    };
    len * unit
}

/// Sorted union of the breakpoints of `f` and `g`, clipped to `[lo, hi]` with
/// both ends included.
fn merged_knots(f: &MonotoneFn, g: &MonotoneFn, lo: f64, hi: f64) -> Vec<f64> {
    let (a, b) = (f.xs(), g.xs());
    let mut out = Vec::with_capacity(a.len() + b.len() + 2);
    out.push(lo);
    let (mut i, mut j) = (0, 0);
    while i < a.len() || j < b.len() {
        let x = if j == b.len() || (i < a.len() && a[i] <= b[j]) {
            i += 1;
            a[i - 1]
        } else {
            j += 1;
            b[j - 1]
        };
        if x > *out.last().unwrap() && x < hi {
            out.push(x);
        }
    }
    if hi > *out.last().unwrap() {
        out.push(hi);
    }
    out
}

/// Walks a monotone function along increasing knots of a refinement.
struct Cursor<'a> {
    f: &'a MonotoneFn,
    /// number of own breakpoints `<= r` for the current knot `r`
    k: usize,
}

impl<'a> Cursor<'a> {
    fn new(f: &'a MonotoneFn) -> Self {
        Self { f, k: 0 }
    }

    fn interp(&self, j: usize, r: f64) -> f64 {
        let xs = self.f.xs();
        let (v0, v1) = self.f.piece(j);
        v0 + (v1 - v0) * ((r - xs[j]) / (xs[j + 1] - xs[j]))
    }

    /// Moves to knot `r` and returns `f(r+)`.
    fn right_at(&mut self, r: f64) -> f64 {
        let xs = self.f.xs();
        while self.k < xs.len() && xs[self.k] <= r {
            self.k += 1;
        }
        if self.k == 0 {
            return self.f.left_at(0);
        }
        let j = self.k - 1;
        if xs[j] == r || j + 1 == xs.len() {
            return self.f.right_at(j);
        }
        self.interp(j, r)
    }

    /// `f(r−)` for the next knot `r` (no own breakpoint strictly between).
    fn left_at(&self, r: f64) -> f64 {
        let xs = self.f.xs();
        let n = xs.len();
        if self.k < n && xs[self.k] == r {
            return self.f.left_at(self.k);
        }
        if self.k == 0 {
            return self.f.left_at(0);
        }
        if self.k == n {
            return self.f.right_at(n - 1);
        }
        self.interp(self.k - 1, r)
    }
}

/// Calls `visit(len, d_start, d_end)` for every piece of the common refinement
/// of `f − g` on `[lo, hi]`, with one-sided limits at the piece ends.
fn for_each_piece(f: &MonotoneFn, g: &MonotoneFn, lo: f64, hi: f64, mut visit: impl FnMut(f64, f64, f64)) {
    let knots = merged_knots(f, g, lo, hi);
    let (mut cf, mut cg) = (Cursor::new(f), Cursor::new(g));
    for w in knots.windows(2) {
        let (r0, r1) = (w[0], w[1]);
        let d0 = cf.right_at(r0) - cg.right_at(r0);
        let d1 = cf.left_at(r1) - cg.left_at(r1);
        visit(r1 - r0, d0, d1);
    }
}

/// Optimal transport cost `∫_0^M |Q_m − Q_n|^p dr` between two measures of
/// equal mass `M` (no normalization).
pub fn transport_cost(m: &Measure1D, n: &Measure1D, p: f64) -> Result<f64> {
    check_p(p)?;
    let mass = common_mass(m, n)?;
    let (qm, qn) = (m.quantile(), n.quantile());
    let mut acc = 0.0;
    for_each_piece(qm.function(), qn.function(), 0.0, mass, |len, a, b| {
        acc += power_piece(len, a, b, p)
    });
    Ok(acc)
}

/// `W_1` through quantile functions.
pub fn w1_quantile(m: &Measure1D, n: &Measure1D) -> Result<f64> {
    transport_cost(m, n, 1.0)
}

/// `W_1 = ∫ |F_m − F_n| dx`, sign changes located per linear piece.
pub fn w1_cdf(m: &Measure1D, n: &Measure1D) -> Result<f64> {
    common_mass(m, n)?;
    let (fm, fn_) = (m.cdf(), n.cdf());
    let (a0, a1) = m.support_hull();
    let (b0, b1) = n.support_hull();
    let mut acc = 0.0;
    for_each_piece(&fm, &fn_, a0.min(b0), a1.max(b1), |len, a, b| {
        acc += power_piece(len, a, b, 1.0)
    });
    Ok(acc)
}

/// `W_p(m, n)`. Measures of common mass `M ≠ 1` follow the convention
/// `W_p(m, n) = M · W_p(m/M, n/M)`. For `p = 1` the quantile and CDF routes
/// are both evaluated and must agree.
pub fn wasserstein(m: &Measure1D, n: &Measure1D, p: f64) -> Result<f64> {
    check_p(p)?;
    let mass = common_mass(m, n)?;
    let cost = transport_cost(m, n, p)?;
    if p == 1.0 {
        let other = w1_cdf(m, n)?;
        if (cost - other).abs() > ROUTE_TOL * (1.0 + cost.abs()) {
            return Err(Error::Numeric(format!(
                "W1 routes disagree: quantile {cost:e}, cdf {other:e}"
            )));
        }
        return Ok(cost);
    }
    Ok(mass * (cost / mass).powf(1.0 / p))
}

/// Largest `|y − x|` over the support of the monotone plan.
pub fn max_displacement(m: &Measure1D, n: &Measure1D) -> Result<f64> {
    let mass = common_mass(m, n)?;
    let (qm, qn) = (m.quantile(), n.quantile());
    let mut worst: f64 = 0.0;
    // levels that coincide up to rounding leave slivers pairing unrelated atoms
    let sliver = MASS_TOL * mass;
    for_each_piece(qm.function(), qn.function(), 0.0, mass, |len, a, b| {
        if len > sliver {
            worst = worst.max(a.abs()).max(b.abs());
        }
    });
    Ok(worst)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlanPoint {
    pub r: f64,
    pub x: f64,
    pub y: f64,
}

/// Samples `(r, F_m^{[-1]}(r), F_n^{[-1]}(r))` of the monotone plan, `r` strictly increasing.
#[derive(Debug, Clone, PartialEq)]
pub struct PlanSample {
    pub points: Vec<PlanPoint>,
}

impl PlanSample {
    pub fn max_displacement(&self) -> f64 {
        self.points.iter().fold(0.0, |m, p| m.max((p.y - p.x).abs()))
    }
}

pub fn monotone_plan(m: &Measure1D, n: &Measure1D, rs: &[f64]) -> Result<PlanSample> {
    common_mass(m, n)?;
    let (qm, qn) = (m.quantile(), n.quantile());
    let mut rs = rs.to_vec();
    rs.sort_by(f64::total_cmp);
    rs.dedup();
    let points = rs
        .into_iter()
        .map(|r| Ok(PlanPoint { r, x: qm.eval(r)?, y: qn.eval(r)? }))
        .collect::<Result<_>>()?;
    Ok(PlanSample { points })
}

/// `∫ψ dn − ∫ψ dm` for a 1-Lipschitz `ψ`; never exceeds `W_1(m, n)`.
pub fn dual_lower_bound_w1(m: &Measure1D, n: &Measure1D, psi: &PiecewiseLinear) -> Result<f64> {
    psi.check_one_lipschitz()?;
    common_mass(m, n)?;
    Ok(psi.integrate_against(n) - psi.integrate_against(m))
}

/// Potential sampled on the uniform grid `origin + i·step`, paired with the
/// cost `|x − y|^p`.
#[derive(Debug, Clone, PartialEq)]
pub struct GridPotential {
    origin: f64,
    step: f64,
    values: Vec<f64>,
    p: f64,
}

#[inline]
fn cost(p: f64, x: f64, y: f64) -> f64 {
    let d = (x - y).abs();
    if p == 1.0 {
        d
    } else if p == 2.0 {
        d * d
    } else {
        d.powf(p)
    }
}

impl GridPotential {
    pub fn new(origin: f64, step: f64, values: Vec<f64>, p: f64) -> Result<Self> {
        check_p(p)?;
        if !(step > 0.0) || !step.is_finite() || !origin.is_finite() {
            return Err(Error::InvalidSpec(format!("bad grid origin {origin} / step {step}")));
        }
        if values.is_empty() || values.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidSpec("grid values must be finite and nonempty".into()));
        }
        Ok(Self { origin, step, values, p })
    }

    /// Samples `f` at `origin + i·step` for `i < len`.
    pub fn sample(origin: f64, step: f64, len: usize, p: f64, f: impl Fn(f64) -> f64) -> Result<Self> {
        let values = (0..len).map(|i| f(origin + i as f64 * step)).collect();
        Self::new(origin, step, values, p)
    }

    pub fn point(&self, i: usize) -> f64 {
        self.origin + i as f64 * self.step
    }

    pub fn points(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.values.len()).map(|i| self.point(i))
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn step(&self) -> f64 {
        self.step
    }

    pub fn exponent(&self) -> f64 {
        self.p
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    fn with_values(&self, values: Vec<f64>) -> Self {
        Self { values, ..self.clone() }
    }

    /// Linear interpolation of the samples, constant outside the grid.
    pub fn to_piecewise(&self) -> PiecewiseLinear {
        let knots = self.points().zip(self.values.iter().copied()).collect();
        PiecewiseLinear::new(knots, 0.0, 0.0).expect("grid points increase")
    }
}

/// `φ^c(y_j) = min_i φ(x_i) + |x_i − y_j|^p` by direct enumeration.
pub fn c_transform_reference(phi: &GridPotential) -> GridPotential {
    let xs: Vec<f64> = phi.points().collect();
    let out = xs
        .iter()
        .map(|&y| {
            xs.iter()
                .zip(&phi.values)
                .map(|(&x, &v)| v + cost(phi.p, x, y))
                .fold(f64::INFINITY, f64::min)
        })
        .collect();
    phi.with_values(out)
}

/// Grid c-transform; linear-time for `p ∈ {1, 2}`, direct enumeration otherwise.
pub fn c_transform(phi: &GridPotential) -> GridPotential {
    if phi.p == 1.0 {
        c_transform_p1(phi)
    } else if phi.p == 2.0 {
        c_transform_p2(phi)
    } else {
        c_transform_reference(phi)
    }
}

/// Two sweeps: for `i ≤ j` the minimizer of `φ_i + x_j − x_i` does not depend
/// on `j`, and symmetrically for `i ≥ j`.
#[allow(clippy::needless_range_loop)] // both sweeps index by the target j
fn c_transform_p1(phi: &GridPotential) -> GridPotential {
    let n = phi.values.len();
    let xs: Vec<f64> = phi.points().collect();
    let v = &phi.values;
    let eval = |i: usize, j: usize| v[i] + cost(1.0, xs[i], xs[j]);
    let mut forward = vec![0.0; n];
    let mut best = 0;
    for j in 0..n {
        if eval(j, j) <= eval(best, j) {
            best = j;
        }
        forward[j] = eval(best, j);
    }
    let mut out = vec![0.0; n];
    let mut best = n - 1;
    for j in (0..n).rev() {
        if eval(j, j) <= eval(best, j) {
            best = j;
        }
        out[j] = forward[j].min(eval(best, j));
    }
    phi.with_values(out)
}

/// Lower envelope of the parabolas `φ_i + (y − x_i)²`.
fn c_transform_p2(phi: &GridPotential) -> GridPotential {
    let n = phi.values.len();
    let xs: Vec<f64> = phi.points().collect();
    let v = &phi.values;
    let lift = |i: usize| v[i] + xs[i] * xs[i];
    let meet = |a: usize, b: usize| (lift(b) - lift(a)) / (2.0 * (xs[b] - xs[a]));
    let mut hull: Vec<usize> = Vec::with_capacity(n);
    let mut bounds: Vec<f64> = Vec::with_capacity(n + 1);
    hull.push(0);
    bounds.push(f64::NEG_INFINITY);
    for q in 1..n {
        loop {
            let top = *hull.last().unwrap();
            let s = meet(top, q);
            if hull.len() > 1 && s <= *bounds.last().unwrap() {
                hull.pop();
                bounds.pop();
            } else {
                hull.push(q);
                bounds.push(s);
                break;
            }
        }
    }
    let eval = |i: usize, j: usize| v[i] + cost(2.0, xs[i], xs[j]);
    let mut k = 0;
    let out = (0..n)
        .map(|j| {
            while k + 1 < hull.len() && bounds[k + 1] < xs[j] {
                k += 1;
            }
            // neighbours guard against rounding in the breakpoints
            let mut best = eval(hull[k], j);
            if k > 0 {
                best = best.min(eval(hull[k - 1], j));
            }
            if k + 1 < hull.len() {
                best = best.min(eval(hull[k + 1], j));
            }
            best
        })
        .collect();
    phi.with_values(out)
}

/// Grid points where the second-difference quotient of `φ` against `φ^c`
/// reaches `γ`, together with the separation radii.
#[derive(Debug, Clone, PartialEq)]
pub struct CoarsePorousSet {
    pub points: Vec<f64>,
    /// `h` after snapping to the grid.
    pub h: f64,
    pub gamma: f64,
    /// `(2γ − 1)^{1/p}`
    pub kappa: f64,
}

impl CoarsePorousSet {
    /// First pair at distance in `(h(1−κ), h(1+κ))`, beyond a slack of `tol·h`.
    pub fn separation_violation(&self, tol: f64) -> Option<(f64, f64)> {
        let slack = tol * self.h;
        let outer = self.h * (1.0 + self.kappa) - slack;
        let inner = self.h * (1.0 - self.kappa) + slack;
        for (i, &x) in self.points.iter().enumerate() {
            for &y in &self.points[i + 1..] {
                let d = y - x;
                if d >= outer {
                    break;
                }
                if d > inner {
                    return Some((x, y));
                }
            }
        }
        None
    }
}

/// Evaluates `(½[φ^c(x−h) + φ^c(x+h)] − φ(x)) / h^p ≥ γ` at every grid point
/// where `x ± h` stays on the grid, and checks that the result splits into
/// clusters of diameter `≤ h(1−κ)` that lie `≥ h(1+κ)` apart.
pub fn coarse_porous_set(phi: &GridPotential, gamma: f64, h: f64) -> Result<CoarsePorousSet> {
    if !(gamma > 0.5 && gamma <= 1.0) {
        return Err(Error::Domain { what: "gamma", value: gamma });
    }
    if !(h > 0.0) || !h.is_finite() {
        return Err(Error::Domain { what: "h", value: h });
    }
    let k = (h / phi.step).round() as usize;
    let n = phi.values.len();
    if k == 0 {
        return Err(Error::GridTooNarrow(format!("h = {h} is below the grid step {}", phi.step)));
    }
    if 2 * k >= n {
        return Err(Error::GridTooNarrow(format!(
            "{n} grid points cannot hold a shift of {k} steps on both sides"
        )));
    }
    let hs = k as f64 * phi.step;
    let conj = c_transform(phi);
    let scale = hs.powf(phi.p);
    let points = (k..n - k)
        .filter(|&j| {
            let q = (0.5 * (conj.values[j - k] + conj.values[j + k]) - phi.values[j]) / scale;
            q >= gamma
        })
        .map(|j| phi.point(j))
        .collect();
    let set = CoarsePorousSet { points, h: hs, gamma, kappa: (2.0 * gamma - 1.0).powf(1.0 / phi.p) };
    if let Some((x, y)) = set.separation_violation(1e-9) {
        return Err(Error::Numeric(format!(
            "separation fails for {x} and {y} at h = {hs}, kappa = {}",
            set.kappa
        )));
    }
    Ok(set)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SubmeasureBound {
    /// Optimal cost `W_p^p(α, β)` (unnormalized).
    pub cost: f64,
    /// `ε · (diam K)^p`
    pub bound: f64,
    pub epsilon: f64,
    pub diameter: f64,
}

/// Density of a right-continuous step list at `x`.
fn step_at(steps: &[(f64, f64)], x: f64) -> f64 {
    match steps.partition_point(|&(s, _)| s <= x) {
        0 => 0.0,
        k => steps[k - 1].1,
    }
}

fn check_submeasure(sub: &Measure1D, mu: &Measure1D, name: &str) -> Result<()> {
    let le = |a: f64, b: f64| a <= b * (1.0 + 1e-9) + 1e-15;
    for a in sub.atoms() {
        let i = mu.atoms().partition_point(|b| b.position < a.position);
        let host = mu.atoms().get(i).filter(|b| b.position == a.position).map_or(0.0, |b| b.mass);
        if !le(a.mass, host) {
            return Err(Error::NotSubmeasure(format!(
                "{name} puts mass {} at {} where the reference has {host}",
                a.mass, a.position
            )));
        }
    }
    let (ds, dm) = (sub.density_steps(), mu.density_steps());
    for &(x, _) in ds.iter().chain(&dm) {
        let (a, b) = (step_at(&ds, x), step_at(&dm, x));
        if !le(a, b) {
            return Err(Error::NotSubmeasure(format!(
                "{name} has density {a} at {x}, above the reference density {b}"
            )));
        }
    }
    Ok(())
}

/// Certifies `W_p^p(α, β) ≤ ε (diam K)^p` for `α, β ≤ μ` of equal mass, with
/// `ε = μ(ℝ) − α(ℝ)` and `K` the support hull of `μ`.
pub fn submeasure_distance_bound(
    mu: &Measure1D,
    alpha: &Measure1D,
    beta: &Measure1D,
    p: f64,
) -> Result<SubmeasureBound> {
    check_p(p)?;
    check_submeasure(alpha, mu, "alpha")?;
    check_submeasure(beta, mu, "beta")?;
    let mass = common_mass(alpha, beta)?;
    let epsilon = (mu.total_mass() - mass).max(0.0);
    let (lo, hi) = mu.support_hull();
    let diameter = hi - lo;
    let cost = transport_cost(alpha, beta, p)?;
    let bound = epsilon * diameter.powf(p);
    if cost > bound + 1e-9 {
        return Err(Error::Numeric(format!("submeasure estimate fails: {cost:e} > {bound:e}")));
    }
    Ok(SubmeasureBound { cost, bound, epsilon, diameter })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measure::{Atom, Segment};
    use crate::IntervalSet;

    fn atoms(points: &[(f64, f64)]) -> Measure1D {
        Measure1D::atomic(points).unwrap()
    }

    fn shift_pair(h: f64) -> Measure1D {
        atoms(&[(-h, 0.5), (h, 0.5)])
    }

    #[test]
    fn dirac_against_split_pair() {
        let h = 0.25;
        for p in [1.0, 2.0, 3.0] {
            let w = wasserstein(&Measure1D::dirac(0.0), &shift_pair(h), p).unwrap();
            assert!((w - h).abs() < 1e-15, "p = {p}: {w}");
        }
    }

    #[test]
    fn simple_distances() {
        assert_eq!(wasserstein(&Measure1D::dirac(0.0), &Measure1D::dirac(3.0), 1.0).unwrap(), 3.0);
        let a = atoms(&[(0.0, 0.5), (1.0, 0.5)]);
        let b = atoms(&[(0.0, 0.5), (2.0, 0.5)]);
        let w = wasserstein(&a, &b, 2.0).unwrap();
        assert!((w - 0.5f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn uniform_against_its_superposition() {
        let u = Measure1D::uniform(0.0, 1.0, 1.0).unwrap();
        let h = 0.1;
        let l = u.pushforward_affine(1.0, -h);
        let r = u.pushforward_affine(1.0, h);
        let uh = Measure1D::mixture(&[(&l, 0.5), (&r, 0.5)]).unwrap();
        // exact: two boundary triangles of area h²/4 each side of the support ends
        let w = wasserstein(&u, &uh, 1.0).unwrap();
        assert!((w - h * h).abs() < 1e-15, "{w}");
        assert!((w1_cdf(&u, &uh).unwrap() - h * h).abs() < 1e-15);
    }

    #[test]
    fn non_integer_power_matches_antiderivative() {
        // oracle: ∫_0^1 |a + (b−a)t|^p dt = (|b|^{p+1} − |a|^{p+1}) / ((p+1)(|b| − |a|)) for same-sign a ≠ b
        let oracle = |a: f64, b: f64, p: f64| {
            let g = |x: f64| x * x.abs().powf(p) / (p + 1.0);
            if a == b {
                a.abs().powf(p)
            } else {
                (g(b) - g(a)) / (b - a)
            }
        };
        for &(a, b) in &[(0.3, 1.7), (-2.0, -0.1), (-1.0, 2.0), (0.0, 1.0), (1.0, 1.25)] {
            for p in [1.5, 2.5, 3.0, 4.2] {
                let got = power_piece(1.0, a, b, p);
                let want = oracle(a, b, p);
                assert!((got - want).abs() <= 1e-10 * want.abs() + 1e-15, "a={a} b={b} p={p}");
            }
        }
    }

    #[test]
    fn mass_mismatch_is_reported() {
        let a = Measure1D::dirac(0.0);
        let b = atoms(&[(0.0, 2.0)]);
        assert!(matches!(wasserstein(&a, &b, 1.0), Err(Error::MassMismatch { .. })));
        assert!(wasserstein(&a, &a, 0.5).is_err());
    }

    #[test]
    fn submass_convention() {
        let a = atoms(&[(0.0, 0.5)]);
        let b = atoms(&[(2.0, 0.5)]);
        // M · W_2(δ_0, δ_2) = 0.5 · 2
        assert!((wasserstein(&a, &b, 2.0).unwrap() - 1.0).abs() < 1e-15);
        assert!((transport_cost(&a, &b, 2.0).unwrap() - 2.0).abs() < 1e-15);
    }

    #[test]
    fn plan_samples() {
        let s = monotone_plan(&Measure1D::dirac(0.0), &Measure1D::dirac(1.0), &[0.5]).unwrap();
        assert_eq!(s.points, vec![PlanPoint { r: 0.5, x: 0.0, y: 1.0 }]);
        let a = atoms(&[(0.0, 0.5), (1.0, 0.5)]);
        let b = atoms(&[(-1.0, 0.5), (2.0, 0.5)]);
        let s = monotone_plan(&a, &b, &[0.75, 0.25]).unwrap();
        let pairs: Vec<(f64, f64)> = s.points.iter().map(|p| (p.x, p.y)).collect();
        assert_eq!(pairs, vec![(0.0, -1.0), (1.0, 2.0)]);
        assert!(monotone_plan(&a, &b, &[0.0]).is_err());
        assert!(monotone_plan(&a, &b, &[1.5]).is_err());
        assert_eq!(max_displacement(&a, &b).unwrap(), 1.0);
    }

    #[test]
    fn dual_bounds() {
        let (a, b) = (Measure1D::dirac(0.0), Measure1D::dirac(1.0));
        assert_eq!(dual_lower_bound_w1(&a, &b, &PiecewiseLinear::zero()).unwrap(), 0.0);
        assert_eq!(dual_lower_bound_w1(&a, &b, &PiecewiseLinear::affine(1.0, 0.0)).unwrap(), 1.0);
        let steep = PiecewiseLinear::affine(1.5, 0.0);
        assert!(matches!(dual_lower_bound_w1(&a, &b, &steep), Err(Error::NotLipschitz { .. })));
    }

    #[test]
    fn c_transform_examples() {
        let zero = GridPotential::sample(-1.0, 0.125, 17, 1.0, |_| 0.0).unwrap();
        assert!(c_transform(&zero).values().iter().all(|&v| v == 0.0));
        let abs = GridPotential::sample(-1.0, 0.125, 17, 1.0, f64::abs).unwrap();
        assert_eq!(c_transform(&abs), abs);
        // brute-force oracle: min(y², 10 + min over other grid points |x_i − y|²)
        let step = 0.1;
        let n = 41;
        let phi = GridPotential::sample(-2.0, step, n, 2.0, |x| if x.abs() < 1e-9 { 0.0 } else { 10.0 }).unwrap();
        let zero_index = 20;
        let conj = c_transform(&phi);
        for (j, y) in phi.points().enumerate() {
            let y0 = phi.point(zero_index);
            let others = (0..n)
                .filter(|&i| i != zero_index)
                .map(|i| 10.0 + (phi.point(i) - y).powi(2))
                .fold(f64::INFINITY, f64::min);
            let want = ((y0 - y) * (y0 - y)).min(others);
            assert!((conj.values()[j] - want).abs() < 1e-12);
        }
        assert_eq!(conj, c_transform_reference(&phi));
    }

    #[test]
    fn corner_potential_gives_single_point() {
        // V-shaped corner d(·, {0}) sampled on a dyadic grid
        let step = 1.0 / 64.0;
        let phi = GridPotential::sample(-1.0, step, 129, 1.0, f64::abs).unwrap();
        let set = coarse_porous_set(&phi, 0.9, 0.1).unwrap();
        assert_eq!(set.points, vec![0.0]);
        let flat = GridPotential::sample(-1.0, step, 129, 1.0, |_| 0.0).unwrap();
        assert!(coarse_porous_set(&flat, 0.6, 0.1).unwrap().points.is_empty());
        assert!(matches!(coarse_porous_set(&phi, 0.9, 1.5), Err(Error::GridTooNarrow(_))));
        assert!(matches!(coarse_porous_set(&phi, 0.9, 1e-4), Err(Error::GridTooNarrow(_))));
        assert!(coarse_porous_set(&phi, 0.5, 0.1).is_err());
    }

    #[test]
    fn submeasure_examples() {
        let mu = atoms(&[(0.0, 0.5), (1.0, 0.5)]);
        let b = submeasure_distance_bound(&mu, &mu, &mu, 1.0).unwrap();
        assert_eq!((b.cost, b.bound), (0.0, 0.0));

        let u = Measure1D::uniform(0.0, 1.0, 1.0).unwrap();
        let alpha = u.restrict(&IntervalSet::interval(0.0, 0.95).unwrap()).unwrap();
        let beta = u.restrict(&IntervalSet::interval(0.05, 1.0).unwrap()).unwrap();
        let b = submeasure_distance_bound(&u, &alpha, &beta, 1.0).unwrap();
        // exact CDF integration: 0.05²/2 + 0.9·0.05 + 0.05²/2
        assert!((b.cost - 0.0475).abs() < 1e-15, "{}", b.cost);
        assert!((b.epsilon - 0.05).abs() < 1e-15);
        assert!((b.bound - 0.05).abs() < 1e-15);

        let alpha = atoms(&[(0.0, 0.5), (1.0, 0.25)]);
        let beta = atoms(&[(0.0, 0.25), (1.0, 0.5)]);
        let b = submeasure_distance_bound(&mu, &alpha, &beta, 1.0).unwrap();
        assert!((b.cost - 0.25).abs() < 1e-15);
        assert!((b.bound - 0.25).abs() < 1e-15);

        let too_big = atoms(&[(0.0, 0.75)]);
        let other = atoms(&[(1.0, 0.75)]);
        assert!(matches!(
            submeasure_distance_bound(&mu, &too_big, &other, 1.0),
            Err(Error::NotSubmeasure(_))
        ));
        let dense = Measure1D::from_parts(vec![], vec![Segment { left: 0.0, right: 0.5, mass: 0.75 }]).unwrap();
        assert!(submeasure_distance_bound(&u, &dense, &dense, 1.0).is_err());
        let _ = Atom { position: 0.0, mass: 1.0 };
    }
}
