//! Continuous piecewise-linear functions with linear extension outside the
//! knots. Used for dual potentials and for the Cantor layer functions.

use crate::error::{Error, Result};
use crate::measure::Measure1D;

#[derive(Debug, Clone, PartialEq)]
pub struct PiecewiseLinear {
    xs: Vec<f64>,
    ys: Vec<f64>,
    left_slope: f64,
    right_slope: f64,
}

impl PiecewiseLinear {
    pub fn new(knots: Vec<(f64, f64)>, left_slope: f64, right_slope: f64) -> Result<Self> {
        if knots.is_empty() {
            return Err(Error::InvalidSpec("piecewise-linear function needs a knot".into()));
        }
        if knots.iter().any(|&(x, y)| !x.is_finite() || !y.is_finite())
            || !left_slope.is_finite()
            || !right_slope.is_finite()
        {
            return Err(Error::InvalidSpec("non-finite knot or slope".into()));
        }
        if let Some(i) = knots.windows(2).position(|w| w[0].0 >= w[1].0) {
            return Err(Error::InvalidSpec(format!("knots {i} and {} not increasing", i + 1)));
        }
        let (xs, ys) = knots.into_iter().unzip();
        Ok(Self { xs, ys, left_slope, right_slope })
    }

    pub fn zero() -> Self {
        Self { xs: vec![0.0], ys: vec![0.0], left_slope: 0.0, right_slope: 0.0 }
    }

    /// The identity-like function `x ↦ slope · x + offset`.
    pub fn affine(slope: f64, offset: f64) -> Self {
        Self { xs: vec![0.0], ys: vec![offset], left_slope: slope, right_slope: slope }
    }

    pub fn knots(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.xs.iter().copied().zip(self.ys.iter().copied())
    }

    pub fn eval(&self, x: f64) -> f64 {
        let n = self.xs.len();
        if x <= self.xs[0] {
            return self.ys[0] + self.left_slope * (x - self.xs[0]);
        }
        if x >= self.xs[n - 1] {
            return self.ys[n - 1] + self.right_slope * (x - self.xs[n - 1]);
        }
        let k = self.xs.partition_point(|&b| b <= x) - 1;
        let (x0, x1) = (self.xs[k], self.xs[k + 1]);
        if x == x0 {
            return self.ys[k];
        }
        self.ys[k] + (self.ys[k + 1] - self.ys[k]) * ((x - x0) / (x1 - x0))
    }

    /// All slopes from left to right, end slopes included.
    pub fn slopes(&self) -> impl Iterator<Item = f64> + '_ {
        let inner = self
            .xs
            .windows(2)
            .zip(self.ys.windows(2))
            .map(|(x, y)| (y[1] - y[0]) / (x[1] - x[0]));
        std::iter::once(self.left_slope).chain(inner).chain(std::iter::once(self.right_slope))
    }

    pub fn lipschitz_constant(&self) -> f64 {
        self.slopes().fold(0.0, |m, s| m.max(s.abs()))
    }

    /// Checks every slope against `1 + 1e-12`.
    pub fn check_one_lipschitz(&self) -> Result<()> {
        match self.slopes().enumerate().find(|(_, s)| s.abs() > 1.0 + 1e-12) {
            Some((piece, slope)) => Err(Error::NotLipschitz { piece, slope }),
            None => Ok(()),
        }
    }

    pub fn sup_norm_on_knots(&self) -> f64 {
        self.ys.iter().fold(0.0, |m, y| m.max(y.abs()))
    }

    /// Exact `∫_a^b f` (trapezoids between knots).
    pub fn integrate(&self, a: f64, b: f64) -> f64 {
        if b <= a {
            return 0.0;
        }
        let start = self.xs.partition_point(|&x| x <= a);
        let mut prev_x = a;
        let mut prev_y = self.eval(a);
        let mut acc = 0.0;
        for k in start..self.xs.len() {
            let x = self.xs[k];
            if x >= b {
                break;
            }
            acc += 0.5 * (prev_y + self.ys[k]) * (x - prev_x);
            prev_x = x;
            prev_y = self.ys[k];
        }
        acc + 0.5 * (prev_y + self.eval(b)) * (b - prev_x)
    }

    /// Exact `∫ f dm`.
    pub fn integrate_against(&self, m: &Measure1D) -> f64 {
        let atoms: f64 = m.atoms().iter().map(|a| a.mass * self.eval(a.position)).sum();
        let segs: f64 = m
            .segments()
            .iter()
            .map(|s| s.density() * self.integrate(s.left, s.right))
            .sum();
        atoms + segs
    }
}
