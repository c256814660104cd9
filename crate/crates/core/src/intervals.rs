//! Finite unions of disjoint closed intervals. Degenerate intervals `[x, x]`
//! stand for isolated points, so finite point sets share the same type.

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Default)]
pub struct IntervalSet {
    intervals: Vec<(f64, f64)>,
}

impl IntervalSet {
    /// Validates sorted, pairwise disjoint closed intervals.
    pub fn new(intervals: Vec<(f64, f64)>) -> Result<Self> {
        for (i, &(a, b)) in intervals.iter().enumerate() {
            if !a.is_finite() || !b.is_finite() {
                return Err(Error::InvalidSpec(format!("interval {i} has a non-finite endpoint")));
            }
            if a > b {
                return Err(Error::InvalidSpec(format!("interval {i} has left {a} > right {b}")));
            }
        }
        if let Some(i) = intervals.windows(2).position(|w| w[0].1 >= w[1].0) {
            return Err(Error::InvalidSpec(format!(
                "intervals {i} and {} overlap or are out of order",
                i + 1
            )));
        }
        Ok(Self { intervals })
    }

    /// Sorts and unions arbitrary closed intervals (touching ones are merged).
    pub fn from_unsorted(mut intervals: Vec<(f64, f64)>) -> Result<Self> {
        for &(a, b) in &intervals {
            if !a.is_finite() || !b.is_finite() || a > b {
                return Err(Error::InvalidSpec(format!("bad interval [{a}, {b}]")));
            }
        }
        intervals.sort_by(|x, y| x.0.total_cmp(&y.0));
        let mut merged: Vec<(f64, f64)> = Vec::with_capacity(intervals.len());
        for (a, b) in intervals {
            match merged.last_mut() {
                Some(last) if a <= last.1 => last.1 = last.1.max(b),
                _ => merged.push((a, b)),
            }
        }
        Ok(Self { intervals: merged })
    }

    pub fn interval(a: f64, b: f64) -> Result<Self> {
        Self::new(vec![(a, b)])
    }

    /// A finite point set as degenerate intervals.
    pub fn points(xs: &[f64]) -> Result<Self> {
        Self::from_unsorted(xs.iter().map(|&x| (x, x)).collect())
    }

    pub fn intervals(&self) -> &[(f64, f64)] {
        &self.intervals
    }

    pub fn len(&self) -> usize {
        self.intervals.len()
    }

    pub fn is_empty(&self) -> bool {
        self.intervals.is_empty()
    }

    /// Index of the first interval whose right end is `>= x`.
    fn first_not_left_of(&self, x: f64) -> usize {
        self.intervals.partition_point(|&(_, b)| b < x)
    }

    pub fn contains(&self, x: f64) -> bool {
        let i = self.first_not_left_of(x);
        i < self.intervals.len() && self.intervals[i].0 <= x
    }

    /// Euclidean distance from `x` to the set; infinite for the empty set.
    pub fn distance(&self, x: f64) -> f64 {
        let i = self.first_not_left_of(x);
        let mut d = f64::INFINITY;
        if i < self.intervals.len() {
            let (a, _) = self.intervals[i];
            d = if a <= x { 0.0 } else { a - x };
        }
        if i > 0 {
            d = d.min(x - self.intervals[i - 1].1);
        }
        d
    }

    pub fn hull(&self) -> Option<(f64, f64)> {
        Some((self.intervals.first()?.0, self.intervals.last()?.1))
    }

    pub fn lebesgue_measure(&self) -> f64 {
        self.intervals.iter().map(|&(a, b)| b - a).sum()
    }

    /// Every interval of `self` lies inside some interval of `other`.
    pub fn is_subset_of(&self, other: &IntervalSet) -> bool {
        self.intervals.iter().all(|&(a, b)| {
            let i = other.first_not_left_of(a);
            i < other.intervals.len() && other.intervals[i].0 <= a && b <= other.intervals[i].1
        })
    }

    /// Range of intervals meeting the open window `(lo, hi)`.
    pub(crate) fn meeting_open(&self, lo: f64, hi: f64) -> std::ops::Range<usize> {
        let start = self.intervals.partition_point(|&(_, b)| b <= lo);
        let end = self.intervals.partition_point(|&(a, _)| a < hi);
        start..end.max(start)
    }
}
