//! Exact piecewise-linear functions on `[0, 1]`.

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::rational::{self, Rational};

/// Continuous piecewise-linear function on `[0, 1]`.
///
/// Breakpoints run `0 = r_0 < r_1 < … < r_n = 1`; `values[i]` is the value at
/// `r_i` and `slopes[i]` the slope on `[r_i, r_{i+1}]`. Adjacent segments
/// never share a slope, so equal functions have equal representations.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PLFunction {
    #[serde(with = "rational::serde_vec")]
    breakpoints: Vec<Rational>,
    #[serde(with = "rational::serde_vec")]
    values: Vec<Rational>,
    #[serde(with = "rational::serde_vec")]
    slopes: Vec<Rational>,
}

impl PLFunction {
    /// Interpolates the given samples, which must start at 0, end at 1 and be
    /// strictly increasing. Collinear interior samples are dropped.
    pub fn from_samples(mut points: Vec<(Rational, Rational)>) -> Self {
        points.sort_by(|a, b| a.0.cmp(&b.0));
        points.dedup_by(|a, b| a.0 == b.0);
        assert!(points.len() >= 2, "need samples at both ends");
        assert!(points[0].0.is_zero() && points.last().unwrap().0.is_one());

        let mut breakpoints = vec![points[0].0.clone()];
        let mut values = vec![points[0].1.clone()];
        let mut slopes: Vec<Rational> = Vec::new();
        for w in points.windows(2) {
            let s = (&w[1].1 - &w[0].1) / (&w[1].0 - &w[0].0);
            if slopes.last() == Some(&s) {
                *breakpoints.last_mut().unwrap() = w[1].0.clone();
                *values.last_mut().unwrap() = w[1].1.clone();
            } else {
                slopes.push(s);
                breakpoints.push(w[1].0.clone());
                values.push(w[1].1.clone());
            }
        }
        Self {
            breakpoints,
            values,
            slopes,
        }
    }

    /// The line `r ↦ intercept + slope·r`.
    pub fn line(intercept: Rational, slope: Rational) -> Self {
        let end = &intercept + &slope;
        Self::from_samples(vec![(Rational::zero(), intercept), (Rational::one(), end)])
    }

    /// Lower envelope `r ↦ min_i (c_i + s_i r)` of a nonempty family of lines.
    pub fn min_of_lines(lines: &[(Rational, Rational)]) -> Self {
        assert!(!lines.is_empty());
        let eval = |r: &Rational| -> Rational {
            lines
                .iter()
                .map(|(c, s)| c + s * r)
                .min()
                .expect("nonempty")
        };
        let mut cuts = vec![Rational::zero(), Rational::one()];
        for (i, (c1, s1)) in lines.iter().enumerate() {
            for (c2, s2) in &lines[i + 1..] {
                if s1 != s2 {
                    let r = (c2 - c1) / (s1 - s2);
                    if r > Rational::zero() && r < Rational::one() {
                        cuts.push(r);
                    }
                }
            }
        }
        cuts.sort();
        cuts.dedup();
        Self::from_samples(
            cuts.into_iter()
                .map(|r| {
                    let v = eval(&r);
                    (r, v)
                })
                .collect(),
        )
    }

    pub fn breakpoints(&self) -> &[Rational] {
        &self.breakpoints
    }

    pub fn values(&self) -> &[Rational] {
        &self.values
    }

    pub fn slopes(&self) -> &[Rational] {
        &self.slopes
    }

    fn segment_of(&self, r: &Rational) -> usize {
        let i = self.breakpoints.partition_point(|b| b <= r);
        i.saturating_sub(1).min(self.slopes.len() - 1)
    }

    pub fn eval(&self, r: &Rational) -> Rational {
        let i = self.segment_of(r);
        &self.values[i] + &self.slopes[i] * (r - &self.breakpoints[i])
    }

    /// Slope at an interior point that is not a breakpoint.
    pub fn slope_at(&self, r: &Rational) -> Option<Rational> {
        if *r <= Rational::zero() || *r >= Rational::one() || self.breakpoints.contains(r) {
            return None;
        }
        Some(self.slopes[self.segment_of(r)].clone())
    }

    fn merged_cuts(&self, other: &Self) -> Vec<Rational> {
        let mut cuts: Vec<Rational> = self
            .breakpoints
            .iter()
            .chain(other.breakpoints.iter())
            .cloned()
            .collect();
        cuts.sort();
        cuts.dedup();
        cuts
    }

    pub fn add(&self, other: &Self) -> Self {
        Self::from_samples(
            self.merged_cuts(other)
                .into_iter()
                .map(|r| {
                    let v = self.eval(&r) + other.eval(&r);
                    (r, v)
                })
                .collect(),
        )
    }

    pub fn scale(&self, factor: &Rational) -> Self {
        Self::from_samples(
            self.breakpoints
                .iter()
                .zip(&self.values)
                .map(|(r, v)| (r.clone(), v * factor))
                .collect(),
        )
    }

    pub fn offset(&self, c: &Rational) -> Self {
        Self::from_samples(
            self.breakpoints
                .iter()
                .zip(&self.values)
                .map(|(r, v)| (r.clone(), v + c))
                .collect(),
        )
    }

    /// Pointwise minimum, with the crossing points added as breakpoints.
    pub fn min(&self, other: &Self) -> Self {
        let cuts = self.merged_cuts(other);
        let mut pts: Vec<Rational> = cuts.clone();
        for w in cuts.windows(2) {
            let d0 = self.eval(&w[0]) - other.eval(&w[0]);
            let d1 = self.eval(&w[1]) - other.eval(&w[1]);
            if (d0.is_positive() && d1.is_negative()) || (d0.is_negative() && d1.is_positive()) {
                let r = &w[0] + (&w[1] - &w[0]) * &d0 / (&d0 - &d1);
                pts.push(r);
            }
        }
        pts.sort();
        pts.dedup();
        Self::from_samples(
            pts.into_iter()
                .map(|r| {
                    let v = self.eval(&r).min(other.eval(&r));
                    (r, v)
                })
                .collect(),
        )
    }

    /// Pointwise `self ≤ other` on `[0, 1]`, decided at the merged breakpoints.
    pub fn le(&self, other: &Self) -> bool {
        self.merged_cuts(other)
            .iter()
            .all(|r| self.eval(r) <= other.eval(r))
    }

    /// Slopes strictly decreasing, as for any envelope of distinct lines.
    pub fn is_strictly_concave(&self) -> bool {
        self.slopes.windows(2).all(|w| w[0] > w[1])
    }

    /// First maximal interval `[lo, hi]` of the merged breakpoint grid on
    /// which the two functions differ somewhere, or `None` if equal.
    pub fn first_difference(&self, other: &Self) -> Option<(Rational, Rational)> {
        let cuts = self.merged_cuts(other);
        let differs = |lo: &Rational, hi: &Rational| {
            let mid = (lo + hi) / rational::int(2);
            self.eval(lo) != other.eval(lo)
                || self.eval(&mid) != other.eval(&mid)
                || self.eval(hi) != other.eval(hi)
        };
        let start = cuts.windows(2).position(|w| differs(&w[0], &w[1]))?;
        let mut end = start + 1;
        while end + 1 < cuts.len() && differs(&cuts[end], &cuts[end + 1]) {
            end += 1;
        }
        Some((cuts[start].clone(), cuts[end].clone()))
    }
}
