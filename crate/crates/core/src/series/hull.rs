//! Lower-left convex hull of a support set, as seen by the monomial valuations
//! `r ↦ min{(1−r)p + rq}` for `r ∈ [0, 1]`.

use num_traits::One;
use serde::{Deserialize, Serialize};

use super::pl::PLFunction;
use super::SeriesError;
use crate::rational::{int, Rational};

pub type Exponent = (u32, u32);

/// Extreme points of the lower-left hull of a support, ordered by `p`
/// increasing (and therefore `q` decreasing).
///
/// `certified` is set only when the hull is known to be the hull of the whole
/// (untruncated) series: a finished polynomial, or a truncation carrying a
/// certificate from the sections layer.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LowerHull {
    vertices: Vec<Exponent>,
    certified: bool,
}

fn cross(o: Exponent, a: Exponent, b: Exponent) -> i64 {
    let (ox, oy) = (o.0 as i64, o.1 as i64);
    (a.0 as i64 - ox) * (b.1 as i64 - oy) - (a.1 as i64 - oy) * (b.0 as i64 - ox)
}

impl LowerHull {
    /// Hull of a nonempty set of exponents.
    pub fn from_support<I: IntoIterator<Item = Exponent>>(support: I, certified: bool) -> Self {
        let mut pts: Vec<Exponent> = support.into_iter().collect();
        assert!(!pts.is_empty(), "hull of an empty support");
        pts.sort();
        // Keep the lowest q for each p.
        pts.dedup_by(|later, earlier| later.0 == earlier.0);

        let mut chain: Vec<Exponent> = Vec::new();
        for &p in &pts {
            while chain.len() >= 2 && cross(chain[chain.len() - 2], chain[chain.len() - 1], p) <= 0
            {
                chain.pop();
            }
            chain.push(p);
        }
        // The faces seen by nonnegative weights end at the first point of minimal q.
        let qmin = chain.iter().map(|e| e.1).min().unwrap();
        let cut = chain.iter().position(|e| e.1 == qmin).unwrap();
        chain.truncate(cut + 1);
        Self {
            vertices: chain,
            certified,
        }
    }

    pub fn vertices(&self) -> &[Exponent] {
        &self.vertices
    }

    pub fn is_certified(&self) -> bool {
        self.certified
    }

    pub(crate) fn mark_certified(mut self) -> Self {
        self.certified = true;
        self
    }

    /// Exact `r ↦ min over the hull of (1−r)p + rq`.
    pub fn to_pl(&self) -> PLFunction {
        let line = |e: &Exponent| (int(e.0 as i64), int(e.1 as i64) - int(e.0 as i64));
        if self.vertices.len() == 1 {
            let (c, s) = line(&self.vertices[0]);
            return PLFunction::line(c, s);
        }
        let mut samples = vec![(int(0), int(self.vertices[0].0 as i64))];
        for w in self.vertices.windows(2) {
            let (p1, q1) = (w[0].0 as i64, w[0].1 as i64);
            let (p2, q2) = (w[1].0 as i64, w[1].1 as i64);
            let r = Rational::new((p2 - p1).into(), ((p2 - p1) + (q1 - q2)).into());
            let v = (Rational::one() - &r) * int(p1) + &r * int(q1);
            samples.push((r, v));
        }
        samples.push((int(1), int(self.vertices.last().unwrap().1 as i64)));
        PLFunction::from_samples(samples)
    }

    /// Whether the point's valuation line lies weakly above the hull envelope.
    pub fn lies_above(&self, e: Exponent) -> bool {
        let f = self.to_pl();
        let g = LowerHull::from_support([e], true).to_pl();
        f.le(&g)
    }
}

pub fn hull_to_plfunction(h: &LowerHull) -> PLFunction {
    h.to_pl()
}

/// `f` dominates `g` when `val_n(f) ≤ val_n(g)` along the whole edge.
pub fn dominates(f: &LowerHull, g: &LowerHull) -> Result<bool, SeriesError> {
    if !f.certified || !g.certified {
        return Err(SeriesError::UncertifiedHull);
    }
    Ok(f.to_pl().le(&g.to_pl()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::frac;

    #[test]
    fn interior_point_is_dropped() {
        let h = LowerHull::from_support([(1, 4), (4, 1), (3, 3)], true);
        assert_eq!(h.vertices(), &[(1, 4), (4, 1)]);
    }

    #[test]
    fn pure_vertices_of_a_two_one_section() {
        let h = LowerHull::from_support([(2, 1 + 6), (2 + 3, 1)], true);
        assert_eq!(h.vertices(), &[(2, 7), (5, 1)]);
        let expected = PLFunction::min_of_lines(&[(int(2), int(5)), (int(5), int(-4))]);
        assert_eq!(h.to_pl(), expected);
    }

    #[test]
    fn constant_hull() {
        let h = LowerHull::from_support([(0, 0)], true);
        assert_eq!(h.to_pl(), PLFunction::line(int(0), int(0)));
    }

    #[test]
    fn single_axis_points() {
        assert_eq!(
            LowerHull::from_support([(5, 0)], true).to_pl(),
            PLFunction::line(int(5), int(-5))
        );
        assert_eq!(
            LowerHull::from_support([(0, 5)], true).to_pl(),
            PLFunction::line(int(0), int(5))
        );
    }

    #[test]
    fn breakpoint_of_symmetric_hull() {
        let f = LowerHull::from_support([(1, 4), (4, 1)], true).to_pl();
        assert_eq!(f.breakpoints(), &[int(0), frac(1, 2), int(1)]);
        assert_eq!(f.values()[1], frac(5, 2));
        assert_eq!(f.slopes(), &[int(3), int(-3)]);
    }

    #[test]
    fn collinear_and_dominated_points() {
        // (2, 2) is on the segment from (1, 3) to (3, 1); (1, 5) sits above (1, 3);
        // (6, 1) sits above the segment from (3, 1) to (7, 0).
        let h = LowerHull::from_support([(1, 5), (1, 3), (2, 2), (3, 1), (6, 1), (7, 0)], true);
        assert_eq!(h.vertices(), &[(1, 3), (3, 1), (7, 0)]);
        let h = LowerHull::from_support([(1, 3), (2, 2), (3, 1), (6, 1)], true);
        assert_eq!(h.vertices(), &[(1, 3), (3, 1)]);
    }

    #[test]
    fn domination_examples() {
        let f = LowerHull::from_support([(2, 7), (5, 1)], true);
        let g = LowerHull::from_support([(5, 4)], true);
        assert_eq!(dominates(&f, &g), Ok(true));
        assert_eq!(dominates(&f, &f), Ok(true));
        let x = LowerHull::from_support([(1, 0)], true);
        let y = LowerHull::from_support([(0, 1)], true);
        assert_eq!(dominates(&x, &y), Ok(false));
        let raw = LowerHull::from_support([(1, 0)], false);
        assert_eq!(dominates(&raw, &y), Err(SeriesError::UncertifiedHull));
    }
}
