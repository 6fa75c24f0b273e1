//! The polytopes Δ (sections side) and Δ∨ (skeleton side) of the Fermat cubic.
//!
//! Δ has vertices `m_0, m_1, m_2`; the skeleton ∂Δ∨ has vertices `n_0, n_1, n_2`.
//! Points of ∂Δ∨ are addressed by an edge index and a parameter `r ∈ [0,1]`
//! along `[n_e, n_{e+1}]`, and lift to the cover coordinate `t = e + r`.
//! Lattice points of ∂Δ are addressed by an edge of Δ and barycentric weights
//! `(a, b)` on `[m_e, m_{e+1}]`, with cover coordinate `t∨ = 3e + 3b/(a+b)`.

use std::hash::{Hash, Hasher};

use num_integer::Integer;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::rational::{floor_i64, int, Rational};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SkeletonError {
    #[error("edge index {0} is not in {{0, 1, 2}}")]
    BadEdge(u8),
    #[error("edge parameter r = {0} is outside [0, 1]")]
    ParameterOutOfRange(String),
    #[error("point (edge {edge}, r = {r}) lies outside the star of n_{chart}")]
    OutsideChart { chart: u8, edge: u8, r: String },
    #[error("polytope point needs a + b > 0")]
    DegenerateWeights,
}

/// Integral vector in the lattice containing Δ.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct LatticeVector {
    pub c1: i64,
    pub c2: i64,
}

/// Integral vector in the dual lattice containing Δ∨.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct DualLatticeVector {
    pub c1: i64,
    pub c2: i64,
}

impl LatticeVector {
    pub const ZERO: Self = Self { c1: 0, c2: 0 };

    pub const fn new(c1: i64, c2: i64) -> Self {
        Self { c1, c2 }
    }
}

impl std::ops::Sub for LatticeVector {
    type Output = Self;

    fn sub(self, other: Self) -> Self {
        Self::new(self.c1 - other.c1, self.c2 - other.c2)
    }
}

impl DualLatticeVector {
    pub const fn new(c1: i64, c2: i64) -> Self {
        Self { c1, c2 }
    }
}

/// Vertices `m_0, m_1, m_2` of Δ.
pub const M: [LatticeVector; 3] = [
    LatticeVector::new(-1, -1),
    LatticeVector::new(-1, 2),
    LatticeVector::new(2, -1),
];

/// Vertices `n_0, n_1, n_2` of Δ∨.
pub const N: [DualLatticeVector; 3] = [
    DualLatticeVector::new(-1, 0),
    DualLatticeVector::new(1, 1),
    DualLatticeVector::new(0, -1),
];

pub fn pairing(m: LatticeVector, n: DualLatticeVector) -> i64 {
    m.c1 * n.c1 + m.c2 * n.c2
}

/// Pairing of an integral `m` with a rational point of the dual plane.
pub fn pairing_rational(m: LatticeVector, n: &(Rational, Rational)) -> Rational {
    int(m.c1) * &n.0 + int(m.c2) * &n.1
}

#[inline]
pub(crate) fn idx(i: i64) -> usize {
    i.rem_euclid(3) as usize
}

fn check_edge(edge: u8) -> Result<(), SkeletonError> {
    if edge < 3 {
        Ok(())
    } else {
        Err(SkeletonError::BadEdge(edge))
    }
}

/// A point `(1-r) n_e + r n_{e+1}` of the skeleton ∂Δ∨.
///
/// Stored canonically: `r = 1` is rewritten as `r = 0` on the next edge, so
/// the shared vertex has one representation.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SkeletonPoint {
    edge: u8,
    r: Rational,
}

impl SkeletonPoint {
    pub fn new(edge: u8, r: Rational) -> Result<Self, SkeletonError> {
        check_edge(edge)?;
        if r < Rational::zero() || r > Rational::one() {
            return Err(SkeletonError::ParameterOutOfRange(r.to_string()));
        }
        if r.is_one() {
            Ok(Self {
                edge: (edge + 1) % 3,
                r: Rational::zero(),
            })
        } else {
            Ok(Self { edge, r })
        }
    }

    pub fn vertex(k: u8) -> Self {
        Self {
            edge: k % 3,
            r: Rational::zero(),
        }
    }

    pub fn edge(&self) -> u8 {
        self.edge
    }

    pub fn r(&self) -> &Rational {
        &self.r
    }

    /// Cover coordinate in `[0, 3)`.
    pub fn cover(&self) -> Rational {
        int(self.edge as i64) + &self.r
    }

    /// Coordinates of the point in the dual plane.
    pub fn coords(&self) -> (Rational, Rational) {
        let a = N[self.edge as usize];
        let b = N[idx(self.edge as i64 + 1)];
        let one_minus = Rational::one() - &self.r;
        (
            &one_minus * int(a.c1) + &self.r * int(b.c1),
            &one_minus * int(a.c2) + &self.r * int(b.c2),
        )
    }
}

/// Projects a cover coordinate onto the skeleton (period 3).
pub fn cover_to_edge(t: &Rational) -> SkeletonPoint {
    let k = floor_i64(t);
    let r = t - int(k);
    SkeletonPoint {
        edge: idx(k) as u8,
        r,
    }
}

pub fn edge_to_cover(n: &SkeletonPoint) -> Rational {
    n.cover()
}

/// The affine chart `φ_k(n) = k + ⅓⟨m_{k+1} − m_k, n⟩` on the star of `n_k`.
///
/// The two neighbouring vertices `n_{k±1}` are accepted as limit points, where
/// the chart takes the values `k ± 1`.
pub fn chart_phi(k: u8, n: &SkeletonPoint) -> Result<Rational, SkeletonError> {
    check_edge(k)?;
    let inside = n.edge == k
        || n.edge == idx(k as i64 - 1) as u8
        || (n.edge == idx(k as i64 + 1) as u8 && n.r.is_zero());
    if !inside {
        return Err(SkeletonError::OutsideChart {
            chart: k,
            edge: n.edge,
            r: n.r.to_string(),
        });
    }
    let dir = M[idx(k as i64 + 1)] - M[k as usize];
    Ok(int(k as i64) + pairing_rational(dir, &n.coords()) / int(3))
}

/// A lattice point `(a m_e + b m_{e+1}) / (a + b)` of ∂Δ.
///
/// Equality and hashing use the reduced barycentric weights, with `a = 0`
/// rotated onto the next edge, so vertex representations on adjacent edges
/// and rescaled weights compare equal. The raw `(a, b)` fixes the degree of
/// the associated section.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct PolytopePoint {
    pub edge: u8,
    pub a: u32,
    pub b: u32,
}

impl PolytopePoint {
    pub fn new(edge: u8, a: u32, b: u32) -> Result<Self, SkeletonError> {
        check_edge(edge)?;
        if a + b == 0 {
            return Err(SkeletonError::DegenerateWeights);
        }
        Ok(Self { edge, a, b })
    }

    pub fn degree(&self) -> u32 {
        self.a + self.b
    }

    fn canonical_key(&self) -> (u8, u32, u32) {
        let (edge, a, b) = if self.a == 0 {
            ((self.edge + 1) % 3, self.b, 0)
        } else {
            (self.edge, self.a, self.b)
        };
        let g = a.gcd(&b);
        (edge, a / g, b / g)
    }

    /// Cover coordinate `t∨ = 3e + 3b/(a+b)` in `[0, 9)`.
    pub fn tv(&self) -> Rational {
        let (edge, a, b) = self.canonical_key();
        int(3 * edge as i64) + Rational::new((3 * b as i64).into(), ((a + b) as i64).into())
    }

    /// Coordinates in the plane of Δ.
    pub fn coords(&self) -> (Rational, Rational) {
        let p = M[self.edge as usize];
        let q = M[idx(self.edge as i64 + 1)];
        let d = int(self.degree() as i64);
        let a = int(self.a as i64);
        let b = int(self.b as i64);
        (
            (&a * int(p.c1) + &b * int(q.c1)) / &d,
            (&a * int(p.c2) + &b * int(q.c2)) / &d,
        )
    }

    pub fn is_vertex(&self) -> bool {
        self.a == 0 || self.b == 0
    }
}

impl PartialEq for PolytopePoint {
    fn eq(&self, other: &Self) -> bool {
        self.canonical_key() == other.canonical_key()
    }
}

impl Eq for PolytopePoint {}

impl Hash for PolytopePoint {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.canonical_key().hash(state);
    }
}

/// The identification `p(t∨) = (k+1 − t∨/3) m_k + (t∨/3 − k) m_{k+1}`.
pub fn polytope_from_cover(tv: &Rational) -> (Rational, Rational) {
    let third = tv / int(3);
    let k = floor_i64(&third);
    let p = M[idx(k)];
    let q = M[idx(k + 1)];
    let w0 = int(k + 1) - &third;
    let w1 = &third - int(k);
    (
        &w0 * int(p.c1) + &w1 * int(q.c1),
        &w0 * int(p.c2) + &w1 * int(q.c2),
    )
}

/// Lattice points of ∂Δ for sections of x-degree `d`, ordered by edge and then
/// by `a` descending. Each vertex appears once, as `(edge, d, 0)`.
pub fn lattice_points(d: u32) -> Vec<PolytopePoint> {
    let mut out = Vec::with_capacity(3 * d as usize);
    for edge in 0..3u8 {
        for a in (1..=d).rev() {
            out.push(PolytopePoint { edge, a, b: d - a });
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::frac;

    #[test]
    fn vertex_pairings() {
        for k in 0..3i64 {
            let mk = M[idx(k)];
            assert_eq!(pairing(mk, N[idx(k)]), 1);
            assert_eq!(pairing(M[idx(k + 1)], N[idx(k)]), 1);
            assert_eq!(pairing(mk, N[idx(k - 1)]), 1);
            assert_eq!(pairing(mk, N[idx(k + 1)]), -2);
        }
        assert_eq!(pairing(M[0], N[0]), 1);
        assert_eq!(pairing(M[0], N[1]), -2);
        assert_eq!(pairing(LatticeVector::ZERO, N[1]), 0);
    }

    #[test]
    fn chart_examples() {
        assert_eq!(chart_phi(0, &SkeletonPoint::vertex(0)).unwrap(), int(0));
        let mid = SkeletonPoint::new(0, frac(1, 2)).unwrap();
        assert_eq!(chart_phi(0, &mid).unwrap(), frac(1, 2));
        assert_eq!(chart_phi(1, &SkeletonPoint::vertex(2)).unwrap(), int(2));
    }

    #[test]
    fn chart_rejects_points_outside_star() {
        let p = SkeletonPoint::new(1, frac(1, 2)).unwrap();
        assert!(matches!(
            chart_phi(0, &p),
            Err(SkeletonError::OutsideChart { .. })
        ));
        assert!(chart_phi(1, &SkeletonPoint::new(2, frac(1, 3)).unwrap()).is_err());
        assert_eq!(chart_phi(0, &SkeletonPoint::vertex(2)).unwrap(), int(-1));
        assert_eq!(chart_phi(0, &SkeletonPoint::vertex(1)).unwrap(), int(1));
    }

    #[test]
    fn charts_agree_on_overlaps() {
        for num in 1..12 {
            let r = frac(num, 12);
            // U_0 ∩ U_1 is the interior of edge 0.
            let p = SkeletonPoint::new(0, r.clone()).unwrap();
            assert_eq!(chart_phi(0, &p).unwrap(), chart_phi(1, &p).unwrap());
            let p = SkeletonPoint::new(1, r.clone()).unwrap();
            assert_eq!(chart_phi(1, &p).unwrap(), chart_phi(2, &p).unwrap());
            let p = SkeletonPoint::new(2, r.clone()).unwrap();
            assert_eq!(
                chart_phi(2, &p).unwrap(),
                chart_phi(0, &p).unwrap() + int(3)
            );
            // φ_k agrees with the cover coordinate modulo 3.
            for k in 0..3u8 {
                if let Ok(v) = chart_phi(k, &p) {
                    let diff = v - p.cover();
                    assert!(diff.is_integer() && (diff.to_integer() % 3u8).is_zero());
                }
            }
        }
    }

    #[test]
    fn cover_round_trip() {
        assert_eq!(cover_to_edge(&int(4)), SkeletonPoint::vertex(1));
        let p = cover_to_edge(&frac(3, 2));
        assert_eq!((p.edge(), p.r().clone()), (1, frac(1, 2)));
        let v = SkeletonPoint::new(2, int(1)).unwrap();
        assert_eq!(edge_to_cover(&v), int(0));
        assert_eq!(
            cover_to_edge(&frac(-1, 4)),
            SkeletonPoint::new(2, frac(3, 4)).unwrap()
        );
        for num in 0..36 {
            let t = frac(num, 12);
            assert_eq!(edge_to_cover(&cover_to_edge(&t)), t);
        }
    }

    #[test]
    fn shared_vertices_compare_equal() {
        let a = SkeletonPoint::new(0, int(1)).unwrap();
        assert_eq!(a, SkeletonPoint::new(1, int(0)).unwrap());
        assert!(SkeletonPoint::new(0, frac(3, 2)).is_err());
        assert!(SkeletonPoint::new(3, int(0)).is_err());

        let m1_a = PolytopePoint::new(0, 0, 4).unwrap();
        let m1_b = PolytopePoint::new(1, 2, 0).unwrap();
        assert_eq!(m1_a, m1_b);
        assert_eq!(
            PolytopePoint::new(0, 1, 1).unwrap(),
            PolytopePoint::new(0, 3, 3).unwrap()
        );
        assert_ne!(
            PolytopePoint::new(0, 1, 2).unwrap(),
            PolytopePoint::new(0, 2, 1).unwrap()
        );
        assert!(PolytopePoint::new(0, 0, 0).is_err());
    }

    #[test]
    fn polytope_cover_identification() {
        for d in 1..=6 {
            for m in lattice_points(d) {
                assert_eq!(polytope_from_cover(&m.tv()), m.coords(), "{m:?}");
            }
        }
        let m = PolytopePoint::new(2, 0, 3).unwrap();
        assert_eq!(m.tv(), int(0));
    }

    #[test]
    fn lattice_point_count_and_order() {
        let pts = lattice_points(3);
        assert_eq!(pts.len(), 9);
        assert_eq!((pts[0].edge, pts[0].a, pts[0].b), (0, 3, 0));
        assert_eq!((pts[2].edge, pts[2].a, pts[2].b), (0, 1, 2));
        let unique: std::collections::HashSet<_> = pts.iter().collect();
        assert_eq!(unique.len(), 9);
    }
}
