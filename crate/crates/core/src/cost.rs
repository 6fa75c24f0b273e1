//! The affine ℝ-bundle over the skeleton, its deck actions, and the cost function.
//!
//! In cover coordinates the bundle is `ℝ × ℝ` modulo `(t, a) ↦ (t − 3, a − 9t + 9)`,
//! and germs of affine sections at `n_0` are pairs `(t∨, b)` (the section
//! `t ↦ t∨·t + b`) modulo `(t∨, b) ↦ (t∨ − 9, b + 3t∨ − 18)`.
//!
//! The cost is `c(t, t∨) = −[t, t∨] + Φ0(t) + Φ0*(t∨)`. Every public function
//! here is a closed form; [`oracle`] recomputes the suprema by brute force.

use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::rational::{floor_i64, frac, int, Rational};

pub mod oracle;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum CostError {
    #[error("t∨ = {0} is outside [0, 3]")]
    TvOutOfRange(String),
}

/// Germ `s_{(t∨, b)}` of an affine section of the bundle at `n_0`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct AffineGerm {
    pub slope_tv: Rational,
    pub offset_b: Rational,
}

impl AffineGerm {
    pub fn new(slope_tv: Rational, offset_b: Rational) -> Self {
        Self { slope_tv, offset_b }
    }

    /// Fibre value of the germ over cover coordinate `t`.
    pub fn eval(&self, t: &Rational) -> Rational {
        &self.slope_tv * t + &self.offset_b
    }
}

/// Deck generator on the bundle, applied `power` times (negative powers invert).
pub fn deck_action_on_bundle(power: i64, point: (Rational, Rational)) -> (Rational, Rational) {
    let (mut t, mut a) = point;
    if power >= 0 {
        for _ in 0..power {
            a = a - int(9) * &t + int(9);
            t -= int(3);
        }
    } else {
        for _ in 0..(-power) {
            t += int(3);
            a = a + int(9) * &t - int(9);
        }
    }
    (t, a)
}

/// Deck generator on germs, applied `power` times (negative powers invert).
pub fn deck_action_on_germ(power: i64, germ: &AffineGerm) -> AffineGerm {
    let mut tv = germ.slope_tv.clone();
    let mut b = germ.offset_b.clone();
    if power >= 0 {
        for _ in 0..power {
            b = b + int(3) * &tv - int(18);
            tv -= int(9);
        }
    } else {
        for _ in 0..(-power) {
            tv += int(9);
            b = b - int(3) * &tv + int(18);
        }
    }
    AffineGerm::new(tv, b)
}

/// Fibre value of the convex section Φ0 over cover coordinate `t`.
pub fn phi0(t: &Rational) -> Rational {
    let k = floor_i64(t);
    int(3 * (k + 1)) * t - int(1) - frac(3 * k * (k + 1), 2)
}

/// Floor index selecting the deck translate that realises `[t, t∨]`.
pub fn bracket_index(t: &Rational, tv: &Rational) -> i64 {
    floor_i64(&((tv - int(3) * t) / int(9) + frac(1, 3)))
}

/// Scalar value of the cost pairing `[t, t∨]`, i.e. the supremum over the deck
/// orbit of `s_{(t∨,0)}` evaluated at `t`.
pub fn pairing_bracket(t: &Rational, tv: &Rational) -> Rational {
    let k = bracket_index(t, tv);
    (tv - int(9 * k)) * (t + int(3 * k)) + frac(9 * k * (3 * k - 1), 2)
}

/// Legendre transform `Φ0*(t∨) = ℓ·t∨ + 1 − 3ℓ(ℓ+1)/2` with `ℓ = ⌊t∨/3⌋`.
pub fn legendre_phi0_star(tv: &Rational) -> Rational {
    let l = floor_i64(&(tv / int(3)));
    int(l) * tv + int(1) - frac(3 * l * (l + 1), 2)
}

/// Value of the cost together with its three floor indices.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CostBreakdown {
    pub k: i64,
    pub l: i64,
    pub m: i64,
    #[serde(with = "crate::rational::serde_str")]
    pub value: Rational,
}

pub fn cost(t: &Rational, tv: &Rational) -> CostBreakdown {
    let k = floor_i64(t);
    let l = floor_i64(&(tv / int(3)));
    let m = bracket_index(t, tv);
    let value = int(3 * (k + 1)) * t + int(l) * tv
        - (tv - int(9 * m)) * (t + int(3 * m))
        - frac(3 * k * (k + 1) + 3 * l * (l + 1) + 9 * m * (3 * m - 1), 2);
    CostBreakdown { k, l, m, value }
}

/// Cover coordinates in `(t_lo, t_hi)` where some floor index of the cost jumps.
pub fn cost_breakpoints_in(t_lo: &Rational, t_hi: &Rational, tv: &Rational) -> Vec<Rational> {
    let mut out = Vec::new();
    // k jumps at integers.
    let mut k = floor_i64(t_lo) + 1;
    while int(k) < *t_hi {
        if int(k) > *t_lo {
            out.push(int(k));
        }
        k += 1;
    }
    // m jumps where (t∨ − 3t)/9 + 1/3 is an integer j, i.e. t = t∨/3 + 1 − 3j.
    let base = tv / int(3) + int(1);
    let j_lo = floor_i64(&((&base - t_hi) / int(3)));
    let j_hi = floor_i64(&((&base - t_lo) / int(3))) + 1;
    for j in j_lo..=j_hi {
        let t = &base - int(3 * j);
        if t > *t_lo && t < *t_hi {
            out.push(t);
        }
    }
    out.sort();
    out.dedup();
    out
}

/// One affine piece of `t ↦ c(t, t∨)` on the fundamental domain `[0, 3]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SlopeSegment {
    pub start: Rational,
    pub end: Rational,
    pub slope: Rational,
}

/// The four pieces `[0,1], [1, 1+t∨/3], [1+t∨/3, 2], [2,3]` of `t ↦ c(t, t∨)`
/// with slopes `3−t∨, 6−t∨, −(t∨+3), −t∨`. Degenerate pieces are kept.
pub fn cost_slopes_fixed_tv(tv: &Rational) -> Result<[SlopeSegment; 4], CostError> {
    if *tv < Rational::zero() || *tv > int(3) {
        return Err(CostError::TvOutOfRange(tv.to_string()));
    }
    let bend = int(1) + tv / int(3);
    Ok([
        SlopeSegment {
            start: int(0),
            end: int(1),
            slope: int(3) - tv,
        },
        SlopeSegment {
            start: int(1),
            end: bend.clone(),
            slope: int(6) - tv,
        },
        SlopeSegment {
            start: bend,
            end: int(2),
            slope: -(tv + int(3)),
        },
        SlopeSegment {
            start: int(2),
            end: int(3),
            slope: -tv.clone(),
        },
    ])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn deck_on_bundle() {
        assert_eq!(
            deck_action_on_bundle(1, (int(0), int(0))),
            (int(-3), int(9))
        );
        assert_eq!(deck_action_on_bundle(0, (int(5), int(7))), (int(5), int(7)));
        let p = (frac(1, 2), frac(1, 3));
        assert_eq!(
            deck_action_on_bundle(-1, deck_action_on_bundle(1, p.clone())),
            p
        );
        assert_eq!(
            deck_action_on_bundle(3, deck_action_on_bundle(-3, p.clone())),
            p
        );
    }

    #[test]
    fn deck_on_germs() {
        let zero = AffineGerm::new(int(0), int(0));
        assert_eq!(
            deck_action_on_germ(1, &zero),
            AffineGerm::new(int(-9), int(-18))
        );
        let g = AffineGerm::new(frac(7, 2), int(4));
        assert_eq!(deck_action_on_germ(0, &g), g);
        assert_eq!(
            deck_action_on_germ(2, &AffineGerm::new(int(9), int(0))),
            AffineGerm::new(int(-9), int(-9))
        );
        assert_eq!(deck_action_on_germ(-2, &deck_action_on_germ(2, &g)), g);
    }

    /// The germ action is conjugation by the bundle action:
    /// `(γ·s)(t) = γ(s(γ⁻¹ t))`.
    #[test]
    fn germ_action_is_conjugation() {
        let g = AffineGerm::new(frac(5, 3), frac(-2, 7));
        let moved = deck_action_on_germ(1, &g);
        for num in -8..8 {
            let t = frac(num, 3);
            let pre_t = &t + int(3);
            let (t2, a2) = deck_action_on_bundle(1, (pre_t.clone(), g.eval(&pre_t)));
            assert_eq!(t2, t);
            assert_eq!(a2, moved.eval(&t));
        }
    }

    #[test]
    fn phi0_examples() {
        assert_eq!(phi0(&int(0)), int(-1));
        assert_eq!(phi0(&frac(1, 2)), frac(1, 2));
        assert_eq!(phi0(&int(1)), int(2));
    }

    #[test]
    fn bracket_examples() {
        assert_eq!(pairing_bracket(&int(0), &int(0)), int(0));
        assert_eq!(pairing_bracket(&int(1), &int(9)), int(9));
    }

    #[test]
    fn legendre_examples() {
        assert_eq!(legendre_phi0_star(&int(0)), int(1));
        assert_eq!(legendre_phi0_star(&int(3)), int(1));
        assert_eq!(legendre_phi0_star(&frac(3, 2)), int(1));
    }

    #[test]
    fn cost_examples() {
        assert_eq!(cost(&int(0), &frac(3, 2)).value, int(0));
        assert_eq!(
            cost(&int(0), &int(0)),
            CostBreakdown {
                k: 0,
                l: 0,
                m: 0,
                value: int(0)
            }
        );
        assert_eq!(cost(&frac(1, 2), &int(3)).value, int(0));
        assert_eq!(cost(&int(-3), &int(0)).value, int(0));
    }

    #[test]
    fn cost_is_the_definitional_composition() {
        for tn in -20..20 {
            for vn in -30..30 {
                let t = frac(tn, 5);
                let tv = frac(vn, 4);
                let composed = -pairing_bracket(&t, &tv) + phi0(&t) + legendre_phi0_star(&tv);
                assert_eq!(cost(&t, &tv).value, composed, "t={t} tv={tv}");
            }
        }
    }

    #[test]
    fn slope_table() {
        let s = cost_slopes_fixed_tv(&frac(3, 2)).unwrap();
        let slopes: Vec<_> = s.iter().map(|x| x.slope.clone()).collect();
        assert_eq!(
            slopes,
            vec![frac(3, 2), frac(9, 2), frac(-9, 2), frac(-3, 2)]
        );

        let s = cost_slopes_fixed_tv(&int(0)).unwrap();
        assert_eq!(
            s.iter().map(|x| x.slope.clone()).collect::<Vec<_>>(),
            vec![int(3), int(6), int(-3), int(0)]
        );
        assert_eq!((s[2].start.clone(), s[2].end.clone()), (int(1), int(2)));

        let s = cost_slopes_fixed_tv(&int(3)).unwrap();
        assert_eq!(
            s.iter().map(|x| x.slope.clone()).collect::<Vec<_>>(),
            vec![int(0), int(3), int(-6), int(-3)]
        );
        assert_eq!((s[1].start.clone(), s[1].end.clone()), (int(1), int(2)));

        assert!(cost_slopes_fixed_tv(&frac(-1, 2)).is_err());
        assert!(cost_slopes_fixed_tv(&frac(7, 2)).is_err());
    }

    #[test]
    fn breakpoints_are_where_floors_jump() {
        let tv = frac(3, 2);
        let bps = cost_breakpoints_in(&int(0), &int(3), &tv);
        assert_eq!(bps, vec![int(1), frac(3, 2), int(2)]);
        // Between consecutive breakpoints the floors are constant.
        let mut cuts = vec![int(0)];
        cuts.extend(bps);
        cuts.push(int(3));
        for w in cuts.windows(2) {
            let a = cost(&(&w[0] + frac(1, 1000)), &tv);
            let b = cost(&(&w[1] - frac(1, 1000)), &tv);
            assert_eq!((a.k, a.l, a.m), (b.k, b.l, b.m));
        }
    }
}
