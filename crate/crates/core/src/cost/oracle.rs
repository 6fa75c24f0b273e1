//! Brute-force reference values for the suprema behind the cost function.
//!
//! Nothing here calls the closed forms of the parent module. Each supremum over
//! the deck group `ℤ` is taken over a finite window `[−W, W]` and comes with a
//! certificate: the objective is a concave quadratic in `k`, so if both window
//! ends are strictly below the incumbent the true maximiser lies inside.

use num_traits::Signed;

use crate::rational::{frac, int, Rational};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum OracleError {
    #[error(
        "window [-{half_width}, {half_width}] is not certified: an end point reaches the incumbent"
    )]
    WindowNotCertified { half_width: i64 },
}

/// Outcome of a certified supremum over the deck window.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WindowSup {
    pub value: Rational,
    /// Smallest maximiser in the window.
    pub argmax: i64,
    pub half_width: i64,
    /// `value − objective(±W)`, both strictly positive.
    pub margin_low: Rational,
    pub margin_high: Rational,
}

/// Default window half-width `10 + ⌈|t∨/9| + |t/3|⌉ + 2`.
pub fn default_half_width(t: &Rational, tv: &Rational) -> i64 {
    let mag = tv.abs() / int(9) + t.abs() / int(3);
    10 + mag.ceil().to_integer().try_into().unwrap_or(i64::MAX / 4) + 2
}

/// Maximises a concave-in-`k` objective over `[−W, W]` and certifies the window.
pub fn certified_sup<F>(half_width: i64, objective: F) -> Result<WindowSup, OracleError>
where
    F: Fn(i64) -> Rational,
{
    let mut best: Option<(Rational, i64)> = None;
    for k in -half_width..=half_width {
        let v = objective(k);
        match &best {
            Some((b, _)) if v <= *b => {}
            _ => best = Some((v, k)),
        }
    }
    let (value, argmax) = best.expect("window is nonempty");
    let margin_low = &value - objective(-half_width);
    let margin_high = &value - objective(half_width);
    if !margin_low.is_positive() || !margin_high.is_positive() {
        return Err(OracleError::WindowNotCertified { half_width });
    }
    Ok(WindowSup {
        value,
        argmax,
        half_width,
        margin_low,
        margin_high,
    })
}

/// Line `k` of the family whose upper envelope is Φ0: `3kt − 1 − 3k(k−1)/2`.
pub fn phi0_line(k: i64, t: &Rational) -> Rational {
    int(3 * k) * t - int(1) - frac(3 * k * (k - 1), 2)
}

/// Value of the `k`-th deck translate of `s_{(t∨,0)}` at `t`:
/// `t∨·t + 3k·t∨ − 9k·t − 18k − 27k(k−1)/2`.
pub fn germ_orbit_line(k: i64, t: &Rational, tv: &Rational) -> Rational {
    tv * t + int(3 * k) * tv - int(9 * k) * t - int(18 * k) - frac(27 * k * (k - 1), 2)
}

pub fn phi0_brute(t: &Rational) -> Result<WindowSup, OracleError> {
    let w = default_half_width(t, &int(0));
    certified_sup(w, |k| phi0_line(k, t))
}

pub fn bracket_brute(t: &Rational, tv: &Rational) -> Result<WindowSup, OracleError> {
    let w = default_half_width(t, tv);
    certified_sup(w, |k| germ_orbit_line(k, t, tv))
}

/// Candidate points for the supremum over `t ∈ [lo, hi]` of
/// `bracket(t, t∨) − Φ0(t)`.
///
/// Both terms are upper envelopes of line families whose intercepts are
/// strictly concave in `k` with slopes in arithmetic progression, so every
/// line appears on its envelope and the kinks are exactly the crossings of
/// consecutive lines. The difference is piecewise affine with kinks among
/// those crossings, hence its maximum over `[lo, hi]` is attained at one of
/// them or at an end point.
pub fn legendre_candidates(lo: &Rational, hi: &Rational, tv: &Rational) -> Vec<Rational> {
    let mut pts = vec![lo.clone(), hi.clone()];
    let w = default_half_width(&lo.abs().max(hi.abs()), tv) + 2;
    let zero = int(0);
    let one = int(1);
    for k in -w..w {
        // Φ0 family: slope 3k, intercept −1 − 3k(k−1)/2.
        let s0 = int(3 * k);
        let s1 = int(3 * (k + 1));
        let c0 = phi0_line(k, &zero);
        let c1 = phi0_line(k + 1, &zero);
        pts.push((&c0 - &c1) / (&s1 - &s0));
        // Germ-orbit family, slopes t∨ − 9k.
        let g0 = germ_orbit_line(k, &zero, tv);
        let g1 = germ_orbit_line(k + 1, &zero, tv);
        let gs0 = germ_orbit_line(k, &one, tv) - &g0;
        let gs1 = germ_orbit_line(k + 1, &one, tv) - &g1;
        pts.push((&g0 - &g1) / (&gs1 - &gs0));
    }
    pts.retain(|t| t >= lo && t <= hi);
    pts.sort();
    pts.dedup();
    pts
}

/// Result of the brute-force Legendre transform.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LegendreSup {
    pub value: Rational,
    pub argmax: Rational,
    pub candidates: usize,
}

/// `sup_t (bracket(t, t∨) − Φ0(t))` with both terms taken from certified
/// window suprema. The objective is 3-periodic in `t`, so a window covering
/// a full period suffices; the default `[−6, 6]` covers four.
pub fn legendre_brute(tv: &Rational) -> Result<LegendreSup, OracleError> {
    legendre_brute_on(tv, &int(-6), &int(6))
}

pub fn legendre_brute_on(
    tv: &Rational,
    lo: &Rational,
    hi: &Rational,
) -> Result<LegendreSup, OracleError> {
    let cands = legendre_candidates(lo, hi, tv);
    let mut best: Option<(Rational, Rational)> = None;
    for t in &cands {
        let v = bracket_brute(t, tv)?.value - phi0_brute(t)?.value;
        match &best {
            Some((b, _)) if v <= *b => {}
            _ => best = Some((v, t.clone())),
        }
    }
    let (value, argmax) = best.expect("candidate set is nonempty");
    Ok(LegendreSup {
        value,
        argmax,
        candidates: cands.len(),
    })
}

/// Cost recomposed entirely from brute-force suprema.
pub fn cost_brute(
    t: &Rational,
    tv: &Rational,
    legendre: &Rational,
) -> Result<Rational, OracleError> {
    Ok(-bracket_brute(t, tv)?.value + phi0_brute(t)?.value + legendre)
}

/// Brute-force maximum over a plain grid `lo + i·step`; no certificate.
pub fn legendre_on_grid(
    tv: &Rational,
    lo: &Rational,
    hi: &Rational,
    step: &Rational,
) -> Result<Rational, OracleError> {
    let mut t = lo.clone();
    let mut best: Option<Rational> = None;
    while t <= *hi {
        let v = bracket_brute(&t, tv)?.value - phi0_brute(&t)?.value;
        if best.as_ref().is_none_or(|b| v > *b) {
            best = Some(v);
        }
        t += step;
    }
    Ok(best.expect("grid is nonempty"))
}
