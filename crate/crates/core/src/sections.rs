//! Sections of `L^ℓ` as homogeneous polynomials in `x0, x1, x2, t`, their
//! expansions in the three vertex charts of the Fermat cubic, and certified
//! valuation profiles along the skeleton edges.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::rational::{self, to_canonical, Rational};
use crate::series::{geom_inverse, Exponent, LowerHull, PLFunction, SeriesError, TruncatedSeries};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SectionError {
    #[error("monomial of x-degree {found} in a section of degree {expected}")]
    NotHomogeneous { expected: u32, found: u32 },
    #[error("cannot combine sections of degrees {0} and {1}")]
    DegreeMismatch(u32, u32),
    #[error("edge {0} is not in 0..3")]
    BadEdge(u8),
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum CertificationError {
    #[error("section is identically zero")]
    ZeroSection,
    #[error("edge {edge}: expansion to degree {trunc} is empty")]
    EmptyExpansion { edge: u8, trunc: u32 },
    #[error("edge {edge}: retained support does not reach the floor {floor:?} at degree {trunc}")]
    FloorNotAttained {
        edge: u8,
        trunc: u32,
        floor: Exponent,
    },
    #[error("edge {edge}: truncation degree {trunc} is below the required {required}")]
    TruncationTooSmall { edge: u8, trunc: u32, required: u32 },
    #[error(transparent)]
    Series(#[from] SeriesError),
}

impl CertificationError {
    /// Smallest truncation degree known to be needed, if the failure says so.
    pub fn required_trunc(&self) -> Option<u32> {
        match self {
            Self::TruncationTooSmall { required, .. } => Some(*required),
            _ => None,
        }
    }
}

/// `coeff · x0^x[0] x1^x[1] x2^x[2] · t^t`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Monomial {
    pub x: [u32; 3],
    pub t: u32,
    #[serde(with = "rational::serde_str")]
    pub coeff: Rational,
}

type Key = ([u32; 3], u32);

/// Homogeneous polynomial of degree `degree` in the `x_i`, with coefficients
/// polynomial in `t`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "SectionJson", into = "SectionJson")]
pub struct Section {
    degree: u32,
    terms: BTreeMap<Key, Rational>,
}

#[derive(Serialize, Deserialize)]
struct SectionJson {
    degree: u32,
    monomials: Vec<Monomial>,
}

impl From<Section> for SectionJson {
    fn from(s: Section) -> Self {
        Self {
            degree: s.degree,
            monomials: s.monomials().collect(),
        }
    }
}

impl TryFrom<SectionJson> for Section {
    type Error = SectionError;

    fn try_from(j: SectionJson) -> Result<Self, SectionError> {
        Section::from_monomials(j.degree, j.monomials)
    }
}

impl Section {
    pub fn zero(degree: u32) -> Self {
        Self {
            degree,
            terms: BTreeMap::new(),
        }
    }

    /// The constant section `1` of degree 0.
    pub fn one() -> Self {
        Self::term([0, 0, 0], 0, Rational::one())
    }

    pub fn term(x: [u32; 3], t: u32, coeff: Rational) -> Self {
        let mut s = Self::zero(x.iter().sum());
        s.add_term(x, t, coeff);
        s
    }

    /// The coordinate `x_i`.
    pub fn var(i: usize) -> Self {
        let mut x = [0; 3];
        x[i] = 1;
        Self::term(x, 0, Rational::one())
    }

    pub fn from_monomials<I: IntoIterator<Item = Monomial>>(
        degree: u32,
        monomials: I,
    ) -> Result<Self, SectionError> {
        let mut s = Self::zero(degree);
        for m in monomials {
            let found = m.x.iter().sum();
            if found != degree {
                return Err(SectionError::NotHomogeneous {
                    expected: degree,
                    found,
                });
            }
            s.add_term(m.x, m.t, m.coeff);
        }
        Ok(s)
    }

    fn add_term(&mut self, x: [u32; 3], t: u32, c: Rational) {
        debug_assert_eq!(x.iter().sum::<u32>(), self.degree);
        if c.is_zero() {
            return;
        }
        let slot = self.terms.entry((x, t)).or_insert_with(Rational::zero);
        *slot += c;
        if slot.is_zero() {
            self.terms.remove(&(x, t));
        }
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn monomials(&self) -> impl Iterator<Item = Monomial> + '_ {
        self.terms.iter().map(|((x, t), c)| Monomial {
            x: *x,
            t: *t,
            coeff: c.clone(),
        })
    }

    pub fn coefficient(&self, x: [u32; 3], t: u32) -> Rational {
        self.terms
            .get(&(x, t))
            .cloned()
            .unwrap_or_else(Rational::zero)
    }

    pub fn max_t_degree(&self) -> u32 {
        self.terms.keys().map(|k| k.1).max().unwrap_or(0)
    }

    fn check_same_degree(&self, other: &Self) -> Result<(), SectionError> {
        if self.degree != other.degree && !self.is_zero() && !other.is_zero() {
            return Err(SectionError::DegreeMismatch(self.degree, other.degree));
        }
        Ok(())
    }

    pub fn try_add(&self, other: &Self) -> Result<Self, SectionError> {
        self.check_same_degree(other)?;
        let mut out = if self.is_zero() {
            Self::zero(other.degree)
        } else {
            self.clone()
        };
        for ((x, t), c) in &other.terms {
            out.add_term(*x, *t, c.clone());
        }
        Ok(out)
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self, SectionError> {
        self.try_add(&other.scale(&-Rational::one()))
    }

    pub fn add(&self, other: &Self) -> Self {
        self.try_add(other).expect("degrees agree")
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.try_sub(other).expect("degrees agree")
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut out = Self::zero(self.degree + other.degree);
        for ((xa, ta), ca) in &self.terms {
            for ((xb, tb), cb) in &other.terms {
                let x = [xa[0] + xb[0], xa[1] + xb[1], xa[2] + xb[2]];
                out.add_term(x, ta + tb, ca * cb);
            }
        }
        out
    }

    pub fn pow(&self, n: u32) -> Self {
        let mut out = Self::one();
        for _ in 0..n {
            out = out.mul(self);
        }
        out
    }

    pub fn scale(&self, c: &Rational) -> Self {
        if c.is_zero() {
            return Self::zero(self.degree);
        }
        Self {
            degree: self.degree,
            terms: self.terms.iter().map(|(k, v)| (*k, v * c)).collect(),
        }
    }

    /// Multiplies by `t^j`.
    pub fn mul_t(&self, j: u32) -> Self {
        Self {
            degree: self.degree,
            terms: self
                .terms
                .iter()
                .map(|((x, t), c)| ((*x, t + j), c.clone()))
                .collect(),
        }
    }

    /// Substitutes `x_i ↦ x_{perm[i]}`.
    pub fn permute(&self, perm: [usize; 3]) -> Self {
        let mut out = Self::zero(self.degree);
        for ((x, t), c) in &self.terms {
            let mut y = [0; 3];
            for i in 0..3 {
                y[perm[i]] = x[i];
            }
            out.add_term(y, *t, c.clone());
        }
        out
    }

    /// Substitutes `x_i ↦ x_{i+shift}`.
    pub fn rotate(&self, shift: u8) -> Self {
        let s = shift as usize % 3;
        self.permute([s, (1 + s) % 3, (2 + s) % 3])
    }

    /// Exchanges `x1` and `x2`.
    pub fn swap12(&self) -> Self {
        self.permute([0, 2, 1])
    }

    /// Terms free of `t`.
    pub fn t_free_part(&self) -> Self {
        Self {
            degree: self.degree,
            terms: self
                .terms
                .iter()
                .filter(|((_, t), _)| *t == 0)
                .map(|(k, c)| (*k, c.clone()))
                .collect(),
        }
    }

    /// Exact value at a point of `ℚ³ × ℚ`.
    pub fn eval(&self, x: &[Rational; 3], t: &Rational) -> Rational {
        let pw = |b: &Rational, e: u32| -> Rational {
            let mut r = Rational::one();
            for _ in 0..e {
                r *= b;
            }
            r
        };
        self.terms
            .iter()
            .map(|((e, j), c)| c * pw(&x[0], e[0]) * pw(&x[1], e[1]) * pw(&x[2], e[2]) * pw(t, *j))
            .fold(Rational::zero(), |a, b| a + b)
    }
}

impl fmt::Display for Section {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut keys: Vec<&Key> = self.terms.keys().collect();
        keys.sort_by_key(|(x, t)| (*t, std::cmp::Reverse([x[1], x[2], x[0]])));
        if keys.is_empty() {
            return write!(f, "0");
        }
        for (i, key) in keys.into_iter().enumerate() {
            let c = &self.terms[key];
            let mag = c.abs();
            match (i, c.is_negative()) {
                (0, true) => write!(f, "-")?,
                (0, false) => {}
                (_, true) => write!(f, " - ")?,
                (_, false) => write!(f, " + ")?,
            }
            let mut factors = Vec::new();
            let (x, t) = key;
            if !mag.is_one() || (*t == 0 && x.iter().all(|e| *e == 0)) {
                factors.push(to_canonical(&mag));
            }
            match t {
                0 => {}
                1 => factors.push("t".to_string()),
                _ => factors.push(format!("t^{t}")),
            }
            for (i, e) in x.iter().enumerate() {
                match *e {
                    0 => {}
                    1 => factors.push(format!("x{i}")),
                    e => factors.push(format!("x{i}^{e}")),
                }
            }
            write!(f, "{}", factors.join("*"))?;
        }
        Ok(())
    }
}

fn check_edge(edge: u8) -> Result<usize, SectionError> {
    if edge < 3 {
        Ok(edge as usize)
    } else {
        Err(SectionError::BadEdge(edge))
    }
}

/// Chart exponents `(u, v)` of `x^A t^j` on edge `e`, before the factor
/// `(1 + u³ + v³)^{−j}`: `(A_e + j, A_{e+1} + j)`.
fn chart_shift(x: &[u32; 3], t: u32, edge: usize) -> Exponent {
    (x[edge] + t, x[(edge + 1) % 3] + t)
}

/// Powers of `1/(1 + u³ + v³)`, computed on demand.
struct InversePowers {
    trunc: u32,
    powers: Vec<TruncatedSeries>,
}

impl InversePowers {
    fn new(trunc: u32) -> Self {
        let w = TruncatedSeries::from_terms(
            trunc,
            [((3, 0), Rational::one()), ((0, 3), Rational::one())],
        );
        let g = geom_inverse(&w, trunc).expect("u³ + v³ has no constant term");
        Self {
            trunc,
            powers: vec![TruncatedSeries::one(trunc), g],
        }
    }

    fn get(&mut self, j: u32) -> &TruncatedSeries {
        while self.powers.len() <= j as usize {
            let next = self.powers.last().unwrap().mul(&self.powers[1]);
            self.powers.push(next);
        }
        &self.powers[j as usize]
    }
}

/// Taylor expansion of `s / x_{e−1}^d` on the curve at the torus-fixed point
/// `x_e = x_{e+1} = 0`, in `u = x_e/x_{e−1}`, `v = x_{e+1}/x_{e−1}`, exact to
/// total degree `trunc`.
pub fn chart_expand(s: &Section, edge: u8, trunc: u32) -> Result<TruncatedSeries, SectionError> {
    let e = check_edge(edge)?;
    let mut inv = InversePowers::new(trunc);
    let mut out = TruncatedSeries::zero(trunc);
    for ((x, j), c) in &s.terms {
        let (p0, q0) = chart_shift(x, *j, e);
        if p0 + q0 > trunc {
            continue;
        }
        let room = trunc - p0 - q0;
        for ((p, q), g) in inv.get(*j).terms() {
            if p + q <= room {
                out.add_term((p + p0, q + q0), c * g);
            }
        }
    }
    debug_assert_eq!(out.trunc_degree(), inv.trunc);
    Ok(out)
}

/// Componentwise lower bound on the chart exponents of `s` on `edge`.
pub fn support_floor(s: &Section, edge: u8) -> Result<Option<Exponent>, SectionError> {
    let e = check_edge(edge)?;
    Ok(s.terms.keys().fold(None, |acc, (x, j)| {
        let (p, q) = chart_shift(x, *j, e);
        Some(match acc {
            None => (p, q),
            Some((a, b)) => (a.min(p), b.min(q)),
        })
    }))
}

/// Exact coefficient of `u^p v^q` in the chart expansion.
pub fn coefficient_at(s: &Section, edge: u8, p: u32, q: u32) -> Result<Rational, SectionError> {
    let series = chart_expand(s, edge, p + q)?;
    Ok(series.coefficient(p, q).expect("within truncation"))
}

/// Why a hull is the hull of the full, untruncated expansion.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "route", rename_all = "snake_case")]
pub enum HullCertificate {
    /// The floor exponent itself carries a nonzero coefficient, so every
    /// term dominates it componentwise.
    SingleVertex { vertex: Exponent },
    /// Every term past `trunc` dominates `(p_star, q_star)` or
    /// `(p_star2, q_star2)` componentwise, because `trunc ≥ p_star2 + q_star`.
    ComponentwiseDomination {
        trunc: u32,
        p_star: u32,
        q_star: u32,
        p_star2: u32,
        q_star2: u32,
    },
}

/// Exact `r ↦ val_n(s)` along one edge, with its certificate.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValuationProfile {
    pub edge: u8,
    pub pl: PLFunction,
    pub hull: LowerHull,
    pub certificate: HullCertificate,
}

/// Certified valuation profile of `s` on `edge`, reading the expansion to
/// total degree `trunc` when a single vertex does not suffice.
pub fn certified_valuation_profile(
    s: &Section,
    edge: u8,
    trunc: u32,
) -> Result<ValuationProfile, CertificationError> {
    let floor = support_floor(s, edge)
        .map_err(|_| CertificationError::ZeroSection)?
        .ok_or(CertificationError::ZeroSection)?;

    let corner = coefficient_at(s, edge, floor.0, floor.1).expect("edge checked");
    if !corner.is_zero() {
        let hull = LowerHull::from_support([floor], true);
        return Ok(ValuationProfile {
            edge,
            pl: hull.to_pl(),
            hull,
            certificate: HullCertificate::SingleVertex { vertex: floor },
        });
    }

    let series = chart_expand(s, edge, trunc).expect("edge checked");
    if series.is_zero() {
        return Err(CertificationError::EmptyExpansion { edge, trunc });
    }
    let keys = series.terms().keys();
    let p_min = keys.clone().map(|e| e.0).min().unwrap();
    let q_min = keys.clone().map(|e| e.1).min().unwrap();
    if p_min != floor.0 || q_min != floor.1 {
        return Err(CertificationError::FloorNotAttained { edge, trunc, floor });
    }
    let q_star = keys
        .clone()
        .filter(|e| e.0 == p_min)
        .map(|e| e.1)
        .min()
        .unwrap();
    let p_star2 = keys.filter(|e| e.1 == q_min).map(|e| e.0).min().unwrap();
    let required = p_star2 + q_star;
    if trunc < required {
        return Err(CertificationError::TruncationTooSmall {
            edge,
            trunc,
            required,
        });
    }
    let hull = series.lower_hull()?.mark_certified();
    Ok(ValuationProfile {
        edge,
        pl: hull.to_pl(),
        hull,
        certificate: HullCertificate::ComponentwiseDomination {
            trunc,
            p_star: p_min,
            q_star,
            p_star2,
            q_star2: q_min,
        },
    })
}

/// As [`certified_valuation_profile`], raising the truncation as the failures
/// demand, up to `max_trunc`.
pub fn certified_valuation_profile_auto(
    s: &Section,
    edge: u8,
    start: u32,
    max_trunc: u32,
) -> Result<ValuationProfile, CertificationError> {
    let mut trunc = start;
    loop {
        match certified_valuation_profile(s, edge, trunc) {
            Err(e) if trunc < max_trunc => {
                let next = match &e {
                    CertificationError::TruncationTooSmall { required, .. } => *required,
                    CertificationError::FloorNotAttained { .. }
                    | CertificationError::EmptyExpansion { .. } => trunc.max(1) * 2,
                    _ => return Err(e),
                };
                trunc = next.min(max_trunc);
            }
            other => return other,
        }
    }
}
