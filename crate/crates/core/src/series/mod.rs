//! Sparse bivariate power series with exact coefficients, truncated at a
//! recorded total degree.

mod hull;
mod pl;

use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Zero};

use crate::rational::{to_canonical, Rational};

pub use hull::{dominates, hull_to_plfunction, Exponent, LowerHull};
pub use pl::PLFunction;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SeriesError {
    #[error("series vanishes to order at least {order}")]
    VanishesToOrder { order: u32 },
    #[error("hull is not certified exact")]
    UncertifiedHull,
    #[error("geometric inverse needs a zero constant term")]
    NonzeroConstantTerm,
    #[error("coefficient of u^{p} v^{q} lies beyond truncation degree {trunc}")]
    BeyondTruncation { p: u32, q: u32, trunc: u32 },
}

/// `Σ c_{p,q} u^p v^q` known exactly for `p + q ≤ trunc`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TruncatedSeries {
    trunc: u32,
    terms: BTreeMap<Exponent, Rational>,
}

impl TruncatedSeries {
    pub fn zero(trunc: u32) -> Self {
        Self {
            trunc,
            terms: BTreeMap::new(),
        }
    }

    pub fn one(trunc: u32) -> Self {
        Self::monomial(trunc, (0, 0), Rational::one())
    }

    /// `c·u^p v^q`, or zero if the exponent is past the truncation.
    pub fn monomial(trunc: u32, e: Exponent, c: Rational) -> Self {
        let mut s = Self::zero(trunc);
        s.add_term(e, c);
        s
    }

    pub fn from_terms<I: IntoIterator<Item = (Exponent, Rational)>>(trunc: u32, terms: I) -> Self {
        let mut s = Self::zero(trunc);
        for (e, c) in terms {
            s.add_term(e, c);
        }
        s
    }

    /// Adds `c·u^p v^q` in place, dropping it past the truncation.
    pub fn add_term(&mut self, e: Exponent, c: Rational) {
        if e.0 + e.1 > self.trunc || c.is_zero() {
            return;
        }
        let slot = self.terms.entry(e).or_insert_with(Rational::zero);
        *slot += c;
        if slot.is_zero() {
            self.terms.remove(&e);
        }
    }

    pub fn trunc_degree(&self) -> u32 {
        self.trunc
    }

    pub fn terms(&self) -> &BTreeMap<Exponent, Rational> {
        &self.terms
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

    pub fn coefficient(&self, p: u32, q: u32) -> Result<Rational, SeriesError> {
        if p + q > self.trunc {
            return Err(SeriesError::BeyondTruncation {
                p,
                q,
                trunc: self.trunc,
            });
        }
        Ok(self
            .terms
            .get(&(p, q))
            .cloned()
            .unwrap_or_else(Rational::zero))
    }

    /// Same series known to a lower order.
    pub fn truncate(&self, trunc: u32) -> Self {
        let trunc = trunc.min(self.trunc);
        Self {
            trunc,
            terms: self
                .terms
                .iter()
                .filter(|(e, _)| e.0 + e.1 <= trunc)
                .map(|(e, c)| (*e, c.clone()))
                .collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.truncate(other.trunc);
        for (e, c) in &other.terms {
            out.add_term(*e, c.clone());
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        let mut out = self.truncate(other.trunc);
        for (e, c) in &other.terms {
            out.add_term(*e, -c.clone());
        }
        out
    }

    pub fn mul(&self, other: &Self) -> Self {
        let trunc = self.trunc.min(other.trunc);
        let mut acc: BTreeMap<Exponent, Rational> = BTreeMap::new();
        for (ea, ca) in &self.terms {
            let da = ea.0 + ea.1;
            if da > trunc {
                continue;
            }
            for (eb, cb) in &other.terms {
                if da + eb.0 + eb.1 > trunc {
                    continue;
                }
                *acc.entry((ea.0 + eb.0, ea.1 + eb.1))
                    .or_insert_with(Rational::zero) += ca * cb;
            }
        }
        acc.retain(|_, c| !c.is_zero());
        Self { trunc, terms: acc }
    }

    pub fn scale(&self, c: &Rational) -> Self {
        if c.is_zero() {
            return Self::zero(self.trunc);
        }
        Self {
            trunc: self.trunc,
            terms: self.terms.iter().map(|(e, x)| (*e, x * c)).collect(),
        }
    }

    /// Multiplies by `u^p v^q`, keeping the truncation degree.
    pub fn shift(&self, p: u32, q: u32) -> Self {
        Self::from_terms(
            self.trunc,
            self.terms
                .iter()
                .map(|(e, c)| ((e.0 + p, e.1 + q), c.clone())),
        )
    }

    pub fn pow(&self, n: u32) -> Self {
        let mut out = Self::one(self.trunc);
        for _ in 0..n {
            out = out.mul(self);
        }
        out
    }

    /// Exact value of the retained polynomial at `(u, v)`.
    pub fn eval(&self, u: &Rational, v: &Rational) -> Rational {
        let mut acc = Rational::zero();
        for ((p, q), c) in &self.terms {
            acc += c * pow_rat(u, *p) * pow_rat(v, *q);
        }
        acc
    }

    /// Lower hull of the retained support. Not certified: truncation may hide
    /// terms that would lower the envelope.
    pub fn lower_hull(&self) -> Result<LowerHull, SeriesError> {
        lower_hull(self)
    }
}

fn pow_rat(x: &Rational, n: u32) -> Rational {
    let mut out = Rational::one();
    for _ in 0..n {
        out *= x;
    }
    out
}

pub fn series_add(a: &TruncatedSeries, b: &TruncatedSeries) -> TruncatedSeries {
    a.add(b)
}

pub fn series_sub(a: &TruncatedSeries, b: &TruncatedSeries) -> TruncatedSeries {
    a.sub(b)
}

pub fn series_mul(a: &TruncatedSeries, b: &TruncatedSeries) -> TruncatedSeries {
    a.mul(b)
}

/// `1 / (1 + u)` to total degree `trunc`, for `u` without constant term.
pub fn geom_inverse(u: &TruncatedSeries, trunc: u32) -> Result<TruncatedSeries, SeriesError> {
    if u.terms.contains_key(&(0, 0)) {
        return Err(SeriesError::NonzeroConstantTerm);
    }
    let neg = u.truncate(trunc).scale(&-Rational::one());
    let trunc = neg.trunc;
    let mut out = TruncatedSeries::one(trunc);
    let mut power = TruncatedSeries::one(trunc);
    // Each power of u raises the order by at least one.
    for _ in 0..trunc {
        power = power.mul(&neg);
        if power.is_zero() {
            break;
        }
        out = out.add(&power);
    }
    Ok(out)
}

pub fn lower_hull(s: &TruncatedSeries) -> Result<LowerHull, SeriesError> {
    if s.terms.is_empty() {
        return Err(SeriesError::VanishesToOrder { order: s.trunc + 1 });
    }
    Ok(LowerHull::from_support(s.terms.keys().copied(), false))
}

impl fmt::Display for TruncatedSeries {
    /// `c*u^p*v^q + … + O(deg > D)` in graded order.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut keys: Vec<&Exponent> = self.terms.keys().collect();
        keys.sort_by_key(|e| (e.0 + e.1, std::cmp::Reverse(e.0)));
        let mut first = true;
        for e in keys {
            let c = &self.terms[e];
            let (sign, mag) = if c < &Rational::zero() {
                ("-", -c.clone())
            } else {
                ("+", c.clone())
            };
            if first {
                if sign == "-" {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {sign} ")?;
            }
            first = false;
            let mut factors: Vec<String> = Vec::new();
            if !mag.is_one() || (e.0 == 0 && e.1 == 0) {
                factors.push(to_canonical(&mag));
            }
            for (name, k) in [("u", e.0), ("v", e.1)] {
                match k {
                    0 => {}
                    1 => factors.push(name.to_string()),
                    _ => factors.push(format!("{name}^{k}")),
                }
            }
            write!(f, "{}", factors.join("*"))?;
        }
        if first {
            write!(f, "0")?;
        }
        write!(f, " + O(deg > {})", self.trunc)
    }
}
