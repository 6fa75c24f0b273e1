//! Inductive construction of the sections `S(a, b)` and of the full basis
//! `{s_m : m ∈ ∂Δ_ℓ}` in each degree.

use std::collections::HashMap;
use std::sync::{Arc, Mutex};

use num_integer::gcd;
use num_traits::{One, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::rational::{self, is_integral, to_canonical, Rational};
use crate::sections::{certified_valuation_profile, coefficient_at, CertificationError, Section};
use crate::skeleton::PolytopePoint;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum BuildError {
    #[error("need a > b >= 1, got a = {a}, b = {b}")]
    NotAboveDiagonal { a: u32, b: u32 },
    #[error("need a != b and a, b >= 1, got a = {a}, b = {b}")]
    NotMixed { a: u32, b: u32 },
    #[error("({m}, {s}) is not in the bad-term set of ({a}, {b})")]
    NotInLambda { a: u32, b: u32, m: u32, s: u32 },
    #[error("correction ({m}, {s}) for ({a}, {b}) has a negative exponent")]
    NegativeExponent { a: u32, b: u32, m: u32, s: u32 },
    #[error("correction step {step} for ({a}, {b}) left coefficient {residual}")]
    NotAnnihilated {
        a: u32,
        b: u32,
        step: usize,
        residual: String,
    },
    #[error("degree must be at least 1")]
    ZeroDegree,
    #[error("vertex {0:?}: the two edge formulas disagree")]
    VertexMismatch(PolytopePoint),
    #[error("S({a}, {b}): {source}")]
    Certification {
        a: u32,
        b: u32,
        #[source]
        source: CertificationError,
    },
}

/// A bad term `(m, s)` with gap `d = s − m`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct LambdaEntry {
    pub m: u32,
    pub s: u32,
    pub d: i64,
}

impl LambdaEntry {
    /// `a·m < b(a − s) ≤ (a − 1)m + b`, cross-multiplied.
    pub fn satisfies(&self, a: u32, b: u32) -> bool {
        let (a, b, m, s) = (a as i64, b as i64, self.m as i64, self.s as i64);
        m > 0 && s > 0 && a * m < b * (a - s) && b * (a - s) <= (a - 1) * m + b
    }
}

fn check_above_diagonal(a: u32, b: u32) -> Result<(), BuildError> {
    if a > b && b >= 1 {
        Ok(())
    } else {
        Err(BuildError::NotAboveDiagonal { a, b })
    }
}

/// `Λ_{a,b}` ordered by `m` increasing.
pub fn lambda_set(a: u32, b: u32) -> Result<Vec<LambdaEntry>, BuildError> {
    check_above_diagonal(a, b)?;
    let mut out = Vec::new();
    for m in 1..b {
        for s in 1..a {
            let e = LambdaEntry {
                m,
                s,
                d: s as i64 - m as i64,
            };
            if e.satisfies(a, b) {
                out.push(e);
            }
        }
    }
    Ok(out)
}

/// `(b + gcd(a−1, b) − gcd(a, b) − 1) / 2`.
pub fn lambda_cardinality(a: u32, b: u32) -> Result<usize, BuildError> {
    check_above_diagonal(a, b)?;
    Ok(((b + gcd(a - 1, b) - gcd(a, b) - 1) / 2) as usize)
}

/// Which of the three correction shapes applies to a bad term.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CorrectionCase {
    /// `3d > 2a`: `t^{2a+5m−2s} x0^{a−d} S(2d−a, a+b−d)`.
    LowerSection,
    /// `a − b ≤ 3d ≤ 2a`: `t^{a+3m} x0^{2a−3d} x2^{3d+b−a}`.
    X2Monomial,
    /// `3d < a − b`: `t^{b+3s} x0^{2b+3d} x1^{a−b−3d}`.
    X1Monomial,
}

impl CorrectionCase {
    pub fn classify(a: u32, b: u32, d: i64) -> Self {
        let (a, b) = (a as i64, b as i64);
        if 3 * d > 2 * a {
            Self::LowerSection
        } else if 3 * d >= a - b {
            Self::X2Monomial
        } else {
            Self::X1Monomial
        }
    }
}

/// One pass of the correction loop.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CorrectionStep {
    pub entry: LambdaEntry,
    pub case: CorrectionCase,
    #[serde(with = "rational::serde_str")]
    pub lambda: Rational,
    pub integral: bool,
    /// Coefficient at `(a + 3m, b + 3s)` once the step is applied.
    #[serde(with = "rational::serde_str")]
    pub residual: Rational,
}

/// A build of `S(a, b)` with every intermediate kept.
#[derive(Debug, Clone)]
pub struct BuildTrace {
    pub a: u32,
    pub b: u32,
    pub r0: Section,
    pub steps: Vec<CorrectionStep>,
    pub section: Section,
}

/// Perturbation of one λ, for negative controls.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LambdaMutation {
    /// Zero-based index into the correction loop.
    pub step: usize,
    pub delta: Rational,
}

fn to_u32(v: i64, a: u32, b: u32, e: &LambdaEntry) -> Result<u32, BuildError> {
    u32::try_from(v).map_err(|_| BuildError::NegativeExponent {
        a,
        b,
        m: e.m,
        s: e.s,
    })
}

/// Memoizing builder. The cache is keyed by `(a, b)` across degrees and is
/// safe to share between threads.
#[derive(Debug, Default)]
pub struct Builder {
    margin: i64,
    cache: Mutex<HashMap<(u32, u32), Arc<Section>>>,
}

impl Builder {
    pub fn new() -> Self {
        Self::default()
    }

    /// Builder whose own-edge certification reads expansions to
    /// `4(a + b) + margin`.
    pub fn with_margin(margin: i64) -> Self {
        Self {
            margin,
            cache: Mutex::default(),
        }
    }

    pub fn margin(&self) -> i64 {
        self.margin
    }

    pub fn own_edge_trunc(&self, a: u32, b: u32) -> u32 {
        (4 * (a + b) as i64 + self.margin).max(0) as u32
    }

    fn cached(&self, a: u32, b: u32) -> Option<Arc<Section>> {
        self.cache.lock().unwrap().get(&(a, b)).cloned()
    }

    fn store(&self, a: u32, b: u32, s: Section) -> Arc<Section> {
        self.cache
            .lock()
            .unwrap()
            .entry((a, b))
            .or_insert_with(|| Arc::new(s))
            .clone()
    }

    /// `S(a, b)` in the variables `x0, x1, x2`.
    pub fn build_s(&self, a: u32, b: u32) -> Result<Arc<Section>, BuildError> {
        assert!(a + b > 0, "S(0, 0) is not defined");
        if let Some(s) = self.cached(a, b) {
            return Ok(s);
        }
        let section = if b == 0 {
            Section::var(1).pow(a)
        } else if a == 0 {
            Section::var(2).pow(b)
        } else if a == b {
            midpoint_section().pow(a)
        } else if b > a {
            self.build_s(b, a)?.swap12()
        } else {
            self.build_s_traced(a, b, None)?.section
        };
        if a != b && a > 0 && b > 0 {
            let trunc = self.own_edge_trunc(a, b);
            certified_valuation_profile(&section, 1, trunc)
                .map_err(|source| BuildError::Certification { a, b, source })?;
        }
        Ok(self.store(a, b, section))
    }

    /// `R_0(a, b)`, in either of its mirrored forms.
    pub fn build_r0(&self, a: u32, b: u32) -> Result<Section, BuildError> {
        if a == b || a == 0 || b == 0 {
            return Err(BuildError::NotMixed { a, b });
        }
        let t2 = |s: &Section| s.mul_t(2).mul(&Section::var(0));
        Ok(if a > b {
            Section::var(1)
                .mul(&*self.build_s(a - 1, b)?)
                .sub(&t2(&*self.build_s(a - 2, b + 1)?))
        } else {
            Section::var(2)
                .mul(&*self.build_s(a, b - 1)?)
                .sub(&t2(&*self.build_s(a + 1, b - 2)?))
        })
    }

    /// The term removed for `entry` (without the factor λ).
    pub fn correction_term(
        &self,
        a: u32,
        b: u32,
        entry: &LambdaEntry,
    ) -> Result<Section, BuildError> {
        check_above_diagonal(a, b)?;
        if !entry.satisfies(a, b) || entry.d != entry.s as i64 - entry.m as i64 {
            return Err(BuildError::NotInLambda {
                a,
                b,
                m: entry.m,
                s: entry.s,
            });
        }
        let (ai, bi, m, s, d) = (a as i64, b as i64, entry.m as i64, entry.s as i64, entry.d);
        let u = |v: i64| to_u32(v, a, b, entry);
        Ok(match CorrectionCase::classify(a, b, d) {
            CorrectionCase::LowerSection => {
                let lower = self.build_s(u(2 * d - ai)?, u(ai + bi - d)?)?;
                Section::term(
                    [u(ai - d)?, 0, 0],
                    u(2 * ai + 5 * m - 2 * s)?,
                    Rational::one(),
                )
                .mul(&lower)
            }
            CorrectionCase::X2Monomial => Section::term(
                [u(2 * ai - 3 * d)?, 0, u(3 * d + bi - ai)?],
                u(ai + 3 * m)?,
                Rational::one(),
            ),
            CorrectionCase::X1Monomial => Section::term(
                [u(2 * bi + 3 * d)?, u(ai - bi - 3 * d)?, 0],
                u(bi + 3 * s)?,
                Rational::one(),
            ),
        })
    }

    /// Runs `R_0` and the correction loop for `a > b ≥ 1`, optionally
    /// perturbing one λ. A mutated build is never cached.
    pub fn build_s_traced(
        &self,
        a: u32,
        b: u32,
        mutation: Option<&LambdaMutation>,
    ) -> Result<BuildTrace, BuildError> {
        check_above_diagonal(a, b)?;
        let r0 = self.build_r0(a, b)?;
        let mut r = r0.clone();
        let mut steps = Vec::new();
        for (i, entry) in lambda_set(a, b)?.into_iter().enumerate() {
            let (p, q) = (a + 3 * entry.m, b + 3 * entry.s);
            let mut lambda = coefficient_at(&r, 1, p, q).expect("edge 1 exists");
            let integral = is_integral(&lambda);
            if !integral {
                log::warn!(
                    "S({a}, {b}) step {}: non-integral lambda {}",
                    i + 1,
                    to_canonical(&lambda)
                );
            }
            if let Some(mu) = mutation.filter(|mu| mu.step == i) {
                lambda += &mu.delta;
            }
            let case = CorrectionCase::classify(a, b, entry.d);
            r = r.sub(&self.correction_term(a, b, &entry)?.scale(&lambda));
            let residual = coefficient_at(&r, 1, p, q).expect("edge 1 exists");
            if mutation.is_none() && !residual.is_zero() {
                return Err(BuildError::NotAnnihilated {
                    a,
                    b,
                    step: i + 1,
                    residual: to_canonical(&residual),
                });
            }
            steps.push(CorrectionStep {
                entry,
                case,
                lambda,
                integral,
                residual,
            });
        }
        Ok(BuildTrace {
            a,
            b,
            r0,
            steps,
            section: r,
        })
    }

    /// The basis of degree `d`, ordered by edge and then `a` descending.
    pub fn build_basis(&self, d: u32) -> Result<BasisDescriptor, BuildError> {
        if d == 0 {
            return Err(BuildError::ZeroDegree);
        }
        let base: Vec<Arc<Section>> = (0..=d)
            .into_par_iter()
            .map(|a| self.build_s(a, d - a))
            .collect::<Result<_, _>>()?;
        let mut entries = Vec::with_capacity(3 * d as usize);
        for edge in 0..3u8 {
            for a in (1..=d).rev() {
                let b = d - a;
                let section = base[a as usize].rotate(edge);
                if b == 0 {
                    let other = base[0].rotate((edge + 2) % 3);
                    if other != section {
                        return Err(BuildError::VertexMismatch(PolytopePoint { edge, a, b }));
                    }
                }
                entries.push(BasisEntry {
                    m: PolytopePoint { edge, a, b },
                    section,
                });
            }
        }
        Ok(BasisDescriptor { degree: d, entries })
    }
}

/// `S(1, 1) = x1 x2 − t x0²`.
pub fn midpoint_section() -> Section {
    Section::var(1)
        .mul(&Section::var(2))
        .sub(&Section::term([2, 0, 0], 1, Rational::one()))
}

/// `σ_m`: `x1^a x2^b` on the first edge, rotated cyclically on the others.
pub fn leading_monomial(m: &PolytopePoint) -> Section {
    Section::term([0, m.a, m.b], 0, Rational::one()).rotate(m.edge)
}

pub fn build_basis(d: u32) -> Result<BasisDescriptor, BuildError> {
    Builder::new().build_basis(d)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BasisEntry {
    pub m: PolytopePoint,
    pub section: Section,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BasisDescriptor {
    pub degree: u32,
    pub entries: Vec<BasisEntry>,
}

impl BasisDescriptor {
    pub fn get(&self, m: &PolytopePoint) -> Option<&Section> {
        self.entries.iter().find(|e| &e.m == m).map(|e| &e.section)
    }

    /// Replaces the section at `m`; returns whether `m` was present.
    pub fn replace(&mut self, m: &PolytopePoint, section: Section) -> bool {
        match self.entries.iter_mut().find(|e| &e.m == m) {
            Some(e) => {
                e.section = section;
                true
            }
            None => false,
        }
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}
