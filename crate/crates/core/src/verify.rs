//! Certification of a built basis: exact valuation profiles on every edge,
//! leading forms, slope distinctness, and stability under `(I + tB)`.

use std::collections::BTreeSet;

use num_traits::One;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::basis::{leading_monomial, BasisDescriptor, BuildError, Builder, LambdaMutation};
use crate::cost::{cost, cost_breakpoints_in};
use crate::rational::{self, frac, int, Rational};
use crate::sections::{
    certified_valuation_profile, certified_valuation_profile_auto, CertificationError, Section,
    ValuationProfile,
};
use crate::series::PLFunction;
use crate::skeleton::{lattice_points, PolytopePoint};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum VerifyError {
    #[error("basis of degree {degree} has {found} sections, expected {expected}")]
    WrongSize {
        degree: u32,
        found: usize,
        expected: usize,
    },
    #[error("no section for lattice point {0:?}")]
    MissingPoint(PolytopePoint),
    #[error("section at {m:?} has degree {found}, expected {expected}")]
    WrongDegree {
        m: PolytopePoint,
        found: u32,
        expected: u32,
    },
    #[error("section at {m:?}, edge {edge}: {source}")]
    Certification {
        m: PolytopePoint,
        edge: u8,
        #[source]
        source: CertificationError,
    },
    #[error("perturbation matrix must be {n} by {n}")]
    BadMatrix { n: usize },
    #[error("subinterval index {s} is outside 1..={k}")]
    SlopeIndex { k: u32, s: u32 },
    #[error(transparent)]
    Build(#[from] BuildError),
}

impl VerifyError {
    /// Whether the failure comes from an uncertifiable truncation.
    pub fn is_certification(&self) -> bool {
        matches!(
            self,
            Self::Certification { .. } | Self::Build(BuildError::Certification { .. })
        )
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerifyOptions {
    /// Added to the default truncation `4d`.
    pub margin: i64,
}

impl VerifyOptions {
    pub fn with_margin(margin: i64) -> Self {
        Self { margin }
    }

    pub fn trunc(&self, degree: u32) -> u32 {
        (4 * degree as i64 + self.margin).max(0) as u32
    }
}

/// `r ↦ (d/3)·c(e + r, t∨(m))` on edge `e`.
pub fn expected_profile(m: &PolytopePoint, edge: u8, d: u32) -> PLFunction {
    let tv = m.tv();
    let lo = int(edge as i64);
    let hi = int(edge as i64 + 1);
    let scale = frac(d as i64, 3);
    let mut ts = vec![lo.clone(), hi.clone()];
    ts.extend(cost_breakpoints_in(&lo, &hi, &tv));
    PLFunction::from_samples(
        ts.into_iter()
            .map(|t| {
                let v = &scale * cost(&t, &tv).value;
                (t - &lo, v)
            })
            .collect(),
    )
}

/// `{0, ±1, …, ±k} ∪ {k+1, …, 2k−s} ∪ {−(k+1), …, −(k+s−1)}`.
pub fn slope_set_formula(k: u32, s: u32) -> Result<BTreeSet<i64>, VerifyError> {
    if s < 1 || s > k {
        return Err(VerifyError::SlopeIndex { k, s });
    }
    let (k, s) = (k as i64, s as i64);
    let mut out: BTreeSet<i64> = (-k..=k).collect();
    out.extend(k + 1..=2 * k - s);
    out.extend(-(k + s - 1)..=-(k + 1));
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EdgeCheck {
    pub edge: u8,
    pub profile: ValuationProfile,
    pub expected: PLFunction,
    pub equal: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SectionReport {
    pub m: PolytopePoint,
    /// `s_m = σ_m + t·s'_m`.
    pub leading_ok: bool,
    pub edges: Vec<EdgeCheck>,
    pub equality_ok: bool,
}

/// Slopes of all sections at the midpoint `r = (2s−1)/(2d)` of the `s`-th
/// subinterval of an edge.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SlopeSample {
    pub edge: u8,
    pub s: u32,
    #[serde(with = "rational::serde_str")]
    pub r: Rational,
    #[serde(with = "rational::serde_opt_vec")]
    pub slopes: Vec<Option<Rational>>,
    pub distinct: bool,
    pub matches_formula: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Counterexample {
    pub m: PolytopePoint,
    pub edge: u8,
    #[serde(with = "rational::serde_str")]
    pub r_lo: Rational,
    #[serde(with = "rational::serde_str")]
    pub r_hi: Rational,
    pub expected: PLFunction,
    pub actual: PLFunction,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Certificate {
    pub degree: u32,
    pub margin: i64,
    pub sections: Vec<SectionReport>,
    pub leading_ok: bool,
    pub equality_ok: bool,
    pub slope_report: Vec<SlopeSample>,
    pub slopes_match_formula: bool,
    /// Every generic subinterval shows `3d` distinct slopes, which makes the
    /// basis valuatively independent.
    pub independence_ok: bool,
    pub verdict: bool,
    pub counterexamples: Vec<Counterexample>,
}

fn profile(
    m: &PolytopePoint,
    s: &Section,
    edge: u8,
    opts: &VerifyOptions,
    d: u32,
) -> Result<ValuationProfile, VerifyError> {
    certified_valuation_profile(s, edge, opts.trunc(d)).map_err(|source| {
        VerifyError::Certification {
            m: *m,
            edge,
            source,
        }
    })
}

/// Checks one section against its leading form and its three expected
/// profiles.
pub fn verify_section(
    m: &PolytopePoint,
    section: &Section,
    d: u32,
    opts: &VerifyOptions,
) -> Result<SectionReport, VerifyError> {
    if section.degree() != d {
        return Err(VerifyError::WrongDegree {
            m: *m,
            found: section.degree(),
            expected: d,
        });
    }
    let leading_ok = section.t_free_part() == leading_monomial(m);
    let edges = (0..3u8)
        .map(|edge| {
            let profile = profile(m, section, edge, opts, d)?;
            let expected = expected_profile(m, edge, d);
            let equal = profile.pl == expected;
            Ok(EdgeCheck {
                edge,
                profile,
                expected,
                equal,
            })
        })
        .collect::<Result<Vec<_>, VerifyError>>()?;
    let equality_ok = edges.iter().all(|e| e.equal);
    Ok(SectionReport {
        m: *m,
        leading_ok,
        edges,
        equality_ok,
    })
}

fn check_shape(basis: &BasisDescriptor) -> Result<(), VerifyError> {
    let d = basis.degree;
    let expected = 3 * d as usize;
    if basis.len() != expected {
        return Err(VerifyError::WrongSize {
            degree: d,
            found: basis.len(),
            expected,
        });
    }
    for m in lattice_points(d) {
        if basis.get(&m).is_none() {
            return Err(VerifyError::MissingPoint(m));
        }
    }
    Ok(())
}

fn slope_report(d: u32, sections: &[SectionReport]) -> Vec<SlopeSample> {
    let mut out = Vec::with_capacity(3 * d as usize);
    for edge in 0..3u8 {
        for s in 1..=d {
            let r = frac(2 * s as i64 - 1, 2 * d as i64);
            let slopes: Vec<Option<Rational>> = sections
                .iter()
                .map(|rep| rep.edges[edge as usize].profile.pl.slope_at(&r))
                .collect();
            let defined: Option<Vec<Rational>> = slopes.iter().cloned().collect();
            let (distinct, matches_formula) = match defined {
                Some(v) => {
                    let set: BTreeSet<Rational> = v.iter().cloned().collect();
                    let formula: BTreeSet<Rational> = slope_set_formula(d, s)
                        .expect("s in range")
                        .into_iter()
                        .map(int)
                        .collect();
                    (set.len() == v.len(), set == formula)
                }
                None => (false, false),
            };
            out.push(SlopeSample {
                edge,
                s,
                r,
                slopes,
                distinct,
                matches_formula,
            });
        }
    }
    out
}

/// Full certificate for `basis`. Certification failures are errors; every
/// other failed check yields a certificate with a false verdict.
pub fn verify_theorem(
    basis: &BasisDescriptor,
    opts: &VerifyOptions,
) -> Result<Certificate, VerifyError> {
    check_shape(basis)?;
    let d = basis.degree;
    let sections = basis
        .entries
        .par_iter()
        .map(|e| verify_section(&e.m, &e.section, d, opts))
        .collect::<Result<Vec<_>, _>>()?;

    let counterexamples: Vec<Counterexample> = sections
        .iter()
        .flat_map(|rep| {
            rep.edges.iter().filter(|e| !e.equal).map(move |e| {
                let (r_lo, r_hi) = e
                    .expected
                    .first_difference(&e.profile.pl)
                    .expect("profiles differ");
                Counterexample {
                    m: rep.m,
                    edge: e.edge,
                    r_lo,
                    r_hi,
                    expected: e.expected.clone(),
                    actual: e.profile.pl.clone(),
                }
            })
        })
        .collect();

    let slope_report = slope_report(d, &sections);
    let leading_ok = sections.iter().all(|r| r.leading_ok);
    let equality_ok = sections.iter().all(|r| r.equality_ok);
    let independence_ok = slope_report.iter().all(|s| s.distinct);
    let slopes_match_formula = slope_report.iter().all(|s| s.matches_formula);
    let verdict = leading_ok && equality_ok && independence_ok && slopes_match_formula;
    Ok(Certificate {
        degree: d,
        margin: opts.margin,
        sections,
        leading_ok,
        equality_ok,
        slope_report,
        slopes_match_formula,
        independence_ok,
        verdict,
        counterexamples,
    })
}

/// Builds the degree-`d` basis with the same truncation margin and verifies it.
pub fn verify_degree(d: u32, opts: &VerifyOptions) -> Result<Certificate, VerifyError> {
    let basis = Builder::with_margin(opts.margin).build_basis(d)?;
    verify_theorem(&basis, opts)
}

/// The degree `a + b` basis with `S(a, b)` rebuilt under `mutation`.
pub fn mutated_basis(
    a: u32,
    b: u32,
    mutation: &LambdaMutation,
) -> Result<BasisDescriptor, VerifyError> {
    let builder = Builder::new();
    let mut basis = builder.build_basis(a + b)?;
    let section = builder.build_s_traced(a, b, Some(mutation))?.section;
    let m = PolytopePoint::new(0, a, b).expect("edge 0");
    basis.replace(&m, section);
    Ok(basis)
}

/// `s̃_m = s_m + t·Σ B_{m m'} s_{m'}`, indexed in basis order.
pub fn perturb(basis: &BasisDescriptor, b: &[Vec<i64>]) -> Result<BasisDescriptor, VerifyError> {
    let n = basis.len();
    if b.len() != n || b.iter().any(|row| row.len() != n) {
        return Err(VerifyError::BadMatrix { n });
    }
    let mut out = basis.clone();
    for (i, row) in b.iter().enumerate() {
        let mut rest = Section::zero(basis.degree);
        for (j, &c) in row.iter().enumerate() {
            if c != 0 {
                rest = rest.add(&basis.entries[j].section.scale(&int(c)));
            }
        }
        out.entries[i].section = basis.entries[i].section.add(&rest.mul_t(1));
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProfileChange {
    pub m: PolytopePoint,
    pub edge: u8,
    pub original: PLFunction,
    pub perturbed: PLFunction,
    /// `min(val s_m, 1 + val s_{m'} : B_{m m'} ≠ 0, m' ≠ m)`.
    pub predicted: PLFunction,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PerturbationReport {
    /// Every profile of the perturbed basis equals the original one.
    pub invariant: bool,
    /// Every perturbed profile equals the minimum predicted by valuative
    /// independence of the original basis.
    pub min_formula_ok: bool,
    /// Entries whose profile moved or disagrees with the prediction.
    pub changes: Vec<ProfileChange>,
}

fn profiles_of(
    basis: &BasisDescriptor,
    opts: &VerifyOptions,
    auto: bool,
) -> Result<Vec<Vec<PLFunction>>, VerifyError> {
    let d = basis.degree;
    basis
        .entries
        .par_iter()
        .map(|e| {
            (0..3u8)
                .map(|edge| {
                    let trunc = opts.trunc(d);
                    let p = if auto {
                        certified_valuation_profile_auto(&e.section, edge, trunc, trunc.max(4) * 4)
                    } else {
                        certified_valuation_profile(&e.section, edge, trunc)
                    };
                    p.map(|p| p.pl)
                        .map_err(|source| VerifyError::Certification {
                            m: e.m,
                            edge,
                            source,
                        })
                })
                .collect()
        })
        .collect()
}

pub fn perturbation_report(
    basis: &BasisDescriptor,
    b: &[Vec<i64>],
    opts: &VerifyOptions,
) -> Result<PerturbationReport, VerifyError> {
    let perturbed = perturb(basis, b)?;
    let before = profiles_of(basis, opts, false)?;
    let after = profiles_of(&perturbed, opts, true)?;
    let one = Rational::one();
    let mut changes = Vec::new();
    let mut invariant = true;
    let mut min_formula_ok = true;
    for (i, row) in b.iter().enumerate() {
        for edge in 0..3usize {
            let mut predicted = before[i][edge].clone();
            for (j, &c) in row.iter().enumerate() {
                if c != 0 && j != i {
                    predicted = predicted.min(&before[j][edge].offset(&one));
                }
            }
            let moved = after[i][edge] != before[i][edge];
            let off = after[i][edge] != predicted;
            invariant &= !moved;
            min_formula_ok &= !off;
            if moved || off {
                changes.push(ProfileChange {
                    m: basis.entries[i].m,
                    edge: edge as u8,
                    original: before[i][edge].clone(),
                    perturbed: after[i][edge].clone(),
                    predicted,
                });
            }
        }
    }
    Ok(PerturbationReport {
        invariant,
        min_formula_ok,
        changes,
    })
}

/// Whether `(I + tB)` leaves every valuation profile unchanged.
pub fn perturbation_invariance(
    basis: &BasisDescriptor,
    b: &[Vec<i64>],
    opts: &VerifyOptions,
) -> Result<bool, VerifyError> {
    Ok(perturbation_report(basis, b, opts)?.invariant)
}
