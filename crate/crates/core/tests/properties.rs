use proptest::prelude::*;
use skb_core::basis::lambda_set;
use skb_core::cost::cost;
use skb_core::rational::{frac, int, Rational};
use skb_core::sections::{chart_expand, Monomial};
use skb_core::verify::{perturbation_report, verify_theorem};
use skb_core::{build_basis, Section, VerifyOptions};

/// The cost formula with its floor indices fixed.
fn cost_with(k: i64, l: i64, m: i64, t: &Rational, tv: &Rational) -> Rational {
    int(3 * (k + 1)) * t + int(l) * tv
        - (tv - int(9 * m)) * (t + int(3 * m))
        - frac(3 * k * (k + 1) + 3 * l * (l + 1) + 9 * m * (3 * m - 1), 2)
}

#[test]
fn cost_is_continuous_across_index_jumps() {
    let eps = frac(1, 1000);
    for p in -18..=18 {
        for q in -54..=54 {
            let (t, tv) = (frac(p, 3), frac(q, 3));
            let here = cost(&t, &tv).value;
            for (dt, dtv) in [
                (-1, 0),
                (1, 0),
                (0, -1),
                (0, 1),
                (-1, -1),
                (1, 1),
                (-1, 1),
                (1, -1),
            ] {
                let near = cost(&(&t + int(dt) * &eps), &(&tv + int(dtv) * &eps));
                assert_eq!(
                    cost_with(near.k, near.l, near.m, &t, &tv),
                    here,
                    "one-sided formula disagrees at ({t}, {tv})"
                );
            }
        }
    }
}

#[test]
fn zero_calibration() {
    assert_eq!(cost(&int(0), &int(0)).value, int(0));
    for j in 0..3 {
        assert_eq!(cost(&int(j), &int(3 * j)).value, int(0));
    }
}

#[test]
fn lambda_entries_are_ordered() {
    for a in 2..=40u32 {
        for b in 1..a {
            let set = lambda_set(a, b).unwrap();
            for w in set.windows(2) {
                assert!(
                    w[0].m < w[1].m && w[0].s > w[1].s && w[0].d > w[1].d,
                    "({a}, {b})"
                );
            }
        }
    }
}

#[test]
fn profiles_agree_at_shared_vertices() {
    for d in 1..=6 {
        let cert = verify_theorem(&build_basis(d).unwrap(), &VerifyOptions::default()).unwrap();
        for rep in &cert.sections {
            for e in 0..3 {
                let here = rep.edges[e].profile.pl.eval(&int(1));
                let next = rep.edges[(e + 1) % 3].profile.pl.eval(&int(0));
                assert_eq!(here, next, "degree {d}, {:?}, vertex after edge {e}", rep.m);
            }
        }
    }
}

#[test]
fn corrupting_a_base_case_coefficient_fails() {
    for d in 1..=5u32 {
        let basis = build_basis(d).unwrap();
        for entry in &basis.entries {
            let (a, b) = (entry.m.a, entry.m.b);
            if !(b == 0 || a == b) {
                continue;
            }
            for mono in entry.section.monomials() {
                let mut bad = basis.clone();
                let changed = entry.section.add(&Section::term(mono.x, mono.t, int(1)));
                bad.replace(&entry.m, changed);
                let cert = verify_theorem(&bad, &VerifyOptions::default()).unwrap();
                assert!(!cert.verdict, "degree {d}, {:?}, {:?}", entry.m, mono.x);
            }
        }
    }
}

fn arb_section(degree: u32) -> impl Strategy<Value = Section> {
    let mono = (0..=degree, 0..=degree, 0..3u32, -3..=3i64).prop_filter_map(
        "degree",
        move |(i, j, t, c)| {
            (i + j <= degree && c != 0).then(|| Monomial {
                x: [degree - i - j, i, j],
                t,
                coeff: int(c),
            })
        },
    );
    prop::collection::vec(mono, 1..6)
        .prop_map(move |ms| Section::from_monomials(degree, ms).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn cost_descends_to_the_quotient(p in -400i64..400, q in -1200i64..1200, den in 1i64..12) {
        let (t, tv) = (frac(p, den), frac(q, den));
        let c = cost(&t, &tv).value;
        prop_assert_eq!(cost(&(&t - int(3)), &tv).value, c.clone());
        prop_assert_eq!(cost(&t, &(&tv - int(9))).value, c);
    }

    #[test]
    fn rotation_moves_charts(s in arb_section(3), e in 0..3u8) {
        let lhs = chart_expand(&s.rotate(1), (e + 1) % 3, 12).unwrap();
        let rhs = chart_expand(&s, e, 12).unwrap();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn perturbed_profiles_are_minima_over_terms(
        entries in prop::collection::vec(-3i64..=3, 36),
    ) {
        let basis = build_basis(2).unwrap();
        let b: Vec<Vec<i64>> = entries.chunks(6).map(|r| r.to_vec()).collect();
        let rep = perturbation_report(&basis, &b, &VerifyOptions::default()).unwrap();
        prop_assert!(rep.min_formula_ok);
    }
}
