use proptest::prelude::*;

use prym_core::flow::{
    cylinder_modulus, decompose, projective_direction, saddle_connections, DEFAULT_STEP_CAP,
};
use prym_core::models::{
    intersection_matrix, load_manifest, manifest_to_json, slit_interval, table1_rows, CandidateSpec, Catalog,
    ModelRef,
};
use prym_core::qfield::parse_quad;
use prym_core::surface::fixtures;
use prym_core::veech::{audit_candidate, verify_certificate, AuditConfig, Verdict};
use prym_core::{Mat2, QuadElem, TranslationSurface, Vec2};

fn quad(d: u64) -> impl Strategy<Value = QuadElem> {
    (-40i64..=40, 1i64..=12, -40i64..=40, 1i64..=12)
        .prop_map(move |(an, ad, bn, bd)| QuadElem::from_parts(an, ad, bn, bd, d))
}

fn field() -> impl Strategy<Value = u64> {
    prop_oneof![Just(2u64), Just(3), Just(33)]
}

fn l_shape() -> TranslationSurface {
    // three unit squares: 0 and 1 side by side, 2 on top of 0
    fixtures::square_tiled(&[1, 0, 2], &[2, 1, 0], 2).unwrap()
}

fn surfaces() -> Vec<TranslationSurface> {
    vec![fixtures::torus(2), fixtures::octagon(), l_shape()]
}

fn nonsingular(d: u64) -> impl Strategy<Value = Mat2> {
    (-3i64..=3, -3i64..=3, -3i64..=3, -3i64..=3)
        .prop_filter("nonsingular", |(a, b, c, e)| a * e - b * c != 0)
        .prop_map(move |(a, b, c, e)| Mat2::ints(a, b, c, e, d))
}

/// Moduli of a periodic decomposition, sorted.
fn moduli(s: &TranslationSurface, v: &Vec2) -> Option<Vec<QuadElem>> {
    let dec = decompose(s, v, DEFAULT_STEP_CAP).unwrap();
    let mut m: Vec<QuadElem> = dec.cylinders()?.iter().map(cylinder_modulus).collect();
    m.sort_by(|a, b| a.cmp_value(b));
    Some(m)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn quad_json_round_trip_is_exact(d in field(), x in (-1_000_000i64..1_000_000, 1i64..1_000_000)) {
        let q = QuadElem::from_parts(x.0, x.1, x.1, x.0.abs().max(1), d);
        let text = serde_json::to_string(&q).unwrap();
        let back: QuadElem = serde_json::from_str(&text).unwrap();
        prop_assert_eq!(&back, &q);
        prop_assert_eq!(serde_json::to_string(&back).unwrap(), text);
        prop_assert_eq!(parse_quad(&q.to_string(), Some(d)).unwrap(), q);
    }

    #[test]
    fn rational_iff_fixed_by_conjugation(x in field().prop_flat_map(quad)) {
        prop_assert_eq!(x.is_rational(), x == x.conjugate());
    }

    #[test]
    fn apply_linear_round_trips(m in nonsingular(2), k in 0usize..3) {
        let s = &surfaces()[k];
        let image = s.apply_linear(&m).unwrap();
        prop_assert_eq!(image.stratum(), s.stratum());
        prop_assert_eq!(&image.area(), &(&s.area() * &m.det().abs()));
        let back = image.apply_linear(&m.inverse().unwrap()).unwrap();
        prop_assert_eq!(&back, s);
    }

    #[test]
    fn triangulating_and_translating_keep_the_stratum(k in 0usize..3, x in -5i64..5, y in -5i64..5) {
        let s = &surfaces()[k];
        prop_assert_eq!(s.triangulated().unwrap().stratum().orders, s.stratum().orders);
        let moved = s.translate_polygon(0, &Vec2::ints(x, y, 2));
        prop_assert_eq!(moved.stratum(), s.stratum());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn decompositions_commute_with_similarities(
        k in 1usize..3,
        (a, b) in (-3i64..=3, -3i64..=3).prop_filter("nonzero", |&(a, b)| (a, b) != (0, 0)),
        (x, y) in (-3i64..=3, 0i64..=3).prop_filter("nonzero", |&(x, y)| (x, y) != (0, 0)),
    ) {
        let s = &surfaces()[k];
        let d = s.field();
        let m = Mat2::ints(a, b, -b, a, d);
        let v = Vec2::ints(x, y, d);
        let here = moduli(s, &v);
        let there = moduli(&s.apply_linear(&m).unwrap(), &m.apply(&v));
        prop_assert_eq!(here, there);
    }

    #[test]
    fn crossing_counts_ignore_diagonal_rescaling(p in 1i64..6, q in 1i64..6, r in 1i64..6, t in 1i64..6) {
        let cat = Catalog::builtin();
        let row = &table1_rows()[0];
        let c = cat.models[5]
            .build(&CandidateSpec {
                model: ModelRef::Number(6),
                d: 2,
                w2: row.w2.clone(),
                h2: row.h2.clone(),
                t1: QuadElem::frac(1, 2, 2),
                t2: QuadElem::frac(1, 2, 2),
                s: QuadElem::frac(1, 2, 2),
                matrix: None,
            }.params())
            .unwrap();
        let inv = c.involution.as_deref();
        let counts = |s: &TranslationSurface| {
            let h = decompose(s, &Vec2::ints(1, 0, 2), DEFAULT_STEP_CAP).unwrap();
            let v = decompose(s, &Vec2::ints(0, 1, 2), DEFAULT_STEP_CAP).unwrap();
            intersection_matrix(&h, &v, inv).unwrap()
        };
        let m = Mat2::diagonal(&QuadElem::frac(p, q, 2), &QuadElem::frac(r, t, 2));
        prop_assert_eq!(counts(&c.surface.apply_linear(&m).unwrap()), counts(&c.surface));
    }

    #[test]
    fn manifests_round_trip(
        entries in prop::collection::vec((0usize..5, 1u32..=8, 0i64..4, 0i64..4, 1i64..20), 0..6)
    ) {
        let rows = table1_rows();
        let specs: Vec<CandidateSpec> = entries
            .into_iter()
            .map(|(r, m, t1, t2, s)| {
                let row = &rows[r];
                CandidateSpec {
                    model: ModelRef::Number(m),
                    d: row.d,
                    w2: row.w2.clone(),
                    h2: row.h2.clone(),
                    t1: QuadElem::frac(t1, 4, row.d),
                    t2: QuadElem::frac(t2, 4, row.d),
                    s: QuadElem::frac(s, 20, row.d),
                    matrix: (s % 2 == 0).then_some(row.matrix),
                }
            })
            .collect();
        let text = manifest_to_json(&specs);
        let back = load_manifest(text.as_bytes()).unwrap();
        prop_assert_eq!(&back, &specs);
        prop_assert_eq!(manifest_to_json(&back), text);
    }
}

#[test]
fn saddle_connections_are_symmetric_and_distinct() {
    for s in surfaces() {
        let scs = saddle_connections(&s, &QuadElem::int(5, s.field())).unwrap();
        let keys: Vec<_> = scs
            .iter()
            .map(|sc| (sc.start, sc.holonomy.x.to_parts(), sc.holonomy.y.to_parts()))
            .collect();
        let mut sorted = keys.clone();
        sorted.sort();
        sorted.dedup();
        assert_eq!(sorted.len(), keys.len());
        for sc in &scs {
            let neg = sc.holonomy.neg();
            assert!(scs
                .iter()
                .any(|o| o.holonomy == neg && o.start_class == sc.end_class));
        }
    }
}

#[test]
fn saddle_directions_never_crash_on_candidates() {
    let cat = Catalog::builtin();
    for (m, diagram) in cat.models.iter().enumerate().step_by(3) {
        for row in table1_rows() {
            let Some((lo, hi)) = slit_interval(diagram, &row.w2) else {
                continue;
            };
            let mut p = CandidateSpec {
                model: ModelRef::Number(m as u32 + 1),
                d: row.d,
                w2: row.w2.clone(),
                h2: row.h2.clone(),
                t1: QuadElem::frac(1, 3, row.d),
                t2: QuadElem::frac(1, 5, row.d),
                s: QuadElem::zero(row.d),
                matrix: None,
            }
            .params();
            p.s = (&lo + &hi).scale(&prym_core::qfield::rat(1, 2));
            let s = diagram.build(&p).unwrap().surface;
            for sc in saddle_connections(&s, &QuadElem::int(2, row.d)).unwrap() {
                let dec = decompose(&s, &sc.holonomy, 2_000).unwrap();
                if let Some(p) = dec.periodic() {
                    assert!(p.area_check.holds());
                }
            }
        }
    }
}

/// Candidates with h2 raised by one: eliminated in the horizontal direction.
fn eliminated_surfaces() -> Vec<TranslationSurface> {
    let cat = Catalog::builtin();
    let mut out = Vec::new();
    for (m, row) in [(5usize, 0usize), (1, 3), (3, 4)] {
        let row = &table1_rows()[row];
        let diagram = &cat.models[m];
        let (lo, hi) = slit_interval(diagram, &row.w2).unwrap();
        let spec = CandidateSpec {
            model: ModelRef::Number(m as u32 + 1),
            d: row.d,
            w2: row.w2.clone(),
            h2: &row.h2 + &QuadElem::one(row.d),
            t1: QuadElem::frac(1, 3, row.d),
            t2: QuadElem::frac(2, 3, row.d),
            s: (&lo + &hi).scale(&prym_core::qfield::rat(1, 2)),
            matrix: None,
        };
        out.push(diagram.build(&spec.params()).unwrap().surface);
    }
    out
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn verdicts_survive_uniform_rescaling(k in 0usize..3, p in 1i64..9, q in 1i64..9) {
        let s = &eliminated_surfaces()[k];
        let d = s.field();
        let config = AuditConfig { length_bound: QuadElem::int(4, d), ..AuditConfig::with_field(d) };
        let c = QuadElem::frac(p, q, d);
        let scaled = s.apply_linear(&Mat2::diagonal(&c, &c)).unwrap();
        // lengths scale by c, so the bound does too
        let scaled_config = AuditConfig { length_bound: &config.length_bound * &c, ..config.clone() };
        let a = audit_candidate(s, &config).unwrap();
        let b = audit_candidate(&scaled, &scaled_config).unwrap();
        prop_assert_eq!(a.verdict, b.verdict);
        if let (Some(x), Some(y)) = (&a.certificate, &b.certificate) {
            prop_assert_eq!(
                projective_direction(&x.direction).unwrap(),
                projective_direction(&y.direction).unwrap()
            );
            prop_assert_eq!(&x.ratio, &y.ratio);
            prop_assert!(verify_certificate(&scaled, y));
        }
    }

    #[test]
    fn larger_bounds_never_undo_an_elimination(k in 0usize..3, small in 1i64..4, extra in 0i64..4) {
        let s = &eliminated_surfaces()[k];
        let d = s.field();
        let at = |l: i64| {
            let config = AuditConfig { length_bound: QuadElem::int(l, d), ..AuditConfig::with_field(d) };
            audit_candidate(s, &config).unwrap().verdict
        };
        if at(small) == Verdict::Eliminated {
            prop_assert_eq!(at(small + extra), Verdict::Eliminated);
        }
    }
}

#[test]
fn one_cylinder_directions_have_no_witness() {
    let torus = fixtures::torus(2);
    for sc in saddle_connections(&torus, &QuadElem::int(4, 2)).unwrap() {
        let dec = decompose(&torus, &sc.holonomy, DEFAULT_STEP_CAP).unwrap();
        assert_eq!(dec.cylinders().unwrap().len(), 1);
    }
    let config = AuditConfig {
        length_bound: QuadElem::int(4, 2),
        ..AuditConfig::with_field(2)
    };
    let out = audit_candidate(&torus, &config).unwrap();
    assert_eq!(out.verdict, Verdict::NotEliminated);
    assert!(out.certificate.is_none());
    assert_eq!(out.stats.periodic, out.stats.parabolic);
}
