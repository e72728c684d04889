use proptest::prelude::*;

use rigidpq::cover::{
    bicanonical_degree_closed_form, canonical_degree_closed_form, BranchPoint, EigensheafDegree, Power,
};
use rigidpq::product::{catalog, kunneth_h1_theta, product_of, product_summary, ManifoldSummary};
use rigidpq::quotient::{invariants, ProductQuotientInput};
use rigidpq::rigidity::{
    check_canonical_nonvanishing, check_parity, check_separation, local_exponents, obstruction_matrix,
    search_space, slot_parity, surjectivity_rank, CharacterSextuple,
};
use rigidpq::{Character, GroupModulus, TriangleCoverData};

fn admissible(max: u32) -> impl Strategy<Value = u32> {
    (4..=max).prop_filter_map("even, 3 ∤ n", |n| (n % 2 == 0 && n % 3 != 0).then_some(n))
}

fn cover(n: u32) -> TriangleCoverData {
    TriangleCoverData::standard(GroupModulus::new(n).unwrap())
}

proptest! {
    #[test]
    fn general_and_closed_forms_agree(n in 4u32..40, a in 0u32..40, b in 0u32..40) {
        let m = GroupModulus::new(n).unwrap();
        let c = cover(n);
        let chi = m.character(a.into(), b.into());
        prop_assert_eq!(c.canonical_eigendegree(chi), canonical_degree_closed_form(m, chi));
        prop_assert_eq!(c.bicanonical_eigendegree(chi).unwrap(), bicanonical_degree_closed_form(m, chi).unwrap());
    }

    #[test]
    fn building_bundle_duality(n in 2u32..40, a in 0u32..40, b in 0u32..40) {
        let m = GroupModulus::new(n).unwrap();
        let c = cover(n);
        let chi = m.character(a.into(), b.into());
        let gamma = m.residue(-i64::from(chi.alpha) - i64::from(chi.beta));
        let zeros = [chi.alpha, chi.beta, gamma].iter().filter(|&&x| x == 0).count() as i64;
        let sum = c.building_bundle_degree(chi).0 + c.building_bundle_degree(m.char_neg(chi)).0;
        prop_assert_eq!(sum, 3 - zeros);
    }

    #[test]
    fn eigenform_divisor_degree(n in 3u32..40, a in 1u32..40, b in 1u32..40) {
        let c = cover(n);
        if a + b < n {
            let (c0, cinf, c1) = c.eigenform_divisor(Character { alpha: a, beta: b }).unwrap();
            // each R_{H_p} has |G|/n points
            prop_assert_eq!(u64::from(n) * u64::from(c0 + cinf + c1), 2 * c.genus() - 2);
        }
    }

    #[test]
    fn noether_and_closed_forms(n in admissible(200)) {
        let inv = invariants(&ProductQuotientInput::standard(n).unwrap()).unwrap();
        let n = i64::from(n);
        prop_assert_eq!(12 * inv.chi_o, inv.k2 + inv.euler);
        prop_assert_eq!(inv.k2, 2 * (n - 3) * (n - 3));
        prop_assert_eq!(4 * inv.chi_o, n * n - 6 * n + 12);
        prop_assert_eq!(inv.p_g, inv.chi_o - 1);
        prop_assert_eq!(inv.node_total, 6);
        prop_assert_eq!(inv.h1_theta, inv.node_total);
    }

    #[test]
    fn kernel_exponents_complement(n in 1u32..60, a in 0i64..120, b in 0i64..120) {
        let m = GroupModulus::new(2 * n).unwrap();
        let e = local_exponents(m.character(a, b), m).unwrap();
        for p in 0..3 {
            prop_assert_eq!(e.lambda[p] + e.mu[p], 1);
        }
    }

    #[test]
    fn parity_is_kernel_pattern(n in admissible(60), chars in proptest::array::uniform6((0i64..60, 0i64..60))) {
        let m = GroupModulus::new(n).unwrap();
        let c: Vec<Character> = chars.iter().map(|&(a, b)| m.character(a, b)).collect();
        let s = CharacterSextuple::new((c[0], c[1]), (c[2], c[3]), (c[4], c[5]));
        let pattern = BranchPoint::ALL.iter().all(|&p| {
            let (x, y) = s.pair(p);
            [x, y].iter().all(|&chi| {
                let l = local_exponents(chi, m).unwrap().lambda;
                BranchPoint::ALL.iter().all(|&q| l[q.index()] == u8::from(q == p))
            })
        });
        prop_assert_eq!(check_parity(&s, m).unwrap().ok, pattern);
    }

    #[test]
    fn rank_six_iff_separated(n in admissible(40), picks in proptest::array::uniform6(any::<proptest::sample::Index>())) {
        prop_assume!(n >= 8);
        let m = GroupModulus::new(n).unwrap();
        let c = cover(n);
        // candidates per slot: right parity and nonzero canonical eigenspace
        let slots: Vec<Vec<Character>> = BranchPoint::ALL.iter().map(|&p| {
            let (pa, pb) = slot_parity(p);
            (1..n).flat_map(|a| (1..n).map(move |b| Character { alpha: a, beta: b }))
                .filter(|ch| ch.alpha + ch.beta < n && (ch.alpha % 2, ch.beta % 2) == (pa, pb))
                .collect()
        }).collect();
        let pick = |slot: usize, i: usize| *picks[i].get(&slots[slot]);
        let s = CharacterSextuple::new((pick(0, 0), pick(0, 1)), (pick(1, 2), pick(1, 3)), (pick(2, 4), pick(2, 5)));
        prop_assert!(check_canonical_nonvanishing(&s, &c));
        let rank = surjectivity_rank(&obstruction_matrix(&s, &c).unwrap(), m);
        prop_assert_eq!(rank == 6, check_separation(&s, m).ok);
    }

    #[test]
    fn kunneth_symmetric_and_associative(spec in proptest::collection::vec(prop_oneof![Just("S8"), Just("S10"), Just("P1"), Just("S14")], 3)) {
        let f: Vec<ManifoldSummary> = spec.iter().map(|s| ManifoldSummary::parse(s).unwrap()).collect();
        prop_assert_eq!(kunneth_h1_theta(&f[0], &f[1]), kunneth_h1_theta(&f[1], &f[0]));
        let left = product_summary(&product_summary(&f[0], &f[1]).unwrap(), &f[2]).unwrap();
        let right = product_summary(&f[0], &product_summary(&f[1], &f[2]).unwrap()).unwrap();
        prop_assert_eq!((left.dim, left.kodaira, left.h0_theta, left.h1_theta, left.h1_o, left.rigid, left.inf_rigid),
                        (right.dim, right.kodaira, right.h0_theta, right.h1_theta, right.h1_o, right.rigid, right.inf_rigid));
        if spec.iter().any(|s| s.starts_with('S')) {
            prop_assert!(left.rigid && !left.inf_rigid);
        }
    }
}

#[test]
fn section_sums() {
    for n in 4u32..40 {
        let c = cover(n);
        let g = c.genus();
        assert_eq!(c.eigendegree_table(Power::Canonical).unwrap().total_sections(), g);
        if g >= 2 {
            assert_eq!(c.eigendegree_table(Power::Bicanonical).unwrap().total_sections(), 3 * g - 3, "n={n}");
        }
        let triangle = (n - 1) * (n - 2) / 2;
        assert_eq!(u64::from(triangle), g);
    }
    assert_eq!(EigensheafDegree(-5).h0(), 0);
}

#[test]
fn reference_pairs_lie_in_search_space() {
    let reference = rigidpq::rigidity::reference_sextuple();
    for n in (8u32..=64).filter(|n| n % 2 == 0 && n % 3 != 0) {
        let space = search_space(n).unwrap();
        for p in BranchPoint::ALL {
            assert!(space[p.index()].contains(&reference.pair(p)), "n={n}, slot {p}");
        }
    }
}

#[test]
fn catalog_witnesses_reverify() {
    for e in catalog(10, 8).unwrap() {
        if let rigidpq::product::Witness::BuiltIn(w) = &e.witness {
            let s = product_of(w).unwrap();
            assert_eq!((s.dim, s.kodaira), (e.d, e.kodaira));
            assert!(s.rigid && !s.inf_rigid);
        }
    }
}
