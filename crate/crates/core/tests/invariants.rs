use proptest::prelude::*;

use polyhahn::domains::{check_admissible, count_h, count_v, count_v_formula, enumerate_v, verify_shuffle, weight, DomainSpec};
use polyhahn::exact::{rat, Rational};
use polyhahn::operators::{export_triplets, import_triplets, kohno_drinfeld_realized, verify_self_adjoint, LatticeOperators, Realized};
use polyhahn::spectra::{gram_basis, verify_spectra_with, Basis};

fn admissible(d_range: std::ops::RangeInclusive<usize>, n_max: u32) -> impl Strategy<Value = DomainSpec> {
    (d_range, 1..=n_max)
        .prop_flat_map(|(d, n)| (Just(d), Just(n), proptest::collection::vec(1..=n, d + 1)))
        .prop_filter_map("inadmissible", |(d, n, ell)| check_admissible(d, n, &ell).ok())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn index_and_lattice_counts_agree(s in admissible(1..=5, 9)) {
        let v = count_v(&s);
        prop_assert_eq!(count_h(&s), v);
        prop_assert_eq!(count_v_formula(&s), v.into());
        prop_assert_eq!(enumerate_v(&s).len() as u64, v);
    }

    #[test]
    fn counts_invariant_under_relabeling(s in admissible(2..=4, 8), seed in any::<u64>()) {
        let d1 = s.d() + 1;
        let mut perm: Vec<usize> = (0..d1).collect();
        let mut state = seed;
        for i in (1..d1).rev() {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            perm.swap(i, (state >> 33) as usize % (i + 1));
        }
        prop_assert_eq!(count_v(&s.permuted(&perm)), count_v(&s));
    }

    #[test]
    fn weights_form_a_probability(s in admissible(1..=4, 8)) {
        let dom = enumerate_v(&s);
        let mut total = rat(0);
        for x in dom.points() {
            let w: Rational = weight(&s, x).unwrap();
            prop_assert!(w > rat(0));
            total += w;
        }
        prop_assert_eq!(total, rat(1));
    }

    #[test]
    fn shuffle_in_the_plane(s in admissible(2..=2, 15)) {
        prop_assert!(verify_shuffle(&s).unwrap().holds());
    }

    #[test]
    fn triplets_round_trip(s in admissible(2..=3, 5), i in 1usize..=3, j in 2usize..=4) {
        let ops = LatticeOperators::hahn(&s).unwrap();
        let d1 = s.d() + 1;
        prop_assume!(i < j && j <= d1);
        let m = ops.l(i, j).unwrap();
        let text = export_triplets(m, &serde_json::json!({"i": i, "j": j}));
        let (header, back) = import_triplets(&text, ops.domain().len()).unwrap();
        prop_assert_eq!(header["i"].as_u64(), Some(i as u64));
        prop_assert!(back == *m);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn gram_diagonal_in_every_basis(s in admissible(2..=3, 5)) {
        for basis in [Basis::Standard, Basis::Forward, Basis::Backward] {
            let g = gram_basis(&s, basis).unwrap();
            prop_assert!(g.is_diagonal());
            prop_assert!(g.matches_norms().unwrap());
        }
    }

    #[test]
    fn operators_symmetric_and_commuting(s in admissible(2..=3, 5)) {
        let ops = LatticeOperators::hahn(&s).unwrap();
        prop_assert!(verify_self_adjoint(&ops).unwrap().holds());
        prop_assert!(verify_spectra_with(&ops, Basis::Standard).unwrap().exact);
        prop_assert!(kohno_drinfeld_realized(&Realized::Lattice(ops)).unwrap().holds());
    }
}
