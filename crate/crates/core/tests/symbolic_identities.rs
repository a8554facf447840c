use std::collections::BTreeSet;

use num_traits::{One, Zero};
use unipotent_core::group::{phi_inversion_identity_check, TriangularIndex, UnipotentMatrix};
use unipotent_core::symbolic::ladder::{expected_schedule, level_closed_form};
use unipotent_core::symbolic::lemmas::{
    check_chain_bounds, check_d_inverse_lemma, check_delta_relations, check_generator_convention,
    check_inverse_formulas, nested_bracket_sign, translated_w_lemma, verify_ar_ln_delta, verify_ar_w_lemma,
};
use unipotent_core::symbolic::{
    inverse_coordinate_recursive, ladder, ladder_with_order, symbolic_matrix, LadderOrder, Polynomial,
};

#[test]
fn symbolic_inverse_is_two_sided_up_to_six() {
    for size in 2..=6 {
        let x = symbolic_matrix(size);
        let inv = x.invert();
        assert!(x.multiply(&inv).unwrap().is_identity(), "N={size}");
        assert!(inv.multiply(&x).unwrap().is_identity(), "N={size}");
        for (_, v) in x.multiply(&inv).unwrap().iter() {
            assert!(v.is_zero());
        }
    }
}

#[test]
fn phi_identity_symbolic_three() {
    let x = symbolic_matrix(3);
    let t = UnipotentMatrix::from_fn(3, |i| Polynomial::param(["t12", "t13", "t23"][i.k + i.n - 3]));
    assert!(phi_inversion_identity_check(&t, &x).unwrap());
}

#[test]
fn inverse_formulas_and_delta_relations_up_to_six() {
    for size in 2..=6 {
        for c in check_inverse_formulas(size) {
            assert!(c.holds(), "N={size} {c:?}");
        }
        for c in check_delta_relations(size) {
            assert!(c.right_inverse && c.left_inverse, "N={size} {c:?}");
        }
    }
}

#[test]
fn d_inverse_lemma_up_to_six() {
    for size in 2..=6 {
        let cases = check_d_inverse_lemma(size);
        assert_eq!(cases.len(), (size * (size - 1) / 2).pow(2));
        assert!(cases.iter().all(|c| c.holds), "N={size}");
    }
}

#[test]
fn ar_w_lemma_up_to_six() {
    for size in 4..=6 {
        let cases = verify_ar_w_lemma(size);
        let bad: Vec<_> = cases.iter().filter(|c| !c.holds).collect();
        assert!(bad.is_empty(), "N={size} {bad:?}");
    }
}

#[test]
fn ar_ln_delta_has_one_global_sign() {
    let mut signs = BTreeSet::new();
    for size in 3..=6 {
        for m in 1..size {
            signs.insert(verify_ar_ln_delta(m, size).sign);
        }
        signs.insert(nested_bracket_sign(size));
    }
    assert_eq!(signs.into_iter().collect::<Vec<_>>(), vec![Some(-1)]);
}

#[test]
fn translated_w_t_squared_coefficient() {
    for size in 3..=5 {
        let cases = translated_w_lemma(size);
        assert!(cases.iter().all(|c| c.matches_resolved), "N={size}");
        // the x_{k,m+1}^2 reading fails wherever the target-column case is nonzero
        assert!(cases.iter().any(|c| !c.matches_as_printed));
    }
}

#[test]
fn convention_checks() {
    for size in 3..=5 {
        let g = check_generator_convention(size);
        assert!(g.iter().all(|c| c.upper_index_matches));
        assert!(g.iter().any(|c| !c.as_printed_matches));
        let b = check_chain_bounds(size);
        assert!(b.iter().all(|c| c.strict_matches));
        assert!(b.iter().any(|c| !c.inclusive_matches));
    }
}

#[test]
fn ladder_three_to_six() {
    for size in 3..=6 {
        let r = ladder(size).unwrap();
        let all = r.all_coordinates();
        let set: BTreeSet<TriangularIndex> = all.iter().copied().collect();
        assert_eq!(all.len(), set.len(), "N={size}");
        assert_eq!(set, TriangularIndex::all(size).collect(), "N={size}");
        assert_eq!(r.coordinates(), expected_schedule(size, LadderOrder::Stated));
        assert_eq!(r.sign, -1);
        assert!(r.levels_match);
        for e in r.schedule.iter().chain([&r.boundary]) {
            assert_eq!(e.prefactor, format!("-2*b{}", e.weight));
        }
    }
}

#[test]
fn ladder_schedule_order_also_reduces() {
    for size in 3..=6 {
        let r = ladder_with_order(size, LadderOrder::Schedule).unwrap();
        assert_eq!(r.coordinates(), expected_schedule(size, LadderOrder::Schedule));
    }
    // the two orders differ only inside step m = 3
    let a = expected_schedule(6, LadderOrder::Stated);
    let b = expected_schedule(6, LadderOrder::Schedule);
    let diff: Vec<usize> = (0..a.len()).filter(|&i| a[i] != b[i]).collect();
    assert_eq!(diff, vec![3, 4]);
}

#[test]
fn deepest_level_isolates_row_one() {
    // step m = 4 of N = 5 bottoms out at x15 with nothing left over
    let r = ladder(5).unwrap();
    let x15 = r
        .schedule
        .iter()
        .find(|e| e.coordinate == TriangularIndex { k: 1, n: 5 })
        .unwrap();
    assert_eq!(x15.bracket, "-2*x15*b15");
    assert_eq!(
        level_closed_form(4, 3),
        &Polynomial::integer(2) * &(&Polynomial::weight(1, 5) * &Polynomial::coord(1, 5))
    );
}

#[test]
fn recursive_inverse_needs_only_its_block() {
    let p = inverse_coordinate_recursive(2, 5, 6).unwrap();
    assert!(p.coordinates().iter().all(|c| c.k >= 2 && c.n <= 5));
    assert!(!p.is_one());
}
