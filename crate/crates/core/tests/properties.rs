use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::Zero;
use proptest::prelude::*;

use twomm::cli::lr_brute_force;
use twomm::engines::*;
use twomm::fermion::*;
use twomm::measures::*;
use twomm::partitions::{enumerate, partitions_of, Partition};
use twomm::poly::Var;
use twomm::scalar::{q, Ring};
use twomm::schur::*;

fn partition(max_part: usize, max_len: usize) -> impl Strategy<Value = Partition> {
    prop::collection::vec(1..=max_part, 0..=max_len).prop_map(|mut v| {
        v.sort_unstable_by(|a, b| b.cmp(a));
        Partition::new(v)
    })
}

fn rational() -> impl Strategy<Value = BigRational> {
    (-9i64..=9, 1i64..=7).prop_map(|(a, b)| q(a, b))
}

fn complex() -> impl Strategy<Value = Complex64> {
    (-1.0f64..1.0, -1.0f64..1.0).prop_map(|(a, b)| Complex64::new(a, b))
}

fn maya() -> impl Strategy<Value = MayaState> {
    (-3i64..=3, partition(4, 4)).prop_map(|(c, p)| MayaState::new(c, p))
}

fn window(rows: usize, cols: usize) -> impl Strategy<Value = Vec<Vec<Complex64>>> {
    prop::collection::vec(prop::collection::vec(complex(), cols), rows)
}

fn make_window(values: Vec<Vec<Complex64>>, i_lo: i64, k_lo: i64) -> BimomentWindow {
    let rect = Rect::new(
        i_lo,
        i_lo + values.len() as i64 - 1,
        k_lo,
        k_lo + values[0].len() as i64 - 1,
    );
    BimomentWindow {
        rect,
        values,
        measure: MeasureSpec::circle(RSequence::Exponential { scale: 1.0 }),
        deformation: DeformationParams::none(),
        provenance: Provenance::Analytic,
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn conjugate_is_an_involution(p in partition(6, 6)) {
        let c = p.conjugate();
        prop_assert_eq!(c.weight(), p.weight());
        prop_assert_eq!(c.len(), p.part(0));
        prop_assert_eq!(c.conjugate(), p);
    }

    #[test]
    fn shifted_labels_round_trip(p in partition(5, 4), extra in 0usize..3) {
        let n = p.len() + extra;
        let h = p.shifted_labels(n).unwrap();
        prop_assert!(h.windows(2).all(|w| w[0] > w[1]));
        prop_assert_eq!(Partition::from_shifted_labels(&h).unwrap(), p);
    }

    #[test]
    fn tilde_fits_the_box(p in partition(4, 3), extra in 0usize..2) {
        let n = (p.len() + extra).max(1);
        let t = p.tilde(n).unwrap();
        prop_assert!(t.len() < n);
        prop_assert_eq!(t.weight() + p.weight(), n * p.part(0));
    }

    #[test]
    fn transpose_sign_identity(p in partition(4, 4)) {
        let t = formal_times(Var::T1, p.weight().max(1));
        prop_assert!(transpose_sign_check(&p, &t));
    }

    #[test]
    fn cauchy_identity_on_rational_times(t in prop::collection::vec(rational(), 1..4), u in prop::collection::vec(rational(), 1..4)) {
        let (a, b) = cauchy_truncated(&TimeSequence::new(t), &TimeSequence::new(u), 4);
        prop_assert_eq!(a, b);
    }

    #[test]
    fn bialternant_matches_jacobi_trudy(p in partition(3, 3), xs in prop::collection::btree_set(-6i64..=6, 3)) {
        let x: Vec<BigRational> = xs.into_iter().map(|v| q(v, 3)).collect();
        let t = power_sum_times(&x, p.weight().max(1), false).unwrap();
        prop_assert_eq!(schur_bialternant(&p, &x).unwrap(), schur_in_times(&p, &t));
    }

    #[test]
    fn lr_rule_matches_brute_force(l in partition(3, 3), m in partition(3, 2)) {
        prop_assert_eq!((*lr_expand(&l, &m)).clone(), lr_brute_force(&l, &m));
    }

    #[test]
    fn fermions_anticommute(s in maya(), j in -6i64..=6, k in -6i64..=6) {
        let v: FockVector<BigRational> = FockVector::basis(s);
        let anti = apply_f(j, &apply_fbar(k, &v)).plus(&apply_fbar(k, &apply_f(j, &v)));
        let expected = if j == k { v.clone() } else { FockVector::zero() };
        prop_assert_eq!(anti, expected);
        let ff = apply_f(j, &apply_f(k, &v)).plus(&apply_f(k, &apply_f(j, &v)));
        prop_assert!(ff.is_zero());
    }

    #[test]
    fn heisenberg_relations(s in maya(), a in 1i64..=3, b in -3i64..=3) {
        prop_assume!(b != 0);
        let v: FockVector<BigRational> = FockVector::basis(s);
        let ab = apply_h(a, &apply_h(b, &v));
        let ba = apply_h(b, &apply_h(a, &v));
        let comm = ab.plus(&ba.scale(&q(-1, 1)));
        let expected = if a + b == 0 { v.scale(&q(a, 1)) } else { FockVector::zero() };
        prop_assert_eq!(comm, expected);
    }

    #[test]
    fn permutation_equals_determinant(size in 1usize..=4, vals in window(4, 4)) {
        let w = make_window(vals, 0, 0);
        let p = permutation_z(&w, size as i64, 0, 0).unwrap();
        let a = andreief_z(&w, size as i64, 0, 0).unwrap();
        prop_assert!(relative_difference(p.value, a.value) < 1e-10, "{} vs {}", p.value, a.value);
    }

    #[test]
    fn row_swaps_flip_coefficient_determinants(l in partition(3, 3), m in partition(3, 3), vals in window(12, 12)) {
        let w = make_window(vals, -6, -6);
        for v in Variant::ALL {
            let (rows, cols, _) = coefficient_indices(v, &l, &m, 3, 0, 0).unwrap();
            let mat = |r: &[i64]| -> Vec<Vec<Complex64>> {
                r.iter().map(|&i| cols.iter().map(|&k| w.get(i, k).unwrap()).collect()).collect()
            };
            let mut swapped = rows.clone();
            swapped.swap(0, 2);
            let a = Complex64::det(&mat(&rows));
            let b = Complex64::det(&mat(&swapped));
            prop_assert!((a + b).norm() <= 1e-12 * a.norm().max(1.0));
        }
    }

    #[test]
    fn index_shift_is_a_window_shift(size in 1i64..=3, vals in window(5, 5)) {
        let w = make_window(vals.clone(), 0, 0);
        let shifted = make_window(vals[1..].to_vec(), 0, 0);
        let a = andreief_z(&w, size, 1, 0).unwrap();
        let b = andreief_z(&shifted, size, 0, 0).unwrap();
        prop_assert_eq!(a.value, b.value);
    }

    #[test]
    fn windows_round_trip_bit_for_bit(vals in window(3, 4), lo in -2i64..2) {
        let w = make_window(vals, lo, lo);
        let back: BimomentWindow = serde_json::from_str(&w.to_json_string()).unwrap();
        prop_assert_eq!(back, w);
    }

    #[test]
    fn zresults_round_trip_bit_for_bit(z in complex(), e in 0.0f64..1.0) {
        let mut r = andreief_z(&make_window(vec![vec![z]], 0, 0), 1, 0, 0).unwrap();
        r.error_estimate = Some(e);
        let back: ZResult = serde_json::from_str(&serde_json::to_string(&r).unwrap()).unwrap();
        prop_assert_eq!(back, r);
    }
}

#[test]
fn enumerate_counts_agree() {
    for d in 0..=8 {
        for l in 0..=4 {
            let total: usize = (0..=d).map(|w| partitions_of(w, l).len()).sum();
            assert_eq!(enumerate(d, l).count(), total);
        }
    }
}

#[test]
fn zero_times_keep_only_the_empty_term() {
    let spec = MeasureSpec::circle(RSequence::Exponential { scale: 0.6 });
    let quad = QuadratureSpec::default();
    let d = DeformationParams::none();
    for size in 1..=3 {
        let w = bimoment_window(&spec, Rect::square(0, size - 1), &d, &quad).unwrap();
        let base = coefficient_det(
            Variant::PlusPlus,
            &Partition::empty(),
            &Partition::empty(),
            size as usize,
            0,
            0,
            &|i, k| w.get(i, k),
        )
        .unwrap();
        let nf = (1..=size).product::<i64>() as f64;
        let (z, table) = double_series_z(
            Variant::PlusPlus,
            &spec,
            &d,
            size,
            &SeriesOptions {
                truncation: 6,
                tol: None,
            },
            &quad,
        )
        .unwrap();
        assert_eq!(table.series.len(), 1);
        assert_eq!(z.value, base * nf);
        assert!(!base.is_zero());
    }
}
