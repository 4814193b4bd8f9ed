//! Worked examples with hand-checked values. Where a value is derived rather
//! than quoted, a small independent computation in this file reproduces it.

use tameshape_core::char_arith::{collapse, factor_through_norm, lambda_membership, CharExp, ExponentTuple};
use tameshape_core::field::FiniteField;
use tameshape_core::hodge::{find_type_profile, hodge_equiv, hodge_type_of, HodgeType, TransitionConstraint};
use tameshape_core::matrix::VMat;
use tameshape_core::operators::{apply_operator, irregular_ratio_never_cyclotomic, predicted_inclusions, WeightOperator};
use tameshape_core::phi::descend::dual_module;
use tameshape_core::phi::extension::{extension_exponents, kext_dimension};
use tameshape_core::phi::{classify_shape, strong_det_check, BKModule, Shape};
use tameshape_core::series::VSeries;
use tameshape_core::shapeshift::{bits_of, interval_decomposition, shapeshift_targets};
use tameshape_core::tame::{
    enumerate_profiles, jordan_holder_set, make_type, profile_data, serre_weight, Profile, TameType, TypeKind,
};
use tameshape_core::Error;

const PS: TypeKind = TypeKind::PrincipalSeries;
const CUSP: TypeKind = TypeKind::Cuspidal;

fn ps_type(p: u32, gamma: &[i64]) -> TameType {
    TameType::from_gamma(p, PS, gamma, 0).unwrap()
}

fn profile(tau: &TameType, members: &[usize]) -> Profile {
    Profile::for_type(tau, members).unwrap()
}

/// `s_{J,i}, t_{J,i}` straight from the case split on `i-1 in J`.
fn recipe_oracle(p: i64, gamma: &[i64], inside: impl Fn(i64) -> bool) -> (Vec<i64>, Vec<i64>) {
    let n = gamma.len() as i64;
    (0..n)
        .map(|i| {
            let g = gamma[i as usize];
            let prev = inside((i - 1).rem_euclid(n));
            let here = inside(i) as i64;
            if prev {
                (p - 1 - g - (1 - here), g + 1 - here)
            } else {
                (g - here, 0)
            }
        })
        .unzip()
}

#[test]
fn collapse_values() {
    assert_eq!(collapse(5, &[0, 4]).unwrap().residue_i64(), Some(20));
    assert_eq!(collapse(3, &[1, 1]).unwrap().residue_i64(), Some(4));
    assert!(collapse(7, &[0, 0, 0]).unwrap().is_trivial());
    // p^m - 1 normalizes to the trivial residue.
    assert!(CharExp::new(3, 2, 8).unwrap().is_trivial());
    assert!(!CharExp::new(3, 2, 1).unwrap().is_trivial());
}

#[test]
fn norm_descent_values() {
    let e = |x: i64| CharExp::new(3, 2, x).unwrap();
    assert_eq!(factor_through_norm(&e(4)).unwrap().unwrap().residue_i64(), Some(1));
    assert_eq!(factor_through_norm(&e(0)).unwrap().unwrap().residue_i64(), Some(0));
    assert!(factor_through_norm(&e(1)).unwrap().is_none());
}

#[test]
fn lambda_lattice() {
    assert!(lambda_membership(&ExponentTuple::new(3, [0, 0])).unwrap());
    assert!(lambda_membership(&ExponentTuple::new(3, [8, 0])).unwrap());
    assert!(!lambda_membership(&ExponentTuple::new(3, [1, 0])).unwrap());
}

#[test]
fn cuspidal_type_gammas_pair_up() {
    let eta = CharExp::new(5, 2, 7).unwrap();
    let tau = make_type(5, 1, CUSP, eta.clone(), eta.pow(5)).unwrap();
    assert_eq!(tau.gamma(0) + tau.gamma(1), 4);
}

#[test]
fn scalar_types_are_rejected() {
    let eta = CharExp::new(3, 2, 5).unwrap();
    assert!(matches!(make_type(3, 2, PS, eta.clone(), eta), Err(Error::ScalarType { .. })));
}

#[test]
fn gamma_roundtrip() {
    assert_eq!(ps_type(5, &[2, 3]).gammas(), &[2, 3]);
}

#[test]
fn profile_counts() {
    let tau = ps_type(3, &[1, 1]);
    let bits: Vec<u64> = enumerate_profiles(&tau).iter().map(|j| j.bits()).collect();
    assert_eq!(bits, vec![0, 1, 2, 3]);
    let c1 = TameType::from_gamma(3, CUSP, &[1], 0).unwrap();
    let bits: Vec<u64> = enumerate_profiles(&c1).iter().map(|j| j.bits()).collect();
    assert_eq!(bits, vec![0b10, 0b01]);
    let c2 = TameType::from_gamma(3, CUSP, &[1, 0], 0).unwrap();
    for j in enumerate_profiles(&c2) {
        for i in 0..2 {
            assert_ne!(j.contains(i), j.contains(i + 2));
        }
    }
}

#[test]
fn recipe_values() {
    let tau = ps_type(5, &[2, 3]);
    let d = profile_data(&tau, &profile(&tau, &[0])).unwrap();
    assert_eq!((d.s.clone(), d.t.clone()), (vec![1, 0], vec![0, 4]));
    assert_eq!(recipe_oracle(5, &[2, 3], |i| i == 0), (d.s, d.t));

    let tau = TameType::from_gamma(3, CUSP, &[1], 0).unwrap();
    let j = profile(&tau, &[0]);
    let d = profile_data(&tau, &j).unwrap();
    assert_eq!((d.s.clone(), d.t.clone()), (vec![0, 0], vec![0, 2]));
    assert_eq!(recipe_oracle(3, tau.gammas(), |i| j.contains(i)), (d.s, d.t));

    let tau = ps_type(3, &[1, 1]);
    let d = profile_data(&tau, &profile(&tau, &[0, 1])).unwrap();
    assert_eq!((d.s, d.t), (vec![1, 1], vec![1, 1]));
}

#[test]
fn recipe_matches_oracle_everywhere() {
    for (p, f) in [(3, 1), (3, 2), (5, 2), (3, 3)] {
        for kind in [PS, CUSP] {
            for tau in TameType::enumerate(p, f, kind).unwrap() {
                let full: Vec<i64> = (0..tau.f_prime() as i64).map(|i| tau.gamma(i)).collect();
                for j in enumerate_profiles(&tau) {
                    let d = profile_data(&tau, &j).unwrap();
                    assert_eq!(recipe_oracle(p as i64, &full, |i| j.contains(i)), (d.s, d.t), "{tau} J={j}");
                }
            }
        }
    }
}

#[test]
fn serre_weights_at_level_one() {
    let tau = ps_type(5, &[2]);
    let w0 = serre_weight(&tau, &profile(&tau, &[])).unwrap();
    assert_eq!((w0.t.clone(), w0.s.clone()), (vec![0], vec![2]));
    let w1 = serre_weight(&tau, &profile(&tau, &[0])).unwrap();
    assert_eq!((w1.t.clone(), w1.s.clone()), (vec![2], vec![2]));
    let jh: Vec<_> = jordan_holder_set(&tau).unwrap().into_iter().collect();
    assert_eq!(jh, vec![w0, w1]);

    let bad = ps_type(3, &[0, 1]);
    assert!(matches!(serre_weight(&bad, &profile(&bad, &[0])), Err(Error::NotInPTau { .. })));

    let c = TameType::from_gamma(3, CUSP, &[1], 0).unwrap();
    let direct: std::collections::BTreeSet<_> =
        enumerate_profiles(&c).iter().filter_map(|j| serre_weight(&c, j).ok()).collect();
    assert_eq!(jordan_holder_set(&c).unwrap(), direct);
}

#[test]
fn hodge_type_example() {
    let tau = ps_type(5, &[2, 3]);
    let j = profile(&tau, &[0]);
    let r = hodge_type_of(&tau, &j).unwrap();
    assert_eq!(r, HodgeType::new([(1, -1), (-3, -4)]));
    let d = profile_data(&tau, &j).unwrap();
    for i in 0..2 {
        assert_eq!(r.difference(i as i64), d.s[i] + 1);
    }
}

#[test]
fn hodge_equivalence_examples() {
    let r = HodgeType::new([(2, 1), (1, 0)]);
    assert!(hodge_equiv(3, &r, &r));
    assert!(hodge_equiv(3, &r, &r.translate(&[8, 0])));
    assert!(!hodge_equiv(3, &r, &r.translate(&[1, 0])));
}

#[test]
fn existence_with_forced_choices() {
    let one: HodgeType = "1,0".parse().unwrap();
    let c: TransitionConstraint = [(0, false)].into_iter().collect();
    assert!(matches!(find_type_profile(&one, 5, &c), Err(Error::ForcedTransition { index: 0 })));
    // differences (p-1, 0, p) with a transition requested at 0
    let r = HodgeType::from_differences(&[4, 0, 5]);
    let c: TransitionConstraint = [(0, true)].into_iter().collect();
    assert!(matches!(find_type_profile(&r, 5, &c), Err(Error::ForcedNonTransition { index: 0 })));

    let r = HodgeType::new([(1, -1), (-3, -4)]);
    let (tau, j) = find_type_profile(&r, 5, &TransitionConstraint::new()).unwrap();
    assert!(hodge_equiv(5, &r, &hodge_type_of(&tau, &j).unwrap()));
}

#[test]
fn operator_values() {
    let r = HodgeType::new([(3, 3), (4, 2)]);
    assert_eq!(apply_operator(WeightOperator::Nu, 0, &r, 5).unwrap(), HodgeType::new([(3, 2), (7, 4)]));
    assert_eq!(apply_operator(WeightOperator::Mu, 0, &r, 5).unwrap(), HodgeType::new([(8, 3), (3, 2)]));
    assert_eq!(apply_operator(WeightOperator::Theta, 0, &r, 5).unwrap(), HodgeType::new([(8, 3), (4, 1)]));
    let inc = predicted_inclusions(&r, 5).unwrap();
    assert_eq!(inc.len(), 3);

    let edge = HodgeType::new([(3, 3), (5, 0)]);
    let ops: Vec<_> = predicted_inclusions(&edge, 5).unwrap().iter().map(|x| x.op).collect();
    assert!(!ops.contains(&WeightOperator::Theta));
    assert!(predicted_inclusions(&HodgeType::new([(2, 0), (1, 0)]), 5).unwrap().is_empty());
}

#[test]
fn cyclotomic_lemma() {
    assert!(irregular_ratio_never_cyclotomic(3, 2).unwrap());
    assert!(irregular_ratio_never_cyclotomic(5, 1).unwrap());
}

#[test]
fn intervals() {
    let iv = interval_decomposition(bits_of(&[0, 1, 3]), 6);
    assert_eq!(iv.iter().map(|x| x.members()).collect::<Vec<_>>(), vec![vec![0, 1], vec![3]]);
    assert_eq!(iv[0].extended().members(), vec![5, 0, 1]);
    assert_eq!(iv[0].m(), Some(5));
    let full = interval_decomposition(0b111, 3);
    assert_eq!(full.len(), 1);
    assert!(full[0].is_full());
    assert_eq!(interval_decomposition(bits_of(&[2]), 4)[0].m(), Some(1));
}

#[test]
fn shapeshift_single_bad_index() {
    // A p = 3, f = 3 pair with bad set {1} and a transition at 0.
    let mut seen = false;
    for tau in TameType::enumerate(3, 3, PS).unwrap() {
        for j in enumerate_profiles(&tau) {
            let d = profile_data(&tau, &j).unwrap();
            if d.bad_set != [1] || !j.is_transition(0) {
                continue;
            }
            seen = true;
            let got: Vec<u64> = shapeshift_targets(&tau, &j).unwrap().iter().map(|t| t.bits()).collect();
            // flips inside {0, 1}, never both
            let want: Vec<u64> = [0u64, 1, 2].iter().map(|&dlt| j.bits() ^ dlt).collect();
            let mut got_sorted = got.clone();
            got_sorted.sort_unstable();
            let mut want_sorted = want;
            want_sorted.sort_unstable();
            assert_eq!(got_sorted, want_sorted, "{tau} J={j}");
        }
    }
    assert!(seen);
}

#[test]
fn empty_bad_set_keeps_profile() {
    let tau = ps_type(5, &[2, 3]);
    let j = profile(&tau, &[0]);
    assert_eq!(shapeshift_targets(&tau, &j).unwrap(), vec![j]);
}

#[test]
fn series_values() {
    let k = FiniteField::get(3, 1).unwrap();
    let one_plus_v = VSeries::from_dense(k, 0, &[k.one(), k.one()], None);
    let inv = one_plus_v.truncate(3).inv().unwrap();
    assert!(inv.agrees_with(&VSeries::from_dense(k, 0, &[k.one(), k.from_int(2), k.one()], Some(3))));
    let lhs = VSeries::from_dense(k, -1, &[k.one(), k.one()], None).mul(&VSeries::monomial(k.one(), 1));
    assert_eq!(lhs, one_plus_v);
    assert_eq!(one_plus_v.frobenius(), VSeries::from_dense(k, 0, &[k.one(), k.zero(), k.zero(), k.one()], None));
}

fn diag_module(tau: &TameType, a: i64, d: i64) -> BKModule {
    let k = FiniteField::get(tau.p(), 1).unwrap();
    let m = VMat::diag(VSeries::monomial(k.one(), a), VSeries::monomial(k.one(), d));
    BKModule::new(tau.clone(), vec![m; tau.f_prime() as usize]).unwrap()
}

#[test]
fn determinant_and_shape_examples() {
    let tau = ps_type(3, &[1]);
    let m = diag_module(&tau, 1, 0);
    assert!(strong_det_check(&m).unwrap());
    assert_eq!(classify_shape(&m).unwrap().shapes, vec![Shape::IEta]);
    assert!(!strong_det_check(&diag_module(&tau, 0, 0)).unwrap());
    assert!(!strong_det_check(&diag_module(&tau, 1, 1)).unwrap());
    assert!(matches!(classify_shape(&diag_module(&tau, 0, 0)), Err(Error::StrongDetFailed { .. })));
}

#[test]
fn dual_of_diagonal() {
    let k = FiniteField::get(3, 1).unwrap();
    let m = VMat::diag(VSeries::monomial(k.one(), 1), VSeries::one(k));
    let want = VMat::diag(VSeries::monomial(k.one(), -1), VSeries::one(k));
    assert_eq!(dual_module(std::slice::from_ref(&m)).unwrap(), vec![want]);
    assert_eq!(dual_module(&dual_module(std::slice::from_ref(&m)).unwrap()).unwrap(), vec![m]);
}

#[test]
fn extension_exponent_values() {
    let e = |x: i64| CharExp::new(3, 2, x).unwrap();
    let tau = make_type(3, 2, PS, e(5), e(1)).unwrap();
    assert_eq!((tau.k(0), tau.k(1), tau.k_prime(0), tau.k_prime(1)), (5, 7, 1, 3));
    let x = extension_exponents(&tau, &profile(&tau, &[0]));
    assert_eq!((x.r, x.s, x.delta), (vec![4, 4], vec![4, 4], vec![0, 0]));
    let x = extension_exponents(&tau, &profile(&tau, &[0, 1]));
    assert_eq!((x.r, x.s, x.delta), (vec![8, 8], vec![0, 0], vec![4, 4]));
}

#[test]
fn kext_extremes() {
    let k = FiniteField::get(3, 1).unwrap();
    let (a, b) = (k.one(), k.from_int(2));
    for kind in [PS, CUSP] {
        for tau in TameType::enumerate(3, 2, kind).unwrap() {
            for j in enumerate_profiles(&tau) {
                let bad = profile_data(&tau, &j).unwrap().bad_set.len();
                if bad == 0 || bad == 2 {
                    assert_eq!(kext_dimension(&tau, &j, a, b).unwrap(), bad, "{tau} J={j}");
                }
            }
        }
    }
}
