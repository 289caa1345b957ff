use std::collections::BTreeMap;

use cmbrauer::brauer::{
    classify_family, geometric_structure, m_attainable, transcendental_structure,
};
use cmbrauer::grossenchar::{estimate_m, sample_psi, witness_prime};
use cmbrauer::quadint::suborder_level;
use cmbrauer::{BrauerStructure, CurveContext, Family, Provenance};
use proptest::prelude::*;

fn s(f: &[(u64, u32)]) -> BrauerStructure {
    BrauerStructure::from_factors(f.iter().copied())
}

#[test]
fn quadratic_twist_examples() {
    let c = classify_family(&Family::j0(2).unwrap());
    assert_eq!(c.transcendental, s(&[(3, 1)]));
    assert_eq!(c.odd_c, Some(1));

    let c = classify_family(&Family::j1728(4).unwrap());
    assert_eq!(c.transcendental, s(&[(2, 1), (2, 1)]));
    assert_eq!(c.geometric, s(&[(2, 1), (2, 2)]));

    let c = classify_family(&Family::j1728(2).unwrap());
    assert!(c.transcendental.is_trivial());
    assert_eq!(c.geometric, s(&[(2, 1), (2, 1)]));

    // y^2 = x^3 + 1 is a cube twist: m(2) = 1
    let c = classify_family(&Family::j0(1).unwrap());
    assert_eq!(c.transcendental, s(&[(2, 1)]));
}

#[test]
fn minus_eleven_outside_base() {
    let ctx = CurveContext::new(
        -11,
        false,
        BTreeMap::from([(11, 0)]),
        false,
        Provenance::UserSupplied,
    )
    .unwrap();
    assert_eq!(geometric_structure(&ctx, 11).unwrap(), s(&[(11, 1)]));
    assert!(transcendental_structure(&ctx, 11).unwrap().is_trivial());
}

#[test]
fn impossible_m_rejected() {
    let r = CurveContext::new(
        -7,
        false,
        BTreeMap::from([(2, 0)]),
        false,
        Provenance::UserSupplied,
    );
    assert!(r.is_err());
}

// Closed-form m agrees with the sampled Grössencharacter values.
#[test]
fn closed_form_m_matches_samples() {
    for d in [1i64, 2, 3, 4, 8, 16, 27, 54, -2, -4] {
        for family in [Family::j0(d).unwrap(), Family::j1728(d).unwrap()] {
            let ctx = CurveContext::for_family(&family);
            for ell in [2u64, 3, 5] {
                let est = estimate_m(&family, ell, 3000, 4).unwrap();
                assert_eq!(
                    est.max_consistent_k,
                    ctx.m_of(ell).unwrap(),
                    "{family:?} ell={ell}"
                );
            }
        }
    }
}

#[test]
fn cube_twists_stay_in_o2() {
    for d in [1i64, 8, 27] {
        let samples = sample_psi(&Family::j0(d).unwrap(), &[2], 2000, 3);
        assert!(samples.iter().all(|x| x.max_k_membership[&2] >= 1));
    }
    let w = witness_prime(&Family::j0(2).unwrap(), 2, None, 100)
        .unwrap()
        .unwrap();
    assert_eq!(suborder_level(&w.psi_value, 2, 1), 0);
}

const DISCS: [i64; 8] = [-3, -4, -7, -8, -11, -15, -20, -24];

fn exponent(b: &BrauerStructure) -> u32 {
    b.factors().iter().map(|&(_, e)| e).max().unwrap_or(0)
}

proptest! {
    // The transcendental quotient injects into the geometric invariants.
    #[test]
    fn transcendental_embeds_in_geometric(
        di in 0usize..DISCS.len(),
        ell in prop::sample::select(vec![2u64, 3, 5, 7, 11]),
        m in 0u32..4,
        cm_in_base in any::<bool>(),
        full in any::<bool>(),
    ) {
        let disc = DISCS[di];
        prop_assume!(m_attainable(disc, ell, m));
        let ctx = CurveContext::new(disc, cm_in_base, BTreeMap::from([(ell, m)]), full, Provenance::UserSupplied).unwrap();
        let t = transcendental_structure(&ctx, ell).unwrap();
        let g = geometric_structure(&ctx, ell).unwrap();
        prop_assert_eq!(g.order() % t.order(), 0);
        prop_assert!(exponent(&t) <= exponent(&g));
        prop_assert!(t.factors().iter().chain(g.factors()).all(|&(l, _)| l == ell));
        if cm_in_base {
            prop_assert_eq!(t, s(&[(ell, m), (ell, m)]));
        }
    }

    #[test]
    fn truncation_is_monotone(e1 in 0u32..6, e2 in 0u32..6, k in 0u32..6) {
        let b = s(&[(3, e1), (3, e2)]);
        let t = b.truncate(k);
        prop_assert_eq!(b.order() % t.order(), 0);
        prop_assert!(exponent(&t) <= k);
        prop_assert_eq!(t.truncate(k), t.clone());
        prop_assert_eq!(b.truncate(6), b);
    }
}
