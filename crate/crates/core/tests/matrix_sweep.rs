use std::time::Instant;

use cmbrauer::brauer::m_attainable;
use cmbrauer::matrixcert::certify;

#[test]
fn every_small_level_certifies() {
    let start = Instant::now();
    let mut failures = Vec::new();
    for disc in [-3i64, -4, -7, -8, -11] {
        for ell in [2u64, 3, 5, 11] {
            let mut k = 0;
            while ell.pow(k) <= 27 {
                for m in 0..=2 {
                    if !m_attainable(disc, ell, m) {
                        assert!(certify(disc, ell, k, m).is_err());
                        continue;
                    }
                    let c = certify(disc, ell, k, m).unwrap();
                    if !c.holds {
                        failures.push((disc, ell, k, m, c));
                    }
                }
                k += 1;
            }
        }
    }
    for (d, l, k, m, c) in &failures {
        eprintln!(
            "disc={d} ell={l} k={k} m={m}: plus={} fixed={:?} tau={} census={:?} trans={:?}",
            c.plus_subring.holds,
            (
                c.fixed_classes.fixed_classes,
                c.fixed_classes.closed_form_classes,
                c.fixed_classes.criterion_agrees
            ),
            c.tau_lemma.counterexamples.len(),
            c.census_failures.first().map(|f| (
                &f.kl_fixed,
                &f.expected_kl,
                &f.l_fixed,
                &f.expected_l
            )),
            c.transcendental
                .iter()
                .filter(|t| !t.holds)
                .map(|t| (
                    t.tau,
                    t.full_two_torsion,
                    t.observed.clone(),
                    t.expected.clone()
                ))
                .next()
        );
    }
    eprintln!("sweep took {:?}", start.elapsed());
    assert!(failures.is_empty());
}
