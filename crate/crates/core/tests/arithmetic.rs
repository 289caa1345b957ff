use std::collections::HashSet;

use cmbrauer::arith::{legendre, pow_mod, primes_up_to};
use cmbrauer::brauer::h1_conjugation;
use cmbrauer::quadfield::{
    class_number_maximal, class_number_order, is_fundamental_discriminant, reduced_form_count,
};
use cmbrauer::quadint::{
    factor_rational_prime, power_residue_symbol, primary_associate, Factorization, ResidueMap,
};
use cmbrauer::{Basis, Family, ImQuadField, OrderInField, QuadInt, Symbol};
use proptest::prelude::*;

fn split_primes(basis: Basis, bound: u64) -> Vec<(u64, QuadInt)> {
    primes_up_to(bound)
        .into_iter()
        .filter_map(|p| match factor_rational_prime(p, basis).unwrap() {
            Factorization::Split { pi, .. } => Some((p, primary_associate(&pi).unwrap())),
            _ => None,
        })
        .collect()
}

fn degrees(basis: Basis) -> &'static [u32] {
    match basis {
        Basis::Gaussian => &[2, 4],
        Basis::Eisenstein => &[2, 3, 6],
    }
}

#[test]
fn class_numbers_agree_with_form_counts() {
    for disc in -120i64..0 {
        if !is_fundamental_discriminant(disc) {
            continue;
        }
        let field = ImQuadField::from_disc(disc).unwrap();
        assert_eq!(
            class_number_maximal(&field),
            reduced_form_count(disc),
            "disc {disc}"
        );
        for c in 1..=12u64 {
            let order = OrderInField::new(field, c).unwrap();
            assert_eq!(
                class_number_order(&order),
                reduced_form_count(order.disc()),
                "{disc} c={c}"
            );
        }
    }
}

#[test]
fn known_class_numbers() {
    for (disc, h) in [
        (-3, 1),
        (-4, 1),
        (-23, 3),
        (-47, 5),
        (-71, 7),
        (-163, 1),
        (-84, 4),
    ] {
        assert_eq!(reduced_form_count(disc), h, "disc {disc}");
    }
    // Z[3i] and Z[sqrt(-27)]
    assert_eq!(reduced_form_count(-36), 2);
    assert_eq!(reduced_form_count(-27), 1);
}

#[test]
fn symbols_match_power_residuosity() {
    for basis in [Basis::Gaussian, Basis::Eisenstein] {
        for (p, pi) in split_primes(basis, 700) {
            let map = ResidueMap::new(&pi).unwrap();
            for &d in degrees(basis) {
                let powers: HashSet<u64> = (1..p).map(|x| pow_mod(x, d as u64, p)).collect();
                for a in 0..12i64 {
                    for b in -3..3i64 {
                        let x = QuadInt::new(a, b, basis);
                        let s = power_residue_symbol(&x, &pi, d).unwrap();
                        let r = map.reduce(&x);
                        if r == 0 {
                            assert_eq!(s, Symbol::Zero);
                            continue;
                        }
                        assert_eq!(s.is_one(), powers.contains(&r), "({x}/{pi})_{d}");
                        // the root of unity is congruent to the Euler power
                        let root = s.root().unwrap().to_quadint(basis);
                        assert_eq!(map.reduce(&root), pow_mod(r, (p - 1) / d as u64, p));
                    }
                }
            }
        }
    }
}

#[test]
fn quadratic_symbol_of_rational_is_legendre() {
    for basis in [Basis::Gaussian, Basis::Eisenstein] {
        for (p, pi) in split_primes(basis, 500) {
            for a in 1..30i64 {
                let s = power_residue_symbol(&QuadInt::from_int(a, basis), &pi, 2).unwrap();
                let expected = legendre(a, p);
                match s {
                    Symbol::Zero => assert_eq!(expected, 0),
                    Symbol::Root(r) => assert_eq!(if r.is_one() { 1 } else { -1 }, expected),
                }
            }
        }
    }
}

#[test]
fn cubic_reciprocity() {
    let primes = split_primes(Basis::Eisenstein, 400);
    for (p, a) in &primes {
        for (q, b) in &primes {
            if p == q {
                continue;
            }
            let ab = power_residue_symbol(a, b, 3).unwrap();
            let ba = power_residue_symbol(b, a, 3).unwrap();
            assert_eq!(ab, ba, "({a}/{b})_3");
        }
    }
}

#[test]
fn quartic_reciprocity() {
    let primes = split_primes(Basis::Gaussian, 400);
    for (p, a) in &primes {
        for (q, b) in &primes {
            if p == q {
                continue;
            }
            let ab = power_residue_symbol(a, b, 4).unwrap().root().unwrap();
            let ba = power_residue_symbol(b, a, 4).unwrap().root().unwrap();
            let sign = ((p - 1) / 4) * ((q - 1) / 4) % 2;
            assert_eq!(
                ab,
                ba.mul(&cmbrauer::UnitRoot::new(2 * sign as i64, 4)),
                "({a}/{b})_4"
            );
        }
    }
}

fn symbol_value(basis: Basis, s: Symbol) -> QuadInt {
    s.root().unwrap().to_quadint(basis)
}

proptest! {
    #[test]
    fn symbols_are_multiplicative(
        idx in 0usize..60,
        a in (1i64..500, -500i64..500),
        b in (1i64..500, -500i64..500),
        gaussian in any::<bool>(),
    ) {
        let basis = if gaussian { Basis::Gaussian } else { Basis::Eisenstein };
        let primes = split_primes(basis, 2000);
        let (_, pi) = &primes[idx % primes.len()];
        let x = QuadInt::new(a.0, a.1, basis);
        let y = QuadInt::new(b.0, b.1, basis);
        for &d in degrees(basis) {
            let sx = power_residue_symbol(&x, pi, d).unwrap();
            let sy = power_residue_symbol(&y, pi, d).unwrap();
            let sxy = power_residue_symbol(&(&x * &y), pi, d).unwrap();
            if sx == Symbol::Zero || sy == Symbol::Zero {
                prop_assert_eq!(sxy, Symbol::Zero);
            } else {
                let prod = &symbol_value(basis, sx) * &symbol_value(basis, sy);
                prop_assert_eq!(symbol_value(basis, sxy), prod);
            }
        }
        if basis == Basis::Eisenstein {
            let s6 = power_residue_symbol(&x, pi, 6).unwrap();
            let s3 = power_residue_symbol(&x, pi, 3).unwrap();
            if let (Some(r6), Some(r3)) = (s6.root(), s3.root()) {
                prop_assert_eq!(r6.pow(2).reduced(), r3.reduced());
            }
        }
    }
}

fn brute_points(q: i64, rhs: impl Fn(i64) -> i64) -> i64 {
    let mut squares = vec![0i64; q as usize];
    for y in 0..q {
        squares[(y * y % q) as usize] += 1;
    }
    1 + (0..q)
        .map(|x| squares[rhs(x).rem_euclid(q) as usize])
        .sum::<i64>()
}

fn trace(psi: &QuadInt) -> i64 {
    let a = i64::try_from(&psi.a).unwrap();
    let b = i64::try_from(&psi.b).unwrap();
    match psi.basis {
        Basis::Gaussian => 2 * a,
        Basis::Eisenstein => 2 * a - b,
    }
}

// #E(F_q) = q + 1 - Tr psi(q): an oracle for the sign and twist conventions.
#[test]
fn psi_trace_matches_point_counts() {
    for d in [-5i64, -2, -1, 1, 2, 3, 4, 5, 7, 10, 16, 54] {
        for family in [Family::j0(d).unwrap(), Family::j1728(d).unwrap()] {
            for q in primes_up_to(600) {
                if !family.is_good_split(q) {
                    continue;
                }
                let (pi, psi) = family.psi(q).unwrap();
                assert_eq!(psi.norm(), pi.norm());
                assert!(psi.div_exact(&pi).is_some_and(|u| u.is_unit()));
                let qi = q as i64;
                let n = match family {
                    Family::J0(_) => brute_points(qi, |x| x * x % qi * x + d),
                    Family::J1728(_) => brute_points(qi, |x| x * x % qi * x - d * x),
                };
                assert_eq!(n, qi + 1 - trace(&psi), "{family:?} q={q}");
            }
        }
    }
}

// H^1 computed in coordinates r + s*sqrt(disc) rather than the order basis.
fn h1_brute(disc: i64, f: i64) -> u64 {
    // x = x1 + x2 f (disc + sqrt disc)/2 has doubled sqrt-coordinate f*x2 and
    // doubled rational coordinate 2*x1 + f*disc*x2
    let mut kernel = Vec::new();
    let mut image = Vec::new();
    for x2 in -12..=12i64 {
        for x1 in -300..=300i64 {
            if 2 * x1 + f * disc * x2 == 0 && x2 != 0 {
                kernel.push((f * x2).abs());
            }
        }
        // tau(y) - y = -2 * (sqrt part of y)
        if x2 != 0 {
            image.push((2 * f * x2).abs());
        }
    }
    let k = *kernel.iter().min().unwrap();
    let i = *image.iter().min().unwrap();
    assert_eq!(i % k, 0);
    (i / k) as u64
}

#[test]
fn h1_matches_brute_force() {
    assert_eq!(h1_conjugation(-4, 1).unwrap().order, 2);
    assert_eq!(h1_conjugation(-3, 1).unwrap().order, 1);
    for disc in [-3i64, -4, -7, -8, -11, -15, -19, -20, -24] {
        for f in 1..=6 {
            assert_eq!(
                h1_conjugation(disc, f as u64).unwrap().order,
                h1_brute(disc, f),
                "{disc} f={f}"
            );
        }
    }
}
