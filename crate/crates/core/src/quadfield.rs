//! Imaginary quadratic fields, their orders, class numbers and ring class
//! field degrees.
//!
//! Class numbers of maximal orders are counted directly from reduced binary
//! quadratic forms, so the conductor formula in [`class_number_order`] can be
//! checked against an independent count at discriminant `c^2 * disc`.

use num_integer::Integer;
use serde::Serialize;

use crate::arith::{factorize, is_prime, legendre};
use crate::{Error, Result};

/// `K = Q(sqrt(-d))` with `d` squarefree.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct ImQuadField {
    d: u64,
    disc: i64,
    unit_count: u32,
}

fn is_squarefree(n: u64) -> bool {
    factorize(n).iter().all(|&(_, e)| e == 1)
}

/// Whether `disc` is the discriminant of an imaginary quadratic field.
pub fn is_fundamental_discriminant(disc: i64) -> bool {
    if disc >= 0 {
        return false;
    }
    match disc.rem_euclid(4) {
        1 => is_squarefree(disc.unsigned_abs()),
        0 => {
            let m = disc / 4;
            matches!(m.rem_euclid(4), 2 | 3) && is_squarefree(m.unsigned_abs())
        }
        _ => false,
    }
}

impl ImQuadField {
    pub fn from_d(d: u64) -> Result<Self> {
        if d == 0 || !is_squarefree(d) {
            return Err(Error::invalid(format!(
                "d = {d} is not a positive squarefree integer"
            )));
        }
        let neg = -(d as i64);
        let disc = if neg.rem_euclid(4) == 1 { neg } else { 4 * neg };
        let unit_count = match disc {
            -4 => 4,
            -3 => 6,
            _ => 2,
        };
        Ok(ImQuadField {
            d,
            disc,
            unit_count,
        })
    }

    pub fn from_disc(disc: i64) -> Result<Self> {
        if !is_fundamental_discriminant(disc) {
            return Err(Error::invalid(format!(
                "{disc} is not a fundamental imaginary quadratic discriminant"
            )));
        }
        let d = if disc.rem_euclid(4) == 0 {
            -disc / 4
        } else {
            -disc
        };
        Self::from_d(d as u64)
    }

    pub fn d(&self) -> u64 {
        self.d
    }

    pub fn disc(&self) -> i64 {
        self.disc
    }

    /// `w = #O_K^*`.
    pub fn unit_count(&self) -> u32 {
        self.unit_count
    }

    /// `ord_l(disc)`.
    pub fn disc_ord(&self, ell: u64) -> u32 {
        crate::arith::ord(self.disc, ell)
    }

    pub fn maximal_order(&self) -> OrderInField {
        OrderInField {
            field: *self,
            conductor: 1,
        }
    }
}

/// The order `Z + c O_K`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct OrderInField {
    pub field: ImQuadField,
    pub conductor: u64,
}

impl OrderInField {
    pub fn new(field: ImQuadField, conductor: u64) -> Result<Self> {
        if conductor == 0 {
            return Err(Error::invalid("conductor must be positive"));
        }
        Ok(OrderInField { field, conductor })
    }

    /// Discriminant `c^2 * disc` of the order.
    pub fn disc(&self) -> i64 {
        let c = self.conductor as i64;
        c * c * self.field.disc
    }
}

/// Kronecker symbol `(disc / p)` for a fundamental discriminant and a prime.
pub fn kronecker_symbol(disc: i64, p: u64) -> Result<i8> {
    if !is_fundamental_discriminant(disc) {
        return Err(Error::invalid(format!(
            "{disc} is not a fundamental discriminant"
        )));
    }
    if !is_prime(p) {
        return Err(Error::invalid(format!("{p} is not prime")));
    }
    Ok(kronecker_unchecked(disc, p))
}

pub(crate) fn kronecker_unchecked(disc: i64, p: u64) -> i8 {
    if p == 2 {
        match disc.rem_euclid(8) {
            1 => 1,
            5 => -1,
            _ => 0,
        }
    } else {
        legendre(disc, p)
    }
}

/// Number of reduced primitive positive definite forms `(a, b, c)` of
/// discriminant `disc < 0`: `|b| <= a <= c`, with `b >= 0` whenever
/// `|b| = a` or `a = c`.
pub fn reduced_form_count(disc: i64) -> u64 {
    assert!(
        disc < 0 && matches!(disc.rem_euclid(4), 0 | 1),
        "bad discriminant {disc}"
    );
    let n = -disc;
    let mut count = 0;
    let mut a: i64 = 1;
    // a <= sqrt(|disc| / 3)
    while 3 * a * a <= n {
        for b in -a + 1..=a {
            let num = b * b - disc;
            if num % (4 * a) != 0 {
                continue;
            }
            let c = num / (4 * a);
            if c < a {
                continue;
            }
            if c == a && b < 0 {
                continue;
            }
            if a.gcd(&b).gcd(&c) == 1 {
                count += 1;
            }
        }
        a += 1;
    }
    count
}

/// `h(O_K)` by enumerating reduced forms.
pub fn class_number_maximal(field: &ImQuadField) -> u64 {
    reduced_form_count(field.disc)
}

/// `[O_K^* : O_c^*]`.
pub fn unit_index(order: &OrderInField) -> u64 {
    if order.conductor == 1 {
        1
    } else {
        order.field.unit_count as u64 / 2
    }
}

/// `h(O_c) = [K_c : K]` from the conductor formula
/// `h(O_K) c / [O_K^*:O_c^*] * prod_{p | c} (1 - (disc/p)/p)`.
pub fn class_number_order(order: &OrderInField) -> u64 {
    let h = class_number_maximal(&order.field);
    class_number_order_with(order, h)
}

fn class_number_order_with(order: &OrderInField, h_max: u64) -> u64 {
    let c = order.conductor;
    // c * prod (1 - chi(p)/p) = (c / rad c) * prod (p - chi(p))
    let mut numer: i128 = h_max as i128;
    let mut rad: u64 = 1;
    for (p, _) in factorize(c) {
        rad *= p;
        numer *= p as i128 - kronecker_unchecked(order.field.disc, p) as i128;
    }
    numer *= (c / rad) as i128;
    let idx = unit_index(order) as i128;
    assert!(numer % idx == 0, "class number formula not integral");
    (numer / idx) as u64
}

/// `n(l)`, either exact (when `L` lies in the Hilbert class field) or the
/// divisibility bound.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", content = "value", rename_all = "kebab-case")]
pub enum NValue {
    Exact(u32),
    BoundOnly(u32),
}

impl NValue {
    pub fn value(&self) -> u32 {
        match *self {
            NValue::Exact(k) | NValue::BoundOnly(k) => k,
        }
    }
}

/// Largest `k` such that `K_{l^k}` embeds into `KL`.
///
/// With `l_in_hilbert` the caller asserts `L` is contained in the Hilbert
/// class field, so `KL = H_K` and containment is the equality
/// `h(O_{l^k}) = h(O_K)`. Otherwise only the necessary condition
/// `h(O_{l^k}) | [KL:K]` is available.
pub fn n_of_ell(
    field: &ImQuadField,
    ell: u64,
    galois_closure_degree_over_k: u64,
    l_in_hilbert: bool,
) -> Result<NValue> {
    if !is_prime(ell) {
        return Err(Error::invalid(format!("{ell} is not prime")));
    }
    if galois_closure_degree_over_k == 0 {
        return Err(Error::invalid("degree [KL:K] must be positive"));
    }
    let h = class_number_maximal(field);
    let mut k = 0u32;
    let mut modulus: u64 = 1;
    loop {
        modulus = match modulus.checked_mul(ell) {
            Some(m) => m,
            None => break,
        };
        let hk = class_number_order_with(
            &OrderInField {
                field: *field,
                conductor: modulus,
            },
            h,
        );
        let ok = if l_in_hilbert {
            hk == h
        } else {
            galois_closure_degree_over_k.is_multiple_of(hk)
        };
        // h(O_{l^k}) is nondecreasing in k, so the first failure is final
        if !ok {
            break;
        }
        k += 1;
        if hk > galois_closure_degree_over_k.max(h) {
            break;
        }
    }
    Ok(if l_in_hilbert {
        NValue::Exact(k)
    } else {
        NValue::BoundOnly(k)
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kronecker_examples() {
        assert_eq!(kronecker_symbol(-7, 2).unwrap(), 1);
        assert_eq!(kronecker_symbol(-4, 2).unwrap(), 0);
        assert_eq!(kronecker_symbol(-3, 3).unwrap(), 0);
        assert_eq!(kronecker_symbol(-3, 2).unwrap(), -1);
        assert!(kronecker_symbol(-12, 5).is_err());
        assert!(kronecker_symbol(-7, 9).is_err());
    }

    #[test]
    fn field_construction() {
        let k = ImQuadField::from_d(1).unwrap();
        assert_eq!((k.disc(), k.unit_count()), (-4, 4));
        let k = ImQuadField::from_d(3).unwrap();
        assert_eq!((k.disc(), k.unit_count()), (-3, 6));
        let k = ImQuadField::from_disc(-8).unwrap();
        assert_eq!((k.d(), k.unit_count()), (2, 2));
        assert!(ImQuadField::from_d(4).is_err());
        assert!(ImQuadField::from_disc(-16).is_err());
        assert!(ImQuadField::from_disc(-1).is_err());
    }

    #[test]
    fn class_numbers_of_small_fields() {
        for disc in [-3, -4, -7, -8, -11, -19, -43, -67, -163] {
            assert_eq!(
                class_number_maximal(&ImQuadField::from_disc(disc).unwrap()),
                1,
                "{disc}"
            );
        }
        assert_eq!(
            class_number_maximal(&ImQuadField::from_disc(-20).unwrap()),
            2
        );
        assert_eq!(
            class_number_maximal(&ImQuadField::from_disc(-23).unwrap()),
            3
        );
        assert_eq!(
            class_number_maximal(&ImQuadField::from_disc(-56).unwrap()),
            4
        );
    }

    #[test]
    fn order_class_numbers() {
        let gauss = ImQuadField::from_disc(-4).unwrap();
        let eis = ImQuadField::from_disc(-3).unwrap();
        let h = |f, c| class_number_order(&OrderInField::new(f, c).unwrap());
        assert_eq!(h(gauss, 2), 1);
        assert_eq!(reduced_form_count(-16), 1);
        assert_eq!(h(eis, 3), 1);
        assert_eq!(h(eis, 9), 3);
        assert_eq!(reduced_form_count(-243), 3);
    }

    #[test]
    fn n_of_ell_examples() {
        let f = |d| ImQuadField::from_disc(d).unwrap();
        assert_eq!(n_of_ell(&f(-3), 3, 1, true).unwrap(), NValue::Exact(1));
        assert_eq!(n_of_ell(&f(-3), 2, 1, true).unwrap(), NValue::Exact(1));
        assert_eq!(n_of_ell(&f(-4), 2, 1, true).unwrap(), NValue::Exact(1));
        assert_eq!(n_of_ell(&f(-11), 11, 1, true).unwrap(), NValue::Exact(0));
        assert_eq!(n_of_ell(&f(-7), 2, 1, true).unwrap(), NValue::Exact(1));
        assert_eq!(n_of_ell(&f(-3), 5, 1, true).unwrap(), NValue::Exact(0));
        // h(O_3) for Q(sqrt -11) is 3 - (-11/3) = 4, divides 4 but h(O_9) = 12 does not
        assert_eq!(
            n_of_ell(&f(-11), 3, 4, false).unwrap(),
            NValue::BoundOnly(1)
        );
        assert_eq!(
            n_of_ell(&f(-11), 3, 12, false).unwrap(),
            NValue::BoundOnly(2)
        );
    }

    #[test]
    fn class_number_one_outside_special_cases_has_trivial_n() {
        for disc in [-7i64, -8, -11, -19, -43, -67, -163] {
            let k = ImQuadField::from_disc(disc).unwrap();
            for ell in crate::arith::primes_up_to(60) {
                let n = n_of_ell(&k, ell, 1, true).unwrap().value();
                if disc.rem_euclid(8) == 1 && ell == 2 {
                    assert_eq!(n, 1);
                } else {
                    assert_eq!(n, 0, "disc {disc} ell {ell}");
                }
            }
        }
    }
}
