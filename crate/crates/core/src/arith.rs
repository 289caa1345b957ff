//! Small-integer number theory shared by the other modules.

use num_integer::Integer;

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n.is_multiple_of(2) {
        return n == 2;
    }
    let mut d = 3;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 2;
    }
    true
}

/// Primes `<= bound`, ascending.
pub fn primes_up_to(bound: u64) -> Vec<u64> {
    if bound < 2 {
        return Vec::new();
    }
    let n = bound as usize;
    let mut sieve = vec![true; n + 1];
    sieve[0] = false;
    sieve[1] = false;
    let mut i = 2;
    while i * i <= n {
        if sieve[i] {
            let mut j = i * i;
            while j <= n {
                sieve[j] = false;
                j += i;
            }
        }
        i += 1;
    }
    sieve
        .iter()
        .enumerate()
        .filter_map(|(k, &p)| p.then_some(k as u64))
        .collect()
}

/// Prime factorisation as `(p, e)` pairs with `p` ascending. `factorize(1)` is empty.
pub fn factorize(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut p = 2;
    while p * p <= n {
        if n.is_multiple_of(p) {
            let mut e = 0;
            while n.is_multiple_of(p) {
                n /= p;
                e += 1;
            }
            out.push((p, e));
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

/// `ord_p(n)` for nonzero `n`.
pub fn ord(n: i64, p: u64) -> u32 {
    assert!(n != 0, "ord of zero");
    let p = p as i64;
    let mut n = n;
    let mut e = 0;
    while n % p == 0 {
        n /= p;
        e += 1;
    }
    e
}

pub fn pow_mod(base: u64, mut exp: u64, m: u64) -> u64 {
    if m == 1 {
        return 0;
    }
    let m128 = m as u128;
    let mut b = (base % m) as u128;
    let mut acc: u128 = 1;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = acc * b % m128;
        }
        b = b * b % m128;
        exp >>= 1;
    }
    acc as u64
}

/// Inverse of `a` modulo `m`, if it exists.
pub fn inv_mod(a: i64, m: u64) -> Option<u64> {
    let m = m as i64;
    let e = a.rem_euclid(m).extended_gcd(&m);
    (e.gcd == 1).then(|| e.x.rem_euclid(m) as u64)
}

pub fn ipow(base: u64, exp: u32) -> u64 {
    base.checked_pow(exp).expect("integer power overflow")
}

/// Integer `k`-th root of `|n|` when `|n|` is a perfect `k`-th power.
fn exact_root(n: u64, k: u32) -> Option<u64> {
    if n < 2 {
        return Some(n);
    }
    let mut r = (n as f64).powf(1.0 / k as f64).round() as u64;
    // float guess can be off by one for large n
    for cand in [r.saturating_sub(1), r, r + 1] {
        if cand.checked_pow(k) == Some(n) {
            r = cand;
            return Some(r);
        }
    }
    None
}

/// `Some(r)` with `r^3 = n`.
pub fn cube_root(n: i64) -> Option<i64> {
    let r = exact_root(n.unsigned_abs(), 3)? as i64;
    Some(if n < 0 { -r } else { r })
}

pub fn is_square(n: i64) -> bool {
    n >= 0 && exact_root(n as u64, 2).is_some()
}

/// Divides out every `k`-th power from `n`, keeping the sign. Returns the
/// reduced value and the removed root `t` with `n = reduced * t^k`.
pub fn kth_power_free(n: i64, k: u32) -> (i64, u64) {
    assert!(n != 0);
    let mut reduced = n;
    let mut t = 1u64;
    for (p, e) in factorize(n.unsigned_abs()) {
        let q = e / k;
        if q > 0 {
            reduced /= ipow(p, q * k) as i64;
            t *= ipow(p, q);
        }
    }
    (reduced, t)
}

/// Legendre symbol `(a/p)` for an odd prime `p` via Euler's criterion.
pub fn legendre(a: i64, p: u64) -> i8 {
    debug_assert!(p > 2);
    let r = pow_mod(a.rem_euclid(p as i64) as u64, (p - 1) / 2, p);
    match r {
        0 => 0,
        1 => 1,
        _ => -1,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sieve_matches_trial_division() {
        let sieve = primes_up_to(500);
        let trial: Vec<u64> = (0..=500).filter(|&n| is_prime(n)).collect();
        assert_eq!(sieve, trial);
    }

    #[test]
    fn factorization_roundtrip() {
        for n in 1..2000u64 {
            let prod: u64 = factorize(n).iter().map(|&(p, e)| ipow(p, e)).product();
            assert_eq!(prod, n);
        }
    }

    #[test]
    fn power_free_reduction() {
        assert_eq!(kth_power_free(64, 6), (1, 2));
        assert_eq!(kth_power_free(-128, 6), (-2, 2));
        assert_eq!(kth_power_free(54, 6), (54, 1));
        assert_eq!(kth_power_free(48, 4), (3, 2));
    }

    #[test]
    fn roots() {
        assert_eq!(cube_root(-27), Some(-3));
        assert_eq!(cube_root(216), Some(6));
        assert_eq!(cube_root(4), None);
        assert!(is_square(0) && is_square(49) && !is_square(-4) && !is_square(2));
    }

    #[test]
    fn inverses() {
        assert_eq!(inv_mod(2, 5), Some(3));
        assert_eq!(inv_mod(-1, 7), Some(6));
        assert_eq!(inv_mod(6, 9), None);
    }
}
