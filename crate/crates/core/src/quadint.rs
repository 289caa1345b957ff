//! Exact arithmetic in `Z[i]` and `Z[zeta_3]`: factorisation of rational
//! primes, primary associates and power residue symbols.
//!
//! Residue symbols are evaluated in the residue field `Z/p` of a split prime
//! `pi` of norm `p`, through the ring map sending `omega` to the root
//! `-a/b mod p` of its minimal polynomial determined by `pi = a + b omega`.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;

use crate::arith::{inv_mod, is_prime, pow_mod};
use crate::quadfield::kronecker_unchecked;
use crate::{Error, Result};

/// The generator `omega` of `O_K` over `Z`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Basis {
    /// `omega = i`, `omega^2 = -1`.
    Gaussian,
    /// `omega = zeta_3`, `omega^2 = -1 - omega`.
    Eisenstein,
}

impl Basis {
    pub fn disc(self) -> i64 {
        match self {
            Basis::Gaussian => -4,
            Basis::Eisenstein => -3,
        }
    }

    pub fn unit_count(self) -> u32 {
        match self {
            Basis::Gaussian => 4,
            Basis::Eisenstein => 6,
        }
    }

    /// The primitive root of unity generating `O_K^*`: `i`, resp. `zeta_6 = 1 + zeta_3`.
    pub fn unit_generator(self) -> QuadInt {
        match self {
            Basis::Gaussian => QuadInt::new(0, 1, self),
            Basis::Eisenstein => QuadInt::new(1, 1, self),
        }
    }

    /// All units, as powers `zeta^0, zeta^1, ...` of [`Basis::unit_generator`].
    pub fn units(self) -> Vec<QuadInt> {
        let g = self.unit_generator();
        let mut out = vec![QuadInt::one(self)];
        for _ in 1..self.unit_count() {
            let next = out.last().unwrap() * &g;
            out.push(next);
        }
        out
    }

    fn symbol(self) -> &'static str {
        match self {
            Basis::Gaussian => "i",
            Basis::Eisenstein => "w",
        }
    }
}

/// `a + b*omega`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct QuadInt {
    pub a: BigInt,
    pub b: BigInt,
    pub basis: Basis,
}

impl QuadInt {
    pub fn new(a: impl Into<BigInt>, b: impl Into<BigInt>, basis: Basis) -> Self {
        QuadInt {
            a: a.into(),
            b: b.into(),
            basis,
        }
    }

    pub fn from_int(n: impl Into<BigInt>, basis: Basis) -> Self {
        QuadInt::new(n, 0, basis)
    }

    pub fn one(basis: Basis) -> Self {
        QuadInt::new(1, 0, basis)
    }

    pub fn zero(basis: Basis) -> Self {
        QuadInt::new(0, 0, basis)
    }

    pub fn is_zero(&self) -> bool {
        self.a.is_zero() && self.b.is_zero()
    }

    pub fn norm(&self) -> BigInt {
        match self.basis {
            Basis::Gaussian => &self.a * &self.a + &self.b * &self.b,
            Basis::Eisenstein => &self.a * &self.a - &self.a * &self.b + &self.b * &self.b,
        }
    }

    pub fn conj(&self) -> Self {
        match self.basis {
            Basis::Gaussian => QuadInt::new(self.a.clone(), -&self.b, self.basis),
            // conj(w) = w^2 = -1 - w
            Basis::Eisenstein => QuadInt::new(&self.a - &self.b, -&self.b, self.basis),
        }
    }

    /// `self / other` when the quotient lies in `O_K`.
    pub fn div_exact(&self, other: &QuadInt) -> Option<QuadInt> {
        assert_eq!(self.basis, other.basis);
        let n = other.norm();
        if n.is_zero() {
            return None;
        }
        let num = self * &other.conj();
        if (&num.a % &n).is_zero() && (&num.b % &n).is_zero() {
            Some(QuadInt::new(&num.a / &n, &num.b / &n, self.basis))
        } else {
            None
        }
    }

    pub fn divides(&self, other: &QuadInt) -> bool {
        other.div_exact(self).is_some()
    }

    /// `self == other (mod m)`.
    pub fn congruent(&self, other: &QuadInt, m: &QuadInt) -> bool {
        m.divides(&(self - other))
    }

    pub fn pow(&self, mut e: u32) -> QuadInt {
        let mut base = self.clone();
        let mut acc = QuadInt::one(self.basis);
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            base = &base * &base;
            e >>= 1;
        }
        acc
    }

    /// Whether `self` is one of the `w` units.
    pub fn is_unit(&self) -> bool {
        self.norm().is_one()
    }
}

impl fmt::Display for QuadInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let w = self.basis.symbol();
        match (self.a.is_zero(), self.b.is_zero()) {
            (_, true) => write!(f, "{}", self.a),
            (true, false) => {
                if self.b.is_one() {
                    write!(f, "{w}")
                } else if self.b == -BigInt::one() {
                    write!(f, "-{w}")
                } else {
                    write!(f, "{}{w}", self.b)
                }
            }
            (false, false) => {
                let sign = if self.b.is_negative() { '-' } else { '+' };
                let mag = self.b.abs();
                if mag.is_one() {
                    write!(f, "{}{sign}{w}", self.a)
                } else {
                    write!(f, "{}{sign}{mag}{w}", self.a)
                }
            }
        }
    }
}

impl Serialize for QuadInt {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'a> Add<&'a QuadInt> for &'a QuadInt {
    type Output = QuadInt;
    fn add(self, o: &QuadInt) -> QuadInt {
        assert_eq!(self.basis, o.basis);
        QuadInt::new(&self.a + &o.a, &self.b + &o.b, self.basis)
    }
}

impl<'a> Sub<&'a QuadInt> for &'a QuadInt {
    type Output = QuadInt;
    fn sub(self, o: &QuadInt) -> QuadInt {
        assert_eq!(self.basis, o.basis);
        QuadInt::new(&self.a - &o.a, &self.b - &o.b, self.basis)
    }
}

impl<'a> Mul<&'a QuadInt> for &'a QuadInt {
    type Output = QuadInt;
    fn mul(self, o: &QuadInt) -> QuadInt {
        assert_eq!(self.basis, o.basis);
        let ac = &self.a * &o.a;
        let bd = &self.b * &o.b;
        let cross = &self.a * &o.b + &self.b * &o.a;
        match self.basis {
            Basis::Gaussian => QuadInt::new(ac - bd, cross, self.basis),
            Basis::Eisenstein => QuadInt::new(ac - &bd, cross - bd, self.basis),
        }
    }
}

impl Neg for &QuadInt {
    type Output = QuadInt;
    fn neg(self) -> QuadInt {
        QuadInt::new(-&self.a, -&self.b, self.basis)
    }
}

impl Sub for QuadInt {
    type Output = QuadInt;
    fn sub(self, o: QuadInt) -> QuadInt {
        &self - &o
    }
}

impl Mul for QuadInt {
    type Output = QuadInt;
    fn mul(self, o: QuadInt) -> QuadInt {
        &self * &o
    }
}

/// How a rational prime decomposes in `O_K`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Factorization {
    Split { pi: QuadInt, pi_bar: QuadInt },
    Inert(u64),
    Ramified { pi: QuadInt },
}

/// Decomposes the prime `p` in `Z[omega]`.
///
/// A split or ramified prime element is found by searching `b = 1, 2, ...`
/// for the smallest `a >= 0` with `N(a + b omega) = p`.
pub fn factor_rational_prime(p: u64, basis: Basis) -> Result<Factorization> {
    if !is_prime(p) {
        return Err(Error::invalid(format!("{p} is not prime")));
    }
    match kronecker_unchecked(basis.disc(), p) {
        -1 => Ok(Factorization::Inert(p)),
        chi => {
            let pi =
                norm_search(p, basis).expect("split or ramified prime has an element of norm p");
            if chi == 0 {
                Ok(Factorization::Ramified { pi })
            } else {
                let pi_bar = pi.conj();
                Ok(Factorization::Split { pi, pi_bar })
            }
        }
    }
}

fn norm_search(p: u64, basis: Basis) -> Option<QuadInt> {
    let p = p as i64;
    let mut b: i64 = 1;
    // N(a + b w) >= 3b^2/4 for the Eisenstein norm and >= b^2 for the Gaussian one
    while 3 * b * b <= 4 * p {
        let mut a: i64 = 0;
        loop {
            let n = match basis {
                Basis::Gaussian => a * a + b * b,
                Basis::Eisenstein => a * a - a * b + b * b,
            };
            if n == p {
                return Some(QuadInt::new(a, b, basis));
            }
            if n > p && a >= b {
                break;
            }
            a += 1;
        }
        b += 1;
    }
    None
}

/// The modulus defining primary elements: `2 + 2i`, resp. `3`.
pub fn primary_modulus(basis: Basis) -> QuadInt {
    match basis {
        Basis::Gaussian => QuadInt::new(2, 2, basis),
        Basis::Eisenstein => QuadInt::new(3, 0, basis),
    }
}

/// The unique associate `u*x` with `u*x == 1` modulo [`primary_modulus`].
pub fn primary_associate(x: &QuadInt) -> Result<QuadInt> {
    if x.is_zero() {
        return Err(Error::precondition("zero has no primary associate"));
    }
    let m = primary_modulus(x.basis);
    let one = QuadInt::one(x.basis);
    let hits: Vec<QuadInt> = x
        .basis
        .units()
        .iter()
        .map(|u| u * x)
        .filter(|y| y.congruent(&one, &m))
        .collect();
    match hits.len() {
        1 => Ok(hits.into_iter().next().unwrap()),
        n => Err(Error::precondition(format!(
            "{x} has {n} associates congruent to 1 mod {m}; it is not coprime to {m}"
        ))),
    }
}

/// `a + b omega` lies in `Z + l^k O_K`, i.e. `l^k | b`.
pub fn in_suborder(x: &QuadInt, ell: u64, k: u32) -> bool {
    let m = BigInt::from(ell).pow(k);
    (&x.b % &m).is_zero()
}

/// Largest `k <= cap` with `x` in `Z + l^k O_K`.
pub fn suborder_level(x: &QuadInt, ell: u64, cap: u32) -> u32 {
    if x.b.is_zero() {
        return cap;
    }
    let l = BigInt::from(ell);
    let mut b = x.b.clone();
    let mut k = 0;
    while k < cap && (&b % &l).is_zero() {
        b /= &l;
        k += 1;
    }
    k
}

/// `zeta_n^exponent` for `n in {2, 3, 4, 6}`, with `zeta_n` the root of unity
/// `-1`, `zeta_3`, `i`, `zeta_6 = 1 + zeta_3` respectively.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct UnitRoot {
    pub exponent: u32,
    pub order: u32,
}

impl UnitRoot {
    pub fn new(exponent: i64, order: u32) -> Self {
        UnitRoot {
            exponent: exponent.rem_euclid(order as i64) as u32,
            order,
        }
    }

    pub fn one(order: u32) -> Self {
        UnitRoot { exponent: 0, order }
    }

    pub fn is_one(&self) -> bool {
        self.exponent == 0
    }

    /// Rewrites the value as a root of unity of order `order`, which must be
    /// a multiple of the current one.
    pub fn lift(&self, order: u32) -> Self {
        assert_eq!(order % self.order, 0);
        UnitRoot {
            exponent: self.exponent * (order / self.order),
            order,
        }
    }

    /// Product of two roots of unity, expressed at the lcm of their orders.
    pub fn mul(&self, o: &UnitRoot) -> Self {
        let n = self.order.lcm(&o.order);
        let (x, y) = (self.lift(n), o.lift(n));
        UnitRoot::new((x.exponent + y.exponent) as i64, n)
    }

    pub fn pow(&self, e: u32) -> Self {
        UnitRoot::new(self.exponent as i64 * e as i64, self.order)
    }

    pub fn inverse(&self) -> Self {
        UnitRoot::new(-(self.exponent as i64), self.order)
    }

    /// The value as a unit of `O_K`.
    pub fn to_quadint(&self, basis: Basis) -> QuadInt {
        let w = basis.unit_count();
        assert_eq!(
            w % self.order,
            0,
            "{}th roots of unity are not in this ring",
            self.order
        );
        basis.unit_generator().pow(self.exponent * (w / self.order))
    }

    /// Minimal-order representation (e.g. `zeta_6^2` becomes `zeta_3`).
    pub fn reduced(&self) -> Self {
        if self.exponent == 0 {
            return UnitRoot::one(1);
        }
        let g = (self.exponent as u64).gcd(&(self.order as u64)) as u32;
        UnitRoot {
            exponent: self.exponent / g,
            order: self.order / g,
        }
    }
}

/// A power residue symbol value: a root of unity, or `0` when `pi | a`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Symbol {
    Zero,
    Root(UnitRoot),
}

impl Symbol {
    pub fn root(&self) -> Option<UnitRoot> {
        match self {
            Symbol::Zero => None,
            Symbol::Root(r) => Some(*r),
        }
    }

    pub fn is_one(&self) -> bool {
        matches!(self, Symbol::Root(r) if r.is_one())
    }
}

/// The ring map `O_K -> Z/p` with kernel a split prime `pi` of norm `p`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ResidueMap {
    pub p: u64,
    /// Image of `omega`.
    pub root: u64,
    pub basis: Basis,
}

impl ResidueMap {
    pub fn new(pi: &QuadInt) -> Result<Self> {
        let n = pi.norm();
        let p = n
            .to_u64()
            .filter(|&p| is_prime(p))
            .ok_or_else(|| Error::precondition(format!("{pi} does not have prime norm")))?;
        let a = bigint_mod(&pi.a, p);
        let b = bigint_mod(&pi.b, p);
        let binv = inv_mod(b as i64, p)
            .ok_or_else(|| Error::precondition(format!("{pi} is not a split prime")))?;
        let root = ((p - a) % p) as u128 * binv as u128 % p as u128;
        let root = root as u64;
        let map = ResidueMap {
            p,
            root,
            basis: pi.basis,
        };
        let min_poly = match pi.basis {
            Basis::Gaussian => (root as u128 * root as u128 + 1) % p as u128,
            Basis::Eisenstein => (root as u128 * root as u128 + root as u128 + 1) % p as u128,
        };
        if min_poly != 0 {
            return Err(Error::precondition(format!(
                "{pi} does not define a residue map"
            )));
        }
        Ok(map)
    }

    pub fn reduce(&self, x: &QuadInt) -> u64 {
        assert_eq!(x.basis, self.basis);
        let a = bigint_mod(&x.a, self.p) as u128;
        let b = bigint_mod(&x.b, self.p) as u128;
        ((a + b * self.root as u128) % self.p as u128) as u64
    }
}

fn bigint_mod(x: &BigInt, p: u64) -> u64 {
    x.mod_floor(&BigInt::from(p)).to_u64().unwrap()
}

fn supported_degree(basis: Basis, degree: u32) -> bool {
    matches!(
        (basis, degree),
        (_, 2) | (Basis::Gaussian, 4) | (Basis::Eisenstein, 3 | 6)
    )
}

/// `(a / pi)_d`: the root of unity congruent to `a^{(N(pi)-1)/d}` modulo `pi`.
///
/// `pi` must be a split prime with `N(pi) == 1 (mod d)`; `d` is 2 or 4 in
/// `Z[i]` and 2, 3 or 6 in `Z[zeta_3]`.
pub fn power_residue_symbol(a: &QuadInt, pi: &QuadInt, degree: u32) -> Result<Symbol> {
    if a.basis != pi.basis {
        return Err(Error::invalid("arguments live in different rings"));
    }
    if !supported_degree(pi.basis, degree) {
        return Err(Error::invalid(format!(
            "degree {degree} residue symbols are not defined in this ring"
        )));
    }
    let map = ResidueMap::new(pi)?;
    symbol_in(&map, map.reduce(a), degree)
}

/// Residue symbol of an already-reduced value `x in Z/p`.
pub fn symbol_in(map: &ResidueMap, x: u64, degree: u32) -> Result<Symbol> {
    let p = map.p;
    if !(p - 1).is_multiple_of(degree as u64) {
        return Err(Error::precondition(format!(
            "N(pi) = {p} is not 1 mod {degree}"
        )));
    }
    if x.is_multiple_of(p) {
        return Ok(Symbol::Zero);
    }
    let e = pow_mod(x, (p - 1) / degree as u64, p);
    let gen = root_image(map, degree);
    let mut acc = 1u64;
    let mut hits = Vec::new();
    for j in 0..degree {
        if acc == e {
            hits.push(j);
        }
        acc = (acc as u128 * gen as u128 % p as u128) as u64;
    }
    match hits.as_slice() {
        [j] => Ok(Symbol::Root(UnitRoot::new(*j as i64, degree))),
        _ => Err(Error::precondition(format!(
            "{x}^((p-1)/{degree}) mod {p} matched {} roots of unity",
            hits.len()
        ))),
    }
}

/// Image of the chosen primitive `degree`-th root of unity in `Z/p`.
fn root_image(map: &ResidueMap, degree: u32) -> u64 {
    let p = map.p;
    match degree {
        2 => p - 1,
        4 => map.root,
        3 => map.root,
        6 => (map.root + 1) % p,
        _ => unreachable!(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn g(a: i64, b: i64) -> QuadInt {
        QuadInt::new(a, b, Basis::Gaussian)
    }
    fn e(a: i64, b: i64) -> QuadInt {
        QuadInt::new(a, b, Basis::Eisenstein)
    }

    #[test]
    fn arithmetic_identities() {
        let w = e(0, 1);
        assert_eq!(
            &(&w * &w) + &(&w + &QuadInt::one(Basis::Eisenstein)),
            e(0, 0)
        );
        let i = g(0, 1);
        assert_eq!(&i * &i, g(-1, 0));
        assert_eq!(e(3, 1).norm(), BigInt::from(7));
        assert_eq!(e(3, 1).conj(), e(2, -1));
        assert_eq!((&e(3, 1) * &e(3, 1).conj()), e(7, 0));
        assert_eq!(g(5, 0).div_exact(&g(2, 1)), Some(g(2, -1)));
        assert_eq!(g(5, 0).div_exact(&g(1, 1)), None);
    }

    #[test]
    fn unit_lists() {
        let us = Basis::Eisenstein.units();
        assert_eq!(us.len(), 6);
        assert!(us.iter().all(QuadInt::is_unit));
        assert_eq!(us[3], e(-1, 0));
        assert_eq!(us[2], e(0, 1));
        assert_eq!(
            Basis::Gaussian.units(),
            vec![g(1, 0), g(0, 1), g(-1, 0), g(0, -1)]
        );
    }

    #[test]
    fn factor_examples() {
        assert_eq!(
            factor_rational_prime(5, Basis::Gaussian).unwrap(),
            Factorization::Split {
                pi: g(2, 1),
                pi_bar: g(2, -1)
            }
        );
        match factor_rational_prime(7, Basis::Eisenstein).unwrap() {
            Factorization::Split { pi, .. } => assert_eq!(pi, e(3, 1)),
            other => panic!("{other:?}"),
        }
        assert_eq!(
            factor_rational_prime(2, Basis::Eisenstein).unwrap(),
            Factorization::Inert(2)
        );
        assert_eq!(
            factor_rational_prime(3, Basis::Gaussian).unwrap(),
            Factorization::Inert(3)
        );
        assert!(matches!(
            factor_rational_prime(2, Basis::Gaussian).unwrap(),
            Factorization::Ramified { .. }
        ));
        assert!(matches!(
            factor_rational_prime(3, Basis::Eisenstein).unwrap(),
            Factorization::Ramified { .. }
        ));
        assert!(factor_rational_prime(9, Basis::Gaussian).is_err());
    }

    #[test]
    fn primary_examples() {
        assert_eq!(primary_associate(&g(-1, 2)).unwrap(), g(-1, 2));
        assert_eq!(primary_associate(&g(2, 1)).unwrap(), g(-1, 2));
        assert_eq!(primary_associate(&g(1, 0)).unwrap(), g(1, 0));
        assert_eq!(primary_associate(&e(1, 0)).unwrap(), e(1, 0));
        let p = primary_associate(&e(3, 1)).unwrap();
        assert!(p.congruent(&e(1, 0), &e(3, 0)));
        assert_eq!(p.norm(), BigInt::from(7));
        assert!(primary_associate(&g(1, 1)).is_err());
        assert!(primary_associate(&e(0, 0)).is_err());
        assert!(primary_associate(&e(3, 0)).is_err());
    }

    #[test]
    fn quartic_symbol_example() {
        let pi = g(-1, 2);
        let s = power_residue_symbol(&g(2, 0), &pi, 4).unwrap();
        assert_eq!(s, Symbol::Root(UnitRoot::new(3, 4)));
        assert_eq!(s.root().unwrap().to_quadint(Basis::Gaussian), g(0, -1));
        assert!(power_residue_symbol(&g(1, 0), &pi, 4).unwrap().is_one());
        assert_eq!(
            power_residue_symbol(&g(5, 0), &pi, 4).unwrap(),
            Symbol::Zero
        );
        assert!(power_residue_symbol(&e(1, 0), &e(3, 1), 4).is_err());
        assert!(power_residue_symbol(&g(2, 0), &g(3, 0), 4).is_err());
    }

    #[test]
    fn fourth_powers_have_trivial_symbol() {
        let pi = g(-1, 2);
        for x in 1..20 {
            let a = g(x, x + 1).pow(4);
            let s = power_residue_symbol(&a, &pi, 4).unwrap();
            assert!(s.is_one() || s == Symbol::Zero);
        }
    }

    #[test]
    fn membership() {
        assert!(in_suborder(&e(3, 0), 3, 5));
        assert!(in_suborder(&e(1, 3), 3, 1));
        assert!(!in_suborder(&e(1, 3), 3, 2));
        assert_eq!(suborder_level(&e(1, 18), 3, 8), 2);
        assert_eq!(suborder_level(&e(1, 0), 3, 8), 8);
    }

    #[test]
    fn unit_root_algebra() {
        let z6 = UnitRoot::new(1, 6);
        assert_eq!(z6.pow(2).reduced(), UnitRoot::new(1, 3));
        assert_eq!(z6.pow(3).reduced(), UnitRoot::new(1, 2));
        assert_eq!(z6.to_quadint(Basis::Eisenstein).pow(2), e(0, 1));
        assert_eq!(
            UnitRoot::new(1, 3).mul(&UnitRoot::new(1, 2)),
            UnitRoot::new(5, 6)
        );
        assert!(z6.mul(&z6.inverse()).is_one());
    }

    #[test]
    fn display() {
        assert_eq!(g(-1, 2).to_string(), "-1+2i");
        assert_eq!(e(3, -1).to_string(), "3-w");
        assert_eq!(e(0, -4).to_string(), "-4w");
        assert_eq!(e(7, 0).to_string(), "7");
    }
}
