//! Exact coefficient rings: ℚ and ℚ(ζ₃) with its 3-adic valuation.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Serialize, Serializer};

/// Commutative ring with owned arithmetic, enough for polynomials and curves.
pub trait Ring:
    Clone
    + PartialEq
    + fmt::Debug
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Neg<Output = Self>
{
    fn zero() -> Self;
    fn one() -> Self;
    fn from_i64(n: i64) -> Self;
    fn is_zero(&self) -> bool;
}

pub trait Field: Ring {
    /// Panics on zero; callers check first.
    fn inv(&self) -> Self;
}

impl Ring for BigRational {
    fn zero() -> Self {
        Zero::zero()
    }
    fn one() -> Self {
        One::one()
    }
    fn from_i64(n: i64) -> Self {
        BigRational::from_integer(n.into())
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
}

impl Field for BigRational {
    fn inv(&self) -> Self {
        self.recip()
    }
}

pub fn rat(n: i64) -> BigRational {
    BigRational::from_integer(n.into())
}

pub fn ratio(n: i64, d: i64) -> BigRational {
    BigRational::new(n.into(), d.into())
}

/// `v_p` of a nonzero integer.
pub fn int_val(n: &BigInt, p: u64) -> i64 {
    assert!(!n.is_zero(), "valuation of zero");
    let p = BigInt::from(p);
    let mut n = n.clone();
    let mut v = 0;
    loop {
        let (q, r) = n.div_rem(&p);
        if !r.is_zero() {
            return v;
        }
        n = q;
        v += 1;
    }
}

/// `v_p` of a rational; `None` for zero.
pub fn rat_val(x: &BigRational, p: u64) -> Option<i64> {
    if Zero::is_zero(x) {
        return None;
    }
    Some(int_val(x.numer(), p) - int_val(x.denom(), p))
}

/// Reduction of a `p`-integral rational modulo `p`.
pub fn rat_residue(x: &BigRational, p: u64) -> Option<u64> {
    if rat_val(x, p).is_some_and(|v| v < 0) {
        return None;
    }
    let m = BigInt::from(p);
    let n = x.numer().mod_floor(&m);
    let d = x.denom().mod_floor(&m);
    let n: u64 = n.try_into().unwrap();
    let d: u64 = d.try_into().unwrap();
    let dinv = crate::arith::inv_mod(d as i64, p)?;
    Some(n * dinv % p)
}

/// Serialises through `Display`, for rationals in reports.
pub fn display<T: fmt::Display, S: Serializer>(v: &T, s: S) -> Result<S::Ok, S::Error> {
    s.collect_str(v)
}

/// `a + bζ` with ζ a primitive cube root of unity (ζ² = −1 − ζ).
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct EisensteinElem {
    pub a: BigRational,
    pub b: BigRational,
}

impl EisensteinElem {
    pub fn new(a: BigRational, b: BigRational) -> Self {
        EisensteinElem { a, b }
    }

    pub fn int(a: i64, b: i64) -> Self {
        EisensteinElem::new(rat(a), rat(b))
    }

    pub fn rational(a: BigRational) -> Self {
        EisensteinElem::new(a, Zero::zero())
    }

    pub fn zeta() -> Self {
        EisensteinElem::int(0, 1)
    }

    /// The uniformiser π = 1 − ζ.
    pub fn pi() -> Self {
        EisensteinElem::int(1, -1)
    }

    /// Galois conjugate, ζ ↦ ζ².
    pub fn conj(&self) -> Self {
        EisensteinElem::new(&self.a - &self.b, -self.b.clone())
    }

    pub fn norm(&self) -> BigRational {
        &self.a * &self.a - &self.a * &self.b + &self.b * &self.b
    }

    /// `v_π`, normalised so v(π) = 1 and v(3) = 2. The extension is totally
    /// ramified of degree 2, so this is v₃ of the norm.
    pub fn valuation(&self) -> Option<i64> {
        rat_val(&self.norm(), 3)
    }

    /// Image in the residue field 𝔽₃ (ζ ≡ 1 mod π).
    pub fn residue(&self) -> Option<u8> {
        // {1, ζ} is an integral basis, so integrality is coordinatewise
        let a = rat_residue(&self.a, 3)?;
        let b = rat_residue(&self.b, 3)?;
        Some(((a + b) % 3) as u8)
    }

    pub fn is_rational(&self) -> bool {
        Zero::is_zero(&self.b)
    }
}

impl Add for EisensteinElem {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        EisensteinElem::new(self.a + o.a, self.b + o.b)
    }
}

impl Sub for EisensteinElem {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        EisensteinElem::new(self.a - o.a, self.b - o.b)
    }
}

impl Mul for EisensteinElem {
    type Output = Self;
    fn mul(self, o: Self) -> Self {
        let bd = &self.b * &o.b;
        EisensteinElem::new(&self.a * &o.a - &bd, &self.a * &o.b + &self.b * &o.a - bd)
    }
}

impl Neg for EisensteinElem {
    type Output = Self;
    fn neg(self) -> Self {
        EisensteinElem::new(-self.a, -self.b)
    }
}

impl Ring for EisensteinElem {
    fn zero() -> Self {
        EisensteinElem::int(0, 0)
    }
    fn one() -> Self {
        EisensteinElem::int(1, 0)
    }
    fn from_i64(n: i64) -> Self {
        EisensteinElem::int(n, 0)
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(&self.a) && Zero::is_zero(&self.b)
    }
}

impl Default for EisensteinElem {
    fn default() -> Self {
        EisensteinElem::zero()
    }
}

impl Field for EisensteinElem {
    fn inv(&self) -> Self {
        let n = self.norm();
        let c = self.conj();
        EisensteinElem::new(c.a / &n, c.b / n)
    }
}

impl fmt::Display for EisensteinElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let zero = |x: &BigRational| Zero::is_zero(x);
        match (zero(&self.a), zero(&self.b)) {
            (_, true) => write!(f, "{}", self.a),
            (true, false) if self.b.is_one() => write!(f, "z"),
            (true, false) => write!(f, "{}z", self.b),
            (false, false) => {
                let sign = if self.b.is_negative() { "-" } else { "+" };
                let m = self.b.abs();
                if m.is_one() {
                    write!(f, "{}{}z", self.a, sign)
                } else {
                    write!(f, "{}{}{}z", self.a, sign, m)
                }
            }
        }
    }
}

impl Serialize for EisensteinElem {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}
