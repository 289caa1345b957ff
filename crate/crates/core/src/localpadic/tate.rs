//! Tate's algorithm for integral long Weierstrass models at any prime.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Serialize, Serializer};

use super::curve::RationalCurve;
use crate::arith::{inv_mod, is_prime, legendre};
use crate::error::{Error, Result};

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Kodaira {
    /// `I_n`; `I_0` is good reduction.
    I(u32),
    /// `I_n*`.
    IStar(u32),
    II,
    III,
    IV,
    IVStar,
    IIIStar,
    IIStar,
}

impl Kodaira {
    /// Components of the special fibre over the algebraic closure.
    pub fn components(self) -> u32 {
        match self {
            Kodaira::I(0) => 1,
            Kodaira::I(n) => n,
            Kodaira::IStar(n) => n + 5,
            Kodaira::II => 1,
            Kodaira::III => 2,
            Kodaira::IV => 3,
            Kodaira::IVStar => 7,
            Kodaira::IIIStar => 8,
            Kodaira::IIStar => 9,
        }
    }
}

impl fmt::Display for Kodaira {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Kodaira::I(n) => write!(f, "I{n}"),
            Kodaira::IStar(n) => write!(f, "I{n}*"),
            Kodaira::II => write!(f, "II"),
            Kodaira::III => write!(f, "III"),
            Kodaira::IV => write!(f, "IV"),
            Kodaira::IVStar => write!(f, "IV*"),
            Kodaira::IIIStar => write!(f, "III*"),
            Kodaira::IIStar => write!(f, "II*"),
        }
    }
}

impl Serialize for Kodaira {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Reduction {
    Good,
    Multiplicative,
    Additive,
}

#[derive(Clone, Debug, Serialize)]
pub struct TateReport {
    pub p: u64,
    pub kodaira: Kodaira,
    pub reduction: Reduction,
    /// Split multiplicative reduction; `None` unless multiplicative.
    pub split: Option<bool>,
    /// Tamagawa number `[E(ℚ_p) : E₀(ℚ_p)]`.
    pub component_index: u32,
    /// By Ogg's formula, `v(Δ_min) − components + 1`.
    pub conductor_exponent: u32,
    pub disc_valuation: u32,
    /// Number of `p`-scalings needed to reach a minimal model.
    pub scalings: u32,
    pub minimal_model: RationalCurve,
}

#[derive(Clone, Debug, PartialEq)]
struct Model {
    a1: BigInt,
    a2: BigInt,
    a3: BigInt,
    a4: BigInt,
    a6: BigInt,
}

impl Model {
    fn b2(&self) -> BigInt {
        &self.a1 * &self.a1 + 4 * &self.a2
    }
    fn b4(&self) -> BigInt {
        &self.a1 * &self.a3 + 2 * &self.a4
    }
    fn b6(&self) -> BigInt {
        &self.a3 * &self.a3 + 4 * &self.a6
    }
    fn b8(&self) -> BigInt {
        let Model { a1, a2, a3, a4, a6 } = self;
        a1 * a1 * a6 + 4 * a2 * a6 - a1 * a3 * a4 + a2 * a3 * a3 - a4 * a4
    }
    fn c4(&self) -> BigInt {
        let b2 = self.b2();
        &b2 * &b2 - 24 * self.b4()
    }
    fn c6(&self) -> BigInt {
        let (b2, b4, b6) = (self.b2(), self.b4(), self.b6());
        -(&b2 * &b2 * &b2) + 36 * &b2 * &b4 - 216 * b6
    }
    fn disc(&self) -> BigInt {
        let (b2, b4, b6, b8) = (self.b2(), self.b4(), self.b6(), self.b8());
        -(&b2 * &b2 * b8) - 8 * &b4 * &b4 * &b4 - 27 * &b6 * &b6 + 9 * b2 * b4 * b6
    }

    /// `x = x' + r`, `y = y' + s·x' + t`.
    fn rst(&self, r: &BigInt, s: &BigInt, t: &BigInt) -> Model {
        let Model { a1, a2, a3, a4, a6 } = self;
        Model {
            a1: a1 + 2 * s,
            a2: a2 - s * a1 + 3 * r - s * s,
            a3: a3 + r * a1 + 2 * t,
            a4: a4 - s * a3 + 2 * r * a2 - (t + r * s) * a1 + 3 * r * r - 2 * s * t,
            a6: a6 + r * a4 + r * r * a2 + r * r * r - t * a3 - t * t - r * t * a1,
        }
    }

    fn unscale(&self, p: &BigInt) -> Model {
        let p2 = p * p;
        let p3 = &p2 * p;
        Model {
            a1: &self.a1 / p,
            a2: &self.a2 / &p2,
            a3: &self.a3 / &p3,
            a4: &self.a4 / (&p2 * &p2),
            a6: &self.a6 / (&p3 * &p3),
        }
    }

    fn to_curve(&self) -> RationalCurve {
        let r = |x: &BigInt| BigRational::from_integer(x.clone());
        RationalCurve {
            a1: r(&self.a1),
            a2: r(&self.a2),
            a3: r(&self.a3),
            a4: r(&self.a4),
            a6: r(&self.a6),
        }
    }

    /// Kraus–Laska–Connell style reduction: a1, a3 ∈ {0, 1}, a2 ∈ {−1, 0, 1}.
    fn normalise(&self) -> Model {
        let two = BigInt::from(2);
        let three = BigInt::from(3);
        let s = (self.a1.mod_floor(&two) - &self.a1) / &two;
        let m = self.rst(&BigInt::zero(), &s, &BigInt::zero());
        let r = -(&m.a2 + BigInt::one()).div_floor(&three);
        let m = m.rst(&r, &BigInt::zero(), &BigInt::zero());
        let t = (m.a3.mod_floor(&two) - &m.a3) / &two;
        m.rst(&BigInt::zero(), &BigInt::zero(), &t)
    }
}

fn val(x: &BigInt, p: &BigInt) -> u32 {
    assert!(!x.is_zero());
    let mut x = x.clone();
    let mut v = 0;
    loop {
        let (q, r) = x.div_rem(p);
        if !r.is_zero() {
            return v;
        }
        x = q;
        v += 1;
    }
}

fn md(x: &BigInt, p: u64) -> u64 {
    x.mod_floor(&BigInt::from(p)).try_into().unwrap()
}

fn divides(d: &BigInt, x: &BigInt) -> bool {
    x.mod_floor(d).is_zero()
}

/// Does `a·X² + b·X + c` have a root in `𝔽_p`?
fn quad_roots(a: &BigInt, b: &BigInt, c: &BigInt, p: u64) -> bool {
    let (a, b, c) = (md(a, p), md(b, p), md(c, p));
    if p == 2 {
        return c == 0 || (a + b + c) % 2 == 0;
    }
    if a == 0 {
        return b != 0 || c == 0;
    }
    let pp = p as u128;
    let d = ((b as u128 * b as u128) % pp + pp - (4 * a as u128 % pp) * c as u128 % pp) % pp;
    legendre(d as i64, p) >= 0
}

fn cubic_roots(b: &BigInt, c: &BigInt, d: &BigInt, p: u64) -> Vec<u64> {
    let (b, c, d) = (md(b, p) as u128, md(c, p) as u128, md(d, p) as u128);
    let pp = p as u128;
    (0..p)
        .filter(|&x| {
            let x = x as u128;
            ((((x + b) % pp * x + c) % pp) * x + d).is_multiple_of(pp)
        })
        .collect()
}

/// A root of `T³ + bT² + cT + d` mod p of multiplicity ≥ 2.
fn multiple_root(b: &BigInt, c: &BigInt, d: &BigInt, p: u64) -> Option<u64> {
    let pp = p as u128;
    let (bb, cc) = (md(b, p) as u128, md(c, p) as u128);
    cubic_roots(b, c, d, p)
        .into_iter()
        .find(|&x| (3 * (x as u128) % pp * x as u128 + 2 * bb * x as u128 + cc).is_multiple_of(pp))
}

fn inv(a: &BigInt, p: u64) -> BigInt {
    BigInt::from(inv_mod(md(a, p) as i64, p).expect("unit modulo p"))
}

/// Moves a singular point of the reduction to (0, 0).
fn singular_point(m: &Model, p: u64) -> (BigInt, BigInt) {
    let big = |x: u64| BigInt::from(x);
    if p <= 3 {
        for x in 0..p {
            for y in 0..p {
                let (xb, yb) = (big(x), big(y));
                let f = &yb * &yb + &m.a1 * &xb * &yb + &m.a3 * &yb
                    - &xb * &xb * &xb
                    - &m.a2 * &xb * &xb
                    - &m.a4 * &xb
                    - &m.a6;
                let fx = &m.a1 * &yb - 3 * &xb * &xb - 2 * &m.a2 * &xb - &m.a4;
                let fy = 2 * &yb + &m.a1 * &xb + &m.a3;
                if md(&f, p) == 0 && md(&fx, p) == 0 && md(&fy, p) == 0 {
                    return (xb, yb);
                }
            }
        }
        unreachable!("reduction with p | Δ has a singular point");
    }
    // multiple root of the 2-division cubic, via Y² = X³ − 27c4·X − 54c6
    let (b2, c4, c6) = (m.b2(), m.c4(), m.c6());
    let x = if md(&c4, p) == 0 {
        -&b2 * inv(&BigInt::from(12), p)
    } else {
        -(&c6 + &b2 * &c4) * inv(&(12 * &c4), p)
    };
    let x = x.mod_floor(&big(p));
    let y = (-(&m.a1 * &x + &m.a3) * inv(&BigInt::from(2), p)).mod_floor(&big(p));
    (x, y)
}

fn integral_model(e: &RationalCurve) -> Model {
    let coeffs = e.coefficients();
    let den = coeffs
        .iter()
        .fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
    let scale = |c: &BigRational, w: u32| {
        (c * BigRational::from_integer(num_traits::pow(den.clone(), w as usize))).to_integer()
    };
    Model {
        a1: scale(&coeffs[0], 1),
        a2: scale(&coeffs[1], 2),
        a3: scale(&coeffs[2], 3),
        a4: scale(&coeffs[3], 4),
        a6: scale(&coeffs[4], 6),
    }
}

/// Reduction type, Tamagawa number and a `p`-minimal model.
///
/// Rational coefficients are first cleared by a global scaling. The returned
/// model is minimal at `p` and normalised with a1, a3 ∈ {0,1}, a2 ∈ {−1,0,1};
/// it need not be minimal at other primes.
pub fn tate_algorithm(curve: &RationalCurve, p: u64) -> Result<TateReport> {
    if !is_prime(p) {
        return Err(Error::invalid(format!("{p} is not prime")));
    }
    let pb = BigInt::from(p);
    let pow = |k: u32| num_traits::pow(pb.clone(), k as usize);
    let mut m = integral_model(curve);
    let mut scalings = 0;

    loop {
        let disc = m.disc();
        let vd = val(&disc, &pb);
        let report = |kodaira: Kodaira, reduction, split, c: u32, m: &Model, scalings| {
            let f = vd + 1 - kodaira.components();
            TateReport {
                p,
                kodaira,
                reduction,
                split,
                component_index: c,
                conductor_exponent: f,
                disc_valuation: vd,
                scalings,
                minimal_model: m.normalise().to_curve(),
            }
        };
        if vd == 0 {
            return Ok(report(
                Kodaira::I(0),
                Reduction::Good,
                None,
                1,
                &m,
                scalings,
            ));
        }

        let (r, t) = singular_point(&m, p);
        m = m.rst(&r, &BigInt::zero(), &t);

        // multiplicative
        if md(&m.b2(), p) != 0 {
            let split = quad_roots(&BigInt::one(), &m.a1, &-&m.a2, p);
            let c = if split {
                vd
            } else if vd.is_multiple_of(2) {
                2
            } else {
                1
            };
            return Ok(report(
                Kodaira::I(vd),
                Reduction::Multiplicative,
                Some(split),
                c,
                &m,
                scalings,
            ));
        }
        if !divides(&pow(2), &m.a6) {
            return Ok(report(
                Kodaira::II,
                Reduction::Additive,
                None,
                1,
                &m,
                scalings,
            ));
        }
        if !divides(&pow(3), &m.b8()) {
            return Ok(report(
                Kodaira::III,
                Reduction::Additive,
                None,
                2,
                &m,
                scalings,
            ));
        }
        if !divides(&pow(3), &m.b6()) {
            let c = if quad_roots(&BigInt::one(), &(&m.a3 / &pb), &-(&m.a6 / pow(2)), p) {
                3
            } else {
                1
            };
            return Ok(report(
                Kodaira::IV,
                Reduction::Additive,
                None,
                c,
                &m,
                scalings,
            ));
        }

        // now p | a1, a2; p² | a3, a4; p³ | a6
        let (s, t) = if p == 2 {
            (
                m.a2.mod_floor(&pb),
                2 * (&m.a6 / BigInt::from(4)).mod_floor(&pb),
            )
        } else {
            let half = inv(&BigInt::from(2), p);
            (-&m.a1 * &half, -&m.a3 * &half)
        };
        m = m.rst(&BigInt::zero(), &s, &t);
        let (b, c, d) = (&m.a2 / &pb, &m.a4 / pow(2), &m.a6 / pow(3));
        let roots = cubic_roots(&b, &c, &d, p);
        let dbl = multiple_root(&b, &c, &d, p);

        match dbl {
            None => {
                return Ok(report(
                    Kodaira::IStar(0),
                    Reduction::Additive,
                    None,
                    1 + roots.len() as u32,
                    &m,
                    scalings,
                ));
            }
            Some(root) if roots.len() == 2 => {
                m = m.rst(&(&pb * root), &BigInt::zero(), &BigInt::zero());
                let (mut ix, mut iy) = (3u32, 3u32);
                let (mut mx, mut my) = (pow(2), pow(2));
                let c = loop {
                    let a3t = &m.a3 / &my;
                    let a6t = &m.a6 / (&mx * &my);
                    if md(&(&a3t * &a3t + 4 * &a6t), p) != 0 {
                        break if quad_roots(&BigInt::one(), &a3t, &-&a6t, p) {
                            4
                        } else {
                            2
                        };
                    }
                    let y0 = if p == 2 {
                        a6t.mod_floor(&pb)
                    } else {
                        (-&a3t * inv(&BigInt::from(2), p)).mod_floor(&pb)
                    };
                    m = m.rst(&BigInt::zero(), &BigInt::zero(), &(&my * y0));
                    my = &my * &pb;
                    iy += 1;
                    let a2t = &m.a2 / &pb;
                    let a4t = &m.a4 / (&pb * &mx);
                    let a6t = &m.a6 / (&mx * &my);
                    if md(&(&a4t * &a4t - 4 * &a2t * &a6t), p) != 0 {
                        break if quad_roots(&a2t, &a4t, &a6t, p) {
                            4
                        } else {
                            2
                        };
                    }
                    let x0 = if p == 2 {
                        (&a6t * &a2t).mod_floor(&pb)
                    } else {
                        (-&a4t * inv(&(2 * &a2t), p)).mod_floor(&pb)
                    };
                    m = m.rst(&(&mx * x0), &BigInt::zero(), &BigInt::zero());
                    mx = &mx * &pb;
                    ix += 1;
                };
                let n = ix + iy - 5;
                return Ok(report(
                    Kodaira::IStar(n),
                    Reduction::Additive,
                    None,
                    c,
                    &m,
                    scalings,
                ));
            }
            Some(root) => {
                // triple root
                m = m.rst(&(&pb * root), &BigInt::zero(), &BigInt::zero());
                let a3t = &m.a3 / pow(2);
                let a6t = &m.a6 / pow(4);
                if md(&(&a3t * &a3t + 4 * &a6t), p) != 0 {
                    let c = if quad_roots(&BigInt::one(), &a3t, &-&a6t, p) {
                        3
                    } else {
                        1
                    };
                    return Ok(report(
                        Kodaira::IVStar,
                        Reduction::Additive,
                        None,
                        c,
                        &m,
                        scalings,
                    ));
                }
                let y0 = if p == 2 {
                    a6t.mod_floor(&pb)
                } else {
                    (-&a3t * inv(&BigInt::from(2), p)).mod_floor(&pb)
                };
                m = m.rst(&BigInt::zero(), &BigInt::zero(), &(pow(2) * y0));
                if !divides(&pow(4), &m.a4) {
                    return Ok(report(
                        Kodaira::IIIStar,
                        Reduction::Additive,
                        None,
                        2,
                        &m,
                        scalings,
                    ));
                }
                if !divides(&pow(6), &m.a6) {
                    return Ok(report(
                        Kodaira::IIStar,
                        Reduction::Additive,
                        None,
                        1,
                        &m,
                        scalings,
                    ));
                }
                m = m.unscale(&pb);
                scalings += 1;
            }
        }
    }
}
