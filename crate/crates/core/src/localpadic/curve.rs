//! Long Weierstrass curves and the exact chord–tangent group law.

use std::fmt;

use num_rational::BigRational;
use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

use super::field::{rat, Field};
use crate::error::{Error, Result};

/// `y² + a1·xy + a3·y = x³ + a2·x² + a4·x + a6`.
#[derive(Clone, PartialEq, Debug)]
pub struct Weierstrass<F> {
    pub a1: F,
    pub a2: F,
    pub a3: F,
    pub a4: F,
    pub a6: F,
}

pub type RationalCurve = Weierstrass<BigRational>;

#[derive(Clone, PartialEq, Debug)]
pub enum Point<F> {
    Infinity,
    Affine { x: F, y: F },
}

impl<F> Point<F> {
    pub fn affine(x: F, y: F) -> Self {
        Point::Affine { x, y }
    }

    pub fn is_infinity(&self) -> bool {
        matches!(self, Point::Infinity)
    }

    pub fn coords(&self) -> Option<(&F, &F)> {
        match self {
            Point::Infinity => None,
            Point::Affine { x, y } => Some((x, y)),
        }
    }
}

impl<F: Field> Weierstrass<F> {
    pub fn new(a1: F, a2: F, a3: F, a4: F, a6: F) -> Result<Self> {
        let e = Weierstrass { a1, a2, a3, a4, a6 };
        if e.discriminant().is_zero() {
            return Err(Error::invalid(
                "singular Weierstrass model (discriminant 0)",
            ));
        }
        Ok(e)
    }

    /// `y² = x³ + a4·x + a6`.
    pub fn short(a4: F, a6: F) -> Result<Self> {
        Self::new(F::zero(), F::zero(), F::zero(), a4, a6)
    }

    pub fn b2(&self) -> F {
        self.a1.clone() * self.a1.clone() + F::from_i64(4) * self.a2.clone()
    }

    pub fn b4(&self) -> F {
        self.a1.clone() * self.a3.clone() + F::from_i64(2) * self.a4.clone()
    }

    pub fn b6(&self) -> F {
        self.a3.clone() * self.a3.clone() + F::from_i64(4) * self.a6.clone()
    }

    pub fn b8(&self) -> F {
        let (a1, a2, a3, a4, a6) = self.parts();
        a1.clone() * a1.clone() * a6.clone() + F::from_i64(4) * a2.clone() * a6
            - a1 * a3.clone() * a4.clone()
            + a2 * a3.clone() * a3
            - a4.clone() * a4
    }

    pub fn c4(&self) -> F {
        let b2 = self.b2();
        b2.clone() * b2 - F::from_i64(24) * self.b4()
    }

    pub fn c6(&self) -> F {
        let (b2, b4, b6) = (self.b2(), self.b4(), self.b6());
        -(b2.clone() * b2.clone() * b2.clone()) + F::from_i64(36) * b2 * b4 - F::from_i64(216) * b6
    }

    pub fn discriminant(&self) -> F {
        let (b2, b4, b6, b8) = (self.b2(), self.b4(), self.b6(), self.b8());
        -(b2.clone() * b2.clone() * b8)
            - F::from_i64(8) * b4.clone() * b4.clone() * b4.clone()
            - F::from_i64(27) * b6.clone() * b6.clone()
            + F::from_i64(9) * b2 * b4 * b6
    }

    fn parts(&self) -> (F, F, F, F, F) {
        (
            self.a1.clone(),
            self.a2.clone(),
            self.a3.clone(),
            self.a4.clone(),
            self.a6.clone(),
        )
    }

    pub fn contains(&self, p: &Point<F>) -> bool {
        match p {
            Point::Infinity => true,
            Point::Affine { x, y } => {
                let (a1, a2, a3, a4, a6) = self.parts();
                let (x, y) = (x.clone(), y.clone());
                let lhs = y.clone() * y.clone() + a1 * x.clone() * y.clone() + a3 * y;
                let rhs =
                    x.clone() * x.clone() * x.clone() + a2 * x.clone() * x.clone() + a4 * x + a6;
                lhs == rhs
            }
        }
    }

    pub fn neg(&self, p: &Point<F>) -> Point<F> {
        match p {
            Point::Infinity => Point::Infinity,
            Point::Affine { x, y } => Point::affine(
                x.clone(),
                -y.clone() - self.a1.clone() * x.clone() - self.a3.clone(),
            ),
        }
    }

    pub fn add(&self, p: &Point<F>, q: &Point<F>) -> Point<F> {
        let ((x1, y1), (x2, y2)) = match (p.coords(), q.coords()) {
            (None, _) => return q.clone(),
            (_, None) => return p.clone(),
            (Some(a), Some(b)) => (a, b),
        };
        let (a1, a2, a3, a4, _) = self.parts();
        let (lambda, nu) = if x1 == x2 {
            if *q == self.neg(p) {
                return Point::Infinity;
            }
            let num = F::from_i64(3) * x1.clone() * x1.clone()
                + F::from_i64(2) * a2.clone() * x1.clone()
                + a4.clone()
                - a1.clone() * y1.clone();
            let den = F::from_i64(2) * y1.clone() + a1.clone() * x1.clone() + a3.clone();
            let lambda = num * den.inv();
            let nu = y1.clone() - lambda.clone() * x1.clone();
            (lambda, nu)
        } else {
            let lambda = (y2.clone() - y1.clone()) * (x2.clone() - x1.clone()).inv();
            let nu = y1.clone() - lambda.clone() * x1.clone();
            (lambda, nu)
        };
        let x3 = lambda.clone() * lambda.clone() + a1.clone() * lambda.clone()
            - a2
            - x1.clone()
            - x2.clone();
        let y3 = -(lambda + a1) * x3.clone() - nu - a3;
        Point::affine(x3, y3)
    }

    pub fn double(&self, p: &Point<F>) -> Point<F> {
        self.add(p, p)
    }

    /// `[n]P` by double-and-add; negative `n` negates.
    pub fn mul(&self, n: i64, p: &Point<F>) -> Point<F> {
        let mut acc = Point::Infinity;
        let mut base = if n < 0 { self.neg(p) } else { p.clone() };
        let mut k = n.unsigned_abs();
        while k > 0 {
            if k & 1 == 1 {
                acc = self.add(&acc, &base);
            }
            base = self.double(&base);
            k >>= 1;
        }
        acc
    }

    /// `3P` as `2P + P`; returns `Infinity` when `P` is 3-torsion.
    pub fn triple(&self, p: &Point<F>) -> Result<Point<F>> {
        if !self.contains(p) {
            return Err(Error::invalid("point is not on the curve"));
        }
        Ok(self.add(&self.double(p), p))
    }
}

impl RationalCurve {
    pub fn from_ints(a: [i64; 5]) -> Result<Self> {
        Self::new(rat(a[0]), rat(a[1]), rat(a[2]), rat(a[3]), rat(a[4]))
    }

    /// The twists `y² = x³ + c` used throughout the local analysis.
    pub fn mordell(c: i64) -> Result<Self> {
        Self::from_ints([0, 0, 0, 0, c])
    }

    pub fn coefficients(&self) -> [BigRational; 5] {
        [
            self.a1.clone(),
            self.a2.clone(),
            self.a3.clone(),
            self.a4.clone(),
            self.a6.clone(),
        ]
    }
}

impl<F: fmt::Display + Field> fmt::Display for Weierstrass<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut lhs = String::from("y^2");
        let mut rhs = String::from("x^3");
        let term = |s: &mut String, c: &F, mono: &str| {
            if c.is_zero() {
                return;
            }
            let c = c.to_string();
            let (sign, mag) = match c.strip_prefix('-') {
                Some(m) if !m.contains(['+', '-']) => ("-", m.to_string()),
                _ => ("+", c.clone()),
            };
            let body = match (mag.as_str(), mono) {
                (m, "") => m.to_string(),
                ("1", mono) => mono.to_string(),
                (m, mono) if m.contains(['+', '-']) => format!("({m})*{mono}"),
                (m, mono) => format!("{m}*{mono}"),
            };
            s.push_str(&format!(" {sign} {body}"));
        };
        term(&mut lhs, &self.a1, "x*y");
        term(&mut lhs, &self.a3, "y");
        term(&mut rhs, &self.a2, "x^2");
        term(&mut rhs, &self.a4, "x");
        term(&mut rhs, &self.a6, "");
        write!(f, "{lhs} = {rhs}")
    }
}

impl<F: fmt::Display> Serialize for Weierstrass<F> {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut st = s.serialize_struct("Weierstrass", 5)?;
        st.serialize_field("a1", &self.a1.to_string())?;
        st.serialize_field("a2", &self.a2.to_string())?;
        st.serialize_field("a3", &self.a3.to_string())?;
        st.serialize_field("a4", &self.a4.to_string())?;
        st.serialize_field("a6", &self.a6.to_string())?;
        st.end()
    }
}

impl<F: fmt::Display> fmt::Display for Point<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Point::Infinity => write!(f, "O"),
            Point::Affine { x, y } => write!(f, "({x}, {y})"),
        }
    }
}

impl<F: fmt::Display> Serialize for Point<F> {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}
