//! Newton polygons over discretely valued fields with residue field 𝔽₃, and a
//! small Montes-style analysis of cubics: slopes, residual polynomials and
//! Taylor shifts until the cubic is seen to be ramified, unramified or
//! reducible.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_rational::Rational64;
use serde::{Serialize, Serializer};

use super::field::{EisensteinElem, Field, Ring};
use super::poly::Poly;
use crate::error::{Error, Result};

/// A field with a discrete valuation normalised to value group ℤ and residue
/// field 𝔽₃.
pub trait Valued: Field {
    fn valuation(&self) -> Option<i64>;
    /// An element of valuation 1.
    fn uniformizer() -> Self;
    /// Residue class of an integral element.
    fn residue(&self) -> Option<u8>;
}

impl Valued for EisensteinElem {
    fn valuation(&self) -> Option<i64> {
        EisensteinElem::valuation(self)
    }
    fn uniformizer() -> Self {
        EisensteinElem::pi()
    }
    fn residue(&self) -> Option<u8> {
        EisensteinElem::residue(self)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Segment {
    pub start: usize,
    pub end: usize,
    /// Rise over run of the hull edge.
    pub slope: Rational64,
}

impl Segment {
    pub fn length(&self) -> usize {
        self.end - self.start
    }

    /// Valuation of the roots this edge accounts for (the negated slope).
    pub fn root_valuation(&self) -> Rational64 {
        -self.slope
    }
}

/// Lower convex hull of `(i, v(c_i))`.
#[derive(Clone, Debug, PartialEq)]
pub struct NewtonPolygon {
    pub vertices: Vec<(usize, i64)>,
    pub segments: Vec<Segment>,
    /// Multiplicity of 0 as a root.
    pub zero_roots: usize,
}

impl NewtonPolygon {
    pub fn from_valuations(vals: &[Option<i64>]) -> Result<Self> {
        let n = vals.len();
        if n == 0 || vals[n - 1].is_none() {
            return Err(Error::invalid("Newton polygon of the zero polynomial"));
        }
        let pts: Vec<(usize, i64)> = vals
            .iter()
            .enumerate()
            .filter_map(|(i, v)| v.map(|v| (i, v)))
            .collect();
        let zero_roots = pts[0].0;
        let mut hull: Vec<(usize, i64)> = Vec::new();
        for &p in &pts {
            while hull.len() >= 2 {
                let (a, b) = (hull[hull.len() - 2], hull[hull.len() - 1]);
                // drop b unless it lies strictly below the chord a→p
                let cross = (b.0 as i64 - a.0 as i64) * (p.1 - a.1)
                    - (b.1 - a.1) * (p.0 as i64 - a.0 as i64);
                if cross <= 0 {
                    hull.pop();
                } else {
                    break;
                }
            }
            hull.push(p);
        }
        let segments = hull
            .windows(2)
            .map(|w| Segment {
                start: w[0].0,
                end: w[1].0,
                slope: Rational64::new(w[1].1 - w[0].1, (w[1].0 - w[0].0) as i64),
            })
            .collect();
        Ok(NewtonPolygon {
            vertices: hull,
            segments,
            zero_roots,
        })
    }

    pub fn of<V: Valued>(f: &Poly<V>) -> Result<Self> {
        let vals: Vec<Option<i64>> = f.coeffs().iter().map(|c| c.valuation()).collect();
        Self::from_valuations(&vals)
    }

    pub fn degree(&self) -> usize {
        self.zero_roots + self.segments.iter().map(Segment::length).sum::<usize>()
    }

    /// Root valuations with multiplicities, smallest first.
    pub fn root_valuations(&self) -> Vec<(Rational64, usize)> {
        let mut v: Vec<_> = self
            .segments
            .iter()
            .map(|s| (s.root_valuation(), s.length()))
            .collect();
        v.reverse();
        v
    }
}

impl Serialize for NewtonPolygon {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let roots: Vec<(String, usize)> = self
            .root_valuations()
            .into_iter()
            .map(|(v, m)| (v.to_string(), m))
            .collect();
        let mut st = s.serialize_struct("NewtonPolygon", 4)?;
        st.serialize_field("vertices", &self.vertices)?;
        st.serialize_field(
            "slopes",
            &self
                .segments
                .iter()
                .map(|g| (g.slope.to_string(), g.length()))
                .collect::<Vec<_>>(),
        )?;
        st.serialize_field("root_valuations", &roots)?;
        st.serialize_field("zero_roots", &self.zero_roots)?;
        st.end()
    }
}

/// Coefficients of an integral polynomial reduced to 𝔽₃, lowest first.
pub fn residue_poly<V: Valued>(f: &Poly<V>) -> Result<Vec<u8>> {
    f.coeffs()
        .iter()
        .map(|c| {
            c.residue()
                .ok_or_else(|| Error::invalid("coefficient with negative valuation"))
        })
        .collect()
}

pub fn f3_eval(f: &[u8], x: u8) -> u8 {
    f.iter()
        .rev()
        .fold(0u32, |acc, &c| (acc * x as u32 + c as u32) % 3) as u8
}

pub fn f3_roots(f: &[u8]) -> Vec<u8> {
    (0..3).filter(|&x| f3_eval(f, x) == 0).collect()
}

fn f3_derivative(f: &[u8]) -> Vec<u8> {
    f.iter()
        .enumerate()
        .skip(1)
        .map(|(i, &c)| ((i as u32 * c as u32) % 3) as u8)
        .collect()
}

/// A cubic with unit leading coefficient is irreducible over 𝔽₃ iff it has
/// no root there.
pub fn residue_cubic_irreducible<V: Valued>(f: &Poly<V>) -> Result<bool> {
    if f.degree() != Some(3) {
        return Err(Error::invalid("expected a cubic"));
    }
    let r = residue_poly(f)?;
    if r[3] == 0 {
        return Err(Error::invalid("leading coefficient is not a unit"));
    }
    Ok(f3_roots(&r).is_empty())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum CubicVerdict {
    /// One slope with denominator 3: irreducible, totally ramified.
    TotallyRamified,
    /// Integral slope and irreducible residual cubic: irreducible, unramified.
    UnramifiedIrreducible,
    /// A root in the base field (broken polygon, zero root or simple residual root).
    Reducible,
    Inconclusive,
}

impl CubicVerdict {
    pub fn irreducible(self) -> bool {
        matches!(
            self,
            CubicVerdict::TotallyRamified | CubicVerdict::UnramifiedIrreducible
        )
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Stage {
    pub newton: NewtonPolygon,
    /// Residual cubic after scaling by the root valuation, when integral.
    pub residual: Option<Vec<u8>>,
    /// Residue of the Taylor shift applied before the next stage.
    pub shift: Option<u8>,
}

#[derive(Clone, Debug, Serialize)]
pub struct CubicAnalysis {
    pub verdict: CubicVerdict,
    pub stages: Vec<Stage>,
}

const MAX_STAGES: usize = 40;

fn upow<V: Valued>(k: i64) -> V {
    let base = if k < 0 {
        V::uniformizer().inv()
    } else {
        V::uniformizer()
    };
    (0..k.unsigned_abs()).fold(V::one(), |acc, _| acc * base.clone())
}

/// Decides irreducibility of a cubic by successive approximation of a root.
///
/// Each stage reads the Newton polygon; an integral slope `k` is scaled away
/// (t = ϖᵏz) and the residual cubic over 𝔽₃ inspected. In characteristic 3
/// the residual is frequently a perfect cube (z − a)³, in which case the
/// cubic is shifted by `a` and the next stage sees the roots at closer range.
pub fn analyse_cubic<V: Valued>(f: &Poly<V>) -> Result<CubicAnalysis> {
    if f.degree() != Some(3) {
        return Err(Error::invalid("expected a cubic"));
    }
    let mut g = f.monic();
    let mut stages = Vec::new();
    for _ in 0..MAX_STAGES {
        let newton = NewtonPolygon::of(&g)?;
        let mut stage = Stage {
            newton: newton.clone(),
            residual: None,
            shift: None,
        };
        if newton.zero_roots > 0 || newton.segments.len() > 1 {
            stages.push(stage);
            return Ok(CubicAnalysis {
                verdict: CubicVerdict::Reducible,
                stages,
            });
        }
        let rv = newton.segments[0].root_valuation();
        if *rv.denom() != 1 {
            stages.push(stage);
            return Ok(CubicAnalysis {
                verdict: CubicVerdict::TotallyRamified,
                stages,
            });
        }
        let w: V = upow(rv.to_integer());
        let w3 = w.clone() * w.clone() * w.clone();
        g = g.substitute_linear(&V::zero(), &w).scale(&w3.inv());
        let res = residue_poly(&g)?;
        let roots = f3_roots(&res);
        let dres = f3_derivative(&res);
        stage.residual = Some(res);
        if roots.is_empty() {
            stages.push(stage);
            return Ok(CubicAnalysis {
                verdict: CubicVerdict::UnramifiedIrreducible,
                stages,
            });
        }
        if roots.iter().any(|&r| f3_eval(&dres, r) != 0) {
            stages.push(stage);
            return Ok(CubicAnalysis {
                verdict: CubicVerdict::Reducible,
                stages,
            });
        }
        // a single root of multiplicity 3
        let a = roots[0];
        stage.shift = Some(a);
        stages.push(stage);
        g = g.substitute_linear(&V::from_i64(a as i64), &V::one());
    }
    Ok(CubicAnalysis {
        verdict: CubicVerdict::Inconclusive,
        stages,
    })
}

/// Element of `M = F[u]/(h_P)`, F = ℚ(ζ₃), where
/// `h_P = u³ + 3(1+ζ)u² + 3(1+2ζ)u + 3ζ + 9` is Eisenstein-like at π: its
/// roots have `v_π = 2/3`, so M/F is totally ramified of degree 3.
///
/// `v_M` is normalised with `v_M(π) = 3`, `v_M(u) = 2`.
#[derive(Clone, PartialEq, Debug)]
pub struct MElem {
    pub c: [EisensteinElem; 3],
}

impl MElem {
    /// Lower coefficients of the monic modulus.
    pub fn modulus() -> [EisensteinElem; 3] {
        [
            EisensteinElem::int(9, 3),
            EisensteinElem::int(3, 6),
            EisensteinElem::int(3, 3),
        ]
    }

    pub fn modulus_poly() -> Poly<EisensteinElem> {
        let [c0, c1, c2] = Self::modulus();
        Poly::new(vec![c0, c1, c2, EisensteinElem::one()])
    }

    pub fn embed(x: EisensteinElem) -> Self {
        MElem {
            c: [x, EisensteinElem::zero(), EisensteinElem::zero()],
        }
    }

    /// The class of `u`.
    pub fn u() -> Self {
        MElem {
            c: [
                EisensteinElem::zero(),
                EisensteinElem::one(),
                EisensteinElem::zero(),
            ],
        }
    }

    #[allow(clippy::needless_range_loop)]
    fn mul_matrix(&self) -> [[EisensteinElem; 3]; 3] {
        // columns: self·1, self·u, self·u²
        let cols = [
            self.clone(),
            self.clone() * MElem::u(),
            self.clone() * MElem::u() * MElem::u(),
        ];
        let mut m: [[EisensteinElem; 3]; 3] = Default::default();
        for (j, col) in cols.iter().enumerate() {
            for i in 0..3 {
                m[i][j] = col.c[i].clone();
            }
        }
        m
    }
}

impl Add for MElem {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        let [a0, a1, a2] = self.c;
        let [b0, b1, b2] = o.c;
        MElem {
            c: [a0 + b0, a1 + b1, a2 + b2],
        }
    }
}

impl Sub for MElem {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        self + (-o)
    }
}

impl Neg for MElem {
    type Output = Self;
    fn neg(self) -> Self {
        let [a0, a1, a2] = self.c;
        MElem { c: [-a0, -a1, -a2] }
    }
}

impl Mul for MElem {
    type Output = Self;
    fn mul(self, o: Self) -> Self {
        let mut prod: Vec<EisensteinElem> = vec![EisensteinElem::zero(); 5];
        for i in 0..3 {
            for j in 0..3 {
                prod[i + j] = prod[i + j].clone() + self.c[i].clone() * o.c[j].clone();
            }
        }
        let h = MElem::modulus();
        for k in (3..5).rev() {
            let top = std::mem::take(&mut prod[k]);
            for (i, hi) in h.iter().enumerate() {
                prod[k - 3 + i] = prod[k - 3 + i].clone() - top.clone() * hi.clone();
            }
        }
        MElem {
            c: [prod[0].clone(), prod[1].clone(), prod[2].clone()],
        }
    }
}

impl Ring for MElem {
    fn zero() -> Self {
        MElem::embed(EisensteinElem::zero())
    }
    fn one() -> Self {
        MElem::embed(EisensteinElem::one())
    }
    fn from_i64(n: i64) -> Self {
        MElem::embed(EisensteinElem::from_i64(n))
    }
    fn is_zero(&self) -> bool {
        self.c.iter().all(Ring::is_zero)
    }
}

impl Field for MElem {
    /// Solves `self · x = 1` by elimination over F.
    #[allow(clippy::needless_range_loop)]
    fn inv(&self) -> Self {
        let mut m = self.mul_matrix();
        let mut rhs = [
            EisensteinElem::one(),
            EisensteinElem::zero(),
            EisensteinElem::zero(),
        ];
        for col in 0..3 {
            let piv = (col..3)
                .find(|&r| !m[r][col].is_zero())
                .expect("inverse of zero in M");
            m.swap(col, piv);
            rhs.swap(col, piv);
            let d = m[col][col].inv();
            for j in 0..3 {
                m[col][j] = m[col][j].clone() * d.clone();
            }
            rhs[col] = rhs[col].clone() * d;
            for r in 0..3 {
                if r != col && !m[r][col].is_zero() {
                    let f = m[r][col].clone();
                    for j in 0..3 {
                        m[r][j] = m[r][j].clone() - f.clone() * m[col][j].clone();
                    }
                    rhs[r] = rhs[r].clone() - f * rhs[col].clone();
                }
            }
        }
        MElem { c: rhs }
    }
}

impl Valued for MElem {
    fn valuation(&self) -> Option<i64> {
        // the three terms have distinct valuations mod 3
        self.c
            .iter()
            .enumerate()
            .filter_map(|(i, x)| x.valuation().map(|v| 3 * v + 2 * i as i64))
            .min()
    }

    /// ϖ = u²/π.
    fn uniformizer() -> Self {
        MElem::u() * MElem::u() * MElem::embed(EisensteinElem::pi().inv())
    }

    fn residue(&self) -> Option<u8> {
        match self.valuation() {
            None => Some(0),
            Some(v) if v > 0 => Some(0),
            Some(0) => self.c[0].residue(),
            Some(_) => None,
        }
    }
}

impl fmt::Display for MElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .c
            .iter()
            .enumerate()
            .filter(|(_, x)| !x.is_zero())
            .map(|(i, x)| match i {
                0 => format!("({x})"),
                1 => format!("({x})u"),
                _ => format!("({x})u^2"),
            })
            .collect();
        if parts.is_empty() {
            write!(f, "0")
        } else {
            write!(f, "{}", parts.join(" + "))
        }
    }
}

#[cfg(test)]
mod tests {

    use super::*;

    fn e(a: i64, b: i64) -> EisensteinElem {
        EisensteinElem::int(a, b)
    }

    #[test]
    fn polygon_of_h_p() {
        let np = NewtonPolygon::of(&MElem::modulus_poly()).unwrap();
        assert_eq!(np.segments.len(), 1);
        assert_eq!(np.segments[0].root_valuation(), Rational64::new(2, 3));
        assert_eq!(np.degree(), 3);
    }

    #[test]
    fn polygon_simple_cases() {
        let f = Poly::new(vec![e(216, 0), e(0, 0), e(0, 0), e(1, 0)]);
        let np = NewtonPolygon::of(&f).unwrap();
        assert_eq!(np.root_valuations(), vec![(Rational64::from_integer(2), 3)]);
        let f = Poly::new(vec![e(1, 0), e(0, 0), e(0, 0), e(1, 0)]);
        assert_eq!(
            NewtonPolygon::of(&f).unwrap().segments[0].slope,
            Rational64::from_integer(0)
        );
        // two slopes: t(t - 3)
        let f = Poly::new(vec![e(0, 0), e(-3, 0), e(1, 0)]);
        let np = NewtonPolygon::of(&f).unwrap();
        assert_eq!(np.zero_roots, 1);
        assert_eq!(np.root_valuations(), vec![(Rational64::from_integer(2), 1)]);
        assert!(NewtonPolygon::from_valuations(&[Some(1), None]).is_err());
    }

    #[test]
    fn residue_irreducibility() {
        let h_q = Poly::new(vec![e(8, 0), e(0, 0), e(0, 4), e(1, 0)]);
        assert_eq!(residue_poly(&h_q).unwrap(), vec![2, 0, 1, 1]);
        assert!(residue_cubic_irreducible(&h_q).unwrap());
        let f = Poly::new(vec![e(0, 0), e(-1, 0), e(0, 0), e(1, 0)]);
        assert!(!residue_cubic_irreducible(&f).unwrap());
        let f = Poly::new(vec![e(1, 0), e(1, 0), e(1, 0), e(1, 0)]);
        assert!(!residue_cubic_irreducible(&f).unwrap());
        let f = Poly::new(vec![
            EisensteinElem::new(
                super::super::field::ratio(1, 3),
                super::super::field::rat(0),
            ),
            e(0, 0),
            e(0, 0),
            e(1, 0),
        ]);
        assert!(residue_cubic_irreducible(&f).is_err());
    }

    #[test]
    fn m_arithmetic() {
        let u = MElem::u();
        let h = MElem::modulus_poly();
        let hu = h.coeffs().iter().rev().fold(MElem::zero(), |acc, c| {
            acc * u.clone() + MElem::embed(c.clone())
        });
        assert!(hu.is_zero());
        assert_eq!(u.valuation(), Some(2));
        assert_eq!(MElem::embed(EisensteinElem::pi()).valuation(), Some(3));
        let w = MElem::uniformizer();
        assert_eq!(w.valuation(), Some(1));
        let x = MElem {
            c: [e(2, 1), e(-1, 3), e(5, 0)],
        };
        assert_eq!(x.clone() * x.inv(), MElem::one());
    }

    #[test]
    fn engine_on_small_cubics() {
        // t³ − 3 is Eisenstein over ℚ₃, and stays ramified over F
        let f = Poly::new(vec![e(-3, 0), e(0, 0), e(0, 0), e(1, 0)]);
        assert_eq!(
            analyse_cubic(&f).unwrap().verdict,
            CubicVerdict::TotallyRamified
        );
        // t³ + 216 has the root −6
        let f = Poly::new(vec![e(216, 0), e(0, 0), e(0, 0), e(1, 0)]);
        assert_eq!(analyse_cubic(&f).unwrap().verdict, CubicVerdict::Reducible);
        // t³ − t + 1 is irreducible over 𝔽₃
        let f = Poly::new(vec![e(1, 0), e(-1, 0), e(0, 0), e(1, 0)]);
        assert_eq!(
            analyse_cubic(&f).unwrap().verdict,
            CubicVerdict::UnramifiedIrreducible
        );
    }
}
