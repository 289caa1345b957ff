//! Local analysis at 2 and 3: Tate's algorithm, the exact group law, division
//! polynomials on `y² = x³ + 54`, Newton polygons over `ℚ₃(ζ₃)` and the
//! finite certificate for the evaluation map at 3.
//!
//! Everything here is exact: rationals, pairs of rationals for `ℚ(ζ₃)`, and
//! triples of those for the cubic extension `M`. No floating point enters a
//! certificate.

mod curve;
mod field;
mod kummer3;
mod newton;
mod poly;
mod tate;

pub use curve::{Point, RationalCurve, Weierstrass};
pub use field::{rat, rat_val, ratio, EisensteinElem, Field, Ring};
pub use kummer3::*;
pub use newton::{
    analyse_cubic, residue_cubic_irreducible, residue_poly, CubicAnalysis, CubicVerdict, MElem,
    NewtonPolygon, Segment, Stage, Valued,
};
pub use poly::Poly;
pub use tate::{tate_algorithm, Kodaira, Reduction, TateReport};

/// Newton polygon of a polynomial over `ℚ(ζ₃)` with respect to `v_π`.
pub fn newton_polygon(f: &Poly<EisensteinElem>) -> crate::Result<NewtonPolygon> {
    NewtonPolygon::of(f)
}
