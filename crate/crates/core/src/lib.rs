//! Transcendental Brauer groups of `E x E` for elliptic curves with complex
//! multiplication by the maximal order of an imaginary quadratic field.
//!
//! The crate is organised bottom-up:
//!
//! * [`quadfield`] - imaginary quadratic fields, orders, class numbers and
//!   ring class field degrees.
//! * [`quadint`] - Gaussian and Eisenstein integers, primary primes and power
//!   residue symbols.
//! * [`grossenchar`] - Grössencharacter values for `y^2 = x^3 + D` and
//!   `y^2 = x^3 - Dx`, and empirical estimates of `m(l)`.
//! * [`brauer`] - closed-form `m(l)` and the group structures of the
//!   transcendental and geometric Brauer groups.
//! * [`matrixcert`] - exhaustive verification over `M_2(Z/l^k)` of the
//!   endomorphism lemmas behind those structures.
//! * [`localpadic`] - Tate's algorithm, exact group law, Newton polygons over
//!   `Q_3(zeta_3)` and the finite certificate for the 3-adic evaluation map.

pub mod arith;
pub mod brauer;
mod error;
pub mod grossenchar;
pub mod localpadic;
pub mod matrixcert;
pub mod quadfield;
pub mod quadint;

pub use brauer::{BrauerStructure, CurveContext, Provenance};
pub use error::{Error, Result};
pub use grossenchar::{CurveJ0, CurveJ1728, Family, PsiSample};
pub use matrixcert::{Mat2ModN, TauModel};
pub use quadfield::{ImQuadField, NValue, OrderInField};
pub use quadint::{Basis, QuadInt, Symbol, UnitRoot};
