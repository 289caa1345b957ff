//! The 3-adic analysis of `u² = (x³ + 2)(t³ + 2)`: division polynomials on
//! `E: y² = x³ + 54`, ramification of the `(1 − ζ)`-division fields over
//! `F = ℚ₃(ζ₃)`, the finite certificate that the evaluation map at 3 is
//! surjective, and the checks away from 3.

use std::collections::BTreeMap;

use num_rational::{BigRational, Rational64};
use rayon::prelude::*;
use serde::Serialize;

use super::curve::{Point, RationalCurve, Weierstrass};
use super::field::{rat, rat_residue, rat_val, EisensteinElem, Field, Ring};
use super::newton::{
    analyse_cubic, residue_poly, CubicAnalysis, CubicVerdict, MElem, NewtonPolygon,
};
use super::poly::Poly;
use super::tate::{tate_algorithm, Reduction, TateReport};
use crate::brauer::Provenance;
use crate::error::{Error, Result};

/// The constant of `E: y² = x³ + 54` (the curve `x³ + 2` twisted by 3).
pub const CURVE_CONSTANT: i64 = 54;

pub fn curve() -> RationalCurve {
    RationalCurve::mordell(CURVE_CONSTANT).expect("nonsingular")
}

/// `P = (3, 9)`.
pub fn point_p() -> Point<BigRational> {
    Point::affine(rat(3), rat(9))
}

/// Degree-9 polynomial whose roots are the `x(R)` with `3R = T`:
/// `9t²(t − x_T)(t³ + 216)² − 8(t³ + 54)(t⁶ + 1080t³ − 23328)`.
pub fn f_division_poly(x_t: &BigRational) -> Poly<BigRational> {
    let t = Poly::<BigRational>::x();
    let c = |n: i64| Poly::constant(rat(n));
    let t3 = t.pow(3);
    let lhs = c(9)
        .mul(&t.pow(2))
        .mul(&t.sub(&Poly::constant(x_t.clone())))
        .mul(&t3.add(&c(216)).pow(2));
    let rhs = c(8)
        .mul(&t3.add(&c(54)))
        .mul(&t.pow(6).add(&t3.scale(&rat(1080))).sub(&c(23328)));
    lhs.sub(&rhs)
}

/// `g_T(t) = t³ + 3ζ·x_T·t² + 216`, whose roots are the `x(S)` with
/// `(1 − ζ)S = T`.
pub fn g_division_poly(x_t: &EisensteinElem) -> Poly<EisensteinElem> {
    Poly::new(vec![
        EisensteinElem::from_i64(216),
        EisensteinElem::zero(),
        EisensteinElem::int(0, 3) * x_t.clone(),
        EisensteinElem::one(),
    ])
}

/// `[ζ](x, y) = (ζx, y)` on `y² = x³ + c`.
pub fn zeta_action(p: &Point<EisensteinElem>) -> Point<EisensteinElem> {
    match p {
        Point::Infinity => Point::Infinity,
        Point::Affine { x, y } => Point::affine(EisensteinElem::zeta() * x.clone(), y.clone()),
    }
}

/// The curve over ℚ(ζ₃).
pub fn curve_over_f() -> Weierstrass<EisensteinElem> {
    Weierstrass::short(
        EisensteinElem::zero(),
        EisensteinElem::from_i64(CURVE_CONSTANT),
    )
    .expect("nonsingular")
}

/// Discriminant of a monic cubic `t³ + at² + bt + c`.
pub fn cubic_discriminant<T: Ring>(f: &Poly<T>) -> T {
    let (a, b, c) = (f.coeff(2), f.coeff(1), f.coeff(0));
    let n = T::from_i64;
    a.clone() * a.clone() * b.clone() * b.clone()
        - n(4) * b.clone() * b.clone() * b.clone()
        - n(4) * a.clone() * a.clone() * a.clone() * c.clone()
        - n(27) * c.clone() * c.clone()
        + n(18) * a * b * c
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Ramification {
    Ramified,
    Unramified,
    Inconclusive,
}

/// `h(u) = g(3(u + shift))/27`, the hand substitution for one root cluster.
#[derive(Clone, Debug, Serialize)]
pub struct Substitution {
    pub shift: i64,
    pub h: String,
    pub newton: NewtonPolygon,
    pub residual: Option<Vec<u8>>,
    pub residual_irreducible: Option<bool>,
}

#[derive(Clone, Debug, Serialize)]
pub struct RamificationReport {
    pub x_t: EisensteinElem,
    pub g: String,
    pub g_coefficients: Vec<EisensteinElem>,
    pub separable: bool,
    pub verdict: Ramification,
    /// `g_T` has a root in F, so it defines no cubic extension at all.
    pub degenerate: bool,
    pub note: Option<String>,
    pub analysis: CubicAnalysis,
    pub substitutions: Vec<Substitution>,
}

fn substitution(g: &Poly<EisensteinElem>, shift: i64) -> Result<Substitution> {
    let three = EisensteinElem::from_i64(3);
    let h = g
        .substitute_linear(&EisensteinElem::from_i64(3 * shift), &three)
        .scale(&EisensteinElem::from_i64(27).inv());
    let residual = residue_poly(&h).ok();
    let residual_irreducible = residual
        .as_ref()
        .filter(|r| r.len() == 4 && r[3] != 0)
        .map(|r| super::newton::f3_roots(r).is_empty());
    Ok(Substitution {
        shift,
        h: h.to_string().replace('t', "u"),
        newton: NewtonPolygon::of(&h)?,
        residual,
        residual_irreducible,
    })
}

/// Is `F(S)/F` ramified, for `(1 − ζ)S = T`?
///
/// The verdict comes from [`analyse_cubic`] on `g_T`. The substitutions
/// `t = 3u` and `t = 3(u + 1)` are recorded alongside as independent evidence:
/// a slope with denominator 3 after either one means ramified, an
/// irreducible residual cubic means unramified.
pub fn ramification_report(x_t: &EisensteinElem) -> Result<RamificationReport> {
    let g = g_division_poly(x_t);
    let analysis = analyse_cubic(&g)?;
    let (verdict, degenerate, note) = match analysis.verdict {
        CubicVerdict::TotallyRamified => (Ramification::Ramified, false, None),
        CubicVerdict::UnramifiedIrreducible => (Ramification::Unramified, false, None),
        CubicVerdict::Reducible => (
            Ramification::Inconclusive,
            true,
            Some("g_T has a root in Q3(zeta3); T is (1-zeta)-divisible over the base and no cubic extension arises".to_string()),
        ),
        CubicVerdict::Inconclusive => (Ramification::Inconclusive, false, Some("stage limit reached".to_string())),
    };
    let substitutions = [0, 1]
        .iter()
        .map(|&s| substitution(&g, s))
        .collect::<Result<Vec<_>>>()?;
    Ok(RamificationReport {
        x_t: x_t.clone(),
        g: g.to_string(),
        g_coefficients: g.coeffs().to_vec(),
        separable: !cubic_discriminant(&g).is_zero(),
        verdict,
        degenerate,
        note,
        analysis,
        substitutions,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum FpFlag {
    /// Certify by the two-step division route.
    Auto,
    /// Accept irreducibility of `f_P` over ℚ₃ as an external fact.
    Assume,
}

#[derive(Clone, Debug, Serialize)]
pub struct FpIrreducibility {
    pub flag: FpFlag,
    pub irreducible: bool,
    pub provenance: Provenance,
    /// First step: `[F(S_P) : F] = 3`.
    pub first_step: Option<CubicVerdict>,
    /// Second step: `k(t) = t³ + 3ζ²·s·t² + 216` over `M = F(s)`, `s = x(S_P) = 3(u+1)`.
    pub second_step: Option<CubicAnalysis>,
    /// `k` divides `f_P` in `M[t]`, so its roots are among the `x(R)`, `3R = P`.
    pub k_divides_f: Option<bool>,
    pub cited: Vec<String>,
}

/// Root of `h_P` in M, pushed back to `s = x(S_P)`.
fn s_in_m() -> MElem {
    MElem::from_i64(3) * (MElem::u() + MElem::one())
}

/// The cubic over M satisfied by `x(R)` where `(1 − ζ²)R = S_P`.
pub fn second_step_cubic() -> Poly<MElem> {
    let zeta2 = EisensteinElem::zeta() * EisensteinElem::zeta();
    let a2 = MElem::embed(EisensteinElem::from_i64(3) * zeta2) * s_in_m();
    Poly::new(vec![MElem::from_i64(216), MElem::zero(), a2, MElem::one()])
}

/// Irreducibility of `f_P` over ℚ₃ (degree 9).
///
/// Since `3 = (1 − ζ)(1 − ζ²)`, a root `x(R)` of `f_P` is reached in two
/// cubic steps: `S = (1 − ζ²)R` with `(1 − ζ)S = P`. If `g_P` is irreducible
/// over F and the second cubic is irreducible over `M = F(x(S))`, then
/// `[F(x(R)) : F] = 9`, so `f_P` is irreducible over F and a fortiori over ℚ₃.
pub fn fp_irreducibility(flag: FpFlag) -> Result<FpIrreducibility> {
    let cited_field =
        "F(x(R)) = F(R) contains F(S) for S = (1-zeta^2)R, since P is not 2-torsion".to_string();
    if flag == FpFlag::Assume {
        return Ok(FpIrreducibility {
            flag,
            irreducible: true,
            provenance: Provenance::Cited,
            first_step: None,
            second_step: None,
            k_divides_f: None,
            cited: vec![
                "f_P is irreducible over Q3 (external computer-algebra factorisation)".to_string(),
            ],
        });
    }
    let first = analyse_cubic(&g_division_poly(&EisensteinElem::from_i64(3)))?.verdict;
    let k = second_step_cubic();
    let f: Poly<MElem> = Poly::new(
        f_division_poly(&rat(3))
            .coeffs()
            .iter()
            .map(|c| MElem::embed(EisensteinElem::rational(c.clone())))
            .collect(),
    );
    let divides = f.rem_monic(&k).is_zero();
    let second = analyse_cubic(&k)?;
    let irreducible = first.irreducible() && divides && second.verdict.irreducible();
    Ok(FpIrreducibility {
        flag,
        irreducible,
        provenance: Provenance::Exhaustive,
        first_step: Some(first),
        second_step: Some(second),
        k_divides_f: Some(divides),
        cited: vec![cited_field],
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Facts {
    pub g_p_ramified: bool,
    pub g_q_unramified: bool,
    pub f_p_irreducible: bool,
}

type V2 = [u8; 2];
type M2 = [[u8; 2]; 2];

fn mv(m: &M2, v: &V2) -> V2 {
    [
        ((m[0][0] * v[0] + m[0][1] * v[1]) % 3),
        ((m[1][0] * v[0] + m[1][1] * v[1]) % 3),
    ]
}

fn mm(a: &M2, b: &M2) -> M2 {
    let mut c = [[0u8; 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            c[i][j] = (0..2).map(|k| a[i][k] * b[k][j]).sum::<u8>() % 3;
        }
    }
    c
}

fn signed(x: u8) -> i8 {
    if x == 2 {
        -1
    } else {
        x as i8
    }
}

/// ζ acting on `E[3] ≅ 𝔽₃²`: `Z = [[1,1],[0,1]]`, so `Z² + Z + 1 = 0` and
/// `ker(Z − 1) = E[1 − ζ] = ⟨e₁⟩`.
pub const ZETA_MATRIX: M2 = [[1, 1], [0, 1]];

/// Invertible θ with `θZ = Z²θ`: the possible actions of an element of
/// `Gal(F̄/ℚ₃)` restricting to complex conjugation on F.
pub fn semilinear_involutions() -> Vec<M2> {
    let z2 = mm(&ZETA_MATRIX, &ZETA_MATRIX);
    let mut out = Vec::new();
    for code in 0..81u32 {
        let d = |i: u32| ((code / 3u32.pow(i)) % 3) as u8;
        let t = [[d(0), d(1)], [d(2), d(3)]];
        let det = (t[0][0] * t[1][1] + 3 - (t[0][1] * t[1][0]) % 3) % 3;
        if det != 0 && mm(&t, &ZETA_MATRIX) == mm(&z2, &t) {
            out.push(t);
        }
    }
    out
}

fn in_kernel(v: &V2) -> bool {
    v[1] == 0
}

#[derive(Clone, Debug, Serialize)]
pub struct Kill {
    pub theta: M2,
    /// A value `χ_P(ρ) ∉ E[1−ζ]` with `θ(T) ≠ a·T`.
    pub t: V2,
    pub theta_t: V2,
}

#[derive(Clone, Debug, Serialize)]
pub struct SignBranch {
    /// θ acts on `E[1 − ζ]` as multiplication by ε.
    pub epsilon: i8,
    pub thetas: Vec<M2>,
    pub configurations: usize,
    /// Pairs `(a, b)` consistent with `θχ_P(σ) = aχ_P(σ) + bχ_Q(σ)` for every
    /// θ and every admissible `(χ_P(σ), χ_Q(σ))`, written with signs.
    pub survivors: Vec<(i8, i8)>,
    /// For each θ, a value of `χ_P(ρ)` violating `θ(T) = a·T`.
    pub kills: Vec<Kill>,
    pub contradiction: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct TorsionPointCheck {
    pub x: EisensteinElem,
    #[serde(serialize_with = "super::field::display")]
    pub y_squared: BigRational,
    pub on_curve: bool,
    pub outside_kernel: bool,
    pub x_of_theta_t: EisensteinElem,
    pub x_of_minus_t: EisensteinElem,
    pub theta_t_differs_from_minus_t: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct SurjectivityCertificate {
    pub facts: Facts,
    pub zeta_matrix: M2,
    pub branches: Vec<SignBranch>,
    pub torsion_point: TorsionPointCheck,
    pub conclusion: String,
}

fn branch(epsilon: u8, thetas: Vec<M2>) -> SignBranch {
    let all: Vec<V2> = (0..3).flat_map(|a| (0..3).map(move |b| [a, b])).collect();
    let nonzero_kernel: Vec<V2> = all
        .iter()
        .copied()
        .filter(|v| in_kernel(v) && *v != [0, 0])
        .collect();
    let outside: Vec<V2> = all.iter().copied().filter(|v| !in_kernel(v)).collect();
    let pairs: Vec<(u8, u8)> = (0..3).flat_map(|a| (0..3).map(move |b| (a, b))).collect();

    let mut configs: Vec<(M2, V2, V2)> = Vec::new();
    for t in &thetas {
        for x in &nonzero_kernel {
            for y in &outside {
                configs.push((*t, *x, *y));
            }
        }
    }
    // (a, b) survives if it is consistent with every configuration
    let survivors: Vec<(u8, u8)> = pairs
        .par_iter()
        .copied()
        .filter(|&(a, b)| {
            configs.iter().all(|(t, x, y)| {
                let lhs = mv(t, x);
                let rhs = [(a * x[0] + b * y[0]) % 3, (a * x[1] + b * y[1]) % 3];
                lhs == rhs
            })
        })
        .collect();

    let kills: Vec<Kill> = thetas
        .iter()
        .filter_map(|t| {
            survivors.first().and_then(|&(a, _)| {
                outside.iter().find_map(|v| {
                    let tv = mv(t, v);
                    (tv != [(a * v[0]) % 3, (a * v[1]) % 3]).then_some(Kill {
                        theta: *t,
                        t: *v,
                        theta_t: tv,
                    })
                })
            })
        })
        .collect();
    let contradiction =
        survivors.is_empty() || (survivors.len() == 1 && kills.len() == thetas.len());
    SignBranch {
        epsilon: signed(epsilon),
        thetas,
        configurations: configs.len(),
        survivors: survivors
            .iter()
            .map(|&(a, b)| (signed(a), signed(b)))
            .collect(),
        kills,
        contradiction,
    }
}

/// `T = (−6ζ, 9√−2)`: θ = complex conjugation sends it to a point with
/// x-coordinate `−6ζ²`, while `−T` keeps `x = −6ζ`.
fn torsion_point_check() -> TorsionPointCheck {
    let x = EisensteinElem::from_i64(-6) * EisensteinElem::zeta();
    let rhs = x.clone() * x.clone() * x.clone() + EisensteinElem::from_i64(CURVE_CONSTANT);
    let y_squared = rat(-162);
    let on_curve = rhs == EisensteinElem::rational(y_squared.clone());
    let x_theta = x.conj();
    TorsionPointCheck {
        outside_kernel: !x.is_zero(),
        x_of_theta_t: x_theta.clone(),
        x_of_minus_t: x.clone(),
        theta_t_differs_from_minus_t: x_theta != x,
        x,
        y_squared,
        on_curve,
    }
}

/// Finite certificate that no θ-twist relation `θ∘χ_P = aχ_P + bχ_Q` holds.
///
/// Model `E[3] ≅ 𝔽₃²` with ζ acting by [`ZETA_MATRIX`]. The facts supply
/// σ with `χ_P(σ) ∈ E[1−ζ]∖0`, `χ_Q(σ) ∉ E[1−ζ]` (ramified `g_P`,
/// unramified `g_Q`) and ρ with `χ_P(ρ) ∉ E[1−ζ]` (irreducible `f_P`). For
/// each sign ε of θ on `E[1−ζ]`, the first constraint forces `(a, b) = (ε, 0)`,
/// and then `θ(T) = εT` fails for every `T ∉ E[1−ζ]`.
pub fn surjectivity_certificate(facts: Facts) -> Result<SurjectivityCertificate> {
    let mut missing = Vec::new();
    if !facts.g_p_ramified {
        missing.push("g_P does not define a ramified extension");
    }
    if !facts.g_q_unramified {
        missing.push("g_Q does not define an unramified extension");
    }
    if !facts.f_p_irreducible {
        missing.push("f_P is not known to be irreducible over Q3");
    }
    if !missing.is_empty() {
        return Err(Error::CertificateWithheld(missing.join("; ")));
    }
    let thetas = semilinear_involutions();
    let branches: Vec<SignBranch> = [2u8, 1]
        .iter()
        .map(|&eps| {
            branch(
                eps,
                thetas.iter().copied().filter(|t| t[0][0] == eps).collect(),
            )
        })
        .collect();
    let torsion_point = torsion_point_check();
    let all =
        branches.iter().all(|b| b.contradiction) && torsion_point.theta_t_differs_from_minus_t;
    let conclusion = if all {
        "no consistent (a,b); evaluation map surjective".to_string()
    } else {
        "contradiction not reached".to_string()
    };
    Ok(SurjectivityCertificate {
        facts,
        zeta_matrix: ZETA_MATRIX,
        branches,
        torsion_point,
        conclusion,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct Mod3Quotient {
    pub tate: TateReport,
    pub p: Point<BigRational>,
    pub p_reduces_to_singular_point: bool,
    #[serde(serialize_with = "super::field::display")]
    pub q_x: BigRational,
    #[serde(serialize_with = "super::field::display")]
    pub q_y_squared: BigRational,
    /// `y² ≡ 1 mod 3` has the simple roots ±1, so Hensel lifts them to ℤ₃.
    pub q_hensel: bool,
    pub q_reduction_nonsingular: bool,
    pub three_p: Point<BigRational>,
    pub v3_x_three_p: i64,
    pub v3_y_three_p: i64,
    pub three_p_in_e1: bool,
    /// `#Ẽ_ns(𝔽₃)`, the order of `E₀/E₁`.
    pub nonsingular_points_mod3: usize,
    pub cited: Vec<String>,
    pub holds: bool,
}

/// Generators of `E(ℚ₃)/3 ≅ (ℤ/3)²`: `P = (3, 9)` generates `E/E₀`, and
/// `Q = (4, √118)` generates `E₀/E₁`.
pub fn mod3_quotient_certificate() -> Result<Mod3Quotient> {
    let e = curve();
    let tate = tate_algorithm(&e, 3)?;
    let p = point_p();
    let (px, py) = p.coords().unwrap();
    let reduce = |x: &BigRational| rat_residue(x, 3);
    let p_sing = reduce(px) == Some(0) && reduce(py) == Some(0);

    let q_x = rat(4);
    let q_y_squared = &q_x * &q_x * &q_x + rat(CURVE_CONSTANT);
    let q_hensel = rat_val(&q_y_squared, 3) == Some(0) && reduce(&q_y_squared) == Some(1);
    // reduction (1, ±1) of Q on y² = x³ is not the node (0, 0)
    let q_red = reduce(&q_x) != Some(0);

    let three_p = e.triple(&p)?;
    let (tx, ty) = three_p
        .coords()
        .ok_or_else(|| Error::precondition("3P is the identity"))?;
    let vx = rat_val(tx, 3).unwrap_or(i64::MAX);
    let vy = rat_val(ty, 3).unwrap_or(i64::MAX);
    let in_e1 = vx < 0 && vy < 0 && 3 * vx == 2 * vy;

    let ns = (0..3u64)
        .flat_map(|x| (0..3u64).map(move |y| (x, y)))
        .filter(|&(x, y)| (y * y) % 3 == (x * x * x) % 3 && (x, y) != (0, 0))
        .count()
        + 1;
    let holds = tate.component_index == 3 && p_sing && q_hensel && q_red && in_e1 && ns == 3;
    Ok(Mod3Quotient {
        tate,
        p,
        p_reduces_to_singular_point: p_sing,
        q_x,
        q_y_squared,
        q_hensel,
        q_reduction_nonsingular: q_red,
        three_p: three_p.clone(),
        v3_x_three_p: vx,
        v3_y_three_p: vy,
        three_p_in_e1: in_e1,
        nonsingular_points_mod3: ns,
        cited: vec![
            "E1(Q3) is isomorphic to Z3 via the formal logarithm (Silverman, AEC IV.6)".to_string(),
            "E(Q3)/E0(Q3) has order c = 3 and E0/E1 is the group of nonsingular points mod 3"
                .to_string(),
        ],
        holds,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct PointCount {
    pub a: i64,
    pub count: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct TwistAtTwo {
    pub d: i64,
    pub reduction: Reduction,
    pub kodaira: String,
    pub component_index: u32,
    pub minimal_model: String,
    pub ok: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct CitedFact {
    pub statement: String,
    pub provenance: Provenance,
}

#[derive(Clone, Debug, Serialize)]
pub struct AwayFromThree {
    /// `Br(ℝ) ≅ ℤ/2` has no 3-torsion.
    pub real_place_trivial: bool,
    pub f2_counts: Vec<PointCount>,
    pub twists_at_two: Vec<TwistAtTwo>,
    pub cited: Vec<CitedFact>,
    pub holds: bool,
}

/// `#{y² + y = x³ + a}(𝔽₂)` including the point at infinity.
pub fn f2_point_count(a: i64) -> usize {
    let a = a.rem_euclid(2);
    1 + (0..2)
        .flat_map(|x| (0..2).map(move |y| (x, y)))
        .filter(|&(x, y)| (y * y + y) % 2 == (x * x * x + a) % 2)
        .count()
}

pub const TWIST_SAMPLE: std::ops::RangeInclusive<i64> = 1..=12;

/// Ingredients showing the evaluation map vanishes at ∞ and at 2.
pub fn evaluation_away_from_3_report() -> Result<AwayFromThree> {
    let f2_counts: Vec<PointCount> = [0, 1]
        .iter()
        .map(|&a| PointCount {
            a,
            count: f2_point_count(a),
        })
        .collect();
    let twists_at_two = TWIST_SAMPLE
        .map(|d| {
            let e = RationalCurve::mordell(2 * d * d * d)?;
            let r = tate_algorithm(&e, 2)?;
            let m = &r.minimal_model;
            let ok = match r.reduction {
                Reduction::Additive => [1, 2].contains(&r.component_index),
                Reduction::Good => {
                    m.a1.is_zero()
                        && m.a2.is_zero()
                        && m.a4.is_zero()
                        && m.a3 == rat(1)
                        && f2_point_count_model(m) == 3
                }
                Reduction::Multiplicative => false,
            };
            Ok(TwistAtTwo {
                d,
                reduction: r.reduction,
                kodaira: r.kodaira.to_string(),
                component_index: r.component_index,
                minimal_model: m.to_string(),
                ok,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let cited = [
        "E^d_2(Q2) is isomorphic to 4Z2 (formal group, Silverman AEC IV.6)",
        "E^d_1(Q2) is topologically isomorphic to Z2, hence 3-divisible",
        "for good reduction, E^d(Q2)/E^d_1(Q2) is the group of F2-points of y^2+y=x^3+a",
    ]
    .iter()
    .map(|s| CitedFact {
        statement: s.to_string(),
        provenance: Provenance::Cited,
    })
    .collect();
    let holds = f2_counts.iter().all(|c| c.count == 3) && twists_at_two.iter().all(|t| t.ok);
    Ok(AwayFromThree {
        real_place_trivial: num_integer::gcd(2, 3) == 1,
        f2_counts,
        twists_at_two,
        cited,
        holds,
    })
}

fn f2_point_count_model(m: &RationalCurve) -> usize {
    let r = |x: &BigRational| rat_residue(x, 2).map(|v| v as i64);
    match (r(&m.a1), r(&m.a2), r(&m.a3), r(&m.a4), r(&m.a6)) {
        (Some(a1), Some(a2), Some(a3), Some(a4), Some(a6)) => {
            1 + (0..2i64)
                .flat_map(|x| (0..2i64).map(move |y| (x, y)))
                .filter(|&(x, y)| {
                    (y * y + a1 * x * y + a3 * y - x * x * x - a2 * x * x - a4 * x - a6)
                        .rem_euclid(2)
                        == 0
                })
                .count()
        }
        _ => 0,
    }
}

/// Sparse polynomial in `(x, t, u, c)`; exponents may be negative so the
/// substitution `x ↦ x/c` stays monomial.
type Sparse = BTreeMap<[i32; 4], BigRational>;

fn sparse_mul(a: &Sparse, b: &Sparse) -> Sparse {
    let mut out = Sparse::new();
    for (ea, ca) in a {
        for (eb, cb) in b {
            let e = [ea[0] + eb[0], ea[1] + eb[1], ea[2] + eb[2], ea[3] + eb[3]];
            let v = out.entry(e).or_insert_with(BigRational::zero);
            *v += ca * cb;
        }
    }
    out.retain(|_, v| !v.is_zero());
    out
}

fn sparse_add(a: &Sparse, b: &Sparse, sign: i64) -> Sparse {
    let mut out = a.clone();
    for (e, c) in b {
        let v = out.entry(*e).or_insert_with(BigRational::zero);
        *v += c * rat(sign);
    }
    out.retain(|_, v| !v.is_zero());
    out
}

fn mono(c: i64, e: [i32; 4]) -> Sparse {
    Sparse::from([(e, rat(c))])
}

#[derive(Clone, Debug, Serialize)]
pub struct KummerCheck {
    pub source: String,
    pub target: String,
    pub substitution: String,
    pub identical: bool,
}

/// `c⁶·[(x'³+2)(t'³+2) − u'²]` with `x' = x/c, t' = t/c, u' = u/c³` equals
/// `(x³ + 2c³)(t³ + 2c³) − u²` as a Laurent polynomial.
pub fn kummer_substitution_check() -> KummerCheck {
    let x3 = sparse_add(&mono(1, [3, 0, 0, -3]), &mono(2, [0, 0, 0, 0]), 1);
    let t3 = sparse_add(&mono(1, [0, 3, 0, -3]), &mono(2, [0, 0, 0, 0]), 1);
    let u2 = mono(1, [0, 0, 2, -6]);
    let substituted = sparse_mul(
        &mono(1, [0, 0, 0, 6]),
        &sparse_add(&sparse_mul(&x3, &t3), &u2, -1),
    );
    let lhs_x = sparse_add(&mono(1, [3, 0, 0, 0]), &mono(2, [0, 0, 0, 3]), 1);
    let lhs_t = sparse_add(&mono(1, [0, 3, 0, 0]), &mono(2, [0, 0, 0, 3]), 1);
    let source = sparse_add(&sparse_mul(&lhs_x, &lhs_t), &mono(1, [0, 0, 2, 0]), -1);
    KummerCheck {
        source: "u^2 = (x^3 + 2c^3)(t^3 + 2c^3)".to_string(),
        target: "u^2 = (x^3 + 2)(t^3 + 2)".to_string(),
        substitution: "(x, t, u) -> (x/c, t/c, u/c^3)".to_string(),
        identical: substituted == source,
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Kummer3Report {
    pub curve: String,
    pub mod3_quotient: Mod3Quotient,
    pub g_p: RamificationReport,
    pub g_q: RamificationReport,
    pub f_p: FpIrreducibility,
    pub facts: Facts,
    pub certificate: Option<SurjectivityCertificate>,
    pub withheld: Option<String>,
    pub away_from_3: AwayFromThree,
    pub kummer_model: KummerCheck,
    pub root_valuation_h_p: String,
}

/// The whole local analysis at 3 and away from 3.
pub fn kummer3_pipeline(flag: FpFlag) -> Result<Kummer3Report> {
    let mod3_quotient = mod3_quotient_certificate()?;
    let g_p = ramification_report(&EisensteinElem::from_i64(3))?;
    let g_q = ramification_report(&EisensteinElem::from_i64(4))?;
    let f_p = fp_irreducibility(flag)?;
    let facts = Facts {
        g_p_ramified: g_p.verdict == Ramification::Ramified,
        g_q_unramified: g_q.verdict == Ramification::Unramified,
        f_p_irreducible: f_p.irreducible,
    };
    let (certificate, withheld) = match surjectivity_certificate(facts) {
        Ok(c) => (Some(c), None),
        Err(Error::CertificateWithheld(why)) => (None, Some(why)),
        Err(e) => return Err(e),
    };
    let h_p_poly = g_p
        .substitutions
        .iter()
        .find(|s| s.shift == 1)
        .expect("shift 1 recorded");
    let root_valuation_h_p = h_p_poly
        .newton
        .root_valuations()
        .first()
        .map(|(v, _)| v.to_string())
        .unwrap_or_default();
    Ok(Kummer3Report {
        curve: curve().to_string(),
        mod3_quotient,
        g_p,
        g_q,
        f_p,
        facts,
        certificate,
        withheld,
        away_from_3: evaluation_away_from_3_report()?,
        kummer_model: kummer_substitution_check(),
        root_valuation_h_p,
    })
}

/// Root valuation of `h_P` as a rational, for callers that want the number.
pub fn h_p_root_valuation() -> Result<Rational64> {
    let np = NewtonPolygon::of(&MElem::modulus_poly())?;
    match np.segments.as_slice() {
        [s] => Ok(s.root_valuation()),
        _ => Err(Error::precondition("h_P has more than one slope")),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn f_constant_and_leading() {
        let f = f_division_poly(&rat(3));
        assert_eq!(f.degree(), Some(9));
        assert_eq!(f.coeff(9), rat(1));
        assert_eq!(f.coeff(0), rat(2i64.pow(9) * 3i64.pow(9)));
    }

    #[test]
    fn f_vanishes_at_preimage() {
        let e = curve();
        let p = point_p();
        let t = e.triple(&p).unwrap();
        let (xt, _) = t.coords().unwrap();
        assert!(f_division_poly(xt).eval(&rat(3)).is_zero());
    }

    #[test]
    fn g_matches_isogeny() {
        // T = (1 − ζ)S computed with the group law over F
        let e = curve_over_f();
        let s = Point::affine(EisensteinElem::from_i64(3), EisensteinElem::from_i64(9));
        let t = e.add(&s, &e.neg(&zeta_action(&s)));
        let (xt, _) = t.coords().unwrap();
        assert!(g_division_poly(xt)
            .eval(&EisensteinElem::from_i64(3))
            .is_zero());
    }

    #[test]
    fn ramification_verdicts() {
        assert_eq!(
            ramification_report(&EisensteinElem::from_i64(3))
                .unwrap()
                .verdict,
            Ramification::Ramified
        );
        assert_eq!(
            ramification_report(&EisensteinElem::from_i64(4))
                .unwrap()
                .verdict,
            Ramification::Unramified
        );
        let z = ramification_report(&EisensteinElem::zero()).unwrap();
        assert!(z.degenerate);
        assert_eq!(z.verdict, Ramification::Inconclusive);
    }

    #[test]
    fn hand_substitutions() {
        let r = ramification_report(&EisensteinElem::from_i64(3)).unwrap();
        let h = r.substitutions.iter().find(|s| s.shift == 1).unwrap();
        assert_eq!(h.newton.root_valuations(), vec![(Rational64::new(2, 3), 3)]);
        let r = ramification_report(&EisensteinElem::from_i64(4)).unwrap();
        let h = r.substitutions.iter().find(|s| s.shift == 0).unwrap();
        assert_eq!(h.residual, Some(vec![2, 0, 1, 1]));
        assert_eq!(h.residual_irreducible, Some(true));
    }

    #[test]
    fn two_step_route() {
        let r = fp_irreducibility(FpFlag::Auto).unwrap();
        assert_eq!(r.k_divides_f, Some(true));
        assert!(
            r.irreducible,
            "{:?}",
            r.second_step.as_ref().map(|s| s.verdict)
        );
    }

    #[test]
    fn involutions() {
        let t = semilinear_involutions();
        assert_eq!(t.len(), 6);
        assert!(t
            .iter()
            .all(|m| m[1][0] == 0 && (m[0][0] + m[1][1]) % 3 == 0));
    }

    #[test]
    fn certificate() {
        let facts = Facts {
            g_p_ramified: true,
            g_q_unramified: true,
            f_p_irreducible: true,
        };
        let c = surjectivity_certificate(facts).unwrap();
        let minus = c.branches.iter().find(|b| b.epsilon == -1).unwrap();
        assert_eq!(minus.survivors, vec![(-1, 0)]);
        assert!(c.branches.iter().all(|b| b.contradiction));
        let withheld = surjectivity_certificate(Facts {
            g_q_unramified: false,
            ..facts
        });
        assert!(matches!(withheld, Err(Error::CertificateWithheld(_))));
    }

    #[test]
    fn mod3() {
        let r = mod3_quotient_certificate().unwrap();
        assert_eq!((r.v3_x_three_p, r.v3_y_three_p), (-2, -3));
        assert!(r.holds);
    }

    #[test]
    fn away_from_three() {
        assert_eq!(f2_point_count(0), 3);
        assert_eq!(f2_point_count(1), 3);
        assert!(evaluation_away_from_3_report().unwrap().holds);
    }

    #[test]
    fn kummer_identity() {
        assert!(kummer_substitution_check().identical);
    }
}
