//! Closed forms for `m(l)` and the `l`-primary parts of `Br(E x E)/Br_1` and
//! `Br(Ebar x Ebar)^{Gamma_L}`.

use std::collections::BTreeMap;
use std::fmt;

use serde::Serialize;

use crate::arith::{cube_root, is_prime, is_square, ord};
use crate::quadfield::{class_number_maximal, n_of_ell, ImQuadField, NValue};
use crate::{Error, Family, Result};

/// `(+) Z/l^e` as a sorted list of `(l, e)` with `e >= 1`.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, Serialize)]
#[serde(transparent)]
pub struct BrauerStructure {
    factors: Vec<(u64, u32)>,
}

impl BrauerStructure {
    pub fn trivial() -> Self {
        Self::default()
    }

    /// Drops zero exponents and sorts into canonical order.
    pub fn from_factors(factors: impl IntoIterator<Item = (u64, u32)>) -> Self {
        let mut factors: Vec<(u64, u32)> = factors.into_iter().filter(|&(_, e)| e > 0).collect();
        factors.sort_unstable();
        BrauerStructure { factors }
    }

    pub fn cyclic(ell: u64, e: u32) -> Self {
        Self::from_factors([(ell, e)])
    }

    pub fn factors(&self) -> &[(u64, u32)] {
        &self.factors
    }

    pub fn is_trivial(&self) -> bool {
        self.factors.is_empty()
    }

    pub fn order(&self) -> u128 {
        self.factors
            .iter()
            .map(|&(l, e)| (l as u128).pow(e))
            .product()
    }

    /// The `l^k`-torsion subgroup.
    pub fn truncate(&self, k: u32) -> Self {
        Self::from_factors(self.factors.iter().map(|&(l, e)| (l, e.min(k))))
    }

    /// Direct sum.
    pub fn sum(&self, other: &BrauerStructure) -> Self {
        Self::from_factors(self.factors.iter().chain(&other.factors).copied())
    }
}

impl fmt::Display for BrauerStructure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.factors.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .factors
            .iter()
            .map(|&(l, e)| {
                if e == 1 {
                    format!("Z/{l}")
                } else {
                    format!("Z/{}", (l as u128).pow(e))
                }
            })
            .collect();
        write!(f, "{}", parts.join(" x "))
    }
}

/// Where a value came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Provenance {
    ClosedForm,
    UserSupplied,
    Empirical,
    Exhaustive,
    Cited,
}

impl fmt::Display for Provenance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Provenance::ClosedForm => "closed-form",
            Provenance::UserSupplied => "user-supplied",
            Provenance::Empirical => "empirical",
            Provenance::Exhaustive => "exhaustive",
            Provenance::Cited => "cited",
        })
    }
}

/// The data the structure theorems depend on.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CurveContext {
    pub disc: i64,
    /// `K` is contained in the base field `L`.
    pub cm_in_base: bool,
    pub m: BTreeMap<u64, u32>,
    /// Value of `m(l)` for primes absent from `m`, if known.
    pub m_default: Option<u32>,
    /// `E_2 = E_2(L)`.
    pub full_two_torsion: bool,
    pub provenance: Provenance,
}

impl CurveContext {
    pub fn new(
        disc: i64,
        cm_in_base: bool,
        m: BTreeMap<u64, u32>,
        full_two_torsion: bool,
        provenance: Provenance,
    ) -> Result<Self> {
        let field = ImQuadField::from_disc(disc)?;
        validate_disc_orders(&field)?;
        if let Some(&l) = m.keys().find(|&&l| !is_prime(l)) {
            return Err(Error::invalid(format!("m is indexed by primes, got {l}")));
        }
        if let Some((&l, &ml)) = m.iter().find(|&(&l, &ml)| !m_attainable(disc, l, ml)) {
            return Err(Error::invalid(format!(
                "m({l}) = {ml} is impossible for disc {disc}: (O_K/2)^* is trivial, so every \
                 Grössencharacter value lies in Z + 2 O_K"
            )));
        }
        Ok(CurveContext {
            disc,
            cm_in_base,
            m,
            m_default: None,
            full_two_torsion,
            provenance,
        })
    }

    /// `E/Q` from one of the two explicit families, with closed-form `m`.
    pub fn for_family(family: &Family) -> Self {
        let (disc, m, full) = match family {
            Family::J0(c) => (
                -3,
                [(2, m_exact_j0(c.d, 2)), (3, m_exact_j0(c.d, 3))],
                false,
            ),
            Family::J1728(c) => (-4, [(2, m_exact_j1728(c.d, 2)), (3, 0)], is_square(c.d)),
        };
        CurveContext {
            disc,
            cm_in_base: false,
            m: m.into_iter().collect(),
            m_default: Some(0),
            full_two_torsion: full,
            provenance: Provenance::ClosedForm,
        }
    }

    pub fn field(&self) -> ImQuadField {
        ImQuadField::from_disc(self.disc).expect("validated on construction")
    }

    pub fn m_of(&self, ell: u64) -> Result<u32> {
        self.m
            .get(&ell)
            .copied()
            .or(self.m_default)
            .ok_or_else(|| Error::invalid(format!("m({ell}) is not specified")))
    }
}

fn validate_disc_orders(field: &ImQuadField) -> Result<()> {
    let disc = field.disc();
    let v2 = ord(disc, 2);
    if ![0, 2, 3].contains(&v2) {
        return Err(Error::invalid(format!(
            "ord_2({disc}) = {v2} is not in {{0, 2, 3}}"
        )));
    }
    for (p, _) in crate::arith::factorize(disc.unsigned_abs()) {
        if p > 2 && ord(disc, p) > 1 {
            return Err(Error::invalid(format!("ord_{p}({disc}) exceeds 1")));
        }
    }
    Ok(())
}

fn check_prime(ell: u64) -> Result<()> {
    if is_prime(ell) {
        Ok(())
    } else {
        Err(Error::invalid(format!("{ell} is not prime")))
    }
}

/// Whether `m(l) = m` can occur at all. When `2` splits in `K` the unit
/// group of `O_K/2 = F_2 x F_2` is trivial, so Grössencharacter values
/// (prime to 2) always lie in `Z + 2 O_K` and `m(2) >= 1`.
pub fn m_attainable(disc: i64, ell: u64, m: u32) -> bool {
    !(ell == 2 && disc.rem_euclid(8) == 1 && m == 0)
}

/// `m(l)` for `y^2 = x^3 + D` over `Q`.
pub fn m_exact_j0(d: i64, ell: u64) -> u32 {
    match ell {
        2 => cube_root(d).is_some() as u32,
        3 => cube_root(4 * d).is_some() as u32,
        _ => 0,
    }
}

/// `m(l)` for `y^2 = x^3 - Dx` over `Q`: for `D` in `Z`, `D` is a square in
/// `Z[i]` exactly when `D` or `-D` is a square in `Z`.
pub fn m_exact_j1728(d: i64, ell: u64) -> u32 {
    (ell == 2 && (is_square(d) || is_square(-d))) as u32
}

/// `(Br(E x E)/Br_1(E x E))_{l^infinity}`.
pub fn transcendental_structure(ctx: &CurveContext, ell: u64) -> Result<BrauerStructure> {
    check_prime(ell)?;
    let m = ctx.m_of(ell)?;
    Ok(if ctx.cm_in_base {
        BrauerStructure::from_factors([(ell, m), (ell, m)])
    } else if ell == 2 && ctx.disc % 2 == 0 && m >= 1 && ctx.full_two_torsion {
        BrauerStructure::from_factors([(2, m), (2, 1)])
    } else {
        BrauerStructure::cyclic(ell, m)
    })
}

/// `Br(Ebar x Ebar)^{Gamma_L}_{l^infinity}`.
pub fn geometric_structure(ctx: &CurveContext, ell: u64) -> Result<BrauerStructure> {
    check_prime(ell)?;
    let m = ctx.m_of(ell)?;
    let v = ord(ctx.disc, ell);
    Ok(if ctx.cm_in_base {
        BrauerStructure::from_factors([(ell, m + v / 2), (ell, m + v.div_ceil(2))])
    } else {
        let k = m + v;
        if ell == 2 && v > 0 {
            BrauerStructure::from_factors([(2, k - 1), (2, 1)])
        } else {
            BrauerStructure::cyclic(ell, k)
        }
    })
}

/// `c` with `D = 2c^3`, i.e. `y^2 = x^3 + D` is `y^2 = x^3 + 2c^3`; exists
/// exactly when `4D` is a cube.
pub fn classify_odd_transcendental(d: i64) -> Option<i64> {
    let r = cube_root(4 * d)?;
    debug_assert!(r % 2 == 0);
    Some(r / 2)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct H1Report {
    pub order: u64,
    /// Coordinates in the basis `(1, f*alpha)` of a generator of
    /// `{x : x + tau(x) = 0}`.
    pub kernel_generator: (i64, i64),
    /// Generator of `{tau(x) - x}` in the same basis.
    pub image_generator: (i64, i64),
}

/// `H^1(Z/2, O)` for `O = Z[f*alpha]`, `alpha = (disc + sqrt(disc))/2`, and
/// the conjugation action.
///
/// Since `tau(alpha) = disc - alpha`, in coordinates `x = x1 + x2 f alpha`:
/// `x + tau(x) = 2 x1 + f disc x2` and `tau(x) - x = x2 (f disc - 2 f alpha)`.
pub fn h1_conjugation(disc: i64, f: u64) -> Result<H1Report> {
    ImQuadField::from_disc(disc)?;
    if f == 0 {
        return Err(Error::invalid("conductor must be positive"));
    }
    let fd = f as i64 * disc;
    let g = num_integer::gcd(2, fd);
    let kernel_generator = (-fd / g, 2 / g);
    let image_generator = (fd, -2);
    // image = order * kernel_generator up to sign
    let order = (image_generator.1 / kernel_generator.1).unsigned_abs();
    debug_assert_eq!(image_generator.0, -(order as i64) * kernel_generator.0);
    Ok(H1Report {
        order,
        kernel_generator,
        image_generator,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SpecialCase {
    /// `K = Q(zeta_3)`, `l <= 3`.
    EisensteinSmallEll,
    /// `K = Q(i)`, `l = 2`.
    GaussianTwo,
    /// `disc == 1 (mod 8)`, `l = 2`.
    OneModEightTwo,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LinkReport {
    pub disc: i64,
    pub ell: u64,
    pub class_number: u64,
    pub n: NValue,
    pub special_case: Option<SpecialCase>,
    /// `O_K^* = {+-1}` and `disc != 1 (mod 8)`, forcing `Br = Br_1`.
    pub br_equals_br1: bool,
}

/// `n(l)` for `L` inside the Hilbert class field, with the special cases in
/// which it is nonzero tagged.
pub fn link_report(disc: i64, ell: u64) -> Result<LinkReport> {
    let field = ImQuadField::from_disc(disc)?;
    let h = class_number_maximal(&field);
    let n = n_of_ell(&field, ell, h, true)?;
    let special_case = match (disc, ell) {
        (-3, 2 | 3) => Some(SpecialCase::EisensteinSmallEll),
        (-4, 2) => Some(SpecialCase::GaussianTwo),
        (_, 2) if disc.rem_euclid(8) == 1 => Some(SpecialCase::OneModEightTwo),
        _ => None,
    };
    Ok(LinkReport {
        disc,
        ell,
        class_number: h,
        n,
        special_case,
        br_equals_br1: field.unit_count() == 2 && disc.rem_euclid(8) != 1,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PrimeRow {
    pub ell: u64,
    pub m: u32,
    pub transcendental: BrauerStructure,
    pub geometric: BrauerStructure,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Classification {
    pub family: Family,
    pub context: CurveContext,
    pub rows: Vec<PrimeRow>,
    pub transcendental: BrauerStructure,
    pub geometric: BrauerStructure,
    /// `c` with `D = 2c^3`, for the `j = 0` family.
    pub odd_c: Option<i64>,
}

/// Full table for `E/Q` in one of the two families. Only `l in {2, 3}` can
/// contribute: `m(l) = 0` for `l > 3` and the discriminant is `-3` or `-4`.
pub fn classify_family(family: &Family) -> Classification {
    let context = CurveContext::for_family(family);
    let rows: Vec<PrimeRow> = [2u64, 3]
        .into_iter()
        .map(|ell| PrimeRow {
            ell,
            m: context.m_of(ell).expect("closed form covers every prime"),
            transcendental: transcendental_structure(&context, ell).expect("prime"),
            geometric: geometric_structure(&context, ell).expect("prime"),
        })
        .collect();
    let total = |f: fn(&PrimeRow) -> &BrauerStructure| {
        rows.iter()
            .fold(BrauerStructure::trivial(), |acc, r| acc.sum(f(r)))
    };
    Classification {
        family: *family,
        transcendental: total(|r| &r.transcendental),
        geometric: total(|r| &r.geometric),
        odd_c: match family {
            Family::J0(c) => classify_odd_transcendental(c.d),
            Family::J1728(_) => None,
        },
        context,
        rows,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ctx(disc: i64, inb: bool, ell: u64, m: u32, full: bool) -> CurveContext {
        CurveContext::new(disc, inb, [(ell, m)].into(), full, Provenance::UserSupplied).unwrap()
    }

    fn s(f: &[(u64, u32)]) -> BrauerStructure {
        BrauerStructure::from_factors(f.iter().copied())
    }

    #[test]
    fn closed_form_m() {
        assert_eq!(m_exact_j0(1, 2), 1);
        assert_eq!(m_exact_j0(2, 3), 1);
        assert_eq!(m_exact_j0(2, 5), 0);
        assert_eq!(m_exact_j0(2, 2), 0);
        assert_eq!(m_exact_j1728(4, 2), 1);
        assert_eq!(m_exact_j1728(-9, 2), 1);
        assert_eq!(m_exact_j1728(2, 2), 0);
        assert_eq!(m_exact_j1728(4, 3), 0);
    }

    #[test]
    fn transcendental_examples() {
        assert_eq!(
            transcendental_structure(&ctx(-3, true, 3, 1, false), 3).unwrap(),
            s(&[(3, 1), (3, 1)])
        );
        assert_eq!(
            transcendental_structure(&ctx(-3, false, 3, 1, false), 3).unwrap(),
            s(&[(3, 1)])
        );
        assert_eq!(
            transcendental_structure(&ctx(-4, false, 2, 1, true), 2).unwrap(),
            s(&[(2, 1), (2, 1)])
        );
        assert!(transcendental_structure(&ctx(-4, false, 2, 1, true), 3).is_err());
    }

    #[test]
    fn geometric_examples() {
        assert_eq!(
            geometric_structure(&ctx(-11, false, 11, 0, false), 11).unwrap(),
            s(&[(11, 1)])
        );
        assert_eq!(
            geometric_structure(&ctx(-4, true, 2, 1, false), 2).unwrap(),
            s(&[(2, 2), (2, 2)])
        );
        assert_eq!(
            geometric_structure(&ctx(-4, false, 2, 1, false), 2).unwrap(),
            s(&[(2, 1), (2, 2)])
        );
        assert_eq!(
            geometric_structure(&ctx(-8, true, 2, 0, false), 2).unwrap(),
            s(&[(2, 1), (2, 2)])
        );
        assert!(geometric_structure(&ctx(-7, false, 3, 0, false), 3)
            .unwrap()
            .is_trivial());
        assert!(
            CurveContext::new(-7, false, [(2, 0)].into(), false, Provenance::UserSupplied).is_err()
        );
    }

    #[test]
    fn odd_classification() {
        assert_eq!(classify_odd_transcendental(2), Some(1));
        assert_eq!(classify_odd_transcendental(54), Some(3));
        assert_eq!(classify_odd_transcendental(1), None);
        assert_eq!(classify_odd_transcendental(-16), Some(-2));
    }

    #[test]
    fn h1_examples() {
        assert_eq!(h1_conjugation(-3, 1).unwrap().order, 1);
        assert_eq!(h1_conjugation(-4, 1).unwrap().order, 2);
        assert_eq!(h1_conjugation(-7, 3).unwrap().order, 1);
        assert_eq!(h1_conjugation(-7, 2).unwrap().order, 2);
        assert!(h1_conjugation(-12, 1).is_err());
    }

    #[test]
    fn link_examples() {
        let r = link_report(-11, 11).unwrap();
        assert_eq!(r.n, NValue::Exact(0));
        assert!(r.br_equals_br1 && r.special_case.is_none());
        let r = link_report(-7, 2).unwrap();
        assert_eq!(r.n, NValue::Exact(1));
        assert_eq!(r.special_case, Some(SpecialCase::OneModEightTwo));
        assert_eq!(link_report(-3, 5).unwrap().n, NValue::Exact(0));
        assert_eq!(link_report(-3, 3).unwrap().n, NValue::Exact(1));
        assert_eq!(link_report(-4, 2).unwrap().n, NValue::Exact(1));
    }

    #[test]
    fn family_tables() {
        let c = classify_family(&Family::j0(2).unwrap());
        assert_eq!(c.transcendental, s(&[(3, 1)]));
        assert_eq!(c.geometric, s(&[(3, 2)]));
        assert_eq!(c.odd_c, Some(1));
        let c = classify_family(&Family::j1728(4).unwrap());
        assert_eq!(c.transcendental, s(&[(2, 1), (2, 1)]));
        assert_eq!(c.geometric, s(&[(2, 1), (2, 2)]));
        let c = classify_family(&Family::j1728(2).unwrap());
        assert!(c.transcendental.is_trivial());
        assert_eq!(c.geometric, s(&[(2, 1), (2, 1)]));
        let c = classify_family(&Family::j1728(-4).unwrap());
        assert_eq!(c.transcendental, s(&[(2, 1)]));
    }

    #[test]
    fn display() {
        assert_eq!(s(&[(2, 2), (2, 1)]).to_string(), "Z/2 x Z/4");
        assert_eq!(BrauerStructure::trivial().to_string(), "0");
    }
}
