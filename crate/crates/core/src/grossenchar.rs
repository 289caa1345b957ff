//! Grössencharacter values for `y^2 = x^3 + D` (CM by `Z[zeta_3]`) and
//! `y^2 = x^3 - Dx` (CM by `Z[i]`) over `Q`, and empirical bounds on `m(l)`.
//!
//! At a split prime `q = pi * pi_bar` only `pi` is sampled: the value at the
//! conjugate prime is the complex conjugate, and every order `Z + l^k O_K` is
//! stable under conjugation, so membership results coincide. Inert primes
//! are skipped; their values are rational integers times units and never
//! witness failure of membership.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::Serialize;

use crate::arith::{kth_power_free, primes_up_to};
use crate::quadint::{
    factor_rational_prime, power_residue_symbol, primary_associate, suborder_level, Factorization,
};
use crate::{Basis, Error, QuadInt, Result, Symbol};

/// `y^2 = x^3 + D`, stored with `D` reduced modulo sixth powers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct CurveJ0 {
    pub raw_d: i64,
    pub d: i64,
}

impl CurveJ0 {
    pub fn new(raw_d: i64) -> Result<Self> {
        if raw_d == 0 {
            return Err(Error::invalid("D must be nonzero"));
        }
        Ok(CurveJ0 {
            raw_d,
            d: kth_power_free(raw_d, 6).0,
        })
    }
}

/// `y^2 = x^3 - Dx`, stored with `D` reduced modulo fourth powers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct CurveJ1728 {
    pub raw_d: i64,
    pub d: i64,
}

impl CurveJ1728 {
    pub fn new(raw_d: i64) -> Result<Self> {
        if raw_d == 0 {
            return Err(Error::invalid("D must be nonzero"));
        }
        Ok(CurveJ1728 {
            raw_d,
            d: kth_power_free(raw_d, 4).0,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(tag = "family", rename_all = "lowercase")]
pub enum Family {
    J0(CurveJ0),
    J1728(CurveJ1728),
}

impl Family {
    pub fn j0(d: i64) -> Result<Self> {
        CurveJ0::new(d).map(Family::J0)
    }

    pub fn j1728(d: i64) -> Result<Self> {
        CurveJ1728::new(d).map(Family::J1728)
    }

    pub fn basis(&self) -> Basis {
        match self {
            Family::J0(_) => Basis::Eisenstein,
            Family::J1728(_) => Basis::Gaussian,
        }
    }

    /// The normalised `D`.
    pub fn d(&self) -> i64 {
        match self {
            Family::J0(c) => c.d,
            Family::J1728(c) => c.d,
        }
    }

    fn bad_part(&self) -> i64 {
        match self {
            Family::J0(c) => 6 * c.d,
            Family::J1728(c) => 2 * c.d,
        }
    }

    /// `q` is split in `K` and coprime to `6D`, resp. `2D`.
    pub fn is_good_split(&self, q: u64) -> bool {
        self.bad_part() % q as i64 != 0
            && matches!(
                factor_rational_prime(q, self.basis()),
                Ok(Factorization::Split { .. })
            )
    }

    /// `psi(q)` at the prime `(pi)` with `pi` from [`factor_rational_prime`],
    /// returned with its primary normalisation.
    pub fn psi(&self, q: u64) -> Result<(QuadInt, QuadInt)> {
        match self {
            Family::J0(c) => psi_j0(c, q),
            Family::J1728(c) => psi_j1728(c, q),
        }
    }
}

fn primary_split_prime(q: u64, basis: Basis, bad: i64) -> Result<QuadInt> {
    if bad % q as i64 == 0 {
        return Err(Error::precondition(format!(
            "{q} divides {bad}: bad reduction or ramified"
        )));
    }
    match factor_rational_prime(q, basis)? {
        Factorization::Split { pi, .. } => primary_associate(&pi),
        Factorization::Inert(_) => Err(Error::precondition(format!("{q} is inert"))),
        Factorization::Ramified { .. } => Err(Error::precondition(format!("{q} is ramified"))),
    }
}

fn twist_by_symbol(sym: Symbol, pi: &QuadInt) -> Result<QuadInt> {
    let root = sym
        .root()
        .ok_or_else(|| Error::precondition(format!("{pi} divides the twisting parameter")))?;
    Ok(&root.inverse().to_quadint(pi.basis) * pi)
}

/// `psi(q) = (D/pi)_4^{-1} pi` with `pi == 1 (mod 2+2i)`. Returns `(pi, psi)`.
pub fn psi_j1728(curve: &CurveJ1728, q: u64) -> Result<(QuadInt, QuadInt)> {
    let pi = primary_split_prime(q, Basis::Gaussian, 2 * curve.d)?;
    let sym = power_residue_symbol(&QuadInt::from_int(curve.d, Basis::Gaussian), &pi, 4)?;
    let psi = twist_by_symbol(sym, &pi)?;
    Ok((pi, psi))
}

/// `psi(q) = (4D/pi)_6^{-1} pi` with `pi == 1 (mod 3)`. Returns `(pi, psi)`.
pub fn psi_j0(curve: &CurveJ0, q: u64) -> Result<(QuadInt, QuadInt)> {
    let pi = primary_split_prime(q, Basis::Eisenstein, 6 * curve.d)?;
    let sym = power_residue_symbol(&QuadInt::from_int(4 * curve.d, Basis::Eisenstein), &pi, 6)?;
    let psi = twist_by_symbol(sym, &pi)?;
    Ok((pi, psi))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PsiSample {
    pub prime_norm: u64,
    pub pi_primary: QuadInt,
    pub psi_value: QuadInt,
    /// Largest `k` (capped) with `psi` in `Z + l^k O_K`.
    pub max_k_membership: BTreeMap<u64, u32>,
}

impl PsiSample {
    fn new(family: &Family, q: u64, ells: &[u64], cap: u32) -> Result<Self> {
        let (pi, psi) = family.psi(q)?;
        let max_k_membership = ells
            .iter()
            .map(|&l| (l, suborder_level(&psi, l, cap)))
            .collect();
        Ok(PsiSample {
            prime_norm: q,
            pi_primary: pi,
            psi_value: psi,
            max_k_membership,
        })
    }
}

/// All admissible samples of norm `<= bound`, in increasing norm.
pub fn sample_psi(family: &Family, ells: &[u64], bound: u64, cap: u32) -> Vec<PsiSample> {
    let primes: Vec<u64> = primes_up_to(bound)
        .into_iter()
        .filter(|&q| family.is_good_split(q))
        .collect();
    primes
        .par_iter()
        .map(|&q| PsiSample::new(family, q, ells, cap).expect("admissible prime"))
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MEstimate {
    pub ell: u64,
    pub cap: u32,
    pub norm_bound: u64,
    pub sample_count: usize,
    /// Minimum over samples of the membership level; an upper bound for `m(l)`.
    pub max_consistent_k: u32,
    /// Number of samples attaining the minimum.
    pub attaining: usize,
    /// The first few samples attaining the minimum, by increasing norm.
    pub witnesses: Vec<PsiSample>,
}

const WITNESS_LIMIT: usize = 5;

pub fn estimate_m(family: &Family, ell: u64, norm_bound: u64, cap: u32) -> Result<MEstimate> {
    let samples = sample_psi(family, &[ell], norm_bound, cap);
    let level = |s: &PsiSample| s.max_k_membership[&ell];
    let min = samples.iter().map(level).min().ok_or_else(|| {
        Error::precondition(format!("no admissible primes of norm <= {norm_bound}"))
    })?;
    let attaining: Vec<&PsiSample> = samples.iter().filter(|s| level(s) == min).collect();
    Ok(MEstimate {
        ell,
        cap,
        norm_bound,
        sample_count: samples.len(),
        max_consistent_k: min,
        attaining: attaining.len(),
        witnesses: attaining.into_iter().take(WITNESS_LIMIT).cloned().collect(),
    })
}

/// Smallest good split prime `q` with `psi(q)` outside `Z + target*O_K`.
///
/// With `ell` given, `q` must also be coprime to `ell` and have a generator
/// in `Z + target*ell*O_K`, which over `L = Q` is exactly the requirement
/// that the prime splits completely in the ring class field of conductor
/// `target * ell`.
pub fn witness_prime(
    family: &Family,
    target: u64,
    ell: Option<u64>,
    norm_bound: u64,
) -> Result<Option<PsiSample>> {
    if target != 2 && target != 3 {
        return Err(Error::invalid("witness target must be 2 or 3"));
    }
    let basis = family.basis();
    let found = primes_up_to(norm_bound).into_iter().find_map(|q| {
        if q == target || ell == Some(q) || !family.is_good_split(q) {
            return None;
        }
        let sample = PsiSample::new(family, q, &[target], 1).ok()?;
        if sample.max_k_membership[&target] >= 1 {
            return None;
        }
        if let Some(l) = ell {
            let conductor = target * l;
            let splits = basis
                .units()
                .iter()
                .any(|u| suborder_level(&(u * &sample.pi_primary), conductor, 1) == 1);
            if !splits {
                return None;
            }
        }
        Some(sample)
    });
    Ok(found)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn g(a: i64, b: i64) -> QuadInt {
        QuadInt::new(a, b, Basis::Gaussian)
    }

    #[test]
    fn normalisation() {
        assert_eq!(CurveJ0::new(64).unwrap().d, 1);
        assert_eq!(CurveJ0::new(2 * 729).unwrap().d, 2);
        assert_eq!(CurveJ1728::new(32).unwrap().d, 2);
        assert!(CurveJ0::new(0).is_err());
    }

    #[test]
    fn j1728_examples() {
        let c1 = CurveJ1728::new(1).unwrap();
        let (pi, psi) = psi_j1728(&c1, 5).unwrap();
        assert_eq!(pi, g(-1, 2));
        assert_eq!(psi, pi);
        let c2 = CurveJ1728::new(2).unwrap();
        assert_eq!(psi_j1728(&c2, 5).unwrap().1, g(-2, -1));
        let c4 = CurveJ1728::new(4).unwrap();
        let (pi, psi) = psi_j1728(&c4, 5).unwrap();
        assert!(psi == pi || psi == -&pi);
        assert!(psi_j1728(&c1, 3).is_err());
        assert!(psi_j1728(&c2, 2).is_err());
    }

    #[test]
    fn j0_examples() {
        let c2 = CurveJ0::new(2).unwrap();
        let (pi, psi) = psi_j0(&c2, 7).unwrap();
        assert!(psi == pi || psi == -&pi);
        assert!(psi_j0(&c2, 5).is_err());
        assert!(psi_j0(&CurveJ0::new(7).unwrap(), 7).is_err());
    }

    #[test]
    fn estimates() {
        let e = estimate_m(&Family::j1728(2).unwrap(), 2, 100, 8).unwrap();
        assert_eq!(e.max_consistent_k, 0);
        assert_eq!(e.witnesses[0].prime_norm, 5);
        let e = estimate_m(&Family::j0(1).unwrap(), 2, 2000, 8).unwrap();
        assert_eq!(e.max_consistent_k, 1);
        let e = estimate_m(&Family::j0(2).unwrap(), 3, 2000, 8).unwrap();
        assert_eq!(e.max_consistent_k, 1);
    }

    #[test]
    fn witnesses() {
        let w = witness_prime(&Family::j1728(2).unwrap(), 2, None, 100)
            .unwrap()
            .unwrap();
        assert_eq!(w.prime_norm, 5);
        let w = witness_prime(&Family::j0(2).unwrap(), 2, None, 100)
            .unwrap()
            .unwrap();
        assert_eq!(w.prime_norm, 7);
        assert!(witness_prime(&Family::j1728(-1).unwrap(), 2, None, 3000)
            .unwrap()
            .is_none());
        let w = witness_prime(&Family::j1728(2).unwrap(), 2, Some(3), 5000)
            .unwrap()
            .unwrap();
        assert!(w.max_k_membership[&2] == 0);
    }
}
