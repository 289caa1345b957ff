//! Exhaustive checks over `M_2(Z/l^k)` of the endomorphism-ring facts behind
//! the structure theorems.
//!
//! `E_{l^k}` has basis `(P, alpha P)` with `alpha = (disc + sqrt(disc))/2`, so
//! multiplication by `alpha` is the companion matrix `A` of
//! `x^2 - disc x - disc(1 - disc)/4`. The Galois action of `Gamma_{KL}` is
//! modelled by conjugation by every invertible `aI + bA` with `l^m | b`, and
//! an element `tau` outside `Gamma_{KL}` by a matrix `T` with
//! `T A = Abar T`, `Abar = disc I - A`.
//!
//! Classes modulo `O_K (x) Z/l^k = span(I, A)` are represented by
//! `[[0, t], [0, u]]`, reached from `M` by subtracting `M_11 I + M_21 A`.

use std::collections::BTreeSet;
use std::fmt;

use rayon::prelude::*;
use serde::Serialize;

use crate::arith::{ipow, is_prime, ord};
use crate::brauer::{geometric_structure, m_attainable, transcendental_structure, CurveContext};
use crate::quadfield::ImQuadField;
use crate::{BrauerStructure, Error, Provenance, Result};

/// Largest `l^k` any check will enumerate.
pub const BUDGET: u64 = 32;
/// Up to this modulus every valid `T` is checked, beyond it only the canonical one.
pub const ALL_TAU_LIMIT: u64 = 16;

/// Row-major `[[e0, e1], [e2, e3]]` modulo `n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Mat2ModN {
    pub e: [u64; 4],
    pub n: u64,
}

impl Mat2ModN {
    pub fn new(e: [i64; 4], n: u64) -> Self {
        assert!(n >= 1);
        let r = |x: i64| x.rem_euclid(n as i64) as u64;
        Mat2ModN {
            e: [r(e[0]), r(e[1]), r(e[2]), r(e[3])],
            n,
        }
    }

    pub fn identity(n: u64) -> Self {
        Self::new([1, 0, 0, 1], n)
    }

    pub fn zero(n: u64) -> Self {
        Self::new([0; 4], n)
    }

    fn from_index(idx: u64, n: u64) -> Self {
        Mat2ModN {
            e: [
                idx % n,
                (idx / n) % n,
                (idx / (n * n)) % n,
                idx / (n * n * n),
            ],
            n,
        }
    }

    fn mulmod(&self, x: u64, y: u64) -> u64 {
        (x as u128 * y as u128 % self.n as u128) as u64
    }

    pub fn mul(&self, o: &Self) -> Self {
        let [a, b, c, d] = self.e;
        let [p, q, r, s] = o.e;
        let n = self.n;
        let f = |x: u64, y: u64, z: u64, w: u64| (self.mulmod(x, y) + self.mulmod(z, w)) % n;
        Mat2ModN {
            e: [f(a, p, b, r), f(a, q, b, s), f(c, p, d, r), f(c, q, d, s)],
            n,
        }
    }

    pub fn add(&self, o: &Self) -> Self {
        let n = self.n;
        Mat2ModN {
            e: std::array::from_fn(|i| (self.e[i] + o.e[i]) % n),
            n,
        }
    }

    pub fn sub(&self, o: &Self) -> Self {
        let n = self.n;
        Mat2ModN {
            e: std::array::from_fn(|i| (self.e[i] + n - o.e[i]) % n),
            n,
        }
    }

    pub fn scale(&self, s: u64) -> Self {
        Mat2ModN {
            e: std::array::from_fn(|i| self.mulmod(self.e[i], s % self.n)),
            n: self.n,
        }
    }

    pub fn det(&self) -> u64 {
        let [a, b, c, d] = self.e;
        (self.mulmod(a, d) + self.n - self.mulmod(b, c)) % self.n
    }

    pub fn inverse(&self) -> Option<Self> {
        let dinv = crate::arith::inv_mod(self.det() as i64, self.n)?;
        let [a, b, c, d] = self.e;
        let n = self.n as i64;
        let adj = Mat2ModN::new([d as i64, -(b as i64), -(c as i64), a as i64], n as u64);
        Some(adj.scale(dinv))
    }

    pub fn is_zero(&self) -> bool {
        self.e.iter().all(|&x| x == 0)
    }
}

impl fmt::Display for Mat2ModN {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let [a, b, c, d] = self.e;
        write!(f, "[[{a},{b}],[{c},{d}]] mod {}", self.n)
    }
}

impl Serialize for Mat2ModN {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let [a, b, c, d] = self.e;
        [[a, b], [c, d]].serialize(s)
    }
}

/// The level `(disc, l, k)` with its derived constants.
#[derive(Debug, Clone, Copy)]
struct Level {
    disc: i64,
    ell: u64,
    k: u32,
    n: u64,
    /// `disc (1 - disc) / 4 mod n`.
    c0: u64,
    /// `disc mod n`.
    d: u64,
    a: Mat2ModN,
    abar: Mat2ModN,
}

impl Level {
    fn new(disc: i64, ell: u64, k: u32) -> Result<Self> {
        ImQuadField::from_disc(disc)?;
        if !is_prime(ell) {
            return Err(Error::invalid(format!("{ell} is not prime")));
        }
        let n = ell
            .checked_pow(k)
            .filter(|&n| n <= BUDGET)
            .ok_or(Error::BudgetExceeded {
                size: ell.saturating_pow(k),
                limit: BUDGET,
            })?;
        let a = alpha_matrix_unchecked(disc, n);
        let abar = Mat2ModN::identity(n)
            .scale(disc.rem_euclid(n as i64) as u64)
            .sub(&a);
        Ok(Level {
            disc,
            ell,
            k,
            n,
            c0: a.e[1],
            d: a.e[3],
            a,
            abar,
        })
    }

    /// `x + y alpha` as a matrix.
    fn elem(&self, x: u64, y: u64) -> Mat2ModN {
        Mat2ModN::identity(self.n).scale(x).add(&self.a.scale(y))
    }

    fn class_rep(&self, m: &Mat2ModN) -> (u64, u64) {
        let n = self.n;
        let [m11, m12, m21, m22] = m.e;
        let t = (m12 + n - m.mulmod(m21, self.c0)) % n;
        let u = (m22 + 2 * n - m11 - m.mulmod(m21, self.d)) % n;
        (t, u)
    }

    fn class_matrix(&self, (t, u): (u64, u64)) -> Mat2ModN {
        Mat2ModN {
            e: [0, t, 0, u],
            n: self.n,
        }
    }

    fn in_span(&self, m: &Mat2ModN) -> bool {
        self.class_rep(m) == (0, 0)
    }

    fn ord(&self, x: u64) -> u32 {
        if x.is_multiple_of(self.n) {
            self.k
        } else {
            ord(x as i64, self.ell)
        }
    }

    fn disc_ord(&self) -> u32 {
        ord(self.disc, self.ell)
    }

    fn all_matrices(&self) -> impl ParallelIterator<Item = Mat2ModN> + '_ {
        let n = self.n;
        (0..n.pow(4))
            .into_par_iter()
            .map(move |i| Mat2ModN::from_index(i, n))
    }
}

fn alpha_matrix_unchecked(disc: i64, n: u64) -> Mat2ModN {
    Mat2ModN::new([0, disc * (1 - disc) / 4, 1, disc], n)
}

/// Multiplication by `alpha = (disc + sqrt(disc))/2` on `E_{l^k}` in the basis `(P, alpha P)`.
pub fn alpha_matrix(disc: i64, ell: u64, k: u32) -> Result<Mat2ModN> {
    ImQuadField::from_disc(disc)?;
    if !is_prime(ell) {
        return Err(Error::invalid(format!("{ell} is not prime")));
    }
    let n = ell
        .checked_pow(k)
        .ok_or_else(|| Error::invalid("modulus overflows"))?;
    Ok(alpha_matrix_unchecked(disc, n))
}

/// A matrix for `tau`: invertible with `T A = Abar T`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct TauModel {
    pub matrix: Mat2ModN,
}

impl TauModel {
    pub fn new(disc: i64, ell: u64, k: u32, matrix: Mat2ModN) -> Result<Self> {
        let lv = Level::new(disc, ell, k)?;
        Self::checked(&lv, matrix)
    }

    fn checked(lv: &Level, matrix: Mat2ModN) -> Result<Self> {
        if matrix.n != lv.n {
            return Err(Error::invalid("matrix modulus does not match the level"));
        }
        if matrix.inverse().is_none() || matrix.mul(&lv.a) != lv.abar.mul(&matrix) {
            return Err(Error::invalid(format!(
                "{matrix} does not model complex conjugation"
            )));
        }
        Ok(TauModel { matrix })
    }

    /// `[[1, disc], [0, -1]]`: conjugation when `P` is fixed by `tau`.
    pub fn canonical(disc: i64, ell: u64, k: u32) -> Result<Self> {
        let lv = Level::new(disc, ell, k)?;
        Self::checked(&lv, Mat2ModN::new([1, disc, 0, -1], lv.n))
    }

    /// Every valid `T` at this level, by exhaustive search.
    pub fn all(disc: i64, ell: u64, k: u32) -> Result<Vec<Self>> {
        let lv = Level::new(disc, ell, k)?;
        all_taus(&lv)
    }
}

fn all_taus(lv: &Level) -> Result<Vec<TauModel>> {
    let mut out: Vec<TauModel> = lv
        .all_matrices()
        .filter_map(|m| TauModel::checked(lv, m).ok())
        .collect();
    out.sort_by_key(|t| t.matrix);
    if out.is_empty() {
        return Err(Error::precondition("no invertible T with T A = Abar T"));
    }
    Ok(out)
}

fn taus_for(lv: &Level) -> Result<(Vec<TauModel>, bool)> {
    if lv.n <= ALL_TAU_LIMIT {
        Ok((all_taus(lv)?, true))
    } else {
        Ok((
            vec![TauModel::checked(
                lv,
                Mat2ModN::new([1, lv.disc, 0, -1], lv.n),
            )?],
            false,
        ))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PlusSubringReport {
    pub disc: i64,
    pub ell: u64,
    pub k: u32,
    pub commutant_count: u64,
    pub span_count: u64,
    pub holds: bool,
}

/// `{M : MA = AM} = span(I, A)`, by enumerating all of `M_2(Z/l^k)`.
pub fn plus_subring_check(disc: i64, ell: u64, k: u32) -> Result<PlusSubringReport> {
    let lv = Level::new(disc, ell, k)?;
    let span: BTreeSet<Mat2ModN> = (0..lv.n)
        .flat_map(|x| (0..lv.n).map(move |y| (x, y)))
        .map(|(x, y)| lv.elem(x, y))
        .collect();
    let (commutant_count, outside) = lv
        .all_matrices()
        .filter(|m| m.mul(&lv.a) == lv.a.mul(m))
        .map(|m| (1u64, !span.contains(&m) as u64))
        .reduce(|| (0, 0), |x, y| (x.0 + y.0, x.1 + y.1));
    let span_count = span.len() as u64;
    Ok(PlusSubringReport {
        disc,
        ell,
        k,
        commutant_count,
        span_count,
        holds: outside == 0 && commutant_count == span_count && span_count == lv.n * lv.n,
    })
}

/// Generators of `{x + y alpha invertible : l^m | y}` as matrices.
///
/// The model needs some invertible conjugator with `ord_l(y) = m` exactly;
/// values of `m` for which none exists are rejected.
fn gamma_kl_generators(lv: &Level, m: u32) -> Result<Vec<Mat2ModN>> {
    if !m_attainable(lv.disc, lv.ell, m) {
        return Err(Error::precondition(format!(
            "m({}) = {m} cannot occur for disc {}",
            lv.ell, lv.disc
        )));
    }
    let step = if m >= lv.k { lv.n } else { ipow(lv.ell, m) };
    let elems: Vec<Mat2ModN> = (0..lv.n)
        .flat_map(|x| (0..lv.n).step_by(step as usize).map(move |y| (x, y)))
        .map(|(x, y)| lv.elem(x, y))
        .filter(|g| g.inverse().is_some())
        .collect();
    let mut gens = Vec::new();
    let mut group: BTreeSet<Mat2ModN> = [Mat2ModN::identity(lv.n)].into();
    for g in elems {
        if group.contains(&g) {
            continue;
        }
        gens.push(g);
        // closure of an abelian group under the generators found so far
        let mut frontier: Vec<Mat2ModN> = group.iter().copied().collect();
        while let Some(x) = frontier.pop() {
            for h in &gens {
                let y = x.mul(h);
                if group.insert(y) {
                    frontier.push(y);
                }
            }
        }
    }
    Ok(gens)
}

fn conj(g: &Mat2ModN, m: &Mat2ModN) -> Mat2ModN {
    g.mul(m)
        .mul(&g.inverse().expect("conjugator is invertible"))
}

fn class_fixed_by(lv: &Level, gens: &[Mat2ModN], m: &Mat2ModN) -> bool {
    let rep = lv.class_rep(m);
    gens.iter().all(|g| lv.class_rep(&conj(g, m)) == rep)
}

fn endo_fixed_by(gens: &[Mat2ModN], m: &Mat2ModN) -> bool {
    gens.iter().all(|g| conj(g, m) == *m)
}

fn commutator(lv: &Level, m: &Mat2ModN) -> Mat2ModN {
    lv.a.mul(m).sub(&m.mul(&lv.a))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FixedClassReport {
    pub disc: i64,
    pub ell: u64,
    pub k: u32,
    pub m: u32,
    pub fixed_endos: u64,
    pub fixed_classes: u64,
    pub closed_form_classes: u64,
    /// Conjugation-fixed exactly when the commutator criterion holds, for
    /// endomorphisms and for classes.
    pub criterion_agrees: bool,
    pub holds: bool,
}

pub fn fixed_class_count(disc: i64, ell: u64, k: u32, m: u32) -> Result<FixedClassReport> {
    let lv = Level::new(disc, ell, k)?;
    let gens = gamma_kl_generators(&lv, m)?;
    let lm = if m >= k { 0 } else { ipow(ell, m) };
    let (fixed_endos, fixed_class_matrices, mismatches) = lv
        .all_matrices()
        .map(|x| {
            let crit = commutator(&lv, &x).scale(lm);
            let endo = endo_fixed_by(&gens, &x);
            let class = class_fixed_by(&lv, &gens, &x);
            let bad = (endo != crit.is_zero()) || (class != lv.in_span(&crit));
            (endo as u64, class as u64, bad as u64)
        })
        .reduce(|| (0, 0, 0), |a, b| (a.0 + b.0, a.1 + b.1, a.2 + b.2));
    let span = lv.n * lv.n;
    let fixed_classes = fixed_class_matrices / span;
    let v = lv.disc_ord();
    let closed_form_classes = ipow(ell, k.min(m + v / 2) + k.min(m + v.div_ceil(2)));
    Ok(FixedClassReport {
        disc,
        ell,
        k,
        m,
        fixed_endos,
        fixed_classes,
        closed_form_classes,
        criterion_agrees: mismatches == 0,
        holds: mismatches == 0 && fixed_classes == closed_form_classes,
    })
}

/// The five equivalences for `phi = (a + b alpha) T`, as predicates on
/// `(ord a, ord b)`.
fn tau_predictions(k: u32, m: u32, v: u32, oa: u32, ob: u32) -> [bool; 5] {
    let ge = |o: u32, bound: i64| o as i64 >= bound;
    let (k, m) = (k as i64, m as i64);
    let (fl, ce, v) = ((v / 2) as i64, v.div_ceil(2) as i64, v as i64);
    [
        ge(oa, k - m - v) && ge(ob, k - m - v),
        ge(ob, k - v),
        ge(oa, k - fl) && ge(ob, k - ce),
        ge(oa, k - m - fl) && ge(ob, k - m - ce),
        ge(ob, k - fl),
    ]
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TauCounterexample {
    pub part: u8,
    pub tau: Mat2ModN,
    pub a: u64,
    pub b: u64,
    pub observed: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TauLemmaReport {
    pub disc: i64,
    pub ell: u64,
    pub k: u32,
    pub m: u32,
    pub taus_checked: usize,
    pub all_taus: bool,
    pub pairs_checked: u64,
    pub counterexamples: Vec<TauCounterexample>,
    pub holds: bool,
}

fn tau_observations(lv: &Level, gens: &[Mat2ModN], t: &Mat2ModN, phi: &Mat2ModN) -> [bool; 5] {
    let tau_gen = [*t];
    [
        class_fixed_by(lv, gens, phi),
        class_fixed_by(lv, &tau_gen, phi),
        lv.in_span(phi),
        endo_fixed_by(gens, phi),
        endo_fixed_by(&tau_gen, phi),
    ]
}

pub fn tau_lemma_check(disc: i64, ell: u64, k: u32, m: u32) -> Result<TauLemmaReport> {
    let lv = Level::new(disc, ell, k)?;
    let gens = gamma_kl_generators(&lv, m)?;
    let (taus, all) = taus_for(&lv)?;
    let v = lv.disc_ord();
    let pairs: Vec<(u64, u64)> = (0..lv.n)
        .flat_map(|a| (0..lv.n).map(move |b| (a, b)))
        .collect();
    let counterexamples: Vec<TauCounterexample> = taus
        .par_iter()
        .flat_map_iter(|tau| {
            let t = tau.matrix;
            let (lv, gens) = (&lv, &gens);
            pairs.iter().flat_map(move |&(a, b)| {
                let phi = lv.elem(a, b).mul(&t);
                let obs = tau_observations(lv, gens, &t, &phi);
                let pred = tau_predictions(k, m, v, lv.ord(a), lv.ord(b));
                (0..5)
                    .filter(move |&i| obs[i] != pred[i])
                    .map(move |i| TauCounterexample {
                        part: i as u8 + 1,
                        tau: t,
                        a,
                        b,
                        observed: obs[i],
                    })
            })
        })
        .collect();
    Ok(TauLemmaReport {
        disc,
        ell,
        k,
        m,
        taus_checked: taus.len(),
        all_taus: all,
        pairs_checked: taus.len() as u64 * pairs.len() as u64,
        holds: counterexamples.is_empty(),
        counterexamples,
    })
}

/// Structure of a finite abelian `l`-group from `|G[l^j]|` for `j = 0..=k`.
fn structure_from_torsion(ell: u64, counts: &[u64]) -> BrauerStructure {
    let logs: Vec<u32> = counts.iter().map(|&c| log_exact(c, ell)).collect();
    // number of cyclic factors of exponent >= j is logs[j] - logs[j-1]
    let mut at_least: Vec<u32> = (1..logs.len()).map(|j| logs[j] - logs[j - 1]).collect();
    at_least.push(0);
    let mut factors = Vec::new();
    for j in 1..logs.len() {
        let exactly = at_least[j - 1] - at_least[j];
        factors.extend(std::iter::repeat_n((ell, j as u32), exactly as usize));
    }
    BrauerStructure::from_factors(factors)
}

fn log_exact(mut c: u64, ell: u64) -> u32 {
    let mut e = 0;
    while c > 1 {
        assert_eq!(c % ell, 0, "group order is not a power of {ell}");
        c /= ell;
        e += 1;
    }
    e
}

fn class_subgroup_structure(lv: &Level, classes: &[(u64, u64)]) -> BrauerStructure {
    let counts: Vec<u64> = (0..=lv.k)
        .map(|j| {
            let s = ipow(lv.ell, j);
            classes
                .iter()
                .filter(|&&(t, u)| (t * s).is_multiple_of(lv.n) && (u * s).is_multiple_of(lv.n))
                .count() as u64
        })
        .collect();
    structure_from_torsion(lv.ell, &counts)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CensusReport {
    pub tau: Mat2ModN,
    /// Classes fixed by `Gamma_{KL}`.
    pub kl_fixed: BrauerStructure,
    /// Classes fixed by `Gamma_{KL}` and `tau`.
    pub l_fixed: BrauerStructure,
    pub expected_kl: BrauerStructure,
    pub expected_l: BrauerStructure,
    pub holds: bool,
}

fn level_contexts(disc: i64, ell: u64, m: u32, full_two: bool) -> (CurveContext, CurveContext) {
    let mk = |inb| {
        CurveContext::new(
            disc,
            inb,
            [(ell, m)].into(),
            full_two,
            Provenance::UserSupplied,
        )
        .expect("level already validated")
    };
    (mk(true), mk(false))
}

/// Group structure of the fixed classes at level `k` for one `T`, against
/// the `l^k`-torsion of the theorem-derived structures.
pub fn structure_census(
    disc: i64,
    ell: u64,
    k: u32,
    m: u32,
    tau: &TauModel,
) -> Result<CensusReport> {
    let lv = Level::new(disc, ell, k)?;
    let tau = TauModel::checked(&lv, tau.matrix)?;
    let gens = gamma_kl_generators(&lv, m)?;
    Ok(census_at(&lv, &gens, m, &tau))
}

fn census_at(lv: &Level, gens: &[Mat2ModN], m: u32, tau: &TauModel) -> CensusReport {
    let reps: Vec<(u64, u64)> = (0..lv.n)
        .flat_map(|t| (0..lv.n).map(move |u| (t, u)))
        .collect();
    let kl: Vec<(u64, u64)> = reps
        .iter()
        .copied()
        .filter(|&r| class_fixed_by(lv, gens, &lv.class_matrix(r)))
        .collect();
    let l: Vec<(u64, u64)> = kl
        .iter()
        .copied()
        .filter(|&r| class_fixed_by(lv, &[tau.matrix], &lv.class_matrix(r)))
        .collect();
    let kl_fixed = class_subgroup_structure(lv, &kl);
    let l_fixed = class_subgroup_structure(lv, &l);
    let (inside, outside) = level_contexts(lv.disc, lv.ell, m, false);
    let expected_kl = geometric_structure(&inside, lv.ell)
        .expect("prime")
        .truncate(lv.k);
    let expected_l = geometric_structure(&outside, lv.ell)
        .expect("prime")
        .truncate(lv.k);
    CensusReport {
        tau: tau.matrix,
        holds: kl_fixed == expected_kl && l_fixed == expected_l,
        kl_fixed,
        l_fixed,
        expected_kl,
        expected_l,
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TranscendentalCensus {
    pub tau: Mat2ModN,
    pub level: u32,
    /// `T == I (mod 2)`, i.e. `tau` fixes `E_2` pointwise.
    pub full_two_torsion: bool,
    pub observed: BrauerStructure,
    pub expected: BrauerStructure,
    pub holds: bool,
}

/// `End_{Gamma_L} E_{l^t} / (O_K (x) Z/l^t)^{Gamma_L}` at `t = k`, for a
/// level `k > m`, against the quotient structure.
pub fn transcendental_census(
    disc: i64,
    ell: u64,
    k: u32,
    m: u32,
    tau: &TauModel,
) -> Result<TranscendentalCensus> {
    if k <= m {
        return Err(Error::invalid(
            "the quotient is only stable for levels k > m",
        ));
    }
    let lv = Level::new(disc, ell, k)?;
    let tau = TauModel::checked(&lv, tau.matrix)?;
    let gens = gamma_kl_generators(&lv, m)?;
    Ok(transcendental_at(&lv, &gens, m, &tau))
}

fn transcendental_at(
    lv: &Level,
    gens: &[Mat2ModN],
    m: u32,
    tau: &TauModel,
) -> TranscendentalCensus {
    let t = tau.matrix;
    let fixed: Vec<Mat2ModN> = lv
        .all_matrices()
        .filter(|x| endo_fixed_by(gens, x) && endo_fixed_by(&[t], x))
        .collect();
    let sub = fixed.iter().filter(|x| lv.in_span(x)).count() as u64;
    let counts: Vec<u64> = (0..=lv.k)
        .map(|j| {
            let s = ipow(lv.ell, j);
            fixed.iter().filter(|x| lv.in_span(&x.scale(s))).count() as u64 / sub
        })
        .collect();
    let observed = structure_from_torsion(lv.ell, &counts);
    let full_two = lv.ell == 2 && t.e.iter().zip([1, 0, 0, 1]).all(|(&x, y)| x % 2 == y);
    let (_, outside) = level_contexts(lv.disc, lv.ell, m, full_two);
    let expected = transcendental_structure(&outside, lv.ell).expect("prime");
    TranscendentalCensus {
        tau: t,
        level: lv.k,
        full_two_torsion: full_two,
        holds: observed == expected,
        observed,
        expected,
    }
}

/// Every check at one level.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MatrixCertificate {
    pub alpha: Mat2ModN,
    pub plus_subring: PlusSubringReport,
    pub fixed_classes: FixedClassReport,
    pub tau_lemma: TauLemmaReport,
    pub census_taus: usize,
    pub census_all_taus: bool,
    /// The first census result; all others are required to agree.
    pub census: CensusReport,
    pub census_failures: Vec<CensusReport>,
    /// Quotient census at level `m + 1` when that is within budget.
    pub transcendental: Vec<TranscendentalCensus>,
    pub holds: bool,
}

pub fn certify(disc: i64, ell: u64, k: u32, m: u32) -> Result<MatrixCertificate> {
    let lv = Level::new(disc, ell, k)?;
    let plus_subring = plus_subring_check(disc, ell, k)?;
    let fixed_classes = fixed_class_count(disc, ell, k, m)?;
    let tau_lemma = tau_lemma_check(disc, ell, k, m)?;
    let gens = gamma_kl_generators(&lv, m)?;
    let (taus, all) = taus_for(&lv)?;
    let censuses: Vec<CensusReport> = taus
        .par_iter()
        .map(|t| census_at(&lv, &gens, m, t))
        .collect();
    let census_failures: Vec<CensusReport> =
        censuses.iter().filter(|c| !c.holds).cloned().collect();

    let transcendental = match Level::new(disc, ell, m + 1) {
        Ok(tl) => {
            let tgens = gamma_kl_generators(&tl, m)?;
            let (ttaus, _) = taus_for(&tl)?;
            ttaus
                .par_iter()
                .map(|t| transcendental_at(&tl, &tgens, m, t))
                .collect()
        }
        Err(Error::BudgetExceeded { .. }) => Vec::new(),
        Err(e) => return Err(e),
    };
    let holds = plus_subring.holds
        && fixed_classes.holds
        && tau_lemma.holds
        && census_failures.is_empty()
        && transcendental.iter().all(|t| t.holds);
    Ok(MatrixCertificate {
        alpha: lv.a,
        plus_subring,
        fixed_classes,
        tau_lemma,
        census_taus: censuses.len(),
        census_all_taus: all,
        census: censuses.into_iter().next().expect("at least one T"),
        census_failures,
        transcendental,
        holds,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s(f: &[(u64, u32)]) -> BrauerStructure {
        BrauerStructure::from_factors(f.iter().copied())
    }

    #[test]
    fn alpha_examples() {
        assert_eq!(alpha_matrix(-3, 3, 1).unwrap().e, [0, 0, 1, 0]);
        assert_eq!(alpha_matrix(-4, 2, 2).unwrap().e, [0, 3, 1, 0]);
        assert_eq!(alpha_matrix(-11, 11, 1).unwrap().e, [0, 0, 1, 0]);
    }

    #[test]
    fn matrix_algebra() {
        let m = Mat2ModN::new([1, 2, 3, 4], 9);
        let inv = m.inverse().unwrap();
        assert_eq!(m.mul(&inv), Mat2ModN::identity(9));
        assert!(Mat2ModN::new([3, 0, 0, 3], 9).inverse().is_none());
    }

    #[test]
    fn plus_subring_examples() {
        for (d, l, k, c) in [(-3, 3, 1, 9), (-4, 2, 2, 16), (-11, 2, 1, 4)] {
            let r = plus_subring_check(d, l, k).unwrap();
            assert!(r.holds, "{r:?}");
            assert_eq!(r.commutant_count, c);
        }
    }

    #[test]
    fn fixed_class_examples() {
        assert_eq!(fixed_class_count(-3, 3, 2, 1).unwrap().fixed_classes, 27);
        assert_eq!(fixed_class_count(-11, 11, 1, 0).unwrap().fixed_classes, 11);
        let r = fixed_class_count(-7, 2, 2, 3).unwrap();
        assert_eq!(r.fixed_classes, 16);
        assert!(r.holds);
    }

    #[test]
    fn tau_lemma_examples() {
        assert!(tau_lemma_check(-3, 3, 1, 0).unwrap().holds);
        let r = tau_lemma_check(-4, 2, 2, 1).unwrap();
        assert!(
            r.holds,
            "{:?}",
            &r.counterexamples[..r.counterexamples.len().min(3)]
        );
        assert!(r.all_taus && r.taus_checked > 1);
    }

    #[test]
    fn census_examples() {
        let t = TauModel::canonical(-11, 11, 1).unwrap();
        assert_eq!(
            structure_census(-11, 11, 1, 0, &t).unwrap().l_fixed,
            s(&[(11, 1)])
        );
        for t in TauModel::all(-4, 2, 3).unwrap().iter().step_by(7) {
            let c = structure_census(-4, 2, 3, 1, t).unwrap();
            assert_eq!(c.l_fixed, s(&[(2, 1), (2, 2)]));
            assert!(c.holds);
        }
        let t = TauModel::canonical(-3, 5, 0).unwrap();
        assert!(structure_census(-3, 5, 0, 0, &t)
            .unwrap()
            .l_fixed
            .is_trivial());
    }

    #[test]
    fn attainability_matches_unit_search() {
        // some unit x + y alpha of O_K/l^{m+1} with l^m exactly dividing y
        for disc in [-3i64, -4, -7, -8, -11, -15, -23] {
            for ell in [2u64, 3, 5] {
                for m in 0..3 {
                    let lv = Level::new(disc, ell, 0).unwrap();
                    let n = ell.pow(m + 1);
                    let lm = ell.pow(m);
                    let exists = (0..n).any(|x| {
                        (0..n).filter(|y| y % lm == 0 && y % n != 0).any(|y| {
                            Mat2ModN::new([0, disc * (1 - disc) / 4, 1, disc], n)
                                .scale(y)
                                .add(&Mat2ModN::identity(n).scale(x))
                                .inverse()
                                .is_some()
                        })
                    });
                    assert_eq!(exists, m_attainable(lv.disc, ell, m), "{disc} {ell} {m}");
                }
            }
        }
        assert!(certify(-7, 2, 2, 0).is_err());
    }

    #[test]
    fn budget() {
        assert!(matches!(
            plus_subring_check(-3, 3, 4),
            Err(Error::BudgetExceeded { .. })
        ));
    }

    #[test]
    fn torsion_counts_to_structure() {
        // Z/4 x Z/2: |G[1]|=1, |G[2]|=4, |G[4]|=8
        assert_eq!(structure_from_torsion(2, &[1, 4, 8]), s(&[(2, 1), (2, 2)]));
        assert_eq!(structure_from_torsion(3, &[1]), BrauerStructure::trivial());
    }
}
