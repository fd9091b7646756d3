//! Congruence subgroups `Sp_{2g}(Z,p)` and `SL_n(Z,p)`.
//!
//! Symplectic matrices here use the block basis `(a_1..a_g, b_1..b_g)` with
//! `Ω = [[0, I], [-I, 0]]`.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use rand::Rng;
use serde::{Deserialize, Serialize};
use std::collections::VecDeque;
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::homology::{transvection, BasisOrder};
use crate::linalg::{determinant, inverse_integral, rank_mod_p, rank_q, EchelonFp};
pub use crate::linalg::IntMatrix;
use crate::matrix::Matrix;
use crate::nilpotent::is_prime;
use crate::surface::catalog;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Flavor {
    Sp,
    Sl,
}

impl FromStr for Flavor {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "sp" => Ok(Flavor::Sp),
            "sl" => Ok(Flavor::Sl),
            _ => Err(Error::Malformed(format!("unknown flavor `{s}` (expected sp or sl)"))),
        }
    }
}

impl fmt::Display for Flavor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Flavor::Sp => "sp",
            Flavor::Sl => "sl",
        })
    }
}

fn big(x: i64) -> BigInt {
    BigInt::from(x)
}

fn to_int(m: &Matrix<i64>) -> IntMatrix {
    m.map(|&x| big(x))
}

fn rem(x: &BigInt, m: u64) -> i64 {
    x.mod_floor(&BigInt::from(m)).to_i64().expect("residue fits")
}

/// `M ≡ I (mod q)`
pub fn congruent_to_identity(m: &IntMatrix, q: u64) -> bool {
    let n = m.nrows();
    m.is_square() && (0..n).all(|i| (0..n).all(|j| rem(&(&m[(i, j)] - big(i64::from(i == j))), q) == 0))
}

pub fn omega(g: usize) -> IntMatrix {
    Matrix::from_fn(2 * g, 2 * g, |i, j| {
        if j == i + g {
            BigInt::one()
        } else if i == j + g {
            -BigInt::one()
        } else {
            BigInt::zero()
        }
    })
}

fn zero_mod(m: &IntMatrix, modulus: u64) -> bool {
    if modulus == 0 {
        m.entries().all(Zero::is_zero)
    } else {
        m.entries().all(|x| rem(x, modulus) == 0)
    }
}

/// `MᵀΩM = Ω`, over `Z` for modulus 0 and over `Z/modulus` otherwise.
pub fn is_symplectic(m: &IntMatrix, modulus: u64) -> bool {
    if !m.is_square() || !m.nrows().is_multiple_of(2) {
        return false;
    }
    let w = omega(m.nrows() / 2);
    zero_mod(&m.transpose().mul(&w).mul(m).sub(&w), modulus)
}

/// `AᵀΩ + ΩA ≡ 0 (mod p)`
pub fn is_sp_lie(a: &Matrix<i64>, p: u64) -> bool {
    if !a.is_square() || !a.nrows().is_multiple_of(2) {
        return false;
    }
    let a = to_int(a);
    let w = omega(a.nrows() / 2);
    zero_mod(&a.transpose().mul(&w).add(&w.mul(&a)), p)
}

pub fn is_sl_lie(a: &Matrix<i64>, p: u64) -> bool {
    a.is_square() && (0..a.nrows()).map(|i| a[(i, i)]).sum::<i64>().rem_euclid(p as i64) == 0
}

/// Inverse of a symplectic matrix, `-Ω Mᵀ Ω`.
pub fn sp_inverse(m: &IntMatrix) -> IntMatrix {
    let w = omega(m.nrows() / 2);
    w.mul(&m.transpose()).mul(&w).scale(&-BigInt::one())
}

/// An element of `𝔰𝔭_{2g}(Z/p)` or `𝔰𝔩_n(Z/p)`, entries in `0..p`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct LieValue {
    pub flavor: Flavor,
    pub p: u64,
    pub entries: Matrix<i64>,
}

impl LieValue {
    pub fn new(flavor: Flavor, p: u64, entries: Matrix<i64>) -> Result<Self> {
        if p < 2 {
            return Err(Error::OutOfRange(format!("modulus {p}")));
        }
        let entries = entries.map(|x| x.rem_euclid(p as i64));
        let ok = match flavor {
            Flavor::Sp => is_sp_lie(&entries, p),
            Flavor::Sl => is_sl_lie(&entries, p),
        };
        if !ok {
            return Err(Error::Malformed(format!("{entries} is not in {flavor}(Z/{p})")));
        }
        Ok(LieValue { flavor, p, entries })
    }

    pub fn zero(flavor: Flavor, n: usize, p: u64) -> Self {
        LieValue { flavor, p, entries: Matrix::zeros(n, n) }
    }

    pub fn size(&self) -> usize {
        self.entries.nrows()
    }

    pub fn is_zero(&self) -> bool {
        self.entries.entries().all(|&x| x == 0)
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        if self.flavor != other.flavor || self.p != other.p || self.size() != other.size() {
            return Err(Error::Malformed("adding Lie values of different shapes".into()));
        }
        Ok(LieValue {
            flavor: self.flavor,
            p: self.p,
            entries: self.entries.add(&other.entries).map(|x| x.rem_euclid(self.p as i64)),
        })
    }
}

impl fmt::Debug for LieValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}(Z/{}) {}", self.flavor, self.p, self.entries)
    }
}

impl fmt::Display for LieValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.entries)
    }
}

#[derive(Serialize, Deserialize)]
struct LieRepr {
    flavor: Flavor,
    p: u64,
    rows: Vec<Vec<i64>>,
}

impl Serialize for LieValue {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        LieRepr { flavor: self.flavor, p: self.p, rows: self.entries.to_rows() }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for LieValue {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let r = LieRepr::deserialize(d)?;
        let m = Matrix::from_rows(r.rows).ok_or_else(|| D::Error::custom("ragged rows"))?;
        LieValue::new(r.flavor, r.p, m).map_err(D::Error::custom)
    }
}

/// `A` with `M = I + pA`.
fn level_quotient(m: &IntMatrix, p: u64) -> Result<IntMatrix> {
    if !congruent_to_identity(m, p) {
        return Err(Error::Precondition(format!("matrix is not congruent to the identity mod {p}: {m}")));
    }
    let n = m.nrows();
    let pb = BigInt::from(p);
    Ok(Matrix::from_fn(n, n, |i, j| (&m[(i, j)] - big(i64::from(i == j))) / &pb))
}

/// `ψ(I + pA) = A mod p`.
pub fn psi(m: &IntMatrix, p: u64, flavor: Flavor) -> Result<LieValue> {
    if p < 2 {
        return Err(Error::OutOfRange(format!("level {p}")));
    }
    if !m.is_square() {
        return Err(Error::Malformed(format!("{}x{} matrix is not square", m.nrows(), m.ncols())));
    }
    match flavor {
        Flavor::Sp if !is_symplectic(m, 0) => {
            return Err(Error::Precondition(format!("matrix is not symplectic: {m}")));
        }
        Flavor::Sl if !determinant(m).is_one() => {
            return Err(Error::Precondition(format!("matrix does not have determinant 1: {m}")));
        }
        _ => {}
    }
    let a = level_quotient(m, p)?;
    let entries = a.map(|x| rem(x, p));
    LieValue::new(flavor, p, entries).map_err(|e| Error::Internal(format!("psi left the Lie algebra: {e}")))
}

/// Standard basis elements of `𝔰𝔭_{2g}`: `P` blocks `[[E_ij, 0], [0, -E_ji]]`,
/// then `Q` blocks `[[0, S], [0, 0]]` and `R` blocks `[[0, 0], [S, 0]]` with
/// `S = E_ij + E_ji` (`i < j`) or `E_ii`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SpBasis {
    P(usize, usize),
    Q(usize, usize),
    R(usize, usize),
}

pub fn sp_basis_labels(g: usize) -> Vec<SpBasis> {
    let mut out = Vec::with_capacity(g * (2 * g + 1));
    for i in 0..g {
        for j in 0..g {
            out.push(SpBasis::P(i, j));
        }
    }
    for i in 0..g {
        for j in i..g {
            out.push(SpBasis::Q(i, j));
        }
    }
    for i in 0..g {
        for j in i..g {
            out.push(SpBasis::R(i, j));
        }
    }
    out
}

fn sym(g: usize, i: usize, j: usize) -> Matrix<i64> {
    Matrix::from_fn(g, g, |r, c| i64::from((r, c) == (i, j) || (r, c) == (j, i)))
}

fn sp_basis_matrix(g: usize, b: SpBasis) -> Matrix<i64> {
    let mut m = Matrix::zeros(2 * g, 2 * g);
    match b {
        SpBasis::P(i, j) => {
            m[(i, j)] = 1;
            m[(g + j, g + i)] = -1;
        }
        SpBasis::Q(i, j) => {
            let s = sym(g, i, j);
            for r in 0..g {
                for c in 0..g {
                    m[(r, g + c)] = s[(r, c)];
                }
            }
        }
        SpBasis::R(i, j) => {
            let s = sym(g, i, j);
            for r in 0..g {
                for c in 0..g {
                    m[(g + r, c)] = s[(r, c)];
                }
            }
        }
    }
    m
}

/// Standard basis of `𝔰𝔩_n`: `E_ij` for `i ≠ j`, then `E_ii - E_{i+1,i+1}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SlBasis {
    E(usize, usize),
    H(usize),
}

pub fn sl_basis_labels(n: usize) -> Vec<SlBasis> {
    let mut out: Vec<SlBasis> = (0..n)
        .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| SlBasis::E(i, j)))
        .collect();
    out.extend((0..n.saturating_sub(1)).map(SlBasis::H));
    out
}

fn sl_basis_matrix(n: usize, b: SlBasis) -> Matrix<i64> {
    let mut m = Matrix::zeros(n, n);
    match b {
        SlBasis::E(i, j) => m[(i, j)] = 1,
        SlBasis::H(i) => {
            m[(i, i)] = 1;
            m[(i + 1, i + 1)] = -1;
        }
    }
    m
}

/// Standard basis of the Lie algebra; `size` is `g` for `sp` and `n` for `sl`.
pub fn lie_basis(flavor: Flavor, size: usize, p: u64) -> Vec<LieValue> {
    let mats: Vec<Matrix<i64>> = match flavor {
        Flavor::Sp => sp_basis_labels(size).into_iter().map(|b| sp_basis_matrix(size, b)).collect(),
        Flavor::Sl => sl_basis_labels(size).into_iter().map(|b| sl_basis_matrix(size, b)).collect(),
    };
    mats.into_iter()
        .map(|m| LieValue { flavor, p, entries: m.map(|x| x.rem_euclid(p as i64)) })
        .collect()
}

/// Coordinates of an `𝔰𝔭` element in the standard basis.
pub fn sp_coordinates(a: &Matrix<i64>, p: u64) -> Vec<i64> {
    let g = a.nrows() / 2;
    sp_basis_labels(g)
        .into_iter()
        .map(|b| {
            let x = match b {
                SpBasis::P(i, j) => a[(i, j)],
                SpBasis::Q(i, j) => a[(i, g + j)],
                SpBasis::R(i, j) => a[(g + i, j)],
            };
            x.rem_euclid(p as i64)
        })
        .collect()
}

pub fn sp_from_coordinates(g: usize, v: &[i64], p: u64) -> Matrix<i64> {
    let mut m = Matrix::zeros(2 * g, 2 * g);
    for (b, &c) in sp_basis_labels(g).into_iter().zip(v) {
        m = m.add(&sp_basis_matrix(g, b).scale(&c));
    }
    m.map(|x| x.rem_euclid(p as i64))
}

fn block_p(a: &IntMatrix) -> IntMatrix {
    let g = a.nrows();
    let inv_t = inverse_integral(a).expect("unimodular block").transpose();
    Matrix::from_fn(2 * g, 2 * g, |r, c| match (r < g, c < g) {
        (true, true) => a[(r, c)].clone(),
        (false, false) => inv_t[(r - g, c - g)].clone(),
        _ => BigInt::zero(),
    })
}

fn block_q(s: &IntMatrix) -> IntMatrix {
    let g = s.nrows();
    Matrix::from_fn(2 * g, 2 * g, |r, c| {
        if r == c {
            BigInt::one()
        } else if r < g && c >= g {
            s[(r, c - g)].clone()
        } else {
            BigInt::zero()
        }
    })
}

fn block_r(s: &IntMatrix) -> IntMatrix {
    let g = s.nrows();
    Matrix::from_fn(2 * g, 2 * g, |r, c| {
        if r == c {
            BigInt::one()
        } else if r >= g && c < g {
            s[(r - g, c)].clone()
        } else {
            BigInt::zero()
        }
    })
}

/// `[[1+q, q], [-q, 1-q]]` on the coordinates `i`, `j`; determinant 1.
fn rotation_block(n: usize, i: usize, j: usize, q: i64) -> IntMatrix {
    let mut m = IntMatrix::identity(n);
    m[(i, i)] = big(1 + q);
    m[(i, j)] = big(q);
    m[(j, i)] = big(-q);
    m[(j, j)] = big(1 - q);
    m
}

fn elementary_scaled(n: usize, i: usize, j: usize, k: i64) -> IntMatrix {
    let mut m = IntMatrix::identity(n);
    m[(i, j)] = big(k);
    m
}

fn sp_lift(g: usize, b: SpBasis, q: i64) -> IntMatrix {
    match b {
        SpBasis::P(i, j) if i != j => block_p(&elementary_scaled(g, i, j, q)),
        SpBasis::P(i, _) => {
            let s = to_int(&sym(g, i, i)).scale(&big(q));
            rotation_block(2 * g, i, g + i, q).mul(&sp_inverse(&block_q(&s))).mul(&block_r(&s))
        }
        SpBasis::Q(i, j) => block_q(&to_int(&sym(g, i, j)).scale(&big(q))),
        SpBasis::R(i, j) => block_r(&to_int(&sym(g, i, j)).scale(&big(q))),
    }
}

fn sl_lift(n: usize, b: SlBasis, q: i64) -> IntMatrix {
    match b {
        SlBasis::E(i, j) => elementary_scaled(n, i, j, q),
        SlBasis::H(i) => rotation_block(n, i, i + 1, q)
            .mul(&elementary_scaled(n, i, i + 1, -q))
            .mul(&elementary_scaled(n, i + 1, i, q)),
    }
}

fn level_as_i64(q: u64) -> Result<i64> {
    if q < 1 {
        return Err(Error::OutOfRange(format!("level {q}")));
    }
    i64::try_from(q).map_err(|_| Error::OutOfRange(format!("level {q}")))
}

/// Lift of a standard basis element `X` to a matrix `M ≡ I + qX (mod q²)` in
/// the level-`q` subgroup.
pub fn lift_generator(x: &LieValue, q: u64) -> Result<IntMatrix> {
    let qi = level_as_i64(q)?;
    let n = x.size();
    if x.is_zero() {
        return Ok(IntMatrix::identity(n));
    }
    let hit = match x.flavor {
        Flavor::Sp => {
            let g = n / 2;
            sp_basis_labels(g)
                .into_iter()
                .find(|&b| sp_basis_matrix(g, b).map(|v| v.rem_euclid(x.p as i64)) == x.entries)
                .map(|b| sp_lift(g, b, qi))
        }
        Flavor::Sl => sl_basis_labels(n)
            .into_iter()
            .find(|&b| sl_basis_matrix(n, b).map(|v| v.rem_euclid(x.p as i64)) == x.entries)
            .map(|b| sl_lift(n, b, qi)),
    };
    hit.ok_or_else(|| Error::Precondition(format!("{x:?} is not a standard basis element")))
}

pub fn lift_sp_generator(x: &LieValue, p: u64) -> Result<IntMatrix> {
    if x.flavor != Flavor::Sp {
        return Err(Error::Precondition("lift_sp_generator needs an sp element".into()));
    }
    lift_generator(x, p)
}

fn check_index(n: usize, i: usize, j: usize) -> Result<()> {
    if i == j || i == 0 || j == 0 || i > n || j > n {
        return Err(Error::OutOfRange(format!("elementary matrix index ({i},{j}) for n={n}")));
    }
    Ok(())
}

/// `e_ij`, 1-based.
pub fn elementary(n: usize, i: usize, j: usize) -> Result<IntMatrix> {
    elementary_power(n, i, j, 1)
}

/// `e_ij^k`, 1-based.
pub fn elementary_power(n: usize, i: usize, j: usize, k: i64) -> Result<IntMatrix> {
    check_index(n, i, j)?;
    Ok(elementary_scaled(n, i - 1, j - 1, k))
}

fn unimodular_inverse(m: &IntMatrix) -> Result<IntMatrix> {
    if !m.is_square() {
        return Err(Error::Malformed("non-square matrix has no inverse".into()));
    }
    inverse_integral(m).ok_or_else(|| Error::Precondition(format!("matrix is not invertible over Z: {m}")))
}

/// `MNM⁻¹N⁻¹`
pub fn commutator(m: &IntMatrix, n: &IntMatrix) -> Result<IntMatrix> {
    if m.nrows() != n.nrows() {
        return Err(Error::RankMismatch(m.nrows(), n.nrows()));
    }
    Ok(m.mul(n).mul(&unimodular_inverse(m)?).mul(&unimodular_inverse(n)?))
}

/// `e_ij^q` for all `i ≠ j`.
pub fn bms_generators(n: usize, q: u64) -> Result<Vec<IntMatrix>> {
    if n < 3 || q < 2 {
        return Err(Error::OutOfRange(format!("bms generators need n>=3, q>=2 (got n={n}, q={q})")));
    }
    let qi = level_as_i64(q)?;
    Ok((0..n)
        .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
        .map(|(i, j)| elementary_scaled(n, i, j, qi))
        .collect())
}

/// Random elements of the level-`p` subgroup: words in the basis lifts, their
/// inverses and level-`p²` lifts, conjugated by a short word in level-1 lifts.
pub struct LevelSampler {
    pub flavor: Flavor,
    pub p: u64,
    factors: Vec<IntMatrix>,
    deep: Vec<IntMatrix>,
    conjugators: Vec<IntMatrix>,
}

impl LevelSampler {
    pub fn new(flavor: Flavor, size: usize, p: u64) -> Result<Self> {
        let basis = lie_basis(flavor, size, p);
        let lifts = |q: u64| -> Result<Vec<IntMatrix>> { basis.iter().map(|x| lift_generator(x, q)).collect() };
        let mut factors = lifts(p)?;
        let invs = factors.iter().map(unimodular_inverse).collect::<Result<Vec<_>>>()?;
        factors.extend(invs);
        let mut conjugators = lifts(1)?;
        let invs = conjugators.iter().map(unimodular_inverse).collect::<Result<Vec<_>>>()?;
        conjugators.extend(invs);
        Ok(LevelSampler { flavor, p, factors, deep: lifts(p * p)?, conjugators })
    }

    pub fn matrix_size(&self) -> usize {
        self.factors[0].nrows()
    }

    pub fn sample<R: Rng>(&self, rng: &mut R, len: usize) -> IntMatrix {
        let n = self.matrix_size();
        let mut m = IntMatrix::identity(n);
        for _ in 0..len {
            let f = if rng.gen_ratio(1, 4) {
                &self.deep[rng.gen_range(0..self.deep.len())]
            } else {
                &self.factors[rng.gen_range(0..self.factors.len())]
            };
            m = m.mul(f);
        }
        for _ in 0..rng.gen_range(0..=2) {
            let c = &self.conjugators[rng.gen_range(0..self.conjugators.len())];
            m = c.mul(&m).mul(&unimodular_inverse(c).expect("unimodular"));
        }
        m
    }
}

/// Images of the catalog twists in `Sp_{2g}(Z)`, block order.
pub fn catalog_symplectic_generators(g: usize) -> Vec<IntMatrix> {
    catalog(g)
        .into_iter()
        .map(|c| to_int(transvection(&c.class(g)).to_order(BasisOrder::Block).rows()))
        .collect()
}

/// Conjugation action `X ↦ S X S⁻¹` on `𝔰𝔭_{2g}(Z/p)` in standard coordinates,
/// one matrix per catalog twist.
pub fn sp_adjoint_generators(g: usize, p: u64) -> Vec<Matrix<i64>> {
    let d = g * (2 * g + 1);
    let basis = lie_basis(Flavor::Sp, g, p);
    catalog_symplectic_generators(g)
        .into_iter()
        .map(|s| {
            let si = sp_inverse(&s);
            let mut act = Matrix::zeros(d, d);
            for (k, x) in basis.iter().enumerate() {
                let img = s.mul(&to_int(&x.entries)).mul(&si).map(|v| rem(v, p));
                for (r, c) in sp_coordinates(&img, p).into_iter().enumerate() {
                    act[(r, k)] = c;
                }
            }
            act
        })
        .collect()
}

/// Smallest subspace containing `seeds` and stable under `gens`.
pub fn spin_submodule(seeds: &[Vec<i64>], gens: &[Matrix<i64>], p: u64) -> EchelonFp {
    let d = gens.first().map_or_else(|| seeds.first().map_or(0, Vec::len), Matrix::nrows);
    let mut ech = EchelonFp::new(p, d);
    let mut queue = VecDeque::new();
    let red = |v: &[i64]| -> Vec<u64> { v.iter().map(|&x| x.rem_euclid(p as i64) as u64).collect() };
    for s in seeds {
        if ech.insert(&red(s)) {
            queue.push_back(s.clone());
        }
    }
    while let Some(v) = queue.pop_front() {
        for g in gens {
            let w: Vec<i64> = g.mul_vec(&v).into_iter().map(|x| x.rem_euclid(p as i64)).collect();
            if ech.insert(&red(&w)) {
                queue.push_back(w);
            }
        }
    }
    ech
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IrreducibilityReport {
    pub g: usize,
    pub p: u64,
    pub dimension: usize,
    pub seeds_checked: usize,
    pub irreducible: bool,
    /// a proper nonzero invariant subspace of least dimension, when one exists
    pub invariant: Option<Vec<LieValue>>,
}

const SPIN_LIMIT: u128 = 1 << 20;

/// Spins every nonzero vector of `𝔰𝔭_{2g}(Z/p)` up to scalars (basis vectors
/// first) and reports the smallest invariant subspace met.
pub fn sp_irreducibility(g: usize, p: u64) -> Result<IrreducibilityReport> {
    if !is_prime(p) {
        return Err(Error::UnsupportedModulus(p));
    }
    if !(1..=2).contains(&g) {
        return Err(Error::SizeGuard(format!("irreducibility is only checked for g<=2 (got {g})")));
    }
    let d = g * (2 * g + 1);
    let total = (p as u128).checked_pow(d as u32).unwrap_or(u128::MAX);
    if total > SPIN_LIMIT {
        return Err(Error::SizeGuard(format!("{total} vectors in sp_{}(Z/{p}) exceeds {SPIN_LIMIT}", 2 * g)));
    }
    let gens = sp_adjoint_generators(g, p);
    let mut seeds: Vec<Vec<i64>> = (0..d).map(|k| (0..d).map(|i| i64::from(i == k)).collect()).collect();
    let mut v = vec![0i64; d];
    for _ in 1..total {
        for x in v.iter_mut() {
            *x += 1;
            if *x < p as i64 {
                break;
            }
            *x = 0;
        }
        let lead = v.iter().find(|&&x| x != 0).copied();
        if lead == Some(1) && v.iter().filter(|&&x| x != 0).count() > 1 {
            seeds.push(v.clone());
        }
    }
    let mut best: Option<EchelonFp> = None;
    for s in &seeds {
        let sub = spin_submodule(std::slice::from_ref(s), &gens, p);
        if sub.dim() < best.as_ref().map_or(d, EchelonFp::dim) {
            let done = sub.dim() == 1;
            best = Some(sub);
            if done {
                break;
            }
        }
    }
    let invariant = best.map(|sub| {
        sub.basis()
            .into_iter()
            .map(|b| {
                let v: Vec<i64> = b.into_iter().map(|x| x as i64).collect();
                LieValue { flavor: Flavor::Sp, p, entries: sp_from_coordinates(g, &v, p) }
            })
            .collect()
    });
    Ok(IrreducibilityReport { g, p, dimension: d, seeds_checked: seeds.len(), irreducible: invariant.is_none(), invariant })
}

pub fn sp_irreducible(g: usize, p: u64) -> Result<bool> {
    Ok(sp_irreducibility(g, p)?.irreducible)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Field {
    Rationals,
    Prime(u64),
}

/// `dim M - rank span{x - g·x}`
pub fn coinvariants(gens: &[Matrix<i64>], d: usize, field: Field) -> Result<usize> {
    if gens.iter().any(|g| g.nrows() != d || g.ncols() != d) {
        return Err(Error::Malformed(format!("action matrices must be {d}x{d}")));
    }
    let rows: Vec<Vec<i64>> = gens
        .iter()
        .flat_map(|g| {
            let t = Matrix::identity(d).sub(g).transpose();
            t.to_rows()
        })
        .collect();
    if rows.is_empty() {
        return Ok(d);
    }
    let rank = match field {
        Field::Rationals => rank_q(&to_int(&Matrix::from_rows(rows).expect("rectangular"))),
        Field::Prime(p) => {
            if !is_prime(p) {
                return Err(Error::UnsupportedModulus(p));
            }
            let red: Vec<Vec<u64>> =
                rows.iter().map(|r| r.iter().map(|&x| x.rem_euclid(p as i64) as u64).collect()).collect();
            rank_mod_p(&red, p)
        }
    };
    Ok(d - rank)
}

/// The four subgroups of `SL_n(Z)` with first column `e_1`:
/// `G` (lower block in `Γ_{n-1}(p)`, tail in `pZ`), `Ĝ` (tail in `Z`),
/// `K` (lower block `I`, tail in `pZ`) and `K̂` (tail in `Z`).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CharneyGroup {
    G,
    Ghat,
    K,
    Khat,
}

impl FromStr for CharneyGroup {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "G" => Ok(CharneyGroup::G),
            "Ghat" => Ok(CharneyGroup::Ghat),
            "K" => Ok(CharneyGroup::K),
            "Khat" => Ok(CharneyGroup::Khat),
            _ => Err(Error::Malformed(format!("unknown subgroup `{s}` (expected G, Ghat, K or Khat)"))),
        }
    }
}

pub fn charney_membership(m: &IntMatrix, which: CharneyGroup, n: usize, p: u64) -> Result<bool> {
    if m.nrows() != n || m.ncols() != n {
        return Err(Error::RankMismatch(m.nrows(), n));
    }
    if n < 2 || p < 2 {
        return Err(Error::OutOfRange(format!("charney subgroups need n>=2, p>=2 (got n={n}, p={p})")));
    }
    if (0..n).any(|i| m[(i, 0)] != big(i64::from(i == 0))) || !determinant(m).is_one() {
        return Ok(false);
    }
    let lower: IntMatrix = Matrix::from_fn(n - 1, n - 1, |i, j| m[(i + 1, j + 1)].clone());
    let tail_ok = |q: u64| (1..n).all(|j| rem(&m[(0, j)], q) == 0);
    Ok(match which {
        CharneyGroup::G => congruent_to_identity(&lower, p) && tail_ok(p),
        CharneyGroup::Ghat => congruent_to_identity(&lower, p),
        CharneyGroup::K => lower.is_identity() && tail_ok(p),
        CharneyGroup::Khat => lower.is_identity(),
    })
}

/// Random member of a Charney subgroup.
pub fn charney_sample<R: Rng>(which: CharneyGroup, n: usize, p: u64, rng: &mut R) -> IntMatrix {
    let pi = p as i64;
    let mut lower = IntMatrix::identity(n - 1);
    if matches!(which, CharneyGroup::G | CharneyGroup::Ghat) && n >= 3 {
        for _ in 0..rng.gen_range(0..=4) {
            let i = rng.gen_range(0..n - 1);
            let j = (i + rng.gen_range(1..n - 1)) % (n - 1);
            let s = if rng.gen_bool(0.5) { pi } else { -pi };
            lower = lower.mul(&elementary_scaled(n - 1, i, j, s));
        }
    }
    let step = if matches!(which, CharneyGroup::G | CharneyGroup::K) { pi } else { 1 };
    Matrix::from_fn(n, n, |i, j| match (i, j) {
        (0, 0) => BigInt::one(),
        (0, _) => big(step * rng.gen_range(-3..=3)),
        (_, 0) => BigInt::zero(),
        _ => lower[(i - 1, j - 1)].clone(),
    })
}

/// Multiplies the first-row tail by `k`; maps `K̂` onto `K` for `k = p`.
pub fn scale_tail(m: &IntMatrix, k: i64) -> IntMatrix {
    let mut out = m.clone();
    for j in 1..m.ncols() {
        out[(0, j)] = &m[(0, j)] * big(k);
    }
    out
}

/// Divides the first-row tail by `k`, if every entry is divisible.
pub fn divide_tail(m: &IntMatrix, k: i64) -> Option<IntMatrix> {
    let kb = big(k);
    let mut out = m.clone();
    for j in 1..m.ncols() {
        let (q, r) = m[(0, j)].div_rem(&kb);
        if !r.is_zero() {
            return None;
        }
        out[(0, j)] = q;
    }
    Some(out)
}

/// A certificate `target = Π [x_k, y_k]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CommutatorWitness {
    pub target: IntMatrix,
    pub pairs: Vec<(IntMatrix, IntMatrix)>,
}

impl CommutatorWitness {
    pub fn product(&self) -> Result<IntMatrix> {
        let mut out = IntMatrix::identity(self.target.nrows());
        for (x, y) in &self.pairs {
            out = out.mul(&commutator(x, y)?);
        }
        Ok(out)
    }

    /// Every factor lies in the level-`p` subgroup and the product is the target.
    pub fn verify(&self, flavor: Flavor, p: u64) -> Result<bool> {
        let in_group = |m: &IntMatrix| match flavor {
            Flavor::Sp => is_symplectic(m, 0),
            Flavor::Sl => determinant(m).is_one(),
        };
        let factors_ok = self
            .pairs
            .iter()
            .all(|(x, y)| in_group(x) && in_group(y) && congruent_to_identity(x, p) && congruent_to_identity(y, p));
        Ok(factors_ok && self.product()? == self.target)
    }

    fn inverse(&self) -> Result<Self> {
        Ok(CommutatorWitness {
            target: unimodular_inverse(&self.target)?,
            pairs: self.pairs.iter().rev().map(|(x, y)| (y.clone(), x.clone())).collect(),
        })
    }

    fn conjugate(&self, c: &IntMatrix) -> Result<Self> {
        let ci = unimodular_inverse(c)?;
        let conj = |m: &IntMatrix| c.mul(m).mul(&ci);
        Ok(CommutatorWitness {
            target: conj(&self.target),
            pairs: self.pairs.iter().map(|(x, y)| (conj(x), conj(y))).collect(),
        })
    }

    fn then(mut self, other: Self) -> Self {
        self.target = self.target.mul(&other.target);
        self.pairs.extend(other.pairs);
        self
    }
}

fn third_index(n: usize, i: usize, j: usize) -> usize {
    (0..n).find(|&k| k != i && k != j).expect("n >= 3")
}

/// `e_ij^{p²} = [e_ik^p, e_kj^p]`, 1-based.
pub fn sl_commutator_witness(n: usize, i: usize, j: usize, p: u64) -> Result<CommutatorWitness> {
    check_index(n, i, j)?;
    if n < 3 {
        return Err(Error::Precondition(format!("commutator witnesses need n>=3 (got {n})")));
    }
    let pi = level_as_i64(p)?;
    let (i, j) = (i - 1, j - 1);
    let k = third_index(n, i, j);
    Ok(CommutatorWitness {
        target: elementary_scaled(n, i, j, pi * pi),
        pairs: vec![(elementary_scaled(n, i, k, pi), elementary_scaled(n, k, j, pi))],
    })
}

struct SpWitnessBuilder {
    g: usize,
    p: i64,
}

impl SpWitnessBuilder {
    fn pmat(&self, i: usize, j: usize, k: i64) -> IntMatrix {
        block_p(&elementary_scaled(self.g, i, j, k))
    }

    fn qmat(&self, s: &Matrix<i64>, k: i64) -> IntMatrix {
        block_q(&to_int(s).scale(&big(k)))
    }

    /// `Q(p²(E_ij + E_ji))`, `i ≠ j`
    fn q_off(&self, i: usize, j: usize) -> CommutatorWitness {
        let (g, p) = (self.g, self.p);
        let k = third_index(g, i, j);
        CommutatorWitness {
            target: self.qmat(&sym(g, i, j), p * p),
            pairs: vec![(self.pmat(i, k, p), self.qmat(&sym(g, k, j), p))],
        }
    }

    /// `Q(p² E_ii) = Q(2p² E_ii)^{(p+1)/2} · Q(p²(E_ik + E_ki)) · Q(p²(E_ik + E_ki) + p³ E_ii)⁻¹`
    fn q_diag(&self, i: usize) -> CommutatorWitness {
        let (g, p) = (self.g, self.p);
        let k = third_index(g, i, i);
        let double = (self.pmat(i, k, p), self.qmat(&sym(g, i, k), p));
        let mut pairs = vec![double; ((p + 1) / 2) as usize];
        pairs.extend(self.q_off(i, k).pairs);
        pairs.push((self.qmat(&sym(g, k, k), p), self.pmat(i, k, p)));
        CommutatorWitness { target: self.qmat(&sym(g, i, i), p * p), pairs }
    }

    fn q_any(&self, i: usize, j: usize) -> CommutatorWitness {
        if i == j {
            self.q_diag(i)
        } else {
            self.q_off(i, j)
        }
    }

    /// `Ω Q(S) Ω⁻¹ = R(-S)`
    fn r_any(&self, i: usize, j: usize) -> Result<CommutatorWitness> {
        self.q_any(i, j).inverse()?.conjugate(&omega(self.g))
    }

    fn build(&self, b: SpBasis) -> Result<CommutatorWitness> {
        let (g, p) = (self.g, self.p);
        Ok(match b {
            SpBasis::P(i, j) if i != j => {
                let k = third_index(g, i, j);
                CommutatorWitness {
                    target: self.pmat(i, j, p * p),
                    pairs: vec![(self.pmat(i, k, p), self.pmat(k, j, p))],
                }
            }
            SpBasis::P(i, _) => {
                // the rotation block is the conjugate of Q(p² E_ii) by R(-E_ii)
                let c = block_r(&to_int(&sym(g, i, i)).scale(&big(-1)));
                self.q_diag(i).conjugate(&c)?.then(self.q_diag(i).inverse()?).then(self.r_any(i, i)?)
            }
            SpBasis::Q(i, j) => self.q_any(i, j),
            SpBasis::R(i, j) => self.r_any(i, j)?,
        })
    }
}

/// Certificates that the level-`p²` lift of each standard basis element of
/// `𝔰𝔭_{2g}` is a product of commutators of level-`p` matrices (`g ≥ 3`).
pub fn sp_commutator_witnesses(g: usize, p: u64) -> Result<Vec<(LieValue, CommutatorWitness)>> {
    if g < 3 || p < 3 || p.is_multiple_of(2) {
        return Err(Error::Precondition(format!("commutator witnesses need g>=3 and odd p>=3 (got g={g}, p={p})")));
    }
    let b = SpWitnessBuilder { g, p: level_as_i64(p)? };
    let basis = lie_basis(Flavor::Sp, g, p);
    sp_basis_labels(g)
        .into_iter()
        .zip(basis)
        .map(|(label, x)| {
            let w = b.build(label)?;
            if w.target != lift_generator(&x, p * p)? {
                return Err(Error::Internal(format!("witness target differs from the lift of {x:?}")));
            }
            Ok((x, w))
        })
        .collect()
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum Entry {
    Int(i64),
    Text(String),
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum MatrixRepr {
    Wrapped { rows: Vec<Vec<Entry>> },
    Bare(Vec<Vec<Entry>>),
}

/// Reads `{"rows": [[..], ..]}` or a bare array of rows; entries too large for
/// `i64` may be given as decimal strings.
pub fn int_matrix_from_json(s: &str) -> Result<IntMatrix> {
    let repr: MatrixRepr = serde_json::from_str(s).map_err(|e| Error::Malformed(e.to_string()))?;
    let rows = match repr {
        MatrixRepr::Wrapped { rows } | MatrixRepr::Bare(rows) => rows,
    };
    let rows = rows
        .into_iter()
        .map(|r| {
            r.into_iter()
                .map(|e| match e {
                    Entry::Int(x) => Ok(big(x)),
                    Entry::Text(t) => t.trim().parse().map_err(|_| Error::Malformed(format!("bad integer `{t}`"))),
                })
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    let m = Matrix::from_rows(rows).ok_or_else(|| Error::Malformed("ragged rows".into()))?;
    if !m.is_square() {
        return Err(Error::Malformed(format!("{}x{} matrix is not square", m.nrows(), m.ncols())));
    }
    Ok(m)
}

pub fn int_matrix_to_json(m: &IntMatrix) -> String {
    let rows: Vec<Vec<Entry>> = m
        .to_rows()
        .into_iter()
        .map(|r| r.into_iter().map(|x| x.to_i64().map_or_else(|| Entry::Text(x.to_string()), Entry::Int)).collect())
        .collect();
    serde_json::to_string(&MatrixRepr::Wrapped { rows }).expect("serializable")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn im(rows: &[&[i64]]) -> IntMatrix {
        to_int(&Matrix::from_rows(rows.iter().map(|r| r.to_vec()).collect()).unwrap())
    }

    #[test]
    fn omega_and_lie_conditions() {
        assert_eq!(omega(1), im(&[&[0, 1], &[-1, 0]]));
        assert!(is_symplectic(&IntMatrix::identity(4), 0));
        assert!(is_sp_lie(&Matrix::from_rows(vec![vec![0, 1], vec![0, 0]]).unwrap(), 3));
        assert!(!is_sp_lie(&Matrix::from_rows(vec![vec![1, 0], vec![0, 1]]).unwrap(), 3));
        assert!(is_sp_lie(&Matrix::from_rows(vec![vec![1, 0], vec![0, 1]]).unwrap(), 2));
    }

    #[test]
    fn psi_examples() {
        let m = im(&[&[1, 3], &[0, 1]]);
        let x = psi(&m, 3, Flavor::Sp).unwrap();
        assert_eq!(x.entries, Matrix::from_rows(vec![vec![0, 1], vec![0, 0]]).unwrap());
        let m2 = m.mul(&m);
        assert_eq!(m2, IntMatrix::identity(2).add(&im(&[&[0, 2], &[0, 0]]).scale(&big(3))));
        assert_eq!(psi(&m2, 3, Flavor::Sp).unwrap().entries, Matrix::from_rows(vec![vec![0, 2], vec![0, 0]]).unwrap());
        assert!(psi(&IntMatrix::identity(4), 5, Flavor::Sp).unwrap().is_zero());
        assert!(matches!(psi(&im(&[&[1, 1], &[0, 1]]), 3, Flavor::Sp), Err(Error::Precondition(_))));
        assert!(matches!(psi(&im(&[&[4, 0], &[0, 1]]), 3, Flavor::Sl), Err(Error::Precondition(_))));
    }

    #[test]
    fn lifts_of_basis_elements() {
        let x = LieValue::new(Flavor::Sp, 3, Matrix::from_rows(vec![vec![0, 1], vec![0, 0]]).unwrap()).unwrap();
        assert_eq!(lift_sp_generator(&x, 3).unwrap(), im(&[&[1, 3], &[0, 1]]));
        assert_eq!(lift_sp_generator(&LieValue::zero(Flavor::Sp, 4, 3), 3).unwrap(), IntMatrix::identity(4));
        for (flavor, size, count) in [(Flavor::Sp, 1, 3), (Flavor::Sp, 2, 10), (Flavor::Sl, 3, 8), (Flavor::Sl, 4, 15)] {
            for p in [3u64, 5] {
                let basis = lie_basis(flavor, size, p);
                assert_eq!(basis.len(), count);
                for b in &basis {
                    let m = lift_generator(b, p).unwrap();
                    assert_eq!(&psi(&m, p, flavor).unwrap(), b);
                }
            }
        }
        let not_basis =
            LieValue::new(Flavor::Sp, 3, Matrix::from_rows(vec![vec![0, 2], vec![0, 0]]).unwrap()).unwrap();
        assert!(lift_sp_generator(&not_basis, 3).is_err());
    }

    #[test]
    fn elementary_commutators() {
        let c = commutator(&elementary(3, 2, 1).unwrap(), &elementary(3, 1, 3).unwrap()).unwrap();
        assert_eq!(c, elementary(3, 2, 3).unwrap());
        let m = elementary(4, 1, 2).unwrap();
        assert!(commutator(&m, &IntMatrix::identity(4)).unwrap().is_identity());
        assert!(elementary(3, 2, 2).is_err());
        let gens = bms_generators(3, 5).unwrap();
        assert_eq!(gens.len(), 6);
        assert_eq!(gens[0][(0, 1)], big(5));
        assert!(gens.iter().all(|m| determinant(m).is_one()));
        let e = psi(&gens[0], 5, Flavor::Sl).unwrap();
        assert_eq!(e, lie_basis(Flavor::Sl, 3, 5)[0]);
    }

    #[test]
    fn spinning() {
        let r = sp_irreducibility(1, 2).unwrap();
        assert!(!r.irreducible);
        let inv = r.invariant.unwrap();
        assert_eq!(inv.len(), 1);
        assert_eq!(inv[0].entries, Matrix::identity(2));
        assert!(sp_irreducible(1, 3).unwrap());
        assert!(sp_irreducible(1, 5).unwrap());
        assert!(matches!(sp_irreducible(2, 5), Err(Error::SizeGuard(_))));
    }

    #[test]
    fn coinvariant_examples() {
        assert_eq!(coinvariants(&[Matrix::identity(3)], 3, Field::Rationals).unwrap(), 3);
        assert_eq!(coinvariants(&[Matrix::identity(2).scale(&-1)], 2, Field::Rationals).unwrap(), 0);
        assert_eq!(coinvariants(&[Matrix::identity(2).scale(&-1)], 2, Field::Prime(2)).unwrap(), 2);
        assert_eq!(coinvariants(&sp_adjoint_generators(1, 3), 3, Field::Prime(3)).unwrap(), 0);
        assert_eq!(coinvariants(&[], 4, Field::Prime(3)).unwrap(), 4);
    }

    #[test]
    fn charney_shapes() {
        for w in [CharneyGroup::G, CharneyGroup::Ghat, CharneyGroup::K, CharneyGroup::Khat] {
            assert!(charney_membership(&IntMatrix::identity(3), w, 3, 3).unwrap());
        }
        let m = im(&[&[1, 3, 0], &[0, 1, 0], &[0, 0, 1]]);
        assert!(charney_membership(&m, CharneyGroup::G, 3, 3).unwrap());
        assert!(charney_membership(&m, CharneyGroup::K, 3, 3).unwrap());
        let m = im(&[&[1, 1, 0], &[0, 1, 3], &[0, 0, 1]]);
        assert!(charney_membership(&m, CharneyGroup::Ghat, 3, 3).unwrap());
        assert!(!charney_membership(&m, CharneyGroup::G, 3, 3).unwrap());
        assert!(!charney_membership(&m, CharneyGroup::Khat, 3, 3).unwrap());
        let m = im(&[&[1, 0, 0], &[1, 1, 0], &[0, 0, 1]]);
        assert!(!charney_membership(&m, CharneyGroup::Khat, 3, 3).unwrap());
    }

    #[test]
    fn witnesses() {
        let w = sl_commutator_witness(3, 1, 2, 3).unwrap();
        assert!(w.verify(Flavor::Sl, 3).unwrap());
        for (x, w) in sp_commutator_witnesses(3, 3).unwrap() {
            assert!(w.verify(Flavor::Sp, 3).unwrap(), "{x:?}");
        }
        assert!(sp_commutator_witnesses(2, 3).is_err());
    }

    #[test]
    fn matrix_json() {
        let m = im(&[&[1, 3], &[0, 1]]);
        let s = int_matrix_to_json(&m);
        assert_eq!(s, r#"{"rows":[[1,3],[0,1]]}"#);
        assert_eq!(int_matrix_from_json(&s).unwrap(), m);
        assert_eq!(int_matrix_from_json("[[1,\"3\"],[0,1]]").unwrap(), m);
        assert!(int_matrix_from_json("[[1,2,3],[0,1,2]]").is_err());
    }
}
