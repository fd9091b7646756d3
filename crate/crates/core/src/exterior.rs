//! Exterior powers of `Z^N` and `(Z/m)^N`.

use num_bigint::BigInt;
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, HashMap};
use std::sync::{Arc, Mutex, OnceLock};

use crate::error::{Error, Result};
use crate::homology::intersection;
use crate::linalg::{smith, IntMatrix, Smith};
use crate::matrix::Matrix;

/// Sparse element of `∧^k`; index tuples are 0-based and strictly increasing.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct ExteriorElement {
    rank: usize,
    degree: usize,
    modulus: u64,
    terms: BTreeMap<Vec<usize>, i64>,
}

/// Sorts `idx` in place; returns the permutation sign, or 0 on a repeat.
fn sort_sign(idx: &mut [usize]) -> i64 {
    let mut sign = 1;
    for i in 1..idx.len() {
        let mut j = i;
        while j > 0 && idx[j - 1] > idx[j] {
            idx.swap(j - 1, j);
            sign = -sign;
            j -= 1;
        }
    }
    if idx.windows(2).any(|w| w[0] == w[1]) {
        0
    } else {
        sign
    }
}

fn normalize(c: i64, m: u64) -> i64 {
    if m == 0 {
        c
    } else {
        c.rem_euclid(m as i64)
    }
}

impl ExteriorElement {
    pub fn zero(rank: usize, degree: usize, modulus: u64) -> Self {
        ExteriorElement { rank, degree, modulus, terms: BTreeMap::new() }
    }

    /// `e_{i_1} ∧ ⋯ ∧ e_{i_k}` for 0-based indices in any order.
    pub fn basis(rank: usize, indices: &[usize], modulus: u64) -> Self {
        let mut out = Self::zero(rank, indices.len(), modulus);
        let mut idx = indices.to_vec();
        assert!(idx.iter().all(|&i| i < rank), "index out of range");
        let s = sort_sign(&mut idx);
        out.add_term(idx, s);
        out
    }

    pub fn scalar(rank: usize, c: i64, modulus: u64) -> Self {
        let mut out = Self::zero(rank, 0, modulus);
        out.add_term(Vec::new(), c);
        out
    }

    pub fn from_vector(v: &[i64], modulus: u64) -> Self {
        let mut out = Self::zero(v.len(), 1, modulus);
        for (i, &c) in v.iter().enumerate() {
            out.add_term(vec![i], c);
        }
        out
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<usize>, &i64)> {
        self.terms.iter()
    }

    pub fn coeff(&self, idx: &[usize]) -> i64 {
        self.terms.get(idx).copied().unwrap_or(0)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Adds `c` times a basis tuple that is already sorted.
    pub(crate) fn add_term(&mut self, idx: Vec<usize>, c: i64) {
        if c == 0 {
            return;
        }
        let v = normalize(self.terms.get(&idx).copied().unwrap_or(0) + c, self.modulus);
        if v == 0 {
            self.terms.remove(&idx);
        } else {
            self.terms.insert(idx, v);
        }
    }

    fn check_compatible(&self, other: &Self) -> Result<()> {
        if self.rank != other.rank {
            return Err(Error::RankMismatch(self.rank, other.rank));
        }
        if self.modulus != other.modulus {
            return Err(Error::Malformed(format!("modulus {} vs {}", self.modulus, other.modulus)));
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_compatible(other)?;
        if self.degree != other.degree && !self.is_zero() && !other.is_zero() {
            return Err(Error::Malformed(format!("degree {} vs {}", self.degree, other.degree)));
        }
        if self.is_zero() {
            return Ok(other.clone());
        }
        let mut out = self.clone();
        for (k, &c) in &other.terms {
            out.add_term(k.clone(), c);
        }
        Ok(out)
    }

    pub fn scale(&self, k: i64) -> Self {
        let mut out = Self::zero(self.rank, self.degree, self.modulus);
        for (idx, &c) in &self.terms {
            out.add_term(idx.clone(), c * k);
        }
        out
    }

    pub fn neg(&self) -> Self {
        self.scale(-1)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.neg())
    }

    pub fn wedge(&self, other: &Self) -> Result<Self> {
        self.check_compatible(other)?;
        let mut out = Self::zero(self.rank, self.degree + other.degree, self.modulus);
        for (x, &c) in &self.terms {
            for (y, &d) in &other.terms {
                let mut idx: Vec<usize> = x.iter().chain(y).copied().collect();
                let s = sort_sign(&mut idx);
                if s != 0 {
                    out.add_term(idx, s * c * d);
                }
            }
        }
        Ok(out)
    }

    pub fn reduce_mod(&self, p: u64) -> Self {
        let mut out = Self::zero(self.rank, self.degree, p);
        for (idx, &c) in &self.terms {
            out.add_term(idx.clone(), c);
        }
        out
    }

    /// Image under `∧^k M`, where column `j` of `M` is the image of `e_j`.
    pub fn apply_linear(&self, m: &Matrix<i64>) -> Result<Self> {
        if m.ncols() != self.rank {
            return Err(Error::RankMismatch(m.ncols(), self.rank));
        }
        let cols: Vec<ExteriorElement> = (0..m.ncols())
            .map(|j| ExteriorElement::from_vector(&m.column(j), self.modulus))
            .collect();
        let mut out = Self::zero(m.nrows(), self.degree, self.modulus);
        for (idx, &c) in &self.terms {
            let mut acc = ExteriorElement::scalar(m.nrows(), c, self.modulus);
            for &i in idx {
                acc = acc.wedge(&cols[i])?;
            }
            out = out.add(&acc)?;
        }
        Ok(out)
    }

    /// Dense coefficient vector in the lexicographic basis of `∧^k`.
    pub fn to_dense(&self) -> Vec<i64> {
        let b = subset_basis(self.rank, self.degree);
        let mut v = vec![0; b.list.len()];
        for (idx, &c) in &self.terms {
            v[b.index[idx]] = c;
        }
        v
    }

    pub fn from_dense(rank: usize, degree: usize, v: &[i64], modulus: u64) -> Self {
        let b = subset_basis(rank, degree);
        assert_eq!(v.len(), b.list.len());
        let mut out = Self::zero(rank, degree, modulus);
        for (idx, &c) in b.list.iter().zip(v) {
            out.add_term(idx.clone(), c);
        }
        out
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("serializable")
    }
}

impl std::fmt::Debug for ExteriorElement {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{self}")
    }
}

impl std::fmt::Display for ExteriorElement {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (k, (idx, c)) in self.terms.iter().enumerate() {
            if k > 0 {
                write!(f, " + ")?;
            }
            let names: Vec<String> = idx.iter().map(|i| format!("e{}", i + 1)).collect();
            write!(f, "{c}*{}", names.join("^"))?;
        }
        Ok(())
    }
}

#[derive(Serialize, Deserialize)]
struct TermRepr {
    indices: Vec<usize>,
    coeff: i64,
}

#[derive(Serialize, Deserialize)]
struct ExteriorRepr {
    rank: usize,
    degree: usize,
    modulus: u64,
    terms: Vec<TermRepr>,
}

impl Serialize for ExteriorElement {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        ExteriorRepr {
            rank: self.rank,
            degree: self.degree,
            modulus: self.modulus,
            terms: self
                .terms
                .iter()
                .map(|(idx, &c)| TermRepr { indices: idx.iter().map(|i| i + 1).collect(), coeff: c })
                .collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for ExteriorElement {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let r = ExteriorRepr::deserialize(d)?;
        let mut out = ExteriorElement::zero(r.rank, r.degree, r.modulus);
        for t in r.terms {
            if t.indices.len() != r.degree
                || t.indices.windows(2).any(|w| w[0] >= w[1])
                || t.indices.iter().any(|&i| i == 0 || i > r.rank)
            {
                return Err(D::Error::custom(format!("bad index tuple {:?}", t.indices)));
            }
            out.add_term(t.indices.iter().map(|i| i - 1).collect(), t.coeff);
        }
        Ok(out)
    }
}

pub struct SubsetBasis {
    pub list: Vec<Vec<usize>>,
    pub index: HashMap<Vec<usize>, usize>,
}

fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(0, n, k, &mut Vec::new(), &mut out);
    out
}

pub fn subset_basis(n: usize, k: usize) -> Arc<SubsetBasis> {
    static CACHE: OnceLock<Mutex<HashMap<(usize, usize), Arc<SubsetBasis>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(Default::default);
    let mut guard = cache.lock().expect("basis cache poisoned");
    guard
        .entry((n, k))
        .or_insert_with(|| {
            let list = subsets(n, k);
            let index = list.iter().enumerate().map(|(i, s)| (s.clone(), i)).collect();
            Arc::new(SubsetBasis { list, index })
        })
        .clone()
}

/// `Σ φ(α_i) ∧ φ(β_i)` for images listed as `(α_1, β_1, …, α_g, β_g)`.
pub fn pushforward_fundamental(images: &[Vec<i64>], genus: usize) -> Result<ExteriorElement> {
    if images.len() != 2 * genus {
        return Err(Error::Malformed(format!("expected {} images, got {}", 2 * genus, images.len())));
    }
    let n = images.first().map_or(0, Vec::len);
    if images.iter().any(|v| v.len() != n) {
        return Err(Error::Malformed("images have different lengths".into()));
    }
    let mut out = ExteriorElement::zero(n, 2, 0);
    for pair in images.chunks(2) {
        let a = ExteriorElement::from_vector(&pair[0], 0);
        let b = ExteriorElement::from_vector(&pair[1], 0);
        out = out.add(&a.wedge(&b)?)?;
    }
    Ok(out)
}

/// A linear map `H → ∧²H`, stored as the images of the basis vectors.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HomMap {
    pub rank: usize,
    pub modulus: u64,
    pub cols: Vec<ExteriorElement>,
}

impl HomMap {
    pub fn zero(rank: usize, modulus: u64) -> Self {
        HomMap { rank, modulus, cols: vec![ExteriorElement::zero(rank, 2, modulus); rank] }
    }

    pub fn is_zero(&self) -> bool {
        self.cols.iter().all(ExteriorElement::is_zero)
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        if self.rank != other.rank {
            return Err(Error::RankMismatch(self.rank, other.rank));
        }
        let cols = self.cols.iter().zip(&other.cols).map(|(a, b)| a.add(b)).collect::<Result<_>>()?;
        Ok(HomMap { rank: self.rank, modulus: self.modulus, cols })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        let neg = HomMap { rank: other.rank, modulus: other.modulus, cols: other.cols.iter().map(|c| c.neg()).collect() };
        self.add(&neg)
    }

    pub fn eval(&self, v: &[i64]) -> Result<ExteriorElement> {
        let mut out = ExteriorElement::zero(self.rank, 2, self.modulus);
        for (c, &x) in self.cols.iter().zip(v) {
            out = out.add(&c.scale(x))?;
        }
        Ok(out)
    }

    pub fn reduce_mod(&self, p: u64) -> Self {
        HomMap { rank: self.rank, modulus: p, cols: self.cols.iter().map(|c| c.reduce_mod(p)).collect() }
    }

    /// Coordinates indexed by `v · C(n,2) + pair`.
    pub fn to_dense(&self) -> Vec<i64> {
        self.cols.iter().flat_map(ExteriorElement::to_dense).collect()
    }
}

fn unit(n: usize, i: usize) -> Vec<i64> {
    (0..n).map(|k| i64::from(k == i)).collect()
}

/// `ι(x∧y∧z)(v) = i(x,v) y∧z + i(y,v) z∧x + i(z,v) x∧y`
pub fn iota(t: &ExteriorElement) -> Result<HomMap> {
    if t.degree != 3 {
        return Err(Error::Malformed(format!("iota expects degree 3, got {}", t.degree)));
    }
    if !t.rank.is_multiple_of(2) {
        return Err(Error::Malformed(format!("iota needs even rank, got {}", t.rank)));
    }
    let n = t.rank;
    let m = t.modulus;
    let mut cols = vec![ExteriorElement::zero(n, 2, m); n];
    for (idx, &c) in &t.terms {
        let (x, y, z) = (idx[0], idx[1], idx[2]);
        for (v, col) in cols.iter_mut().enumerate() {
            let ev = unit(n, v);
            for (p, q, r) in [(x, y, z), (y, z, x), (z, x, y)] {
                let s = intersection(&unit(n, p), &ev);
                if s != 0 {
                    *col = col.add(&ExteriorElement::basis(n, &[q, r], m).scale(c * s))?;
                }
            }
        }
    }
    Ok(HomMap { rank: n, modulus: m, cols })
}

/// The integer matrix of `ι : ∧³Z^n → Hom(Z^n, ∧²Z^n)` in dense coordinates.
pub fn iota_matrix(n: usize) -> Matrix<i64> {
    let trip = subset_basis(n, 3);
    let pairs = subset_basis(n, 2);
    let mut m = Matrix::zeros(n * pairs.list.len(), trip.list.len());
    for (j, idx) in trip.list.iter().enumerate() {
        let img = iota(&ExteriorElement::basis(n, idx, 0)).expect("degree 3");
        for (i, &c) in img.to_dense().iter().enumerate() {
            m[(i, j)] = c;
        }
    }
    m
}

pub struct IotaSolver {
    pub n: usize,
    pub smith: Smith,
    /// integral left inverse of ι, present when ι is unimodular onto its image
    pub left_inverse: Option<Matrix<i64>>,
}

pub fn iota_solver(n: usize) -> Arc<IotaSolver> {
    static CACHE: OnceLock<Mutex<HashMap<usize, Arc<IotaSolver>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(Default::default);
    if let Some(s) = cache.lock().expect("solver cache poisoned").get(&n) {
        return s.clone();
    }
    let a: IntMatrix = iota_matrix(n).map(|&x| BigInt::from(x));
    let s = smith(&a, true);
    let left_inverse = s
        .left_inverse()
        .map(|l| l.map(|x| i64::try_from(x).expect("left inverse entries are small")));
    let solver = Arc::new(IotaSolver { n, smith: s, left_inverse });
    cache.lock().expect("solver cache poisoned").insert(n, solver.clone());
    solver
}

/// Inverts `ι` on its image; `Ok(None)` when `l` lies outside it.
pub fn iota_solve(l: &HomMap) -> Result<Option<ExteriorElement>> {
    if l.modulus != 0 {
        return Err(Error::UnsupportedModulus(l.modulus));
    }
    if l.cols.len() != l.rank || l.cols.iter().any(|c| c.rank != l.rank || (c.degree != 2 && !c.is_zero())) {
        return Err(Error::Malformed("expected a map H -> wedge^2 H".into()));
    }
    let solver = iota_solver(l.rank);
    let b: Vec<BigInt> = l.to_dense().into_iter().map(BigInt::from).collect();
    Ok(solver.smith.solve(&b).map(|x| {
        let v: Vec<i64> = x.into_iter().map(|c| i64::try_from(c).expect("coefficient fits i64")).collect();
        ExteriorElement::from_dense(l.rank, 3, &v, 0)
    }))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn e(n: usize, idx: &[usize]) -> ExteriorElement {
        ExteriorElement::basis(n, idx, 0)
    }

    #[test]
    fn wedge_rules() {
        let e1 = e(4, &[0]);
        let e2 = e(4, &[1]);
        assert!(e1.wedge(&e1).unwrap().is_zero());
        assert_eq!(e1.wedge(&e2).unwrap(), e2.wedge(&e1).unwrap().neg());
        let s = e1.add(&e2).unwrap();
        assert_eq!(s.wedge(&e2).unwrap(), e(4, &[0, 1]));
        assert_eq!(e(4, &[1, 0]).coeff(&[0, 1]), -1);
        let other = ExteriorElement::basis(3, &[0], 0);
        assert!(e1.wedge(&other).is_err());
    }

    #[test]
    fn modular_reduction() {
        let x = e(3, &[0, 1]).scale(4).reduce_mod(3);
        assert_eq!(x.coeff(&[0, 1]), 1);
        assert!(e(3, &[0, 1]).scale(3).reduce_mod(3).is_zero());
    }

    #[test]
    fn pushforward_examples() {
        let u = vec![1, 2, 0];
        let v = vec![0, 1, 5];
        let want = ExteriorElement::from_vector(&u, 0).wedge(&ExteriorElement::from_vector(&v, 0)).unwrap();
        assert_eq!(pushforward_fundamental(&[u.clone(), v.clone()], 1).unwrap(), want);
        assert!(pushforward_fundamental(&[vec![0; 3], vec![0; 3]], 1).unwrap().is_zero());
        let deg = pushforward_fundamental(&[u, v, vec![0; 3], vec![0; 3]], 2).unwrap();
        assert_eq!(deg, want);
        assert!(pushforward_fundamental(&[vec![1]], 1).is_err());
    }

    #[test]
    fn iota_direct_evaluation() {
        // rank 6: a1=e0, b1=e1, a2=e2
        let t = e(6, &[0, 1, 2]);
        let l = iota(&t).unwrap();
        // at a2 every pairing vanishes
        assert!(l.cols[2].is_zero());
        // at b1: i(a1,b1)=1 gives b1∧a2
        assert_eq!(l.cols[1], e(6, &[1, 2]));
        // at a1: i(b1,a1)=-1 gives -(a2∧a1) = a1∧a2
        assert_eq!(l.cols[0], e(6, &[0, 2]));
        assert!(iota(&ExteriorElement::zero(6, 3, 0)).unwrap().is_zero());
    }

    #[test]
    fn iota_solve_round_trip() {
        let t = e(6, &[0, 1, 4]).scale(3).add(&e(6, &[2, 3, 5]).scale(-2)).unwrap();
        assert_eq!(iota_solve(&iota(&t).unwrap()).unwrap(), Some(t));
        let mut off = HomMap::zero(6, 0);
        off.cols[0] = e(6, &[0, 1]);
        assert_eq!(iota_solve(&off).unwrap(), None);
    }

    #[test]
    fn json_shape() {
        let t = e(4, &[0, 2]).scale(-2);
        assert_eq!(t.to_json(), r#"{"rank":4,"degree":2,"modulus":0,"terms":[{"indices":[1,3],"coeff":-2}]}"#);
        let back: ExteriorElement = serde_json::from_str(&t.to_json()).unwrap();
        assert_eq!(back, t);
        assert!(serde_json::from_str::<ExteriorElement>(
            r#"{"rank":4,"degree":2,"modulus":0,"terms":[{"indices":[3,1],"coeff":1}]}"#
        )
        .is_err());
    }
}
