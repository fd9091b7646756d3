//! `H_1(Σ_{g,1}; Z)` with the intersection form, and the symplectic action
//! of mapping classes.

use serde::{Deserialize, Serialize};
use std::collections::{HashSet, VecDeque};

use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::surface::{catalog, standard_twist, MappingClass, SurfaceContext};

/// Coordinates in the interleaved basis `(a_1, b_1, …, a_g, b_g)`.
pub type HomologyVector = Vec<i64>;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BasisOrder {
    Interleaved,
    /// `(a_1, …, a_g, b_1, …, b_g)`
    Block,
}

/// `i(u, v) = uᵀ J v` with `i(a_i, b_i) = +1`.
pub fn intersection(u: &[i64], v: &[i64]) -> i64 {
    assert_eq!(u.len(), v.len(), "rank mismatch");
    assert!(u.len().is_multiple_of(2));
    u.chunks(2).zip(v.chunks(2)).map(|(x, y)| x[0] * y[1] - x[1] * y[0]).sum()
}

/// The form matrix in the given order.
pub fn form_matrix(g: usize, order: BasisOrder) -> Matrix<i64> {
    let mut j = Matrix::zeros(2 * g, 2 * g);
    for i in 0..g {
        let (a, b) = match order {
            BasisOrder::Interleaved => (2 * i, 2 * i + 1),
            BasisOrder::Block => (i, g + i),
        };
        j[(a, b)] = 1;
        j[(b, a)] = -1;
    }
    j
}

/// Index map interleaved → block.
pub fn interleaved_to_block(g: usize) -> Vec<usize> {
    (0..2 * g).map(|k| if k % 2 == 0 { k / 2 } else { g + k / 2 }).collect()
}

pub fn block_to_interleaved(g: usize) -> Vec<usize> {
    let fwd = interleaved_to_block(g);
    let mut inv = vec![0; 2 * g];
    for (k, &b) in fwd.iter().enumerate() {
        inv[b] = k;
    }
    inv
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SymplecticMatrix {
    order: BasisOrder,
    rows: Matrix<i64>,
}

#[derive(Serialize, Deserialize)]
struct SymplecticRepr {
    order: BasisOrder,
    rows: Vec<Vec<i64>>,
}

impl Serialize for SymplecticMatrix {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        SymplecticRepr { order: self.order, rows: self.rows.to_rows() }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for SymplecticMatrix {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let r = SymplecticRepr::deserialize(d)?;
        let m = Matrix::from_rows(r.rows).ok_or_else(|| D::Error::custom("ragged rows"))?;
        SymplecticMatrix::new(m, r.order).map_err(D::Error::custom)
    }
}

pub fn is_symplectic_i64(m: &Matrix<i64>, order: BasisOrder) -> bool {
    if !m.is_square() || !m.nrows().is_multiple_of(2) {
        return false;
    }
    let j = form_matrix(m.nrows() / 2, order);
    m.transpose().mul(&j).mul(m) == j
}

impl SymplecticMatrix {
    pub fn new(rows: Matrix<i64>, order: BasisOrder) -> Result<Self> {
        if !is_symplectic_i64(&rows, order) {
            return Err(Error::Precondition(format!("matrix {rows} is not symplectic in {order:?} order")));
        }
        Ok(SymplecticMatrix { order, rows })
    }

    pub fn identity(g: usize) -> Self {
        SymplecticMatrix { order: BasisOrder::Interleaved, rows: Matrix::identity(2 * g) }
    }

    pub fn genus(&self) -> usize {
        self.rows.nrows() / 2
    }

    pub fn order(&self) -> BasisOrder {
        self.order
    }

    pub fn rows(&self) -> &Matrix<i64> {
        &self.rows
    }

    pub fn to_order(&self, order: BasisOrder) -> Self {
        if order == self.order {
            return self.clone();
        }
        let g = self.genus();
        let perm = match order {
            BasisOrder::Block => interleaved_to_block(g),
            BasisOrder::Interleaved => block_to_interleaved(g),
        };
        SymplecticMatrix { order, rows: self.rows.permute(&perm) }
    }

    pub fn mul(&self, other: &Self) -> Self {
        let o = other.to_order(self.order);
        SymplecticMatrix { order: self.order, rows: self.rows.mul(&o.rows) }
    }

    /// `M⁻¹ = -J Mᵀ J`
    pub fn inverse(&self) -> Self {
        let j = form_matrix(self.genus(), self.order);
        let inv = j.mul(&self.rows.transpose()).mul(&j).map(|x| -x);
        SymplecticMatrix { order: self.order, rows: inv }
    }

    pub fn apply(&self, v: &[i64]) -> Vec<i64> {
        assert_eq!(self.order, BasisOrder::Interleaved, "vectors are interleaved");
        self.rows.mul_vec(v)
    }

    pub fn is_identity(&self) -> bool {
        self.rows.is_identity()
    }

    pub fn is_symplectic(&self) -> bool {
        is_symplectic_i64(&self.rows, self.order)
    }
}

/// `v ↦ v + i(x, v) x`
pub fn transvection(x: &[i64]) -> SymplecticMatrix {
    let n = x.len();
    let e = |j: usize| -> Vec<i64> { (0..n).map(|k| i64::from(k == j)).collect() };
    let m = Matrix::from_fn(n, n, |k, j| i64::from(k == j) + x[k] * intersection(x, &e(j)));
    SymplecticMatrix { order: BasisOrder::Interleaved, rows: m }
}

pub fn try_abelianize(f: &MappingClass) -> Result<SymplecticMatrix> {
    let n = f.context().rank();
    let cols: Vec<Vec<i64>> = f.auto().forward().images().iter().map(|w| w.abelianize()).collect();
    let m = Matrix::from_fn(n, n, |i, j| cols[j][i]);
    if !is_symplectic_i64(&m, BasisOrder::Interleaved) {
        return Err(Error::Internal(format!("abelianization {m} of `{}` is not symplectic", f.provenance())));
    }
    Ok(SymplecticMatrix { order: BasisOrder::Interleaved, rows: m })
}

/// Column `i` is the class of the image of `s_i`.
pub fn abelianize(f: &MappingClass) -> SymplecticMatrix {
    try_abelianize(f).expect("certified mapping classes act symplectically")
}

pub fn congruence_check(m: &SymplecticMatrix, p: u64) -> Result<bool> {
    if p < 2 {
        return Err(Error::OutOfRange(format!("level p={p}")));
    }
    let n = m.rows.nrows();
    let p = p as i64;
    Ok((0..n).all(|i| (0..n).all(|j| (m.rows[(i, j)] - i64::from(i == j)).rem_euclid(p) == 0)))
}

pub fn torelli_check(m: &SymplecticMatrix) -> bool {
    m.is_identity()
}

type ModMatrix = Vec<u8>;

fn mul_mod(a: &[u8], b: &[u8], n: usize, p: u8) -> ModMatrix {
    let mut out = vec![0u8; n * n];
    for i in 0..n {
        for j in 0..n {
            let mut s = 0u32;
            for k in 0..n {
                s += a[i * n + k] as u32 * b[k * n + j] as u32;
            }
            out[i * n + j] = (s % p as u32) as u8;
        }
    }
    out
}

fn is_symplectic_mod(m: &[u8], j: &[u8], n: usize, p: u8) -> bool {
    let mt: Vec<u8> = (0..n * n).map(|k| m[(k % n) * n + k / n]).collect();
    mul_mod(&mul_mod(&mt, j, n, p), m, n, p) == j
}

const ENUMERATION_LIMIT: u64 = 1 << 20;

/// Every matrix of `Sp_{2g}(Z/p)`, found by testing all `p^{4g²}` candidates.
pub fn enumerate_sp_mod_p(g: usize, p: u64) -> Result<Vec<ModMatrix>> {
    let n = 2 * g;
    let total = (p as u128).checked_pow((n * n) as u32).unwrap_or(u128::MAX);
    if total > ENUMERATION_LIMIT as u128 || p > 255 {
        return Err(Error::SizeGuard(format!(
            "exhaustive enumeration of {n}x{n} matrices over Z/{p} needs {total} candidates (limit {ENUMERATION_LIMIT})"
        )));
    }
    let p8 = p as u8;
    let j: Vec<u8> = form_matrix(g, BasisOrder::Interleaved)
        .entries()
        .map(|&x| x.rem_euclid(p as i64) as u8)
        .collect();
    let mut out = Vec::new();
    let mut cand = vec![0u8; n * n];
    for _ in 0..total {
        if is_symplectic_mod(&cand, &j, n, p8) {
            out.push(cand.clone());
        }
        for x in cand.iter_mut() {
            *x += 1;
            if *x < p8 {
                break;
            }
            *x = 0;
        }
    }
    Ok(out)
}

/// Breadth-first closure of a finite set of matrices over `Z/p`.
pub fn closure_mod_p(gens: &[Matrix<i64>], p: u64) -> HashSet<ModMatrix> {
    let n = gens.first().map_or(0, Matrix::nrows);
    let p8 = p as u8;
    let red: Vec<ModMatrix> = gens
        .iter()
        .map(|m| m.entries().map(|&x| x.rem_euclid(p as i64) as u8).collect())
        .collect();
    let id: ModMatrix = (0..n * n).map(|k| u8::from(k / n == k % n)).collect();
    let mut seen = HashSet::from([id.clone()]);
    let mut queue = VecDeque::from([id]);
    while let Some(m) = queue.pop_front() {
        for gm in &red {
            let next = mul_mod(&m, gm, n, p8);
            if seen.insert(next.clone()) {
                queue.push_back(next);
            }
        }
    }
    seen
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GenerationReport {
    pub genus: usize,
    pub p: u64,
    pub generated_order: usize,
    pub group_order: usize,
}

impl GenerationReport {
    pub fn generates(&self) -> bool {
        self.generated_order == self.group_order
    }
}

/// Compares the subgroup generated by the catalog twists mod `p` with the
/// enumerated `Sp_{2g}(Z/p)`.
pub fn mod_p_generation(g: usize, p: u64) -> Result<GenerationReport> {
    if !(1..=2).contains(&g) || !(p == 2 || p == 3) {
        return Err(Error::SizeGuard(format!("mod-p generation is only checked for g<=2, p<=3 (got g={g}, p={p})")));
    }
    let group = enumerate_sp_mod_p(g, p)?;
    let ctx = SurfaceContext::new(g)?;
    let gens: Vec<Matrix<i64>> = catalog(g)
        .into_iter()
        .map(|c| standard_twist(&ctx, c).map(|t| abelianize(&t).rows.clone()))
        .collect::<Result<_>>()?;
    let closed = closure_mod_p(&gens, p);
    let members: HashSet<&ModMatrix> = group.iter().collect();
    if !closed.iter().all(|m| members.contains(m)) {
        return Err(Error::Internal("closure left the symplectic group".into()));
    }
    Ok(GenerationReport { genus: g, p, generated_order: closed.len(), group_order: group.len() })
}

pub fn mod_p_generates(g: usize, p: u64) -> Result<bool> {
    Ok(mod_p_generation(g, p)?.generates())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn intersection_signs() {
        assert_eq!(intersection(&[1, 0], &[0, 1]), 1);
        assert_eq!(intersection(&[1, 0], &[1, 0]), 0);
        assert_eq!(intersection(&[0, 1], &[1, 0]), -1);
    }

    #[test]
    fn transvection_examples() {
        assert_eq!(transvection(&[1, 0]).rows().to_rows(), vec![vec![1, 1], vec![0, 1]]);
        assert!(transvection(&[0, 0, 0, 0]).is_identity());
        let x = [2, -1, 3, 1];
        assert_eq!(transvection(&x), transvection(&[-2, 1, -3, -1]));
        assert!(transvection(&x).is_symplectic());
    }

    #[test]
    fn level_checks() {
        let m = SymplecticMatrix::new(Matrix::from_rows(vec![vec![1, 3], vec![0, 1]]).unwrap(), BasisOrder::Interleaved)
            .unwrap();
        assert!(congruence_check(&m, 3).unwrap());
        assert!(!congruence_check(&m, 9).unwrap());
        assert!(congruence_check(&SymplecticMatrix::identity(2), 7).unwrap());
        assert!(congruence_check(&m, 1).is_err());
        assert!(!torelli_check(&m));
    }

    #[test]
    fn order_conversion() {
        let m = transvection(&[1, 2, 0, 1]);
        let b = m.to_order(BasisOrder::Block);
        assert!(b.is_symplectic());
        assert_eq!(b.to_order(BasisOrder::Interleaved), m);
        assert_eq!(form_matrix(1, BasisOrder::Block).to_rows(), vec![vec![0, 1], vec![-1, 0]]);
        assert!(m.mul(&m.inverse()).is_identity());
    }

    #[test]
    fn serde_shape() {
        let m = transvection(&[1, 0]);
        let s = serde_json::to_string(&m).unwrap();
        assert_eq!(s, r#"{"order":"interleaved","rows":[[1,1],[0,1]]}"#);
        let back: SymplecticMatrix = serde_json::from_str(&s).unwrap();
        assert_eq!(back, m);
        assert!(serde_json::from_str::<SymplecticMatrix>(r#"{"order":"block","rows":[[2,0],[0,1]]}"#).is_err());
    }

    #[test]
    fn enumeration_guard() {
        assert!(matches!(enumerate_sp_mod_p(2, 3), Err(Error::SizeGuard(_))));
        assert!(matches!(mod_p_generation(3, 2), Err(Error::SizeGuard(_))));
    }
}
