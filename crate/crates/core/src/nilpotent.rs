//! The free class-2 nilpotent quotient `Γ = π/γ₂π` and its exponent-`p`
//! version `Γ_p` for odd primes `p`.
//!
//! Elements are pairs `(a, c)` with `a ∈ H` and `c ∈ ∧²H`, multiplied by
//!
//! ```text
//! (a, c)(a', c') = (a + a', c + c' + κ(a, a')),   κ(a, a') = Σ_{i>j} a_i a'_j e_i∧e_j
//! ```
//!
//! With this cocycle the commutator `[u, v]` maps to `(0, ab(u) ∧ ab(v))`.

use crate::error::{Error, Result};
use crate::exterior::{subset_basis, ExteriorElement};
use crate::word::Word;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NilpotentElement {
    pub a: Vec<i64>,
    pub c: ExteriorElement,
    pub modulus: u64,
}

pub fn is_prime(p: u64) -> bool {
    p >= 2 && (2..).take_while(|d| d * d <= p).all(|d| !p.is_multiple_of(d))
}

pub fn check_modulus(m: u64) -> Result<()> {
    if m == 0 || (m % 2 == 1 && is_prime(m)) {
        Ok(())
    } else {
        Err(Error::UnsupportedModulus(m))
    }
}

/// Dense working form; `c[pair(i, j)]` is the coefficient of `e_i∧e_j`, `i < j`.
struct Dense {
    n: usize,
    m: u64,
    a: Vec<i64>,
    c: Vec<i64>,
}

fn pair_index(n: usize, i: usize, j: usize) -> usize {
    debug_assert!(i < j && j < n);
    // pairs in lexicographic order
    i * (2 * n - i - 1) / 2 + (j - i - 1)
}

impl Dense {
    fn new(n: usize, m: u64) -> Self {
        Dense { n, m, a: vec![0; n], c: vec![0; n * (n - 1) / 2] }
    }

    fn red(&self, x: i64) -> i64 {
        if self.m == 0 {
            x
        } else {
            x.rem_euclid(self.m as i64)
        }
    }

    /// right multiplication by `s_k^eps`
    fn push(&mut self, k: usize, eps: i64) {
        // κ(a, eps e_k) = Σ_{i>k} eps a_i e_i∧e_k = -Σ_{i>k} eps a_i e_k∧e_i
        for i in k + 1..self.n {
            if self.a[i] != 0 {
                let idx = pair_index(self.n, k, i);
                self.c[idx] = self.red(self.c[idx] - eps * self.a[i]);
            }
        }
        self.a[k] = self.red(self.a[k] + eps);
    }

    fn finish(self) -> NilpotentElement {
        let c = ExteriorElement::from_dense(self.n, 2, &self.c, self.m);
        NilpotentElement { a: self.a, c, modulus: self.m }
    }
}

/// Image of `w` in `Γ` (`m = 0`) or `Γ_p` (`m = p`, odd prime).
pub fn project_nilpotent(w: &Word, m: u64) -> Result<NilpotentElement> {
    check_modulus(m)?;
    let mut d = Dense::new(w.rank(), m);
    for &l in w.letters() {
        d.push(l.unsigned_abs() as usize - 1, l.signum() as i64);
    }
    Ok(d.finish())
}

/// `κ(a, a') = Σ_{i>j} a_i a'_j e_i∧e_j`
pub fn kappa(a: &[i64], b: &[i64], m: u64) -> ExteriorElement {
    let n = a.len();
    let mut dense = vec![0i64; subset_basis(n, 2).list.len()];
    for i in 0..n {
        for j in 0..i {
            dense[pair_index(n, j, i)] -= a[i] * b[j];
        }
    }
    ExteriorElement::from_dense(n, 2, &dense, m)
}

impl NilpotentElement {
    pub fn identity(n: usize, m: u64) -> Self {
        NilpotentElement { a: vec![0; n], c: ExteriorElement::zero(n, 2, m), modulus: m }
    }

    fn red_vec(v: Vec<i64>, m: u64) -> Vec<i64> {
        if m == 0 {
            v
        } else {
            v.into_iter().map(|x| x.rem_euclid(m as i64)).collect()
        }
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        if self.a.len() != other.a.len() {
            return Err(Error::RankMismatch(self.a.len(), other.a.len()));
        }
        let m = self.modulus;
        let a = self.a.iter().zip(&other.a).map(|(x, y)| x + y).collect();
        let c = self.c.add(&other.c)?.add(&kappa(&self.a, &other.a, m))?;
        Ok(NilpotentElement { a: Self::red_vec(a, m), c, modulus: m })
    }

    /// `(a, c)⁻¹ = (-a, -c + κ(a, a))`
    pub fn inverse(&self) -> Self {
        let m = self.modulus;
        let a = self.a.iter().map(|x| -x).collect();
        let c = self.c.neg().add(&kappa(&self.a, &self.a, m)).expect("same shape");
        NilpotentElement { a: Self::red_vec(a, m), c, modulus: m }
    }

    pub fn pow(&self, k: u64) -> Self {
        let mut out = Self::identity(self.a.len(), self.modulus);
        for _ in 0..k {
            out = out.mul(self).expect("same shape");
        }
        out
    }

    pub fn is_identity(&self) -> bool {
        self.a.iter().all(|&x| x == 0) && self.c.is_zero()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn w(l: &[i32], n: usize) -> Word {
        Word::reduce(l, n).unwrap()
    }

    #[test]
    fn commutator_of_generators() {
        let x = project_nilpotent(&w(&[1, 2, -1, -2], 4), 0).unwrap();
        assert!(x.a.iter().all(|&v| v == 0));
        assert_eq!(x.c, ExteriorElement::basis(4, &[0, 1], 0));
        assert!(project_nilpotent(&w(&[], 4), 0).unwrap().is_identity());
    }

    #[test]
    fn order_of_letters() {
        let xy = project_nilpotent(&w(&[1, 2], 2), 0).unwrap();
        let yx = project_nilpotent(&w(&[2, 1], 2), 0).unwrap();
        assert_eq!(xy.a, yx.a);
        let diff = xy.c.sub(&yx.c).unwrap();
        assert_eq!(diff.coeff(&[0, 1]).abs(), 1);
    }

    #[test]
    fn group_law_matches_collection() {
        let u = w(&[1, 3, -2, 4, 4, -1], 4);
        let v = w(&[2, -3, 1, 1], 4);
        let pu = project_nilpotent(&u, 0).unwrap();
        let pv = project_nilpotent(&v, 0).unwrap();
        let puv = project_nilpotent(&u.multiply(&v).unwrap(), 0).unwrap();
        assert_eq!(pu.mul(&pv).unwrap(), puv);
        assert_eq!(project_nilpotent(&u.invert(), 0).unwrap(), pu.inverse());
        assert!(pu.mul(&pu.inverse()).unwrap().is_identity());
    }

    #[test]
    fn moduli() {
        assert!(project_nilpotent(&w(&[1], 2), 2).is_err());
        assert!(project_nilpotent(&w(&[1], 2), 9).is_err());
        assert!(project_nilpotent(&w(&[1], 2), 5).is_ok());
        let x = project_nilpotent(&w(&[1, 2, 2, 1, 1], 2), 3).unwrap();
        assert!(x.pow(3).is_identity());
    }

    #[test]
    fn pair_indexing() {
        let b = subset_basis(5, 2);
        for (k, idx) in b.list.iter().enumerate() {
            assert_eq!(pair_index(5, idx[0], idx[1]), k);
        }
    }
}
