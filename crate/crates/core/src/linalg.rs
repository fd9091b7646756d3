//! Exact linear algebra over Z, Q and Z/p.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::matrix::Matrix;

pub type IntMatrix = Matrix<BigInt>;

pub fn to_big(m: &Matrix<i64>) -> IntMatrix {
    m.map(|&x| BigInt::from(x))
}

/// Smith normal form `U A V = D` with unimodular `U`, `V`.
#[derive(Clone, Debug)]
pub struct Smith {
    /// Nonzero invariant factors, each dividing the next.
    pub diagonal: Vec<BigInt>,
    pub u: Option<IntMatrix>,
    pub v: Option<IntMatrix>,
    pub rows: usize,
    pub cols: usize,
}

impl Smith {
    pub fn rank(&self) -> usize {
        self.diagonal.len()
    }

    pub fn all_ones(&self) -> bool {
        self.diagonal.iter().all(One::is_one)
    }

    /// Solves `A x = b` over the integers, if possible.
    pub fn solve(&self, b: &[BigInt]) -> Option<Vec<BigInt>> {
        let u = self.u.as_ref().expect("Smith form computed without transforms");
        let v = self.v.as_ref().expect("Smith form computed without transforms");
        assert_eq!(b.len(), self.rows);
        let y = u.mul_vec(b);
        let mut xp = vec![BigInt::zero(); self.cols];
        for (i, yi) in y.iter().enumerate() {
            if i < self.rank() {
                let (q, r) = yi.div_rem(&self.diagonal[i]);
                if !r.is_zero() {
                    return None;
                }
                xp[i] = q;
            } else if !yi.is_zero() {
                return None;
            }
        }
        Some(v.mul_vec(&xp))
    }

    /// `L` with `L A = I` when `A` has full column rank and unit invariant factors.
    pub fn left_inverse(&self) -> Option<IntMatrix> {
        if self.rank() != self.cols || !self.all_ones() {
            return None;
        }
        let u = self.u.as_ref()?;
        let v = self.v.as_ref()?;
        let top = Matrix::from_fn(self.cols, self.rows, |i, j| u[(i, j)].clone());
        Some(v.mul(&top))
    }
}

fn swap_rows(m: &mut IntMatrix, a: usize, b: usize) {
    if a != b {
        for j in 0..m.ncols() {
            let t = m[(a, j)].clone();
            m[(a, j)] = m[(b, j)].clone();
            m[(b, j)] = t;
        }
    }
}

fn swap_cols(m: &mut IntMatrix, a: usize, b: usize) {
    if a != b {
        for i in 0..m.nrows() {
            let t = m[(i, a)].clone();
            m[(i, a)] = m[(i, b)].clone();
            m[(i, b)] = t;
        }
    }
}

/// row_dst -= q * row_src
fn row_axpy(m: &mut IntMatrix, dst: usize, src: usize, q: &BigInt) {
    for j in 0..m.ncols() {
        if !m[(src, j)].is_zero() {
            let d = &m[(src, j)] * q;
            m[(dst, j)] -= d;
        }
    }
}

/// col_dst -= q * col_src
fn col_axpy(m: &mut IntMatrix, dst: usize, src: usize, q: &BigInt) {
    for i in 0..m.nrows() {
        if !m[(i, src)].is_zero() {
            let d = &m[(i, src)] * q;
            m[(i, dst)] -= d;
        }
    }
}

pub fn smith(a: &IntMatrix, transforms: bool) -> Smith {
    let (rows, cols) = (a.nrows(), a.ncols());
    let mut m = a.clone();
    let mut u = transforms.then(|| IntMatrix::identity(rows));
    let mut v = transforms.then(|| IntMatrix::identity(cols));
    let mut diagonal = Vec::new();

    for t in 0..rows.min(cols) {
        // smallest nonzero entry of the trailing block
        let mut best: Option<(usize, usize)> = None;
        for i in t..rows {
            for j in t..cols {
                if !m[(i, j)].is_zero()
                    && best.is_none_or(|(bi, bj)| m[(i, j)].abs() < m[(bi, bj)].abs())
                {
                    best = Some((i, j));
                }
            }
        }
        let Some((pi, pj)) = best else { break };
        swap_rows(&mut m, t, pi);
        swap_cols(&mut m, t, pj);
        if let Some(u) = u.as_mut() {
            swap_rows(u, t, pi);
        }
        if let Some(v) = v.as_mut() {
            swap_cols(v, t, pj);
        }

        loop {
            let mut dirty = false;
            for i in t + 1..rows {
                if m[(i, t)].is_zero() {
                    continue;
                }
                let q = m[(i, t)].div_floor(&m[(t, t)]);
                row_axpy(&mut m, i, t, &q);
                if let Some(u) = u.as_mut() {
                    row_axpy(u, i, t, &q);
                }
                if !m[(i, t)].is_zero() {
                    dirty = true;
                    if m[(i, t)].abs() < m[(t, t)].abs() {
                        swap_rows(&mut m, t, i);
                        if let Some(u) = u.as_mut() {
                            swap_rows(u, t, i);
                        }
                    }
                }
            }
            for j in t + 1..cols {
                if m[(t, j)].is_zero() {
                    continue;
                }
                let q = m[(t, j)].div_floor(&m[(t, t)]);
                col_axpy(&mut m, j, t, &q);
                if let Some(v) = v.as_mut() {
                    col_axpy(v, j, t, &q);
                }
                if !m[(t, j)].is_zero() {
                    dirty = true;
                    if m[(t, j)].abs() < m[(t, t)].abs() {
                        swap_cols(&mut m, t, j);
                        if let Some(v) = v.as_mut() {
                            swap_cols(v, t, j);
                        }
                    }
                }
            }
            if dirty {
                continue;
            }
            // pivot must divide the whole trailing block
            let bad = (t + 1..rows)
                .flat_map(|i| (t + 1..cols).map(move |j| (i, j)))
                .find(|&(i, j)| !m[(i, j)].is_multiple_of(&m[(t, t)]));
            match bad {
                Some((i, _)) => {
                    let minus_one = -BigInt::one();
                    row_axpy(&mut m, t, i, &minus_one);
                    if let Some(u) = u.as_mut() {
                        row_axpy(u, t, i, &minus_one);
                    }
                }
                None => break,
            }
        }
        if m[(t, t)].is_negative() {
            for j in 0..cols {
                m[(t, j)] = -m[(t, j)].clone();
            }
            if let Some(u) = u.as_mut() {
                for j in 0..rows {
                    u[(t, j)] = -u[(t, j)].clone();
                }
            }
        }
        diagonal.push(m[(t, t)].clone());
    }
    Smith { diagonal, u, v, rows, cols }
}

/// Fraction-free (Bareiss) elimination; returns `(rank, determinant if square)`.
fn bareiss(a: &IntMatrix) -> (usize, Option<BigInt>) {
    let (rows, cols) = (a.nrows(), a.ncols());
    let mut m = a.clone();
    let mut prev = BigInt::one();
    let mut sign = 1i32;
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(p) = (r..rows).find(|&i| !m[(i, c)].is_zero()) else { continue };
        if p != r {
            swap_rows(&mut m, p, r);
            sign = -sign;
        }
        for i in r + 1..rows {
            for j in c + 1..cols {
                let val = (&m[(r, c)] * &m[(i, j)] - &m[(i, c)] * &m[(r, j)]) / &prev;
                m[(i, j)] = val;
            }
            m[(i, c)] = BigInt::zero();
        }
        prev = m[(r, c)].clone();
        r += 1;
    }
    let det = (rows == cols).then(|| if r < rows { BigInt::zero() } else { prev * sign });
    (r, det)
}

pub fn rank_q(a: &IntMatrix) -> usize {
    bareiss(a).0
}

pub fn determinant(a: &IntMatrix) -> BigInt {
    assert!(a.is_square());
    if a.nrows() == 0 {
        return BigInt::one();
    }
    bareiss(a).1.expect("square")
}

/// Exact inverse, when it has integer entries.
pub fn inverse_integral(a: &IntMatrix) -> Option<IntMatrix> {
    let n = a.nrows();
    assert!(a.is_square());
    let mut m: Vec<Vec<BigRational>> = (0..n)
        .map(|i| {
            (0..2 * n)
                .map(|j| {
                    if j < n {
                        BigRational::from_integer(a[(i, j)].clone())
                    } else if j - n == i {
                        BigRational::one()
                    } else {
                        BigRational::zero()
                    }
                })
                .collect()
        })
        .collect();
    for c in 0..n {
        let p = (c..n).find(|&i| !m[i][c].is_zero())?;
        m.swap(p, c);
        let inv = m[c][c].recip();
        for x in m[c].iter_mut() {
            *x *= &inv;
        }
        for i in 0..n {
            if i != c && !m[i][c].is_zero() {
                let f = m[i][c].clone();
                for j in 0..2 * n {
                    let d = &m[c][j] * &f;
                    m[i][j] -= d;
                }
            }
        }
    }
    let mut out = IntMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            let x = &m[i][n + j];
            if !x.is_integer() {
                return None;
            }
            out[(i, j)] = x.to_integer();
        }
    }
    Some(out)
}

pub fn reduce_mod(x: i64, p: u64) -> u64 {
    x.rem_euclid(p as i64) as u64
}

pub fn big_mod(x: &BigInt, p: u64) -> u64 {
    let r = x.mod_floor(&BigInt::from(p));
    r.try_into().expect("residue fits")
}

fn inv_mod(a: u64, p: u64) -> u64 {
    let e = (a as i64).extended_gcd(&(p as i64));
    assert_eq!(e.gcd, 1, "{a} is not invertible mod {p}");
    e.x.rem_euclid(p as i64) as u64
}

/// Incrementally built echelon basis of a subspace of `(Z/p)^n`.
#[derive(Clone, Debug)]
pub struct EchelonFp {
    p: u64,
    n: usize,
    rows: Vec<(usize, Vec<u64>)>,
}

impl EchelonFp {
    pub fn new(p: u64, n: usize) -> Self {
        EchelonFp { p, n, rows: Vec::new() }
    }

    pub fn dim(&self) -> usize {
        self.rows.len()
    }

    pub fn ambient(&self) -> usize {
        self.n
    }

    fn reduce(&self, v: &mut [u64]) {
        let p = self.p;
        for (c, row) in &self.rows {
            let f = v[*c];
            if f != 0 {
                for (x, r) in v.iter_mut().zip(row) {
                    *x = (*x + (p - f) * r) % p;
                }
            }
        }
    }

    pub fn contains(&self, v: &[u64]) -> bool {
        let mut w: Vec<u64> = v.iter().map(|x| x % self.p).collect();
        self.reduce(&mut w);
        w.iter().all(|&x| x == 0)
    }

    /// Adds `v`; returns whether the span grew.
    pub fn insert(&mut self, v: &[u64]) -> bool {
        assert_eq!(v.len(), self.n);
        let p = self.p;
        let mut w: Vec<u64> = v.iter().map(|x| x % p).collect();
        self.reduce(&mut w);
        let Some(c) = w.iter().position(|&x| x != 0) else { return false };
        let inv = inv_mod(w[c], p);
        for x in w.iter_mut() {
            *x = *x * inv % p;
        }
        self.rows.push((c, w));
        true
    }

    pub fn basis(&self) -> Vec<Vec<u64>> {
        self.rows.iter().map(|(_, r)| r.clone()).collect()
    }
}

pub fn rank_mod_p(rows: &[Vec<u64>], p: u64) -> usize {
    let Some(n) = rows.first().map(Vec::len) else { return 0 };
    let mut e = EchelonFp::new(p, n);
    for r in rows {
        e.insert(r);
    }
    e.dim()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn im(rows: Vec<Vec<i64>>) -> IntMatrix {
        to_big(&Matrix::from_rows(rows).unwrap())
    }

    #[test]
    fn smith_of_small_matrix() {
        let a = im(vec![vec![2, 4, 4], vec![-6, 6, 12], vec![10, -4, -16]]);
        let s = smith(&a, true);
        let d: Vec<i64> = s.diagonal.iter().map(|x| x.try_into().unwrap()).collect();
        assert_eq!(d, vec![2, 6, 12]);
        let (u, v) = (s.u.clone().unwrap(), s.v.clone().unwrap());
        let prod = u.mul(&a).mul(&v);
        for i in 0..3 {
            for j in 0..3 {
                let want = if i == j { s.diagonal[i].clone() } else { BigInt::zero() };
                assert_eq!(prod[(i, j)], want);
            }
        }
        assert_eq!(determinant(&u).abs(), BigInt::one());
    }

    #[test]
    fn solve_and_left_inverse() {
        let a = im(vec![vec![1, 2], vec![3, 5], vec![0, 1]]);
        let s = smith(&a, true);
        let b: Vec<BigInt> = [5, 13, 2].iter().map(|&x| BigInt::from(x)).collect();
        assert_eq!(s.solve(&b).unwrap(), vec![BigInt::from(1), BigInt::from(2)]);
        let off: Vec<BigInt> = [1, 0, 0].iter().map(|&x| BigInt::from(x)).collect();
        assert!(s.solve(&off).is_none());
        let l = s.left_inverse().unwrap();
        assert!(l.mul(&a).is_identity());
    }

    #[test]
    fn ranks_and_determinants() {
        let a = im(vec![vec![1, 2, 3], vec![2, 4, 6], vec![1, 0, 1]]);
        assert_eq!(rank_q(&a), 2);
        assert_eq!(determinant(&a), BigInt::zero());
        let b = im(vec![vec![2, 1], vec![7, 4]]);
        assert_eq!(determinant(&b), BigInt::one());
        let inv = inverse_integral(&b).unwrap();
        assert!(inv.mul(&b).is_identity());
        assert!(inverse_integral(&im(vec![vec![2, 0], vec![0, 1]])).is_none());
        assert_eq!(rank_mod_p(&[vec![1, 2], vec![2, 4]], 3), 1);
        assert_eq!(rank_mod_p(&[vec![1, 1], vec![1, 2]], 2), 2);
    }
}
