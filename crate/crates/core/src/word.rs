//! Free-group words on `rank` generators, endomorphisms given by generator
//! images, and automorphisms that carry their inverse.
//!
//! Letter `+i` is the generator `s_i`, letter `-i` its inverse.

use serde::{Deserialize, Serialize};
use std::fmt;

use crate::error::{Error, Result};

pub type Letter = i32;

/// A freely reduced word. Reduction is eager, so equality of words is
/// equality of letter sequences.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Word {
    rank: usize,
    letters: Vec<Letter>,
}

fn check_letter(l: Letter, rank: usize) -> Result<()> {
    if l == 0 || l.unsigned_abs() as usize > rank {
        return Err(Error::LetterOutOfRange { letter: l, rank });
    }
    Ok(())
}

/// Appends `l` to a reduced buffer, cancelling against the last letter.
#[inline]
fn push_reduced(buf: &mut Vec<Letter>, l: Letter) {
    if buf.last() == Some(&-l) {
        buf.pop();
    } else {
        buf.push(l);
    }
}

impl Word {
    pub fn identity(rank: usize) -> Word {
        Word { rank, letters: Vec::new() }
    }

    pub fn generator(rank: usize, i: usize) -> Word {
        assert!(i >= 1 && i <= rank, "generator index {i} outside 1..={rank}");
        Word { rank, letters: vec![i as Letter] }
    }

    /// Freely reduces an arbitrary letter sequence.
    pub fn reduce(raw: &[Letter], rank: usize) -> Result<Word> {
        let mut buf = Vec::with_capacity(raw.len());
        for &l in raw {
            check_letter(l, rank)?;
            push_reduced(&mut buf, l);
        }
        Ok(Word { rank, letters: buf })
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn letters(&self) -> &[Letter] {
        &self.letters
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn multiply(&self, other: &Word) -> Result<Word> {
        if self.rank != other.rank {
            return Err(Error::RankMismatch(self.rank, other.rank));
        }
        Ok(self.mul_unchecked(other))
    }

    pub(crate) fn mul_unchecked(&self, other: &Word) -> Word {
        let mut buf = self.letters.clone();
        for &l in &other.letters {
            push_reduced(&mut buf, l);
        }
        Word { rank: self.rank, letters: buf }
    }

    pub fn invert(&self) -> Word {
        Word {
            rank: self.rank,
            letters: self.letters.iter().rev().map(|l| -l).collect(),
        }
    }

    pub fn pow(&self, k: i64) -> Word {
        let base = if k >= 0 { self.clone() } else { self.invert() };
        let mut out = Word::identity(self.rank);
        for _ in 0..k.unsigned_abs() {
            out = out.mul_unchecked(&base);
        }
        out
    }

    /// `u v u^-1 v^-1`
    pub fn commutator(u: &Word, v: &Word) -> Result<Word> {
        u.multiply(v)?.multiply(&u.invert())?.multiply(&v.invert())
    }

    /// Signed letter counts, i.e. the image in `Z^rank`.
    pub fn abelianize(&self) -> Vec<i64> {
        let mut v = vec![0i64; self.rank];
        for &l in &self.letters {
            v[l.unsigned_abs() as usize - 1] += l.signum() as i64;
        }
        v
    }
}

impl fmt::Debug for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.letters)
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (k, l) in self.letters.iter().enumerate() {
            if k > 0 {
                write!(f, ",")?;
            }
            write!(f, "{l}")?;
        }
        write!(f, "]")
    }
}

impl Serialize for Word {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.letters.serialize(s)
    }
}

/// A free-group endomorphism, given by the images of the generators.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Endomorphism {
    rank: usize,
    images: Vec<Word>,
}

impl Endomorphism {
    pub fn new(images: Vec<Word>) -> Result<Endomorphism> {
        let rank = images.len();
        if rank == 0 {
            return Err(Error::Malformed("endomorphism of rank 0".into()));
        }
        for w in &images {
            if w.rank != rank {
                return Err(Error::RankMismatch(w.rank, rank));
            }
        }
        Ok(Endomorphism { rank, images })
    }

    pub fn from_letters(images: &[Vec<Letter>]) -> Result<Endomorphism> {
        let rank = images.len();
        let ws = images.iter().map(|w| Word::reduce(w, rank)).collect::<Result<Vec<_>>>()?;
        Endomorphism::new(ws)
    }

    pub fn identity(rank: usize) -> Endomorphism {
        Endomorphism {
            rank,
            images: (1..=rank).map(|i| Word::generator(rank, i)).collect(),
        }
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn images(&self) -> &[Word] {
        &self.images
    }

    pub fn image(&self, i: usize) -> &Word {
        &self.images[i - 1]
    }

    pub fn apply(&self, w: &Word) -> Result<Word> {
        if w.rank != self.rank {
            return Err(Error::RankMismatch(self.rank, w.rank));
        }
        Ok(self.apply_unchecked(w))
    }

    pub(crate) fn apply_unchecked(&self, w: &Word) -> Word {
        let mut buf = Vec::with_capacity(w.len() * 2);
        for &l in &w.letters {
            let img = &self.images[l.unsigned_abs() as usize - 1].letters;
            if l > 0 {
                for &x in img {
                    push_reduced(&mut buf, x);
                }
            } else {
                for &x in img.iter().rev() {
                    push_reduced(&mut buf, -x);
                }
            }
        }
        Word { rank: self.rank, letters: buf }
    }

    /// `self ∘ other`: apply `other` first.
    pub fn compose(&self, other: &Endomorphism) -> Result<Endomorphism> {
        if self.rank != other.rank {
            return Err(Error::RankMismatch(self.rank, other.rank));
        }
        Ok(Endomorphism {
            rank: self.rank,
            images: other.images.iter().map(|w| self.apply_unchecked(w)).collect(),
        })
    }

    pub fn is_identity(&self) -> bool {
        self.images
            .iter()
            .enumerate()
            .all(|(i, w)| w.letters.len() == 1 && w.letters[0] == i as Letter + 1)
    }

    /// Total length of the generator images.
    pub fn size(&self) -> usize {
        self.images.iter().map(Word::len).sum()
    }
}

/// An automorphism stored together with its inverse.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Automorphism {
    forward: Endomorphism,
    backward: Endomorphism,
}

impl Automorphism {
    /// Checks that `backward` inverts `forward` on every generator, both ways.
    pub fn new(forward: Endomorphism, backward: Endomorphism) -> Result<Automorphism> {
        if forward.rank != backward.rank {
            return Err(Error::RankMismatch(forward.rank, backward.rank));
        }
        if !backward.compose(&forward)?.is_identity() || !forward.compose(&backward)?.is_identity() {
            return Err(Error::Malformed("backward images do not invert forward images".into()));
        }
        Ok(Automorphism { forward, backward })
    }

    pub(crate) fn new_unchecked(forward: Endomorphism, backward: Endomorphism) -> Automorphism {
        debug_assert_eq!(forward.rank, backward.rank);
        Automorphism { forward, backward }
    }

    pub fn identity(rank: usize) -> Automorphism {
        Automorphism {
            forward: Endomorphism::identity(rank),
            backward: Endomorphism::identity(rank),
        }
    }

    pub fn rank(&self) -> usize {
        self.forward.rank
    }

    pub fn forward(&self) -> &Endomorphism {
        &self.forward
    }

    pub fn backward(&self) -> &Endomorphism {
        &self.backward
    }

    pub fn apply(&self, w: &Word) -> Result<Word> {
        self.forward.apply(w)
    }

    /// Mapping-class order: `compose(f, g)` applies `g` first.
    pub fn compose(&self, g: &Automorphism) -> Result<Automorphism> {
        Ok(Automorphism {
            forward: self.forward.compose(&g.forward)?,
            backward: g.backward.compose(&self.backward)?,
        })
    }

    pub fn inverse(&self) -> Automorphism {
        Automorphism { forward: self.backward.clone(), backward: self.forward.clone() }
    }

    pub fn pow(&self, k: i64) -> Automorphism {
        let base = if k >= 0 { self.clone() } else { self.inverse() };
        let mut out = Automorphism::identity(self.rank());
        for _ in 0..k.unsigned_abs() {
            out = out.compose(&base).expect("equal ranks");
        }
        out
    }

    pub fn is_identity(&self) -> bool {
        self.forward.is_identity()
    }

    /// First generator (1-based) on which the forward images differ.
    pub fn first_disagreement(&self, other: &Automorphism) -> Option<usize> {
        (0..self.rank().max(other.rank()))
            .find(|&i| self.forward.images.get(i) != other.forward.images.get(i))
            .map(|i| i + 1)
    }
}

#[derive(Serialize, Deserialize)]
pub(crate) struct AutomorphismRepr {
    pub rank: usize,
    pub forward: Vec<Vec<Letter>>,
    pub backward: Vec<Vec<Letter>>,
}

impl AutomorphismRepr {
    pub(crate) fn from_auto(a: &Automorphism) -> Self {
        let dump = |e: &Endomorphism| e.images.iter().map(|w| w.letters.clone()).collect();
        AutomorphismRepr { rank: a.rank(), forward: dump(&a.forward), backward: dump(&a.backward) }
    }

    pub(crate) fn into_auto(self) -> Result<Automorphism> {
        if self.forward.len() != self.rank || self.backward.len() != self.rank {
            return Err(Error::Malformed(format!(
                "expected {} images in each direction, got {} and {}",
                self.rank,
                self.forward.len(),
                self.backward.len()
            )));
        }
        Automorphism::new(
            Endomorphism::from_letters(&self.forward)?,
            Endomorphism::from_letters(&self.backward)?,
        )
    }
}

impl Serialize for Automorphism {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        AutomorphismRepr::from_auto(self).serialize(s)
    }
}

impl<'de> Deserialize<'de> for Automorphism {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        AutomorphismRepr::deserialize(d)?.into_auto().map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn w(l: &[Letter]) -> Word {
        Word::reduce(l, 4).unwrap()
    }

    #[test]
    fn reduce_examples() {
        assert!(w(&[1, -1]).is_empty());
        assert!(w(&[1, 2, -2, -1]).is_empty());
        assert_eq!(w(&[1, 2, -2, 3]).letters(), &[1, 3]);
        assert!(matches!(Word::reduce(&[5], 4), Err(Error::LetterOutOfRange { .. })));
        assert!(Word::reduce(&[0], 4).is_err());
    }

    #[test]
    fn multiply_and_invert() {
        assert_eq!(w(&[1, 2]).multiply(&w(&[-2, 3])).unwrap().letters(), &[1, 3]);
        assert_eq!(w(&[1, 2]).invert().letters(), &[-2, -1]);
        let x = w(&[1, 3, -2, 4]);
        assert!(x.multiply(&x.invert()).unwrap().is_empty());
        let other = Word::reduce(&[1], 2).unwrap();
        assert_eq!(x.multiply(&other), Err(Error::RankMismatch(4, 2)));
    }

    #[test]
    fn apply_substitutes() {
        let e = Endomorphism::from_letters(&[vec![1, 2], vec![2]]).unwrap();
        let one = Word::reduce(&[1], 2).unwrap();
        assert_eq!(e.apply(&one).unwrap().letters(), &[1, 2]);
        assert_eq!(e.apply(&one.invert()).unwrap().letters(), &[-2, -1]);
        let id = Endomorphism::identity(2);
        let x = Word::reduce(&[1, -2, -2, 1], 2).unwrap();
        assert_eq!(id.apply(&x).unwrap(), x);
    }

    #[test]
    fn compose_order() {
        // f: s1 -> s1 s2, g: s2 -> s2 s1
        let f = Automorphism::new(
            Endomorphism::from_letters(&[vec![1, 2], vec![2]]).unwrap(),
            Endomorphism::from_letters(&[vec![1, -2], vec![2]]).unwrap(),
        )
        .unwrap();
        let g = Automorphism::new(
            Endomorphism::from_letters(&[vec![1], vec![2, 1]]).unwrap(),
            Endomorphism::from_letters(&[vec![1], vec![2, -1]]).unwrap(),
        )
        .unwrap();
        let fg = f.compose(&g).unwrap();
        // (f∘g)(s2) = f(s2 s1) = s2 s1 s2
        assert_eq!(fg.forward().image(2).letters(), &[2, 1, 2]);
        assert!(f.compose(&f.inverse()).unwrap().is_identity());
        assert_eq!(Automorphism::identity(2).compose(&g).unwrap(), g);
        assert_eq!(fg.first_disagreement(&g.compose(&f).unwrap()), Some(1));
    }

    #[test]
    fn rejects_bad_inverse() {
        let f = Endomorphism::from_letters(&[vec![1, 2], vec![2]]).unwrap();
        assert!(Automorphism::new(f.clone(), f).is_err());
    }

    #[test]
    fn serde_round_trip() {
        let f = Automorphism::new(
            Endomorphism::from_letters(&[vec![1, 2], vec![2]]).unwrap(),
            Endomorphism::from_letters(&[vec![1, -2], vec![2]]).unwrap(),
        )
        .unwrap();
        let s = serde_json::to_string(&f).unwrap();
        assert_eq!(s, r#"{"rank":2,"forward":[[1,2],[2]],"backward":[[1,-2],[2]]}"#);
        let back: Automorphism = serde_json::from_str(&s).unwrap();
        assert_eq!(back, f);
        assert_eq!(serde_json::to_string(&w(&[1, 2, -1, -2])).unwrap(), "[1,2,-1,-2]");
    }
}
