//! The surface `Σ_{g,1}` as a marked free group of rank `2g`.
//!
//! Generators are interleaved: `a_i = s_{2i-1}`, `b_i = s_{2i}`, and the
//! boundary word is `δ = [a_1,b_1]⋯[a_g,b_g]`. A mapping class is an
//! automorphism fixing `δ` exactly.
//!
//! The twist catalog:
//!
//! | id     | class             | meets            |
//! |--------|-------------------|------------------|
//! | `a<i>` | `a_i`             | `b_i`            |
//! | `b<i>` | `b_i`             | `a_i`, `c_{i-1}`, `c_i` |
//! | `c1`   | `a_1 + a_2`       | `b_1`, `b_2`     |
//! | `c<i>`, `i ≥ 2` | `a_i - a_{i+1}` | `b_i`, `b_{i+1}` |
//!
//! Consecutive entries of `a1 b1 c1 b2 c2 … b_g` form a chain. The id `d<h>`
//! names the separating curve `δ_h = [a_1,b_1]⋯[a_h,b_h]`; `d<g>` is the
//! boundary. It is not part of the catalog but is accepted in provenance
//! strings.

use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::word::{Automorphism, AutomorphismRepr, Endomorphism, Letter, Word};

pub fn boundary_word(g: usize) -> Result<Word> {
    if g < 1 {
        return Err(Error::OutOfRange(format!("genus {g}")));
    }
    partial_boundary(g, g)
}

/// `[a_1,b_1]⋯[a_h,b_h]` inside the rank-`2g` free group.
fn partial_boundary(g: usize, h: usize) -> Result<Word> {
    let mut raw = Vec::with_capacity(4 * h);
    for i in 1..=h as Letter {
        let (a, b) = (2 * i - 1, 2 * i);
        raw.extend([a, b, -a, -b]);
    }
    Word::reduce(&raw, 2 * g)
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SurfaceContext {
    genus: usize,
    boundary: Word,
}

impl SurfaceContext {
    pub fn new(genus: usize) -> Result<SurfaceContext> {
        Ok(SurfaceContext { genus, boundary: boundary_word(genus)? })
    }

    pub fn genus(&self) -> usize {
        self.genus
    }

    pub fn rank(&self) -> usize {
        2 * self.genus
    }

    pub fn boundary(&self) -> &Word {
        &self.boundary
    }

    pub fn is_mapping_class(&self, f: &Automorphism) -> bool {
        f.rank() == self.rank() && f.forward().apply_unchecked(&self.boundary) == self.boundary
    }

    pub fn identity(&self) -> MappingClass {
        MappingClass {
            auto: Automorphism::identity(self.rank()),
            ctx: self.clone(),
            provenance: "1".into(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Curve {
    A(usize),
    B(usize),
    C(usize),
    /// separating curve `δ_h`
    D(usize),
}

impl Curve {
    pub fn is_valid(&self, g: usize) -> bool {
        match *self {
            Curve::A(i) | Curve::B(i) | Curve::D(i) => (1..=g).contains(&i),
            Curve::C(i) => i >= 1 && i < g,
        }
    }

    /// Homology class in the interleaved basis.
    pub fn class(&self, g: usize) -> Vec<i64> {
        let mut v = vec![0i64; 2 * g];
        match *self {
            Curve::A(i) => v[2 * i - 2] = 1,
            Curve::B(i) => v[2 * i - 1] = 1,
            Curve::C(1) => {
                v[0] = 1;
                v[2] = 1;
            }
            Curve::C(i) => {
                v[2 * i - 2] = 1;
                v[2 * i] = -1;
            }
            Curve::D(_) => {}
        }
        v
    }

    /// Whether the two catalog curves intersect (each such pair meets once).
    pub fn meets(&self, other: &Curve) -> bool {
        use Curve::*;
        let one_way = |x: &Curve, y: &Curve| match (*x, *y) {
            (A(i), B(j)) => i == j,
            (B(j), C(i)) => j == i || j == i + 1,
            _ => false,
        };
        one_way(self, other) || one_way(other, self)
    }
}

impl fmt::Display for Curve {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Curve::A(i) => write!(f, "a{i}"),
            Curve::B(i) => write!(f, "b{i}"),
            Curve::C(i) => write!(f, "c{i}"),
            Curve::D(i) => write!(f, "d{i}"),
        }
    }
}

impl FromStr for Curve {
    type Err = Error;
    fn from_str(s: &str) -> Result<Curve> {
        let bad = || Error::UnknownCurve(s.to_string());
        let mut chars = s.chars();
        let kind = chars.next().ok_or_else(bad)?;
        let idx: usize = chars.as_str().parse().map_err(|_| bad())?;
        match kind {
            'a' => Ok(Curve::A(idx)),
            'b' => Ok(Curve::B(idx)),
            'c' => Ok(Curve::C(idx)),
            'd' => Ok(Curve::D(idx)),
            _ => Err(bad()),
        }
    }
}

/// Catalog curves of genus `g`, in the order `a_i`, `b_i`, then chain curves.
pub fn catalog(g: usize) -> Vec<Curve> {
    let mut out: Vec<Curve> = (1..=g).map(Curve::A).collect();
    out.extend((1..=g).map(Curve::B));
    out.extend((1..g).map(Curve::C));
    out
}

/// The chain `a1 b1 c1 b2 c2 … b_g` of length `2g`.
pub fn standard_chain(g: usize) -> Vec<Curve> {
    let mut out = vec![Curve::A(1), Curve::B(1)];
    for i in 1..g {
        out.push(Curve::C(i));
        out.push(Curve::B(i + 1));
    }
    out
}

/// Generator images written in local letters; `x` stands for a generator
/// index and `-x` for its inverse.
type Rule = (Letter, Vec<Letter>, Vec<Letter>);

fn twist_rules(curve: Curve, g: usize) -> Vec<Rule> {
    let handle = |i: usize| (2 * i as Letter - 1, 2 * i as Letter);
    match curve {
        Curve::A(i) => {
            let (a, b) = handle(i);
            vec![(b, vec![b, a], vec![b, -a])]
        }
        Curve::B(i) => {
            let (a, b) = handle(i);
            vec![(a, vec![a, -b], vec![a, b])]
        }
        Curve::C(1) => {
            let (a, b) = handle(1);
            let (x, y) = handle(2);
            vec![
                (a, vec![-x, a, x], vec![a, x, a, -x, -a]),
                (b, vec![-x, -a, x, a, b, a, x], vec![a, x, -a, -x, b, -x, -a]),
                (x, vec![-x, -a, x, a, x], vec![a, x, -a]),
                (y, vec![y, a, x], vec![y, -x, -a]),
            ]
        }
        Curve::C(i) => {
            let (a, b) = handle(i);
            let (x, y) = handle(i + 1);
            vec![
                (b, vec![-x, b, a], vec![b, -a, -b, x, b]),
                (x, vec![-x, b, a, -b, x, b, -a, -b, x], vec![b, -a, -b, x, b, a, -b]),
                (y, vec![y, b, -a, -b, x], vec![y, -x, b, a, -b]),
            ]
        }
        Curve::D(h) => {
            let d = partial_boundary(g, h).expect("valid genus");
            let dl = d.letters().to_vec();
            let di = d.invert().letters().to_vec();
            (1..=2 * h as Letter)
                .map(|s| {
                    let fw = [di.as_slice(), &[s], dl.as_slice()].concat();
                    let bw = [dl.as_slice(), &[s], di.as_slice()].concat();
                    (s, fw, bw)
                })
                .collect()
        }
    }
}

/// A certified mapping class: an automorphism fixing `δ`, with a provenance
/// string that evaluates back to it.
#[derive(Clone, Debug)]
pub struct MappingClass {
    auto: Automorphism,
    ctx: SurfaceContext,
    provenance: String,
}

impl PartialEq for MappingClass {
    fn eq(&self, other: &Self) -> bool {
        self.auto == other.auto
    }
}
impl Eq for MappingClass {}

/// Splits a single factor `base^k` (base an atom or a parenthesised group);
/// `None` when `p` is a product at top level.
fn as_factor(p: &str) -> Option<(&str, i64)> {
    let mut depth = 0i32;
    let mut caret = None;
    for (i, c) in p.char_indices() {
        match c {
            '(' => depth += 1,
            ')' => depth -= 1,
            ' ' if depth == 0 => return None,
            '^' if depth == 0 => caret = Some(i),
            _ => {}
        }
    }
    match caret {
        Some(i) => p[i + 1..].parse().ok().map(|k| (&p[..i], k)),
        None => Some((p, 1)),
    }
}

fn power_string(p: &str, k: i64) -> String {
    if k == 0 || p == "1" {
        return "1".into();
    }
    match as_factor(p) {
        Some((base, e)) => match e * k {
            1 => base.to_string(),
            total => format!("{base}^{total}"),
        },
        None if k == 1 => p.to_string(),
        None => format!("({p})^{k}"),
    }
}

fn product_string(a: &str, b: &str) -> String {
    match (a, b) {
        ("1", _) => b.to_string(),
        (_, "1") => a.to_string(),
        _ => format!("{a} * {b}"),
    }
}

impl MappingClass {
    /// Certifies `auto` against `ctx`.
    pub fn new(auto: Automorphism, ctx: &SurfaceContext, provenance: impl Into<String>) -> Result<Self> {
        if auto.rank() != ctx.rank() {
            return Err(Error::RankMismatch(auto.rank(), ctx.rank()));
        }
        if !ctx.is_mapping_class(&auto) {
            let img = auto.forward().apply_unchecked(ctx.boundary());
            return Err(Error::NotMappingClass(format!("boundary word is sent to {img}")));
        }
        Ok(MappingClass { auto, ctx: ctx.clone(), provenance: provenance.into() })
    }

    pub fn auto(&self) -> &Automorphism {
        &self.auto
    }

    pub fn context(&self) -> &SurfaceContext {
        &self.ctx
    }

    pub fn genus(&self) -> usize {
        self.ctx.genus
    }

    pub fn provenance(&self) -> &str {
        &self.provenance
    }

    pub fn with_provenance(mut self, p: impl Into<String>) -> Self {
        self.provenance = p.into();
        self
    }

    pub fn apply(&self, w: &Word) -> Result<Word> {
        self.auto.apply(w)
    }

    /// `self ∘ other`
    pub fn compose(&self, other: &MappingClass) -> Result<MappingClass> {
        if self.ctx != other.ctx {
            return Err(Error::RankMismatch(self.ctx.rank(), other.ctx.rank()));
        }
        Ok(MappingClass {
            auto: self.auto.compose(&other.auto)?,
            ctx: self.ctx.clone(),
            provenance: product_string(&self.provenance, &other.provenance),
        })
    }

    pub fn inverse(&self) -> MappingClass {
        MappingClass {
            auto: self.auto.inverse(),
            ctx: self.ctx.clone(),
            provenance: power_string(&self.provenance, -1),
        }
    }

    pub fn pow(&self, k: i64) -> MappingClass {
        MappingClass {
            auto: self.auto.pow(k),
            ctx: self.ctx.clone(),
            provenance: power_string(&self.provenance, k),
        }
    }

    /// `self ∘ t ∘ self⁻¹`
    pub fn conjugate(&self, t: &MappingClass) -> Result<MappingClass> {
        self.compose(t)?.compose(&self.inverse())
    }

    pub fn commutes_with(&self, other: &MappingClass) -> bool {
        self.compose(other).ok() == other.compose(self).ok()
    }

    pub fn braids_with(&self, other: &MappingClass) -> bool {
        let l = self.compose(other).and_then(|x| x.compose(self)).ok();
        let r = other.compose(self).and_then(|x| x.compose(other)).ok();
        l == r
    }

    pub fn is_identity(&self) -> bool {
        self.auto.is_identity()
    }

    /// Re-evaluates the provenance string and compares.
    pub fn provenance_consistent(&self) -> Result<bool> {
        Ok(evaluate_provenance(&self.ctx, &self.provenance)?.auto == self.auto)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("serializable")
    }

    pub fn from_json(s: &str) -> Result<MappingClass> {
        serde_json::from_str(s).map_err(|e| Error::Malformed(e.to_string()))
    }
}

#[derive(Serialize, Deserialize)]
struct MappingClassRepr {
    #[serde(flatten)]
    auto: AutomorphismRepr,
    genus: usize,
    provenance: String,
}

impl Serialize for MappingClass {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        MappingClassRepr {
            auto: AutomorphismRepr::from_auto(&self.auto),
            genus: self.ctx.genus,
            provenance: self.provenance.clone(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for MappingClass {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let r = MappingClassRepr::deserialize(d)?;
        if r.auto.rank != 2 * r.genus {
            return Err(D::Error::custom(format!("rank {} does not match genus {}", r.auto.rank, r.genus)));
        }
        let ctx = SurfaceContext::new(r.genus).map_err(D::Error::custom)?;
        let auto = r.auto.into_auto().map_err(D::Error::custom)?;
        MappingClass::new(auto, &ctx, r.provenance).map_err(D::Error::custom)
    }
}

/// Right Dehn twist about a catalog curve (or a separating curve `d<h>`).
pub fn standard_twist(ctx: &SurfaceContext, curve: Curve) -> Result<MappingClass> {
    let g = ctx.genus;
    if !curve.is_valid(g) {
        return Err(Error::UnknownCurve(format!("{curve} (genus {g})")));
    }
    let n = ctx.rank();
    let mut fw: Vec<Vec<Letter>> = (1..=n as Letter).map(|i| vec![i]).collect();
    let mut bw = fw.clone();
    for (s, f, b) in twist_rules(curve, g) {
        fw[s as usize - 1] = f;
        bw[s as usize - 1] = b;
    }
    let auto = Automorphism::new_unchecked(Endomorphism::from_letters(&fw)?, Endomorphism::from_letters(&bw)?);
    debug_assert!(auto.forward().compose(auto.backward()).unwrap().is_identity());
    MappingClass::new(auto, ctx, format!("T{curve}"))
}

pub fn twist_by_id(ctx: &SurfaceContext, id: &str) -> Result<MappingClass> {
    standard_twist(ctx, id.parse()?)
}

/// `f ∘ t ∘ f⁻¹`, the twist about the image curve.
pub fn conjugated_twist(f: &MappingClass, t: &MappingClass) -> Result<MappingClass> {
    f.conjugate(t)
}

/// A curve presented as the image of a base curve under a transporter.
#[derive(Clone, Debug)]
pub struct CurveHandle {
    pub base: Curve,
    pub transporter: MappingClass,
}

impl CurveHandle {
    pub fn base(ctx: &SurfaceContext, base: Curve) -> CurveHandle {
        CurveHandle { base, transporter: ctx.identity() }
    }

    pub fn new(base: Curve, transporter: MappingClass) -> CurveHandle {
        CurveHandle { base, transporter }
    }

    pub fn twist(&self) -> Result<MappingClass> {
        let t = standard_twist(self.transporter.context(), self.base)?;
        if self.transporter.is_identity() {
            return Ok(t);
        }
        conjugated_twist(&self.transporter, &t)
    }

    /// The image curve `f(self)`.
    pub fn moved_by(&self, f: &MappingClass) -> Result<CurveHandle> {
        Ok(CurveHandle { base: self.base, transporter: f.compose(&self.transporter)? })
    }

    /// Homology class, up to the sign fixed by the transporter.
    pub fn class(&self) -> Vec<i64> {
        let g = self.transporter.genus();
        let x = self.base.class(g);
        crate::homology::abelianize(&self.transporter).apply(&x)
    }
}

/// Right twist about the boundary, `s ↦ δ⁻¹ s δ`.
pub fn boundary_twist(ctx: &SurfaceContext) -> MappingClass {
    standard_twist(ctx, Curve::D(ctx.genus)).expect("boundary curve exists")
}

/// Right twist about `δ_h`, which cuts off handles `1..=h`.
pub fn separating_twist(ctx: &SurfaceContext, h: usize) -> Result<MappingClass> {
    if h < 1 || h >= ctx.genus {
        return Err(Error::OutOfRange(format!("separating twist genus h={h} for g={}", ctx.genus)));
    }
    standard_twist(ctx, Curve::D(h))
}

pub fn chain_product(ctx: &SurfaceContext, chain: &[Curve]) -> Result<MappingClass> {
    let mut out = ctx.identity();
    for &c in chain {
        out = out.compose(&standard_twist(ctx, c)?)?;
    }
    Ok(out.with_provenance(chain.iter().map(|c| format!("T{c}")).collect::<Vec<_>>().join(" * ")))
}

/// Everything needed to state the expected Johnson image of a bounding pair.
#[derive(Clone, Debug)]
pub struct BoundingPair {
    pub map: MappingClass,
    pub y: CurveHandle,
    pub y_prime: CurveHandle,
    pub h: usize,
    pub pair_class: Vec<i64>,
    /// symplectic basis `(a_i, b_i)` of the genus-`h` piece
    pub cut_basis: Vec<(Vec<i64>, Vec<i64>)>,
}

/// `T_y T_{y'}⁻¹` with `y = α_{h+1}` and `y'` the other boundary curve of a
/// neighbourhood of the chain `a1 b1 c1 … b_h c_h`. The transporter is half
/// of the chain relation for the longer chain ending in `b_{h+1}`.
pub fn bounding_pair_data(ctx: &SurfaceContext, h: usize) -> Result<BoundingPair> {
    let g = ctx.genus;
    if h < 1 || h >= g {
        return Err(Error::OutOfRange(format!("bounding pair genus h={h} for g={g}")));
    }
    let chain = &standard_chain(g)[..2 * h + 2];
    let transporter = chain_product(ctx, chain)?.pow(2 * h as i64 + 3);
    let y = CurveHandle::base(ctx, Curve::A(h + 1));
    let y_prime = CurveHandle::new(Curve::A(h + 1), transporter);
    let map = y.twist()?.compose(&y_prime.twist()?.inverse())?;
    let unit = |k: usize| {
        let mut v = vec![0i64; 2 * g];
        v[k] = 1;
        v
    };
    Ok(BoundingPair {
        map,
        pair_class: Curve::A(h + 1).class(g),
        cut_basis: (0..h).map(|i| (unit(2 * i), unit(2 * i + 1))).collect(),
        y,
        y_prime,
        h,
    })
}

pub fn bounding_pair(ctx: &SurfaceContext, h: usize) -> Result<MappingClass> {
    Ok(bounding_pair_data(ctx, h)?.map)
}

// provenance grammar:
//   expr    := factor ('*' factor)*
//   factor  := primary ('^' int)?
//   primary := 'T' curve | '1' | '(' expr ')'

struct Parser<'a> {
    ctx: &'a SurfaceContext,
    src: &'a str,
    pos: usize,
}

impl<'a> Parser<'a> {
    fn err(&self, what: &str) -> Error {
        Error::Malformed(format!("provenance `{}` at byte {}: {what}", self.src, self.pos))
    }

    fn skip_ws(&mut self) {
        while self.src[self.pos..].starts_with(' ') {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.src[self.pos..].chars().next()
    }

    fn expr(&mut self) -> Result<MappingClass> {
        let mut acc = self.factor()?;
        while self.peek() == Some('*') {
            self.pos += 1;
            let next = self.factor()?;
            acc = acc.compose(&next)?;
        }
        Ok(acc)
    }

    fn factor(&mut self) -> Result<MappingClass> {
        let base = self.primary()?;
        if self.peek() == Some('^') {
            self.pos += 1;
            let rest = &self.src[self.pos..];
            let len = rest
                .char_indices()
                .take_while(|&(i, c)| c.is_ascii_digit() || (i == 0 && c == '-'))
                .count();
            let k: i64 = rest[..len].parse().map_err(|_| self.err("expected an exponent"))?;
            self.pos += len;
            return Ok(base.pow(k));
        }
        Ok(base)
    }

    fn primary(&mut self) -> Result<MappingClass> {
        match self.peek() {
            Some('(') => {
                self.pos += 1;
                let inner = self.expr()?;
                if self.peek() != Some(')') {
                    return Err(self.err("expected `)`"));
                }
                self.pos += 1;
                Ok(inner)
            }
            Some('1') => {
                self.pos += 1;
                Ok(self.ctx.identity())
            }
            Some('T') => {
                self.pos += 1;
                let rest = &self.src[self.pos..];
                let len = rest.chars().take_while(|c| c.is_ascii_alphanumeric()).count();
                let id = &rest[..len];
                self.pos += len;
                standard_twist(self.ctx, id.parse()?)
            }
            _ => Err(self.err("expected `T<id>`, `1` or `(`")),
        }
    }
}

/// Evaluates a provenance string such as `"(Ta1 * Tb1)^3 * Tc1^-1"`.
pub fn evaluate_provenance(ctx: &SurfaceContext, src: &str) -> Result<MappingClass> {
    let mut p = Parser { ctx, src, pos: 0 };
    let out = p.expr()?;
    if p.peek().is_some() {
        return Err(p.err("trailing input"));
    }
    Ok(out.with_provenance(src))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::homology::{abelianize, transvection};

    fn ctx(g: usize) -> SurfaceContext {
        SurfaceContext::new(g).unwrap()
    }

    #[test]
    fn boundary_words() {
        assert_eq!(boundary_word(1).unwrap().letters(), &[1, 2, -1, -2]);
        assert_eq!(boundary_word(2).unwrap().letters(), &[1, 2, -1, -2, 3, 4, -3, -4]);
        assert!(boundary_word(0).is_err());
        assert!(boundary_word(3).unwrap().abelianize().iter().all(|&x| x == 0));
    }

    #[test]
    fn mapping_class_membership() {
        let c = ctx(1);
        assert!(c.is_mapping_class(&Automorphism::identity(2)));
        let d = c.boundary().letters().to_vec();
        let di = c.boundary().invert().letters().to_vec();
        let conj = Automorphism::new(
            Endomorphism::from_letters(&[[&d[..], &[1], &di[..]].concat(), [&d[..], &[2], &di[..]].concat()])
                .unwrap(),
            Endomorphism::from_letters(&[[&di[..], &[1], &d[..]].concat(), [&di[..], &[2], &d[..]].concat()])
                .unwrap(),
        )
        .unwrap();
        assert!(c.is_mapping_class(&conj));
        let swap = Automorphism::new(
            Endomorphism::from_letters(&[vec![2], vec![1]]).unwrap(),
            Endomorphism::from_letters(&[vec![2], vec![1]]).unwrap(),
        )
        .unwrap();
        assert!(!c.is_mapping_class(&swap));
        assert!(matches!(MappingClass::new(swap, &c, "swap"), Err(Error::NotMappingClass(_))));
    }

    #[test]
    fn twist_about_a1_is_transvection() {
        let c = ctx(1);
        let t = standard_twist(&c, Curve::A(1)).unwrap();
        let m = abelianize(&t);
        assert_eq!(m.rows().to_rows(), vec![vec![1, 1], vec![0, 1]]);
        assert_eq!(m, transvection(&[1, 0]));
    }

    #[test]
    fn unknown_curves_rejected() {
        let c = ctx(2);
        assert!(twist_by_id(&c, "a3").is_err());
        assert!(twist_by_id(&c, "c2").is_err());
        assert!(twist_by_id(&c, "x1").is_err());
        assert!(twist_by_id(&c, "c1").is_ok());
    }

    #[test]
    fn provenance_round_trip() {
        let c = ctx(2);
        let src = "(Ta1 * Tb1)^3 * (Tb2 * Ta2)^-3 * Tc1^-1";
        let f = evaluate_provenance(&c, src).unwrap();
        assert!(f.provenance_consistent().unwrap());
        let g = f.inverse().compose(&twist_by_id(&c, "b2").unwrap()).unwrap().pow(2);
        assert!(g.provenance_consistent().unwrap());
        assert!(evaluate_provenance(&c, "Ta1 *").is_err());
        assert!(evaluate_provenance(&c, "(Ta1").is_err());
        assert!(evaluate_provenance(&c, "1").unwrap().is_identity());
    }

    #[test]
    fn power_strings() {
        assert_eq!(power_string("Ta1", -1), "Ta1^-1");
        assert_eq!(power_string("Ta1^-1", -1), "Ta1");
        assert_eq!(power_string("Ta1 * Tb1", 5), "(Ta1 * Tb1)^5");
        assert_eq!(power_string("(Ta1 * Tb1)^5", -1), "(Ta1 * Tb1)^-5");
        assert_eq!(product_string("1", "Ta1"), "Ta1");
    }

    #[test]
    fn separating_and_boundary() {
        let c = ctx(3);
        assert!(abelianize(&boundary_twist(&c)).is_identity());
        assert!(abelianize(&separating_twist(&c, 2).unwrap()).is_identity());
        assert!(separating_twist(&c, 3).is_err());
        assert!(separating_twist(&c, 0).is_err());
        assert!(bounding_pair(&c, 3).is_err());
    }

    #[test]
    fn serde_round_trip() {
        let c = ctx(2);
        let f = evaluate_provenance(&c, "Ta1 * Tc1^-1").unwrap();
        let back = MappingClass::from_json(&f.to_json()).unwrap();
        assert_eq!(back, f);
        assert_eq!(back.provenance(), "Ta1 * Tc1^-1");
        let broken = f.to_json().replace("\"genus\":2", "\"genus\":1");
        assert!(MappingClass::from_json(&broken).is_err());
    }
}
