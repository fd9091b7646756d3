//! Lantern, crossed lantern and the telescoping argument, verified as exact
//! equalities of automorphisms, plus a formal abelianization calculator.

use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::fmt;

use crate::error::{Error, Result};
use crate::homology::{abelianize, congruence_check, torelli_check};
use crate::johnson::johnson_tau;
use crate::surface::{evaluate_provenance, standard_twist, Curve, CurveHandle, MappingClass, SurfaceContext};

/// Transporters for the lantern in handles 1 and 2: each interior curve is the
/// image of a catalog curve.
pub const LANTERN_CURVES: [(&str, &str, &str); 3] = [
    ("x", "c1", "(Ta1 * Tb1)^3 * (Tb2 * Ta2)^-3"),
    ("z", "a2", "(Ta1 * Tb1 * Tc1 * Tb2)^5"),
    ("y", "a1", "(Tb1 * Tc1 * Tb2 * Ta2)^5"),
];

/// Transporter of `y_2 = F(b_2)` in the crossed lantern.
pub const CROSSED_LANTERN_TRANSPORTER: &str = "(Ta1 * Tb1 * Tc1 * Tb2)^5";

#[derive(Clone, Debug)]
pub struct RelationInstance {
    pub name: String,
    pub context: SurfaceContext,
    pub lhs: Vec<MappingClass>,
    pub rhs: Vec<MappingClass>,
}

fn product(ctx: &SurfaceContext, side: &[MappingClass]) -> Result<MappingClass> {
    let mut out = ctx.identity();
    for f in side {
        out = out.compose(f)?;
    }
    Ok(out)
}

#[derive(Serialize, Deserialize)]
struct RelationRepr {
    name: String,
    genus: usize,
    lhs: Vec<String>,
    rhs: Vec<String>,
}

impl RelationInstance {
    pub fn lhs_product(&self) -> Result<MappingClass> {
        product(&self.context, &self.lhs)
    }

    pub fn rhs_product(&self) -> Result<MappingClass> {
        product(&self.context, &self.rhs)
    }

    /// Conjugates every factor by `w`.
    pub fn conjugate(&self, w: &MappingClass) -> Result<RelationInstance> {
        let conj = |side: &[MappingClass]| side.iter().map(|f| w.conjugate(f)).collect::<Result<Vec<_>>>();
        Ok(RelationInstance {
            name: format!("{} conjugated by {}", self.name, w.provenance()),
            context: self.context.clone(),
            lhs: conj(&self.lhs)?,
            rhs: conj(&self.rhs)?,
        })
    }

    pub fn to_json(&self) -> String {
        let names = |side: &[MappingClass]| side.iter().map(|f| f.provenance().to_string()).collect();
        serde_json::to_string_pretty(&RelationRepr {
            name: self.name.clone(),
            genus: self.context.genus(),
            lhs: names(&self.lhs),
            rhs: names(&self.rhs),
        })
        .expect("serializable")
    }

    /// Rebuilds every factor from its provenance string.
    pub fn from_json(s: &str) -> Result<RelationInstance> {
        let r: RelationRepr = serde_json::from_str(s).map_err(|e| Error::Malformed(e.to_string()))?;
        let ctx = SurfaceContext::new(r.genus)?;
        let eval = |side: &[String]| side.iter().map(|p| evaluate_provenance(&ctx, p)).collect::<Result<Vec<_>>>();
        Ok(RelationInstance { name: r.name, lhs: eval(&r.lhs)?, rhs: eval(&r.rhs)?, context: ctx })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RelationReport {
    pub name: String,
    pub exact: bool,
    /// 1-based generator where the two sides first differ
    pub first_disagreement: Option<usize>,
    pub symplectic: bool,
    /// `None` unless both sides are Torelli
    pub johnson: Option<bool>,
}

impl RelationReport {
    pub fn passed(&self) -> bool {
        self.exact && self.symplectic && self.johnson != Some(false)
    }
}

impl fmt::Display for RelationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let verdict = |b: bool| if b { "pass" } else { "FAIL" };
        write!(f, "{}: exact {}", self.name, verdict(self.exact))?;
        if let Some(i) = self.first_disagreement {
            write!(f, " (first differs on s{i})")?;
        }
        write!(f, ", symplectic {}", verdict(self.symplectic))?;
        match self.johnson {
            Some(b) => write!(f, ", johnson {}", verdict(b)),
            None => write!(f, ", johnson n/a"),
        }
    }
}

pub fn verify_relation(r: &RelationInstance) -> Result<RelationReport> {
    let g = r.context.genus();
    if let Some(bad) = r.lhs.iter().chain(&r.rhs).find(|f| f.genus() != g) {
        return Err(Error::Precondition(format!(
            "`{}` lives in genus {}, relation in genus {g}",
            bad.provenance(),
            bad.genus()
        )));
    }
    let (l, rr) = (r.lhs_product()?, r.rhs_product()?);
    let first = l.auto().first_disagreement(rr.auto());
    let (al, ar) = (abelianize(&l), abelianize(&rr));
    let johnson = if torelli_check(&al) && torelli_check(&ar) {
        Some(johnson_tau(&l)? == johnson_tau(&rr)?)
    } else {
        None
    };
    Ok(RelationReport {
        name: r.name.clone(),
        exact: first.is_none(),
        first_disagreement: first,
        symplectic: al == ar,
        johnson,
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Check {
    pub name: String,
    pub passed: bool,
}

impl Check {
    fn new(name: impl Into<String>, passed: bool) -> Self {
        Check { name: name.into(), passed }
    }
}

fn twist(ctx: &SurfaceContext, id: &str) -> Result<MappingClass> {
    standard_twist(ctx, id.parse()?)
}

pub struct Lantern {
    pub instance: RelationInstance,
    /// `T_x T_{c1}⁻¹`, `T_z T_{a2}⁻¹`, `T_y T_{a1}⁻¹`
    pub bounding_pairs: Vec<MappingClass>,
}

/// `(T_x T_{c1}⁻¹)(T_z T_{a2}⁻¹)(T_y T_{a1}⁻¹) = T_{d2}`: the four boundary curves
/// `a1, a2, c1, d2` of a sphere with four holes and three interior curves.
pub fn lantern(g: usize) -> Result<Lantern> {
    if g < 3 {
        return Err(Error::OutOfRange(format!("the lantern needs g>=3 (got {g})")));
    }
    let ctx = SurfaceContext::new(g)?;
    let mut lhs = Vec::new();
    let mut bounding_pairs = Vec::new();
    for (_, base, transporter) in LANTERN_CURVES {
        let handle = CurveHandle::new(base.parse::<Curve>()?, evaluate_provenance(&ctx, transporter)?);
        let inner = handle.twist()?;
        let outer = twist(&ctx, base)?.inverse();
        bounding_pairs.push(inner.compose(&outer)?);
        lhs.push(inner);
        lhs.push(outer);
    }
    let instance = RelationInstance { name: "lantern".into(), lhs, rhs: vec![twist(&ctx, "d2")?], context: ctx };
    Ok(Lantern { instance, bounding_pairs })
}

pub fn lantern_instance(g: usize) -> Result<RelationInstance> {
    Ok(lantern(g)?.instance)
}

pub struct CrossedLantern {
    pub instance: RelationInstance,
    pub x1: CurveHandle,
    pub x2: CurveHandle,
    pub y1: CurveHandle,
    pub y2: CurveHandle,
    pub z1: CurveHandle,
    pub z2: CurveHandle,
    pub facts: Vec<Check>,
}

/// `(T_{y1}T_{y2}⁻¹)(T_{x1}T_{x2}⁻¹) = T_{z1}T_{z2}⁻¹` inside handles 1 and 2, with
/// `x2 = a2`, `y1 = b2`, `y2 = F(b2)`, `x1 = T_{y2}T_{y1}⁻¹(x2)` and `z_i = T_{x2}(y_i)`.
pub fn crossed_lantern(g: usize) -> Result<CrossedLantern> {
    if g < 2 {
        return Err(Error::OutOfRange(format!("the crossed lantern needs g>=2 (got {g})")));
    }
    let ctx = SurfaceContext::new(g)?;
    let x2 = CurveHandle::base(&ctx, Curve::A(2));
    let y1 = CurveHandle::base(&ctx, Curve::B(2));
    let y2 = CurveHandle::new(Curve::B(2), evaluate_provenance(&ctx, CROSSED_LANTERN_TRANSPORTER)?);
    let (tx2, ty1, ty2) = (x2.twist()?, y1.twist()?, y2.twist()?);
    let bpy_inv = ty2.compose(&ty1.inverse())?;
    let x1 = x2.moved_by(&bpy_inv)?;
    let (z1, z2) = (y1.moved_by(&tx2)?, y2.moved_by(&tx2)?);
    let (tx1, tz1, tz2) = (x1.twist()?, z1.twist()?, z2.twist()?);

    let bpx = tx1.compose(&tx2.inverse())?;
    let bpy = ty1.compose(&ty2.inverse())?;
    let bpz = tz1.compose(&tz2.inverse())?;
    let mut facts = vec![
        Check::new("T_x2 T_y1 T_x2^-1 = T_z1", tx2.conjugate(&ty1)? == tz1),
        Check::new("T_x2 T_y2 T_x2^-1 = T_z2", tx2.conjugate(&ty2)? == tz2),
        Check::new("(T_y2 T_y1^-1) T_x2 (T_y2 T_y1^-1)^-1 = T_x1", bpy_inv.conjugate(&tx2)? == tx1),
        Check::new("[x1] = [x2]", x1.class() == x2.class()),
        Check::new("T_x1 commutes with T_x2", tx1.commutes_with(&tx2)),
        Check::new("T_y1 commutes with T_y2", ty1.commutes_with(&ty2)),
        Check::new("T_y1 braids with T_x2", ty1.braids_with(&tx2)),
        Check::new("T_y2 braids with T_x2", ty2.braids_with(&tx2)),
        Check::new("T_x1 T_x2^-1 is Torelli", torelli_check(&abelianize(&bpx))),
        Check::new("T_y1 T_y2^-1 is Torelli", torelli_check(&abelianize(&bpy))),
    ];
    // the three-line rearrangement from the key facts
    let line1 = bpy_inv.conjugate(&tx2)?.compose(&tx2.inverse())?;
    let line2 = bpy_inv.compose(&tx2.conjugate(&bpy)?)?;
    let line3 = bpy_inv.compose(&bpz)?;
    facts.push(Check::new("T_x1 T_x2^-1 = (T_y2 T_y1^-1 T_x2 T_y1 T_y2^-1) T_x2^-1", bpx == line1));
    facts.push(Check::new("... = (T_y2 T_y1^-1)(T_x2 (T_y1 T_y2^-1) T_x2^-1)", line1 == line2));
    facts.push(Check::new("... = T_y2 T_y1^-1 T_z1 T_z2^-1", line2 == line3));

    let instance = RelationInstance {
        name: "crossed lantern".into(),
        lhs: vec![ty1, ty2.inverse(), tx1, tx2.inverse()],
        rhs: vec![tz1, tz2.inverse()],
        context: ctx,
    };
    Ok(CrossedLantern { instance, x1, x2, y1, y2, z1, z2, facts })
}

pub fn crossed_lantern_instance(g: usize) -> Result<RelationInstance> {
    Ok(crossed_lantern(g)?.instance)
}

/// A letter `w s^e w⁻¹`; an empty conjugator means plain `s^e`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FormalLetter {
    pub symbol: String,
    pub exp: i64,
    pub conj: FormalWord,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct FormalWord {
    pub letters: Vec<FormalLetter>,
}

impl FormalWord {
    pub fn empty() -> Self {
        FormalWord::default()
    }

    pub fn letter(symbol: &str, exp: i64) -> Self {
        FormalWord { letters: vec![FormalLetter { symbol: symbol.into(), exp, conj: FormalWord::empty() }] }
    }

    /// Space separated letters `s` or `s^k`.
    pub fn parse(src: &str) -> Result<Self> {
        let mut out = FormalWord::empty();
        for tok in src.split_whitespace() {
            let (sym, exp) = match tok.split_once('^') {
                Some((s, e)) => (s, e.parse().map_err(|_| Error::Malformed(format!("bad exponent in `{tok}`")))?),
                None => (tok, 1),
            };
            if sym.is_empty() || !sym.chars().all(|c| c.is_alphanumeric() || c == '_') {
                return Err(Error::Malformed(format!("bad symbol `{tok}`")));
            }
            out = out.then(&FormalWord::letter(sym, exp));
        }
        Ok(out)
    }

    pub fn then(&self, other: &FormalWord) -> FormalWord {
        let mut letters = self.letters.clone();
        letters.extend(other.letters.iter().cloned());
        FormalWord { letters }
    }

    /// Wraps every letter in the conjugator `w`.
    pub fn conjugated_by(&self, w: &FormalWord) -> FormalWord {
        FormalWord {
            letters: self
                .letters
                .iter()
                .map(|l| FormalLetter { symbol: l.symbol.clone(), exp: l.exp, conj: w.then(&l.conj) })
                .collect(),
        }
    }

    pub fn pow(&self, k: i64) -> FormalWord {
        let base = if k < 0 { self.inverse() } else { self.clone() };
        (0..k.unsigned_abs()).fold(FormalWord::empty(), |acc, _| acc.then(&base))
    }

    pub fn inverse(&self) -> FormalWord {
        FormalWord {
            letters: self
                .letters
                .iter()
                .rev()
                .map(|l| FormalLetter { symbol: l.symbol.clone(), exp: -l.exp, conj: l.conj.clone() })
                .collect(),
        }
    }

    /// Replaces each unconjugated occurrence of `symbol` by `w`.
    pub fn substitute(&self, symbol: &str, w: &FormalWord) -> FormalWord {
        let mut out = FormalWord::empty();
        for l in &self.letters {
            if l.symbol == symbol {
                out = out.then(&w.pow(l.exp).conjugated_by(&l.conj));
            } else {
                out.letters.push(l.clone());
            }
        }
        out
    }

    fn symbols<'a>(&'a self, acc: &mut Vec<&'a str>) {
        for l in &self.letters {
            acc.push(&l.symbol);
            l.conj.symbols(acc);
        }
    }
}

impl fmt::Display for FormalWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .letters
            .iter()
            .map(|l| {
                let s = if l.exp == 1 { l.symbol.clone() } else { format!("{}^{}", l.symbol, l.exp) };
                if l.conj.letters.is_empty() {
                    s
                } else {
                    format!("({}) {s} ({})^-1", l.conj, l.conj)
                }
            })
            .collect();
        if parts.is_empty() {
            f.write_str("1")
        } else {
            f.write_str(&parts.join(" "))
        }
    }
}

/// Image in the free abelian group on `alphabet`; zero coefficients are omitted.
pub fn formal_abelianization(w: &FormalWord, alphabet: &[&str]) -> Result<BTreeMap<String, i64>> {
    let mut used = Vec::new();
    w.symbols(&mut used);
    if let Some(bad) = used.iter().find(|s| !alphabet.contains(s)) {
        return Err(Error::Malformed(format!("symbol `{bad}` is not in the alphabet")));
    }
    let mut out = BTreeMap::new();
    for l in &w.letters {
        *out.entry(l.symbol.clone()).or_insert(0) += l.exp;
    }
    out.retain(|_, c| *c != 0);
    Ok(out)
}

pub const KILLSEP_ALPHABET: [&str; 6] = ["tx1", "tx2", "tx3", "f1", "f2", "f3"];

/// `(τ_{x3} τ_{x2} τ_{x1})(f3 τ_{x3}⁻¹ f3⁻¹ f2 τ_{x2}⁻¹ f2⁻¹ f1 τ_{x1}⁻¹ f1⁻¹)`, which equals `T_β²`.
pub fn killsep_word() -> FormalWord {
    FormalWord::parse("tx3 tx2 tx1 f3 tx3^-1 f3^-1 f2 tx2^-1 f2^-1 f1 tx1^-1 f1^-1").expect("well formed")
}

#[derive(Clone, Debug)]
pub struct TelescopeReport {
    pub genus: usize,
    pub p: u64,
    /// one per `k = 0..p`
    pub conjugated: Vec<RelationReport>,
    /// `T_{x2}^p (T_{y1}T_{y2}⁻¹) T_{x2}^{-p} = (T_{y1}T_{y2}⁻¹)(T_{x1}T_{x2}⁻¹)^p`
    pub telescoped_exact: bool,
    pub power_in_level: bool,
    /// `Y_p → Y_{p-1} X → ⋯ → Y_0 X^p`
    pub chain: Vec<FormalWord>,
    /// coefficient of `X` in `[T_{x2}^p Y_0 T_{x2}^{-p}] - [Y_0 X^p]`, up to sign
    pub bp_coefficient: i64,
}

impl TelescopeReport {
    pub fn passed(&self) -> bool {
        self.conjugated.iter().all(RelationReport::passed)
            && self.telescoped_exact
            && self.power_in_level
            && self.bp_coefficient == self.p as i64
    }
}

pub const TELESCOPE_MAX_P: u64 = 7;

/// Conjugates the crossed lantern by `T_{x2}^k` for `k < p` and telescopes.
pub fn telescope_check(g: usize, p: u64) -> Result<TelescopeReport> {
    if p == 0 || p.is_multiple_of(2) {
        return Err(Error::UnsupportedModulus(p));
    }
    if p > TELESCOPE_MAX_P {
        return Err(Error::SizeGuard(format!("telescoping is limited to p<={TELESCOPE_MAX_P} (got {p})")));
    }
    let cl = crossed_lantern(g)?;
    let ctx = cl.instance.context.clone();
    let tx2 = cl.x2.twist()?;
    let bpx = [cl.x1.twist()?, tx2.inverse()];
    let bp_of = |k: i64| -> Result<[MappingClass; 2]> {
        let t = tx2.pow(k);
        Ok([cl.y1.moved_by(&t)?.twist()?, cl.y2.moved_by(&t)?.twist()?.inverse()])
    };
    let mut conjugated = Vec::new();
    for k in 0..p as i64 {
        let lhs: Vec<MappingClass> = bp_of(k)?.into_iter().chain(bpx.iter().cloned()).collect();
        let r = RelationInstance {
            name: format!("crossed lantern conjugated by T_x2^{k}"),
            context: ctx.clone(),
            lhs,
            rhs: bp_of(k + 1)?.to_vec(),
        };
        conjugated.push(verify_relation(&r)?);
    }
    let bpx_map = product(&ctx, &bpx)?;
    let bpy_map = product(&ctx, &bp_of(0)?)?;
    let tp = tx2.pow(p as i64);
    let telescoped_exact = tp.conjugate(&bpy_map)? == bpy_map.compose(&bpx_map.pow(p as i64))?;
    // level 1 is the whole group
    let power_in_level = p == 1 || congruence_check(&abelianize(&tp), p)?;

    let pk = p as usize;
    let y = |k: usize| format!("Y{k}");
    let mut alphabet_owned: Vec<String> = (0..=pk).map(y).collect();
    alphabet_owned.extend(["X".to_string(), "t".to_string()]);
    let alphabet: Vec<&str> = alphabet_owned.iter().map(String::as_str).collect();
    let mut chain = vec![FormalWord::letter(&y(pk), 1)];
    for k in (1..=pk).rev() {
        // relation k-1: Y_{k-1} X = Y_k
        let step = FormalWord::letter(&y(k - 1), 1).then(&FormalWord::letter("X", 1));
        let next = chain.last().expect("nonempty").substitute(&y(k), &step);
        chain.push(next);
    }
    let lhs = FormalWord::letter(&y(0), 1).conjugated_by(&FormalWord::letter("t", p as i64));
    let ab_lhs = formal_abelianization(&lhs, &alphabet)?;
    let ab_rhs = formal_abelianization(chain.last().expect("nonempty"), &alphabet)?;
    let coeff = |m: &BTreeMap<String, i64>, s: &str| m.get(s).copied().unwrap_or(0);
    let bp_coefficient = (coeff(&ab_rhs, "X") - coeff(&ab_lhs, "X")).abs();
    Ok(TelescopeReport { genus: g, p, conjugated, telescoped_exact, power_in_level, chain, bp_coefficient })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exterior::ExteriorElement;

    #[test]
    fn trivial_and_corrupted() {
        let ctx = SurfaceContext::new(2).unwrap();
        let r = RelationInstance { name: "trivial".into(), lhs: vec![ctx.identity()], rhs: vec![ctx.identity()], context: ctx };
        let rep = verify_relation(&r).unwrap();
        assert!(rep.passed());
        assert_eq!(rep.johnson, Some(true));

        let mut bad = crossed_lantern_instance(2).unwrap();
        bad.lhs[0] = bad.lhs[0].inverse();
        let rep = verify_relation(&bad).unwrap();
        assert!(!rep.exact);
        assert!(rep.first_disagreement.is_some());
    }

    #[test]
    fn lantern_g3() {
        let l = lantern(3).unwrap();
        let rep = verify_relation(&l.instance).unwrap();
        assert!(rep.passed(), "{rep}");
        assert_eq!(rep.johnson, Some(true));
        let mut sum = ExteriorElement::zero(6, 3, 0);
        for bp in &l.bounding_pairs {
            assert!(torelli_check(&abelianize(bp)));
            sum = sum.add(&johnson_tau(bp).unwrap().value).unwrap();
        }
        assert!(sum.is_zero());
        assert!(lantern(2).is_err());
    }

    #[test]
    fn crossed_lantern_g2() {
        let cl = crossed_lantern(2).unwrap();
        for c in &cl.facts {
            assert!(c.passed, "{}", c.name);
        }
        assert!(verify_relation(&cl.instance).unwrap().passed());
    }

    #[test]
    fn relation_json_round_trip() {
        let r = crossed_lantern_instance(2).unwrap();
        let back = RelationInstance::from_json(&r.to_json()).unwrap();
        assert_eq!(back.lhs, r.lhs);
        assert_eq!(back.rhs, r.rhs);
    }

    #[test]
    fn formal_words() {
        let w = FormalWord::parse("x").unwrap().then(&FormalWord::letter("y", 1).conjugated_by(&FormalWord::letter("f", 1)));
        let w = w.then(&FormalWord::letter("x", -1));
        assert_eq!(formal_abelianization(&w, &["x", "y", "f"]).unwrap(), BTreeMap::from([("y".to_string(), 1)]));
        assert!(formal_abelianization(&w, &["x", "y"]).is_err());
        assert!(formal_abelianization(&FormalWord::empty(), &[]).unwrap().is_empty());
        assert!(formal_abelianization(&killsep_word(), &KILLSEP_ALPHABET).unwrap().is_empty());
    }

    #[test]
    fn telescope_small() {
        let r = telescope_check(2, 1).unwrap();
        assert_eq!(r.conjugated.len(), 1);
        assert_eq!(r.bp_coefficient, 1);
        assert!(r.passed());
        assert!(telescope_check(2, 4).is_err());
        assert!(matches!(telescope_check(2, 9), Err(Error::SizeGuard(_))));
    }
}
