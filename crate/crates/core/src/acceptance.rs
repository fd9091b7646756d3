//! The fifteen acceptance checks, shared by the `acceptance` test target and
//! `mcg selftest`.

use num_bigint::BigInt;
use rand::Rng;
use std::collections::HashSet;
use std::sync::OnceLock;
use std::time::{Duration, Instant};

use crate::congruence::{
    charney_membership, charney_sample, commutator, congruent_to_identity, divide_tail, elementary, lie_basis,
    lift_generator, psi, scale_tail, sp_adjoint_generators, sp_irreducibility, CharneyGroup, Flavor, IntMatrix,
    LevelSampler,
};
use crate::error::Result;
use crate::exterior::{pushforward_fundamental, ExteriorElement};
use crate::homology::{abelianize, mod_p_generation, torelli_check, transvection};
use crate::johnson::{bp_expected, calibration_sign, johnson_mod_p, johnson_tau};
use crate::linalg::{rank_mod_p, smith, EchelonFp};
use crate::matrix::Matrix;
use crate::nilpotent::project_nilpotent;
use crate::relations::{
    crossed_lantern, formal_abelianization, killsep_word, lantern, telescope_check, verify_relation,
    KILLSEP_ALPHABET,
};
use crate::rng::rng;
use crate::sample::{random_word, CatalogSampler, TorelliSampler};
use crate::surface::{
    bounding_pair, bounding_pair_data, catalog, separating_twist, standard_twist, MappingClass, SurfaceContext,
};
use crate::word::Word;

type Outcome = Result<(bool, String)>;

pub struct Criterion {
    pub id: u8,
    pub name: &'static str,
    pub limit: Option<Duration>,
    run: fn() -> Outcome,
}

#[derive(Clone, Debug)]
pub struct Verdict {
    pub id: u8,
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
    pub elapsed: Duration,
}

impl Criterion {
    pub fn run(&self) -> Verdict {
        let start = Instant::now();
        let outcome = (self.run)();
        let elapsed = start.elapsed();
        let (mut passed, mut detail) = outcome.unwrap_or_else(|e| (false, format!("error: {e}")));
        if let Some(limit) = self.limit {
            if elapsed > limit {
                passed = false;
                detail = format!("{detail}; took {elapsed:?}, limit {limit:?}");
            }
        }
        Verdict { id: self.id, name: self.name, passed, detail, elapsed }
    }
}

pub fn criteria() -> Vec<Criterion> {
    let c = |id, name, limit: Option<u64>, run| Criterion { id, name, limit: limit.map(Duration::from_secs), run };
    vec![
        c(1, "catalog soundness", None, catalog_soundness),
        c(2, "lantern relation", Some(10), lantern_relation),
        c(3, "crossed lantern", None, crossed_lantern_check),
        c(4, "telescoping", None, telescoping),
        c(5, "two-lantern 2-torsion", None, killsep),
        c(6, "johnson homomorphism", None, johnson),
        c(7, "tau surjectivity witness", Some(60), tau_surjectivity),
        c(8, "mod-p johnson", None, johnson_mod_p_check),
        c(9, "psi maps", None, psi_maps),
        c(10, "elementary identities", None, elementary_identities),
        c(11, "irreducibility", Some(60), irreducibility),
        c(12, "symplectic surjectivity mod p", None, symplectic_surjectivity),
        c(13, "pushforward theorem", None, pushforward),
        c(14, "charney subgroups", None, charney),
        c(15, "nilpotent quotient", None, nilpotent),
    ]
}

pub fn run_all() -> Vec<Verdict> {
    criteria().iter().map(Criterion::run).collect()
}

/// Collects failures; `ok` stays true only if every check passes.
struct Tally {
    ok: bool,
    notes: Vec<String>,
}

impl Tally {
    fn new() -> Self {
        Tally { ok: true, notes: Vec::new() }
    }

    fn check(&mut self, cond: bool, what: impl FnOnce() -> String) {
        if !cond {
            self.ok = false;
            if self.notes.len() < 5 {
                self.notes.push(what());
            }
        }
    }

    fn finish(self, summary: String) -> Outcome {
        if self.ok {
            Ok((true, summary))
        } else {
            Ok((false, format!("{summary}; failures: {}", self.notes.join("; "))))
        }
    }
}

fn catalog_soundness() -> Outcome {
    let mut t = Tally::new();
    let mut count = 0;
    for g in 1..=4 {
        let ctx = SurfaceContext::new(g)?;
        let curves = catalog(g);
        let twists: Vec<MappingClass> = curves.iter().map(|&c| standard_twist(&ctx, c)).collect::<Result<_>>()?;
        for (c, tw) in curves.iter().zip(&twists) {
            count += 1;
            t.check(tw.apply(ctx.boundary())? == *ctx.boundary(), || format!("T{c} moves the boundary word"));
            let m = abelianize(tw);
            t.check(m == transvection(&c.class(g)), || format!("T{c} is not the transvection"));
            t.check(m.is_symplectic(), || format!("T{c} is not symplectic"));
        }
        for i in 0..curves.len() {
            for j in i + 1..curves.len() {
                if !curves[i].meets(&curves[j]) {
                    t.check(twists[i].commutes_with(&twists[j]), || {
                        format!("T{} and T{} do not commute", curves[i], curves[j])
                    });
                } else {
                    t.check(twists[i].braids_with(&twists[j]), || {
                        format!("T{} and T{} do not braid", curves[i], curves[j])
                    });
                }
            }
        }
    }
    t.finish(format!("{count} catalog twists, g=1..4"))
}

fn lantern_relation() -> Outcome {
    let l = lantern(3)?;
    let rep = verify_relation(&l.instance)?;
    let mut t = Tally::new();
    t.check(rep.exact, || rep.to_string());
    t.check(torelli_check(&abelianize(&l.instance.lhs_product()?)), || "left side not Torelli".into());
    t.check(torelli_check(&abelianize(&l.instance.rhs_product()?)), || "right side not Torelli".into());
    let mut sum = ExteriorElement::zero(6, 3, 0);
    for bp in &l.bounding_pairs {
        t.check(torelli_check(&abelianize(bp)), || format!("`{}` is not Torelli", bp.provenance()));
        sum = sum.add(&johnson_tau(bp)?.value)?;
    }
    t.check(sum.is_zero(), || format!("tau values sum to {sum}"));
    t.check(johnson_tau(&l.instance.rhs_product()?)?.is_zero(), || "tau of the separating twist".into());
    t.finish(rep.to_string())
}

fn crossed_lantern_check() -> Outcome {
    let mut t = Tally::new();
    for g in [2, 3] {
        let cl = crossed_lantern(g)?;
        let rep = verify_relation(&cl.instance)?;
        t.check(rep.passed(), || format!("g={g}: {rep}"));
        for f in &cl.facts {
            t.check(f.passed, || format!("g={g}: {}", f.name));
        }
    }
    t.finish("g=2,3: relation and key facts".into())
}

fn telescoping() -> Outcome {
    let mut t = Tally::new();
    let mut parts = Vec::new();
    for p in [3, 5] {
        let r = telescope_check(3, p)?;
        t.check(r.passed(), || format!("p={p}: telescoping failed"));
        parts.push(format!("p={p}: {} conjugates, coefficient {}", r.conjugated.len(), r.bp_coefficient));
    }
    t.finish(parts.join(", "))
}

fn killsep() -> Outcome {
    let ab = formal_abelianization(&killsep_word(), &KILLSEP_ALPHABET)?;
    Ok((ab.is_empty(), format!("abelianization {ab:?}")))
}

fn johnson() -> Outcome {
    let ctx = SurfaceContext::new(3)?;
    let mut t = Tally::new();
    for h in 1..3 {
        let s = separating_twist(&ctx, h)?;
        t.check(johnson_tau(&s)?.is_zero(), || format!("tau(T_d{h}) != 0"));
        let bp = bounding_pair_data(&ctx, h)?;
        let want = bp_expected(3, h, &bp.pair_class, &bp.cut_basis)?;
        t.check(johnson_tau(&bp.map)? == want, || format!("bounding pair h={h}"));
    }
    let ts = TorelliSampler::new(&ctx)?;
    let mut r = rng(6);
    for _ in 0..100 {
        let (f, g) = (ts.sample(2, 2, &mut r), ts.sample(2, 2, &mut r));
        let lhs = johnson_tau(&f.compose(&g)?)?.value;
        let rhs = johnson_tau(&f)?.value.add(&johnson_tau(&g)?.value)?;
        t.check(lhs == rhs, || format!("additivity fails for `{}`, `{}`", f.provenance(), g.provenance()));
    }
    let cs = CatalogSampler::new(&ctx)?;
    for _ in 0..50 {
        let f = ts.sample(2, 2, &mut r);
        let len = r.gen_range(1..=3);
        let w = cs.sample(len, &mut r);
        let lhs = johnson_tau(&w.conjugate(&f)?)?.value;
        let rhs = johnson_tau(&f)?.value.apply_linear(abelianize(&w).rows())?;
        t.check(lhs == rhs, || format!("equivariance fails for w=`{}`", w.provenance()));
    }
    t.finish(format!("calibrated sign {}; 100 additivity and 50 equivariance samples", calibration_sign(3)?))
}

fn unimodular(vecs: &[Vec<i64>]) -> (usize, bool) {
    let m: IntMatrix = Matrix::from_rows(vecs.iter().map(|v| v.iter().map(|&x| BigInt::from(x)).collect()).collect())
        .expect("rectangular");
    let s = smith(&m, false);
    (s.rank(), s.all_ones())
}

/// τ-values of conjugates of the two bounding pairs, found breadth first
/// over conjugation by catalog twists. Stops once the values span a
/// unimodular lattice of full rank.
fn bp_family_vectors() -> Result<Vec<Vec<i64>>> {
    static FAMILY: OnceLock<Vec<Vec<i64>>> = OnceLock::new();
    if let Some(v) = FAMILY.get() {
        return Ok(v.clone());
    }
    let ctx = SurfaceContext::new(3)?;
    let mut twists = Vec::new();
    for c in catalog(3) {
        let tw = standard_twist(&ctx, c)?;
        twists.push(tw.inverse());
        twists.push(tw);
    }
    const P: u64 = 1_000_003;
    let mut ech = EchelonFp::new(P, 20);
    let mut seen = HashSet::new();
    let mut out: Vec<Vec<i64>> = Vec::new();
    let mut frontier = Vec::new();
    let mut candidates = vec![bounding_pair(&ctx, 1)?, bounding_pair(&ctx, 2)?];
    for _depth in 0..8 {
        for h in candidates {
            let v = johnson_tau(&h)?.value.to_dense();
            if !seen.insert(v.clone()) {
                continue;
            }
            let red: Vec<u64> = v.iter().map(|&x| x.rem_euclid(P as i64) as u64).collect();
            if ech.insert(&red) || ech.dim() == 20 {
                out.push(v);
                if ech.dim() == 20 && unimodular(&out) == (20, true) {
                    return Ok(FAMILY.get_or_init(|| out).clone());
                }
            }
            frontier.push(h);
        }
        candidates = Vec::new();
        for f in frontier.drain(..) {
            for t in &twists {
                candidates.push(t.conjugate(&f)?);
            }
        }
    }
    Ok(out)
}

fn tau_surjectivity() -> Outcome {
    let vecs = bp_family_vectors()?;
    let (rank, ones) = unimodular(&vecs);
    Ok((rank == 20 && ones, format!("{} tau values, rank {rank}, invariant factors all one: {ones}", vecs.len())))
}

fn johnson_mod_p_check() -> Outcome {
    let ctx = SurfaceContext::new(3)?;
    let ts = TorelliSampler::new(&ctx)?;
    let mut r = rng(8);
    let mut t = Tally::new();
    for _ in 0..100 {
        let f = ts.sample(2, 2, &mut r);
        let tau = johnson_tau(&f)?.value;
        for p in [3, 5] {
            let m = johnson_mod_p(&f, p)?;
            t.check(m.residual.is_zero() && m.value.value == tau.reduce_mod(p), || {
                format!("p={p}: diagram fails for `{}`", f.provenance())
            });
        }
    }
    let vecs = bp_family_vectors()?;
    let mut ranks = Vec::new();
    for p in [3u64, 5] {
        let red: Vec<Vec<u64>> =
            vecs.iter().map(|v| v.iter().map(|&x| x.rem_euclid(p as i64) as u64).collect()).collect();
        let rank = rank_mod_p(&red, p);
        t.check(rank == 20, || format!("p={p}: span has rank {rank}"));
        ranks.push(rank);
        for _ in 0..200 {
            let w = random_word(6, 12, &mut r);
            let x = project_nilpotent(&w.pow(p as i64), p)?;
            t.check(x.is_identity(), || format!("p={p}: w^p nontrivial for {w}"));
        }
    }
    t.finish(format!("100 Torelli samples at p=3,5; span ranks {ranks:?}; 200 exponent samples each"))
}

fn psi_maps() -> Outcome {
    let mut t = Tally::new();
    let mut r = rng(9);
    let mut kernel_hits = 0;
    for (flavor, size) in [(Flavor::Sp, 1), (Flavor::Sp, 2), (Flavor::Sl, 3), (Flavor::Sl, 4)] {
        for p in [3u64, 5] {
            let tag = format!("{flavor} size {size} p={p}");
            for x in lie_basis(flavor, size, p) {
                let m = lift_generator(&x, p)?;
                t.check(psi(&m, p, flavor)? == x, || format!("{tag}: lift of {x:?}"));
            }
            let sampler = LevelSampler::new(flavor, size, p)?;
            for _ in 0..200 {
                let (la, lb) = (r.gen_range(1..=4), r.gen_range(1..=4));
                let a = sampler.sample(&mut r, la);
                let b = sampler.sample(&mut r, lb);
                let ab = a.mul(&b);
                let (pa, pb, pab) = (psi(&a, p, flavor)?, psi(&b, p, flavor)?, psi(&ab, p, flavor)?);
                t.check(pab == pa.add(&pb)?, || format!("{tag}: psi not additive"));
                for (m, v) in [(&a, &pa), (&ab, &pab)] {
                    let deep = congruent_to_identity(m, p * p);
                    kernel_hits += usize::from(deep);
                    t.check(v.is_zero() == deep, || format!("{tag}: kernel mismatch"));
                }
                t.check(congruent_to_identity(&commutator(&a, &b)?, p * p), || format!("{tag}: commutator level"));
            }
        }
    }
    t.finish(format!("8 configurations, 200 pairs each, {kernel_hits} samples in level p^2"))
}

fn elementary_identities() -> Outcome {
    let mut t = Tally::new();
    let mut count = 0;
    for n in 3..=5 {
        for i in 2..=n {
            for j in 2..=n {
                if i != j {
                    count += 1;
                    let c = commutator(&elementary(n, i, 1)?, &elementary(n, 1, j)?)?;
                    t.check(c == elementary(n, i, j)?, || format!("n={n}: [e{i}1, e1{j}]"));
                }
            }
        }
    }
    t.finish(format!("{count} identities, n=3..5"))
}

fn irreducibility() -> Outcome {
    let mut t = Tally::new();
    let mut parts = Vec::new();
    for (g, p, want) in [(1, 3, true), (1, 5, true), (2, 3, true), (1, 2, false), (2, 2, false)] {
        let rep = sp_irreducibility(g, p)?;
        t.check(rep.irreducible == want, || format!("g={g} p={p}"));
        if let Some(inv) = &rep.invariant {
            // independent check that the exhibited subspace is invariant and proper
            let gens = sp_adjoint_generators(g, p);
            let mut ech = EchelonFp::new(p, rep.dimension);
            let coords: Vec<Vec<i64>> =
                inv.iter().map(|x| crate::congruence::sp_coordinates(&x.entries, p)).collect();
            for v in &coords {
                ech.insert(&v.iter().map(|&x| x as u64).collect::<Vec<_>>());
            }
            let stable = coords.iter().all(|v| {
                gens.iter().all(|m| {
                    ech.contains(&m.mul_vec(v).iter().map(|&x| x.rem_euclid(p as i64) as u64).collect::<Vec<_>>())
                })
            });
            t.check(stable && !inv.is_empty() && inv.len() < rep.dimension, || {
                format!("g={g} p={p}: exhibited subspace is not a proper invariant subspace")
            });
            parts.push(format!("({g},{p}) reducible, invariant dim {}", inv.len()));
        } else {
            parts.push(format!("({g},{p}) irreducible"));
        }
    }
    t.finish(parts.join(", "))
}

fn symplectic_surjectivity() -> Outcome {
    let mut t = Tally::new();
    let mut parts = Vec::new();
    for (g, p, order) in [(1, 2, 6), (1, 3, 24), (2, 2, 720)] {
        let rep = mod_p_generation(g, p)?;
        t.check(rep.generates() && rep.group_order == order, || format!("{rep:?}"));
        parts.push(format!("Sp_{}(Z/{p}): {}/{}", 2 * g, rep.generated_order, rep.group_order));
    }
    t.finish(parts.join(", "))
}

fn pushforward() -> Outcome {
    let mut t = Tally::new();
    let mut r = rng(13);
    for g in 1..=3 {
        let ctx = SurfaceContext::new(g)?;
        let cs = CatalogSampler::new(&ctx)?;
        for _ in 0..50 {
            let n = r.gen_range(1..=6);
            let phi: Matrix<i64> = Matrix::from_fn(n, 2 * g, |_, _| r.gen_range(-3..=3));
            let len = r.gen_range(1..=6);
            let w = cs.sample(len, &mut r);
            let m = abelianize(&w);
            let cols = |a: &Matrix<i64>| -> Vec<Vec<i64>> { (0..a.ncols()).map(|j| a.column(j)).collect() };
            let before = pushforward_fundamental(&cols(&phi), g)?;
            let after = pushforward_fundamental(&cols(&phi.mul(m.rows())), g)?;
            t.check(before == after, || format!("g={g}: not invariant under `{}`", w.provenance()));
        }
        let n = 4;
        let zero = pushforward_fundamental(&vec![vec![0; n]; 2 * g], g)?;
        t.check(zero.is_zero(), || "zero map".into());
        let v: Vec<i64> = vec![1, -2, 0, 3];
        let rank_one: Vec<Vec<i64>> = (0..2 * g).map(|k| v.iter().map(|x| x * (k as i64 + 1)).collect()).collect();
        t.check(pushforward_fundamental(&rank_one, g)?.is_zero(), || "rank one map".into());
    }
    let (a, b) = (vec![1, 2, 0], vec![0, 1, 5]);
    let single = pushforward_fundamental(&[a.clone(), b.clone()], 1)?;
    let expected = ExteriorElement::from_vector(&a, 0).wedge(&ExteriorElement::from_vector(&b, 0))?;
    t.check(single == expected, || format!("g=1: {single} vs {expected}"));
    t.finish("50 samples for each g=1..3, degenerate and g=1 cases".into())
}

fn charney() -> Outcome {
    let mut t = Tally::new();
    let mut r = rng(14);
    let p = 3;
    for n in [3, 4] {
        for which in [CharneyGroup::G, CharneyGroup::Ghat] {
            for _ in 0..100 {
                let m = charney_sample(which, n, p, &mut r);
                t.check(charney_membership(&m, which, n, p)?, || format!("n={n}: sample not in {which:?}"));
                for j in 2..=n {
                    let e = elementary(n, 1, j)?;
                    let c = commutator(&e, &m)?.mul(&m);
                    t.check(charney_membership(&c, which, n, p)?, || format!("n={n}: e1{j} conjugate leaves {which:?}"));
                }
            }
        }
        for _ in 0..100 {
            let k = charney_sample(CharneyGroup::K, n, p, &mut r);
            let down = divide_tail(&k, p as i64);
            t.check(down.as_ref().is_some_and(|d| charney_membership(d, CharneyGroup::Khat, n, p).unwrap_or(false)), || {
                format!("n={n}: K member is not p times a Khat member")
            });
            let kh = charney_sample(CharneyGroup::Khat, n, p, &mut r);
            t.check(charney_membership(&scale_tail(&kh, p as i64), CharneyGroup::K, n, p)?, || {
                format!("n={n}: p times a Khat member is not in K")
            });
        }
    }
    t.finish("n=3,4, p=3: 100 samples per subgroup".into())
}

fn nilpotent() -> Outcome {
    let mut t = Tally::new();
    let mut r = rng(15);
    for k in 0..200 {
        let rank = 2 * (1 + k % 3);
        let (u, v) = (random_word(rank, 12, &mut r), random_word(rank, 12, &mut r));
        let x = project_nilpotent(&Word::commutator(&u, &v)?, 0)?;
        let want = ExteriorElement::from_vector(&u.abelianize(), 0).wedge(&ExteriorElement::from_vector(&v.abelianize(), 0))?;
        t.check(x.a.iter().all(|&c| c == 0) && x.c == want, || format!("[{u}, {v}]"));
    }
    t.finish("200 commutator pairs, g=1..3".into())
}
