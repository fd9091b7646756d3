//! Johnson homomorphism via the class-2 nilpotent quotient.
//!
//! For `f` in Torelli, `J_f(s_i)` is the `∧²H` part of `s_i · f(s_i)⁻¹` in `Γ`.
//! `τ(f)` is the preimage of `J_f` under `ι`, with one global sign fixed on
//! the genus-one bounding pair.

use serde::{Deserialize, Serialize};
use std::collections::HashMap;
use std::sync::{Mutex, OnceLock};

use crate::error::{Error, Result};
use crate::exterior::{iota, iota_solve, iota_solver, ExteriorElement, HomMap};
use crate::homology::{abelianize, congruence_check, torelli_check};
use crate::nilpotent::{check_modulus, project_nilpotent};
use crate::surface::{bounding_pair_data, MappingClass, SurfaceContext};
use crate::word::Word;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct JohnsonTensor {
    pub value: ExteriorElement,
}

impl JohnsonTensor {
    pub fn is_zero(&self) -> bool {
        self.value.is_zero()
    }
}

impl std::fmt::Display for JohnsonTensor {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.value)
    }
}

/// `∧²` part of `w · f(w)⁻¹` in `Γ` or `Γ_p`.
pub fn johnson_recipe(f: &MappingClass, w: &Word, m: u64) -> Result<ExteriorElement> {
    let fw = f.apply(w)?;
    Ok(project_nilpotent(&w.multiply(&fw.invert())?, m)?.c)
}

fn hom_with_modulus(f: &MappingClass, m: u64) -> Result<HomMap> {
    let n = f.context().rank();
    let cols = (1..=n)
        .map(|i| johnson_recipe(f, &Word::generator(n, i), m))
        .collect::<Result<Vec<_>>>()?;
    Ok(HomMap { rank: n, modulus: m, cols })
}

pub fn johnson_hom(f: &MappingClass) -> Result<HomMap> {
    let m = abelianize(f);
    if !torelli_check(&m) {
        return Err(Error::Precondition(format!("not in Torelli: abelianization is {}", m.rows())));
    }
    hom_with_modulus(f, 0)
}

/// Checks `J_f(w) = J_f(ab(w))` for the given words.
pub fn johnson_linearity_holds(f: &MappingClass, j: &HomMap, words: &[Word]) -> Result<bool> {
    for w in words {
        let direct = johnson_recipe(f, w, j.modulus)?;
        if direct != j.eval(&w.abelianize())? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// `[x] ∧ (a_1∧b_1 + ⋯ + a_h∧b_h)` in the supplied cut basis.
pub fn bp_expected(
    g: usize,
    h: usize,
    pair_class: &[i64],
    cut_basis: &[(Vec<i64>, Vec<i64>)],
) -> Result<JohnsonTensor> {
    if h < 1 || h >= g {
        return Err(Error::OutOfRange(format!("h={h} for g={g}")));
    }
    let n = 2 * g;
    if pair_class.len() != n {
        return Err(Error::RankMismatch(pair_class.len(), n));
    }
    if cut_basis.len() != h {
        return Err(Error::Malformed(format!("cut basis has {} pairs, expected {h}", cut_basis.len())));
    }
    let mut omega = ExteriorElement::zero(n, 2, 0);
    for (a, b) in cut_basis {
        if a.len() != n || b.len() != n {
            return Err(Error::RankMismatch(a.len().max(b.len()), n));
        }
        omega = omega.add(&ExteriorElement::from_vector(a, 0).wedge(&ExteriorElement::from_vector(b, 0))?)?;
    }
    Ok(JohnsonTensor { value: ExteriorElement::from_vector(pair_class, 0).wedge(&omega)? })
}

fn raw_tau(f: &MappingClass) -> Result<ExteriorElement> {
    let j = johnson_hom(f)?;
    iota_solve(&j)?.ok_or_else(|| Error::Internal(format!("J of `{}` is outside the image of iota", f.provenance())))
}

/// The global sign relating the raw `ι`-preimage to the bounding pair formula.
pub fn calibration_sign(genus: usize) -> Result<i64> {
    static CACHE: OnceLock<Mutex<HashMap<usize, i64>>> = OnceLock::new();
    let cache = CACHE.get_or_init(Default::default);
    if let Some(&s) = cache.lock().expect("calibration cache poisoned").get(&genus) {
        return Ok(s);
    }
    // genus one has ∧³H = 0, any sign works
    let sign = if genus < 2 {
        1
    } else {
        let ctx = SurfaceContext::new(genus)?;
        let bp = bounding_pair_data(&ctx, 1)?;
        let raw = raw_tau(&bp.map)?;
        let want = bp_expected(genus, 1, &bp.pair_class, &bp.cut_basis)?.value;
        if raw == want {
            1
        } else if raw == want.neg() {
            -1
        } else {
            return Err(Error::Internal(format!("calibration failed: got {raw}, expected ±{want}")));
        }
    };
    cache.lock().expect("calibration cache poisoned").insert(genus, sign);
    Ok(sign)
}

pub fn johnson_tau(f: &MappingClass) -> Result<JohnsonTensor> {
    let raw = raw_tau(f)?;
    Ok(JohnsonTensor { value: raw.scale(calibration_sign(f.genus())?) })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct JohnsonModP {
    pub value: JohnsonTensor,
    /// `J_f - ι(L J_f)` mod p; zero iff `J_f` lies in the image of `ι`
    pub residual: HomMap,
}

/// `τ_p` on the level-`p` subgroup, `p` an odd prime.
pub fn johnson_mod_p(f: &MappingClass, p: u64) -> Result<JohnsonModP> {
    if p == 0 {
        return Err(Error::UnsupportedModulus(p));
    }
    check_modulus(p)?;
    let m = abelianize(f);
    if !congruence_check(&m, p)? {
        return Err(Error::Precondition(format!("not in level {p}: abelianization is {}", m.rows())));
    }
    let j = hom_with_modulus(f, p)?;
    let n = j.rank;
    let solver = iota_solver(n);
    let l = solver
        .left_inverse
        .as_ref()
        .ok_or_else(|| Error::Internal(format!("iota has no integral left inverse in rank {n}")))?;
    let dense = j.to_dense();
    let coords: Vec<i64> = (0..l.nrows())
        .map(|r| {
            let s: i128 = (0..l.ncols()).map(|c| l[(r, c)] as i128 * dense[c] as i128).sum();
            s.rem_euclid(p as i128) as i64
        })
        .collect();
    let t = ExteriorElement::from_dense(n, 3, &coords, p);
    let residual = j.sub(&iota(&t)?)?;
    let sign = calibration_sign(f.genus())?;
    Ok(JohnsonModP { value: JohnsonTensor { value: t.scale(sign) }, residual })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::surface::{boundary_twist, separating_twist, standard_twist, Curve};

    #[test]
    fn identity_and_separating() {
        let ctx = SurfaceContext::new(3).unwrap();
        assert!(johnson_hom(&ctx.identity()).unwrap().is_zero());
        for h in 1..3 {
            let t = separating_twist(&ctx, h).unwrap();
            assert!(johnson_hom(&t).unwrap().is_zero());
            assert!(johnson_tau(&t).unwrap().is_zero());
        }
        assert!(johnson_tau(&boundary_twist(&ctx)).unwrap().is_zero());
    }

    #[test]
    fn non_torelli_rejected() {
        let ctx = SurfaceContext::new(2).unwrap();
        let t = standard_twist(&ctx, Curve::A(1)).unwrap();
        assert!(matches!(johnson_hom(&t), Err(Error::Precondition(_))));
        assert!(matches!(johnson_mod_p(&t, 3), Err(Error::Precondition(_))));
        assert!(matches!(johnson_mod_p(&t.pow(3), 2), Err(Error::UnsupportedModulus(2))));
    }

    #[test]
    fn bounding_pairs_match_formula() {
        for g in 2..=4 {
            let ctx = SurfaceContext::new(g).unwrap();
            for h in 1..g {
                let bp = bounding_pair_data(&ctx, h).unwrap();
                let want = bp_expected(g, h, &bp.pair_class, &bp.cut_basis).unwrap();
                assert_eq!(johnson_tau(&bp.map).unwrap(), want, "g={g} h={h}");
            }
        }
    }

    #[test]
    fn bp_expected_example() {
        let e = |i: usize| (0..6).map(|k| i64::from(k == i)).collect::<Vec<_>>();
        let v = bp_expected(3, 1, &e(4), &[(e(0), e(1))]).unwrap();
        assert_eq!(v.value, ExteriorElement::basis(6, &[4, 0, 1], 0));
        // another symplectic basis of the same span: (a1 + b1, b1)
        let a: Vec<i64> = e(0).iter().zip(e(1)).map(|(x, y)| x + y).collect();
        assert_eq!(bp_expected(3, 1, &e(4), &[(a, e(1))]).unwrap(), v);
        assert!(bp_expected(3, 3, &e(4), &[]).is_err());
        assert!(bp_expected(3, 1, &e(4)[..4], &[(e(0), e(1))]).is_err());
    }

    #[test]
    fn mod_p_agrees_on_torelli() {
        let ctx = SurfaceContext::new(3).unwrap();
        let bp = bounding_pair_data(&ctx, 2).unwrap().map;
        let t = johnson_tau(&bp).unwrap();
        for p in [3, 5] {
            let r = johnson_mod_p(&bp, p).unwrap();
            assert!(r.residual.is_zero());
            assert_eq!(r.value.value, t.value.reduce_mod(p));
        }
    }

    #[test]
    fn mod_p_on_level_p_twist() {
        let ctx = SurfaceContext::new(2).unwrap();
        let t = standard_twist(&ctx, Curve::A(1)).unwrap().pow(3);
        let r = johnson_mod_p(&t, 3).unwrap();
        assert_eq!(r.value.value.degree(), 3);
        assert!(johnson_mod_p(&ctx.identity(), 3).unwrap().value.is_zero());
    }
}
