//! Values checked once against hand computation or an independent
//! construction, then frozen.

use mcg_core::congruence::{
    lie_basis, sl_commutator_witness, sp_commutator_witnesses, sp_irreducibility, Flavor, LevelSampler,
};
use mcg_core::homology::mod_p_generation;
use mcg_core::johnson::calibration_sign;
use mcg_core::relations::{lantern_instance, verify_relation, RelationInstance};
use mcg_core::surface::{bounding_pair, separating_twist};
use mcg_core::{johnson_tau, ExteriorElement, SurfaceContext};

fn e3(rank: usize, terms: &[[usize; 3]]) -> ExteriorElement {
    terms.iter().fold(ExteriorElement::zero(rank, 3, 0), |acc, t| acc.add(&ExteriorElement::basis(rank, t, 0)).unwrap())
}

#[test]
fn boundary_word_genus_two() {
    let ctx = SurfaceContext::new(2).unwrap();
    assert_eq!(ctx.boundary().letters(), &[1, 2, -1, -2, 3, 4, -3, -4]);
}

#[test]
fn bounding_pair_tau_values() {
    // (a1 ∧ b1 + ⋯ + a_h ∧ b_h) ∧ a_{h+1}
    let g3 = SurfaceContext::new(3).unwrap();
    assert_eq!(johnson_tau(&bounding_pair(&g3, 1).unwrap()).unwrap().value, e3(6, &[[0, 1, 2]]));
    assert_eq!(johnson_tau(&bounding_pair(&g3, 2).unwrap()).unwrap().value, e3(6, &[[0, 1, 4], [2, 3, 4]]));
    let g4 = SurfaceContext::new(4).unwrap();
    assert_eq!(
        johnson_tau(&bounding_pair(&g4, 3).unwrap()).unwrap().value,
        e3(8, &[[0, 1, 6], [2, 3, 6], [4, 5, 6]])
    );
    assert!(johnson_tau(&separating_twist(&g4, 2).unwrap()).unwrap().is_zero());
}

#[test]
fn calibration_sign_is_positive() {
    for g in 2..=4 {
        assert_eq!(calibration_sign(g).unwrap(), 1);
    }
}

#[test]
fn lie_algebra_dimensions() {
    for (g, d) in [(1, 3), (2, 10), (3, 21)] {
        assert_eq!(lie_basis(Flavor::Sp, g, 3).len(), d);
        assert_eq!(LevelSampler::new(Flavor::Sp, g, 3).unwrap().matrix_size(), 2 * g);
    }
    for (n, d) in [(2, 3), (3, 8), (4, 15)] {
        assert_eq!(lie_basis(Flavor::Sl, n, 5).len(), d);
    }
}

#[test]
fn symplectic_group_orders() {
    for (g, p, order) in [(1, 2, 6), (1, 3, 24), (2, 2, 720)] {
        let rep = mod_p_generation(g, p).unwrap();
        assert_eq!(rep.group_order, order);
        assert!(rep.generates());
    }
    assert!(mod_p_generation(1, 5).is_err());
}

#[test]
fn irreducibility_reports() {
    let r = sp_irreducibility(1, 2).unwrap();
    assert!(!r.irreducible);
    assert_eq!(r.dimension, 3);
    assert_eq!(r.invariant.as_ref().map(Vec::len), Some(1));
    let r = sp_irreducibility(1, 3).unwrap();
    assert!(r.irreducible && r.invariant.is_none());
}

#[test]
fn commutator_certificates() {
    let ws = sp_commutator_witnesses(3, 3).unwrap();
    assert_eq!(ws.len(), 21);
    assert!(ws.iter().all(|(_, w)| w.verify(Flavor::Sp, 3).unwrap()));
    for (i, j) in [(1, 2), (3, 1), (2, 3)] {
        let w = sl_commutator_witness(3, i, j, 5).unwrap();
        assert_eq!(w.pairs.len(), 1);
        assert!(w.verify(Flavor::Sl, 5).unwrap());
    }
    assert!(sp_commutator_witnesses(2, 3).is_err());
}

#[test]
fn lantern_serializes_and_replays() {
    let l = lantern_instance(3).unwrap();
    let back = RelationInstance::from_json(&l.to_json()).unwrap();
    assert_eq!(back.to_json(), l.to_json());
    assert!(verify_relation(&back).unwrap().passed());
}
