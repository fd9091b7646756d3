use mcg_core::congruence::{psi, sp_coordinates, sp_from_coordinates, Flavor, LevelSampler};
use mcg_core::homology::{abelianize, transvection};
use mcg_core::nilpotent::project_nilpotent;
use mcg_core::sample::{CatalogSampler, TorelliSampler};
use mcg_core::surface::{catalog, standard_twist};
use mcg_core::{johnson_mod_p, johnson_tau, ExteriorElement, Matrix, SurfaceContext, Word};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn word(rank: usize, max_len: usize) -> impl Strategy<Value = Word> {
    let r = rank as i32;
    prop::collection::vec((1..=r).prop_flat_map(|l| prop_oneof![Just(l), Just(-l)]), 0..=max_len)
        .prop_map(move |raw| Word::reduce(&raw, rank).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn word_times_inverse_is_trivial(w in word(6, 20)) {
        prop_assert!(w.multiply(&w.invert()).unwrap().is_empty());
        prop_assert_eq!(Word::reduce(w.letters(), 6).unwrap(), w);
    }

    #[test]
    fn abelianization_is_additive(u in word(4, 15), v in word(4, 15)) {
        let uv = u.multiply(&v).unwrap().abelianize();
        let sum: Vec<i64> = u.abelianize().iter().zip(v.abelianize()).map(|(a, b)| a + b).collect();
        prop_assert_eq!(uv, sum);
    }

    #[test]
    fn nilpotent_projection_is_multiplicative(u in word(6, 12), v in word(6, 12), m in prop_oneof![Just(0u64), Just(3), Just(5)]) {
        let lhs = project_nilpotent(&u.multiply(&v).unwrap(), m).unwrap();
        let rhs = project_nilpotent(&u, m).unwrap().mul(&project_nilpotent(&v, m).unwrap()).unwrap();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn exterior_wedge_of_vectors_anticommutes(a in prop::collection::vec(-5i64..=5, 5), b in prop::collection::vec(-5i64..=5, 5)) {
        let (x, y) = (ExteriorElement::from_vector(&a, 0), ExteriorElement::from_vector(&b, 0));
        prop_assert_eq!(x.wedge(&y).unwrap(), y.wedge(&x).unwrap().neg());
        prop_assert!(x.wedge(&x).unwrap().is_zero());
    }

    #[test]
    fn exterior_power_is_functorial(a in prop::collection::vec(-3i64..=3, 16), b in prop::collection::vec(-3i64..=3, 16), t in prop::collection::vec(-4i64..=4, 4)) {
        let m = Matrix::from_fn(4, 4, |i, j| a[4 * i + j]);
        let n = Matrix::from_fn(4, 4, |i, j| b[4 * i + j]);
        let e = ExteriorElement::from_vector(&t, 0).wedge(&ExteriorElement::from_vector(&[1, 0, 2, -1], 0)).unwrap();
        let once = e.apply_linear(&m.mul(&n)).unwrap();
        let twice = e.apply_linear(&n).unwrap().apply_linear(&m).unwrap();
        prop_assert_eq!(once, twice);
    }

    #[test]
    fn catalog_words_fix_boundary_and_are_symplectic(seed in any::<u64>(), g in 1usize..=3, len in 0usize..8) {
        let ctx = SurfaceContext::new(g).unwrap();
        let f = CatalogSampler::new(&ctx).unwrap().sample(len, &mut ChaCha8Rng::seed_from_u64(seed));
        prop_assert_eq!(&f.apply(ctx.boundary()).unwrap(), ctx.boundary());
        prop_assert!(abelianize(&f).is_symplectic());
    }

    #[test]
    fn abelianization_of_twist_products_multiplies(i in 0usize..7, j in 0usize..7) {
        let ctx = SurfaceContext::new(3).unwrap();
        let cat = catalog(3);
        let (a, b) = (standard_twist(&ctx, cat[i]).unwrap(), standard_twist(&ctx, cat[j]).unwrap());
        let prod = abelianize(&a.compose(&b).unwrap());
        prop_assert_eq!(prod, transvection(&cat[i].class(3)).mul(&transvection(&cat[j].class(3))));
    }

    #[test]
    fn johnson_tau_is_additive(seed in any::<u64>()) {
        let ctx = SurfaceContext::new(3).unwrap();
        let ts = TorelliSampler::new(&ctx).unwrap();
        let mut r = ChaCha8Rng::seed_from_u64(seed);
        let (f, g) = (ts.sample(2, 2, &mut r), ts.sample(2, 2, &mut r));
        let lhs = johnson_tau(&f.compose(&g).unwrap()).unwrap().value;
        let rhs = johnson_tau(&f).unwrap().value.add(&johnson_tau(&g).unwrap().value).unwrap();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn johnson_mod_p_reduces_tau(seed in any::<u64>(), p in prop_oneof![Just(3u64), Just(5), Just(7)]) {
        let ctx = SurfaceContext::new(3).unwrap();
        let f = TorelliSampler::new(&ctx).unwrap().sample(2, 2, &mut ChaCha8Rng::seed_from_u64(seed));
        let m = johnson_mod_p(&f, p).unwrap();
        prop_assert!(m.residual.is_zero());
        prop_assert_eq!(m.value.value, johnson_tau(&f).unwrap().value.reduce_mod(p));
    }

    #[test]
    fn psi_is_a_homomorphism(seed in any::<u64>(), sp in any::<bool>(), p in prop_oneof![Just(3u64), Just(5)]) {
        let (flavor, size) = if sp { (Flavor::Sp, 2) } else { (Flavor::Sl, 3) };
        let s = LevelSampler::new(flavor, size, p).unwrap();
        let mut r = ChaCha8Rng::seed_from_u64(seed);
        let (a, b) = (s.sample(&mut r, 3), s.sample(&mut r, 3));
        let lhs = psi(&a.mul(&b), p, flavor).unwrap();
        prop_assert_eq!(lhs, psi(&a, p, flavor).unwrap().add(&psi(&b, p, flavor).unwrap()).unwrap());
    }

    #[test]
    fn sp_coordinates_round_trip(v in prop::collection::vec(0i64..5, 10)) {
        let a = sp_from_coordinates(2, &v, 5);
        prop_assert_eq!(sp_coordinates(&a, 5), v);
    }
}
