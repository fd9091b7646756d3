//! Random words, catalog mapping classes and Torelli elements.

use rand::Rng;

use crate::error::Result;
use crate::surface::{bounding_pair, catalog, separating_twist, standard_twist, MappingClass, SurfaceContext};
use crate::word::{Letter, Word};

pub fn random_word<R: Rng>(rank: usize, max_len: usize, rng: &mut R) -> Word {
    let len = rng.gen_range(0..=max_len);
    let raw: Vec<Letter> = (0..len)
        .map(|_| {
            let l = rng.gen_range(1..=rank as Letter);
            if rng.gen_bool(0.5) {
                l
            } else {
                -l
            }
        })
        .collect();
    Word::reduce(&raw, rank).expect("letters in range")
}

/// Products of catalog twists and their inverses.
pub struct CatalogSampler {
    pub ctx: SurfaceContext,
    twists: Vec<MappingClass>,
}

impl CatalogSampler {
    pub fn new(ctx: &SurfaceContext) -> Result<Self> {
        let mut twists = Vec::new();
        for c in catalog(ctx.genus()) {
            let t = standard_twist(ctx, c)?;
            twists.push(t.inverse());
            twists.push(t);
        }
        Ok(CatalogSampler { ctx: ctx.clone(), twists })
    }

    pub fn sample<R: Rng>(&self, len: usize, rng: &mut R) -> MappingClass {
        let mut out = self.ctx.identity();
        for _ in 0..len {
            let t = &self.twists[rng.gen_range(0..self.twists.len())];
            out = out.compose(t).expect("same context");
        }
        out
    }
}

/// Products of conjugates of bounding pair maps and separating twists.
pub struct TorelliSampler {
    pub catalog: CatalogSampler,
    pool: Vec<MappingClass>,
}

impl TorelliSampler {
    pub fn new(ctx: &SurfaceContext) -> Result<Self> {
        let mut pool = Vec::new();
        for h in 1..ctx.genus() {
            pool.push(bounding_pair(ctx, h)?);
            pool.push(separating_twist(ctx, h)?);
        }
        Ok(TorelliSampler { catalog: CatalogSampler::new(ctx)?, pool })
    }

    /// One conjugated generator `w B^{±1} w⁻¹`, `w` of length at most `conj_len`.
    pub fn generator<R: Rng>(&self, conj_len: usize, rng: &mut R) -> MappingClass {
        let b = &self.pool[rng.gen_range(0..self.pool.len())];
        let b = if rng.gen_bool(0.5) { b.clone() } else { b.inverse() };
        let w = self.catalog.sample(rng.gen_range(0..=conj_len), rng);
        w.conjugate(&b).expect("same context")
    }

    /// Product of up to `factors` conjugated generators.
    pub fn sample<R: Rng>(&self, factors: usize, conj_len: usize, rng: &mut R) -> MappingClass {
        let mut out = self.catalog.ctx.identity();
        for _ in 0..rng.gen_range(1..=factors.max(1)) {
            out = out.compose(&self.generator(conj_len, rng)).expect("same context");
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::homology::{abelianize, torelli_check};
    use crate::rng::rng;

    #[test]
    fn samples_have_expected_shape() {
        let mut r = rng(99);
        let w = random_word(6, 12, &mut r);
        assert!(w.len() <= 12);
        let ctx = SurfaceContext::new(3).unwrap();
        let ts = TorelliSampler::new(&ctx).unwrap();
        for _ in 0..5 {
            let f = ts.sample(2, 2, &mut r);
            assert!(torelli_check(&abelianize(&f)));
        }
    }
}
