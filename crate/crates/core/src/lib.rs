//! Exact computations in the mapping class group `Mod(g,1)`, its Torelli
//! subgroup and its level-`p` congruence subgroups.
//!
//! Mapping classes are automorphisms of the free group `F_{2g}` fixing the
//! boundary word `δ = [a_1,b_1]⋯[a_g,b_g]`.

pub mod acceptance;
pub mod congruence;
pub mod error;
pub mod exterior;
pub mod homology;
pub mod johnson;
pub mod linalg;
pub mod matrix;
pub mod nilpotent;
pub mod relations;
pub mod rng;
pub mod sample;
pub mod surface;
pub mod word;

pub use error::{Error, Result};
pub use exterior::{ExteriorElement, HomMap};
pub use homology::{abelianize, BasisOrder, SymplecticMatrix};
pub use johnson::{johnson_hom, johnson_mod_p, johnson_tau, JohnsonTensor};
pub use matrix::Matrix;
pub use nilpotent::{project_nilpotent, NilpotentElement};
pub use surface::{Curve, MappingClass, SurfaceContext};
pub use word::{Automorphism, Endomorphism, Word};
