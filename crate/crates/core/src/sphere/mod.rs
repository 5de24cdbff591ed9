//! Integration on the unit sphere with its rotation-invariant probability measure.

pub mod basis;
pub mod grid;
pub mod moments;
pub mod norm;
pub mod poly;

pub use basis::{dim_u, orthonormal_basis_U, PolyBasis};
pub use grid::{min_on_sphere, sup_norm, Extremum, SphereGrid};
pub use moments::{l2_inner, mc_monomial_moments, monomial_moment, sphere_mean, MomentTable};
pub use norm::{lp_norm_2k, NormEstimate, NormMethod};
pub use poly::{AnyPoly, HomPoly, PolyEvaluator};
