//! Second-moment forms of group orbits and the Löwner–John ellipsoids they determine.

pub mod ellipsoid;
pub mod families;
pub mod group;
pub mod moment;

pub use ellipsoid::{
    ellipsoid_eval, max_volume_ellipsoid_polar, min_volume_ellipsoid, orbit_ellipsoids, polarity_defect,
    AnyEllipsoids, Decompose, DecompositionReport, EllipsoidSpec, OrbitEllipsoids, Representation,
    DEFAULT_EIG_GAP_TOL,
};
pub use group::{CenterMode, CompactSampler, FiniteGroup, GroupElement, OrbitSpec};
pub use moment::{finite_orbit, orbit_second_moment, AnyMoment, SecondMoment};
