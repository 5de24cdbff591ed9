//! Exterior powers, the Plücker embedding of oriented Grassmannians, calibrations and
//! comass estimates.

pub mod calibrations;
pub mod comass;
pub mod dk;
pub mod frame;
pub mod long;
pub mod multivector;

pub use calibrations::{kaehler_calibration, kaehler_power, special_lagrangian};
pub use comass::{comass, default_k, ComassEstimate, Functional, DEFAULT_MC_SAMPLES, DEFAULT_RESTARTS};
pub use dk::{d_k_rect, orbit_tensor_rank, orbit_tensor_rank_gram, TensorRank};
pub use frame::{pluecker, random_frame, sample_grassmann, Frame};
pub use long::{long_calibration, long_calibration_with, LongCalibrationReport};
pub use multivector::{AnyMultiVector, ExteriorTables, MultiVector};
