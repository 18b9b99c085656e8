//! Motion stability toolkit for landmark trajectories.
//!
//! Quantifies motion jitter in tracked-point trajectories via the Motion
//! Stability Index (reciprocal regularized acceleration variance, averaged
//! over a region of points), removes it with fixed / globally learned /
//! adaptive weighted temporal smoothing, and ships the supporting tooling:
//! synthetic jitter generation, mask erosion augmentation, slice-through-time
//! visualization, and a rank-correlation harness for validating metrics
//! against scores.

pub mod error;
pub mod mask;
pub mod msi;
pub mod scalar;
pub mod slicevis;
pub mod smoothing;
pub mod trajectory;

pub use error::{Error, Result};
pub use mask::{apply_mask_out, dilate, erode, random_augment, transform_mask, AugmentSpec, BinaryMask, GrayImage};
pub use msi::{
    acceleration_variance, correlation_table, kinematics, msi, msi_report, pearson,
    velocity_variance, CorrelationTable, Kinematics, MsiOptions, MsiReport, PaddingMode,
    RegionStats, StatVector, DEFAULT_EPSILON,
};
pub use scalar::Scalar;
pub use slicevis::{slice_image, slice_image_band, slice_triptych, transitions_per_row, Frame, FrameSequence, TriptychStyle};
pub use smoothing::{
    fixed_weights, gen_synthetic, inject_jitter, load_smoother, save_smoother, smooth_apply,
    train_smoother, AdaptiveSmoother, FixedKernel, GlobalSmoother, JitterKind, Regime,
    SmoothingWeights, SyntheticDatasetSpec, TrainConfig, TrainedSmoother,
};
pub use trajectory::{
    load_trajectory, normalize_crop, save_trajectory, select_region, CropSpec, Format,
    LandmarkTrajectory, RegionMap, Space, IBUG_MOUTH_CORNERS,
};

/// `f64` specializations used by the CLI and the file formats.
pub type Trajectory64 = LandmarkTrajectory<f64>;
pub type Weights64 = SmoothingWeights<f64>;
pub type Smoother64 = TrainedSmoother<f64>;
