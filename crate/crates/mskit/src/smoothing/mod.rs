//! Weighted temporal smoothing of trajectories under three weight regimes:
//! handcrafted fixed kernels, one globally learned kernel, and a per-frame
//! adaptive kernel predicted by a small temporal conv net.

mod features;
mod model_file;
mod network;
mod synth;
mod train;

pub use features::{motion_features, FeatureMatrix, FEATURE_CHANNELS};
pub use model_file::{load_smoother, save_smoother, ModelHeader, MODEL_MAGIC};
pub use network::{AdaptiveSmoother, BnMode, ForwardCache, SmootherGrads, HIDDEN_CHANNELS, KERNEL};
pub use synth::{
    gen_synthetic, inject_jitter, FamilyMix, JitterKind, JitterMix, SyntheticDatasetSpec,
    SyntheticPair,
};
pub use train::{
    adaptive_loss, adaptive_loss_and_grads, evaluate_fixed_mse, evaluate_smoother_mse,
    train_adaptive_on_pairs, train_global_on_pairs, train_smoother, Regime, TrainConfig,
    TrainOutcome, TrainedSmoother,
};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::trajectory::LandmarkTrajectory;

/// Row tolerance for the convex-combination check.
const ROW_SUM_TOLERANCE: f64 = 1e-9;

/// Per-frame smoothing weights: a `frames x width` matrix, one row of `width`
/// (odd) neighbor weights per frame.
#[derive(Debug, Clone, PartialEq)]
pub struct SmoothingWeights<T> {
    frames: usize,
    width: usize,
    /// Row-major `[frame][offset]`.
    data: Vec<T>,
    normalized: bool,
}

impl<T: Scalar> SmoothingWeights<T> {
    pub fn new(frames: usize, width: usize, data: Vec<T>, normalized: bool) -> Result<Self> {
        check_width(width)?;
        if frames == 0 {
            return Err(Error::InvalidParams("weights need frames >= 1".into()));
        }
        if data.len() != frames * width {
            return Err(Error::InvalidParams(format!(
                "weight count {} does not match {frames} frames x {width}",
                data.len()
            )));
        }
        for (i, w) in data.iter().enumerate() {
            if !w.is_finite() || *w < T::zero() {
                return Err(Error::InvalidParams(format!(
                    "weight at row {} offset {} must be finite and >= 0",
                    i / width,
                    i % width
                )));
            }
        }
        if normalized {
            for t in 0..frames {
                let sum: f64 =
                    data[t * width..(t + 1) * width].iter().map(|w| w.as_f64()).sum();
                if (sum - 1.0).abs() > ROW_SUM_TOLERANCE {
                    return Err(Error::InvalidParams(format!(
                        "normalized weight row {t} sums to {sum}, expected 1"
                    )));
                }
            }
        }
        Ok(Self { frames, width, data, normalized })
    }

    pub fn frames(&self) -> usize {
        self.frames
    }

    /// Smoothing width K (odd).
    pub fn width(&self) -> usize {
        self.width
    }

    pub fn normalized(&self) -> bool {
        self.normalized
    }

    #[inline]
    pub fn get(&self, frame: usize, offset: usize) -> T {
        self.data[frame * self.width + offset]
    }

    pub fn row(&self, frame: usize) -> &[T] {
        &self.data[frame * self.width..(frame + 1) * self.width]
    }
}

fn check_width(width: usize) -> Result<()> {
    if width == 0 || width % 2 == 0 {
        return Err(Error::InvalidParams(format!("K must be odd and >= 1, got {width}")));
    }
    Ok(())
}

/// Applies per-frame weighted smoothing to every point and axis.
///
/// Neighbors outside the sequence are edge-replicated. Normalized weights are
/// applied in the anchored form `s_t + sum_k w_k (s_{t+k} - s_t)`, which is
/// algebraically the weighted sum when the row sums to 1 but keeps constant
/// signals bit-for-bit unchanged.
pub fn smooth_apply<T: Scalar>(
    traj: &LandmarkTrajectory<T>,
    weights: &SmoothingWeights<T>,
) -> Result<LandmarkTrajectory<T>> {
    let frames = traj.frames();
    if weights.frames() != frames {
        return Err(Error::InvalidParams(format!(
            "weights cover {} frames, trajectory has {frames}",
            weights.frames()
        )));
    }
    if weights.width() > 2 * frames - 1 {
        return Err(Error::InvalidParams(format!(
            "smoothing width {} exceeds 2T-1 = {}",
            weights.width(),
            2 * frames - 1
        )));
    }
    let width = weights.width();
    let half = (width - 1) as isize / 2;
    traj.map_coords(traj.space(), |t, n, base| {
        let mut acc = if weights.normalized { base } else { [T::zero(), T::zero()] };
        for j in 0..width {
            let idx = (t as isize + j as isize - half).clamp(0, frames as isize - 1) as usize;
            let w = weights.get(t, j);
            let p = traj.point(idx, n);
            if weights.normalized {
                acc[0] += w * (p[0] - base[0]);
                acc[1] += w * (p[1] - base[1]);
            } else {
                acc[0] += w * p[0];
                acc[1] += w * p[1];
            }
        }
        acc
    })
}

/// Handcrafted fixed kernels.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FixedKernel {
    Uniform,
    /// Gaussian with standard deviation `sigma` in frame offsets; values
    /// below 1e-3 are clamped to keep the kernel well defined.
    Gaussian { sigma: f64 },
}

/// Minimum gaussian width; below this the kernel degenerates to a delta.
pub const MIN_GAUSSIAN_SIGMA: f64 = 1e-3;

/// Builds a fixed (frame-independent) kernel broadcast over `frames` rows.
pub fn fixed_weights<T: Scalar>(
    kind: FixedKernel,
    width: usize,
    frames: usize,
) -> Result<SmoothingWeights<T>> {
    check_width(width)?;
    let row: Vec<T> = match kind {
        FixedKernel::Uniform => {
            let w = T::one() / T::from_usize(width).unwrap();
            vec![w; width]
        }
        FixedKernel::Gaussian { sigma } => {
            if !(sigma > 0.0) {
                return Err(Error::InvalidParams(format!("gaussian sigma must be > 0, got {sigma}")));
            }
            let s = sigma.max(MIN_GAUSSIAN_SIGMA);
            let half = (width as isize - 1) / 2;
            let raw: Vec<T> = (-half..=half)
                .map(|k| T::of((-((k * k) as f64) / (2.0 * s * s)).exp()))
                .collect();
            let sum = raw.iter().fold(T::zero(), |a, &b| a + b);
            raw.into_iter().map(|w| w / sum).collect()
        }
    };
    let mut data = Vec::with_capacity(frames * width);
    for _ in 0..frames {
        data.extend_from_slice(&row);
    }
    SmoothingWeights::new(frames, width, data, true)
}

/// The global-but-learnable regime: one shared kernel row parameterized by
/// logits through a softmax, so any parameter value yields a convex row.
#[derive(Debug, Clone, PartialEq)]
pub struct GlobalSmoother<T> {
    logits: Vec<T>,
}

impl<T: Scalar> GlobalSmoother<T> {
    /// Zero logits: the uniform kernel.
    pub fn new(width: usize) -> Result<Self> {
        check_width(width)?;
        Ok(Self { logits: vec![T::zero(); width] })
    }

    pub fn from_logits(logits: Vec<T>) -> Result<Self> {
        check_width(logits.len())?;
        Ok(Self { logits })
    }

    pub fn width(&self) -> usize {
        self.logits.len()
    }

    pub fn logits(&self) -> &[T] {
        &self.logits
    }

    pub fn logits_mut(&mut self) -> &mut [T] {
        &mut self.logits
    }

    /// The shared kernel row, softmax of the logits.
    pub fn row(&self) -> Vec<T> {
        softmax(&self.logits)
    }

    /// Broadcasts the shared row to every frame; all rows are bit-identical.
    pub fn weights(&self, frames: usize) -> Result<SmoothingWeights<T>> {
        let row = self.row();
        let mut data = Vec::with_capacity(frames * row.len());
        for _ in 0..frames {
            data.extend_from_slice(&row);
        }
        SmoothingWeights::new(frames, self.logits.len(), data, true)
    }
}

pub(crate) fn softmax<T: Scalar>(logits: &[T]) -> Vec<T> {
    let max = logits.iter().fold(T::neg_infinity(), |a, &b| a.max(b));
    let exps: Vec<T> = logits.iter().map(|&l| (l - max).exp()).collect();
    let sum = exps.iter().fold(T::zero(), |a, &b| a + b);
    exps.into_iter().map(|e| e / sum).collect()
}

/// Mean squared coordinate error between two trajectories of the same shape.
pub fn trajectory_mse<T: Scalar>(
    a: &LandmarkTrajectory<T>,
    b: &LandmarkTrajectory<T>,
) -> Result<f64> {
    if a.frames() != b.frames() || a.points() != b.points() {
        return Err(Error::InvalidParams(format!(
            "shape mismatch: {}x{} vs {}x{}",
            a.frames(),
            a.points(),
            b.frames(),
            b.points()
        )));
    }
    let mut sum = 0.0;
    for (pa, pb) in a.coords().iter().zip(b.coords()) {
        let dx = pa[0].as_f64() - pb[0].as_f64();
        let dy = pa[1].as_f64() - pb[1].as_f64();
        sum += dx * dx + dy * dy;
    }
    Ok(sum / (a.coords().len() * 2) as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::trajectory::Space;
    use approx::assert_relative_eq;

    fn traj_1d(xs: &[f64]) -> LandmarkTrajectory<f64> {
        let coords: Vec<[f64; 2]> = xs.iter().map(|&x| [x, 0.0]).collect();
        LandmarkTrajectory::new(xs.len(), 1, coords, 25.0, Space::Raw).unwrap()
    }

    #[test]
    fn identity_kernel_is_bitwise_identity() {
        let traj = traj_1d(&[0.25, -1.5, 3.0, 7.125]);
        let w = fixed_weights::<f64>(FixedKernel::Uniform, 1, 4).unwrap();
        let out = smooth_apply(&traj, &w).unwrap();
        assert_eq!(out.coords(), traj.coords());
    }

    #[test]
    fn constant_signal_is_preserved_exactly() {
        let traj = LandmarkTrajectory::constant(9, &[[0.1, -2.7]], 25.0).unwrap();
        for kind in [FixedKernel::Uniform, FixedKernel::Gaussian { sigma: 1.3 }] {
            let w = fixed_weights::<f64>(kind, 5, 9).unwrap();
            let out = smooth_apply(&traj, &w).unwrap();
            assert_eq!(out.coords(), traj.coords());
        }
    }

    #[test]
    fn hand_convolution_with_uniform_three() {
        let traj = traj_1d(&[0.0, 0.0, 3.0, 0.0, 0.0]);
        let w = fixed_weights::<f64>(FixedKernel::Uniform, 3, 5).unwrap();
        let out = smooth_apply(&traj, &w).unwrap();
        let xs: Vec<f64> = (0..5).map(|t| out.point(t, 0)[0]).collect();
        assert_eq!(xs, [0.0, 1.0, 1.0, 1.0, 0.0]);
    }

    #[test]
    fn frame_count_mismatch_is_rejected() {
        let traj = traj_1d(&[0.0, 1.0, 2.0]);
        let w = fixed_weights::<f64>(FixedKernel::Uniform, 3, 4).unwrap();
        assert!(smooth_apply(&traj, &w).is_err());
    }

    #[test]
    fn uniform_rows_are_exactly_one_third() {
        let w = fixed_weights::<f64>(FixedKernel::Uniform, 3, 2).unwrap();
        for t in 0..2 {
            assert_eq!(w.row(t), &[1.0 / 3.0; 3]);
        }
    }

    #[test]
    fn even_width_is_rejected() {
        assert!(fixed_weights::<f64>(FixedKernel::Uniform, 4, 3).is_err());
        assert!(GlobalSmoother::<f64>::new(2).is_err());
    }

    #[test]
    fn tiny_gaussian_sigma_degenerates_to_delta() {
        let w = fixed_weights::<f64>(FixedKernel::Gaussian { sigma: 1e-9 }, 5, 1).unwrap();
        assert_eq!(w.row(0), &[0.0, 0.0, 1.0, 0.0, 0.0]);
    }

    #[test]
    fn gaussian_kernel_matches_hand_normalization() {
        let w = fixed_weights::<f64>(FixedKernel::Gaussian { sigma: 1.0 }, 3, 1).unwrap();
        let row = w.row(0);
        assert_relative_eq!(row[0], 0.274068619061197, max_relative = 1e-12);
        assert_relative_eq!(row[1], 0.45186276187760605, max_relative = 1e-12);
        assert_eq!(row[0], row[2]);
    }

    #[test]
    fn zero_logits_give_uniform_row() {
        let g = GlobalSmoother::<f64>::new(3).unwrap();
        assert_eq!(g.row(), vec![1.0 / 3.0; 3]);
    }

    #[test]
    fn global_rows_are_tied() {
        let g = GlobalSmoother::from_logits(vec![0.3, -1.0, 2.0]).unwrap();
        let w = g.weights(7).unwrap();
        for t in 1..7 {
            assert_eq!(w.row(t), w.row(0));
        }
    }

    #[test]
    fn smoothing_is_linear_in_the_signal() {
        let s1 = traj_1d(&[1.0, -2.0, 0.5, 4.0, 2.5, -1.0]);
        let s2 = traj_1d(&[0.0, 3.0, -1.5, 2.0, 0.25, 5.0]);
        let (a, b) = (1.75, -0.5);
        let combo = LandmarkTrajectory::new(
            6,
            1,
            s1.coords()
                .iter()
                .zip(s2.coords())
                .map(|(p, q)| [a * p[0] + b * q[0], a * p[1] + b * q[1]])
                .collect(),
            25.0,
            Space::Raw,
        )
        .unwrap();
        let w = fixed_weights::<f64>(FixedKernel::Gaussian { sigma: 0.8 }, 5, 6).unwrap();
        let direct = smooth_apply(&combo, &w).unwrap();
        let (o1, o2) = (smooth_apply(&s1, &w).unwrap(), smooth_apply(&s2, &w).unwrap());
        for t in 0..6 {
            assert_relative_eq!(
                direct.point(t, 0)[0],
                a * o1.point(t, 0)[0] + b * o2.point(t, 0)[0],
                max_relative = 1e-12,
                epsilon = 1e-12
            );
        }
    }
}
