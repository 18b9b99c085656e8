//! Per-frame motion features fed to the adaptive weight network.

use crate::error::{Error, Result};
use crate::msi::{kinematics, PaddingMode};
use crate::scalar::Scalar;
use crate::trajectory::LandmarkTrajectory;

/// Channels produced by [`motion_features`]: mean velocity magnitude, mean
/// acceleration magnitude, and the same two restricted to a region of
/// interest (the whole point set when no region is given).
pub const FEATURE_CHANNELS: usize = 4;

/// A `channels x frames` feature matrix, channel-major.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureMatrix<T> {
    frames: usize,
    channels: usize,
    data: Vec<T>,
}

impl<T: Scalar> FeatureMatrix<T> {
    pub fn new(frames: usize, channels: usize, data: Vec<T>) -> Result<Self> {
        if data.len() != frames * channels {
            return Err(Error::InvalidParams(format!(
                "feature length {} does not match {channels} channels x {frames} frames",
                data.len()
            )));
        }
        Ok(Self { frames, channels, data })
    }

    pub fn frames(&self) -> usize {
        self.frames
    }

    pub fn channels(&self) -> usize {
        self.channels
    }

    #[inline]
    pub fn get(&self, channel: usize, frame: usize) -> T {
        self.data[channel * self.frames + frame]
    }

    pub fn channel(&self, channel: usize) -> &[T] {
        &self.data[channel * self.frames..(channel + 1) * self.frames]
    }

    pub fn data(&self) -> &[T] {
        &self.data
    }

    pub fn set(&mut self, channel: usize, frame: usize, value: T) {
        self.data[channel * self.frames + frame] = value;
    }
}

/// Extracts the default motion-dynamics features from a trajectory.
///
/// `region`, when given, selects the point subset for channels 2 and 3;
/// otherwise they repeat the global statistics.
pub fn motion_features<T: Scalar>(
    traj: &LandmarkTrajectory<T>,
    region: Option<&[usize]>,
) -> Result<FeatureMatrix<T>> {
    let kin = kinematics(traj, PaddingMode::Paper)?;
    let frames = traj.frames();
    let all: Vec<usize> = (0..traj.points()).collect();
    let roi = region.unwrap_or(&all);
    if let Some(&bad) = roi.iter().find(|&&i| i >= traj.points()) {
        return Err(Error::InvalidParams(format!(
            "feature region references point {bad}, trajectory has {} points",
            traj.points()
        )));
    }
    if roi.is_empty() {
        return Err(Error::InvalidParams("feature region is empty".into()));
    }

    let mean_mag = |frame: usize, idx: &[usize], accel: bool| -> T {
        let mut sum = T::zero();
        for &p in idx {
            let v = if accel { kin.acceleration(frame, p) } else { kin.velocity(frame, p) };
            sum += (v[0] * v[0] + v[1] * v[1]).sqrt();
        }
        sum / T::from_usize(idx.len()).unwrap()
    };

    let mut data = vec![T::zero(); frames * FEATURE_CHANNELS];
    for t in 0..frames {
        data[t] = mean_mag(t, &all, false);
        data[frames + t] = mean_mag(t, &all, true);
        data[2 * frames + t] = mean_mag(t, roi, false);
        data[3 * frames + t] = mean_mag(t, roi, true);
    }
    FeatureMatrix::new(frames, FEATURE_CHANNELS, data)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn static_trajectory_has_zero_features() {
        let traj = crate::trajectory::LandmarkTrajectory::constant(6, &[[1.0, 2.0]], 25.0).unwrap();
        let f = motion_features::<f64>(&traj, None).unwrap();
        assert_eq!(f.channels(), FEATURE_CHANNELS);
        assert!(f.data().iter().all(|&x| x == 0.0));
    }

    #[test]
    fn region_channels_differ_from_global() {
        // point 0 static, point 1 moving: region {1} sees larger magnitudes
        let coords = (0..8).flat_map(|t| [[0.0, 0.0], [t as f64 * 2.0, 0.0]]).collect();
        let traj = crate::trajectory::LandmarkTrajectory::new(
            8,
            2,
            coords,
            25.0,
            crate::trajectory::Space::Raw,
        )
        .unwrap();
        let f = motion_features::<f64>(&traj, Some(&[1])).unwrap();
        // global mean velocity magnitude is half the moving point's
        assert_eq!(f.get(0, 2) * 2.0, f.get(2, 2));
    }
}
