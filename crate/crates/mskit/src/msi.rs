//! Motion Stability Index: the kinematic chain (velocity, acceleration),
//! per-point acceleration variance, the MSI score, the baseline statistics
//! it is compared against, and the Pearson correlation harness.

use std::collections::BTreeMap;
use std::ops::Range;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::trajectory::{CropSpec, LandmarkTrajectory, RegionMap, Space};

/// Default regularizer added to acceleration variance before taking the
/// reciprocal.
pub const DEFAULT_EPSILON: f64 = 1e-5;

/// How the first differences are padded at the sequence boundaries.
///
/// `Paper` zero-pads the velocity sequence (the final velocity entry is zero
/// and the acceleration at the first frame compares against a zero velocity),
/// which manufactures boundary accelerations. `Interior` keeps only the
/// entries whose full stencil lies inside the sequence.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum PaddingMode {
    #[default]
    Paper,
    Interior,
}

/// First and second temporal differences of a trajectory.
#[derive(Debug, Clone)]
pub struct Kinematics<T> {
    frames: usize,
    points: usize,
    velocity: Vec<[T; 2]>,
    acceleration: Vec<[T; 2]>,
    mode: PaddingMode,
}

impl<T: Scalar> Kinematics<T> {
    pub fn frames(&self) -> usize {
        self.frames
    }

    pub fn points(&self) -> usize {
        self.points
    }

    pub fn mode(&self) -> PaddingMode {
        self.mode
    }

    #[inline]
    pub fn velocity(&self, frame: usize, point: usize) -> [T; 2] {
        self.velocity[frame * self.points + point]
    }

    #[inline]
    pub fn acceleration(&self, frame: usize, point: usize) -> [T; 2] {
        self.acceleration[frame * self.points + point]
    }

    /// Frame range whose velocity samples enter statistics.
    pub fn velocity_range(&self) -> Range<usize> {
        match self.mode {
            PaddingMode::Paper => 0..self.frames,
            PaddingMode::Interior => 0..self.frames - 1,
        }
    }

    /// Frame range whose acceleration samples enter statistics.
    pub fn acceleration_range(&self) -> Range<usize> {
        match self.mode {
            PaddingMode::Paper => 0..self.frames,
            PaddingMode::Interior => 1..self.frames - 1,
        }
    }
}

/// Computes per-frame velocities `v[t] = Z[t+1] - Z[t]` and accelerations
/// `a[t] = v[t] - v[t-1]` under the chosen boundary handling.
pub fn kinematics<T: Scalar>(
    traj: &LandmarkTrajectory<T>,
    mode: PaddingMode,
) -> Result<Kinematics<T>> {
    let frames = traj.frames();
    let points = traj.points();
    if frames < 3 {
        return Err(Error::Compute(format!(
            "trajectory too short for acceleration: {frames} frames, need >= 3"
        )));
    }
    let zero = [T::zero(), T::zero()];
    let mut velocity = vec![zero; frames * points];
    let mut acceleration = vec![zero; frames * points];
    for t in 0..frames {
        for n in 0..points {
            let i = t * points + n;
            if t + 1 < frames {
                let a = traj.point(t, n);
                let b = traj.point(t + 1, n);
                velocity[i] = [b[0] - a[0], b[1] - a[1]];
            } // else: zero pad (v[T-1] = 0)
        }
    }
    for t in 0..frames {
        for n in 0..points {
            let i = t * points + n;
            let v = velocity[i];
            let prev = if t == 0 { zero } else { velocity[i - points] };
            acceleration[i] = [v[0] - prev[0], v[1] - prev[1]];
        }
    }
    Ok(Kinematics { frames, points, velocity, acceleration, mode })
}

/// Per-axis variance of one point's included samples.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AxisVariance<T> {
    pub x: T,
    pub y: T,
}

impl<T: Scalar> AxisVariance<T> {
    /// Scalar reduction: the two axis variances averaged.
    pub fn mean(&self) -> T {
        (self.x + self.y) * T::of(0.5)
    }
}

fn variance_over<T: Scalar>(
    samples: &[[T; 2]],
    range: Range<usize>,
    stride: usize,
    offset: usize,
) -> Result<AxisVariance<T>> {
    let count = range.len();
    if count < 2 {
        return Err(Error::Compute(format!(
            "need at least 2 samples for a variance, got {count}"
        )));
    }
    let m = T::from_usize(count).unwrap();
    let mut mean = [T::zero(), T::zero()];
    for t in range.clone() {
        let s = samples[t * stride + offset];
        mean[0] += s[0];
        mean[1] += s[1];
    }
    mean[0] /= m;
    mean[1] /= m;
    let mut ss = [T::zero(), T::zero()];
    for t in range {
        let s = samples[t * stride + offset];
        let dx = s[0] - mean[0];
        let dy = s[1] - mean[1];
        ss[0] += dx * dx;
        ss[1] += dy * dy;
    }
    let denom = m - T::one();
    Ok(AxisVariance { x: ss[0] / denom, y: ss[1] / denom })
}

/// Variance of one point's acceleration over the included samples, per axis,
/// with the 1/(count-1) divisor.
pub fn acceleration_variance<T: Scalar>(
    kin: &Kinematics<T>,
    point: usize,
) -> Result<AxisVariance<T>> {
    if point >= kin.points {
        return Err(Error::InvalidParams(format!(
            "point {point} out of range ({} points)",
            kin.points
        )));
    }
    variance_over(&kin.acceleration, kin.acceleration_range(), kin.points, point)
}

/// Variance of one point's velocity over the included samples, per axis.
pub fn velocity_variance<T: Scalar>(kin: &Kinematics<T>, point: usize) -> Result<AxisVariance<T>> {
    if point >= kin.points {
        return Err(Error::InvalidParams(format!(
            "point {point} out of range ({} points)",
            kin.points
        )));
    }
    variance_over(&kin.velocity, kin.velocity_range(), kin.points, point)
}

/// Stability statistics of one region: the MSI score plus the three baseline
/// statistics it is compared against.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RegionStats {
    /// Mean over region points of `1 / (sigma(a) + epsilon)`.
    pub msi: f64,
    /// Mean over region points of the acceleration variance.
    pub sigma_a: f64,
    /// Mean over region points of the velocity variance.
    pub sigma_v: f64,
    /// Mean over region points of `1 / (sigma(v) + epsilon)`.
    pub inv_sigma_v: f64,
}

/// Crop normalization metadata echoed into reports.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CropMeta {
    pub ratio: f64,
    pub warmup_frames: usize,
    pub out_size: usize,
}

impl From<&CropSpec> for CropMeta {
    fn from(spec: &CropSpec) -> Self {
        Self { ratio: spec.ratio, warmup_frames: spec.warmup_frames, out_size: spec.out_size }
    }
}

/// Per-video stability report, serialized as JSON by the CLI.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MsiReport {
    pub video: String,
    pub epsilon: f64,
    pub padding: PaddingMode,
    pub frames: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub crop: Option<CropMeta>,
    pub regions: BTreeMap<String, RegionStats>,
}

/// Options for [`msi`] / [`msi_report`].
#[derive(Debug, Clone, Copy)]
pub struct MsiOptions {
    pub epsilon: f64,
    pub mode: PaddingMode,
    /// Permit raw-space trajectories. MSI values are only comparable across
    /// videos in normalized space, so this is off by default.
    pub allow_raw: bool,
}

impl Default for MsiOptions {
    fn default() -> Self {
        Self { epsilon: DEFAULT_EPSILON, mode: PaddingMode::Paper, allow_raw: false }
    }
}

/// Scores one region of a trajectory.
///
/// MSI is the mean over the region's points of the reciprocal regularized
/// acceleration variance; the companion fields hold the region means of the
/// baseline statistics.
pub fn msi<T: Scalar>(
    traj: &LandmarkTrajectory<T>,
    map: &RegionMap,
    region: &str,
    opts: &MsiOptions,
) -> Result<RegionStats> {
    if traj.space() == Space::Raw && !opts.allow_raw {
        return Err(Error::InvalidParams(
            "trajectory is in raw space: normalize first (or enable the raw-space override)".into(),
        ));
    }
    if !(opts.epsilon >= 0.0) {
        return Err(Error::InvalidParams(format!("epsilon must be >= 0, got {}", opts.epsilon)));
    }
    let indices = map.get(region).ok_or_else(|| {
        let available: Vec<&str> = map.names().collect();
        Error::InvalidParams(format!(
            "unknown region \"{region}\"; available regions: {}",
            available.join(", ")
        ))
    })?;
    map.validate_for(traj.points())?;
    if indices.is_empty() {
        return Err(Error::InvalidParams(format!("region \"{region}\" is empty")));
    }

    let kin = kinematics(traj, opts.mode)?;
    let eps = T::of(opts.epsilon);
    // Region means use Welford's running mean: when every point contributes
    // the same value (a static region), the increment is exactly zero and
    // the mean preserves it bit-for-bit regardless of the point count.
    let mut msi_mean = T::zero();
    let mut sigma_a_mean = T::zero();
    let mut sigma_v_mean = T::zero();
    let mut inv_sigma_v_mean = T::zero();
    for (i, &p) in indices.iter().enumerate() {
        let count = T::from_usize(i + 1).unwrap();
        let sa = acceleration_variance(&kin, p)?.mean();
        let sv = velocity_variance(&kin, p)?.mean();
        msi_mean += ((sa + eps).recip() - msi_mean) / count;
        sigma_a_mean += (sa - sigma_a_mean) / count;
        sigma_v_mean += (sv - sigma_v_mean) / count;
        inv_sigma_v_mean += ((sv + eps).recip() - inv_sigma_v_mean) / count;
    }
    Ok(RegionStats {
        msi: msi_mean.as_f64(),
        sigma_a: sigma_a_mean.as_f64(),
        sigma_v: sigma_v_mean.as_f64(),
        inv_sigma_v: inv_sigma_v_mean.as_f64(),
    })
}

/// Scores every region in the map and assembles the report.
pub fn msi_report<T: Scalar>(
    traj: &LandmarkTrajectory<T>,
    map: &RegionMap,
    video: impl Into<String>,
    opts: &MsiOptions,
    crop: Option<CropMeta>,
) -> Result<MsiReport> {
    let mut regions = BTreeMap::new();
    for name in map.names() {
        regions.insert(name.to_string(), msi(traj, map, name, opts)?);
    }
    Ok(MsiReport {
        video: video.into(),
        epsilon: opts.epsilon,
        padding: opts.mode,
        frames: traj.frames(),
        crop,
        regions,
    })
}

/// Sample Pearson correlation coefficient.
pub fn pearson(x: &[f64], y: &[f64]) -> Result<f64> {
    if x.len() != y.len() {
        return Err(Error::InvalidParams(format!(
            "length mismatch: {} vs {}",
            x.len(),
            y.len()
        )));
    }
    if x.len() < 3 {
        return Err(Error::InvalidParams(format!("need at least 3 samples, got {}", x.len())));
    }
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let mut sxx = 0.0;
    let mut syy = 0.0;
    let mut sxy = 0.0;
    for (&a, &b) in x.iter().zip(y) {
        let dx = a - mx;
        let dy = b - my;
        sxx += dx * dx;
        syy += dy * dy;
        sxy += dx * dy;
    }
    if sxx == 0.0 || syy == 0.0 {
        return Err(Error::Compute("zero variance: constant input vector".into()));
    }
    Ok(sxy / (sxx.sqrt() * syy.sqrt()))
}

/// One video's objective statistics, as correlated against scores.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StatVector {
    pub sigma_v: f64,
    pub inv_sigma_v: f64,
    pub sigma_a: f64,
    pub msi: f64,
}

impl From<RegionStats> for StatVector {
    fn from(r: RegionStats) -> Self {
        Self { sigma_v: r.sigma_v, inv_sigma_v: r.inv_sigma_v, sigma_a: r.sigma_a, msi: r.msi }
    }
}

/// Pearson coefficients of the four statistics against a score vector.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CorrelationTable {
    pub videos: usize,
    pub sigma_v: f64,
    pub inv_sigma_v: f64,
    pub sigma_a: f64,
    pub msi: f64,
}

impl CorrelationTable {
    /// Aligned text rendering, one labelled coefficient per column.
    pub fn render_rows(rows: &[(String, CorrelationTable)]) -> String {
        let mut out = String::new();
        out.push_str(&format!(
            "{:<12} {:>10} {:>12} {:>10} {:>10}\n",
            "", "sigma(v)", "1/sigma(v)", "sigma(a)", "MSI"
        ));
        for (label, t) in rows {
            out.push_str(&format!(
                "{:<12} {:>10.3} {:>12.3} {:>10.3} {:>10.3}\n",
                label, t.sigma_v, t.inv_sigma_v, t.sigma_a, t.msi
            ));
        }
        out
    }
}

/// Correlates per-video statistics with per-video scores, aligned by id.
pub fn correlation_table(
    metrics: &BTreeMap<String, StatVector>,
    scores: &BTreeMap<String, f64>,
) -> Result<CorrelationTable> {
    let missing_scores: Vec<&String> =
        metrics.keys().filter(|id| !scores.contains_key(*id)).collect();
    let missing_metrics: Vec<&String> =
        scores.keys().filter(|id| !metrics.contains_key(*id)).collect();
    if !missing_scores.is_empty() || !missing_metrics.is_empty() {
        let mut parts = Vec::new();
        if !missing_scores.is_empty() {
            parts.push(format!(
                "ids without scores: {}",
                missing_scores.iter().map(|s| s.as_str()).collect::<Vec<_>>().join(", ")
            ));
        }
        if !missing_metrics.is_empty() {
            parts.push(format!(
                "ids without metrics: {}",
                missing_metrics.iter().map(|s| s.as_str()).collect::<Vec<_>>().join(", ")
            ));
        }
        return Err(Error::InvalidParams(format!("video id mismatch: {}", parts.join("; "))));
    }
    if metrics.len() < 3 {
        return Err(Error::InvalidParams(format!(
            ">= 3 videos required for correlation, got {}",
            metrics.len()
        )));
    }
    let score_vec: Vec<f64> = metrics.keys().map(|id| scores[id]).collect();
    let column = |f: fn(&StatVector) -> f64| -> Vec<f64> { metrics.values().map(f).collect() };
    Ok(CorrelationTable {
        videos: metrics.len(),
        sigma_v: pearson(&column(|s| s.sigma_v), &score_vec)?,
        inv_sigma_v: pearson(&column(|s| s.inv_sigma_v), &score_vec)?,
        sigma_a: pearson(&column(|s| s.sigma_a), &score_vec)?,
        msi: pearson(&column(|s| s.msi), &score_vec)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::trajectory::LandmarkTrajectory;
    use approx::assert_relative_eq;

    fn traj_1d(xs: &[f64]) -> LandmarkTrajectory<f64> {
        let coords: Vec<[f64; 2]> = xs.iter().map(|&x| [x, 0.0]).collect();
        LandmarkTrajectory::new(xs.len(), 1, coords, 25.0, Space::Normalized256).unwrap()
    }

    #[test]
    fn static_point_has_zero_kinematics_in_both_modes() {
        let traj = LandmarkTrajectory::constant(6, &[[5.0, 5.0]], 25.0).unwrap();
        for mode in [PaddingMode::Paper, PaddingMode::Interior] {
            let kin = kinematics(&traj, mode).unwrap();
            for t in 0..6 {
                assert_eq!(kin.velocity(t, 0), [0.0, 0.0]);
                assert_eq!(kin.acceleration(t, 0), [0.0, 0.0]);
            }
        }
    }

    #[test]
    fn constant_velocity_paper_mode_manufactures_boundary_accelerations() {
        let kin = kinematics(&traj_1d(&[0.0, 1.0, 2.0, 3.0]), PaddingMode::Paper).unwrap();
        let v: Vec<f64> = (0..4).map(|t| kin.velocity(t, 0)[0]).collect();
        let a: Vec<f64> = (0..4).map(|t| kin.acceleration(t, 0)[0]).collect();
        assert_eq!(v, [1.0, 1.0, 1.0, 0.0]);
        assert_eq!(a, [1.0, 0.0, 0.0, -1.0]);
    }

    #[test]
    fn constant_velocity_interior_mode_keeps_only_clean_samples() {
        let kin = kinematics(&traj_1d(&[0.0, 1.0, 2.0, 3.0]), PaddingMode::Interior).unwrap();
        assert_eq!(kin.acceleration_range(), 1..3);
        for t in kin.acceleration_range() {
            assert_eq!(kin.acceleration(t, 0), [0.0, 0.0]);
        }
        assert_eq!(kin.velocity_range(), 0..3);
    }

    #[test]
    fn too_short_trajectory_is_rejected() {
        let err = kinematics(&traj_1d(&[0.0, 1.0]), PaddingMode::Paper).unwrap_err();
        assert!(err.to_string().contains("too short"), "{err}");
    }

    #[test]
    fn acceleration_variance_of_zero_signal_is_zero() {
        let traj = LandmarkTrajectory::constant(5, &[[2.0, 3.0]], 25.0).unwrap();
        let kin = kinematics(&traj, PaddingMode::Paper).unwrap();
        let var = acceleration_variance(&kin, 0).unwrap();
        assert_eq!((var.x, var.y, var.mean()), (0.0, 0.0, 0.0));
    }

    #[test]
    fn acceleration_variance_hand_example() {
        // accelerations [1,0,0,-1]: mean 0, sum of squares 2, divisor 3
        let kin = kinematics(&traj_1d(&[0.0, 1.0, 2.0, 3.0]), PaddingMode::Paper).unwrap();
        let var = acceleration_variance(&kin, 0).unwrap();
        assert_relative_eq!(var.x, 2.0 / 3.0, max_relative = 1e-15);
        assert_eq!(var.y, 0.0);
    }

    #[test]
    fn white_noise_acceleration_variance_matches_second_difference_law() {
        // i.i.d. positional noise of std s through the second difference
        // (coefficients 1, -2, 1) has variance (1+4+1) s^2 = 6 s^2.
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(42);
        let s = 0.7;
        let t_len = 10_000;
        let coords: Vec<[f64; 2]> = (0..t_len)
            .map(|_| {
                [
                    s * <f64 as Scalar>::sample_standard_normal(&mut rng),
                    s * <f64 as Scalar>::sample_standard_normal(&mut rng),
                ]
            })
            .collect();
        let traj =
            LandmarkTrajectory::new(t_len, 1, coords, 25.0, Space::Normalized256).unwrap();
        let kin = kinematics(&traj, PaddingMode::Interior).unwrap();
        let var = acceleration_variance(&kin, 0).unwrap();
        let expected = 6.0 * s * s;
        assert!((var.x - expected).abs() < 0.1 * expected, "x {} vs {}", var.x, expected);
        assert!((var.y - expected).abs() < 0.1 * expected, "y {} vs {}", var.y, expected);
    }

    #[test]
    fn static_region_msi_hits_the_epsilon_ceiling() {
        let traj = LandmarkTrajectory::constant(10, &[[1.0, 2.0], [3.0, 4.0]], 25.0)
            .unwrap()
            .map_coords(Space::Normalized256, |_, _, p| p)
            .unwrap();
        let stats = msi(&traj, &RegionMap::all(2), "all", &MsiOptions::default()).unwrap();
        // the reciprocal of the regularizer, computed in binary64
        assert_eq!(stats.msi, 1.0 / DEFAULT_EPSILON);
        assert_eq!(stats.sigma_a, 0.0);
    }

    #[test]
    fn msi_two_point_region_arithmetic() {
        // Target per-point axis-mean variances of 1/3 and 2/3. The ramp
        // [0,1,2,3] has paper-mode accelerations [1,0,0,-1]: x-axis variance
        // 2/3, y-axis 0, mean 1/3. Scaling positions by sqrt(2) doubles the
        // variance, giving mean 2/3.
        let c = 2.0_f64.sqrt();
        let coords: Vec<[f64; 2]> = [0.0, 1.0, 2.0, 3.0]
            .iter()
            .flat_map(|&x| [[x, 0.0], [c * x, 0.0]])
            .collect();
        let traj = LandmarkTrajectory::new(4, 2, coords, 25.0, Space::Normalized256).unwrap();
        let kin = kinematics(&traj, PaddingMode::Paper).unwrap();
        assert_relative_eq!(
            acceleration_variance(&kin, 0).unwrap().mean(),
            1.0 / 3.0,
            max_relative = 1e-12
        );
        assert_relative_eq!(
            acceleration_variance(&kin, 1).unwrap().mean(),
            2.0 / 3.0,
            max_relative = 1e-12
        );

        // direct arithmetic oracle: 0.5 * (1/(1/3+eps) + 1/(2/3+eps))
        let stats = msi(&traj, &RegionMap::all(2), "all", &MsiOptions::default()).unwrap();
        assert_relative_eq!(stats.msi, 2.2499437515187073, max_relative = 1e-12);
    }

    #[test]
    fn raw_space_requires_override() {
        let traj = LandmarkTrajectory::constant(5, &[[0.0, 0.0]], 25.0).unwrap();
        let err = msi(&traj, &RegionMap::all(1), "all", &MsiOptions::default()).unwrap_err();
        assert!(err.to_string().contains("normalize first"), "{err}");
        let opts = MsiOptions { allow_raw: true, ..Default::default() };
        assert!(msi(&traj, &RegionMap::all(1), "all", &opts).is_ok());
    }

    #[test]
    fn pearson_perfect_linear_relations() {
        let x = [1.0, 2.0, 3.0, 4.0, 5.0];
        let y: Vec<f64> = x.iter().map(|v| 2.0 * v + 1.0).collect();
        let neg: Vec<f64> = x.iter().map(|v| -v).collect();
        assert!((pearson(&x, &y).unwrap() - 1.0).abs() < 1e-12);
        assert!((pearson(&x, &neg).unwrap() + 1.0).abs() < 1e-12);
    }

    #[test]
    fn pearson_hand_computed_case() {
        let r = pearson(&[1.0, 2.0, 3.0, 4.0], &[1.0, 3.0, 2.0, 4.0]).unwrap();
        assert_relative_eq!(r, 0.8, max_relative = 1e-12);
    }

    #[test]
    fn pearson_rejects_constant_vector() {
        let err = pearson(&[1.0, 1.0, 1.0], &[1.0, 2.0, 3.0]).unwrap_err();
        assert!(err.to_string().contains("zero variance"), "{err}");
    }

    #[test]
    fn correlation_table_identity_scores() {
        let mut metrics = BTreeMap::new();
        let mut scores = BTreeMap::new();
        // msi decreasing with sigma_a, as in real data
        for (i, sa) in [0.2, 0.5, 1.0, 2.0, 5.0].iter().enumerate() {
            let msi = 1.0 / (sa + 1e-5);
            metrics.insert(
                format!("v{i}"),
                StatVector { sigma_v: sa * 0.5, inv_sigma_v: 2.0 / sa, sigma_a: *sa, msi },
            );
            scores.insert(format!("v{i}"), msi);
        }
        let table = correlation_table(&metrics, &scores).unwrap();
        assert!((table.msi - 1.0).abs() < 1e-12);
        assert!(table.sigma_a < 0.0);
    }

    #[test]
    fn correlation_table_needs_three_videos() {
        let mut metrics = BTreeMap::new();
        let mut scores = BTreeMap::new();
        for i in 0..2 {
            metrics.insert(
                format!("v{i}"),
                StatVector { sigma_v: i as f64, inv_sigma_v: 1.0, sigma_a: 1.0, msi: 1.0 },
            );
            scores.insert(format!("v{i}"), i as f64);
        }
        let err = correlation_table(&metrics, &scores).unwrap_err();
        assert!(err.to_string().contains(">= 3 videos"), "{err}");
    }

    #[test]
    fn correlation_table_reports_missing_ids() {
        let mut metrics = BTreeMap::new();
        let mut scores = BTreeMap::new();
        for i in 0..3 {
            metrics.insert(
                format!("v{i}"),
                StatVector { sigma_v: i as f64, inv_sigma_v: 1.0, sigma_a: 1.0, msi: 1.0 },
            );
        }
        scores.insert("v0".to_string(), 1.0);
        scores.insert("other".to_string(), 2.0);
        let err = correlation_table(&metrics, &scores).unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("v1") && msg.contains("v2") && msg.contains("other"), "{msg}");
    }

    #[test]
    fn msi_report_serializes_with_schema_fields() {
        let traj = LandmarkTrajectory::constant(5, &[[1.0, 1.0], [2.0, 2.0]], 25.0)
            .unwrap()
            .map_coords(Space::Normalized256, |_, _, p| p)
            .unwrap();
        let mut map = RegionMap::all(2);
        map.insert("lip", vec![0]);
        map.insert("jaw", vec![1]);
        let report =
            msi_report(&traj, &map, "clip", &MsiOptions::default(), None).unwrap();
        let json = serde_json::to_value(&report).unwrap();
        assert_eq!(json["video"], "clip");
        assert_eq!(json["epsilon"], 1e-5);
        assert_eq!(json["padding"], "paper");
        assert!(json["regions"]["lip"]["msi"].is_f64());
        assert!(json["regions"]["jaw"]["inv_sigma_v"].is_f64());
    }
}
