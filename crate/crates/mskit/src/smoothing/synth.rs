//! Synthetic trajectory generation: clean signal families, jitter injection,
//! and paired (clean, jittered) datasets for training and benchmarking the
//! smoothers.

use std::f64::consts::TAU;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::trajectory::{LandmarkTrajectory, Space};

/// A jitter model applied on top of a clean trajectory.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum JitterKind<T> {
    /// i.i.d. Gaussian noise of the given std on every coordinate.
    White { sigma: T },
    /// Isolated whole-frame pops: each frame is displaced with probability
    /// `rate` (never two adjacent frames) by `amplitude` in a random
    /// direction shared by all points of the frame.
    Impulse { rate: f64, amplitude: T },
    /// A boundary-mismatch step: all frames at and after `frame` are offset.
    Step { frame: usize, offset: [T; 2] },
}

/// Adds jitter to a trajectory, deterministically for a given seed.
pub fn inject_jitter<T: Scalar>(
    traj: &LandmarkTrajectory<T>,
    kind: &JitterKind<T>,
    seed: u64,
) -> Result<LandmarkTrajectory<T>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    match *kind {
        JitterKind::White { sigma } => {
            if sigma < T::zero() {
                return Err(Error::InvalidParams("white jitter sigma must be >= 0".into()));
            }
            traj.map_coords(traj.space(), |_, _, p| {
                let nx = T::sample_standard_normal(&mut rng);
                let ny = T::sample_standard_normal(&mut rng);
                [p[0] + sigma * nx, p[1] + sigma * ny]
            })
        }
        JitterKind::Impulse { rate, amplitude } => {
            if !(0.0..=1.0).contains(&rate) {
                return Err(Error::InvalidParams(format!("impulse rate must be in [0,1], got {rate}")));
            }
            if amplitude < T::zero() {
                return Err(Error::InvalidParams("impulse amplitude must be >= 0".into()));
            }
            let mut offsets: Vec<Option<[T; 2]>> = Vec::with_capacity(traj.frames());
            let mut prev_hit = false;
            for _ in 0..traj.frames() {
                let roll: f64 = rng.gen();
                if !prev_hit && roll < rate {
                    let angle: f64 = rng.gen_range(0.0..TAU);
                    offsets.push(Some([
                        amplitude * T::of(angle.cos()),
                        amplitude * T::of(angle.sin()),
                    ]));
                    prev_hit = true;
                } else {
                    offsets.push(None);
                    prev_hit = false;
                }
            }
            traj.map_coords(traj.space(), |t, _, p| match offsets[t] {
                Some(o) => [p[0] + o[0], p[1] + o[1]],
                None => p,
            })
        }
        JitterKind::Step { frame, offset } => {
            if frame >= traj.frames() {
                return Err(Error::InvalidParams(format!(
                    "step frame {frame} out of range ({} frames)",
                    traj.frames()
                )));
            }
            traj.map_coords(traj.space(), |t, _, p| {
                if t >= frame {
                    [p[0] + offset[0], p[1] + offset[1]]
                } else {
                    p
                }
            })
        }
    }
}

/// Fractions of clean-signal families in a dataset; must sum to 1.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FamilyMix {
    /// Piecewise-constant levels with occasional jumps.
    pub slow: f64,
    /// High-frequency sinusoid.
    pub fast: f64,
    /// Sinusoid sweeping from low to high frequency.
    pub chirp: f64,
}

/// Fractions of jitter kinds in a dataset; must sum to 1.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct JitterMix {
    pub white: f64,
    pub impulse: f64,
    pub step: f64,
}

/// Recipe for a deterministic synthetic dataset of (clean, jittered) pairs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SyntheticDatasetSpec {
    pub num_sequences: usize,
    pub frames: usize,
    pub points: usize,
    pub seed: u64,
    pub families: FamilyMix,
    /// Per-sequence jitter std is drawn uniformly from `[lo, hi]`.
    pub jitter_std: [f64; 2],
    pub jitter_mix: JitterMix,
}

impl Default for SyntheticDatasetSpec {
    fn default() -> Self {
        Self {
            num_sequences: 200,
            frames: 64,
            points: 2,
            seed: 0,
            families: FamilyMix { slow: 0.5, fast: 0.5, chirp: 0.0 },
            jitter_std: [0.3, 1.0],
            jitter_mix: JitterMix { white: 1.0, impulse: 0.0, step: 0.0 },
        }
    }
}

const MIX_TOLERANCE: f64 = 1e-9;

impl SyntheticDatasetSpec {
    pub fn validate(&self) -> Result<()> {
        if self.num_sequences == 0 || self.points == 0 {
            return Err(Error::InvalidParams("num_sequences and points must be >= 1".into()));
        }
        if self.frames < 3 {
            return Err(Error::InvalidParams("frames must be >= 3".into()));
        }
        let [lo, hi] = self.jitter_std;
        if !(0.0 <= lo && lo <= hi) {
            return Err(Error::InvalidParams(format!(
                "jitter_std range must satisfy 0 <= lo <= hi, got [{lo}, {hi}]"
            )));
        }
        let fam = [self.families.slow, self.families.fast, self.families.chirp];
        let jit = [self.jitter_mix.white, self.jitter_mix.impulse, self.jitter_mix.step];
        for (label, mix) in [("families", fam), ("jitter_mix", jit)] {
            if mix.iter().any(|&f| f < 0.0) {
                return Err(Error::InvalidParams(format!("{label} fractions must be >= 0")));
            }
            let sum: f64 = mix.iter().sum();
            if (sum - 1.0).abs() > MIX_TOLERANCE {
                return Err(Error::InvalidParams(format!("{label} fractions sum to {sum}, expected 1")));
            }
        }
        Ok(())
    }
}

/// One generated training example.
#[derive(Debug, Clone, PartialEq)]
pub struct SyntheticPair<T> {
    pub clean: LandmarkTrajectory<T>,
    pub jittered: LandmarkTrajectory<T>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Family {
    Slow,
    Fast,
    Chirp,
}

// Impulse pops and steps have no std of their own; scale them off the drawn
// jitter std so a zero-jitter spec stays exactly clean for every kind.
const IMPULSE_RATE: f64 = 0.05;
const IMPULSE_AMPLITUDE_PER_STD: f64 = 4.0;
const STEP_OFFSET_PER_STD: f64 = 4.0;

/// Generates the dataset described by the spec. Deterministic: the same spec
/// yields bit-identical pairs.
pub fn gen_synthetic<T: Scalar>(spec: &SyntheticDatasetSpec) -> Result<Vec<SyntheticPair<T>>> {
    spec.validate()?;
    let mut master = ChaCha8Rng::seed_from_u64(spec.seed);
    let n = spec.num_sequences;
    // Deterministic proportional family allocation.
    let b_slow = (spec.families.slow * n as f64).round() as usize;
    let b_fast = b_slow + (spec.families.fast * n as f64).round() as usize;
    let mut pairs = Vec::with_capacity(n);
    for i in 0..n {
        let family = if i < b_slow.min(n) {
            Family::Slow
        } else if i < b_fast.min(n) {
            Family::Fast
        } else {
            Family::Chirp
        };
        let seq_seed: u64 = master.gen();
        pairs.push(gen_pair(spec, family, seq_seed)?);
    }
    Ok(pairs)
}

fn gen_pair<T: Scalar>(
    spec: &SyntheticDatasetSpec,
    family: Family,
    seq_seed: u64,
) -> Result<SyntheticPair<T>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seq_seed);
    let frames = spec.frames;
    let points = spec.points;

    let mut coords = vec![[T::zero(); 2]; frames * points];
    for p in 0..points {
        // Spread base positions so points do not coincide.
        let base = [
            rng.gen_range(-50.0..50.0) + 120.0 * p as f64,
            rng.gen_range(-50.0..50.0),
        ];
        for axis in 0..2 {
            let signal = gen_axis_signal(family, frames, &mut rng);
            for t in 0..frames {
                coords[t * points + p][axis] = T::of(base[axis] + signal[t]);
            }
        }
    }
    let clean = LandmarkTrajectory::new(frames, points, coords, 25.0, Space::Raw)?;

    let std = rng.gen_range(spec.jitter_std[0]..=spec.jitter_std[1]);
    let roll: f64 = rng.gen();
    let jitter_seed: u64 = rng.gen();
    let kind = if roll < spec.jitter_mix.white {
        JitterKind::White { sigma: T::of(std) }
    } else if roll < spec.jitter_mix.white + spec.jitter_mix.impulse {
        JitterKind::Impulse { rate: IMPULSE_RATE, amplitude: T::of(IMPULSE_AMPLITUDE_PER_STD * std) }
    } else {
        let frame = rng.gen_range(frames / 4..(3 * frames / 4).max(frames / 4 + 1));
        let angle: f64 = rng.gen_range(0.0..TAU);
        JitterKind::Step {
            frame,
            offset: [
                T::of(STEP_OFFSET_PER_STD * std * angle.cos()),
                T::of(STEP_OFFSET_PER_STD * std * angle.sin()),
            ],
        }
    };
    let jittered = inject_jitter(&clean, &kind, jitter_seed)?;
    Ok(SyntheticPair { clean, jittered })
}

fn gen_axis_signal(family: Family, frames: usize, rng: &mut ChaCha8Rng) -> Vec<f64> {
    match family {
        Family::Slow => {
            let mut out = Vec::with_capacity(frames);
            let mut level = rng.gen_range(-15.0..15.0);
            let mut remaining = rng.gen_range(8..=24);
            for _ in 0..frames {
                if remaining == 0 {
                    level = rng.gen_range(-15.0..15.0);
                    remaining = rng.gen_range(8..=24);
                }
                out.push(level);
                remaining -= 1;
            }
            out
        }
        Family::Fast => {
            let amplitude = rng.gen_range(4.0..10.0);
            let freq = rng.gen_range(0.15..0.3);
            let phase = rng.gen_range(0.0..TAU);
            (0..frames).map(|t| amplitude * (TAU * freq * t as f64 + phase).sin()).collect()
        }
        Family::Chirp => {
            let amplitude = rng.gen_range(4.0..10.0);
            let f0 = rng.gen_range(0.02..0.05);
            let f1 = rng.gen_range(0.2..0.35);
            let phase = rng.gen_range(0.0..TAU);
            let t_len = frames as f64;
            (0..frames)
                .map(|t| {
                    let t = t as f64;
                    amplitude * (TAU * (f0 * t + (f1 - f0) * t * t / (2.0 * t_len)) + phase).sin()
                })
                .collect()
        }
    }
}
