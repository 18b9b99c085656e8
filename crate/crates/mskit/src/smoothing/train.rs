//! Training for the learnable smoothing regimes: full-batch gradient descent
//! on the mean squared error between the smoothed jittered signal and the
//! clean signal, over a synthetic dataset.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::features::{motion_features, FeatureMatrix};
use super::network::{AdaptiveSmoother, BnMode, SmootherGrads};
use super::synth::{gen_synthetic, SyntheticDatasetSpec, SyntheticPair};
use super::{FixedKernel, GlobalSmoother, SmoothingWeights};
use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::trajectory::LandmarkTrajectory;

/// Which learnable weight regime to train.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Regime {
    Global,
    Adaptive,
}

/// Optimization settings. Plain full-batch gradient descent: no optimizer
/// state, so runs are trivially deterministic.
#[derive(Debug, Clone, Copy)]
pub struct TrainConfig {
    pub lr: f64,
    pub epochs: usize,
    /// Seeds parameter initialization (the dataset has its own seed).
    pub seed: u64,
    /// Smoothing width K (odd).
    pub width: usize,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self { lr: 0.05, epochs: 500, seed: 0, width: 5 }
    }
}

/// A trained smoother of either regime.
#[derive(Debug, Clone, PartialEq)]
pub enum TrainedSmoother<T> {
    Global(GlobalSmoother<T>),
    Adaptive(AdaptiveSmoother<T>),
}

impl<T: Scalar> TrainedSmoother<T> {
    pub fn regime(&self) -> Regime {
        match self {
            TrainedSmoother::Global(_) => Regime::Global,
            TrainedSmoother::Adaptive(_) => Regime::Adaptive,
        }
    }

    pub fn width(&self) -> usize {
        match self {
            TrainedSmoother::Global(g) => g.width(),
            TrainedSmoother::Adaptive(a) => a.width(),
        }
    }

    /// Predicts the smoothing weights for a trajectory (inference mode).
    pub fn weights_for(&self, traj: &LandmarkTrajectory<T>) -> Result<SmoothingWeights<T>> {
        match self {
            TrainedSmoother::Global(g) => g.weights(traj.frames()),
            TrainedSmoother::Adaptive(net) => {
                let feats = motion_features(traj, None)?;
                let (w, _) = net.forward(&feats, BnMode::Eval)?;
                Ok(w)
            }
        }
    }
}

/// Training result: the model plus the per-epoch loss curve (entry 0 is the
/// initial loss, the last entry the loss after the final step).
#[derive(Debug, Clone)]
pub struct TrainOutcome<T> {
    pub smoother: TrainedSmoother<T>,
    pub loss_curve: Vec<f64>,
}

/// Sum of squared residuals of `smooth(jittered, w)` against `clean`, plus
/// the gradient of the (already scaled) loss with respect to each weight.
///
/// Weights must be normalized; the anchored form of the smoother is
/// differentiated, whose gradient differs from the raw weighted sum only
/// along the all-ones direction that the downstream softmax/renormalization
/// backward projects out.
fn seq_loss_and_weight_grad<T: Scalar>(
    pair: &SyntheticPair<T>,
    weights: &SmoothingWeights<T>,
    scale: f64,
) -> Result<(f64, Vec<T>)> {
    let x = &pair.jittered;
    let y = &pair.clean;
    let frames = x.frames();
    if y.frames() != frames || y.points() != x.points() {
        return Err(Error::InvalidParams("clean/jittered shape mismatch".into()));
    }
    if weights.frames() != frames {
        return Err(Error::InvalidParams(format!(
            "weights cover {} frames, sequence has {frames}",
            weights.frames()
        )));
    }
    let width = weights.width();
    let half = (width - 1) as isize / 2;
    let scale_t = T::of(scale);
    let mut sum_sq = 0.0;
    let mut grad = vec![T::zero(); frames * width];
    for t in 0..frames {
        for n in 0..x.points() {
            let base = x.point(t, n);
            let mut acc = base;
            for j in 0..width {
                let idx = (t as isize + j as isize - half).clamp(0, frames as isize - 1) as usize;
                let w = weights.get(t, j);
                let p = x.point(idx, n);
                acc[0] += w * (p[0] - base[0]);
                acc[1] += w * (p[1] - base[1]);
            }
            let target = y.point(t, n);
            let rx = acc[0] - target[0];
            let ry = acc[1] - target[1];
            sum_sq += (rx * rx + ry * ry).as_f64();
            for j in 0..width {
                let idx = (t as isize + j as isize - half).clamp(0, frames as isize - 1) as usize;
                let p = x.point(idx, n);
                grad[t * width + j] +=
                    scale_t * (rx * (p[0] - base[0]) + ry * (p[1] - base[1]));
            }
        }
    }
    Ok((sum_sq, grad))
}

fn batch_elements<T: Scalar>(pairs: &[SyntheticPair<T>]) -> usize {
    pairs.iter().map(|p| p.clean.coords().len() * 2).sum()
}

/// Full-batch loss and parameter gradients of the adaptive network on a
/// dataset, using training-mode batch statistics. The entry point for both
/// the training loop and finite-difference gradient checking.
pub fn adaptive_loss_and_grads<T: Scalar>(
    net: &AdaptiveSmoother<T>,
    features: &[&FeatureMatrix<T>],
    pairs: &[SyntheticPair<T>],
) -> Result<(f64, SmootherGrads<T>)> {
    let (weights, cache) = net.forward_batch(features, BnMode::Train)?;
    let total = batch_elements(pairs) as f64;
    let scale = 2.0 / total;
    let mut loss = 0.0;
    let mut d_weights = Vec::with_capacity(pairs.len());
    for (pair, w) in pairs.iter().zip(&weights) {
        let (sq, dw) = seq_loss_and_weight_grad(pair, w, scale)?;
        loss += sq;
        d_weights.push(dw);
    }
    loss /= total;
    let refs: Vec<&[T]> = d_weights.iter().map(|d| d.as_slice()).collect();
    let grads = net.backward_batch(&cache, &refs)?;
    Ok((loss, grads))
}

/// Full-batch loss of the adaptive network without gradients.
pub fn adaptive_loss<T: Scalar>(
    net: &AdaptiveSmoother<T>,
    features: &[&FeatureMatrix<T>],
    pairs: &[SyntheticPair<T>],
    mode: BnMode,
) -> Result<f64> {
    let (weights, _) = net.forward_batch(features, mode)?;
    let total = batch_elements(pairs) as f64;
    let mut loss = 0.0;
    for (pair, w) in pairs.iter().zip(&weights) {
        let (sq, _) = seq_loss_and_weight_grad(pair, w, 0.0)?;
        loss += sq;
    }
    Ok(loss / total)
}

/// Trains the chosen regime on the synthetic dataset. Deterministic for a
/// given spec and config.
pub fn train_smoother<T: Scalar>(
    regime: Regime,
    spec: &SyntheticDatasetSpec,
    config: &TrainConfig,
) -> Result<TrainOutcome<T>> {
    if !(config.lr >= 0.0) {
        return Err(Error::InvalidParams(format!("learning rate must be >= 0, got {}", config.lr)));
    }
    let pairs: Vec<SyntheticPair<T>> = gen_synthetic(spec)?;
    if config.width > 2 * spec.frames - 1 {
        return Err(Error::InvalidParams(format!(
            "smoothing width {} exceeds 2T-1 for T = {}",
            config.width, spec.frames
        )));
    }
    match regime {
        Regime::Global => train_global_on_pairs(&pairs, config),
        Regime::Adaptive => train_adaptive_on_pairs(&pairs, config),
    }
}

fn check_divergence(loss: f64, epoch: usize) -> Result<f64> {
    if !loss.is_finite() {
        return Err(Error::Compute(format!(
            "training diverged at epoch {epoch}: loss = {loss}; lower the learning rate"
        )));
    }
    Ok(loss)
}

/// Trains the global regime on explicit (clean, jittered) pairs.
pub fn train_global_on_pairs<T: Scalar>(
    pairs: &[SyntheticPair<T>],
    config: &TrainConfig,
) -> Result<TrainOutcome<T>> {
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let logits: Vec<T> = (0..config.width).map(|_| T::of(rng.gen_range(-1.0..1.0))).collect();
    let mut smoother = GlobalSmoother::from_logits(logits)?;
    let frames = pairs[0].clean.frames();
    let total = batch_elements(pairs) as f64;
    let scale = 2.0 / total;
    let width = config.width;
    let lr = T::of(config.lr);

    let mut curve = Vec::with_capacity(config.epochs + 1);
    for epoch in 0..=config.epochs {
        let weights = smoother.weights(frames)?;
        let mut loss = 0.0;
        let mut row_grad = vec![T::zero(); width];
        for pair in pairs {
            let (sq, dw) = seq_loss_and_weight_grad(pair, &weights, scale)?;
            loss += sq;
            for t in 0..frames {
                for j in 0..width {
                    row_grad[j] += dw[t * width + j];
                }
            }
        }
        loss /= total;
        curve.push(check_divergence(loss, epoch)?);
        if epoch == config.epochs {
            break;
        }
        // Softmax backward: dlogit_i = w_i (g_i - sum_j w_j g_j).
        let row = smoother.row();
        let mut dot = T::zero();
        for j in 0..width {
            dot += row[j] * row_grad[j];
        }
        if config.lr != 0.0 {
            for (l, (w, g)) in
                smoother.logits_mut().iter_mut().zip(row.iter().zip(&row_grad))
            {
                *l = *l - lr * *w * (*g - dot);
            }
        }
    }
    Ok(TrainOutcome { smoother: TrainedSmoother::Global(smoother), loss_curve: curve })
}

/// Trains the adaptive regime on explicit (clean, jittered) pairs.
pub fn train_adaptive_on_pairs<T: Scalar>(
    pairs: &[SyntheticPair<T>],
    config: &TrainConfig,
) -> Result<TrainOutcome<T>> {
    let features: Vec<FeatureMatrix<T>> =
        pairs.iter().map(|p| motion_features(&p.jittered, None)).collect::<Result<_>>()?;
    let feat_refs: Vec<&FeatureMatrix<T>> = features.iter().collect();
    let mut net = AdaptiveSmoother::<T>::new(super::features::FEATURE_CHANNELS, config.width, config.seed)?;
    let total = batch_elements(pairs) as f64;
    let scale = 2.0 / total;
    let lr = T::of(config.lr);

    let mut curve = Vec::with_capacity(config.epochs + 1);
    for epoch in 0..=config.epochs {
        let (weights, cache) = net.forward_batch(&feat_refs, BnMode::Train)?;
        let mut loss = 0.0;
        let mut d_weights = Vec::with_capacity(pairs.len());
        for (pair, w) in pairs.iter().zip(&weights) {
            let (sq, dw) = seq_loss_and_weight_grad(pair, w, scale)?;
            loss += sq;
            d_weights.push(dw);
        }
        loss /= total;
        curve.push(check_divergence(loss, epoch)?);
        if epoch == config.epochs {
            break;
        }
        let refs: Vec<&[T]> = d_weights.iter().map(|d| d.as_slice()).collect();
        let grads = net.backward_batch(&cache, &refs)?;
        net.update_running_stats(&cache)?;
        if config.lr != 0.0 {
            let mut params = net.params_flat();
            for (p, g) in params.iter_mut().zip(&grads.data) {
                *p = *p - lr * *g;
            }
            net.set_params_flat(&params)?;
        }
    }
    Ok(TrainOutcome { smoother: TrainedSmoother::Adaptive(net), loss_curve: curve })
}

/// Held-out mean squared error of a trained smoother (inference mode).
pub fn evaluate_smoother_mse<T: Scalar>(
    smoother: &TrainedSmoother<T>,
    pairs: &[SyntheticPair<T>],
) -> Result<f64> {
    let mut sum = 0.0;
    for pair in pairs {
        let w = smoother.weights_for(&pair.jittered)?;
        let (sq, _) = seq_loss_and_weight_grad(pair, &w, 0.0)?;
        sum += sq;
    }
    Ok(sum / batch_elements(pairs) as f64)
}

/// Held-out mean squared error of a fixed kernel.
pub fn evaluate_fixed_mse<T: Scalar>(
    kind: FixedKernel,
    width: usize,
    pairs: &[SyntheticPair<T>],
) -> Result<f64> {
    let mut sum = 0.0;
    for pair in pairs {
        let w = super::fixed_weights(kind, width, pair.jittered.frames())?;
        let (sq, _) = seq_loss_and_weight_grad(pair, &w, 0.0)?;
        sum += sq;
    }
    Ok(sum / batch_elements(pairs) as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::smoothing::synth::{FamilyMix, JitterMix};

    fn tiny_spec() -> SyntheticDatasetSpec {
        SyntheticDatasetSpec {
            num_sequences: 12,
            frames: 32,
            points: 2,
            seed: 3,
            families: FamilyMix { slow: 0.5, fast: 0.5, chirp: 0.0 },
            jitter_std: [0.5, 1.0],
            jitter_mix: JitterMix { white: 1.0, impulse: 0.0, step: 0.0 },
        }
    }

    #[test]
    fn zero_learning_rate_leaves_parameters_untouched() {
        let spec = tiny_spec();
        for regime in [Regime::Global, Regime::Adaptive] {
            let init = TrainConfig { lr: 0.0, epochs: 0, seed: 7, width: 3 };
            let trained = TrainConfig { lr: 0.0, epochs: 5, ..init };
            let a = train_smoother::<f64>(regime, &spec, &init).unwrap();
            let b = train_smoother::<f64>(regime, &spec, &trained).unwrap();
            match (&a.smoother, &b.smoother) {
                (TrainedSmoother::Global(x), TrainedSmoother::Global(y)) => {
                    assert_eq!(x.logits(), y.logits())
                }
                (TrainedSmoother::Adaptive(x), TrainedSmoother::Adaptive(y)) => {
                    assert_eq!(x.params_flat(), y.params_flat())
                }
                _ => unreachable!(),
            }
        }
    }

    #[test]
    fn training_is_deterministic() {
        let spec = tiny_spec();
        let config = TrainConfig { lr: 0.02, epochs: 20, seed: 1, width: 3 };
        let a = train_smoother::<f64>(Regime::Adaptive, &spec, &config).unwrap();
        let b = train_smoother::<f64>(Regime::Adaptive, &spec, &config).unwrap();
        match (&a.smoother, &b.smoother) {
            (TrainedSmoother::Adaptive(x), TrainedSmoother::Adaptive(y)) => {
                assert_eq!(x.params_flat(), y.params_flat());
                assert_eq!(x.state_flat(), y.state_flat());
            }
            _ => unreachable!(),
        }
        assert_eq!(a.loss_curve, b.loss_curve);
    }

    #[test]
    fn global_training_reduces_loss() {
        let spec = SyntheticDatasetSpec {
            num_sequences: 20,
            frames: 48,
            families: FamilyMix { slow: 1.0, fast: 0.0, chirp: 0.0 },
            jitter_std: [0.8, 0.8],
            ..tiny_spec()
        };
        let config = TrainConfig { lr: 1.0, epochs: 200, seed: 2, width: 3 };
        let out = train_smoother::<f64>(Regime::Global, &spec, &config).unwrap();
        let first = out.loss_curve.first().unwrap();
        let last = out.loss_curve.last().unwrap();
        assert!(last < first, "loss did not drop: {first} -> {last}");
    }
}
