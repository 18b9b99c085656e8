//! The adaptive weight-estimation network: five 1-D convolutions over the
//! time axis (kernel 3, zero padding), batch norm and ReLU between them, a
//! sigmoid head, and per-frame row renormalization. Forward and backward are
//! written out by hand so training has no framework dependency and gradients
//! can be checked against finite differences.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::features::FeatureMatrix;
use super::SmoothingWeights;
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Convolution kernel size of every layer.
pub const KERNEL: usize = 3;

/// Hidden channel plan between the input and the K-channel head.
pub const HIDDEN_CHANNELS: [usize; 4] = [32, 32, 16, 16];

const BN_EPS: f64 = 1e-5;
const BN_MOMENTUM: f64 = 0.1;

/// Whether batch norm uses batch statistics (training) or running statistics
/// (inference).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BnMode {
    Train,
    Eval,
}

#[derive(Debug, Clone, PartialEq)]
struct Conv1d<T> {
    in_ch: usize,
    out_ch: usize,
    /// `[out][in][k]`, row-major.
    weight: Vec<T>,
    bias: Vec<T>,
}

impl<T: Scalar> Conv1d<T> {
    fn init(in_ch: usize, out_ch: usize, rng: &mut ChaCha8Rng) -> Self {
        let bound = 1.0 / ((in_ch * KERNEL) as f64).sqrt();
        let weight = (0..out_ch * in_ch * KERNEL)
            .map(|_| T::of(rng.gen_range(-bound..bound)))
            .collect();
        Self { in_ch, out_ch, weight, bias: vec![T::zero(); out_ch] }
    }

    fn param_count(&self) -> usize {
        self.weight.len() + self.bias.len()
    }
}

#[derive(Debug, Clone, PartialEq)]
struct BatchNorm<T> {
    channels: usize,
    gamma: Vec<T>,
    beta: Vec<T>,
    running_mean: Vec<T>,
    running_var: Vec<T>,
}

impl<T: Scalar> BatchNorm<T> {
    fn new(channels: usize) -> Self {
        Self {
            channels,
            gamma: vec![T::one(); channels],
            beta: vec![T::zero(); channels],
            running_mean: vec![T::zero(); channels],
            running_var: vec![T::one(); channels],
        }
    }

    fn param_count(&self) -> usize {
        2 * self.channels
    }
}

/// Activations for a batch: `[seq][channel][frame]`.
#[derive(Debug, Clone)]
struct Planes<T> {
    seqs: usize,
    channels: usize,
    frames: usize,
    data: Vec<T>,
}

impl<T: Scalar> Planes<T> {
    fn zeros(seqs: usize, channels: usize, frames: usize) -> Self {
        Self { seqs, channels, frames, data: vec![T::zero(); seqs * channels * frames] }
    }

    #[inline]
    fn idx(&self, seq: usize, ch: usize, t: usize) -> usize {
        (seq * self.channels + ch) * self.frames + t
    }

    #[inline]
    fn get(&self, seq: usize, ch: usize, t: usize) -> T {
        self.data[self.idx(seq, ch, t)]
    }

    #[inline]
    fn set(&mut self, seq: usize, ch: usize, t: usize, v: T) {
        let i = self.idx(seq, ch, t);
        self.data[i] = v;
    }
}

#[derive(Debug, Clone)]
struct BnCache<T> {
    mean: Vec<T>,
    var: Vec<T>,
    xhat: Planes<T>,
}

/// Everything the backward pass needs from a forward pass.
#[derive(Debug, Clone)]
pub struct ForwardCache<T> {
    mode: BnMode,
    /// Inputs to each of the five convolutions.
    inputs: Vec<Planes<T>>,
    bn: Vec<BnCache<T>>,
    /// Sigmoid outputs of the head, `[seq][k][frame]`.
    sigmoid: Planes<T>,
    /// Per-frame sums of the sigmoid outputs, `[seq][frame]`.
    row_sums: Vec<Vec<T>>,
    /// The renormalized weight rows, as returned to the caller.
    weights: Vec<SmoothingWeights<T>>,
}

impl<T> ForwardCache<T> {
    pub fn mode(&self) -> BnMode {
        self.mode
    }
}

/// Gradients of every learnable parameter, laid out like
/// [`AdaptiveSmoother::params_flat`].
#[derive(Debug, Clone, PartialEq)]
pub struct SmootherGrads<T> {
    pub data: Vec<T>,
}

/// The adaptive smoothing network.
#[derive(Debug, Clone, PartialEq)]
pub struct AdaptiveSmoother<T> {
    convs: Vec<Conv1d<T>>,
    bns: Vec<BatchNorm<T>>,
    width: usize,
    c_in: usize,
}

impl<T: Scalar> AdaptiveSmoother<T> {
    /// Builds a freshly initialized network for `c_in` input channels and
    /// smoothing width `width` (odd). Convolution weights are uniform in
    /// +/- 1/sqrt(fan_in), biases zero, batch norm gamma 1 / beta 0.
    pub fn new(c_in: usize, width: usize, seed: u64) -> Result<Self> {
        if width == 0 || width % 2 == 0 {
            return Err(Error::InvalidParams(format!("K must be odd and >= 1, got {width}")));
        }
        if c_in == 0 {
            return Err(Error::InvalidParams("c_in must be >= 1".into()));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let plan = [
            (c_in, HIDDEN_CHANNELS[0]),
            (HIDDEN_CHANNELS[0], HIDDEN_CHANNELS[1]),
            (HIDDEN_CHANNELS[1], HIDDEN_CHANNELS[2]),
            (HIDDEN_CHANNELS[2], HIDDEN_CHANNELS[3]),
            (HIDDEN_CHANNELS[3], width),
        ];
        let convs: Vec<Conv1d<T>> =
            plan.iter().map(|&(i, o)| Conv1d::init(i, o, &mut rng)).collect();
        let bns = HIDDEN_CHANNELS.iter().map(|&c| BatchNorm::new(c)).collect();
        Ok(Self { convs, bns, width, c_in })
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn input_channels(&self) -> usize {
        self.c_in
    }

    /// Number of learnable parameters (convolution weights and biases plus
    /// batch norm scale and shift).
    pub fn param_count(&self) -> usize {
        self.convs.iter().map(Conv1d::param_count).sum::<usize>()
            + self.bns.iter().map(BatchNorm::param_count).sum::<usize>()
    }

    /// Flattens the learnable parameters in layer order: for each block,
    /// conv weight, conv bias, then (where present) bn gamma, bn beta.
    pub fn params_flat(&self) -> Vec<T> {
        let mut out = Vec::with_capacity(self.param_count());
        for i in 0..self.convs.len() {
            out.extend_from_slice(&self.convs[i].weight);
            out.extend_from_slice(&self.convs[i].bias);
            if i < self.bns.len() {
                out.extend_from_slice(&self.bns[i].gamma);
                out.extend_from_slice(&self.bns[i].beta);
            }
        }
        out
    }

    pub fn set_params_flat(&mut self, flat: &[T]) -> Result<()> {
        if flat.len() != self.param_count() {
            return Err(Error::InvalidParams(format!(
                "expected {} parameters, got {}",
                self.param_count(),
                flat.len()
            )));
        }
        let mut pos = 0;
        let mut take = |dst: &mut Vec<T>| {
            let len = dst.len();
            dst.copy_from_slice(&flat[pos..pos + len]);
            pos += len;
        };
        for i in 0..self.convs.len() {
            take(&mut self.convs[i].weight);
            take(&mut self.convs[i].bias);
            if i < self.bns.len() {
                take(&mut self.bns[i].gamma);
                take(&mut self.bns[i].beta);
            }
        }
        Ok(())
    }

    /// Batch norm running statistics (mean then variance per block), the
    /// non-learnable state needed for inference.
    pub fn state_flat(&self) -> Vec<T> {
        let mut out = Vec::new();
        for bn in &self.bns {
            out.extend_from_slice(&bn.running_mean);
            out.extend_from_slice(&bn.running_var);
        }
        out
    }

    pub fn set_state_flat(&mut self, flat: &[T]) -> Result<()> {
        let expected: usize = self.bns.iter().map(|b| 2 * b.channels).sum();
        if flat.len() != expected {
            return Err(Error::InvalidParams(format!(
                "expected {expected} state values, got {}",
                flat.len()
            )));
        }
        let mut pos = 0;
        for bn in &mut self.bns {
            bn.running_mean.copy_from_slice(&flat[pos..pos + bn.channels]);
            pos += bn.channels;
            bn.running_var.copy_from_slice(&flat[pos..pos + bn.channels]);
            pos += bn.channels;
        }
        Ok(())
    }

    /// Runs the network over a batch of feature matrices (all the same
    /// length; batch norm pools statistics over sequences and time in
    /// training mode). Returns one weight matrix per sequence plus the
    /// cache for [`Self::backward_batch`].
    pub fn forward_batch(
        &self,
        features: &[&FeatureMatrix<T>],
        mode: BnMode,
    ) -> Result<(Vec<SmoothingWeights<T>>, ForwardCache<T>)> {
        if features.is_empty() {
            return Err(Error::InvalidParams("empty batch".into()));
        }
        let frames = features[0].frames();
        for f in features {
            if f.channels() != self.c_in {
                return Err(Error::InvalidParams(format!(
                    "feature matrix has {} channels, network expects {}",
                    f.channels(),
                    self.c_in
                )));
            }
            if f.frames() != frames {
                return Err(Error::InvalidParams(
                    "all sequences in a batch must have the same length".into(),
                ));
            }
        }
        let seqs = features.len();
        let mut x = Planes::zeros(seqs, self.c_in, frames);
        for (s, f) in features.iter().enumerate() {
            for c in 0..self.c_in {
                for t in 0..frames {
                    x.set(s, c, t, f.get(c, t));
                }
            }
        }

        let mut inputs = Vec::with_capacity(5);
        let mut bn_caches = Vec::with_capacity(4);
        for i in 0..4 {
            let z = conv_forward(&self.convs[i], &x);
            inputs.push(x);
            let (mut h, cache) = bn_forward(&self.bns[i], z, mode);
            relu_inplace(&mut h);
            bn_caches.push(cache);
            x = h;
        }
        let z5 = conv_forward(&self.convs[4], &x);
        inputs.push(x);

        let mut sigmoid = z5;
        for v in sigmoid.data.iter_mut() {
            *v = T::one() / (T::one() + (-*v).exp());
        }

        let mut row_sums = Vec::with_capacity(seqs);
        let mut weights = Vec::with_capacity(seqs);
        for s in 0..seqs {
            let mut sums = Vec::with_capacity(frames);
            let mut data = Vec::with_capacity(frames * self.width);
            for t in 0..frames {
                let mut sum = T::zero();
                for k in 0..self.width {
                    sum += sigmoid.get(s, k, t);
                }
                sums.push(sum);
                for k in 0..self.width {
                    data.push(sigmoid.get(s, k, t) / sum);
                }
            }
            weights.push(SmoothingWeights::new(frames, self.width, data, true)?);
            row_sums.push(sums);
        }

        let cache = ForwardCache {
            mode,
            inputs,
            bn: bn_caches,
            sigmoid,
            row_sums,
            weights: weights.clone(),
        };
        Ok((weights, cache))
    }

    /// Single-sequence convenience wrapper.
    pub fn forward(
        &self,
        features: &FeatureMatrix<T>,
        mode: BnMode,
    ) -> Result<(SmoothingWeights<T>, ForwardCache<T>)> {
        let (mut w, cache) = self.forward_batch(&[features], mode)?;
        Ok((w.pop().unwrap(), cache))
    }

    /// Folds a training-mode forward's batch statistics into the running
    /// statistics (momentum 0.1).
    pub fn update_running_stats(&mut self, cache: &ForwardCache<T>) -> Result<()> {
        if cache.mode != BnMode::Train {
            return Err(Error::InvalidParams(
                "running statistics only update from a training-mode forward".into(),
            ));
        }
        let m = T::of(BN_MOMENTUM);
        let keep = T::one() - m;
        for (bn, c) in self.bns.iter_mut().zip(&cache.bn) {
            for ch in 0..bn.channels {
                bn.running_mean[ch] = keep * bn.running_mean[ch] + m * c.mean[ch];
                bn.running_var[ch] = keep * bn.running_var[ch] + m * c.var[ch];
            }
        }
        Ok(())
    }

    /// Backpropagates a gradient with respect to the renormalized weight
    /// rows (one `frames x width` row-major slice per sequence) through the
    /// whole network, returning gradients for every learnable parameter.
    pub fn backward_batch(
        &self,
        cache: &ForwardCache<T>,
        d_weights: &[&[T]],
    ) -> Result<SmootherGrads<T>> {
        if cache.mode != BnMode::Train {
            return Err(Error::InvalidParams(
                "backward requires a training-mode forward pass".into(),
            ));
        }
        let seqs = cache.sigmoid.seqs;
        let frames = cache.sigmoid.frames;
        if d_weights.len() != seqs {
            return Err(Error::InvalidParams(format!(
                "gradient for {} sequences, cache holds {seqs}",
                d_weights.len()
            )));
        }
        for d in d_weights {
            if d.len() != frames * self.width {
                return Err(Error::InvalidParams(format!(
                    "weight gradient length {} does not match {frames} x {}",
                    d.len(),
                    self.width
                )));
            }
        }

        // Renormalization backward: w = s / sum, so
        // dL/ds_k = (dL/dw_k - sum_j dL/dw_j w_j) / sum.
        let mut ds = Planes::zeros(seqs, self.width, frames);
        for s in 0..seqs {
            let w = &cache.weights[s];
            for t in 0..frames {
                let mut dot = T::zero();
                for k in 0..self.width {
                    dot += d_weights[s][t * self.width + k] * w.get(t, k);
                }
                let sum = cache.row_sums[s][t];
                for k in 0..self.width {
                    let dw = d_weights[s][t * self.width + k];
                    ds.set(s, k, t, (dw - dot) / sum);
                }
            }
        }

        // Sigmoid backward: dz = ds * s * (1 - s).
        let mut dz = ds;
        for (d, &s) in dz.data.iter_mut().zip(&cache.sigmoid.data) {
            *d = *d * s * (T::one() - s);
        }

        let mut grads: Vec<(Vec<T>, Vec<T>, Option<(Vec<T>, Vec<T>)>)> = Vec::with_capacity(5);

        let (dw5, db5, mut dx) = conv_backward(&self.convs[4], &cache.inputs[4], &dz);
        grads.push((dw5, db5, None));

        for i in (0..4).rev() {
            // ReLU backward: the input to the next conv is the ReLU output.
            let post = &cache.inputs[i + 1];
            for (d, &y) in dx.data.iter_mut().zip(&post.data) {
                if y <= T::zero() {
                    *d = T::zero();
                }
            }
            let (dgamma, dbeta, dz) = bn_backward(&self.bns[i], &cache.bn[i], &dx);
            let (dw, db, dx_prev) = conv_backward(&self.convs[i], &cache.inputs[i], &dz);
            grads.push((dw, db, Some((dgamma, dbeta))));
            dx = dx_prev;
        }
        grads.reverse();

        let mut flat = Vec::with_capacity(self.param_count());
        for (dw, db, bn) in grads {
            flat.extend(dw);
            flat.extend(db);
            if let Some((dgamma, dbeta)) = bn {
                flat.extend(dgamma);
                flat.extend(dbeta);
            }
        }
        Ok(SmootherGrads { data: flat })
    }
}

fn conv_forward<T: Scalar>(conv: &Conv1d<T>, x: &Planes<T>) -> Planes<T> {
    debug_assert_eq!(conv.in_ch, x.channels);
    let mut out = Planes::zeros(x.seqs, conv.out_ch, x.frames);
    let frames = x.frames as isize;
    for s in 0..x.seqs {
        for o in 0..conv.out_ch {
            for t in 0..x.frames {
                let mut acc = conv.bias[o];
                for i in 0..conv.in_ch {
                    let wbase = (o * conv.in_ch + i) * KERNEL;
                    for k in 0..KERNEL {
                        let src = t as isize + k as isize - 1;
                        if src >= 0 && src < frames {
                            acc += conv.weight[wbase + k] * x.get(s, i, src as usize);
                        }
                    }
                }
                out.set(s, o, t, acc);
            }
        }
    }
    out
}

fn conv_backward<T: Scalar>(
    conv: &Conv1d<T>,
    x: &Planes<T>,
    dy: &Planes<T>,
) -> (Vec<T>, Vec<T>, Planes<T>) {
    let mut dw = vec![T::zero(); conv.weight.len()];
    let mut db = vec![T::zero(); conv.bias.len()];
    let mut dx = Planes::zeros(x.seqs, x.channels, x.frames);
    let frames = x.frames as isize;
    for s in 0..x.seqs {
        for o in 0..conv.out_ch {
            for t in 0..x.frames {
                let g = dy.get(s, o, t);
                db[o] += g;
                for i in 0..conv.in_ch {
                    let wbase = (o * conv.in_ch + i) * KERNEL;
                    for k in 0..KERNEL {
                        let src = t as isize + k as isize - 1;
                        if src >= 0 && src < frames {
                            dw[wbase + k] += g * x.get(s, i, src as usize);
                            let di = dx.idx(s, i, src as usize);
                            dx.data[di] += conv.weight[wbase + k] * g;
                        }
                    }
                }
            }
        }
    }
    (dw, db, dx)
}

fn bn_forward<T: Scalar>(
    bn: &BatchNorm<T>,
    z: Planes<T>,
    mode: BnMode,
) -> (Planes<T>, BnCache<T>) {
    let m = T::from_usize(z.seqs * z.frames).unwrap();
    let eps = T::of(BN_EPS);
    let mut mean = vec![T::zero(); bn.channels];
    let mut var = vec![T::zero(); bn.channels];
    match mode {
        BnMode::Train => {
            for c in 0..bn.channels {
                let mut sum = T::zero();
                for s in 0..z.seqs {
                    for t in 0..z.frames {
                        sum += z.get(s, c, t);
                    }
                }
                mean[c] = sum / m;
                let mut ss = T::zero();
                for s in 0..z.seqs {
                    for t in 0..z.frames {
                        let d = z.get(s, c, t) - mean[c];
                        ss += d * d;
                    }
                }
                var[c] = ss / m;
            }
        }
        BnMode::Eval => {
            mean.copy_from_slice(&bn.running_mean);
            var.copy_from_slice(&bn.running_var);
        }
    }

    let mut xhat = z;
    let mut out = Planes::zeros(xhat.seqs, xhat.channels, xhat.frames);
    for c in 0..bn.channels {
        let inv_std = (var[c] + eps).sqrt().recip();
        for s in 0..xhat.seqs {
            for t in 0..xhat.frames {
                let i = xhat.idx(s, c, t);
                let h = (xhat.data[i] - mean[c]) * inv_std;
                xhat.data[i] = h;
                out.data[i] = bn.gamma[c] * h + bn.beta[c];
            }
        }
    }
    (out, BnCache { mean, var, xhat })
}

fn bn_backward<T: Scalar>(
    bn: &BatchNorm<T>,
    cache: &BnCache<T>,
    dy: &Planes<T>,
) -> (Vec<T>, Vec<T>, Planes<T>) {
    let m = T::from_usize(dy.seqs * dy.frames).unwrap();
    let eps = T::of(BN_EPS);
    let mut dgamma = vec![T::zero(); bn.channels];
    let mut dbeta = vec![T::zero(); bn.channels];
    let mut dx = Planes::zeros(dy.seqs, dy.channels, dy.frames);
    for c in 0..bn.channels {
        let mut sum_dy = T::zero();
        let mut sum_dy_xhat = T::zero();
        for s in 0..dy.seqs {
            for t in 0..dy.frames {
                let g = dy.get(s, c, t);
                sum_dy += g;
                sum_dy_xhat += g * cache.xhat.get(s, c, t);
            }
        }
        dgamma[c] = sum_dy_xhat;
        dbeta[c] = sum_dy;
        let inv_std = (cache.var[c] + eps).sqrt().recip();
        let scale = bn.gamma[c] * inv_std;
        let mean_dy = sum_dy / m;
        let mean_dy_xhat = sum_dy_xhat / m;
        for s in 0..dy.seqs {
            for t in 0..dy.frames {
                let g = dy.get(s, c, t) - mean_dy - cache.xhat.get(s, c, t) * mean_dy_xhat;
                dx.set(s, c, t, scale * g);
            }
        }
    }
    (dgamma, dbeta, dx)
}

fn relu_inplace<T: Scalar>(p: &mut Planes<T>) {
    for v in p.data.iter_mut() {
        if *v < T::zero() {
            *v = T::zero();
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn zero_features(frames: usize) -> FeatureMatrix<f64> {
        FeatureMatrix::new(frames, 4, vec![0.0; frames * 4]).unwrap()
    }

    fn random_features(frames: usize, seed: u64) -> FeatureMatrix<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let data = (0..frames * 4).map(|_| rng.gen_range(-2.0..2.0)).collect();
        FeatureMatrix::new(frames, 4, data).unwrap()
    }

    #[test]
    fn parameter_count_matches_hand_tally() {
        // conv: out*in*3 + out; bn: 2*channels
        let net = AdaptiveSmoother::<f64>::new(4, 5, 0).unwrap();
        let expected = (4 * 32 * 3 + 32)
            + (32 * 32 * 3 + 32)
            + (32 * 16 * 3 + 16)
            + (16 * 16 * 3 + 16)
            + (16 * 5 * 3 + 5)
            + 2 * (32 + 32 + 16 + 16);
        assert_eq!(net.param_count(), expected);
        assert_eq!(expected, 6293);
        assert_eq!(net.params_flat().len(), expected);
    }

    #[test]
    fn zero_input_fresh_network_yields_uniform_rows() {
        let net = AdaptiveSmoother::<f64>::new(4, 5, 123).unwrap();
        for mode in [BnMode::Train, BnMode::Eval] {
            let (w, _) = net.forward(&zero_features(11), mode).unwrap();
            for t in 0..11 {
                for k in 0..5 {
                    assert_eq!(w.get(t, k), 1.0 / 5.0);
                }
            }
        }
    }

    #[test]
    fn output_shape_is_frames_by_width() {
        let net = AdaptiveSmoother::<f64>::new(4, 5, 9).unwrap();
        let (w, _) = net.forward(&random_features(100, 5), BnMode::Eval).unwrap();
        assert_eq!((w.frames(), w.width()), (100, 5));
    }

    #[test]
    fn receptive_field_is_five_frames_each_side() {
        let net = AdaptiveSmoother::<f64>::new(4, 3, 21).unwrap();
        let frames = 40;
        let base = random_features(frames, 77);
        let mut bumped = base.clone();
        let t_hit = 20;
        bumped.set(2, t_hit, bumped.get(2, t_hit) + 1.0);
        let (wa, _) = net.forward(&base, BnMode::Eval).unwrap();
        let (wb, _) = net.forward(&bumped, BnMode::Eval).unwrap();
        for t in 0..frames {
            let identical = wa.row(t) == wb.row(t);
            if (t as isize - t_hit as isize).unsigned_abs() > 5 {
                assert!(identical, "row {t} outside the receptive field changed");
            }
        }
        // the perturbed frame itself must respond
        assert_ne!(wa.row(t_hit), wb.row(t_hit));
    }

    #[test]
    fn zero_upstream_gradient_gives_exactly_zero_grads() {
        let net = AdaptiveSmoother::<f64>::new(4, 3, 3).unwrap();
        let f = random_features(12, 8);
        let (_, cache) = net.forward(&f, BnMode::Train).unwrap();
        let zeros = vec![0.0; 12 * 3];
        let g = net.backward_batch(&cache, &[&zeros]).unwrap();
        assert!(g.data.iter().all(|&x| x == 0.0));
    }

    #[test]
    fn backward_rejects_eval_cache() {
        let net = AdaptiveSmoother::<f64>::new(4, 3, 3).unwrap();
        let f = random_features(12, 8);
        let (_, cache) = net.forward(&f, BnMode::Eval).unwrap();
        let zeros = vec![0.0; 12 * 3];
        assert!(net.backward_batch(&cache, &[&zeros]).is_err());
    }

    #[test]
    fn dead_relu_channel_has_zero_beta_gradient() {
        let mut net = AdaptiveSmoother::<f64>::new(4, 3, 5).unwrap();
        // Kill channel 0 of block 1: gamma = 0 and beta < 0 keeps the channel
        // at a negative constant, so ReLU clamps it and its derivative is 0.
        let mut params = net.params_flat();
        let conv1_len = 4 * 32 * 3 + 32;
        let gamma0 = conv1_len;
        let beta0 = conv1_len + 32;
        params[gamma0] = 0.0;
        params[beta0] = -1.0;
        net.set_params_flat(&params).unwrap();

        let f = random_features(16, 4);
        let (_, cache) = net.forward(&f, BnMode::Train).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let upstream: Vec<f64> = (0..16 * 3).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let g = net.backward_batch(&cache, &[&upstream]).unwrap();
        assert_eq!(g.data[beta0], 0.0);
        assert_eq!(g.data[gamma0], 0.0);
    }

    #[test]
    fn params_flat_round_trips() {
        let net = AdaptiveSmoother::<f64>::new(4, 5, 11).unwrap();
        let mut other = AdaptiveSmoother::<f64>::new(4, 5, 99).unwrap();
        other.set_params_flat(&net.params_flat()).unwrap();
        other.set_state_flat(&net.state_flat()).unwrap();
        assert_eq!(net, other);
    }
}
