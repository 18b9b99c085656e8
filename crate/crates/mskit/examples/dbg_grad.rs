// tuning probe for the adaptive-beats-fixed and global-sanity criteria
use mskit::smoothing::{
    evaluate_fixed_mse, evaluate_smoother_mse, gen_synthetic, inject_jitter,
    train_adaptive_on_pairs, train_global_on_pairs, FamilyMix, FixedKernel, JitterKind,
    JitterMix, SyntheticDatasetSpec, SyntheticPair, TrainConfig, TrainedSmoother,
};
use mskit::trajectory::LandmarkTrajectory;

fn main() {
    let t0 = std::time::Instant::now();
    // ---- criterion 6 ----
    let train_spec = SyntheticDatasetSpec {
        num_sequences: 64,
        frames: 64,
        points: 2,
        seed: 0,
        families: FamilyMix { slow: 0.5, fast: 0.5, chirp: 0.0 },
        jitter_std: [0.4, 0.9],
        jitter_mix: JitterMix { white: 1.0, impulse: 0.0, step: 0.0 },
    };
    let heldout_spec = SyntheticDatasetSpec { num_sequences: 48, seed: 1000, ..train_spec.clone() };
    let train_pairs = gen_synthetic::<f64>(&train_spec).unwrap();
    let heldout = gen_synthetic::<f64>(&heldout_spec).unwrap();

    let config = TrainConfig { lr: 0.05, epochs: 1500, seed: 0, width: 5 };
    let out = train_adaptive_on_pairs(&train_pairs, &config).unwrap();
    println!("train loss: {:.6} -> {:.6} ({} epochs) [{:?}]",
        out.loss_curve[0], out.loss_curve.last().unwrap(), config.epochs, t0.elapsed());

    let adaptive_mse = evaluate_smoother_mse(&out.smoother, &heldout).unwrap();
    println!("heldout adaptive mse: {adaptive_mse:.6}");
    for sigma in [0.5, 1.0, 2.0, 4.0] {
        let mse = evaluate_fixed_mse(FixedKernel::Gaussian { sigma }, 5, &heldout).unwrap();
        println!("heldout gaussian({sigma}) mse: {mse:.6}");
    }

    // over-smoothing check: pure fast, zero jitter
    let fast_spec = SyntheticDatasetSpec {
        num_sequences: 16, seed: 2000,
        families: FamilyMix { slow: 0.0, fast: 1.0, chirp: 0.0 },
        jitter_std: [0.0, 0.0],
        ..train_spec.clone()
    };
    let fast_pairs = gen_synthetic::<f64>(&fast_spec).unwrap();
    let a = evaluate_smoother_mse(&out.smoother, &fast_pairs).unwrap();
    let g4 = evaluate_fixed_mse(FixedKernel::Gaussian { sigma: 4.0 }, 5, &fast_pairs).unwrap();
    println!("pure-fast clean: adaptive {a:.6} vs gaussian4 {g4:.6}");
    println!("criterion6 total elapsed: {:?}", t0.elapsed());

    // ---- criterion 7 ----
    let t1 = std::time::Instant::now();
    let mut pairs = Vec::new();
    for i in 0..40u64 {
        let clean = LandmarkTrajectory::constant(96, &[[10.0 + i as f64, -3.0]], 25.0).unwrap();
        let jittered = inject_jitter(&clean, &JitterKind::White { sigma: 1.0 }, 5000 + i).unwrap();
        pairs.push(SyntheticPair { clean, jittered });
    }
    let config7 = TrainConfig { lr: 1.0, epochs: 400, seed: 0, width: 3 };
    let out7 = train_global_on_pairs(&pairs, &config7).unwrap();
    if let TrainedSmoother::Global(g) = &out7.smoother {
        let row = g.row();
        let dev = row.iter().map(|w| (w - 1.0 / 3.0).abs()).fold(0.0f64, f64::max);
        println!("global row {:?} max deviation {dev:.4} [{:?}]", row, t1.elapsed());
    }
}
