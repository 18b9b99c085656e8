use std::path::PathBuf;

use mskit::smoothing::{
    fixed_weights, load_smoother, smooth_apply, FixedKernel, Regime, FEATURE_CHANNELS,
};

use crate::util::{atomic_write, load_trajectory_checked, trajectory_bytes, FormatArg};
use crate::{CliError, Ctx};

#[derive(Debug, clap::Args)]
pub struct Args {
    /// Landmark file (.csv or .json).
    pub landmarks: PathBuf,

    /// Landmark file format; inferred from the extension when omitted.
    #[arg(long, value_enum)]
    pub format: Option<FormatArg>,

    /// Weight regime.
    #[arg(long, value_enum)]
    pub mode: ModeArg,

    /// Fixed-kernel shape (fixed mode).
    #[arg(long, value_enum, default_value_t = KernelArg::Uniform)]
    pub kernel: KernelArg,

    /// Gaussian kernel width in frames (fixed gaussian kernel).
    #[arg(long, default_value_t = 1.0)]
    pub sigma_w: f64,

    /// Smoothing width K, odd (fixed mode; learned modes carry their own).
    #[arg(long, default_value_t = 5)]
    pub k: usize,

    /// Trained model file (global and adaptive modes).
    #[arg(long)]
    pub model: Option<PathBuf>,

    /// Output landmark file, written in the input format.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum ModeArg {
    Fixed,
    Global,
    Adaptive,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum KernelArg {
    Uniform,
    Gaussian,
}

pub fn run(args: Args, _ctx: &Ctx) -> Result<(), CliError> {
    let (traj, format) = load_trajectory_checked(&args.landmarks, args.format)?;

    let weights = match args.mode {
        ModeArg::Fixed => {
            let kind = match args.kernel {
                KernelArg::Uniform => FixedKernel::Uniform,
                KernelArg::Gaussian => FixedKernel::Gaussian { sigma: args.sigma_w },
            };
            fixed_weights(kind, args.k, traj.frames())?
        }
        ModeArg::Global | ModeArg::Adaptive => {
            let path = args.model.as_ref().ok_or_else(|| {
                CliError::Usage("--model is required for global and adaptive modes".into())
            })?;
            let (smoother, header) = load_smoother::<f64>(path)?;
            let want = match args.mode {
                ModeArg::Global => Regime::Global,
                _ => Regime::Adaptive,
            };
            if smoother.regime() != want {
                return Err(CliError::Usage(format!(
                    "model {} holds a {} smoother, --mode asks for {:?}",
                    path.display(),
                    header.regime,
                    args.mode
                )));
            }
            if let Some(c_in) = header.c_in {
                if c_in != FEATURE_CHANNELS {
                    return Err(CliError::Usage(format!(
                        "model expects c_in = {c_in}, this tool extracts {FEATURE_CHANNELS} \
                         feature channels (expected K = {}, c_in = {FEATURE_CHANNELS})",
                        header.k
                    )));
                }
            }
            smoother.weights_for(&traj)?
        }
    };

    let smoothed = smooth_apply(&traj, &weights)?;
    atomic_write(&args.out, &trajectory_bytes(&smoothed, format)?)?;
    log::info!("wrote {}", args.out.display());
    Ok(())
}
