use std::path::PathBuf;

use mskit::smoothing::{inject_jitter, JitterKind};

use crate::util::{atomic_write, load_trajectory_checked, parse_pair, trajectory_bytes, FormatArg};
use crate::{CliError, Ctx};

#[derive(Debug, clap::Args)]
pub struct Args {
    /// Landmark file (.csv or .json).
    pub landmarks: PathBuf,

    /// Landmark file format; inferred from the extension when omitted.
    #[arg(long, value_enum)]
    pub format: Option<FormatArg>,

    /// Jitter model.
    #[arg(long, value_enum)]
    pub kind: KindArg,

    /// White-noise std in coordinate units (white).
    #[arg(long, default_value_t = 1.0)]
    pub sigma: f64,

    /// Per-frame pop probability (impulse).
    #[arg(long, default_value_t = 0.05)]
    pub rate: f64,

    /// Pop displacement in coordinate units (impulse).
    #[arg(long, default_value_t = 4.0)]
    pub amp: f64,

    /// First offset frame (step).
    #[arg(long, default_value_t = 0)]
    pub frame: usize,

    /// Step displacement as "dx,dy" (step).
    #[arg(long, default_value = "0,0")]
    pub offset: String,

    /// Output landmark file, written in the input format.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum KindArg {
    White,
    Impulse,
    Step,
}

pub fn run(args: Args, ctx: &Ctx) -> Result<(), CliError> {
    let (traj, format) = load_trajectory_checked(&args.landmarks, args.format)?;
    let kind = match args.kind {
        KindArg::White => JitterKind::White { sigma: args.sigma },
        KindArg::Impulse => JitterKind::Impulse { rate: args.rate, amplitude: args.amp },
        KindArg::Step => {
            let (dx, dy): (f64, f64) = parse_pair(&args.offset, "--offset")?;
            JitterKind::Step { frame: args.frame, offset: [dx, dy] }
        }
    };
    let jittered = inject_jitter(&traj, &kind, ctx.seed)?;
    atomic_write(&args.out, &trajectory_bytes(&jittered, format)?)?;
    log::info!("wrote {}", args.out.display());
    Ok(())
}
