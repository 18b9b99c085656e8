use std::fmt::Write as _;
use std::path::PathBuf;

use mskit::smoothing::{save_smoother, train_smoother, Regime, SyntheticDatasetSpec, TrainConfig, TrainedSmoother};

use crate::util::atomic_write;
use crate::{CliError, Ctx};

#[derive(Debug, clap::Args)]
pub struct Args {
    /// Dataset spec JSON; a built-in default dataset is used when omitted.
    #[arg(long)]
    pub spec: Option<PathBuf>,

    /// Weight regime to train.
    #[arg(long, value_enum)]
    pub regime: RegimeArg,

    /// Learning rate of the full-batch gradient descent.
    #[arg(long, default_value_t = 0.05)]
    pub lr: f64,

    /// Number of full-batch steps.
    #[arg(long, default_value_t = 300)]
    pub epochs: usize,

    /// Smoothing width K, odd.
    #[arg(long, default_value_t = 5)]
    pub k: usize,

    /// Output model file.
    #[arg(long)]
    pub out: PathBuf,

    /// Loss-curve CSV path; defaults to the model path with ".loss.csv".
    #[arg(long)]
    pub loss_curve: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum RegimeArg {
    Global,
    Adaptive,
}

pub fn run(args: Args, ctx: &Ctx) -> Result<(), CliError> {
    let spec = match &args.spec {
        Some(path) => {
            let bytes = std::fs::read(path)
                .map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
            serde_json::from_slice::<SyntheticDatasetSpec>(&bytes)
                .map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?
        }
        None => SyntheticDatasetSpec::default(),
    };
    let regime = match args.regime {
        RegimeArg::Global => Regime::Global,
        RegimeArg::Adaptive => Regime::Adaptive,
    };
    let config = TrainConfig { lr: args.lr, epochs: args.epochs, seed: ctx.seed, width: args.k };

    let outcome = train_smoother::<f64>(regime, &spec, &config)?;

    if let TrainedSmoother::Adaptive(net) = &outcome.smoother {
        println!("adaptive smoother: {} learnable parameters", net.param_count());
    }

    let mut model_bytes = Vec::new();
    {
        // serialize through a temp file to reuse the library writer
        let tmp = tempfile::NamedTempFile::new().map_err(|e| CliError::Io(e.to_string()))?;
        save_smoother(tmp.path(), &outcome.smoother, ctx.seed)?;
        model_bytes.extend(std::fs::read(tmp.path()).map_err(|e| CliError::Io(e.to_string()))?);
    }
    atomic_write(&args.out, &model_bytes)?;

    let curve_path = args
        .loss_curve
        .clone()
        .unwrap_or_else(|| PathBuf::from(format!("{}.loss.csv", args.out.display())));
    let mut csv = String::from("epoch,loss\n");
    for (epoch, loss) in outcome.loss_curve.iter().enumerate() {
        writeln!(csv, "{epoch},{loss}").expect("string write");
    }
    atomic_write(&curve_path, csv.as_bytes())?;

    let first = outcome.loss_curve.first().copied().unwrap_or(f64::NAN);
    let last = outcome.loss_curve.last().copied().unwrap_or(f64::NAN);
    println!(
        "trained {:?} smoother: {} epochs, loss {first:.6} -> {last:.6}",
        args.regime, args.epochs
    );
    println!("model: {}", args.out.display());
    println!("loss curve: {}", curve_path.display());
    Ok(())
}
