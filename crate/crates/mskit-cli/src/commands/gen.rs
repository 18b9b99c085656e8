use std::path::PathBuf;

use mskit::smoothing::{gen_synthetic, SyntheticDatasetSpec};
use mskit::trajectory::Format;
use serde::Serialize;

use crate::util::{atomic_write, trajectory_bytes, FormatArg};
use crate::{CliError, Ctx};

#[derive(Debug, clap::Args)]
pub struct Args {
    /// Dataset spec JSON; a built-in default dataset is used when omitted.
    #[arg(long)]
    pub spec: Option<PathBuf>,

    /// Output directory (created if missing).
    #[arg(long)]
    pub out_dir: PathBuf,

    /// Landmark format of the emitted files.
    #[arg(long, value_enum, default_value_t = FormatArg::Json)]
    pub format: FormatArg,
}

#[derive(Serialize)]
struct Manifest<'a> {
    spec: &'a SyntheticDatasetSpec,
    pairs: Vec<[String; 2]>,
}

pub fn run(args: Args, _ctx: &Ctx) -> Result<(), CliError> {
    let spec = match &args.spec {
        Some(path) => {
            let bytes = std::fs::read(path)
                .map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
            serde_json::from_slice::<SyntheticDatasetSpec>(&bytes)
                .map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?
        }
        None => SyntheticDatasetSpec::default(),
    };
    let format = match args.format {
        FormatArg::Csv => Format::Csv,
        FormatArg::Json => Format::Json,
    };
    let ext = match format {
        Format::Csv => "csv",
        Format::Json => "json",
    };

    std::fs::create_dir_all(&args.out_dir)
        .map_err(|e| CliError::Io(format!("{}: {e}", args.out_dir.display())))?;
    let pairs = gen_synthetic::<f64>(&spec)?;
    let mut manifest = Manifest { spec: &spec, pairs: Vec::with_capacity(pairs.len()) };
    for (i, pair) in pairs.iter().enumerate() {
        let clean_name = format!("clean_{i:04}.{ext}");
        let jittered_name = format!("jittered_{i:04}.{ext}");
        atomic_write(&args.out_dir.join(&clean_name), &trajectory_bytes(&pair.clean, format)?)?;
        atomic_write(
            &args.out_dir.join(&jittered_name),
            &trajectory_bytes(&pair.jittered, format)?,
        )?;
        manifest.pairs.push([clean_name, jittered_name]);
    }
    let mut manifest_bytes = serde_json::to_vec_pretty(&manifest)
        .map_err(|e| CliError::Io(format!("serializing manifest: {e}")))?;
    manifest_bytes.push(b'\n');
    atomic_write(&args.out_dir.join("manifest.json"), &manifest_bytes)?;
    println!("wrote {} pairs to {}", pairs.len(), args.out_dir.display());
    Ok(())
}
