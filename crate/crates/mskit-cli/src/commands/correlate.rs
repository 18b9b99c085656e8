use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use mskit::msi::{correlation_table, msi, CorrelationTable, MsiOptions, StatVector};
use rayon::prelude::*;

use super::msi::PaddingArg;
use super::NormalizeArgs;
use crate::util::{atomic_write, load_trajectory_checked, FormatArg};
use crate::{CliError, Ctx};

#[derive(Debug, clap::Args)]
pub struct Args {
    /// Directory of landmark files (.csv / .json); the file stem is the
    /// video id.
    #[arg(long)]
    pub dir: PathBuf,

    /// JSON file mapping video id to subjective score.
    #[arg(long)]
    pub scores: PathBuf,

    /// Region to score.
    #[arg(long, default_value = "all")]
    pub region: String,

    /// JSON file mapping region names to point-index lists.
    #[arg(long)]
    pub region_map: Option<PathBuf>,

    /// Variance regularizer.
    #[arg(long, default_value_t = mskit::msi::DEFAULT_EPSILON)]
    pub epsilon: f64,

    /// Boundary handling for the difference stencils.
    #[arg(long, value_enum, default_value_t = PaddingArg::Paper)]
    pub padding: PaddingArg,

    #[command(flatten)]
    pub normalize: NormalizeArgs,

    /// Write the coefficient table as JSON here.
    #[arg(long)]
    pub json: Option<PathBuf>,
}

pub fn run(args: Args, ctx: &Ctx) -> Result<(), CliError> {
    if !args.dir.is_dir() {
        return Err(CliError::Io(format!("no such directory: {}", args.dir.display())));
    }
    let mut files: Vec<PathBuf> = std::fs::read_dir(&args.dir)
        .map_err(|e| CliError::Io(format!("{}: {e}", args.dir.display())))?
        .filter_map(|entry| entry.ok().map(|e| e.path()))
        .filter(|p| {
            matches!(p.extension().and_then(|e| e.to_str()), Some("csv") | Some("json"))
        })
        .collect();
    files.sort();
    if files.is_empty() {
        return Err(CliError::Usage(format!(
            "{}: no .csv or .json landmark files",
            args.dir.display()
        )));
    }

    let scores: BTreeMap<String, f64> = {
        let bytes = std::fs::read(&args.scores)
            .map_err(|e| CliError::Io(format!("{}: {e}", args.scores.display())))?;
        serde_json::from_slice(&bytes)
            .map_err(|e| CliError::Io(format!("{}: {e}", args.scores.display())))?
    };

    // Per-file statistics are independent; fan out, then reduce in path
    // order so the result is identical at any thread count.
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(ctx.threads)
        .build()
        .map_err(|e| CliError::Compute(format!("thread pool: {e}")))?;
    let stats: Vec<Result<(String, StatVector), CliError>> =
        pool.install(|| files.par_iter().map(|path| video_stats(path, &args)).collect());

    let mut metrics = BTreeMap::new();
    for result in stats {
        let (id, stat) = result?;
        if metrics.insert(id.clone(), stat).is_some() {
            return Err(CliError::Usage(format!(
                "duplicate video id \"{id}\" (same stem with different extensions?)"
            )));
        }
    }

    let table = correlation_table(&metrics, &scores)?;
    if let Some(path) = &args.json {
        let mut bytes = serde_json::to_vec_pretty(&table)
            .map_err(|e| CliError::Io(format!("serializing table: {e}")))?;
        bytes.push(b'\n');
        atomic_write(path, &bytes)?;
        log::info!("wrote {}", path.display());
    }
    println!("{} videos, region \"{}\"", table.videos, args.region);
    print!(
        "{}",
        CorrelationTable::render_rows(&[(format!("score ({})", args.region), table)])
    );
    Ok(())
}

fn video_stats(path: &Path, args: &Args) -> Result<(String, StatVector), CliError> {
    let (traj, _) = load_trajectory_checked(path, None::<FormatArg>)?;
    let (traj, _) = args.normalize.apply(traj)?;
    let map = super::region_map_for(traj.points(), args.region_map.as_ref())?;
    let opts = MsiOptions {
        epsilon: args.epsilon,
        mode: args.padding.into(),
        allow_raw: args.normalize.no_normalize,
    };
    let stats = msi(&traj, &map, &args.region, &opts).map_err(|e| match CliError::from(e) {
        CliError::Usage(m) => CliError::Usage(format!("{}: {m}", path.display())),
        CliError::Io(m) => CliError::Io(format!("{}: {m}", path.display())),
        CliError::Compute(m) => CliError::Compute(format!("{}: {m}", path.display())),
    })?;
    let id = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| path.display().to_string());
    Ok((id, StatVector::from(stats)))
}
