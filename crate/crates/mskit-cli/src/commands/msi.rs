use std::path::PathBuf;

use mskit::msi::{msi_report, MsiOptions, MsiReport, PaddingMode};
use mskit::trajectory::RegionMap;

use super::NormalizeArgs;
use crate::util::{atomic_write, load_trajectory_checked, FormatArg};
use crate::{CliError, Ctx};

#[derive(Debug, clap::Args)]
pub struct Args {
    /// Landmark file (.csv or .json).
    pub landmarks: PathBuf,

    /// Landmark file format; inferred from the extension when omitted.
    #[arg(long, value_enum)]
    pub format: Option<FormatArg>,

    /// Regions to score (repeatable); defaults to every region in the map.
    #[arg(long = "region")]
    pub regions: Vec<String>,

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

    /// Write the report as JSON here.
    #[arg(long)]
    pub json: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum PaddingArg {
    Paper,
    Interior,
}

impl From<PaddingArg> for PaddingMode {
    fn from(p: PaddingArg) -> Self {
        match p {
            PaddingArg::Paper => PaddingMode::Paper,
            PaddingArg::Interior => PaddingMode::Interior,
        }
    }
}

pub fn run(args: Args, _ctx: &Ctx) -> Result<(), CliError> {
    let (traj, _) = load_trajectory_checked(&args.landmarks, args.format)?;
    let (traj, crop) = args.normalize.apply(traj)?;

    let full_map = super::region_map_for(traj.points(), args.region_map.as_ref())?;
    let map = restrict_regions(&full_map, &args.regions)?;

    let opts = MsiOptions {
        epsilon: args.epsilon,
        mode: args.padding.into(),
        allow_raw: args.normalize.no_normalize,
    };
    let video = args
        .landmarks
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| args.landmarks.display().to_string());
    let report = msi_report(&traj, &map, video, &opts, crop)?;

    if let Some(path) = &args.json {
        atomic_write(path, &report_bytes(&report)?)?;
        log::info!("wrote {}", path.display());
    }
    print!("{}", render_report(&report));
    Ok(())
}

/// Keeps only the requested regions (all of them when none are named).
fn restrict_regions(map: &RegionMap, requested: &[String]) -> Result<RegionMap, CliError> {
    if requested.is_empty() {
        // drop the synthesized catch-all region from default reports unless
        // it is the only region
        let named: Vec<&str> = map.names().filter(|&n| n != "all").collect();
        if named.is_empty() {
            return Ok(map.clone());
        }
        let mut out = std::collections::BTreeMap::new();
        for name in named {
            out.insert(name.to_string(), map.get(name).unwrap().to_vec());
        }
        return RegionMap::new(out).map_err(CliError::from);
    }
    let mut out = std::collections::BTreeMap::new();
    for name in requested {
        let idx = map.get(name).ok_or_else(|| {
            CliError::Usage(format!(
                "unknown region \"{name}\"; available regions: {}",
                map.names().collect::<Vec<_>>().join(", ")
            ))
        })?;
        out.insert(name.clone(), idx.to_vec());
    }
    RegionMap::new(out).map_err(CliError::from)
}

pub fn report_bytes(report: &MsiReport) -> Result<Vec<u8>, CliError> {
    let mut bytes = serde_json::to_vec_pretty(report)
        .map_err(|e| CliError::Io(format!("serializing report: {e}")))?;
    bytes.push(b'\n');
    Ok(bytes)
}

pub fn render_report(report: &MsiReport) -> String {
    let mut out = String::new();
    let padding = match report.padding {
        PaddingMode::Paper => "paper",
        PaddingMode::Interior => "interior",
    };
    out.push_str(&format!(
        "video: {}  frames: {}  padding: {}  epsilon: {:e}\n",
        report.video, report.frames, padding, report.epsilon
    ));
    out.push_str(&format!(
        "{:<10} {:>14} {:>14} {:>14} {:>14}\n",
        "region", "msi", "sigma_a", "sigma_v", "inv_sigma_v"
    ));
    for (name, stats) in &report.regions {
        out.push_str(&format!(
            "{:<10} {:>14.6} {:>14.6} {:>14.6} {:>14.6}\n",
            name, stats.msi, stats.sigma_a, stats.sigma_v, stats.inv_sigma_v
        ));
    }
    out
}
