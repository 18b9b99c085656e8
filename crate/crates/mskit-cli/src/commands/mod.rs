pub mod correlate;
pub mod erode;
pub mod gen;
pub mod jitter;
pub mod msi;
pub mod slice;
pub mod smooth;
pub mod train;

use std::collections::BTreeMap;
use std::path::PathBuf;

use mskit::msi::CropMeta;
use mskit::trajectory::{CropSpec, RegionMap};
use mskit::Trajectory64;

use crate::util::parse_pair;
use crate::CliError;

/// Crop-normalization flags shared by the scoring subcommands.
#[derive(Debug, clap::Args)]
pub struct NormalizeArgs {
    /// Skip crop normalization and score raw coordinates (values are then
    /// not comparable across videos).
    #[arg(long)]
    pub no_normalize: bool,

    /// Mouth width over crop width.
    #[arg(long, default_value_t = 0.25)]
    pub crop_ratio: f64,

    /// Leading frames averaged to fix the crop box.
    #[arg(long, default_value_t = 5)]
    pub warmup: usize,

    /// Side of the normalized square, in pixels.
    #[arg(long, default_value_t = 256)]
    pub out_size: usize,

    /// Mouth-corner landmark indices as "left,right".
    #[arg(long, default_value = "48,54")]
    pub corners: String,
}

impl NormalizeArgs {
    pub fn crop_spec(&self) -> CropSpec {
        CropSpec { ratio: self.crop_ratio, warmup_frames: self.warmup, out_size: self.out_size }
    }

    /// Normalizes unless disabled; returns the trajectory plus crop metadata
    /// for the report.
    pub fn apply(&self, traj: Trajectory64) -> Result<(Trajectory64, Option<CropMeta>), CliError> {
        if self.no_normalize {
            return Ok((traj, None));
        }
        let corners: (usize, usize) = parse_pair(&self.corners, "--corners")?;
        let spec = self.crop_spec();
        let out = mskit::normalize_crop(&traj, &spec, corners)?;
        Ok((out, Some(CropMeta::from(&spec))))
    }
}

/// Builds the region map for a trajectory: an explicit JSON map when given,
/// the 68-point default layout (plus an `all` region) when it fits, and a
/// single `all` region otherwise.
pub fn region_map_for(
    points: usize,
    map_path: Option<&PathBuf>,
) -> Result<RegionMap, CliError> {
    let mut map = match map_path {
        Some(path) => {
            let bytes = std::fs::read(path)
                .map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
            let raw: BTreeMap<String, Vec<usize>> = serde_json::from_slice(&bytes)
                .map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
            RegionMap::new(raw)?
        }
        None if points == 68 => RegionMap::ibug68(),
        None => RegionMap::all(points),
    };
    if map.get("all").is_none() {
        map.insert("all", (0..points).collect::<Vec<_>>());
    }
    map.validate_for(points)?;
    Ok(map)
}
