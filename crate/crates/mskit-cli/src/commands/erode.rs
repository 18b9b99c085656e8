use std::path::PathBuf;

use mskit::mask::{random_augment, AugmentSpec};

use crate::util::{load_gray_png, load_mask_png, parse_pair, save_gray_png, save_mask_png};
use crate::{CliError, Ctx};

#[derive(Debug, clap::Args)]
pub struct Args {
    /// Grayscale input image (PNG).
    #[arg(long)]
    pub image: PathBuf,

    /// Binary mask image (PNG, 0 = clear, 255 = masked).
    #[arg(long)]
    pub mask: PathBuf,

    /// Signed morphology radius range "rmin,rmax"; negative erodes,
    /// positive dilates.
    #[arg(long, default_value = "0,0")]
    pub radius_range: String,

    /// Shift range in pixels (each axis drawn from +/- this value).
    #[arg(long, default_value_t = 0)]
    pub shift: usize,

    /// Rotation range in degrees (drawn from +/- this value).
    #[arg(long, default_value_t = 0.0)]
    pub rotate: f64,

    /// Fill value for the masked-out region, in [0,1].
    #[arg(long, default_value_t = 0.0)]
    pub fill: f64,

    /// Output image path (PNG).
    #[arg(long)]
    pub out_image: PathBuf,

    /// Also write the augmented mask here (PNG).
    #[arg(long)]
    pub out_mask: Option<PathBuf>,
}

pub fn run(args: Args, ctx: &Ctx) -> Result<(), CliError> {
    let image = load_gray_png(&args.image)?;
    let mask = load_mask_png(&args.mask)?;
    let (rmin, rmax): (isize, isize) = parse_pair(&args.radius_range, "--radius-range")?;
    let spec = AugmentSpec {
        radius_range: [rmin, rmax],
        shift_range: args.shift,
        rotate_range: args.rotate,
        fill: args.fill,
        seed: ctx.seed,
    };
    let (augmented, used_mask) = random_augment(&image, &mask, &spec)?;
    save_gray_png(&args.out_image, &augmented)?;
    if let Some(path) = &args.out_mask {
        save_mask_png(path, &used_mask)?;
    }
    log::info!("wrote {}", args.out_image.display());
    Ok(())
}
