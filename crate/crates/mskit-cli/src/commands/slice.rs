use std::path::PathBuf;

use mskit::slicevis::{slice_image, slice_image_band, slice_triptych, Frame, FrameSequence, TriptychStyle};

use crate::util::{load_frame_dir, save_gray_png, save_rgb_frame_png};
use crate::{CliError, Ctx};

#[derive(Debug, clap::Args)]
pub struct Args {
    /// Directory of frame_NNNNNN.png files; repeat up to 3 times for a
    /// side-by-side comparison.
    #[arg(long = "dir", required = true)]
    pub dirs: Vec<PathBuf>,

    /// Pixel column to slice.
    #[arg(long)]
    pub column: usize,

    /// Averaged band width in pixels (odd; single directory only). The
    /// output is grayscale when > 1.
    #[arg(long, default_value_t = 1)]
    pub band: usize,

    /// Output PNG path.
    #[arg(long)]
    pub out: PathBuf,
}

const MARKER_RED: [u8; 3] = [255, 0, 0];
const SEPARATOR_BLACK: [u8; 3] = [0, 0, 0];

pub fn run(args: Args, _ctx: &Ctx) -> Result<(), CliError> {
    if args.dirs.len() > 3 {
        return Err(CliError::Usage(format!(
            "at most 3 directories can be compared, got {}",
            args.dirs.len()
        )));
    }
    if args.band != 1 && args.dirs.len() > 1 {
        return Err(CliError::Usage(
            "--band averaging applies to single-directory slices only".into(),
        ));
    }

    let sequences: Vec<FrameSequence<[u8; 3]>> =
        args.dirs.iter().map(|d| load_frame_dir(d)).collect::<Result<_, _>>()?;

    if args.band > 1 {
        let gray = to_gray(&sequences[0])?;
        let slice = slice_image_band(&gray, args.column, args.band)?;
        let img = mskit::mask::GrayImage::new(
            slice.width(),
            slice.height(),
            slice.pixels().to_vec(),
        )?;
        save_gray_png(&args.out, &img)?;
    } else if sequences.len() == 1 {
        let slice = slice_image(&sequences[0], args.column)?;
        save_rgb_frame_png(&args.out, &slice)?;
    } else {
        let refs: Vec<&FrameSequence<[u8; 3]>> = sequences.iter().collect();
        let style = TriptychStyle { separator: SEPARATOR_BLACK, marker: MARKER_RED };
        let composite = slice_triptych(&refs, args.column, style)?;
        save_rgb_frame_png(&args.out, &composite)?;
    }
    log::info!("wrote {}", args.out.display());
    Ok(())
}

fn to_gray(seq: &FrameSequence<[u8; 3]>) -> Result<FrameSequence<f64>, CliError> {
    let frames = seq
        .frames()
        .iter()
        .map(|f| {
            let pixels = f
                .pixels()
                .iter()
                .map(|&[r, g, b]| {
                    (0.299 * r as f64 + 0.587 * g as f64 + 0.114 * b as f64) / 255.0
                })
                .collect();
            Frame::new(f.width(), f.height(), pixels)
        })
        .collect::<mskit::Result<Vec<_>>>()?;
    FrameSequence::new(frames).map_err(CliError::from)
}
