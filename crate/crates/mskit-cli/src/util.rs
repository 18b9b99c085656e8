use std::io::Write;
use std::path::{Path, PathBuf};

use image::{ImageReader, Rgb, RgbImage};
use mskit::mask::{BinaryMask, GrayImage};
use mskit::slicevis::{Frame, FrameSequence};
use mskit::trajectory::Format;

use crate::CliError;

/// Writes a file via a temporary sibling and an atomic rename, so failures
/// never leave a partial output behind.
pub fn atomic_write(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(Path::new("."));
    let mut tmp = tempfile::NamedTempFile::new_in(dir)
        .map_err(|e| CliError::Io(format!("{}: {e}", dir.display())))?;
    tmp.write_all(bytes).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    tmp.persist(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    // temp files are created 0600; give outputs ordinary permissions
    #[cfg(unix)]
    {
        use std::os::unix::fs::PermissionsExt;
        let _ = std::fs::set_permissions(path, std::fs::Permissions::from_mode(0o644));
    }
    Ok(())
}

/// Picks the landmark format from an explicit flag or the file extension.
pub fn resolve_format(path: &Path, flag: Option<FormatArg>) -> Result<Format, CliError> {
    match flag {
        Some(FormatArg::Csv) => Ok(Format::Csv),
        Some(FormatArg::Json) => Ok(Format::Json),
        None => Format::from_path(path).map_err(CliError::from),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum FormatArg {
    Csv,
    Json,
}

/// Serializes a trajectory in the given format into memory.
pub fn trajectory_bytes(
    traj: &mskit::Trajectory64,
    format: Format,
) -> Result<Vec<u8>, CliError> {
    let tmp = tempfile::Builder::new()
        .suffix(match format {
            Format::Csv => ".csv",
            Format::Json => ".json",
        })
        .tempfile()
        .map_err(|e| CliError::Io(e.to_string()))?;
    mskit::save_trajectory(traj, tmp.path(), format)?;
    std::fs::read(tmp.path()).map_err(|e| CliError::Io(e.to_string()))
}

pub fn load_trajectory_checked(
    path: &Path,
    flag: Option<FormatArg>,
) -> Result<(mskit::Trajectory64, Format), CliError> {
    if !path.exists() {
        return Err(CliError::Io(format!("no such file: {}", path.display())));
    }
    let format = resolve_format(path, flag)?;
    let traj = mskit::load_trajectory(path, format)?;
    Ok((traj, format))
}

const LUMA_SCALE: f64 = 255.0;

pub fn load_gray_png(path: &Path) -> Result<GrayImage<f64>, CliError> {
    let img = open_image(path)?.to_luma8();
    let (w, h) = (img.width() as usize, img.height() as usize);
    let pixels = img.pixels().map(|p| p.0[0] as f64 / LUMA_SCALE).collect();
    GrayImage::new(w, h, pixels).map_err(CliError::from)
}

pub fn save_gray_png(path: &Path, img: &GrayImage<f64>) -> Result<(), CliError> {
    let mut out = image::GrayImage::new(img.width() as u32, img.height() as u32);
    for y in 0..img.height() {
        for x in 0..img.width() {
            let v = (img.get(x, y) * LUMA_SCALE).round().clamp(0.0, 255.0) as u8;
            out.put_pixel(x as u32, y as u32, image::Luma([v]));
        }
    }
    encode_png_atomic(path, &image::DynamicImage::ImageLuma8(out))
}

/// Masks are 8-bit PNGs with 0 = clear and 255 = masked; anything >= 128
/// counts as masked on load.
pub fn load_mask_png(path: &Path) -> Result<BinaryMask, CliError> {
    let img = open_image(path)?.to_luma8();
    let (w, h) = (img.width() as usize, img.height() as usize);
    let bits = img.pixels().map(|p| p.0[0] >= 128).collect();
    BinaryMask::new(w, h, bits).map_err(CliError::from)
}

pub fn save_mask_png(path: &Path, mask: &BinaryMask) -> Result<(), CliError> {
    let mut out = image::GrayImage::new(mask.width() as u32, mask.height() as u32);
    for y in 0..mask.height() {
        for x in 0..mask.width() {
            out.put_pixel(x as u32, y as u32, image::Luma([if mask.get(x, y) { 255 } else { 0 }]));
        }
    }
    encode_png_atomic(path, &image::DynamicImage::ImageLuma8(out))
}

pub fn save_rgb_frame_png(path: &Path, frame: &Frame<[u8; 3]>) -> Result<(), CliError> {
    let mut out = RgbImage::new(frame.width() as u32, frame.height() as u32);
    for y in 0..frame.height() {
        for x in 0..frame.width() {
            out.put_pixel(x as u32, y as u32, Rgb(frame.get(x, y)));
        }
    }
    encode_png_atomic(path, &image::DynamicImage::ImageRgb8(out))
}

fn open_image(path: &Path) -> Result<image::DynamicImage, CliError> {
    if !path.exists() {
        return Err(CliError::Io(format!("no such file: {}", path.display())));
    }
    ImageReader::open(path)
        .map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?
        .decode()
        .map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

fn encode_png_atomic(path: &Path, img: &image::DynamicImage) -> Result<(), CliError> {
    let mut bytes: Vec<u8> = Vec::new();
    img.write_to(&mut std::io::Cursor::new(&mut bytes), image::ImageFormat::Png)
        .map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    atomic_write(path, &bytes)
}

/// Reads a directory of `frame_%06d.png` files, ordered by index. Indices
/// must be contiguous: a silent gap would fake motion in the slice image.
pub fn load_frame_dir(dir: &Path) -> Result<FrameSequence<[u8; 3]>, CliError> {
    if !dir.is_dir() {
        return Err(CliError::Io(format!("no such directory: {}", dir.display())));
    }
    let mut indexed: Vec<(u64, PathBuf)> = Vec::new();
    for entry in std::fs::read_dir(dir).map_err(|e| CliError::Io(e.to_string()))? {
        let entry = entry.map_err(|e| CliError::Io(e.to_string()))?;
        let name = entry.file_name();
        let name = name.to_string_lossy();
        if let Some(idx) = parse_frame_name(&name) {
            indexed.push((idx, entry.path()));
        }
    }
    if indexed.len() < 2 {
        return Err(CliError::Usage(format!(
            "{}: need at least 2 frame_NNNNNN.png files, found {}",
            dir.display(),
            indexed.len()
        )));
    }
    indexed.sort_by_key(|(idx, _)| *idx);
    let first = indexed[0].0;
    for (offset, (idx, _)) in indexed.iter().enumerate() {
        let expected = first + offset as u64;
        if *idx != expected {
            return Err(CliError::Usage(format!(
                "{}: frame indices are not contiguous, missing frame_{expected:06}.png",
                dir.display()
            )));
        }
    }
    let mut frames = Vec::with_capacity(indexed.len());
    for (_, path) in &indexed {
        let img = open_image(path)?.to_rgb8();
        let (w, h) = (img.width() as usize, img.height() as usize);
        let pixels: Vec<[u8; 3]> = img.pixels().map(|p| p.0).collect();
        frames.push(Frame::new(w, h, pixels)?);
    }
    FrameSequence::new(frames).map_err(CliError::from)
}

fn parse_frame_name(name: &str) -> Option<u64> {
    let stem = name.strip_prefix("frame_")?.strip_suffix(".png")?;
    if stem.len() != 6 || !stem.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    stem.parse().ok()
}

/// Parses "a,b" into a pair.
pub fn parse_pair<T: std::str::FromStr>(s: &str, what: &str) -> Result<(T, T), CliError> {
    let (a, b) = s
        .split_once(',')
        .ok_or_else(|| CliError::Usage(format!("{what} must be \"a,b\", got \"{s}\"")))?;
    let parse = |v: &str| {
        v.trim()
            .parse::<T>()
            .map_err(|_| CliError::Usage(format!("{what}: cannot parse \"{v}\"")))
    };
    Ok((parse(a)?, parse(b)?))
}
