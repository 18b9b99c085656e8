//! Landmark trajectory types, file I/O, and the crop/rescale normalization
//! that makes stability scores comparable across videos.

use std::collections::BTreeMap;
use std::io::{BufReader, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Which coordinate space a trajectory lives in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Space {
    /// Pixels of the source video frame, as loaded from disk.
    Raw,
    /// After [`normalize_crop`]: mouth-anchored square crop rescaled to a
    /// fixed output size. Points may drift somewhat outside the crop.
    Normalized256,
}

/// Per-frame 2-D coordinates for `points` tracked landmarks over `frames`
/// frames. The universal signal carrier of the crate.
#[derive(Debug, Clone, PartialEq)]
pub struct LandmarkTrajectory<T> {
    frames: usize,
    points: usize,
    /// Row-major `[frame][point]`, each entry `[x, y]`.
    coords: Vec<[T; 2]>,
    fps: f64,
    space: Space,
}

impl<T: Scalar> LandmarkTrajectory<T> {
    /// Builds a trajectory, validating shape and finiteness.
    pub fn new(
        frames: usize,
        points: usize,
        coords: Vec<[T; 2]>,
        fps: f64,
        space: Space,
    ) -> Result<Self> {
        if frames == 0 || points == 0 {
            return Err(Error::InvalidParams("trajectory needs frames >= 1 and points >= 1".into()));
        }
        if coords.len() != frames * points {
            return Err(Error::InvalidParams(format!(
                "coordinate count {} does not match {} frames x {} points",
                coords.len(),
                frames,
                points
            )));
        }
        if !(fps > 0.0) {
            return Err(Error::InvalidParams(format!("fps must be > 0, got {fps}")));
        }
        for (i, c) in coords.iter().enumerate() {
            if !c[0].is_finite() || !c[1].is_finite() {
                return Err(Error::InvalidParams(format!(
                    "non-finite coordinate at frame {} point {}",
                    i / points,
                    i % points
                )));
            }
        }
        Ok(Self { frames, points, coords, fps, space })
    }

    /// A trajectory where every frame repeats the same point layout.
    pub fn constant(frames: usize, layout: &[[T; 2]], fps: f64) -> Result<Self> {
        let mut coords = Vec::with_capacity(frames * layout.len());
        for _ in 0..frames {
            coords.extend_from_slice(layout);
        }
        Self::new(frames, layout.len(), coords, fps, Space::Raw)
    }

    pub fn frames(&self) -> usize {
        self.frames
    }

    pub fn points(&self) -> usize {
        self.points
    }

    pub fn fps(&self) -> f64 {
        self.fps
    }

    pub fn space(&self) -> Space {
        self.space
    }

    #[inline]
    pub fn point(&self, frame: usize, point: usize) -> [T; 2] {
        self.coords[frame * self.points + point]
    }

    #[inline]
    pub fn point_mut(&mut self, frame: usize, point: usize) -> &mut [T; 2] {
        &mut self.coords[frame * self.points + point]
    }

    pub fn coords(&self) -> &[[T; 2]] {
        &self.coords
    }

    /// Applies `f` to every coordinate, revalidating the result.
    pub fn map_coords(&self, space: Space, mut f: impl FnMut(usize, usize, [T; 2]) -> [T; 2]) -> Result<Self> {
        let mut coords = Vec::with_capacity(self.coords.len());
        for t in 0..self.frames {
            for n in 0..self.points {
                coords.push(f(t, n, self.point(t, n)));
            }
        }
        Self::new(self.frames, self.points, coords, self.fps, space)
    }

}

/// Named index sets over the `N` tracked points.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct RegionMap {
    regions: BTreeMap<String, Vec<usize>>,
}

/// Mouth-corner landmark indices of the default 68-point layout.
pub const IBUG_MOUTH_CORNERS: (usize, usize) = (48, 54);

impl RegionMap {
    pub fn new(regions: BTreeMap<String, Vec<usize>>) -> Result<Self> {
        let mut map = BTreeMap::new();
        for (name, mut idx) in regions {
            if idx.is_empty() {
                return Err(Error::InvalidParams(format!("region \"{name}\" is empty")));
            }
            idx.sort_unstable();
            idx.dedup();
            map.insert(name, idx);
        }
        Ok(Self { regions: map })
    }

    /// The default map for 68-point iBUG-layout trackers: `jaw` is the face
    /// contour 0-16 and `lip` the mouth block 48-67.
    pub fn ibug68() -> Self {
        let mut regions = BTreeMap::new();
        regions.insert("jaw".to_string(), (0..=16).collect());
        regions.insert("lip".to_string(), (48..=67).collect());
        Self { regions }
    }

    /// A single `all` region covering every point.
    pub fn all(points: usize) -> Self {
        let mut regions = BTreeMap::new();
        regions.insert("all".to_string(), (0..points).collect());
        Self { regions }
    }

    pub fn insert(&mut self, name: impl Into<String>, mut indices: Vec<usize>) {
        indices.sort_unstable();
        indices.dedup();
        self.regions.insert(name.into(), indices);
    }

    pub fn get(&self, name: &str) -> Option<&[usize]> {
        self.regions.get(name).map(|v| v.as_slice())
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.regions.keys().map(|s| s.as_str())
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &[usize])> {
        self.regions.iter().map(|(k, v)| (k.as_str(), v.as_slice()))
    }

    /// Checks every index against a trajectory with `points` landmarks.
    pub fn validate_for(&self, points: usize) -> Result<()> {
        for (name, idx) in &self.regions {
            if let Some(&bad) = idx.iter().find(|&&i| i >= points) {
                return Err(Error::InvalidParams(format!(
                    "region \"{name}\" references point {bad}, trajectory has {points} points"
                )));
            }
        }
        Ok(())
    }
}

/// Constants of the mouth-anchored crop normalization.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CropSpec {
    /// Mouth width divided by crop width.
    pub ratio: f64,
    /// Number of leading frames averaged to fix the crop box.
    pub warmup_frames: usize,
    /// Side length of the output square, in pixels.
    pub out_size: usize,
}

impl Default for CropSpec {
    fn default() -> Self {
        Self { ratio: 0.25, warmup_frames: 5, out_size: 256 }
    }
}

impl CropSpec {
    pub fn validate(&self) -> Result<()> {
        if !(self.ratio > 0.0 && self.ratio < 1.0) {
            return Err(Error::InvalidParams(format!("crop ratio must be in (0,1), got {}", self.ratio)));
        }
        if self.warmup_frames < 1 {
            return Err(Error::InvalidParams("warmup_frames must be >= 1".into()));
        }
        if self.out_size < 16 {
            return Err(Error::InvalidParams("out_size must be >= 16".into()));
        }
        Ok(())
    }
}

const DEGENERATE_MOUTH_WIDTH: f64 = 1e-6;

/// Normalizes a trajectory into the fixed `out_size` crop space.
///
/// The crop box is an axis-aligned square of side `mouth_width / ratio`
/// centered on the mean mouth-corner midpoint, where `mouth_width` is the
/// mean horizontal mouth-corner distance over the warmup frames. Output
/// coordinates are `(p - box_top_left) * (out_size / side)`.
pub fn normalize_crop<T: Scalar>(
    traj: &LandmarkTrajectory<T>,
    spec: &CropSpec,
    mouth_corners: (usize, usize),
) -> Result<LandmarkTrajectory<T>> {
    spec.validate()?;
    let (left, right) = mouth_corners;
    if left == right {
        return Err(Error::InvalidParams("mouth corner indices must be distinct".into()));
    }
    if left >= traj.points() || right >= traj.points() {
        return Err(Error::InvalidParams(format!(
            "mouth corner index out of range: ({left}, {right}) with {} points",
            traj.points()
        )));
    }
    if traj.frames() < spec.warmup_frames {
        return Err(Error::InvalidParams(format!(
            "trajectory has {} frames, warmup needs {}",
            traj.frames(),
            spec.warmup_frames
        )));
    }

    let warm = T::from_usize(spec.warmup_frames).unwrap();
    let mut width_sum = T::zero();
    let mut cx_sum = T::zero();
    let mut cy_sum = T::zero();
    let half = T::of(0.5);
    for t in 0..spec.warmup_frames {
        let l = traj.point(t, left);
        let r = traj.point(t, right);
        width_sum += (r[0] - l[0]).abs();
        cx_sum += (l[0] + r[0]) * half;
        cy_sum += (l[1] + r[1]) * half;
    }
    let mouth_width = width_sum / warm;
    if mouth_width.as_f64() < DEGENERATE_MOUTH_WIDTH {
        return Err(Error::Compute("degenerate mouth width".into()));
    }
    let center = [cx_sum / warm, cy_sum / warm];

    let side = mouth_width / T::of(spec.ratio);
    let top_left = [center[0] - side * half, center[1] - side * half];
    let scale = T::from_usize(spec.out_size).unwrap() / side;

    traj.map_coords(Space::Normalized256, |_, _, p| {
        [(p[0] - top_left[0]) * scale, (p[1] - top_left[1]) * scale]
    })
}

/// Extracts the named sub-trajectory, preserving point order.
pub fn select_region<T: Scalar>(
    traj: &LandmarkTrajectory<T>,
    map: &RegionMap,
    name: &str,
) -> Result<LandmarkTrajectory<T>> {
    let indices = map.get(name).ok_or_else(|| {
        let available: Vec<&str> = map.names().collect();
        Error::InvalidParams(format!(
            "unknown region \"{name}\"; available regions: {}",
            available.join(", ")
        ))
    })?;
    if let Some(&bad) = indices.iter().find(|&&i| i >= traj.points()) {
        return Err(Error::InvalidParams(format!(
            "region \"{name}\" references point {bad}, trajectory has {} points",
            traj.points()
        )));
    }
    let mut coords = Vec::with_capacity(traj.frames() * indices.len());
    for t in 0..traj.frames() {
        for &n in indices {
            coords.push(traj.point(t, n));
        }
    }
    Ok(LandmarkTrajectory {
        frames: traj.frames(),
        points: indices.len(),
        coords,
        fps: traj.fps(),
        space: traj.space(),
    })
}

/// On-disk landmark formats.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

impl Format {
    /// Picks the format from a file extension.
    pub fn from_path(path: &Path) -> Result<Self> {
        match path.extension().and_then(|e| e.to_str()) {
            Some("csv") => Ok(Format::Csv),
            Some("json") => Ok(Format::Json),
            other => Err(Error::InvalidParams(format!(
                "cannot infer landmark format from extension {:?}; use .csv or .json",
                other.unwrap_or("")
            ))),
        }
    }
}

/// Default fps recorded for formats that do not carry one (CSV).
pub const DEFAULT_FPS: f64 = 25.0;

#[derive(Serialize, Deserialize)]
struct JsonTrajectory {
    fps: f64,
    points: usize,
    frames: Vec<Vec<[f64; 2]>>,
}

/// Loads a landmark file. Loaded trajectories are always tagged [`Space::Raw`].
pub fn load_trajectory<T: Scalar>(path: &Path, format: Format) -> Result<LandmarkTrajectory<T>> {
    match format {
        Format::Csv => load_csv(path),
        Format::Json => load_json(path),
    }
}

/// Writes a landmark file in the given format. The format does not carry the
/// coordinate-space tag; reloading always yields [`Space::Raw`].
pub fn save_trajectory<T: Scalar>(
    traj: &LandmarkTrajectory<T>,
    path: &Path,
    format: Format,
) -> Result<()> {
    let mut out: Vec<u8> = Vec::new();
    match format {
        Format::Csv => write_csv(traj, &mut out)?,
        Format::Json => write_json(traj, &mut out)?,
    }
    std::fs::write(path, out)?;
    Ok(())
}

fn load_json<T: Scalar>(path: &Path) -> Result<LandmarkTrajectory<T>> {
    let name = path.display().to_string();
    let file = std::fs::File::open(path)?;
    let parsed: JsonTrajectory = serde_json::from_reader(BufReader::new(file))
        .map_err(|e| Error::parse(&name, e.line(), e.to_string()))?;
    if parsed.frames.is_empty() {
        return Err(Error::parse(&name, 1, "no frames"));
    }
    if parsed.points == 0 {
        return Err(Error::parse(&name, 1, "points must be >= 1"));
    }
    let frames = parsed.frames.len();
    let mut coords = Vec::with_capacity(frames * parsed.points);
    for (t, frame) in parsed.frames.iter().enumerate() {
        if frame.len() != parsed.points {
            return Err(Error::parse(
                &name,
                1,
                format!("inconsistent point count: frame {t} has {} points, expected {}", frame.len(), parsed.points),
            ));
        }
        for (n, &[x, y]) in frame.iter().enumerate() {
            if !x.is_finite() || !y.is_finite() {
                return Err(Error::parse(&name, 1, format!("non-finite value at frame {t} point {n}")));
            }
            coords.push([T::of(x), T::of(y)]);
        }
    }
    LandmarkTrajectory::new(frames, parsed.points, coords, parsed.fps, Space::Raw)
}

fn write_json<T: Scalar>(traj: &LandmarkTrajectory<T>, out: &mut impl Write) -> Result<()> {
    let frames: Vec<Vec<[f64; 2]>> = (0..traj.frames())
        .map(|t| {
            (0..traj.points())
                .map(|n| {
                    let p = traj.point(t, n);
                    [p[0].as_f64(), p[1].as_f64()]
                })
                .collect()
        })
        .collect();
    let doc = JsonTrajectory { fps: traj.fps(), points: traj.points(), frames };
    serde_json::to_writer(&mut *out, &doc).map_err(|e| Error::Io(e.into()))?;
    out.write_all(b"\n")?;
    Ok(())
}

const CSV_HEADER: [&str; 4] = ["frame", "point", "x", "y"];

fn load_csv<T: Scalar>(path: &Path) -> Result<LandmarkTrajectory<T>> {
    let name = path.display().to_string();
    let file = std::fs::File::open(path)?;
    let mut reader = csv::ReaderBuilder::new().has_headers(true).from_reader(BufReader::new(file));

    {
        let headers = reader.headers().map_err(|e| Error::parse(&name, 1, e.to_string()))?;
        if headers.iter().collect::<Vec<_>>() != CSV_HEADER {
            return Err(Error::parse(&name, 1, format!("expected header \"frame,point,x,y\", got \"{}\"", headers.iter().collect::<Vec<_>>().join(","))));
        }
    }

    // (frame, point) -> coordinate; rows may arrive in any order.
    let mut cells: BTreeMap<(usize, usize), [T; 2]> = BTreeMap::new();
    let mut max_frame = 0usize;
    let mut max_point = 0usize;
    for record in reader.records() {
        let record = record.map_err(|e| {
            let line = e.position().map(|p| p.line() as usize).unwrap_or(0);
            Error::parse(&name, line, e.to_string())
        })?;
        let line = record.position().map(|p| p.line() as usize).unwrap_or(0);
        if record.len() != 4 {
            return Err(Error::parse(&name, line, format!("expected 4 columns, got {}", record.len())));
        }
        let field = |i: usize| record.get(i).unwrap_or("");
        let frame: usize = field(0)
            .trim()
            .parse()
            .map_err(|_| Error::parse(&name, line, format!("column 1: invalid frame index \"{}\"", field(0))))?;
        let point: usize = field(1)
            .trim()
            .parse()
            .map_err(|_| Error::parse(&name, line, format!("column 2: invalid point index \"{}\"", field(1))))?;
        let x: f64 = field(2)
            .trim()
            .parse()
            .map_err(|_| Error::parse(&name, line, format!("column 3: invalid x \"{}\"", field(2))))?;
        let y: f64 = field(3)
            .trim()
            .parse()
            .map_err(|_| Error::parse(&name, line, format!("column 4: invalid y \"{}\"", field(3))))?;
        if !x.is_finite() {
            return Err(Error::parse(&name, line, "column 3: non-finite x"));
        }
        if !y.is_finite() {
            return Err(Error::parse(&name, line, "column 4: non-finite y"));
        }
        if cells.insert((frame, point), [T::of(x), T::of(y)]).is_some() {
            return Err(Error::parse(&name, line, format!("duplicate entry for frame {frame} point {point}")));
        }
        max_frame = max_frame.max(frame);
        max_point = max_point.max(point);
    }
    if cells.is_empty() {
        return Err(Error::parse(&name, 1, "no data rows"));
    }

    let frames = max_frame + 1;
    let points = max_point + 1;
    // Contiguity check doubles as the inconsistent-point-count check: a frame
    // with fewer points than another leaves a hole here.
    let mut coords = Vec::with_capacity(frames * points);
    for t in 0..frames {
        for n in 0..points {
            match cells.get(&(t, n)) {
                Some(&c) => coords.push(c),
                None => {
                    let per_frame: Vec<usize> =
                        (0..frames).map(|f| cells.range((f, 0)..=(f, usize::MAX)).count()).collect();
                    let msg = if per_frame.iter().any(|&c| c != points) {
                        format!("inconsistent point count: frame {t} is missing point {n}")
                    } else {
                        format!("missing entry for frame {t} point {n}")
                    };
                    return Err(Error::parse(&name, 0, msg));
                }
            }
        }
    }
    LandmarkTrajectory::new(frames, points, coords, DEFAULT_FPS, Space::Raw)
}

fn write_csv<T: Scalar>(traj: &LandmarkTrajectory<T>, out: &mut impl Write) -> Result<()> {
    // Rust's float formatting is shortest-round-trip, so the printed decimals
    // reparse to the exact same binary64 values.
    writeln!(out, "frame,point,x,y")?;
    for t in 0..traj.frames() {
        for n in 0..traj.points() {
            let p = traj.point(t, n);
            writeln!(out, "{},{},{},{}", t, n, p[0].as_f64(), p[1].as_f64())?;
        }
    }
    Ok(())
}
