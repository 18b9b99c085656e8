//! Slice-through-time diagnostics: stack one pixel column from every frame
//! along the time axis. Jitter shows up as jagged horizontal discontinuities.

use crate::error::{Error, Result};
use crate::mask::GrayImage;
use crate::scalar::Scalar;

/// A raster frame over an arbitrary pixel type (grayscale scalar, RGB
/// triple, ...). Row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct Frame<P> {
    width: usize,
    height: usize,
    pixels: Vec<P>,
}

impl<P: Copy> Frame<P> {
    pub fn new(width: usize, height: usize, pixels: Vec<P>) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::InvalidParams("frame dimensions must be >= 1".into()));
        }
        if pixels.len() != width * height {
            return Err(Error::InvalidParams(format!(
                "pixel count {} does not match {width}x{height}",
                pixels.len()
            )));
        }
        Ok(Self { width, height, pixels })
    }

    pub fn filled(width: usize, height: usize, value: P) -> Result<Self> {
        Self::new(width, height, vec![value; width * height])
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> P {
        self.pixels[y * self.width + x]
    }

    #[inline]
    pub fn set(&mut self, x: usize, y: usize, value: P) {
        self.pixels[y * self.width + x] = value;
    }

    pub fn pixels(&self) -> &[P] {
        &self.pixels
    }
}

impl<T: Scalar> From<&GrayImage<T>> for Frame<T> {
    fn from(img: &GrayImage<T>) -> Self {
        Frame { width: img.width(), height: img.height(), pixels: img.pixels().to_vec() }
    }
}

/// An ordered sequence of same-sized frames.
#[derive(Debug, Clone, PartialEq)]
pub struct FrameSequence<P> {
    frames: Vec<Frame<P>>,
}

impl<P: Copy> FrameSequence<P> {
    pub fn new(frames: Vec<Frame<P>>) -> Result<Self> {
        if frames.len() < 2 {
            return Err(Error::InvalidParams(format!(
                "a frame sequence needs >= 2 frames, got {}",
                frames.len()
            )));
        }
        let (w, h) = (frames[0].width, frames[0].height);
        for (i, f) in frames.iter().enumerate() {
            if f.width != w || f.height != h {
                return Err(Error::InvalidParams(format!(
                    "frame {i} is {}x{}, expected {w}x{h}",
                    f.width, f.height
                )));
            }
        }
        Ok(Self { frames })
    }

    pub fn len(&self) -> usize {
        self.frames.len()
    }

    pub fn is_empty(&self) -> bool {
        self.frames.is_empty()
    }

    pub fn width(&self) -> usize {
        self.frames[0].width
    }

    pub fn height(&self) -> usize {
        self.frames[0].height
    }

    pub fn frames(&self) -> &[Frame<P>] {
        &self.frames
    }
}

/// Gathers column `column` of every frame into a `len x height` image whose
/// x-axis is time. Every output pixel is a bit-exact copy of one input pixel.
pub fn slice_image<P: Copy>(seq: &FrameSequence<P>, column: usize) -> Result<Frame<P>> {
    if column >= seq.width() {
        return Err(Error::InvalidParams(format!(
            "column {column} out of range (frame width {})",
            seq.width()
        )));
    }
    let height = seq.height();
    let t_len = seq.len();
    let mut out = Frame::new(t_len, height, vec![seq.frames[0].get(column, 0); t_len * height])?;
    for (t, frame) in seq.frames.iter().enumerate() {
        for y in 0..height {
            out.set(t, y, frame.get(column, y));
        }
    }
    Ok(out)
}

/// Like [`slice_image`] but averaging a band of `band` columns centered on
/// `column` (clamped to the frame), for noisy footage. `band = 1` is the
/// plain slice.
pub fn slice_image_band<T: Scalar>(
    seq: &FrameSequence<T>,
    column: usize,
    band: usize,
) -> Result<Frame<T>> {
    if band == 0 {
        return Err(Error::InvalidParams("band must be >= 1".into()));
    }
    if band == 1 {
        return slice_image(seq, column);
    }
    if column >= seq.width() {
        return Err(Error::InvalidParams(format!(
            "column {column} out of range (frame width {})",
            seq.width()
        )));
    }
    let half = (band - 1) / 2;
    let lo = column.saturating_sub(half);
    let hi = (column + band / 2).min(seq.width() - 1);
    let n = T::from_usize(hi - lo + 1).unwrap();
    let height = seq.height();
    let mut out = Frame::filled(seq.len(), height, T::zero())?;
    for (t, frame) in seq.frames.iter().enumerate() {
        for y in 0..height {
            let mut sum = T::zero();
            for x in lo..=hi {
                sum += frame.get(x, y);
            }
            out.set(t, y, sum / n);
        }
    }
    Ok(out)
}

/// Pixel values a triptych needs for its chrome.
#[derive(Debug, Clone, Copy)]
pub struct TriptychStyle<P> {
    /// Separator columns between panels and the background of the marker row.
    pub separator: P,
    /// The tick in the marker row highlighting the slice column.
    pub marker: P,
}

/// Width in pixels of the separator between panels.
pub const SEPARATOR_WIDTH: usize = 2;

/// Stacks up to three slice images side by side with a separator between
/// panels and a marker row on top ticking the slice column (clamped into the
/// panel). Sequences may differ in length but must share frame height.
pub fn slice_triptych<P: Copy>(
    seqs: &[&FrameSequence<P>],
    column: usize,
    style: TriptychStyle<P>,
) -> Result<Frame<P>> {
    if seqs.is_empty() || seqs.len() > 3 {
        return Err(Error::InvalidParams(format!(
            "triptych takes 1 to 3 sequences, got {}",
            seqs.len()
        )));
    }
    let height = seqs[0].height();
    for (i, s) in seqs.iter().enumerate() {
        if s.height() != height {
            return Err(Error::InvalidParams(format!(
                "sequence {i} has frame height {}, expected {height}",
                s.height()
            )));
        }
    }
    let panels: Vec<Frame<P>> =
        seqs.iter().map(|s| slice_image(s, column)).collect::<Result<_>>()?;
    let total_width: usize =
        panels.iter().map(|p| p.width).sum::<usize>() + SEPARATOR_WIDTH * (panels.len() - 1);
    let mut out = Frame::filled(total_width, height + 1, style.separator)?;
    let mut x0 = 0;
    for panel in &panels {
        // marker row: tick at the slice column, clamped into this panel
        out.set(x0 + column.min(panel.width - 1), 0, style.marker);
        for y in 0..height {
            for x in 0..panel.width {
                out.set(x0 + x, y + 1, panel.get(x, y));
            }
        }
        x0 += panel.width + SEPARATOR_WIDTH;
    }
    Ok(out)
}

/// Number of horizontal value changes in each row. On a slice image this
/// counts temporal discontinuities: jittery footage transitions more often.
pub fn transitions_per_row<P: PartialEq>(frame: &Frame<P>) -> Vec<usize> {
    let mut out = Vec::with_capacity(frame.height);
    for y in 0..frame.height {
        let row = &frame.pixels[y * frame.width..(y + 1) * frame.width];
        out.push(row.windows(2).filter(|w| w[0] != w[1]).count());
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bar_frame(width: usize, height: usize, bar_x: usize) -> Frame<f64> {
        let mut f = Frame::filled(width, height, 0.0).unwrap();
        if bar_x < width {
            for y in 0..height {
                f.set(bar_x, y, 1.0);
            }
        }
        f
    }

    #[test]
    fn static_frames_make_horizontal_stripes() {
        let frame = Frame::new(4, 3, vec![0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0, 0.0, 0.25]).unwrap();
        let seq = FrameSequence::new(vec![frame.clone(); 5]).unwrap();
        let slice = slice_image(&seq, 2).unwrap();
        assert_eq!((slice.width(), slice.height()), (5, 3));
        for y in 0..3 {
            let expected = frame.get(2, y);
            for t in 0..5 {
                assert_eq!(slice.get(t, y), expected);
            }
        }
    }

    #[test]
    fn moving_bar_hits_a_single_output_column() {
        // a 1-px white bar moving one pixel right per frame crosses the
        // sliced column exactly once
        let (w, h, t_len) = (12, 6, 8);
        let frames: Vec<Frame<f64>> = (0..t_len).map(|t| bar_frame(w, h, t)).collect();
        let seq = FrameSequence::new(frames).unwrap();
        let column = 5;
        let slice = slice_image(&seq, column).unwrap();
        for t in 0..t_len {
            for y in 0..h {
                let expected = if t == column { 1.0 } else { 0.0 };
                assert_eq!(slice.get(t, y), expected, "t={t} y={y}");
            }
        }
    }

    #[test]
    fn two_frames_give_width_two() {
        let seq = FrameSequence::new(vec![bar_frame(5, 4, 1); 2]).unwrap();
        assert_eq!(slice_image(&seq, 0).unwrap().width(), 2);
    }

    #[test]
    fn slice_is_a_bit_exact_gather() {
        let mut frames = Vec::new();
        for t in 0..6usize {
            let pixels = (0..20).map(|i| ((t * 31 + i * 7) % 17) as f64 / 16.0).collect();
            frames.push(Frame::new(5, 4, pixels).unwrap());
        }
        let seq = FrameSequence::new(frames).unwrap();
        for column in 0..5 {
            let slice = slice_image(&seq, column).unwrap();
            for t in 0..6 {
                for y in 0..4 {
                    assert_eq!(
                        slice.get(t, y).to_bits(),
                        seq.frames()[t].get(column, y).to_bits()
                    );
                }
            }
        }
    }

    #[test]
    fn column_out_of_range_is_rejected() {
        let seq = FrameSequence::new(vec![bar_frame(5, 4, 1); 3]).unwrap();
        assert!(slice_image(&seq, 5).is_err());
    }

    #[test]
    fn single_panel_triptych_is_slice_plus_marker_row() {
        let seq = FrameSequence::new((0..6).map(|t| bar_frame(9, 5, t)).collect()).unwrap();
        let style = TriptychStyle { separator: 0.0, marker: 1.0 };
        let column = 3;
        let composite = slice_triptych(&[&seq], column, style).unwrap();
        let slice = slice_image(&seq, column).unwrap();
        assert_eq!((composite.width(), composite.height()), (slice.width(), slice.height() + 1));
        for y in 0..slice.height() {
            for x in 0..slice.width() {
                assert_eq!(composite.get(x, y + 1), slice.get(x, y));
            }
        }
        // marker tick at the slice column
        for x in 0..composite.width() {
            assert_eq!(composite.get(x, 0), if x == column { 1.0 } else { 0.0 });
        }
    }

    #[test]
    fn identical_sequences_make_identical_panels() {
        let seq = FrameSequence::new((0..7).map(|t| bar_frame(10, 4, t)).collect()).unwrap();
        let style = TriptychStyle { separator: 0.5, marker: 1.0 };
        let composite = slice_triptych(&[&seq, &seq], 4, style).unwrap();
        let t_len = seq.len();
        for y in 1..composite.height() {
            for x in 0..t_len {
                assert_eq!(composite.get(x, y), composite.get(x + t_len + SEPARATOR_WIDTH, y));
            }
        }
    }

    #[test]
    fn height_mismatch_is_rejected() {
        let a = FrameSequence::new(vec![bar_frame(6, 4, 1); 3]).unwrap();
        let b = FrameSequence::new(vec![bar_frame(6, 5, 1); 3]).unwrap();
        let style = TriptychStyle { separator: 0.0, marker: 1.0 };
        assert!(slice_triptych(&[&a, &b], 2, style).is_err());
    }

    #[test]
    fn transition_counts_track_crossings() {
        // bar crossing the column once: off -> on -> off = 2 transitions
        let seq = FrameSequence::new((0..8).map(|t| bar_frame(10, 3, t)).collect()).unwrap();
        let slice = slice_image(&seq, 4).unwrap();
        assert_eq!(transitions_per_row(&slice), vec![2, 2, 2]);
    }

    #[test]
    fn band_averaging_blends_columns() {
        let seq = FrameSequence::new((0..4).map(|t| bar_frame(9, 2, t + 2)).collect()).unwrap();
        let band = slice_image_band(&seq, 3, 3).unwrap();
        // at t=0 the bar sits at x=2, inside the band {2,3,4}
        assert!((band.get(0, 0) - 1.0 / 3.0).abs() < 1e-15);
    }
}
