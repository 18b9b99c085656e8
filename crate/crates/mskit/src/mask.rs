//! Binary-mask morphology and the randomized mask-out augmentation: erosion
//! and dilation with a disk structuring element, rigid mask transforms, and
//! application of masks to grayscale images.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// An H x W boolean raster; true marks the masked (mouth) region.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BinaryMask {
    width: usize,
    height: usize,
    bits: Vec<bool>,
}

impl BinaryMask {
    pub fn new(width: usize, height: usize, bits: Vec<bool>) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::InvalidParams("mask dimensions must be >= 1".into()));
        }
        if bits.len() != width * height {
            return Err(Error::InvalidParams(format!(
                "bit count {} does not match {width}x{height}",
                bits.len()
            )));
        }
        Ok(Self { width, height, bits })
    }

    pub fn empty(width: usize, height: usize) -> Result<Self> {
        Self::new(width, height, vec![false; width * height])
    }

    pub fn full(width: usize, height: usize) -> Result<Self> {
        Self::new(width, height, vec![true; width * height])
    }

    pub fn from_fn(width: usize, height: usize, f: impl Fn(usize, usize) -> bool) -> Result<Self> {
        let mut bits = Vec::with_capacity(width * height);
        for y in 0..height {
            for x in 0..width {
                bits.push(f(x, y));
            }
        }
        Self::new(width, height, bits)
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> bool {
        self.bits[y * self.width + x]
    }

    #[inline]
    pub fn set(&mut self, x: usize, y: usize, value: bool) {
        self.bits[y * self.width + x] = value;
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    /// Number of true pixels.
    pub fn area(&self) -> usize {
        self.bits.iter().filter(|&&b| b).count()
    }

    /// Frame-wise complement.
    pub fn complement(&self) -> Self {
        Self {
            width: self.width,
            height: self.height,
            bits: self.bits.iter().map(|b| !b).collect(),
        }
    }

    pub fn is_subset_of(&self, other: &Self) -> bool {
        self.width == other.width
            && self.height == other.height
            && self.bits.iter().zip(&other.bits).all(|(&a, &b)| !a || b)
    }

    /// Centroid of the true pixels, or None for an empty mask.
    pub fn centroid(&self) -> Option<(f64, f64)> {
        let mut sx = 0.0;
        let mut sy = 0.0;
        let mut n = 0usize;
        for y in 0..self.height {
            for x in 0..self.width {
                if self.get(x, y) {
                    sx += x as f64;
                    sy += y as f64;
                    n += 1;
                }
            }
        }
        if n == 0 {
            None
        } else {
            Some((sx / n as f64, sy / n as f64))
        }
    }
}

/// Offsets of the discrete disk of the given radius (Euclidean norm <= r).
fn disk_offsets(radius: usize) -> Vec<(isize, isize)> {
    let r = radius as isize;
    let r2 = (radius * radius) as isize;
    let mut out = Vec::new();
    for dy in -r..=r {
        for dx in -r..=r {
            if dx * dx + dy * dy <= r2 {
                out.push((dx, dy));
            }
        }
    }
    out
}

/// Morphological erosion with a disk structuring element. Pixels beyond the
/// frame count as false, so a mask touching the border erodes away from it.
pub fn erode(mask: &BinaryMask, radius: usize) -> BinaryMask {
    if radius == 0 {
        return mask.clone();
    }
    let offsets = disk_offsets(radius);
    let (w, h) = (mask.width as isize, mask.height as isize);
    BinaryMask::from_fn(mask.width, mask.height, |x, y| {
        offsets.iter().all(|&(dx, dy)| {
            let (nx, ny) = (x as isize + dx, y as isize + dy);
            nx >= 0 && nx < w && ny >= 0 && ny < h && mask.get(nx as usize, ny as usize)
        })
    })
    .expect("same dimensions")
}

/// Morphological dilation with a disk structuring element; content beyond the
/// frame is dropped and nothing grows in from outside.
pub fn dilate(mask: &BinaryMask, radius: usize) -> BinaryMask {
    if radius == 0 {
        return mask.clone();
    }
    let offsets = disk_offsets(radius);
    let (w, h) = (mask.width as isize, mask.height as isize);
    BinaryMask::from_fn(mask.width, mask.height, |x, y| {
        offsets.iter().any(|&(dx, dy)| {
            let (nx, ny) = (x as isize + dx, y as isize + dy);
            nx >= 0 && nx < w && ny >= 0 && ny < h && mask.get(nx as usize, ny as usize)
        })
    })
    .expect("same dimensions")
}

/// Signed-radius convenience: negative erodes, positive dilates, zero is the
/// identity.
pub fn morph_signed(mask: &BinaryMask, radius: isize) -> BinaryMask {
    if radius < 0 {
        erode(mask, radius.unsigned_abs())
    } else {
        dilate(mask, radius as usize)
    }
}

/// Rotates the mask by `theta` degrees about its centroid, then translates by
/// `(dx, dy)` pixels. Forward-mapped with nearest-neighbor rounding: content
/// leaving the frame is dropped, holes opened by resampling stay false.
pub fn transform_mask(mask: &BinaryMask, dx: isize, dy: isize, theta: f64) -> Result<BinaryMask> {
    let (cx, cy) = mask
        .centroid()
        .ok_or_else(|| Error::Compute("cannot transform an empty mask: no centroid".into()))?;
    let rad = theta.to_radians();
    let (sin, cos) = rad.sin_cos();
    let mut out = BinaryMask::empty(mask.width, mask.height)?;
    for y in 0..mask.height {
        for x in 0..mask.width {
            if !mask.get(x, y) {
                continue;
            }
            let rx = x as f64 - cx;
            let ry = y as f64 - cy;
            let tx = cos * rx - sin * ry + cx + dx as f64;
            let ty = sin * rx + cos * ry + cy + dy as f64;
            let (px, py) = (tx.round(), ty.round());
            if px >= 0.0 && py >= 0.0 && (px as usize) < mask.width && (py as usize) < mask.height
            {
                out.set(px as usize, py as usize, true);
            }
        }
    }
    Ok(out)
}

/// An H x W grayscale raster with values in [0, 1].
#[derive(Debug, Clone, PartialEq)]
pub struct GrayImage<T> {
    width: usize,
    height: usize,
    pixels: Vec<T>,
}

impl<T: Scalar> GrayImage<T> {
    /// Builds an image, rejecting non-finite pixels and clamping to [0, 1].
    pub fn new(width: usize, height: usize, pixels: Vec<T>) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::InvalidParams("image dimensions must be >= 1".into()));
        }
        if pixels.len() != width * height {
            return Err(Error::InvalidParams(format!(
                "pixel count {} does not match {width}x{height}",
                pixels.len()
            )));
        }
        let mut clamped = pixels;
        for (i, p) in clamped.iter_mut().enumerate() {
            if !p.is_finite() {
                return Err(Error::InvalidParams(format!(
                    "non-finite pixel at ({}, {})",
                    i % width,
                    i / width
                )));
            }
            *p = p.max(T::zero()).min(T::one());
        }
        Ok(Self { width, height, pixels: clamped })
    }

    pub fn constant(width: usize, height: usize, value: f64) -> Result<Self> {
        Self::new(width, height, vec![T::of(value); width * height])
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> T {
        self.pixels[y * self.width + x]
    }

    #[inline]
    pub fn set(&mut self, x: usize, y: usize, value: T) {
        self.pixels[y * self.width + x] = value;
    }

    pub fn pixels(&self) -> &[T] {
        &self.pixels
    }
}

/// Sets every pixel under the mask to `fill`, leaving the rest untouched.
pub fn apply_mask_out<T: Scalar>(
    image: &GrayImage<T>,
    mask: &BinaryMask,
    fill: f64,
) -> Result<GrayImage<T>> {
    if image.width != mask.width || image.height != mask.height {
        return Err(Error::InvalidParams(format!(
            "image {}x{} and mask {}x{} dimensions differ",
            image.width, image.height, mask.width, mask.height
        )));
    }
    if !(0.0..=1.0).contains(&fill) {
        return Err(Error::InvalidParams(format!("fill must be in [0,1], got {fill}")));
    }
    let fill = T::of(fill);
    let mut out = image.clone();
    for (p, &m) in out.pixels.iter_mut().zip(&mask.bits) {
        if m {
            *p = fill;
        }
    }
    Ok(out)
}

/// Ranges for the randomized augmentation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AugmentSpec {
    /// Signed morphology radius range `[rmin, rmax]`; negative erodes,
    /// positive dilates.
    pub radius_range: [isize; 2],
    /// Shift is drawn from `[-shift_range, shift_range]` pixels per axis.
    pub shift_range: usize,
    /// Rotation is drawn from `[-rotate_range, rotate_range]` degrees.
    pub rotate_range: f64,
    pub fill: f64,
    pub seed: u64,
}

impl AugmentSpec {
    pub fn validate(&self) -> Result<()> {
        if self.radius_range[0] > self.radius_range[1] {
            return Err(Error::InvalidParams(format!(
                "radius range [{}, {}] is not ordered",
                self.radius_range[0], self.radius_range[1]
            )));
        }
        if !(0.0..=1.0).contains(&self.fill) {
            return Err(Error::InvalidParams(format!("fill must be in [0,1], got {}", self.fill)));
        }
        if self.rotate_range < 0.0 {
            return Err(Error::InvalidParams("rotate_range must be >= 0".into()));
        }
        Ok(())
    }
}

/// Samples a morphology radius, shift, and rotation from the spec, applies
/// them to the mask, and masks the image out. Returns the augmented image and
/// the mask actually used. Deterministic for a given seed.
///
/// A mask eroded away to nothing skips the rigid transform (it has no
/// centroid) and masks out nothing.
pub fn random_augment<T: Scalar>(
    image: &GrayImage<T>,
    mask: &BinaryMask,
    spec: &AugmentSpec,
) -> Result<(GrayImage<T>, BinaryMask)> {
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let radius = rng.gen_range(spec.radius_range[0]..=spec.radius_range[1]);
    let shift = spec.shift_range as isize;
    let dx = rng.gen_range(-shift..=shift);
    let dy = rng.gen_range(-shift..=shift);
    let theta = if spec.rotate_range == 0.0 {
        0.0
    } else {
        rng.gen_range(-spec.rotate_range..=spec.rotate_range)
    };

    let morphed = morph_signed(mask, radius);
    let used = if morphed.area() == 0 || (dx == 0 && dy == 0 && theta == 0.0) {
        morphed
    } else {
        transform_mask(&morphed, dx, dy, theta)?
    };
    let out = apply_mask_out(image, &used, spec.fill)?;
    Ok((out, used))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn random_mask(width: usize, height: usize, density: f64, rng: &mut ChaCha8Rng) -> BinaryMask {
        let bits = (0..width * height).map(|_| rng.gen::<f64>() < density).collect();
        BinaryMask::new(width, height, bits).unwrap()
    }

    #[test]
    fn radius_zero_is_identity() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let m = random_mask(12, 9, 0.5, &mut rng);
        assert_eq!(erode(&m, 0), m);
        assert_eq!(dilate(&m, 0), m);
    }

    #[test]
    fn full_mask_erodes_to_interior_band() {
        let full = BinaryMask::full(8, 8).unwrap();
        for radius in 1..3usize {
            let e = erode(&full, radius);
            for y in 0..8 {
                for x in 0..8 {
                    let interior = x >= radius
                        && y >= radius
                        && x < 8 - radius
                        && y < 8 - radius;
                    assert_eq!(e.get(x, y), interior, "r={radius} ({x},{y})");
                }
            }
        }
    }

    #[test]
    fn single_pixel_erodes_away() {
        let mut m = BinaryMask::empty(7, 7).unwrap();
        m.set(3, 3, true);
        assert_eq!(erode(&m, 1).area(), 0);
    }

    #[test]
    fn dilated_point_is_a_plus_shape() {
        let mut m = BinaryMask::empty(7, 7).unwrap();
        m.set(3, 3, true);
        let d = dilate(&m, 1);
        let expected: Vec<(usize, usize)> = vec![(3, 2), (2, 3), (3, 3), (4, 3), (3, 4)];
        for y in 0..7 {
            for x in 0..7 {
                assert_eq!(d.get(x, y), expected.contains(&(x, y)), "({x},{y})");
            }
        }
    }

    #[test]
    fn empty_mask_stays_empty_under_dilation() {
        let m = BinaryMask::empty(10, 10).unwrap();
        assert_eq!(dilate(&m, 3).area(), 0);
    }

    #[test]
    fn erosion_is_anti_extensive_and_dilation_extensive() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..20 {
            let m = random_mask(16, 16, 0.5, &mut rng);
            for r in 0..4usize {
                assert!(erode(&m, r).is_subset_of(&m));
                assert!(m.is_subset_of(&dilate(&m, r)));
            }
        }
    }

    #[test]
    fn duality_holds_for_interior_masks() {
        // Window morphology satisfies the erosion/dilation duality wherever
        // the structuring element stays inside the frame; masks here keep a
        // margin of 3 so it holds over the whole raster for r <= 3.
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..20 {
            let inner = random_mask(10, 10, 0.5, &mut rng);
            let m = BinaryMask::from_fn(16, 16, |x, y| {
                (3..13).contains(&x) && (3..13).contains(&y) && inner.get(x - 3, y - 3)
            })
            .unwrap();
            for r in 0..4usize {
                assert_eq!(erode(&m, r), dilate(&m.complement(), r).complement(), "r={r}");
                assert_eq!(dilate(&m.complement(), r), erode(&m, r).complement(), "r={r}");
            }
        }
    }

    #[test]
    fn morphology_is_monotone() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for _ in 0..10 {
            let m1 = random_mask(16, 16, 0.4, &mut rng);
            // m2 = m1 union extra true pixels
            let extra = random_mask(16, 16, 0.2, &mut rng);
            let m2 = BinaryMask::from_fn(16, 16, |x, y| m1.get(x, y) || extra.get(x, y)).unwrap();
            for r in 0..4usize {
                assert!(erode(&m1, r).is_subset_of(&erode(&m2, r)));
                assert!(dilate(&m1, r).is_subset_of(&dilate(&m2, r)));
            }
        }
    }

    #[test]
    fn identity_transform_is_identity() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let m = random_mask(14, 14, 0.4, &mut rng);
        assert_eq!(transform_mask(&m, 0, 0, 0.0).unwrap(), m);
    }

    #[test]
    fn quarter_turn_swaps_rectangle_axes() {
        // 3 wide x 5 tall rectangle centered in a 32x32 frame
        let m = BinaryMask::from_fn(32, 32, |x, y| (15..18).contains(&x) && (13..18).contains(&y))
            .unwrap();
        let r = transform_mask(&m, 0, 0, 90.0).unwrap();
        assert_eq!(r.area(), 15);
        let c0 = m.centroid().unwrap();
        let c1 = r.centroid().unwrap();
        assert!((c0.0 - c1.0).abs() <= 1.0 && (c0.1 - c1.1).abs() <= 1.0);
        // extents swap: now 5 wide x 3 tall
        let xs: Vec<usize> = (0..32).filter(|&x| (0..32).any(|y| r.get(x, y))).collect();
        let ys: Vec<usize> = (0..32).filter(|&y| (0..32).any(|x| r.get(x, y))).collect();
        assert_eq!(xs.len(), 5);
        assert_eq!(ys.len(), 3);
    }

    #[test]
    fn full_width_shift_empties_the_mask() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        let m = random_mask(8, 8, 0.5, &mut rng);
        let shifted = transform_mask(&m, 8, 0, 0.0).unwrap();
        assert_eq!(shifted.area(), 0);
    }

    #[test]
    fn empty_mask_transform_errors() {
        let m = BinaryMask::empty(8, 8).unwrap();
        let err = transform_mask(&m, 1, 0, 0.0).unwrap_err();
        assert!(err.to_string().contains("no centroid"), "{err}");
    }

    #[test]
    fn mask_out_examples() {
        let img = GrayImage::<f64>::constant(6, 4, 0.75).unwrap();
        let empty = BinaryMask::empty(6, 4).unwrap();
        assert_eq!(apply_mask_out(&img, &empty, 0.0).unwrap(), img);

        let full = BinaryMask::full(6, 4).unwrap();
        let blacked = apply_mask_out(&img, &full, 0.0).unwrap();
        assert!(blacked.pixels().iter().all(|&p| p == 0.0));

        let checker = BinaryMask::from_fn(6, 4, |x, y| (x + y) % 2 == 0).unwrap();
        let half = apply_mask_out(&img, &checker, 0.5).unwrap();
        let at_fill = half.pixels().iter().filter(|&&p| p == 0.5).count();
        assert_eq!(at_fill, 12);
    }

    #[test]
    fn mask_out_is_idempotent() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let m = random_mask(9, 9, 0.5, &mut rng);
        let pixels = (0..81).map(|i| (i as f64 * 0.37) % 1.0).collect();
        let img = GrayImage::<f64>::new(9, 9, pixels).unwrap();
        let once = apply_mask_out(&img, &m, 0.25).unwrap();
        let twice = apply_mask_out(&once, &m, 0.25).unwrap();
        assert_eq!(once, twice);
    }

    #[test]
    fn dimension_mismatch_is_rejected() {
        let img = GrayImage::<f64>::constant(5, 5, 0.5).unwrap();
        let m = BinaryMask::empty(4, 5).unwrap();
        assert!(apply_mask_out(&img, &m, 0.0).is_err());
    }

    #[test]
    fn degenerate_augment_spec_equals_plain_mask_out() {
        let img = GrayImage::<f64>::constant(12, 12, 0.9).unwrap();
        let mask = BinaryMask::from_fn(12, 12, |x, y| (4..8).contains(&x) && (4..8).contains(&y))
            .unwrap();
        let spec = AugmentSpec {
            radius_range: [0, 0],
            shift_range: 0,
            rotate_range: 0.0,
            fill: 0.0,
            seed: 0,
        };
        let (out, used) = random_augment(&img, &mask, &spec).unwrap();
        assert_eq!(out, apply_mask_out(&img, &mask, 0.0).unwrap());
        assert_eq!(used, mask);
    }

    #[test]
    fn augment_is_deterministic_per_seed() {
        let img = GrayImage::<f64>::constant(16, 16, 0.6).unwrap();
        let mask = BinaryMask::from_fn(16, 16, |x, y| (3..13).contains(&x) && (4..12).contains(&y))
            .unwrap();
        let spec = AugmentSpec {
            radius_range: [-2, 2],
            shift_range: 3,
            rotate_range: 20.0,
            fill: 0.0,
            seed: 9,
        };
        let a = random_augment(&img, &mask, &spec).unwrap();
        let b = random_augment(&img, &mask, &spec).unwrap();
        assert_eq!(a, b);
        let c = random_augment(&img, &mask, &AugmentSpec { seed: 10, ..spec }).unwrap();
        assert_ne!(a.1, c.1);
    }

    #[test]
    fn augmented_area_brackets_the_original() {
        // Erosion-only draws shrink the mask on average, dilation-only draws
        // grow it; the original area sits between the two means.
        let img = GrayImage::<f64>::constant(16, 16, 0.5).unwrap();
        let mask = BinaryMask::from_fn(16, 16, |x, y| (4..12).contains(&x) && (5..11).contains(&y))
            .unwrap();
        let base_area = mask.area() as f64;
        let mut eroded_sum = 0.0;
        let mut eroded_n = 0;
        let mut dilated_sum = 0.0;
        let mut dilated_n = 0;
        for seed in 0..1000u64 {
            let spec = AugmentSpec {
                radius_range: [-2, 2],
                shift_range: 0,
                rotate_range: 0.0,
                fill: 0.0,
                seed,
            };
            let (_, used) = random_augment(&img, &mask, &spec).unwrap();
            let area = used.area() as f64;
            // recover the drawn radius sign from the area
            if area < base_area {
                eroded_sum += area;
                eroded_n += 1;
            } else if area > base_area {
                dilated_sum += area;
                dilated_n += 1;
            }
        }
        assert!(eroded_n > 100 && dilated_n > 100);
        assert!(eroded_sum / (eroded_n as f64) < base_area);
        assert!(dilated_sum / (dilated_n as f64) > base_area);
    }
}
