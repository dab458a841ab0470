//! Turns a masked cell image into a fixed-length texture feature vector:
//! histogram equalization, a bank of Gabor filters, masked response
//! statistics, and averaging over orientations for rotational invariance.
//!
//! With the default bank (5 scales x 4 orientations x 4 frequencies = 80
//! filters) a cell yields 63 features: 20 scale/frequency groups times 3
//! statistics, plus 3 statistics of the equalized intensity itself.

use crate::data::{DataError, Instance};
use std::f64::consts::PI;
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum ImagingError {
    #[error("pixel buffer of {len} values does not match {width}x{height}")]
    BadBufferSize {
        width: usize,
        height: usize,
        len: usize,
    },
    #[error("image dimensions must be nonzero")]
    ZeroDimensions,
    #[error("pixel value {0} outside [0, 1]")]
    PixelOutOfRange(f64),
    #[error("pixel value is not finite")]
    NonFinitePixel,
    #[error("mask has no pixels inside")]
    EmptyMask,
    #[error("kernel support {0} must be odd")]
    EvenSupport(usize),
    #[error("kernel support {0} is too small")]
    SupportTooSmall(usize),
    #[error("gabor parameter out of range: {0}")]
    BadGaborParam(String),
    #[error("image is {image_width}x{image_height} but mask is {mask_width}x{mask_height}")]
    ShapeMismatch {
        image_width: usize,
        image_height: usize,
        mask_width: usize,
        mask_height: usize,
    },
    #[error("bank of {filters} filters cannot be grouped into sets of {orientations} orientations")]
    BankNotGrouped { filters: usize, orientations: usize },
    #[error(transparent)]
    Data(#[from] DataError),
}

/// Grayscale image with row-major intensities in `[0, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct GrayImage {
    width: usize,
    height: usize,
    pixels: Vec<f64>,
}

impl GrayImage {
    pub fn new(width: usize, height: usize, pixels: Vec<f64>) -> Result<Self, ImagingError> {
        if width == 0 || height == 0 {
            return Err(ImagingError::ZeroDimensions);
        }
        if pixels.len() != width * height {
            return Err(ImagingError::BadBufferSize {
                width,
                height,
                len: pixels.len(),
            });
        }
        for &v in &pixels {
            if !v.is_finite() {
                return Err(ImagingError::NonFinitePixel);
            }
            if !(0.0..=1.0).contains(&v) {
                return Err(ImagingError::PixelOutOfRange(v));
            }
        }
        Ok(Self {
            width,
            height,
            pixels,
        })
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn pixels(&self) -> &[f64] {
        &self.pixels
    }

    pub fn get(&self, x: usize, y: usize) -> f64 {
        self.pixels[y * self.width + x]
    }
}

/// Boolean region-of-interest paired with an image of the same shape.
#[derive(Debug, Clone, PartialEq)]
pub struct CellMask {
    width: usize,
    height: usize,
    inside: Vec<bool>,
}

impl CellMask {
    pub fn new(width: usize, height: usize, inside: Vec<bool>) -> Result<Self, ImagingError> {
        if width == 0 || height == 0 {
            return Err(ImagingError::ZeroDimensions);
        }
        if inside.len() != width * height {
            return Err(ImagingError::BadBufferSize {
                width,
                height,
                len: inside.len(),
            });
        }
        if !inside.iter().any(|&b| b) {
            return Err(ImagingError::EmptyMask);
        }
        Ok(Self {
            width,
            height,
            inside,
        })
    }

    /// Mask covering the whole image.
    pub fn full(width: usize, height: usize) -> Result<Self, ImagingError> {
        Self::new(width, height, vec![true; width * height])
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn get(&self, x: usize, y: usize) -> bool {
        self.inside[y * self.width + x]
    }

    pub fn count(&self) -> usize {
        self.inside.iter().filter(|&&b| b).count()
    }
}

/// Filter response over an image; same shape, unbounded values.
#[derive(Debug, Clone, PartialEq)]
pub struct Response {
    pub width: usize,
    pub height: usize,
    pub values: Vec<f64>,
}

impl Response {
    pub fn get(&self, x: usize, y: usize) -> f64 {
        self.values[y * self.width + x]
    }
}

/// One Gabor filter: Gaussian envelope of scale `sigma`, oriented along
/// `theta`, modulated by a cosine of `frequency` cycles per pixel.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaborParams {
    pub sigma: f64,
    pub theta: f64,
    pub frequency: f64,
}

impl GaborParams {
    pub fn new(sigma: f64, theta: f64, frequency: f64) -> Result<Self, ImagingError> {
        if !(sigma.is_finite() && sigma > 0.0) {
            return Err(ImagingError::BadGaborParam(format!("sigma = {sigma}")));
        }
        if !(theta.is_finite() && (0.0..PI).contains(&theta)) {
            return Err(ImagingError::BadGaborParam(format!("theta = {theta}")));
        }
        if !(frequency.is_finite() && frequency > 0.0) {
            return Err(ImagingError::BadGaborParam(format!(
                "frequency = {frequency}"
            )));
        }
        Ok(Self {
            sigma,
            theta,
            frequency,
        })
    }
}

/// An ordered Gabor filter bank: scale-major, then frequency, with the
/// orientations of one (scale, frequency) group adjacent.
#[derive(Debug, Clone, PartialEq)]
pub struct GaborBank {
    params: Vec<GaborParams>,
    sigmas: Vec<f64>,
    thetas: Vec<f64>,
    frequencies: Vec<f64>,
}

impl GaborBank {
    /// Builds the full grid over the given scales, orientations and
    /// frequencies.
    pub fn from_grid(
        sigmas: &[f64],
        thetas: &[f64],
        frequencies: &[f64],
    ) -> Result<Self, ImagingError> {
        if sigmas.is_empty() || thetas.is_empty() || frequencies.is_empty() {
            return Err(ImagingError::BadGaborParam("empty parameter grid".into()));
        }
        let mut params = Vec::with_capacity(sigmas.len() * thetas.len() * frequencies.len());
        for &sigma in sigmas {
            for &frequency in frequencies {
                for &theta in thetas {
                    params.push(GaborParams::new(sigma, theta, frequency)?);
                }
            }
        }
        Ok(Self {
            params,
            sigmas: sigmas.to_vec(),
            thetas: thetas.to_vec(),
            frequencies: frequencies.to_vec(),
        })
    }

    /// Grid with `count` orientations evenly spaced over `[0, pi)`.
    pub fn evenly_oriented(
        sigmas: &[f64],
        count: usize,
        frequencies: &[f64],
    ) -> Result<Self, ImagingError> {
        if count == 0 {
            return Err(ImagingError::BadGaborParam("zero orientations".into()));
        }
        let thetas: Vec<f64> = (0..count).map(|k| k as f64 * PI / count as f64).collect();
        Self::from_grid(sigmas, &thetas, frequencies)
    }

    pub fn params(&self) -> &[GaborParams] {
        &self.params
    }

    pub fn len(&self) -> usize {
        self.params.len()
    }

    pub fn is_empty(&self) -> bool {
        self.params.is_empty()
    }

    pub fn sigmas(&self) -> &[f64] {
        &self.sigmas
    }

    pub fn thetas(&self) -> &[f64] {
        &self.thetas
    }

    pub fn frequencies(&self) -> &[f64] {
        &self.frequencies
    }

    /// Number of orientations averaged per (scale, frequency) group.
    pub fn orientation_count(&self) -> usize {
        self.thetas.len()
    }

    /// Number of (scale, frequency) groups.
    pub fn group_count(&self) -> usize {
        self.sigmas.len() * self.frequencies.len()
    }

    /// Feature vector length produced by [`cell_features`] with this bank.
    pub fn feature_dim(&self) -> usize {
        3 * self.group_count() + 3
    }
}

impl Default for GaborBank {
    /// Scales {1, 2, 3, 5, 7}, 4 orientations, frequencies
    /// {0.05, 0.1, 0.2, 0.3}: an 80-filter bank and 63 features per cell.
    fn default() -> Self {
        Self::evenly_oriented(&[1.0, 2.0, 3.0, 5.0, 7.0], 4, &[0.05, 0.1, 0.2, 0.3])
            .expect("default grid is valid")
    }
}

/// Square odd-sized filter kernel.
#[derive(Debug, Clone, PartialEq)]
pub struct Kernel {
    size: usize,
    values: Vec<f64>,
}

impl Kernel {
    pub fn new(size: usize, values: Vec<f64>) -> Result<Self, ImagingError> {
        if size % 2 == 0 {
            return Err(ImagingError::EvenSupport(size));
        }
        if values.len() != size * size {
            return Err(ImagingError::BadBufferSize {
                width: size,
                height: size,
                len: values.len(),
            });
        }
        Ok(Self { size, values })
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn half(&self) -> isize {
        (self.size / 2) as isize
    }

    /// Entry at offset (`dx`, `dy`) from the center.
    pub fn get(&self, dx: isize, dy: isize) -> f64 {
        let h = self.half();
        self.values[((dy + h) as usize) * self.size + (dx + h) as usize]
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn sum(&self) -> f64 {
        self.values.iter().sum()
    }
}

/// Evaluates the Gabor filter on a `support` x `support` grid centered at
/// the origin: `exp(-(x'^2 + y'^2) / (2 sigma^2)) * cos(2 pi f x')` with
/// `x' = x cos(theta) + y sin(theta)` and `y' = -x sin(theta) + y cos(theta)`.
pub fn gabor_kernel(params: &GaborParams, support: usize) -> Result<Kernel, ImagingError> {
    if support % 2 == 0 {
        return Err(ImagingError::EvenSupport(support));
    }
    if support < 3 {
        return Err(ImagingError::SupportTooSmall(support));
    }
    let half = (support / 2) as isize;
    let (sin_t, cos_t) = params.theta.sin_cos();
    let mut values = Vec::with_capacity(support * support);
    for row in -half..=half {
        for col in -half..=half {
            let x = col as f64;
            let y = row as f64;
            let x_rot = x * cos_t + y * sin_t;
            let y_rot = -x * sin_t + y * cos_t;
            let envelope = (-(x_rot * x_rot + y_rot * y_rot)
                / (2.0 * params.sigma * params.sigma))
                .exp();
            let carrier = (2.0 * PI * params.frequency * x_rot).cos();
            values.push(envelope * carrier);
        }
    }
    Kernel::new(support, values)
}

/// Smallest odd support covering roughly +-3 sigma, capped at the image's
/// short side (made odd).
pub fn support_for(sigma: f64, width: usize, height: usize) -> usize {
    let mut want = (6.0 * sigma + 1.0).ceil() as usize;
    if want % 2 == 0 {
        want += 1;
    }
    let mut cap = width.min(height).max(3);
    if cap % 2 == 0 {
        cap -= 1;
    }
    want.min(cap).max(3)
}

/// Remaps intensities onto their empirical CDF: each output pixel is
/// `rank / N`, where `rank` counts pixels less than or equal to it. Ties
/// share a value and rank order is preserved.
pub fn equalize_histogram(img: &GrayImage) -> GrayImage {
    let mut sorted = img.pixels.clone();
    sorted.sort_unstable_by(f64::total_cmp);
    let n = sorted.len() as f64;
    let pixels = img
        .pixels
        .iter()
        .map(|&v| sorted.partition_point(|&s| s <= v) as f64 / n)
        .collect();
    GrayImage {
        width: img.width,
        height: img.height,
        pixels,
    }
}

// Single dot product of the kernel against the image at (x, y), reading
// zeros past the borders. Shared by `convolve` and `cell_features` so the
// two routes agree bit for bit.
fn correlate_at(img: &GrayImage, kernel: &Kernel, x: usize, y: usize) -> f64 {
    let half = kernel.half();
    let mut acc = 0.0;
    for dy in -half..=half {
        let yy = y as isize + dy;
        if yy < 0 || yy >= img.height as isize {
            continue;
        }
        for dx in -half..=half {
            let xx = x as isize + dx;
            if xx < 0 || xx >= img.width as isize {
                continue;
            }
            acc += img.get(xx as usize, yy as usize) * kernel.get(dx, dy);
        }
    }
    acc
}

/// Cross-correlates the image with `kernel`, zero-padding past the
/// borders; the response has the image's shape.
pub fn convolve(img: &GrayImage, kernel: &Kernel) -> Response {
    let mut values = Vec::with_capacity(img.width * img.height);
    for y in 0..img.height {
        for x in 0..img.width {
            values.push(correlate_at(img, kernel, x, y));
        }
    }
    Response {
        width: img.width,
        height: img.height,
        values,
    }
}

// (mean |v|, max v, population variance) of a nonempty value list.
fn stats_of(values: &[f64]) -> (f64, f64, f64) {
    let n = values.len() as f64;
    let mean_abs = values.iter().map(|v| v.abs()).sum::<f64>() / n;
    let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let mean = values.iter().sum::<f64>() / n;
    let variance = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n;
    (mean_abs, max, variance)
}

fn masked_values<F: Fn(usize, usize) -> f64>(mask: &CellMask, read: F) -> Vec<f64> {
    let mut out = Vec::with_capacity(mask.count());
    for y in 0..mask.height {
        for x in 0..mask.width {
            if mask.get(x, y) {
                out.push(read(x, y));
            }
        }
    }
    out
}

/// Mean absolute value, maximum, and population variance of the response
/// over the mask-true pixels.
pub fn response_stats(
    resp: &Response,
    mask: &CellMask,
) -> Result<(f64, f64, f64), ImagingError> {
    if resp.width != mask.width || resp.height != mask.height {
        return Err(ImagingError::ShapeMismatch {
            image_width: resp.width,
            image_height: resp.height,
            mask_width: mask.width,
            mask_height: mask.height,
        });
    }
    let values = masked_values(mask, |x, y| resp.get(x, y));
    if values.is_empty() {
        return Err(ImagingError::EmptyMask);
    }
    Ok(stats_of(&values))
}

/// Extracts the per-cell feature vector.
///
/// The image is equalized, every filter in the bank is evaluated at the
/// mask pixels, and per-filter statistics (mean |v|, max, variance) are
/// averaged over the orientations of each (scale, frequency) group. The
/// equalized intensity's own maximum, variance and mean over the mask are
/// appended last.
pub fn cell_features(
    img: &GrayImage,
    mask: &CellMask,
    bank: &GaborBank,
) -> Result<Instance, ImagingError> {
    if img.width != mask.width || img.height != mask.height {
        return Err(ImagingError::ShapeMismatch {
            image_width: img.width,
            image_height: img.height,
            mask_width: mask.width,
            mask_height: mask.height,
        });
    }
    let orientations = bank.orientation_count();
    if orientations == 0 || bank.len() % orientations != 0 {
        return Err(ImagingError::BankNotGrouped {
            filters: bank.len(),
            orientations,
        });
    }

    let equalized = equalize_histogram(img);
    let mut features = Vec::with_capacity(bank.feature_dim());
    for group in bank.params().chunks(orientations) {
        let mut sums = [0.0f64; 3];
        for params in group {
            let support = support_for(params.sigma, img.width, img.height);
            let kernel = gabor_kernel(params, support)?;
            let responses =
                masked_values(mask, |x, y| correlate_at(&equalized, &kernel, x, y));
            let (mean_abs, max, variance) = stats_of(&responses);
            sums[0] += mean_abs;
            sums[1] += max;
            sums[2] += variance;
        }
        for sum in sums {
            features.push(sum / orientations as f64);
        }
    }

    let intensity = masked_values(mask, |x, y| equalized.get(x, y));
    let (_, max, variance) = stats_of(&intensity);
    let mean = intensity.iter().sum::<f64>() / intensity.len() as f64;
    features.push(max);
    features.push(variance);
    features.push(mean);

    Ok(Instance::new(features)?)
}
