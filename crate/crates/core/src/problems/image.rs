//! Grayscale images and binary PGM I/O.

use std::io::{Read, Write};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::error::{Error, Result};

/// Row-major grayscale image. Intensities are nominally in `[0, 1]` but noisy
/// data may leave that range; only finiteness is enforced.
#[derive(Debug, Clone, PartialEq)]
pub struct ImageGrid {
    width: usize,
    height: usize,
    pixels: Vec<f64>,
}

impl ImageGrid {
    pub fn new(width: usize, height: usize, pixels: Vec<f64>) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::Image("image dimensions must be positive".into()));
        }
        if width * height != pixels.len() {
            return Err(Error::Image(format!(
                "{width}x{height} image needs {} pixels, got {}",
                width * height,
                pixels.len()
            )));
        }
        if pixels.iter().any(|p| !p.is_finite()) {
            return Err(Error::Image("pixels must be finite".into()));
        }
        Ok(ImageGrid { width, height, pixels })
    }

    pub fn filled(width: usize, height: usize, value: f64) -> Result<Self> {
        ImageGrid::new(width, height, vec![value; width * height])
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

    pub fn into_pixels(self) -> Vec<f64> {
        self.pixels
    }

    pub fn same_shape(&self, other: &ImageGrid) -> bool {
        self.width == other.width && self.height == other.height
    }

    /// Piecewise-constant test image: a bright square and a darker offset
    /// rectangle on a grey background.
    pub fn synthetic_squares(width: usize, height: usize) -> Result<Self> {
        let mut pixels = vec![0.2; width * height];
        for y in 0..height {
            for x in 0..width {
                let (fx, fy) = (x as f64 / width as f64, y as f64 / height as f64);
                let p = &mut pixels[y * width + x];
                if (0.15..0.55).contains(&fx) && (0.2..0.6).contains(&fy) {
                    *p = 0.8;
                }
                if (0.45..0.85).contains(&fx) && (0.55..0.8).contains(&fy) {
                    *p = 0.5;
                }
            }
        }
        ImageGrid::new(width, height, pixels)
    }

    /// Adds i.i.d. Gaussian noise with standard deviation `sigma`.
    pub fn with_gaussian_noise(&self, sigma: f64, seed: u64) -> Result<Self> {
        let normal = Normal::new(0.0, sigma)
            .map_err(|e| Error::config("noise_sigma", e.to_string()))?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let pixels = self.pixels.iter().map(|p| p + normal.sample(&mut rng)).collect();
        ImageGrid::new(self.width, self.height, pixels)
    }

    /// Reads a binary (`P5`) PGM with maxval at most 255.
    pub fn read_pgm<R: Read>(mut reader: R) -> Result<Self> {
        let mut bytes = Vec::new();
        reader.read_to_end(&mut bytes)?;
        let mut pos = 0;
        let mut token = || -> Result<String> {
            loop {
                while pos < bytes.len() && bytes[pos].is_ascii_whitespace() {
                    pos += 1;
                }
                if pos < bytes.len() && bytes[pos] == b'#' {
                    while pos < bytes.len() && bytes[pos] != b'\n' {
                        pos += 1;
                    }
                    continue;
                }
                break;
            }
            let start = pos;
            while pos < bytes.len() && !bytes[pos].is_ascii_whitespace() {
                pos += 1;
            }
            if start == pos {
                return Err(Error::Image("truncated PGM header".into()));
            }
            Ok(String::from_utf8_lossy(&bytes[start..pos]).into_owned())
        };
        if token()? != "P5" {
            return Err(Error::Image("only binary P5 PGM files are supported".into()));
        }
        let mut number = |what: &str| -> Result<usize> {
            token()?
                .parse()
                .map_err(|_| Error::Image(format!("bad PGM {what}")))
        };
        let width = number("width")?;
        let height = number("height")?;
        let maxval = number("maxval")?;
        if maxval == 0 || maxval > 255 {
            return Err(Error::Image(format!("unsupported PGM maxval {maxval}")));
        }
        // exactly one whitespace byte separates the header from the raster
        let data = bytes
            .get(pos + 1..pos + 1 + width * height)
            .ok_or_else(|| Error::Image("truncated PGM raster".into()))?;
        let pixels = data.iter().map(|&b| b as f64 / maxval as f64).collect();
        ImageGrid::new(width, height, pixels)
    }

    /// Writes a binary 8-bit PGM, clamping intensities to `[0, 1]`.
    pub fn write_pgm<W: Write>(&self, mut out: W) -> Result<()> {
        write!(out, "P5\n{} {}\n255\n", self.width, self.height)?;
        let raster: Vec<u8> = self
            .pixels
            .iter()
            .map(|p| (p.clamp(0.0, 1.0) * 255.0).round() as u8)
            .collect();
        out.write_all(&raster)?;
        Ok(())
    }
}
