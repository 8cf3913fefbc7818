//! Global structural similarity.

use super::image::ImageGrid;
use crate::error::{Error, Result};

/// Dynamic range of the intensities.
pub const DYNAMIC_RANGE: f64 = 1.0;
/// Luminance stabiliser `(0.01 L)^2`.
pub const C_MEAN: f64 = (0.01 * DYNAMIC_RANGE) * (0.01 * DYNAMIC_RANGE);
/// Contrast stabiliser `(0.03 L)^2`.
pub const C_VAR: f64 = (0.03 * DYNAMIC_RANGE) * (0.03 * DYNAMIC_RANGE);

/// SSIM computed once over the whole image (no sliding window) from the
/// means, unbiased variances and unbiased covariance.
pub fn ssim(u: &ImageGrid, v: &ImageGrid) -> Result<f64> {
    if !u.same_shape(v) {
        return Err(Error::Image(format!(
            "SSIM needs equal shapes, got {}x{} and {}x{}",
            u.width(),
            u.height(),
            v.width(),
            v.height()
        )));
    }
    let (a, b) = (u.pixels(), v.pixels());
    let m = a.len();
    if m < 2 {
        return Err(Error::Image("SSIM needs at least two pixels".into()));
    }
    let mean = |p: &[f64]| p.iter().sum::<f64>() / m as f64;
    let (mu_u, mu_v) = (mean(a), mean(b));
    let (mut var_u, mut var_v, mut cov) = (0.0, 0.0, 0.0);
    for (x, y) in a.iter().zip(b) {
        let (du, dv) = (x - mu_u, y - mu_v);
        var_u += du * du;
        var_v += dv * dv;
        cov += du * dv;
    }
    let denom = (m - 1) as f64;
    let (var_u, var_v, cov) = (var_u / denom, var_v / denom, cov / denom);
    Ok((2.0 * mu_u * mu_v + C_MEAN) * (2.0 * cov + C_VAR)
        / ((mu_u * mu_u + mu_v * mu_v + C_MEAN) * (var_u + var_v + C_VAR)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_image(seed: u64) -> ImageGrid {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        ImageGrid::new(8, 8, (0..64).map(|_| rng.random()).collect()).unwrap()
    }

    #[test]
    fn identical_images_score_one() {
        let u = random_image(1);
        assert!((ssim(&u, &u).unwrap() - 1.0).abs() < 1e-12);
        let c = ImageGrid::filled(4, 4, 0.5).unwrap();
        assert!((ssim(&c, &c).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn symmetric() {
        let (u, v) = (random_image(2), random_image(3));
        assert_eq!(ssim(&u, &v).unwrap(), ssim(&v, &u).unwrap());
    }

    #[test]
    fn constant_black_against_white() {
        let u = ImageGrid::filled(4, 4, 0.0).unwrap();
        let v = ImageGrid::filled(4, 4, 1.0).unwrap();
        let expected = C_MEAN * C_VAR / ((1.0 + C_MEAN) * C_VAR);
        assert!((ssim(&u, &v).unwrap() - expected).abs() < 1e-15);
    }

    #[test]
    fn bounded_above_by_one() {
        for s in 0..20 {
            let x = ssim(&random_image(s), &random_image(s + 100)).unwrap();
            assert!(x > -1.0 && x <= 1.0);
        }
    }

    #[test]
    fn shape_checks() {
        let a = ImageGrid::filled(2, 2, 0.0).unwrap();
        let b = ImageGrid::filled(4, 1, 0.0).unwrap();
        assert!(ssim(&a, &b).is_err());
        let one = ImageGrid::filled(1, 1, 0.0).unwrap();
        assert!(ssim(&one, &one).is_err());
    }
}
