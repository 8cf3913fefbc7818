//! Benchmark objectives and the bilevel denoising suite.

mod benchmarks;
pub mod bilevel;
pub mod haar;
pub mod image;
pub mod ssim;
pub mod tv;

pub use benchmarks::{max_coords, narrow_descent, nesterov_nonsmooth, rosenbrock};
pub use bilevel::{BilevelProblem, InnerSolver, Score};
pub use haar::{haar_dwt, haar_idwt, shrink, soft_threshold, wavelet_denoise, HaarCoefficients};
pub use image::ImageGrid;
pub use ssim::ssim;
pub use tv::{tv_denoise_pdhg, tv_energy};
