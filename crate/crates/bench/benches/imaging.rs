use criterion::{criterion_group, criterion_main, Criterion};
use dgopt::problems::{haar, ssim, tv_denoise_pdhg, wavelet_denoise, ImageGrid};
use std::hint::black_box;

fn imaging(c: &mut Criterion) {
    let clean = ImageGrid::synthetic_squares(64, 64).unwrap();
    let noisy = clean.with_gaussian_noise(0.1, 7).unwrap();
    c.bench_function("haar/dwt_idwt_64", |b| {
        b.iter(|| haar::haar_idwt(&haar::haar_dwt(black_box(&noisy), 4).unwrap()).unwrap())
    });
    c.bench_function("haar/denoise_64", |b| b.iter(|| wavelet_denoise(black_box(&noisy), 0.1, 4, false).unwrap()));
    c.bench_function("pdhg/64_300", |b| b.iter(|| tv_denoise_pdhg(black_box(&noisy), 0.1, 300).unwrap()));
    c.bench_function("ssim/64", |b| b.iter(|| ssim(black_box(&clean), black_box(&noisy)).unwrap()));
}

criterion_group!(benches, imaging);
criterion_main!(benches);
