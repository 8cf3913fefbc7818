//! Search-direction sequences on the unit sphere.
//!
//! Randomised strategies draw from a [`ChaCha8Rng`] seeded with
//! `seed_from_u64`, and normal variates come from `rand_distr::StandardNormal`.
//! Both are value-stable across platforms, so a seed fixes the whole sequence.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};

/// Fractional part of the golden ratio, the default irrational rotation.
pub const GOLDEN_FRACTION: f64 = 0.618_033_988_749_894_8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum DirectionKind {
    /// `e_1, e_2, ..., e_n, e_1, ...`: the standard Itoh–Abe method.
    CyclicCoordinates,
    /// Independent uniform draws on the sphere.
    RandomPursuit,
    /// Consecutive blocks of `n` directions form a Haar-random orthonormal basis.
    RotatedBlocks,
    /// Irrational rotation of a line in the plane; only for `n = 2`.
    DeterministicDense,
}

impl DirectionKind {
    pub const ALL: [DirectionKind; 4] = [
        DirectionKind::CyclicCoordinates,
        DirectionKind::RandomPursuit,
        DirectionKind::RotatedBlocks,
        DirectionKind::DeterministicDense,
    ];

    pub fn name(self) -> &'static str {
        match self {
            DirectionKind::CyclicCoordinates => "cyclic",
            DirectionKind::RandomPursuit => "random",
            DirectionKind::RotatedBlocks => "rotated",
            DirectionKind::DeterministicDense => "dense2d",
        }
    }
}

impl fmt::Display for DirectionKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for DirectionKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        DirectionKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| {
                Error::config(
                    "directions",
                    format!("unknown strategy `{s}` (expected cyclic, random, rotated or dense2d)"),
                )
            })
    }
}

/// A unit direction together with its position in the underlying family:
/// the coordinate for cyclic, the column of the current basis for rotated
/// blocks and the sequence index otherwise.
#[derive(Debug, Clone, PartialEq)]
pub struct Direction {
    pub vector: Vec<f64>,
    pub index: usize,
}

/// Stateful generator of unit search directions.
#[derive(Debug, Clone)]
pub struct DirectionStrategy {
    kind: DirectionKind,
    dim: usize,
    rng: ChaCha8Rng,
    block: Option<(usize, DMatrix<f64>)>,
    irrational: f64,
}

impl DirectionStrategy {
    pub fn new(kind: DirectionKind, dim: usize, seed: u64) -> Result<Self> {
        if dim < 1 {
            return Err(Error::config("dimension", "must be at least 1"));
        }
        if kind == DirectionKind::DeterministicDense && dim != 2 {
            return Err(Error::UnsupportedDimension {
                strategy: kind.name(),
                dim,
            });
        }
        Ok(DirectionStrategy {
            kind,
            dim,
            rng: ChaCha8Rng::seed_from_u64(seed),
            block: None,
            irrational: GOLDEN_FRACTION,
        })
    }

    /// Replaces the rotation number of the dense planar sequence.
    pub fn with_irrational(mut self, irrational: f64) -> Self {
        self.irrational = irrational;
        self
    }

    /// A fresh copy of this strategy with its own random stream.
    pub fn reseeded(&self, seed: u64) -> Self {
        DirectionStrategy {
            rng: ChaCha8Rng::seed_from_u64(seed),
            block: None,
            ..self.clone()
        }
    }

    pub fn kind(&self) -> DirectionKind {
        self.kind
    }

    pub fn dimension(&self) -> usize {
        self.dim
    }

    /// The direction used at iteration `k`.
    pub fn next_direction(&mut self, k: usize) -> Direction {
        let n = self.dim;
        match self.kind {
            DirectionKind::CyclicCoordinates => {
                let i = k % n;
                let mut vector = vec![0.0; n];
                vector[i] = 1.0;
                Direction { vector, index: i }
            }
            DirectionKind::RandomPursuit => Direction {
                vector: uniform_sphere(&mut self.rng, n),
                index: k,
            },
            DirectionKind::RotatedBlocks => {
                let block_id = k / n;
                let stale = !matches!(&self.block, Some((id, _)) if *id == block_id);
                if stale {
                    let q = random_orthogonal(&mut self.rng, n);
                    self.block = Some((block_id, q));
                }
                let (_, q) = self.block.as_ref().expect("block drawn above");
                let col = k % n;
                Direction {
                    vector: q.column(col).iter().copied().collect(),
                    index: col,
                }
            }
            DirectionKind::DeterministicDense => Direction {
                vector: deterministic_dense_2d(k, self.irrational).to_vec(),
                index: k,
            },
        }
    }
}

/// Uniform draw on `S^{n-1}` by normalising i.i.d. standard normals.
pub fn uniform_sphere<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Vec<f64> {
    loop {
        let mut v: Vec<f64> = (0..n).map(|_| rng.sample(StandardNormal)).collect();
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm > 0.0 && norm.is_finite() {
            v.iter_mut().for_each(|x| *x /= norm);
            return v;
        }
    }
}

/// Haar-distributed orthogonal matrix: QR of a Gaussian matrix with the signs
/// of `Q`'s columns chosen so that `R` has a positive diagonal.
pub fn random_orthogonal<R: Rng + ?Sized>(rng: &mut R, n: usize) -> DMatrix<f64> {
    let gaussian = DMatrix::from_fn(n, n, |_, _| rng.sample::<f64, _>(StandardNormal));
    let qr = gaussian.qr();
    let r = qr.r();
    let mut q = qr.q();
    for j in 0..n {
        if r[(j, j)] < 0.0 {
            q.column_mut(j).neg_mut();
        }
    }
    q
}

/// `(cos θ_k, sin θ_k)` with `θ_k = π · frac(irrational · k)`.
pub fn deterministic_dense_2d(k: usize, irrational: f64) -> [f64; 2] {
    let theta = PI * (irrational * k as f64).rem_euclid(1.0);
    [theta.cos(), theta.sin()]
}

#[cfg(test)]
mod tests {
    use super::*;

    fn norm(v: &[f64]) -> f64 {
        v.iter().map(|x| x * x).sum::<f64>().sqrt()
    }

    #[test]
    fn cyclic_cycles_through_basis() {
        let mut s = DirectionStrategy::new(DirectionKind::CyclicCoordinates, 3, 0).unwrap();
        let got: Vec<Vec<f64>> = (0..4).map(|k| s.next_direction(k).vector).collect();
        assert_eq!(
            got,
            vec![
                vec![1.0, 0.0, 0.0],
                vec![0.0, 1.0, 0.0],
                vec![0.0, 0.0, 1.0],
                vec![1.0, 0.0, 0.0]
            ]
        );
    }

    #[test]
    fn one_dimensional_sphere_is_plus_minus_one() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let mut seen = [false; 2];
        for _ in 0..100 {
            let v = uniform_sphere(&mut rng, 1);
            assert!(v[0] == 1.0 || v[0] == -1.0);
            seen[(v[0] > 0.0) as usize] = true;
        }
        assert!(seen[0] && seen[1]);
    }

    #[test]
    fn sphere_draws_have_zero_mean() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let mut mean = [0.0; 3];
        let draws = 100_000;
        for _ in 0..draws {
            let v = uniform_sphere(&mut rng, 3);
            assert!((norm(&v) - 1.0).abs() <= 1e-12);
            for (m, x) in mean.iter_mut().zip(&v) {
                *m += x / draws as f64;
            }
        }
        for m in mean {
            assert!(m.abs() < 0.02, "coordinate mean {m}");
        }
    }

    #[test]
    fn orthogonal_matrices() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let q1 = random_orthogonal(&mut rng, 1);
        assert_eq!(q1[(0, 0)].abs(), 1.0);
        for n in 1..8 {
            for _ in 0..20 {
                let q = random_orthogonal(&mut rng, n);
                let err = (q.transpose() * &q - DMatrix::identity(n, n)).amax();
                assert!(err <= 1e-10, "n={n}: {err}");
                let det = q.determinant();
                assert!((det.abs() - 1.0).abs() <= 1e-10, "det {det}");
            }
        }
    }

    #[test]
    fn rotated_blocks_are_orthonormal() {
        for n in [2, 3, 5] {
            let mut s = DirectionStrategy::new(DirectionKind::RotatedBlocks, n, 9).unwrap();
            for block in 0..20 {
                let cols: Vec<Vec<f64>> =
                    (0..n).map(|i| s.next_direction(block * n + i).vector).collect();
                let d = DMatrix::from_fn(n, n, |i, j| cols[j][i]);
                let err = (d.transpose() * &d - DMatrix::identity(n, n)).amax();
                assert!(err <= 1e-10);
            }
        }
    }

    #[test]
    fn rotated_blocks_redraw_per_block() {
        let mut s = DirectionStrategy::new(DirectionKind::RotatedBlocks, 2, 1).unwrap();
        let a = s.next_direction(0);
        let b = s.next_direction(1);
        let c = s.next_direction(2);
        let dot: f64 = a.vector.iter().zip(&b.vector).map(|(x, y)| x * y).sum();
        assert!(dot.abs() <= 1e-10);
        assert_eq!((a.index, b.index, c.index), (0, 1, 0));
        assert_ne!(a.vector, c.vector);
    }

    #[test]
    fn all_strategies_emit_unit_vectors() {
        for kind in DirectionKind::ALL {
            let n = 2;
            let mut s = DirectionStrategy::new(kind, n, 42).unwrap();
            for k in 0..10_000 {
                let d = s.next_direction(k);
                assert_eq!(d.vector.len(), n);
                assert!((norm(&d.vector) - 1.0).abs() <= 1e-12, "{kind} k={k}");
            }
        }
        for kind in [DirectionKind::RandomPursuit, DirectionKind::RotatedBlocks] {
            let mut s = DirectionStrategy::new(kind, 7, 42).unwrap();
            for k in 0..2_000 {
                assert!((norm(&s.next_direction(k).vector) - 1.0).abs() <= 1e-12);
            }
        }
    }

    #[test]
    fn same_seed_same_sequence() {
        for kind in DirectionKind::ALL {
            let mut a = DirectionStrategy::new(kind, 2, 1234).unwrap();
            let mut b = DirectionStrategy::new(kind, 2, 1234).unwrap();
            let mut c = a.reseeded(1234);
            for k in 0..500 {
                let da = a.next_direction(k);
                assert_eq!(da, b.next_direction(k));
                assert_eq!(da, c.next_direction(k));
            }
        }
    }

    #[test]
    fn dense_sequence_examples() {
        assert_eq!(deterministic_dense_2d(0, GOLDEN_FRACTION), [1.0, 0.0]);
        let d = deterministic_dense_2d(1, GOLDEN_FRACTION);
        let theta = d[1].atan2(d[0]);
        assert!((theta - 1.941_611_038_725_466).abs() < 1e-12, "{theta}");
    }

    #[test]
    fn dense_sequence_covers_half_circle() {
        // brute-force cover check on a fine grid of [0, π)
        let angles: Vec<f64> = (0..200)
            .map(|k| {
                let d = deterministic_dense_2d(k, GOLDEN_FRACTION);
                d[1].atan2(d[0]).rem_euclid(PI)
            })
            .collect();
        let radius = PI / 10.0;
        for g in 0..10_000 {
            let phi = PI * g as f64 / 10_000.0;
            let hit = angles.iter().any(|a| {
                let diff = (a - phi).abs();
                diff.min(PI - diff) <= radius
            });
            assert!(hit, "angle {phi} not covered");
        }
    }

    #[test]
    fn dense_sequence_never_repeats() {
        let mut angles: Vec<f64> = (0..1000)
            .map(|k| PI * (GOLDEN_FRACTION * k as f64).rem_euclid(1.0))
            .collect();
        angles.sort_by(f64::total_cmp);
        assert!(angles.windows(2).all(|w| w[1] - w[0] > 0.0));
    }

    #[test]
    fn dense_requires_plane() {
        assert!(matches!(
            DirectionStrategy::new(DirectionKind::DeterministicDense, 3, 0),
            Err(Error::UnsupportedDimension { dim: 3, .. })
        ));
    }

    #[test]
    fn parse_names() {
        for kind in DirectionKind::ALL {
            assert_eq!(kind.name().parse::<DirectionKind>().unwrap(), kind);
        }
        assert!("spiral".parse::<DirectionKind>().is_err());
    }
}
