/// `(1 - x)^2 + 100 (y - x^2)^2`, minimised at `(1, 1)`.
pub fn rosenbrock(p: &[f64]) -> f64 {
    let (x, y) = (p[0], p[1]);
    (1.0 - x).powi(2) + 100.0 * (y - x * x).powi(2)
}

/// Nesterov's second nonsmooth Chebyshev–Rosenbrock function
/// `|x - 1| / 4 + |y - 2|x| + 1|`. The minimiser `(1, 1)` sits on a narrow
/// kinked path and `(0, -1)` is a nonminimising Clarke stationary point.
pub fn nesterov_nonsmooth(p: &[f64]) -> f64 {
    let (x, y) = (p[0], p[1]);
    0.25 * (x - 1.0).abs() + (y - 2.0 * x.abs() + 1.0).abs()
}

/// `|x1| + n |x2|`. From `(-1, 0)` a direction `(cos θ, sin θ)` descends only
/// for `|θ| < atan(1/n)`.
pub fn narrow_descent(p: &[f64], n: f64) -> f64 {
    p[0].abs() + n * p[1].abs()
}

/// `max(x, y)`. Unbounded below, so only suitable for single-step tests.
pub fn max_coords(p: &[f64]) -> f64 {
    p[0].max(p[1])
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn rosenbrock_values() {
        assert_eq!(rosenbrock(&[1.0, 1.0]), 0.0);
        assert_eq!(rosenbrock(&[0.0, 0.0]), 1.0);
        assert_eq!(rosenbrock(&[-1.0, 1.0]), 4.0);
    }

    #[test]
    fn nesterov_values() {
        assert_eq!(nesterov_nonsmooth(&[1.0, 1.0]), 0.0);
        assert_eq!(nesterov_nonsmooth(&[0.0, -1.0]), 0.25);
        assert_eq!(nesterov_nonsmooth(&[0.0, 0.0]), 1.25);
    }

    #[test]
    fn narrow_and_max_values() {
        assert_eq!(narrow_descent(&[-1.0, 0.0], 10.0), 1.0);
        assert_eq!(narrow_descent(&[0.0, 0.0], 3.0), 0.0);
        assert_eq!(max_coords(&[1.0, 1.0]), 1.0);
        assert_eq!(max_coords(&[0.0, -3.0]), 0.0);
    }

    #[test]
    fn narrow_descent_cone() {
        let n = 100.0;
        let edge = (1.0_f64 / n).atan();
        let descends = |theta: f64| {
            let t = 1e-6;
            narrow_descent(&[-1.0 + t * theta.cos(), t * theta.sin()], n) < 1.0
        };
        for frac in [0.0, 0.5, 0.9, -0.5, -0.9] {
            assert!(descends(frac * edge), "θ = {} should descend", frac * edge);
        }
        for frac in [1.1, 2.0, -1.1, 10.0] {
            assert!(!descends(frac * edge), "θ = {} should not descend", frac * edge);
        }
    }

    proptest! {
        #[test]
        fn formulas_are_total(x in -1e6f64..1e6, y in -1e6f64..1e6) {
            let p = [x, y];
            prop_assert!(rosenbrock(&p).is_finite());
            prop_assert!(nesterov_nonsmooth(&p).is_finite());
            prop_assert!(narrow_descent(&p, 50.0).is_finite());
            prop_assert!(max_coords(&p).is_finite());
        }
    }
}
