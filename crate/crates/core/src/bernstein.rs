//! Polynomials in Bernstein form on `[0, 1]`.
//!
//! Coefficients may be scalars, vectors or quaternions: anything that can be
//! added and scaled by a real.

use std::ops::{Add, Mul};

/// Values that can be combined linearly.
pub trait Linear: Copy + Add<Output = Self> + Mul<f64, Output = Self> {}

impl<T: Copy + Add<Output = T> + Mul<f64, Output = T>> Linear for T {}

pub fn binomial(n: usize, k: usize) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    (0..k).fold(1.0, |acc, j| acc * (n - j) as f64 / (j + 1) as f64)
}

/// De Casteljau evaluation.
pub fn eval<T: Linear>(coeffs: &[T], t: f64) -> T {
    assert!(!coeffs.is_empty(), "empty Bernstein polynomial");
    let mut work: Vec<T> = coeffs.to_vec();
    let s = 1.0 - t;
    for r in 1..work.len() {
        for i in 0..work.len() - r {
            work[i] = work[i] * s + work[i + 1] * t;
        }
    }
    work[0]
}

/// Bernstein coefficients of the derivative (degree drops by one).
pub fn derivative<T: Linear>(coeffs: &[T]) -> Vec<T> {
    let n = coeffs.len() - 1;
    if n == 0 {
        return vec![coeffs[0] * 0.0];
    }
    coeffs
        .windows(2)
        .map(|w| (w[1] + w[0] * -1.0) * n as f64)
        .collect()
}

/// Product of two Bernstein polynomials under a bilinear `mul`.
pub fn product<A, B, C, F>(a: &[A], b: &[B], mul: F) -> Vec<C>
where
    A: Copy,
    B: Copy,
    C: Linear,
    F: Fn(A, B) -> C,
{
    let (m, n) = (a.len() - 1, b.len() - 1);
    let mut out: Vec<Option<C>> = vec![None; m + n + 1];
    for (i, &ai) in a.iter().enumerate() {
        for (j, &bj) in b.iter().enumerate() {
            let w = binomial(m, i) * binomial(n, j) / binomial(m + n, i + j);
            let term = mul(ai, bj) * w;
            let slot = &mut out[i + j];
            *slot = Some(match *slot {
                Some(acc) => acc + term,
                None => term,
            });
        }
    }
    out.into_iter().map(|c| c.expect("every slot is filled")).collect()
}

/// Degree elevation by `r`.
pub fn elevate<T: Linear>(coeffs: &[T], r: usize) -> Vec<T> {
    if r == 0 {
        return coeffs.to_vec();
    }
    let ones = vec![1.0; r + 1];
    product(coeffs, &ones, |c, s| c * s)
}

/// Power-basis coefficients `c_0 + c_1 t + ...` of a scalar Bernstein polynomial.
pub fn to_power(coeffs: &[f64]) -> Vec<f64> {
    let n = coeffs.len() - 1;
    let mut out = vec![0.0; n + 1];
    for (i, &b) in coeffs.iter().enumerate() {
        // C(n,i) t^i (1-t)^(n-i) = sum_k C(n,i) C(n-i,k) (-1)^k t^(i+k)
        for k in 0..=n - i {
            let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
            out[i + k] += b * binomial(n, i) * binomial(n - i, k) * sign;
        }
    }
    out
}

/// Real roots of a scalar Bernstein polynomial in `[0, 1]`, located by sign
/// changes on a uniform grid and refined by bisection. Tangential roots are
/// not reported.
pub fn roots_in_unit(coeffs: &[f64], grid: usize) -> Vec<f64> {
    let mut roots = Vec::new();
    let mut t0 = 0.0;
    let mut f0 = eval(coeffs, t0);
    if f0 == 0.0 {
        roots.push(0.0);
    }
    for k in 1..=grid {
        let t1 = k as f64 / grid as f64;
        let f1 = eval(coeffs, t1);
        if f1 == 0.0 {
            roots.push(t1);
        } else if f0 * f1 < 0.0 {
            let (mut lo, mut hi, mut flo) = (t0, t1, f0);
            for _ in 0..200 {
                let mid = 0.5 * (lo + hi);
                let fm = eval(coeffs, mid);
                if fm == 0.0 || hi - lo < 1e-16 {
                    lo = mid;
                    hi = mid;
                    break;
                }
                if (fm < 0.0) == (flo < 0.0) {
                    lo = mid;
                    flo = fm;
                } else {
                    hi = mid;
                }
            }
            roots.push(0.5 * (lo + hi));
        }
        t0 = t1;
        f0 = f1;
    }
    roots
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    fn power_eval(c: &[f64], t: f64) -> f64 {
        c.iter().rev().fold(0.0, |acc, &x| acc * t + x)
    }

    #[test]
    fn binomials() {
        assert_eq!(binomial(4, 2), 6.0);
        assert_eq!(binomial(8, 0), 1.0);
        assert_eq!(binomial(7, 3), 35.0);
        assert_eq!(binomial(2, 3), 0.0);
    }

    #[test]
    fn linear_polynomial() {
        let c = [1.0, 3.0];
        assert_abs_diff_eq!(eval(&c, 0.25), 1.5);
        assert_eq!(derivative(&c), vec![2.0]);
        assert_eq!(to_power(&c), vec![1.0, 2.0]);
    }

    #[test]
    fn roots_of_quadratic() {
        // (2t - 1)^2 - 1/16 has roots 3/8 and 5/8
        let pw = [1.0 - 1.0 / 16.0, -4.0, 4.0];
        // power to Bernstein for degree 2: b0 = c0, b1 = c0 + c1/2, b2 = c0 + c1 + c2
        let b = [pw[0], pw[0] + pw[1] / 2.0, pw[0] + pw[1] + pw[2]];
        let r = roots_in_unit(&b, 64);
        assert_eq!(r.len(), 2);
        assert_abs_diff_eq!(r[0], 0.375, epsilon = 1e-14);
        assert_abs_diff_eq!(r[1], 0.625, epsilon = 1e-14);
    }

    proptest! {
        #[test]
        fn power_form_agrees(c in prop::collection::vec(-3.0..3.0f64, 1..8), t in 0.0..1.0f64) {
            let p = to_power(&c);
            prop_assert!((power_eval(&p, t) - eval(&c, t)).abs() <= 1e-12);
        }

        #[test]
        fn product_agrees(a in prop::collection::vec(-3.0..3.0f64, 1..6),
                          b in prop::collection::vec(-3.0..3.0f64, 1..6),
                          t in 0.0..1.0f64) {
            let ab = product(&a, &b, |x, y| x * y);
            prop_assert!((eval(&ab, t) - eval(&a, t) * eval(&b, t)).abs() <= 1e-12);
            let e = elevate(&a, 2);
            prop_assert!((eval(&e, t) - eval(&a, t)).abs() <= 1e-12);
        }

        #[test]
        fn derivative_agrees(c in prop::collection::vec(-3.0..3.0f64, 2..8), t in 0.01..0.99f64) {
            let h = 1e-6;
            let fd = (eval(&c, t + h) - eval(&c, t - h)) / (2.0 * h);
            prop_assert!((eval(&derivative(&c), t) - fd).abs() <= 1e-7);
        }
    }
}
