//! Special functions: exponentially scaled modified Bessel functions of
//! orders 0 and 1, the inverse complementary error function and a log-space
//! binomial coefficient.

use crate::scalar::{lit, to_f64, Real};

// Above this argument the Hankel asymptotic series is used. Its smallest
// term is about exp(-2x), i.e. far below f64 resolution here.
const ASYMPTOTIC_FROM: f64 = 20.0;

/// `e^{-x} I_n(x)` for `n ∈ {0, 1}` and `x ≥ 0` by the power series.
fn scaled_series<T: Real>(n: u32, x: T) -> T {
    let q = lit::<T>(0.25) * x * x;
    let mut term = if n == 0 { T::one() } else { lit::<T>(0.5) * x };
    let mut sum = term;
    let mut k = 1.0;
    loop {
        term = term * q / (lit::<T>(k) * lit::<T>(k + n as f64));
        sum = sum + term;
        if term <= sum * T::epsilon() {
            break;
        }
        k += 1.0;
        if k > 500.0 {
            break;
        }
    }
    sum * (-x).exp()
}

/// `e^{-x} I_n(x)` by the large-argument expansion.
fn scaled_asymptotic<T: Real>(n: u32, x: T) -> T {
    let mu = lit::<T>(4.0 * (n * n) as f64);
    let mut term = T::one();
    let mut sum = T::one();
    let mut k = 1.0;
    loop {
        let odd = lit::<T>(2.0 * k - 1.0);
        let next = -term * (mu - odd * odd) / (lit::<T>(k * 8.0) * x);
        if next.abs() >= term.abs() || next.abs() <= sum.abs() * T::epsilon() {
            if next.abs() < term.abs() {
                sum = sum + next;
            }
            break;
        }
        sum = sum + next;
        term = next;
        k += 1.0;
    }
    sum / (lit::<T>(2.0) * T::PI() * x).sqrt()
}

/// `e^{-|x|} I₀(x)`.
pub fn bessel_i0e<T: Real>(x: T) -> T {
    let ax = x.abs();
    if ax < lit(ASYMPTOTIC_FROM) {
        scaled_series(0, ax)
    } else {
        scaled_asymptotic(0, ax)
    }
}

/// `e^{-|x|} I₁(x)` (odd in `x`).
pub fn bessel_i1e<T: Real>(x: T) -> T {
    let ax = x.abs();
    let v = if ax < lit(ASYMPTOTIC_FROM) {
        scaled_series(1, ax)
    } else {
        scaled_asymptotic(1, ax)
    };
    if x < T::zero() {
        -v
    } else {
        v
    }
}

/// `1 − e^{-y} I₀(y)` for `y ≥ 0`, free of cancellation near `y = 0`.
///
/// For small `y` this uses `e^{-y}I₀(y) = ₁F₁(½; 1; −2y)`.
pub fn one_minus_i0e<T: Real>(y: T) -> T {
    if y < lit(0.5) {
        let mut term = T::one();
        let mut sum = T::zero();
        let mut k = 1.0;
        loop {
            // (1/2)_k (−2y)^k / (k!)^2, built recursively
            term = term * lit::<T>(k - 0.5) * lit::<T>(-2.0) * y / lit::<T>(k * k);
            sum = sum + term;
            if term.abs() <= sum.abs() * T::epsilon() || k > 200.0 {
                break;
            }
            k += 1.0;
        }
        -sum
    } else {
        T::one() - bessel_i0e(y)
    }
}

/// Inverse complementary error function, `erfc(erfc_inv(p)) = p` for
/// `p ∈ (0, 2)`.
pub fn erfc_inv<T: Real>(p: T) -> T {
    lit(statrs::function::erf::erfc_inv(to_f64(p)))
}

/// `log₂ C(k + 4, 4)` evaluated in log space, valid for huge `k`.
pub fn log2_binomial_plus4<T: Real>(k: T) -> T {
    let mut s = T::zero();
    for i in 1..=4 {
        s = s + (k + lit(i as f64)).ln();
    }
    (s - lit::<T>(24.0).ln()) / T::LN_2()
}

#[cfg(test)]
mod tests {
    use super::*;

    /// e^{-x} I_n(x) = (1/π)∫₀^π e^{x(cos t − 1)} cos(nt) dt; the
    /// trapezoid rule is spectrally accurate for this periodic integrand.
    fn oracle(n: u32, x: f64) -> f64 {
        let m = 4000;
        let h = std::f64::consts::PI / m as f64;
        let mut s = 0.0;
        for j in 0..=m {
            let t = j as f64 * h;
            let w = if j == 0 || j == m { 0.5 } else { 1.0 };
            s += w * (x * (t.cos() - 1.0)).exp() * (n as f64 * t).cos();
        }
        s * h / std::f64::consts::PI
    }

    #[test]
    fn bessel_against_trapezoid_oracle() {
        for &x in &[1e-6, 1e-3, 0.1, 0.5, 1.0, 3.0, 3.75, 7.5, 15.0, 19.99, 20.0, 35.0, 120.0, 900.0] {
            let (o0, o1) = (oracle(0, x), oracle(1, x));
            assert!((bessel_i0e(x) / o0 - 1.0).abs() < 1e-12, "i0e({x})");
            // the oracle for I₁ cancels to ~eps/x relative accuracy
            let tol1 = 1e-12f64.max(4e-16 / x);
            assert!((bessel_i1e(x) / o1 - 1.0).abs() < tol1, "i1e({x})");
        }
    }

    #[test]
    fn bessel_small_argument_series() {
        let x = 1e-4f64;
        let i1 = x / 2.0 + x.powi(3) / 16.0;
        assert!((bessel_i1e(x) * x.exp() / i1 - 1.0).abs() < 1e-14);
        assert_eq!(bessel_i0e(0.0f64), 1.0);
        assert_eq!(bessel_i1e(0.0f64), 0.0);
        assert!(bessel_i1e(-2.0f64) < 0.0);
    }

    #[test]
    fn one_minus_i0e_is_smooth_across_switch() {
        for &y in &[1e-9, 1e-5, 0.01, 0.3, 0.49999, 0.5, 2.0] {
            let direct = 1.0 - oracle(0, y);
            let got = one_minus_i0e(y);
            // the oracle itself loses ~eps/y relative accuracy at tiny y
            let tol = 1e-12f64.max(1e-15 / y);
            assert!((got / direct - 1.0).abs() < tol, "y={y}: {got} vs {direct}");
        }
        // leading behaviour y − 3y²/4
        let y = 1e-8f64;
        assert!((one_minus_i0e(y) / (y - 0.75 * y * y) - 1.0).abs() < 1e-14);
    }

    #[test]
    fn erfc_inv_against_tail_quadrature() {
        use crate::quad::{integrate_to_inf, Tolerance};
        for &p in &[1e-3f64, 2f64.powi(-33), 1e-20] {
            let x = erfc_inv(p);
            let tail = integrate_to_inf(|t: f64| (-t * t).exp(), x, Tolerance::rel(1e-12)).unwrap();
            let back = 2.0 / std::f64::consts::PI.sqrt() * tail.value;
            assert!((back / p - 1.0).abs() < 1e-8, "p={p}");
        }
    }

    #[test]
    fn binomial_log_space() {
        let v: f64 = log2_binomial_plus4(6.0);
        assert!((v - 210f64.log2()).abs() < 1e-12);
        let big: f64 = log2_binomial_plus4(3e8);
        assert!((big - (4.0 * 3e8f64.log2() - 24f64.log2())).abs() < 1e-6);
    }

    #[test]
    fn single_precision() {
        assert!((bessel_i0e(2.0f32) - 0.3085083f32).abs() < 1e-6);
    }
}
