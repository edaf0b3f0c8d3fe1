//! Fourier tools on the uniform periodic grid `alpha_j = 2 pi j / N`.
//!
//! Coefficients are normalized so that `f(alpha_j) = sum_k c_k e^{i k alpha_j}`,
//! i.e. the forward transform divides by `N`.

use std::cell::RefCell;
use std::f64::consts::PI;

use num_complex::Complex64;
use rustfft::FftPlanner;

use super::GeometryError;

thread_local! {
    static PLANNER: RefCell<FftPlanner<f64>> = RefCell::new(FftPlanner::new());
}

pub fn check_grid(n: usize) -> Result<(), GeometryError> {
    if n < 4 || !n.is_power_of_two() {
        return Err(GeometryError::GridSize(n));
    }
    Ok(())
}

/// Signed wavenumber of FFT slot `j`; the Nyquist slot maps to `+N/2`.
#[inline]
pub fn wavenumber(j: usize, n: usize) -> f64 {
    if j <= n / 2 {
        j as f64
    } else {
        j as f64 - n as f64
    }
}

/// Uniform grid `2 pi j / n`.
pub fn grid(n: usize) -> Vec<f64> {
    (0..n).map(|j| 2.0 * PI * j as f64 / n as f64).collect()
}

/// Normalized forward transform of real samples.
pub fn forward(f: &[f64]) -> Vec<Complex64> {
    let n = f.len();
    let mut buf: Vec<Complex64> = f.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    PLANNER.with(|p| p.borrow_mut().plan_fft_forward(n).process(&mut buf));
    let inv = 1.0 / n as f64;
    for c in &mut buf {
        *c *= inv;
    }
    buf
}

/// Real part of the inverse of [`forward`].
pub fn inverse(c: &[Complex64]) -> Vec<f64> {
    let n = c.len();
    let mut buf = c.to_vec();
    PLANNER.with(|p| p.borrow_mut().plan_fft_inverse(n).process(&mut buf));
    buf.iter().map(|z| z.re).collect()
}

/// Multiply coefficients by `(ik)^order`, zeroing the Nyquist slot for odd orders.
pub fn differentiate_coeffs(c: &mut [Complex64], order: u32) {
    let n = c.len();
    for (j, cj) in c.iter_mut().enumerate() {
        if order % 2 == 1 && j == n / 2 {
            *cj = Complex64::new(0.0, 0.0);
            continue;
        }
        let ik = Complex64::new(0.0, wavenumber(j, n));
        *cj *= ik.powu(order);
    }
}

/// `order`-th derivative of periodic samples.
pub fn spectral_derivative(f: &[f64], order: u32) -> Result<Vec<f64>, GeometryError> {
    check_grid(f.len())?;
    let mut c = forward(f);
    differentiate_coeffs(&mut c, order);
    Ok(inverse(&c))
}

/// Splits `int_0^alpha g` into `mean * alpha + P(alpha)` with `P` periodic and
/// `P(0) = 0`. Returns `(P at the nodes, mean)`.
pub fn cumulative_integral(g: &[f64]) -> (Vec<f64>, f64) {
    let n = g.len();
    let mut c = forward(g);
    let mean = c[0].re;
    integrate_coeffs(&mut c);
    let mut p = inverse(&c);
    let p0 = p[0];
    for v in &mut p {
        *v -= p0;
    }
    debug_assert_eq!(p.len(), n);
    (p, mean)
}

/// Replace coefficients of `g` by those of a periodic antiderivative with zero
/// mean; the constant and Nyquist slots are cleared.
pub fn integrate_coeffs(c: &mut [Complex64]) {
    let n = c.len();
    for (j, cj) in c.iter_mut().enumerate() {
        if j == 0 || j == n / 2 {
            *cj = Complex64::new(0.0, 0.0);
        } else {
            *cj /= Complex64::new(0.0, wavenumber(j, n));
        }
    }
}

/// Evaluate the trigonometric interpolant at an arbitrary `alpha`. The Nyquist
/// slot contributes `Re(c) cos(N alpha / 2)` so the result is real.
pub fn interpolate(c: &[Complex64], alpha: f64) -> f64 {
    let n = c.len();
    let mut acc = c[0].re;
    let step = Complex64::from_polar(1.0, alpha);
    let mut e = step;
    for cj in &c[1..n / 2] {
        acc += 2.0 * (cj * e).re;
        e *= step;
    }
    acc + c[n / 2].re * (0.5 * n as f64 * alpha).cos()
}

/// 25th-order exponential filter `exp(-10 (2|k|/N)^25)` applied to coefficients.
pub fn filter_coeffs(c: &mut [Complex64]) {
    let n = c.len();
    for (j, cj) in c.iter_mut().enumerate() {
        let r = 2.0 * wavenumber(j, n).abs() / n as f64;
        *cj *= (-10.0 * r.powi(25)).exp();
    }
}

/// [`filter_coeffs`] on real samples.
pub fn fourier_filter(f: &[f64]) -> Result<Vec<f64>, GeometryError> {
    check_grid(f.len())?;
    let mut c = forward(f);
    filter_coeffs(&mut c);
    Ok(inverse(&c))
}

/// Zero every coefficient whose magnitude is below `floor`.
pub fn krasny_filter(c: &mut [Complex64], floor: f64) {
    for cj in c.iter_mut() {
        if cj.norm() < floor {
            *cj = Complex64::new(0.0, 0.0);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn max_err(a: &[f64], b: &[f64]) -> f64 {
        a.iter()
            .zip(b)
            .map(|(x, y)| (x - y).abs())
            .fold(0.0, f64::max)
    }

    #[test]
    fn derivative_of_cosine() {
        let a = grid(64);
        let f: Vec<f64> = a.iter().map(|t| (3.0 * t).cos()).collect();
        let d = spectral_derivative(&f, 1).unwrap();
        let want: Vec<f64> = a.iter().map(|t| -3.0 * (3.0 * t).sin()).collect();
        assert!(max_err(&d, &want) < 1e-12);
    }

    #[test]
    fn derivative_of_constant_vanishes() {
        let f = vec![2.5; 32];
        for order in 1..=4 {
            let d = spectral_derivative(&f, order).unwrap();
            assert!(d.iter().all(|v| v.abs() < 1e-14));
        }
    }

    #[test]
    fn second_derivative_mixed_modes() {
        let a = grid(64);
        let f: Vec<f64> = a
            .iter()
            .map(|t| (2.0 * t).cos() + 0.5 * (5.0 * t).sin())
            .collect();
        let d = spectral_derivative(&f, 2).unwrap();
        let want: Vec<f64> = a
            .iter()
            .map(|t| -4.0 * (2.0 * t).cos() - 12.5 * (5.0 * t).sin())
            .collect();
        assert!(max_err(&d, &want) < 1e-11);
    }

    #[test]
    fn odd_derivative_drops_nyquist() {
        let n = 16;
        let f: Vec<f64> = (0..n)
            .map(|j| if j % 2 == 0 { 1.0 } else { -1.0 })
            .collect();
        let d = spectral_derivative(&f, 1).unwrap();
        assert!(d.iter().all(|v| v.abs() < 1e-14));
        let d2 = spectral_derivative(&f, 2).unwrap();
        assert!((d2[0] + 64.0).abs() < 1e-10);
    }

    #[test]
    fn rejects_bad_grid() {
        assert!(spectral_derivative(&[1.0; 12], 1).is_err());
        assert!(spectral_derivative(&[1.0; 2], 1).is_err());
    }

    #[test]
    fn cumulative_integral_of_shifted_cosine() {
        let a = grid(64);
        let g: Vec<f64> = a.iter().map(|t| 1.5 + (2.0 * t).cos()).collect();
        let (p, mean) = cumulative_integral(&g);
        assert!((mean - 1.5).abs() < 1e-14);
        let want: Vec<f64> = a.iter().map(|t| 0.5 * (2.0 * t).sin()).collect();
        assert!(max_err(&p, &want) < 1e-14);
    }

    #[test]
    fn interpolation_is_exact_for_band_limited() {
        let a = grid(32);
        let f: Vec<f64> = a
            .iter()
            .map(|t| (3.0 * t).sin() - 0.2 * (7.0 * t).cos())
            .collect();
        let c = forward(&f);
        for &t in &[0.1f64, 1.234, 4.0, 6.2] {
            let want = (3.0 * t).sin() - 0.2 * (7.0 * t).cos();
            assert!((interpolate(&c, t) - want).abs() < 1e-13);
        }
    }

    #[test]
    fn filter_profile() {
        let n = 64;
        let c0 = vec![3.0; n];
        let f = fourier_filter(&c0).unwrap();
        assert!(max_err(&f, &c0) < 1e-14);

        let nyq: Vec<f64> = (0..n)
            .map(|j| if j % 2 == 0 { 1.0 } else { -1.0 })
            .collect();
        let f = fourier_filter(&nyq).unwrap();
        assert!((f[0] - (-10.0f64).exp()).abs() < 1e-16);
        assert!(((-10.0f64).exp() - 4.54e-5).abs() < 1e-7);

        let a = grid(n);
        let quarter: Vec<f64> = a.iter().map(|t| (16.0 * t).cos()).collect();
        let f = fourier_filter(&quarter).unwrap();
        let factor = (-10.0 * 2f64.powi(-25)).exp();
        assert!((f[0] - factor).abs() < 1e-15);
        assert!((1.0 - factor - 2.98e-7).abs() < 1e-9);
    }

    #[test]
    fn filter_twice_preserves_low_modes() {
        let n = 128;
        let a = grid(n);
        let f: Vec<f64> = a
            .iter()
            .map(|t| (t).cos() + (10.0 * t).sin() + (32.0 * t).cos())
            .collect();
        let once = forward(&fourier_filter(&f).unwrap());
        let twice = forward(&fourier_filter(&fourier_filter(&f).unwrap()).unwrap());
        for k in [1usize, 10, 32] {
            let r = (twice[k] - once[k]).norm() / once[k].norm();
            assert!(r < 1e-6);
        }
    }

    #[test]
    fn krasny_zeroes_only_small_modes() {
        let mut c = vec![
            Complex64::new(1.0, 0.0),
            Complex64::new(1e-13, 0.0),
            Complex64::new(0.0, 2e-12),
            Complex64::new(5e-13, 5e-13),
        ];
        let before: f64 = c.iter().map(|z| z.norm_sqr()).sum();
        krasny_filter(&mut c, 1e-12);
        assert_eq!(c[1], Complex64::new(0.0, 0.0));
        assert_eq!(c[3], Complex64::new(0.0, 0.0));
        assert_eq!(c[0], Complex64::new(1.0, 0.0));
        assert_eq!(c[2], Complex64::new(0.0, 2e-12));
        let after: f64 = c.iter().map(|z| z.norm_sqr()).sum();
        assert!((before - after).abs() < 4.0 * 1e-24);

        let mut big = vec![Complex64::new(0.5, 0.5); 8];
        let copy = big.clone();
        krasny_filter(&mut big, 1e-12);
        assert_eq!(big, copy);
    }
}
