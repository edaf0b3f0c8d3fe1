//! Modified Bessel functions `I_n` and `K_n` of integer order and real argument.
//!
//! Small arguments use the ascending power series. Large arguments use the
//! Hankel asymptotic expansion (for `I`) or Steed's continued fraction (for
//! `K`). Higher orders come from recurrences: upward for `K_n`, Miller's
//! downward recurrence for `I_n` wherever upward recurrence would lose digits.

// Fit coefficients are kept at full printed precision.
#![allow(clippy::excessive_precision)]

use std::sync::OnceLock;

use thiserror::Error;

/// Euler–Mascheroni constant.
pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

/// Below this argument `I_n` is summed from its power series. Above it the
/// Hankel expansion of `I_0`, `I_1` has a smallest term far below 1e-17.
const I_SERIES_MAX: f64 = 30.0;

/// Below this argument `K_0`, `K_1` use the logarithmic series, above it the
/// continued fraction. Both regimes were checked against the Wronskian on a
/// dense grid straddling this point.
const K_SERIES_MAX: f64 = 2.0;

#[derive(Debug, Error, Clone, Copy, PartialEq)]
pub enum BesselError {
    #[error("bessel argument {0} outside the domain")]
    Domain(f64),
}

/// `I_n(x)` for `x >= 0`.
pub fn bessel_i(n: u32, x: f64) -> Result<f64, BesselError> {
    if !x.is_finite() || x < 0.0 {
        return Err(BesselError::Domain(x));
    }
    Ok(bessel_i_unchecked(n, x))
}

/// `K_n(x)` for `x > 0`.
pub fn bessel_k(n: u32, x: f64) -> Result<f64, BesselError> {
    if !x.is_finite() || x <= 0.0 {
        return Err(BesselError::Domain(x));
    }
    let (k0, k1) = k0_k1(x);
    if n == 0 {
        return Ok(k0);
    }
    let (mut km, mut k) = (k0, k1);
    for j in 1..n {
        let kp = km + 2.0 * j as f64 / x * k;
        km = k;
        k = kp;
    }
    Ok(k)
}

fn bessel_i_unchecked(n: u32, x: f64) -> f64 {
    if x == 0.0 {
        return if n == 0 { 1.0 } else { 0.0 };
    }
    if x <= I_SERIES_MAX {
        return i_series(n, x);
    }
    let (i0, i1) = i0_i1_asymptotic(x);
    match n {
        0 => i0,
        1 => i1,
        _ => i0 * miller_ratio(n, x),
    }
}

/// `(I_0, I_1, K_0, K_1)` at one argument; the small-argument series share one
/// pass.
pub fn bessel_01(x: f64) -> (f64, f64, f64, f64) {
    if x <= K_SERIES_MAX {
        let p = series_parts(x);
        let (k0, k1) = p.k0_k1(x);
        (p.i0, p.i1x * x, k0, k1)
    } else {
        let (i0, i1) = i0_i1(x);
        let (k0, k1) = k0_k1(x);
        (i0, i1, k0, k1)
    }
}

/// [`bessel_01`] from precomputed Chebyshev fits: about ten times faster,
/// relative accuracy near 1e-14. Used by kernel assembly.
pub fn bessel_01_fit(x: f64) -> (f64, f64, f64, f64) {
    fits().bessel_01(x)
}

/// [`k0_k1`] from precomputed Chebyshev fits.
pub fn k0_k1_fit(x: f64) -> (f64, f64) {
    fits().k0_k1(x)
}

/// `(I_0(x), I_1(x))` for `x >= 0` without domain checks.
pub fn i0_i1(x: f64) -> (f64, f64) {
    if x <= I_SERIES_MAX {
        // Shared series: t_k = (x^2/4)^k / (k!)^2, and I_1 uses t_k / (k+1).
        let q = 0.25 * x * x;
        let mut t = 1.0;
        let mut s0 = 1.0;
        let mut s1 = 1.0;
        let mut k = 0.0;
        loop {
            k += 1.0;
            t *= q / (k * k);
            s0 += t;
            let t1 = t / (k + 1.0);
            s1 += t1;
            if t1 <= s1 * 1e-17 && t <= s0 * 1e-17 {
                break;
            }
        }
        (s0, 0.5 * x * s1)
    } else {
        i0_i1_asymptotic(x)
    }
}

/// `(K_0(x), K_1(x))` for `x > 0` without domain checks.
pub fn k0_k1(x: f64) -> (f64, f64) {
    if x <= K_SERIES_MAX {
        let p = series_parts(x);
        p.k0_k1(x)
    } else {
        let (k0, k1) = k0_k1_steed_scaled(x);
        let f = (-x).exp() / x.sqrt();
        (k0 * f, k1 * f)
    }
}

fn i_series(n: u32, x: f64) -> f64 {
    let half = 0.5 * x;
    // (x/2)^n / n!
    let mut lead = 1.0;
    for j in 1..=n {
        lead *= half / j as f64;
    }
    if lead == 0.0 {
        return 0.0;
    }
    let q = half * half;
    let mut t = 1.0;
    let mut s = 1.0;
    let mut k = 0.0;
    let nf = n as f64;
    loop {
        k += 1.0;
        t *= q / (k * (k + nf));
        s += t;
        if t <= s * 1e-17 {
            break;
        }
    }
    lead * s
}

fn i0_i1_asymptotic(x: f64) -> (f64, f64) {
    let (a, b) = i0_i1_asymptotic_scaled(x);
    let f = x.exp() / x.sqrt();
    (a * f, b * f)
}

/// `e^{-x} sqrt(x) (I_0, I_1)` from the Hankel expansion.
fn i0_i1_asymptotic_scaled(x: f64) -> (f64, f64) {
    // I_nu(x) ~ e^x / sqrt(2 pi x) * sum_k (-1)^k a_k(nu) / x^k,
    // a_k = prod_{j=1..k} (4nu^2 - (2j-1)^2) / (k! 8^k).
    let series = |mu: f64| {
        let mut term: f64 = 1.0;
        let mut sum: f64 = 1.0;
        let mut k = 1.0;
        loop {
            let odd = 2.0 * k - 1.0;
            let next = -term * (mu - odd * odd) / (k * 8.0 * x);
            if next.abs() >= term.abs() {
                break;
            }
            sum += next;
            if next.abs() <= sum.abs() * 1e-17 {
                break;
            }
            term = next;
            k += 1.0;
        }
        sum
    };
    let pref = 1.0 / (2.0 * std::f64::consts::PI).sqrt();
    (pref * series(0.0), pref * series(4.0))
}

/// `I_n(x) / I_0(x)` by Miller's downward recurrence.
fn miller_ratio(n: u32, x: f64) -> f64 {
    let start = 2 * (n + (60.0 * n as f64).sqrt() as u32) + 2 * (x as u32) + 20;
    let mut ip = 0.0;
    let mut i = 1.0;
    let mut ans = 0.0;
    for j in (1..=start).rev() {
        let im = ip + 2.0 * j as f64 / x * i;
        ip = i;
        i = im;
        if i.abs() > 1e200 {
            ans *= 1e-200;
            i *= 1e-200;
            ip *= 1e-200;
        }
        if j == n {
            ans = ip;
        }
    }
    // i now holds the unnormalized I_0.
    ans / i
}

/// Entire parts of the small-argument expansions, as functions of `x^2`:
/// `K_0 = f0 - ln(x/2) I_0` and `K_1 = 1/x + ln(x/2) I_1 + x f1`.
#[derive(Debug, Clone, Copy)]
struct SeriesParts {
    i0: f64,
    /// `I_1(x) / x`.
    i1x: f64,
    f0: f64,
    f1: f64,
}

impl SeriesParts {
    fn k0_k1(&self, x: f64) -> (f64, f64) {
        let l = (0.5 * x).ln();
        (
            self.f0 - l * self.i0,
            1.0 / x + l * self.i1x * x + x * self.f1,
        )
    }
}

fn series_parts(x: f64) -> SeriesParts {
    let q = 0.25 * x * x;
    // t0_k = q^k/(k!)^2, t1_k = q^k/(k!(k+1)!)
    let mut t0 = 1.0;
    let mut t1 = 1.0;
    let mut h = 0.0; // H_k
    let mut i0 = 1.0;
    let mut i1 = 1.0;
    let mut s0 = 0.0; // sum H_k t0_k
    let mut s1 = 1.0; // sum (H_k + H_{k+1}) t1_k, k = 0 term is 1
    let mut k = 0.0;
    loop {
        k += 1.0;
        h += 1.0 / k;
        t0 *= q / (k * k);
        t1 *= q / (k * (k + 1.0));
        i0 += t0;
        i1 += t1;
        s0 += h * t0;
        let h1 = h + 1.0 / (k + 1.0);
        s1 += (h + h1) * t1;
        if t0 <= 1e-18 * i0 && t1 <= 1e-18 * i1 {
            break;
        }
    }
    let i1x = 0.5 * i1;
    SeriesParts {
        i0,
        i1x,
        f0: s0 - EULER_GAMMA * i0,
        f1: EULER_GAMMA * i1x - 0.25 * s1,
    }
}

/// Steed's continued fraction for `e^x sqrt(x) K_0`, `e^x sqrt(x) K_1`
/// (Temme's CF2 with order 0).
fn k0_k1_steed_scaled(x: f64) -> (f64, f64) {
    let mut b = 2.0 * (1.0 + x);
    let mut d = 1.0 / b;
    let mut h = d;
    let mut delh = d;
    let mut q1 = 0.0;
    let mut q2 = 1.0;
    let a1 = 0.25;
    let mut q = a1;
    let mut c = a1;
    let mut a = -a1;
    let mut s = 1.0 + q * delh;
    for i in 2..10_000 {
        let fi = i as f64;
        a -= 2.0 * (fi - 1.0);
        c = -a * c / fi;
        let qnew = (q1 - b * q2) / a;
        q1 = q2;
        q2 = qnew;
        q += c * qnew;
        b += 2.0;
        d = 1.0 / (b + a * d);
        delh *= b * d - 1.0;
        h += delh;
        let dels = q * delh;
        s += dels;
        if (dels / s).abs() < 1e-17 {
            break;
        }
    }
    h *= a1;
    let k0 = (std::f64::consts::FRAC_PI_2).sqrt() / s;
    let k1 = k0 * (x + 0.5 - h) / x;
    (k0, k1)
}

/// Chebyshev series on `[-1, 1]`, with the constant term already halved.
#[derive(Debug, Clone)]
struct Cheb(Vec<f64>);

impl Cheb {
    /// Interpolate `f` at 64 Chebyshev points and drop negligible tail terms.
    fn fit(f: impl Fn(f64) -> f64) -> Self {
        const M: usize = 64;
        use std::f64::consts::PI;
        // cos(k theta_j) with theta_j = pi (2j + 1) / (2M); the integer part of
        // the angle is reduced first so high modes keep full accuracy.
        let angle = |k: usize, j: usize| PI * ((k * (2 * j + 1)) % (4 * M)) as f64 / (2 * M) as f64;
        let vals: Vec<f64> = (0..M).map(|j| f(angle(1, j).cos())).collect();
        let mut c: Vec<f64> = (0..M)
            .map(|k| {
                2.0 / M as f64
                    * vals
                        .iter()
                        .enumerate()
                        .map(|(j, v)| v * angle(k, j).cos())
                        .sum::<f64>()
            })
            .collect();
        c[0] *= 0.5;
        // Cut where the coefficients reach the rounding plateau; the terms
        // beyond only add noise and cost.
        let scale = c.iter().fold(0.0, |m: f64, v| m.max(v.abs()));
        let keep = (1..M - 4)
            .find(|&k| c[k..k + 4].iter().all(|v| v.abs() < 4e-16 * scale))
            .unwrap_or(M);
        c.truncate(keep);
        Self(c)
    }

    #[inline]
    fn eval(&self, t: f64) -> f64 {
        let (mut b1, mut b2) = (0.0, 0.0);
        for &c in self.0[1..].iter().rev() {
            let b0 = 2.0 * t * b1 - b2 + c;
            b2 = b1;
            b1 = b0;
        }
        t * b1 - b2 + self.0[0]
    }
}

/// Fits of the order-0 and order-1 functions on three argument ranges:
/// `x <= 2` in `x^2` (series parts), `2 < x <= 8` in `x` (`e^{-x} I`), and
/// `x > 8` or `x > 2` in `1/x` (`e^{-x} sqrt(x) I`, `e^x sqrt(x) K`).
#[derive(Debug, Clone)]
struct Fits {
    small: [Cheb; 4],
    mid_i: [Cheb; 2],
    large_i: [Cheb; 2],
    large_k: [Cheb; 2],
}

const FIT_SMALL: f64 = 2.0;
const FIT_MID: f64 = 8.0;

fn fits() -> &'static Fits {
    static FITS: OnceLock<Fits> = OnceLock::new();
    FITS.get_or_init(Fits::build)
}

impl Fits {
    fn build() -> Self {
        // x^2 = 2 (t + 1) maps t in [-1, 1] to x in [0, 2].
        let sp = |t: f64| series_parts((2.0 * (t + 1.0)).sqrt());
        let small = [
            Cheb::fit(|t| sp(t).i0),
            Cheb::fit(|t| sp(t).i1x),
            Cheb::fit(|t| sp(t).f0),
            Cheb::fit(|t| sp(t).f1),
        ];
        let xm = |t: f64| 5.0 + 3.0 * t;
        let mid_i = [
            Cheb::fit(|t| i0_i1(xm(t)).0 * (-xm(t)).exp()),
            Cheb::fit(|t| i0_i1(xm(t)).1 * (-xm(t)).exp()),
        ];
        let xl = |t: f64| 2.0 * FIT_MID / (t + 1.0);
        let scaled_i = |x: f64| {
            if x > I_SERIES_MAX {
                i0_i1_asymptotic_scaled(x)
            } else {
                let (a, b) = i0_i1(x);
                let f = (-x).exp() * x.sqrt();
                (a * f, b * f)
            }
        };
        let large_i = [
            Cheb::fit(|t| scaled_i(xl(t)).0),
            Cheb::fit(|t| scaled_i(xl(t)).1),
        ];
        let xk = |t: f64| 2.0 * FIT_SMALL / (t + 1.0);
        let large_k = [
            Cheb::fit(|t| k0_k1_steed_scaled(xk(t)).0),
            Cheb::fit(|t| k0_k1_steed_scaled(xk(t)).1),
        ];
        Self {
            small,
            mid_i,
            large_i,
            large_k,
        }
    }

    #[inline]
    fn small_parts(&self, x: f64) -> SeriesParts {
        let t = 0.5 * x * x - 1.0;
        SeriesParts {
            i0: self.small[0].eval(t),
            i1x: self.small[1].eval(t),
            f0: self.small[2].eval(t),
            f1: self.small[3].eval(t),
        }
    }

    #[inline]
    fn i0_i1(&self, x: f64) -> (f64, f64) {
        if x <= FIT_SMALL {
            let p = self.small_parts(x);
            (p.i0, p.i1x * x)
        } else if x <= FIT_MID {
            let t = (x - 5.0) / 3.0;
            let e = x.exp();
            (self.mid_i[0].eval(t) * e, self.mid_i[1].eval(t) * e)
        } else {
            let t = 2.0 * FIT_MID / x - 1.0;
            let f = x.exp() / x.sqrt();
            (self.large_i[0].eval(t) * f, self.large_i[1].eval(t) * f)
        }
    }

    #[inline]
    fn k0_k1(&self, x: f64) -> (f64, f64) {
        if x <= FIT_SMALL {
            self.small_parts(x).k0_k1(x)
        } else {
            let t = 2.0 * FIT_SMALL / x - 1.0;
            let f = (-x).exp() / x.sqrt();
            (self.large_k[0].eval(t) * f, self.large_k[1].eval(t) * f)
        }
    }

    #[inline]
    fn bessel_01(&self, x: f64) -> (f64, f64, f64, f64) {
        if x <= FIT_SMALL {
            let p = self.small_parts(x);
            let (k0, k1) = p.k0_k1(x);
            (p.i0, p.i1x * x, k0, k1)
        } else {
            let (i0, i1) = self.i0_i1(x);
            let (k0, k1) = self.k0_k1(x);
            (i0, i1, k0, k1)
        }
    }
}
