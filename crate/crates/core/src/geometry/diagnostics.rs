use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::curve::PlanarCurveSamples;
use super::spectral;
use super::GeometryError;

/// Enclosed area `1/2 \oint (x y' - y x')` by the trapezoidal rule.
pub fn area(samples: &PlanarCurveSamples) -> f64 {
    let n = samples.len();
    if n == 0 {
        return 0.0;
    }
    let sum: f64 = (0..n)
        .map(|j| samples.x[j] * samples.dy[j] - samples.y[j] * samples.dx[j])
        .sum();
    0.5 * sum * 2.0 * PI / n as f64
}

/// Area centroid.
pub fn centroid(samples: &PlanarCurveSamples) -> [f64; 2] {
    let n = samples.len();
    let a = area(samples);
    let h = 2.0 * PI / n as f64;
    let mut cx = 0.0;
    let mut cy = 0.0;
    for j in 0..n {
        cx += samples.x[j] * samples.x[j] * samples.dy[j];
        cy -= samples.y[j] * samples.y[j] * samples.dx[j];
    }
    [0.5 * cx * h / a, 0.5 * cy * h / a]
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ShapeDiagnostics {
    pub r_eff: f64,
    pub delta_over_r: f64,
}

/// Effective radius `sqrt(A / pi)` and the mode-`l` amplitude of the radial
/// function about the centroid, resampled at uniform polar angle.
pub fn shape_diagnostics(
    samples: &PlanarCurveSamples,
    mode: u32,
) -> Result<ShapeDiagnostics, GeometryError> {
    let n = samples.len();
    let a = area(samples);
    if !(a > 0.0) {
        return Err(GeometryError::NotStarShaped);
    }
    let r_eff = (a / PI).sqrt();
    let [cx, cy] = centroid(samples);
    let xs: Vec<f64> = samples.x.iter().map(|v| v - cx).collect();
    let ys: Vec<f64> = samples.y.iter().map(|v| v - cy).collect();
    // Star-shaped about the centroid iff the polar angle increases monotonically.
    for j in 0..n {
        if xs[j] * samples.dy[j] - ys[j] * samples.dx[j] <= 0.0 {
            return Err(GeometryError::NotStarShaped);
        }
    }
    let mut phi = Vec::with_capacity(n);
    for j in 0..n {
        let raw = ys[j].atan2(xs[j]);
        let v = if j == 0 {
            raw
        } else {
            let prev: f64 = phi[j - 1];
            raw + 2.0 * PI * ((prev - raw) / (2.0 * PI)).round()
        };
        phi.push(v);
    }
    if (phi[n - 1] - phi[0] - 2.0 * PI).abs() > PI {
        return Err(GeometryError::NotStarShaped);
    }

    let xc = spectral::forward(&xs);
    let yc = spectral::forward(&ys);
    let mut dxc = xc.clone();
    spectral::differentiate_coeffs(&mut dxc, 1);
    let mut dyc = yc.clone();
    spectral::differentiate_coeffs(&mut dyc, 1);

    let m = n;
    let mut radii = Vec::with_capacity(m);
    let base = phi[0];
    let mut seg = 0usize;
    for i in 0..m {
        let target = base + 2.0 * PI * i as f64 / m as f64;
        while seg + 1 < n && phi[seg + 1] <= target {
            seg += 1;
        }
        let (p0, p1) = if seg + 1 < n {
            (phi[seg], phi[seg + 1])
        } else {
            (phi[n - 1], phi[0] + 2.0 * PI)
        };
        let h = 2.0 * PI / n as f64;
        let mut alpha = seg as f64 * h + (target - p0) / (p1 - p0) * h;
        let mut x = 0.0;
        let mut y = 0.0;
        for _ in 0..30 {
            x = spectral::interpolate(&xc, alpha);
            y = spectral::interpolate(&yc, alpha);
            let dx = spectral::interpolate(&dxc, alpha);
            let dy = spectral::interpolate(&dyc, alpha);
            let ang = y.atan2(x);
            let f = (ang - target + PI).rem_euclid(2.0 * PI) - PI;
            let dphi = (x * dy - y * dx) / (x * x + y * y);
            let step = f / dphi;
            alpha -= step;
            if step.abs() < 1e-14 {
                x = spectral::interpolate(&xc, alpha);
                y = spectral::interpolate(&yc, alpha);
                break;
            }
        }
        radii.push(x.hypot(y));
    }
    let rc = spectral::forward(&radii);
    let l = mode as usize;
    let delta = if l == 0 {
        rc[0].norm()
    } else if l < m / 2 {
        2.0 * rc[l].norm()
    } else {
        0.0
    };
    Ok(ShapeDiagnostics {
        r_eff,
        delta_over_r: delta / r_eff,
    })
}

/// Smallest distance between nodes of the same curve whose index separation is
/// at least `min_index_gap`.
pub fn min_self_distance(samples: &PlanarCurveSamples, min_index_gap: usize) -> f64 {
    let n = samples.len();
    let mut best = f64::INFINITY;
    for i in 0..n {
        for j in i + min_index_gap..n {
            if n - (j - i) < min_index_gap {
                continue;
            }
            let d = (samples.x[i] - samples.x[j]).hypot(samples.y[i] - samples.y[j]);
            best = best.min(d);
        }
    }
    best
}

/// Smallest node-to-node distance between two curves.
pub fn min_distance(a: &PlanarCurveSamples, b: &PlanarCurveSamples) -> f64 {
    let mut best = f64::INFINITY;
    for i in 0..a.len() {
        for j in 0..b.len() {
            best = best.min((a.x[i] - b.x[j]).hypot(a.y[i] - b.y[j]));
        }
    }
    best
}
