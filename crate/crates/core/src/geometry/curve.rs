use std::f64::consts::PI;

use super::spectral::{self, check_grid};
use super::GeometryError;

/// Sampled closed curve on the uniform parameter grid with first and second
/// parameter derivatives.
#[derive(Debug, Clone, PartialEq)]
pub struct PlanarCurveSamples {
    pub x: Vec<f64>,
    pub y: Vec<f64>,
    pub dx: Vec<f64>,
    pub dy: Vec<f64>,
    pub ddx: Vec<f64>,
    pub ddy: Vec<f64>,
    /// `|x_alpha|` per node.
    pub speed: Vec<f64>,
    /// Unit normal `(y_alpha, -x_alpha) / |x_alpha|`; outward for a
    /// counterclockwise curve.
    pub nx: Vec<f64>,
    pub ny: Vec<f64>,
}

impl PlanarCurveSamples {
    pub fn from_derivatives(
        x: Vec<f64>,
        y: Vec<f64>,
        dx: Vec<f64>,
        dy: Vec<f64>,
        ddx: Vec<f64>,
        ddy: Vec<f64>,
    ) -> Result<Self, GeometryError> {
        let n = x.len();
        check_grid(n)?;
        for v in [&y, &dx, &dy, &ddx, &ddy] {
            if v.len() != n {
                return Err(GeometryError::LengthMismatch {
                    expected: n,
                    found: v.len(),
                });
            }
        }
        let speed: Vec<f64> = dx.iter().zip(&dy).map(|(a, b)| a.hypot(*b)).collect();
        if speed.iter().any(|s| !(s.is_finite() && *s > 0.0)) {
            return Err(GeometryError::Degenerate);
        }
        let nx = dy.iter().zip(&speed).map(|(a, s)| a / s).collect();
        let ny = dx.iter().zip(&speed).map(|(a, s)| -a / s).collect();
        Ok(Self {
            x,
            y,
            dx,
            dy,
            ddx,
            ddy,
            speed,
            nx,
            ny,
        })
    }

    /// Builds the derivatives spectrally from marker positions.
    pub fn from_points(x: Vec<f64>, y: Vec<f64>) -> Result<Self, GeometryError> {
        check_grid(x.len())?;
        if y.len() != x.len() {
            return Err(GeometryError::LengthMismatch {
                expected: x.len(),
                found: y.len(),
            });
        }
        let dx = spectral::spectral_derivative(&x, 1)?;
        let dy = spectral::spectral_derivative(&y, 1)?;
        let ddx = spectral::spectral_derivative(&x, 2)?;
        let ddy = spectral::spectral_derivative(&y, 2)?;
        Self::from_derivatives(x, y, dx, dy, ddx, ddy)
    }

    pub fn len(&self) -> usize {
        self.x.len()
    }

    pub fn is_empty(&self) -> bool {
        self.x.is_empty()
    }

    /// Signed curvature `(x' y'' - x'' y') / |x'|^3`.
    pub fn curvature(&self) -> Vec<f64> {
        (0..self.len())
            .map(|j| (self.dx[j] * self.ddy[j] - self.ddx[j] * self.dy[j]) / self.speed[j].powi(3))
            .collect()
    }

    /// Mean distance between consecutive nodes, `L / N`.
    pub fn mean_spacing(&self) -> f64 {
        let n = self.len() as f64;
        self.speed.iter().sum::<f64>() / n * (2.0 * PI / n)
    }

    /// Total length by the trapezoidal rule.
    pub fn length(&self) -> f64 {
        self.speed.iter().sum::<f64>() * 2.0 * PI / self.len() as f64
    }

    /// Polygon self-intersection scan over non-neighbouring edges.
    pub fn is_simple(&self) -> bool {
        let n = self.len();
        let p = |j: usize| (self.x[j % n], self.y[j % n]);
        for i in 0..n {
            for j in i + 2..n {
                if i == 0 && j == n - 1 {
                    continue;
                }
                if segments_cross(p(i), p(i + 1), p(j), p(j + 1)) {
                    return false;
                }
            }
        }
        true
    }
}

fn segments_cross(a: (f64, f64), b: (f64, f64), c: (f64, f64), d: (f64, f64)) -> bool {
    let orient = |p: (f64, f64), q: (f64, f64), r: (f64, f64)| {
        (q.0 - p.0) * (r.1 - p.1) - (q.1 - p.1) * (r.0 - p.0)
    };
    let d1 = orient(c, d, a);
    let d2 = orient(c, d, b);
    let d3 = orient(a, b, c);
    let d4 = orient(a, b, d);
    (d1 * d2 < 0.0) && (d3 * d4 < 0.0)
}

/// Radial rule `r(alpha) = radius + eps cos(k alpha)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RadialShape {
    pub radius: f64,
    pub eps: f64,
    pub k: u32,
}

impl RadialShape {
    pub fn circle(radius: f64) -> Self {
        Self {
            radius,
            eps: 0.0,
            k: 0,
        }
    }

    pub fn validate(&self) -> Result<(), GeometryError> {
        if !(self.radius.is_finite() && self.radius > 0.0) || !self.eps.is_finite() {
            return Err(GeometryError::InvalidShape(
                "radius must be positive".into(),
            ));
        }
        if self.eps < 0.0 || self.eps >= self.radius {
            return Err(GeometryError::InvalidShape("need 0 <= eps < radius".into()));
        }
        Ok(())
    }

    pub fn r(&self, a: f64) -> f64 {
        self.radius + self.eps * (self.k as f64 * a).cos()
    }

    pub fn max_radius(&self) -> f64 {
        self.radius + self.eps
    }

    pub fn min_radius(&self) -> f64 {
        if self.k == 0 {
            self.radius + self.eps
        } else {
            self.radius - self.eps
        }
    }

    /// Samples with analytic derivatives on an `n`-point grid.
    pub fn sample(&self, n: usize) -> Result<PlanarCurveSamples, GeometryError> {
        self.validate()?;
        check_grid(n)?;
        let k = self.k as f64;
        let mut v: [Vec<f64>; 6] = Default::default();
        for a in spectral::grid(n) {
            let (s, c) = a.sin_cos();
            let (sk, ck) = (k * a).sin_cos();
            let r = self.radius + self.eps * ck;
            let r1 = -self.eps * k * sk;
            let r2 = -self.eps * k * k * ck;
            v[0].push(r * c);
            v[1].push(r * s);
            v[2].push(r1 * c - r * s);
            v[3].push(r1 * s + r * c);
            v[4].push(r2 * c - 2.0 * r1 * s - r * c);
            v[5].push(r2 * s + 2.0 * r1 * c - r * s);
        }
        let [x, y, dx, dy, ddx, ddy] = v;
        PlanarCurveSamples::from_derivatives(x, y, dx, dy, ddx, ddy)
    }
}

/// The static necrotic boundary: radial rule sampled on its own parameter
/// (not equal-arclength).
#[derive(Debug, Clone, PartialEq)]
pub struct FixedBoundary {
    pub shape: RadialShape,
    pub samples: PlanarCurveSamples,
}

impl FixedBoundary {
    pub fn new(shape: RadialShape, n0: usize) -> Result<Self, GeometryError> {
        let samples = shape.sample(n0)?;
        Ok(Self { shape, samples })
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn curvature(&self) -> Vec<f64> {
        self.samples.curvature()
    }
}
