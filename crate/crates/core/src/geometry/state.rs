use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::curve::{PlanarCurveSamples, RadialShape};
use super::spectral::{self, check_grid};
use super::GeometryError;

/// Outer interface in tangent-angle / arclength variables.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InterfaceState {
    /// Tangent angle at `alpha_j = 2 pi j / N`; `theta - alpha` is periodic.
    pub theta: Vec<f64>,
    /// `L / (2 pi)`, the same at every node.
    pub s_alpha: f64,
    /// Position of the node at `alpha = 0`.
    pub ref_point: [f64; 2],
    pub time: f64,
}

impl InterfaceState {
    pub fn n_markers(&self) -> usize {
        self.theta.len()
    }

    pub fn validate(&self) -> Result<(), GeometryError> {
        check_grid(self.theta.len())?;
        if !(self.s_alpha.is_finite() && self.s_alpha > 0.0) {
            return Err(GeometryError::Degenerate);
        }
        if self.theta.iter().any(|t| !t.is_finite())
            || !self.ref_point.iter().all(|v| v.is_finite())
        {
            return Err(GeometryError::Degenerate);
        }
        Ok(())
    }

    /// `theta - alpha` at the nodes.
    pub fn periodic_angle(&self) -> Vec<f64> {
        let n = self.n_markers();
        self.theta
            .iter()
            .enumerate()
            .map(|(j, t)| t - 2.0 * PI * j as f64 / n as f64)
            .collect()
    }

    /// Rebuild `theta` from the periodic part.
    pub fn set_periodic_angle(&mut self, phi: &[f64]) {
        let n = phi.len();
        self.theta = phi
            .iter()
            .enumerate()
            .map(|(j, p)| p + 2.0 * PI * j as f64 / n as f64)
            .collect();
    }

    /// `theta_alpha` at the nodes.
    pub fn theta_alpha(&self) -> Vec<f64> {
        let mut c = spectral::forward(&self.periodic_angle());
        spectral::differentiate_coeffs(&mut c, 1);
        spectral::inverse(&c).into_iter().map(|v| v + 1.0).collect()
    }

    /// Equal-arclength state for a radial rule; the curve is first sampled on a
    /// fine grid and then reparametrized.
    pub fn from_radial(shape: RadialShape, n: usize) -> Result<Self, GeometryError> {
        check_grid(n)?;
        let fine = shape.sample((8 * n).max(1024))?;
        equal_arclength_reparam_to(&fine, n)
    }
}

/// `kappa = theta_alpha / s_alpha`.
pub fn curvature(state: &InterfaceState) -> Vec<f64> {
    state
        .theta_alpha()
        .into_iter()
        .map(|t| t / state.s_alpha)
        .collect()
}

/// Integrate the tangent field back to marker positions. The secular part of
/// the integral is removed so the curve closes by construction.
pub fn reconstruct(state: &InterfaceState) -> Result<PlanarCurveSamples, GeometryError> {
    state.validate()?;
    let s = state.s_alpha;
    let cos: Vec<f64> = state.theta.iter().map(|t| t.cos()).collect();
    let sin: Vec<f64> = state.theta.iter().map(|t| t.sin()).collect();
    let (px, mx) = spectral::cumulative_integral(&cos);
    let (py, my) = spectral::cumulative_integral(&sin);
    let theta_a = state.theta_alpha();
    let [x0, y0] = state.ref_point;
    let x = px.iter().map(|v| x0 + s * v).collect();
    let y = py.iter().map(|v| y0 + s * v).collect();
    let dx = cos.iter().map(|c| s * (c - mx)).collect();
    let dy = sin.iter().map(|c| s * (c - my)).collect();
    let ddx = sin
        .iter()
        .zip(&theta_a)
        .map(|(sn, ta)| -s * ta * sn)
        .collect();
    let ddy = cos.iter().zip(&theta_a).map(|(c, ta)| s * ta * c).collect();
    PlanarCurveSamples::from_derivatives(x, y, dx, dy, ddx, ddy)
}

/// Reparametrize to equal arclength with the same node count.
pub fn equal_arclength_reparam(
    samples: &PlanarCurveSamples,
) -> Result<InterfaceState, GeometryError> {
    equal_arclength_reparam_to(samples, samples.len())
}

/// Reparametrize a closed counterclockwise curve to `n` equal-arclength nodes.
/// Off-node values come from the trigonometric interpolant of the samples.
pub fn equal_arclength_reparam_to(
    samples: &PlanarCurveSamples,
    n: usize,
) -> Result<InterfaceState, GeometryError> {
    check_grid(n)?;
    let xc = spectral::forward(&samples.x);
    let yc = spectral::forward(&samples.y);
    let deriv = |c: &[Complex64]| {
        let mut d = c.to_vec();
        spectral::differentiate_coeffs(&mut d, 1);
        d
    };
    let dxc = deriv(&xc);
    let dyc = deriv(&yc);
    let speed_c = spectral::forward(&samples.speed);
    let mean_speed = speed_c[0].re;
    let mut pc = speed_c.clone();
    spectral::integrate_coeffs(&mut pc);
    let p0 = spectral::interpolate(&pc, 0.0);
    let total = 2.0 * PI * mean_speed;
    // arclength from 0 to beta
    let ell = |b: f64| mean_speed * b + spectral::interpolate(&pc, b) - p0;
    let tol = 1e-12 * total.max(1.0);

    let mut betas = Vec::with_capacity(n);
    for j in 0..n {
        let target = total * j as f64 / n as f64;
        let (mut lo, mut hi): (f64, f64) = (0.0, 2.0 * PI);
        let mut b = 2.0 * PI * j as f64 / n as f64;
        let mut converged = j == 0;
        for _ in 0..50 {
            if converged {
                break;
            }
            let f = ell(b) - target;
            if f.abs() <= tol {
                converged = true;
                break;
            }
            if f > 0.0 {
                hi = hi.min(b);
            } else {
                lo = lo.max(b);
            }
            let d = spectral::interpolate(&speed_c, b);
            let mut next = b - f / d;
            if !(next > lo && next < hi) {
                next = 0.5 * (lo + hi);
            }
            b = next;
        }
        if !converged {
            return Err(GeometryError::ReparamFailed { node: j });
        }
        betas.push(b);
    }

    let mut theta = Vec::with_capacity(n);
    for (j, &b) in betas.iter().enumerate() {
        let tx = spectral::interpolate(&dxc, b);
        let ty = spectral::interpolate(&dyc, b);
        let raw = ty.atan2(tx);
        let t = if j == 0 {
            raw
        } else {
            let prev: f64 = theta[j - 1];
            raw + 2.0 * PI * ((prev - raw) / (2.0 * PI)).round()
        };
        theta.push(t);
    }
    // The last step back to the first node must also be a small turn.
    let closing = theta[0] + 2.0 * PI - theta[n - 1];
    if closing.abs() > PI {
        return Err(GeometryError::InvalidShape(
            "curve is not a counterclockwise simple loop".into(),
        ));
    }

    let ref_point = [
        spectral::interpolate(&xc, betas[0]),
        spectral::interpolate(&yc, betas[0]),
    ];
    Ok(InterfaceState {
        theta,
        s_alpha: total / (2.0 * PI),
        ref_point,
        time: 0.0,
    })
}
