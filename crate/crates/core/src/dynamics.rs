//! Interface evolution in tangent-angle / arclength variables.
//!
//! The stiff part of `theta_t` at small scales is `-(|k|^3 / s_alpha^3) theta_hat`.
//! It is integrated exactly with integrating factors while the remainder is
//! advanced by second-order Adams-Bashforth.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geometry::spectral::{self, wavenumber};
use crate::geometry::{GeometryError, InterfaceState};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DynamicsError {
    #[error("time step must be positive, got {0}")]
    NonPositiveDt(f64),
    #[error("arclength metric collapsed to {0}")]
    Collapse(f64),
    #[error("velocity has {found} values for {expected} markers")]
    Length { expected: usize, found: usize },
    #[error("history was recorded for {expected} markers, state has {found}")]
    HistoryMismatch { expected: usize, found: usize },
    #[error(transparent)]
    Geometry(#[from] GeometryError),
}

/// Data from the previous step needed by the two-step scheme.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StepperHistory {
    /// Fourier coefficients of the nonlinear term, stored as `(re, im)`.
    pub n_hat: Vec<[f64; 2]>,
    /// Arclength forcing `M`.
    pub m: f64,
    /// `V n` at `alpha = 0`.
    pub vn0: [f64; 2],
    pub s_alpha: f64,
    pub steps: u64,
}

impl StepperHistory {
    fn n_hat_complex(&self) -> Vec<Complex64> {
        self.n_hat
            .iter()
            .map(|[re, im]| Complex64::new(*re, *im))
            .collect()
    }
}

/// Knobs for [`first_step`] and [`step`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StepConfig {
    /// Use exact integrating factors. When false the scheme degenerates to
    /// fully explicit Adams-Bashforth.
    pub integrating_factor: bool,
    /// Apply the 25th-order exponential filter after each update.
    pub filter: bool,
    /// Coefficients of `theta - alpha` below this magnitude are zeroed.
    pub krasny_floor: f64,
}

impl Default for StepConfig {
    fn default() -> Self {
        Self {
            integrating_factor: true,
            filter: true,
            krasny_floor: 1e-12,
        }
    }
}

/// `T = (alpha / 2pi) int_0^2pi theta_a V - int_0^alpha theta_a V`, which keeps
/// markers equally spaced in arclength.
pub fn tangent_velocity(theta_alpha: &[f64], v: &[f64]) -> Vec<f64> {
    let g: Vec<f64> = theta_alpha.iter().zip(v).map(|(a, b)| a * b).collect();
    // int_0^alpha g = mean * alpha + P(alpha), so T = -P.
    let (p, _) = spectral::cumulative_integral(&g);
    p.into_iter().map(|v| -v).collect()
}

/// `M = (1/2pi) int V theta_a`, the rate of change of `s_alpha`.
pub fn arclength_forcing(theta_alpha: &[f64], v: &[f64]) -> f64 {
    theta_alpha.iter().zip(v).map(|(a, b)| a * b).sum::<f64>() / v.len() as f64
}

/// `theta_t = (theta_a T - V_a) / s_alpha`.
pub fn angle_rate(theta_alpha: &[f64], v: &[f64], t: &[f64], s_alpha: f64) -> Vec<f64> {
    let mut vc = spectral::forward(v);
    spectral::differentiate_coeffs(&mut vc, 1);
    let va = spectral::inverse(&vc);
    (0..v.len())
        .map(|j| (theta_alpha[j] * t[j] - va[j]) / s_alpha)
        .collect()
}

/// `(1/s^3) H[theta_aaa]` for `theta - alpha` with coefficients `phi_hat`:
/// the symbol is `-|k|^3 / s^3`.
fn stiff_symbol(k: f64, s_alpha: f64) -> f64 {
    -(k.abs().powi(3)) / s_alpha.powi(3)
}

fn nonlinear_coeffs(
    theta: &[f64],
    v: &[f64],
    t: &[f64],
    s_alpha: f64,
) -> (Vec<Complex64>, Vec<f64>) {
    let n = theta.len();
    let phi: Vec<f64> = (0..n)
        .map(|j| theta[j] - 2.0 * PI * j as f64 / n as f64)
        .collect();
    let phi_hat = spectral::forward(&phi);
    let mut theta_a_c = phi_hat.clone();
    spectral::differentiate_coeffs(&mut theta_a_c, 1);
    let theta_a: Vec<f64> = spectral::inverse(&theta_a_c)
        .into_iter()
        .map(|x| x + 1.0)
        .collect();
    let rate = angle_rate(&theta_a, v, t, s_alpha);
    let mut nh = spectral::forward(&rate);
    for (j, c) in nh.iter_mut().enumerate() {
        *c -= phi_hat[j] * stiff_symbol(wavenumber(j, n), s_alpha);
    }
    (nh, theta_a)
}

/// `N = (kappa T - V_s) - (1/s^3) H[theta_aaa]` at the nodes.
pub fn nonlinear_term(theta: &[f64], v: &[f64], t: &[f64], s_alpha: f64) -> Vec<f64> {
    spectral::inverse(&nonlinear_coeffs(theta, v, t, s_alpha).0)
}

/// `(1/s^3) H[theta_aaa]` at the nodes.
pub fn stiff_term(theta: &[f64], s_alpha: f64) -> Vec<f64> {
    let n = theta.len();
    let phi: Vec<f64> = (0..n)
        .map(|j| theta[j] - 2.0 * PI * j as f64 / n as f64)
        .collect();
    let mut c = spectral::forward(&phi);
    for (j, cj) in c.iter_mut().enumerate() {
        *cj *= stiff_symbol(wavenumber(j, n), s_alpha);
    }
    spectral::inverse(&c)
}

fn check_inputs(state: &InterfaceState, v: &[f64], dt: f64) -> Result<(), DynamicsError> {
    if !(dt > 0.0) {
        return Err(DynamicsError::NonPositiveDt(dt));
    }
    state.validate()?;
    if v.len() != state.n_markers() {
        return Err(DynamicsError::Length {
            expected: state.n_markers(),
            found: v.len(),
        });
    }
    Ok(())
}

fn finish(
    state: &InterfaceState,
    mut phi_hat: Vec<Complex64>,
    s_new: f64,
    ref_point: [f64; 2],
    dt: f64,
    cfg: &StepConfig,
) -> InterfaceState {
    if cfg.filter {
        spectral::filter_coeffs(&mut phi_hat);
    }
    spectral::krasny_filter(&mut phi_hat, cfg.krasny_floor);
    let mut next = InterfaceState {
        theta: Vec::new(),
        s_alpha: s_new,
        ref_point,
        time: state.time + dt,
    };
    next.set_periodic_angle(&spectral::inverse(&phi_hat));
    next
}

fn normal_at_origin(state: &InterfaceState, v0: f64) -> [f64; 2] {
    let t = state.theta[0];
    [v0 * t.sin(), -v0 * t.cos()]
}

/// First-order starter: forward Euler for `s_alpha` and the reference point,
/// first-order integrating factor for `theta`.
pub fn first_step(
    state: &InterfaceState,
    v: &[f64],
    dt: f64,
    cfg: &StepConfig,
) -> Result<(InterfaceState, StepperHistory), DynamicsError> {
    check_inputs(state, v, dt)?;
    let n = state.n_markers();
    let s0 = state.s_alpha;
    let theta_a = state.theta_alpha();
    let t = tangent_velocity(&theta_a, v);
    let (nh, _) = nonlinear_coeffs(&state.theta, v, &t, s0);
    let m = arclength_forcing(&theta_a, v);
    let s1 = s0 + dt * m;
    if !(s1 > 0.0) {
        return Err(DynamicsError::Collapse(s1));
    }
    let phi_hat = spectral::forward(&state.periodic_angle());
    let quad = 0.5 * dt * (s0.powi(-3) + s1.powi(-3));
    let new_hat: Vec<Complex64> = (0..n)
        .map(|j| {
            let e = if cfg.integrating_factor {
                (-wavenumber(j, n).abs().powi(3) * quad).exp()
            } else {
                1.0
            };
            e * (phi_hat[j] + dt * nh[j])
        })
        .collect();
    let vn0 = normal_at_origin(state, v[0]);
    let ref_point = [
        state.ref_point[0] + dt * vn0[0],
        state.ref_point[1] + dt * vn0[1],
    ];
    let next = finish(state, new_hat, s1, ref_point, dt, cfg);
    let history = StepperHistory {
        n_hat: nh.iter().map(|c| [c.re, c.im]).collect(),
        m,
        vn0,
        s_alpha: s0,
        steps: 1,
    };
    Ok((next, history))
}

/// Second-order step; `history` holds the data of the previous step.
pub fn step(
    state: &InterfaceState,
    v: &[f64],
    history: &StepperHistory,
    dt: f64,
    cfg: &StepConfig,
) -> Result<(InterfaceState, StepperHistory), DynamicsError> {
    check_inputs(state, v, dt)?;
    let n = state.n_markers();
    if history.n_hat.len() != n {
        return Err(DynamicsError::HistoryMismatch {
            expected: history.n_hat.len(),
            found: n,
        });
    }
    let sn = state.s_alpha;
    let sp = history.s_alpha;
    let theta_a = state.theta_alpha();
    let t = tangent_velocity(&theta_a, v);
    let (nh, _) = nonlinear_coeffs(&state.theta, v, &t, sn);
    let nh_prev = history.n_hat_complex();
    let m = arclength_forcing(&theta_a, v);
    let s1 = sn + 0.5 * dt * (3.0 * m - history.m);
    if !(s1 > 0.0) {
        return Err(DynamicsError::Collapse(s1));
    }
    let q1 = 0.5 * dt * (sn.powi(-3) + s1.powi(-3));
    let q2 = dt * (0.5 * sp.powi(-3) + sn.powi(-3) + 0.5 * s1.powi(-3));
    let phi_hat = spectral::forward(&state.periodic_angle());
    let new_hat: Vec<Complex64> = (0..n)
        .map(|j| {
            let k3 = wavenumber(j, n).abs().powi(3);
            let (e1, e2) = if cfg.integrating_factor {
                ((-k3 * q1).exp(), (-k3 * q2).exp())
            } else {
                (1.0, 1.0)
            };
            e1 * phi_hat[j] + 0.5 * dt * (3.0 * e1 * nh[j] - e2 * nh_prev[j])
        })
        .collect();
    let vn0 = normal_at_origin(state, v[0]);
    let ref_point = [
        state.ref_point[0] + 0.5 * dt * (3.0 * vn0[0] - history.vn0[0]),
        state.ref_point[1] + 0.5 * dt * (3.0 * vn0[1] - history.vn0[1]),
    ];
    let next = finish(state, new_hat, s1, ref_point, dt, cfg);
    let history = StepperHistory {
        n_hat: nh.iter().map(|c| [c.re, c.im]).collect(),
        m,
        vn0,
        s_alpha: sn,
        steps: history.steps + 1,
    };
    Ok((next, history))
}

/// Advance with [`first_step`] or [`step`] depending on whether history exists.
pub fn advance(
    state: &InterfaceState,
    v: &[f64],
    history: Option<&StepperHistory>,
    dt: f64,
    cfg: &StepConfig,
) -> Result<(InterfaceState, StepperHistory), DynamicsError> {
    match history {
        Some(h) => step(state, v, h, dt, cfg),
        None => first_step(state, v, dt, cfg),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{area, reconstruct, spectral::grid, RadialShape};

    fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
        a.iter()
            .zip(b)
            .map(|(x, y)| (x - y).abs())
            .fold(0.0, f64::max)
    }

    #[test]
    fn tangent_velocity_vanishes_for_uniform_growth() {
        let n = 64;
        let t = tangent_velocity(&vec![1.0; n], &vec![0.7; n]);
        assert!(t.iter().all(|v| v.abs() < 1e-14));
    }

    #[test]
    fn tangent_velocity_against_quadrature() {
        let n = 64;
        let a = grid(n);
        let v: Vec<f64> = a.iter().map(|x| x.cos()).collect();
        let t = tangent_velocity(&vec![1.0; n], &v);
        // zero-mean integrand: T = -int_0^alpha cos = -sin(alpha)
        for (j, x) in a.iter().enumerate() {
            let m = 40000;
            let h = x / m as f64;
            let quad: f64 = (0..=m)
                .map(|i| {
                    let w = if i == 0 || i == m { 0.5 } else { 1.0 };
                    w * (i as f64 * h).cos()
                })
                .sum::<f64>()
                * h;
            assert!((t[j] + quad).abs() < 1e-8);
            assert!((t[j] + x.sin()).abs() < 1e-13);
        }
        assert_eq!(t[0], 0.0);
    }

    #[test]
    fn tangent_velocity_periodic_with_mean_part() {
        let n = 32;
        let a = grid(n);
        let ta: Vec<f64> = a.iter().map(|x| 1.0 + 0.3 * (2.0 * x).cos()).collect();
        let v: Vec<f64> = a.iter().map(|x| 0.5 + (3.0 * x).sin()).collect();
        let t = tangent_velocity(&ta, &v);
        assert_eq!(t[0], 0.0);
        // spectral derivative of T recovers M - theta_a V
        let dt = spectral::spectral_derivative(&t, 1).unwrap();
        let m = arclength_forcing(&ta, &v);
        for j in 0..n {
            assert!((dt[j] - (m - ta[j] * v[j])).abs() < 1e-12);
        }
    }

    #[test]
    fn stiff_symbol_matches_cotangent_quadrature() {
        // H applied to sin(k a) by midpoint-shifted quadrature of the cotangent
        // kernel must give -cos(k a), which fixes the sign of the symbol.
        let k = 3.0;
        let m = 2048;
        let h = 2.0 * PI / m as f64;
        let a0 = 0.4;
        let hilbert: f64 = (0..m)
            .map(|i| {
                let ap = a0 + (i as f64 + 0.5) * h;
                ((k * ap).sin() - (k * a0).sin()) / (0.5 * (a0 - ap)).tan()
            })
            .sum::<f64>()
            * h
            / (2.0 * PI);
        assert!((hilbert + (k * a0).cos()).abs() < 1e-6, "{hilbert}");
        // theta - alpha = eps cos(k a): theta_aaa = eps k^3 sin(k a), H -> -eps k^3 cos(k a)
        let n = 32;
        let s = 1.7;
        let a = grid(n);
        let theta: Vec<f64> = a.iter().map(|x| x + 0.01 * (k * x).cos()).collect();
        let st = stiff_term(&theta, s);
        for (j, x) in a.iter().enumerate() {
            assert!((st[j] + 0.01 * k.powi(3) * (k * x).cos() / s.powi(3)).abs() < 1e-12);
        }
    }

    #[test]
    fn splitting_reproduces_angle_equation() {
        let n = 64;
        let a = grid(n);
        let theta: Vec<f64> = a
            .iter()
            .map(|x| x + 0.1 * (2.0 * x).sin() + 0.02 * (5.0 * x).cos())
            .collect();
        let st = InterfaceState {
            theta: theta.clone(),
            s_alpha: 1.3,
            ref_point: [1.0, 0.0],
            time: 0.0,
        };
        let v: Vec<f64> = a.iter().map(|x| 0.4 + 0.2 * (3.0 * x).cos()).collect();
        let ta = st.theta_alpha();
        let t = tangent_velocity(&ta, &v);
        let nl = nonlinear_term(&theta, &v, &t, 1.3);
        let stiff = stiff_term(&theta, 1.3);
        let rate = angle_rate(&ta, &v, &t, 1.3);
        for j in 0..n {
            assert!((stiff[j] + nl[j] - rate[j]).abs() < 1e-12);
        }
    }

    #[test]
    fn circle_with_constant_velocity_has_no_angle_forcing() {
        let n = 32;
        let theta: Vec<f64> = grid(n).iter().map(|x| x + PI / 2.0).collect();
        let v = vec![0.8; n];
        let t = tangent_velocity(&vec![1.0; n], &v);
        let nl = nonlinear_term(&theta, &v, &t, 2.0);
        assert!(nl.iter().all(|x| x.abs() < 1e-12), "{nl:?}");
    }

    #[test]
    fn rejects_bad_input() {
        let st = InterfaceState::from_radial(RadialShape::circle(1.0), 16).unwrap();
        let cfg = StepConfig::default();
        assert!(matches!(
            first_step(&st, &[0.0; 16], 0.0, &cfg),
            Err(DynamicsError::NonPositiveDt(_))
        ));
        assert!(matches!(
            first_step(&st, &[0.0; 8], 0.1, &cfg),
            Err(DynamicsError::Length { .. })
        ));
        assert!(matches!(
            first_step(&st, &[-100.0; 16], 0.1, &cfg),
            Err(DynamicsError::Collapse(_))
        ));
    }

    fn hold_still(st0: &InterfaceState, dt: f64, steps: usize) -> (InterfaceState, InterfaceState) {
        let cfg = StepConfig::default();
        let v = vec![0.0; st0.n_markers()];
        let (first, mut h) = first_step(st0, &v, dt, &cfg).unwrap();
        let mut st = first.clone();
        for _ in 1..steps {
            let (s, hh) = step(&st, &v, &h, dt, &cfg).unwrap();
            st = s;
            h = hh;
        }
        (first, st)
    }

    #[test]
    fn zero_velocity_keeps_circle() {
        let st0 = InterfaceState::from_radial(RadialShape::circle(2.0), 64).unwrap();
        let (first, last) = hold_still(&st0, 1e-3, 100);
        assert!(max_abs_diff(&first.theta, &st0.theta) < 1e-12);
        assert!(max_abs_diff(&last.theta, &st0.theta) < 1e-10);
        assert_eq!(last.s_alpha, st0.s_alpha);
        assert_eq!(last.ref_point, st0.ref_point);
    }

    #[test]
    fn zero_velocity_drift_is_truncation_error() {
        // With V = 0 the split parts cancel only up to the scheme's truncation
        // error, so a perturbed shape drifts by O(dt^2) over a fixed time.
        let st0 = InterfaceState::from_radial(
            RadialShape {
                radius: 2.5,
                eps: 0.05,
                k: 2,
            },
            64,
        )
        .unwrap();
        let drift = |dt: f64| {
            max_abs_diff(
                &hold_still(&st0, dt, (0.1 / dt) as usize).1.theta,
                &st0.theta,
            )
        };
        let (d1, d2) = (drift(1e-3), drift(5e-4));
        assert!(d1 < 1e-7, "{d1}");
        assert!((d1 / d2 - 4.0).abs() < 1.0, "{}", d1 / d2);
    }

    #[test]
    fn constant_velocity_grows_circle() {
        let n = 32;
        let cfg = StepConfig::default();
        let st0 = InterfaceState::from_radial(RadialShape::circle(2.0), n).unwrap();
        let c = 0.3;
        let dt = 0.01;
        let v = vec![c; n];
        let (st1, h) = first_step(&st0, &v, dt, &cfg).unwrap();
        assert!((st1.s_alpha - (st0.s_alpha + dt * c)).abs() < 1e-14);
        let (st2, _) = step(&st1, &v, &h, dt, &cfg).unwrap();
        assert!((st2.s_alpha - (st1.s_alpha + dt * c)).abs() < 1e-14);
        let c2 = reconstruct(&st2).unwrap();
        for j in 0..n {
            assert!((c2.x[j].hypot(c2.y[j]) - (2.0 + 2.0 * dt * c)).abs() < 1e-12);
        }
    }

    /// Velocity field used for the convergence tests: fixed in the label.
    fn forcing(n: usize) -> Vec<f64> {
        grid(n)
            .iter()
            .map(|a| 0.5 + 0.2 * (2.0 * a).cos() + 0.1 * (3.0 * a).sin())
            .collect()
    }

    fn run(st0: &InterfaceState, dt: f64, steps: usize) -> InterfaceState {
        let cfg = StepConfig::default();
        let v = forcing(st0.n_markers());
        let (mut st, mut h) = first_step(st0, &v, dt, &cfg).unwrap();
        for _ in 1..steps {
            let (s, hh) = step(&st, &v, &h, dt, &cfg).unwrap();
            st = s;
            h = hh;
        }
        st
    }

    #[test]
    fn starter_local_error_is_second_order() {
        let st0 = InterfaceState::from_radial(
            RadialShape {
                radius: 2.0,
                eps: 0.1,
                k: 2,
            },
            64,
        )
        .unwrap();
        let cfg = StepConfig::default();
        let v = forcing(64);
        let err = |dt: f64| {
            let (one, _) = first_step(&st0, &v, dt, &cfg).unwrap();
            let (half, _) = first_step(&st0, &v, dt / 2.0, &cfg).unwrap();
            let (two, _) = first_step(&half, &v, dt / 2.0, &cfg).unwrap();
            max_abs_diff(&one.theta, &two.theta)
        };
        let ratio = err(2e-3) / err(1e-3);
        assert!((ratio - 4.0).abs() < 0.8, "{ratio}");
    }

    #[test]
    fn global_error_is_second_order() {
        let st0 = InterfaceState::from_radial(
            RadialShape {
                radius: 2.0,
                eps: 0.1,
                k: 2,
            },
            64,
        )
        .unwrap();
        let t_end = 0.2;
        let area_at =
            |dt: f64| area(&reconstruct(&run(&st0, dt, (t_end / dt).round() as usize)).unwrap());
        let reference = area_at(0.2 / 640.0);
        let e1 = (area_at(0.01) - reference).abs();
        let e2 = (area_at(0.005) - reference).abs();
        let ratio = e1 / e2;
        assert!((ratio - 4.0).abs() < 1.2, "{ratio}");
    }

    #[test]
    fn markers_stay_equally_spaced() {
        let st0 = InterfaceState::from_radial(
            RadialShape {
                radius: 2.0,
                eps: 0.1,
                k: 2,
            },
            64,
        )
        .unwrap();
        let st = run(&st0, 1e-3, 50);
        let c = reconstruct(&st).unwrap();
        let mean = c.speed.iter().sum::<f64>() / 64.0;
        assert!(
            c.speed.iter().all(|s| ((s - mean) / mean).abs() < 1e-8),
            "{:?}",
            c.speed
        );
        assert!((mean - st.s_alpha).abs() < 1e-12);
    }
}
