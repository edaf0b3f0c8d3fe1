//! Linear stability of a perturbed circular tumor `r = R + delta cos(l theta)`
//! around a circular necrotic core of radius `R0`.
//!
//! Nutrient: `sigma = A1 I0(r) + A2 K0(r) + delta cos(l theta) (B1 I_l(r) + B2 K_l(r))`.
//! Modified pressure: `pbar = C1 + C2 ln r + delta cos(l theta) (D1 r^l + D2 r^-l)`.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::solver::Params;
use crate::special_functions::{bessel_i, bessel_k, BesselError};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LinearError {
    #[error("radius {r} must exceed the necrotic radius {r0} > 0")]
    Radius { r: f64, r0: f64 },
    #[error("mode must be at least 2, got {0}")]
    Mode(u32),
    #[error("coefficient system is singular at R = {0}")]
    Singular(f64),
    #[error("critical apoptosis has a pole at R = {0}")]
    Pole(f64),
    #[error("time step must be positive, got {0}")]
    Step(f64),
    #[error(transparent)]
    Bessel(#[from] BesselError),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LinearConfig {
    /// Necrotic radius.
    pub r0: f64,
    /// Perturbation mode.
    pub l: u32,
    pub params: Params,
    pub r_init: f64,
    pub delta_init: f64,
}

impl LinearConfig {
    pub fn validate(&self) -> Result<(), LinearError> {
        if self.l < 2 {
            return Err(LinearError::Mode(self.l));
        }
        check_radius(self.r_init, self.r0)?;
        if (self.delta_init / self.r_init).abs() > 0.2 {
            log::warn!(
                "delta/R = {} is outside the linear regime",
                self.delta_init / self.r_init
            );
        }
        Ok(())
    }
}

fn check_radius(r: f64, r0: f64) -> Result<(), LinearError> {
    if !(r0 > 0.0 && r > r0 && r.is_finite()) {
        return Err(LinearError::Radius { r, r0 });
    }
    Ok(())
}

/// All expansion coefficients at one radius.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Coefficients {
    pub a1: f64,
    pub a2: f64,
    pub b1: f64,
    pub b2: f64,
    pub c1: f64,
    pub c2: f64,
    pub d1: f64,
    pub d2: f64,
}

/// Bessel values reused by every formula.
struct Bessels {
    i0r: f64,
    i1r: f64,
    k0r: f64,
    k1r: f64,
    ilr: f64,
    klr: f64,
    ilm1r: f64,
    klm1r: f64,
    i00: f64,
    i10: f64,
    k00: f64,
    k10: f64,
    il0: f64,
    kl0: f64,
    ilm10: f64,
    klm10: f64,
}

impl Bessels {
    fn new(r: f64, r0: f64, l: u32) -> Result<Self, LinearError> {
        Ok(Self {
            i0r: bessel_i(0, r)?,
            i1r: bessel_i(1, r)?,
            k0r: bessel_k(0, r)?,
            k1r: bessel_k(1, r)?,
            ilr: bessel_i(l, r)?,
            klr: bessel_k(l, r)?,
            ilm1r: bessel_i(l - 1, r)?,
            klm1r: bessel_k(l - 1, r)?,
            i00: bessel_i(0, r0)?,
            i10: bessel_i(1, r0)?,
            k00: bessel_k(0, r0)?,
            k10: bessel_k(1, r0)?,
            il0: bessel_i(l, r0)?,
            kl0: bessel_k(l, r0)?,
            ilm10: bessel_i(l - 1, r0)?,
            klm10: bessel_k(l - 1, r0)?,
        })
    }
}

fn nonzero(v: f64, r: f64) -> Result<f64, LinearError> {
    if v == 0.0 || !v.is_finite() {
        Err(LinearError::Singular(r))
    } else {
        Ok(v)
    }
}

/// Radial nutrient coefficients: `sigma = sigma_n` at `R0`, Robin condition at `R`.
pub fn radial_coeffs(r: f64, cfg: &LinearConfig) -> Result<(f64, f64), LinearError> {
    check_radius(r, cfg.r0)?;
    let b = Bessels::new(r, cfg.r0, cfg.l)?;
    radial_from(&b, r, &cfg.params)
}

fn radial_from(b: &Bessels, r: f64, p: &Params) -> Result<(f64, f64), LinearError> {
    let (beta, sn) = (p.beta, p.sigma_n);
    let den = nonzero(
        b.k00 * (beta * b.i0r + b.i1r) + b.i00 * (b.k1r - beta * b.k0r),
        r,
    )?;
    let a1 = (sn * (b.k1r - beta * b.k0r) + beta * b.k00) / den;
    let a2 = (sn * (beta * b.i0r + b.i1r) - beta * b.i00) / den;
    Ok((a1, a2))
}

/// Mode-`l` nutrient coefficients.
pub fn perturb_coeffs(r: f64, cfg: &LinearConfig) -> Result<(f64, f64), LinearError> {
    check_radius(r, cfg.r0)?;
    let b = Bessels::new(r, cfg.r0, cfg.l)?;
    let (a1, a2) = radial_from(&b, r, &cfg.params)?;
    perturb_from(&b, r, cfg.l, cfg.params.beta, a1, a2)
}

fn perturb_from(
    b: &Bessels,
    r: f64,
    l: u32,
    beta: f64,
    a1: f64,
    a2: f64,
) -> Result<(f64, f64), LinearError> {
    let lf = l as f64;
    let num =
        a1 * ((beta * r - 1.0) * b.i1r + r * b.i0r) + a2 * ((1.0 - beta * r) * b.k1r + r * b.k0r);
    let den = nonzero(
        b.il0 * ((lf - beta * r) * b.klr + r * b.klm1r)
            + b.kl0 * ((beta * r - lf) * b.ilr + r * b.ilm1r),
        r,
    )?;
    Ok((-b.kl0 * num / den, b.il0 * num / den))
}

/// Pressure coefficients from the Dirichlet data on `Gamma` and the Neumann
/// data `P dsigma/dn0 - P A R0 / 2` on `Gamma0`.
pub fn pressure_coeffs(
    r: f64,
    cfg: &LinearConfig,
    a1: f64,
    a2: f64,
    b1: f64,
    b2: f64,
) -> Result<(f64, f64, f64, f64), LinearError> {
    check_radius(r, cfg.r0)?;
    let b = Bessels::new(r, cfg.r0, cfg.l)?;
    Ok(pressure_from(&b, r, cfg, a1, a2, b1, b2))
}

fn pressure_from(
    b: &Bessels,
    r: f64,
    cfg: &LinearConfig,
    a1: f64,
    a2: f64,
    b1: f64,
    b2: f64,
) -> (f64, f64, f64, f64) {
    let p = &cfg.params;
    let (r0, l) = (cfg.r0, cfg.l as i32);
    let lf = l as f64;
    let pa = p.p * p.a;
    let q0 = a1 * b.i10 - a2 * b.k10;
    let f = a1 * b.i1r - a2 * b.k1r + b1 * b.ilr + b2 * b.klr;
    let w = b1 * b.ilm10 - b2 * b.klm10;
    let sig0 = a1 * b.i0r + a2 * b.k0r;
    let c2 = p.p * q0 * r0 - 0.5 * pa * r0 * r0;
    let c1 = p.ginv / r - 0.25 * pa * r * r + (p.p - p.chi) * sig0 - c2 * r.ln();
    // D1 R^l + D2 R^-l = rhs ; D1 R0^l - D2 R0^-l = P R0 W / l
    let rhs = p.ginv * (lf * lf - 1.0) / (r * r) - 0.5 * pa * r + (p.p - p.chi) * f - c2 / r;
    let rl = r.powi(l);
    let den = r.powi(2 * l) + r0.powi(2 * l);
    let d1 = (rl * rhs + p.p * r0.powi(l + 1) * w / lf) / den;
    let d2 = (rl * r0.powi(2 * l) * rhs - r.powi(2 * l) * r0.powi(l + 1) * p.p * w / lf) / den;
    (c1, c2, d1, d2)
}

/// Every coefficient at radius `r`.
pub fn coefficients(r: f64, cfg: &LinearConfig) -> Result<Coefficients, LinearError> {
    check_radius(r, cfg.r0)?;
    let b = Bessels::new(r, cfg.r0, cfg.l)?;
    coefficients_from(&b, r, cfg)
}

fn coefficients_from(b: &Bessels, r: f64, cfg: &LinearConfig) -> Result<Coefficients, LinearError> {
    let (a1, a2) = radial_from(b, r, &cfg.params)?;
    let (b1, b2) = perturb_from(b, r, cfg.l, cfg.params.beta, a1, a2)?;
    let (c1, c2, d1, d2) = pressure_from(b, r, cfg, a1, a2, b1, b2);
    Ok(Coefficients {
        a1,
        a2,
        b1,
        b2,
        c1,
        c2,
        d1,
        d2,
    })
}

/// Growth rate of the unperturbed radius.
pub fn dr_dt(r: f64, cfg: &LinearConfig) -> Result<f64, LinearError> {
    check_radius(r, cfg.r0)?;
    let b = Bessels::new(r, cfg.r0, cfg.l)?;
    let (a1, a2) = radial_from(&b, r, &cfg.params)?;
    Ok(dr_dt_from(&b, r, cfg, a1, a2))
}

fn dr_dt_from(b: &Bessels, r: f64, cfg: &LinearConfig, a1: f64, a2: f64) -> f64 {
    let p = &cfg.params;
    let r0 = cfg.r0;
    p.p * (a1 * b.i1r - a2 * b.k1r - r0 / r * (a1 * b.i10 - a2 * b.k10))
        - 0.5 * p.p * p.a * (r * r - r0 * r0) / r
}

/// The labelled contributions to `(delta/R)^-1 d(delta/R)/dt`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ShapeTerms {
    pub apoptosis: f64,
    pub adhesion: f64,
    pub angiogenesis: f64,
    pub chemotaxis: f64,
    /// Proliferation contribution carried by the necrotic-core flux.
    pub proliferation_core: f64,
    /// Proliferation contribution carried by the interface nutrient.
    pub proliferation_rim: f64,
}

impl ShapeTerms {
    pub fn total(&self) -> f64 {
        self.apoptosis
            + self.adhesion
            + self.angiogenesis
            + self.chemotaxis
            + self.proliferation_core
            + self.proliferation_rim
    }

    /// Sum of the terms that do not scale with the apoptosis ratio.
    fn without_apoptosis(&self) -> f64 {
        self.total() - self.apoptosis
    }
}

fn shape_terms_from(b: &Bessels, r: f64, cfg: &LinearConfig, c: &Coefficients) -> ShapeTerms {
    let p = &cfg.params;
    let (r0, l) = (cfg.r0, cfg.l as i32);
    let lf = l as f64;
    let den = r.powi(2 * l) + r0.powi(2 * l);
    let g = 1.0 - 2.0 * r0.powi(2 * l) / den;
    let rho2 = (r0 / r).powi(2);
    let q0 = c.a1 * b.i10 - c.a2 * b.k10;
    let fb = c.b1 * b.ilr + c.b2 * b.klr;
    let f = c.a1 * b.i1r - c.a2 * b.k1r + fb;
    let w = c.b1 * b.ilm10 - c.b2 * b.klm10;
    ShapeTerms {
        apoptosis: p.p * p.a * ((1.0 - rho2) * g * lf / 2.0 - rho2),
        adhesion: -p.ginv * lf * (lf * lf - 1.0) / r.powi(3) * g,
        angiogenesis: -p.p
            * p.beta
            * (1.0 / r + c.a1 * (b.i1r - b.i0r / r) - c.a2 * (b.k1r + b.k0r / r) + fb),
        chemotaxis: p.chi * f * g * lf / r,
        proliferation_core: p.p
            * (q0 * r0 / (r * r) * (2.0 + lf * g)
                - 2.0 * w * r.powi(l) * r0.powi(l) / den * r0 / r),
        proliferation_rim: -p.p * f * g * lf / r,
    }
}

/// Labelled terms of the shape-factor growth rate.
pub fn shape_terms(r: f64, cfg: &LinearConfig) -> Result<ShapeTerms, LinearError> {
    check_radius(r, cfg.r0)?;
    let b = Bessels::new(r, cfg.r0, cfg.l)?;
    let c = coefficients_from(&b, r, cfg)?;
    Ok(shape_terms_from(&b, r, cfg, &c))
}

/// `(delta/R)^-1 d(delta/R)/dt`, from the mode-`l` normal velocity
/// `V_1 = -d/dr(pbar)_1 - P A / 2 - P beta sigma_1` minus `R'/R`.
pub fn dshape_dt(r: f64, cfg: &LinearConfig) -> Result<f64, LinearError> {
    check_radius(r, cfg.r0)?;
    let b = Bessels::new(r, cfg.r0, cfg.l)?;
    let c = coefficients_from(&b, r, cfg)?;
    Ok(dshape_from(&b, r, cfg, &c))
}

fn dshape_from(b: &Bessels, r: f64, cfg: &LinearConfig, c: &Coefficients) -> f64 {
    let p = &cfg.params;
    let l = cfg.l as i32;
    let lf = l as f64;
    let f = c.a1 * b.i1r - c.a2 * b.k1r + c.b1 * b.ilr + c.b2 * b.klr;
    let dp1 = -c.c2 / (r * r) + lf * (c.d1 * r.powi(l - 1) - c.d2 * r.powi(-l - 1));
    let v1 = -dp1 - 0.5 * p.p * p.a - p.p * p.beta * f;
    v1 - dr_dt_from(b, r, cfg, c.a1, c.a2) / r
}

/// Apoptosis ratio at which the shape factor is stationary.
pub fn critical_apoptosis(r: f64, cfg: &LinearConfig) -> Result<f64, LinearError> {
    let t = shape_terms(r, cfg)?;
    let lf = cfg.l as f64;
    let den = cfg.r0.powi(2 * cfg.l as i32) + r.powi(2 * cfg.l as i32);
    let g = 1.0 - 2.0 * cfg.r0.powi(2 * cfg.l as i32) / den;
    let rho2 = (cfg.r0 / r).powi(2);
    let bracket = cfg.params.p * ((1.0 - rho2) * g * lf / 2.0 - rho2);
    if bracket.abs() < 1e-14 {
        return Err(LinearError::Pole(r));
    }
    Ok(-t.without_apoptosis() / bracket)
}

/// One row of a stability diagram.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StabilityRow {
    pub r: f64,
    /// `None` at a pole of the critical apoptosis curve.
    pub a_c: Option<f64>,
    pub terms: ShapeTerms,
}

/// Critical apoptosis and term breakdown on a radius grid. Sign changes of the
/// apoptosis bracket between grid points are reported as poles.
pub fn stability_curve(
    cfg: &LinearConfig,
    radii: &[f64],
) -> Result<Vec<StabilityRow>, LinearError> {
    let mut rows = Vec::with_capacity(radii.len());
    let mut prev_bracket: Option<f64> = None;
    for &r in radii {
        let terms = shape_terms(r, cfg)?;
        let bracket = if cfg.params.p * cfg.params.a != 0.0 {
            terms.apoptosis / (cfg.params.p * cfg.params.a)
        } else {
            let mut unit = *cfg;
            unit.params.a = 1.0;
            unit.params.p = 1.0;
            shape_terms(r, &unit)?.apoptosis
        };
        let crosses = prev_bracket.is_some_and(|b| b.signum() != bracket.signum());
        prev_bracket = Some(bracket);
        let a_c = if crosses {
            None
        } else {
            critical_apoptosis(r, cfg).ok()
        };
        rows.push(StabilityRow { r, a_c, terms });
    }
    Ok(rows)
}

/// Linearized traces on the four boundary pieces, at the given polar angles.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinearTraces {
    /// Modified pressure on `Gamma0`.
    pub pbar_gamma0: Vec<f64>,
    pub dsigma_dn0: Vec<f64>,
    pub sigma_gamma: Vec<f64>,
    pub dpbar_dn: Vec<f64>,
}

pub fn linear_boundary_traces(
    r: f64,
    delta: f64,
    theta: &[f64],
    cfg: &LinearConfig,
) -> Result<LinearTraces, LinearError> {
    check_radius(r, cfg.r0)?;
    let b = Bessels::new(r, cfg.r0, cfg.l)?;
    let c = coefficients_from(&b, r, cfg)?;
    let (r0, l) = (cfg.r0, cfg.l as i32);
    let lf = l as f64;
    let f = c.a1 * b.i1r - c.a2 * b.k1r + c.b1 * b.ilr + c.b2 * b.klr;
    let p0 = c.c1 + c.c2 * r0.ln();
    let p1 = c.d1 * r0.powi(l) + c.d2 * r0.powi(-l);
    let q0 = c.a1 * b.i10 - c.a2 * b.k10;
    let q1 = c.b1 * (b.ilm10 - lf / r0 * b.il0) - c.b2 * (b.klm10 + lf / r0 * b.kl0);
    let s0 = c.a1 * b.i0r + c.a2 * b.k0r;
    let dp0 = c.c2 / r;
    let dp1 = -c.c2 / (r * r) + lf * (c.d1 * r.powi(l - 1) - c.d2 * r.powi(-l - 1));
    let wave: Vec<f64> = theta.iter().map(|t| delta * (lf * t).cos()).collect();
    Ok(LinearTraces {
        pbar_gamma0: wave.iter().map(|w| p0 + w * p1).collect(),
        dsigma_dn0: wave.iter().map(|w| q0 + w * q1).collect(),
        sigma_gamma: wave.iter().map(|w| s0 + w * f).collect(),
        dpbar_dn: wave.iter().map(|w| dp0 + w * dp1).collect(),
    })
}

/// Integrated radius and shape factor.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinearPrediction {
    pub times: Vec<f64>,
    pub radius: Vec<f64>,
    pub delta_over_r: Vec<f64>,
    pub coefficients: Vec<Coefficients>,
    /// Set when the radius reached the necrotic core before `t_final`.
    pub halted: bool,
}

impl LinearPrediction {
    /// Linear interpolation of `(R, delta/R)` at time `t`.
    pub fn at(&self, t: f64) -> Option<(f64, f64)> {
        let i = self.times.iter().position(|&s| s >= t)?;
        if i == 0 {
            return Some((self.radius[0], self.delta_over_r[0]));
        }
        let (t0, t1) = (self.times[i - 1], self.times[i]);
        let w = (t - t0) / (t1 - t0);
        let lerp = |v: &[f64]| v[i - 1] + w * (v[i] - v[i - 1]);
        Some((lerp(&self.radius), lerp(&self.delta_over_r)))
    }
}

fn rates(r: f64, q: f64, cfg: &LinearConfig) -> Result<(f64, f64), LinearError> {
    check_radius(r, cfg.r0)?;
    let b = Bessels::new(r, cfg.r0, cfg.l)?;
    let c = coefficients_from(&b, r, cfg)?;
    Ok((
        dr_dt_from(&b, r, cfg, c.a1, c.a2),
        q * dshape_from(&b, r, cfg, &c),
    ))
}

/// Classical fourth-order integration of `R' = dR/dt`, `(delta/R)' = (delta/R) dshape_dt`.
pub fn integrate_linear_odes(
    cfg: &LinearConfig,
    t_final: f64,
    dt: f64,
) -> Result<LinearPrediction, LinearError> {
    if !(dt > 0.0) {
        return Err(LinearError::Step(dt));
    }
    cfg.validate()?;
    let steps = (t_final / dt).round() as usize;
    let mut r = cfg.r_init;
    let mut q = cfg.delta_init / cfg.r_init;
    let mut out = LinearPrediction {
        times: vec![0.0],
        radius: vec![r],
        delta_over_r: vec![q],
        coefficients: vec![coefficients(r, cfg)?],
        halted: false,
    };
    for n in 0..steps {
        let stage = || -> Result<(f64, f64), LinearError> {
            let (k1r, k1q) = rates(r, q, cfg)?;
            let (k2r, k2q) = rates(r + 0.5 * dt * k1r, q + 0.5 * dt * k1q, cfg)?;
            let (k3r, k3q) = rates(r + 0.5 * dt * k2r, q + 0.5 * dt * k2q, cfg)?;
            let (k4r, k4q) = rates(r + dt * k3r, q + dt * k3q, cfg)?;
            Ok((
                r + dt / 6.0 * (k1r + 2.0 * k2r + 2.0 * k3r + k4r),
                q + dt / 6.0 * (k1q + 2.0 * k2q + 2.0 * k3q + k4q),
            ))
        };
        match stage() {
            Ok((rn, qn)) if rn > cfg.r0 => {
                r = rn;
                q = qn;
            }
            Ok(_) | Err(LinearError::Radius { .. }) => {
                out.halted = true;
                break;
            }
            Err(e) => return Err(e),
        }
        out.times.push((n + 1) as f64 * dt);
        out.radius.push(r);
        out.delta_over_r.push(q);
        out.coefficients.push(coefficients(r, cfg)?);
    }
    Ok(out)
}
