//! Boundary integral systems for the nutrient and the modified pressure on the
//! annulus between the fixed boundary and the moving interface.
//!
//! Unknowns are ordered fixed-boundary first, then interface:
//! nutrient `(dsigma/dn0 on Gamma0, sigma on Gamma)`,
//! pressure `(pbar on Gamma0, dpbar/dn on Gamma)`.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geometry::{FixedBoundary, PlanarCurveSamples};
use crate::gmres::{gmres, GmresConfig};
use crate::kernels::{LayerBlocks, QuadratureContext};

/// Spatial dimension of the model.
pub const DIM: f64 = 2.0;

/// Dimensionless model constants.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Params {
    /// Proliferation rate.
    #[serde(rename = "P")]
    pub p: f64,
    /// Apoptosis ratio.
    #[serde(rename = "A")]
    pub a: f64,
    /// Chemotaxis coefficient.
    pub chi: f64,
    /// Angiogenesis (Robin) coefficient.
    pub beta: f64,
    /// Nutrient level on the necrotic boundary.
    pub sigma_n: f64,
    /// Inverse cell-cell adhesion.
    #[serde(rename = "Ginv")]
    pub ginv: f64,
}

impl Params {
    pub fn validate(&self) -> Result<(), String> {
        let all = [self.p, self.a, self.chi, self.beta, self.sigma_n, self.ginv];
        if all.iter().any(|v| !v.is_finite()) {
            return Err("parameters must be finite".into());
        }
        if self.p < 0.0 {
            return Err("P must be >= 0".into());
        }
        if self.beta < 0.0 {
            return Err("beta must be >= 0".into());
        }
        if !(0.0..=1.0).contains(&self.sigma_n) {
            return Err("sigma_n must lie in [0, 1]".into());
        }
        if self.ginv < 0.0 {
            return Err("Ginv must be >= 0".into());
        }
        Ok(())
    }
}

/// Dimensional inputs for [`dimensionless_params`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DimensionalInputs {
    /// Nutrient diffusion coefficient.
    pub d: f64,
    /// Nutrient uptake rate.
    pub lambda: f64,
    /// Mitosis rate.
    pub lambda_m: f64,
    /// Apoptosis rate.
    pub lambda_a: f64,
    /// Cell mobility.
    pub mu: f64,
    /// Surface tension.
    pub gamma: f64,
    /// Chemotaxis reference scale.
    pub chibar: f64,
    /// Chemotaxis coefficient.
    pub chi: f64,
    /// Far-field nutrient level.
    pub sigma_inf: f64,
    /// Nutrient level at the necrotic boundary.
    pub sigma_n: f64,
    /// Vascular transfer coefficient.
    pub beta: f64,
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SolverError {
    #[error("invalid dimensional input: {0}")]
    InvalidInput(&'static str),
    #[error("{system} system: GMRES stopped after {iterations} iterations at relative residual {residual:.3e}")]
    NotConverged {
        system: &'static str,
        iterations: usize,
        residual: f64,
    },
    #[error("expected {expected} values, got {found}")]
    Length { expected: usize, found: usize },
}

/// Diffusion length `L = sqrt(D / lambda)`, chemotactic rate
/// `lambda_chi = chibar sigma_inf / L^2` and the resulting dimensionless groups.
pub fn dimensionless_params(d: &DimensionalInputs) -> Result<Params, SolverError> {
    if !(d.d > 0.0) {
        return Err(SolverError::InvalidInput("D must be positive"));
    }
    if !(d.lambda > 0.0) {
        return Err(SolverError::InvalidInput("lambda must be positive"));
    }
    if !(d.mu > 0.0) {
        return Err(SolverError::InvalidInput("mu must be positive"));
    }
    if !(d.sigma_inf > 0.0) {
        return Err(SolverError::InvalidInput("sigma_inf must be positive"));
    }
    if !(d.chibar > 0.0) || !(d.lambda_m > 0.0) {
        return Err(SolverError::InvalidInput(
            "chibar and lambda_M must be positive",
        ));
    }
    let l = (d.d / d.lambda).sqrt();
    let lambda_chi = d.chibar * d.sigma_inf / (l * l);
    Ok(Params {
        p: d.lambda_m / lambda_chi,
        a: d.lambda_a / d.lambda_m,
        chi: d.chi / d.chibar,
        beta: l * d.beta,
        sigma_n: d.sigma_n / d.sigma_inf,
        ginv: d.mu * d.gamma / (lambda_chi * l * l * l),
    })
}

/// Solved boundary traces.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundaryFields {
    pub dsigma_dn0: Vec<f64>,
    pub sigma_gamma: Vec<f64>,
    pub pbar_gamma0: Vec<f64>,
    pub dpbar_dn: Vec<f64>,
    pub gmres_iters_nutrient: usize,
    pub gmres_iters_pressure: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct NutrientSolution {
    pub dsigma_dn0: Vec<f64>,
    pub sigma_gamma: Vec<f64>,
    pub iterations: usize,
}

/// Boundary data for the modified pressure: Neumann on `Gamma0`, Dirichlet on `Gamma`.
#[derive(Debug, Clone, PartialEq)]
pub struct PressureData {
    pub neumann_gamma0: Vec<f64>,
    pub dirichlet_gamma: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PressureSolution {
    pub pbar_gamma0: Vec<f64>,
    pub dpbar_dn: Vec<f64>,
    pub iterations: usize,
}

/// Layer operators for one interface position.
#[derive(Debug, Clone)]
pub struct Assembly {
    /// Targets and sources on `Gamma`.
    pub on_gamma: LayerBlocks,
    /// Targets on `Gamma0`, sources on `Gamma`.
    pub gamma_to_gamma0: LayerBlocks,
    /// Targets on `Gamma`, sources on `Gamma0`.
    pub gamma0_to_gamma: LayerBlocks,
}

/// Solver bound to a fixed necrotic boundary; its self-interaction blocks are
/// computed once.
#[derive(Debug, Clone)]
pub struct BimSolver {
    pub gamma0: FixedBoundary,
    on_gamma0: LayerBlocks,
    quad: Option<QuadratureContext>,
    pub gmres: GmresConfig,
}

fn block2(
    a11: &DMatrix<f64>,
    a12: &DMatrix<f64>,
    a21: &DMatrix<f64>,
    a22: &DMatrix<f64>,
) -> DMatrix<f64> {
    let (n0, n) = (a11.nrows(), a22.nrows());
    let mut m = DMatrix::zeros(n0 + n, n0 + n);
    m.view_mut((0, 0), (n0, n0)).copy_from(a11);
    m.view_mut((0, n0), (n0, n)).copy_from(a12);
    m.view_mut((n0, 0), (n, n0)).copy_from(a21);
    m.view_mut((n0, n0), (n, n)).copy_from(a22);
    m
}

fn row_sums(m: &DMatrix<f64>) -> DVector<f64> {
    m * DVector::from_element(m.ncols(), 1.0)
}

fn add_diagonal(m: &mut DMatrix<f64>, v: f64) {
    for i in 0..m.nrows().min(m.ncols()) {
        m[(i, i)] += v;
    }
}

impl BimSolver {
    pub fn new(gamma0: FixedBoundary, gmres: GmresConfig) -> Self {
        let quad0 = QuadratureContext::new(gamma0.len());
        let on_gamma0 = LayerBlocks::on_curve(&gamma0.samples, &quad0);
        Self {
            gamma0,
            on_gamma0,
            quad: None,
            gmres,
        }
    }

    fn quadrature(&self, n: usize) -> QuadratureContext {
        match &self.quad {
            Some(q) if q.m * 2 == n => q.clone(),
            _ => QuadratureContext::new(n),
        }
    }

    /// Cache Kress weights for interfaces with `n` nodes.
    pub fn prepare(&mut self, n: usize) {
        self.quad = Some(QuadratureContext::new(n));
    }

    pub fn assemble(&self, gamma: &PlanarCurveSamples) -> Assembly {
        let quad = self.quadrature(gamma.len());
        let g0 = &self.gamma0.samples;
        Assembly {
            on_gamma: LayerBlocks::on_curve(gamma, &quad),
            gamma_to_gamma0: LayerBlocks::between(g0, gamma),
            gamma0_to_gamma: LayerBlocks::between(gamma, g0),
        }
    }

    pub fn solve_nutrient(
        &self,
        asm: &Assembly,
        params: &Params,
    ) -> Result<NutrientSolution, SolverError> {
        let b0 = &self.on_gamma0;
        let n0 = self.gamma0.len();
        let beta = params.beta;
        let a11 = &b0.helm_single;
        let a12 = &asm.gamma_to_gamma0.helm_single * beta + &asm.gamma_to_gamma0.helm_double;
        let a21 = &asm.gamma0_to_gamma.helm_single;
        let mut a22 = &asm.on_gamma.helm_single * beta + &asm.on_gamma.helm_double;
        add_diagonal(&mut a22, 0.5);
        let m = block2(a11, &a12, a21, &a22);

        let sn = params.sigma_n;
        let rhs1 = (row_sums(&b0.helm_double).add_scalar(-0.5)) * sn
            + row_sums(&asm.gamma_to_gamma0.helm_single) * beta;
        let rhs2 = row_sums(&asm.gamma0_to_gamma.helm_double) * sn
            + row_sums(&asm.on_gamma.helm_single) * beta;
        let rhs: Vec<f64> = rhs1.iter().chain(rhs2.iter()).copied().collect();

        let sol = gmres(&m, &rhs, &self.gmres);
        if !sol.converged {
            return Err(SolverError::NotConverged {
                system: "nutrient",
                iterations: sol.iterations,
                residual: sol.residual,
            });
        }
        Ok(NutrientSolution {
            dsigma_dn0: sol.x[..n0].to_vec(),
            sigma_gamma: sol.x[n0..].to_vec(),
            iterations: sol.iterations,
        })
    }

    pub fn solve_pressure(
        &self,
        asm: &Assembly,
        data: &PressureData,
    ) -> Result<PressureSolution, SolverError> {
        let b0 = &self.on_gamma0;
        let n0 = self.gamma0.len();
        let n = asm.on_gamma.lap_single.nrows();
        if data.neumann_gamma0.len() != n0 {
            return Err(SolverError::Length {
                expected: n0,
                found: data.neumann_gamma0.len(),
            });
        }
        if data.dirichlet_gamma.len() != n {
            return Err(SolverError::Length {
                expected: n,
                found: data.dirichlet_gamma.len(),
            });
        }
        let mut b11 = b0.lap_double.clone();
        add_diagonal(&mut b11, -0.5);
        let m = block2(
            &b11,
            &asm.gamma_to_gamma0.lap_single,
            &asm.gamma0_to_gamma.lap_double,
            &asm.on_gamma.lap_single,
        );
        let q0 = DVector::from_column_slice(&data.neumann_gamma0);
        let pg = DVector::from_column_slice(&data.dirichlet_gamma);
        let rhs1 = &b0.lap_single * &q0 + &asm.gamma_to_gamma0.lap_double * &pg;
        let rhs2 =
            &asm.gamma0_to_gamma.lap_single * &q0 + &asm.on_gamma.lap_double * &pg + &pg * 0.5;
        let rhs: Vec<f64> = rhs1.iter().chain(rhs2.iter()).copied().collect();

        let sol = gmres(&m, &rhs, &self.gmres);
        if !sol.converged {
            return Err(SolverError::NotConverged {
                system: "pressure",
                iterations: sol.iterations,
                residual: sol.residual,
            });
        }
        Ok(PressureSolution {
            pbar_gamma0: sol.x[..n0].to_vec(),
            dpbar_dn: sol.x[n0..].to_vec(),
            iterations: sol.iterations,
        })
    }

    /// Nutrient solve, pressure data, pressure solve.
    pub fn solve_fields(
        &self,
        gamma: &PlanarCurveSamples,
        curvature: &[f64],
        params: &Params,
    ) -> Result<BoundaryFields, SolverError> {
        let asm = self.assemble(gamma);
        self.solve_fields_with(&asm, gamma, curvature, params)
    }

    pub fn solve_fields_with(
        &self,
        asm: &Assembly,
        gamma: &PlanarCurveSamples,
        curvature: &[f64],
        params: &Params,
    ) -> Result<BoundaryFields, SolverError> {
        let nut = self.solve_nutrient(asm, params)?;
        let data = pressure_rhs(
            &self.gamma0,
            gamma,
            params,
            &nut.dsigma_dn0,
            &nut.sigma_gamma,
            curvature,
        );
        let pr = self.solve_pressure(asm, &data)?;
        Ok(BoundaryFields {
            dsigma_dn0: nut.dsigma_dn0,
            sigma_gamma: nut.sigma_gamma,
            pbar_gamma0: pr.pbar_gamma0,
            dpbar_dn: pr.dpbar_dn,
            gmres_iters_nutrient: nut.iterations,
            gmres_iters_pressure: pr.iterations,
        })
    }
}

/// One-shot nutrient solve.
pub fn solve_nutrient(
    gamma0: &FixedBoundary,
    gamma: &PlanarCurveSamples,
    params: &Params,
    tol: f64,
) -> Result<NutrientSolution, SolverError> {
    let solver = BimSolver::new(
        gamma0.clone(),
        GmresConfig {
            tol,
            ..GmresConfig::default()
        },
    );
    solver.solve_nutrient(&solver.assemble(gamma), params)
}

/// One-shot pressure solve.
pub fn solve_pressure(
    gamma0: &FixedBoundary,
    gamma: &PlanarCurveSamples,
    data: &PressureData,
    tol: f64,
) -> Result<PressureSolution, SolverError> {
    let solver = BimSolver::new(
        gamma0.clone(),
        GmresConfig {
            tol,
            ..GmresConfig::default()
        },
    );
    solver.solve_pressure(&solver.assemble(gamma), data)
}

/// Neumann datum `P dsigma/dn0 - P A (n0 . x) / d` on `Gamma0` and Dirichlet
/// datum `Ginv kappa + (P - chi) sigma - P A |x|^2 / (2d)` on `Gamma`.
pub fn pressure_rhs(
    gamma0: &FixedBoundary,
    gamma: &PlanarCurveSamples,
    params: &Params,
    dsigma_dn0: &[f64],
    sigma_gamma: &[f64],
    curvature: &[f64],
) -> PressureData {
    let g0 = &gamma0.samples;
    let pa = params.p * params.a;
    let neumann_gamma0 = (0..g0.len())
        .map(|j| {
            let nx = g0.nx[j] * g0.x[j] + g0.ny[j] * g0.y[j];
            params.p * dsigma_dn0[j] - pa * nx / DIM
        })
        .collect();
    let dirichlet_gamma = (0..gamma.len())
        .map(|j| {
            let r2 = gamma.x[j] * gamma.x[j] + gamma.y[j] * gamma.y[j];
            params.ginv * curvature[j] + (params.p - params.chi) * sigma_gamma[j]
                - pa * r2 / (2.0 * DIM)
        })
        .collect();
    PressureData {
        neumann_gamma0,
        dirichlet_gamma,
    }
}

/// Hydrostatic pressure `p = pbar - (P - chi) sigma + P A |x|^2 / (2d)`.
pub fn hydrostatic_pressure(
    pbar: &[f64],
    sigma: &[f64],
    x: &[f64],
    y: &[f64],
    params: &Params,
) -> Vec<f64> {
    let pa = params.p * params.a;
    (0..pbar.len())
        .map(|j| {
            pbar[j] - (params.p - params.chi) * sigma[j]
                + pa * (x[j] * x[j] + y[j] * y[j]) / (2.0 * DIM)
        })
        .collect()
}

/// `V = -dpbar/dn - P (A (n . x) / d - beta (1 - sigma))` on `Gamma`.
pub fn normal_velocity(
    fields: &BoundaryFields,
    gamma: &PlanarCurveSamples,
    params: &Params,
) -> Vec<f64> {
    (0..gamma.len())
        .map(|j| {
            let nx = gamma.nx[j] * gamma.x[j] + gamma.ny[j] * gamma.y[j];
            -fields.dpbar_dn[j]
                - params.p * (params.a * nx / DIM - params.beta * (1.0 - fields.sigma_gamma[j]))
        })
        .collect()
}
