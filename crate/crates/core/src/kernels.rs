//! Layer potentials of the Laplace kernel `-(1/2pi) ln r` and the modified
//! Helmholtz kernel `(1/2pi) K_0(r)`, discretized by Nystrom quadrature.
//!
//! Self-interactions split the kernel as `g1 ln(2|sin((a-a')/2)|) + g2` and
//! integrate the log part with Kress weights. The Laplace double layer has no
//! log part and uses the alternating-point rule. Interactions between two
//! disjoint curves use the plain trapezoidal rule.

use std::f64::consts::PI;

use nalgebra::DMatrix;
use thiserror::Error;

use crate::geometry::PlanarCurveSamples;
use crate::special_functions::{bessel_01_fit as bessel_01, k0_k1_fit as k0_k1, EULER_GAMMA};

const INV_2PI: f64 = 0.5 / PI;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Field {
    Laplace,
    ModifiedHelmholtz,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Layer {
    Single,
    Double,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct KernelKind {
    pub field: Field,
    pub layer: Layer,
}

impl KernelKind {
    pub const LAPLACE_SINGLE: Self = Self {
        field: Field::Laplace,
        layer: Layer::Single,
    };
    pub const LAPLACE_DOUBLE: Self = Self {
        field: Field::Laplace,
        layer: Layer::Double,
    };
    pub const HELMHOLTZ_SINGLE: Self = Self {
        field: Field::ModifiedHelmholtz,
        layer: Layer::Single,
    };
    pub const HELMHOLTZ_DOUBLE: Self = Self {
        field: Field::ModifiedHelmholtz,
        layer: Layer::Double,
    };
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum KernelError {
    #[error("density has {found} entries, source has {expected} nodes")]
    DensityLength { expected: usize, found: usize },
    #[error("node count {0} is not a power of two >= 4")]
    GridSize(usize),
}

/// Kress weights `q_j`, `j = 0..2m-1`, for `\int ln(2|sin((a_i-a')/2)|) f(a') da'`.
pub fn kress_weights(m: usize) -> Vec<f64> {
    assert!(m >= 1, "kress_weights needs m >= 1");
    let mf = m as f64;
    (0..2 * m)
        .map(|j| {
            let mut s = 0.0;
            for k in 1..m {
                s += (k as f64 * j as f64 * PI / mf).cos() / k as f64;
            }
            let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
            -PI / mf * s - sign * PI / (2.0 * mf * mf)
        })
        .collect()
}

/// Kress weights for an `n`-node grid, indexed by `|i - j|`.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureContext {
    pub m: usize,
    pub weights: Vec<f64>,
}

impl QuadratureContext {
    pub fn new(n: usize) -> Self {
        let m = n / 2;
        Self {
            m,
            weights: kress_weights(m),
        }
    }

    #[inline]
    pub fn q(&self, i: usize, j: usize) -> f64 {
        self.weights[i.abs_diff(j)]
    }
}

#[inline]
fn log_2sin(i: usize, j: usize, n: usize) -> f64 {
    let d = (i as f64 - j as f64) * PI / n as f64;
    (2.0 * d.sin().abs()).ln()
}

/// `(x_i - x_j) . n_j s_j / (2 pi r)`.
#[inline]
fn aux_h(tgt: [f64; 2], c: &PlanarCurveSamples, j: usize, r: f64) -> f64 {
    ((tgt[0] - c.x[j]) * c.nx[j] + (tgt[1] - c.y[j]) * c.ny[j]) * c.speed[j] * INV_2PI / r
}

/// Diagonal limit of `h / r`: `-(1/4pi)(x' y'' - x'' y') / |x'|^2`.
#[inline]
fn double_layer_diagonal(c: &PlanarCurveSamples, i: usize) -> f64 {
    -0.25 / PI * (c.dx[i] * c.ddy[i] - c.ddx[i] * c.dy[i]) / (c.speed[i] * c.speed[i])
}

/// Splitting `kernel * s(a') = g1 ln(2|sin((a-a')/2)|) + g2` for target node
/// `i` and source node `j` of the same curve.
pub fn split_log_kernel(
    kind: KernelKind,
    c: &PlanarCurveSamples,
    i: usize,
    j: usize,
) -> (f64, f64) {
    let n = c.len();
    let sj = c.speed[j];
    if i == j {
        return match (kind.field, kind.layer) {
            (Field::Laplace, Layer::Single) => (-sj * INV_2PI, -sj * INV_2PI * sj.ln()),
            (Field::ModifiedHelmholtz, Layer::Single) => (
                -sj * INV_2PI,
                -sj * INV_2PI * (EULER_GAMMA + (0.5 * sj).ln()),
            ),
            (_, Layer::Double) => (0.0, double_layer_diagonal(c, i)),
        };
    }
    let tgt = [c.x[i], c.y[i]];
    let r = (tgt[0] - c.x[j]).hypot(tgt[1] - c.y[j]);
    let ls = log_2sin(i, j, n);
    match (kind.field, kind.layer) {
        (Field::Laplace, Layer::Single) => (-sj * INV_2PI, -sj * INV_2PI * (r.ln() - ls)),
        (Field::Laplace, Layer::Double) => (0.0, aux_h(tgt, c, j, r) / r),
        (Field::ModifiedHelmholtz, Layer::Single) => {
            let (i0, _, k0, _) = bessel_01(r);
            (-sj * INV_2PI * i0, sj * INV_2PI * (k0 + i0 * ls))
        }
        (Field::ModifiedHelmholtz, Layer::Double) => {
            let (_, i1, _, k1) = bessel_01(r);
            let h = aux_h(tgt, c, j, r);
            (h * i1, h * (k1 - i1 * ls))
        }
    }
}

/// The full kernel value `kernel(x, y_j) * s_j` for a target off the source node.
#[inline]
fn kernel_times_metric(kind: KernelKind, tgt: [f64; 2], c: &PlanarCurveSamples, j: usize) -> f64 {
    let r = (tgt[0] - c.x[j]).hypot(tgt[1] - c.y[j]);
    match (kind.field, kind.layer) {
        (Field::Laplace, Layer::Single) => -INV_2PI * r.ln() * c.speed[j],
        (Field::Laplace, Layer::Double) => aux_h(tgt, c, j, r) / r,
        (Field::ModifiedHelmholtz, Layer::Single) => INV_2PI * k0_k1(r).0 * c.speed[j],
        (Field::ModifiedHelmholtz, Layer::Double) => aux_h(tgt, c, j, r) * k0_k1(r).1,
    }
}

/// Where a layer potential is evaluated.
#[derive(Debug, Clone, Copy)]
pub enum Target<'a> {
    /// On the source curve itself (singular quadrature).
    OnSource,
    /// At the nodes of another, disjoint curve.
    Curve(&'a PlanarCurveSamples),
}

/// Dense matrix mapping source densities to potential values at the targets.
pub fn layer_matrix(
    kind: KernelKind,
    source: &PlanarCurveSamples,
    target: Target<'_>,
) -> Result<DMatrix<f64>, KernelError> {
    let n = source.len();
    if n < 4 || !n.is_power_of_two() {
        return Err(KernelError::GridSize(n));
    }
    let h = 2.0 * PI / n as f64;
    match target {
        Target::Curve(t) => {
            let mut m = DMatrix::zeros(t.len(), n);
            for j in 0..n {
                for i in 0..t.len() {
                    m[(i, j)] = h * kernel_times_metric(kind, [t.x[i], t.y[i]], source, j);
                }
            }
            Ok(m)
        }
        Target::OnSource => {
            let mut m = DMatrix::zeros(n, n);
            if kind == KernelKind::LAPLACE_DOUBLE {
                for j in 0..n {
                    for i in 0..n {
                        if (i + j) % 2 == 1 {
                            m[(i, j)] = 2.0 * h * split_log_kernel(kind, source, i, j).1;
                        }
                    }
                }
                return Ok(m);
            }
            let quad = QuadratureContext::new(n);
            for j in 0..n {
                for i in 0..n {
                    let (g1, g2) = split_log_kernel(kind, source, i, j);
                    m[(i, j)] = quad.q(i, j) * g1 + h * g2;
                }
            }
            Ok(m)
        }
    }
}

/// Discretized layer potential of `density` at the targets.
pub fn apply_layer(
    kind: KernelKind,
    source: &PlanarCurveSamples,
    target: Target<'_>,
    density: &[f64],
) -> Result<Vec<f64>, KernelError> {
    if density.len() != source.len() {
        return Err(KernelError::DensityLength {
            expected: source.len(),
            found: density.len(),
        });
    }
    let m = layer_matrix(kind, source, target)?;
    Ok((m * nalgebra::DVector::from_column_slice(density))
        .as_slice()
        .to_vec())
}

/// Layer potential at an arbitrary point away from the source curve
/// (trapezoidal rule; accurate when the point is several spacings away).
pub fn potential_at(
    kind: KernelKind,
    source: &PlanarCurveSamples,
    point: [f64; 2],
    density: &[f64],
) -> f64 {
    let n = source.len();
    let h = 2.0 * PI / n as f64;
    (0..n)
        .map(|j| h * kernel_times_metric(kind, point, source, j) * density[j])
        .sum()
}

/// All four layer operators for one (target, source) pair.
#[derive(Debug, Clone)]
pub struct LayerBlocks {
    pub helm_single: DMatrix<f64>,
    pub helm_double: DMatrix<f64>,
    pub lap_single: DMatrix<f64>,
    pub lap_double: DMatrix<f64>,
}

impl LayerBlocks {
    /// Self-interaction blocks of one curve. Bessel values are shared between
    /// the symmetric pairs `(i, j)` and `(j, i)`.
    pub fn on_curve(c: &PlanarCurveSamples, quad: &QuadratureContext) -> Self {
        let n = c.len();
        let h = 2.0 * PI / n as f64;
        let mut hs = DMatrix::zeros(n, n);
        let mut hd = DMatrix::zeros(n, n);
        let mut ls = DMatrix::zeros(n, n);
        let mut ld = DMatrix::zeros(n, n);
        for i in 0..n {
            let si = c.speed[i];
            let dd = double_layer_diagonal(c, i);
            hs[(i, i)] = quad.q(i, i) * (-si * INV_2PI)
                + h * (-si * INV_2PI * (EULER_GAMMA + (0.5 * si).ln()));
            ls[(i, i)] = quad.q(i, i) * (-si * INV_2PI) + h * (-si * INV_2PI * si.ln());
            hd[(i, i)] = h * dd;
            for j in i + 1..n {
                let dxv = c.x[i] - c.x[j];
                let dyv = c.y[i] - c.y[j];
                let r = dxv.hypot(dyv);
                let lsin = log_2sin(i, j, n);
                let (i0, i1, k0, k1) = bessel_01(r);
                let q = quad.q(i, j);
                let lnr = r.ln();
                // (target i, source j) and (target j, source i)
                for (t, s, sx, sy) in [(i, j, dxv, dyv), (j, i, -dxv, -dyv)] {
                    let ss = c.speed[s];
                    let hh = (sx * c.nx[s] + sy * c.ny[s]) * ss * INV_2PI / r;
                    hs[(t, s)] = q * (-ss * INV_2PI * i0) + h * (ss * INV_2PI * (k0 + i0 * lsin));
                    hd[(t, s)] = q * (hh * i1) + h * (hh * (k1 - i1 * lsin));
                    ls[(t, s)] = q * (-ss * INV_2PI) + h * (-ss * INV_2PI * (lnr - lsin));
                    if (t + s) % 2 == 1 {
                        ld[(t, s)] = 2.0 * h * hh / r;
                    }
                }
            }
        }
        Self {
            helm_single: hs,
            helm_double: hd,
            lap_single: ls,
            lap_double: ld,
        }
    }

    /// Blocks for targets on `target` and sources on the disjoint curve `source`.
    pub fn between(target: &PlanarCurveSamples, source: &PlanarCurveSamples) -> Self {
        let nt = target.len();
        let ns = source.len();
        let h = 2.0 * PI / ns as f64;
        let mut hs = DMatrix::zeros(nt, ns);
        let mut hd = DMatrix::zeros(nt, ns);
        let mut ls = DMatrix::zeros(nt, ns);
        let mut ld = DMatrix::zeros(nt, ns);
        for j in 0..ns {
            let (xj, yj, nxj, nyj, sj) = (
                source.x[j],
                source.y[j],
                source.nx[j],
                source.ny[j],
                source.speed[j],
            );
            for i in 0..nt {
                let dxv = target.x[i] - xj;
                let dyv = target.y[i] - yj;
                let r2 = dxv * dxv + dyv * dyv;
                let r = r2.sqrt();
                let (k0, k1) = k0_k1(r);
                let proj = (dxv * nxj + dyv * nyj) * sj * INV_2PI;
                hs[(i, j)] = h * INV_2PI * k0 * sj;
                hd[(i, j)] = h * proj * k1 / r;
                ls[(i, j)] = -h * INV_2PI * 0.5 * r2.ln() * sj;
                ld[(i, j)] = h * proj / r2;
            }
        }
        Self {
            helm_single: hs,
            helm_double: hd,
            lap_single: ls,
            lap_double: ld,
        }
    }
}
