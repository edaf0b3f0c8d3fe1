//! Tables from the linear analysis for the `linstab` command: growth rates
//! and critical apoptosis on a radius grid, and the integrated linear ODEs.

use serde::Serialize;

use super::config::SimulationConfig;
use crate::linear::{
    dr_dt, dshape_dt, integrate_linear_odes, stability_curve, LinearError, LinearPrediction,
};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LinstabRow {
    pub r: f64,
    pub dr_dt: f64,
    /// `(delta/R)^-1 d(delta/R)/dt`.
    pub shape_rate: f64,
    /// Empty at a pole.
    pub a_c: Option<f64>,
    pub apoptosis: f64,
    pub adhesion: f64,
    pub angiogenesis: f64,
    pub chemotaxis: f64,
    pub proliferation_core: f64,
    pub proliferation_rim: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LinearOdeRow {
    pub t: f64,
    pub r: f64,
    pub delta_over_r: f64,
}

/// Evenly spaced radii in `[r_min, r_max]`.
pub fn radius_grid(r_min: f64, r_max: f64, points: usize) -> Vec<f64> {
    let h = (r_max - r_min) / (points.max(2) - 1) as f64;
    (0..points.max(2)).map(|i| r_min + h * i as f64).collect()
}

/// Rates and critical apoptosis for mode `l` on the configured radius grid.
pub fn linstab_table(cfg: &SimulationConfig, l: u32) -> Result<Vec<LinstabRow>, LinearError> {
    let lin = cfg.linear(l);
    let ls = &cfg.linstab;
    let radii = radius_grid(ls.r_min, ls.r_max, ls.points);
    let curve = stability_curve(&lin, &radii)?;
    curve
        .into_iter()
        .map(|row| {
            Ok(LinstabRow {
                r: row.r,
                dr_dt: dr_dt(row.r, &lin)?,
                shape_rate: dshape_dt(row.r, &lin)?,
                a_c: row.a_c,
                apoptosis: row.terms.apoptosis,
                adhesion: row.terms.adhesion,
                angiogenesis: row.terms.angiogenesis,
                chemotaxis: row.terms.chemotaxis,
                proliferation_core: row.terms.proliferation_core,
                proliferation_rim: row.terms.proliferation_rim,
            })
        })
        .collect()
}

/// Linear prediction of `R(t)` and `delta/R(t)` from the initial shape.
pub fn linear_ode(cfg: &SimulationConfig, l: u32) -> Result<LinearPrediction, LinearError> {
    integrate_linear_odes(&cfg.linear(l), cfg.numerics.t_final, cfg.linstab.ode_dt)
}

pub fn ode_rows(pred: &LinearPrediction) -> Vec<LinearOdeRow> {
    (0..pred.times.len())
        .map(|i| LinearOdeRow {
            t: pred.times[i],
            r: pred.radius[i],
            delta_over_r: pred.delta_over_r[i],
        })
        .collect()
}

/// Serialize rows as CSV.
pub fn to_csv<T: Serialize>(rows: &[T]) -> Result<String, csv::Error> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in rows {
        w.serialize(r)?;
    }
    Ok(
        String::from_utf8(w.into_inner().map_err(|e| e.into_error())?)
            .expect("csv output is utf-8"),
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_hits_both_ends() {
        let g = radius_grid(0.5, 4.0, 8);
        assert_eq!(g.len(), 8);
        assert_eq!(g[0], 0.5);
        assert!((g[7] - 4.0).abs() < 1e-15);
    }
}
