//! Time-series rows and boundary traces as CSV. Floats go through the
//! shortest round-trip representation, so reading a file back returns the
//! exact values that were written.

use std::path::Path;

use serde::{de::DeserializeOwned, Deserialize, Serialize};
use thiserror::Error;

use crate::geometry::{FixedBoundary, PlanarCurveSamples};
use crate::solver::{hydrostatic_pressure, BoundaryFields, Params, DIM};

#[derive(Debug, Error)]
pub enum RecordError {
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
    #[error("rows must be strictly increasing in time (row {0})")]
    Order(usize),
    #[error("trace columns have different lengths")]
    Ragged,
}

/// Diagnostics of one accepted state.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RunRow {
    pub step: u64,
    pub time: f64,
    pub area: f64,
    pub r_eff: f64,
    /// Mode amplitude over effective radius; NaN once the interface is no
    /// longer star-shaped about its centroid.
    pub delta_over_r: f64,
    pub gmres_nutrient: usize,
    pub gmres_pressure: usize,
    /// Smallest distance between non-neighbouring interface nodes or between
    /// the interface and the necrotic boundary.
    pub min_gap: f64,
    pub max_speed: f64,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub rows: Vec<RunRow>,
}

fn write_rows<T: Serialize>(rows: &[T], w: impl std::io::Write) -> Result<(), RecordError> {
    let mut wr = csv::Writer::from_writer(w);
    for r in rows {
        wr.serialize(r)?;
    }
    wr.flush()?;
    Ok(())
}

fn read_rows<T: DeserializeOwned>(r: impl std::io::Read) -> Result<Vec<T>, RecordError> {
    csv::Reader::from_reader(r)
        .deserialize()
        .map(|r| r.map_err(RecordError::from))
        .collect()
}

impl RunRecord {
    /// Append a row unless it does not advance time (a state that was already
    /// recorded, e.g. after a resume).
    pub fn push(&mut self, row: RunRow) -> bool {
        if self.rows.last().is_some_and(|last| row.time <= last.time) {
            return false;
        }
        self.rows.push(row);
        true
    }

    pub fn validate(&self) -> Result<(), RecordError> {
        match self.rows.windows(2).position(|w| !(w[1].time > w[0].time)) {
            Some(i) => Err(RecordError::Order(i + 1)),
            None => Ok(()),
        }
    }

    pub fn last(&self) -> Option<&RunRow> {
        self.rows.last()
    }

    pub fn peak_iterations(&self) -> (usize, usize) {
        self.rows.iter().fold((0, 0), |(a, b), r| {
            (a.max(r.gmres_nutrient), b.max(r.gmres_pressure))
        })
    }

    pub fn to_csv(&self) -> Result<String, RecordError> {
        let mut buf = Vec::new();
        write_rows(&self.rows, &mut buf)?;
        Ok(String::from_utf8(buf).expect("csv output is utf-8"))
    }

    pub fn from_csv(text: &str) -> Result<Self, RecordError> {
        let rec = Self {
            rows: read_rows(text.as_bytes())?,
        };
        rec.validate()?;
        Ok(rec)
    }

    pub fn write(&self, path: &Path) -> Result<(), RecordError> {
        write_rows(&self.rows, std::fs::File::create(path)?)
    }

    pub fn read(path: &Path) -> Result<Self, RecordError> {
        let rec = Self {
            rows: read_rows(std::fs::File::open(path)?)?,
        };
        rec.validate()?;
        Ok(rec)
    }
}

/// One row of a trace file: the values at node `j` of both boundaries (they
/// carry the same number of nodes).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TraceRow {
    pub alpha: f64,
    pub x0: f64,
    pub y0: f64,
    pub dsigma_dn0: f64,
    /// Hydrostatic pressure on the necrotic boundary.
    pub p_gamma0: f64,
    pub x: f64,
    pub y: f64,
    pub sigma_gamma: f64,
    /// Pressure flux `-dp/dn` on the interface.
    pub neg_dp_dn: f64,
}

/// The four boundary traces at one time.
#[derive(Debug, Clone, PartialEq)]
pub struct Traces {
    pub time: f64,
    pub rows: Vec<TraceRow>,
}

impl Traces {
    pub fn dsigma_dn0(&self) -> Vec<f64> {
        self.rows.iter().map(|r| r.dsigma_dn0).collect()
    }

    pub fn p_gamma0(&self) -> Vec<f64> {
        self.rows.iter().map(|r| r.p_gamma0).collect()
    }

    pub fn sigma_gamma(&self) -> Vec<f64> {
        self.rows.iter().map(|r| r.sigma_gamma).collect()
    }

    pub fn neg_dp_dn(&self) -> Vec<f64> {
        self.rows.iter().map(|r| r.neg_dp_dn).collect()
    }

    pub fn to_csv(&self) -> Result<String, RecordError> {
        let mut buf = Vec::new();
        write_rows(&self.rows, &mut buf)?;
        Ok(String::from_utf8(buf).expect("csv output is utf-8"))
    }

    pub fn from_csv(time: f64, text: &str) -> Result<Self, RecordError> {
        Ok(Self {
            time,
            rows: read_rows(text.as_bytes())?,
        })
    }

    pub fn write(&self, path: &Path) -> Result<(), RecordError> {
        write_rows(&self.rows, std::fs::File::create(path)?)
    }
}

/// Boundary traces from solved fields. On the interface the Robin condition
/// gives `dsigma/dn = beta (1 - sigma)`, so
/// `-dp/dn = -dpbar/dn + (P - chi) beta (1 - sigma) - P A (n . x) / d`.
pub fn emit_traces(
    time: f64,
    gamma0: &FixedBoundary,
    gamma: &PlanarCurveSamples,
    fields: &BoundaryFields,
    params: &Params,
) -> Result<Traces, RecordError> {
    let g0 = &gamma0.samples;
    let n = gamma.len();
    if g0.len() != n || fields.dsigma_dn0.len() != n || fields.sigma_gamma.len() != n {
        return Err(RecordError::Ragged);
    }
    let sigma0 = vec![params.sigma_n; n];
    let p0 = hydrostatic_pressure(&fields.pbar_gamma0, &sigma0, &g0.x, &g0.y, params);
    let pa = params.p * params.a;
    let rows = (0..n)
        .map(|j| {
            let ndotx = gamma.nx[j] * gamma.x[j] + gamma.ny[j] * gamma.y[j];
            let sig = fields.sigma_gamma[j];
            TraceRow {
                alpha: 2.0 * std::f64::consts::PI * j as f64 / n as f64,
                x0: g0.x[j],
                y0: g0.y[j],
                dsigma_dn0: fields.dsigma_dn0[j],
                p_gamma0: p0[j],
                x: gamma.x[j],
                y: gamma.y[j],
                sigma_gamma: sig,
                neg_dp_dn: -fields.dpbar_dn[j]
                    + (params.p - params.chi) * params.beta * (1.0 - sig)
                    - pa * ndotx / DIM,
            }
        })
        .collect();
    Ok(Traces { time, rows })
}
