//! Plain-text interface snapshots: a header `N time s_alpha`, then `N` rows
//! `x y`. Floats are written with 17 significant digits so a read returns the
//! exact bits that were written.

use std::fmt::Write as _;
use std::path::Path;

use super::GeometryError;

#[derive(Debug, Clone, PartialEq)]
pub struct Snapshot {
    pub time: f64,
    pub s_alpha: f64,
    pub x: Vec<f64>,
    pub y: Vec<f64>,
}

impl Snapshot {
    pub fn to_text(&self) -> String {
        let mut out = String::with_capacity(48 * (self.x.len() + 1));
        let _ = writeln!(
            out,
            "{} {:.16e} {:.16e}",
            self.x.len(),
            self.time,
            self.s_alpha
        );
        for (x, y) in self.x.iter().zip(&self.y) {
            let _ = writeln!(out, "{x:.16e} {y:.16e}");
        }
        out
    }

    pub fn parse(text: &str) -> Result<Self, GeometryError> {
        let bad = |m: &str| GeometryError::Snapshot(m.to_string());
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let header = lines.next().ok_or_else(|| bad("empty snapshot"))?;
        let h: Vec<&str> = header.split_whitespace().collect();
        if h.len() != 3 {
            return Err(bad("header must be `N time s_alpha`"));
        }
        let n: usize = h[0].parse().map_err(|_| bad("bad node count"))?;
        let time: f64 = h[1].parse().map_err(|_| bad("bad time"))?;
        let s_alpha: f64 = h[2].parse().map_err(|_| bad("bad s_alpha"))?;
        let mut x = Vec::with_capacity(n);
        let mut y = Vec::with_capacity(n);
        for line in lines {
            let mut it = line.split_whitespace();
            let (Some(a), Some(b), None) = (it.next(), it.next(), it.next()) else {
                return Err(bad("rows must be `x y`"));
            };
            x.push(a.parse().map_err(|_| bad("bad x"))?);
            y.push(b.parse().map_err(|_| bad("bad y"))?);
        }
        if x.len() != n {
            return Err(bad("row count does not match header"));
        }
        Ok(Self {
            time,
            s_alpha,
            x,
            y,
        })
    }

    pub fn write(&self, path: &Path) -> Result<(), GeometryError> {
        std::fs::write(path, self.to_text()).map_err(|e| GeometryError::Snapshot(e.to_string()))
    }

    pub fn read(path: &Path) -> Result<Self, GeometryError> {
        let text =
            std::fs::read_to_string(path).map_err(|e| GeometryError::Snapshot(e.to_string()))?;
        Self::parse(&text)
    }
}
