use std::io::{Read, Write};

use sde_lab::{DriftSpec, SdePath};
use serde::{Deserialize, Serialize};

use crate::DiscreteError;

/// Observations `X_0, X_1, …, X_n` at integer times.
#[derive(Debug, Clone)]
pub struct DiscreteRecord {
    pub hurst: f64,
    pub drift: DriftSpec,
    pub x: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
struct Row {
    m: usize,
    #[serde(rename = "X_m")]
    x: f64,
}

impl DiscreteRecord {
    pub fn new(hurst: f64, drift: DriftSpec, x: Vec<f64>) -> Result<Self, DiscreteError> {
        fbm_engine::validate_hurst(hurst)?;
        if x.len() < 2 {
            return Err(DiscreteError::InvalidRecord("need at least X_0 and X_1".into()));
        }
        Ok(Self { hurst, drift, x })
    }

    /// Subsamples a fine-grid path whose step divides the unit interval `nodes_per_unit` times.
    pub fn from_path(path: &SdePath, nodes_per_unit: usize) -> Result<Self, DiscreteError> {
        let dt = path.grid().dt;
        if nodes_per_unit == 0 || ((nodes_per_unit as f64) * dt - 1.0).abs() > 1e-9 {
            return Err(DiscreteError::InvalidRecord(format!(
                "grid step {dt} does not divide the unit interval into {nodes_per_unit} cells"
            )));
        }
        let x: Vec<f64> = path.x.iter().step_by(nodes_per_unit).copied().collect();
        Self::new(path.hurst(), path.drift.clone(), x)
    }

    /// Horizon `n`.
    pub fn n(&self) -> usize {
        self.x.len() - 1
    }

    /// The first `n` unit intervals.
    pub fn prefix(&self, n: usize) -> Result<Self, DiscreteError> {
        if n == 0 || n > self.n() {
            return Err(DiscreteError::InvalidRecord(format!("prefix {n} of a record of length {}", self.n())));
        }
        Ok(Self { hurst: self.hurst, drift: self.drift.clone(), x: self.x[..=n].to_vec() })
    }

    /// Reads columns `m, X_m`; rows must be `m = 0, 1, …` in order.
    pub fn read_csv<R: Read>(input: R, hurst: f64, drift: DriftSpec) -> Result<Self, DiscreteError> {
        let mut reader = csv::Reader::from_reader(input);
        let mut x = Vec::new();
        for (k, row) in reader.deserialize::<Row>().enumerate() {
            let row = row?;
            if row.m != k {
                return Err(DiscreteError::InvalidRecord(format!("row {k} has m = {}", row.m)));
            }
            x.push(row.x);
        }
        Self::new(hurst, drift, x)
    }

    pub fn write_csv<W: Write>(&self, out: W) -> Result<(), DiscreteError> {
        let mut w = csv::Writer::from_writer(out);
        for (m, &x) in self.x.iter().enumerate() {
            w.serialize(Row { m, x })?;
        }
        w.flush()?;
        Ok(())
    }
}
