use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Shipped copy of the calibration table (version 1).
pub const TABLE_V1: &str = include_str!("../../data/gral_calibration_v1.csv");
pub const TABLE_VERSION: &str = "gral_calibration_v1";

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CalibrationRow {
    pub flow_sccm: f64,
    pub rs: f64,
    pub rs_unc: f64,
    pub rs_baked: f64,
    pub rs_baked_unc: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CalibrationEntry {
    pub flow_sccm: f64,
    pub baked: bool,
    /// Sheet resistance, Ω/□.
    pub rs: f64,
    pub uncertainty: f64,
    pub interpolated: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CalibrationTable {
    pub version: String,
    /// Ascending in flow.
    pub rows: Vec<CalibrationRow>,
}

impl CalibrationTable {
    pub fn builtin() -> Self {
        Self::parse(TABLE_V1, TABLE_VERSION).expect("shipped calibration table parses")
    }

    pub fn parse(text: &str, version: &str) -> Result<Self> {
        let mut rd = csv::ReaderBuilder::new()
            .comment(Some(b'#'))
            .trim(csv::Trim::All)
            .from_reader(text.as_bytes());
        let mut rows = Vec::new();
        for rec in rd.records() {
            let rec = rec?;
            if rec.len() != 5 {
                return Err(Error::Parse(format!("calibration row needs 5 fields, got {}", rec.len())));
            }
            let v: Vec<f64> = rec
                .iter()
                .map(|s| s.parse::<f64>().map_err(|e| Error::Parse(format!("`{s}`: {e}"))))
                .collect::<Result<_>>()?;
            rows.push(CalibrationRow {
                flow_sccm: v[0],
                rs: v[1],
                rs_unc: v[2],
                rs_baked: v[3],
                rs_baked_unc: v[4],
            });
        }
        if rows.is_empty() || rows.windows(2).any(|w| w[1].flow_sccm <= w[0].flow_sccm) {
            return Err(Error::Parse("calibration flows must be non-empty and strictly increasing".into()));
        }
        Ok(Self {
            version: version.to_string(),
            rows,
        })
    }

    pub fn lookup(&self, flow_sccm: f64, baked: bool, interpolate: bool) -> Result<CalibrationEntry> {
        let pick = |r: &CalibrationRow| if baked { (r.rs_baked, r.rs_baked_unc) } else { (r.rs, r.rs_unc) };
        let entry = |rs: f64, uncertainty: f64, interpolated: bool| CalibrationEntry {
            flow_sccm,
            baked,
            rs,
            uncertainty,
            interpolated,
        };
        if let Some(r) = self.rows.iter().find(|r| (r.flow_sccm - flow_sccm).abs() < 1e-9) {
            let (rs, u) = pick(r);
            return Ok(entry(rs, u, false));
        }
        let (lo, hi) = (self.rows[0].flow_sccm, self.rows[self.rows.len() - 1].flow_sccm);
        if !(flow_sccm >= lo && flow_sccm <= hi) {
            return Err(Error::Range(format!(
                "O2 flow {flow_sccm} sccm outside the calibrated range [{lo}, {hi}] sccm"
            )));
        }
        if !interpolate {
            let flows: Vec<String> = self.rows.iter().map(|r| r.flow_sccm.to_string()).collect();
            return Err(Error::Range(format!(
                "O2 flow {flow_sccm} sccm is not tabulated ({}); request interpolation explicitly",
                flows.join(", ")
            )));
        }
        let i = self.rows.iter().position(|r| r.flow_sccm > flow_sccm).unwrap();
        let (a, b) = (&self.rows[i - 1], &self.rows[i]);
        let t = (flow_sccm - a.flow_sccm) / (b.flow_sccm - a.flow_sccm);
        let ((ra, ua), (rb, ub)) = (pick(a), pick(b));
        Ok(entry(ra + t * (rb - ra), ua + t * (ub - ua), true))
    }
}

/// Sheet resistance and uncertainty from the shipped table.
pub fn gral_calibration(flow_sccm: f64, baked: bool, interpolate: bool) -> Result<CalibrationEntry> {
    CalibrationTable::builtin().lookup(flow_sccm, baked, interpolate)
}
