use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::transition::TransitionLabel;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TransitionPoint {
    pub flux: f64,
    pub freq_ghz: f64,
    pub label: Option<TransitionLabel>,
    pub weight: f64,
    /// Ridge the point was traced on, if any.
    #[serde(default)]
    pub branch: Option<usize>,
}

impl TransitionPoint {
    pub fn new(flux: f64, freq_ghz: f64, label: TransitionLabel) -> Self {
        Self {
            flux,
            freq_ghz,
            label: Some(label),
            weight: 1.0,
            branch: None,
        }
    }

    fn validate(&self) -> Result<()> {
        if !(self.freq_ghz > 0.0 && self.freq_ghz.is_finite()) {
            return Err(Error::param("freq_GHz", format!("must be positive, got {}", self.freq_ghz)));
        }
        if !self.flux.is_finite() {
            return Err(Error::param("flux", "must be finite"));
        }
        if !(self.weight > 0.0 && self.weight.is_finite()) {
            return Err(Error::param("weight", format!("must be positive, got {}", self.weight)));
        }
        Ok(())
    }
}

/// CSV columns: `flux,freq_GHz,label,weight[,branch]`; `label` and `branch`
/// may be empty.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct TransitionPoints {
    pub points: Vec<TransitionPoint>,
}

impl TransitionPoints {
    pub fn new(points: Vec<TransitionPoint>) -> Result<Self> {
        for p in &points {
            p.validate()?;
        }
        Ok(Self { points })
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Copy without the unlabeled points.
    pub fn labeled(&self) -> Self {
        Self {
            points: self.points.iter().filter(|p| p.label.is_some()).copied().collect(),
        }
    }

    /// Same points with flux reflected about one half.
    pub fn reflected(&self) -> Self {
        Self {
            points: self.points.iter().map(|p| TransitionPoint { flux: 1.0 - p.flux, ..*p }).collect(),
        }
    }

    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut wr = csv::Writer::from_writer(w);
        wr.write_record(["flux", "freq_GHz", "label", "weight", "branch"])?;
        for p in &self.points {
            wr.write_record([
                p.flux.to_string(),
                p.freq_ghz.to_string(),
                p.label.map(|l| l.name().to_string()).unwrap_or_default(),
                p.weight.to_string(),
                p.branch.map(|b| b.to_string()).unwrap_or_default(),
            ])?;
        }
        wr.flush()?;
        Ok(())
    }

    pub fn read_csv<R: Read>(r: R) -> Result<Self> {
        let mut rd = csv::ReaderBuilder::new()
            .comment(Some(b'#'))
            .trim(csv::Trim::All)
            .flexible(true)
            .from_reader(r);
        let head = rd.headers()?.clone();
        let col = |name: &str| head.iter().position(|h| h.eq_ignore_ascii_case(name));
        let (fx, fq) = match (col("flux"), col("freq_GHz")) {
            (Some(a), Some(b)) => (a, b),
            _ => return Err(Error::Parse("points CSV needs `flux` and `freq_GHz` columns".into())),
        };
        let (lb, wt, br) = (col("label"), col("weight"), col("branch"));
        let num = |s: &str| s.parse::<f64>().map_err(|e| Error::Parse(format!("`{s}`: {e}")));
        let mut points = Vec::new();
        for rec in rd.records() {
            let rec = rec?;
            let field = |i: Option<usize>| i.and_then(|i| rec.get(i)).filter(|s| !s.is_empty());
            points.push(TransitionPoint {
                flux: num(&rec[fx])?,
                freq_ghz: num(&rec[fq])?,
                label: field(lb).map(str::parse).transpose()?,
                weight: field(wt).map(num).transpose()?.unwrap_or(1.0),
                branch: field(br)
                    .map(|s| s.parse::<usize>().map_err(|e| Error::Parse(format!("branch `{s}`: {e}"))))
                    .transpose()?,
            });
        }
        Self::new(points)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_round_trip() {
        let mut a = TransitionPoint::new(0.4999, 4.123456789, TransitionLabel::W03Half);
        a.weight = 0.25;
        let b = TransitionPoint {
            label: None,
            branch: Some(3),
            ..TransitionPoint::new(0.51, 5.0, TransitionLabel::W01)
        };
        let pts = TransitionPoints::new(vec![a, b]).unwrap();
        let mut buf = Vec::new();
        pts.write_csv(&mut buf).unwrap();
        assert_eq!(TransitionPoints::read_csv(buf.as_slice()).unwrap(), pts);
    }

    #[test]
    fn minimal_columns_and_validation() {
        let p = TransitionPoints::read_csv("flux,freq_GHz\n0.5,4.4\n".as_bytes()).unwrap();
        assert_eq!(p.points[0].weight, 1.0);
        assert!(TransitionPoints::read_csv("flux,freq_GHz,label\n0.5,4.4,w99\n".as_bytes()).is_err());
        assert!(TransitionPoints::read_csv("flux,freq_GHz\n0.5,-1\n".as_bytes()).is_err());
    }
}
