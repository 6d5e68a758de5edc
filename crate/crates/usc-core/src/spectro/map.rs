use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MagnitudeScale {
    #[default]
    Db,
    Linear,
    /// Row-normalized, dimensionless.
    Normalized,
}

/// |S21| on a frequency × flux grid. `magnitude[i][j]` belongs to
/// `freq_ghz[i]` and `flux[j]`; both axes ascending.
///
/// JSON schema: `{"freq_ghz": [..], "flux": [..], "magnitude": [[..], ..],
/// "scale": "db" | "linear" | "normalized"}` with one inner array per
/// frequency; `null` cells are treated as missing.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct S21Map {
    pub freq_ghz: Vec<f64>,
    pub flux: Vec<f64>,
    pub magnitude: Vec<Vec<f64>>,
    #[serde(default)]
    pub scale: MagnitudeScale,
    /// Cells that were missing on ingest and replaced by their row median.
    #[serde(default, skip_deserializing)]
    pub filled_cells: Vec<(usize, usize)>,
    /// Rows that normalization set to zero because they carry no contrast.
    #[serde(default, skip_deserializing)]
    pub degenerate_rows: Vec<usize>,
}

#[derive(Deserialize)]
struct RawMap {
    freq_ghz: Vec<f64>,
    flux: Vec<f64>,
    magnitude: Vec<Vec<Option<f64>>>,
    #[serde(default)]
    scale: MagnitudeScale,
}

fn ascending_order(axis: &[f64], name: &str) -> Result<Vec<usize>> {
    if axis.iter().any(|x| !x.is_finite()) {
        return Err(Error::param(name, "axis values must be finite"));
    }
    let mut idx: Vec<usize> = (0..axis.len()).collect();
    idx.sort_by(|&a, &b| axis[a].total_cmp(&axis[b]));
    if idx.windows(2).any(|w| axis[w[0]] == axis[w[1]]) {
        return Err(Error::param(name, "axis has repeated values"));
    }
    Ok(idx)
}

fn median(v: &mut [f64]) -> f64 {
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

impl S21Map {
    /// Validates shapes, sorts both axes ascending and fills missing (NaN)
    /// cells with the median of the rest of their row.
    pub fn new(freq_ghz: Vec<f64>, flux: Vec<f64>, magnitude: Vec<Vec<f64>>, scale: MagnitudeScale) -> Result<Self> {
        if freq_ghz.is_empty() || flux.is_empty() {
            return Err(Error::param("S21Map", "axes must be non-empty"));
        }
        if magnitude.len() != freq_ghz.len() || magnitude.iter().any(|r| r.len() != flux.len()) {
            return Err(Error::param(
                "S21Map",
                format!("grid must be {}×{} (frequency × flux)", freq_ghz.len(), flux.len()),
            ));
        }
        let fi = ascending_order(&freq_ghz, "freq_ghz")?;
        let xi = ascending_order(&flux, "flux")?;
        let mut filled = Vec::new();
        let mut grid = Vec::with_capacity(fi.len());
        for (i, &src) in fi.iter().enumerate() {
            let mut row: Vec<f64> = xi.iter().map(|&j| magnitude[src][j]).collect();
            if row.iter().any(|v| v.is_infinite()) {
                return Err(Error::param("S21Map", format!("infinite magnitude in row {i}")));
            }
            let mut good: Vec<f64> = row.iter().copied().filter(|v| !v.is_nan()).collect();
            if good.len() < row.len() {
                if good.is_empty() {
                    return Err(Error::param("S21Map", format!("row at {} GHz has no valid samples", freq_ghz[src])));
                }
                let m = median(&mut good);
                for (j, v) in row.iter_mut().enumerate() {
                    if v.is_nan() {
                        *v = m;
                        filled.push((i, j));
                    }
                }
            }
            grid.push(row);
        }
        Ok(Self {
            freq_ghz: fi.iter().map(|&i| freq_ghz[i]).collect(),
            flux: xi.iter().map(|&j| flux[j]).collect(),
            magnitude: grid,
            scale,
            filled_cells: filled,
            degenerate_rows: Vec::new(),
        })
    }

    pub fn n_freq(&self) -> usize {
        self.freq_ghz.len()
    }

    pub fn n_flux(&self) -> usize {
        self.flux.len()
    }

    /// Frequency pixel, GHz (mean spacing).
    pub fn freq_step(&self) -> f64 {
        let n = self.freq_ghz.len();
        if n < 2 {
            0.0
        } else {
            (self.freq_ghz[n - 1] - self.freq_ghz[0]) / (n - 1) as f64
        }
    }

    /// First row: empty corner cell then the flux values; each further row:
    /// frequency in GHz then the magnitudes. Empty or `nan` cells are missing.
    pub fn read_csv<R: Read>(r: R, scale: MagnitudeScale) -> Result<Self> {
        let mut rd = csv::ReaderBuilder::new()
            .has_headers(false)
            .comment(Some(b'#'))
            .trim(csv::Trim::All)
            .from_reader(r);
        let parse = |s: &str| -> Result<f64> {
            if s.is_empty() {
                return Ok(f64::NAN);
            }
            s.parse::<f64>().map_err(|e| Error::Parse(format!("`{s}`: {e}")))
        };
        let mut recs = rd.records();
        let head = recs.next().ok_or_else(|| Error::Parse("empty S21 map".into()))??;
        let flux: Vec<f64> = head.iter().skip(1).map(parse).collect::<Result<_>>()?;
        let mut freq = Vec::new();
        let mut mag = Vec::new();
        for rec in recs {
            let rec = rec?;
            let vals: Vec<f64> = rec.iter().map(parse).collect::<Result<_>>()?;
            freq.push(vals[0]);
            mag.push(vals[1..].to_vec());
        }
        Self::new(freq, flux, mag, scale)
    }

    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut wr = csv::Writer::from_writer(w);
        let head: Vec<String> = std::iter::once(String::new()).chain(self.flux.iter().map(|x| x.to_string())).collect();
        wr.write_record(head)?;
        for (f, row) in self.freq_ghz.iter().zip(&self.magnitude) {
            let rec: Vec<String> = std::iter::once(f).chain(row).map(|x| x.to_string()).collect();
            wr.write_record(rec)?;
        }
        wr.flush()?;
        Ok(())
    }

    pub fn read_json<R: Read>(r: R) -> Result<Self> {
        let raw: RawMap = serde_json::from_reader(r)?;
        let mag = raw
            .magnitude
            .into_iter()
            .map(|row| row.into_iter().map(|v| v.unwrap_or(f64::NAN)).collect())
            .collect();
        Self::new(raw.freq_ghz, raw.flux, mag, raw.scale)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string(self)?)
    }
}

/// Row-wise (fixed frequency, across flux) normalization
/// (|S21| − min)/std with the population standard deviation. Rows whose
/// std is below 1e−12·|mean| become all zeros and are listed in
/// `degenerate_rows`.
pub fn normalize_map(map: &S21Map) -> Result<S21Map> {
    if map.n_flux() < 2 {
        return Err(Error::DegenerateNormalization(format!(
            "each frequency row needs at least 2 flux samples, got {}",
            map.n_flux()
        )));
    }
    let mut out = map.clone();
    out.scale = MagnitudeScale::Normalized;
    out.degenerate_rows.clear();
    let n = map.n_flux() as f64;
    for (i, row) in out.magnitude.iter_mut().enumerate() {
        let mean = row.iter().sum::<f64>() / n;
        let var = row.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n;
        let std = var.sqrt();
        if std < 1e-12 * mean.abs() || std == 0.0 {
            row.iter_mut().for_each(|v| *v = 0.0);
            out.degenerate_rows.push(i);
            continue;
        }
        let min = row.iter().copied().fold(f64::INFINITY, f64::min);
        row.iter_mut().for_each(|v| *v = (*v - min) / std);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn worked_row_and_constant_row() {
        let m = S21Map::new(vec![1.0, 2.0], vec![0.4, 0.5, 0.6], vec![vec![1.0, 2.0, 3.0], vec![5.0; 3]], MagnitudeScale::Linear).unwrap();
        let n = normalize_map(&m).unwrap();
        for (a, b) in n.magnitude[0].iter().zip([0.0, 1.2247, 2.4495]) {
            assert!((a - b).abs() < 5e-5);
        }
        assert_eq!(n.magnitude[1], vec![0.0; 3]);
        assert_eq!(n.degenerate_rows, vec![1]);
    }

    #[test]
    fn single_column_is_degenerate() {
        let m = S21Map::new(vec![1.0], vec![0.5], vec![vec![1.0]], MagnitudeScale::Db).unwrap();
        assert!(matches!(normalize_map(&m), Err(Error::DegenerateNormalization(_))));
    }

    #[test]
    fn missing_cells_take_row_median_and_axes_sort() {
        let text = ",0.6,0.4,0.5\n2.0,1,,3\n1.0,nan,4,8\n";
        let m = S21Map::read_csv(text.as_bytes(), MagnitudeScale::Db).unwrap();
        assert_eq!(m.freq_ghz, vec![1.0, 2.0]);
        assert_eq!(m.flux, vec![0.4, 0.5, 0.6]);
        // row 1.0 GHz: flux 0.4→4, 0.5→8, 0.6→missing (median 6)
        assert_eq!(m.magnitude[0], vec![4.0, 8.0, 6.0]);
        assert_eq!(m.magnitude[1], vec![2.0, 3.0, 1.0]);
        assert_eq!(m.filled_cells.len(), 2);
    }

    #[test]
    fn csv_and_json_round_trip() {
        let m = S21Map::new(vec![4.0, 4.1], vec![0.49, 0.5], vec![vec![0.1, -0.3], vec![1.0 / 3.0, 2.5]], MagnitudeScale::Db).unwrap();
        let mut buf = Vec::new();
        m.write_csv(&mut buf).unwrap();
        assert_eq!(S21Map::read_csv(buf.as_slice(), MagnitudeScale::Db).unwrap(), m);
        let j = m.to_json().unwrap();
        assert_eq!(S21Map::read_json(j.as_bytes()).unwrap(), m);
        let with_null = r#"{"freq_ghz":[1,2],"flux":[0.4,0.5],"magnitude":[[1,null],[2,3]],"scale":"linear"}"#;
        let m = S21Map::read_json(with_null.as_bytes()).unwrap();
        assert_eq!(m.magnitude[0], vec![1.0, 1.0]);
    }
}
