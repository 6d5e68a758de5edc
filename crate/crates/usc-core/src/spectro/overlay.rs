//! Model curves over a measured map, as CSV and a standalone SVG.

use std::fmt::Write as _;
use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use super::map::S21Map;
use crate::error::{Error, Result};
use crate::reduced::rabi::{transitions_fixed, Model, QRMParams};
use crate::transition::TransitionLabel;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OverlayCurves {
    pub flux: Vec<f64>,
    /// One row per flux, ordered as [`TransitionLabel::ALL`].
    pub qrm: Vec<[f64; 5]>,
    pub jc: Vec<[f64; 5]>,
}

impl OverlayCurves {
    pub fn compute(params: &QRMParams, flux: &[f64]) -> Result<Self> {
        params.validate()?;
        Ok(Self {
            flux: flux.to_vec(),
            qrm: flux.iter().map(|&f| transitions_fixed(params, f, Model::Rabi)).collect(),
            jc: flux.iter().map(|&f| transitions_fixed(params, f, Model::JaynesCummings)).collect(),
        })
    }

    pub fn header() -> Vec<String> {
        let mut h = vec!["flux".to_string()];
        for m in ["qrm", "jc"] {
            h.extend(TransitionLabel::ALL.iter().map(|l| format!("{m}_{}_GHz", l.name())));
        }
        h
    }

    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut wr = csv::Writer::from_writer(w);
        wr.write_record(Self::header())?;
        for i in 0..self.flux.len() {
            let row: Vec<String> = std::iter::once(self.flux[i])
                .chain(self.qrm[i])
                .chain(self.jc[i])
                .map(|x| x.to_string())
                .collect();
            wr.write_record(row)?;
        }
        wr.flush()?;
        Ok(())
    }

    pub fn read_csv<R: Read>(r: R) -> Result<Self> {
        let mut rd = csv::ReaderBuilder::new().comment(Some(b'#')).from_reader(r);
        let head: Vec<String> = rd.headers()?.iter().map(str::to_string).collect();
        if head != Self::header() {
            return Err(Error::Parse("unexpected overlay CSV header".into()));
        }
        let mut out = Self {
            flux: Vec::new(),
            qrm: Vec::new(),
            jc: Vec::new(),
        };
        for rec in rd.records() {
            let rec = rec?;
            let v: Vec<f64> = rec
                .iter()
                .map(|s| s.parse::<f64>().map_err(|e| Error::Parse(format!("`{s}`: {e}"))))
                .collect::<Result<_>>()?;
            out.flux.push(v[0]);
            out.qrm.push(v[1..6].try_into().unwrap());
            out.jc.push(v[6..11].try_into().unwrap());
        }
        Ok(out)
    }
}

fn viridis_like(t: f64) -> String {
    let t = t.clamp(0.0, 1.0);
    let r = (68.0 + t * (253.0 - 68.0)) as u8;
    let g = (1.0 + t * (231.0 - 1.0)) as u8;
    let b = (84.0 + (1.0 - t) * (150.0 - 84.0) * t.sqrt()) as u8;
    format!("#{r:02x}{g:02x}{b:02x}")
}

/// Heatmap of `map` with QRM (solid) and JC (dashed) curves for `labels`.
pub fn overlay_svg(map: &S21Map, curves: &OverlayCurves, labels: &[TransitionLabel]) -> String {
    let (w, h, pad) = (800.0, 500.0, 50.0);
    let (fx0, fx1) = (map.flux[0], map.flux[map.n_flux() - 1]);
    let (fy0, fy1) = (map.freq_ghz[0], map.freq_ghz[map.n_freq() - 1]);
    let sx = |x: f64| pad + (x - fx0) / (fx1 - fx0).max(1e-300) * (w - 2.0 * pad);
    let sy = |y: f64| h - pad - (y - fy0) / (fy1 - fy0).max(1e-300) * (h - 2.0 * pad);
    let (lo, hi) = map
        .magnitude
        .iter()
        .flatten()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &v| (a.min(v), b.max(v)));
    let span = (hi - lo).max(1e-300);
    let cw = (w - 2.0 * pad) / map.n_flux() as f64;
    let ch = (h - 2.0 * pad) / map.n_freq() as f64;

    let mut s = String::new();
    let _ = writeln!(s, r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}">"#);
    let _ = writeln!(s, r#"<rect width="{w}" height="{h}" fill="white"/>"#);
    for (i, row) in map.magnitude.iter().enumerate() {
        for (j, &v) in row.iter().enumerate() {
            let x = pad + j as f64 * cw;
            let y = h - pad - (i + 1) as f64 * ch;
            let _ = writeln!(
                s,
                r#"<rect x="{x:.2}" y="{y:.2}" width="{:.2}" height="{:.2}" fill="{}"/>"#,
                cw + 0.05,
                ch + 0.05,
                viridis_like((v - lo) / span)
            );
        }
    }
    for &label in labels {
        let c = TransitionLabel::ALL.iter().position(|&l| l == label).unwrap();
        for (rows, dash, color) in [(&curves.qrm, "", "black"), (&curves.jc, r#" stroke-dasharray="6,4""#, "red")] {
            let pts: Vec<String> = curves
                .flux
                .iter()
                .zip(rows.iter())
                .filter(|(_, r)| r[c] >= fy0 && r[c] <= fy1)
                .map(|(&x, r)| format!("{:.2},{:.2}", sx(x), sy(r[c])))
                .collect();
            if pts.len() > 1 {
                let _ = writeln!(
                    s,
                    r#"<polyline fill="none" stroke="{color}" stroke-width="1.5"{dash} points="{}"/>"#,
                    pts.join(" ")
                );
            }
        }
    }
    let _ = writeln!(
        s,
        r#"<rect x="{pad}" y="{pad}" width="{}" height="{}" fill="none" stroke="black"/>"#,
        w - 2.0 * pad,
        h - 2.0 * pad
    );
    let _ = writeln!(s, r#"<text x="{}" y="{}" font-size="14" text-anchor="middle" font-family="sans-serif">flux (Φ₀)</text>"#, w / 2.0, h - 12.0);
    let _ = writeln!(
        s,
        r#"<text x="14" y="{}" font-size="14" text-anchor="middle" font-family="sans-serif" transform="rotate(-90 14 {})">frequency (GHz)</text>"#,
        h / 2.0,
        h / 2.0
    );
    for (x, anchor, v) in [(pad, "start", fx0), (w - pad, "end", fx1)] {
        let _ = writeln!(s, r#"<text x="{x}" y="{}" font-size="11" text-anchor="{anchor}" font-family="sans-serif">{v:.4}</text>"#, h - pad + 14.0);
    }
    for (y, v) in [(h - pad, fy0), (pad, fy1)] {
        let _ = writeln!(s, r#"<text x="{}" y="{y}" font-size="11" text-anchor="end" font-family="sans-serif">{v:.3}</text>"#, pad - 4.0);
    }
    s.push_str("</svg>\n");
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_round_trip_bit_exact() {
        let c = OverlayCurves::compute(&QRMParams::device_fit(), &[0.49, 0.5, 0.5031]).unwrap();
        let mut buf = Vec::new();
        c.write_csv(&mut buf).unwrap();
        let back = OverlayCurves::read_csv(buf.as_slice()).unwrap();
        assert_eq!(back, c);
    }

    #[test]
    fn decoupled_curves_coincide() {
        let mut p = QRMParams::device_fit();
        p.g_ghz = 0.0;
        let c = OverlayCurves::compute(&p, &[0.48, 0.5, 0.52]).unwrap();
        for (a, b) in c.qrm.iter().zip(&c.jc) {
            for (x, y) in a.iter().zip(b) {
                assert!((x - y).abs() < 1e-12);
            }
        }
    }
}
