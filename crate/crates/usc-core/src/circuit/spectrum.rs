use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use super::full::{validate_flux, FullModel};
use super::params::{CircuitParams, TruncationSpec};
use crate::error::{Error, Result};
use crate::quantum::eigen::{eigs_hermitian_with, EigenDiagnostics, EigenOptions};
use crate::transition::TransitionLabel;

/// Levels and labeled transitions over a flux sweep. Energies in GHz (E/h).
///
/// CSV columns, in order: `flux`, `E0_GHz` … `E{k-1}_GHz`, then one
/// `<label>_GHz` column per [`TransitionLabel`] (`w01`, `w02`, `w12`,
/// `w03_half`, `sideband3`). Lines starting with `#` carry metadata.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct SpectrumTable {
    pub flux: Vec<f64>,
    /// Ascending absolute levels per flux point.
    pub levels: Vec<Vec<f64>>,
    /// One row per flux point, ordered as [`TransitionLabel::ALL`].
    pub transitions: Vec<Vec<f64>>,
    #[serde(default)]
    pub metadata: Vec<(String, String)>,
}

impl SpectrumTable {
    pub fn from_levels(flux: Vec<f64>, levels: Vec<Vec<f64>>) -> Result<Self> {
        if flux.len() != levels.len() {
            return Err(Error::param("levels", "one level list per flux point required"));
        }
        let mut transitions = Vec::with_capacity(levels.len());
        for l in &levels {
            if l.len() < 4 {
                return Err(Error::param("k", format!("labeled transitions need at least 4 levels, got {}", l.len())));
            }
            transitions.push(TransitionLabel::ALL.iter().map(|t| t.from_levels(l)).collect());
        }
        Ok(Self {
            flux,
            levels,
            transitions,
            metadata: Vec::new(),
        })
    }

    pub fn len(&self) -> usize {
        self.flux.len()
    }

    pub fn is_empty(&self) -> bool {
        self.flux.is_empty()
    }

    pub fn num_levels(&self) -> usize {
        self.levels.first().map_or(0, Vec::len)
    }

    pub fn transition(&self, label: TransitionLabel) -> Vec<f64> {
        let col = TransitionLabel::ALL.iter().position(|&l| l == label).unwrap();
        self.transitions.iter().map(|r| r[col]).collect()
    }

    pub fn header(&self) -> Vec<String> {
        let mut h = vec!["flux".to_string()];
        h.extend((0..self.num_levels()).map(|i| format!("E{i}_GHz")));
        h.extend(TransitionLabel::ALL.iter().map(|l| format!("{}_GHz", l.name())));
        h
    }

    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        for (k, v) in &self.metadata {
            writeln!(w, "# {k}={v}")?;
        }
        let mut wr = csv::Writer::from_writer(w);
        wr.write_record(self.header())?;
        for i in 0..self.len() {
            let row: Vec<String> = std::iter::once(self.flux[i])
                .chain(self.levels[i].iter().copied())
                .chain(self.transitions[i].iter().copied())
                .map(|x| x.to_string())
                .collect();
            wr.write_record(row)?;
        }
        wr.flush()?;
        Ok(())
    }

    pub fn read_csv<R: Read>(r: R) -> Result<Self> {
        let mut rd = csv::ReaderBuilder::new().comment(Some(b'#')).from_reader(r);
        let header = rd.headers()?.clone();
        let nt = TransitionLabel::ALL.len();
        if header.len() < 1 + 4 + nt || &header[0] != "flux" {
            return Err(Error::Parse("spectrum CSV header must start with `flux` and hold ≥ 4 levels".into()));
        }
        let k = header.len() - 1 - nt;
        let mut flux = Vec::new();
        let mut levels = Vec::new();
        for rec in rd.records() {
            let rec = rec?;
            let vals: Vec<f64> = rec
                .iter()
                .map(|s| s.trim().parse::<f64>().map_err(|e| Error::Parse(format!("`{s}`: {e}"))))
                .collect::<Result<_>>()?;
            flux.push(vals[0]);
            levels.push(vals[1..=k].to_vec());
        }
        Self::from_levels(flux, levels)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}

/// Spectrum plus per-flux solver diagnostics.
#[derive(Clone, Debug)]
pub struct SpectrumRun {
    pub table: SpectrumTable,
    pub diagnostics: Vec<EigenDiagnostics>,
}

/// The `k` lowest levels of the full circuit at every flux in `fluxes`.
pub fn spectrum_vs_flux(
    params: &CircuitParams,
    trunc: &TruncationSpec,
    fluxes: &[f64],
    k: usize,
) -> Result<SpectrumTable> {
    Ok(spectrum_vs_flux_with(params, trunc, fluxes, k, &EigenOptions::default())?.table)
}

pub fn spectrum_vs_flux_with(
    params: &CircuitParams,
    trunc: &TruncationSpec,
    fluxes: &[f64],
    k: usize,
    opts: &EigenOptions,
) -> Result<SpectrumRun> {
    if fluxes.is_empty() {
        return Err(Error::param("flux", "flux list is empty"));
    }
    for &f in fluxes {
        validate_flux(f)?;
    }
    let model = FullModel::new(params, trunc)?;
    spectrum_of_model(&model, fluxes, k, opts)
}

pub fn spectrum_of_model(
    model: &FullModel,
    fluxes: &[f64],
    k: usize,
    opts: &EigenOptions,
) -> Result<SpectrumRun> {
    let mut levels = Vec::with_capacity(fluxes.len());
    let mut diagnostics = Vec::with_capacity(fluxes.len());
    for &f in fluxes {
        let at = |e: Error| Error::AtFlux { flux: f, source: Box::new(e) };
        let h = model.hamiltonian(f).map_err(at)?;
        let sys = eigs_hermitian_with(&h, k, opts).map_err(at)?;
        levels.push(sys.values);
        diagnostics.push(sys.diagnostics);
    }
    let mut table = SpectrumTable::from_levels(fluxes.to_vec(), levels)?;
    let p = model.params();
    let t = model.truncation();
    table.metadata = vec![
        ("EJ_GHz".into(), p.ej_ghz.to_string()),
        ("CJ_fF".into(), p.cj_ff.to_string()),
        ("alpha".into(), p.alpha.to_string()),
        ("Csh_fF".into(), p.csh_ff.to_string()),
        ("LR_nH".into(), p.lr_nh.to_string()),
        ("CR_fF".into(), p.cr_ff.to_string()),
        ("Lc_nH".into(), p.lc_nh.to_string()),
        ("truncation".into(), format!("{},{},{},{}", t.ncut1, t.ncut3, t.n4, t.n6)),
    ];
    Ok(SpectrumRun { table, diagnostics })
}
