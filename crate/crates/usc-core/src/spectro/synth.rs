//! Synthetic spectroscopy data with known ground truth.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use super::map::{MagnitudeScale, S21Map};
use super::points::{TransitionPoint, TransitionPoints};
use crate::error::{Error, Result};
use crate::reduced::rabi::{transitions_fixed, Model, QRMParams};
use crate::transition::TransitionLabel;

fn normal(sigma: f64) -> Result<Normal<f64>> {
    Normal::new(0.0, sigma).map_err(|e| Error::param("noise_sigma", e.to_string()))
}

/// Rabi-model transition points on `fluxes` for every label, with optional
/// Gaussian frequency noise.
pub fn synthetic_points(
    params: &QRMParams,
    fluxes: &[f64],
    labels: &[TransitionLabel],
    noise_sigma_ghz: f64,
    seed: u64,
) -> Result<TransitionPoints> {
    params.validate()?;
    let dist = normal(noise_sigma_ghz)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut points = Vec::with_capacity(fluxes.len() * labels.len());
    for &label in labels {
        let col = TransitionLabel::ALL.iter().position(|&l| l == label).unwrap();
        for &f in fluxes {
            let t = transitions_fixed(params, f, Model::Rabi)[col];
            let noise = if noise_sigma_ghz > 0.0 { dist.sample(&mut rng) } else { 0.0 };
            points.push(TransitionPoint::new(f, t + noise, label));
        }
    }
    TransitionPoints::new(points)
}

/// Lorentzian-free toy map: Gaussian lines of `width_ghz` along each ridge
/// curve on a flat background plus Gaussian noise, linear scale.
pub fn synthetic_map(
    freq_ghz: &[f64],
    flux: &[f64],
    ridges: &[&dyn Fn(f64) -> f64],
    width_ghz: f64,
    amplitude: f64,
    noise_sigma: f64,
    seed: u64,
) -> Result<S21Map> {
    if !(width_ghz > 0.0) {
        return Err(Error::param("width_GHz", "must be positive"));
    }
    let dist = normal(noise_sigma)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let centers: Vec<Vec<f64>> = flux.iter().map(|&x| ridges.iter().map(|r| r(x)).collect()).collect();
    let mag = freq_ghz
        .iter()
        .map(|&f| {
            centers
                .iter()
                .map(|cs| {
                    let line: f64 = cs.iter().map(|c| amplitude * (-0.5 * ((f - c) / width_ghz).powi(2)).exp()).sum();
                    let noise = if noise_sigma > 0.0 { dist.sample(&mut rng) } else { 0.0 };
                    1.0 + line + noise
                })
                .collect()
        })
        .collect();
    S21Map::new(freq_ghz.to_vec(), flux.to_vec(), mag, MagnitudeScale::Linear)
}

/// Map whose ridges follow the Rabi-model curves of `labels`.
pub fn rabi_map(
    params: &QRMParams,
    freq_ghz: &[f64],
    flux: &[f64],
    labels: &[TransitionLabel],
    width_ghz: f64,
    noise_sigma: f64,
    seed: u64,
) -> Result<S21Map> {
    params.validate()?;
    let cols: Vec<usize> = labels
        .iter()
        .map(|l| TransitionLabel::ALL.iter().position(|x| x == l).unwrap())
        .collect();
    let curves: Vec<Vec<f64>> = flux.iter().map(|&x| transitions_fixed(params, x, Model::Rabi).to_vec()).collect();
    let closures: Vec<Box<dyn Fn(f64) -> f64>> = cols
        .iter()
        .map(|&c| {
            let flux = flux.to_vec();
            let curves = curves.clone();
            Box::new(move |x: f64| {
                let j = flux.iter().position(|&v| v == x).unwrap();
                curves[j][c]
            }) as Box<dyn Fn(f64) -> f64>
        })
        .collect();
    let refs: Vec<&dyn Fn(f64) -> f64> = closures.iter().map(|b| b.as_ref()).collect();
    synthetic_map(freq_ghz, flux, &refs, width_ghz, 1.0, noise_sigma, seed)
}

/// `n` evenly spaced values from `lo` to `hi` inclusive.
pub fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![lo],
        _ => (0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect(),
    }
}
