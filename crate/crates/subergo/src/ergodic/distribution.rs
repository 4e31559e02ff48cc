use rayon::prelude::*;
use serde::Serialize;

use super::normalization::Observable;
use super::transversal::{random_orbit, TransversalSampler};
use crate::error::Result;
use crate::rng::stream_rng;
use crate::subcore::Substitution;

/// Probabilities at which the empirical quantiles are reported.
pub const QUANTILE_GRID: [f64; 9] = [0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9];

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DistributionLevel {
    pub level: usize,
    /// Orbit length ⌊ρ(A)ⁿ⌉ summed over.
    pub length: usize,
    pub quantiles: Vec<f64>,
    /// Kolmogorov–Smirnov distance of the sample to the uniform law on [0, 1].
    pub ks_distance: f64,
    /// Sorted sample values.
    pub values: Vec<f64>,
}

/// sup |F_n − F| against the uniform CDF on [0, 1], for sorted values.
pub fn ks_uniform(sorted: &[f64]) -> f64 {
    let n = sorted.len() as f64;
    sorted.iter().enumerate().fold(0.0f64, |d, (i, &v)| {
        let f = v.clamp(0.0, 1.0);
        d.max((i as f64 + 1.0) / n - f).max(f - i as f64 / n)
    })
}

/// Empirical quantile (lower order statistic).
pub fn quantile(sorted: &[f64], p: f64) -> f64 {
    let i = ((p * sorted.len() as f64).ceil() as usize).clamp(1, sorted.len()) - 1;
    sorted[i]
}

/// ρ(B)^{−n} S_{L_n} f over ν-random orbits, L_n = ⌊ρ(A)ⁿ⌉, for n = 0..=n_levels.
/// One RNG stream per sample; each sample's orbit serves every level.
pub fn distribution_experiment(
    sub: &Substitution,
    sampler: &TransversalSampler,
    f: &Observable,
    rho_a: f64,
    rho_b: f64,
    n_levels: usize,
    samples: usize,
    seed: u64,
) -> Result<Vec<DistributionLevel>> {
    let lengths: Vec<usize> = (0..=n_levels).map(|n| (rho_a.powi(n as i32).round() as usize).max(1)).collect();
    let longest = *lengths.last().unwrap();
    let per_sample: Vec<Vec<f64>> = (0..samples)
        .into_par_iter()
        .map(|s| -> Result<Vec<f64>> {
            let mut rng = stream_rng(seed, s as u64);
            let orbit = random_orbit(sub, sampler, &mut rng, 0, longest)?;
            let mut out = Vec::with_capacity(lengths.len());
            let mut acc = 0.0;
            let mut k = 0;
            for (n, &len) in lengths.iter().enumerate() {
                while k < len {
                    acc += f.weights[orbit.right[k].index()];
                    k += 1;
                }
                out.push(acc / rho_b.powi(n as i32));
            }
            Ok(out)
        })
        .collect::<Result<_>>()?;
    Ok(lengths
        .iter()
        .enumerate()
        .map(|(n, &length)| {
            let mut values: Vec<f64> = per_sample.iter().map(|v| v[n]).collect();
            values.sort_by(f64::total_cmp);
            DistributionLevel {
                level: n,
                length,
                quantiles: QUANTILE_GRID.iter().map(|&p| quantile(&values, p)).collect(),
                ks_distance: ks_uniform(&values),
                values,
            }
        })
        .collect())
}
