use super::normalization::MeasureNormalization;
use super::series::{integer_grid, Series, SeriesKind};
use crate::error::{Error, Result};
use crate::subcore::Letter;

fn occurrences(after_origin: &[Letter], n_max: usize) -> Result<&[Letter]> {
    after_origin.get(..n_max).ok_or(Error::Coverage { needed: n_max as f64, available: after_origin.len() as f64 })
}

/// (1/log n) Σ_{k≤n, x_k=b} k^{−α}; target α c ν([b]).
pub fn alpha_frequency(
    after_origin: &[Letter],
    b: Letter,
    alpha: f64,
    c: f64,
    n_max: usize,
    norm: &MeasureNormalization<f64>,
) -> Result<Series> {
    let nu = norm.nu(b).ok_or_else(|| Error::Observable(format!("letter {} is not a B-letter", b.index())))?;
    let x = occurrences(after_origin, n_max)?;
    let grid = integer_grid(n_max);
    let mut partials = Vec::with_capacity(grid.len());
    let (mut acc, mut gi) = (0.0, 0);
    for (i, &a) in x.iter().enumerate() {
        let k = i + 1;
        if a == b {
            acc += (k as f64).powf(-alpha);
        }
        if gi < grid.len() && grid[gi] == k {
            partials.push(acc / (k as f64).ln());
            gi += 1;
        }
    }
    Ok(Series {
        kind: SeriesKind::AlphaFrequency,
        grid: grid.into_iter().map(|n| n as f64).collect(),
        partials,
        target: alpha * c * nu,
        alpha,
        c_used: c,
    })
}

/// The α-frequency rebuilt from the counts ℓ(k) = #{i ≤ k : x_i = b} by summation by parts:
/// Σ_{k≤n} f(x_k) k^{−α} = Σ_{k<n} ℓ(k)(k^{−α} − (k+1)^{−α}) + ℓ(n) n^{−α}, over log n.
pub fn sbp_reconstruction(counts: &[f64], alpha: f64, grid: &[usize]) -> Result<Vec<f64>> {
    let n_max = grid.iter().copied().max().unwrap_or(0);
    if n_max >= counts.len() {
        return Err(Error::Coverage { needed: n_max as f64, available: counts.len() as f64 - 1.0 });
    }
    let mut out = Vec::with_capacity(grid.len());
    let (mut acc, mut gi) = (0.0, 0);
    for n in 1..=n_max {
        if gi < grid.len() && grid[gi] == n {
            let nf = n as f64;
            out.push((acc + counts[n] * nf.powf(-alpha)) / nf.ln());
            gi += 1;
        }
        let k = n as f64;
        acc += counts[n] * (k.powf(-alpha) - (k + 1.0).powf(-alpha));
    }
    Ok(out)
}

/// α-frequency predicted from second-order partials P(n) of the same letter indicator:
/// α c P(n) plus the boundary term (1 − α/n) ℓ(n) n^{−α}/log n of the summation by parts.
pub fn frequency_from_second_order(second: &Series, counts: &[f64]) -> Result<Vec<f64>> {
    second
        .grid
        .iter()
        .zip(&second.partials)
        .map(|(&n, &p)| {
            let l = *counts.get(n as usize).ok_or(Error::Coverage { needed: n, available: counts.len() as f64 })?;
            let a = second.alpha;
            Ok(a * second.c_used * p + (1.0 - a / n) * l * n.powf(-a) / n.ln())
        })
        .collect()
}

/// (1/log n) Σ_{k≤n, x_k=a} 1/k with the given limiting value.
pub fn log_frequency(after_origin: &[Letter], a: Letter, n_max: usize, target: f64) -> Result<Series> {
    let x = occurrences(after_origin, n_max)?;
    let grid = integer_grid(n_max);
    let mut partials = Vec::with_capacity(grid.len());
    let (mut acc, mut gi) = (0.0, 0);
    for (i, &l) in x.iter().enumerate() {
        let k = i + 1;
        if l == a {
            acc += 1.0 / k as f64;
        }
        if gi < grid.len() && grid[gi] == k {
            partials.push(acc / (k as f64).ln());
            gi += 1;
        }
    }
    Ok(Series {
        kind: SeriesKind::LogFrequency,
        grid: grid.into_iter().map(|n| n as f64).collect(),
        partials,
        target,
        alpha: 1.0,
        c_used: 1.0,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ergodic::sums::birkhoff_prefix_sums;
    use crate::subcore::Substitution;

    const ALPHA: f64 = 0.630_929_753_571_457_4;

    fn norm() -> MeasureNormalization<f64> {
        MeasureNormalization { b_letters: vec![Letter(1)], nu_cyl: vec![1.0], c0: 1.0, gamma: 1.0 }
    }

    #[test]
    fn summation_by_parts_is_an_identity() {
        let s = Substitution::linear(&["0", "1"], &["000", "101"]).unwrap();
        let x = s.iterate(Letter(1), 8).unwrap();
        let n = x.len() - 1;
        let f = alpha_frequency(&x[1..], Letter(1), ALPHA, 0.5, n, &norm()).unwrap();
        let counts = birkhoff_prefix_sums(&x[1..], &[0.0, 1.0], n).unwrap();
        let grid: Vec<usize> = f.grid.iter().map(|&g| g as usize).collect();
        let rebuilt = sbp_reconstruction(&counts, ALPHA, &grid).unwrap();
        for (a, b) in f.partials.iter().zip(&rebuilt) {
            assert!((a - b).abs() <= 1e-6 * a.abs().max(1e-300), "{a} {b}");
        }
        assert!((f.target - ALPHA * 0.5).abs() < 1e-15);
    }

    #[test]
    fn absent_letters_and_constant_words() {
        let x = vec![Letter(0); 5000];
        let f = alpha_frequency(&x, Letter(1), ALPHA, 1.0, 5000, &norm()).unwrap();
        assert!(f.partials.iter().all(|&p| p == 0.0));
        assert!(alpha_frequency(&x, Letter(0), ALPHA, 1.0, 10, &norm()).is_err());

        // harmonic sums over log n tend to 1 like 1 + γ/log n
        let l = log_frequency(&x, Letter(0), 5000, 1.0).unwrap();
        let last = l.final_partial().unwrap();
        let expect = (1..=5000).map(|k| 1.0 / k as f64).sum::<f64>() / 5000f64.ln();
        assert!((last - expect).abs() < 1e-12);
        assert!((last - 1.0 - 0.5772156649 / 5000f64.ln()).abs() < 1e-4);
    }
}
