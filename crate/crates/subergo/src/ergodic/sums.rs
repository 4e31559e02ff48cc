use serde::Serialize;

use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::subcore::Letter;

/// S[k] = Σ_{i<k} w(x_i) for k = 0..=n (S[0] = 0).
pub fn birkhoff_prefix_sums<T: Scalar>(x: &[Letter], weights: &[T], n: usize) -> Result<Vec<T>> {
    if n > x.len() {
        return Err(Error::Coverage { needed: n as f64, available: x.len() as f64 });
    }
    let mut out = Vec::with_capacity(n + 1);
    let mut acc = T::zero();
    out.push(acc);
    for a in &x[..n] {
        acc = acc + *weights.get(a.index()).ok_or(Error::LetterOutOfRange(a.index()))?;
        out.push(acc);
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RatioRow {
    pub n: usize,
    pub s_f: f64,
    pub s_g: f64,
    pub ratio: Option<f64>,
    pub target: Option<f64>,
}

/// S_n f / S_n g against ∫f/∫g from precomputed prefix sums.
pub fn ratio_check_sums(sf: &[f64], sg: &[f64], n_grid: &[usize], target: Option<f64>) -> Result<Vec<RatioRow>> {
    let mut rows = Vec::with_capacity(n_grid.len());
    for &n in n_grid {
        if n >= sf.len() || n >= sg.len() {
            return Err(Error::Coverage { needed: n as f64, available: sf.len().min(sg.len()) as f64 - 1.0 });
        }
        let (a, b) = (sf[n], sg[n]);
        rows.push(RatioRow { n, s_f: a, s_g: b, ratio: (b != 0.0).then(|| a / b), target });
    }
    if rows.iter().all(|r| r.ratio.is_none()) {
        return Err(Error::Observable("S_n g vanishes on the whole grid".into()));
    }
    Ok(rows)
}

/// Ratio table for two letter observables; `integrals` are (∫f dν, ∫g dν).
pub fn ratio_check(x: &[Letter], f: &[f64], g: &[f64], n_grid: &[usize], integrals: (f64, f64)) -> Result<Vec<RatioRow>> {
    let n = n_grid.iter().copied().max().unwrap_or(0);
    let sf = birkhoff_prefix_sums(x, f, n)?;
    let sg = birkhoff_prefix_sums(x, g, n)?;
    let target = (integrals.1 != 0.0).then(|| integrals.0 / integrals.1);
    ratio_check_sums(&sf, &sg, n_grid, target)
}
