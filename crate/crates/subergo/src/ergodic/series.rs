use serde::{Deserialize, Serialize};

/// Report points per doubling of the scale.
pub const GRID_PER_OCTAVE: u32 = 8;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SeriesKind {
    Symbolic,
    Tiling1d,
    Tiling2d,
    AlphaFrequency,
    LogFrequency,
}

/// Running log-averages on a report grid, with the value they should approach.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Series {
    pub kind: SeriesKind,
    pub grid: Vec<f64>,
    pub partials: Vec<f64>,
    pub target: f64,
    pub alpha: f64,
    pub c_used: f64,
}

pub type SecondOrderSeries = Series;
pub type FrequencySeries = Series;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SeriesRow {
    pub scale: f64,
    pub partial: f64,
    pub target: f64,
    pub relative_error: f64,
}

impl Series {
    /// (partial − target)/|target|; the absolute difference when the target is 0.
    pub fn relative_error_of(&self, p: f64) -> f64 {
        if self.target == 0.0 {
            p
        } else {
            (p - self.target) / self.target.abs()
        }
    }

    pub fn final_partial(&self) -> Option<f64> {
        self.partials.last().copied()
    }

    pub fn final_relative_error(&self) -> Option<f64> {
        self.final_partial().map(|p| self.relative_error_of(p))
    }

    fn last_decade(&self) -> impl Iterator<Item = f64> + '_ {
        let top = self.grid.last().copied().unwrap_or(0.0);
        self.grid.iter().zip(&self.partials).filter(move |(g, _)| **g >= top / 10.0).map(|(_, &p)| p)
    }

    /// Largest |relative error| over the last decade of the grid.
    pub fn final_decade_error(&self) -> Option<f64> {
        self.last_decade().map(|p| self.relative_error_of(p).abs()).reduce(f64::max)
    }

    /// (max − min)/|target| of the partials over the last decade.
    pub fn final_decade_oscillation(&self) -> Option<f64> {
        let (lo, hi) = self.last_decade().fold((f64::INFINITY, f64::NEG_INFINITY), |(l, h), p| (l.min(p), h.max(p)));
        (lo <= hi).then(|| {
            let d = hi - lo;
            if self.target == 0.0 {
                d
            } else {
                d / self.target.abs()
            }
        })
    }

    pub fn rows(&self) -> Vec<SeriesRow> {
        self.grid
            .iter()
            .zip(&self.partials)
            .map(|(&scale, &partial)| SeriesRow { scale, partial, target: self.target, relative_error: self.relative_error_of(partial) })
            .collect()
    }

    /// Pointwise mean of series sharing one grid (targets are averaged too).
    pub fn mean(all: &[Series]) -> Option<Series> {
        let first = all.first()?;
        if all.iter().any(|s| s.grid != first.grid || s.partials.len() != first.partials.len()) {
            return None;
        }
        let n = all.len() as f64;
        let partials = (0..first.partials.len()).map(|i| all.iter().map(|s| s.partials[i]).sum::<f64>() / n).collect();
        Some(Series { partials, target: all.iter().map(|s| s.target).sum::<f64>() / n, ..first.clone() })
    }

    /// Pointwise sum of two series on the same grid.
    pub fn plus(&self, other: &Series) -> Option<Series> {
        (self.grid == other.grid).then(|| Series {
            partials: self.partials.iter().zip(&other.partials).map(|(a, b)| a + b).collect(),
            target: self.target + other.target,
            ..self.clone()
        })
    }
}

/// Integers ≥ 2 near 2^{i/8}, up to and including `n_max`.
pub fn integer_grid(n_max: usize) -> Vec<usize> {
    let mut out = Vec::new();
    let mut i = 0u32;
    loop {
        let v = 2f64.powf(i as f64 / GRID_PER_OCTAVE as f64).round() as usize;
        i += 1;
        if v > n_max {
            break;
        }
        if v >= 2 && out.last() != Some(&v) {
            out.push(v);
        }
    }
    if n_max >= 2 && out.last() != Some(&n_max) {
        out.push(n_max);
    }
    out
}

/// 2^{i/8} from 2 up to `t_max`, ending exactly at `t_max`.
pub fn real_grid(t_max: f64) -> Vec<f64> {
    let mut out = Vec::new();
    let mut i = GRID_PER_OCTAVE;
    loop {
        let v = 2f64.powf(i as f64 / GRID_PER_OCTAVE as f64);
        if v >= t_max {
            break;
        }
        out.push(v);
        i += 1;
    }
    if t_max > 1.0 {
        out.push(t_max);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grids() {
        let g = integer_grid(100);
        assert_eq!(g[0], 2);
        assert_eq!(*g.last().unwrap(), 100);
        assert!(g.windows(2).all(|w| w[0] < w[1]));
        assert!(integer_grid(1).is_empty());
        let r = real_grid(3f64.powi(7));
        assert_eq!(r[0], 2.0);
        assert_eq!(*r.last().unwrap(), 2187.0);
        assert!(r.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn decade_statistics() {
        let s = Series {
            kind: SeriesKind::Symbolic,
            grid: vec![1.0, 5.0, 20.0, 100.0],
            partials: vec![0.0, 0.5, 0.9, 1.1],
            target: 1.0,
            alpha: 0.5,
            c_used: 1.0,
        };
        assert!((s.final_relative_error().unwrap() - 0.1).abs() < 1e-12);
        assert!((s.final_decade_oscillation().unwrap() - 0.2).abs() < 1e-12);
        assert!((s.final_decade_error().unwrap() - 0.1).abs() < 1e-12);
        assert_eq!(s.rows().len(), 4);

        let t = Series { partials: vec![2.0, 1.5, 1.1, 0.9], ..s.clone() };
        let m = Series::mean(&[s.clone(), t]).unwrap();
        assert_eq!(m.partials, vec![1.0, 1.0, 1.0, 1.0]);
        let other = Series { grid: vec![1.0, 2.0, 3.0, 4.0], ..s.clone() };
        assert!(Series::mean(&[s, other]).is_none());
        assert!(Series::mean(&[]).is_none());
    }
}
