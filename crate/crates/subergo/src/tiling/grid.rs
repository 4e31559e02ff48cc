use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::subcore::{Alphabet, Letter, Substitution, Word};

/// Largest patch side `grid_patch` will build.
pub const DEFAULT_MAX_SIDE: usize = 59_049;
/// Largest number of cells `grid_patch` will allocate (3⁸-side patches fit).
pub const DEFAULT_MAX_CELLS: usize = 43_046_721;

/// Row-major label array. Cell (r, c) is the unit square [c, c+1] × [r, r+1] with
/// rows counted downward; the origin is stored doubled so half-integers stay exact.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GridPatch {
    pub labels: Word,
    pub rows: usize,
    pub cols: usize,
    pub origin_twice: (i64, i64),
    pub level: usize,
    /// Inflation factor of the substitution that produced (or will grow) the patch.
    pub q: usize,
}

impl GridPatch {
    /// 2×2 block of `b` with the origin at its center.
    pub fn default_seed(b: Letter, q: usize) -> Self {
        GridPatch { labels: vec![b; 4], rows: 2, cols: 2, origin_twice: (2, 2), level: 0, q }
    }

    pub fn get(&self, r: usize, c: usize) -> Letter {
        self.labels[r * self.cols + c]
    }

    /// Cell whose center is nearest the origin; ties go to the smaller index.
    pub fn origin_cell(&self) -> (usize, usize) {
        let pick = |o2: i64, n: usize| ((o2 - 1).div_euclid(2)).clamp(0, n as i64 - 1) as usize;
        (pick(self.origin_twice.1, self.rows), pick(self.origin_twice.0, self.cols))
    }

    /// Distance from the origin to the nearest patch edge.
    pub fn margin(&self) -> f64 {
        let (ox, oy) = (self.origin_twice.0 as f64 / 2.0, self.origin_twice.1 as f64 / 2.0);
        ox.min(self.cols as f64 - ox).min(oy).min(self.rows as f64 - oy)
    }

    /// PGM-like text: a `P2`-style header, then one character per cell.
    pub fn to_text(&self, alphabet: &Alphabet) -> String {
        let mut s = String::with_capacity(self.labels.len() + self.rows + 64);
        let _ = writeln!(s, "P2\n# level {} origin {} {}", self.level, self.origin_twice.0 as f64 / 2.0, self.origin_twice.1 as f64 / 2.0);
        let _ = writeln!(s, "{} {}\n{}", self.cols, self.rows, alphabet.len() - 1);
        for r in 0..self.rows {
            for c in 0..self.cols {
                s.push_str(alphabet.label(self.get(r, c)));
            }
            s.push('\n');
        }
        s
    }
}

#[derive(Clone, Copy, Debug)]
pub struct GridLimits {
    pub max_side: usize,
    pub max_cells: usize,
}

impl Default for GridLimits {
    fn default() -> Self {
        GridLimits { max_side: DEFAULT_MAX_SIDE, max_cells: DEFAULT_MAX_CELLS }
    }
}

pub fn grid_patch(sub: &Substitution, seed: &GridPatch, n: usize) -> Result<GridPatch> {
    grid_patch_limited(sub, seed, n, GridLimits::default())
}

pub fn grid_patch_limited(sub: &Substitution, seed: &GridPatch, n: usize, limits: GridLimits) -> Result<GridPatch> {
    let q = sub.q().ok_or(Error::WrongDimension { expected: 2, found: sub.dim() })?;
    if let Some(a) = seed.labels.iter().find(|a| a.index() >= sub.n_letters()) {
        return Err(Error::LetterOutOfRange(a.index()));
    }
    let scale = (q as u128).pow(n as u32);
    let side = seed.rows.max(seed.cols) as u128 * scale;
    let cells = (seed.rows * seed.cols) as u128 * scale * scale;
    if side > limits.max_side as u128 || cells > limits.max_cells as u128 {
        return Err(Error::LengthCap { predicted: cells, cap: limits.max_cells as u128 });
    }
    let mut p = seed.clone();
    p.q = q;
    for _ in 0..n {
        let (labels, rows) = sub.apply_grid(&p.labels, p.rows, p.cols);
        p = GridPatch {
            labels,
            rows,
            cols: p.cols * q,
            origin_twice: (p.origin_twice.0 * q as i64, p.origin_twice.1 * q as i64),
            level: p.level + 1,
            q,
        };
    }
    Ok(p)
}

/// Closed unit square [x0, x0+1] × [y0, y0+1] (coordinates relative to the origin,
/// doubled) lies in the closed ball of radius r.
#[inline]
pub(crate) fn square_in_ball(x0_twice: i64, y0_twice: i64, r: f64) -> bool {
    let fx = x0_twice.abs().max((x0_twice + 2).abs()) as f64;
    let fy = y0_twice.abs().max((y0_twice + 2).abs()) as f64;
    fx * fx + fy * fy <= 4.0 * r * r
}

/// B-cells whose closed square lies in the closed ball of radius `r` about the origin.
pub fn count_b_tiles_ball_2d(patch: &GridPatch, b_mask: &[bool], r: f64) -> Result<u64> {
    let margin = patch.margin();
    if r > margin {
        let q = patch.q.max(2) as f64;
        let extra = if margin > 0.0 { (r / margin).log(q).ceil() as usize } else { usize::MAX };
        return Err(Error::PatchTooSmall { radius: r, required_level: patch.level.saturating_add(extra) });
    }
    let (ox2, oy2) = patch.origin_twice;
    let mut count = 0u64;
    for row in 0..patch.rows {
        let y0 = 2 * row as i64 - oy2;
        let fy = y0.abs().max((y0 + 2).abs()) as f64;
        if fy * fy > 4.0 * r * r {
            continue;
        }
        // Columns form a contiguous run; find it with a float guess, then fix exactly.
        let half = ((4.0 * r * r - fy * fy).sqrt()) / 2.0;
        let ox = ox2 as f64 / 2.0;
        let mut lo = ((ox - half).floor() as i64 - 1).max(0);
        let mut hi = ((ox + half).ceil() as i64 + 1).min(patch.cols as i64 - 1);
        while lo <= hi && !square_in_ball(2 * lo - ox2, y0, r) {
            lo += 1;
        }
        while hi >= lo && !square_in_ball(2 * hi - ox2, y0, r) {
            hi -= 1;
        }
        for c in lo..=hi {
            count += b_mask[patch.get(row, c as usize).index()] as u64;
        }
    }
    Ok(count)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn carpet() -> Substitution {
        Substitution::grid(&["0", "1"], &[&["000", "000", "000"], &["111", "101", "111"]]).unwrap()
    }

    #[test]
    fn first_inflation_of_the_seed() {
        let s = carpet();
        let p = grid_patch(&s, &GridPatch::default_seed(Letter(1), 3), 1).unwrap();
        assert_eq!((p.rows, p.cols), (6, 6));
        let zeros: Vec<(usize, usize)> =
            (0..6).flat_map(|r| (0..6).map(move |c| (r, c))).filter(|&(r, c)| p.get(r, c) == Letter(0)).collect();
        assert_eq!(zeros, vec![(1, 1), (1, 4), (4, 1), (4, 4)]);
        assert_eq!(grid_patch(&s, &GridPatch::default_seed(Letter(1), 3), 0).unwrap(), GridPatch::default_seed(Letter(1), 3));
    }

    #[test]
    fn ones_grow_by_eight() {
        let s = carpet();
        for n in 0..=4 {
            let p = grid_patch(&s, &GridPatch::default_seed(Letter(1), 3), n).unwrap();
            let ones = p.labels.iter().filter(|&&a| a == Letter(1)).count();
            assert_eq!(ones, 4 * 8usize.pow(n as u32));
        }
    }

    #[test]
    fn two_single_steps_equal_one_double_step() {
        let s = carpet();
        let seed = GridPatch::default_seed(Letter(1), 3);
        let once = grid_patch(&s, &grid_patch(&s, &seed, 1).unwrap(), 1).unwrap();
        assert_eq!(once, grid_patch(&s, &seed, 2).unwrap());
    }

    #[test]
    fn cap_is_enforced() {
        let s = carpet();
        assert!(matches!(grid_patch(&s, &GridPatch::default_seed(Letter(1), 3), 9), Err(Error::LengthCap { .. })));
    }

    #[test]
    fn ball_counts() {
        let s = carpet();
        let p = grid_patch(&s, &GridPatch::default_seed(Letter(1), 3), 4).unwrap();
        let mask = [false, true];
        assert_eq!(count_b_tiles_ball_2d(&p, &mask, 0.49).unwrap(), 0);
        // origin at a cell corner: the four neighbours need r ≥ √2
        assert_eq!(count_b_tiles_ball_2d(&p, &mask, 2f64.sqrt()).unwrap(), 4);
        assert!(count_b_tiles_ball_2d(&p, &mask, 1000.0).is_err());

        let full = GridPatch { labels: vec![Letter(1); 400 * 400], rows: 400, cols: 400, origin_twice: (400, 400), level: 0, q: 3 };
        for r in [5.0, 37.5, 120.0, 199.0] {
            let n = count_b_tiles_ball_2d(&full, &mask, r).unwrap() as f64;
            let pi = std::f64::consts::PI;
            assert!(pi * (r - 2.0) * (r - 2.0) <= n && n <= pi * r * r, "r={r} n={n}");
        }
    }

    #[test]
    fn ball_counts_against_brute_force() {
        let s = carpet();
        let p = grid_patch(&s, &GridPatch::default_seed(Letter(1), 3), 3).unwrap();
        let (ox, oy) = (p.origin_twice.0 as f64 / 2.0, p.origin_twice.1 as f64 / 2.0);
        for r in [0.7, 1.5, 3.0, 7.3, 12.0, 26.9] {
            let brute = (0..p.rows)
                .flat_map(|row| (0..p.cols).map(move |c| (row, c)))
                .filter(|&(row, c)| {
                    let fx = (c as f64 - ox).abs().max((c as f64 + 1.0 - ox).abs());
                    let fy = (row as f64 - oy).abs().max((row as f64 + 1.0 - oy).abs());
                    p.get(row, c) == Letter(1) && fx * fx + fy * fy <= r * r
                })
                .count() as u64;
            assert_eq!(count_b_tiles_ball_2d(&p, &[false, true], r).unwrap(), brute);
        }
    }

    #[test]
    fn self_similar_growth() {
        let s = carpet();
        let p = grid_patch(&s, &GridPatch::default_seed(Letter(1), 3), 7).unwrap();
        let mask = [false, true];
        let r0 = 2.3;
        let mut prev = count_b_tiles_ball_2d(&p, &mask, r0).unwrap() as f64;
        let mut last_ratio = 0.0;
        for k in 1..=6 {
            let cur = count_b_tiles_ball_2d(&p, &mask, r0 * 3f64.powi(k)).unwrap() as f64;
            last_ratio = cur / prev;
            prev = cur;
        }
        assert!((last_ratio / 8.0 - 1.0).abs() < 0.1, "{last_ratio}");
    }

    #[test]
    fn origin_cell_ties_go_low() {
        let p = GridPatch::default_seed(Letter(1), 3);
        assert_eq!(p.origin_cell(), (0, 0));
        let centered = GridPatch { labels: vec![Letter(1); 9], rows: 3, cols: 3, origin_twice: (3, 3), level: 0, q: 3 };
        assert_eq!(centered.origin_cell(), (1, 1));
    }
}
