//! Large supertiles described by their ancestry, expanded lazily.

use crate::error::{Error, Result};
use crate::subcore::{Letter, Substitution, Word};

/// One step up the hierarchy: the current supertile is entry `slot` of σ(parent)
/// (row-major cell index for grids).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Ancestor {
    pub parent: Letter,
    pub slot: usize,
}

fn check_ancestry(sub: &Substitution, origin: Letter, ancestry: &[Ancestor]) -> Result<Letter> {
    let mut child = origin;
    for a in ancestry {
        if sub.image(a.parent).get(a.slot) != Some(&child) {
            return Err(Error::Config(format!("ancestry slot {} of {:?} does not hold {:?}", a.slot, a.parent, child)));
        }
        child = a.parent;
    }
    Ok(child)
}

/// σᴺ(top) for a 1-D substitution, with the origin letter at `origin_pos`.
pub struct Supertile1D<'a> {
    sub: &'a Substitution,
    top: Letter,
    depth: usize,
    origin_pos: u128,
    lengths: Vec<Vec<u128>>,
}

impl<'a> Supertile1D<'a> {
    pub fn from_ancestry(sub: &'a Substitution, origin: Letter, ancestry: &[Ancestor]) -> Result<Self> {
        if sub.dim() != 1 {
            return Err(Error::WrongDimension { expected: 1, found: sub.dim() });
        }
        let top = check_ancestry(sub, origin, ancestry)?;
        let depth = ancestry.len();
        let lengths = sub.iterated_lengths(depth);
        if lengths[depth].iter().any(|&l| l == u128::MAX) {
            return Err(Error::Overflow("supertile length"));
        }
        let mut pos = 0u128;
        for (j, a) in ancestry.iter().enumerate() {
            pos += sub.image(a.parent)[..a.slot].iter().map(|c| lengths[j][c.index()]).sum::<u128>();
        }
        Ok(Supertile1D { sub, top, depth, origin_pos: pos, lengths })
    }

    pub fn len(&self) -> u128 {
        self.lengths[self.depth][self.top.index()]
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn origin_pos(&self) -> u128 {
        self.origin_pos
    }

    /// Letters strictly right of the origin.
    pub fn right_available(&self) -> u128 {
        self.len() - 1 - self.origin_pos
    }

    pub fn left_available(&self) -> u128 {
        self.origin_pos
    }

    /// σᴺ(top)[start .. start+len]
    pub fn expand(&self, start: u128, len: usize) -> Result<Word> {
        if start + len as u128 > self.len() {
            return Err(Error::Coverage { needed: (start + len as u128) as f64, available: self.len() as f64 });
        }
        let mut out = Vec::with_capacity(len);
        self.emit(self.top, self.depth, start, start + len as u128, &mut out);
        Ok(out)
    }

    fn emit(&self, letter: Letter, level: usize, lo: u128, hi: u128, out: &mut Word) {
        if level == 0 {
            out.push(letter);
            return;
        }
        let mut offset = 0u128;
        for &c in self.sub.image(letter) {
            let l = self.lengths[level - 1][c.index()];
            let (a, b) = (offset, offset + l);
            if b > lo && a < hi {
                self.emit(c, level - 1, lo.saturating_sub(a), (hi - a).min(l), out);
            }
            if b >= hi {
                break;
            }
            offset = b;
        }
    }

    /// x(1), …, x(n)
    pub fn after_origin(&self, n: usize) -> Result<Word> {
        self.expand(self.origin_pos + 1, n)
    }

    /// x(−n), …, x(n−1) as (left, right) with right[0] = x(0).
    pub fn around_origin(&self, n_left: usize, n_right: usize) -> Result<(Word, Word)> {
        if (n_left as u128) > self.origin_pos {
            return Err(Error::Coverage { needed: n_left as f64, available: self.origin_pos as f64 });
        }
        Ok((self.expand(self.origin_pos - n_left as u128, n_left)?, self.expand(self.origin_pos, n_right)?))
    }
}

/// σᴺ(top) for a grid substitution; the origin sits at the center of cell `origin`.
pub struct Supertile2D<'a> {
    sub: &'a Substitution,
    q: usize,
    top: Letter,
    depth: usize,
    /// (row, col) of the origin cell
    origin: (i128, i128),
    side: Vec<i128>,
}

impl<'a> Supertile2D<'a> {
    pub fn from_ancestry(sub: &'a Substitution, origin: Letter, ancestry: &[Ancestor]) -> Result<Self> {
        let q = sub.q().ok_or(Error::WrongDimension { expected: 2, found: sub.dim() })?;
        let top = check_ancestry(sub, origin, ancestry)?;
        let depth = ancestry.len();
        let mut side = vec![1i128];
        for _ in 0..depth {
            let s = side.last().unwrap().checked_mul(q as i128).ok_or(Error::Overflow("supertile side"))?;
            side.push(s);
        }
        let (mut row, mut col) = (0i128, 0i128);
        for (j, a) in ancestry.iter().enumerate() {
            row += (a.slot / q) as i128 * side[j];
            col += (a.slot % q) as i128 * side[j];
        }
        Ok(Supertile2D { sub, q, top, depth, origin: (row, col), side })
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn top(&self) -> Letter {
        self.top
    }

    pub fn origin_cell(&self) -> (i128, i128) {
        self.origin
    }

    /// Distance from the origin (a cell center) to the supertile boundary.
    pub fn margin(&self) -> f64 {
        let s = self.side[self.depth] as f64;
        let (r, c) = (self.origin.0 as f64 + 0.5, self.origin.1 as f64 + 0.5);
        r.min(s - r).min(c).min(s - c)
    }

    /// Letter of the cell at (row, col) of the supertile.
    pub fn letter_at(&self, row: i128, col: i128) -> Option<Letter> {
        let s = self.side[self.depth];
        if row < 0 || col < 0 || row >= s || col >= s {
            return None;
        }
        let (mut letter, mut r, mut c) = (self.top, row, col);
        for level in (0..self.depth).rev() {
            let sub_side = self.side[level];
            let slot = (r / sub_side) as usize * self.q + (c / sub_side) as usize;
            letter = self.sub.image(letter)[slot];
            r %= sub_side;
            c %= sub_side;
        }
        Some(letter)
    }

    /// Calls `f(dx, dy, letter)` for each cell in `mask` whose closed square lies in the
    /// closed ball of radius `r`; (dx, dy) is the cell center relative to the origin,
    /// with dy growing downward.
    pub fn for_each_cell_in_ball(&self, mask: &[bool], r: f64, mut f: impl FnMut(i64, i64, Letter)) -> Result<()> {
        if r > self.margin() {
            return Err(Error::Coverage { needed: r, available: self.margin() });
        }
        // Which letters can have a masked cell somewhere below them, per level.
        let mut reach = vec![mask.to_vec()];
        for level in 1..=self.depth {
            let prev = &reach[level - 1];
            let row = self.sub.alphabet().letters().map(|a| self.sub.image(a).iter().any(|c| prev[c.index()])).collect();
            reach.push(row);
        }
        let four_r2 = 4.0 * r * r;
        let mut stack = vec![(self.top, self.depth, 0i128, 0i128)];
        while let Some((letter, level, r0, c0)) = stack.pop() {
            if !reach[level][letter.index()] {
                continue;
            }
            let s = self.side[level];
            // doubled coordinates of the node's extent relative to the origin center
            let x_lo = 2 * (c0 - self.origin.1) - 1;
            let x_hi = x_lo + 2 * s;
            let y_lo = 2 * (r0 - self.origin.0) - 1;
            let y_hi = y_lo + 2 * s;
            let near = |lo: i128, hi: i128| if lo > 0 { lo } else if hi < 0 { -hi } else { 0 };
            let (nx, ny) = (near(x_lo, x_hi) as f64, near(y_lo, y_hi) as f64);
            if nx * nx + ny * ny > four_r2 {
                continue;
            }
            if level == 0 {
                let fx = x_lo.abs().max(x_hi.abs()) as f64;
                let fy = y_lo.abs().max(y_hi.abs()) as f64;
                if fx * fx + fy * fy <= four_r2 {
                    f((c0 - self.origin.1) as i64, (r0 - self.origin.0) as i64, letter);
                }
                continue;
            }
            let sub_side = self.side[level - 1];
            for (slot, &child) in self.sub.image(letter).iter().enumerate() {
                let (i, j) = ((slot / self.q) as i128, (slot % self.q) as i128);
                stack.push((child, level - 1, r0 + i * sub_side, c0 + j * sub_side));
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tiling::grid::{count_b_tiles_ball_2d, grid_patch, GridPatch};

    fn cantor() -> Substitution {
        Substitution::linear(&["0", "1"], &["000", "101"]).unwrap()
    }

    #[test]
    fn lazy_expansion_matches_iterate() {
        let s = cantor();
        // origin = the middle 1 of σ²(1) = 101 000 101 ... built from slot 2 of σ(1), slot 0 of σ(1)
        let anc = [Ancestor { parent: Letter(1), slot: 2 }, Ancestor { parent: Letter(1), slot: 2 }];
        let t = Supertile1D::from_ancestry(&s, Letter(1), &anc).unwrap();
        assert_eq!(t.origin_pos(), 8);
        let full = s.iterate(Letter(1), 2).unwrap();
        assert_eq!(t.expand(0, 9).unwrap(), full);
        assert_eq!(t.expand(3, 4).unwrap(), full[3..7].to_vec());
        assert!(t.after_origin(1).is_err());

        let deep: Vec<Ancestor> = (0..9).map(|i| Ancestor { parent: Letter(1), slot: if i % 2 == 0 { 0 } else { 2 } }).collect();
        let t = Supertile1D::from_ancestry(&s, Letter(1), &deep).unwrap();
        let full = s.iterate(Letter(1), 9).unwrap();
        let p = t.origin_pos() as usize;
        assert_eq!(full[p], Letter(1));
        assert_eq!(t.after_origin(500).unwrap(), full[p + 1..p + 501].to_vec());
    }

    #[test]
    fn bad_ancestry_is_rejected() {
        let s = cantor();
        assert!(Supertile1D::from_ancestry(&s, Letter(1), &[Ancestor { parent: Letter(1), slot: 1 }]).is_err());
    }

    #[test]
    fn grid_supertile_agrees_with_dense_patch() {
        let s = Substitution::grid(&["0", "1"], &[&["000", "000", "000"], &["111", "101", "111"]]).unwrap();
        // origin cell is the lower-right corner cell (slot 8) of the upper-left block (slot 0) …
        let anc = [
            Ancestor { parent: Letter(1), slot: 8 },
            Ancestor { parent: Letter(1), slot: 0 },
            Ancestor { parent: Letter(1), slot: 4 + 1 },
            Ancestor { parent: Letter(1), slot: 3 },
        ];
        let t = Supertile2D::from_ancestry(&s, Letter(1), &anc).unwrap();
        let (row, col) = t.origin_cell();
        let one = GridPatch { labels: vec![Letter(1)], rows: 1, cols: 1, origin_twice: (1, 1), level: 0, q: 3 };
        let dense = grid_patch(&s, &one, 4).unwrap();
        for r in 0..81 {
            for c in 0..81 {
                assert_eq!(t.letter_at(r, c), Some(dense.get(r as usize, c as usize)));
            }
        }
        let shifted = GridPatch { origin_twice: (2 * col as i64 + 1, 2 * row as i64 + 1), ..dense };
        let mask = [false, true];
        for radius in [0.5, 0.8, 2.0, 4.3, t.margin()] {
            let mut n = 0u64;
            t.for_each_cell_in_ball(&mask, radius, |_, _, _| n += 1).unwrap();
            assert_eq!(n, count_b_tiles_ball_2d(&shifted, &mask, radius).unwrap(), "radius {radius}");
        }
    }
}
