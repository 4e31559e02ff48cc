use serde::Serialize;

use crate::error::{Error, Result};
use crate::scalar::{Real, Scalar};
use crate::spectral::{dominant_vector, CountMatrix, Normalization, Side};
use crate::subcore::{Letter, Substitution};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum LengthNormalization {
    MinEntry,
    Exact,
}

/// Tile length ξ_a for every letter.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LengthVector<T> {
    pub xi: Vec<T>,
    pub normalization: LengthNormalization,
}

impl<T: Scalar> LengthVector<T> {
    /// Lengths supplied by hand, e.g. as exact rationals.
    pub fn exact(xi: Vec<T>) -> Result<Self> {
        if xi.iter().any(|&x| !(x > T::zero())) {
            return Err(Error::Degenerate("tile lengths must be positive".into()));
        }
        Ok(LengthVector { xi, normalization: LengthNormalization::Exact })
    }

    #[inline]
    pub fn of(&self, a: Letter) -> T {
        self.xi[a.index()]
    }
}

/// Left Perron vector of the whole matrix for ρ(A), smallest entry 1.
pub fn suspension_lengths<T: Real>(sub: &Substitution) -> Result<LengthVector<T>> {
    if sub.dim() != 1 {
        return Err(Error::WrongDimension { expected: 1, found: sub.dim() });
    }
    suspension_lengths_of(&sub.substitution_matrix())
}

pub fn suspension_lengths_of<T: Real>(m: &CountMatrix) -> Result<LengthVector<T>> {
    let (rho, xi, _) = dominant_vector::<T>(m, Side::Left, &Normalization::MinEntry)?;
    // ρ ξ_v = Σ_w M[w,v] ξ_w: the inflated tile is tiled by the image tiles.
    let image = m.vec_mul(&xi);
    for (v, (&lhs, &rhs)) in xi.iter().zip(&image).enumerate() {
        if ((rho * lhs - rhs) / rhs).abs() > T::lit(1e-9) {
            return Err(Error::Geometry(format!("inflation identity fails for letter {v}")));
        }
    }
    Ok(LengthVector { xi, normalization: LengthNormalization::MinEntry })
}

/// |w|_T = ⟨ℓ(w), ξ⟩
pub fn tiling_length<T: Scalar>(w: &[Letter], xi: &LengthVector<T>) -> T {
    w.iter().fold(T::zero(), |s, &a| s + xi.of(a))
}

/// R_k = |x[1,k]|_T + ξ_{x(0)}/2: distance from the origin to the right end of tile k.
pub fn right_end<T: Scalar>(x0: Letter, after_origin: &[Letter], k: usize, xi: &LengthVector<T>) -> T {
    tiling_length(&after_origin[..k], xi) + xi.of(x0) / T::from_count(2)
}

/// A finite piece of a suspension tiling: letter x(i) occupies [bounds[i+L], bounds[i+L+1]].
#[derive(Clone, Debug, PartialEq)]
pub struct Tiling1DWindow<T> {
    pub letters: Vec<Letter>,
    /// Index of x(0) inside `letters`.
    pub origin: usize,
    pub bounds: Vec<T>,
}

impl<T: Scalar> Tiling1DWindow<T> {
    /// The tile of x(i) as (letter, left, right).
    pub fn tile(&self, i: isize) -> Option<(Letter, T, T)> {
        let j = self.origin as isize + i;
        (j >= 0 && (j as usize) < self.letters.len()).then(|| {
            let j = j as usize;
            (self.letters[j], self.bounds[j], self.bounds[j + 1])
        })
    }

    pub fn right_extent(&self) -> T {
        *self.bounds.last().unwrap()
    }

    pub fn left_extent(&self) -> T {
        self.bounds[0]
    }
}

/// `left` holds x(−L..−1), `right` holds x(0..R); the x(0) tile is centered at 0.
pub fn window_from_sequence<T: Scalar>(left: &[Letter], right: &[Letter], xi: &LengthVector<T>) -> Result<Tiling1DWindow<T>> {
    let x0 = *right.first().ok_or_else(|| Error::Coverage { needed: 1.0, available: 0.0 })?;
    let mut bounds = Vec::with_capacity(left.len() + right.len() + 1);
    let mut pos = T::zero() - xi.of(x0) / T::from_count(2);
    let mut back = Vec::with_capacity(left.len());
    for &a in left.iter().rev() {
        pos = pos - xi.of(a);
        back.push(pos);
    }
    bounds.extend(back.into_iter().rev());
    let mut pos = T::zero() - xi.of(x0) / T::from_count(2);
    bounds.push(pos);
    for &a in right {
        pos = pos + xi.of(a);
        bounds.push(pos);
    }
    let mut letters = left.to_vec();
    letters.extend_from_slice(right);
    Ok(Tiling1DWindow { letters, origin: left.len(), bounds })
}

/// Prefix counts of B-tiles, for repeated containment queries on one window.
pub struct BTileCounter<'a, T> {
    win: &'a Tiling1DWindow<T>,
    prefix: Vec<u64>,
}

impl<'a, T: Scalar> BTileCounter<'a, T> {
    pub fn new(win: &'a Tiling1DWindow<T>, b_mask: &[bool]) -> Self {
        let mut prefix = Vec::with_capacity(win.letters.len() + 1);
        prefix.push(0);
        let mut acc = 0;
        for a in &win.letters {
            acc += b_mask[a.index()] as u64;
            prefix.push(acc);
        }
        BTileCounter { win, prefix }
    }

    /// Number of B-tiles [l, r] with 0 ≤ l and r ≤ t.
    pub fn count(&self, t: T) -> Result<u64> {
        let b = &self.win.bounds;
        if t > *b.last().unwrap() {
            return Err(Error::Coverage {
                needed: t.approx(),
                available: b.last().unwrap().approx(),
            });
        }
        if *b.first().unwrap() > T::zero() {
            return Err(Error::Coverage { needed: 0.0, available: f64::NAN });
        }
        let first = b.partition_point(|&x| x < T::zero());
        // tiles first.. whose right bound bounds[i+1] ≤ t
        let end = b.partition_point(|&x| x <= t).saturating_sub(1);
        Ok(if end > first { self.prefix[end] - self.prefix[first] } else { 0 })
    }
}

pub fn count_b_tiles_1d<T: Scalar>(win: &Tiling1DWindow<T>, b_mask: &[bool], t: T) -> Result<u64> {
    BTileCounter::new(win, b_mask).count(t)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GrowthRow {
    pub t: f64,
    pub count: u64,
    pub ratio: f64,
    pub running_max: f64,
}

/// N(t)/t^α along `t_grid` (increasing) with the running maximum K̂.
pub fn btile_growth_scan<T: Real>(win: &Tiling1DWindow<T>, b_mask: &[bool], alpha: f64, t_grid: &[T]) -> Result<Vec<GrowthRow>> {
    let counter = BTileCounter::new(win, b_mask);
    let mut out = Vec::with_capacity(t_grid.len());
    let mut running = 0.0f64;
    for &t in t_grid {
        let count = counter.count(t)?;
        let ratio = count as f64 / t.as_f64().powf(alpha);
        running = running.max(ratio);
        out.push(GrowthRow { t: t.as_f64(), count, ratio, running_max: running });
    }
    Ok(out)
}

/// Right ends in (0, t_max] of the B-tiles lying in [0, ∞): the only places N(t) jumps,
/// hence where N(t)/t^α attains its running supremum.
pub fn btile_jump_points<T: Scalar>(win: &Tiling1DWindow<T>, b_mask: &[bool], t_max: T) -> Vec<T> {
    let b = &win.bounds;
    let first = b.partition_point(|&x| x < T::zero());
    (first..win.letters.len())
        .filter(|&i| b_mask[win.letters[i].index()])
        .map(|i| b[i + 1])
        .take_while(|&r| r <= t_max)
        .collect()
}

/// |x[1,n]|_T / n for n on the grid; `after_origin` is x(1), x(2), …
pub fn lemma_length_ratio<T: Real>(after_origin: &[Letter], xi: &LengthVector<T>, n_grid: &[usize]) -> Result<Vec<(usize, f64)>> {
    let n_max = n_grid.iter().copied().max().unwrap_or(0);
    if n_max > after_origin.len() {
        return Err(Error::Coverage { needed: n_max as f64, available: after_origin.len() as f64 });
    }
    let mut out = Vec::with_capacity(n_grid.len());
    let mut acc = T::zero();
    let mut k = 0;
    let mut grid: Vec<usize> = n_grid.to_vec();
    grid.sort_unstable();
    for n in grid.into_iter().filter(|&n| n > 0) {
        while k < n {
            acc = acc + xi.of(after_origin[k]);
            k += 1;
        }
        out.push((n, acc.as_f64() / n as f64));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Rational;
    use proptest::prelude::*;

    fn cantor() -> Substitution {
        Substitution::linear(&["0", "1"], &["000", "101"]).unwrap()
    }

    fn s1001() -> Substitution {
        Substitution::linear(&["0", "1"], &["000", "1001"]).unwrap()
    }

    #[test]
    fn fixture_lengths() {
        assert_eq!(suspension_lengths::<f64>(&cantor()).unwrap().xi, vec![1.0, 1.0]);
        let xi = suspension_lengths::<f64>(&s1001()).unwrap().xi;
        assert!((xi[0] - 1.0).abs() < 1e-12 && (xi[1] - 2.0).abs() < 1e-9);
        let s2 = Substitution::linear(&["0", "1"], &["000000000", "111101111"]).unwrap();
        let xi = suspension_lengths::<f64>(&s2).unwrap().xi;
        assert!((xi[0] - 1.0).abs() < 1e-12 && (xi[1] - 1.0).abs() < 1e-9);
    }

    #[test]
    fn exact_tiling_lengths() {
        let s = s1001();
        let xi = LengthVector::exact(vec![Rational::from_integer(1), Rational::from_integer(2)]).unwrap();
        let w = s.alphabet().word("1001").unwrap();
        assert_eq!(tiling_length(&w, &xi), Rational::from_integer(6));
        assert_eq!(tiling_length(&[], &xi), Rational::from_integer(0));
        let c = LengthVector::exact(vec![1i64, 1]).unwrap();
        assert_eq!(tiling_length(&cantor().iterate(Letter(1), 5).unwrap(), &c), 243);
    }

    #[test]
    fn windows() {
        let xi = LengthVector::exact(vec![1.0, 1.0]).unwrap();
        let w = window_from_sequence(&[], &[Letter(1)], &xi).unwrap();
        assert_eq!(w.tile(0), Some((Letter(1), -0.5, 0.5)));
        let xi = LengthVector::exact(vec![1.0, 2.0]).unwrap();
        let w = window_from_sequence(&[Letter(0)], &[Letter(1), Letter(0)], &xi).unwrap();
        assert_eq!(w.tile(0), Some((Letter(1), -1.0, 1.0)));
        assert_eq!(w.tile(1), Some((Letter(0), 1.0, 2.0)));
        assert_eq!(w.tile(-1), Some((Letter(0), -2.0, -1.0)));
    }

    #[test]
    fn window_of_inflated_word_is_inflated_window() {
        let s = s1001();
        let xi = LengthVector::exact(vec![Rational::from_integer(1), Rational::from_integer(2)]).unwrap();
        let x = s.iterate(Letter(1), 3).unwrap();
        let w = window_from_sequence(&[], &x, &xi).unwrap();
        let sw = window_from_sequence(&[], &s.apply(&x).unwrap(), &xi).unwrap();
        // Left ends agree after scaling: tile boundaries of x map to image boundaries of σ(x).
        let shift = xi.of(x[0]) / Rational::from_integer(2);
        let sshift = xi.of(s.image(x[0])[0]) / Rational::from_integer(2);
        let mut j = 0;
        for (i, &a) in x.iter().enumerate() {
            let scaled = (w.bounds[i] + shift) * Rational::from_integer(3);
            assert_eq!(scaled, sw.bounds[j] + sshift);
            j += s.image(a).len();
        }
    }

    #[test]
    fn counting_against_brute_force() {
        let s = cantor();
        let x = s.iterate(Letter(1), 8).unwrap();
        let xi = LengthVector::exact(vec![1.0, 1.0]).unwrap();
        let left = s.iterate(Letter(0), 2).unwrap();
        let w = window_from_sequence(&left, &x, &xi).unwrap();
        let mask = [false, true];
        let mut rng = 0x1234_5678u64;
        for _ in 0..100 {
            rng = rng.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            let t = (rng >> 11) as f64 / (1u64 << 53) as f64 * 6000.0;
            let brute = (0..x.len())
                .filter(|&i| {
                    let (a, l, r) = w.tile(i as isize).unwrap();
                    mask[a.index()] && l >= 0.0 && r <= t
                })
                .count() as u64;
            assert_eq!(count_b_tiles_1d(&w, &mask, t).unwrap(), brute);
        }
        assert_eq!(count_b_tiles_1d(&w, &mask, 0.4).unwrap(), 0);
        // x(1) = 0, x(2) = 1 occupies [1.5, 2.5]
        assert_eq!(count_b_tiles_1d(&w, &mask, 2.5).unwrap(), 1);
        assert!(count_b_tiles_1d(&w, &mask, 1e6).is_err());
    }

    #[test]
    fn growth_scan_of_an_all_a_window() {
        let xi = LengthVector::exact(vec![1.0, 1.0]).unwrap();
        let w = window_from_sequence(&[], &vec![Letter(0); 100], &xi).unwrap();
        let rows = btile_growth_scan(&w, &[false, true], 0.63, &[1.0, 10.0, 90.0]).unwrap();
        assert!(rows.iter().all(|r| r.ratio == 0.0));
    }

    #[test]
    fn jump_points_are_where_the_count_changes() {
        let xi = LengthVector::exact(vec![1.0, 1.0]).unwrap();
        let x = cantor().iterate(Letter(1), 4).unwrap();
        let w = window_from_sequence(&[Letter(1)], &x, &xi).unwrap();
        let mask = [false, true];
        let jumps = btile_jump_points(&w, &mask, 60.0);
        assert_eq!(jumps.len() as u64, count_b_tiles_1d(&w, &mask, 60.0).unwrap());
        for &t in &jumps {
            let c = count_b_tiles_1d(&w, &mask, t).unwrap();
            assert_eq!(count_b_tiles_1d(&w, &mask, t - 0.5).unwrap() + 1, c);
        }
    }

    #[test]
    fn length_ratio_cantor_is_one() {
        let s = cantor();
        let x = s.iterate(Letter(1), 6).unwrap();
        let xi = suspension_lengths::<f64>(&s).unwrap();
        for (_, r) in lemma_length_ratio(&x[1..], &xi, &[1, 10, 100, 728]).unwrap() {
            assert_eq!(r, 1.0);
        }
    }

    proptest! {
        #[test]
        fn inflation_identity(w in proptest::collection::vec(0u8..2, 0..60)) {
            let s = s1001();
            let xi = suspension_lengths::<f64>(&s).unwrap();
            let w: Vec<Letter> = w.into_iter().map(Letter).collect();
            let lhs = tiling_length(&s.apply(&w).unwrap(), &xi);
            let rhs = 3.0 * tiling_length(&w, &xi);
            prop_assert!((lhs - rhs).abs() <= 1e-9 * rhs.max(1.0));
        }

        #[test]
        fn counts_are_monotone(t1 in 0.0f64..670.0, dt in 0.0f64..50.0) {
            let s = cantor();
            let xi = LengthVector::exact(vec![1.0, 1.0]).unwrap();
            let w = window_from_sequence(&[], &s.iterate(Letter(1), 6).unwrap(), &xi).unwrap();
            let c = BTileCounter::new(&w, &[false, true]);
            prop_assert!(c.count(t1).unwrap() <= c.count(t1 + dt).unwrap());
        }
    }
}
