//! Alphabets, substitution rules and word combinatorics.

mod accordion;
mod language;
mod parse;

pub use accordion::{accordion_decompose, AccordionDecomposer, AccordionForm, SupertileHint};
pub use language::{fixed_point_seeds, in_language, orbit_generate, LanguageWitness, TwoSidedBlock};
pub use parse::{parse_config, parse_substitution, MatrixSystem, SystemSpec};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spectral::CountMatrix;

/// Refuse to materialize words longer than this unless the caller raises the cap.
pub const DEFAULT_LENGTH_CAP: u128 = 100_000_000;

#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug, Serialize, Deserialize)]
pub struct Letter(pub u8);

impl Letter {
    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

pub type Word = Vec<Letter>;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Alphabet {
    labels: Vec<String>,
}

impl Alphabet {
    pub fn new(labels: Vec<String>) -> Result<Self> {
        if labels.is_empty() {
            return Err(Error::Config("alphabet is empty".into()));
        }
        if labels.len() > 256 {
            return Err(Error::Config("alphabets are limited to 256 letters".into()));
        }
        for (i, l) in labels.iter().enumerate() {
            if l.chars().count() != 1 {
                return Err(Error::Config(format!("letter {l:?} is not a single codepoint")));
            }
            if labels[..i].contains(l) {
                return Err(Error::Config(format!("duplicate letter {l:?}")));
            }
        }
        Ok(Alphabet { labels })
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn letters(&self) -> impl Iterator<Item = Letter> {
        (0..self.labels.len()).map(|i| Letter(i as u8))
    }

    pub fn label(&self, a: Letter) -> &str {
        &self.labels[a.index()]
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn lookup(&self, label: &str) -> Option<Letter> {
        self.labels.iter().position(|l| l == label).map(|i| Letter(i as u8))
    }

    pub fn lookup_char(&self, c: char) -> Option<Letter> {
        let mut buf = [0u8; 4];
        self.lookup(c.encode_utf8(&mut buf))
    }

    /// Parse a word written with the alphabet's labels.
    pub fn word(&self, text: &str) -> Result<Word> {
        text.chars()
            .map(|c| {
                self.lookup_char(c).ok_or_else(|| Error::UnknownLetter {
                    rule: text.to_string(),
                    letter: c.to_string(),
                })
            })
            .collect()
    }

    pub fn render(&self, w: &[Letter]) -> String {
        w.iter().map(|&a| self.label(a)).collect()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Rules {
    Linear(Vec<Word>),
    /// Row-major q×q grids, first row on top.
    Grid { q: usize, cells: Vec<Word> },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Substitution {
    alphabet: Alphabet,
    rules: Rules,
}

impl Substitution {
    pub fn new(alphabet: Alphabet, rules: Rules) -> Result<Self> {
        let n = alphabet.len();
        let images = match &rules {
            Rules::Linear(v) => v,
            Rules::Grid { q, cells } => {
                if *q == 0 {
                    return Err(Error::Config("inflation factor must be positive".into()));
                }
                for (i, g) in cells.iter().enumerate() {
                    if g.len() != q * q {
                        return Err(Error::NonSquareImage {
                            letter: alphabet.labels[i].clone(),
                            detail: format!("{} cells, expected {}", g.len(), q * q),
                        });
                    }
                }
                cells
            }
        };
        if images.len() != n {
            return Err(Error::Config(format!("{} rules for {} letters", images.len(), n)));
        }
        for (i, img) in images.iter().enumerate() {
            if img.is_empty() {
                return Err(Error::EmptyRule(alphabet.labels[i].clone()));
            }
            if let Some(b) = img.iter().find(|b| b.index() >= n) {
                return Err(Error::LetterOutOfRange(b.index()));
            }
        }
        Ok(Substitution { alphabet, rules })
    }

    /// Convenience constructor for one-dimensional rules written as strings.
    pub fn linear(labels: &[&str], images: &[&str]) -> Result<Self> {
        let alphabet = Alphabet::new(labels.iter().map(|s| s.to_string()).collect())?;
        let words = images.iter().map(|s| alphabet.word(s)).collect::<Result<Vec<_>>>()?;
        Substitution::new(alphabet, Rules::Linear(words))
    }

    /// Convenience constructor for grid rules, one slice of row strings per letter.
    pub fn grid(labels: &[&str], images: &[&[&str]]) -> Result<Self> {
        let alphabet = Alphabet::new(labels.iter().map(|s| s.to_string()).collect())?;
        let q = images.first().map_or(0, |rows| rows.len());
        let mut cells = Vec::with_capacity(images.len());
        for rows in images {
            let mut g = Vec::new();
            for r in rows.iter() {
                g.extend(alphabet.word(r)?);
            }
            cells.push(g);
        }
        Substitution::new(alphabet, Rules::Grid { q, cells })
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn rules(&self) -> &Rules {
        &self.rules
    }

    pub fn n_letters(&self) -> usize {
        self.alphabet.len()
    }

    pub fn dim(&self) -> u8 {
        match self.rules {
            Rules::Linear(_) => 1,
            Rules::Grid { .. } => 2,
        }
    }

    /// Inflation factor of a grid substitution.
    pub fn q(&self) -> Option<usize> {
        match self.rules {
            Rules::Linear(_) => None,
            Rules::Grid { q, .. } => Some(q),
        }
    }

    /// The image of `a`; for grids, the cells in row-major order.
    pub fn image(&self, a: Letter) -> &[Letter] {
        match &self.rules {
            Rules::Linear(v) => &v[a.index()],
            Rules::Grid { cells, .. } => &cells[a.index()],
        }
    }

    /// L_max: the longest rule image.
    pub fn max_image_len(&self) -> usize {
        self.alphabet.letters().map(|a| self.image(a).len()).max().unwrap_or(0)
    }

    fn require_dim(&self, d: u8) -> Result<()> {
        if self.dim() != d {
            return Err(Error::WrongDimension { expected: d, found: self.dim() });
        }
        Ok(())
    }

    fn check_word(&self, w: &[Letter]) -> Result<()> {
        match w.iter().find(|a| a.index() >= self.n_letters()) {
            Some(a) => Err(Error::LetterOutOfRange(a.index())),
            None => Ok(()),
        }
    }

    pub fn apply(&self, w: &[Letter]) -> Result<Word> {
        self.require_dim(1)?;
        self.check_word(w)?;
        let mut out = Vec::with_capacity(w.iter().map(|&a| self.image(a).len()).sum());
        for &a in w {
            out.extend_from_slice(self.image(a));
        }
        Ok(out)
    }

    /// |σⁿ(c)| for every letter c and every 0 ≤ j ≤ n, saturating at `u128::MAX`.
    pub fn iterated_lengths(&self, n: usize) -> Vec<Vec<u128>> {
        let k = self.n_letters();
        let mut table = vec![vec![1u128; k]];
        for j in 0..n {
            let prev = &table[j];
            let row = self
                .alphabet
                .letters()
                .map(|a| {
                    self.image(a)
                        .iter()
                        .fold(0u128, |s, b| s.saturating_add(prev[b.index()]))
                })
                .collect();
            table.push(row);
        }
        table
    }

    pub fn predicted_len(&self, a: Letter, n: usize) -> u128 {
        self.iterated_lengths(n)[n][a.index()]
    }

    pub fn iterate(&self, a: Letter, n: usize) -> Result<Word> {
        self.iterate_capped(a, n, DEFAULT_LENGTH_CAP)
    }

    pub fn iterate_capped(&self, a: Letter, n: usize, cap: u128) -> Result<Word> {
        self.require_dim(1)?;
        self.check_word(&[a])?;
        let predicted = self.predicted_len(a, n);
        if predicted > cap {
            return Err(Error::LengthCap { predicted, cap });
        }
        let mut w = vec![a];
        for _ in 0..n {
            w = self.apply(&w)?;
        }
        Ok(w)
    }

    /// Column b of the matrix is the population vector of σ(b).
    pub fn substitution_matrix(&self) -> CountMatrix {
        let n = self.n_letters();
        let mut m = CountMatrix::zeros(n);
        for b in self.alphabet.letters() {
            for a in self.image(b) {
                m.add(a.index(), b.index(), 1);
            }
        }
        m
    }

    /// `self ∘ other`, i.e. a ↦ σ(τ(a)). Both must be 1-D over the same alphabet.
    pub fn compose(&self, other: &Substitution) -> Result<Substitution> {
        self.require_dim(1)?;
        other.require_dim(1)?;
        if self.alphabet != other.alphabet {
            return Err(Error::Config("composition needs a shared alphabet".into()));
        }
        let images = other
            .alphabet
            .letters()
            .map(|a| self.apply(other.image(a)))
            .collect::<Result<Vec<_>>>()?;
        Substitution::new(self.alphabet.clone(), Rules::Linear(images))
    }

    /// σᵏ as a substitution in its own right (k ≥ 1). Grids compose cellwise.
    pub fn power(&self, k: usize) -> Result<Substitution> {
        if k == 0 {
            return Err(Error::Config("power must be at least 1".into()));
        }
        match &self.rules {
            Rules::Linear(_) => {
                let mut p = self.clone();
                for _ in 1..k {
                    p = self.compose(&p)?;
                }
                Ok(p)
            }
            Rules::Grid { q, .. } => {
                let side = q.checked_pow(k as u32).ok_or(Error::Overflow("grid power"))?;
                let cells = self
                    .alphabet
                    .letters()
                    .map(|a| {
                        let mut g = (vec![a], 1usize);
                        for _ in 0..k {
                            g = self.apply_grid(&g.0, g.1, g.1);
                        }
                        g.0
                    })
                    .collect();
                Substitution::new(self.alphabet.clone(), Rules::Grid { q: side, cells })
            }
        }
    }

    /// Substitute every cell of a row-major `rows × cols` label array.
    pub fn apply_grid(&self, labels: &[Letter], rows: usize, cols: usize) -> (Word, usize) {
        let q = self.q().expect("apply_grid on a 1-D substitution");
        let out_cols = cols * q;
        let mut out = vec![Letter(0); rows * q * out_cols];
        for r in 0..rows {
            for c in 0..cols {
                let img = self.image(labels[r * cols + c]);
                for i in 0..q {
                    let dst = (r * q + i) * out_cols + c * q;
                    out[dst..dst + q].copy_from_slice(&img[i * q..(i + 1) * q]);
                }
            }
        }
        (out, rows * q)
    }
}

/// ℓ(w): how often each letter occurs in `w`.
pub fn population_vector(w: &[Letter], n_letters: usize) -> Vec<u64> {
    let mut counts = vec![0u64; n_letters];
    for a in w {
        counts[a.index()] += 1;
    }
    counts
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) fn cantor() -> Substitution {
        Substitution::linear(&["0", "1"], &["000", "101"]).unwrap()
    }

    #[test]
    fn apply_concatenates() {
        let s = cantor();
        let a = s.alphabet();
        assert_eq!(a.render(&s.apply(&a.word("10").unwrap()).unwrap()), "101000");
        assert!(s.apply(&[]).unwrap().is_empty());
        assert!(matches!(s.apply(&[Letter(7)]), Err(Error::LetterOutOfRange(7))));
    }

    #[test]
    fn iterate_small_depths() {
        let s = cantor();
        assert_eq!(s.alphabet().render(&s.iterate(Letter(1), 2).unwrap()), "101000101");
        assert_eq!(s.iterate(Letter(0), 0).unwrap(), vec![Letter(0)]);
        let w = s.iterate(Letter(1), 10).unwrap();
        assert_eq!(w.len(), 59049);
        assert_eq!(population_vector(&w, 2), vec![59049 - 1024, 1024]);
    }

    #[test]
    fn iterate_refuses_beyond_cap() {
        let s = cantor();
        match s.iterate_capped(Letter(1), 20, 1_000_000) {
            Err(Error::LengthCap { predicted, .. }) => assert_eq!(predicted, 3u128.pow(20)),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn population_counts() {
        let s = cantor();
        let w = s.alphabet().word("101000101").unwrap();
        assert_eq!(population_vector(&w, 2), vec![5, 4]);
        assert_eq!(population_vector(&[], 2), vec![0, 0]);
    }

    #[test]
    fn matrices_of_fixtures() {
        assert_eq!(cantor().substitution_matrix().rows(), vec![vec![3, 1], vec![0, 2]]);
        let s2 = Substitution::linear(&["0", "1"], &["000000000", "111101111"]).unwrap();
        assert_eq!(s2.substitution_matrix().rows(), vec![vec![9, 1], vec![0, 8]]);
    }

    #[test]
    fn grid_power_matches_repeated_application() {
        let carpet = Substitution::grid(
            &["0", "1"],
            &[&["000", "000", "000"], &["111", "101", "111"]],
        )
        .unwrap();
        let p2 = carpet.power(2).unwrap();
        assert_eq!(p2.q(), Some(9));
        assert_eq!(p2.substitution_matrix(), carpet.substitution_matrix().pow(2).unwrap());
    }
}
