use super::language::{in_language, LanguageWitness};
use super::{Letter, Substitution, Word};
use crate::error::{Error, Result};

/// Where the window sits inside a supertile: `σ^depth(letter)[offset..]`.
pub type SupertileHint = LanguageWitness;

/// w = u₀ σ(u₁) … σᵐ(u_m) σᵐ(v_m) … σ(v₁) v₀
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AccordionForm {
    pub m: usize,
    pub u: Vec<Word>,
    pub v: Vec<Word>,
}

impl AccordionForm {
    pub fn reconstruct(&self, sub: &Substitution) -> Result<Word> {
        let lift = |piece: &Word, j: usize| -> Result<Word> {
            let mut w = piece.clone();
            for _ in 0..j {
                w = sub.apply(&w)?;
            }
            Ok(w)
        };
        let mut out = Vec::new();
        for j in 0..=self.m {
            out.extend(lift(&self.u[j], j)?);
        }
        for j in (0..=self.m).rev() {
            out.extend(lift(&self.v[j], j)?);
        }
        Ok(out)
    }
}

/// Precomputed levels σ⁰(a), …, σᵏ(a) for decomposing many windows of one supertile.
pub struct AccordionDecomposer<'a> {
    sub: &'a Substitution,
    levels: Vec<Word>,
    /// starts[i][p]: offset in σ^{i+1}(a) where the image of letter p of σⁱ(a) begins.
    starts: Vec<Vec<usize>>,
}

impl<'a> AccordionDecomposer<'a> {
    pub fn new(sub: &'a Substitution, a: Letter, k: usize) -> Result<Self> {
        let top = sub.iterate(a, k)?;
        let mut levels = Vec::with_capacity(k + 1);
        levels.push(vec![a]);
        for i in 0..k {
            let next = sub.apply(&levels[i])?;
            levels.push(next);
        }
        debug_assert_eq!(levels[k], top);
        let starts = levels[..k]
            .iter()
            .map(|w| {
                let mut s = Vec::with_capacity(w.len() + 1);
                let mut acc = 0;
                s.push(0);
                for &c in w {
                    acc += sub.image(c).len();
                    s.push(acc);
                }
                s
            })
            .collect();
        Ok(AccordionDecomposer { sub, levels, starts })
    }

    pub fn depth(&self) -> usize {
        self.levels.len() - 1
    }

    pub fn supertile(&self) -> &[Letter] {
        &self.levels[self.depth()]
    }

    /// Decompose σᵏ(a)[start..end], peeling one substitution level at a time.
    pub fn decompose(&self, start: usize, end: usize) -> Result<AccordionForm> {
        let k = self.depth();
        if start > end || end > self.levels[k].len() {
            return Err(Error::Config(format!("window {start}..{end} outside the supertile")));
        }
        let mut u: Vec<Word> = Vec::new();
        let mut v: Vec<Word> = Vec::new();
        let (mut lo, mut hi) = (start, end);
        let mut level = k;
        loop {
            let w = &self.levels[level];
            if lo == hi {
                if u.is_empty() {
                    return Ok(AccordionForm { m: 0, u: vec![vec![]], v: vec![vec![]] });
                }
                // Previous level had its full letters peeled away to nothing: it is the top.
                let m = u.len() - 1;
                return Ok(AccordionForm { m, u, v });
            }
            if level == 0 {
                let piece = w[lo..hi].to_vec();
                if self.is_image_factor(&piece) {
                    u.push(piece);
                    v.push(vec![]);
                } else {
                    // The bare letter never occurs inside an image; stop one level lower.
                    let m = u.len() - 1;
                    u[m] = self.sub.image(piece[0]).to_vec();
                    v[m] = vec![];
                }
                let m = u.len() - 1;
                return Ok(AccordionForm { m, u, v });
            }
            let s = &self.starts[level - 1];
            let p = s.partition_point(|&x| x < lo);
            let q = s.partition_point(|&x| x <= hi) - 1;
            if p < q {
                u.push(w[lo..s[p]].to_vec());
                v.push(w[s[q]..hi].to_vec());
                lo = p;
                hi = q;
                level -= 1;
                continue;
            }
            // No complete image inside: this is the top level m.
            let piece = &w[lo..hi];
            let (um, vm) = if self.is_image_factor(piece) {
                (piece.to_vec(), vec![])
            } else {
                let cut = s[s.partition_point(|&x| x <= lo)];
                (w[lo..cut].to_vec(), w[cut..hi].to_vec())
            };
            u.push(um);
            v.push(vm);
            let m = u.len() - 1;
            return Ok(AccordionForm { m, u, v });
        }
    }

    fn is_image_factor(&self, piece: &[Letter]) -> bool {
        is_image_factor(self.sub, piece)
    }
}

pub(crate) fn is_image_factor(sub: &Substitution, piece: &[Letter]) -> bool {
    piece.is_empty()
        || sub.alphabet().letters().any(|c| {
            let img = sub.image(c);
            img.len() >= piece.len() && img.windows(piece.len()).any(|w| w == piece)
        })
}

/// Decompose a legal window. Without a hint the smallest supertile containing it is
/// located first (depth ≤ `max_depth`).
pub fn accordion_decompose(
    sub: &Substitution,
    window: &[Letter],
    hint: Option<SupertileHint>,
    max_depth: usize,
) -> Result<AccordionForm> {
    let hint = match hint {
        Some(h) => h,
        None => in_language(sub, window, max_depth)?.ok_or(Error::NotInLanguage(max_depth))?,
    };
    let dec = AccordionDecomposer::new(sub, hint.letter, hint.depth)?;
    let end = hint.offset + window.len();
    if dec.supertile().get(hint.offset..end) != Some(window) {
        return Err(Error::Config("hint does not locate the window".into()));
    }
    dec.decompose(hint.offset, end)
}
