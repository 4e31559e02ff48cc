use super::{Letter, Substitution, Word, DEFAULT_LENGTH_CAP};
use crate::error::{Error, Result};

/// Where a word was found: `word = σ^depth(letter)[offset..offset+len]`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct LanguageWitness {
    pub letter: Letter,
    pub depth: usize,
    pub offset: usize,
}

/// Search σⁿ(a) for n = 1..=max_depth (a in alphabet order) and return the first hit.
///
/// `None` only means "not found up to this depth"; images longer than the default
/// length cap are skipped, so this is never a proof of absence.
pub fn in_language(sub: &Substitution, w: &[Letter], max_depth: usize) -> Result<Option<LanguageWitness>> {
    if sub.dim() != 1 {
        return Err(Error::WrongDimension { expected: 1, found: sub.dim() });
    }
    sub.check_word(w)?;
    let lengths = sub.iterated_lengths(max_depth);
    let mut levels: Vec<Word> = sub.alphabet().letters().map(|a| vec![a]).collect();
    for depth in 1..=max_depth {
        let mut any_alive = false;
        for a in sub.alphabet().letters() {
            let len = lengths[depth][a.index()];
            if len > DEFAULT_LENGTH_CAP {
                levels[a.index()].clear();
                continue;
            }
            // Only extend the words still being tracked.
            if levels[a.index()].is_empty() && depth > 1 {
                continue;
            }
            let next = sub.apply(&levels[a.index()])?;
            levels[a.index()] = next;
            any_alive = true;
            if (len as usize) < w.len() {
                continue;
            }
            if let Some(offset) = find(&levels[a.index()], w) {
                return Ok(Some(LanguageWitness { letter: a, depth, offset }));
            }
        }
        if !any_alive {
            break;
        }
    }
    Ok(None)
}

fn find(hay: &[Letter], needle: &[Letter]) -> Option<usize> {
    if needle.is_empty() {
        return Some(0);
    }
    hay.windows(needle.len()).position(|win| win == needle)
}

/// Pairs (a, b) where σ(a) ends in a, σ(b) starts with b and ab is a legal word.
pub fn fixed_point_seeds(sub: &Substitution, max_depth: usize) -> Result<Vec<(Letter, Letter)>> {
    let mut out = Vec::new();
    for a in sub.alphabet().letters() {
        if sub.image(a).last() != Some(&a) {
            continue;
        }
        for b in sub.alphabet().letters() {
            if sub.image(b).first() != Some(&b) {
                continue;
            }
            if in_language(sub, &[a, b], max_depth)?.is_some() {
                out.push((a, b));
            }
        }
    }
    Ok(out)
}

/// σⁿ(a).σⁿ(b): the central part of the two-sided fixed point grown from the seed a.b.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TwoSidedBlock {
    /// σⁿ(a); its last letter sits at position −1.
    pub left: Word,
    /// σⁿ(b); its first letter is x(0).
    pub right: Word,
}

impl TwoSidedBlock {
    pub fn at(&self, i: isize) -> Option<Letter> {
        if i >= 0 {
            self.right.get(i as usize).copied()
        } else {
            let back = i.unsigned_abs();
            (back <= self.left.len()).then(|| self.left[self.left.len() - back])
        }
    }

    /// x(1), x(2), … : the one-sided word after the origin letter.
    pub fn after_origin(&self) -> &[Letter] {
        &self.right[1..]
    }
}

pub fn orbit_generate(sub: &Substitution, seed: (Letter, Letter), n: usize) -> Result<TwoSidedBlock> {
    orbit_generate_capped(sub, seed, n, DEFAULT_LENGTH_CAP)
}

pub fn orbit_generate_capped(
    sub: &Substitution,
    seed: (Letter, Letter),
    n: usize,
    cap: u128,
) -> Result<TwoSidedBlock> {
    let (a, b) = seed;
    sub.check_word(&[a, b])?;
    if sub.image(a).last() != Some(&a) || sub.image(b).first() != Some(&b) {
        return Err(Error::Config(format!(
            "seed {}.{} is not fixed by the substitution",
            sub.alphabet().label(a),
            sub.alphabet().label(b)
        )));
    }
    Ok(TwoSidedBlock { left: sub.iterate_capped(a, n, cap)?, right: sub.iterate_capped(b, n, cap)? })
}
