use rand::distributions::{Distribution, WeightedIndex};
use rand::Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::gdifs::GdifsGraph;
use crate::rng::stream_rng;
use crate::scalar::Real;
use crate::subcore::{Letter, Substitution, Word};
use crate::tiling::{Ancestor, Supertile1D, Supertile2D};

/// Deepest ancestry the sampler builds before giving up on coverage.
pub const MAX_ANCESTRY: usize = 200;

/// ν-random tilings with a B-tile at the origin. The origin letter Q is drawn with
/// probability ν([Q]) (per unit transversal), and each step up picks an occurrence of
/// the current letter inside σ(P), P a B-letter, with probability ν_P/(ρ(B) ν_Q).
#[derive(Clone, Debug)]
pub struct TransversalSampler {
    letters: Vec<Letter>,
    origin: WeightedIndex<f64>,
    /// per vertex: (parent vertex, slot) choices and their weights
    parents: Vec<(Vec<(usize, usize)>, WeightedIndex<f64>)>,
}

impl TransversalSampler {
    /// `nu` is the right Perron vector of B in vertex order (any positive scale).
    pub fn new<T: Real>(g: &GdifsGraph<T>, nu: &[f64]) -> Result<Self> {
        let origin = WeightedIndex::new(nu).map_err(|e| Error::Degenerate(e.to_string()))?;
        let mut parents = Vec::with_capacity(g.n_vertices());
        for v in 0..g.n_vertices() {
            let choices: Vec<(usize, usize)> = g.in_edges[v].iter().map(|&k| (g.edges[k].source, g.edges[k].slot)).collect();
            let w = WeightedIndex::new(choices.iter().map(|&(s, _)| nu[s]))
                .map_err(|_| Error::Degenerate(format!("B-letter {} has no B-parent", g.vertices[v].index())))?;
            parents.push((choices, w));
        }
        Ok(TransversalSampler { letters: g.vertices.clone(), origin, parents })
    }

    pub fn sample_origin<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        self.origin.sample(rng)
    }

    /// Adds one ancestor above the current top vertex; returns the new top.
    pub fn extend<R: Rng + ?Sized>(&self, rng: &mut R, top: usize, ancestry: &mut Vec<Ancestor>) -> usize {
        let (choices, w) = &self.parents[top];
        let (parent, slot) = choices[w.sample(rng)];
        ancestry.push(Ancestor { parent: self.letters[parent], slot });
        parent
    }

    /// Origin letter and ancestry, grown until `done` accepts it.
    pub fn sample_until<R: Rng + ?Sized>(
        &self,
        rng: &mut R,
        mut done: impl FnMut(Letter, &[Ancestor]) -> Result<bool>,
    ) -> Result<(Letter, Vec<Ancestor>)> {
        let v0 = self.sample_origin(rng);
        let origin = self.letters[v0];
        let mut ancestry = Vec::new();
        let mut top = v0;
        while !done(origin, &ancestry)? {
            if ancestry.len() >= MAX_ANCESTRY {
                return Err(Error::Coverage { needed: f64::NAN, available: ancestry.len() as f64 });
            }
            top = self.extend(rng, top, &mut ancestry);
        }
        Ok((origin, ancestry))
    }
}

/// A ν-random orbit around the origin: (x(−n_left..−1), x(0), x(1..=n_right)).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RandomOrbit {
    pub left: Word,
    pub origin: Letter,
    pub right: Word,
    pub depth: usize,
}

impl RandomOrbit {
    /// x(0), x(1), … as one word.
    pub fn from_origin(&self) -> Word {
        let mut w = Vec::with_capacity(self.right.len() + 1);
        w.push(self.origin);
        w.extend_from_slice(&self.right);
        w
    }
}

pub fn random_orbit<R: Rng + ?Sized>(
    sub: &Substitution,
    sampler: &TransversalSampler,
    rng: &mut R,
    n_left: usize,
    n_right: usize,
) -> Result<RandomOrbit> {
    let (origin, ancestry) = sampler.sample_until(rng, |o, anc| {
        let t = Supertile1D::from_ancestry(sub, o, anc)?;
        Ok(t.left_available() >= n_left as u128 && t.right_available() >= n_right as u128)
    })?;
    let t = Supertile1D::from_ancestry(sub, origin, &ancestry)?;
    let (left, mut right) = t.around_origin(n_left, n_right + 1)?;
    right.remove(0);
    Ok(RandomOrbit { left, origin, right, depth: ancestry.len() })
}

/// A ν-random grid supertile whose origin cell is at least `radius` from its boundary.
pub fn random_supertile_2d<'a, R: Rng + ?Sized>(
    sub: &'a Substitution,
    sampler: &TransversalSampler,
    rng: &mut R,
    radius: f64,
) -> Result<Supertile2D<'a>> {
    let (origin, ancestry) = sampler.sample_until(rng, |o, anc| Ok(Supertile2D::from_ancestry(sub, o, anc)?.margin() >= radius))?;
    Supertile2D::from_ancestry(sub, origin, &ancestry)
}

/// `count` independent orbits, orbit i drawn from RNG stream i of `seed`.
pub fn random_orbits(
    sub: &Substitution,
    sampler: &TransversalSampler,
    seed: u64,
    count: usize,
    n_left: usize,
    n_right: usize,
) -> Result<Vec<RandomOrbit>> {
    (0..count)
        .into_par_iter()
        .map(|i| random_orbit(sub, sampler, &mut stream_rng(seed, i as u64), n_left, n_right))
        .collect()
}

/// `count` independent grid supertiles, tile i drawn from RNG stream i of `seed`.
pub fn random_supertiles_2d<'a>(
    sub: &'a Substitution,
    sampler: &TransversalSampler,
    seed: u64,
    count: usize,
    radius: f64,
) -> Result<Vec<Supertile2D<'a>>> {
    (0..count).map(|i| random_supertile_2d(sub, sampler, &mut stream_rng(seed, i as u64), radius)).collect()
}
