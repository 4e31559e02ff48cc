use rand::distributions::{Distribution, WeightedIndex};
use rand::Rng;

use super::graph::GdifsGraph;
use crate::error::{Error, Result};
use crate::scalar::{Real, Scalar};
use crate::spectral::{dominant_vector, Normalization, Side};

/// Masses h_v of the natural measure on the attractors K_v: a positive left
/// eigenvector of B for ρ = ρ(B).
#[derive(Clone, Debug, PartialEq)]
pub struct MassVector<T> {
    pub h: Vec<T>,
    pub rho: T,
}

impl<T: Scalar> MassVector<T> {
    /// Checks h B = ρ h to within `tol` (use zero for exact scalars).
    pub fn from_values(g: &GdifsGraph<T>, h: Vec<T>, rho: T, tol: T) -> Result<Self> {
        if h.len() != g.n_vertices() || h.iter().any(|&x| !(x > T::zero())) {
            return Err(Error::Degenerate("mass vector must be positive, one entry per vertex".into()));
        }
        let hb = g.b_matrix().vec_mul(&h);
        for (&lhs, &x) in hb.iter().zip(&h) {
            if (lhs - rho * x).abs() > tol * lhs.abs() {
                return Err(Error::Degenerate("mass vector is not a left eigenvector of B".into()));
            }
        }
        Ok(MassVector { h, rho })
    }

    pub fn total(&self) -> T {
        self.h.iter().fold(T::zero(), |a, &x| a + x)
    }
}

impl<T: Real> MassVector<T> {
    /// Left Perron vector of B, normalized so that Σ w_v h_v = 1 (sum 1 without weights).
    pub fn left_perron(g: &GdifsGraph<T>, weights: Option<&[f64]>) -> Result<Self> {
        let norm = match weights {
            Some(w) => Normalization::Weighted(w.to_vec()),
            None => Normalization::Sum,
        };
        let (rho, h, _) = dominant_vector::<T>(&g.b_matrix(), Side::Left, &norm)?;
        if rho <= T::one() {
            return Err(Error::DegenerateB(rho.as_f64()));
        }
        Ok(MassVector { h, rho })
    }
}

/// A finite path e_0 e_1 … starting at `start`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PathPrefix {
    pub start: usize,
    pub edges: Vec<usize>,
}

impl PathPrefix {
    pub fn end<T>(&self, g: &GdifsGraph<T>) -> usize {
        self.edges.last().map_or(self.start, |&e| g.edges[e].range)
    }

    pub fn is_valid<T>(&self, g: &GdifsGraph<T>) -> bool {
        let mut v = self.start;
        for &e in &self.edges {
            if g.edges[e].source != v {
                return false;
            }
            v = g.edges[e].range;
        }
        true
    }
}

/// Normalized natural measure of the cylinder [path]: h_{r(e_n)} / (Σh · ρ^{n+1}).
pub fn cylinder_measure<T: Scalar>(g: &GdifsGraph<T>, mass: &MassVector<T>, path: &PathPrefix) -> Result<T> {
    if !path.is_valid(g) {
        return Err(Error::Geometry("edges do not form a path".into()));
    }
    let mut m = mass.h[path.end(g)];
    for _ in &path.edges {
        m = m / mass.rho;
    }
    Ok(m / mass.total())
}

/// The Markov chain of the normalized natural measure: start v with probability
/// h_v/Σh, then edge e with probability h_{r(e)}/(ρ h_{s(e)}).
#[derive(Clone, Debug)]
pub struct MarkovSampler {
    start: WeightedIndex<f64>,
    step: Vec<Option<WeightedIndex<f64>>>,
    out: Vec<Vec<usize>>,
    edge_range: Vec<usize>,
}

impl MarkovSampler {
    pub fn new<T: Real>(g: &GdifsGraph<T>, mass: &MassVector<T>) -> Result<Self> {
        let h: Vec<f64> = mass.h.iter().map(|x| x.as_f64()).collect();
        let total: f64 = h.iter().sum();
        let rho = mass.rho.as_f64();
        let start = WeightedIndex::new(h.iter().map(|x| x / total)).map_err(|e| Error::Degenerate(e.to_string()))?;
        let step = g
            .out_edges
            .iter()
            .enumerate()
            .map(|(s, out)| WeightedIndex::new(out.iter().map(|&k| h[g.edges[k].range] / (rho * h[s]))).ok())
            .collect();
        Ok(MarkovSampler {
            start,
            step,
            out: g.out_edges.clone(),
            edge_range: g.edges.iter().map(|e| e.range).collect(),
        })
    }

    pub fn sample_path<R: Rng + ?Sized>(&self, rng: &mut R, len: usize) -> Result<PathPrefix> {
        let v = self.start.sample(rng);
        self.sample_path_from(rng, v, len)
    }

    pub fn sample_path_from<R: Rng + ?Sized>(&self, rng: &mut R, start: usize, len: usize) -> Result<PathPrefix> {
        let mut edges = Vec::with_capacity(len);
        let mut v = start;
        for _ in 0..len {
            let d = self.step[v].as_ref().ok_or_else(|| Error::Degenerate(format!("vertex {v} has no out-edges")))?;
            let e = self.out[v][d.sample(rng)];
            edges.push(e);
            v = self.edge_range[e];
        }
        Ok(PathPrefix { start, edges })
    }
}

/// Point of the attractor K_{path.start} reached by a random path (truncated projection).
pub fn sample_point<T: Real, R: Rng + ?Sized>(g: &GdifsGraph<T>, sampler: &MarkovSampler, rng: &mut R, terms: usize) -> Result<[T; 2]> {
    let p = sampler.sample_path(rng, terms)?;
    Ok(super::graph::natural_projection(g, p.edges.iter().copied(), terms).point)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gdifs::graph::{build_graph, build_graph_with};
    use crate::rng::stream_rng;
    use crate::scalar::Rational;
    use crate::subcore::Substitution;
    use crate::tiling::LengthVector;

    fn cantor_exact() -> GdifsGraph<Rational> {
        let s = Substitution::linear(&["0", "1"], &["000", "101"]).unwrap();
        let xi = LengthVector::exact(vec![Rational::from_integer(1); 2]).unwrap();
        build_graph_with(&s, Some(&xi), Rational::from_integer(3), 8).unwrap()
    }

    #[test]
    fn exact_cylinders_are_self_similar() {
        let g = cantor_exact();
        let two = Rational::from_integer(2);
        let mass = MassVector::from_values(&g, vec![Rational::from_integer(1)], two, Rational::from_integer(0)).unwrap();
        for n in 0..8usize {
            for bits in 0..(1u32 << n) {
                let edges: Vec<usize> = (0..n).map(|i| ((bits >> i) & 1) as usize).collect();
                let mut children = Rational::from_integer(0);
                for e in 0..2 {
                    let mut p = edges.clone();
                    p.push(e);
                    children += cylinder_measure(&g, &mass, &PathPrefix { start: 0, edges: p }).unwrap();
                }
                let parent = cylinder_measure(&g, &mass, &PathPrefix { start: 0, edges }).unwrap();
                assert_eq!(children, parent);
                assert_eq!(parent, Rational::new(1, 1 << n));
            }
        }
    }

    #[test]
    fn wrong_masses_are_rejected() {
        let g = cantor_exact();
        let r = MassVector::from_values(&g, vec![Rational::from_integer(1)], Rational::from_integer(3), Rational::from_integer(0));
        assert!(r.is_err());
    }

    #[test]
    fn sampled_cylinder_frequencies() {
        let s = Substitution::linear(&["0", "1"], &["000", "1001"]).unwrap();
        let g = build_graph::<f64>(&s).unwrap();
        let mass = MassVector::left_perron(&g, None).unwrap();
        let sampler = MarkovSampler::new(&g, &mass).unwrap();
        let mut rng = stream_rng(11, 0);
        let n = 20_000;
        let mut hits = [0usize; 4];
        for _ in 0..n {
            let p = sampler.sample_path(&mut rng, 2).unwrap();
            hits[p.edges[0] * 2 + p.edges[1]] += 1;
        }
        for (i, &h) in hits.iter().enumerate() {
            let path = PathPrefix { start: 0, edges: vec![i / 2, i % 2] };
            let expect = cylinder_measure(&g, &mass, &path).unwrap();
            assert!((h as f64 / n as f64 - expect).abs() < 0.015, "{i}: {h} vs {expect}");
        }
    }

    #[test]
    fn sampled_points_lie_in_the_hull() {
        let s = Substitution::grid(&["0", "1"], &[&["000", "000", "000"], &["111", "101", "111"]]).unwrap();
        let g = build_graph::<f64>(&s).unwrap();
        let mass = MassVector::left_perron(&g, None).unwrap();
        let sampler = MarkovSampler::new(&g, &mass).unwrap();
        let mut rng = stream_rng(5, 1);
        for _ in 0..200 {
            let p = sample_point(&g, &sampler, &mut rng, 30).unwrap();
            assert!(p.iter().all(|c| c.abs() <= 0.5));
        }
    }
}
