//! Everything derived from one admissible substitution, computed once.

use crate::ergodic::{measure_normalization, transverse_weights, MeasureNormalization, Observable, TransversalSampler, TransverseWeights};
use crate::error::{Error, Result};
use crate::gdifs::{build_graph, DensityConfig, GdifsGraph, MassVector};
use crate::spectral::{admissibility_report, dominant_vector, AdmissibilityOptions, AdmissibilityReport, Normalization, Side};
use crate::subcore::{Letter, Substitution, SystemSpec};
use crate::tiling::{suspension_lengths, LengthVector};

#[derive(Clone, Debug)]
pub struct Model {
    pub sub: Substitution,
    pub report: AdmissibilityReport,
    pub graph: GdifsGraph<f64>,
    /// Tile lengths (dimension one only).
    pub xi_len: Option<LengthVector<f64>>,
    pub b_mask: Vec<bool>,
    pub rho_a: f64,
    pub rho_b: f64,
    pub lambda: f64,
    pub alpha: f64,
    pub transverse: TransverseWeights<f64>,
    /// ν([b]) with Σ ξ_b ν([b]) = 1.
    pub norm: MeasureNormalization<f64>,
    /// Masses with Σ ν([b]) h_b = 1.
    pub mass: MassVector<f64>,
}

impl Model {
    pub fn new(sub: Substitution) -> Result<Self> {
        let report = admissibility_report(&SystemSpec::Rules(sub.clone()), AdmissibilityOptions::default())?;
        if !report.is_admissible() {
            return Err(Error::Inadmissible(report.failures.clone()));
        }
        let graph = build_graph::<f64>(&sub)?;
        let xi_len = if sub.dim() == 1 { Some(suspension_lengths::<f64>(&sub)?) } else { None };
        let mut b_mask = vec![false; sub.n_letters()];
        for v in &graph.vertices {
            b_mask[v.index()] = true;
        }
        let transverse = transverse_weights(&graph)?;
        let provisional = MassVector::left_perron(&graph, None)?;
        let norm = measure_normalization(&graph, xi_len.as_ref(), &transverse, &provisional)?;
        let nu: Vec<f64> = norm.nu_cyl.clone();
        let mass = MassVector::left_perron(&graph, Some(&nu))?;
        let norm = MeasureNormalization { c0: mass.total(), gamma: 1.0, ..norm };
        Ok(Model {
            rho_a: report.rho_a.unwrap_or(f64::NAN),
            rho_b: report.rho_b.unwrap_or(f64::NAN),
            lambda: graph.lambda,
            alpha: graph.dimension()?,
            sub,
            report,
            graph,
            xi_len,
            b_mask,
            transverse,
            norm,
            mass,
        })
    }

    pub fn from_spec(spec: &SystemSpec) -> Result<Self> {
        match spec {
            SystemSpec::Rules(s) => Model::new(s.clone()),
            SystemSpec::Matrix(_) => Err(Error::Config("matrix-only systems support analysis only".into())),
        }
    }

    pub fn dim(&self) -> u8 {
        self.sub.dim()
    }

    pub fn b_letters(&self) -> &[Letter] {
        &self.graph.vertices
    }

    pub fn transversal_sampler(&self) -> Result<TransversalSampler> {
        TransversalSampler::new(&self.graph, &self.norm.nu_cyl)
    }

    /// h_b / |tile b| on B-letters: the observable whose integral is Σ ν([b]) h_b = 1.
    pub fn hausdorff_observable(&self) -> Observable {
        let mut w = vec![0.0; self.sub.n_letters()];
        for (v, b) in self.graph.vertices.iter().enumerate() {
            let size = self.xi_len.as_ref().map_or(1.0, |xi| xi.of(*b));
            w[b.index()] = self.mass.h[v] / size;
        }
        Observable { weights: w, formal: false }
    }

    /// 1/ξ_b on B-tiles: the suspension counterpart of the B-letter indicator.
    pub fn b_density_observable(&self) -> Observable {
        let mut w = vec![0.0; self.sub.n_letters()];
        for b in &self.graph.vertices {
            w[b.index()] = self.xi_len.as_ref().map_or(1.0, |xi| 1.0 / xi.of(*b));
        }
        Observable { weights: w, formal: false }
    }

    /// Limiting letter frequencies (right Perron vector of M, summing to 1).
    pub fn letter_frequencies(&self) -> Result<Vec<f64>> {
        Ok(dominant_vector::<f64>(&self.sub.substitution_matrix(), Side::Right, &Normalization::Sum)?.1)
    }

    pub fn density_config(&self, k: usize, replicas: usize, seed: u64) -> DensityConfig {
        DensityConfig::for_dim(self.dim(), k, replicas, seed)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cantor_model() {
        let m = Model::new(Substitution::linear(&["0", "1"], &["000", "101"]).unwrap()).unwrap();
        assert!((m.alpha - 2f64.ln() / 3f64.ln()).abs() < 1e-12);
        assert_eq!(m.b_mask, vec![false, true]);
        assert!((m.mass.h[0] - 1.0).abs() < 1e-12);
        assert!((m.norm.nu_cyl[0] - 1.0).abs() < 1e-12);
        let f = m.letter_frequencies().unwrap();
        assert!((f[0] - 1.0).abs() < 1e-9 && f[1].abs() < 1e-9);
    }

    #[test]
    fn joint_normalization() {
        let m = Model::new(Substitution::linear(&["0", "1"], &["000", "1001"]).unwrap()).unwrap();
        let pairing: f64 = m.norm.nu_cyl.iter().zip(&m.mass.h).map(|(a, b)| a * b).sum();
        assert!((pairing - 1.0).abs() < 1e-12);
        assert!((m.hausdorff_observable().integral(&m.norm) - 0.5).abs() < 1e-9);
    }

    #[test]
    fn inadmissible_is_refused() {
        let s = Substitution::linear(&["0", "1"], &["01", "10"]).unwrap();
        assert!(matches!(Model::new(s), Err(Error::Inadmissible(_))));
    }
}
