use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gdifs::{GdifsGraph, MassVector};
use crate::scalar::Real;
use crate::spectral::{dominant_vector, Normalization, Side};
use crate::subcore::Letter;
use crate::tiling::LengthVector;

/// Right Perron vector of B: the transverse measure of a level-n Q-supertile is
/// xi_tr_Q / ρ(B)ⁿ.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TransverseWeights<T> {
    pub xi_tr: Vec<T>,
    pub rho: T,
    pub normalization: Normalization,
}

pub fn transverse_weights<T: Real>(g: &GdifsGraph<T>) -> Result<TransverseWeights<T>> {
    let normalization = Normalization::Sum;
    let (rho, xi_tr, residual) = dominant_vector::<T>(&g.b_matrix(), Side::Right, &normalization)?;
    if xi_tr.iter().any(|&x| !(x > T::zero())) {
        return Err(Error::Degenerate("transverse weights are not strictly positive".into()));
    }
    if residual > T::lit(1e-9) * rho {
        return Err(Error::Degenerate(format!("transverse weight residual {:?}", residual.as_f64())));
    }
    Ok(TransverseWeights { xi_tr, rho, normalization })
}

/// ν on B-cylinders (Σ_b ξ_b ν([b]) = 1, ξ the tile lengths or unit areas) together
/// with the constants that couple it to the mass vector.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MeasureNormalization<T> {
    pub b_letters: Vec<Letter>,
    pub nu_cyl: Vec<T>,
    /// Σ h
    pub c0: T,
    /// 1 / Σ ν([b]) h_b
    pub gamma: T,
}

impl<T: Real> MeasureNormalization<T> {
    pub fn nu(&self, b: Letter) -> Option<T> {
        self.b_letters.iter().position(|&x| x == b).map(|i| self.nu_cyl[i])
    }
}

pub fn measure_normalization<T: Real>(
    g: &GdifsGraph<T>,
    xi_len: Option<&LengthVector<T>>,
    xi_tr: &TransverseWeights<T>,
    mass: &MassVector<T>,
) -> Result<MeasureNormalization<T>> {
    let size = |v: usize| match xi_len {
        Some(xi) if g.dim == 1 => xi.of(g.vertices[v]),
        _ => T::one(),
    };
    let s = (0..g.n_vertices()).fold(T::zero(), |a, v| a + size(v) * xi_tr.xi_tr[v]);
    if !(s > T::zero()) {
        return Err(Error::Degenerate("transverse weights vanish".into()));
    }
    let nu_cyl: Vec<T> = xi_tr.xi_tr.iter().map(|&x| x / s).collect();
    let pairing = nu_cyl.iter().zip(&mass.h).fold(T::zero(), |a, (&n, &h)| a + n * h);
    if !(pairing > T::zero()) {
        return Err(Error::Degenerate("mass vector vanishes".into()));
    }
    Ok(MeasureNormalization { b_letters: g.vertices.clone(), nu_cyl, c0: mass.total(), gamma: T::one() / pairing })
}

/// A function of the current letter. Weights on A-letters have no finite ν-integral
/// and are refused unless `formal` is set.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Observable {
    pub weights: Vec<f64>,
    pub formal: bool,
}

impl Observable {
    pub fn new(weights: Vec<f64>, b_mask: &[bool], formal: bool) -> Result<Self> {
        if weights.len() != b_mask.len() {
            return Err(Error::Observable(format!("{} weights for {} letters", weights.len(), b_mask.len())));
        }
        if let Some(w) = weights.iter().find(|w| !w.is_finite()) {
            return Err(Error::Observable(format!("weight {w} is not finite")));
        }
        if !formal {
            if let Some(i) = (0..weights.len()).find(|&i| !b_mask[i] && weights[i] != 0.0) {
                return Err(Error::Observable(format!("letter {i} is not a B-letter; pass formal mode to allow it")));
            }
        }
        Ok(Observable { weights, formal })
    }

    pub fn indicator(letters: &[Letter], b_mask: &[bool]) -> Result<Self> {
        let mut w = vec![0.0; b_mask.len()];
        for a in letters {
            *w.get_mut(a.index()).ok_or(Error::LetterOutOfRange(a.index()))? = 1.0;
        }
        Observable::new(w, b_mask, false)
    }

    /// ∫ f dν = Σ_b f(b) ν([b]); A-letters contribute nothing.
    pub fn integral<T: Real>(&self, norm: &MeasureNormalization<T>) -> f64 {
        norm.b_letters.iter().zip(&norm.nu_cyl).map(|(b, n)| self.weights[b.index()] * n.as_f64()).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.weights.iter().all(|&w| w == 0.0)
    }
}
