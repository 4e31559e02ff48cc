use serde::Serialize;

use super::matrix::{is_primitive, CountMatrix};
use super::normal_form::{normal_form, BlockKind};
use crate::error::{Error, Result};
use crate::scalar::Real;

/// Relative tolerance of the power iteration.
pub const POWER_TOL: f64 = 1e-12;
pub const POWER_MAX_ITER: usize = 100_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Left,
    Right,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Normalization {
    Sum,
    FirstEntry,
    MinEntry,
    /// Σ wᵢ vᵢ = 1
    Weighted(Vec<f64>),
}

impl Normalization {
    pub fn apply<T: Real>(&self, v: &mut [T]) -> Result<()> {
        let s = match self {
            Normalization::Sum => v.iter().fold(T::zero(), |a, &x| a + x),
            Normalization::FirstEntry => v[0],
            Normalization::MinEntry => v.iter().copied().fold(T::infinity(), T::min),
            Normalization::Weighted(w) => {
                if w.len() != v.len() {
                    return Err(Error::Degenerate("weight vector has the wrong length".into()));
                }
                v.iter().zip(w).fold(T::zero(), |a, (&x, &wi)| a + x * T::lit(wi))
            }
        };
        if !(s > T::zero()) || !s.is_finite() {
            return Err(Error::Degenerate(format!("cannot normalize by {:?}", s.as_f64())));
        }
        for x in v.iter_mut() {
            *x = *x / s;
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PerronData<T> {
    pub rho: T,
    pub left: Vec<T>,
    pub right: Vec<T>,
    /// max(|vᵀM − ρvᵀ|∞, |Mw − ρw|∞) after normalization
    pub residual: T,
    pub normalization: Normalization,
}

impl<T: Real> PerronData<T> {
    pub fn vector(&self, side: Side) -> &[T] {
        match side {
            Side::Left => &self.left,
            Side::Right => &self.right,
        }
    }
}

fn effective_tol<T: Real>(tol: T) -> T {
    tol.max(T::epsilon() * T::lit(64.0))
}

/// Power iteration for the dominant eigenpair of M (right) or Mᵀ (left),
/// optionally on I + M. Stops when both ρ and the sum-normalized vector settle.
fn power_iteration<T: Real>(m: &CountMatrix, side: Side, shift: bool, tol: T) -> Result<(T, Vec<T>)> {
    let n = m.n();
    let tol = effective_tol(tol);
    let s = if shift { T::one() } else { T::zero() };
    let step = |v: &[T]| -> Vec<T> {
        let mut w = match side {
            Side::Right => m.mul_vec(v),
            Side::Left => m.vec_mul(v),
        };
        for (wi, &vi) in w.iter_mut().zip(v) {
            *wi = *wi + s * vi;
        }
        w
    };
    let mut v = vec![T::one() / T::lit(n as f64); n];
    let mut rho = T::zero();
    let (mut lo, mut hi) = (T::zero(), T::infinity());
    for it in 0..POWER_MAX_ITER {
        let w = step(&v);
        let total = w.iter().fold(T::zero(), |a, &x| a + x);
        if !(total > T::zero()) {
            return Ok((T::zero(), v));
        }
        let next_rho = total - s;
        let mut delta = T::zero();
        lo = T::infinity();
        hi = T::zero();
        let mut nv = Vec::with_capacity(n);
        for (i, &wi) in w.iter().enumerate() {
            let x = wi / total;
            delta = delta.max((x - v[i]).abs());
            if v[i] > T::zero() {
                let r = wi / v[i] - s;
                lo = lo.min(r);
                hi = hi.max(r);
            }
            nv.push(x);
        }
        v = nv;
        let settled = (next_rho - rho).abs() <= tol * next_rho.abs().max(T::min_positive_value()) && delta <= tol;
        rho = next_rho;
        if settled && it > 0 {
            return Ok((rho, v));
        }
    }
    Err(Error::NoConvergence { iterations: POWER_MAX_ITER, lower: lo.as_f64(), upper: hi.as_f64() })
}

/// ρ(M) as the largest radius among the diagonal blocks of the normal form.
pub fn spectral_radius<T: Real>(m: &CountMatrix, tol: T) -> Result<T> {
    let bs = normal_form(m);
    let mut best = T::zero();
    for (b, kind) in bs.blocks.iter().zip(&bs.kinds) {
        best = best.max(block_radius(&m.submatrix(b), *kind, tol)?);
    }
    Ok(best)
}

pub(crate) fn block_radius<T: Real>(block: &CountMatrix, kind: BlockKind, tol: T) -> Result<T> {
    match kind {
        BlockKind::Zero => Ok(T::zero()),
        _ if block.n() == 1 => Ok(T::lit(block.get(0, 0) as f64)),
        BlockKind::Primitive => power_iteration(block, Side::Right, false, tol).map(|r| r.0),
        BlockKind::IrreducibleImprimitive => power_iteration(block, Side::Right, true, tol).map(|r| r.0),
    }
}

fn residual<T: Real>(m: &CountMatrix, side: Side, rho: T, v: &[T]) -> T {
    let w = match side {
        Side::Right => m.mul_vec(v),
        Side::Left => m.vec_mul(v),
    };
    w.iter().zip(v).fold(T::zero(), |a, (&wi, &vi)| a.max((wi - rho * vi).abs()))
}

/// Left and right Perron vectors of a primitive block.
pub fn perron_vectors<T: Real>(block: &CountMatrix, normalization: Normalization) -> Result<PerronData<T>> {
    if !is_primitive(block) {
        return Err(Error::NotPrimitive);
    }
    let tol = T::lit(POWER_TOL);
    let (rho, mut right) = power_iteration(block, Side::Right, false, tol)?;
    let (rho_l, mut left) = power_iteration(block, Side::Left, false, tol)?;
    let rho = (rho + rho_l) / T::lit(2.0);
    normalization.apply(&mut right)?;
    normalization.apply(&mut left)?;
    let res = residual(block, Side::Left, rho, &left).max(residual(block, Side::Right, rho, &right));
    if left.iter().chain(&right).any(|&x| !(x > T::zero())) {
        return Err(Error::Degenerate("Perron vector is not strictly positive".into()));
    }
    Ok(PerronData { rho, left, right, residual: res, normalization })
}

/// Dominant eigenvector of a possibly reducible matrix, iterating on I + M.
/// Returns (ρ, vector, residual). Left vectors must be strictly positive.
pub fn dominant_vector<T: Real>(m: &CountMatrix, side: Side, normalization: &Normalization) -> Result<(T, Vec<T>, T)> {
    let (rho, mut v) = power_iteration(m, side, true, T::lit(POWER_TOL))?;
    // Components that only decay geometrically are exact zeros in the limit.
    let floor = v.iter().copied().fold(T::zero(), T::max) * T::lit(1e-9);
    for x in v.iter_mut() {
        if *x < floor {
            *x = T::zero();
        }
    }
    if side == Side::Left && v.iter().any(|&x| !(x > T::zero())) {
        return Err(Error::Degenerate("no strictly positive left eigenvector".into()));
    }
    normalization.apply(&mut v)?;
    let res = residual(m, side, rho, &v);
    Ok((rho, v, res))
}
