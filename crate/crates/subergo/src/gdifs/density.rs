use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::bracket::{bracket_piece, classify, Relation, Window, MAX_BRACKET_DEPTH};
use super::graph::{GdifsGraph, Point};
use super::measure::{MarkovSampler, MassVector, PathPrefix};
use crate::error::{Error, Result};
use crate::rng::stream_rng;
use crate::scalar::Real;

/// Path edges kept beyond the deepest level the estimators look at.
const TAIL_EDGES: usize = 48;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DensityMethod {
    Pointwise,
    Birkhoff,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DensityConfig {
    /// Log-time horizon in units of log λ.
    pub k: usize,
    pub step: f64,
    pub replicas: usize,
    pub points_per_replica: usize,
    /// Cylinder levels below the current zoom level used for brackets.
    pub extra_depth: usize,
    pub window: Window,
    pub seed: u64,
    /// Largest tolerated mean relative half-width of the brackets.
    pub max_relative_width: f64,
}

impl DensityConfig {
    pub fn for_dim(dim: u8, k: usize, replicas: usize, seed: u64) -> Self {
        DensityConfig {
            k,
            step: 1.0 / 32.0,
            replicas,
            points_per_replica: 4,
            extra_depth: if dim == 1 { 12 } else { 5 },
            window: if dim == 1 { Window::Right } else { Window::Ball },
            seed,
            max_relative_width: 0.05,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DensityEstimate {
    pub method: DensityMethod,
    pub alpha: f64,
    pub c_hat: f64,
    /// Standard error across replicas.
    pub stderr: f64,
    /// Mean bracket half-width carried through the time average.
    pub systematic_bound: f64,
    pub k: usize,
    pub step: f64,
    pub replicas: usize,
    pub points_per_replica: usize,
    pub samples: usize,
    pub extra_depth: usize,
    pub window: Window,
    pub seed: u64,
    pub replica_values: Vec<f64>,
}

#[derive(Clone, Copy, Debug)]
struct Piece<T> {
    vertex: usize,
    /// Level-j coordinates of the piece's K origin plus π_j.
    a: Point<T>,
}

/// One η-random point seen at all zoom levels: the level-j coordinates are
/// y = λ^j (z − x), and π_j is x's position inside the level-j cylinder.
struct Zoom<'a, T> {
    g: &'a GdifsGraph<T>,
    mass: &'a MassVector<T>,
    path: PathPrefix,
    pi: Vec<Point<T>>,
    window: Window,
    depth: usize,
}

impl<'a, T: Real> Zoom<'a, T> {
    fn new(g: &'a GdifsGraph<T>, mass: &'a MassVector<T>, path: PathPrefix, window: Window, depth: usize) -> Self {
        let n = path.edges.len();
        let mut pi = vec![[T::zero(), T::zero()]; n + 1];
        for j in (0..n).rev() {
            let u = g.edges[path.edges[j]].u;
            pi[j] = [(pi[j + 1][0] + u[0]) / g.lambda, (pi[j + 1][1] + u[1]) / g.lambda];
        }
        Zoom { g, mass, path, pi, window, depth }
    }

    fn root(&self) -> Vec<Piece<T>> {
        vec![Piece { vertex: self.path.start, a: [T::zero(), T::zero()] }]
    }

    fn relation(&self, p: &Piece<T>, j: usize, r: T) -> Relation {
        let o = self.offset(p, j);
        classify(&self.g.hull[p.vertex].scaled_shifted(T::one(), o), self.window, self.g.dim, r)
    }

    fn offset(&self, p: &Piece<T>, j: usize) -> Point<T> {
        [p.a[0] - self.pi[j][0], p.a[1] - self.pi[j][1]]
    }

    /// Children one level deeper, in level-(j+1) coordinates.
    fn children(&self, p: &Piece<T>, j: usize, out: &mut Vec<Piece<T>>) {
        let ue = self.g.edges[self.path.edges[j]].u;
        let l = self.g.lambda;
        for &k in &self.g.out_edges[p.vertex] {
            let e = &self.g.edges[k];
            out.push(Piece {
                vertex: e.range,
                a: [l * p.a[0] + e.u[0] - ue[0], l * p.a[1] + e.u[1] - ue[1]],
            });
        }
    }

    /// (lower, upper) mass of the radius-r window over a level-j frame, in level-j units.
    fn bracket(&self, frame: &[Piece<T>], j: usize, r: T) -> (T, T) {
        let (mut lo, mut und) = (T::zero(), T::zero());
        for p in frame {
            let (a, b) = bracket_piece(self.g, self.mass, p.vertex, self.offset(p, j), self.window, r, self.depth);
            lo = lo + a;
            und = und + b;
        }
        (lo, lo + und)
    }

    /// Descends from the root to level floor(t), certifying pieces on the way.
    fn pointwise(&self, t: T) -> (T, T, T) {
        let l = self.g.lambda;
        let jt = t.floor().to_usize().unwrap_or(0);
        let rho = self.mass.rho;
        let mut frame = self.root();
        let mut acc = T::zero();
        let mut next = Vec::new();
        for j in 0..jt {
            let r = l.powf(T::lit(j as f64) - t);
            next.clear();
            for p in &frame {
                match self.relation(p, j, r) {
                    Relation::Outside => {}
                    Relation::Inside => acc = acc + self.mass.h[p.vertex] * rho.powi((jt - j) as i32),
                    Relation::Straddle => self.children(p, j, &mut next),
                }
            }
            std::mem::swap(&mut frame, &mut next);
        }
        let r = l.powf(T::lit(jt as f64) - t);
        let (lo, hi) = self.bracket(&frame, jt, r);
        (acc + lo, acc + hi, r)
    }
}

fn trapezoid<T: Real>(values: &[T], h: T) -> T {
    let n = values.len();
    if n < 2 {
        return T::zero();
    }
    let inner = values[1..n - 1].iter().fold(T::zero(), |a, &x| a + x);
    h * (inner + (values[0] + values[n - 1]) / T::lit(2.0))
}

struct PointResult {
    value: f64,
    half_width: f64,
}

fn pointwise_point<T: Real>(z: &Zoom<T>, alpha: T, k: usize, n_steps: usize) -> PointResult {
    let h = T::lit(k as f64) / T::lit(n_steps as f64);
    let (mut vals, mut widths) = (Vec::with_capacity(n_steps + 1), Vec::with_capacity(n_steps + 1));
    for i in 0..=n_steps {
        let t = h * T::lit(i as f64);
        let (lo, hi, r) = z.pointwise(t);
        let norm = z.window.norm(r, alpha);
        vals.push((lo + hi) / (T::lit(2.0) * norm));
        widths.push((hi - lo) / (T::lit(2.0) * norm));
    }
    let kt = T::lit(k as f64);
    PointResult { value: (trapezoid(&vals, h) / kt).as_f64(), half_width: (trapezoid(&widths, h) / kt).as_f64() }
}

/// Keeps one frame of pieces meeting the unit window and zooms it one level per unit
/// of log-time; ψ_j integrates the radii λ^{−s}, s ∈ [0, 1], over the current frame.
fn birkhoff_point<T: Real>(z: &Zoom<T>, alpha: T, k: usize, n_steps: usize) -> PointResult {
    let per_level = (n_steps / k).max(1);
    let h = T::one() / T::lit(per_level as f64);
    let l = z.g.lambda;
    let mut frame = z.root();
    let mut next = Vec::new();
    let (mut total, mut width) = (T::zero(), T::zero());
    for j in 0..k {
        let (mut vals, mut widths) = (Vec::with_capacity(per_level + 1), Vec::with_capacity(per_level + 1));
        for i in 0..=per_level {
            let r = l.powf(T::zero() - h * T::lit(i as f64));
            let (lo, hi) = z.bracket(&frame, j, r);
            let norm = z.window.norm(r, alpha);
            vals.push((lo + hi) / (T::lit(2.0) * norm));
            widths.push((hi - lo) / (T::lit(2.0) * norm));
        }
        total = total + trapezoid(&vals, h);
        width = width + trapezoid(&widths, h);
        next.clear();
        for p in &frame {
            z.children(p, j, &mut next);
        }
        next.retain(|p| z.relation(p, j + 1, T::one()) != Relation::Outside);
        std::mem::swap(&mut frame, &mut next);
    }
    let kt = T::lit(k as f64);
    PointResult { value: (total / kt).as_f64(), half_width: (width / kt).as_f64() }
}

fn validate(cfg: &DensityConfig, g_dim: u8) -> Result<usize> {
    if cfg.k == 0 || cfg.replicas == 0 || cfg.points_per_replica == 0 {
        return Err(Error::Config("k, replicas and points_per_replica must be positive".into()));
    }
    if !(cfg.step > 0.0 && cfg.step <= 1.0) {
        return Err(Error::Config(format!("step {} outside (0, 1]", cfg.step)));
    }
    if cfg.window == Window::Right && g_dim != 1 {
        return Err(Error::Config("the one-sided window needs a 1-D graph".into()));
    }
    if cfg.extra_depth > MAX_BRACKET_DEPTH {
        return Err(Error::DepthCap { requested: cfg.extra_depth, cap: MAX_BRACKET_DEPTH });
    }
    let per_level = (1.0 / cfg.step).round() as usize;
    Ok(per_level * cfg.k)
}

fn estimate<T: Real>(
    g: &GdifsGraph<T>,
    mass: &MassVector<T>,
    cfg: &DensityConfig,
    method: DensityMethod,
) -> Result<DensityEstimate> {
    let n_steps = validate(cfg, g.dim)?;
    let alpha = g.dimension()?;
    let sampler = MarkovSampler::new(g, mass)?;
    let len = cfg.k + cfg.extra_depth + TAIL_EDGES;
    let per_replica: Vec<(f64, f64)> = (0..cfg.replicas)
        .into_par_iter()
        .map(|rep| -> Result<(f64, f64)> {
            let mut rng = stream_rng(cfg.seed, rep as u64);
            let (mut v, mut w) = (0.0, 0.0);
            for _ in 0..cfg.points_per_replica {
                let path = sampler.sample_path(&mut rng, len)?;
                let z = Zoom::new(g, mass, path, cfg.window, cfg.extra_depth);
                let r = match method {
                    DensityMethod::Pointwise => pointwise_point(&z, alpha, cfg.k, n_steps),
                    DensityMethod::Birkhoff => birkhoff_point(&z, alpha, cfg.k, n_steps),
                };
                v += r.value;
                w += r.half_width;
            }
            let p = cfg.points_per_replica as f64;
            Ok((v / p, w / p))
        })
        .collect::<Result<_>>()?;
    let n = per_replica.len() as f64;
    let c_hat = per_replica.iter().map(|r| r.0).sum::<f64>() / n;
    let systematic = per_replica.iter().map(|r| r.1).sum::<f64>() / n;
    let stderr = if per_replica.len() > 1 {
        let var = per_replica.iter().map(|r| (r.0 - c_hat).powi(2)).sum::<f64>() / (n - 1.0);
        (var / n).sqrt()
    } else {
        0.0
    };
    let rel = systematic / c_hat;
    if !(c_hat > 0.0) || rel > cfg.max_relative_width {
        return Err(Error::BracketTooWide { width: rel, depth: cfg.extra_depth, needed: needed_depth(g, alpha.as_f64(), rel, cfg) });
    }
    Ok(DensityEstimate {
        method,
        alpha: alpha.as_f64(),
        c_hat,
        stderr,
        systematic_bound: systematic,
        k: cfg.k,
        step: cfg.step,
        replicas: cfg.replicas,
        points_per_replica: cfg.points_per_replica,
        samples: cfg.replicas * cfg.points_per_replica,
        extra_depth: cfg.extra_depth,
        window: cfg.window,
        seed: cfg.seed,
        replica_values: per_replica.iter().map(|r| r.0).collect(),
    })
}

/// Boundary cylinders lose a factor λ^{−(α − d + 1)} of relative mass per level.
fn needed_depth<T: Real>(g: &GdifsGraph<T>, alpha: f64, rel: f64, cfg: &DensityConfig) -> usize {
    let rate = (alpha - g.dim as f64 + 1.0) * g.lambda.as_f64().ln();
    if !(rate > 0.0) || !rel.is_finite() {
        return MAX_BRACKET_DEPTH;
    }
    let extra = ((rel / cfg.max_relative_width).ln() / rate).ceil().max(1.0) as usize;
    (cfg.extra_depth + extra).min(MAX_BRACKET_DEPTH)
}

/// Average density from η-random points, re-bracketing each ball from the root cylinder.
pub fn average_density_pointwise<T: Real>(g: &GdifsGraph<T>, mass: &MassVector<T>, cfg: &DensityConfig) -> Result<DensityEstimate> {
    estimate(g, mass, cfg, DensityMethod::Pointwise)
}

/// Average density by the zooming (Birkhoff) evaluation of the same integrand.
pub fn average_density_birkhoff<T: Real>(g: &GdifsGraph<T>, mass: &MassVector<T>, cfg: &DensityConfig) -> Result<DensityEstimate> {
    estimate(g, mass, cfg, DensityMethod::Birkhoff)
}

/// `n` attractor points of K_v with v drawn from the normalized masses.
pub fn attractor_points<T: Real, R: Rng + ?Sized>(
    g: &GdifsGraph<T>,
    mass: &MassVector<T>,
    rng: &mut R,
    n: usize,
) -> Result<Vec<Point<f64>>> {
    let sampler = MarkovSampler::new(g, mass)?;
    let terms = (53.0 / g.lambda.as_f64().log2()).ceil() as usize + 1;
    (0..n)
        .map(|_| {
            let p = sampler.sample_path(rng, terms)?;
            let q = super::graph::natural_projection(g, p.edges.iter().copied(), terms).point;
            Ok([q[0].as_f64(), q[1].as_f64()])
        })
        .collect()
}
