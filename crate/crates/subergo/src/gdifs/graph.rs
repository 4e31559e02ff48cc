use crate::error::{Error, Result};
use crate::scalar::{Real, Scalar};
use crate::spectral::{normal_form, spectral_radius, CountMatrix, POWER_TOL};
use crate::subcore::{Letter, Substitution};
use crate::tiling::{suspension_lengths, LengthVector};

pub type Point<T> = [T; 2];

/// Axis-aligned box [lo, hi]; in dimension one the y-extent is [0, 0].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Bbox<T> {
    pub lo: Point<T>,
    pub hi: Point<T>,
}

impl<T: Scalar> Bbox<T> {
    pub fn scaled_shifted(&self, s: T, o: Point<T>) -> Bbox<T> {
        Bbox { lo: [o[0] + s * self.lo[0], o[1] + s * self.lo[1]], hi: [o[0] + s * self.hi[0], o[1] + s * self.hi[1]] }
    }

    fn union(&self, other: &Bbox<T>) -> Bbox<T> {
        let mn = |a: T, b: T| if a <= b { a } else { b };
        let mx = |a: T, b: T| if a >= b { a } else { b };
        Bbox {
            lo: [mn(self.lo[0], other.lo[0]), mn(self.lo[1], other.lo[1])],
            hi: [mx(self.hi[0], other.hi[0]), mx(self.hi[1], other.hi[1])],
        }
    }

    fn contains(&self, other: &Bbox<T>, slack: T) -> bool {
        (0..2).all(|i| other.lo[i] >= self.lo[i] - slack && other.hi[i] <= self.hi[i] + slack)
    }
}

/// Edge s → r: an occurrence of the B-letter r in σ(s), with the contraction
/// f_e(x) = (x + u)/λ.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Edge<T> {
    pub source: usize,
    pub range: usize,
    pub u: Point<T>,
    /// Position of the occurrence inside σ(source) (row-major cell index for grids).
    pub slot: usize,
}

#[derive(Clone, Debug)]
pub struct GdifsGraph<T> {
    pub dim: u8,
    pub lambda: T,
    /// B-letters, one vertex each.
    pub vertices: Vec<Letter>,
    pub vertex_of: Vec<Option<usize>>,
    /// Prototile supports: boxes centered at 0.
    pub support: Vec<Bbox<T>>,
    /// Boxes containing the attractors K_v (tightened from the supports).
    pub hull: Vec<Bbox<T>>,
    pub edges: Vec<Edge<T>>,
    pub out_edges: Vec<Vec<usize>>,
    pub in_edges: Vec<Vec<usize>>,
    /// Some pair of first-level images from one source has overlapping interiors.
    pub overlap: bool,
}

/// How many times the hull boxes are pushed through the IFS.
const HULL_ITERATIONS: usize = 200;

/// Graph of a 1-D (with the suspension lengths) or grid substitution, λ = ρ(A) or q.
pub fn build_graph<T: Real>(sub: &Substitution) -> Result<GdifsGraph<T>> {
    match sub.q() {
        Some(q) => build_graph_with(sub, None, T::lit(q as f64), HULL_ITERATIONS),
        None => {
            let xi = suspension_lengths::<T>(sub)?;
            let m = sub.substitution_matrix();
            let lambda = a_part_radius::<T>(&m)?;
            build_graph_with(sub, Some(&xi), lambda, HULL_ITERATIONS)
        }
    }
}

fn a_part_radius<T: Real>(m: &CountMatrix) -> Result<T> {
    let bs = normal_form(m);
    let a = bs.a_part().ok_or_else(|| Error::MissingBPart("single block".into()))?;
    spectral_radius(&m.submatrix(&a), T::lit(POWER_TOL))
}

/// General constructor; exact scalars pass their own λ and lengths.
pub fn build_graph_with<T: Scalar>(
    sub: &Substitution,
    xi: Option<&LengthVector<T>>,
    lambda: T,
    hull_iterations: usize,
) -> Result<GdifsGraph<T>> {
    let bs = normal_form(&sub.substitution_matrix());
    let b_part = bs.b_part().ok_or_else(|| Error::MissingBPart("single block".into()))?;
    let vertices: Vec<Letter> = b_part.iter().map(|&i| Letter(i as u8)).collect();
    let mut vertex_of = vec![None; sub.n_letters()];
    for (v, a) in vertices.iter().enumerate() {
        vertex_of[a.index()] = Some(v);
    }
    let two = T::from_count(2);
    let tol = T::from_f64(1e-9).unwrap_or_else(T::zero);
    let (dim, support) = match (sub.q(), xi) {
        (Some(_), _) => {
            let h = T::one() / two;
            (2u8, vertices.iter().map(|_| Bbox { lo: [T::zero() - h, T::zero() - h], hi: [h, h] }).collect::<Vec<_>>())
        }
        (None, Some(xi)) => (
            1u8,
            vertices
                .iter()
                .map(|&a| {
                    let h = xi.of(a) / two;
                    Bbox { lo: [T::zero() - h, T::zero()], hi: [h, T::zero()] }
                })
                .collect(),
        ),
        (None, None) => return Err(Error::Geometry("1-D graphs need tile lengths".into())),
    };

    let mut edges = Vec::new();
    for (s, &a) in vertices.iter().enumerate() {
        let img = sub.image(a);
        match sub.q() {
            None => {
                let xi = xi.unwrap();
                let total = lambda * xi.of(a);
                let mut left = T::zero() - total / two;
                for (slot, &c) in img.iter().enumerate() {
                    let center = left + xi.of(c) / two;
                    if let Some(r) = vertex_of[c.index()] {
                        edges.push(Edge { source: s, range: r, u: [center, T::zero()], slot });
                    }
                    left = left + xi.of(c);
                }
                let mismatch = (left - total / two).abs();
                if mismatch > tol * total.abs() {
                    return Err(Error::Geometry(format!(
                        "images of letter {} do not tile the inflated interval",
                        sub.alphabet().label(a)
                    )));
                }
            }
            Some(q) => {
                let half = T::from_count(q as u64 - 1) / two;
                for (slot, &c) in img.iter().enumerate() {
                    if let Some(r) = vertex_of[c.index()] {
                        let (i, j) = (slot / q, slot % q);
                        let u = [T::from_count(j as u64) - half, half - T::from_count(i as u64)];
                        edges.push(Edge { source: s, range: r, u, slot });
                    }
                }
            }
        }
    }
    let nv = vertices.len();
    let mut out_edges = vec![Vec::new(); nv];
    let mut in_edges = vec![Vec::new(); nv];
    for (k, e) in edges.iter().enumerate() {
        out_edges[e.source].push(k);
        in_edges[e.range].push(k);
    }

    let mut g = GdifsGraph {
        dim,
        lambda,
        vertices,
        vertex_of,
        hull: support.clone(),
        support,
        edges,
        out_edges,
        in_edges,
        overlap: false,
    };
    for e in &g.edges {
        let img = g.image_box(e, &g.support[e.range]);
        if !g.support[e.source].contains(&img, tol) {
            return Err(Error::Geometry(format!("edge image escapes the support of vertex {}", e.source)));
        }
    }
    g.tighten_hulls(hull_iterations);
    g.overlap = g.detect_overlap();
    Ok(g)
}

impl<T: Scalar> GdifsGraph<T> {
    pub fn n_vertices(&self) -> usize {
        self.vertices.len()
    }

    /// f_e(box) = (box + u_e)/λ
    pub fn image_box(&self, e: &Edge<T>, b: &Bbox<T>) -> Bbox<T> {
        let inv = T::one() / self.lambda;
        b.scaled_shifted(inv, [e.u[0] * inv, e.u[1] * inv])
    }

    /// Restricted count matrix B in vertex order: entry (r, s) = number of edges s → r.
    pub fn b_matrix(&self) -> CountMatrix {
        let mut m = CountMatrix::zeros(self.n_vertices());
        for e in &self.edges {
            m.add(e.range, e.source, 1);
        }
        m
    }

    fn tighten_hulls(&mut self, iterations: usize) {
        for _ in 0..iterations {
            let next: Vec<Bbox<T>> = (0..self.n_vertices())
                .map(|v| {
                    self.out_edges[v]
                        .iter()
                        .map(|&k| self.image_box(&self.edges[k], &self.hull[self.edges[k].range]))
                        .reduce(|a, b| a.union(&b))
                        .unwrap_or(self.hull[v])
                })
                .collect();
            if next == self.hull {
                break;
            }
            self.hull = next;
        }
    }

    fn detect_overlap(&self) -> bool {
        let axes = if self.dim == 1 { 1 } else { 2 };
        self.out_edges.iter().any(|out| {
            out.iter().enumerate().any(|(i, &a)| {
                out[i + 1..].iter().any(|&b| {
                    let (ea, eb) = (&self.edges[a], &self.edges[b]);
                    let ba = self.image_box(ea, &self.hull[ea.range]);
                    let bb = self.image_box(eb, &self.hull[eb.range]);
                    (0..axes).all(|k| ba.lo[k] < bb.hi[k] && bb.lo[k] < ba.hi[k])
                })
            })
        })
    }
}

impl<T: Real> GdifsGraph<T> {
    pub fn rho_b(&self) -> Result<T> {
        spectral_radius(&self.b_matrix(), T::lit(POWER_TOL))
    }

    /// α = log ρ(B)/log λ; a degenerate ρ(B) ≤ 1 gives 0 with a warning.
    pub fn dimension(&self) -> Result<T> {
        let rho = self.rho_b()?;
        if rho <= T::one() {
            log::warn!("rho(B) = {:?} <= 1, dimension is degenerate", rho.as_f64());
            return Ok(T::zero());
        }
        Ok(rho.ln() / self.lambda.ln())
    }
}

/// Truncated π₊: Σ_{n<terms} λ^{−n−1} u_{e_n}, with a bound on the omitted tail
/// (sup norm, per coordinate).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Projection<T> {
    pub point: Point<T>,
    pub tail_bound: T,
}

pub fn natural_projection<T: Scalar>(g: &GdifsGraph<T>, path: impl IntoIterator<Item = usize>, terms: usize) -> Projection<T> {
    let inv = T::one() / g.lambda;
    let mut scale = inv;
    let mut point = [T::zero(), T::zero()];
    for k in path.into_iter().take(terms) {
        let u = g.edges[k].u;
        point = [point[0] + scale * u[0], point[1] + scale * u[1]];
        scale = scale * inv;
    }
    let umax = g.edges.iter().fold(T::zero(), |m, e| {
        let a = e.u[0].abs().max_with(e.u[1].abs());
        a.max_with(m)
    });
    // λ^{−n} · max|u| / (λ − 1) for n used terms; `scale` is λ^{−n−1} here.
    let tail_bound = scale * g.lambda * umax / (g.lambda - T::one());
    Projection { point, tail_bound }
}

trait MaxWith {
    fn max_with(self, other: Self) -> Self;
}

impl<T: PartialOrd> MaxWith for T {
    fn max_with(self, other: Self) -> Self {
        if self >= other {
            self
        } else {
            other
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Rational;

    fn cantor() -> Substitution {
        Substitution::linear(&["0", "1"], &["000", "101"]).unwrap()
    }

    fn carpet() -> Substitution {
        Substitution::grid(&["0", "1"], &[&["000", "000", "000"], &["111", "101", "111"]]).unwrap()
    }

    #[test]
    fn cantor_graph() {
        let g = build_graph::<f64>(&cantor()).unwrap();
        assert_eq!(g.n_vertices(), 1);
        let us: Vec<f64> = g.edges.iter().map(|e| e.u[0]).collect();
        assert_eq!(us, vec![-1.0, 1.0]);
        assert_eq!(g.hull[0], Bbox { lo: [-0.5, 0.0], hi: [0.5, 0.0] });
        assert!(!g.overlap);
        assert!((g.dimension().unwrap() - 2f64.ln() / 3f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn carpet_graph() {
        let g = build_graph::<f64>(&carpet()).unwrap();
        let mut us: Vec<(i32, i32)> = g.edges.iter().map(|e| (e.u[0] as i32, e.u[1] as i32)).collect();
        us.sort();
        let mut expected: Vec<(i32, i32)> =
            (-1..=1).flat_map(|x| (-1..=1).map(move |y| (x, y))).filter(|&p| p != (0, 0)).collect();
        expected.sort();
        assert_eq!(us, expected);
        assert!(!g.overlap);
        let a = g.dimension().unwrap();
        assert!((3f64.powf(a) / 8.0 - 1.0).abs() < 1e-12);
    }

    #[test]
    fn cantor1001_graph_exact() {
        let s = Substitution::linear(&["0", "1"], &["000", "1001"]).unwrap();
        let xi = LengthVector::exact(vec![Rational::from_integer(1), Rational::from_integer(2)]).unwrap();
        let g = build_graph_with(&s, Some(&xi), Rational::from_integer(3), 10).unwrap();
        let us: Vec<Rational> = g.edges.iter().map(|e| e.u[0]).collect();
        assert_eq!(us, vec![Rational::from_integer(-2), Rational::from_integer(2)]);
    }

    #[test]
    fn wrong_lengths_are_rejected() {
        let xi = LengthVector::exact(vec![1.0, 2.0]).unwrap();
        assert!(matches!(build_graph_with(&cantor(), Some(&xi), 3.0, 0), Err(Error::Geometry(_))));
    }

    #[test]
    fn projections_of_constant_paths() {
        let g = build_graph::<f64>(&cantor()).unwrap();
        let p = natural_projection(&g, std::iter::repeat(0), 60);
        assert!((p.point[0] + 0.5).abs() < 1e-15 && p.tail_bound < 1e-20);
        let p = natural_projection(&g, std::iter::repeat(1), 60);
        assert!((p.point[0] - 0.5).abs() < 1e-15);

        let gc = build_graph::<f64>(&carpet()).unwrap();
        let k = gc.edges.iter().position(|e| e.u == [1.0, 1.0]).unwrap();
        let p = natural_projection(&gc, std::iter::repeat(k), 60);
        assert!((p.point[0] - 0.5).abs() < 1e-15 && (p.point[1] - 0.5).abs() < 1e-15);

        // exact partial sums: 3 terms of the u = −1 loop give −(1/3 + 1/9 + 1/27)
        let xi = LengthVector::exact(vec![Rational::from_integer(1); 2]).unwrap();
        let ge = build_graph_with(&cantor(), Some(&xi), Rational::from_integer(3), 4).unwrap();
        let p = natural_projection(&ge, [0, 0, 0], 3);
        assert_eq!(p.point[0], Rational::new(-13, 27));
        assert_eq!(p.tail_bound, Rational::new(1, 54));
    }

    #[test]
    fn degenerate_dimension_is_zero() {
        let s = Substitution::linear(&["0", "1"], &["00", "10"]).unwrap();
        let g = build_graph::<f64>(&s).unwrap();
        assert_eq!(g.dimension().unwrap(), 0.0);
    }
}
