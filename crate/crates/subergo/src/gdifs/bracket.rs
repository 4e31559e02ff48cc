use serde::{Deserialize, Serialize};

use super::graph::{Bbox, GdifsGraph, Point};
use super::measure::MassVector;
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Deepest cylinder level a bracket may descend to.
pub const MAX_BRACKET_DEPTH: usize = 48;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Window {
    /// Closed ball of radius r (Euclidean in the plane), normalized by (2r)^α.
    Ball,
    /// One-sided interval [x, x + r] on the line, normalized by r^α.
    Right,
}

impl Window {
    pub fn norm<T: Scalar + num_traits::Float>(self, r: T, alpha: T) -> T {
        match self {
            Window::Ball => (r + r).powf(alpha),
            Window::Right => r.powf(alpha),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Relation {
    Inside,
    Outside,
    Straddle,
}

/// Position of a box relative to the window of radius r anchored at the origin.
pub fn classify<T: Scalar>(b: &Bbox<T>, window: Window, dim: u8, r: T) -> Relation {
    let zero = T::zero();
    match (window, dim) {
        (Window::Right, _) => {
            if b.hi[0] < zero || b.lo[0] > r {
                Relation::Outside
            } else if b.lo[0] >= zero && b.hi[0] <= r {
                Relation::Inside
            } else {
                Relation::Straddle
            }
        }
        (Window::Ball, 1) => {
            if b.hi[0] < zero - r || b.lo[0] > r {
                Relation::Outside
            } else if b.lo[0] >= zero - r && b.hi[0] <= r {
                Relation::Inside
            } else {
                Relation::Straddle
            }
        }
        (Window::Ball, _) => {
            let mut near = zero;
            let mut far = zero;
            for i in 0..2 {
                let (lo, hi) = (b.lo[i], b.hi[i]);
                let n = if lo > zero {
                    lo
                } else if hi < zero {
                    zero - hi
                } else {
                    zero
                };
                let f = if lo.abs() > hi.abs() { lo.abs() } else { hi.abs() };
                near = near + n * n;
                far = far + f * f;
            }
            let r2 = r * r;
            if near > r2 {
                Relation::Outside
            } else if far <= r2 {
                Relation::Inside
            } else {
                Relation::Straddle
            }
        }
    }
}

/// Bracket for the η-mass of the window around `offset`'s origin, summing over the
/// cylinders of `vertex` placed at `offset` with unit scale. Masses are in the units
/// of `mass` (K_v carries h_v). Returns (certified inside, undecided).
pub(crate) fn bracket_piece<T: Scalar>(
    g: &GdifsGraph<T>,
    mass: &MassVector<T>,
    vertex: usize,
    offset: Point<T>,
    window: Window,
    r: T,
    depth: usize,
) -> (T, T) {
    let inv = T::one() / g.lambda;
    let (mut inside, mut undecided) = (T::zero(), T::zero());
    // (vertex, offset, scale, mass, level)
    let mut stack = vec![(vertex, offset, T::one(), mass.h[vertex], 0usize)];
    while let Some((v, o, s, m, n)) = stack.pop() {
        let b = g.hull[v].scaled_shifted(s, o);
        match classify(&b, window, g.dim, r) {
            Relation::Outside => {}
            Relation::Inside => inside = inside + m,
            Relation::Straddle if n == depth => undecided = undecided + m,
            Relation::Straddle => {
                let cs = s * inv;
                for &k in &g.out_edges[v] {
                    let e = &g.edges[k];
                    let co = [o[0] + cs * e.u[0], o[1] + cs * e.u[1]];
                    stack.push((e.range, co, cs, mass.h[e.range] * m / (mass.h[v] * mass.rho), n + 1));
                }
            }
        }
    }
    (inside, undecided)
}

/// (lower, upper) for η_vertex of the window of radius r at x, K_vertex placed around
/// 0 with total mass h_vertex.
pub fn ball_measure_bracket<T: Scalar>(
    g: &GdifsGraph<T>,
    mass: &MassVector<T>,
    vertex: usize,
    x: Point<T>,
    r: T,
    depth: usize,
    window: Window,
) -> Result<(T, T)> {
    if depth > MAX_BRACKET_DEPTH {
        return Err(Error::DepthCap { requested: depth, cap: MAX_BRACKET_DEPTH });
    }
    if vertex >= g.n_vertices() {
        return Err(Error::Geometry(format!("no vertex {vertex}")));
    }
    let (lo, und) = bracket_piece(g, mass, vertex, [T::zero() - x[0], T::zero() - x[1]], window, r, depth);
    Ok((lo, lo + und))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gdifs::graph::{build_graph, build_graph_with};
    use crate::rng::stream_rng;
    use crate::scalar::Rational;
    use crate::subcore::Substitution;
    use crate::tiling::LengthVector;
    use rand::Rng;

    fn cantor() -> Substitution {
        Substitution::linear(&["0", "1"], &["000", "101"]).unwrap()
    }

    fn cantor_f64() -> (GdifsGraph<f64>, MassVector<f64>) {
        let g = build_graph::<f64>(&cantor()).unwrap();
        let m = MassVector::left_perron(&g, None).unwrap();
        (g, m)
    }

    /// Cantor function on [−1/2, 1/2] from the ternary digits of x + 1/2, exact.
    fn cantor_cdf(x: Rational) -> Rational {
        let half = Rational::new(1, 2);
        let mut y = x + half;
        if y <= Rational::from_integer(0) {
            return Rational::from_integer(0);
        }
        if y >= Rational::from_integer(1) {
            return Rational::from_integer(1);
        }
        let (mut acc, mut w) = (Rational::from_integer(0), Rational::new(1, 2));
        for _ in 0..30 {
            y *= Rational::from_integer(3);
            let d = y.floor();
            y -= d;
            match d.to_integer() {
                0 => {}
                1 => return acc + w,
                _ => acc += w,
            }
            w /= Rational::from_integer(2);
            if y == Rational::from_integer(0) {
                break;
            }
        }
        acc
    }

    #[test]
    fn cantor_oracle_sanity() {
        assert_eq!(cantor_cdf(Rational::new(-1, 2)), Rational::from_integer(0));
        assert_eq!(cantor_cdf(Rational::new(-1, 6)), Rational::new(1, 2));
        assert_eq!(cantor_cdf(Rational::new(1, 6)), Rational::new(1, 2));
        assert_eq!(cantor_cdf(Rational::new(-1, 2) + Rational::new(1, 9)), Rational::new(1, 4));
    }

    #[test]
    fn left_endpoint_balls_are_exact() {
        let xi = LengthVector::exact(vec![Rational::from_integer(1); 2]).unwrap();
        let g = build_graph_with(&cantor(), Some(&xi), Rational::from_integer(3), 8).unwrap();
        let one = Rational::from_integer(1);
        let mass = MassVector::from_values(&g, vec![one], Rational::from_integer(2), Rational::from_integer(0)).unwrap();
        let x = [Rational::new(-1, 2), Rational::from_integer(0)];
        for m in 0..6u32 {
            let r = Rational::new(1, 3i64.pow(m));
            let exact = cantor_cdf(x[0] + r) - cantor_cdf(x[0] - r);
            assert_eq!(exact, Rational::new(1, 2i64.pow(m)));
            let (lo, hi) = ball_measure_bracket(&g, &mass, 0, x, r, m as usize + 2, Window::Ball).unwrap();
            assert_eq!((lo, hi), (exact, exact), "m = {m}");
        }
    }

    #[test]
    fn brackets_contain_the_exact_measure() {
        let (g, mass) = cantor_f64();
        let mut rng = stream_rng(3, 0);
        for _ in 0..300 {
            let xr = Rational::new(rng.gen_range(-6000..6000), 10_000);
            let rr = Rational::new(rng.gen_range(0..7000), 10_000);
            let exact = (cantor_cdf(xr + rr) - cantor_cdf(xr - rr)).to_f64();
            let (lo, hi) = ball_measure_bracket(&g, &mass, 0, [xr.to_f64(), 0.0], rr.to_f64(), 14, Window::Ball).unwrap();
            assert!(lo <= exact + 1e-12 && exact <= hi + 1e-12, "{lo} {exact} {hi}");
            assert!(hi - lo <= 2.0 * 0.5f64.powi(14) + 1e-12);
        }
    }

    trait ToF64 {
        fn to_f64(&self) -> f64;
    }

    impl ToF64 for Rational {
        fn to_f64(&self) -> f64 {
            *self.numer() as f64 / *self.denom() as f64
        }
    }

    #[test]
    fn whole_attractor_and_empty_radius() {
        let (g, mass) = cantor_f64();
        assert_eq!(ball_measure_bracket(&g, &mass, 0, [0.1, 0.0], 2.0, 3, Window::Ball).unwrap(), (1.0, 1.0));
        let mut prev = f64::INFINITY;
        for d in [2, 6, 10, 14] {
            let (lo, hi) = ball_measure_bracket(&g, &mass, 0, [0.5 / 3.0 + 1.0 / 9.0, 0.0], 0.0, d, Window::Ball).unwrap();
            assert_eq!(lo, 0.0);
            assert!(hi <= prev);
            prev = hi;
        }
        assert!(prev <= 0.5f64.powi(13));
        assert!(matches!(
            ball_measure_bracket(&g, &mass, 0, [0.0, 0.0], 0.1, MAX_BRACKET_DEPTH + 1, Window::Ball),
            Err(Error::DepthCap { .. })
        ));
    }

    #[test]
    fn right_window() {
        let (g, mass) = cantor_f64();
        // [−1/2, −1/2 + 1/3] is exactly the left first-level cylinder.
        let (lo, hi) = ball_measure_bracket(&g, &mass, 0, [-0.5, 0.0], 1.0 / 3.0 + 1e-12, 6, Window::Right).unwrap();
        assert!((lo - 0.5).abs() < 1e-12 && (hi - 0.5).abs() < 1e-12);
    }

    #[test]
    fn disk_classification() {
        let b = Bbox { lo: [0.5, 0.5], hi: [0.6, 0.6] };
        assert_eq!(classify(&b, Window::Ball, 2, 1.0), Relation::Inside);
        assert_eq!(classify(&b, Window::Ball, 2, 0.8), Relation::Straddle);
        assert_eq!(classify(&b, Window::Ball, 2, 0.7), Relation::Outside);
        let c = Bbox { lo: [-0.1, -2.0], hi: [0.1, -1.5] };
        assert_eq!(classify(&c, Window::Ball, 2, 1.4), Relation::Outside);
        assert_eq!(classify(&c, Window::Ball, 2, 1.6), Relation::Straddle);
    }
}
