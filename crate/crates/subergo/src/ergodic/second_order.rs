use super::normalization::{MeasureNormalization, Observable};
use super::series::{integer_grid, real_grid, Series, SeriesKind};
use super::sums::birkhoff_prefix_sums;
use crate::error::{Error, Result};
use crate::subcore::Letter;
use crate::tiling::{LengthVector, Supertile2D, Tiling1DWindow};

fn check_constants(alpha: f64, c: f64) -> Result<()> {
    if !(c > 0.0) || !c.is_finite() {
        return Err(Error::Config(format!("density constant c = {c} must be positive")));
    }
    if !(alpha > 0.0) {
        return Err(Error::Config(format!("alpha = {alpha} must be positive")));
    }
    Ok(())
}

/// (1/log n) Σ_{k≤n} S_k f / (c k^{α+1}) with S_k f = f(x_1) + … + f(x_k); `after_origin`
/// is x_1 x_2 …. Every k is summed; the grid only picks report points.
pub fn second_order_symbolic(
    after_origin: &[Letter],
    f: &Observable,
    alpha: f64,
    c: f64,
    n_max: usize,
    norm: &MeasureNormalization<f64>,
) -> Result<Series> {
    check_constants(alpha, c)?;
    let s = birkhoff_prefix_sums(after_origin, &f.weights, n_max)?;
    let grid = integer_grid(n_max);
    let mut partials = Vec::with_capacity(grid.len());
    let mut acc = 0.0;
    let mut gi = 0;
    for k in 1..=n_max {
        acc += s[k] * (k as f64).powf(-alpha - 1.0);
        if gi < grid.len() && grid[gi] == k {
            partials.push(acc / (c * (k as f64).ln()));
            gi += 1;
        }
    }
    Ok(Series {
        kind: SeriesKind::Symbolic,
        grid: grid.into_iter().map(|n| n as f64).collect(),
        partials,
        target: f.integral(norm),
        alpha,
        c_used: c,
    })
}

/// ∫_{r1}^{r2} R^{−α−1} dR and ∫_{r1}^{r2} R^{−α} dR.
fn power_integrals(r1: f64, r2: f64, alpha: f64) -> (f64, f64) {
    let q = (r1.powf(-alpha) - r2.powf(-alpha)) / alpha;
    let p = if (alpha - 1.0).abs() < 1e-12 { (r2 / r1).ln() } else { (r2.powf(1.0 - alpha) - r1.powf(1.0 - alpha)) / (1.0 - alpha) };
    (q, p)
}

/// One-sided suspension version: (1/log t) ∫_1^t (∫_0^R F(T − u) du) / (c R^{α+1}) dR,
/// with F given per tile letter. The inner integral is piecewise linear in R and both
/// integrals are evaluated in closed form. Target Σ_b F(b) ξ_b ν([b]).
pub fn second_order_tiling_1d(
    win: &Tiling1DWindow<f64>,
    f: &Observable,
    xi: &LengthVector<f64>,
    alpha: f64,
    c: f64,
    t_max: f64,
    norm: &MeasureNormalization<f64>,
) -> Result<Series> {
    check_constants(alpha, c)?;
    if t_max > win.right_extent() {
        return Err(Error::Coverage { needed: t_max, available: win.right_extent() });
    }
    let grid = real_grid(t_max);
    let mut partials = Vec::with_capacity(grid.len());
    let mut gi = 0;
    let mut inner = 0.0; // ∫_0^{lo} F
    let mut outer = 0.0; // ∫_1^{lo} inner(R) R^{−α−1} dR
    let mut i = 0isize;
    while gi < grid.len() {
        let (a, l, r) = win.tile(i).ok_or(Error::Coverage { needed: t_max, available: win.right_extent() })?;
        i += 1;
        if r <= 0.0 {
            continue;
        }
        let w = f.weights[a.index()];
        let lo = l.max(0.0);
        // inner(R) = inner + w (R − lo) on [lo, r]
        let piece = |r1: f64, r2: f64| -> f64 {
            let (r1, r2) = (r1.max(1.0), r2.max(1.0));
            if r2 <= r1 {
                return 0.0;
            }
            let (q, p) = power_integrals(r1, r2, alpha);
            inner * q + w * (p - lo * q)
        };
        while gi < grid.len() && grid[gi] <= r {
            let t = grid[gi];
            partials.push((outer + piece(lo, t)) / (c * t.ln()));
            gi += 1;
        }
        outer += piece(lo, r);
        inner += w * (r - lo);
    }
    let target = norm.b_letters.iter().zip(&norm.nu_cyl).map(|(b, nu)| f.weights[b.index()] * xi.of(*b) * nu).sum();
    Ok(Series { kind: SeriesKind::Tiling1d, grid, partials, target, alpha, c_used: c })
}

/// (1/log t) ∫_1^t V_R / (c (2R)^α) dR/R for the grid tiling, V_R = Σ g over cells whose
/// closed square lies in the closed ball B_R about the origin. Each cell at far-corner
/// distance d contributes g (max(1,d)^{−α} − t^{−α})/α exactly. Target Σ_b g(b) ν([b]).
pub fn second_order_tiling_2d(
    tile: &Supertile2D,
    g: &Observable,
    alpha: f64,
    c: f64,
    r_max: f64,
    norm: &MeasureNormalization<f64>,
) -> Result<Series> {
    check_constants(alpha, c)?;
    let mask: Vec<bool> = g.weights.iter().map(|&w| w != 0.0).collect();
    let mut cells: Vec<(f64, f64)> = Vec::new();
    tile.for_each_cell_in_ball(&mask, r_max, |dx, dy, a| {
        let fx = dx.unsigned_abs() as f64 + 0.5;
        let fy = dy.unsigned_abs() as f64 + 0.5;
        cells.push(((fx * fx + fy * fy).sqrt(), g.weights[a.index()]));
    })?;
    cells.sort_by(|a, b| a.0.total_cmp(&b.0));
    let grid = real_grid(r_max);
    let mut partials = Vec::with_capacity(grid.len());
    let (mut sum_w, mut sum_wd) = (0.0, 0.0);
    let mut k = 0;
    let scale = c * 2f64.powf(alpha) * alpha;
    for &t in &grid {
        while k < cells.len() && cells[k].0 <= t {
            let (d, w) = cells[k];
            sum_w += w;
            sum_wd += w * d.max(1.0).powf(-alpha);
            k += 1;
        }
        partials.push((sum_wd - t.powf(-alpha) * sum_w) / (scale * t.ln()));
    }
    Ok(Series { kind: SeriesKind::Tiling2d, grid, partials, target: g.integral(norm), alpha, c_used: c })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tiling::window_from_sequence;

    fn cantor_norm() -> MeasureNormalization<f64> {
        MeasureNormalization { b_letters: vec![Letter(1)], nu_cyl: vec![1.0], c0: 1.0, gamma: 1.0 }
    }

    fn word(n: usize) -> Vec<Letter> {
        crate::subcore::Substitution::linear(&["0", "1"], &["000", "101"]).unwrap().iterate(Letter(1), n).unwrap()
    }

    const ALPHA: f64 = 0.630_929_753_571_457_4;

    #[test]
    fn symbolic_series_matches_direct_sum() {
        let x = word(7);
        let f = Observable::new(vec![0.0, 1.0], &[false, true], false).unwrap();
        let s = second_order_symbolic(&x[1..], &f, ALPHA, 0.5, 1000, &cantor_norm()).unwrap();
        let n = 1000;
        let mut direct = 0.0;
        for k in 1..=n {
            let sk = x[1..=k].iter().filter(|a| a.0 == 1).count() as f64;
            direct += sk / (0.5 * (k as f64).powf(ALPHA + 1.0));
        }
        direct /= (n as f64).ln();
        assert!((s.final_partial().unwrap() - direct).abs() < 1e-12);
        assert_eq!(s.target, 1.0);

        let half = second_order_symbolic(&x[1..], &f, ALPHA, 1.0, 1000, &cantor_norm()).unwrap();
        for (a, b) in s.partials.iter().zip(&half.partials) {
            assert_eq!(*b, a / 2.0);
        }
        let zero = Observable::new(vec![0.0, 0.0], &[false, true], false).unwrap();
        let z = second_order_symbolic(&x[1..], &zero, ALPHA, 1.0, 1000, &cantor_norm()).unwrap();
        assert!(z.partials.iter().all(|&p| p == 0.0));
    }

    #[test]
    fn tiling_1d_matches_numeric_quadrature() {
        let x = word(6);
        let xi = LengthVector::exact(vec![1.0, 1.0]).unwrap();
        let win = window_from_sequence(&[], &x, &xi).unwrap();
        let f = Observable::new(vec![0.0, 1.0], &[false, true], false).unwrap();
        let t = 200.0;
        let s = second_order_tiling_1d(&win, &f, &xi, ALPHA, 1.0, t, &cantor_norm()).unwrap();
        // midpoint rule on I(R) = measure of B-tiles inside [0, R]
        let inner = |r: f64| -> f64 {
            (0..x.len() as isize)
                .filter_map(|i| win.tile(i))
                .filter(|(a, _, _)| a.0 == 1)
                .map(|(_, l, h)| (h.min(r) - l.max(0.0)).max(0.0))
                .sum()
        };
        let steps = 400_000;
        let h = (t - 1.0) / steps as f64;
        let mut q = 0.0;
        for i in 0..steps {
            let r = 1.0 + (i as f64 + 0.5) * h;
            q += inner(r) * r.powf(-ALPHA - 1.0) * h;
        }
        q /= t.ln();
        let got = s.final_partial().unwrap();
        assert!((got - q).abs() < 1e-6, "{got} vs {q}");
    }
}
