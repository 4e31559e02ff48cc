//! Cross-module invariants, checked through the public API on the shipped fixtures.

use std::fs;
use std::path::Path;
use std::sync::OnceLock;

use proptest::prelude::*;

use subergo::ergodic::{
    alpha_frequency, birkhoff_prefix_sums, measure_normalization, random_orbits, sbp_reconstruction,
    second_order_symbolic, second_order_tiling_1d, Observable, Series, TransverseWeights,
};
use subergo::gdifs::{average_density_birkhoff, MassVector};
use subergo::subcore::{parse_substitution, Letter, Substitution};
use subergo::tiling::{tiling_length, window_from_sequence};
use subergo::Model;

fn sub(name: &str) -> Substitution {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join(format!("../../fixtures/{name}.json"));
    parse_substitution(&fs::read_to_string(path).unwrap()).unwrap()
}

fn cantor() -> &'static Model {
    static M: OnceLock<Model> = OnceLock::new();
    M.get_or_init(|| Model::new(sub("cantor")).unwrap())
}

fn sigma2() -> &'static Model {
    static M: OnceLock<Model> = OnceLock::new();
    M.get_or_init(|| Model::new(sub("sigma2")).unwrap())
}

fn orbit(m: &Model, seed: u64, n: usize) -> Vec<Letter> {
    let sampler = m.transversal_sampler().unwrap();
    random_orbits(&m.sub, &sampler, seed, 1, 0, n).unwrap().remove(0).right
}

fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * a.abs().max(b.abs()).max(1e-300)
}

#[test]
fn normalizations_hold_on_every_admissible_fixture() {
    for name in ["cantor", "cantor1001", "sigma2", "sigma_k0", "sigma_k1", "sigma_k2", "sigma_k3", "carpet"] {
        let m = Model::new(sub(name)).unwrap();
        let size = |b: Letter| m.xi_len.as_ref().map_or(1.0, |xi| xi.of(b));
        let s: f64 = m.norm.b_letters.iter().zip(&m.norm.nu_cyl).map(|(&b, nu)| size(b) * nu).sum();
        assert!((s - 1.0).abs() < 1e-12, "{name}: Σ ξ ν = {s}");
        let pairing: f64 = m.norm.nu_cyl.iter().zip(&m.mass.h).map(|(nu, h)| nu * h).sum();
        assert!((pairing - 1.0).abs() < 1e-9, "{name}: Σ ν h = {pairing}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    // Rescaling the raw Perron data changes nothing that is reported.
    #[test]
    fn targets_are_invariant_under_joint_rescaling(s in 1e-3f64..1e3, t in 1e-3f64..1e3, w in 0.1f64..5.0) {
        for m in [cantor(), sigma2()] {
            let tr = TransverseWeights { xi_tr: m.transverse.xi_tr.iter().map(|x| x * s).collect(), ..m.transverse.clone() };
            let h: Vec<f64> = m.mass.h.iter().map(|h| h * t).collect();
            let mass = MassVector::from_values(&m.graph, h, m.mass.rho, 1e-9).unwrap();
            let norm = measure_normalization(&m.graph, m.xi_len.as_ref(), &tr, &mass).unwrap();
            for (a, b) in norm.nu_cyl.iter().zip(&m.norm.nu_cyl) {
                prop_assert!(close(*a, *b, 1e-12));
            }
            let f = Observable::indicator(m.b_letters(), &m.b_mask).unwrap();
            let f = Observable::new(f.weights.iter().map(|x| x * w).collect(), &m.b_mask, false).unwrap();
            prop_assert!(close(f.integral(&norm), f.integral(&m.norm), 1e-12));
            // γ Σ ν h is the invariant combination.
            let pairing: f64 = norm.nu_cyl.iter().zip(&mass.h).map(|(nu, h)| nu * h).sum();
            prop_assert!(close(norm.gamma * pairing, 1.0, 1e-12));
        }
    }

    #[test]
    fn second_order_series_are_linear(seed in 0u64..1000, w1 in -3.0f64..3.0, w2 in -3.0f64..3.0, c in 0.1f64..2.0) {
        let m = cantor();
        let n = 6561;
        let x = orbit(m, seed, n);
        let f1 = Observable::new(vec![0.0, w1], &m.b_mask, false).unwrap();
        let f2 = Observable::new(vec![0.0, w2], &m.b_mask, false).unwrap();
        let f12 = Observable::new(vec![0.0, w1 + w2], &m.b_mask, false).unwrap();
        let s1 = second_order_symbolic(&x, &f1, m.alpha, c, n, &m.norm).unwrap();
        let s2 = second_order_symbolic(&x, &f2, m.alpha, c, n, &m.norm).unwrap();
        let s12 = second_order_symbolic(&x, &f12, m.alpha, c, n, &m.norm).unwrap();
        let sum = s1.plus(&s2).unwrap();
        let scale = s12.partials.iter().map(|p| p.abs()).fold(1.0, f64::max) * (w1.abs() + w2.abs()).max(1.0);
        for (a, b) in s12.partials.iter().zip(&sum.partials) {
            prop_assert!((a - b).abs() <= 1e-12 * scale, "{a} vs {b}");
        }
        prop_assert!(close(s12.target, sum.target, 1e-12));
    }

    // The α-frequency is the summation by parts of the letter counts.
    #[test]
    fn summation_by_parts_reconstructs_the_frequency(word in proptest::collection::vec(any::<bool>(), 1..6561)) {
        let m = cantor();
        let x: Vec<Letter> = word.iter().map(|&b| Letter(b as u8)).collect();
        let n = x.len();
        let direct = alpha_frequency(&x, Letter(1), m.alpha, 1.0, n, &m.norm).unwrap();
        let mut counts = birkhoff_prefix_sums(&x, &[0.0, 1.0], n).unwrap();
        counts.truncate(n + 1);
        let grid: Vec<usize> = direct.grid.iter().map(|&g| g as usize).collect();
        let rebuilt = sbp_reconstruction(&counts, m.alpha, &grid).unwrap_or_default();
        prop_assert_eq!(rebuilt.len(), direct.partials.len());
        for (a, b) in direct.partials.iter().zip(&rebuilt) {
            prop_assert!((a - b).abs() <= 1e-6, "{a} vs {b}");
        }
    }

    // Weights on A-letters move the series by at most their own contribution.
    #[test]
    fn a_letter_perturbations_stay_inside_their_envelope(seed in 0u64..1000, w in -2.0f64..2.0) {
        let m = cantor();
        let n = 6561;
        let x = orbit(m, seed, n);
        let c = 0.5;
        let f = Observable::indicator(&[Letter(1)], &m.b_mask).unwrap();
        let g = Observable::new(vec![w, 1.0], &m.b_mask, true).unwrap();
        let sf = second_order_symbolic(&x, &f, m.alpha, c, n, &m.norm).unwrap();
        let sg = second_order_symbolic(&x, &g, m.alpha, c, n, &m.norm).unwrap();
        prop_assert!(close(sf.target, sg.target, 1e-15));
        let zeros = birkhoff_prefix_sums(&x, &[1.0, 0.0], n).unwrap();
        let mut env = 0.0;
        let mut gi = 0;
        for k in 1..=n {
            env += w.abs() * zeros[k] * (k as f64).powf(-m.alpha - 1.0);
            if gi < sf.grid.len() && sf.grid[gi] as usize == k {
                let bound = env / (c * (k as f64).ln());
                prop_assert!((sf.partials[gi] - sg.partials[gi]).abs() <= bound * (1.0 + 1e-9) + 1e-12);
                gi += 1;
            }
        }
    }

    #[test]
    fn tiling_length_of_an_orbit_prefix_is_its_suspension_extent(seed in 0u64..1000, n in 1usize..2000) {
        let m = Model::new(sub("cantor1001")).unwrap();
        let xi = m.xi_len.clone().unwrap();
        let x = orbit(&m, seed, n + 1);
        let win = window_from_sequence(&[], &x, &xi).unwrap();
        // x(0) is centred on the origin; x[1, n] ends at the right bound of tile n.
        let (_, _, right) = win.tile(n as isize).unwrap();
        let half = xi.of(x[0]) / 2.0;
        prop_assert!(close(tiling_length(&x[1..=n], &xi), right - half, 1e-12));
    }
}

// |symbolic − suspension| is an O(1) counting difference over log n: times log n it stays
// bounded and does not grow over the last decades.
#[test]
fn symbolic_and_suspension_engines_share_the_limit_envelope() {
    let m = cantor();
    let xi = m.xi_len.clone().unwrap();
    let n = 59049;
    let f = Observable::indicator(&[Letter(1)], &m.b_mask).unwrap();
    let sampler = m.transversal_sampler().unwrap();
    for o in random_orbits(&m.sub, &sampler, 17, 8, 0, n + 2).unwrap() {
        let sym = second_order_symbolic(&o.right, &f, m.alpha, 0.5, n, &m.norm).unwrap();
        let win = window_from_sequence(&o.left, &o.from_origin(), &xi).unwrap();
        let til = second_order_tiling_1d(&win, &f, &xi, m.alpha, 0.5, n as f64, &m.norm).unwrap();
        let scaled = |lo: f64, hi: f64| {
            sym.grid
                .iter()
                .zip(&sym.partials)
                .zip(&til.partials)
                .filter(|((g, _), _)| **g >= lo && **g <= hi)
                .map(|((g, a), b)| (a - b).abs() * g.ln())
                .fold(0.0, f64::max)
        };
        let middle = scaled(243.0, 6561.0);
        let last = scaled(6561.0, n as f64);
        assert!(last.is_finite() && last <= 2.0 * middle.max(1.0), "envelope grew: {middle} -> {last}");
    }
}

// Doubling the log-time horizon moves the estimate by less than its dispersion.
#[test]
fn density_estimate_is_stable_when_the_horizon_doubles() {
    let m = cantor();
    let short = average_density_birkhoff(&m.graph, &m.mass, &m.density_config(20, 32, 5)).unwrap();
    let long = average_density_birkhoff(&m.graph, &m.mass, &m.density_config(40, 32, 6)).unwrap();
    let dispersion = short.stderr.hypot(long.stderr);
    assert!(
        (short.c_hat - long.c_hat).abs() < 3.0 * dispersion,
        "k=20: {} ± {}, k=40: {} ± {}",
        short.c_hat,
        short.stderr,
        long.c_hat,
        long.stderr
    );
}

#[test]
fn ensemble_mean_is_the_mean_of_the_members() {
    let m = cantor();
    let f = Observable::indicator(&[Letter(1)], &m.b_mask).unwrap();
    let sampler = m.transversal_sampler().unwrap();
    let all: Vec<Series> = random_orbits(&m.sub, &sampler, 3, 4, 0, 2187)
        .unwrap()
        .iter()
        .map(|o| second_order_symbolic(&o.right, &f, m.alpha, 0.5, 2187, &m.norm).unwrap())
        .collect();
    let mean = Series::mean(&all).unwrap();
    let direct = all.iter().map(|s| s.final_partial().unwrap()).sum::<f64>() / 4.0;
    assert!(close(mean.final_partial().unwrap(), direct, 1e-14));
}
