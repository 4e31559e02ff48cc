use std::fs;

use anyhow::{anyhow, bail, Context, Result};
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use subergo::ergodic::{
    alpha_frequency, birkhoff_prefix_sums, distribution_experiment, frequency_from_second_order, log_frequency,
    random_orbits, random_supertiles_2d, second_order_symbolic, second_order_tiling_1d, second_order_tiling_2d,
    Observable, RandomOrbit, Series, QUANTILE_GRID,
};
use subergo::gdifs::{average_density_birkhoff, average_density_pointwise, DensityEstimate, Window};
use subergo::spectral::{admissibility_report, asymptotic_lengths, AdmissibilityOptions, BlockAnalysis};
use subergo::subcore::{fixed_point_seeds, orbit_generate, Letter, SystemSpec};
use subergo::tiling::window_from_sequence;
use subergo::{Error, Model};

use crate::cli::{
    ConstantArgs, DensityArgs, DistributionArgs, EngineArg, FrequencyArgs, LogfreqArgs, MethodArg, OrbitArgs,
    SecondOrderArgs, StartArg, WindowArg,
};
use crate::output::{Outputs, SCHEMA_VERSION};

const DEFAULT_N: usize = 531_441;
const DEFAULT_R: f64 = 2187.0;
/// Search depth for legal two-letter seeds of the fixed point.
const SEED_DEPTH: usize = 12;
const MAX_FIXED_DEPTH: usize = 64;

pub fn analyze(spec: &SystemSpec, name: &str, tec2_max_k: usize) -> Result<Outputs> {
    let report = admissibility_report(spec, AdmissibilityOptions { tec2_max_k })?;
    let m = spec.matrix();
    let analysis = BlockAnalysis::new(&m)?;
    let labels = spec.alphabet().labels();
    let blocks: Vec<Value> = analysis
        .structure
        .blocks
        .iter()
        .enumerate()
        .map(|(i, b)| {
            json!({
                "letters": b.iter().map(|&l| &labels[l]).collect::<Vec<_>>(),
                "kind": analysis.structure.kinds[i],
                "closed": analysis.structure.closed[i],
                "radius": analysis.radii[i],
            })
        })
        .collect();
    let mut doc = json!({
        "schema_version": SCHEMA_VERSION,
        "command": "analyze",
        "name": name,
        "dim": spec.dim(),
        "alphabet": labels,
        "matrix": m.rows(),
        "blocks": blocks,
        "rho_A": report.rho_a,
        "rho_B": report.rho_b,
        "lambda": report.lambda,
        "alpha": report.alpha,
        "admissibility": report,
    });
    if spec.dim() == 1 {
        if let Ok((_, xi)) = asymptotic_lengths(&m) {
            doc["xi_len"] = json!(xi);
        }
    }
    let mut out = Outputs::default();
    match (report.is_admissible(), spec) {
        (true, SystemSpec::Rules(sub)) => {
            let model = Model::new(sub.clone())?;
            doc["b_letters"] = json!(letter_labels(&model, model.b_letters()));
            doc["xi_tr"] = json!(model.transverse.xi_tr);
            doc["nu"] = json!(model.norm.nu_cyl);
            doc["hausdorff_mass"] = json!(model.mass.h);
            doc["letter_frequencies"] = json!(model.letter_frequencies()?);
            log::info!("{name}: admissible, alpha = {}", model.alpha);
        }
        (true, SystemSpec::Matrix(_)) => log::info!("{name}: admissible (matrix only), alpha = {:?}", report.alpha),
        (false, _) => {
            for f in &report.failures {
                log::error!("{name}: {f}");
            }
            out.exit_code = 2;
        }
    }
    out.json("analyze.json", &doc)?;
    Ok(out)
}

fn letter_labels(model: &Model, letters: &[Letter]) -> Vec<String> {
    letters.iter().map(|&a| model.sub.alphabet().label(a).to_string()).collect()
}

fn letter(model: &Model, label: &str) -> Result<Letter> {
    model.sub.alphabet().lookup(label).ok_or_else(|| anyhow!("unknown letter {label:?}"))
}

pub fn density(model: &Model, name: &str, args: &DensityArgs, seed: u64) -> Result<Outputs> {
    let mut cfg = model.density_config(args.k, args.replicas, seed);
    if let Some(p) = args.points {
        cfg.points_per_replica = p;
    }
    if let Some(d) = args.depth {
        cfg.extra_depth = d;
    }
    if let Some(w) = args.window {
        cfg.window = match w {
            WindowArg::Ball => Window::Ball,
            WindowArg::Right => Window::Right,
        };
    }
    if let Some(s) = args.step {
        cfg.step = s;
    }
    if let Some(w) = args.max_width {
        cfg.max_relative_width = w;
    }
    let mut estimates: Vec<DensityEstimate> = Vec::new();
    if matches!(args.method, MethodArg::Pointwise | MethodArg::Both) {
        estimates.push(average_density_pointwise(&model.graph, &model.mass, &cfg)?);
    }
    if matches!(args.method, MethodArg::Birkhoff | MethodArg::Both) {
        estimates.push(average_density_birkhoff(&model.graph, &model.mass, &cfg)?);
    }
    for e in &estimates {
        log::info!("{name}: {:?} c = {:.6} ± {:.2e} (systematic {:.1e})", e.method, e.c_hat, e.stderr, e.systematic_bound);
    }
    let c_hat = estimates.last().map(|e| e.c_hat);
    let cross = (estimates.len() == 2).then(|| {
        let (pw, bk) = (estimates[0].c_hat, estimates[1].c_hat);
        json!({ "relative_delta": (pw - bk).abs() / bk })
    });
    let doc = json!({
        "schema_version": SCHEMA_VERSION,
        "command": "density",
        "name": name,
        "dim": model.dim(),
        "alpha": model.alpha,
        "c_hat": c_hat,
        "cross_check": cross,
        "estimates": estimates,
    });
    let mut out = Outputs::default();
    out.json("density.json", &doc)?;
    Ok(out)
}

fn resolve_c(args: &ConstantArgs) -> Result<(f64, String)> {
    match (args.c, &args.c_file) {
        (Some(c), _) => Ok((c, "value".into())),
        (None, Some(path)) => {
            let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
            let v: Value = serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))?;
            let c = v.get("c_hat").and_then(Value::as_f64).ok_or_else(|| anyhow!("{} has no numeric c_hat", path.display()))?;
            Ok((c, path.display().to_string()))
        }
        (None, None) => bail!("the density constant is required: pass --c or --c-file"),
    }
}

pub fn parse_observable(model: &Model, text: &str, formal: bool) -> Result<Observable> {
    let n = model.sub.n_letters();
    Ok(match text {
        "b" => Observable::indicator(model.b_letters(), &model.b_mask)?,
        "hausdorff" => model.hausdorff_observable(),
        "zero" => Observable::new(vec![0.0; n], &model.b_mask, formal)?,
        _ => {
            let mut w = vec![0.0; n];
            for pair in text.split(',').map(str::trim).filter(|p| !p.is_empty()) {
                let (label, value) = pair.split_once(':').ok_or_else(|| anyhow!("expected label:weight, got {pair:?}"))?;
                let v: f64 = value.trim().parse().with_context(|| format!("weight in {pair:?}"))?;
                w[letter(model, label.trim())?.index()] = v;
            }
            Observable::new(w, &model.b_mask, formal)?
        }
    })
}

/// Orbits with x(−n_left..) and x(1..=n_right) available.
fn orbits(model: &Model, args: &OrbitArgs, seed: u64, n_left: usize, n_right: usize) -> Result<Vec<RandomOrbit>> {
    match args.start {
        StartArg::Random => {
            let sampler = model.transversal_sampler()?;
            Ok(random_orbits(&model.sub, &sampler, seed, args.samples.max(1), n_left, n_right)?)
        }
        StartArg::Fixed => {
            if args.samples > 1 {
                log::warn!("--samples is ignored for the fixed point");
            }
            let seeds = fixed_point_seeds(&model.sub, SEED_DEPTH)?;
            let pick = seeds
                .iter()
                .find(|(_, b)| model.b_mask[b.index()])
                .or(seeds.first())
                .copied()
                .ok_or_else(|| Error::Config("the substitution has no fixed point seed".into()))?;
            let mut depth = 0;
            while model.sub.predicted_len(pick.1, depth) < (n_right + 1) as u128 || model.sub.predicted_len(pick.0, depth) < n_left as u128 {
                depth += 1;
                if depth > MAX_FIXED_DEPTH {
                    return Err(Error::Coverage { needed: n_right as f64, available: model.sub.predicted_len(pick.1, depth) as f64 }.into());
                }
            }
            let block = orbit_generate(&model.sub, pick, depth)?;
            Ok(vec![RandomOrbit {
                left: block.left[block.left.len() - n_left..].to_vec(),
                origin: block.right[0],
                right: block.right[1..=n_right].to_vec(),
                depth,
            }])
        }
    }
}

#[derive(Serialize)]
struct SampleSummary {
    final_partial: f64,
    final_relative_error: f64,
}

fn series_summary(name: &str, command: &str, all: &[Series], mean: &Series, extra: Value) -> Value {
    let per_sample: Vec<SampleSummary> = all
        .iter()
        .map(|s| SampleSummary {
            final_partial: s.final_partial().unwrap_or(f64::NAN),
            final_relative_error: s.final_relative_error().unwrap_or(f64::NAN),
        })
        .collect();
    let mut doc = json!({
        "schema_version": SCHEMA_VERSION,
        "command": command,
        "name": name,
        "kind": mean.kind,
        "alpha": mean.alpha,
        "c": mean.c_used,
        "samples": all.len(),
        "scale_max": mean.grid.last(),
        "target": mean.target,
        "final_partial": mean.final_partial(),
        "final_relative_error": mean.final_relative_error(),
        "final_decade_error": mean.final_decade_error(),
        "final_decade_oscillation": mean.final_decade_oscillation(),
        "per_sample": per_sample,
    });
    if let (Value::Object(d), Value::Object(e)) = (&mut doc, extra) {
        d.extend(e);
    }
    doc
}

fn log_series(name: &str, mean: &Series) {
    log::info!(
        "{name}: final partial {:.6}, target {:.6}, final-decade relative error {:.4}",
        mean.final_partial().unwrap_or(f64::NAN),
        mean.target,
        mean.final_decade_error().unwrap_or(f64::NAN)
    );
}

pub fn second_order(model: &Model, name: &str, args: &SecondOrderArgs, seed: u64) -> Result<Outputs> {
    let (c, c_source) = resolve_c(&args.constant)?;
    let alpha = model.alpha;
    let tiling = model.dim() == 2 || args.engine == EngineArg::Tiling;
    let f = parse_observable(model, args.f.as_deref().unwrap_or(if tiling { "hausdorff" } else { "b" }), args.formal)?;
    let (all, engine, scale) = if model.dim() == 2 {
        if args.orbit.start == StartArg::Fixed {
            bail!("grid substitutions only support --start random");
        }
        let r = args.r.unwrap_or(DEFAULT_R);
        let sampler = model.transversal_sampler()?;
        let tiles = random_supertiles_2d(&model.sub, &sampler, seed, args.orbit.samples.max(1), r)?;
        let all = tiles
            .par_iter()
            .map(|t| second_order_tiling_2d(t, &f, alpha, c, r, &model.norm))
            .collect::<subergo::Result<Vec<_>>>()?;
        (all, "grid", r)
    } else if args.engine == EngineArg::Tiling {
        let r = args.r.or(args.n.map(|n| n as f64)).unwrap_or(DEFAULT_N as f64);
        let xi = model.xi_len.as_ref().ok_or_else(|| anyhow!("no tile lengths"))?;
        let all = orbits(model, &args.orbit, seed, 0, r.ceil() as usize)?
            .iter()
            .map(|o| second_order_tiling_1d(&window_from_sequence(&o.left, &o.from_origin(), xi)?, &f, xi, alpha, c, r, &model.norm))
            .collect::<subergo::Result<Vec<_>>>()?;
        (all, "tiling", r)
    } else {
        let n = args.n.unwrap_or(DEFAULT_N);
        let all = orbits(model, &args.orbit, seed, 0, n)?
            .iter()
            .map(|o| second_order_symbolic(&o.right, &f, alpha, c, n, &model.norm))
            .collect::<subergo::Result<Vec<_>>>()?;
        (all, "symbolic", n as f64)
    };
    let mean = Series::mean(&all).ok_or_else(|| anyhow!("no series"))?;
    log_series(name, &mean);
    let doc = series_summary(
        name,
        "second-order",
        &all,
        &mean,
        json!({ "engine": engine, "scale_requested": scale, "c_source": c_source, "observable": f }),
    );
    let mut out = Outputs::default();
    out.csv("second_order.csv", &mean.rows())?;
    out.json("second_order.json", &doc)?;
    Ok(out)
}

pub fn frequency(model: &Model, name: &str, args: &FrequencyArgs, seed: u64) -> Result<Outputs> {
    let (c, c_source) = resolve_c(&args.constant)?;
    let b = letter(model, &args.b)?;
    let indicator = Observable::indicator(&[b], &model.b_mask)?;
    let n = args.n;
    let mut freqs = Vec::new();
    let mut predicted: Vec<Vec<f64>> = Vec::new();
    for o in orbits(model, &args.orbit, seed, 0, n)? {
        freqs.push(alpha_frequency(&o.right, b, model.alpha, c, n, &model.norm)?);
        let second = second_order_symbolic(&o.right, &indicator, model.alpha, c, n, &model.norm)?;
        let counts = birkhoff_prefix_sums(&o.right, &indicator.weights, n)?;
        predicted.push(frequency_from_second_order(&second, &counts)?);
    }
    let mean = Series::mean(&freqs).ok_or_else(|| anyhow!("no series"))?;
    let pred_final = predicted.iter().map(|p| *p.last().unwrap_or(&f64::NAN)).sum::<f64>() / predicted.len() as f64;
    let f_final = mean.final_partial().unwrap_or(f64::NAN);
    log_series(name, &mean);
    log::info!("{name}: summation-by-parts prediction {pred_final:.6}, relative difference {:.4}", (f_final - pred_final) / pred_final);
    let doc = series_summary(
        name,
        "frequency",
        &freqs,
        &mean,
        json!({
            "letter": args.b,
            "c_source": c_source,
            "cross_identity": { "predicted_final": pred_final, "relative_difference": (f_final - pred_final) / pred_final },
        }),
    );
    let mut out = Outputs::default();
    out.csv("frequency.csv", &mean.rows())?;
    out.json("frequency.json", &doc)?;
    Ok(out)
}

pub fn logfreq(model: &Model, name: &str, args: &LogfreqArgs, seed: u64) -> Result<Outputs> {
    let a = letter(model, &args.a)?;
    let target = model.letter_frequencies()?[a.index()];
    let all = orbits(model, &args.orbit, seed, 0, args.n)?
        .iter()
        .map(|o| log_frequency(&o.right, a, args.n, target))
        .collect::<subergo::Result<Vec<_>>>()?;
    let mean = Series::mean(&all).ok_or_else(|| anyhow!("no series"))?;
    log_series(name, &mean);
    let doc = series_summary(name, "logfreq", &all, &mean, json!({ "letter": args.a }));
    let mut out = Outputs::default();
    out.csv("logfreq.csv", &mean.rows())?;
    out.json("logfreq.json", &doc)?;
    Ok(out)
}

pub fn distribution(model: &Model, name: &str, args: &DistributionArgs, seed: u64) -> Result<Outputs> {
    let f = parse_observable(model, args.f.as_deref().unwrap_or("b"), args.formal)?;
    let sampler = model.transversal_sampler()?;
    let levels = distribution_experiment(&model.sub, &sampler, &f, model.rho_a, model.rho_b, args.levels, args.samples, seed)?;
    let mut header = vec!["level".to_string(), "length".to_string()];
    header.extend(QUANTILE_GRID.iter().map(|p| format!("q{p}")));
    header.push("ks_distance".into());
    let records: Vec<Vec<String>> = levels
        .iter()
        .map(|l| {
            let mut r = vec![l.level.to_string(), l.length.to_string()];
            r.extend(l.quantiles.iter().map(f64::to_string));
            r.push(l.ks_distance.to_string());
            r
        })
        .collect();
    if let Some(last) = levels.last() {
        log::info!("{name}: level {} KS distance to uniform {:.4}", last.level, last.ks_distance);
    }
    let doc = json!({
        "schema_version": SCHEMA_VERSION,
        "command": "distribution",
        "name": name,
        "samples": args.samples,
        "quantile_grid": QUANTILE_GRID,
        "ks_distance": levels.iter().map(|l| l.ks_distance).collect::<Vec<_>>(),
    });
    let mut out = Outputs::default();
    out.csv_records("distribution.csv", &header, &records)?;
    out.json("distribution.json", &doc)?;
    Ok(out)
}
