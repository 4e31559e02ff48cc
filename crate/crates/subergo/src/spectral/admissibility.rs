use serde::Serialize;

use super::matrix::CountMatrix;
use super::normal_form::{normal_form, BlockKind, BlockStructure};
use super::perron::{block_radius, dominant_vector, Normalization, Side, POWER_TOL};
use crate::error::{Error, Result};
use crate::subcore::{Letter, Substitution, SystemSpec};

pub const REPORT_SCHEMA_VERSION: u32 = 1;

/// Relative tolerance when comparing two computed spectral radii.
const RADIUS_TIE: f64 = 1e-9;

/// Normal form plus the radius of every diagonal block.
#[derive(Clone, Debug)]
pub struct BlockAnalysis {
    pub structure: BlockStructure,
    pub radii: Vec<f64>,
}

impl BlockAnalysis {
    pub fn new(m: &CountMatrix) -> Result<Self> {
        let structure = normal_form(m);
        let radii = structure
            .blocks
            .iter()
            .zip(&structure.kinds)
            .map(|(b, k)| block_radius(&m.submatrix(b), *k, POWER_TOL))
            .collect::<Result<Vec<f64>>>()?;
        Ok(BlockAnalysis { structure, radii })
    }

    pub fn rho_a(&self) -> Option<f64> {
        let k = self.radii.len();
        (k >= 2).then(|| self.radii[..k - 1].iter().copied().fold(0.0, f64::max))
    }

    pub fn rho_b(&self) -> Option<f64> {
        (self.radii.len() >= 2).then(|| *self.radii.last().unwrap())
    }

    /// Closed classes all at the top radius, every other class strictly below:
    /// the condition for a strictly positive left eigenvector.
    pub fn positive_left_eigenvector(&self) -> bool {
        let top = self.radii.iter().copied().fold(0.0, f64::max);
        self.radii.iter().zip(&self.structure.closed).all(|(&r, &closed)| {
            let at_top = (r - top).abs() <= RADIUS_TIE * top;
            closed == at_top
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Tec2 {
    pub ok: Option<bool>,
    pub witness_k: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AdmissibilityReport {
    pub schema_version: u32,
    pub shape_ok: bool,
    pub rho_order_ok: bool,
    #[serde(rename = "rho_A")]
    pub rho_a: Option<f64>,
    #[serde(rename = "rho_B")]
    pub rho_b: Option<f64>,
    /// Expansion used for α: ρ(A) in dimension one, q for grids, the supplied value
    /// for matrix-only systems.
    pub lambda: Option<f64>,
    pub alpha: Option<f64>,
    /// `None` when there are no rules to inspect.
    pub tec1: Option<bool>,
    pub tec2: Tec2,
    pub positive_left_eigenvector: bool,
    pub strict_two_block: bool,
    pub failures: Vec<String>,
}

impl AdmissibilityReport {
    pub fn is_admissible(&self) -> bool {
        self.alpha.is_some()
    }
}

#[derive(Clone, Copy, Debug)]
pub struct AdmissibilityOptions {
    pub tec2_max_k: usize,
}

impl Default for AdmissibilityOptions {
    fn default() -> Self {
        AdmissibilityOptions { tec2_max_k: 8 }
    }
}

pub fn admissibility_report(spec: &SystemSpec, opts: AdmissibilityOptions) -> Result<AdmissibilityReport> {
    let m = spec.matrix();
    let analysis = BlockAnalysis::new(&m)?;
    let bs = &analysis.structure;
    let mut failures = Vec::new();
    let mut shape_ok = true;
    let mut rho_order_ok = true;

    let positive_left = analysis.positive_left_eigenvector();
    let (rho_a, rho_b) = (analysis.rho_a(), analysis.rho_b());
    let mut strict_two_block = false;

    if m.n() < 2 {
        failures.push("shape: single-letter alphabet has no C-block".into());
        shape_ok = false;
        rho_order_ok = false;
    } else if bs.blocks.len() < 2 {
        failures.push("shape: the letter graph is strongly connected, no B-part".into());
        shape_ok = false;
        rho_order_ok = false;
    } else {
        let b = bs.b_part().unwrap();
        let a = bs.a_part().unwrap();
        if *bs.kinds.last().unwrap() != BlockKind::Primitive {
            failures.push(format!("shape: B-part is {:?}, not primitive", bs.kinds.last().unwrap()));
            shape_ok = false;
        }
        if !a.iter().any(|&i| b.iter().any(|&j| m.get(i, j) > 0)) {
            failures.push("shape: C-block is zero".into());
            shape_ok = false;
        }
        let k = bs.blocks.len();
        strict_two_block = k == 2 && bs.kinds[0] == BlockKind::Primitive;
        let a_final: Vec<f64> = (0..k - 1).filter(|&i| bs.closed[i]).map(|i| analysis.radii[i]).collect();
        let single_radius = positive_left && !a_final.is_empty();
        if !single_radius {
            let radii = a_final.iter().map(|r| format!("{r}")).collect::<Vec<_>>().join(", ");
            failures.push(format!(
                "shape: A-part not single-radius (final block radii {radii}); no strictly positive left eigenvector"
            ));
            failures.push("rho_order: rho(A) is not attained by every final block".into());
            shape_ok = false;
            rho_order_ok = false;
        }
        let (ra, rb) = (rho_a.unwrap(), rho_b.unwrap());
        if !(rb > 1.0) {
            failures.push(format!("rho_order: rho(B) = {rb} is not > 1"));
            rho_order_ok = false;
        }
        if !(ra > rb * (1.0 + RADIUS_TIE)) {
            failures.push(format!("rho_order: rho(A) = {ra} is not > rho(B) = {rb}"));
            rho_order_ok = false;
        }
    }

    let (tec1, tec2) = match (spec.substitution(), bs.b_part()) {
        (Some(sub), Some(b)) if shape_ok => {
            let b: Vec<Letter> = b.iter().map(|&i| Letter(i as u8)).collect();
            let t1 = border_condition(sub, &b);
            if !t1 {
                failures.push("tec1: some B-letter image has a non-B letter on its border".into());
            }
            let w = interior_witness(sub, &b, opts.tec2_max_k);
            if w.is_none() {
                failures.push(format!("tec2: no interior B-letter in sigma^k(b) for k <= {}", opts.tec2_max_k));
            }
            (Some(t1), Tec2 { ok: Some(w.is_some()), witness_k: w })
        }
        _ => (None, Tec2 { ok: None, witness_k: None }),
    };

    let lambda = match spec {
        SystemSpec::Matrix(ms) => Some(ms.lambda),
        SystemSpec::Rules(sub) => match sub.q() {
            Some(q) => Some(q as f64),
            None => rho_a,
        },
    };
    let checks_pass = shape_ok && rho_order_ok && tec1 != Some(false) && tec2.ok != Some(false);
    let alpha = match (checks_pass, lambda, rho_b) {
        (true, Some(l), Some(rb)) => Some(rb.ln() / l.ln()),
        _ => None,
    };
    Ok(AdmissibilityReport {
        schema_version: REPORT_SCHEMA_VERSION,
        shape_ok,
        rho_order_ok,
        rho_a,
        rho_b,
        lambda,
        alpha,
        tec1,
        tec2,
        positive_left_eigenvector: positive_left,
        strict_two_block,
        failures,
    })
}

fn is_b(b: &[Letter], x: Letter) -> bool {
    b.contains(&x)
}

/// dim 1: B-images start and end with a B-letter. dim 2: the whole border ring of
/// every B-image consists of B-letters.
pub fn border_condition(sub: &Substitution, b: &[Letter]) -> bool {
    b.iter().all(|&x| {
        let img = sub.image(x);
        match sub.q() {
            None => is_b(b, img[0]) && is_b(b, img[img.len() - 1]),
            Some(q) => (0..q).all(|i| {
                (0..q).all(|j| {
                    let border = i == 0 || j == 0 || i == q - 1 || j == q - 1;
                    !border || is_b(b, img[i * q + j])
                })
            }),
        }
    })
}

/// Smallest k that works for every B-letter: σᵏ(b) has a B-letter off its border.
pub fn interior_witness(sub: &Substitution, b: &[Letter], max_k: usize) -> Option<usize> {
    let mut worst = 0;
    for &x in b {
        let found = match sub.q() {
            None => {
                let mut w = vec![x];
                (1..=max_k).find(|_| {
                    w = sub.apply(&w).unwrap_or_default();
                    w.len() > 2 && w[1..w.len() - 1].iter().any(|&y| is_b(b, y))
                })
            }
            Some(_) => {
                let (mut g, mut side) = (vec![x], 1usize);
                (1..=max_k).find(|_| {
                    if side.saturating_mul(sub.q().unwrap()) > 6561 {
                        return false;
                    }
                    let (ng, ns) = sub.apply_grid(&g, side, side);
                    g = ng;
                    side = ns;
                    (1..side.saturating_sub(1)).any(|i| (1..side - 1).any(|j| is_b(b, g[i * side + j])))
                })
            }
        };
        worst = worst.max(found?);
    }
    Some(worst)
}

/// α = log ρ(B) / log λ with λ = ρ(A) (dim 1) or q (dim 2). Needs a B-part with ρ(B) > 1.
pub fn alpha_exponent(sub: &Substitution) -> Result<f64> {
    let analysis = BlockAnalysis::new(&sub.substitution_matrix())?;
    let (ra, rb) = match (analysis.rho_a(), analysis.rho_b()) {
        (Some(a), Some(b)) => (a, b),
        _ => return Err(Error::MissingBPart("normal form has a single block".into())),
    };
    if !(rb > 1.0) {
        return Err(Error::DegenerateB(rb));
    }
    let lambda = sub.q().map_or(ra, |q| q as f64);
    Ok(rb.ln() / lambda.ln())
}

/// ξᵢ = lim |σᵏ(i)| / ρ(A)ᵏ, computed as l·(Σr)/(l·r) from the dominant left and right vectors.
pub fn asymptotic_lengths(m: &CountMatrix) -> Result<(f64, Vec<f64>)> {
    let (rho, l, _) = dominant_vector::<f64>(m, Side::Left, &Normalization::Sum)?;
    let (_, r, _) = dominant_vector::<f64>(m, Side::Right, &Normalization::Sum)?;
    let lr: f64 = l.iter().zip(&r).map(|(a, b)| a * b).sum();
    Ok((rho, l.iter().map(|x| x / lr).collect()))
}

#[derive(Clone, Debug, Serialize)]
pub struct LengthRow {
    pub k: usize,
    pub lengths: Vec<u128>,
    pub ratios: Vec<f64>,
}

#[derive(Clone, Debug, Serialize)]
pub struct LengthTable {
    pub rho_a: f64,
    pub xi: Vec<f64>,
    pub rows: Vec<LengthRow>,
    /// max |ratio − 1| over the last row
    pub final_deviation: f64,
}

pub fn length_asymptotics_check(sub: &Substitution, k_max: usize) -> Result<LengthTable> {
    if sub.dim() != 1 {
        return Err(Error::WrongDimension { expected: 1, found: sub.dim() });
    }
    let (rho_a, xi) = asymptotic_lengths(&sub.substitution_matrix())?;
    let table = sub.iterated_lengths(k_max);
    if table[k_max].iter().any(|&x| x == u128::MAX) {
        return Err(Error::LengthCap { predicted: u128::MAX, cap: u128::MAX - 1 });
    }
    let rows: Vec<LengthRow> = table
        .into_iter()
        .enumerate()
        .map(|(k, lengths)| {
            let scale = rho_a.powi(k as i32);
            let ratios = lengths.iter().zip(&xi).map(|(&l, &x)| l as f64 / (x * scale)).collect();
            LengthRow { k, lengths, ratios }
        })
        .collect();
    let final_deviation = rows.last().unwrap().ratios.iter().fold(0.0f64, |a, r| a.max((r - 1.0).abs()));
    Ok(LengthTable { rho_a, xi, rows, final_deviation })
}
