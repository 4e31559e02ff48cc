use serde_json::Value;

use super::{Alphabet, Rules, Substitution};
use crate::error::{Error, Result};
use crate::spectral::CountMatrix;

/// A matrix given without rules, with the expansion factor supplied by the user.
#[derive(Clone, Debug, PartialEq)]
pub struct MatrixSystem {
    pub alphabet: Alphabet,
    pub dim: u8,
    pub matrix: CountMatrix,
    pub lambda: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub enum SystemSpec {
    Rules(Substitution),
    Matrix(MatrixSystem),
}

impl SystemSpec {
    pub fn alphabet(&self) -> &Alphabet {
        match self {
            SystemSpec::Rules(s) => s.alphabet(),
            SystemSpec::Matrix(m) => &m.alphabet,
        }
    }

    pub fn dim(&self) -> u8 {
        match self {
            SystemSpec::Rules(s) => s.dim(),
            SystemSpec::Matrix(m) => m.dim,
        }
    }

    pub fn matrix(&self) -> CountMatrix {
        match self {
            SystemSpec::Rules(s) => s.substitution_matrix(),
            SystemSpec::Matrix(m) => m.matrix.clone(),
        }
    }

    pub fn substitution(&self) -> Option<&Substitution> {
        match self {
            SystemSpec::Rules(s) => Some(s),
            SystemSpec::Matrix(_) => None,
        }
    }
}

pub fn parse_substitution(text: &str) -> Result<Substitution> {
    match parse_config(text)? {
        SystemSpec::Rules(s) => Ok(s),
        SystemSpec::Matrix(_) => Err(Error::Config("config has a matrix but no rules".into())),
    }
}

pub fn parse_config(text: &str) -> Result<SystemSpec> {
    let doc: Value = serde_json::from_str(text).map_err(|e| Error::Syntax {
        line: e.line(),
        column: e.column(),
        msg: e.to_string(),
    })?;
    let obj = doc
        .as_object()
        .ok_or_else(|| Error::Config("top level must be an object".into()))?;
    for key in obj.keys() {
        if !matches!(key.as_str(), "alphabet" | "dim" | "rules" | "matrix" | "lambda" | "name") {
            return Err(Error::Config(format!("unknown key {key:?}")));
        }
    }

    let labels = obj
        .get("alphabet")
        .and_then(Value::as_array)
        .ok_or_else(|| Error::Config("\"alphabet\" must be an array of strings".into()))?
        .iter()
        .map(|v| {
            v.as_str()
                .map(str::to_string)
                .ok_or_else(|| Error::Config("alphabet entries must be strings".into()))
        })
        .collect::<Result<Vec<_>>>()?;
    let alphabet = Alphabet::new(labels)?;

    let dim = match obj.get("dim") {
        None => None,
        Some(v) => match v.as_u64() {
            Some(1) => Some(1u8),
            Some(2) => Some(2u8),
            _ => return Err(Error::Config("\"dim\" must be 1 or 2".into())),
        },
    };

    match (obj.get("rules"), obj.get("matrix")) {
        (Some(rules), None) => parse_rules(alphabet, dim, rules).map(SystemSpec::Rules),
        (None, Some(matrix)) => {
            let lambda = obj
                .get("lambda")
                .and_then(Value::as_f64)
                .ok_or_else(|| Error::Config("matrix-only configs need a numeric \"lambda\"".into()))?;
            if !(lambda > 1.0) || !lambda.is_finite() {
                return Err(Error::Config("\"lambda\" must be a finite number > 1".into()));
            }
            let matrix = parse_matrix(matrix, alphabet.len())?;
            Ok(SystemSpec::Matrix(MatrixSystem { alphabet, dim: dim.unwrap_or(1), matrix, lambda }))
        }
        (Some(_), Some(_)) => Err(Error::Config("give either \"rules\" or \"matrix\", not both".into())),
        (None, None) => Err(Error::Config("missing \"rules\"".into())),
    }
}

fn parse_matrix(v: &Value, n: usize) -> Result<CountMatrix> {
    let bad = || Error::Config(format!("\"matrix\" must be a {n}x{n} array of nonnegative integers"));
    let rows = v.as_array().ok_or_else(bad)?;
    if rows.len() != n {
        return Err(bad());
    }
    let mut m = CountMatrix::zeros(n);
    for (i, row) in rows.iter().enumerate() {
        let row = row.as_array().filter(|r| r.len() == n).ok_or_else(bad)?;
        for (j, x) in row.iter().enumerate() {
            m.set(i, j, x.as_u64().ok_or_else(bad)?);
        }
    }
    Ok(m)
}

fn parse_rules(alphabet: Alphabet, dim: Option<u8>, rules: &Value) -> Result<Substitution> {
    let map = rules
        .as_object()
        .ok_or_else(|| Error::Config("\"rules\" must be an object".into()))?;
    for key in map.keys() {
        if alphabet.lookup(key).is_none() {
            return Err(Error::UnknownLetter { rule: key.clone(), letter: key.clone() });
        }
    }
    let first_is_grid = map.values().next().is_some_and(Value::is_array);
    let dim = dim.unwrap_or(if first_is_grid { 2 } else { 1 });

    let mut images = Vec::with_capacity(alphabet.len());
    let mut q = None;
    for label in alphabet.labels() {
        let img = map.get(label).ok_or_else(|| Error::Config(format!("no rule for letter {label:?}")))?;
        let word = |s: &str| -> Result<Vec<_>> {
            s.chars()
                .map(|c| {
                    alphabet.lookup_char(c).ok_or_else(|| Error::UnknownLetter {
                        rule: label.clone(),
                        letter: c.to_string(),
                    })
                })
                .collect()
        };
        if dim == 1 {
            let s = img
                .as_str()
                .ok_or_else(|| Error::Config(format!("rule for {label:?} must be a string")))?;
            if s.is_empty() {
                return Err(Error::EmptyRule(label.clone()));
            }
            images.push(word(s)?);
        } else {
            let rows = img
                .as_array()
                .ok_or_else(|| Error::Config(format!("rule for {label:?} must be an array of rows")))?;
            if rows.is_empty() {
                return Err(Error::EmptyRule(label.clone()));
            }
            let side = rows.len();
            let mut cells = Vec::with_capacity(side * side);
            for (i, r) in rows.iter().enumerate() {
                let s = r
                    .as_str()
                    .ok_or_else(|| Error::Config(format!("rows of {label:?} must be strings")))?;
                let row = word(s)?;
                if row.len() != side {
                    return Err(Error::NonSquareImage {
                        letter: label.clone(),
                        detail: format!("{side} rows but row {i} has {} cells", row.len()),
                    });
                }
                cells.extend(row);
            }
            match q {
                None => q = Some(side),
                Some(expected) if expected != side => {
                    return Err(Error::InconsistentInflation { letter: label.clone(), expected, found: side })
                }
                _ => {}
            }
            images.push(cells);
        }
    }
    let rules = match q {
        Some(q) => Rules::Grid { q, cells: images },
        None => Rules::Linear(images),
    };
    Substitution::new(alphabet, rules)
}
