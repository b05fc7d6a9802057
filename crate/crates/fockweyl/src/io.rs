//! JSON forms of operators, vectors, symbols and model specifications.
//!
//! Complex matrices are written row-major as `[[[re, im], …], …]`.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::dynamics::ModelSpec;
use crate::error::{Error, Result};
use crate::fock::{FockSpace, FockVector};
use crate::operator::DenseOperator;
use crate::quantization::TrigSymbol;
use crate::symbol::PolySymbol;
use crate::C64;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OperatorJson {
    pub d: usize,
    pub n_max: u32,
    pub epsilon: f64,
    /// [α_out, α_in, re, im]
    pub entries: Vec<(Vec<u32>, Vec<u32>, f64, f64)>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VectorJson {
    pub d: usize,
    pub n_max: u32,
    pub epsilon: f64,
    /// [α, re, im]
    pub entries: Vec<(Vec<u32>, f64, f64)>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SymbolJson {
    /// [β, γ, re, im] for the term c z̄^β z^γ.
    pub terms: Vec<(Vec<u32>, Vec<u32>, f64, f64)>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub q: Option<u32>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrigSymbolJson {
    /// [re_c, im_c, Re ξ_1, Im ξ_1, Re ξ_2, …]
    pub atoms: Vec<Vec<f64>>,
}

pub type MatrixJson = Vec<Vec<[f64; 2]>>;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelSpecJson {
    #[serde(rename = "A")]
    pub a: MatrixJson,
    #[serde(rename = "Qtensor")]
    pub q_tensor: MatrixJson,
    pub epsilon: f64,
    pub n_max: u32,
    #[serde(rename = "V_norm", default, skip_serializing_if = "Option::is_none")]
    pub v_norm: Option<f64>,
}

fn parse_err(e: serde_json::Error) -> Error {
    Error::Parse(e.to_string())
}

pub fn matrix_to_json(m: &DMatrix<C64>) -> MatrixJson {
    (0..m.nrows()).map(|i| (0..m.ncols()).map(|j| [m[(i, j)].re, m[(i, j)].im]).collect()).collect()
}

pub fn matrix_from_json(rows: &MatrixJson) -> Result<DMatrix<C64>> {
    let n = rows.len();
    let m = rows.first().map(|r| r.len()).unwrap_or(0);
    if rows.iter().any(|r| r.len() != m) {
        return Err(Error::Parse("ragged matrix".into()));
    }
    Ok(DMatrix::from_fn(n, m, |i, j| C64::new(rows[i][j][0], rows[i][j][1])))
}

/// Nonzero entries (|c| > drop_tol).
pub fn operator_to_json(op: &DenseOperator, drop_tol: f64) -> OperatorJson {
    let s = &op.space;
    let b = s.basis();
    let mut entries = Vec::new();
    for j in 0..s.dim() {
        for i in 0..s.dim() {
            let c = op.mat[(i, j)];
            if c.norm() > drop_tol {
                entries.push((b[i].clone(), b[j].clone(), c.re, c.im));
            }
        }
    }
    OperatorJson { d: s.d(), n_max: s.n_max(), epsilon: s.epsilon(), entries }
}

pub fn operator_from_json(j: &OperatorJson) -> Result<DenseOperator> {
    let space = FockSpace::new(j.d, j.n_max, j.epsilon)?;
    let mut op = DenseOperator::zeros(&space);
    for (out, inp, re, im) in &j.entries {
        let i = space.index_of(out).ok_or_else(|| Error::Parse(format!("index {out:?} outside the space")))?;
        let k = space.index_of(inp).ok_or_else(|| Error::Parse(format!("index {inp:?} outside the space")))?;
        op.mat[(i, k)] += C64::new(*re, *im);
    }
    Ok(op)
}

pub fn vector_to_json(v: &FockVector, drop_tol: f64) -> VectorJson {
    let s = &v.space;
    let entries = s
        .basis()
        .iter()
        .zip(v.coeffs.iter())
        .filter(|(_, c)| c.norm() > drop_tol)
        .map(|(a, c)| (a.clone(), c.re, c.im))
        .collect();
    VectorJson { d: s.d(), n_max: s.n_max(), epsilon: s.epsilon(), entries }
}

pub fn vector_from_json(j: &VectorJson) -> Result<FockVector> {
    let space = FockSpace::new(j.d, j.n_max, j.epsilon)?;
    let mut c = DVector::zeros(space.dim());
    for (a, re, im) in &j.entries {
        let i = space.index_of(a).ok_or_else(|| Error::Parse(format!("index {a:?} outside the space")))?;
        c[i] += C64::new(*re, *im);
    }
    FockVector::from_coeffs(&space, c)
}

pub fn symbol_to_json(b: &PolySymbol) -> SymbolJson {
    let terms = b.terms().iter().map(|((beta, gamma), c)| (beta.clone(), gamma.clone(), c.re, c.im)).collect();
    let (p, q) = match b.homogeneity() {
        Some((p, q)) => (Some(p), Some(q)),
        None => (None, None),
    };
    SymbolJson { terms, p, q }
}

/// `d` is needed for the zero symbol; otherwise it must match the index length.
pub fn symbol_from_json(j: &SymbolJson, d: usize) -> Result<PolySymbol> {
    let mut b = PolySymbol::zero(d);
    for (beta, gamma, re, im) in &j.terms {
        if beta.len() != d || gamma.len() != d {
            return Err(Error::DimensionMismatch { expected: d, got: beta.len().max(gamma.len()) });
        }
        b.add_term(beta.clone(), gamma.clone(), C64::new(*re, *im));
    }
    if let (Some(p), Some(q)) = (j.p, j.q) {
        b.check_homogeneous(p, q)?;
    }
    Ok(b)
}

pub fn trig_to_json(b: &TrigSymbol) -> TrigSymbolJson {
    let atoms = b
        .atoms
        .iter()
        .map(|(c, xi)| {
            let mut v = vec![c.re, c.im];
            for x in xi {
                v.push(x.re);
                v.push(x.im);
            }
            v
        })
        .collect();
    TrigSymbolJson { atoms }
}

pub fn trig_from_json(j: &TrigSymbolJson) -> Result<TrigSymbol> {
    let mut atoms = Vec::new();
    for a in &j.atoms {
        if a.len() < 2 || a.len() % 2 != 0 {
            return Err(Error::Parse("atom must hold re_c, im_c and interleaved ξ".into()));
        }
        let xi = a[2..].chunks(2).map(|p| C64::new(p[0], p[1])).collect();
        atoms.push((C64::new(a[0], a[1]), xi));
    }
    TrigSymbol::new(atoms)
}

pub fn model_to_json(m: &ModelSpec) -> ModelSpecJson {
    ModelSpecJson {
        a: matrix_to_json(&m.a),
        q_tensor: matrix_to_json(&m.q_tensor),
        epsilon: m.epsilon,
        n_max: m.n_max,
        v_norm: Some(m.v_norm),
    }
}

/// V_norm defaults to ‖2Q̃‖ when absent.
pub fn model_from_json(j: &ModelSpecJson) -> Result<ModelSpec> {
    let mut m = ModelSpec::new(matrix_from_json(&j.a)?, matrix_from_json(&j.q_tensor)?, j.epsilon, j.n_max)?;
    if let Some(v) = j.v_norm {
        if !(v > 0.0) {
            return Err(Error::InvalidArgument("V_norm must be positive".into()));
        }
        m.v_norm = v;
    }
    Ok(m)
}

pub fn parse_model(s: &str) -> Result<ModelSpec> {
    model_from_json(&serde_json::from_str(s).map_err(parse_err)?)
}

pub fn parse_symbol(s: &str, d: usize) -> Result<PolySymbol> {
    symbol_from_json(&serde_json::from_str(s).map_err(parse_err)?, d)
}

pub fn parse_trig(s: &str) -> Result<TrigSymbol> {
    trig_from_json(&serde_json::from_str(s).map_err(parse_err)?)
}

pub fn parse_operator(s: &str) -> Result<DenseOperator> {
    operator_from_json(&serde_json::from_str(s).map_err(parse_err)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn model_keys() {
        let m = ModelSpec::scalar(0.5, 0.2, 0.1, 10);
        let s = serde_json::to_string(&model_to_json(&m)).unwrap();
        assert!(s.contains("\"A\"") && s.contains("\"Qtensor\"") && s.contains("\"V_norm\""));
        assert_eq!(parse_model(&s).unwrap(), m);
    }
}
