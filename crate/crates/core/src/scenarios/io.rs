//! JSON documents describing named scenarios.
//!
//! Matrices are stored row-major as nested arrays of `[re, im]` pairs.

use super::named::{Expectation, NamedScenario, ScenarioBody, StateProbe};
use crate::error::{Error, Result};
use crate::linalg::{BipartiteLayout, ComplexMatrix};
use crate::real::Real;
use crate::state::{DensityMatrix, Effect, PreferredBasis};
use crate::witness::{Scenario, SCHEMA_VERSION};
use num_complex::Complex;
use serde::{Deserialize, Serialize};

pub type MatrixDoc = Vec<Vec<[f64; 2]>>;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DynamicsDoc {
    pub dim_s: usize,
    pub dim_e: usize,
    pub rho_s0: MatrixDoc,
    pub env0: MatrixDoc,
    pub u_tau0: MatrixDoc,
    pub u_t_tau: MatrixDoc,
    pub effect: MatrixDoc,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub basis_order: Option<Vec<usize>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StateLevelDoc {
    pub dim_s: usize,
    pub dim_e: usize,
    pub rho_se: MatrixDoc,
    pub joint_effect: MatrixDoc,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub basis_order: Option<Vec<usize>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum BodyDoc {
    Dynamics(DynamicsDoc),
    StateLevel(StateLevelDoc),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioDocument {
    pub schema_version: u32,
    pub name: String,
    #[serde(flatten)]
    pub body: BodyDoc,
    #[serde(default)]
    pub expected: Vec<Expectation>,
}

pub fn matrix_to_doc<T: Real>(m: &ComplexMatrix<T>) -> MatrixDoc {
    (0..m.rows())
        .map(|i| (0..m.cols()).map(|j| {
            let z = m.get(i, j);
            [z.re.as_f64(), z.im.as_f64()]
        }).collect())
        .collect()
}

pub fn matrix_from_doc<T: Real>(doc: &MatrixDoc) -> Result<ComplexMatrix<T>> {
    let rows = doc.len();
    let cols = doc.first().map_or(0, Vec::len);
    if doc.iter().any(|r| r.len() != cols) {
        return Err(Error::DimensionMismatch("ragged matrix rows".into()));
    }
    if doc.iter().flatten().flatten().any(|x| !x.is_finite()) {
        return Err(Error::InvalidArgument("matrix entry is not finite".into()));
    }
    let entries: Vec<Complex<T>> = doc.iter().flatten().map(|[re, im]| Complex::new(T::lit(*re), T::lit(*im))).collect();
    ComplexMatrix::from_row_major(rows, cols, &entries)
}

fn basis_from(order: &Option<Vec<usize>>, dim: usize) -> Result<PreferredBasis> {
    let basis = match order {
        Some(o) => PreferredBasis::new(o.clone())?,
        None => PreferredBasis::computational(dim),
    };
    if basis.dim() != dim {
        return Err(Error::DimensionMismatch(format!("basis of size {} for dimension {dim}", basis.dim())));
    }
    Ok(basis)
}

fn basis_to(basis: &PreferredBasis) -> Option<Vec<usize>> {
    (*basis != PreferredBasis::computational(basis.dim())).then(|| basis.ordering().to_vec())
}

pub fn to_document<T: Real>(named: &NamedScenario<T>) -> ScenarioDocument {
    let body = match &named.body {
        ScenarioBody::Dynamics(sc) => BodyDoc::Dynamics(DynamicsDoc {
            dim_s: sc.layout().dim_s,
            dim_e: sc.layout().dim_e,
            rho_s0: matrix_to_doc(sc.rho_s0().matrix()),
            env0: matrix_to_doc(sc.env0().matrix()),
            u_tau0: matrix_to_doc(sc.u_tau0()),
            u_t_tau: matrix_to_doc(sc.u_t_tau()),
            effect: matrix_to_doc(sc.effect().matrix()),
            basis_order: basis_to(sc.basis()),
        }),
        ScenarioBody::StateLevel(p) => BodyDoc::StateLevel(StateLevelDoc {
            dim_s: p.layout.dim_s,
            dim_e: p.layout.dim_e,
            rho_se: matrix_to_doc(p.rho_se.matrix()),
            joint_effect: matrix_to_doc(p.joint_effect.matrix()),
            basis_order: basis_to(&p.basis),
        }),
    };
    ScenarioDocument { schema_version: SCHEMA_VERSION, name: named.name.clone(), body, expected: named.expected.clone() }
}

/// Validates a document and builds the scenario it describes.
pub fn from_document<T: Real>(doc: &ScenarioDocument) -> Result<NamedScenario<T>> {
    if doc.schema_version != SCHEMA_VERSION {
        return Err(Error::InvalidArgument(format!(
            "schema version {} not supported (expected {SCHEMA_VERSION})",
            doc.schema_version
        )));
    }
    let body = match &doc.body {
        BodyDoc::Dynamics(d) => {
            let layout = BipartiteLayout::new(d.dim_s, d.dim_e)?;
            ScenarioBody::Dynamics(Scenario::new(
                layout,
                DensityMatrix::new(matrix_from_doc(&d.rho_s0)?)?,
                DensityMatrix::new(matrix_from_doc(&d.env0)?)?,
                matrix_from_doc(&d.u_tau0)?,
                matrix_from_doc(&d.u_t_tau)?,
                Effect::new(matrix_from_doc(&d.effect)?)?,
                basis_from(&d.basis_order, d.dim_s)?,
            )?)
        }
        BodyDoc::StateLevel(d) => {
            let layout = BipartiteLayout::new(d.dim_s, d.dim_e)?;
            ScenarioBody::StateLevel(StateProbe::new(
                layout,
                DensityMatrix::new(matrix_from_doc(&d.rho_se)?)?,
                Effect::new(matrix_from_doc(&d.joint_effect)?)?,
                basis_from(&d.basis_order, d.dim_s)?,
            )?)
        }
    };
    Ok(NamedScenario { name: doc.name.clone(), body, expected: doc.expected.clone() })
}

pub fn scenario_from_json<T: Real>(json: &str) -> Result<NamedScenario<T>> {
    let doc: ScenarioDocument = serde_json::from_str(json).map_err(|e| Error::Serialization(e.to_string()))?;
    from_document(&doc)
}

pub fn scenario_to_json<T: Real>(named: &NamedScenario<T>) -> Result<String> {
    serde_json::to_string_pretty(&to_document(named)).map_err(|e| Error::Serialization(e.to_string()))
}
