//! The experiment file format: one JSON document describing an ensemble,
//! optional named measurements, and optional measurement chains. Complex
//! numbers are `[re, im]` pairs; matrices are row-major nested lists.

use std::collections::BTreeMap;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use qinfo::{DensityOperator, Ensemble, Operator, Povm, ProjectiveMeasurement, QError};

use crate::CliError;

pub type Cx = [f64; 2];
pub type Ket = Vec<Cx>;
pub type Matrix = Vec<Vec<Cx>>;

fn cx(v: &Cx) -> Complex64 {
    Complex64::new(v[0], v[1])
}

fn to_cx(v: Complex64) -> Cx {
    [v.re, v.im]
}

fn parse_matrix(m: &Matrix, what: &str) -> Result<Operator, CliError> {
    let dim = m.len();
    if dim == 0 || m.iter().any(|row| row.len() != dim) {
        return Err(CliError::Parse(format!("{what}: matrix must be square")));
    }
    let entries: Vec<Complex64> = m.iter().flatten().map(cx).collect();
    Ok(Operator::from_rows(dim, &entries))
}

fn matrix_of(op: &Operator) -> Matrix {
    (0..op.dim())
        .map(|i| (0..op.dim()).map(|j| to_cx(op.get(i, j))).collect())
        .collect()
}

/// One ensemble member: a probability plus either a state vector or an
/// explicit density matrix.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MemberSpec {
    pub p: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ket: Option<Ket>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub matrix: Option<Matrix>,
}

/// A named measurement: an orthonormal basis, explicit projectors, or POVM
/// elements.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MeasurementSpec {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub basis: Option<Vec<Ket>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub projectors: Option<Vec<Matrix>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub povm: Option<Vec<Matrix>>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EnsembleFile {
    pub version: u32,
    pub members: Vec<MemberSpec>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub measurements: BTreeMap<String, MeasurementSpec>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub chains: BTreeMap<String, Vec<String>>,
}

/// A parsed measurement: projective, or a POVM (routed through Neumark
/// dilation by commands that need a projective family).
#[derive(Debug, Clone)]
pub enum MeasurementObject {
    Projective(ProjectiveMeasurement),
    Povm(Povm),
}

#[derive(Debug)]
pub struct Experiment {
    pub ensemble: Ensemble,
    pub measurements: BTreeMap<String, MeasurementObject>,
    pub chains: BTreeMap<String, Vec<String>>,
}

fn invariant_error(e: QError) -> CliError {
    CliError::Invariant(e.to_string())
}

impl EnsembleFile {
    pub fn parse_str(text: &str) -> Result<Self, CliError> {
        serde_json::from_str(text).map_err(|e| CliError::Parse(e.to_string()))
    }

    pub fn load(path: &std::path::Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Parse(format!("{}: {e}", path.display())))?;
        Self::parse_str(&text)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("file format serializes")
    }

    /// Validates and converts into runtime objects. Renormalizes state
    /// vectors, warning on stderr above 1e-9 deviation; deviations above
    /// 1e-6 are rejected.
    pub fn build(&self) -> Result<Experiment, CliError> {
        if self.version != 1 {
            return Err(CliError::Parse(format!(
                "unsupported file version {}",
                self.version
            )));
        }
        let mut probs = Vec::with_capacity(self.members.len());
        let mut states = Vec::with_capacity(self.members.len());
        for (i, member) in self.members.iter().enumerate() {
            probs.push(member.p);
            let state = match (&member.ket, &member.matrix) {
                (Some(ket), None) => {
                    let amps: Vec<Complex64> = ket.iter().map(cx).collect();
                    let norm: f64 = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
                    if (norm - 1.0).abs() > 1e-6 {
                        return Err(CliError::Invariant(format!(
                            "member {i}: ket norm {norm} deviates beyond 1e-6"
                        )));
                    }
                    if (norm - 1.0).abs() > 1e-9 {
                        eprintln!(
                            "warning: member {i}: renormalizing ket (norm deviation {:.3e})",
                            (norm - 1.0).abs()
                        );
                    }
                    DensityOperator::pure_state(&amps)
                }
                (None, Some(matrix)) => {
                    let op = parse_matrix(matrix, &format!("member {i}"))?;
                    qinfo::validate_density(op).map_err(invariant_error)?
                }
                _ => {
                    return Err(CliError::Parse(format!(
                        "member {i}: exactly one of `ket` or `matrix` required"
                    )))
                }
            };
            states.push(state);
        }
        let ensemble = Ensemble::new(probs, states).map_err(invariant_error)?;

        let mut measurements = BTreeMap::new();
        for (name, spec) in &self.measurements {
            let obj = match (&spec.basis, &spec.projectors, &spec.povm) {
                (Some(basis), None, None) => {
                    let vectors: Vec<Vec<Complex64>> = basis
                        .iter()
                        .map(|k| k.iter().map(cx).collect())
                        .collect();
                    MeasurementObject::Projective(
                        ProjectiveMeasurement::from_basis_vectors(&vectors)
                            .map_err(invariant_error)?,
                    )
                }
                (None, Some(mats), None) => {
                    let projectors = mats
                        .iter()
                        .map(|m| parse_matrix(m, &format!("measurement {name}")))
                        .collect::<Result<Vec<_>, _>>()?;
                    MeasurementObject::Projective(
                        ProjectiveMeasurement::new(projectors).map_err(invariant_error)?,
                    )
                }
                (None, None, Some(mats)) => {
                    let elements = mats
                        .iter()
                        .map(|m| parse_matrix(m, &format!("measurement {name}")))
                        .collect::<Result<Vec<_>, _>>()?;
                    MeasurementObject::Povm(Povm::new(elements).map_err(invariant_error)?)
                }
                _ => {
                    return Err(CliError::Parse(format!(
                        "measurement {name}: exactly one of `basis`, `projectors`, `povm` required"
                    )))
                }
            };
            measurements.insert(name.clone(), obj);
        }

        for (name, chain) in &self.chains {
            for step in chain {
                match measurements.get(step) {
                    None => {
                        return Err(CliError::Reference(format!(
                            "chain {name}: unknown measurement `{step}`"
                        )))
                    }
                    Some(MeasurementObject::Povm(_)) => {
                        return Err(CliError::Parse(format!(
                            "chain {name}: step `{step}` is a POVM; chains take projective measurements"
                        )))
                    }
                    Some(MeasurementObject::Projective(_)) => {}
                }
            }
        }

        Ok(Experiment {
            ensemble,
            measurements,
            chains: self.chains.clone(),
        })
    }

    /// Serializes runtime objects back into the file format (density
    /// matrices and projector lists; POVMs as element lists).
    pub fn from_experiment(
        ensemble: &Ensemble,
        measurements: &BTreeMap<String, MeasurementObject>,
        chains: &BTreeMap<String, Vec<String>>,
    ) -> Self {
        let members = ensemble
            .probs()
            .iter()
            .zip(ensemble.states())
            .map(|(p, rho)| MemberSpec {
                p: *p,
                ket: None,
                matrix: Some(matrix_of(rho.operator())),
            })
            .collect();
        let measurements = measurements
            .iter()
            .map(|(name, obj)| {
                let spec = match obj {
                    MeasurementObject::Projective(m) => MeasurementSpec {
                        basis: None,
                        projectors: Some(m.projectors().iter().map(matrix_of).collect()),
                        povm: None,
                    },
                    MeasurementObject::Povm(p) => MeasurementSpec {
                        basis: None,
                        projectors: None,
                        povm: Some(p.elements().iter().map(matrix_of).collect()),
                    },
                };
                (name.clone(), spec)
            })
            .collect();
        Self {
            version: 1,
            members,
            measurements,
            chains: chains.clone(),
        }
    }
}
