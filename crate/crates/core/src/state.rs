//! Density operators, subsystem layouts, and preparer-channel ensembles.

use num_complex::Complex64;

use crate::error::{QError, Result};
use crate::operator::Operator;

/// Absolute tolerance for the density-operator invariants.
pub const DENSITY_TOL: f64 = 1e-10;

/// Trace-one positive Hermitian operator; the universal state carrier.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityOperator {
    op: Operator,
}

impl DensityOperator {
    /// Validates the three invariants (hermiticity, unit trace, positivity)
    /// and wraps the operator. The error names the failed invariant and its
    /// magnitude.
    pub fn new(op: Operator) -> Result<Self> {
        let herm = op.hermiticity_defect();
        if herm > DENSITY_TOL {
            return Err(QError::NotHermitian { defect: herm });
        }
        let tr = (op.trace() - Complex64::new(1.0, 0.0)).norm();
        if tr > DENSITY_TOL {
            return Err(QError::NotUnitTrace { defect: tr });
        }
        let min = op
            .eigenvalues_hermitian()
            .first()
            .copied()
            .unwrap_or(0.0);
        if min < -DENSITY_TOL {
            return Err(QError::NotPositive {
                min_eigenvalue: min,
            });
        }
        Ok(Self { op })
    }

    /// Wraps without validation. For internal constructions that are valid
    /// by algebra (tensor products, unitary conjugations of valid states).
    pub(crate) fn new_unchecked(op: Operator) -> Self {
        Self { op }
    }

    /// Pure state |ψ⟩⟨ψ| from amplitudes (renormalized).
    pub fn pure_state(amplitudes: &[Complex64]) -> Self {
        Self {
            op: Operator::ket_projector(amplitudes),
        }
    }

    pub fn maximally_mixed(dim: usize) -> Self {
        Self {
            op: Operator::identity(dim).scale(1.0 / dim as f64),
        }
    }

    pub fn dim(&self) -> usize {
        self.op.dim()
    }

    pub fn operator(&self) -> &Operator {
        &self.op
    }

    /// Tr(ρ²); equals 1 for pure states.
    pub fn purity(&self) -> f64 {
        self.op.mul(&self.op).trace().re
    }
}

/// Validates an arbitrary operator as a density operator.
pub fn validate_density(op: Operator) -> Result<DensityOperator> {
    DensityOperator::new(op)
}

/// Ordered tensor factorization: labeled subsystems with their dimensions.
#[derive(Debug, Clone, PartialEq)]
pub struct SubsystemLayout {
    parts: Vec<(String, usize)>,
}

impl SubsystemLayout {
    pub fn new<S: Into<String>>(parts: Vec<(S, usize)>) -> Result<Self> {
        let parts: Vec<(String, usize)> =
            parts.into_iter().map(|(l, d)| (l.into(), d)).collect();
        for (i, (label, _)) in parts.iter().enumerate() {
            if parts[..i].iter().any(|(l, _)| l == label) {
                return Err(QError::DuplicateLabel(label.clone()));
            }
        }
        Ok(Self { parts })
    }

    pub fn parts(&self) -> &[(String, usize)] {
        &self.parts
    }

    pub fn labels(&self) -> Vec<&str> {
        self.parts.iter().map(|(l, _)| l.as_str()).collect()
    }

    pub fn dims(&self) -> Vec<usize> {
        self.parts.iter().map(|(_, d)| *d).collect()
    }

    pub fn total_dim(&self) -> usize {
        self.parts.iter().map(|(_, d)| d).product()
    }

    pub fn index_of(&self, label: &str) -> Result<usize> {
        self.parts
            .iter()
            .position(|(l, _)| l == label)
            .ok_or_else(|| QError::UnknownLabel(label.to_string()))
    }

    pub fn contains(&self, label: &str) -> bool {
        self.parts.iter().any(|(l, _)| l == label)
    }
}

/// A density operator together with its subsystem layout.
#[derive(Debug, Clone)]
pub struct MultipartiteState {
    state: DensityOperator,
    layout: SubsystemLayout,
}

impl MultipartiteState {
    pub fn new(state: DensityOperator, layout: SubsystemLayout) -> Result<Self> {
        let product = layout.total_dim();
        if product != state.dim() {
            return Err(QError::LayoutMismatch {
                product,
                dim: state.dim(),
            });
        }
        Ok(Self { state, layout })
    }

    pub fn state(&self) -> &DensityOperator {
        &self.state
    }

    pub fn layout(&self) -> &SubsystemLayout {
        &self.layout
    }

    pub fn dim(&self) -> usize {
        self.state.dim()
    }

    /// Reduced state on the kept labels (original order), tracing out
    /// `discard`. Discarding every subsystem is an error.
    pub fn partial_trace(&self, discard: &[&str]) -> Result<MultipartiteState> {
        for label in discard {
            if !self.layout.contains(label) {
                return Err(QError::UnknownLabel((*label).to_string()));
            }
        }
        let keep_mask: Vec<bool> = self
            .layout
            .parts
            .iter()
            .map(|(l, _)| !discard.contains(&l.as_str()))
            .collect();
        if keep_mask.iter().all(|k| !k) {
            return Err(QError::EmptyKeepSet);
        }
        if keep_mask.iter().all(|k| *k) {
            return Ok(self.clone());
        }

        let dims = self.layout.dims();
        let n = dims.len();
        let kept_dims: Vec<usize> = (0..n).filter(|&i| keep_mask[i]).map(|i| dims[i]).collect();
        let traced_dims: Vec<usize> =
            (0..n).filter(|&i| !keep_mask[i]).map(|i| dims[i]).collect();
        let kept_total: usize = kept_dims.iter().product();
        let traced_total: usize = traced_dims.iter().product();

        // Full index from (kept multi-index, traced multi-index), row-major
        // over the original factor order.
        let compose = |kept: usize, traced: usize| -> usize {
            let mut kd = kept;
            let mut td = traced;
            let mut kept_digits = vec![0usize; kept_dims.len()];
            for (slot, d) in kept_dims.iter().enumerate().rev() {
                kept_digits[slot] = kd % d;
                kd /= d;
            }
            let mut traced_digits = vec![0usize; traced_dims.len()];
            for (slot, d) in traced_dims.iter().enumerate().rev() {
                traced_digits[slot] = td % d;
                td /= d;
            }
            let mut idx = 0usize;
            let mut ki = 0usize;
            let mut ti = 0usize;
            for (factor, d) in dims.iter().enumerate() {
                idx *= d;
                if keep_mask[factor] {
                    idx += kept_digits[ki];
                    ki += 1;
                } else {
                    idx += traced_digits[ti];
                    ti += 1;
                }
            }
            idx
        };

        let mut reduced = Operator::zeros(kept_total);
        let full = self.state.operator();
        for i in 0..kept_total {
            for j in 0..kept_total {
                let mut sum = Complex64::new(0.0, 0.0);
                for t in 0..traced_total {
                    sum += full.get(compose(i, t), compose(j, t));
                }
                reduced.set(i, j, sum);
            }
        }

        let kept_parts: Vec<(String, usize)> = self
            .layout
            .parts
            .iter()
            .zip(&keep_mask)
            .filter(|(_, k)| **k)
            .map(|((l, d), _)| (l.clone(), *d))
            .collect();
        MultipartiteState::new(
            DensityOperator::new_unchecked(reduced),
            SubsystemLayout::new(kept_parts)?,
        )
    }

    /// Reduced state on exactly `subset`, preserving the layout order.
    pub fn reduce_to(&self, subset: &[&str]) -> Result<MultipartiteState> {
        if subset.is_empty() {
            return Err(QError::EmptySubset);
        }
        for label in subset {
            if !self.layout.contains(label) {
                return Err(QError::UnknownLabel((*label).to_string()));
            }
        }
        let discard: Vec<&str> = self
            .layout
            .parts
            .iter()
            .map(|(l, _)| l.as_str())
            .filter(|l| !subset.contains(l))
            .collect();
        if discard.is_empty() {
            return Ok(self.clone());
        }
        self.partial_trace(&discard)
    }
}

/// The preparer's resource: states ρ_i drawn with probabilities p_i.
#[derive(Debug, Clone)]
pub struct Ensemble {
    probs: Vec<f64>,
    states: Vec<DensityOperator>,
}

impl Ensemble {
    pub fn new(probs: Vec<f64>, states: Vec<DensityOperator>) -> Result<Self> {
        if probs.len() != states.len() {
            return Err(QError::EnsembleLengthMismatch {
                probs: probs.len(),
                states: states.len(),
            });
        }
        if probs.is_empty() {
            return Err(QError::EmptyEnsemble);
        }
        let sum: f64 = probs.iter().sum();
        if (sum - 1.0).abs() > DENSITY_TOL {
            return Err(QError::ProbabilitiesNotNormalized { sum });
        }
        let dim = states[0].dim();
        for s in &states {
            if s.dim() != dim {
                return Err(QError::DimensionMismatch {
                    expected: dim,
                    got: s.dim(),
                });
            }
        }
        Ok(Self { probs, states })
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn states(&self) -> &[DensityOperator] {
        &self.states
    }

    /// Channel dimension d_Q shared by all member states.
    pub fn channel_dim(&self) -> usize {
        self.states[0].dim()
    }

    /// The average state ρ = Σ p_i ρ_i.
    pub fn average_state(&self) -> DensityOperator {
        let mut acc = Operator::zeros(self.channel_dim());
        for (p, s) in self.probs.iter().zip(&self.states) {
            acc = acc.add(&s.operator().scale(*p));
        }
        DensityOperator::new_unchecked(acc)
    }
}

/// ρ_XQ = Σ_i p_i |x_i⟩⟨x_i| ⊗ ρ_i, block-diagonal on X ⊗ Q with one
/// X level per ensemble member.
pub fn assemble_xq(e: &Ensemble) -> MultipartiteState {
    let n = e.len();
    let dq = e.channel_dim();
    let mut acc = Operator::zeros(n * dq);
    for (i, (p, rho)) in e.probs().iter().zip(e.states()).enumerate() {
        let block = Operator::basis_projector(n, i).kron(&rho.operator().scale(*p));
        acc = acc.add(&block);
    }
    let layout = SubsystemLayout::new(vec![("X", n), ("Q", dq)]).unwrap();
    MultipartiteState::new(DensityOperator::new_unchecked(acc), layout).unwrap()
}
