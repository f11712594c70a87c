//! The no-collapse ancilla model of measurement: an ancilla register is
//! entangled with the channel by a unitary built from the measurement's
//! projectors, and every post-measurement quantity is read off the joint
//! state. Includes the decoherence (dephasing) variant, Neumark dilation
//! for POVMs, and sequential measurement chains.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::entropy::{entropy_of_spectrum, shannon_raw};
use crate::error::{QError, Result};
use crate::operator::Operator;
use crate::state::{DensityOperator, Ensemble, MultipartiteState, SubsystemLayout};

const MEAS_TOL: f64 = 1e-10;

/// Outcomes with marginal probability at or below this are dropped from
/// posterior computations; their residual-information terms are zero in
/// the limit.
pub const PROB_FLOOR: f64 = 1e-12;

/// A complete family of mutually orthogonal Hermitian projectors on Q.
#[derive(Debug, Clone)]
pub struct ProjectiveMeasurement {
    projectors: Vec<Operator>,
}

impl ProjectiveMeasurement {
    pub fn new(projectors: Vec<Operator>) -> Result<Self> {
        if projectors.is_empty() {
            return Err(QError::InvalidMeasurement("no projectors".into()));
        }
        let dim = projectors[0].dim();
        let mut sum = Operator::zeros(dim);
        for (a, p) in projectors.iter().enumerate() {
            if p.dim() != dim {
                return Err(QError::DimensionMismatch {
                    expected: dim,
                    got: p.dim(),
                });
            }
            let herm = p.hermiticity_defect();
            if herm > MEAS_TOL {
                return Err(QError::InvalidMeasurement(format!(
                    "projector {a} is not Hermitian (defect {herm:.3e})"
                )));
            }
            let idem = p.mul(p).max_abs_diff(p);
            if idem > MEAS_TOL {
                return Err(QError::InvalidMeasurement(format!(
                    "projector {a} is not idempotent (defect {idem:.3e})"
                )));
            }
            sum = sum.add(p);
        }
        for a in 0..projectors.len() {
            for b in 0..a {
                let cross = projectors[a].mul(&projectors[b]).max_abs();
                if cross > MEAS_TOL {
                    return Err(QError::InvalidMeasurement(format!(
                        "projectors {a} and {b} are not orthogonal (defect {cross:.3e})"
                    )));
                }
            }
        }
        let complete = sum.max_abs_diff(&Operator::identity(dim));
        if complete > MEAS_TOL {
            return Err(QError::InvalidMeasurement(format!(
                "projectors do not sum to identity (defect {complete:.3e})"
            )));
        }
        Ok(Self { projectors })
    }

    /// The measurement in the computational basis.
    pub fn computational_basis(dim: usize) -> Self {
        Self {
            projectors: (0..dim).map(|k| Operator::basis_projector(dim, k)).collect(),
        }
    }

    /// Rank-1 projectors onto the columns of a unitary.
    pub fn from_basis_unitary(u: &Operator) -> Result<Self> {
        let dim = u.dim();
        let mut projectors = Vec::with_capacity(dim);
        for k in 0..dim {
            let mut p = Operator::zeros(dim);
            for i in 0..dim {
                for j in 0..dim {
                    p.set(i, j, u.get(i, k) * u.get(j, k).conj());
                }
            }
            projectors.push(p);
        }
        Self::new(projectors)
    }

    /// Rank-1 projectors onto a list of orthonormal basis vectors.
    pub fn from_basis_vectors(vectors: &[Vec<Complex64>]) -> Result<Self> {
        if vectors.is_empty() {
            return Err(QError::InvalidMeasurement("no basis vectors".into()));
        }
        let dim = vectors[0].len();
        if vectors.len() != dim {
            return Err(QError::InvalidMeasurement(format!(
                "{} vectors cannot form a complete basis in dimension {dim}",
                vectors.len()
            )));
        }
        let projectors = vectors
            .iter()
            .map(|v| Operator::ket_projector(v))
            .collect();
        Self::new(projectors)
    }

    pub fn outcomes(&self) -> usize {
        self.projectors.len()
    }

    pub fn dim(&self) -> usize {
        self.projectors[0].dim()
    }

    pub fn projectors(&self) -> &[Operator] {
        &self.projectors
    }

    /// Views the measurement as a POVM (projectors are valid elements).
    pub fn to_povm(&self) -> Povm {
        Povm {
            elements: self.projectors.clone(),
        }
    }
}

/// Positive elements E_α ≥ 0 summing to the identity.
#[derive(Debug, Clone)]
pub struct Povm {
    elements: Vec<Operator>,
}

impl Povm {
    pub fn new(elements: Vec<Operator>) -> Result<Self> {
        if elements.is_empty() {
            return Err(QError::InvalidPovm("no elements".into()));
        }
        let dim = elements[0].dim();
        let mut sum = Operator::zeros(dim);
        for (a, e) in elements.iter().enumerate() {
            if e.dim() != dim {
                return Err(QError::DimensionMismatch {
                    expected: dim,
                    got: e.dim(),
                });
            }
            let herm = e.hermiticity_defect();
            if herm > MEAS_TOL {
                return Err(QError::InvalidPovm(format!(
                    "element {a} is not Hermitian (defect {herm:.3e})"
                )));
            }
            let min = e.eigenvalues_hermitian().first().copied().unwrap_or(0.0);
            if min < -MEAS_TOL {
                return Err(QError::InvalidPovm(format!(
                    "element {a} is not positive (min eigenvalue {min:.3e})"
                )));
            }
            sum = sum.add(e);
        }
        let complete = sum.max_abs_diff(&Operator::identity(dim));
        if complete > MEAS_TOL {
            return Err(QError::InvalidPovm(format!(
                "elements do not sum to identity (defect {complete:.3e})"
            )));
        }
        Ok(Self { elements })
    }

    pub fn outcomes(&self) -> usize {
        self.elements.len()
    }

    pub fn dim(&self) -> usize {
        self.elements[0].dim()
    }

    pub fn elements(&self) -> &[Operator] {
        &self.elements
    }
}

/// Conditional, marginal, and posterior outcome probabilities for an
/// ensemble under a measurement.
#[derive(Debug, Clone)]
pub struct OutcomeTable {
    /// p_{α|i}, indexed [i][α].
    pub conditional: Vec<Vec<f64>>,
    /// p_α = Σ_i p_i p_{α|i}.
    pub marginal: Vec<f64>,
    /// p_{i|α} = p_i p_{α|i} / p_α, indexed [α][i]; rows for outcomes with
    /// p_α ≤ PROB_FLOOR are all zero.
    pub posterior: Vec<Vec<f64>>,
}

impl OutcomeTable {
    fn from_conditionals(priors: &[f64], conditional: Vec<Vec<f64>>) -> Self {
        let outcomes = conditional[0].len();
        let mut marginal = vec![0.0; outcomes];
        for (p, row) in priors.iter().zip(&conditional) {
            for (a, q) in row.iter().enumerate() {
                marginal[a] += p * q;
            }
        }
        let posterior = (0..outcomes)
            .map(|a| {
                if marginal[a] <= PROB_FLOOR {
                    vec![0.0; priors.len()]
                } else {
                    priors
                        .iter()
                        .zip(&conditional)
                        .map(|(p, row)| p * row[a] / marginal[a])
                        .collect()
                }
            })
            .collect();
        Self {
            conditional,
            marginal,
            posterior,
        }
    }
}

/// Builds the outcome statistics p_{α|i} = Tr(E_α ρ_i) for any POVM
/// (projective measurements included via `to_povm`).
pub fn outcome_table(e: &Ensemble, povm: &Povm) -> Result<OutcomeTable> {
    if povm.dim() != e.channel_dim() {
        return Err(QError::DimensionMismatch {
            expected: e.channel_dim(),
            got: povm.dim(),
        });
    }
    let conditional: Vec<Vec<f64>> = e
        .states()
        .iter()
        .map(|rho| {
            povm.elements()
                .iter()
                .map(|el| el.mul(rho.operator()).trace().re.max(0.0))
                .collect()
        })
        .collect();
    Ok(OutcomeTable::from_conditionals(e.probs(), conditional))
}

/// U_QA = Σ_α P_α ⊗ U_α with U_α the cyclic shift mapping |0⟩ ↦ |α⟩ on the
/// ancilla. Unitary for any complete projector family.
pub fn build_u_qa(m: &ProjectiveMeasurement, ancilla_dim: usize) -> Result<Operator> {
    build_u_qa_with(m, &shift_unitaries(m.outcomes(), ancilla_dim)?)
}

/// Modular-shift unitaries |k⟩ ↦ |k+α mod d⟩ for α = 0..outcomes.
fn shift_unitaries(outcomes: usize, ancilla_dim: usize) -> Result<Vec<Operator>> {
    if ancilla_dim < outcomes {
        return Err(QError::AncillaTooSmall {
            ancilla: ancilla_dim,
            outcomes,
        });
    }
    Ok((0..outcomes)
        .map(|alpha| {
            let mut u = Operator::zeros(ancilla_dim);
            for k in 0..ancilla_dim {
                u.set((k + alpha) % ancilla_dim, k, Complex64::new(1.0, 0.0));
            }
            u
        })
        .collect())
}

/// U_QA with caller-supplied ancilla unitaries; the images U_α|0⟩ must be
/// mutually orthogonal for the outcome record to be readable.
pub fn build_u_qa_with(m: &ProjectiveMeasurement, us: &[Operator]) -> Result<Operator> {
    if us.len() != m.outcomes() {
        return Err(QError::InvalidMeasurement(format!(
            "{} ancilla unitaries for {} outcomes",
            us.len(),
            m.outcomes()
        )));
    }
    let da = us[0].dim();
    let mut u = Operator::zeros(m.dim() * da);
    for (p, ua) in m.projectors().iter().zip(us) {
        if ua.dim() != da {
            return Err(QError::DimensionMismatch {
                expected: da,
                got: ua.dim(),
            });
        }
        u = u.add(&p.kron(ua));
    }
    Ok(u)
}

fn check_xq_layout(s: &MultipartiteState, q_dim: usize) -> Result<()> {
    let parts = s.layout().parts();
    if parts.len() != 2 || parts[1].0 != "Q" {
        return Err(QError::InvalidMeasurement(
            "expected a bipartite layout (X, Q)".into(),
        ));
    }
    if parts[1].1 != q_dim {
        return Err(QError::DimensionMismatch {
            expected: q_dim,
            got: parts[1].1,
        });
    }
    Ok(())
}

/// Appends an ancilla in |0⟩ and conjugates by 1_X ⊗ U_QA. The result lives
/// on (X, Q, A) with ancilla dimension equal to the outcome count.
pub fn apply_measurement(
    s: &MultipartiteState,
    m: &ProjectiveMeasurement,
) -> Result<MultipartiteState> {
    apply_measurement_with(s, m, &shift_unitaries(m.outcomes(), m.outcomes())?)
}

/// As `apply_measurement`, but with caller-supplied ancilla unitaries.
pub fn apply_measurement_with(
    s: &MultipartiteState,
    m: &ProjectiveMeasurement,
    us: &[Operator],
) -> Result<MultipartiteState> {
    check_xq_layout(s, m.dim())?;
    let da = us[0].dim();
    let nx = s.layout().parts()[0].1;
    let initial = s
        .state()
        .operator()
        .kron(&Operator::basis_projector(da, 0));
    let u_full = Operator::identity(nx).kron(&build_u_qa_with(m, us)?);
    let evolved = initial.conjugate_by(&u_full);
    let layout = SubsystemLayout::new(vec![
        (s.layout().parts()[0].0.clone(), nx),
        ("Q".to_string(), m.dim()),
        ("A".to_string(), da),
    ])?;
    MultipartiteState::new(DensityOperator::new_unchecked(evolved), layout)
}

/// Traces out Q from a post-measurement (X, Q, A) state; the result is
/// diagonal in the product basis with entries p_i p_{α|i}.
pub fn reduce_xa(s: &MultipartiteState) -> Result<MultipartiteState> {
    let labels = s.layout().labels();
    if labels.len() != 3 || !labels.contains(&"Q") {
        return Err(QError::InvalidMeasurement(
            "expected a tripartite layout containing Q".into(),
        ));
    }
    s.partial_trace(&["Q"])
}

/// Information extracted by the measurement: I = H[p_α] - Σ_i p_i H[p_{α|i}]
/// (equivalently H(X:A) of the diagonal joint distribution).
pub fn extracted_info(e: &Ensemble, m: &ProjectiveMeasurement) -> Result<(f64, OutcomeTable)> {
    extracted_info_povm(e, &m.to_povm())
}

/// As `extracted_info`, for an arbitrary POVM (direct Tr(E_α ρ_i) route).
pub fn extracted_info_povm(e: &Ensemble, povm: &Povm) -> Result<(f64, OutcomeTable)> {
    let table = outcome_table(e, povm)?;
    let h_marginal = shannon_raw(&table.marginal);
    let h_cond: f64 = e
        .probs()
        .iter()
        .zip(&table.conditional)
        .map(|(p, row)| p * shannon_raw(row))
        .sum();
    Ok((h_marginal - h_cond, table))
}

/// Dephases the ancilla: zeroes every block coupling distinct ancilla basis
/// states. Trace-preserving; X and A marginals are untouched.
pub fn decohere_ancilla(s: &MultipartiteState) -> Result<MultipartiteState> {
    let parts = s.layout().parts();
    if parts.len() != 3 {
        return Err(QError::InvalidMeasurement(
            "expected a tripartite layout (X, Q, A)".into(),
        ));
    }
    let da = parts[2].1;
    let dim = s.dim();
    let mut out = Operator::zeros(dim);
    for i in 0..dim {
        for j in 0..dim {
            if i % da == j % da {
                out.set(i, j, s.state().operator().get(i, j));
            }
        }
    }
    MultipartiteState::new(DensityOperator::new_unchecked(out), s.layout().clone())
}

/// Residual conditional information S(X':Q'|A') in closed form:
/// Σ_α p_α [S(P_α ρ P_α / p_α) - Σ_i p_{i|α} S(ρ_{αi})] with
/// ρ_{αi} = P_α ρ_i P_α / p_{α|i}. Outcomes below PROB_FLOOR contribute 0.
pub fn residual_info(e: &Ensemble, m: &ProjectiveMeasurement) -> Result<f64> {
    if m.dim() != e.channel_dim() {
        return Err(QError::DimensionMismatch {
            expected: e.channel_dim(),
            got: m.dim(),
        });
    }
    let table = outcome_table(e, &m.to_povm())?;
    let rho = e.average_state();
    let mut total = 0.0;
    for (alpha, p_proj) in m.projectors().iter().enumerate() {
        let p_alpha = table.marginal[alpha];
        if p_alpha <= PROB_FLOOR {
            continue;
        }
        let mixed = p_proj
            .mul(rho.operator())
            .mul(p_proj)
            .scale(1.0 / p_alpha);
        let s_mixed = entropy_of_spectrum(&mixed)?;
        let mut s_members = 0.0;
        for (i, rho_i) in e.states().iter().enumerate() {
            let p_cond = table.conditional[i][alpha];
            if p_cond <= PROB_FLOOR {
                continue;
            }
            let collapsed = p_proj
                .mul(rho_i.operator())
                .mul(p_proj)
                .scale(1.0 / p_cond);
            s_members += table.posterior[alpha][i] * entropy_of_spectrum(&collapsed)?;
        }
        total += p_alpha * (s_mixed - s_members);
    }
    Ok(total)
}

/// Neumark dilation of a POVM: an isometry V: Q → Q̃ (dim n·d, built by
/// stacking the element square roots) and orthogonal block projectors P̃_α
/// with Tr(E_α ρ) = Tr(P̃_α VρV†).
#[derive(Debug, Clone)]
pub struct NeumarkDilation {
    measurement: ProjectiveMeasurement,
    isometry: DMatrix<Complex64>,
    completion: Operator,
}

impl NeumarkDilation {
    /// The projective measurement on the extended space.
    pub fn measurement(&self) -> &ProjectiveMeasurement {
        &self.measurement
    }

    /// The (n·d)×d isometry V with V†V = I_d.
    pub fn isometry(&self) -> &DMatrix<Complex64> {
        &self.isometry
    }

    /// A unitary on the extended space whose first d columns are V.
    pub fn completion(&self) -> &Operator {
        &self.completion
    }

    pub fn extended_dim(&self) -> usize {
        self.isometry.nrows()
    }

    /// VρV†, the embedded state on the extended space.
    pub fn embed_state(&self, rho: &DensityOperator) -> Result<DensityOperator> {
        if rho.dim() != self.isometry.ncols() {
            return Err(QError::DimensionMismatch {
                expected: self.isometry.ncols(),
                got: rho.dim(),
            });
        }
        let m = &self.isometry * rho.operator().matrix() * self.isometry.adjoint();
        Ok(DensityOperator::new_unchecked(Operator::from_matrix(m)))
    }

    /// Embeds every member of an ensemble.
    pub fn embed_ensemble(&self, e: &Ensemble) -> Result<Ensemble> {
        let states = e
            .states()
            .iter()
            .map(|rho| self.embed_state(rho))
            .collect::<Result<Vec<_>>>()?;
        Ensemble::new(e.probs().to_vec(), states)
    }
}

/// Builds the Neumark dilation of a POVM on dimension n·d.
pub fn neumark_dilate(p: &Povm) -> Result<NeumarkDilation> {
    let d = p.dim();
    let n = p.outcomes();
    let ext = n * d;

    // Block-column stack of the element square roots: V = Σ_α |α⟩ ⊗ E_α^{1/2}.
    let mut v = DMatrix::<Complex64>::zeros(ext, d);
    for (alpha, el) in p.elements().iter().enumerate() {
        let root = el.sqrt_psd(MEAS_TOL)?;
        for i in 0..d {
            for j in 0..d {
                v[(alpha * d + i, j)] = root.get(i, j);
            }
        }
    }

    // Complete V to a unitary: QR of [V | I] keeps the V columns first.
    let mut padded = DMatrix::<Complex64>::zeros(ext, ext + d);
    padded.view_mut((0, 0), (ext, d)).copy_from(&v);
    for k in 0..ext {
        padded[(k, d + k)] = Complex64::new(1.0, 0.0);
    }
    let mut completion = DMatrix::<Complex64>::zeros(ext, ext);
    let mut filled = 0usize;
    for col in 0..ext + d {
        if filled == ext {
            break;
        }
        let mut cand = padded.column(col).clone_owned();
        for k in 0..filled {
            let basis = completion.column(k);
            let overlap = basis.dotc(&cand);
            cand -= basis * overlap;
        }
        let norm = cand.norm();
        if norm > 1e-8 {
            completion.set_column(filled, &(cand / Complex64::new(norm, 0.0)));
            filled += 1;
        }
    }
    if filled != ext {
        return Err(QError::InvalidPovm("unitary completion failed".into()));
    }

    // P̃_α = |α⟩⟨α| ⊗ I_d.
    let projectors = (0..n)
        .map(|alpha| Operator::basis_projector(n, alpha).kron(&Operator::identity(d)))
        .collect();
    Ok(NeumarkDilation {
        measurement: ProjectiveMeasurement::new(projectors)?,
        isometry: v,
        completion: Operator::from_matrix(completion),
    })
}

/// Joint outcome statistics and per-step informations of a measurement chain.
#[derive(Debug, Clone)]
pub struct ChainResult {
    /// Outcome count of each step, in measurement order.
    pub outcome_counts: Vec<usize>,
    /// p_{α₁…α_m|i}, indexed [i][flattened tuple] (row-major over steps).
    pub joint_conditional: Vec<Vec<f64>>,
    /// H(X:A_j | A₁…A_{j-1}) per step, in bits.
    pub step_informations: Vec<f64>,
    /// Running sums of the per-step informations.
    pub cumulative: Vec<f64>,
}

impl ChainResult {
    pub fn total_information(&self) -> f64 {
        self.cumulative.last().copied().unwrap_or(0.0)
    }
}

/// Applies the chain in order (chain[0] first) and evaluates the joint
/// conditional probabilities Tr(K ρ_i K†) with K the composed projector
/// string, then splits the classical information by the chain rule.
pub fn sequential_measure(e: &Ensemble, chain: &[&ProjectiveMeasurement]) -> Result<ChainResult> {
    if chain.is_empty() {
        return Err(QError::InvalidMeasurement("empty measurement chain".into()));
    }
    let d = e.channel_dim();
    for m in chain {
        if m.dim() != d {
            return Err(QError::DimensionMismatch {
                expected: d,
                got: m.dim(),
            });
        }
    }
    let outcome_counts: Vec<usize> = chain.iter().map(|m| m.outcomes()).collect();
    let tuples: usize = outcome_counts.iter().product();

    let decode = |mut t: usize| -> Vec<usize> {
        let mut alphas = vec![0usize; chain.len()];
        for (j, c) in outcome_counts.iter().enumerate().rev() {
            alphas[j] = t % c;
            t /= c;
        }
        alphas
    };

    let mut joint_conditional = vec![vec![0.0f64; tuples]; e.len()];
    for t in 0..tuples {
        let alphas = decode(t);
        // K = P^{(m-1)}_{α_{m-1}} ··· P^{(0)}_{α_0}; the first measurement
        // acts on the state first.
        let mut k = chain[0].projectors()[alphas[0]].clone();
        for (j, m) in chain.iter().enumerate().skip(1) {
            k = m.projectors()[alphas[j]].mul(&k);
        }
        let kdag = k.adjoint();
        for (i, rho_i) in e.states().iter().enumerate() {
            joint_conditional[i][t] = k
                .mul(rho_i.operator())
                .mul(&kdag)
                .trace()
                .re
                .max(0.0);
        }
    }

    // Classical joint distribution p(i, α₁…α_m) = p_i p_{α|i}.
    let joint: Vec<Vec<f64>> = e
        .probs()
        .iter()
        .zip(&joint_conditional)
        .map(|(p, row)| row.iter().map(|q| p * q).collect())
        .collect();

    // Entropy of the marginal over (optionally X and) the first `steps`
    // ancillas, summing out the rest.
    let marginal_entropy = |include_x: bool, steps: usize, include_step: Option<usize>| -> f64 {
        // BTreeMap keeps accumulation order deterministic, so repeated runs
        // produce bit-identical entropies.
        let mut acc: std::collections::BTreeMap<(usize, Vec<usize>), f64> =
            std::collections::BTreeMap::new();
        for (i, row) in joint.iter().enumerate() {
            for (t, p) in row.iter().enumerate() {
                if *p <= 0.0 {
                    continue;
                }
                let alphas = decode(t);
                let mut key_steps: Vec<usize> = alphas[..steps].to_vec();
                if let Some(j) = include_step {
                    key_steps.push(alphas[j]);
                }
                let key = (if include_x { i } else { 0 }, key_steps);
                *acc.entry(key).or_insert(0.0) += p;
            }
        }
        shannon_raw(&acc.values().copied().collect::<Vec<_>>())
    };

    let mut step_informations = Vec::with_capacity(chain.len());
    let mut cumulative = Vec::with_capacity(chain.len());
    let mut running = 0.0;
    for j in 0..chain.len() {
        // I(X; A_j | A₁…A_{j-1}) = H(X,prev) + H(A_j,prev) - H(prev) - H(X,A_j,prev).
        let h_x_prev = marginal_entropy(true, j, None);
        let h_aj_prev = marginal_entropy(false, j, Some(j));
        let h_prev = marginal_entropy(false, j, None);
        let h_all = marginal_entropy(true, j, Some(j));
        let info = h_x_prev + h_aj_prev - h_prev - h_all;
        running += info;
        step_informations.push(info);
        cumulative.push(running);
    }

    Ok(ChainResult {
        outcome_counts,
        joint_conditional,
        step_informations,
        cumulative,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::entropy::{conditional_mutual, holevo_chi_of, mutual};
    use crate::random::{random_ensemble, random_povm, random_rank1_measurement, random_unitary};
    use crate::state::assemble_xq;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn ket0() -> DensityOperator {
        DensityOperator::pure_state(&[c(1.0, 0.0), c(0.0, 0.0)])
    }

    fn ket1() -> DensityOperator {
        DensityOperator::pure_state(&[c(0.0, 0.0), c(1.0, 0.0)])
    }

    fn ket_plus() -> DensityOperator {
        let inv = std::f64::consts::FRAC_1_SQRT_2;
        DensityOperator::pure_state(&[c(inv, 0.0), c(inv, 0.0)])
    }

    fn ket_minus() -> DensityOperator {
        let inv = std::f64::consts::FRAC_1_SQRT_2;
        DensityOperator::pure_state(&[c(inv, 0.0), c(-inv, 0.0)])
    }

    fn orthogonal_pair() -> Ensemble {
        Ensemble::new(vec![0.5, 0.5], vec![ket0(), ket1()]).unwrap()
    }

    fn bb84() -> Ensemble {
        Ensemble::new(
            vec![0.25; 4],
            vec![ket0(), ket1(), ket_plus(), ket_minus()],
        )
        .unwrap()
    }

    fn z_basis() -> ProjectiveMeasurement {
        ProjectiveMeasurement::computational_basis(2)
    }

    fn x_basis() -> ProjectiveMeasurement {
        ProjectiveMeasurement::new(vec![
            ket_plus().operator().clone(),
            ket_minus().operator().clone(),
        ])
        .unwrap()
    }

    #[test]
    fn build_u_qa_single_outcome_is_identity() {
        let m = ProjectiveMeasurement::new(vec![Operator::identity(2)]).unwrap();
        let u = build_u_qa(&m, 1).unwrap();
        assert!(u.max_abs_diff(&Operator::identity(2)) < 1e-15);
    }

    #[test]
    fn build_u_qa_z_measurement_is_cnot() {
        // Explicit expansion of P₀⊗I + P₁⊗shift.
        let u = build_u_qa(&z_basis(), 2).unwrap();
        let mut expect = Operator::zeros(4);
        expect.set(0, 0, c(1.0, 0.0));
        expect.set(1, 1, c(1.0, 0.0));
        expect.set(3, 2, c(1.0, 0.0));
        expect.set(2, 3, c(1.0, 0.0));
        assert!(u.max_abs_diff(&expect) < 1e-15);
    }

    #[test]
    fn build_u_qa_is_unitary() {
        for seed in 0..5 {
            let m = random_rank1_measurement(3, seed);
            let u = build_u_qa(&m, 3).unwrap();
            assert!(u.unitarity_defect() < 1e-9);
        }
    }

    #[test]
    fn build_u_qa_rejects_small_ancilla() {
        assert!(matches!(
            build_u_qa(&z_basis(), 1),
            Err(QError::AncillaTooSmall { .. })
        ));
    }

    #[test]
    fn apply_measurement_matches_explicit_sum() {
        // Eq-style oracle: Σ_{i,α,α'} p_i |x_i⟩⟨x_i| ⊗ P_α ρ_i P_α' ⊗ |α⟩⟨α'|.
        let e = bb84();
        let m = z_basis();
        let s = assemble_xq(&e);
        let post = apply_measurement(&s, &m).unwrap();
        let n = e.len();
        let dq = 2;
        let da = m.outcomes();
        let mut expect = Operator::zeros(n * dq * da);
        for (i, (p, rho_i)) in e.probs().iter().zip(e.states()).enumerate() {
            for (a, pa) in m.projectors().iter().enumerate() {
                for (b, pb) in m.projectors().iter().enumerate() {
                    let middle = pa.mul(rho_i.operator()).mul(pb).scale(*p);
                    let mut amp = Operator::zeros(da);
                    amp.set(a, b, c(1.0, 0.0));
                    let term = Operator::basis_projector(n, i).kron(&middle).kron(&amp);
                    expect = expect.add(&term);
                }
            }
        }
        assert!(post.state().operator().max_abs_diff(&expect) < 1e-10);
    }

    #[test]
    fn apply_measurement_identity_appends_ancilla() {
        let e = random_ensemble(2, 2, 9).unwrap();
        let s = assemble_xq(&e);
        let m = ProjectiveMeasurement::new(vec![Operator::identity(2)]).unwrap();
        let post = apply_measurement(&s, &m).unwrap();
        let expect = s
            .state()
            .operator()
            .kron(&Operator::basis_projector(1, 0));
        assert!(post.state().operator().max_abs_diff(&expect) < 1e-12);
    }

    #[test]
    fn apply_measurement_conserves_mutual_entropy() {
        for seed in 0..10 {
            let e = random_ensemble(2, 2, 20 + seed).unwrap();
            let m = random_rank1_measurement(2, 120 + seed);
            let s = assemble_xq(&e);
            let before = mutual(&s, &["X"], &["Q"]).unwrap();
            let post = apply_measurement(&s, &m).unwrap();
            let after = mutual(&post, &["X"], &["Q", "A"]).unwrap();
            assert!((before - after).abs() < 1e-9, "seed {seed}");
        }
    }

    #[test]
    fn reduce_xa_fixtures() {
        // Orthogonal pair + Z: perfectly correlated diag(1/2, 0, 0, 1/2).
        let s = assemble_xq(&orthogonal_pair());
        let post = apply_measurement(&s, &z_basis()).unwrap();
        let xa = reduce_xa(&post).unwrap();
        for i in 0..4 {
            for j in 0..4 {
                let expect = if i == j && (i == 0 || i == 3) { 0.5 } else { 0.0 };
                assert!((xa.state().operator().get(i, j) - c(expect, 0.0)).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn reduce_xa_is_diagonal_with_outcome_probabilities() {
        // BB84 + Z: diagonal (1/4·[1,0], 1/4·[0,1], 1/4·[1/2,1/2], 1/4·[1/2,1/2]).
        let e = bb84();
        let s = assemble_xq(&e);
        let post = apply_measurement(&s, &z_basis()).unwrap();
        let xa = reduce_xa(&post).unwrap();
        let expect_diag = [
            0.25, 0.0, 0.0, 0.25, 0.125, 0.125, 0.125, 0.125,
        ];
        for i in 0..8 {
            for j in 0..8 {
                let expect = if i == j { expect_diag[i] } else { 0.0 };
                assert!(
                    (xa.state().operator().get(i, j) - c(expect, 0.0)).norm() < 1e-12,
                    "entry ({i},{j})"
                );
            }
        }
    }

    #[test]
    fn extracted_info_fixtures() {
        let (i_orth, _) = extracted_info(&orthogonal_pair(), &z_basis()).unwrap();
        assert!((i_orth - 1.0).abs() < 1e-12);

        let rho = crate::random::random_density(2, 2, 33).unwrap();
        let same = Ensemble::new(vec![0.5, 0.5], vec![rho.clone(), rho]).unwrap();
        for seed in 0..5 {
            let m = random_rank1_measurement(2, 40 + seed);
            let (i, _) = extracted_info(&same, &m).unwrap();
            assert!(i.abs() < 1e-12);
        }

        let (i_bb84, table) = extracted_info(&bb84(), &z_basis()).unwrap();
        assert!((i_bb84 - 0.5).abs() < 1e-12);
        assert!((table.marginal[0] - 0.5).abs() < 1e-12);
    }

    #[test]
    fn extracted_info_equals_quantum_mutual_of_reduced_state() {
        for seed in 0..10 {
            let e = random_ensemble(2, 3, 50 + seed).unwrap();
            let m = random_rank1_measurement(2, 150 + seed);
            let (i, _) = extracted_info(&e, &m).unwrap();
            let post = apply_measurement(&assemble_xq(&e), &m).unwrap();
            let xa = reduce_xa(&post).unwrap();
            let q = mutual(&xa, &["X"], &["A"]).unwrap();
            assert!((i - q).abs() < 1e-9, "seed {seed}: {i} vs {q}");
        }
    }

    #[test]
    fn outcome_table_is_bayes_consistent() {
        let e = random_ensemble(3, 3, 60).unwrap();
        let m = random_rank1_measurement(3, 160);
        let table = outcome_table(&e, &m.to_povm()).unwrap();
        for row in &table.conditional {
            let s: f64 = row.iter().sum();
            assert!((s - 1.0).abs() < 1e-9);
        }
        for (a, &pa) in table.marginal.iter().enumerate() {
            for (i, &pi) in e.probs().iter().enumerate() {
                let lhs = table.posterior[a][i] * pa;
                let rhs = pi * table.conditional[i][a];
                assert!((lhs - rhs).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn statistics_do_not_depend_on_ancilla_unitary_choice() {
        // Any U_α with orthogonal images of |0⟩ gives the same reduced X'A'.
        let e = bb84();
        let s = assemble_xq(&e);
        let m = x_basis();
        let post_shift = apply_measurement(&s, &m).unwrap();

        // Alternative: shifts composed with a phase twist that fixes |0⟩ images
        // up to phase on other columns.
        let mut alt = shift_unitaries(2, 2).unwrap();
        let mut twist = Operator::identity(2);
        twist.set(1, 1, c(0.0, 1.0));
        alt[1] = alt[1].mul(&twist); // still maps |0⟩ to |1⟩
        let post_alt = apply_measurement_with(&s, &m, &alt).unwrap();

        let xa_a = reduce_xa(&post_shift).unwrap();
        let xa_b = reduce_xa(&post_alt).unwrap();
        // Diagonals (the outcome statistics) agree.
        for k in 0..xa_a.dim() {
            let da = xa_a.state().operator().get(k, k);
            let db = xa_b.state().operator().get(k, k);
            assert!((da - db).norm() < 1e-10);
        }
    }

    #[test]
    fn decohere_preserves_trace_and_marginals() {
        let e = random_ensemble(2, 3, 70).unwrap();
        let m = random_rank1_measurement(2, 170);
        let post = apply_measurement(&assemble_xq(&e), &m).unwrap();
        let deco = decohere_ancilla(&post).unwrap();
        assert!((deco.state().operator().trace().re - 1.0).abs() < 1e-12);
        for label in ["X", "A"] {
            let a = post.reduce_to(&[label]).unwrap();
            let b = deco.reduce_to(&[label]).unwrap();
            assert!(a.state().operator().max_abs_diff(b.state().operator()) < 1e-12);
        }
    }

    #[test]
    fn decohere_commuting_case_is_identity() {
        // Orthogonal ensemble + matching basis: no α≠α' coherence to kill.
        let s = assemble_xq(&orthogonal_pair());
        let post = apply_measurement(&s, &z_basis()).unwrap();
        let deco = decohere_ancilla(&post).unwrap();
        assert!(
            deco.state()
                .operator()
                .max_abs_diff(post.state().operator())
                < 1e-12
        );
    }

    #[test]
    fn residual_info_fixtures() {
        // Orthogonal + matching basis: everything extracted, nothing residual.
        let r = residual_info(&orthogonal_pair(), &z_basis()).unwrap();
        assert!(r.abs() < 1e-10);

        // Single-outcome measurement: nothing extracted, residual = χ.
        for seed in 0..5 {
            let e = random_ensemble(2, 3, 80 + seed).unwrap();
            let m = ProjectiveMeasurement::new(vec![Operator::identity(2)]).unwrap();
            let r = residual_info(&e, &m).unwrap();
            let chi = holevo_chi_of(&e).unwrap();
            assert!((r - chi).abs() < 1e-9, "seed {seed}");
        }
    }

    #[test]
    fn residual_info_matches_decohered_conditional_mutual() {
        for seed in 0..10 {
            let e = random_ensemble(2, 2, 90 + seed).unwrap();
            let m = random_rank1_measurement(2, 190 + seed);
            let closed = residual_info(&e, &m).unwrap();
            let post = apply_measurement(&assemble_xq(&e), &m).unwrap();
            let deco = decohere_ancilla(&post).unwrap();
            let direct = conditional_mutual(&deco, &["X"], &["Q"], &["A"]).unwrap();
            assert!((closed - direct).abs() < 1e-8, "seed {seed}: {closed} vs {direct}");
        }
    }

    #[test]
    fn balance_equation() {
        // I + S(X':Q'|A') = S(X:Q) on the non-decohered post-state.
        for seed in 0..10 {
            let e = random_ensemble(2, 3, 210 + seed).unwrap();
            let m = random_rank1_measurement(2, 310 + seed);
            let s = assemble_xq(&e);
            let chi = mutual(&s, &["X"], &["Q"]).unwrap();
            let (i, _) = extracted_info(&e, &m).unwrap();
            let post = apply_measurement(&s, &m).unwrap();
            let resid = conditional_mutual(&post, &["X"], &["Q"], &["A"]).unwrap();
            assert!((i + resid - chi).abs() < 1e-8, "seed {seed}");
        }
    }

    #[test]
    fn neumark_dilation_of_projective_measurement_reproduces_statistics() {
        let m = x_basis();
        let povm = m.to_povm();
        let dil = neumark_dilate(&povm).unwrap();
        for seed in 0..5 {
            let rho = crate::random::random_density(2, 2, 400 + seed).unwrap();
            let embedded = dil.embed_state(&rho).unwrap();
            for (alpha, el) in povm.elements().iter().enumerate() {
                let direct = el.mul(rho.operator()).trace().re;
                let dilated = dil.measurement().projectors()[alpha]
                    .mul(embedded.operator())
                    .trace()
                    .re;
                assert!((direct - dilated).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn neumark_trine_povm_statistics() {
        // Trine: E_k = (2/3)|ψ_k⟩⟨ψ_k| at 120° on the Bloch equator.
        let trine = trine_povm();
        let dil = neumark_dilate(&trine).unwrap();
        assert_eq!(dil.extended_dim(), 6);
        assert!(dil.completion().unitarity_defect() < 1e-9);
        for seed in 0..20 {
            let rho = crate::random::random_density(2, 2, 500 + seed).unwrap();
            let embedded = dil.embed_state(&rho).unwrap();
            for (alpha, el) in trine.elements().iter().enumerate() {
                let direct = el.mul(rho.operator()).trace().re;
                let dilated = dil.measurement().projectors()[alpha]
                    .mul(embedded.operator())
                    .trace()
                    .re;
                assert!((direct - dilated).abs() < 1e-9, "seed {seed} outcome {alpha}");
            }
        }
    }

    fn trine_povm() -> Povm {
        let elements = (0..3)
            .map(|k| {
                let theta = 2.0 * std::f64::consts::PI * k as f64 / 3.0;
                let amps = [c((theta / 2.0).cos(), 0.0), c((theta / 2.0).sin(), 0.0)];
                Operator::ket_projector(&amps).scale(2.0 / 3.0)
            })
            .collect();
        Povm::new(elements).unwrap()
    }

    #[test]
    fn uniform_povm_is_outcome_blind() {
        let povm = Povm::new(vec![
            Operator::identity(2).scale(1.0 / 3.0),
            Operator::identity(2).scale(1.0 / 3.0),
            Operator::identity(2).scale(1.0 / 3.0),
        ])
        .unwrap();
        let e = bb84();
        let table = outcome_table(&e, &povm).unwrap();
        for p in &table.marginal {
            assert!((p - 1.0 / 3.0).abs() < 1e-12);
        }
        let (i, _) = extracted_info_povm(&e, &povm).unwrap();
        assert!(i.abs() < 1e-12);
    }

    #[test]
    fn random_povm_dilation_consistency() {
        for seed in 0..5 {
            let povm = random_povm(2, 3, 600 + seed).unwrap();
            let dil = neumark_dilate(&povm).unwrap();
            let rho = crate::random::random_density(2, 2, 700 + seed).unwrap();
            let embedded = dil.embed_state(&rho).unwrap();
            for (alpha, el) in povm.elements().iter().enumerate() {
                let direct = el.mul(rho.operator()).trace().re;
                let dilated = dil.measurement().projectors()[alpha]
                    .mul(embedded.operator())
                    .trace()
                    .re;
                assert!((direct - dilated).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn sequential_repeat_reveals_nothing_new() {
        let e = bb84();
        let z = z_basis();
        let result = sequential_measure(&e, &[&z, &z]).unwrap();
        assert!((result.step_informations[0] - 0.5).abs() < 1e-12);
        assert!(result.step_informations[1].abs() < 1e-9);
    }

    #[test]
    fn sequential_single_step_matches_extracted_info() {
        for seed in 0..10 {
            let e = random_ensemble(2, 3, 800 + seed).unwrap();
            let m = random_rank1_measurement(2, 900 + seed);
            let chain = sequential_measure(&e, &[&m]).unwrap();
            let (i, _) = extracted_info(&e, &m).unwrap();
            assert!((chain.total_information() - i).abs() < 1e-10, "seed {seed}");
        }
    }

    #[test]
    fn sequential_bb84_z_then_x_bounded_by_chi() {
        let e = bb84();
        let result = sequential_measure(&e, &[&z_basis(), &x_basis()]).unwrap();
        assert!((result.step_informations[0] - 0.5).abs() < 1e-12);
        assert!(result.step_informations[1] >= -1e-9);
        let chi = holevo_chi_of(&e).unwrap();
        assert!(result.total_information() <= chi + 1e-9);
        // Probabilities normalize per member.
        for row in &result.joint_conditional {
            let s: f64 = row.iter().sum();
            assert!((s - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn sequential_matches_explicit_state_for_two_steps() {
        // Materialize X⊗Q⊗A₁⊗A₂ explicitly and compare the joint outcome
        // distribution with the operator-composition route.
        let e = bb84();
        let z = z_basis();
        let x = x_basis();
        let result = sequential_measure(&e, &[&z, &x]).unwrap();

        let s = assemble_xq(&e);
        let post1 = apply_measurement(&s, &z).unwrap();
        // Second measurement: conjugate by 1_{XA₁-reordered}; easiest is to
        // apply U_QA₂ on the (Q, A₂) factors of (X, Q, A₁) ⊗ A₂.
        let da2 = x.outcomes();
        let init = post1
            .state()
            .operator()
            .kron(&Operator::basis_projector(da2, 0));
        // Factor order is (X, Q, A₁, A₂); U acts on Q and A₂. Build it as a
        // permuted Kronecker product via explicit index arithmetic.
        let nx = 4;
        let dq = 2;
        let da1 = 2;
        let u_qa2 = build_u_qa(&x, da2).unwrap();
        let dim = nx * dq * da1 * da2;
        let mut u_full = Operator::zeros(dim);
        for xi in 0..nx {
            for q in 0..dq {
                for a1 in 0..da1 {
                    for a2 in 0..da2 {
                        for q2 in 0..dq {
                            for b2 in 0..da2 {
                                let row = ((xi * dq + q) * da1 + a1) * da2 + a2;
                                let col = ((xi * dq + q2) * da1 + a1) * da2 + b2;
                                let val = u_qa2.get(q * da2 + a2, q2 * da2 + b2);
                                if val.norm() > 0.0 {
                                    let cur = u_full.get(row, col);
                                    u_full.set(row, col, cur + val);
                                }
                            }
                        }
                    }
                }
            }
        }
        let evolved = init.conjugate_by(&u_full);
        // Joint distribution p(i, α₁, α₂) from the diagonal, tracing Q.
        for i in 0..4 {
            for a1 in 0..2 {
                for a2 in 0..2 {
                    let mut p = 0.0;
                    for q in 0..dq {
                        let idx = ((i * dq + q) * da1 + a1) * da2 + a2;
                        p += evolved.get(idx, idx).re;
                    }
                    let expect = e.probs()[i] * result.joint_conditional[i][a1 * 2 + a2];
                    assert!((p - expect).abs() < 1e-10, "i={i} a1={a1} a2={a2}");
                }
            }
        }
    }

    #[test]
    fn projective_measurement_rejects_incomplete_family() {
        let p0 = Operator::basis_projector(2, 0);
        assert!(matches!(
            ProjectiveMeasurement::new(vec![p0]),
            Err(QError::InvalidMeasurement(_))
        ));
    }

    #[test]
    fn povm_rejects_negative_element() {
        let bad = Operator::from_rows(
            2,
            &[c(1.5, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(-0.5, 0.0)],
        );
        let fix = Operator::identity(2).sub(&bad);
        assert!(matches!(
            Povm::new(vec![bad, fix]),
            Err(QError::InvalidPovm(_))
        ));
    }
}
