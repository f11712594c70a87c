//! The paper's inequalities as first-class verifiers, plus a derivative-free
//! optimizer producing accessible-information lower bounds to sandwich
//! against the Holevo quantity χ.

use serde::Serialize;

use crate::entropy::{
    conditional_mutual, diagonal_mutual_shannon, holevo_chi_of, mutual, shannon_raw, von_neumann,
};
use crate::error::{QError, Result};
use crate::exec;
use crate::measurement::{
    apply_measurement, extracted_info, neumark_dilate, Povm, ProjectiveMeasurement,
};
use crate::operator::Operator;
use crate::state::{assemble_xq, Ensemble, MultipartiteState};

use num_complex::Complex64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;

/// Default margin below which an inequality is reported as violated.
pub const DEFAULT_MARGIN_TOL: f64 = 1e-9;

/// One verified inequality: both sides, the signed margin, and the verdict.
#[derive(Debug, Clone, Serialize)]
pub struct InequalityCheck {
    pub name: String,
    pub lhs: f64,
    pub rhs: f64,
    /// rhs - lhs; satisfied when ≥ -tolerance.
    pub margin: f64,
    pub satisfied: bool,
    pub tolerance: f64,
}

impl InequalityCheck {
    fn new(name: &str, lhs: f64, rhs: f64, tolerance: f64) -> Self {
        let margin = rhs - lhs;
        Self {
            name: name.to_string(),
            lhs,
            rhs,
            margin,
            satisfied: margin >= -tolerance,
            tolerance,
        }
    }
}

/// Named quantities plus per-inequality verdicts with margins.
#[derive(Debug, Clone, Serialize)]
pub struct BoundReport {
    pub quantities: Vec<(String, f64)>,
    pub checks: Vec<InequalityCheck>,
}

impl BoundReport {
    pub fn all_satisfied(&self) -> bool {
        self.checks.iter().all(|c| c.satisfied)
    }

    pub fn quantity(&self, name: &str) -> Option<f64> {
        self.quantities
            .iter()
            .find(|(n, _)| n == name)
            .map(|(_, v)| *v)
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for (name, value) in &self.quantities {
            out.push_str(&format!("  {name} = {value:.6}\n"));
        }
        for c in &self.checks {
            let verdict = if c.satisfied { "satisfied" } else { "VIOLATED" };
            out.push_str(&format!(
                "  {}: {:.6} <= {:.6} (margin {:+.3e}) {}\n",
                c.name, c.lhs, c.rhs, c.margin, verdict
            ));
        }
        out
    }
}

/// χ = S(Σ p_i ρ_i) - Σ p_i S(ρ_i), in bits.
pub fn holevo_chi(e: &Ensemble) -> Result<f64> {
    holevo_chi_of(e)
}

/// The convexity sandwich on S(ρ) and the induced range 0 ≤ χ ≤ H[p].
pub fn chi_range(e: &Ensemble, tolerance: f64) -> Result<BoundReport> {
    let s_mix = von_neumann(&e.average_state())?;
    let mut s_avg = 0.0;
    for (p, rho) in e.probs().iter().zip(e.states()) {
        s_avg += p * von_neumann(rho)?;
    }
    let h_p = shannon_raw(e.probs());
    let chi = s_mix - s_avg;
    Ok(BoundReport {
        quantities: vec![
            ("chi".into(), chi),
            ("S(rho)".into(), s_mix),
            ("sum p_i S(rho_i)".into(), s_avg),
            ("H[p]".into(), h_p),
        ],
        checks: vec![
            InequalityCheck::new("sum p_i S(rho_i) <= S(rho)", s_avg, s_mix, tolerance),
            InequalityCheck::new("S(rho) <= H[p] + sum p_i S(rho_i)", s_mix, h_p + s_avg, tolerance),
            InequalityCheck::new("0 <= chi", 0.0, chi, tolerance),
            InequalityCheck::new("chi <= H[p]", chi, h_p, tolerance),
        ],
    })
}

/// A measurement argument for `verify_kholevo`: projective measurements are
/// checked directly, POVMs are routed through Neumark dilation.
pub enum MeasurementInput<'a> {
    Projective(&'a ProjectiveMeasurement),
    Povm(&'a Povm),
}

/// Verifies I ≤ χ and reports the balance decomposition
/// I + S(X':Q'|A') = S(X:Q).
pub fn verify_kholevo(
    e: &Ensemble,
    m: MeasurementInput<'_>,
    tolerance: f64,
) -> Result<BoundReport> {
    let (working_ensemble, projective) = match m {
        MeasurementInput::Projective(pm) => (e.clone(), pm.clone()),
        MeasurementInput::Povm(povm) => {
            let dil = neumark_dilate(povm)?;
            (dil.embed_ensemble(e)?, dil.measurement().clone())
        }
    };
    let chi = holevo_chi(&working_ensemble)?;
    let (info, _) = extracted_info(&working_ensemble, &projective)?;
    let s = assemble_xq(&working_ensemble);
    let post = apply_measurement(&s, &projective)?;
    let residual = conditional_mutual(&post, &["X"], &["Q"], &["A"])?;
    Ok(BoundReport {
        quantities: vec![
            ("I".into(), info),
            ("chi".into(), chi),
            ("S(X':Q'|A')".into(), residual),
            ("balance defect".into(), info + residual - chi),
        ],
        checks: vec![
            InequalityCheck::new("I <= chi", info, chi, tolerance),
            InequalityCheck::new(
                "|I + S(X':Q'|A') - chi| <= tol",
                (info + residual - chi).abs(),
                0.0,
                1e-8,
            ),
        ],
    })
}

/// H(X:Y) ≤ S(X:Y) on a bipartite state.
pub fn general_inequality(s: &MultipartiteState, tolerance: f64) -> Result<BoundReport> {
    let parts = s.layout().parts();
    if parts.len() != 2 {
        return Err(QError::InvalidMeasurement(
            "general inequality requires a bipartite layout".into(),
        ));
    }
    let x = parts[0].0.as_str();
    let y = parts[1].0.as_str();
    let h = diagonal_mutual_shannon(s, &[x], &[y])?;
    let q = mutual(s, &[x], &[y])?;
    Ok(BoundReport {
        quantities: vec![("H(X:Y)".into(), h), ("S(X:Y)".into(), q)],
        checks: vec![InequalityCheck::new("H(X:Y) <= S(X:Y)", h, q, tolerance)],
    })
}

/// Random-restart hill-climbing configuration.
#[derive(Debug, Clone, Serialize)]
pub struct OptimizerConfig {
    pub restarts: usize,
    /// Coordinate trials per restart.
    pub steps: usize,
    pub initial_step: f64,
    /// Multiplicative step decay applied after a fully rejected sweep.
    pub decay: f64,
    pub seed: u64,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        Self {
            restarts: 8,
            steps: 4000,
            initial_step: 0.5,
            decay: 0.5,
            seed: 0,
        }
    }
}

impl OptimizerConfig {
    pub fn validate(&self) -> Result<()> {
        if self.restarts == 0 || self.steps == 0 {
            return Err(QError::InvalidConfig(
                "restarts and steps must be positive".into(),
            ));
        }
        if !(self.initial_step > 0.0) {
            return Err(QError::InvalidConfig("initial step must be positive".into()));
        }
        if !(self.decay > 0.0 && self.decay < 1.0) {
            return Err(QError::InvalidConfig("decay must lie in (0, 1)".into()));
        }
        Ok(())
    }
}

/// Step-size floor at which a restart is considered converged.
pub const STEP_FLOOR: f64 = 1e-7;

/// Hermitian generator from a real parameter vector of length d²: the
/// diagonal holds the first d entries, each off-diagonal pair holds a real
/// and an imaginary coefficient.
fn generator(dim: usize, theta: &[f64]) -> Operator {
    let mut h = Operator::zeros(dim);
    let mut k = 0usize;
    for i in 0..dim {
        h.set(i, i, Complex64::new(theta[k], 0.0));
        k += 1;
    }
    for i in 0..dim {
        for j in (i + 1)..dim {
            let v = Complex64::new(theta[k], theta[k + 1]);
            k += 2;
            h.set(i, j, v);
            h.set(j, i, v.conj());
        }
    }
    h
}

/// The rank-1 projective measurement parameterized by θ: the computational
/// basis conjugated by exp(iH(θ)).
pub fn measurement_from_params(dim: usize, theta: &[f64]) -> ProjectiveMeasurement {
    let u = generator(dim, theta).expi_hermitian();
    ProjectiveMeasurement::from_basis_unitary(&u)
        .expect("conjugated computational basis is projective")
}

fn objective(e: &Ensemble, dim: usize, theta: &[f64]) -> f64 {
    let m = measurement_from_params(dim, theta);
    extracted_info(e, &m).map(|(i, _)| i).unwrap_or(f64::NEG_INFINITY)
}

fn hill_climb(e: &Ensemble, dim: usize, cfg: &OptimizerConfig, restart: usize) -> (f64, Vec<f64>) {
    let mut rng = ChaCha12Rng::seed_from_u64(cfg.seed.wrapping_add(restart as u64));
    let nparams = dim * dim;
    let mut theta: Vec<f64> = (0..nparams)
        .map(|_| rng.random_range(-std::f64::consts::PI..std::f64::consts::PI))
        .collect();
    let mut best = objective(e, dim, &theta);
    let mut step = cfg.initial_step;
    let mut trials = 0usize;
    while trials < cfg.steps && step >= STEP_FLOOR {
        let mut improved = false;
        for k in 0..nparams {
            if trials >= cfg.steps {
                break;
            }
            for sign in [1.0, -1.0] {
                let saved = theta[k];
                theta[k] = saved + sign * step;
                let value = objective(e, dim, &theta);
                trials += 1;
                if value > best {
                    best = value;
                    improved = true;
                    break;
                }
                theta[k] = saved;
            }
        }
        if !improved {
            step *= cfg.decay;
        }
    }
    (best, theta)
}

/// Maximizes the extracted information over rank-1 projective measurements
/// by seeded random-restart hill climbing. Deterministic given the config;
/// restarts run concurrently with a deterministic tie-break (highest I,
/// lowest restart index).
pub fn optimize_accessible_info(
    e: &Ensemble,
    cfg: &OptimizerConfig,
) -> Result<(f64, ProjectiveMeasurement)> {
    cfg.validate()?;
    let dim = e.channel_dim();
    let results = exec::map_indexed(cfg.restarts, |r| hill_climb(e, dim, cfg, r));
    let (mut best_i, mut best_theta) = (f64::NEG_INFINITY, Vec::new());
    for (i, theta) in results {
        if i > best_i {
            best_i = i;
            best_theta = theta;
        }
    }
    let chi = holevo_chi(e)?;
    debug_assert!(best_i <= chi + 1e-9, "optimizer exceeded chi: {best_i} > {chi}");
    if best_i > chi + 1e-9 {
        return Err(QError::InvalidConfig(format!(
            "optimizer produced I = {best_i} above chi = {chi}"
        )));
    }
    Ok((best_i, measurement_from_params(dim, &best_theta)))
}

/// POVM-flavoured search: embeds the ensemble on the Neumark-extended space
/// of a reference POVM size and optimizes rank-1 projective measurements
/// there. Requested explicitly because the dilated dimension inflates the
/// search space.
pub fn optimize_accessible_info_dilated(
    e: &Ensemble,
    povm_outcomes: usize,
    cfg: &OptimizerConfig,
) -> Result<(f64, ProjectiveMeasurement)> {
    cfg.validate()?;
    if povm_outcomes < 2 {
        return Err(QError::InvalidConfig(
            "POVM outcome count must be at least 2".into(),
        ));
    }
    // Uniform reference POVM: its dilation embeds Q into n·d isometrically,
    // so any projective search there covers n-outcome POVM statistics.
    let d = e.channel_dim();
    let uniform = Povm::new(vec![
        Operator::identity(d).scale(1.0 / povm_outcomes as f64);
        povm_outcomes
    ])?;
    let dil = neumark_dilate(&uniform)?;
    let embedded = dil.embed_ensemble(e)?;
    optimize_accessible_info(&embedded, cfg)
}
