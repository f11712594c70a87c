//! Seeded randomized verification sweeps over the paper's inequalities.
//! Each case is generated from its own derived seed, so sweeps are
//! deterministic and may run data-parallel (see `exec`).

use serde::Serialize;

use crate::bounds::{holevo_chi, verify_kholevo, MeasurementInput};
use crate::entropy::{conditional_mutual, diagonal_mutual_shannon, mutual, subset_entropy};
use crate::error::Result;
use crate::exec;
use crate::measurement::{
    apply_measurement, decohere_ancilla, extracted_info, residual_info, sequential_measure,
    ProjectiveMeasurement,
};
use crate::random::{
    random_coarse_measurement, random_density, random_ensemble, random_probs, random_pure_state,
    random_rank1_measurement,
};
use crate::state::{assemble_xq, DensityOperator, Ensemble, MultipartiteState, SubsystemLayout};

/// Summary of one sweep: every case margin must clear -tolerance.
#[derive(Debug, Clone, Serialize)]
pub struct SweepReport {
    pub name: String,
    pub cases: usize,
    pub min_margin: f64,
    pub mean_margin: f64,
    pub violations: usize,
    pub tolerance: f64,
}

impl SweepReport {
    fn from_margins(name: &str, margins: &[f64], tolerance: f64) -> Self {
        let min = margins.iter().copied().fold(f64::INFINITY, f64::min);
        let mean = margins.iter().sum::<f64>() / margins.len() as f64;
        let violations = margins.iter().filter(|m| **m < -tolerance).count();
        Self {
            name: name.to_string(),
            cases: margins.len(),
            min_margin: min,
            mean_margin: mean,
            violations,
            tolerance,
        }
    }

    pub fn passed(&self) -> bool {
        self.violations == 0
    }

    pub fn to_text(&self) -> String {
        format!(
            "  {:<44} cases {:>5}  min margin {:+.3e}  mean {:+.3e}  {}",
            self.name,
            self.cases,
            self.min_margin,
            self.mean_margin,
            if self.passed() { "pass" } else { "FAIL" }
        )
    }
}

fn case_seed(seed: u64, index: usize, stream: u64) -> u64 {
    seed.wrapping_mul(0x9e3779b97f4a7c15)
        .wrapping_add(stream.wrapping_mul(0x2545f4914f6cdd1d))
        .wrapping_add(index as u64)
}

/// Kholevo margin χ - I over random (ensemble, rank-1 measurement) pairs
/// with channel dimensions cycled from `dims`.
pub fn kholevo_sweep(dims: &[usize], count: usize, seed: u64, tolerance: f64) -> Result<SweepReport> {
    let margins: Vec<f64> = exec::map_indexed(count, |k| {
        let dim = dims[k % dims.len()];
        let members = 2 + k % 3;
        let e = random_ensemble(dim, members, case_seed(seed, k, 1)).expect("valid ensemble");
        let m = random_rank1_measurement(dim, case_seed(seed, k, 2));
        let chi = holevo_chi(&e).expect("chi");
        let (i, _) = extracted_info(&e, &m).expect("info");
        chi - i
    });
    Ok(SweepReport::from_margins("Kholevo bound chi - I >= 0", &margins, tolerance))
}

/// Strict-gap margin χ - I over non-commuting two-member pure ensembles;
/// overlaps are kept away from 0 and 1 so the members never commute.
pub fn strict_gap_sweep(count: usize, seed: u64, strict_margin: f64) -> Result<SweepReport> {
    let margins: Vec<f64> = exec::map_indexed(count, |k| {
        let mut attempt = case_seed(seed, k, 3);
        let (a, b) = loop {
            let a = random_pure_state(2, attempt);
            let b = random_pure_state(2, attempt.wrapping_add(0x5bd1e995));
            let overlap = a.operator().mul(b.operator()).trace().re;
            if overlap > 1e-2 && overlap < 1.0 - 1e-2 {
                break (a, b);
            }
            attempt = attempt.wrapping_add(1);
        };
        let e = Ensemble::new(vec![0.5, 0.5], vec![a, b]).expect("valid ensemble");
        let m = random_rank1_measurement(2, case_seed(seed, k, 4));
        let chi = holevo_chi(&e).expect("chi");
        let (i, _) = extracted_info(&e, &m).expect("info");
        (chi - i) - strict_margin
    });
    Ok(SweepReport::from_margins(
        "strict gap chi - I > margin (non-commuting)",
        &margins,
        0.0,
    ))
}

/// |I - χ| in the commuting case: diagonal members measured in the
/// computational basis. Reported margin is tolerance - |I - χ|.
pub fn commuting_saturation_sweep(count: usize, seed: u64, tolerance: f64) -> Result<SweepReport> {
    let margins: Vec<f64> = exec::map_indexed(count, |k| {
        let dim = 2 + k % 2;
        let members = 2 + k % 2;
        let probs = random_probs(members, case_seed(seed, k, 5));
        let states: Vec<DensityOperator> = (0..members)
            .map(|i| {
                let diag = random_probs(dim, case_seed(seed, k, 6).wrapping_add(i as u64));
                let mut op = crate::operator::Operator::zeros(dim);
                for (j, p) in diag.iter().enumerate() {
                    op.set(j, j, num_complex::Complex64::new(*p, 0.0));
                }
                DensityOperator::new(op).expect("diagonal density")
            })
            .collect();
        let e = Ensemble::new(probs, states).expect("valid ensemble");
        let m = ProjectiveMeasurement::computational_basis(dim);
        let chi = holevo_chi(&e).expect("chi");
        let (i, _) = extracted_info(&e, &m).expect("info");
        tolerance - (i - chi).abs()
    });
    Ok(SweepReport::from_margins(
        "commuting saturation |I - chi| <= tol",
        &margins,
        0.0,
    ))
}

/// Conservation and balance margins: tolerance - |S(X':Q'A') - S(X:Q)| and
/// 1e-8 - |I + S(X':Q'|A') - S(X:Q)|, interleaved.
pub fn conservation_balance_sweep(count: usize, seed: u64) -> Result<SweepReport> {
    let margins: Vec<(f64, f64)> = exec::map_indexed(count, |k| {
        let dim = 2 + k % 2;
        let e = random_ensemble(dim, 2 + k % 2, case_seed(seed, k, 7)).expect("valid ensemble");
        let m = random_rank1_measurement(dim, case_seed(seed, k, 8));
        let s = assemble_xq(&e);
        let before = mutual(&s, &["X"], &["Q"]).expect("mutual");
        let post = apply_measurement(&s, &m).expect("post");
        let after = mutual(&post, &["X"], &["Q", "A"]).expect("mutual");
        let (i, _) = extracted_info(&e, &m).expect("info");
        let resid = conditional_mutual(&post, &["X"], &["Q"], &["A"]).expect("cmi");
        (1e-9 - (after - before).abs(), 1e-8 - (i + resid - before).abs())
    });
    let flat: Vec<f64> = margins.iter().flat_map(|(a, b)| [*a, *b]).collect();
    Ok(SweepReport::from_margins(
        "conservation and balance equations",
        &flat,
        0.0,
    ))
}

/// Dual-path residual information: 1e-8 - |closed form - decohered CMI|.
pub fn residual_dual_path_sweep(count: usize, seed: u64) -> Result<SweepReport> {
    let margins: Vec<f64> = exec::map_indexed(count, |k| {
        let dim = 2 + k % 2;
        let e = random_ensemble(dim, 2 + k % 2, case_seed(seed, k, 9)).expect("valid ensemble");
        let m = if k % 3 == 0 {
            random_coarse_measurement(dim, case_seed(seed, k, 10))
        } else {
            random_rank1_measurement(dim, case_seed(seed, k, 10))
        };
        let closed = residual_info(&e, &m).expect("closed form");
        let post = apply_measurement(&assemble_xq(&e), &m).expect("post");
        let deco = decohere_ancilla(&post).expect("decohere");
        let direct = conditional_mutual(&deco, &["X"], &["Q"], &["A"]).expect("cmi");
        1e-8 - (closed - direct).abs()
    });
    Ok(SweepReport::from_margins(
        "residual info closed form vs decohered CMI",
        &margins,
        0.0,
    ))
}

/// Decoherence ordering: S(X':Q'A') after dephasing ≤ S(X:Q) before.
pub fn decoherence_ordering_sweep(count: usize, seed: u64, tolerance: f64) -> Result<SweepReport> {
    let margins: Vec<f64> = exec::map_indexed(count, |k| {
        let dim = 2 + k % 2;
        let e = random_ensemble(dim, 2 + k % 2, case_seed(seed, k, 11)).expect("valid ensemble");
        let m = random_rank1_measurement(dim, case_seed(seed, k, 12));
        let s = assemble_xq(&e);
        let before = mutual(&s, &["X"], &["Q"]).expect("mutual");
        let deco = decohere_ancilla(&apply_measurement(&s, &m).expect("post")).expect("decohere");
        let after = mutual(&deco, &["X"], &["Q", "A"]).expect("mutual");
        before - after
    });
    Ok(SweepReport::from_margins(
        "decoherence ordering S(X':Q'A') <= S(X:Q)",
        &margins,
        tolerance,
    ))
}

/// Strong subadditivity on random 2x2x2 tripartite states.
pub fn strong_subadditivity_sweep(count: usize, seed: u64, tolerance: f64) -> Result<SweepReport> {
    let margins: Vec<f64> = exec::map_indexed(count, |k| {
        let rank = 1 + k % 8;
        let rho = random_density(8, rank, case_seed(seed, k, 13)).expect("density");
        let s = MultipartiteState::new(
            rho,
            SubsystemLayout::new(vec![("A", 2), ("B", 2), ("C", 2)]).expect("layout"),
        )
        .expect("state");
        conditional_mutual(&s, &["A"], &["B"], &["C"]).expect("cmi")
    });
    Ok(SweepReport::from_margins(
        "strong subadditivity S(A:B|C) >= 0",
        &margins,
        tolerance,
    ))
}

/// Sequential chains (m = 2, 3 with mixed complete/coarse measurements):
/// margin S(X:Q) - Σ_j per-step informations.
pub fn sequential_sweep(count: usize, seed: u64, tolerance: f64) -> Result<SweepReport> {
    let margins: Vec<f64> = exec::map_indexed(count, |k| {
        let dim = 2 + k % 2;
        let e = random_ensemble(dim, 2 + k % 2, case_seed(seed, k, 14)).expect("valid ensemble");
        let steps = 2 + k % 2;
        let chain: Vec<ProjectiveMeasurement> = (0..steps)
            .map(|j| {
                let s = case_seed(seed, k, 15).wrapping_add(j as u64);
                if (k + j) % 2 == 0 {
                    random_rank1_measurement(dim, s)
                } else {
                    random_coarse_measurement(dim, s)
                }
            })
            .collect();
        let refs: Vec<&ProjectiveMeasurement> = chain.iter().collect();
        let result = sequential_measure(&e, &refs).expect("chain");
        let chi = holevo_chi(&e).expect("chi");
        chi - result.total_information()
    });
    Ok(SweepReport::from_margins(
        "sequential bound sum_j H(X:A_j|prev) <= chi",
        &margins,
        tolerance,
    ))
}

/// General inequality H(X:Y) ≤ S(X:Y) on random two-qubit states.
pub fn general_inequality_sweep(count: usize, seed: u64, tolerance: f64) -> Result<SweepReport> {
    let margins: Vec<f64> = exec::map_indexed(count, |k| {
        let rank = 1 + k % 4;
        let rho = random_density(4, rank, case_seed(seed, k, 16)).expect("density");
        let s = MultipartiteState::new(
            rho,
            SubsystemLayout::new(vec![("X", 2), ("Y", 2)]).expect("layout"),
        )
        .expect("state");
        let h = diagonal_mutual_shannon(&s, &["X"], &["Y"]).expect("H");
        let q = mutual(&s, &["X"], &["Y"]).expect("S");
        q - h
    });
    Ok(SweepReport::from_margins(
        "general inequality H(X:Y) <= S(X:Y)",
        &margins,
        tolerance,
    ))
}

/// Kholevo verification via Neumark dilation on random POVMs.
pub fn neumark_sweep(count: usize, seed: u64, tolerance: f64) -> Result<SweepReport> {
    let margins: Vec<f64> = exec::map_indexed(count, |k| {
        let e = random_ensemble(2, 2, case_seed(seed, k, 17)).expect("valid ensemble");
        let povm = crate::random::random_povm(2, 3, case_seed(seed, k, 18)).expect("povm");
        let report = verify_kholevo(&e, MeasurementInput::Povm(&povm), tolerance).expect("report");
        report
            .checks
            .iter()
            .map(|c| c.margin + c.tolerance)
            .fold(f64::INFINITY, f64::min)
    });
    Ok(SweepReport::from_margins(
        "Kholevo bound via Neumark dilation",
        &margins,
        0.0,
    ))
}

/// The full suite at the given size, as run by the CLI `check` command.
pub fn full_suite(dims: &[usize], count: usize, seed: u64, tolerance: f64) -> Result<Vec<SweepReport>> {
    Ok(vec![
        kholevo_sweep(dims, count, seed, tolerance)?,
        strict_gap_sweep(count.min(50), seed, 1e-6)?,
        commuting_saturation_sweep(count.min(100), seed, 1e-9)?,
        conservation_balance_sweep(count.min(200), seed)?,
        residual_dual_path_sweep(count.min(200), seed)?,
        decoherence_ordering_sweep(count.min(200), seed, tolerance)?,
        strong_subadditivity_sweep(count, seed, tolerance)?,
        sequential_sweep(count.min(200), seed, tolerance)?,
        general_inequality_sweep(count.min(500), seed, tolerance)?,
        neumark_sweep(count.min(20), seed, tolerance)?,
    ])
}

/// Entropy of a subset, re-exported for the check command's diagnostics.
pub fn entropy_of(s: &MultipartiteState, labels: &[&str]) -> Result<f64> {
    subset_entropy(s, labels)
}
