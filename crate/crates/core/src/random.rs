//! Seeded random states, unitaries, measurements, and ensembles for the
//! property suites. All generators are deterministic given their seed.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;
use rand_distr::StandardNormal;

use crate::error::{QError, Result};
use crate::measurement::{Povm, ProjectiveMeasurement};
use crate::operator::Operator;
use crate::state::{DensityOperator, Ensemble};

fn rng(seed: u64) -> ChaCha12Rng {
    ChaCha12Rng::seed_from_u64(seed)
}

fn gaussian_matrix(rows: usize, cols: usize, rng: &mut ChaCha12Rng) -> DMatrix<Complex64> {
    DMatrix::from_fn(rows, cols, |_, _| {
        Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
    })
}

/// Square matrix of standard complex Gaussians (no structure).
pub fn random_operator(dim: usize, seed: u64) -> Operator {
    let mut r = rng(seed);
    Operator::from_matrix(gaussian_matrix(dim, dim, &mut r))
}

/// GG†/Tr(GG†) with G a dim×rank complex Gaussian matrix.
pub fn random_density(dim: usize, rank: usize, seed: u64) -> Result<DensityOperator> {
    if rank < 1 || rank > dim {
        return Err(QError::InvalidRank { rank, dim });
    }
    let mut r = rng(seed);
    random_density_with(dim, rank, &mut r)
}

fn random_density_with(dim: usize, rank: usize, r: &mut ChaCha12Rng) -> Result<DensityOperator> {
    let g = gaussian_matrix(dim, rank, r);
    let gg = &g * g.adjoint();
    let tr = gg.trace();
    Ok(DensityOperator::new_unchecked(Operator::from_matrix(
        gg / tr,
    )))
}

/// Haar-style random unitary: QR of a complex Gaussian matrix, with the
/// positive-real-diagonal phase convention on R.
pub fn random_unitary(dim: usize, seed: u64) -> Operator {
    let mut r = rng(seed);
    random_unitary_with(dim, &mut r)
}

fn random_unitary_with(dim: usize, r: &mut ChaCha12Rng) -> Operator {
    let g = gaussian_matrix(dim, dim, r);
    let qr = g.qr();
    let rmat = qr.r();
    let mut q = qr.q();
    // Absorb the diagonal phases of R so the factorization is unique.
    for j in 0..dim {
        let d = rmat[(j, j)];
        let phase = if d.norm() > 0.0 {
            d / d.norm()
        } else {
            Complex64::new(1.0, 0.0)
        };
        for i in 0..dim {
            q[(i, j)] *= phase;
        }
    }
    Operator::from_matrix(q)
}

/// Random pure state of the given dimension.
pub fn random_pure_state(dim: usize, seed: u64) -> DensityOperator {
    let mut r = rng(seed);
    let amps: Vec<Complex64> = (0..dim)
        .map(|_| Complex64::new(r.sample(StandardNormal), r.sample(StandardNormal)))
        .collect();
    DensityOperator::pure_state(&amps)
}

/// Random probability vector (normalized exponentials).
pub fn random_probs(n: usize, seed: u64) -> Vec<f64> {
    let mut r = rng(seed);
    let mut p: Vec<f64> = (0..n).map(|_| -f64::ln(r.random::<f64>())).collect();
    let sum: f64 = p.iter().sum();
    for v in &mut p {
        *v /= sum;
    }
    p
}

/// Random ensemble of `members` mixed states on dimension `dim`, with
/// random ranks and random probabilities.
pub fn random_ensemble(dim: usize, members: usize, seed: u64) -> Result<Ensemble> {
    let mut r = rng(seed);
    let mut p: Vec<f64> = (0..members).map(|_| -f64::ln(r.random::<f64>())).collect();
    let sum: f64 = p.iter().sum();
    for v in &mut p {
        *v /= sum;
    }
    let states: Vec<DensityOperator> = (0..members)
        .map(|_| {
            let rank = r.random_range(1..=dim);
            random_density_with(dim, rank, &mut r)
        })
        .collect::<Result<_>>()?;
    Ensemble::new(p, states)
}

/// Random complete rank-1 projective measurement: projectors onto the
/// columns of a random unitary.
pub fn random_rank1_measurement(dim: usize, seed: u64) -> ProjectiveMeasurement {
    let mut r = rng(seed);
    let u = random_unitary_with(dim, &mut r);
    ProjectiveMeasurement::from_basis_unitary(&u).expect("columns of a unitary form a basis")
}

/// Random complete projective measurement with projector ranks drawn from a
/// random composition of `dim` (may be coarse-grained).
pub fn random_coarse_measurement(dim: usize, seed: u64) -> ProjectiveMeasurement {
    let mut r = rng(seed);
    let u = random_unitary_with(dim, &mut r);
    // Random composition of dim into positive parts.
    let mut parts: Vec<usize> = Vec::new();
    let mut remaining = dim;
    while remaining > 0 {
        let take = r.random_range(1..=remaining);
        parts.push(take);
        remaining -= take;
    }
    let mut projectors = Vec::with_capacity(parts.len());
    let mut col = 0usize;
    for width in parts {
        let mut p = Operator::zeros(dim);
        for k in col..col + width {
            let mut colproj = Operator::zeros(dim);
            for i in 0..dim {
                for j in 0..dim {
                    colproj.set(i, j, u.get(i, k) * u.get(j, k).conj());
                }
            }
            p = p.add(&colproj);
        }
        projectors.push(p);
        col += width;
    }
    ProjectiveMeasurement::new(projectors).expect("grouped basis projectors are projective")
}

/// Random POVM of `elements` outcomes on dimension `dim`: E_α = A_α†A_α
/// normalized so that Σ E_α = I (via the inverse square root of the sum).
pub fn random_povm(dim: usize, elements: usize, seed: u64) -> Result<Povm> {
    let mut r = rng(seed);
    let raw: Vec<Operator> = (0..elements)
        .map(|_| {
            let a = Operator::from_matrix(gaussian_matrix(dim, dim, &mut r));
            a.adjoint().mul(&a)
        })
        .collect();
    let mut total = Operator::zeros(dim);
    for e in &raw {
        total = total.add(e);
    }
    // S^{-1/2} E_α S^{-1/2} with S = Σ E_α.
    let (vals, vecs) = total.eigendecomposition_hermitian();
    let mut inv_sqrt = Operator::zeros(dim);
    let v = vecs.matrix();
    for (k, lam) in vals.iter().enumerate() {
        let w = 1.0 / lam.sqrt();
        for i in 0..dim {
            for j in 0..dim {
                let cur = inv_sqrt.get(i, j);
                inv_sqrt.set(i, j, cur + v[(i, k)] * v[(j, k)].conj() * w);
            }
        }
    }
    let elements: Vec<Operator> = raw
        .iter()
        .map(|e| inv_sqrt.mul(e).mul(&inv_sqrt).hermitize())
        .collect();
    Povm::new(elements)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rank1_density_is_pure() {
        let rho = random_density(4, 1, 9).unwrap();
        assert!((rho.purity() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn random_density_validates() {
        for seed in 0..20 {
            let rho = random_density(3, 2, seed).unwrap();
            assert!(crate::state::validate_density(rho.operator().clone()).is_ok());
        }
    }

    #[test]
    fn random_density_rejects_bad_rank() {
        assert!(random_density(2, 0, 1).is_err());
        assert!(random_density(2, 3, 1).is_err());
    }

    #[test]
    fn random_unitary_is_unitary() {
        for seed in 0..10 {
            assert!(random_unitary(4, seed).unitarity_defect() < 1e-10);
        }
    }

    #[test]
    fn seeded_generators_are_deterministic() {
        let a = random_density(3, 2, 77).unwrap();
        let b = random_density(3, 2, 77).unwrap();
        assert_eq!(a.operator(), b.operator());
        let u = random_unitary(3, 78);
        let v = random_unitary(3, 78);
        assert_eq!(u, v);
    }

    #[test]
    fn random_povm_is_valid() {
        for seed in 0..5 {
            assert!(random_povm(2, 3, seed).is_ok());
        }
    }

    #[test]
    fn random_coarse_measurement_is_valid() {
        for seed in 0..10 {
            let m = random_coarse_measurement(3, seed);
            assert!(m.outcomes() >= 1 && m.outcomes() <= 3);
        }
    }
}
