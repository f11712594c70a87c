//! Entropy functionals: von Neumann, Shannon, joint/conditional/mutual
//! entropies over labeled subsystems, and the two- and three-set
//! Venn-diagram decompositions. All values are in bits.

use serde::Serialize;

use crate::error::{QError, Result};
use crate::operator::Operator;
use crate::state::{DensityOperator, Ensemble, MultipartiteState};

/// Eigenvalues in [-EIG_CLAMP_TOL, 0] are treated as exact zeros; anything
/// more negative is reported as a positivity violation rather than clamped.
pub const EIG_CLAMP_TOL: f64 = 1e-10;

/// A clamped, normalized probability vector.
#[derive(Debug, Clone, PartialEq)]
pub struct ProbabilityVector {
    p: Vec<f64>,
}

impl ProbabilityVector {
    /// Clamps entries in [-1e-12, 0] to zero and checks normalization
    /// within 1e-9.
    pub fn new(p: Vec<f64>) -> Result<Self> {
        let mut clamped = Vec::with_capacity(p.len());
        for v in p {
            if v < -1e-12 {
                return Err(QError::NotPositive { min_eigenvalue: v });
            }
            clamped.push(v.max(0.0));
        }
        let sum: f64 = clamped.iter().sum();
        if (sum - 1.0).abs() > 1e-9 {
            return Err(QError::ProbabilitiesNotNormalized { sum });
        }
        Ok(Self { p: clamped })
    }

    pub fn values(&self) -> &[f64] {
        &self.p
    }
}

/// Shannon entropy H[p] = -Σ p log₂ p, with 0·log 0 := 0.
pub fn shannon(p: &ProbabilityVector) -> f64 {
    shannon_raw(p.values())
}

/// Shannon entropy of a raw slice; negative roundoff entries are ignored.
pub(crate) fn shannon_raw(p: &[f64]) -> f64 {
    p.iter()
        .filter(|&&v| v > 0.0)
        .map(|&v| -v * v.log2())
        .sum()
}

/// Binary entropy H₂(x) = -x log₂ x - (1-x) log₂(1-x).
pub fn binary_entropy(x: f64) -> f64 {
    shannon_raw(&[x, 1.0 - x])
}

/// Entropy of a Hermitian operator's clamped spectrum. Internal: used where
/// sub-normalized or conditional blocks appear (their eigenvalue sets are
/// still probability-like after normalization by the caller).
pub(crate) fn entropy_of_spectrum(op: &Operator) -> Result<f64> {
    let vals = op.eigenvalues_hermitian();
    if let Some(&min) = vals.first() {
        if min < -EIG_CLAMP_TOL {
            return Err(QError::NotPositive {
                min_eigenvalue: min,
            });
        }
    }
    Ok(shannon_raw(
        &vals.iter().map(|v| v.max(0.0)).collect::<Vec<_>>(),
    ))
}

/// Von Neumann entropy S(ρ) = -Tr ρ log₂ ρ, in bits.
pub fn von_neumann(rho: &DensityOperator) -> Result<f64> {
    entropy_of_spectrum(rho.operator())
}

/// Entropy of the reduced state on `subset`.
pub fn subset_entropy(s: &MultipartiteState, subset: &[&str]) -> Result<f64> {
    von_neumann(s.reduce_to(subset)?.state())
}

fn check_disjoint(a: &[&str], b: &[&str]) -> Result<()> {
    for label in a {
        if b.contains(label) {
            return Err(QError::OverlappingLabels((*label).to_string()));
        }
    }
    Ok(())
}

fn union<'a>(a: &[&'a str], b: &[&'a str]) -> Vec<&'a str> {
    let mut out: Vec<&str> = a.to_vec();
    out.extend_from_slice(b);
    out
}

/// Quantum mutual entropy S(X:Y) = S(X) + S(Y) - S(XY).
pub fn mutual(s: &MultipartiteState, xs: &[&str], ys: &[&str]) -> Result<f64> {
    if xs.is_empty() || ys.is_empty() {
        return Err(QError::EmptySubset);
    }
    check_disjoint(xs, ys)?;
    let sx = subset_entropy(s, xs)?;
    let sy = subset_entropy(s, ys)?;
    let sxy = subset_entropy(s, &union(xs, ys))?;
    Ok(sx + sy - sxy)
}

/// Conditional mutual entropy S(X:Y|Z) = S(XZ) + S(YZ) - S(Z) - S(XYZ).
/// Non-negative by strong subadditivity. An empty conditioning set reduces
/// to `mutual`.
pub fn conditional_mutual(
    s: &MultipartiteState,
    xs: &[&str],
    ys: &[&str],
    zs: &[&str],
) -> Result<f64> {
    if xs.is_empty() || ys.is_empty() {
        return Err(QError::EmptySubset);
    }
    check_disjoint(xs, ys)?;
    check_disjoint(xs, zs)?;
    check_disjoint(ys, zs)?;
    if zs.is_empty() {
        return mutual(s, xs, ys);
    }
    let sxz = subset_entropy(s, &union(xs, zs))?;
    let syz = subset_entropy(s, &union(ys, zs))?;
    let sz = subset_entropy(s, zs)?;
    let sxyz = subset_entropy(s, &union(&union(xs, ys), zs))?;
    Ok(sxz + syz - sz - sxyz)
}

/// The three regions of the bipartite entropy Venn diagram, in bits.
#[derive(Debug, Clone, Serialize)]
pub struct VennDiagram2 {
    /// S(X|Q)
    pub left: f64,
    /// S(X:Q)
    pub center: f64,
    /// S(Q|X)
    pub right: f64,
}

impl VennDiagram2 {
    pub fn total(&self) -> f64 {
        self.left + self.center + self.right
    }

    pub fn to_text(&self, x: &str, y: &str) -> String {
        format!(
            "Venn diagram [{x}|{y}] (bits)\n  S({x}|{y}) = {:.6}\n  S({x}:{y}) = {:.6}\n  S({y}|{x}) = {:.6}",
            self.left, self.center, self.right
        )
    }

    /// Region name → value pairs for machine output.
    pub fn regions(&self, x: &str, y: &str) -> Vec<(String, f64)> {
        vec![
            (format!("S({x}|{y})"), self.left),
            (format!("S({x}:{y})"), self.center),
            (format!("S({y}|{x})"), self.right),
        ]
    }
}

/// The seven regions of the tripartite entropy Venn diagram, in bits. The
/// ternary center may be negative.
#[derive(Debug, Clone, Serialize)]
pub struct VennDiagram3 {
    /// S(X|QA)
    pub x_only: f64,
    /// S(Q|XA)
    pub y_only: f64,
    /// S(A|XQ)
    pub z_only: f64,
    /// S(X:Q|A)
    pub xy: f64,
    /// S(X:A|Q)
    pub xz: f64,
    /// S(Q:A|X)
    pub yz: f64,
    /// S(X:Q:A), the ternary center
    pub center: f64,
}

impl VennDiagram3 {
    pub fn total(&self) -> f64 {
        self.x_only + self.y_only + self.z_only + self.xy + self.xz + self.yz + self.center
    }

    pub fn to_text(&self, x: &str, y: &str, z: &str) -> String {
        format!(
            "Venn diagram [{x}|{y}|{z}] (bits)\n  S({x}|{y}{z}) = {:.6}\n  S({y}|{x}{z}) = {:.6}\n  S({z}|{x}{y}) = {:.6}\n  S({x}:{y}|{z}) = {:.6}\n  S({x}:{z}|{y}) = {:.6}\n  S({y}:{z}|{x}) = {:.6}\n  S({x}:{y}:{z}) = {:.6}",
            self.x_only, self.y_only, self.z_only, self.xy, self.xz, self.yz, self.center
        )
    }

    pub fn regions(&self, x: &str, y: &str, z: &str) -> Vec<(String, f64)> {
        vec![
            (format!("S({x}|{y}{z})"), self.x_only),
            (format!("S({y}|{x}{z})"), self.y_only),
            (format!("S({z}|{x}{y})"), self.z_only),
            (format!("S({x}:{y}|{z})"), self.xy),
            (format!("S({x}:{z}|{y})"), self.xz),
            (format!("S({y}:{z}|{x})"), self.yz),
            (format!("S({x}:{y}:{z})"), self.center),
        ]
    }
}

/// Bipartite Venn decomposition via inclusion-exclusion on subset entropies.
pub fn venn2(s: &MultipartiteState, xs: &[&str], ys: &[&str]) -> Result<VennDiagram2> {
    if xs.is_empty() || ys.is_empty() {
        return Err(QError::EmptySubset);
    }
    check_disjoint(xs, ys)?;
    let sx = subset_entropy(s, xs)?;
    let sy = subset_entropy(s, ys)?;
    let sxy = subset_entropy(s, &union(xs, ys))?;
    Ok(VennDiagram2 {
        left: sxy - sy,
        center: sx + sy - sxy,
        right: sxy - sx,
    })
}

/// Tripartite Venn decomposition via inclusion-exclusion.
pub fn venn3(
    s: &MultipartiteState,
    xs: &[&str],
    ys: &[&str],
    zs: &[&str],
) -> Result<VennDiagram3> {
    if xs.is_empty() || ys.is_empty() || zs.is_empty() {
        return Err(QError::EmptySubset);
    }
    check_disjoint(xs, ys)?;
    check_disjoint(xs, zs)?;
    check_disjoint(ys, zs)?;
    let sx = subset_entropy(s, xs)?;
    let sy = subset_entropy(s, ys)?;
    let sz = subset_entropy(s, zs)?;
    let sxy = subset_entropy(s, &union(xs, ys))?;
    let sxz = subset_entropy(s, &union(xs, zs))?;
    let syz = subset_entropy(s, &union(ys, zs))?;
    let sxyz = subset_entropy(s, &union(&union(xs, ys), zs))?;
    Ok(VennDiagram3 {
        x_only: sxyz - syz,
        y_only: sxyz - sxz,
        z_only: sxyz - sxy,
        xy: sxz + syz - sz - sxyz,
        xz: sxy + syz - sy - sxyz,
        yz: sxy + sxz - sx - sxyz,
        center: sx + sy + sz - sxy - sxz - syz + sxyz,
    })
}

/// Shannon mutual information of the diagonal of the reduced state on
/// xs ∪ ys in the computational product basis.
pub fn diagonal_mutual_shannon(
    s: &MultipartiteState,
    xs: &[&str],
    ys: &[&str],
) -> Result<f64> {
    if xs.is_empty() || ys.is_empty() {
        return Err(QError::EmptySubset);
    }
    check_disjoint(xs, ys)?;
    let reduced = s.reduce_to(&union(xs, ys))?;
    let parts = reduced.layout().parts().to_vec();
    let dims: Vec<usize> = parts.iter().map(|(_, d)| *d).collect();
    let in_x: Vec<bool> = parts.iter().map(|(l, _)| xs.contains(&l.as_str())).collect();
    let dx: usize = dims
        .iter()
        .zip(&in_x)
        .filter(|(_, f)| **f)
        .map(|(d, _)| *d)
        .product();
    let dy: usize = reduced.dim() / dx;

    // Group the diagonal's multi-index into (x-group, y-group) indices.
    let mut joint = vec![0.0f64; dx * dy];
    for full in 0..reduced.dim() {
        let mut rem = full;
        let mut digits = vec![0usize; dims.len()];
        for (slot, d) in dims.iter().enumerate().rev() {
            digits[slot] = rem % d;
            rem /= d;
        }
        let mut xi = 0usize;
        let mut yi = 0usize;
        for (slot, d) in dims.iter().enumerate() {
            if in_x[slot] {
                xi = xi * d + digits[slot];
            } else {
                yi = yi * d + digits[slot];
            }
        }
        joint[xi * dy + yi] += reduced.state().operator().get(full, full).re.max(0.0);
    }

    let px: Vec<f64> = (0..dx)
        .map(|i| (0..dy).map(|j| joint[i * dy + j]).sum())
        .collect();
    let py: Vec<f64> = (0..dy)
        .map(|j| (0..dx).map(|i| joint[i * dy + j]).sum())
        .collect();
    Ok(shannon_raw(&px) + shannon_raw(&py) - shannon_raw(&joint))
}

/// Holevo quantity χ = S(Σ p_i ρ_i) - Σ p_i S(ρ_i) of an ensemble.
pub fn holevo_chi_of(e: &Ensemble) -> Result<f64> {
    let mix = von_neumann(&e.average_state())?;
    let mut avg = 0.0;
    for (p, rho) in e.probs().iter().zip(e.states()) {
        avg += p * von_neumann(rho)?;
    }
    Ok(mix - avg)
}
