//! Dense complex linear algebra for small Hilbert spaces (dimension up to a few hundred).

mod density;
mod matrix;

pub use density::DensityMatrix;
pub use matrix::{kron, kron_all, ComplexMatrix};

use nalgebra::SymmetricEigen;
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::{tol, Error, Result};

/// Logarithm base used by every entropy.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum LogBase {
    #[serde(rename = "2")]
    Two,
    #[serde(rename = "e")]
    E,
}

impl LogBase {
    pub fn log(self, x: f64) -> f64 {
        match self {
            LogBase::Two => x.log2(),
            LogBase::E => x.ln(),
        }
    }
}

impl std::fmt::Display for LogBase {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            LogBase::Two => "2",
            LogBase::E => "e",
        })
    }
}

impl std::str::FromStr for LogBase {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "2" => Ok(LogBase::Two),
            "e" => Ok(LogBase::E),
            other => Err(Error::invalid(format!(
                "log base must be `2` or `e`, got `{other}`"
            ))),
        }
    }
}

/// Spectrum of a Hermitian matrix: ascending eigenvalues and the matching
/// orthonormal eigenvectors as columns.
#[derive(Debug, Clone)]
pub struct HermitianEigen {
    pub values: Vec<f64>,
    pub vectors: ComplexMatrix,
}

impl HermitianEigen {
    /// `V diag(f(lambda)) V^dagger`.
    pub fn map(&self, f: impl Fn(f64) -> f64) -> ComplexMatrix {
        let n = self.values.len();
        let v = &self.vectors;
        let fl: Vec<f64> = self.values.iter().map(|&l| f(l)).collect();
        let mut out = ComplexMatrix::zeros(n, n);
        for r in 0..n {
            for c in 0..n {
                let mut acc = C64::new(0.0, 0.0);
                for (k, &w) in fl.iter().enumerate() {
                    acc += v[(r, k)] * v[(c, k)].conj() * w;
                }
                out[(r, c)] = acc;
            }
        }
        out
    }
}

pub fn hermitian_eig(h: &ComplexMatrix) -> Result<HermitianEigen> {
    if !h.is_square() {
        return Err(Error::invalid(format!(
            "eigendecomposition needs a square matrix, got {}x{}",
            h.rows(),
            h.cols()
        )));
    }
    let defect = h.hermiticity_defect();
    if defect > tol::EIG_INPUT_HERMITIAN {
        return Err(Error::invalid(format!(
            "matrix is not Hermitian (max |h - h^dagger| = {defect:e})"
        )));
    }
    Ok(hermitian_eig_unchecked(&h.hermitian_part()))
}

pub(crate) fn hermitian_eig_unchecked(h: &ComplexMatrix) -> HermitianEigen {
    let eig = SymmetricEigen::new(h.to_nalgebra());
    let n = h.rows();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let mut vectors = ComplexMatrix::zeros(n, n);
    for (col, &i) in order.iter().enumerate() {
        for r in 0..n {
            vectors[(r, col)] = eig.eigenvectors[(r, i)];
        }
    }
    HermitianEigen { values, vectors }
}

/// Ascending eigenvalues of a Hermitian matrix.
pub fn hermitian_eigenvalues(h: &ComplexMatrix) -> Result<Vec<f64>> {
    hermitian_eig(h).map(|e| e.values)
}

/// `1/2 ||a - b||_1`.
pub fn trace_distance(a: &DensityMatrix, b: &DensityMatrix) -> Result<f64> {
    if a.dim() != b.dim() {
        return Err(Error::invalid(format!(
            "trace distance between states of dimension {} and {}",
            a.dim(),
            b.dim()
        )));
    }
    let diff = (a.matrix() - b.matrix()).hermitian_part();
    let values = hermitian_eig_unchecked(&diff).values;
    Ok((0.5 * values.iter().map(|l| l.abs()).sum::<f64>()).min(1.0))
}

/// Shannon entropy of a probability vector, skipping entries below the clip floor.
pub fn shannon_entropy(probs: &[f64], base: LogBase) -> f64 {
    let h: f64 = probs
        .iter()
        .filter(|&&p| p > tol::EIGEN_CLIP)
        .map(|&p| -p * base.log(p))
        .sum();
    h.max(0.0)
}

/// `-Tr rho log rho`.
pub fn von_neumann_entropy(rho: &DensityMatrix, base: LogBase) -> f64 {
    shannon_entropy(&rho.eigenvalues(), base)
}

/// Reduced state on the subsystems listed in `keep`, in ascending subsystem order.
///
/// `dims` are the local dimensions of the tensor factors, most significant first.
pub fn partial_trace(rho: &DensityMatrix, dims: &[usize], keep: &[usize]) -> Result<DensityMatrix> {
    let total: usize = dims.iter().product();
    if dims.is_empty() || total != rho.dim() {
        return Err(Error::invalid(format!(
            "local dimensions {dims:?} do not factor a {}-dimensional state",
            rho.dim()
        )));
    }
    if keep.is_empty() {
        return Err(Error::invalid(
            "partial trace must keep at least one subsystem",
        ));
    }
    let mut kept: Vec<usize> = keep.to_vec();
    kept.sort_unstable();
    kept.dedup();
    if kept.len() != keep.len() {
        return Err(Error::invalid(format!(
            "repeated subsystem in keep set {keep:?}"
        )));
    }
    if let Some(&bad) = kept.iter().find(|&&k| k >= dims.len()) {
        return Err(Error::invalid(format!(
            "subsystem {bad} out of range for {} subsystems",
            dims.len()
        )));
    }
    let traced: Vec<usize> = (0..dims.len()).filter(|i| !kept.contains(i)).collect();

    // Row-major strides of the full index.
    let mut strides = vec![1usize; dims.len()];
    for i in (0..dims.len().saturating_sub(1)).rev() {
        strides[i] = strides[i + 1] * dims[i + 1];
    }
    let offsets = |subs: &[usize]| -> Vec<usize> {
        let count: usize = subs.iter().map(|&s| dims[s]).product();
        (0..count)
            .map(|mut flat| {
                let mut off = 0;
                for &s in subs.iter().rev() {
                    off += (flat % dims[s]) * strides[s];
                    flat /= dims[s];
                }
                off
            })
            .collect()
    };
    let kept_off = offsets(&kept);
    let traced_off = offsets(&traced);

    let m = rho.matrix();
    let d = kept_off.len();
    let mut out = ComplexMatrix::zeros(d, d);
    for (i, &ri) in kept_off.iter().enumerate() {
        for (j, &cj) in kept_off.iter().enumerate() {
            out[(i, j)] = traced_off.iter().map(|&t| m[(ri + t, cj + t)]).sum();
        }
    }
    Ok(DensityMatrix::from_matrix_unchecked(out))
}

/// Matrix exponential by scaling and squaring with a Pade approximant.
pub fn expm(a: &ComplexMatrix) -> Result<ComplexMatrix> {
    if !a.is_square() {
        return Err(Error::invalid("matrix exponential needs a square matrix"));
    }
    Ok(ComplexMatrix::from_nalgebra(&a.to_nalgebra().exp()))
}

/// Column-stacking vectorization.
pub fn vec_columns(m: &ComplexMatrix) -> Vec<C64> {
    let mut out = Vec::with_capacity(m.rows() * m.cols());
    for c in 0..m.cols() {
        for r in 0..m.rows() {
            out.push(m[(r, c)]);
        }
    }
    out
}

/// Inverse of [`vec_columns`] for a square matrix of side `dim`.
pub fn unvec_columns(v: &[C64], dim: usize) -> Result<ComplexMatrix> {
    if v.len() != dim * dim {
        return Err(Error::invalid(format!(
            "vector of length {} is not a {dim}x{dim} matrix",
            v.len()
        )));
    }
    let mut m = ComplexMatrix::zeros(dim, dim);
    for c in 0..dim {
        for r in 0..dim {
            m[(r, c)] = v[c * dim + r];
        }
    }
    Ok(m)
}

/// Dense matrix-vector product.
pub fn mat_vec(m: &ComplexMatrix, v: &[C64]) -> Result<Vec<C64>> {
    if m.cols() != v.len() {
        return Err(Error::invalid(format!(
            "cannot apply {}x{} matrix to vector of length {}",
            m.rows(),
            m.cols(),
            v.len()
        )));
    }
    Ok(m.as_slice()
        .chunks(m.cols())
        .map(|row| row.iter().zip(v).map(|(a, b)| a * b).sum())
        .collect())
}
