use nalgebra::{DMatrix, DVector};

use super::string::{BasisAction, PauliString};
use crate::{Error, Result, C64};

/// Qubit caps for dense representations.
#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct Caps {
    /// Largest `n` for a dense `2^n × 2^n` operator.
    pub dense_qubits: usize,
    /// Largest `n` for a dense `4^n × 4^n` Choi matrix.
    pub choi_qubits: usize,
}

impl Default for Caps {
    fn default() -> Self {
        Self {
            dense_qubits: 6,
            choi_qubits: 5,
        }
    }
}

pub(crate) fn log2_exact(dim: usize) -> Result<usize> {
    if dim == 0 || !dim.is_power_of_two() {
        return Err(Error::NotPowerOfTwo(dim));
    }
    Ok(dim.trailing_zeros() as usize)
}

/// A dense operator on `n` qubits.
#[derive(Clone, Debug, PartialEq)]
pub struct DenseOperator {
    n: usize,
    mat: DMatrix<C64>,
}

impl DenseOperator {
    pub fn new(mat: DMatrix<C64>) -> Result<Self> {
        Self::with_cap(mat, Caps::default().dense_qubits)
    }

    pub fn with_cap(mat: DMatrix<C64>, cap: usize) -> Result<Self> {
        if mat.nrows() != mat.ncols() {
            return Err(Error::ShapeMismatch(format!(
                "{}x{} matrix is not square",
                mat.nrows(),
                mat.ncols()
            )));
        }
        let n = log2_exact(mat.nrows())?;
        if n == 0 {
            return Err(Error::NotPowerOfTwo(1));
        }
        if n > cap {
            return Err(Error::CapExceeded {
                what: "dense operator",
                n,
                cap,
            });
        }
        Ok(Self { n, mat })
    }

    pub fn from_rows(rows: &[&[C64]]) -> Result<Self> {
        let dim = rows.len();
        let flat: Vec<C64> = rows.iter().flat_map(|r| r.iter().copied()).collect();
        if flat.len() != dim * dim {
            return Err(Error::ShapeMismatch("ragged rows".into()));
        }
        Self::new(DMatrix::from_row_slice(dim, dim, &flat))
    }

    pub fn identity(n: usize) -> Result<Self> {
        Self::new(DMatrix::identity(1 << n, 1 << n))
    }

    /// The dense matrix of `σ_x`.
    pub fn pauli(x: &PauliString) -> Result<Self> {
        let dim = 1usize << x.n();
        let mut mat = DMatrix::zeros(dim, dim);
        let act = BasisAction::new(x);
        for col in 0..dim {
            let (row, ph) = act.apply(col);
            mat[(row, col)] = ph;
        }
        Self::new(mat)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.mat.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.mat
    }

    pub fn into_matrix(self) -> DMatrix<C64> {
        self.mat
    }

    pub fn adjoint(&self) -> Self {
        Self {
            n: self.n,
            mat: self.mat.adjoint(),
        }
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        if self.n != other.n {
            return Err(Error::QubitMismatch {
                expected: self.n,
                found: other.n,
            });
        }
        Ok(Self {
            n: self.n,
            mat: &self.mat * &other.mat,
        })
    }

    pub fn kron(&self, other: &Self) -> Result<Self> {
        Self::new(self.mat.kronecker(&other.mat))
    }

    /// `max |U*U − I|` entrywise.
    pub fn unitarity_deviation(&self) -> f64 {
        let prod = self.mat.adjoint() * &self.mat;
        let dim = self.dim();
        let mut dev: f64 = 0.0;
        for i in 0..dim {
            for j in 0..dim {
                let target = if i == j { 1.0 } else { 0.0 };
                dev = dev.max((prod[(i, j)] - C64::new(target, 0.0)).norm());
            }
        }
        dev
    }

    pub fn is_unitary(&self, tol: f64) -> bool {
        self.unitarity_deviation() <= tol
    }

    pub fn ensure_unitary(&self, tol: f64) -> Result<()> {
        let dev = self.unitarity_deviation();
        if dev > tol {
            return Err(Error::NotUnitary(dev));
        }
        Ok(())
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        (&self.mat - self.mat.adjoint()).iter().all(|z| z.norm() <= tol)
    }

    /// Smallest eigenvalue of the Hermitian part.
    pub fn min_eigenvalue(&self) -> f64 {
        let h = (&self.mat + self.mat.adjoint()).scale(0.5);
        h.symmetric_eigenvalues().iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn is_psd(&self, tol: f64) -> bool {
        self.is_hermitian(tol) && self.min_eigenvalue() >= -tol
    }

    /// Largest singular value.
    pub fn op_norm(&self) -> f64 {
        op_norm(&self.mat)
    }

    /// Normalized Hilbert–Schmidt norm squared, `Tr[M*M]/N`.
    pub fn hs_norm_sq(&self) -> f64 {
        self.mat.iter().map(|z| z.norm_sqr()).sum::<f64>() / self.dim() as f64
    }

    pub fn trace(&self) -> C64 {
        self.mat.trace()
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        (&self.mat - &other.mat).iter().map(|z| z.norm()).fold(0.0, f64::max)
    }
}

/// Largest singular value of a dense complex matrix.
pub(crate) fn op_norm(m: &DMatrix<C64>) -> f64 {
    if m.is_empty() {
        return 0.0;
    }
    m.singular_values().iter().copied().fold(0.0, f64::max)
}

/// A unit-norm dense state on `n` qubits.
#[derive(Clone, Debug, PartialEq)]
pub struct DenseState {
    n: usize,
    vec: DVector<C64>,
}

impl DenseState {
    pub const NORM_TOL: f64 = 1e-10;

    pub fn new(vec: DVector<C64>) -> Result<Self> {
        let n = log2_exact(vec.len())?;
        if n > 2 * Caps::default().dense_qubits {
            return Err(Error::CapExceeded {
                what: "dense state",
                n,
                cap: 2 * Caps::default().dense_qubits,
            });
        }
        let norm = vec.norm();
        if (norm - 1.0).abs() > Self::NORM_TOL {
            return Err(Error::Invariant(format!("state norm {norm} is not 1")));
        }
        Ok(Self { n, vec })
    }

    pub fn basis(n: usize, index: usize) -> Result<Self> {
        let mut v = DVector::zeros(1 << n);
        v[index] = C64::new(1.0, 0.0);
        Self::new(v)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn vector(&self) -> &DVector<C64> {
        &self.vec
    }

    pub fn inner(&self, other: &Self) -> C64 {
        self.vec.dotc(&other.vec)
    }

    pub fn probabilities(&self) -> Vec<f64> {
        self.vec.iter().map(|z| z.norm_sqr()).collect()
    }
}

/// `(U ⊗ I)|Ω⟩` with `|Ω⟩ = Σ_i |i⟩|i⟩/√N`: amplitude `U[i,j]/√N` at `i·N + j`.
pub fn choi_state_of_unitary(u: &DenseOperator) -> Result<DenseState> {
    u.ensure_unitary(1e-9)?;
    let dim = u.dim();
    let scale = 1.0 / (dim as f64).sqrt();
    let mut v = DVector::zeros(dim * dim);
    for i in 0..dim {
        for j in 0..dim {
            v[i * dim + j] = u.matrix()[(i, j)] * scale;
        }
    }
    DenseState::new(v)
}
