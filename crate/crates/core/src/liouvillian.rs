//! Vectorization of the master equation into a sparse superoperator.
//!
//! Density matrices are column-stacked: `vec(ρ)[c·d + r] = ρ[r, c]`, which is
//! exactly the column-major storage order of [`OperatorMatrix`]. Under this
//! convention `vec(AρB) = (Bᵀ ⊗ A) vec(ρ)`, so
//!
//! * the commutator part is `−i(I ⊗ H − Hᵀ ⊗ I)`,
//! * a standard dissipator `(κ/2)(2AρA† − A†Aρ − ρA†A)` becomes
//!   `κ(Ā ⊗ A) − (κ/2)(I ⊗ A†A + (A†A)ᵀ ⊗ I)`,
//! * a cross pair `(κ/2)Σ_{i≠j}(2A_iρA_j† − A_j†A_iρ − ρA_j†A_i)` becomes
//!   `κ(Ā₂ ⊗ A₁ + Ā₁ ⊗ A₂) − (κ/2)(I ⊗ X + Xᵀ ⊗ I)` with
//!   `X = A₂†A₁ + A₁†A₂`.
//!
//! The superoperator is assembled from the nonzero entries of each factor, so
//! the cost scales with `nnz(A)·nnz(B)` per Kronecker term rather than `d⁴`.

use faer::sparse::{SparseColMat, Triplet};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::model::{DissipatorForm, DissipatorSpec};
use crate::operators::OperatorMatrix;

type Entry = (usize, usize, Complex64);

/// Sparse matrix representation of the full Lindblad generator acting on
/// column-stacked density matrices.
pub struct Superoperator {
    dim: usize,
    matrix: SparseColMat<usize, Complex64>,
}

/// Column-stacks a density matrix (or any square matrix).
pub fn vec_density(rho: &OperatorMatrix) -> Vec<Complex64> {
    rho.as_slice().to_vec()
}

/// Inverse of [`vec_density`]; the length must be a perfect square.
pub fn unvec_density(v: &[Complex64]) -> Result<OperatorMatrix> {
    let d = (v.len() as f64).sqrt().round() as usize;
    if d * d != v.len() {
        return Err(Error::InvalidDimension(format!(
            "vectorized density length {} is not a perfect square",
            v.len()
        )));
    }
    Ok(OperatorMatrix::from_column_slice(d, d, v))
}

fn sparse_entries(m: &OperatorMatrix) -> Vec<Entry> {
    let mut out = Vec::new();
    for c in 0..m.ncols() {
        for r in 0..m.nrows() {
            let v = m[(r, c)];
            if v != Complex64::new(0.0, 0.0) {
                out.push((r, c, v));
            }
        }
    }
    out
}

fn conj_entries(entries: &[Entry]) -> Vec<Entry> {
    entries.iter().map(|&(r, c, v)| (r, c, v.conj())).collect()
}

fn transpose_entries(entries: &[Entry]) -> Vec<Entry> {
    entries.iter().map(|&(r, c, v)| (c, r, v)).collect()
}

fn identity_entries(d: usize) -> Vec<Entry> {
    (0..d).map(|j| (j, j, Complex64::new(1.0, 0.0))).collect()
}

/// Emits `scale · (left ⊗ right)` as triplets, with `right` living on a
/// `d`-dimensional space.
fn push_kron(
    out: &mut Vec<Triplet<usize, usize, Complex64>>,
    scale: Complex64,
    left: &[Entry],
    right: &[Entry],
    d: usize,
) {
    for &(rl, cl, vl) in left {
        let lv = scale * vl;
        for &(rr, cr, vr) in right {
            out.push(Triplet::new(rl * d + rr, cl * d + cr, lv * vr));
        }
    }
}

fn push_sandwich_and_anticommutator(
    out: &mut Vec<Triplet<usize, usize, Complex64>>,
    rate: f64,
    sandwich: &[(Vec<Entry>, Vec<Entry>)],
    x: &OperatorMatrix,
    id: &[Entry],
    d: usize,
) {
    let kappa = Complex64::new(rate, 0.0);
    for (left, right) in sandwich {
        push_kron(out, kappa, left, right, d);
    }
    let x_entries = sparse_entries(x);
    let half = Complex64::new(-rate / 2.0, 0.0);
    push_kron(out, half, id, &x_entries, d);
    push_kron(out, half, &transpose_entries(&x_entries), id, d);
}

/// Assembles the sparse generator `𝓛` with
/// `𝓛[ρ] = −i[H, ρ] + Σ (dissipator terms)`. Dissipators with exactly zero
/// rate contribute nothing and are skipped during assembly.
pub fn vectorize(h: &OperatorMatrix, dissipators: &[DissipatorSpec]) -> Result<Superoperator> {
    let d = h.nrows();
    if h.ncols() != d {
        return Err(Error::DimensionMismatch(format!(
            "Hamiltonian must be square, got {}x{}",
            h.nrows(),
            h.ncols()
        )));
    }
    for (idx, spec) in dissipators.iter().enumerate() {
        if spec.dim() != d {
            return Err(Error::DimensionMismatch(format!(
                "dissipator {idx} has dimension {} but the Hamiltonian has {d}",
                spec.dim()
            )));
        }
        if !(spec.rate >= 0.0) {
            return Err(Error::InvalidParameter(format!(
                "dissipator {idx} has negative or non-finite rate {}",
                spec.rate
            )));
        }
        if let DissipatorForm::Cross(a1, a2) = &spec.form {
            if a1.nrows() != a1.ncols() || a2.nrows() != a2.ncols() || a2.nrows() != d {
                return Err(Error::DimensionMismatch(
                    "cross dissipator operators must be square with matching dimension".into(),
                ));
            }
        }
    }

    let id = identity_entries(d);
    let mut triplets: Vec<Triplet<usize, usize, Complex64>> = Vec::new();

    let h_entries = sparse_entries(h);
    let minus_i = Complex64::new(0.0, -1.0);
    let plus_i = Complex64::new(0.0, 1.0);
    push_kron(&mut triplets, minus_i, &id, &h_entries, d);
    push_kron(&mut triplets, plus_i, &transpose_entries(&h_entries), &id, d);

    for spec in dissipators {
        if spec.rate == 0.0 {
            continue;
        }
        match &spec.form {
            DissipatorForm::Standard(a) => {
                let a_entries = sparse_entries(a);
                let sandwich = vec![(conj_entries(&a_entries), a_entries.clone())];
                let x = a.adjoint() * a;
                push_sandwich_and_anticommutator(&mut triplets, spec.rate, &sandwich, &x, &id, d);
            }
            DissipatorForm::Cross(a1, a2) => {
                let a1_entries = sparse_entries(a1);
                let a2_entries = sparse_entries(a2);
                let sandwich = vec![
                    (conj_entries(&a2_entries), a1_entries.clone()),
                    (conj_entries(&a1_entries), a2_entries.clone()),
                ];
                let x = a2.adjoint() * a1 + a1.adjoint() * a2;
                push_sandwich_and_anticommutator(&mut triplets, spec.rate, &sandwich, &x, &id, d);
            }
        }
    }

    let matrix = SparseColMat::try_new_from_triplets(d * d, d * d, &triplets)
        .map_err(|e| Error::Numerical(format!("superoperator assembly failed: {e:?}")))?;
    Ok(Superoperator { dim: d, matrix })
}

impl Superoperator {
    /// Hilbert-space dimension d.
    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Dimension d² of the vectorized space the matrix acts on.
    pub fn superdim(&self) -> usize {
        self.dim * self.dim
    }

    pub fn nnz(&self) -> usize {
        self.matrix.val().len()
    }

    /// Visits every stored entry as `(row, col, value)`.
    pub(crate) fn for_each_entry(&self, mut f: impl FnMut(usize, usize, Complex64)) {
        let sym = self.matrix.symbolic();
        let col_ptr = sym.col_ptr();
        let row_idx = sym.row_idx();
        let vals = self.matrix.val();
        for col in 0..self.superdim() {
            for p in col_ptr[col]..col_ptr[col + 1] {
                f(row_idx[p], col, vals[p]);
            }
        }
    }

    /// `y = 𝓛 x` on raw column-stacked slices.
    pub fn apply_slice(&self, x: &[Complex64], y: &mut [Complex64]) {
        assert_eq!(x.len(), self.superdim());
        assert_eq!(y.len(), self.superdim());
        y.fill(Complex64::new(0.0, 0.0));
        let sym = self.matrix.symbolic();
        let col_ptr = sym.col_ptr();
        let row_idx = sym.row_idx();
        let vals = self.matrix.val();
        for (col, &xc) in x.iter().enumerate() {
            if xc == Complex64::new(0.0, 0.0) {
                continue;
            }
            for p in col_ptr[col]..col_ptr[col + 1] {
                y[row_idx[p]] += vals[p] * xc;
            }
        }
    }

    /// `𝓛[ρ]` as a matrix, for direct comparison against the written-out
    /// master equation.
    pub fn apply_matrix(&self, rho: &OperatorMatrix) -> Result<OperatorMatrix> {
        if rho.nrows() != self.dim || rho.ncols() != self.dim {
            return Err(Error::DimensionMismatch(format!(
                "density matrix is {}x{}, generator acts on {}x{}",
                rho.nrows(),
                rho.ncols(),
                self.dim,
                self.dim
            )));
        }
        let x = vec_density(rho);
        let mut y = vec![Complex64::new(0.0, 0.0); self.superdim()];
        self.apply_slice(&x, &mut y);
        unvec_density(&y)
    }

    /// ‖vecᵀ(I) · 𝓛‖₂ — how far the generator is from exactly preserving the
    /// trace. Zero in exact arithmetic.
    pub fn trace_defect(&self) -> f64 {
        let d = self.dim;
        let mut functional = vec![Complex64::new(0.0, 0.0); self.superdim()];
        self.for_each_entry(|row, col, v| {
            // vec(I) has ones exactly at the diagonal slots r = c.
            if row % d == row / d {
                functional[col] += v;
            }
        });
        functional.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }
}
