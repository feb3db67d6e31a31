//! Dense complex linear algebra for qubit registers of up to six qubits.
//!
//! Matrices are stored row-major. Every operator in the crate (Pauli strings,
//! Kraus operators, density matrices) is a [`ComplexMatrix`] of dimension
//! `2^N` with `1 <= N <= 6`.
//!
//! Entropies and relative entropies are reported in bits.

use std::fmt;
use std::ops::{Add, Mul, Sub};

use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const MAX_DIM: usize = 64;

/// Hermiticity and unit-trace tolerance for density matrices.
pub const STATE_TOL: f64 = 1e-12;
/// Negative eigenvalues down to this size are clamped to zero.
pub const PSD_TOL: f64 = 1e-10;
/// Eigenvalues below this contribute nothing to entropies (0 log 0 = 0).
pub const ENTROPY_CUTOFF: f64 = 1e-14;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);
const I: Complex64 = Complex64::new(0.0, 1.0);

fn check_dim(dim: usize) -> Result<()> {
    if dim.is_power_of_two() && (2..=MAX_DIM).contains(&dim) {
        Ok(())
    } else {
        Err(Error::InvalidDimension(dim))
    }
}

/// Square complex matrix with power-of-two dimension.
#[derive(Clone, PartialEq)]
pub struct ComplexMatrix {
    dim: usize,
    data: Vec<Complex64>,
}

impl ComplexMatrix {
    pub fn zeros(dim: usize) -> Result<Self> {
        check_dim(dim)?;
        Ok(Self { dim, data: vec![ZERO; dim * dim] })
    }

    pub fn identity(dim: usize) -> Result<Self> {
        let mut m = Self::zeros(dim)?;
        for i in 0..dim {
            m.data[i * dim + i] = ONE;
        }
        Ok(m)
    }

    pub fn from_vec(dim: usize, data: Vec<Complex64>) -> Result<Self> {
        check_dim(dim)?;
        if data.len() != dim * dim {
            return Err(Error::DimensionMismatch(dim * dim, data.len()));
        }
        Ok(Self { dim, data })
    }

    /// Builds a matrix from rows of complex entries.
    pub fn from_rows(rows: &[Vec<Complex64>]) -> Result<Self> {
        let dim = rows.len();
        check_dim(dim)?;
        let mut data = Vec::with_capacity(dim * dim);
        for row in rows {
            if row.len() != dim {
                return Err(Error::DimensionMismatch(dim, row.len()));
            }
            data.extend_from_slice(row);
        }
        Ok(Self { dim, data })
    }

    /// Builds a matrix from separate real and imaginary row arrays.
    pub fn from_real_imag(re: &[Vec<f64>], im: &[Vec<f64>]) -> Result<Self> {
        if re.len() != im.len() {
            return Err(Error::DimensionMismatch(re.len(), im.len()));
        }
        let rows = re
            .iter()
            .zip(im)
            .map(|(r, i)| {
                if r.len() != i.len() {
                    return Err(Error::DimensionMismatch(r.len(), i.len()));
                }
                Ok(r.iter().zip(i).map(|(&a, &b)| Complex64::new(a, b)).collect())
            })
            .collect::<Result<Vec<Vec<Complex64>>>>()?;
        Self::from_rows(&rows)
    }

    pub fn diagonal(values: &[f64]) -> Result<Self> {
        let dim = values.len();
        let mut m = Self::zeros(dim)?;
        for (i, &v) in values.iter().enumerate() {
            m.data[i * dim + i] = Complex64::new(v, 0.0);
        }
        Ok(m)
    }

    /// Outer product `|u><v|`.
    pub fn outer(u: &[Complex64], v: &[Complex64]) -> Result<Self> {
        if u.len() != v.len() {
            return Err(Error::DimensionMismatch(u.len(), v.len()));
        }
        let dim = u.len();
        let mut m = Self::zeros(dim)?;
        for i in 0..dim {
            for j in 0..dim {
                m.data[i * dim + j] = u[i] * v[j].conj();
            }
        }
        Ok(m)
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Number of qubits this operator acts on.
    pub fn n_qubits(&self) -> usize {
        self.dim.trailing_zeros() as usize
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.data[i * self.dim + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, value: Complex64) {
        self.data[i * self.dim + j] = value;
    }

    pub fn as_slice(&self) -> &[Complex64] {
        &self.data
    }

    pub fn column(&self, j: usize) -> Vec<Complex64> {
        (0..self.dim).map(|i| self.get(i, j)).collect()
    }

    pub fn adjoint(&self) -> Self {
        let n = self.dim;
        let mut out = self.clone();
        for i in 0..n {
            for j in 0..n {
                out.data[j * n + i] = self.data[i * n + j].conj();
            }
        }
        out
    }

    pub fn transpose(&self) -> Self {
        let n = self.dim;
        let mut out = self.clone();
        for i in 0..n {
            for j in 0..n {
                out.data[j * n + i] = self.data[i * n + j];
            }
        }
        out
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.dim).map(|i| self.get(i, i)).sum()
    }

    pub fn scale(&self, factor: Complex64) -> Self {
        Self { dim: self.dim, data: self.data.iter().map(|&z| z * factor).collect() }
    }

    pub fn scale_real(&self, factor: f64) -> Self {
        self.scale(Complex64::new(factor, 0.0))
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        self.same_dim(other)?;
        Ok(Self {
            dim: self.dim,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect(),
        })
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self> {
        self.same_dim(other)?;
        Ok(Self {
            dim: self.dim,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a - b).collect(),
        })
    }

    pub fn try_mul(&self, other: &Self) -> Result<Self> {
        self.same_dim(other)?;
        let n = self.dim;
        let mut out = vec![ZERO; n * n];
        for i in 0..n {
            for k in 0..n {
                let a = self.data[i * n + k];
                if a == ZERO {
                    continue;
                }
                let row = &other.data[k * n..(k + 1) * n];
                let dst = &mut out[i * n..(i + 1) * n];
                for (d, b) in dst.iter_mut().zip(row) {
                    *d += a * b;
                }
            }
        }
        Ok(Self { dim: n, data: out })
    }

    /// `self * x * self^dagger`.
    pub fn conjugate(&self, x: &Self) -> Result<Self> {
        self.try_mul(x)?.try_mul(&self.adjoint())
    }

    pub fn apply_vec(&self, v: &[Complex64]) -> Result<Vec<Complex64>> {
        if v.len() != self.dim {
            return Err(Error::DimensionMismatch(self.dim, v.len()));
        }
        let n = self.dim;
        Ok((0..n)
            .map(|i| (0..n).map(|j| self.data[i * n + j] * v[j]).sum())
            .collect())
    }

    /// Largest entrywise modulus of `self - other`.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        if self.dim != other.dim {
            return f64::INFINITY;
        }
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// Largest `|m_ij - conj(m_ji)|`.
    pub fn hermiticity_error(&self) -> f64 {
        let n = self.dim;
        let mut err = 0.0f64;
        for i in 0..n {
            for j in i..n {
                err = err.max((self.data[i * n + j] - self.data[j * n + i].conj()).norm());
            }
        }
        err
    }

    /// Replaces the matrix by `(m + m^dagger) / 2`.
    pub fn hermitize(&mut self) {
        let n = self.dim;
        for i in 0..n {
            let d = self.data[i * n + i];
            self.data[i * n + i] = Complex64::new(d.re, 0.0);
            for j in (i + 1)..n {
                let avg = (self.data[i * n + j] + self.data[j * n + i].conj()) * 0.5;
                self.data[i * n + j] = avg;
                self.data[j * n + i] = avg.conj();
            }
        }
    }

    /// Largest modulus among off-diagonal entries.
    pub fn max_off_diagonal(&self) -> f64 {
        let n = self.dim;
        let mut m = 0.0f64;
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    m = m.max(self.data[i * n + j].norm());
                }
            }
        }
        m
    }

    pub fn diag_real(&self) -> Vec<f64> {
        (0..self.dim).map(|i| self.get(i, i).re).collect()
    }

    fn same_dim(&self, other: &Self) -> Result<()> {
        if self.dim == other.dim {
            Ok(())
        } else {
            Err(Error::DimensionMismatch(self.dim, other.dim))
        }
    }
}

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ComplexMatrix({}x{})", self.dim, self.dim)?;
        for i in 0..self.dim {
            let row: Vec<String> = (0..self.dim)
                .map(|j| {
                    let z = self.get(i, j);
                    format!("{:+.6}{:+.6}i", z.re, z.im)
                })
                .collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        Ok(())
    }
}

impl Add for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn add(self, rhs: Self) -> ComplexMatrix {
        self.try_add(rhs).expect("dimension mismatch in matrix addition")
    }
}

impl Sub for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn sub(self, rhs: Self) -> ComplexMatrix {
        self.try_sub(rhs).expect("dimension mismatch in matrix subtraction")
    }
}

impl Mul for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn mul(self, rhs: Self) -> ComplexMatrix {
        self.try_mul(rhs).expect("dimension mismatch in matrix product")
    }
}

/// Identity (`index = 0`) or one of the three Pauli matrices.
pub fn pauli(index: usize) -> Result<ComplexMatrix> {
    let rows = match index {
        0 => [[ONE, ZERO], [ZERO, ONE]],
        1 => [[ZERO, ONE], [ONE, ZERO]],
        2 => [[ZERO, -I], [I, ZERO]],
        3 => [[ONE, ZERO], [ZERO, -ONE]],
        _ => return Err(Error::IndexOutOfRange { what: "Pauli", index }),
    };
    ComplexMatrix::from_vec(2, rows.concat())
}

/// Kronecker product, `(a ⊗ b)[i*db + k, j*db + l] = a[i,j] * b[k,l]`.
pub fn tensor(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<ComplexMatrix> {
    let (da, db) = (a.dim, b.dim);
    let dim = da * db;
    check_dim(dim)?;
    let mut out = vec![ZERO; dim * dim];
    for i in 0..da {
        for j in 0..da {
            let aij = a.data[i * da + j];
            if aij == ZERO {
                continue;
            }
            for k in 0..db {
                for l in 0..db {
                    out[(i * db + k) * dim + j * db + l] = aij * b.data[k * db + l];
                }
            }
        }
    }
    Ok(ComplexMatrix { dim, data: out })
}

/// Tensor product of a sequence of operators, left to right.
pub fn tensor_all<'a, I>(ops: I) -> Result<ComplexMatrix>
where
    I: IntoIterator<Item = &'a ComplexMatrix>,
{
    let mut iter = ops.into_iter();
    let first = iter
        .next()
        .ok_or(Error::IndexOutOfRange { what: "tensor factor", index: 0 })?
        .clone();
    iter.try_fold(first, |acc, m| tensor(&acc, m))
}

/// `sigma_index^{⊗n}`.
pub fn pauli_power(index: usize, n: usize) -> Result<ComplexMatrix> {
    let p = pauli(index)?;
    tensor_all(std::iter::repeat_n(&p, n))
}

/// Embeds a single-qubit operator on `qubit` (0 = leftmost) of an `n`-qubit register.
pub fn embed_single(op: &ComplexMatrix, qubit: usize, n: usize) -> Result<ComplexMatrix> {
    if qubit >= n {
        return Err(Error::IndexOutOfRange { what: "qubit", index: qubit });
    }
    let id = pauli(0)?;
    let factors: Vec<&ComplexMatrix> = (0..n).map(|k| if k == qubit { op } else { &id }).collect();
    tensor_all(factors)
}

/// Spectral decomposition of a Hermitian matrix: ascending eigenvalues and
/// the matching orthonormal eigenvectors stored as columns.
#[derive(Clone, Debug)]
pub struct HermitianEigen {
    pub values: Vec<f64>,
    pub vectors: ComplexMatrix,
}

impl HermitianEigen {
    /// Rebuilds `V diag(f(λ)) V^dagger`.
    pub fn map_spectrum(&self, f: impl Fn(f64) -> f64) -> ComplexMatrix {
        let n = self.vectors.dim;
        let mut out = vec![ZERO; n * n];
        for (k, &lambda) in self.values.iter().enumerate() {
            let w = f(lambda);
            if w == 0.0 {
                continue;
            }
            for i in 0..n {
                let vik = self.vectors.get(i, k) * w;
                for j in 0..n {
                    out[i * n + j] += vik * self.vectors.get(j, k).conj();
                }
            }
        }
        ComplexMatrix { dim: n, data: out }
    }

    pub fn reconstruct(&self) -> ComplexMatrix {
        self.map_spectrum(|x| x)
    }
}

/// Hermitian eigendecomposition by cyclic complex Jacobi rotations.
pub fn eig_hermitian(m: &ComplexMatrix) -> Result<HermitianEigen> {
    let err = m.hermiticity_error();
    if err > PSD_TOL {
        return Err(Error::NotHermitian(err));
    }
    let (values, vectors) = jacobi(m.dim, &m.data, true);
    Ok(HermitianEigen {
        values,
        vectors: ComplexMatrix { dim: m.dim, data: vectors.expect("vectors requested") },
    })
}

/// Ascending eigenvalues only; skips accumulation of eigenvectors.
pub fn eigvals_hermitian(m: &ComplexMatrix) -> Result<Vec<f64>> {
    let err = m.hermiticity_error();
    if err > PSD_TOL {
        return Err(Error::NotHermitian(err));
    }
    Ok(jacobi(m.dim, &m.data, false).0)
}

fn jacobi(n: usize, input: &[Complex64], want_vectors: bool) -> (Vec<f64>, Option<Vec<Complex64>>) {
    let mut a = input.to_vec();
    // Work on the Hermitian part.
    for i in 0..n {
        a[i * n + i] = Complex64::new(a[i * n + i].re, 0.0);
        for j in (i + 1)..n {
            let avg = (a[i * n + j] + a[j * n + i].conj()) * 0.5;
            a[i * n + j] = avg;
            a[j * n + i] = avg.conj();
        }
    }
    let mut v = if want_vectors {
        let mut v = vec![ZERO; n * n];
        for i in 0..n {
            v[i * n + i] = ONE;
        }
        Some(v)
    } else {
        None
    };

    let scale: f64 = a.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    if scale == 0.0 {
        return (vec![0.0; n], v);
    }

    for _sweep in 0..64 {
        let mut off = 0.0;
        for i in 0..n {
            for j in (i + 1)..n {
                off += a[i * n + j].norm_sqr();
            }
        }
        if off.sqrt() <= 1e-17 * scale {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[p * n + q];
                let mag = apq.norm();
                if mag <= 1e-300 {
                    continue;
                }
                let app = a[p * n + p].re;
                let aqq = a[q * n + q].re;
                // Entries negligible against both diagonal entries are zeroed.
                if mag < 1e-18 * (app.abs() + aqq.abs()) {
                    a[p * n + q] = ZERO;
                    a[q * n + p] = ZERO;
                    continue;
                }
                let phase = apq / mag;
                let theta = (aqq - app) / (2.0 * mag);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                // J has columns p: (c, -s e^{-iφ}) and q: (s, c e^{-iφ}).
                let jpp = Complex64::new(c, 0.0);
                let jqp = -phase.conj() * s;
                let jpq = Complex64::new(s, 0.0);
                let jqq = phase.conj() * c;

                for k in 0..n {
                    let akp = a[k * n + p];
                    let akq = a[k * n + q];
                    a[k * n + p] = akp * jpp + akq * jqp;
                    a[k * n + q] = akp * jpq + akq * jqq;
                }
                for k in 0..n {
                    let apk = a[p * n + k];
                    let aqk = a[q * n + k];
                    a[p * n + k] = jpp.conj() * apk + jqp.conj() * aqk;
                    a[q * n + k] = jpq.conj() * apk + jqq.conj() * aqk;
                }
                a[p * n + q] = ZERO;
                a[q * n + p] = ZERO;
                a[p * n + p] = Complex64::new(a[p * n + p].re, 0.0);
                a[q * n + q] = Complex64::new(a[q * n + q].re, 0.0);

                if let Some(v) = v.as_mut() {
                    for k in 0..n {
                        let vkp = v[k * n + p];
                        let vkq = v[k * n + q];
                        v[k * n + p] = vkp * jpp + vkq * jqp;
                        v[k * n + q] = vkp * jpq + vkq * jqq;
                    }
                }
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    let diag: Vec<f64> = (0..n).map(|i| a[i * n + i].re).collect();
    order.sort_by(|&x, &y| diag[x].total_cmp(&diag[y]));
    let values = order.iter().map(|&k| diag[k]).collect();
    let vectors = v.map(|v| {
        let mut sorted = vec![ZERO; n * n];
        for (dst, &src) in order.iter().enumerate() {
            for i in 0..n {
                sorted[i * n + dst] = v[i * n + src];
            }
        }
        sorted
    });
    (values, vectors)
}

/// Hermitian, unit-trace, positive semidefinite matrix.
///
/// The spectrum is computed once at construction; eigenvalues in
/// `[-PSD_TOL, 0)` are clamped to zero.
#[derive(Clone, Debug)]
pub struct DensityMatrix {
    matrix: ComplexMatrix,
    eigen: HermitianEigen,
}

impl DensityMatrix {
    pub fn new(matrix: ComplexMatrix) -> Result<Self> {
        let herm = matrix.hermiticity_error();
        if herm > STATE_TOL {
            return Err(Error::NotHermitian(herm));
        }
        let tr = matrix.trace();
        if (tr.re - 1.0).abs() > STATE_TOL || tr.im.abs() > STATE_TOL {
            return Err(Error::InvalidTrace(tr.re));
        }
        let mut matrix = matrix;
        matrix.hermitize();
        let mut eigen = eig_hermitian(&matrix)?;
        let min = eigen.values.first().copied().unwrap_or(0.0);
        if min < -PSD_TOL {
            return Err(Error::NotPositive(min));
        }
        for v in eigen.values.iter_mut() {
            if *v < 0.0 {
                *v = 0.0;
            }
        }
        Ok(Self { matrix, eigen })
    }

    /// Builds a state after symmetrizing and renormalizing the trace of a
    /// numerically evolved matrix. Positivity is still enforced.
    pub(crate) fn from_evolved(mut matrix: ComplexMatrix) -> Result<Self> {
        matrix.hermitize();
        let tr = matrix.trace().re;
        if (tr - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidTrace(tr));
        }
        Self::new(matrix.scale_real(1.0 / tr))
    }

    pub fn maximally_mixed(dim: usize) -> Result<Self> {
        Self::new(ComplexMatrix::identity(dim)?.scale_real(1.0 / dim as f64))
    }

    /// Projector onto a normalized pure state.
    pub fn pure(psi: &[Complex64]) -> Result<Self> {
        let norm: f64 = psi.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        let psi: Vec<Complex64> = psi.iter().map(|z| z / norm).collect();
        Self::new(ComplexMatrix::outer(&psi, &psi)?)
    }

    /// Computational basis projector `|index><index|`.
    pub fn basis(dim: usize, index: usize) -> Result<Self> {
        if index >= dim {
            return Err(Error::IndexOutOfRange { what: "basis state", index });
        }
        let mut d = vec![0.0; dim];
        d[index] = 1.0;
        Self::new(ComplexMatrix::diagonal(&d)?)
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.dim
    }

    pub fn n_qubits(&self) -> usize {
        self.matrix.n_qubits()
    }

    /// Clamped eigenvalues, ascending.
    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigen.values
    }

    pub fn eigen(&self) -> &HermitianEigen {
        &self.eigen
    }

    /// Matrix with the off-diagonal entries removed.
    pub fn diagonal_part(&self) -> DensityMatrix {
        let diag = self.matrix.diag_real();
        let mut sorted = diag.clone();
        sorted.sort_by(f64::total_cmp);
        let n = diag.len();
        let mut vectors = ComplexMatrix::zeros(n).expect("valid dim");
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| diag[a].total_cmp(&diag[b]));
        for (col, &src) in order.iter().enumerate() {
            vectors.set(src, col, ONE);
        }
        DensityMatrix {
            matrix: ComplexMatrix::diagonal(&diag).expect("valid dim"),
            eigen: HermitianEigen { values: sorted.into_iter().map(|x| x.max(0.0)).collect(), vectors },
        }
    }

    /// Mixture `p * self + (1 - p) * other`.
    pub fn mix(&self, other: &DensityMatrix, p: f64) -> Result<DensityMatrix> {
        let m = self.matrix.scale_real(p).try_add(&other.matrix.scale_real(1.0 - p))?;
        DensityMatrix::from_evolved(m)
    }

    /// `U rho U^dagger` for a unitary `U`.
    pub fn unitary_conjugate(&self, u: &ComplexMatrix) -> Result<DensityMatrix> {
        DensityMatrix::from_evolved(u.conjugate(&self.matrix)?)
    }

    pub fn sqrt(&self) -> ComplexMatrix {
        self.eigen.map_spectrum(f64::sqrt)
    }
}

impl PartialEq for DensityMatrix {
    fn eq(&self, other: &Self) -> bool {
        self.matrix == other.matrix
    }
}

fn xlog2x(x: f64) -> f64 {
    if x <= ENTROPY_CUTOFF {
        0.0
    } else {
        x * x.log2()
    }
}

/// Shannon entropy (bits) of a probability vector.
pub fn shannon_entropy(p: &[f64]) -> f64 {
    -p.iter().map(|&x| xlog2x(x)).sum::<f64>()
}

/// Von Neumann entropy in bits.
pub fn von_neumann_entropy(rho: &DensityMatrix) -> f64 {
    shannon_entropy(rho.eigenvalues()).max(0.0)
}

/// Half the trace norm of `rho - tau`.
pub fn trace_distance(rho: &DensityMatrix, tau: &DensityMatrix) -> Result<f64> {
    trace_distance_raw(rho.matrix(), tau.matrix())
}

pub(crate) fn trace_distance_raw(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<f64> {
    let diff = a.try_sub(b)?;
    let ev = eigvals_hermitian(&diff)?;
    Ok((0.5 * ev.iter().map(|x| x.abs()).sum::<f64>()).min(1.0))
}

/// Quantum relative entropy `S(rho || tau)` in bits.
///
/// Returns `f64::INFINITY` when the support of `rho` is not contained in
/// the support of `tau`.
pub fn relative_entropy(rho: &DensityMatrix, tau: &DensityMatrix) -> Result<f64> {
    if rho.dim() != tau.dim() {
        return Err(Error::DimensionMismatch(rho.dim(), tau.dim()));
    }
    let neg_entropy: f64 = rho.eigenvalues().iter().map(|&x| xlog2x(x)).sum();
    Ok(relative_entropy_with(neg_entropy, rho.matrix(), tau.eigen()))
}

/// Support tolerance for the relative entropy: weight of `rho` on the
/// kernel of `tau` above this value yields the infinity sentinel.
pub const SUPPORT_TOL: f64 = 1e-12;

pub(crate) fn relative_entropy_with(neg_entropy: f64, rho: &ComplexMatrix, tau: &HermitianEigen) -> f64 {
    let n = rho.dim();
    let mut cross = 0.0;
    for (k, &lambda) in tau.values.iter().enumerate() {
        let v = tau.vectors.column(k);
        let mut w = ZERO;
        for i in 0..n {
            let mut rv = ZERO;
            for j in 0..n {
                rv += rho.get(i, j) * v[j];
            }
            w += v[i].conj() * rv;
        }
        let weight = w.re;
        if lambda <= ENTROPY_CUTOFF {
            if weight > SUPPORT_TOL {
                return f64::INFINITY;
            }
            continue;
        }
        cross += weight * lambda.log2();
    }
    (neg_entropy - cross).max(0.0)
}

/// Relative entropy against a diagonal (incoherent) state with entries `d`.
pub(crate) fn relative_entropy_to_diagonal(neg_entropy: f64, rho: &ComplexMatrix, d: &[f64]) -> f64 {
    let mut cross = 0.0;
    for (i, &di) in d.iter().enumerate() {
        let weight = rho.get(i, i).re;
        if di <= ENTROPY_CUTOFF {
            if weight > SUPPORT_TOL {
                return f64::INFINITY;
            }
            continue;
        }
        cross += weight * di.log2();
    }
    (neg_entropy - cross).max(0.0)
}

/// Root fidelity `Tr sqrt(sqrt(rho) tau sqrt(rho))`.
pub fn root_fidelity(rho: &DensityMatrix, tau: &DensityMatrix) -> Result<f64> {
    root_fidelity_with(&rho.sqrt(), tau.matrix())
}

fn root_fidelity_with(sqrt_rho: &ComplexMatrix, tau: &ComplexMatrix) -> Result<f64> {
    let inner = sqrt_rho.try_mul(tau)?.try_mul(sqrt_rho)?;
    let ev = eigvals_hermitian(&inner)?;
    Ok(ev.iter().map(|&x| x.max(0.0).sqrt()).sum::<f64>().min(1.0))
}

/// Uhlmann fidelity `F = (Tr sqrt(sqrt(rho) tau sqrt(rho)))^2`.
pub fn fidelity(rho: &DensityMatrix, tau: &DensityMatrix) -> Result<f64> {
    Ok(root_fidelity(rho, tau)?.powi(2))
}

/// Bures distance `sqrt(2 - 2 sqrt(F))`.
///
/// Evaluated as `min_U ||sqrt(rho) U - sqrt(tau)||_2` with `U` the polar
/// factor of `sqrt(rho) sqrt(tau)`, a sum of squares that keeps full
/// precision for nearby states where `2 - 2 sqrt(F)` cancels.
pub fn bures_distance(rho: &DensityMatrix, tau: &DensityMatrix) -> Result<f64> {
    if rho.dim() != tau.dim() {
        return Err(Error::DimensionMismatch(rho.dim(), tau.dim()));
    }
    bures_from_roots(&rho.sqrt(), &tau.sqrt())
}

pub(crate) fn bures_from_roots(sqrt_rho: &ComplexMatrix, sqrt_tau: &ComplexMatrix) -> Result<f64> {
    let n = sqrt_rho.dim();
    let m = sqrt_rho.try_mul(sqrt_tau)?;
    let (cols, v) = one_sided_jacobi(&m);
    let mut order: Vec<usize> = (0..n).collect();
    let norms: Vec<f64> = cols.iter().map(|c| c.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt()).collect();
    order.sort_by(|&a, &b| norms[b].total_cmp(&norms[a]));
    let floor = 1e-14 * norms[order[0]].max(f64::MIN_POSITIVE);
    // Left singular vectors, largest first, completed to an orthonormal
    // basis where m is (numerically) singular.
    let mut ws: Vec<Vec<Complex64>> = Vec::with_capacity(n);
    let mut next_unit = 0;
    for &k in &order {
        let mut w = cols[k].clone();
        let norm = orthogonalize(&mut w, &ws);
        if norms[k] > floor && norm > 0.5 * norms[k] {
            w.iter_mut().for_each(|x| *x /= norm);
        } else {
            loop {
                let mut e = vec![ZERO; n];
                e[next_unit] = ONE;
                next_unit += 1;
                let norm = orthogonalize(&mut e, &ws);
                if norm > 0.5 {
                    e.iter_mut().for_each(|x| *x /= norm);
                    w = e;
                    break;
                }
            }
        }
        ws.push(w);
    }
    // U = sum_k w_k v_k^dagger, then ||sqrt_rho U - sqrt_tau||^2.
    let mut u = vec![ZERO; n * n];
    for (w, &k) in ws.iter().zip(&order) {
        for i in 0..n {
            for j in 0..n {
                u[i * n + j] += w[i] * v[k][j].conj();
            }
        }
    }
    let u = ComplexMatrix { dim: n, data: u };
    let diff = sqrt_rho.try_mul(&u)?.try_sub(sqrt_tau)?;
    let total: f64 = diff.as_slice().iter().map(|x| x.norm_sqr()).sum();
    Ok(total.sqrt().min(2f64.sqrt()))
}

/// Hestenes one-sided Jacobi: returns the columns of `m V` (mutually
/// orthogonal, norms are the singular values) and the columns of `V`.
/// Works on `m` directly, so small singular directions keep their accuracy
/// instead of drowning in the rounding of `m^dagger m`.
fn one_sided_jacobi(m: &ComplexMatrix) -> (Vec<Vec<Complex64>>, Vec<Vec<Complex64>>) {
    let n = m.dim();
    let mut a: Vec<Vec<Complex64>> = (0..n).map(|j| m.column(j)).collect();
    let mut v: Vec<Vec<Complex64>> = (0..n)
        .map(|j| (0..n).map(|i| if i == j { ONE } else { ZERO }).collect())
        .collect();
    for _sweep in 0..60 {
        let mut rotated = false;
        for p in 0..n {
            for q in p + 1..n {
                let alpha: f64 = a[p].iter().map(|x| x.norm_sqr()).sum();
                let beta: f64 = a[q].iter().map(|x| x.norm_sqr()).sum();
                let gamma: Complex64 = a[p].iter().zip(&a[q]).map(|(x, y)| x.conj() * y).sum();
                let g = gamma.norm();
                if g <= 1e-16 * (alpha * beta).sqrt() || g == 0.0 {
                    continue;
                }
                rotated = true;
                // Make the overlap real, then rotate in the real plane.
                let phase = (gamma / g).conj();
                let zeta = (beta - alpha) / (2.0 * g);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                for cols in [&mut a, &mut v] {
                    for i in 0..n {
                        let xp = cols[p][i];
                        let xq = cols[q][i] * phase;
                        cols[p][i] = xp * c - xq * s;
                        cols[q][i] = xp * s + xq * c;
                    }
                }
            }
        }
        if !rotated {
            break;
        }
    }
    (a, v)
}

/// Gram-Schmidt step against orthonormal `basis` (applied twice for
/// stability); returns the remaining norm.
fn orthogonalize(w: &mut [Complex64], basis: &[Vec<Complex64>]) -> f64 {
    for _ in 0..2 {
        for b in basis {
            let proj: Complex64 = b.iter().zip(w.iter()).map(|(bi, wi)| bi.conj() * wi).sum();
            for (wi, bi) in w.iter_mut().zip(b) {
                *wi -= proj * bi;
            }
        }
    }
    w.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt()
}

/// Random state `G G^dagger / Tr(G G^dagger)` with `G` a `dim x r` matrix of
/// uniform complex entries and `r` uniform in `1..=dim`, so every rank
/// occurs.
pub fn random_density(rng: &mut impl Rng, dim: usize) -> Result<DensityMatrix> {
    let rank = rng.gen_range(1..=dim);
    let mut g = ComplexMatrix::zeros(dim)?;
    for i in 0..dim {
        for j in 0..rank {
            g.set(i, j, Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
        }
    }
    let m = g.try_mul(&g.adjoint())?;
    let tr = m.trace().re;
    DensityMatrix::from_evolved(m.scale_real(1.0 / tr))
}

/// Uniform point of the Bloch ball.
pub fn random_bloch(rng: &mut impl Rng) -> BlochVector {
    loop {
        let v: [f64; 3] = [rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)];
        if let Ok(b) = BlochVector::new(v[0], v[1], v[2]) {
            return b;
        }
    }
}

/// Partial trace keeping the qubits listed in `keep` (0 = leftmost).
pub fn partial_trace(rho: &DensityMatrix, keep: &[usize]) -> Result<DensityMatrix> {
    let n = rho.n_qubits();
    if let Some(&q) = keep.iter().find(|&&q| q >= n) {
        return Err(Error::IndexOutOfRange { what: "qubit", index: q });
    }
    if keep.is_empty() {
        return Err(Error::InvalidDimension(1));
    }
    let traced: Vec<usize> = (0..n).filter(|q| !keep.contains(q)).collect();
    let dk = 1usize << keep.len();
    let dt = 1usize << traced.len();
    let bit = |q: usize| n - 1 - q;
    let compose = |kept_bits: usize, traced_bits: usize| -> usize {
        let mut idx = 0usize;
        for (pos, &q) in keep.iter().enumerate() {
            if kept_bits >> (keep.len() - 1 - pos) & 1 == 1 {
                idx |= 1 << bit(q);
            }
        }
        for (pos, &q) in traced.iter().enumerate() {
            if traced_bits >> (traced.len() - 1 - pos) & 1 == 1 {
                idx |= 1 << bit(q);
            }
        }
        idx
    };
    let mut out = ComplexMatrix::zeros(dk)?;
    for a in 0..dk {
        for b in 0..dk {
            let mut s = ZERO;
            for t in 0..dt {
                s += rho.matrix().get(compose(a, t), compose(b, t));
            }
            out.set(a, b, s);
        }
    }
    DensityMatrix::from_evolved(out)
}

/// Partial transpose of a two-qubit matrix on the second qubit.
pub fn partial_transpose_second(m: &ComplexMatrix) -> Result<ComplexMatrix> {
    if m.dim() != 4 {
        return Err(Error::DimensionMismatch(4, m.dim()));
    }
    let mut out = ComplexMatrix::zeros(4)?;
    for a in 0..2 {
        for b in 0..2 {
            for c in 0..2 {
                for d in 0..2 {
                    out.set(2 * a + b, 2 * c + d, m.get(2 * a + d, 2 * c + b));
                }
            }
        }
    }
    Ok(out)
}

/// Bloch vector of a single qubit.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BlochVector {
    pub n1: f64,
    pub n2: f64,
    pub n3: f64,
}

impl BlochVector {
    pub fn new(n1: f64, n2: f64, n3: f64) -> Result<Self> {
        let b = Self { n1, n2, n3 };
        let norm = b.norm();
        if !norm.is_finite() || norm * norm > 1.0 + STATE_TOL {
            return Err(Error::InvalidBloch(norm));
        }
        Ok(b)
    }

    pub fn norm(&self) -> f64 {
        (self.n1 * self.n1 + self.n2 * self.n2 + self.n3 * self.n3).sqrt()
    }

    pub fn as_array(&self) -> [f64; 3] {
        [self.n1, self.n2, self.n3]
    }
}

/// `rho = (I + n·sigma) / 2`.
pub fn bloch_to_density(n: &BlochVector) -> Result<DensityMatrix> {
    let n = BlochVector::new(n.n1, n.n2, n.n3)?;
    let m = ComplexMatrix::from_vec(
        2,
        vec![
            Complex64::new(0.5 * (1.0 + n.n3), 0.0),
            Complex64::new(0.5 * n.n1, -0.5 * n.n2),
            Complex64::new(0.5 * n.n1, 0.5 * n.n2),
            Complex64::new(0.5 * (1.0 - n.n3), 0.0),
        ],
    )?;
    DensityMatrix::new(m)
}

/// Inverse of [`bloch_to_density`]: `n_j = Tr(rho sigma_j)`.
pub fn density_to_bloch(rho: &DensityMatrix) -> Result<BlochVector> {
    if rho.dim() != 2 {
        return Err(Error::DimensionMismatch(2, rho.dim()));
    }
    let m = rho.matrix();
    let off = m.get(1, 0);
    Ok(BlochVector { n1: 2.0 * off.re, n2: 2.0 * off.im, n3: (m.get(0, 0) - m.get(1, 1)).re })
}
