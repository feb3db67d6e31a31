//! States with maximally mixed marginals,
//! `rho = 2^-N (I^{⊗N} + c1 X^{⊗N} + c2 Y^{⊗N} + c3 Z^{⊗N})`.
//!
//! For two qubits these are the Bell-diagonal states. For even `N` the
//! spectrum is known in closed form and local flip noise acts on the
//! triple `(c1, c2, c3)` by simple rescaling, which is what makes the
//! freezing analysis tractable.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::channels::{beta_vector, complement};
use crate::densmat::{
    eigvals_hermitian, partial_transpose_second, pauli, pauli_power, tensor, tensor_all, ComplexMatrix,
    DensityMatrix, PSD_TOL,
};
use crate::error::{Error, Result};

/// Slack on the closed-form eigenvalues when validating an even-`N` triple.
pub const TRIPLE_TOL: f64 = 1e-12;

pub const MAX_QUBITS: usize = 6;

/// `(c1, c2, c3)` together with the qubit count.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct M3Triple {
    pub c1: f64,
    pub c2: f64,
    pub c3: f64,
    pub n_qubits: usize,
}

/// `(-1)^{N/2}` for even `N`, `(-1)^{floor(N/2)}` otherwise.
pub fn parity_sign(n_qubits: usize) -> f64 {
    if (n_qubits / 2).is_multiple_of(2) {
        1.0
    } else {
        -1.0
    }
}

fn popcount_parity(x: usize) -> usize {
    (x.count_ones() % 2) as usize
}

/// Closed-form eigenvalue for parity `p` and branch `plus` (even `N`).
pub fn m3_eigenvalue(c: [f64; 3], n_qubits: usize, parity: usize, plus: bool) -> f64 {
    let s = if plus { 1.0 } else { -1.0 };
    let pp = if parity == 0 { 1.0 } else { -1.0 };
    (1.0 + s * c[0] + s * parity_sign(n_qubits) * pp * c[1] + pp * c[2]) / (1u64 << n_qubits) as f64
}

impl M3Triple {
    /// Validates the coefficient ranges and positivity of the state.
    pub fn new(c1: f64, c2: f64, c3: f64, n_qubits: usize) -> Result<Self> {
        if !(1..=MAX_QUBITS).contains(&n_qubits) {
            return Err(Error::QubitCount(n_qubits, "M3 states need 1 to 6 qubits"));
        }
        for (name, c) in [("c1", c1), ("c2", c2), ("c3", c3)] {
            if !(c.abs() <= 1.0 + TRIPLE_TOL) {
                return Err(Error::InvalidParameter { name, value: c });
            }
        }
        let t = Self { c1, c2, c3, n_qubits };
        let min = t.min_eigenvalue()?;
        let slack = if n_qubits.is_multiple_of(2) { TRIPLE_TOL } else { PSD_TOL };
        if min < -slack {
            return Err(Error::NotPositive(min));
        }
        Ok(t)
    }

    pub fn coeffs(&self) -> [f64; 3] {
        [self.c1, self.c2, self.c3]
    }

    pub fn with_coeffs(&self, c: [f64; 3]) -> Result<Self> {
        Self::new(c[0], c[1], c[2], self.n_qubits)
    }

    /// Smallest eigenvalue: closed form for even `N`, numerical for odd `N`.
    pub fn min_eigenvalue(&self) -> Result<f64> {
        if self.n_qubits.is_multiple_of(2) {
            let c = self.coeffs();
            Ok([(0, true), (0, false), (1, true), (1, false)]
                .iter()
                .map(|&(p, s)| m3_eigenvalue(c, self.n_qubits, p, s))
                .fold(f64::INFINITY, f64::min))
        } else {
            let ev = eigvals_hermitian(&self.matrix()?)?;
            Ok(ev[0])
        }
    }

    fn matrix(&self) -> Result<ComplexMatrix> {
        let n = self.n_qubits;
        let mut m = ComplexMatrix::identity(1 << n)?;
        for (k, c) in [(1, self.c1), (2, self.c2), (3, self.c3)] {
            if c != 0.0 {
                m = &m + &pauli_power(k, n)?.scale_real(c);
            }
        }
        Ok(m.scale_real(1.0 / (1u64 << n) as f64))
    }

    pub fn is_incoherent(&self) -> bool {
        self.c1 == 0.0 && self.c2 == 0.0
    }
}

/// Density matrix of an M3 triple.
pub fn m3_state(triple: &M3Triple) -> Result<DensityMatrix> {
    DensityMatrix::new(triple.matrix()?)
}

/// Reads `c_i = Tr(rho sigma_i^{⊗N})` off any `N`-qubit state.
pub fn triple_of(rho: &DensityMatrix) -> Result<[f64; 3]> {
    let n = rho.n_qubits();
    let mut c = [0.0; 3];
    for (k, slot) in c.iter_mut().enumerate() {
        *slot = rho.matrix().try_mul(&pauli_power(k + 1, n)?)?.trace().re;
    }
    Ok(c)
}

/// One eigenpair of an even-`N` M3 state.
#[derive(Clone, Debug)]
pub struct M3Eigenpair {
    pub value: f64,
    /// `(|x> ± |x̄>)/sqrt(2)` with `x = pair_index < x̄`.
    pub vector: Vec<Complex64>,
    pub pair_index: usize,
    pub plus: bool,
    /// Eigenvalue of `Z^{⊗N}` is `(-1)^parity`.
    pub parity: usize,
}

/// Closed-form spectrum of an even-`N` M3 state.
pub fn m3_eigensystem(triple: &M3Triple) -> Result<Vec<M3Eigenpair>> {
    let n = triple.n_qubits;
    if !n.is_multiple_of(2) {
        return Err(Error::QubitCount(n, "closed-form spectrum needs even N"));
    }
    let dim = 1usize << n;
    let c = triple.coeffs();
    let mut out = Vec::with_capacity(dim);
    for x in (0..dim).filter(|&x| x < complement(x, n)) {
        let parity = popcount_parity(x);
        for plus in [true, false] {
            out.push(M3Eigenpair {
                value: m3_eigenvalue(c, n, parity, plus),
                vector: beta_vector(x, plus, n),
                pair_index: x,
                plus,
                parity,
            });
        }
    }
    Ok(out)
}

/// Triple after identical local `axis`-flip noise of strength `q`:
/// the two coefficients other than `c_axis` pick up `(1-q)^N`.
pub fn evolve_triple(triple: &M3Triple, axis: usize, q: f64) -> Result<M3Triple> {
    if !(1..=3).contains(&axis) {
        return Err(Error::IndexOutOfRange { what: "flip axis", index: axis });
    }
    if !(0.0..=1.0).contains(&q) {
        return Err(Error::InvalidParameter { name: "q", value: q });
    }
    let damp = (1.0 - q).powi(triple.n_qubits as i32);
    let mut c = triple.coeffs();
    for (i, ci) in c.iter_mut().enumerate() {
        if i + 1 != axis {
            *ci *= damp;
        }
    }
    Ok(M3Triple { c1: c[0], c2: c[1], c3: c[2], n_qubits: triple.n_qubits })
}

/// `(c1, (-1)^{N/2} c1 c3, c3)` for even `N`.
pub fn freezing_triple(c1: f64, c3: f64, n_qubits: usize) -> Result<M3Triple> {
    if !n_qubits.is_multiple_of(2) {
        return Err(Error::QubitCount(n_qubits, "freezing condition needs even N"));
    }
    M3Triple::new(c1, parity_sign(n_qubits) * c1 * c3, c3, n_qubits)
}

/// Same construction with sign `(-1)^{floor(N/2)}`, accepted for any `N`.
pub fn freezing_syntax_triple(c1: f64, c3: f64, n_qubits: usize) -> Result<M3Triple> {
    M3Triple::new(c1, parity_sign(n_qubits) * c1 * c3, c3, n_qubits)
}

/// `|c2 - (-1)^{N/2} c1 c3| <= tol`.
pub fn is_frozen_family(triple: &M3Triple, tol: f64) -> Result<bool> {
    if !triple.n_qubits.is_multiple_of(2) {
        return Err(Error::QubitCount(triple.n_qubits, "freezing condition needs even N"));
    }
    Ok((triple.c2 - parity_sign(triple.n_qubits) * triple.c1 * triple.c3).abs() <= tol)
}

/// Largest `q` with `|c3(q)| >= |c1(q)|` under local bit flip noise.
pub fn threshold_q_star(triple: &M3Triple) -> f64 {
    let (a1, a3) = (triple.c1.abs(), triple.c3.abs());
    if a1 == 0.0 {
        1.0
    } else if a3 <= a1 {
        0.0
    } else {
        1.0 - (a1 / a3).powf(1.0 / triple.n_qubits as f64)
    }
}

/// Two-qubit state in local-unitary standard form.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct StandardFormState {
    /// Local Bloch components of the first qubit.
    pub x: [f64; 3],
    /// Local Bloch components of the second qubit.
    pub y: [f64; 3],
    /// Diagonal of the correlation matrix.
    pub t: [f64; 3],
}

impl StandardFormState {
    pub fn from_triple(c: [f64; 3]) -> Self {
        Self { x: [0.0; 3], y: [0.0; 3], t: c }
    }
}

/// `rho = 1/4 (I⊗I + sum x_j s_j⊗I + sum y_j I⊗s_j + sum T_jj s_j⊗s_j)`.
pub fn standard_form_state(params: &StandardFormState) -> Result<DensityMatrix> {
    let id = pauli(0)?;
    let mut m = ComplexMatrix::identity(4)?;
    for j in 0..3 {
        let s = pauli(j + 1)?;
        m = &m + &tensor(&s, &id)?.scale_real(params.x[j]);
        m = &m + &tensor(&id, &s)?.scale_real(params.y[j]);
        m = &m + &tensor(&s, &s)?.scale_real(params.t[j]);
    }
    DensityMatrix::new(m.scale_real(0.25))
}

/// Sufficient condition for a frozen l1-norm under local bit flips:
/// `x2 = y2 = 0` and `T22 = u T11` with `|u| <= 1`.
pub fn l1_freezing_predicate(params: &StandardFormState, tol: f64) -> bool {
    params.x[1].abs() <= tol && params.y[1].abs() <= tol && params.t[1].abs() <= params.t[0].abs() + tol
}

/// Peres-Horodecki test for two qubits: the partial transpose over the
/// second qubit has no eigenvalue below `-1e-10`.
pub fn is_ppt_separable(rho: &DensityMatrix) -> Result<bool> {
    if rho.dim() != 4 {
        return Err(Error::DimensionMismatch(4, rho.dim()));
    }
    let pt = partial_transpose_second(rho.matrix())?;
    Ok(eigvals_hermitian(&pt)?[0] >= -PSD_TOL)
}

/// `V^{⊗N}` with `V = (I + i sigma_2)/sqrt(2)`; swaps `c1` and `c3` for even `N`.
pub fn v_swap_unitary(n_qubits: usize) -> Result<ComplexMatrix> {
    let i_s2 = pauli(2)?.scale(Complex64::new(0.0, 1.0));
    let v = (&pauli(0)? + &i_s2).scale_real(std::f64::consts::FRAC_1_SQRT_2);
    tensor_all(std::iter::repeat_n(&v, n_qubits))
}

/// `sigma_1` on qubits `j-1` and `j` (1-based `j` in `1..N`), identity elsewhere.
pub fn pair_flip_unitary(j: usize, n_qubits: usize) -> Result<ComplexMatrix> {
    if j == 0 || j >= n_qubits {
        return Err(Error::IndexOutOfRange { what: "pair flip", index: j });
    }
    let id = pauli(0)?;
    let x = pauli(1)?;
    let factors: Vec<&ComplexMatrix> =
        (0..n_qubits).map(|k| if k + 1 == j || k == j { &x } else { &id }).collect();
    tensor_all(factors)
}

/// `Z^{⊗N}` correlation components of a diagonal state: entry `mask` is
/// `Tr(delta ⊗_k Z^{mask_k})`, where bit `N-1-k` of `mask` selects qubit `k`.
pub fn diagonal_correlations(diag: &[f64]) -> Vec<f64> {
    (0..diag.len())
        .map(|mask| {
            diag.iter()
                .enumerate()
                .map(|(x, &d)| if (x & mask).count_ones() % 2 == 0 { d } else { -d })
                .sum()
        })
        .collect()
}

/// Diagonal of the incoherent M3 state `2^-N (I + s Z^{⊗N})`.
pub fn incoherent_m3_diag(s: f64, n_qubits: usize) -> Vec<f64> {
    let dim = 1usize << n_qubits;
    (0..dim)
        .map(|x| (1.0 + if popcount_parity(x) == 0 { s } else { -s }) / dim as f64)
        .collect()
}
