//! Kraus channels: the single-qubit incoherent noise catalog, identical
//! local noise on every qubit of a register, and the global rephasing map.

use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::densmat::{pauli, tensor_all, ComplexMatrix, DensityMatrix};
use crate::error::{Error, Result};

/// Completeness tolerance `||sum K^dagger K - I||_max`.
pub const COMPLETENESS_TOL: f64 = 1e-10;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Noise strength `q` in `[0, 1]`.
#[derive(Clone, Copy, Debug, PartialEq, PartialOrd, Serialize, Deserialize)]
pub struct NoiseStrength(f64);

impl NoiseStrength {
    pub fn new(q: f64) -> Result<Self> {
        if (0.0..=1.0).contains(&q) {
            Ok(Self(q))
        } else {
            Err(Error::InvalidParameter { name: "q", value: q })
        }
    }

    /// `q(t) = 1 - exp(-gamma t)`.
    pub fn from_rate(gamma: f64, t: f64) -> Result<Self> {
        if !(gamma >= 0.0) {
            return Err(Error::InvalidParameter { name: "gamma", value: gamma });
        }
        if !(t >= 0.0) {
            return Err(Error::InvalidParameter { name: "t", value: t });
        }
        Self::new(-(-gamma * t).exp_m1())
    }

    pub fn value(self) -> f64 {
        self.0
    }

    /// Time at which the strength is reached for decay rate `gamma`;
    /// infinite for `q = 1`.
    pub fn time(self, gamma: f64) -> f64 {
        -(-self.0).ln_1p() / gamma
    }
}

/// Channel kinds accepted in run configurations.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ChannelKind {
    BitFlip,
    BitPhaseFlip,
    PhaseFlip,
    Depolarizing,
    AmplitudeDamping,
    PhaseDamping,
    Rephasing,
    Identity,
}

impl ChannelKind {
    pub const ALL: [ChannelKind; 8] = [
        ChannelKind::BitFlip,
        ChannelKind::BitPhaseFlip,
        ChannelKind::PhaseFlip,
        ChannelKind::Depolarizing,
        ChannelKind::AmplitudeDamping,
        ChannelKind::PhaseDamping,
        ChannelKind::Rephasing,
        ChannelKind::Identity,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ChannelKind::BitFlip => "bit_flip",
            ChannelKind::BitPhaseFlip => "bit_phase_flip",
            ChannelKind::PhaseFlip => "phase_flip",
            ChannelKind::Depolarizing => "depolarizing",
            ChannelKind::AmplitudeDamping => "amplitude_damping",
            ChannelKind::PhaseDamping => "phase_damping",
            ChannelKind::Rephasing => "rephasing",
            ChannelKind::Identity => "identity",
        }
    }

    /// Flip axis for the three flip channels.
    pub fn flip_axis(self) -> Option<usize> {
        match self {
            ChannelKind::BitFlip => Some(1),
            ChannelKind::BitPhaseFlip => Some(2),
            ChannelKind::PhaseFlip => Some(3),
            _ => None,
        }
    }

    /// Single-qubit channel of this kind; `None` for the global rephasing map.
    pub fn single_qubit(self, q: NoiseStrength) -> Option<KrausChannel> {
        Some(match self {
            ChannelKind::BitFlip => flip_channel(1, q).expect("valid axis"),
            ChannelKind::BitPhaseFlip => flip_channel(2, q).expect("valid axis"),
            ChannelKind::PhaseFlip => flip_channel(3, q).expect("valid axis"),
            ChannelKind::Depolarizing => depolarizing_channel(q),
            ChannelKind::AmplitudeDamping => amplitude_damping_channel(q),
            ChannelKind::PhaseDamping => phase_damping_channel(q),
            ChannelKind::Identity => KrausChannel::identity(2).expect("valid dim"),
            ChannelKind::Rephasing => return None,
        })
    }

    /// Channel on an `n`-qubit register with strength `q` (`r` for rephasing).
    pub fn build(self, strength: f64, n_qubits: usize) -> Result<KrausChannel> {
        match self {
            ChannelKind::Rephasing => rephasing_channel(strength, n_qubits),
            kind => {
                let single = kind.single_qubit(NoiseStrength::new(strength)?).expect("local kind");
                lift_local(&single, n_qubits)
            }
        }
    }
}

impl fmt::Display for ChannelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for ChannelKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        ChannelKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::Unknown { what: "channel kind", value: s.to_string() })
    }
}

/// Channel description as it appears in run configurations.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChannelSpec {
    pub kind: ChannelKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub q: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub r: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gamma: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t: Option<f64>,
}

impl ChannelSpec {
    pub fn new(kind: ChannelKind) -> Self {
        Self { kind, q: None, r: None, gamma: None, t: None }
    }

    /// Strength fixed by the description itself: `r` for rephasing, otherwise `q`
    /// or the strength reached at time `t` for rate `gamma`.
    pub fn strength(&self) -> Result<Option<f64>> {
        if self.kind == ChannelKind::Rephasing {
            return Ok(self.r.or(self.q));
        }
        if let Some(q) = self.q {
            return Ok(Some(NoiseStrength::new(q)?.value()));
        }
        match (self.gamma, self.t) {
            (Some(g), Some(t)) => Ok(Some(NoiseStrength::from_rate(g, t)?.value())),
            _ => Ok(None),
        }
    }
}

/// Provenance of a channel.
#[derive(Clone, Debug, PartialEq)]
pub enum ChannelLabel {
    Identity,
    Flip { axis: usize, q: f64 },
    Depolarizing { q: f64 },
    AmplitudeDamping { q: f64 },
    PhaseDamping { q: f64 },
    Rephasing { r: f64, n_qubits: usize },
    Unitary,
    Local { inner: Box<ChannelLabel>, n_qubits: usize },
    Custom,
}

impl fmt::Display for ChannelLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ChannelLabel::Identity => write!(f, "identity"),
            ChannelLabel::Flip { axis, q } => {
                let name = ["bit_flip", "bit_phase_flip", "phase_flip"][axis - 1];
                write!(f, "{name}(q={q})")
            }
            ChannelLabel::Depolarizing { q } => write!(f, "depolarizing(q={q})"),
            ChannelLabel::AmplitudeDamping { q } => write!(f, "amplitude_damping(q={q})"),
            ChannelLabel::PhaseDamping { q } => write!(f, "phase_damping(q={q})"),
            ChannelLabel::Rephasing { r, n_qubits } => write!(f, "rephasing(r={r}, N={n_qubits})"),
            ChannelLabel::Unitary => write!(f, "unitary"),
            ChannelLabel::Local { inner, n_qubits } => write!(f, "{inner}^⊗{n_qubits}"),
            ChannelLabel::Custom => write!(f, "custom"),
        }
    }
}

#[derive(Clone, Debug)]
enum Repr {
    Dense(Vec<ComplexMatrix>),
    /// Identical single-qubit Kraus sets on every qubit; the `m^N` product
    /// operators are only materialized on request.
    Local { single: Vec<ComplexMatrix>, n_qubits: usize },
}

/// A completely positive trace-preserving map in Kraus form.
#[derive(Clone, Debug)]
pub struct KrausChannel {
    dim: usize,
    repr: Repr,
    label: ChannelLabel,
}

impl KrausChannel {
    /// Validates completeness and shapes of an explicit Kraus set.
    pub fn new(ops: Vec<ComplexMatrix>, label: ChannelLabel) -> Result<Self> {
        let dim = ops.first().ok_or(Error::Config("empty Kraus set".into()))?.dim();
        if let Some(bad) = ops.iter().find(|k| k.dim() != dim) {
            return Err(Error::DimensionMismatch(dim, bad.dim()));
        }
        let ch = Self { dim, repr: Repr::Dense(ops), label };
        let err = ch.completeness_error();
        if err > COMPLETENESS_TOL {
            return Err(Error::Config(format!("Kraus set violates completeness by {err:e}")));
        }
        Ok(ch)
    }

    pub fn identity(dim: usize) -> Result<Self> {
        Self::new(vec![ComplexMatrix::identity(dim)?], ChannelLabel::Identity)
    }

    /// Conjugation by a unitary.
    pub fn unitary(u: ComplexMatrix) -> Result<Self> {
        Self::new(vec![u], ChannelLabel::Unitary)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn label(&self) -> &ChannelLabel {
        &self.label
    }

    pub fn num_kraus(&self) -> usize {
        match &self.repr {
            Repr::Dense(ops) => ops.len(),
            Repr::Local { single, n_qubits } => single.len().pow(*n_qubits as u32),
        }
    }

    /// The full Kraus list. For local channels this materializes every
    /// `N`-fold tensor product, ordered with the first qubit's index slowest.
    pub fn kraus_ops(&self) -> Vec<ComplexMatrix> {
        match &self.repr {
            Repr::Dense(ops) => ops.clone(),
            Repr::Local { single, n_qubits } => {
                let m = single.len();
                (0..m.pow(*n_qubits as u32))
                    .map(|mut idx| {
                        let mut factors = vec![&single[0]; *n_qubits];
                        for slot in factors.iter_mut().rev() {
                            *slot = &single[idx % m];
                            idx /= m;
                        }
                        tensor_all(factors).expect("dimension checked at lift")
                    })
                    .collect()
            }
        }
    }

    /// Single-qubit factors of a lifted local channel.
    pub fn local_factors(&self) -> Option<(&[ComplexMatrix], usize)> {
        match &self.repr {
            Repr::Local { single, n_qubits } => Some((single, *n_qubits)),
            Repr::Dense(_) => None,
        }
    }

    /// `||sum_j K_j^dagger K_j - I||_max`.
    pub fn completeness_error(&self) -> f64 {
        let ops: Vec<ComplexMatrix> = match &self.repr {
            Repr::Dense(ops) => ops.clone(),
            // sum over products factorizes into a product of single-qubit sums
            Repr::Local { single, .. } => single.clone(),
        };
        let dim = ops[0].dim();
        let mut sum = ComplexMatrix::zeros(dim).expect("valid dim");
        for k in &ops {
            sum = &sum + &(&k.adjoint() * k);
        }
        let base = sum.max_abs_diff(&ComplexMatrix::identity(dim).expect("valid dim"));
        match &self.repr {
            Repr::Dense(_) => base,
            // ||A^{⊗N} - I|| grows at most like N * ||A - I|| for A near I.
            Repr::Local { n_qubits, .. } => base * *n_qubits as f64,
        }
    }

    /// `Lambda(rho) = sum_j K_j rho K_j^dagger`, unnormalized.
    pub fn apply_matrix(&self, rho: &ComplexMatrix) -> Result<ComplexMatrix> {
        if rho.dim() != self.dim {
            return Err(Error::DimensionMismatch(self.dim, rho.dim()));
        }
        match &self.repr {
            Repr::Dense(ops) => {
                let mut out = ComplexMatrix::zeros(self.dim)?;
                for k in ops {
                    out = &out + &k.conjugate(rho)?;
                }
                Ok(out)
            }
            Repr::Local { single, n_qubits } => {
                let mut cur = rho.clone();
                for qubit in 0..*n_qubits {
                    cur = apply_on_qubit(single, qubit, *n_qubits, &cur);
                }
                Ok(cur)
            }
        }
    }

    /// Applies the channel to a state.
    pub fn apply(&self, rho: &DensityMatrix) -> Result<DensityMatrix> {
        DensityMatrix::from_evolved(self.apply_matrix(rho.matrix())?)
    }

    /// Applies the channel by summing over the materialized Kraus list,
    /// bypassing the qubit-by-qubit path used for local channels.
    pub fn apply_dense(&self, rho: &DensityMatrix) -> Result<DensityMatrix> {
        if rho.dim() != self.dim {
            return Err(Error::DimensionMismatch(self.dim, rho.dim()));
        }
        let mut out = ComplexMatrix::zeros(self.dim)?;
        for k in self.kraus_ops() {
            out = &out + &k.conjugate(rho.matrix())?;
        }
        DensityMatrix::from_evolved(out)
    }
}

/// `sum_k (I ⊗ k ⊗ I) rho (I ⊗ k^dagger ⊗ I)` with `k` acting on `qubit`.
fn apply_on_qubit(single: &[ComplexMatrix], qubit: usize, n: usize, rho: &ComplexMatrix) -> ComplexMatrix {
    let dim = rho.dim();
    let shift = n - 1 - qubit;
    let mask = 1usize << shift;
    let mut out = ComplexMatrix::zeros(dim).expect("valid dim");
    for k in single {
        let kk = [[k.get(0, 0), k.get(0, 1)], [k.get(1, 0), k.get(1, 1)]];
        for i in 0..dim {
            let bi = (i >> shift) & 1;
            let i0 = i & !mask;
            for j in 0..dim {
                let bj = (j >> shift) & 1;
                let j0 = j & !mask;
                let mut acc = ZERO;
                for a in 0..2 {
                    let ka = kk[bi][a];
                    if ka == ZERO {
                        continue;
                    }
                    for b in 0..2 {
                        let kb = kk[bj][b];
                        if kb == ZERO {
                            continue;
                        }
                        acc += ka * rho.get(i0 | (a << shift), j0 | (b << shift)) * kb.conj();
                    }
                }
                out.set(i, j, out.get(i, j) + acc);
            }
        }
    }
    out
}

fn real(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

/// Bit flip (`axis = 1`), bit-phase flip (`2`) or phase flip (`3`):
/// `sqrt(1 - q/2) I` and `sqrt(q/2) sigma_axis`. The identically zero
/// operators of the three-axis family are omitted.
pub fn flip_channel(axis: usize, q: NoiseStrength) -> Result<KrausChannel> {
    if !(1..=3).contains(&axis) {
        return Err(Error::IndexOutOfRange { what: "flip axis", index: axis });
    }
    let q = q.value();
    let label = ChannelLabel::Flip { axis, q };
    let mut ops = vec![pauli(0)?.scale_real((1.0 - q / 2.0).sqrt())];
    if q > 0.0 {
        ops.push(pauli(axis)?.scale_real((q / 2.0).sqrt()));
    }
    KrausChannel::new(ops, label)
}

/// `sqrt(1 - 3q/4) I` and `sqrt(q/4) sigma_j`, `j = 1, 2, 3`.
pub fn depolarizing_channel(q: NoiseStrength) -> KrausChannel {
    let q = q.value();
    let mut ops = vec![pauli(0).expect("pauli").scale_real((1.0 - 0.75 * q).sqrt())];
    for j in 1..=3 {
        ops.push(pauli(j).expect("pauli").scale_real((q / 4.0).sqrt()));
    }
    KrausChannel::new(ops, ChannelLabel::Depolarizing { q }).expect("complete Kraus set")
}

/// `[[1, 0], [0, sqrt(1-q)]]` and `[[0, sqrt(q)], [0, 0]]`.
pub fn amplitude_damping_channel(q: NoiseStrength) -> KrausChannel {
    let q = q.value();
    let k0 = ComplexMatrix::from_vec(2, vec![real(1.0), ZERO, ZERO, real((1.0 - q).sqrt())]).expect("2x2");
    let k1 = ComplexMatrix::from_vec(2, vec![ZERO, real(q.sqrt()), ZERO, ZERO]).expect("2x2");
    KrausChannel::new(vec![k0, k1], ChannelLabel::AmplitudeDamping { q }).expect("complete Kraus set")
}

/// `[[1, 0], [0, sqrt(1-q)]]` and `[[0, 0], [0, sqrt(q)]]`.
pub fn phase_damping_channel(q: NoiseStrength) -> KrausChannel {
    let q = q.value();
    let k0 = ComplexMatrix::from_vec(2, vec![real(1.0), ZERO, ZERO, real((1.0 - q).sqrt())]).expect("2x2");
    let k1 = ComplexMatrix::from_vec(2, vec![ZERO, ZERO, ZERO, real(q.sqrt())]).expect("2x2");
    KrausChannel::new(vec![k0, k1], ChannelLabel::PhaseDamping { q }).expect("complete Kraus set")
}

/// Identical, independent copies of a single-qubit channel on `n_qubits`.
pub fn lift_local(channel: &KrausChannel, n_qubits: usize) -> Result<KrausChannel> {
    if channel.dim() != 2 {
        return Err(Error::DimensionMismatch(2, channel.dim()));
    }
    if !(1..=6).contains(&n_qubits) {
        return Err(Error::InvalidDimension(1usize.checked_shl(n_qubits as u32).unwrap_or(0)));
    }
    let single = channel.kraus_ops();
    Ok(KrausChannel {
        dim: 1 << n_qubits,
        repr: Repr::Local { single, n_qubits },
        label: ChannelLabel::Local { inner: Box::new(channel.label.clone()), n_qubits },
    })
}

/// Basis partner of `x`: every bit flipped.
pub fn complement(x: usize, n_qubits: usize) -> usize {
    !x & ((1 << n_qubits) - 1)
}

/// `|beta_i^±> = (|x> ± |x̄>) / sqrt(2)` where `x` is the `i`-th label
/// (0-based) in ascending binary order among labels with `x < x̄`.
pub fn beta_vector(i: usize, plus: bool, n_qubits: usize) -> Vec<Complex64> {
    let dim = 1usize << n_qubits;
    let x = i;
    let xbar = complement(x, n_qubits);
    let mut v = vec![ZERO; dim];
    let h = std::f64::consts::FRAC_1_SQRT_2;
    v[x] = real(h);
    v[xbar] = real(if plus { h } else { -h });
    v
}

/// Global rephasing channel on an even number of qubits. For every
/// computational label `y` with pair index `i` (the smaller of `y`, `ȳ`),
/// it has the two operators `sqrt((1 ± r)/2) |beta_i^±><y|`, giving
/// `2^{N+1}` operators in total.
///
/// `r` may be taken from `[-1, 1]`; both weights stay nonnegative.
pub fn rephasing_channel(r: f64, n_qubits: usize) -> Result<KrausChannel> {
    if !n_qubits.is_multiple_of(2) || n_qubits == 0 || n_qubits > 6 {
        return Err(Error::QubitCount(n_qubits, "rephasing needs an even qubit count up to 6"));
    }
    if !(-1.0..=1.0).contains(&r) {
        return Err(Error::InvalidParameter { name: "r", value: r });
    }
    let dim = 1usize << n_qubits;
    let mut ops = Vec::with_capacity(2 * dim);
    for y in 0..dim {
        let pair = y.min(complement(y, n_qubits));
        for plus in [true, false] {
            let w = if plus { (1.0 + r) / 2.0 } else { (1.0 - r) / 2.0 };
            let beta = beta_vector(pair, plus, n_qubits);
            let mut k = ComplexMatrix::zeros(dim)?;
            for (row, b) in beta.iter().enumerate() {
                k.set(row, y, b * w.sqrt());
            }
            ops.push(k);
        }
    }
    KrausChannel::new(ops, ChannelLabel::Rephasing { r, n_qubits })
}

/// True iff every Kraus operator maps each computational basis projector
/// to a diagonal matrix within `tol`. Incoherent states are the convex hull
/// of these projectors, so this decides `K I K^dagger ⊂ I`.
pub fn is_incoherent_channel(channel: &KrausChannel, tol: f64) -> bool {
    let ops: &[ComplexMatrix] = match &channel.repr {
        Repr::Dense(ops) => ops,
        // A product operator sends |x> to a product of single-qubit columns,
        // which is a basis vector multiple iff every factor column is.
        Repr::Local { single, .. } => single,
    };
    ops.iter().all(|k| {
        (0..k.dim()).all(|col| {
            let c = k.column(col);
            c.iter().enumerate().all(|(a, ua)| {
                c.iter().enumerate().all(|(b, ub)| a == b || (ua * ub.conj()).norm() <= tol)
            })
        })
    })
}

/// Hadamard gate, the standard coherence-generating unitary.
pub fn hadamard() -> ComplexMatrix {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    ComplexMatrix::from_vec(2, vec![real(h), real(h), real(h), real(-h)]).expect("2x2")
}
