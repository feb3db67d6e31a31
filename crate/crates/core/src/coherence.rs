//! Coherence quantifiers in the computational basis.
//!
//! `c_l1` and `c_re` are closed forms. `c_d` minimizes a distance to the
//! set of diagonal states with the simplex optimizer from [`crate::optim`];
//! `c_d_m3_restricted` minimizes only over incoherent M3 states
//! `2^-N (I + s Z^{⊗N})`, which is exact for even-`N` M3 inputs and
//! reaches `N = 6`.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::densmat::{
    bures_from_roots, eigvals_hermitian, relative_entropy_to_diagonal,
    shannon_entropy, trace_distance_raw, von_neumann_entropy, ComplexMatrix, DensityMatrix, ENTROPY_CUTOFF,
};
use crate::error::{Error, Result};
use crate::m3::{incoherent_m3_diag, m3_eigenvalue, M3Triple};
use crate::optim::{golden_section, minimize_on_simplex, MinimizerOptions};

/// Largest dimension handled by the full-simplex optimizer.
pub const OPTIMIZER_MAX_DIM: usize = 16;

/// Distances accepted by [`c_d`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DistanceKind {
    Trace,
    Bures,
    RelativeEntropy,
}

impl DistanceKind {
    pub const ALL: [DistanceKind; 3] = [DistanceKind::Trace, DistanceKind::Bures, DistanceKind::RelativeEntropy];

    pub fn name(self) -> &'static str {
        match self {
            DistanceKind::Trace => "trace",
            DistanceKind::Bures => "bures",
            DistanceKind::RelativeEntropy => "relative_entropy",
        }
    }

    /// Distance between two states.
    pub fn distance(self, rho: &DensityMatrix, tau: &DensityMatrix) -> Result<f64> {
        match self {
            DistanceKind::Trace => crate::densmat::trace_distance(rho, tau),
            DistanceKind::Bures => crate::densmat::bures_distance(rho, tau),
            DistanceKind::RelativeEntropy => crate::densmat::relative_entropy(rho, tau),
        }
    }
}

/// Probability vector of a diagonal state.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IncoherentState {
    pub diag: Vec<f64>,
}

impl IncoherentState {
    pub fn new(diag: Vec<f64>) -> Result<Self> {
        if !diag.len().is_power_of_two() || diag.len() < 2 {
            return Err(Error::InvalidDimension(diag.len()));
        }
        if let Some(&bad) = diag.iter().find(|&&p| !(p >= 0.0)) {
            return Err(Error::NotPositive(bad));
        }
        let sum: f64 = diag.iter().sum();
        if (sum - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidTrace(sum));
        }
        Ok(Self { diag })
    }

    pub fn of(rho: &DensityMatrix) -> Self {
        Self { diag: rho.matrix().diag_real() }
    }

    pub fn density(&self) -> Result<DensityMatrix> {
        DensityMatrix::new(ComplexMatrix::diagonal(&self.diag)?)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    ClosedForm,
    Optimizer,
    /// One-parameter search over incoherent M3 states.
    Restricted,
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Method::ClosedForm => "closed_form",
            Method::Optimizer => "optimizer",
            Method::Restricted => "restricted",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OptimizerDiagnostics {
    pub restarts_used: usize,
    pub final_step: f64,
    pub evals: usize,
    pub converged: bool,
}

/// Where the restricted search found its minimum. For the trace distance the
/// minimum can be flat, so the whole interval of minimizers is reported.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct M3Argmin {
    pub s: f64,
    pub s_lo: f64,
    pub s_hi: f64,
}

impl M3Argmin {
    /// Distance from `s` to the interval of minimizers.
    pub fn distance_to(&self, s: f64) -> f64 {
        (self.s_lo - s).max(s - self.s_hi).max(0.0)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CoherenceResult {
    pub value: f64,
    pub minimizer: Option<IncoherentState>,
    pub method: Method,
    pub diagnostics: Option<OptimizerDiagnostics>,
    pub m3_argmin: Option<M3Argmin>,
}

impl CoherenceResult {
    fn closed(value: f64) -> Self {
        Self { value, minimizer: None, method: Method::ClosedForm, diagnostics: None, m3_argmin: None }
    }
}

/// Sum of off-diagonal moduli.
pub fn c_l1(rho: &DensityMatrix) -> f64 {
    let m = rho.matrix();
    let n = m.dim();
    let mut total = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                total += m.get(i, j).norm();
            }
        }
    }
    total
}

/// `S(rho_diag) - S(rho)` in bits.
pub fn c_re(rho: &DensityMatrix) -> f64 {
    (shannon_entropy(&rho.matrix().diag_real()) - von_neumann_entropy(rho)).max(0.0)
}

/// Trace-distance coherence of a two-qubit M3 state, `(|c1-c2| + |c1+c2|)/4`,
/// which is half the l1 coherence.
pub fn c_tr_m3(triple: &M3Triple) -> Result<f64> {
    if triple.n_qubits != 2 {
        return Err(Error::QubitCount(triple.n_qubits, "closed form holds for two qubits"));
    }
    let t = M3Triple::new(triple.c1, triple.c2, triple.c3, 2)?;
    Ok(0.25 * ((t.c1 - t.c2).abs() + (t.c1 + t.c2).abs()))
}

/// `true` iff every off-diagonal modulus is at most `tol`.
pub fn is_incoherent(rho: &DensityMatrix, tol: f64) -> bool {
    rho.matrix().max_off_diagonal() <= tol
}

/// Below this squared Bures distance the eigenvalue route loses digits to
/// cancellation (absolute error ~1e-16 in the square).
const BURES_FAST_FLOOR: f64 = 1e-4;

/// Distance from `rho` to many diagonal states, with per-`rho` work done once.
pub struct DiagonalDistance<'a> {
    rho: &'a DensityMatrix,
    kind: DistanceKind,
    sqrt_rho: Option<ComplexMatrix>,
    neg_entropy: f64,
}

impl<'a> DiagonalDistance<'a> {
    pub fn new(rho: &'a DensityMatrix, kind: DistanceKind) -> Self {
        let sqrt_rho = (kind == DistanceKind::Bures).then(|| rho.sqrt());
        let neg_entropy = rho
            .eigenvalues()
            .iter()
            .filter(|&&x| x > ENTROPY_CUTOFF)
            .map(|&x| x * x.log2())
            .sum();
        Self { rho, kind, sqrt_rho, neg_entropy }
    }

    /// `D(rho, diag(d))`; `NaN` if the eigensolver fails.
    pub fn eval(&self, d: &[f64]) -> f64 {
        let run = || -> Result<f64> {
            let delta = ComplexMatrix::diagonal(d)?;
            Ok(match self.kind {
                DistanceKind::Trace => trace_distance_raw(self.rho.matrix(), &delta)?,
                DistanceKind::Bures => {
                    // Singular values of sqrt(rho) sqrt(D) are the roots of the
                    // eigenvalues of sqrt(D) rho sqrt(D). The 2 - 2 sum form
                    // cancels only for nearby states, where the polar route
                    // takes over.
                    let roots: Vec<f64> = d.iter().map(|x| x.max(0.0).sqrt()).collect();
                    let m = self.rho.matrix();
                    let n = m.dim();
                    let mut scaled = m.clone();
                    for i in 0..n {
                        for j in 0..n {
                            scaled.set(i, j, m.get(i, j) * (roots[i] * roots[j]));
                        }
                    }
                    let root_fid: f64 = eigvals_hermitian(&scaled)?.iter().map(|&x| x.max(0.0).sqrt()).sum();
                    let b2 = 2.0 - 2.0 * root_fid.min(1.0);
                    if b2 > BURES_FAST_FLOOR {
                        b2.sqrt()
                    } else {
                        bures_from_roots(self.sqrt_rho.as_ref().unwrap(), &ComplexMatrix::diagonal(&roots)?)?
                    }
                }
                DistanceKind::RelativeEntropy => relative_entropy_to_diagonal(self.neg_entropy, self.rho.matrix(), d),
            })
        };
        run().unwrap_or(f64::NAN)
    }
}

/// `min_delta D(rho, delta)` over diagonal states.
///
/// The relative entropy is answered in closed form (`c_re`, attained at the
/// diagonal part). The other distances go through the multi-start simplex
/// optimizer seeded at the diagonal part and the uniform distribution.
pub fn c_d(rho: &DensityMatrix, d: DistanceKind, opts: &MinimizerOptions) -> Result<CoherenceResult> {
    let diag = rho.matrix().diag_real();
    if d == DistanceKind::RelativeEntropy {
        return Ok(CoherenceResult { minimizer: Some(IncoherentState { diag }), ..CoherenceResult::closed(c_re(rho)) });
    }
    let dim = rho.dim();
    if dim > OPTIMIZER_MAX_DIM {
        return Err(Error::QubitCount(rho.n_qubits(), "the simplex optimizer handles at most 4 qubits"));
    }
    let dist = DiagonalDistance::new(rho, d);
    let at_diag = dist.eval(&diag);
    if at_diag <= 0.0 {
        return Ok(CoherenceResult {
            minimizer: Some(IncoherentState { diag }),
            ..CoherenceResult::closed(0.0)
        });
    }
    let found = minimize_on_simplex(|p| dist.eval(p), dim, std::slice::from_ref(&diag), opts);
    let (value, point) = if found.value.is_finite() && found.value <= at_diag {
        (found.value, found.point.clone())
    } else {
        (at_diag, diag)
    };
    if !found.converged {
        return Err(Error::NotConverged { best_value: value, restarts: found.restarts_used });
    }
    Ok(CoherenceResult {
        value: value.max(0.0),
        minimizer: Some(IncoherentState { diag: point }),
        method: Method::Optimizer,
        diagnostics: Some(OptimizerDiagnostics {
            restarts_used: found.restarts_used,
            final_step: found.final_step,
            evals: found.evals,
            converged: found.converged,
        }),
        m3_argmin: None,
    })
}

/// Eigenvalues of an even-`N` M3 state by class: `(parity, plus)` in the
/// order `(0,+), (0,-), (1,+), (1,-)`, each with multiplicity `2^{N-2}`.
fn m3_class_spectrum(c: [f64; 3], n: usize) -> [f64; 4] {
    [(0, true), (0, false), (1, true), (1, false)].map(|(p, s)| m3_eigenvalue(c, n, p, s))
}

/// `D` between two even-`N` M3 states. They commute, so every distance
/// reduces to a classical one on the shared eigenbasis.
pub fn m3_distance(a: &M3Triple, b: &M3Triple, kind: DistanceKind) -> Result<f64> {
    let n = a.n_qubits;
    if n != b.n_qubits {
        return Err(Error::DimensionMismatch(1 << n, 1 << b.n_qubits));
    }
    if !n.is_multiple_of(2) {
        return Err(Error::QubitCount(n, "commuting spectra need even N"));
    }
    Ok(classical_distance(&m3_class_spectrum(a.coeffs(), n), &m3_class_spectrum(b.coeffs(), n), n, kind))
}

fn classical_distance(p: &[f64; 4], q: &[f64; 4], n: usize, kind: DistanceKind) -> f64 {
    let mult = (1u64 << (n - 2)) as f64;
    match kind {
        DistanceKind::Trace => 0.5 * mult * p.iter().zip(q).map(|(a, b)| (a - b).abs()).sum::<f64>(),
        // Hellinger form of 2 - 2 sqrt(F) for commuting states
        DistanceKind::Bures => (mult * p.iter().zip(q).map(|(a, b)| (a.max(0.0).sqrt() - b.max(0.0).sqrt()).powi(2)).sum::<f64>()).sqrt(),
        DistanceKind::RelativeEntropy => {
            let mut total = 0.0;
            for (&a, &b) in p.iter().zip(q) {
                if a <= ENTROPY_CUTOFF {
                    continue;
                }
                if b <= ENTROPY_CUTOFF {
                    return f64::INFINITY;
                }
                total += a * (a / b).log2();
            }
            (mult * total).max(0.0)
        }
    }
}

/// Minimizes `D(rho(c), 2^-N (I + s Z^{⊗N}))` over `s` in `[-1, 1]`.
///
/// The objective is quasi-convex in `s`, so a coarse scan followed by a
/// golden-section refinement finds the minimum; the interval of `s` values
/// within `1e-12` of it is then located by bisection on both sides.
pub fn c_d_m3_restricted(triple: &M3Triple, d: DistanceKind) -> Result<CoherenceResult> {
    let n = triple.n_qubits;
    if !n.is_multiple_of(2) {
        return Err(Error::QubitCount(n, "restricted minimization needs even N"));
    }
    let p = m3_class_spectrum(triple.coeffs(), n);
    let f = |s: f64| classical_distance(&p, &m3_class_spectrum([0.0, 0.0, s], n), n, d);

    const GRID: usize = 400;
    let mut best = (0usize, f64::INFINITY);
    for i in 0..=GRID {
        let v = f(-1.0 + 2.0 * i as f64 / GRID as f64);
        if v < best.1 {
            best = (i, v);
        }
    }
    let at = |i: usize| -1.0 + 2.0 * i.min(GRID) as f64 / GRID as f64;
    let (lo, hi) = (at(best.0.saturating_sub(1)), at(best.0 + 1));
    let (mut s, mut value) = golden_section(f, lo, hi, 1e-13);
    for cand in [lo, hi, at(best.0)] {
        let v = f(cand);
        if v < value {
            s = cand;
            value = v;
        }
    }
    let flat = value + 1e-12;
    let edge = |mut inside: f64, mut outside: f64| {
        if f(outside) <= flat {
            return outside;
        }
        for _ in 0..200 {
            let mid = 0.5 * (inside + outside);
            if f(mid) <= flat {
                inside = mid;
            } else {
                outside = mid;
            }
            if (outside - inside).abs() < 1e-15 {
                break;
            }
        }
        inside
    };
    let s_lo = edge(s, -1.0);
    let s_hi = edge(s, 1.0);
    Ok(CoherenceResult {
        value: value.max(0.0),
        minimizer: Some(IncoherentState { diag: incoherent_m3_diag(s, n) }),
        method: Method::Restricted,
        diagnostics: None,
        m3_argmin: Some(M3Argmin { s, s_lo, s_hi }),
    })
}

/// Measure selector used by configs and the command line.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Measure {
    L1,
    Re,
    /// Trace-distance coherence, closed form where one is known.
    Tr,
    D(DistanceKind),
}

impl Measure {
    pub const ALL: [Measure; 6] = [
        Measure::L1,
        Measure::Re,
        Measure::Tr,
        Measure::D(DistanceKind::Trace),
        Measure::D(DistanceKind::Bures),
        Measure::D(DistanceKind::RelativeEntropy),
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Measure::L1 => "l1",
            Measure::Re => "re",
            Measure::Tr => "tr",
            Measure::D(DistanceKind::Trace) => "d:trace",
            Measure::D(DistanceKind::Bures) => "d:bures",
            Measure::D(DistanceKind::RelativeEntropy) => "d:re",
        }
    }

    /// Whether the value comes from a formula rather than a numerical search.
    pub fn is_closed_form(self, rho_dim: usize, m3: Option<&M3Triple>) -> bool {
        match self {
            Measure::L1 | Measure::Re | Measure::D(DistanceKind::RelativeEntropy) => true,
            Measure::Tr => rho_dim == 2 || m3.is_some_and(|t| t.n_qubits == 2),
            Measure::D(_) => false,
        }
    }

    /// Evaluates the measure. When the state is known to be an M3 state,
    /// `m3` selects the closed forms and, for `N >= 4`, the restricted search.
    pub fn evaluate(
        self,
        rho: &DensityMatrix,
        m3: Option<&M3Triple>,
        opts: &MinimizerOptions,
    ) -> Result<CoherenceResult> {
        let even_m3 = m3.filter(|t| t.n_qubits % 2 == 0);
        match self {
            Measure::L1 => Ok(CoherenceResult::closed(c_l1(rho))),
            Measure::Re => Ok(CoherenceResult::closed(c_re(rho))),
            Measure::Tr => {
                if rho.dim() == 2 {
                    return Ok(CoherenceResult::closed(c_l1(rho) / 2.0));
                }
                match even_m3 {
                    Some(t) if t.n_qubits == 2 => Ok(CoherenceResult::closed(c_tr_m3(t)?)),
                    Some(t) => c_d_m3_restricted(t, DistanceKind::Trace),
                    None => c_d(rho, DistanceKind::Trace, opts),
                }
            }
            Measure::D(DistanceKind::RelativeEntropy) => c_d(rho, DistanceKind::RelativeEntropy, opts),
            Measure::D(kind) => match even_m3 {
                Some(t) if t.n_qubits >= 4 => c_d_m3_restricted(t, kind),
                _ => c_d(rho, kind, opts),
            },
        }
    }
}

impl fmt::Display for Measure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Measure {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Measure::ALL
            .into_iter()
            .find(|m| m.as_str() == s.trim())
            .ok_or_else(|| Error::Unknown { what: "measure", value: s.to_string() })
    }
}

impl Serialize for Measure {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(self.as_str())
    }
}

impl<'de> Deserialize<'de> for Measure {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channels::{
        amplitude_damping_channel, flip_channel, lift_local, phase_damping_channel, NoiseStrength,
    };
    use crate::densmat::{bloch_to_density, BlochVector};
    use crate::m3::{freezing_triple, m3_state};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn plus_state() -> DensityMatrix {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        DensityMatrix::pure(&[h.into(), h.into()]).unwrap()
    }

    fn random_state(rng: &mut impl Rng, dim: usize) -> DensityMatrix {
        crate::densmat::random_density(rng, dim).unwrap()
    }

    fn random_triple(rng: &mut impl Rng, n: usize) -> M3Triple {
        loop {
            let c = [rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)];
            if let Ok(t) = M3Triple::new(c[0], c[1], c[2], n) {
                return t;
            }
        }
    }

    #[test]
    fn l1_examples() {
        assert_eq!(c_l1(&DensityMatrix::maximally_mixed(8).unwrap()), 0.0);
        assert!((c_l1(&plus_state()) - 1.0).abs() < 1e-15);
        let rho = m3_state(&M3Triple::new(0.25, -0.0625, 0.25, 2).unwrap()).unwrap();
        assert!((c_l1(&rho) - 0.25).abs() < 1e-15);
    }

    #[test]
    fn re_examples() {
        assert!(c_re(&DensityMatrix::basis(4, 2).unwrap()).abs() < 1e-15);
        assert!((c_re(&plus_state()) - 1.0).abs() < 1e-12);
        let (c1, c2, c3) = (0.25, -0.0625, 0.25);
        let rho = m3_state(&M3Triple::new(c1, c2, c3, 2).unwrap()).unwrap();
        let eig = [
            (1.0 + c1 - c2 + c3) / 4.0,
            (1.0 - c1 + c2 + c3) / 4.0,
            (1.0 + c1 + c2 - c3) / 4.0,
            (1.0 - c1 - c2 - c3) / 4.0,
        ];
        let diag = [(1.0 + c3) / 4.0, (1.0 + c3) / 4.0, (1.0 - c3) / 4.0, (1.0 - c3) / 4.0];
        let h = |p: &[f64]| -p.iter().map(|x| x * x.log2()).sum::<f64>();
        assert!((c_re(&rho) - (h(&diag) - h(&eig))).abs() < 1e-12);
    }

    #[test]
    fn tr_m3_examples() {
        assert_eq!(c_tr_m3(&M3Triple::new(0.0, 0.0, 0.6, 2).unwrap()).unwrap(), 0.0);
        let t = M3Triple::new(0.25, -0.0625, 0.25, 2).unwrap();
        assert!((c_tr_m3(&t).unwrap() - 0.125).abs() < 1e-15);
        let rho = m3_state(&t).unwrap();
        let r = c_d(&rho, DistanceKind::Trace, &MinimizerOptions::default()).unwrap();
        assert!((r.value - 0.125).abs() < 1e-6, "{}", r.value);
        assert!(c_tr_m3(&M3Triple { c1: 1.0, c2: 1.0, c3: 1.0, n_qubits: 2 }).is_err());
    }

    #[test]
    fn incoherent_inputs_give_zero() {
        let opts = MinimizerOptions::default();
        let diag = IncoherentState::new(vec![0.1, 0.2, 0.3, 0.4]).unwrap();
        let rho = diag.density().unwrap();
        for kind in DistanceKind::ALL {
            let r = c_d(&rho, kind, &opts).unwrap();
            assert!(r.value.abs() < 1e-12);
            assert_eq!(r.minimizer.unwrap(), diag);
        }
        assert!(is_incoherent(&DensityMatrix::maximally_mixed(16).unwrap(), 1e-12));
        assert!(!is_incoherent(&plus_state(), 1e-12));
        assert!(is_incoherent(&m3_state(&M3Triple::new(0.0, 0.0, 0.7, 2).unwrap()).unwrap(), 0.0));
    }

    #[test]
    fn single_qubit_trace_is_half_l1() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let opts = MinimizerOptions::default();
        for _ in 0..100 {
            let rho = random_state(&mut rng, 2);
            let r = c_d(&rho, DistanceKind::Trace, &opts).unwrap();
            assert!((r.value - c_l1(&rho) / 2.0).abs() < 1e-6);
        }
    }

    #[test]
    fn bures_minimizer_on_frozen_family() {
        let t = freezing_triple(0.4, 0.5, 2).unwrap();
        let rho = m3_state(&t).unwrap();
        let r = c_d(&rho, DistanceKind::Bures, &MinimizerOptions::default()).unwrap();
        let want = incoherent_m3_diag(0.5, 2);
        let got = r.minimizer.unwrap().diag;
        assert!(got.iter().zip(&want).all(|(a, b)| (a - b).abs() < 1e-4), "{got:?}");
        let restricted = c_d_m3_restricted(&t, DistanceKind::Bures).unwrap();
        assert!((restricted.value - r.value).abs() < 1e-6);
    }

    #[test]
    fn restricted_matches_numeric_distances() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        for n in [2, 4] {
            for _ in 0..20 {
                let a = random_triple(&mut rng, n);
                let s = rng.gen_range(-0.99..0.99);
                let b = M3Triple::new(0.0, 0.0, s, n).unwrap();
                let (ra, rb) = (m3_state(&a).unwrap(), m3_state(&b).unwrap());
                for kind in DistanceKind::ALL {
                    let closed = m3_distance(&a, &b, kind).unwrap();
                    let numeric = kind.distance(&ra, &rb).unwrap();
                    assert!((closed - numeric).abs() < 1e-9, "{kind:?} {closed} {numeric}");
                }
            }
        }
    }

    #[test]
    fn restricted_examples() {
        for kind in DistanceKind::ALL {
            let r = c_d_m3_restricted(&M3Triple::new(0.0, 0.0, 0.3, 4).unwrap(), kind).unwrap();
            assert!(r.value.abs() < 1e-9);
            assert!(r.m3_argmin.unwrap().distance_to(0.3) < 1e-6);
        }
        let t = M3Triple::new(0.3, 0.1, -0.2, 2).unwrap();
        let r = c_d_m3_restricted(&t, DistanceKind::Trace).unwrap();
        assert!(r.m3_argmin.unwrap().distance_to(-0.2) < 1e-9);
        assert!((r.value - c_tr_m3(&t).unwrap()).abs() < 1e-9);
        assert!(c_d_m3_restricted(&M3Triple::new(0.1, 0.0, 0.0, 3).unwrap(), DistanceKind::Trace).is_err());
    }

    #[test]
    fn measure_selector() {
        for m in Measure::ALL {
            assert_eq!(m.as_str().parse::<Measure>().unwrap(), m);
        }
        assert!(matches!("d:fidelity".parse::<Measure>(), Err(Error::Unknown { .. })));
        let json = serde_json::to_string(&Measure::D(DistanceKind::Bures)).unwrap();
        assert_eq!(json, "\"d:bures\"");
    }

    #[test]
    fn soundness_against_diagonal_part() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        let opts = MinimizerOptions { restarts: 3, ..Default::default() };
        for dim in [2, 4] {
            for _ in 0..10 {
                let rho = random_state(&mut rng, dim);
                let diag_part = rho.diagonal_part();
                for kind in [DistanceKind::Trace, DistanceKind::Bures] {
                    let r = c_d(&rho, kind, &opts).unwrap();
                    assert!(r.value <= kind.distance(&rho, &diag_part).unwrap() + 1e-9);
                }
            }
        }
    }

    #[test]
    fn contractive_under_incoherent_channels() {
        let mut rng = ChaCha8Rng::seed_from_u64(14);
        let opts = MinimizerOptions { restarts: 3, ..Default::default() };
        for _ in 0..10 {
            let rho = random_state(&mut rng, 4);
            let q = NoiseStrength::new(rng.gen_range(0.0..1.0)).unwrap();
            for single in [flip_channel(3, q).unwrap(), amplitude_damping_channel(q), phase_damping_channel(q)] {
                let out = lift_local(&single, 2).unwrap().apply(&rho).unwrap();
                assert!(c_l1(&out) <= c_l1(&rho) + 1e-7);
                assert!(c_re(&out) <= c_re(&rho) + 1e-7);
                let before = c_d(&rho, DistanceKind::Trace, &opts).unwrap().value;
                let after = c_d(&out, DistanceKind::Trace, &opts).unwrap().value;
                assert!(after <= before + 1e-7);
            }
        }
        let b = bloch_to_density(&BlochVector::new(0.6, 0.0, 0.0).unwrap()).unwrap();
        assert!((c_l1(&b) - 0.6).abs() < 1e-15);
    }
}
