//! Sweep engine: evolve a state across a grid of noise strengths, evaluate
//! coherence measures at each point, and classify freezing.

use std::fmt::Write as _;

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::channels::{ChannelKind, ChannelSpec};
use crate::coherence::{c_l1, c_re, CoherenceResult, Measure, Method};
use crate::densmat::{bloch_to_density, BlochVector, ComplexMatrix, DensityMatrix};
use crate::error::{Error, Result};
use crate::m3::{
    evolve_triple, freezing_syntax_triple, m3_state, standard_form_state, threshold_q_star, triple_of, M3Triple,
    StandardFormState,
};
use crate::optim::MinimizerOptions;

/// Freezing tolerance for closed-form measures.
pub const CLOSED_FORM_TOL: f64 = 1e-9;
/// ... for the one-parameter search over incoherent M3 states.
pub const RESTRICTED_TOL: f64 = 1e-8;
/// ... for measures computed by the simplex optimizer.
pub const OPTIMIZER_TOL: f64 = 1e-5;

/// Off-grid points added to every freezing verdict.
pub const DEFAULT_PROBES: usize = 20;
pub const DEFAULT_GRID_POINTS: usize = 101;

/// `c2` in a triple descriptor: a number or `"freeze"`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum C2Value {
    Value(f64),
    Keyword(String),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct M3Descriptor {
    pub c1: f64,
    pub c2: C2Value,
    pub c3: f64,
    pub n: usize,
}

impl M3Descriptor {
    /// Resolves `"freeze"` to `c2 = ± c1 c3` with sign `(-1)^{floor(N/2)}`.
    pub fn triple(&self) -> Result<M3Triple> {
        match &self.c2 {
            C2Value::Value(c2) => M3Triple::new(self.c1, *c2, self.c3, self.n),
            C2Value::Keyword(k) if k == "freeze" => freezing_syntax_triple(self.c1, self.c3, self.n),
            C2Value::Keyword(k) => Err(Error::Unknown { what: "c2 keyword", value: k.clone() }),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawMatrix {
    pub re: Vec<Vec<f64>>,
    #[serde(default)]
    pub im: Option<Vec<Vec<f64>>>,
}

/// Initial state of a sweep.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StateDescriptor {
    M3(M3Descriptor),
    Bloch(BlochVector),
    StandardForm(StandardFormState),
    Matrix(RawMatrix),
}

impl StateDescriptor {
    pub fn m3(&self) -> Result<Option<M3Triple>> {
        match self {
            StateDescriptor::M3(d) => d.triple().map(Some),
            _ => Ok(None),
        }
    }

    pub fn density(&self) -> Result<DensityMatrix> {
        match self {
            StateDescriptor::M3(d) => m3_state(&d.triple()?),
            StateDescriptor::Bloch(b) => bloch_to_density(&BlochVector::new(b.n1, b.n2, b.n3)?),
            StateDescriptor::StandardForm(p) => standard_form_state(p),
            StateDescriptor::Matrix(m) => {
                let im = m.im.clone().unwrap_or_else(|| m.re.iter().map(|row| vec![0.0; row.len()]).collect());
                DensityMatrix::new(ComplexMatrix::from_real_imag(&m.re, &im)?)
            }
        }
    }
}

/// Either a point count on `[0, 1]` or an explicit list.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum GridSpec {
    Count(usize),
    Points(Vec<f64>),
}

impl Default for GridSpec {
    fn default() -> Self {
        GridSpec::Count(DEFAULT_GRID_POINTS)
    }
}

impl GridSpec {
    pub fn points(&self) -> Result<Vec<f64>> {
        let pts = match self {
            GridSpec::Count(n) => {
                if *n < 2 {
                    return Err(Error::Config(format!("grid needs at least 2 points, got {n}")));
                }
                (0..*n).map(|i| i as f64 / (*n - 1) as f64).collect()
            }
            GridSpec::Points(p) => p.clone(),
        };
        if pts.len() < 2 {
            return Err(Error::Config("grid needs at least 2 points".into()));
        }
        if let Some(bad) = pts.iter().find(|q| !(0.0..=1.0).contains(*q)) {
            return Err(Error::Config(format!("grid point {bad} outside [0, 1]")));
        }
        if pts.windows(2).any(|w| w[0] > w[1]) {
            return Err(Error::Config("grid must be sorted".into()));
        }
        Ok(pts)
    }
}

fn default_seed() -> u64 {
    MinimizerOptions::default().seed
}

fn default_probes() -> usize {
    DEFAULT_PROBES
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepSpec {
    pub initial: StateDescriptor,
    pub channel: ChannelSpec,
    pub measures: Vec<Measure>,
    #[serde(default)]
    pub grid: GridSpec,
    #[serde(default = "default_seed")]
    pub seed: u64,
    /// Random off-grid points that enter the verdicts but not the series.
    #[serde(default = "default_probes")]
    pub probes: usize,
}

impl SweepSpec {
    pub fn new(initial: StateDescriptor, channel: ChannelSpec, measures: Vec<Measure>) -> Self {
        Self { initial, channel, measures, grid: GridSpec::default(), seed: default_seed(), probes: DEFAULT_PROBES }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FreezeStatus {
    Frozen,
    NotFrozen,
    /// Some point failed to evaluate, so constancy cannot be certified.
    Indeterminate,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FreezeVerdict {
    pub status: FreezeStatus,
    pub frozen: bool,
    pub max_deviation: f64,
    pub tolerance: f64,
}

/// Compares every value to the first one. Non-finite entries make the
/// verdict indeterminate.
pub fn freeze_verdict(values: &[f64], tol: f64) -> FreezeVerdict {
    let Some(&first) = values.first() else {
        return FreezeVerdict { status: FreezeStatus::Indeterminate, frozen: false, max_deviation: f64::NAN, tolerance: tol };
    };
    let finite: Vec<f64> = values.iter().copied().filter(|v| v.is_finite()).collect();
    let max_deviation = if first.is_finite() {
        finite.iter().map(|v| (v - first).abs()).fold(0.0, f64::max)
    } else {
        f64::NAN
    };
    let status = if finite.len() < values.len() {
        FreezeStatus::Indeterminate
    } else if max_deviation <= tol {
        FreezeStatus::Frozen
    } else {
        FreezeStatus::NotFrozen
    };
    FreezeVerdict { status, frozen: status == FreezeStatus::Frozen, max_deviation, tolerance: tol }
}

/// Tolerance matching how a value was computed.
pub fn tolerance_for(method: Method) -> f64 {
    match method {
        Method::ClosedForm => CLOSED_FORM_TOL,
        Method::Restricted => RESTRICTED_TOL,
        Method::Optimizer => OPTIMIZER_TOL,
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EvolutionPath {
    /// Triple rescaling under a lifted flip channel.
    ClosedForm,
    Kraus,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PointFailure {
    pub q: f64,
    pub message: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MeasureSeries {
    pub measure: Measure,
    /// `NaN` where evaluation failed.
    pub values: Vec<f64>,
    pub methods: Vec<Option<Method>>,
    pub failures: Vec<PointFailure>,
    pub verdict: FreezeVerdict,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepSeries {
    pub q: Vec<f64>,
    /// `-ln(1-q)/gamma` when the channel spec carries a rate.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub time: Option<Vec<f64>>,
    pub n_qubits: usize,
    pub path: EvolutionPath,
    pub seed: u64,
    pub series: Vec<MeasureSeries>,
    /// Threshold of the `|c3| >= |c1|` regime for M3 input under bit flip.
    pub q_star: Option<f64>,
}

impl SweepSeries {
    pub fn has_failures(&self) -> bool {
        self.series.iter().any(|s| !s.failures.is_empty())
    }

    /// `q` followed by one column per measure; failed points are `NaN`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("q");
        for s in &self.series {
            out.push(',');
            out.push_str(s.measure.as_str());
        }
        out.push('\n');
        for (i, q) in self.q.iter().enumerate() {
            let _ = write!(out, "{}", fmt_csv(*q));
            for s in &self.series {
                let _ = write!(out, ",{}", fmt_csv(s.values[i]));
            }
            out.push('\n');
        }
        out
    }
}

/// 17 significant digits; `NaN` for missing values.
pub fn fmt_csv(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else {
        "NaN".into()
    }
}

/// Optimizer seed for the point `q`. Depends on `q` itself rather than its
/// grid index so that a value does not change when the grid is refined.
pub fn point_seed(seed: u64, q: f64) -> u64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(q.to_bits());
    rng.next_u64()
}

/// State of the sweep at one noise strength, with its M3 triple when it has one.
pub struct Evolver {
    initial: DensityMatrix,
    triple: Option<M3Triple>,
    kind: ChannelKind,
    path: EvolutionPath,
}

/// Largest entry-wise gap tolerated when recognizing an M3 state numerically.
const M3_RECOGNITION_TOL: f64 = 1e-12;

/// The M3 triple of `rho` if `rho` has that form.
pub fn recognize_m3(rho: &DensityMatrix) -> Option<M3Triple> {
    let c = triple_of(rho).ok()?;
    let t = M3Triple::new(c[0], c[1], c[2], rho.n_qubits()).ok()?;
    let rebuilt = m3_state(&t).ok()?;
    (rebuilt.matrix().max_abs_diff(rho.matrix()) <= M3_RECOGNITION_TOL).then_some(t)
}

impl Evolver {
    pub fn new(initial: &StateDescriptor, kind: ChannelKind) -> Result<Self> {
        let rho = initial.density()?;
        let triple = initial.m3()?;
        let path = if triple.is_some() && kind.flip_axis().is_some() {
            EvolutionPath::ClosedForm
        } else {
            EvolutionPath::Kraus
        };
        if kind == ChannelKind::Rephasing && rho.n_qubits() % 2 != 0 {
            return Err(Error::QubitCount(rho.n_qubits(), "rephasing needs an even qubit count"));
        }
        Ok(Self { initial: rho, triple, kind, path })
    }

    /// Forces the Kraus route even when a closed form exists.
    pub fn kraus_only(mut self) -> Self {
        self.path = EvolutionPath::Kraus;
        self
    }

    pub fn path(&self) -> EvolutionPath {
        self.path
    }

    pub fn n_qubits(&self) -> usize {
        self.initial.n_qubits()
    }

    pub fn initial_triple(&self) -> Option<M3Triple> {
        self.triple
    }

    pub fn at(&self, q: f64) -> Result<(DensityMatrix, Option<M3Triple>)> {
        match (self.path, self.triple, self.kind.flip_axis()) {
            (EvolutionPath::ClosedForm, Some(t), Some(axis)) => {
                let e = evolve_triple(&t, axis, q)?;
                Ok((m3_state(&e)?, Some(e)))
            }
            _ => {
                let rho = self.kind.build(q, self.n_qubits())?.apply(&self.initial)?;
                let t = recognize_m3(&rho);
                Ok((rho, t))
            }
        }
    }
}

/// Evaluates `measures` on one state.
pub fn evaluate_measures(
    rho: &DensityMatrix,
    triple: Option<&M3Triple>,
    measures: &[Measure],
    opts: &MinimizerOptions,
) -> Vec<Result<CoherenceResult>> {
    measures.iter().map(|m| m.evaluate(rho, triple, opts)).collect()
}

fn evaluate_point(
    evolver: &Evolver,
    q: f64,
    measures: &[Measure],
    seed: u64,
) -> Vec<Result<CoherenceResult>> {
    let opts = MinimizerOptions { seed: point_seed(seed, q), ..Default::default() };
    match evolver.at(q) {
        Ok((rho, t)) => evaluate_measures(&rho, t.as_ref(), measures, &opts),
        Err(e) => {
            let msg = e.to_string();
            measures.iter().map(|_| Err(Error::Config(msg.clone()))).collect()
        }
    }
}

/// Runs a sweep. Per-point failures are recorded and the sweep continues.
pub fn run_sweep(spec: &SweepSpec) -> Result<SweepSeries> {
    let evolver = Evolver::new(&spec.initial, spec.channel.kind)?;
    run_sweep_with(spec, &evolver)
}

/// Same as [`run_sweep`] with a caller-built evolver.
pub fn run_sweep_with(spec: &SweepSpec, evolver: &Evolver) -> Result<SweepSeries> {
    let grid = spec.grid.points()?;
    if spec.measures.is_empty() {
        return Err(Error::Config("no measures requested".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let probes: Vec<f64> = (0..spec.probes).map(|_| rng.gen_range(0.0..1.0)).collect();

    let m = spec.measures.len();
    let mut values = vec![Vec::with_capacity(grid.len()); m];
    let mut methods = vec![Vec::with_capacity(grid.len()); m];
    let mut failures = vec![Vec::new(); m];
    let mut tol = vec![CLOSED_FORM_TOL; m];
    let mut record = |q: f64, results: Vec<Result<CoherenceResult>>, keep: bool, values: &mut Vec<Vec<f64>>| {
        for (k, r) in results.into_iter().enumerate() {
            let (v, method) = match r {
                Ok(r) => {
                    tol[k] = tol[k].max(tolerance_for(r.method));
                    (r.value, Some(r.method))
                }
                Err(e) => {
                    failures[k].push(PointFailure { q, message: e.to_string() });
                    (f64::NAN, None)
                }
            };
            values[k].push(v);
            if keep {
                methods[k].push(method);
            }
        }
    };

    if grid[0] != 0.0 {
        let r = evaluate_point(evolver, 0.0, &spec.measures, spec.seed);
        record(0.0, r, false, &mut values);
    }
    for &q in &grid {
        let r = evaluate_point(evolver, q, &spec.measures, spec.seed);
        record(q, r, true, &mut values);
    }
    let mut probe_values = vec![Vec::new(); m];
    for &q in &probes {
        let r = evaluate_point(evolver, q, &spec.measures, spec.seed);
        record(q, r, false, &mut probe_values);
    }

    let offset = usize::from(grid[0] != 0.0);
    let series = spec
        .measures
        .iter()
        .enumerate()
        .map(|(k, &measure)| {
            let mut all = values[k].clone();
            all.extend_from_slice(&probe_values[k]);
            MeasureSeries {
                measure,
                values: values[k][offset..].to_vec(),
                methods: std::mem::take(&mut methods[k]),
                failures: std::mem::take(&mut failures[k]),
                verdict: freeze_verdict(&all, tol[k]),
            }
        })
        .collect();

    let time = spec.channel.gamma.map(|g| grid.iter().map(|&q| -(1.0 - q).ln() / g).collect());
    let q_star = match (evolver.initial_triple(), spec.channel.kind) {
        (Some(t), ChannelKind::BitFlip) => Some(threshold_q_star(&t)),
        _ => None,
    };
    Ok(SweepSeries { q: grid, time, n_qubits: evolver.n_qubits(), path: evolver.path(), seed: spec.seed, series, q_star })
}

/// Why a simultaneous freeze does or does not count.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Triviality {
    /// The initial state is already incoherent.
    IncoherentInitial,
    /// The channel leaves the initial state unchanged.
    ChannelInvariant,
    Nontrivial,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CommonFreezingReport {
    pub initial: BlochVector,
    pub channel: ChannelKind,
    pub l1: FreezeVerdict,
    pub re: FreezeVerdict,
    pub triviality: Triviality,
}

impl CommonFreezingReport {
    pub fn both_frozen(&self) -> bool {
        self.l1.frozen && self.re.frozen
    }

    pub fn nontrivial_common_freeze(&self) -> bool {
        self.both_frozen() && self.triviality == Triviality::Nontrivial
    }
}

/// Freezing verdicts of `c_l1` and `c_re` for one qubit under `kind`.
pub fn no_common_freezing_scan(n0: &BlochVector, kind: ChannelKind, grid: &GridSpec) -> Result<CommonFreezingReport> {
    let rho0 = bloch_to_density(n0)?;
    let points = grid.points()?;
    let mut l1 = Vec::with_capacity(points.len());
    let mut re = Vec::with_capacity(points.len());
    let mut moved: f64 = 0.0;
    for &q in &points {
        let rho = kind.build(q, 1)?.apply(&rho0)?;
        moved = moved.max(rho.matrix().max_abs_diff(rho0.matrix()));
        l1.push(c_l1(&rho));
        re.push(c_re(&rho));
    }
    let triviality = if n0.n1 == 0.0 && n0.n2 == 0.0 {
        Triviality::IncoherentInitial
    } else if moved <= 1e-12 {
        Triviality::ChannelInvariant
    } else {
        Triviality::Nontrivial
    };
    Ok(CommonFreezingReport {
        initial: *n0,
        channel: kind,
        l1: freeze_verdict(&l1, CLOSED_FORM_TOL),
        re: freeze_verdict(&re, CLOSED_FORM_TOL),
        triviality,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CommonFreezingSummary {
    pub samples: usize,
    pub l1_frozen: usize,
    pub re_frozen: usize,
    pub trivial_common: usize,
    pub nontrivial_common: usize,
    pub counterexamples: Vec<BlochVector>,
}

/// Randomized scan over Bloch vectors. Half of the samples have `n2 = 0`
/// and a quarter of those are also incoherent or channel-invariant, so all
/// classes are exercised.
pub fn common_freezing_scan(kind: ChannelKind, samples: usize, seed: u64) -> Result<CommonFreezingSummary> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut summary = CommonFreezingSummary {
        samples,
        l1_frozen: 0,
        re_frozen: 0,
        trivial_common: 0,
        nontrivial_common: 0,
        counterexamples: Vec::new(),
    };
    for i in 0..samples {
        let n = scan_bloch(&mut rng, i);
        let report = no_common_freezing_scan(&n, kind, &GridSpec::Count(51))?;
        summary.l1_frozen += usize::from(report.l1.frozen);
        summary.re_frozen += usize::from(report.re.frozen);
        if report.nontrivial_common_freeze() {
            summary.nontrivial_common += 1;
            summary.counterexamples.push(n);
        } else if report.both_frozen() {
            summary.trivial_common += 1;
        }
    }
    Ok(summary)
}

fn scan_bloch(rng: &mut impl Rng, i: usize) -> BlochVector {
    loop {
        let mut v: [f64; 3] = [rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)];
        match i % 8 {
            0 | 2 | 4 => v[1] = 0.0,
            6 => v = [0.0, 0.0, v[2]],
            7 => v = [v[0], 0.0, 0.0],
            _ => {}
        }
        if let Ok(b) = BlochVector::new(v[0], v[1], v[2]) {
            return b;
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Regime {
    /// `q < q*`: `|c3(q)| > |c1|`.
    BelowThreshold,
    AboveThreshold,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CoincidenceRow {
    pub q: f64,
    pub regime: Regime,
    pub c1: f64,
    pub c3: f64,
    pub trace: f64,
    pub bures: f64,
    pub relative_entropy: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CoincidenceReport {
    pub triple: M3Triple,
    pub q_star: f64,
    pub rows: Vec<CoincidenceRow>,
}

impl CoincidenceReport {
    pub fn regimes(&self) -> usize {
        let below = self.rows.iter().any(|r| r.regime == Regime::BelowThreshold);
        let above = self.rows.iter().any(|r| r.regime == Regime::AboveThreshold);
        usize::from(below) + usize::from(above)
    }
}

/// Distance-based coherence along bit flip noise for a two-qubit M3 state,
/// split at the threshold `q*`.
pub fn measure_coincidence_report(triple: &M3Triple, grid: &GridSpec, opts: &MinimizerOptions) -> Result<CoincidenceReport> {
    if triple.n_qubits != 2 {
        return Err(Error::QubitCount(triple.n_qubits, "coincidence report is for two qubits"));
    }
    let q_star = threshold_q_star(triple);
    let mut rows = Vec::new();
    for q in grid.points()? {
        let t = evolve_triple(triple, 1, q)?;
        let rho = m3_state(&t)?;
        let value = |m: Measure| -> Result<f64> { Ok(m.evaluate(&rho, Some(&t), opts)?.value) };
        rows.push(CoincidenceRow {
            q,
            regime: if q < q_star { Regime::BelowThreshold } else { Regime::AboveThreshold },
            c1: t.c1,
            c3: t.c3,
            trace: value(Measure::Tr)?,
            bures: value(Measure::D(crate::coherence::DistanceKind::Bures))?,
            relative_entropy: value(Measure::Re)?,
        });
    }
    Ok(CoincidenceReport { triple: *triple, q_star, rows })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coherence::DistanceKind;
    use crate::m3::freezing_triple;

    fn m3_desc(c1: f64, c2: C2Value, c3: f64, n: usize) -> StateDescriptor {
        StateDescriptor::M3(M3Descriptor { c1, c2, c3, n })
    }

    #[test]
    fn verdict_examples() {
        let v = freeze_verdict(&[0.3; 5], 1e-9);
        assert!(v.frozen && v.max_deviation == 0.0);
        let v = freeze_verdict(&[0.3, 0.3, f64::NAN], 1e-9);
        assert_eq!(v.status, FreezeStatus::Indeterminate);
        assert!(!v.frozen);
        let v = freeze_verdict(&[0.0, 0.1], 1e-9);
        assert_eq!(v.status, FreezeStatus::NotFrozen);
        assert!((v.max_deviation - 0.1).abs() < 1e-15);
        assert_eq!(freeze_verdict(&[], 1e-9).status, FreezeStatus::Indeterminate);
    }

    #[test]
    fn grid_validation() {
        assert_eq!(GridSpec::Count(3).points().unwrap(), vec![0.0, 0.5, 1.0]);
        assert!(GridSpec::Count(1).points().is_err());
        assert!(GridSpec::Points(vec![0.5, 0.2]).points().is_err());
        assert!(GridSpec::Points(vec![0.0, 1.2]).points().is_err());
        assert_eq!(GridSpec::default().points().unwrap().len(), 101);
    }

    #[test]
    fn descriptor_json() {
        let d: StateDescriptor = serde_json::from_str(r#"{"m3": {"c1": 0.25, "c2": "freeze", "c3": 0.25, "n": 2}}"#).unwrap();
        assert_eq!(d.m3().unwrap().unwrap().coeffs(), [0.25, -0.0625, 0.25]);
        let d: StateDescriptor = serde_json::from_str(r#"{"m3": {"c1": 0.25, "c2": "freeze", "c3": 0.25, "n": 3}}"#).unwrap();
        assert_eq!(d.m3().unwrap().unwrap().c2, -0.0625);
        let d: StateDescriptor = serde_json::from_str(r#"{"bloch": {"n1": 0.5, "n2": 0.0, "n3": 0.2}}"#).unwrap();
        assert_eq!(d.density().unwrap().dim(), 2);
        let d: StateDescriptor = serde_json::from_str(r#"{"matrix": {"re": [[0.5, 0.5], [0.5, 0.5]]}}"#).unwrap();
        assert!((c_l1(&d.density().unwrap()) - 1.0).abs() < 1e-15);
        let bad: StateDescriptor = serde_json::from_str(r#"{"m3": {"c1": 0.2, "c2": "thaw", "c3": 0.1, "n": 2}}"#).unwrap();
        assert!(bad.m3().is_err());
    }

    #[test]
    fn frozen_m3_sweep() {
        let spec = SweepSpec::new(
            m3_desc(0.25, C2Value::Keyword("freeze".into()), 0.25, 2),
            ChannelSpec::new(ChannelKind::BitFlip),
            vec![Measure::L1, Measure::Re, Measure::Tr, Measure::D(DistanceKind::Bures)],
        );
        let out = run_sweep(&spec).unwrap();
        assert_eq!(out.path, EvolutionPath::ClosedForm);
        for s in &out.series {
            assert!(s.verdict.frozen, "{:?} {:?}", s.measure, s.verdict);
            assert_eq!(s.values.len(), 101);
        }
        assert!((out.series[2].values[50] - 0.125).abs() < 1e-12);
    }

    #[test]
    fn single_qubit_l1_sweeps() {
        let run = |n: [f64; 3]| {
            let spec = SweepSpec::new(
                StateDescriptor::Bloch(BlochVector::new(n[0], n[1], n[2]).unwrap()),
                ChannelSpec::new(ChannelKind::BitFlip),
                vec![Measure::L1],
            );
            run_sweep(&spec).unwrap().series[0].clone()
        };
        let moving = run([0.5, 0.3, 0.2]);
        assert!(!moving.verdict.frozen);
        // off-diagonal modulus is sqrt(n1^2 + (1-q)^2 n2^2)
        for (i, v) in moving.values.iter().enumerate() {
            let q = i as f64 / 100.0;
            assert!((v - (0.25f64 + (1.0 - q).powi(2) * 0.09).sqrt()).abs() < 1e-12);
        }
        assert!(run([0.5, 0.0, 0.2]).verdict.frozen);
    }

    #[test]
    fn identity_channel_freezes_everything() {
        let spec = SweepSpec {
            grid: GridSpec::Count(11),
            probes: 2,
            ..SweepSpec::new(
                StateDescriptor::StandardForm(StandardFormState { x: [0.1, 0.2, 0.0], y: [0.0; 3], t: [0.3, -0.2, 0.1] }),
                ChannelSpec::new(ChannelKind::Identity),
                Measure::ALL.to_vec(),
            )
        };
        let out = run_sweep(&spec).unwrap();
        assert!(out.series.iter().all(|s| s.verdict.frozen), "{:?}", out.series.iter().map(|s| s.verdict).collect::<Vec<_>>());
    }

    #[test]
    fn closed_form_and_kraus_paths_agree() {
        for n in [2, 4] {
            let t = freezing_triple(0.3, -0.6, n).unwrap();
            let desc = m3_desc(t.c1, C2Value::Value(t.c2), t.c3, n);
            let spec = SweepSpec {
                grid: GridSpec::Count(11),
                probes: 0,
                ..SweepSpec::new(desc.clone(), ChannelSpec::new(ChannelKind::BitFlip), vec![Measure::L1, Measure::Re, Measure::Tr])
            };
            let closed = run_sweep(&spec).unwrap();
            let kraus = run_sweep_with(&spec, &Evolver::new(&desc, ChannelKind::BitFlip).unwrap().kraus_only()).unwrap();
            assert_eq!(kraus.path, EvolutionPath::Kraus);
            for (a, b) in closed.series.iter().zip(&kraus.series) {
                for (x, y) in a.values.iter().zip(&b.values) {
                    assert!((x - y).abs() <= 1e-10);
                }
            }
        }
    }

    #[test]
    fn values_independent_of_grid() {
        let desc = StateDescriptor::Bloch(BlochVector::new(0.3, 0.4, 0.1).unwrap());
        let mk = |grid| SweepSpec {
            grid,
            probes: 0,
            ..SweepSpec::new(desc.clone(), ChannelSpec::new(ChannelKind::AmplitudeDamping), vec![Measure::D(DistanceKind::Bures)])
        };
        let coarse = run_sweep(&mk(GridSpec::Count(3))).unwrap();
        let fine = run_sweep(&mk(GridSpec::Count(5))).unwrap();
        assert_eq!(coarse.series[0].values[1], fine.series[0].values[2]);
    }

    #[test]
    fn common_freezing_examples() {
        let grid = GridSpec::default();
        let r = no_common_freezing_scan(&BlochVector::new(0.5, 0.0, 0.2).unwrap(), ChannelKind::BitFlip, &grid).unwrap();
        assert!(r.l1.frozen && !r.re.frozen);
        let r = no_common_freezing_scan(&BlochVector::new(0.0, 0.0, 0.3).unwrap(), ChannelKind::BitFlip, &grid).unwrap();
        assert!(r.both_frozen() && r.triviality == Triviality::IncoherentInitial);
        let r = no_common_freezing_scan(&BlochVector::new(0.4, 0.0, 0.0).unwrap(), ChannelKind::BitFlip, &grid).unwrap();
        assert!(r.both_frozen() && r.triviality == Triviality::ChannelInvariant);
        let s = common_freezing_scan(ChannelKind::BitFlip, 64, 5).unwrap();
        assert_eq!(s.nontrivial_common, 0);
        assert!(s.trivial_common > 0 && s.l1_frozen > s.trivial_common);
    }

    #[test]
    fn coincidence_examples() {
        let opts = MinimizerOptions { restarts: 2, ..Default::default() };
        let t = freezing_triple(0.3, 0.9, 2).unwrap();
        let r = measure_coincidence_report(&t, &GridSpec::Count(11), &opts).unwrap();
        assert!((r.q_star - (1.0 - (1.0f64 / 3.0).sqrt())).abs() < 1e-12);
        assert_eq!(r.regimes(), 2);
        let first = &r.rows[0];
        assert!(r.rows.iter().all(|row| (row.trace - first.trace).abs() < 1e-9));
        assert!(r.rows.iter().all(|row| (row.bures - first.bures).abs() < 1e-5));
        let flat = measure_coincidence_report(&freezing_triple(0.4, 0.4, 2).unwrap(), &GridSpec::Count(5), &opts).unwrap();
        assert_eq!(flat.q_star, 0.0);
        assert_eq!(flat.regimes(), 1);
    }
}
