//! Compilation of logical Clifford circuits into macronode measurement schedules,
//! plus the displacement frame that absorbs homodyne outcomes.
//!
//! Gates are layered as soon as possible. In each layer every qubit teleports once:
//! qubits without a gate get an identity gadget `{π/2, 0}`.

use core::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{check_dim, Error, Result};
use crate::gadget::{self, AngleSet, LogicalGate, OutcomePair};
use crate::gkp::modular_decode;
use crate::symplectic::GaussianOp;

/// One gate of a logical circuit.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GateOp {
    pub kind: LogicalGate,
    pub targets: Vec<usize>,
}

impl GateOp {
    pub fn new(kind: LogicalGate, targets: &[usize]) -> Self {
        Self {
            kind,
            targets: targets.to_vec(),
        }
    }
}

/// Ordered Clifford circuit over `n_qubits` GKP qubits.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawCircuit")]
pub struct LogicalCircuit {
    n_qubits: usize,
    gates: Vec<GateOp>,
}

#[derive(Deserialize)]
struct RawCircuit {
    n_qubits: usize,
    gates: Vec<GateOp>,
}

impl TryFrom<RawCircuit> for LogicalCircuit {
    type Error = Error;

    fn try_from(raw: RawCircuit) -> Result<Self> {
        Self::new(raw.n_qubits, raw.gates)
    }
}

impl LogicalCircuit {
    pub fn new(n_qubits: usize, gates: Vec<GateOp>) -> Result<Self> {
        if n_qubits == 0 {
            return Err(Error::InvalidCircuit(
                "a circuit needs at least one qubit".into(),
            ));
        }
        for (i, g) in gates.iter().enumerate() {
            check_targets(&g.targets, g.kind.arity(), n_qubits)
                .map_err(|msg| Error::InvalidCircuit(format!("gate {i} ({}): {msg}", g.kind)))?;
        }
        Ok(Self { n_qubits, gates })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn gates(&self) -> &[GateOp] {
        &self.gates
    }

    pub fn from_json(s: &str) -> Result<Self> {
        serde_json::from_str(s).map_err(|e| Error::InvalidCircuit(e.to_string()))
    }

    pub fn to_json(&self) -> Result<String> {
        serde_json::to_string_pretty(self).map_err(|e| Error::Serialization(e.to_string()))
    }

    /// CV unitary of the whole circuit, first gate applied first.
    pub fn target_op(&self) -> Result<GaussianOp<f64>> {
        let mut acc = GaussianOp::identity(self.n_qubits);
        for g in &self.gates {
            acc = g
                .kind
                .target_op()
                .embed(&g.targets, self.n_qubits)?
                .compose(&acc)?;
        }
        Ok(acc)
    }
}

fn check_targets(
    targets: &[usize],
    arity: usize,
    n_modes: usize,
) -> core::result::Result<(), String> {
    if targets.len() != arity {
        return Err(format!("expected {arity} target(s), got {}", targets.len()));
    }
    if let Some(t) = targets.iter().find(|&&t| t >= n_modes) {
        return Err(format!("target {t} out of range for {n_modes} mode(s)"));
    }
    if arity == 2 && targets[0] == targets[1] {
        return Err("targets must be distinct".into());
    }
    Ok(())
}

/// One macronode hop.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawStep")]
pub struct ScheduleStep {
    pub macronode: usize,
    pub arity: usize,
    pub angles_rad: Vec<f64>,
    pub targets: Vec<usize>,
}

#[derive(Deserialize)]
struct RawStep {
    macronode: usize,
    arity: usize,
    angles_rad: Vec<f64>,
    targets: Vec<usize>,
}

impl TryFrom<RawStep> for ScheduleStep {
    type Error = Error;

    fn try_from(raw: RawStep) -> Result<Self> {
        let step = ScheduleStep {
            macronode: raw.macronode,
            arity: raw.arity,
            angles_rad: raw.angles_rad,
            targets: raw.targets,
        };
        step.validate(usize::MAX)?;
        Ok(step)
    }
}

impl ScheduleStep {
    fn validate(&self, n_modes: usize) -> Result<()> {
        let bad =
            |msg: String| Error::InvalidSchedule(format!("macronode {}: {msg}", self.macronode));
        if !(self.arity == 1 || self.arity == 2) {
            return Err(bad(format!("arity must be 1 or 2, got {}", self.arity)));
        }
        if self.angles_rad.len() != 2 * self.arity {
            return Err(bad(format!(
                "arity {} needs {} angles",
                self.arity,
                2 * self.arity
            )));
        }
        check_targets(&self.targets, self.arity, n_modes).map_err(bad)?;
        AngleSet::new(&self.angles_rad).map_err(|e| bad(e.to_string()))?;
        Ok(())
    }

    pub fn angles(&self) -> Result<AngleSet<f64>> {
        AngleSet::new(&self.angles_rad)
    }

    /// Gadget unitary with zero outcomes, on the step's own modes.
    pub fn local_op(&self) -> Result<GaussianOp<f64>> {
        self.angles()?.unitary()
    }

    /// Gadget unitary embedded into `n_modes` modes.
    pub fn op(&self, n_modes: usize) -> Result<GaussianOp<f64>> {
        self.local_op()?.embed(&self.targets, n_modes)
    }

    /// Frame shift produced by the step's outcomes, on `n_modes` modes.
    ///
    /// `outcomes` holds one pair per measured pair: `(m_a, m_b)` and, for
    /// two-mode steps, `(m_c, m_d)`.
    pub fn outcome_shift(&self, outcomes: &[OutcomePair<f64>], n_modes: usize) -> Result<Vec<f64>> {
        let pairs = self.angles()?.pairs();
        check_dim(pairs.len(), outcomes.len())?;
        let mut mus = Vec::with_capacity(pairs.len());
        for (&(a, b), &out) in pairs.iter().zip(outcomes) {
            mus.push(gadget::outcome_displacement(out, a, b)?);
        }
        if let [ab, cd] = mus[..] {
            let (plus, minus) = gadget::two_mode_displacements(ab, cd);
            mus = vec![plus, minus];
        }
        let mut shift = vec![0.0; 2 * n_modes];
        for (&t, &mu) in self.targets.iter().zip(&mus) {
            let [q, p] = gadget::amplitude_to_shift(mu);
            shift[t] = q;
            shift[n_modes + t] = p;
        }
        Ok(shift)
    }
}

/// Ordered macronode steps.
#[derive(Clone, Debug, PartialEq, Default, Serialize, Deserialize)]
pub struct MeasurementSchedule {
    steps: Vec<ScheduleStep>,
}

impl MeasurementSchedule {
    pub fn new(steps: Vec<ScheduleStep>) -> Result<Self> {
        let sched = Self { steps };
        let n = sched.n_modes();
        for s in &sched.steps {
            s.validate(n)?;
        }
        Ok(sched)
    }

    pub fn steps(&self) -> &[ScheduleStep] {
        &self.steps
    }

    /// One past the largest addressed mode.
    pub fn n_modes(&self) -> usize {
        self.steps
            .iter()
            .flat_map(|s| s.targets.iter())
            .max()
            .map_or(0, |&m| m + 1)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let sched: Self =
            serde_json::from_str(s).map_err(|e| Error::InvalidSchedule(e.to_string()))?;
        Self::new(sched.steps)
    }

    pub fn to_json(&self) -> Result<String> {
        serde_json::to_string_pretty(self).map_err(|e| Error::Serialization(e.to_string()))
    }

    /// Composed zero-outcome unitary of all steps on `n_modes` modes.
    pub fn composed_op(&self, n_modes: usize) -> Result<GaussianOp<f64>> {
        if n_modes < self.n_modes() {
            return Err(Error::DimensionMismatch {
                expected: self.n_modes(),
                found: n_modes,
            });
        }
        let mut acc = GaussianOp::identity(n_modes);
        for s in &self.steps {
            acc = s.op(n_modes)?.compose(&acc)?;
        }
        Ok(acc)
    }
}

/// Compiles `circuit` into one gadget per qubit per layer.
pub fn compile(circuit: &LogicalCircuit) -> Result<MeasurementSchedule> {
    let n = circuit.n_qubits();
    let mut next_free = vec![0usize; n];
    let mut layered: Vec<Vec<&GateOp>> = Vec::new();
    for g in circuit.gates() {
        let layer = g.targets.iter().map(|&t| next_free[t]).max().unwrap_or(0);
        for &t in &g.targets {
            next_free[t] = layer + 1;
        }
        if layered.len() <= layer {
            layered.resize_with(layer + 1, Vec::new);
        }
        layered[layer].push(g);
    }
    if layered.is_empty() {
        layered.push(Vec::new());
    }

    let identity = gadget::angles_for::<f64>(LogicalGate::I);
    let mut steps = Vec::new();
    for (t, gates) in layered.iter().enumerate() {
        let mut busy = vec![false; n];
        let mut layer_steps = Vec::new();
        for g in gates {
            for &q in &g.targets {
                assert!(!busy[q], "qubit {q} scheduled twice in layer {t}");
                busy[q] = true;
            }
            layer_steps.push((&g.targets, gadget::angles_for::<f64>(g.kind)));
        }
        let idle: Vec<Vec<usize>> = (0..n).filter(|&q| !busy[q]).map(|q| vec![q]).collect();
        layer_steps.extend(idle.iter().map(|q| (q, identity)));
        layer_steps.sort_by_key(|(targets, _)| *targets.iter().min().expect("non-empty targets"));
        for (targets, angles) in layer_steps {
            steps.push(ScheduleStep {
                macronode: t * n + targets.iter().min().expect("non-empty targets"),
                arity: angles.arity(),
                angles_rad: angles.as_slice().to_vec(),
                targets: targets.clone(),
            });
        }
    }
    MeasurementSchedule::new(steps)
}

/// Frobenius distance between the scheduled and the circuit unitary.
pub fn verify_compilation(circuit: &LogicalCircuit, schedule: &MeasurementSchedule) -> Result<f64> {
    let n = circuit.n_qubits();
    schedule.composed_op(n)?.distance(&circuit.target_op()?)
}

/// Accumulated known displacement from measurement outcomes.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DisplacementFrame {
    shift: Vec<f64>,
}

impl DisplacementFrame {
    pub fn new(shift: Vec<f64>) -> Result<Self> {
        if !shift.len().is_multiple_of(2) || shift.iter().any(|s| !s.is_finite()) {
            return Err(Error::InvalidArgument(
                "frame must be a finite 2N vector".into(),
            ));
        }
        Ok(Self { shift })
    }

    pub fn zero(n_modes: usize) -> Self {
        Self {
            shift: vec![0.0; 2 * n_modes],
        }
    }

    pub fn shift(&self) -> &[f64] {
        &self.shift
    }

    pub fn n_modes(&self) -> usize {
        self.shift.len() / 2
    }
}

/// Moves the frame through one step: `f ↦ S f + μ_shifts`.
pub fn frame_update(
    frame: &DisplacementFrame,
    step_op: &GaussianOp<f64>,
    mu_shifts: &[f64],
) -> Result<DisplacementFrame> {
    check_dim(frame.shift.len(), 2 * step_op.n_modes())?;
    check_dim(frame.shift.len(), mu_shifts.len())?;
    let mut shift = step_op.matrix().try_mul_vec(&frame.shift)?;
    for (s, m) in shift.iter_mut().zip(mu_shifts) {
        *s += m;
    }
    DisplacementFrame::new(shift)
}

/// Single-qubit Pauli label.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    pub fn from_flips(x: bool, z: bool) -> Self {
        match (x, z) {
            (false, false) => Self::I,
            (true, false) => Self::X,
            (false, true) => Self::Z,
            (true, true) => Self::Y,
        }
    }
}

impl fmt::Display for Pauli {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Self::I => "I",
            Self::X => "X",
            Self::Y => "Y",
            Self::Z => "Z",
        };
        f.write_str(s)
    }
}

/// Logical Pauli per qubit: odd `√π` multiples in `q` give `X`, in `p` give `Z`.
pub fn logical_correction(frame: &DisplacementFrame) -> Vec<Pauli> {
    let n = frame.n_modes();
    (0..n)
        .map(|j| {
            Pauli::from_flips(
                modular_decode(frame.shift[j]).logical_flip,
                modular_decode(frame.shift[n + j]).logical_flip,
            )
        })
        .collect()
}
