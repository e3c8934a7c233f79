//! Monte Carlo sampling of Gaussian shift errors through gadgets and schedules.
//!
//! Shots are split into fixed-size batches. Batch `b` draws from a ChaCha8 stream
//! `b` of the configured seed, normals come from the ziggurat sampler in
//! `rand_distr`, and batch counters are summed as integers. Reports therefore do
//! not depend on the number of worker threads.

use core::fmt;
use core::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::compiler::{
    frame_update, logical_correction, DisplacementFrame, MeasurementSchedule, Pauli,
};
use crate::error::{invalid, Error, Result};
use crate::gadget::{LogicalGate, OutcomePair};
use crate::gkp::{error_threshold_exceeded, modular_decode, variance_from_db, SQRT_PI};

const BATCH: u64 = 1 << 14;
/// Seed offset for the homodyne-outcome stream, kept apart from the error stream.
const OUTCOME_SEED_OFFSET: u64 = 0x9e37_79b9_7f4a_7c15;

/// Per-quadrature decision rule of ideal error correction.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Decoder {
    /// Error iff `|s| > √π/2`.
    #[default]
    Threshold,
    /// Error iff `s` rounds to an odd multiple of `√π`.
    Modular,
}

impl Decoder {
    #[inline]
    pub fn is_error(self, shift: f64) -> bool {
        match self {
            Self::Threshold => error_threshold_exceeded(shift),
            Self::Modular => modular_decode(shift).logical_flip,
        }
    }
}

impl fmt::Display for Decoder {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Threshold => "threshold",
            Self::Modular => "modular",
        })
    }
}

impl FromStr for Decoder {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "threshold" => Ok(Self::Threshold),
            "modular" => Ok(Self::Modular),
            _ => Err(invalid(format!(
                "unknown decoder `{s}` (expected threshold or modular)"
            ))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SimConfig {
    pub delta_sq: f64,
    pub shots: u64,
    pub seed: u64,
    pub decoder: Decoder,
}

impl SimConfig {
    pub fn new(delta_sq: f64, shots: u64, seed: u64, decoder: Decoder) -> Result<Self> {
        let cfg = Self {
            delta_sq,
            shots,
            seed,
            decoder,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_db(db: f64, shots: u64, seed: u64, decoder: Decoder) -> Result<Self> {
        Self::new(variance_from_db(db)?, shots, seed, decoder)
    }

    fn validate(&self) -> Result<()> {
        if !(self.delta_sq > 0.0 && self.delta_sq.is_finite()) {
            return Err(invalid("delta_sq must be positive and finite"));
        }
        if self.shots == 0 {
            return Err(invalid("shots must be at least 1"));
        }
        Ok(())
    }
}

/// A count with its binomial rate and standard error `√(p(1−p)/shots)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub count: u64,
    pub rate: f64,
    pub stderr: f64,
}

impl Estimate {
    pub fn new(count: u64, shots: u64) -> Self {
        let rate = count as f64 / shots as f64;
        Self {
            count,
            rate,
            stderr: (rate * (1.0 - rate) / shots as f64).sqrt(),
        }
    }

    /// Distance to `p` in units of the standard error under `p`.
    pub fn z_score(&self, p: f64, shots: u64) -> f64 {
        let sd = (p * (1.0 - p) / shots as f64).sqrt();
        if sd == 0.0 {
            return if self.rate == p { 0.0 } else { f64::INFINITY };
        }
        (self.rate - p) / sd
    }
}

/// Statistics of one gate hop.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SimReport {
    pub config: SimConfig,
    pub gate: LogicalGate,
    /// Per-quadrature error events, ordered `(q₁.., p₁..)`.
    pub quadratures: Vec<Estimate>,
    /// Shots with at least one quadrature error.
    pub joint: Estimate,
}

/// Whether homodyne outcomes are all zero or sampled.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "mode")]
pub enum Outcomes {
    #[default]
    Zero,
    /// Independent `N(0, scale²)` outcomes, absorbed by the displacement frame.
    Random { scale: f64 },
}

/// Statistics of a whole schedule.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScheduleReport {
    pub config: SimConfig,
    pub outcomes: Outcomes,
    pub n_modes: usize,
    /// Shots with at least one quadrature error in each step.
    pub steps: Vec<Estimate>,
    /// `histogram[k]`: shots with errors in exactly `k` steps.
    pub histogram: Vec<u64>,
    /// Shots ending with a non-identity logical Pauli on any qubit.
    pub logical: Estimate,
}

fn batches(shots: u64) -> impl IndexedParallelIterator<Item = (u64, u64)> {
    let n = usize::try_from(shots.div_ceil(BATCH)).expect("batch count fits in usize");
    (0..n).into_par_iter().map(move |b| {
        let b = b as u64;
        (b, BATCH.min(shots - b * BATCH))
    })
}

fn stream(seed: u64, batch: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(batch);
    rng
}

#[inline]
fn normal(rng: &mut ChaCha8Rng, sd: f64) -> f64 {
    let z: f64 = rng.sample(StandardNormal);
    sd * z
}

/// `y = M x` for a row-major `d × d` matrix.
#[inline]
fn mat_vec(m: &[f64], x: &[f64], y: &mut [f64]) {
    let d = x.len();
    for (i, yi) in y.iter_mut().enumerate() {
        *yi = m[i * d..(i + 1) * d]
            .iter()
            .zip(x)
            .map(|(a, b)| a * b)
            .sum();
    }
}

fn flatten(m: &crate::linalg::Matrix<f64>) -> Vec<f64> {
    (0..m.rows())
        .flat_map(|i| (0..m.cols()).map(move |j| m[(i, j)]))
        .collect()
}

fn sum_counts(parts: Vec<Vec<u64>>, len: usize) -> Vec<u64> {
    parts.into_iter().fold(vec![0; len], |mut acc, p| {
        for (a, b) in acc.iter_mut().zip(p) {
            *a += b;
        }
        acc
    })
}

/// Samples `e ~ N(0, δ²I)`, applies the gate, blurs by `δ²I`, and decodes each quadrature.
pub fn simulate_gate(gate: LogicalGate, cfg: &SimConfig) -> Result<SimReport> {
    cfg.validate()?;
    let d = 2 * gate.arity();
    let s = flatten(gate.target_op::<f64>().matrix());
    let sd = cfg.delta_sq.sqrt();
    // counters: d per-quadrature, then joint
    let parts: Vec<Vec<u64>> = batches(cfg.shots)
        .map(|(b, n)| {
            let mut rng = stream(cfg.seed, b);
            let mut counts = vec![0u64; d + 1];
            let (mut e, mut out) = (vec![0.0; d], vec![0.0; d]);
            for _ in 0..n {
                e.iter_mut().for_each(|x| *x = normal(&mut rng, sd));
                mat_vec(&s, &e, &mut out);
                let mut any = false;
                for (j, o) in out.iter_mut().enumerate() {
                    *o += normal(&mut rng, sd);
                    if cfg.decoder.is_error(*o) {
                        counts[j] += 1;
                        any = true;
                    }
                }
                counts[d] += u64::from(any);
            }
            counts
        })
        .collect();
    let counts = sum_counts(parts, d + 1);
    Ok(SimReport {
        config: *cfg,
        gate,
        quadratures: counts[..d]
            .iter()
            .map(|&c| Estimate::new(c, cfg.shots))
            .collect(),
        joint: Estimate::new(counts[d], cfg.shots),
    })
}

struct PreparedStep {
    /// Global quadrature indices `(q_t.., p_t..)` of the step's targets.
    idx: Vec<usize>,
    /// Local gadget symplectic, row-major.
    mat: Vec<f64>,
    /// Integer image of the symplectic, acting on logical flips mod 2.
    parity: Vec<u8>,
    step: crate::compiler::ScheduleStep,
}

fn prepare(schedule: &MeasurementSchedule) -> Result<Vec<PreparedStep>> {
    let n = schedule.n_modes();
    schedule
        .steps()
        .iter()
        .map(|st| {
            let m = st.local_op()?.matrix().clone();
            let mat = flatten(&m);
            let mut parity = Vec::with_capacity(mat.len());
            for &x in &mat {
                let r = x.round();
                if (x - r).abs() > 1e-9 {
                    return Err(Error::InvalidSchedule(format!(
                        "macronode {} is not a Clifford gadget",
                        st.macronode
                    )));
                }
                parity.push((r as i64).rem_euclid(2) as u8);
            }
            let mut idx: Vec<usize> = st.targets.clone();
            idx.extend(st.targets.iter().map(|t| n + t));
            Ok(PreparedStep {
                idx,
                mat,
                parity,
                step: st.clone(),
            })
        })
        .collect()
}

/// Propagates shift errors through every step of `schedule`.
///
/// Per step and target mode: apply the gadget symplectic, blur by `δ²I`, decode
/// each quadrature, fold the decision into the logical Pauli frame, and restart
/// from a fresh `N(0, δ²)` spike. With [`Outcomes::Random`] the physical shift also
/// carries the outcome displacements; decoding and readout subtract the frame
/// maintained by [`frame_update`].
pub fn simulate_schedule(
    schedule: &MeasurementSchedule,
    cfg: &SimConfig,
    outcomes: Outcomes,
) -> Result<ScheduleReport> {
    cfg.validate()?;
    if schedule.steps().is_empty() {
        return Err(Error::InvalidSchedule("schedule has no steps".into()));
    }
    if let Outcomes::Random { scale } = outcomes {
        if !(scale > 0.0 && scale.is_finite()) {
            return Err(invalid("outcome scale must be positive and finite"));
        }
    }
    let n = schedule.n_modes();
    let steps = prepare(schedule)?;
    let n_steps = steps.len();
    let full_ops = match outcomes {
        Outcomes::Zero => Vec::new(),
        Outcomes::Random { .. } => steps
            .iter()
            .map(|p| p.step.op(n))
            .collect::<Result<Vec<_>>>()?,
    };
    let mut last_hop = vec![0; n];
    for (si, st) in steps.iter().enumerate() {
        for &t in &st.step.targets {
            last_hop[t] = si;
        }
    }
    let sd = cfg.delta_sq.sqrt();
    // counters: per step, histogram (n_steps + 1), logical
    let len = 2 * n_steps + 2;
    let parts: Vec<Result<Vec<u64>>> = batches(cfg.shots)
        .map(|(b, shots)| {
            let mut rng = stream(cfg.seed, b);
            let mut out_rng = stream(cfg.seed.wrapping_add(OUTCOME_SEED_OFFSET), b);
            let mut counts = vec![0u64; len];
            let mut phys = vec![0.0; 2 * n];
            let mut flips = vec![0u8; 2 * n];
            let (mut local, mut moved, mut bits) = (Vec::new(), Vec::new(), Vec::new());
            for _ in 0..shots {
                phys.iter_mut().for_each(|x| *x = normal(&mut rng, sd));
                flips.iter_mut().for_each(|k| *k = 0);
                let mut frame = DisplacementFrame::zero(n);
                let mut failed_steps = 0;
                for (si, st) in steps.iter().enumerate() {
                    let d = st.idx.len();
                    local.clear();
                    local.extend(st.idx.iter().map(|&i| phys[i]));
                    moved.resize(d, 0.0);
                    mat_vec(&st.mat, &local, &mut moved);
                    if let Outcomes::Random { scale } = outcomes {
                        let pairs: Vec<OutcomePair<f64>> = (0..st.step.arity)
                            .map(|_| {
                                OutcomePair::new(
                                    normal(&mut out_rng, scale),
                                    normal(&mut out_rng, scale),
                                )
                            })
                            .collect::<Result<_>>()?;
                        let mu = st.step.outcome_shift(&pairs, n)?;
                        for (m, &i) in moved.iter_mut().zip(&st.idx) {
                            *m += mu[i];
                        }
                        frame = frame_update(&frame, &full_ops[si], &mu)?;
                    }
                    bits.clear();
                    bits.extend(st.idx.iter().map(|&i| flips[i]));
                    let mut any = false;
                    for (r, m) in moved.iter_mut().enumerate() {
                        *m += normal(&mut rng, sd);
                        let i = st.idx[r];
                        let err = cfg.decoder.is_error(*m - frame.shift()[i]);
                        any |= err;
                        let carried = st.parity[r * d..(r + 1) * d]
                            .iter()
                            .zip(&bits)
                            .fold(0u8, |acc, (a, k)| acc ^ (a & k));
                        flips[i] = carried ^ u8::from(err);
                    }
                    for &i in &st.idx {
                        // after a mode's last hop the corrected state is read out as is
                        let fresh = if si < last_hop[i % n] {
                            normal(&mut rng, sd)
                        } else {
                            0.0
                        };
                        phys[i] = frame.shift()[i] + fresh;
                    }
                    if any {
                        counts[si] += 1;
                        failed_steps += 1;
                    }
                }
                counts[n_steps + failed_steps] += 1;
                // logical errors sit on the state as odd multiples of √π; read out against the frame
                let readout: Vec<f64> = phys
                    .iter()
                    .zip(frame.shift())
                    .zip(&flips)
                    .map(|((a, f), &k)| a + SQRT_PI * f64::from(k) - f)
                    .collect();
                let paulis = logical_correction(&DisplacementFrame::new(readout)?);
                let wrong = paulis.iter().any(|&p| p != Pauli::I);
                counts[len - 1] += u64::from(wrong);
            }
            Ok(counts)
        })
        .collect();
    let counts = sum_counts(parts.into_iter().collect::<Result<Vec<_>>>()?, len);
    Ok(ScheduleReport {
        config: *cfg,
        outcomes,
        n_modes: n,
        steps: counts[..n_steps]
            .iter()
            .map(|&c| Estimate::new(c, cfg.shots))
            .collect(),
        histogram: counts[n_steps..len - 1].to_vec(),
        logical: Estimate::new(counts[len - 1], cfg.shots),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::compiler::{compile, GateOp, LogicalCircuit};
    use crate::noise::{failure_prob_quadrature, gate_error_matrix};

    fn schedule(n: usize, gates: &[(LogicalGate, &[usize])]) -> MeasurementSchedule {
        let c = LogicalCircuit::new(n, gates.iter().map(|(k, t)| GateOp::new(*k, t)).collect())
            .unwrap();
        compile(&c).unwrap()
    }

    fn cfg(db: f64, shots: u64, seed: u64) -> SimConfig {
        SimConfig::from_db(db, shots, seed, Decoder::Threshold).unwrap()
    }

    #[test]
    fn config_validation() {
        assert!(SimConfig::new(0.0, 10, 0, Decoder::Modular).is_err());
        assert!(SimConfig::new(0.1, 0, 0, Decoder::Modular).is_err());
        assert_eq!("modular".parse::<Decoder>().unwrap(), Decoder::Modular);
        assert!("nearest".parse::<Decoder>().is_err());
    }

    #[test]
    fn marginals_track_error_matrix() {
        let c = cfg(10.0, 200_000, 1);
        let r = simulate_gate(LogicalGate::CzPlus, &c).unwrap();
        let eta = gate_error_matrix(LogicalGate::CzPlus, c.delta_sq).unwrap();
        for (est, v) in r.quadratures.iter().zip(eta.variances()) {
            let p = failure_prob_quadrature(v).unwrap();
            assert!(est.z_score(p, c.shots).abs() < 4.0, "{est:?} vs {p}");
        }
    }

    #[test]
    fn reports_are_reproducible() {
        let c = cfg(11.0, 50_000, 9);
        let a = simulate_gate(LogicalGate::PPlus, &c).unwrap();
        let b = simulate_gate(LogicalGate::PPlus, &c).unwrap();
        assert_eq!(
            serde_json::to_string(&a).unwrap(),
            serde_json::to_string(&b).unwrap()
        );
        let other = simulate_gate(LogicalGate::PPlus, &cfg(11.0, 50_000, 10)).unwrap();
        assert_ne!(a.joint.count, other.joint.count);
    }

    #[test]
    fn heavy_squeezing_has_no_errors() {
        let r = simulate_gate(LogicalGate::CzPlus, &cfg(30.0, 100_000, 2)).unwrap();
        assert_eq!(r.joint.count, 0);
    }

    #[test]
    fn single_identity_step_matches_gate() {
        let c = cfg(10.0, 100_000, 3);
        let g = simulate_gate(LogicalGate::I, &c).unwrap();
        let s = simulate_schedule(&schedule(1, &[]), &c, Outcomes::Zero).unwrap();
        assert_eq!(s.steps[0].count, g.joint.count);
        assert_eq!(s.histogram, vec![c.shots - g.joint.count, g.joint.count]);
    }

    #[test]
    fn random_outcomes_are_absorbed_by_the_frame() {
        let sched = schedule(
            2,
            &[
                (LogicalGate::F, &[0]),
                (LogicalGate::CzPlus, &[0, 1]),
                (LogicalGate::PPlus, &[1]),
            ],
        );
        let c = cfg(10.0, 20_000, 4);
        let zero = simulate_schedule(&sched, &c, Outcomes::Zero).unwrap();
        let random = simulate_schedule(&sched, &c, Outcomes::Random { scale: 1.0 }).unwrap();
        // common error samples: only floating-point rounding may differ
        for (a, b) in zero.steps.iter().zip(&random.steps) {
            assert!(a.count.abs_diff(b.count) <= 2);
        }
        assert!(zero.logical.count.abs_diff(random.logical.count) <= 2);
    }

    #[test]
    fn modular_decoder_never_exceeds_threshold_rate() {
        let t = simulate_gate(LogicalGate::I, &cfg(6.0, 50_000, 5)).unwrap();
        let m = simulate_gate(
            LogicalGate::I,
            &SimConfig {
                decoder: Decoder::Modular,
                ..cfg(6.0, 50_000, 5)
            },
        )
        .unwrap();
        assert!(m.joint.count <= t.joint.count);
    }

    #[test]
    fn non_clifford_schedule_rejected() {
        let step = crate::compiler::ScheduleStep {
            macronode: 0,
            arity: 1,
            angles_rad: vec![1.0, 0.2],
            targets: vec![0],
        };
        let s = MeasurementSchedule::new(vec![step]).unwrap();
        assert!(matches!(
            simulate_schedule(&s, &cfg(10.0, 10, 0), Outcomes::Zero),
            Err(Error::InvalidSchedule(_))
        ));
    }
}
