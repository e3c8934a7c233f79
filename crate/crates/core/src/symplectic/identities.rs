//! Registry of circuit identities checked numerically at the symplectic level.
//!
//! Exact identities compare both sides as affine maps. Bounce identities only
//! hold for ideal EPR pairs, so they are evaluated on two-mode squeezed pairs of
//! finite squeezing `r` and must decay like `e^{−2r}`.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{GaussianOp, GaussianState};
use crate::error::{invalid, Error, Result};
use crate::gadget::{outcome_displacement, two_mode_displacements, v_gate, OutcomePair};
use crate::linalg::Matrix;
use crate::scalar::Scalar;

/// Stable names of every registered identity.
pub const IDENTITY_NAMES: [&str; 10] = [
    "bloch-messiah",
    "vgate-equivalence",
    "cz-decomposition",
    "disentangle",
    "four-splitter",
    "bs-ldu",
    "bounce-cz",
    "bounce-cx",
    "bounce-bs",
    "two-mode-derivation",
];

/// Two-mode squeezing values at which bounce residuals are reported.
pub const BOUNCE_SQUEEZING: [f64; 3] = [2.0, 3.0, 4.0];

/// Smallest `|sin 2θ₋|` sampled for gadget angles; keeps entries O(10).
const MIN_SIN_TWO_MINUS: f64 = 0.2;

#[derive(Clone, Debug, PartialEq)]
pub struct IdentityReport<T> {
    pub name: String,
    /// Worst residual over all trials; for bounce identities, at the largest `r`.
    pub residual: T,
    pub trials: usize,
    /// Sampled parameters of the worst trial.
    pub parameters: BTreeMap<String, f64>,
    /// `(r, worst residual)` for bounce identities, empty otherwise.
    pub decay: Vec<(f64, T)>,
}

impl<T: Scalar> IdentityReport<T> {
    pub fn is_bounce(&self) -> bool {
        !self.decay.is_empty()
    }

    /// `residual(r_max) / residual(r_min)` for bounce identities.
    pub fn decay_ratio(&self) -> Option<T> {
        match (self.decay.first(), self.decay.last()) {
            (Some(&(_, lo)), Some(&(_, hi))) if self.decay.len() > 1 => Some(hi / lo),
            _ => None,
        }
    }
}

type Params = Vec<(&'static str, f64)>;

/// Samples parameters for `name` and returns the worst residual over `trials`.
pub fn verify_identity<T: Scalar>(
    name: &str,
    trials: usize,
    seed: u64,
) -> Result<IdentityReport<T>> {
    if !IDENTITY_NAMES.contains(&name) {
        return Err(Error::UnknownIdentity(name.to_string()));
    }
    if trials == 0 {
        return Err(invalid("trials must be at least 1"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let bounce = name.starts_with("bounce-");
    let mut worst: Option<(Vec<T>, Params)> = None;
    for _ in 0..trials {
        let (residuals, params) = run_trial::<T>(name, &mut rng)?;
        let key = |r: &[T]| *r.last().expect("residual");
        if worst.as_ref().is_none_or(|(w, _)| key(&residuals) > key(w)) {
            worst = Some((residuals, params));
        }
    }
    let (residuals, params) = worst.expect("trials >= 1");
    let decay = if bounce {
        BOUNCE_SQUEEZING
            .iter()
            .copied()
            .zip(residuals.iter().copied())
            .collect()
    } else {
        Vec::new()
    };
    Ok(IdentityReport {
        name: name.to_string(),
        residual: *residuals.last().expect("residual"),
        trials,
        parameters: params
            .into_iter()
            .map(|(k, v)| (k.to_string(), v))
            .collect(),
        decay,
    })
}

fn lit<T: Scalar>(v: f64) -> T {
    T::lit(v)
}

fn gadget_angles(rng: &mut ChaCha8Rng) -> (f64, f64) {
    loop {
        let a = rng.random_range(0.0..core::f64::consts::TAU);
        let b = rng.random_range(0.0..core::f64::consts::TAU);
        if (a - b).sin().abs() >= MIN_SIN_TWO_MINUS {
            return (a, b);
        }
    }
}

fn run_trial<T: Scalar>(name: &str, rng: &mut ChaCha8Rng) -> Result<(Vec<T>, Params)> {
    use core::f64::consts::FRAC_PI_2;
    type Op<T> = GaussianOp<T>;
    let half_pi: T = T::FRAC_PI_2();
    match name {
        "bloch-messiah" => {
            // θ₋ with |sin 2θ₋| ≥ MIN_SIN_TWO_MINUS
            let tm = loop {
                let t = rng.random_range(-FRAC_PI_2..FRAC_PI_2);
                if (2.0 * t).sin().abs() >= MIN_SIN_TWO_MINUS {
                    break t;
                }
            };
            let t: T = lit(tm);
            let two: T = lit(2.0);
            let lhs = Op::squeeze(t.tan())?;
            let rhs = Op::product(
                1,
                &[
                    Op::rotation(t)?,
                    Op::shear(two / (two * t).tan())?,
                    Op::rotation(t - half_pi)?,
                ],
            )?;
            Ok((vec![lhs.distance(&rhs)?], vec![("theta_minus", tm)]))
        }
        "vgate-equivalence" => {
            let (a, b) = gadget_angles(rng);
            let (ta, tb): (T, T) = (lit(a), lit(b));
            let two: T = lit(2.0);
            let (tp, tm) = ((ta + tb) / two, (ta - tb) / two);
            let standard = Op::product(
                1,
                &[
                    Op::rotation(tp - half_pi)?,
                    Op::squeeze(tm.tan())?,
                    Op::rotation(tp)?,
                ],
            )?;
            let sheared = Op::product(
                1,
                &[
                    Op::rotation(ta - half_pi)?,
                    Op::shear(two / (two * tm).tan())?,
                    Op::rotation(ta - half_pi)?,
                ],
            )?;
            Ok((
                vec![standard.distance(&sheared)?],
                vec![("theta_a", a), ("theta_b", b)],
            ))
        }
        "cz-decomposition" => {
            let g = rng.random_range(-3.0..3.0);
            let gt: T = lit(g);
            let rhs = Op::product(
                2,
                &[
                    Op::balanced_beamsplitter(1, 0)?,
                    Op::shear(-gt)?.tensor(&Op::shear(gt)?)?,
                    Op::balanced_beamsplitter(0, 1)?,
                ],
            )?;
            Ok((vec![Op::controlled_z(gt)?.distance(&rhs)?], vec![("g", g)]))
        }
        "disentangle" => {
            let (a, b) = gadget_angles(rng);
            let v = v_gate::<T>(lit(a), lit(b))?;
            let vv = v.tensor(&v)?;
            let lhs = Op::product(
                2,
                &[
                    Op::balanced_beamsplitter(1, 0)?,
                    vv.clone(),
                    Op::balanced_beamsplitter(0, 1)?,
                ],
            )?;
            Ok((
                vec![lhs.distance(&vv)?],
                vec![("theta_a", a), ("theta_b", b)],
            ))
        }
        "four-splitter" => {
            let th = rng.random_range(0.0..FRAC_PI_2);
            let t: T = lit(th);
            let b = |j, k| Op::beamsplitter(j, k, t, 4);
            let lhs = Op::product(4, &[b(3, 0)?, b(1, 2)?, b(0, 1)?, b(2, 3)?])?;
            let rhs = Op::product(4, &[b(0, 1)?, b(2, 3)?, b(3, 0)?, b(1, 2)?])?;
            Ok((vec![lhs.distance(&rhs)?], vec![("theta", th)]))
        }
        "bs-ldu" => {
            let th = rng.random_range(-1.2..1.2);
            let t: T = lit(th);
            let rhs = Op::product(
                2,
                &[
                    Op::controlled_x(0, 1, t.tan(), 2)?,
                    Op::squeeze(t.cos())?.tensor(&Op::squeeze(t.cos().recip())?)?,
                    Op::controlled_x(1, 0, -t.tan(), 2)?,
                ],
            )?;
            Ok((
                vec![Op::beamsplitter(0, 1, t, 2)?.distance(&rhs)?],
                vec![("theta", th)],
            ))
        }
        "bounce-cz" => {
            let g = rng.random_range(-2.0..2.0);
            let gt: T = lit(g);
            // C_Z on modes (2,4) ↔ C_Z on modes (1,3)
            let lhs = Op::controlled_z_on(1, 3, gt, 4)?;
            let rhs = Op::controlled_z_on(0, 2, gt, 4)?;
            Ok((bounce_residuals(&[(lhs, rhs)])?, vec![("g", g)]))
        }
        "bounce-cx" => {
            let g = rng.random_range(-2.0..2.0);
            let gt: T = lit(g);
            // C_X^{2→4}(g) ↔ C_X^{1→3}(−g)
            let lhs = Op::controlled_x(1, 3, gt, 4)?;
            let rhs = Op::controlled_x(0, 2, -gt, 4)?;
            Ok((bounce_residuals(&[(lhs, rhs)])?, vec![("g", g)]))
        }
        "bounce-bs" => {
            let th = rng.random_range(-1.2..1.2);
            let t: T = lit(th);
            let (tan, sec) = (t.tan(), t.cos().recip());
            // LDU factors of B_24(θ), each bounced onto modes (1,3).
            let factors = [
                (
                    Op::controlled_x(1, 3, tan, 4)?,
                    Op::controlled_x(0, 2, -tan, 4)?,
                ),
                (
                    Op::squeeze(sec.recip())?
                        .tensor(&Op::squeeze(sec)?)?
                        .embed(&[1, 3], 4)?,
                    Op::squeeze(sec)?
                        .tensor(&Op::squeeze(sec.recip())?)?
                        .embed(&[0, 2], 4)?,
                ),
                (
                    Op::controlled_x(3, 1, -tan, 4)?,
                    Op::controlled_x(2, 0, tan, 4)?,
                ),
            ];
            // The factors reassemble into B_24(θ) and, bounced and reversed, into B_31(θ).
            let lhs = Op::product(4, factors.iter().map(|(l, _)| l))?;
            let rhs = Op::product(4, factors.iter().rev().map(|(_, r)| r))?;
            let exact = lhs
                .distance(&Op::beamsplitter(1, 3, t, 4)?)?
                .max(rhs.distance(&Op::beamsplitter(2, 0, t, 4)?)?)
                .max(
                    bounce_residuals(&[(lhs, rhs)])?
                        .into_iter()
                        .fold(T::zero(), T::max),
                );
            let mut res = bounce_residuals(&factors)?;
            // An inexact reassembly must never hide behind decaying factor residuals.
            if exact > T::TOLERANCE * lit(1e3) {
                res.iter_mut().for_each(|r| *r = *r + exact);
            }
            Ok((res, vec![("theta", th)]))
        }
        "two-mode-derivation" => {
            let (a, b) = gadget_angles(rng);
            let (c, d) = gadget_angles(rng);
            let m: Vec<f64> = (0..4).map(|_| rng.random_range(-3.0..3.0)).collect();
            let (ta, tb, tc, td): (T, T, T, T) = (lit(a), lit(b), lit(c), lit(d));
            let mu_ab = outcome_displacement(OutcomePair::new(lit(m[0]), lit(m[1]))?, ta, tb)?;
            let mu_cd = outcome_displacement(OutcomePair::new(lit(m[2]), lit(m[3]))?, tc, td)?;
            let disp = |mu: num_complex::Complex<T>| {
                Op::displacement(crate::gadget::amplitude_to_shift(mu).to_vec())
            };
            let (v1, v2) = (v_gate(ta, tb)?, v_gate(tc, td)?);
            // Outcome displacements applied on each rail before the output splitter.
            let lhs = Op::product(
                2,
                &[
                    Op::balanced_beamsplitter(1, 0)?,
                    disp(mu_ab)?
                        .compose(&v1)?
                        .tensor(&disp(mu_cd)?.compose(&v2)?)?,
                    Op::balanced_beamsplitter(0, 1)?,
                ],
            )?;
            let (mu_plus, mu_minus) = two_mode_displacements(mu_ab, mu_cd);
            let rhs = Op::product(
                2,
                &[
                    disp(mu_plus)?.tensor(&disp(mu_minus)?)?,
                    Op::balanced_beamsplitter(1, 0)?,
                    v1.tensor(&v2)?,
                    Op::balanced_beamsplitter(0, 1)?,
                ],
            )?;
            Ok((
                vec![lhs.distance(&rhs)?],
                vec![
                    ("theta_a", a),
                    ("theta_b", b),
                    ("theta_c", c),
                    ("theta_d", d),
                    ("m_a", m[0]),
                    ("m_b", m[1]),
                    ("m_c", m[2]),
                    ("m_d", m[3]),
                ],
            ))
        }
        _ => Err(Error::UnknownIdentity(name.to_string())),
    }
}

/// Nullifier-projected distance between `L·ρ(r)` and `R·ρ(r)` for two EPR pairs.
///
/// The raw covariances diverge as `r → ∞`, so each output is tested against the
/// other's nullifiers (`q₁−q₂`, `q₃−q₄`, `p₁+p₂`, `p₃+p₄` pulled through the op).
/// Returns the worst over `pairs`, one entry per value in [`BOUNCE_SQUEEZING`].
fn bounce_residuals<T: Scalar>(pairs: &[(GaussianOp<T>, GaussianOp<T>)]) -> Result<Vec<T>> {
    let one = T::one();
    let mut nullifiers = Matrix::zeros(4, 8);
    for (row, (a, b, sign)) in [(0, 1, -one), (2, 3, -one), (4, 5, one), (6, 7, one)]
        .into_iter()
        .enumerate()
    {
        nullifiers[(row, a)] = one;
        nullifiers[(row, b)] = sign;
    }
    BOUNCE_SQUEEZING
        .iter()
        .map(|&r| {
            let st = GaussianState::epr_pairs(T::lit(r), 2);
            let mut worst = T::zero();
            for (l, rr) in pairs {
                let cov_l = l.apply(&st)?.cov().clone();
                let cov_r = rr.apply(&st)?.cov().clone();
                let diff = &cov_r - &cov_l;
                let nl = nullifiers.try_mul(l.inverse().matrix())?;
                let nr = nullifiers.try_mul(rr.inverse().matrix())?;
                let res =
                    nl.congruence(&diff)?.frobenius_norm() + nr.congruence(&diff)?.frobenius_norm();
                worst = worst.max(res);
            }
            Ok(worst)
        })
        .collect()
}
