//! Macronode teleportation gadgets.
//!
//! A single-mode gadget measures two homodyne angles `(θ_a, θ_b)` and teleports
//! its input through `V(θ_a, θ_b)` followed by a known displacement `D(μ)`.
//! The two-mode (quad-rail) gadget measures four angles and implements
//! `B₂₁ [V(θ_a,θ_b) ⊗ V(θ_c,θ_d)] B₁₂`, with the two outcome displacements mixed
//! by the output splitter. Outcome displacements are returned, never applied:
//! frame tracking belongs to the compiler.

use core::fmt;
use core::str::FromStr;

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::linalg::Matrix;
use crate::scalar::Scalar;
use crate::symplectic::GaussianOp;

/// `χ = arctan 2`, the angle offset of the phase and controlled-Z recipes.
pub const CHI: f64 = 1.107_148_717_794_090_4;

/// `|sin 2θ₋|` below which a gadget is rejected as degenerate.
pub const DEGENERACY_TOLERANCE: f64 = 1e-9;

/// `χ` in the requested precision.
pub fn chi<T: Scalar>() -> T {
    T::lit(2.0).atan()
}

/// Clifford gates with a single-step measurement recipe.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum LogicalGate {
    I,
    /// Fourier transform, logical Hadamard.
    F,
    /// Shear `P(+1)`, logical phase gate.
    PPlus,
    /// Shear `P(−1)`, logical phase gate.
    PMinus,
    CzPlus,
    CzMinus,
    Swap,
    /// `I ⊗ I` through the two-mode gadget.
    II,
    FF,
    PPlusPPlus,
    PMinusPMinus,
}

impl LogicalGate {
    pub const ALL: [LogicalGate; 11] = [
        Self::I,
        Self::F,
        Self::PPlus,
        Self::PMinus,
        Self::CzPlus,
        Self::CzMinus,
        Self::Swap,
        Self::II,
        Self::FF,
        Self::PPlusPPlus,
        Self::PMinusPMinus,
    ];

    /// Number of modes the gate acts on.
    pub fn arity(self) -> usize {
        match self {
            Self::I | Self::F | Self::PPlus | Self::PMinus => 1,
            _ => 2,
        }
    }

    /// Canonical name, matching the circuit-file `kind` strings.
    pub fn name(self) -> &'static str {
        match self {
            Self::I => "I",
            Self::F => "H",
            Self::PPlus => "P+",
            Self::PMinus => "P-",
            Self::CzPlus => "CZ+",
            Self::CzMinus => "CZ-",
            Self::Swap => "SWAP",
            Self::II => "II",
            Self::FF => "HH",
            Self::PPlusPPlus => "P+P+",
            Self::PMinusPMinus => "P-P-",
        }
    }

    /// The CV unitary the gate stands for.
    pub fn target_op<T: Scalar>(self) -> GaussianOp<T> {
        let one = T::one();
        let op = match self {
            Self::I => Ok(GaussianOp::identity(1)),
            Self::F => Ok(GaussianOp::fourier()),
            Self::PPlus => GaussianOp::shear(one),
            Self::PMinus => GaussianOp::shear(-one),
            Self::CzPlus => GaussianOp::controlled_z(one),
            Self::CzMinus => GaussianOp::controlled_z(-one),
            Self::Swap => Ok(swap()),
            Self::II => Ok(GaussianOp::identity(2)),
            Self::FF => GaussianOp::fourier().tensor(&GaussianOp::fourier()),
            Self::PPlusPPlus => GaussianOp::shear(one).and_then(|p| p.tensor(&p)),
            Self::PMinusPMinus => GaussianOp::shear(-one).and_then(|p| p.tensor(&p)),
        };
        op.expect("fixed gate parameters are valid")
    }
}

fn swap<T: Scalar>() -> GaussianOp<T> {
    let mut m = Matrix::zeros(4, 4);
    for (i, j) in [(0, 1), (1, 0), (2, 3), (3, 2)] {
        m[(i, j)] = T::one();
    }
    GaussianOp::new(m, vec![T::zero(); 4]).expect("permutation is symplectic")
}

impl fmt::Display for LogicalGate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for LogicalGate {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let g = match s.trim().to_ascii_uppercase().as_str() {
            "I" => Self::I,
            "H" | "F" => Self::F,
            "P+" | "P" | "P(+1)" => Self::PPlus,
            "P-" | "P(-1)" => Self::PMinus,
            "CZ+" | "CZ" | "CZ(+1)" => Self::CzPlus,
            "CZ-" | "CZ(-1)" => Self::CzMinus,
            "SWAP" => Self::Swap,
            "II" => Self::II,
            "HH" | "FF" => Self::FF,
            "P+P+" | "PP" => Self::PPlusPPlus,
            "P-P-" => Self::PMinusPMinus,
            _ => return Err(Error::UnsupportedGate(s.to_string())),
        };
        Ok(g)
    }
}

impl Serialize for LogicalGate {
    fn serialize<S: serde::Serializer>(&self, s: S) -> core::result::Result<S::Ok, S::Error> {
        s.serialize_str(self.name())
    }
}

impl<'de> Deserialize<'de> for LogicalGate {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> core::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Homodyne angles for one gadget: `(θ_a, θ_b)` or `(θ_a, θ_b, θ_c, θ_d)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum AngleSet<T> {
    OneMode([T; 2]),
    TwoMode([T; 4]),
}

impl<T: Scalar> AngleSet<T> {
    /// Validates finiteness and non-degeneracy of every measured pair.
    pub fn new(angles: &[T]) -> Result<Self> {
        if angles.iter().any(|a| !a.is_finite()) {
            return Err(invalid("angles must be finite"));
        }
        let set = match *angles {
            [a, b] => Self::OneMode([a, b]),
            [a, b, c, d] => Self::TwoMode([a, b, c, d]),
            _ => {
                return Err(invalid(format!(
                    "expected 2 or 4 angles, got {}",
                    angles.len()
                )))
            }
        };
        for (a, b) in set.pairs() {
            check_pair(a, b)?;
        }
        Ok(set)
    }

    pub fn arity(&self) -> usize {
        match self {
            Self::OneMode(_) => 1,
            Self::TwoMode(_) => 2,
        }
    }

    pub fn as_slice(&self) -> &[T] {
        match self {
            Self::OneMode(a) => a,
            Self::TwoMode(a) => a,
        }
    }

    /// Measured pairs `(θ_a, θ_b)` and, for two-mode sets, `(θ_c, θ_d)`.
    pub fn pairs(&self) -> Vec<(T, T)> {
        self.as_slice().chunks(2).map(|c| (c[0], c[1])).collect()
    }

    /// Gaussian unitary implemented with all outcomes zero.
    pub fn unitary(&self) -> Result<GaussianOp<T>> {
        match *self {
            Self::OneMode([a, b]) => v_gate(a, b),
            Self::TwoMode(angles) => two_mode_v(angles),
        }
    }
}

/// Homodyne outcomes of one measured pair, in quadrature units.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OutcomePair<T> {
    pub m_a: T,
    pub m_b: T,
}

impl<T: Scalar> OutcomePair<T> {
    pub fn new(m_a: T, m_b: T) -> Result<Self> {
        if !(m_a.is_finite() && m_b.is_finite()) {
            return Err(invalid("outcomes must be finite"));
        }
        Ok(Self { m_a, m_b })
    }

    pub fn zero() -> Self {
        Self {
            m_a: T::zero(),
            m_b: T::zero(),
        }
    }
}

fn check_pair<T: Scalar>(theta_a: T, theta_b: T) -> Result<T> {
    // sin 2θ₋ = sin(θ_a − θ_b)
    let s = (theta_a - theta_b).sin();
    if s.abs() < T::lit(DEGENERACY_TOLERANCE) {
        return Err(Error::DegenerateAngles {
            theta_a: theta_a.to_f64_lossy(),
            theta_b: theta_b.to_f64_lossy(),
            sin_two_minus: s.to_f64_lossy(),
        });
    }
    Ok(s)
}

/// `V(θ_a, θ_b) = R(θ₊ − π/2) S(tan θ₋) R(θ₊)` with `θ± = (θ_a ± θ_b)/2`.
pub fn v_gate<T: Scalar>(theta_a: T, theta_b: T) -> Result<GaussianOp<T>> {
    check_pair(theta_a, theta_b)?;
    let two = T::lit(2.0);
    let (tp, tm) = ((theta_a + theta_b) / two, (theta_a - theta_b) / two);
    GaussianOp::product(
        1,
        &[
            GaussianOp::rotation(tp - T::FRAC_PI_2())?,
            GaussianOp::squeeze(tm.tan())?,
            GaussianOp::rotation(tp)?,
        ],
    )
}

/// Shear form of the same gate: `R(θ_a − π/2) P[2 cot 2θ₋] R(θ_a − π/2)`.
pub fn v_gate_shear_form<T: Scalar>(theta_a: T, theta_b: T) -> Result<GaussianOp<T>> {
    let sin_two_minus = check_pair(theta_a, theta_b)?;
    let cot = (theta_a - theta_b).cos() / sin_two_minus;
    let r = GaussianOp::rotation(theta_a - T::FRAC_PI_2())?;
    GaussianOp::product(1, &[r.clone(), GaussianOp::shear(T::lit(2.0) * cot)?, r])
}

/// Outcome displacement amplitude `μ = (−m_a e^{iθ_b} − m_b e^{iθ_a}) / sin 2θ₋`.
pub fn outcome_displacement<T: Scalar>(
    out: OutcomePair<T>,
    theta_a: T,
    theta_b: T,
) -> Result<Complex<T>> {
    let s = check_pair(theta_a, theta_b)?;
    let num = -(Complex::from_polar(T::one(), theta_b) * out.m_a)
        - Complex::from_polar(T::one(), theta_a) * out.m_b;
    Ok(num / s)
}

/// Phase-space shift `(q, p)` of `D(μ)`: `(√2 Re μ, √2 Im μ)`.
pub fn amplitude_to_shift<T: Scalar>(mu: Complex<T>) -> [T; 2] {
    let r2 = T::SQRT_2();
    [r2 * mu.re, r2 * mu.im]
}

/// Two-mode gadget unitary `B₂₁ [V(θ_a,θ_b) ⊗ V(θ_c,θ_d)] B₁₂`.
pub fn two_mode_v<T: Scalar>(angles: [T; 4]) -> Result<GaussianOp<T>> {
    let [a, b, c, d] = angles;
    let v1 = v_gate(a, b)?;
    let v2 = v_gate(c, d)?;
    GaussianOp::product(
        2,
        &[
            GaussianOp::balanced_beamsplitter(1, 0)?,
            v1.tensor(&v2)?,
            GaussianOp::balanced_beamsplitter(0, 1)?,
        ],
    )
}

/// Output displacements of the two-mode gadget: `μ± = (μ_cd ± μ_ab)/√2`, on outputs 1 and 2.
pub fn two_mode_displacements<T: Scalar>(
    mu_ab: Complex<T>,
    mu_cd: Complex<T>,
) -> (Complex<T>, Complex<T>) {
    let k = T::FRAC_1_SQRT_2();
    ((mu_cd + mu_ab) * k, (mu_cd - mu_ab) * k)
}

/// Coherent-state outcomes after removing a balanced splitter: `α± = (α₁ ± α₂)/√2`.
pub fn heterodyne_postprocess<T: Scalar>(
    alpha_1: Complex<T>,
    alpha_2: Complex<T>,
) -> (Complex<T>, Complex<T>) {
    let k = T::FRAC_1_SQRT_2();
    ((alpha_1 + alpha_2) * k, (alpha_1 - alpha_2) * k)
}

/// Homodyne angles implementing `gate` in one hop.
pub fn angles_for<T: Scalar>(gate: LogicalGate) -> AngleSet<T> {
    let h = T::FRAC_PI_2();
    let q = T::FRAC_PI_4();
    let z = T::zero();
    let chi = chi::<T>();
    let three_q = T::lit(3.0) * q;
    match gate {
        LogicalGate::I => AngleSet::OneMode([h, z]),
        LogicalGate::F => AngleSet::OneMode([three_q, q]),
        LogicalGate::PPlus => AngleSet::OneMode([h, h - chi]),
        LogicalGate::PMinus => AngleSet::OneMode([h, h + chi]),
        LogicalGate::CzPlus => AngleSet::TwoMode([h, h + chi, h, h - chi]),
        LogicalGate::CzMinus => AngleSet::TwoMode([h, h - chi, h, h + chi]),
        LogicalGate::Swap => AngleSet::TwoMode([z, h, h, z]),
        LogicalGate::II => AngleSet::TwoMode([h, z, h, z]),
        LogicalGate::FF => AngleSet::TwoMode([three_q, q, three_q, q]),
        LogicalGate::PPlusPPlus => AngleSet::TwoMode([h, h - chi, h, h - chi]),
        LogicalGate::PMinusPMinus => AngleSet::TwoMode([h, h + chi, h, h + chi]),
    }
}

/// Every gate with its angles in radians.
pub fn table_one() -> Vec<(LogicalGate, Vec<f64>)> {
    LogicalGate::ALL
        .iter()
        .map(|&g| (g, angles_for::<f64>(g).as_slice().to_vec()))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use core::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI, SQRT_2};
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};

    type Op = GaussianOp<f64>;

    fn close(a: &Op, b: &Op) -> bool {
        a.distance(b).unwrap() < 1e-12
    }

    #[test]
    fn chi_is_arctan_two() {
        assert_eq!(CHI, 2.0f64.atan());
        assert_eq!(chi::<f64>(), CHI);
        assert!((CHI - 1.1071).abs() < 1e-4);
    }

    #[test]
    fn table_one_single_mode_rows() {
        assert!(close(&v_gate(FRAC_PI_2, 0.0).unwrap(), &Op::identity(1)));
        assert!(close(
            &v_gate(3.0 * FRAC_PI_4, FRAC_PI_4).unwrap(),
            &Op::fourier()
        ));
        assert!(close(
            &v_gate(FRAC_PI_2, FRAC_PI_2 - CHI).unwrap(),
            &Op::shear(1.0).unwrap()
        ));
        assert!(close(
            &v_gate_shear_form(FRAC_PI_2, FRAC_PI_2 - CHI).unwrap(),
            &Op::shear(1.0).unwrap()
        ));
    }

    #[test]
    fn table_one_two_mode_rows() {
        let cz = two_mode_v([FRAC_PI_2, FRAC_PI_2 + CHI, FRAC_PI_2, FRAC_PI_2 - CHI]).unwrap();
        assert!(close(&cz, &Op::controlled_z(1.0).unwrap()));
        let swap = two_mode_v([0.0, FRAC_PI_2, FRAC_PI_2, 0.0]).unwrap();
        let expect = Matrix::from_rows(&[
            [0.0, 1.0, 0.0, 0.0],
            [1.0, 0.0, 0.0, 0.0],
            [0.0, 0.0, 0.0, 1.0],
            [0.0, 0.0, 1.0, 0.0],
        ])
        .unwrap();
        assert!(swap.matrix().distance(&expect).unwrap() < 1e-12);
        let ff = two_mode_v([3.0 * FRAC_PI_4, FRAC_PI_4, 3.0 * FRAC_PI_4, FRAC_PI_4]).unwrap();
        assert!(close(&ff, &Op::fourier().tensor(&Op::fourier()).unwrap()));
    }

    #[test]
    fn every_table_row_round_trips() {
        for gate in LogicalGate::ALL {
            let set = angles_for::<f64>(gate);
            assert_eq!(set.arity(), gate.arity());
            let op = set.unitary().unwrap();
            assert!(op.distance(&gate.target_op()).unwrap() < 1e-12, "{gate}");
        }
    }

    #[test]
    fn table_rows_in_single_precision() {
        for gate in LogicalGate::ALL {
            let op = angles_for::<f32>(gate).unitary().unwrap();
            assert!(op.distance(&gate.target_op()).unwrap() < 1e-5, "{gate}");
        }
    }

    #[test]
    fn angles_for_literal_values() {
        assert_eq!(
            angles_for::<f64>(LogicalGate::I).as_slice(),
            &[FRAC_PI_2, 0.0]
        );
        assert_eq!(
            angles_for::<f64>(LogicalGate::CzMinus).as_slice(),
            &[FRAC_PI_2, FRAC_PI_2 - CHI, FRAC_PI_2, FRAC_PI_2 + CHI]
        );
        assert_eq!(
            angles_for::<f64>(LogicalGate::Swap).as_slice(),
            &[0.0, FRAC_PI_2, FRAC_PI_2, 0.0]
        );
    }

    #[test]
    fn degenerate_angles_rejected() {
        assert!(matches!(
            v_gate(0.3, 0.3),
            Err(Error::DegenerateAngles { .. })
        ));
        assert!(matches!(
            v_gate(0.3, 0.3 + PI),
            Err(Error::DegenerateAngles { .. })
        ));
        assert!(outcome_displacement(OutcomePair::zero(), 1.0, 1.0).is_err());
        assert!(two_mode_v([FRAC_PI_2, 0.0, 0.2, 0.2]).is_err());
        assert!(AngleSet::new(&[0.1, 0.1]).is_err());
        assert!(AngleSet::new(&[0.1, 0.2, 0.3]).is_err());
        assert!(AngleSet::new(&[FRAC_PI_2, 0.0]).is_ok());
    }

    #[test]
    fn outcome_displacement_values() {
        let mu = outcome_displacement(OutcomePair::zero(), FRAC_PI_2, 0.0).unwrap();
        assert_eq!(mu, Complex::new(0.0, 0.0));
        // m_a = 1: μ = −e^{i·0}/sin(π/2) = −1
        let mu = outcome_displacement(OutcomePair::new(1.0, 0.0).unwrap(), FRAC_PI_2, 0.0).unwrap();
        assert!((mu - Complex::new(-1.0, 0.0)).norm() < 1e-15);
        assert!(OutcomePair::new(f64::NAN, 0.0).is_err());
    }

    #[test]
    fn two_mode_displacement_values() {
        let z = Complex::new(0.0, 0.0);
        assert_eq!(two_mode_displacements(z, z), (z, z));
        let (p, m) = two_mode_displacements(Complex::new(1.0, 0.0), Complex::new(1.0, 0.0));
        assert!((p - Complex::new(SQRT_2, 0.0)).norm() < 1e-15 && m.norm() < 1e-15);
        let (p, m) = two_mode_displacements(Complex::new(0.0, 1.0), Complex::new(0.0, -1.0));
        // μ₊ = (−i + i)/√2 = 0, μ₋ = (−i − i)/√2 = −i√2
        assert!(p.norm() < 1e-15 && (m - Complex::new(0.0, -SQRT_2)).norm() < 1e-15);
    }

    #[test]
    fn heterodyne_values() {
        let z = Complex::new(0.0, 0.0);
        assert_eq!(heterodyne_postprocess(z, z), (z, z));
        let (p, m) = heterodyne_postprocess(Complex::new(1.0, 0.0), Complex::new(1.0, 0.0));
        assert!((p.re - SQRT_2).abs() < 1e-15 && m.norm() < 1e-15);
    }

    #[test]
    fn gate_names_round_trip() {
        for g in LogicalGate::ALL {
            assert_eq!(g.name().parse::<LogicalGate>().unwrap(), g);
        }
        assert_eq!("F".parse::<LogicalGate>().unwrap(), LogicalGate::F);
        assert_eq!("cz".parse::<LogicalGate>().unwrap(), LogicalGate::CzPlus);
        assert!(matches!(
            "T".parse::<LogicalGate>(),
            Err(Error::UnsupportedGate(_))
        ));
        let json = serde_json::to_string(&LogicalGate::PMinus).unwrap();
        assert_eq!(json, "\"P-\"");
        assert_eq!(
            serde_json::from_str::<LogicalGate>(&json).unwrap(),
            LogicalGate::PMinus
        );
    }

    #[test]
    fn standard_and_shear_forms_agree_on_1000_pairs() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        let mut checked = 0;
        while checked < 1000 {
            let a = rng.random_range(0.0..2.0 * PI);
            let b = rng.random_range(0.0..2.0 * PI);
            if (a - b).sin().abs() < 0.2 {
                continue;
            }
            let d = v_gate(a, b)
                .unwrap()
                .distance(&v_gate_shear_form(a, b).unwrap())
                .unwrap();
            assert!(d < 1e-12, "({a}, {b}): {d}");
            checked += 1;
        }
    }

    proptest! {
        #[test]
        fn outcome_displacement_is_linear(ma in -5.0..5.0f64, mb in -5.0..5.0f64,
                                          na in -5.0..5.0f64, nb in -5.0..5.0f64, k in -3.0..3.0f64) {
            let (ta, tb) = (FRAC_PI_2, FRAC_PI_2 - CHI);
            let f = |a, b| outcome_displacement(OutcomePair::new(a, b).unwrap(), ta, tb).unwrap();
            let lhs = f(ma + k * na, mb + k * nb);
            let rhs = f(ma, mb) + f(na, nb) * k;
            prop_assert!((lhs - rhs).norm() < 1e-12);
        }

        #[test]
        fn measurement_bases_are_pi_periodic(a in 0.0..6.0f64, b in 0.0..6.0f64) {
            prop_assume!((a - b).sin().abs() > 0.2);
            let x = v_gate(a, b).unwrap();
            let y = v_gate(a + PI, b + PI).unwrap();
            prop_assert!(x.distance(&y).unwrap() < 1e-12);
        }

        #[test]
        fn identical_pairs_disentangle(a in 0.0..6.0f64, b in 0.0..6.0f64) {
            prop_assume!((a - b).sin().abs() > 0.2);
            let op = two_mode_v([a, b, a, b]).unwrap();
            let v = v_gate(a, b).unwrap();
            prop_assert!(op.distance(&v.tensor(&v).unwrap()).unwrap() < 1e-12);
        }

        #[test]
        fn heterodyne_preserves_norm(a in -3.0..3.0f64, b in -3.0..3.0f64, c in -3.0..3.0f64, d in -3.0..3.0f64) {
            let (x, y) = (Complex::new(a, b), Complex::new(c, d));
            let (p, m) = heterodyne_postprocess(x, y);
            prop_assert!((p.norm_sqr() + m.norm_sqr() - x.norm_sqr() - y.norm_sqr()).abs() < 1e-12);
        }
    }
}
