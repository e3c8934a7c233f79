//! Square-lattice GKP and qunaught states as phase-space shift lattices.

use serde::{Deserialize, Serialize};

use crate::error::{check_dim, invalid, Result};
use crate::linalg::Matrix;
use crate::symplectic::GaussianOp;

/// `√π`, the logical displacement length of the square GKP code.
pub const SQRT_PI: f64 = 1.772_453_850_905_516;
/// `√(2π)`, the qunaught lattice spacing.
pub const SQRT_2PI: f64 = 2.506_628_274_631_000_2;

const INTEGRALITY_TOLERANCE: f64 = 1e-9;

/// Finite-squeezing level, stored both as spike variance and decibels.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SqueezingSpec {
    pub delta_sq: f64,
    pub db: f64,
}

impl SqueezingSpec {
    pub fn from_variance(delta_sq: f64) -> Result<Self> {
        Ok(Self {
            delta_sq,
            db: db_from_variance(delta_sq)?,
        })
    }

    pub fn from_db(db: f64) -> Result<Self> {
        let delta_sq = variance_from_db(db)?;
        Ok(Self { delta_sq, db })
    }
}

/// `−10 log₁₀(2δ²)`: squeezing relative to the vacuum variance ½.
pub fn db_from_variance(delta_sq: f64) -> Result<f64> {
    if !(delta_sq > 0.0 && delta_sq.is_finite()) {
        return Err(invalid(format!(
            "variance must be positive and finite, got {delta_sq}"
        )));
    }
    Ok(-10.0 * (2.0 * delta_sq).log10())
}

/// Inverse of [`db_from_variance`].
pub fn variance_from_db(db: f64) -> Result<f64> {
    if !db.is_finite() {
        return Err(invalid(format!("dB value must be finite, got {db}")));
    }
    Ok(0.5 * 10f64.powf(-db / 10.0))
}

/// Per-quadrature error event used by the analytic rates: `|s| > √π/2`.
///
/// Shifts that wrap around to another stabilizer cell still count as errors.
pub fn error_threshold_exceeded(shift: f64) -> bool {
    shift.abs() > 0.5 * SQRT_PI
}

/// Outcome of binning a shift to the nearest logical lattice point.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BinResult {
    /// Nearest multiple of `√π`.
    pub correction: f64,
    /// Integer multiple of `√π` that was selected.
    pub multiple: i64,
    /// Odd multiple, i.e. a logical Pauli.
    pub logical_flip: bool,
}

/// Rounds a shift to the nearest multiple of `√π`.
pub fn modular_decode(shift: f64) -> BinResult {
    let k = (shift / SQRT_PI).round();
    BinResult {
        correction: k * SQRT_PI,
        multiple: k as i64,
        logical_flip: (k as i64).rem_euclid(2) == 1,
    }
}

/// Lattice of phase-space displacements in `(q₁..q_N, p₁..p_N)` ordering.
///
/// Basis vectors are the columns of a full-rank `2N × 2N` matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct ShiftLattice {
    n_modes: usize,
    basis: Matrix<f64>,
}

impl ShiftLattice {
    pub fn new(basis: Vec<Vec<f64>>) -> Result<Self> {
        let dim = basis.len();
        if dim == 0 || !dim.is_multiple_of(2) {
            return Err(invalid("a shift lattice needs 2N basis vectors"));
        }
        for v in &basis {
            check_dim(dim, v.len())?;
        }
        let m = Matrix::from_columns(&basis)?;
        Self::from_matrix(m)
    }

    fn from_matrix(basis: Matrix<f64>) -> Result<Self> {
        if !basis.is_square() || !basis.rows().is_multiple_of(2) || !basis.is_finite() {
            return Err(invalid("basis must be a finite 2N×2N matrix"));
        }
        if basis.solve(&Matrix::identity(basis.rows()))?.is_none() {
            return Err(invalid("basis vectors are linearly dependent"));
        }
        Ok(Self {
            n_modes: basis.rows() / 2,
            basis,
        })
    }

    pub fn n_modes(&self) -> usize {
        self.n_modes
    }

    /// Basis vectors as matrix columns.
    pub fn basis(&self) -> &Matrix<f64> {
        &self.basis
    }

    pub fn basis_vectors(&self) -> Vec<Vec<f64>> {
        (0..self.basis.cols())
            .map(|j| self.basis.column(j))
            .collect()
    }

    /// Image of the lattice when the state is transformed by `op`: `v ↦ S v`.
    pub fn transform(&self, op: &GaussianOp<f64>) -> Result<Self> {
        check_dim(self.n_modes, op.n_modes())?;
        Self::from_matrix(op.matrix().try_mul(&self.basis)?)
    }

    /// Lattice with every basis vector multiplied by `k`.
    pub fn scaled(&self, k: f64) -> Result<Self> {
        Self::from_matrix(self.basis.scale(k))
    }
}

/// Qunaught lattice: spacing `√(2π)` in every quadrature of `n` modes.
pub fn qunaught_lattice(n: usize) -> ShiftLattice {
    ShiftLattice::from_matrix(Matrix::identity(2 * n).scale(SQRT_2PI)).expect("diagonal basis")
}

/// Stabilizer lattice of an encoded Bell pair `(|00⟩ + |11⟩)/√2` on two square GKP modes.
pub fn gkp_bell_lattice() -> ShiftLattice {
    let s = SQRT_PI;
    ShiftLattice::new(vec![
        vec![s, s, 0.0, 0.0],
        vec![s, -s, 0.0, 0.0],
        vec![0.0, 0.0, s, s],
        vec![0.0, 0.0, s, -s],
    ])
    .expect("Bell basis is independent")
}

/// True iff each basis of one lattice is an integer combination of the other's.
pub fn lattices_equal(a: &ShiftLattice, b: &ShiftLattice) -> Result<bool> {
    check_dim(a.basis.rows(), b.basis.rows())?;
    Ok(contains(b, a)? && contains(a, b)?)
}

/// Whether every basis vector of `inner` lies in `outer`.
fn contains(outer: &ShiftLattice, inner: &ShiftLattice) -> Result<bool> {
    let Some(x) = outer.basis.solve(&inner.basis)? else {
        return Ok(false);
    };
    let integral = (0..x.rows()).all(|i| {
        (0..x.cols()).all(|j| {
            let c = x[(i, j)];
            (c - c.round()).abs() < INTEGRALITY_TOLERANCE
        })
    });
    Ok(integral)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn constants() {
        assert!((SQRT_PI - std::f64::consts::PI.sqrt()).abs() < 1e-15);
        assert!((SQRT_2PI - std::f64::consts::TAU.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn decibel_examples() {
        assert_eq!(db_from_variance(0.5).unwrap(), 0.0);
        assert!((db_from_variance(0.05).unwrap() - 10.0).abs() < 1e-12);
        assert!(db_from_variance(0.0).is_err());
        assert!(db_from_variance(-1.0).is_err());
        assert!(variance_from_db(f64::NAN).is_err());
        let s = SqueezingSpec::from_db(10.0).unwrap();
        assert!((s.delta_sq - 0.05).abs() < 1e-15);
    }

    #[test]
    fn threshold_examples() {
        assert!(!error_threshold_exceeded(0.0));
        assert!(error_threshold_exceeded(SQRT_PI / 2.0 + 1e-6));
        assert!(!error_threshold_exceeded(-0.8));
        assert!(error_threshold_exceeded(-1.0));
        assert!(error_threshold_exceeded(2.0 * SQRT_PI + 0.05));
    }

    #[test]
    fn modular_examples() {
        let r = modular_decode(0.1);
        assert_eq!((r.correction, r.logical_flip), (0.0, false));
        let r = modular_decode(SQRT_PI - 0.1);
        assert_eq!((r.multiple, r.logical_flip), (1, true));
        let r = modular_decode(2.0 * SQRT_PI + 0.05);
        assert_eq!((r.multiple, r.logical_flip), (2, false));
        assert!(modular_decode(-SQRT_PI).logical_flip);
    }

    #[test]
    fn bell_lattice_theorem() {
        let bs = GaussianOp::balanced_beamsplitter(0, 1).unwrap();
        let image = qunaught_lattice(2).transform(&bs).unwrap();
        assert!(lattices_equal(&image, &gkp_bell_lattice()).unwrap());
        assert!(!lattices_equal(&qunaught_lattice(2), &gkp_bell_lattice()).unwrap());
    }

    #[test]
    fn lattice_equality_basics() {
        let l = gkp_bell_lattice();
        assert!(lattices_equal(&l, &l).unwrap());
        assert!(!lattices_equal(&l.scaled(2.0).unwrap(), &l).unwrap());
        assert!(lattices_equal(&qunaught_lattice(1), &qunaught_lattice(2)).is_err());
        // a unimodular change of basis describes the same lattice
        let b = l.basis_vectors();
        let sum: Vec<f64> = b[0].iter().zip(&b[1]).map(|(x, y)| x + y).collect();
        let other = ShiftLattice::new(vec![sum, b[1].clone(), b[2].clone(), b[3].clone()]).unwrap();
        assert!(lattices_equal(&other, &l).unwrap());
    }

    #[test]
    fn rejects_dependent_basis() {
        assert!(ShiftLattice::new(vec![vec![1.0, 0.0], vec![2.0, 0.0]]).is_err());
        assert!(ShiftLattice::new(vec![vec![1.0, 0.0, 0.0]]).is_err());
    }

    proptest! {
        #[test]
        fn decibel_round_trip(v in 1e-6..10.0f64) {
            let back = variance_from_db(db_from_variance(v).unwrap()).unwrap();
            prop_assert!((back - v).abs() <= 1e-12 * v.max(1.0));
        }

        #[test]
        fn threshold_is_symmetric(s in -10.0..10.0f64) {
            prop_assert_eq!(error_threshold_exceeded(s), error_threshold_exceeded(-s));
        }

        #[test]
        fn decoders_agree_inside_cell(s in -0.886..0.886f64) {
            prop_assert!(!modular_decode(s).logical_flip);
            prop_assert!(!error_threshold_exceeded(s));
        }

        #[test]
        fn modular_residual_bounded(s in -20.0..20.0f64) {
            let r = modular_decode(s);
            prop_assert!((s - r.correction).abs() <= SQRT_PI / 2.0 + 1e-12);
        }
    }
}
