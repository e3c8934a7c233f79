//! Finite-squeezing noise: error matrices, blur, and logical gate-error rates.
//!
//! Every gadget hop blurs the spike of the incoming GKP state by `δ²I`. With an
//! input spike of variance `δ²` the error matrix entering ideal error correction
//! after gate `S` is `η = S (δ²I) Sᵀ + δ²I`. Each quadrature fails when its
//! marginal shift leaves `|s| ≤ √π/2`; rates multiply across quadratures, so
//! off-diagonal correlations are ignored.

use std::io::{BufRead, Write};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{check_dim, invalid, Error, Result};
use crate::gadget::LogicalGate;
use crate::gkp::{db_from_variance, variance_from_db};
use crate::linalg::Matrix;
use crate::scalar::Scalar;
use crate::symplectic::GaussianOp;

/// Squeezing bracket searched by [`required_squeezing`], in dB.
pub const SEARCH_BRACKET_DB: (f64, f64) = (0.0, 30.0);

const BISECTION_TOLERANCE: f64 = 1e-10;

/// Covariance of one Wigner spike, `(q₁.., p₁..)` ordering.
#[derive(Clone, Debug, PartialEq)]
pub struct ErrorMatrix<T> {
    mat: Matrix<T>,
}

impl<T: Scalar> ErrorMatrix<T> {
    /// Validates shape, symmetry and positive semidefiniteness.
    pub fn new(mat: Matrix<T>) -> Result<Self> {
        if !mat.is_square() || mat.rows() == 0 || !mat.rows().is_multiple_of(2) {
            return Err(invalid("error matrix must be 2N×2N"));
        }
        let scale = T::one().max(mat.max_abs());
        if !mat.is_finite() || !mat.is_symmetric(T::TOLERANCE * scale) {
            return Err(invalid("error matrix must be finite and symmetric"));
        }
        if mat.symmetric_eigenvalues()?[0] < -T::TOLERANCE * scale {
            return Err(invalid("error matrix is not positive semidefinite"));
        }
        Ok(Self { mat })
    }

    /// Ideal spike, the formal `0⁺` limit.
    pub fn zero(n_modes: usize) -> Self {
        Self {
            mat: Matrix::zeros(2 * n_modes, 2 * n_modes),
        }
    }

    /// `δ² I` on `n_modes` modes.
    pub fn isotropic(n_modes: usize, delta_sq: T) -> Result<Self> {
        blur(&Self::zero(n_modes), delta_sq)
    }

    pub fn dim(&self) -> usize {
        self.mat.rows()
    }

    pub fn n_modes(&self) -> usize {
        self.mat.rows() / 2
    }

    pub fn matrix(&self) -> &Matrix<T> {
        &self.mat
    }

    /// Spike variances of every quadrature.
    pub fn variances(&self) -> Vec<T> {
        self.mat.diagonal()
    }
}

/// Blur channel: `η + δ²I`.
pub fn blur<T: Scalar>(eta: &ErrorMatrix<T>, delta_sq: T) -> Result<ErrorMatrix<T>> {
    check_variance(delta_sq)?;
    let id = Matrix::identity(eta.dim()).scale(delta_sq);
    Ok(ErrorMatrix {
        mat: &eta.mat + &id,
    })
}

/// Error matrix after one gadget hop: `S η Sᵀ + δ²I`.
pub fn propagate<T: Scalar>(
    op: &GaussianOp<T>,
    eta_in: &ErrorMatrix<T>,
    delta_sq: T,
) -> Result<ErrorMatrix<T>> {
    check_dim(2 * op.n_modes(), eta_in.dim())?;
    let moved = ErrorMatrix {
        mat: op.matrix().congruence(&eta_in.mat)?,
    };
    blur(&moved, delta_sq)
}

/// Error matrix of `gate` with input spike `δ²I`.
pub fn gate_error_matrix<T: Scalar>(gate: LogicalGate, delta_sq: T) -> Result<ErrorMatrix<T>> {
    let input = ErrorMatrix::isotropic(gate.arity(), delta_sq)?;
    propagate(&gate.target_op(), &input, delta_sq)
}

/// Probability that a spike of variance `σ²` stays within `√π/2`: `erf(√(π/(8σ²)))`.
pub fn success_prob_quadrature<T: Scalar>(sigma_sq: T) -> Result<T> {
    Ok(T::one() - failure_prob_quadrature(sigma_sq)?)
}

/// Complement of [`success_prob_quadrature`], computed with `erfc` to keep small rates accurate.
pub fn failure_prob_quadrature<T: Scalar>(sigma_sq: T) -> Result<T> {
    check_variance(sigma_sq)?;
    Ok((T::PI() / (T::lit(8.0) * sigma_sq)).sqrt().erfc())
}

/// `1 − Π (1 − p_j)` over the diagonal spike variances of `eta`.
pub fn error_rate_from_matrix<T: Scalar>(eta: &ErrorMatrix<T>) -> Result<T> {
    let mut log_success = T::zero();
    for v in eta.variances() {
        log_success = log_success + (-failure_prob_quadrature(v)?).ln_1p();
    }
    Ok(-log_success.exp_m1())
}

/// Probability that at least one quadrature of `gate` suffers a logical error.
pub fn gate_error_rate<T: Scalar>(gate: LogicalGate, delta_sq: T) -> Result<T> {
    error_rate_from_matrix(&gate_error_matrix(gate, delta_sq)?)
}

/// [`gate_error_rate`] at a squeezing level given in dB.
pub fn gate_error_rate_db(gate: LogicalGate, db: f64) -> Result<f64> {
    gate_error_rate(gate, variance_from_db(db)?)
}

/// Squeezing in dB at which `gate` reaches the error rate `target`.
pub fn required_squeezing(gate: LogicalGate, target: f64) -> Result<f64> {
    if !(target > 0.0 && target < 1.0) {
        return Err(invalid(format!(
            "target error rate must lie in (0, 1), got {target}"
        )));
    }
    let (db_lo, db_hi) = SEARCH_BRACKET_DB;
    // error rate increases with δ², so low δ² is the high-dB end
    let (mut lo, mut hi) = (variance_from_db(db_hi)?, variance_from_db(db_lo)?);
    let f = |v: f64| gate_error_rate(gate, v).map(|p| p - target);
    if f(lo)? > 0.0 || f(hi)? < 0.0 {
        return Err(invalid(format!(
            "target {target} is not reached for {gate} between {db_lo} and {db_hi} dB"
        )));
    }
    while hi - lo > BISECTION_TOLERANCE {
        let mid = 0.5 * (lo + hi);
        if f(mid)? < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    db_from_variance(0.5 * (lo + hi))
}

/// One point of an error-rate curve.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub db: f64,
    pub gate: LogicalGate,
    pub p_err: f64,
}

/// Error-rate curves for `gates` on an even dB grid, ordered by dB then gate.
pub fn sweep(
    gates: &[LogicalGate],
    db_min: f64,
    db_max: f64,
    steps: usize,
) -> Result<Vec<SweepRow>> {
    if !(db_min.is_finite() && db_max.is_finite() && db_min < db_max) {
        return Err(invalid(format!("invalid dB range [{db_min}, {db_max}]")));
    }
    if steps < 2 {
        return Err(invalid("a sweep needs at least 2 steps"));
    }
    if gates.is_empty() {
        return Err(invalid("a sweep needs at least one gate"));
    }
    let width = db_max - db_min;
    (0..steps * gates.len())
        .into_par_iter()
        .map(|i| {
            let (k, g) = (i / gates.len(), i % gates.len());
            let db = if k == steps - 1 {
                db_max
            } else {
                db_min + width * k as f64 / (steps - 1) as f64
            };
            let gate = gates[g];
            Ok(SweepRow {
                db,
                gate,
                p_err: gate_error_rate_db(gate, db)?,
            })
        })
        .collect()
}

pub const CSV_HEADER: &str = "db,gate,p_err";

/// Writes sweep rows as CSV with 17 significant digits.
pub fn write_csv<W: Write>(rows: &[SweepRow], mut out: W) -> std::io::Result<()> {
    writeln!(out, "{CSV_HEADER}")?;
    for r in rows {
        writeln!(out, "{:.16e},{},{:.16e}", r.db, r.gate, r.p_err)?;
    }
    Ok(())
}

/// Parses the output of [`write_csv`].
pub fn read_csv<R: BufRead>(input: R) -> Result<Vec<SweepRow>> {
    let mut lines = input.lines();
    let header = lines
        .next()
        .transpose()
        .map_err(|e| Error::Serialization(e.to_string()))?;
    if header.as_deref().map(str::trim) != Some(CSV_HEADER) {
        return Err(Error::Serialization(format!(
            "expected header `{CSV_HEADER}`"
        )));
    }
    let mut rows = Vec::new();
    for (n, line) in lines.enumerate() {
        let line = line.map_err(|e| Error::Serialization(e.to_string()))?;
        if line.trim().is_empty() {
            continue;
        }
        let bad = || Error::Serialization(format!("malformed CSV row {}: `{line}`", n + 2));
        let fields: Vec<&str> = line.split(',').collect();
        let [db, gate, p_err] = fields[..] else {
            return Err(bad());
        };
        rows.push(SweepRow {
            db: db.parse().map_err(|_| bad())?,
            gate: gate.parse()?,
            p_err: p_err.parse().map_err(|_| bad())?,
        });
    }
    Ok(rows)
}

fn check_variance<T: Scalar>(v: T) -> Result<()> {
    if !(v > T::zero() && v.is_finite()) {
        return Err(invalid(format!(
            "variance must be positive and finite, got {v}"
        )));
    }
    Ok(())
}
