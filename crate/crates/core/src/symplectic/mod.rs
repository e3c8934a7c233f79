//! Affine symplectic maps: the Heisenberg action of Gaussian unitaries.
//!
//! Quadratures are ordered `(q₁..q_N, p₁..p_N)`. A [`GaussianOp`] with matrix
//! `S` and shift `d` acts as `U†x̂U = S x̂ + d`, so operator products map to
//! matrix products in the same order: `compose(a, b)` is "apply `b`, then `a`".
//! Global phases are not representable and are dropped.

mod identities;
mod state;

pub use identities::{verify_identity, IdentityReport, BOUNCE_SQUEEZING, IDENTITY_NAMES};
pub use state::GaussianState;

use crate::error::{check_dim, invalid, Error, Result};
use crate::linalg::Matrix;
use crate::scalar::Scalar;

#[derive(Clone, Debug, PartialEq)]
pub struct GaussianOp<T> {
    n_modes: usize,
    matrix: Matrix<T>,
    shift: Vec<T>,
}

fn finite<T: Scalar>(name: &str, v: T) -> Result<T> {
    if v.is_finite() {
        Ok(v)
    } else {
        Err(invalid(format!("{name} must be finite, got {v}")))
    }
}

impl<T: Scalar> GaussianOp<T> {
    /// Wraps a matrix and shift, checking shapes and symplecticity.
    pub fn new(matrix: Matrix<T>, shift: Vec<T>) -> Result<Self> {
        if !matrix.is_square() || !matrix.rows().is_multiple_of(2) || matrix.rows() == 0 {
            return Err(invalid(format!(
                "matrix must be 2N×2N, got {}×{}",
                matrix.rows(),
                matrix.cols()
            )));
        }
        check_dim(matrix.rows(), shift.len())?;
        if !matrix.is_finite() || shift.iter().any(|v| !v.is_finite()) {
            return Err(invalid("non-finite entries"));
        }
        let op = Self {
            n_modes: matrix.rows() / 2,
            matrix,
            shift,
        };
        let residual = op.symplectic_residual();
        // Scale-aware: heavily squeezed maps carry large entries.
        let scale = T::one().max(op.matrix.max_abs() * op.matrix.max_abs());
        if residual > T::lit(1e3) * T::TOLERANCE * scale {
            return Err(invalid(format!(
                "matrix is not symplectic (residual {residual})"
            )));
        }
        Ok(op)
    }

    fn from_parts_unchecked(matrix: Matrix<T>, shift: Vec<T>) -> Self {
        Self {
            n_modes: matrix.rows() / 2,
            matrix,
            shift,
        }
    }

    fn linear(matrix: Matrix<T>) -> Self {
        let dim = matrix.rows();
        Self::from_parts_unchecked(matrix, vec![T::zero(); dim])
    }

    pub fn identity(n_modes: usize) -> Self {
        Self::linear(Matrix::identity(2 * n_modes))
    }

    /// Pure phase-space displacement by `shift`.
    pub fn displacement(shift: Vec<T>) -> Result<Self> {
        if shift.is_empty() || !shift.len().is_multiple_of(2) {
            return Err(invalid(
                "displacement vector must have even, nonzero length",
            ));
        }
        Self::new(Matrix::identity(shift.len()), shift)
    }

    /// Phase delay `R(θ)`: `q → q cos θ − p sin θ`, `p → p cos θ + q sin θ`.
    pub fn rotation(theta: T) -> Result<Self> {
        let theta = finite("rotation angle", theta)?;
        let (s, c) = theta.sin_cos();
        Ok(Self::linear(Matrix::from_rows(&[[c, -s], [s, c]])?))
    }

    /// Fourier transform `F = R(π/2)`.
    pub fn fourier() -> Self {
        Self::linear(
            Matrix::from_rows(&[[T::zero(), -T::one()], [T::one(), T::zero()]]).expect("2x2"),
        )
    }

    /// Squeezer `S(ζ)` with matrix `diag(ζ, 1/ζ)`; negative `ζ` carries the built-in π phase.
    pub fn squeeze(zeta: T) -> Result<Self> {
        let zeta = finite("squeezing factor", zeta)?;
        if zeta == T::zero() {
            return Err(invalid("squeezing factor must be nonzero"));
        }
        Ok(Self::linear(Matrix::from_diagonal(&[zeta, zeta.recip()])))
    }

    /// Momentum shear `P(σ)`: `p → p + σ q`.
    pub fn shear(sigma: T) -> Result<Self> {
        let sigma = finite("shear parameter", sigma)?;
        Ok(Self::linear(Matrix::from_rows(&[
            [T::one(), T::zero()],
            [sigma, T::one()],
        ])?))
    }

    /// Two-mode `C_Z(g)`: `p₁ → p₁ + g q₂`, `p₂ → p₂ + g q₁`.
    pub fn controlled_z(g: T) -> Result<Self> {
        Self::controlled_z_on(0, 1, g, 2)
    }

    /// `C_Z(g)` between modes `j` and `k` of an `n`-mode register.
    pub fn controlled_z_on(j: usize, k: usize, g: T, n: usize) -> Result<Self> {
        let g = finite("controlled-Z weight", g)?;
        check_pair(j, k, n)?;
        let mut m = Matrix::identity(2 * n);
        m[(n + j, k)] = g;
        m[(n + k, j)] = g;
        Ok(Self::linear(m))
    }

    /// Controlled-X with control `j` and target `k`: `q_k → q_k + g q_j`, `p_j → p_j − g p_k`.
    pub fn controlled_x(j: usize, k: usize, g: T, n: usize) -> Result<Self> {
        let g = finite("controlled-X weight", g)?;
        check_pair(j, k, n)?;
        let mut m = Matrix::identity(2 * n);
        m[(k, j)] = g;
        m[(n + j, n + k)] = -g;
        Ok(Self::linear(m))
    }

    /// Beam splitter `B_jk(θ)`, the same Givens rotation in both quadrature blocks:
    /// `x_j → cos θ x_j − sin θ x_k`, `x_k → cos θ x_k + sin θ x_j`. `θ = π/4` is balanced.
    pub fn beamsplitter(j: usize, k: usize, theta: T, n: usize) -> Result<Self> {
        let theta = finite("beam-splitter angle", theta)?;
        check_pair(j, k, n)?;
        let (s, c) = theta.sin_cos();
        let mut m = Matrix::identity(2 * n);
        for off in [0, n] {
            m[(j + off, j + off)] = c;
            m[(j + off, k + off)] = -s;
            m[(k + off, k + off)] = c;
            m[(k + off, j + off)] = s;
        }
        Ok(Self::linear(m))
    }

    /// Balanced beam splitter `B_jk` on a two-mode register.
    pub fn balanced_beamsplitter(j: usize, k: usize) -> Result<Self> {
        Self::beamsplitter(j, k, T::FRAC_PI_4(), 2)
    }

    #[inline]
    pub fn n_modes(&self) -> usize {
        self.n_modes
    }

    #[inline]
    pub fn matrix(&self) -> &Matrix<T> {
        &self.matrix
    }

    #[inline]
    pub fn shift(&self) -> &[T] {
        &self.shift
    }

    /// `‖Sᵀ Ω S − Ω‖_F`.
    pub fn symplectic_residual(&self) -> T {
        let omega = Matrix::omega(self.n_modes);
        let lhs = &(&self.matrix.transpose() * &omega) * &self.matrix;
        lhs.distance(&omega).expect("square")
    }

    pub fn is_symplectic(&self, tol: T) -> bool {
        self.symplectic_residual() < tol
    }

    /// "Apply `other`, then `self`": matrix `A·B`, shift `A·d_b + d_a`.
    pub fn compose(&self, other: &Self) -> Result<Self> {
        check_dim(self.n_modes, other.n_modes)?;
        let matrix = self.matrix.try_mul(&other.matrix)?;
        let shift = self
            .matrix
            .try_mul_vec(&other.shift)?
            .into_iter()
            .zip(&self.shift)
            .map(|(a, &b)| a + b)
            .collect();
        Ok(Self::from_parts_unchecked(matrix, shift))
    }

    /// Composes a sequence of ops, first element applied last (operator-product order).
    pub fn product<'a, I>(n_modes: usize, ops: I) -> Result<Self>
    where
        I: IntoIterator<Item = &'a Self>,
    {
        ops.into_iter()
            .try_fold(Self::identity(n_modes), |acc, op| acc.compose(op))
    }

    /// Inverse map, using `S⁻¹ = −Ω Sᵀ Ω`.
    pub fn inverse(&self) -> Self {
        let omega = Matrix::omega(self.n_modes);
        let inv = -&(&(&omega * &self.matrix.transpose()) * &omega);
        let shift = inv
            .try_mul_vec(&self.shift)
            .expect("square")
            .into_iter()
            .map(|v| -v)
            .collect();
        Self::from_parts_unchecked(inv, shift)
    }

    /// Places this op on `modes` of an `n`-mode register, identity elsewhere.
    pub fn embed(&self, modes: &[usize], n: usize) -> Result<Self> {
        check_dim(self.n_modes, modes.len())?;
        for (i, &m) in modes.iter().enumerate() {
            if m >= n {
                return Err(invalid(format!("mode {m} out of range for {n} modes")));
            }
            if modes[..i].contains(&m) {
                return Err(invalid(format!("duplicate mode {m}")));
            }
        }
        let k = self.n_modes;
        let index = |a: usize| if a < k { modes[a] } else { n + modes[a - k] };
        let mut m = Matrix::identity(2 * n);
        let mut shift = vec![T::zero(); 2 * n];
        for a in 0..2 * k {
            for b in 0..2 * k {
                m[(index(a), index(b))] = self.matrix[(a, b)];
            }
            shift[index(a)] = self.shift[a];
        }
        Ok(Self::from_parts_unchecked(m, shift))
    }

    /// `self ⊗ other`: `self` on the leading modes, `other` on the trailing ones.
    pub fn tensor(&self, other: &Self) -> Result<Self> {
        let n = self.n_modes + other.n_modes;
        let first: Vec<usize> = (0..self.n_modes).collect();
        let second: Vec<usize> = (self.n_modes..n).collect();
        self.embed(&first, n)?.compose(&other.embed(&second, n)?)
    }

    /// Heisenberg action on a state: mean `→ S·mean + d`, covariance `→ S·Σ·Sᵀ`.
    pub fn apply(&self, state: &GaussianState<T>) -> Result<GaussianState<T>> {
        check_dim(self.n_modes, state.n_modes())?;
        let mean = self
            .matrix
            .try_mul_vec(state.mean())?
            .into_iter()
            .zip(&self.shift)
            .map(|(a, &b)| a + b)
            .collect();
        let cov = self.matrix.congruence(state.cov())?;
        Ok(GaussianState::from_parts_unchecked(mean, cov))
    }

    /// Frobenius distance of matrices plus Euclidean distance of shifts.
    pub fn distance(&self, other: &Self) -> Result<T> {
        check_dim(self.n_modes, other.n_modes)?;
        let dm = self.matrix.distance(&other.matrix)?;
        let ds = self
            .shift
            .iter()
            .zip(&other.shift)
            .map(|(&a, &b)| (a - b) * (a - b))
            .sum::<T>()
            .sqrt();
        Ok(dm + ds)
    }

    pub fn cast<U: Scalar>(&self) -> GaussianOp<U> {
        GaussianOp {
            n_modes: self.n_modes,
            matrix: self.matrix.cast(),
            shift: self
                .shift
                .iter()
                .map(|v| U::lit(v.to_f64_lossy()))
                .collect(),
        }
    }
}

fn check_pair(j: usize, k: usize, n: usize) -> Result<()> {
    if j == k {
        return Err(invalid(format!(
            "two-mode gate needs distinct modes, got {j} twice"
        )));
    }
    if j >= n || k >= n {
        return Err(invalid(format!(
            "modes ({j}, {k}) out of range for {n} modes"
        )));
    }
    Ok(())
}

/// Free-function form of [`GaussianOp::compose`].
pub fn compose<T: Scalar>(a: &GaussianOp<T>, b: &GaussianOp<T>) -> Result<GaussianOp<T>> {
    a.compose(b)
}

/// Free-function form of [`GaussianOp::embed`].
pub fn embed<T: Scalar>(op: &GaussianOp<T>, modes: &[usize], n: usize) -> Result<GaussianOp<T>> {
    op.embed(modes, n)
}

/// Free-function form of [`GaussianOp::apply`].
pub fn apply<T: Scalar>(op: &GaussianOp<T>, state: &GaussianState<T>) -> Result<GaussianState<T>> {
    op.apply(state)
}

impl<T: Scalar> TryFrom<(Matrix<T>, Vec<T>)> for GaussianOp<T> {
    type Error = Error;

    fn try_from((m, s): (Matrix<T>, Vec<T>)) -> Result<Self> {
        Self::new(m, s)
    }
}
