use crate::error::{check_dim, invalid, Result};
use crate::linalg::Matrix;
use crate::scalar::Scalar;

/// Gaussian state: mean vector and Wigner covariance in `(q..., p...)` ordering.
///
/// Vacuum variance is ½ in each quadrature.
#[derive(Clone, Debug, PartialEq)]
pub struct GaussianState<T> {
    mean: Vec<T>,
    cov: Matrix<T>,
}

impl<T: Scalar> GaussianState<T> {
    /// Validates symmetry and the uncertainty principle `Σ + (i/2)Ω ⪰ 0`.
    pub fn new(mean: Vec<T>, cov: Matrix<T>) -> Result<Self> {
        if !cov.is_square() || !cov.rows().is_multiple_of(2) || cov.rows() == 0 {
            return Err(invalid("covariance must be 2N×2N"));
        }
        check_dim(cov.rows(), mean.len())?;
        let scale = T::one().max(cov.max_abs());
        if !cov.is_symmetric(T::TOLERANCE * scale) {
            return Err(invalid("covariance is not symmetric"));
        }
        let st = Self { mean, cov };
        let min_ev = st.min_uncertainty_eigenvalue()?;
        if min_ev < -T::lit(1e-10) * scale {
            return Err(invalid(format!(
                "covariance violates the uncertainty principle (eigenvalue {min_ev})"
            )));
        }
        Ok(st)
    }

    pub(crate) fn from_parts_unchecked(mean: Vec<T>, cov: Matrix<T>) -> Self {
        Self { mean, cov }
    }

    pub fn vacuum(n_modes: usize) -> Self {
        Self {
            mean: vec![T::zero(); 2 * n_modes],
            cov: Matrix::identity(2 * n_modes).scale(T::lit(0.5)),
        }
    }

    /// Two-mode squeezed vacuum, the finite-squeezing stand-in for an EPR pair.
    ///
    /// Diagonals `cosh(2r)/2`; `q₁q₂` correlation `+sinh(2r)/2`, `p₁p₂` correlation
    /// `−sinh(2r)/2`, so `q₁ − q₂` and `p₁ + p₂` have variance `e^{−2r}`.
    pub fn two_mode_squeezed(r: T) -> Self {
        Self::epr_pairs(r, 1)
    }

    /// `pairs` independent two-mode squeezed pairs on modes `(0,1), (2,3), …`.
    pub fn epr_pairs(r: T, pairs: usize) -> Self {
        let n = 2 * pairs;
        let two = T::lit(2.0);
        let c = (two * r).cosh() / two;
        let s = (two * r).sinh() / two;
        let mut cov = Matrix::zeros(2 * n, 2 * n);
        for p in 0..pairs {
            let (a, b) = (2 * p, 2 * p + 1);
            for (i, j) in [(a, a), (b, b), (n + a, n + a), (n + b, n + b)] {
                cov[(i, j)] = c;
            }
            cov[(a, b)] = s;
            cov[(b, a)] = s;
            cov[(n + a, n + b)] = -s;
            cov[(n + b, n + a)] = -s;
        }
        Self {
            mean: vec![T::zero(); 2 * n],
            cov,
        }
    }

    #[inline]
    pub fn n_modes(&self) -> usize {
        self.mean.len() / 2
    }

    #[inline]
    pub fn mean(&self) -> &[T] {
        &self.mean
    }

    #[inline]
    pub fn cov(&self) -> &Matrix<T> {
        &self.cov
    }

    /// Gaussian random-displacement channel: covariance `+ δ² I`, mean unchanged.
    pub fn blur(&self, delta_sq: T) -> Result<Self> {
        if delta_sq <= T::zero() || delta_sq.is_nan() {
            return Err(invalid("blur variance must be positive"));
        }
        let dim = self.cov.rows();
        Ok(Self {
            mean: self.mean.clone(),
            cov: &self.cov + &Matrix::identity(dim).scale(delta_sq),
        })
    }

    /// Smallest eigenvalue of the Hermitian matrix `Σ + (i/2)Ω`.
    ///
    /// Computed from the real symmetric embedding `[[Σ, −Ω/2], [Ω/2, Σ]]`, whose
    /// spectrum is that of the Hermitian matrix with every eigenvalue doubled up.
    pub fn min_uncertainty_eigenvalue(&self) -> Result<T> {
        let d = self.cov.rows();
        let half_omega = Matrix::omega(d / 2).scale(T::lit(0.5));
        let mut big = Matrix::zeros(2 * d, 2 * d);
        big.set_block(0, 0, &self.cov);
        big.set_block(d, d, &self.cov);
        big.set_block(0, d, &-&half_omega);
        big.set_block(d, 0, &half_omega);
        Ok(big.symmetric_eigenvalues()?[0])
    }
}
