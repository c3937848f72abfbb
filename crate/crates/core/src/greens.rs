//! Rank-N Green's matrices from the truncated Jacobi matrix and a
//! continued-fraction corner term.
//!
//! Indices are zero-based. For rank `N` the retained rows are `0..N`, and the
//! inverse of the leading `N×N` block of the Green's matrix is the truncated
//! Jacobi matrix with one correction at `(N-1, N-1)`:
//!
//! ```text
//! (G^(N))⁻¹ = H[0..N, 0..N] + e_{N-1} e_{N-1}ᵀ · H(N-1, N) · F_N
//! F_N = -a_N / (b_N + a_{N+1} / (b_{N+1} + ...))
//! ```
//!
//! with `a_i`, `b_i` from [`JacobiOperator::cf_coefficients`]. Written with
//! one-based indices this is the familiar form with corner `(N, N)`,
//! coupling `H(N, N+1)` and the fraction starting at `a_{N+1}`.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::jacobi::JacobiOperator;
use crate::model::EnergyPoint;
use crate::Scalar;

const TINY: f64 = 1e-300;

/// Condition estimate above which the inverse Green's matrix is treated as singular.
pub const CONDITION_FLOOR: f64 = 1e13;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CfOptions {
    pub tol: f64,
    pub max_terms: usize,
}

impl Default for CfOptions {
    fn default() -> Self {
        Self { tol: 1e-15, max_terms: 1_000_000 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CfResult<T> {
    pub value: T,
    pub terms_used: usize,
    /// `|Δ - 1|` of the last Lentz correction factor.
    pub residual: f64,
    pub converged: bool,
}

/// Evaluates `-a_k / (b_k + a_{k+1} / (b_{k+1} + ...))` with `k = first`
/// by the modified Lentz method.
///
/// `coeffs(i)` yields `(a_i, b_i)`.
pub fn continued_fraction<T, F>(mut coeffs: F, first: usize, options: &CfOptions) -> Result<CfResult<T>>
where
    T: Scalar,
    F: FnMut(usize) -> Result<(T, T)>,
{
    if !(options.tol > 0.0) || options.max_terms == 0 {
        return Err(Error::InvalidParameter("continued fraction needs tol > 0 and max_terms > 0".into()));
    }
    let tiny = T::from_real(TINY);
    let floor = |x: T| if x.modulus() < TINY { tiny } else { x };

    let (a0, b0) = coeffs(first)?;
    if a0 == T::zero() {
        return Ok(CfResult { value: T::zero(), terms_used: 1, residual: 0.0, converged: true });
    }
    let mut f = floor(b0);
    let mut c = f;
    let mut d = T::zero();
    // f tracks b_k + K(a_{k+1}/b_{k+1}); the leading numerator is applied at the end.
    let mut residual = f64::INFINITY;
    for term in 1..options.max_terms {
        let (a, b) = coeffs(first + term)?;
        d = floor(b + a * d);
        c = floor(b + a / c);
        d = d.recip();
        let delta = c * d;
        f *= delta;
        residual = (delta - T::one()).modulus();
        if residual < options.tol {
            return Ok(CfResult { value: -a0 / f, terms_used: term + 1, residual, converged: true });
        }
    }
    Err(Error::NonConvergence { terms_used: options.max_terms, residual })
}

/// Corner continued fraction `F_N` of the rank-`rank` inverse Green's matrix.
pub fn corner_fraction<T: Scalar>(op: &JacobiOperator<T>, rank: usize, options: &CfOptions) -> Result<CfResult<T>> {
    continued_fraction(
        |i| {
            let c = op.cf_coefficients(i)?;
            Ok((c.a, c.b))
        },
        rank,
        options,
    )
}

/// Inverse of the rank-`rank` leading block of the Green's matrix.
///
/// Returns the corner continued fraction alongside, or `None` when the
/// operator is diagonal and the truncation is already exact.
pub fn inverse_green_submatrix<T: Scalar>(
    op: &JacobiOperator<T>,
    rank: usize,
    options: &CfOptions,
) -> Result<(DMatrix<T>, Option<CfResult<T>>)> {
    if rank == 0 {
        return Err(Error::InvalidParameter("rank must be at least 1".into()));
    }
    let mut m = DMatrix::from_fn(rank, rank, |i, j| op.h_element(i, j));
    if op.is_diagonal() {
        return Ok((m, None));
    }
    let cf = corner_fraction(op, rank, options)?;
    let last = rank - 1;
    m[(last, last)] += op.upper(last) * cf.value;
    Ok((m, Some(cf)))
}

/// Rank-N Green's matrix at one energy.
#[derive(Debug, Clone, PartialEq)]
pub struct GreensResult<T: Scalar> {
    pub rank: usize,
    pub energy: EnergyPoint<T>,
    pub inverse_matrix: DMatrix<T>,
    pub green_matrix: DMatrix<T>,
    /// `None` when the operator is diagonal (`D = 0`).
    pub cf: Option<CfResult<T>>,
    pub det_inverse: T,
    /// 1-norm condition estimate of `inverse_matrix`.
    pub condition: f64,
}

fn one_norm<T: Scalar>(m: &DMatrix<T>) -> f64 {
    m.column_iter().map(|col| col.iter().map(|x| x.modulus()).sum::<f64>()).fold(0.0, f64::max)
}

pub fn green_matrix<T: Scalar>(op: &JacobiOperator<T>, rank: usize, options: &CfOptions) -> Result<GreensResult<T>> {
    let (inverse_matrix, cf) = inverse_green_submatrix(op, rank, options)?;
    let lu = inverse_matrix.clone().lu();
    let det_inverse = lu.determinant();
    let green = lu.try_inverse().ok_or(Error::NearSingular { condition: f64::INFINITY })?;
    let condition = one_norm(&inverse_matrix) * one_norm(&green);
    if !(condition <= CONDITION_FLOOR) {
        return Err(Error::NearSingular { condition });
    }
    // Symmetrize: both halves are the same analytic quantity.
    let green_matrix = (&green + green.transpose()).map(|x| x * T::from_real(0.5));
    Ok(GreensResult { rank, energy: op.energy(), inverse_matrix, green_matrix, cf, det_inverse, condition })
}

/// Leading `rank×rank` block of the inverse of the `size×size` truncated
/// Jacobi matrix. Converges to the Green's matrix block as `size` grows.
pub fn truncated_inverse_oracle<T: Scalar>(op: &JacobiOperator<T>, size: usize, rank: usize) -> Result<DMatrix<T>> {
    if rank == 0 || size < rank {
        return Err(Error::InvalidParameter(format!("oracle needs 1 <= rank <= size, got rank {rank}, size {size}")));
    }
    let lower: Vec<T> = (0..size - 1).map(|i| op.h_element(i + 1, i)).collect();
    let diag: Vec<T> = (0..size).map(|i| op.h_element(i, i)).collect();
    let upper: Vec<T> = (0..size - 1).map(|i| op.h_element(i, i + 1)).collect();
    let solver = TridiagonalLu::factor(&lower, &diag, &upper)?;
    let mut block = DMatrix::zeros(rank, rank);
    for j in 0..rank {
        let mut rhs = vec![T::zero(); size];
        rhs[j] = T::one();
        solver.solve_in_place(&mut rhs);
        for i in 0..rank {
            block[(i, j)] = rhs[i];
        }
    }
    Ok(block)
}

/// LU factorization of a tridiagonal matrix with partial pivoting.
struct TridiagonalLu<T> {
    // Row k of U holds u0[k] at column k, u1[k] at k+1, u2[k] at k+2.
    u0: Vec<T>,
    u1: Vec<T>,
    u2: Vec<T>,
    multipliers: Vec<T>,
    swapped: Vec<bool>,
}

impl<T: Scalar> TridiagonalLu<T> {
    fn factor(lower: &[T], diag: &[T], upper: &[T]) -> Result<Self> {
        let n = diag.len();
        let mut u0 = diag.to_vec();
        let mut u1: Vec<T> = upper.to_vec();
        u1.push(T::zero());
        let mut u2 = vec![T::zero(); n];
        let mut low: Vec<T> = lower.to_vec();
        let mut multipliers = vec![T::zero(); n.saturating_sub(1)];
        let mut swapped = vec![false; n.saturating_sub(1)];
        // Working copy of the next row: (low[k], u0[k+1], u1[k+1]).
        for k in 0..n.saturating_sub(1) {
            if low[k].modulus() > u0[k].modulus() {
                swapped[k] = true;
                let (r0, r1, r2) = (low[k], u0[k + 1], u1[k + 1]);
                let (s0, s1, s2) = (u0[k], u1[k], u2[k]);
                u0[k] = r0;
                u1[k] = r1;
                u2[k] = r2;
                low[k] = s0;
                u0[k + 1] = s1;
                u1[k + 1] = s2;
            }
            if u0[k] == T::zero() {
                return Err(Error::SingularTruncation);
            }
            let l = low[k] / u0[k];
            multipliers[k] = l;
            u0[k + 1] -= l * u1[k];
            u1[k + 1] -= l * u2[k];
        }
        if n == 0 || u0[n - 1] == T::zero() {
            return Err(Error::SingularTruncation);
        }
        Ok(Self { u0, u1, u2, multipliers, swapped })
    }

    fn solve_in_place(&self, x: &mut [T]) {
        let n = x.len();
        for k in 0..n - 1 {
            if self.swapped[k] {
                x.swap(k, k + 1);
            }
            let xk = x[k];
            x[k + 1] -= self.multipliers[k] * xk;
        }
        for k in (0..n).rev() {
            let mut s = x[k];
            if k + 1 < n {
                s -= self.u1[k] * x[k + 1];
            }
            if k + 2 < n {
                s -= self.u2[k] * x[k + 2];
            }
            x[k] = s / self.u0[k];
        }
    }
}
