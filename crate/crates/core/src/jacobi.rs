//! Jacobi-matrix elements of the radial operator on the Sturmian basis.
//!
//! With `k² = (E/ħc)² - μ²` and `D = (k² + η²)/(2η)`:
//!
//! ```text
//! H(n, n)   = 2αZE/ħc - 2(u+n+1)η + 2(u+n+1) D
//! H(n, n+1) = -D sqrt((n+1)(n+2u+2))
//! H(n+1, n) = H(n, n+1)
//! ```
//!
//! In atomic units, writing `E = m c² + ε`, these become
//! `k² = ε(2m + α²ε)` and `2αZE/ħc = 2Z(m + α²ε)`, which is how they are
//! evaluated here.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{Channel, EnergyPoint, PhysicalConstants};
use crate::Scalar;

/// Relative size of `k² + η²` below which `D` is treated as exactly zero.
const COUPLING_ZERO: f64 = 4.0 * f64::EPSILON;

/// The infinite Jacobi matrix of the radial operator at a fixed energy.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JacobiOperator<T: Scalar = f64> {
    channel: Channel,
    constants: PhysicalConstants,
    eta: f64,
    energy: EnergyPoint<T>,
    k2: T,
    coupling: T,
    coulomb: T,
    // 2(u+n+1) multiplies this in the diagonal: (k² - η²)/(2η) = D - η.
    diagonal_slope: T,
}

impl<T: Scalar> JacobiOperator<T> {
    pub fn new(channel: Channel, constants: PhysicalConstants, eta: f64, energy: EnergyPoint<T>) -> Result<Self> {
        if !(eta.is_finite() && eta > 0.0) {
            return Err(Error::InvalidParameter(format!("eta must be positive, got {eta}")));
        }
        let eps = energy.binding();
        let alpha2 = constants.alpha() * constants.alpha();
        let mass = T::from_real(constants.mass());
        let k2 = eps * (mass + mass + eps * T::from_real(alpha2));
        let eta_t = T::from_real(eta);
        let eta2 = T::from_real(eta * eta);
        let two_eta = T::from_real(2.0 * eta);
        let sum = k2 + eta2;
        let coupling = if sum.modulus() <= COUPLING_ZERO * eta * eta { T::zero() } else { sum / two_eta };
        let coulomb = T::from_real(2.0 * channel.z()) * (mass + eps * T::from_real(alpha2));
        let diagonal_slope = if coupling == T::zero() { -eta_t } else { (k2 - eta2) / two_eta };
        Ok(Self { channel, constants, eta, energy, k2, coupling, coulomb, diagonal_slope })
    }

    /// Operator at the binding energy `binding`.
    pub fn at_binding(channel: Channel, constants: PhysicalConstants, eta: f64, binding: T) -> Result<Self> {
        Self::new(channel, constants, eta, EnergyPoint::from_binding(binding, &constants))
    }

    pub fn channel(&self) -> &Channel {
        &self.channel
    }

    pub fn constants(&self) -> &PhysicalConstants {
        &self.constants
    }

    pub fn eta(&self) -> f64 {
        self.eta
    }

    pub fn energy(&self) -> EnergyPoint<T> {
        self.energy
    }

    /// `k² = (E/ħc)² - μ²`.
    pub fn k_squared(&self) -> T {
        self.k2
    }

    /// `D = (k² + η²)/(2η)`, the common factor of the off-diagonal elements.
    pub fn coupling(&self) -> T {
        self.coupling
    }

    /// True when `D = 0` and the matrix is diagonal.
    pub fn is_diagonal(&self) -> bool {
        self.coupling == T::zero()
    }

    pub fn diagonal(&self, n: usize) -> T {
        let ladder = T::from_real(2.0 * (self.channel.u() + n as f64 + 1.0));
        self.coulomb + ladder * self.diagonal_slope
    }

    /// `H(n, n+1)`.
    pub fn upper(&self, n: usize) -> T {
        let n = n as f64;
        let u = self.channel.u();
        -self.coupling * T::from_real(((n + 1.0) * (n + 2.0 * u + 2.0)).sqrt())
    }

    pub fn h_element(&self, n: usize, m: usize) -> T {
        if n == m {
            self.diagonal(n)
        } else if m == n + 1 {
            self.upper(n)
        } else if n == m + 1 {
            // -D sqrt(n(n+2u+1)) equals H(n-1, n).
            self.upper(m)
        } else {
            T::zero()
        }
    }

    /// Continued-fraction coefficients
    /// `a_i = -H(i, i-1)/H(i, i+1)`, `b_i = -H(i, i)/H(i, i+1)` for `i ≥ 1`.
    pub fn cf_coefficients(&self, i: usize) -> Result<CfCoefficients<T>> {
        if i == 0 {
            return Err(Error::InvalidParameter("continued-fraction index starts at 1".into()));
        }
        let upper = self.upper(i);
        if upper == T::zero() {
            return Err(Error::SingularCoefficient { index: i });
        }
        Ok(CfCoefficients { a: -self.upper(i - 1) / upper, b: -self.diagonal(i) / upper })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CfCoefficients<T> {
    pub a: T,
    pub b: T,
}
