//! Coulomb-Sturmian functions and their overlap structure.
//!
//! `S_n(r) = [n!/Γ(n+2u+2)]^{1/2} (2ηr)^{u+1} e^{-ηr} L_n^{2u+1}(2ηr)`
//! solves `(-d²/dr² + η² + u(u+1)/r² - 2η(n+u+1)/r) S_n = 0` and is
//! biorthogonal to `S_m / r`. The quadrature and finite-difference helpers
//! here only validate those properties; the Green's-matrix path is analytic.

use gauss_quad::legendre::GaussLegendre;
use serde::{Deserialize, Serialize};
use statrs::function::gamma::gamma;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SturmianParams {
    eta: f64,
    u: f64,
}

impl SturmianParams {
    pub fn new(eta: f64, u: f64) -> Result<Self> {
        if !(eta.is_finite() && eta > 0.0) {
            return Err(Error::InvalidParameter(format!("eta must be positive, got {eta}")));
        }
        if !(u.is_finite() && u > -1.0) {
            return Err(Error::InvalidParameter(format!("u must exceed -1, got {u}")));
        }
        Ok(Self { eta, u })
    }

    pub fn eta(&self) -> f64 {
        self.eta
    }

    pub fn u(&self) -> f64 {
        self.u
    }
}

/// Generalized Laguerre polynomial `L_n^a(x)` by upward recurrence.
pub fn laguerre_general(n: usize, a: f64, x: f64) -> f64 {
    let mut prev = 1.0;
    if n == 0 {
        return prev;
    }
    let mut cur = 1.0 + a - x;
    for k in 2..=n {
        let k = k as f64;
        let next = ((2.0 * k - 1.0 + a - x) * cur - (k - 1.0 + a) * prev) / k;
        prev = cur;
        cur = next;
    }
    cur
}

/// `[Γ(n+1)/Γ(n+2u+2)]^{1/2}`.
///
/// Written as `Π_{k=1..n} k/(k+2u+1) / Γ(2u+2)` so that neither gamma
/// function is formed at large argument.
pub fn sturmian_norm(n: usize, u: f64) -> f64 {
    let s = 2.0 * u + 1.0;
    let ratio = (1..=n).fold(1.0, |acc, k| {
        let k = k as f64;
        acc * (k / (k + s))
    });
    (ratio / gamma(s + 1.0)).sqrt()
}

/// Coordinate-space Sturmian `S_n(r)` at `r > 0`.
pub fn sturmian_eval(n: usize, params: &SturmianParams, r: f64) -> Result<f64> {
    if !(r > 0.0) {
        return Err(Error::InvalidParameter(format!("radius must be positive, got {r}")));
    }
    let x = 2.0 * params.eta * r;
    let log_prefactor = (params.u + 1.0) * x.ln() - 0.5 * x;
    let value = sturmian_norm(n, params.u) * log_prefactor.exp() * laguerre_general(n, 2.0 * params.u + 1.0, x);
    if value.is_finite() {
        Ok(value)
    } else {
        Err(Error::NonFinite(format!("S_{n}({r})")))
    }
}

/// Analytic overlap `<n|m>` (unit weight); tridiagonal in `n, m`.
pub fn overlap_element(n: usize, m: usize, params: &SturmianParams) -> f64 {
    let u = params.u;
    let scale = 0.5 / params.eta;
    if n == m {
        let n = n as f64;
        scale * (2.0 * u + 2.0 * n + 2.0)
    } else if n.abs_diff(m) == 1 {
        // Both off-diagonal forms of the overlap reduce to this one with k = min(n, m).
        let k = n.min(m) as f64;
        -scale * ((k + 1.0) * (k + 2.0 * u + 2.0)).sqrt()
    } else {
        0.0
    }
}

/// Weight function in `∫ S_n(r) w(r) S_m(r) dr`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Weight {
    /// `w = 1/r`: the biorthogonality pairing, equal to `δ_nm`.
    InverseR,
    /// `w = 1`: the overlap matrix.
    Unit,
}

/// Composite Gauss-Legendre grid on `[0, r_max]`.
///
/// The first uniform panel is split geometrically toward the origin, where
/// the integrands behave like `r^{2u+1}`.
#[derive(Debug, Clone, PartialEq)]
pub struct RadialGrid {
    nodes: Vec<f64>,
    weights: Vec<f64>,
    r_max: f64,
    panels: usize,
    order: usize,
}

const ORIGIN_LEVELS: usize = 12;
const ORIGIN_RATIO: f64 = 0.2;

impl RadialGrid {
    pub fn gauss_legendre(r_max: f64, panels: usize, order: usize) -> Result<Self> {
        if !(r_max.is_finite() && r_max > 0.0) || panels == 0 {
            return Err(Error::InvalidParameter("grid needs r_max > 0 and at least one panel".into()));
        }
        let rule = GaussLegendre::new(order)
            .map_err(|_| Error::InvalidParameter(format!("Gauss-Legendre order must be >= 2, got {order}")))?;
        let width = r_max / panels as f64;
        let mut breaks = vec![0.0];
        breaks.extend((0..ORIGIN_LEVELS).rev().map(|k| width * ORIGIN_RATIO.powi(k as i32 + 1)));
        breaks.extend((1..=panels).map(|k| width * k as f64));

        let mut pairs: Vec<(f64, f64)> = Vec::with_capacity((breaks.len() - 1) * order);
        for w in breaks.windows(2) {
            let (a, b) = (w[0], w[1]);
            let half = 0.5 * (b - a);
            let mid = 0.5 * (b + a);
            pairs.extend(rule.as_node_weight_pairs().iter().map(|&(x, wt)| (mid + half * x, half * wt)));
        }
        pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
        let (nodes, weights) = pairs.into_iter().unzip();
        Ok(Self { nodes, weights, r_max, panels, order })
    }

    /// Grid wide enough for `∫ S_n w S_m` with `n, m ≤ n_max`.
    ///
    /// The integrand decays like `x^{2n_max+2u+2} e^{-x}` in `x = 2ηr`.
    pub fn for_sturmians(params: &SturmianParams, n_max: usize) -> Result<Self> {
        let power = 2.0 * n_max as f64 + 2.0 * params.u + 2.0;
        let x_max = 2.0 * power + 80.0;
        let r_max = x_max / (2.0 * params.eta);
        let panels = (x_max / 4.0).ceil() as usize;
        Self::gauss_legendre(r_max, panels, 24)
    }

    /// Same span with twice as many panels; used for residual estimates.
    pub fn refined(&self) -> Result<Self> {
        Self::gauss_legendre(self.r_max, 2 * self.panels, self.order)
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn r_max(&self) -> f64 {
        self.r_max
    }

    pub fn integrate<F: FnMut(f64) -> f64>(&self, mut f: F) -> f64 {
        self.nodes.iter().zip(&self.weights).map(|(&r, &w)| w * f(r)).sum()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureEstimate {
    pub value: f64,
    /// Difference between the grid and its refinement.
    pub residual: f64,
}

fn weighted_product(n: usize, m: usize, params: &SturmianParams, weight: Weight, grid: &RadialGrid) -> Result<f64> {
    let mut sum = 0.0;
    for (&r, &w) in grid.nodes().iter().zip(grid.weights()) {
        let f = sturmian_eval(n, params, r)? * sturmian_eval(m, params, r)?;
        sum += w * match weight {
            Weight::InverseR => f / r,
            Weight::Unit => f,
        };
    }
    Ok(sum)
}

/// Quadrature of `∫ S_n(r) w(r) S_m(r) dr`, checked against a refined grid.
pub fn overlap_numeric(
    n: usize,
    m: usize,
    params: &SturmianParams,
    weight: Weight,
    grid: &RadialGrid,
    tolerance: f64,
) -> Result<QuadratureEstimate> {
    let coarse = weighted_product(n, m, params, weight, grid)?;
    let fine = weighted_product(n, m, params, weight, &grid.refined()?)?;
    let residual = (fine - coarse).abs();
    if residual > tolerance {
        return Err(Error::QuadratureTolerance { residual, tolerance });
    }
    Ok(QuadratureEstimate { value: fine, residual })
}

/// Uniform grid for finite-difference checks.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UniformGrid {
    pub r_min: f64,
    pub r_max: f64,
    pub step: f64,
}

impl UniformGrid {
    pub fn new(r_min: f64, r_max: f64, step: f64) -> Result<Self> {
        if !(r_min > 0.0 && r_max > r_min && step > 0.0 && step < r_max - r_min) {
            return Err(Error::InvalidParameter(format!(
                "uniform grid needs 0 < r_min < r_max and 0 < step < span, got [{r_min}, {r_max}] step {step}"
            )));
        }
        Ok(Self { r_min, r_max, step })
    }

    pub fn points(&self) -> impl Iterator<Item = f64> + '_ {
        let count = ((self.r_max - self.r_min) / self.step).floor() as usize;
        (0..=count).map(move |k| self.r_min + k as f64 * self.step)
    }
}

/// Max residual of the Sturmian defining equation with the second derivative
/// taken by central differences, relative to `max |S_n|` on the grid.
pub fn sturmian_ode_residual(n: usize, params: &SturmianParams, grid: &UniformGrid) -> Result<f64> {
    let h = grid.step;
    let u = params.u;
    let eta = params.eta;
    let centrifugal = u * (u + 1.0);
    let energy_term = 2.0 * eta * (n as f64 + u + 1.0);
    let values: Vec<f64> = grid.points().map(|r| sturmian_eval(n, params, r)).collect::<Result<_>>()?;
    let amplitude = values.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
    if amplitude == 0.0 {
        return Err(Error::NonFinite("Sturmian vanishes on the whole grid".into()));
    }
    let residual = values
        .windows(3)
        .enumerate()
        .map(|(k, w)| {
            let r = grid.r_min + (k + 1) as f64 * h;
            let second = (w[0] - 2.0 * w[1] + w[2]) / (h * h);
            (-second + (eta * eta + centrifugal / (r * r) - energy_term / r) * w[1]).abs()
        })
        .fold(0.0_f64, f64::max);
    Ok(residual / amplitude)
}

#[cfg(test)]
#[allow(clippy::excessive_precision)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn laguerre_bases() {
        for &(a, x) in &[(0.0, 0.3), (1.7, 2.5), (-0.5, 10.0)] {
            assert_eq!(laguerre_general(0, a, x), 1.0);
            assert_eq!(laguerre_general(1, a, x), 1.0 + a - x);
        }
    }

    #[test]
    fn laguerre_against_series() {
        // Σ_k (-1)^k C(n+a, n-k) x^k / k! at 40 digits.
        assert_relative_eq!(laguerre_general(3, 0.5, 2.0), -0.89583333333333333333, max_relative = 1e-14);
    }

    #[test]
    fn sturmian_values() {
        let p = SturmianParams::new(1.0, 0.0).unwrap();
        assert_relative_eq!(sturmian_eval(0, &p, 1.0).unwrap(), 0.73575888234288464319, max_relative = 1e-14);

        let p = SturmianParams::new(2.0, 0.93).unwrap();
        assert_relative_eq!(sturmian_eval(5, &p, 3.0).unwrap(), 0.49841269620314496681, max_relative = 1e-12);

        let p = SturmianParams::new(1.0, 0.93).unwrap();
        assert_relative_eq!(sturmian_eval(50, &p, 40.0).unwrap(), -0.10930283780704381604, max_relative = 1e-10);
    }

    #[test]
    fn sturmian_vanishes_at_origin_like_power() {
        let p = SturmianParams::new(1.3, 0.4).unwrap();
        let a = sturmian_eval(2, &p, 1e-6).unwrap();
        let b = sturmian_eval(2, &p, 2e-6).unwrap();
        assert!(a.abs() < 1e-7);
        assert_relative_eq!(b / a, 2f64.powf(1.4), max_relative = 1e-5);
        assert!(sturmian_eval(0, &p, 0.0).is_err());
    }

    #[test]
    fn norm_stays_finite_for_large_index() {
        let p = SturmianParams::new(1.0, 0.5).unwrap();
        for n in [100, 170, 500] {
            assert!(sturmian_norm(n, 0.5).is_finite());
            assert!(sturmian_eval(n, &p, 10.0).unwrap().is_finite());
        }
    }

    #[test]
    fn overlap_elements() {
        let p = SturmianParams::new(0.5, 0.0).unwrap();
        assert_eq!(overlap_element(0, 0, &p), 2.0);
        assert_eq!(overlap_element(0, 2, &p), 0.0);
        let p = SturmianParams::new(1.3, 0.9).unwrap();
        let expected = -(2.0_f64 * (1.0 + 2.0 * 0.9 + 2.0)).sqrt() / (2.0 * 1.3);
        assert_relative_eq!(overlap_element(1, 2, &p), expected, max_relative = 1e-15);
        // 40-digit quadrature of ∫ S_1 S_2 dr.
        assert_relative_eq!(overlap_element(1, 2, &p), -1.1916871834484359647, max_relative = 1e-14);
    }

    #[test]
    fn quadrature_reproduces_biorthogonality() {
        let p = SturmianParams::new(1.0, 0.93).unwrap();
        let grid = RadialGrid::for_sturmians(&p, 4).unwrap();
        let diag = overlap_numeric(3, 3, &p, Weight::InverseR, &grid, 1e-10).unwrap();
        assert!((diag.value - 1.0).abs() < 1e-10);
        let off = overlap_numeric(0, 4, &p, Weight::InverseR, &grid, 1e-10).unwrap();
        assert!(off.value.abs() < 1e-10);
        let unit = overlap_numeric(2, 3, &p, Weight::Unit, &grid, 1e-10).unwrap();
        assert!((unit.value - overlap_element(2, 3, &p)).abs() < 1e-10);
    }

    #[test]
    fn coarse_grid_reports_residual() {
        let p = SturmianParams::new(1.0, 0.3).unwrap();
        let grid = RadialGrid::gauss_legendre(40.0, 1, 4).unwrap();
        assert!(matches!(
            overlap_numeric(6, 6, &p, Weight::InverseR, &grid, 1e-10),
            Err(Error::QuadratureTolerance { .. })
        ));
    }

    #[test]
    fn ode_residuals() {
        let p = SturmianParams::new(1.0, 0.0).unwrap();
        let grid = UniformGrid::new(0.1, 30.0, 1e-3).unwrap();
        assert!(sturmian_ode_residual(0, &p, &grid).unwrap() < 1e-5);

        // The centrifugal term makes the fourth derivative large near the origin.
        let p = SturmianParams::new(2.0, 0.93).unwrap();
        let grid = UniformGrid::new(0.3, 30.0, 1e-3).unwrap();
        assert!(sturmian_ode_residual(4, &p, &grid).unwrap() < 1e-4);
    }

    #[test]
    fn invalid_params() {
        assert!(SturmianParams::new(0.0, 0.0).is_err());
        assert!(SturmianParams::new(1.0, -1.0).is_err());
        assert!(UniformGrid::new(0.0, 1.0, 0.1).is_err());
    }
}
