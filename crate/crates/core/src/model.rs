//! Physical constants, channels, and closed-form reference spectra.
//!
//! Atomic units are used throughout: ħ = e = m_e = 1 and c = 1/α. Energies
//! are carried as binding energies `E - m c²` so that quantities such as
//! `(E/ħc)² - μ²` can be formed without cancelling the rest energy.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::Scalar;

/// Inverse fine-structure constant used by default.
pub const DEFAULT_INVERSE_ALPHA: f64 = 137.04;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhysicalConstants {
    alpha: f64,
    mass: f64,
}

impl PhysicalConstants {
    pub fn new(alpha: f64, mass: f64) -> Result<Self> {
        if !(alpha.is_finite() && alpha > 0.0) {
            return Err(Error::InvalidParameter(format!("alpha must be positive, got {alpha}")));
        }
        if !(mass.is_finite() && mass > 0.0) {
            return Err(Error::InvalidParameter(format!("mass must be positive, got {mass}")));
        }
        Ok(Self { alpha, mass })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn mass(&self) -> f64 {
        self.mass
    }

    /// Speed of light, `1/α`.
    pub fn c(&self) -> f64 {
        1.0 / self.alpha
    }

    /// Inverse reduced Compton wavelength `μ = m c / ħ`.
    pub fn mu(&self) -> f64 {
        self.mass / self.alpha
    }

    pub fn rest_energy(&self) -> f64 {
        self.mass / (self.alpha * self.alpha)
    }
}

impl Default for PhysicalConstants {
    fn default() -> Self {
        Self { alpha: 1.0 / DEFAULT_INVERSE_ALPHA, mass: 1.0 }
    }
}

/// Which of the two second-order Dirac spin states, `u₊` or `u₋`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Branch {
    Plus,
    Minus,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "equation", rename_all = "kebab-case")]
pub enum ChannelKind {
    KleinGordon { l: u32 },
    Dirac { two_j: u32, branch: Branch },
}

/// Effective angular parameter `u` of the radial operator.
///
/// Klein-Gordon: `u = -1/2 + sqrt(1/4 + l(l+1) - (Zα)²)`.
/// Second-order Dirac: `u± = -1/2 ∓ 1/2 + sqrt((j+1/2)² - (Zα)²)`.
pub fn effective_u(kind: ChannelKind, z: f64, alpha: f64) -> Result<f64> {
    let za = z * alpha;
    match kind {
        ChannelKind::KleinGordon { l } => {
            let l = f64::from(l);
            let arg = 0.25 + l * (l + 1.0) - za * za;
            if !(arg > 0.0) {
                return Err(Error::Supercritical { argument: arg });
            }
            Ok(arg.sqrt() - 0.5)
        }
        ChannelKind::Dirac { two_j, branch } => {
            if two_j % 2 == 0 {
                return Err(Error::InvalidParameter(format!("2j must be odd, got {two_j}")));
            }
            let gamma = dirac_gamma(two_j, za)?;
            Ok(match branch {
                Branch::Plus => gamma - 1.0,
                Branch::Minus => gamma,
            })
        }
    }
}

/// `sqrt((j+1/2)² - (Zα)²)`, factored to keep precision when Zα is small.
fn dirac_gamma(two_j: u32, za: f64) -> Result<f64> {
    let kappa = 0.5 * f64::from(two_j + 1);
    let arg = (kappa - za) * (kappa + za);
    if !(arg > 0.0) {
        return Err(Error::Supercritical { argument: arg });
    }
    Ok(arg.sqrt())
}

/// A physical configuration: nuclear charge, equation kind and the derived `u`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Channel {
    z: f64,
    kind: ChannelKind,
    u: f64,
}

impl Channel {
    pub fn new(z: f64, kind: ChannelKind, constants: &PhysicalConstants) -> Result<Self> {
        if !(z.is_finite() && z > 0.0) {
            return Err(Error::InvalidParameter(format!("nuclear charge must be positive, got {z}")));
        }
        if let ChannelKind::Dirac { two_j, .. } = kind {
            if two_j % 2 == 0 {
                return Err(Error::InvalidParameter(format!("2j must be odd, got {two_j}")));
            }
        }
        let u = effective_u(kind, z, constants.alpha())?;
        if !(u > -1.0) {
            return Err(Error::InvalidParameter(format!("u must exceed -1, got {u}")));
        }
        Ok(Self { z, kind, u })
    }

    pub fn klein_gordon(z: f64, l: u32, constants: &PhysicalConstants) -> Result<Self> {
        Self::new(z, ChannelKind::KleinGordon { l }, constants)
    }

    pub fn dirac(z: f64, two_j: u32, branch: Branch, constants: &PhysicalConstants) -> Result<Self> {
        Self::new(z, ChannelKind::Dirac { two_j, branch }, constants)
    }

    pub fn z(&self) -> f64 {
        self.z
    }

    pub fn kind(&self) -> ChannelKind {
        self.kind
    }

    pub fn u(&self) -> f64 {
        self.u
    }

    /// Closed-form bound-state energy of the `index`-th rung of this
    /// channel's Sturmian ladder: `m c² [1 + (Zα/(index + u + 1))²]^(-1/2)`.
    ///
    /// For the Dirac plus branch `index` is the Dirac radial quantum number;
    /// for the minus branch the same spectrum appears shifted by one rung.
    pub fn closed_form_energy(&self, index: u32, constants: &PhysicalConstants) -> EnergyPoint<f64> {
        let denom = f64::from(index) + self.u + 1.0;
        sommerfeld(self.z * constants.alpha(), denom, constants)
    }
}

fn sommerfeld(za: f64, denom: f64, constants: &PhysicalConstants) -> EnergyPoint<f64> {
    let x = za / denom;
    let x2 = x * x;
    let s = (1.0 + x2).sqrt();
    // m c² (1/s - 1) rewritten without the subtraction.
    let binding = -constants.rest_energy() * x2 / (s * (1.0 + s));
    EnergyPoint::from_binding(binding, constants)
}

/// Sommerfeld fine-structure energy of the Dirac-Coulomb problem.
pub fn dirac_energy_exact(
    z: f64,
    n_r: u32,
    two_j: u32,
    constants: &PhysicalConstants,
) -> Result<EnergyPoint<f64>> {
    if two_j.is_multiple_of(2) {
        return Err(Error::InvalidParameter(format!("2j must be odd, got {two_j}")));
    }
    let za = z * constants.alpha();
    let gamma = dirac_gamma(two_j, za)?;
    Ok(sommerfeld(za, f64::from(n_r) + gamma, constants))
}

/// Klein-Gordon Coulomb energy, `m c² [1 + (Zα/(n_r + u + 1))²]^(-1/2)`.
pub fn kg_energy_exact(z: f64, n_r: u32, l: u32, constants: &PhysicalConstants) -> Result<EnergyPoint<f64>> {
    let u = effective_u(ChannelKind::KleinGordon { l }, z, constants.alpha())?;
    Ok(sommerfeld(z * constants.alpha(), f64::from(n_r) + u + 1.0, constants))
}

/// Non-relativistic hydrogen-like level, `-Z²/(2n²)` Hartree.
pub fn schrodinger_energy(z: f64, n: u32) -> f64 {
    assert!(n >= 1, "principal quantum number must be positive");
    let n = f64::from(n);
    -z * z / (2.0 * n * n)
}

/// Total energy together with the rest energy it was measured against.
///
/// The binding part is the stored quantity; `total()` adds `m c²` back.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnergyPoint<T = f64> {
    binding: T,
    rest_energy: f64,
}

impl<T: Scalar> EnergyPoint<T> {
    pub fn from_binding(binding: T, constants: &PhysicalConstants) -> Self {
        Self { binding, rest_energy: constants.rest_energy() }
    }

    pub fn from_total(total: T, constants: &PhysicalConstants) -> Self {
        let rest_energy = constants.rest_energy();
        Self { binding: total - T::from_real(rest_energy), rest_energy }
    }

    pub fn binding(&self) -> T {
        self.binding
    }

    pub fn total(&self) -> T {
        self.binding + T::from_real(self.rest_energy)
    }

    pub fn rest_energy(&self) -> f64 {
        self.rest_energy
    }
}

const ORBITAL_LETTERS: &[u8] = b"SPDFGHIKLMNOQRTUVWXYZ";

/// Spectroscopic level such as `2P3/2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct LevelLabel {
    principal: u32,
    l: u32,
    two_j: u32,
}

impl LevelLabel {
    pub fn new(principal: u32, l: u32, two_j: u32) -> Result<Self> {
        if principal == 0 {
            return Err(Error::InvalidLabel("principal quantum number must be positive".into()));
        }
        if l >= principal {
            return Err(Error::InvalidLabel(format!("l = {l} requires n > {l}, got n = {principal}")));
        }
        if (2 * l).abs_diff(two_j) != 1 {
            return Err(Error::InvalidLabel(format!("2j = {two_j} incompatible with l = {l}")));
        }
        if (l as usize) >= ORBITAL_LETTERS.len() {
            return Err(Error::InvalidLabel(format!("no orbital letter for l = {l}")));
        }
        Ok(Self { principal, l, two_j })
    }

    pub fn principal(&self) -> u32 {
        self.principal
    }

    pub fn l(&self) -> u32 {
        self.l
    }

    pub fn two_j(&self) -> u32 {
        self.two_j
    }

    /// `n_r = n - (j + 1/2)`.
    pub fn radial_index(&self) -> u32 {
        self.principal - self.two_j.div_ceil(2)
    }

    pub fn orbital_letter(&self) -> char {
        ORBITAL_LETTERS[self.l as usize] as char
    }

    /// Orbital index of a spectroscopic letter (`S` → 0, `P` → 1, ...).
    pub fn l_from_letter(letter: char) -> Option<u32> {
        let upper = letter.to_ascii_uppercase() as u8;
        ORBITAL_LETTERS.iter().position(|&c| c == upper).map(|p| p as u32)
    }
}

impl fmt::Display for LevelLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}{}/2", self.principal, self.orbital_letter(), self.two_j)
    }
}

#[cfg(test)]
#[allow(clippy::excessive_precision)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn constants(inv_alpha: f64) -> PhysicalConstants {
        PhysicalConstants::new(1.0 / inv_alpha, 1.0).unwrap()
    }

    #[test]
    fn u_reduces_to_l_without_coupling() {
        let u = effective_u(ChannelKind::KleinGordon { l: 2 }, 1.0, 1e-12).unwrap();
        assert_relative_eq!(u, 2.0, epsilon = 1e-12);
        let minus = effective_u(ChannelKind::Dirac { two_j: 1, branch: Branch::Minus }, 1.0, 1e-12).unwrap();
        let plus = effective_u(ChannelKind::Dirac { two_j: 1, branch: Branch::Plus }, 1.0, 1e-12).unwrap();
        assert_relative_eq!(minus, 1.0, epsilon = 1e-12);
        assert!(plus.abs() < 1e-12);
    }

    #[test]
    fn u_plus_one_for_hydrogen_ground_state() {
        let alpha = 1.0 / 137.0359895;
        let u = effective_u(ChannelKind::Dirac { two_j: 1, branch: Branch::Plus }, 1.0, alpha).unwrap();
        // sqrt(1 - α²) evaluated with 40-digit arithmetic.
        assert_relative_eq!(u + 1.0, 0.99997337396454262, max_relative = 1e-15);
    }

    #[test]
    fn supercritical_is_rejected() {
        let c = constants(137.04);
        assert!(matches!(
            Channel::dirac(138.0, 1, Branch::Plus, &c),
            Err(Error::Supercritical { .. })
        ));
        assert!(matches!(kg_energy_exact(80.0, 0, 0, &c), Err(Error::Supercritical { .. })));
        assert!(Channel::dirac(1.0, 2, Branch::Plus, &c).is_err());
        assert!(Channel::dirac(-1.0, 1, Branch::Plus, &c).is_err());
    }

    #[test]
    fn dirac_reference_values() {
        // 40-digit evaluations of the Sommerfeld formula at α = 1/137.04.
        let c = constants(137.04);
        let cases = [
            (1.0, 0, 1, -0.50000665620787),
            (1.0, 1, 1, -0.12500208006773),
            (1.0, 0, 3, -0.12500041600468),
            (92.0, 0, 1, -4861.1483346719),
            (92.0, 98, 3, -0.42416950016911),
        ];
        for (z, n_r, two_j, expected) in cases {
            let e = dirac_energy_exact(z, n_r, two_j, &c).unwrap().binding();
            assert_relative_eq!(e, expected, max_relative = 1e-12);
        }
    }

    #[test]
    fn kg_ground_state() {
        let c = constants(137.0359895);
        let e = kg_energy_exact(1.0, 0, 0, &c).unwrap().binding();
        assert_relative_eq!(e, -0.50003328582360297, max_relative = 1e-12);
    }

    #[test]
    fn nonrelativistic_limit() {
        let c = PhysicalConstants::new(1e-7, 1.0).unwrap();
        for n in 1..=5u32 {
            let s = schrodinger_energy(1.0, n);
            let d = dirac_energy_exact(1.0, n - 1, 1, &c).unwrap().binding();
            assert_relative_eq!(d, s, max_relative = 1e-10);
            let kg = kg_energy_exact(1.0, n - 1, 0, &c).unwrap().binding();
            assert_relative_eq!(kg, s, max_relative = 1e-10);
        }
    }

    #[test]
    fn schrodinger_table_values() {
        assert_eq!(schrodinger_energy(1.0, 1), -0.5);
        assert_relative_eq!(schrodinger_energy(1.0, 50), -0.0002, max_relative = 1e-15);
        assert_relative_eq!(schrodinger_energy(92.0, 100), -0.4232, max_relative = 1e-15);
    }

    #[test]
    fn energy_point_views() {
        let c = constants(137.04);
        let e = EnergyPoint::from_binding(-0.5, &c);
        assert_eq!(e.total() - e.binding(), c.rest_energy());
        let back = EnergyPoint::from_total(e.total(), &c);
        assert_relative_eq!(back.binding(), -0.5, max_relative = 1e-10);
    }

    #[test]
    fn labels() {
        let l = LevelLabel::new(100, 2, 5).unwrap();
        assert_eq!(l.radial_index(), 97);
        assert_eq!(l.to_string(), "100D5/2");
        assert_eq!(LevelLabel::new(2, 1, 1).unwrap().radial_index(), 1);
        assert!(LevelLabel::new(1, 1, 1).is_err());
        assert!(LevelLabel::new(2, 1, 5).is_err());
        assert!(LevelLabel::new(0, 0, 1).is_err());
        assert_eq!(LevelLabel::l_from_letter('d'), Some(2));
    }

    #[test]
    fn spin_doubling_of_branches() {
        let c = constants(137.04);
        for &z in &[1.0, 40.0, 92.0] {
            for two_j in [1u32, 3, 5] {
                let plus = Channel::dirac(z, two_j, Branch::Plus, &c).unwrap();
                let minus = Channel::dirac(z, two_j, Branch::Minus, &c).unwrap();
                for n_r in 1..20 {
                    let a = plus.closed_form_energy(n_r, &c).binding();
                    let b = minus.closed_form_energy(n_r - 1, &c).binding();
                    assert_relative_eq!(a, b, max_relative = 1e-14);
                }
            }
        }
    }
}
