//! Bound-state energies as zeros of `det((G^(N))⁻¹)`.
//!
//! The determinant also changes sign where the corner continued fraction has
//! a pole. Those crossings are recognised after bisection because `|det|`
//! grows instead of shrinking, and are dropped.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::greens::{inverse_green_submatrix, CfOptions};
use crate::jacobi::JacobiOperator;
use crate::model::{dirac_energy_exact, schrodinger_energy, Branch, Channel, LevelLabel, PhysicalConstants};

/// Relative disagreement between the computed pole and the closed form
/// above which a [`LevelRecord`] is flagged.
pub const DISAGREEMENT_FLAG: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PoleSearchConfig {
    /// Rank of the Green's matrix block whose determinant is searched.
    pub rank: usize,
    pub eta: f64,
    /// Rescale `η` to the level's own decay constant when the level is much
    /// deeper than `η` suggests (seeded solves only).
    pub auto_eta: bool,
    /// Binding-energy window `(lower, upper)` for blind scans.
    pub window: (f64, f64),
    pub grid_points: usize,
    /// Relative bisection tolerance on the binding energy.
    pub rel_tol: f64,
    pub max_bisection: usize,
    /// Half-width of the seeded window, relative to the seed energy.
    pub seed_window: f64,
    pub seed_grid_points: usize,
    pub cf: CfOptions,
}

impl Default for PoleSearchConfig {
    fn default() -> Self {
        Self {
            rank: 2,
            eta: 1.0,
            auto_eta: true,
            window: (-0.6, -0.01),
            grid_points: 1000,
            rel_tol: 1e-13,
            max_bisection: 200,
            seed_window: 1e-3,
            seed_grid_points: 16,
            cf: CfOptions::default(),
        }
    }
}

impl PoleSearchConfig {
    pub fn validate(&self) -> Result<()> {
        let (lo, hi) = self.window;
        let bad = |msg: String| Err(Error::InvalidParameter(msg));
        if self.rank == 0 {
            return bad("rank must be at least 1".into());
        }
        if !(self.eta.is_finite() && self.eta > 0.0) {
            return bad(format!("eta must be positive, got {}", self.eta));
        }
        if !(lo < hi && hi < 0.0) {
            return bad(format!("window must satisfy lower < upper < 0, got ({lo}, {hi})"));
        }
        if self.grid_points < 2 || self.seed_grid_points < 2 {
            return bad("scan grids need at least 2 points".into());
        }
        if !(self.rel_tol > 0.0) || !(self.seed_window > 0.0 && self.seed_window < 1.0) {
            return bad("rel_tol must be positive and seed_window in (0, 1)".into());
        }
        Ok(())
    }

    /// `η` used for the `index`-th level of a ladder, near binding energy `binding`.
    ///
    /// The weight of that level in the leading rows of the Sturmian expansion
    /// falls off like `((η-κ)/(η+κ))^(2 index)`, `κ = sqrt(-k²)` being the
    /// level's own decay constant; once it is small, a pole of the determinant
    /// sits right next to the zero. Keeping `η ≥ (index+1)κ` bounds that
    /// weight from below, and for `index = 0` it sets `η = κ` for levels much
    /// deeper than the configured `η`.
    pub fn eta_for(&self, binding: f64, index: u32, constants: &PhysicalConstants) -> f64 {
        let alpha2 = constants.alpha() * constants.alpha();
        let k2 = binding * (2.0 * constants.mass() + alpha2 * binding);
        if !self.auto_eta || k2 >= 0.0 {
            return self.eta;
        }
        let matched = (f64::from(index) + 1.0) * (-k2).sqrt();
        if matched > 2.0 * self.eta {
            matched
        } else {
            self.eta
        }
    }
}

/// Determinant of the rank-`rank` inverse Green's matrix at a binding energy.
pub fn det_inverse_green(
    channel: &Channel,
    constants: &PhysicalConstants,
    eta: f64,
    binding: f64,
    rank: usize,
    cf: &CfOptions,
) -> Result<f64> {
    let op = JacobiOperator::at_binding(*channel, *constants, eta, binding)?;
    let (m, _) = inverse_green_submatrix(&op, rank, cf)?;
    Ok(m.determinant())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PoleRefinement {
    pub binding: f64,
    pub steps: usize,
    pub bracket_width: f64,
    /// `|det|` at the better end of the final bracket.
    pub det_residual: f64,
}

enum Crossing {
    Zero(PoleRefinement),
    /// The sign change went through infinity.
    Pole(f64),
}

fn refine<F>(f: &F, mut lo: f64, mut hi: f64, mut f_lo: f64, f_hi: f64, config: &PoleSearchConfig) -> Result<Crossing>
where
    F: Fn(f64) -> Result<f64>,
{
    let start = f_lo.abs().min(f_hi.abs());
    let mut best = start;
    let mut steps = 0;
    while steps < config.max_bisection {
        let mid = 0.5 * (lo + hi);
        if hi - lo <= config.rel_tol * mid.abs() || mid <= lo || mid >= hi {
            break;
        }
        let f_mid = f(mid)?;
        steps += 1;
        if f_mid == 0.0 {
            return Ok(Crossing::Zero(PoleRefinement { binding: mid, steps, bracket_width: 0.0, det_residual: 0.0 }));
        }
        if f_mid.signum() == f_lo.signum() {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
        }
        best = best.min(f_mid.abs());
    }
    let end = f_lo.abs().min(f(hi)?.abs());
    if end > start {
        return Ok(Crossing::Pole(0.5 * (lo + hi)));
    }
    Ok(Crossing::Zero(PoleRefinement {
        binding: 0.5 * (lo + hi),
        steps,
        bracket_width: hi - lo,
        det_residual: best.min(end),
    }))
}

struct GridScan {
    roots: Vec<PoleRefinement>,
    /// Sign changes of `f` through infinity.
    poles: Vec<f64>,
    /// Local minima of `|f|` without a sign change whose parabolic fit
    /// crosses zero, as `(left, centre, right)` samples.
    dips: Vec<(f64, f64, f64)>,
}

/// Refines every sign change of `f` between consecutive samples.
fn roots_on_grid<F>(f: &F, grid: &[f64], config: &PoleSearchConfig) -> Result<GridScan>
where
    F: Fn(f64) -> Result<f64> + Sync,
{
    let values: Vec<f64> = grid.par_iter().map(|&x| f(x)).collect::<Result<_>>()?;
    let mut scan = GridScan { roots: Vec::new(), poles: Vec::new(), dips: Vec::new() };
    let exact = |x: f64| PoleRefinement { binding: x, steps: 0, bracket_width: 0.0, det_residual: 0.0 };
    for k in 0..grid.len() - 1 {
        let (a, b) = (grid[k], grid[k + 1]);
        let (fa, fb) = (values[k], values[k + 1]);
        if fa == 0.0 {
            scan.roots.push(exact(a));
            continue;
        }
        if fa.signum() != fb.signum() && fb != 0.0 {
            match refine(f, a, b, fa, fb, config)? {
                Crossing::Zero(r) => scan.roots.push(r),
                Crossing::Pole(x) => scan.poles.push(x),
            }
        }
    }
    if let (Some(&x), Some(&fx)) = (grid.last(), values.last()) {
        if fx == 0.0 {
            scan.roots.push(exact(x));
        }
    }
    for k in 1..grid.len() - 1 {
        let (fl, fm, fr) = (values[k - 1], values[k], values[k + 1]);
        let same_sign = fl.signum() == fm.signum() && fm.signum() == fr.signum();
        if !(same_sign && fm.abs() <= fl.abs() && fm.abs() < fr.abs()) {
            continue;
        }
        if let Some(vertex) = parabola_vertex_value(&grid[k - 1..=k + 1], &values[k - 1..=k + 1]) {
            if vertex.signum() != fm.signum() {
                scan.dips.push((grid[k - 1], grid[k], grid[k + 1]));
            }
        }
    }
    Ok(scan)
}

/// Samples at `center ± width·10^-k`, closest to `center` at `|center|·1e-14`.
fn geometric_sides(center: f64, width: f64) -> (Vec<f64>, Vec<f64>) {
    let floor = 1e-14 * center.abs();
    let offsets: Vec<f64> = (0..)
        .map(|k| width * 10f64.powi(-k))
        .take_while(|&d| d >= floor)
        .collect();
    let left = offsets.iter().map(|d| center - d).collect();
    let right = offsets.iter().rev().map(|d| center + d).collect();
    (left, right)
}

/// Looks for zeros hidden next to a pole at `pole`, within `width` of it.
fn zeros_beside_pole<F>(f: &F, pole: f64, width: f64, config: &PoleSearchConfig) -> Result<Vec<PoleRefinement>>
where
    F: Fn(f64) -> Result<f64> + Sync,
{
    let (left, right) = geometric_sides(pole, width);
    let mut roots = Vec::new();
    for side in [left, right] {
        if side.len() >= 2 {
            roots.extend(roots_on_grid(f, &side, config)?.roots);
        }
    }
    Ok(roots)
}

/// Zooms into a dip of `|f|` until the zero/pole pair hiding in it separates.
fn zeros_in_dip<F>(f: &F, dip: (f64, f64, f64), config: &PoleSearchConfig, depth: u32) -> Result<Vec<PoleRefinement>>
where
    F: Fn(f64) -> Result<f64> + Sync,
{
    const POINTS: usize = 65;
    let (lo, _, hi) = dip;
    let grid: Vec<f64> = (0..POINTS).map(|k| lo + (hi - lo) * k as f64 / (POINTS - 1) as f64).collect();
    let scan = roots_on_grid(f, &grid, config)?;
    let mut roots = scan.roots;
    for pole in scan.poles {
        roots.extend(zeros_beside_pole(f, pole, (hi - lo) / (POINTS - 1) as f64, config)?);
    }
    if roots.is_empty() && depth > 0 {
        for inner in scan.dips {
            roots.extend(zeros_in_dip(f, inner, config, depth - 1)?);
        }
    }
    Ok(roots)
}

/// Extremal value of the parabola through three samples.
fn parabola_vertex_value(x: &[f64], y: &[f64]) -> Option<f64> {
    let (d1, d2) = ((y[1] - y[0]) / (x[1] - x[0]), (y[2] - y[1]) / (x[2] - x[1]));
    let curvature = (d2 - d1) / (x[2] - x[0]);
    if curvature == 0.0 || !curvature.is_finite() {
        return None;
    }
    // p(t) = y1 + slope (t - x1) + curvature (t - x1)²
    let slope = d1 + curvature * (x[1] - x[0]);
    Some(y[1] - slope * slope / (4.0 * curvature))
}

fn dedup_sorted(mut roots: Vec<PoleRefinement>, rel_tol: f64) -> Vec<PoleRefinement> {
    roots.sort_by(|a, b| a.binding.total_cmp(&b.binding));
    let mut out: Vec<PoleRefinement> = Vec::with_capacity(roots.len());
    for r in roots {
        match out.last() {
            Some(prev) if (r.binding - prev.binding).abs() <= 10.0 * rel_tol * r.binding.abs() => {}
            _ => out.push(r),
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PoleScan {
    /// Binding energies, ascending.
    pub poles: Vec<f64>,
    pub refinements: Vec<PoleRefinement>,
    pub warnings: Vec<String>,
}

/// Blind scan of the configured window for zeros of the determinant.
///
/// Samples are uniform in `(-ε)^{-1/2}`, which is proportional to the
/// effective principal quantum number, so level spacing on the grid stays
/// roughly even across the window.
pub fn find_poles(channel: &Channel, constants: &PhysicalConstants, config: &PoleSearchConfig) -> Result<PoleScan> {
    config.validate()?;
    let (lo, hi) = config.window;
    let (nu_lo, nu_hi) = ((-lo).powf(-0.5), (-hi).powf(-0.5));
    let last = config.grid_points - 1;
    let grid: Vec<f64> = (0..=last)
        .map(|k| {
            if k == 0 {
                lo
            } else if k == last {
                hi
            } else {
                let nu = nu_lo + (nu_hi - nu_lo) * k as f64 / last as f64;
                -1.0 / (nu * nu)
            }
        })
        .collect();
    let det = |e: f64| det_inverse_green(channel, constants, config.eta, e, config.rank, &config.cf);
    let GridScan { mut roots, poles, dips } = roots_on_grid(&det, &grid, config)?;
    for pole in poles {
        let cell = grid.windows(2).find(|w| w[0] <= pole && pole <= w[1]).map_or(0.0, |w| w[1] - w[0]);
        roots.extend(zeros_beside_pole(&det, pole, cell, config)?);
    }
    let mut warnings = Vec::new();
    for dip in dips {
        let found = zeros_in_dip(&det, dip, config, 6)?;
        if found.is_empty() {
            warnings.push(format!(
                "|det| dips toward zero without a sign change near binding {:.10}; \
                 an even number of roots may share [{:.10}, {:.10}], refine the grid",
                dip.1, dip.0, dip.2
            ));
        }
        roots.extend(found);
    }
    let refinements = dedup_sorted(roots, config.rel_tol);
    Ok(PoleScan { poles: refinements.iter().map(|r| r.binding).collect(), refinements, warnings })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChannelSolution {
    pub refinement: PoleRefinement,
    /// Closed-form energy of the same rung, used as the seed.
    pub seed: f64,
    pub eta: f64,
}

/// Pole of the `index`-th rung of `channel`, searched in a narrow window
/// around the closed-form energy.
pub fn solve_channel_state(
    channel: &Channel,
    index: u32,
    constants: &PhysicalConstants,
    config: &PoleSearchConfig,
) -> Result<ChannelSolution> {
    config.validate()?;
    let seed = channel.closed_form_energy(index, constants).binding();
    let eta = config.eta_for(seed, index, constants);
    let width = config.seed_window * seed.abs();
    let (lo, hi) = (seed - width, seed + width);
    let last = config.seed_grid_points - 1;
    let grid: Vec<f64> = (0..=last).map(|k| lo + (hi - lo) * k as f64 / last as f64).collect();
    let det = |e: f64| det_inverse_green(channel, constants, eta, e, config.rank, &config.cf);
    let closest = |roots: Vec<PoleRefinement>| {
        roots.into_iter().min_by(|a, b| (a.binding - seed).abs().total_cmp(&(b.binding - seed).abs()))
    };
    let refinement = match closest(roots_on_grid(&det, &grid, config)?.roots) {
        Some(r) => r,
        None => {
            // A pole within the same cell can mask the sign change; close in
            // on the seed geometrically.
            let (mut probe, right) = geometric_sides(seed, width);
            probe.push(seed);
            probe.extend(right);
            closest(roots_on_grid(&det, &probe, config)?.roots).ok_or(Error::BracketFailure { lo, hi })?
        }
    };
    Ok(ChannelSolution { refinement, seed, eta })
}

/// One computed spectral line next to its reference values.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LevelRecord {
    pub system: String,
    pub z: f64,
    pub label: LevelLabel,
    pub e_cf: f64,
    pub e_d: f64,
    pub e_s: f64,
    pub rel_err: f64,
    pub flagged: bool,
    pub eta: f64,
    pub rank: usize,
    pub bisection_steps: usize,
    pub det_residual: f64,
}

pub fn system_name(z: f64) -> String {
    if z == 1.0 {
        "hydrogen".into()
    } else if z == 92.0 {
        "uranium".into()
    } else {
        format!("Z={z}")
    }
}

/// Solves one Dirac level in the plus branch.
pub fn solve_level(
    label: LevelLabel,
    z: f64,
    constants: &PhysicalConstants,
    config: &PoleSearchConfig,
) -> Result<LevelRecord> {
    let channel = Channel::dirac(z, label.two_j(), Branch::Plus, constants)?;
    let n_r = label.radial_index();
    let e_d = dirac_energy_exact(z, n_r, label.two_j(), constants)?.binding();
    let solution = solve_channel_state(&channel, n_r, constants, config)?;
    let e_cf = solution.refinement.binding;
    let rel_err = ((e_cf - e_d) / e_d).abs();
    Ok(LevelRecord {
        system: system_name(z),
        z,
        label,
        e_cf,
        e_d,
        e_s: schrodinger_energy(z, label.principal()),
        rel_err,
        flagged: rel_err > DISAGREEMENT_FLAG,
        eta: solution.eta,
        rank: config.rank,
        bisection_steps: solution.refinement.steps,
        det_residual: solution.refinement.det_residual,
    })
}

/// `(Z, n, l, 2j)` of the hydrogen and uranium levels reproduced by [`table1`].
pub const TABLE1_LEVELS: [(f64, u32, u32, u32); 8] = [
    (1.0, 1, 0, 1),
    (1.0, 2, 1, 1),
    (1.0, 2, 1, 3),
    (1.0, 50, 1, 1),
    (1.0, 50, 1, 3),
    (92.0, 1, 0, 1),
    (92.0, 100, 2, 3),
    (92.0, 100, 2, 5),
];

#[derive(Debug, Clone, PartialEq)]
pub struct TableRow {
    pub system: String,
    pub z: f64,
    pub label: LevelLabel,
    pub result: Result<LevelRecord>,
}

/// Hydrogen and uranium fine-structure table with rank-2 Green's matrices.
/// A failing row is reported in place; the others are still computed.
pub fn table1(constants: &PhysicalConstants, config: &PoleSearchConfig) -> Vec<TableRow> {
    let config = PoleSearchConfig { rank: 2, ..*config };
    TABLE1_LEVELS
        .par_iter()
        .map(|&(z, n, l, two_j)| {
            let label = LevelLabel::new(n, l, two_j).expect("table levels are valid");
            TableRow { system: system_name(z), z, label, result: solve_level(label, z, constants, &config) }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn hydrogen() -> (Channel, PhysicalConstants) {
        let c = PhysicalConstants::default();
        (Channel::dirac(1.0, 1, Branch::Plus, &c).unwrap(), c)
    }

    #[test]
    fn determinant_finite_between_levels() {
        let (ch, c) = hydrogen();
        let mid = 0.5 * (-0.5000066562 - 0.1250020801);
        let d = det_inverse_green(&ch, &c, 1.0, mid, 2, &CfOptions::default()).unwrap();
        assert!(d.is_finite() && d != 0.0);
    }

    #[test]
    fn determinant_changes_sign_across_ground_state() {
        let (ch, c) = hydrogen();
        let e = dirac_energy_exact(1.0, 0, 1, &c).unwrap().binding();
        let opts = CfOptions::default();
        let below = det_inverse_green(&ch, &c, 1.0, e * (1.0 + 1e-8), 2, &opts).unwrap();
        let above = det_inverse_green(&ch, &c, 1.0, e * (1.0 - 1e-8), 2, &opts).unwrap();
        assert!(below.signum() != above.signum());
    }

    #[test]
    fn determinant_in_diagonal_case_is_product() {
        let (ch, c) = hydrogen();
        let eps = -0.3_f64;
        let eta = (-(eps * (2.0 + c.alpha() * c.alpha() * eps))).sqrt();
        let op = JacobiOperator::at_binding(ch, c, eta, eps).unwrap();
        let d = det_inverse_green(&ch, &c, eta, eps, 3, &CfOptions::default()).unwrap();
        let product = op.diagonal(0) * op.diagonal(1) * op.diagonal(2);
        assert!((d - product).abs() <= 1e-14 * product.abs());
    }

    #[test]
    fn config_validation() {
        let ok = PoleSearchConfig::default();
        assert!(ok.validate().is_ok());
        assert!(PoleSearchConfig { window: (-0.5, 0.1), ..ok }.validate().is_err());
        assert!(PoleSearchConfig { grid_points: 1, ..ok }.validate().is_err());
        assert!(PoleSearchConfig { rank: 0, ..ok }.validate().is_err());
    }

    #[test]
    fn auto_eta_only_for_deep_levels() {
        let c = PhysicalConstants::default();
        let cfg = PoleSearchConfig::default();
        assert_eq!(cfg.eta_for(-0.5, 0, &c), 1.0);
        assert_eq!(cfg.eta_for(-0.125, 1, &c), 1.0);
        let deep = cfg.eta_for(-4861.0, 0, &c);
        assert!(deep > 80.0 && deep < 100.0);
        assert_eq!(PoleSearchConfig { auto_eta: false, ..cfg }.eta_for(-4861.0, 0, &c), 1.0);
        // Uranium 100D: κ ≈ 0.92 but 98 nodes.
        assert!(cfg.eta_for(-0.424, 98, &c) > 80.0);
    }

    #[test]
    fn blind_scan_finds_hydrogen_levels() {
        let (ch, c) = hydrogen();
        let scan = find_poles(&ch, &c, &PoleSearchConfig::default()).unwrap();
        assert!(scan.poles.len() >= 2);
        let e0 = dirac_energy_exact(1.0, 0, 1, &c).unwrap().binding();
        let e1 = dirac_energy_exact(1.0, 1, 1, &c).unwrap().binding();
        assert!(((scan.poles[0] - e0) / e0).abs() < 1e-11);
        assert!(((scan.poles[1] - e1) / e1).abs() < 1e-11);
    }

    #[test]
    fn sign_change_through_a_pole_is_rejected() {
        let cfg = PoleSearchConfig::default();
        let grid: Vec<f64> = (0..11).map(|k| -1.05 + 0.1 * k as f64).collect();
        // Zero at -0.5, pole at -0.2.
        let f = |x: f64| Ok((x + 0.5) / (x + 0.2));
        let scan = roots_on_grid(&f, &grid, &cfg).unwrap();
        let roots = scan.roots;
        assert_eq!(roots.len(), 1);
        assert_eq!(scan.poles.len(), 1);
        assert!((scan.poles[0] + 0.2).abs() < 1e-12);
        assert!((roots[0].binding + 0.5).abs() < 1e-13);

        let none = |x: f64| Ok(x * x + 1.0);
        assert!(roots_on_grid(&none, &grid, &cfg).unwrap().roots.is_empty());
    }

    #[test]
    fn double_root_is_resolved_by_zooming() {
        let cfg = PoleSearchConfig::default();
        let grid: Vec<f64> = (0..11).map(|k| -1.03 + 0.1 * k as f64).collect();
        let f = |x: f64| Ok((x + 0.5001) * (x + 0.4999));
        let scan = roots_on_grid(&f, &grid, &cfg).unwrap();
        assert!(scan.roots.is_empty());
        assert_eq!(scan.dips.len(), 1);
        let found = zeros_in_dip(&f, scan.dips[0], &cfg, 6).unwrap();
        assert_eq!(found.len(), 2);
        assert!((found[0].binding + 0.5001).abs() < 1e-12);
        assert!((found[1].binding + 0.4999).abs() < 1e-12);
    }
}
