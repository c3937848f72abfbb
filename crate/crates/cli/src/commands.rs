//! The four subcommands. Each returns its rendered output together with
//! warnings and, possibly, a failure that sets the exit code after the
//! output has been written.

use num_complex::Complex64;
use relcoulomb::basis::{overlap_numeric, sturmian_eval, RadialGrid, SturmianParams, Weight};
use relcoulomb::greens::{green_matrix, CfOptions, GreensResult};
use relcoulomb::jacobi::JacobiOperator;
use relcoulomb::model::{Branch, Channel, ChannelKind, PhysicalConstants, DEFAULT_INVERSE_ALPHA};
use relcoulomb::spectrum::{find_poles, solve_level, table1, LevelRecord, PoleSearchConfig, DISAGREEMENT_FLAG};
use relcoulomb::Scalar;

use crate::args::{BasisArgs, BranchArg, ChannelArgs, Command, Equation, GlobalOptions, GreenArgs, SpectrumArgs};
use crate::error::CliError;
use crate::level::parse_level;
use crate::output::{
    render, render_json, render_rows, CfDiagnostics, Document, GreenRecord, LevelRow, PoleRow, SamplePoint,
};

/// Condition estimate above which `green` warns that the energy is close to a pole.
pub const CONDITION_WARNING: f64 = 1e8;

/// Largest tolerated deviation in the `basis --check` biorthogonality test.
pub const BIORTHOGONALITY_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Default)]
pub struct Report {
    pub text: String,
    /// Informational lines for stderr.
    pub notes: Vec<String>,
    pub warnings: Vec<String>,
    pub failure: Option<CliError>,
}

pub fn run(command: &Command, global: &GlobalOptions) -> Result<Report, CliError> {
    match command {
        Command::Table1 => cmd_table1(global),
        Command::Spectrum(args) => cmd_spectrum(args, global),
        Command::Green(args) => cmd_green(args, global),
        Command::Basis(args) => cmd_basis(args, global),
    }
}

fn constants(global: &GlobalOptions) -> Result<PhysicalConstants, CliError> {
    let alpha = global.alpha.unwrap_or(1.0 / DEFAULT_INVERSE_ALPHA);
    Ok(PhysicalConstants::new(alpha, global.mass)?)
}

fn cf_options(global: &GlobalOptions) -> CfOptions {
    CfOptions { tol: global.tol, ..CfOptions::default() }
}

fn search_config(global: &GlobalOptions) -> Result<PoleSearchConfig, CliError> {
    let config = PoleSearchConfig { rank: global.rank, eta: global.eta, cf: cf_options(global), ..Default::default() };
    config.validate()?;
    Ok(config)
}

fn channel(args: &ChannelArgs, constants: &PhysicalConstants) -> Result<Channel, CliError> {
    let kind = match args.equation {
        Equation::Kg => ChannelKind::KleinGordon { l: args.l },
        Equation::Dirac => {
            let branch = match args.branch {
                BranchArg::Plus => Branch::Plus,
                BranchArg::Minus => Branch::Minus,
            };
            ChannelKind::Dirac { two_j: args.two_j, branch }
        }
    };
    Ok(Channel::new(args.z, kind, constants)?)
}

fn channel_name(args: &ChannelArgs) -> String {
    match args.equation {
        Equation::Kg => format!("kg Z={} l={}", args.z, args.l),
        Equation::Dirac => {
            let branch = if args.branch == BranchArg::Plus { "plus" } else { "minus" };
            format!("dirac Z={} 2j={} {branch}", args.z, args.two_j)
        }
    }
}

fn level_row(r: &LevelRecord) -> LevelRow {
    LevelRow {
        system: r.system.clone(),
        level: r.label.to_string(),
        z: r.z,
        e_cf: r.e_cf,
        e_d: r.e_d,
        e_s: r.e_s,
        rel_err: r.rel_err,
        flagged: r.flagged,
    }
}

fn flagged_failure(rows: &[LevelRow]) -> Option<CliError> {
    let flagged: Vec<&str> = rows.iter().filter(|r| r.flagged).map(|r| r.level.as_str()).collect();
    (!flagged.is_empty()).then(|| {
        CliError::Tolerance(format!(
            "relative deviation from the Dirac energy exceeds {DISAGREEMENT_FLAG:e} for {}",
            flagged.join(", ")
        ))
    })
}

fn cmd_table1(global: &GlobalOptions) -> Result<Report, CliError> {
    let c = constants(global)?;
    let config = search_config(global)?;
    let mut report = Report::default();
    let mut records = Vec::new();
    for row in table1(&c, &config) {
        match row.result {
            Ok(r) => records.push(level_row(&r)),
            Err(e) => {
                report.warnings.push(format!("{} {}: {e}", row.system, row.label));
                report.failure = Some(CliError::Numeric(e));
            }
        }
    }
    if report.failure.is_none() {
        report.failure = flagged_failure(&records);
    }
    report.text = render(&Document { command: "table1".into(), records }, global.format)?;
    Ok(report)
}

fn parse_window(text: &str) -> Result<(f64, f64), CliError> {
    let bad = || CliError::Usage(format!("window must be <lower>:<upper>, got {text:?}"));
    let (lo, hi) = text.split_once(':').ok_or_else(bad)?;
    Ok((lo.trim().parse().map_err(|_| bad())?, hi.trim().parse().map_err(|_| bad())?))
}

/// Rung whose closed-form energy is nearest to `binding`.
fn nearest_rung(channel: &Channel, binding: f64, c: &PhysicalConstants) -> (u32, f64) {
    // Non-relativistic estimate of the effective principal number.
    let n_eff = channel.z() * (c.mass() / (-2.0 * binding)).sqrt();
    let guess = (n_eff - channel.u() - 1.0).round().max(0.0) as u32;
    (guess.saturating_sub(1)..=guess + 1)
        .map(|k| (k, channel.closed_form_energy(k, c).binding()))
        .min_by(|a, b| (a.1 - binding).abs().total_cmp(&(b.1 - binding).abs()))
        .expect("candidate range is non-empty")
}

fn cmd_spectrum(args: &SpectrumArgs, global: &GlobalOptions) -> Result<Report, CliError> {
    let c = constants(global)?;
    let mut config = search_config(global)?;
    let mut report = Report::default();
    if let Some(text) = &args.level {
        if args.channel.equation != Equation::Dirac {
            return Err(CliError::Usage("--level labels Dirac levels; use --equation dirac".into()));
        }
        let label = parse_level(text)?;
        let record = solve_level(label, args.channel.z, &c, &config)?;
        let rows = vec![level_row(&record)];
        report.failure = flagged_failure(&rows);
        report.text = render(&Document { command: "spectrum".into(), records: rows }, global.format)?;
        return Ok(report);
    }
    config.window = parse_window(&args.window)?;
    config.grid_points = args.points;
    config.validate()?;
    let ch = channel(&args.channel, &c)?;
    let scan = find_poles(&ch, &c, &config)?;
    let name = channel_name(&args.channel);
    let records: Vec<PoleRow> = scan
        .poles
        .iter()
        .map(|&e| {
            let (index, exact) = nearest_rung(&ch, e, &c);
            PoleRow { channel: name.clone(), index, e_cf: e, e_exact: exact, rel_err: ((e - exact) / exact).abs() }
        })
        .collect();
    report.warnings = scan.warnings;
    report.text = render(&Document { command: "spectrum".into(), records }, global.format)?;
    Ok(report)
}

fn green_record<T: Scalar>(name: String, g: &GreensResult<T>, to_c: impl Fn(T) -> Complex64) -> GreenRecord {
    let n = g.rank;
    let entry = |k: usize| to_c(g.green_matrix[(k / n, k % n)]);
    let energy = to_c(g.energy.binding());
    let det = to_c(g.det_inverse);
    GreenRecord {
        channel: name,
        rank: n,
        binding: energy.re,
        imag: energy.im,
        condition: g.condition,
        det_inverse_re: det.re,
        det_inverse_im: det.im,
        values_re: (0..n * n).map(|k| entry(k).re).collect(),
        values_im: (0..n * n).map(|k| entry(k).im).collect(),
        cf: g.cf.map(|cf| {
            let v = to_c(cf.value);
            CfDiagnostics {
                value_re: v.re,
                value_im: v.im,
                terms_used: cf.terms_used,
                residual: cf.residual,
                converged: cf.converged,
            }
        }),
    }
}

fn cmd_green(args: &GreenArgs, global: &GlobalOptions) -> Result<Report, CliError> {
    let c = constants(global)?;
    let ch = channel(&args.channel, &c)?;
    let opts = cf_options(global);
    let name = channel_name(&args.channel);
    let record = match args.imag {
        Some(im) if im != 0.0 => {
            let op = JacobiOperator::at_binding(ch, c, global.eta, Complex64::new(args.binding, im))?;
            green_record(name, &green_matrix(&op, global.rank, &opts)?, |z| z)
        }
        _ => {
            let op = JacobiOperator::at_binding(ch, c, global.eta, args.binding)?;
            green_record(name, &green_matrix(&op, global.rank, &opts)?, |x| Complex64::new(x, 0.0))
        }
    };
    let mut report = Report::default();
    if record.condition > CONDITION_WARNING {
        report.warnings.push(format!(
            "condition estimate {:.3e} exceeds {CONDITION_WARNING:e}: the energy is close to a pole",
            record.condition
        ));
    }
    report.text = match global.format {
        crate::args::Format::Json => render_json(&Document { command: "green".into(), records: vec![record] })?,
        format => render_rows(&record.entries(), format)?,
    };
    Ok(report)
}

fn cmd_basis(args: &BasisArgs, global: &GlobalOptions) -> Result<Report, CliError> {
    let u = match args.u {
        Some(u) => u,
        None => channel(&args.channel, &constants(global)?)?.u(),
    };
    let params = SturmianParams::new(global.eta, u)?;
    if args.points < 2 || !(args.r_min > 0.0 && args.r_max > args.r_min) {
        return Err(CliError::Usage("basis grid needs --points >= 2 and 0 < --r-min < --r-max".into()));
    }
    let step = (args.r_max - args.r_min) / (args.points - 1) as f64;
    let records = (0..args.points)
        .map(|k| {
            let r = if k + 1 == args.points { args.r_max } else { args.r_min + k as f64 * step };
            Ok(SamplePoint { r, value: sturmian_eval(args.n, &params, r)? })
        })
        .collect::<Result<Vec<_>, relcoulomb::Error>>()?;
    let mut report = Report::default();
    if args.check {
        let n_max = args.n.max(10);
        let grid = RadialGrid::for_sturmians(&params, n_max)?;
        let mut worst: f64 = 0.0;
        for n in 0..=n_max {
            for m in n..=n_max {
                let q = overlap_numeric(n, m, &params, Weight::InverseR, &grid, 1e-10)?;
                worst = worst.max((q.value - if n == m { 1.0 } else { 0.0 }).abs());
            }
        }
        report.notes.push(format!("biorthogonality check over n, m <= {n_max}: max deviation {worst:.3e}"));
        if worst >= BIORTHOGONALITY_TOLERANCE {
            report.failure = Some(CliError::Tolerance(format!(
                "biorthogonality deviation {worst:.3e} exceeds {BIORTHOGONALITY_TOLERANCE:e}"
            )));
        }
    }
    report.text = render(&Document { command: "basis".into(), records }, global.format)?;
    Ok(report)
}
