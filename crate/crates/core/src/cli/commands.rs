use super::config::{parse_config, ConfigFile, Settings};
use super::numlist::{parse_number, parse_number_list};
use super::{CheckArgs, CheckKind, Cli, Command, ExperimentArgs, ExperimentKind, SolveArgs, VerifyArgs};
use crate::calculus::{Coordinate, FnField, GroupPoint, Jet, ScalarField, TranslatedGaugePower};
use crate::error::{Error, Result};
use crate::lab::{self, GridEntry, IdentityId, SampleConfig, DEFAULT_ALPHAS};
use crate::numfmt::{fmt17, sig17, sig17_opt};
use crate::quadrature::{
    average_identity_check, calibrate_beta, mean_value_check, pohozaev_check, surface_integral_gauge_sphere,
    Measure, QuadratureSpec, Rule, USource,
};
use crate::solver::{
    assemble_and_solve, build_grid, convergence_study, neumann_trace_with, pfunction_on_grid,
    ConvergenceStudy, GridSolution, ReducedDomain, SolutionMetadata, DEFAULT_TRACE_SAMPLES,
};
use serde::Serialize;
use std::path::{Path, PathBuf};

const POHOZAEV_TOL: f64 = 1e-8;
const MEAN_VALUE_TOL: f64 = 1e-5;
const BETA_TOL: f64 = 1e-8;
const SURFACE_UNIT_TOL: f64 = 1e-6;
/// Grid-mode checks pass when the residual is within this multiple of the
/// grid-error estimate `|r(h) − r(2h)|`.
const GRID_ERROR_FACTOR: f64 = 5.0;
const NEUMANN_REL_TOL: f64 = 0.01;
const MONOTONE_SLACK: f64 = 0.1;
const DEFAULT_H: f64 = 1.0 / 128.0;

/// Pending output files, written together once a command has finished.
#[derive(Default)]
struct Outputs(Vec<(PathBuf, String)>);

impl Outputs {
    fn add(&mut self, path: PathBuf, contents: String) {
        self.0.push((path, contents));
    }

    fn flush(self) -> Result<()> {
        for (path, contents) in self.0 {
            if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
                std::fs::create_dir_all(dir)?;
            }
            std::fs::write(&path, contents)?;
        }
        Ok(())
    }
}

fn to_json<T: Serialize>(v: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(v)?;
    s.push('\n');
    Ok(s)
}

/// Writes JSON to `out`, or to stdout when there is no path.
fn emit_json<T: Serialize>(v: &T, out: Option<PathBuf>) -> Result<()> {
    let text = to_json(v)?;
    match out {
        Some(path) => {
            let mut o = Outputs::default();
            o.add(path, text);
            o.flush()
        }
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn load_config(path: Option<&Path>) -> Result<ConfigFile> {
    match path {
        None => Ok(ConfigFile::default()),
        Some(p) => {
            let text = std::fs::read_to_string(p)
                .map_err(|e| Error::invalid(format!("cannot read config {}: {e}", p.display())))?;
            parse_config(&text)
        }
    }
}

pub(super) fn dispatch(cli: Cli) -> Result<bool> {
    let cfg = load_config(cli.config.as_deref())?;
    match cli.command {
        Command::Verify(a) => verify(a, &cfg),
        Command::Check { kind } => match kind {
            CheckKind::Pohozaev(a) => check_pohozaev(a, &cfg),
            CheckKind::Meanvalue(a) => check_mean_value(a, &cfg),
            CheckKind::Average(a) => check_average(a, &cfg),
            CheckKind::Beta(a) => check_beta(a, &cfg),
        },
        Command::Solve(a) => solve(a, &cfg),
        Command::Experiment { kind } => match kind {
            ExperimentKind::Convergence(a) => experiment_convergence(a, &cfg),
            ExperimentKind::Perturbation(a) => experiment_perturbation(a, &cfg),
        },
    }
}

fn text(s: &str) -> Result<String> {
    Ok(s.to_string())
}

fn int<T: std::str::FromStr>(s: &str) -> Result<T> {
    s.trim().parse().map_err(|_| Error::invalid(format!("{s:?} is not a non-negative integer")))
}

fn path(s: &str) -> Result<PathBuf> {
    Ok(PathBuf::from(s))
}

fn verify(a: VerifyArgs, cfg: &ConfigFile) -> Result<bool> {
    let s = Settings::for_command(cfg, &["verify"]);
    let suite = s.pick(a.suite, "suite", text)?;
    let identity = match a.identity {
        Some(id) => Some(id.parse::<IdentityId>()?),
        None => s.pick(None, "identity", |v| v.parse::<IdentityId>())?,
    };
    let n = s.pick(a.n, "n", int)?;
    let alpha = s.pick(a.alpha, "alpha", parse_number)?;
    let seed = s.pick(a.seed, "seed", int)?.unwrap_or(42);
    let num_points = s.pick(a.num_points, "num_points", int)?.unwrap_or(1000);
    let tolerance = s.pick(a.tolerance, "tolerance", parse_number)?;
    let out = s.pick(a.out, "out", path)?;
    s.reject_unknown()?;

    let entries: Vec<GridEntry> = match (identity, suite.as_deref()) {
        (Some(_), Some(_)) => return Err(Error::invalid("give either a suite or an identity, not both")),
        (Some(id), None) => {
            if let Some(n) = n {
                if !id.accepts(n) {
                    return Err(Error::invalid(format!("identity {id} does not apply to n = {n}")));
                }
            }
            let ns: Vec<usize> = match n {
                Some(n) => vec![n],
                None => (1..=4).filter(|&n| id.accepts(n)).collect(),
            };
            let alphas: Vec<Option<f64>> = match (id.uses_alpha(), alpha) {
                (false, _) => vec![None],
                (true, Some(a)) => vec![Some(a)],
                (true, None) => DEFAULT_ALPHAS.iter().map(|&a| Some(a)).collect(),
            };
            ns.iter().flat_map(|&n| alphas.iter().map(move |&a| GridEntry::new(id, n, a))).collect()
        }
        (None, suite) => {
            let grid = match suite.unwrap_or("default") {
                "default" => lab::default_grid(),
                "master" => lab::master_grid(),
                other => return Err(Error::invalid(format!("unknown suite {other:?}"))),
            };
            grid.into_iter()
                .filter(|e| n.is_none_or(|n| e.n == n))
                .filter(|e| alpha.is_none() || e.alpha.is_none() || e.alpha == alpha)
                .collect()
        }
    };
    if entries.is_empty() {
        return Err(Error::invalid("the selection contains no identity runs"));
    }
    if let Some(t) = tolerance {
        if !(t > 0.0) {
            return Err(Error::invalid(format!("tolerance must be positive, got {t}")));
        }
    }
    let sample = SampleConfig::default().with_seed(seed).with_points(num_points);
    let mut report = lab::run_suite(&entries, &sample)?;
    if let Some(t) = tolerance {
        for r in &mut report.reports {
            r.tolerance = t;
            r.pass = r.max_rel_err <= t;
        }
        report.pass = report.reports.iter().all(|r| r.pass);
    }
    let passed = report.reports.iter().filter(|r| r.pass).count();
    eprintln!("verify: {passed}/{} identity runs pass", report.reports.len());
    let text = report.to_json()?;
    match out {
        Some(p) => {
            let mut o = Outputs::default();
            o.add(p, text);
            o.flush()?;
        }
        None => print!("{text}"),
    }
    Ok(report.pass)
}

struct CheckCommon {
    n: usize,
    radius: f64,
    spec: QuadratureSpec,
    tolerance: Option<f64>,
    out: Option<PathBuf>,
}

fn check_common(a: &CheckArgs, s: &Settings) -> Result<CheckCommon> {
    let n = s.pick(a.n, "n", int)?.unwrap_or(1);
    let radius = s.pick(a.radius, "radius", parse_number)?.unwrap_or(1.0);
    let d = QuadratureSpec::default();
    let rule = match a.rule.as_deref() {
        Some(r) => Some(r.parse::<Rule>()?),
        None => s.pick(None, "rule", |v| v.parse::<Rule>())?,
    };
    let spec = QuadratureSpec::new(
        rule.unwrap_or(d.rule),
        s.pick(a.nodes, "nodes", int)?.unwrap_or(d.nodes),
        s.pick(a.quad_tol, "quad_tol", parse_number)?.unwrap_or(d.target_rel_tol),
    )?;
    Ok(CheckCommon {
        n,
        radius,
        spec,
        tolerance: s.pick(a.tolerance, "tolerance", parse_number)?,
        out: s.pick(a.out.clone(), "out", path)?,
    })
}

#[derive(Serialize)]
struct CheckOutput<R: Serialize> {
    check: &'static str,
    record: R,
    #[serde(skip_serializing_if = "Option::is_none")]
    coarse_record: Option<R>,
    #[serde(serialize_with = "sig17_opt", skip_serializing_if = "Option::is_none")]
    grid_error: Option<f64>,
    #[serde(serialize_with = "sig17")]
    error: f64,
    #[serde(serialize_with = "sig17")]
    tolerance: f64,
    pass: bool,
}

enum Source {
    Analytic,
    Grid(f64),
}

fn source_setting(a: &CheckArgs, s: &Settings) -> Result<Source> {
    let kind = s.pick(a.source.clone(), "source", text)?.unwrap_or_else(|| "analytic".into());
    let h = s.pick(a.h, "h", parse_number)?;
    match kind.as_str() {
        "analytic" => {
            if h.is_some() {
                return Err(Error::invalid("--h only applies to --source grid"));
            }
            Ok(Source::Analytic)
        }
        "grid" => Ok(Source::Grid(h.unwrap_or(DEFAULT_H))),
        other => Err(Error::invalid(format!("unknown source {other:?}"))),
    }
}

fn grid_pair(radius: f64, h: f64, alpha: f64, n: usize) -> Result<(GridSolution, GridSolution)> {
    let domain = ReducedDomain::gauge_ball(radius)?;
    let fine = assemble_and_solve(&build_grid(&domain, h)?, alpha, n)?;
    let coarse = assemble_and_solve(&build_grid(&domain, 2.0 * h)?, alpha, n)?;
    Ok((fine, coarse))
}

/// Shared driver for the two checks that accept a grid source.
fn run_integral_check<R, F>(name: &'static str, a: CheckArgs, cfg: &ConfigFile, run: F) -> Result<bool>
where
    R: Serialize,
    F: Fn(f64, usize, f64, USource, &QuadratureSpec) -> Result<R>,
    R: HasResidual,
{
    let s = Settings::for_command(cfg, &["check", &format!("check.{name}")]);
    let c = check_common(&a, &s)?;
    let alpha = s.pick(a.alpha, "alpha", parse_number)?.unwrap_or(2.0);
    let source = source_setting(&a, &s)?;
    s.reject_unknown()?;
    let output = match source {
        Source::Analytic => {
            let record = run(alpha, c.n, c.radius, USource::Analytic, &c.spec)?;
            let tolerance = c.tolerance.unwrap_or(POHOZAEV_TOL);
            let error = record.residual();
            CheckOutput { check: name, record, coarse_record: None, grid_error: None, error, tolerance, pass: error <= tolerance }
        }
        Source::Grid(h) => {
            let (fine, coarse) = grid_pair(c.radius, h, alpha, c.n)?;
            let record = run(alpha, c.n, c.radius, USource::Grid(&fine), &c.spec)?;
            let coarse_record = run(alpha, c.n, c.radius, USource::Grid(&coarse), &c.spec)?;
            let grid_error = (record.residual() - coarse_record.residual()).abs();
            let factor = c.tolerance.unwrap_or(GRID_ERROR_FACTOR);
            let error = record.residual();
            let tolerance = factor * grid_error;
            CheckOutput {
                check: name,
                record,
                coarse_record: Some(coarse_record),
                grid_error: Some(grid_error),
                error,
                tolerance,
                pass: error <= tolerance,
            }
        }
    };
    let pass = output.pass;
    eprintln!("check {name}: residual {} (threshold {})", fmt17(output.error), fmt17(output.tolerance));
    emit_json(&output, c.out)?;
    Ok(pass)
}

trait HasResidual {
    fn residual(&self) -> f64;
}

impl HasResidual for crate::quadrature::PohozaevRecord {
    /// The worst of the main identity and its parts.
    fn residual(&self) -> f64 {
        self.sub_identities.iter().map(|s| s.residual).fold(self.residual, f64::max)
    }
}

impl HasResidual for crate::quadrature::AverageRecord {
    fn residual(&self) -> f64 {
        self.residual
    }
}

fn check_pohozaev(a: CheckArgs, cfg: &ConfigFile) -> Result<bool> {
    run_integral_check("pohozaev", a, cfg, pohozaev_check)
}

fn check_average(a: CheckArgs, cfg: &ConfigFile) -> Result<bool> {
    run_integral_check("average", a, cfg, average_identity_check)
}

fn check_mean_value(a: CheckArgs, cfg: &ConfigFile) -> Result<bool> {
    let s = Settings::for_command(cfg, &["check", "check.meanvalue"]);
    let c = check_common(&a, &s)?;
    let pole_t = s.pick(a.pole_t, "pole_t", parse_number)?;
    let field = s.pick(a.field.clone(), "field", text)?;
    s.reject_unknown()?;
    let n = c.n;
    let field = field.unwrap_or_else(|| if pole_t.is_some() { "pole".into() } else { "one".into() });
    let h: Box<dyn ScalarField> = match (field.as_str(), pole_t) {
        ("pole", Some(t0)) => {
            if t0.abs() <= c.radius * c.radius {
                return Err(Error::invalid(format!("the pole t = {t0} must lie outside the ball (|t| > R²)")));
            }
            let center = GroupPoint::new(vec![0.0; 2 * n.max(1)], t0)?;
            Box::new(TranslatedGaugePower { center, exponent: -2.0 * n as f64 })
        }
        ("pole", None) => return Err(Error::invalid("field pole needs --pole-t")),
        (_, Some(_)) => return Err(Error::invalid("--pole-t only applies to field pole")),
        ("one", None) => Box::new(FnField::new("1", |x: &[Jet]| {
            Ok(Jet::constant(1.0, x[0].num_vars(), x[0].order()))
        })),
        ("t", None) => Box::new(Coordinate(2 * n)),
        (other, None) => return Err(Error::invalid(format!("unknown field {other:?}"))),
    };
    let record = mean_value_check(h.as_ref(), n, c.radius, &c.spec)?;
    let scale = if record.pointwise != 0.0 { record.pointwise.abs() } else { 1.0 };
    let error = (record.solid_avg - record.pointwise)
        .abs()
        .max((record.surface_avg - record.pointwise).abs())
        / scale;
    let tolerance = c.tolerance.unwrap_or(MEAN_VALUE_TOL);
    let output = CheckOutput {
        check: "meanvalue",
        record,
        coarse_record: None,
        grid_error: None,
        error,
        tolerance,
        pass: error <= tolerance,
    };
    let pass = output.pass;
    eprintln!("check meanvalue: error {} (threshold {})", fmt17(error), fmt17(tolerance));
    emit_json(&output, c.out)?;
    Ok(pass)
}

#[derive(Serialize)]
struct BetaOutput {
    calibration: crate::quadrature::MeanValueCalibration,
    /// `(Q−2)β/R^{Q−1} ∫ |D_Hρ|²/|Dρ| dσ`, which should be 1.
    #[serde(serialize_with = "sig17")]
    surface_unit: f64,
    #[serde(serialize_with = "sig17")]
    tolerance: f64,
    #[serde(serialize_with = "sig17")]
    surface_tolerance: f64,
    pass: bool,
}

fn check_beta(a: CheckArgs, cfg: &ConfigFile) -> Result<bool> {
    let s = Settings::for_command(cfg, &["check", "check.beta"]);
    let c = check_common(&a, &s)?;
    s.reject_unknown()?;
    let calibration = calibrate_beta(c.n, c.radius, &c.spec)?;
    let q = 2.0 * c.n as f64 + 2.0;
    let area = surface_integral_gauge_sphere(|_, _| 1.0, c.n, c.radius, Measure::Weighted, &c.spec)?;
    let surface_unit = (q - 2.0) * calibration.beta_hat / c.radius.powf(q - 1.0) * area;
    let tolerance = c.tolerance.unwrap_or(BETA_TOL);
    let pass = calibration.residual <= tolerance && (surface_unit - 1.0).abs() <= SURFACE_UNIT_TOL;
    eprintln!(
        "check beta: beta_hat {} residual {} surface {}",
        fmt17(calibration.beta_hat),
        fmt17(calibration.residual),
        fmt17(surface_unit)
    );
    emit_json(&BetaOutput { calibration, surface_unit, tolerance, surface_tolerance: SURFACE_UNIT_TOL, pass }, c.out)?;
    Ok(pass)
}

fn domain_for(radius: f64, epsilon: f64) -> Result<ReducedDomain> {
    if epsilon == 0.0 {
        ReducedDomain::gauge_ball(radius)
    } else {
        ReducedDomain::perturbed(radius, epsilon)
    }
}

#[derive(Serialize)]
struct SolveOutput {
    metadata: SolutionMetadata,
    #[serde(serialize_with = "sig17")]
    mean_q: f64,
    #[serde(serialize_with = "sig17")]
    std_q: f64,
    #[serde(serialize_with = "sig17")]
    cv: f64,
    trace_samples: usize,
    /// `R^{α/2}` on the ball.
    #[serde(serialize_with = "sig17_opt")]
    neumann_target: Option<f64>,
    #[serde(serialize_with = "sig17")]
    pfunction_max_deviation: f64,
    pass: bool,
}

fn solve(a: SolveArgs, cfg: &ConfigFile) -> Result<bool> {
    let s = Settings::for_command(cfg, &["solve"]);
    let n = s.pick(a.n, "n", int)?.unwrap_or(1);
    let alpha = s.pick(a.alpha, "alpha", parse_number)?.unwrap_or(2.0);
    let radius = s.pick(a.radius, "radius", parse_number)?.unwrap_or(1.0);
    let epsilon = s.pick(a.epsilon, "epsilon", parse_number)?.unwrap_or(0.0);
    let h = s.pick(a.h, "h", parse_number)?.unwrap_or(DEFAULT_H);
    let samples = s.pick(a.samples, "samples", int)?.unwrap_or(DEFAULT_TRACE_SAMPLES);
    let out_dir = s.pick(a.out_dir, "out_dir", path)?.unwrap_or_else(|| PathBuf::from("."));
    let prefix = s.pick(a.prefix, "prefix", text)?.unwrap_or_else(|| "solve".into());
    s.reject_unknown()?;
    if samples < 2 {
        return Err(Error::invalid("samples must be at least 2"));
    }

    let domain = domain_for(radius, epsilon)?;
    let sol = assemble_and_solve(&build_grid(&domain, h)?, alpha, n)?;
    let trace = neumann_trace_with(&sol, samples);
    let pf = pfunction_on_grid(&sol);
    let target = (epsilon == 0.0).then(|| radius.powf(alpha / 2.0));
    let pass = target.is_none_or(|c| (trace.mean - c).abs() <= NEUMANN_REL_TOL * c);

    let mut solution_csv = Vec::new();
    sol.write_csv(&mut solution_csv)?;
    let mut trace_csv = Vec::new();
    trace.write_csv(&mut trace_csv)?;
    let summary = SolveOutput {
        metadata: sol.metadata(),
        mean_q: trace.mean,
        std_q: trace.std_dev,
        cv: trace.cv,
        trace_samples: trace.samples.len(),
        neumann_target: target,
        pfunction_max_deviation: pf.max_deviation,
        pass,
    };
    eprintln!("solve: {} nodes, mean q {}, cv {}", sol.grid().len(), fmt17(trace.mean), fmt17(trace.cv));
    let mut o = Outputs::default();
    o.add(out_dir.join(format!("{prefix}_solution.csv")), utf8(solution_csv));
    o.add(out_dir.join(format!("{prefix}_trace.csv")), utf8(trace_csv));
    o.add(out_dir.join(format!("{prefix}.json")), to_json(&summary)?);
    o.flush()?;
    Ok(pass)
}

fn utf8(bytes: Vec<u8>) -> String {
    String::from_utf8(bytes).expect("csv output is ASCII")
}

#[derive(Serialize)]
struct ConvergenceOutput {
    studies: Vec<ConvergenceStudy>,
    #[serde(serialize_with = "sig17")]
    monotone_slack: f64,
    pass: bool,
}

fn experiment_convergence(a: ExperimentArgs, cfg: &ConfigFile) -> Result<bool> {
    let s = Settings::for_command(cfg, &["experiment", "experiment.convergence"]);
    let n = s.pick(a.n, "n", int)?.unwrap_or(1);
    let alpha = s.pick(a.alpha, "alpha", parse_number)?;
    let alphas = s.pick(a.alphas.map(|l| l.0), "alphas", parse_number_list)?;
    let radius = s.pick(a.radius, "radius", parse_number)?.unwrap_or(1.0);
    let epsilon = s.pick(a.epsilon, "epsilon", parse_number)?.unwrap_or(0.0);
    let hs = s.pick(a.hs.map(|l| l.0), "hs", parse_number_list)?.unwrap_or_else(|| vec![1.0 / 32.0, 1.0 / 64.0, 1.0 / 128.0]);
    let out_dir = s.pick(a.out_dir, "out_dir", path)?.unwrap_or_else(|| PathBuf::from("."));
    let prefix = s.pick(a.prefix, "prefix", text)?.unwrap_or_else(|| "convergence".into());
    s.reject_unknown()?;
    let alphas = match (alpha, alphas) {
        (Some(_), Some(_)) => return Err(Error::invalid("give --alpha or --alphas, not both")),
        (Some(a), None) => vec![a],
        (None, Some(list)) => list,
        (None, None) => vec![2.0, 4.0],
    };
    let domain = domain_for(radius, epsilon)?;
    let studies: Vec<ConvergenceStudy> =
        alphas.iter().map(|&al| convergence_study(&domain, al, n, &hs)).collect::<Result<_>>()?;

    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["alpha", "h", "nodes", "max_err", "l2_err", "order_max", "order_l2"])?;
    let opt = |x: Option<f64>| x.map(fmt17).unwrap_or_default();
    for st in &studies {
        for r in &st.rows {
            w.write_record([
                fmt17(st.alpha),
                fmt17(r.h),
                r.nodes.to_string(),
                fmt17(r.max_err),
                fmt17(r.l2_err),
                opt(r.order_max),
                opt(r.order_l2),
            ])?;
        }
        eprintln!(
            "convergence alpha {}: min order {}",
            fmt17(st.alpha),
            st.min_order_max().map(fmt17).unwrap_or_else(|| "n/a".into())
        );
    }
    let csv_text = utf8(w.into_inner().map_err(|e| Error::Io(e.into_error()))?);
    let pass = studies.iter().all(|st| st.is_monotone(MONOTONE_SLACK));
    let mut o = Outputs::default();
    o.add(out_dir.join(format!("{prefix}.csv")), csv_text);
    o.add(
        out_dir.join(format!("{prefix}.json")),
        to_json(&ConvergenceOutput { studies, monotone_slack: MONOTONE_SLACK, pass })?,
    );
    o.flush()?;
    Ok(pass)
}

#[derive(Serialize)]
struct PerturbationRow {
    #[serde(serialize_with = "sig17")]
    epsilon: f64,
    #[serde(serialize_with = "sig17")]
    mean_q: f64,
    #[serde(serialize_with = "sig17")]
    cv: f64,
    #[serde(serialize_with = "sig17")]
    pfunction_max_deviation: f64,
}

#[derive(Serialize)]
struct PerturbationOutput {
    n: usize,
    #[serde(serialize_with = "sig17")]
    alpha: f64,
    #[serde(serialize_with = "sig17")]
    radius: f64,
    #[serde(serialize_with = "sig17")]
    h: f64,
    rows: Vec<PerturbationRow>,
    /// CV strictly increases with `|ε|`.
    pass: bool,
}

fn experiment_perturbation(a: ExperimentArgs, cfg: &ConfigFile) -> Result<bool> {
    let s = Settings::for_command(cfg, &["experiment", "experiment.perturbation"]);
    let n = s.pick(a.n, "n", int)?.unwrap_or(1);
    let alpha = s.pick(a.alpha, "alpha", parse_number)?.unwrap_or(2.0);
    let radius = s.pick(a.radius, "radius", parse_number)?.unwrap_or(1.0);
    let h = s.pick(a.h, "h", parse_number)?.unwrap_or(DEFAULT_H);
    let epsilons = s.pick(a.epsilons.map(|l| l.0), "epsilons", parse_number_list)?.unwrap_or_else(|| vec![0.0, 0.05, 0.1, 0.2]);
    let out_dir = s.pick(a.out_dir, "out_dir", path)?.unwrap_or_else(|| PathBuf::from("."));
    let prefix = s.pick(a.prefix, "prefix", text)?.unwrap_or_else(|| "perturbation".into());
    s.reject_unknown()?;

    let mut rows = Vec::new();
    for &epsilon in &epsilons {
        let sol = assemble_and_solve(&build_grid(&domain_for(radius, epsilon)?, h)?, alpha, n)?;
        let trace = neumann_trace_with(&sol, DEFAULT_TRACE_SAMPLES);
        let pf = pfunction_on_grid(&sol);
        eprintln!("perturbation epsilon {}: cv {}", fmt17(epsilon), fmt17(trace.cv));
        rows.push(PerturbationRow {
            epsilon,
            mean_q: trace.mean,
            cv: trace.cv,
            pfunction_max_deviation: pf.max_deviation,
        });
    }
    let mut order: Vec<&PerturbationRow> = rows.iter().collect();
    order.sort_by(|x, y| x.epsilon.abs().total_cmp(&y.epsilon.abs()));
    let pass = order.windows(2).all(|w| w[0].epsilon.abs() == w[1].epsilon.abs() || w[0].cv < w[1].cv);

    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["epsilon", "mean_q", "cv", "pfunction_max_deviation"])?;
    for r in &rows {
        w.write_record([fmt17(r.epsilon), fmt17(r.mean_q), fmt17(r.cv), fmt17(r.pfunction_max_deviation)])?;
    }
    let csv_text = utf8(w.into_inner().map_err(|e| Error::Io(e.into_error()))?);
    let mut o = Outputs::default();
    o.add(out_dir.join(format!("{prefix}.csv")), csv_text);
    o.add(
        out_dir.join(format!("{prefix}.json")),
        to_json(&PerturbationOutput { n, alpha, radius, h, rows, pass })?,
    );
    o.flush()?;
    Ok(pass)
}
