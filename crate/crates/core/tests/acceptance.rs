//! Acceptance run: one `[PASS]`/`[FAIL]` line per criterion. Thresholds are
//! fixed below and are not read from the library's defaults.

use heis_overdet::calculus::{FnField, GroupPoint, Jet, TranslatedGaugePower};
use heis_overdet::lab::{
    default_grid, master_grid, run_suite, sample_reduced, GridEntry, IdentityId, SampleConfig,
};
use heis_overdet::quadrature::{
    average_identity_check, calibrate_beta, mean_value_check, pohozaev_check, QuadratureSpec,
    USource,
};
use heis_overdet::reduced::{
    build_matrix_bundle, frobenius_deficit, pfunction, reduced_jet, rhs_sum_of_squares,
    weight_reduced, ReducedCandidate, Variant,
};
use heis_overdet::solver::{
    assemble_and_solve, build_grid, convergence_study, neumann_trace, ReducedDomain,
};
use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

const C1_TOL: f64 = 1e-9;
const C1_POINTS: usize = 1000;
const C1_BUDGET: Duration = Duration::from_secs(120);
const C2_TOL: f64 = 1e-10;
const C2_POINTS: usize = 10_000;
const C3_SQUARES_TOL: f64 = 1e-11;
const C3_V_TOL: f64 = 1e-12;
const C3_POINTS: u64 = 1000;
const C4_TOL: f64 = 1e-8;
const C5_BETA_TOL: f64 = 1e-8;
const C5_SURFACE_TOL: f64 = 1e-6;
const C5_POLE_TOL: f64 = 1e-5;
const C6_ORDER_ALPHA4: f64 = 1.9;
const C6_ORDER_ALPHA2: f64 = 1.5;
const C6_NEUMANN_TOL: f64 = 0.01;
const C6_SOLVE_BUDGET: Duration = Duration::from_secs(60);
const C7_CV_FLOOR: f64 = 1e-2;
const C7_SEPARATION: f64 = 5.0;
const C8_FACTOR: f64 = 5.0;
const H_FINE: f64 = 1.0 / 128.0;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome { pass, detail: detail.into() }
}

fn c1_master_suite() -> Outcome {
    let start = Instant::now();
    let cfg = SampleConfig::default().with_points(C1_POINTS);
    let report = run_suite(&master_grid(), &cfg).expect("master suite runs");
    let elapsed = start.elapsed();
    let worst = report.reports.iter().map(|r| r.max_rel_err).fold(0.0, f64::max);
    let entries = report.reports.len();
    outcome(
        worst <= C1_TOL && elapsed <= C1_BUDGET && entries == 54,
        format!("{entries} entries, max rel err {worst:.3e} <= {C1_TOL:e}, {:.1}s", elapsed.as_secs_f64()),
    )
}

fn c2_closed_forms() -> Outcome {
    let grid: Vec<GridEntry> = default_grid()
        .into_iter()
        .filter(|e| {
            matches!(
                e.identity,
                IdentityId::DerfaAll
                    | IdentityId::Dhrho
                    | IdentityId::ZHomogeneity
                    | IdentityId::UalphaPde
                    | IdentityId::FundamentalSolution
            )
        })
        .collect();
    let cfg = SampleConfig::default().with_points(C2_POINTS);
    let report = run_suite(&grid, &cfg).expect("closed-form suite runs");
    let worst = report.reports.iter().map(|r| r.max_rel_err).fold(0.0, f64::max);
    outcome(worst <= C2_TOL, format!("{} entries, max rel err {worst:.3e}", report.reports.len()))
}

fn c3_equality_case() -> Outcome {
    let cfg = SampleConfig::default();
    let mut worst_sq: f64 = 0.0;
    let mut worst_v: f64 = 0.0;
    let mut worst_v_raw: f64 = 0.0;
    let radius: f64 = 1.0;
    for n in 1..=4 {
        let variants: Vec<Variant> =
            [Variant::ToricGeneral, Variant::ToricN1, Variant::ToricN2, Variant::Cylindrical]
                .into_iter()
                .filter(|v| v.accepts(n))
                .collect();
        for alpha in [0.5, 1.0, 2.0, 3.0, 3.9, 4.0] {
            let u = ReducedCandidate::new(alpha, radius).unwrap();
            for i in 0..C3_POINTS {
                let (p, _) = sample_reduced(&cfg, n, i);
                let jet = reduced_jet(&u, &p, 3).unwrap();
                let f = weight_reduced(&p, alpha);
                let scale = f * f * (1.0 + p.gauge4());
                let m = build_matrix_bundle(&jet, &p, alpha).unwrap().m;
                worst_sq = worst_sq.max(frobenius_deficit(&m).abs() / scale);
                for v in &variants {
                    let sos = rhs_sum_of_squares(*v, &jet, &p, alpha).unwrap();
                    for (_, term) in &sos.terms {
                        worst_sq = worst_sq.max(term.abs() / scale);
                    }
                }
                // v = 4g − αU subtracts two terms of size ρ^α, so for ρ > R the
                // error is relative to ρ^α rather than R^α
                let ra = radius.powf(alpha);
                let err = (pfunction(&jet, &p, alpha).unwrap() - ra).abs();
                worst_v = worst_v.max(err / ra.max(p.gauge4().powf(alpha / 4.0)));
                worst_v_raw = worst_v_raw.max(err / ra);
            }
        }
    }
    outcome(
        worst_sq <= C3_SQUARES_TOL && worst_v <= C3_V_TOL,
        format!(
            "max square/deficit {worst_sq:.3e}, max |v - R^a|/max(R^a, rho^a) {worst_v:.3e} (against R^a alone {worst_v_raw:.3e})"
        ),
    )
}

fn c4_pohozaev() -> Outcome {
    let spec = QuadratureSpec::default();
    let mut worst: f64 = 0.0;
    let mut subs = 0;
    for n in [1, 2] {
        for alpha in [2.0, 4.0] {
            let r = pohozaev_check(alpha, n, 1.0, USource::Analytic, &spec).unwrap();
            worst = worst.max(r.residual);
            for s in &r.sub_identities {
                worst = worst.max(s.residual);
                subs += 1;
            }
        }
    }
    outcome(worst <= C4_TOL && subs == 12, format!("max residual {worst:.3e} over 4 cases and {subs} sub-identities"))
}

fn c5_mean_value() -> Outcome {
    let spec = QuadratureSpec::default();
    let one = FnField::new("1", |c: &[Jet]| Ok(Jet::constant(1.0, c[0].num_vars(), c[0].order())));
    let mut beta: f64 = 0.0;
    let mut surface: f64 = 0.0;
    let mut pole: f64 = 0.0;
    for n in [1, 2] {
        beta = beta.max(calibrate_beta(n, 1.0, &spec).unwrap().residual);
        let r = mean_value_check(&one, n, 1.0, &spec).unwrap();
        surface = surface.max((r.surface_avg - 1.0).abs());
        let h = TranslatedGaugePower {
            center: GroupPoint::new(vec![0.0; 2 * n], 2.0).unwrap(),
            exponent: -2.0 * n as f64,
        };
        let r = mean_value_check(&h, n, 1.0, &spec).unwrap();
        let e = (r.solid_avg - r.pointwise).abs().max((r.surface_avg - r.pointwise).abs()) / r.pointwise.abs();
        pole = pole.max(e);
    }
    outcome(
        beta <= C5_BETA_TOL && surface <= C5_SURFACE_TOL && pole <= C5_POLE_TOL,
        format!("beta drift {beta:.3e}, |surface - 1| {surface:.3e}, pole rel err {pole:.3e}"),
    )
}

fn c6_solver() -> Outcome {
    let ball = ReducedDomain::gauge_ball(1.0).unwrap();
    let hs = [1.0 / 32.0, 1.0 / 64.0, H_FINE];
    let o4 = convergence_study(&ball, 4.0, 1, &hs).unwrap().min_order_max().unwrap();
    let o2 = convergence_study(&ball, 2.0, 1, &hs).unwrap().min_order_max().unwrap();
    let grid = build_grid(&ball, H_FINE).unwrap();
    let mut worst_q: f64 = 0.0;
    let mut slowest = Duration::ZERO;
    for alpha in [2.0, 4.0] {
        let start = Instant::now();
        let sol = assemble_and_solve(&grid, alpha, 1).unwrap();
        slowest = slowest.max(start.elapsed());
        let c = 1.0f64.powf(alpha / 2.0);
        worst_q = worst_q.max((neumann_trace(&sol).mean - c).abs() / c);
    }
    outcome(
        o4 >= C6_ORDER_ALPHA4 && o2 >= C6_ORDER_ALPHA2 && worst_q <= C6_NEUMANN_TOL && slowest <= C6_SOLVE_BUDGET,
        format!(
            "order a=4 {o4:.3}, a=2 {o2:.3}; mean q rel err {worst_q:.3e}; slowest solve {:.2}s",
            slowest.as_secs_f64()
        ),
    )
}

fn c7_symmetry_detection() -> Outcome {
    let cv = |eps: f64| {
        let d = ReducedDomain::perturbed(1.0, eps).unwrap();
        let sol = assemble_and_solve(&build_grid(&d, H_FINE).unwrap(), 2.0, 1).unwrap();
        neumann_trace(&sol).cv
    };
    let c: Vec<f64> = [0.0, 0.05, 0.1, 0.2].into_iter().map(cv).collect();
    outcome(
        c[0] <= C7_CV_FLOOR && c[1] < c[2] && c[2] < c[3] && c[3] >= C7_SEPARATION * c[0],
        format!("CV(0) {:.3e}, CV(0.05) {:.3e}, CV(0.1) {:.3e}, CV(0.2) {:.3e}", c[0], c[1], c[2], c[3]),
    )
}

fn c8_average_identity() -> Outcome {
    let spec = QuadratureSpec::default();
    let ball = ReducedDomain::gauge_ball(1.0).unwrap();
    let residual = |h: f64| {
        let sol = assemble_and_solve(&build_grid(&ball, h).unwrap(), 2.0, 1).unwrap();
        average_identity_check(2.0, 1, 1.0, USource::Grid(&sol), &spec).unwrap().residual
    };
    let fine = residual(H_FINE);
    let coarse = residual(2.0 * H_FINE);
    let grid_error = (fine - coarse).abs();
    outcome(
        fine <= C8_FACTOR * grid_error,
        format!("residual {fine:.3e}, grid error {grid_error:.3e} (coarse {coarse:.3e})"),
    )
}

fn c9_determinism() -> Outcome {
    let exe = env!("CARGO_BIN_EXE_heis-overdet");
    let runs: Vec<(&str, Vec<&str>, Vec<&str>)> = vec![
        ("verify", vec!["verify", "--suite", "master", "--num-points", "50", "--seed", "7", "--out", "{d}/verify.json"], vec!["verify.json"]),
        ("check pohozaev", vec!["check", "pohozaev", "--n", "2", "--alpha", "2", "--out", "{d}/poh.json"], vec!["poh.json"]),
        ("check average", vec!["check", "average", "--source", "grid", "--h", "1/32", "--out", "{d}/avg.json"], vec!["avg.json"]),
        ("check meanvalue", vec!["check", "meanvalue", "--field", "pole", "--pole-t", "2", "--out", "{d}/mv.json"], vec!["mv.json"]),
        ("check beta", vec!["check", "beta", "--n", "2", "--out", "{d}/beta.json"], vec!["beta.json"]),
        ("solve", vec!["solve", "--epsilon", "0.1", "--h", "1/64", "--out-dir", "{d}"], vec!["solve_solution.csv", "solve_trace.csv", "solve.json"]),
        ("experiment convergence", vec!["experiment", "convergence", "--hs", "1/16,1/32", "--out-dir", "{d}"], vec!["convergence.csv", "convergence.json"]),
        ("experiment perturbation", vec!["experiment", "perturbation", "--h", "1/32", "--out-dir", "{d}"], vec!["perturbation.csv", "perturbation.json"]),
    ];
    let mut failures = Vec::new();
    for (name, args, files) in &runs {
        let dirs = [tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap()];
        for d in &dirs {
            let args: Vec<String> =
                args.iter().map(|a| a.replace("{d}", d.path().to_str().unwrap())).collect();
            let status = Command::new(exe).args(&args).output().unwrap().status;
            if status.code() != Some(0) {
                failures.push(format!("{name} exited {status}"));
            }
        }
        for f in files {
            let read = |d: &Path| std::fs::read(d.join(f)).unwrap_or_default();
            let (a, b) = (read(dirs[0].path()), read(dirs[1].path()));
            if a.is_empty() || a != b {
                failures.push(format!("{name}: {f} differs or is missing"));
            }
        }
    }
    let total: usize = runs.iter().map(|r| r.2.len()).sum();
    if failures.is_empty() {
        outcome(true, format!("{} commands, {total} files byte-identical across two runs", runs.len()))
    } else {
        outcome(false, failures.join("; "))
    }
}

fn main() {
    let criteria: [(&str, &str, fn() -> Outcome); 9] = [
        ("C1", "master identity suite", c1_master_suite),
        ("C2", "closed-form suite", c2_closed_forms),
        ("C3", "equality case", c3_equality_case),
        ("C4", "Pohozaev identity", c4_pohozaev),
        ("C5", "mean-value formulas", c5_mean_value),
        ("C6", "solver reproduction", c6_solver),
        ("C7", "symmetry detection", c7_symmetry_detection),
        ("C8", "weighted-average identity", c8_average_identity),
        ("C9", "determinism", c9_determinism),
    ];
    let mut failed = 0;
    for (id, name, run) in criteria {
        let o = run();
        let tag = if o.pass { "PASS" } else { "FAIL" };
        println!("[{tag}] {id} {name}: {}", o.detail);
        if !o.pass {
            failed += 1;
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
