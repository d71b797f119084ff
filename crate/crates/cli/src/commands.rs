use std::collections::BTreeMap;

use choquard_core::bubble::{
    bubble_eval, bubble_laplacian, bubble_residual_terms, projected_bubble_first_order, projected_bubble_radial,
    remainder_bound, z_field, BubbleParams, DomainSpec,
};
use choquard_core::constants::{
    bubble_mass_a, bubble_mass_b, hls_sharp_constant, sobolev_constant, sphere_measure,
};
use choquard_core::green::{green_ball, robin_ball, BallGeometry};
use choquard_core::reduced_energy::{
    c_infinity, critical_point_with_threshold, energy_expansion, energy_unit, g_of_tau, m_integral, psi,
    ReducedEnergyModel,
};
use choquard_core::solver::{continuation, solve_from_ansatz, SolveReport};
use choquard_core::{Error, RadialGrid};

use crate::config::{ConfigError, RunConfig};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Constants,
    Bubble,
    Robin,
    ReducedEnergy,
    CriticalPoint,
    VerifyExpansion,
    Solve,
    Continuation,
}

impl Command {
    pub const ALL: [Command; 8] = [
        Command::Constants,
        Command::Bubble,
        Command::Robin,
        Command::ReducedEnergy,
        Command::CriticalPoint,
        Command::VerifyExpansion,
        Command::Solve,
        Command::Continuation,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Command::Constants => "constants",
            Command::Bubble => "bubble",
            Command::Robin => "robin",
            Command::ReducedEnergy => "reduced-energy",
            Command::CriticalPoint => "critical-point",
            Command::VerifyExpansion => "verify-expansion",
            Command::Solve => "solve",
            Command::Continuation => "continuation",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|c| c.name() == name)
    }

    fn uses_solver(self) -> bool {
        matches!(self, Command::VerifyExpansion | Command::Solve | Command::Continuation)
    }
}

/// Files and stdout lines produced by one command. Files are kept in memory
/// and written by a single writer afterwards.
#[derive(Debug, Default, Clone, PartialEq)]
pub struct Output {
    pub files: BTreeMap<String, Vec<u8>>,
    pub stdout: Vec<String>,
}

impl Output {
    fn line(&mut self, key: &str, value: impl std::fmt::Display) {
        self.stdout.push(format!("{key}={value}"));
    }

    fn file(&mut self, name: &str, bytes: Vec<u8>) {
        self.files.insert(name.to_string(), bytes);
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Status {
    Success,
    /// Ran to the end but some solve did not converge.
    NotConverged(String),
    /// A library call failed; outputs up to that point are kept.
    Failed(String),
}

/// Shortest decimal that reads back to the same `f64`.
pub fn fmt(x: f64) -> String {
    format!("{x:?}")
}

fn fmt_opt(x: Option<f64>) -> String {
    x.map(fmt).unwrap_or_default()
}

fn csv_bytes(header: &[&str], rows: &[Vec<String>]) -> Vec<u8> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header).expect("in-memory write");
    for r in rows {
        w.write_record(r).expect("in-memory write");
    }
    w.into_inner().expect("in-memory flush")
}

/// Checks the preconditions of `cmd` beyond those of the config itself.
pub fn validate_for(cmd: Command, cfg: &RunConfig) -> Result<(), ConfigError> {
    let p = cfg.params();
    if cmd.uses_solver() {
        if let Err(e) = p.require_solver_regime() {
            let key = if p.dim < 5 { "N" } else { "mu" };
            return Err(ConfigError::Invalid { key: key.into(), msg: e.to_string() });
        }
    }
    if cmd == Command::Bubble && !(cfg.mu < cfg.dim as f64 - 1.0) {
        return Err(ConfigError::Invalid {
            key: "mu".into(),
            msg: format!("the bubble residual needs mu < N - 1, got {}", cfg.mu),
        });
    }
    Ok(())
}

/// Runs `cmd`; assumes [`validate_for`] passed.
pub fn run_command(cmd: Command, cfg: &RunConfig) -> (Output, Status) {
    let mut out = Output::default();
    let res = match cmd {
        Command::Constants => constants(cfg, &mut out),
        Command::Bubble => bubble(cfg, &mut out),
        Command::Robin => robin(cfg, &mut out),
        Command::ReducedEnergy => reduced_energy(cfg, &mut out),
        Command::CriticalPoint => critical(cfg, &mut out),
        Command::VerifyExpansion => verify_expansion(cfg, &mut out),
        Command::Solve => solve(cfg, &mut out),
        Command::Continuation => run_continuation(cfg, &mut out),
    };
    let status = match res {
        Ok(s) => s,
        Err(e) => Status::Failed(e.to_string()),
    };
    (out, status)
}

type Run = Result<Status, Error>;

fn key_value_file(out: &mut Output, name: &str) {
    let mut text = out.stdout.join("\n");
    text.push('\n');
    out.file(name, text.into_bytes());
}

fn constants(cfg: &RunConfig, out: &mut Output) -> Run {
    let p = cfg.params();
    out.line("N", p.dim);
    out.line("mu", fmt(p.mu));
    out.line("two_star", fmt(p.two_star));
    out.line("two_mu_star", fmt(p.two_mu_star));
    out.line("omega_N", fmt(sphere_measure(p.dim)?));
    out.line("S", fmt(sobolev_constant(p.dim)?));
    out.line("C_HLS", fmt(hls_sharp_constant(p.dim, p.mu)?));
    out.line("A_HL", fmt(p.a_hl()));
    out.line("A_N", fmt(bubble_mass_a(p.dim)?));
    out.line("B_N", fmt(bubble_mass_b(p.dim)?));
    out.line("c_infinity", fmt(c_infinity(&p)?));
    key_value_file(out, "constants.txt");
    Ok(Status::Success)
}

fn bubble(cfg: &RunConfig, out: &mut Output) -> Run {
    let p = cfg.params();
    let dim = p.dim;
    let lambda = cfg.bubble_lambda();
    let b = BubbleParams::centered(dim, lambda)?;
    let d = DomainSpec::pierced_unit_ball(cfg.eps)?;
    let grid = RadialGrid::annulus(dim, cfg.eps, 1.0, cfg.quad.radial_nodes)?;
    let mut x = vec![0.0; dim];
    let mut rows = Vec::with_capacity(grid.len());
    for &r in grid.nodes() {
        x[0] = r;
        rows.push(vec![
            fmt(r),
            fmt(bubble_eval(&b, &x)?),
            fmt(z_field(&b, &x, 0)?),
            fmt(bubble_laplacian(&b, &x)?),
            fmt(projected_bubble_first_order(&b, &d, &x)?),
            fmt(projected_bubble_radial(dim, lambda, cfg.eps, r)?),
            fmt(remainder_bound(&b, &d, &x)?),
        ]);
    }
    out.file(
        "bubble.csv",
        csv_bytes(&["r", "U", "Z0", "minus_laplacian", "PU_first_order", "PU_exact", "remainder_bound"], &rows),
    );
    out.line("lambda", fmt(lambda));
    out.line("eps", fmt(cfg.eps));

    // Residual of the limit equation on [0, 3/lambda].
    let n = cfg.sample_points;
    let mut rows = Vec::with_capacity(n);
    let mut worst: f64 = 0.0;
    for k in 0..n {
        let r = 3.0 * k as f64 / (n - 1) as f64 / lambda;
        x[0] = r;
        let t = bubble_residual_terms(&p, &b, &x, &cfg.quad)?;
        worst = worst.max(t.relative());
        rows.push(vec![fmt(r), fmt(t.laplacian), fmt(t.nonlocal), fmt(t.residual()), fmt(t.relative())]);
    }
    out.file("residual.csv", csv_bytes(&["r", "minus_laplacian", "nonlocal", "residual", "relative"], &rows));
    out.line("max_relative_residual", fmt(worst));
    Ok(Status::Success)
}

fn robin(cfg: &RunConfig, out: &mut Output) -> Run {
    let dim = cfg.dim;
    let g = BallGeometry::unit(dim)?;
    let origin = vec![0.0; dim];
    out.line("robin_center", fmt(robin_ball(&g, &origin)?));
    let n = cfg.sample_points;
    let mut x = vec![0.0; dim];
    let mut rows = Vec::with_capacity(n);
    for k in 0..n {
        let r = 0.95 * (k + 1) as f64 / n as f64;
        x[0] = r;
        rows.push(vec![fmt(r), fmt(robin_ball(&g, &x)?), fmt(green_ball(&g, &x, &origin)?)]);
    }
    out.file("robin.csv", csv_bytes(&["r", "robin", "green_from_center"], &rows));
    key_value_file(out, "robin.txt");
    Ok(Status::Success)
}

fn linspace(a: f64, b: f64, n: usize) -> impl Iterator<Item = f64> {
    (0..n).map(move |k| a + (b - a) * k as f64 / (n - 1) as f64)
}

fn geomspace(a: f64, b: f64, n: usize) -> impl Iterator<Item = f64> {
    linspace(a.ln(), b.ln(), n).map(f64::exp)
}

fn reduced_energy(cfg: &RunConfig, out: &mut Output) -> Run {
    let p = cfg.params();
    let model = ReducedEnergyModel::unit_ball(p, cfg.quad)?;
    out.line("m", fmt(model.m));
    out.line("g0", fmt(model.g0));
    let mut rows = Vec::new();
    for t in linspace(0.0, cfg.tau_max, cfg.tau_points) {
        let mut tau = vec![0.0; p.dim];
        tau[0] = t;
        let m = m_integral(&p, &tau, &cfg.quad)?;
        let g = g_of_tau(&p, &tau, &cfg.quad)?;
        for l in geomspace(cfg.lambda_min, cfg.lambda_max, cfg.lambda_points) {
            rows.push(vec![fmt(t), fmt(l), fmt(m), fmt(g), fmt(psi(&model, &tau, l)?)]);
        }
    }
    out.file("landscape.csv", csv_bytes(&["tau", "lambda", "M", "g", "psi"], &rows));
    Ok(Status::Success)
}

fn critical(cfg: &RunConfig, out: &mut Output) -> Run {
    let p = cfg.params();
    let model = ReducedEnergyModel::unit_ball(p, cfg.quad)?;
    let c = critical_point_with_threshold(&model, cfg.degeneracy_threshold)?;
    let join = |v: &mut dyn Iterator<Item = f64>| v.map(fmt).collect::<Vec<_>>().join(",");
    out.line("tau_bar", join(&mut c.tau_bar.iter().copied()));
    out.line("mu_bar", fmt(c.mu_bar));
    out.line("lambda_bar", fmt(c.lambda_bar));
    out.line("m", fmt(model.m));
    out.line("g0", fmt(model.g0));
    out.line("hessian_mu", fmt(c.hessian_mu));
    for i in 0..p.dim {
        out.line(&format!("hessian_tau_row{i}"), join(&mut c.hessian_tau.row(i).iter().copied()));
    }
    out.line("hessian_mixed", join(&mut c.hessian_mixed.iter().copied()));
    out.line("gradient_tau", fmt(c.gradient_tau));
    out.line("normalized_determinant", fmt(c.normalized_determinant));
    out.line("nondegenerate", c.nondegenerate);
    key_value_file(out, "critical_point.txt");
    Ok(Status::Success)
}

const REPORT_HEADER: [&str; 7] = ["eps", "lambda_fit", "lambda_fit_scaled", "energy", "residual", "iters", "converged"];

fn report_row(r: &SolveReport) -> Vec<String> {
    vec![
        fmt(r.eps),
        fmt_opt(r.lambda_fit),
        fmt_opt(r.lambda_fit_scaled),
        fmt(r.energy),
        fmt(r.residual_norm),
        r.newton_iterations.to_string(),
        r.converged.to_string(),
    ]
}

fn diagnostics_row(r: &SolveReport) -> Vec<String> {
    vec![fmt(r.eps), fmt(r.max_u), fmt_opt(r.phi_norm)]
}

fn solution_csv(r: &SolveReport) -> Vec<u8> {
    let rows: Vec<Vec<String>> = r
        .solution
        .grid
        .nodes()
        .iter()
        .zip(&r.solution.values)
        .map(|(x, u)| vec![fmt(*x), fmt(*u)])
        .collect();
    csv_bytes(&["r", "u"], &rows)
}

fn convergence_status(reports: &[SolveReport], expected: usize) -> Status {
    match reports.iter().find(|r| !r.converged) {
        Some(r) => Status::NotConverged(format!(
            "Newton did not converge at eps = {} (residual {} after {} iterations)",
            r.eps, r.residual_norm, r.newton_iterations
        )),
        None if reports.len() < expected => Status::NotConverged("continuation stopped early".into()),
        None => match reports.iter().find(|r| r.lambda_fit.is_none()) {
            Some(r) => Status::NotConverged(format!("no bubble to fit at eps = {}", r.eps)),
            None => Status::Success,
        },
    }
}

fn solve(cfg: &RunConfig, out: &mut Output) -> Run {
    let r = solve_from_ansatz(cfg.eps, &cfg.params(), None, &cfg.solver())?;
    out.file("solve.csv", csv_bytes(&REPORT_HEADER, &[report_row(&r)]));
    out.file("solution.csv", solution_csv(&r));
    out.line("converged", r.converged);
    out.line("lambda_fit_scaled", fmt_opt(r.lambda_fit_scaled));
    out.line("energy", fmt(r.energy));
    Ok(convergence_status(std::slice::from_ref(&r), 1))
}

fn run_continuation(cfg: &RunConfig, out: &mut Output) -> Run {
    let reps = continuation(&cfg.eps_schedule, &cfg.params(), &cfg.solver())?;
    let rows: Vec<Vec<String>> = reps.iter().map(report_row).collect();
    out.file("continuation.csv", csv_bytes(&REPORT_HEADER, &rows));
    let rows: Vec<Vec<String>> = reps.iter().map(diagnostics_row).collect();
    out.file("diagnostics.csv", csv_bytes(&["eps", "max_u", "phi_norm"], &rows));
    out.line("steps", reps.len());
    Ok(convergence_status(&reps, cfg.eps_schedule.len()))
}

fn verify_expansion(cfg: &RunConfig, out: &mut Output) -> Run {
    let p = cfg.params();
    let model = ReducedEnergyModel::unit_ball(p, cfg.quad)?;
    let c = critical_point_with_threshold(&model, cfg.degeneracy_threshold)?;
    let origin = vec![0.0; p.dim];
    let c_inf = c_infinity(&p)?;
    let coefficient = energy_unit(&p) * psi(&model, &origin, c.lambda_bar)?;
    out.line("c_infinity", fmt(c_inf));
    out.line("predicted_coefficient", fmt(coefficient));
    let reps = continuation(&cfg.eps_schedule, &p, &cfg.solver())?;
    let mut rows = Vec::new();
    let mut last = None;
    for r in &reps {
        let half = 0.5 * (p.n() - 2.0);
        let gap = (r.energy - c_inf) / r.eps.powf(half);
        let rel = (gap - coefficient).abs() / coefficient;
        rows.push(vec![
            fmt(r.eps),
            fmt(r.energy),
            fmt(energy_expansion(&model, r.eps, c.lambda_bar, &origin)?),
            fmt_opt(r.lambda_fit_scaled),
            fmt(gap),
            fmt(rel),
        ]);
        last = Some(rel);
    }
    out.file(
        "expansion.csv",
        csv_bytes(&["eps", "energy", "predicted_energy", "lambda_fit_scaled", "scaled_gap", "relative_error"], &rows),
    );
    out.line("relative_error_last", fmt_opt(last));
    Ok(convergence_status(&reps, cfg.eps_schedule.len()))
}
