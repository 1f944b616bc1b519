use fgs_core::analysis::{
    bessel_kernel, kernel_l1_mass, resolvent_kernel, small_r_slope, symmetry_diagnostic, KernelError, KernelTable,
};
use fgs_core::model::{check_bl_conditions, make_spatial_problem, Descriptor, ModelError, ValidationLattice};
use fgs_core::solvers::{ground_state_solve, optimal_path_scan, spatial_workflow, SolveReport, SolverConfig, SolverError};
use fgs_core::spectral::{write_fgs1, RealField};
use serde::Serialize;

use crate::config::{GridSpec, KernelChoice, RunConfig};
use crate::output::{to_csv, to_json, Artifacts};
use crate::CliError;

/// Common top-level layout of the JSON reports.
#[derive(Debug, Serialize)]
pub struct Report<'a, D: Serialize> {
    pub problem: String,
    pub grid: &'a GridSpec,
    pub converged: bool,
    pub iterations: usize,
    pub energy: f64,
    pub pohozaev_residual: Option<f64>,
    pub grad_norm: f64,
    pub c_mp_estimate: Option<f64>,
    pub d_inf: Option<f64>,
    pub d_mp_bound: Option<f64>,
    pub boundary_mass: f64,
    pub wall_time_s: f64,
    pub details: D,
}

pub(crate) fn solver_error(e: SolverError) -> CliError {
    match e {
        SolverError::BadConfig(msg) => CliError::ConfigRange(msg),
        other => CliError::Numeric(other.to_string()),
    }
}

fn model_error(key: &str, e: ModelError) -> CliError {
    match e {
        ModelError::InvalidParameter(_) => CliError::ConfigRange(key.to_string()),
        other => CliError::CheckFailed(other.to_string()),
    }
}

fn kernel_error(e: KernelError) -> CliError {
    match e {
        KernelError::InvalidArgument(_) => CliError::ConfigRange("kernel".into()),
        KernelError::BadDelta(_) => CliError::ConfigRange("delta0".into()),
        other => CliError::Numeric(other.to_string()),
    }
}

/// Wall time is dropped in single-thread mode so reports are reproducible.
fn scrub(mut report: SolveReport, cfg: &RunConfig) -> SolveReport {
    if cfg.threads == 1 {
        report.wall_time_s = 0.0;
    }
    report
}

fn solved(cfg: &RunConfig) -> Result<(RealField, SolveReport), CliError> {
    let grid = cfg.make_grid()?;
    let f = cfg.make_nonlinearity()?;
    let (u, report) = ground_state_solve(&grid, &f, &cfg.solver).map_err(solver_error)?;
    Ok((u, scrub(report, cfg)))
}

#[derive(Debug, Serialize)]
struct SolveDetails<'a> {
    nonlinearity: &'a Descriptor,
    solver: &'a SolverConfig,
    report: &'a SolveReport,
    symmetry: fgs_core::analysis::SymmetryReport,
    structure: fgs_core::model::BlReport,
}

pub fn solve(cfg: &RunConfig) -> Result<Artifacts, CliError> {
    let f = cfg.make_nonlinearity()?;
    let (u, report) = solved(cfg)?;
    let details = SolveDetails {
        nonlinearity: f.descriptor(),
        solver: &cfg.solver,
        report: &report,
        symmetry: symmetry_diagnostic(&u),
        structure: check_bl_conditions(&f, cfg.grid.dim, cfg.grid.alpha, 1000),
    };
    let out = Report {
        problem: f.descriptor().name.clone(),
        grid: &cfg.grid,
        converged: report.converged,
        iterations: report.iterations,
        energy: report.energy,
        pohozaev_residual: Some(report.pohozaev_residual),
        grad_norm: report.grad_norm,
        c_mp_estimate: Some(report.c_mp_estimate),
        d_inf: None,
        d_mp_bound: None,
        boundary_mass: report.boundary_mass,
        wall_time_s: report.wall_time_s,
        details,
    };
    let mut snapshot = Vec::new();
    write_fgs1(&u, &mut snapshot).map_err(|e| CliError::Output(e.to_string()))?;
    let mut a = Artifacts::default();
    a.add("report.json", to_json(&out)?);
    a.add("ground_state.fgs1", snapshot);
    a.stdout = format!(
        "energy {:.10e} iterations {} converged {}\n",
        report.energy, report.iterations, report.converged
    );
    Ok(a)
}

pub fn path_scan(cfg: &RunConfig) -> Result<Artifacts, CliError> {
    let f = cfg.make_nonlinearity()?;
    let (u, _) = solved(cfg)?;
    let samples = optimal_path_scan(&u, &f, (cfg.path.tmin, cfg.path.tmax), cfg.path.samples);
    let mut a = Artifacts::default();
    a.add(
        "path_scan.csv",
        to_csv(&["t", "energy", "g"], samples.iter().map(|s| vec![s.t, s.energy, s.g_value]))?,
    );
    a.stdout = format!("{} samples on [{}, {}]\n", samples.len(), cfg.path.tmin, cfg.path.tmax);
    Ok(a)
}

pub fn spatial(cfg: &RunConfig) -> Result<Artifacts, CliError> {
    let grid = cfg.make_grid()?;
    let spec = cfg.make_spatial()?;
    let sp = make_spatial_problem(spec, &ValidationLattice::new(cfg.grid.dim)).map_err(|e| model_error("spatial", e))?;
    let mut r = spatial_workflow(&sp, &grid, &cfg.solver).map_err(solver_error)?;
    r.limit = scrub(r.limit, cfg);
    #[derive(Serialize)]
    struct Details<'a> {
        problem: &'a crate::config::SpatialProblem,
        validation: &'a fgs_core::model::SpatialReport,
        workflow: &'a fgs_core::solvers::SpatialReportOut,
    }
    let out = Report {
        problem: sp.name().to_string(),
        grid: &cfg.grid,
        converged: r.descent_converged,
        iterations: r.descent_iterations,
        energy: r.energy_j,
        pohozaev_residual: r.pohozaev_spatial,
        grad_norm: r.descent_grad_norm,
        c_mp_estimate: Some(r.d_mp_bound),
        d_inf: Some(r.d_inf),
        d_mp_bound: Some(r.d_mp_bound),
        boundary_mass: r.boundary_mass,
        wall_time_s: r.limit.wall_time_s,
        details: Details {
            problem: &cfg.spatial,
            validation: sp.report(),
            workflow: &r,
        },
    };
    let mut a = Artifacts::default();
    a.add("spatial_report.json", to_json(&out)?);
    a.stdout = format!("d_inf {:.10e} d_mp_bound {:.10e} margin {:.3e}\n", r.d_inf, r.d_mp_bound, r.margin);
    Ok(a)
}

#[derive(Debug, Serialize)]
struct KernelSummary {
    kind: KernelChoice,
    #[serde(rename = "N")]
    dim: usize,
    alpha: f64,
    samples: usize,
    positive: bool,
    decreasing: bool,
    l1_mass: Option<f64>,
    small_r_slope: Option<f64>,
    delta0: Option<f64>,
    poly_exponent: Option<f64>,
    exp_rate: Option<f64>,
    noise_floor: Option<f64>,
    resolved_radius: Option<f64>,
    positive_resolved: Option<bool>,
    decreasing_resolved: Option<bool>,
}

pub fn kernel(cfg: &RunConfig) -> Result<Artifacts, CliError> {
    let k = &cfg.kernel;
    let (alpha, dim) = (cfg.grid.alpha, cfg.grid.dim);
    let (table, summary): (KernelTable, KernelSummary) = match k.kind {
        KernelChoice::Bessel => {
            let n = k.samples;
            let radii: Vec<f64> = (0..n)
                .map(|i| k.r_min * (k.r_max / k.r_min).powf(i as f64 / (n - 1) as f64))
                .collect();
            let table = bessel_kernel(alpha, dim, &radii).map_err(kernel_error)?;
            let mass = kernel_l1_mass(alpha, dim, k.r_min, k.r_max).map_err(kernel_error)?;
            let slope_hi = (100.0 * k.r_min).min(k.r_max);
            let slope = small_r_slope(alpha, dim, k.r_min, slope_hi, 20).map_err(kernel_error)?;
            let summary = KernelSummary {
                kind: k.kind,
                dim,
                alpha,
                samples: n,
                positive: table.is_positive(),
                decreasing: table.is_decreasing(),
                l1_mass: Some(mass),
                small_r_slope: Some(slope),
                delta0: None,
                poly_exponent: None,
                exp_rate: None,
                noise_floor: None,
                resolved_radius: None,
                positive_resolved: None,
                decreasing_resolved: None,
            };
            (table, summary)
        }
        KernelChoice::Resolvent => {
            let grid = cfg.make_grid()?;
            let r = resolvent_kernel(alpha, k.delta0, &grid).map_err(kernel_error)?;
            let summary = KernelSummary {
                kind: k.kind,
                dim,
                alpha,
                samples: r.table.radii.len(),
                positive: r.positive_beyond_one,
                decreasing: r.decreasing_beyond_one,
                l1_mass: None,
                small_r_slope: None,
                delta0: Some(k.delta0),
                poly_exponent: Some(r.poly_exponent),
                exp_rate: Some(r.exp_rate),
                noise_floor: Some(r.noise_floor),
                resolved_radius: Some(r.resolved_radius),
                positive_resolved: Some(r.positive_resolved),
                decreasing_resolved: Some(r.decreasing_resolved),
            };
            (r.table, summary)
        }
    };
    let mut a = Artifacts::default();
    a.add(
        "kernel.csv",
        to_csv(&["r", "value"], table.radii.iter().zip(&table.values).map(|(r, v)| vec![*r, *v]))?,
    );
    a.add("kernel_summary.json", to_json(&summary)?);
    a.stdout = format!("{} radii\n", table.radii.len());
    Ok(a)
}
