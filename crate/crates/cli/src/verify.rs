//! The invariant battery behind `fgs verify`.

use std::f64::consts::PI;

use fgs_core::analysis::{
    abs_inequality_check, bessel_kernel, comparison_check, kernel_l1_mass, resolvent_kernel, COMPARISON_TOL,
};
use fgs_core::functionals::{
    augmented_I, comparison_I_bar, dtheta_I, energy_I, g_of_t, grad_I, pohozaev_P,
};
use fgs_core::model::{build_envelope, gaussian_bump_spec, make_spatial_problem, AutonomousNonlinearity, ValidationLattice};
use fgs_core::solvers::{
    gradient_fd_check, ground_state_solve, ground_state_solve_from, mountain_pass_estimate, nehari_project,
    pohozaev_project, FdFunctional, SolverConfig, SolverError,
};
use fgs_core::spectral::{
    apply_fractional_op, apply_multiplier, dilate_field, gaussian_bump, norm_alpha, norm_alpha_sq, random_smooth_field,
    resolvent_solve, to_spectral, Grid, RealField, FOUR_PI_SQ,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::{json, Value};

use crate::config::RunConfig;
use crate::output::{to_json, Artifacts};

#[derive(Debug, Serialize)]
pub struct SuiteResult {
    pub name: &'static str,
    pub passed: bool,
    pub detail: Value,
}

type Outcome = Result<(bool, Value), String>;

struct Suite {
    name: &'static str,
    run: fn(u64) -> Outcome,
}

fn err(e: impl std::fmt::Display) -> String {
    e.to_string()
}

fn rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    r.set_stream(stream);
    r
}

fn cubic() -> AutonomousNonlinearity {
    AutonomousNonlinearity::power(3.0).expect("cubic")
}

fn small_grids() -> Vec<Grid> {
    vec![
        Grid::new(1, 0.5, 8.0, 64).expect("grid"),
        Grid::new(2, 0.75, 6.0, 16).expect("grid"),
        Grid::new(3, 0.4, 5.0, 8).expect("grid"),
    ]
}

fn parseval(seed: u64) -> Outcome {
    let grids = small_grids();
    let mut r = rng(seed, 1);
    let mut worst: f64 = 0.0;
    for k in 0..100 {
        let u = random_smooth_field(&grids[k % 3], &mut r, true);
        let physical = u.l2_norm_sq();
        let spectral = u.grid().box_volume() * to_spectral(&u).coeffs().iter().map(|c| c.norm_sqr()).sum::<f64>();
        worst = worst.max((physical - spectral).abs() / physical);
    }
    Ok((worst <= 1e-10, json!({"fields": 100, "max_rel_error": worst})))
}

fn multiplier_symmetry(seed: u64) -> Outcome {
    let grids = small_grids();
    let mut r = rng(seed, 2);
    for k in 0..30 {
        let u = random_smooth_field(&grids[k % 3], &mut r, true);
        let c = r.gen_range(0.1..3.0);
        apply_multiplier(&u, |xi| (-c * xi.iter().map(|x| x * x).sum::<f64>()).exp()).map_err(err)?;
        apply_fractional_op(&u).map_err(err)?;
    }
    Ok((true, json!({"fields": 30})))
}

fn dilation_group(seed: u64) -> Outcome {
    let grid = Grid::new(1, 0.5, 12.0, 256).map_err(err)?;
    let mut r = rng(seed, 3);
    let mut worst: f64 = 0.0;
    for _ in 0..20 {
        let (s, t, sigma) = (r.gen_range(0.8..1.25), r.gen_range(0.8..1.25), r.gen_range(0.8..1.5));
        let u = gaussian_bump(&grid, &[0.0], sigma, 1.0);
        let twice = dilate_field(&dilate_field(&u, s).map_err(err)?, t).map_err(err)?;
        let once = dilate_field(&u, s * t).map_err(err)?;
        worst = worst.max(twice.max_abs_diff(&once).map_err(err)?);
    }
    Ok((worst < 1e-8, json!({"pairs": 20, "max_error": worst})))
}

fn resolvent_inverse(seed: u64) -> Outcome {
    let grids = small_grids();
    let mut r = rng(seed, 4);
    let mut worst: f64 = 0.0;
    for k in 0..30 {
        let g = random_smooth_field(&grids[k % 3], &mut r, true);
        let delta0 = r.gen_range(0.01..0.99);
        let v = resolvent_solve(&g, delta0).map_err(err)?;
        let back = apply_fractional_op(&v).map_err(err)?.axpy(-(1.0 - delta0), &v).map_err(err)?;
        worst = worst.max(back.max_abs_diff(&g).map_err(err)? / g.max_abs());
    }
    Ok((worst <= 1e-10, json!({"fields": 30, "max_rel_error": worst})))
}

fn rectification(seed: u64) -> Outcome {
    let grid = Grid::new(2, 0.75, 8.0, 32).map_err(err)?;
    let rep = abs_inequality_check(100, &grid, seed);
    Ok((rep.passed, serde_json::to_value(&rep).map_err(err)?))
}

fn envelope_shape(_seed: u64) -> Outcome {
    let f = cubic();
    let (delta0, p0) = (0.25, 2.0);
    let env = build_envelope(&f, delta0, 0.7, p0, 20.0, 4096, 8.0).map_err(err)?;
    let mut ok = true;
    let mut zero_until: f64 = 0.0;
    for i in 1..env.nodes.len() {
        let s = env.nodes[i];
        ok &= env.h_bar[i] >= env.h[i];
        ok &= (env.h_bar[i] == 0.0) == (env.rho[i] == 0.0);
        if i > 1 {
            ok &= env.h_bar[i] / s.powf(p0) >= env.h_bar[i - 1] / env.nodes[i - 1].powf(p0);
        }
        ok &= (p0 + 1.0) * env.big_h_bar[i] <= s * env.h_bar[i] * (1.0 + 1e-12);
        ok &= f.F(s) - (1.0 - delta0) * s * s / 2.0 <= env.big_h_bar[i] + 1e-12 * (1.0 + env.big_h_bar[i]);
        if env.h_bar[i] == 0.0 && zero_until == env.nodes[i - 1] {
            zero_until = s;
        }
    }
    ok &= zero_until >= 0.86;
    Ok((ok, json!({"nodes": env.nodes.len(), "zero_until": zero_until})))
}

fn envelope_power_tail(_seed: u64) -> Outcome {
    let mut ok = true;
    let mut starts = Vec::new();
    for p in [3.0, 4.0, 5.0] {
        let f = AutonomousNonlinearity::power(p).map_err(err)?;
        let env = build_envelope(&f, 0.25, 0.7, 2.0, 20.0, 4096, 1e6).map_err(err)?;
        let ratio: Vec<f64> = (0..env.nodes.len())
            .map(|i| if i == 0 { 0.0 } else { env.h[i] / env.nodes[i].powf(2.0) })
            .collect();
        let mut start = ratio.len() - 1;
        while start > 1 && ratio[start - 1] > 0.0 && ratio[start - 1] <= ratio[start] {
            start -= 1;
        }
        let prefix_max = ratio[..start].iter().copied().fold(0.0, f64::max);
        let from = (start..ratio.len()).find(|&i| ratio[i] >= prefix_max).unwrap_or(ratio.len());
        ok &= (from..ratio.len()).all(|i| (env.h_bar[i] - env.h[i]).abs() <= 1e-12 * env.h[i]);
        starts.push(env.nodes[from.min(ratio.len() - 1)]);
    }
    Ok((ok, json!({"exponents": [3.0, 4.0, 5.0], "increasing_from": starts})))
}

fn spatial_lower_bound(_seed: u64) -> Outcome {
    let lattice = ValidationLattice::new(2);
    let sp = make_spatial_problem(gaussian_bump_spec(0.5, 1.0, 1.0, 3.0).map_err(err)?, &lattice).map_err(err)?;
    let mut worst = f64::INFINITY;
    for i in 0..lattice.points {
        for j in 0..lattice.points {
            let step = 2.0 * lattice.radius / (lattice.points - 1) as f64;
            let x = [-lattice.radius + step * i as f64, -lattice.radius + step * j as f64];
            for k in 1..=lattice.s_samples {
                let s = lattice.s_max * k as f64 / lattice.s_samples as f64;
                for s in [s, -s] {
                    worst = worst.min(sp.big_f(&x, s) - sp.big_f_inf(s));
                }
            }
        }
    }
    Ok((worst >= -1e-12 && sp.report().f4_passed, json!({"min_gap": worst})))
}

fn gradient_fd(seed: u64) -> Outcome {
    let f = cubic();
    let grid = Grid::new(2, 0.6, 10.0, 32).map_err(err)?;
    let sp = make_spatial_problem(gaussian_bump_spec(0.5, 1.0, 1.0, 3.0).map_err(err)?, &ValidationLattice::new(2)).map_err(err)?;
    let mut r = rng(seed, 9);
    let mut worst: f64 = 0.0;
    for k in 0..10 {
        let u = random_smooth_field(&grid, &mut r, true);
        let i = gradient_fd_check(&u, FdFunctional::I(&f), 4, 1e-5, seed.wrapping_add(k)).map_err(err)?;
        let j = gradient_fd_check(&u, FdFunctional::J(&sp), 4, 1e-5, seed.wrapping_add(k)).map_err(err)?;
        worst = worst.max(i.max_mismatch).max(j.max_mismatch);
    }
    Ok((worst <= 1e-6, json!({"fields": 10, "max_mismatch": worst})))
}

fn theta_derivative(seed: u64) -> Outcome {
    let f = cubic();
    let coarse = Grid::new(2, 0.6, 10.0, 32).map_err(err)?;
    let fine = Grid::new(2, 0.75, 16.0, 128).map_err(err)?;
    let mut r = rng(seed, 10);
    let (mut fd_worst, mut identity_worst): (f64, f64) = (0.0, 0.0);
    for _ in 0..20 {
        let u = random_smooth_field(&coarse, &mut r, true);
        let theta = r.gen_range(-0.5..0.5);
        let eps = 1e-5;
        let value = augmented_I(theta, &u, &f);
        let fd = (augmented_I(theta + eps, &u, &f) - augmented_I(theta - eps, &u, &f)) / (2.0 * eps);
        fd_worst = fd_worst.max((dtheta_I(theta, &u, &f) - fd).abs() / (1.0 + value.abs()));
    }
    for _ in 0..4 {
        let u = random_smooth_field(&fine, &mut r, true);
        for theta in [-0.3f64, 0.0, 0.4] {
            let p = pohozaev_P(&dilate_field(&u, theta.exp()).map_err(err)?, &f);
            identity_worst = identity_worst.max((dtheta_I(theta, &u, &f) - p).abs() / (1.0 + norm_alpha_sq(&u)));
        }
    }
    let passed = fd_worst < 1e-7 && identity_worst <= 1e-6;
    Ok((passed, json!({"fd_mismatch": fd_worst, "identity_mismatch": identity_worst})))
}

fn g_monotone(seed: u64) -> Outcome {
    let f = cubic();
    let mut r = rng(seed, 11);
    let ts: Vec<f64> = (0..64).map(|i| 0.25 * 32f64.powf(i as f64 / 63.0)).collect();
    let mut margin = f64::INFINITY;
    for k in 0..50 {
        let grid = Grid::new(2 + k % 2, r.gen_range(0.3..1.0), r.gen_range(4.0..12.0), 16).map_err(err)?;
        let u = random_smooth_field(&grid, &mut r, true);
        let g: Vec<f64> = ts.iter().map(|&t| g_of_t(&u, &f, t)).collect();
        margin = g.windows(2).map(|w| w[0] - w[1]).fold(margin, f64::min);
    }
    Ok((margin > 0.0, json!({"fields": 50, "min_step": margin})))
}

fn comparison_functional(seed: u64) -> Outcome {
    let f = cubic();
    let grid = Grid::new(2, 0.75, 10.0, 32).map_err(err)?;
    let env = build_envelope(&f, 0.25, 0.7, 2.0, 100.0, 4096, grid.critical_exponent()).map_err(err)?;
    let mut r = rng(seed, 12);
    let mut below = true;
    for k in 0..50 {
        let u = random_smooth_field(&grid, &mut r, true).scaled(0.5 + 0.1 * k as f64);
        let i = energy_I(&u, &f).total;
        below &= comparison_I_bar(&u, &env) <= i + 1e-10 * (1.0 + i.abs());
    }
    let scan: Vec<RealField> = (0..16).map(|_| random_smooth_field(&grid, &mut r, true)).collect();
    let at = |v: &RealField, rho: f64| comparison_I_bar(&v.scaled(rho / norm_alpha(v)), &env);
    let rho0 = (0..40)
        .map(|k| 100.0 * 0.5f64.powi(k))
        .find(|&rho| scan.iter().all(|v| (1..=8).all(|j| at(v, rho * j as f64 / 8.0) >= 0.0)))
        .unwrap_or(0.0);
    let mut ball = rho0 > 0.0;
    for _ in 0..16 {
        let v = random_smooth_field(&grid, &mut r, true);
        ball &= at(&v, rho0 * r.gen_range(0.0..1.0)) >= 0.0;
    }
    Ok((below && ball, json!({"rho0": rho0, "below": below, "nonnegative_on_ball": ball})))
}

fn one_mode(_seed: u64) -> Outcome {
    let a = 0.6;
    let grid = Grid::new(2, a, 3.0, 16).map_err(err)?;
    let xi2 = (1.0f64 / 6.0).powi(2);
    let u = RealField::from_fn(&grid, |x| (2.0 * PI * x[0] / 6.0).cos()).map_err(err)?;
    let zero = AutonomousNonlinearity::zero();
    let vol = 36.0;
    let q = |scale: f64, beta: f64| vol * (1.0 + FOUR_PI_SQ * xi2 * scale).powf(beta) / 2.0;
    let rel = |got: f64, want: f64| (got - want).abs() / want.abs();
    let mut worst: f64 = 0.0;
    worst = worst.max(rel(norm_alpha_sq(&u), q(1.0, a)));
    worst = worst.max(rel(energy_I(&u, &zero).total, q(1.0, a) / 2.0));
    let raw = grad_I(&u, &zero, false).map_err(err)?;
    worst = worst.max(raw.max_abs_diff(&u.scaled((1.0 + FOUR_PI_SQ * xi2).powf(a))).map_err(err)?);
    worst = worst.max(rel(augmented_I(2f64.ln(), &u, &zero), 4.0 * q(0.25, a) / 2.0));
    for t in [0.5, 1.3, 4.0] {
        let s = 1.0 / (t * t);
        worst = worst.max(rel(g_of_t(&u, &zero, t), (2.0 - 2.0 * a) / 2.0 * q(s, a) + a * q(s, a - 1.0)));
    }
    worst = worst.max(rel(pohozaev_P(&u, &zero), (2.0 - 2.0 * a) / 2.0 * q(1.0, a) + a * q(1.0, a - 1.0)));
    Ok((worst <= 1e-10, json!({"max_rel_error": worst})))
}

fn partial(result: Result<(RealField, fgs_core::solvers::SolveReport), SolverError>) -> Result<fgs_core::solvers::SolveReport, String> {
    match result {
        Ok((_, r)) => Ok(r),
        Err(SolverError::MaxItersExceeded(r)) | Err(SolverError::Stalled(r)) | Err(SolverError::PohozaevResidual(r)) => Ok(*r),
        Err(e) => Err(e.to_string()),
    }
}

fn descent_monotone(_seed: u64) -> Outcome {
    let grid = Grid::new(1, 0.9, 12.0, 64).map_err(err)?;
    let f = cubic();
    let start = gaussian_bump(&grid, &[0.0], 1.2, 2.0);
    let mut previous = f64::INFINITY;
    let mut ok = true;
    for iters in [1, 2, 4, 8, 16, 32] {
        let cfg = SolverConfig {
            max_iters: iters,
            ..SolverConfig::default()
        };
        let report = partial(ground_state_solve_from(&start, &f, &cfg))?;
        ok &= report.energy <= previous + 1e-12 * (1.0 + previous.abs());
        ok &= report.min_value >= 0.0;
        previous = report.energy;
    }
    Ok((ok, json!({"final_energy": previous})))
}

fn projection_idempotent(_seed: u64) -> Outcome {
    let f = cubic();
    let grid = Grid::new(2, 0.75, 12.0, 256).map_err(err)?;
    let u = gaussian_bump(&grid, &[0.0, 0.0], 0.5, 2.5);
    let (_, w) = pohozaev_project(&u, &f).map_err(err)?;
    let (t, _) = pohozaev_project(&w, &f).map_err(err)?;
    let line = Grid::new(1, 0.8, 10.0, 64).map_err(err)?;
    let (_, v) = nehari_project(&gaussian_bump(&line, &[0.3], 1.0, 0.7), &f).map_err(err)?;
    let (lam, _) = nehari_project(&v, &f).map_err(err)?;
    let passed = (t - 1.0).abs() < 1e-10 && (lam - 1.0).abs() < 1e-10;
    Ok((passed, json!({"dilation": t, "amplitude": lam})))
}

fn soliton_grid() -> Result<Grid, String> {
    Grid::new(1, 1.0, 16.0, 128).map_err(err)
}

fn positivity(seed: u64) -> Outcome {
    let grid = Grid::new(1, 0.8, 16.0, 128).map_err(err)?;
    let f = cubic();
    let (u, report) = ground_state_solve(&grid, &f, &SolverConfig::default()).map_err(err)?;
    let mut r = rng(seed, 16);
    let mut worst: f64 = 0.0;
    for _ in 0..20 {
        let phi = random_smooth_field(&grid, &mut r, true);
        let v = u.axpy(r.gen_range(0.5..2.0) * u.max_abs() / phi.max_abs(), &phi).map_err(err)?;
        worst = worst.max(norm_alpha(&v.abs()) / norm_alpha(&v));
    }
    let passed = report.min_value >= 0.0 && u.min() >= 0.0 && worst <= 1.0 + 1e-8;
    Ok((passed, json!({"min_value": report.min_value, "max_abs_ratio": worst})))
}

fn path_sandwich(seed: u64) -> Outcome {
    let grid = soliton_grid()?;
    let f = cubic();
    let cfg = SolverConfig {
        seed,
        ..SolverConfig::default()
    };
    let (u, _) = ground_state_solve(&grid, &f, &cfg).map_err(err)?;
    let u1 = fgs_core::solvers::initial_guess(&grid, &f, 2.0, 1.0).map_err(err)?;
    let rep = mountain_pass_estimate(&f, &u1, Some(&u), 8, &cfg).map_err(err)?;
    let e = rep.least_energy;
    let attained = (rep.optimal_path - e).abs() <= 1e-4 * e.abs();
    let above = rep.random_paths.iter().all(|&m| m >= e - 1e-6 * (1.0 + e.abs()));
    Ok((attained && above, serde_json::to_value(&rep).map_err(err)?))
}

fn determinism(_seed: u64) -> Outcome {
    let grid = soliton_grid()?;
    let f = cubic();
    let cfg = SolverConfig::default();
    let (u, mut a) = ground_state_solve(&grid, &f, &cfg).map_err(err)?;
    let (v, mut b) = ground_state_solve(&grid, &f, &cfg).map_err(err)?;
    a.wall_time_s = 0.0;
    b.wall_time_s = 0.0;
    let same = a == b && u.values().iter().zip(v.values()).all(|(x, y)| x.to_bits() == y.to_bits());
    Ok((same, json!({"iterations": a.iterations})))
}

fn kernel_tables(_seed: u64) -> Outcome {
    let radii: Vec<f64> = (0..60).map(|i| 1e-3 * 2e4f64.powf(i as f64 / 59.0)).collect();
    let bessel = bessel_kernel(0.75, 2, &radii).map_err(err)?;
    let grid = Grid::new(2, 0.75, 16.0, 128).map_err(err)?;
    let res = resolvent_kernel(0.75, 0.25, &grid).map_err(err)?;
    let passed = bessel.is_positive() && bessel.is_decreasing() && res.positive_resolved && res.decreasing_resolved;
    Ok((
        passed,
        json!({
            "bessel_positive": bessel.is_positive(),
            "bessel_decreasing": bessel.is_decreasing(),
            "resolvent_positive": res.positive_resolved,
            "resolvent_decreasing": res.decreasing_resolved,
            "resolved_radius": res.resolved_radius,
        }),
    ))
}

/// Direct periodic convolution with the tabulated kernel field.
fn convolve(kernel: &RealField, g: &RealField) -> Vec<f64> {
    let grid = g.grid();
    let (m, dim) = (grid.points(), grid.dim());
    let mut a = vec![0usize; dim];
    let mut b = vec![0usize; dim];
    (0..grid.len())
        .map(|i| {
            grid.unflatten(i, &mut a);
            let s: f64 = (0..grid.len())
                .map(|j| {
                    grid.unflatten(j, &mut b);
                    let k = (0..dim).fold(0, |acc, d| acc * m + (a[d] + m + m / 2 - b[d]) % m);
                    kernel.values()[k] * g.values()[j]
                })
                .sum();
            s * grid.cell_volume()
        })
        .collect()
}

fn convolution_duality(seed: u64) -> Outcome {
    let mut r = rng(seed, 20);
    let mut worst: f64 = 0.0;
    for grid in [Grid::new(1, 0.6, 8.0, 64).map_err(err)?, Grid::new(2, 0.75, 6.0, 16).map_err(err)?] {
        let k = resolvent_kernel(grid.alpha(), 0.3, &grid).map_err(err)?;
        for _ in 0..3 {
            let g = random_smooth_field(&grid, &mut r, true);
            let direct = convolve(&k.field, &g);
            let solved = resolvent_solve(&g, 0.3).map_err(err)?;
            let scale = solved.max_abs();
            let diff = direct.iter().zip(solved.values()).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
            worst = worst.max(diff / scale);
        }
    }
    Ok((worst <= 1e-6, json!({"max_rel_error": worst})))
}

fn checks_deterministic(seed: u64) -> Outcome {
    let grid = Grid::new(1, 0.6, 8.0, 32).map_err(err)?;
    let a = comparison_check(8, 0.3, &grid, seed).map_err(err)?;
    let b = comparison_check(8, 0.3, &grid, seed).map_err(err)?;
    let same = a == b && abs_inequality_check(8, &grid, seed) == abs_inequality_check(8, &grid, seed);
    Ok((same, json!({"pairs": 8})))
}

fn comparison_principle(seed: u64) -> Outcome {
    let grid = Grid::new(2, 0.75, 8.0, 32).map_err(err)?;
    let rep = comparison_check(100, 0.25, &grid, seed).map_err(err)?;
    Ok((rep.passed, json!({"pairs": rep.samples, "violations": rep.violations, "worst_margin": rep.worst_margin, "tolerance": COMPARISON_TOL})))
}

fn kernel_mass(_seed: u64) -> Outcome {
    let mass = kernel_l1_mass(0.75, 2, 1e-4, 50.0).map_err(err)?;
    Ok(((mass - 1.0).abs() <= 1e-3, json!({"N": 2, "alpha": 0.75, "mass": mass})))
}

const SUITES: &[Suite] = &[
    Suite { name: "spectral.parseval", run: parseval },
    Suite { name: "spectral.multiplier_symmetry", run: multiplier_symmetry },
    Suite { name: "spectral.dilation_group", run: dilation_group },
    Suite { name: "spectral.resolvent_inverse", run: resolvent_inverse },
    Suite { name: "spectral.rectification", run: rectification },
    Suite { name: "model.envelope_shape", run: envelope_shape },
    Suite { name: "model.envelope_power_tail", run: envelope_power_tail },
    Suite { name: "model.spatial_lower_bound", run: spatial_lower_bound },
    Suite { name: "functionals.gradient_fd", run: gradient_fd },
    Suite { name: "functionals.theta_derivative", run: theta_derivative },
    Suite { name: "functionals.g_monotone", run: g_monotone },
    Suite { name: "functionals.comparison_functional", run: comparison_functional },
    Suite { name: "functionals.one_mode", run: one_mode },
    Suite { name: "solvers.descent_monotone", run: descent_monotone },
    Suite { name: "solvers.projection_idempotent", run: projection_idempotent },
    Suite { name: "solvers.positivity", run: positivity },
    Suite { name: "solvers.path_sandwich", run: path_sandwich },
    Suite { name: "solvers.determinism", run: determinism },
    Suite { name: "analysis.kernel_tables", run: kernel_tables },
    Suite { name: "analysis.convolution_duality", run: convolution_duality },
    Suite { name: "analysis.checks_deterministic", run: checks_deterministic },
    Suite { name: "analysis.comparison_principle", run: comparison_principle },
    Suite { name: "analysis.kernel_mass", run: kernel_mass },
];

pub fn suite_names() -> Vec<&'static str> {
    SUITES.iter().map(|s| s.name).collect()
}

pub fn run_suites(seed: u64) -> Vec<SuiteResult> {
    SUITES
        .iter()
        .map(|s| match (s.run)(seed) {
            Ok((passed, detail)) => SuiteResult { name: s.name, passed, detail },
            Err(e) => SuiteResult {
                name: s.name,
                passed: false,
                detail: json!({ "error": e }),
            },
        })
        .collect()
}

pub fn run_verify(cfg: &RunConfig) -> Result<Artifacts, crate::CliError> {
    let results = run_suites(cfg.seed);
    let passed = results.iter().filter(|r| r.passed).count();
    let total = results.len();
    let mut a = Artifacts::default();
    for r in &results {
        a.stdout += &format!("{} {}\n", if r.passed { "PASS" } else { "FAIL" }, r.name);
    }
    a.stdout += &format!("{passed}/{total} suites passed\n");
    a.add(
        "verify.json",
        to_json(&json!({ "seed": cfg.seed, "passed": passed, "total": total, "suites": results }))?,
    );
    if passed < total {
        let failed: Vec<&str> = results.iter().filter(|r| !r.passed).map(|r| r.name).collect();
        a.failure = Some(format!("{} of {total} suites failed: {}", total - passed, failed.join(", ")));
    }
    Ok(a)
}
