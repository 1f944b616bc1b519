use fgs_core::analysis::{abs_inequality_check, comparison_check};
use fgs_core::functionals::{augmented_I, comparison_I_bar, dtheta_I, energy_I, g_of_t, grad_I};
use fgs_core::model::{build_envelope, AutonomousNonlinearity};
use fgs_core::spectral::*;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn grid_strategy(max_alpha: f64) -> impl Strategy<Value = Grid> {
    (1usize..=2, 0.3..max_alpha, 4.0..12.0f64, prop::sample::select(vec![16usize, 32]))
        .prop_map(|(n, a, l, m)| Grid::new(n, a, l, m).unwrap())
}

fn field(grid: &Grid, seed: u64, signed: bool) -> RealField {
    random_smooth_field(grid, &mut ChaCha8Rng::seed_from_u64(seed), signed)
}

fn cubic() -> AutonomousNonlinearity {
    AutonomousNonlinearity::power(3.0).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn parseval(grid in grid_strategy(1.0), seed in any::<u64>()) {
        let u = field(&grid, seed, true);
        let physical = u.l2_norm_sq();
        let spectral = grid.box_volume() * to_spectral(&u).coeffs().iter().map(|c| c.norm_sqr()).sum::<f64>();
        prop_assert!((physical - spectral).abs() <= 1e-10 * physical);
    }

    #[test]
    fn even_multipliers_keep_fields_real(grid in grid_strategy(1.0), seed in any::<u64>(), c in 0.1..3.0f64) {
        let u = field(&grid, seed, true);
        let v = apply_multiplier(&u, |xi| (-c * xi.iter().map(|x| x * x).sum::<f64>()).exp());
        prop_assert!(v.is_ok());
    }

    #[test]
    fn resolvent_inverts_the_shifted_operator(grid in grid_strategy(1.0), seed in any::<u64>(), delta0 in 0.01..0.99f64) {
        let g = field(&grid, seed, true);
        let v = resolvent_solve(&g, delta0).unwrap();
        let back = apply_fractional_op(&v).unwrap().axpy(-(1.0 - delta0), &v).unwrap();
        prop_assert!(back.max_abs_diff(&g).unwrap() <= 1e-10 * g.max_abs());
    }

    #[test]
    fn dilations_compose(s in 0.8..1.25f64, t in 0.8..1.25f64, sigma in 0.8..1.5f64) {
        let grid = Grid::new(1, 0.5, 12.0, 256).unwrap();
        let u = gaussian_bump(&grid, &[0.0], sigma, 1.0);
        let twice = dilate_field(&dilate_field(&u, s).unwrap(), t).unwrap();
        let once = dilate_field(&u, s * t).unwrap();
        prop_assert!(twice.max_abs_diff(&once).unwrap() < 1e-8);
    }

    #[test]
    fn rectification_does_not_raise_the_norm(grid in grid_strategy(0.9), seed in any::<u64>()) {
        let u = field(&grid, seed, true);
        prop_assert!(norm_alpha(&u.abs()) <= norm_alpha(&u) * (1.0 + 1e-8));
    }

    #[test]
    fn gradient_matches_differences(grid in grid_strategy(1.0), a in any::<u64>(), b in any::<u64>()) {
        let f = cubic();
        let u = field(&grid, a, true);
        let v = field(&grid, b, true);
        let eps = 1e-5;
        let value = energy_I(&u, &f).total;
        let fd = (energy_I(&u.axpy(eps, &v).unwrap(), &f).total - energy_I(&u.axpy(-eps, &v).unwrap(), &f).total) / (2.0 * eps);
        let analytic = grad_I(&u, &f, false).unwrap().inner(&v).unwrap();
        prop_assert!((fd - analytic).abs() <= 1e-6 * (1.0 + value.abs()), "{fd} vs {analytic}");
    }

    #[test]
    fn theta_derivative(grid in grid_strategy(1.0), seed in any::<u64>(), theta in -0.5..0.5f64) {
        let f = cubic();
        let u = field(&grid, seed, true);
        let eps = 1e-5;
        let value = augmented_I(theta, &u, &f);
        let fd = (augmented_I(theta + eps, &u, &f) - augmented_I(theta - eps, &u, &f)) / (2.0 * eps);
        prop_assert!((dtheta_I(theta, &u, &f) - fd).abs() < 1e-7 * (1.0 + value.abs()));
    }

    #[test]
    fn g_strictly_decreases(n in 2usize..=3, alpha in 0.3..1.0f64, l in 4.0..12.0f64, seed in any::<u64>()) {
        let grid = Grid::new(n, alpha, l, 16).unwrap();
        let f = cubic();
        let u = field(&grid, seed, true);
        let ts: Vec<f64> = (0..64).map(|i| 0.25 * 32f64.powf(i as f64 / 63.0)).collect();
        let g: Vec<f64> = ts.iter().map(|&t| g_of_t(&u, &f, t)).collect();
        prop_assert!(g.windows(2).all(|w| w[1] < w[0]));
    }

    #[test]
    fn comparison_functional_lies_below(grid in grid_strategy(1.0), seed in any::<u64>(), amp in 0.1..3.0f64) {
        let f = cubic();
        let critical = critical_exponent(grid.dim(), grid.alpha()).min(1e6);
        let p0 = 1.0 + 0.5 * (critical.min(4.0) - 2.0);
        let env = build_envelope(&f, 0.25, 0.7, p0, 20.0, 4096, critical).unwrap();
        let u = field(&grid, seed, true).scaled(amp);
        prop_assert!(comparison_I_bar(&u, &env) <= energy_I(&u, &f).total + 1e-12);
    }

    #[test]
    fn checks_are_deterministic(seed in any::<u64>()) {
        let grid = Grid::new(1, 0.6, 8.0, 32).unwrap();
        prop_assert_eq!(comparison_check(4, 0.3, &grid, seed).unwrap(), comparison_check(4, 0.3, &grid, seed).unwrap());
        prop_assert_eq!(abs_inequality_check(4, &grid, seed), abs_inequality_check(4, &grid, seed));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn envelope_is_monotone_and_majorizes(p in 2.2..5.0f64, delta0 in 0.05..0.45f64) {
        let f = AutonomousNonlinearity::power(p).unwrap();
        let env = build_envelope(&f, delta0, 0.5, 2.0, 10.0, 2048, 1e6).unwrap();
        for i in 1..env.nodes.len() {
            prop_assert!(env.h_bar[i] >= env.h[i]);
            if i > 1 {
                let prev = env.h_bar[i - 1] / env.nodes[i - 1].powf(env.p0);
                prop_assert!(env.h_bar[i] / env.nodes[i].powf(env.p0) >= prev);
            }
            prop_assert_eq!(env.h_bar[i] == 0.0, env.rho[i] == 0.0);
        }
    }
}
