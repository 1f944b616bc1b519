use rand::Rng;

use super::{Grid, RealField};

/// `amplitude * exp(-|x - center|² / (2σ²))`.
pub fn gaussian_bump(grid: &Grid, center: &[f64], sigma: f64, amplitude: f64) -> RealField {
    let inv = 1.0 / (2.0 * sigma * sigma);
    let values = (0..grid.len())
        .map(|i| {
            let mut x = [0.0; 3];
            grid.point(i, &mut x[..grid.dim()]);
            let r2: f64 = x[..grid.dim()]
                .iter()
                .zip(center)
                .map(|(a, c)| (a - c) * (a - c))
                .sum();
            amplitude * (-r2 * inv).exp()
        })
        .collect();
    RealField::from_vec_unchecked(grid, values)
}

/// Sum of a few Gaussians of random width, centre and weight.
///
/// Widths are at least three grid spacings and centres stay within `L/6` of the
/// origin, so the result is smooth, well resolved and negligible at the box edge.
/// With `signed` the weights take both signs.
pub fn random_smooth_field<R: Rng + ?Sized>(grid: &Grid, rng: &mut R, signed: bool) -> RealField {
    let l = grid.half_length();
    let s_min = 3.0 * grid.spacing();
    let s_max = (1.5 * s_min).max(l / 10.0);
    let count = rng.gen_range(2..=5);
    let mut u = RealField::zeros(grid);
    let mut center = vec![0.0; grid.dim()];
    for k in 0..count {
        for c in center.iter_mut() {
            *c = rng.gen_range(-l / 6.0..l / 6.0);
        }
        let sigma = rng.gen_range(s_min..s_max);
        let mut weight = rng.gen_range(0.3..1.5);
        if signed && (k % 2 == 1) {
            weight = -weight;
        }
        let bump = gaussian_bump(grid, &center, sigma, weight);
        u = u.axpy(1.0, &bump).expect("same grid");
    }
    u
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn fields_are_reproducible_and_signed() {
        let g = Grid::new(2, 0.5, 10.0, 64).unwrap();
        let a = random_smooth_field(&g, &mut ChaCha8Rng::seed_from_u64(3), true);
        let b = random_smooth_field(&g, &mut ChaCha8Rng::seed_from_u64(3), true);
        assert_eq!(a.values(), b.values());
        let p = random_smooth_field(&g, &mut ChaCha8Rng::seed_from_u64(4), false);
        assert!(p.min() >= 0.0);
        let bm = super::super::boundary_mass(&p, 1.0);
        assert!(bm < 1e-12, "{bm}");
    }
}
