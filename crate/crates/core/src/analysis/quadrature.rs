use super::KernelError;

/// Panels of the initial uniform pass.
const INITIAL_PANELS: usize = 64;
const MAX_DEPTH: u32 = 60;
/// Panel tolerances never drop below this multiple of the panel integral.
const ROUNDOFF: f64 = 64.0 * f64::EPSILON;

/// Adaptive Simpson with relative tolerance `rel_tol` on `[a, b]`.
///
/// The absolute target is `rel_tol` times the magnitude of a coarse first
/// estimate. Fails with `QuadratureFailure` once `max_evals` is exceeded.
pub fn adaptive_simpson(
    f: impl Fn(f64) -> f64,
    a: f64,
    b: f64,
    rel_tol: f64,
    max_evals: usize,
) -> Result<f64, KernelError> {
    if !(a.is_finite() && b.is_finite() && a < b) {
        return Err(KernelError::InvalidArgument(format!("bad interval [{a}, {b}]")));
    }
    let width = (b - a) / INITIAL_PANELS as f64;
    let evals = std::cell::Cell::new(0usize);
    let eval = |x: f64| {
        evals.set(evals.get() + 1);
        f(x)
    };
    let nodes: Vec<f64> = (0..=2 * INITIAL_PANELS).map(|i| eval(a + 0.5 * width * i as f64)).collect();
    let panels: Vec<(f64, f64, f64, f64, f64, f64)> = (0..INITIAL_PANELS)
        .map(|i| {
            let lo = a + width * i as f64;
            let (fa, fm, fb) = (nodes[2 * i], nodes[2 * i + 1], nodes[2 * i + 2]);
            (lo, lo + width, fa, fm, fb, width / 6.0 * (fa + 4.0 * fm + fb))
        })
        .collect();
    let coarse: f64 = panels.iter().map(|p| p.5).sum();
    if !coarse.is_finite() {
        return Err(KernelError::QuadratureFailure { evaluations: evals.get() });
    }
    let scale = panels.iter().map(|p| p.5.abs()).sum::<f64>().max(f64::MIN_POSITIVE);
    let target = rel_tol * scale;
    let mut total = 0.0;
    let mut stack: Vec<(f64, f64, f64, f64, f64, f64, f64, u32)> = panels
        .into_iter()
        .rev()
        .map(|(lo, hi, fa, fm, fb, s)| (lo, hi, fa, fm, fb, s, target * (hi - lo) / (b - a), 0))
        .collect();
    while let Some((lo, hi, fa, fm, fb, whole, tol, depth)) = stack.pop() {
        let mid = 0.5 * (lo + hi);
        let (fl, fr) = (eval(0.5 * (lo + mid)), eval(0.5 * (mid + hi)));
        let h = hi - lo;
        let left = h / 12.0 * (fa + 4.0 * fl + fm);
        let right = h / 12.0 * (fm + 4.0 * fr + fb);
        let delta = left + right - whole;
        let tol = tol.max(ROUNDOFF * (left.abs() + right.abs()));
        let unresolvable = h <= ROUNDOFF * (lo.abs() + hi.abs()).max(b - a);
        if delta.abs() <= 15.0 * tol || unresolvable || depth >= MAX_DEPTH {
            if !unresolvable && depth >= MAX_DEPTH && delta.abs() > 15.0 * tol {
                return Err(KernelError::QuadratureFailure { evaluations: evals.get() });
            }
            total += left + right + delta / 15.0;
        } else {
            stack.push((mid, hi, fm, fr, fb, right, 0.5 * tol, depth + 1));
            stack.push((lo, mid, fa, fl, fm, left, 0.5 * tol, depth + 1));
        }
        if evals.get() > max_evals {
            return Err(KernelError::QuadratureFailure { evaluations: evals.get() });
        }
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn integrates_smooth_functions() {
        let v = adaptive_simpson(|x| x.exp(), 0.0, 1.0, 1e-12, 100_000).unwrap();
        assert!((v - (1f64.exp() - 1.0)).abs() < 1e-11);
        let g = adaptive_simpson(|x| (-x * x).exp(), -30.0, 30.0, 1e-12, 100_000).unwrap();
        assert!((g - std::f64::consts::PI.sqrt()).abs() < 1e-11);
    }

    #[test]
    fn budget_is_enforced() {
        let r = adaptive_simpson(|x| (1.0 / x).sin(), 1e-6, 1.0, 1e-14, 2_000);
        assert!(matches!(r, Err(KernelError::QuadratureFailure { .. })));
    }
}
