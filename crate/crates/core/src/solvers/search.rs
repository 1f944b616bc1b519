//! One-dimensional root and maximum searches on positive parameters.

/// Maximum of `f` over `[lo, hi]`: a log-spaced scan followed by golden-section
/// refinement around the best sample. Returns `(argmax, max)`; the sampled
/// points always include `anchor` when it lies in the interval.
pub fn maximize_log(f: impl Fn(f64) -> f64, lo: f64, hi: f64, samples: usize, anchor: Option<f64>) -> (f64, f64) {
    let (a, b) = (lo.ln(), hi.ln());
    let n = samples.max(3);
    let mut pts: Vec<f64> = (0..n).map(|i| a + (b - a) * i as f64 / (n - 1) as f64).collect();
    if let Some(t) = anchor.filter(|t| *t >= lo && *t <= hi) {
        pts.push(t.ln());
        pts.sort_by(|x, y| x.total_cmp(y));
    }
    let vals: Vec<f64> = pts.iter().map(|&s| f(s.exp())).collect();
    let best = vals
        .iter()
        .enumerate()
        .fold(0, |b, (i, v)| if *v > vals[b] { i } else { b });
    let left = pts[best.saturating_sub(1)];
    let right = pts[(best + 1).min(pts.len() - 1)];
    let (s, v) = golden_max(|s| f(s.exp()), left, right, 1e-10);
    if v > vals[best] {
        (s.exp(), v)
    } else {
        (pts[best].exp(), vals[best])
    }
}

/// Golden-section search for a maximum of a unimodal `f` on `[a, b]`.
pub fn golden_max(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64, tol: f64) -> (f64, f64) {
    let r = 0.5 * (5f64.sqrt() - 1.0);
    let mut c = b - r * (b - a);
    let mut d = a + r * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    for _ in 0..200 {
        if (b - a).abs() <= tol * (1.0 + a.abs() + b.abs()) {
            break;
        }
        if fc > fd {
            b = d;
            d = c;
            fd = fc;
            c = b - r * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + r * (b - a);
            fd = f(d);
        }
    }
    if fc > fd {
        (c, fc)
    } else {
        (d, fd)
    }
}

/// Root of a function that is positive at `lo` and negative at `hi`, by
/// bisection in `ln t` followed by Newton polish with `df`.
pub fn decreasing_root(
    f: impl Fn(f64) -> f64,
    df: impl Fn(f64) -> f64,
    lo: f64,
    hi: f64,
    tol: f64,
) -> f64 {
    let (mut a, mut b) = (lo.ln(), hi.ln());
    let mut t = 1.0f64.clamp(lo, hi);
    for _ in 0..200 {
        let m = 0.5 * (a + b);
        t = m.exp();
        let v = f(t);
        if v.abs() <= tol {
            return t;
        }
        if v > 0.0 {
            a = m;
        } else {
            b = m;
        }
        if b - a < 1e-6 {
            break;
        }
    }
    for _ in 0..20 {
        let v = f(t);
        if v.abs() <= tol {
            break;
        }
        let d = df(t);
        let next = t - v / d;
        t = if d != 0.0 && next > a.exp() && next < b.exp() {
            next
        } else {
            let m = 0.5 * (a + b);
            m.exp()
        };
        if f(t) > 0.0 {
            a = t.ln();
        } else {
            b = t.ln();
        }
    }
    t
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn finds_maximum_and_root() {
        let (t, v) = maximize_log(|t| -(t.ln() - 0.3).powi(2), 0.1, 10.0, 33, Some(1.0));
        assert!((t - 0.3f64.exp()).abs() < 1e-6 && v.abs() < 1e-12);
        let r = decreasing_root(|t| 2.0 - t * t, |t| -2.0 * t, 0.2, 20.0, 1e-14);
        assert!((r - 2f64.sqrt()).abs() < 1e-13);
    }
}
