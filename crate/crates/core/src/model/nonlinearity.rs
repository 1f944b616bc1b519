use std::fmt;
use std::sync::Arc;

use serde::Serialize;

use super::ModelError;
use crate::spectral::critical_exponent;

type ScalarFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

#[derive(Clone)]
enum Form {
    Power { p: f64 },
    DoublePower { a: f64, p: f64, b: f64, q: f64 },
    Linear { c: f64 },
    Table(Arc<Table>),
    Shifted { v: f64, inner: Box<AutonomousNonlinearity> },
    Custom { f: ScalarFn, big_f: ScalarFn },
}

/// Name and parameters of a nonlinearity, for reports.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Descriptor {
    pub name: String,
    pub params: Vec<(String, f64)>,
}

/// An odd nonlinearity `f` together with its primitive `F(s) = ∫₀ˢ f`.
#[derive(Clone)]
pub struct AutonomousNonlinearity {
    form: Form,
    descriptor: Descriptor,
}

impl fmt::Debug for AutonomousNonlinearity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "AutonomousNonlinearity({:?})", self.descriptor)
    }
}

fn signed_pow(s: f64, p: f64) -> f64 {
    s.abs().powf(p - 1.0) * s
}

/// `-v s²/2 + G`; shared with the spatial functionals so reductions agree bit-for-bit.
#[inline]
pub(crate) fn quadratic_shift(v: f64, s: f64, big_g: f64) -> f64 {
    -v * s * s * 0.5 + big_g
}

impl AutonomousNonlinearity {
    /// `f(s) = |s|^{p-1} s`.
    pub fn power(p: f64) -> Result<Self, ModelError> {
        if !(p > 1.0 && p.is_finite()) {
            return Err(ModelError::InvalidParameter(format!("power p = {p} must exceed 1")));
        }
        Ok(AutonomousNonlinearity {
            form: Form::Power { p },
            descriptor: Descriptor {
                name: "power".into(),
                params: vec![("p".into(), p)],
            },
        })
    }

    /// `f(s) = a|s|^{p-1}s + b|s|^{q-1}s`.
    pub fn double_power(a: f64, p: f64, b: f64, q: f64) -> Result<Self, ModelError> {
        if !(p > 1.0 && q > 1.0 && a.is_finite() && b.is_finite() && p.is_finite() && q.is_finite()) {
            return Err(ModelError::InvalidParameter(format!(
                "double power needs finite a, b and exponents p = {p}, q = {q} above 1"
            )));
        }
        Ok(AutonomousNonlinearity {
            form: Form::DoublePower { a, p, b, q },
            descriptor: Descriptor {
                name: "double_power".into(),
                params: vec![("a".into(), a), ("p".into(), p), ("b".into(), b), ("q".into(), q)],
            },
        })
    }

    /// `f(s) = c s`.
    pub fn linear(c: f64) -> Self {
        AutonomousNonlinearity {
            form: Form::Linear { c },
            descriptor: Descriptor {
                name: "linear".into(),
                params: vec![("c".into(), c)],
            },
        }
    }

    pub fn zero() -> Self {
        let mut z = Self::linear(0.0);
        z.descriptor = Descriptor {
            name: "zero".into(),
            params: vec![],
        };
        z
    }

    /// Piecewise-linear `f` through `(s_i, f_i)` for `s_i ≥ 0`, extended oddly.
    ///
    /// The point `(0, 0)` is added when missing; beyond the last node the last
    /// segment is continued linearly.
    pub fn table(s: Vec<f64>, f: Vec<f64>) -> Result<Self, ModelError> {
        let table = Table::new(s, f)?;
        let n = table.s.len() as f64;
        Ok(AutonomousNonlinearity {
            form: Form::Table(Arc::new(table)),
            descriptor: Descriptor {
                name: "table".into(),
                params: vec![("nodes".into(), n)],
            },
        })
    }

    /// User-supplied `f` and primitive `F`; consistency is the caller's business.
    pub fn custom(
        name: &str,
        f: impl Fn(f64) -> f64 + Send + Sync + 'static,
        big_f: impl Fn(f64) -> f64 + Send + Sync + 'static,
    ) -> Self {
        AutonomousNonlinearity {
            form: Form::Custom {
                f: Arc::new(f),
                big_f: Arc::new(big_f),
            },
            descriptor: Descriptor {
                name: name.into(),
                params: vec![],
            },
        }
    }

    /// `s ↦ -v s + self(s)`.
    pub fn shifted(&self, v: f64) -> Self {
        let mut params = vec![("v".into(), v)];
        params.extend(self.descriptor.params.iter().cloned());
        AutonomousNonlinearity {
            form: Form::Shifted {
                v,
                inner: Box::new(self.clone()),
            },
            descriptor: Descriptor {
                name: format!("shifted_{}", self.descriptor.name),
                params,
            },
        }
    }

    pub fn descriptor(&self) -> &Descriptor {
        &self.descriptor
    }

    pub fn f(&self, s: f64) -> f64 {
        match &self.form {
            Form::Power { p } => signed_pow(s, *p),
            Form::DoublePower { a, p, b, q } => a * signed_pow(s, *p) + b * signed_pow(s, *q),
            Form::Linear { c } => c * s,
            Form::Table(t) => t.f(s),
            Form::Shifted { v, inner } => -v * s + inner.f(s),
            Form::Custom { f, .. } => f(s),
        }
    }

    #[allow(non_snake_case)]
    pub fn F(&self, s: f64) -> f64 {
        match &self.form {
            Form::Power { p } => s.abs().powf(p + 1.0) / (p + 1.0),
            Form::DoublePower { a, p, b, q } => {
                a * s.abs().powf(p + 1.0) / (p + 1.0) + b * s.abs().powf(q + 1.0) / (q + 1.0)
            }
            Form::Linear { c } => 0.5 * c * s * s,
            Form::Table(t) => t.big_f(s),
            Form::Shifted { v, inner } => quadratic_shift(*v, s, inner.F(s)),
            Form::Custom { big_f, .. } => big_f(s),
        }
    }

    /// True when `f` vanishes identically by construction.
    pub fn is_zero(&self) -> bool {
        matches!(self.form, Form::Linear { c } if c == 0.0)
    }
}

struct Table {
    s: Vec<f64>,
    f: Vec<f64>,
    big_f: Vec<f64>,
}

impl Table {
    fn new(mut s: Vec<f64>, mut f: Vec<f64>) -> Result<Table, ModelError> {
        if s.len() != f.len() || s.is_empty() {
            return Err(ModelError::BadTable("columns s and f must be non-empty and equally long".into()));
        }
        if s.iter().chain(&f).any(|v| !v.is_finite()) {
            return Err(ModelError::BadTable("non-finite entry".into()));
        }
        if s[0] < 0.0 || s.windows(2).any(|w| w[1] <= w[0]) {
            return Err(ModelError::BadTable("s must be non-negative and strictly increasing".into()));
        }
        if s[0] == 0.0 {
            if f[0] != 0.0 {
                return Err(ModelError::BadTable("an odd f needs f(0) = 0".into()));
            }
        } else {
            s.insert(0, 0.0);
            f.insert(0, 0.0);
        }
        if s.len() < 2 {
            return Err(ModelError::BadTable("at least one node with s > 0 is required".into()));
        }
        let mut big_f = vec![0.0; s.len()];
        for i in 1..s.len() {
            big_f[i] = big_f[i - 1] + 0.5 * (f[i] + f[i - 1]) * (s[i] - s[i - 1]);
        }
        Ok(Table { s, f, big_f })
    }

    fn segment(&self, a: f64) -> usize {
        let i = self.s.partition_point(|&x| x <= a);
        i.clamp(1, self.s.len() - 1) - 1
    }

    fn f(&self, s: f64) -> f64 {
        let a = s.abs();
        let i = self.segment(a);
        let slope = (self.f[i + 1] - self.f[i]) / (self.s[i + 1] - self.s[i]);
        let v = self.f[i] + slope * (a - self.s[i]);
        if s < 0.0 {
            -v
        } else {
            v
        }
    }

    fn big_f(&self, s: f64) -> f64 {
        let a = s.abs();
        let i = self.segment(a);
        let slope = (self.f[i + 1] - self.f[i]) / (self.s[i + 1] - self.s[i]);
        let d = a - self.s[i];
        self.big_f[i] + self.f[i] * d + 0.5 * slope * d * d
    }
}

/// Outcome of the sampled Berestycki–Lions checks.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BlReport {
    pub samples: usize,
    pub s_max: f64,
    /// Largest `|f(s) + f(-s)| / (1 + |f(s)|)` over the samples.
    pub odd_residual: f64,
    pub odd: bool,
    /// Estimate of `limsup_{s→0} f(s)/s`.
    pub small_s_ratio: f64,
    pub small_s: bool,
    /// `|f(s)| / |s|^{2*-1}` at `s_max / 10` and at `s_max`.
    pub growth_ratio_mid: f64,
    pub growth_ratio_end: f64,
    pub subcritical: bool,
    /// Smallest sampled `s₀` with `F(s₀) - s₀²/2 > 0`; `None` means not found below `s_max`.
    pub witness: Option<f64>,
    pub all_passed: bool,
}

/// Default upper end of the sampled `s` range.
pub const DEFAULT_S_MAX: f64 = 100.0;

/// Samples the four structural conditions on `[-s_max, s_max]`; never fails.
pub fn check_bl_conditions(f: &AutonomousNonlinearity, dim: usize, alpha: f64, samples: usize) -> BlReport {
    check_bl_conditions_up_to(f, dim, alpha, samples, DEFAULT_S_MAX)
}

pub fn check_bl_conditions_up_to(
    f: &AutonomousNonlinearity,
    dim: usize,
    alpha: f64,
    samples: usize,
    s_max: f64,
) -> BlReport {
    let samples = samples.max(100);
    let linear: Vec<f64> = (1..=samples).map(|i| s_max * i as f64 / samples as f64).collect();

    let odd_residual = linear
        .iter()
        .map(|&s| (f.f(s) + f.f(-s)).abs() / (1.0 + f.f(s).abs()))
        .fold(0.0, f64::max);
    let odd = odd_residual <= 1e-12;

    let small_s_ratio = log_space(1e-8, 1e-6, samples)
        .flat_map(|s| [f.f(s) / s, f.f(-s) / -s])
        .fold(f64::NEG_INFINITY, f64::max);
    let small_s = small_s_ratio < 1.0;

    let crit = critical_exponent(dim, alpha);
    let (growth_ratio_mid, growth_ratio_end, subcritical) = if crit.is_finite() {
        let ratio = |s: f64| f.f(s).abs() / s.powf(crit - 1.0);
        let mid = ratio(0.1 * s_max);
        let end = ratio(s_max);
        (mid, end, end == 0.0 || end < mid * (1.0 - 1e-9))
    } else {
        (0.0, 0.0, true)
    };

    let witness = linear.iter().copied().find(|&s| f.F(s) - 0.5 * s * s > 0.0);
    let all_passed = odd && small_s && subcritical && witness.is_some();
    BlReport {
        samples,
        s_max,
        odd_residual,
        odd,
        small_s_ratio,
        small_s,
        growth_ratio_mid,
        growth_ratio_end,
        subcritical,
        witness,
        all_passed,
    }
}

fn log_space(a: f64, b: f64, n: usize) -> impl Iterator<Item = f64> {
    let (la, lb) = (a.ln(), b.ln());
    (0..n).map(move |i| (la + (lb - la) * i as f64 / (n - 1) as f64).exp())
}

/// `δ₀` and `s₁` with `s f(s) ≤ (1 - 2δ₀) s²` on `|s| ≤ s₁`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SmallSConstants {
    pub delta0: f64,
    pub s1: f64,
}

pub const DELTA_LADDER: [f64; 13] = [0.499, 0.45, 0.4, 0.35, 0.3, 0.25, 0.2, 0.15, 0.1, 0.05, 0.01, 0.005, 0.001];
pub const S1_LADDER: [f64; 10] = [1.0, 0.5, 0.2, 0.1, 0.05, 0.02, 0.01, 0.005, 0.002, 0.001];

/// Checks `s f(s) ≤ (1 - 2δ₀) s²` on 2000 points of `[-s1, s1]`.
pub fn small_s_bound_holds(f: &AutonomousNonlinearity, delta0: f64, s1: f64) -> bool {
    let n = 1000;
    (1..=n).all(|i| {
        let s = s1 * i as f64 / n as f64;
        let bound = (1.0 - 2.0 * delta0) * s * s;
        s * f.f(s) <= bound && -s * f.f(-s) <= bound
    })
}

/// Largest `δ₀` on [`DELTA_LADDER`] admitting some `s₁` on [`S1_LADDER`].
pub fn pick_small_s_constants(f: &AutonomousNonlinearity) -> Result<SmallSConstants, ModelError> {
    for &delta0 in &DELTA_LADDER {
        for &s1 in &S1_LADDER {
            if small_s_bound_holds(f, delta0, s1) {
                return Ok(SmallSConstants { delta0, s1 });
            }
        }
    }
    Err(ModelError::NoAdmissibleConstants)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn power_is_odd_with_consistent_primitive() {
        let f = AutonomousNonlinearity::power(3.0).unwrap();
        for &s in &[0.3, 1.0, 2.5] {
            assert_eq!(f.f(-s), -f.f(s));
            let eps = 1e-5;
            let fd = (f.F(s + eps) - f.F(s - eps)) / (2.0 * eps);
            assert!((fd - f.f(s)).abs() < 1e-6);
        }
        assert_eq!(f.F(0.0), 0.0);
        assert_eq!(f.F(2.0), 4.0);
    }

    #[test]
    fn table_interpolates_and_integrates() {
        let s: Vec<f64> = (0..=200).map(|i| i as f64 * 0.05).collect();
        let fv: Vec<f64> = s.iter().map(|x| x * x * x).collect();
        let t = AutonomousNonlinearity::table(s, fv).unwrap();
        assert!((t.f(-1.0) + 1.0).abs() < 1e-12);
        // Trapezoid error h²/12 (f'(2) - f'(0)) = 2.5e-3.
        assert!((t.F(2.0) - 4.0).abs() < 2.6e-3);
        assert_eq!(t.F(-1.5), t.F(1.5));
        assert!(AutonomousNonlinearity::table(vec![0.0, 1.0], vec![1.0, 2.0]).is_err());
    }

    #[test]
    fn cubic_passes_all_conditions() {
        let f = AutonomousNonlinearity::power(3.0).unwrap();
        let r = check_bl_conditions(&f, 2, 0.75, 1000);
        assert!(r.all_passed, "{r:?}");
        let s0 = 2.0;
        assert!(f.F(s0) - 0.5 * s0 * s0 > 0.0);
        assert!(r.witness.unwrap() <= s0);
    }

    #[test]
    fn linear_fails_small_s() {
        let r = check_bl_conditions(&AutonomousNonlinearity::linear(1.0), 2, 0.75, 200);
        assert!(!r.small_s);
        assert!((r.small_s_ratio - 1.0).abs() < 1e-12);
    }

    #[test]
    fn critical_growth_fails() {
        // N = 2, alpha = 0.75: 2* - 1 = 7.
        let r = check_bl_conditions(&AutonomousNonlinearity::power(7.0).unwrap(), 2, 0.75, 200);
        assert!(!r.subcritical);
        let r = check_bl_conditions(&AutonomousNonlinearity::power(9.0).unwrap(), 2, 0.75, 200);
        assert!(!r.subcritical);
    }

    #[test]
    fn small_s_constants() {
        let cubic = AutonomousNonlinearity::power(3.0).unwrap();
        assert!(small_s_bound_holds(&cubic, 0.25, 0.7));
        let c = pick_small_s_constants(&cubic).unwrap();
        assert_eq!(c.delta0, 0.499);
        assert!(small_s_bound_holds(&cubic, c.delta0, c.s1));
        let z = pick_small_s_constants(&AutonomousNonlinearity::zero()).unwrap();
        assert_eq!(z.delta0, 0.499);
        assert_eq!(
            pick_small_s_constants(&AutonomousNonlinearity::linear(1.0)),
            Err(ModelError::NoAdmissibleConstants)
        );
    }

    #[test]
    fn shifted_matches_formula() {
        let g = AutonomousNonlinearity::power(3.0).unwrap();
        let h = g.shifted(0.5);
        assert_eq!(h.f(2.0), -1.0 + 8.0);
        assert_eq!(h.F(2.0), -1.0 + 4.0);
    }
}
