use std::fmt;
use std::sync::Arc;

use serde::Serialize;

use super::nonlinearity::quadratic_shift;
use super::{AutonomousNonlinearity, ModelError};

type PointFn = Arc<dyn Fn(&[f64]) -> f64 + Send + Sync>;
type PointGradFn = Arc<dyn Fn(&[f64], &mut [f64]) + Send + Sync>;
type FieldFn = Arc<dyn Fn(&[f64], f64) -> f64 + Send + Sync>;
type FieldGradFn = Arc<dyn Fn(&[f64], f64, &mut [f64]) + Send + Sync>;

/// Ingredients of `f(x, s) = -V(x) s + g(x, s)`.
#[derive(Clone)]
pub struct SpatialSpec {
    pub name: String,
    pub v: PointFn,
    /// `∇V`, if known analytically.
    pub grad_v: Option<PointGradFn>,
    pub g: FieldFn,
    /// `G(x, s) = ∫₀ˢ g(x, σ) dσ`.
    pub big_g: FieldFn,
    /// `∇ₓG`, if known analytically.
    pub grad_x_big_g: Option<FieldGradFn>,
    pub v_inf: f64,
    pub g_inf: AutonomousNonlinearity,
    pub mu: f64,
}

/// Where the structural conditions are sampled.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ValidationLattice {
    pub dim: usize,
    /// Points per axis on `[-radius, radius]`.
    pub points: usize,
    pub radius: f64,
    /// Amplitude samples on `[-s_max, s_max]`.
    pub s_samples: usize,
    pub s_max: f64,
}

impl ValidationLattice {
    pub fn new(dim: usize) -> Self {
        ValidationLattice {
            dim,
            points: 13,
            radius: 6.0,
            s_samples: 60,
            s_max: 20.0,
        }
    }

    fn positions(&self) -> Vec<Vec<f64>> {
        let axis: Vec<f64> = (0..self.points)
            .map(|i| -self.radius + 2.0 * self.radius * i as f64 / (self.points - 1) as f64)
            .collect();
        let total = self.points.pow(self.dim as u32);
        (0..total)
            .map(|mut flat| {
                let mut x = vec![0.0; self.dim];
                for d in (0..self.dim).rev() {
                    x[d] = axis[flat % self.points];
                    flat /= self.points;
                }
                x
            })
            .collect()
    }

    fn amplitudes(&self) -> Vec<f64> {
        (1..=self.s_samples)
            .flat_map(|i| {
                let s = self.s_max * (i as f64 / self.s_samples as f64).powi(2);
                [s, -s]
            })
            .collect()
    }
}

/// Sampled checks performed by [`make_spatial_problem`].
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SpatialReport {
    pub min_v: f64,
    pub odd_residual: f64,
    /// `min (F(x,s) - F∞(s))` over the samples.
    pub f4_min_gap: f64,
    pub f4_passed: bool,
    /// `max (μ G - g s)` over the samples with `s ≠ 0`.
    pub ar_worst: f64,
    pub samples: usize,
}

/// A validated x-dependent nonlinearity.
#[derive(Clone)]
pub struct SpatialNonlinearity {
    spec: SpatialSpec,
    report: SpatialReport,
}

impl fmt::Debug for SpatialNonlinearity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SpatialNonlinearity")
            .field("name", &self.spec.name)
            .field("v_inf", &self.spec.v_inf)
            .field("mu", &self.spec.mu)
            .field("report", &self.report)
            .finish()
    }
}

pub fn make_spatial_problem(spec: SpatialSpec, lattice: &ValidationLattice) -> Result<SpatialNonlinearity, ModelError> {
    if !(spec.mu > 2.0) {
        return Err(ModelError::InvalidParameter(format!("mu = {} must exceed 2", spec.mu)));
    }
    let xs = lattice.positions();
    let amps = lattice.amplitudes();
    let mut min_v = f64::INFINITY;
    for x in &xs {
        let v = (spec.v)(x);
        if !(v > -1.0) {
            return Err(ModelError::PotentialBelowMinusOne { x: x.clone(), value: v });
        }
        min_v = min_v.min(v);
    }
    if !(spec.v_inf > -1.0) {
        return Err(ModelError::PotentialBelowMinusOne {
            x: vec![f64::INFINITY; lattice.dim],
            value: spec.v_inf,
        });
    }
    let mut odd_residual: f64 = 0.0;
    let mut f4_min_gap = f64::INFINITY;
    let mut ar_worst = f64::NEG_INFINITY;
    let problem = SpatialNonlinearity {
        spec,
        report: SpatialReport {
            min_v,
            odd_residual: 0.0,
            f4_min_gap: 0.0,
            f4_passed: false,
            ar_worst: 0.0,
            samples: xs.len() * amps.len(),
        },
    };
    let sp = &problem.spec;
    for x in &xs {
        for &s in &amps {
            let g = (sp.g)(x, s);
            odd_residual = odd_residual.max((g + (sp.g)(x, -s)).abs() / (1.0 + g.abs()));
            let mu_g = sp.mu * (sp.big_g)(x, s);
            let gs = g * s;
            if !(mu_g > 0.0 && mu_g <= gs + 1e-12 * (1.0 + gs.abs())) {
                return Err(ModelError::ARConditionViolated {
                    x: x.clone(),
                    s,
                    mu_g,
                    gs,
                });
            }
            ar_worst = ar_worst.max(mu_g - gs);
            f4_min_gap = f4_min_gap.min(problem.big_f(x, s) - problem.big_f_inf(s));
        }
    }
    let mut problem = problem;
    problem.report.odd_residual = odd_residual;
    problem.report.f4_min_gap = f4_min_gap;
    problem.report.f4_passed = f4_min_gap >= -1e-12;
    problem.report.ar_worst = ar_worst;
    Ok(problem)
}

impl SpatialNonlinearity {
    pub fn name(&self) -> &str {
        &self.spec.name
    }

    pub fn report(&self) -> &SpatialReport {
        &self.report
    }

    pub fn spec(&self) -> &SpatialSpec {
        &self.spec
    }

    pub fn v_inf(&self) -> f64 {
        self.spec.v_inf
    }

    pub fn mu(&self) -> f64 {
        self.spec.mu
    }

    /// `f(x, s) = -V(x) s + g(x, s)`.
    pub fn f(&self, x: &[f64], s: f64) -> f64 {
        -(self.spec.v)(x) * s + (self.spec.g)(x, s)
    }

    /// `F(x, s) = -V(x) s²/2 + G(x, s)`.
    #[allow(non_snake_case)]
    pub fn big_f(&self, x: &[f64], s: f64) -> f64 {
        quadratic_shift((self.spec.v)(x), s, (self.spec.big_g)(x, s))
    }

    /// `F∞(s) = -V∞ s²/2 + G∞(s)`.
    pub fn big_f_inf(&self, s: f64) -> f64 {
        quadratic_shift(self.spec.v_inf, s, self.spec.g_inf.F(s))
    }

    /// The limit nonlinearity `f∞(s) = -V∞ s + g∞(s)` as an autonomous problem.
    pub fn limit(&self) -> AutonomousNonlinearity {
        self.spec.g_inf.shifted(self.spec.v_inf)
    }

    pub fn has_gradient(&self) -> bool {
        self.spec.grad_v.is_some() && self.spec.grad_x_big_g.is_some()
    }

    /// `x · ∇ₓF(x, s)`, when both gradients are available.
    pub fn x_dot_grad_f(&self, x: &[f64], s: f64, scratch: &mut [f64]) -> Option<f64> {
        let grad_v = self.spec.grad_v.as_ref()?;
        let grad_g = self.spec.grad_x_big_g.as_ref()?;
        grad_v(x, scratch);
        let dv: f64 = x.iter().zip(scratch.iter()).map(|(a, b)| a * b).sum();
        grad_g(x, s, scratch);
        let dg: f64 = x.iter().zip(scratch.iter()).map(|(a, b)| a * b).sum();
        Some(-dv * s * s * 0.5 + dg)
    }
}

/// `V(x) = -b₀ e^{-|x|²/w²}`, `g(x, s) = (1 + c₀ e^{-|x|²/w²}) |s|^{p-1} s`,
/// with limits `V∞ = 0` and `g∞(s) = |s|^{p-1} s`, `μ = p + 1`.
pub fn gaussian_bump_spec(b0: f64, c0: f64, width: f64, p: f64) -> Result<SpatialSpec, ModelError> {
    if !(width > 0.0 && c0 >= 0.0 && p > 1.0) {
        return Err(ModelError::InvalidParameter("bump needs width > 0, c0 >= 0 and p > 1".into()));
    }
    let g_inf = AutonomousNonlinearity::power(p)?;
    let w2 = width * width;
    let bump = move |x: &[f64]| (-x.iter().map(|c| c * c).sum::<f64>() / w2).exp();
    let g_pow = g_inf.clone();
    let big_g_pow = g_inf.clone();
    let grad_g_pow = g_inf.clone();
    Ok(SpatialSpec {
        name: "gaussian_bump".into(),
        v: Arc::new(move |x| -b0 * bump(x)),
        grad_v: Some(Arc::new(move |x, out| {
            let e = bump(x);
            for (o, &c) in out.iter_mut().zip(x) {
                *o = b0 * 2.0 * c / w2 * e;
            }
        })),
        g: Arc::new(move |x, s| (1.0 + c0 * bump(x)) * g_pow.f(s)),
        big_g: Arc::new(move |x, s| (1.0 + c0 * bump(x)) * big_g_pow.F(s)),
        grad_x_big_g: Some(Arc::new(move |x, s, out| {
            let e = bump(x);
            let big = grad_g_pow.F(s);
            for (o, &c) in out.iter_mut().zip(x) {
                *o = -c0 * 2.0 * c / w2 * e * big;
            }
        })),
        v_inf: 0.0,
        g_inf,
        mu: p + 1.0,
    })
}

/// The translation-invariant problem `V ≡ V∞`, `g ≡ g∞` written as a spatial one.
pub fn autonomous_spec(v_inf: f64, g_inf: AutonomousNonlinearity, mu: f64) -> SpatialSpec {
    let g_f = g_inf.clone();
    let g_big = g_inf.clone();
    SpatialSpec {
        name: "autonomous".into(),
        v: Arc::new(move |_| v_inf),
        grad_v: Some(Arc::new(|_, out| out.iter_mut().for_each(|o| *o = 0.0))),
        g: Arc::new(move |_, s| g_f.f(s)),
        big_g: Arc::new(move |_, s| g_big.F(s)),
        grad_x_big_g: Some(Arc::new(|_, _, out| out.iter_mut().for_each(|o| *o = 0.0))),
        v_inf,
        g_inf,
        mu,
    }
}
