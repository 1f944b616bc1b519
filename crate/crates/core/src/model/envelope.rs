use serde::Serialize;

use super::{AutonomousNonlinearity, ModelError};

/// Monotone majorant `h̄` of the super-linear part of `f` and its primitive `H̄`.
///
/// Between tabulation nodes `s_i < s ≤ s_{i+1}` the envelope is the power law
/// `h̄(s) = ρ_{i+1} s^{p₀}`, and `H̄` is its exact integral.
#[derive(Clone, Debug, Serialize)]
pub struct Envelope {
    pub delta0: f64,
    pub s1: f64,
    pub p0: f64,
    pub s2: f64,
    /// Tabulation nodes, starting at 0.
    pub nodes: Vec<f64>,
    /// `h(s) = (f(s) - (1 - δ₀) s)₊` at the nodes.
    pub h: Vec<f64>,
    /// Running supremum of `h(t) / t^{p₀}` over nodes `t ≤ s`.
    pub rho: Vec<f64>,
    pub h_bar: Vec<f64>,
    pub big_h_bar: Vec<f64>,
}

pub const DEFAULT_RESOLUTION: usize = 1 << 14;

/// Tabulates the envelope on `[0, s_max]`.
///
/// `critical` is `2*_α`; `p0` must lie in `(1, critical - 1)`. `s1` is carried
/// for reporting only.
pub fn build_envelope(
    f: &AutonomousNonlinearity,
    delta0: f64,
    s1: f64,
    p0: f64,
    s_max: f64,
    resolution: usize,
    critical: f64,
) -> Result<Envelope, ModelError> {
    if !(p0 > 1.0 && p0 < critical - 1.0) {
        return Err(ModelError::BadExponent {
            p0,
            upper: critical - 1.0,
        });
    }
    if !(delta0 > 0.0 && delta0 < 0.5) {
        return Err(ModelError::InvalidParameter(format!("delta0 = {delta0} not in (0, 1/2)")));
    }
    if !(s_max > 0.0 && s_max.is_finite()) || resolution < 16 {
        return Err(ModelError::InvalidParameter("s_max must be positive and resolution at least 16".into()));
    }
    let nodes = tabulation_nodes(s_max, resolution);
    let n = nodes.len();
    let mut h = vec![0.0; n];
    let mut rho = vec![0.0; n];
    let mut h_bar = vec![0.0; n];
    let mut big_h_bar = vec![0.0; n];
    let mut running: f64 = 0.0;
    for i in 1..n {
        let s = nodes[i];
        h[i] = (f.f(s) - (1.0 - delta0) * s).max(0.0);
        running = running.max(h[i] / s.powf(p0));
        rho[i] = running;
        h_bar[i] = (s.powf(p0) * running).max(h[i]);
        big_h_bar[i] = big_h_bar[i - 1] + running * (s.powf(p0 + 1.0) - nodes[i - 1].powf(p0 + 1.0)) / (p0 + 1.0);
    }
    let s2 = nodes
        .iter()
        .zip(&rho)
        .take_while(|(_, &r)| r == 0.0)
        .last()
        .map_or(0.0, |(&s, _)| s);
    Ok(Envelope {
        delta0,
        s1,
        p0,
        s2,
        nodes,
        h,
        rho,
        h_bar,
        big_h_bar,
    })
}

/// `0`, then log-spaced on `[1e-6, 1]`, then linear on `[1, s_max]`.
fn tabulation_nodes(s_max: f64, resolution: usize) -> Vec<f64> {
    let mut nodes = vec![0.0];
    let log_top = s_max.min(1.0);
    let n_log = if s_max > 1.0 { resolution / 2 } else { resolution };
    let (a, b) = (1e-6f64.ln(), log_top.ln());
    nodes.extend((0..n_log).map(|i| (a + (b - a) * i as f64 / (n_log - 1) as f64).exp()));
    if s_max > 1.0 {
        let n_lin = resolution - n_log;
        nodes.extend((1..=n_lin).map(|i| 1.0 + (s_max - 1.0) * i as f64 / n_lin as f64));
    }
    nodes.dedup();
    nodes
}

impl Envelope {
    /// Index `i` of the segment `(s_i, s_{i+1}]` holding `a > 0`; the last
    /// segment is extended to infinity.
    fn segment(&self, a: f64) -> usize {
        let i = self.nodes.partition_point(|&x| x < a);
        i.clamp(1, self.nodes.len() - 1) - 1
    }

    fn rho_at(&self, a: f64) -> (usize, f64) {
        let last = self.nodes.len() - 1;
        if a > self.nodes[last] {
            return (last, self.rho[last]);
        }
        let i = self.segment(a);
        (i, self.rho[i + 1])
    }

    /// `h̄(s)`, odd in `s`.
    pub fn h_bar_at(&self, s: f64) -> f64 {
        let a = s.abs();
        if a == 0.0 {
            return 0.0;
        }
        let (_, rho) = self.rho_at(a);
        let v = rho * a.powf(self.p0);
        if s < 0.0 {
            -v
        } else {
            v
        }
    }

    /// `H̄(s)`, even in `s`.
    #[allow(non_snake_case)]
    pub fn H_bar_at(&self, s: f64) -> f64 {
        let a = s.abs();
        if a == 0.0 {
            return 0.0;
        }
        let (i, rho) = self.rho_at(a);
        let q = self.p0 + 1.0;
        self.big_h_bar[i] + rho * (a.powf(q) - self.nodes[i].powf(q)) / q
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cubic_envelope() -> Envelope {
        let f = AutonomousNonlinearity::power(3.0).unwrap();
        build_envelope(&f, 0.25, 0.7, 2.0, 100.0, DEFAULT_RESOLUTION, 8.0).unwrap()
    }

    #[test]
    fn vanishing_radius_for_cubic() {
        let env = cubic_envelope();
        assert!(env.s2 >= 0.86 && env.s2 < 0.75f64.sqrt(), "{}", env.s2);
        for i in 0..=86 {
            assert_eq!(env.h_bar_at(i as f64 * 0.01), 0.0);
        }
    }

    #[test]
    fn lemma_properties_at_nodes() {
        let env = cubic_envelope();
        let f = AutonomousNonlinearity::power(3.0).unwrap();
        for (i, &s) in env.nodes.iter().enumerate() {
            assert!((env.p0 + 1.0) * env.big_h_bar[i] <= s * env.h_bar[i]);
            assert!(f.F(s) - 0.75 * s * s / 2.0 <= env.big_h_bar[i]);
            assert!(env.h_bar[i] >= env.h[i]);
        }
        assert!(env.rho.windows(2).all(|w| w[1] >= w[0]));
    }

    #[test]
    fn evaluators_agree_with_table() {
        let env = cubic_envelope();
        for i in [1usize, 500, 9000, env.nodes.len() - 1] {
            let s = env.nodes[i];
            assert_eq!(env.h_bar_at(s), env.h_bar[i]);
            assert!((env.H_bar_at(s) - env.big_h_bar[i]).abs() <= 1e-12 * (1.0 + env.big_h_bar[i]));
            assert_eq!(env.h_bar_at(-s), -env.h_bar[i]);
        }
        // Beyond the table the last power law continues.
        assert!(env.H_bar_at(150.0) > env.H_bar_at(100.0));
    }

    #[test]
    fn bad_exponent() {
        let f = AutonomousNonlinearity::power(3.0).unwrap();
        assert!(matches!(
            build_envelope(&f, 0.25, 0.7, 7.5, 100.0, 1024, 8.0),
            Err(ModelError::BadExponent { .. })
        ));
        assert!(matches!(
            build_envelope(&f, 0.25, 0.7, 1.0, 100.0, 1024, 8.0),
            Err(ModelError::BadExponent { .. })
        ));
    }
}
