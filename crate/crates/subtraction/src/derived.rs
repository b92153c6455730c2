//! Smoothed pulse quantities ũ, G, Θ̃, w̃ on a composite Gauss–Legendre grid.
//!
//! Each quantity solves a linear ODE y' = −λy + λf with y(0) = 0. Instead of
//! a Runge–Kutta sweep the solution is advanced panel by panel with weights
//! that integrate the exponential kernel exactly against the panel
//! interpolant of f, so large γ only costs panels, never stability.

use std::collections::HashMap;

use crate::pulse::PulseShape;
use crate::quadrature::{gauss_legendre, kernel_weights};
use crate::{Error, Result};

/// Resolution of the composite rule.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    /// Panels used when γ is small.
    pub min_panels: usize,
    /// Gauss–Legendre nodes per panel.
    pub order: usize,
    /// Largest λh allowed for the fastest kernel (λ = 4γ).
    pub max_rate_step: f64,
}

impl Default for GridSpec {
    fn default() -> Self {
        Self { min_panels: 512, order: 10, max_rate_step: 1.0 }
    }
}

impl GridSpec {
    pub fn panels_for(&self, gamma: f64) -> usize {
        self.min_panels.max((4.0 * gamma / self.max_rate_step).ceil() as usize)
    }

    pub fn refined(mut self) -> Self {
        self.min_panels *= 2;
        self.max_rate_step /= 2.0;
        self
    }
}

#[derive(Debug, Clone)]
pub struct Grid {
    pub panels: usize,
    pub h: f64,
    pub local: Vec<f64>,
    local_w: Vec<f64>,
    /// Node times, panel-major.
    pub t: Vec<f64>,
    /// Quadrature weights matching `t`.
    pub w: Vec<f64>,
    sub: (Vec<f64>, Vec<f64>),
}

impl Grid {
    pub fn new(panels: usize, order: usize) -> Self {
        let (local, local_w) = gauss_legendre(order);
        let h = 1.0 / panels as f64;
        let mut t = Vec::with_capacity(panels * order);
        let mut w = Vec::with_capacity(panels * order);
        for p in 0..panels {
            for (x, wx) in local.iter().zip(&local_w) {
                t.push((p as f64 + x) * h);
                w.push(wx * h);
            }
        }
        Self { panels, h, local, local_w, t, w, sub: gauss_legendre(40) }
    }

    pub fn order(&self) -> usize {
        self.local.len()
    }

    pub fn integrate(&self, f: &[f64]) -> f64 {
        let mut acc = Compensated::default();
        for (a, b) in f.iter().zip(&self.w) {
            acc.add(a * b);
        }
        acc.value()
    }

    /// y(t) = ∫₀ᵗ e^{−λ(t−T)} f(T) dT at every node, plus y(1).
    pub fn forward(&self, f: &[f64], lambda: f64) -> (Vec<f64>, f64) {
        let m = self.order();
        let mu = lambda * self.h;
        let kw = kernel_weights(&self.local, mu, &self.sub);
        let decay_node: Vec<f64> = self.local.iter().map(|x| (-mu * x).exp()).collect();
        let decay_panel = (-mu).exp();
        let mut out = vec![0.0; f.len()];
        // y at the panel start, carried with a compensation term so that
        // long cumulative sums (λ = 0) keep full precision
        let mut y0 = Compensated::default();
        for p in 0..self.panels {
            let fp = &f[p * m..(p + 1) * m];
            for j in 0..m {
                let conv: f64 = kw[j].iter().zip(fp).map(|(a, b)| a * b).sum();
                out[p * m + j] = decay_node[j] * y0.value() + self.h * conv;
            }
            let conv_end: f64 = kw[m].iter().zip(fp).map(|(a, b)| a * b).sum();
            y0.scale(decay_panel);
            y0.add(self.h * conv_end);
        }
        (out, y0.value())
    }

    /// ∫ₜ¹ e^{−λ(s−t)} f(s) ds at every node, plus the value at t = 0.
    pub fn backward(&self, f: &[f64], lambda: f64) -> (Vec<f64>, f64) {
        // nodes are symmetric under t → 1 − t
        let rev: Vec<f64> = f.iter().rev().copied().collect();
        let (mut y, end) = self.forward(&rev, lambda);
        y.reverse();
        (y, end)
    }

    /// Weights of the local rule (for tests).
    pub fn local_weights(&self) -> &[f64] {
        &self.local_w
    }
}

/// Neumaier-compensated accumulator.
#[derive(Debug, Default, Clone, Copy)]
struct Compensated {
    sum: f64,
    err: f64,
}

impl Compensated {
    fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.err += (self.sum - t) + x;
        } else {
            self.err += (x - t) + self.sum;
        }
        self.sum = t;
    }

    fn scale(&mut self, s: f64) {
        self.sum *= s;
        self.err *= s;
    }

    fn value(&self) -> f64 {
        self.sum + self.err
    }
}

/// Pulse and its smoothed companions at the grid nodes.
#[derive(Debug, Clone)]
pub struct SubtractionDerived {
    pub gamma: f64,
    pub grid: Grid,
    pub u: Vec<f64>,
    /// ũ(t) = ∫₀ᵗ 2γ e^{−2γ(t−T)} u(T) dT
    pub u_tilde: Vec<f64>,
    /// ũ(1)
    pub u_tilde_end: f64,
    /// G(t) = ∫ₜ¹ u²
    pub g_tail: Vec<f64>,
    /// Θ̃(t) = ∫₀ᵗ 2γ (ũ − u) e^{−2γ(t−t′)} dt′
    pub theta_tilde: Vec<f64>,
    /// w̃(t) = ∫₀ᵗ 4γ (uũ − uΘ̃) e^{−4γ(t−t′)} dt′
    pub w_tilde: Vec<f64>,
}

impl SubtractionDerived {
    pub fn new(pulse: &PulseShape, gamma: f64, spec: GridSpec) -> Result<Self> {
        if !(gamma > 0.0) || !gamma.is_finite() {
            return Err(Error::InvalidGamma(gamma));
        }
        let grid = Grid::new(spec.panels_for(gamma), spec.order);
        let u: Vec<f64> = grid.t.iter().map(|&t| pulse.eval(t)).collect();
        let (ut, ut_end) = grid.forward(&u, 2.0 * gamma);
        let u_tilde: Vec<f64> = ut.iter().map(|v| 2.0 * gamma * v).collect();
        let u2: Vec<f64> = u.iter().map(|v| v * v).collect();
        let (g_tail, _) = grid.backward(&u2, 0.0);
        let diff: Vec<f64> = u_tilde.iter().zip(&u).map(|(a, b)| a - b).collect();
        let (th, _) = grid.forward(&diff, 2.0 * gamma);
        let theta_tilde: Vec<f64> = th.iter().map(|v| 2.0 * gamma * v).collect();
        let src: Vec<f64> = (0..u.len()).map(|i| u[i] * u_tilde[i] - u[i] * theta_tilde[i]).collect();
        let (wt, _) = grid.forward(&src, 4.0 * gamma);
        let w_tilde = wt.iter().map(|v| 4.0 * gamma * v).collect();
        Ok(Self { gamma, grid, u, u_tilde, u_tilde_end: 2.0 * gamma * ut_end, g_tail, theta_tilde, w_tilde })
    }

    /// g(t) = u(t)/√G(t), infinite where G vanishes.
    pub fn g_rate(&self) -> Vec<f64> {
        self.u.iter().zip(&self.g_tail).map(|(u, g)| if *g > 0.0 { u / g.sqrt() } else { f64::INFINITY }).collect()
    }
}

/// Caches derived quantities per (pulse, γ) for sweeps.
#[derive(Debug, Default)]
pub struct DerivedCache {
    map: HashMap<(String, u64), SubtractionDerived>,
}

impl DerivedCache {
    pub fn get(&mut self, pulse: &PulseShape, gamma: f64, spec: GridSpec) -> Result<&SubtractionDerived> {
        let key = (pulse.name().to_string(), gamma.to_bits());
        if !self.map.contains_key(&key) {
            self.map.insert(key.clone(), SubtractionDerived::new(pulse, gamma, spec)?);
        }
        Ok(&self.map[&key])
    }
}
