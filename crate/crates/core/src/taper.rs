//! Tapering functions F_ρ and their quartic duals f_ρ.

use std::num::NonZeroUsize;
use std::sync::OnceLock;

use gauss_quad::GaussLegendre;
use serde::Serialize;

use crate::error::{Error, Result};

/// Required bound on the normalized Fourier norm (1/2π)∫|F̂₁′(p)|dp.
pub const FOURIER_L1_BOUND: f64 = 8.0;

fn bump(t: f64) -> f64 {
    if t <= 0.0 || t >= 1.0 {
        0.0
    } else {
        (-1.0 / (t * (1.0 - t))).exp()
    }
}

/// Second derivative of the bump.
fn bump_dd(t: f64) -> f64 {
    if t <= 0.0 || t >= 1.0 {
        return 0.0;
    }
    let s = t * (1.0 - t);
    let u1 = (1.0 - 2.0 * t) / (s * s);
    let u2 = -2.0 / (s * s) + 2.0 * (1.0 - 2.0 * t).powi(2) / (s * s * s);
    bump(t) * (u1 * u1 + u2)
}

fn rule(n: usize) -> GaussLegendre {
    GaussLegendre::new(NonZeroUsize::new(n).unwrap())
}

struct Profile {
    rule: GaussLegendre,
    total: f64,
    fourier_l1: f64,
    fourier_tail: f64,
}

fn profile() -> &'static Profile {
    static P: OnceLock<Profile> = OnceLock::new();
    P.get_or_init(|| {
        let rule = rule(48);
        let total = integrate_bump(&rule, 1.0);
        let (fourier_l1, fourier_tail) = measure_fourier_l1(total);
        Profile { rule, total, fourier_l1, fourier_tail }
    })
}

/// ∫₀ᵗ bump, split in panels so the rule resolves the flat ends.
fn integrate_bump(rule: &GaussLegendre, t: f64) -> f64 {
    if t <= 0.0 {
        return 0.0;
    }
    let t = t.min(1.0);
    let panels = 8;
    let h = t / panels as f64;
    (0..panels).map(|i| rule.integrate(i as f64 * h, (i + 1) as f64 * h, bump)).sum()
}

/// (1/2π)∫|F̂₁′(p)|dp and the bound on the neglected tail beyond the cutoff.
///
/// F₁′ = −(2/Z)·bump(2|x|−1)·sgn(x) on ½ ≤ |x| ≤ 1, so |F̂₁′(p)| = (2/Z)|∫₀¹ bump(t) sin(p(1+t)/2) dt|.
fn measure_fourier_l1(total: f64) -> (f64, f64) {
    let inner = rule(64);
    let nodes: Vec<(f64, f64)> = {
        let panels = 16;
        let h = 1.0 / panels as f64;
        let mut v = Vec::new();
        for i in 0..panels {
            let (a, b) = (i as f64 * h, (i + 1) as f64 * h);
            for &(x, w) in inner.as_node_weight_pairs() {
                let t = a + (b - a) * (x + 1.0) / 2.0;
                v.push((t, w * (b - a) / 2.0 * bump(t)));
            }
        }
        v
    };
    let ft = |p: f64| -> f64 { 2.0 / total * nodes.iter().map(|(t, w)| w * (p * (1.0 + t) / 2.0).sin()).sum::<f64>().abs() };
    let cutoff = 400.0;
    let outer = rule(12);
    let step = 0.25;
    let n = (cutoff / step) as usize;
    let half: f64 = (0..n).map(|i| outer.integrate(i as f64 * step, (i + 1) as f64 * step, ft)).sum();
    // |F̂₁′(p)| ≤ ‖F₁‴‖₁/p², ‖F₁‴‖₁ = (8/Z)∫₀¹|bump″|
    let third = 8.0 / total * integrate_abs(bump_dd);
    let tail = third / cutoff;
    (half / std::f64::consts::PI, tail / std::f64::consts::PI)
}

fn integrate_abs(f: impl Fn(f64) -> f64) -> f64 {
    let r = rule(32);
    let panels = 64;
    let h = 1.0 / panels as f64;
    (0..panels).map(|i| r.integrate(i as f64 * h, (i + 1) as f64 * h, |t| f(t).abs())).sum()
}

/// F₁: even, 1 on [−½, ½], 0 outside (−1, 1).
pub fn taper_unit(x: f64) -> f64 {
    let a = x.abs();
    if a <= 0.5 {
        1.0
    } else if a >= 1.0 {
        0.0
    } else {
        let p = profile();
        (1.0 - integrate_bump(&p.rule, 2.0 * a - 1.0) / p.total).clamp(0.0, 1.0)
    }
}

/// F_ρ(x) = F₁(x/ρ) together with its dual f_ρ = (1 − F_ρ⁴)^{1/4}.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct TaperPair {
    pub rho: f64,
    /// (1/2π)‖F̂₁′‖_{L¹}.
    pub fourier_l1: f64,
    /// Upper bound on the part of the integral beyond the quadrature cutoff.
    pub fourier_tail: f64,
}

impl TaperPair {
    pub fn new(rho: f64) -> Result<Self> {
        if !(rho > 0.0) {
            return Err(Error::Domain(format!("taper radius must be positive, got {rho}")));
        }
        let p = profile();
        if p.fourier_l1 + p.fourier_tail > FOURIER_L1_BOUND {
            return Err(Error::Consistency(format!("taper Fourier norm {} exceeds {FOURIER_L1_BOUND}", p.fourier_l1)));
        }
        Ok(TaperPair { rho, fourier_l1: p.fourier_l1, fourier_tail: p.fourier_tail })
    }

    #[allow(non_snake_case)]
    pub fn F(&self, x: f64) -> f64 {
        taper_unit(x / self.rho)
    }

    pub fn f(&self, x: f64) -> f64 {
        let t = self.F(x);
        (1.0 - t.powi(4)).max(0.0).powf(0.25)
    }

    /// max |f⁴ + F⁴ − 1| over `points` equally spaced x ∈ [−1.2ρ, 1.2ρ].
    pub fn duality_residual(&self, points: usize) -> f64 {
        (0..points)
            .map(|i| {
                let x = self.rho * (-1.2 + 2.4 * i as f64 / (points - 1).max(1) as f64);
                (self.f(x).powi(4) + self.F(x).powi(4) - 1.0).abs()
            })
            .fold(0.0, f64::max)
    }
}
