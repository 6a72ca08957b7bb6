//! Closed-form geometry of instruction (coherent) states `|ψ⟩ = U(ψ)|0⟩`.
//!
//! Everything here is evaluated from phase-space data alone; the Fock-space
//! oracle reproduces these numbers independently.

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::phase_space::PhaseVector;

/// `θ₁₂ = Im(a*·b)`, the Weyl-Heisenberg composition phase.
pub fn weyl_phase(a: &PhaseVector, b: &PhaseVector) -> Result<f64> {
    Ok(a.dot(b)?.im)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OverlapValue {
    pub phase: f64,
    pub magnitude: f64,
}

impl OverlapValue {
    pub fn value(&self) -> C64 {
        C64::from_polar(self.magnitude, self.phase)
    }

    pub fn probability(&self) -> f64 {
        self.magnitude * self.magnitude
    }
}

/// `⟨a|b⟩ = e^{iθ} e^{−|a−b|²/2}`.
pub fn overlap(a: &PhaseVector, b: &PhaseVector) -> Result<OverlapValue> {
    a.check_dim(b)?;
    let phase = weyl_phase(a, b)?;
    let magnitude = (-(a - b).norm_sqr() / 2.0).exp();
    Ok(OverlapValue { phase, magnitude })
}

/// Beam intensity `|ψ|²`.
pub fn intensity(v: &PhaseVector) -> f64 {
    v.norm_sqr()
}

/// `⟨a_⊥|b_⊥⟩` for the normalized components orthogonal to the vacuum.
///
/// Uses `⟨a|b⟩ − e^{−(|a|²+|b|²)/2} = e^{−(|a|²+|b|²)/2} (e^{a*·b} − 1)` so the
/// small-norm regime keeps full relative precision.
pub fn perp_overlap(a: &PhaseVector, b: &PhaseVector) -> Result<C64> {
    a.check_dim(b)?;
    let (na, nb) = (a.norm_sqr(), b.norm_sqr());
    if na == 0.0 || nb == 0.0 {
        return Err(Error::ZeroNorm("perp state"));
    }
    let numerator = (-(na + nb) / 2.0).exp() * complex_expm1(a.dot(b)?);
    let denominator = ((-(-na).exp_m1()) * (-(-nb).exp_m1())).sqrt();
    Ok(numerator / denominator)
}

// exp(z) − 1 without cancellation for small |z|.
fn complex_expm1(z: C64) -> C64 {
    let half = (z.im / 2.0).sin();
    C64::new(z.re.exp_m1() * z.im.cos() - 2.0 * half * half, z.re.exp() * z.im.sin())
}

/// Number statistics of `|ψ_⊥⟩`.
#[derive(Debug, Clone, PartialEq)]
pub struct BeamStats {
    pub nbar_k: Vec<f64>,
    pub var_k: Vec<f64>,
    pub nbar_total: f64,
    pub n2bar_total: f64,
    /// `ΔN / N̄`
    pub marker: f64,
}

impl BeamStats {
    pub fn total_variance(&self) -> f64 {
        (self.n2bar_total - self.nbar_total * self.nbar_total).max(0.0)
    }

    /// `ΔN_k / N̄_k`, or `None` for an empty mode.
    pub fn relative_dispersion(&self, k: usize) -> Option<f64> {
        (self.nbar_k[k] > 0.0).then(|| self.var_k[k].sqrt() / self.nbar_k[k])
    }
}

pub fn beam_stats(v: &PhaseVector) -> Result<BeamStats> {
    let x = v.norm_sqr();
    if x == 0.0 {
        return Err(Error::ZeroNorm("beam statistics"));
    }
    let d = -(-x).exp_m1();
    let mut nbar_k = Vec::with_capacity(v.dim());
    let mut var_k = Vec::with_capacity(v.dim());
    for z in v.components() {
        let s = z.norm_sqr();
        let mean = s / d;
        let second = (s * s + s) / d;
        nbar_k.push(mean);
        var_k.push((second - mean * mean).max(0.0));
    }
    let nbar_total = x / d;
    let n2bar_total = (x * x + x) / d;
    let marker = total_marker(x);
    Ok(BeamStats { nbar_k, var_k, nbar_total, n2bar_total, marker })
}

// ΔN/N̄ as a function of x = |ψ|²:  var/N̄² = (1 + x) d / x − 1,  d = 1 − e^{−x}.
fn total_marker(x: f64) -> f64 {
    let d = -(-x).exp_m1();
    ((1.0 + x) * d / x - 1.0).max(0.0).sqrt()
}

/// `ΔN/N̄` for any state of norm `norm`; it depends on `|ψ|` only.
pub fn marker_at(norm: f64) -> Result<f64> {
    if !(norm > 0.0 && norm.is_finite()) {
        return Err(Error::InvalidArgument(format!("marker needs a positive finite norm, got {norm}")));
    }
    Ok(total_marker(norm * norm))
}

#[derive(Debug, Clone, PartialEq)]
pub struct MarkerScan {
    /// `(|ψ|, ΔN/N̄)` in grid order.
    pub curve: Vec<(f64, f64)>,
    pub argmax_norm: f64,
    pub max_marker: f64,
}

pub const DEFAULT_SCAN: (f64, f64, f64) = (0.05, 20.0, 0.001);

/// Evaluates the marker on the grid `norm_min + k·step ≤ norm_max`.
pub fn marker_scan(norm_min: f64, norm_max: f64, step: f64) -> Result<MarkerScan> {
    if !(norm_min > 0.0 && norm_max > norm_min && step > 0.0 && norm_max.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "marker scan needs 0 < min < max and step > 0 (got {norm_min}, {norm_max}, {step})"
        )));
    }
    let count = ((norm_max - norm_min) / step + 1e-9).floor() as usize + 1;
    let mut curve = Vec::with_capacity(count);
    let (mut argmax_norm, mut max_marker) = (norm_min, f64::NEG_INFINITY);
    for k in 0..count {
        let r = norm_min + k as f64 * step;
        let m = total_marker(r * r);
        if m > max_marker {
            max_marker = m;
            argmax_norm = r;
        }
        curve.push((r, m));
    }
    Ok(MarkerScan { curve, argmax_norm, max_marker })
}
