//! Object–device amplification: run the pair coupling, read the pointer,
//! recover object amplitudes and size the coupling for a resolution target.
//!
//! Pairs `(λ_j, μ_j)` are coupled index by index; there are no cross-pair
//! terms. With `φ_j = arg η_j` and `κ_j = |η_j|`:
//!
//! ```text
//! λ_jt = λ_j cosh(κ_j t) + μ_j* e^{iφ_j} sinh(κ_j t)
//! μ_jt = μ_j cosh(κ_j t) + λ_j* e^{iφ_j} sinh(κ_j t)
//! ```

use num_complex::Complex64 as C64;

use crate::coherent_states::{overlap, OverlapValue};
use crate::error::{Error, Result};
use crate::phase_space::{PhaseVector, QuadraticGenerator};

#[derive(Debug, Clone, PartialEq)]
pub struct MeasurementScenario {
    object: Vec<C64>,
    device: Vec<C64>,
    couplings: Vec<C64>,
    time: f64,
}

impl MeasurementScenario {
    pub fn new(object: Vec<C64>, device: Vec<C64>, couplings: Vec<C64>, time: f64) -> Result<Self> {
        let n = object.len();
        for len in [device.len(), couplings.len()] {
            if len != n {
                return Err(Error::DimensionMismatch { expected: n, found: len });
            }
        }
        let finite = |z: &C64| z.re.is_finite() && z.im.is_finite();
        if !(object.iter().all(finite) && device.iter().all(finite) && couplings.iter().all(finite)) {
            return Err(Error::NonFinite("measurement scenario"));
        }
        if !(time.is_finite() && time >= 0.0) {
            return Err(Error::InvalidArgument(format!("time must be finite and non-negative, got {time}")));
        }
        Ok(Self { object, device, couplings, time })
    }

    /// Device in the ready state `μ = 0`.
    pub fn ready(object: Vec<C64>, couplings: Vec<C64>, time: f64) -> Result<Self> {
        let device = vec![C64::new(0.0, 0.0); object.len()];
        Self::new(object, device, couplings, time)
    }

    pub fn object(&self) -> &[C64] {
        &self.object
    }

    pub fn device(&self) -> &[C64] {
        &self.device
    }

    pub fn couplings(&self) -> &[C64] {
        &self.couplings
    }

    pub fn time(&self) -> f64 {
        self.time
    }

    pub fn pairs(&self) -> usize {
        self.object.len()
    }

    pub fn with_time(&self, time: f64) -> Result<Self> {
        Self::new(self.object.clone(), self.device.clone(), self.couplings.clone(), time)
    }

    /// Quadratic generator of the coupling on `(λ, μ)`.
    pub fn generator(&self) -> Result<QuadraticGenerator> {
        QuadraticGenerator::pair_coupling(&self.couplings)
    }

    /// Concatenated phase-space point `(λ, μ)`.
    pub fn phase_vector(&self) -> Result<PhaseVector> {
        let mut c = self.object.clone();
        c.extend_from_slice(&self.device);
        PhaseVector::new(c)
    }

    /// Common `|η_j|` when all magnitudes agree to `rel_tol`.
    pub fn uniform_coupling_magnitude(&self, rel_tol: f64) -> Option<f64> {
        uniform_magnitude(&self.couplings, rel_tol)
    }
}

pub fn uniform_magnitude(couplings: &[C64], rel_tol: f64) -> Option<f64> {
    let first = couplings.first()?.norm();
    couplings.iter().all(|z| (z.norm() - first).abs() <= rel_tol * first.max(f64::MIN_POSITIVE)).then_some(first)
}

#[derive(Debug, Clone, PartialEq)]
pub struct MeasurementRecord {
    pub lambda_t: Vec<C64>,
    pub mu_t: Vec<C64>,
    /// `|ψ_t|² = |λ_t|² + |μ_t|²`
    pub norm_sq: f64,
    /// Pairs with `η_j = 0`; their `λ_j` cannot be recovered from the pointer.
    pub uncoupled: Vec<usize>,
}

impl MeasurementRecord {
    pub fn phase_vector(&self) -> Result<PhaseVector> {
        let mut c = self.lambda_t.clone();
        c.extend_from_slice(&self.mu_t);
        PhaseVector::new(c)
    }

    /// Overlap of the two amplified instruction states.
    pub fn overlap_with(&self, other: &Self) -> Result<OverlapValue> {
        overlap(&self.phase_vector()?, &other.phase_vector()?)
    }
}

fn evolve_pair(lambda: C64, mu: C64, eta: C64, t: f64) -> (C64, C64) {
    let kappa = eta.norm();
    let phase = if kappa > 0.0 { eta / kappa } else { C64::new(1.0, 0.0) };
    let (ch, sh) = ((kappa * t).cosh(), (kappa * t).sinh());
    (lambda * ch + mu.conj() * phase * sh, mu * ch + lambda.conj() * phase * sh)
}

fn evolve(object: &[C64], device: &[C64], couplings: &[C64], t: f64) -> (Vec<C64>, Vec<C64>) {
    object.iter().zip(device).zip(couplings).map(|((&l, &m), &e)| evolve_pair(l, m, e, t)).unzip()
}

/// Closed-form orbit at the scenario time.
pub fn run(s: &MeasurementScenario) -> MeasurementRecord {
    let (lambda_t, mu_t) = evolve(&s.object, &s.device, &s.couplings, s.time);
    let norm_sq = lambda_t.iter().chain(mu_t.iter()).map(|z| z.norm_sqr()).sum();
    let uncoupled = s.couplings.iter().enumerate().filter(|(_, z)| z.norm() == 0.0).map(|(j, _)| j).collect();
    MeasurementRecord { lambda_t, mu_t, norm_sq, uncoupled }
}

/// Inverts the ready-state pointer reading:
/// `λ_j = conj(μ_jt e^{−i arg η_j} / sinh(|η_j| t))`.
pub fn recover_lambda(mu_t: &[C64], couplings: &[C64], t: f64) -> Result<Vec<C64>> {
    if mu_t.len() != couplings.len() {
        return Err(Error::DimensionMismatch { expected: couplings.len(), found: mu_t.len() });
    }
    if !(t > 0.0 && t.is_finite()) {
        return Err(Error::DivisionByZero("recovery needs t > 0"));
    }
    mu_t.iter()
        .zip(couplings)
        .map(|(&mu, &eta)| {
            let kappa = eta.norm();
            if kappa == 0.0 {
                return Err(Error::DivisionByZero("recovery needs every coupling non-zero"));
            }
            let phase = eta / kappa;
            Ok((mu * phase.conj() / (kappa * t).sinh()).conj())
        })
        .collect()
}

/// `|μ_j / μ_ref|²`, which equals `|λ_j / λ_ref|²` when every `|η_j|` is
/// the same. Non-uniform magnitudes void that identity; callers must check.
pub fn amplitude_ratios(mu_t: &[C64], reference: usize) -> Result<Vec<f64>> {
    let denom = mu_t
        .get(reference)
        .ok_or_else(|| Error::InvalidArgument(format!("reference index {reference} out of range")))?
        .norm_sqr();
    if denom == 0.0 {
        return Err(Error::DivisionByZero("reference pointer component is zero"));
    }
    Ok(mu_t.iter().map(|z| z.norm_sqr() / denom).collect())
}

/// `exp(−|λ¹−λ²|² cosh(2|η|t))`: squared overlap of two ready-state runs
/// under a uniform coupling magnitude.
pub fn resolvability(lambda_1: &[C64], lambda_2: &[C64], eta_mag: f64, t: f64) -> Result<f64> {
    if lambda_1.len() != lambda_2.len() {
        return Err(Error::DimensionMismatch { expected: lambda_1.len(), found: lambda_2.len() });
    }
    let dist_sq: f64 = lambda_1.iter().zip(lambda_2).map(|(a, b)| (a - b).norm_sqr()).sum();
    Ok((-dist_sq * (2.0 * eta_mag * t).cosh()).exp())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ResolvabilityCheck {
    pub closed_form: f64,
    /// `|⟨ψ¹_t|ψ²_t⟩|²` from the two orbits.
    pub from_orbits: f64,
}

impl ResolvabilityCheck {
    pub fn discrepancy(&self) -> f64 {
        (self.closed_form - self.from_orbits).abs()
    }
}

/// Evaluates [`resolvability`] and the overlap of the two explicit runs.
/// `couplings` may carry arbitrary phases but must share one magnitude.
pub fn resolvability_check(
    lambda_1: &[C64],
    lambda_2: &[C64],
    couplings: &[C64],
    t: f64,
) -> Result<ResolvabilityCheck> {
    let eta_mag = uniform_magnitude(couplings, 1e-12)
        .ok_or_else(|| Error::InvalidArgument("resolvability needs a uniform coupling magnitude".into()))?;
    let closed_form = resolvability(lambda_1, lambda_2, eta_mag, t)?;
    let r1 = run(&MeasurementScenario::ready(lambda_1.to_vec(), couplings.to_vec(), t)?);
    let r2 = run(&MeasurementScenario::ready(lambda_2.to_vec(), couplings.to_vec(), t)?);
    let from_orbits = r1.overlap_with(&r2)?.probability();
    Ok(ResolvabilityCheck { closed_form, from_orbits })
}

/// Smallest `|η|` with `exp(−δ² cosh(2|η|t)) ≤ ε`.
pub fn choose_eta(lattice_spacing: f64, epsilon: f64, t: f64) -> Result<f64> {
    if !(lattice_spacing > 0.0 && lattice_spacing.is_finite()) {
        return Err(Error::InvalidArgument(format!("lattice spacing must be positive, got {lattice_spacing}")));
    }
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(Error::InvalidArgument(format!("epsilon must lie in (0, 1), got {epsilon}")));
    }
    if !(t > 0.0 && t.is_finite()) {
        return Err(Error::InvalidArgument(format!("time must be positive, got {t}")));
    }
    let delta_sq = lattice_spacing * lattice_spacing;
    let target = (1.0 / epsilon).ln() / delta_sq;
    if target <= 1.0 {
        return Ok(0.0);
    }
    let mut eta = target.acosh() / (2.0 * t);
    // acosh and the division can each round down by an ulp.
    while (-delta_sq * (2.0 * eta * t).cosh()).exp() > epsilon {
        eta = eta.next_up();
    }
    Ok(eta)
}

/// Runs forward to `t`, then back by the same generator; returns the largest
/// amplitude deviation from the starting point.
pub fn reverse_check(s: &MeasurementScenario) -> f64 {
    let (l, m) = evolve(&s.object, &s.device, &s.couplings, s.time);
    let (l0, m0) = evolve(&l, &m, &s.couplings, -s.time);
    l0.iter().zip(&s.object).chain(m0.iter().zip(&s.device)).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max)
}
