//! Brute-force realization of the operator formalism on a truncated
//! multi-mode Fock space.
//!
//! Basis states are occupation tuples `(n₀, …, n_{m−1})` with `0 ≤ n_j ≤
//! cutoff`, ordered lexicographically with mode 0 varying slowest. All
//! operators are dense matrices built from truncated ladder matrices and
//! exponentiated with [`crate::linalg::expm`].
//!
//! Truncation only corrupts amplitudes near the top occupation level, so
//! residuals are measured on two restricted sets:
//!
//! * vector residuals ignore *edge* components (any occupation equal to the
//!   cutoff);
//! * operator residuals use *probe* columns, the basis states whose
//!   occupations are all at most `cutoff / 4`.

use ndarray::{Array1, Array2};
use num_complex::Complex64 as C64;

use crate::coherent_states::weyl_phase;
use crate::error::{Error, Result};
use crate::linalg::{self, ONE, ZERO};
use crate::phase_space::{flow, LinearCanonicalMap, PhaseVector, QuadraticGenerator};

pub const DEFAULT_DIMENSION_LIMIT: usize = 4096;

/// Probability allowed in the top occupation level before a state is
/// rejected as truncation-unreliable.
pub const TAIL_MASS_LIMIT: f64 = 1e-8;

/// Realized sign `s` in `U(a + b) = e^{s·iθ} U(a) U(b)` with
/// `θ = weyl_phase(a, b)`. Pinned by `weyl_relation_check`.
pub const WEYL_PHASE_SIGN: f64 = 1.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FockSpaceSpec {
    n_modes: usize,
    cutoff: usize,
    dim_limit: usize,
}

impl FockSpaceSpec {
    pub fn new(n_modes: usize, cutoff: usize) -> Result<Self> {
        Self::with_limit(n_modes, cutoff, DEFAULT_DIMENSION_LIMIT)
    }

    pub fn with_limit(n_modes: usize, cutoff: usize, dim_limit: usize) -> Result<Self> {
        if n_modes == 0 || cutoff == 0 {
            return Err(Error::InvalidArgument("Fock space needs at least one mode and cutoff ≥ 1".into()));
        }
        let dim = (cutoff + 1)
            .checked_pow(n_modes as u32)
            .ok_or(Error::DimensionLimit { dim: usize::MAX, limit: dim_limit })?;
        if dim > dim_limit {
            return Err(Error::DimensionLimit { dim, limit: dim_limit });
        }
        Ok(Self { n_modes, cutoff, dim_limit })
    }

    pub fn n_modes(&self) -> usize {
        self.n_modes
    }

    pub fn cutoff(&self) -> usize {
        self.cutoff
    }

    pub fn dim(&self) -> usize {
        (self.cutoff + 1).pow(self.n_modes as u32)
    }

    pub fn dim_limit(&self) -> usize {
        self.dim_limit
    }

    pub fn probe_depth(&self) -> usize {
        self.cutoff / 4
    }

    pub fn occupations(&self, mut index: usize) -> Vec<usize> {
        let base = self.cutoff + 1;
        let mut occ = vec![0; self.n_modes];
        for slot in occ.iter_mut().rev() {
            *slot = index % base;
            index /= base;
        }
        occ
    }

    pub fn index_of(&self, occupations: &[usize]) -> Option<usize> {
        if occupations.len() != self.n_modes || occupations.iter().any(|&n| n > self.cutoff) {
            return None;
        }
        Some(occupations.iter().fold(0, |acc, &n| acc * (self.cutoff + 1) + n))
    }

    pub fn is_edge(&self, index: usize) -> bool {
        self.occupations(index).contains(&self.cutoff)
    }

    fn probe_indices(&self) -> Vec<usize> {
        let depth = self.probe_depth();
        (0..self.dim()).filter(|&i| self.occupations(i).iter().all(|&n| n <= depth)).collect()
    }

    fn check_modes(&self, found: usize) -> Result<()> {
        if found != self.n_modes {
            return Err(Error::DimensionMismatch { expected: self.n_modes, found });
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FockOperator {
    matrix: Array2<C64>,
    spec: FockSpaceSpec,
}

impl FockOperator {
    pub fn from_matrix(spec: FockSpaceSpec, matrix: Array2<C64>) -> Result<Self> {
        let dim = spec.dim();
        if matrix.nrows() != dim || matrix.ncols() != dim {
            return Err(Error::DimensionMismatch { expected: dim, found: matrix.nrows() });
        }
        Ok(Self { matrix, spec })
    }

    pub fn identity(spec: FockSpaceSpec) -> Self {
        Self { matrix: linalg::identity(spec.dim()), spec }
    }

    pub fn matrix(&self) -> &Array2<C64> {
        &self.matrix
    }

    pub fn spec(&self) -> FockSpaceSpec {
        self.spec
    }

    pub fn dagger(&self) -> Self {
        Self { matrix: linalg::dagger(&self.matrix), spec: self.spec }
    }

    /// Operator product `self · other`.
    pub fn mul(&self, other: &Self) -> Self {
        Self { matrix: self.matrix.dot(&other.matrix), spec: self.spec }
    }

    pub fn add(&self, other: &Self) -> Self {
        Self { matrix: &self.matrix + &other.matrix, spec: self.spec }
    }

    pub fn scaled(&self, factor: C64) -> Self {
        Self { matrix: self.matrix.mapv(|z| z * factor), spec: self.spec }
    }

    pub fn commutator(&self, other: &Self) -> Self {
        Self { matrix: self.matrix.dot(&other.matrix) - other.matrix.dot(&self.matrix), spec: self.spec }
    }

    pub fn apply(&self, v: &FockVector) -> FockVector {
        FockVector::new(self.spec, self.matrix.dot(&v.amplitudes))
    }

    pub fn exp(&self) -> Result<Self> {
        Ok(Self { matrix: linalg::expm(&self.matrix)?, spec: self.spec })
    }

    /// Frobenius norm of `(self − other)` restricted to the probe columns.
    pub fn probe_distance(&self, other: &Self) -> f64 {
        let mut acc = 0.0;
        for j in self.spec.probe_indices() {
            for i in 0..self.spec.dim() {
                acc += (self.matrix[[i, j]] - other.matrix[[i, j]]).norm_sqr();
            }
        }
        acc.sqrt()
    }

    /// `‖U†U − I‖` on the probe columns.
    pub fn unitarity_defect(&self) -> f64 {
        self.dagger().mul(self).probe_distance(&Self::identity(self.spec))
    }

    pub fn hermiticity_defect(&self) -> f64 {
        self.probe_distance(&self.dagger())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FockVector {
    amplitudes: Array1<C64>,
    spec: FockSpaceSpec,
    tail_mass: f64,
}

impl FockVector {
    pub fn new(spec: FockSpaceSpec, amplitudes: Array1<C64>) -> Self {
        let tail_mass =
            amplitudes.iter().enumerate().filter(|(i, _)| spec.is_edge(*i)).map(|(_, z)| z.norm_sqr()).sum();
        Self { amplitudes, spec, tail_mass }
    }

    pub fn vacuum(spec: FockSpaceSpec) -> Self {
        let mut amplitudes = Array1::zeros(spec.dim());
        amplitudes[0] = ONE;
        Self::new(spec, amplitudes)
    }

    pub fn basis(spec: FockSpaceSpec, occupations: &[usize]) -> Result<Self> {
        let index = spec
            .index_of(occupations)
            .ok_or_else(|| Error::InvalidArgument(format!("occupations {occupations:?} outside the space")))?;
        let mut amplitudes = Array1::zeros(spec.dim());
        amplitudes[index] = ONE;
        Ok(Self::new(spec, amplitudes))
    }

    pub fn amplitudes(&self) -> &Array1<C64> {
        &self.amplitudes
    }

    pub fn amplitude(&self, occupations: &[usize]) -> Option<C64> {
        self.spec.index_of(occupations).map(|i| self.amplitudes[i])
    }

    pub fn spec(&self) -> FockSpaceSpec {
        self.spec
    }

    pub fn tail_mass(&self) -> f64 {
        self.tail_mass
    }

    pub fn is_reliable(&self) -> bool {
        self.tail_mass <= TAIL_MASS_LIMIT
    }

    pub fn guarded(self) -> Result<Self> {
        if self.is_reliable() {
            Ok(self)
        } else {
            Err(Error::TruncationGuard { tail_mass: self.tail_mass, limit: TAIL_MASS_LIMIT })
        }
    }

    /// `⟨self|other⟩`
    pub fn inner(&self, other: &Self) -> C64 {
        linalg::vdot(&self.amplitudes, &other.amplitudes)
    }

    pub fn norm(&self) -> f64 {
        linalg::vec_norm(&self.amplitudes)
    }

    pub fn sub(&self, other: &Self) -> Self {
        Self::new(self.spec, &self.amplitudes - &other.amplitudes)
    }

    pub fn scaled(&self, factor: C64) -> Self {
        Self::new(self.spec, self.amplitudes.mapv(|z| z * factor))
    }

    /// Norm over the non-edge components.
    pub fn interior_norm(&self) -> f64 {
        self.amplitudes
            .iter()
            .enumerate()
            .filter(|(i, _)| !self.spec.is_edge(*i))
            .map(|(_, z)| z.norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    /// Normalized component orthogonal to the vacuum, `|ψ_⊥⟩`.
    pub fn orthogonal_to_vacuum(&self) -> Result<Self> {
        let mut amplitudes = self.amplitudes.clone();
        amplitudes[0] = ZERO;
        let n = linalg::vec_norm(&amplitudes);
        if n == 0.0 {
            return Err(Error::ZeroNorm("perp state"));
        }
        Ok(Self::new(self.spec, amplitudes.mapv(|z| z / n)))
    }
}

/// Annihilation operators `a_j`, one per mode.
pub fn mode_operators(spec: FockSpaceSpec) -> Result<Vec<FockOperator>> {
    let dim = spec.dim();
    let mut ops = Vec::with_capacity(spec.n_modes);
    for mode in 0..spec.n_modes {
        let mut m = Array2::zeros((dim, dim));
        for col in 0..dim {
            let mut occ = spec.occupations(col);
            let n = occ[mode];
            if n == 0 {
                continue;
            }
            occ[mode] = n - 1;
            let row = spec.index_of(&occ).expect("lowered occupation is in range");
            m[[row, col]] = C64::from((n as f64).sqrt());
        }
        ops.push(FockOperator { matrix: m, spec });
    }
    Ok(ops)
}

/// `U(ψ) = exp(ψ·a† − ψ*·a)`, guarded on the tail mass of `U(ψ)|0⟩`.
pub fn displacement(spec: FockSpaceSpec, v: &PhaseVector) -> Result<FockOperator> {
    let u = displacement_unguarded(spec, v)?;
    u.apply(&FockVector::vacuum(spec)).guarded()?;
    Ok(u)
}

fn displacement_unguarded(spec: FockSpaceSpec, v: &PhaseVector) -> Result<FockOperator> {
    spec.check_modes(v.dim())?;
    let ops = mode_operators(spec)?;
    let mut exponent = Array2::<C64>::zeros((spec.dim(), spec.dim()));
    for (a, &psi) in ops.iter().zip(v.components().iter()) {
        let a_dag = linalg::dagger(&a.matrix);
        exponent.scaled_add(psi, &a_dag);
        exponent.scaled_add(-psi.conj(), &a.matrix);
    }
    FockOperator { matrix: exponent, spec }.exp()
}

/// `|ψ⟩ = U(ψ)|0⟩`
pub fn state_from_instructions(spec: FockSpaceSpec, v: &PhaseVector) -> Result<FockVector> {
    displacement_unguarded(spec, v)?.apply(&FockVector::vacuum(spec)).guarded()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WeylDiagnostics {
    pub theta: f64,
    /// `‖U(a+b) − e^{iθ}U(a)U(b)‖` on the probe columns.
    pub residual_positive: f64,
    /// Same with `e^{−iθ}`.
    pub residual_negative: f64,
}

impl WeylDiagnostics {
    pub fn realized_sign(&self) -> f64 {
        if self.residual_positive <= self.residual_negative {
            1.0
        } else {
            -1.0
        }
    }

    pub fn best_residual(&self) -> f64 {
        self.residual_positive.min(self.residual_negative)
    }
}

pub fn weyl_relation_check(spec: FockSpaceSpec, a: &PhaseVector, b: &PhaseVector) -> Result<WeylDiagnostics> {
    let theta = weyl_phase(a, b)?;
    let ua = displacement(spec, a)?;
    let ub = displacement(spec, b)?;
    let uab = displacement(spec, &(a + b))?;
    let product = ua.mul(&ub);
    let residual = |sign: f64| uab.probe_distance(&product.scaled(C64::from_polar(1.0, sign * theta)));
    Ok(WeylDiagnostics { theta, residual_positive: residual(1.0), residual_negative: residual(-1.0) })
}

/// `:Γ(a, a†): = Σ a_j† H_jk a_k + Σ W_jk a_j† a_k† + Σ W*_jk a_j a_k`
pub fn normal_ordered_generator(spec: FockSpaceSpec, g: &QuadraticGenerator) -> Result<FockOperator> {
    spec.check_modes(g.dim())?;
    let ops = mode_operators(spec)?;
    let daggers: Vec<Array2<C64>> = ops.iter().map(|a| linalg::dagger(&a.matrix)).collect();
    let (h, w) = (g.hermitian_part(), g.squeeze_part());
    let n = spec.dim();
    let mut total = Array2::<C64>::zeros((n, n));
    for j in 0..spec.n_modes {
        for k in 0..spec.n_modes {
            if h[[j, k]] != ZERO {
                total.scaled_add(h[[j, k]], &daggers[j].dot(&ops[k].matrix));
            }
            if w[[j, k]] != ZERO {
                total.scaled_add(w[[j, k]], &daggers[j].dot(&daggers[k]));
                total.scaled_add(w[[j, k]].conj(), &ops[j].matrix.dot(&ops[k].matrix));
            }
        }
    }
    Ok(FockOperator { matrix: total, spec })
}

/// `V_t = exp(−it :Γ:)`
pub fn metaplectic_unitary(spec: FockSpaceSpec, g: &QuadraticGenerator, t: f64) -> Result<FockOperator> {
    if !t.is_finite() {
        return Err(Error::NonFinite("time"));
    }
    normal_ordered_generator(spec, g)?.scaled(C64::new(0.0, -t)).exp()
}

/// Largest probe-column residual of `V_t† a_j V_t − Σ_k (A_jk a_k + B_jk a_k†)`
/// with `(A, B)` the blocks of `flow(g, t)`.
///
/// With `V_t = exp(−it:Γ:)` the flow blocks appear in the Heisenberg-picture
/// conjugation `V_t† a V_t`; `V_t a V_t†` carries the blocks of `flow(g, −t)`.
pub fn bogoliubov_residual(spec: FockSpaceSpec, g: &QuadraticGenerator, t: f64) -> Result<f64> {
    let v = metaplectic_unitary(spec, g, t)?;
    let m = flow(g, t)?;
    bogoliubov_residual_with(spec, &v, &m)
}

fn bogoliubov_residual_with(spec: FockSpaceSpec, v: &FockOperator, m: &LinearCanonicalMap) -> Result<f64> {
    let ops = mode_operators(spec)?;
    let v_dag = v.dagger();
    let mut worst = 0.0_f64;
    for j in 0..spec.n_modes {
        let conjugated = v_dag.mul(&ops[j]).mul(v);
        let mut expected = Array2::<C64>::zeros((spec.dim(), spec.dim()));
        for (k, a_k) in ops.iter().enumerate() {
            expected.scaled_add(m.block_a()[[j, k]], &a_k.matrix);
            expected.scaled_add(m.block_b()[[j, k]], &linalg::dagger(&a_k.matrix));
        }
        let expected = FockOperator { matrix: expected, spec };
        worst = worst.max(conjugated.probe_distance(&expected));
    }
    Ok(worst)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConjugationDiagnostics {
    /// `min_φ ‖U(M_tψ)|0⟩ − e^{iφ} V_t U(ψ) V_t†|0⟩‖`
    pub residual: f64,
    /// The minimizing global phase `φ`.
    pub global_phase: f64,
    /// Largest tail mass among the two compared states.
    pub tail_mass: f64,
}

/// Compares `U(M_tψ)|0⟩` against `V_t U(ψ) V_t†|0⟩`, up to a global phase.
pub fn conjugation_check(
    spec: FockSpaceSpec,
    g: &QuadraticGenerator,
    t: f64,
    v: &PhaseVector,
) -> Result<ConjugationDiagnostics> {
    let m = flow(g, t)?;
    let lhs = state_from_instructions(spec, &m.apply(v)?)?;
    let vt = metaplectic_unitary(spec, g, t)?;
    let u = displacement(spec, v)?;
    let rhs = vt.apply(&u.apply(&vt.dagger().apply(&FockVector::vacuum(spec)))).guarded()?;

    let overlap = rhs.inner(&lhs);
    let phase = if overlap.norm() > 0.0 { overlap / overlap.norm() } else { ONE };
    let residual = lhs.sub(&rhs.scaled(phase)).norm();
    Ok(ConjugationDiagnostics { residual, global_phase: phase.arg(), tail_mass: lhs.tail_mass().max(rhs.tail_mass()) })
}

#[derive(Debug, Clone, PartialEq)]
pub struct NumberStatistics {
    pub mode_n: Vec<f64>,
    pub mode_n2: Vec<f64>,
    pub total_n: f64,
    pub total_n2: f64,
}

impl NumberStatistics {
    pub fn mode_variance(&self, k: usize) -> f64 {
        self.mode_n2[k] - self.mode_n[k] * self.mode_n[k]
    }
}

/// `⟨N_j⟩`, `⟨N_j²⟩`, `⟨N⟩`, `⟨N²⟩` as quadratic forms of the normalized state.
pub fn number_statistics(state: &FockVector) -> Result<NumberStatistics> {
    let state = state.clone().guarded()?;
    let spec = state.spec;
    let norm_sq = state.inner(&state).re;
    if norm_sq == 0.0 {
        return Err(Error::ZeroNorm("number statistics"));
    }
    let ops = mode_operators(spec)?;
    let mut total = Array2::<C64>::zeros((spec.dim(), spec.dim()));
    let mut mode_n = Vec::with_capacity(spec.n_modes);
    let mut mode_n2 = Vec::with_capacity(spec.n_modes);
    for a in &ops {
        let number = linalg::dagger(&a.matrix).dot(&a.matrix);
        let applied = number.dot(&state.amplitudes);
        mode_n.push(linalg::vdot(&state.amplitudes, &applied).re / norm_sq);
        mode_n2.push(linalg::vdot(&applied, &applied).re / norm_sq);
        total = total + number;
    }
    let applied = total.dot(&state.amplitudes);
    let total_n = linalg::vdot(&state.amplitudes, &applied).re / norm_sq;
    let total_n2 = linalg::vdot(&applied, &applied).re / norm_sq;
    Ok(NumberStatistics { mode_n, mode_n2, total_n, total_n2 })
}

/// Largest interior norm of `a_j|ψ⟩ − ψ_j|ψ⟩` over the modes.
pub fn eigenvalue_residual(spec: FockSpaceSpec, v: &PhaseVector) -> Result<f64> {
    let state = state_from_instructions(spec, v)?;
    let ops = mode_operators(spec)?;
    Ok(ops
        .iter()
        .zip(v.components().iter())
        .map(|(a, &psi)| a.apply(&state).sub(&state.scaled(psi)).interior_norm())
        .fold(0.0, f64::max))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FactorizationDiagnostics {
    /// `‖U(ψ) − Π_j U(ψ^j)‖` on the probe columns, blocks in the given order.
    pub product_residual: f64,
    /// Same with the product order reversed.
    pub reversed_residual: f64,
    /// Largest `‖[U(ψ^i), U(ψ^j)]|0⟩‖` over block pairs.
    pub commutator_residual: f64,
}

pub fn factorization_check(
    spec: FockSpaceSpec,
    v: &PhaseVector,
    partition: &[Vec<usize>],
) -> Result<FactorizationDiagnostics> {
    spec.check_modes(v.dim())?;
    let mut seen = vec![false; v.dim()];
    for &j in partition.iter().flatten() {
        if j >= v.dim() {
            return Err(Error::InvalidArgument(format!("partition index {j} out of range")));
        }
        if std::mem::replace(&mut seen[j], true) {
            return Err(Error::InvalidArgument(format!("partition blocks overlap at index {j}")));
        }
    }
    if let Some(j) = seen.iter().position(|s| !s) {
        return Err(Error::InvalidArgument(format!("partition misses index {j}")));
    }

    let full = displacement(spec, v)?;
    let mut factors = Vec::with_capacity(partition.len());
    for block in partition {
        let mut c = Array1::zeros(v.dim());
        for &j in block {
            c[j] = v.get(j);
        }
        factors.push(displacement(spec, &PhaseVector::from_array(c)?)?);
    }
    let identity = FockOperator::identity(spec);
    let forward = factors.iter().fold(identity.clone(), |acc, f| acc.mul(f));
    let reversed = factors.iter().rev().fold(identity, |acc, f| acc.mul(f));

    let vacuum = FockVector::vacuum(spec);
    let mut commutator_residual = 0.0_f64;
    for i in 0..factors.len() {
        for j in (i + 1)..factors.len() {
            let c = factors[i].commutator(&factors[j]).apply(&vacuum).norm();
            commutator_residual = commutator_residual.max(c);
        }
    }
    Ok(FactorizationDiagnostics {
        product_residual: full.probe_distance(&forward),
        reversed_residual: full.probe_distance(&reversed),
        commutator_residual,
    })
}

/// Central-difference residual `‖∂_t|ψ_t⟩ + i𝓗|ψ_t⟩‖` for a unitary-type
/// generator, with `|ψ_t⟩ = U(M_tψ)|0⟩`.
pub fn schrodinger_residual(
    spec: FockSpaceSpec,
    g: &QuadraticGenerator,
    v: &PhaseVector,
    t: f64,
    dt: f64,
) -> Result<f64> {
    if !g.is_unitary_type() {
        return Err(Error::InvalidArgument("Schrödinger residual needs a generator with W = 0".into()));
    }
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(Error::InvalidArgument(format!("dt must be positive, got {dt}")));
    }
    let state_at = |s: f64| -> Result<FockVector> { state_from_instructions(spec, &flow(g, s)?.apply(v)?) };
    let ahead = state_at(t + dt)?;
    let behind = state_at(t - dt)?;
    let here = state_at(t)?;
    let hamiltonian = normal_ordered_generator(spec, g)?;
    let derivative = (&ahead.amplitudes - &behind.amplitudes).mapv(|z| z / (2.0 * dt));
    let drive = hamiltonian.matrix.dot(&here.amplitudes).mapv(|z| z * linalg::I);
    Ok(linalg::vec_norm(&(derivative + drive)))
}
