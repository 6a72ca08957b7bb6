//! Complex phase space, quadratic generators and the linear canonical
//! (metaplectic) flows they generate.
//!
//! A point is `ψ ∈ ℂⁿ` with `ψ_j = (p_j + i q_j)/√2`. A quadratic generator
//!
//! ```text
//! Γ(ψ*, ψ) = ψ*·H·ψ + ψ*·W·ψ* + ψ·W*·ψ
//! ```
//!
//! drives `dψ/dt = −i ∂Γ/∂ψ* = −i (Hψ + 2Wψ*)`. On the doubled coordinate
//! `ξ = (ψ₁..ψₙ, ψ₁*..ψₙ*)` this is `dξ/dt = −i G ξ` with
//!
//! ```text
//!     ⎡  H     2W  ⎤
//! G = ⎣ −2W*  −H*  ⎦
//! ```
//!
//! and the time-`t` map is `exp(−itG)`, whose upper blocks `(A, B)` act as
//! `ψ ↦ Aψ + Bψ*`.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use ndarray::{s, Array1, Array2};
use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::linalg::{self, I, ONE, ZERO};

/// Relative asymmetry above which generator matrices are rejected.
pub const SYMMETRY_TOLERANCE: f64 = 1e-12;

/// Absolute tolerance on the canonical block relations for checked maps.
pub const CANONICAL_TOLERANCE: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub struct PhaseVector {
    components: Array1<C64>,
}

impl PhaseVector {
    pub fn new(components: impl Into<Vec<C64>>) -> Result<Self> {
        Self::from_array(Array1::from(components.into()))
    }

    pub fn from_array(components: Array1<C64>) -> Result<Self> {
        if components.iter().any(|z| !(z.re.is_finite() && z.im.is_finite())) {
            return Err(Error::NonFinite("phase vector"));
        }
        Ok(Self { components })
    }

    pub fn zeros(dim: usize) -> Self {
        Self { components: Array1::zeros(dim) }
    }

    /// Builds `ψ_j = (p_j + i q_j)/√2` from canonical momenta and positions.
    pub fn from_canonical(momenta: &[f64], positions: &[f64]) -> Result<Self> {
        if momenta.len() != positions.len() {
            return Err(Error::DimensionMismatch { expected: momenta.len(), found: positions.len() });
        }
        let c: Vec<C64> =
            momenta.iter().zip(positions).map(|(&p, &q)| C64::new(p, q) / std::f64::consts::SQRT_2).collect();
        Self::new(c)
    }

    pub fn momenta(&self) -> Vec<f64> {
        self.components.iter().map(|z| z.re * std::f64::consts::SQRT_2).collect()
    }

    pub fn positions(&self) -> Vec<f64> {
        self.components.iter().map(|z| z.im * std::f64::consts::SQRT_2).collect()
    }

    pub fn dim(&self) -> usize {
        self.components.len()
    }

    pub fn components(&self) -> &Array1<C64> {
        &self.components
    }

    pub fn to_vec(&self) -> Vec<C64> {
        self.components.to_vec()
    }

    pub fn get(&self, j: usize) -> C64 {
        self.components[j]
    }

    pub fn norm_sqr(&self) -> f64 {
        self.components.iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    /// `ψ̂ = ψ/|ψ|`
    pub fn unit(&self) -> Result<Self> {
        let n = self.norm();
        if n == 0.0 {
            return Err(Error::ZeroNorm("unit vector"));
        }
        Ok(Self { components: self.components.mapv(|z| z / n) })
    }

    pub fn conj(&self) -> Self {
        Self { components: self.components.mapv(|z| z.conj()) }
    }

    pub fn scaled(&self, factor: C64) -> Self {
        Self { components: self.components.mapv(|z| z * factor) }
    }

    /// Hermitian scalar product `self*·other`.
    pub fn dot(&self, other: &Self) -> Result<C64> {
        self.check_dim(other)?;
        Ok(linalg::vdot(&self.components, &other.components))
    }

    /// Concatenation `(self, other)`.
    pub fn concat(&self, other: &Self) -> Self {
        let mut c = self.to_vec();
        c.extend(other.components.iter());
        Self { components: Array1::from(c) }
    }

    pub fn split_at(&self, mid: usize) -> (Self, Self) {
        let (a, b) = self.components.view().split_at(ndarray::Axis(0), mid);
        (Self { components: a.to_owned() }, Self { components: b.to_owned() })
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.components.iter().zip(other.components.iter()).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max)
    }

    pub(crate) fn check_dim(&self, other: &Self) -> Result<()> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), found: other.dim() });
        }
        Ok(())
    }
}

impl fmt::Display for PhaseVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (j, z) in self.components.iter().enumerate() {
            if j > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{z}")?;
        }
        write!(f, ")")
    }
}

// Arithmetic panics on dimension mismatch, like ndarray's own operators.
impl Add for &PhaseVector {
    type Output = PhaseVector;
    fn add(self, rhs: &PhaseVector) -> PhaseVector {
        assert_eq!(self.dim(), rhs.dim(), "phase vector dimensions differ");
        PhaseVector { components: &self.components + &rhs.components }
    }
}

impl Sub for &PhaseVector {
    type Output = PhaseVector;
    fn sub(self, rhs: &PhaseVector) -> PhaseVector {
        assert_eq!(self.dim(), rhs.dim(), "phase vector dimensions differ");
        PhaseVector { components: &self.components - &rhs.components }
    }
}

impl Neg for &PhaseVector {
    type Output = PhaseVector;
    fn neg(self) -> PhaseVector {
        PhaseVector { components: self.components.mapv(|z| -z) }
    }
}

impl Mul<f64> for &PhaseVector {
    type Output = PhaseVector;
    fn mul(self, rhs: f64) -> PhaseVector {
        self.scaled(C64::from(rhs))
    }
}

/// The pair `(H, W)` of a quadratic generator.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadraticGenerator {
    hermitian: Array2<C64>,
    squeeze: Array2<C64>,
}

impl QuadraticGenerator {
    /// Symmetrizes `H` toward `H†` and `W` toward `Wᵀ`, rejecting inputs whose
    /// relative asymmetry exceeds [`SYMMETRY_TOLERANCE`].
    pub fn new(hermitian: Array2<C64>, squeeze: Array2<C64>) -> Result<Self> {
        let n = hermitian.nrows();
        for m in [&hermitian, &squeeze] {
            if m.nrows() != n {
                return Err(Error::DimensionMismatch { expected: n, found: m.nrows() });
            }
            if m.ncols() != n {
                return Err(Error::DimensionMismatch { expected: n, found: m.ncols() });
            }
            if !linalg::all_finite(m) {
                return Err(Error::NonFinite("generator"));
            }
        }
        let h_adj = linalg::dagger(&hermitian);
        let w_t = squeeze.t().to_owned();
        check_symmetric("hermitian part", &hermitian, &h_adj)?;
        check_symmetric("squeeze part", &squeeze, &w_t)?;
        Ok(Self { hermitian: (&hermitian + &h_adj).mapv(|z| z * 0.5), squeeze: (&squeeze + &w_t).mapv(|z| z * 0.5) })
    }

    pub fn zero(dim: usize) -> Self {
        Self { hermitian: Array2::zeros((dim, dim)), squeeze: Array2::zeros((dim, dim)) }
    }

    /// Generator of the unitary subgroup (`W = 0`).
    pub fn hamiltonian(h: Array2<C64>) -> Result<Self> {
        let n = h.nrows();
        Self::new(h, Array2::zeros((n, n)))
    }

    pub fn squeezing(w: Array2<C64>) -> Result<Self> {
        let n = w.nrows();
        Self::new(Array2::zeros((n, n)), w)
    }

    /// Object–device amplification coupling on `(λ₁..λₙ, μ₁..μₙ)`.
    ///
    /// Each pair `(λ_j, μ_j)` is coupled by `W_{j,n+j} = W_{n+j,j} = iη_j/2`,
    /// whose flow is
    ///
    /// ```text
    /// λ_t = λ cosh(|η|t) + μ* e^{i arg η} sinh(|η|t)
    /// μ_t = μ cosh(|η|t) + λ* e^{i arg η} sinh(|η|t)
    /// ```
    pub fn pair_coupling(couplings: &[C64]) -> Result<Self> {
        let n = couplings.len();
        if couplings.iter().any(|z| !(z.re.is_finite() && z.im.is_finite())) {
            return Err(Error::NonFinite("couplings"));
        }
        let mut w = Array2::zeros((2 * n, 2 * n));
        for (j, &eta) in couplings.iter().enumerate() {
            w[[j, n + j]] = I * eta * 0.5;
            w[[n + j, j]] = I * eta * 0.5;
        }
        Self::squeezing(w)
    }

    pub fn dim(&self) -> usize {
        self.hermitian.nrows()
    }

    pub fn hermitian_part(&self) -> &Array2<C64> {
        &self.hermitian
    }

    pub fn squeeze_part(&self) -> &Array2<C64> {
        &self.squeeze
    }

    pub fn is_unitary_type(&self) -> bool {
        self.squeeze.iter().all(|z| *z == ZERO)
    }

    pub fn scaled(&self, factor: f64) -> Self {
        Self { hermitian: self.hermitian.mapv(|z| z * factor), squeeze: self.squeeze.mapv(|z| z * factor) }
    }

    /// Value of `Γ(ψ*, ψ)`; real for every `ψ`.
    pub fn evaluate(&self, v: &PhaseVector) -> Result<f64> {
        if v.dim() != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), found: v.dim() });
        }
        let psi = v.components();
        let psi_c = psi.mapv(|z| z.conj());
        let h_term = linalg::vdot(psi, &self.hermitian.dot(psi));
        let w_term = psi_c.dot(&self.squeeze.dot(&psi_c));
        Ok(h_term.re + 2.0 * w_term.re)
    }
}

fn check_symmetric(what: &'static str, m: &Array2<C64>, mirrored: &Array2<C64>) -> Result<()> {
    let scale = linalg::max_abs(m.view());
    if scale == 0.0 {
        return Ok(());
    }
    let deviation = linalg::max_abs_diff(m.view(), mirrored.view()) / scale;
    if deviation > SYMMETRY_TOLERANCE {
        return Err(Error::Asymmetric { what, deviation });
    }
    Ok(())
}

/// Bogoliubov block pair acting as `ψ ↦ Aψ + Bψ*`.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearCanonicalMap {
    a: Array2<C64>,
    b: Array2<C64>,
}

impl LinearCanonicalMap {
    /// Checked constructor: both block relations must hold within
    /// [`CANONICAL_TOLERANCE`].
    pub fn new(a: Array2<C64>, b: Array2<C64>) -> Result<Self> {
        let map = Self::from_blocks_unchecked(a, b)?;
        let diag = verify_symplectic(&map);
        let deviation = diag.unitarity.max(diag.symmetry);
        if deviation > CANONICAL_TOLERANCE {
            return Err(Error::NotCanonical { deviation });
        }
        Ok(map)
    }

    /// Only shapes are validated; use [`verify_symplectic`] to inspect the rest.
    pub fn from_blocks_unchecked(a: Array2<C64>, b: Array2<C64>) -> Result<Self> {
        let n = a.nrows();
        for m in [&a, &b] {
            if m.nrows() != n || m.ncols() != n {
                return Err(Error::DimensionMismatch { expected: n, found: m.ncols().max(m.nrows()) });
            }
        }
        Ok(Self { a, b })
    }

    pub fn identity(dim: usize) -> Self {
        Self { a: linalg::identity(dim), b: Array2::zeros((dim, dim)) }
    }

    pub fn dim(&self) -> usize {
        self.a.nrows()
    }

    pub fn block_a(&self) -> &Array2<C64> {
        &self.a
    }

    pub fn block_b(&self) -> &Array2<C64> {
        &self.b
    }

    /// Matrix on the doubled coordinate `(ψ, ψ*)`.
    pub fn doubled(&self) -> Array2<C64> {
        let n = self.dim();
        let mut d = Array2::zeros((2 * n, 2 * n));
        d.slice_mut(s![..n, ..n]).assign(&self.a);
        d.slice_mut(s![..n, n..]).assign(&self.b);
        d.slice_mut(s![n.., ..n]).assign(&linalg::conj(&self.b));
        d.slice_mut(s![n.., n..]).assign(&linalg::conj(&self.a));
        d
    }

    pub fn apply(&self, v: &PhaseVector) -> Result<PhaseVector> {
        if v.dim() != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), found: v.dim() });
        }
        let psi = v.components();
        let out = self.a.dot(psi) + self.b.dot(&psi.mapv(|z| z.conj()));
        PhaseVector::from_array(out)
    }

    /// `self ∘ other`, i.e. apply `other` first.
    pub fn compose(&self, other: &Self) -> Result<Self> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), found: other.dim() });
        }
        let a = self.a.dot(&other.a) + self.b.dot(&linalg::conj(&other.b));
        let b = self.a.dot(&other.b) + self.b.dot(&linalg::conj(&other.a));
        Ok(Self { a, b })
    }

    /// Inverse of a canonical map: `(A†, −Bᵀ)`.
    pub fn inverse(&self) -> Self {
        Self { a: linalg::dagger(&self.a), b: self.b.t().mapv(|z| -z) }
    }

    /// Largest entrywise block difference.
    pub fn max_block_diff(&self, other: &Self) -> f64 {
        linalg::max_abs_diff(self.a.view(), other.a.view()).max(linalg::max_abs_diff(self.b.view(), other.b.view()))
    }
}

/// Doubled `2n×2n` matrix `G` with `dξ/dt = −iGξ` on `ξ = (ψ, ψ*)`.
pub fn adjoint_generator(g: &QuadraticGenerator) -> Array2<C64> {
    let n = g.dim();
    let h = g.hermitian_part();
    let w2 = g.squeeze_part().mapv(|z| z * 2.0);
    let mut big = Array2::zeros((2 * n, 2 * n));
    big.slice_mut(s![..n, ..n]).assign(h);
    big.slice_mut(s![..n, n..]).assign(&w2);
    big.slice_mut(s![n.., ..n]).assign(&w2.mapv(|z| -z.conj()));
    big.slice_mut(s![n.., n..]).assign(&h.mapv(|z| -z.conj()));
    big
}

/// Time-`t` map of the flow generated by `g`.
pub fn flow(g: &QuadraticGenerator, t: f64) -> Result<LinearCanonicalMap> {
    if !t.is_finite() {
        return Err(Error::NonFinite("flow time"));
    }
    let n = g.dim();
    let exponent = adjoint_generator(g).mapv(|z| z * C64::new(0.0, -t));
    let e = linalg::expm(&exponent)?;
    LinearCanonicalMap::from_blocks_unchecked(e.slice(s![..n, ..n]).to_owned(), e.slice(s![..n, n..]).to_owned())
}

pub fn apply(m: &LinearCanonicalMap, v: &PhaseVector) -> Result<PhaseVector> {
    m.apply(v)
}

/// Classical RK4 integration of `dξ/dt = −iGξ`; independent of [`flow`].
pub fn ode_flow(g: &QuadraticGenerator, v: &PhaseVector, t: f64, steps: usize) -> Result<PhaseVector> {
    if steps == 0 {
        return Err(Error::InvalidArgument("ode_flow needs at least one step".into()));
    }
    if !t.is_finite() {
        return Err(Error::NonFinite("flow time"));
    }
    let n = g.dim();
    if v.dim() != n {
        return Err(Error::DimensionMismatch { expected: n, found: v.dim() });
    }
    let rhs = adjoint_generator(g).mapv(|z| z * C64::new(0.0, -1.0));
    let mut xi = Array1::zeros(2 * n);
    xi.slice_mut(s![..n]).assign(v.components());
    xi.slice_mut(s![n..]).assign(&v.components().mapv(|z| z.conj()));

    let h = t / steps as f64;
    for _ in 0..steps {
        let k1 = rhs.dot(&xi);
        let k2 = rhs.dot(&(&xi + &k1.mapv(|z| z * (h / 2.0))));
        let k3 = rhs.dot(&(&xi + &k2.mapv(|z| z * (h / 2.0))));
        let k4 = rhs.dot(&(&xi + &k3.mapv(|z| z * h)));
        xi = xi + (k1 + k2.mapv(|z| z * 2.0) + k3.mapv(|z| z * 2.0) + k4).mapv(|z| z * (h / 6.0));
    }
    PhaseVector::from_array(xi.slice(s![..n]).to_owned())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SymplecticDiagnostics {
    /// `max |A A† − B B† − I|`
    pub unitarity: f64,
    /// `max |A Bᵀ − B Aᵀ|`
    pub symmetry: f64,
    /// Largest change of `Im(φ*·ψ)` over the probe pairs.
    pub phase: f64,
}

impl SymplecticDiagnostics {
    pub fn max(&self) -> f64 {
        self.unitarity.max(self.symmetry).max(self.phase)
    }
}

pub fn verify_symplectic(m: &LinearCanonicalMap) -> SymplecticDiagnostics {
    let n = m.dim();
    let (a, b) = (&m.a, &m.b);
    let gram = a.dot(&linalg::dagger(a)) - b.dot(&linalg::dagger(b));
    let unitarity = linalg::max_abs_diff(gram.view(), linalg::identity(n).view());
    let skew = a.dot(&b.t()) - b.dot(&a.t());
    let symmetry = linalg::max_abs(skew.view());

    let probes = probe_vectors(n);
    let images: Vec<PhaseVector> = probes.iter().map(|p| m.apply(p).expect("probe dimension")).collect();
    let mut phase = 0.0_f64;
    for i in 0..probes.len() {
        for j in 0..probes.len() {
            let before = linalg::vdot(probes[i].components(), probes[j].components()).im;
            let after = linalg::vdot(images[i].components(), images[j].components()).im;
            phase = phase.max((after - before).abs());
        }
    }
    SymplecticDiagnostics { unitarity, symmetry, phase }
}

/// Deterministic probes: `e_j`, `i e_j` and three dense vectors.
fn probe_vectors(n: usize) -> Vec<PhaseVector> {
    let mut out = Vec::with_capacity(2 * n + 3);
    for j in 0..n {
        for unit in [ONE, I] {
            let mut c = Array1::zeros(n);
            c[j] = unit;
            out.push(PhaseVector { components: c });
        }
    }
    for seed in 1..=3 {
        let c = Array1::from_shape_fn(n, |k| {
            let x = (k + 1) as f64 * seed as f64;
            C64::new((0.7 * x).cos(), (1.3 * x + 0.4).sin())
        });
        out.push(PhaseVector { components: c });
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;
    use std::f64::consts::{LN_2, PI};

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn pv(v: &[C64]) -> PhaseVector {
        PhaseVector::new(v.to_vec()).unwrap()
    }

    #[test]
    fn canonical_coordinates_round_trip() {
        let v = PhaseVector::from_canonical(&[1.0, -2.0], &[0.5, 3.0]).unwrap();
        assert!((v.get(0) - c(1.0, 0.5) / 2f64.sqrt()).norm() < 1e-15);
        assert_eq!(v.momenta().len(), 2);
        assert!((v.positions()[1] - 3.0).abs() < 1e-14);
        assert!((v.momenta()[1] + 2.0).abs() < 1e-14);
    }

    #[test]
    fn rejects_non_finite_components() {
        assert!(PhaseVector::new(vec![c(f64::NAN, 0.0)]).is_err());
    }

    #[test]
    fn unit_vector_of_zero_is_rejected() {
        assert!(matches!(PhaseVector::zeros(3).unit(), Err(Error::ZeroNorm(_))));
        let u = pv(&[c(3.0, 0.0), c(0.0, 4.0)]).unit().unwrap();
        assert!((u.norm() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn generator_symmetrizes_and_rejects() {
        let h = array![[c(1.0, 0.0), c(0.0, 1.0)], [c(0.0, -1.0), c(2.0, 0.0)]];
        let g = QuadraticGenerator::hamiltonian(h).unwrap();
        assert_eq!(g.hermitian_part()[[0, 1]], c(0.0, 1.0));

        let bad = array![[c(1.0, 0.0), c(0.0, 1.0)], [c(0.0, 1.0), c(2.0, 0.0)]];
        assert!(matches!(QuadraticGenerator::hamiltonian(bad), Err(Error::Asymmetric { .. })));

        let w_bad = array![[ZERO, c(1.0, 0.0)], [c(1.0 + 1e-9, 0.0), ZERO]];
        assert!(QuadraticGenerator::squeezing(w_bad).is_err());
        let w_ok = array![[ZERO, c(1.0, 0.0)], [c(1.0 + 1e-14, 0.0), ZERO]];
        let g = QuadraticGenerator::squeezing(w_ok).unwrap();
        assert_eq!(g.squeeze_part()[[0, 1]], g.squeeze_part()[[1, 0]]);
    }

    #[test]
    fn generator_value_is_real_quadratic_form() {
        // Γ = |λ|² + 2 Re(i η λ* μ*) for H = diag(1, 0) plus the pair coupling.
        let eta = c(0.3, -0.8);
        let mut g = QuadraticGenerator::pair_coupling(&[eta]).unwrap();
        g.hermitian[[0, 0]] = ONE;
        let v = pv(&[c(0.2, 0.7), c(-1.1, 0.4)]);
        let (l, m) = (v.get(0), v.get(1));
        let want = l.norm_sqr() + 2.0 * (I * eta * l.conj() * m.conj()).re;
        assert!((g.evaluate(&v).unwrap() - want).abs() < 1e-14);
    }

    #[test]
    fn zero_generator_has_zero_adjoint() {
        let g = QuadraticGenerator::zero(3);
        assert!(adjoint_generator(&g).iter().all(|z| *z == ZERO));
    }

    #[test]
    fn flow_at_zero_is_identity() {
        let g = QuadraticGenerator::pair_coupling(&[c(0.4, 1.2)]).unwrap();
        let m = flow(&g, 0.0).unwrap();
        assert_eq!(m, LinearCanonicalMap::identity(2));
    }

    #[test]
    fn scalar_hamiltonian_flow_is_phase_rotation() {
        let g = QuadraticGenerator::hamiltonian(array![[ONE]]).unwrap();
        let m = flow(&g, PI).unwrap();
        assert!((m.block_a()[[0, 0]] - c(-1.0, 0.0)).norm() < 1e-14);
        assert_eq!(m.block_b()[[0, 0]], ZERO);

        let t = 0.37;
        let m = flow(&g, t).unwrap();
        assert!((m.block_a()[[0, 0]] - c(0.0, -t).exp()).norm() < 1e-15);
    }

    #[test]
    fn pair_coupling_reproduces_hyperbolic_orbit() {
        let g = QuadraticGenerator::pair_coupling(&[ONE]).unwrap();
        let m = flow(&g, LN_2).unwrap();
        let out = m.apply(&pv(&[ONE, ZERO])).unwrap();
        assert!((out.get(0) - c(1.25, 0.0)).norm() < 1e-14);
        assert!((out.get(1) - c(0.75, 0.0)).norm() < 1e-14);

        // RK4 oracle on the same generator.
        let rk = ode_flow(&g, &pv(&[ONE, ZERO]), LN_2, 2000).unwrap();
        assert!(rk.max_abs_diff(&out) < 1e-10);
    }

    #[test]
    fn pair_coupling_phase_follows_coupling_argument() {
        let eta = C64::from_polar(0.8, 1.1);
        let (lambda, mu) = (c(0.3, -0.2), c(-0.5, 0.9));
        let t = 0.9;
        let g = QuadraticGenerator::pair_coupling(&[eta]).unwrap();
        let out = flow(&g, t).unwrap().apply(&pv(&[lambda, mu])).unwrap();
        let phase = C64::from_polar(1.0, eta.arg());
        let (ch, sh) = ((eta.norm() * t).cosh(), (eta.norm() * t).sinh());
        assert!((out.get(0) - (lambda * ch + mu.conj() * phase * sh)).norm() < 1e-13);
        assert!((out.get(1) - (mu * ch + lambda.conj() * phase * sh)).norm() < 1e-13);
    }

    #[test]
    fn ode_flow_cases() {
        let g = QuadraticGenerator::hamiltonian(array![[ONE]]).unwrap();
        let v = pv(&[ONE]);
        assert_eq!(ode_flow(&g, &v, 0.0, 5).unwrap(), v);
        let r = ode_flow(&g, &v, PI / 2.0, 1000).unwrap();
        assert!((r.get(0) - c(0.0, -1.0)).norm() < 1e-8);

        let coupling = QuadraticGenerator::pair_coupling(&[ONE]).unwrap();
        let r = ode_flow(&coupling, &pv(&[ONE, ZERO]), 1.0, 1000).unwrap();
        assert!((r.get(0) - C64::from(1f64.cosh())).norm() < 1e-8);
        assert!((r.get(1) - C64::from(1f64.sinh())).norm() < 1e-8);

        assert!(matches!(ode_flow(&g, &v, 1.0, 0), Err(Error::InvalidArgument(_))));
    }

    #[test]
    fn rk4_error_is_fourth_order() {
        let g = QuadraticGenerator::pair_coupling(&[c(0.6, 0.8)]).unwrap();
        let v = pv(&[c(0.3, 0.1), c(-0.2, 0.5)]);
        let exact = flow(&g, 2.0).unwrap().apply(&v).unwrap();
        let e1 = ode_flow(&g, &v, 2.0, 20).unwrap().max_abs_diff(&exact);
        let e2 = ode_flow(&g, &v, 2.0, 40).unwrap().max_abs_diff(&exact);
        let ratio = e1 / e2;
        assert!((13.0..19.0).contains(&ratio), "ratio {ratio}");
    }

    #[test]
    fn apply_identity_and_unitary() {
        let v = pv(&[c(1.0, 2.0), c(-0.5, 0.1)]);
        assert_eq!(LinearCanonicalMap::identity(2).apply(&v).unwrap(), v);
        let h = array![[c(0.5, 0.0), c(0.2, -0.3)], [c(0.2, 0.3), c(-1.0, 0.0)]];
        let m = flow(&QuadraticGenerator::hamiltonian(h).unwrap(), 1.7).unwrap();
        assert!((m.apply(&v).unwrap().norm() - v.norm()).abs() < 1e-14);
        assert!(matches!(m.apply(&pv(&[ONE])), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn symplectic_diagnostics() {
        let id = verify_symplectic(&LinearCanonicalMap::identity(3));
        assert_eq!(id.max(), 0.0);

        let bad = LinearCanonicalMap::from_blocks_unchecked(linalg::identity(1), linalg::identity(1)).unwrap();
        let d = verify_symplectic(&bad);
        assert_eq!(d.unitarity, 1.0);
        assert!(LinearCanonicalMap::new(linalg::identity(1), linalg::identity(1)).is_err());

        let h = array![[c(0.3, 0.0), c(0.1, 0.2)], [c(0.1, -0.2), c(-0.4, 0.0)]];
        let w = array![[c(0.1, 0.05), c(-0.2, 0.1)], [c(-0.2, 0.1), c(0.0, 0.3)]];
        let m = flow(&QuadraticGenerator::new(h, w).unwrap(), 3.0).unwrap();
        assert!(verify_symplectic(&m).max() < 1e-10);
        assert!(LinearCanonicalMap::new(m.block_a().clone(), m.block_b().clone()).is_ok());
    }

    #[test]
    fn inverse_and_compose() {
        let g = QuadraticGenerator::pair_coupling(&[c(0.5, -0.5)]).unwrap();
        let m = flow(&g, 1.3).unwrap();
        let round = m.compose(&m.inverse()).unwrap();
        assert!(round.max_block_diff(&LinearCanonicalMap::identity(2)) < 1e-12);
        let back = flow(&g, -1.3).unwrap();
        assert!(back.max_block_diff(&m.inverse()) < 1e-12);
    }
}
