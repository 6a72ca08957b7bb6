//! Dense complex matrix helpers and the matrix exponential.
//!
//! The exponential uses scaling and squaring with a diagonal Padé
//! approximant whose degree (3, 5, 7, 9 or 13) is picked from the 1-norm of
//! the input, following Higham's backward-error bounds for double precision.

use ndarray::{Array1, Array2, ArrayView2, Zip};
use num_complex::Complex64 as C64;

use crate::error::{Error, Result};

pub const ZERO: C64 = C64 { re: 0.0, im: 0.0 };
pub const ONE: C64 = C64 { re: 1.0, im: 0.0 };
pub const I: C64 = C64 { re: 0.0, im: 1.0 };

pub fn identity(n: usize) -> Array2<C64> {
    Array2::from_diag_elem(n, ONE)
}

/// Conjugate transpose.
pub fn dagger(m: &Array2<C64>) -> Array2<C64> {
    m.t().mapv(|z| z.conj())
}

pub fn conj(m: &Array2<C64>) -> Array2<C64> {
    m.mapv(|z| z.conj())
}

pub fn max_abs(m: ArrayView2<'_, C64>) -> f64 {
    m.iter().fold(0.0_f64, |acc, z| acc.max(z.norm()))
}

pub fn max_abs_diff(a: ArrayView2<'_, C64>, b: ArrayView2<'_, C64>) -> f64 {
    let mut worst = 0.0_f64;
    Zip::from(a).and(b).for_each(|x, y| worst = worst.max((x - y).norm()));
    worst
}

pub fn vec_norm(v: &Array1<C64>) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// `Σ conj(a_j) b_j`
pub fn vdot(a: &Array1<C64>, b: &Array1<C64>) -> C64 {
    a.iter().zip(b.iter()).map(|(x, y)| x.conj() * y).sum()
}

pub fn one_norm(m: &Array2<C64>) -> f64 {
    m.columns().into_iter().map(|col| col.iter().map(|z| z.norm()).sum::<f64>()).fold(0.0, f64::max)
}

pub fn all_finite(m: &Array2<C64>) -> bool {
    m.iter().all(|z| z.re.is_finite() && z.im.is_finite())
}

const THETA: [(usize, f64); 4] = [
    (3, 1.495_585_217_958_292e-2),
    (5, 2.539_398_330_063_23e-1),
    (7, 9.504_178_996_162_932e-1),
    (9, 2.097_847_961_257_068e0),
];
const THETA_13: f64 = 5.371_920_351_148_152;

const PADE_3: [f64; 4] = [120.0, 60.0, 12.0, 1.0];
const PADE_5: [f64; 6] = [30240.0, 15120.0, 3360.0, 420.0, 30.0, 1.0];
const PADE_7: [f64; 8] = [17_297_280.0, 8_648_640.0, 1_995_840.0, 277_200.0, 25_200.0, 1_512.0, 56.0, 1.0];
const PADE_9: [f64; 10] = [
    17_643_225_600.0,
    8_821_612_800.0,
    2_075_673_600.0,
    302_702_400.0,
    30_270_240.0,
    2_162_160.0,
    110_880.0,
    3_960.0,
    90.0,
    1.0,
];
const PADE_13: [f64; 14] = [
    64_764_752_532_480_000.0,
    32_382_376_266_240_000.0,
    7_771_770_303_897_600.0,
    1_187_353_796_428_800.0,
    129_060_195_264_000.0,
    10_559_470_521_600.0,
    670_442_572_800.0,
    33_522_128_640.0,
    1_323_241_920.0,
    40_840_800.0,
    960_960.0,
    16_380.0,
    182.0,
    1.0,
];

// Beyond this many squarings the result cannot be represented anyway.
const MAX_SQUARINGS: i32 = 1100;

/// Matrix exponential of a square complex matrix.
pub fn expm(a: &Array2<C64>) -> Result<Array2<C64>> {
    let n = a.nrows();
    if n != a.ncols() {
        return Err(Error::DimensionMismatch { expected: n, found: a.ncols() });
    }
    if n == 0 {
        return Ok(Array2::zeros((0, 0)));
    }
    let norm = one_norm(a);
    if !norm.is_finite() {
        return Err(Error::ExpmNonConvergence { norm });
    }

    for &(m, theta) in &THETA {
        if norm <= theta {
            let coeffs: &[f64] = match m {
                3 => &PADE_3,
                5 => &PADE_5,
                7 => &PADE_7,
                _ => &PADE_9,
            };
            return pade_low(a, coeffs, norm);
        }
    }

    let squarings = if norm > THETA_13 { (norm / THETA_13).log2().ceil() as i32 } else { 0 };
    if squarings > MAX_SQUARINGS {
        return Err(Error::ExpmNonConvergence { norm });
    }
    let scaled = a.mapv(|z| z * 2f64.powi(-squarings));
    let mut result = pade_13(&scaled, norm)?;
    for _ in 0..squarings {
        result = result.dot(&result);
    }
    if !all_finite(&result) {
        return Err(Error::ExpmNonConvergence { norm });
    }
    Ok(result)
}

fn pade_low(a: &Array2<C64>, b: &[f64], norm: f64) -> Result<Array2<C64>> {
    let n = a.nrows();
    let eye = identity(n);
    let a2 = a.dot(a);
    // powers[k] = A^(2k)
    let mut powers = vec![eye, a2.clone()];
    while powers.len() * 2 < b.len() {
        let next = powers.last().unwrap().dot(&a2);
        powers.push(next);
    }
    let mut odd = Array2::<C64>::zeros((n, n));
    let mut even = Array2::<C64>::zeros((n, n));
    for (k, p) in powers.iter().enumerate() {
        even.scaled_add(C64::from(b[2 * k]), p);
        if 2 * k + 1 < b.len() {
            odd.scaled_add(C64::from(b[2 * k + 1]), p);
        }
    }
    let u = a.dot(&odd);
    finish_pade(&u, &even, norm)
}

fn pade_13(a: &Array2<C64>, norm: f64) -> Result<Array2<C64>> {
    let b = &PADE_13;
    let n = a.nrows();
    let eye = identity(n);
    let a2 = a.dot(a);
    let a4 = a2.dot(&a2);
    let a6 = a2.dot(&a4);

    let c = |x: f64| C64::from(x);
    let w1 = &a6 * c(b[13]) + &a4 * c(b[11]) + &a2 * c(b[9]);
    let w2 = w1.dot(&a6) + &a6 * c(b[7]) + &a4 * c(b[5]) + &a2 * c(b[3]) + &eye * c(b[1]);
    let u = a.dot(&w2);
    let z1 = &a6 * c(b[12]) + &a4 * c(b[10]) + &a2 * c(b[8]);
    let v = z1.dot(&a6) + &a6 * c(b[6]) + &a4 * c(b[4]) + &a2 * c(b[2]) + &eye * c(b[0]);
    finish_pade(&u, &v, norm)
}

fn finish_pade(u: &Array2<C64>, v: &Array2<C64>, norm: f64) -> Result<Array2<C64>> {
    let numerator = v + u;
    let denominator = v - u;
    solve(denominator, numerator).ok_or(Error::ExpmNonConvergence { norm })
}

/// Solves `A X = B` by Gaussian elimination with partial pivoting.
/// Returns `None` when a pivot vanishes.
pub fn solve(mut a: Array2<C64>, mut b: Array2<C64>) -> Option<Array2<C64>> {
    let n = a.nrows();
    debug_assert_eq!(n, a.ncols());
    debug_assert_eq!(n, b.nrows());
    let scale = max_abs(a.view()).max(f64::MIN_POSITIVE);

    for col in 0..n {
        let (pivot_row, pivot_abs) =
            (col..n)
                .map(|r| (r, a[[r, col]].norm()))
                .fold((col, -1.0), |best, cur| if cur.1 > best.1 { cur } else { best });
        if pivot_abs <= f64::EPSILON * scale * 1e-3 {
            return None;
        }
        if pivot_row != col {
            for j in 0..n {
                a.swap([col, j], [pivot_row, j]);
            }
            for j in 0..b.ncols() {
                b.swap([col, j], [pivot_row, j]);
            }
        }
        let pivot = a[[col, col]];
        for row in (col + 1)..n {
            let factor = a[[row, col]] / pivot;
            if factor == ZERO {
                continue;
            }
            for j in col..n {
                let v = a[[col, j]];
                a[[row, j]] -= factor * v;
            }
            for j in 0..b.ncols() {
                let v = b[[col, j]];
                b[[row, j]] -= factor * v;
            }
        }
    }

    for col in (0..n).rev() {
        let pivot = a[[col, col]];
        for j in 0..b.ncols() {
            let mut acc = b[[col, j]];
            for k in (col + 1)..n {
                acc -= a[[col, k]] * b[[k, j]];
            }
            b[[col, j]] = acc / pivot;
        }
    }
    Some(b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;

    // Truncated Taylor series with plain repeated squaring; independent of
    // the Padé route.
    fn taylor_expm(a: &Array2<C64>) -> Array2<C64> {
        let norm = one_norm(a);
        let s = if norm > 0.5 { (norm / 0.5).log2().ceil() as i32 } else { 0 };
        let scaled = a.mapv(|z| z * 2f64.powi(-s));
        let n = a.nrows();
        let mut term = identity(n);
        let mut sum = identity(n);
        for k in 1..30 {
            term = term.dot(&scaled).mapv(|z| z / k as f64);
            sum += &term;
        }
        for _ in 0..s {
            sum = sum.dot(&sum);
        }
        sum
    }

    fn sample(n: usize, seed: u64, scale: f64) -> Array2<C64> {
        let mut state = seed;
        let mut next = || {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            ((state >> 11) as f64 / (1u64 << 53) as f64) * 2.0 - 1.0
        };
        Array2::from_shape_fn((n, n), |_| C64::new(next(), next()) * scale)
    }

    #[test]
    fn zero_matrix_gives_identity() {
        let z = Array2::<C64>::zeros((5, 5));
        assert_eq!(expm(&z).unwrap(), identity(5));
    }

    #[test]
    fn scalar_cases() {
        for z in [C64::new(3.0, 1.0), C64::new(0.0, -std::f64::consts::PI), C64::new(-20.0, 0.5)] {
            let e = expm(&array![[z]]).unwrap();
            assert!((e[[0, 0]] - z.exp()).norm() <= 1e-13 * z.exp().norm().max(1.0));
        }
    }

    #[test]
    fn matches_taylor_across_pade_degrees() {
        for (i, scale) in [1e-3, 0.05, 0.2, 0.5, 1.0, 3.0].into_iter().enumerate() {
            let a = sample(6, 17 + i as u64, scale);
            let got = expm(&a).unwrap();
            let want = taylor_expm(&a);
            let rel = max_abs_diff(got.view(), want.view()) / max_abs(want.view());
            assert!(rel < 1e-12, "scale {scale}: rel {rel:e}");
        }
    }

    #[test]
    fn nilpotent_is_exact_polynomial() {
        let a = array![[ZERO, ONE, ZERO], [ZERO, ZERO, ONE], [ZERO, ZERO, ZERO]];
        let e = expm(&a.mapv(|z| z * 7.0)).unwrap();
        assert!((e[[0, 2]] - C64::from(24.5)).norm() < 1e-12);
        assert!((e[[0, 1]] - C64::from(7.0)).norm() < 1e-12);
    }

    #[test]
    fn non_finite_norm_is_reported() {
        let a = array![[C64::new(f64::INFINITY, 0.0)]];
        assert!(matches!(expm(&a), Err(Error::ExpmNonConvergence { .. })));
        let big = array![[C64::from(1e6), ZERO], [ZERO, ZERO]];
        match expm(&big) {
            Err(Error::ExpmNonConvergence { norm }) => assert_eq!(norm, 1e6),
            other => panic!("expected overflow report, got {other:?}"),
        }
    }

    #[test]
    fn solve_recovers_known_solution() {
        let a = sample(7, 3, 1.0);
        let x = sample(7, 4, 1.0);
        let b = a.dot(&x);
        let got = solve(a, b).unwrap();
        assert!(max_abs_diff(got.view(), x.view()) < 1e-12);
    }
}
