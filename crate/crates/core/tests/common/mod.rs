#![allow(dead_code)]

use metaplectic::phase_space::{PhaseVector, QuadraticGenerator};
use ndarray::Array2;
use num_complex::Complex64 as C64;
use proptest::prelude::*;

pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

pub fn pv(v: &[C64]) -> PhaseVector {
    PhaseVector::new(v.to_vec()).unwrap()
}

pub fn complex(r: f64) -> BoxedStrategy<C64> {
    if r == 0.0 {
        return Just(C64::new(0.0, 0.0)).boxed();
    }
    (-r..r, -r..r).prop_map(|(re, im)| C64::new(re, im)).boxed()
}

pub fn complex_vec(n: usize, r: f64) -> impl Strategy<Value = Vec<C64>> {
    proptest::collection::vec(complex(r), n)
}

pub fn phase_vector(n: usize, r: f64) -> impl Strategy<Value = PhaseVector> {
    complex_vec(n, r).prop_map(|v| PhaseVector::new(v).unwrap())
}

/// Hermitian `H` and symmetric `W` with entries bounded by `h_scale`, `w_scale`.
pub fn generator(n: usize, h_scale: f64, w_scale: f64) -> impl Strategy<Value = QuadraticGenerator> {
    (complex_vec(n * n, h_scale), complex_vec(n * n, w_scale)).prop_map(move |(h, w)| {
        let h = Array2::from_shape_vec((n, n), h).unwrap();
        let w = Array2::from_shape_vec((n, n), w).unwrap();
        let herm = Array2::from_shape_fn((n, n), |(i, j)| (h[[i, j]] + h[[j, i]].conj()) * 0.5);
        let sym = Array2::from_shape_fn((n, n), |(i, j)| (w[[i, j]] + w[[j, i]]) * 0.5);
        QuadraticGenerator::new(herm, sym).unwrap()
    })
}

pub fn any_generator(max_n: usize, h_scale: f64, w_scale: f64) -> impl Strategy<Value = QuadraticGenerator> {
    (1..=max_n).prop_flat_map(move |n| generator(n, h_scale, w_scale))
}

pub fn generator_and_vector(
    max_n: usize,
    h_scale: f64,
    w_scale: f64,
    r: f64,
) -> impl Strategy<Value = (QuadraticGenerator, PhaseVector)> {
    (1..=max_n).prop_flat_map(move |n| (generator(n, h_scale, w_scale), phase_vector(n, r)))
}
