//! Canned oracle checks run by `verify` and the `oracle-check` experiment.

use ndarray::array;
use num_complex::Complex64 as C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::coherent_states::{beam_stats, overlap, perp_overlap};
use crate::error::Result;
use crate::fock_oracle::{
    bogoliubov_residual, conjugation_check, eigenvalue_residual, factorization_check, metaplectic_unitary,
    number_statistics, schrodinger_residual, state_from_instructions, weyl_relation_check, FockSpaceSpec,
    WEYL_PHASE_SIGN,
};
use crate::phase_space::{PhaseVector, QuadraticGenerator};

use super::output::{Cell, Table};

pub const SINGLE_MODE_CUTOFF: usize = 30;
pub const TWO_MODE_CUTOFF: usize = 15;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SuiteConfig {
    pub single_mode_cutoff: usize,
    pub two_mode_cutoff: usize,
    pub seed: Option<u64>,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        Self { single_mode_cutoff: SINGLE_MODE_CUTOFF, two_mode_cutoff: TWO_MODE_CUTOFF, seed: None }
    }
}

impl SuiteConfig {
    pub fn uniform(cutoff: usize) -> Self {
        Self { single_mode_cutoff: cutoff, two_mode_cutoff: cutoff, seed: None }
    }

    /// Rejects cutoffs whose Fock space exceeds the dimension limit.
    pub fn validate(&self) -> Result<()> {
        FockSpaceSpec::new(1, self.single_mode_cutoff)?;
        FockSpaceSpec::new(2, self.two_mode_cutoff)?;
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckRow {
    pub check: String,
    /// `None` when the check could not be evaluated.
    pub residual: Option<f64>,
    pub tolerance: f64,
    pub pass: bool,
    #[serde(skip_serializing_if = "String::is_empty")]
    pub note: String,
}

impl CheckRow {
    fn from_result(check: impl Into<String>, tolerance: f64, outcome: Result<f64>) -> Self {
        let check = check.into();
        match outcome {
            Ok(r) => {
                Self { check, residual: Some(r), tolerance, pass: r.is_finite() && r <= tolerance, note: String::new() }
            }
            Err(e) => Self { check, residual: None, tolerance, pass: false, note: e.to_string() },
        }
    }

    fn with_note(mut self, note: impl Into<String>) -> Self {
        if self.note.is_empty() {
            self.note = note.into();
        }
        self
    }
}

pub fn rows_to_table(rows: &[CheckRow]) -> Table {
    let mut table = Table::new(["check", "residual", "tolerance", "pass", "note"]);
    for r in rows {
        table.push(vec![
            Cell::Text(r.check.clone()),
            r.residual.map_or(Cell::Empty, Cell::Num),
            Cell::Num(r.tolerance),
            Cell::Text(r.pass.to_string()),
            Cell::Text(r.note.replace(',', ";")),
        ]);
    }
    table
}

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

fn pv(v: &[C64]) -> Result<PhaseVector> {
    PhaseVector::new(v.to_vec())
}

fn weyl_row(name: String, spec: FockSpaceSpec, a: &[C64], b: &[C64]) -> CheckRow {
    let mut sign = None;
    let outcome = (|| {
        let d = weyl_relation_check(spec, &pv(a)?, &pv(b)?)?;
        sign = Some(d.realized_sign());
        Ok(if WEYL_PHASE_SIGN > 0.0 { d.residual_positive } else { d.residual_negative })
    })();
    let row = CheckRow::from_result(name, 1e-8, outcome);
    match sign {
        Some(s) if s != WEYL_PHASE_SIGN => {
            CheckRow { pass: false, ..row }.with_note("realized sign differs from pinned sign")
        }
        _ => row,
    }
}

fn overlap_row(name: String, spec: FockSpaceSpec, a: &[C64], b: &[C64]) -> CheckRow {
    let outcome = (|| {
        let (a, b) = (pv(a)?, pv(b)?);
        let oracle = state_from_instructions(spec, &a)?.inner(&state_from_instructions(spec, &b)?);
        Ok((oracle - overlap(&a, &b)?.value()).norm())
    })();
    CheckRow::from_result(name, 1e-9, outcome)
}

/// Runs every canned check. Evaluation failures become failing rows.
pub fn run_suite(config: &SuiteConfig) -> Result<Vec<CheckRow>> {
    config.validate()?;
    let one = FockSpaceSpec::new(1, config.single_mode_cutoff)?;
    let two = FockSpaceSpec::new(2, config.two_mode_cutoff)?;
    let mut rows = Vec::new();

    rows.push(weyl_row("weyl_relation".into(), one, &[c(0.5, 0.0)], &[c(0.0, 0.5)]));
    rows.push(overlap_row("coherent_overlap".into(), one, &[c(0.4, -0.2)], &[c(-0.3, 0.5)]));
    rows.push(CheckRow::from_result(
        "vacuum_amplitude",
        1e-10,
        (|| {
            let v = pv(&[c(0.6, 0.5)])?;
            let amp = state_from_instructions(one, &v)?.amplitude(&[0]).unwrap_or_default();
            Ok((amp - c((-v.norm_sqr() / 2.0).exp(), 0.0)).norm())
        })(),
    ));

    rows.push(CheckRow::from_result(
        "conjugation_unitary",
        1e-8,
        (|| {
            let g = QuadraticGenerator::hamiltonian(array![[c(1.0, 0.0), c(0.3, -0.2)], [c(0.3, 0.2), c(-0.5, 0.0)]])?;
            Ok(conjugation_check(two, &g, 1.1, &pv(&[c(0.3, 0.0), c(0.0, 0.4)])?)?.residual)
        })(),
    ));
    rows.push(CheckRow::from_result(
        "conjugation_coupling",
        1e-6,
        (|| {
            let g = QuadraticGenerator::pair_coupling(&[c(1.0, 0.0)])?;
            Ok(conjugation_check(two, &g, 0.3, &pv(&[c(0.5, 0.0), ZERO])?)?.residual)
        })(),
    ));
    rows.push(CheckRow::from_result(
        "bogoliubov",
        1e-6,
        (|| {
            let g = QuadraticGenerator::pair_coupling(&[c(0.3, 0.2)])?;
            bogoliubov_residual(two, &g, 0.5)
        })(),
    ));
    rows.push(CheckRow::from_result(
        "metaplectic_unitarity",
        1e-10,
        (|| {
            let g = QuadraticGenerator::pair_coupling(&[c(0.3, 0.2)])?;
            Ok(metaplectic_unitary(two, &g, 0.5)?.unitarity_defect())
        })(),
    ));
    rows.push(CheckRow::from_result(
        "factorization",
        1e-9,
        (|| {
            let d = factorization_check(two, &pv(&[c(0.4, 0.1), c(-0.2, 0.3)])?, &[vec![0], vec![1]])?;
            Ok(d.product_residual.max(d.reversed_residual).max(d.commutator_residual))
        })(),
    ));
    rows.push(CheckRow::from_result(
        "eigenvalue",
        1e-8,
        (|| eigenvalue_residual(two, &pv(&[c(0.5, 0.2), c(0.0, -0.4)])?))(),
    ));

    let single_ratio = (|| {
        let g = QuadraticGenerator::hamiltonian(array![[c(1.0, 0.0)]])?;
        let v = pv(&[c(0.5, 0.0)])?;
        let coarse = schrodinger_residual(one, &g, &v, 0.3, 1e-3)?;
        let fine = schrodinger_residual(one, &g, &v, 0.3, 5e-4)?;
        Ok((coarse, coarse / fine))
    })();
    rows.push(CheckRow::from_result("schrodinger", 1e-5, single_ratio.clone().map(|r| r.0)));
    rows.push(
        CheckRow::from_result("schrodinger_order", 0.5, single_ratio.map(|r| (r.1 - 4.0).abs()))
            .with_note("distance of the step-halving ratio from 4"),
    );

    for (name, spec, v) in [
        ("number_statistics_single", one, vec![c(1.2, 0.0)]),
        ("number_statistics_two_mode", two, vec![c(0.6, 0.0), c(0.0, 0.5)]),
    ] {
        rows.push(CheckRow::from_result(
            name,
            1e-7,
            (|| {
                let v = pv(&v)?;
                let oracle = number_statistics(&state_from_instructions(spec, &v)?.orthogonal_to_vacuum()?)?;
                let closed = beam_stats(&v)?;
                let mut worst =
                    (oracle.total_n - closed.nbar_total).abs().max((oracle.total_n2 - closed.n2bar_total).abs());
                for k in 0..v.dim() {
                    worst = worst.max((oracle.mode_n[k] - closed.nbar_k[k]).abs());
                    worst = worst.max((oracle.mode_variance(k) - closed.var_k[k]).abs());
                }
                Ok(worst)
            })(),
        ));
    }

    rows.push(CheckRow::from_result(
        "perp_overlap",
        1e-8,
        (|| {
            let (a, b) = (pv(&[c(0.8, 0.0)])?, pv(&[c(0.5, 0.3)])?);
            let pa = state_from_instructions(one, &a)?.orthogonal_to_vacuum()?;
            let pb = state_from_instructions(one, &b)?.orthogonal_to_vacuum()?;
            Ok((pa.inner(&pb) - perp_overlap(&a, &b)?).norm())
        })(),
    ));

    if let Some(seed) = config.seed {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut draw = |r: f64| -> C64 {
            let (rho, phi): (f64, f64) = (rng.random_range(0.0..r), rng.random_range(0.0..std::f64::consts::TAU));
            C64::from_polar(rho, phi)
        };
        for k in 0..5 {
            let (a, b) = (draw(0.5), draw(0.5));
            rows.push(weyl_row(format!("weyl_relation_random_{k}"), one, &[a], &[b]));
        }
        for k in 0..5 {
            let (a, b) = (draw(1.0), draw(1.0));
            rows.push(overlap_row(format!("coherent_overlap_random_{k}"), one, &[a], &[b]));
        }
    }

    Ok(rows)
}

const ZERO: C64 = C64::new(0.0, 0.0);

pub fn all_pass(rows: &[CheckRow]) -> bool {
    rows.iter().all(|r| r.pass)
}
