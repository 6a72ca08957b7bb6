mod common;

use common::*;
use metaplectic::coherent_states::{beam_stats, overlap, perp_overlap};
use metaplectic::fock_oracle::{
    conjugation_check, displacement, metaplectic_unitary, mode_operators, number_statistics, state_from_instructions,
    weyl_relation_check, FockOperator, FockSpaceSpec, WEYL_PHASE_SIGN,
};
use metaplectic::phase_space::QuadraticGenerator;
use proptest::prelude::*;

fn single() -> FockSpaceSpec {
    FockSpaceSpec::new(1, 30).unwrap()
}

fn two() -> FockSpaceSpec {
    FockSpaceSpec::new(2, 15).unwrap()
}

#[test]
fn interior_commutators_are_exact() {
    let spec = FockSpaceSpec::new(2, 6).unwrap();
    let ops = mode_operators(spec).unwrap();
    let id = FockOperator::identity(spec);
    for i in 0..2 {
        for j in 0..2 {
            let ccr = ops[i].commutator(&ops[j].dagger());
            let expected = if i == j { id.clone() } else { id.scaled(c(0.0, 0.0)) };
            for col in 0..spec.dim() {
                if spec.is_edge(col) {
                    continue;
                }
                let diff = (&ccr.matrix().column(col) - &expected.matrix().column(col))
                    .iter()
                    .map(|z| z.norm())
                    .fold(0.0, f64::max);
                assert!(diff < 1e-13, "[a_{i}, a_{j}†] column {col}: {diff:e}");
            }
            assert_eq!(metaplectic::linalg::max_abs(ops[i].commutator(&ops[j]).matrix().view()), 0.0);
        }
    }
}

#[test]
fn conjugation_residual_shrinks_with_cutoff() {
    let g = QuadraticGenerator::pair_coupling(&[c(0.5, 0.0)]).unwrap();
    let v = pv(&[c(0.3, 0.0), c(0.0, 0.4)]);
    let residuals: Vec<f64> = [10, 15, 20]
        .into_iter()
        .map(|cut| conjugation_check(FockSpaceSpec::new(2, cut).unwrap(), &g, 1.0, &v).unwrap().residual)
        .collect();
    assert!(residuals[0] > residuals[1] && residuals[1] > residuals[2], "{residuals:?}");
}

#[test]
fn unitarity_under_guard() {
    let d = displacement(single(), &pv(&[c(0.9, -0.6)])).unwrap();
    assert!(d.unitarity_defect() < 1e-9);
    let g = QuadraticGenerator::pair_coupling(&[c(0.2, 0.3)]).unwrap();
    assert!(metaplectic_unitary(two(), &g, 0.7).unwrap().unitarity_defect() < 1e-9);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn overlap_single_mode(a in complex(1.05), b in complex(1.05)) {
        let (a, b) = (pv(&[a]), pv(&[b]));
        let oracle = state_from_instructions(single(), &a).unwrap().inner(&state_from_instructions(single(), &b).unwrap());
        prop_assert!((oracle - overlap(&a, &b).unwrap().value()).norm() < 1e-6);
    }

    #[test]
    fn overlap_two_modes(a in complex_vec(2, 0.7), b in complex_vec(2, 0.7)) {
        let (a, b) = (pv(&a), pv(&b));
        let oracle = state_from_instructions(two(), &a).unwrap().inner(&state_from_instructions(two(), &b).unwrap());
        prop_assert!((oracle - overlap(&a, &b).unwrap().value()).norm() < 1e-6);
    }

    #[test]
    fn perp_overlap_single_mode(a in complex(1.05), b in complex(1.05)) {
        prop_assume!(a.norm() > 0.05 && b.norm() > 0.05);
        let (a, b) = (pv(&[a]), pv(&[b]));
        let pa = state_from_instructions(single(), &a).unwrap().orthogonal_to_vacuum().unwrap();
        let pb = state_from_instructions(single(), &b).unwrap().orthogonal_to_vacuum().unwrap();
        prop_assert!((pa.inner(&pb) - perp_overlap(&a, &b).unwrap()).norm() < 1e-6);
    }

    #[test]
    fn beam_stats_single_mode(z in complex(1.4)) {
        prop_assume!(z.norm() > 0.05 && z.norm() <= 2.0);
        let v = pv(&[z]);
        let oracle = number_statistics(&state_from_instructions(single(), &v).unwrap().orthogonal_to_vacuum().unwrap()).unwrap();
        let closed = beam_stats(&v).unwrap();
        prop_assert!((oracle.total_n - closed.nbar_total).abs() < 1e-7);
        prop_assert!((oracle.total_n2 - closed.n2bar_total).abs() < 1e-7);
    }

    #[test]
    fn beam_stats_two_modes(v in complex_vec(2, 0.75)) {
        prop_assume!(v.iter().map(|z| z.norm_sqr()).sum::<f64>() > 1e-3);
        let v = pv(&v);
        let oracle = number_statistics(&state_from_instructions(two(), &v).unwrap().orthogonal_to_vacuum().unwrap()).unwrap();
        let closed = beam_stats(&v).unwrap();
        for k in 0..2 {
            prop_assert!((oracle.mode_n[k] - closed.nbar_k[k]).abs() < 1e-7);
            prop_assert!((oracle.mode_variance(k) - closed.var_k[k]).abs() < 1e-7);
        }
        prop_assert!((oracle.total_n2 - closed.n2bar_total).abs() < 1e-7);
    }

    #[test]
    fn weyl_sign_is_stable(a in complex(0.49), b in complex(0.49)) {
        let d = weyl_relation_check(single(), &pv(&[a]), &pv(&[b])).unwrap();
        let pinned = if WEYL_PHASE_SIGN > 0.0 { d.residual_positive } else { d.residual_negative };
        prop_assert!(pinned < 1e-8);
        if d.theta.abs() > 1e-3 {
            prop_assert_eq!(d.realized_sign(), WEYL_PHASE_SIGN);
        }
    }
}
