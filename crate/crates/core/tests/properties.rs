//! Property suites that need no solver convergence assumptions: mesh
//! symmetry invariants over randomized domains, matrix symmetry and
//! positivity, dense-vs-iterative eigenvalue equivalence on small systems,
//! and Bessel-zero interlacing.

mod common;

use proptest::prelude::*;
use symmspec::assembly::{apply_dirichlet, apply_nonlocal, assemble_free};
use symmspec::eigensolve::smallest_eigenpairs;
use symmspec::geometry::{area, build_mesh, normalize_area, DomainSpec};
use symmspec::oracle::bessel_zero;
use symmspec::sparse::EnvelopeCholesky;

fn domain_strategy() -> impl Strategy<Value = DomainSpec> {
    prop_oneof![
        (0.5f64..2.0).prop_map(|radius| DomainSpec::Disk { radius }),
        ((0.6f64..1.6), (0.6f64..1.6)).prop_map(|(a, b)| DomainSpec::Ellipse { a, b }),
        ((0.6f64..2.0), (0.6f64..2.0)).prop_map(|(a, b)| DomainSpec::Rectangle { a, b }),
        (
            (0.8f64..1.4),
            (1u32..4),
            (-1.0f64..1.0),
            proptest::option::of((1u32..5, -1.0f64..1.0))
        )
            .prop_map(|(r0, k1, e1, second)| {
                // keep the total perturbation well inside the star-shaped range
                let budget = 0.3 * r0;
                let mut terms = vec![(k1, e1 * budget * 0.6)];
                if let Some((k2, e2)) = second {
                    if k2 != k1 {
                        terms.push((k2, e2 * budget * 0.4));
                    }
                }
                DomainSpec::PolarPerturbed { r0, terms }
            }),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(20))]

    #[test]
    fn mesh_invariants_hold_for_random_domains(
        spec in domain_strategy(),
        frac in 0.12f64..0.25,
    ) {
        let h = frac * spec.min_boundary_radius();
        let mesh = build_mesh(&spec, h).unwrap();
        mesh.validate().unwrap();
        prop_assert!(mesh.max_edge() <= 2.0 * h);
        // polygonal area approximates the analytic area
        let exact = area(&spec);
        prop_assert!((mesh.mesh_area() - exact).abs() / exact < 0.10);
    }

    #[test]
    fn normalized_area_roundtrip(spec in domain_strategy(), target in 0.5f64..5.0) {
        let normalized = normalize_area(&spec, target);
        prop_assert!((area(&normalized) - target).abs() / target < 1e-12);
    }

    #[test]
    fn matrix_invariants_hold_for_random_domains(
        spec in domain_strategy(),
        frac in 0.18f64..0.30,
    ) {
        let h = frac * spec.min_boundary_radius();
        let mesh = build_mesh(&spec, h).unwrap();
        let free = assemble_free(&mesh);

        // exact symmetry by construction
        prop_assert_eq!(free.stiffness.max_asymmetry(), 0.0);
        prop_assert_eq!(free.mass.max_asymmetry(), 0.0);

        // constants in the stiffness null space
        let ones = vec![1.0; mesh.nodes.len()];
        let k1 = free.stiffness.apply(&ones);
        let kmax = free.stiffness.max_abs();
        for v in &k1 {
            prop_assert!(v.abs() <= 1e-10 * kmax);
        }

        // mass positive definite; reduced stiffness positive definite
        prop_assert!(EnvelopeCholesky::factor(&free.mass).is_ok());
        let dir = apply_dirichlet(&free, &mesh).unwrap();
        prop_assert!(EnvelopeCholesky::factor(&dir.stiffness).is_ok());
        let non = apply_nonlocal(&free, &mesh).unwrap();
        prop_assert_eq!(non.stiffness.max_asymmetry(), 0.0);
        prop_assert!(EnvelopeCholesky::factor(&non.stiffness).is_ok());
    }
}

#[test]
fn dense_and_iterative_eigenvalues_agree_on_small_systems() {
    // reduced dimensions stay below 200 at this resolution
    let specs = [
        DomainSpec::Disk { radius: 1.0 },
        DomainSpec::Ellipse { a: 1.2, b: 0.9 },
        DomainSpec::Rectangle { a: 1.5, b: 1.1 },
    ];
    for spec in &specs {
        let h = 0.23 * spec.min_boundary_radius();
        let mesh = build_mesh(spec, h).unwrap();
        let free = assemble_free(&mesh);
        let systems = [
            free.clone(),
            apply_dirichlet(&free, &mesh).unwrap(),
            apply_nonlocal(&free, &mesh).unwrap(),
        ];
        for ops in &systems {
            assert!(ops.reduced_dim() <= 200, "dimension {}", ops.reduced_dim());
            let dense = common::dense_generalized_eigenvalues(ops);
            let k = 6.min(ops.reduced_dim());
            let sparse = smallest_eigenpairs(ops, k, 1e-10).unwrap();
            for i in 0..k {
                let scale = dense[i].abs().max(1.0);
                assert!(
                    (sparse.eigenvalues[i] - dense[i]).abs() <= 1e-8 * scale,
                    "{spec:?} bc {:?} index {i}: sparse {} vs dense {}",
                    ops.bc,
                    sparse.eigenvalues[i],
                    dense[i]
                );
            }
        }
    }
}

#[test]
fn nonlocal_ground_state_below_dirichlet_on_every_mesh() {
    // discrete counterpart of the strict comparison between the nonlocal
    // and Dirichlet ground states; the Dirichlet space is contained in the
    // constrained space
    for (spec, h) in [
        (DomainSpec::Disk { radius: 1.0 }, 0.15),
        (DomainSpec::Rectangle { a: 1.7, b: 1.2 }, 0.15),
        (
            DomainSpec::PolarPerturbed {
                r0: 1.0,
                terms: vec![(2, 0.15)],
            },
            0.15,
        ),
    ] {
        let mesh = build_mesh(&spec, h).unwrap();
        let free = assemble_free(&mesh);
        let dir = apply_dirichlet(&free, &mesh).unwrap();
        let non = apply_nonlocal(&free, &mesh).unwrap();
        let l1p = smallest_eigenpairs(&non, 1, 1e-9).unwrap().eigenvalues[0];
        let l1d = smallest_eigenpairs(&dir, 1, 1e-9).unwrap().eigenvalues[0];
        assert!(l1p < l1d, "{spec:?}: {l1p} !< {l1d}");
    }
}

#[test]
fn bessel_zero_interlacing() {
    let jp11 = bessel_zero(1, 1, true).unwrap();
    let j01 = bessel_zero(0, 1, false).unwrap();
    let jp12 = bessel_zero(1, 2, true).unwrap();
    assert!(jp11 < j01 && j01 < jp12);
    // zeros of adjacent orders interlace: j_{m,k} < j_{m+1,k} < j_{m,k+1}
    for m in 0..8u32 {
        for k in 1..6u32 {
            let a = bessel_zero(m, k, false).unwrap();
            let b = bessel_zero(m + 1, k, false).unwrap();
            let c = bessel_zero(m, k + 1, false).unwrap();
            assert!(a < b && b < c, "interlacing broken at ({m},{k})");
        }
    }
}
