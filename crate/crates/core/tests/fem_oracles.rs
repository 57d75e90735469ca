//! Finite element eigenvalues against the exact spectra, at the reference
//! resolution h = 0.05: the Bessel-zero disk values and the separated
//! rectangle values.

use std::f64::consts::PI;

use symmspec::assembly::{apply_dirichlet, apply_nonlocal, assemble_free};
use symmspec::eigensolve::smallest_eigenpairs;
use symmspec::geometry::{build_mesh, DomainSpec};

#[test]
fn dirichlet_disk_ground_state_near_bessel_zero_squared() {
    let mesh = build_mesh(&DomainSpec::Disk { radius: 1.0 }, 0.05).unwrap();
    let free = assemble_free(&mesh);
    let dir = apply_dirichlet(&free, &mesh).unwrap();
    let l1 = smallest_eigenpairs(&dir, 1, 1e-8).unwrap().eigenvalues[0];
    assert!((l1 - 5.7832).abs() / 5.7832 < 0.01, "lambda_1^D = {l1}");
}

#[test]
fn free_disk_second_eigenvalue_near_derivative_zero_squared() {
    let mesh = build_mesh(&DomainSpec::Disk { radius: 1.0 }, 0.05).unwrap();
    let free = assemble_free(&mesh);
    let spec = smallest_eigenpairs(&free, 2, 1e-8).unwrap();
    assert!(spec.eigenvalues[0].abs() < 1e-8);
    let l2 = spec.eigenvalues[1];
    assert!((l2 - 3.38996).abs() / 3.38996 < 0.015, "lambda_2^N = {l2}");
}

#[test]
fn square_ground_states_match_separated_values() {
    let side = PI.sqrt();
    let mesh = build_mesh(&DomainSpec::Rectangle { a: side, b: side }, 0.05).unwrap();
    let free = assemble_free(&mesh);
    let dir = apply_dirichlet(&free, &mesh).unwrap();
    let non = apply_nonlocal(&free, &mesh).unwrap();
    // Dirichlet (1,1) mode: 2 pi^2 / pi = 2 pi
    let l1d = smallest_eigenpairs(&dir, 1, 1e-8).unwrap().eigenvalues[0];
    assert!((l1d - 2.0 * PI).abs() / (2.0 * PI) < 0.01, "lambda_1^D = {l1d}");
    // nonlocal ground state: odd Neumann (1,0) mode, pi^2 / pi = pi
    let l1p = smallest_eigenpairs(&non, 1, 1e-8).unwrap().eigenvalues[0];
    assert!((l1p - PI).abs() / PI < 0.01, "lambda_1(P) = {l1p}");
}
