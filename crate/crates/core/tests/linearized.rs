use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use torus_ns::eigenbasis::build_basis;
use torus_ns::galerkin::{assemble_linearized, solve_linearized, FieldTrajectory, ForcingFn, SolverConfig, ZeroForcing};
use torus_ns::sample::random_solenoidal;
use torus_ns::spectral::{convect, inner_l2, VectorField};

const ELL: f64 = 2.0 * PI;

#[test]
fn zero_drift_gives_diffusion_diagonal() {
    let basis = build_basis(1.5, 5);
    let op = assemble_linearized(&FieldTrajectory::constant(VectorField::zeros(1.5, 5), 1.0), &basis, 0.3).unwrap();
    let expected = DMatrix::from_diagonal(&DVector::from_vec(op.diffusion()));
    assert_eq!(op.matrices[0], expected);
    let kappa = 2.0 * PI / 1.5;
    for (d, m) in op.diffusion().iter().zip(&op.shells) {
        assert!((d - 0.3 * *m as f64 * kappa * kappa).abs() < 1e-14 * d.max(1.0));
    }
}

#[test]
fn constant_drift_transport_is_antisymmetric() {
    let basis = build_basis(ELL, 4);
    let w = VectorField::constant(ELL, 4, [0.4, -1.2, 0.7]);
    let op = assemble_linearized(&FieldTrajectory::constant(w, 1.0), &basis, 0.1).unwrap();
    let transport = &op.matrices[0] - DMatrix::from_diagonal(&DVector::from_vec(op.diffusion()));
    let sym = &transport + transport.transpose();
    assert!(sym.amax() <= 1e-13 * transport.amax());
    assert!(transport.amax() > 0.1);
}

#[test]
fn transport_entries_match_direct_inner_products() {
    let mut r = ChaCha8Rng::seed_from_u64(11);
    let basis = build_basis(ELL, 3);
    let w = random_solenoidal(&mut r, ELL, 3, 1.0);
    let op = assemble_linearized(&FieldTrajectory::constant(w.clone(), 1.0), &basis, 0.1).unwrap();
    assert!(op.by_parts_defect <= 1e-11);
    let fields: Vec<VectorField> = basis.solenoidal_system().map(|e| e.to_field(ELL, 3)).collect();
    let diff = op.diffusion();
    for (col, v) in fields.iter().enumerate() {
        let mut b = convect(&w, v).unwrap();
        b += &convect(v, &w).unwrap();
        for (row, u) in fields.iter().enumerate() {
            let direct = inner_l2(&b, u).unwrap() + if row == col { diff[row] } else { 0.0 };
            assert!((op.matrices[0][(row, col)] - direct).abs() <= 1e-12);
        }
    }
}

#[test]
fn repeated_drift_samples_reuse_matrices() {
    let mut r = ChaCha8Rng::seed_from_u64(12);
    let basis = build_basis(ELL, 2);
    let a = random_solenoidal(&mut r, ELL, 2, 1.0);
    let b = random_solenoidal(&mut r, ELL, 2, 1.0);
    let w = FieldTrajectory::new(vec![0.0, 0.5, 1.0], vec![a.clone(), a, b]).unwrap();
    let op = assemble_linearized(&w, &basis, 0.1).unwrap();
    assert_eq!(op.matrices[0], op.matrices[1]);
    assert_ne!(op.matrices[1], op.matrices[2]);
    assert!(!op.is_autonomous());
    assert!(op.exponential_solution(&DVector::zeros(op.dim()), &DVector::zeros(op.dim()), 1.0).is_err());
}

#[test]
fn unforced_modes_decay_exponentially() {
    let basis = build_basis(ELL, 4);
    let op = assemble_linearized(&FieldTrajectory::constant(VectorField::zeros(ELL, 4), 0.5), &basis, 0.2).unwrap();
    let coeffs: Vec<f64> = (0..basis.dim()).map(|i| ((i % 7) as f64 - 3.0) * 0.1).collect();
    let u0 = basis.reconstruct(&coeffs);
    let sol =
        solve_linearized(&op, &basis, &ZeroForcing { ell: ELL, cutoff: 4 }, &u0, &SolverConfig::new(0.2, 0.5, 4, 1e-2))
            .unwrap();
    let last = sol.coefficients.last().unwrap();
    for ((c, c0), lambda) in last.iter().zip(&coeffs).zip(op.diffusion()) {
        assert!((c - c0 * (-lambda * 0.5).exp()).abs() <= 1e-10);
    }
}

#[test]
fn constant_forcing_relaxes_to_steady_state() {
    let basis = build_basis(ELL, 2);
    let mu = 0.5;
    let op = assemble_linearized(&FieldTrajectory::constant(VectorField::zeros(ELL, 2), 1.0), &basis, mu).unwrap();
    let idx = 7;
    let g = basis.entries[idx - 3].to_field(ELL, 2).scaled(0.3);
    let u0 = basis.entries[idx - 3].to_field(ELL, 2).scaled(-0.2);
    let cfg = SolverConfig::new(mu, 1.0, 2, 1e-3);
    let sol = solve_linearized(&op, &basis, &ForcingFn(move |_| g.clone()), &u0, &cfg).unwrap();
    let lambda = op.diffusion()[idx];
    for (t, c) in sol.trajectory.times.iter().zip(&sol.coefficients) {
        let exact = 0.3 / lambda + (-0.2 - 0.3 / lambda) * (-lambda * t).exp();
        assert!((c[idx] - exact).abs() <= 1e-10, "t = {t}");
    }
}
