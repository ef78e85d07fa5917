use std::f64::consts::PI;

use nalgebra::DVector;
use torus_ns::eigenbasis::build_basis;
use torus_ns::galerkin::{
    assemble_linearized, energy_defect, recover_pressures, residual, solve_linearized, solve_navier_stokes,
    FieldTrajectory, ForcingFn, Scheme, SolverConfig, ZeroForcing,
};
use torus_ns::problems::{shear_decay_exact, shear_mode, spectral_manufactured, temporal_manufactured};
use torus_ns::spectral::{l2_norm_exact, VectorField};

const ELL: f64 = 2.0 * PI;

fn max_error(traj: &FieldTrajectory, exact: impl Fn(f64) -> VectorField) -> f64 {
    traj.times
        .iter()
        .zip(&traj.fields)
        .map(|(&t, u)| {
            let e = exact(t);
            let c = u.cutoff().max(e.cutoff());
            l2_norm_exact(&(&u.with_cutoff(c) - &e.with_cutoff(c)))
        })
        .fold(0.0, f64::max)
}

#[test]
fn zero_data_stays_zero() {
    let cfg = SolverConfig::new(0.1, 0.1, 4, 1e-2);
    let traj = solve_navier_stokes(&ZeroForcing { ell: ELL, cutoff: 4 }, &VectorField::zeros(ELL, 4), &cfg).unwrap();
    assert!(traj.fields.iter().all(|u| u.is_zero()));
}

#[test]
fn shear_decay_matches_heat_solution() {
    let (mu, a) = (0.1, 1.3);
    let cfg = SolverConfig::new(mu, 1.0, 4, 1e-3);
    let f = ZeroForcing { ell: ELL, cutoff: 4 };
    let traj = solve_navier_stokes(&f, &shear_mode(ELL, 4, a), &cfg).unwrap();
    let err = l2_norm_exact(&(traj.last() - &shear_decay_exact(ELL, 4, a, mu, 1.0)));
    assert!(err < 1e-6, "final error {err}");
    let p = recover_pressures(&traj, &f).unwrap();
    let r = residual(&traj, &p, &f, mu).unwrap();
    assert!(r.iter().all(|&x| x < 1e-8));
    let d = energy_defect(&traj, &f, mu).unwrap();
    assert!(d.iter().all(|x| x.abs() < 1e-6), "{:?}", d.last());
}

#[test]
fn non_solenoidal_start_is_rejected() {
    let mut u = VectorField::zeros(ELL, 2);
    u.component_mut(0)
        .set_coeff(torus_ns::WaveVector::new(1, 0, 0), num_complex::Complex64::new(1.0, 0.0))
        .unwrap();
    let cfg = SolverConfig::new(0.1, 0.1, 2, 1e-2);
    assert!(solve_navier_stokes(&ZeroForcing { ell: ELL, cutoff: 2 }, &u, &cfg).is_err());
}

fn temporal_errors(scheme: Scheme, dts: &[f64]) -> Vec<f64> {
    let problem = temporal_manufactured(ELL, 0.1, 8.0).unwrap();
    let f = problem.forcing(4);
    dts.iter()
        .map(|&dt| {
            let cfg = SolverConfig::new(0.1, 1.0, 4, dt).with_scheme(scheme);
            let traj = solve_navier_stokes(&f, &problem.velocity(0.0), &cfg).unwrap();
            max_error(&traj, |t| problem.velocity(t))
        })
        .collect()
}

fn orders(errors: &[f64]) -> Vec<f64> {
    errors.windows(2).map(|w| (w[0] / w[1]).log2()).collect()
}

#[test]
fn temporal_convergence_orders() {
    let dts = [4e-3, 2e-3, 1e-3, 5e-4];
    for (scheme, lo) in [(Scheme::ImexEuler, 0.9), (Scheme::IfRk4, 3.5)] {
        let e = temporal_errors(scheme, &dts);
        let o = orders(&e);
        println!("{scheme}: errors {e:?} orders {o:?}");
        assert!(o.iter().all(|&x| x >= lo), "{scheme}: {o:?}");
    }
}

#[test]
fn spectral_convergence() {
    let problem = spectral_manufactured(ELL, 0.1, 0.05, 5).unwrap();
    let err = |m: u32| {
        let f = problem.forcing(m);
        let cfg = SolverConfig::new(0.1, 0.5, m, 5e-3);
        let traj = solve_navier_stokes(&f, &problem.velocity(0.0).with_cutoff(m), &cfg).unwrap();
        max_error(&traj, |t| problem.velocity(t))
    };
    let (e4, e9) = (err(4), err(9));
    println!("spectral: M=4 {e4:e}, M=9 {e9:e}");
    assert!(e4 >= 10.0 * e9);
}

#[test]
fn linearized_autonomous_matches_exponential() {
    let basis = build_basis(ELL, 4);
    let w = temporal_manufactured(ELL, 0.1, 1.0).unwrap().velocity(0.3);
    let op = assemble_linearized(&FieldTrajectory::constant(w.with_cutoff(4), 0.5), &basis, 0.1).unwrap();
    assert!(op.is_autonomous());
    let u0 = basis.entries[5].to_field(ELL, 4).scaled(0.7) + &basis.entries[40].to_field(ELL, 4);
    let fvec = basis.entries[2].to_field(ELL, 4).scaled(0.2);
    let g = fvec.clone();
    let cfg = SolverConfig::new(0.1, 0.5, 4, 1e-3);
    let sol = solve_linearized(&op, &basis, &ForcingFn(move |_| g.clone()), &u0, &cfg).unwrap();
    let c0 = DVector::from_vec(basis.solenoidal_coordinates(&u0));
    let fc = DVector::from_vec(basis.solenoidal_coordinates(&fvec));
    let exact = op.exponential_solution(&c0, &fc, 0.5).unwrap();
    let err = (sol.coefficients.last().unwrap() - &exact).amax();
    println!("linearized: {err:e}");
    assert!(err < 1e-8);
}
