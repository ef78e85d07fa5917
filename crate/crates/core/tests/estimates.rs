use std::f64::consts::PI;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use torus_ns::estimates::{
    bochner_scale_norm, energy_certificate, gn_report, lps_norm, nonlinear_term_bound_report, perov_bound,
    time_jets, time_lp_of_l2, Evolution, GnExponents, PerovInput,
};
use torus_ns::galerkin::{solve_navier_stokes, FieldTrajectory, ForcingFn, SolverConfig, ZeroForcing};
use torus_ns::helmholtz::leray_project;
use torus_ns::problems::{shear_mode, shear_rate, taylor_green, temporal_manufactured};
use torus_ns::sample::{random_solenoidal, random_vector};
use torus_ns::spectral::{base_wavenumber, l2_norm_exact, VectorField};
use torus_ns::TorusError;

const ELL: f64 = 2.0 * PI;

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn shear_run(mu: f64, a: f64) -> FieldTrajectory {
    let cfg = SolverConfig::new(mu, 1.0, 4, 1e-3);
    solve_navier_stokes(&ZeroForcing { ell: ELL, cutoff: 4 }, &shear_mode(ELL, 4, a), &cfg).unwrap()
}

#[test]
fn perov_half_power_matches_ode() {
    let grid: Vec<f64> = (0..=400).map(|i| 2.0 * i as f64 / 400.0).collect();
    let n = grid.len();
    let bound = perov_bound(&PerovInput { a: 1.0, gamma: 0.5, times: grid.clone(), b: vec![0.0; n], c: vec![1.0; n] })
        .unwrap();
    let mut y: f64 = 1.0;
    let rate = |y: f64| y.sqrt();
    let substeps = 50;
    for (i, w) in grid.windows(2).enumerate() {
        let h = (w[1] - w[0]) / substeps as f64;
        for _ in 0..substeps {
            let k1 = rate(y);
            let k2 = rate(y + h / 2.0 * k1);
            let k3 = rate(y + h / 2.0 * k2);
            let k4 = rate(y + h * k3);
            y += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        }
        assert!((y - bound[i + 1]).abs() <= 1e-6, "t = {}: {y} vs {}", w[1], bound[i + 1]);
        assert!(y <= bound[i + 1] + 1e-12);
    }
}

#[test]
fn perov_rejects_negative_samples() {
    let input = PerovInput { a: -1.0, gamma: 1.0, times: vec![0.0, 1.0], b: vec![0.0; 2], c: vec![0.0; 2] };
    assert!(matches!(perov_bound(&input), Err(TorusError::NegativeSample { what: "A", .. })));
}

#[test]
fn time_lebesgue_norms_bounded_by_sup() {
    let traj = shear_run(0.1, 1.3);
    let sup = time_lp_of_l2(&traj, f64::INFINITY).unwrap();
    for p in [1.0, 2.0, 4.0] {
        let v = time_lp_of_l2(&traj, p).unwrap();
        assert!(v <= traj.horizon().powf(1.0 / p) * sup + 1e-9);
    }
    let mut r = rng(5);
    let times: Vec<f64> = (0..=20).map(|i| 0.5 * i as f64 / 20.0).collect();
    let fields: Vec<VectorField> = times.iter().map(|_| random_solenoidal(&mut r, 1.5, 4, 1.0)).collect();
    let traj = FieldTrajectory::new(times, fields).unwrap();
    let sup = time_lp_of_l2(&traj, f64::INFINITY).unwrap();
    for p in [1.0, 2.0, 4.0] {
        assert!(time_lp_of_l2(&traj, p).unwrap() <= 0.5f64.powf(1.0 / p) * sup + 1e-9);
    }
}

#[test]
fn certificate_ignores_gradient_forcing() {
    let mut r = rng(6);
    let traj = shear_run(0.2, 0.8);
    let g = random_vector(&mut r, ELL, 4, 1.0);
    let pg = leray_project(&g);
    let (g2, pg2) = (g.clone(), pg.clone());
    let a = energy_certificate(&traj, &ForcingFn(move |_| g2.clone()), traj.initial(), 0.2, None).unwrap();
    let b = energy_certificate(&traj, &ForcingFn(move |_| pg2.clone()), traj.initial(), 0.2, None).unwrap();
    assert!((a.rhs_squared - b.rhs_squared).abs() <= 1e-12 * a.rhs_squared);
}

#[test]
fn certificate_passes_on_converged_runs() {
    let mu = 0.05;
    let tg = taylor_green(ELL, 4, 1.0).unwrap();
    let zero = ZeroForcing { ell: ELL, cutoff: 4 };
    let traj = solve_navier_stokes(&zero, &tg, &SolverConfig::new(mu, 1.0, 4, 2e-3)).unwrap();
    let c = energy_certificate(&traj, &zero, &tg, mu, None).unwrap();
    assert!(c.pass && c.ratio <= 1.5, "{c:?}");

    let problem = temporal_manufactured(ELL, 0.1, 3.0).unwrap();
    let f = problem.forcing(4);
    let traj = solve_navier_stokes(&f, &problem.velocity(0.0), &SolverConfig::new(0.1, 1.0, 4, 2e-3)).unwrap();
    let c = energy_certificate(&traj, &f, traj.initial(), 0.1, None).unwrap();
    assert!(c.pass, "{c:?}");
}

#[test]
fn lps_monotone_and_homogeneous() {
    let traj = shear_run(0.1, 1.0);
    let half = FieldTrajectory::new(traj.times[..=500].to_vec(), traj.fields[..=500].to_vec()).unwrap();
    let full = lps_norm(&traj, 4.0, 6.0, 16).unwrap().value;
    assert!(lps_norm(&half, 4.0, 6.0, 16).unwrap().value <= full);
    let scaled = FieldTrajectory::new(traj.times.clone(), traj.fields.iter().map(|u| u.scaled(-2.5)).collect()).unwrap();
    let v = lps_norm(&scaled, 4.0, 6.0, 16).unwrap().value;
    assert!((v - 2.5 * full).abs() <= 1e-12 * v);
}

#[test]
fn bochner_shear_closed_form() {
    let (mu, a) = (0.1, 1.0);
    let traj = shear_run(mu, a);
    let kappa = base_wavenumber(ELL);
    let lambda = shear_rate(ELL, mu);
    let energy = a * a * ELL.powi(3) / 2.0;
    let seminorm = energy * (1.0 + (1.0 - (-2.0 * lambda).exp()) / 2.0);
    let exact = (seminorm * (1.0 + kappa.powi(2) + kappa.powi(4) + lambda.powi(2))).sqrt();
    let got = bochner_scale_norm(&traj, 0, 1, mu, None).unwrap().value;
    assert!((got - exact).abs() <= 1e-6 * exact, "{got} vs {exact}");

    let zero = ZeroForcing { ell: ELL, cutoff: 4 };
    let cert = energy_certificate(&traj, &zero, traj.initial(), mu, None).unwrap();
    let b00 = bochner_scale_norm(&traj, 0, 0, mu, None).unwrap().value;
    assert!((b00 - cert.lhs_squared.sqrt()).abs() <= 1e-12 * b00);
}

#[test]
fn bochner_nested_sums_are_monotone() {
    let tg = taylor_green(ELL, 4, 1.0).unwrap();
    let zero = ZeroForcing { ell: ELL, cutoff: 4 };
    let traj = solve_navier_stokes(&zero, &tg, &SolverConfig::new(0.1, 0.5, 4, 5e-3)).unwrap();
    let evo = Evolution { mu: 0.1, forcing: &zero };
    let b = |k, s| bochner_scale_norm(&traj, k, s, 0.1, Some(&evo)).unwrap().value;
    let table = [[b(0, 0), b(0, 1), b(0, 2)], [b(1, 0), b(1, 1), b(1, 2)], [b(2, 0), b(2, 1), b(2, 2)]];
    for k in 0..3 {
        for s in 0..3 {
            if k > 0 {
                assert!(table[k][s] >= table[k - 1][s]);
            }
            if s > 0 {
                assert!(table[k][s] >= table[k][s - 1]);
            }
        }
    }
    let empty = FieldTrajectory::constant(VectorField::zeros(ELL, 4), 1.0);
    assert_eq!(bochner_scale_norm(&empty, 2, 1, 0.1, Some(&evo)).unwrap().value, 0.0);
}

#[test]
fn time_jets_match_manufactured_derivatives() {
    let problem = temporal_manufactured(ELL, 0.1, 3.0).unwrap();
    let f = problem.forcing(4);
    let times = vec![0.0, 0.3, 0.7];
    let fields: Vec<VectorField> = times.iter().map(|&t| problem.velocity(t).with_cutoff(4)).collect();
    let traj = FieldTrajectory::new(times.clone(), fields).unwrap();
    let evo = Evolution { mu: 0.1, forcing: &f };
    let jets = time_jets(&traj, 3, Some(&evo)).unwrap();
    for order in 1..=3 {
        for (i, &t) in times.iter().enumerate() {
            let exact = problem.velocity_derivative(t, order).with_cutoff(4);
            let err = l2_norm_exact(&(&jets[order as usize][i] - &exact));
            assert!(err <= 1e-10 * l2_norm_exact(&exact).max(1.0), "order {order} t {t}: {err:e}");
        }
    }
}

#[test]
fn gagliardo_nirenberg_scan() {
    let e = GnExponents { j0: 0, k0: 1, p0: 3.0, q0: 2.0, r0: 2.0, s0: 2.0, a: 0.5 };
    e.check().unwrap();
    let mut r = rng(8);
    let mut worst: f64 = 0.0;
    for _ in 0..100 {
        let u = random_solenoidal(&mut r, ELL, 6, 2.0);
        let rep = gn_report(&u, &e, 1.0, 1.0, 16).unwrap();
        assert!(rep.ratio.is_finite() && rep.rhs > 0.0);
        worst = worst.max(rep.ratio);
    }
    println!("largest GN ratio over 100 fields with c1 = c2 = 1: {worst:.4}");
    let bad = GnExponents { j0: 1, k0: 2, p0: 2.0, q0: 2.0, r0: 2.0, s0: 2.0, a: 0.25 };
    assert!(matches!(gn_report(&VectorField::zeros(ELL, 2), &bad, 1.0, 1.0, 8), Err(TorusError::InadmissibleExponents(_))));
    let grad = GnExponents { j0: 1, k0: 2, p0: 2.0, q0: 2.0, r0: 2.0, s0: 2.0, a: 0.5 };
    let c = VectorField::constant(ELL, 2, [1.0, 2.0, 0.5]);
    assert_eq!(gn_report(&c, &grad, 1.0, 1.0, 8).unwrap().ratio, 0.0);
}

#[test]
fn nonlinear_bound_constant_is_stable() {
    let (k, s, r, eps) = (1, 4.0, 6.0, 0.1);
    let c = VectorField::constant(ELL, 4, [1.0, -1.0, 0.3]);
    assert_eq!(nonlinear_term_bound_report(&c, k, s, r, eps, 16).unwrap().lhs, 0.0);
    assert!(nonlinear_term_bound_report(&shear_mode(ELL, 4, 2.0), k, s, r, eps, 16).unwrap().lhs < 1e-20);

    let mut rng = rng(9);
    let fitted: Vec<f64> = (0..50)
        .map(|_| {
            let u = random_solenoidal(&mut rng, ELL, 4, 2.0);
            let u = u.scaled(ELL.powf(1.5) / l2_norm_exact(&u));
            nonlinear_term_bound_report(&u, k, s, r, eps, 16).unwrap().fitted_constant()
        })
        .collect();
    let running = |n: usize| fitted[..n].iter().copied().fold(0.0, f64::max);
    let (first, all) = (running(25), running(50));
    println!("fitted constant: 25 fields {first:.4e}, 50 fields {all:.4e}");
    assert!(all > 0.0 && (all - first).abs() <= 0.2 * all);
}
