use std::fs::File;
use std::io::{BufReader, BufWriter, Write};

use rand::rngs::StdRng;
use rand::SeedableRng;
use torus_ns::eigenbasis::{build_basis, gram_defect, BasisKind};
use torus_ns::estimates::{energy_certificate, perov_bound, PerovInput};
use torus_ns::galerkin::{energy_defect, recover_pressures, residual, solve_navier_stokes, SolverConfig, ZeroForcing};
use torus_ns::helmholtz::leray_project;
use torus_ns::io::{read_basis, write_basis};
use torus_ns::problems::{shear_decay_exact, shear_mode, shear_rate};
use torus_ns::sample::{random_solenoidal, random_vector};
use torus_ns::spectral::{
    base_wavenumber, convect, div, grad, gradient_norm, hs_norm, inner_l2, l2_norm_exact, laplacian, rot, VectorField,
};

use crate::error::{CliError, Result};
use crate::options::Settings;

struct Check {
    name: &'static str,
    pass: bool,
    detail: String,
}

fn rel(defect: &VectorField, reference: &VectorField) -> f64 {
    defect.max_abs_coeff() / reference.max_abs_coeff().max(f64::MIN_POSITIVE)
}

fn de_rham(ell: f64, m: u32) -> Check {
    let mut r = StdRng::seed_from_u64(1);
    let mut worst: f64 = 0.0;
    for _ in 0..20 {
        let u = random_vector(&mut r, ell, m, 1.0);
        let g = grad(u.component(0));
        worst = worst.max(rel(&rot(&g), &g));
        let ru = rot(&u);
        worst = worst.max(div(&ru).max_abs_coeff() / ru.max_abs_coeff());
        let lap = laplacian(&u);
        let hodge = &grad(&div(&u)) - &rot(&ru);
        worst = worst.max(rel(&(&hodge - &lap), &lap));
    }
    Check { name: "de Rham identities", pass: worst <= 1e-13, detail: format!("{worst:.1e}") }
}

fn projection(ell: f64, m: u32) -> Result<Check> {
    let mut r = StdRng::seed_from_u64(2);
    let mut worst: f64 = 0.0;
    for _ in 0..20 {
        let u = random_vector(&mut r, ell, m, 1.0);
        let v = random_vector(&mut r, ell, m, 1.0);
        let pu = leray_project(&u);
        let (nu, nv) = (l2_norm_exact(&u), l2_norm_exact(&v));
        worst = worst.max(l2_norm_exact(&(&leray_project(&pu) - &pu)) / nu);
        worst = worst.max((inner_l2(&pu, &v)? - inner_l2(&u, &leray_project(&v))?).abs() / (nu * nv));
        worst = worst.max(l2_norm_exact(&div(&pu)) / gradient_norm(&u, 1).max(f64::MIN_POSITIVE));
    }
    Ok(Check { name: "Helmholtz projection", pass: worst <= 1e-13, detail: format!("{worst:.1e}") })
}

/// Gram matrix and eigen-relations of `(kind, shell, field)` triples.
fn basis_checks(fields: &[(BasisKind, u32, VectorField)], gram_name: &'static str) -> Result<[Check; 2]> {
    let plain: Vec<VectorField> = fields.iter().map(|(_, _, f)| f.clone()).collect();
    let gram = gram_defect(&plain)?;
    let mut eig: f64 = 0.0;
    for (kind, m, v) in fields {
        let kappa2 = base_wavenumber(v.ell()).powi(2);
        let lambda = *m as f64 * kappa2;
        let defect = match kind {
            BasisKind::Constant => rel(&rot(v), v) + div(v).max_abs_coeff() / v.max_abs_coeff(),
            BasisKind::Solenoidal => rel(&(&rot(&rot(v)) - &v.scaled(lambda)), &v.scaled(lambda)),
            BasisKind::Gradient => rel(&(&grad(&div(v)) + &v.scaled(lambda)), &v.scaled(lambda)),
        };
        eig = eig.max(defect);
    }
    Ok([
        Check { name: gram_name, pass: gram <= 1e-12, detail: format!("{gram:.1e}") },
        Check { name: "basis eigen-relations", pass: eig <= 1e-11, detail: format!("{eig:.1e}") },
    ])
}

fn skew(ell: f64, m: u32) -> Result<Check> {
    let mut r = StdRng::seed_from_u64(4);
    let mut worst: f64 = 0.0;
    for _ in 0..20 {
        let w = random_solenoidal(&mut r, ell, m, 1.0);
        let u = random_solenoidal(&mut r, ell, m, 1.0);
        let scale = hs_norm(&w, 2.0) * hs_norm(&u, 1.0).powi(2);
        if scale > 0.0 {
            worst = worst.max(inner_l2(&convect(&w, &u)?, &u)?.abs() / scale);
        }
    }
    Ok(Check { name: "skew-symmetry", pass: worst <= 1e-10, detail: format!("{worst:.1e}") })
}

fn shear(ell: f64, m: u32) -> Result<Vec<Check>> {
    let (mu, horizon) = (0.1, 0.5);
    let zero = ZeroForcing { ell, cutoff: m };
    let u0 = shear_mode(ell, m, 1.0);
    let traj = solve_navier_stokes(&zero, &u0, &SolverConfig::new(mu, horizon, m, 1e-3))?;
    let error = l2_norm_exact(&(traj.last() - &shear_decay_exact(ell, m, 1.0, mu, horizon)));
    let p = recover_pressures(&traj, &zero)?;
    let res = residual(&traj, &p, &zero, mu)?.into_iter().fold(0.0, f64::max);
    let defect = energy_defect(&traj, &zero, mu)?.into_iter().fold(0.0, |a: f64, x| a.max(x.abs()));
    let cert = energy_certificate(&traj, &zero, &u0, mu, None)?;
    let expected = 1.0 + (1.0 - (-2.0 * shear_rate(ell, mu) * horizon).exp()) / 2.0;
    let ratio_err = (cert.ratio - expected).abs();
    Ok(vec![
        Check {
            name: "exact shear decay",
            pass: error <= 1e-6 && res <= 1e-8,
            detail: format!("error {error:.1e}, residual {res:.1e}"),
        },
        Check { name: "energy identity", pass: defect <= 1e-6, detail: format!("{defect:.1e}") },
        Check {
            name: "energy certificate",
            pass: cert.pass && ratio_err <= 1e-4,
            detail: format!("ratio {:.6}, expected {expected:.6}", cert.ratio),
        },
    ])
}

fn perov() -> Result<Check> {
    let grid: Vec<f64> = (0..=100).map(|i| i as f64 / 100.0).collect();
    let n = grid.len();
    let exp = perov_bound(&PerovInput { a: 1.5, gamma: 1.0, times: grid.clone(), b: vec![0.8; n], c: vec![0.0; n] })?;
    let quad = perov_bound(&PerovInput { a: 1.0, gamma: 0.5, times: grid.clone(), b: vec![0.0; n], c: vec![1.0; n] })?;
    let mut worst: f64 = 0.0;
    for (i, t) in grid.iter().enumerate() {
        let a = 1.5 * (0.8 * t).exp();
        let b = (1.0 + t / 2.0).powi(2);
        worst = worst.max((exp[i] - a).abs() / a).max((quad[i] - b).abs() / b);
    }
    Ok(Check { name: "Perov closed forms", pass: worst <= 1e-10, detail: format!("{worst:.1e}") })
}

pub fn run(s: &Settings) -> Result<()> {
    let (ell, m) = (s.ell, s.cutoff);
    if m == 0 {
        return Err(CliError::Config("selftest needs a cutoff M >= 1".into()));
    }
    let basis = build_basis(ell, m);
    if let Some(path) = &s.dump_basis {
        let io = |source| CliError::Io { path: path.display().to_string(), source };
        let mut w = BufWriter::new(File::create(path).map_err(io)?);
        write_basis(&mut w, &basis)?;
        w.flush().map_err(io)?;
    }
    let mut checks = vec![de_rham(ell, m), projection(ell, m)?];
    let built: Vec<_> = basis.all_elements().map(|e| (e.kind, e.m, e.to_field(ell, m))).collect();
    checks.extend(basis_checks(&built, "basis Gram")?);
    if let Some(path) = &s.basis {
        let file = File::open(path).map_err(|source| CliError::Io { path: path.display().to_string(), source })?;
        let records = read_basis(BufReader::new(file))?;
        let loaded: Vec<_> = records.into_iter().map(|r| (r.kind, r.m, r.field)).collect();
        let [gram, eig] = basis_checks(&loaded, "basis Gram (file)")?;
        checks.push(gram);
        checks.push(Check { name: "basis eigen-relations (file)", ..eig });
    }
    checks.push(skew(ell, m)?);
    checks.extend(shear(ell, m)?);
    checks.push(perov()?);

    println!("selftest at M = {m}, ell = {ell}");
    let width = checks.iter().map(|c| c.name.len()).max().unwrap_or(0);
    for c in &checks {
        println!("  {:<width$}  {}  {}", c.name, if c.pass { "PASS" } else { "FAIL" }, c.detail);
    }
    let failed: Vec<&str> = checks.iter().filter(|c| !c.pass).map(|c| c.name).collect();
    if failed.is_empty() {
        println!("all {} checks passed", checks.len());
        Ok(())
    } else {
        Err(CliError::Invariant(format!("failed checks: {}", failed.join(", "))))
    }
}
