use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use log::info;
use nalgebra::DVector;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};
use torus_ns::eigenbasis::build_basis;
use torus_ns::estimates::{
    bochner_scale_norm, energy_certificate, lps_norm, BochnerScaleNorm, EnergyCertificate, Evolution, ForcingJet,
    LpsReport,
};
use torus_ns::galerkin::{
    assemble_linearized, solve_linearized, solve_navier_stokes, FieldTrajectory, Forcing, Scheme, ZeroForcing,
};
use torus_ns::io::{norm_series, read_field, read_trajectory, write_norm_csv, write_trajectory};
use torus_ns::problems::{shear_decay_exact, shear_mode, taylor_green, temporal_manufactured};
use torus_ns::spectral::{l2_norm_exact, VectorField};

use crate::error::{CliError, Result};
use crate::options::Settings;

/// Time-independent forcing read from a field file.
pub struct ConstantForcing(pub VectorField);

impl Forcing for ConstantForcing {
    fn eval(&self, _t: f64) -> torus_ns::Result<VectorField> {
        Ok(self.0.clone())
    }
}

impl ForcingJet for ConstantForcing {
    fn time_derivative(&self, _t: f64, order: u32) -> torus_ns::Result<VectorField> {
        Ok(if order == 0 { self.0.clone() } else { VectorField::zeros(self.0.ell(), self.0.cutoff()) })
    }
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> CliError + '_ {
    move |source| CliError::Io { path: path.display().to_string(), source }
}

fn open(path: &Path) -> Result<BufReader<File>> {
    Ok(BufReader::new(File::open(path).map_err(io_err(path))?))
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    Ok(BufWriter::new(File::create(path).map_err(io_err(path))?))
}

fn load_field(path: &Path, s: &Settings) -> Result<VectorField> {
    let u = read_field(open(path)?)?;
    if u.ell() != s.ell {
        return Err(CliError::Config(format!("{} has period {}, run uses {}", path.display(), u.ell(), s.ell)));
    }
    Ok(u.with_cutoff(s.cutoff))
}

fn load_forcing(s: &Settings) -> Result<ConstantForcing> {
    Ok(ConstantForcing(match &s.f {
        Some(p) => load_field(p, s)?,
        None => VectorField::zeros(s.ell, s.cutoff),
    }))
}

/// A field file (`TORUSFIELD`) becomes a constant trajectory over the horizon.
fn load_drift(path: &Path, s: &Settings) -> Result<FieldTrajectory> {
    let text = crate::options::read_text(path)?;
    if text.trim_start().starts_with("TRAJ") {
        Ok(read_trajectory(text.as_bytes())?)
    } else {
        let w = read_field(text.as_bytes())?;
        Ok(FieldTrajectory::constant(w, s.horizon))
    }
}

#[derive(Serialize)]
struct Norms {
    final_l2: f64,
    max_l2: f64,
    max_linf: f64,
    max_div: f64,
}

#[derive(Serialize)]
struct Report {
    problem: String,
    mu: f64,
    horizon: f64,
    cutoff: u32,
    ell: f64,
    samples: usize,
    lhs2: f64,
    rhs2: f64,
    factor: f64,
    ratio: f64,
    pass: bool,
    strict_pass: bool,
    lps: Vec<LpsReport>,
    bochner: Vec<BochnerScaleNorm>,
    norms: Norms,
    diagnostics: Value,
}

pub struct Subject<'a> {
    pub name: &'a str,
    pub traj: &'a FieldTrajectory,
    pub forcing: &'a dyn Forcing,
    pub jet: Option<&'a dyn ForcingJet>,
    pub u0: &'a VectorField,
    pub drift: Option<&'a FieldTrajectory>,
    pub write_traj: bool,
}

fn out_path(s: &Settings, file: String) -> Result<PathBuf> {
    std::fs::create_dir_all(&s.out_dir).map_err(io_err(&s.out_dir))?;
    Ok(s.out_dir.join(file))
}

/// Writes the trajectory, the norm CSV and the certificate JSON; returns the certificate.
fn report(s: &Settings, subject: Subject<'_>, diagnostics: Value) -> Result<EnergyCertificate> {
    let traj = subject.traj;
    let n = s.norm_grid();
    let cert = energy_certificate(traj, subject.forcing, subject.u0, s.mu, subject.drift)?;
    let lps = s.lps.iter().map(|&(a, b)| lps_norm(traj, a, b, n)).collect::<torus_ns::Result<Vec<_>>>()?;
    let evolution = subject.jet.map(|forcing| Evolution { mu: s.mu, forcing });
    let bochner = s
        .bochner
        .iter()
        .map(|&(k, j)| bochner_scale_norm(traj, k, j, s.mu, evolution.as_ref()))
        .collect::<torus_ns::Result<Vec<_>>>()?;
    let rows = norm_series(traj, s.lps.first().copied(), n)?;

    if subject.write_traj {
        let path = out_path(s, format!("{}.traj", subject.name))?;
        let mut w = create(&path)?;
        write_trajectory(&mut w, traj)?;
        w.flush().map_err(io_err(&path))?;
    }
    let path = out_path(s, format!("{}_norms.csv", subject.name))?;
    let mut w = create(&path)?;
    write_norm_csv(&mut w, &rows)?;
    w.flush().map_err(io_err(&path))?;

    let max = |f: fn(&torus_ns::io::NormRow) -> f64| rows.iter().map(f).fold(0.0, f64::max);
    let rep = Report {
        problem: subject.name.to_string(),
        mu: s.mu,
        horizon: traj.horizon(),
        cutoff: traj.cutoff(),
        ell: traj.ell(),
        samples: traj.len(),
        lhs2: cert.lhs_squared,
        rhs2: cert.rhs_squared,
        factor: cert.factor,
        ratio: cert.ratio,
        pass: cert.pass,
        strict_pass: cert.strict_pass,
        lps,
        bochner,
        norms: Norms {
            final_l2: rows.last().map(|r| r.l2).unwrap_or(0.0),
            max_l2: max(|r| r.l2),
            max_linf: max(|r| r.linf),
            max_div: max(|r| r.div),
        },
        diagnostics,
    };
    let path = out_path(s, format!("{}_certificate.json", subject.name))?;
    let mut w = create(&path)?;
    serde_json::to_writer_pretty(&mut w, &rep).map_err(|e| CliError::Io { path: path.display().to_string(), source: e.into() })?;
    writeln!(w).map_err(io_err(&path))?;
    w.flush().map_err(io_err(&path))?;
    println!(
        "{}: lhs2 {:.6e} rhs2 {:.6e} ratio {:.6} factor {:.6} pass {}",
        subject.name, cert.lhs_squared, cert.rhs_squared, cert.ratio, cert.factor, cert.pass
    );
    for l in &rep.lps {
        println!("  lps s={} r={} admissible {} value {:.6e}", l.s, l.r, l.admissible, l.value);
    }
    for b in &rep.bochner {
        println!("  bochner k={} s={} value {:.6e}", b.k, b.s, b.value);
    }
    Ok(cert)
}

fn require_pass(cert: &EnergyCertificate) -> Result<()> {
    if cert.pass {
        Ok(())
    } else {
        Err(CliError::Invariant(format!(
            "energy certificate fails: lhs2 {:e} > {} * rhs2 {:e}",
            cert.lhs_squared, cert.factor, cert.rhs_squared
        )))
    }
}

pub fn decay(s: &Settings) -> Result<()> {
    let u0 = shear_mode(s.ell, s.cutoff, s.amplitude);
    let zero = ZeroForcing { ell: s.ell, cutoff: s.cutoff };
    let traj = solve_navier_stokes(&zero, &u0, &s.solver_config()?)?;
    let exact = shear_decay_exact(s.ell, s.cutoff, s.amplitude, s.mu, traj.horizon());
    let error = l2_norm_exact(&(traj.last() - &exact));
    println!("decay: final L2 error vs closed form {error:.3e}");
    let diagnostics = json!({ "closed_form_error": error, "error_estimate": traj.error_estimate });
    let subject = Subject { name: "decay", traj: &traj, forcing: &zero, jet: Some(&zero), u0: &u0, drift: None, write_traj: true };
    require_pass(&report(s, subject, diagnostics)?)
}

pub fn taylor_green_run(s: &Settings) -> Result<()> {
    let u0 = taylor_green(s.ell, s.cutoff, s.amplitude).map_err(|e| CliError::Config(e.to_string()))?;
    let zero = ZeroForcing { ell: s.ell, cutoff: s.cutoff };
    let traj = solve_navier_stokes(&zero, &u0, &s.solver_config()?)?;
    let diagnostics = json!({ "error_estimate": traj.error_estimate });
    let subject =
        Subject { name: "taylor_green", traj: &traj, forcing: &zero, jet: Some(&zero), u0: &u0, drift: None, write_traj: true };
    require_pass(&report(s, subject, diagnostics)?)
}

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

fn order_threshold(scheme: Scheme) -> f64 {
    match scheme {
        Scheme::ImexEuler => 0.9,
        Scheme::IfRk4 => 3.5,
    }
}

pub fn manufactured(s: &Settings) -> Result<()> {
    let problem = temporal_manufactured(s.ell, s.mu, s.omega).map_err(|e| CliError::Config(e.to_string()))?;
    let forcing = problem.forcing(s.cutoff);
    let u0 = problem.velocity(0.0).with_cutoff(s.cutoff);
    let Some(levels) = s.dt_study else {
        let traj = solve_navier_stokes(&forcing, &u0, &s.solver_config()?)?;
        let error = max_error(&traj, |t| problem.velocity(t));
        println!("manufactured: max L2 error {error:.3e}");
        let diagnostics = json!({ "max_error": error, "error_estimate": traj.error_estimate });
        let subject = Subject {
            name: "manufactured",
            traj: &traj,
            forcing: &forcing,
            jet: Some(&forcing),
            u0: &u0,
            drift: None,
            write_traj: true,
        };
        return require_pass(&report(s, subject, diagnostics)?);
    };

    let dts: Vec<f64> = (0..levels).map(|i| s.dt / 2f64.powi(i as i32)).collect();
    let configs = dts.iter().map(|&dt| s.solver_config_with_dt(dt)).collect::<Result<Vec<_>>>()?;
    let study = || -> Result<Vec<f64>> {
        configs
            .par_iter()
            .map(|cfg| Ok(max_error(&solve_navier_stokes(&forcing, &u0, cfg)?, |t| problem.velocity(t))))
            .collect()
    };
    let errors = match s.jobs {
        Some(j) => rayon::ThreadPoolBuilder::new()
            .num_threads(j)
            .build()
            .map_err(|e| CliError::Config(e.to_string()))?
            .install(study)?,
        None => study()?,
    };
    let orders: Vec<f64> = errors.windows(2).map(|w| (w[0] / w[1]).log2()).collect();
    let path = out_path(s, "manufactured_convergence.csv".into())?;
    let mut w = create(&path)?;
    writeln!(w, "dt,error,order").map_err(io_err(&path))?;
    for (i, (dt, e)) in dts.iter().zip(&errors).enumerate() {
        let order = if i == 0 { String::new() } else { format!("{:.16e}", orders[i - 1]) };
        writeln!(w, "{dt:.16e},{e:.16e},{order}").map_err(io_err(&path))?;
    }
    w.flush().map_err(io_err(&path))?;
    let min = orders.iter().copied().fold(f64::INFINITY, f64::min);
    let fmt = |v: &[f64], f: fn(&f64) -> String| v.iter().map(f).collect::<Vec<_>>().join(", ");
    println!(
        "manufactured {}: errors [{}] observed orders [{}]",
        s.scheme,
        fmt(&errors, |e| format!("{e:.3e}")),
        fmt(&orders, |o| format!("{o:.3}"))
    );
    let threshold = order_threshold(s.scheme);
    if min < threshold {
        return Err(CliError::Invariant(format!("observed order {min:.3} below {threshold} for {}", s.scheme)));
    }
    Ok(())
}

pub fn linearized(s: &Settings) -> Result<()> {
    let basis = build_basis(s.ell, s.cutoff);
    let drift = match &s.w {
        Some(p) => load_drift(p, s)?.with_cutoff(s.cutoff),
        None => {
            let w = if s.cutoff >= 3 {
                taylor_green(s.ell, s.cutoff, s.amplitude).map_err(|e| CliError::Config(e.to_string()))?
            } else {
                shear_mode(s.ell, s.cutoff, s.amplitude)
            };
            FieldTrajectory::constant(w, s.horizon)
        }
    };
    let u0 = match &s.u0 {
        Some(p) => load_field(p, s)?,
        None => shear_mode(s.ell, s.cutoff, 1.0),
    };
    let forcing = load_forcing(s)?;
    let op = assemble_linearized(&drift, &basis, s.mu)?;
    info!("linearised operator of dimension {}, by-parts defect {:e}", op.dim(), op.by_parts_defect);
    let sol = solve_linearized(&op, &basis, &forcing, &u0, &s.solver_config()?)?;
    let exponential_error = if op.is_autonomous() {
        let c0 = DVector::from_vec(basis.solenoidal_coordinates(&u0));
        let fc = DVector::from_vec(basis.solenoidal_coordinates(&forcing.0));
        let exact = op.exponential_solution(&c0, &fc, sol.trajectory.horizon())?;
        let e = (sol.coefficients.last().unwrap() - exact).amax();
        println!("linearized: max coefficient difference vs matrix exponential {e:.3e}");
        Some(e)
    } else {
        None
    };
    let diagnostics = json!({
        "dimension": op.dim(),
        "by_parts_defect": op.by_parts_defect,
        "autonomous": op.is_autonomous(),
        "exponential_error": exponential_error,
    });
    let subject = Subject {
        name: "linearized",
        traj: &sol.trajectory,
        forcing: &forcing,
        jet: None,
        u0: &u0,
        drift: Some(&drift),
        write_traj: true,
    };
    require_pass(&report(s, subject, diagnostics)?)
}

pub fn certify(s: &Settings) -> Result<()> {
    let path = s.traj.as_ref().ok_or_else(|| CliError::Config("certify needs --traj".into()))?;
    let traj = read_trajectory(open(path)?)?;
    let s = &Settings { cutoff: traj.cutoff(), ell: traj.ell(), ..s.clone() };
    let forcing = load_forcing(s)?;
    let u0 = match &s.u0 {
        Some(p) => load_field(p, s)?,
        None => traj.initial().clone(),
    };
    let drift = s.w.as_ref().map(|p| load_drift(p, s)).transpose()?;
    let diagnostics = json!({ "source": path.display().to_string() });
    let subject = Subject {
        name: "certify",
        traj: &traj,
        forcing: &forcing,
        jet: Some(&forcing),
        u0: &u0,
        drift: drift.as_ref(),
        write_traj: false,
    };
    require_pass(&report(s, subject, diagnostics)?)
}
