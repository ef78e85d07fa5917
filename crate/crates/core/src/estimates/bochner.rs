use serde::Serialize;

use crate::error::{Result, TorusError};
use crate::galerkin::{cumulative_trapezoid, FieldTrajectory, ZeroForcing};
use crate::helmholtz::leray_project;
use crate::spectral::{base_wavenumber, convect, laplacian, VectorField, WaveVector};

/// Time derivatives `∂_t^n f(t)` of an exterior force, `n = 0` being `f` itself.
pub trait ForcingJet: Sync {
    fn time_derivative(&self, t: f64, order: u32) -> Result<VectorField>;
}

impl ForcingJet for ZeroForcing {
    fn time_derivative(&self, _t: f64, _order: u32) -> Result<VectorField> {
        Ok(VectorField::zeros(self.ell, self.cutoff))
    }
}

/// What is needed to differentiate `∂_t u = μΔu + P(f - 𝐃u)` in time.
pub struct Evolution<'a> {
    pub mu: f64,
    pub forcing: &'a dyn ForcingJet,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BochnerScaleNorm {
    pub k: u32,
    pub s: u32,
    pub value: f64,
}

/// Multi-indices `α ∈ ℕ³` with `|α| = order`.
pub fn multi_indices(order: u32) -> Vec<[u32; 3]> {
    let mut out = Vec::new();
    for a in 0..=order {
        for b in 0..=order - a {
            out.push([a, b, order - a - b]);
        }
    }
    out
}

/// `Σ_{|α| <= order} Π_l (κ k_l)^{2α_l}`, the symbol of `Σ_α ‖∂^α ·‖²`.
fn multi_index_weight(k: WaveVector, kappa: f64, order: u32) -> f64 {
    let q = k.0.map(|c| (kappa * c as f64).powi(2));
    (0..=order)
        .flat_map(multi_indices)
        .map(|a| q[0].powi(a[0] as i32) * q[1].powi(a[1] as i32) * q[2].powi(a[2] as i32))
        .sum()
}

fn binomial(n: u32, k: u32) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// `∂_t^{n+1} u = μΔ∂_t^n u + P(∂_t^n f - Σ_l C(n,l) (∂_t^l u · ∇) ∂_t^{n-l} u)`.
fn next_derivative(jet: &[VectorField], t: f64, evo: &Evolution<'_>) -> Result<VectorField> {
    let n = (jet.len() - 1) as u32;
    let u = &jet[0];
    let mut g = evo.forcing.time_derivative(t, n)?;
    if g.ell() != u.ell() {
        return Err(TorusError::IncompatibleDomains { left: g.ell(), right: u.ell() });
    }
    g = g.with_cutoff(u.cutoff());
    for l in 0..=n {
        g.axpy(-binomial(n, l), &convect(&jet[l as usize], &jet[(n - l) as usize])?);
    }
    let mut out = leray_project(&g);
    out.axpy(evo.mu, &laplacian(&jet[n as usize]));
    Ok(out)
}

/// `∂_t^j u(t_i)` for `j <= order`, indexed `[j][i]`.
///
/// The first derivative is the stored rate when present; higher ones differentiate the
/// evolution equation and need `evolution`.
pub fn time_jets(traj: &FieldTrajectory, order: u32, evolution: Option<&Evolution<'_>>) -> Result<Vec<Vec<VectorField>>> {
    let mut out = vec![traj.fields.clone()];
    if order == 0 {
        return Ok(out);
    }
    let first = match (&traj.rhs, evolution) {
        (Some(rhs), _) => rhs.clone(),
        (None, Some(evo)) => traj
            .times
            .iter()
            .zip(&traj.fields)
            .map(|(&t, u)| next_derivative(std::slice::from_ref(u), t, evo))
            .collect::<Result<Vec<_>>>()?,
        (None, None) => traj.time_derivatives()?,
    };
    out.push(first);
    if order == 1 {
        return Ok(out);
    }
    let evo = evolution.ok_or_else(|| {
        TorusError::MissingDerivativeData(format!(
            "time derivatives of order {order} need the evolution data (viscosity and forcing jet)"
        ))
    })?;
    for _ in 2..=order {
        let next = (0..traj.len())
            .map(|i| {
                let jet: Vec<VectorField> = out.iter().map(|d| d[i].clone()).collect();
                next_derivative(&jet, traj.times[i], evo)
            })
            .collect::<Result<Vec<_>>>()?;
        out.push(next);
    }
    Ok(out)
}

/// `sup_t ‖∇^i v‖² + μ ∫ ‖∇^{i+1} v‖²` summed over the multi-indices `|α| <= order` of `∂^α v`.
fn seminorms_squared(times: &[f64], samples: &[VectorField], i: u32, order: u32, mu: f64) -> f64 {
    let ell = samples[0].ell();
    let kappa = base_wavenumber(ell);
    let ell3 = ell.powi(3);
    let energy = |v: &VectorField, p: u32| {
        ell3 * v.weighted_energy(|k| {
            (kappa * kappa * k.shell() as f64).powi(p as i32) * multi_index_weight(k, kappa, order)
        })
    };
    let sup = samples.iter().map(|v| energy(v, i)).fold(0.0, f64::max);
    let next: Vec<f64> = samples.iter().map(|v| energy(v, i + 1)).collect();
    sup + mu * cumulative_trapezoid(times, &next).last().unwrap()
}

/// `(Σ_{i <= k} Σ_{|α| + 2j <= 2s} ‖∂_x^α ∂_t^j u‖²_{i,μ,T})^{1/2}`.
pub fn bochner_scale_norm(
    traj: &FieldTrajectory,
    k: u32,
    s: u32,
    mu: f64,
    evolution: Option<&Evolution<'_>>,
) -> Result<BochnerScaleNorm> {
    if !(mu > 0.0) {
        return Err(TorusError::InvalidInput(format!("viscosity must be positive, got {mu}")));
    }
    let jets = time_jets(traj, s, evolution)?;
    let mut total = 0.0;
    for (j, samples) in jets.iter().enumerate() {
        let order = 2 * (s - j as u32);
        for i in 0..=k {
            total += seminorms_squared(&traj.times, samples, i, order, mu);
        }
    }
    Ok(BochnerScaleNorm { k, s, value: total.sqrt() })
}
