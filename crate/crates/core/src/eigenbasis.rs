//! Laplacian eigen-shells on the torus and real orthonormal bases of their divergence-free
//! and curl-free parts.
//!
//! Every `±k` pair of a shell carries six real dimensions of vector fields: four
//! divergence-free fields `a cos(θ)`, `a sin(θ)` with `a ⊥ k`, and two curl-free fields
//! along `k/|k|`, where `θ = (k,x) 2π/ℓ`. Together with the three constant fields they form
//! an `L²(Q)`-orthonormal basis of the truncated space.

use num_complex::Complex64;

use crate::error::{Result, TorusError};
use crate::spectral::{bandwidth, inner_l2, VectorField, WaveVector};

/// All `k ∈ ℤ³` with `(k,k) = m`, sorted lexicographically.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Shell {
    pub m: u32,
    pub wave_vectors: Vec<WaveVector>,
}

impl Shell {
    /// Canonical representatives of the `±k` pairs, in lexicographic order.
    pub fn pairs(&self) -> impl Iterator<Item = WaveVector> + '_ {
        self.wave_vectors.iter().copied().filter(|k| k.is_canonical())
    }
}

/// Nonempty shells `1 <= m <= max_shell`, ascending.
pub fn enumerate_shells(max_shell: u32) -> Vec<Shell> {
    let kmax = bandwidth(max_shell);
    let mut by_shell: Vec<Vec<WaveVector>> = vec![Vec::new(); max_shell as usize + 1];
    for k1 in -kmax..=kmax {
        for k2 in -kmax..=kmax {
            for k3 in -kmax..=kmax {
                let k = WaveVector::new(k1, k2, k3);
                let m = k.shell();
                if m >= 1 && m <= max_shell {
                    by_shell[m as usize].push(k);
                }
            }
        }
    }
    by_shell
        .into_iter()
        .enumerate()
        .filter(|(_, v)| !v.is_empty())
        .map(|(m, wave_vectors)| Shell { m: m as u32, wave_vectors })
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BasisKind {
    Constant,
    Solenoidal,
    Gradient,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Phase {
    Cos,
    Sin,
}

/// One real basis field, stored as its coefficient `amplitude` at the mode `k`
/// (the `-k` coefficient is the conjugate).
#[derive(Clone, Debug, PartialEq)]
pub struct BasisElement {
    pub kind: BasisKind,
    /// Shell index `(k,k)`; zero for constants.
    pub m: u32,
    /// 1-based position within the shell, in construction order.
    pub j: usize,
    pub k: WaveVector,
    pub amplitude: [Complex64; 3],
}

impl BasisElement {
    pub fn to_field(&self, ell: f64, cutoff: u32) -> VectorField {
        let mut v = VectorField::zeros(ell, cutoff);
        v.set_coeff(self.k, self.amplitude).expect("basis mode within cutoff");
        v
    }

    /// `(u, self)_{L²(Q)}` evaluated from the two coefficients involved.
    pub fn inner(&self, u: &VectorField) -> f64 {
        let c = u.coeff(self.k);
        let s: f64 = c.iter().zip(&self.amplitude).map(|(x, a)| (x * a.conj()).re).sum();
        let ell3 = u.ell().powi(3);
        if self.k.is_zero() {
            ell3 * s
        } else {
            2.0 * ell3 * s
        }
    }

    /// Adds `coef * self` to `u` in place.
    pub fn accumulate(&self, coef: f64, u: &mut VectorField) {
        let c = u.coeff(self.k);
        let new = [
            c[0] + self.amplitude[0] * coef,
            c[1] + self.amplitude[1] * coef,
            c[2] + self.amplitude[2] * coef,
        ];
        u.set_coeff(self.k, new).expect("basis mode within cutoff");
    }
}

/// Orthonormal system `{e_i} ∪ {v_{m,j}} ∪ {w_{m,k}}` up to a shell cutoff.
#[derive(Clone, Debug)]
pub struct DivFreeBasis {
    pub ell: f64,
    pub cutoff: u32,
    /// `e_i / ℓ^{3/2}`, the normalised constant fields.
    pub constants: [BasisElement; 3],
    /// Divergence-free fields `v_{m,j}`.
    pub entries: Vec<BasisElement>,
    /// Curl-free fields `w_{m,k}`.
    pub gradient_entries: Vec<BasisElement>,
}

/// Coefficients of a field in a [`DivFreeBasis`].
#[derive(Clone, Debug, PartialEq)]
pub struct BasisCoefficients {
    /// Constants first, then the divergence-free entries, in basis order.
    pub solenoidal: Vec<f64>,
    pub gradient: Vec<f64>,
}

fn unit(v: [f64; 3]) -> [f64; 3] {
    let n = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
    [v[0] / n, v[1] / n, v[2] / n]
}

fn cross(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]]
}

/// Two orthonormal real vectors spanning `k^⊥`, seeded from the unit axis least aligned with `k`.
pub fn polarizations(k: WaveVector) -> [[f64; 3]; 2] {
    let kh = unit(k.as_f64());
    let axis = (0..3).min_by_key(|&i| k.0[i].abs()).expect("three axes");
    let mut seed = [0.0; 3];
    seed[axis] = 1.0;
    let proj = seed[0] * kh[0] + seed[1] * kh[1] + seed[2] * kh[2];
    let a1 = unit([seed[0] - proj * kh[0], seed[1] - proj * kh[1], seed[2] - proj * kh[2]]);
    let a2 = cross(kh, a1);
    [a1, a2]
}

fn phased(a: [f64; 3], phase: Phase, norm: f64) -> [Complex64; 3] {
    // cos θ = (e^{iθ} + e^{-iθ})/2, sin θ = (e^{iθ} - e^{-iθ})/(2i)
    let f = match phase {
        Phase::Cos => Complex64::new(norm / 2.0, 0.0),
        Phase::Sin => Complex64::new(0.0, -norm / 2.0),
    };
    a.map(|x| f * x)
}

/// Builds the basis for all shells `m <= cutoff`.
pub fn build_basis(ell: f64, cutoff: u32) -> DivFreeBasis {
    assert!(ell.is_finite() && ell > 0.0, "period must be positive");
    let ell3 = ell.powi(3);
    let cnorm = ell3.sqrt().recip();
    let constants = [0, 1, 2].map(|i| {
        let mut amp = [Complex64::new(0.0, 0.0); 3];
        amp[i] = Complex64::new(cnorm, 0.0);
        BasisElement { kind: BasisKind::Constant, m: 0, j: i + 1, k: WaveVector::ZERO, amplitude: amp }
    });
    let norm = (2.0 / ell3).sqrt();
    let mut entries = Vec::new();
    let mut gradient_entries = Vec::new();
    for shell in enumerate_shells(cutoff) {
        let (mut j, mut jg) = (0, 0);
        for k in shell.pairs() {
            for a in polarizations(k) {
                for phase in [Phase::Cos, Phase::Sin] {
                    j += 1;
                    entries.push(BasisElement {
                        kind: BasisKind::Solenoidal,
                        m: shell.m,
                        j,
                        k,
                        amplitude: phased(a, phase, norm),
                    });
                }
            }
            let kh = unit(k.as_f64());
            for phase in [Phase::Cos, Phase::Sin] {
                jg += 1;
                gradient_entries.push(BasisElement {
                    kind: BasisKind::Gradient,
                    m: shell.m,
                    j: jg,
                    k,
                    amplitude: phased(kh, phase, norm),
                });
            }
        }
    }
    DivFreeBasis { ell, cutoff, constants, entries, gradient_entries }
}

impl DivFreeBasis {
    /// The Galerkin index set: constants followed by the divergence-free entries.
    pub fn solenoidal_system(&self) -> impl Iterator<Item = &BasisElement> {
        self.constants.iter().chain(self.entries.iter())
    }

    pub fn dim(&self) -> usize {
        3 + self.entries.len()
    }

    /// Every element: constants, divergence-free entries, curl-free entries.
    pub fn all_elements(&self) -> impl Iterator<Item = &BasisElement> {
        self.solenoidal_system().chain(self.gradient_entries.iter())
    }

    pub fn fields(&self) -> Vec<VectorField> {
        self.all_elements().map(|e| e.to_field(self.ell, self.cutoff)).collect()
    }

    /// Shell index of each Galerkin coordinate (0 for the constants).
    pub fn shells(&self) -> Vec<u32> {
        self.solenoidal_system().map(|e| e.m).collect()
    }

    /// Coordinates of `u` in the basis.
    pub fn project_coefficients(&self, u: &VectorField) -> Result<BasisCoefficients> {
        if u.ell() != self.ell {
            return Err(TorusError::IncompatibleDomains { left: u.ell(), right: self.ell });
        }
        if u.cutoff() > self.cutoff {
            return Err(TorusError::CutoffMismatch { left: u.cutoff(), right: self.cutoff });
        }
        Ok(BasisCoefficients {
            solenoidal: self.solenoidal_system().map(|e| e.inner(u)).collect(),
            gradient: self.gradient_entries.iter().map(|e| e.inner(u)).collect(),
        })
    }

    /// Galerkin coordinates only (constants then `v_{m,j}`), for any field with matching period.
    pub fn solenoidal_coordinates(&self, u: &VectorField) -> Vec<f64> {
        self.solenoidal_system().map(|e| e.inner(u)).collect()
    }

    /// `Σ c · v` over the Galerkin index set.
    pub fn reconstruct(&self, coefficients: &[f64]) -> VectorField {
        let mut u = VectorField::zeros(self.ell, self.cutoff);
        for (e, &c) in self.solenoidal_system().zip(coefficients) {
            e.accumulate(c, &mut u);
        }
        u
    }

    pub fn reconstruct_all(&self, coefficients: &BasisCoefficients) -> VectorField {
        let mut u = self.reconstruct(&coefficients.solenoidal);
        for (e, &c) in self.gradient_entries.iter().zip(&coefficients.gradient) {
            e.accumulate(c, &mut u);
        }
        u
    }
}

/// Largest entry of `G - I` for the Gram matrix `G_ij = (f_i, f_j)_{L²}`.
pub fn gram_defect(fields: &[VectorField]) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for (i, a) in fields.iter().enumerate() {
        for (j, b) in fields.iter().enumerate().skip(i) {
            let g = inner_l2(a, b)?;
            let target = if i == j { 1.0 } else { 0.0 };
            worst = worst.max((g - target).abs());
        }
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shells_up_to_two() {
        let shells = enumerate_shells(2);
        assert_eq!(shells.len(), 2);
        assert_eq!((shells[0].m, shells[0].wave_vectors.len()), (1, 6));
        assert_eq!((shells[1].m, shells[1].wave_vectors.len()), (2, 12));
        assert!(enumerate_shells(0).is_empty());
    }

    #[test]
    fn seven_is_not_a_shell() {
        let ms: Vec<u32> = enumerate_shells(8).iter().map(|s| s.m).collect();
        assert_eq!(ms, vec![1, 2, 3, 4, 5, 6, 8]);
    }

    #[test]
    fn shells_closed_under_negation() {
        for s in enumerate_shells(10) {
            for k in &s.wave_vectors {
                assert!(s.wave_vectors.contains(&k.neg()));
                assert_eq!(k.shell(), s.m);
            }
        }
    }

    #[test]
    fn counts_per_shell() {
        let b = build_basis(1.0, 5);
        for s in enumerate_shells(5) {
            let nv = b.entries.iter().filter(|e| e.m == s.m).count();
            let nw = b.gradient_entries.iter().filter(|e| e.m == s.m).count();
            assert_eq!(nv, 2 * s.wave_vectors.len());
            assert_eq!(nw, s.wave_vectors.len());
        }
    }

    #[test]
    fn polarizations_are_orthonormal_and_transverse() {
        for k in [WaveVector::new(1, 0, 0), WaveVector::new(1, -2, 2), WaveVector::new(0, 1, 1)] {
            let [a, b] = polarizations(k);
            let kf = k.as_f64();
            let d = |x: [f64; 3], y: [f64; 3]| x[0] * y[0] + x[1] * y[1] + x[2] * y[2];
            assert!(d(a, kf).abs() < 1e-15 && d(b, kf).abs() < 1e-15 && d(a, b).abs() < 1e-15);
            assert!((d(a, a) - 1.0).abs() < 1e-15 && (d(b, b) - 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn cutoff_mismatch_rejected() {
        let b = build_basis(1.0, 2);
        assert!(b.project_coefficients(&VectorField::zeros(1.0, 3)).is_err());
    }
}
