use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};

use num_complex::Complex64;

use super::wave::{Layout, WaveVector};
use crate::error::{Result, TorusError};

/// A real periodic function on the torus `(0, ℓ)³`, stored by its Fourier coefficients
///
/// `c_k = ℓ⁻³ ∫_Q u(x) exp(-i (k,x) 2π/ℓ) dx`
///
/// for every `k` with `(k,k) <= cutoff`. Coefficients obey `c_{-k} = conj(c_k)`, and modes
/// outside the cutoff are zero.
#[derive(Clone, Debug, PartialEq)]
pub struct ScalarField {
    ell: f64,
    layout: Layout,
    coeffs: Vec<Complex64>,
}

impl ScalarField {
    /// The zero field. Panics if `ell` is not a positive finite number.
    pub fn zeros(ell: f64, cutoff: u32) -> Self {
        assert!(ell.is_finite() && ell > 0.0, "period must be positive, got {ell}");
        let layout = Layout::new(cutoff);
        ScalarField { ell, layout, coeffs: vec![Complex64::new(0.0, 0.0); layout.len()] }
    }

    pub fn constant(ell: f64, cutoff: u32, value: f64) -> Self {
        let mut u = Self::zeros(ell, cutoff);
        u.coeffs[u.layout.index(WaveVector::ZERO).unwrap()] = Complex64::new(value, 0.0);
        u
    }

    /// Builds a field from `(k, c_k)` pairs. Either member of a `±k` pair may be given;
    /// its partner is filled in by conjugation.
    pub fn from_modes(
        ell: f64,
        cutoff: u32,
        modes: impl IntoIterator<Item = (WaveVector, Complex64)>,
    ) -> Result<Self> {
        let mut u = Self::zeros(ell, cutoff);
        for (k, c) in modes {
            u.set_coeff(k, c)?;
        }
        Ok(u)
    }

    pub fn ell(&self) -> f64 {
        self.ell
    }

    pub fn cutoff(&self) -> u32 {
        self.layout.cutoff
    }

    /// Largest `|k_i|` that fits under the cutoff.
    pub fn k_max(&self) -> i32 {
        self.layout.k_max
    }

    pub(crate) fn layout(&self) -> Layout {
        self.layout
    }

    pub(crate) fn raw(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub(crate) fn raw_mut(&mut self) -> &mut [Complex64] {
        &mut self.coeffs
    }

    /// Coefficient `c_k`; zero outside the cutoff.
    pub fn coeff(&self, k: WaveVector) -> Complex64 {
        self.layout.index(k).map_or(Complex64::new(0.0, 0.0), |i| self.coeffs[i])
    }

    /// Sets `c_k = c` and `c_{-k} = conj(c)`. For `k = 0` only the real part is kept.
    pub fn set_coeff(&mut self, k: WaveVector, c: Complex64) -> Result<()> {
        let i = self.layout.index(k).ok_or_else(|| {
            TorusError::InvalidInput(format!(
                "mode {k} lies outside the cutoff {}",
                self.layout.cutoff
            ))
        })?;
        if k.is_zero() {
            self.coeffs[i] = Complex64::new(c.re, 0.0);
        } else {
            self.coeffs[i] = c;
            let j = self.layout.mirror(i);
            self.coeffs[j] = c.conj();
        }
        Ok(())
    }

    /// Iterates over every admitted mode with its coefficient (zero coefficients included).
    pub fn modes(&self) -> impl Iterator<Item = (WaveVector, Complex64)> + '_ {
        self.layout.modes().map(move |(i, k)| (k, self.coeffs[i]))
    }

    pub fn mean(&self) -> f64 {
        self.coeff(WaveVector::ZERO).re
    }

    /// Applies a Fourier multiplier `c_k ↦ m(k) c_k`.
    ///
    /// The multiplier must satisfy `m(-k) = conj(m(k))` for the result to stay real.
    pub fn map_modes(&self, mut multiplier: impl FnMut(WaveVector) -> Complex64) -> Self {
        let mut out = Self::zeros(self.ell, self.layout.cutoff);
        for (i, k) in self.layout.modes() {
            out.coeffs[i] = self.coeffs[i] * multiplier(k);
        }
        out
    }

    /// `Σ_k w(k) |c_k|²` over admitted modes.
    pub fn weighted_energy(&self, mut weight: impl FnMut(WaveVector) -> f64) -> f64 {
        self.layout.modes().map(|(i, k)| weight(k) * self.coeffs[i].norm_sqr()).sum()
    }

    /// Truncates to a smaller cutoff or zero-extends to a larger one.
    pub fn with_cutoff(&self, cutoff: u32) -> Self {
        if cutoff == self.layout.cutoff {
            return self.clone();
        }
        let mut out = Self::zeros(self.ell, cutoff);
        for (i, k) in out.layout.modes() {
            out.coeffs[i] = self.coeff(k);
        }
        out
    }

    /// Largest violation of `c_{-k} = conj(c_k)`, including `Im c_0`.
    pub fn hermitian_defect(&self) -> f64 {
        self.layout
            .modes()
            .map(|(i, _)| (self.coeffs[i] - self.coeffs[self.layout.mirror(i)].conj()).norm())
            .fold(0.0, f64::max)
    }

    pub fn max_abs_coeff(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    pub fn is_finite(&self) -> bool {
        self.coeffs.iter().all(|c| c.re.is_finite() && c.im.is_finite())
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.re == 0.0 && c.im == 0.0)
    }

    /// `self += a * other`. Panics if the fields do not share period and cutoff.
    pub fn axpy(&mut self, a: f64, other: &ScalarField) {
        self.assert_same_shape(other);
        for (x, y) in self.coeffs.iter_mut().zip(&other.coeffs) {
            *x += y * a;
        }
    }

    pub fn scale(&mut self, a: f64) {
        for x in &mut self.coeffs {
            *x *= a;
        }
    }

    pub fn scaled(&self, a: f64) -> Self {
        let mut out = self.clone();
        out.scale(a);
        out
    }

    pub(crate) fn assert_same_shape(&self, other: &ScalarField) {
        assert!(
            self.ell == other.ell && self.layout == other.layout,
            "field shape mismatch: (ell {}, cutoff {}) vs (ell {}, cutoff {})",
            self.ell,
            self.layout.cutoff,
            other.ell,
            other.layout.cutoff
        );
    }

    pub fn check_compatible(&self, other: &ScalarField) -> Result<()> {
        check_shapes(self.ell, self.cutoff(), other.ell, other.cutoff())
    }
}

pub(crate) fn check_ell(left: f64, right: f64) -> Result<()> {
    if left != right {
        return Err(TorusError::IncompatibleDomains { left, right });
    }
    Ok(())
}

pub(crate) fn check_shapes(ell_a: f64, cut_a: u32, ell_b: f64, cut_b: u32) -> Result<()> {
    check_ell(ell_a, ell_b)?;
    if cut_a != cut_b {
        return Err(TorusError::CutoffMismatch { left: cut_a, right: cut_b });
    }
    Ok(())
}

/// A real periodic vector field `u = (u¹, u², u³)` with components sharing period and cutoff.
#[derive(Clone, Debug, PartialEq)]
pub struct VectorField {
    comps: [ScalarField; 3],
}

impl VectorField {
    pub fn zeros(ell: f64, cutoff: u32) -> Self {
        let z = ScalarField::zeros(ell, cutoff);
        VectorField { comps: [z.clone(), z.clone(), z] }
    }

    pub fn constant(ell: f64, cutoff: u32, value: [f64; 3]) -> Self {
        VectorField {
            comps: value.map(|v| ScalarField::constant(ell, cutoff, v)),
        }
    }

    pub fn from_components(comps: [ScalarField; 3]) -> Result<Self> {
        for c in &comps[1..] {
            comps[0].check_compatible(c)?;
        }
        Ok(VectorField { comps })
    }

    /// Builds a field from `(k, ĉ_k)` pairs with vector amplitudes.
    pub fn from_modes(
        ell: f64,
        cutoff: u32,
        modes: impl IntoIterator<Item = (WaveVector, [Complex64; 3])>,
    ) -> Result<Self> {
        let mut u = Self::zeros(ell, cutoff);
        for (k, amp) in modes {
            u.set_coeff(k, amp)?;
        }
        Ok(u)
    }

    pub fn ell(&self) -> f64 {
        self.comps[0].ell()
    }

    pub fn cutoff(&self) -> u32 {
        self.comps[0].cutoff()
    }

    pub fn k_max(&self) -> i32 {
        self.comps[0].k_max()
    }

    pub(crate) fn layout(&self) -> Layout {
        self.comps[0].layout()
    }

    pub fn components(&self) -> &[ScalarField; 3] {
        &self.comps
    }

    pub fn component(&self, i: usize) -> &ScalarField {
        &self.comps[i]
    }

    pub fn component_mut(&mut self, i: usize) -> &mut ScalarField {
        &mut self.comps[i]
    }

    pub fn into_components(self) -> [ScalarField; 3] {
        self.comps
    }

    pub fn coeff(&self, k: WaveVector) -> [Complex64; 3] {
        [self.comps[0].coeff(k), self.comps[1].coeff(k), self.comps[2].coeff(k)]
    }

    pub fn set_coeff(&mut self, k: WaveVector, amp: [Complex64; 3]) -> Result<()> {
        for (c, a) in self.comps.iter_mut().zip(amp) {
            c.set_coeff(k, a)?;
        }
        Ok(())
    }

    /// Applies the same scalar multiplier to every component.
    pub fn map_modes(&self, mut multiplier: impl FnMut(WaveVector) -> Complex64) -> Self {
        VectorField {
            comps: [
                self.comps[0].map_modes(&mut multiplier),
                self.comps[1].map_modes(&mut multiplier),
                self.comps[2].map_modes(&mut multiplier),
            ],
        }
    }

    /// Applies a per-mode 3×3 map `ĉ_k ↦ F(k, ĉ_k)`.
    ///
    /// `F` must commute with conjugation under `k ↦ -k` for the result to stay real.
    pub fn map_amplitudes(
        &self,
        mut f: impl FnMut(WaveVector, [Complex64; 3]) -> [Complex64; 3],
    ) -> Self {
        let layout = self.layout();
        let mut out = Self::zeros(self.ell(), self.cutoff());
        for (i, k) in layout.modes() {
            let a = [self.comps[0].raw()[i], self.comps[1].raw()[i], self.comps[2].raw()[i]];
            let b = f(k, a);
            for c in 0..3 {
                out.comps[c].raw_mut()[i] = b[c];
            }
        }
        out
    }

    pub fn weighted_energy(&self, mut weight: impl FnMut(WaveVector) -> f64) -> f64 {
        self.comps.iter().map(|c| c.weighted_energy(&mut weight)).sum()
    }

    pub fn with_cutoff(&self, cutoff: u32) -> Self {
        VectorField { comps: self.comps.clone().map(|c| c.with_cutoff(cutoff)) }
    }

    pub fn mean(&self) -> [f64; 3] {
        [self.comps[0].mean(), self.comps[1].mean(), self.comps[2].mean()]
    }

    pub fn hermitian_defect(&self) -> f64 {
        self.comps.iter().map(|c| c.hermitian_defect()).fold(0.0, f64::max)
    }

    pub fn max_abs_coeff(&self) -> f64 {
        self.comps.iter().map(|c| c.max_abs_coeff()).fold(0.0, f64::max)
    }

    pub fn is_finite(&self) -> bool {
        self.comps.iter().all(|c| c.is_finite())
    }

    pub fn is_zero(&self) -> bool {
        self.comps.iter().all(|c| c.is_zero())
    }

    pub fn axpy(&mut self, a: f64, other: &VectorField) {
        for (x, y) in self.comps.iter_mut().zip(&other.comps) {
            x.axpy(a, y);
        }
    }

    pub fn scale(&mut self, a: f64) {
        for x in &mut self.comps {
            x.scale(a);
        }
    }

    pub fn scaled(&self, a: f64) -> Self {
        let mut out = self.clone();
        out.scale(a);
        out
    }

    /// Multiplies every coefficient by `m(k)` where `m` is real.
    pub fn map_real_modes(&self, mut m: impl FnMut(WaveVector) -> f64) -> Self {
        self.map_modes(|k| Complex64::new(m(k), 0.0))
    }

    pub fn check_compatible(&self, other: &VectorField) -> Result<()> {
        check_shapes(self.ell(), self.cutoff(), other.ell(), other.cutoff())
    }
}

macro_rules! impl_arith {
    ($t:ty) => {
        impl Add<&$t> for &$t {
            type Output = $t;
            fn add(self, rhs: &$t) -> $t {
                let mut out = self.clone();
                out.axpy(1.0, rhs);
                out
            }
        }
        impl Sub<&$t> for &$t {
            type Output = $t;
            fn sub(self, rhs: &$t) -> $t {
                let mut out = self.clone();
                out.axpy(-1.0, rhs);
                out
            }
        }
        impl Add<&$t> for $t {
            type Output = $t;
            fn add(mut self, rhs: &$t) -> $t {
                self.axpy(1.0, rhs);
                self
            }
        }
        impl Sub<&$t> for $t {
            type Output = $t;
            fn sub(mut self, rhs: &$t) -> $t {
                self.axpy(-1.0, rhs);
                self
            }
        }
        impl AddAssign<&$t> for $t {
            fn add_assign(&mut self, rhs: &$t) {
                self.axpy(1.0, rhs);
            }
        }
        impl SubAssign<&$t> for $t {
            fn sub_assign(&mut self, rhs: &$t) {
                self.axpy(-1.0, rhs);
            }
        }
        impl Mul<f64> for &$t {
            type Output = $t;
            fn mul(self, a: f64) -> $t {
                self.scaled(a)
            }
        }
        impl Mul<f64> for $t {
            type Output = $t;
            fn mul(mut self, a: f64) -> $t {
                self.scale(a);
                self
            }
        }
        impl Neg for &$t {
            type Output = $t;
            fn neg(self) -> $t {
                self.scaled(-1.0)
            }
        }
        impl Neg for $t {
            type Output = $t;
            fn neg(mut self) -> $t {
                self.scale(-1.0);
                self
            }
        }
    };
}

impl_arith!(ScalarField);
impl_arith!(VectorField);

/// Common read access to scalar and vector fields, used by the norm routines.
pub trait SpectralField: Clone {
    fn ell(&self) -> f64;
    fn cutoff(&self) -> u32;
    /// `Σ_k w(k) Σ_components |c_k|²`.
    fn weighted_energy_with(&self, weight: &mut dyn FnMut(WaveVector) -> f64) -> f64;
    /// Applies a real, even multiplier to every component.
    fn map_real(&self, m: &mut dyn FnMut(WaveVector) -> f64) -> Self;
    fn zero_mean(&self) -> bool;
    /// Pointwise values (Euclidean magnitude for vectors) on an `n³` grid.
    fn magnitudes(&self, n: usize) -> Result<Vec<f64>>;
}

impl SpectralField for ScalarField {
    fn ell(&self) -> f64 {
        self.ell
    }
    fn cutoff(&self) -> u32 {
        self.layout.cutoff
    }
    fn weighted_energy_with(&self, weight: &mut dyn FnMut(WaveVector) -> f64) -> f64 {
        self.weighted_energy(weight)
    }
    fn map_real(&self, m: &mut dyn FnMut(WaveVector) -> f64) -> Self {
        self.map_modes(|k| Complex64::new(m(k), 0.0))
    }
    fn zero_mean(&self) -> bool {
        self.mean() == 0.0
    }
    fn magnitudes(&self, n: usize) -> Result<Vec<f64>> {
        Ok(super::grid::synthesize(self, n)?.values.into_iter().map(f64::abs).collect())
    }
}

impl SpectralField for VectorField {
    fn ell(&self) -> f64 {
        VectorField::ell(self)
    }
    fn cutoff(&self) -> u32 {
        VectorField::cutoff(self)
    }
    fn weighted_energy_with(&self, weight: &mut dyn FnMut(WaveVector) -> f64) -> f64 {
        self.weighted_energy(weight)
    }
    fn map_real(&self, m: &mut dyn FnMut(WaveVector) -> f64) -> Self {
        self.map_real_modes(m)
    }
    fn zero_mean(&self) -> bool {
        self.mean() == [0.0; 3]
    }
    fn magnitudes(&self, n: usize) -> Result<Vec<f64>> {
        let grids = super::grid::synthesize_vector(self, n)?;
        Ok((0..grids[0].values.len())
            .map(|i| {
                let (a, b, c) = (grids[0].values[i], grids[1].values[i], grids[2].values[i]);
                (a * a + b * b + c * c).sqrt()
            })
            .collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn set_coeff_fills_conjugate_partner() {
        let mut u = ScalarField::zeros(1.0, 3);
        u.set_coeff(WaveVector::new(1, -1, 0), Complex64::new(0.5, 2.0)).unwrap();
        assert_eq!(u.coeff(WaveVector::new(-1, 1, 0)), Complex64::new(0.5, -2.0));
        assert_eq!(u.hermitian_defect(), 0.0);
    }

    #[test]
    fn set_coeff_rejects_modes_beyond_cutoff() {
        let mut u = ScalarField::zeros(1.0, 2);
        assert!(u.set_coeff(WaveVector::new(1, 1, 1), Complex64::new(1.0, 0.0)).is_err());
        assert_eq!(u.coeff(WaveVector::new(1, 1, 1)), Complex64::new(0.0, 0.0));
    }

    #[test]
    fn with_cutoff_round_trip() {
        let u = ScalarField::from_modes(
            2.0,
            2,
            [(WaveVector::new(1, 1, 0), Complex64::new(1.0, -1.0))],
        )
        .unwrap();
        assert_eq!(u.with_cutoff(9).with_cutoff(2), u);
        assert!(u.with_cutoff(1).is_zero());
    }

    #[test]
    fn mismatched_components_rejected() {
        let a = ScalarField::zeros(1.0, 2);
        let b = ScalarField::zeros(2.0, 2);
        assert!(matches!(
            VectorField::from_components([a.clone(), b, a]),
            Err(TorusError::IncompatibleDomains { .. })
        ));
    }
}
