use crate::error::{Result, TorusError};
use crate::spectral::VectorField;

/// Time samples `u(t_i)` of a vector field, optionally with `∂_t u(t_i)`.
#[derive(Clone, Debug)]
pub struct FieldTrajectory {
    pub times: Vec<f64>,
    pub fields: Vec<VectorField>,
    /// `∂_t u` at each sample, when the producer knows it.
    pub rhs: Option<Vec<VectorField>>,
    /// Step-halving estimate of the time discretisation error, when computed.
    pub error_estimate: Option<f64>,
}

impl FieldTrajectory {
    pub fn new(times: Vec<f64>, fields: Vec<VectorField>) -> Result<Self> {
        if times.is_empty() || times.len() != fields.len() {
            return Err(TorusError::InvalidInput(format!(
                "trajectory needs matching nonempty times and fields ({} vs {})",
                times.len(),
                fields.len()
            )));
        }
        if times.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(TorusError::InvalidInput("trajectory times must increase".into()));
        }
        for f in &fields[1..] {
            fields[0].check_compatible(f)?;
        }
        Ok(FieldTrajectory { times, fields, rhs: None, error_estimate: None })
    }

    /// A time-independent trajectory holding `field` at both ends of `[0, horizon]`.
    pub fn constant(field: VectorField, horizon: f64) -> Self {
        FieldTrajectory {
            times: vec![0.0, horizon],
            fields: vec![field.clone(), field],
            rhs: None,
            error_estimate: None,
        }
    }

    /// Samples `f` at `steps + 1` equally spaced times on `[0, horizon]`.
    pub fn sample(horizon: f64, steps: usize, f: impl Fn(f64) -> VectorField) -> Result<Self> {
        let times: Vec<f64> = (0..=steps).map(|i| horizon * i as f64 / steps as f64).collect();
        let fields = times.iter().map(|&t| f(t)).collect();
        Self::new(times, fields)
    }

    pub fn with_rhs(mut self, rhs: Vec<VectorField>) -> Result<Self> {
        if rhs.len() != self.fields.len() {
            return Err(TorusError::InvalidInput("rhs samples must match field samples".into()));
        }
        for r in &rhs {
            self.fields[0].check_compatible(r)?;
        }
        self.rhs = Some(rhs);
        Ok(self)
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn ell(&self) -> f64 {
        self.fields[0].ell()
    }

    pub fn cutoff(&self) -> u32 {
        self.fields[0].cutoff()
    }

    pub fn initial(&self) -> &VectorField {
        &self.fields[0]
    }

    pub fn last(&self) -> &VectorField {
        self.fields.last().expect("nonempty trajectory")
    }

    pub fn horizon(&self) -> f64 {
        *self.times.last().expect("nonempty trajectory") - self.times[0]
    }

    /// Linear interpolation in time. Times outside the sampled range are an error,
    /// up to a relative slack of `1e-9`.
    pub fn at(&self, t: f64) -> Result<VectorField> {
        let (t0, t1) = (self.times[0], *self.times.last().unwrap());
        let slack = 1e-9 * (t1 - t0).abs().max(1.0);
        if t < t0 - slack || t > t1 + slack {
            return Err(TorusError::InvalidInput(format!(
                "time {t} outside sampled range [{t0}, {t1}]"
            )));
        }
        if self.len() == 1 {
            return Ok(self.fields[0].clone());
        }
        let t = t.clamp(t0, t1);
        let i = match self.times.binary_search_by(|x| x.partial_cmp(&t).unwrap()) {
            Ok(i) => return Ok(self.fields[i].clone()),
            Err(i) => i.clamp(1, self.len() - 1),
        };
        let (a, b) = (self.times[i - 1], self.times[i]);
        let s = (t - a) / (b - a);
        let mut out = self.fields[i - 1].scaled(1.0 - s);
        out.axpy(s, &self.fields[i]);
        Ok(out)
    }

    /// Stored `∂_t u` samples, or second-order finite differences of the fields.
    pub fn time_derivatives(&self) -> Result<Vec<VectorField>> {
        if let Some(rhs) = &self.rhs {
            return Ok(rhs.clone());
        }
        finite_difference(&self.times, &self.fields)
    }

    /// Copy with every field embedded in (or truncated to) a new cutoff.
    pub fn with_cutoff(&self, cutoff: u32) -> Self {
        FieldTrajectory {
            times: self.times.clone(),
            fields: self.fields.iter().map(|f| f.with_cutoff(cutoff)).collect(),
            rhs: self.rhs.as_ref().map(|r| r.iter().map(|f| f.with_cutoff(cutoff)).collect()),
            error_estimate: self.error_estimate,
        }
    }
}

/// Second-order differences on a possibly nonuniform grid (three-point one-sided at the ends).
pub(crate) fn finite_difference(times: &[f64], fields: &[VectorField]) -> Result<Vec<VectorField>> {
    let n = times.len();
    if n < 3 {
        return Err(TorusError::MissingDerivativeData(
            "at least three samples are needed to difference a trajectory".into(),
        ));
    }
    let combo = |w: [(f64, usize); 3]| {
        let mut out = fields[w[0].1].scaled(w[0].0);
        out.axpy(w[1].0, &fields[w[1].1]);
        out.axpy(w[2].0, &fields[w[2].1]);
        out
    };
    // derivative at x0 of the quadratic through (x0, x1, x2), evaluated at `at`
    let weights = |x: [f64; 3], at: f64| -> [f64; 3] {
        let d = |i: usize, j: usize, l: usize| {
            ((at - x[j]) + (at - x[l])) / ((x[i] - x[j]) * (x[i] - x[l]))
        };
        [d(0, 1, 2), d(1, 0, 2), d(2, 0, 1)]
    };
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let idx = if i == 0 {
            [0, 1, 2]
        } else if i == n - 1 {
            [n - 3, n - 2, n - 1]
        } else {
            [i - 1, i, i + 1]
        };
        let w = weights([times[idx[0]], times[idx[1]], times[idx[2]]], times[i]);
        out.push(combo([(w[0], idx[0]), (w[1], idx[1]), (w[2], idx[2])]));
    }
    Ok(out)
}

/// Exterior force `f(·, t)`.
pub trait Forcing: Sync {
    fn eval(&self, t: f64) -> Result<VectorField>;
}

/// `f ≡ 0` on a given domain and cutoff.
#[derive(Clone, Copy, Debug)]
pub struct ZeroForcing {
    pub ell: f64,
    pub cutoff: u32,
}

impl Forcing for ZeroForcing {
    fn eval(&self, _t: f64) -> Result<VectorField> {
        Ok(VectorField::zeros(self.ell, self.cutoff))
    }
}

/// Forcing given by a closure, e.g. an analytic manufactured source.
pub struct ForcingFn<F>(pub F);

impl<F> Forcing for ForcingFn<F>
where
    F: Fn(f64) -> VectorField + Sync,
{
    fn eval(&self, t: f64) -> Result<VectorField> {
        Ok((self.0)(t))
    }
}

/// Sampled forcing, linearly interpolated between samples.
impl Forcing for FieldTrajectory {
    fn eval(&self, t: f64) -> Result<VectorField> {
        self.at(t)
    }
}

/// Evaluates `f(t)` and brings it to the requested domain and cutoff.
pub(crate) fn forcing_at(f: &dyn Forcing, t: f64, ell: f64, cutoff: u32) -> Result<VectorField> {
    let v = f.eval(t)?;
    if v.ell() != ell {
        return Err(TorusError::IncompatibleDomains { left: v.ell(), right: ell });
    }
    Ok(if v.cutoff() == cutoff { v } else { v.with_cutoff(cutoff) })
}
