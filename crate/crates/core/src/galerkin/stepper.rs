use super::config::Scheme;
use crate::error::Result;

/// `y' + Λy = N(t, y)` with a diagonal, nonnegative `Λ`.
pub(crate) trait SplitSystem {
    type State: Clone;

    /// `e^{-Λh} y`.
    fn decay(&self, y: &Self::State, h: f64) -> Self::State;
    /// `(I + Λh)^{-1} y`.
    fn resolvent(&self, y: &Self::State, h: f64) -> Self::State;
    fn explicit(&self, t: f64, y: &Self::State) -> Result<Self::State>;
    /// `y += a x`.
    fn axpy(&self, y: &mut Self::State, a: f64, x: &Self::State);
}

/// One step from `(t, y)` to `t + h`.
pub(crate) fn step<S: SplitSystem>(sys: &S, scheme: Scheme, t: f64, y: &S::State, h: f64) -> Result<S::State> {
    match scheme {
        Scheme::ImexEuler => {
            let n = sys.explicit(t, y)?;
            let mut z = y.clone();
            sys.axpy(&mut z, h, &n);
            Ok(sys.resolvent(&z, h))
        }
        Scheme::IfRk4 => {
            let half = h / 2.0;
            let k1 = sys.explicit(t, y)?;

            let mut z = y.clone();
            sys.axpy(&mut z, half, &k1);
            let k2 = sys.explicit(t + half, &sys.decay(&z, half))?;

            let ey_half = sys.decay(y, half);
            let mut z = ey_half.clone();
            sys.axpy(&mut z, half, &k2);
            let k3 = sys.explicit(t + half, &z)?;

            let ey = sys.decay(y, h);
            let e_k3 = sys.decay(&k3, half);
            let mut z = ey.clone();
            sys.axpy(&mut z, h, &e_k3);
            let k4 = sys.explicit(t + h, &z)?;

            // y⁺ = E y + h/6 (E k1 + 2 E½ (k2 + k3) + k4)
            let mut mid = k2;
            sys.axpy(&mut mid, 1.0, &k3);
            let mut out = ey;
            sys.axpy(&mut out, h / 6.0, &sys.decay(&k1, h));
            sys.axpy(&mut out, h / 3.0, &sys.decay(&mid, half));
            sys.axpy(&mut out, h / 6.0, &k4);
            Ok(out)
        }
    }
}

/// Takes `steps` steps of size `h` from `t = 0`, keeping every `stride`-th state and the last.
/// `check` sees each new state and may abort the run.
pub(crate) fn integrate<S: SplitSystem>(
    sys: &S,
    scheme: Scheme,
    y0: S::State,
    steps: usize,
    h: f64,
    stride: usize,
    mut check: impl FnMut(f64, &S::State) -> Result<()>,
) -> Result<(Vec<f64>, Vec<S::State>)> {
    let mut times = vec![0.0];
    let mut states = vec![y0.clone()];
    let mut y = y0;
    for i in 0..steps {
        let t = i as f64 * h;
        y = step(sys, scheme, t, &y, h)?;
        let t_next = (i + 1) as f64 * h;
        check(t_next, &y)?;
        if (i + 1) % stride == 0 || i + 1 == steps {
            times.push(t_next);
            states.push(y.clone());
        }
    }
    Ok((times, states))
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Scalar `y' + λy = g(t, y)`.
    struct Scalar<G: Fn(f64, f64) -> f64> {
        lambda: f64,
        g: G,
    }

    impl<G: Fn(f64, f64) -> f64> SplitSystem for Scalar<G> {
        type State = f64;
        fn decay(&self, y: &f64, h: f64) -> f64 {
            y * (-self.lambda * h).exp()
        }
        fn resolvent(&self, y: &f64, h: f64) -> f64 {
            y / (1.0 + self.lambda * h)
        }
        fn explicit(&self, t: f64, y: &f64) -> Result<f64> {
            Ok((self.g)(t, *y))
        }
        fn axpy(&self, y: &mut f64, a: f64, x: &f64) {
            *y += a * x;
        }
    }

    fn run<G: Fn(f64, f64) -> f64>(sys: &Scalar<G>, scheme: Scheme, steps: usize, y0: f64) -> f64 {
        let h = 1.0 / steps as f64;
        let mut y = y0;
        for i in 0..steps {
            y = step(sys, scheme, i as f64 * h, &y, h).unwrap();
        }
        y
    }

    #[test]
    fn pure_decay_is_exact_for_integrating_factor() {
        let sys = Scalar { lambda: 50.0, g: |_, _| 0.0 };
        assert!((run(&sys, Scheme::IfRk4, 7, 2.0) - 2.0 * (-50.0f64).exp()).abs() < 1e-30);
    }

    #[test]
    fn observed_orders() {
        // y' + y = -y² + cos t has no closed form; compare against a fine reference
        let sys = Scalar { lambda: 1.0, g: |t: f64, y: f64| -y * y + t.cos() };
        let reference = run(&sys, Scheme::IfRk4, 4096, 0.5);
        for (scheme, lo) in [(Scheme::ImexEuler, 0.9), (Scheme::IfRk4, 3.7)] {
            let e1 = (run(&sys, scheme, 40, 0.5) - reference).abs();
            let e2 = (run(&sys, scheme, 80, 0.5) - reference).abs();
            let order = (e1 / e2).log2();
            assert!(order > lo, "{scheme}: order {order}");
        }
    }
}
