use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DoubleScrollState {
    pub v1: f64,
    pub v2: f64,
    pub i: f64,
}

impl DoubleScrollState {
    pub fn new(v1: f64, v2: f64, i: f64) -> Self {
        Self { v1, v2, i }
    }

    pub fn to_array(self) -> [f64; 3] {
        [self.v1, self.v2, self.i]
    }

    fn axpy(self, h: f64, d: Self) -> Self {
        Self { v1: self.v1 + h * d.v1, v2: self.v2 + h * d.v2, i: self.i + h * d.i }
    }

    pub fn max_abs(self) -> f64 {
        self.v1.abs().max(self.v2.abs()).max(self.i.abs())
    }
}

/// Chaotic double-scroll circuit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DoubleScroll {
    pub r1: f64,
    pub r2: f64,
    pub r4: f64,
    pub beta: f64,
    pub ir: f64,
}

impl Default for DoubleScroll {
    fn default() -> Self {
        Self { r1: 1.2, r2: 3.44, r4: 0.193, beta: 11.6, ir: 2.25e-5 }
    }
}

impl DoubleScroll {
    pub fn rhs(&self, s: DoubleScrollState) -> DoubleScrollState {
        let dv = s.v1 - s.v2;
        let g = 2.0 * self.ir * (self.beta * dv).sinh();
        DoubleScrollState {
            v1: s.v1 / self.r1 - dv / self.r2 - g,
            v2: dv / self.r2 + g - s.i,
            i: s.v2 - self.r4 * s.i,
        }
    }

    pub fn rk4_step(&self, s: DoubleScrollState, dt: f64) -> DoubleScrollState {
        let k1 = self.rhs(s);
        let k2 = self.rhs(s.axpy(0.5 * dt, k1));
        let k3 = self.rhs(s.axpy(0.5 * dt, k2));
        let k4 = self.rhs(s.axpy(dt, k3));
        DoubleScrollState {
            v1: s.v1 + dt / 6.0 * (k1.v1 + 2.0 * k2.v1 + 2.0 * k3.v1 + k4.v1),
            v2: s.v2 + dt / 6.0 * (k1.v2 + 2.0 * k2.v2 + 2.0 * k3.v2 + k4.v2),
            i: s.i + dt / 6.0 * (k1.i + 2.0 * k2.i + 2.0 * k3.i + k4.i),
        }
    }
}

const DIVERGENCE: f64 = 1e3;

/// Fixed-step RK4 at `dt`, returning the state after each of `steps`
/// sampling intervals of length `sample_interval`.
pub fn double_scroll_integrate(
    system: &DoubleScroll,
    initial: DoubleScrollState,
    steps: usize,
    sample_interval: f64,
    dt: f64,
) -> Result<Vec<DoubleScrollState>> {
    if !(dt > 0.0 && dt <= 0.05) {
        return Err(Error::InvalidParameter(format!("substep {dt} must lie in (0, 0.05]")));
    }
    let sub = (sample_interval / dt).round();
    if !(sub >= 1.0) || ((sub * dt - sample_interval) / sample_interval).abs() > 1e-9 {
        return Err(Error::InvalidParameter(format!(
            "sampling interval {sample_interval} is not a multiple of dt = {dt}"
        )));
    }
    let sub = sub as usize;
    let mut s = initial;
    let mut out = Vec::with_capacity(steps);
    for k in 0..steps {
        for _ in 0..sub {
            s = system.rk4_step(s, dt);
        }
        if !(s.max_abs() <= DIVERGENCE) {
            return Err(Error::Divergence(format!("double scroll left |x| <= {DIVERGENCE} at sample {k}")));
        }
        out.push(s);
    }
    Ok(out)
}

/// `length` samples on the attractor after `burn_in` samples from (0.1, 0.2, 0.3).
pub fn attractor_samples(length: usize, burn_in: usize) -> Result<Vec<DoubleScrollState>> {
    let all = double_scroll_integrate(
        &DoubleScroll::default(),
        DoubleScrollState::new(0.1, 0.2, 0.3),
        burn_in + length,
        1.0,
        0.01,
    )?;
    Ok(all[burn_in..].to_vec())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn origin_is_fixed() {
        let t = double_scroll_integrate(&DoubleScroll::default(), DoubleScrollState::new(0.0, 0.0, 0.0), 100, 1.0, 0.01)
            .unwrap();
        assert!(t.iter().all(|s| s.max_abs() < 1e-12));
    }

    #[test]
    fn fine_step_agreement() {
        let sys = DoubleScroll::default();
        let x0 = DoubleScrollState::new(0.1, 0.0, 0.0);
        let a = double_scroll_integrate(&sys, x0, 1, 1.0, 0.01).unwrap()[0];
        let b = double_scroll_integrate(&sys, x0, 1, 1.0, 0.001).unwrap()[0];
        for (x, y) in a.to_array().iter().zip(b.to_array()) {
            assert!((x - y).abs() < 1e-6);
        }
    }

    #[test]
    fn substep_validation() {
        let x0 = DoubleScrollState::new(0.1, 0.0, 0.0);
        assert!(double_scroll_integrate(&DoubleScroll::default(), x0, 1, 1.0, 0.1).is_err());
        assert!(double_scroll_integrate(&DoubleScroll::default(), x0, 1, 1.0, 0.03).is_err());
    }

    #[test]
    fn divergence_guard() {
        let x0 = DoubleScrollState::new(2e3, 0.0, 0.0);
        assert!(matches!(
            double_scroll_integrate(&DoubleScroll::default(), x0, 1, 1.0, 0.01),
            Err(Error::Divergence(_))
        ));
    }
}
