use std::f64::consts::{FRAC_PI_2, FRAC_PI_4};

use crate::optics::CovarianceMatrix;
use crate::{Error, Result};

/// Quadrature index in grouped ordering: 0..n are q, n..2n are p.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Observable {
    /// σ_{ij}, i ≤ j.
    Element(usize, usize),
    /// Variance of q_m cos θ + p_m sin θ.
    Rotated { mode: usize, theta: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Normalization {
    Raw,
    MinMax,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ObservableSelection {
    n: usize,
    items: Vec<Observable>,
    normalization: Normalization,
}

impl ObservableSelection {
    pub fn new(n: usize, items: Vec<Observable>, normalization: Normalization) -> Result<Self> {
        if n == 0 || items.is_empty() {
            return Err(Error::InvalidParameter("empty observable selection".into()));
        }
        let elements = items.iter().filter(|o| matches!(o, Observable::Element(..))).count();
        if elements > n * (2 * n + 1) {
            return Err(Error::InvalidParameter(format!(
                "{elements} elements exceed the {} unique entries of a {}-mode covariance",
                n * (2 * n + 1),
                n
            )));
        }
        for o in &items {
            let ok = match *o {
                Observable::Element(i, j) => i <= j && j < 2 * n,
                Observable::Rotated { mode, .. } => mode < n,
            };
            if !ok {
                return Err(Error::InvalidParameter(format!("observable {o:?} out of range for n = {n}")));
            }
        }
        Ok(Self { n, items, normalization })
    }

    /// (⟨Δq²⟩, ⟨Δp²⟩, ⟨ΔqΔp⟩) of a single mode.
    pub fn single_mode(normalization: Normalization) -> Self {
        Self::new(1, vec![Observable::Element(0, 0), Observable::Element(1, 1), Observable::Element(0, 1)], normalization)
            .expect("valid")
    }

    /// All n(2n+1) upper-triangle elements, row-major.
    pub fn upper_triangle(n: usize, normalization: Normalization) -> Result<Self> {
        let mut items = Vec::with_capacity(n * (2 * n + 1));
        for i in 0..2 * n {
            for j in i..2 * n {
                items.push(Observable::Element(i, j));
            }
        }
        Self::new(n, items, normalization)
    }

    /// Appends the variance of (q + p)/√2 of `mode`.
    pub fn with_diagonal_quadrature(mut self, mode: usize) -> Result<Self> {
        self.items.push(Observable::Rotated { mode, theta: FRAC_PI_4 });
        Self::new(self.n, self.items, self.normalization)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    pub fn items(&self) -> &[Observable] {
        &self.items
    }

    pub fn normalization(&self) -> Normalization {
        self.normalization
    }

    pub fn name(&self, k: usize) -> String {
        let label = |i: usize| {
            if i < self.n {
                format!("q{}", i + 1)
            } else {
                format!("p{}", i - self.n + 1)
            }
        };
        match self.items[k] {
            Observable::Element(i, j) => format!("{}{}", label(i), label(j)),
            Observable::Rotated { mode, theta } => format!("rot{}({theta:.4})", mode + 1),
        }
    }

    /// Raw values of the selected elements.
    pub fn extract(&self, sigma: &CovarianceMatrix) -> Result<Vec<f64>> {
        if sigma.n() != self.n {
            return Err(Error::Dimension(format!(
                "covariance has {} modes, selection expects {}",
                sigma.n(),
                self.n
            )));
        }
        Ok(self
            .items
            .iter()
            .map(|o| match *o {
                Observable::Element(i, j) => sigma.get(i, j),
                Observable::Rotated { mode, theta } => sigma.rotated_variance(mode, theta),
            })
            .collect())
    }
}

/// Per-observable affine map of [lo, hi] onto [0, 1].
#[derive(Debug, Clone, PartialEq)]
pub struct Scaler {
    lo: Vec<f64>,
    hi: Vec<f64>,
}

impl Scaler {
    /// Fails on a zero-width range, naming the constant observable.
    pub fn from_extremes(lo: Vec<f64>, hi: Vec<f64>, sel: &ObservableSelection) -> Result<Self> {
        if lo.len() != sel.len() || hi.len() != sel.len() {
            return Err(Error::Dimension("scaler length differs from selection".into()));
        }
        for k in 0..lo.len() {
            let scale = 1.0 + lo[k].abs().max(hi[k].abs());
            if !(hi[k] - lo[k] > 1e-12 * scale) {
                return Err(Error::Degenerate(format!(
                    "observable {} is constant ({}); min-max normalization undefined",
                    sel.name(k),
                    lo[k]
                )));
            }
        }
        Ok(Self { lo, hi })
    }

    /// Column-wise min/max of a calibration batch.
    pub fn from_batch(rows: &[Vec<f64>], sel: &ObservableSelection) -> Result<Self> {
        if rows.is_empty() {
            return Err(Error::Degenerate("empty calibration batch".into()));
        }
        let m = sel.len();
        let mut lo = vec![f64::INFINITY; m];
        let mut hi = vec![f64::NEG_INFINITY; m];
        for r in rows {
            if r.len() != m {
                return Err(Error::Dimension("calibration row length differs from selection".into()));
            }
            for k in 0..m {
                lo[k] = lo[k].min(r[k]);
                hi[k] = hi[k].max(r[k]);
            }
        }
        Self::from_extremes(lo, hi, sel)
    }

    /// Exact extremes for observables of the form A + B cos 2δ + C sin 2δ,
    /// which covers every element under a global pump phase δ.
    pub fn from_harmonic<F>(raw: F, sel: &ObservableSelection) -> Result<Self>
    where
        F: Fn(f64) -> Result<Vec<f64>>,
    {
        let (v0, v1, v2) = (raw(0.0)?, raw(FRAC_PI_4)?, raw(FRAC_PI_2)?);
        let mut lo = Vec::with_capacity(v0.len());
        let mut hi = Vec::with_capacity(v0.len());
        for k in 0..v0.len() {
            let a = 0.5 * (v0[k] + v2[k]);
            let b = 0.5 * (v0[k] - v2[k]);
            let c = v1[k] - a;
            let amp = b.hypot(c);
            lo.push(a - amp);
            hi.push(a + amp);
        }
        Self::from_extremes(lo, hi, sel)
    }

    pub fn lo(&self) -> &[f64] {
        &self.lo
    }

    pub fn hi(&self) -> &[f64] {
        &self.hi
    }

    pub fn apply(&self, raw: &mut [f64]) {
        for (k, v) in raw.iter_mut().enumerate() {
            *v = (*v - self.lo[k]) / (self.hi[k] - self.lo[k]);
        }
    }
}

pub fn observables_from_covariance(
    sigma: &CovarianceMatrix,
    sel: &ObservableSelection,
    scaler: Option<&Scaler>,
) -> Result<Vec<f64>> {
    let mut v = sel.extract(sigma)?;
    match (sel.normalization(), scaler) {
        (Normalization::Raw, _) => {}
        (Normalization::MinMax, Some(s)) => {
            if s.lo.len() != v.len() {
                return Err(Error::Dimension("scaler length differs from selection".into()));
            }
            s.apply(&mut v)
        }
        (Normalization::MinMax, None) => {
            return Err(Error::InvalidParameter("min-max normalization requested without extremes".into()))
        }
    }
    Ok(v)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::optics::analytic_global_phase_covariance;
    use nalgebra::DMatrix;
    use num_complex::Complex64;

    fn sigma(delta: f64, r: f64) -> CovarianceMatrix {
        analytic_global_phase_covariance(delta, &DMatrix::<Complex64>::identity(1, 1), &[r]).unwrap()
    }

    #[test]
    fn raw_single_mode() {
        let r = 0.2;
        let sel = ObservableSelection::single_mode(Normalization::Raw);
        let v = observables_from_covariance(&sigma(0.0, r), &sel, None).unwrap();
        assert!((v[0] - (2.0 * r).exp()).abs() < 1e-15);
        assert!((v[1] - (-2.0 * r).exp()).abs() < 1e-15);
        assert_eq!(v[2], 0.0);
    }

    #[test]
    fn minmax_maps_extremes_to_bounds() {
        let r = 0.2;
        let sel = ObservableSelection::single_mode(Normalization::MinMax);
        let scaler = Scaler::from_harmonic(|d| sel.extract(&sigma(d, r)), &sel).unwrap();
        let a = observables_from_covariance(&sigma(0.0, r), &sel, Some(&scaler)).unwrap();
        let b = observables_from_covariance(&sigma(FRAC_PI_2, r), &sel, Some(&scaler)).unwrap();
        assert!((a[0] - 1.0).abs() < 1e-12 && b[0].abs() < 1e-12);
        assert!(a[1].abs() < 1e-12 && (b[1] - 1.0).abs() < 1e-12);
        // Normalized forms: cos²δ, sin²δ, (1 + sin 2δ)/2.
        for k in 0..20 {
            let d = 0.37 * k as f64;
            let v = observables_from_covariance(&sigma(d, r), &sel, Some(&scaler)).unwrap();
            assert!((v[0] - d.cos().powi(2)).abs() < 1e-12);
            assert!((v[1] - d.sin().powi(2)).abs() < 1e-12);
            assert!((v[2] - 0.5 * (1.0 + (2.0 * d).sin())).abs() < 1e-12);
        }
    }

    #[test]
    fn constant_observable_is_named() {
        let sel = ObservableSelection::upper_triangle(2, Normalization::MinMax).unwrap();
        let s = |d: f64| {
            let c = analytic_global_phase_covariance(d, &DMatrix::<Complex64>::identity(2, 2), &[0.2, 0.1])?;
            sel.extract(&c)
        };
        let err = Scaler::from_harmonic(s, &sel).unwrap_err().to_string();
        assert!(err.contains("q1q2"), "{err}");
    }

    #[test]
    fn upper_triangle_size() {
        assert_eq!(ObservableSelection::upper_triangle(4, Normalization::Raw).unwrap().len(), 36);
        assert_eq!(ObservableSelection::upper_triangle(9, Normalization::Raw).unwrap().len(), 171);
    }

    #[test]
    fn selection_validation() {
        assert!(ObservableSelection::new(1, vec![Observable::Element(1, 0)], Normalization::Raw).is_err());
        assert!(ObservableSelection::new(1, vec![Observable::Element(0, 2)], Normalization::Raw).is_err());
        assert!(ObservableSelection::new(1, vec![Observable::Element(0, 0); 4], Normalization::Raw).is_err());
    }

    #[test]
    fn minmax_without_extremes_fails() {
        let sel = ObservableSelection::single_mode(Normalization::MinMax);
        assert!(observables_from_covariance(&sigma(0.0, 0.1), &sel, None).is_err());
    }

    #[test]
    fn names() {
        let sel = ObservableSelection::single_mode(Normalization::Raw).with_diagonal_quadrature(0).unwrap();
        let names: Vec<_> = (0..sel.len()).map(|k| sel.name(k)).collect();
        assert_eq!(names, vec!["q1q1", "p1p1", "q1p1", "rot1(0.7854)"]);
    }
}
