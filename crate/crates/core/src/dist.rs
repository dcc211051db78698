//! Truncated degree distributions.
//!
//! A [`DegreeDistribution`] is a finite mass sequence `p_0..p_K` together
//! with the tail tolerance it was built under: the mass dropped beyond the
//! truncation is guaranteed smaller than `tail_tol`. All analytic maps in
//! [`crate::spectra`] act on this type; all samplers in [`crate::graphgen`]
//! draw from it.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::zeta::zeta;

/// Default bound on the probability mass allowed beyond the truncation.
pub const DEFAULT_TAIL_TOL: f64 = 1e-10;

/// Slack accepted above an exact total mass of 1 (accumulated rounding).
const SUM_SLACK: f64 = 1e-12;

#[derive(Debug, Error, PartialEq)]
pub enum DistError {
    #[error("mass[{k}] = {value} is outside [0, 1]")]
    MassOutOfRange { k: usize, value: f64 },
    #[error("total mass {sum} is outside [1 - {tail_tol}, 1 + 1e-12]")]
    BadTotalMass { sum: f64, tail_tol: f64 },
    #[error("power-law exponent {0} must exceed 3 (finite second moment)")]
    AlphaOutOfRange(f64),
    #[error("empty mass sequence")]
    Empty,
    #[error("invalid parameter: {0}")]
    BadParameter(String),
}

/// A probability distribution on degrees `0..=K`, truncated with known tail.
#[derive(Debug, Clone, PartialEq)]
pub struct DegreeDistribution {
    mass: Vec<f64>,
    tail_tol: f64,
}

impl DegreeDistribution {
    /// Build from an explicit mass sequence indexed by degree.
    pub fn from_mass(mass: Vec<f64>, tail_tol: f64) -> Result<Self, DistError> {
        if mass.is_empty() {
            return Err(DistError::Empty);
        }
        for (k, &value) in mass.iter().enumerate() {
            if !(0.0..=1.0).contains(&value) || !value.is_finite() {
                return Err(DistError::MassOutOfRange { k, value });
            }
        }
        let sum: f64 = mass.iter().sum();
        if !(sum >= 1.0 - tail_tol && sum <= 1.0 + SUM_SLACK) {
            return Err(DistError::BadTotalMass { sum, tail_tol });
        }
        Ok(Self { mass, tail_tol })
    }

    /// Explicit distribution under the default tail tolerance.
    pub fn explicit(mass: Vec<f64>) -> Result<Self, DistError> {
        Self::from_mass(mass, DEFAULT_TAIL_TOL)
    }

    /// Point mass at a single degree.
    pub fn point(degree: usize) -> Self {
        let mut mass = vec![0.0; degree + 1];
        mass[degree] = 1.0;
        Self {
            mass,
            tail_tol: 0.0,
        }
    }

    /// Truncated Poisson of mean `lambda`, truncation chosen so the dropped
    /// tail is below `tail_tol`.
    pub fn poisson_with_tol(lambda: f64, tail_tol: f64) -> Result<Self, DistError> {
        if lambda.is_nan() || lambda < 0.0 || !lambda.is_finite() {
            return Err(DistError::BadParameter(format!(
                "poisson lambda = {lambda}"
            )));
        }
        if lambda == 0.0 {
            return Ok(Self {
                mass: vec![1.0],
                tail_tol,
            });
        }
        let mut mass = Vec::new();
        let mut term = (-lambda).exp();
        let mut cum = 0.0;
        let mut k = 0usize;
        loop {
            mass.push(term);
            cum += term;
            if cum >= 1.0 - tail_tol && k as f64 > lambda {
                break;
            }
            if k > 4000 {
                return Err(DistError::BadParameter(format!(
                    "poisson lambda = {lambda}: truncation did not converge"
                )));
            }
            term *= lambda / (k as f64 + 1.0);
            k += 1;
        }
        Self::from_mass(mass, tail_tol)
    }

    /// Truncated Poisson under the default tail tolerance.
    pub fn poisson(lambda: f64) -> Result<Self, DistError> {
        Self::poisson_with_tol(lambda, DEFAULT_TAIL_TOL)
    }

    /// Truncated Poisson with an explicit truncation point `K`.
    pub fn poisson_truncated(lambda: f64, truncation: usize) -> Result<Self, DistError> {
        if lambda.is_nan() || lambda < 0.0 || !lambda.is_finite() {
            return Err(DistError::BadParameter(format!(
                "poisson lambda = {lambda}"
            )));
        }
        let mut mass = Vec::with_capacity(truncation + 1);
        let mut term = (-lambda).exp();
        for k in 0..=truncation {
            mass.push(term);
            term *= lambda / (k as f64 + 1.0);
        }
        let sum: f64 = mass.iter().sum();
        let tail = (1.0 - sum).max(0.0);
        Self::from_mass(mass, tail + DEFAULT_TAIL_TOL)
    }

    /// Power law `p_k = k^{-alpha} / zeta(alpha)` on `1..=K`, renormalized
    /// over the truncation. `K` is chosen so the dropped tail of the exact
    /// law is below the default tolerance.
    pub fn powerlaw(alpha: f64) -> Result<Self, DistError> {
        let truncation = powerlaw_truncation_for(alpha, DEFAULT_TAIL_TOL)?;
        Self::powerlaw_truncated(alpha, truncation)
    }

    /// Power law with an explicit truncation point.
    pub fn powerlaw_truncated(alpha: f64, truncation: usize) -> Result<Self, DistError> {
        if alpha.is_nan() || alpha <= 3.0 {
            return Err(DistError::AlphaOutOfRange(alpha));
        }
        if truncation < 1 {
            return Err(DistError::BadParameter("power law needs K >= 1".into()));
        }
        let norm = zeta(alpha);
        let mut mass = Vec::with_capacity(truncation + 1);
        mass.push(0.0);
        for k in 1..=truncation {
            mass.push((k as f64).powf(-alpha) / norm);
        }
        let sum: f64 = mass.iter().sum();
        for m in &mut mass {
            *m /= sum;
        }
        Self::from_mass(mass, DEFAULT_TAIL_TOL)
    }

    /// Build from a JSON distribution spec.
    pub fn from_spec(spec: &DistSpec) -> Result<Self, DistError> {
        match spec {
            DistSpec::Poisson { lambda, truncation } => match truncation {
                Some(k) => Self::poisson_truncated(*lambda, *k),
                None => Self::poisson(*lambda),
            },
            DistSpec::Powerlaw { alpha, truncation } => match truncation {
                Some(k) => Self::powerlaw_truncated(*alpha, *k),
                None => Self::powerlaw(*alpha),
            },
            DistSpec::Explicit { mass } => Self::explicit(mass.clone()),
        }
    }

    /// Mass at degree `k` (0 beyond the truncation).
    pub fn mass(&self, k: usize) -> f64 {
        self.mass.get(k).copied().unwrap_or(0.0)
    }

    /// The full mass sequence, indexed by degree.
    pub fn masses(&self) -> &[f64] {
        &self.mass
    }

    /// Truncation point `K` (largest stored degree).
    pub fn truncation(&self) -> usize {
        self.mass.len() - 1
    }

    pub fn tail_tol(&self) -> f64 {
        self.tail_tol
    }

    /// Mean degree and second moment over the truncated support.
    pub fn moments(&self) -> (f64, f64) {
        let mut lambda = 0.0;
        let mut second = 0.0;
        for (k, &p) in self.mass.iter().enumerate() {
            let kf = k as f64;
            lambda += kf * p;
            second += kf * kf * p;
        }
        (lambda, second)
    }

    /// Mean degree.
    pub fn lambda(&self) -> f64 {
        self.moments().0
    }

    /// Inverse-CDF table for sampling (cumulative masses).
    pub(crate) fn cdf(&self) -> Vec<f64> {
        let mut acc = 0.0;
        self.mass
            .iter()
            .map(|&p| {
                acc += p;
                acc
            })
            .collect()
    }
}

/// Pick a power-law truncation so the exact tail beyond it is under `tol`.
fn powerlaw_truncation_for(alpha: f64, tol: f64) -> Result<usize, DistError> {
    if alpha.is_nan() || alpha <= 3.0 {
        return Err(DistError::AlphaOutOfRange(alpha));
    }
    // Integral bound: sum_{k>K} k^-alpha < K^(1-alpha) / (alpha - 1).
    let norm = zeta(alpha);
    let k = (1.0 / ((alpha - 1.0) * tol * norm)).powf(1.0 / (alpha - 1.0));
    Ok((k.ceil() as usize).clamp(16, 200_000))
}

/// Serializable distribution spec, the wire format accepted everywhere a
/// distribution can be configured.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum DistSpec {
    Poisson {
        lambda: f64,
        #[serde(skip_serializing_if = "Option::is_none")]
        truncation: Option<usize>,
    },
    Powerlaw {
        alpha: f64,
        #[serde(skip_serializing_if = "Option::is_none")]
        truncation: Option<usize>,
    },
    Explicit {
        mass: Vec<f64>,
    },
}

impl DistSpec {
    pub fn parse(json: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(json)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn moments_point_mass() {
        let d = DegreeDistribution::point(1);
        assert_eq!(d.moments(), (1.0, 1.0));
    }

    #[test]
    fn moments_two_atoms() {
        let d = DegreeDistribution::explicit(vec![0.5, 0.0, 0.5]).unwrap();
        let (l, s2) = d.moments();
        assert!((l - 1.0).abs() < 1e-15);
        assert!((s2 - 2.0).abs() < 1e-15);
    }

    #[test]
    fn moments_truncated_poisson_match_closed_form() {
        let d = DegreeDistribution::poisson_truncated(1.0, 40).unwrap();
        let (l, s2) = d.moments();
        assert!((l - 1.0).abs() < 1e-12, "lambda = {l}");
        assert!((s2 - 2.0).abs() < 1e-12, "second moment = {s2}");
    }

    #[test]
    fn poisson_truncation_respects_tail() {
        let d = DegreeDistribution::poisson_with_tol(1.41, 1e-14).unwrap();
        let sum: f64 = d.masses().iter().sum();
        assert!(sum >= 1.0 - 1e-14);
    }

    #[test]
    fn powerlaw_mass_ratio() {
        let d = DegreeDistribution::powerlaw_truncated(4.0, 10_000).unwrap();
        let ratio = d.mass(1) / d.mass(2);
        assert!((ratio - 16.0).abs() < 1e-9, "ratio = {ratio}");
    }

    #[test]
    fn powerlaw_rejects_small_alpha() {
        assert_eq!(
            DegreeDistribution::powerlaw(3.0).unwrap_err(),
            DistError::AlphaOutOfRange(3.0)
        );
    }

    #[test]
    fn invalid_masses_rejected() {
        assert!(matches!(
            DegreeDistribution::explicit(vec![0.5, -0.1, 0.6]),
            Err(DistError::MassOutOfRange { k: 1, .. })
        ));
        assert!(matches!(
            DegreeDistribution::explicit(vec![0.5, 0.2]),
            Err(DistError::BadTotalMass { .. })
        ));
    }

    #[test]
    fn spec_round_trip() {
        let spec = DistSpec::parse(r#"{"kind":"poisson","lambda":1.2}"#).unwrap();
        assert_eq!(
            spec,
            DistSpec::Poisson {
                lambda: 1.2,
                truncation: None
            }
        );
        let d = DegreeDistribution::from_spec(&spec).unwrap();
        assert!((d.lambda() - 1.2).abs() < 1e-9);

        let spec = DistSpec::parse(r#"{"kind":"explicit","mass":[0.0,1.0]}"#).unwrap();
        let d = DegreeDistribution::from_spec(&spec).unwrap();
        assert_eq!(d.mass(1), 1.0);
    }
}
