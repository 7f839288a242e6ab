//! Exponent sets for `u_t = Σ_i (u^{m_i})_{x_i x_i}` and the constants derived
//! from them.
//!
//! Everything downstream (barriers, the self-similar map, the rescaled
//! solver) reads `m̄`, `β` and the per-axis spreading rates `α_i` from an
//! [`ExponentSet`].

use std::fmt;

use thiserror::Error;

/// Largest spatial dimension supported by the grids in this crate.
pub const MAX_DIM: usize = 3;

/// Tolerance used to decide whether the two equivalent admissibility forms
/// disagree only because a value sits on the (excluded) boundary.
const BOUNDARY_TOL: f64 = 1e-12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ParamsError {
    #[error("dimension mismatch: {got} exponents given for n = {expected}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("exponent m_{index} = {value} is not a positive finite number")]
    NonPositiveExponent { index: usize, value: f64 },
    #[error("unsupported dimension n = {0} (supported: 1..={MAX_DIM})")]
    UnsupportedDimension(usize),
    #[error("admissibility forms disagree away from the boundary: {0}")]
    Inconsistent(String),
}

/// Diffusion exponents `m_i` together with `m̄`, `β` and `α_i`.
#[derive(Debug, Clone, PartialEq)]
pub struct ExponentSet {
    m: Vec<f64>,
    m_bar: f64,
    beta: f64,
    alpha: Vec<f64>,
}

impl ExponentSet {
    /// Builds the set for `n = m.len()`.
    pub fn new(m: &[f64]) -> Result<Self, ParamsError> {
        Self::derive(m, m.len())
    }

    /// Validates the exponent vector against `n` and computes
    /// `m̄ = Σ m_i / n`, `β = m̄ − (n−2)/n` and `α_i = (m̄ − m_i)/2 + 1/n`.
    ///
    /// No admissibility is enforced here; see [`ExponentSet::check_admissible`].
    pub fn derive(m: &[f64], n: usize) -> Result<Self, ParamsError> {
        if n == 0 || n > MAX_DIM {
            return Err(ParamsError::UnsupportedDimension(n));
        }
        if m.len() != n {
            return Err(ParamsError::DimensionMismatch {
                expected: n,
                got: m.len(),
            });
        }
        if let Some((index, &value)) = m
            .iter()
            .enumerate()
            .find(|(_, v)| !(v.is_finite() && **v > 0.0))
        {
            return Err(ParamsError::NonPositiveExponent { index, value });
        }
        let nf = n as f64;
        let m_bar = m.iter().sum::<f64>() / nf;
        let beta = m_bar - (nf - 2.0) / nf;
        let alpha = m.iter().map(|mi| (m_bar - mi) / 2.0 + 1.0 / nf).collect();
        Ok(Self {
            m: m.to_vec(),
            m_bar,
            beta,
            alpha,
        })
    }

    pub fn dim(&self) -> usize {
        self.m.len()
    }

    pub fn m(&self) -> &[f64] {
        &self.m
    }

    pub fn m_bar(&self) -> f64 {
        self.m_bar
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    /// Per-axis spreading rates `α_i`; they always sum to one.
    pub fn alpha(&self) -> &[f64] {
        &self.alpha
    }

    /// `μ_i = (1 − m_i)/2`.
    pub fn mu(&self) -> Vec<f64> {
        self.m.iter().map(|mi| (1.0 - mi) / 2.0).collect()
    }

    pub fn is_isotropic(&self) -> bool {
        self.m.iter().all(|&mi| mi == self.m[0])
    }

    /// Evaluates the four standing conditions
    /// `m_i > 0`, `Σ m_i > n − 2`, `min m_i ≤ 1`, `max m_i < (2 + Σ m_i)/n`
    /// and cross-checks them against the equivalent form
    /// `β > 0`, `α_i > 0`, `min m_i ≤ 1`, `m_i > 0`.
    ///
    /// Values exactly on the boundary `max m_i = (2 + Σ m_i)/n` are rejected
    /// by both forms. An error is returned only if the two forms disagree by
    /// more than roundoff.
    pub fn check_admissible(&self) -> Result<Verdict, ParamsError> {
        let n = self.dim() as f64;
        let sum: f64 = self.m.iter().sum();
        let min = self.m.iter().copied().fold(f64::INFINITY, f64::min);
        let max = self.m.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let bound = (2.0 + sum) / n;

        let checks = vec![
            ConditionCheck {
                condition: Condition::PositiveExponents,
                passed: self.m.iter().all(|&v| v > 0.0),
                lhs: min,
                rhs: 0.0,
            },
            ConditionCheck {
                condition: Condition::SumAboveDimMinusTwo,
                passed: sum > n - 2.0,
                lhs: sum,
                rhs: n - 2.0,
            },
            ConditionCheck {
                condition: Condition::MinAtMostOne,
                passed: min <= 1.0,
                lhs: min,
                rhs: 1.0,
            },
            ConditionCheck {
                condition: Condition::MaxBelowBound,
                passed: max < bound,
                lhs: max,
                rhs: bound,
            },
        ];
        let primary = checks.iter().all(|c| c.passed);

        let min_alpha = self.alpha.iter().copied().fold(f64::INFINITY, f64::min);
        let equivalent = self.beta > 0.0 && min_alpha > 0.0 && min <= 1.0 && min > 0.0;

        if primary != equivalent {
            let on_boundary = min_alpha.abs() <= BOUNDARY_TOL
                || self.beta.abs() <= BOUNDARY_TOL
                || (max - bound).abs() <= BOUNDARY_TOL * bound.abs().max(1.0)
                || (sum - (n - 2.0)).abs() <= BOUNDARY_TOL * n;
            if !on_boundary {
                return Err(ParamsError::Inconsistent(format!(
                    "primary form says {primary}, beta/alpha form says {equivalent} for m = {:?}",
                    self.m
                )));
            }
            // Boundary cases are inadmissible under either reading.
            let mut checks = checks;
            if let Some(c) = checks
                .iter_mut()
                .find(|c| c.condition == Condition::MaxBelowBound)
            {
                c.passed = false;
            }
            return Ok(Verdict { checks });
        }
        Ok(Verdict { checks })
    }
}

/// One of the four standing conditions on the exponents.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Condition {
    PositiveExponents,
    SumAboveDimMinusTwo,
    MinAtMostOne,
    MaxBelowBound,
}

impl fmt::Display for Condition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Condition::PositiveExponents => "m_i > 0",
            Condition::SumAboveDimMinusTwo => "sum m_i > n - 2",
            Condition::MinAtMostOne => "min m_i <= 1",
            Condition::MaxBelowBound => "max m_i < (2 + sum m_i)/n",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConditionCheck {
    pub condition: Condition,
    pub passed: bool,
    /// The quantity compared (left-hand side).
    pub lhs: f64,
    /// The threshold it is compared against.
    pub rhs: f64,
}

/// Pass/fail for each standing condition.
#[derive(Debug, Clone, PartialEq)]
pub struct Verdict {
    pub checks: Vec<ConditionCheck>,
}

impl Verdict {
    pub fn is_admissible(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn violations(&self) -> Vec<Condition> {
        self.checks
            .iter()
            .filter(|c| !c.passed)
            .map(|c| c.condition)
            .collect()
    }
}

impl ExponentSet {
    /// Key/value report of the derived constants and the admissibility verdict.
    pub fn report(&self) -> Result<String, ParamsError> {
        let verdict = self.check_admissible()?;
        let mut out = String::new();
        let join = |v: &[f64]| {
            v.iter()
                .map(|x| format!("{x}"))
                .collect::<Vec<_>>()
                .join(", ")
        };
        out.push_str(&format!("n: {}\n", self.dim()));
        out.push_str(&format!("m: {}\n", join(&self.m)));
        out.push_str(&format!("m_bar: {}\n", self.m_bar));
        out.push_str(&format!("beta: {}\n", self.beta));
        out.push_str(&format!("alpha: {}\n", join(&self.alpha)));
        out.push_str(&format!("alpha_sum: {}\n", self.alpha.iter().sum::<f64>()));
        for c in &verdict.checks {
            out.push_str(&format!(
                "condition[{}]: {} ({} vs {})\n",
                c.condition,
                if c.passed { "pass" } else { "fail" },
                c.lhs,
                c.rhs
            ));
        }
        out.push_str(&format!(
            "verdict: {}\n",
            if verdict.is_admissible() {
                "admissible"
            } else {
                "inadmissible"
            }
        ));
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64) -> bool {
        (a - b).abs() <= 1e-14 * b.abs().max(1.0)
    }

    #[test]
    fn heat_constants() {
        let e = ExponentSet::derive(&[1.0], 1).unwrap();
        assert!(close(e.m_bar(), 1.0));
        assert!(close(e.beta(), 2.0));
        assert!(close(e.alpha()[0], 1.0));
    }

    #[test]
    fn planar_constants() {
        let e = ExponentSet::derive(&[0.8, 1.2], 2).unwrap();
        assert!(close(e.m_bar(), 1.0));
        assert!(close(e.beta(), 1.0));
        assert!(close(e.alpha()[0], 0.6));
        assert!(close(e.alpha()[1], 0.4));
    }

    #[test]
    fn spatial_constants() {
        let e = ExponentSet::derive(&[0.5, 1.0, 1.5], 3).unwrap();
        assert!(close(e.m_bar(), 1.0));
        assert!(close(e.beta(), 2.0 / 3.0));
        assert!(close(e.alpha()[0], 7.0 / 12.0));
        assert!(close(e.alpha()[1], 1.0 / 3.0));
        assert!(close(e.alpha()[2], 1.0 / 12.0));
    }

    #[test]
    fn derive_errors() {
        assert_eq!(
            ExponentSet::derive(&[1.0], 2),
            Err(ParamsError::DimensionMismatch {
                expected: 2,
                got: 1
            })
        );
        assert!(matches!(
            ExponentSet::derive(&[1.0, 0.0], 2),
            Err(ParamsError::NonPositiveExponent { index: 1, .. })
        ));
        assert!(matches!(
            ExponentSet::derive(&[1.0, -2.0], 2),
            Err(ParamsError::NonPositiveExponent { index: 1, .. })
        ));
        assert_eq!(
            ExponentSet::derive(&[1.0; 4], 4),
            Err(ParamsError::UnsupportedDimension(4))
        );
        assert_eq!(
            ExponentSet::derive(&[], 0),
            Err(ParamsError::UnsupportedDimension(0))
        );
    }

    #[test]
    fn admissible_planar() {
        let v = ExponentSet::new(&[0.8, 1.2]).unwrap().check_admissible().unwrap();
        assert!(v.is_admissible());
        assert!(v.violations().is_empty());
    }

    #[test]
    fn boundary_case_rejected() {
        let e = ExponentSet::new(&[1.0, 3.0]).unwrap();
        assert_eq!(e.alpha()[1], 0.0);
        let v = e.check_admissible().unwrap();
        assert!(!v.is_admissible());
        assert_eq!(v.violations(), vec![Condition::MaxBelowBound]);
    }

    #[test]
    fn heat_admissible() {
        let v = ExponentSet::new(&[1.0]).unwrap().check_admissible().unwrap();
        assert!(v.is_admissible());
    }

    #[test]
    fn slow_diffusion_everywhere_is_inadmissible() {
        let v = ExponentSet::new(&[2.0]).unwrap().check_admissible().unwrap();
        assert_eq!(v.violations(), vec![Condition::MinAtMostOne]);
        let v = ExponentSet::new(&[0.1, 0.1, 0.1])
            .unwrap()
            .check_admissible()
            .unwrap();
        assert_eq!(v.violations(), vec![Condition::SumAboveDimMinusTwo]);
    }

    #[test]
    fn report_lists_verdict() {
        let r = ExponentSet::new(&[0.8, 1.2]).unwrap().report().unwrap();
        assert!(r.contains("beta: 1\n"));
        assert!(r.contains("verdict: admissible"));
    }
}
